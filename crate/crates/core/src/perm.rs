//! Permutations in one-line notation and the combinatorial quantities built on them.
//!
//! Elements are labelled `1..=n`. A [`Permutation`] stores its one-line form
//! (`order[p]` is the element ranked `p + 1`) together with the cached inverse
//! (`ranks[e - 1]` is the 1-based rank of element `e`).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A full ranking of the elements `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    order: Vec<u32>,
    ranks: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from its one-line form, checking that it is a bijection on `1..=n`.
    pub fn new(order: Vec<u32>) -> Result<Self> {
        let n = order.len();
        let mut ranks = vec![0u32; n];
        for (p, &e) in order.iter().enumerate() {
            if e == 0 || e as usize > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            let slot = &mut ranks[e as usize - 1];
            if *slot != 0 {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: "repeated element",
                });
            }
            *slot = p as u32 + 1;
        }
        Ok(Self { order, ranks })
    }

    /// Builds a permutation from its position vector (`ranks[e - 1]` = rank of `e`).
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self> {
        let inverse = Self::new(ranks)?;
        Ok(Self {
            order: inverse.ranks,
            ranks: inverse.order,
        })
    }

    /// Caller guarantees `order` is a bijection on `1..=n`.
    pub(crate) fn from_order_unchecked(order: Vec<u32>) -> Self {
        let mut ranks = vec![0u32; order.len()];
        for (p, &e) in order.iter().enumerate() {
            ranks[e as usize - 1] = p as u32 + 1;
        }
        Self { order, ranks }
    }

    pub fn identity(n: usize) -> Self {
        let order: Vec<u32> = (1..=n as u32).collect();
        Self {
            ranks: order.clone(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// One-line form: the element at each rank.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Inverse form: the rank of each element (entry `e - 1` for element `e`).
    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// 1-based rank of `element`. Panics if the element is out of range.
    pub fn rank_of(&self, element: u32) -> u32 {
        self.ranks[element as usize - 1]
    }

    /// Element placed at 1-based `rank`. Panics if the rank is out of range.
    pub fn element_at(&self, rank: u32) -> u32 {
        self.order[rank as usize - 1]
    }

    pub fn position_vector(&self) -> PositionVector {
        PositionVector(self.ranks.clone())
    }

    /// The same elements in the opposite order.
    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self::from_order_unchecked(order)
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(p, &e)| e as usize == p + 1)
    }

    /// Induced order on `subset`, relabelled onto `1..=|subset|` so that the
    /// smallest element of the subset becomes 1, the next smallest 2, and so on.
    ///
    /// Duplicate entries in `subset` are ignored.
    pub fn restrict(&self, subset: &[u32]) -> Result<Self> {
        let n = self.len();
        let mut members = subset.to_vec();
        for &e in &members {
            if e == 0 || e as usize > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
        }
        members.sort_unstable();
        members.dedup();
        let mut label = vec![0u32; n];
        for (i, &e) in members.iter().enumerate() {
            label[e as usize - 1] = i as u32 + 1;
        }
        let order = self
            .order
            .iter()
            .filter_map(|&e| match label[e as usize - 1] {
                0 => None,
                l => Some(l),
            })
            .collect();
        Ok(Self::from_order_unchecked(order))
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(order: Vec<u32>) -> Result<Self> {
        Self::new(order)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.order
    }
}

/// Rank of every element: entry `i` is the rank of element `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PositionVector(Vec<u32>);

impl PositionVector {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }

    /// Exact squared Euclidean distance.
    pub fn squared_distance(&self, other: &Self) -> Result<u64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let d = a as i64 - b as i64;
                (d * d) as u64
            })
            .sum())
    }
}

/// Euclidean distance between two position vectors.
pub fn l2_distance(u: &PositionVector, v: &PositionVector) -> Result<f64> {
    Ok(libm::sqrt(u.squared_distance(v)? as f64))
}

/// Ordered pairs `(x, y)` with `x` before `y` in the first permutation and
/// `y` before `x` in the second.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSet {
    pub pairs: Vec<(u32, u32)>,
}

impl DifferenceSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Front and back adjustment of a permutation with respect to a reference ranking.
///
/// Entry `i` of each vector belongs to element `i + 1`:
/// `front` counts elements ranked before it in the reference but after it in the
/// permutation, `back` counts elements ranked after it in the reference but before
/// it in the permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjustmentVectors {
    pub front: Vec<u32>,
    pub back: Vec<u32>,
}

/// Number of pairs ordered differently by `a` and `b`, via merge-sort inversion counting.
pub fn kendall_tau(a: &Permutation, b: &Permutation) -> Result<u64> {
    check_len(a.len(), b.len())?;
    let mut seq: Vec<u32> = b.order.iter().map(|&e| a.rank_of(e)).collect();
    let mut buf = vec![0u32; seq.len()];
    Ok(count_inversions(&mut seq, &mut buf))
}

/// Sorts `seq` in place and returns its number of inversions.
pub(crate) fn count_inversions(seq: &mut [u32], buf: &mut [u32]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (buf_left, buf_right) = buf.split_at_mut(mid);
    let mut inversions = {
        let (left, right) = seq.split_at_mut(mid);
        count_inversions(left, buf_left) + count_inversions(right, buf_right)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i] <= seq[j] {
            buf[k] = seq[i];
            i += 1;
        } else {
            buf[k] = seq[j];
            inversions += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    inversions
}

pub fn difference_set(p: &Permutation, s: &Permutation) -> Result<DifferenceSet> {
    check_len(p.len(), s.len())?;
    let order = p.order();
    let mut pairs = Vec::new();
    for (i, &x) in order.iter().enumerate() {
        for &y in &order[i + 1..] {
            if s.rank_of(y) < s.rank_of(x) {
                pairs.push((x, y));
            }
        }
    }
    Ok(DifferenceSet { pairs })
}

/// Sum over the difference set of `(rank_p(y) - rank_p(x))`.
///
/// Computed with two Fenwick trees in `O(n log n)`; always equals half the
/// squared L2 distance between the two position vectors.
pub fn weighted_inversion_sum(p: &Permutation, s: &Permutation) -> Result<u64> {
    check_len(p.len(), s.len())?;
    let n = p.len();
    let mut counts = Fenwick::new(n);
    let mut offsets = Fenwick::new(n);
    let mut total = 0u64;
    for (l, &x) in p.order().iter().enumerate() {
        let r = s.rank_of(x) as usize;
        // Earlier positions k whose s-rank exceeds r.
        let later_count = l as u64 - counts.prefix(r);
        let later_offsets = offsets.total() - offsets.prefix(r);
        total += later_count * l as u64 - later_offsets;
        counts.add(r, 1);
        offsets.add(r, l as u64);
    }
    Ok(total)
}

pub fn adjustment_vectors(p: &Permutation, reference: &Permutation) -> Result<AdjustmentVectors> {
    check_len(p.len(), reference.len())?;
    let n = p.len();
    let seq: Vec<u32> = reference.order().iter().map(|&e| p.rank_of(e)).collect();
    let mut front_by_pos = vec![0u32; n];
    let mut back_by_pos = vec![0u32; n];
    let mut tree = Fenwick::new(n);
    front_back_counts(&seq, &mut front_by_pos, &mut back_by_pos, &mut tree);
    let mut front = vec![0u32; n];
    let mut back = vec![0u32; n];
    for (k, &e) in reference.order().iter().enumerate() {
        front[e as usize - 1] = front_by_pos[k];
        back[e as usize - 1] = back_by_pos[k];
    }
    Ok(AdjustmentVectors { front, back })
}

/// For a sequence of distinct ranks `seq` (values in `1..=seq.len()`):
/// `front[k] = #{l < k : seq[l] > seq[k]}` and `back[k] = #{l > k : seq[l] < seq[k]}`.
pub(crate) fn front_back_counts(seq: &[u32], front: &mut [u32], back: &mut [u32], tree: &mut Fenwick) {
    tree.clear();
    for (k, &r) in seq.iter().enumerate() {
        front[k] = (k as u64 - tree.prefix(r as usize)) as u32;
        tree.add(r as usize, 1);
    }
    tree.clear();
    for (k, &r) in seq.iter().enumerate().rev() {
        back[k] = tree.prefix(r as usize - 1) as u32;
        tree.add(r as usize, 1);
    }
}

/// Ranks `v.len()` unlocked elements by ascending value of `v` and pads the result
/// with locked blocks kept in identity order.
///
/// The output is a permutation on `locked_prefix + v.len() + locked_suffix`
/// elements: elements `1..=locked_prefix` occupy the first ranks, element
/// `locked_prefix + i + 1` is the unlocked element scored by `v[i]`, and the
/// trailing `locked_suffix` elements occupy the last ranks. Ties (and NaNs, via
/// total ordering) are broken by ascending element index.
pub fn sort_to_permutation(v: &[f64], locked_prefix: usize, locked_suffix: usize) -> Permutation {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| match v[a].total_cmp(&v[b]) {
        Ordering::Equal => a.cmp(&b),
        other => other,
    });
    let mut order = Vec::with_capacity(locked_prefix + n + locked_suffix);
    order.extend(1..=locked_prefix as u32);
    order.extend(idx.iter().map(|&i| (locked_prefix + i + 1) as u32));
    let start = (locked_prefix + n) as u32;
    order.extend(start + 1..=start + locked_suffix as u32);
    Permutation::from_order_unchecked(order)
}

/// All permutations of `1..=n` in lexicographic order of their one-line form.
pub fn lex_permutations(n: usize) -> LexPermutations {
    LexPermutations {
        next: Some((1..=n as u32).collect()),
    }
}

pub struct LexPermutations {
    next: Option<Vec<u32>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation::from_order_unchecked(current))
    }
}

fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Index of `p` in the lexicographic enumeration of its symmetric group (Lehmer code).
pub fn lex_index(p: &Permutation) -> usize {
    let n = p.len();
    let mut tree = Fenwick::new(n);
    let mut factorial = 1usize;
    let mut index = 0usize;
    for (k, &e) in p.order().iter().enumerate().rev() {
        // Elements after position k that are smaller than e.
        let smaller = tree.prefix(e as usize - 1) as usize;
        index += smaller * factorial;
        tree.add(e as usize, 1);
        factorial *= n - k;
    }
    index
}

/// Binary indexed tree over `1..=n` with u64 sums.
pub(crate) struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    pub(crate) fn clear(&mut self) {
        self.tree.iter_mut().for_each(|x| *x = 0);
    }

    pub(crate) fn add(&mut self, mut i: usize, value: u64) {
        while i < self.tree.len() {
            self.tree[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `1..=i`.
    pub(crate) fn prefix(&self, mut i: usize) -> u64 {
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    pub(crate) fn total(&self) -> u64 {
        self.prefix(self.tree.len() - 1)
    }
}
