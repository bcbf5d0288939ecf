//! Byte-for-byte comparison of every subcommand's output with `tests/golden/`.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p robust-mallows-cli --test golden`.

mod common;

#[test]
fn outputs_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::run_chain(dir.path());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        common::write_golden(&files);
        return;
    }
    let bad = common::golden_mismatches(&files);
    assert!(bad.is_empty(), "golden mismatches: {bad:#?}");
}
