//! Write a construction and its report to disk, read them back and check
//! that verification reproduces the stored numbers.

use sparse_steady::construction::{build, compare_reports, verify_construction, ConstructionConfig, ConstructionState, VerifyOptions};
use sparse_steady::io::{read_field, read_json, write_field, write_json};

fn main() -> sparse_steady::Result<()> {
    let dir = std::env::temp_dir().join("sparse-steady-example");
    std::fs::create_dir_all(&dir)?;

    let state = build(ConstructionConfig::standard(4))?;
    let opts = VerifyOptions::default();
    let report = verify_construction(&state, &opts)?;
    write_json(&dir.join("state.json"), &state)?;
    write_json(&dir.join("report.json"), &report)?;
    let u = sparse_steady::construction::materialize_partial(&state, 4)?;
    write_field(&dir.join("field.json"), &u)?;

    let loaded: ConstructionState = read_json(&dir.join("state.json"))?;
    let again = verify_construction(&loaded, &opts)?;
    let diffs = compare_reports(&report, &again, 1e-12);
    println!("{} differences after the round trip", diffs.len());
    assert_eq!(read_field(&dir.join("field.json"))?, u);
    println!("files in {}", dir.display());
    Ok(())
}
