//! Regenerates the document fixtures shipped under `fixtures/`.
//!
//! `cargo run --example fixtures -- <dir>` writes them to `<dir>` (default:
//! the crate's `fixtures/` directory).

use contextuality::corpus::{
    disturbed_cycle, find_disturbed_contextual_cycle, generic_example, magic_box, single_context,
};
use contextuality::document::serialize_system;
use contextuality::System;
use std::error::Error;
use std::path::{Path, PathBuf};

pub fn fixtures() -> Vec<(&'static str, System)> {
    let (_, contextual) = find_disturbed_contextual_cycle(0..10_000).expect("search finds an instance");
    vec![
        ("magic_box", magic_box()),
        ("generic_example", generic_example(7)),
        ("disturbed_cycle", disturbed_cycle()),
        ("disturbed_contextual_cycle", contextual),
        ("single_context", single_context()),
    ]
}

pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>, Box<dyn Error>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, sys) in fixtures() {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, serialize_system(&sys))?;
        written.push(path);
    }
    Ok(written)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    for path in write_fixtures(&dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
