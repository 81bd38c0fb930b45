//! Reading and writing system documents, including how invalid input is
//! reported.

use contextuality::corpus::magic_box;
use contextuality::document::{parse_system, serialize_system};
use std::error::Error;

const BROKEN: &str = r#"{
  "version": 1,
  "contents": [{"id": "1", "support": ["+1", "-1"], "embedding": ["1", "-1"]}],
  "contexts": [
    {"id": "a", "contents": ["1"], "distribution": [
      {"values": ["+1"], "p": "0.6"},
      {"values": ["-1"], "p": "1/3"}
    ]}
  ]
}"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let text = serialize_system(&magic_box());
    println!("{text}");
    let back = parse_system(&text)?;
    println!("round trip preserves the system: {}", back == magic_box());

    match parse_system(BROKEN) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    match parse_system("{\"version\": 1,") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
