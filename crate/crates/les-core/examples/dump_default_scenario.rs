//! Print a built-in scenario as JSON. The shipped files are regenerated
//! with:
//!
//! ```text
//! cargo run -p les-core --example dump_default_scenario > scenarios/default.json
//! cargo run -p les-core --example dump_default_scenario tiny-0 > scenarios/tiny-0.json
//! ```

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "default".into());
    let scenario = match name.strip_prefix("tiny-") {
        Some(idx) => les_core::fixtures::tiny_scenario(idx.parse().expect("tiny index")),
        None => les_core::fixtures::default_scenario(),
    };
    println!("{}", scenario.to_json_pretty());
}
