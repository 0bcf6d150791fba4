//! Shared fixture loading for the integration suites.

use latcoh::plumbing::{parse_graph, Lattice};

#[allow(dead_code)]
pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}.graph", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> Lattice {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    Lattice::new(parse_graph(&text).unwrap()).unwrap()
}

#[allow(dead_code)]
pub const TWO_NODE_FIXTURES: [&str; 8] =
    ["G_621", "G_622", "G_623", "G_624", "G_625", "G_626", "G_ex1", "G_ex2"];
