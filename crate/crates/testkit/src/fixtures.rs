use std::path::PathBuf;

use strata_core::model::{parse_dataset, Format, GraphDataset};

pub const ALL: [&str; 4] = ["cornelia38", "fig2_13", "trio", "chain3"];

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(name: &str) -> PathBuf {
    dir().join(format!("{name}.json"))
}

pub fn text(name: &str) -> String {
    let p = path(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("reading {}: {e}", p.display()))
}

pub fn load(name: &str) -> GraphDataset {
    parse_dataset(&text(name), Format::Json).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
