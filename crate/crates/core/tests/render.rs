use std::path::PathBuf;

use strata_core::render::{to_svg, StyleSpec};
use strata_core::{assign_layers, run, CyclePolicy, HierarchySpec, LayoutConfig, Mode};
use strata_testkit::fixtures;

fn golden_path() -> PathBuf {
    fixtures::dir().join("golden/cornelia38_layered_seed11.svg")
}

fn cornelia_layered_svg() -> String {
    let ds = fixtures::load("cornelia38");
    let la = assign_layers(&ds, &HierarchySpec::default(), CyclePolicy::Reject).unwrap();
    let layout = run(&ds, &LayoutConfig::new(Mode::ForceLayered, 11), Some(&la)).unwrap();
    to_svg(&layout, &ds, &StyleSpec::default())
}

/// Set `STRATA_BLESS=1` to rewrite the golden file after a deliberate change.
#[test]
fn cornelia_layered_matches_golden() {
    let svg = cornelia_layered_svg();
    if std::env::var_os("STRATA_BLESS").is_some() {
        std::fs::write(golden_path(), &svg).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).expect("golden file present");
    assert!(svg == golden, "rendered SVG differs from {}", golden_path().display());
}

#[test]
fn svg_bytes_are_stable_across_runs() {
    for name in fixtures::ALL {
        let ds = fixtures::load(name);
        let la = assign_layers(&ds, &HierarchySpec::default(), CyclePolicy::Reject).unwrap();
        for mode in [Mode::ForceDirected, Mode::ForceLayered] {
            let render = || {
                let layout = run(&ds, &LayoutConfig::new(mode, 11), Some(&la)).unwrap();
                to_svg(&layout, &ds, &StyleSpec::default())
            };
            let first = render();
            assert_eq!(first.matches("<circle").count(), ds.len());
            assert_eq!(first.matches("<line").count(), ds.relations().len());
            for _ in 0..3 {
                assert!(render() == first, "{name} {mode:?}");
            }
        }
    }
}
