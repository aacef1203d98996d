use std::collections::BTreeSet;

use strata_core::layering::HierarchySpec;
use strata_core::model::{DatasetBuilder, GraphDataset, Person};
use strata_core::rng::Lcg;
use strata_core::scalar::Vec2;

/// Up to `max_persons` persons with a random mix of parent, spouse and
/// godparent relations. Parent edges mostly run from lower to higher index,
/// so both acyclic and cyclic inputs come up.
pub fn random_family(rng: &mut Lcg, max_persons: usize) -> GraphDataset {
    let n = 1 + rng.below(max_persons as u32) as usize;
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut b = DatasetBuilder::new();
    for id in &ids {
        b = b.push_person(Person::new(id.as_str(), id.as_str()));
    }
    if n < 2 {
        return b.build().expect("valid");
    }
    let m = rng.below((n * 3 / 2) as u32 + 1) as usize;
    let mut seen = BTreeSet::new();
    for _ in 0..m {
        let s = rng.below(n as u32) as usize;
        let mut t = rng.below(n as u32 - 1) as usize;
        if t >= s {
            t += 1;
        }
        let kind = match rng.below(4) {
            0 | 1 => "parent_of",
            2 => "spouse_of",
            _ => "godparent_of",
        };
        let (s, t) = if kind == "parent_of" && s > t && !rng.chance(0.1) {
            (t, s)
        } else {
            (s, t)
        };
        if seen.insert(dedup_key(s, t, kind)) {
            b = b.relation(&ids[s], &ids[t], kind);
        }
    }
    b.build().expect("generated relations are valid")
}

/// Spouse relations are undirected, so both orientations are one relation.
fn dedup_key(s: usize, t: usize, kind: &str) -> (usize, usize, &str) {
    if kind == "spouse_of" {
        (s.min(t), s.max(t), kind)
    } else {
        (s, t, kind)
    }
}

/// Default hierarchy most of the time, sometimes godparenthood counted as
/// generational too.
pub fn random_spec(rng: &mut Lcg) -> HierarchySpec {
    if rng.chance(0.2) {
        HierarchySpec::from_kinds(["parent_of", "godparent_of"], ["spouse_of"])
    } else {
        HierarchySpec::default()
    }
}

/// Random multigraph on up to `max_nodes` persons with a per-graph edge
/// density; sparse draws give trees and cut vertices, dense ones cycles.
pub fn random_graph(rng: &mut Lcg, max_nodes: usize) -> GraphDataset {
    let n = 1 + rng.below(max_nodes as u32) as usize;
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut b = DatasetBuilder::new().persons(&ids.iter().map(String::as_str).collect::<Vec<_>>());
    if n < 2 {
        return b.build().expect("valid");
    }
    let density = 0.1 + 0.4 * rng.next_f64();
    let mut seen = BTreeSet::new();
    for s in 0..n {
        for t in 0..n {
            if s == t || !rng.chance(density / 2.0) {
                continue;
            }
            let kind = ["parent_of", "spouse_of", "godparent_of"][rng.below(3) as usize];
            if seen.insert(dedup_key(s, t, kind)) {
                b = b.relation(&ids[s], &ids[t], kind);
            }
        }
    }
    b.build().expect("generated relations are valid")
}

pub fn random_positions(rng: &mut Lcg, n: usize, width: f64, height: f64) -> Vec<Vec2<f64>> {
    (0..n)
        .map(|_| Vec2::new(rng.next_f64() * width, rng.next_f64() * height))
        .collect()
}

/// A similarity transform (rotation, uniform scale, translation) that maps
/// the thousandths grid onto itself. The rotation matrix is
/// `[[a, -b], [b, a]]` for a Pythagorean triple `(a, b, c)`, so every
/// orientation sign is preserved exactly after quantization.
#[derive(Clone, Copy, Debug)]
pub struct GridTransform {
    pub a: i64,
    pub b: i64,
    pub tx: i64,
    pub ty: i64,
}

const TRIPLES: [(i64, i64); 8] = [(3, 4), (5, 12), (8, 15), (7, 24), (20, 21), (12, 35), (9, 40), (1, 0)];

impl GridTransform {
    pub fn random(rng: &mut Lcg) -> Self {
        let (mut a, mut b) = TRIPLES[rng.below(TRIPLES.len() as u32) as usize];
        if rng.chance(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        if rng.chance(0.5) {
            a = -a;
        }
        if rng.chance(0.5) {
            b = -b;
        }
        let shift = |rng: &mut Lcg| rng.below(2_000_000) as i64 - 1_000_000;
        Self {
            a,
            b,
            tx: shift(rng),
            ty: shift(rng),
        }
    }

    /// Applies the transform to coordinates at their 3-decimal value.
    pub fn apply(&self, p: Vec2<f64>) -> Vec2<f64> {
        let q = |v: f64| strata_core::fixed::millis(v);
        let (x, y) = (q(p.x), q(p.y));
        let nx = self.a * x - self.b * y + self.tx;
        let ny = self.b * x + self.a * y + self.ty;
        Vec2::new(nx as f64 / 1000.0, ny as f64 / 1000.0)
    }
}
