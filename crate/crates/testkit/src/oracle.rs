use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use strata_core::layering::{HierarchySpec, KindClass};
use strata_core::model::GraphDataset;
use strata_core::scalar::{Scalar, Vec2};

type Q = BigRational;

/// The printed 3-decimal value of `v` as an exact rational.
fn decimal(v: f64) -> Q {
    let s = format!("{v:.3}");
    let digits: String = s.chars().filter(|&c| c != '.').collect();
    Q::new(digits.parse::<BigInt>().expect("decimal digits"), BigInt::from(1000))
}

fn cross(o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn sign(q: &Q) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

fn dot(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.0 + &a.1 * &b.1
}

fn sub(a: &(Q, Q), b: &(Q, Q)) -> (Q, Q) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn crosses(p1: &(Q, Q), p2: &(Q, Q), p3: &(Q, Q), p4: &(Q, Q)) -> bool {
    let d1 = sign(&cross(p1, p2, p3));
    let d2 = sign(&cross(p1, p2, p4));
    let d3 = sign(&cross(p3, p4, p1));
    let d4 = sign(&cross(p3, p4, p2));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    if d1 != 0 || d2 != 0 || d3 != 0 || d4 != 0 {
        return false;
    }
    // collinear: overlap of parameter ranges along p1->p2
    let dir = sub(p2, p1);
    let len2 = dot(&dir, &dir);
    if len2.is_zero() {
        return false;
    }
    let t3 = dot(&sub(p3, p1), &dir) / &len2;
    let t4 = dot(&sub(p4, p1), &dir) / &len2;
    let (lo, hi) = if t3 < t4 { (t3, t4) } else { (t4, t3) };
    let zero = Q::zero();
    let one = Q::from_integer(BigInt::from(1));
    let start = if lo > zero { lo } else { zero };
    let end = if hi < one { hi } else { one };
    start < end
}

/// Quadratic crossing count over the relation list in exact rationals.
pub fn crossings<S: Scalar>(positions: &[Vec2<S>], dataset: &GraphDataset) -> usize {
    let pts: Vec<(Q, Q)> = positions
        .iter()
        .map(|p| (decimal(p.x.as_f64()), decimal(p.y.as_f64())))
        .collect();
    let idx = |id: &str| dataset.persons().iter().position(|p| p.id == id).expect("endpoint");
    let segs: Vec<(usize, usize)> = dataset
        .relations()
        .iter()
        .map(|r| (idx(&r.source), idx(&r.target)))
        .collect();
    let mut n = 0;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (a, b) = segs[i];
            let (c, d) = segs[j];
            if [c, d].contains(&a) || [c, d].contains(&b) {
                continue;
            }
            if crosses(&pts[a], &pts[b], &pts[c], &pts[d]) {
                n += 1;
            }
        }
    }
    n
}

pub fn overlaps<S: Scalar>(positions: &[Vec2<S>], radius: f64) -> usize {
    let mut n = 0;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let dx = positions[i].x.as_f64() - positions[j].x.as_f64();
            let dy = positions[i].y.as_f64() - positions[j].y.as_f64();
            if (dx * dx + dy * dy).sqrt() < 2.0 * radius - 1e-9 {
                n += 1;
            }
        }
    }
    n
}

fn undirected_pairs(dataset: &GraphDataset) -> Vec<(usize, usize)> {
    let idx = |id: &str| dataset.persons().iter().position(|p| p.id == id).expect("endpoint");
    dataset
        .relations()
        .iter()
        .map(|r| (idx(&r.source), idx(&r.target)))
        .collect()
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn hops(dataset: &GraphDataset) -> Vec<Vec<Option<usize>>> {
    let n = dataset.len();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for (s, t) in undirected_pairs(dataset) {
        d[s][t] = Some(1);
        d[t][s] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn stress<S: Scalar>(positions: &[Vec2<S>], dataset: &GraphDataset, ideal: f64) -> f64 {
    let d = hops(dataset);
    let (mut sum, mut pairs) = (0.0, 0usize);
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if let Some(g) = d[i][j] {
                let dx = positions[i].x.as_f64() - positions[j].x.as_f64();
                let dy = positions[i].y.as_f64() - positions[j].y.as_f64();
                let target = ideal * g as f64;
                sum += ((dx.hypot(dy) - target) / target).powi(2);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}

fn components(n: usize, pairs: &[(usize, usize)], removed: Option<usize>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        r
    }
    for &(s, t) in pairs {
        if Some(s) == removed || Some(t) == removed {
            continue;
        }
        let (a, b) = (find(&mut parent, s), find(&mut parent, t));
        parent[a] = b;
    }
    (0..n)
        .filter(|&v| Some(v) != removed && find(&mut parent, v) == v)
        .count()
}

/// Persons whose removal increases the number of connected components.
pub fn bridges(dataset: &GraphDataset) -> Vec<String> {
    let pairs = undirected_pairs(dataset);
    let n = dataset.len();
    let base = components(n, &pairs, None);
    (0..n)
        .filter(|&v| components(n, &pairs, Some(v)) > base)
        .map(|v| dataset.persons()[v].id.clone())
        .collect()
}

/// Relation count per person, each incident relation counted once.
pub fn degree(dataset: &GraphDataset, id: &str) -> usize {
    dataset
        .relations()
        .iter()
        .filter(|r| r.source == id || r.target == id)
        .count()
}

pub fn most_connected(dataset: &GraphDataset) -> Vec<String> {
    let max = dataset.persons().iter().map(|p| degree(dataset, &p.id)).max();
    dataset
        .persons()
        .iter()
        .filter(|p| Some(degree(dataset, &p.id)) == max)
        .map(|p| p.id.clone())
        .collect()
}

pub fn neighbors(dataset: &GraphDataset, id: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for r in dataset.relations() {
        if r.source == id {
            out.insert(r.target.clone());
        }
        if r.target == id {
            out.insert(r.source.clone());
        }
    }
    out
}

/// Set intersection, returned in canonical person order.
pub fn common(dataset: &GraphDataset, a: &str, b: &str) -> Vec<String> {
    let both: BTreeSet<String> = neighbors(dataset, a)
        .intersection(&neighbors(dataset, b))
        .filter(|x| *x != a && *x != b)
        .cloned()
        .collect();
    dataset
        .persons()
        .iter()
        .filter(|p| both.contains(&p.id))
        .map(|p| p.id.clone())
        .collect()
}

/// Ids kept by the date predicate and relations with both endpoints kept,
/// as `(source, target, kind)`.
pub fn snapshot(dataset: &GraphDataset, year: i32) -> (Vec<String>, Vec<(String, String, String)>) {
    let keep: Vec<String> = dataset
        .persons()
        .iter()
        .filter(|p| {
            let born = match p.birth_year {
                Some(b) => b <= year,
                None => true,
            };
            let living = match p.death_year {
                Some(d) => d >= year,
                None => true,
            };
            born && living
        })
        .map(|p| p.id.clone())
        .collect();
    let rels = dataset
        .relations()
        .iter()
        .filter(|r| keep.contains(&r.source) && keep.contains(&r.target))
        .map(|r| (r.source.clone(), r.target.clone(), r.kind.as_str().to_string()))
        .collect();
    (keep, rels)
}

/// Constraints of a feasible layering: `(s, t, strict)` means
/// `layer[t] > layer[s]` when strict, else `layer[t] == layer[s]`.
fn layer_constraints(dataset: &GraphDataset, spec: &HierarchySpec) -> Vec<(usize, usize, bool)> {
    let idx = |id: &str| dataset.persons().iter().position(|p| p.id == id).expect("endpoint");
    dataset
        .relations()
        .iter()
        .filter_map(|r| match spec.class_of(&r.kind) {
            KindClass::Generational => Some((idx(&r.source), idx(&r.target), true)),
            KindClass::CoLevel => Some((idx(&r.source), idx(&r.target), false)),
            KindClass::Free => None,
        })
        .collect()
}

fn feasible_completion(
    order: &[usize],
    depth: usize,
    layer: &mut [Option<usize>],
    cons: &[(usize, usize, bool)],
    top: usize,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let fixed = layer[v];
    let range: Vec<usize> = match fixed {
        Some(l) => vec![l],
        None => (0..top).collect(),
    };
    for l in range {
        layer[v] = Some(l);
        let ok = cons.iter().all(|&(s, t, strict)| match (layer[s], layer[t]) {
            (Some(a), Some(b)) => {
                if strict {
                    b > a
                } else {
                    a == b
                }
            }
            _ => true,
        });
        if ok && feasible_completion(order, depth + 1, layer, cons, top) {
            layer[v] = fixed;
            return true;
        }
    }
    layer[v] = fixed;
    false
}

/// Pointwise minimum over all feasible layerings with values below the
/// person count, found by exhaustive backtracking; `None` if no layering
/// exists.
pub fn min_layers(dataset: &GraphDataset, spec: &HierarchySpec) -> Option<Vec<usize>> {
    let n = dataset.len();
    let cons = layer_constraints(dataset, spec);
    let mut result = Vec::with_capacity(n);
    for i in 0..n {
        let mut order = vec![i];
        order.extend((0..n).filter(|&j| j != i));
        let mut found = None;
        for v in 0..n {
            let mut layer = vec![None; n];
            layer[i] = Some(v);
            if feasible_completion(&order, 0, &mut layer, &cons, n) {
                found = Some(v);
                break;
            }
        }
        result.push(found?);
    }
    Some(result)
}

/// Whether `layers` satisfies every generational and co-level constraint.
pub fn is_feasible(dataset: &GraphDataset, spec: &HierarchySpec, layers: &[usize]) -> bool {
    layer_constraints(dataset, spec)
        .iter()
        .all(|&(s, t, strict)| if strict { layers[t] > layers[s] } else { layers[t] == layers[s] })
}
