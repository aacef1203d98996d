//! Layout quality metrics and structural measures.

use std::collections::VecDeque;

use crate::fixed::millis;
use crate::force::band_center;
use crate::layering::LayerAssignment;
use crate::model::GraphDataset;
use crate::scalar::{Scalar, Vec2};

type Point = (i64, i64);

fn quantize<S: Scalar>(p: Vec2<S>) -> Point {
    (millis(p.x.as_f64()), millis(p.y.as_f64()))
}

/// Sign of the cross product `(b - a) x (c - a)`, exact.
fn orientation(a: Point, b: Point, c: Point) -> i32 {
    let v = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
    v.signum() as i32
}

/// Whether two segments cross. Proper crossings count; so do collinear
/// segments overlapping in more than a point. Touching does not.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // project on the axis where the first segment has extent
        let key = if a.0 != b.0 || c.0 != d.0 { |p: Point| p.0 } else { |p: Point| p.1 };
        let (lo1, hi1) = (key(a).min(key(b)), key(a).max(key(b)));
        let (lo2, hi2) = (key(c).min(key(d)), key(c).max(key(d)));
        return lo1.max(lo2) < hi1.min(hi2);
    }
    false
}

/// Unordered relation pairs whose straight segments cross. Pairs sharing
/// an endpoint never count. Decided exactly on coordinates quantized to
/// three decimals.
pub fn edge_crossings<S: Scalar>(positions: &[Vec2<S>], dataset: &GraphDataset) -> usize {
    let pts: Vec<Point> = positions.iter().map(|&p| quantize(p)).collect();
    let edges: Vec<(usize, usize)> = dataset.edges().map(|(_, s, t)| (s, t)).collect();
    let mut count = 0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(pts[a], pts[b], pts[c], pts[d]) {
                count += 1;
            }
        }
    }
    count
}

/// Node pairs whose centers are closer than `2 * radius - 1e-9`.
pub fn node_overlaps<S: Scalar>(positions: &[Vec2<S>], radius: S) -> usize {
    let limit = S::of(2.0) * radius - S::of(1e-9);
    let limit_sq = limit * limit;
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&i, &j| positions[i].x.partial_cmp(&positions[j].x).expect("finite layout"));
    let mut count = 0;
    // sweep along x; only pairs within `limit` in x can overlap
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if positions[j].x - positions[i].x >= limit {
                break;
            }
            if limit > S::zero() && (positions[j] - positions[i]).norm_sq() < limit_sq {
                count += 1;
            }
        }
    }
    count
}

/// Unweighted hop distances from `from` over all relation kinds.
pub fn hop_distances(adj: &[Vec<(usize, usize)>], from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes are reached");
        for &(v, _) in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Mean over same-component person pairs of
/// `((|p_i - p_j| - ideal * g_ij) / (ideal * g_ij))^2`, `g_ij` the hop distance.
pub fn stress<S: Scalar>(positions: &[Vec2<S>], dataset: &GraphDataset, ideal_edge: S) -> S {
    let adj = dataset.adjacency();
    let mut total = S::zero();
    let mut pairs = 0usize;
    for i in 0..positions.len() {
        let dist = hop_distances(&adj, i);
        for j in i + 1..positions.len() {
            if let Some(g) = dist[j] {
                let target = ideal_edge * S::of(g as f64);
                let r = ((positions[i] - positions[j]).norm() - target) / target;
                total += r * r;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        S::zero()
    } else {
        total / S::of(pairs as f64)
    }
}

/// Largest vertical distance of a node from its band center.
pub fn layer_violation<S: Scalar>(
    positions: &[Vec2<S>],
    assignment: &LayerAssignment,
    band_height: S,
    margin: S,
) -> S {
    positions
        .iter()
        .zip(assignment.layers())
        .map(|(p, &l)| (p.y - band_center(l, margin, band_height)).abs())
        .fold(S::zero(), |m, v| m.max(v))
}

/// Articulation points of the undirected multigraph over all relation
/// kinds, in canonical order.
pub fn bridge_nodes(dataset: &GraphDataset) -> Vec<String> {
    let adj = dataset.adjacency();
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (node, relation used to enter, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (u, via, ref mut pos)) = stack.last_mut() {
            if *pos < adj[u].len() {
                let (v, rel) = adj[u][*pos];
                *pos += 1;
                if rel == via {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((v, rel, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[u]);
                    if parent != root && low[u] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n)
        .filter(|&i| is_cut[i])
        .map(|i| dataset.persons()[i].id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layering::{assign_layers, CyclePolicy, HierarchySpec};
    use crate::model::DatasetBuilder;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn two_edges(a: &str, b: &str, c: &str, d: &str) -> GraphDataset {
        let mut ids: Vec<&str> = vec![a, b, c, d];
        ids.dedup();
        let mut uniq = Vec::new();
        for id in ids {
            if !uniq.contains(&id) {
                uniq.push(id);
            }
        }
        DatasetBuilder::new()
            .persons(&uniq)
            .relation(a, b, "godparent_of")
            .relation(c, d, "godparent_of")
            .build()
            .unwrap()
    }

    #[test]
    fn unit_square_diagonals_cross_once() {
        let ds = two_edges("p", "q", "r", "s");
        let pos = [v(0.0, 0.0), v(1.0, 1.0), v(0.0, 1.0), v(1.0, 0.0)];
        assert_eq!(edge_crossings(&pos, &ds), 1);
    }

    #[test]
    fn shared_endpoint_never_counts() {
        let ds = two_edges("A", "b", "A", "c");
        let pos = [v(0.0, 0.0), v(1.0, 1.0), v(1.0, -1.0)];
        assert_eq!(edge_crossings(&pos, &ds), 0);
    }

    #[test]
    fn collinear_overlap_counts_touching_does_not() {
        let ds = two_edges("p", "q", "r", "s");
        let overlap = [v(0.0, 0.0), v(2.0, 0.0), v(1.0, 0.0), v(3.0, 0.0)];
        assert_eq!(edge_crossings(&overlap, &ds), 1);
        let touching = [v(0.0, 0.0), v(1.0, 0.0), v(1.0, 0.0), v(3.0, 0.0)];
        assert_eq!(edge_crossings(&touching, &ds), 0);
        let vertical = [v(0.0, 0.0), v(0.0, 2.0), v(0.0, 1.0), v(0.0, 3.0)];
        assert_eq!(edge_crossings(&vertical, &ds), 1);
        let t_junction = [v(0.0, 0.0), v(2.0, 0.0), v(1.0, 0.0), v(1.0, 3.0)];
        assert_eq!(edge_crossings(&t_junction, &ds), 0);
        let apart = [v(0.0, 0.0), v(1.0, 0.0), v(2.0, 1.0), v(3.0, 5.0)];
        assert_eq!(edge_crossings(&apart, &ds), 0);
    }

    #[test]
    fn overlaps() {
        let r = 6.0;
        assert_eq!(node_overlaps(&[v(0.0, 0.0), v(3.0 * r, 0.0)], r), 0);
        assert_eq!(node_overlaps(&[v(5.0, 5.0), v(5.0, 5.0)], r), 1);
        // exactly touching is not an overlap
        assert_eq!(node_overlaps(&[v(0.0, 0.0), v(2.0 * r, 0.0)], r), 0);
        assert_eq!(node_overlaps::<f64>(&[], r), 0);
    }

    fn linked_pair() -> GraphDataset {
        DatasetBuilder::new()
            .persons(&["a", "b"])
            .relation("a", "b", "parent_of")
            .build()
            .unwrap()
    }

    #[test]
    fn stress_of_linked_pair() {
        let ds = linked_pair();
        assert_eq!(stress(&[v(0.0, 0.0), v(60.0, 0.0)], &ds, 60.0), 0.0);
        assert_eq!(stress(&[v(0.0, 0.0), v(120.0, 0.0)], &ds, 60.0), 1.0);
    }

    #[test]
    fn stress_of_hand_placed_chain() {
        let ds = DatasetBuilder::new()
            .persons(&["a", "b", "c"])
            .relation("a", "b", "parent_of")
            .relation("b", "c", "parent_of")
            .build()
            .unwrap();
        // a-b: 30 vs 60 -> 0.25; b-c: 90 vs 60 -> 0.25; a-c: 120 vs 120 -> 0
        let pos = [v(0.0, 0.0), v(30.0, 0.0), v(120.0, 0.0)];
        assert_eq!(stress(&pos, &ds, 60.0), 0.5 / 3.0);
    }

    #[test]
    fn stress_skips_other_components() {
        let ds = DatasetBuilder::new().persons(&["a", "b"]).build().unwrap();
        assert_eq!(stress(&[v(0.0, 0.0), v(1000.0, 0.0)], &ds, 60.0), 0.0);
    }

    #[test]
    fn violation_of_displaced_node() {
        let ds = DatasetBuilder::new().person("x").build().unwrap();
        let la = assign_layers(&ds, &HierarchySpec::default(), CyclePolicy::Reject).unwrap();
        assert_eq!(layer_violation(&[v(10.0, 100.0)], &la, 120.0, 40.0), 0.0);
        assert_eq!(layer_violation(&[v(10.0, 105.0)], &la, 120.0, 40.0), 5.0);
    }

    #[test]
    fn bridges_on_small_shapes() {
        let path = DatasetBuilder::new()
            .persons(&["a", "b", "c"])
            .relation("a", "b", "godparent_of")
            .relation("b", "c", "godparent_of")
            .build()
            .unwrap();
        assert_eq!(bridge_nodes(&path), vec!["b"]);

        let triangle = DatasetBuilder::new()
            .persons(&["a", "b", "c"])
            .relation("a", "b", "spouse_of")
            .relation("b", "c", "spouse_of")
            .relation("c", "a", "spouse_of")
            .build()
            .unwrap();
        assert!(bridge_nodes(&triangle).is_empty());

        let dog_bone = DatasetBuilder::new()
            .persons(&["a", "b", "v", "c", "d"])
            .relation("a", "b", "spouse_of")
            .relation("b", "v", "spouse_of")
            .relation("v", "a", "spouse_of")
            .relation("v", "c", "spouse_of")
            .relation("c", "d", "spouse_of")
            .relation("d", "v", "spouse_of")
            .build()
            .unwrap();
        assert_eq!(bridge_nodes(&dog_bone), vec!["v"]);
    }

    #[test]
    fn parallel_relations_do_not_hide_cut_vertices() {
        // a = b (two relations) - c : b is still a cut vertex
        let ds = DatasetBuilder::new()
            .persons(&["a", "b", "c"])
            .relation("a", "b", "spouse_of")
            .relation("a", "b", "godparent_of")
            .relation("b", "c", "parent_of")
            .build()
            .unwrap();
        assert_eq!(bridge_nodes(&ds), vec!["b"]);
    }
}
