//! Generational layers derived from a hierarchy specification.
//!
//! Co-level relations (spouses by default) are merged into clusters first;
//! generational relations then induce a directed graph over clusters, which
//! is layered by longest path from its sources. That assignment is the
//! pointwise minimum among all assignments satisfying the constraints.

use std::collections::{BTreeSet, VecDeque};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{GraphDataset, RelationKind};

/// How a relation kind constrains layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindClass {
    /// `layer(target) >= layer(source) + 1`
    Generational,
    /// endpoints share a layer
    CoLevel,
    Free,
}

/// Which relation kinds are generational, co-level or free.
/// Kinds not listed anywhere are free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchySpec {
    pub generational: BTreeSet<RelationKind>,
    pub co_level: BTreeSet<RelationKind>,
    pub free: BTreeSet<RelationKind>,
}

impl Default for HierarchySpec {
    fn default() -> Self {
        Self {
            generational: [RelationKind::ParentOf].into(),
            co_level: [RelationKind::SpouseOf].into(),
            free: [RelationKind::GodparentOf].into(),
        }
    }
}

impl HierarchySpec {
    /// Spec from explicit generational and co-level kinds; everything else is free.
    pub fn from_kinds<'a>(
        generational: impl IntoIterator<Item = &'a str>,
        co_level: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        Self {
            generational: generational.into_iter().map(RelationKind::parse).collect(),
            co_level: co_level.into_iter().map(RelationKind::parse).collect(),
            free: BTreeSet::new(),
        }
    }

    pub fn check(&self) -> Result<(), LayeringError> {
        let pairs = [
            (&self.generational, &self.co_level),
            (&self.generational, &self.free),
            (&self.co_level, &self.free),
        ];
        for (a, b) in pairs {
            if let Some(k) = a.intersection(b).next() {
                return Err(LayeringError::OverlappingKinds(k.to_string()));
            }
        }
        Ok(())
    }

    pub fn class_of(&self, kind: &RelationKind) -> KindClass {
        if self.generational.contains(kind) {
            KindClass::Generational
        } else if self.co_level.contains(kind) {
            KindClass::CoLevel
        } else {
            KindClass::Free
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CyclePolicy {
    #[default]
    Reject,
    BreakBackEdges,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayeringError {
    #[error("generational relations form a cycle: {}", .cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("relation kind {0} is listed in more than one hierarchy class")]
    OverlappingKinds(String),
    #[error("generational relation {source_id} -> {target_id} joins two persons that must share a layer")]
    Contradiction { source_id: String, target_id: String },
}

/// Person -> layer index, in canonical person order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerAssignment {
    ids: Vec<String>,
    layers: Vec<usize>,
    layer_count: usize,
    /// Relation indices removed to break cycles (empty unless
    /// [`CyclePolicy::BreakBackEdges`] found any).
    pub broken_edges: Vec<usize>,
}

impl LayerAssignment {
    /// Assignment from explicit layers; `layer_count` is `max + 1`.
    pub fn from_layers(ids: Vec<String>, layers: Vec<usize>) -> Self {
        assert_eq!(ids.len(), layers.len(), "one layer per person");
        let layer_count = layers.iter().max().map_or(0, |m| m + 1);
        Self {
            ids,
            layers,
            layer_count,
            broken_edges: Vec::new(),
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn layer_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id).map(|i| self.layers[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ids.iter().map(String::as_str).zip(self.layers.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn is_compact(&self) -> bool {
        let mut used = vec![false; self.layer_count];
        for &l in &self.layers {
            match used.get_mut(l) {
                Some(u) => *u = true,
                None => return false,
            }
        }
        used.into_iter().all(|u| u)
    }
}

impl Serialize for LayerAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.layers.len()))?;
        for (id, l) in self.iter() {
            m.serialize_entry(id, &l)?;
        }
        m.end()
    }
}

/// Connected components over co-level relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    /// cluster index per person
    pub cluster_of: Vec<usize>,
    /// members per cluster, canonical order; clusters ordered by smallest member
    pub members: Vec<Vec<usize>>,
}

impl Clusters {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member ids per cluster.
    pub fn ids<'a>(&self, dataset: &'a GraphDataset) -> Vec<Vec<&'a str>> {
        self.members
            .iter()
            .map(|m| m.iter().map(|&i| dataset.persons()[i].id.as_str()).collect())
            .collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn co_level_clusters(dataset: &GraphDataset, spec: &HierarchySpec) -> Clusters {
    let n = dataset.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for (k, s, t) in dataset.edges() {
        if spec.class_of(&dataset.relations()[k].kind) == KindClass::CoLevel {
            let (a, b) = (find(&mut parent, s), find(&mut parent, t));
            // keep the smaller index as root so roots are the smallest members
            if a < b {
                parent[b] = a;
            } else if b < a {
                parent[a] = b;
            }
        }
    }
    let mut cluster_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_cluster = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_cluster[r] == usize::MAX {
            root_cluster[r] = members.len();
            members.push(Vec::new());
        }
        cluster_of[i] = root_cluster[r];
        members[root_cluster[r]].push(i);
    }
    Clusters { cluster_of, members }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    New,
    Open,
    Done,
}

pub fn assign_layers(
    dataset: &GraphDataset,
    spec: &HierarchySpec,
    policy: CyclePolicy,
) -> Result<LayerAssignment, LayeringError> {
    spec.check()?;
    let clusters = co_level_clusters(dataset, spec);
    let c = clusters.len();
    let person_id = |i: usize| dataset.persons()[i].id.clone();

    // cluster adjacency: (target cluster, relation index), relation order
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c];
    for (k, s, t) in dataset.edges() {
        if spec.class_of(&dataset.relations()[k].kind) != KindClass::Generational {
            continue;
        }
        let (cs, ct) = (clusters.cluster_of[s], clusters.cluster_of[t]);
        if cs == ct {
            return Err(LayeringError::Contradiction {
                source_id: person_id(s),
                target_id: person_id(t),
            });
        }
        out[cs].push((ct, k));
    }

    // canonical-order DFS; back edges either fail or get dropped
    let mut mark = vec![Mark::New; c];
    let mut removed = vec![false; dataset.relations().len()];
    let mut broken = Vec::new();
    for root in 0..c {
        if mark[root] != Mark::New {
            continue;
        }
        // (cluster, next edge position, relation used to enter)
        let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(root, 0, None)];
        mark[root] = Mark::Open;
        while let Some(top) = stack.last_mut() {
            let (u, pos) = (top.0, top.1);
            if pos == out[u].len() {
                mark[u] = Mark::Done;
                stack.pop();
                continue;
            }
            top.1 += 1;
            let (v, k) = out[u][pos];
            match mark[v] {
                Mark::New => {
                    mark[v] = Mark::Open;
                    stack.push((v, 0, Some(k)));
                }
                Mark::Open => match policy {
                    CyclePolicy::Reject => {
                        let start = stack.iter().position(|f| f.0 == v).expect("open on stack");
                        let cycle = stack[start + 1..]
                            .iter()
                            .filter_map(|f| f.2)
                            .chain(std::iter::once(k))
                            .map(|rel| dataset.relations()[rel].source.clone())
                            .collect();
                        return Err(LayeringError::Cycle { cycle });
                    }
                    CyclePolicy::BreakBackEdges => {
                        removed[k] = true;
                        broken.push(k);
                    }
                },
                Mark::Done => {}
            }
        }
    }

    // longest path from sources, Kahn order
    let mut indegree = vec![0usize; c];
    for edges in &out {
        for &(v, k) in edges {
            if !removed[k] {
                indegree[v] += 1;
            }
        }
    }
    let mut cluster_layer = vec![0usize; c];
    let mut queue: VecDeque<usize> = (0..c).filter(|&i| indegree[i] == 0).collect();
    while let Some(u) = queue.pop_front() {
        for &(v, k) in &out[u] {
            if removed[k] {
                continue;
            }
            cluster_layer[v] = cluster_layer[v].max(cluster_layer[u] + 1);
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }

    let ids = dataset.persons().iter().map(|p| p.id.clone()).collect();
    let layers = clusters.cluster_of.iter().map(|&cl| cluster_layer[cl]).collect();
    let mut assignment = compact_layers(&LayerAssignment::from_layers(ids, layers));
    broken.sort_unstable();
    assignment.broken_edges = broken;
    Ok(assignment)
}

/// Order-preserving relabelling onto `[0, L)` with no empty layer.
pub fn compact_layers(raw: &LayerAssignment) -> LayerAssignment {
    let used: BTreeSet<usize> = raw.layers.iter().copied().collect();
    let rank: Vec<usize> = used.iter().copied().collect();
    let layers = raw
        .layers
        .iter()
        .map(|l| rank.binary_search(l).expect("value was collected"))
        .collect();
    LayerAssignment {
        ids: raw.ids.clone(),
        layers,
        layer_count: rank.len(),
        broken_edges: raw.broken_edges.clone(),
    }
}
