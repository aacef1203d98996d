//! Deterministic force simulation in two modes.
//!
//! `ForceDirected` is a plain spring/repulsion layout. `ForceLayered` adds a
//! vertical band force pulling each node toward the center of its layer's
//! band, stiffening as the simulation cools, and finishes with a snap that
//! puts every node exactly on its band center.
//!
//! One tick, in this order:
//! 1. `alpha <- alpha * (1 - alpha_decay)`
//! 2. link, repulsion, collision, centering, band (layered only)
//!
//!    The band force is `v_y += (band_y - y) * k * alpha * band_strength`
//!    with `k = floor + (1 - floor) * (1 - alpha)`.
//! 3. `v <- v * damping; p <- p + v` for free nodes; pinned nodes reset.

mod quadtree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use quadtree::{repulsion_bh, repulsion_brute};

use crate::layering::LayerAssignment;
use crate::model::{GraphDataset, RelationKind};
use crate::rng::Lcg;
use crate::scalar::{Scalar, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ForceDirected,
    ForceLayered,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ForceDirected => "force_directed",
            Mode::ForceLayered => "force_layered",
        }
    }
}

/// Simulation parameters. All defaults are engineering choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", default, deny_unknown_fields)]
pub struct LayoutConfig<S> {
    pub mode: Mode,
    pub seed: u64,
    pub canvas_width: S,
    /// Only used in force-directed mode; layered canvases are
    /// `2 * margin + layer_count * band_height` tall.
    pub canvas_height: S,
    pub band_height: S,
    pub margin: S,
    pub default_link_length: S,
    pub link_length: BTreeMap<RelationKind, S>,
    pub repulsion_strength: S,
    pub collision_radius: S,
    pub theta: S,
    pub alpha_start: S,
    pub alpha_min: S,
    pub alpha_decay: S,
    pub damping: S,
    pub band_stiffness_floor: S,
    /// Gain on the band force.
    pub band_strength: S,
    pub tick_limit: usize,
    pub record_trace: bool,
}

impl<S: Scalar> Default for LayoutConfig<S> {
    fn default() -> Self {
        Self {
            mode: Mode::ForceLayered,
            seed: 0,
            canvas_width: S::of(1200.0),
            canvas_height: S::of(800.0),
            band_height: S::of(120.0),
            margin: S::of(40.0),
            default_link_length: S::of(60.0),
            link_length: [(RelationKind::GodparentOf, S::of(90.0))].into(),
            repulsion_strength: S::of(30.0),
            collision_radius: S::of(12.0),
            theta: S::of(0.9),
            alpha_start: S::one(),
            alpha_min: S::of(0.001),
            alpha_decay: S::of(0.0228),
            damping: S::of(0.6),
            band_stiffness_floor: S::of(0.1),
            band_strength: S::of(4.0),
            tick_limit: 1000,
            record_trace: false,
        }
    }
}

impl<S: Scalar> LayoutConfig<S> {
    pub fn new(mode: Mode, seed: u64) -> Self {
        Self {
            mode,
            seed,
            ..Self::default()
        }
    }

    pub fn link_length_for(&self, kind: &RelationKind) -> S {
        self.link_length.get(kind).copied().unwrap_or(self.default_link_length)
    }

    pub fn check(&self) -> Result<(), ForceError> {
        let positive = [
            ("canvas_width", self.canvas_width),
            ("canvas_height", self.canvas_height),
            ("band_height", self.band_height),
            ("margin", self.margin),
            ("default_link_length", self.default_link_length),
            ("collision_radius", self.collision_radius),
        ];
        for (name, v) in positive {
            if !(v > S::zero() && v.is_finite()) {
                return Err(ForceError::Config(format!("{name} must be a positive length")));
            }
        }
        for (kind, v) in &self.link_length {
            if !(*v > S::zero() && v.is_finite()) {
                return Err(ForceError::Config(format!("link length for {kind} must be positive")));
            }
        }
        let unit = |v: S| v >= S::zero() && v <= S::one();
        if !unit(self.theta) {
            return Err(ForceError::Config("theta must lie in [0, 1]".into()));
        }
        if !(self.alpha_decay > S::zero() && self.alpha_decay < S::one()) {
            return Err(ForceError::Config("alpha_decay must lie in (0, 1)".into()));
        }
        if !(self.damping > S::zero() && self.damping <= S::one()) {
            return Err(ForceError::Config("damping must lie in (0, 1]".into()));
        }
        if !(self.band_strength >= S::zero() && self.band_strength.is_finite()) {
            return Err(ForceError::Config("band_strength must be non-negative".into()));
        }
        if !unit(self.band_stiffness_floor) {
            return Err(ForceError::Config("band_stiffness_floor must lie in [0, 1]".into()));
        }
        if !(self.alpha_start.is_finite() && self.alpha_min.is_finite()) || self.alpha_start < S::zero() {
            return Err(ForceError::Config("alpha_start and alpha_min must be finite".into()));
        }
        if !self.repulsion_strength.is_finite() {
            return Err(ForceError::Config("repulsion_strength must be finite".into()));
        }
        if self.tick_limit < 1 {
            return Err(ForceError::Config("tick_limit must be at least 1".into()));
        }
        Ok(())
    }

    /// Canvas height for `layer_count` layers (layered) or the configured
    /// height (force-directed).
    pub fn canvas_height_for(&self, layer_count: usize) -> S {
        match self.mode {
            Mode::ForceDirected => self.canvas_height,
            Mode::ForceLayered => self.margin * S::of(2.0) + S::of(layer_count as f64) * self.band_height,
        }
    }
}

/// Center of layer `layer`'s band. Every consumer of band positions goes
/// through this so snapped coordinates compare exactly.
pub fn band_center<S: Scalar>(layer: usize, margin: S, band_height: S) -> S {
    margin + (S::of(layer as f64) + S::of(0.5)) * band_height
}

#[derive(Debug, Error, PartialEq)]
pub enum ForceError {
    #[error("invalid layout configuration: {0}")]
    Config(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("non-finite coordinate for node {node:?} at tick {tick}")]
    Numerical { tick: usize, node: String },
}

/// Simulation state in canonical node order.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionState<S> {
    pub positions: Vec<Vec2<S>>,
    pub velocities: Vec<Vec2<S>>,
    pub pins: Vec<Option<Vec2<S>>>,
    /// band center per node in layered mode
    pub band_targets: Option<Vec<S>>,
    pub alpha: S,
    pub tick_count: usize,
    rng: Lcg,
}

impl<S: Scalar> PositionState<S> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn jitter(&mut self) -> Vec2<S> {
        let x = self.rng.next_f64() - 0.5;
        let y = self.rng.next_f64() - 0.5;
        let n = (x * x + y * y).sqrt();
        if n == 0.0 {
            Vec2::new(S::of(1e-6), S::zero())
        } else {
            Vec2::new(S::of(x / n * 1e-6), S::of(y / n * 1e-6))
        }
    }

    /// Holds a node fixed. In layered mode only x is taken from `position`;
    /// y stays on the node's band center.
    pub fn pin(&mut self, dataset: &GraphDataset, id: &str, position: Vec2<S>) -> Result<(), ForceError> {
        let i = dataset
            .index_of(id)
            .ok_or_else(|| ForceError::UnknownNode(id.to_string()))?;
        if !position.is_finite() {
            return Err(ForceError::Config(format!("pin for {id:?} is not finite")));
        }
        let at = match &self.band_targets {
            Some(t) => Vec2::new(position.x, t[i]),
            None => position,
        };
        self.pins[i] = Some(at);
        self.positions[i] = at;
        self.velocities[i] = Vec2::zero();
        Ok(())
    }

    pub fn unpin(&mut self, dataset: &GraphDataset, id: &str) -> Result<(), ForceError> {
        let i = dataset
            .index_of(id)
            .ok_or_else(|| ForceError::UnknownNode(id.to_string()))?;
        self.pins[i] = None;
        Ok(())
    }
}

/// Per-run precomputation shared by every tick.
struct Forces<'a, S> {
    dataset: &'a GraphDataset,
    config: &'a LayoutConfig<S>,
    links: Vec<Link<S>>,
    center: Vec2<S>,
}

struct Link<S> {
    source: usize,
    target: usize,
    rest: S,
    strength: S,
    bias: S,
}

impl<'a, S: Scalar> Forces<'a, S> {
    fn new(dataset: &'a GraphDataset, config: &'a LayoutConfig<S>, layers: Option<&LayerAssignment>) -> Self {
        let deg = dataset.degrees();
        let links = dataset
            .edges()
            .map(|(k, s, t)| {
                let (ds, dt) = (deg[s] as f64, deg[t] as f64);
                Link {
                    source: s,
                    target: t,
                    rest: config.link_length_for(&dataset.relations()[k].kind),
                    strength: S::of(1.0 / ds.min(dt)),
                    bias: S::of(ds / (ds + dt)),
                }
            })
            .collect();
        let height = config.canvas_height_for(layers.map_or(0, LayerAssignment::layer_count));
        let two = S::of(2.0);
        Self {
            dataset,
            config,
            links,
            center: Vec2::new(config.canvas_width / two, height / two),
        }
    }

    fn tick(&self, state: &mut PositionState<S>) -> Result<(), ForceError> {
        let cfg = self.config;
        state.alpha += (S::zero() - state.alpha) * cfg.alpha_decay;
        let alpha = state.alpha;

        self.link(state, alpha);

        let rep = repulsion_bh(&state.positions, cfg.repulsion_strength * alpha, cfg.theta);
        for (v, f) in state.velocities.iter_mut().zip(rep) {
            *v += f;
        }

        self.collide(state);
        self.centre(state);

        if let Some(targets) = &state.band_targets {
            let floor = cfg.band_stiffness_floor;
            let k = floor + (S::one() - floor) * (S::one() - alpha);
            for ((p, v), &ty) in state.positions.iter().zip(state.velocities.iter_mut()).zip(targets) {
                v.y += (ty - p.y) * k * alpha * cfg.band_strength;
            }
        }

        for i in 0..state.len() {
            match state.pins[i] {
                Some(pin) => {
                    state.positions[i] = pin;
                    state.velocities[i] = Vec2::zero();
                }
                None => {
                    state.velocities[i] = state.velocities[i] * cfg.damping;
                    let v = state.velocities[i];
                    state.positions[i] += v;
                }
            }
        }
        state.tick_count += 1;

        for i in 0..state.len() {
            if !(state.positions[i].is_finite() && state.velocities[i].is_finite()) {
                return Err(ForceError::Numerical {
                    tick: state.tick_count,
                    node: self.dataset.persons()[i].id.clone(),
                });
            }
        }
        Ok(())
    }

    fn link(&self, state: &mut PositionState<S>, alpha: S) {
        for l in &self.links {
            let (s, t) = (l.source, l.target);
            let mut delta = (state.positions[t] + state.velocities[t]) - (state.positions[s] + state.velocities[s]);
            let mut d = delta.norm();
            if d == S::zero() {
                delta = state.jitter();
                d = delta.norm();
            }
            let f = (d - l.rest) / d * alpha * l.strength;
            let push = delta * f;
            state.velocities[t] -= push * l.bias;
            state.velocities[s] += push * (S::one() - l.bias);
        }
    }

    /// Overlapping pairs are pushed apart along their separation, each by
    /// `0.7 * overlap / 2`. Displacements are computed from the positions at
    /// the start of the pass and applied together.
    fn collide(&self, state: &mut PositionState<S>) {
        let n = state.len();
        if n < 2 {
            return;
        }
        let r = self.config.collision_radius;
        let reach = r * S::of(2.0);
        let share = S::of(0.7) / S::of(2.0);
        let grid = Grid::new(&state.positions, reach);
        let mut shift = vec![Vec2::zero(); n];
        let mut near = Vec::new();
        for i in 0..n {
            grid.neighbours(i, &state.positions, &mut near);
            for &j in near.iter() {
                let mut delta = state.positions[j] - state.positions[i];
                let mut d = delta.norm();
                if d >= reach {
                    continue;
                }
                let overlap = reach - d;
                if d == S::zero() {
                    delta = state.jitter();
                    d = delta.norm();
                }
                let step = delta * (overlap * share / d);
                shift[i] -= step;
                shift[j] += step;
            }
        }
        for (p, s) in state.positions.iter_mut().zip(shift) {
            *p += s;
        }
    }

    fn centre(&self, state: &mut PositionState<S>) {
        let n = state.len();
        if n == 0 {
            return;
        }
        let mut sum = Vec2::zero();
        for p in &state.positions {
            sum += *p;
        }
        let mean = sum * (S::one() / S::of(n as f64));
        let mut shift = self.center - mean;
        if self.config.mode == Mode::ForceLayered {
            shift.y = S::zero();
        }
        for p in &mut state.positions {
            *p += shift;
        }
    }
}

/// Uniform bucket grid for neighbour candidates within `cell` distance.
struct Grid {
    origin: (f64, f64),
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<usize>>,
}

impl Grid {
    fn new<S: Scalar>(positions: &[Vec2<S>], cell: S) -> Self {
        let cell = cell.as_f64();
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in positions {
            x0 = x0.min(p.x.as_f64());
            y0 = y0.min(p.y.as_f64());
            x1 = x1.max(p.x.as_f64());
            y1 = y1.max(p.y.as_f64());
        }
        // bounded so a sprawling layout cannot allocate an enormous grid
        let limit = (4 * positions.len().max(1)) as f64;
        let span = |d: f64| (d / cell).floor().min(limit - 1.0).max(0.0) as usize + 1;
        let cols = span(x1 - x0);
        let rows = span(y1 - y0);
        let mut grid = Self {
            origin: (x0, y0),
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
        };
        for (i, p) in positions.iter().enumerate() {
            let (c, r) = grid.cell_of(p.x.as_f64(), p.y.as_f64());
            grid.buckets[r * cols + c].push(i);
        }
        grid
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let c = ((x - self.origin.0) / self.cell).floor().max(0.0) as usize;
        let r = ((y - self.origin.1) / self.cell).floor().max(0.0) as usize;
        (c.min(self.cols - 1), r.min(self.rows - 1))
    }

    /// Candidates `j > i`, ascending. Cells clamped at the grid edge make
    /// this a superset of the true neighbours, never a subset.
    fn neighbours<S: Scalar>(&self, i: usize, positions: &[Vec2<S>], out: &mut Vec<usize>) {
        out.clear();
        let p = positions[i];
        let reach = self.cell;
        let (c0, r0) = self.cell_of(p.x.as_f64() - reach, p.y.as_f64() - reach);
        let (c1, r1) = self.cell_of(p.x.as_f64() + reach, p.y.as_f64() + reach);
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend(self.buckets[r * self.cols + c].iter().copied().filter(|&j| j > i));
            }
        }
        out.sort_unstable();
    }
}

fn check_layers<S: Scalar>(
    dataset: &GraphDataset,
    config: &LayoutConfig<S>,
    layers: Option<&LayerAssignment>,
) -> Result<(), ForceError> {
    config.check()?;
    if config.mode == Mode::ForceLayered {
        let la = layers.ok_or_else(|| ForceError::Config("force-layered mode needs a layer assignment".into()))?;
        if la.len() != dataset.len() {
            return Err(ForceError::Config(format!(
                "layer assignment covers {} persons, dataset has {}",
                la.len(),
                dataset.len()
            )));
        }
    }
    Ok(())
}

/// Seeded initial state. Force-directed: uniform over the canvas.
/// Force-layered: x uniform, y on the band center plus up to a quarter band
/// of jitter either way.
pub fn init_positions<S: Scalar>(
    dataset: &GraphDataset,
    config: &LayoutConfig<S>,
    layers: Option<&LayerAssignment>,
) -> Result<PositionState<S>, ForceError> {
    check_layers(dataset, config, layers)?;
    let n = dataset.len();
    let mut rng = Lcg::new(config.seed);
    let band_targets = match config.mode {
        Mode::ForceLayered => {
            let la = layers.expect("checked above");
            Some(
                la.layers()
                    .iter()
                    .map(|&l| band_center(l, config.margin, config.band_height))
                    .collect::<Vec<S>>(),
            )
        }
        Mode::ForceDirected => None,
    };
    let mut positions = Vec::with_capacity(n);
    for i in 0..n {
        let x = S::of(rng.next_f64()) * config.canvas_width;
        let u = S::of(rng.next_f64());
        let y = match &band_targets {
            Some(t) => t[i] + (u - S::of(0.5)) * config.band_height / S::of(2.0),
            None => u * config.canvas_height,
        };
        positions.push(Vec2::new(x, y));
    }
    Ok(PositionState {
        positions,
        velocities: vec![Vec2::zero(); n],
        pins: vec![None; n],
        band_targets,
        alpha: config.alpha_start,
        tick_count: 0,
        rng,
    })
}

/// One integration step.
pub fn tick<S: Scalar>(
    state: &mut PositionState<S>,
    dataset: &GraphDataset,
    config: &LayoutConfig<S>,
    layers: Option<&LayerAssignment>,
) -> Result<(), ForceError> {
    check_layers(dataset, config, layers)?;
    Forces::new(dataset, config, layers).tick(state)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct TraceFrame<S> {
    pub tick: usize,
    pub alpha: S,
    pub positions: Vec<Vec2<S>>,
    /// The terminal snap frame of a layered run; it carries `alpha = 0`.
    pub snap: bool,
}

/// Result of a full simulation run.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout<S> {
    pub ids: Vec<String>,
    pub positions: Vec<Vec2<S>>,
    pub mode: Mode,
    pub layers: Option<LayerAssignment>,
    pub ticks_run: usize,
    pub final_alpha: S,
    pub config: LayoutConfig<S>,
    pub trace: Option<Vec<TraceFrame<S>>>,
}

impl<S: Scalar> Layout<S> {
    pub fn position_of(&self, id: &str) -> Option<Vec2<S>> {
        self.ids.iter().position(|x| x == id).map(|i| self.positions[i])
    }

    pub fn canvas_size(&self) -> (S, S) {
        let layers = self.layers.as_ref().map_or(0, LayerAssignment::layer_count);
        (self.config.canvas_width, self.config.canvas_height_for(layers))
    }
}

pub fn run<S: Scalar>(
    dataset: &GraphDataset,
    config: &LayoutConfig<S>,
    layers: Option<&LayerAssignment>,
) -> Result<Layout<S>, ForceError> {
    run_pinned(dataset, config, layers, &[])
}

/// Runs to convergence with the given nodes pinned from the first tick.
pub fn run_pinned<S: Scalar>(
    dataset: &GraphDataset,
    config: &LayoutConfig<S>,
    layers: Option<&LayerAssignment>,
    pins: &[(String, Vec2<S>)],
) -> Result<Layout<S>, ForceError> {
    let mut state = init_positions(dataset, config, layers)?;
    for (id, at) in pins {
        state.pin(dataset, id, *at)?;
    }
    let forces = Forces::new(dataset, config, layers);
    let mut trace = config.record_trace.then(Vec::new);
    let frame = |state: &PositionState<S>, snap: bool| TraceFrame {
        tick: state.tick_count,
        alpha: if snap { S::zero() } else { state.alpha },
        positions: state.positions.clone(),
        snap,
    };
    if let Some(t) = trace.as_mut() {
        t.push(frame(&state, false));
    }
    while state.tick_count < config.tick_limit && state.alpha >= config.alpha_min {
        forces.tick(&mut state)?;
        if let Some(t) = trace.as_mut() {
            t.push(frame(&state, false));
        }
    }

    if let Some(targets) = &state.band_targets {
        let lo = config.margin;
        let hi = config.canvas_width - config.margin;
        for i in 0..state.len() {
            let p = &mut state.positions[i];
            p.y = targets[i];
            if state.pins[i].is_none() {
                p.x = p.x.max(lo).min(hi);
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(frame(&state, true));
        }
    }

    Ok(Layout {
        ids: dataset.persons().iter().map(|p| p.id.clone()).collect(),
        positions: state.positions,
        mode: config.mode,
        layers: layers.cloned().filter(|_| config.mode == Mode::ForceLayered),
        ticks_run: state.tick_count,
        final_alpha: state.alpha,
        config: config.clone(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layering::{assign_layers, CyclePolicy, HierarchySpec};
    use crate::model::DatasetBuilder;

    fn quiet(mode: Mode) -> LayoutConfig<f64> {
        LayoutConfig {
            repulsion_strength: 0.0,
            ..LayoutConfig::new(mode, 1)
        }
    }

    fn chain3() -> GraphDataset {
        DatasetBuilder::new()
            .persons(&["a", "b", "c"])
            .relation("a", "b", "parent_of")
            .relation("b", "c", "parent_of")
            .build()
            .unwrap()
    }

    fn trio() -> GraphDataset {
        DatasetBuilder::new()
            .persons(&["A", "B", "C"])
            .relation("A", "C", "parent_of")
            .relation("B", "C", "parent_of")
            .relation("A", "B", "spouse_of")
            .build()
            .unwrap()
    }

    fn layers(ds: &GraphDataset) -> LayerAssignment {
        assign_layers(ds, &HierarchySpec::default(), CyclePolicy::Reject).unwrap()
    }

    #[test]
    fn single_node_init() {
        let ds = DatasetBuilder::new().person("x").build().unwrap();
        let st = init_positions(&ds, &LayoutConfig::<f64>::new(Mode::ForceDirected, 99), None).unwrap();
        assert_eq!(st.len(), 1);
        assert!(st.positions[0].is_finite());
        assert_eq!(st.velocities[0], Vec2::zero());
        assert_eq!(st.alpha, 1.0);
    }

    #[test]
    fn init_is_deterministic_and_seed_dependent() {
        let ds = trio();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 5);
        assert_eq!(init_positions(&ds, &cfg, None).unwrap(), init_positions(&ds, &cfg, None).unwrap());
        let other = LayoutConfig::<f64>::new(Mode::ForceDirected, 6);
        assert_ne!(
            init_positions(&ds, &cfg, None).unwrap().positions,
            init_positions(&ds, &other, None).unwrap().positions
        );
    }

    #[test]
    fn layered_init_stays_near_bands() {
        let ds = trio();
        let la = layers(&ds);
        let cfg = LayoutConfig::<f64>::new(Mode::ForceLayered, 3);
        let st = init_positions(&ds, &cfg, Some(&la)).unwrap();
        for (i, p) in st.positions.iter().enumerate() {
            let c = band_center(la.layers()[i], 40.0, 120.0);
            assert!((p.y - c).abs() <= 30.0);
            assert!((0.0..1200.0).contains(&p.x));
        }
    }

    #[test]
    fn layered_requires_layers() {
        let ds = trio();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceLayered, 3);
        assert!(matches!(init_positions(&ds, &cfg, None), Err(ForceError::Config(_))));
    }

    #[test]
    fn repulsion_is_symmetric() {
        let ds = DatasetBuilder::new().persons(&["a", "b"]).build().unwrap();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 2);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        tick(&mut st, &ds, &cfg, None).unwrap();
        let (va, vb) = (st.velocities[0], st.velocities[1]);
        assert!((va.x + vb.x).abs() < 1e-12 && (va.y + vb.y).abs() < 1e-12);
        assert!(va.norm() > 0.0);
    }

    #[test]
    fn lone_node_only_recentres() {
        let ds = DatasetBuilder::new().person("x").build().unwrap();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 2);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        tick(&mut st, &ds, &cfg, None).unwrap();
        assert_eq!(st.positions[0], Vec2::new(600.0, 400.0));
        assert_eq!(st.velocities[0], Vec2::zero());
    }

    #[test]
    fn link_at_rest_length_is_inert() {
        let ds = DatasetBuilder::new()
            .persons(&["a", "b"])
            .relation("a", "b", "parent_of")
            .build()
            .unwrap();
        let cfg = quiet(Mode::ForceDirected);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.positions = vec![Vec2::new(570.0, 400.0), Vec2::new(630.0, 400.0)];
        tick(&mut st, &ds, &cfg, None).unwrap();
        assert_eq!(st.velocities, vec![Vec2::zero(); 2]);
        assert_eq!(st.positions, vec![Vec2::new(570.0, 400.0), Vec2::new(630.0, 400.0)]);
    }

    #[test]
    fn coincident_linked_nodes_separate() {
        let ds = DatasetBuilder::new()
            .persons(&["a", "b"])
            .relation("a", "b", "parent_of")
            .build()
            .unwrap();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 2);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.positions = vec![Vec2::new(10.0, 10.0); 2];
        for _ in 0..20 {
            tick(&mut st, &ds, &cfg, None).unwrap();
        }
        assert!((st.positions[0] - st.positions[1]).norm() > 1.0);
    }

    #[test]
    fn chain3_settles_onto_bands_before_snap() {
        let ds = chain3();
        let la = layers(&ds);
        let cfg = LayoutConfig::<f64>::new(Mode::ForceLayered, 7);
        let mut st = init_positions(&ds, &cfg, Some(&la)).unwrap();
        for _ in 0..300 {
            tick(&mut st, &ds, &cfg, Some(&la)).unwrap();
        }
        let targets = st.band_targets.clone().unwrap();
        for (p, t) in st.positions.iter().zip(targets) {
            assert!((p.y - t).abs() < cfg.band_height / 10.0, "{} vs {}", p.y, t);
        }
    }

    #[test]
    fn trio_snaps_exactly() {
        let ds = trio();
        let la = layers(&ds);
        let out = run(&ds, &LayoutConfig::<f64>::new(Mode::ForceLayered, 7), Some(&la)).unwrap();
        assert_eq!(out.positions[0].y, 40.0 + 0.5 * 120.0);
        assert_eq!(out.positions[1].y, 40.0 + 0.5 * 120.0);
        assert_eq!(out.positions[2].y, 40.0 + 1.5 * 120.0);
        for p in &out.positions {
            assert!(p.x >= 40.0 && p.x <= 1160.0);
        }
    }

    #[test]
    fn run_is_bit_identical() {
        let ds = trio();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 11);
        let a = run(&ds, &cfg, None).unwrap();
        let b = run(&ds, &cfg, None).unwrap();
        let bits = |l: &Layout<f64>| l.positions.iter().flat_map(|p| [p.x.to_bits(), p.y.to_bits()]).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn alpha_schedule_and_termination() {
        let ds = trio();
        let cfg = LayoutConfig::<f64> {
            record_trace: true,
            ..LayoutConfig::new(Mode::ForceDirected, 1)
        };
        let out = run(&ds, &cfg, None).unwrap();
        assert!(out.ticks_run <= cfg.tick_limit);
        assert!(out.final_alpha < cfg.alpha_min);
        let trace = out.trace.unwrap();
        assert_eq!(trace.len(), out.ticks_run + 1);
        assert!(trace.windows(2).all(|w| w[1].alpha < w[0].alpha));
        // (1 - 0.0228)^n < 0.001 first holds at n = 300
        assert_eq!(out.ticks_run, 300);
    }

    #[test]
    fn tick_limit_caps_the_run() {
        let cfg = LayoutConfig::<f64> {
            tick_limit: 10,
            ..LayoutConfig::new(Mode::ForceDirected, 1)
        };
        assert_eq!(run(&trio(), &cfg, None).unwrap().ticks_run, 10);
    }

    #[test]
    fn zero_tick_run() {
        let cfg = LayoutConfig::<f64> {
            alpha_start: 0.0005,
            record_trace: true,
            ..LayoutConfig::new(Mode::ForceDirected, 1)
        };
        let out = run(&trio(), &cfg, None).unwrap();
        assert_eq!(out.ticks_run, 0);
        assert_eq!(out.trace.unwrap().len(), 1);
    }

    #[test]
    fn pinned_node_stays_put() {
        let ds = trio();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 3);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.pin(&ds, "A", Vec2::new(100.0, 100.0)).unwrap();
        for _ in 0..10 {
            tick(&mut st, &ds, &cfg, None).unwrap();
            assert_eq!(st.positions[0], Vec2::new(100.0, 100.0));
            assert_eq!(st.velocities[0], Vec2::zero());
        }
    }

    #[test]
    fn pinning_one_of_a_pair_moves_only_the_other() {
        let ds = DatasetBuilder::new()
            .persons(&["a", "b"])
            .relation("a", "b", "parent_of")
            .build()
            .unwrap();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 3);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.pin(&ds, "a", Vec2::new(300.0, 300.0)).unwrap();
        let before = st.positions[1];
        tick(&mut st, &ds, &cfg, None).unwrap();
        assert_eq!(st.positions[0], Vec2::new(300.0, 300.0));
        assert_ne!(st.positions[1], before);
    }

    #[test]
    fn released_pin_resumes_motion() {
        let ds = DatasetBuilder::new()
            .persons(&["a", "b"])
            .relation("a", "b", "parent_of")
            .build()
            .unwrap();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 3);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.pin(&ds, "a", Vec2::new(200.0, 200.0)).unwrap();
        st.pin(&ds, "b", Vec2::new(500.0, 200.0)).unwrap();
        tick(&mut st, &ds, &cfg, None).unwrap();
        let here = st.positions[0];
        st.pin(&ds, "a", here).unwrap();
        st.unpin(&ds, "a").unwrap();
        let mut moved = false;
        for _ in 0..5 {
            tick(&mut st, &ds, &cfg, None).unwrap();
            moved |= st.velocities[0] != Vec2::zero();
        }
        assert!(moved);
    }

    #[test]
    fn pin_unknown_node() {
        let ds = trio();
        let cfg = LayoutConfig::<f64>::new(Mode::ForceDirected, 3);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        assert_eq!(
            st.pin(&ds, "nobody", Vec2::zero()),
            Err(ForceError::UnknownNode("nobody".into()))
        );
    }

    #[test]
    fn layered_pin_keeps_band() {
        let ds = trio();
        let la = layers(&ds);
        let cfg = LayoutConfig::<f64>::new(Mode::ForceLayered, 3);
        let out = run_pinned(&ds, &cfg, Some(&la), &[("A".into(), Vec2::new(100.0, 100.0))]).unwrap();
        assert_eq!(out.positions[0], Vec2::new(100.0, 100.0));
        let out = run_pinned(&ds, &cfg, Some(&la), &[("C".into(), Vec2::new(100.0, 999.0))]).unwrap();
        assert_eq!(out.positions[2], Vec2::new(100.0, 220.0));
    }

    #[test]
    fn huge_repulsion_is_a_numerical_error() {
        let cfg = LayoutConfig::<f64> {
            repulsion_strength: 1e308,
            ..LayoutConfig::new(Mode::ForceDirected, 3)
        };
        assert!(matches!(run(&trio(), &cfg, None), Err(ForceError::Numerical { .. })));
    }

    #[test]
    fn near_max_canvas_fails_cleanly() {
        let cfg = LayoutConfig::<f64> {
            canvas_width: 1e308,
            canvas_height: 1e308,
            repulsion_strength: 1e308,
            ..LayoutConfig::new(Mode::ForceDirected, 3)
        };
        assert!(matches!(run(&trio(), &cfg, None), Err(ForceError::Numerical { .. })));
    }

    #[test]
    fn config_invariants() {
        let bad = [
            LayoutConfig::<f64> { theta: 1.5, ..Default::default() },
            LayoutConfig::<f64> { alpha_decay: 1.0, ..Default::default() },
            LayoutConfig::<f64> { damping: 0.0, ..Default::default() },
            LayoutConfig::<f64> { tick_limit: 0, ..Default::default() },
            LayoutConfig::<f64> { band_height: -1.0, ..Default::default() },
            LayoutConfig::<f64> { collision_radius: f64::NAN, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.check(), Err(ForceError::Config(_))), "{cfg:?}");
        }
        assert_eq!(LayoutConfig::<f64>::default().check(), Ok(()));
    }

    #[test]
    fn empty_dataset_runs() {
        let ds = GraphDataset::empty();
        let la = layers(&ds);
        let out = run(&ds, &LayoutConfig::<f64>::new(Mode::ForceLayered, 1), Some(&la)).unwrap();
        assert!(out.positions.is_empty());
    }

    #[test]
    fn f32_layout_is_finite_and_snapped() {
        let ds = trio();
        let la = layers(&ds);
        let out = run(&ds, &LayoutConfig::<f32>::new(Mode::ForceLayered, 7), Some(&la)).unwrap();
        assert!(out.positions.iter().all(|p| p.is_finite()));
        assert_eq!(out.positions[2].y, band_center(1, 40.0f32, 120.0));
    }

    #[test]
    fn collision_separates_overlapping_pair() {
        let ds = DatasetBuilder::new().persons(&["a", "b"]).build().unwrap();
        let cfg = quiet(Mode::ForceDirected);
        let mut st = init_positions(&ds, &cfg, None).unwrap();
        st.positions = vec![Vec2::new(590.0, 400.0), Vec2::new(600.0, 400.0)];
        tick(&mut st, &ds, &cfg, None).unwrap();
        // overlap 14, each side moves 0.7 * 14 / 2 = 4.9
        let gap = (st.positions[1] - st.positions[0]).norm();
        assert!((gap - (10.0 + 2.0 * 4.9)).abs() < 1e-9, "{gap}");
    }
}
