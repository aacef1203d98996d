use std::fmt::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{bridge_nodes, edge_crossings, layer_violation, node_overlaps, stress};
use crate::fixed::fixed3;
use crate::force::{run, ForceError, Layout, LayoutConfig, Mode};
use crate::layering::{assign_layers, CyclePolicy, HierarchySpec, LayerAssignment, LayeringError};
use crate::model::GraphDataset;
use crate::scalar::Scalar;

/// Metrics for one layout. `runtime_ms` is wall-clock and the only
/// non-deterministic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub mode: Mode,
    pub node_count: usize,
    pub edge_count: usize,
    pub edge_crossings: usize,
    pub node_overlaps: usize,
    pub stress: f64,
    pub layer_violation: Option<f64>,
    pub bridge_nodes: Vec<String>,
    pub runtime_ms: u64,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Layering(#[from] LayeringError),
    #[error(transparent)]
    Force(#[from] ForceError),
    #[error("comparison configs disagree: {0}")]
    Mismatch(String),
}

/// Overlaps use the collision radius; stress uses the default link length as
/// the ideal edge. `assignment` enables the layer violation metric.
pub fn quality_report<S: Scalar>(
    layout: &Layout<S>,
    dataset: &GraphDataset,
    assignment: Option<&LayerAssignment>,
    runtime_ms: u64,
) -> QualityReport {
    let cfg = &layout.config;
    QualityReport {
        mode: layout.mode,
        node_count: dataset.len(),
        edge_count: dataset.relations().len(),
        edge_crossings: edge_crossings(&layout.positions, dataset),
        node_overlaps: node_overlaps(&layout.positions, cfg.collision_radius),
        stress: stress(&layout.positions, dataset, cfg.default_link_length).as_f64(),
        layer_violation: assignment
            .map(|a| layer_violation(&layout.positions, a, cfg.band_height, cfg.margin).as_f64()),
        bridge_nodes: bridge_nodes(dataset),
        runtime_ms,
    }
}

/// Both layouts of one dataset with their reports.
#[derive(Clone, Debug)]
pub struct Comparison<S> {
    pub layers: LayerAssignment,
    pub force_directed: Layout<S>,
    pub force_layered: Layout<S>,
    pub reports: [QualityReport; 2],
}

impl<S: Scalar> Comparison<S> {
    /// Aligned plain-text table; contains no timings.
    pub fn table(&self) -> String {
        comparison_table(&self.reports[0], &self.reports[1])
    }
}

pub fn comparison_table(fd: &QualityReport, fl: &QualityReport) -> String {
    let lv = |r: &QualityReport| r.layer_violation.map_or("-".to_string(), fixed3);
    let rows: [(&str, String, String); 7] = [
        ("node_count", fd.node_count.to_string(), fl.node_count.to_string()),
        ("edge_count", fd.edge_count.to_string(), fl.edge_count.to_string()),
        ("edge_crossings", fd.edge_crossings.to_string(), fl.edge_crossings.to_string()),
        ("node_overlaps", fd.node_overlaps.to_string(), fl.node_overlaps.to_string()),
        ("stress", fixed3(fd.stress), fixed3(fl.stress)),
        ("layer_violation", lv(fd), lv(fl)),
        ("bridge_nodes", fd.bridge_nodes.len().to_string(), fl.bridge_nodes.len().to_string()),
    ];
    let mut out = String::new();
    let _ = writeln!(out, "{:<16} {:>15} {:>15}", "metric", "force_directed", "force_layered");
    for (name, a, b) in rows {
        let _ = writeln!(out, "{name:<16} {a:>15} {b:>15}");
    }
    out
}

/// Runs both modes with one seed and reports on each. The force-directed
/// report also measures layer violation against the same assignment.
pub fn compare_report<S: Scalar>(
    dataset: &GraphDataset,
    config_fd: &LayoutConfig<S>,
    config_fl: &LayoutConfig<S>,
    spec: &HierarchySpec,
) -> Result<Comparison<S>, ReportError> {
    if config_fd.mode != Mode::ForceDirected || config_fl.mode != Mode::ForceLayered {
        return Err(ReportError::Mismatch("expected one force-directed and one force-layered config".into()));
    }
    if config_fd.seed != config_fl.seed {
        return Err(ReportError::Mismatch(format!(
            "seeds differ ({} vs {})",
            config_fd.seed, config_fl.seed
        )));
    }
    let layers = assign_layers(dataset, spec, CyclePolicy::Reject)?;

    let started = Instant::now();
    let force_directed = run(dataset, config_fd, None)?;
    let fd_ms = started.elapsed().as_millis() as u64;

    let started = Instant::now();
    let force_layered = run(dataset, config_fl, Some(&layers))?;
    let fl_ms = started.elapsed().as_millis() as u64;

    let reports = [
        quality_report(&force_directed, dataset, Some(&layers), fd_ms),
        quality_report(&force_layered, dataset, Some(&layers), fl_ms),
    ];
    Ok(Comparison {
        layers,
        force_directed,
        force_layered,
        reports,
    })
}
