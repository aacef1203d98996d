//! Layout quality metrics, structural measures and exploration queries.

mod metrics;
mod queries;
mod report;

pub use metrics::{bridge_nodes, edge_crossings, hop_distances, layer_violation, node_overlaps, stress};
pub use queries::{alive_in, common_neighbors, most_connected, snapshot_at_year, QueryError, YearSnapshot};
pub use report::{comparison_table, compare_report, quality_report, Comparison, QualityReport, ReportError};
