//! Genealogical network layout: data model, generation layering, force
//! simulation, quality metrics and rendering.
//!
//! The numeric core is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, with `*32` variants for `f32`.

pub mod analysis;
pub mod fixed;
pub mod force;
pub mod layering;
pub mod model;
pub mod render;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use analysis::{compare_report, quality_report, QualityReport};
pub use force::{run, Mode};
pub use layering::{assign_layers, CyclePolicy, HierarchySpec, LayerAssignment};
pub use model::{parse_dataset, DatasetBuilder, Format, GraphDataset, Person, Relation, RelationKind};
pub use render::{to_svg, StyleSpec};

pub type Vec2 = scalar::Vec2<f64>;
pub type LayoutConfig = force::LayoutConfig<f64>;
pub type Layout = force::Layout<f64>;
pub type PositionState = force::PositionState<f64>;
pub type Comparison = analysis::Comparison<f64>;

pub type Vec2f32 = scalar::Vec2<f32>;
pub type LayoutConfig32 = force::LayoutConfig<f32>;
pub type Layout32 = force::Layout<f32>;
pub type PositionState32 = force::PositionState<f32>;
pub type Comparison32 = analysis::Comparison<f32>;
