//! SVG rendering and JSON interchange.

mod json;
mod svg;

pub use json::{export_layout_json, export_trace, import_layout_json, to_json_text, ImportedLayouts, RenderError};
pub use svg::{escape_xml, to_svg, LabelVisibility, Stroke, StyleSpec};
