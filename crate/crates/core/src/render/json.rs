//! Layout and trace documents for the viewer.
//!
//! Layout: `{ "dataset": {..}, "modes": { "<mode>": { "positions": [{"id","x","y"}],
//! "layers"?: {id: layer}, "config": {..}, "telemetry": {"ticks_run","final_alpha"},
//! "report"?: {..} } }, "comparison"?: {"table": ".."} }`.
//!
//! Trace: `{ "ticks": [ {"tick","alpha","positions": [..], "snap"?: true} ] }`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::analysis::{comparison_table, QualityReport};
use crate::fixed::round3;
use crate::force::{Layout, LayoutConfig, Mode};
use crate::layering::LayerAssignment;
use crate::model::{parse_dataset, DatasetError, Format, GraphDataset};
use crate::scalar::{Scalar, Vec2};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("layout has no recorded trace (run with record_trace)")]
    TraceMissing,
    #[error("malformed layout document: {0}")]
    Import(String),
    #[error("embedded dataset: {0}")]
    Dataset(#[from] DatasetError),
}

fn positions_value<S: Scalar>(ids: &[String], positions: &[Vec2<S>]) -> Value {
    Value::Array(
        ids.iter()
            .zip(positions)
            .map(|(id, p)| json!({ "id": id, "x": round3(p.x.as_f64()), "y": round3(p.y.as_f64()) }))
            .collect(),
    )
}

/// One or two layouts of `dataset`. `reports`, when given, pairs with
/// `layouts`; a two-layout export with reports gains a comparison table.
pub fn export_layout_json<S: Scalar>(
    layouts: &[&Layout<S>],
    dataset: &GraphDataset,
    reports: Option<&[QualityReport]>,
) -> Value {
    let mut modes = Map::new();
    for (i, layout) in layouts.iter().enumerate() {
        let mut m = Map::new();
        m.insert("positions".into(), positions_value(&layout.ids, &layout.positions));
        if let Some(la) = &layout.layers {
            m.insert("layers".into(), serde_json::to_value(la).expect("layers serialize"));
        }
        m.insert(
            "config".into(),
            serde_json::to_value(&layout.config).expect("config serializes"),
        );
        m.insert(
            "telemetry".into(),
            json!({ "ticks_run": layout.ticks_run, "final_alpha": layout.final_alpha.as_f64() }),
        );
        if let Some(r) = reports.and_then(|r| r.get(i)) {
            m.insert("report".into(), serde_json::to_value(r).expect("report serializes"));
        }
        modes.insert(layout.mode.as_str().into(), Value::Object(m));
    }
    let mut root = Map::new();
    root.insert("dataset".into(), dataset.to_json_value());
    root.insert("modes".into(), Value::Object(modes));
    if let (2, Some([a, b, ..])) = (layouts.len(), reports) {
        root.insert("comparison".into(), json!({ "table": comparison_table(a, b) }));
    }
    Value::Object(root)
}

/// Pretty JSON with a trailing newline; key order is insertion order.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug)]
pub struct ImportedLayouts {
    pub dataset: GraphDataset,
    pub layouts: Vec<Layout<f64>>,
    pub reports: Vec<Option<QualityReport>>,
}

fn bad(msg: impl Into<String>) -> RenderError {
    RenderError::Import(msg.into())
}

pub fn import_layout_json(text: &str) -> Result<ImportedLayouts, RenderError> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let dataset_v = root.get("dataset").ok_or_else(|| bad("missing dataset"))?;
    let dataset = parse_dataset(&dataset_v.to_string(), Format::Json)?;
    let modes = root
        .get("modes")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing modes"))?;

    let mut layouts = Vec::new();
    let mut reports = Vec::new();
    for (name, m) in modes {
        let mode: Mode = serde_json::from_value(Value::String(name.clone())).map_err(|_| bad(format!("unknown mode {name}")))?;
        let mut ids = Vec::new();
        let mut positions = Vec::new();
        for p in m.get("positions").and_then(Value::as_array).ok_or_else(|| bad("missing positions"))? {
            let id = p.get("id").and_then(Value::as_str).ok_or_else(|| bad("position without id"))?;
            let x = p.get("x").and_then(Value::as_f64).ok_or_else(|| bad("position without x"))?;
            let y = p.get("y").and_then(Value::as_f64).ok_or_else(|| bad("position without y"))?;
            ids.push(id.to_string());
            positions.push(Vec2::new(x, y));
        }
        if ids.len() != dataset.len() || ids.iter().zip(dataset.persons()).any(|(a, p)| *a != p.id) {
            return Err(bad(format!("{name}: positions do not follow the dataset's person order")));
        }
        let layers = match m.get("layers") {
            Some(Value::Object(o)) => {
                let mut ls = Vec::with_capacity(o.len());
                for (id, l) in o {
                    if dataset.index_of(id) != Some(ls.len()) {
                        return Err(bad(format!("{name}: layers do not follow person order at {id:?}")));
                    }
                    ls.push(l.as_u64().ok_or_else(|| bad("layer is not an integer"))? as usize);
                }
                Some(LayerAssignment::from_layers(ids.clone(), ls))
            }
            Some(_) => return Err(bad("layers must be an object")),
            None => None,
        };
        let config: LayoutConfig<f64> = serde_json::from_value(m.get("config").cloned().ok_or_else(|| bad("missing config"))?)
            .map_err(|e| bad(format!("{name}.config: {e}")))?;
        let telemetry = m.get("telemetry").ok_or_else(|| bad("missing telemetry"))?;
        let ticks_run = telemetry
            .get("ticks_run")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing ticks_run"))? as usize;
        let final_alpha = telemetry
            .get("final_alpha")
            .and_then(Value::as_f64)
            .ok_or_else(|| bad("missing final_alpha"))?;
        reports.push(match m.get("report") {
            Some(r) => Some(serde_json::from_value(r.clone()).map_err(|e| bad(format!("{name}.report: {e}")))?),
            None => None,
        });
        layouts.push(Layout {
            ids,
            positions,
            mode,
            layers,
            ticks_run,
            final_alpha,
            config,
            trace: None,
        });
    }
    Ok(ImportedLayouts {
        dataset,
        layouts,
        reports,
    })
}

pub fn export_trace<S: Scalar>(layout: &Layout<S>) -> Result<Value, RenderError> {
    let trace = layout.trace.as_ref().ok_or(RenderError::TraceMissing)?;
    let ticks = trace
        .iter()
        .map(|f| {
            let mut o = Map::new();
            o.insert("tick".into(), f.tick.into());
            o.insert("alpha".into(), json!(f.alpha.as_f64()));
            o.insert("positions".into(), positions_value(&layout.ids, &f.positions));
            if f.snap {
                o.insert("snap".into(), true.into());
            }
            Value::Object(o)
        })
        .collect();
    Ok(json!({ "ticks": Value::Array(ticks) }))
}
