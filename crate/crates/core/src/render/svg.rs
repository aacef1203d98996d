use std::collections::BTreeMap;
use std::fmt::Write;

use crate::fixed::fixed3;
use crate::force::Layout;
use crate::model::{GraphDataset, Person, RelationKind};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LabelVisibility {
    #[default]
    All,
    /// No text on the canvas; label, years and attributes in a tooltip.
    HoverOnlyMetadata,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stroke {
    pub color: String,
    pub width: f64,
    pub dash: Option<String>,
}

impl Stroke {
    fn new(color: &str, width: f64, dash: Option<&str>) -> Self {
        Self {
            color: color.into(),
            width,
            dash: dash.map(Into::into),
        }
    }
}

/// Relation kinds are told apart by line pattern and weight, not only colour.
#[derive(Clone, Debug, PartialEq)]
pub struct StyleSpec {
    pub node_radius: f64,
    pub strokes: BTreeMap<RelationKind, Stroke>,
    /// Used for kinds without an entry in `strokes`.
    pub default_stroke: Stroke,
    pub label_visibility: LabelVisibility,
    pub font_size: f64,
}

impl Default for StyleSpec {
    fn default() -> Self {
        Self {
            node_radius: 6.0,
            strokes: [
                (RelationKind::ParentOf, Stroke::new("#444444", 1.5, None)),
                (RelationKind::SpouseOf, Stroke::new("#8a3b12", 3.5, None)),
                (RelationKind::GodparentOf, Stroke::new("#2a6f97", 1.5, Some("6 4"))),
            ]
            .into(),
            default_stroke: Stroke::new("#777777", 1.0, Some("2 3")),
            label_visibility: LabelVisibility::All,
            font_size: 11.0,
        }
    }
}

impl StyleSpec {
    fn stroke_for(&self, kind: &RelationKind) -> &Stroke {
        self.strokes.get(kind).unwrap_or(&self.default_stroke)
    }
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn tooltip(p: &Person) -> String {
    let mut t = p.label.clone();
    match (p.birth_year, p.death_year) {
        (None, None) => {}
        (b, d) => {
            let year = |y: Option<i32>| y.map_or("?".to_string(), |y| y.to_string());
            let _ = write!(t, " ({}-{})", year(b), year(d));
        }
    }
    for (k, v) in &p.attributes {
        let _ = write!(t, "\n{k}: {v}");
    }
    escape_xml(&t)
}

/// SVG 1.1 document: one `<line>` per relation, then one `<circle>` per
/// person in canonical order, then labels. Byte-identical for equal input.
pub fn to_svg<S: Scalar>(layout: &Layout<S>, dataset: &GraphDataset, style: &StyleSpec) -> String {
    let (w, h) = layout.canvas_size();
    let (w, h) = (fixed3(w.as_f64()), fixed3(h.as_f64()));
    let pos: Vec<(String, String)> = layout
        .positions
        .iter()
        .map(|p| (fixed3(p.x.as_f64()), fixed3(p.y.as_f64())))
        .collect();

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");

    s.push_str("  <g class=\"edges\" fill=\"none\">\n");
    for (k, a, b) in dataset.edges() {
        let kind = &dataset.relations()[k].kind;
        let st = style.stroke_for(kind);
        let _ = write!(
            s,
            "    <line class=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"",
            escape_xml(kind.as_str()),
            pos[a].0,
            pos[a].1,
            pos[b].0,
            pos[b].1,
            st.color,
            st.width
        );
        if let Some(d) = &st.dash {
            let _ = write!(s, " stroke-dasharray=\"{d}\"");
        }
        s.push_str("/>\n");
    }
    s.push_str("  </g>\n");

    let r = fixed3(style.node_radius);
    s.push_str("  <g class=\"nodes\" fill=\"#f4e9d8\" stroke=\"#222222\" stroke-width=\"1\">\n");
    for (p, (x, y)) in dataset.persons().iter().zip(&pos) {
        let _ = write!(s, "    <circle data-id=\"{}\" cx=\"{x}\" cy=\"{y}\" r=\"{r}\"", escape_xml(&p.id));
        if style.label_visibility == LabelVisibility::HoverOnlyMetadata {
            let _ = writeln!(s, "><title>{}</title></circle>", tooltip(p));
        } else {
            s.push_str("/>\n");
        }
    }
    s.push_str("  </g>\n");

    if style.label_visibility == LabelVisibility::All {
        let _ = writeln!(
            s,
            "  <g class=\"labels\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">",
            fixed3(style.font_size)
        );
        let dy = fixed3(style.node_radius + style.font_size);
        for (p, (x, y)) in dataset.persons().iter().zip(&pos) {
            let _ = writeln!(s, "    <text x=\"{x}\" y=\"{y}\" dy=\"{dy}\">{}</text>", escape_xml(&p.label));
        }
        s.push_str("  </g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::force::{run, LayoutConfig, Mode};
    use crate::model::DatasetBuilder;

    fn trio() -> GraphDataset {
        DatasetBuilder::new()
            .persons(&["A", "B", "C"])
            .relation("A", "C", "parent_of")
            .relation("B", "C", "parent_of")
            .relation("A", "B", "spouse_of")
            .build()
            .unwrap()
    }

    #[test]
    fn empty_dataset_is_valid_svg() {
        let ds = GraphDataset::empty();
        let layout = run(&ds, &LayoutConfig::<f64>::new(Mode::ForceDirected, 1), None).unwrap();
        let svg = to_svg(&layout, &ds, &StyleSpec::default());
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn trio_glyph_counts() {
        let ds = trio();
        let layout = run(&ds, &LayoutConfig::<f64>::new(Mode::ForceDirected, 1), None).unwrap();
        let svg = to_svg(&layout, &ds, &StyleSpec::default());
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<text").count(), 3);
        assert!(svg.contains("viewBox=\"0 0 1200.000 800.000\""));
    }

    #[test]
    fn hover_mode_uses_titles() {
        let ds = DatasetBuilder::new()
            .push_person(
                Person::new("p", "Anna <Cools>")
                    .years(Some(1600), None)
                    .attribute("profession", "painter"),
            )
            .build()
            .unwrap();
        let layout = run(&ds, &LayoutConfig::<f64>::new(Mode::ForceDirected, 1), None).unwrap();
        let style = StyleSpec {
            label_visibility: LabelVisibility::HoverOnlyMetadata,
            ..Default::default()
        };
        let svg = to_svg(&layout, &ds, &style);
        assert!(svg.contains("<title>Anna &lt;Cools&gt; (1600-?)\nprofession: painter</title>"));
        assert_eq!(svg.matches("<text").count(), 0);
        let none = StyleSpec {
            label_visibility: LabelVisibility::None,
            ..Default::default()
        };
        assert!(!to_svg(&layout, &ds, &none).contains("<title>"));
    }

    #[test]
    fn kinds_have_distinct_patterns() {
        let st = StyleSpec::default();
        let p = st.stroke_for(&RelationKind::ParentOf);
        let s = st.stroke_for(&RelationKind::SpouseOf);
        let g = st.stroke_for(&RelationKind::GodparentOf);
        let c = st.stroke_for(&RelationKind::parse("apprentice_of"));
        let sig = |x: &Stroke| (x.width.to_bits(), x.dash.clone());
        let all = [sig(p), sig(s), sig(g), sig(c)];
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }
}
