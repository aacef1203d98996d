use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use strata_core::analysis::{
    common_neighbors, compare_report, most_connected, quality_report, snapshot_at_year, QualityReport,
};
use strata_core::fixed::fixed3;
use strata_core::model::{parse_dataset, Format, GraphDataset};
use strata_core::render::{export_layout_json, export_trace, to_json_text, to_svg, LabelVisibility, StyleSpec};
use strata_core::synth::{synth_family, GeneratorSpec};
use strata_core::{assign_layers, run, CyclePolicy, HierarchySpec, LayoutConfig, Mode};

use crate::failure::Failure;
use crate::server;

#[derive(Debug, Parser)]
#[command(name = "strata", version, about = "Force-directed and force-layered layouts of family networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lay out a dataset and write SVG, layout JSON and/or a trace.
    Layout(LayoutArgs),
    /// Run both modes with one seed and print a metrics table.
    Compare(CompareArgs),
    /// Answer exploration queries.
    Query(QueryArgs),
    /// Print the generation layer of every person.
    Layers(LayersArgs),
    /// Generate a synthetic family dataset.
    Synth(SynthArgs),
    /// Serve the HTTP API (and viewer assets) for one dataset.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "force-directed", alias = "force_directed")]
    ForceDirected,
    #[value(name = "force-layered", alias = "force_layered")]
    ForceLayered,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ForceDirected => Mode::ForceDirected,
            ModeArg::ForceLayered => Mode::ForceLayered,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelArg {
    All,
    Hover,
    None,
}

#[derive(Debug, Args)]
pub struct HierarchyArgs {
    /// Comma-separated generational relation kinds [default: parent_of]
    #[arg(long, value_delimiter = ',')]
    pub hierarchy: Option<Vec<String>>,
    /// Comma-separated co-level relation kinds [default: spouse_of]
    #[arg(long, value_delimiter = ',')]
    pub colevel: Option<Vec<String>>,
    /// Drop back edges of generational cycles instead of failing
    #[arg(long)]
    pub break_cycles: bool,
}

impl HierarchyArgs {
    pub fn spec(&self) -> HierarchySpec {
        hierarchy_spec(self.hierarchy.as_deref(), self.colevel.as_deref())
    }

    fn policy(&self) -> CyclePolicy {
        if self.break_cycles {
            CyclePolicy::BreakBackEdges
        } else {
            CyclePolicy::Reject
        }
    }
}

/// Default spec with the given classes replaced; kinds listed nowhere are free.
pub fn hierarchy_spec(generational: Option<&[String]>, co_level: Option<&[String]>) -> HierarchySpec {
    if generational.is_none() && co_level.is_none() {
        return HierarchySpec::default();
    }
    let base = HierarchySpec::default();
    let pick = |given: Option<&[String]>, fallback: &std::collections::BTreeSet<_>| match given {
        Some(kinds) => kinds
            .iter()
            .map(|k| k.trim())
            .filter(|k| !k.is_empty())
            .map(strata_core::RelationKind::parse)
            .collect(),
        None => fallback.clone(),
    };
    HierarchySpec {
        generational: pick(generational, &base.generational),
        co_level: pick(co_level, &base.co_level),
        free: Default::default(),
    }
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "force-layered")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Record every tick and write the trace document here
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub labels: LabelArg,
    /// JSON object of layout config overrides
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    /// Two-mode layout JSON with both reports
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also write the comparison table to this file
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// JSON object of layout config overrides, applied to both modes
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub dataset: PathBuf,
    #[command(subcommand)]
    pub query: Query,
}

#[derive(Debug, Subcommand)]
pub enum Query {
    /// Persons with the most relations
    MostConnected,
    /// Persons related to both A and B
    Common { a: String, b: String },
    /// Persons alive in YEAR (missing dates count as alive)
    Snapshot {
        #[arg(allow_negative_numbers = true)]
        year: i32,
        /// Write the sub-dataset here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct LayersArgs {
    pub dataset: PathBuf,
    #[command(flatten)]
    pub hierarchy: HierarchyArgs,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2)]
    pub families: usize,
    #[arg(long, default_value_t = 3)]
    pub generations: usize,
    #[arg(long, default_value_t = 2.0)]
    pub children_mean: f64,
    #[arg(long, default_value_t = 0.5)]
    pub intermarriage_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    pub godparent_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub dataset: PathBuf,
    #[arg(long, env = "STRATA_PORT", default_value_t = 8088)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory of built viewer assets, served at `/`
    #[arg(long)]
    pub assets: Option<PathBuf>,
}

pub fn load_dataset(path: &Path) -> Result<GraphDataset, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_dataset(&text, Format::Json).map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Defaults for `mode` and `seed` with `overrides` merged on top. Unknown
/// keys and invalid values are errors; `mode` and `seed` cannot be overridden.
pub fn layout_config(
    mode: Mode,
    seed: u64,
    overrides: Option<&serde_json::Map<String, serde_json::Value>>,
) -> Result<LayoutConfig, String> {
    let mut base = match serde_json::to_value(LayoutConfig::new(mode, seed)).expect("config serializes") {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("config is an object"),
    };
    for (k, v) in overrides.into_iter().flatten() {
        base.insert(k.clone(), v.clone());
    }
    base.insert("mode".into(), serde_json::json!(mode));
    base.insert("seed".into(), serde_json::json!(seed));
    let cfg: LayoutConfig = serde_json::from_value(serde_json::Value::Object(base)).map_err(|e| format!("config: {e}"))?;
    cfg.check().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn read_overrides(path: Option<&Path>) -> Result<Option<serde_json::Map<String, serde_json::Value>>, Failure> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(serde_json::Value::Object(m)) => Ok(Some(m)),
        Ok(_) => Err(Failure::Input(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(Failure::Input(format!("{}: {e}", path.display()))),
    }
}

fn write(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))
}

/// Runs one command; all output goes through `out`.
pub fn execute(cli: Cli, out: &mut impl std::io::Write) -> Result<(), Failure> {
    let mut say = |line: String| {
        let _ = writeln!(out, "{line}");
    };
    match cli.command {
        Command::Layout(a) => cmd_layout(a, &mut say),
        Command::Compare(a) => cmd_compare(a, &mut say),
        Command::Query(a) => cmd_query(a, &mut say),
        Command::Layers(a) => cmd_layers(a, &mut say),
        Command::Synth(a) => cmd_synth(a, &mut say),
        Command::Serve(a) => {
            let ds = load_dataset(&a.dataset)?;
            say(format!("serving {} persons on http://{}:{}", ds.len(), a.host, a.port));
            server::serve_blocking(ds, &a.host, a.port, a.assets)
        }
    }
}

fn summary(r: &QualityReport, ticks: usize, layers: Option<usize>, seed: u64) -> String {
    let layers = layers.map_or(String::new(), |l| format!(" layers={l}"));
    let lv = r.layer_violation.map_or(String::new(), |v| format!(" layer_violation={}", fixed3(v)));
    format!(
        "{} seed={seed} persons={} relations={} ticks={ticks}{layers} crossings={} overlaps={} stress={}{lv} bridges={}",
        r.mode.as_str(),
        r.node_count,
        r.edge_count,
        r.edge_crossings,
        r.node_overlaps,
        fixed3(r.stress),
        r.bridge_nodes.len()
    )
}

fn cmd_layout(a: LayoutArgs, say: &mut impl FnMut(String)) -> Result<(), Failure> {
    let ds = load_dataset(&a.dataset)?;
    let mode = Mode::from(a.mode);
    let layers = match mode {
        Mode::ForceLayered => Some(assign_layers(&ds, &a.hierarchy.spec(), a.hierarchy.policy())?),
        Mode::ForceDirected => None,
    };
    let overrides = read_overrides(a.config.as_deref())?;
    let cfg = LayoutConfig {
        record_trace: a.trace.is_some(),
        ..layout_config(mode, a.seed, overrides.as_ref()).map_err(Failure::Input)?
    };
    let layout = run(&ds, &cfg, layers.as_ref())?;
    let report = quality_report(&layout, &ds, layers.as_ref(), 0);

    if let Some(p) = &a.svg {
        let style = StyleSpec {
            label_visibility: match a.labels {
                LabelArg::All => LabelVisibility::All,
                LabelArg::Hover => LabelVisibility::HoverOnlyMetadata,
                LabelArg::None => LabelVisibility::None,
            },
            ..Default::default()
        };
        write(p, &to_svg(&layout, &ds, &style))?;
    }
    if let Some(p) = &a.json {
        write(p, &to_json_text(&export_layout_json(&[&layout], &ds, None)))?;
    }
    if let Some(p) = &a.trace {
        write(p, &to_json_text(&export_trace(&layout)?))?;
    }
    if let Some(la) = &layers {
        if !la.broken_edges.is_empty() {
            for &k in &la.broken_edges {
                say(format!("broken back edge: {}", ds.relations()[k]));
            }
        }
    }
    say(summary(&report, layout.ticks_run, layers.as_ref().map(|l| l.layer_count()), a.seed));
    Ok(())
}

fn cmd_compare(a: CompareArgs, say: &mut impl FnMut(String)) -> Result<(), Failure> {
    let ds = load_dataset(&a.dataset)?;
    if a.hierarchy.break_cycles {
        return Err(Failure::Input("compare needs an acyclic hierarchy; --break-cycles is not supported".into()));
    }
    let overrides = read_overrides(a.config.as_deref())?;
    let config = |mode| layout_config(mode, a.seed, overrides.as_ref()).map_err(Failure::Input);
    let cmp = compare_report(
        &ds,
        &config(Mode::ForceDirected)?,
        &config(Mode::ForceLayered)?,
        &a.hierarchy.spec(),
    )?;
    let table = cmp.table();
    if let Some(p) = &a.json {
        // runtimes would make the file differ between runs
        let reports = cmp.reports.clone().map(|r| QualityReport { runtime_ms: 0, ..r });
        write(
            p,
            &to_json_text(&export_layout_json(&[&cmp.force_directed, &cmp.force_layered], &ds, Some(&reports))),
        )?;
    }
    if let Some(p) = &a.table {
        write(p, &table)?;
    }
    say(table.trim_end().to_string());
    Ok(())
}

fn cmd_query(a: QueryArgs, say: &mut impl FnMut(String)) -> Result<(), Failure> {
    let ds = load_dataset(&a.dataset)?;
    match a.query {
        Query::MostConnected => {
            for id in most_connected(&ds) {
                say(id);
            }
        }
        Query::Common { a: x, b: y } => {
            for id in common_neighbors(&ds, &x, &y)? {
                say(id);
            }
        }
        Query::Snapshot { year, out } => {
            let snap = snapshot_at_year(&ds, year);
            if let Some(p) = &out {
                write(p, &snap.dataset.to_json_string())?;
            }
            for p in snap.dataset.persons() {
                say(p.id.clone());
            }
            say(format!(
                "{} of {} persons alive in {year} ({} included on missing dates)",
                snap.dataset.len(),
                ds.len(),
                snap.undated_included
            ));
        }
    }
    Ok(())
}

fn cmd_layers(a: LayersArgs, say: &mut impl FnMut(String)) -> Result<(), Failure> {
    let ds = load_dataset(&a.dataset)?;
    let la = assign_layers(&ds, &a.hierarchy.spec(), a.hierarchy.policy())?;
    if let Some(p) = &a.json {
        let text = serde_json::to_string_pretty(&la).expect("layers serialize") + "\n";
        write(p, &text)?;
    }
    for (id, l) in la.iter() {
        say(format!("{id}\t{l}"));
    }
    for &k in &la.broken_edges {
        say(format!("broken back edge: {}", ds.relations()[k]));
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs, say: &mut impl FnMut(String)) -> Result<(), Failure> {
    let spec = GeneratorSpec {
        n_families: a.families,
        generations: a.generations,
        children_mean: a.children_mean,
        intermarriage_rate: a.intermarriage_rate,
        godparent_rate: a.godparent_rate,
        seed: a.seed,
    };
    let ds = synth_family(&spec)?;
    let text = ds.to_json_string();
    match &a.out {
        Some(p) => {
            write(p, &text)?;
            say(format!("{} persons, {} relations", ds.len(), ds.relations().len()));
        }
        None => say(text.trim_end().to_string()),
    }
    Ok(())
}
