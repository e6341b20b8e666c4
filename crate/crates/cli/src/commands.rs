//! Subcommands. Each one reads its inputs through a [`Context`], writes its
//! reports through it and returns the text printed on stdout.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use campus_ties::behavior::{
    behavior_profiles, binned_relation, histogram, min_max_normalize, read_profiles, spearman,
    write_profiles, BehaviorProfile, BinRow, BinScale, OrderlinessConfig,
};
use campus_ties::graph::{
    evolution_report, fit_power_law, giant_component, EvolutionReport, FriendshipNetwork, PathMode,
};
use campus_ties::peer::{assortativity, key_nodes, percolate_values, Attribute, KeyNode};
use campus_ties::records::{
    filter_valid, parse_events, write_events, EventFormat, StudentTable, TimeWindow,
    DEFAULT_MIN_RECORDS,
};
use campus_ties::synth::{generate, SynthConfig, SYNTH_WINDOW_SECONDS};
use campus_ties::ties::{
    count_cooccurrences, threshold_sweep, validate_against_ground_truth, CooccurrenceModel,
    EdgeList, TailValue, TieParams, DEFAULT_WINDOW_SECONDS,
};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;
use crate::manifest::{to_json, Context};

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "kebab-case")]
pub enum Run {
    /// Chance co-occurrence probabilities and the critical frequency a_c.
    CriticalFreq(CriticalFreqArgs),
    /// Infer a friendship network from consumption records.
    Infer(InferArgs),
    /// Topology and evolution statistics of one or more networks.
    Metrics(MetricsArgs),
    /// Orderliness, diligence and their relation to GPA.
    Behavior(BehaviorArgs),
    /// Assortativity of degree, orderliness, diligence and GPA.
    Assort(AssortArgs),
    /// Orderliness-threshold percolation and key nodes.
    Percolate(PercolateArgs),
    /// Generate a synthetic campus with planted ground truth.
    Synth(SynthArgs),
    /// Compare inferred ties with reference ties.
    Validate(ValidateArgs),
}

impl Run {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Run::Synth(a) => Some(a.seed),
            Run::Metrics(a) => Some(a.seed),
            _ => None,
        }
    }

    pub fn execute(&self, ctx: &mut Context) -> Result<String, Failure> {
        match self {
            Run::CriticalFreq(a) => critical_freq(a, ctx),
            Run::Infer(a) => infer(a, ctx),
            Run::Metrics(a) => metrics(a, ctx),
            Run::Behavior(a) => behavior(a, ctx),
            Run::Assort(a) => assort(a, ctx),
            Run::Percolate(a) => percolate(a, ctx),
            Run::Synth(a) => synth(a, ctx),
            Run::Validate(a) => validate(a, ctx),
        }
    }
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

fn read_table(
    ctx: &mut Context,
    path: &Path,
    format: EventFormat,
) -> Result<StudentTable, Failure> {
    let bytes = ctx.read(path)?;
    let report = parse_events(bytes.as_slice(), format)?;
    if report.malformed > 0 {
        let shown: Vec<String> = report
            .malformed_lines
            .iter()
            .take(5)
            .map(usize::to_string)
            .collect();
        warn(format!(
            "{}: skipped {} malformed rows (lines {}{})",
            path.display(),
            report.malformed,
            shown.join(", "),
            if report.malformed > 5 { ", ..." } else { "" }
        ));
    }
    Ok(report.table)
}

fn read_edges(ctx: &mut Context, path: &Path, min_count: u32) -> Result<EdgeList, Failure> {
    let bytes = ctx.read(path)?;
    Ok(EdgeList::read_tsv(bytes.as_slice())?.at_least(min_count.max(1)))
}

/// `YYYY-MM` month, or every record of `table` when absent or `all`.
fn resolve_window(
    label: Option<&str>,
    table: &StudentTable,
) -> Result<Option<TimeWindow>, Failure> {
    match label {
        None | Some("all") => Ok(TimeWindow::spanning(table)),
        Some(l) => Ok(Some(TimeWindow::parse_month(l)?)),
    }
}

fn tsv_lines<T>(
    header: &str,
    rows: impl IntoIterator<Item = T>,
    line: impl Fn(T) -> String,
) -> Vec<u8> {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(&line(r));
        s.push('\n');
    }
    s.into_bytes()
}

fn edge_bytes(edges: &EdgeList) -> Vec<u8> {
    let mut buf = Vec::new();
    edges.write_tsv(&mut buf).expect("writing to memory");
    buf
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CriticalFreqArgs {
    /// Student population m.
    #[arg(long = "m", default_value_t = 30_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub students: u64,
    /// Canteen windows n.
    #[arg(long = "n", default_value_t = 160, value_parser = clap::value_parser!(u64).range(1..))]
    pub windows: u64,
    /// Meals per student in the period, b.
    #[arg(long = "b", default_value_t = 90, value_parser = clap::value_parser!(u32).range(1..))]
    pub meals: u32,
    /// Slice boundaries N; the meal span holds N - 1 slices.
    #[arg(long = "N", visible_alias = "slices", default_value_t = 60, value_parser = clap::value_parser!(u32).range(2..))]
    pub slices: u32,
    /// Slice width in minutes.
    #[arg(long = "dt", default_value_t = 2.0)]
    pub slice_minutes: f64,
    /// Meal-time standard deviation in minutes.
    #[arg(long, default_value_t = 20.0)]
    pub sigma: f64,
    /// Offset of the meal-time mean from the span centre, in minutes.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mean_offset: f64,
    /// a_c is the smallest a whose expected stranger-pair count is below this.
    #[arg(long, default_value_t = 1.0)]
    pub ceiling: f64,
    /// Largest threshold listed in the table.
    #[arg(long, default_value_t = 9)]
    pub max_a: u32,
}

#[derive(Serialize)]
struct CriticalFreqReport<'a> {
    model: &'a CooccurrenceModel,
    p1: f64,
    p2: f64,
    p: f64,
    ceiling: f64,
    a_c: u32,
    rows: Vec<TailValue>,
}

fn critical_freq(a: &CriticalFreqArgs, ctx: &mut Context) -> Result<String, Failure> {
    let model = CooccurrenceModel {
        students: a.students,
        windows: a.windows,
        meals: a.meals,
        slices: a.slices,
        slice_minutes: a.slice_minutes,
        sigma_minutes: a.sigma,
        mean_offset_minutes: a.mean_offset,
    };
    let tail = model.encounter_tail()?;
    let a_c = tail.critical_frequency(a.ceiling)?;
    let rows = tail.table(a.max_a);
    let tsv = tsv_lines("a\tP\tE", &rows, |r| {
        format!(
            "{}\t{}\t{}",
            r.min_encounters, r.probability, r.expected_pairs
        )
    });
    ctx.emit("critical_freq.tsv", &tsv)?;
    let report = CriticalFreqReport {
        model: &model,
        p1: model.window_collision_prob(),
        p2: model.time_collision_prob(),
        p: model.collision_prob(),
        ceiling: a.ceiling,
        a_c,
        rows,
    };
    ctx.emit_json("critical_freq.json", &report)?;

    let mut out = format!(
        "p1 = {:.6e}  p2 = {:.6e}  p = {:.6e}\n{:>3}  {:>12}  {:>12}\n",
        report.p1, report.p2, report.p, "a", "P(x>=a)", "E(x>=a)"
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{:>3}  {:>12.4e}  {:>12.4e}\n",
            r.min_encounters, r.probability, r.expected_pairs
        ));
    }
    out.push_str(&format!("a_c = {a_c}\n"));
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InferArgs {
    /// Consumption CSV (`student_id,location_id,timestamp`).
    #[arg(long)]
    pub consumption: PathBuf,
    /// Calendar month `YYYY-MM`, or `all` for every record.
    #[arg(long)]
    pub window: Option<String>,
    /// Critical frequency, or an inclusive range `LO..HI` for a size sweep.
    /// Defaults to 5.
    #[arg(long, conflicts_with = "auto_ac")]
    pub ac: Option<String>,
    /// Choose a_c from the chance co-occurrence model fitted to the input.
    #[arg(long)]
    pub auto_ac: bool,
    /// Largest timestamp difference that counts as a co-occurrence.
    #[arg(long, default_value_t = DEFAULT_WINDOW_SECONDS)]
    pub window_seconds: i64,
    /// Students with fewer in-window records are ignored.
    #[arg(long, default_value_t = DEFAULT_MIN_RECORDS)]
    pub min_records: usize,
    /// Expected stranger-pair ceiling for --auto-ac.
    #[arg(long, default_value_t = 1.0)]
    pub ceiling: f64,
    /// Meal-time standard deviation in minutes for --auto-ac.
    #[arg(long, default_value_t = 20.0)]
    pub sigma: f64,
}

enum Threshold {
    Fixed(u32),
    Auto,
    Sweep(u32, u32),
}

fn parse_threshold(a: &InferArgs) -> Result<Threshold, Failure> {
    if a.auto_ac {
        return Ok(Threshold::Auto);
    }
    let Some(spec) = a.ac.as_deref() else {
        return Ok(Threshold::Fixed(TieParams::default().critical_frequency));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<u32>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "--ac expects a positive integer or LO..HI, got {spec:?}"
                ))
            })
    };
    match spec.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(Failure::Usage(format!("empty --ac range {spec:?}")));
            }
            Ok(Threshold::Sweep(lo, hi))
        }
        None => Ok(Threshold::Fixed(num(spec)?)),
    }
}

#[derive(Serialize)]
struct AutoModel {
    model: CooccurrenceModel,
    expected_pairs: f64,
}

#[derive(Serialize)]
struct NetworkSidecar {
    window: String,
    window_start: Option<i64>,
    window_end: Option<i64>,
    nodes: usize,
    edges: usize,
    a_c: u32,
    window_seconds: i64,
    students: usize,
    auto: Option<AutoModel>,
}

fn infer(a: &InferArgs, ctx: &mut Context) -> Result<String, Failure> {
    let threshold = parse_threshold(a)?;
    TieParams {
        critical_frequency: 1,
        window_seconds: a.window_seconds,
    }
    .validate()?;
    let table = read_table(ctx, &a.consumption, EventFormat::Consumption)?;
    let window = resolve_window(a.window.as_deref(), &table)?;
    let valid = match &window {
        Some(w) => filter_valid(&table, w, a.min_records),
        None => StudentTable::new(),
    };
    if valid.is_empty() {
        warn("no students with enough records; the network is empty");
    }
    let counts = count_cooccurrences(&valid, a.window_seconds);

    let (a_c, auto) = match threshold {
        Threshold::Sweep(lo, hi) => {
            let thresholds: Vec<u32> = (lo..=hi).collect();
            let rows = threshold_sweep(&counts, &thresholds);
            let tsv = tsv_lines("a_c\tnodes\tedges", rows, |(a, n, e)| {
                format!("{a}\t{n}\t{e}")
            });
            ctx.emit("sweep.tsv", &tsv)?;
            return Ok(text(&tsv));
        }
        Threshold::Fixed(v) => (v, None),
        Threshold::Auto if valid.len() < 2 => {
            let v = TieParams::default().critical_frequency;
            warn(format!(
                "too few students to fit the chance model; using a_c = {v}"
            ));
            (v, None)
        }
        Threshold::Auto => {
            let windows: BTreeSet<&str> = valid.records().map(|r| r.location_id.as_str()).collect();
            let per_student = valid.record_count() as f64 / valid.len() as f64;
            let model = CooccurrenceModel {
                students: valid.len() as u64,
                windows: windows.len() as u64,
                meals: (per_student.round() as u32).max(1),
                slices: 60,
                slice_minutes: 2.0 * a.window_seconds as f64 / 60.0,
                sigma_minutes: a.sigma,
                mean_offset_minutes: 0.0,
            };
            let tail = model.encounter_tail()?;
            let a_c = tail.critical_frequency(a.ceiling)?;
            if a_c > model.meals {
                warn("no threshold within the meal count meets the ceiling");
            }
            let expected_pairs = if a_c <= model.meals {
                tail.tail(a_c)?.expected_pairs
            } else {
                0.0
            };
            (
                a_c,
                Some(AutoModel {
                    model,
                    expected_pairs,
                }),
            )
        }
    };

    let edges = counts.at_least(a_c);
    let g = FriendshipNetwork::from_edge_list(&edges, window.clone());
    let sidecar = NetworkSidecar {
        window: window
            .as_ref()
            .map(|w| w.label.clone())
            .or_else(|| a.window.clone())
            .unwrap_or_else(|| "all".into()),
        window_start: window.as_ref().map(|w| w.start),
        window_end: window.as_ref().map(|w| w.end),
        nodes: g.node_count(),
        edges: g.edge_count(),
        a_c,
        window_seconds: a.window_seconds,
        students: valid.len(),
        auto,
    };
    ctx.emit("network.tsv", &edge_bytes(&edges))?;
    let json = to_json(&sidecar);
    ctx.emit("network.json", &json)?;
    Ok(text(&json))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MetricsArgs {
    /// Edge-list TSV files, one network each, in window order.
    #[arg(long = "edges", required = true, num_args = 1..)]
    pub edges: Vec<PathBuf>,
    /// Keep only pairs whose count reaches this value.
    #[arg(long, default_value_t = 1)]
    pub min_count: u32,
    /// Seed for sampled path lengths on very large components.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn metrics(a: &MetricsArgs, ctx: &mut Context) -> Result<String, Failure> {
    let mut nets = Vec::new();
    for path in &a.edges {
        let edges = read_edges(ctx, path, a.min_count)?;
        let mut g = FriendshipNetwork::from_edge_list(&edges, None);
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        g.set_label(label);
        nets.push(g);
    }
    let report: EvolutionReport = evolution_report(&nets, PathMode::Auto { seed: a.seed })?;
    let mut tsv = Vec::new();
    report.write_tsv(&mut tsv)?;
    ctx.emit("evolution.tsv", &tsv)?;
    ctx.emit_json("evolution.json", &report)?;

    let mut degree_rows = Vec::new();
    for g in &nets {
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for d in g.degrees() {
            *hist.entry(d).or_default() += 1;
        }
        degree_rows.extend(hist.into_iter().map(|(d, c)| (g.label().to_string(), d, c)));
    }
    let degrees = tsv_lines("label\tdegree\tcount", degree_rows, |(l, d, c)| {
        format!("{l}\t{d}\t{c}")
    });
    ctx.emit("degrees.tsv", &degrees)?;

    let mut out = text(&tsv);
    if let Some(gamma) = report.gamma {
        out.push_str(&format!("gamma\t{gamma}\n"));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BehaviorArgs {
    /// Consumption CSV.
    #[arg(long)]
    pub consumption: PathBuf,
    /// Library CSV (`student_id,timestamp`).
    #[arg(long)]
    pub library: Option<PathBuf>,
    /// GPA CSV (`student_id,gpa`).
    #[arg(long)]
    pub gpa: Option<PathBuf>,
    /// Calendar month `YYYY-MM`, or `all`.
    #[arg(long)]
    pub window: Option<String>,
    /// Students with fewer consumption records get no orderliness.
    #[arg(long, default_value_t = DEFAULT_MIN_RECORDS)]
    pub min_records: usize,
    /// Seconds added to timestamps before cutting days into half-hour slices.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub utc_offset: i64,
    /// Bins for the GPA relations.
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: u64,
}

#[derive(Serialize)]
struct BehaviorSummary {
    window: String,
    students: usize,
    with_orderliness: usize,
    omitted: usize,
    with_gpa: usize,
    spearman_orderliness_gpa: Option<f64>,
    spearman_diligence_gpa: Option<f64>,
    diligence_exponent: Option<f64>,
}

fn binned_bytes(rows: &[BinRow]) -> Vec<u8> {
    tsv_lines("bin_center\tmean_gpa\tcount", rows, |r| {
        format!("{}\t{}\t{}", r.center, r.mean, r.count)
    })
}

fn behavior(a: &BehaviorArgs, ctx: &mut Context) -> Result<String, Failure> {
    let consumption = read_table(ctx, &a.consumption, EventFormat::Consumption)?;
    let library = match &a.library {
        Some(p) => read_table(ctx, p, EventFormat::Library)?,
        None => StudentTable::new(),
    };
    let gpa = match &a.gpa {
        Some(p) => read_table(ctx, p, EventFormat::Gpa)?.gpa_map(),
        None => BTreeMap::new(),
    };
    let window = resolve_window(a.window.as_deref(), &consumption)?
        .ok_or_else(|| Failure::Insufficient("no consumption records".into()))?;
    let config = OrderlinessConfig {
        min_records: a.min_records,
        utc_offset_seconds: a.utc_offset,
    };
    let (profiles, report) = behavior_profiles(&consumption, &library, &gpa, &window, &config);
    let mut buf = Vec::new();
    write_profiles(&profiles, &mut buf)?;
    ctx.emit("profiles.tsv", &buf)?;

    let entropies: Vec<f64> = report.entropy.values().copied().collect();
    let hist = tsv_lines("entropy\tcount", histogram(&entropies, 20), |(c, n)| {
        format!("{c}\t{n}")
    });
    ctx.emit("entropy_hist.tsv", &hist)?;

    let mut visits: BTreeMap<u64, usize> = BTreeMap::new();
    for p in &profiles {
        *visits.entry(p.diligence).or_default() += 1;
    }
    let dist = tsv_lines("visits\tstudents", visits, |(v, n)| format!("{v}\t{n}"));
    ctx.emit("diligence_dist.tsv", &dist)?;

    let bins = a.bins as usize;
    let mut rho_order = None;
    let mut rho_dil = None;
    if !gpa.is_empty() {
        let order = min_max_normalize(&report.orderliness());
        match binned_relation(&order, &gpa, bins, BinScale::Linear) {
            Ok(rows) => ctx.emit("orderliness_gpa.tsv", &binned_bytes(&rows))?,
            Err(e) => warn(format!("orderliness bins: {e}")),
        }
        let diligent: BTreeMap<String, f64> = profiles
            .iter()
            .filter(|p| p.diligence > 0)
            .map(|p| (p.student_id.clone(), p.diligence as f64))
            .collect();
        match binned_relation(&diligent, &gpa, bins, BinScale::Log) {
            Ok(rows) => ctx.emit("diligence_gpa.tsv", &binned_bytes(&rows))?,
            Err(e) => warn(format!("diligence bins: {e}")),
        }
        let pairs = |f: &dyn Fn(&BehaviorProfile) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
            profiles
                .iter()
                .filter_map(|p| Some((f(p)?, p.gpa?)))
                .unzip()
        };
        let (x, y) = pairs(&|p| p.orderliness());
        rho_order = spearman(&x, &y).ok();
        let (x, y) = pairs(&|p| Some(p.diligence as f64));
        rho_dil = spearman(&x, &y).ok();
    }
    let counts: Vec<u64> = profiles
        .iter()
        .map(|p| p.diligence)
        .filter(|&d| d > 0)
        .collect();
    let summary = BehaviorSummary {
        window: window.label.clone(),
        students: profiles.len(),
        with_orderliness: report.entropy.len(),
        omitted: report.omitted,
        with_gpa: profiles.iter().filter(|p| p.gpa.is_some()).count(),
        spearman_orderliness_gpa: rho_order,
        spearman_diligence_gpa: rho_dil,
        diligence_exponent: fit_power_law(&counts, None).ok().map(|f| f.exponent),
    };
    let json = to_json(&summary);
    ctx.emit("behavior.json", &json)?;
    Ok(text(&json))
}

// ---------------------------------------------------------------------------

/// Network read from an edge list with profile attributes attached.
fn attributed_network(
    ctx: &mut Context,
    edges: &Path,
    profiles: &Path,
    min_count: u32,
) -> Result<FriendshipNetwork, Failure> {
    let edges = read_edges(ctx, edges, min_count)?;
    let bytes = ctx.read(profiles)?;
    let profiles = read_profiles(bytes.as_slice())?;
    let mut g = FriendshipNetwork::from_edge_list(&edges, None);
    let order: BTreeMap<String, f64> = profiles
        .iter()
        .filter_map(|p| Some((p.student_id.clone(), p.orderliness()?)))
        .collect();
    let dil: BTreeMap<String, u64> = profiles
        .iter()
        .map(|p| (p.student_id.clone(), p.diligence))
        .collect();
    let gpa: BTreeMap<String, f64> = profiles
        .iter()
        .filter_map(|p| Some((p.student_id.clone(), p.gpa?)))
        .collect();
    g.set_orderliness(&order);
    g.set_diligence(&dil);
    g.set_gpa(&gpa);
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AssortArgs {
    /// Edge-list TSV.
    #[arg(long)]
    pub edges: PathBuf,
    /// Profiles TSV written by `behavior`.
    #[arg(long)]
    pub profiles: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_count: u32,
    /// Use the whole network instead of its giant component.
    #[arg(long)]
    pub whole_graph: bool,
}

#[derive(Serialize)]
struct AssortRow {
    attribute: &'static str,
    r: Option<f64>,
    edges: usize,
    dropped_nodes: usize,
    error: Option<String>,
}

#[derive(Serialize)]
struct AssortReport {
    nodes: usize,
    edges: usize,
    giant_component: bool,
    rows: Vec<AssortRow>,
}

fn assort(a: &AssortArgs, ctx: &mut Context) -> Result<String, Failure> {
    let full = attributed_network(ctx, &a.edges, &a.profiles, a.min_count)?;
    let g = if a.whole_graph {
        full
    } else {
        giant_component(&full)
    };
    let rows: Vec<AssortRow> = Attribute::ALL
        .iter()
        .map(|&attr| match assortativity(&g, attr) {
            Ok(r) => AssortRow {
                attribute: attr.name(),
                r: Some(r.r),
                edges: r.edges,
                dropped_nodes: r.dropped_nodes,
                error: None,
            },
            Err(e) => AssortRow {
                attribute: attr.name(),
                r: None,
                edges: 0,
                dropped_nodes: 0,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let tsv = tsv_lines("attribute\tr\tedges\tdropped_nodes", &rows, |r| {
        format!(
            "{}\t{}\t{}\t{}",
            r.attribute,
            r.r.map(|v| v.to_string()).unwrap_or_default(),
            r.edges,
            r.dropped_nodes
        )
    });
    ctx.emit("assortativity.tsv", &tsv)?;
    ctx.emit_json(
        "assortativity.json",
        &AssortReport {
            nodes: g.node_count(),
            edges: g.edge_count(),
            giant_component: !a.whole_graph,
            rows,
        },
    )?;
    Ok(text(&tsv))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PercolateArgs {
    /// Edge-list TSV.
    #[arg(long)]
    pub edges: PathBuf,
    /// Profiles TSV written by `behavior`.
    #[arg(long)]
    pub profiles: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_count: u32,
    /// Threshold step Δm.
    #[arg(long, default_value_t = 0.01)]
    pub dm: f64,
    /// Key nodes reported.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Use raw orderliness instead of rescaling it to [0, 1] over the network.
    #[arg(long)]
    pub raw: bool,
    /// Use the whole network instead of its giant component.
    #[arg(long)]
    pub whole_graph: bool,
    /// Drop nodes without orderliness instead of failing.
    #[arg(long)]
    pub drop_missing: bool,
}

#[derive(Serialize)]
struct PercolationSummary {
    nodes: usize,
    edges: usize,
    delta_m: f64,
    normalized: bool,
    p_c: f64,
    m_c: f64,
    critical_step: usize,
    g2_peak: usize,
    key_nodes: Vec<KeyNode>,
}

fn percolate(a: &PercolateArgs, ctx: &mut Context) -> Result<String, Failure> {
    let mut g = attributed_network(ctx, &a.edges, &a.profiles, a.min_count)?;
    let missing = g
        .nodes()
        .filter(|&u| g.attributes(u).orderliness.is_none())
        .count();
    if missing > 0 {
        if !a.drop_missing {
            return Err(Failure::Insufficient(format!(
                "{missing} network nodes have no orderliness; pass --drop-missing to leave them out"
            )));
        }
        let keep: Vec<u32> = g
            .nodes()
            .filter(|&u| g.attributes(u).orderliness.is_some())
            .collect();
        warn(format!("dropped {missing} nodes without orderliness"));
        g = g.induced_subgraph(&keep);
    }
    if !a.whole_graph {
        g = giant_component(&g);
    }
    let raw: BTreeMap<String, f64> = g
        .nodes()
        .map(|u| {
            (
                g.id(u).to_string(),
                g.attributes(u).orderliness.expect("checked above"),
            )
        })
        .collect();
    let scaled = if a.raw { raw } else { min_max_normalize(&raw) };
    let values: Vec<f64> = g.nodes().map(|u| scaled[g.id(u)]).collect();
    let curve = percolate_values(&g, &values, a.dm)?;
    let keys = key_nodes(&g, &values, &curve, a.top_k)?;
    let mut tsv = Vec::new();
    curve.write_tsv(&mut tsv)?;
    ctx.emit("percolation.tsv", &tsv)?;
    let summary = PercolationSummary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        delta_m: a.dm,
        normalized: !a.raw,
        p_c: curve.p_c,
        m_c: curve.m_c,
        critical_step: curve.critical_step,
        g2_peak: curve.steps[curve.critical_step].g2,
        key_nodes: keys,
    };
    let json = to_json(&summary);
    ctx.emit("percolation.json", &json)?;
    Ok(text(&json))
}

// ---------------------------------------------------------------------------

fn synth_defaults() -> SynthConfig {
    SynthConfig::default()
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = synth_defaults().students)]
    pub students: usize,
    /// Canteen windows across campus.
    #[arg(long, default_value_t = synth_defaults().windows)]
    pub windows: u32,
    #[arg(long, default_value_t = synth_defaults().windows_per_canteen)]
    pub windows_per_canteen: u32,
    /// Simulated days per month.
    #[arg(long, default_value_t = synth_defaults().days)]
    pub days: u32,
    #[arg(long, default_value_t = synth_defaults().meals_per_day)]
    pub meals_per_day: u32,
    #[arg(long, default_value_t = synth_defaults().months)]
    pub months: u32,
    /// First simulated month, `YYYY-MM`.
    #[arg(long, default_value_t = synth_defaults().start_month)]
    pub start_month: String,
    /// Community size exponent.
    #[arg(long, default_value_t = synth_defaults().group_size_exponent)]
    pub group_size_exponent: f64,
    #[arg(long, default_value_t = synth_defaults().group_size_min)]
    pub group_size_min: usize,
    #[arg(long, default_value_t = synth_defaults().group_size_max)]
    pub group_size_max: usize,
    /// Tail exponent of the friendship weights.
    #[arg(long, default_value_t = synth_defaults().degree_exponent)]
    pub degree_exponent: f64,
    #[arg(long, default_value_t = synth_defaults().degree_min)]
    pub degree_min: f64,
    #[arg(long, default_value_t = synth_defaults().degree_max)]
    pub degree_max: f64,
    /// Probability that a friend pair eats together at a given meal.
    #[arg(long, default_value_t = synth_defaults().friend_meal_prob)]
    pub friend_meal_prob: f64,
    /// Meal-time σ of the most orderly students, minutes.
    #[arg(long, default_value_t = synth_defaults().sigma_minutes)]
    pub sigma_minutes: f64,
    /// Widest half-width of the meal-time span of disorderly students, minutes.
    #[arg(long, default_value_t = synth_defaults().disorder_span_minutes)]
    pub disorder_span_minutes: f64,
    /// Correlation of planted attributes along friend ties, in [0, 1].
    #[arg(long, default_value_t = synth_defaults().homophily)]
    pub homophily: f64,
    /// Probability that a tie ends at each month boundary.
    #[arg(long, default_value_t = synth_defaults().tie_decay)]
    pub tie_decay: f64,
    /// Tail exponent of library-visit counts.
    #[arg(long, default_value_t = synth_defaults().diligence_exponent)]
    pub diligence_exponent: f64,
    #[arg(long, default_value_t = synth_defaults().gpa_noise)]
    pub gpa_noise: f64,
    #[arg(long, default_value_t = synth_defaults().seed)]
    pub seed: u64,
}

impl From<&SynthArgs> for SynthConfig {
    fn from(a: &SynthArgs) -> Self {
        SynthConfig {
            students: a.students,
            windows: a.windows,
            windows_per_canteen: a.windows_per_canteen,
            days: a.days,
            meals_per_day: a.meals_per_day,
            months: a.months,
            start_month: a.start_month.clone(),
            group_size_exponent: a.group_size_exponent,
            group_size_min: a.group_size_min,
            group_size_max: a.group_size_max,
            degree_exponent: a.degree_exponent,
            degree_min: a.degree_min,
            degree_max: a.degree_max,
            friend_meal_prob: a.friend_meal_prob,
            sigma_minutes: a.sigma_minutes,
            disorder_span_minutes: a.disorder_span_minutes,
            homophily: a.homophily,
            tie_decay: a.tie_decay,
            diligence_exponent: a.diligence_exponent,
            gpa_noise: a.gpa_noise,
            seed: a.seed,
        }
    }
}

#[derive(Serialize)]
struct SynthSummary {
    config: SynthConfig,
    months: Vec<String>,
    consumption_records: usize,
    library_records: usize,
    planted_ties: usize,
    model_a_c: u32,
    model_expected_strangers: f64,
}

fn synth(a: &SynthArgs, ctx: &mut Context) -> Result<String, Failure> {
    if ctx.out_dir().is_none() {
        return Err(Failure::Usage("synth needs --out DIR".into()));
    }
    let cfg = SynthConfig::from(a);
    let data = generate(&cfg)?;
    let mut emit_table = |name: &str, table: &StudentTable, format| -> Result<(), Failure> {
        let mut buf = Vec::new();
        write_events(table, format, &mut buf)?;
        ctx.emit(name, &buf)
    };
    emit_table(
        "consumption.csv",
        &data.consumption,
        EventFormat::Consumption,
    )?;
    emit_table("library.csv", &data.library, EventFormat::Library)?;
    emit_table("gpa.csv", &data.gpa, EventFormat::Gpa)?;
    ctx.emit("truth_edges.tsv", &edge_bytes(&data.truth.friend_edges))?;
    let mut attrs = Vec::new();
    data.truth.write_attrs(&mut attrs)?;
    ctx.emit("truth_attrs.tsv", &attrs)?;
    if data.months.len() > 1 {
        for (w, edges) in data.months.iter().zip(&data.truth.monthly_edges) {
            ctx.emit(&format!("truth_edges_{}.tsv", w.label), &edge_bytes(edges))?;
        }
    }
    let tail = cfg
        .cooccurrence_model(SYNTH_WINDOW_SECONDS)
        .encounter_tail()?;
    let model_a_c = tail.critical_frequency(1.0)?;
    let summary = SynthSummary {
        months: data.months.iter().map(|w| w.label.clone()).collect(),
        consumption_records: data.consumption.record_count(),
        library_records: data.library.record_count(),
        planted_ties: data.truth.friend_edges.len(),
        model_a_c,
        model_expected_strangers: tail.tail(model_a_c.min(tail.meals))?.expected_pairs,
        config: cfg,
    };
    let json = to_json(&summary);
    ctx.emit("synth.json", &json)?;
    Ok(text(&json))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// Reference ties, TSV.
    #[arg(long)]
    pub truth: PathBuf,
    /// Inferred ties, TSV.
    #[arg(long)]
    pub inferred: PathBuf,
    /// Keep only inferred pairs whose count reaches this value.
    #[arg(long, default_value_t = 1)]
    pub min_count: u32,
}

#[derive(Serialize)]
struct ValidationSummary {
    hit_rate: f64,
    precision: Option<f64>,
    matched: usize,
    truth_edges: usize,
    inferred_edges: usize,
    missed: usize,
    extra: usize,
}

fn validate(a: &ValidateArgs, ctx: &mut Context) -> Result<String, Failure> {
    let truth = read_edges(ctx, &a.truth, 1)?;
    let inferred = read_edges(ctx, &a.inferred, a.min_count)?;
    let v = validate_against_ground_truth(&inferred, &truth)
        .map_err(|e| Failure::Insufficient(e.to_string()))?;
    ctx.emit("missed.tsv", &edge_bytes(&v.missed))?;
    ctx.emit("extra.tsv", &edge_bytes(&v.extra))?;
    let summary = ValidationSummary {
        hit_rate: v.hit_rate,
        precision: (!inferred.is_empty()).then(|| v.matched as f64 / inferred.len() as f64),
        matched: v.matched,
        truth_edges: truth.len(),
        inferred_edges: inferred.len(),
        missed: v.missed.len(),
        extra: v.extra.len(),
    };
    ctx.emit_json("validation.json", &summary)?;
    let precision = summary
        .precision
        .map(|p| format!("{p:.3}"))
        .unwrap_or_default();
    Ok(format!(
        "hit_rate\t{:.3}\nprecision\t{precision}\nmatched\t{}\ntruth_edges\t{}\ninferred_edges\t{}\n",
        summary.hit_rate, summary.matched, summary.truth_edges, summary.inferred_edges
    ))
}
