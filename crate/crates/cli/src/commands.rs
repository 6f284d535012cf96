//! Subcommands. Each stage reads its inputs from files and writes its
//! artifacts into the output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use ixpunion::analytics::{
    analyze, database_links, format_pct, report::write_reports, union_links, Analysis,
};
use ixpunion::bgp::{parse_collector_dir, validate, BgpValidation};
use ixpunion::linker::{resolve_mappings, CascadeConfig, CascadeState, Resolution, SiblingMerge};
use ixpunion::pipeline::{self, Ingested, RunManifest};
use ixpunion::review::{manual_path, DecisionLog, JsonlLog, ReviewState, ReviewStore};
use ixpunion::{Asn, CanonicalIxp, MappingCandidate, MappingDecision, SourceId};

use crate::config::Config;
use crate::server::{router, AppState};

pub const REVIEW_STATE: &str = "review_state.json";
pub const BGP_CSV: &str = "table5_completeness.csv";

#[derive(Debug, Parser)]
#[command(
    name = "ixpunion",
    version,
    about = "Build and compare a union of IXP databases"
)]
pub struct Cli {
    /// TOML or JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for stage artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "info")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SnapshotArgs {
    /// Euro-IX snapshot
    #[arg(long = "euro-ix")]
    pub euro_ix: Option<PathBuf>,
    /// PeeringDB snapshot
    #[arg(long)]
    pub peeringdb: Option<PathBuf>,
    /// PCH snapshot
    #[arg(long)]
    pub pch: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DecisionArgs {
    /// Decision log (JSON Lines). A missing file counts as empty.
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CascadeArgs {
    /// Steps (1-5) whose same-city candidates are accepted without review.
    #[arg(long, value_delimiter = ',')]
    pub auto_accept_steps: Vec<u8>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalysisArgs {
    /// Length of the top-ASN list
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Minimum record count for a city row
    #[arg(long)]
    pub city_threshold: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BgpArgs {
    /// Directory of collector summary files.
    #[arg(long)]
    pub collectors: Option<PathBuf>,
    /// ASNs left out of the BGP links, e.g. the collector operator's own.
    #[arg(long, value_delimiter = ',')]
    pub exclude_asns: Vec<u32>,
    /// Minimum ASN Jaccard for a collector to be linked
    #[arg(long)]
    pub min_jaccard: Option<f64>,
    /// Required lead of the best match over the runner-up
    #[arg(long)]
    pub ambiguity_margin: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and sanitize snapshots.
    Ingest(SnapshotArgs),
    /// Merge sibling records within each source.
    MergeSiblings(DecisionArgs),
    /// Run the cross-database name cascade.
    Link {
        #[command(flatten)]
        decisions: DecisionArgs,
        #[command(flatten)]
        cascade: CascadeArgs,
    },
    /// Serve the review API.
    ReviewServe {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Decision log the API appends to
        #[arg(long)]
        decisions: PathBuf,
        /// Review state written by `link`.
        #[arg(long)]
        state: PathBuf,
    },
    /// Merge accepted mappings into the unified dataset.
    Resolve(DecisionArgs),
    /// Compute all comparison tables.
    Analyze(AnalysisArgs),
    /// Score the datasets against route-collector data.
    BgpValidate {
        #[command(flatten)]
        bgp: BgpArgs,
        /// Unified dataset (`unified.json` or `union.json`).
        #[arg(long)]
        unified: Option<PathBuf>,
    },
    /// Write the unified dataset for publication.
    Export,
    /// Run every stage.
    Run {
        #[command(flatten)]
        snapshots: SnapshotArgs,
        #[command(flatten)]
        decisions: DecisionArgs,
        #[command(flatten)]
        cascade: CascadeArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        bgp: BgpArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Pipeline,
    Bind,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Pipeline => 3,
            ErrorKind::Bind => 4,
        }
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub kind: ErrorKind,
    pub error: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {:#}", self.stage, self.error)
    }
}

fn input(stage: &'static str, e: impl Into<anyhow::Error>) -> StageError {
    StageError {
        stage,
        kind: ErrorKind::Input,
        error: e.into(),
    }
}

fn pipeline_err(stage: &'static str, e: impl Into<anyhow::Error>) -> StageError {
    StageError {
        stage,
        kind: ErrorKind::Pipeline,
        error: e.into(),
    }
}

type StageResult<T> = Result<T, StageError>;

/// Config file values with command-line overrides applied.
#[derive(Debug, Clone)]
pub struct Settings {
    pub out: PathBuf,
    pub config: Config,
}

impl Settings {
    fn decisions(&self) -> Option<&Path> {
        self.config.decisions.as_deref()
    }

    fn apply_snapshots(&mut self, a: &SnapshotArgs) {
        for (s, p) in [
            (SourceId::EuroIx, &a.euro_ix),
            (SourceId::PeeringDb, &a.peeringdb),
            (SourceId::Pch, &a.pch),
        ] {
            if let Some(p) = p {
                self.config.snapshots.insert(s, p.clone());
            }
        }
    }

    fn apply_decisions(&mut self, a: &DecisionArgs) {
        if let Some(d) = &a.decisions {
            self.config.decisions = Some(d.clone());
        }
    }

    fn apply_cascade(&mut self, a: &CascadeArgs) -> StageResult<()> {
        if !a.auto_accept_steps.is_empty() {
            self.config.auto_accept_steps = a.auto_accept_steps.iter().copied().collect();
        }
        self.config.validate().map_err(|e| input("config", e))
    }

    fn apply_analysis(&mut self, a: &AnalysisArgs) {
        if let Some(n) = a.top_n {
            self.config.analysis.top_n = n;
        }
        if let Some(n) = a.city_threshold {
            self.config.analysis.city_threshold = n;
        }
    }

    fn apply_bgp(&mut self, a: &BgpArgs) {
        let b = &mut self.config.bgp;
        if let Some(c) = &a.collectors {
            b.collectors = Some(c.clone());
        }
        if !a.exclude_asns.is_empty() {
            b.exclude_asns = a.exclude_asns.iter().copied().collect();
        }
        if let Some(v) = a.min_jaccard {
            b.min_jaccard = v;
        }
        if let Some(v) = a.ambiguity_margin {
            b.ambiguity_margin = v;
        }
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn cascade_config(&self) -> CascadeConfig {
        CascadeConfig {
            auto_accept_steps: self.config.auto_accept_steps.clone(),
        }
    }
}

fn write_artifact<T: Serialize + ?Sized>(
    stage: &'static str,
    path: &Path,
    value: &T,
) -> StageResult<()> {
    pipeline::write_json(path, value)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(|e| pipeline_err(stage, e))
}

fn read_artifact<T: for<'de> Deserialize<'de>>(
    stage: &'static str,
    path: &Path,
    producer: &str,
) -> StageResult<T> {
    if !path.exists() {
        return Err(input(
            stage,
            anyhow!(
                "{} not found; run `ixpunion {producer}` first",
                path.display()
            ),
        ));
    }
    pipeline::read_json(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| input(stage, e))
}

fn ensure_out(stage: &'static str, out: &Path) -> StageResult<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(|e| pipeline_err(stage, e))
}

/// Decisions and curator-created candidates; missing files are empty.
fn load_log(
    stage: &'static str,
    s: &Settings,
) -> StageResult<(Vec<MappingDecision>, Vec<MappingCandidate>)> {
    let Some(path) = s.decisions() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let decisions = DecisionLog::new(path).read().map_err(|e| input(stage, e))?;
    let manual = JsonlLog::<MappingCandidate>::new(manual_path(path))
        .read()
        .map_err(|e| input(stage, e))?;
    Ok((decisions, manual))
}

pub fn stage_ingest(s: &Settings) -> StageResult<Ingested> {
    const STAGE: &str = "ingest";
    if s.config.snapshots.is_empty() {
        return Err(input(STAGE, anyhow!("no snapshot files given")));
    }
    for p in s.config.snapshots.values() {
        if !p.is_file() {
            return Err(input(
                STAGE,
                anyhow!("snapshot file {} does not exist", p.display()),
            ));
        }
    }
    let ingested = pipeline::ingest_sources(&s.config.snapshots).map_err(|e| input(STAGE, e))?;
    for w in &ingested.warnings {
        warn!("{w}");
    }
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::INGESTED), &ingested)?;
    info!(
        records = ingested.records.values().map(Vec::len).sum::<usize>(),
        "ingested"
    );
    Ok(ingested)
}

pub fn stage_siblings(
    s: &Settings,
    ingested: &Ingested,
    decisions: &[MappingDecision],
) -> StageResult<BTreeMap<SourceId, SiblingMerge>> {
    const STAGE: &str = "merge-siblings";
    let merged =
        pipeline::merge_all_siblings(ingested, decisions).map_err(|e| pipeline_err(STAGE, e))?;
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::SIBLINGS), &merged)?;
    Ok(merged)
}

pub fn stage_link(
    s: &Settings,
    siblings: &BTreeMap<SourceId, SiblingMerge>,
    decisions: &[MappingDecision],
    manual: &[MappingCandidate],
) -> StageResult<CascadeState> {
    const STAGE: &str = "link";
    let cascade = pipeline::link_sources(siblings, decisions, manual, &s.cascade_config());
    for w in &cascade.warnings {
        warn!("{w}");
    }
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::CASCADE), &cascade)?;
    let review = ReviewState {
        cascade: cascade.clone(),
        siblings: siblings.clone(),
    };
    write_artifact(STAGE, &s.artifact(REVIEW_STATE), &review)?;
    Ok(cascade)
}

pub fn stage_resolve(
    s: &Settings,
    cascade: &CascadeState,
    decisions: &[MappingDecision],
    ingested: Option<&Ingested>,
) -> StageResult<Resolution> {
    const STAGE: &str = "resolve";
    let res = resolve_mappings(cascade, decisions);
    for c in &res.conflicts {
        warn!("{c}");
    }
    if let Some(ing) = ingested {
        let gaps = pipeline::coverage_violations(&ing.all_records(), &res.unified);
        if !gaps.is_empty() {
            return Err(pipeline_err(
                STAGE,
                anyhow!(
                    "unified dataset does not cover the input: {}",
                    gaps.join("; ")
                ),
            ));
        }
    }
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::UNIFIED), &res)?;
    let path = s.artifact(pipeline::MAPPINGS);
    std::fs::write(&path, pipeline::mappings_jsonl(cascade, decisions))
        .with_context(|| format!("writing {}", path.display()))
        .map_err(|e| pipeline_err(STAGE, e))?;
    Ok(res)
}

pub fn stage_analyze(
    s: &Settings,
    unified: &[CanonicalIxp],
    ingested: &Ingested,
) -> StageResult<Analysis> {
    const STAGE: &str = "analyze";
    let a = analyze(
        unified,
        &ingested.all_records(),
        &ingested.facilities,
        &s.config.analysis.options(),
    )
    .map_err(|e| pipeline_err(STAGE, e))?;
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::ANALYSIS), &a)?;
    write_reports(&a, &s.out).map_err(|e| pipeline_err(STAGE, e))?;
    Ok(a)
}

pub fn stage_export(s: &Settings, unified: &[CanonicalIxp]) -> StageResult<PathBuf> {
    const STAGE: &str = "export";
    ensure_out(STAGE, &s.out)?;
    let path = s.artifact(pipeline::UNION);
    pipeline::export_union(unified, &path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(|e| pipeline_err(STAGE, e))?;
    Ok(path)
}

pub fn stage_bgp(s: &Settings, unified: &[CanonicalIxp]) -> StageResult<BgpValidation> {
    const STAGE: &str = "bgp-validate";
    let dir = s
        .config
        .bgp
        .collectors
        .as_deref()
        .ok_or_else(|| input(STAGE, anyhow!("no collector directory given")))?;
    if !dir.is_dir() {
        return Err(input(
            STAGE,
            anyhow!("collector directory {} does not exist", dir.display()),
        ));
    }
    let snapshots = parse_collector_dir(dir).map_err(|e| input(STAGE, e))?;
    let mut datasets = vec![union_links(unified)];
    datasets.extend(database_links(unified));
    let exclude: BTreeSet<Asn> = s.config.bgp.exclude_asns.iter().map(|a| Asn(*a)).collect();
    let v = validate(
        &snapshots,
        unified,
        &datasets,
        &s.config.bgp.thresholds(),
        &exclude,
    );
    for (c, e) in &v.unlinked {
        warn!("collector {c} not linked: {e}");
    }
    ensure_out(STAGE, &s.out)?;
    write_artifact(STAGE, &s.artifact(pipeline::BGP_REPORT), &v)?;
    write_bgp_csv(&s.artifact(BGP_CSV), &v).map_err(|e| pipeline_err(STAGE, e))?;
    Ok(v)
}

fn write_bgp_csv(path: &Path, v: &BgpValidation) -> anyhow::Result<()> {
    let pct = |x: Option<f64>| x.map(format_pct).unwrap_or_default();
    let mut out = String::from("dataset,dataset_links,bgp_links,intersection,jaccard_pct,overlap_pct,reverse_coverage_pct\n");
    for r in &v.report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.dataset.label(),
            r.dataset_links,
            v.report.bgp_links,
            r.intersection,
            pct(r.jaccard),
            pct(r.overlap),
            pct(r.reverse_coverage)
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// `unified.json` from `resolve`, or a plain list such as `union.json`.
#[derive(Deserialize)]
#[serde(untagged)]
enum UnifiedFile {
    Resolution(Box<Resolution>),
    List(Vec<CanonicalIxp>),
}

fn read_unified(stage: &'static str, path: &Path) -> StageResult<Vec<CanonicalIxp>> {
    Ok(
        match read_artifact::<UnifiedFile>(stage, path, "resolve")? {
            UnifiedFile::Resolution(r) => r.unified,
            UnifiedFile::List(l) => l,
        },
    )
}

fn run_all(s: &Settings) -> StageResult<RunManifest> {
    let mut m = RunManifest::new();
    let hash = |m: &mut RunManifest, p: &Path| -> StageResult<()> {
        m.add_input(p)
            .with_context(|| format!("hashing {}", p.display()))
            .map_err(|e| input("ingest", e))
    };

    let ingested = stage_ingest(s)?;
    for p in s.config.snapshots.values() {
        hash(&mut m, p)?;
    }
    for (src, recs) in &ingested.records {
        m.count("ingest", src.as_str(), recs.len());
    }
    m.count("ingest", "facilities", ingested.facilities.len());

    let (decisions, manual) = load_log("merge-siblings", s)?;
    if let Some(d) = s.decisions() {
        for p in [d.to_path_buf(), manual_path(d)] {
            if p.is_file() {
                hash(&mut m, &p)?;
            }
        }
    }
    m.count("decisions", "entries", decisions.len());
    m.count("decisions", "manual_candidates", manual.len());

    let siblings = stage_siblings(s, &ingested, &decisions)?;
    for (src, sm) in &siblings {
        m.count("merge-siblings", &format!("{src}_ixps"), sm.ixps.len());
        m.count(
            "merge-siblings",
            &format!("{src}_candidates"),
            sm.candidates.len(),
        );
    }

    let cascade = stage_link(s, &siblings, &decisions, &manual)?;
    for (k, n) in pipeline::candidate_counts(&cascade.candidates) {
        m.count("link", &k, n);
    }

    let res = stage_resolve(s, &cascade, &decisions, Some(&ingested))?;
    m.count("resolve", "unified", res.unified.len());
    for (pair, n) in &res.mappings_by_pair {
        m.count("resolve", pair, *n);
    }
    m.count("resolve", "union_active", res.table2.union_active);

    let a = stage_analyze(s, &res.unified, &ingested)?;
    m.count("analyze", "top_asns", a.top_asns.len());
    m.count(
        "analyze",
        "status_pairs",
        a.status.as_ref().map_or(0, |x| x.pairs),
    );

    stage_export(s, &res.unified)?;
    m.count("export", "entities", res.unified.len());

    if let Some(dir) = s.config.bgp.collectors.clone() {
        let v = stage_bgp(s, &res.unified)?;
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| input("bgp-validate", e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        for f in &files {
            hash(&mut m, f)?;
        }
        m.count("bgp-validate", "linked", v.linked.len());
        m.count("bgp-validate", "unlinked", v.unlinked.len());
        m.count("bgp-validate", "bgp_links", v.report.bgp_links);
    }

    write_artifact("run", &s.artifact(pipeline::RUN_MANIFEST), &m)?;
    Ok(m)
}

fn settings(cli: &Cli) -> StageResult<Settings> {
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(|e| input("config", e))?,
        None => Config::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Settings { out, config })
}

/// Executes a parsed command line.
pub async fn execute(cli: Cli) -> StageResult<()> {
    let mut s = settings(&cli)?;
    match &cli.command {
        Command::Ingest(a) => {
            s.apply_snapshots(a);
            stage_ingest(&s)?;
        }
        Command::MergeSiblings(d) => {
            s.apply_decisions(d);
            let ingested: Ingested =
                read_artifact("merge-siblings", &s.artifact(pipeline::INGESTED), "ingest")?;
            let (decisions, _) = load_log("merge-siblings", &s)?;
            stage_siblings(&s, &ingested, &decisions)?;
        }
        Command::Link { decisions, cascade } => {
            s.apply_decisions(decisions);
            s.apply_cascade(cascade)?;
            let siblings: BTreeMap<SourceId, SiblingMerge> =
                read_artifact("link", &s.artifact(pipeline::SIBLINGS), "merge-siblings")?;
            let (decisions, manual) = load_log("link", &s)?;
            let c = stage_link(&s, &siblings, &decisions, &manual)?;
            println!(
                "{} candidates, {} pending",
                c.candidates.len(),
                c.pending().count()
            );
        }
        Command::ReviewServe {
            port,
            host,
            decisions,
            state,
        } => serve(host, *port, decisions, state).await?,
        Command::Resolve(d) => {
            s.apply_decisions(d);
            let cascade: CascadeState =
                read_artifact("resolve", &s.artifact(pipeline::CASCADE), "link")?;
            let (decisions, _) = load_log("resolve", &s)?;
            let ingested: Option<Ingested> = match s.artifact(pipeline::INGESTED) {
                p if p.exists() => Some(read_artifact("resolve", &p, "ingest")?),
                _ => None,
            };
            let r = stage_resolve(&s, &cascade, &decisions, ingested.as_ref())?;
            println!(
                "{} unified IXPs, {} active in the union",
                r.unified.len(),
                r.table2.union_active
            );
        }
        Command::Analyze(a) => {
            s.apply_analysis(a);
            let unified = read_unified("analyze", &s.artifact(pipeline::UNIFIED))?;
            let ingested: Ingested =
                read_artifact("analyze", &s.artifact(pipeline::INGESTED), "ingest")?;
            stage_analyze(&s, &unified, &ingested)?;
        }
        Command::BgpValidate { bgp, unified } => {
            s.apply_bgp(bgp);
            let path = unified
                .clone()
                .unwrap_or_else(|| s.artifact(pipeline::UNIFIED));
            let unified = read_unified("bgp-validate", &path)?;
            let v = stage_bgp(&s, &unified)?;
            println!(
                "{} collectors linked, {} not linked",
                v.linked.len(),
                v.unlinked.len()
            );
        }
        Command::Export => {
            let unified = read_unified("export", &s.artifact(pipeline::UNIFIED))?;
            let p = stage_export(&s, &unified)?;
            println!("{}", p.display());
        }
        Command::Run {
            snapshots,
            decisions,
            cascade,
            analysis,
            bgp,
        } => {
            s.apply_snapshots(snapshots);
            s.apply_decisions(decisions);
            s.apply_cascade(cascade)?;
            s.apply_analysis(analysis);
            s.apply_bgp(bgp);
            run_all(&s)?;
        }
    }
    Ok(())
}

async fn serve(host: &str, port: u16, decisions: &Path, state: &Path) -> StageResult<()> {
    const STAGE: &str = "review-serve";
    let review: ReviewState = read_artifact(STAGE, state, "link")?;
    let store = ReviewStore::open(review, decisions).map_err(|e| input(STAGE, e))?;
    let listener = tokio::net::TcpListener::bind((host, port))
        .await
        .map_err(|e| StageError {
            stage: STAGE,
            kind: ErrorKind::Bind,
            error: anyhow!("cannot bind {host}:{port}: {e}"),
        })?;
    let addr = listener.local_addr().map_err(|e| pipeline_err(STAGE, e))?;
    info!("review API listening on http://{addr}/api/v1");
    eprintln!("listening on http://{addr}/api/v1");
    axum::serve(listener, router(AppState::new(store)))
        .await
        .map_err(|e| pipeline_err(STAGE, e))
}
