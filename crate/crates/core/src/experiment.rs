//! Reproducible experiments. Each one writes a comma-separated data file
//! with a header row plus a JSON summary, and evaluates its own checks.
//! Data files depend only on the configuration and seed; wall-clock
//! figures go to the summary alone.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::capacity::approximate_capacity_default;
use crate::channel::{make_pool, ChannelSpec, DEFAULT_SEED};
use crate::codec::{measure_density, Codec};
use crate::constraints::{builtin_constraint_sets, high_compatibility, ConstraintSet};
use crate::corrector::{repair_counters_profile, RepairLimits, RepairProfile, PROFILE_READ_LEN};
use crate::digraph::{generate, Accessor, ArcBinding};
use crate::error::{Error, Result};
use crate::retrieval::{
    closed_form_conventional, closed_form_ours, complexity_model, estimator_min_reads, estimator_tau, min_reads_single,
    random_library, retrieve_depths, retrieve_nonblocking, ComplexityParams, RetrievalTarget,
};

/// Reference values the experiment checks compare against.
pub mod reference {
    /// Capacities of the twelve built-in constraint sets, four decimals.
    pub const CAPACITIES: [f64; 12] =
        [1.0000, 1.5850, 1.6302, 1.6698, 1.7761, 1.7958, 1.8114, 1.8152, 1.9824, 1.9957, 1.9989, 1.9997];

    /// Vertices left after each trimming round at out-degree threshold 2.
    pub const TRIM_ROUNDS: [&[usize]; 12] = [
        &[162278, 132626, 106131, 74843, 52508, 33878, 22632, 14968, 10048, 6912, 4608, 3072, 2048],
        &[78732],
        &[179200],
        &[279248, 274144, 270672, 270232],
        &[486032, 479232, 474392],
        &[595968],
        &[653512, 652744, 651208, 649864],
        &[683848],
        &[959472],
        &[1029132],
        &[1044480],
        &[1047744],
    ];

    /// High-compatibility set: screened vertices, final vertices and
    /// final vertices of out-degree 2.
    pub const HIGH_COMPATIBILITY: (usize, usize, usize) = (7788, 4937, 1741);

    /// Smallest reads per sequence for full confidence, by error rate.
    pub const MIN_READS: [(f64, usize); 5] = [(0.005, 3), (0.01, 5), (0.02, 7), (0.03, 9), (0.04, 15)];

    /// Mean vertex accesses per 200 nt read, by error rate.
    pub const ACCESSES: [(f64, f64); 9] = [
        (0.0, 200.000),
        (0.005, 227.449),
        (0.01, 254.161),
        (0.015, 277.872),
        (0.02, 308.607),
        (0.025, 334.428),
        (0.03, 361.893),
        (0.035, 388.530),
        (0.04, 405.282),
    ];

    /// Mean candidates before and after the sieve at 0.5% and 4%.
    pub const CANDIDATES: [(f64, f64, f64); 2] = [(0.005, 1.3936, 1.0004), (0.04, 16.2931, 1.1908)];

    pub const CORRECTION_AT_HALF_PERCENT: f64 = 0.964;
    pub const DETECTION_AT_HALF_PERCENT: f64 = 0.9653;
    pub const DENSITY_HIGH_COMPATIBILITY: f64 = 0.581;
}

pub const EXPERIMENTS: [&str; 9] = [
    "capacity-table",
    "trim-table",
    "correction-rate",
    "detection-rate",
    "min-reads",
    "nonblocking-threshold",
    "throughput",
    "complexity-curves",
    "density-vs-capacity",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    /// Built-in name or TOML path of the digraph used by the repair and
    /// retrieval experiments.
    pub constraint_set: String,
    pub min_out_degree: usize,
    /// Empty means the experiment's own grid.
    pub error_rates: Vec<f64>,
    pub diversities: Vec<usize>,
    pub reads: Vec<usize>,
    /// Message length for retrieval libraries and density runs.
    pub message_bits: usize,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: DEFAULT_SEED,
            trials: 1000,
            constraint_set: "high-compatibility".into(),
            min_out_degree: 1,
            error_rates: Vec::new(),
            diversities: Vec::new(),
            reads: Vec::new(),
            message_bits: 116,
            out_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    fn rates_or(&self, default: &[f64]) -> Vec<f64> {
        if self.error_rates.is_empty() {
            default.to_vec()
        } else {
            self.error_rates.clone()
        }
    }

    fn codec(&self) -> Result<Codec> {
        let cs = ConstraintSet::resolve(&self.constraint_set)?;
        Codec::with_default_start(generate(&cs, self.min_out_degree)?.accessor, ArcBinding::Canonical)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutcome {
    pub name: String,
    pub data_path: PathBuf,
    pub summary_path: PathBuf,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Summary<'a, M: Serialize> {
    experiment: &'a str,
    config: &'a ExperimentConfig,
    checks: &'a [Check],
    passed: bool,
    seconds: f64,
    metrics: M,
}

fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn finish<R: Serialize, M: Serialize>(
    name: &str,
    cfg: &ExperimentConfig,
    rows: &[R],
    checks: Vec<Check>,
    metrics: M,
    clock: Instant,
) -> Result<ExperimentOutcome> {
    fs::create_dir_all(&cfg.out_dir)?;
    let data_path = cfg.out_dir.join(format!("{name}.csv"));
    let summary_path = cfg.out_dir.join(format!("{name}.json"));
    write_rows(&data_path, rows)?;
    let seconds = clock.elapsed().as_secs_f64();
    let summary = Summary { experiment: name, config: cfg, checks: &checks, passed: checks.iter().all(|c| c.passed), seconds, metrics };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&summary_path, text + "\n")?;
    Ok(ExperimentOutcome { name: name.into(), data_path, summary_path, checks, seconds })
}

/// Runs the named experiment, writing `<name>.csv` and `<name>.json` into
/// `cfg.out_dir`.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    match name {
        "capacity-table" => capacity_table(cfg),
        "trim-table" => trim_table(cfg),
        "correction-rate" => correction_rate(cfg),
        "detection-rate" => detection_rate(cfg),
        "min-reads" => min_reads(cfg),
        "nonblocking-threshold" => nonblocking_threshold(cfg),
        "throughput" => throughput(cfg),
        "complexity-curves" => complexity_curves(cfg),
        "density-vs-capacity" => density_vs_capacity(cfg),
        other => Err(Error::invalid(format!("unknown experiment {other:?}; expected one of {}", EXPERIMENTS.join(", ")))),
    }
}

#[derive(Serialize)]
struct CapacityRow {
    set: String,
    screened: usize,
    vertices: usize,
    capacity: f64,
    reference: f64,
    iterations: usize,
    period: usize,
}

fn capacity_table(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (named, &reference) in builtin_constraint_sets().into_iter().zip(reference::CAPACITIES.iter()) {
        let g = generate(&named.set, 1)?;
        let cap = approximate_capacity_default(&g.accessor)?;
        checks.push(Check::new(
            format!("{} capacity", named.name),
            format!("{:.4}", cap.capacity) == format!("{reference:.4}"),
            format!("{:.7} vs {reference:.4}", cap.capacity),
        ));
        rows.push(CapacityRow {
            set: named.name,
            screened: g.screened_vertices(),
            vertices: g.final_vertices(),
            capacity: cap.capacity,
            reference,
            iterations: cap.iterations,
            period: cap.period,
        });
    }
    finish("capacity-table", cfg, &rows, checks, (), clock)
}

#[derive(Serialize)]
struct TrimRow {
    set: String,
    round: usize,
    vertices: usize,
    reference: Option<usize>,
}

fn trim_table(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (named, expected) in builtin_constraint_sets().into_iter().zip(reference::TRIM_ROUNDS.iter()) {
        let g = generate(&named.set, 2)?;
        rows.push(TrimRow { set: named.name.clone(), round: 0, vertices: g.screened_vertices(), reference: None });
        let rounds = g.pass_counts();
        for (i, &v) in rounds.iter().enumerate() {
            rows.push(TrimRow { set: named.name.clone(), round: i + 1, vertices: v, reference: expected.get(i).copied() });
        }
        checks.push(Check::new(format!("{} trimming rounds", named.name), rounds == *expected, format!("{rounds:?}")));
    }
    let hc = generate(&high_compatibility(), 1)?;
    let degree_two = hc.accessor.vertices().filter(|&v| hc.accessor.degree(v) == 2).count();
    let (screened, vertices, two) = reference::HIGH_COMPATIBILITY;
    rows.push(TrimRow { set: "high-compatibility".into(), round: 0, vertices: hc.screened_vertices(), reference: Some(screened) });
    rows.push(TrimRow { set: "high-compatibility".into(), round: hc.rounds.len() - 1, vertices: hc.final_vertices(), reference: Some(vertices) });
    checks.push(Check::new("high-compatibility screened", hc.screened_vertices() == screened, hc.screened_vertices().to_string()));
    checks.push(Check::new("high-compatibility vertices", hc.final_vertices() == vertices, hc.final_vertices().to_string()));
    checks.push(Check::new("high-compatibility out-degree 2", degree_two == two, degree_two.to_string()));
    finish("trim-table", cfg, &rows, checks, (), clock)
}

#[derive(Serialize)]
struct ProfileRow {
    error_rate: f64,
    trials: usize,
    correction_rate: f64,
    ambiguous: usize,
    detection_rate: f64,
    overflowed: usize,
    mean_search: f64,
    mean_sieved: f64,
    mean_accesses: f64,
    median_accesses: f64,
}

impl From<&RepairProfile> for ProfileRow {
    fn from(p: &RepairProfile) -> Self {
        ProfileRow {
            error_rate: p.error_rate,
            trials: p.trials,
            correction_rate: p.correction_rate(),
            ambiguous: p.ambiguous,
            detection_rate: p.detection_rate(),
            overflowed: p.overflowed,
            mean_search: p.mean_search,
            mean_sieved: p.mean_sieved,
            mean_accesses: p.mean_accesses,
            median_accesses: p.median_accesses,
        }
    }
}

fn profiles(cfg: &ExperimentConfig, rates: &[f64]) -> Result<Vec<RepairProfile>> {
    let codec = cfg.codec()?;
    let limits = RepairLimits::default();
    rates
        .iter()
        .map(|&e| repair_counters_profile(&codec, &ChannelSpec::new(e)?.with_seed(cfg.seed), cfg.trials, &limits))
        .collect()
}

fn at(profiles: &[RepairProfile], rate: f64) -> Option<&RepairProfile> {
    profiles.iter().find(|p| (p.error_rate - rate).abs() < 1e-12)
}

const HALF_PERCENT_GRID: [f64; 8] = [0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04];

fn correction_rate(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let ps = profiles(cfg, &cfg.rates_or(&HALF_PERCENT_GRID))?;
    let rows: Vec<ProfileRow> = ps.iter().map(ProfileRow::from).collect();
    let mut checks = Vec::new();
    let rates: Vec<f64> = ps.iter().map(|p| p.correction_rate()).collect();
    checks.push(Check::new("rates decrease with error rate", rates.windows(2).all(|w| w[1] <= w[0]), format!("{rates:?}")));
    if let Some(p) = at(&ps, 0.005) {
        let r = p.correction_rate();
        checks.push(Check::new("0.5% correction", (r - reference::CORRECTION_AT_HALF_PERCENT).abs() <= 0.025, format!("{r:.4}")));
    }
    if let Some(p) = at(&ps, 0.04) {
        let r = p.correction_rate();
        checks.push(Check::new("4% correction", (0.55..=0.65).contains(&r), format!("{r:.4}")));
    }
    for &(e, search, sieved) in &reference::CANDIDATES {
        if let Some(p) = at(&ps, e) {
            let (lo_s, hi_s, lo_p, hi_p) = if e < 0.01 { (1.2, 1.6, 1.0, 1.01) } else { (13.0, 20.0, 1.1, 1.3) };
            checks.push(Check::new(
                format!("{:.1}% candidates", e * 100.0),
                (lo_s..=hi_s).contains(&p.mean_search) && (lo_p..=hi_p).contains(&p.mean_sieved),
                format!("{:.4}/{:.4} vs {search}/{sieved}", p.mean_search, p.mean_sieved),
            ));
        }
    }
    for &(e, f) in reference::ACCESSES.iter().filter(|(e, _)| [0.0, 0.005, 0.04].contains(e)) {
        if let Some(p) = at(&ps, e) {
            checks.push(Check::new(
                format!("{:.1}% accesses", e * 100.0),
                (p.mean_accesses - f).abs() <= 0.1 * f,
                format!("{:.3} vs {f}", p.mean_accesses),
            ));
        }
    }
    finish("correction-rate", cfg, &rows, checks, (), clock)
}

fn detection_rate(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let grid: Vec<f64> = (1..=16).map(|i| i as f64 * 0.005).collect();
    let ps = profiles(cfg, &cfg.rates_or(&grid))?;
    let rows: Vec<ProfileRow> = ps.iter().map(ProfileRow::from).collect();
    let mut checks = vec![Check::new(
        "detection at least correction",
        ps.iter().all(|p| p.detection_rate() >= p.correction_rate()),
        String::new(),
    )];
    if let Some(p) = at(&ps, 0.005) {
        let d = p.detection_rate();
        checks.push(Check::new("0.5% detection", (d - reference::DETECTION_AT_HALF_PERCENT).abs() <= 0.025, format!("{d:.4}")));
    }
    finish("detection-rate", cfg, &rows, checks, (), clock)
}

#[derive(Serialize)]
struct MinReadsRow {
    error_rate: f64,
    reads: usize,
    failed_trials: usize,
}

#[derive(Serialize)]
struct MinReadsMetric {
    error_rate: f64,
    min_reads: Option<usize>,
    reference: Option<usize>,
}

const MIN_READS_CAP: usize = 40;

fn min_reads(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let codec = cfg.codec()?;
    let rates = cfg.rates_or(&reference::MIN_READS.map(|(e, _)| e));
    let mut rows = Vec::new();
    let mut metrics = Vec::new();
    let mut checks = Vec::new();
    for e in rates {
        let spec = ChannelSpec::new(e)?.with_seed(cfg.seed);
        let m = min_reads_single(&codec, &spec, cfg.trials, MIN_READS_CAP, &RepairLimits::default())?;
        for (i, &f) in m.failures.iter().enumerate() {
            rows.push(MinReadsRow { error_rate: e, reads: i + 1, failed_trials: f });
        }
        let reference = reference::MIN_READS.iter().find(|(r, _)| (r - e).abs() < 1e-12).map(|&(_, n)| n);
        if let Some(want) = reference {
            let ok = m.min_reads.is_some_and(|got| got.abs_diff(want) <= 2);
            checks.push(Check::new(format!("{:.1}% min reads", e * 100.0), ok, format!("{:?} vs {want}", m.min_reads)));
        }
        metrics.push(MinReadsMetric { error_rate: e, min_reads: m.min_reads, reference });
    }
    finish("min-reads", cfg, &rows, checks, metrics, clock)
}

#[derive(Serialize)]
struct ThresholdRow {
    error_rate: f64,
    diversity: usize,
    reads: usize,
    losses: usize,
    min_gap: i64,
    tau_observed: u64,
    tau_estimate: f64,
    undecodable: usize,
}

fn nonblocking_threshold(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let codec = cfg.codec()?;
    let limits = RepairLimits::default();
    let rates = cfg.rates_or(&[0.005, 0.04]);
    let diversities = if cfg.diversities.is_empty() { vec![100, 1000] } else { cfg.diversities.clone() };
    let depths = if cfg.reads.is_empty() { vec![5, 10, 20, 50] } else { cfg.reads.clone() };
    let deepest = *depths.iter().max().ok_or_else(|| Error::invalid("empty reads grid"))?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &e in &rates {
        for &n in &diversities {
            let (_, library) = random_library(&codec, n, cfg.message_bits, cfg.seed ^ n as u64)?;
            let truth: Vec<_> = library.iter().map(|c| c.payload.clone()).collect();
            let spec = ChannelSpec::new(e)?.with_seed(cfg.seed);
            let pool = make_pool(&library, deepest, &spec)?;
            let reports = retrieve_depths(&pool, &codec, n, &truth, &depths, &limits)?;
            for rep in reports {
                let errors = if e < 0.01 { 1 } else { 8 };
                rows.push(ThresholdRow {
                    error_rate: e,
                    diversity: n,
                    reads: rep.reads,
                    losses: rep.losses.unwrap_or(0),
                    min_gap: rep.min_gap.unwrap_or(0),
                    tau_observed: rep.tau_observed.unwrap_or(0),
                    tau_estimate: if n >= 10 { estimator_tau(rep.reads as f64, n as f64, errors)? } else { f64::NAN },
                    undecodable: rep.undecodable,
                });
            }
        }
    }
    if let Some(row) = rows.iter().filter(|r| r.error_rate < 0.01).max_by_key(|r| r.tau_observed) {
        checks.push(Check::new(
            "0.5% incorrect frequency at most 20",
            row.tau_observed <= 20,
            format!("max {} at N={} R={}", row.tau_observed, row.diversity, row.reads),
        ));
    }
    let e = *rates.last().expect("nonempty grid");
    let n = *diversities.iter().min().expect("nonempty grid");
    let (_, library) = random_library(&codec, n, cfg.message_bits, cfg.seed ^ n as u64)?;
    let pool = make_pool(&library, deepest, &ChannelSpec::new(e)?.with_seed(cfg.seed))?;
    let tau = estimator_tau(deepest as f64, n.max(10) as f64, if e < 0.01 { 1 } else { 8 })?.ceil() as u64;
    let streamed = retrieve_nonblocking(&pool.records, &codec, tau, &limits)?;
    let equal = streamed.emitted() == streamed.table.above(tau);
    let wrong = streamed.emissions.iter().filter(|em| !library.iter().any(|c| c.payload == em.payload)).count();
    checks.push(Check::new("streaming equals blocking above threshold", equal, format!("tau {tau}, {} emitted", streamed.emissions.len())));
    checks.push(Check::new("no incorrect emission at estimated threshold", wrong == 0, format!("{wrong} incorrect")));
    finish("nonblocking-threshold", cfg, &rows, checks, (), clock)
}

#[derive(Serialize)]
struct ThroughputRow {
    error_rate: f64,
    trials: usize,
    nucleotides: usize,
    walk_steps: u64,
    vertex_accesses: u64,
}

#[derive(Serialize)]
struct ThroughputMetric {
    error_rate: f64,
    nucleotides_per_second: f64,
}

fn throughput(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let ps = profiles(cfg, &cfg.rates_or(&[0.0, 0.005, 0.01, 0.02, 0.03, 0.04]))?;
    let rows: Vec<ThroughputRow> = ps
        .iter()
        .map(|p| ThroughputRow {
            error_rate: p.error_rate,
            trials: p.trials,
            nucleotides: p.trials * PROFILE_READ_LEN,
            walk_steps: p.totals.walk_steps,
            vertex_accesses: p.totals.vertex_accesses,
        })
        .collect();
    let metrics: Vec<ThroughputMetric> =
        ps.iter().map(|p| ThroughputMetric { error_rate: p.error_rate, nucleotides_per_second: p.nucleotides_per_second() }).collect();
    let mut checks = Vec::new();
    if let Some(p) = at(&ps, 0.04) {
        let speed = p.nucleotides_per_second();
        checks.push(Check::new("4% throughput at least 10000 nt/s", speed >= 10_000.0, format!("{speed:.0} nt/s")));
    }
    finish("throughput", cfg, &rows, checks, metrics, clock)
}

#[derive(Serialize)]
struct ComplexityRow {
    diversity: f64,
    error_rate: f64,
    reads: f64,
    ours_model: f64,
    ours_closed_form: f64,
    ours_measured: f64,
    conventional_model: f64,
    conventional_closed_form: f64,
}

fn complexity_curves(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let measured = profiles(cfg, &[0.005, 0.04])?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (errors, (e, search, sieved), p) in [(1u32, reference::CANDIDATES[0]), (8, reference::CANDIDATES[1])].into_iter().zip(measured.iter()).map(|((a, b), c)| (a, b, c)) {
        let accesses = reference::ACCESSES.iter().find(|(r, _)| (r - e).abs() < 1e-12).map(|&(_, f)| f).expect("reference rate");
        let mut worst: f64 = 0.0;
        for exponent in 1..=9 {
            let n = 10f64.powi(exponent);
            let reads = estimator_min_reads(n, errors, RetrievalTarget::Lossless)?;
            let model = complexity_model(&ComplexityParams::new(n, reads, PROFILE_READ_LEN as f64, accesses, search, sieved))?;
            let ours_measured = complexity_model(&ComplexityParams::new(
                n,
                reads,
                PROFILE_READ_LEN as f64,
                p.mean_accesses,
                p.mean_search,
                p.mean_sieved,
            ))?
            .ours;
            let conventional = complexity_model(&ComplexityParams::new(n, 5.0, PROFILE_READ_LEN as f64, 0.0, 0.0, 0.0))?.conventional;
            let closed = closed_form_ours(n, errors)?;
            worst = worst.max((model.ours - closed).abs() / closed);
            rows.push(ComplexityRow {
                diversity: n,
                error_rate: e,
                reads,
                ours_model: model.ours,
                ours_closed_form: closed,
                ours_measured,
                conventional_model: conventional,
                conventional_closed_form: closed_form_conventional(n),
            });
        }
        checks.push(Check::new(format!("{:.1}% model matches closed form", e * 100.0), worst < 1e-3, format!("worst relative gap {worst:.2e}")));
    }
    let ratio = closed_form_conventional(1e6) / closed_form_ours(1e6, 1)?;
    checks.push(Check::new("conventional over ours at N=1e6 above 1000", ratio > 1e3, format!("{ratio:.1}")));
    checks.push(Check::new("conventional closed form at N=1", closed_form_conventional(1.0) == 48_000_400.0, String::new()));
    finish("complexity-curves", cfg, &rows, checks, (), clock)
}

#[derive(Serialize)]
struct DensityRow {
    set: String,
    vertices: usize,
    capacity: f64,
    density: f64,
}

fn density_row(name: &str, acc: Accessor, bits: usize, trials: usize, seed: u64) -> Result<DensityRow> {
    let capacity = approximate_capacity_default(&acc)?.capacity;
    let vertices = acc.present_count();
    let codec = Codec::with_default_start(acc, ArcBinding::Canonical)?;
    let density = measure_density(&codec, bits, trials, seed)?;
    Ok(DensityRow { set: name.into(), vertices, capacity, density })
}

fn density_vs_capacity(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let clock = Instant::now();
    let trials = cfg.trials.clamp(1, 200);
    let mut rows = Vec::new();
    for named in builtin_constraint_sets() {
        rows.push(density_row(&named.name, generate(&named.set, 1)?.accessor, 1000, trials, cfg.seed)?);
    }
    let hc = density_row("high-compatibility", generate(&high_compatibility(), 1)?.accessor, 200, trials.max(100), cfg.seed)?;
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|r| Check::new(format!("{} density within capacity", r.set), r.density <= r.capacity + 1e-9, format!("{:.4} <= {:.4}", r.density, r.capacity)))
        .collect();
    checks.push(Check::new(
        "high-compatibility density",
        (0.55..=reference::DENSITY_HIGH_COMPATIBILITY + 0.005).contains(&hc.density),
        format!("{:.4}", hc.density),
    ));
    rows.push(hc);
    finish("density-vs-capacity", cfg, &rows, checks, (), clock)
}
