//! Parameter sweeps behind the `klab` command line.
//!
//! A sweep validates its whole configuration up front, then evaluates every
//! parameter cell and collects one row per cell in sorted parameter order.
//! Bound violations never stop a sweep; they are flagged in the `pass` column
//! and turn the exit status into [`ExitStatus::Falsified`].

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::error::KlabError;
use crate::expsums::{weil_complete_bound, weil_incomplete_bound, PhaseTable, SumSpec};
use crate::family::{
    derive_seed, generate_disjoint_family, generate_family, max_family_size, GenMode, SeededRng,
};
use crate::meanvalue::{check_mvt_with, lemma1_bound, lemma1_lhs_with, SpectralWeights};
use crate::modarith::{is_prime_u64, PrimeModulus};
use crate::solver::{
    corollary_preset, family_first_soluble, solubility_report, theorem1_threshold,
};

/// Relative tolerance for the spectral identity rows.
pub const IDENTITY_REL_TOL: f64 = 1e-8;
/// Absolute tolerance for `count = S1 + Re(S2)` and `Im(S2) = 0`.
pub const DECOMPOSITION_TOL: f64 = 1e-6;

const TAG_ELL: u64 = 0x656c6c;
const TAG_FAMILY: u64 = 0x66616d;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0} is not an odd prime below 2^63")]
    NotPrime(u64),
    #[error("invalid {what} `{input}`: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Klab(#[from] KlabError),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    VerifyLemma1,
    VerifyIdentity,
    VerifyMvt,
    VerifyWeil,
    Solve,
    ScanHooley,
    Bench,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::VerifyLemma1,
        Command::VerifyIdentity,
        Command::VerifyMvt,
        Command::VerifyWeil,
        Command::Solve,
        Command::ScanHooley,
        Command::Bench,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::VerifyLemma1 => "verify-lemma1",
            Command::VerifyIdentity => "verify-identity",
            Command::VerifyMvt => "verify-mvt",
            Command::VerifyWeil => "verify-weil",
            Command::Solve => "solve",
            Command::ScanHooley => "scan-hooley",
            Command::Bench => "bench",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| parse_err("command", s, "unknown command"))
    }
}

fn parse_err(what: &'static str, input: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Which twists `ell` a sweep visits for each prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllPolicy {
    All,
    /// `n` distinct twists drawn from the seeded generator.
    Sample(usize),
    Fixed(u64),
}

impl FromStr for EllPolicy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(EllPolicy::All);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            let n: usize = n
                .parse()
                .map_err(|_| parse_err("--ell", s, "expected sample:<count>"))?;
            if n == 0 {
                return Err(parse_err("--ell", s, "sample count must be positive"));
            }
            return Ok(EllPolicy::Sample(n));
        }
        s.parse()
            .map(EllPolicy::Fixed)
            .map_err(|_| parse_err("--ell", s, "expected all, sample:<n> or an integer"))
    }
}

/// One entry of an `--H` / `--K` list; resolved per prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthSpec {
    Value(u64),
    /// Inclusive range `a..b`.
    Range(u64, u64),
    /// Powers of two below p, plus `p - 1`.
    Dyadic,
    /// Every length `1..=p`.
    All,
}

impl LengthSpec {
    pub fn parse_list(what: &'static str, s: &str) -> Result<Vec<LengthSpec>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "dyadic" => Ok(LengthSpec::Dyadic),
                "all" => Ok(LengthSpec::All),
                _ => {
                    if let Some((a, b)) = t.split_once("..") {
                        let a = a
                            .parse()
                            .map_err(|_| parse_err(what, t, "bad range start"))?;
                        let b = b.parse().map_err(|_| parse_err(what, t, "bad range end"))?;
                        if a > b {
                            return Err(parse_err(what, t, "empty range"));
                        }
                        Ok(LengthSpec::Range(a, b))
                    } else {
                        t.parse().map(LengthSpec::Value).map_err(|_| {
                            parse_err(what, t, "expected an integer, a..b, dyadic or all")
                        })
                    }
                }
            })
            .collect()
    }

    fn expand(&self, p: u64, out: &mut Vec<u64>) {
        match *self {
            LengthSpec::Value(v) => out.push(v),
            LengthSpec::Range(a, b) => out.extend(a..=b),
            LengthSpec::Dyadic => {
                out.extend((0..63).map(|i| 1u64 << i).take_while(|&h| h < p));
                out.push(p - 1);
            }
            LengthSpec::All => out.extend(1..=p),
        }
    }
}

fn resolve_lengths(specs: &[LengthSpec], p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for s in specs {
        s.expand(p, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn parse_p_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err("--p", t, "expected an integer"))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(parse_err("--format", s, "expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub p_list: Vec<u64>,
    /// Empty means the command's default.
    pub h_list: Vec<LengthSpec>,
    pub k_list: Vec<LengthSpec>,
    pub ell: EllPolicy,
    /// Family size for `verify-mvt` and `solve`.
    pub j: Option<u64>,
    /// Implied constant in the solubility threshold.
    pub c: f64,
    pub seed: u64,
    pub mode: GenMode,
    pub format: Format,
    pub workers: Option<usize>,
    /// Drops the timestamp header and zeroes `wall_time_ms`.
    pub deterministic: bool,
}

impl ExperimentConfig {
    pub fn new(command: Command, p_list: Vec<u64>) -> Self {
        Self {
            command,
            p_list,
            h_list: Vec::new(),
            k_list: Vec::new(),
            ell: EllPolicy::Fixed(1),
            j: None,
            c: 1.0,
            seed: 0,
            mode: GenMode::RandomDisjoint,
            format: Format::Csv,
            workers: None,
            deterministic: false,
        }
    }
}

/// A single output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn dash() -> Self {
        Cell::Text("-".into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub const VERIFY_COLUMNS: [&str; 11] = [
    "command",
    "p",
    "ell",
    "H",
    "K",
    "J",
    "lhs",
    "bound",
    "ratio",
    "pass",
    "wall_time_ms",
];
pub const SOLVE_COLUMNS: [&str; 12] = [
    "p",
    "H",
    "K",
    "J",
    "j_found",
    "x",
    "y",
    "count_j",
    "s1_j",
    "s2_re",
    "s2_im",
    "wall_time_ms",
];
pub const HOOLEY_COLUMNS: [&str; 8] = [
    "p",
    "ell",
    "H",
    "max_abs",
    "argmax_n",
    "max_ratio",
    "mean_sq_over_h",
    "wall_time_ms",
];
pub const BENCH_COLUMNS: [&str; 6] = [
    "p",
    "ell",
    "H",
    "checksum_re",
    "checksum_im",
    "wall_time_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    AllPass,
    Falsified,
}

impl ExitStatus {
    pub fn code(&self) -> i32 {
        match self {
            ExitStatus::AllPass => 0,
            ExitStatus::Falsified => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub command: Command,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub format: Format,
    pub deterministic: bool,
}

impl RunOutcome {
    pub fn status(&self) -> ExitStatus {
        if self.rows.iter().all(|r| r.pass) {
            ExitStatus::AllPass
        } else {
            ExitStatus::Falsified
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// One `name=value` line per failing row.
    pub fn describe(&self, row: &Row) -> String {
        self.columns
            .iter()
            .zip(&row.cells)
            .map(|(c, v)| format!("{c}={}", v.render()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        match self.format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        if !self.deterministic {
            let ms = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0);
            writeln!(
                buf,
                "# klab {} generated_unix_ms={ms} log=natural",
                self.command
            )?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns).map_err(csv_io)?;
            for row in &self.rows {
                w.write_record(row.cells.iter().map(Cell::render))
                    .map_err(csv_io)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    fn render_json(&self) -> Result<Vec<u8>> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(&row.cells)
                    .map(|(c, v)| (c.to_string(), v.to_json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut buf = serde_json::to_vec_pretty(&rows).map_err(std::io::Error::other)?;
        buf.push(b'\n');
        Ok(buf)
    }

    /// Renders fully, then writes in one call; no partial file on error.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let bytes = self.render()?;
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e))
}

/// Per-prime resolved sweep parameters.
#[derive(Debug, Clone)]
struct PrimePlan {
    p: PrimeModulus,
    ells: Vec<u64>,
    hs: Vec<u64>,
    ks: Vec<u64>,
}

fn validate(config: &ExperimentConfig) -> Result<Vec<PrimePlan>> {
    if config.p_list.is_empty() {
        return Err(HarnessError::Config("--p needs at least one prime".into()));
    }
    if !(config.c > 0.0 && config.c.is_finite()) {
        return Err(HarnessError::Config(format!(
            "--c must be positive, got {}",
            config.c
        )));
    }
    if config.workers == Some(0) {
        return Err(HarnessError::Config("--workers must be positive".into()));
    }
    let mut ps = config.p_list.clone();
    ps.sort_unstable();
    ps.dedup();
    let mut plans = Vec::with_capacity(ps.len());
    for p in ps {
        if !is_prime_u64(p) || p < 3 {
            return Err(HarnessError::NotPrime(p));
        }
        let pm = PrimeModulus::new(p).map_err(|_| HarnessError::NotPrime(p))?;
        plans.push(plan_for(config, pm)?);
    }
    Ok(plans)
}

fn plan_for(config: &ExperimentConfig, p: PrimeModulus) -> Result<PrimePlan> {
    let m = p.get();
    let ells = match config.ell {
        EllPolicy::All => (1..m).collect(),
        EllPolicy::Sample(n) => {
            SeededRng::new(derive_seed(config.seed, &[TAG_ELL, m])).sample_distinct(1, m - 1, n)
        }
        EllPolicy::Fixed(v) => {
            if v == 0 || v >= m {
                return Err(HarnessError::Config(format!(
                    "--ell {v} is not a unit modulo p = {m}"
                )));
            }
            vec![v]
        }
    };
    let default_h = match config.command {
        Command::Bench => vec![LengthSpec::Value(1000.min(m))],
        Command::Solve => Vec::new(),
        _ => vec![LengthSpec::Dyadic],
    };
    let h_specs = if config.h_list.is_empty() {
        &default_h
    } else {
        &config.h_list
    };
    let mut hs = resolve_lengths(h_specs, m);
    let mut ks = resolve_lengths(&config.k_list, m);
    let max_len = match config.command {
        Command::VerifyMvt | Command::Solve => m - 1,
        _ => m,
    };
    if config.command == Command::Solve && hs.is_empty() {
        let c = corollary_preset(&p)?;
        hs = vec![c.h];
        ks = vec![c.k];
    } else if config.command == Command::Solve && ks.is_empty() {
        ks = hs.clone();
    }
    for (name, list) in [("H", &hs), ("K", &ks)] {
        if let Some(&bad) = list.iter().find(|&&v| v == 0 || v > max_len) {
            return Err(HarnessError::Config(format!(
                "{name} = {bad} is outside [1, {max_len}] for p = {m}"
            )));
        }
    }
    if let Some(j) = config.j {
        if matches!(config.command, Command::VerifyMvt | Command::Solve) {
            for &h in &hs {
                if j == 0 || j as u128 * h as u128 > (m - 1) as u128 {
                    return Err(KlabError::InfeasibleGeometry(format!(
                        "J H = {j} * {h} exceeds p - 1 = {}",
                        m - 1
                    ))
                    .into());
                }
            }
        }
    }
    Ok(PrimePlan { p, ells, hs, ks })
}

struct Timer {
    start: Instant,
    deterministic: bool,
}

impl Timer {
    fn start(deterministic: bool) -> Self {
        Self {
            start: Instant::now(),
            deterministic,
        }
    }

    fn ms(&self) -> Cell {
        if self.deterministic {
            Cell::Float(0.0)
        } else {
            Cell::Float(self.start.elapsed().as_secs_f64() * 1e3)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify_row(
    command: Command,
    p: u64,
    ell: Cell,
    h: Cell,
    k: Cell,
    j: Cell,
    lhs: f64,
    bound: f64,
    pass: bool,
    timer: &Timer,
) -> Row {
    let ratio = if bound > 0.0 {
        lhs / bound
    } else {
        f64::INFINITY
    };
    Row {
        cells: vec![
            Cell::Text(command.as_str().into()),
            p.into(),
            ell,
            h,
            k,
            j,
            lhs.into(),
            bound.into(),
            ratio.into(),
            pass.into(),
            timer.ms(),
        ],
        pass,
    }
}

/// Runs the sweep described by `config`. Every configuration error is
/// reported before any computation starts.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let plans = validate(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for plan in &plans {
            rows.extend(run_prime(config, plan)?);
        }
        Ok(rows)
    })?;
    let columns = match config.command {
        Command::Solve => SOLVE_COLUMNS.to_vec(),
        Command::ScanHooley => HOOLEY_COLUMNS.to_vec(),
        Command::Bench => BENCH_COLUMNS.to_vec(),
        _ => VERIFY_COLUMNS.to_vec(),
    };
    Ok(RunOutcome {
        command: config.command,
        columns,
        rows,
        format: config.format,
        deterministic: config.deterministic,
    })
}

fn run_prime(config: &ExperimentConfig, plan: &PrimePlan) -> Result<Vec<Row>> {
    let table = PhaseTable::new(plan.p);
    let m = plan.p.get();
    let det = config.deterministic;
    let cmd = config.command;
    let cells: Vec<(u64, u64)> = plan
        .ells
        .iter()
        .flat_map(|&ell| plan.hs.iter().map(move |&h| (ell, h)))
        .collect();
    let collect = |rows: Vec<Result<Vec<Row>>>| -> Result<Vec<Row>> {
        Ok(rows
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect())
    };
    match cmd {
        Command::VerifyLemma1 => collect(
            cells
                .par_iter()
                .map(|&(ell, h)| {
                    let timer = Timer::start(det);
                    let lhs = lemma1_lhs_with(&table, ell, h)?;
                    let bound = lemma1_bound(h, &plan.p);
                    Ok(vec![verify_row(
                        cmd,
                        m,
                        ell.into(),
                        h.into(),
                        Cell::dash(),
                        Cell::dash(),
                        lhs,
                        bound,
                        lhs <= bound,
                        &timer,
                    )])
                })
                .collect(),
        ),
        Command::VerifyIdentity => collect(
            plan.ells
                .par_iter()
                .map(|&ell| {
                    let weights = SpectralWeights::new(&table, ell)?;
                    plan.hs
                        .iter()
                        .map(|&h| {
                            let timer = Timer::start(det);
                            let lhs = lemma1_lhs_with(&table, ell, h)?;
                            let rhs = weights.rhs(h);
                            let pass =
                                (lhs - rhs).abs() <= IDENTITY_REL_TOL * lhs.abs().max(rhs.abs());
                            Ok(verify_row(
                                cmd,
                                m,
                                ell.into(),
                                h.into(),
                                Cell::dash(),
                                Cell::dash(),
                                lhs,
                                rhs,
                                pass,
                                &timer,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect(),
        ),
        Command::VerifyMvt => collect(
            cells
                .par_iter()
                .map(|&(ell, h)| {
                    let timer = Timer::start(det);
                    let seed = derive_seed(config.seed, &[TAG_FAMILY, m, ell, h]);
                    let j = match config.j {
                        Some(j) => j,
                        None => 1 + SeededRng::new(seed).below(max_family_size(&plan.p, h)),
                    };
                    let fam = generate_disjoint_family(&plan.p, h, j, mix_seed(seed))?;
                    let spec = SumSpec::new(ell, plan.p)?;
                    let rep = check_mvt_with(&table, &spec, &fam)?;
                    Ok(vec![verify_row(
                        cmd,
                        m,
                        ell.into(),
                        h.into(),
                        Cell::dash(),
                        (fam.len() as u64).into(),
                        rep.lhs,
                        rep.bound,
                        rep.holds(),
                        &timer,
                    )])
                })
                .collect(),
        ),
        Command::VerifyWeil => collect(
            plan.ells
                .par_iter()
                .map(|&ell| {
                    let mut rows = Vec::with_capacity(plan.hs.len() + 1);
                    let timer = Timer::start(det);
                    let max_k = (1..m)
                        .into_par_iter()
                        .map(|a| table.kloosterman(ell, a).map(f64::abs))
                        .collect::<std::result::Result<Vec<_>, _>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    let bound = weil_complete_bound(&plan.p);
                    rows.push(verify_row(
                        cmd,
                        m,
                        ell.into(),
                        Cell::dash(),
                        Cell::dash(),
                        Cell::dash(),
                        max_k,
                        bound,
                        max_k <= bound,
                        &timer,
                    ));
                    let bound = weil_incomplete_bound(&plan.p);
                    for &h in &plan.hs {
                        let timer = Timer::start(det);
                        let max_s = table
                            .all_windows(ell, h)?
                            .iter()
                            .map(|s| s.norm())
                            .fold(0.0, f64::max);
                        rows.push(verify_row(
                            cmd,
                            m,
                            ell.into(),
                            h.into(),
                            Cell::dash(),
                            Cell::dash(),
                            max_s,
                            bound,
                            max_s <= bound,
                            &timer,
                        ));
                    }
                    Ok(rows)
                })
                .collect(),
        ),
        Command::ScanHooley => collect(
            cells
                .par_iter()
                .map(|&(ell, h)| {
                    let timer = Timer::start(det);
                    let s = crate::meanvalue::hooley_scan_with(&table, ell, h)?;
                    Ok(vec![Row {
                        cells: vec![
                            m.into(),
                            ell.into(),
                            h.into(),
                            s.max_abs.into(),
                            s.argmax_n.into(),
                            s.max_ratio.into(),
                            s.mean_sq_over_h.into(),
                            timer.ms(),
                        ],
                        pass: true,
                    }])
                })
                .collect(),
        ),
        Command::Bench => collect(
            cells
                .iter()
                .map(|&(ell, h)| {
                    let timer = Timer::start(det);
                    let sums = table.all_windows(ell, h)?;
                    let checksum: Complex64 = sums.iter().sum();
                    Ok(vec![Row {
                        cells: vec![
                            m.into(),
                            ell.into(),
                            h.into(),
                            checksum.re.into(),
                            checksum.im.into(),
                            timer.ms(),
                        ],
                        pass: true,
                    }])
                })
                .collect(),
        ),
        Command::Solve => {
            let hk: Vec<(u64, u64)> = plan
                .hs
                .iter()
                .flat_map(|&h| plan.ks.iter().map(move |&k| (h, k)))
                .collect();
            collect(
                hk.iter()
                    .map(|&(h, k)| solve_cell(config, plan, &table, h, k).map(|r| vec![r]))
                    .collect(),
            )
        }
    }
}

fn mix_seed(seed: u64) -> u64 {
    derive_seed(seed, &[1])
}

/// Family size for `solve`: `--J` when given, else the solubility threshold
/// capped at the largest family that fits.
pub fn solve_family_size(config: &ExperimentConfig, p: &PrimeModulus, h: u64, k: u64) -> u64 {
    config.j.unwrap_or_else(|| {
        theorem1_threshold(h, k, p, config.c)
            .min(max_family_size(p, h))
            .max(1)
    })
}

fn solve_cell(
    config: &ExperimentConfig,
    plan: &PrimePlan,
    table: &PhaseTable,
    h: u64,
    k: u64,
) -> Result<Row> {
    let timer = Timer::start(config.deterministic);
    let p = &plan.p;
    let j = solve_family_size(config, p, h, k);
    let seed = derive_seed(config.seed, &[TAG_FAMILY, p.get(), h, k]);
    let fam = generate_family(p, h, k, j, seed, config.mode)?;
    let found = family_first_soluble(&fam, p)?;
    let index = found.map_or(1, |(j, _)| j);
    let (i1, i2) = fam.pairs()[index - 1];
    let rep = solubility_report(table, index, &i1, &i2)?;
    let (j_found, x, y) = match found {
        Some((j, (x, y))) => (Cell::Int(j as i64), x.into(), y.into()),
        None => (Cell::Int(-1), Cell::dash(), Cell::dash()),
    };
    Ok(Row {
        cells: vec![
            p.get().into(),
            h.into(),
            k.into(),
            (fam.len() as u64).into(),
            j_found,
            x,
            y,
            rep.count.into(),
            rep.s1.into(),
            rep.s2.re.into(),
            rep.s2.im.into(),
            timer.ms(),
        ],
        pass: rep.is_exact(DECOMPOSITION_TOL),
    })
}
