//! The `crn-jamgame` command-line front end.
//!
//! Configuration comes from an optional flat JSON file, overridden by flags.
//! The seed falls back to `CRN_JAMGAME_SEED` when neither provides one.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degenerate game without any
//! equilibrium, 4 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::Error;
use crate::exec::{derive_seed, Execution};
use crate::fp::{convergence_error, run_fp, HistoryCounters};
use crate::game::{build_game, BimatrixGame, Category, NetworkConfig, Strategy};
use crate::nash::{mixed_equilibrium, EquilibriumReport, MixedProfile};
use crate::sim::{
    run_simulation, CategoryHistories, Policy, PolicySpec, SimulationSummary, SlotRecord,
};

pub const SEED_ENV: &str = "CRN_JAMGAME_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_ITERATIONS: u64 = 20_000;
pub const DEFAULT_SLOTS: u64 = 100_000;

pub const FP_COLUMNS: [&str; 7] = [
    "iteration",
    "secondary_action",
    "malicious_action",
    "p_star",
    "q_star",
    "err_p",
    "err_q",
];

pub const SIMULATE_COLUMNS: [&str; 14] = [
    "slot",
    "category",
    "secondary_band",
    "malicious_band",
    "n_primaries_on_secondary_band",
    "secondary_action",
    "malicious_action",
    "jam",
    "payoff_s",
    "payoff_m",
    "pstar_A",
    "qstar_A",
    "pstar_B",
    "qstar_B",
];

pub const NASH_COLUMNS: [&str; 7] = [
    "category",
    "p",
    "q",
    "residual_s",
    "residual_m",
    "degenerate",
    "pure_equilibria",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("degenerate game: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_err(context: impl std::fmt::Display) -> impl FnOnce(io::Error) -> CliError {
    move |e| CliError::Io(format!("{context}: {e}"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "crn-jamgame",
    version,
    about = "Secondary user vs jammer games in cognitive radio networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria of the category A and B games.
    Nash(CommonArgs),
    /// Fictitious-play convergence trace for one category.
    Fp(CommonArgs),
    /// Slot-by-slot network simulation.
    Simulate(CommonArgs),
    /// Equilibria over a grid of parameter values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat JSON configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub slots: Option<u64>,
    /// A or B.
    #[arg(long)]
    pub category: Option<String>,
    /// fixed:P, nash or fp.
    #[arg(long)]
    pub policy_secondary: Option<String>,
    /// fixed:Q, nash or fp.
    #[arg(long)]
    pub policy_malicious: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub n_bands: Option<usize>,
    #[arg(long)]
    pub n_primary: Option<usize>,
    #[arg(long)]
    pub cost_secondary_switch: Option<f64>,
    #[arg(long)]
    pub cost_malicious_switch: Option<f64>,
    #[arg(long)]
    pub gain_secondary: Option<f64>,
    #[arg(long)]
    pub gain_malicious: Option<f64>,
    #[arg(long)]
    pub loss_secondary: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// FIELD=LO..HI[:STEP], inclusive; repeat for a Cartesian product.
    #[arg(long = "sweep", value_name = "FIELD=LO..HI[:STEP]")]
    pub sweep: Vec<String>,
    /// Also run fictitious play per grid point and report its final errors.
    #[arg(long)]
    pub with_fp: bool,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n_bands: Option<usize>,
    pub n_primary: Option<usize>,
    pub cost_secondary_switch: Option<f64>,
    pub cost_malicious_switch: Option<f64>,
    pub gain_secondary: Option<f64>,
    pub gain_malicious: Option<f64>,
    pub loss_secondary: Option<f64>,
    pub seed: Option<u64>,
    pub iterations: Option<u64>,
    pub slots: Option<u64>,
    pub category: Option<String>,
    pub policy_secondary: Option<String>,
    pub policy_malicious: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub seed: u64,
    pub iterations: u64,
    pub slots: u64,
    pub category: Category,
    pub policies: PolicySpec,
    pub out: Option<PathBuf>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(FileConfig::default());
    }
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                CliError::Config(format!("invalid seed: {SEED_ENV}={v:?} is not a u64"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// Merges defaults, the config file and flags (in increasing precedence) and validates.
pub fn parse_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let d = NetworkConfig::default();
    let network = NetworkConfig {
        n_bands: args.n_bands.or(file.n_bands).unwrap_or(d.n_bands),
        n_primary: args.n_primary.or(file.n_primary).unwrap_or(d.n_primary),
        cost_secondary_switch: args
            .cost_secondary_switch
            .or(file.cost_secondary_switch)
            .unwrap_or(d.cost_secondary_switch),
        cost_malicious_switch: args
            .cost_malicious_switch
            .or(file.cost_malicious_switch)
            .unwrap_or(d.cost_malicious_switch),
        gain_secondary: args
            .gain_secondary
            .or(file.gain_secondary)
            .unwrap_or(d.gain_secondary),
        gain_malicious: args
            .gain_malicious
            .or(file.gain_malicious)
            .unwrap_or(d.gain_malicious),
        loss_secondary: args
            .loss_secondary
            .or(file.loss_secondary)
            .unwrap_or(d.loss_secondary),
    };
    network.validate()?;

    let seed = match args.seed.or(file.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    };
    let iterations = args
        .iterations
        .or(file.iterations)
        .unwrap_or(DEFAULT_ITERATIONS);
    if iterations == 0 {
        return Err(CliError::Config(
            "invalid iterations: must be at least 1".into(),
        ));
    }
    let slots = args.slots.or(file.slots).unwrap_or(DEFAULT_SLOTS);
    if slots == 0 {
        return Err(CliError::Config("invalid slots: must be at least 1".into()));
    }
    let category: Category = args
        .category
        .as_deref()
        .or(file.category.as_deref())
        .unwrap_or("A")
        .parse()?;
    if category == Category::C {
        return Err(CliError::Config(
            "invalid category: C has no game, use A or B".into(),
        ));
    }
    let policy =
        |flag: &Option<String>, file: &Option<String>, field: &str| -> Result<Policy, CliError> {
            flag.as_deref()
                .or(file.as_deref())
                .unwrap_or("fp")
                .parse()
                .map_err(|e: Error| CliError::Config(format!("{field}: {e}")))
        };
    let policies = PolicySpec {
        secondary: policy(
            &args.policy_secondary,
            &file.policy_secondary,
            "policy_secondary",
        )?,
        malicious: policy(
            &args.policy_malicious,
            &file.policy_malicious,
            "policy_malicious",
        )?,
    };
    Ok(RunConfig {
        network,
        seed,
        iterations,
        slots,
        category,
        policies,
        out: args.out.clone().or(file.out),
    })
}

/// Formats a float with six significant digits, `%g` style.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Opens `out`, or standard output when absent.
fn open_output<'a>(
    out: Option<&Path>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    match out {
        Some(path) => {
            let f =
                File::create(path).map_err(io_err(format!("cannot write {}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn pure_list(pure: &[(Strategy, Strategy)]) -> String {
    pure.iter()
        .map(|(r, c)| format!("({r},{c})"))
        .collect::<Vec<_>>()
        .join(";")
}

fn nash_reports(
    network: &NetworkConfig,
) -> Result<Vec<(Category, BimatrixGame, EquilibriumReport)>, CliError> {
    Category::GAMES
        .into_iter()
        .map(|c| {
            let game = build_game(network, c)?;
            let report = mixed_equilibrium(&game);
            Ok((c, game, report))
        })
        .collect()
}

pub fn cmd_nash(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let reports = nash_reports(&cfg.network)?;
    for (category, game, report) in &reports {
        let mut line = format!("category {category}:");
        match report.mixed {
            Some(m) => {
                let (rs, rm) = report.indifference_residuals.unwrap_or_default();
                line.push_str(&format!(
                    " p = {} q = {} residuals = ({}, {})",
                    fmt_float(m.p_secondary_first),
                    fmt_float(m.q_malicious_first),
                    fmt_float(rs),
                    fmt_float(rm)
                ));
            }
            None => line.push_str(" no mixed equilibrium"),
        }
        if !report.pure.is_empty() {
            let labelled: Vec<String> = report
                .pure
                .iter()
                .map(|(r, c)| {
                    format!(
                        "({}, {})",
                        game.secondary_labels[(r.number() - 1) as usize],
                        game.malicious_labels[(c.number() - 1) as usize]
                    )
                })
                .collect();
            line.push_str(&format!(" pure = {}", labelled.join(" ")));
        }
        line.push_str(&format!(" degenerate = {}", report.degenerate));
        writeln!(stdout, "{line}").map_err(io_err("stdout"))?;
    }

    if let Some(path) = &cfg.out {
        let mut w = csv_writer(open_output(Some(path), stdout)?);
        w.write_record(NASH_COLUMNS).map_err(csv_err)?;
        for (category, _, report) in &reports {
            let (rs, rm) = match report.indifference_residuals {
                Some((a, b)) => (Some(a), Some(b)),
                None => (None, None),
            };
            w.write_record([
                category.to_string(),
                fmt_opt(report.mixed.map(|m| m.p_secondary_first)),
                fmt_opt(report.mixed.map(|m| m.q_malicious_first)),
                fmt_opt(rs),
                fmt_opt(rm),
                report.degenerate.to_string(),
                pure_list(&report.pure),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io_err("csv"))?;
    }

    if let Some((category, _, _)) = reports.iter().find(|(_, _, r)| r.is_empty()) {
        return Err(CliError::Degenerate(format!(
            "category {category} has neither a mixed nor a pure equilibrium"
        )));
    }
    Ok(())
}

/// Reference profile for convergence errors: the mixed equilibrium, else the first pure one.
fn reference_profile(
    category: Category,
    report: &EquilibriumReport,
) -> Result<MixedProfile, CliError> {
    report
        .mixed
        .or_else(|| report.pure.first().map(|&(r, c)| MixedProfile::pure(r, c)))
        .ok_or_else(|| CliError::Degenerate(format!("category {category} has no equilibrium")))
}

pub fn cmd_fp(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let game = build_game(&cfg.network, cfg.category)?;
    let reference = reference_profile(cfg.category, &mixed_equilibrium(&game))?;
    let trace = run_fp(&game, cfg.iterations, cfg.seed)?;
    let errors = convergence_error(&trace, &reference);

    let mut w = csv_writer(open_output(cfg.out.as_deref(), stdout)?);
    w.write_record(FP_COLUMNS).map_err(csv_err)?;
    for (r, e) in trace.records.iter().zip(&errors) {
        w.write_record([
            r.iteration.to_string(),
            r.actions.0.to_string(),
            r.actions.1.to_string(),
            fmt_float(r.frequencies.p_star),
            fmt_float(r.frequencies.q_star),
            fmt_float(e.err_p),
            fmt_float(e.err_q),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err("csv"))
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn frequencies_row(h: &HistoryCounters) -> [String; 2] {
    [
        fmt_opt(ratio(h.h_s1, h.secondary_total())),
        fmt_opt(ratio(h.h_m1, h.malicious_total())),
    ]
}

fn slot_row(r: &SlotRecord) -> Vec<String> {
    let CategoryHistories { a, b } = r.histories_after;
    let [pa, qa] = frequencies_row(&a);
    let [pb, qb] = frequencies_row(&b);
    vec![
        r.slot_index.to_string(),
        r.category.to_string(),
        r.state.secondary_band.to_string(),
        r.state.malicious_band.to_string(),
        (r.state.has_primary(r.state.secondary_band) as u8).to_string(),
        r.actions.secondary.as_str().to_string(),
        r.actions.malicious.as_str().to_string(),
        (r.jam_occurred as u8).to_string(),
        fmt_float(r.payoffs.secondary),
        fmt_float(r.payoffs.malicious),
        pa,
        qa,
        pb,
        qb,
    ]
}

pub fn write_summary(s: &SimulationSummary, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "slots: {}", s.slots)?;
    writeln!(
        w,
        "cumulative payoffs: secondary {} malicious {}",
        fmt_float(s.cumulative_payoffs.secondary),
        fmt_float(s.cumulative_payoffs.malicious)
    )?;
    writeln!(
        w,
        "dwell fractions: A {} B {} C {}",
        fmt_float(s.dwell_fraction(Category::A)),
        fmt_float(s.dwell_fraction(Category::B)),
        fmt_float(s.dwell_fraction(Category::C))
    )?;
    writeln!(w, "jams: {}", s.jams)?;
    for (c, h) in [
        (Category::A, s.final_histories.a),
        (Category::B, s.final_histories.b),
    ] {
        let [p, q] = frequencies_row(&h);
        let show = |v: String| if v.is_empty() { "n/a".to_string() } else { v };
        writeln!(
            w,
            "category {c}: p* {} q* {} history (h_s1 {} h_s2 {} h_m1 {} h_m2 {})",
            show(p),
            show(q),
            h.h_s1,
            h.h_s2,
            h.h_m1,
            h.h_m2
        )?;
    }
    writeln!(
        w,
        "history totals: malicious {} secondary {}",
        s.final_histories.malicious_observations(),
        s.final_histories.secondary_observations()
    )
}

pub fn cmd_simulate(
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let run = run_simulation(&cfg.network, &cfg.policies, cfg.slots, cfg.seed)?;
    {
        let mut w = csv_writer(open_output(cfg.out.as_deref(), &mut *stdout)?);
        w.write_record(SIMULATE_COLUMNS).map_err(csv_err)?;
        for r in &run.records {
            w.write_record(slot_row(r)).map_err(csv_err)?;
        }
        w.flush().map_err(io_err("csv"))?;
    }
    let summary_out: &mut dyn Write = if cfg.out.is_some() { stdout } else { stderr };
    write_summary(&run.summary, summary_out).map_err(io_err("summary"))
}

/// A swept configuration field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepField {
    NBands,
    NPrimary,
    CostSecondarySwitch,
    CostMaliciousSwitch,
    GainSecondary,
    GainMalicious,
    LossSecondary,
}

impl SweepField {
    pub const ALL: [SweepField; 7] = [
        SweepField::NBands,
        SweepField::NPrimary,
        SweepField::CostSecondarySwitch,
        SweepField::CostMaliciousSwitch,
        SweepField::GainSecondary,
        SweepField::GainMalicious,
        SweepField::LossSecondary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepField::NBands => "n_bands",
            SweepField::NPrimary => "n_primary",
            SweepField::CostSecondarySwitch => "cost_secondary_switch",
            SweepField::CostMaliciousSwitch => "cost_malicious_switch",
            SweepField::GainSecondary => "gain_secondary",
            SweepField::GainMalicious => "gain_malicious",
            SweepField::LossSecondary => "loss_secondary",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepField::NBands | SweepField::NPrimary)
    }

    fn get(self, c: &NetworkConfig) -> f64 {
        match self {
            SweepField::NBands => c.n_bands as f64,
            SweepField::NPrimary => c.n_primary as f64,
            SweepField::CostSecondarySwitch => c.cost_secondary_switch,
            SweepField::CostMaliciousSwitch => c.cost_malicious_switch,
            SweepField::GainSecondary => c.gain_secondary,
            SweepField::GainMalicious => c.gain_malicious,
            SweepField::LossSecondary => c.loss_secondary,
        }
    }

    fn set(self, c: &mut NetworkConfig, v: f64) {
        match self {
            SweepField::NBands => c.n_bands = v.round() as usize,
            SweepField::NPrimary => c.n_primary = v.round() as usize,
            SweepField::CostSecondarySwitch => c.cost_secondary_switch = v,
            SweepField::CostMaliciousSwitch => c.cost_malicious_switch = v,
            SweepField::GainSecondary => c.gain_secondary = v,
            SweepField::GainMalicious => c.gain_malicious = v,
            SweepField::LossSecondary => c.loss_secondary = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange {
    pub field: SweepField,
    pub values: Vec<f64>,
}

/// Parses `FIELD=LO..HI[:STEP]` (inclusive, step 1 by default).
pub fn parse_sweep(spec: &str) -> Result<SweepRange, CliError> {
    let bad = |why: &str| CliError::Config(format!("invalid sweep {spec:?}: {why}"));
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| bad("expected FIELD=LO..HI[:STEP]"))?;
    let field = SweepField::ALL
        .into_iter()
        .find(|f| f.name() == name.trim())
        .ok_or_else(|| bad("unknown field"))?;
    let (bounds, step) = match range.split_once(':') {
        Some((b, s)) => (b, s.trim().parse::<f64>().map_err(|_| bad("bad step"))?),
        None => (range, 1.0),
    };
    let (lo, hi) = bounds
        .split_once("..")
        .ok_or_else(|| bad("expected LO..HI"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad("bad lower bound"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad("bad upper bound"))?;
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(bad("bounds and step must be finite"));
    }
    if lo > hi {
        return Err(bad("inverted range"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if field.is_integer() && (lo.fract() != 0.0 || step.fract() != 0.0 || lo < 0.0) {
        return Err(bad("integer field needs integer bounds and step"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as u64 + 1;
    let values = (0..count).map(|k| lo + k as f64 * step).collect();
    Ok(SweepRange { field, values })
}

/// Cartesian product of the ranges, the first range varying slowest.
pub fn sweep_grid(base: &NetworkConfig, ranges: &[SweepRange]) -> Vec<NetworkConfig> {
    let mut grid = vec![*base];
    for range in ranges {
        grid = grid
            .into_iter()
            .flat_map(|c| {
                range.values.iter().map(move |&v| {
                    let mut next = c;
                    range.field.set(&mut next, v);
                    next
                })
            })
            .collect();
    }
    grid
}

pub fn sweep_columns(with_fp: bool) -> Vec<String> {
    let mut cols: Vec<String> = SweepField::ALL
        .iter()
        .map(|f| f.name().to_string())
        .collect();
    for c in Category::GAMES {
        for suffix in [
            "p",
            "q",
            "degenerate",
            "a",
            "b",
            "c",
            "d",
            "e",
            "f",
            "g",
            "h",
        ] {
            cols.push(format!("{c}_{suffix}"));
        }
    }
    if with_fp {
        for c in Category::GAMES {
            cols.push(format!("{c}_fp_err_p"));
            cols.push(format!("{c}_fp_err_q"));
        }
    }
    cols
}

/// Evaluates one grid point. FP seeds are derived from `(seed, index)`.
fn sweep_row(
    network: &NetworkConfig,
    index: u64,
    seed: u64,
    iterations: Option<u64>,
) -> Result<Vec<String>, CliError> {
    let mut row: Vec<String> = SweepField::ALL
        .iter()
        .map(|f| {
            let v = f.get(network);
            if f.is_integer() {
                format!("{}", v as u64)
            } else {
                fmt_float(v)
            }
        })
        .collect();
    let mut fp_cols = Vec::new();
    for (k, category) in Category::GAMES.into_iter().enumerate() {
        let game = build_game(network, category)?;
        let report = mixed_equilibrium(&game);
        row.push(fmt_opt(report.mixed.map(|m| m.p_secondary_first)));
        row.push(fmt_opt(report.mixed.map(|m| m.q_malicious_first)));
        row.push(report.degenerate.to_string());
        row.extend(game.entries().iter().map(|v| fmt_float(*v)));
        if let Some(iterations) = iterations {
            match report.mixed {
                Some(m) => {
                    let trace = run_fp(&game, iterations, derive_seed(seed, 2 * index + k as u64))?;
                    let f = trace.final_frequencies().expect("non-empty trace");
                    fp_cols.push(fmt_float((f.p_star - m.p_secondary_first).abs()));
                    fp_cols.push(fmt_float((f.q_star - m.q_malicious_first).abs()));
                }
                None => fp_cols.extend([String::new(), String::new()]),
            }
        }
    }
    row.extend(fp_cols);
    Ok(row)
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    ranges: &[SweepRange],
    with_fp: bool,
    exec: Execution,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if ranges.is_empty() {
        return Err(CliError::Config(
            "sweep needs at least one --sweep FIELD=LO..HI[:STEP]".into(),
        ));
    }
    for (i, r) in ranges.iter().enumerate() {
        if ranges[..i].iter().any(|o| o.field == r.field) {
            return Err(CliError::Config(format!(
                "field {} swept twice",
                r.field.name()
            )));
        }
    }
    let grid = sweep_grid(&cfg.network, ranges);
    for c in &grid {
        c.validate()?;
    }
    let iterations = with_fp.then_some(cfg.iterations);
    let jobs: Vec<(u64, NetworkConfig)> = grid
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as u64, c))
        .collect();
    let rows = exec.map(jobs, |(i, c)| sweep_row(&c, i, cfg.seed, iterations));

    let mut w = csv_writer(open_output(cfg.out.as_deref(), stdout)?);
    w.write_record(sweep_columns(with_fp)).map_err(csv_err)?;
    for row in rows {
        w.write_record(row?).map_err(csv_err)?;
    }
    w.flush().map_err(io_err("csv"))
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Nash(args) => cmd_nash(&parse_config(&args)?, stdout),
        Command::Fp(args) => cmd_fp(&parse_config(&args)?, stdout),
        Command::Simulate(args) => cmd_simulate(&parse_config(&args)?, stdout, stderr),
        Command::Sweep(args) => {
            let cfg = parse_config(&args.common)?;
            let ranges = args
                .sweep
                .iter()
                .map(|s| parse_sweep(s))
                .collect::<Result<Vec<_>, _>>()?;
            cmd_sweep(&cfg, &ranges, args.with_fp, Execution::default(), stdout)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
