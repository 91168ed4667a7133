//! The `siqkd` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O or numeric
//! failure. Output is plain text (no colour, so `NO_COLOR` is always honoured).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bb84::{
    analytic_rates, calibrate_receiver_excess_loss, simulate_mc, sweep, ProtocolResult, SweepMode,
    SweepParameter,
};
use crate::channel::calibrate_depol_scale;
use crate::config::{RunConfig, RunMode};
use crate::error::Error;
use crate::keybudget::{securable_capacity, KeyBudgetPolicy};
use crate::photonics::{MeanPhotonNumber, SymbolRate};
use crate::source::{build_budget, SourcePreset};
use crate::table::{format_sig, Cell, OutputFormat, OutputTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "siqkd", version, about = "QKD link budgets and BB84 rates for silicon light emitters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmitter power budget for an emitter and filter.
    Budget(BudgetArgs),
    /// Evaluate the link over a range of one parameter.
    Sweep(SweepArgs),
    /// Evaluate one link, analytically or by Monte Carlo.
    Simulate(SimulateArgs),
    /// Classical capacity protectable by a secret-key rate.
    Capacity(CapacityArgs),
    /// Calibrate the encoder depolarization scale or the receiver excess loss.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// INI configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in base scenario (die_level_linewidth | waveguide_1km).
    #[arg(long)]
    scenario: Option<String>,
    /// Override one key, e.g. --set channel.length_km=5.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Write CSV to this path instead of text to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut overrides = Vec::new();
        if let Some(s) = &self.scenario {
            overrides.push(format!("run.scenario={s}"));
        }
        overrides.extend(self.overrides.iter().cloned());
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path, &overrides)?,
            None => RunConfig::load(None, &overrides)?,
        };
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.clone());
            cfg.format = OutputFormat::Csv;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Emitter preset (die_level | waveguide); defaults to the configured source.
    #[arg(long)]
    source: Option<String>,
    /// Filter passband in nm.
    #[arg(long)]
    filter_nm: Option<f64>,
    /// Symbol rate in Hz.
    #[arg(long)]
    rate: Option<f64>,
    /// Target photons per symbol.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// linewidth | length | mu | dark_rate
    #[arg(long)]
    param: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// analytic | mc
    #[arg(long)]
    mode: Option<String>,
    /// Monte Carlo symbols.
    #[arg(long = "n-symbols")]
    n_symbols: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Error> {
        if let Some(m) = &self.mode {
            cfg.mode = m.parse()?;
        }
        if let Some(n) = self.n_symbols {
            if !(n.is_finite() && n >= 0.0 && n.fract() == 0.0) {
                return Err(Error::Config(format!("--n-symbols must be a whole number, got {n}")));
            }
            cfg.n_symbols = n as u64;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Secret-key rate with optional unit: b/s, kb/s, Mb/s, Gb/s.
    #[arg(long)]
    skr: String,
    #[arg(long)]
    key_bits: Option<f64>,
    /// Data encrypted per key, in bytes.
    #[arg(long)]
    chunk_bytes: Option<f64>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Target optical QBER for the encoder depolarization scale.
    #[arg(long, conflicts_with = "skr_per_det")]
    qber: Option<f64>,
    /// Linewidth (nm) at which the QBER target applies; defaults to the filter passband.
    #[arg(long)]
    linewidth: Option<f64>,
    /// Target secret-key rate per detector (b/s) for the receiver excess loss.
    #[arg(long)]
    skr_per_det: Option<f64>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Budget(a) => cmd_budget(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Capacity(a) => cmd_capacity(a, out),
        Command::Calibrate(a) => cmd_calibrate(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "siqkd: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Calibration(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn emit(table: &OutputTable, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Error> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, table.to_csv())
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(table.render(cfg.format).as_bytes()).map_err(Error::from),
    }
}

fn cmd_budget(a: BudgetArgs, out: &mut dyn Write) -> Result<(), Error> {
    let mut cfg = a.cfg.load()?;
    let p = &mut cfg.protocol;
    if let Some(name) = &a.source {
        p.source = name.parse::<SourcePreset>()?.spec();
    }
    if let Some(nm) = a.filter_nm {
        p.filter.passband_nm = nm;
    }
    if let Some(r) = a.rate {
        p.tx.symbol_rate = SymbolRate::new(r)?;
    }
    if let Some(m) = a.mu {
        p.tx.target_mu = MeanPhotonNumber::new(m)?;
    }
    let budget = build_budget(&p.source, &p.filter, &p.tx)?;

    let mut table = OutputTable::new(["section", "quantity", "value", "unit"]);
    for row in budget.rows() {
        table.push(vec![row.section.into(), row.label.into(), row.value.into(), row.unit.into()])?;
    }
    emit(&table, &cfg, out)
}

/// Column layout shared by sweep output.
pub const SWEEP_COLUMNS: [&str; 6] =
    ["param", "sifted_rate_bps", "qber", "secret_fraction", "skr_bps", "skr_per_det_bps"];

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), Error> {
    let mut cfg = a.cfg.load()?;
    a.run.apply(&mut cfg)?;
    let parameter: SweepParameter = a.param.parse()?;
    let mode = match cfg.mode {
        RunMode::Analytic => SweepMode::Analytic,
        RunMode::MonteCarlo => SweepMode::MonteCarlo { n_symbols: cfg.n_symbols, seed: cfg.seed },
    };
    let rows = sweep(&cfg.protocol, parameter, a.from, a.to, a.steps, mode)?;
    let mut table = OutputTable::new(SWEEP_COLUMNS);
    for r in rows {
        let res = &r.result;
        table.push(vec![
            r.value.into(),
            res.sifted_rate.into(),
            res.qber.into(),
            res.secret_fraction.into(),
            res.skr_total.into(),
            res.skr_per_detector.into(),
        ])?;
    }
    emit(&table, &cfg, out)
}

fn evaluate(cfg: &RunConfig) -> Result<ProtocolResult, Error> {
    match cfg.mode {
        RunMode::Analytic => analytic_rates(&cfg.protocol),
        RunMode::MonteCarlo => simulate_mc(&cfg.protocol, cfg.n_symbols, cfg.seed),
    }
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), Error> {
    let mut cfg = a.cfg.load()?;
    a.run.apply(&mut cfg)?;
    let r = evaluate(&cfg)?;

    let mode = match cfg.mode {
        RunMode::Analytic => "analytic",
        RunMode::MonteCarlo => "mc",
    };
    let mut report = OutputTable::new(["quantity", "value", "unit"]);
    let mut line = |q: &str, v: Cell, u: &str| report.push(vec![q.into(), v, u.into()]);
    line("mode", mode.into(), "")?;
    line("mu at modulator", cfg.protocol.modulator_mu().value().into(), "photons/symbol")?;
    if let Some(c) = r.counts {
        line("seed", cfg.seed.into(), "")?;
        line("symbols", c.symbols.into(), "")?;
        line("clicks", c.clicks.into(), "")?;
        line("double clicks", c.double_clicks.into(), "")?;
        line("sifted", c.sifted.into(), "")?;
        line("errors", c.errors.into(), "")?;
    }
    line("sifted rate", r.sifted_rate.into(), "b/s")?;
    line("QBER", r.qber.into(), "")?;
    line("  optical", r.qber_breakdown.optical.into(), "")?;
    line("  dark counts", r.qber_breakdown.dark.into(), "")?;
    line("secret fraction", r.secret_fraction.into(), "")?;
    line("SKR total", r.skr_total.into(), "b/s")?;
    line("SKR per detector", r.skr_per_detector.into(), "b/s")?;

    match &cfg.output_path {
        Some(path) => {
            out.write_all(report.to_text().as_bytes())?;
            let counts = r.counts.unwrap_or_default();
            let mut row = OutputTable::new([
                "mode",
                "n_symbols",
                "seed",
                "sifted_rate_bps",
                "qber",
                "qber_optical",
                "qber_dark",
                "secret_fraction",
                "skr_bps",
                "skr_per_det_bps",
                "clicks",
                "double_clicks",
                "sifted",
                "errors",
            ]);
            row.push(vec![
                mode.into(),
                counts.symbols.into(),
                cfg.seed.into(),
                r.sifted_rate.into(),
                r.qber.into(),
                r.qber_breakdown.optical.into(),
                r.qber_breakdown.dark.into(),
                r.secret_fraction.into(),
                r.skr_total.into(),
                r.skr_per_detector.into(),
                counts.clicks.into(),
                counts.double_clicks.into(),
                counts.sifted.into(),
                counts.errors.into(),
            ])?;
            std::fs::write(path, row.to_csv())
                .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => out.write_all(report.to_text().as_bytes()).map_err(Error::from),
    }
}

/// Parses a bit rate such as `0.37kb/s`, `1 Mb/s` or `250`.
pub fn parse_rate(text: &str) -> Result<f64, Error> {
    let t = text.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E').unwrap_or(t.len());
    let (number, unit) = t.split_at(split);
    let scale = match unit.trim() {
        "" | "b/s" | "bps" => 1.0,
        "kb/s" | "kbps" => 1e3,
        "Mb/s" | "Mbps" => 1e6,
        "Gb/s" | "Gbps" => 1e9,
        "Tb/s" | "Tbps" => 1e12,
        "Pb/s" | "Pbps" => 1e15,
        other => return Err(Error::Config(format!("unknown rate unit `{other}` in `{text}`"))),
    };
    let value: f64 =
        number.trim().parse().map_err(|_| Error::Config(format!("cannot parse rate `{text}`")))?;
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::Config(format!("rate must be >= 0, got `{text}`")));
    }
    Ok(value * scale)
}

/// Formats a bit rate with an SI prefix, e.g. `740 Gb/s`.
pub fn format_rate(bps: f64) -> String {
    const UNITS: [(f64, &str); 6] =
        [(1e15, "Pb/s"), (1e12, "Tb/s"), (1e9, "Gb/s"), (1e6, "Mb/s"), (1e3, "kb/s"), (1.0, "b/s")];
    let (scale, unit) = UNITS.iter().copied().find(|(s, _)| bps >= *s).unwrap_or((1.0, "b/s"));
    format!("{} {unit}", format_sig(bps / scale, 4))
}

fn cmd_capacity(a: CapacityArgs, out: &mut dyn Write) -> Result<(), Error> {
    let skr = parse_rate(&a.skr)?;
    let mut policy = KeyBudgetPolicy::default();
    if let Some(k) = a.key_bits {
        policy.key_length_bits = k;
    }
    if let Some(c) = a.chunk_bytes {
        policy.chunk_bytes = c;
    }
    let capacity = securable_capacity(skr, &policy)?;
    writeln!(
        out,
        "securable capacity: {} ({} keys/s of {} bits, one per {} bytes)",
        format_rate(capacity),
        format_sig(policy.keys_per_second(skr), 6),
        format_sig(policy.key_length_bits, 6),
        format_sig(policy.chunk_bytes, 6),
    )?;
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs, out: &mut dyn Write) -> Result<(), Error> {
    let cfg = a.cfg.load()?;
    let p = &cfg.protocol;
    if let Some(target) = a.skr_per_det {
        let excess = calibrate_receiver_excess_loss(p, target)?;
        writeln!(out, "receiver.excess_loss_db = {}", format_sig(excess, 10))?;
        return Ok(());
    }
    let target = a.qber.unwrap_or(0.11);
    let linewidth = a.linewidth.unwrap_or(p.filter.passband_nm);
    let scale = calibrate_depol_scale(target, linewidth, p.source.center, &p.fiber, p.encoder.visibility)?;
    writeln!(out, "encoder.depol_scale_nm = {}", format_sig(scale, 10))?;
    Ok(())
}
