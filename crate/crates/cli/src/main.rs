use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use extropy_core::functionals::uniform_grid;
use extropy_core::order::default_odds_grid;
use extropy_core::realdata::{covid_sample, rex_comparison, ComparisonRow, DEFAULT_H, DEFAULT_T};
use extropy_core::study::{run_study, StudyConfig, StudyRow, StudySpec, DEFAULT_REPLICATIONS};
use extropy_core::{
    extropy, extropy_curve, k_record_distribution, order_statistic_distribution, past_extropy,
    preservation_premises, residual_extropy, system_distribution, CurveKind, Distribution,
    IntegrationLimits, KdeModel, PreservationMode, Sample, Signature,
};

#[derive(Parser)]
#[command(
    name = "extropy",
    version,
    about = "Residual and past extropy of lifetime distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate extropy, REX or PEX of a model
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// extropy, rex or pex
        #[arg(long)]
        kind: String,
        #[arg(long)]
        t: Option<f64>,
    },
    /// REX or PEX over a grid, followed by its monotonicity
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        kind: CurveKind,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Check the signature premises for DREX or IPEX preservation
    System {
        /// Comma list, e.g. 0,0,0.25,0.75
        #[arg(long)]
        signature: Signature,
        /// drex or ipex
        #[arg(long)]
        check: PreservationMode,
    },
    /// Survival, hazard and REX of the n-th upper k-record
    Record {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        dist: Distribution,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        /// Defaults to 5 or just inside the end of a bounded support
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Kernel estimate of REX or PEX from data
    Estimate {
        /// rex or pex
        kind: CurveKind,
        /// File with one observation per line (first CSV column)
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        t: f64,
        /// displayed or sample-range
        #[arg(long, default_value = "displayed")]
        limits: IntegrationLimits,
    },
    /// Monte Carlo bias and RMSE of the kernel estimators
    Simulate(SimulateArgs),
    /// REX of the embedded COVID-19 data against its exponential fit
    Realdata {
        /// Comma list of bandwidths
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        /// Comma list of ages
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// exp:RATE, unif:A:B or example1
    #[arg(long)]
    dist: Distribution,
    /// Use the I-th order statistic of N draws, given as I:N
    #[arg(long, conflicts_with = "signature")]
    order: Option<String>,
    /// Use the coherent system with this signature
    #[arg(long)]
    signature: Option<Signature>,
}

impl ModelArgs {
    fn build(&self) -> Result<Distribution> {
        if let Some(spec) = &self.order {
            let (i, n) = spec.split_once(':').context("--order expects I:N")?;
            let i: usize = i.trim().parse().context("--order: bad index I")?;
            let n: usize = n.trim().parse().context("--order: bad sample size N")?;
            return Ok(order_statistic_distribution(&self.dist, i, n)?);
        }
        if let Some(sig) = &self.signature {
            return Ok(system_distribution(&self.dist, sig));
        }
        Ok(self.dist.clone())
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON study file; flags given alongside override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// rex or pex
    #[arg(long)]
    kind: Option<String>,
    /// Truth model, defaults to exp:1 for rex and unif:0:1 for pex
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// displayed or sample-range
    #[arg(long)]
    limits: Option<String>,
}

impl SimulateArgs {
    fn config(self) -> Result<StudyConfig> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                serde_json::from_str::<StudySpec>(&text)
                    .with_context(|| format!("invalid study file {}", path.display()))?
            }
            None => StudySpec::default(),
        };
        if let Some(kind) = self.kind {
            spec.kind = kind;
        }
        if spec.kind.is_empty() {
            bail!("--kind (rex or pex) is required without --config");
        }
        spec.model = self.dist.or(spec.model);
        spec.sample_sizes = self.n.or(spec.sample_sizes);
        spec.t_grid = self.t.or(spec.t_grid);
        spec.bandwidths = self.h.or(spec.bandwidths);
        spec.replications = self
            .reps
            .or(spec.replications)
            .or(Some(DEFAULT_REPLICATIONS));
        spec.seed = self.seed.or(spec.seed);
        spec.limits = self.limits.or(spec.limits);
        Ok(spec.into_config()?)
    }
}

fn eval(model: &ModelArgs, kind: &str, t: Option<f64>) -> Result<String> {
    let d = model.build()?;
    let need_t = || t.context("--t is required for rex and pex");
    let v = match kind.to_ascii_lowercase().as_str() {
        "extropy" => extropy(&d)?,
        "rex" | "residual" => residual_extropy(&d, need_t()?)?,
        "pex" | "past" => past_extropy(&d, need_t()?)?,
        other => bail!("unknown --kind `{other}` (expected extropy, rex or pex)"),
    };
    Ok(format!("{v:.6}\n"))
}

fn scan(model: &ModelArgs, kind: CurveKind, from: f64, to: f64, points: usize) -> Result<String> {
    if to <= from || to.is_nan() || from.is_nan() {
        bail!("--to must exceed --from");
    }
    let d = model.build()?;
    let curve = extropy_curve(&d, kind, &uniform_grid(from, to, points))?;
    let mut out = String::from("t,value\n");
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        writeln!(out, "{t:.6},{v:.6}")?;
    }
    writeln!(out, "classification,{}", curve.classification)?;
    Ok(out)
}

fn record(
    n: usize,
    k: usize,
    dist: &Distribution,
    from: f64,
    to: Option<f64>,
    points: usize,
) -> Result<String> {
    let r = k_record_distribution(dist, n, k)?;
    let hi = dist.support().1;
    let to = to.unwrap_or(if hi.is_finite() {
        from + 0.95 * (hi - from)
    } else {
        5.0
    });
    if to <= from || to.is_nan() || from.is_nan() {
        bail!("--to must exceed --from");
    }
    let curve = extropy_curve(&r, CurveKind::Residual, &uniform_grid(from, to, points))?;
    let mut out = String::from("t,survival,hazard,rex\n");
    for (&t, v) in curve.grid.iter().zip(&curve.values) {
        writeln!(
            out,
            "{t:.6},{:.6},{:.6},{v:.6}",
            r.survival(t),
            r.hazard(t)?
        )?;
    }
    writeln!(out, "classification,{}", curve.classification)?;
    Ok(out)
}

fn estimate(
    kind: CurveKind,
    data: &PathBuf,
    h: f64,
    t: f64,
    limits: IntegrationLimits,
) -> Result<String> {
    let text =
        std::fs::read_to_string(data).with_context(|| format!("cannot read {}", data.display()))?;
    let sample = Sample::parse(&text)?;
    let v = KdeModel::from_sample(&sample, h)?
        .with_limits(limits)
        .estimate(kind, t)?;
    Ok(format!("{v:.6}\n"))
}

fn simulate(args: SimulateArgs) -> Result<String> {
    let cfg = args.config()?;
    let rows = run_study(&cfg)?;
    let mut out = format!("{}\n", StudyRow::CSV_HEADER);
    for row in &rows {
        writeln!(out, "{}", row.csv_line())?;
        if row.flagged() {
            eprintln!(
                "warning: {} n={} t={} h={} dropped {} of {} replications",
                row.kind,
                row.n,
                row.t,
                row.h,
                row.drops,
                row.drops + row.used
            );
        }
    }
    Ok(out)
}

fn realdata(h: Option<Vec<f64>>, t: Option<Vec<f64>>) -> Result<String> {
    let hs = h.unwrap_or_else(|| DEFAULT_H.to_vec());
    let ts = t.unwrap_or_else(|| DEFAULT_T.to_vec());
    let (fit, rows) = rex_comparison(&covid_sample(), &ts, &hs)?;
    let mut out = format!(
        "# rate {:.2} (mle {:.6})\n{}\n",
        fit.reported_rate,
        fit.rate,
        ComparisonRow::CSV_HEADER
    );
    for row in &rows {
        if let Err(e) = &row.estimate {
            eprintln!("warning: t={} h={}: {e}", row.t, row.h);
        }
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(out)
}

fn system(signature: &Signature, check: PreservationMode) -> Result<String> {
    let report = preservation_premises(signature, check, &default_odds_grid())?;
    Ok(format!(
        "ordered={} rational_monotone={}\n",
        report.ordered, report.rational_monotone
    ))
}

fn run(cli: Cli) -> Result<()> {
    let text = match cli.command {
        Command::Eval { model, kind, t } => eval(&model, &kind, t)?,
        Command::Scan {
            model,
            kind,
            from,
            to,
            points,
        } => scan(&model, kind, from, to, points)?,
        Command::System { signature, check } => system(&signature, check)?,
        Command::Record {
            n,
            k,
            dist,
            from,
            to,
            points,
        } => record(n, k, &dist, from, to, points)?,
        Command::Estimate {
            kind,
            data,
            h,
            t,
            limits,
        } => estimate(kind, &data, h, t, limits)?,
        Command::Simulate(args) => simulate(args)?,
        Command::Realdata { h, t } => realdata(h, t)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
