use clap::{Args, Parser, Subcommand, ValueEnum};
use hbspace::diagnostics::{
    equals_hardy_report, inclusion_report, HardyVerdict, InclusionParams, Verdict,
};
use hbspace::factorization::{factor_symbol, outerness_certificate};
use hbspace::grid::required_grid;
use hbspace::hb::{hb_norm, kappa_series, mate_residual, monomial_norm, szego_kernel_norm};
use hbspace::json::SeriesJson;
use hbspace::models::{model_to_json, ModelSpec, Provenance};
use hbspace::parse::parse_polynomial;
use hbspace::series::TaylorSeries;
use hbspace::{Complex, Config, HbError, Model, Result};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Window of the mate identity check reported by `norm`.
const MATE_WINDOW: usize = 128;

#[derive(Parser)]
#[command(
    name = "hbspace",
    version,
    about = "Norms and diagnostics in de Branges–Rovnyak spaces H(B)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model and report its outer mates with residuals and outerness gaps.
    Factorize(Common),
    /// Norm of one function in H(B).
    Norm(NormArgs),
    /// Closed-form and series values side by side, one row per index.
    Scan(ScanArgs),
    /// Inclusion of H∞ and equality with H².
    Check(Common),
    /// Write the model file.
    ExportModel(Common),
}

#[derive(Args)]
struct Common {
    /// `zero:n=2`, `example-omega:u=z`, `rational:z/2;1/2` or `file:model.json`.
    #[arg(long)]
    model: String,
    /// Truncation degree.
    #[arg(long, env = "HB_DEFAULT_DEGREE", default_value_t = 256)]
    degree: usize,
    /// Boundary grid size; defaults to the smallest admissible power of two.
    #[arg(long)]
    grid: Option<usize>,
    /// Factorization residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for norm identities; scan rows above it raise a warning.
    #[arg(long)]
    norm_tol: Option<f64>,
    /// Relative agreement for the doubling oracle.
    #[arg(long)]
    oracle_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    common: Common,
    /// Polynomial such as `1+z`, `z^3` or `(1+2i)z^2 - 0.5`.
    #[arg(long, conflicts_with = "f_file", required_unless_present = "f_file")]
    f: Option<String>,
    /// Coefficient file with `coeffs` and an optional `decay_hint`.
    #[arg(long)]
    f_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanKind {
    /// `‖z^m‖²` for `m = 0..count`.
    Monomial,
    /// `‖κ_λ‖²` on a polar grid of points `λ`.
    Kernel,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    what: ScanKind,
    /// Number of monomials.
    #[arg(long, default_value_t = 11)]
    count: usize,
    /// Kernel scan radii `0.9 j / rings`, `j = 1..rings`, plus the origin.
    #[arg(long, default_value_t = 4)]
    rings: usize,
    #[arg(long, default_value_t = 8)]
    angles: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut cfg = Config::default()
            .with_degree(self.degree)
            .with_grid(self.grid.unwrap_or(required_grid(self.degree)));
        if let Some(t) = self.tol {
            cfg.factor_tol = t;
        }
        if let Some(t) = self.norm_tol {
            cfg.norm_tol = t;
        }
        if let Some(t) = self.oracle_tol {
            cfg.oracle_tol = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn build(&self, cfg: &Config) -> Result<Model> {
        ModelSpec::parse(&self.model)?.build(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_value(&self, value: &Value) -> Result<()> {
        let text = match self.format {
            Format::Json => serde_json::to_string_pretty(value)? + "\n",
            Format::Csv => {
                let mut rows = Vec::new();
                flatten("", value, &mut rows);
                let mut out = String::from("key,value\n");
                for (k, v) in rows {
                    out.push_str(&format!("{k},{v}\n"));
                }
                out
            }
        };
        self.emit(&text)
    }
}

/// Dotted-path leaves of a JSON document, in key order.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn factorize(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let model = args.build(&cfg)?;
    let mut doc: Value = serde_json::from_str(&model_to_json(&model)?)?;
    let (residuals, gap_scalar, gap_matrix, trace) = if model.provenance == Provenance::Factored {
        let result = factor_symbol(&model.row, &cfg)?;
        (
            result.residuals,
            result.outer_gap_scalar,
            result.outer_gap_matrix,
            Some(result.trace),
        )
    } else {
        let gap_scalar = outerness_certificate(&model.scalar_mate.to_matrix_series(), cfg.grid)?;
        (
            model.residuals(&cfg)?,
            gap_scalar,
            outerness_certificate(&model.matrix_mate, cfg.grid)?,
            None,
        )
    };
    if residuals.max() > cfg.factor_tol {
        eprintln!(
            "warning: residual {:.3e} exceeds tolerance {:.1e}",
            residuals.max(),
            cfg.factor_tol
        );
    }
    let extra = json!({
        "residuals": residuals,
        "outer_gap_scalar": gap_scalar,
        "outer_gap_matrix": gap_matrix,
        "trace": trace,
        "degree": cfg.degree,
        "grid": cfg.grid,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    args.emit_value(&doc)
}

fn norm(args: &NormArgs) -> Result<()> {
    let common = &args.common;
    let cfg = common.config()?;
    let model = common.build(&cfg)?;
    let f: TaylorSeries<f64> = match (&args.f, &args.f_file) {
        (Some(text), _) => parse_polynomial(text)?,
        (None, Some(path)) => {
            serde_json::from_str::<SeriesJson>(&std::fs::read_to_string(path)?)?.to_taylor()?
        }
        (None, None) => {
            return Err(HbError::Invalid(
                "one of --f or --f-file is required".into(),
            ))
        }
    };
    let report = hb_norm(&f, &model.phi)?;
    let residual = if f.is_polynomial() {
        Some(mate_residual(
            &f,
            &report.mate,
            &model.row.row_series(),
            &model.matrix_mate,
            MATE_WINDOW,
        )?)
    } else {
        None
    };
    common.emit_value(&json!({
        "model": common.model,
        "norm_sq": report.norm_sq,
        "hardy_norm_sq": report.hardy_norm_sq,
        "tail_budget": report.tail_budget,
        "truncation": [report.truncation.0, report.truncation.1],
        "mate": SeriesJson::from_matrix_series(&report.mate),
        "mate_residual": residual,
        "mate_window": MATE_WINDOW,
    }))
}

/// Shortest round-trip representation, as in the JSON output.
fn number(x: f64) -> String {
    Value::from(x).to_string()
}

struct ScanRow {
    index: usize,
    point: Option<Complex>,
    closed_form: f64,
    series: f64,
}

impl ScanRow {
    fn difference(&self) -> f64 {
        (self.closed_form - self.series).abs()
    }
}

fn scan(args: &ScanArgs) -> Result<()> {
    let common = &args.common;
    let cfg = common.config()?;
    let model = common.build(&cfg)?;
    let rows: Vec<ScanRow> = match args.what {
        ScanKind::Monomial => (0..args.count)
            .map(|m| {
                Ok(ScanRow {
                    index: m,
                    point: None,
                    closed_form: monomial_norm(m, &model.phi)?,
                    series: hb_norm(&TaylorSeries::monomial(m), &model.phi)?.norm_sq,
                })
            })
            .collect::<Result<_>>()?,
        ScanKind::Kernel => {
            let mut points = vec![Complex::new(0.0, 0.0)];
            for j in 1..=args.rings {
                let r = 0.9 * j as f64 / args.rings as f64;
                for l in 0..args.angles {
                    points.push(Complex::from_polar(
                        r,
                        std::f64::consts::TAU * l as f64 / args.angles as f64,
                    ));
                }
            }
            let degree = model.phi.degree();
            points
                .into_iter()
                .enumerate()
                .map(|(index, lambda)| {
                    Ok(ScanRow {
                        index,
                        point: Some(lambda),
                        closed_form: szego_kernel_norm(lambda, &model.row, &model.matrix_mate)?,
                        series: hb_norm(&kappa_series(lambda, degree)?, &model.phi)?.norm_sq,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let worst = rows
        .iter()
        .map(|r| r.difference() / r.closed_form.abs().max(1.0))
        .fold(0.0, f64::max);
    if worst > cfg.norm_tol {
        eprintln!(
            "warning: paths differ by {worst:.3e} (relative), above {:.1e}",
            cfg.norm_tol
        );
    }
    match common.format {
        Format::Csv => {
            let mut out = String::new();
            let kernel = matches!(args.what, ScanKind::Kernel);
            out.push_str(if kernel {
                "index,lambda_re,lambda_im,closed_form,series,difference\n"
            } else {
                "index,closed_form,series,difference\n"
            });
            for r in &rows {
                let point = r.point.map_or(String::new(), |p| {
                    format!("{},{},", number(p.re), number(p.im))
                });
                out.push_str(&format!(
                    "{},{point}{},{},{}\n",
                    r.index,
                    number(r.closed_form),
                    number(r.series),
                    number(r.difference())
                ));
            }
            common.emit(&out)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "index": r.index,
                        "lambda": r.point.map(|p| [p.re, p.im]),
                        "closed_form": r.closed_form,
                        "series": r.series,
                        "difference": r.difference(),
                    })
                })
                .collect();
            common.emit_value(&json!({ "model": common.model, "rows": rows }))
        }
    }
}

/// Returns whether the verdicts were inconsistent.
fn check(args: &Common) -> Result<bool> {
    let cfg = args.config()?;
    let model = args.build(&cfg)?;
    let params = InclusionParams::from(&cfg);
    let inclusion = inclusion_report(&model.row, &model.scalar_mate, &model.phi, &params)?;
    let hardy = equals_hardy_report(&model.row, &model.scalar_mate, &model.phi, &params)?;
    let inconclusive = inclusion.inconclusive || hardy.inconclusive;
    if inconclusive {
        eprintln!("warning: at least one criterion was inconclusive");
    }
    eprintln!(
        "inclusion: {}; equals H2: {} (1 - sup|B| = {:.3e})",
        serde_json::to_value(inclusion.verdict)?
            .as_str()
            .unwrap_or_default(),
        serde_json::to_value(hardy.verdict)?
            .as_str()
            .unwrap_or_default(),
        hardy.margin
    );
    args.emit_value(&json!({
        "model": args.model,
        "inclusion": inclusion,
        "equals_hardy": hardy,
        "inconclusive": inconclusive,
    }))?;
    Ok(inclusion.verdict == Verdict::Inconsistent || hardy.verdict == HardyVerdict::Inconsistent)
}

fn export_model(args: &Common) -> Result<()> {
    if args.format == Format::Csv {
        return Err(HbError::Invalid("models are exported as JSON only".into()));
    }
    let cfg = args.config()?;
    let model = args.build(&cfg)?;
    args.emit(&(model_to_json(&model)? + "\n"))
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Factorize(a) => factorize(a)?,
        Command::Norm(a) => norm(a)?,
        Command::Scan(a) => scan(a)?,
        Command::Check(a) => {
            if check(a)? {
                eprintln!("error: the criteria disagree");
                return Ok(ExitCode::from(3));
            }
        }
        Command::ExportModel(a) => export_model(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
