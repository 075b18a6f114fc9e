mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use matsubara::classical::quantum_classical_gap;
use matsubara::dwbc::{recurrence_factor, DwbcInstance};
use matsubara::expectation::{basis_table, z_detform};
use matsubara::model::{format_complex, parse_complex};
use matsubara::spectral::SpectralData;
use matsubara::verify::{self, random_xis, Suite};
use matsubara::{fixtures, ModelParams, OmegaModel, Zeta, C64};
use output::{coeffs, cxs, emit, grid_row, json, Cx, GRID_HEADER};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] matsubara::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "matsubara", version, about = "Spectral data, two-point functions and checks for inhomogeneous Matsubara chains")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named parameter set (`p0`, `p1`); overrides the config's fixture.
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer-matrix and Q polynomial coefficients at κ and κ+α.
    Spectrum,
    /// ω(ζ, ξ) at one point or as a CSV grid.
    Omega(OmegaArgs),
    /// ρ(ζ) = T(ζ, κ+α) / T(ζ, κ).
    Rho {
        #[arg(long = "zeta2", required = true, value_parser = complex)]
        points: Vec<C64>,
    },
    /// Taylor coefficients of 2ρ and of ω around ζ² = ξ² = 1.
    BasisTable {
        #[arg(long)]
        pmax: usize,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Determinant formula for lists of ζ² values.
    Expectation {
        #[arg(long, value_delimiter = ',', value_parser = complex)]
        zeros: Vec<C64>,
        #[arg(long, value_delimiter = ',', value_parser = complex)]
        plus: Vec<C64>,
        #[arg(long, value_delimiter = ',', value_parser = complex)]
        minus: Vec<C64>,
    },
    /// Domain-wall partition function and its determinant form.
    Dwbc {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', value_parser = complex)]
        tau: Vec<C64>,
        #[arg(long, value_delimiter = ',', value_parser = complex)]
        xi: Vec<C64>,
    },
    /// Quantum to classical gaps along a ν ladder.
    Classical {
        #[arg(long, value_delimiter = ',')]
        nu_ladder: Vec<f64>,
    },
    /// Runs a verification suite and emits a JSON report.
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Debug, Args)]
struct OmegaArgs {
    #[arg(long, value_parser = complex, required_unless_present = "grid")]
    zeta2: Option<C64>,
    #[arg(long, value_parser = complex, required_unless_present = "grid")]
    xi2: Option<C64>,
    /// Emit CSV over the rectangles spanned by the corner flags.
    #[arg(long)]
    grid: bool,
    #[arg(long, value_parser = complex, default_value = "0.3-0.8i")]
    zeta2_from: C64,
    #[arg(long, value_parser = complex, default_value = "1.8+0.8i")]
    zeta2_to: C64,
    #[arg(long, value_parser = complex, default_value = "-1.5-1i")]
    xi2_from: C64,
    #[arg(long, value_parser = complex, default_value = "-0.5+1i")]
    xi2_to: C64,
    /// Points per axis of each rectangle.
    #[arg(long, default_value_t = 5)]
    steps: usize,
}

fn complex(s: &str) -> Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

const DEFAULT_RADIUS: f64 = 0.1;

struct Context {
    config: RunConfig,
    output: Option<PathBuf>,
}

impl Context {
    fn configured_model(&self) -> Result<Option<(String, ModelParams)>, CliError> {
        self.config.model()
    }

    /// The configured model, or P0.
    fn model(&self) -> Result<(String, ModelParams), CliError> {
        Ok(self.configured_model()?.unwrap_or_else(|| ("P0".into(), fixtures::p0())))
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        Ok(emit(self.output.as_deref(), text)?)
    }
}

#[derive(Serialize)]
struct TwistSpectrum {
    lambda: Cx,
    eigenvalue: Cx,
    gap_ratio: f64,
    transfer: Vec<Cx>,
    q_twist: Cx,
    q_plus: Vec<Cx>,
    q_minus: Vec<Cx>,
}

#[derive(Serialize)]
struct SpectrumReport {
    model: String,
    twists: Vec<TwistSpectrum>,
}

#[derive(Serialize)]
struct DwbcReport {
    n: usize,
    tau: Vec<Cx>,
    xi: Vec<Cx>,
    partition: Cx,
    determinant_form: Cx,
    ratio: Cx,
    recurrence_factor: Cx,
    origin_integrals: Vec<Cx>,
    infinity_integrals: Vec<Cx>,
}

fn spectrum(ctx: &Context) -> Result<ExitCode, CliError> {
    let (label, p) = ctx.model()?;
    let mut twists = Vec::new();
    for lambda in [p.kappa, p.kappa + p.alpha] {
        let s = SpectralData::compute(&p, lambda)?;
        twists.push(TwistSpectrum {
            lambda: Cx(lambda),
            eigenvalue: Cx(s.eigen.value),
            gap_ratio: s.eigen.gap_ratio,
            transfer: coeffs(&s.t_poly),
            q_twist: Cx(s.gamma),
            q_plus: coeffs(&s.plus),
            q_minus: coeffs(&s.minus),
        });
    }
    ctx.emit(&json(&SpectrumReport { model: label, twists })?)?;
    Ok(ExitCode::SUCCESS)
}

/// `steps × steps` points on the rectangle with corners `from` and `to`.
fn rectangle(from: C64, to: C64, steps: usize) -> Vec<C64> {
    let t = |k: usize| if steps == 1 { 0.0 } else { k as f64 / (steps - 1) as f64 };
    let mut out = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for r in 0..steps {
            out.push(C64::new(
                from.re + (to.re - from.re) * t(r),
                from.im + (to.im - from.im) * t(i),
            ));
        }
    }
    out
}

fn omega(ctx: &Context, args: &OmegaArgs) -> Result<ExitCode, CliError> {
    let (_, p) = ctx.model()?;
    let m = OmegaModel::new(&p)?;
    if !args.grid {
        let (z2, w2) = (args.zeta2.expect("required by clap"), args.xi2.expect("required by clap"));
        let v = m.omega(Zeta::from_z2(z2), Zeta::from_z2(w2))?;
        ctx.emit(&format!("{}\n", format_complex(v)))?;
        return Ok(ExitCode::SUCCESS);
    }
    if args.steps == 0 {
        return Err(CliError::Config("steps must be positive".into()));
    }
    let mut csv = String::from(GRID_HEADER);
    csv.push('\n');
    for z2 in rectangle(args.zeta2_from, args.zeta2_to, args.steps) {
        for w2 in rectangle(args.xi2_from, args.xi2_to, args.steps) {
            let v = m.omega(Zeta::from_z2(z2), Zeta::from_z2(w2)).ok();
            csv.push_str(&grid_row(z2, w2, v));
            csv.push('\n');
        }
    }
    ctx.emit(&csv)?;
    Ok(ExitCode::SUCCESS)
}

fn rho(ctx: &Context, points: &[C64]) -> Result<ExitCode, CliError> {
    let (_, p) = ctx.model()?;
    let m = OmegaModel::new(&p)?;
    let mut out = String::new();
    for &z2 in points {
        out.push_str(&format!("{}\n", format_complex(m.rho(z2)?)));
    }
    ctx.emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn table(ctx: &Context, pmax: usize, radius: Option<f64>) -> Result<ExitCode, CliError> {
    let (_, p) = ctx.model()?;
    let m = OmegaModel::new(&p)?;
    let radius = radius.or(ctx.config.radius).unwrap_or(DEFAULT_RADIUS);
    ctx.emit(&json(&basis_table(&m, pmax, radius)?)?)?;
    Ok(ExitCode::SUCCESS)
}

fn expectation(ctx: &Context, zeros: &[C64], plus: &[C64], minus: &[C64]) -> Result<ExitCode, CliError> {
    let (_, p) = ctx.model()?;
    let m = OmegaModel::new(&p)?;
    let z = |v: &[C64]| v.iter().map(|&x| Zeta::from_z2(x)).collect::<Vec<_>>();
    let value = z_detform(&m, &z(zeros), &z(plus), &z(minus))?;
    ctx.emit(&format!("{}\n", format_complex(value)))?;
    Ok(ExitCode::SUCCESS)
}

fn dwbc(ctx: &Context, n: usize, tau: &[C64], xi: &[C64]) -> Result<ExitCode, CliError> {
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let taus = if tau.is_empty() {
        if n > 3 {
            return Err(CliError::Config("default τ values exist for n ≤ 3; pass --tau".into()));
        }
        fixtures::dwbc_taus(n)
    } else {
        tau.to_vec()
    };
    let xis = if xi.is_empty() {
        random_xis(n, ctx.config.seed.unwrap_or(0))
    } else {
        xi.to_vec()
    };
    if taus.len() != n || xis.len() != n {
        return Err(CliError::Config(format!(
            "--n {n} needs {n} τ and {n} ξ values, got {} and {}",
            taus.len(),
            xis.len()
        )));
    }
    let ln_q = fixtures::Q_STANDARD.ln();
    let inst = DwbcInstance::new(ln_q, &taus, &xis)?;
    let partition = inst.partition()?;
    let det = inst.determinant_form()?;
    let (origin, infinity) = inst.contour_integrals()?;
    let report = DwbcReport {
        n,
        tau: cxs(&taus),
        xi: cxs(&xis),
        partition: Cx(partition),
        determinant_form: Cx(det),
        ratio: Cx(det / partition),
        recurrence_factor: Cx(recurrence_factor(ln_q, &taus, &xis)),
        origin_integrals: cxs(&origin),
        infinity_integrals: cxs(&infinity),
    };
    ctx.emit(&json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn classical(ctx: &Context, ladder: &[f64]) -> Result<ExitCode, CliError> {
    let mut fixture = fixtures::c0();
    if !ladder.is_empty() {
        fixture.nu_ladder = ladder.to_vec();
    } else if let Some(l) = &ctx.config.nu_ladder {
        fixture.nu_ladder = l.clone();
    }
    if fixture.nu_ladder.iter().any(|&nu| nu.is_nan() || nu <= 0.0) {
        return Err(CliError::Config("ν values must be positive".into()));
    }
    ctx.emit(&json(&quantum_classical_gap(&fixture)?)?)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(ctx: &Context, suite: Option<&str>) -> Result<ExitCode, CliError> {
    let name = suite.or(ctx.config.suite.as_deref()).unwrap_or("all");
    let suite: Suite = name.parse()?;
    let models = match ctx.configured_model()? {
        Some(m) => vec![m],
        None => verify::default_models(),
    };
    let report = verify::run(suite, &models)?;
    ctx.emit(&json(&report)?)?;
    if report.passed() {
        return Ok(ExitCode::SUCCESS);
    }
    for c in report.failures() {
        eprintln!(
            "FAIL {}: {} residual {:e} exceeds {:e}",
            c.name, c.equation, c.residual, c.tolerance
        );
    }
    Ok(ExitCode::from(1))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.fixture.is_some() {
        config.fixture = cli.fixture.clone();
    }
    let output = cli.output.clone().or_else(|| config.output.clone());
    let ctx = Context { config, output };
    match &cli.command {
        Command::Spectrum => spectrum(&ctx),
        Command::Omega(args) => omega(&ctx, args),
        Command::Rho { points } => rho(&ctx, points),
        Command::BasisTable { pmax, radius } => table(&ctx, *pmax, *radius),
        Command::Expectation { zeros, plus, minus } => expectation(&ctx, zeros, plus, minus),
        Command::Dwbc { n, tau, xi } => dwbc(&ctx, *n, tau, xi),
        Command::Classical { nu_ladder } => classical(&ctx, nu_ladder),
        Command::Verify { suite } => verify(&ctx, suite.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
