use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cesaro_core::fractional::{
    compare_methods, frac_cesaro_matrix, resolvent_power_matrix, semigroup_property_residual, square_root_matrix,
    FracPowerSpec, Method,
};
use cesaro_core::hardy::{cesaro_adjoint_matrix, cesaro_matrix};
use cesaro_core::invariant::{
    blaschke_certificate, build_line_subspace, chain_residual, classify_subspace, kernel_fit_residual,
    model_space_kernel_basis, non_unicellularity_certificate, nonstandard_subspace_certificate,
    shift_reconstruction_residual, twisted_laplace, verify_cesaro_coinvariance, Classification, ClassifierGrid,
    CoinvarianceOptions, DiscSubspace, ShiftSubspace, SpectralData,
};
use cesaro_core::line::{
    domar_nonstandard_indicator, domar_rigidity_check, figure1_data, muntz_ratio_table, verify_halfline_equivalence,
    verify_intertwining, write_figure1_csv, Evaluable, WeightFn,
};
use cesaro_core::matrix_io;
use cesaro_core::quadrature::{laplace_resolvent_entries, AdaptiveOptions, KernelRule, RuleKind};
use cesaro_core::report::{Certificate, Check};
use cesaro_core::semigroup::{
    adjoint_composition_matrix, cogenerator_matrix, composition_matrix, generator_matrix, identity_residuals,
    norm_convergence_curve, resolvent_t_matrix, PowerIteration,
};
use cesaro_core::{Complex64, OperatorMatrix};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Truncated-matrix and exact-evaluation checks for the Cesàro operator.
#[derive(Parser)]
#[command(name = "cesaro", version)]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a truncated operator matrix.
    Matrix(MatrixArgs),
    /// Run a residual check and emit its report.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Weight data.
    #[command(subcommand)]
    Weight(WeightCommand),
    /// Invariant-subspace demonstrations.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Cesaro,
    Adjoint,
    Comp,
    CompAdjoint,
    Generator,
    Resolvent,
    Cogenerator,
    Frac,
    Sqrt,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Direct,
    Integral,
    Extended,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(value_enum)]
    kind: MatrixKind,
    /// Truncation order; the matrix is (N+1)×(N+1).
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Semigroup time for `comp` and `comp-adjoint`.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Exponent for `frac`, as "a+bi".
    #[arg(long, default_value = "0.5")]
    beta: Complex64,
    /// Resolvent shift for `frac` and `sqrt`, as "a+bi".
    #[arg(long, default_value = "1")]
    lambda: Complex64,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Mantissa bits for `--method extended`.
    #[arg(long, default_value_t = 256)]
    bits: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Generator, resolvent, cogenerator and adjoint identities.
    Identities {
        #[arg(long, default_value_t = 128)]
        n: usize,
    },
    /// Fractional powers: β = 1, square root, semigroup law, method agreement.
    Fractional {
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Largest i - j compared between the direct sum and the integral.
        #[arg(long, default_value_t = 24)]
        max_offset: usize,
    },
    /// Pointwise W σ_t W⁻¹ = S_t and T⁻¹ V_t T = e^(-t/2) σ_t.
    Intertwining {
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exponential-monomial spans on the line and eigenvector chains on the disc.
    ShiftInvariance {
        /// Line-model spectral point, as "a+bi".
        #[arg(long, default_value = "1+1i")]
        lambda: Complex64,
        /// Disc-model eigenvalue, as "a+bi".
        #[arg(long, default_value = "0.3")]
        gamma: Complex64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        band: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// σ_max of compressions against e^(t/2).
    Norm {
        /// Times, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
        t: Vec<f64>,
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Required fraction of e^(t/2) at the largest order.
        #[arg(long, default_value_t = 0.8)]
        floor: f64,
    },
}

#[derive(Subcommand)]
enum WeightCommand {
    /// CSV samples of w(y) = exp(-2(e^y - 1)).
    Plot {
        #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Non-standardness indicator log w(y)/y and the rigidity conditions.
    Domar {
        /// Most negative y of the indicator grid.
        #[arg(long, default_value_t = -200.0, allow_hyphen_values = true)]
        depth: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Two incomparable shift-invariant subspaces.
    NonUnicellular {
        #[arg(long, default_value = "1")]
        lambda1: Complex64,
        #[arg(long, default_value = "2")]
        lambda2: Complex64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Left-half-line share of ‖e^(n² y)‖.
    Muntz {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// The window-plus-tail subspace and its twisted Laplace transform.
    NonstandardSubspace {
        #[arg(long, default_value = "1+0.5i")]
        lambda: Complex64,
        /// Cut point T.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        cut: f64,
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Blaschke product and model-space kernels for a finite zero set.
    ModelSpace {
        /// Zeros as "a+bi" or "a+bi:multiplicity"; repeatable.
        #[arg(long = "zero", default_values_t = ["1+2i:2".to_string(), "0.5".to_string()])]
        zeros: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Seeded uniform probe sets.
struct Probes(ChaCha8Rng);

impl Probes {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn uniform(&mut self, count: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..count).map(|_| self.0.gen_range(lo..hi)).collect()
    }
}

enum Output {
    Text(String),
    Report(Certificate),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli.command) {
        Ok(output) => {
            let (text, pass) = match output {
                Output::Text(t) => (t, true),
                Output::Report(c) => {
                    if let Some(seed) = c.seed {
                        eprintln!("seed = {seed}");
                    }
                    let pass = c.pass();
                    (c.to_json() + "\n", pass)
                }
            };
            if let Err(e) = emit(&text, out.as_ref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let usage = matches!(
                e.downcast_ref::<cesaro_core::Error>(),
                Some(cesaro_core::Error::InvalidParameter(_) | cesaro_core::Error::NegativeTime(_))
            );
            eprintln!("error: {e:#}");
            if usage {
                return ExitCode::from(2);
            }
            let mut report = Certificate::new("run");
            report.push(Check::at_most("completed", 1.0, 0.0));
            report.note(format!("{e:#}"));
            let _ = emit(&(report.to_json() + "\n"), out.as_ref());
            ExitCode::from(1)
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    cesaro_core::Error::InvalidParameter(msg.into()).into()
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::Matrix(args) => matrix(args),
        Command::Check(c) => check(c).map(Output::Report),
        Command::Weight(w) => weight(w),
        Command::Demo(d) => demo(d),
    }
}

fn matrix(args: MatrixArgs) -> Result<Output> {
    let n = args.n;
    let m: OperatorMatrix = match args.kind {
        MatrixKind::Cesaro => cesaro_matrix(n),
        MatrixKind::Adjoint => cesaro_adjoint_matrix(n),
        MatrixKind::Comp => composition_matrix(args.t, n)?,
        MatrixKind::CompAdjoint => adjoint_composition_matrix(args.t, n)?,
        MatrixKind::Generator => generator_matrix(n),
        MatrixKind::Resolvent => resolvent_t_matrix(n),
        MatrixKind::Cogenerator => cogenerator_matrix(n),
        MatrixKind::Frac => {
            let method = match args.method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Direct => Method::DirectSum,
                MethodArg::Integral => Method::Integral,
                MethodArg::Extended => Method::ExtendedPrecision { bits: args.bits },
            };
            let spec = FracPowerSpec::new(args.beta, n)
                .with_lambda(args.lambda)
                .with_method(method)
                .with_tolerance(args.tolerance);
            if args.lambda == Complex64::new(1.0, 0.0) {
                frac_cesaro_matrix(&spec)?
            } else {
                resolvent_power_matrix(&spec)?
            }
        }
        MatrixKind::Sqrt => {
            if !(args.lambda.re > 0.5) {
                return Err(invalid(format!("Re λ must exceed 1/2, got {}", args.lambda)));
            }
            square_root_matrix(args.lambda, n, AdaptiveOptions::default())?
        }
    };
    Ok(Output::Text(match args.format {
        Format::Json => matrix_io::to_json(&m)? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            matrix_io::write_csv(&m, &mut buf)?;
            String::from_utf8(buf)?
        }
    }))
}

fn check(command: CheckCommand) -> Result<Certificate> {
    match command {
        CheckCommand::Identities { n } => check_identities(n),
        CheckCommand::Fractional { n, max_offset } => check_fractional(n, max_offset),
        CheckCommand::Intertwining { probes, seed } => check_intertwining(probes, seed),
        CheckCommand::ShiftInvariance {
            lambda,
            gamma,
            n,
            band,
            seed,
        } => check_shift_invariance(lambda, gamma, n, band, seed),
        CheckCommand::Norm { t, n, floor } => check_norm(&t, n, floor),
    }
}

fn check_identities(n: usize) -> Result<Certificate> {
    let r = identity_residuals(n);
    let mut cert = Certificate::new(format!("generator identities, N = {n}"));
    cert.push(Check::at_most("(A-I)T - I", r.resolvent_left, 1e-12));
    cert.push(Check::at_most("T(A-I) - I", r.resolvent_right, 1e-12));
    cert.push(Check::at_most("V - (I+2T)", r.cogenerator_definition, 1e-12));
    cert.push(Check::at_most("(V-I) + 2C*", r.cogenerator_vs_cesaro_adjoint, 1e-12));
    let rule = KernelRule::new(RuleKind::GaussLaguerre, 64, 1e-8);
    let mut worst: f64 = 0.0;
    for (row, entries) in laplace_resolvent_entries(32, rule)?.iter().enumerate() {
        for e in entries {
            worst = worst.max((e.value - 1.0 / (row as f64 + 1.0)).norm());
        }
    }
    cert.push(Check::at_most("laplace_resolvent_entry - 1/(n+1), n <= 32", worst, 1e-8));
    for t in [0.1, 1.0, 5.0] {
        let d = adjoint_composition_matrix(t, n.min(64))?.max_abs_diff(&composition_matrix(t, n.min(64))?.adjoint())?;
        cert.push(Check::at_most(format!("adjoint formula (t={t})"), d, 1e-13));
    }
    Ok(cert)
}

fn check_fractional(n: usize, max_offset: usize) -> Result<Certificate> {
    let mut cert = Certificate::new(format!("fractional powers, N = {n}"));
    let integral = |b: f64| FracPowerSpec::real(b, n).with_method(Method::Integral);
    let m1 = frac_cesaro_matrix(&integral(1.0))?;
    cert.push(Check::at_most("C^1 - C", m1.max_abs_diff(&cesaro_matrix(n))?, 1e-10));
    let half = frac_cesaro_matrix(&integral(0.5))?;
    let sq = cesaro_core::hardy::matmul(&half, &half)?;
    cert.push(Check::at_most("M_1/2 M_1/2 - M_1", sq.max_abs_diff(&m1)?, 1e-9));
    let grid = [1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 1.5];
    let mut worst: f64 = 0.0;
    for &a in &grid {
        for &b in &grid {
            worst = worst.max(semigroup_property_residual(Complex64::new(a, 0.0), Complex64::new(b, 0.0), n)?);
        }
    }
    cert.push(Check::at_most("semigroup law on the β grid", worst, 1e-8));
    let spec = FracPowerSpec::real(0.5, n);
    let direct = compare_methods(&spec, Method::DirectSum, Method::Integral, max_offset)?;
    cert.push(Check::at_most(
        format!("direct sum vs integral, i-j <= {max_offset}"),
        direct.max_abs_diff,
        1e-8,
    ));
    cert.note(format!("largest direct-sum discrepancy at entry {:?}", direct.worst));
    let ext = compare_methods(&spec, Method::ExtendedPrecision { bits: 256 }, Method::Integral, max_offset)?;
    cert.push(Check::at_most(
        format!("256-bit alternating sum vs integral, i-j <= {max_offset}"),
        ext.max_abs_diff,
        1e-8,
    ));
    Ok(cert)
}

fn intertwining_functions() -> Vec<(String, Evaluable)> {
    let mut fs = Vec::new();
    for lambda in [Complex64::new(1.0, 1.0), Complex64::new(0.5, 0.0), Complex64::new(2.0, -1.0)] {
        for k in 0..=2 {
            fs.push((format!("y^{k} e^(({lambda}) y)"), Evaluable::exp_monomial(lambda, k)));
        }
    }
    fs.push(("window [0,1)".into(), Evaluable::indicator(0.0, 1.0)));
    fs.push(("window [-3,-1)".into(), Evaluable::indicator(-3.0, -1.0)));
    fs
}

fn check_intertwining(count: usize, seed: u64) -> Result<Certificate> {
    let probes = Probes::new(seed).uniform(count, -10.0, 5.0);
    let mut cert = Certificate::new("W σ_t W^-1 = S_t on L2(R, w)").with_seed(seed);
    let fs = intertwining_functions();
    for t in [0.1, 1.0, 3.0] {
        let mut worst: f64 = 0.0;
        for (_, f) in &fs {
            worst = worst.max(verify_intertwining(t, f, &probes)?.max_relative);
        }
        cert.push(Check::at_most(format!("intertwining (t={t})"), worst, 1e-12));
        let mut worst: f64 = 0.0;
        for (_, f) in fs.iter().take(9) {
            worst = worst.max(verify_halfline_equivalence(t, f, &probes)?.max_relative);
        }
        cert.push(Check::at_most(format!("T^-1 V_t T = e^(-t/2) σ_t (t={t})"), worst, 1e-12));
    }
    Ok(cert)
}

fn check_shift_invariance(lambda: Complex64, gamma: Complex64, n: usize, band: usize, seed: u64) -> Result<Certificate> {
    let probes = Probes::new(seed).uniform(400, -10.0, 5.0);
    let mut cert = Certificate::new(format!("line span at {lambda}, disc chain at γ = {gamma}")).with_seed(seed);
    let mut worst: f64 = 0.0;
    for k in 0..=4 {
        for t in [0.0, 0.1, 1.0, 2.5, 5.0] {
            worst = worst.max(shift_reconstruction_residual(lambda, k, t, &probes)?);
        }
    }
    cert.push(Check::at_most("shift expansion, k <= 4, t <= 5", worst, 1e-12));
    let line = build_line_subspace(&SpectralData::single(lambda, 2)?, AdaptiveOptions::default())?;
    cert.extend(line.certificate(&[0.1, 1.0, 3.0], &probes)?);
    let mut chain: f64 = 0.0;
    for k in 0..=4 {
        chain = chain.max(chain_residual(gamma, k, n)?);
    }
    cert.push(Check::at_most("(A-γ)g_k = k g_(k-1), k <= 4", chain, 1e-13));
    let disc = DiscSubspace::new(&[(gamma, 1)], n)?;
    let opts = CoinvarianceOptions {
        band,
        seed,
        ..CoinvarianceOptions::default()
    };
    cert.extend(verify_cesaro_coinvariance(&disc, opts)?);
    Ok(cert)
}

fn check_norm(times: &[f64], n: usize, floor: f64) -> Result<Certificate> {
    let mut cert = Certificate::new(format!("compressions of C_φt up to N = {n}"));
    let mut orders: Vec<usize> = (3..).map(|p| 1usize << p).take_while(|&o| o < n).collect();
    orders.push(n);
    for &t in times {
        if !(t >= 0.0) {
            return Err(cesaro_core::Error::NegativeTime(t).into());
        }
        let bound = (t / 2.0).exp();
        let curve = norm_convergence_curve(t, &orders, PowerIteration::default())?;
        let excess = curve.iter().map(|&(_, s)| s / bound - 1.0).fold(f64::NEG_INFINITY, f64::max);
        cert.push(Check::at_most(format!("σ_max / e^(t/2) - 1 (t={t})"), excess, 1e-8));
        let drop = curve.windows(2).map(|p| p[0].1 - p[1].1).fold(0.0, f64::max);
        cert.push(Check::at_most(format!("decrease along N (t={t})"), drop, 0.0));
        let last = curve.last().expect("nonempty").1 / bound;
        cert.push(Check::at_least(format!("σ_max / e^(t/2) at N={n} (t={t})"), last, floor));
        cert.note(format!(
            "t={t}: {}",
            curve.iter().map(|(o, s)| format!("{o}:{s:.12}")).collect::<Vec<_>>().join(" ")
        ));
    }
    Ok(cert)
}

fn weight(command: WeightCommand) -> Result<Output> {
    match command {
        WeightCommand::Plot { from, to, step } => {
            let rows = figure1_data(from, to, step)?;
            let mut buf = Vec::new();
            write_figure1_csv(&rows, &mut buf)?;
            Ok(Output::Text(String::from_utf8(buf)?))
        }
        WeightCommand::Domar { depth, format } => {
            if !(depth < -5.0) {
                return Err(invalid(format!("depth must be below -5, got {depth}")));
            }
            let grid: Vec<f64> = (1..).map(|i| -0.5 * i as f64).take_while(|&y| y >= depth).collect();
            let rows = domar_nonstandard_indicator(WeightFn::Canonical, &grid)?;
            if format == Format::Csv {
                let mut s = String::from("y,ratio,running_min\n");
                for r in &rows {
                    s += &format!("{},{},{}\n", r.y, r.ratio, r.running_min);
                }
                return Ok(Output::Text(s));
            }
            let mut cert = Certificate::new("Domar indicator log w(y)/y for the canonical weight");
            let deep_min = rows.iter().filter(|r| r.y <= -5.0).map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            cert.push(Check::at_least("running minimum on y <= -5", deep_min, -1.0));
            let last = rows.last().expect("nonempty");
            cert.push(Check::at_most(format!("|log w(y)/y| at y = {}", last.y), last.ratio.abs(), 2.0 / depth.abs() + 1e-12));
            let x_grid: Vec<f64> = (1..=40).map(|i| 0.25 * i as f64).collect();
            let rigidity = domar_rigidity_check(WeightFn::Canonical, &x_grid)?;
            cert.note(format!(
                "rigidity on (0, 10]: concavity {}, condition 2 {}, condition 3 {}",
                rigidity.concavity_consistent, rigidity.condition2.consistent, rigidity.condition3.consistent
            ));
            Ok(Output::Report(cert))
        }
    }
}

fn parse_zero(s: &str) -> Result<(Complex64, u32)> {
    let (z, m) = match s.rsplit_once(':') {
        Some((z, m)) => (z, m.trim().parse::<u32>().map_err(|_| invalid(format!("bad multiplicity in {s:?}")))?),
        None => (s, 1),
    };
    let z = z.trim().parse::<Complex64>().map_err(|_| invalid(format!("bad complex number in {s:?}")))?;
    Ok((z, m))
}

fn demo(command: DemoCommand) -> Result<Output> {
    let opts = AdaptiveOptions::default();
    match command {
        DemoCommand::NonUnicellular { lambda1, lambda2, seed } => {
            Ok(Output::Report(non_unicellularity_certificate(lambda1, lambda2, opts, seed)?))
        }
        DemoCommand::Muntz { n_max, format } => {
            let rows = muntz_ratio_table(n_max, opts)?;
            if format == Format::Csv {
                let mut s = String::from("n,lambda,left,full,ratio,ratio_upper_bound\n");
                for r in &rows {
                    s += &format!("{},{},{},{},{},{}\n", r.n, r.lambda, r.left, r.full, r.ratio, r.ratio_upper_bound());
                }
                return Ok(Output::Text(s));
            }
            let mut cert = Certificate::new("Müntz ratios ‖e_(n²)‖ on (-∞,0) over ‖e_(n²)‖ on R");
            let drop = rows.windows(2).map(|p| p[0].ratio / p[1].ratio).fold(f64::INFINITY, f64::min);
            cert.push(Check::at_least("min ratio(n)/ratio(n+1)", drop, 1.0 + f64::EPSILON));
            if let Some(r3) = rows.iter().find(|r| r.n == 3) {
                cert.push(Check::at_most("ratio(3)", r3.ratio, 0.05));
            }
            for r in &rows {
                cert.note(format!("n={} ratio={:.6e} bound={:.6e}", r.n, r.ratio, r.ratio_upper_bound()));
            }
            Ok(Output::Report(cert))
        }
        DemoCommand::NonstandardSubspace {
            lambda,
            cut,
            probes,
            seed,
        } => {
            let mut rng = Probes::new(seed);
            let ys = rng.uniform(probes, cut - 10.0, cut + 5.0);
            let mut cert =
                nonstandard_subspace_certificate(lambda, cut, &[0.0, 0.5, 1.0, 2.0], &ys, opts)?.with_seed(seed);
            let g = Evaluable::exp_monomial(lambda.conj(), 0).windowed(f64::NEG_INFINITY, cut);
            let res = rng.uniform(20, 0.1, 5.0);
            let ims = rng.uniform(20, -10.0, 10.0);
            let mut worst: f64 = 0.0;
            for (&re, &im) in res.iter().zip(&ims) {
                let s = Complex64::new(re, im);
                let want = ((s + lambda.conj()) * cut).exp() / (s + lambda.conj());
                worst = worst.max((twisted_laplace(&g, cut, s, opts)? - want).norm() / want.norm().max(1.0));
            }
            cert.push(Check::at_most("twisted Laplace of the generator, 20 samples", worst, 1e-9));
            let mut misclassified = 0.0;
            for a in [-5.0, -1.0, 0.0, 2.0, 6.0] {
                if !matches!(
                    classify_subspace(&ShiftSubspace::Standard { a }, ClassifierGrid::default()),
                    Classification::Standard { .. }
                ) {
                    misclassified += 1.0;
                }
            }
            cert.push(Check::at_most("standard subspaces misclassified", misclassified, 0.0));
            Ok(Output::Report(cert))
        }
        DemoCommand::ModelSpace { zeros, seed } => {
            let points = zeros.iter().map(|s| parse_zero(s)).collect::<Result<Vec<_>>>()?;
            let data = SpectralData::new(points)?;
            let mut rng = Probes::new(seed);
            let axis = rng.uniform(50, -50.0, 50.0);
            let mut cert = blaschke_certificate(&data, &axis)?.with_seed(seed);
            let basis = model_space_kernel_basis(&data);
            let s_grid: Vec<Complex64> = rng
                .uniform(20, 0.1, 5.0)
                .into_iter()
                .zip(rng.uniform(20, -10.0, 10.0))
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            let mut worst: f64 = 0.0;
            for &(lambda, m) in data.points() {
                for k in 0..m {
                    let f = Evaluable::exp_monomial(lambda.conj(), k).windowed(f64::NEG_INFINITY, 0.0);
                    let values = s_grid
                        .iter()
                        .map(|&s| twisted_laplace(&f, 0.0, s, opts))
                        .collect::<cesaro_core::Result<Vec<_>>>()?;
                    worst = worst.max(kernel_fit_residual(&values, &s_grid, &basis)?);
                }
            }
            cert.push(Check::at_most("twisted Laplace transforms in the kernel span", worst, 1e-10));
            Ok(Output::Report(cert))
        }
    }
}
