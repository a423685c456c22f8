//! Command-line front end for the torus invariants library.
//!
//! Every subcommand reads JSON (inline or @file), runs one library
//! operation family, and emits a single deterministic JSON object (or a
//! table with --output table). Exit codes: 0 success, 1 input error,
//! 2 mathematical verification failure.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use exvol::extremal_length::{self, ConformalField};
use exvol::invariants;
use exvol::lattice::{ComplexLattice, DecomposableClass, SiegelPoint};
use exvol::minimality;
use exvol::reduction;
use exvol::reinhardt::{self, LogBase};
use exvol::systole;

use exvol_cli::output;

const UNIFORM_BOUND: f64 = 1.1547005383792517; // 2/sqrt(3)

#[derive(Parser)]
#[command(
    name = "exvol",
    version,
    about = "Extremal volume, complex systoles and extremal length of complex tori and Reinhardt domains"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,

    /// Override for the scale-free totally-real tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of complex tori.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Invariants of Reinhardt domains.
    Reinhardt {
        #[command(subcommand)]
        cmd: ReinhardtCmd,
    },
    /// Elliptic fibre bundles.
    Elliptic {
        #[command(subcommand)]
        cmd: EllipticCmd,
    },
    /// Classical extremal length on grids.
    Length {
        #[command(subcommand)]
        cmd: LengthCmd,
    },
    /// Randomized verification sweeps.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum TorusCmd {
    /// Extremal volume of decomposable classes; several --lattice/--class
    /// pairs are combined into a product torus.
    Mu(MuArgs),
    /// The cohomological invariant mu' (no totally-real gate).
    MuPrime(MuPrimeArgs),
    /// Complex systole by exhaustive coefficient search.
    Systole(SystoleArgs),
    /// Reduce a modulus to the fundamental domain.
    Reduce(ReduceArgs),
    /// Sample polarized tori and verify the systolic bound.
    VerifyBound(VerifyBoundArgs),
}

#[derive(Args)]
struct MuArgs {
    /// Lattice JSON (inline or @file); repeat for products.
    #[arg(long, required = true)]
    lattice: Vec<String>,
    /// Class JSON (inline or @file); repeat for products.
    #[arg(long, required = true)]
    class: Vec<String>,
}

#[derive(Args)]
struct MuPrimeArgs {
    #[arg(long)]
    lattice: String,
    #[arg(long)]
    class: String,
}

#[derive(Args)]
struct SystoleArgs {
    #[arg(long)]
    lattice: String,
    /// Half-width of the coefficient search box.
    #[arg(long, default_value_t = systole::DEFAULT_COEFF_BOUND)]
    coeff_bound: i64,
}

#[derive(Args)]
struct ReduceArgs {
    /// Modulus as two floats: RE IM.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], conflicts_with = "siegel")]
    tau: Option<Vec<f64>>,
    /// Siegel point JSON {"A":[[..]],"B":[[..]]} for the partial
    /// higher-dimensional reduction.
    #[arg(long)]
    siegel: Option<String>,
    /// Uniform bound checked against 1/det(B) in Siegel mode.
    #[arg(long, default_value_t = UNIFORM_BOUND)]
    d: f64,
    #[arg(long, default_value_t = reduction::DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct VerifyBoundArgs {
    /// Complex dimension (1 or 2).
    #[arg(long)]
    n: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = systole::DEFAULT_COEFF_BOUND)]
    coeff_bound: i64,
    /// Uniform bound d; defaults to 2/sqrt(3) for n = 1 and must be given
    /// explicitly for n >= 2 (no closed form is implemented there).
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Subcommand)]
enum ReinhardtCmd {
    /// Extremal volume (2 pi)^n / vol(B); several --base arguments are
    /// combined into a product domain.
    Mu(ReinhardtMuArgs),
    /// Check invariance of the logarithmic volume under monomial maps and
    /// dilations.
    VerifyInvariance(InvarianceArgs),
}

#[derive(Args)]
struct ReinhardtMuArgs {
    /// Base JSON (inline or @file); repeat for products.
    #[arg(long, required = true)]
    base: Vec<String>,
}

#[derive(Args)]
struct InvarianceArgs {
    #[arg(long)]
    base: String,
    /// Unimodular exponent matrix as a JSON integer matrix, e.g. [[1,1],[0,1]].
    #[arg(long)]
    unimodular: String,
    /// Optional dilation as a JSON list of [re, im] pairs.
    #[arg(long)]
    dilation: Option<String>,
    /// Monte-Carlo samples for the transformed volume.
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand)]
enum EllipticCmd {
    /// Extremal volume of the fibre class: log c / (2 pi Im tau).
    Mu(EllipticArgs),
}

#[derive(Args)]
struct EllipticArgs {
    /// Deck transformation factor, > 1.
    #[arg(long)]
    c: f64,
    /// Base modulus as two floats: RE IM.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"])]
    tau: Vec<f64>,
}

#[derive(Subcommand)]
enum LengthCmd {
    /// Grid length, area and extremal-length ratio of one class.
    Ratio(RatioArgs),
}

#[derive(Args)]
struct RatioArgs {
    /// Conformal field JSON (inline or @file).
    #[arg(long)]
    field: String,
    /// Homology class as two integers: P Q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    class: Vec<i64>,
    /// Universal-cover margin in fundamental domains.
    #[arg(long, default_value_t = extremal_length::DEFAULT_MARGIN)]
    margin: i64,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check the chain: min class ratio <= 2/sqrt(3) x (1 + grid tol).
    Loewner(LoewnerArgs),
    /// Check that flat cycles minimize volume under random perturbations.
    Minimality(MinimalityArgs),
}

#[derive(Args)]
struct LoewnerArgs {
    #[arg(long)]
    tau_re: f64,
    #[arg(long)]
    tau_im: f64,
    /// Field kind: "const" or "trig" (seeded smooth field).
    #[arg(long)]
    field: String,
    /// Grid resolution per side.
    #[arg(long = "N", default_value_t = extremal_length::DEFAULT_GRID)]
    n_grid: usize,
    #[arg(long, default_value_t = systole::DEFAULT_COEFF_BOUND)]
    coeff_bound: i64,
    /// Constant value for --field const.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Seed for --field trig (stochastic fields require one).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    #[arg(long, default_value_t = 0.5)]
    lo: f64,
    #[arg(long, default_value_t = 2.0)]
    hi: f64,
}

#[derive(Args)]
struct MinimalityArgs {
    #[arg(long)]
    lattice: String,
    #[arg(long)]
    class: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    eps_max: f64,
    /// Quadrature points (per axis in dimension two).
    #[arg(long = "Q")]
    quadrature: Option<usize>,
}

/// Input error (exit 1) or verification failure (exit 2, body printed).
enum Failure {
    Input(String),
    Verification(Value),
}

struct Outcome {
    body: Map<String, Value>,
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for mathematical verification failures, so
    // usage errors are remapped from clap's default to the input-error
    // code 1 (help and version stay 0).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.output;
    match run(cli) {
        Ok(outcome) => {
            let value = Value::Object(outcome.body);
            match format {
                Format::Json => println!("{}", output::render_json(&value)),
                Format::Table => println!("{}", output::render_table(&value)),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(body)) => {
            match format {
                Format::Json => println!("{}", output::render_json(&body)),
                Format::Table => println!("{}", output::render_table(&body)),
            }
            ExitCode::from(2)
        }
    }
}

/// Resolves @file arguments to their contents.
fn read_payload(label: &str, raw: &str) -> Result<String, Failure> {
    if let Some(path) = raw.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{label}: cannot read {path}: {e}")))
    } else {
        Ok(raw.to_string())
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(label: &str, raw: &str) -> Result<T, Failure> {
    let payload = read_payload(label, raw)?;
    serde_json::from_str(&payload).map_err(|e| Failure::Input(format!("{label}: {e}")))
}

fn lib_err(e: exvol::Error) -> Failure {
    Failure::Input(e.to_string())
}

/// The documented defaults, printed in every output header.
fn defaults_header() -> Value {
    json!({
        "N": extremal_length::DEFAULT_GRID as u64,
        "Q": minimality::DEFAULT_Q_2D as u64,
        "coeff_bound": systole::DEFAULT_COEFF_BOUND,
        "tr_tol": invariants::DEFAULT_TR_TOL,
    })
}

fn base_body(command: &str) -> Map<String, Value> {
    let mut body = Map::new();
    body.insert("command".into(), json!(command));
    body.insert("defaults".into(), defaults_header());
    body
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let tr_tol = cli.tolerance.unwrap_or(invariants::DEFAULT_TR_TOL);
    match cli.command {
        Command::Torus { cmd } => match cmd {
            TorusCmd::Mu(args) => torus_mu(args, tr_tol),
            TorusCmd::MuPrime(args) => torus_mu_prime(args),
            TorusCmd::Systole(args) => torus_systole(args, tr_tol),
            TorusCmd::Reduce(args) => torus_reduce(args),
            TorusCmd::VerifyBound(args) => torus_verify_bound(args),
        },
        Command::Reinhardt { cmd } => match cmd {
            ReinhardtCmd::Mu(args) => reinhardt_mu_cmd(args),
            ReinhardtCmd::VerifyInvariance(args) => reinhardt_invariance(args),
        },
        Command::Elliptic { cmd } => match cmd {
            EllipticCmd::Mu(args) => elliptic_mu(args),
        },
        Command::Length { cmd } => match cmd {
            LengthCmd::Ratio(args) => length_ratio(args),
        },
        Command::Verify { cmd } => match cmd {
            VerifyCmd::Loewner(args) => verify_loewner(args),
            VerifyCmd::Minimality(args) => verify_minimality_cmd(args),
        },
    }
}

/// Parses paired lattice/class arguments and folds them into a product.
fn parse_torus_input(
    lattices: &[String],
    classes: &[String],
) -> Result<(ComplexLattice, DecomposableClass), Failure> {
    if lattices.len() != classes.len() {
        return Err(Failure::Input(format!(
            "need one --class per --lattice (got {} and {})",
            classes.len(),
            lattices.len()
        )));
    }
    let mut parsed = Vec::new();
    for (i, (lat_raw, cls_raw)) in lattices.iter().zip(classes).enumerate() {
        let lat: ComplexLattice = parse_json(&format!("lattice[{i}]"), lat_raw)?;
        let cls: DecomposableClass = parse_json(&format!("class[{i}]"), cls_raw)?;
        parsed.push((lat, cls));
    }
    let (mut lattice, mut class) = parsed.remove(0);
    for (lat, cls) in parsed {
        lattice = invariants::product_lattice(&lattice, &lat);
        class = invariants::product_class(&class, &cls);
    }
    Ok((lattice, class))
}

fn torus_mu(args: MuArgs, tr_tol: f64) -> Result<Outcome, Failure> {
    let (lattice, class) = parse_torus_input(&args.lattice, &args.class)?;
    let totally_real = invariants::is_totally_real(&lattice, &class, tr_tol).map_err(lib_err)?;
    let mu = invariants::extremal_volume_with_tol(&lattice, &class, tr_tol).map_err(lib_err)?;
    let omega = invariants::omega_volume_class(&lattice, &class).map_err(lib_err)?;

    let mut body = base_body("torus mu");
    body.insert("mu".into(), json!(mu));
    body.insert("omega_volume".into(), json!(omega));
    body.insert("covolume".into(), json!(lattice.covolume()));
    body.insert("totally_real".into(), json!(totally_real));
    if totally_real {
        let phase = invariants::phase(&lattice, &class).map_err(lib_err)?;
        body.insert("phase".into(), json!(phase));
    }
    Ok(Outcome { body })
}

fn torus_mu_prime(args: MuPrimeArgs) -> Result<Outcome, Failure> {
    let lattice: ComplexLattice = parse_json("lattice", &args.lattice)?;
    let class: DecomposableClass = parse_json("class", &args.class)?;
    let mu_prime = invariants::mu_prime(&lattice, &class).map_err(lib_err)?;
    let period = lattice.period_matrix(&class).map_err(lib_err)?;
    let period_json: Vec<Vec<[f64; 2]>> = period
        .iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect();

    let mut body = base_body("torus mu-prime");
    body.insert("mu_prime".into(), json!(mu_prime));
    body.insert("period_matrix".into(), json!(period_json));
    Ok(Outcome { body })
}

fn torus_systole(args: SystoleArgs, tr_tol: f64) -> Result<Outcome, Failure> {
    let lattice: ComplexLattice = parse_json("lattice", &args.lattice)?;
    let result = systole::complex_systole(&lattice, args.coeff_bound, tr_tol).map_err(lib_err)?;
    let ratio = result.value * result.value / lattice.covolume();
    let enumeration = systole::enumerate_classes(&lattice, args.coeff_bound);

    let mut body = base_body("torus systole");
    body.insert("value".into(), json!(result.value));
    body.insert(
        "witness".into(),
        json!({ "coeffs": result.witness.coeffs() }),
    );
    body.insert("certified".into(), json!(result.certified));
    body.insert("systolic_ratio".into(), json!(ratio));
    body.insert("coeff_bound".into(), json!(args.coeff_bound));
    body.insert("box_limited".into(), json!(enumeration.box_limited));
    body.insert(
        "classes_enumerated".into(),
        json!(enumeration.classes.len() as u64),
    );
    if lattice.n() == 1 {
        let (_, shortest) = systole::lagrange_gauss_shortest(&lattice).map_err(lib_err)?;
        body.insert("lagrange_gauss_length".into(), json!(shortest));
    }
    Ok(Outcome { body })
}

fn torus_reduce(args: ReduceArgs) -> Result<Outcome, Failure> {
    match (&args.tau, &args.siegel) {
        (Some(tau), None) => {
            let tau = Complex64::new(tau[0], tau[1]);
            let trace = reduction::reduce_tau(tau, args.max_iter).map_err(lib_err)?;
            let (mu_a, mu_b) = reduction::mu_pair(trace.final_tau).map_err(lib_err)?;
            let mut body = base_body("torus reduce");
            body.insert(
                "trace".into(),
                serde_json::to_value(&trace).expect("trace serializes"),
            );
            body.insert(
                "in_fundamental_domain".into(),
                json!(reduction::is_in_fundamental_domain(trace.final_tau)),
            );
            body.insert("mu_pair".into(), json!([mu_a, mu_b]));
            Ok(Outcome { body })
        }
        (None, Some(raw)) => {
            let point: SiegelPoint = parse_json("siegel", raw)?;
            let reduced = reduction::translate_reduce_siegel(&point).map_err(lib_err)?;
            let (mu, bound_ok) =
                reduction::polarized_mu_and_bound(&reduced, args.d).map_err(lib_err)?;
            let mut body = base_body("torus reduce");
            body.insert(
                "reduced".into(),
                serde_json::to_value(&reduced).expect("point serializes"),
            );
            body.insert("mu".into(), json!(mu));
            body.insert("d".into(), json!(args.d));
            body.insert("bound_ok".into(), json!(bound_ok));
            Ok(Outcome { body })
        }
        _ => Err(Failure::Input(
            "supply exactly one of --tau RE IM or --siegel JSON".into(),
        )),
    }
}

fn torus_verify_bound(args: VerifyBoundArgs) -> Result<Outcome, Failure> {
    let d = match args.d {
        Some(d) => d,
        None if args.n == 1 => UNIFORM_BOUND,
        None => {
            return Err(Failure::Input(
                "supply --d for n >= 2: no closed-form uniform bound is implemented there".into(),
            ))
        }
    };
    let report =
        systole::verify_polarized_bound(args.n, args.samples, args.seed, args.coeff_bound, d)
            .map_err(lib_err)?;
    let mut body = base_body("torus verify-bound");
    body.insert("d".into(), json!(d));
    for (k, v) in serde_json::to_value(&report)
        .expect("report serializes")
        .as_object()
        .expect("report is an object")
    {
        body.insert(k.clone(), v.clone());
    }
    if report.violations > 0 {
        return Err(Failure::Verification(Value::Object(body)));
    }
    Ok(Outcome { body })
}

fn parse_bases(raws: &[String]) -> Result<LogBase, Failure> {
    let mut bases = Vec::new();
    for (i, raw) in raws.iter().enumerate() {
        let payload = read_payload(&format!("base[{i}]"), raw)?;
        bases.push(LogBase::from_json(&payload).map_err(lib_err)?);
    }
    let mut product = bases.remove(0);
    for base in bases {
        product = reinhardt::product_base(&product, &base).map_err(lib_err)?;
    }
    Ok(product)
}

fn reinhardt_mu_cmd(args: ReinhardtMuArgs) -> Result<Outcome, Failure> {
    let base = parse_bases(&args.base)?;
    let volume = reinhardt::log_volume(&base).map_err(lib_err)?;
    let mu = reinhardt::reinhardt_mu(&base).map_err(lib_err)?;
    let mut body = base_body("reinhardt mu");
    body.insert("mu".into(), json!(mu));
    body.insert("log_volume".into(), json!(volume.value));
    body.insert("stderr".into(), json!(volume.stderr));
    Ok(Outcome { body })
}

fn reinhardt_invariance(args: InvarianceArgs) -> Result<Outcome, Failure> {
    let payload = read_payload("base", &args.base)?;
    let base = LogBase::from_json(&payload)
        .map_err(lib_err)?
        .with_monte_carlo(args.samples, args.seed)
        .map_err(lib_err)?;
    let u: Vec<Vec<i64>> = parse_json("unimodular", &args.unimodular)?;

    let original = reinhardt::log_volume(&base).map_err(lib_err)?;
    let image = reinhardt::monomial_pushforward(&base, &u).map_err(lib_err)?;
    let transformed = reinhardt::log_volume(&image).map_err(lib_err)?;

    // Exact volumes carry no Monte-Carlo error; allow three standard
    // errors wherever an estimate is involved.
    let sigma = 3.0 * (original.stderr + transformed.stderr);
    let monomial_ok = (transformed.value - original.value).abs() <= sigma.max(1e-12);

    let mut body = base_body("reinhardt verify-invariance");
    body.insert("volume".into(), json!(original.value));
    body.insert("volume_stderr".into(), json!(original.stderr));
    body.insert("monomial_volume".into(), json!(transformed.value));
    body.insert("monomial_stderr".into(), json!(transformed.stderr));
    body.insert("monomial_ok".into(), json!(monomial_ok));

    let mut all_ok = monomial_ok;
    if let Some(raw) = &args.dilation {
        let pairs: Vec<[f64; 2]> = parse_json("dilation", raw)?;
        let a: Vec<Complex64> = pairs
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let dilated = reinhardt::dilation_pushforward(&base, &a).map_err(lib_err)?;
        let dilated_volume = reinhardt::log_volume(&dilated).map_err(lib_err)?;
        let dilation_ok = if base.is_exact() {
            dilated_volume.value == original.value
        } else {
            (dilated_volume.value - original.value).abs()
                <= 3.0 * (original.stderr + dilated_volume.stderr)
        };
        body.insert("dilated_volume".into(), json!(dilated_volume.value));
        body.insert("dilation_ok".into(), json!(dilation_ok));
        all_ok &= dilation_ok;
    }

    if !all_ok {
        return Err(Failure::Verification(Value::Object(body)));
    }
    Ok(Outcome { body })
}

fn elliptic_mu(args: EllipticArgs) -> Result<Outcome, Failure> {
    let tau = Complex64::new(args.tau[0], args.tau[1]);
    let mu = reinhardt::elliptic_bundle_mu(args.c, tau).map_err(lib_err)?;
    let mut body = base_body("elliptic mu");
    body.insert("mu".into(), json!(mu));
    body.insert("c".into(), json!(args.c));
    body.insert("tau".into(), json!([tau.re, tau.im]));
    Ok(Outcome { body })
}

fn length_ratio(args: RatioArgs) -> Result<Outcome, Failure> {
    let payload = read_payload("field", &args.field)?;
    let field = ConformalField::from_json(&payload).map_err(lib_err)?;
    let (p, q) = (args.class[0], args.class[1]);
    let len = extremal_length::len_class_with_margin(&field, p, q, args.margin).map_err(lib_err)?;
    let a = extremal_length::area(&field);
    let mut body = base_body("length ratio");
    body.insert("length".into(), json!(len));
    body.insert("area".into(), json!(a));
    body.insert("ratio".into(), json!(len * len / a));
    body.insert("class".into(), json!([p, q]));
    Ok(Outcome { body })
}

fn verify_loewner(args: LoewnerArgs) -> Result<Outcome, Failure> {
    let tau = Complex64::new(args.tau_re, args.tau_im);
    let field = match args.field.as_str() {
        "const" => ConformalField::constant(tau, args.n_grid, args.rho).map_err(lib_err)?,
        "trig" => {
            let seed = args.seed.ok_or_else(|| {
                Failure::Input("--field trig is stochastic and requires --seed".into())
            })?;
            ConformalField::trig(tau, args.n_grid, seed, args.degree, args.lo, args.hi)
                .map_err(lib_err)?
        }
        other => {
            return Err(Failure::Input(format!(
                "--field must be \"const\" or \"trig\", got {other:?}"
            )))
        }
    };
    let report = extremal_length::loewner_check(&field, args.coeff_bound).map_err(lib_err)?;
    let mut body = base_body("verify loewner");
    body.insert("min_ratio".into(), json!(report.min_ratio));
    body.insert(
        "witness".into(),
        json!([report.witness.0, report.witness.1]),
    );
    body.insert("bound".into(), json!(report.bound));
    body.insert("margin".into(), json!(report.margin));
    body.insert("ok".into(), json!(report.ok));
    body.insert("N".into(), json!(args.n_grid as u64));
    body.insert("coeff_bound".into(), json!(args.coeff_bound));
    if !report.ok {
        return Err(Failure::Verification(Value::Object(body)));
    }
    Ok(Outcome { body })
}

fn verify_minimality_cmd(args: MinimalityArgs) -> Result<Outcome, Failure> {
    let lattice: ComplexLattice = parse_json("lattice", &args.lattice)?;
    let class: DecomposableClass = parse_json("class", &args.class)?;
    let quadrature = args.quadrature.unwrap_or(match lattice.n() {
        1 => minimality::DEFAULT_Q_1D,
        _ => minimality::DEFAULT_Q_2D,
    });
    let report = minimality::verify_minimality(
        &lattice,
        &class,
        args.trials,
        args.seed,
        args.eps_max,
        quadrature,
    )
    .map_err(lib_err)?;
    let mut body = base_body("verify minimality");
    for (k, v) in serde_json::to_value(&report)
        .expect("report serializes")
        .as_object()
        .expect("report is an object")
    {
        body.insert(k.clone(), v.clone());
    }
    body.insert("Q".into(), json!(quadrature as u64));
    body.insert("eps_max".into(), json!(args.eps_max));
    if report.violations > 0 {
        return Err(Failure::Verification(Value::Object(body)));
    }
    Ok(Outcome { body })
}
