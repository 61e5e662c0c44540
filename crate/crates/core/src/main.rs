use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use polylat::bounds::{
    discrepancy_bound, n_star_bound, suggest_ws, theorem_bound, weight_system, BoundReport,
    GammaRule, ReductionRule,
};
use polylat::cbc::{cbc_reduced_fast, cbc_reduced_naive, CbcOptions, OmegaStrategy};
use polylat::discrepancy::{
    star_discrepancy_exact, weighted_star_discrepancy_exact, DiscrepancyLimits,
};
use polylat::fieldpoly::{checked_pow, Modulus, ModulusKind};
use polylat::pointset::{format_points, generate_point_set, PointFormat};
use polylat::quality::{
    r_character, r_direct, r_kernel, r_walsh, GeneratingVector, DEFAULT_MAX_ENUM,
};
use polylat::vector_file::{Algorithm, VectorFile};
use polylat::Error;

#[derive(Parser)]
#[command(
    name = "polylat",
    version,
    about = "Polynomial lattice point sets by reduced CBC construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModulusArg {
    Xm,
    Irr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Naive,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaArg {
    Direct,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Fraction,
    Decimal,
}

#[derive(clap::Args)]
struct Params {
    /// Prime base
    #[arg(short = 'p')]
    p: u64,
    /// Degree of the modulus; the point set has p^m points
    #[arg(short = 'm')]
    m: usize,
    /// Dimension
    #[arg(short = 's')]
    s: usize,
    #[arg(long, value_enum, default_value = "xm")]
    modulus: ModulusArg,
    /// poly:<k> for j^-k, geo:<q> for q^j, or list:<csv>
    #[arg(long, default_value = "poly:2", value_parser = parse_gamma_rule)]
    weights: GammaRule,
    /// none, auto:<alpha> (needs poly weights), or list:<csv>
    #[arg(long, default_value = "none", value_parser = parse_reduction_rule)]
    reduction: ReductionRule,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a generating vector and write it to a file
    Construct {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "fast")]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "direct")]
        omega: OmegaArg,
        /// Largest admissible number of points
        #[arg(long, default_value_t = CbcOptions::default().max_points)]
        max_points: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Print the points of a constructed point set
    Points {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fraction")]
        format: FormatArg,
    },
    /// Report the error bounds for a parameter choice
    Bound {
        #[command(flatten)]
        params: Params,
        /// Also report the smallest m whose bound is at most this value
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 60)]
        m_cap: usize,
    },
    /// Exact weighted star discrepancy of a constructed point set
    Discrepancy {
        file: PathBuf,
        #[arg(long, default_value_t = DiscrepancyLimits::default().max_points)]
        max_disc_n: usize,
        #[arg(long, default_value_t = DiscrepancyLimits::default().max_dim)]
        max_disc_dim: usize,
    },
    /// Recompute and check everything stored in a vector file
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ENUM)]
        max_dual_enum: u64,
        #[arg(long, default_value_t = 32)]
        max_disc_n: usize,
    },
    /// Reduction indices floor((k - alpha) log_p j)
    SuggestW {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(short = 'p')]
        p: u64,
        #[arg(long)]
        count: usize,
    },
}

enum CliError {
    Usage(String),
    Infeasible(String),
    Verification,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_csv<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("cannot parse '{x}'")))
        .collect()
}

fn parse_gamma_rule(s: &str) -> Result<GammaRule, String> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or("expected poly:<k>, geo:<q> or list:<csv>")?;
    match kind {
        "poly" => arg
            .parse()
            .map(GammaRule::Poly)
            .map_err(|_| format!("bad exponent '{arg}'")),
        "geo" => arg
            .parse()
            .map(GammaRule::Geo)
            .map_err(|_| format!("bad ratio '{arg}'")),
        "list" => parse_csv(arg).map(GammaRule::List),
        _ => Err(format!("unknown weight rule '{kind}'")),
    }
}

fn parse_reduction_rule(s: &str) -> Result<ReductionRule, String> {
    if s == "none" {
        return Ok(ReductionRule::None);
    }
    let (kind, arg) = s
        .split_once(':')
        .ok_or("expected none, auto:<alpha> or list:<csv>")?;
    match kind {
        "auto" => arg
            .parse()
            .map(ReductionRule::Auto)
            .map_err(|_| format!("bad alpha '{arg}'")),
        "list" => parse_csv(arg).map(ReductionRule::List),
        _ => Err(format!("unknown reduction rule '{kind}'")),
    }
}

/// `%.12g`.
fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{:.11e}", x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        let e: i32 = e.parse().unwrap();
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn modulus_for(p: u64, m: usize, kind: ModulusArg) -> CliResult<Modulus> {
    Ok(match kind {
        ModulusArg::Xm => Modulus::monomial(p, m)?,
        ModulusArg::Irr => Modulus::smallest_irreducible(p, m)?,
    })
}

fn read_vector_file(path: &Path) -> CliResult<(VectorFile, GeneratingVector)> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file = VectorFile::from_json(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let gvec = file
        .generating_vector()
        .map_err(|e| CliError::Usage(format!("invalid vector file: {e}")))?;
    Ok((file, gvec))
}

fn print_bound(b: &BoundReport) {
    println!("joe_term = {}", num(b.joe_term));
    println!("product_term = {}", num(b.product_term));
    println!("total = {}", num(b.total));
    for flag in &b.hypothesis_flags {
        println!("flag = {flag}");
    }
}

fn construct(
    params: &Params,
    algo: AlgoArg,
    omega: OmegaArg,
    max_points: u64,
    output: &Path,
) -> CliResult<()> {
    let modulus = modulus_for(params.p, params.m, params.modulus)?;
    let weights = weight_system(&params.weights, &params.reduction, params.p, params.s)?;
    if weights.w1_nonzero() {
        eprintln!(
            "warning: w_1 = {} > 0 lies outside the hypothesis of the published error bounds",
            weights.ws()[0]
        );
    }
    let mut algorithm = match algo {
        AlgoArg::Naive => Algorithm::Naive,
        AlgoArg::Fast => Algorithm::Fast,
    };
    if algorithm == Algorithm::Fast && modulus.kind() == ModulusKind::Irreducible {
        eprintln!("warning: the fast construction needs f = x^m; using the naive construction");
        algorithm = Algorithm::Naive;
    }
    let opts = CbcOptions {
        max_points,
        omega: match omega {
            OmegaArg::Direct => OmegaStrategy::Direct,
            OmegaArg::Structured => OmegaStrategy::Structured,
        },
    };
    let start = Instant::now();
    let (gvec, trace) = match algorithm {
        Algorithm::Naive => cbc_reduced_naive(&modulus, &weights, params.s, &opts)?,
        Algorithm::Fast => cbc_reduced_fast(&modulus, &weights, params.s, &opts)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    let bound = discrepancy_bound(params.p, params.m, params.s, &weights, modulus.kind())?;
    let file = VectorFile::new(&gvec, trace.r_values(), &bound, algorithm);
    fs::write(output, file.to_json())
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", output.display())))?;

    let meta = json!({
        "elapsed_seconds": elapsed,
        "setup_work": trace.setup_work,
        "total_work": trace.total_work(),
        "steps": trace.steps.iter().map(|s| json!({
            "dimension": s.dimension,
            "search_set_size": s.search_set_size,
            "candidate_evaluations": s.candidate_evaluations,
            "psi_applications": s.psi_applications,
            "work": s.work,
        })).collect::<Vec<_>>(),
    });
    let mut meta_path = output.as_os_str().to_owned();
    meta_path.push(".meta.json");
    fs::write(&meta_path, format!("{:#}\n", meta))
        .map_err(|e| CliError::Usage(format!("cannot write metadata: {e}")))?;

    for (step, g) in trace.steps.iter().zip(gvec.reduced()) {
        println!("g_{} = {}  R = {}", step.dimension, g, num(step.r_value));
    }
    print_bound(&bound);
    Ok(())
}

fn bound(params: &Params, epsilon: Option<f64>, m_cap: usize) -> CliResult<()> {
    let kind = match params.modulus {
        ModulusArg::Xm => ModulusKind::MonomialXm,
        ModulusArg::Irr => ModulusKind::Irreducible,
    };
    let weights = weight_system(&params.weights, &params.reduction, params.p, params.s)?;
    let report = discrepancy_bound(params.p, params.m, params.s, &weights, kind)?;
    for d in 1..=params.s {
        println!(
            "theorem_bound[{d}] = {}",
            num(theorem_bound(&weights, params.p, params.m, d, kind)?)
        );
    }
    print_bound(&report);
    if let Some(eps) = epsilon {
        let n = n_star_bound(&weights, params.p, params.s, eps, kind, m_cap)?;
        println!("m_star = {}", n.m);
        println!("n_star_upper_bound = {}", n.n);
    }
    Ok(())
}

fn discrepancy(path: &Path, limits: DiscrepancyLimits) -> CliResult<()> {
    let (file, gvec) = read_vector_file(path)?;
    let ps = generate_point_set(&gvec)?;
    let weighted = weighted_star_discrepancy_exact(&ps, &file.weights.gammas, &limits)?;
    let star = star_discrepancy_exact(&ps, &limits)?;
    println!("star_discrepancy = {}", num(star.value));
    println!("weighted_star_discrepancy = {}", num(weighted.value));
    let witness: Vec<String> = weighted.witness.iter().map(|&t| num(t)).collect();
    println!(
        "witness = ({}){}",
        witness.join(", "),
        if weighted.closed {
            " approached from above"
        } else {
            ""
        }
    );
    for proj in &weighted.projections {
        let coords: Vec<String> = proj.coords.iter().map(|j| (j + 1).to_string()).collect();
        println!(
            "projection {{{}}}: weight = {}  D* = {}  weighted = {}",
            coords.join(","),
            num(proj.weight),
            num(proj.star_discrepancy),
            num(proj.weighted)
        );
    }
    println!("bound = {}", num(file.bound.total));
    Ok(())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn verify(path: &Path, max_dual_enum: u64, max_disc_n: usize) -> CliResult<()> {
    let (file, gvec) = read_vector_file(path)?;
    let p = gvec.p();
    let m = gvec.m();
    let s = gvec.dim();
    let kind = gvec.modulus().kind();
    let mut failures = Vec::new();
    let mut fail = |value: serde_json::Value| {
        failures.push(value);
    };

    for d in 1..=s {
        let stored = file.r_values[d - 1];
        let (form, primary) = match kind {
            ModulusKind::MonomialXm => ("walsh", r_walsh(&gvec, d)?),
            ModulusKind::Irreducible => ("kernel", r_kernel(&gvec, d)?),
        };
        if !(stored >= 0.0 && stored.is_finite()) {
            fail(json!({"check": "r_nonnegative", "dimension": d, "found": stored}));
        }
        if !close(primary, stored, 1e-9) {
            fail(
                json!({"check": "r_value", "dimension": d, "form": form, "expected": primary, "found": stored}),
            );
        }
        if checked_pow(p, m * d).is_some_and(|n| n <= max_dual_enum) {
            let direct = r_direct(&gvec, d, max_dual_enum)?;
            if !close(direct, primary, 1e-9) {
                fail(
                    json!({"check": "r_oracle", "dimension": d, "form": "direct", "expected": direct, "found": primary}),
                );
            }
        } else {
            println!("capacity: dual enumeration skipped for d = {d}");
        }
        let char_terms = checked_pow(p, 2 * m).map(|n| n as u128 * d as u128);
        if char_terms.is_some_and(|n| n <= max_dual_enum as u128) {
            let character = r_character(&gvec, d, max_dual_enum)?;
            if !close(character.value, primary, 1e-9) || character.imag_residual > 1e-9 {
                fail(
                    json!({"check": "r_oracle", "dimension": d, "form": "character", "expected": character.value, "found": primary}),
                );
            }
        } else {
            println!("capacity: character sum skipped for d = {d}");
        }
        let bound = theorem_bound(gvec.weights(), p, m, d, kind)?;
        if stored > bound * (1.0 + 1e-12) {
            fail(
                json!({"check": "theorem_bound", "dimension": d, "bound": bound, "found": stored}),
            );
        }
        println!(
            "d = {d}: R = {}  theorem bound = {}",
            num(stored),
            num(bound)
        );
    }

    let report = discrepancy_bound(p, m, s, gvec.weights(), kind)?;
    let stored: BoundReport = (&file.bound).into();
    if !close(report.total, stored.total, 1e-12)
        || !close(report.joe_term, stored.joe_term, 1e-12)
        || !close(report.product_term, stored.product_term, 1e-12)
        || report.case != stored.case
        || report.hypothesis_flags != stored.hypothesis_flags
    {
        fail(json!({"check": "bound_report", "expected": report.total, "found": stored.total}));
    }

    let n = checked_pow(p, m).unwrap_or(u64::MAX);
    let limits = DiscrepancyLimits {
        max_points: max_disc_n,
        ..DiscrepancyLimits::default()
    };
    if n <= max_disc_n as u64 && s <= limits.max_dim {
        let ps = generate_point_set(&gvec)?;
        let disc = weighted_star_discrepancy_exact(&ps, gvec.weights().gammas(), &limits)?;
        println!(
            "weighted star discrepancy = {}  bound = {}",
            num(disc.value),
            num(report.total)
        );
        if disc.value > report.total {
            fail(json!({"check": "discrepancy_bound", "bound": report.total, "found": disc.value}));
        }
    } else {
        println!("capacity: discrepancy check skipped (N = {n}, s = {s})");
    }

    if failures.is_empty() {
        println!("{}", json!({"status": "pass"}));
        Ok(())
    } else {
        println!("{}", json!({"status": "fail", "failures": failures}));
        Err(CliError::Verification)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Construct {
            params,
            algo,
            omega,
            max_points,
            output,
        } => construct(&params, algo, omega, max_points, &output),
        Command::Points { file, format } => {
            let (_, gvec) = read_vector_file(&file)?;
            let ps = generate_point_set(&gvec)?;
            let format = match format {
                FormatArg::Fraction => PointFormat::Fraction,
                FormatArg::Decimal => PointFormat::Decimal,
            };
            print!("{}", format_points(&ps, format));
            Ok(())
        }
        Command::Bound {
            params,
            epsilon,
            m_cap,
        } => bound(&params, epsilon, m_cap),
        Command::Discrepancy {
            file,
            max_disc_n,
            max_disc_dim,
        } => discrepancy(
            &file,
            DiscrepancyLimits {
                max_dim: max_disc_dim,
                max_points: max_disc_n,
            },
        ),
        Command::Verify {
            file,
            max_dual_enum,
            max_disc_n,
        } => verify(&file, max_dual_enum, max_disc_n),
        Command::SuggestW { k, alpha, p, count } => {
            let ws = suggest_ws(k, alpha, p, count)?;
            let text: Vec<String> = ws.iter().map(u32::to_string).collect();
            println!("{}", text.join(","));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification) => ExitCode::from(3),
    }
}
