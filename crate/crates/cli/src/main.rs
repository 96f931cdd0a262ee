//! Command-line front end. Numeric output is CSV with a header row; the
//! thread count follows `RAYON_NUM_THREADS`.

use clap::{Args, Parser, Subcommand};
use gibbs_mbpt::amplitudes::{bare_series, Quantity, Series};
use gibbs_mbpt::enumeration::{enumerate, FamilyKind};
use gibbs_mbpt::methods::{parse_lambda_grid, solve_dyson, sweep, Ansatz, DysonOptions, SweepMethod};
use gibbs_mbpt::model::GibbsProblem;
use gibbs_mbpt::oracle::{exact_quantities, monte_carlo, QuadratureSpec};
use nalgebra::DMatrix;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SEC5: &str = include_str!("../../core/examples/sec5.json");

#[derive(Parser)]
#[command(name = "gibbs-mbpt", version, about = "Diagrammatic perturbation theory for quartic Gibbs models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArg {
    /// Problem JSON `{"A": [[..]], "v": [[..]], "lambda": x}`; the bundled
    /// 4x4 tridiagonal example when omitted.
    #[arg(long)]
    problem: Option<PathBuf>,
}

#[derive(Args)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One serialized diagram class and its symmetry factor per line.
    Enumerate {
        /// closed, connected, greens, 1pi or 2pi.
        #[arg(long)]
        kind: FamilyKind,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Bare series coefficients, matrices flattened row-major.
    Series {
        /// z, omega, g or sigma.
        #[arg(long)]
        quantity: Quantity,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        problem: ProblemArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Self-consistent Dyson solve.
    Scf {
        #[command(flatten)]
        problem: ProblemArg,
        /// hf, gf2 or gw.
        #[arg(long)]
        method: Ansatz,
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
    /// Relative free-energy error against quadrature over a coupling grid.
    Sweep {
        #[command(flatten)]
        problem: ProblemArg,
        /// `log:lo:hi:n`, `lin:lo:hi:n` or a comma-separated list.
        #[arg(long, default_value = "log:1e-3:1:25")]
        lambda_grid: String,
        /// Any of hf, gf2, gw, bare1..bare4.
        #[arg(long, value_delimiter = ',', default_value = "hf,gf2,gw,bare1,bare2")]
        methods: Vec<SweepMethod>,
        #[arg(long, default_value_t = 60)]
        nodes: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Z, Omega, G and E by quadrature, optionally with Monte Carlo.
    Oracle {
        #[command(flatten)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 60)]
        nodes: usize,
        /// Sample count and seed.
        #[arg(long, num_args = 2, value_names = ["SAMPLES", "SEED"])]
        mc: Option<Vec<u64>>,
    },
    /// Reproduce a reference listing.
    Verify {
        /// Only `paper` is available.
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// Class counts, symmetry factors and representatives per family.
    Gallery {
        #[arg(long, default_value_t = 3)]
        order_max: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<gibbs_mbpt::Error> for Failure {
    fn from(e: gibbs_mbpt::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn load(arg: &ProblemArg) -> Result<GibbsProblem, Failure> {
    let text = match &arg.problem {
        None => SEC5.to_string(),
        Some(path) => {
            if !path.is_file() {
                return Err(Failure::Usage(format!("--problem: file not found: {}", path.display())));
            }
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--problem: {}: {e}", path.display())))?
        }
    };
    let p = GibbsProblem::from_json_str(&text)?;
    if p.asymmetry_warning() {
        eprintln!("warning: A or v was not symmetric and has been symmetrized");
    }
    Ok(p)
}

fn check_out(out: &OutArg) -> Result<(), Failure> {
    if let Some(path) = &out.out {
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Failure::Usage(format!("--out: directory not found: {}", dir.display())));
        }
    }
    Ok(())
}

fn emit(out: &OutArg, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn flat(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            write!(s, ",{:e}", m[(i, j)]).unwrap();
        }
    }
    s
}

fn matrix_header(prefix: &str, n: usize) -> String {
    (0..n).flat_map(|i| (0..n).map(move |j| format!(",{prefix}{i}{j}"))).collect()
}

fn family_lines(kind: FamilyKind, order: usize) -> Result<String, Failure> {
    let fam = enumerate(kind, order)?;
    let mut s = String::new();
    for c in &fam.classes {
        writeln!(s, "{}; S={}", c.representative, c.symmetry_factor).unwrap();
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Enumerate { kind, order, out } => {
            check_out(&out)?;
            emit(&out, &family_lines(kind, order)?)
        }
        Command::Series { quantity, order, problem, out } => {
            check_out(&out)?;
            let p = load(&problem)?;
            let mut s = String::new();
            match bare_series(quantity, &p, order)? {
                Series::Scalar(ps) => {
                    s.push_str("order,value\n");
                    for (k, c) in ps.coeffs().iter().enumerate() {
                        writeln!(s, "{k},{c:e}").unwrap();
                    }
                }
                Series::Matrix(ps) => {
                    writeln!(s, "order{}", matrix_header("c", p.dim())).unwrap();
                    for (k, c) in ps.coeffs().iter().enumerate() {
                        writeln!(s, "{k}{}", flat(c)).unwrap();
                    }
                }
            }
            emit(&out, &s)
        }
        Command::Scf { problem, method, damping, tol, max_iter } => {
            let p = load(&problem)?;
            let opts = DysonOptions { damping, tol, max_iter };
            let r = solve_dyson(&p, method, &opts)?;
            println!("method,omega,energy,iterations,residual,converged");
            println!(
                "{},{:.10},{:.10},{},{:e},{}",
                method.name(),
                r.free_energy(&p)?,
                r.energy(&p)?,
                r.iterations,
                r.residual(),
                r.converged
            );
            r.into_converged()?;
            Ok(())
        }
        Command::Sweep { problem, lambda_grid, methods, nodes, out } => {
            check_out(&out)?;
            let p = load(&problem)?;
            let grid = parse_lambda_grid(&lambda_grid).map_err(|e| Failure::Usage(format!("--lambda-grid: {e}")))?;
            let spec = QuadratureSpec { nodes_per_dim: nodes, ..QuadratureSpec::default() };
            let rows = sweep(&p, &grid, &methods, &spec, &DysonOptions::default())?;
            let mut s = String::from("lambda,method,omega,relerr\n");
            for r in rows {
                writeln!(s, "{:e},{},{:.12},{:e}", r.lambda, r.method.name(), r.omega, r.relerr).unwrap();
            }
            emit(&out, &s)
        }
        Command::Oracle { problem, nodes, mc } => {
            let p = load(&problem)?;
            let spec = QuadratureSpec { nodes_per_dim: nodes, ..QuadratureSpec::default() };
            let e = exact_quantities(&p, &spec)?;
            let n = p.dim();
            let mut s = String::from("source,quantity,value,stderr\n");
            writeln!(s, "quadrature,Z,{:.12e},", e.z).unwrap();
            writeln!(s, "quadrature,Omega,{:.12},", e.omega).unwrap();
            for i in 0..n {
                for j in 0..n {
                    writeln!(s, "quadrature,G{i}{j},{:.12},", e.g[(i, j)]).unwrap();
                }
            }
            writeln!(s, "quadrature,E,{:.12},", e.energy).unwrap();
            if let Some(args) = mc {
                let m = monte_carlo(&p, args[0] as usize, args[1])?;
                writeln!(s, "mc,Z_over_Z0,{:.12},{:e}", m.z_over_z0, m.z_over_z0_stderr).unwrap();
                writeln!(s, "mc,Omega,{:.12},{:e}", m.omega, m.omega_stderr).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        writeln!(s, "mc,G{i}{j},{:.12},{:e}", m.g[(i, j)], m.g_stderr[(i, j)]).unwrap();
                    }
                }
            }
            print!("{s}");
            Ok(())
        }
        Command::Verify { suite, problem } => {
            if suite != "paper" {
                return Err(Failure::Usage(format!("--suite: unknown suite {suite:?}")));
            }
            let p = load(&problem)?;
            let opts = DysonOptions::default();
            let hf = solve_dyson(&p, Ansatz::HartreeFock, &opts)?.into_converged()?;
            let gf2 = solve_dyson(&p, Ansatz::Gf2, &opts)?.into_converged()?;
            let exact = exact_quantities(&p, &QuadratureSpec::default())?;
            println!("Free energy 1st order = {:.5}", hf.free_energy(&p)?);
            println!("Free energy 2nd order = {:.5}", gf2.free_energy(&p)?);
            println!("Free energy exact     = {:.5}", exact.omega);
            Ok(())
        }
        Command::Gallery { order_max, out } => {
            check_out(&out)?;
            if order_max > gibbs_mbpt::enumeration::DEFAULT_MAX_ORDER {
                return Err(gibbs_mbpt::Error::OrderTooLarge {
                    order: order_max,
                    cap: gibbs_mbpt::enumeration::DEFAULT_MAX_ORDER,
                }
                .into());
            }
            let mut s = String::new();
            for kind in FamilyKind::ALL {
                for order in 0..=order_max {
                    let fam = enumerate(kind, order)?;
                    let sf: Vec<String> = fam.symmetry_factors().iter().map(u64::to_string).collect();
                    writeln!(s, "# {} order {}: {} classes; S = [{}]", kind.name(), order, fam.len(), sf.join(", ")).unwrap();
                    s.push_str(&family_lines(kind, order)?);
                }
            }
            emit(&out, &s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
