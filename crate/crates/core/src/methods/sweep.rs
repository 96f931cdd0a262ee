//! Free-energy error against the quadrature oracle across coupling strengths.

use super::{solve_dyson, Ansatz, DysonOptions};
use crate::amplitudes::omega_series;
use crate::error::{Error, Result};
use crate::model::{gaussian_reference, GibbsProblem};
use crate::oracle::{exact_quantities, QuadratureSpec};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMethod {
    Scf(Ansatz),
    /// Bare series truncated at the given order.
    Bare(usize),
}

impl SweepMethod {
    pub fn name(self) -> String {
        match self {
            SweepMethod::Scf(a) => a.name().to_string(),
            SweepMethod::Bare(k) => format!("bare{k}"),
        }
    }
}

impl std::str::FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_prefix("bare") {
            let k: usize = k.parse().map_err(|_| Error::InvalidArgument(format!("unknown method {s:?}")))?;
            if k == 0 || k > 4 {
                return Err(Error::InvalidArgument(format!("bare order must be 1..=4, got {k}")));
            }
            return Ok(SweepMethod::Bare(k));
        }
        s.parse().map(SweepMethod::Scf)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub lambda: f64,
    pub method: SweepMethod,
    pub omega: f64,
    pub omega_exact: f64,
    /// `|Omega - Omega_exact| / |Omega_exact - Omega_0|`.
    pub relerr: f64,
}

/// Parse `log:lo:hi:n`, `lin:lo:hi:n` or a comma-separated list.
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("bad lambda grid {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [kind @ ("log" | "lin"), lo, hi, n] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            if n == 0 || !(lo <= hi) || (*kind == "log" && lo <= 0.0) {
                return Err(bad());
            }
            (0..n)
                .map(|k| {
                    let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                    if *kind == "log" {
                        (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + t * (hi - lo)
                    }
                })
                .collect()
        }
        [list] => list.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if grid.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(bad());
    }
    Ok(grid)
}

/// Evaluate every method at every coupling `lambda * v_unit`.
pub fn sweep(
    p: &GibbsProblem,
    lambdas: &[f64],
    methods: &[SweepMethod],
    spec: &QuadratureSpec,
    opts: &DysonOptions,
) -> Result<Vec<SweepRow>> {
    let max_bare = methods.iter().filter_map(|m| if let SweepMethod::Bare(k) = m { Some(*k) } else { None }).max();
    let series = match max_bare {
        Some(k) => Some(omega_series(p, k)?),
        None => None,
    };
    let omega0 = gaussian_reference(p).omega0;
    let per_lambda: Vec<Result<Vec<SweepRow>>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let q = p.with_lambda(lambda)?;
            let exact = exact_quantities(&q, spec)?;
            methods
                .iter()
                .map(|&method| {
                    let delta = match method {
                        SweepMethod::Bare(k) => {
                            let s = series.as_ref().expect("series built for bare methods");
                            (1..=k).map(|j| s.coeff(j) * lambda.powi(j as i32)).sum::<f64>()
                        }
                        SweepMethod::Scf(a) => {
                            let r = solve_dyson(&q, a, opts)?.into_converged()?;
                            r.free_energy(&q)? - omega0
                        }
                    };
                    Ok(SweepRow {
                        lambda,
                        method,
                        omega: omega0 + delta,
                        omega_exact: exact.omega,
                        relerr: (delta - exact.omega_minus_omega0).abs() / exact.omega_minus_omega0.abs(),
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_lambda {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
