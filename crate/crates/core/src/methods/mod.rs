//! Self-consistent Green's function methods: self-energy ansatzes, their
//! Luttinger–Ward functionals, the Dyson fixed point and free energies.

mod checks;
mod nonbold;
mod scf;
mod sweep;

pub use checks::{phi_derivability_check, ring_sum_check, ring_term, RingSumReport};
pub use nonbold::{naive_bold_amplitudes, naive_bold_prefactor, NaiveBoldCount};
pub use scf::{solve_dyson, DysonOptions, ScfResult};
pub use sweep::{loglog_slope, parse_lambda_grid, sweep, SweepMethod, SweepRow};

use crate::error::{Error, Result};
use crate::model::GibbsProblem;
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ansatz {
    HartreeFock,
    Gf2,
    Gw,
}

impl Ansatz {
    pub fn name(self) -> &'static str {
        match self {
            Ansatz::HartreeFock => "hf",
            Ansatz::Gf2 => "gf2",
            Ansatz::Gw => "gw",
        }
    }
}

impl std::str::FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hf" => Ok(Ansatz::HartreeFock),
            "gf2" => Ok(Ansatz::Gf2),
            "gw" => Ok(Ansatz::Gw),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

fn check_square(g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<()> {
    let n = v.nrows();
    if v.ncols() != n || g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
    }
    Ok(())
}

fn hadamard_square(g: &DMatrix<f64>) -> DMatrix<f64> {
    g.component_mul(g)
}

/// `-1/2 diag(v diag(G))`.
pub fn sigma_hartree(g: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let rho = g.diagonal();
    DMatrix::from_diagonal(&((v * rho) * -0.5))
}

/// `-v o G`.
pub fn sigma_fock(g: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    -v.component_mul(g)
}

/// Second-order (bubble plus exchange) self-energy.
pub fn sigma_second_order(g: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let p = hadamard_square(g);
    let bubble = g.component_mul(&(v * &p * v)) * 0.5;
    let mut exchange = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += v[(i, k)] * g[(k, j)] * g[(k, l)] * g[(l, i)] * v[(j, l)];
                }
            }
            exchange[(i, j)] = s;
        }
    }
    bubble + exchange
}

/// `W = [I + v (G o G) / 2]^{-1} v`, never forming `v^{-1}`.
pub fn screened_interaction(g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let m = DMatrix::identity(n, n) + v * hadamard_square(g) * 0.5;
    let lu = m.lu();
    if lu.determinant().abs() < 1e-300 {
        return Err(Error::SingularScreening);
    }
    let w = lu.solve(v).ok_or(Error::SingularScreening)?;
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularScreening);
    }
    Ok(w)
}

pub fn sigma_ansatz(kind: Ansatz, g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(g, v)?;
    let s = match kind {
        Ansatz::HartreeFock => sigma_hartree(g, v) + sigma_fock(g, v),
        Ansatz::Gf2 => sigma_hartree(g, v) + sigma_fock(g, v) + sigma_second_order(g, v),
        Ansatz::Gw => sigma_hartree(g, v) - g.component_mul(&screened_interaction(g, v)?),
    };
    Ok((&s + s.transpose()) * 0.5)
}

fn phi_hartree(g: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let rho = g.diagonal();
    -0.25 * rho.dot(&(v * &rho))
}

fn phi_first(g: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    phi_hartree(g, v) - 0.5 * v.component_mul(&hadamard_square(g)).sum()
}

fn phi_second(g: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let p = hadamard_square(g);
    let bubble = 0.125 * p.component_mul(&(v * &p * v)).sum();
    let mut exchange = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    exchange += v[(i, k)] * v[(j, l)] * g[(i, j)] * g[(k, j)] * g[(k, l)] * g[(l, i)];
                }
            }
        }
    }
    bubble + 0.25 * exchange
}

/// `Tr log [I + v (G o G) / 2]` on the principal branch, via the similar
/// symmetric matrix `I + L' v L / 2` with `G o G = L L'`.
fn trace_log_screening(g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    let p = hadamard_square(g);
    let l = Cholesky::new(p).ok_or(Error::NotSpd)?.unpack();
    let n = g.nrows();
    let s = DMatrix::identity(n, n) + l.transpose() * v * &l * 0.5;
    let eig = SymmetricEigen::new((&s + s.transpose()) * 0.5).eigenvalues;
    let mut total = 0.0;
    for &mu in eig.iter() {
        if !(mu > 0.0) {
            return Err(Error::LogBranchFailure(mu));
        }
        total += mu.ln();
    }
    Ok(total)
}

/// `Phi` by its closed-form expression.
pub fn lw_functional(kind: Ansatz, g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    check_square(g, v)?;
    Ok(match kind {
        Ansatz::HartreeFock => phi_first(g, v),
        Ansatz::Gf2 => phi_first(g, v) + phi_second(g, v),
        Ansatz::Gw => phi_hartree(g, v) - trace_log_screening(g, v)?,
    })
}

/// `Phi` through `Phi^(k) = tr(G Sigma^(k)) / 2k`; only defined for the
/// finite-order ansatzes.
pub fn lw_functional_trace(kind: Ansatz, g: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<Option<f64>> {
    check_square(g, v)?;
    let first = 0.5 * (g * (sigma_hartree(g, v) + sigma_fock(g, v))).trace();
    Ok(match kind {
        Ansatz::HartreeFock => Some(first),
        Ansatz::Gf2 => Some(first + 0.25 * (g * sigma_second_order(g, v)).trace()),
        Ansatz::Gw => None,
    })
}

pub fn log_det_spd(g: &DMatrix<f64>) -> Result<f64> {
    let c = Cholesky::new(g.clone()).ok_or(Error::NotSpd)?;
    Ok(2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// `tr(AG)/2 - log det G / 2 - (Phi + N log(2 pi e)) / 2`.
pub fn free_energy_lw(p: &GibbsProblem, g: &DMatrix<f64>, phi: f64) -> Result<f64> {
    let n = p.dim();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
    }
    let phi0 = n as f64 * (2.0 * PI * std::f64::consts::E).ln();
    Ok(0.5 * (p.a() * g).trace() - 0.5 * log_det_spd(g)? - 0.5 * (phi + phi0))
}

/// `E = tr(AG + I) / 4`.
pub fn galitskii_migdal_energy(p: &GibbsProblem, g: &DMatrix<f64>) -> Result<f64> {
    let n = p.dim();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
    }
    Ok(0.25 * ((p.a() * g).trace() + n as f64))
}
