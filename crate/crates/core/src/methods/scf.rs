use super::{free_energy_lw, galitskii_migdal_energy, lw_functional, sigma_ansatz, Ansatz};
use crate::error::{Error, Result};
use crate::model::{gaussian_reference, GibbsProblem};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DysonOptions {
    /// Mixing weight of the new iterate, in `(0, 1]`.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DysonOptions {
    fn default() -> Self {
        DysonOptions { damping: 1.0, tol: 1e-10, max_iter: 100 }
    }
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    pub kind: Ansatz,
    pub g: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl ScfResult {
    pub fn residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.residual() })
        }
    }

    pub fn phi(&self, p: &GibbsProblem) -> Result<f64> {
        lw_functional(self.kind, &self.g, p.v())
    }

    /// Luttinger–Ward free energy at the final iterate.
    pub fn free_energy(&self, p: &GibbsProblem) -> Result<f64> {
        free_energy_lw(p, &self.g, self.phi(p)?)
    }

    pub fn energy(&self, p: &GibbsProblem) -> Result<f64> {
        galitskii_migdal_energy(p, &self.g)
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.amax()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Damped Dyson iteration `G <- (1-a) G + a (A - Sigma[G])^{-1}` from
/// `G = A^{-1}`, stopping on relative spectral-norm change below `tol`.
/// Running out of iterations is reported through `converged = false`.
pub fn solve_dyson(p: &GibbsProblem, kind: Ansatz, opts: &DysonOptions) -> Result<ScfResult> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidArgument(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument("tolerance and iteration limit must be positive".into()));
    }
    let a = p.a();
    let v = p.v();
    let mut g = gaussian_reference(p).g0;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let sigma = sigma_ansatz(kind, &g, v)?;
        let dyson = Cholesky::new(symmetrize(&(a - &sigma))).ok_or(Error::LostPositivity(it))?;
        let fresh = dyson.inverse();
        let next = symmetrize(&(&g * (1.0 - opts.damping) + fresh * opts.damping));
        if Cholesky::new(next.clone()).is_none() {
            return Err(Error::LostPositivity(it));
        }
        let res = spectral_norm(&(&next - &g)) / spectral_norm(&g);
        history.push(res);
        g = next;
        if res < opts.tol {
            converged = true;
            break;
        }
    }
    let sigma = sigma_ansatz(kind, &g, v)?;
    Ok(ScfResult { kind, g, sigma, iterations, residual_history: history, converged })
}
