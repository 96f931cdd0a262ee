//! Problem definition: the Gibbs measure `exp(-x'Ax/2 - U(x))` with the
//! generalized Coulomb interaction `U(x) = 1/8 sum_ij v_ij x_i^2 x_j^2`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const PIVOT_TOL: f64 = 1e-12;
const ASYMMETRY_TOL: f64 = 1e-12;

/// A validated problem. `v` already carries the coupling `lambda`; the
/// unscaled interaction is kept for power-series work.
#[derive(Debug, Clone)]
pub struct GibbsProblem {
    a: DMatrix<f64>,
    v: DMatrix<f64>,
    v_unit: DMatrix<f64>,
    lambda: f64,
    chol: DMatrix<f64>,
    asymmetry_warning: bool,
}

#[derive(Debug, Clone)]
pub struct GaussianReference {
    pub g0: DMatrix<f64>,
    pub log_z0: f64,
    pub omega0: f64,
}

/// On-disk problem format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub lambda: f64,
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).amax() / scale
}

/// Lower Cholesky factor with an explicit relative pivot threshold.
fn cholesky_checked(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let scale = a.amax();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > PIVOT_TOL * scale) {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

pub fn build_problem(a_raw: &DMatrix<f64>, v_raw: &DMatrix<f64>, lambda: f64) -> Result<GibbsProblem> {
    let n = a_raw.nrows();
    if a_raw.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a_raw.ncols() });
    }
    if v_raw.nrows() != n || v_raw.ncols() != n {
        let found = if v_raw.nrows() != n { v_raw.nrows() } else { v_raw.ncols() };
        return Err(Error::DimensionMismatch { expected: n, found });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    if a_raw.iter().chain(v_raw.iter()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix entries must be finite".into()));
    }
    let asymmetry_warning =
        relative_asymmetry(a_raw) > ASYMMETRY_TOL || relative_asymmetry(v_raw) > ASYMMETRY_TOL;
    let a = symmetrize(a_raw);
    let v_unit = symmetrize(v_raw);
    let chol = cholesky_checked(&a)?;
    Ok(GibbsProblem { v: &v_unit * lambda, a, v_unit, lambda, chol, asymmetry_warning })
}

impl GibbsProblem {
    pub fn from_file(file: &ProblemFile) -> Result<Self> {
        let a = rows_to_matrix(&file.a, "A")?;
        let v = rows_to_matrix(&file.v, "v")?;
        build_problem(&a, &v, file.lambda)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> ProblemFile {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        ProblemFile { a: rows(&self.a), v: rows(&self.v_unit), lambda: self.lambda }
    }

    /// Same quadratic part and interaction shape at a different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        build_problem(&self.a, &self.v_unit, lambda)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Interaction including the coupling.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Interaction with the coupling factored out.
    pub fn v_unit(&self) -> &DMatrix<f64> {
        &self.v_unit
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Lower factor `L` with `A = L L'`.
    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn asymmetry_warning(&self) -> bool {
        self.asymmetry_warning
    }

    pub fn log_det_a(&self) -> f64 {
        2.0 * self.chol.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// The quartic part `U(x)` alone.
    pub fn interaction(&self, x: &[f64]) -> f64 {
        quartic(&self.v, x)
    }
}

pub(crate) fn quartic(v: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        let xi2 = x[i] * x[i];
        let mut row = 0.0;
        for j in 0..n {
            row += v[(i, j)] * x[j] * x[j];
        }
        s += xi2 * row;
    }
    s / 8.0
}

fn rows_to_matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    for r in rows {
        if r.len() != n {
            return Err(Error::Parse(format!("matrix {name} must be square ({n} rows, a row has {} entries)", r.len())));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn gaussian_reference(p: &GibbsProblem) -> GaussianReference {
    let n = p.dim();
    let l_inv = p
        .chol
        .clone()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .expect("Cholesky factor has a positive diagonal");
    let g0 = symmetrize(&(l_inv.transpose() * &l_inv));
    let log_z0 = 0.5 * n as f64 * (2.0 * PI).ln() - 0.5 * p.log_det_a();
    GaussianReference { g0, log_z0, omega0: -log_z0 }
}

/// Full energy `x'Ax/2 + U(x)`.
pub fn evaluate_potential(p: &GibbsProblem, x: &DVector<f64>) -> Result<f64> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x.len() });
    }
    let quad = 0.5 * x.dot(&(&p.a * x));
    Ok(quad + quartic(&p.v, x.as_slice()))
}

/// The `tridiag(-1, 2, -1)` 4x4 problem with `v = 0.1 I`.
pub fn sec5_problem() -> GibbsProblem {
    let a = DMatrix::from_fn(4, 4, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    build_problem(&a, &DMatrix::identity(4, 4), 0.1).expect("tridiagonal Laplacian is positive definite")
}
