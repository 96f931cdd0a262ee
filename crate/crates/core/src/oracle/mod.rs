//! Reference values: tensor-product Gauss–Hermite quadrature after Cholesky
//! whitening against a Hartree-shifted Gaussian, Wick sums for Gaussian moments, and importance-sampled Monte
//! Carlo.

mod monte_carlo;
mod quadrature;

pub use monte_carlo::{monte_carlo, MonteCarloEstimate, MIN_SAMPLES};
pub use quadrature::gauss_hermite;

use crate::enumeration::pairings;
use crate::error::{Error, Result};
use crate::model::{gaussian_reference, GibbsProblem};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

pub const GRID_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nodes_per_dim: usize,
    pub max_dim: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_dim: 60, max_dim: 4 }
    }
}

impl QuadratureSpec {
    fn validate(&self, dim: usize) -> Result<()> {
        if self.nodes_per_dim < 10 {
            return Err(Error::InvalidArgument(format!("need at least 10 nodes per dimension, got {}", self.nodes_per_dim)));
        }
        if dim > self.max_dim {
            return Err(Error::DimensionTooLarge { dim, max: self.max_dim });
        }
        let points = (self.nodes_per_dim as f64).powi(dim as i32);
        if points > GRID_BUDGET {
            return Err(Error::GridBudgetExceeded { points, budget: GRID_BUDGET });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExactQuantities {
    pub z: f64,
    pub omega: f64,
    pub z_over_z0: f64,
    /// Computed without cancellation, accurate for tiny couplings.
    pub omega_minus_omega0: f64,
    pub g: DMatrix<f64>,
    pub energy: f64,
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Whitened tensor grid: visits `(weight, x)` with weights normalized to the
/// standard Gaussian, `x = L^{-T} y`, so that `sum weight * f(x)` approximates
/// the expectation of `f` under `N(0, B^{-1})` with `B = A + diag(shift)`.
struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Column `k` is the image of the `k`-th whitened coordinate.
    m: DMatrix<f64>,
    shift: Vec<f64>,
    /// `ln det(A B^{-1})`.
    log_det_ratio: f64,
}

impl Grid {
    /// With `shifted`, the reference precision gains the first-order Hartree
    /// shift `1/2 diag(v diag G0)`. The narrower Gaussian tracks the quartic
    /// tail far better than `A` alone.
    fn new(p: &GibbsProblem, nodes_per_dim: usize, shifted: bool) -> Grid {
        let (t, w) = gauss_hermite(nodes_per_dim);
        let n = p.dim();
        let shift: Vec<f64> = if shifted {
            let g0 = &gaussian_reference(p).g0;
            let diag = g0.diagonal();
            (0..n).map(|i| (0.5 * p.v().row(i).dot(&diag.transpose())).max(0.0)).collect()
        } else {
            vec![0.0; n]
        };
        let mut b = p.a().clone();
        for (i, s) in shift.iter().enumerate() {
            b[(i, i)] += s;
        }
        let l = nalgebra::Cholesky::new(b).expect("shifted precision stays positive definite").unpack();
        let m = l.transpose().solve_upper_triangular(&DMatrix::identity(n, n)).expect("positive Cholesky diagonal");
        // det(A B^{-1}) = det(I - M^T D M), accurate when the shift is small.
        let dm = DMatrix::from_fn(n, n, |i, j| shift[i] * m[(i, j)]);
        let k = m.transpose() * dm;
        let log_det_ratio = k.symmetric_eigenvalues().iter().map(|mu| (-mu).ln_1p()).sum();
        let sqrt_pi = PI.sqrt();
        Grid {
            nodes: t.iter().map(|x| x * std::f64::consts::SQRT_2).collect(),
            weights: w.iter().map(|x| x / sqrt_pi).collect(),
            m,
            shift,
            log_det_ratio,
        }
    }

    fn half_shift_form(&self, x: &[f64]) -> f64 {
        0.5 * self.shift.iter().zip(x).map(|(s, xi)| s * xi * xi).sum::<f64>()
    }

    /// Run `f(weight, x, |y|^2, acc)` over all grid points whose first
    /// coordinate has node index `first`.
    fn slab(&self, first: usize, acc: &mut [Sum], inner: &mut [f64], f: &impl Fn(f64, &[f64], f64, &mut [f64])) {
        let n = self.m.nrows();
        let k = self.nodes.len();
        let mut idx = vec![0usize; n];
        idx[0] = first;
        // partial[d] holds x accumulated over coordinates 0..=d.
        let mut partial = vec![vec![0.0; n]; n];
        let mut wpart = vec![0.0; n];
        let mut ypart = vec![0.0; n];
        let set = |d: usize, idx: &[usize], partial: &mut Vec<Vec<f64>>, wpart: &mut [f64], ypart: &mut [f64]| {
            let y = self.nodes[idx[d]];
            let (prev_w, prev_y) = if d == 0 { (1.0, 0.0) } else { (wpart[d - 1], ypart[d - 1]) };
            wpart[d] = prev_w * self.weights[idx[d]];
            ypart[d] = prev_y + y * y;
            for r in 0..n {
                let base = if d == 0 { 0.0 } else { partial[d - 1][r] };
                partial[d][r] = base + self.m[(r, d)] * y;
            }
        };
        for d in 0..n {
            set(d, &idx, &mut partial, &mut wpart, &mut ypart);
        }
        loop {
            // Innermost dimension in a plain sum, folded into the compensated
            // accumulators afterwards.
            inner.iter_mut().for_each(|x| *x = 0.0);
            let last = n - 1;
            if last == 0 {
                f(wpart[0], &partial[0], ypart[0], inner);
            } else {
                for j in 0..k {
                    idx[last] = j;
                    set(last, &idx, &mut partial, &mut wpart, &mut ypart);
                    f(wpart[last], &partial[last], ypart[last], inner);
                }
            }
            for (a, x) in acc.iter_mut().zip(inner.iter()) {
                a.add(*x);
            }
            // Advance the odometer over dimensions 1..last.
            let mut d = last;
            loop {
                if d <= 1 {
                    return;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
            }
            for e in d..last {
                set(e, &idx, &mut partial, &mut wpart, &mut ypart);
            }
        }
    }

    /// Sum over the whole grid, in parallel over the first coordinate with a
    /// fixed-order reduction.
    fn integrate(&self, width: usize, f: impl Fn(f64, &[f64], f64, &mut [f64]) + Sync) -> Vec<f64> {
        let slabs: Vec<Vec<Sum>> = (0..self.nodes.len())
            .into_par_iter()
            .map(|first| {
                let mut acc = vec![Sum::default(); width];
                let mut inner = vec![0.0; width];
                self.slab(first, &mut acc, &mut inner, &f);
                acc
            })
            .collect();
        let mut total = vec![Sum::default(); width];
        for slab in slabs {
            for (t, s) in total.iter_mut().zip(slab) {
                t.add(s.s);
                t.add(s.c);
            }
        }
        total.iter().map(Sum::value).collect()
    }
}

/// Z, Omega, G and E from one quadrature pass.
pub fn exact_quantities(p: &GibbsProblem, spec: &QuadratureSpec) -> Result<ExactQuantities> {
    let n = p.dim();
    spec.validate(n)?;
    let grid = Grid::new(p, spec.nodes_per_dim, true);
    let v = p.v().clone();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let width = 4 + pairs.len();
    let sums = grid.integrate(width, |w, x, y2, acc| {
        let u = crate::model::quartic(&v, x);
        let q = grid.half_shift_form(x);
        let em1 = (q - u).exp_m1();
        let e = w * (1.0 + em1);
        acc[0] += w;
        acc[1] += w * em1;
        acc[2] += e;
        acc[3] += e * (0.5 * y2 - q + u);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            acc[4 + k] += e * x[i] * x[j];
        }
    });
    let reference = gaussian_reference(p);
    let log_ratio = 0.5 * grid.log_det_ratio + (sums[1] / sums[0]).ln_1p();
    let z_over_z0 = log_ratio.exp();
    let omega_minus_omega0 = -log_ratio;
    let omega = reference.omega0 + omega_minus_omega0;
    let mass = sums[2];
    let mut g = DMatrix::zeros(n, n);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        g[(i, j)] = sums[4 + k] / mass;
        g[(j, i)] = g[(i, j)];
    }
    Ok(ExactQuantities {
        z: (-omega).exp(),
        omega,
        z_over_z0,
        omega_minus_omega0,
        g,
        energy: sums[3] / mass,
    })
}

/// `<x_{a_1} ... x_{a_m}>_0` by summing over all pairings of the positions.
pub fn gaussian_moment(p: &GibbsProblem, multi_index: &[usize]) -> Result<f64> {
    let n = p.dim();
    if let Some(&bad) = multi_index.iter().find(|&&a| a >= n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad + 1 });
    }
    if multi_index.len() % 2 == 1 {
        return Ok(0.0);
    }
    let g0 = gaussian_reference(p).g0;
    let positions: Vec<usize> = (0..multi_index.len()).collect();
    Ok(pairings(&positions)?
        .map(|pairs| pairs.iter().map(|&(a, b)| g0[(multi_index[a], multi_index[b])]).product::<f64>())
        .sum())
}

/// The same moment by quadrature of the Gaussian measure.
pub fn gaussian_moment_quadrature(p: &GibbsProblem, multi_index: &[usize], spec: &QuadratureSpec) -> Result<f64> {
    let n = p.dim();
    spec.validate(n)?;
    if let Some(&bad) = multi_index.iter().find(|&&a| a >= n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad + 1 });
    }
    let grid = Grid::new(p, spec.nodes_per_dim, false);
    let sums = grid.integrate(1, |w, x, _, acc| {
        acc[0] += w * multi_index.iter().map(|&a| x[a]).product::<f64>();
    });
    Ok(sums[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_problem;

    #[test]
    fn gaussian_case_is_exact() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let p = build_problem(&a, &DMatrix::identity(3, 3), 0.0).unwrap();
        let q = exact_quantities(&p, &QuadratureSpec { nodes_per_dim: 20, max_dim: 4 }).unwrap();
        let r = gaussian_reference(&p);
        assert!((q.omega - r.omega0).abs() < 1e-12);
        assert!((&q.g - &r.g0).amax() < 1e-12);
        assert!((q.energy - 1.5).abs() < 1e-12);
    }

    #[test]
    fn budget_guards() {
        let p = build_problem(&DMatrix::identity(5, 5), &DMatrix::zeros(5, 5), 0.0).unwrap();
        assert!(matches!(exact_quantities(&p, &QuadratureSpec::default()), Err(Error::DimensionTooLarge { .. })));
        let spec = QuadratureSpec { nodes_per_dim: 100, max_dim: 5 };
        assert!(matches!(exact_quantities(&p, &spec), Err(Error::GridBudgetExceeded { .. })));
    }

    #[test]
    fn wick_examples() {
        let a = DMatrix::from_row_slice(4, 4, &[3.0, 0.5, 0.2, 0.1, 0.5, 2.0, 0.3, 0.0, 0.2, 0.3, 2.5, 0.4, 0.1, 0.0, 0.4, 1.8]);
        let p = build_problem(&a, &DMatrix::zeros(4, 4), 0.0).unwrap();
        let g = gaussian_reference(&p).g0;
        let m = gaussian_moment(&p, &[0, 1, 2, 3]).unwrap();
        let want = g[(0, 1)] * g[(2, 3)] + g[(0, 2)] * g[(1, 3)] + g[(0, 3)] * g[(1, 2)];
        assert!((m - want).abs() < 1e-15);
        assert_eq!(gaussian_moment(&p, &[0, 1, 2]).unwrap(), 0.0);
        let m4 = gaussian_moment(&p, &[0, 0, 0, 0]).unwrap();
        assert!((m4 - 3.0 * g[(0, 0)] * g[(0, 0)]).abs() < 1e-15);
        assert_eq!(gaussian_moment(&p, &[]).unwrap(), 1.0);
    }
}
