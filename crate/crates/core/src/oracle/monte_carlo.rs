//! Importance sampling from the Gaussian reference measure.
//!
//! Samples are drawn in fixed chunks; chunk `c` uses a ChaCha8 generator
//! seeded with the user seed on stream `c`, and chunk results are combined in
//! chunk order, so estimates do not depend on the thread count.

use crate::error::{Error, Result};
use crate::model::{gaussian_reference, quartic, GibbsProblem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub const MIN_SAMPLES: usize = 1000;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub z_over_z0: f64,
    pub z_over_z0_stderr: f64,
    pub omega: f64,
    pub omega_stderr: f64,
    pub g: DMatrix<f64>,
    pub g_stderr: DMatrix<f64>,
}

#[derive(Clone)]
struct Moments {
    w: f64,
    w2: f64,
    y: Vec<f64>,
    y2: Vec<f64>,
    yw: Vec<f64>,
}

impl Moments {
    fn zero(n: usize) -> Self {
        Moments { w: 0.0, w2: 0.0, y: vec![0.0; n * n], y2: vec![0.0; n * n], yw: vec![0.0; n * n] }
    }

    fn merge(&mut self, o: &Moments) {
        self.w += o.w;
        self.w2 += o.w2;
        for k in 0..self.y.len() {
            self.y[k] += o.y[k];
            self.y2[k] += o.y2[k];
            self.yw[k] += o.yw[k];
        }
    }
}

pub fn monte_carlo(p: &GibbsProblem, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { min: MIN_SAMPLES, got: samples });
    }
    let n = p.dim();
    let l = p.cholesky_factor();
    let m = l.transpose().solve_upper_triangular(&DMatrix::identity(n, n)).expect("positive Cholesky diagonal");
    let v = p.v();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut acc = Moments::zero(n);
            let mut z = vec![0.0; n];
            let mut x = vec![0.0; n];
            for _ in 0..count {
                for zi in z.iter_mut() {
                    *zi = rng.sample(StandardNormal);
                }
                for (r, xr) in x.iter_mut().enumerate() {
                    *xr = (0..n).map(|k| m[(r, k)] * z[k]).sum();
                }
                let w = (-quartic(v, &x)).exp();
                acc.w += w;
                acc.w2 += w * w;
                for i in 0..n {
                    for j in 0..n {
                        let y = w * x[i] * x[j];
                        acc.y[i * n + j] += y;
                        acc.y2[i * n + j] += y * y;
                        acc.yw[i * n + j] += y * w;
                    }
                }
            }
            acc
        })
        .collect();
    let mut tot = Moments::zero(n);
    for part in &parts {
        tot.merge(part);
    }
    let s = samples as f64;
    let mean_w = tot.w / s;
    let var_w = (tot.w2 / s - mean_w * mean_w).max(0.0) * s / (s - 1.0);
    let se_w = (var_w / s).sqrt();
    let mut g = DMatrix::zeros(n, n);
    let mut g_se = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let r = tot.y[k] / tot.w;
            // Delta method for the ratio of means.
            let resid = (tot.y2[k] - 2.0 * r * tot.yw[k] + r * r * tot.w2) / s;
            g[(i, j)] = r;
            g_se[(i, j)] = (resid.max(0.0) / s).sqrt() / mean_w;
        }
    }
    let omega0 = gaussian_reference(p).omega0;
    Ok(MonteCarloEstimate {
        samples,
        z_over_z0: mean_w,
        z_over_z0_stderr: se_w,
        omega: omega0 - mean_w.ln(),
        omega_stderr: se_w / mean_w,
        g,
        g_stderr: g_se,
    })
}
