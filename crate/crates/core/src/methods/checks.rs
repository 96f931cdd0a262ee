use super::{lw_functional, screened_interaction, sigma_ansatz, Ansatz};
use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

/// Largest deviation between `Sigma[G]_ij` and the symmetric central
/// difference `(Phi(G + eps E) - Phi(G - eps E)) / (4 eps)` with
/// `E = e_i e_j' + e_j e_i'`.
pub fn phi_derivability_check(kind: Ansatz, g: &DMatrix<f64>, v: &DMatrix<f64>, eps: f64) -> Result<f64> {
    let n = g.nrows();
    let sigma = sigma_ansatz(kind, g, v)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] += 1.0;
            e[(j, i)] += 1.0;
            let plus = g + &e * eps;
            let minus = g - &e * eps;
            if Cholesky::new(plus.clone()).is_none() || Cholesky::new(minus.clone()).is_none() {
                return Err(Error::PerturbationBreaksSpd(i, j));
            }
            let fd = 0.5 * (lw_functional(kind, &plus, v)? - lw_functional(kind, &minus, v)?) / (2.0 * eps);
            worst = worst.max((fd - sigma[(i, j)]).abs());
        }
    }
    Ok(worst)
}

/// `F_k / S_k = -G o ([-v (G o G)]^k v) / 2^k`, the `k`-th ring diagram.
pub fn ring_term(g: &DMatrix<f64>, v: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let step = -(v * g.component_mul(g)) * 0.5;
    let mut m = v.clone();
    for _ in 0..k {
        m = &step * m;
    }
    -g.component_mul(&m)
}

#[derive(Debug, Clone)]
pub struct RingSumReport {
    /// `|sum_{k<=k_max} ring_k - (-G o W)|` entrywise maximum.
    pub deviation: f64,
    /// Spectral radius of `v (G o G) / 2`.
    pub spectral_radius: f64,
    /// Geometric bound on the neglected tail.
    pub tail_bound: f64,
}

/// Compare partial ring sums with the screened-interaction closed form.
pub fn ring_sum_check(g: &DMatrix<f64>, v: &DMatrix<f64>, k_max: usize) -> Result<RingSumReport> {
    let n = g.nrows();
    let p = g.component_mul(g);
    let l = Cholesky::new(p).ok_or(Error::NotSpd)?.unpack();
    let s = l.transpose() * v * &l * 0.5;
    let rho = SymmetricEigen::new((&s + s.transpose()) * 0.5).eigenvalues.amax();
    if rho >= 1.0 {
        return Err(Error::DivergentSeries(rho));
    }
    let closed = -g.component_mul(&screened_interaction(g, v)?);
    let mut partial = DMatrix::zeros(n, n);
    for k in 0..=k_max {
        partial += ring_term(g, v, k);
    }
    let scale = (g.amax().powi(2) * v.amax()) * n as f64;
    Ok(RingSumReport {
        deviation: (partial - closed).amax(),
        spectral_radius: rho,
        tail_bound: scale * rho.powi(k_max as i32 + 1) / (1.0 - rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::sigma_second_order;

    fn sample() -> (DMatrix<f64>, DMatrix<f64>) {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 0.8, -0.1, 0.1, -0.1, 1.2]);
        let v = DMatrix::from_row_slice(3, 3, &[0.3, 0.05, 0.0, 0.05, 0.2, 0.02, 0.0, 0.02, 0.25]);
        (g, v)
    }

    #[test]
    fn ring_one_is_bubble() {
        let (g, v) = sample();
        let bubble = g.component_mul(&(&v * g.component_mul(&g) * &v)) * 0.5;
        assert!((ring_term(&g, &v, 1) - &bubble).amax() < 1e-15);
        let exchange_free = sigma_second_order(&g, &v) - &bubble;
        assert!(exchange_free.amax() > 0.0);
    }

    #[test]
    fn ring_zero_is_fock() {
        let (g, v) = sample();
        assert!((ring_term(&g, &v, 0) + v.component_mul(&g)).amax() < 1e-15);
    }

    #[test]
    fn partial_sums_shrink() {
        let (g, v) = sample();
        let devs: Vec<f64> = (0..8).map(|k| ring_sum_check(&g, &v, k).unwrap().deviation).collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]));
        let r = ring_sum_check(&g, &v, 30).unwrap();
        assert!(r.deviation < 1e-14);
        assert!(r.deviation <= r.tail_bound + 1e-15);
    }

    #[test]
    fn divergent() {
        let g = DMatrix::identity(2, 2) * 2.0;
        let v = DMatrix::identity(2, 2);
        assert!(matches!(ring_sum_check(&g, &v, 3), Err(Error::DivergentSeries(_))));
    }
}
