//! Truncated formal power series with scalar or matrix coefficients.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::fmt::Debug;

pub trait Coefficient: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn max_abs(&self) -> f64;
}

impl Coefficient for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for DMatrix<f64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
}

/// `sum_k c_k lambda^k` for `k = 0..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<T: Coefficient> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> PowerSeries<T> {
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs an order-0 coefficient");
        PowerSeries { coeffs }
    }

    pub fn constant(c: T, max_order: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; max_order + 1];
        coeffs[0] = c;
        PowerSeries { coeffs }
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn truncate(&self, max_order: usize) -> Self {
        PowerSeries { coeffs: self.coeffs[..=max_order.min(self.max_order())].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.max_order().min(other.max_order());
        PowerSeries { coeffs: (0..=k).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let k = self.max_order().min(other.max_order());
        let coeffs = (0..=k)
            .map(|m| {
                let mut acc = self.coeffs[0].mul(&other.coeffs[m]);
                for j in 1..=m {
                    acc = acc.add(&self.coeffs[j].mul(&other.coeffs[m - j]));
                }
                acc
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// Value at `lambda` (Horner).
    pub fn evaluate(&self, lambda: f64) -> T {
        let mut acc = self.coeffs[self.max_order()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(lambda).add(c);
        }
        acc
    }

    /// Largest absolute entry of `self - other` at each order.
    pub fn deviation(&self, other: &Self) -> Vec<f64> {
        self.sub(other).coeffs.iter().map(Coefficient::max_abs).collect()
    }
}

impl PowerSeries<f64> {
    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut b = vec![a[0].exp()];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b.push(s / k as f64);
        }
        PowerSeries { coeffs: b }
    }

    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::SingularSeries);
        }
        let mut b = vec![a[0].ln()];
        for k in 1..a.len() {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * a[k - j]).sum();
            b.push((a[k] - s / k as f64) / a[0]);
        }
        Ok(PowerSeries { coeffs: b })
    }

    pub fn inverse(&self) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] == 0.0 {
            return Err(Error::SingularSeries);
        }
        let mut b = vec![1.0 / a[0]];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b.push(-s / a[0]);
        }
        Ok(PowerSeries { coeffs: b })
    }
}

impl PowerSeries<DMatrix<f64>> {
    /// Two-sided inverse; requires an invertible order-0 coefficient.
    pub fn inverse(&self) -> Result<Self> {
        let a = &self.coeffs;
        let b0 = a[0].clone().try_inverse().ok_or(Error::SingularSeries)?;
        let mut b = vec![b0.clone()];
        for k in 1..a.len() {
            let mut s = a[1].clone() * &b[k - 1];
            for j in 2..=k {
                s += &a[j] * &b[k - j];
            }
            b.push(-(&b0 * s));
        }
        Ok(PowerSeries { coeffs: b })
    }
}
