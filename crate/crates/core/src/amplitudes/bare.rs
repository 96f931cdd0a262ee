//! Bare diagrammatic series for Z, Omega, G and Sigma, and the bold
//! (skeleton) resummation of Sigma.

use super::{evaluate_with_edge_assignment, family_sum, EdgeAssignment, PowerSeries};
use crate::enumeration::{enumerate, FamilyKind};
use crate::error::{Error, Result};
use crate::model::{gaussian_reference, GibbsProblem};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    ZOverZ0,
    OmegaMinusOmega0,
    Green,
    Sigma,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" => Ok(Quantity::ZOverZ0),
            "omega" => Ok(Quantity::OmegaMinusOmega0),
            "g" => Ok(Quantity::Green),
            "sigma" => Ok(Quantity::Sigma),
            _ => Err(Error::InvalidArgument(format!("unknown series quantity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Scalar(PowerSeries<f64>),
    Matrix(PowerSeries<DMatrix<f64>>),
}

fn scalar_family_series(kind: FamilyKind, p: &GibbsProblem, max_order: usize, sign: f64) -> Result<PowerSeries<f64>> {
    let g0 = gaussian_reference(p).g0;
    let coeffs = (0..=max_order)
        .map(|k| {
            let fam = enumerate(kind, k)?;
            Ok(sign * family_sum(&fam, &g0, p.v_unit())?.scalar().unwrap_or(0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSeries::new(coeffs))
}

fn matrix_family_series(kind: FamilyKind, p: &GibbsProblem, max_order: usize) -> Result<PowerSeries<DMatrix<f64>>> {
    let g0 = gaussian_reference(p).g0;
    let coeffs = (0..=max_order)
        .map(|k| {
            let fam = enumerate(kind, k)?;
            Ok(family_sum(&fam, &g0, p.v_unit())?.into_matrix().unwrap())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSeries::new(coeffs))
}

/// `Z / Z0` in powers of the coupling: sum over all closed diagrams.
pub fn z_series(p: &GibbsProblem, max_order: usize) -> Result<PowerSeries<f64>> {
    scalar_family_series(FamilyKind::Closed, p, max_order, 1.0)
}

/// `Omega - Omega0`: minus the sum over connected closed diagrams.
pub fn omega_series(p: &GibbsProblem, max_order: usize) -> Result<PowerSeries<f64>> {
    scalar_family_series(FamilyKind::ConnectedClosed, p, max_order, -1.0)
}

/// `G`: sum over connected Green's function diagrams.
pub fn green_series(p: &GibbsProblem, max_order: usize) -> Result<PowerSeries<DMatrix<f64>>> {
    matrix_family_series(FamilyKind::GreensFunction, p, max_order)
}

/// `Sigma`: sum over truncated 1PI diagrams.
pub fn sigma_series(p: &GibbsProblem, max_order: usize) -> Result<PowerSeries<DMatrix<f64>>> {
    matrix_family_series(FamilyKind::SelfEnergy1PI, p, max_order)
}

/// Coefficient `k` is the order-`k` family sum with the coupling factored
/// out; evaluate at `lambda` to get the truncated series value.
pub fn bare_series(q: Quantity, p: &GibbsProblem, max_order: usize) -> Result<Series> {
    Ok(match q {
        Quantity::ZOverZ0 => Series::Scalar(z_series(p, max_order)?),
        Quantity::OmegaMinusOmega0 => Series::Scalar(omega_series(p, max_order)?),
        Quantity::Green => Series::Matrix(green_series(p, max_order)?),
        Quantity::Sigma => Series::Matrix(sigma_series(p, max_order)?),
    })
}

#[derive(Debug, Clone)]
pub struct BoldSeriesReport {
    pub bold: PowerSeries<DMatrix<f64>>,
    pub bare: PowerSeries<DMatrix<f64>>,
    /// Largest absolute entry of `bold - bare` at each order.
    pub deviation: Vec<f64>,
}

/// All ways to distribute `total` among `slots` nonnegative parts.
fn compositions(total: usize, slots: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
        if cur.len() + 1 == slots {
            cur.push(left);
            f(cur)?;
            cur.pop();
            return Ok(());
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, slots, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    if slots == 0 {
        return if total == 0 { f(&[]) } else { Ok(()) };
    }
    rec(total, slots, &mut Vec::with_capacity(slots), f)
}

/// Expand every skeleton with the bare G series on each of its lines and
/// compare the result with the bare Sigma series, order by order.
pub fn bold_series_check(p: &GibbsProblem, max_order: usize) -> Result<BoldSeriesReport> {
    let g = green_series(p, max_order)?;
    let bare = sigma_series(p, max_order)?;
    let n = p.dim();
    let mut bold: Vec<DMatrix<f64>> = vec![DMatrix::zeros(n, n); max_order + 1];
    for s in 1..=max_order {
        let fam = enumerate(FamilyKind::Skeleton2PI, s)?;
        for class in &fam.classes {
            let skel = &class.representative;
            let edges = skel.propagator_edges();
            for extra in 0..=(max_order - s) {
                compositions(extra, edges.len(), &mut |parts| {
                    let assignment: EdgeAssignment =
                        edges.iter().zip(parts).map(|(&e, &m)| (e, g.coeff(m).clone())).collect();
                    let f = evaluate_with_edge_assignment(skel, &assignment, p.v_unit())?.into_matrix().unwrap();
                    bold[s + extra] += f / class.symmetry_factor as f64;
                    Ok(())
                })?;
            }
        }
    }
    let bold = PowerSeries::new(bold);
    let deviation = bold.deviation(&bare);
    Ok(BoldSeriesReport { bold, bare, deviation })
}
