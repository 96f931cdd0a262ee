//! Feynman amplitudes by direct index summation.
//!
//! Every vertex side carries one summation index; vertex `k` contributes
//! `-v[a][b]` for its two side indices, and each propagator-bearing edge
//! contributes a matrix entry. In a truncated diagram the side attached to an
//! external leg takes the external index instead.

mod bare;
mod series;

pub use bare::{bare_series, bold_series_check, green_series, omega_series, sigma_series, z_series, BoldSeriesReport, Quantity, Series};
pub use series::{Coefficient, PowerSeries};

use crate::diagrams::Diagram;
use crate::enumeration::DiagramFamily;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Per-edge propagators keyed by the matched pair `(a, b)` with `a < b`.
pub type EdgeAssignment = BTreeMap<(usize, usize), DMatrix<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Amplitude {
    Scalar(f64),
    Matrix(DMatrix<f64>),
}

impl Amplitude {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Amplitude::Scalar(x) => Some(*x),
            Amplitude::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            Amplitude::Matrix(m) => Some(m),
            Amplitude::Scalar(_) => None,
        }
    }

    pub fn into_matrix(self) -> Option<DMatrix<f64>> {
        match self {
            Amplitude::Matrix(m) => Some(m),
            Amplitude::Scalar(_) => None,
        }
    }

    fn add_scaled(&mut self, other: &Amplitude, s: f64) {
        match (self, other) {
            (Amplitude::Scalar(a), Amplitude::Scalar(b)) => *a += s * b,
            (Amplitude::Matrix(a), Amplitude::Matrix(b)) => *a += b * s,
            _ => panic!("mixing scalar and matrix amplitudes"),
        }
    }
}

struct Factor<'a> {
    m: &'a DMatrix<f64>,
    row: usize,
    col: usize,
    negate: bool,
}

struct Plan<'a> {
    n: usize,
    depth: usize,
    ready: Vec<Vec<Factor<'a>>>,
    out: Option<(usize, usize)>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

/// Contract `d` with edge matrices supplied by `edge_matrix` for each
/// propagator-bearing pair `(a, b)`, `a < b`.
fn contract<'a>(
    d: &Diagram,
    edge_matrix: impl Fn((usize, usize)) -> Result<&'a DMatrix<f64>>,
    v: &'a DMatrix<f64>,
) -> Result<Amplitude> {
    let n = v.nrows();
    if v.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.ncols() });
    }
    let order = d.order();
    let sides = 2 * order;
    let var = |h: usize| if d.is_external(h) { sides + (h - 4 * order) } else { h / 2 };
    let nvars = sides + d.externals();
    let mut parent: Vec<usize> = (0..nvars).collect();
    if d.truncated() {
        for e in 0..2 {
            let ext = d.ext_id(e);
            let (a, b) = (find(&mut parent, var(d.partner(ext))), find(&mut parent, var(ext)));
            if a != b {
                parent[a] = b;
            }
        }
    }

    // Summation order: external classes first, then the rest.
    let mut position = vec![usize::MAX; nvars];
    let mut depth = 0;
    let mut out = None;
    if d.externals() == 2 {
        let ci = find(&mut parent, sides);
        let cj = find(&mut parent, sides + 1);
        position[ci] = 0;
        depth = 1;
        if cj != ci {
            position[cj] = 1;
            depth = 2;
        }
        out = Some((position[ci], position[cj]));
    }
    for x in 0..nvars {
        let c = find(&mut parent, x);
        if position[c] == usize::MAX {
            position[c] = depth;
            depth += 1;
        }
    }
    let slot = |parent: &mut [usize], x: usize| position[find(parent, x)];

    let mut ready: Vec<Vec<Factor>> = (0..depth.max(1)).map(|_| Vec::new()).collect();
    for k in 0..order {
        let (r, c) = (slot(&mut parent, 2 * k), slot(&mut parent, 2 * k + 1));
        ready[r.max(c)].push(Factor { m: v, row: r, col: c, negate: true });
    }
    for (a, b) in d.propagator_edges() {
        let m = edge_matrix((a, b))?;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
        }
        let (r, c) = (slot(&mut parent, var(a)), slot(&mut parent, var(b)));
        ready[r.max(c)].push(Factor { m, row: r, col: c, negate: false });
    }

    let plan = Plan { n, depth, ready, out };
    let mut idx = vec![0usize; depth];
    match plan.out {
        None => {
            let mut total = 0.0;
            if depth == 0 {
                total = 1.0;
            } else {
                sum_scalar(&plan, 0, 1.0, &mut idx, &mut total);
            }
            Ok(Amplitude::Scalar(total))
        }
        Some(_) => {
            let mut m = DMatrix::zeros(n, n);
            sum_matrix(&plan, 0, 1.0, &mut idx, &mut m);
            Ok(Amplitude::Matrix(m))
        }
    }
}

fn level_product(plan: &Plan, level: usize, idx: &[usize], mut prod: f64) -> f64 {
    for f in &plan.ready[level] {
        let x = f.m[(idx[f.row], idx[f.col])];
        prod *= if f.negate { -x } else { x };
        if prod == 0.0 {
            break;
        }
    }
    prod
}

fn sum_scalar(plan: &Plan, level: usize, prod: f64, idx: &mut [usize], total: &mut f64) {
    for x in 0..plan.n {
        idx[level] = x;
        let p = level_product(plan, level, idx, prod);
        if p == 0.0 {
            continue;
        }
        if level + 1 == plan.depth {
            *total += p;
        } else {
            sum_scalar(plan, level + 1, p, idx, total);
        }
    }
}

fn sum_matrix(plan: &Plan, level: usize, prod: f64, idx: &mut [usize], out: &mut DMatrix<f64>) {
    let (oi, oj) = plan.out.unwrap();
    for x in 0..plan.n {
        idx[level] = x;
        let p = level_product(plan, level, idx, prod);
        if p == 0.0 {
            continue;
        }
        if level + 1 == plan.depth {
            out[(idx[oi], idx[oj])] += p;
        } else {
            sum_matrix(plan, level + 1, p, idx, out);
        }
    }
}

/// `F_d` with the same propagator on every line.
pub fn evaluate(d: &Diagram, propagator: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<Amplitude> {
    contract(d, |_| Ok(propagator), v)
}

/// `F_d` with a separate matrix on each propagator-bearing edge. For an
/// edge `(a, b)` with `a < b`, the row index of its matrix is the index of
/// the vertex side holding `a`.
pub fn evaluate_with_edge_assignment(d: &Diagram, per_edge: &EdgeAssignment, v: &DMatrix<f64>) -> Result<Amplitude> {
    contract(d, |e| per_edge.get(&e).ok_or(Error::MissingEdgeAssignment(e.0, e.1)), v)
}

/// `sum F / S` over the classes of a family.
pub fn family_sum(family: &DiagramFamily, propagator: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<Amplitude> {
    let n = v.nrows();
    let mut total = if family.kind.externals() == 0 {
        Amplitude::Scalar(0.0)
    } else {
        Amplitude::Matrix(DMatrix::zeros(n, n))
    };
    for class in &family.classes {
        let f = evaluate(&class.representative, propagator, v)?;
        total.add_scaled(&f, 1.0 / class.symmetry_factor as f64);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gaussian_reference, sec5_problem};

    fn brute_dumbbell(g: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        let n = g.nrows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s -= v[(i, j)] * g[(i, i)] * g[(j, j)];
            }
        }
        s
    }

    #[test]
    fn dumbbell_and_oyster() {
        let p = sec5_problem();
        let g = gaussian_reference(&p).g0;
        let v = p.v();
        let db = evaluate(&Diagram::dumbbell(), &g, v).unwrap().scalar().unwrap();
        assert!((db - brute_dumbbell(&g, v)).abs() < 1e-14);
        let oy = evaluate(&Diagram::oyster(), &g, v).unwrap().scalar().unwrap();
        let want: f64 = -(0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| v[(i, j)] * g[(i, j)] * g[(i, j)]).sum::<f64>();
        assert!((oy - want).abs() < 1e-14);
    }

    #[test]
    fn truncated_hartree_is_diagonal() {
        let p = sec5_problem();
        let g = gaussian_reference(&p).g0;
        let v = p.v();
        let d = Diagram::from_pairing(1, &[(0, 4), (1, 5), (2, 3)], 2, true).unwrap();
        let m = evaluate(&d, &g, v).unwrap().into_matrix().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { -(0..4).map(|k| v[(i, k)] * g[(k, k)]).sum::<f64>() } else { 0.0 };
                assert!((m[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn missing_edge() {
        let p = sec5_problem();
        let err = evaluate_with_edge_assignment(&Diagram::oyster(), &EdgeAssignment::new(), p.v());
        assert!(matches!(err, Err(Error::MissingEdgeAssignment(0, 2))));
    }

    #[test]
    fn dimension_mismatch() {
        let p = sec5_problem();
        let g = DMatrix::identity(3, 3);
        assert!(matches!(evaluate(&Diagram::oyster(), &g, p.v()), Err(Error::DimensionMismatch { .. })));
    }
}
