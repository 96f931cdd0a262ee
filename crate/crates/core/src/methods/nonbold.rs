//! What goes wrong when closed diagrams are dressed naively: replacing every
//! line of a closed 2PI diagram by the full Green's function series counts
//! some bare closed diagrams with the wrong weight.

use crate::amplitudes::{evaluate, evaluate_with_edge_assignment, EdgeAssignment};
use crate::diagrams::{canonical_key, classify, insert, symmetry_factor, Diagram};
use crate::enumeration::{enumerate, FamilyKind};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Orders up to which single insertions exhaust the naive expansion.
const MAX_TARGET_ORDER: usize = 2;

#[derive(Debug, Clone)]
pub struct NaiveBoldCount {
    /// Number of (host line, insertion, orientation) choices producing the
    /// target, plus one if the target is itself a skeleton.
    pub ways: usize,
    /// Weight the naive expansion assigns, `sum 1 / (S_host S_insertion)`.
    pub naive_prefactor: f64,
    /// Correct weight `1 / S`.
    pub bare_prefactor: f64,
}

struct Way {
    host: Diagram,
    at: (usize, usize),
    insertion: Option<Diagram>,
    weight: f64,
}

fn ways(target: &Diagram) -> Result<Vec<Way>> {
    if target.externals() != 0 || !classify(target).connected {
        return Err(Error::InvalidArgument("target must be a connected closed diagram".into()));
    }
    let n = target.order();
    if n > MAX_TARGET_ORDER {
        return Err(Error::OrderTooLarge { order: n, cap: MAX_TARGET_ORDER });
    }
    let key = canonical_key(target)?;
    let mut out = Vec::new();
    if classify(target).two_pi {
        out.push(Way { host: target.clone(), at: (0, 0), insertion: None, weight: 1.0 / symmetry_factor(target)? as f64 });
    }
    for p in 1..n {
        let hosts = enumerate(FamilyKind::ConnectedClosed, p)?;
        let inserts = enumerate(FamilyKind::GreensFunction, n - p)?;
        for h in hosts.classes.iter().filter(|c| c.flags.two_pi) {
            for ins in &inserts.classes {
                let truncated = ins.representative.with_truncated(true)?;
                let symmetric = canonical_key(&truncated.swap_externals())? == canonical_key(&truncated)?;
                for (a, b) in h.representative.propagator_edges() {
                    let orientations: &[(usize, usize)] = if symmetric { &[(a, b)] } else { &[(a, b), (b, a)] };
                    for &at in orientations {
                        let d = insert(&h.representative, at, &truncated)?;
                        if canonical_key(&d)? == key {
                            out.push(Way {
                                host: h.representative.clone(),
                                at,
                                insertion: Some(truncated.clone()),
                                weight: 1.0 / (h.symmetry_factor * ins.symmetry_factor) as f64,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Prefactor the naive bold substitution gives a connected closed diagram of
/// order at most two, next to its true `1/S`.
pub fn naive_bold_prefactor(target: &Diagram) -> Result<NaiveBoldCount> {
    let w = ways(target)?;
    Ok(NaiveBoldCount {
        ways: w.len(),
        naive_prefactor: w.iter().map(|x| x.weight).sum(),
        bare_prefactor: 1.0 / symmetry_factor(target)? as f64,
    })
}

/// The naive contribution to `Omega` attributable to `target`, obtained by
/// evaluating each host with the inserted line carrying the full insertion
/// amplitude, and the bare contribution `F / S`. Both carry the sign of
/// `-F`.
pub fn naive_bold_amplitudes(target: &Diagram, g0: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<(f64, f64)> {
    let mut naive = 0.0;
    for way in ways(target)? {
        let f = match &way.insertion {
            None => evaluate(&way.host, g0, v)?,
            Some(ins) => {
                let t = evaluate(ins, g0, v)?.into_matrix().expect("two external legs");
                let full = g0 * t * g0;
                let mut per_edge = EdgeAssignment::new();
                for e in way.host.propagator_edges() {
                    per_edge.insert(e, g0.clone());
                }
                let (a, b) = way.at;
                if a < b {
                    per_edge.insert((a, b), full);
                } else {
                    per_edge.insert((b, a), full.transpose());
                }
                evaluate_with_edge_assignment(&way.host, &per_edge, v)?
            }
        };
        naive -= way.weight * f.scalar().expect("closed host");
    }
    let bare = -evaluate(target, g0, v)?.scalar().expect("closed target") / symmetry_factor(target)? as f64;
    Ok((naive, bare))
}
