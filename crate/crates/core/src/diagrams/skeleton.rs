//! Insertion of truncated Green's function diagrams into propagator lines,
//! and the inverse: splitting a 1PI diagram into its 2PI skeleton and the
//! maximal insertions.

use super::{canonical_key, classify, symmetry_factor, CanonicalKey, Diagram};
use crate::error::{Error, Result};

/// Replace the propagator `at = (h1, h2)` of `host` by `ins`, joining `h1` to
/// the half-edge that carried label i in `ins` and `h2` to the one that
/// carried j. Host half-edge ids below `4 * host.order()` are unchanged.
pub fn insert(host: &Diagram, at: (usize, usize), ins: &Diagram) -> Result<Diagram> {
    if !ins.truncated() || ins.externals() != 2 || ins.order() == 0 {
        return Err(Error::NotTruncated);
    }
    let (h1, h2) = at;
    if h1 >= host.num_ids() || h2 >= host.num_ids() || host.partner(h1) != h2 {
        return Err(Error::NotAMatchedPair(h1, h2));
    }
    if host.truncated() && (host.is_external(h1) || host.is_external(h2)) {
        return Err(Error::NotAMatchedPair(h1, h2));
    }
    let (n, m) = (host.order(), ins.order());
    let total = 4 * (n + m) + host.externals();
    let host_map = |h: usize| if h < 4 * n { h } else { h + 4 * m };
    let ins_map = |h: usize| 4 * n + h;
    let mut partner = vec![usize::MAX; total];
    for h in 0..host.num_ids() {
        if h != h1 && h != h2 {
            partner[host_map(h)] = host_map(host.partner(h));
        }
    }
    for h in 0..4 * m {
        let p = ins.partner(h);
        if !ins.is_external(p) {
            partner[ins_map(h)] = ins_map(p);
        }
    }
    let ei = ins_map(ins.partner(ins.ext_id(0)));
    let ej = ins_map(ins.partner(ins.ext_id(1)));
    let (a, b) = (host_map(h1), host_map(h2));
    partner[a] = ei;
    partner[ei] = a;
    partner[b] = ej;
    partner[ej] = b;
    Diagram::from_partner(n + m, host.externals(), host.truncated(), partner)
}

#[derive(Debug, Clone)]
pub struct Insertion {
    /// Skeleton half-edges `(h1, h2)` of the collapsed propagator; `h1` joins
    /// the insertion's label i.
    pub at: (usize, usize),
    pub diagram: Diagram,
    pub externally_symmetric: bool,
}

#[derive(Debug, Clone)]
pub struct SkeletonDecomposition {
    pub skeleton: Diagram,
    pub insertions: Vec<Insertion>,
    pub redundancy_factor: u64,
    pub symmetry_factor: u64,
    pub skeleton_symmetry_factor: u64,
    pub insertion_symmetry_factors: Vec<u64>,
}

impl SkeletonDecomposition {
    /// Put every insertion back into the skeleton.
    pub fn reassemble(&self) -> Result<Diagram> {
        let mut d = self.skeleton.clone();
        for ins in &self.insertions {
            d = insert(&d, ins.at, &ins.diagram)?;
        }
        Ok(d)
    }

    /// `S_skeleton * prod S_insertion / S`.
    pub fn redundancy_from_symmetry(&self) -> f64 {
        let num = self.skeleton_symmetry_factor as f64 * self.insertion_symmetry_factors.iter().product::<u64>() as f64;
        num / self.symmetry_factor as f64
    }
}

struct Cut {
    inside: u64,
    edges: [(usize, usize); 2],
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn cuts(d: &Diagram) -> Vec<Cut> {
    let n = d.order();
    let anchors = bit(d.partner(d.ext_id(0)) / 4) | bit(d.partner(d.ext_id(1)) / 4);
    let edges: Vec<(usize, usize)> = d.internal_edges().into_iter().filter(|&(a, b)| a / 4 != b / 4).collect();
    let mut out = Vec::new();
    for k in 0..edges.len() {
        for l in (k + 1)..edges.len() {
            let mut adj = vec![0u64; n];
            for (idx, &(a, b)) in edges.iter().enumerate() {
                if idx != k && idx != l {
                    adj[a / 4] |= bit(b / 4);
                    adj[b / 4] |= bit(a / 4);
                }
            }
            let start = (0..n).find(|&v| anchors & bit(v) != 0).unwrap();
            let mut reach = bit(start);
            loop {
                let mut grown = reach;
                for v in 0..n {
                    if reach & bit(v) != 0 {
                        grown |= adj[v];
                    }
                }
                if grown == reach {
                    break;
                }
                reach = grown;
            }
            let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
            let rest = all & !reach;
            if rest == 0 || reach & anchors != anchors {
                continue;
            }
            out.push(Cut { inside: rest, edges: [edges[k], edges[l]] });
        }
    }
    out
}

/// Extract the vertices in `inside` as a truncated diagram; `yi` and `yj`
/// become the half-edges attached to labels i and j.
fn extract(d: &Diagram, inside: u64, yi: usize, yj: usize) -> Diagram {
    let verts: Vec<usize> = (0..d.order()).filter(|&v| inside & bit(v) != 0).collect();
    let m = verts.len();
    let mut index = vec![usize::MAX; d.order()];
    for (k, &v) in verts.iter().enumerate() {
        index[v] = k;
    }
    let map = |h: usize| 4 * index[h / 4] + h % 4;
    let mut partner = vec![usize::MAX; 4 * m + 2];
    for &v in &verts {
        for s in 0..4 {
            let h = 4 * v + s;
            if h == yi || h == yj {
                continue;
            }
            partner[map(h)] = map(d.partner(h));
        }
    }
    partner[map(yi)] = 4 * m;
    partner[4 * m] = map(yi);
    partner[map(yj)] = 4 * m + 1;
    partner[4 * m + 1] = map(yj);
    Diagram::from_partner_unchecked(m, 2, true, partner)
}

pub fn skeleton_decompose(d: &Diagram) -> Result<SkeletonDecomposition> {
    if d.externals() != 2 || !d.truncated() {
        return Err(Error::NotTruncated);
    }
    if !classify(d).one_pi {
        return Err(Error::NotOnePI);
    }
    let all = cuts(d);
    let maximal: Vec<&Cut> = all
        .iter()
        .filter(|c| !all.iter().any(|o| o.inside != c.inside && o.inside & c.inside == c.inside))
        .collect();

    let mut covered = 0u64;
    for c in &maximal {
        if covered & c.inside != 0 {
            return Err(Error::InvalidArgument("maximal insertions overlap".into()));
        }
        covered |= c.inside;
    }

    // Orient each cut edge as (outside, inside).
    let mut raw = Vec::new();
    for c in &maximal {
        let orient = |(a, b): (usize, usize)| if c.inside & bit(a / 4) != 0 { (b, a) } else { (a, b) };
        let (x1, y1) = orient(c.edges[0]);
        let (x2, y2) = orient(c.edges[1]);
        if covered & (bit(x1 / 4) | bit(x2 / 4)) != 0 {
            return Err(Error::InvalidArgument("maximal insertions touch".into()));
        }
        raw.push((c.inside, x1, y1, x2, y2));
    }

    let keep: Vec<usize> = (0..d.order()).filter(|&v| covered & bit(v) == 0).collect();
    let ns = keep.len();
    let mut index = vec![usize::MAX; d.order()];
    for (k, &v) in keep.iter().enumerate() {
        index[v] = k;
    }
    let map = |h: usize| if d.is_external(h) { 4 * ns + (h - 4 * d.order()) } else { 4 * index[h / 4] + h % 4 };
    let mut partner = vec![usize::MAX; 4 * ns + 2];
    for &v in &keep {
        for s in 0..4 {
            let h = 4 * v + s;
            let p = d.partner(h);
            let target = if d.is_external(p) || covered & bit(p / 4) == 0 {
                map(p)
            } else {
                let &(_, x1, y1, x2, _) = raw.iter().find(|r| r.2 == p || r.4 == p).unwrap();
                if p == y1 {
                    map(x2)
                } else {
                    map(x1)
                }
            };
            partner[map(h)] = target;
        }
    }
    for e in 0..2 {
        let ext = 4 * ns + e;
        partner[ext] = map(d.partner(d.ext_id(e)));
    }
    let skeleton = Diagram::from_partner(ns, 2, true, partner)?;

    let mut insertions = Vec::new();
    for &(inside, x1, y1, x2, y2) in &raw {
        let fwd = extract(d, inside, y1, y2);
        let rev = extract(d, inside, y2, y1);
        let (kf, kr) = (canonical_key(&fwd)?, canonical_key(&rev)?);
        let symmetric = kf == kr;
        let (diagram, at) = if kf <= kr { (fwd, (map(x1), map(x2))) } else { (rev, (map(x2), map(x1))) };
        insertions.push(Insertion { at, diagram, externally_symmetric: symmetric });
    }

    let symmetry = symmetry_factor(d)?;
    let skeleton_symmetry = symmetry_factor(&skeleton)?;
    let insertion_symmetry: Vec<u64> = insertions.iter().map(|i| symmetry_factor(&i.diagram)).collect::<Result<_>>()?;
    let redundancy = count_ways(d, &skeleton, &insertions)?;
    let decomposition = SkeletonDecomposition {
        skeleton,
        insertions,
        redundancy_factor: redundancy,
        symmetry_factor: symmetry,
        skeleton_symmetry_factor: skeleton_symmetry,
        insertion_symmetry_factors: insertion_symmetry,
    };
    let formula = decomposition.skeleton_symmetry_factor * decomposition.insertion_symmetry_factors.iter().product::<u64>();
    if formula != redundancy * symmetry {
        return Err(Error::RedundancyMismatch { counted: redundancy, formula: formula / symmetry });
    }
    Ok(decomposition)
}

/// Count the placements of the insertions on distinct skeleton propagators
/// (with either orientation) that rebuild `target`, then divide out
/// permutations of isomorphic insertions and the orientation of
/// externally symmetric ones.
fn count_ways(target: &Diagram, skeleton: &Diagram, insertions: &[Insertion]) -> Result<u64> {
    let want = canonical_key(target)?;
    let edges = skeleton.internal_edges();
    let k = insertions.len();
    let mut matches = 0u64;
    let mut chosen: Vec<(usize, bool)> = Vec::with_capacity(k);
    place(skeleton, insertions, &edges, &want, &mut chosen, &mut matches)?;

    let keys: Vec<CanonicalKey> = insertions.iter().map(|i| canonical_key(&i.diagram)).collect::<Result<_>>()?;
    let mut quotient = 1u64;
    let mut done = vec![false; k];
    for a in 0..k {
        if done[a] {
            continue;
        }
        let mut mult = 0u64;
        for b in a..k {
            if keys[b] == keys[a] {
                done[b] = true;
                mult += 1;
            }
        }
        quotient *= (1..=mult).product::<u64>();
    }
    quotient *= 1u64 << insertions.iter().filter(|i| i.externally_symmetric).count();
    if matches % quotient != 0 {
        return Err(Error::InvalidArgument(format!("{matches} placements not divisible by {quotient}")));
    }
    Ok(matches / quotient)
}

fn place(
    skeleton: &Diagram,
    insertions: &[Insertion],
    edges: &[(usize, usize)],
    want: &CanonicalKey,
    chosen: &mut Vec<(usize, bool)>,
    matches: &mut u64,
) -> Result<()> {
    if chosen.len() == insertions.len() {
        let mut d = skeleton.clone();
        for (ins, &(e, flip)) in insertions.iter().zip(chosen.iter()) {
            let (a, b) = edges[e];
            let at = if flip { (b, a) } else { (a, b) };
            d = insert(&d, at, &ins.diagram)?;
        }
        if canonical_key(&d)? == *want {
            *matches += 1;
        }
        return Ok(());
    }
    for e in 0..edges.len() {
        if chosen.iter().any(|&(c, _)| c == e) {
            continue;
        }
        for flip in [false, true] {
            chosen.push((e, flip));
            place(skeleton, insertions, edges, want, chosen, matches)?;
            chosen.pop();
        }
    }
    Ok(())
}
