//! Half-edge Feynman diagrams.
//!
//! Vertex `k` owns half-edges `4k..4k+4`; slots `{0,1}` form side 1 and
//! `{2,3}` side 2 of the interaction line. External half-edges, when present,
//! are `4n` (label i) and `4n+1` (label j).

mod automorphism;
mod canon;
mod classify;
mod skeleton;

pub use automorphism::{count_isomorphisms, is_isomorphic, symmetry_factor, symmetry_factor_with_cap};
pub use canon::{canonical_form, canonical_form_with_cap, canonical_key, CanonicalForm, CanonicalKey, DEFAULT_CANON_CAP};
pub use classify::{classify, is_connected, Flags};
pub use skeleton::{insert, skeleton_decompose, Insertion, SkeletonDecomposition};

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// The order-8 group acting on the four slots of a vertex: swaps within a
/// side and the exchange of sides. `R_GROUP[g][s]` is the image of slot `s`.
pub const R_GROUP: [[usize; 4]; 8] = [
    [0, 1, 2, 3],
    [1, 0, 2, 3],
    [0, 1, 3, 2],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

/// `R_INVERSE[g][t]` is the slot mapped to `t` by `R_GROUP[g]`.
pub(crate) const R_INVERSE: [[usize; 4]; 8] = {
    let mut inv = [[0usize; 4]; 8];
    let mut g = 0;
    while g < 8 {
        let mut s = 0;
        while s < 4 {
            inv[g][R_GROUP[g][s]] = s;
            s += 1;
        }
        g += 1;
    }
    inv
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    order: usize,
    externals: usize,
    truncated: bool,
    partner: Vec<usize>,
}

/// An element of `S_n x R^n`: vertex `k` goes to `perm[k]` with its slots
/// permuted by `R_GROUP[elems[k]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pub perm: Vec<usize>,
    pub elems: Vec<usize>,
}

impl Diagram {
    pub fn from_pairing(order: usize, pairing: &[(usize, usize)], externals: usize, truncated: bool) -> Result<Self> {
        if externals != 0 && externals != 2 {
            return Err(Error::InvalidMatching(format!("externals must be 0 or 2, got {externals}")));
        }
        let total = 4 * order + externals;
        let mut partner = vec![usize::MAX; total];
        for &(a, b) in pairing {
            if a >= total || b >= total {
                return Err(Error::InvalidMatching(format!("id out of range in ({a},{b}); {total} ids")));
            }
            if a == b {
                return Err(Error::InvalidMatching(format!("id {a} paired with itself")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidMatching(format!("id repeated in ({a},{b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if let Some(h) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidMatching(format!("id {h} is unmatched")));
        }
        Self::from_partner(order, externals, truncated, partner)
    }

    /// Build from a partner array (`partner[h]` is the id matched with `h`).
    pub fn from_partner(order: usize, externals: usize, truncated: bool, partner: Vec<usize>) -> Result<Self> {
        let total = 4 * order + externals;
        if (externals != 0 && externals != 2) || partner.len() != total {
            return Err(Error::InvalidMatching(format!("expected {total} ids, got {}", partner.len())));
        }
        for (h, &p) in partner.iter().enumerate() {
            if p >= total || p == h || partner[p] != h {
                return Err(Error::InvalidMatching(format!("partner array is not an involution at {h}")));
            }
        }
        let d = Diagram { order, externals, truncated, partner };
        if truncated {
            if externals != 2 {
                return Err(Error::InvalidMatching("a truncated diagram needs two externals".into()));
            }
            if d.is_external(d.partner[d.ext_id(0)]) {
                return Err(Error::InvalidMatching("truncated externals must attach to internal half-edges".into()));
            }
        }
        Ok(d)
    }

    pub(crate) fn from_partner_unchecked(order: usize, externals: usize, truncated: bool, partner: Vec<usize>) -> Self {
        debug_assert!(Self::from_partner(order, externals, truncated, partner.clone()).is_ok());
        Diagram { order, externals, truncated, partner }
    }

    /// Closed first-order diagram with the two sides closed on themselves.
    pub fn dumbbell() -> Self {
        Self::from_pairing(1, &[(0, 1), (2, 3)], 0, false).unwrap()
    }

    /// Closed first-order diagram with lines crossing between the sides.
    pub fn oyster() -> Self {
        Self::from_pairing(1, &[(0, 2), (1, 3)], 0, false).unwrap()
    }

    /// The zeroth-order Green's function diagram.
    pub fn bare_propagator() -> Self {
        Self::from_pairing(0, &[(0, 1)], 2, false).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn externals(&self) -> usize {
        self.externals
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn num_ids(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    pub fn ext_id(&self, e: usize) -> usize {
        4 * self.order + e
    }

    pub fn is_external(&self, h: usize) -> bool {
        h >= 4 * self.order
    }

    pub fn vertex_of(h: usize) -> usize {
        h / 4
    }

    pub fn slot_of(h: usize) -> usize {
        h % 4
    }

    /// Index of the vertex side carrying `h`: `2k` for side 1, `2k+1` for side 2.
    pub fn side_of(h: usize) -> usize {
        h / 2
    }

    /// All matched pairs `(a, b)` with `a < b`, ascending.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.num_ids()).filter(|&h| h < self.partner[h]).map(|h| (h, self.partner[h])).collect()
    }

    /// Pairs that carry a propagator factor.
    pub fn propagator_edges(&self) -> Vec<(usize, usize)> {
        self.pairs()
            .into_iter()
            .filter(|&(_, b)| !(self.truncated && self.is_external(b)))
            .collect()
    }

    /// Pairs joining two internal half-edges.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|&(_, b)| !self.is_external(b)).collect()
    }

    pub fn with_truncated(&self, truncated: bool) -> Result<Self> {
        Self::from_partner(self.order, self.externals, truncated, self.partner.clone())
    }

    /// Exchange the labels i and j.
    pub fn swap_externals(&self) -> Self {
        if self.externals != 2 {
            return self.clone();
        }
        let (ei, ej) = (self.ext_id(0), self.ext_id(1));
        let map = |h: usize| if h == ei { ej } else if h == ej { ei } else { h };
        let mut partner = vec![0; self.num_ids()];
        for h in 0..self.num_ids() {
            partner[map(h)] = map(self.partner[h]);
        }
        Diagram { partner, ..self.clone() }
    }

    pub fn relabel(&self, g: &Relabeling) -> Result<Self> {
        let n = self.order;
        if g.perm.len() != n || g.elems.len() != n || g.elems.iter().any(|&e| e >= 8) {
            return Err(Error::InvalidArgument("relabeling does not match diagram order".into()));
        }
        let mut seen = vec![false; n];
        for &k in &g.perm {
            if k >= n || seen[k] {
                return Err(Error::InvalidArgument("relabeling is not a permutation".into()));
            }
            seen[k] = true;
        }
        let map = |h: usize| {
            if h >= 4 * n {
                h
            } else {
                4 * g.perm[h / 4] + R_GROUP[g.elems[h / 4]][h % 4]
            }
        };
        let mut partner = vec![0; self.num_ids()];
        for h in 0..self.num_ids() {
            partner[map(h)] = map(self.partner[h]);
        }
        Ok(Diagram { partner, ..self.clone() })
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; ext={}; trunc={}; match=", self.order, self.externals, u8::from(self.truncated))?;
        for (a, b) in self.pairs() {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

impl FromStr for Diagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidMatching(format!("{msg} in {s:?}"));
        let mut order = None;
        let mut ext = None;
        let mut trunc = None;
        let mut pairs = None;
        for field in s.split(';') {
            let (k, v) = field.split_once('=').ok_or_else(|| bad("missing '='"))?;
            let v = v.trim();
            match k.trim() {
                "n" => order = Some(v.parse::<usize>().map_err(|_| bad("bad order"))?),
                "ext" => ext = Some(v.parse::<usize>().map_err(|_| bad("bad ext"))?),
                "trunc" => {
                    trunc = Some(match v {
                        "0" => false,
                        "1" => true,
                        _ => return Err(bad("bad trunc")),
                    })
                }
                "match" => {
                    let mut out = Vec::new();
                    for chunk in v.split(')').filter(|c| !c.trim().is_empty()) {
                        let inner = chunk.trim().strip_prefix('(').ok_or_else(|| bad("bad pair"))?;
                        let (a, b) = inner.split_once(',').ok_or_else(|| bad("bad pair"))?;
                        let a = a.trim().parse().map_err(|_| bad("bad id"))?;
                        let b = b.trim().parse().map_err(|_| bad("bad id"))?;
                        out.push((a, b));
                    }
                    pairs = Some(out);
                }
                _ => return Err(bad("unknown field")),
            }
        }
        match (order, ext, trunc, pairs) {
            (Some(n), Some(e), Some(t), Some(p)) => Diagram::from_pairing(n, &p, e, t),
            _ => Err(bad("missing field")),
        }
    }
}
