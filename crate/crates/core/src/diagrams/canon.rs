//! Canonical labeling.
//!
//! Each connected component is relabeled by breadth-first discovery: vertices
//! get labels in the order they are reached, and a newly reached vertex is
//! oriented so that the entering half-edge lands on slot 0 (two choices, the
//! stabilizer of slot 0 in R). Every root and every orientation choice is
//! explored; the lexicographically smallest partner encoding wins and the
//! number of labelings attaining it is the automorphism count.

use super::{classify::components, Diagram, R_GROUP, R_INVERSE};
use crate::error::{Error, Result};

pub const DEFAULT_CANON_CAP: usize = 8;

/// Byte string identifying an isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub automorphisms: u64,
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    d: &'a Diagram,
    size: usize,
    label: Vec<usize>,
    elem: Vec<usize>,
    order: Vec<usize>,
    enc: Vec<u8>,
    best: Option<Vec<u8>>,
    count: u64,
    generation: u64,
}

impl<'a> Search<'a> {
    fn new(d: &'a Diagram, size: usize) -> Self {
        Search {
            d,
            size,
            label: vec![UNSET; d.order()],
            elem: vec![0; d.order()],
            order: Vec::with_capacity(size),
            enc: Vec::with_capacity(4 * size),
            best: None,
            count: 0,
            generation: 0,
        }
    }

    /// Compare the value about to be written at `pos` with the incumbent.
    /// Returns `None` to prune, otherwise whether the prefix still ties.
    fn admit(&self, pos: usize, value: u8, tight: bool) -> Option<bool> {
        if !tight {
            return Some(false);
        }
        match self.best.as_ref() {
            None => Some(false),
            Some(b) if value > b[pos] => None,
            Some(b) => Some(value == b[pos]),
        }
    }

    fn start(&mut self, root: usize, elem: usize) {
        self.label[root] = 0;
        self.elem[root] = elem;
        self.order.push(root);
        let tight = self.best.is_some();
        self.step(0, tight);
        self.order.pop();
        self.label[root] = UNSET;
    }

    fn step(&mut self, pos: usize, tight: bool) {
        if pos == 4 * self.size {
            if tight {
                self.count += 1;
            } else {
                self.best = Some(self.enc.clone());
                self.count = 1;
                self.generation += 1;
            }
            return;
        }
        let u = self.order[pos / 4];
        let h = 4 * u + R_INVERSE[self.elem[u]][pos % 4];
        let p = self.d.partner(h);
        if self.d.is_external(p) {
            let value = (4 * self.size + (p - 4 * self.d.order())) as u8;
            self.emit(pos, value, tight);
            return;
        }
        let w = p / 4;
        if self.label[w] != UNSET {
            let value = (4 * self.label[w] + R_GROUP[self.elem[w]][p % 4]) as u8;
            self.emit(pos, value, tight);
            return;
        }
        let next = self.order.len();
        let value = (4 * next) as u8;
        let mut tight = tight;
        for g in 0..8 {
            if R_GROUP[g][p % 4] != 0 {
                continue;
            }
            let generation = self.generation;
            if let Some(child) = self.admit(pos, value, tight) {
                self.label[w] = next;
                self.elem[w] = g;
                self.order.push(w);
                self.enc.push(value);
                self.step(pos + 1, child);
                self.enc.pop();
                self.order.pop();
                self.label[w] = UNSET;
            }
            if self.generation != generation {
                tight = true;
            }
        }
    }

    fn emit(&mut self, pos: usize, value: u8, tight: bool) {
        if let Some(child) = self.admit(pos, value, tight) {
            self.enc.push(value);
            self.step(pos + 1, child);
            self.enc.pop();
        }
    }
}

/// Canonical encoding of one component: the minimal encoding and the
/// number of labelings achieving it.
fn canonical_component(d: &Diagram, vertices: &[usize], roots: &[(usize, usize)]) -> (Vec<u8>, u64) {
    let mut s = Search::new(d, vertices.len());
    for &(root, elem) in roots {
        s.start(root, elem);
    }
    (s.best.unwrap_or_default(), s.count)
}

/// Isomorphism-invariant local signature of a vertex: loops on one side,
/// loops across sides, external legs, then the sorted multiplicities of
/// lines to neighbouring vertices. Only vertices with the smallest signature
/// need to be tried as roots.
fn vertex_signature(d: &Diagram, v: usize) -> [u8; 7] {
    let mut same = 0u8;
    let mut cross = 0u8;
    let mut ext = 0u8;
    let mut nbr: [(usize, u8); 4] = [(usize::MAX, 0); 4];
    for s in 0..4 {
        let p = d.partner(4 * v + s);
        if d.is_external(p) {
            ext += 1;
        } else if p / 4 == v {
            if p % 4 / 2 == s / 2 {
                same += 1;
            } else {
                cross += 1;
            }
        } else if let Some(slot) = nbr.iter_mut().find(|e| e.0 == p / 4 || e.0 == usize::MAX) {
            slot.0 = p / 4;
            slot.1 += 1;
        }
    }
    let mut mult = [nbr[0].1, nbr[1].1, nbr[2].1, nbr[3].1];
    mult.sort_unstable();
    [same, cross, ext, mult[0], mult[1], mult[2], mult[3]]
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

pub fn canonical_form_with_cap(d: &Diagram, cap: usize) -> Result<CanonicalForm> {
    if d.order() > cap {
        return Err(Error::OrderTooLarge { order: d.order(), cap });
    }
    let comps = components(d);
    let mut main: Option<usize> = None;
    if d.externals() == 2 {
        let p = d.partner(d.ext_id(0));
        if !d.is_external(p) {
            main = comps.iter().position(|c| c.contains(&(p / 4)));
        }
    }

    let mut key = vec![d.order() as u8, d.externals() as u8, u8::from(d.truncated())];
    let mut automorphisms = 1u64;

    match main {
        Some(ci) => {
            let p = d.partner(d.ext_id(0));
            let roots: Vec<(usize, usize)> = (0..8).filter(|&g| R_GROUP[g][p % 4] == 0).map(|g| (p / 4, g)).collect();
            let (enc, count) = canonical_component(d, &comps[ci], &roots);
            key.push(comps[ci].len() as u8);
            key.extend_from_slice(&enc);
            automorphisms *= count;
        }
        None => key.push(0),
    }

    let mut closed: Vec<Vec<u8>> = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        if Some(ci) == main {
            continue;
        }
        let best = comp.iter().map(|&v| vertex_signature(d, v)).min().unwrap();
        let roots: Vec<(usize, usize)> = comp
            .iter()
            .filter(|&&v| vertex_signature(d, v) == best)
            .flat_map(|&v| (0..8).map(move |g| (v, g)))
            .collect();
        let (enc, count) = canonical_component(d, comp, &roots);
        automorphisms *= count;
        let mut block = vec![comp.len() as u8];
        block.extend_from_slice(&enc);
        closed.push(block);
    }
    closed.sort();
    let mut run = 1;
    for i in 1..=closed.len() {
        if i < closed.len() && closed[i] == closed[i - 1] {
            run += 1;
        } else {
            automorphisms *= factorial(run);
            run = 1;
        }
    }
    for block in closed {
        key.extend_from_slice(&block);
    }
    Ok(CanonicalForm { key: CanonicalKey(key), automorphisms })
}

pub fn canonical_form(d: &Diagram) -> Result<CanonicalForm> {
    canonical_form_with_cap(d, DEFAULT_CANON_CAP)
}

pub fn canonical_key(d: &Diagram) -> Result<CanonicalKey> {
    canonical_form(d).map(|c| c.key)
}
