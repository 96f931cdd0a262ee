//! Direct search over `S_n x R^n` for maps carrying one labeled diagram onto
//! another, with external half-edges held fixed.

use super::{canon::DEFAULT_CANON_CAP, Diagram, R_GROUP};
use crate::error::{Error, Result};

/// Vertices ordered so that, within each component, every vertex after the
/// first is adjacent to an earlier one. The external-attached component goes
/// first.
fn search_order(d: &Diagram) -> Vec<usize> {
    let n = d.order();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut starts: Vec<usize> = Vec::new();
    if d.externals() == 2 {
        let p = d.partner(d.ext_id(0));
        if !d.is_external(p) {
            starts.push(p / 4);
        }
    }
    starts.extend(0..n);
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut head = order.len();
        order.push(s);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for slot in 0..4 {
                let p = d.partner(4 * u + slot);
                if !d.is_external(p) && !seen[p / 4] {
                    seen[p / 4] = true;
                    order.push(p / 4);
                }
            }
        }
    }
    order
}

struct Matcher<'a> {
    a: &'a Diagram,
    b: &'a Diagram,
    order: Vec<usize>,
    image: Vec<Option<(usize, usize)>>,
    used: Vec<bool>,
    count: u64,
    limit: u64,
}

impl Matcher<'_> {
    fn map(&self, h: usize) -> Option<usize> {
        if self.a.is_external(h) {
            return Some(h);
        }
        self.image[h / 4].map(|(w, g)| 4 * w + R_GROUP[g][h % 4])
    }

    fn consistent(&self, u: usize) -> bool {
        (0..4).all(|s| {
            let h = 4 * u + s;
            match self.map(self.a.partner(h)) {
                Some(q) => self.b.partner(self.map(h).unwrap()) == q,
                None => true,
            }
        })
    }

    fn run(&mut self, k: usize) {
        if self.count >= self.limit {
            return;
        }
        if k == self.order.len() {
            self.count += 1;
            return;
        }
        let u = self.order[k];
        for w in 0..self.b.order() {
            if self.used[w] {
                continue;
            }
            self.used[w] = true;
            for g in 0..8 {
                self.image[u] = Some((w, g));
                if self.consistent(u) {
                    self.run(k + 1);
                }
            }
            self.image[u] = None;
            self.used[w] = false;
        }
    }
}

/// Number of relabelings `g` with `g . a == b` as labeled diagrams, stopping
/// once `limit` is reached.
pub fn count_isomorphisms(a: &Diagram, b: &Diagram, limit: u64) -> u64 {
    if a.order() != b.order() || a.externals() != b.externals() || a.truncated() != b.truncated() {
        return 0;
    }
    if a.externals() == 2 {
        let ei = a.ext_id(0);
        let direct_a = a.is_external(a.partner(ei));
        let direct_b = b.is_external(b.partner(ei));
        if direct_a != direct_b {
            return 0;
        }
    }
    if a.order() == 0 {
        return u64::from(a.partners() == b.partners());
    }
    let mut m = Matcher {
        a,
        b,
        order: search_order(a),
        image: vec![None; a.order()],
        used: vec![false; a.order()],
        count: 0,
        limit,
    };
    m.run(0);
    m.count
}

pub fn is_isomorphic(a: &Diagram, b: &Diagram) -> bool {
    count_isomorphisms(a, b, 1) == 1
}

pub fn symmetry_factor_with_cap(d: &Diagram, cap: usize) -> Result<u64> {
    if d.order() > cap {
        return Err(Error::OrderTooLarge { order: d.order(), cap });
    }
    Ok(count_isomorphisms(d, d, u64::MAX))
}

/// `|Aut(d)|` within `S_n x R^n`.
pub fn symmetry_factor(d: &Diagram) -> Result<u64> {
    symmetry_factor_with_cap(d, DEFAULT_CANON_CAP)
}
