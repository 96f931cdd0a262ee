//! Isomorphism classes of diagram families, generated by running through all
//! pairings of the half-edges and deduplicating by canonical key.

use crate::diagrams::{canonical_form, classify, is_connected, symmetry_factor, CanonicalKey, Diagram, Flags};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Closed,
    ConnectedClosed,
    GreensFunction,
    SelfEnergy1PI,
    Skeleton2PI,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Closed,
        FamilyKind::ConnectedClosed,
        FamilyKind::GreensFunction,
        FamilyKind::SelfEnergy1PI,
        FamilyKind::Skeleton2PI,
    ];

    pub fn externals(self) -> usize {
        match self {
            FamilyKind::Closed | FamilyKind::ConnectedClosed => 0,
            _ => 2,
        }
    }

    pub fn truncated(self) -> bool {
        matches!(self, FamilyKind::SelfEnergy1PI | FamilyKind::Skeleton2PI)
    }

    /// Whether a diagram with these flags belongs to the family.
    pub fn admits(self, f: &Flags) -> bool {
        match self {
            FamilyKind::Closed => true,
            FamilyKind::ConnectedClosed | FamilyKind::GreensFunction => f.connected,
            FamilyKind::SelfEnergy1PI => f.one_pi,
            FamilyKind::Skeleton2PI => f.two_pi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Closed => "closed",
            FamilyKind::ConnectedClosed => "connected",
            FamilyKind::GreensFunction => "greens",
            FamilyKind::SelfEnergy1PI => "1pi",
            FamilyKind::Skeleton2PI => "2pi",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown diagram family {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct DiagramClass {
    pub representative: Diagram,
    pub symmetry_factor: u64,
    pub key: CanonicalKey,
    pub flags: Flags,
}

#[derive(Debug, Clone)]
pub struct DiagramFamily {
    pub kind: FamilyKind,
    pub order: usize,
    pub classes: Vec<DiagramClass>,
}

impl DiagramFamily {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Sum of `8^n n! / S` over the classes: the number of labeled diagrams.
    pub fn labeled_total(&self) -> u64 {
        let group = 8u64.pow(self.order as u32) * (1..=self.order as u64).product::<u64>();
        self.classes.iter().map(|c| group / c.symmetry_factor).sum()
    }

    pub fn symmetry_factors(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.symmetry_factor).collect()
    }
}

/// All perfect matchings of a set of ids. The smallest unmatched id is
/// paired first, with partners tried in ascending order.
#[derive(Debug, Clone)]
pub struct Pairings {
    ids: Vec<usize>,
    choice: Vec<usize>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl Pairings {
    /// Pairings whose first `prefix.len()` choices are pinned.
    fn with_prefix(mut ids: Vec<usize>, prefix: &[usize]) -> Self {
        ids.sort_unstable();
        let m = ids.len() / 2;
        let mut choice = vec![0; m];
        choice[..prefix.len()].copy_from_slice(prefix);
        Pairings { ids, choice, fixed: prefix.len(), started: false, done: false }
    }

    fn advance(&mut self) -> bool {
        let m = self.choice.len();
        for level in (self.fixed..m).rev() {
            let options = 2 * (m - level) - 1;
            if self.choice[level] + 1 < options {
                self.choice[level] += 1;
                for c in &mut self.choice[level + 1..] {
                    *c = 0;
                }
                return true;
            }
        }
        false
    }

    fn current(&self) -> Vec<(usize, usize)> {
        let mut rest = self.ids.clone();
        let mut out = Vec::with_capacity(self.choice.len());
        for &c in &self.choice {
            let a = rest.remove(0);
            let b = rest.remove(c);
            out.push((a, b));
        }
        out
    }
}

impl Iterator for Pairings {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.current())
    }
}

pub fn pairings(ids: &[usize]) -> Result<Pairings> {
    if ids.len() % 2 == 1 {
        return Err(Error::OddCount(ids.len()));
    }
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("ids must be distinct".into()));
    }
    Ok(Pairings::with_prefix(sorted, &[]))
}

pub fn double_factorial_odd(m: usize) -> u64 {
    (1..=m as u64).step_by(2).product()
}

fn partner_array(total: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut partner = vec![0; total];
    for &(a, b) in pairs {
        partner[a] = b;
        partner[b] = a;
    }
    partner
}

/// Prefixes used to split a pairing stream into independent parallel tasks.
fn task_prefixes(m: usize) -> Vec<Vec<usize>> {
    match m {
        0 | 1 => vec![vec![]],
        2 => (0..3).map(|a| vec![a]).collect(),
        _ => {
            let (a, b) = (2 * m - 1, 2 * m - 3);
            (0..a).flat_map(|x| (0..b).map(move |y| vec![x, y])).collect()
        }
    }
}

type Seen = HashMap<CanonicalKey, ((usize, usize), Diagram)>;

/// Deduplicate the diagrams produced from `ids` (plus any `fixed` pairs)
/// that pass `keep`, keeping the first-seen member of each class.
fn dedup_stream(
    order: usize,
    externals: usize,
    ids: &[usize],
    fixed: &[(usize, usize)],
    keep: &(dyn Fn(&Diagram) -> bool + Sync),
) -> Result<Vec<Diagram>> {
    let total = 4 * order + externals;
    let prefixes = task_prefixes(ids.len() / 2);
    let partial: Vec<Seen> = prefixes
        .par_iter()
        .enumerate()
        .map(|(task, prefix)| -> Result<Seen> {
            let mut seen = Seen::new();
            for (seq, mut pairs) in Pairings::with_prefix(ids.to_vec(), prefix).enumerate() {
                pairs.extend_from_slice(fixed);
                let d = Diagram::from_partner_unchecked(order, externals, false, partner_array(total, &pairs));
                if !keep(&d) {
                    continue;
                }
                let key = canonical_form(&d)?.key;
                seen.entry(key).or_insert(((task, seq), d));
            }
            Ok(seen)
        })
        .collect::<Result<_>>()?;
    let mut merged = Seen::new();
    for map in partial {
        for (key, item) in map {
            match merged.get(&key) {
                Some(existing) if existing.0 <= item.0 => {}
                _ => {
                    merged.insert(key, item);
                }
            }
        }
    }
    Ok(merged.into_values().map(|(_, d)| d).collect())
}

fn build_family(kind: FamilyKind, order: usize, reps: Vec<Diagram>) -> Result<DiagramFamily> {
    let mut classes: Vec<DiagramClass> = reps
        .into_par_iter()
        .map(|d| -> Result<Option<DiagramClass>> {
            let flags = classify(&d);
            if !kind.admits(&flags) {
                return Ok(None);
            }
            let form = canonical_form(&d)?;
            let s = symmetry_factor(&d)?;
            debug_assert_eq!(s, form.automorphisms);
            Ok(Some(DiagramClass { representative: d, symmetry_factor: s, key: form.key, flags }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    classes.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(DiagramFamily { kind, order, classes })
}

fn compute(kind: FamilyKind, order: usize, cap: usize) -> Result<DiagramFamily> {
    match kind {
        FamilyKind::Closed | FamilyKind::ConnectedClosed => {
            let ids: Vec<usize> = (0..4 * order).collect();
            let reps = if kind == FamilyKind::Closed {
                dedup_stream(order, 0, &ids, &[], &|_| true)?
            } else {
                dedup_stream(order, 0, &ids, &[], &is_connected)?
            };
            build_family(kind, order, reps)
        }
        FamilyKind::GreensFunction => {
            if order == 0 {
                return build_family(kind, 0, vec![Diagram::bare_propagator()]);
            }
            // Every connected class has a member with label i on half-edge 0.
            let ei = 4 * order;
            let ids: Vec<usize> = (1..4 * order).chain([ei + 1]).collect();
            let reps = dedup_stream(order, 2, &ids, &[(0, ei)], &is_connected)?;
            build_family(kind, order, reps)
        }
        FamilyKind::SelfEnergy1PI | FamilyKind::Skeleton2PI => {
            if order == 0 {
                return Ok(DiagramFamily { kind, order, classes: Vec::new() });
            }
            let greens = enumerate_with_cap(FamilyKind::GreensFunction, order, cap)?;
            let reps = greens
                .classes
                .iter()
                .map(|c| c.representative.with_truncated(true))
                .collect::<Result<Vec<_>>>()?;
            build_family(kind, order, reps)
        }
    }
}

type Cache = Mutex<HashMap<(FamilyKind, usize), Arc<DiagramFamily>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn enumerate_with_cap(kind: FamilyKind, order: usize, cap: usize) -> Result<Arc<DiagramFamily>> {
    if order > cap {
        return Err(Error::OrderTooLarge { order, cap });
    }
    if let Some(f) = cache().lock().unwrap().get(&(kind, order)) {
        return Ok(f.clone());
    }
    let family = Arc::new(compute(kind, order, cap)?);
    cache().lock().unwrap().entry((kind, order)).or_insert_with(|| family.clone());
    Ok(family)
}

/// Classes of `kind` at `order`, sorted by canonical key. Results are cached.
pub fn enumerate(kind: FamilyKind, order: usize) -> Result<Arc<DiagramFamily>> {
    enumerate_with_cap(kind, order, DEFAULT_MAX_ORDER)
}

/// Number of labeled diagrams of the family, counted directly on the
/// unrestricted pairing stream.
pub fn labeled_count(kind: FamilyKind, order: usize) -> Result<u64> {
    if order > 3 {
        return Err(Error::OrderTooLarge { order, cap: 3 });
    }
    let ext = kind.externals();
    let total = 4 * order + ext;
    let ids: Vec<usize> = (0..total).collect();
    let count = task_prefixes(total / 2)
        .par_iter()
        .map(|prefix| {
            Pairings::with_prefix(ids.clone(), prefix)
                .filter(|pairs| {
                    let d = Diagram::from_partner_unchecked(order, ext, false, partner_array(total, pairs));
                    match kind {
                        FamilyKind::Closed => true,
                        FamilyKind::ConnectedClosed | FamilyKind::GreensFunction => is_connected(&d),
                        _ => match d.with_truncated(true) {
                            Ok(t) => kind.admits(&classify(&t)),
                            Err(_) => false,
                        },
                    }
                })
                .count() as u64
        })
        .sum();
    Ok(count)
}
