#![allow(dead_code)]

use gibbs_mbpt::diagrams::{canonical_key, insert, skeleton_decompose, Diagram};
use gibbs_mbpt::enumeration::{enumerate, FamilyKind};
use gibbs_mbpt::model::{build_problem, GibbsProblem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SPD `A = B B' + I` and a symmetric nonnegative `v`, entries from a seeded
/// stream.
pub fn random_problem(n: usize, seed: u64, lambda: f64) -> GibbsProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
    let a = &b * b.transpose() + DMatrix::identity(n, n);
    let w = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0));
    build_problem(&a, &((&w + w.transpose()) * 0.5), lambda).unwrap()
}

pub fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
    (&b * b.transpose() + DMatrix::identity(n, n)) * 0.5
}

/// Expected `(S, S_skeleton, insertion factors, r)` of a worked case.
pub struct Signature {
    pub skeleton_s: u64,
    /// `(order, S, symmetric)` per insertion.
    pub insertions: Vec<(usize, u64, bool)>,
    pub s: u64,
    pub r: u64,
}

pub fn truncated_insertions(order: usize, s: u64, symmetric: bool) -> Vec<Diagram> {
    enumerate(FamilyKind::GreensFunction, order)
        .unwrap()
        .classes
        .iter()
        .filter(|c| c.symmetry_factor == s)
        .map(|c| c.representative.with_truncated(true).unwrap())
        .filter(|d| (canonical_key(&d.swap_externals()).unwrap() == canonical_key(d).unwrap()) == symmetric)
        .collect()
}

pub fn skeletons(order: usize, s: u64) -> Vec<Diagram> {
    enumerate(FamilyKind::Skeleton2PI, order)
        .unwrap()
        .classes
        .iter()
        .filter(|c| c.symmetry_factor == s)
        .map(|c| c.representative.clone())
        .collect()
}

/// Place insertions on distinct lines of `skel` in every orientation until
/// the decomposition of the result has the given signature.
pub fn find_on(skel: &Diagram, sig: &Signature) -> Option<Diagram> {
    let pools: Vec<Vec<Diagram>> = sig.insertions.iter().map(|&(o, s, sym)| truncated_insertions(o, s, sym)).collect();
    let mut want_ins: Vec<u64> = sig.insertions.iter().map(|x| x.1).collect();
    want_ins.sort();
    let edges = skel.internal_edges();
    let mut choices: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for _ in 0..sig.insertions.len() {
        let mut next = Vec::new();
        for c in &choices {
            for &(a, b) in &edges {
                if c.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
                    continue;
                }
                for at in [(a, b), (b, a)] {
                    let mut c2 = c.clone();
                    c2.push(at);
                    next.push(c2);
                }
            }
        }
        choices = next;
    }
    for placement in &choices {
        let mut picks: Vec<Vec<&Diagram>> = vec![vec![]];
        for pool in &pools {
            picks = picks.iter().flat_map(|p| pool.iter().map(move |d| [p.clone(), vec![d]].concat())).collect();
        }
        for pick in picks {
            let mut d = skel.clone();
            for (at, ins) in placement.iter().zip(&pick) {
                d = insert(&d, *at, ins).unwrap();
            }
            let dec = skeleton_decompose(&d).unwrap();
            let mut got_ins = dec.insertion_symmetry_factors.clone();
            got_ins.sort();
            if dec.symmetry_factor == sig.s
                && dec.skeleton_symmetry_factor == sig.skeleton_s
                && got_ins == want_ins
                && dec.redundancy_factor == sig.r
            {
                assert_eq!(canonical_key(&dec.skeleton).unwrap(), canonical_key(skel).unwrap());
                return Some(d);
            }
        }
    }
    None
}


/// Single symmetric insertion (r = 1) and a non-symmetric one whose two
/// orientations both count (r = 2), on an order-2 skeleton with S = 2.
pub fn bubble_cases() -> Vec<Signature> {
    vec![
        Signature { skeleton_s: 2, insertions: vec![(1, 1, true)], s: 2, r: 1 },
        Signature { skeleton_s: 2, insertions: vec![(2, 2, false)], s: 2, r: 2 },
    ]
}

/// One non-symmetric insertion in a line of the central bubble.
pub fn diamond_defining_case() -> Signature {
    Signature { skeleton_s: 4, insertions: vec![(2, 2, false)], s: 2, r: 4 }
}

pub fn diamond_cases() -> Vec<Signature> {
    vec![
        // two equivalent locations
        Signature { skeleton_s: 4, insertions: vec![(1, 1, true)], s: 2, r: 2 },
        // two isomorphic insertions exchanged by a skeleton symmetry
        Signature { skeleton_s: 4, insertions: vec![(1, 1, true), (1, 1, true)], s: 4, r: 1 },
        // two non-symmetric insertions
        Signature { skeleton_s: 4, insertions: vec![(2, 2, false), (2, 2, false)], s: 8, r: 2 },
    ]
}

/// The order-4 skeleton with S = 4 that admits the r = 4 placement.
pub fn diamond_skeleton() -> Option<Diagram> {
    let sig = diamond_defining_case();
    skeletons(4, 4).into_iter().find(|s| find_on(s, &sig).is_some())
}
