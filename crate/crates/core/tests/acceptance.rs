//! One PASS/FAIL line per acceptance criterion and a summary line. Failures
//! are reported without failing the run, so the remaining test targets
//! still execute; set `ACCEPTANCE_STRICT=1` to exit nonzero on any failure.

mod common;

use common::{bubble_cases, diamond_cases, diamond_skeleton, find_on, random_problem, random_spd, skeletons};
use gibbs_mbpt::amplitudes::{bold_series_check, green_series, omega_series, sigma_series, PowerSeries};
use gibbs_mbpt::diagrams::{canonical_key, insert, skeleton_decompose, symmetry_factor, Diagram};
use gibbs_mbpt::enumeration::{double_factorial_odd, enumerate, FamilyKind};
use gibbs_mbpt::methods::{
    galitskii_migdal_energy, loglog_slope, naive_bold_amplitudes, naive_bold_prefactor, parse_lambda_grid,
    phi_derivability_check, ring_sum_check, ring_term, solve_dyson, sweep, Ansatz, DysonOptions, SweepMethod,
};
use gibbs_mbpt::model::{gaussian_reference, sec5_problem, GibbsProblem};
use gibbs_mbpt::oracle::{exact_quantities, gaussian_moment, gaussian_moment_quadrature, QuadratureSpec};
use gibbs_mbpt::Result;
use nalgebra::DMatrix;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn random_problems(count: u64, n: usize, lambda: f64) -> Vec<GibbsProblem> {
    (0..count).map(|s| random_problem(n, 1000 + s, lambda)).collect()
}

fn c1() -> Result<Outcome> {
    let t = Instant::now();
    let p = sec5_problem();
    let exact = exact_quantities(&p, &QuadratureSpec::default())?;
    let opts = DysonOptions::default();
    let hf = solve_dyson(&p, Ansatz::HartreeFock, &opts)?.into_converged()?.free_energy(&p)?;
    let gf2 = solve_dyson(&p, Ansatz::Gf2, &opts)?.into_converged()?.free_energy(&p)?;
    let secs = t.elapsed().as_secs_f64();
    let pass = (exact.omega + 2.7510737).abs() <= 1e-6
        && (hf + 2.74745).abs() <= 5e-5
        && (gf2 + 2.75209).abs() <= 5e-5
        && secs < 10.0;
    outcome(pass, format!("oracle {:.7}, HF {hf:.5}, GF2 {gf2:.5}, {secs:.2} s", exact.omega))
}

fn c2() -> Result<Outcome> {
    let t = Instant::now();
    let sorted = |n| -> Result<Vec<u64>> {
        let mut s = enumerate(FamilyKind::Closed, n)?.symmetry_factors();
        s.sort();
        Ok(s)
    };
    let first = sorted(1)?;
    let second = sorted(2)?;
    let mut totals = Vec::new();
    for n in 1..=3usize {
        let group = 8u64.pow(n as u32) * (1..=n as u64).product::<u64>();
        let fam = enumerate(FamilyKind::Closed, n)?;
        totals.push((fam.classes.iter().map(|c| group / c.symmetry_factor).sum::<u64>(), double_factorial_odd(4 * n - 1)));
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = first == [4, 8]
        && second == [4, 4, 8, 16, 16, 32, 32, 128]
        && totals.iter().all(|(a, b)| a == b)
        && totals.iter().map(|x| x.1).collect::<Vec<_>>() == [3, 105, 10395]
        && secs < 60.0;
    outcome(pass, format!("order 1 S = {first:?}, order 2 S = {second:?}, totals {totals:?}, {secs:.2} s"))
}

fn c3() -> Result<Outcome> {
    let spec = QuadratureSpec { nodes_per_dim: 20, ..QuadratureSpec::default() };
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in random_problems(5, 3, 0.0) {
        let mut idx: Vec<Vec<usize>> = vec![vec![]];
        let mut frontier = idx.clone();
        for _ in 0..6 {
            frontier = frontier
                .iter()
                .flat_map(|m| (m.last().copied().unwrap_or(0)..3).map(move |a| [m.clone(), vec![a]].concat()))
                .collect();
            idx.extend(frontier.iter().cloned());
        }
        for m in &idx {
            worst = worst.max((gaussian_moment(&p, m)? - gaussian_moment_quadrature(&p, m, &spec)?).abs());
            count += 1;
        }
    }
    outcome(worst < 1e-8, format!("{count} moments, max deviation {worst:.2e}"))
}

fn c4() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut problems = vec![sec5_problem()];
    problems.extend(random_problems(5, 3, 1.0));
    for p in &problems {
        let e = exact_quantities(p, &QuadratureSpec::default())?;
        worst = worst.max((e.energy - galitskii_migdal_energy(p, &e.g)?).abs());
    }
    outcome(worst < 1e-8, format!("{} problems, max |E - tr(AG + I)/4| {worst:.2e}", problems.len()))
}

fn c5() -> Result<Outcome> {
    let p = sec5_problem();
    let lambdas = [1e-3, 3e-3, 1e-2];
    let series = omega_series(&p, 2)?;
    let mut pass = true;
    let mut parts = Vec::new();
    let exact: Vec<f64> = lambdas
        .iter()
        .map(|&l| exact_quantities(&p.with_lambda(l)?, &QuadratureSpec::default()).map(|e| e.omega_minus_omega0))
        .collect::<Result<_>>()?;
    for k in 1..=2usize {
        let s = series.truncate(k);
        let scaled: Vec<f64> =
            lambdas.iter().zip(&exact).map(|(&l, e)| (s.evaluate(l) - e).abs() / l.powi(k as i32 + 1)).collect();
        let ratios: Vec<f64> = scaled.windows(2).map(|w| w[1] / w[0]).collect();
        pass &= ratios.iter().all(|r| (1.0 / 3.0..=3.0).contains(r));
        parts.push(format!("k={k}: err/lambda^{} = {:.4?}", k + 1, scaled));
    }
    outcome(pass, parts.join("; "))
}

fn c6() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut problems = vec![sec5_problem()];
    problems.extend(random_problems(3, 3, 1.0));
    for p in &problems {
        let sigma = sigma_series(p, 3)?;
        let g = green_series(p, 3)?;
        let mut m: Vec<DMatrix<f64>> = sigma.coeffs().iter().map(|c| -c).collect();
        m[0] = p.a().clone();
        let inv = PowerSeries::new(m).inverse()?;
        worst = worst.max(g.deviation(&inv).into_iter().fold(0.0, f64::max));
    }
    outcome(worst < 1e-10, format!("orders 0..=3, max deviation {worst:.2e}"))
}

fn c7() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut problems = vec![sec5_problem()];
    problems.extend(random_problems(3, 3, 1.0));
    for p in &problems {
        worst = worst.max(bold_series_check(p, 3)?.deviation.into_iter().fold(0.0, f64::max));
    }
    outcome(worst < 1e-10, format!("orders 0..=3 on {} problems, max deviation {worst:.2e}", problems.len()))
}

fn c8() -> Result<Outcome> {
    let mut checked = 0;
    let mut pass = true;
    for n in 1..=3usize {
        for c in &enumerate(FamilyKind::SelfEnergy1PI, n)?.classes {
            let dec = skeleton_decompose(&c.representative)?;
            let num = dec.skeleton_symmetry_factor * dec.insertion_symmetry_factors.iter().product::<u64>();
            pass &= dec.redundancy_factor * dec.symmetry_factor == num;
            pass &= canonical_key(&dec.reassemble()?)? == c.key;
            checked += 1;
        }
    }
    let mut worked = Vec::new();
    let bubble = skeletons(2, 2);
    for sig in bubble_cases() {
        let found = bubble.iter().find_map(|s| find_on(s, &sig));
        pass &= found.is_some();
        worked.push((sig.s, sig.r, found.is_some()));
    }
    match diamond_skeleton() {
        Some(diamond) => {
            worked.push((2, 4, true));
            for sig in diamond_cases() {
                let found = find_on(&diamond, &sig);
                pass &= found.as_ref().map(symmetry_factor).transpose()?.is_some_and(|s| s == sig.s);
                worked.push((sig.s, sig.r, found.is_some()));
            }
        }
        None => pass = false,
    }
    let rs: Vec<String> = worked.iter().map(|(s, r, ok)| format!("S={s} r={r}{}", if *ok { "" } else { " missing" })).collect();
    outcome(pass, format!("{checked} classes decompose and reassemble; worked cases [{}]", rs.join(", ")))
}

fn c9() -> Result<Outcome> {
    let v = random_problem(4, 7, 1.0).v().clone();
    let mut worst = [0.0f64; 3];
    let kinds = [Ansatz::HartreeFock, Ansatz::Gf2, Ansatz::Gw];
    for seed in 0..5 {
        let g = random_spd(4, 200 + seed);
        for (w, &kind) in worst.iter_mut().zip(&kinds) {
            *w = w.max(phi_derivability_check(kind, &g, &v, 1e-5)?);
        }
    }
    outcome(worst.iter().all(|&w| w < 1e-7), format!("max deviation hf {:.1e}, gf2 {:.1e}, gw {:.1e}", worst[0], worst[1], worst[2]))
}

fn c10() -> Result<Outcome> {
    let p = sec5_problem();
    let g = gaussian_reference(&p).g0;
    let v = p.v();
    let bubble = g.component_mul(&(v * g.component_mul(&g) * v)) * 0.5;
    let ring_one = (ring_term(&g, v, 1) - bubble).amax();
    let devs: Vec<f64> = (1..=6).map(|k| ring_sum_check(&g, v, k).map(|r| r.deviation)).collect::<Result<_>>()?;
    let rho = ring_sum_check(&g, v, 1)?.spectral_radius;
    let geometric = devs.windows(2).all(|w| w[1] <= w[0] * rho * 1.0001 + 1e-16);
    let devs: Vec<String> = devs.iter().map(|d| format!("{d:.1e}")).collect();
    outcome(
        ring_one < 1e-12 && geometric,
        format!("ring 1 vs bubble {ring_one:.1e}; partial-sum errors [{}] (rho {rho:.3})", devs.join(", ")),
    )
}

fn c11() -> Result<Outcome> {
    let p = sec5_problem();
    let grid = parse_lambda_grid("log:1e-3:1e-1:9")?;
    let methods: Vec<SweepMethod> = ["hf", "gf2", "bare1", "bare2"].iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let rows = sweep(&p, &grid, &methods, &QuadratureSpec::default(), &DysonOptions::default())?;
    let errs = |m: &str| -> Vec<f64> {
        grid.iter().map(|&l| rows.iter().find(|r| r.method.name() == m && r.lambda == l).unwrap().relerr).collect()
    };
    let slope = |m: &str, range: std::ops::Range<usize>| loglog_slope(&grid[range.clone()], &errs(m)[range]);
    let all = 0..grid.len();
    let low = 0..grid.len() / 2 + 1;
    let targets = [("bare1", 1.0, 0.15), ("hf", 1.0, 0.15), ("bare2", 2.0, 0.2), ("gf2", 2.0, 0.2)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, want, tol) in targets {
        let s = slope(m, all.clone());
        pass &= (s - want).abs() <= tol;
        parts.push(format!("{m} {s:.3} (lower half {:.3})", slope(m, low.clone())));
    }
    let bold_ok = (0..grid.len()).all(|i| errs("hf")[i] <= errs("bare1")[i] && errs("gf2")[i] <= errs("bare2")[i]);
    pass &= bold_ok;
    outcome(pass, format!("slopes {}; bold <= bare everywhere: {bold_ok}", parts.join(", ")))
}

fn c12() -> Result<Outcome> {
    let oyster = Diagram::oyster();
    let fock = enumerate(FamilyKind::GreensFunction, 1)?
        .classes
        .iter()
        .find(|c| c.symmetry_factor == 1)
        .expect("first-order exchange insertion")
        .representative
        .with_truncated(true)?;
    let target = insert(&oyster, oyster.propagator_edges()[0], &fock)?;
    let key = canonical_key(&target)?;
    let fam = enumerate(FamilyKind::ConnectedClosed, 2)?;
    let mut miscounted = Vec::new();
    let mut target_count = None;
    for c in &fam.classes {
        let count = naive_bold_prefactor(&c.representative)?;
        if (count.naive_prefactor - count.bare_prefactor).abs() > 1e-15 {
            miscounted.push(c.symmetry_factor);
        }
        if c.key == key {
            target_count = Some(count);
        }
    }
    let p = sec5_problem();
    let (naive, bare) = naive_bold_amplitudes(&target, &gaussian_reference(&p).g0, p.v())?;
    let count = target_count.expect("target is a connected closed class");
    let pass = count.naive_prefactor == 0.5 && count.bare_prefactor == 0.25 && (naive / bare - 2.0).abs() < 1e-12;
    outcome(
        pass,
        format!(
            "naive {} vs 1/S {} ({} ways), amplitude ratio {:.12}; miscounted classes by S: {miscounted:?}",
            count.naive_prefactor,
            count.bare_prefactor,
            count.ways,
            naive / bare
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("reference free energies", c1),
        ("diagram counts and symmetry factors", c2),
        ("Wick moments against quadrature", c3),
        ("energy from the Green's function", c4),
        ("series asymptotics", c5),
        ("formal Dyson identity", c6),
        ("bold expansion", c7),
        ("skeleton redundancy", c8),
        ("functional derivatives", c9),
        ("ring sum", c10),
        ("error slopes", c11),
        ("naive bold miscount", c12),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed.push((k + 1).to_string());
        }
        println!("criterion {:>2} {}: {name}: {detail}", k + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("FAILED criteria: {}", failed.join(", "));
        if std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
