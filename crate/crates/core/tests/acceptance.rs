//! Acceptance criteria. Every test prints one `PASS`/`FAIL` line directly to
//! stdout (bypassing the test harness capture) and then asserts.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use bkklab::banach::{symmetrize, NormSpec};
use bkklab::crofton::{crofton_density_for, invert_with, inversion_grid, zonoid_check, GrassmannDensity, InversionOptions};
use bkklab::fspace::{Metric, Region};
use bkklab::mixedvol::{finsler_mixed_volume, product_crofton_density};
use bkklab::solver::{bkk_factor, estimate_average, verify_bkk, Problem, ScenarioConfig};
use bkklab::sphere::fibonacci_directions;

fn report(id: &str, pass: bool, detail: String) {
    let line = format!("acceptance {id}: {} | {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
}

fn scenario(name: &str) -> (ScenarioConfig, Problem) {
    let cfg = ScenarioConfig::builtin(name).unwrap();
    let p = cfg.to_problem().unwrap();
    (cfg, p)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rhs(p: &Problem, grid: usize) -> (f64, f64) {
    let fv = finsler_mixed_volume(&p.fields().unwrap(), p.region(), grid).unwrap();
    let c = bkk_factor(p.spaces().len());
    (c * fv.value, c * fv.tolerance)
}

#[test]
fn c1_circle_euclidean() {
    let (_, p) = scenario("circle-euclidean");
    let v = verify_bkk(&p, 100_000, 1000, 1).unwrap();
    let (el, er) = (rel(v.lhs.estimate, TAU), rel(v.rhs, TAU));
    report(
        "1 circle Euclidean",
        el <= 0.02 && er <= 0.005,
        format!("LHS {:.5} ± {:.1e} (rel {el:.2e} <= 2e-2), RHS {:.6} (rel {er:.2e} <= 5e-3)", v.lhs.estimate, v.lhs.std_error, v.rhs),
    );
}

#[test]
fn c2_frequency_scaling() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, name) in [(1.0, "circle-euclidean"), (2.0, "circle-k2"), (3.0, "circle-k3")] {
        let (cfg, p) = scenario(name);
        let v = verify_bkk(&p, cfg.samples, cfg.grid, cfg.seed).unwrap();
        let target = TAU * k;
        let (el, er) = (rel(v.lhs.estimate, target), rel(v.rhs, target));
        ok &= el <= 0.02 && er <= 0.02;
        parts.push(format!("k={k}: LHS {:.4} RHS {:.4} (rel {el:.1e}, {er:.1e})", v.lhs.estimate, v.rhs));
    }
    report("2 frequency scaling", ok, parts.join("; ") + " <= 2e-2");
}

#[test]
fn c3_torus_decoupled() {
    let (_, p) = scenario("torus-decoupled");
    let v = verify_bkk(&p, 1_000_000, 64, 1).unwrap();
    let target = 4.0 * PI * PI;
    let (el, er) = (rel(v.lhs.estimate, target), rel(v.rhs, target));
    report(
        "3 torus decoupled",
        el <= 0.03 && er <= 0.03,
        format!("LHS {:.4} ± {:.1e} (rel {el:.2e}), RHS {:.4} (rel {er:.2e}) <= 3e-2", v.lhs.estimate, v.lhs.std_error, v.rhs),
    );
}

/// Directions on the circle and on `S^2` not aligned with either grid.
fn test_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..997).map(|k| 0.0137 + TAU * k as f64 / 997.0).map(|t| vec![t.cos(), t.sin()]).collect(),
        _ => fibonacci_directions(1001).into_iter().map(|p| p.to_vec()).collect(),
    }
}

#[test]
fn c4_euclidean_symmetrization() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (dim, res) in [(2, 2048), (3, 5)] {
        let e = NormSpec::<f64>::euclidean(dim).unwrap();
        let s = symmetrize(&e, res).unwrap();
        let err = test_directions(dim).iter().map(|y| (s.h_symm(y) - e.dual(y)).abs()).fold(0.0, f64::max);
        ok &= err <= 1e-3;
        parts.push(format!("dim {dim} resolution {res}: sup error {err:.2e}"));
    }
    report("4 Euclidean symmetrization", ok, parts.join("; ") + " <= 1e-3");
}

#[test]
fn c5_linf_symmetrization() {
    let sq = NormSpec::<f64>::linf_sampled(2, 256).unwrap();
    let s = symmetrize(&sq, 2048).unwrap();
    let (a, b) = (s.h_symm(&[1.0, 0.0]), s.h_symm(&[1.0, 1.0]));
    report(
        "5 l-infinity symmetrization",
        (a - 1.5).abs() <= 1e-3 && (b - 2.0).abs() <= 1e-3,
        format!("h_symm(e1) = {a:.6} (1.5), h_symm((1,1)) = {b:.6} (2) within 1e-3"),
    );
}

#[test]
fn c6_crofton_constants() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (dim, c) in [(2, 0.5), (3, 1.0 / PI)] {
        let e = NormSpec::<f64>::euclidean(dim).unwrap();
        let phi = crofton_density_for(&e).unwrap();
        let direct = phi.values().iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        // The general spectral inversion, without the closed-form shortcut.
        let grid = inversion_grid::<f64>(dim, InversionOptions::plain(dim).max_degree).unwrap();
        let target = GrassmannDensity::from_fn(grid, |x| e.dual(x)).unwrap();
        let inv = invert_with(&target, &InversionOptions::plain(dim)).unwrap();
        let spectral = inv.density.values().iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        ok &= direct <= 1e-3 && spectral <= 1e-3;
        parts.push(format!("dim {dim}: sup |φ - {c:.6}| = {direct:.1e} (closed form), {spectral:.1e} (inversion)"));
    }
    report("6 Crofton constants", ok, parts.join("; ") + " <= 1e-3");
}

#[test]
fn c7_zonoid_discrimination() {
    let a = zonoid_check(&NormSpec::<f64>::lp(3, 1.5).unwrap()).unwrap();
    let b = zonoid_check(&NormSpec::<f64>::lp(3, 4.0).unwrap()).unwrap();
    report(
        "7 zonoid discrimination",
        a.min_density < 0.0 && b.min_density >= -1e-4 * b.mean_density,
        format!(
            "lp p=1.5: min {:.3e} < 0; lp p=4: min {:.3e} >= {:.3e}",
            a.min_density,
            b.min_density,
            -1e-4 * b.mean_density
        ),
    );
}

#[test]
fn c8_product_crofton() {
    let e = NormSpec::<f64>::euclidean(2).unwrap();
    let edges = vec![vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![vec![0.0, 0.0], vec![0.0, 1.0]]];
    let r = product_crofton_density(&[e.clone(), e], &edges, 1_000_000, 8).unwrap();
    let err = rel(r.estimate, r.predicted);
    report(
        "8 product Crofton",
        err <= 0.02,
        format!("estimate {:.5} ± {:.1e}, predicted {:.5} (rel {err:.2e} <= 2e-2)", r.estimate, r.std_error, r.predicted),
    );
}

fn split(p: &Problem) -> (Problem, Problem) {
    let iv = p.region().intervals().to_vec();
    let (a, b) = iv[0];
    let m = a + 0.37 * (b - a);
    let mut lo = iv.clone();
    lo[0] = (a, m);
    let mut hi = iv;
    hi[0] = (m, b);
    let chart = p.chart();
    (
        p.with_region(Region::new(chart, lo).unwrap()).unwrap(),
        p.with_region(Region::new(chart, hi).unwrap()).unwrap(),
    )
}

#[test]
fn c9_property_suite() {
    let mut ok = true;
    let mut parts = Vec::new();

    let (cfg, p) = scenario("circle-smooth-linf");
    let v = verify_bkk(&p, cfg.samples, cfg.grid, cfg.seed).unwrap();
    ok &= v.pass;
    parts.push(format!("smoothed l-inf LHS {:.4} RHS {:.4} z {:.2}", v.lhs.estimate, v.rhs, v.z_score));

    let mut metric_err = 0.0f64;
    let mut additivity_z = 0.0f64;
    let mut rhs_additivity = 0.0f64;
    for name in ScenarioConfig::builtin_names() {
        let (cfg, p) = scenario(name);
        let two_d = p.region().dim() == 2;
        let grid = if two_d { 16 } else { cfg.grid };
        let metric = if two_d { vec![2.0, 0.5, 0.5, 1.0] } else { vec![0.3] };
        let (base, _) = rhs(&p, grid);
        let (other, _) = rhs(&p.with_metric(Metric::Constant(metric)).unwrap(), grid);
        metric_err = metric_err.max(rel(other, base));

        let samples = if two_d { 40_000 } else { 100_000 };
        let (u1, u2) = split(&p);
        let whole = estimate_average(&p, samples, 11).unwrap();
        let a = estimate_average(&u1, samples, 12).unwrap();
        let b = estimate_average(&u2, samples, 13).unwrap();
        let sigma = (whole.std_error.powi(2) + a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        let z = (a.estimate + b.estimate - whole.estimate).abs() / sigma;
        additivity_z = additivity_z.max(z);

        let (r, rt) = rhs(&p, grid);
        let (r1, t1) = rhs(&u1, grid);
        let (r2, t2) = rhs(&u2, grid);
        rhs_additivity = rhs_additivity.max((r1 + r2 - r).abs() / (rt + t1 + t2));
    }
    ok &= metric_err <= 1e-9 && additivity_z <= 3.0 && rhs_additivity <= 1.0;
    parts.push(format!("metric independence max rel {metric_err:.1e} <= 1e-9"));
    parts.push(format!("LHS additivity max |z| {additivity_z:.2} <= 3"));
    parts.push(format!("RHS additivity max |Δ|/tol {rhs_additivity:.2} <= 1"));
    report("9 property suite", ok, parts.join("; "));
}
