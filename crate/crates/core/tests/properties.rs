//! Property tests for norms, symmetrization, fiber bodies, mixed volumes,
//! the zero counter and scenario configs.

use std::sync::{Arc, OnceLock};

use bkklab::banach::{NormSpec, SymmetrizedNorm};
use bkklab::fspace::{bbody_field, BasisFunction, FunctionSpaceOnX, ManifoldChart, Region};
use bkklab::mixedvol::{fiber_body, mixed_volume, FiberBody, FiberBodySet};
use bkklab::solver::{count_solutions, estimate_average, ScenarioConfig, SystemSample};
use proptest::prelude::*;

fn vec_in(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vec_in(dim).prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn square() -> &'static SymmetrizedNorm<f64> {
    static S: OnceLock<SymmetrizedNorm<f64>> = OnceLock::new();
    S.get_or_init(|| SymmetrizedNorm::new(&NormSpec::linf_sampled(2, 256).unwrap(), 1024).unwrap())
}

fn lp3() -> &'static SymmetrizedNorm<f64> {
    static S: OnceLock<SymmetrizedNorm<f64>> = OnceLock::new();
    S.get_or_init(|| SymmetrizedNorm::new(&NormSpec::lp(3, 3.0).unwrap(), 3).unwrap())
}

proptest! {
    #[test]
    fn lp_norm_axioms(p in 1.1..6.0f64, x in vec_in(3), y in vec_in(3), c in -4.0..4.0f64) {
        let n = NormSpec::lp(3, p).unwrap();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let cx: Vec<f64> = x.iter().map(|a| c * a).collect();
        prop_assert!(n.gauge(&sum) <= n.gauge(&x) + n.gauge(&y) + 1e-9);
        prop_assert!((n.gauge(&cx) - c.abs() * n.gauge(&x)).abs() <= 1e-9 * (1.0 + n.gauge(&cx)));
        prop_assert!(dot(&x, &y).abs() <= n.gauge(&x) * n.dual(&y) + 1e-9);
    }

    #[test]
    fn sampled_norm_duality(x in vec_in(2), xi in vec_in(2)) {
        let n = NormSpec::<f64>::linf_sampled(2, 256).unwrap();
        prop_assert!(dot(&x, &xi).abs() <= n.gauge(&x) * n.dual(&xi) + 1e-9);
    }

    #[test]
    fn h_symm_is_a_norm(y in vec_in(2), z in vec_in(2), c in -3.0..3.0f64) {
        let s = square();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let cy: Vec<f64> = y.iter().map(|v| c * v).collect();
        let sum: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
        prop_assert!((s.h_symm(&y) - s.h_symm(&neg)).abs() <= 1e-12);
        prop_assert!((s.h_symm(&cy) - c.abs() * s.h_symm(&y)).abs() <= 1e-9 * (1.0 + s.h_symm(&cy)));
        prop_assert!(s.h_symm(&sum) <= s.h_symm(&y) + s.h_symm(&z) + 1e-9);
    }

    #[test]
    fn h_symm_3d_even_and_subadditive(y in vec_in(3), z in vec_in(3)) {
        let s = lp3();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let sum: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
        prop_assert!((s.h_symm(&y) - s.h_symm(&neg)).abs() <= 1e-12);
        prop_assert!(s.h_symm(&sum) <= s.h_symm(&y) + s.h_symm(&z) + 1e-9);
    }

    #[test]
    fn symmetrized_ball_norm_is_dual_to_h_symm(v in nonzero(2), y in vec_in(2)) {
        let s = square();
        prop_assert!(dot(&v, &y).abs() <= s.norm_symm(&v) * s.h_symm(&y) * (1.0 + 1e-6) + 1e-9);
    }
}

fn torus_space(freqs: Vec<Vec<i32>>, norm: NormSpec<f64>) -> Arc<FunctionSpaceOnX<f64>> {
    let chart = Arc::new(ManifoldChart::torus());
    Arc::new(FunctionSpaceOnX::new(chart, BasisFunction::trig_family(&freqs), norm).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fiber_body_matches_field_support(x in prop::array::uniform2(0.0..std::f64::consts::TAU), xi in nonzero(2), sym in any::<bool>()) {
        let sp = torus_space(vec![vec![1, 0], vec![1, 2]], NormSpec::euclidean(4).unwrap());
        let field = bbody_field(sp, sym.then_some(24)).unwrap();
        let body = fiber_body(&field, &x).unwrap();
        let a = body.support(&xi);
        let b = field.support(&x, &xi).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b), "{a} vs {b}");
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        prop_assert!((field.fiber_width(&x, &xi).unwrap() - 2.0 * b).abs() <= 1e-9 * (1.0 + b));
        prop_assert!((field.support(&x, &neg).unwrap() - b).abs() <= 1e-9 * (1.0 + b));
    }

    #[test]
    fn mixed_volume_symmetric_and_linear(
        a in prop::collection::vec(vec_in(2), 1..6),
        b in prop::collection::vec(vec_in(2), 1..6),
        c in 0.1..4.0f64,
    ) {
        let zono = |g: &[Vec<f64>]| FiberBody::Zonotope { dim: 2, generators: g.concat() };
        let ab = mixed_volume(&FiberBodySet::new(vec![zono(&a), zono(&b)]).unwrap()).unwrap();
        let ba = mixed_volume(&FiberBodySet::new(vec![zono(&b), zono(&a)]).unwrap()).unwrap();
        let scaled: Vec<Vec<f64>> = a.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        let cab = mixed_volume(&FiberBodySet::new(vec![zono(&scaled), zono(&b)]).unwrap()).unwrap();
        let aa = mixed_volume(&FiberBodySet::new(vec![zono(&a), zono(&a)]).unwrap()).unwrap();
        let tol = 1e-9 * (1.0 + ab.abs());
        prop_assert!(ab >= -1e-12);
        prop_assert!((ab - ba).abs() <= tol);
        prop_assert!((cab - c * ab).abs() <= 1e-9 * (1.0 + cab.abs()));
        prop_assert!((aa - zono(&a).volume().unwrap()).abs() <= 1e-9 * (1.0 + aa));
    }

    #[test]
    fn root_count_is_scale_invariant(
        x0 in nonzero(2), x1 in nonzero(2), t in prop::array::uniform2(-1.0..1.0f64), c in 0.2..5.0f64,
    ) {
        let e = NormSpec::euclidean(2).unwrap();
        let spaces = vec![torus_space(vec![vec![1, 0]], e.clone()), torus_space(vec![vec![1, 1]], e)];
        let region = Region::full(spaces[0].chart());
        let s = SystemSample { coefficients: vec![x0, x1], offsets: t.to_vec(), weight: 1.0 };
        let scaled = SystemSample {
            coefficients: s.coefficients.iter().map(|v| v.iter().map(|a| c * a).collect()).collect(),
            offsets: s.offsets.iter().map(|a| c * a).collect(),
            weight: 1.0,
        };
        let a = count_solutions(&s, &spaces, &region).unwrap();
        let b = count_solutions(&scaled, &spaces, &region).unwrap();
        prop_assert_eq!(a.count, b.count);
        prop_assert!(a.count % 2 == 0 || a.uncertain);
    }

    #[test]
    fn scenario_config_round_trips(samples in 1usize..10_000_000, grid in 8usize..4096, seed in any::<u64>()) {
        let mut cfg = ScenarioConfig::builtin("torus-skew").unwrap();
        cfg.samples = samples;
        cfg.grid = grid;
        cfg.seed = seed;
        let text = toml::to_string(&cfg).unwrap();
        prop_assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
    }
}

#[test]
fn estimates_are_seed_deterministic() {
    let p = ScenarioConfig::builtin("circle-smooth-linf").unwrap().to_problem().unwrap();
    let a = estimate_average(&p, 9000, 42).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let b = pool.install(|| estimate_average(&p, 9000, 42)).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = estimate_average(&p, 9000, 43).unwrap();
    assert_ne!(a.estimate, c.estimate);
}
