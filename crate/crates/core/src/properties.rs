//! Randomized invariants across modules. These run with the unit tests so
//! that they execute before the acceptance binary.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use crate::convex::{dual_norm_upper, minimax_solve, project_onto_hull, PointHull};
use crate::counting::{count_brute, count_weighted, LinearForm};
use crate::dense_models::{green_model, hdr_model, ModelOptions};
use crate::majorants::{diagnose, make_random_sparse, make_squares, make_uniform, make_weighted_primes, restriction_trace, DiagnoseOptions};
use crate::pipeline::PipelineConfig;
use crate::signal::{convolve, fourier_sup, fourier_sup_diff, DiscreteSignal, FrequencyGrid};
use crate::spectrum::{bohr_enumerate, spectrum, SpectrumOptions};
use crate::weierstrass::{build_abs_approx, build_positive_part, HEIGHT_CONST};

fn signal() -> impl Strategy<Value = DiscreteSignal> {
    (-30i64..30, prop::collection::vec(-5.0f64..5.0, 1..40))
        .prop_map(|(lo, v)| DiscreteSignal::new(lo, v).unwrap())
}

fn nonneg_signal(max_len: usize) -> impl Strategy<Value = DiscreteSignal> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..4.0], 1..max_len)
        .prop_map(|v| DiscreteSignal::new(1, v).unwrap())
}

fn form() -> impl Strategy<Value = LinearForm> {
    prop::collection::vec(prop_oneof![-5i64..=-1, 1i64..=5], 2..=3)
        .prop_filter_map("last coefficient out of range", |mut c| {
            let last = -c.iter().sum::<i64>();
            (last != 0 && last.abs() <= 5).then(|| {
                c.push(last);
                LinearForm::new(c).unwrap()
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_on_fine_grid(f in signal(), extra in 1usize..50) {
        let m = f.len() + extra;
        let grid = f.fourier_grid(m);
        let lhs: f64 = grid.iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64;
        let rhs: f64 = f.values().iter().map(|v| v * v).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-300) + 1e-12);
    }

    #[test]
    fn convolution_theorem(f in signal(), g in signal(), alpha in 0.0f64..1.0) {
        let h = convolve(&f, &g).unwrap();
        let lhs = h.fourier_eval(alpha);
        let rhs = f.fourier_eval(alpha) * g.fourier_eval(alpha);
        let scale = f.lp_norm(1.0).unwrap() * g.lp_norm(1.0).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn transform_bounded_by_l1(f in signal(), alpha in 0.0f64..1.0) {
        let l1 = f.lp_norm(1.0).unwrap();
        prop_assert!(f.fourier_eval(alpha).norm() <= l1 * (1.0 + 1e-12));
        let pos = f.map(f64::abs);
        prop_assert!((pos.fourier_eval(0.0).re - l1).abs() <= 1e-12 * l1.max(1.0));
    }

    #[test]
    fn sup_bracket_contains_dense_scan(f in signal(), g in signal()) {
        let grid = FrequencyGrid::new(64).unwrap();
        let c = fourier_sup_diff(&f, &g, &grid);
        let d = f.sub(&g);
        let scan = (0..64 * 50)
            .map(|j| d.fourier_eval(j as f64 / (64.0 * 50.0)).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(scan >= c.certified_lower - 1e-9 * (1.0 + scan));
        prop_assert!(scan <= c.certified_upper);
    }

    #[test]
    fn counting_routes_agree(form in form(), pool in prop::collection::vec(nonneg_signal(25), 4)) {
        let w = pool[..form.s()].to_vec();
        let a = count_weighted(&form, &w).unwrap();
        let b = count_brute(&form, &w).unwrap();
        prop_assert!((a.total - b.total).abs() <= 1e-6);
        prop_assert!(a.total >= 0.0);
        prop_assert!(a.diagonal <= a.total + 1e-9);
        let neg = count_weighted(&form.negated(), &w).unwrap();
        prop_assert!((neg.total - a.total).abs() <= 1e-9 * a.total.max(1.0));
    }

    #[test]
    fn bohr_nesting_and_symmetry(
        freqs in prop::collection::vec(0.0f64..1.0, 1..=4),
        e1 in 0.01f64..0.25,
        e2 in 0.25f64..0.5,
        n in 10usize..3000,
    ) {
        let small = bohr_enumerate(&freqs, e1, n).unwrap();
        let large = bohr_enumerate(&freqs, e2, n).unwrap();
        prop_assert!(small.elements.iter().all(|&x| large.contains(x)));
        prop_assert!(small.elements.iter().all(|&x| small.contains(-x)));
        let fewer = bohr_enumerate(&freqs[..1], e1, n).unwrap();
        prop_assert!(small.elements.iter().all(|&x| fewer.contains(x)));
        prop_assert!(small.size() as f64 >= small.pigeonhole_floor);
    }

    #[test]
    fn projection_is_optimal(
        pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..8),
        x in prop::collection::vec(-5.0f64..5.0, 3),
        seed in any::<u64>(),
    ) {
        let hull = PointHull::new(pts).unwrap();
        let tol = 1e-8;
        let p = project_onto_hull(&x, &hull, tol).unwrap();
        let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        prop_assert!(p.obtuse_max <= 1e-6 * scale);
        let mut state = seed;
        for _ in 0..100 {
            let w: Vec<f64> = hull.generators().iter().map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            }).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|v| v / total.max(1e-300)).collect();
            let y = hull.combine(&w);
            let d = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d >= p.distance - 1e-6);
        }
        if let Some(wit) = &p.witness {
            for v in hull.generators() {
                let lhs: f64 = v.iter().zip(&wit.normal).map(|(a, b)| a * b).sum();
                prop_assert!(lhs <= wit.anchor_value + 1e-6 * scale);
            }
        }
    }

    #[test]
    fn saddle_inequalities(g in prop::collection::vec(prop::collection::vec(-5i32..=5, 3), 3)) {
        let a = PointHull::new(g.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()).unwrap();
        let b = PointHull::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let s = minimax_solve(&a, &b, 1e-8).unwrap();
        prop_assert!(s.within_tol);
        for ai in a.generators() {
            prop_assert!(ai.iter().zip(&s.b_star).map(|(x, y)| x * y).sum::<f64>() <= s.value + 1e-6);
        }
        for bj in b.generators() {
            prop_assert!(s.a_star.iter().zip(bj).map(|(x, y)| x * y).sum::<f64>() >= s.value - 1e-6);
        }
    }

    #[test]
    fn config_round_trips(
        n in 1usize..100_000,
        exponent in 0.01f64..1.0,
        delta in 0.0f64..=1.0,
        eps in 0.001f64..0.5,
        seed in any::<u64>(),
        grid in prop::option::of(1usize..1 << 20),
        random in any::<bool>(),
    ) {
        let mut cfg = PipelineConfig::new(n, "random_sparse", delta, vec![1, 2, -3], "naslund");
        cfg.exponent = exponent;
        cfg.eps = eps;
        cfg.majorant_seed = seed;
        cfg.grid_m = grid;
        if random {
            cfg.selection = "random".into();
        }
        let text = cfg.to_toml().unwrap();
        prop_assert_eq!(PipelineConfig::from_toml(&text).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dual_norm_sandwich(vals in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12)) {
        let phi: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let grid = FrequencyGrid::new(32).unwrap();
        let full = dual_norm_upper(&phi, &grid, 16).unwrap();
        let linf = phi.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        prop_assert!(linf <= full.upper + 1e-7);
        prop_assert!(full.lower <= full.upper + 1e-7);
        let re: Vec<Complex64> = phi.iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        let real = dual_norm_upper(&re, &grid, 16).unwrap();
        prop_assert!(real.upper <= 1.02 * full.upper + 1e-7, "{} vs {}", real.upper, full.upper);
    }

    #[test]
    fn dense_model_invariants(seed in 0u64..500, eps in prop_oneof![Just(0.1), Just(0.2), Just(0.4)]) {
        let nu = make_random_sparse(400, 0.75, seed).unwrap();
        let pairs: Vec<(i64, f64)> = nu.signal().nonzero().step_by(2).collect();
        let f = DiscreteSignal::from_pairs(&pairs).unwrap();
        let opts = ModelOptions::default();
        for r in [green_model(&f, &nu, eps, eps, &opts).unwrap(), hdr_model(&f, &nu, eps, &opts).unwrap()] {
            for name in ["off-spectrum", "representative-phase", "mass-transfer", "convolution-theorem"] {
                let c = r.claim(name).unwrap();
                prop_assert!(c.pass, "{:?}", c);
            }
        }
    }

    #[test]
    fn positive_part_height_accounting(eps in 0.06f64..0.9) {
        let p = build_positive_part(eps).unwrap();
        prop_assert!(p.certified_sup_error <= eps);
        prop_assert!(p.height <= (HEIGHT_CONST * eps.powf(-2.0 / 3.0)).exp());
        // P − x/2 is even
        prop_assert!(p.coefficients.iter().enumerate().skip(3).step_by(2).all(|(_, &a)| a == 0.0));
        prop_assert!((p.coefficients[1] - 0.5).abs() < 1e-15);
    }
}

#[test]
fn abs_approx_is_even() {
    for n in 1..=60 {
        let p = build_abs_approx(n).unwrap();
        assert!(p.coefficients.iter().skip(1).step_by(2).all(|&a| a == 0.0), "N = {n}");
    }
}

#[test]
fn majorant_transform_peaks_at_zero() {
    let grid = FrequencyGrid::new(4096).unwrap();
    for nu in [
        make_uniform(500).unwrap(),
        make_random_sparse(2000, 0.7, 3).unwrap(),
        make_squares(1000).unwrap(),
        make_weighted_primes(1000).unwrap(),
    ] {
        let s = fourier_sup(nu.signal(), &grid);
        assert!((s.certified_lower - nu.l1_mass()).abs() <= 1e-9 * nu.l1_mass());
        let d = diagnose(&nu, &grid, &DiagnoseOptions::default()).unwrap();
        assert!(d.theta_l2 <= 2.0 * d.theta_linf, "{} {}", d.theta_l2, d.theta_linf);
        let trace = restriction_trace(&nu, &grid, 4.0, 16, 1);
        assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    }
    let d = diagnose(&make_uniform(300).unwrap(), &grid, &DiagnoseOptions::default()).unwrap();
    assert_eq!(d.theta_decay, 0.0);
}

/// Chebyshev surrogate for the measure of the large spectrum.
#[test]
fn spectrum_measure_surrogate() {
    let p = 4.0;
    for seed in 0..5 {
        let nu = make_random_sparse(3000, 0.75, seed).unwrap();
        let pairs: Vec<(i64, f64)> = nu.signal().nonzero().step_by(2).collect();
        let f = DiscreteSignal::from_pairs(&pairs).unwrap();
        let grid = FrequencyGrid::default_for(nu.n());
        let d = diagnose(&nu, &grid, &DiagnoseOptions::default()).unwrap();
        let r_p = d.restriction_estimate[&crate::majorants::p_key(p)];
        for eta in [0.1, 0.2, 0.4] {
            let s = spectrum(&f, &nu, eta, &SpectrumOptions::default()).unwrap();
            let l1 = nu.l1_mass();
            let measure = s.r as f64 / s.m as f64;
            let bound = 2.0 * 2f64.powf(p) * r_p * l1.powf(p) / (0.5 * eta * l1).powf(p) / nu.n() as f64;
            assert!(measure <= bound, "seed {seed} η {eta}: {measure} > {bound}");
        }
    }
}

/// Green error shrinks along the dyadic sweep used in acceptance.
#[test]
fn green_error_monotone_in_sweep() {
    let nu = make_random_sparse(2000, 0.75, 1).unwrap();
    let pairs: Vec<(i64, f64)> = nu.signal().nonzero().step_by(2).collect();
    let f = DiscreteSignal::from_pairs(&pairs).unwrap();
    let opts = ModelOptions {
        grid_m: Some(1 << 14),
        ..ModelOptions::default()
    };
    let errs: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&e| green_model(&f, &nu, e, e, &opts).unwrap().fourier_err.certified_lower)
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{errs:?}");
}

#[test]
fn phase_bound_is_two_pi_eps_at_boundary() {
    // ‖bα‖ = ε exactly gives |1 − e(bα)| = 2 sin(πε) ≤ 2πε
    let eps: f64 = 0.2;
    let z = Complex64::from_polar(1.0, 2.0 * PI * eps);
    assert!((Complex64::new(1.0, 0.0) - z).norm() <= 2.0 * PI * eps);
}
