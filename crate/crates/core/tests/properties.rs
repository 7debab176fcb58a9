use genhilbert::carleson::{carleson_constant, exponent_estimate, TheoremId};
use genhilbert::harness::{run_boundedness_harness, HarnessConfig};
use genhilbert::operator::{apply_h, apply_i, pairing_lhs, pairing_rhs, ApplyOptions, HankelEntrySpec, PairingWeight};
use genhilbert::quadrature::{adaptive, Tolerance};
use genhilbert::series::{bergman_a1_norm, bloch_norm, dyadic_block_seminorm};
use genhilbert::special::ln_gamma_ratio;
use genhilbert::{gamma_ratio, CoefficientSeries, DiskGrid, Family, MeasureSpec, TestFamilyMember};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn density() -> impl Strategy<Value = MeasureSpec> {
    (-0.9f64..3.0, -2.0f64..2.0).prop_map(|(p, q)| MeasureSpec::density(p, q))
}

fn atomic() -> impl Strategy<Value = MeasureSpec> {
    prop::collection::vec((0.0f64..0.95, 0.05f64..2.0), 1..=3).prop_map(|atoms| MeasureSpec::Atomic { atoms })
}

fn measure() -> impl Strategy<Value = MeasureSpec> {
    prop_oneof![density(), atomic()]
}

fn complex_poly(min_len: usize, max_len: usize) -> impl Strategy<Value = CoefficientSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), min_len..=max_len)
        .prop_map(|v| CoefficientSeries::polynomial(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()))
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::ConstantOne),
        (0.2f64..3.0).prop_map(|beta| Family::PowerBeta { beta }),
        Just(Family::LogE),
        Just(Family::LogSq),
        Just(Family::BergmanPeak),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tail_is_monotone(mu in measure(), t1 in 0.0f64..0.999, dt in 0.0f64..1.0) {
        let t2 = t1 + (1.0 - t1) * dt * 0.999;
        let (a, b) = (mu.tail(t1).unwrap(), mu.tail(t2).unwrap());
        prop_assert!(b <= a * (1.0 + 1e-12) + 1e-300, "tail({t1}) = {a} < tail({t2}) = {b}");
        let m0 = mu.moment(0).unwrap();
        prop_assert!((mu.tail(0.0).unwrap() - m0).abs() <= 1e-10 * m0);
    }

    #[test]
    fn moments_decrease(mu in measure()) {
        let m: Vec<f64> = (0..=64).map(|j| mu.moment(j).unwrap()).collect();
        for j in 0..64 {
            prop_assert!(m[j + 1] <= m[j] * (1.0 + 1e-12), "m_{} = {} > m_{j} = {}", j + 1, m[j + 1], m[j]);
        }
        prop_assert!(mu.moment(1000).unwrap() < m[0]);
    }

    #[test]
    fn moments_are_linear_in_the_measure(m1 in measure(), m2 in measure(), a in 0.01f64..5.0, b in 0.01f64..5.0, j in 0usize..200) {
        let mix = MeasureSpec::Mixture { parts: vec![(a, m1.clone()), (b, m2.clone())] };
        let direct = a * m1.moment(j).unwrap() + b * m2.moment(j).unwrap();
        prop_assert!((mix.moment(j).unwrap() - direct).abs() <= 1e-12 * direct.max(1e-300));
    }

    #[test]
    fn density_moments_match_beta(p in prop::sample::select(vec![0.0, 1.0, 2.0]), j in 0usize..5000) {
        let exact = beta(j as f64 + 1.0, p + 1.0);
        let m = MeasureSpec::density(p, 0.0).moment(j).unwrap();
        prop_assert!((m - exact).abs() <= 1e-10 * exact, "j = {j}: {m} vs {exact}");
    }

    #[test]
    fn log_gamma_ratio_matches_product(alpha in 0.05f64..6.0, n in 0usize..100_000) {
        let direct = gamma_ratio(alpha, n).unwrap();
        prop_assert!((ln_gamma_ratio(alpha, n).unwrap() - direct.ln()).abs() <= 1e-10 * direct.ln().abs().max(1.0));
    }

    #[test]
    fn family_series_matches_closed_form(f in family(), a in 0.05f64..0.95, rho in 0.0f64..0.9, theta in 0.0f64..6.3) {
        let m = TestFamilyMember::new(f, a, 2048, 0.9).unwrap();
        let z = Complex64::from_polar(rho, theta);
        let exact = m.closed_form(z);
        let gap = (m.series.evaluate(z).unwrap() - exact).norm();
        prop_assert!(gap <= m.series.tail_bound_at(rho) + 1e-12 * exact.norm().max(1.0), "{f} a = {a}: gap {gap}");
    }

    #[test]
    fn grid_refinement_never_lowers_norms(f in family(), a in 0.1f64..0.9, alpha in 0.5f64..2.0) {
        let m = TestFamilyMember::new(f, a, 1024, 1.0).unwrap();
        let coarse = DiskGrid::new(5, 1, 64).unwrap();
        let fine = coarse.refined();
        let b0 = bloch_norm(&m.series, alpha, &coarse).unwrap();
        let b1 = bloch_norm(&m.series, alpha, &fine).unwrap();
        prop_assert!(b1 >= b0 * (1.0 - 1e-12));
        let a0 = bergman_a1_norm(&m.series, &DiskGrid::new(4, 1, 64).unwrap()).unwrap();
        let a1 = bergman_a1_norm(&m.series, &DiskGrid::new(6, 1, 64).unwrap()).unwrap();
        prop_assert!(a1 >= a0 * (1.0 - 1e-9));
    }

    #[test]
    fn dyadic_seminorm_scales_quadratically(f in complex_poly(8, 80), re in -3.0f64..3.0, im in -3.0f64..3.0, alpha in 0.2f64..3.0, k in -4i32..4) {
        let base = dyadic_block_seminorm(&f, alpha).unwrap();
        let scaled = dyadic_block_seminorm(&f.scale(Complex64::new(re, im)), alpha).unwrap();
        let factor = re * re + im * im;
        prop_assert!((scaled - factor * base).abs() <= 1e-12 * factor * base + 1e-300);
        let two = 2f64.powi(k);
        prop_assert_eq!(dyadic_block_seminorm(&f.scale(c(two)), alpha).unwrap(), two * two * base);
    }

    #[test]
    fn operator_is_linear(mu in measure(), f in complex_poly(1, 20), g in complex_poly(1, 20), alpha in 0.3f64..3.0) {
        let opts = ApplyOptions { n_out: 64, ..Default::default() };
        let mut spec = HankelEntrySpec::new(&mu, alpha, 64, 21).unwrap();
        let hf = apply_h(&mut spec, &f, &opts).unwrap().output;
        let hg = apply_h(&mut spec, &g, &opts).unwrap().output;
        let hfg = apply_h(&mut spec, &f.add(&g), &opts).unwrap().output;
        let scale = spec.entry(0, 0).unwrap() * (f.l1_norm() + g.l1_norm()) * gamma_ratio(alpha, 64).unwrap().max(1.0);
        for ((x, y), z) in hf.coefficients().iter().zip(hg.coefficients()).zip(hfg.coefficients()) {
            prop_assert!((x + y - z).norm() <= 1e-12 * scale);
        }
        let w = Complex64::new(0.3, -0.4);
        let (i_f, i_g, i_fg) = (
            apply_i(&mu, alpha, 0.5, &f, w).unwrap(),
            apply_i(&mu, alpha, 0.5, &g, w).unwrap(),
            apply_i(&mu, alpha, 0.5, &f.add(&g), w).unwrap(),
        );
        prop_assert!((i_f + i_g - i_fg).norm() <= 1e-9 * scale);
    }

    #[test]
    fn nonnegative_input_gives_nonnegative_output(mu in measure(), v in prop::collection::vec(0.0f64..1.0, 1..40), alpha in 0.3f64..3.0) {
        let f = CoefficientSeries::from_real(&v);
        let mut spec = HankelEntrySpec::new(&mu, alpha, 128, v.len()).unwrap();
        let out = apply_h(&mut spec, &f, &ApplyOptions { n_out: 128, ..Default::default() }).unwrap().output;
        for b in out.coefficients() {
            prop_assert!(b.re >= 0.0 && b.im == 0.0);
        }
    }

    #[test]
    fn columns_decay_like_the_carleson_exponent(s in 0.5f64..3.0, alpha in 0.5f64..3.0) {
        let mu = MeasureSpec::density(s - 1.0, 0.0);
        let constant = carleson_constant(&mu, s, 0.0).unwrap().constant_estimate;
        let bound = constant * gamma(s + 1.0) * 2f64.powf(s).max(1.0);
        let spec = HankelEntrySpec::new(&mu, alpha, 50, 400).unwrap();
        for n in [0usize, 1, 7, 50] {
            for k in [0usize, 3, 40, 400] {
                let lhs = spec.entry(n, k).unwrap();
                let rhs = gamma_ratio(alpha, n).unwrap() * bound / (k as f64 + 1.0).powf(s);
                prop_assert!(lhs <= rhs, "n = {n}, k = {k}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn classifier_is_scale_covariant(mu in density(), scale in 0.01f64..100.0, s in 0.5f64..3.0) {
        let scaled = MeasureSpec::Mixture { parts: vec![(scale, mu.clone())] };
        let a = carleson_constant(&mu, s, 0.0).unwrap();
        let b = carleson_constant(&scaled, s, 0.0).unwrap();
        prop_assert!((b.constant_estimate - scale * a.constant_estimate).abs() <= 1e-10 * b.constant_estimate);
        prop_assert!((a.fitted_exponent - b.fitted_exponent).abs() <= 1e-6);
    }

    #[test]
    fn classifier_recognizes_the_density_family(s in 0.3f64..3.0, ratio in 0.2f64..2.0) {
        // the refined ratio approaches 1/s with relative lag e/(s log(e/(1-t))); the probe ladder resolves e/s <= 2
        let e = ratio * s;
        let plain = carleson_constant(&MeasureSpec::density(s - 1.0, 0.0), s, 0.0).unwrap();
        prop_assert!(plain.is_carleson() && plain.constant_estimate.is_finite());
        prop_assert!((plain.fitted_exponent - s).abs() <= 0.05);
        let refined = carleson_constant(&MeasureSpec::density(s - 1.0, -e), s, e).unwrap();
        prop_assert!(refined.is_carleson(), "{refined:?}");
    }

    #[test]
    fn mixture_exponent_is_the_minimum(p1 in 0.0f64..2.0, p2 in 0.0f64..2.0, a in 0.5f64..2.0, b in 0.5f64..2.0) {
        let mix = MeasureSpec::Mixture { parts: vec![(a, MeasureSpec::density(p1, 0.0)), (b, MeasureSpec::density(p2, 0.0))] };
        let fit = exponent_estimate(&mix).unwrap();
        prop_assert!((fit.fitted_exponent - (p1.min(p2) + 1.0)).abs() <= 0.05, "{fit:?}");
    }

    #[test]
    fn boundedness_verdict_flips_at_the_two_carleson_boundary(gamma_above in 2.0f64..2.1, gamma_below in 1.0f64..=1.9) {
        let config = HarnessConfig { norm_estimates: false, ..Default::default() };
        let run = |g: f64| run_boundedness_harness(TheoremId::T2_1, &MeasureSpec::density(g - 1.0, 0.0), 2.0, 0.5, &config).unwrap();
        let above = run(gamma_above);
        prop_assert!(above.empirical_bounded && above.consistent);
        let below = run(gamma_below);
        prop_assert!(!below.empirical_bounded && below.consistent);
    }

    #[test]
    fn pairing_identity_on_atomic_measures(
        mu in atomic(),
        f in complex_poly(1, 9),
        g in complex_poly(1, 9),
        alpha in prop::sample::select(vec![2.0, 3.0]),
        r in prop::sample::select(vec![0.5, 0.8, 0.95]),
    ) {
        let lhs = pairing_lhs(&mu, alpha, 0.5, &f, &g, r, PairingWeight::Reproducing).unwrap();
        let rhs = pairing_rhs(&mu, 0.5, &f, &g, r).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-7, "{lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gate_agrees_with_direct_quadrature(beta in 1.6f64..3.0, above in any::<bool>()) {
        // (1-t)^{p+1-β} is integrable iff p > β - 2; probe half a unit either side
        let p = if above { beta - 1.5 } else { beta - 2.5 };
        let mu = MeasureSpec::density(p, 0.0);
        let gate = mu.convergence_gate(beta).unwrap();
        prop_assert_eq!(gate.admissible, above);
        let exponent = p + 1.0 - beta;
        let partial = |eps: f64| {
            adaptive(|t: f64| (1.0 - t).powf(exponent), 0.0, 1.0 - eps, Tolerance::relative(1e-8), 4000).unwrap().value
        };
        let deep = partial(2f64.powi(-53));
        if above {
            prop_assert!(deep < 1e8 && (deep - gate.value).abs() <= 1e-4 * gate.value, "{deep} vs {}", gate.value);
        } else {
            prop_assert!(partial(2f64.powi(-20)) < partial(2f64.powi(-40)));
            prop_assert!(deep > 1e8, "{deep}");
        }
    }
}

#[test]
fn identical_inputs_give_identical_reports() {
    let config = HarnessConfig::default();
    let run = || {
        let mut r = run_boundedness_harness(TheoremId::T2_2, &MeasureSpec::density(1.0, -1.0), 2.0, 1.0, &config).unwrap();
        r.runtime_ms = 0;
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn dyadic_block_quotient_is_uniformly_bounded() {
    let grid = DiskGrid::new(14, 1, 256).unwrap();
    for beta in [1.5, 2.0, 3.0] {
        for lambda in [0.9, 0.99, 0.999] {
            let f = TestFamilyMember::new(Family::PowerBeta { beta }, lambda, 1 << 14, 1.0).unwrap();
            let blocks = dyadic_block_seminorm(&f.series, beta).unwrap();
            let norm = bloch_norm(&f.series, beta, &grid).unwrap();
            let quotient = blocks / (norm * norm);
            assert!(quotient.is_finite() && quotient > 0.0 && quotient <= 1.0, "β={beta} λ={lambda}: {quotient}");
        }
    }
}
