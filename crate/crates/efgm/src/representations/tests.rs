use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn assert_vec_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_close(*x, *y, tol);
    }
}

/// Admissible d10 parameters reused across the test suite.
fn reference_theta_d10() -> ThetaVector {
    ThetaVector::new(
        10,
        vec![0.0667, 0.1407, 0.0709, 0.0085, 0.0442, 0.0874, -0.0133, -0.1067, 0.8667],
    )
    .unwrap()
}

/// Random point of the pmf polytope: a flat mixture over its vertices.
fn random_admissible_pmf(d: usize, rng: &mut ChaCha12Rng) -> NdPmf {
    let points = crate::geometry::enumerate_extreme_points(d).unwrap();
    let mut w: Vec<f64> = (0..points.len())
        .map(|_| -rng.random::<f64>().max(1e-12).ln())
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    let mut p = vec![0.0; d + 1];
    for (wj, pt) in w.iter().zip(&points) {
        for k in 0..=d {
            p[k] += wj * pt.pmf.get(k);
        }
    }
    NdPmf::new(d, p).unwrap()
}

/// Brute-force joint success probabilities over all 2^d outcomes.
fn zeta_brute_force(p: &NdPmf) -> Vec<f64> {
    let d = p.d();
    let mut zeta = vec![0.0f64; d + 1];
    for i in 0u32..(1u32 << d) {
        let bits: Vec<bool> = (0..d).map(|j| (i >> j) & 1 == 1).collect();
        let f = bernoulli_pmf_point(p, &bits).unwrap();
        for k in 0..=d {
            if bits.iter().take(k).all(|b| *b) {
                zeta[k] += f;
            }
        }
    }
    zeta
}

// --- constructors -----------------------------------------------------------

#[test]
fn constructors_validate_shapes() {
    assert!(ThetaVector::new(1, vec![]).is_err());
    assert!(ThetaVector::new(3, vec![0.1]).is_err());
    assert!(ThetaVector::new(3, vec![0.1, f64::NAN]).is_err());

    assert!(ZetaVector::new(2, vec![1.0, 0.5]).is_err());
    assert!(ZetaVector::new(2, vec![0.9, 0.5, 0.25]).is_err());
    assert!(ZetaVector::new(2, vec![1.0, 0.4, 0.2]).is_err());
    assert!(ZetaVector::new(2, vec![1.0, 0.5, 0.6]).is_err(), "not monotone");

    assert!(NdPmf::new(2, vec![0.5, 0.5]).is_err());
    assert!(NdPmf::new(2, vec![0.6, 0.0, 0.6]).is_err(), "mass 1.2");
    assert!(NdPmf::new(2, vec![1.0, 0.0, 0.0]).is_err(), "mean 0");
    // Tiny negatives clamp to zero.
    let p = NdPmf::new(2, vec![0.5 + 5e-13, -5e-13, 0.5]).unwrap();
    assert_eq!(p.get(1), 0.0);
}

// --- zeta_to_theta ----------------------------------------------------------

#[test]
fn zeta_to_theta_reference_cases() {
    // zeta_2 = 1/4 gives theta_2 = 4 * 1/4 - 1 = 0.
    let z = ZetaVector::new(3, vec![1.0, 0.5, 0.25, 0.0]).unwrap();
    assert_close(zeta_to_theta(&z).get(2), 0.0, 1e-15);

    // Independence: zeta_k = 2^-k wipes out every theta.
    let d = 9;
    let z = ZetaVector::new(d, (0..=d).map(|k| 0.5f64.powi(k as i32)).collect()).unwrap();
    let t = zeta_to_theta(&z);
    for k in 2..=d {
        assert_close(t.get(k), 0.0, 1e-12);
    }

    // Comonotone: zeta_k = 1/2 for k >= 1 gives theta_k = (1 + (-1)^k)/2.
    let d = 8;
    let mut zv = vec![0.5; d + 1];
    zv[0] = 1.0;
    let t = zeta_to_theta(&ZetaVector::new(d, zv).unwrap());
    for k in 2..=d {
        assert_close(t.get(k), if k % 2 == 0 { 1.0 } else { 0.0 }, 1e-12);
    }
}

// --- nd_pmf_from_zeta -------------------------------------------------------

#[test]
fn nd_pmf_from_zeta_reference_cases() {
    let z = ZetaVector::new(3, vec![1.0, 0.5, 0.25, 0.0]).unwrap();
    let p = nd_pmf_from_zeta(&z).unwrap();
    assert_vec_close(p.values(), &[0.25, 0.0, 0.75, 0.0], 1e-15);

    let d = 7;
    let z = ZetaVector::new(d, (0..=d).map(|k| 0.5f64.powi(k as i32)).collect()).unwrap();
    let p = nd_pmf_from_zeta(&z).unwrap();
    assert!(p.max_abs_diff(&NdPmf::binomial_half(d).unwrap()) < 1e-14);

    let d = 4;
    let mut zv = vec![0.5; d + 1];
    zv[0] = 1.0;
    let p = nd_pmf_from_zeta(&ZetaVector::new(d, zv).unwrap()).unwrap();
    assert_vec_close(p.values(), &[0.5, 0.0, 0.0, 0.0, 0.5], 1e-15);
}

#[test]
fn nd_pmf_from_zeta_rejects_infeasible_vectors() {
    // Monotone but not a valid moment sequence: implied Pr(N = k) < 0.
    let z = ZetaVector::new(3, vec![1.0, 0.5, 0.5, 0.0]).unwrap();
    let err = nd_pmf_from_zeta(&z).unwrap_err();
    assert!(matches!(err, Error::InadmissibleZeta { .. }), "{err}");
}

// --- zeta_from_nd_pmf -------------------------------------------------------

#[test]
fn zeta_from_nd_pmf_reference_cases() {
    let p = NdPmf::new(3, vec![0.25, 0.0, 0.75, 0.0]).unwrap();
    let z = zeta_from_nd_pmf(&p);
    assert_vec_close(z.values(), &[1.0, 0.5, 0.25, 0.0], 1e-15);
    assert_vec_close(z.values(), &zeta_brute_force(&p), 1e-15);

    // One-point pmf at d/2 for d = 4: zeta_2 = C(2,2)/C(4,2) = 1/6.
    let p = NdPmf::new(4, vec![0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    let z = zeta_from_nd_pmf(&p);
    assert_close(z.get(2), 1.0 / 6.0, 1e-15);
    assert_vec_close(z.values(), &zeta_brute_force(&p), 1e-15);

    let d = 8;
    let z = zeta_from_nd_pmf(&NdPmf::binomial_half(d).unwrap());
    for k in 0..=d {
        assert_close(z.get(k), 0.5f64.powi(k as i32), 1e-14);
    }
}

#[test]
fn zeta_pmf_round_trip() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    for d in 2..=12 {
        for _ in 0..1000 {
            let p = random_admissible_pmf(d, &mut rng);
            let back = nd_pmf_from_zeta(&zeta_from_nd_pmf(&p)).unwrap();
            assert!(p.max_abs_diff(&back) < 1e-10, "d = {d}");
        }
    }
}

// --- bernoulli_pmf_point ----------------------------------------------------

#[test]
fn bernoulli_pmf_point_reference_cases() {
    let p = NdPmf::new(3, vec![0.25, 0.0, 0.75, 0.0]).unwrap();
    assert_close(bernoulli_pmf_point(&p, &[true, true, false]).unwrap(), 0.25, 1e-15);

    let d = 6;
    let ind = NdPmf::binomial_half(d).unwrap();
    assert_close(bernoulli_pmf_point(&ind, &[false; 6]).unwrap(), 0.5f64.powi(6), 1e-15);

    let epd = NdPmf::new(4, vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
    assert_close(bernoulli_pmf_point(&epd, &[true; 4]).unwrap(), 0.5, 1e-15);

    assert!(bernoulli_pmf_point(&epd, &[true; 3]).is_err());
}

#[test]
fn bernoulli_pmf_point_sums_to_one() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for d in [3usize, 6, 9] {
        let p = random_admissible_pmf(d, &mut rng);
        let mut total = 0.0;
        for i in 0u32..(1u32 << d) {
            let bits: Vec<bool> = (0..d).map(|j| (i >> j) & 1 == 1).collect();
            total += bernoulli_pmf_point(&p, &bits).unwrap();
        }
        assert_close(total, 1.0, 1e-12);
    }
}

// --- theta maps -------------------------------------------------------------

#[test]
fn theta_from_nd_pmf_reference_cases() {
    let p = NdPmf::new(3, vec![0.25, 0.0, 0.75, 0.0]).unwrap();
    assert_vec_close(theta_from_nd_pmf(&p).values(), &[0.0, 1.0], 1e-14);

    let t = theta_from_nd_pmf(&NdPmf::binomial_half(7).unwrap());
    for k in 2..=7 {
        assert_close(t.get(k), 0.0, 1e-12);
    }

    let p = NdPmf::new(4, vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
    assert_vec_close(theta_from_nd_pmf(&p).values(), &[1.0, 0.0, 1.0], 1e-13);
}

#[test]
fn theta_oracle_reference_cases() {
    let p = NdPmf::new(2, vec![0.5, 0.0, 0.5]).unwrap();
    assert_close(theta_oracle(&p).unwrap().get(2), 1.0, 1e-15);

    let p = NdPmf::new(3, vec![0.0, 0.75, 0.0, 0.25]).unwrap();
    assert_vec_close(theta_oracle(&p).unwrap().values(), &[0.0, -1.0], 1e-14);

    // Degenerate-at-mean pmf for d = 10 hits the most negative dependence row.
    let end10 = crate::ordering::end_nd_pmf(10).unwrap();
    let expect = [
        -1.0 / 9.0,
        0.0,
        1.0 / 21.0,
        0.0,
        -1.0 / 21.0,
        0.0,
        1.0 / 9.0,
        0.0,
        -1.0,
    ];
    assert_vec_close(theta_oracle(&end10).unwrap().values(), &expect, 1e-12);
}

#[test]
fn theta_oracle_rejects_large_dimensions() {
    let p = NdPmf::binomial_half(21).unwrap();
    assert!(matches!(theta_oracle(&p), Err(Error::Capability(_))));
}

#[test]
fn both_oracle_routes_agree() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for d in 2..=10 {
        for _ in 0..20 {
            let p = random_admissible_pmf(d, &mut rng);
            let a = theta_oracle(&p).unwrap();
            let b = theta_sign_oracle(&p).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "d = {d}");
        }
    }
}

#[test]
fn dp_route_matches_the_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(29);
    for d in 2..=12 {
        for _ in 0..50 {
            let p = random_admissible_pmf(d, &mut rng);
            let fast = theta_from_nd_pmf(&p);
            let slow = theta_oracle(&p).unwrap();
            assert!(fast.max_abs_diff(&slow) < 1e-10, "d = {d}");
        }
    }
}

#[test]
fn theta_to_nd_pmf_reference_cases() {
    let t = ThetaVector::zeros(6).unwrap();
    let p = theta_to_nd_pmf(&t).unwrap();
    assert!(p.max_abs_diff(&NdPmf::binomial_half(6).unwrap()) < 1e-15);

    let t = ThetaVector::new(3, vec![-1.0 / 3.0, 0.0]).unwrap();
    let p = theta_to_nd_pmf(&t).unwrap();
    assert_vec_close(p.values(), &[0.0, 0.5, 0.5, 0.0], 1e-15);

    let p = theta_to_nd_pmf(&reference_theta_d10()).unwrap();
    assert!(p.values().iter().all(|v| *v >= 0.0));
}

#[test]
fn theta_to_nd_pmf_reports_the_violating_margin() {
    let t = ThetaVector::new(2, vec![1.5]).unwrap();
    match theta_to_nd_pmf(&t) {
        Err(Error::Inadmissible { m, margin }) => {
            assert_eq!(m, 1);
            assert_close(margin, -0.5, 1e-15);
        }
        other => panic!("expected inadmissible error, got {other:?}"),
    }
}

#[test]
fn theta_pmf_round_trip() {
    let mut rng = ChaCha12Rng::seed_from_u64(59);
    for d in 2..=12 {
        for _ in 0..1000 {
            let p = random_admissible_pmf(d, &mut rng);
            let t = theta_from_nd_pmf(&p);
            let back = theta_to_nd_pmf(&t).unwrap();
            assert!(p.max_abs_diff(&back) < 1e-10, "d = {d}");
            let t2 = theta_from_nd_pmf(&back);
            assert!(t.max_abs_diff(&t2) < 1e-10, "d = {d}");
        }
    }
}

// --- mixing constructions ---------------------------------------------------

#[test]
fn mixing_to_zeta_reference_cases() {
    // Uniform mixer: moments 1/(k+1).
    let z = mixing_to_zeta(&MixingSpec::Beta { alpha: 1.0 }, 6).unwrap();
    for k in 0..=6 {
        assert_close(z.get(k), 1.0 / (k as f64 + 1.0), 1e-14);
    }

    let z = mixing_to_zeta(&MixingSpec::Madsen { beta: 0.0 }, 5).unwrap();
    for k in 0..=5 {
        assert_close(z.get(k), 0.5f64.powi(k as i32), 1e-15);
    }

    let z = mixing_to_zeta(&MixingSpec::Madsen { beta: 0.5 }, 5).unwrap();
    for k in 1..=5 {
        assert_close(z.get(k), 0.5, 1e-15);
    }
}

#[test]
fn lst_spec_solves_the_half_point() {
    // LST of a point mass: psi(t) = exp(-t), so zeta_k = 2^-k (independence).
    let spec = MixingSpec::Lst(LstSpec::new(|t| (-t).exp()).unwrap());
    let z = mixing_to_zeta(&spec, 8).unwrap();
    for k in 0..=8 {
        assert_close(z.get(k), 0.5f64.powi(k as i32), 1e-10);
    }

    // Gamma LST: psi(t) = (1 + t)^(-2).
    let spec = MixingSpec::Lst(LstSpec::new(|t: f64| (1.0 + t).powi(-2)).unwrap());
    let z = mixing_to_zeta(&spec, 6).unwrap();
    let r = 2.0f64.sqrt() - 1.0; // solves (1 + r)^-2 = 1/2
    for k in 0..=6 {
        assert_close(z.get(k), (1.0 + k as f64 * r).powi(-2), 1e-9);
    }

    // psi(0) != 1 is rejected.
    assert!(LstSpec::new(|t: f64| 0.9 * (-t).exp()).is_err());
}

#[test]
fn moment_list_spec_round_trips() {
    let mu: Vec<f64> = (0..=5).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let spec = MixingSpec::Moments { moments: mu };
    let z = mixing_to_zeta(&spec, 5).unwrap();
    let direct = mixing_to_zeta(&MixingSpec::Beta { alpha: 1.0 }, 5).unwrap();
    assert_vec_close(z.values(), direct.values(), 1e-14);

    assert!(mixing_to_zeta(&MixingSpec::Moments { moments: vec![1.0, 0.4] }, 2).is_err());
}

#[test]
fn theta_from_mixing_reference_cases() {
    // Product form for the symmetric beta family.
    let t = theta_from_mixing(&MixingSpec::Beta { alpha: 1.0 }, 6).unwrap();
    assert_close(t.get(2), 1.0 / 3.0, 1e-13);
    assert_close(t.get(4), 1.0 / 5.0, 1e-13);
    assert_close(t.get(3), 0.0, 0.0);

    let t = theta_from_mixing(&MixingSpec::Beta { alpha: 0.5 }, 4).unwrap();
    assert_close(t.get(2), 0.5, 1e-13);

    // Huge alpha collapses to independence.
    let t = theta_from_mixing(&MixingSpec::Beta { alpha: 1e9 }, 6).unwrap();
    for k in 2..=6 {
        assert!(t.get(k).abs() < 1e-8);
    }
}

#[test]
fn theta_from_mixing_agrees_with_the_zeta_route() {
    let gamma_lst = MixingSpec::Lst(LstSpec::new(|t: f64| (1.0 + 0.5 * t).powi(-3)).unwrap());
    let specs = [
        MixingSpec::Beta { alpha: 0.1 },
        MixingSpec::Beta { alpha: 1.0 },
        MixingSpec::Beta { alpha: 7.5 },
        MixingSpec::Madsen { beta: 0.2 },
        MixingSpec::Madsen { beta: 0.5 },
        gamma_lst,
    ];
    for spec in &specs {
        let d = 8;
        let direct = theta_from_mixing(spec, d).unwrap();
        let via_zeta = zeta_to_theta(&mixing_to_zeta(spec, d).unwrap());
        assert!(direct.max_abs_diff(&via_zeta) < 1e-10, "{spec:?}");
    }
}

#[test]
fn mixtures_induce_positive_even_order_dependence() {
    let specs = [
        MixingSpec::Beta { alpha: 0.3 },
        MixingSpec::Beta { alpha: 2.0 },
        MixingSpec::Madsen { beta: 0.1 },
        MixingSpec::Madsen { beta: 0.4 },
        MixingSpec::Lst(LstSpec::new(|t: f64| (1.0 + 2.0 * t).powf(-0.7)).unwrap()),
    ];
    for spec in &specs {
        let t = theta_from_mixing(spec, 9).unwrap();
        for k in (2..=9).step_by(2) {
            assert!(t.get(k) >= -1e-12, "{spec:?}, k = {k}: {}", t.get(k));
        }
    }
}

// --- beta family closed forms -----------------------------------------------

#[test]
fn beta_family_reference_cases() {
    let t = beta_family_theta(1.0, 6).unwrap();
    assert_close(t.get(2), 1.0 / 3.0, 1e-15);
    assert_close(t.get(4), 1.0 / 5.0, 1e-15);
    assert_close(t.get(6), 15.0 / (3.0 * 5.0 * 7.0), 1e-15);
    assert_eq!(t.get(3), 0.0);
    assert_eq!(t.get(5), 0.0);

    // alpha -> 0 approaches the comonotone parameters.
    let t = beta_family_theta(1e-10, 8).unwrap();
    for k in (2..=8).step_by(2) {
        assert_close(t.get(k), 1.0, 1e-8);
    }

    assert!(beta_family_theta(0.0, 4).is_err());
    assert!(beta_family_theta(-1.0, 4).is_err());
}

#[test]
fn beta_family_product_and_gamma_forms_agree() {
    for alpha in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let prod = beta_family_theta(alpha, 10).unwrap();
        let gamma = beta_family_theta_gamma(alpha, 10).unwrap();
        assert!(prod.max_abs_diff(&gamma) < 1e-12, "alpha = {alpha}");
    }
}

/// Double-exponential quadrature on (a, b); handles the integrable endpoint
/// singularities of the beta weight.
fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let h = 1.0 / 128.0;
    let mut acc = 0.0;
    let mut t: f64 = -4.0;
    while t <= 4.0 {
        let s = (std::f64::consts::FRAC_PI_2 * t.sinh()).tanh();
        let x = c + hw * s;
        if x > a && x < b {
            let w = std::f64::consts::FRAC_PI_2 * t.cosh()
                / (std::f64::consts::FRAC_PI_2 * t.sinh()).cosh().powi(2);
            acc += f(x) * w;
        }
        t += h;
    }
    acc * hw * h
}

#[test]
fn beta_family_matches_the_moment_integral() {
    for alpha in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let weight = move |x: f64| x.powf(alpha - 1.0) * (1.0 - x).powf(alpha - 1.0);
        let norm = tanh_sinh(weight, 0.0, 1.0);
        let closed = beta_family_theta(alpha, 10).unwrap();
        for k in 2..=10usize {
            let num = tanh_sinh(|x| weight(x) * (x - 0.5).powi(k as i32), 0.0, 1.0);
            let quad = (-2.0f64).powi(k as i32) * num / norm;
            assert_close(closed.get(k), quad, 1e-8);
        }
    }
}

// --- copula model -----------------------------------------------------------

#[test]
fn model_json_round_trip_per_type() {
    let cases = [
        r#"{"type":"theta","d":3,"values":[0.0,1.0]}"#,
        r#"{"type":"ndpmf","d":3,"values":[0.25,0.0,0.75,0.0]}"#,
        r#"{"type":"zeta","d":3,"values":[1.0,0.5,0.25,0.0]}"#,
    ];
    let mut pmfs = Vec::new();
    for text in cases {
        let model = CopulaModel::from_json(text).unwrap();
        pmfs.push(model.canonical_pmf().unwrap());
    }
    // All three describe the same copula.
    assert!(pmfs[0].max_abs_diff(&pmfs[1]) < 1e-12);
    assert!(pmfs[0].max_abs_diff(&pmfs[2]) < 1e-12);

    let beta = CopulaModel::from_json(r#"{"type":"beta","d":4,"alpha":1.0}"#).unwrap();
    let z = zeta_from_nd_pmf(&beta.canonical_pmf().unwrap());
    assert_close(z.get(2), 1.0 / 3.0, 1e-12);

    let madsen = CopulaModel::from_json(r#"{"type":"madsen","d":4,"beta":0.0}"#).unwrap();
    let p = madsen.canonical_pmf().unwrap();
    assert!(p.max_abs_diff(&NdPmf::binomial_half(4).unwrap()) < 1e-12);
}

#[test]
fn model_json_rejects_malformed_specs() {
    for text in [
        r#"{"type":"spearman","d":3,"values":[]}"#,
        r#"{"type":"theta","d":3,"values":[0.0,1.0],"extra":1}"#,
        r#"{"type":"theta","d":3}"#,
        r#"{"type":"beta","d":4}"#,
        r#"{"type":"beta","d":4,"alpha":-2.0}"#,
        r#"{"type":"madsen","d":4,"beta":0.7}"#,
        r#"{"type":"zeta","d":3,"values":[1.0,0.49,0.25,0.0]}"#,
        r#"not json"#,
    ] {
        let err = CopulaModel::from_json(text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}");
    }
}

#[test]
fn canonicalization_is_idempotent() {
    let model = CopulaModel::from_json(r#"{"type":"beta","d":5,"alpha":0.8}"#).unwrap();
    let once = model.canonicalize().unwrap();
    let twice = once.canonicalize().unwrap();
    let (CopulaModel::Pmf(a), CopulaModel::Pmf(b)) = (&once, &twice) else {
        panic!("canonical form should be a pmf");
    };
    assert_eq!(a.values(), b.values());
}

#[test]
fn inadmissible_theta_model_fails_to_canonicalize() {
    let model = CopulaModel::from_json(r#"{"type":"theta","d":3,"values":[0.0,1.01]}"#).unwrap();
    let err = model.canonical_pmf().unwrap_err();
    assert!(matches!(err, Error::Inadmissible { .. }), "{err}");
}
