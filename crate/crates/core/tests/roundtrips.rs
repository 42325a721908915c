use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su2poly::cmeasure::Density;
use su2poly::nlfs::{forward, from_polys, layer_strip, to_polys, w_from_ab};
use su2poly::szego::{coeffs_from_moments, extract_coeffs, ladder_from_coeffs, monic_from_moments};
use su2poly::{CircleMeasure, ClassTag, LaurentPoly, C64};

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|_| C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn disk(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(u, t)| C64::from_polar(radius * u.sqrt(), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layer_strip_inverts_forward_long(f in prop::collection::vec(disk(0.3), 0..=64)) {
        let back = layer_strip(&forward(&f)).unwrap();
        prop_assert_eq!(back.len(), f.len());
        for (x, y) in back.iter().zip(&f) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn layer_strip_inverts_forward_short(f in prop::collection::vec(disk(1.0), 0..=12)) {
        let back = layer_strip(&forward(&f)).unwrap();
        for (x, y) in back.iter().zip(&f) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn extraction_inverts_ladder(f in prop::collection::vec(disk(1.0), 1..=32)) {
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        let ex = extract_coeffs(&sys.monic, &sys.monic_tilde).unwrap();
        prop_assert_eq!(ex.class, ClassTag::TMinus);
        for (x, y) in ex.f.iter().zip(&f) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn polys_roundtrip(f in prop::collection::vec(disk(1.0), 0..=24)) {
        let pair = forward(&f);
        let (p, q) = to_polys(&pair).unwrap();
        let back = from_polys(&p, &q, f.len()).unwrap();
        prop_assert!((&back.a - &pair.a).max_abs_coeff() < 1e-14);
        prop_assert!((&back.b - &pair.b).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn conjugate_measure_moments(r in 0.0..0.95f64, j in -20i64..20) {
        let mu = CircleMeasure::mu_r(r).unwrap();
        let lhs = mu.conj().moment(j, 64).unwrap();
        let rhs = mu.moment(-j, 64).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn l_functional_is_nonnegative(r in 0.0..0.9f64, t in 0.0..std::f64::consts::TAU, n in 0usize..200) {
        let mu = CircleMeasure::mu_r(r).unwrap();
        prop_assert!(mu.l_functional(C64::from_polar(1.0, t), n, 256).unwrap() >= 0.0);
    }
}

#[test]
fn moment_route_matches_recurrence_for_small_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let mut f = random_coeffs(&mut rng, 6, 0.1);
        let pair = forward(&f);
        let w = w_from_ab(&pair.a, &pair.b, 1024).unwrap();
        let mu = CircleMeasure::from_samples(w).unwrap();
        f.resize(8, C64::new(0.0, 0.0));
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        for n in 0..=8 {
            let heine = monic_from_moments(&mu, n, 1024).unwrap();
            assert!((&heine.monic - &sys.monic[n]).max_abs_coeff() < 1e-8);
            assert!((&heine.monic_tilde - &sys.monic_tilde[n]).max_abs_coeff() < 1e-8);
        }
    }
}

#[test]
fn levinson_recovers_coefficients_of_induced_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = random_coeffs(&mut rng, 12, 0.05);
    let pair = forward(&f);
    let density = su2poly::nlfs::density_from_pair(&pair).unwrap();
    let mu = CircleMeasure::new(density, Vec::new()).unwrap();
    let ex = coeffs_from_moments(&mu, 20, 256).unwrap();
    assert_eq!(ex.class, ClassTag::TMinus);
    for (k, x) in ex.f.iter().enumerate() {
        let expected = f.get(k).copied().unwrap_or_default();
        assert!((x - expected).norm() < 1e-9, "k = {k}: {x} vs {expected}");
    }
}

#[test]
fn sampled_and_closed_form_densities_agree() {
    let r = 0.5;
    let m = 512;
    let samples: Vec<C64> = su2poly::grid::nodes(m).iter().map(|&s| su2poly::cmeasure::mu_r_density(r, s)).collect();
    let a = CircleMeasure::from_samples(samples).unwrap();
    let b = CircleMeasure::new(Density::MuR { r }, Vec::new()).unwrap();
    let f = LaurentPoly::from_real(-2, &[0.3, -1.0, 0.5, 2.0, 0.1]);
    let g = LaurentPoly::from_real(0, &[1.0, 0.0, -0.4]);
    assert!((a.pairing(&f, &g, 64).unwrap() - b.pairing(&f, &g, 64).unwrap()).norm() < 1e-12);
}
