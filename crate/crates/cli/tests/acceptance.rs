//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su2poly::cmeasure::PointValue;
use su2poly::kernels::{k_cd, k_direct};
use su2poly::localparams::local_params;
use su2poly::nlfs::{forward, w_from_ab, B_THRESHOLD};
use su2poly::szego::{ladder_from_coeffs, monic_from_moments, verify_system};
use su2poly::{CircleMeasure, ClassTag, LaurentPoly, C64};
use su2poly_lab::config::{random_disk, CoeffSource, DegreeSchedule, PointSource};
use su2poly_lab::experiments::{counterexample, fejer, lacunary, plancherel, roundtrip, thm5, universality};
use su2poly_lab::ExperimentConfig;

const SEED: u64 = 20_260_415;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn circle(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn exact_identities() -> Outcome {
    let mut r = rng(1);
    let (mut det, mut sq, mut su2, mut a0) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = r.gen_range(1..=40);
        let f = random_disk(&mut r, n, 1.0);
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        for (p, q) in sys.phi.iter().zip(&sys.phi_tilde) {
            let d = &(p * &p.star()) + &(q * &q.star());
            det = det.max((&d - &LaurentPoly::constant(C64::new(2.0, 0.0))).max_abs_coeff());
        }
        for _ in 0..4 {
            let s = circle(&mut r);
            let k = r.gen_range(1..=n);
            sq = sq.max((local_params(&sys, s, k).unwrap().sum_of_squares() - 2.0).abs());
        }
        let pair = forward(&f);
        su2 = su2.max(pair.su2_residual());
        let expected: f64 = f.iter().map(|x| (1.0 + x.norm_sqr()).powf(-0.5)).product();
        a0 = a0.max((pair.a0() - expected).norm());
    }
    let worst = det.max(sq).max(su2).max(a0);
    outcome(
        worst <= 1e-10,
        format!("50 systems, determinant {det:.1e}, sum of squares {sq:.1e}, SU(2) {su2:.1e}, a(0) {a0:.1e}"),
    )
}

fn christoffel_darboux() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let len = r.gen_range(1..=50);
        let f = random_disk(&mut r, len, 1.0);
        let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
        let n = r.gen_range(0..=len);
        let (z, lambda) = loop {
            let z = C64::from_polar(r.gen_range(0.9..1.1), r.gen_range(0.0..std::f64::consts::TAU));
            let l = C64::from_polar(r.gen_range(0.9..1.1), r.gen_range(0.0..std::f64::consts::TAU));
            if (1.0 - z / l).norm() > 1e-2 {
                break (z, l);
            }
        };
        let direct = k_direct(&sys, n, z, lambda).unwrap();
        let cd = k_cd(&sys, n, z, lambda).unwrap();
        worst = worst.max((direct - cd.value).norm() / direct.norm().max(1.0));
    }
    outcome(worst <= 1e-10, format!("100 instances, max |K_cd - K_direct| / max(1, |K|) = {worst:.1e}"))
}

fn closed_form_family() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.25, 0.5, 0.9] {
        let row = counterexample::row(r, 64, 4096).unwrap();
        ok &= row.ladder_err <= 1e-12 && row.product_err <= 1e-10 && row.density_err <= 1e-10;
        parts.push(format!("r = {r}: ladder {:.1e}, product {:.1e}", row.ladder_err, row.product_err.max(row.density_err)));
    }
    outcome(ok, parts.join("; "))
}

fn two_routes() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random_disk(&mut r, 6, 0.1);
        let pair = forward(&f);
        let mu = CircleMeasure::from_samples(w_from_ab(&pair.a, &pair.b, 4096).unwrap()).unwrap();
        let mut padded = f.clone();
        padded.resize(8, C64::new(0.0, 0.0));
        let sys = ladder_from_coeffs(&padded, ClassTag::TMinus).unwrap();
        for n in 0..=8 {
            let heine = monic_from_moments(&mu, n, 4096).unwrap();
            worst = worst
                .max((&heine.monic - &sys.monic[n]).max_abs_coeff())
                .max((&heine.monic_tilde - &sys.monic_tilde[n]).max_abs_coeff());
        }
    }
    outcome(worst <= 1e-8, format!("10 systems, degrees <= 8, max coefficient difference {worst:.1e}"))
}

fn roundtrips() -> Outcome {
    let cfg = ExperimentConfig {
        seed: Some(SEED),
        trials: Some(10),
        coeffs: Some(CoeffSource::Random { n: 64, radius: 1.0 }),
        ..Default::default()
    };
    let rows = roundtrip::run(&cfg).unwrap();
    let strip = rows.iter().map(|r| r.strip_err).fold(0.0, f64::max);
    let failed = rows.iter().filter(|r| r.strip_err.is_nan() || r.strip_err > 1e-9).count();
    let rejected = rows.iter().filter(|r| r.strip_status != "ok").count();
    let extract = rows.iter().map(|r| r.extract_err).fold(0.0, f64::max);
    outcome(
        strip <= 1e-9 && extract <= 1e-12,
        format!(
            "N = 64, |F| <= 1, 10 draws: layer stripping max error {strip:.1e} ({failed} draws above 1e-9, {rejected} of them rejected as inexact), extraction {extract:.1e}"
        ),
    )
}

fn orthonormality() -> Outcome {
    let mut f = vec![C64::new(0.0, 0.0); 20];
    f[0] = C64::new(0.5, 0.0);
    let sys = ladder_from_coeffs(&f, ClassTag::TMinus).unwrap();
    let mu_r = verify_system(&sys, &CircleMeasure::mu_r(0.5).unwrap(), 4096).unwrap().orthonormality;
    let cfg = ExperimentConfig::from_json(r#"{"coeffs": {"source": "from_b", "b": [0.3, 0, 0.2], "steps": 20}, "nodes": 4096}"#, "acceptance").unwrap();
    let pipe = thm5::run(&cfg).unwrap().orthonormality;
    outcome(
        mu_r <= 1e-8 && pipe <= 1e-8,
        format!("j, k <= 20: mu_r (r = 0.5) {mu_r:.1e}, pipeline measure of b = 0.3z + 0.2z^3 {pipe:.1e}"),
    )
}

fn universality_decay() -> Outcome {
    let cfg = ExperimentConfig {
        measure: Some(su2poly::MeasureSpec::MuR { r: 0.5 }),
        c: Some(2.0),
        degrees: Some(DegreeSchedule::List { values: vec![8, 16, 32, 64, 128, 256, 512] }),
        points: Some(PointSource::List { values: vec![PointValue::Pair([0.0, 1.0])] }),
        nodes: Some(4096),
        ..Default::default()
    };
    let u = universality::run(&cfg).unwrap();
    let bound_ok = u.rows.iter().all(|r| r.record.within_bound());
    let gap = |n: usize| u.rows.iter().find(|r| r.record.n == n).map(|r| r.record.gap).unwrap();
    let (g8, g512) = (gap(8), gap(512));
    outcome(
        bound_ok && g512 < 0.1 * g8,
        format!("mu_r (r = 0.5), s = i: bound holds at all n = {bound_ok}, gap(8) = {g8:.3e}, gap(512) = {g512:.3e}"),
    )
}

fn lacunary_decay() -> Outcome {
    let cfg = ExperimentConfig {
        seed: Some(SEED),
        coeffs: Some(CoeffSource::Random { n: 256, radius: lacunary::DEFAULT_RADIUS }),
        degrees: Some(DegreeSchedule::Powers { base: 1.5, count: 20 }),
        points: Some(PointSource::Random { count: 64 }),
        ..Default::default()
    };
    let lac = lacunary::run(&cfg).unwrap();
    let (m5, m20) = (lac.median_at(5).unwrap(), lac.median_at(20).unwrap());
    outcome(
        lac.sup_b < B_THRESHOLD && m20 < 0.25 * m5,
        format!(
            "N = 256, sup |b| = {:.3}, 64 points: median error k = 5 (n = 8) {m5:.3e}, k = 20 (n = 3326) {m20:.3e}",
            lac.sup_b
        ),
    )
}

fn plancherel_inequality() -> Outcome {
    let cfg = ExperimentConfig {
        seed: Some(SEED),
        trials: Some(10),
        coeffs: Some(CoeffSource::Random { n: 16, radius: 1.0 }),
        ..Default::default()
    };
    let rows = plancherel::run(&cfg).unwrap();
    let bad = rows.iter().filter(|r| r.lhs.is_nan() || r.lhs > r.rhs + 1e-8).count();
    let slack = rows.iter().map(|r| r.slack()).fold(f64::INFINITY, f64::min);
    outcome(bad == 0, format!("{} pairs on 10 systems, {bad} violations, smallest slack {slack:.1e}", rows.len()))
}

fn fejer_scaling() -> Outcome {
    let fe = fejer::run(&ExperimentConfig::default()).unwrap();
    let ok = fe.scaling.iter().all(|s| (2.5..=6.0).contains(&s.residual_ratio));
    let ratios: Vec<String> = fe
        .scaling
        .iter()
        .map(|s| format!("{} -> {}: {:.3} (modulus mismatch {:.3})", s.eps_hi, s.eps_lo, s.residual_ratio, s.mismatch_ratio))
        .collect();
    outcome(ok, format!("residual ratio under halving {}", ratios.join(", ")))
}

fn sharpness_guard() -> Outcome {
    let mut rejected = true;
    for b in [vec![C64::new(0.71, 0.0)], vec![C64::new(B_THRESHOLD, 0.0)], vec![C64::new(0.4, 0.0), C64::new(0.0, 0.0), C64::new(0.4, 0.0)]] {
        rejected &= matches!(thm5::pipeline(&b, 8, 64, 256, 8192), Err(e) if e.exit_code() == 3);
    }
    let cfg = ExperimentConfig { r_values: Some(vec![0.9, 0.99, 0.999]), ..Default::default() };
    let rows = counterexample::run(&cfg).unwrap();
    let accepted = rows.iter().all(|r| r.pipeline.is_ok());
    let maxima: Vec<String> = rows
        .iter()
        .map(|r| match &r.pipeline {
            Ok(p) => format!("{:.2}", p.w_max),
            Err(_) => "rejected".into(),
        })
        .collect();
    let monotone = counterexample::w_max_monotone(&rows);
    outcome(
        rejected && accepted && monotone,
        format!(
            "sup |b| >= 2^(-1/2) rejected: {rejected}; mu_r accepted: {accepted}; w max for r = 0.9, 0.99, 0.999: {}",
            maxima.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("exact identities", exact_identities),
        ("Christoffel-Darboux", christoffel_darboux),
        ("closed-form family", closed_form_family),
        ("two-route equivalence", two_routes),
        ("roundtrips", roundtrips),
        ("orthonormality", orthonormality),
        ("universality decay", universality_decay),
        ("lacunary convergence", lacunary_decay),
        ("Plancherel inequality", plancherel_inequality),
        ("Fejer scaling", fejer_scaling),
        ("sharpness guard", sharpness_guard),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!o.pass);
        println!("{verdict} {:>2} {name}: {} [{:.2}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
