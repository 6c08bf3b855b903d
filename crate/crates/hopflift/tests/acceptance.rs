//! The release gate: ten end-to-end criteria covering exact identities,
//! Monte Carlo agreement with every closed form, quadrature identities,
//! asymptotic coefficients, and the determinism/invariance suite. Each
//! criterion prints one PASS/FAIL line; the test fails if any criterion
//! fails.

use std::time::Instant;

use rayon::prelude::*;

use hopflift::diamond::{
    build_diamond, diamond_expected_energy_s2, diamond_heights, diamond_rj_ansatz,
    DiamondSpec,
};
use hopflift::dpp::{
    build_projection_kernel, constant_profile, harmonic_profile, spherical_profile,
    EnsembleFamily,
};
use hopflift::energy::{fiber_energy, hopf_lift, log_energy, log_energy_s2, roots_of_unity_circle};
use hopflift::expectations::{
    constants, expected_lifted_diamond_semianalytic, expected_lifted_dpp,
    expected_lifted_spherical_closed, expected_lifted_uniform, expected_uniform_s3,
    expected_uniform_s3_antipodal, rational_approx_sequence,
    spherical_linear_coefficient, ExpansionCoefficients,
};
use hopflift::geometry::{fiber_point, hopf_map, random_rotation3, random_rotation4};
use hopflift::harness::{mc_estimate, ExperimentConfig, Family, KRule};
use hopflift::harness::sweep_diamond_alpha;
use hopflift::sampling::{sample_uniform_s2, SeededStream};
use hopflift::specfun::{gamma_ratio, integrate, jacobi_p10, legendre_p, log_cos_integral, QuadratureSpec};
use hopflift::stats::mean_and_se;

use rand::Rng;

type Check = (&'static str, fn() -> Result<(), String>);

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

fn check_close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() < tol {
        Ok(())
    } else {
        fail(format!("{what}: got {got}, want {want} (tol {tol})"))
    }
}

fn check_within_3se(what: &str, mean: f64, se: f64, target: f64) -> Result<(), String> {
    if se < 0.0 || !se.is_finite() {
        return fail(format!("{what}: invalid SE {se}"));
    }
    // Deterministic families (e.g. a single rotation-invariant parallel) have
    // SE at round-off level; keep a floating-point floor so the comparison
    // stays meaningful there while remaining far below any genuine MC error.
    let tol = 3.0 * se + 1e-9 * (1.0 + target.abs());
    let dev = (mean - target).abs();
    if dev < tol {
        Ok(())
    } else {
        fail(format!(
            "{what}: mean {mean} vs target {target}, |dev| = {dev} > 3·SE = {}",
            3.0 * se
        ))
    }
}

fn mc_config(family: Family, k: u32, runs: u32, seed: u64) -> ExperimentConfig {
    ExperimentConfig { family, k_rule: KRule::Explicit { k }, runs, seed }
}

/// 1. Exact fibre energy for k roots of unity, k = 2..=64, tol 1e-9.
fn criterion_fibre_energy() -> Result<(), String> {
    for k in 2..=64u32 {
        let circle = roots_of_unity_circle(k).map_err(|e| e.to_string())?;
        let e = log_energy(&circle).map_err(|e| e.to_string())?;
        check_close(&format!("k = {k}"), e, fiber_energy(k), 1e-9)?;
    }
    Ok(())
}

/// 2. Uniform points on the 3-sphere (plain and antipodal) match their
/// closed forms within 3 SE.
fn criterion_uniform_mc() -> Result<(), String> {
    let row = mc_estimate(&mc_config(Family::UniformS3 { n: 64 }, 1, 200, 0xA1))
        .map_err(|e| e.to_string())?;
    check_within_3se("uniform N=64", row.energy_mean, row.energy_se, expected_uniform_s3(64))?;

    let row = mc_estimate(&mc_config(Family::AntipodalS3 { n: 20 }, 1, 500, 0xA2))
        .map_err(|e| e.to_string())?;
    let target = expected_uniform_s3_antipodal(20).map_err(|e| e.to_string())?;
    check_within_3se("antipodal N=20", row.energy_mean, row.energy_se, target)
}

/// 3. Lifted uniform MC agreement; optimal fibre sizes k=4 (uniform) and
/// k=7 (antipodal) with their linear coefficients to 1e-4.
fn criterion_lifted_uniform() -> Result<(), String> {
    let row = mc_estimate(&mc_config(
        Family::LiftedUniform { base_points: 16 },
        4,
        200,
        0xB1,
    ))
    .map_err(|e| e.to_string())?;
    check_within_3se(
        "lifted uniform M=16 k=4",
        row.energy_mean,
        row.energy_se,
        expected_lifted_uniform(16, 4),
    )?;

    let argmin = |coeff: &dyn Fn(u32) -> f64| -> u32 {
        (1..=20u32).min_by(|&a, &b| coeff(a).total_cmp(&coeff(b))).unwrap()
    };
    let uniform_lin = |k: u32| ExpansionCoefficients::lifted_uniform(k).linear;
    let antipodal_lin = |k: u32| ExpansionCoefficients::lifted_antipodal(k).linear;
    if argmin(&uniform_lin) != 4 {
        return fail(format!("uniform argmin k = {}", argmin(&uniform_lin)));
    }
    if argmin(&antipodal_lin) != 7 {
        return fail(format!("antipodal argmin k = {}", argmin(&antipodal_lin)));
    }
    check_close("antipodal linear coefficient k=6", antipodal_lin(6), -0.87123, 1e-4)?;
    check_close("antipodal linear coefficient k=7", antipodal_lin(7), -0.87192, 1e-4)
}

/// 4. Quadrature identities: the constant-profile pair integral is 1/4;
/// the spherical pair integral matches its gamma-ratio closed form for
/// r ≤ 20; the log-cosine integral matches quadrature on random (a, b).
fn criterion_quadrature_identities() -> Result<(), String> {
    let quad = QuadratureSpec::default();
    let q0 = constant_profile().q_integral(&quad).map_err(|e| e.to_string())?;
    check_close("constant-profile pair integral", q0, 0.25, 1e-8)?;

    for r in 1..=20u32 {
        let q = spherical_profile(r).q_integral(&quad).map_err(|e| e.to_string())?;
        let ratio = gamma_ratio(r).map_err(|e| e.to_string())?;
        let rf = f64::from(r);
        check_close(
            &format!("spherical pair integral r={r}"),
            q,
            (ratio - 1.0) / (4.0 * rf * rf),
            1e-8,
        )?;
    }

    let mut rng = SeededStream::new(0xC4, 0);
    for i in 0..20 {
        let a = rng.random_range(0.3f64..3.0);
        let b = a * rng.random_range(-0.9f64..0.9);
        let closed = log_cos_integral(a, b).map_err(|e| e.to_string())?;
        let by_quad = integrate(|x| (a + b * x.cos()).ln(), 0.0, std::f64::consts::PI, &quad)
            .map_err(|e| e.to_string())?;
        check_close(&format!("log-cos integral #{i} (a={a:.3}, b={b:.3})"), closed, by_quad, 1e-9)?;
    }
    Ok(())
}

/// 5. Spherical-ensemble lift: closed form ≡ quadrature form (r ≤ 20,
/// 1e-7); MC at (r=8, k=3) within 3 SE; degenerate identities exact.
fn criterion_spherical_lift() -> Result<(), String> {
    let quad = QuadratureSpec::default();
    for r in 1..=20u32 {
        for k in [1u32, 3] {
            let closed = expected_lifted_spherical_closed(r, k);
            let viaq = expected_lifted_dpp(&spherical_profile(r), k, &quad)
                .map_err(|e| e.to_string())?;
            check_close(&format!("closed vs quadrature (r={r}, k={k})"), closed, viaq, 1e-7)?;
        }
    }

    let row = mc_estimate(&mc_config(Family::LiftedSpherical { r: 8 }, 3, 500, 0xD5))
        .map_err(|e| e.to_string())?;
    check_within_3se(
        "lifted spherical r=8 k=3",
        row.energy_mean,
        row.energy_se,
        expected_lifted_spherical_closed(8, 3),
    )?;

    check_close("E(1,1)", expected_lifted_spherical_closed(1, 1), 0.0, 1e-12)?;
    check_close(
        "E(1,2)",
        expected_lifted_spherical_closed(1, 2),
        -2.0 * std::f64::consts::LN_2,
        1e-12,
    )
}

/// 6. Linear coefficients: rational values to 3 decimals; the limit
/// constants with C_S < C_H; the first rational approximation term.
fn criterion_coefficients() -> Result<(), String> {
    check_close("coefficient at 1/2", spherical_linear_coefficient(1, 2), 0.396, 5e-4)?;
    check_close("coefficient at 2/5", spherical_linear_coefficient(2, 5), 0.395, 5e-4)?;

    let c = constants();
    check_close("C_S", c.c_s, 0.394_357_126_608_649_23, 1e-5)?;
    check_close("C_H", c.c_h, 0.696_766_391_649_151_93, 1e-4)?;
    if !(c.c_s < c.c_h) {
        return fail(format!("expected C_S < C_H, got {} vs {}", c.c_s, c.c_h));
    }

    let t = rational_approx_sequence(1).map_err(|e| e.to_string())?;
    if (t.a, t.b, t.k, t.r, t.n) != (4, 10, 10, 40, 400) {
        return fail(format!("sequence term 1 = {t:?}"));
    }
    Ok(())
}

/// 7. Harmonic ensemble: exact kernel diagonal; addition identity (L ≤ 30);
/// reproducing-property quadrature (L ≤ 10); MC at (L=2, k=3); L=0 lift
/// reduces to a single fibre.
fn criterion_harmonic() -> Result<(), String> {
    let quad = QuadratureSpec::default();
    let mut rng = SeededStream::new(0xE7, 0);

    for degree in 0..=30u32 {
        let kernel = build_projection_kernel(EnsembleFamily::Harmonic { degree });
        let want = f64::from((degree + 1) * (degree + 1)) / (4.0 * std::f64::consts::PI);
        for p in sample_uniform_s2(3, &mut rng) {
            let got = kernel.diagonal_at(&p);
            check_close(&format!("kernel diagonal L={degree}"), got, want, 1e-9 * want)?;
        }
        // Addition identity: summed Legendre series equals the Jacobi form.
        for i in 0..10 {
            let u = -1.0 + 2.0 * f64::from(i) / 9.0;
            let sum: f64 =
                (0..=degree).map(|l| f64::from(2 * l + 1) * legendre_p(l, u)).sum();
            let via = f64::from(degree + 1) * jacobi_p10(degree, u);
            check_close(&format!("addition identity L={degree} u={u:.2}"), sum, via, 1e-9 * (1.0 + via.abs()))?;
        }
    }

    for degree in 0..=10u32 {
        let lp1 = f64::from(degree + 1);
        let diag = lp1 * lp1 / (4.0 * std::f64::consts::PI);
        let integral = integrate(
            |u| {
                let k = lp1 / (4.0 * std::f64::consts::PI) * jacobi_p10(degree, u);
                2.0 * std::f64::consts::PI * k * k
            },
            -1.0,
            1.0,
            &quad,
        )
        .map_err(|e| e.to_string())?;
        check_close(&format!("reproducing property L={degree}"), integral, diag, 1e-9)?;
    }

    let row = mc_estimate(&mc_config(Family::LiftedHarmonic { degree: 2 }, 3, 500, 0xE8))
        .map_err(|e| e.to_string())?;
    let target = expected_lifted_dpp(&harmonic_profile(2), 3, &quad).map_err(|e| e.to_string())?;
    check_within_3se("lifted harmonic L=2 k=3", row.energy_mean, row.energy_se, target)?;

    for k in [2u32, 5] {
        let e = expected_lifted_dpp(&harmonic_profile(0), k, &quad).map_err(|e| e.to_string())?;
        check_close(&format!("L=0 reduces to one fibre (k={k})"), e, fiber_energy(k), 1e-9)?;
    }
    Ok(())
}

/// 8. Diamond on the 2-sphere: closed form matches MC within 3 SE for
/// p ∈ {1,2,3,5}; the single-parallel pair case is exactly −8 log 2;
/// heights are antisymmetric.
fn criterion_diamond() -> Result<(), String> {
    const RUNS: u64 = 10_000;
    for p in [1u32, 2, 3, 5] {
        let spec = DiamondSpec::ansatz(p);
        let closed = diamond_expected_energy_s2(&spec);
        let energies: Vec<f64> = (0..RUNS)
            .into_par_iter()
            .map(|i| {
                let mut rng = SeededStream::new(0xF8 + u64::from(p), i);
                log_energy_s2(&build_diamond(&spec, &mut rng)).unwrap()
            })
            .collect();
        let (mean, se) = mean_and_se(&energies);
        check_within_3se(&format!("diamond p={p}"), mean, se, closed)?;
    }

    let pair = DiamondSpec::from_rj(vec![2]).map_err(|e| e.to_string())?;
    check_close(
        "single-parallel pair closed form",
        diamond_expected_energy_s2(&pair),
        -8.0 * std::f64::consts::LN_2,
        1e-12,
    )?;
    let mut rng = SeededStream::new(0xF1, 0);
    let direct = log_energy_s2(&build_diamond(&pair, &mut rng)).map_err(|e| e.to_string())?;
    check_close("single-parallel pair direct energy", direct, -8.0 * std::f64::consts::LN_2, 1e-12)?;

    for p in [1u32, 2, 3, 5, 10] {
        let z = diamond_heights(&diamond_rj_ansatz(p));
        for (a, b) in z.iter().zip(z.iter().rev()) {
            if (a + b).abs() > 1e-12 {
                return fail(format!("heights not antisymmetric at p={p}: {a} vs {b}"));
            }
        }
    }
    Ok(())
}

/// 9. Lifted diamond: semianalytic expectation matches MC within 3 SE at
/// (p=2, k=3); the α = 1.2 sweep reaches n₁ ∈ (−0.36, −0.28) and
/// n₂ ∈ (−0.2, 0.3) at the largest size (N ≈ 5·10⁴).
fn criterion_lifted_diamond() -> Result<(), String> {
    let quad = QuadratureSpec::default();
    let spec = DiamondSpec::ansatz(2);
    let target = expected_lifted_diamond_semianalytic(&spec, 3, &quad).map_err(|e| e.to_string())?;
    let row = mc_estimate(&mc_config(
        Family::LiftedDiamond { rj: spec.points_per_parallel().to_vec() },
        3,
        10_000,
        0x91,
    ))
    .map_err(|e| e.to_string())?;
    check_within_3se("lifted diamond p=2 k=3", row.energy_mean, row.energy_se, target)?;

    let rows = sweep_diamond_alpha(&[8, 12, 16, 20, 24, 27], 1.2, 2, 0x92)
        .map_err(|e| e.to_string())?;
    let last = rows.last().expect("sweep produced rows");
    if last.n < 30_000 {
        return fail(format!("sweep peaked at N = {}, expected ≈ 5·10⁴", last.n));
    }
    if !(-0.36 < last.n1 && last.n1 < -0.28) {
        return fail(format!("n1 at N={} is {}, outside (−0.36, −0.28)", last.n, last.n1));
    }
    if !(-0.2 < last.n2 && last.n2 < 0.3) {
        return fail(format!("n2 at N={} is {}, outside (−0.2, 0.3)", last.n, last.n2));
    }
    Ok(())
}

/// 10. Invariance suite: rotation invariance of the energy (1e-9), Hopf
/// round trips (1e-10), bit-identical seed determinism, and √2 shrinkage
/// of the SE when the run count doubles (±20%).
fn criterion_invariance() -> Result<(), String> {
    let mut rng = SeededStream::new(0x10A, 0);

    let base = sample_uniform_s2(10, &mut rng);
    let lifted = hopf_lift(&base, 3, &mut rng).map_err(|e| e.to_string())?;
    let e0 = log_energy(&lifted).map_err(|e| e.to_string())?;
    let rot4 = random_rotation4(&mut rng);
    let e1 = log_energy(&rot4.apply_all(&lifted)).map_err(|e| e.to_string())?;
    check_close("rotation invariance on the 3-sphere", e1, e0, 1e-9)?;

    let s2 = sample_uniform_s2(12, &mut rng);
    let f0 = log_energy_s2(&s2).map_err(|e| e.to_string())?;
    let rot3 = random_rotation3(&mut rng);
    let f1 = log_energy_s2(&rot3.apply_all(&s2)).map_err(|e| e.to_string())?;
    check_close("rotation invariance on the 2-sphere", f1, f0, 1e-9)?;

    for p in sample_uniform_s2(50, &mut rng) {
        if 1.0 + p.coords()[0] < 1e-6 {
            continue;
        }
        for i in 0..6 {
            let t = std::f64::consts::TAU * f64::from(i) / 6.0 + 0.37;
            let w = fiber_point(&p, t).map_err(|e| e.to_string())?;
            let back = hopf_map(&w);
            let d2: f64 = back
                .coords()
                .iter()
                .zip(p.coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2.sqrt() > 1e-10 {
                return fail(format!("hopf round trip moved by {}", d2.sqrt()));
            }
        }
    }

    let cfg = mc_config(Family::LiftedSpherical { r: 4 }, 2, 5, 0x10B);
    let a = mc_estimate(&cfg).map_err(|e| e.to_string())?;
    let b = mc_estimate(&cfg).map_err(|e| e.to_string())?;
    if a.energy_mean.to_bits() != b.energy_mean.to_bits()
        || a.energy_se.to_bits() != b.energy_se.to_bits()
    {
        return fail("repeated estimate is not bit-identical".into());
    }

    let small = mc_estimate(&mc_config(Family::UniformS3 { n: 16 }, 1, 400, 0x10C))
        .map_err(|e| e.to_string())?;
    let large = mc_estimate(&mc_config(Family::UniformS3 { n: 16 }, 1, 800, 0x10C))
        .map_err(|e| e.to_string())?;
    let ratio = large.energy_se / small.energy_se;
    let expected = std::f64::consts::FRAC_1_SQRT_2;
    if (ratio / expected - 1.0).abs() > 0.2 {
        return fail(format!("SE ratio {ratio} deviates from {expected} by >20%"));
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let checks: Vec<Check> = vec![
        ("exact fibre energy", criterion_fibre_energy),
        ("uniform and antipodal MC", criterion_uniform_mc),
        ("lifted uniform optima", criterion_lifted_uniform),
        ("quadrature identities", criterion_quadrature_identities),
        ("spherical-ensemble lift", criterion_spherical_lift),
        ("asymptotic coefficients", criterion_coefficients),
        ("harmonic ensemble", criterion_harmonic),
        ("diamond configuration", criterion_diamond),
        ("lifted diamond and sweep", criterion_lifted_diamond),
        ("invariance suite", criterion_invariance),
    ];

    let mut failures = Vec::new();
    for (i, (name, run)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:2} ({name}): PASS [{secs:.2}s]", i + 1),
            Err(msg) => {
                println!("criterion {:2} ({name}): FAIL [{secs:.2}s] — {msg}", i + 1);
                failures.push(format!("criterion {} ({name}): {msg}", i + 1));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} acceptance criterion(s) failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
