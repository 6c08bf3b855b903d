//! Property-based invariants: geometric identities, distribution facts, and
//! algebraic round trips that must hold for arbitrary valid inputs.

use proptest::prelude::*;

use hopflift::diamond::{diamond_heights, diamond_rj_ansatz};
use hopflift::energy::{hopf_lift, log_energy, log_energy_s2};
use hopflift::expectations::normalized_series;
use hopflift::geometry::{
    fiber_point, hopf_map, random_rotation3, random_rotation4, SurfacePoint2,
};
use hopflift::sampling::{
    antipodal_augment, sample_uniform_s2, sample_uniform_s3, semicircle_cdf,
    semicircle_inverse_cdf, SeededStream,
};
use hopflift::specfun::{
    integrate, jacobi_p10, legendre_p, log_cos_integral, QuadratureSpec,
};
use hopflift::stats::{ks_statistic_one_sample, ks_threshold_one_sample};

fn s2_strategy() -> impl Strategy<Value = SurfacePoint2> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("norm too small", |(x, y, z)| x * x + y * y + z * z > 0.05)
        .prop_map(|(x, y, z)| SurfacePoint2::from_unnormalized(x, y, z).unwrap())
}


proptest! {
    /// The Hopf map sends every fibre point back to its base.
    #[test]
    fn fibre_points_project_to_their_base(
        base in s2_strategy(),
        t in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(1.0 + base.coords()[0] > 1e-6);
        let lifted = fiber_point(&base, t).unwrap();
        let back = hopf_map(&lifted);
        let d2: f64 = back
            .coords()
            .iter()
            .zip(base.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        prop_assert!(d2.sqrt() < 1e-10, "round trip moved by {}", d2.sqrt());
    }

    /// Squared complex inner product of fibre points equals (1 + ⟨x,y⟩)/2.
    #[test]
    fn fibre_inner_product_law(
        x in s2_strategy(),
        y in s2_strategy(),
        s in 0.0f64..std::f64::consts::TAU,
        t in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(1.0 + x.coords()[0] > 1e-6);
        prop_assume!(1.0 + y.coords()[0] > 1e-6);
        let w = fiber_point(&x, s).unwrap();
        let v = fiber_point(&y, t).unwrap();
        let (w1, w2) = w.complex_pair();
        let (v1, v2) = v.complex_pair();
        // In the complex chart matching the projection formula the second
        // slot carries the opposite conjugation.
        let inner = w1 * v1.conj() + w2.conj() * v2;
        let base_dot: f64 = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| a * b)
            .sum();
        prop_assert!((inner.norm_sqr() - (1.0 + base_dot) / 2.0).abs() < 1e-12);
    }

    /// Antipodes negate inner products and preserve norms.
    #[test]
    fn antipode_reverses_inner_products(x in s2_strategy(), y in s2_strategy()) {
        let dot = |a: &SurfacePoint2, b: &SurfacePoint2| -> f64 {
            a.coords().iter().zip(b.coords()).map(|(u, v)| u * v).sum()
        };
        prop_assert!((dot(&x.antipode(), &y) + dot(&x, &y)).abs() < 1e-15);
        prop_assert!((dot(&x.antipode(), &x.antipode()) - 1.0).abs() < 1e-12);
    }

    /// The semicircle inverse CDF inverts the CDF to high accuracy.
    #[test]
    fn semicircle_cdf_round_trip(target in 1e-9f64..1.0) {
        prop_assume!(target < 1.0 - 1e-9);
        let v = semicircle_inverse_cdf(target);
        prop_assert!((-1.0..=1.0).contains(&v));
        prop_assert!((semicircle_cdf(v) - target).abs() < 1e-12);
    }

    /// Diamond heights are strictly decreasing, inside (−1, 1), and
    /// antisymmetric for the standard per-parallel profile.
    #[test]
    fn diamond_heights_antisymmetric(p in 1u32..=60) {
        let rj = diamond_rj_ansatz(p);
        let z = diamond_heights(&rj);
        prop_assert_eq!(z.len(), rj.len());
        prop_assert!(z.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(z.iter().all(|&v| v.abs() < 1.0));
        for (a, b) in z.iter().zip(z.iter().rev()) {
            prop_assert!((a + b).abs() < 1e-12);
        }
    }

    /// Normalized series inverts the expansion it is built from.
    #[test]
    fn normalized_series_inverts_expansion(
        a in -1.0f64..1.0,
        b in -5.0f64..5.0,
        n in 2u64..1_000_000,
    ) {
        let nf = n as f64;
        let e = -nf * nf / 4.0 + a * nf * nf.ln() + b * nf;
        let (n1, n2) = normalized_series(e, n);
        prop_assert!((n1 - (a + b / nf.ln())).abs() < 1e-9 * (1.0 + a.abs() + b.abs()));
        prop_assert!(
            (n2 - ((a + 1.0 / 3.0) * nf.ln() + b)).abs()
                < 1e-9 * (1.0 + nf.ln()) * (1.0 + a.abs() + b.abs())
        );
    }

    /// The degree-summed Legendre identity matches the Jacobi kernel form.
    #[test]
    fn legendre_sum_matches_jacobi_kernel(u in -1.0f64..=1.0, degree in 0u32..=30) {
        let sum: f64 = (0..=degree)
            .map(|l| f64::from(2 * l + 1) * legendre_p(l, u))
            .sum();
        let via_jacobi = f64::from(degree + 1) * jacobi_p10(degree, u);
        prop_assert!(
            (sum - via_jacobi).abs() < 1e-9 * (1.0 + via_jacobi.abs()),
            "L = {degree}, u = {u}: {sum} vs {via_jacobi}"
        );
    }

    /// KS statistics stay in [0, 1] and thresholds shrink with sample size.
    #[test]
    fn ks_statistic_bounds(seed in 0u64..1_000, n in 2usize..200) {
        let mut rng = SeededStream::new(seed, 0);
        let pts = sample_uniform_s2(n, &mut rng);
        let mut zs: Vec<f64> = pts.iter().map(|p| p.coords()[2]).collect();
        let d = ks_statistic_one_sample(&mut zs, |z| (z + 1.0) / 2.0);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(
            ks_threshold_one_sample(4 * n, 1e-3) < ks_threshold_one_sample(n, 1e-3)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Rotations preserve the energy of 3-sphere configurations.
    #[test]
    fn rotation_preserves_s3_energy(seed in 0u64..10_000) {
        let mut rng = SeededStream::new(seed, 0);
        let pts = sample_uniform_s3(8, &mut rng);
        let rot = random_rotation4(&mut rng);
        let before = log_energy(&pts).unwrap();
        let after = log_energy(&rot.apply_all(&pts)).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    /// Rotations preserve the energy of 2-sphere configurations.
    #[test]
    fn rotation_preserves_s2_energy(seed in 0u64..10_000) {
        let mut rng = SeededStream::new(seed, 0);
        let pts = sample_uniform_s2(8, &mut rng);
        let rot = random_rotation3(&mut rng);
        let before = log_energy_s2(&pts).unwrap();
        let after = log_energy_s2(&rot.apply_all(&pts)).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    /// Lift energy decomposes as fibre energies plus cross terms that only
    /// depend on base geometry and phases — in particular the energy of a
    /// lifted antipodal pair is deterministic.
    #[test]
    fn lifted_antipodal_pair_energy_is_deterministic(
        base in s2_strategy(),
        seed in 0u64..10_000,
        k in 1u32..12,
    ) {
        prop_assume!(base.coords()[0].abs() < 0.99);
        let mut rng = SeededStream::new(seed, 5);
        let pair = [base, base.antipode()];
        let lifted = hopf_lift(&pair, k, &mut rng).unwrap();
        let kf = f64::from(k);
        let want = -2.0 * kf * kf.ln() - kf * kf * std::f64::consts::LN_2;
        let got = log_energy(&lifted).unwrap();
        prop_assert!((got - want).abs() < 1e-9, "k = {k}: {got} vs {want}");
    }

    /// The closed form for ∫₀^π log(a + b·cos x) dx matches quadrature.
    #[test]
    fn log_cos_closed_form_matches_quadrature(
        a in 0.2f64..4.0,
        frac in -0.95f64..0.95,
    ) {
        let b = a * frac;
        let closed = log_cos_integral(a, b).unwrap();
        let quad = integrate(
            |x| (a + b * x.cos()).ln(),
            0.0,
            std::f64::consts::PI,
            &QuadratureSpec::default(),
        )
        .unwrap();
        prop_assert!((closed - quad).abs() < 1e-9, "{closed} vs {quad}");
    }

    /// Identical substreams reproduce samples bit for bit; distinct
    /// substreams differ.
    #[test]
    fn seeded_streams_are_reproducible(seed in 0u64..10_000, stream in 0u64..64) {
        let mut a = SeededStream::new(seed, stream);
        let mut b = SeededStream::new(seed, stream);
        let pa = sample_uniform_s3(4, &mut a);
        let pb = sample_uniform_s3(4, &mut b);
        for (x, y) in pa.iter().zip(&pb) {
            for (u, v) in x.coords().iter().zip(y.coords()) {
                prop_assert_eq!(u.to_bits(), v.to_bits());
            }
        }
        let mut c = SeededStream::new(seed, stream + 1);
        let pc = sample_uniform_s3(4, &mut c);
        prop_assert!(pa
            .iter()
            .zip(&pc)
            .any(|(x, y)| x.coords() != y.coords()));
    }

    /// Antipodal augmentation doubles the size and appends exact negations.
    #[test]
    fn antipodal_augment_appends_negations(seed in 0u64..10_000, n in 1usize..20) {
        let mut rng = SeededStream::new(seed, 1);
        let pts = sample_uniform_s3(n, &mut rng);
        let all = antipodal_augment(&pts);
        prop_assert_eq!(all.len(), 2 * n);
        for (i, p) in pts.iter().enumerate() {
            for (u, v) in p.coords().iter().zip(all[n + i].coords()) {
                prop_assert_eq!((-u).to_bits(), v.to_bits());
            }
        }
    }
}
