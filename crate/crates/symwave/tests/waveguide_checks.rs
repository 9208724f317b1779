//! Multimode checks: mode bookkeeping, flux conservation of the synthetic
//! ensemble, the closed-form system transmission against the full
//! block-propagator oracle, and the first order mean transmissivity forms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use symwave::scatter::three_sector_propagator;
use symwave::waveguide::barrier_propagators_exact;
use symwave::{
    barrier_matrices_asymptotic, barrier_matrices_exact, build_mode_basis, enhancement_factors,
    exact_transmission_oracle, independent_mean_transmissivity, independent_system_transmission,
    mean_transmissivity, sample_reflection_ensemble, system_transmission_matrix, transmissivity,
    weak_scattering_approx, BarrierAsymptotic, BarrierModal, ModalScattering, Propagator2, Regime,
    WaveguideGeometry,
};

fn geometry() -> WaveguideGeometry {
    WaveguideGeometry {
        x: 1.0,
        c0: 1.0,
        c1: 0.5,
        d: 0.1,
        omega: 10.0,
    }
}

const PI: f64 = std::f64::consts::PI;

#[test]
fn mode_basis_matches_hand_computed_wavenumbers() {
    let basis = build_mode_basis(&geometry()).unwrap();
    assert_eq!(basis.n, 3);
    for j in 1..=3usize {
        let lambda = (j as f64 * PI).powi(2);
        assert!((basis.lambdas[j - 1] - lambda).abs() < 1e-9);
        assert!((basis.betas[j - 1] - (100.0 - lambda).sqrt()).abs() < 1e-12);
        assert!((basis.betas_barrier[j - 1] - (400.0 - lambda).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn standing_transverse_mode_is_rejected() {
    let mut g = geometry();
    g.omega = 3.0 * PI; // k^2 exactly equals the third transverse eigenvalue
    assert!(build_mode_basis(&g).is_err());

    g.omega = 2.0; // below the first cutoff, no propagating mode
    assert!(build_mode_basis(&g).is_err());
}

#[test]
fn modal_barrier_strengths_follow_the_geometry() {
    let g = geometry();
    let basis = build_mode_basis(&g).unwrap();
    let b = BarrierModal::from_geometry(&g, &basis).unwrap();
    for j in 0..3 {
        let expect = basis.betas_barrier[j].powi(2) * g.d / (2.0 * basis.betas[j]);
        assert!((b.q[j] - expect).abs() < 1e-12);
    }
}

#[test]
fn ensemble_draws_conserve_flux_and_symmetry() {
    let n = 3;
    let id = DMatrix::<Complex64>::identity(n, n);
    for seed in 0..200 {
        let s = sample_reflection_ensemble(n, 0.1, seed).unwrap();
        for l in 0..n {
            for m in 0..n {
                assert_eq!(s.r[(l, m)], s.r[(m, l)], "reflection must be symmetric");
            }
        }
        let defect = (s.t.adjoint() * &s.t + s.r.adjoint() * &s.r - &id).norm();
        assert!(defect < 1e-12, "seed {seed}: flux defect {defect:.2e}");
    }
    // Deterministic in the seed.
    let a = sample_reflection_ensemble(n, 0.1, 7).unwrap();
    let b = sample_reflection_ensemble(n, 0.1, 7).unwrap();
    assert_eq!(a.r, b.r);
    assert_eq!(a.t, b.t);
}

#[test]
fn ensemble_moments_match_the_gaussian_prescription() {
    let n = 3;
    let eps = 0.1;
    let draws = 10_000u64;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    let mut abs_sq = Vec::new();
    for seed in 0..draws {
        let s = sample_reflection_ensemble(n, eps, seed).unwrap();
        for l in 0..n {
            for m in l..n {
                let z = s.r[(l, m)];
                mean += z;
                second += z * z;
                abs_sq.push(z.norm_sqr());
            }
        }
    }
    let count = abs_sq.len() as f64;
    let mean_abs = abs_sq.iter().sum::<f64>() / count;
    let se_abs =
        (abs_sq.iter().map(|v| (v - mean_abs).powi(2)).sum::<f64>() / (count - 1.0) / count).sqrt();
    assert!(
        (mean_abs - eps * eps).abs() <= 3.0 * se_abs,
        "E|R|^2 = {mean_abs:.5e} vs {:.5e} (se {se_abs:.1e})",
        eps * eps
    );
    // First and second complex moments vanish; |R| ~ eps sets the scale.
    assert!((mean / count).norm() < 4.0 * eps / count.sqrt());
    assert!((second / count).norm() < 4.0 * eps * eps / count.sqrt());
}

#[test]
fn ensemble_scale_bounds_are_enforced() {
    assert!(sample_reflection_ensemble(3, 0.3, 0).is_err());
    assert!(sample_reflection_ensemble(3, -0.01, 0).is_err());
    assert!(sample_reflection_ensemble(0, 0.1, 0).is_err());
    let s = sample_reflection_ensemble(3, 0.0, 0).unwrap();
    assert!(s.r.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn exact_barrier_conserves_flux_per_mode() {
    let g = geometry();
    let basis = build_mode_basis(&g).unwrap();
    let bar = barrier_matrices_exact(&g, &basis).unwrap();
    for j in 0..basis.n {
        let sum = bar.t[(j, j)].norm_sqr() + bar.r[(j, j)].norm_sqr();
        assert!((sum - 1.0).abs() < 1e-12, "mode {j}");
    }
    // Off-diagonal entries vanish: modes do not couple at a flat barrier.
    for l in 0..basis.n {
        for m in 0..basis.n {
            if l != m {
                assert_eq!(bar.t[(l, m)], Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn exact_barrier_approaches_the_thin_limit_linearly() {
    // Shrink d with (omega/c1)^2 d held fixed, so each mode's strength
    // q_j -> W / (2 beta_j); the exact matrices approach the zero
    // thickness ones at first order in d.
    let w_fixed = 28.48;
    let err_at = |d: f64| {
        let g = WaveguideGeometry {
            x: 1.0,
            c0: 1.0,
            c1: 10.0 * (d / w_fixed).sqrt(),
            d,
            omega: 10.0,
        };
        let basis = build_mode_basis(&g).unwrap();
        let exact = barrier_matrices_exact(&g, &basis).unwrap();
        let q_limit: Vec<f64> = basis.betas.iter().map(|b| w_fixed / (2.0 * b)).collect();
        let asym = barrier_matrices_asymptotic(&BarrierModal::new(q_limit).unwrap());
        let mut err = 0.0f64;
        for j in 0..basis.n {
            err += (exact.t[(j, j)] - asym.t[(j, j)]).norm()
                + (exact.r[(j, j)] - asym.r[(j, j)]).norm();
        }
        err
    };
    let coarse = err_at(1e-3);
    let fine = err_at(5e-4);
    assert!(coarse < 0.05, "already far from the limit: {coarse}");
    let ratio = coarse / fine;
    assert!(
        (1.7..2.3).contains(&ratio),
        "expected linear approach, got ratio {ratio}"
    );
}

#[test]
fn enhancement_factors_match_the_transmission_form() {
    // Two routes to B_lm: the rational form in the strengths, and the
    // combination of barrier transmissions it compresses.
    let b = BarrierModal::new(vec![0.3, 1.0, 2.5, 4.0]).unwrap();
    let from_q = enhancement_factors(&b);
    let t: Vec<Complex64> = b
        .q
        .iter()
        .map(|q| Complex64::new(1.0, 0.0) / Complex64::new(1.0, -q))
        .collect();
    for l in 0..4 {
        for m in 0..4 {
            let combo = t[l] + t[m] - 2.0 * t[l] * t[m];
            let direct = combo.norm_sqr() - t[l].norm_sqr() - t[m].norm_sqr();
            assert!(
                (direct - from_q[(l, m)]).abs() < 1e-12,
                "B[{l},{m}]: {direct} vs {}",
                from_q[(l, m)]
            );
        }
    }

    // The mean transmissivity is exactly the bare value plus the moment
    // weighted enhancement sum.
    let bar = barrier_matrices_asymptotic(&b);
    let m = DMatrix::from_element(4, 4, 0.01);
    let base: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    let expect = base + 0.01 * from_q.iter().sum::<f64>();
    let got = mean_transmissivity(&m, &bar).unwrap();
    assert!((got - expect).abs() < 1e-12);
}

#[test]
fn first_order_mean_matches_the_two_mode_example() {
    // Two modes at q = 3: bare transmissivity 0.2, enhancement 0.16 per
    // pair, uniform moments 0.01.
    let b = BarrierModal::new(vec![3.0, 3.0]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let e = enhancement_factors(&b);
    for v in e.iter() {
        assert!((v - 0.16).abs() < 1e-14);
    }
    let m = DMatrix::from_element(2, 2, 0.01);
    let mean = mean_transmissivity(&m, &bar).unwrap();
    assert!((mean - 0.2064).abs() < 1e-14, "mean {mean}");
}

#[test]
fn mean_shift_changes_sign_at_unit_strength() {
    let m = DMatrix::from_element(3, 3, 0.01);
    let base = |qs: Vec<f64>| {
        let b = BarrierModal::new(qs).unwrap();
        let bar = barrier_matrices_asymptotic(&b);
        let t0: f64 = (0..3).map(|j| bar.t[(j, j)].norm_sqr()).sum();
        (mean_transmissivity(&m, &bar).unwrap() - t0, t0)
    };
    let (weak, _) = base(vec![0.5; 3]);
    assert!(weak < 0.0, "weak barriers must lose transmissivity: {weak}");
    let (strong, _) = base(vec![2.0; 3]);
    assert!(strong > 0.0, "strong barriers must gain: {strong}");
    let (unit, _) = base(vec![1.0; 3]);
    assert!(unit.abs() < 1e-15, "q = 1 is the stationary point: {unit}");
}

#[test]
fn independent_halves_never_beat_the_bare_barrier() {
    let b = BarrierModal::new(vec![0.4, 1.3, 2.2]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let t0: f64 = (0..3).map(|j| bar.t[(j, j)].norm_sqr()).sum();
    for seed in 0..20 {
        let s = sample_reflection_ensemble(3, 0.15, seed).unwrap();
        let m = DMatrix::from_fn(3, 3, |l, mm| s.r[(l, mm)].norm_sqr());
        let indep = independent_mean_transmissivity(&m, &bar).unwrap();
        assert!(indep <= t0 + 1e-15, "seed {seed}: {indep} > {t0}");
    }
    // Negative moment entries are rejected.
    let bad = DMatrix::from_element(3, 3, -0.01);
    assert!(independent_mean_transmissivity(&bad, &bar).is_err());
}

#[test]
fn closed_form_system_matches_the_block_propagator_oracle() {
    let b = BarrierModal::new(vec![0.3, 1.0, 2.0, 3.0]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let p1 = b.propagators();
    for eps in [0.02, 0.08] {
        for seed in 0..50 {
            let s = sample_reflection_ensemble(4, eps, seed).unwrap();
            let closed = system_transmission_matrix(&s, &bar).unwrap();
            let oracle = exact_transmission_oracle(&s, &p1).unwrap();
            let rel = (&closed - &oracle).norm() / oracle.norm();
            assert!(rel < 1e-10, "eps {eps} seed {seed}: relative gap {rel:.2e}");
        }
    }
}

#[test]
fn single_mode_system_reduces_to_the_scalar_formulas() {
    let q = 1.7;
    let b = BarrierModal::new(vec![q]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let p1 = b.propagators();
    let scalar_barrier =
        symwave::asymptotic_barrier(&BarrierAsymptotic::new(q, Regime::ImpedanceJump).unwrap());
    for seed in 0..100 {
        let s = sample_reflection_ensemble(1, 0.1, seed).unwrap();
        let (t, r) = (s.t[(0, 0)], s.r[(0, 0)]);
        // Rebuild the right-half propagator carrying this (t, r).
        let alpha = Complex64::new(1.0, 0.0) / t.conj();
        let p_plus = Propagator2::new(alpha, -r * alpha.conj());

        let matrix_route = system_transmission_matrix(&s, &bar).unwrap()[(0, 0)];
        let scalar_route =
            independent_system_transmission(p_plus.mirrored(), p_plus, &scalar_barrier).unwrap();
        assert!(
            (matrix_route - scalar_route).norm() < 1e-12,
            "seed {seed}: {matrix_route} vs {scalar_route}"
        );

        let oracle_route = exact_transmission_oracle(&s, &p1).unwrap()[(0, 0)];
        let brute =
            three_sector_propagator(p_plus.mirrored(), p1[0], p_plus);
        let brute_t = Complex64::new(1.0, 0.0) / brute.alpha.conj();
        assert!(
            (oracle_route - brute_t).norm() < 1e-12,
            "seed {seed}: oracle {oracle_route} vs product {brute_t}"
        );
    }
}

#[test]
fn transparent_barrier_leaves_the_mirror_product() {
    // With T1 = I, R1 = 0 the system transmission collapses to
    // T+ (I - R+^2)^{-1} T+^T.
    let b = BarrierModal::new(vec![0.0; 3]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let id = DMatrix::<Complex64>::identity(3, 3);
    for seed in 0..20 {
        let s = sample_reflection_ensemble(3, 0.1, seed).unwrap();
        let closed = system_transmission_matrix(&s, &bar).unwrap();
        let product = &s.t
            * (&id - &s.r * &s.r)
                .try_inverse()
                .unwrap()
            * s.t.transpose();
        assert!((&closed - &product).norm() < 1e-12, "seed {seed}");
    }
}

#[test]
fn bare_barrier_passes_through_identity_media() {
    let b = BarrierModal::new(vec![0.5, 1.5]).unwrap();
    let bar = barrier_matrices_asymptotic(&b);
    let id = DMatrix::<Complex64>::identity(2, 2);
    let s = ModalScattering::new(id, DMatrix::zeros(2, 2)).unwrap();
    let closed = system_transmission_matrix(&s, &bar).unwrap();
    assert!((&closed - &bar.t).norm() < 1e-14);
    assert!(
        (transmissivity(&closed) - (0..2).map(|j| bar.t[(j, j)].norm_sqr()).sum::<f64>()).abs()
            < 1e-14
    );
}

#[test]
fn single_mode_mean_reduces_to_the_weak_scattering_expansion() {
    for q in [0.3, 1.0, 3.0] {
        let b = BarrierModal::new(vec![q]).unwrap();
        let bar = barrier_matrices_asymptotic(&b);
        let t1_sq = 1.0 / (1.0 + q * q);
        for mom in [0.01, 0.05] {
            let m = DMatrix::from_element(1, 1, mom);
            let matrix_mean = mean_transmissivity(&m, &bar).unwrap();
            let scalar_mean = weak_scattering_approx(mom, t1_sq).unwrap();
            assert!(
                (matrix_mean - scalar_mean).abs() < 1e-14,
                "q={q} m={mom}: {matrix_mean} vs {scalar_mean}"
            );
        }
    }
}

#[test]
fn exact_per_mode_propagators_are_unimodular() {
    let g = geometry();
    let basis = build_mode_basis(&g).unwrap();
    for p in barrier_propagators_exact(&g, &basis).unwrap() {
        assert!(p.unimodularity_defect().abs() < 1e-12);
    }
}
