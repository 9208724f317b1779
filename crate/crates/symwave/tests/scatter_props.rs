//! Structural properties of the amplitude-map algebra: group laws, the
//! propagator/scattering duality, and agreement of the closed-form system
//! transmission with the brute-force three sector product.

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;
use symwave::scatter::{mirrored_left_map, three_sector_propagator};
use symwave::{
    asymptotic_barrier, barrier_propagator, compose_propagators, compose_scattering,
    independent_system_transmission, mirror_propagator, propagator_to_scattering,
    system_transmission, BarrierAsymptotic, BarrierSpec, Propagator2, Regime, Scattering2,
};

/// Exactly unimodular pair with `|gamma| <= 3`, so every derived reflection
/// stays below 0.95 in modulus and no composition can hit a resonance.
fn propagators() -> impl Strategy<Value = Propagator2> {
    (0.0..3.0f64, 0.0..TAU, 0.0..TAU).prop_map(|(g, phase_a, phase_g)| {
        Propagator2::new(
            Complex64::from_polar((1.0 + g * g).sqrt(), phase_a),
            Complex64::from_polar(g, phase_g),
        )
    })
}

fn barriers() -> impl Strategy<Value = BarrierAsymptotic> {
    (0.0..4.0f64, prop_oneof![Just(Regime::ImpedanceDrop), Just(Regime::ImpedanceJump)])
        .prop_map(|(q, regime)| BarrierAsymptotic::new(q, regime).unwrap())
}

/// Only the impedance drop regime satisfies `|2 R1 - 1| = 1`, the
/// precondition of the mirror symmetric closed form.
fn drop_barriers() -> impl Strategy<Value = BarrierAsymptotic> {
    (0.0..4.0f64).prop_map(|q| BarrierAsymptotic::new(q, Regime::ImpedanceDrop).unwrap())
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn composition_preserves_unimodularity(p in propagators(), q in propagators()) {
        let c = compose_propagators(p, q);
        prop_assert!(c.unimodularity_defect().abs() < 1e-10);
    }

    #[test]
    fn composition_commutes_with_the_scattering_map(p in propagators(), q in propagators()) {
        let direct = propagator_to_scattering(compose_propagators(p, q)).unwrap();
        let composed = compose_scattering(
            propagator_to_scattering(p).unwrap(),
            propagator_to_scattering(q).unwrap(),
        )
        .unwrap();
        prop_assert!(close(direct.t, composed.t, 1e-9));
        prop_assert!(close(direct.r, composed.r, 1e-9));
        prop_assert!(close(direct.r_adj, composed.r_adj, 1e-9));
    }

    #[test]
    fn inverse_and_mirror_are_involutive(p in propagators()) {
        prop_assert_eq!(p.inverse().inverse(), p);
        prop_assert_eq!(mirror_propagator(mirror_propagator(p)), p);
        let round = compose_propagators(p, p.inverse());
        prop_assert!(close(round.alpha, Complex64::new(1.0, 0.0), 1e-12));
        prop_assert!(round.gamma.norm() < 1e-11);
    }

    #[test]
    fn mirrored_left_map_flips_the_reflected_amplitude(p in propagators()) {
        let m = mirrored_left_map(p);
        prop_assert_eq!(m.alpha, p.alpha);
        prop_assert_eq!(m.gamma, -p.gamma.conj());
    }

    #[test]
    fn scattering_coefficients_conserve_flux(p in propagators()) {
        let s = propagator_to_scattering(p).unwrap();
        prop_assert!((s.t.norm_sqr() + s.r.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((s.t.norm_sqr() + s.r_adj.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_transmission_matches_three_sector_product(
        p in propagators(),
        b in drop_barriers(),
    ) {
        let sys = three_sector_propagator(p.mirrored(), b.propagator(), p);
        let brute = Complex64::new(1.0, 0.0) / sys.alpha.conj();
        let closed = system_transmission(p, &asymptotic_barrier(&b)).unwrap();
        prop_assert!(close(closed, brute, 1e-9));
    }

    #[test]
    fn general_transmission_matches_three_sector_product(
        pm in propagators(),
        pp in propagators(),
        b in barriers(),
    ) {
        let sys = three_sector_propagator(pm, b.propagator(), pp);
        let brute = Complex64::new(1.0, 0.0) / sys.alpha.conj();
        let general = independent_system_transmission(pm, pp, &asymptotic_barrier(&b)).unwrap();
        prop_assert!(close(general, brute, 1e-9));
    }

    #[test]
    fn general_transmission_reduces_to_the_mirror_symmetric_form(
        p in propagators(),
        b in drop_barriers(),
    ) {
        let symmetric = system_transmission(p, &asymptotic_barrier(&b)).unwrap();
        let general =
            independent_system_transmission(p.mirrored(), p, &asymptotic_barrier(&b)).unwrap();
        prop_assert!(close(symmetric, general, 1e-9));
    }

    #[test]
    fn thin_barrier_keeps_unit_modulus_reflection_offset(q in 0.0..50.0f64) {
        let s = asymptotic_barrier(&BarrierAsymptotic::new(q, Regime::ImpedanceDrop).unwrap());
        prop_assert!(((2.0 * s.r - 1.0).norm() - 1.0).abs() < 1e-12);
        // In this regime the transmitted and reflected amplitudes split 1.
        prop_assert!((s.t + s.r - 1.0).norm() < 1e-15);
    }

    #[test]
    fn slab_propagators_are_additive_in_thickness(
        d1 in 0.0..2.0f64,
        d2 in 0.0..2.0f64,
        c1 in 0.3..2.9f64,
        zeta1 in 0.3..3.0f64,
        omega in 0.1..5.0f64,
    ) {
        // Each returned pair is anchored at its own slab center, so stacking
        // the halves at [-D/2, -D/2+d1] and [D/2-d2, D/2] moves their gammas
        // by the frame phase of the respective center.
        let slab = |d: f64| BarrierSpec { d, c0: 3.0, c1, zeta0: 1.0, zeta1 };
        let recenter = |p: Propagator2, zc: f64| {
            Propagator2::new(p.alpha, p.gamma * Complex64::from_polar(1.0, 2.0 * omega / 3.0 * zc))
        };
        let joint = barrier_propagator(&slab(d1 + d2), omega).unwrap();
        let split = compose_propagators(
            recenter(barrier_propagator(&slab(d1), omega).unwrap(), -0.5 * d2),
            recenter(barrier_propagator(&slab(d2), omega).unwrap(), 0.5 * d1),
        );
        prop_assert!(close(joint.alpha, split.alpha, 1e-11));
        prop_assert!(close(joint.gamma, split.gamma, 1e-11));
    }

    #[test]
    fn slab_propagators_are_unimodular(
        d in 0.0..3.0f64,
        c1 in 0.3..2.9f64,
        zeta1 in 0.3..3.0f64,
        omega in 0.1..5.0f64,
    ) {
        let p = barrier_propagator(
            &BarrierSpec { d, c0: 3.0, c1, zeta0: 1.0, zeta1 },
            omega,
        )
        .unwrap();
        prop_assert!(p.unimodularity_defect().abs() < 1e-12);
    }
}

#[test]
fn matched_impedance_slab_is_a_pure_delay() {
    let p = barrier_propagator(
        &BarrierSpec {
            d: 0.7,
            c0: 1.0,
            c1: 0.5,
            zeta0: 1.3,
            zeta1: 1.3,
        },
        2.0,
    )
    .unwrap();
    assert!(p.gamma.norm() < 1e-15);
    assert!((p.alpha.norm() - 1.0).abs() < 1e-14);
    // Interior phase 2.8 forward, background phase 1.4 removed.
    assert!((p.alpha - Complex64::from_polar(1.0, 2.8 - 1.4)).norm() < 1e-13);
}

#[test]
fn thin_slabs_converge_linearly_to_the_point_barrier() {
    // Thickness d at fixed strength q = (zeta0/zeta1) * (omega d / c1) / 2;
    // halving d must halve the distance to the zero thickness limit.
    let q = 0.8;
    let limit = BarrierAsymptotic::new(q, Regime::ImpedanceDrop)
        .unwrap()
        .propagator();
    let err = |d: f64| {
        let eta = d; // omega = c0 = c1 = 1
        let p = barrier_propagator(
            &BarrierSpec {
                d,
                c0: 1.0,
                c1: 1.0,
                zeta0: 2.0 * q / eta,
                zeta1: 1.0,
            },
            1.0,
        )
        .unwrap();
        (p.alpha - limit.alpha).norm() + (p.gamma - limit.gamma).norm()
    };
    let coarse = err(0.02);
    let fine = err(0.01);
    assert!(coarse < 0.05, "thin slab already far off: {coarse}");
    let ratio = coarse / fine;
    assert!(
        (1.7..2.3).contains(&ratio),
        "expected linear convergence, got ratio {ratio}"
    );
}

#[test]
fn transparent_specializations_recover_single_section_formulas() {
    // No medium: the system is just the barrier.
    let b = asymptotic_barrier(&BarrierAsymptotic::new(1.3, Regime::ImpedanceDrop).unwrap());
    let t = system_transmission(Propagator2::IDENTITY, &b).unwrap();
    assert!((t - b.t).norm() < 1e-15);

    // No barrier: T^2 / (1 - R^2) for the two mirror image halves.
    let p = Propagator2::new(Complex64::new(1.1, 0.7), Complex64::new(0.4, -0.55));
    let s = propagator_to_scattering(p).unwrap();
    let expected = s.t * s.t / (Complex64::new(1.0, 0.0) - s.r * s.r);
    let t = system_transmission(p, &Scattering2::TRANSPARENT).unwrap();
    assert!((t - expected).norm() < 1e-14);
}

#[test]
fn barrier_outside_the_unit_modulus_family_is_rejected() {
    let bad = Scattering2 {
        t: Complex64::new(0.8, 0.0),
        r: Complex64::new(0.3, 0.0),
        r_adj: Complex64::new(0.3, 0.0),
    };
    assert!(system_transmission(Propagator2::IDENTITY, &bad).is_err());
}

#[test]
fn vanishing_alpha_has_no_scattering_form() {
    let p = Propagator2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    assert!(propagator_to_scattering(p).is_err());
}
