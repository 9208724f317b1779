//! The validation suite: eleven numbered criteria with pinned parameters
//! and tolerances. Each returns its measured value alongside the target
//! and tolerance it was judged with, so failures stay diagnosable from
//! the emitted row alone.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use symwave::analytic::{transparent_independent_intensity, transparent_symmetric_intensity};
use symwave::scatter::three_sector_propagator;
use symwave::{
    asymptotic_barrier, barrier_matrices_asymptotic, calibrate_sigma, deep_medium_moment,
    deep_medium_ratio_constant, exact_transmission_oracle, independent_system_transmission,
    mean_intensity_independent, mean_intensity_symmetric, monte_carlo_mean_intensity,
    sample_reflection_ensemble, strong_barrier_asymptotics, system_transmission_matrix,
    transmission_moment, BarrierAsymptotic, BarrierModal, MediumModel, MediumSpec, Propagator2,
    Regime, SeriesControl,
};

use crate::experiments::{drop_reflection, waveguide_ensemble};
use crate::{CliError, Result};

pub const CRITERION_COUNT: usize = 11;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

pub fn run_all_criteria() -> Result<Vec<CriterionOutcome>> {
    (1..=CRITERION_COUNT).map(run_criterion).collect()
}

pub fn run_criterion(index: usize) -> Result<CriterionOutcome> {
    let start = std::time::Instant::now();
    let mut outcome = match index {
        1 => deep_ratio_constant(),
        2 => moment_normalization(),
        3 => deep_asymptote_agreement(),
        4 => monte_carlo_series_agreement(),
        5 => symmetric_dominates_independent(),
        6 => medium_only_upper_bound(),
        7 => strong_barrier_growth_law(),
        8 => weak_barrier_slope_signs(),
        9 => closed_form_error_scaling(),
        10 => ensemble_mean_first_order(),
        11 => single_mode_consistency(),
        other => Err(CliError::Config(format!(
            "criterion index {other} outside 1..={CRITERION_COUNT}"
        ))),
    }?;
    outcome.seconds = start.elapsed().as_secs_f64();
    Ok(outcome)
}

fn outcome(
    index: usize,
    name: &'static str,
    measured: f64,
    target: f64,
    tolerance: f64,
    pass: bool,
    detail: String,
) -> Result<CriterionOutcome> {
    Ok(CriterionOutcome {
        index,
        name,
        measured,
        target,
        tolerance,
        pass,
        detail,
        seconds: 0.0,
    })
}

fn ctl(rel_tol: f64) -> SeriesControl {
    SeriesControl {
        rel_tol,
        max_terms: 1 << 19,
    }
}

const DENSE_GRID_POINTS: usize = 60;

fn dense_grid() -> Vec<f64> {
    (1..=DENSE_GRID_POINTS).map(|i| i as f64 * 0.1).collect()
}

/// Smoke row of the validation report (index 0, not a numbered
/// criterion): with zero fluctuation strength the Monte Carlo mean is
/// the barrier intensity to rounding.
pub fn smoke_row() -> Result<CriterionOutcome> {
    let spec = MediumSpec {
        half_length: 1.0,
        corr_length: 0.01,
        sigma: 0.0,
        model: MediumModel::Binary,
        c0: 1.0,
    };
    let barrier = BarrierAsymptotic::from_intensity(0.4, Regime::ImpedanceDrop)?;
    let est = monte_carlo_mean_intensity(&spec, &barrier, 60.0, 100, 0, true)?;
    let dev = (est.mean - 0.4).abs();
    outcome(
        0,
        "zero_fluctuation_smoke",
        dev,
        0.0,
        1e-12,
        dev <= 1e-12,
        "Monte Carlo over a fluctuation-free medium returns the barrier intensity".into(),
    )
}

/// 1. The deep-medium ratio constant lands on its known value 0.59.
fn deep_ratio_constant() -> Result<CriterionOutcome> {
    let c = deep_medium_ratio_constant();
    outcome(
        1,
        "deep_ratio_constant",
        c,
        0.59,
        0.005,
        (c - 0.59).abs() <= 0.005,
        format!("series value {c:.12}"),
    )
}

/// 2. Transmission moments normalize to one at zero depth.
fn moment_normalization() -> Result<CriterionOutcome> {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        worst = worst.max((transmission_moment(n, 0.0)? - 1.0).abs());
    }
    outcome(
        2,
        "moment_normalization",
        worst,
        0.0,
        1e-9,
        worst <= 1e-9,
        "max |E[|T|^2n] - 1| at depth 0, n = 1..6".into(),
    )
}

/// 3. At depth 30 the moment quadrature should sit within 10% of the
/// deep-medium closed form for n = 1..3.
fn deep_asymptote_agreement() -> Result<CriterionOutcome> {
    let mut ratios = Vec::new();
    for n in 1..=3 {
        ratios.push(transmission_moment(n, 30.0)? / deep_medium_moment(n, 30.0)?);
    }
    let worst = ratios
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0f64, f64::max);
    outcome(
        3,
        "deep_asymptote_agreement",
        worst,
        0.0,
        0.10,
        worst <= 0.10,
        format!(
            "quadrature/closed-form ratios at depth 30: {:.4}, {:.4}, {:.4}",
            ratios[0], ratios[1], ratios[2]
        ),
    )
}

/// 4. Monte Carlo over mirror-symmetric binary media agrees with the
/// series at nine (depth, barrier) cells, within 3 standard errors and
/// 5% relative. The measured value is the worst cell's score normalized
/// so that 1 is the edge of acceptance.
fn monte_carlo_series_agreement() -> Result<CriterionOutcome> {
    let omega = 60.0;
    let n_samples = 10_000;
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for &ell in &[0.5, 1.0, 2.0] {
        for &t1_sq in &[1.0, 0.4, 0.1] {
            let mut spec = MediumSpec {
                half_length: 1.0,
                corr_length: 0.01,
                sigma: 0.1,
                model: MediumModel::Binary,
                c0: 1.0,
            };
            spec.sigma = calibrate_sigma(&spec, omega, ell)?;
            let barrier = BarrierAsymptotic::from_intensity(t1_sq, Regime::ImpedanceDrop)?;
            let est = monte_carlo_mean_intensity(&spec, &barrier, omega, n_samples, 0, true)?;
            let series = mean_intensity_symmetric(ell, drop_reflection(t1_sq)?, &ctl(1e-6))?;
            let dev_se = (est.mean - series).abs() / est.std_error;
            let dev_rel = (est.mean - series).abs() / series;
            let score = (dev_se / 3.0).max(dev_rel / 0.05);
            if score > worst {
                worst = score;
                detail = format!(
                    "worst cell depth {ell}, barrier {t1_sq}: mc {:.5} +- {:.1e} vs series {:.5} ({dev_se:.2} se, {:.2}% rel)",
                    est.mean,
                    est.std_error,
                    series,
                    100.0 * dev_rel
                );
            }
        }
    }
    outcome(
        4,
        "monte_carlo_series_agreement",
        worst,
        0.0,
        1.0,
        worst <= 1.0,
        detail,
    )
}

/// 5. The symmetric curve dominates the independent one on the dense
/// grid for barrier intensities 1.0, 0.4, 0.1, and the transparent-pair
/// ratio stays at or below one. Normalized so 1 is the edge: the
/// transparent pair gets a 1e-6 budget, the series pairs 1.5e-3 (their
/// independent column is summed to 3e-4, and the true separation of the
/// curves is above one percent everywhere on the grid).
fn symmetric_dominates_independent() -> Result<CriterionOutcome> {
    let grid = dense_grid();
    let transparent_excess: f64 = grid
        .par_iter()
        .map(|&ell| -> Result<f64> {
            let sym = transparent_symmetric_intensity(ell)?;
            let ind = transparent_independent_intensity(ell, &ctl(1e-6))?;
            Ok((ind - sym) / sym)
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
    let mut series_excess = f64::NEG_INFINITY;
    for &t1_sq in &[0.4, 0.1] {
        let r1 = drop_reflection(t1_sq)?;
        let worst: f64 = grid
            .par_iter()
            .map(|&ell| -> Result<f64> {
                let sym = mean_intensity_symmetric(ell, r1, &ctl(1e-6))?;
                let ind = mean_intensity_independent(ell, r1, &ctl(3e-4))?;
                Ok((ind - sym) / sym)
            })
            .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
        series_excess = series_excess.max(worst);
    }
    let measured = (transparent_excess / 1e-6).max(series_excess / 1.5e-3);
    outcome(
        5,
        "symmetric_dominates_independent",
        measured,
        0.0,
        1.0,
        measured <= 1.0,
        format!(
            "max (independent - symmetric)/symmetric: transparent {transparent_excess:.2e}, barrier curves {series_excess:.2e}"
        ),
    )
}

/// 6. The symmetric mean intensity never exceeds the medium-only mean
/// intensity at the same depth, for any barrier.
fn medium_only_upper_bound() -> Result<CriterionOutcome> {
    let grid = dense_grid();
    let mut worst = f64::NEG_INFINITY;
    for &t1_sq in &[1.0, 0.4, 0.1] {
        let r1 = drop_reflection(t1_sq)?;
        let excess: f64 = grid
            .par_iter()
            .map(|&ell| -> Result<f64> {
                let sym = if t1_sq == 1.0 {
                    transparent_symmetric_intensity(ell)?
                } else {
                    mean_intensity_symmetric(ell, r1, &ctl(1e-6))?
                };
                Ok(sym - transmission_moment(1, ell)?)
            })
            .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
        worst = worst.max(excess);
    }
    outcome(
        6,
        "medium_only_upper_bound",
        worst,
        0.0,
        1e-9,
        worst <= 1e-9,
        "max over grid and barriers of symmetric mean minus medium-only mean".into(),
    )
}

/// 7. For a strong barrier (|T1|^2 = 1e-3) the series over the depths
/// 0.5, 1, 2 should match the exponential growth law within 5%.
fn strong_barrier_growth_law() -> Result<CriterionOutcome> {
    let t1_sq = 1e-3;
    let r1 = drop_reflection(t1_sq)?;
    let mut ratios = Vec::new();
    for &ell in &[0.5, 1.0, 2.0] {
        let series = mean_intensity_symmetric(ell, r1, &ctl(1e-7))?;
        ratios.push(series / strong_barrier_asymptotics(ell, t1_sq)?);
    }
    let worst = ratios
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0f64, f64::max);
    outcome(
        7,
        "strong_barrier_growth_law",
        worst,
        0.0,
        0.05,
        worst <= 0.05,
        format!(
            "series/growth-law ratios at depths 0.5, 1, 2: {:.4}, {:.4}, {:.4}",
            ratios[0], ratios[1], ratios[2]
        ),
    )
}

/// 8. The shallow-depth slope of the symmetric mean flips sign at
/// barrier intensity 1/2: rising at 0.4, falling at 0.6.
fn weak_barrier_slope_signs() -> Result<CriterionOutcome> {
    let slope = |t1_sq: f64| -> Result<f64> {
        let r1 = drop_reflection(t1_sq)?;
        let lo = mean_intensity_symmetric(0.005, r1, &ctl(1e-7))?;
        let hi = mean_intensity_symmetric(0.015, r1, &ctl(1e-7))?;
        Ok((hi - lo) / 0.01)
    };
    let rising = slope(0.4)?;
    let falling = slope(0.6)?;
    let margin = rising.min(-falling);
    outcome(
        8,
        "weak_barrier_slope_signs",
        margin,
        0.0,
        0.0,
        margin > 0.0,
        format!("slope at depth 0.01: {rising:+.4e} (barrier 0.4), {falling:+.4e} (barrier 0.6)"),
    )
}

/// 9. Error of the closed-form system transmission against the exact
/// block-propagator oracle should scale quadratically in the ensemble
/// strength: each doubling of eps should multiply the median relative
/// error by 4, within a factor of 2. Measured is the worst factor by
/// which a step ratio misses 4.
fn closed_form_error_scaling() -> Result<CriterionOutcome> {
    let instances = 100;
    let modes = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let qsets: Vec<Vec<f64>> = (0..instances)
        .map(|_| (0..modes).map(|_| 0.3 + 2.7 * rng.random::<f64>()).collect())
        .collect();
    let mut medians = Vec::new();
    for (ei, &eps) in [0.02, 0.04, 0.08].iter().enumerate() {
        let mut errs: Vec<f64> = qsets
            .par_iter()
            .enumerate()
            .map(|(ii, qs)| -> Result<f64> {
                let b = BarrierModal::new(qs.clone())?;
                let bar = barrier_matrices_asymptotic(&b);
                let p1 = b.propagators();
                let seed = 3_000_000 + (ei as u64) * 100_000 + ii as u64;
                let s = sample_reflection_ensemble(modes, eps, seed)?;
                let closed = system_transmission_matrix(&s, &bar)?;
                let oracle = exact_transmission_oracle(&s, &p1)?;
                Ok((&closed - &oracle).norm() / oracle.norm())
            })
            .collect::<Result<_>>()?;
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push((errs[instances / 2 - 1] + errs[instances / 2]) / 2.0);
    }
    let r1 = medians[1] / medians[0];
    let r2 = medians[2] / medians[1];
    let measured = (r1 / 4.0)
        .max(4.0 / r1)
        .max(r2 / 4.0)
        .max(4.0 / r2);
    outcome(
        9,
        "closed_form_error_scaling",
        measured,
        1.0,
        2.0,
        measured <= 2.0,
        format!(
            "median relative errors {:.2e}, {:.2e}, {:.2e}; step ratios {r1:.2}, {r2:.2} (quadratic scaling predicts 4)",
            medians[0], medians[1], medians[2]
        ),
    )
}

/// 10. Empirical mean transmissivity over 1e4 draws agrees with the
/// first order prediction within 3 standard errors; the shift off the
/// bare value carries the sign of q^2 - 1; the independent-halves value
/// never exceeds the bare one.
fn ensemble_mean_first_order() -> Result<CriterionOutcome> {
    let cases: [(f64, u64); 3] = [(0.3, 1), (1.0, 1_000_001), (3.0, 2_000_001)];
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    let mut pass = true;
    for (q, base) in cases {
        let ens = waveguide_ensemble(4, 0.04, q, 10_000, base)?;
        let dev = (ens.empirical - ens.first_order).abs() / ens.std_error;
        worst = worst.max(dev);
        let shift = ens.empirical - ens.bare;
        if q < 1.0 && shift >= 0.0 {
            pass = false;
        }
        if q > 1.0 && shift <= 0.0 {
            pass = false;
        }
        if ens.independent > ens.bare + 1e-12 {
            pass = false;
        }
        details.push(format!("q {q}: {dev:.2} se, shift {shift:+.2e}"));
    }
    pass = pass && worst <= 3.0;
    outcome(
        10,
        "ensemble_mean_first_order",
        worst,
        0.0,
        3.0,
        pass,
        details.join("; "),
    )
}

/// 11. With one propagating mode the waveguide pipeline must reproduce
/// the scalar formulas: the closed form against the two-propagator
/// system transmission, and the block oracle against the three-sector
/// propagator product.
fn single_mode_consistency() -> Result<CriterionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let q = 0.3 + 2.7 * rng.random::<f64>();
        let eps = 0.02 + 0.13 * rng.random::<f64>();
        let b = BarrierModal::new(vec![q])?;
        let bar = barrier_matrices_asymptotic(&b);
        let p1 = b.propagators();
        let s = sample_reflection_ensemble(1, eps, 5_000_000 + i)?;
        let (t, r) = (s.t[(0, 0)], s.r[(0, 0)]);
        let alpha = Complex64::new(1.0, 0.0) / t.conj();
        let p_plus = Propagator2::new(alpha, -r * alpha.conj());

        let matrix_route = system_transmission_matrix(&s, &bar)?[(0, 0)];
        let scalar_barrier =
            asymptotic_barrier(&BarrierAsymptotic::new(q, Regime::ImpedanceJump)?);
        let scalar_route =
            independent_system_transmission(p_plus.mirrored(), p_plus, &scalar_barrier)?;
        worst = worst.max((matrix_route - scalar_route).norm());

        let oracle_route = exact_transmission_oracle(&s, &p1)?[(0, 0)];
        let brute = three_sector_propagator(p_plus.mirrored(), p1[0], p_plus);
        let brute_t = Complex64::new(1.0, 0.0) / brute.alpha.conj();
        worst = worst.max((oracle_route - brute_t).norm());
    }
    outcome(
        11,
        "single_mode_consistency",
        worst,
        0.0,
        1e-9,
        worst <= 1e-9,
        "max |matrix route - scalar route| over 100 random instances".into(),
    )
}
