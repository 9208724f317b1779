//! Random fluctuation models for the half-medium, exact integration of the
//! amplitude propagator over one realization, localization-length
//! calibration, and the Monte Carlo ensemble driver.
//!
//! Realizations are piecewise constant in `z`, which makes the amplitude
//! system exactly solvable cell by cell: in the rotating frame
//! `x = alpha e^{ikz}`, `y = gamma e^{-ikz}` the generator is constant on a
//! cell and its exponential has determinant one in closed form, so
//! unimodularity survives to machine precision over any number of cells.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::scatter::{three_sector_propagator, BarrierAsymptotic, Propagator2};
use crate::{Error, Result};

/// Fluctuation process used for the relative sound-speed perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MediumModel {
    /// Piecewise constant `+/- sigma` on cells of exponentially distributed
    /// length with mean `corr_length` (telegraph process).
    Binary,
    /// Ornstein-Uhlenbeck process, discretized as a stationary AR(1) chain
    /// on cells of length `corr_length / 20`.
    Ou,
}

/// Statistical description of one half-medium.
#[derive(Clone, Copy, Debug)]
pub struct MediumSpec {
    /// Extent of the half-medium, `[0, L]`.
    pub half_length: f64,
    /// Correlation length of the fluctuations.
    pub corr_length: f64,
    /// Standard deviation of the fluctuations; must stay below one so the
    /// perturbed sound speed remains positive.
    pub sigma: f64,
    pub model: MediumModel,
    /// Background sound speed.
    pub c0: f64,
}

impl MediumSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.half_length > 0.0
            && self.corr_length > 0.0
            && (0.0..1.0).contains(&self.sigma)
            && self.c0 > 0.0
            && [self.half_length, self.corr_length, self.sigma, self.c0]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("medium spec {self:?}")))
        }
    }

    /// Full-line integral of the model autocovariance, `2 sigma^2 l_c`.
    /// Both models share an exponential autocovariance with this integral.
    pub fn autocov_integral(&self) -> f64 {
        2.0 * self.sigma * self.sigma * self.corr_length
    }

    /// True when the correlation length is not well separated from the
    /// medium length, so white-noise formulas become unreliable.
    pub fn scale_separation_marginal(&self) -> bool {
        self.corr_length / self.half_length > 0.1
    }
}

/// One sampled path of the fluctuation process, piecewise constant on
/// cells. `breakpoints[i]` is the right edge of cell `i`; the first cell
/// starts at zero and the last breakpoint equals the half-length.
#[derive(Clone, Debug)]
pub struct MediumRealization {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl MediumRealization {
    pub fn len(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }
}

/// Samples one realization, deterministically in `(spec, seed)`.
pub fn sample_medium(spec: &MediumSpec, seed: u64) -> Result<MediumRealization> {
    sample_medium_stream(spec, seed, 0)
}

/// As [`sample_medium`], with an extra stream index so ensembles can draw
/// independent realizations from one seed.
pub fn sample_medium_stream(spec: &MediumSpec, seed: u64, stream: u64) -> Result<MediumRealization> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let l = spec.half_length;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    match spec.model {
        MediumModel::Binary => {
            let mut z = 0.0;
            while z < l {
                let u: f64 = rng.random();
                let step = -spec.corr_length * (1.0 - u).ln();
                let up: bool = rng.random();
                let end = (z + step).min(l);
                if end > z {
                    breakpoints.push(end);
                    values.push(if up { spec.sigma } else { -spec.sigma });
                    z = end;
                }
            }
        }
        MediumModel::Ou => {
            let h = spec.corr_length / 20.0;
            let a = (-h / spec.corr_length).exp();
            let drive = spec.sigma * (1.0 - a * a).sqrt();
            let n_cells = (l / h).ceil() as usize;
            let mut v: f64 = spec.sigma * sample_normal(&mut rng);
            let mut z = 0.0;
            for i in 0..n_cells {
                let end = (h * (i as f64 + 1.0)).min(l);
                if end > z {
                    // The AR(1) chain is stationary with variance sigma^2;
                    // clamping keeps |mu| < 1 against Gaussian outliers.
                    breakpoints.push(end);
                    values.push(v.clamp(-0.999_999, 0.999_999));
                    z = end;
                }
                v = a * v + drive * sample_normal(&mut rng);
            }
        }
    }
    Ok(MediumRealization {
        breakpoints,
        values,
        seed,
    })
}

fn sample_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Integrates the amplitude pair across one realization at angular
/// frequency `omega`, exactly on every cell.
///
/// The amplitude system is `d/dz (alpha, gamma) = (ik mu(z)/2)
/// [[1, -e^{-2ikz}], [e^{2ikz}, -1]] (alpha, gamma)` with `k = omega/c0`,
/// starting from `(1, 0)` at `z = 0`. On a cell of constant `mu` the
/// rotating-frame generator has the constant invariant
/// `beta^2 = k^2 (1 + mu)`, giving a closed-form cell map of unit
/// determinant. The result satisfies `|alpha|^2 - |gamma|^2 = 1` up to
/// rounding regardless of cell count.
pub fn integrate_half_propagator(
    real: &MediumRealization,
    omega: f64,
    c0: f64,
) -> Result<Propagator2> {
    if !(omega > 0.0 && omega.is_finite() && c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "frequency omega = {omega}, speed c0 = {c0}"
        )));
    }
    if real.breakpoints.len() != real.values.len() {
        return Err(Error::InvalidInput(
            "realization breakpoints and values differ in length".into(),
        ));
    }
    let k = omega / c0;
    let mut x = Complex64::new(1.0, 0.0);
    let mut y = Complex64::new(0.0, 0.0);
    let mut z = 0.0;
    for (&end, &m) in real.breakpoints.iter().zip(real.values.iter()) {
        if !(end > z) || !(m.abs() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "bad cell: end = {end} after {z}, value = {m}"
            )));
        }
        let dz = end - z;
        z = end;
        let beta = k * (1.0 + m).sqrt();
        let (sb, cb) = (beta * dz).sin_cos();
        let s_over = sb / beta;
        let e11 = Complex64::new(cb, k * (1.0 + 0.5 * m) * s_over);
        let e12 = Complex64::new(0.0, -k * 0.5 * m * s_over);
        let nx = e11 * x + e12 * y;
        let ny = e12.conj() * x + e11.conj() * y;
        x = nx;
        y = ny;
    }
    let alpha = Complex64::from_polar(1.0, -k * z) * x;
    let gamma = Complex64::from_polar(1.0, k * z) * y;
    Ok(Propagator2::new(alpha, gamma))
}

/// Reciprocal localization length of the model in the white-noise scaling,
/// `(k^2 / 4) * (autocovariance integral) = k^2 sigma^2 l_c / 2`.
pub fn inverse_localization_length(spec: &MediumSpec, omega: f64) -> Result<f64> {
    spec.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!("omega = {omega}")));
    }
    let k = omega / spec.c0;
    Ok(0.25 * k * k * spec.autocov_integral())
}

/// Exact Lyapunov exponent of the binary (telegraph) medium at wavenumber
/// `k`, from the stationary law of the phase diffusion.
///
/// The phase obeys `theta' = k (1 +/- sigma sin^2 theta)` between switch
/// events of rate `1/(2 l_c)` per direction, and the log-amplitude drifts
/// by `-(k mu / 2) sin 2theta`. The pi-periodic stationary densities of
/// the two branches are obtained from a fundamental-solution pair of the
/// current ODE, and the exponent is the stationary average of the drift.
/// The reciprocal localization length of the medium is twice the returned
/// value.
pub fn telegraph_lyapunov_exponent(k: f64, sigma: f64, corr_length: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite() && corr_length > 0.0 && corr_length.is_finite())
        || !(0.0..1.0).contains(&sigma)
    {
        return Err(Error::InvalidInput(format!(
            "telegraph parameters k = {k}, sigma = {sigma}, l_c = {corr_length}"
        )));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let rate = 1.0 / (2.0 * corr_length);
    let v_plus = |theta: f64| k * (1.0 + sigma * theta.sin().powi(2));
    let v_minus = |theta: f64| k * (1.0 - sigma * theta.sin().powi(2));
    let coeff_a = |theta: f64| -rate * (1.0 / v_plus(theta) + 1.0 / v_minus(theta));
    let coeff_b = |theta: f64| rate / v_minus(theta);

    // Fundamental pair of u' = a u + b on [0, pi]: phi solves the
    // homogeneous equation from 1, part solves the full one from 0.
    let n = 4096usize;
    let h = std::f64::consts::PI / n as f64;
    let mut phi = vec![0.0; n + 1];
    let mut part = vec![0.0; n + 1];
    phi[0] = 1.0;
    let mut p = 1.0;
    let mut s = 0.0;
    for i in 0..n {
        let t0 = i as f64 * h;
        let step = |p: f64, s: f64, t: f64| (coeff_a(t) * p, coeff_a(t) * s + coeff_b(t));
        let (k1p, k1s) = step(p, s, t0);
        let (k2p, k2s) = step(p + 0.5 * h * k1p, s + 0.5 * h * k1s, t0 + 0.5 * h);
        let (k3p, k3s) = step(p + 0.5 * h * k2p, s + 0.5 * h * k2s, t0 + 0.5 * h);
        let (k4p, k4s) = step(p + h * k3p, s + h * k3s, t0 + h);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        phi[i + 1] = p;
        part[i + 1] = s;
    }
    // Periodic closure fixes the current share u(0); total current is one.
    let u0 = part[n] / (1.0 - phi[n]);

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..=n {
        let theta = i as f64 * h;
        let u = phi[i] * u0 + part[i];
        let f_plus = u / v_plus(theta);
        let f_minus = (1.0 - u) / v_minus(theta);
        let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
        num += weight * (2.0 * theta).sin() * (f_plus - f_minus);
        den += weight * (f_plus + f_minus);
    }
    Ok(-(k * sigma / 2.0) * num / den)
}

/// Fluctuation strength that makes the medium exactly `ell_target`
/// localization lengths deep at wavenumber `omega / c0`.
///
/// For the binary model the exact telegraph exponent is inverted by
/// bisection; for the OU model the finite-correlation (cosine-weighted)
/// closed form is solved directly.
pub fn calibrate_sigma(spec: &MediumSpec, omega: f64, ell_target: f64) -> Result<f64> {
    spec.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!("omega = {omega}")));
    }
    if !(ell_target >= 0.0 && ell_target.is_finite()) {
        return Err(Error::InvalidInput(format!("depth target {ell_target}")));
    }
    if ell_target == 0.0 {
        return Ok(0.0);
    }
    let k = omega / spec.c0;
    let lc = spec.corr_length;
    let l = spec.half_length;
    match spec.model {
        MediumModel::Binary => {
            let depth = |sigma: f64| -> Result<f64> {
                Ok(2.0 * telegraph_lyapunov_exponent(k, sigma, lc)? * l)
            };
            let (mut lo, mut hi) = (1e-4, 0.95);
            if depth(lo)? > ell_target || depth(hi)? < ell_target {
                return Err(Error::InvalidInput(format!(
                    "depth target {ell_target} outside the calibration bracket"
                )));
            }
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if depth(mid)? < ell_target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
        MediumModel::Ou => {
            let finite = 1.0 + (2.0 * k * lc).powi(2);
            let sigma = (2.0 * ell_target * finite / (k * k * lc * l)).sqrt();
            if sigma < 1.0 {
                Ok(sigma)
            } else {
                Err(Error::InvalidInput(format!(
                    "depth target {ell_target} needs sigma = {sigma} >= 1"
                )))
            }
        }
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Monte Carlo mean of the transmitted intensity `|T_sys|^2` of the
/// barrier-plus-two-halves system.
///
/// With `symmetric` set, the left half is the mirror image of the right
/// one and costs no extra integration; otherwise it is an independent
/// draw. Realization `i` consumes RNG streams `2i` (right half) and
/// `2i + 1` (left half), so the ensemble is reproducible and
/// order-insensitive under parallel evaluation.
pub fn monte_carlo_mean_intensity(
    spec: &MediumSpec,
    barrier: &BarrierAsymptotic,
    omega: f64,
    n_samples: usize,
    seed: u64,
    symmetric: bool,
) -> Result<EnsembleEstimate> {
    spec.validate()?;
    if n_samples < 100 {
        return Err(Error::InvalidInput(format!(
            "ensemble needs at least 100 samples, got {n_samples}"
        )));
    }
    let p1 = barrier.propagator();
    let intensities = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let one = || -> Result<f64> {
                let run = |stream: u64| -> Result<Propagator2> {
                    let real = sample_medium_stream(spec, seed, stream)?;
                    integrate_half_propagator(&real, omega, spec.c0)
                };
                let p_plus = run(2 * i as u64)?;
                let p_minus = if symmetric {
                    p_plus.mirrored()
                } else {
                    run(2 * i as u64 + 1)?.mirrored()
                };
                let system = three_sector_propagator(p_minus, p1, p_plus);
                Ok(1.0 / system.alpha.norm_sqr())
            };
            one().map_err(|e| Error::Numerical(format!("realization {i}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = n_samples as f64;
    let mean = intensities.iter().sum::<f64>() / n;
    let var = (intensities.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (n - 1.0))
        .max(0.0);
    Ok(EnsembleEstimate {
        mean,
        std_error: (var / n).sqrt(),
        n_samples,
    })
}
