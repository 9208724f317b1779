//! Closed-form and quadrature based statistics of transmission through a
//! layered random half-medium, and the series for the mean transmitted
//! intensity of the full barrier-plus-halves system.
//!
//! Everything here is parameterized by the dimensionless depth
//! `ell = L / L_loc` (medium length over localization length). In the
//! white-noise regime the moments of the half-medium transmission
//! coefficient `T` have the spectral representation
//!
//! ```text
//!     E[|T|^(2n)] = exp(-ell/4) Int_0^inf exp(-ell s^2) w(s) phi_n(s) ds
//! ```
//!
//! with `w` the probability density of [`spectral_density`] and `phi_n`
//! the polynomials of [`moment_polynomial`]. All series over multiple
//! scattering orders reduce to combinations of such integrals, evaluated
//! here without differencing integrals (the alternating binomial sums are
//! folded into stable three term recurrences inside the integrand).

use num_complex::Complex64;

use crate::quad;
use crate::{Error, Result};

/// Truncation policy for the multiple-scattering series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesControl {
    /// Relative tolerance on the summed value.
    pub rel_tol: f64,
    /// Hard cap on the number of retained orders.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_terms: 1 << 17,
        }
    }
}

impl SeriesControl {
    fn validate(&self) -> Result<()> {
        if self.rel_tol > 0.0 && self.rel_tol < 1.0 && self.max_terms >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("series control {self:?}")))
        }
    }
}

/// Which scaling regime ties the localization length to the medium
/// statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalizationRegime {
    /// Correlation length negligible against the wavelength.
    WhiteNoise,
    /// Finite-wavelength correction; weighs the autocovariance with
    /// `cos(2 omega z / c0)`.
    WeaklyHeterogeneous,
}

/// Inputs of [`localization_length`].
#[derive(Clone, Copy, Debug)]
pub struct LocalizationQuery {
    pub omega: f64,
    pub c0: f64,
    /// Full-line integral of the autocovariance of the fluctuation process.
    pub autocov_integral: f64,
    pub regime: LocalizationRegime,
    /// Full-line integral weighted by `cos(2 omega z / c0)`; required in the
    /// weakly heterogeneous regime.
    pub cos_weighted_integral: Option<f64>,
}

/// Localization length `L_loc` with `1/L_loc = (omega^2 / 4 c0^2) I`,
/// where `I` is the plain autocovariance integral in the white-noise
/// regime and the cosine-weighted one otherwise. A vanishing integral
/// yields an infinite localization length.
pub fn localization_length(q: &LocalizationQuery) -> Result<f64> {
    if !(q.omega > 0.0 && q.c0 > 0.0 && q.omega.is_finite() && q.c0.is_finite()) {
        return Err(Error::InvalidInput(format!("localization query {q:?}")));
    }
    let integral = match q.regime {
        LocalizationRegime::WhiteNoise => q.autocov_integral,
        LocalizationRegime::WeaklyHeterogeneous => q.cos_weighted_integral.ok_or_else(|| {
            Error::InvalidInput(
                "weakly heterogeneous regime needs the cosine-weighted integral".into(),
            )
        })?,
    };
    if integral < 0.0 || !integral.is_finite() {
        return Err(Error::InvalidInput(format!(
            "autocovariance integral {integral}"
        )));
    }
    if integral == 0.0 {
        return Ok(f64::INFINITY);
    }
    let k = q.omega / q.c0;
    Ok(4.0 / (k * k * integral))
}

/// Probability density of the spectral variable `s` on `[0, inf)`:
/// `w(s) = 2 pi s sinh(pi s) / cosh^2(pi s)`, written in an overflow-safe
/// form. Integrates to one.
pub fn spectral_density(s: f64) -> f64 {
    let x = std::f64::consts::PI * s;
    let e = (-x).exp();
    let e2 = e * e;
    // sinh(x)/cosh^2(x) = 2 e^{-x} (1 - e^{-2x}) / (1 + e^{-2x})^2
    let ratio = 2.0 * e * (1.0 - e2) / ((1.0 + e2) * (1.0 + e2));
    2.0 * std::f64::consts::PI * s * ratio
}

/// Polynomial factor of the `n`-th moment integrand:
/// `phi_1 = 1` and `phi_n(s) = prod_{j=1}^{n-1} (s^2 + (j - 1/2)^2) / j^2`
/// for `n >= 2`.
pub fn moment_polynomial(n: usize, s: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput("moment order must be >= 1".into()));
    }
    let t = s * s;
    let mut value = 1.0;
    for j in 1..n {
        let jf = j as f64;
        let half = jf - 0.5;
        value *= (t + half * half) / (jf * jf);
    }
    Ok(value)
}

/// Moment of the half-medium transmitted intensity, `E[|T|^(2n)]`, at
/// depth `ell = L/L_loc >= 0`. Lies in `(0, 1]`, equals one at `ell = 0`,
/// and is strictly decreasing in both `n` and `ell`.
pub fn transmission_moment(n: usize, ell: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput("moment order must be >= 1".into()));
    }
    check_depth(ell)?;
    if ell == 0.0 {
        return Ok(1.0);
    }
    let value = quad::integrate_half_line(
        |s| {
            let t = s * s;
            let mut poly = 1.0;
            for j in 1..n {
                let jf = j as f64;
                let half = jf - 0.5;
                poly *= (t + half * half) / (jf * jf);
            }
            spectral_density(s) * (-ell * t).exp() * poly
        },
        REL_FLOOR,
    ) * (-0.25 * ell).exp();
    if value > 0.0 && value <= 1.0 + 1e-12 {
        Ok(value.min(1.0))
    } else {
        Err(Error::Numerical(format!(
            "moment quadrature out of range: n = {n}, ell = {ell}, value = {value}"
        )))
    }
}

/// Deep-medium form of [`transmission_moment`]:
/// `pi^{5/2} / (2 ell^{3/2}) phi_n(0) exp(-ell/4)`, valid for `ell >> 1`.
pub fn deep_medium_moment(n: usize, ell: f64) -> Result<f64> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "deep-medium form needs ell > 0, got {ell}"
        )));
    }
    let phi0 = moment_polynomial(n, 0.0)?;
    let pi = std::f64::consts::PI;
    Ok(pi.powf(2.5) / (2.0 * ell.powf(1.5)) * phi0 * (-0.25 * ell).exp())
}

/// Limit constant of the deep-medium ratio between the symmetric-system
/// mean intensity and the half-medium mean intensity at zero barrier
/// strength: `sum_{k>=1} 2^{-k} phi_k(0)`, about 0.59.
pub fn deep_medium_ratio_constant() -> f64 {
    let mut sum = 0.0;
    let mut phi0 = 1.0;
    let mut pow = 0.5;
    for k in 1..200 {
        let term = pow * phi0;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        // phi_{k+1}(0) = phi_k(0) ((k - 1/2)/k)^2
        let kf = k as f64;
        let r = (kf - 0.5) / kf;
        phi0 *= r * r;
        pow *= 0.5;
    }
    sum
}

/// Interference weight of the `k`-th multiple-scattering order for a thin
/// barrier with reflection coefficient `r1` on the unit-modulus family
/// `|2 r1 - 1| = 1`: `tau_k = |1 - (2 r1 - 1)^(k+1)|^2 / 4`, always in
/// `[0, 1]`.
pub fn tau_coefficient(k: usize, r1: Complex64) -> Result<f64> {
    let theta = barrier_angle(r1)?;
    Ok(tau_from_angle(k, theta))
}

fn tau_from_angle(k: usize, theta: f64) -> f64 {
    let h = ((k as f64 + 1.0) * 0.5 * theta).sin();
    h * h
}

/// Argument of `2 r1 - 1`, after checking the unit-modulus precondition.
fn barrier_angle(r1: Complex64) -> Result<f64> {
    let u = 2.0 * r1 - Complex64::new(1.0, 0.0);
    if (u.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "barrier reflection {r1} is not on the unit-modulus family"
        )));
    }
    Ok(u.arg())
}

/// Mixed moment `E[|T|^4 (1 - |T|^2)^k]` of the half-medium transmission
/// at depth `ell`. Nonnegative and bounded by `E[|T|^4]`.
pub fn mixed_moment(k: usize, ell: f64) -> Result<f64> {
    Ok(mixed_moment_batch(ell, k)?[k])
}

/// All mixed moments `E[|T|^4 (1 - |T|^2)^k]` for `k = 0..=k_max`, in one
/// quadrature sweep. They are nonnegative and sum to `E[|T|^2]` over all
/// `k`.
pub fn mixed_moment_batch(ell: f64, k_max: usize) -> Result<Vec<f64>> {
    check_depth(ell)?;
    if ell == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    let batch = mixed_batch(ell, k_max, MixedKind::Quartic);
    validate_moment_batch(&batch, ell)
}

/// All moments `m_k = E[|T|^2 (1 - |T|^2)^k]` for `k = 0..=k_max`, in one
/// quadrature sweep. They are nonnegative, decreasing in `k`, and sum to
/// one over all `k`.
pub fn intensity_moment_batch(ell: f64, k_max: usize) -> Result<Vec<f64>> {
    check_depth(ell)?;
    if ell == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    let batch = mixed_batch(ell, k_max, MixedKind::Quadratic);
    validate_moment_batch(&batch, ell)
}

fn validate_moment_batch(batch: &[f64], ell: f64) -> Result<Vec<f64>> {
    if let Some((k, &v)) = batch.iter().enumerate().find(|(_, v)| **v < -1e-10) {
        return Err(Error::Numerical(format!(
            "moment lost to cancellation: k = {k}, ell = {ell}, value = {v}"
        )));
    }
    Ok(batch.iter().map(|v| v.max(0.0)).collect())
}

/// Mean transmitted intensity `E[|T_sys|^2]` of the mirror symmetric
/// system: the two half-media are reflections of each other about the
/// barrier. Computed as `sum_k tau_k E[|T|^4 (1-|T|^2)^k]`, truncated when
/// the rigorous tail bound (every `tau_k <= 1` and the mixed moments sum
/// to `E[|T|^2]`) falls below the requested tolerance. The result never
/// exceeds `E[|T|^2]`.
pub fn mean_intensity_symmetric(ell: f64, r1: Complex64, ctl: &SeriesControl) -> Result<f64> {
    ctl.validate()?;
    check_depth(ell)?;
    let theta = barrier_angle(r1)?;
    if ell == 0.0 {
        return Ok(tau_from_angle(0, theta));
    }
    let half_mean = transmission_moment(1, ell)?;
    let mut k_cap = 256.min(ctl.max_terms);
    loop {
        let mm = mixed_batch(ell, k_cap - 1, MixedKind::Quartic);
        let mut sum = 0.0;
        let mut mass = 0.0;
        for (k, &v) in mm.iter().enumerate() {
            sum += tau_from_angle(k, theta) * v;
            mass += v;
        }
        let tail = (half_mean - mass).max(0.0);
        if tail <= ctl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
        if k_cap >= ctl.max_terms {
            return Err(Error::Numerical(format!(
                "symmetric series not converged after {k_cap} terms (tail bound {tail:.3e})"
            )));
        }
        k_cap = (k_cap * 2).min(ctl.max_terms);
    }
}

/// Mean transmitted intensity of a system whose two half-media are drawn
/// independently: `|T1|^2 sum_{k,k'} |c_{k,k'}|^2 m_k m_{k'}` with
/// `m_k = E[|T|^2 (1-|T|^2)^k]` and coupling coefficients generated by
///
/// ```text
///     c_{0,0} = 1,   c_{k,k'} = R1 c_{k-1,k'} + R1 c_{k,k'-1}
///                              + (1 - 2 R1) c_{k-1,k'-1}
/// ```
///
/// (entries with a negative index read as zero). Truncation is square in
/// `(k, k')`, doubling the order until the sum moves by less than the
/// tolerance.
pub fn mean_intensity_independent(ell: f64, r1: Complex64, ctl: &SeriesControl) -> Result<f64> {
    ctl.validate()?;
    check_depth(ell)?;
    barrier_angle(r1)?;
    let t1_sq = 1.0 - r1.norm_sqr();
    if ell == 0.0 {
        return Ok(t1_sq);
    }

    let one = Complex64::new(1.0, 0.0);
    let cross = one - 2.0 * r1;
    let mut m = mixed_batch(ell, 511.min(ctl.max_terms - 1), MixedKind::Quadratic);

    // Triangular accumulation; the square partial sum over k, k' < K is
    // exactly the state after row K - 1.
    let mut prev: Vec<Complex64> = vec![one];
    let mut sum = m[0] * m[0];
    let mut checkpoint = 256usize;
    let mut sum_at_checkpoint: Option<f64> = None;
    let mut edge = one; // c_{k,0} = r1^k
    let mut k = 1usize;
    loop {
        if k >= m.len() {
            if k >= ctl.max_terms {
                return Err(Error::Numerical(format!(
                    "independent series not converged after {k} terms"
                )));
            }
            let target = (m.len() * 2).min(ctl.max_terms);
            m = mixed_batch(ell, target - 1, MixedKind::Quadratic);
        }
        edge *= r1;
        let mut cur: Vec<Complex64> = Vec::with_capacity(k + 1);
        cur.push(edge);
        let mut row_sum = m[0] * edge.norm_sqr();
        for j in 1..=k {
            // c_{k-1,k} is not stored in the previous (triangular) row;
            // symmetry supplies it as the entry just pushed below.
            let upper = if j < k { prev[j] } else { cur[k - 1] };
            let val = r1 * upper + cross * prev[j - 1] + r1 * cur[j - 1];
            cur.push(val);
            if j < k {
                row_sum += m[j] * val.norm_sqr();
            }
        }
        sum += m[k] * (2.0 * row_sum + m[k] * cur[k].norm_sqr());
        prev = cur;

        if k + 1 == checkpoint {
            if let Some(prev_sum) = sum_at_checkpoint {
                if (sum - prev_sum).abs() <= 0.6 * ctl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
                    return Ok(t1_sq * sum);
                }
            }
            sum_at_checkpoint = Some(sum);
            checkpoint *= 2;
            if checkpoint / 2 >= ctl.max_terms {
                return Err(Error::Numerical(format!(
                    "independent series not converged after {k} terms"
                )));
            }
        }
        k += 1;
    }
}

/// Mean intensity of the symmetric system with no barrier, evaluated
/// through the geometric-series route `sum_{n>=1} 2^{-n} E[|T|^(2n)]`
/// (equivalently `E[|T|^2 / (2 - |T|^2)]`).
pub fn transparent_symmetric_intensity(ell: f64) -> Result<f64> {
    check_depth(ell)?;
    if ell == 0.0 {
        return Ok(1.0);
    }
    // One sweep over s: the geometric sum in n folds into the integrand as
    // sum_n 2^{-n} phi_n(s), truncated when the added term is negligible.
    let value = quad::integrate_half_line(
        |s| {
            let t = s * s;
            let mut poly_sum = 0.0;
            let mut phi = 1.0;
            let mut pow = 0.5;
            for j in 1..400 {
                let term = pow * phi;
                poly_sum += term;
                if term < 1e-16 * poly_sum {
                    break;
                }
                let jf = j as f64;
                let half = jf - 0.5;
                phi *= (t + half * half) / (jf * jf);
                pow *= 0.5;
            }
            spectral_density(s) * (-ell * t).exp() * poly_sum
        },
        REL_FLOOR,
    ) * (-0.25 * ell).exp();
    Ok(value)
}

/// Mean intensity of the no-barrier system whose halves are independent:
/// `sum_k m_k^2` with `m_k = E[|T|^2 (1-|T|^2)^k]`.
pub fn transparent_independent_intensity(ell: f64, ctl: &SeriesControl) -> Result<f64> {
    ctl.validate()?;
    check_depth(ell)?;
    if ell == 0.0 {
        return Ok(1.0);
    }
    let mut k_cap = 256.min(ctl.max_terms);
    loop {
        let m = mixed_batch(ell, k_cap - 1, MixedKind::Quadratic);
        let sum: f64 = m.iter().map(|v| v * v).sum();
        let mass: f64 = m.iter().sum();
        // m_k decreases in k, so the square tail is at most the last term
        // times the missing mass (the m_k themselves sum to one).
        let tail = m[k_cap - 1] * (1.0 - mass).max(0.0);
        if tail <= ctl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
        if k_cap >= ctl.max_terms {
            return Err(Error::Numerical(format!(
                "independent no-barrier series not converged after {k_cap} terms"
            )));
        }
        k_cap = (k_cap * 2).min(ctl.max_terms);
    }
}

/// First order expansion of the symmetric mean intensity in the half-medium
/// reflection strength: `|T1|^2 (1 + 2 (1 - 2 |T1|^2) E[|R|^2])`. The
/// correction changes sign at `|T1|^2 = 1/2`.
pub fn weak_scattering_approx(mean_r2: f64, t1_sq: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mean_r2) || !(t1_sq > 0.0 && t1_sq <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "weak-scattering inputs E|R|^2 = {mean_r2}, |T1|^2 = {t1_sq}"
        )));
    }
    Ok(t1_sq * (1.0 + 2.0 * (1.0 - 2.0 * t1_sq) * mean_r2))
}

/// Strongly reflecting barrier limit of the symmetric mean intensity:
/// `|T1|^2 exp(2 ell)`, from `2 E[|T|^-2] - 1 = exp(2 ell)`.
pub fn strong_barrier_asymptotics(ell: f64, t1_sq: f64) -> Result<f64> {
    check_depth(ell)?;
    if !(t1_sq > 0.0 && t1_sq <= 1.0) {
        return Err(Error::InvalidInput(format!("|T1|^2 = {t1_sq}")));
    }
    Ok(t1_sq * (2.0 * ell).exp())
}

const REL_FLOOR: f64 = 1e-18;

fn check_depth(ell: f64) -> Result<()> {
    if ell >= 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("depth ell = {ell}")))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MixedKind {
    /// `m_k = E[|T|^2 (1-|T|^2)^k]`.
    Quadratic,
    /// `mm_k = E[|T|^4 (1-|T|^2)^k]`.
    Quartic,
}

/// All mixed moments of one kind for `k = 0..=k_max` in a single quadrature
/// sweep.
///
/// At each node the alternating binomial sum over moment polynomials is
/// produced by a three term recurrence in `k`, so no differencing of
/// integrals occurs. With `t = s^2`:
///
/// ```text
///   quadratic: g_0 = 1, g_1 = 3/4 - t,
///              (n+1)^2 g_{n+1} = ((n+1)^2 + n^2 - 1/4 - t) g_n - n^2 g_{n-1}
///   quartic:   integrand carries an overall (t + 1/4);
///              u_0 = 1, u_1 = (7/4 - t)/4,
///              (n+2)^2 u_{n+1} = ((n+2)^2 + n^2 - 9/4 - t) u_n - n^2 u_{n-1}
/// ```
fn mixed_batch(ell: f64, k_max: usize, kind: MixedKind) -> Vec<f64> {
    let scale = (-0.25 * ell).exp();
    let mut out = quad::integrate_half_line_batch(
        k_max + 1,
        |s| {
            let t = s * s;
            let b = 1.0 + t;
            spectral_density(s) * (-ell * t).exp() * b * b
        },
        |s, vals| {
            let t = s * s;
            let base = spectral_density(s) * (-ell * t).exp();
            match kind {
                MixedKind::Quadratic => {
                    let mut prev = 1.0;
                    vals[0] = base * prev;
                    if k_max >= 1 {
                        let mut cur = 0.75 - t;
                        vals[1] = base * cur;
                        for n in 1..k_max {
                            let nf = n as f64;
                            let np1 = nf + 1.0;
                            let next = ((np1 * np1 + nf * nf - 0.25 - t) * cur
                                - nf * nf * prev)
                                / (np1 * np1);
                            prev = cur;
                            cur = next;
                            vals[n + 1] = base * cur;
                        }
                    }
                }
                MixedKind::Quartic => {
                    let base = base * (t + 0.25);
                    let mut prev = 1.0;
                    vals[0] = base * prev;
                    if k_max >= 1 {
                        let mut cur = (1.75 - t) / 4.0;
                        vals[1] = base * cur;
                        for n in 1..k_max {
                            let nf = n as f64;
                            let np2 = nf + 2.0;
                            let next = ((np2 * np2 + nf * nf - 2.25 - t) * cur
                                - nf * nf * prev)
                                / (np2 * np2);
                            prev = cur;
                            cur = next;
                            vals[n + 1] = base * cur;
                        }
                    }
                }
            }
        },
        REL_FLOOR,
    );
    for v in out.iter_mut() {
        *v *= scale;
        if *v < 0.0 && *v > -1e-13 {
            *v = 0.0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_polynomial_low_orders() {
        assert_eq!(moment_polynomial(1, 3.7).unwrap(), 1.0);
        let s = 0.83;
        assert!((moment_polynomial(2, s).unwrap() - (s * s + 0.25)).abs() < 1e-15);
        assert!((moment_polynomial(3, 0.0).unwrap() - 9.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn localization_length_substitution() {
        let q = LocalizationQuery {
            omega: 1.0,
            c0: 1.0,
            autocov_integral: 4.0,
            regime: LocalizationRegime::WhiteNoise,
            cos_weighted_integral: None,
        };
        assert!((localization_length(&q).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weak_scattering_substitution() {
        let v = weak_scattering_approx(0.05, 0.1).unwrap();
        assert!((v - 0.108).abs() < 1e-15);
    }

    #[test]
    fn ratio_constant_bracket() {
        let c = deep_medium_ratio_constant();
        assert!(c > 0.585 && c < 0.595);
    }
}
