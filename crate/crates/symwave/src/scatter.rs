//! Exact 2x2 propagator and scattering algebra for one dimensional sections.
//!
//! A lossless section of medium maps the right and left going wave
//! amplitudes on one side to those on the other side through a complex
//! matrix of the form
//!
//! ```text
//!     [ alpha  conj(gamma) ]
//!     [ gamma  conj(alpha) ]        with |alpha|^2 - |gamma|^2 = 1.
//! ```
//!
//! Only the pair `(alpha, gamma)` is stored; the other two entries are
//! redundant. The same section can be described by its transmission and
//! reflection coefficients, and both descriptions compose. This module
//! provides the conversions, the composition rules, the thin barrier
//! models, and the assembly of a full barrier-plus-two-halves system.

use num_complex::Complex64;

use crate::{Error, Result};

/// Modulus below which a composition denominator is treated as resonant.
pub const RESONANCE_GUARD: f64 = 1e-14;

/// Amplitude map of a lossless section, stored as the pair `(alpha, gamma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator2 {
    pub alpha: Complex64,
    pub gamma: Complex64,
}

impl Propagator2 {
    /// Section of zero extent.
    pub const IDENTITY: Self = Self {
        alpha: Complex64::new(1.0, 0.0),
        gamma: Complex64::new(0.0, 0.0),
    };

    pub fn new(alpha: Complex64, gamma: Complex64) -> Self {
        Self { alpha, gamma }
    }

    /// `|alpha|^2 - |gamma|^2 - 1`; zero for any physical (lossless) section.
    pub fn unimodularity_defect(&self) -> f64 {
        self.alpha.norm_sqr() - self.gamma.norm_sqr() - 1.0
    }

    /// Full 2x2 matrix in row major order.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [self.alpha, self.gamma.conj()],
            [self.gamma, self.alpha.conj()],
        ]
    }

    /// Inverse map. For a unimodular pair the inverse is `(conj(alpha), -gamma)`.
    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            gamma: -self.gamma,
        }
    }

    /// See [`mirror_propagator`].
    pub fn mirrored(&self) -> Self {
        mirror_propagator(*self)
    }

    /// See [`propagator_to_scattering`].
    pub fn scattering(&self) -> Result<Scattering2> {
        propagator_to_scattering(*self)
    }
}

/// Transmission and reflection coefficients of a section.
///
/// `t` and `r` describe a wave incident from the left, `r_adj` is the
/// reflection seen by a wave incident from the right. For a section derived
/// from a unimodular propagator, `|t|^2 + |r|^2 = 1` and
/// `|t|^2 + |r_adj|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scattering2 {
    pub t: Complex64,
    pub r: Complex64,
    pub r_adj: Complex64,
}

impl Scattering2 {
    /// Fully transparent section.
    pub const TRANSPARENT: Self = Self {
        t: Complex64::new(1.0, 0.0),
        r: Complex64::new(0.0, 0.0),
        r_adj: Complex64::new(0.0, 0.0),
    };
}

/// Finite slab of contrasting material: thickness `d`, interior sound speed
/// `c1` and impedance `zeta1`, embedded in a background with speed `c0` and
/// impedance `zeta0`. All fields must be strictly positive.
#[derive(Clone, Copy, Debug)]
pub struct BarrierSpec {
    pub d: f64,
    pub c0: f64,
    pub c1: f64,
    pub zeta0: f64,
    pub zeta1: f64,
}

impl BarrierSpec {
    fn validate(&self) -> Result<()> {
        let ok = self.d >= 0.0
            && self.d.is_finite()
            && [self.c0, self.c1, self.zeta0, self.zeta1]
                .iter()
                .all(|v| *v > 0.0 && v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("barrier spec {self:?}")))
        }
    }
}

/// Which impedance contrast produced the thin barrier limit.
///
/// `ImpedanceDrop` keeps the slab impedance far below the background
/// (`zeta0/zeta1` large), `ImpedanceJump` is the opposite contrast. Both
/// give the same transmission; the reflection coefficients differ by sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    ImpedanceDrop,
    ImpedanceJump,
}

/// Zero thickness barrier of reduced strength `q >= 0`.
#[derive(Clone, Copy, Debug)]
pub struct BarrierAsymptotic {
    pub q: f64,
    pub regime: Regime,
}

impl BarrierAsymptotic {
    pub fn new(q: f64, regime: Regime) -> Result<Self> {
        if q >= 0.0 && q.is_finite() {
            Ok(Self { q, regime })
        } else {
            Err(Error::InvalidInput(format!("barrier strength q = {q}")))
        }
    }

    /// Barrier with transmitted intensity `|T1|^2 = t1_sq`, so
    /// `q = sqrt(1/t1_sq - 1)`.
    pub fn from_intensity(t1_sq: f64, regime: Regime) -> Result<Self> {
        if !(t1_sq > 0.0 && t1_sq <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "barrier intensity |T1|^2 = {t1_sq} outside (0, 1]"
            )));
        }
        Self::new((1.0 / t1_sq - 1.0).sqrt(), regime)
    }

    /// Propagator pair of the point barrier: `(1 + iq, iq)` for the
    /// impedance drop, `(1 + iq, -iq)` for the impedance jump.
    pub fn propagator(&self) -> Propagator2 {
        let gamma = match self.regime {
            Regime::ImpedanceDrop => Complex64::new(0.0, self.q),
            Regime::ImpedanceJump => Complex64::new(0.0, -self.q),
        };
        Propagator2::new(Complex64::new(1.0, self.q), gamma)
    }

    /// Transmitted intensity `|T1|^2 = 1/(1 + q^2)`.
    pub fn intensity(&self) -> f64 {
        1.0 / (1.0 + self.q * self.q)
    }
}

/// Exact propagator of a finite slab at angular frequency `omega`.
///
/// `alpha = [cos(omega d / c1) + (i/2)(zeta1/zeta0 + zeta0/zeta1)
/// sin(omega d / c1)] exp(-i omega d / c0)` and
/// `gamma = (i/2)(zeta0/zeta1 - zeta1/zeta0) sin(omega d / c1)`.
/// The result is unimodular for every admissible input.
///
/// The pair is expressed in the background frame of a slab centered at the
/// origin. A slab centered at `zc` instead carries
/// `gamma * exp(2i omega zc / c0)`, which is what stacking adjacent slabs
/// must use for the composition to reproduce the joint slab.
pub fn barrier_propagator(spec: &BarrierSpec, omega: f64) -> Result<Propagator2> {
    spec.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput(format!("omega = {omega}")));
    }
    let phase1 = omega * spec.d / spec.c1;
    let ratio = spec.zeta1 / spec.zeta0;
    let (sin1, cos1) = phase1.sin_cos();
    let alpha = Complex64::new(cos1, 0.5 * (ratio + 1.0 / ratio) * sin1)
        * Complex64::from_polar(1.0, -omega * spec.d / spec.c0);
    let gamma = Complex64::new(0.0, 0.5 * (1.0 / ratio - ratio) * sin1);
    Ok(Propagator2::new(alpha, gamma))
}

/// Scattering coefficients of a zero thickness barrier:
/// `T1 = i/(i + q)` and `R1 = q/(i + q)` (impedance drop) or
/// `R1 = -q/(i + q)` (impedance jump). The barrier scatters identically
/// from both sides, so `r_adj = r`.
pub fn asymptotic_barrier(ab: &BarrierAsymptotic) -> Scattering2 {
    // Equivalent to propagator_to_scattering(ab.propagator()), spelled out
    // to keep the zero thickness limit exact in both regimes.
    let denom = Complex64::new(1.0, -ab.q);
    let t = Complex64::new(1.0, 0.0) / denom;
    let r = match ab.regime {
        Regime::ImpedanceDrop => -Complex64::new(0.0, ab.q) / denom,
        Regime::ImpedanceJump => Complex64::new(0.0, ab.q) / denom,
    };
    Scattering2 { t, r, r_adj: r }
}

/// Transmission and reflection coefficients of a section:
/// `t = 1/conj(alpha)`, `r = -gamma/conj(alpha)`,
/// `r_adj = conj(gamma)/conj(alpha)`.
pub fn propagator_to_scattering(p: Propagator2) -> Result<Scattering2> {
    if p.alpha.norm_sqr() == 0.0 {
        return Err(Error::SingularPropagator);
    }
    let ac = p.alpha.conj();
    Ok(Scattering2 {
        t: Complex64::new(1.0, 0.0) / ac,
        r: -p.gamma / ac,
        r_adj: p.gamma.conj() / ac,
    })
}

/// Propagator of two successive sections, `left` traversed first:
/// `alpha = alpha_l alpha_r + gamma_l conj(gamma_r)` and
/// `gamma = alpha_l gamma_r + gamma_l conj(alpha_r)`.
/// Unimodularity of the inputs is preserved.
pub fn compose_propagators(left: Propagator2, right: Propagator2) -> Propagator2 {
    Propagator2::new(
        left.alpha * right.alpha + left.gamma * right.gamma.conj(),
        left.alpha * right.gamma + left.gamma * right.alpha.conj(),
    )
}

/// Scattering coefficients of two successive sections, accounting for all
/// multiple reflections between them:
/// `T = T_l T_r / (1 - R_r R~_l)`,
/// `R = R_l + T_l^2 R_r / (1 - R_r R~_l)`,
/// `R~ = R~_r + T_r^2 R~_l / (1 - R_r R~_l)`.
pub fn compose_scattering(left: Scattering2, right: Scattering2) -> Result<Scattering2> {
    let denom = Complex64::new(1.0, 0.0) - right.r * left.r_adj;
    if denom.norm() < RESONANCE_GUARD {
        return Err(Error::Resonance(denom.norm()));
    }
    let loop_gain = denom.inv();
    Ok(Scattering2 {
        t: left.t * right.t * loop_gain,
        r: left.r + left.t * left.t * right.r * loop_gain,
        r_adj: right.r_adj + right.t * right.t * left.r_adj * loop_gain,
    })
}

/// Propagator of the mirror image of a section, evaluated at the far end of
/// the mirrored side: `(conj(alpha), conj(gamma))`.
///
/// If `p` maps amplitudes across `[0, L]` for a medium `mu(z)`, the returned
/// pair is the solution of the same amplitude system on `[-L, 0]` for the
/// reflected medium `mu(-z)`, integrated outward from the barrier and read
/// off at `-L`. Applying it twice returns `p`.
pub fn mirror_propagator(p: Propagator2) -> Propagator2 {
    Propagator2::new(p.alpha.conj(), p.gamma.conj())
}

/// Left-to-right amplitude map of the mirrored left section.
///
/// This is the inverse of [`mirror_propagator`], `(alpha, -conj(gamma))`,
/// and is the factor that enters the system propagator product.
pub fn mirrored_left_map(p_plus: Propagator2) -> Propagator2 {
    p_plus.mirrored().inverse()
}

/// Propagator of the full system `left half | barrier | right half`.
///
/// `p_minus` must be given in the outward convention of
/// [`mirror_propagator`] (the mirrored case passes `p_plus.mirrored()`).
pub fn three_sector_propagator(
    p_minus: Propagator2,
    barrier: Propagator2,
    p_plus: Propagator2,
) -> Propagator2 {
    compose_propagators(compose_propagators(p_minus.inverse(), barrier), p_plus)
}

/// Transmission coefficient of a mirror symmetric system whose right half
/// has propagator `p_plus` and whose thin barrier has coefficients
/// `(T1, R1)` with `|2 R1 - 1| = 1`:
///
/// `T_sys = T^2 T1 / [(1 - R)(1 - (2 R1 - 1) R)]`
///
/// where `(T, R)` are the transmission and reflection of the right half.
pub fn system_transmission(p_plus: Propagator2, barrier: &Scattering2) -> Result<Complex64> {
    let two_r1_minus_1 = 2.0 * barrier.r - 1.0;
    if (two_r1_minus_1.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "barrier reflection R1 = {} is not on the unit-modulus family",
            barrier.r
        )));
    }
    let s = propagator_to_scattering(p_plus)?;
    let d1 = Complex64::new(1.0, 0.0) - s.r;
    let d2 = Complex64::new(1.0, 0.0) - two_r1_minus_1 * s.r;
    if d1.norm() < RESONANCE_GUARD || d2.norm() < RESONANCE_GUARD {
        return Err(Error::Resonance(d1.norm().min(d2.norm())));
    }
    Ok(s.t * s.t * barrier.t / (d1 * d2))
}

/// Transmission coefficient of a system whose two halves are arbitrary.
///
/// `p_minus` is the left half in the outward convention of
/// [`mirror_propagator`]; `p_plus` is the right half. With `T-`, `R~-` read
/// from the left half and `T+`, `R+` from the right half,
///
/// `T_sys = T- T1 T+ / [1 - R1 R~- - R+ R1 (1 - R1 R~-) - R+ T1^2 R~-]`.
///
/// Passing `p_minus = p_plus.mirrored()` reproduces [`system_transmission`].
pub fn independent_system_transmission(
    p_minus: Propagator2,
    p_plus: Propagator2,
    barrier: &Scattering2,
) -> Result<Complex64> {
    let s_minus = propagator_to_scattering(p_minus.inverse())?;
    let s_plus = propagator_to_scattering(p_plus)?;
    let one = Complex64::new(1.0, 0.0);
    let inner = one - barrier.r * s_minus.r_adj;
    let denom = inner - s_plus.r * barrier.r * inner - s_plus.r * barrier.t * barrier.t * s_minus.r_adj;
    if denom.norm() < RESONANCE_GUARD {
        return Err(Error::Resonance(denom.norm()));
    }
    Ok(s_minus.t * barrier.t * s_plus.t / denom)
}
