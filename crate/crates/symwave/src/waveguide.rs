//! Multimode planar waveguide: mode bookkeeping, barrier scattering
//! matrices, assembly of the full system transmission matrix, its weak
//! scattering mean-transmissivity approximations, and a synthetic
//! reflection-matrix ensemble for exercising them.
//!
//! Mode amplitudes live in C^N with N the number of propagating modes.
//! Sections are described either by propagator blocks (the 2N x 2N
//! analogue of the scalar pair) or by transmission/reflection matrices
//! `(T, R)` constrained by energy conservation `R*R + T*T = I` and
//! reciprocity `R^T = R`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scatter::Propagator2;
use crate::{Error, Result};

/// Planar waveguide of width `x` holding a slab barrier of thickness `d`
/// and interior speed `c1 < c0` at angular frequency `omega`.
#[derive(Clone, Copy, Debug)]
pub struct WaveguideGeometry {
    pub x: f64,
    pub c0: f64,
    pub c1: f64,
    pub d: f64,
    pub omega: f64,
}

impl WaveguideGeometry {
    pub fn validate(&self) -> Result<()> {
        let ok = self.x > 0.0
            && self.c0 > 0.0
            && self.c1 > 0.0
            && self.c1 < self.c0
            && self.d >= 0.0
            && self.omega > 0.0
            && [self.x, self.c0, self.c1, self.d, self.omega]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("waveguide geometry {self:?}")))
        }
    }

    pub fn wavenumber(&self) -> f64 {
        self.omega / self.c0
    }
}

/// Propagating-mode data: transverse eigenvalues `lambda_j = (j pi / x)^2`
/// and the longitudinal wavenumbers outside (`betas`) and inside
/// (`betas_barrier`) the barrier, for `j = 1..=n`.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    pub n: usize,
    pub betas: Vec<f64>,
    pub betas_barrier: Vec<f64>,
    pub lambdas: Vec<f64>,
}

/// Counts the propagating modes, `n = floor(k x / pi)`, and fills in their
/// wavenumbers `beta_j = sqrt(k^2 - lambda_j)` and
/// `beta_1j = sqrt((omega/c1)^2 - lambda_j)`. Configurations within
/// `1e-9 k^2` of a standing mode (`beta_n = 0`) are rejected, as is a
/// geometry with no propagating mode at all.
pub fn build_mode_basis(g: &WaveguideGeometry) -> Result<ModeBasis> {
    g.validate()?;
    let k = g.wavenumber();
    let k_sq = k * k;
    let n = (k * g.x / std::f64::consts::PI).floor() as usize;
    if n == 0 {
        return Err(Error::InvalidInput(
            "no propagating mode at this frequency".into(),
        ));
    }
    let k1_sq = (g.omega / g.c1) * (g.omega / g.c1);
    let mut betas = Vec::with_capacity(n);
    let mut betas_barrier = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for j in 1..=n {
        let lam = (j as f64 * std::f64::consts::PI / g.x).powi(2);
        if (k_sq - lam).abs() < 1e-9 * k_sq {
            return Err(Error::InvalidInput(format!(
                "standing mode: k^2 = {k_sq} sits on the cutoff of mode {j}"
            )));
        }
        lambdas.push(lam);
        betas.push((k_sq - lam).sqrt());
        // c1 < c0 guarantees k1 > k, so the barrier wavenumber stays real.
        betas_barrier.push((k1_sq - lam).sqrt());
    }
    Ok(ModeBasis {
        n,
        betas,
        betas_barrier,
        lambdas,
    })
}

/// Transmission/reflection matrix pair of a section.
#[derive(Clone, Debug)]
pub struct ModalScattering {
    pub t: DMatrix<Complex64>,
    pub r: DMatrix<Complex64>,
}

impl ModalScattering {
    pub fn new(t: DMatrix<Complex64>, r: DMatrix<Complex64>) -> Result<Self> {
        if t.nrows() != t.ncols() || t.shape() != r.shape() {
            return Err(Error::InvalidInput(format!(
                "scattering matrices must be square and matched, got {:?} and {:?}",
                t.shape(),
                r.shape()
            )));
        }
        Ok(Self { t, r })
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }

    /// Largest entry of `R*R + T*T - I` in modulus.
    pub fn conservation_defect(&self) -> f64 {
        let n = self.n();
        let sum = self.r.adjoint() * &self.r + self.t.adjoint() * &self.t
            - DMatrix::<Complex64>::identity(n, n);
        sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `R - R^T` in modulus.
    pub fn reciprocity_defect(&self) -> f64 {
        (&self.r - self.r.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn diagonal_entries(&self) -> Result<Vec<Complex64>> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if i != j && (self.t[(i, j)].norm() > 1e-12 || self.r[(i, j)].norm() > 1e-12) {
                    return Err(Error::InvalidInput(
                        "barrier scattering must be diagonal in the mode basis".into(),
                    ));
                }
            }
        }
        Ok((0..n).map(|i| self.t[(i, i)]).collect())
    }
}

/// Reduced barrier strengths per mode, `q_j = beta_1j^2 d / (2 beta_j)`.
#[derive(Clone, Debug)]
pub struct BarrierModal {
    pub q: Vec<f64>,
}

impl BarrierModal {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("barrier strengths {q:?}")));
        }
        Ok(Self { q })
    }

    pub fn from_geometry(g: &WaveguideGeometry, basis: &ModeBasis) -> Result<Self> {
        g.validate()?;
        let q = basis
            .betas
            .iter()
            .zip(basis.betas_barrier.iter())
            .map(|(&b, &b1)| b1 * b1 * g.d / (2.0 * b))
            .collect();
        Self::new(q)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Thin-barrier propagator pair `(1 + i q_j, -i q_j)` of each mode.
    pub fn propagators(&self) -> Vec<Propagator2> {
        self.q
            .iter()
            .map(|&q| Propagator2::new(Complex64::new(1.0, q), Complex64::new(0.0, -q)))
            .collect()
    }
}

/// Exact per-mode barrier scattering. Mode `j` carries the slab propagator
/// `alpha_j = cos(beta_1j d) + (i/2)(beta_1j/beta_j + beta_j/beta_1j)
/// sin(beta_1j d)`, `gamma_j = (i/2)(beta_j/beta_1j - beta_1j/beta_j)
/// sin(beta_1j d)`, so `|T_1j|^2 + |R_1j|^2 = 1` per mode.
pub fn barrier_matrices_exact(g: &WaveguideGeometry, basis: &ModeBasis) -> Result<ModalScattering> {
    let pairs = barrier_propagators_exact(g, basis)?;
    matrices_from_propagators(&pairs)
}

/// Propagator pairs behind [`barrier_matrices_exact`], one per mode.
pub fn barrier_propagators_exact(
    g: &WaveguideGeometry,
    basis: &ModeBasis,
) -> Result<Vec<Propagator2>> {
    g.validate()?;
    if basis.n != basis.betas.len() || basis.n != basis.betas_barrier.len() {
        return Err(Error::InvalidInput("inconsistent mode basis".into()));
    }
    Ok(basis
        .betas
        .iter()
        .zip(basis.betas_barrier.iter())
        .map(|(&b, &b1)| {
            let (s, c) = (b1 * g.d).sin_cos();
            let ratio = b1 / b;
            let alpha = Complex64::new(c, 0.5 * (ratio + 1.0 / ratio) * s);
            let gamma = Complex64::new(0.0, 0.5 * (1.0 / ratio - ratio) * s);
            Propagator2::new(alpha, gamma)
        })
        .collect())
}

/// Thin-barrier limit of the per-mode scattering:
/// `T_1j = 1/(1 - i q_j)`, `R_1j = i q_j / (1 - i q_j)`. Its real part
/// identity `Re(T_1j) = |T_1j|^2` underpins the mean-transmissivity
/// formulas.
pub fn barrier_matrices_asymptotic(b: &BarrierModal) -> ModalScattering {
    matrices_from_propagators(&b.propagators()).expect("diagonal construction cannot fail")
}

fn matrices_from_propagators(pairs: &[Propagator2]) -> Result<ModalScattering> {
    let n = pairs.len();
    let mut t = DMatrix::<Complex64>::zeros(n, n);
    let mut r = DMatrix::<Complex64>::zeros(n, n);
    for (j, p) in pairs.iter().enumerate() {
        let s = p.scattering()?;
        t[(j, j)] = s.t;
        r[(j, j)] = s.r;
    }
    ModalScattering::new(t, r)
}

/// Transmission matrix of `half-medium | barrier | mirrored half-medium`
/// to second order in the half-medium reflection:
///
/// ```text
///   T_sys = T+ [T1^-1 - R+ T1^-1 R1 - T1^-1 R1 R+ - R+ conj(T1^-1) R+]^-1 T+^T
/// ```
///
/// `conj` is the entrywise conjugate and the trailing factor is a plain
/// transpose.
pub fn system_transmission_matrix(
    s_plus: &ModalScattering,
    barrier: &ModalScattering,
) -> Result<DMatrix<Complex64>> {
    let n = s_plus.n();
    if barrier.n() != n {
        return Err(Error::InvalidInput(format!(
            "mode count mismatch: medium {n}, barrier {}",
            barrier.n()
        )));
    }
    let t1_inv = barrier
        .t
        .clone()
        .try_inverse()
        .ok_or(Error::SingularPropagator)?;
    let t1_inv_conj = t1_inv.map(|z| z.conj());
    let bracket = &t1_inv
        - &s_plus.r * &t1_inv * &barrier.r
        - &t1_inv * &barrier.r * &s_plus.r
        - &s_plus.r * t1_inv_conj * &s_plus.r;
    invert(bracket).map(|inv| &s_plus.t * inv * s_plus.t.transpose())
}

/// Exact transmission matrix via the full 2N x 2N propagator product.
///
/// The right-half propagator blocks are reconstructed from `(T+, R+)` as
/// `P(a) = T+ (I - conj(R+) R+)^-1` and
/// `P(b) = -conj(T+) (I - R+ conj(R+))^-1 R+`; the system propagator is
/// `P = P+ P1 conj(P+)^-1` with `P1` the block-diagonal barrier propagator
/// built from `p1`, and the transmission matrix is the inverse of the
/// conjugated upper-left block of `P`.
pub fn exact_transmission_oracle(
    s_plus: &ModalScattering,
    p1: &[Propagator2],
) -> Result<DMatrix<Complex64>> {
    let n = s_plus.n();
    if p1.len() != n {
        return Err(Error::InvalidInput(format!(
            "mode count mismatch: medium {n}, barrier blocks {}",
            p1.len()
        )));
    }
    let id = DMatrix::<Complex64>::identity(n, n);
    let r_conj = s_plus.r.map(|z| z.conj());
    let pa = &s_plus.t * invert(&id - &r_conj * &s_plus.r)?;
    let pb = -(s_plus.t.map(|z| z.conj())) * invert(&id - &s_plus.r * &r_conj)? * &s_plus.r;

    let mut p_plus = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    p_plus.view_mut((0, 0), (n, n)).copy_from(&pa);
    p_plus
        .view_mut((0, n), (n, n))
        .copy_from(&pb.map(|z| z.conj()));
    p_plus.view_mut((n, 0), (n, n)).copy_from(&pb);
    p_plus
        .view_mut((n, n), (n, n))
        .copy_from(&pa.map(|z| z.conj()));

    let mut p_barrier = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (j, p) in p1.iter().enumerate() {
        p_barrier[(j, j)] = p.alpha;
        p_barrier[(j, n + j)] = p.gamma.conj();
        p_barrier[(n + j, j)] = p.gamma;
        p_barrier[(n + j, n + j)] = p.alpha.conj();
    }

    let p_plus_conj_inv = invert(p_plus.map(|z| z.conj()))?;
    let system = &p_plus * p_barrier * p_plus_conj_inv;
    let a_block = system.view((0, 0), (n, n)).into_owned();
    invert(a_block.map(|z| z.conj()))
}

fn invert(m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let det = m.determinant().norm();
    m.try_inverse().ok_or(Error::Resonance(det))
}

/// Total transmitted power `Tr(T* T)`, the squared Frobenius norm of a
/// transmission matrix.
pub fn transmissivity(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Mode-pair enhancement factors of the thin barrier:
/// `B_lm = -2 (1 - q_l q_m) / ((1 + q_l^2)(1 + q_m^2))`. Negative when
/// both modes see a weak barrier (`q_l q_m < 1`), positive when both see a
/// strong one.
pub fn enhancement_factors(b: &BarrierModal) -> DMatrix<f64> {
    let n = b.n();
    DMatrix::from_fn(n, n, |l, m| {
        let (ql, qm) = (b.q[l], b.q[m]);
        -2.0 * (1.0 - ql * qm) / ((1.0 + ql * ql) * (1.0 + qm * qm))
    })
}

/// Mean transmissivity of the mirror symmetric system to first order in
/// the reflection second moments `M_lm = E[|R+_lm|^2]`:
/// `sum_l |T_1l|^2 + sum_{l,m} M_lm B_lm`, with the enhancement factor in
/// its transmission form `B_lm = |T_l + T_m - 2 T_l T_m|^2 - |T_l|^2 -
/// |T_m|^2` evaluated from the barrier matrices.
pub fn mean_transmissivity(m: &DMatrix<f64>, barrier: &ModalScattering) -> Result<f64> {
    let t = checked_moment_inputs(m, barrier)?;
    let mut total: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    for l in 0..t.len() {
        for mm in 0..t.len() {
            let combo = t[l] + t[mm] - 2.0 * t[l] * t[mm];
            let b = combo.norm_sqr() - t[l].norm_sqr() - t[mm].norm_sqr();
            total += m[(l, mm)] * b;
        }
    }
    Ok(total)
}

/// Mean transmissivity when the two half-media are independent:
/// `sum_l |T_1l|^2 - 2 sum_{l,m} M_lm |T_1l|^2 |T_1m|^2`, never above the
/// bare-barrier transmissivity.
pub fn independent_mean_transmissivity(m: &DMatrix<f64>, barrier: &ModalScattering) -> Result<f64> {
    let t = checked_moment_inputs(m, barrier)?;
    let mut total: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    for l in 0..t.len() {
        for mm in 0..t.len() {
            total -= 2.0 * m[(l, mm)] * t[l].norm_sqr() * t[mm].norm_sqr();
        }
    }
    Ok(total)
}

fn checked_moment_inputs(m: &DMatrix<f64>, barrier: &ModalScattering) -> Result<Vec<Complex64>> {
    let n = barrier.n();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "moment matrix is {:?}, barrier has {n} modes",
            m.shape()
        )));
    }
    if m.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(
            "moment matrix entries must be nonnegative".into(),
        ));
    }
    barrier.diagonal_entries()
}

/// Draws one synthetic weak-scattering section: a complex symmetric
/// reflection matrix with independent circularly symmetric Gaussian
/// entries of root mean square `eps`, and a transmission completion
/// `T = U (I - R*R)^{1/2}` with `U` Haar unitary, so energy conservation
/// holds exactly for the draw. Deterministic in `(n, eps, seed)`.
pub fn sample_reflection_ensemble(n: usize, eps: f64, seed: u64) -> Result<ModalScattering> {
    if n == 0 {
        return Err(Error::InvalidInput("mode count must be positive".into()));
    }
    if !(0.0..0.3).contains(&eps) {
        return Err(Error::InvalidInput(format!(
            "reflection scale eps = {eps} outside [0, 0.3)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = eps / 2f64.sqrt();
    let mut r = DMatrix::<Complex64>::zeros(n, n);
    for l in 0..n {
        for m in l..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let g = Complex64::new(re * scale, im * scale);
            r[(l, m)] = g;
            r[(m, l)] = g;
        }
    }

    let id = DMatrix::<Complex64>::identity(n, n);
    let h = &id - r.map(|z| z.conj()) * &r;
    let eigen = nalgebra::SymmetricEigen::new(h.clone());
    let mut roots = DVector::<f64>::zeros(n);
    for (i, &lam) in eigen.eigenvalues.iter().enumerate() {
        if lam < -1e-12 {
            return Err(Error::Numerical(format!(
                "reflection draw leaves no transmission energy (eigenvalue {lam:.3e})"
            )));
        }
        roots[i] = lam.max(0.0).sqrt();
    }
    let mut scaled = eigen.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(roots[j], 0.0);
    }
    let sqrt_h = scaled * eigen.eigenvectors.adjoint();
    // The eigensolver alone can leave S^2 - H near 1e-11 on some draws,
    // more than the conservation budget. H has all eigenvalues near one
    // for admissible eps, so one Heron step of S <- (S + H S^-1)/2 pushes
    // the defect back to rounding level.
    let half = Complex64::new(0.5, 0.0);
    let sqrt_h = match sqrt_h.clone().try_inverse() {
        Some(inv) => {
            let heron = (&sqrt_h + &h * inv) * half;
            (&heron + &heron.adjoint()) * half
        }
        None => sqrt_h,
    };

    let u = haar_unitary(n, &mut rng);
    let t = u * sqrt_h;
    ModalScattering::new(t, r)
}

/// Haar-distributed unitary from the QR of a complex Ginibre matrix, with
/// the phase of the triangular diagonal absorbed so the law is invariant.
fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let rmat = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = rmat[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        col *= phase;
    }
    q
}
