//! Passive discrete-time systems `T = [[D, C], [B, F]]` with input/output
//! space 𝔐 and state space 𝔎.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_finite, checked_inverse, hermitian_part, identity, matrix_serde, matrix_vec_serde, pseudo_inverse,
    spectral_norm, CMatrix, Tolerance, ONE,
};
use crate::relation::{LinearRelation, SpaceSplit};
use crate::transforms::{fractional_relation, krylov};

/// `‖T‖` may overshoot 1 by this much before a realization is rejected.
pub const PASSIVITY_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassiveSystem {
    #[serde(with = "matrix_serde")]
    pub d: CMatrix,
    #[serde(with = "matrix_serde")]
    pub c: CMatrix,
    #[serde(with = "matrix_serde")]
    pub b: CMatrix,
    #[serde(with = "matrix_serde")]
    pub f: CMatrix,
    pub selfadjoint: bool,
}

impl PassiveSystem {
    /// Checks block shapes only; passivity is a separate query.
    pub fn new(d: CMatrix, c: CMatrix, b: CMatrix, f: CMatrix) -> Result<Self> {
        let m = d.nrows();
        let k = f.nrows();
        let shapes_ok =
            d.ncols() == m && f.ncols() == k && c.nrows() == m && c.ncols() == k && b.nrows() == k && b.ncols() == m;
        if !shapes_ok {
            return Err(Error::Dimension(format!(
                "blocks D {}x{}, C {}x{}, B {}x{}, F {}x{} do not form a system",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                c.ncols(),
                b.nrows(),
                b.ncols(),
                f.nrows(),
                f.ncols()
            )));
        }
        for blk in [&d, &c, &b, &f] {
            check_finite(blk)?;
        }
        Ok(PassiveSystem {
            d,
            c,
            b,
            f,
            selfadjoint: false,
        })
    }

    /// The selfadjoint system `[[D, C], [Cᴴ, F]]`; `D` and `F` are symmetrized.
    pub fn selfadjoint(d: CMatrix, c: CMatrix, f: CMatrix) -> Result<Self> {
        let b = c.adjoint();
        let mut sys = Self::new(hermitian_part(&d), c, b, hermitian_part(&f))?;
        sys.selfadjoint = true;
        Ok(sys)
    }

    /// Splits a square block operator along `dim_m`.
    pub fn from_block(t: &CMatrix, dim_m: usize, selfadjoint: bool) -> Result<Self> {
        let n = t.nrows();
        if t.ncols() != n || dim_m > n {
            return Err(Error::Dimension(format!(
                "cannot split a {}x{} block operator at {dim_m}",
                t.nrows(),
                t.ncols()
            )));
        }
        let k = n - dim_m;
        let d = t.view((0, 0), (dim_m, dim_m)).into_owned();
        let c = t.view((0, dim_m), (dim_m, k)).into_owned();
        let f = t.view((dim_m, dim_m), (k, k)).into_owned();
        if selfadjoint {
            Self::selfadjoint(d, c, f)
        } else {
            let b = t.view((dim_m, 0), (k, dim_m)).into_owned();
            Self::new(d, c, b, f)
        }
    }

    pub fn dim_m(&self) -> usize {
        self.d.nrows()
    }

    pub fn dim_k(&self) -> usize {
        self.f.nrows()
    }

    pub fn split(&self) -> SpaceSplit {
        SpaceSplit {
            dim_m: self.dim_m(),
            dim_k: self.dim_k(),
        }
    }

    pub fn block(&self) -> CMatrix {
        let (m, k) = (self.dim_m(), self.dim_k());
        let mut t = CMatrix::zeros(m + k, m + k);
        t.view_mut((0, 0), (m, m)).copy_from(&self.d);
        t.view_mut((0, m), (m, k)).copy_from(&self.c);
        t.view_mut((m, 0), (k, m)).copy_from(&self.b);
        t.view_mut((m, m), (k, k)).copy_from(&self.f);
        t
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.block())
    }

    pub fn is_passive(&self) -> bool {
        self.norm() <= 1.0 + PASSIVITY_SLACK
    }

    /// `‖T − Tᴴ‖₂`, zero for selfadjoint systems.
    pub fn asymmetry(&self) -> f64 {
        let t = self.block();
        spectral_norm(&(&t - t.adjoint()))
    }

    /// `Ω(z) = D + z C (I − zF)⁻¹ B`.
    pub fn transfer(&self, z: Complex64, tol: &Tolerance) -> Result<CMatrix> {
        let k = self.dim_k();
        if k == 0 {
            return Ok(self.d.clone());
        }
        let inv = checked_inverse(&(identity(k) - &self.f * z), tol.rank_rel, z)?;
        Ok(&self.d + &self.c * inv * &self.b * z)
    }

    /// Taylor coefficients `h₀ = D`, `h_k = C F^{k−1} B` for `k = 1..=len`.
    pub fn moments(&self, len: usize) -> MomentSequence {
        let mut moments = Vec::with_capacity(len + 1);
        moments.push(self.d.clone());
        let mut fb = self.b.clone();
        for _ in 0..len {
            moments.push(&self.c * &fb);
            fb = &self.f * fb;
        }
        MomentSequence { moments }
    }

    /// The system `W·τ·Wᴴ` with state coordinates changed by a unitary `W`.
    pub fn conjugate_state(&self, w: &CMatrix) -> Result<Self> {
        if w.nrows() != self.dim_k() || w.ncols() != self.dim_k() {
            return Err(Error::Dimension("state unitary has the wrong size".into()));
        }
        let mut sys = Self::new(
            self.d.clone(),
            &self.c * w.adjoint(),
            w * &self.b,
            w * &self.f * w.adjoint(),
        )?;
        sys.selfadjoint = self.selfadjoint;
        Ok(sys)
    }

    /// The system of `Ĵ_𝔐 T`, i.e. `[[−D, −C], [B, F]]`, whose transfer function is `−Ω`.
    pub fn j_dual(&self) -> Self {
        PassiveSystem {
            d: -&self.d,
            c: -&self.c,
            b: self.b.clone(),
            f: self.f.clone(),
            selfadjoint: false,
        }
    }

    /// The relation `{(I + T)h, (I − T)h}` attached to the block operator.
    pub fn relation(&self, tol: &Tolerance) -> Result<LinearRelation> {
        fractional_relation(&self.block(), self.split(), tol)
    }
}

/// `h₀, h₁, …, h_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MomentSequence {
    #[serde(with = "matrix_vec_serde")]
    pub moments: Vec<CMatrix>,
}

impl MomentSequence {
    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn dim_m(&self) -> usize {
        self.moments.first().map_or(0, |h| h.nrows())
    }
}

/// Default moment count `2·dim 𝔎 + 2` for a system with the given state dimension.
pub fn default_moment_len(state_dim: usize) -> usize {
    2 * state_dim + 2
}

#[derive(Clone, Debug)]
pub struct SchurFrobenius {
    /// `(I − zΩ(z))⁻¹`.
    pub value: CMatrix,
    /// `P_𝔐 (I − zT)⁻¹ ↾ 𝔐` from direct inversion.
    pub direct: CMatrix,
    pub cross_residual: f64,
}

pub fn schur_frobenius_compress(sys: &PassiveSystem, z: Complex64, tol: &Tolerance) -> Result<SchurFrobenius> {
    let m = sys.dim_m();
    let n = m + sys.dim_k();
    let full = checked_inverse(&(identity(n) - sys.block() * z), tol.rank_rel, z)?;
    let direct = full.view((0, 0), (m, m)).into_owned();
    let omega = sys.transfer(z, tol)?;
    let value = checked_inverse(&(identity(m) - omega * z), tol.rank_rel, z)?;
    let cross_residual = spectral_norm(&(&value - &direct));
    Ok(SchurFrobenius {
        value,
        direct,
        cross_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplicity {
    pub controllable_dim: usize,
    pub observable_dim: usize,
    pub simple: bool,
    pub minimal: bool,
}

/// Controllable `span{FⁿB𝔐}` and observable `span{F*ⁿC*𝔐}` subspaces.
pub fn simplicity_check(sys: &PassiveSystem, tol: &Tolerance) -> Result<Simplicity> {
    let k = sys.dim_k();
    let ctrl = krylov(&sys.f, &sys.b, tol)?;
    let obs = krylov(&sys.f.adjoint(), &sys.c.adjoint(), tol)?;
    let joint = ctrl.sum(&obs, tol)?;
    Ok(Simplicity {
        controllable_dim: ctrl.dim(),
        observable_dim: obs.dim(),
        simple: joint.dim() == k,
        minimal: ctrl.dim() == k && obs.dim() == k,
    })
}

#[derive(Clone, Debug)]
pub struct Realization {
    pub system: PassiveSystem,
    pub state_dim: usize,
    /// Hankel eigenvalues in descending order.
    pub hankel_spectrum: Vec<f64>,
    /// Largest `‖ĥ_k − h_k‖₂` over the supplied moments.
    pub moment_residual: f64,
    /// `‖T‖` exceeded 1 within the slack and the block was scaled back.
    pub rescaled: bool,
}

fn moment_scale(moments: &[CMatrix]) -> f64 {
    moments.iter().map(spectral_norm).fold(1.0, f64::max)
}

/// Minimal passive selfadjoint realization of Hermitian moments.
///
/// For a selfadjoint system the block Hankel matrix `[h_{i+j+1}]` is the Gram
/// matrix of the controllability columns `FʲCᴴ`, so its eigen-decomposition
/// `VΛVᴴ` yields the controllability matrix `Λ^{1/2}Vᴴ` directly and the
/// shifted Hankel matrix gives `F`.
pub fn ho_kalman_realize(seq: &MomentSequence, tol: &Tolerance) -> Result<Realization> {
    let h = &seq.moments;
    if h.is_empty() {
        return Err(Error::AmbiguousRank("no moments supplied".into()));
    }
    let m = seq.dim_m();
    for (k, hk) in h.iter().enumerate() {
        if hk.nrows() != m || hk.ncols() != m {
            return Err(Error::Dimension(format!("moment {k} is not {m}x{m}")));
        }
        check_finite(hk)?;
    }
    let scale = moment_scale(h);
    for (k, hk) in h.iter().enumerate() {
        let asym = spectral_norm(&(hk - hk.adjoint()));
        if asym > 1e-8 * scale {
            return Err(Error::NotRealizable(format!(
                "moment {k} is not Hermitian (asymmetry {asym:.3e})"
            )));
        }
    }
    let last = h.len() - 1;
    let blocks = last / 2;
    let d = hermitian_part(&h[0]);

    let tail_zero = h[1..].iter().all(|hk| spectral_norm(hk) <= 1e-14 * scale);
    if blocks == 0 && !tail_zero {
        return Err(Error::AmbiguousRank(format!(
            "{} moments cannot resolve the state dimension",
            h.len()
        )));
    }
    if blocks == 0 || tail_zero {
        if last == 0 {
            return Err(Error::AmbiguousRank(
                "a single moment cannot resolve the state dimension".into(),
            ));
        }
        let system = PassiveSystem::selfadjoint(d, CMatrix::zeros(m, 0), CMatrix::zeros(0, 0))?;
        return finish(system, 0, Vec::new(), h, tol);
    }

    let size = blocks * m;
    let mut hankel = CMatrix::zeros(size, size);
    let mut shifted = CMatrix::zeros(size, size);
    for i in 0..blocks {
        for j in 0..blocks {
            hankel.view_mut((i * m, j * m), (m, m)).copy_from(&h[i + j + 1]);
            shifted.view_mut((i * m, j * m), (m, m)).copy_from(&h[i + j + 2]);
        }
    }
    let eig = SymmetricEigen::new(hermitian_part(&hankel));
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = spectrum[0].abs().max(spectrum[size - 1].abs());
    if spectrum[size - 1] < -10.0 * tol.rank_rel * top {
        return Err(Error::NotRealizable(format!(
            "Hankel matrix is indefinite (eigenvalue {:.3e}); no selfadjoint realization exists",
            spectrum[size - 1]
        )));
    }
    let cutoff = tol.rank_rel * top;
    if let Some(bad) = spectrum.iter().find(|&&s| s >= cutoff && s < 10.0 * cutoff) {
        return Err(Error::AmbiguousRank(format!(
            "Hankel eigenvalue {bad:.3e} sits inside the rank gap [{cutoff:.3e}, {:.3e})",
            10.0 * cutoff
        )));
    }
    let r = spectrum.iter().filter(|&&s| s >= cutoff).count();
    if r == size && last <= 2 * blocks {
        return Err(Error::AmbiguousRank(format!(
            "Hankel matrix has full rank {r}; supply more moments to confirm the state dimension"
        )));
    }

    // Controllability matrix Λ^{1/2} Vᴴ and its left inverse Λ^{-1/2} Vᴴ.
    let mut ctrl = CMatrix::zeros(r, size);
    let mut left = CMatrix::zeros(r, size);
    for (row, &idx) in order.iter().take(r).enumerate() {
        let lam = eig.eigenvalues[idx];
        let v = eig.eigenvectors.column(idx);
        for col in 0..size {
            ctrl[(row, col)] = v[col].conj() * lam.sqrt();
            left[(row, col)] = v[col].conj() / lam.sqrt();
        }
    }
    let b = ctrl.view((0, 0), (r, m)).into_owned();
    let f = &left * &shifted * left.adjoint();
    let system = PassiveSystem::selfadjoint(d, b.adjoint(), f)?;
    finish(system, r, spectrum, h, tol)
}

fn finish(
    mut system: PassiveSystem,
    r: usize,
    spectrum: Vec<f64>,
    h: &[CMatrix],
    _tol: &Tolerance,
) -> Result<Realization> {
    let norm = system.norm();
    if norm > 1.0 + PASSIVITY_SLACK {
        return Err(Error::NotRealizable(format!(
            "realized block operator has norm {norm:.9} > 1; the moments do not come from a passive system"
        )));
    }
    let rescaled = norm > 1.0;
    if rescaled {
        let s = c64(1.0 / norm, 0.0);
        system = PassiveSystem::selfadjoint(&system.d * s, &system.c * s, &system.f * s)?;
    }
    let realized = system.moments(h.len() - 1);
    let moment_residual = realized
        .moments
        .iter()
        .zip(h)
        .map(|(a, b)| spectral_norm(&(a - b)))
        .fold(0.0, f64::max);
    if moment_residual > 1e-8 * moment_scale(h) {
        return Err(Error::AmbiguousRank(format!(
            "realized system of state dimension {r} misses the moments by {moment_residual:.3e}"
        )));
    }
    Ok(Realization {
        system,
        state_dim: r,
        hankel_spectrum: spectrum,
        moment_residual,
        rescaled,
    })
}

#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub w: CMatrix,
    /// Largest of the unitarity and intertwining residuals.
    pub residual: f64,
}

/// Samples `(I − zF)⁻¹B` on a circle of radius 1/2 plus `B` itself; these span
/// the controllable subspace and are far better conditioned than `FᵏB`.
fn resolvent_samples(sys: &PassiveSystem, count: usize, tol: &Tolerance) -> Result<CMatrix> {
    let (m, k) = (sys.dim_m(), sys.dim_k());
    let mut g = CMatrix::zeros(k, m * (count + 1));
    g.view_mut((0, 0), (k, m)).copy_from(&sys.b);
    for j in 0..count {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
        let z = Complex64::from_polar(0.5, theta);
        let inv = checked_inverse(&(identity(k) - &sys.f * z), tol.rank_rel, z)?;
        g.view_mut((0, m * (j + 1)), (k, m)).copy_from(&(inv * &sys.b));
    }
    Ok(g)
}

/// Unitary `W` on 𝔎 with `W F_a = F_b W`, `W B_a = B_b`, `C_a = C_b W`, or
/// `None` when the two minimal systems are not unitarily equivalent.
pub fn unitary_match(a: &PassiveSystem, b: &PassiveSystem, tol: &Tolerance) -> Result<Option<Intertwiner>> {
    if a.dim_m() != b.dim_m() || a.dim_k() != b.dim_k() {
        return Err(Error::Dimension("systems have different space dimensions".into()));
    }
    for (name, sys) in [("first", a), ("second", b)] {
        if !simplicity_check(sys, tol)?.minimal {
            return Err(Error::Hypothesis(format!("{name} system is not minimal")));
        }
    }
    let k = a.dim_k();
    if k == 0 {
        let residual = spectral_norm(&(&a.d - &b.d));
        return Ok((residual <= 1e-8).then(|| Intertwiner {
            w: CMatrix::zeros(0, 0),
            residual,
        }));
    }
    let count = 2 * k + 2;
    let ga = resolvent_samples(a, count, tol)?;
    let gb = resolvent_samples(b, count, tol)?;
    let pinv = pseudo_inverse(&ga, tol.rank_rel * spectral_norm(&ga));
    let w = gb * pinv;
    let residual = [
        spectral_norm(&(w.adjoint() * &w - identity(k))),
        spectral_norm(&(&w * &a.f - &b.f * &w)),
        spectral_norm(&(&w * &a.b - &b.b)),
        spectral_norm(&(&a.c - &b.c * &w)),
        spectral_norm(&(&a.d - &b.d)),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok((residual <= 1e-8).then_some(Intertwiner { w, residual }))
}

/// `sup ‖Ω_a(z) − Ω_b(z)‖₂` over a polar grid of the closed disk `|z| ≤ radius`.
pub fn transfer_sup_error(a: &PassiveSystem, b: &PassiveSystem, radius: f64, tol: &Tolerance) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for ri in 0..=4 {
        let rad = radius * ri as f64 / 4.0;
        let spokes = if ri == 0 { 1 } else { 16 };
        for j in 0..spokes {
            let z = Complex64::from_polar(rad, 2.0 * std::f64::consts::PI * j as f64 / spokes as f64);
            let diff = a.transfer(z, tol)? - b.transfer(z, tol)?;
            worst = worst.max(spectral_norm(&diff));
        }
    }
    Ok(worst)
}

/// The scalar system with `Ω(z) = z`.
pub fn identity_transfer_system() -> PassiveSystem {
    PassiveSystem::selfadjoint(
        CMatrix::zeros(1, 1),
        CMatrix::from_element(1, 1, ONE),
        CMatrix::zeros(1, 1),
    )
    .expect("1x1 blocks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, real_diag};
    use crate::relation::real_scalar;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn scalar_system(d: f64, c: f64, b: f64, f: f64) -> PassiveSystem {
        PassiveSystem::new(real_scalar(d), real_scalar(c), real_scalar(b), real_scalar(f)).unwrap()
    }

    #[test]
    fn transfer_examples() {
        let t = tol();
        let sys = identity_transfer_system();
        let z = c64(0.3, -0.2);
        assert!((sys.transfer(z, &t).unwrap()[(0, 0)] - z).norm() < 1e-15);

        let sys = scalar_system(0.25, 0.5, 0.5, 0.1);
        assert!((sys.transfer(c64(0.0, 0.0), &t).unwrap()[(0, 0)] - 0.25).norm() < 1e-15);

        let sys = scalar_system(0.0, 1.0, 1.0, 0.5);
        let v = sys.transfer(c64(0.5, 0.0), &t).unwrap()[(0, 0)];
        assert!((v - 2.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn schur_frobenius_examples() {
        let t = tol();
        let sys = identity_transfer_system();
        let s = schur_frobenius_compress(&sys, c64(0.0, 0.0), &t).unwrap();
        assert!((s.value[(0, 0)] - 1.0).norm() < 1e-15);
        let s = schur_frobenius_compress(&sys, c64(0.5, 0.0), &t).unwrap();
        assert!((s.value[(0, 0)] - 4.0 / 3.0).norm() < 1e-14);
        assert!(s.cross_residual < 1e-14);
    }

    #[test]
    fn schur_frobenius_paths_agree_on_three_state_system() {
        let t = tol();
        let block = from_real_rows(
            4,
            4,
            &[
                0.1, 0.3, -0.2, 0.1, //
                0.3, 0.2, 0.1, 0.0, //
                -0.2, 0.1, -0.3, 0.2, //
                0.1, 0.0, 0.2, 0.4,
            ],
        );
        let sys = PassiveSystem::from_block(&block, 1, true).unwrap();
        assert!(sys.is_passive());
        let s = schur_frobenius_compress(&sys, c64(0.0, 0.5), &t).unwrap();
        assert!(s.cross_residual < 1e-10);
    }

    #[test]
    fn simplicity_examples() {
        let t = tol();
        let s = simplicity_check(&identity_transfer_system(), &t).unwrap();
        assert!(s.simple && s.minimal);
        let s = simplicity_check(&scalar_system(0.0, 0.0, 0.0, 0.5), &t).unwrap();
        assert!(!s.simple && !s.minimal);
        let b = from_real_rows(2, 1, &[1.0, 0.0]);
        let sys = PassiveSystem::selfadjoint(real_scalar(0.0), b.adjoint(), real_diag(&[0.5, 1.0 / 3.0])).unwrap();
        let s = simplicity_check(&sys, &t).unwrap();
        assert_eq!(s.controllable_dim, 1);
        assert_eq!(s.observable_dim, 1);
        assert!(!s.simple);
    }

    #[test]
    fn ho_kalman_identity_transfer() {
        let t = tol();
        let seq = identity_transfer_system().moments(3);
        let r = ho_kalman_realize(&seq, &t).unwrap();
        assert_eq!(r.state_dim, 1);
        assert!(r.system.f[(0, 0)].norm() < 1e-14);
        assert!((r.system.c[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(r.system.d[(0, 0)].norm() < 1e-14);
        assert!(r.moment_residual < 1e-12);
    }

    #[test]
    fn ho_kalman_constant_and_short_sequences() {
        let t = tol();
        let seq = MomentSequence {
            moments: vec![real_scalar(0.4), real_scalar(0.0), real_scalar(0.0)],
        };
        let r = ho_kalman_realize(&seq, &t).unwrap();
        assert_eq!(r.state_dim, 0);
        assert!((r.system.d[(0, 0)] - 0.4).norm() < 1e-15);

        let only_d = MomentSequence {
            moments: vec![real_scalar(0.4)],
        };
        assert!(matches!(ho_kalman_realize(&only_d, &t), Err(Error::AmbiguousRank(_))));
        let two = MomentSequence {
            moments: vec![real_scalar(0.0), real_scalar(1.0)],
        };
        assert!(matches!(ho_kalman_realize(&two, &t), Err(Error::AmbiguousRank(_))));
    }

    #[test]
    fn ho_kalman_rejects_indefinite_hankel() {
        let t = tol();
        // h1 = -1 cannot be C Cᴴ.
        let seq = MomentSequence {
            moments: vec![real_scalar(0.0), real_scalar(-1.0), real_scalar(0.0), real_scalar(0.0)],
        };
        assert!(matches!(ho_kalman_realize(&seq, &t), Err(Error::NotRealizable(_))));
    }

    #[test]
    fn unitary_match_examples() {
        let t = tol();
        let a = identity_transfer_system();
        let w = unitary_match(&a, &a, &t).unwrap().unwrap();
        assert!((w.w[(0, 0)] - 1.0).norm() < 1e-12);

        let b = PassiveSystem::selfadjoint(real_scalar(0.0), real_scalar(-1.0), real_scalar(0.0)).unwrap();
        let w = unitary_match(&a, &b, &t).unwrap().unwrap();
        assert!((w.w[(0, 0)] + 1.0).norm() < 1e-12);

        let other = PassiveSystem::selfadjoint(real_scalar(0.0), real_scalar(0.5), real_scalar(0.0)).unwrap();
        assert!(unitary_match(&a, &other, &t).unwrap().is_none());

        let not_min = scalar_system(0.0, 0.0, 0.0, 0.5);
        assert!(matches!(
            unitary_match(&not_min, &not_min, &t),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn system_json_fields() {
        let v = serde_json::to_value(identity_transfer_system()).unwrap();
        for key in ["d", "c", "b", "f", "selfadjoint"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: PassiveSystem = serde_json::from_value(v).unwrap();
        assert_eq!(back, identity_transfer_system());
    }
}
