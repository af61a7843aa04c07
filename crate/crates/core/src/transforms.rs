//! Graph transformations that move between nonnegative selfadjoint relations,
//! `Ĵ_𝔐`-selfadjoint accretive relations, unitary operators and selfadjoint
//! contractions, plus the 𝔐-minimality span.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, check_finite, identity, orthonormalize, spectral_norm, CMatrix, Subspace, Tolerance, I};
use crate::relation::{LinearRelation, SpaceSplit};

/// Which component of `H = 𝔐 ⊕ 𝔎` a rotation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    M,
    K,
}

fn require_m(r: &LinearRelation) -> Result<()> {
    if r.split().dim_m == 0 {
        return Err(Error::Dimension("the transformation needs dim 𝔐 ≥ 1".into()));
    }
    Ok(())
}

/// Swaps the 𝔐-components of each graph pair:
/// `{(φ, f), (φ′, f′)} ↦ {(φ′, f), (φ, f′)}`.
pub fn p_transform(r: &LinearRelation) -> Result<LinearRelation> {
    require_m(r)?;
    let n = r.n();
    let m = r.split().dim_m;
    let mut f = r.frame().clone();
    for i in 0..m {
        f.swap_rows(i, n + i);
    }
    Ok(LinearRelation::from_frame_unchecked(f, r.split()))
}

/// `{(φ, f), (φ′, f′)} ↦ {(−cφ′, f), (cφ, f′)}` on the 𝔐 side, or the same
/// rotation of `(f, f′)` on the 𝔎 side. The choice `c = i` is the usual
/// involutive transform.
pub fn j_transform(r: &LinearRelation, c: Complex64, side: Side) -> Result<LinearRelation> {
    if (c.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular(c));
    }
    let n = r.n();
    let (start, len) = match side {
        Side::M => {
            require_m(r)?;
            (0, r.split().dim_m)
        }
        Side::K => (r.split().dim_m, r.split().dim_k),
    };
    let src = r.frame();
    let mut f = src.clone();
    for i in start..start + len {
        for col in 0..src.ncols() {
            f[(i, col)] = -c * src[(n + i, col)];
            f[(n + i, col)] = c * src[(i, col)];
        }
    }
    Ok(LinearRelation::from_frame_unchecked(f, r.split()))
}

/// `−𝔍_𝔎(A)`: the `c = i` rotation on 𝔎 followed by negation.
pub fn neg_j_k(r: &LinearRelation) -> Result<LinearRelation> {
    Ok(j_transform(r, I, Side::K)?.negate())
}

/// `U = I − 2i (A + i)⁻¹`, computed from the graph so that `ker(I − U) = mul A`.
pub fn cayley(r: &LinearRelation, tol: &Tolerance) -> Result<CMatrix> {
    let n = r.n();
    let res = r.resolvent(-I, tol)?;
    Ok(identity(n) - res * c64(0.0, 2.0))
}

/// Graph spanned by `[(I − U)g; i(I + U)g]`.
pub fn inverse_cayley(u: &CMatrix, split: SpaceSplit, tol: &Tolerance) -> Result<LinearRelation> {
    let n = split.n();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::Dimension(format!(
            "unitary is {}x{}, split has n = {n}",
            u.nrows(),
            u.ncols()
        )));
    }
    check_finite(u)?;
    let residual = (u.adjoint() * u - identity(n)).norm();
    if residual > tol.ortho.max(1e-12) * (n as f64) {
        return Err(Error::NotUnitary(residual));
    }
    let x = identity(n) - u;
    let y = (identity(n) + u) * I;
    LinearRelation::from_blocks(&x, &y, split, tol)
}

#[derive(Clone, Debug)]
pub struct ContractionTransform {
    /// `T = −I + 2(I + A)⁻¹`.
    pub t: CMatrix,
    pub norm: f64,
    /// `‖T − Tᴴ‖₂`.
    pub asymmetry: f64,
    /// `T` is selfadjoint with `‖T‖ ≤ 1` to within tolerance.
    pub selfadjoint_contraction: bool,
}

pub fn contraction_transform(r: &LinearRelation, tol: &Tolerance) -> Result<ContractionTransform> {
    let n = r.n();
    let t = identity(n) * c64(-1.0, 0.0) + r.resolvent(c64(-1.0, 0.0), tol)? * c64(2.0, 0.0);
    let norm = spectral_norm(&t);
    let asymmetry = spectral_norm(&(&t - t.adjoint()));
    Ok(ContractionTransform {
        selfadjoint_contraction: asymmetry <= tol.eq && norm <= 1.0 + tol.eq,
        t,
        norm,
        asymmetry,
    })
}

/// `{(I + T)h, (I − T)h}` for any square `T`; no hypothesis is checked.
pub fn fractional_relation(t: &CMatrix, split: SpaceSplit, tol: &Tolerance) -> Result<LinearRelation> {
    let n = split.n();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::Dimension(format!(
            "T is {}x{}, split has n = {n}",
            t.nrows(),
            t.ncols()
        )));
    }
    check_finite(t)?;
    LinearRelation::from_blocks(&(identity(n) + t), &(identity(n) - t), split, tol)
}

/// The nonnegative selfadjoint relation `{(I + T)h, (I − T)h}` of a
/// selfadjoint contraction `T`.
pub fn relation_from_contraction(t: &CMatrix, split: SpaceSplit, tol: &Tolerance) -> Result<LinearRelation> {
    if t.nrows() == t.ncols() {
        check_finite(t)?;
        let norm = spectral_norm(t);
        let asymmetry = spectral_norm(&(t - t.adjoint()));
        if norm > 1.0 + tol.eq || asymmetry > tol.eq {
            return Err(Error::NotContraction { norm, asymmetry });
        }
    }
    fractional_relation(t, split, tol)
}

/// Probe points used when none are supplied.
pub fn default_probes() -> Vec<Complex64> {
    vec![
        c64(-1.0, 0.0),
        c64(-0.5, 0.0),
        c64(-2.0, 0.0),
        c64(0.0, 1.0),
        c64(0.0, -1.0),
        c64(1.0, 1.0),
    ]
}

/// `span{𝔐, (A − λ)⁻¹𝔐 : λ ∈ probes}`, closed under repeated resolvent
/// application so that it equals the span over all of the resolvent set.
pub fn minimal_span(r: &LinearRelation, probes: &[Complex64], tol: &Tolerance) -> Result<Subspace> {
    let n = r.n();
    let m = r.split().dim_m;
    let mut basis = CMatrix::zeros(n, m);
    basis.view_mut((0, 0), (m, m)).copy_from(&identity(m));
    let mut span = orthonormalize(&basis, tol)?;
    if span.is_full() {
        return Ok(span);
    }
    let resolvents = probes
        .iter()
        .map(|&p| r.resolvent(p, tol))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..n {
        let k = span.dim();
        let mut gen = CMatrix::zeros(n, k * (resolvents.len() + 1));
        gen.view_mut((0, 0), (n, k)).copy_from(span.frame());
        for (i, res) in resolvents.iter().enumerate() {
            gen.view_mut((0, k * (i + 1)), (n, k)).copy_from(&(res * span.frame()));
        }
        let next = orthonormalize(&gen, tol)?;
        let grew = next.dim() > k;
        span = next;
        if !grew || span.is_full() {
            break;
        }
    }
    Ok(span)
}

/// [`minimal_span`] over the default probes that lie in the resolvent set.
pub fn minimal_span_default(r: &LinearRelation, tol: &Tolerance) -> Result<Subspace> {
    let probes: Vec<Complex64> = default_probes()
        .into_iter()
        .filter(|&p| r.resolvent(p, tol).is_ok())
        .collect();
    if probes.is_empty() {
        return Err(Error::Hypothesis("no default probe lies in the resolvent set".into()));
    }
    minimal_span(r, &probes, tol)
}

pub fn is_minimal(r: &LinearRelation, probes: &[Complex64], tol: &Tolerance) -> Result<bool> {
    Ok(minimal_span(r, probes, tol)?.is_full())
}

/// `span{Tᵏ 𝔐 : k ≥ 0}` for a square `T` whose first `dim_m` coordinates span 𝔐.
pub fn krylov_span(t: &CMatrix, dim_m: usize, tol: &Tolerance) -> Result<Subspace> {
    let n = t.nrows();
    let mut block = CMatrix::zeros(n, dim_m);
    block.view_mut((0, 0), (dim_m, dim_m)).copy_from(&identity(dim_m));
    krylov(t, &block, tol)
}

/// `span{Fᵏ B : k ≥ 0}` with rank-stagnation exit.
pub fn krylov(f: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Subspace> {
    let n = f.nrows();
    let mut span = orthonormalize(b, tol)?;
    let mut current = b.clone();
    for _ in 0..n {
        if span.is_full() {
            break;
        }
        current = f * current;
        let k = span.dim();
        let mut gen = CMatrix::zeros(n, k + current.ncols());
        gen.view_mut((0, 0), (n, k)).copy_from(span.frame());
        gen.view_mut((0, k), (n, current.ncols())).copy_from(&current);
        let next = orthonormalize(&gen, tol)?;
        if next.dim() == k {
            break;
        }
        span = next;
    }
    Ok(span)
}
