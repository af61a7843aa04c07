//! Dense complex matrices and tolerance-governed subspace calculus.
//!
//! Every subspace is carried as an orthonormal frame. Rank decisions use a
//! relative singular-value cutoff, equality of subspaces is measured by the
//! sine of the largest principal angle (the gap between the two subspaces).

use nalgebra::{DMatrix, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Numerical thresholds shared by every rank, equality and positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative singular-value cutoff for numerical rank.
    pub rank_rel: f64,
    /// Bound on `‖FᴴF − I‖` for frames and on unitarity residuals.
    pub ortho: f64,
    /// Largest principal-angle sine under which two subspaces are equal.
    pub eq: f64,
    /// Eigenvalue floor for positivity tests.
    pub psd: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-10,
            ortho: 1e-10,
            eq: 1e-9,
            psd: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, ortho: f64, eq: f64, psd: f64) -> Result<Self> {
        let t = Tolerance {
            rank_rel,
            ortho,
            eq,
            psd,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("ortho", self.ortho),
            ("eq", self.eq),
            ("psd", self.psd),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Tolerance(format!("{name} must be strictly positive")));
            }
        }
        if self.rank_rel >= 1.0 {
            return Err(Error::Tolerance("rank_rel must be < 1".into()));
        }
        Ok(())
    }
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    diag(&values.iter().map(|&v| c64(v, 0.0)).collect::<Vec<_>>())
}

/// Builds a matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

/// A unitary `D F` (phases times the discrete Fourier matrix), distinct for each `k`.
fn mixing_unitary(n: usize, k: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |j, l| {
        let angle = 2.0 * std::f64::consts::PI * (j * l) as f64 / n as f64 + 0.37 * (k * (j + 1)) as f64;
        Complex64::from_polar(scale, angle)
    })
}

fn svd_residual(m: &CMatrix, svd: &SVD<Complex64, Dyn, Dyn>) -> f64 {
    let (Some(u), Some(v_t)) = (&svd.u, &svd.v_t) else {
        return f64::INFINITY;
    };
    let sigma = CMatrix::from_diagonal(&svd.singular_values.map(|s| c64(s, 0.0)));
    (u * sigma * v_t - m).norm()
}

/// Full SVD with a consistency check.
///
/// The complex SVD in nalgebra can return an inconsistent factorization when
/// its 2×2 bidiagonal step meets a zero singular value. The factorization is
/// verified, and on failure recomputed for `m W` with fixed unitaries `W`
/// (the right singular vectors are rotated back).
pub fn svd(m: &CMatrix) -> SVD<Complex64, Dyn, Dyn> {
    let bound = 1e-10 * m.norm().max(f64::MIN_POSITIVE);
    let first = SVD::new(m.clone(), true, true);
    let mut best_residual = svd_residual(m, &first);
    if best_residual <= bound || m.ncols() == 0 || m.nrows() == 0 {
        return first;
    }
    let mut best = first;
    for k in 1..=8 {
        let w = mixing_unitary(m.ncols(), k);
        let mut candidate = SVD::new(m * &w, true, true);
        candidate.v_t = candidate.v_t.map(|vt| vt * w.adjoint());
        let residual = svd_residual(m, &candidate);
        if residual < best_residual {
            best = candidate;
            best_residual = residual;
        }
        if best_residual <= bound {
            break;
        }
    }
    best
}

/// Singular values in no particular order; empty for degenerate shapes.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).singular_values.iter().copied().collect()
}

/// Moore–Penrose pseudo-inverse, dropping singular values at or below `cutoff`.
pub fn pseudo_inverse(m: &CMatrix, cutoff: f64) -> CMatrix {
    let d = svd(m);
    let (u, v_t) = (d.u.expect("full SVD"), d.v_t.expect("full SVD"));
    let inv_sigma = CMatrix::from_diagonal(
        &d.singular_values
            .map(|s| if s > cutoff { c64(1.0 / s, 0.0) } else { ZERO }),
    );
    v_t.adjoint() * inv_sigma * u.adjoint()
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `σ_max / σ_min` of a square matrix (infinite when singular).
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    if sv.is_empty() {
        return 1.0;
    }
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a square matrix, refusing matrices whose condition number
/// exceeds `1 / rank_rel`. `lambda` only labels the error.
pub fn checked_inverse(m: &CMatrix, rank_rel: f64, lambda: Complex64) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let condition = condition_number(m);
    if !(condition.is_finite() && condition * rank_rel <= 1.0) {
        return Err(Error::Spectrum { lambda, condition });
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Spectrum { lambda, condition })
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * c64(0.5, 0.0)
}

/// `(h − hᴴ) / 2i`, the imaginary part of a square matrix.
pub fn imaginary_part(h: &CMatrix) -> CMatrix {
    (h - h.adjoint()) * c64(0.0, -0.5)
}

/// Smallest eigenvalue of the Hermitian part and the asymmetry `‖h − hᴴ‖_F / 2`.
pub fn min_hermitian_eigenvalue(h: &CMatrix) -> Result<(f64, f64)> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "positivity test needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    check_finite(h)?;
    let asym = (h - h.adjoint()).norm() * 0.5;
    if h.nrows() == 0 {
        return Ok((f64::INFINITY, asym));
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min, asym))
}

/// True iff the smallest eigenvalue of `(h + hᴴ)/2` is at least `−floor`.
pub fn psd_check(h: &CMatrix, floor: f64) -> Result<bool> {
    let (min, _) = min_hermitian_eigenvalue(h)?;
    Ok(min >= -floor)
}

/// Orthonormal basis of the null space, keeping right singular vectors whose
/// singular value is at most `threshold`.
pub fn nullspace(m: &CMatrix, threshold: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let v_t = d.v_t.expect("full SVD");
    let keep: Vec<usize> = (0..d.singular_values.len())
        .filter(|&i| d.singular_values[i] <= threshold)
        .collect();
    let mut basis = CMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = v_t[(i, r)].conj();
        }
    }
    basis
}

/// A subspace of ℂⁿ carried by an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    frame: CMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            frame: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            frame: identity(ambient_dim),
        }
    }

    /// Wraps a frame that is already orthonormal to within `tol.ortho`.
    pub fn from_orthonormal(frame: CMatrix, tol: &Tolerance) -> Result<Self> {
        check_finite(&frame)?;
        let k = frame.ncols();
        let residual = if k == 0 {
            0.0
        } else {
            (frame.adjoint() * &frame - identity(k)).norm()
        };
        if residual > tol.ortho.max(1e-12) * (k.max(1) as f64) {
            return Err(Error::Dimension(format!(
                "frame is not orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Subspace {
            ambient_dim: frame.nrows(),
            frame,
        })
    }

    pub(crate) fn from_frame_unchecked(frame: CMatrix) -> Self {
        Subspace {
            ambient_dim: frame.nrows(),
            frame,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn into_frame(self) -> CMatrix {
        self.frame
    }

    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Distance of a vector from the subspace, relative to the vector's norm.
    pub fn relative_distance(&self, v: &CMatrix) -> f64 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        let resid = v - &self.frame * (self.frame.adjoint() * v);
        resid.norm() / nv
    }

    pub fn angle(&self, other: &Subspace) -> Result<f64> {
        subspace_angle(self, other)
    }

    pub fn equals(&self, other: &Subspace, tol: &Tolerance) -> Result<bool> {
        Ok(subspace_angle(self, other)? <= tol.eq)
    }

    pub fn sum(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        same_ambient(self, other)?;
        let mut m = CMatrix::zeros(self.ambient_dim, self.dim() + other.dim());
        m.view_mut((0, 0), (self.ambient_dim, self.dim()))
            .copy_from(&self.frame);
        m.view_mut((0, self.dim()), (self.ambient_dim, other.dim()))
            .copy_from(&other.frame);
        orthonormalize(&m, tol)
    }

    /// Coordinates restricted to the row range `start..start+len`, re-orthonormalized.
    pub fn project_rows(&self, start: usize, len: usize, tol: &Tolerance) -> Result<Subspace> {
        orthonormalize(&self.frame.rows(start, len).into_owned(), tol)
    }
}

fn same_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::Dimension(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim, b.ambient_dim
        )));
    }
    Ok(())
}

/// Orthonormal frame of the numerical column space of `m`; columns whose
/// singular value falls below `rank_rel · σ_max` are discarded.
pub fn orthonormalize(m: &CMatrix, tol: &Tolerance) -> Result<Subspace> {
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return Ok(Subspace::zero(n));
    }
    let d = svd(m);
    let u = d.u.expect("full SVD");
    let sigma = &d.singular_values;
    let max = sigma.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Subspace::zero(n));
    }
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] >= tol.rank_rel * max).collect();
    let mut frame = CMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        frame.set_column(c, &u.column(i));
    }
    Ok(Subspace { ambient_dim: n, frame })
}

/// Sine of the largest principal angle, extended to subspaces of unequal
/// dimension as the gap `max(‖(I − P_b)A‖, ‖(I − P_a)B‖)`.
pub fn subspace_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    same_ambient(a, b)?;
    let one_sided = |x: &Subspace, y: &Subspace| -> f64 {
        if x.dim() == 0 {
            return 0.0;
        }
        let resid = &x.frame - &y.frame * (y.frame.adjoint() * &x.frame);
        spectral_norm(&resid)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)).min(1.0))
}

/// `a ∩ b` as the null space of the stacked projector complements.
pub fn intersect(a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    same_ambient(a, b)?;
    let n = a.ambient_dim;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let mut stacked = CMatrix::zeros(2 * n, n);
    stacked
        .view_mut((0, 0), (n, n))
        .copy_from(&(identity(n) - a.projector()));
    stacked
        .view_mut((n, 0), (n, n))
        .copy_from(&(identity(n) - b.projector()));
    let basis = nullspace(&stacked, tol.eq);
    Ok(Subspace {
        ambient_dim: n,
        frame: basis,
    })
}

pub fn complement(a: &Subspace, tol: &Tolerance) -> Subspace {
    let n = a.ambient_dim;
    if a.dim() == 0 {
        return Subspace::full(n);
    }
    if a.dim() >= n {
        return Subspace::zero(n);
    }
    let p = identity(n) - a.projector();
    // The complement projector has singular values 1 and roundoff, so the
    // relative cutoff cannot fail here.
    orthonormalize(&p, tol).expect("projector entries are finite")
}

/// JSON shape `{"rows":n,"cols":m,"re":[...],"im":[...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<CMatrix> {
        let len = j.rows * j.cols;
        if j.re.len() != len || j.im.len() != len {
            return Err(Error::Dimension(format!(
                "matrix JSON declares {}x{} but carries {} real and {} imaginary entries",
                j.rows,
                j.cols,
                j.re.len(),
                j.im.len()
            )));
        }
        let m = CMatrix::from_fn(j.rows, j.cols, |r, c| c64(j.re[r * j.cols + c], j.im[r * j.cols + c]));
        check_finite(&m)?;
        Ok(m)
    }
}

/// `#[serde(with = "matrix_serde")]` adapter for [`CMatrix`] fields.
pub mod matrix_serde {
    use super::{CMatrix, MatrixJson};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        CMatrix::try_from(j).map_err(D::Error::custom)
    }
}

/// Same as [`matrix_serde`] for `Vec<CMatrix>`.
pub mod matrix_vec_serde {
    use super::{CMatrix, MatrixJson};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        let js: Vec<MatrixJson> = ms.iter().map(MatrixJson::from).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        let js = Vec::<MatrixJson>::deserialize(d)?;
        js.into_iter()
            .map(|j| CMatrix::try_from(j).map_err(D::Error::custom))
            .collect()
    }
}

/// Subspace JSON: the frame plus its ambient dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    #[serde(with = "matrix_serde")]
    pub frame: CMatrix,
}

impl From<&Subspace> for SubspaceJson {
    fn from(s: &Subspace) -> Self {
        SubspaceJson {
            ambient_dim: s.ambient_dim,
            frame: s.frame.clone(),
        }
    }
}
