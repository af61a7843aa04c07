//! Linear relations in `H = 𝔐 ⊕ 𝔎` stored as graph subspaces of `H ⊕ H`.
//!
//! A graph frame stacks the pair `{x, y}` as the column `[x; y]`, so the top
//! `n` rows form the block `X` and the bottom `n` rows the block `Y`. Nothing
//! here assumes the relation is an operator: multivalued parts and
//! non-dense domains are ordinary frames.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_finite, checked_inverse, complement, condition_number, hermitian_part, identity, imaginary_part,
    intersect, matrix_serde, min_hermitian_eigenvalue, orthonormalize, spectral_norm, subspace_angle, CMatrix,
    Subspace, Tolerance, ONE, ZERO,
};

/// Orthogonal split `H = 𝔐 ⊕ 𝔎`; the first `dim_m` coordinates span 𝔐.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSplit {
    pub dim_m: usize,
    pub dim_k: usize,
}

impl SpaceSplit {
    pub fn new(dim_m: usize, dim_k: usize) -> Result<Self> {
        if dim_m + dim_k == 0 {
            return Err(Error::Dimension("the space H must be nontrivial".into()));
        }
        Ok(SpaceSplit { dim_m, dim_k })
    }

    /// The split with `𝔎 = {0}`, used for relations acting on 𝔐 alone.
    pub fn whole(dim: usize) -> Self {
        SpaceSplit { dim_m: dim, dim_k: 0 }
    }

    pub fn n(&self) -> usize {
        self.dim_m + self.dim_k
    }

    /// `Ĵ_𝔐 = diag(−I_𝔐, I_𝔎)`.
    pub fn fundamental_symmetry(&self) -> CMatrix {
        let m = self.dim_m;
        CMatrix::from_fn(self.n(), self.n(), |i, j| match (i == j, i < m) {
            (true, true) => -ONE,
            (true, false) => ONE,
            _ => ZERO,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearRelation {
    split: SpaceSplit,
    graph: Subspace,
}

/// Domain, range, kernel and multivalued part.
#[derive(Clone, Debug)]
pub struct Parts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationFlags {
    pub symmetric: bool,
    pub selfadjoint: bool,
    pub nonnegative: bool,
    pub nonpositive: bool,
    pub accretive: bool,
    pub maximal_accretive: bool,
    pub dissipative: bool,
    pub maximal_dissipative: bool,
    pub skew_symmetric: bool,
    pub skew_selfadjoint: bool,
    pub j_selfadjoint: bool,
    pub is_operator: bool,
}

/// Raw numbers behind each flag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResiduals {
    /// `‖XᴴY − YᴴX‖₂`
    pub symmetry: f64,
    /// `‖XᴴY + YᴴX‖₂`
    pub skew_symmetry: f64,
    /// Smallest eigenvalue of the Hermitian part of `XᴴY` (real part of the form).
    pub real_part_min: f64,
    /// Largest eigenvalue of the Hermitian part of `XᴴY`.
    pub real_part_max: f64,
    /// Smallest eigenvalue of the imaginary part of `XᴴY`.
    pub imag_part_min: f64,
    /// Graph angle between the relation and `Ĵ_𝔐 A* Ĵ_𝔐`.
    pub j_adjoint_angle: f64,
    /// Condition number of `Y + X` (the resolvent probe at −1), infinite if `dim ≠ n`.
    pub minus_one_condition: f64,
    pub graph_dim: usize,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub flags: ClassificationFlags,
    pub residuals: ClassificationResiduals,
}

impl LinearRelation {
    pub fn from_subspace(graph: Subspace, split: SpaceSplit) -> Result<Self> {
        if graph.ambient_dim() != 2 * split.n() {
            return Err(Error::Dimension(format!(
                "graph lives in C^{} but the split needs C^{}",
                graph.ambient_dim(),
                2 * split.n()
            )));
        }
        Ok(LinearRelation { split, graph })
    }

    /// Span of the pairs `{X c, Y c}`; the columns need not be independent.
    pub fn from_blocks(x: &CMatrix, y: &CMatrix, split: SpaceSplit, tol: &Tolerance) -> Result<Self> {
        let n = split.n();
        if x.nrows() != n || y.nrows() != n || x.ncols() != y.ncols() {
            return Err(Error::Dimension(format!(
                "blocks {}x{} and {}x{} do not fit a split of size {n}",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            )));
        }
        let mut stacked = CMatrix::zeros(2 * n, x.ncols());
        stacked.view_mut((0, 0), (n, x.ncols())).copy_from(x);
        stacked.view_mut((n, 0), (n, x.ncols())).copy_from(y);
        Ok(LinearRelation {
            split,
            graph: orthonormalize(&stacked, tol)?,
        })
    }

    /// Graph of an everywhere defined operator, spanned by `[I; a]`.
    pub fn from_operator(a: &CMatrix, split: SpaceSplit, tol: &Tolerance) -> Result<Self> {
        let n = split.n();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, split has n = {n}",
                a.nrows(),
                a.ncols()
            )));
        }
        check_finite(a)?;
        Self::from_blocks(&identity(n), a, split, tol)
    }

    /// `{0} × H`, the purely multivalued relation.
    pub fn purely_multivalued(split: SpaceSplit) -> Self {
        let n = split.n();
        let mut frame = CMatrix::zeros(2 * n, n);
        frame.view_mut((n, 0), (n, n)).copy_from(&identity(n));
        LinearRelation {
            split,
            graph: Subspace::from_frame_unchecked(frame),
        }
    }

    /// `H × {0}`, the graph of the zero operator.
    pub fn zero_operator(split: SpaceSplit) -> Self {
        let n = split.n();
        let mut frame = CMatrix::zeros(2 * n, n);
        frame.view_mut((0, 0), (n, n)).copy_from(&identity(n));
        LinearRelation {
            split,
            graph: Subspace::from_frame_unchecked(frame),
        }
    }

    pub(crate) fn from_frame_unchecked(frame: CMatrix, split: SpaceSplit) -> Self {
        debug_assert_eq!(frame.nrows(), 2 * split.n());
        LinearRelation {
            split,
            graph: Subspace::from_frame_unchecked(frame),
        }
    }

    pub fn split(&self) -> SpaceSplit {
        self.split
    }

    pub fn n(&self) -> usize {
        self.split.n()
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn frame(&self) -> &CMatrix {
        self.graph.frame()
    }

    /// Dimension of the graph subspace.
    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    pub fn x_block(&self) -> CMatrix {
        self.frame().rows(0, self.n()).into_owned()
    }

    pub fn y_block(&self) -> CMatrix {
        self.frame().rows(self.n(), self.n()).into_owned()
    }

    /// Sine of the largest principal angle between the two graphs.
    pub fn angle(&self, other: &LinearRelation) -> Result<f64> {
        subspace_angle(&self.graph, &other.graph)
    }

    pub fn equals(&self, other: &LinearRelation, tol: &Tolerance) -> Result<bool> {
        Ok(self.angle(other)? <= tol.eq)
    }

    /// `A* = {(h, k) : (h′, k) = (h, k′) for all (k, k′) ∈ A}`.
    pub fn adjoint(&self, tol: &Tolerance) -> LinearRelation {
        let n = self.n();
        let (x, y) = (self.x_block(), self.y_block());
        let mut rotated = CMatrix::zeros(2 * n, self.dim());
        rotated.view_mut((0, 0), (n, self.dim())).copy_from(&y);
        rotated.view_mut((n, 0), (n, self.dim())).copy_from(&(-x));
        let rotated = Subspace::from_frame_unchecked(rotated);
        LinearRelation {
            split: self.split,
            graph: complement(&rotated, tol),
        }
    }

    pub fn inverse(&self) -> LinearRelation {
        let n = self.n();
        let f = self.frame();
        let mut swapped = CMatrix::zeros(2 * n, self.dim());
        swapped.view_mut((0, 0), (n, self.dim())).copy_from(&f.rows(n, n));
        swapped.view_mut((n, 0), (n, self.dim())).copy_from(&f.rows(0, n));
        Self::from_frame_unchecked(swapped, self.split)
    }

    /// `αA + βI`, i.e. the pairs `{x, αy + βx}`.
    pub fn shift_scale(&self, alpha: Complex64, beta: Complex64, tol: &Tolerance) -> Result<LinearRelation> {
        let x = self.x_block();
        let y = self.y_block() * alpha + &x * beta;
        Self::from_blocks(&x, &y, self.split, tol)
    }

    /// `−A = {x, −y}`; a unitary change of coordinates, so the frame stays orthonormal.
    pub fn negate(&self) -> LinearRelation {
        let n = self.n();
        let mut f = self.frame().clone();
        for mut row in f.rows_mut(n, n).row_iter_mut() {
            row.neg_mut();
        }
        Self::from_frame_unchecked(f, self.split)
    }

    /// `Ĵ_𝔐 A Ĵ_𝔐 = {Ĵx, Ĵy}`.
    pub fn j_conjugate(&self) -> LinearRelation {
        let n = self.n();
        let m = self.split.dim_m;
        let mut f = self.frame().clone();
        for r in (0..m).chain(n..n + m) {
            f.row_mut(r).neg_mut();
        }
        Self::from_frame_unchecked(f, self.split)
    }

    /// Adjoint with respect to the indefinite product `(Ĵ_𝔐 h, k)`.
    pub fn krein_adjoint(&self, tol: &Tolerance) -> LinearRelation {
        self.adjoint(tol).j_conjugate()
    }

    pub fn parts(&self, tol: &Tolerance) -> Result<Parts> {
        let n = self.n();
        let dom = orthonormalize(&self.x_block(), tol)?;
        let ran = orthonormalize(&self.y_block(), tol)?;
        let ker = self.intersect_axis(true, tol)?;
        let mul = self.intersect_axis(false, tol)?;
        debug_assert_eq!(dom.ambient_dim(), n);
        Ok(Parts { dom, ran, ker, mul })
    }

    /// Kernel (`top = true`, pairs `{x, 0}`) or multivalued part (`{0, y}`).
    fn intersect_axis(&self, top: bool, tol: &Tolerance) -> Result<Subspace> {
        let n = self.n();
        let mut axis = CMatrix::zeros(2 * n, n);
        let offset = if top { 0 } else { n };
        axis.view_mut((offset, 0), (n, n)).copy_from(&identity(n));
        let axis = Subspace::from_frame_unchecked(axis);
        let common = intersect(&self.graph, &axis, tol)?;
        orthonormalize(&common.frame().rows(offset, n).into_owned(), tol)
    }

    pub fn mul(&self, tol: &Tolerance) -> Result<Subspace> {
        self.intersect_axis(false, tol)
    }

    pub fn ker(&self, tol: &Tolerance) -> Result<Subspace> {
        self.intersect_axis(true, tol)
    }

    /// The matrix of `A` when `A` is the graph of an everywhere defined operator.
    pub fn to_operator(&self, tol: &Tolerance) -> Option<CMatrix> {
        if self.dim() != self.n() {
            return None;
        }
        let inv = checked_inverse(&self.x_block(), tol.rank_rel, ZERO).ok()?;
        Some(self.y_block() * inv)
    }

    /// `(A − λ)⁻¹ = X (Y − λX)⁻¹`, defined when `dim(A) = n` and `Y − λX` is
    /// well conditioned.
    pub fn resolvent(&self, lambda: Complex64, tol: &Tolerance) -> Result<CMatrix> {
        if self.dim() != self.n() {
            return Err(Error::Hypothesis(format!(
                "resolvent needs dim(graph) = {} but the graph has dimension {}",
                self.n(),
                self.dim()
            )));
        }
        let x = self.x_block();
        let shifted = self.y_block() - &x * lambda;
        let inv = checked_inverse(&shifted, tol.rank_rel, lambda)?;
        Ok(x * inv)
    }

    /// `P_𝔐 (A − λ)⁻¹ ↾ 𝔐`.
    pub fn compress_resolvent(&self, lambda: Complex64, tol: &Tolerance) -> Result<CMatrix> {
        let m = self.split.dim_m;
        if m == 0 {
            return Err(Error::Dimension("compression needs dim 𝔐 ≥ 1".into()));
        }
        let r = self.resolvent(lambda, tol)?;
        Ok(r.view((0, 0), (m, m)).into_owned())
    }

    pub fn classify(&self, tol: &Tolerance) -> Result<Classification> {
        let n = self.n();
        let (x, y) = (self.x_block(), self.y_block());
        let gram = x.adjoint() * &y;
        let symmetry = spectral_norm(&(&gram - gram.adjoint()));
        let skew_symmetry = spectral_norm(&(&gram + gram.adjoint()));
        let real_part = hermitian_part(&gram);
        let (real_part_min, _) = min_hermitian_eigenvalue(&real_part)?;
        let (neg_max, _) = min_hermitian_eigenvalue(&(-&real_part))?;
        let real_part_max = -neg_max;
        let (imag_part_min, _) = min_hermitian_eigenvalue(&imaginary_part(&gram))?;
        let j_adjoint_angle = self.angle(&self.krein_adjoint(tol))?;
        let full = self.dim() == n;
        let minus_one_condition = if full {
            condition_number(&(&y + &x))
        } else {
            f64::INFINITY
        };

        let symmetric = symmetry <= tol.eq;
        let selfadjoint = symmetric && full;
        let accretive = real_part_min >= -tol.psd;
        let dissipative = imag_part_min >= -tol.psd;
        let skew_symmetric = skew_symmetry <= tol.eq;
        let flags = ClassificationFlags {
            symmetric,
            selfadjoint,
            nonnegative: symmetric && real_part_min >= -tol.psd,
            nonpositive: symmetric && real_part_max <= tol.psd,
            accretive,
            maximal_accretive: accretive
                && full
                && minus_one_condition.is_finite()
                && minus_one_condition * tol.rank_rel <= 1.0,
            dissipative,
            maximal_dissipative: dissipative && full,
            skew_symmetric,
            skew_selfadjoint: skew_symmetric && full,
            j_selfadjoint: j_adjoint_angle <= tol.eq,
            is_operator: self.mul(tol)?.dim() == 0,
        };
        Ok(Classification {
            flags,
            residuals: ClassificationResiduals {
                symmetry,
                skew_symmetry,
                real_part_min,
                real_part_max,
                imag_part_min,
                j_adjoint_angle,
                minus_one_condition,
                graph_dim: self.dim(),
                n,
            },
        })
    }

    /// Selfadjoint and nonnegative, the hypothesis of most representation theorems.
    pub fn is_nonnegative_selfadjoint(&self, tol: &Tolerance) -> Result<bool> {
        let c = self.classify(tol)?;
        Ok(c.flags.selfadjoint && c.flags.nonnegative)
    }
}

/// JSON shape `{"dim_m":…, "dim_k":…, "frame":Matrix}`.
///
/// On input the frame columns only need to span the graph; they are
/// orthonormalized on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationJson {
    pub dim_m: usize,
    pub dim_k: usize,
    #[serde(with = "matrix_serde")]
    pub frame: CMatrix,
}

impl From<&LinearRelation> for RelationJson {
    fn from(r: &LinearRelation) -> Self {
        RelationJson {
            dim_m: r.split.dim_m,
            dim_k: r.split.dim_k,
            frame: r.frame().clone(),
        }
    }
}

impl RelationJson {
    pub fn into_relation(self, tol: &Tolerance) -> Result<LinearRelation> {
        let split = SpaceSplit::new(self.dim_m, self.dim_k)?;
        if self.frame.nrows() != 2 * split.n() {
            return Err(Error::Dimension(format!(
                "frame has {} rows, expected 2 * (dim_m + dim_k) = {}",
                self.frame.nrows(),
                2 * split.n()
            )));
        }
        LinearRelation::from_subspace(orthonormalize(&self.frame, tol)?, split)
    }
}

impl Serialize for LinearRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RelationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        RelationJson::deserialize(d)?
            .into_relation(&Tolerance::default())
            .map_err(D::Error::custom)
    }
}

/// Convenience for scalar or diagonal test operators.
pub fn scalar(v: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, v)
}

pub fn real_scalar(v: f64) -> CMatrix {
    scalar(c64(v, 0.0))
}
