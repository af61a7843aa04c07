//! Operator families `λ ↦ 𝓜(λ)`, each value a linear relation in 𝔐.
//!
//! A family is a small expression tree: leaves are closed forms, constant
//! relations, RS functions carried to the λ-plane by a linear-fractional
//! bridge, and compressed resolvents of a relation in a larger space. Inner
//! nodes invert, negate and multiply by powers of λ. Every check in this
//! module samples the family on a finite grid.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, checked_inverse, hermitian_part, identity, matrix_serde, min_hermitian_eigenvalue, spectral_norm, CMatrix,
    Tolerance, I, ONE, ZERO,
};
use crate::models::HalfLineModel;
use crate::relation::{LinearRelation, SpaceSplit};
use crate::systems::PassiveSystem;

/// Shift used when probing `λ ↦ (𝓜(λ) + μ)⁻¹` for smoothness on the negative axis.
pub const HOLOMORPHY_SHIFT: Complex64 = I;
/// Relative step of the second-difference probe.
pub const HOLOMORPHY_STEP: f64 = 1e-3;
/// Largest relative second difference accepted by the probe.
pub const HOLOMORPHY_BOUND: f64 = 1e-4;
/// Points per half-plane in the kernel Gram test.
pub const KERNEL_POINTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Stieltjes,
    InverseStieltjes,
}

/// How an RS function `Ω(z)` becomes a family in λ, with `z = (1 + λ)/(1 − λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bridge {
    /// `𝓠(λ) = {(I − Ω)h, (I + Ω)h}`.
    Formula1,
    /// `𝓡(λ) = {(I + Ω)h, (Ω − I)h}`.
    Formula2,
    /// `Ω(z(λ))` itself.
    DirectSchur,
}

/// Compressed-resolvent identities tying a family to a relation `A` in `𝔐 ⊕ 𝔎`.
/// Below `C(λ) = P_𝔐(A − λ)⁻¹↾𝔐`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// `C(λ) = −(𝓜(λ) + λ)⁻¹`, `A` selfadjoint, λ nonreal.
    Opexpr,
    /// `C(λ) = −(𝓡(λ) + λ)⁻¹`, `A` nonnegative selfadjoint, λ off `[0, ∞)`.
    Aarep,
    /// `C(λ) = (𝓠(λ) − λ)⁻¹`, `A` `Ĵ`-selfadjoint maximal accretive, `Re λ < 0`.
    Brep,
    /// `C(λ) = −(𝓠(λ) + λ)⁻¹`, `A` selfadjoint, λ nonreal.
    Arep,
    /// `C(λ) = −(−𝓠(1/λ) + λ)⁻¹`, `A` selfadjoint, λ nonreal.
    Opexpr3,
    /// `𝓠(λ) = −λ⁻¹C(λ)⁻¹ − I`, `A` nonnegative selfadjoint.
    Einundzwan,
    /// `𝓡(λ) = I − (P_𝔐(I − λA)⁻¹↾𝔐)⁻¹`, `A` nonnegative selfadjoint.
    Einundzwan2,
}

impl Representation {
    pub const ALL: [Representation; 7] = [
        Representation::Opexpr,
        Representation::Aarep,
        Representation::Brep,
        Representation::Arep,
        Representation::Opexpr3,
        Representation::Einundzwan,
        Representation::Einundzwan2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Representation::Opexpr => "opexpr",
            Representation::Aarep => "aarep",
            Representation::Brep => "brep",
            Representation::Arep => "arep",
            Representation::Opexpr3 => "opexpr3",
            Representation::Einundzwan => "einundzwan",
            Representation::Einundzwan2 => "einundzwan2",
        }
    }

    /// Whether λ lies where the identity is asserted.
    pub fn admits(&self, lambda: Complex64) -> bool {
        match self {
            Representation::Brep => lambda.re < 0.0,
            Representation::Opexpr | Representation::Arep | Representation::Opexpr3 => lambda.im != 0.0,
            Representation::Aarep | Representation::Einundzwan | Representation::Einundzwan2 => {
                !on_positive_axis(lambda)
            }
        }
    }

    /// Checks the hypothesis on the representing relation; the error names the failed flag.
    pub fn check_hypothesis(&self, rel: &LinearRelation, tol: &Tolerance) -> Result<()> {
        let flags = rel.classify(tol)?.flags;
        let fail = |what: &str| Err(Error::Hypothesis(format!("not {what}")));
        match self {
            Representation::Aarep | Representation::Einundzwan | Representation::Einundzwan2 => {
                if !flags.selfadjoint {
                    return fail("selfadjoint");
                }
                if !flags.nonnegative {
                    return fail("nonnegative");
                }
            }
            Representation::Brep => {
                if !flags.j_selfadjoint {
                    return fail("j_selfadjoint");
                }
                if !flags.maximal_accretive {
                    return fail("maximal_accretive");
                }
            }
            Representation::Opexpr | Representation::Arep | Representation::Opexpr3 => {
                if !flags.selfadjoint {
                    return fail("selfadjoint");
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Hypothesis(format!("unknown representation tag {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transformer {
    /// `𝓠 ↦ −𝓠⁻¹/λ` on Stieltjes families.
    PhiPlus,
    /// `𝓡 ↦ −λ𝓡⁻¹` on inverse Stieltjes families.
    PhiMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPoint {
    /// `(i/√λ) I`.
    Q0,
    /// `i√λ I`.
    R0,
}

/// A matrix function of `z` on `ℂ ∖ ((−∞, −1] ∪ [1, ∞))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZFunction {
    /// Transfer function of a passive system.
    System { system: PassiveSystem },
    Constant {
        #[serde(with = "matrix_serde")]
        value: CMatrix,
    },
    /// `z/(1 + √(1 − z²)) I`.
    FixedPoint { dim: usize },
    /// `(z − Ω)(I − zΩ)⁻¹`.
    Upsilon { inner: Box<ZFunction> },
    /// `I − 2(I + 𝓠)⁻¹` or `−I + 2(I − 𝓡)⁻¹` at `λ = (z − 1)/(z + 1)`.
    FromFamily {
        family: Box<OperatorFamily>,
        flavor: Flavor,
    },
}

impl ZFunction {
    pub fn dim(&self) -> usize {
        match self {
            ZFunction::System { system } => system.dim_m(),
            ZFunction::Constant { value } => value.nrows(),
            ZFunction::FixedPoint { dim } => *dim,
            ZFunction::Upsilon { inner } => inner.dim(),
            ZFunction::FromFamily { family, .. } => family.dim(),
        }
    }

    pub fn eval(&self, z: Complex64, tol: &Tolerance) -> Result<CMatrix> {
        if z.im == 0.0 && z.re.abs() >= 1.0 {
            return Err(Error::BranchCut(z));
        }
        match self {
            ZFunction::System { system } => system.transfer(z, tol),
            ZFunction::Constant { value } => Ok(value.clone()),
            ZFunction::FixedPoint { dim } => {
                let w = z / (ONE + (ONE - z * z).sqrt());
                Ok(identity(*dim) * w)
            }
            ZFunction::Upsilon { inner } => {
                let w = inner.eval(z, tol)?;
                let n = w.nrows();
                let inv = checked_inverse(&(identity(n) - &w * z), tol.rank_rel, z)?;
                Ok((identity(n) * z - w) * inv)
            }
            ZFunction::FromFamily { family, flavor } => {
                let lambda = moebius_lambda_of_z(z)?;
                let rel = family.eval(lambda, tol)?;
                let n = rel.n();
                Ok(match flavor {
                    Flavor::Stieltjes => identity(n) - rel.resolvent(-ONE, tol)? * c64(2.0, 0.0),
                    Flavor::InverseStieltjes => -identity(n) - rel.resolvent(ONE, tol)? * c64(2.0, 0.0),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorFamily {
    Omega {
        omega: ZFunction,
        bridge: Bridge,
    },
    /// The family read off the compressed resolvent of `relation` through `tag`.
    Relation {
        relation: LinearRelation,
        tag: Representation,
    },
    FixedPoint {
        which: FixedPoint,
        dim: usize,
    },
    Constant {
        relation: LinearRelation,
    },
    /// `{(Pf, (I − P)f)}` for an orthogonal projector `P`.
    ProjectionGraph {
        #[serde(with = "matrix_serde")]
        p: CMatrix,
    },
    /// `−λ⁻¹ B`.
    InnerStieltjes {
        #[serde(with = "matrix_serde")]
        b: CMatrix,
    },
    /// `λ C`.
    InnerInverseStieltjes {
        #[serde(with = "matrix_serde")]
        c: CMatrix,
    },
    /// `−𝓜(λ)⁻¹`.
    NegInverse {
        family: Box<OperatorFamily>,
    },
    /// `λ^power 𝓜(λ)`.
    LambdaPower {
        family: Box<OperatorFamily>,
        power: i32,
    },
    /// `−m(λ)⁻¹ − λ` for the compressed resolvent `m` of a half-line model.
    Model {
        model: HalfLineModel,
    },
}

impl OperatorFamily {
    pub fn constant_operator(a: &CMatrix, tol: &Tolerance) -> Result<Self> {
        Ok(OperatorFamily::Constant {
            relation: LinearRelation::from_operator(a, SpaceSplit::whole(a.nrows()), tol)?,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorFamily::Omega { omega, .. } => omega.dim(),
            OperatorFamily::Relation { relation, .. } => relation.split().dim_m,
            OperatorFamily::FixedPoint { dim, .. } => *dim,
            OperatorFamily::Constant { relation } => relation.n(),
            OperatorFamily::ProjectionGraph { p } => p.nrows(),
            OperatorFamily::InnerStieltjes { b } => b.nrows(),
            OperatorFamily::InnerInverseStieltjes { c } => c.nrows(),
            OperatorFamily::NegInverse { family } | OperatorFamily::LambdaPower { family, .. } => family.dim(),
            OperatorFamily::Model { .. } => 1,
        }
    }

    pub fn eval(&self, lambda: Complex64, tol: &Tolerance) -> Result<LinearRelation> {
        let split = SpaceSplit::whole(self.dim());
        match self {
            OperatorFamily::Omega { omega, bridge } => {
                if on_positive_axis(lambda) {
                    return Err(Error::BranchCut(lambda));
                }
                let w = omega.eval(moebius_z_of_lambda(lambda)?, tol)?;
                let id = identity(w.nrows());
                match bridge {
                    Bridge::Formula1 => LinearRelation::from_blocks(&(&id - &w), &(&id + &w), split, tol),
                    Bridge::Formula2 => LinearRelation::from_blocks(&(&id + &w), &(&w - &id), split, tol),
                    Bridge::DirectSchur => LinearRelation::from_operator(&w, split, tol),
                }
            }
            OperatorFamily::Relation { relation, tag } => relation_family(relation, *tag, lambda, tol),
            OperatorFamily::FixedPoint { which, dim } => {
                let s = branch_sqrt(lambda)?;
                let v = match which {
                    FixedPoint::Q0 => I / s,
                    FixedPoint::R0 => I * s,
                };
                LinearRelation::from_operator(&(identity(*dim) * v), split, tol)
            }
            OperatorFamily::Constant { relation } => LinearRelation::from_subspace(relation.graph().clone(), split),
            OperatorFamily::ProjectionGraph { p } => {
                LinearRelation::from_blocks(p, &(identity(p.nrows()) - p), split, tol)
            }
            OperatorFamily::InnerStieltjes { b } => {
                if lambda == ZERO {
                    return Err(Error::Pole(lambda));
                }
                LinearRelation::from_operator(&(b * (-1.0 / lambda)), split, tol)
            }
            OperatorFamily::InnerInverseStieltjes { c } => LinearRelation::from_operator(&(c * lambda), split, tol),
            OperatorFamily::NegInverse { family } => Ok(family.eval(lambda, tol)?.inverse().negate()),
            OperatorFamily::LambdaPower { family, power } => {
                if lambda == ZERO && *power < 0 {
                    return Err(Error::Pole(lambda));
                }
                family.eval(lambda, tol)?.shift_scale(lambda.powi(*power), ZERO, tol)
            }
            OperatorFamily::Model { model } => {
                let m = model.compress(lambda)?;
                let x = CMatrix::from_element(1, 1, m);
                let y = CMatrix::from_element(1, 1, -ONE - lambda * m);
                LinearRelation::from_blocks(&x, &y, split, tol)
            }
        }
    }

    /// The value as a matrix when it is an operator.
    pub fn eval_operator(&self, lambda: Complex64, tol: &Tolerance) -> Result<Option<CMatrix>> {
        match self {
            OperatorFamily::FixedPoint { which, dim } => {
                let s = branch_sqrt(lambda)?;
                let v = match which {
                    FixedPoint::Q0 => I / s,
                    FixedPoint::R0 => I * s,
                };
                return Ok(Some(identity(*dim) * v));
            }
            OperatorFamily::InnerInverseStieltjes { c } => return Ok(Some(c * lambda)),
            _ => {}
        }
        Ok(self.eval(lambda, tol)?.to_operator(tol))
    }

    fn eval_at(&self, lambda: Complex64, tol: &Tolerance) -> Result<LinearRelation> {
        self.eval(lambda, tol).map_err(|e| Error::Evaluation {
            lambda,
            reason: e.to_string(),
        })
    }
}

/// Evaluates the family defined by `tag` from `C(λ) = P_𝔐(A − λ)⁻¹↾𝔐`.
fn relation_family(
    a: &LinearRelation,
    tag: Representation,
    lambda: Complex64,
    tol: &Tolerance,
) -> Result<LinearRelation> {
    let m = a.split().dim_m;
    let split = SpaceSplit::whole(m);
    let id = identity(m);
    match tag {
        Representation::Opexpr | Representation::Aarep | Representation::Arep => {
            let c = a.compress_resolvent(lambda, tol)?;
            let y = -&id - &c * lambda;
            LinearRelation::from_blocks(&c, &y, split, tol)
        }
        Representation::Brep => {
            let c = a.compress_resolvent(lambda, tol)?;
            let y = &id + &c * lambda;
            LinearRelation::from_blocks(&c, &y, split, tol)
        }
        Representation::Opexpr3 => {
            if lambda == ZERO {
                return Err(Error::Pole(lambda));
            }
            let c = a.compress_resolvent(ONE / lambda, tol)?;
            let y = &id + &c / lambda;
            LinearRelation::from_blocks(&c, &y, split, tol)
        }
        Representation::Einundzwan => {
            if lambda == ZERO {
                return Err(Error::Pole(lambda));
            }
            let c = a.compress_resolvent(lambda, tol)?;
            let y = -&id / lambda - &c;
            LinearRelation::from_blocks(&c, &y, split, tol)
        }
        Representation::Einundzwan2 => {
            let k = &id + a.compress_resolvent(lambda, tol)? * lambda;
            let y = &k - &id;
            LinearRelation::from_blocks(&k, &y, split, tol)
        }
    }
}

fn on_positive_axis(lambda: Complex64) -> bool {
    lambda.im == 0.0 && lambda.re >= 0.0
}

/// `√λ` with `arg λ ∈ (0, 2π)`, so that `Im √λ > 0`; undefined on `[0, ∞)`.
pub fn branch_sqrt(lambda: Complex64) -> Result<Complex64> {
    if on_positive_axis(lambda) || !lambda.is_finite() {
        return Err(Error::BranchCut(lambda));
    }
    Ok(I * (-lambda).sqrt())
}

pub fn moebius_z_of_lambda(lambda: Complex64) -> Result<Complex64> {
    if lambda == ONE {
        return Err(Error::Pole(lambda));
    }
    Ok((ONE + lambda) / (ONE - lambda))
}

pub fn moebius_lambda_of_z(z: Complex64) -> Result<Complex64> {
    if z == -ONE {
        return Err(Error::Pole(z));
    }
    Ok((z - ONE) / (z + ONE))
}

/// Sorts points by `(Re, Im)`.
pub fn sort_grid(points: &mut [Complex64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// `{−2⁻³, …, −2³} ∪ {r e^{iθ} : r ∈ {1/4, 1, 4}, θ ∈ {±π/3, ±2π/3, ±0.9π}}`, sorted.
pub fn default_grid() -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = (-3..=3).map(|k| c64(-(2f64.powi(k)), 0.0)).collect();
    for r in [0.25, 1.0, 4.0] {
        for theta in [PI / 3.0, 2.0 * PI / 3.0, 0.9 * PI] {
            pts.push(Complex64::from_polar(r, theta));
            pts.push(Complex64::from_polar(r, -theta));
        }
    }
    sort_grid(&mut pts);
    pts
}

/// Möbius image of [`default_grid`].
pub fn default_z_grid() -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = default_grid()
        .into_iter()
        .map(|l| moebius_z_of_lambda(l).expect("grid avoids λ = 1"))
        .collect();
    sort_grid(&mut pts);
    pts
}

/// Heights `y` for probing the imaginary axis.
pub fn default_y_grid() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}

/// One sampled check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub lambda: [f64; 2],
    pub residual: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &str, lambda: Complex64, residual: f64, pass: bool) -> Self {
        CheckRow {
            check: check.to_string(),
            lambda: [lambda.re, lambda.im],
            residual,
            pass,
        }
    }
}

/// Outcome of the four RS-class criteria on a z-grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsVerdict {
    pub rs_class: bool,
    /// `−I ⪯ Ω(x) ⪯ I` on real samples.
    pub bounded_on_interval: bool,
    /// `Ω(z̄) = Ω(z)ᴴ`.
    pub symmetric: bool,
    /// `I − ΩᴴΩ − (1 − |z|²) Im Ω / Im z ⪰ 0`.
    pub inequality: bool,
    /// Gram matrices of the kernel are positive.
    pub kernel: bool,
    pub rows: Vec<CheckRow>,
}

fn kernel_block(oz: &CMatrix, ow: &CMatrix, z: Complex64, w: Complex64) -> CMatrix {
    let n = oz.nrows();
    let coef = (ONE - w.conj() * z) / (z - w.conj());
    identity(n) - ow.adjoint() * oz - (oz - ow.adjoint()) * coef
}

/// Tests the RS-class criteria at the points of `z_grid`, all of which must
/// avoid `(−∞, −1] ∪ [1, ∞)`. Real samples in `(−1, 1)` are augmented with
/// `{0, ±0.5, ±0.9}`.
pub fn rs_check(omega: &ZFunction, z_grid: &[Complex64], tol: &Tolerance) -> Result<RsVerdict> {
    let floor = tol.psd;
    let mut rows = Vec::new();

    let mut reals: Vec<f64> = z_grid.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
    reals.extend([-0.9, -0.5, 0.0, 0.5, 0.9]);
    reals.sort_by(f64::total_cmp);
    reals.dedup();
    let mut bounded = true;
    for x in reals {
        let z = c64(x, 0.0);
        let w = omega.eval(z, tol)?;
        let h = hermitian_part(&w);
        let asym = spectral_norm(&(&w - w.adjoint()));
        let (lo, _) = min_hermitian_eigenvalue(&(identity(w.nrows()) + &h))?;
        let (lo2, _) = min_hermitian_eigenvalue(&(identity(w.nrows()) - &h))?;
        let residual = asym.max(-lo).max(-lo2).max(0.0);
        let pass = asym <= tol.eq && lo >= -floor && lo2 >= -floor;
        bounded &= pass;
        rows.push(CheckRow::new("bounded_on_interval", z, residual, pass));
    }

    let nonreal: Vec<Complex64> = z_grid.iter().copied().filter(|z| z.im != 0.0).collect();
    let mut values = Vec::with_capacity(nonreal.len());
    let mut symmetric = true;
    let mut inequality = true;
    for &z in &nonreal {
        let w = omega.eval(z, tol)?;
        let wc = omega.eval(z.conj(), tol)?;
        let sym = spectral_norm(&(&wc - w.adjoint()));
        let pass = sym <= tol.eq;
        symmetric &= pass;
        rows.push(CheckRow::new("symmetry", z, sym, pass));

        let n = w.nrows();
        let im_w = (&w - w.adjoint()) * c64(0.0, -0.5);
        let form = identity(n) - w.adjoint() * &w - im_w * c64((1.0 - z.norm_sqr()) / z.im, 0.0);
        let (min, _) = min_hermitian_eigenvalue(&form)?;
        let pass = min >= -floor;
        inequality &= pass;
        rows.push(CheckRow::new("inequality", z, (-min).max(0.0), pass));
        values.push((z, w));
    }

    let mut kernel = true;
    for upper in [true, false] {
        let pts: Vec<&(Complex64, CMatrix)> = values
            .iter()
            .filter(|(z, _)| (z.im > 0.0) == upper)
            .take(KERNEL_POINTS)
            .collect();
        if pts.is_empty() {
            continue;
        }
        let n = pts[0].1.nrows();
        let size = n * pts.len();
        let mut gram = CMatrix::zeros(size, size);
        for (i, (zi, oi)) in pts.iter().map(|p| (p.0, &p.1)).enumerate() {
            for (j, (zj, oj)) in pts.iter().map(|p| (p.0, &p.1)).enumerate() {
                gram.view_mut((i * n, j * n), (n, n))
                    .copy_from(&kernel_block(oj, oi, zj, zi));
            }
        }
        let scale = spectral_norm(&gram).max(1.0);
        let (min, _) = min_hermitian_eigenvalue(&gram)?;
        let pass = min >= -floor * scale;
        kernel &= pass;
        let label = if upper { c64(0.0, 1.0) } else { c64(0.0, -1.0) };
        rows.push(CheckRow::new("kernel", label, (-min).max(0.0), pass));
    }

    Ok(RsVerdict {
        rs_class: bounded && symmetric && inequality && kernel,
        bounded_on_interval: bounded,
        symmetric,
        inequality,
        kernel,
        rows,
    })
}

/// The family of `ω` through `bridge`, after checking the RS criteria on the default z-grid.
pub fn family_from_omega(omega: ZFunction, bridge: Bridge, tol: &Tolerance) -> Result<OperatorFamily> {
    let verdict = rs_check(&omega, &default_z_grid(), tol)?;
    if !verdict.rs_class {
        return Err(Error::Hypothesis("the function is not of class RS on the grid".into()));
    }
    Ok(OperatorFamily::Omega { omega, bridge })
}

pub fn omega_from_family(family: OperatorFamily, flavor: Flavor) -> ZFunction {
    ZFunction::FromFamily {
        family: Box::new(family),
        flavor,
    }
}

pub fn upsilon_transform(omega: ZFunction) -> ZFunction {
    ZFunction::Upsilon { inner: Box::new(omega) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub nevanlinna: bool,
    pub stieltjes: bool,
    pub inverse_stieltjes: bool,
    /// Present for families built from a z-domain function.
    pub rs_class: Option<bool>,
    pub inner: bool,
    /// Present when the family is both Stieltjes and inverse Stieltjes.
    pub constant_projection: Option<bool>,
    /// Smoothness of the continuation on the negative axis; sampled, not proved.
    pub holomorphy_heuristic: bool,
    pub reasons: Vec<String>,
    pub residuals: Vec<CheckRow>,
}

impl FamilyVerdict {
    pub fn is(&self, class: &str) -> Option<bool> {
        match class {
            "nevanlinna" => Some(self.nevanlinna),
            "stieltjes" => Some(self.stieltjes),
            "inverse_stieltjes" => Some(self.inverse_stieltjes),
            "rs_class" => Some(self.rs_class.unwrap_or(false)),
            "inner" => Some(self.inner),
            _ => None,
        }
    }
}

/// Relative second difference of `x ↦ (𝓜(x) + μ)⁻¹` at `x`.
fn second_difference(fam: &OperatorFamily, x: f64, tol: &Tolerance) -> Result<f64> {
    let h = HOLOMORPHY_STEP * x.abs();
    let g = |t: f64| -> Result<CMatrix> { fam.eval_at(c64(t, 0.0), tol)?.resolvent(-HOLOMORPHY_SHIFT, tol) };
    let mid = g(x)?;
    let diff = g(x + h)? - &mid * c64(2.0, 0.0) + g(x - h)?;
    Ok(spectral_norm(&diff) / spectral_norm(&mid).max(f64::MIN_POSITIVE))
}

pub fn classify_family(fam: &OperatorFamily, grid: &[Complex64], tol: &Tolerance) -> Result<FamilyVerdict> {
    let mut pts = grid.to_vec();
    sort_grid(&mut pts);
    let mut rows = Vec::new();
    let mut reasons = Vec::new();

    let mut evals = Vec::with_capacity(pts.len());
    for &l in &pts {
        evals.push((l, fam.eval_at(l, tol)?));
    }

    let mut dissipative = true;
    let mut symmetric = true;
    for (l, r) in evals.iter().filter(|(l, _)| l.im != 0.0) {
        if l.im > 0.0 {
            let cls = r.classify(tol)?;
            let pass = cls.flags.maximal_dissipative && r.dim() == fam.dim();
            dissipative &= pass;
            rows.push(CheckRow::new(
                "maximal_dissipative",
                *l,
                (-cls.residuals.imag_part_min).max(0.0),
                pass,
            ));
        }
        let conj = fam.eval_at(l.conj(), tol)?;
        let angle = conj.angle(&r.adjoint(tol))?;
        let pass = angle <= tol.eq;
        symmetric &= pass;
        rows.push(CheckRow::new("symmetry", *l, angle, pass));
    }
    if !dissipative {
        reasons.push("not maximal dissipative in the upper half-plane".into());
    }
    if !symmetric {
        reasons.push("values at conjugate points are not adjoint".into());
    }

    let mut mul_constant = true;
    if let Some((_, first)) = evals.first() {
        let mul0 = first.mul(tol)?;
        for (l, r) in &evals[1..] {
            let angle = r.mul(tol)?.angle(&mul0)?;
            let pass = angle <= tol.eq;
            mul_constant &= pass;
            rows.push(CheckRow::new("mul_constant", *l, angle, pass));
        }
    }
    if !mul_constant {
        reasons.push("multivalued part depends on λ".into());
    }
    let nevanlinna = dissipative && symmetric && mul_constant;

    let mut nonnegative = true;
    let mut nonpositive = true;
    let mut holomorphy = true;
    let mut negatives = 0;
    for (l, r) in evals.iter().filter(|(l, _)| l.im == 0.0 && l.re < 0.0) {
        negatives += 1;
        let cls = r.classify(tol)?;
        let sa = cls.flags.selfadjoint;
        let res = &cls.residuals;
        let pos = sa && cls.flags.nonnegative;
        let neg = sa && cls.flags.nonpositive;
        nonnegative &= pos;
        nonpositive &= neg;
        rows.push(CheckRow::new(
            "nonnegative",
            *l,
            res.symmetry.max(-res.real_part_min).max(0.0),
            pos,
        ));
        rows.push(CheckRow::new(
            "nonpositive",
            *l,
            res.symmetry.max(res.real_part_max).max(0.0),
            neg,
        ));
        let d = second_difference(fam, l.re, tol)?;
        let pass = d <= HOLOMORPHY_BOUND;
        holomorphy &= pass;
        rows.push(CheckRow::new("holomorphy_heuristic", *l, d, pass));
    }
    if negatives == 0 {
        reasons.push("grid has no negative real points".into());
        nonnegative = false;
        nonpositive = false;
    }
    if !holomorphy {
        reasons.push("continuation to the negative axis is not smooth (heuristic)".into());
    }
    let stieltjes = nevanlinna && nonnegative && holomorphy;
    let inverse_stieltjes = nevanlinna && nonpositive && holomorphy;

    let constant_projection = if stieltjes && inverse_stieltjes {
        let first = &evals[0].1;
        let mut ok = true;
        for (_, r) in &evals {
            ok &= r.angle(first)? <= tol.eq;
        }
        let form = first.x_block().adjoint() * first.y_block();
        ok &= spectral_norm(&form) <= tol.eq;
        if !ok {
            reasons.push("both Stieltjes and inverse Stieltjes but not a constant projection graph".into());
        }
        Some(ok)
    } else {
        None
    };

    let inner = if stieltjes {
        inner_check(fam, Flavor::Stieltjes, &default_y_grid(), tol)?.inner
    } else if inverse_stieltjes {
        inner_check(fam, Flavor::InverseStieltjes, &default_y_grid(), tol)?.inner
    } else {
        false
    };

    let rs_class = match fam {
        OperatorFamily::Omega { omega, .. } => Some(rs_check(omega, &default_z_grid(), tol)?.rs_class),
        _ => None,
    };

    Ok(FamilyVerdict {
        nevanlinna,
        stieltjes,
        inverse_stieltjes,
        rs_class,
        inner,
        constant_projection,
        holomorphy_heuristic: holomorphy,
        reasons,
        residuals: rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerReport {
    pub inner: bool,
    /// `max ‖Re⟨f′, f⟩‖` over the frames on the imaginary axis.
    pub real_part: f64,
    /// Whether `−λ⁻¹𝑩` (or `λ𝑪`) with a fitted nonnegative `𝑩` reproduces every sample.
    pub fit: bool,
    /// The two criteria agree.
    pub consistent: bool,
    pub fitted: Option<LinearRelation>,
    pub rows: Vec<CheckRow>,
}

/// Inner test on `±iy`, cross-checked by fitting `𝑩 = −λ𝓠(λ)` or `𝑪 = 𝓡(λ)/λ`
/// from the first and last heights and validating on the rest.
pub fn inner_check(fam: &OperatorFamily, flavor: Flavor, ys: &[f64], tol: &Tolerance) -> Result<InnerReport> {
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &y in ys.iter().filter(|y| **y != 0.0) {
        points.push(c64(0.0, y));
        points.push(c64(0.0, -y));
    }
    if points.is_empty() {
        return Err(Error::Hypothesis("inner check needs a nonzero height".into()));
    }
    let mut real_part: f64 = 0.0;
    let mut values = Vec::with_capacity(points.len());
    for &l in &points {
        let r = fam.eval_at(l, tol)?;
        let form = r.x_block().adjoint() * r.y_block();
        let re = spectral_norm(&hermitian_part(&form));
        real_part = real_part.max(re);
        rows.push(CheckRow::new("real_part", l, re, re <= tol.eq));
        values.push((l, r));
    }
    let re_ok = real_part <= tol.eq;

    let fit_at = |l: Complex64, r: &LinearRelation| match flavor {
        Flavor::Stieltjes => r.shift_scale(-l, ZERO, tol),
        Flavor::InverseStieltjes => r.shift_scale(ONE / l, ZERO, tol),
    };
    let (l1, r1) = &values[0];
    let (l2, r2) = &values[values.len() - 1];
    let b1 = fit_at(*l1, r1)?;
    let b2 = fit_at(*l2, r2)?;
    let agree = b1.angle(&b2)?;
    let flags = b1.classify(tol)?.flags;
    let mut fit = agree <= tol.eq && flags.selfadjoint && flags.nonnegative;
    rows.push(CheckRow::new("fit_agreement", *l2, agree, fit));
    for (l, r) in &values[1..values.len() - 1] {
        let model = match flavor {
            Flavor::Stieltjes => b1.shift_scale(-ONE / l, ZERO, tol)?,
            Flavor::InverseStieltjes => b1.shift_scale(*l, ZERO, tol)?,
        };
        let angle = model.angle(r)?;
        let pass = angle <= tol.eq;
        fit &= pass;
        rows.push(CheckRow::new("fit_validation", *l, angle, pass));
    }
    Ok(InnerReport {
        inner: re_ok && fit,
        real_part,
        fit,
        consistent: re_ok == fit,
        fitted: if fit { Some(b1) } else { None },
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub invariant: bool,
    pub max_angle: f64,
    pub rows: Vec<CheckRow>,
}

/// Compares `𝓜(cλ)` with `c^p 𝓜(λ)` as graphs.
pub fn scale_invariance_check(
    fam: &OperatorFamily,
    c: f64,
    p: i32,
    grid: &[Complex64],
    tol: &Tolerance,
) -> Result<ScaleReport> {
    if !(c > 0.0 && c.is_finite()) || c == 1.0 {
        return Err(Error::Hypothesis(
            "scale factor must be positive and different from 1".into(),
        ));
    }
    let mut pts = grid.to_vec();
    sort_grid(&mut pts);
    let factor = c64(c.powi(p), 0.0);
    let mut rows = Vec::with_capacity(pts.len());
    let mut max_angle: f64 = 0.0;
    for l in pts {
        let lhs = fam.eval_at(l * c, tol)?;
        let rhs = fam.eval_at(l, tol)?.shift_scale(factor, ZERO, tol)?;
        let angle = lhs.angle(&rhs)?;
        max_angle = max_angle.max(angle);
        rows.push(CheckRow::new("scale", l, angle, angle <= tol.eq));
    }
    Ok(ScaleReport {
        invariant: max_angle <= tol.eq,
        max_angle,
        rows,
    })
}

/// `Φ₊(𝓠) = −𝓠⁻¹/λ` or `Φ₋(𝓡) = −λ𝓡⁻¹` without checking the class.
pub fn transformer(fam: OperatorFamily, which: Transformer) -> OperatorFamily {
    OperatorFamily::LambdaPower {
        family: Box::new(OperatorFamily::NegInverse { family: Box::new(fam) }),
        power: match which {
            Transformer::PhiPlus => -1,
            Transformer::PhiMinus => 1,
        },
    }
}

/// [`transformer`] after classifying the input on the default grid.
pub fn transformer_apply(fam: OperatorFamily, which: Transformer, tol: &Tolerance) -> Result<OperatorFamily> {
    let verdict = classify_family(&fam, &default_grid(), tol)?;
    let ok = match which {
        Transformer::PhiPlus => verdict.stieltjes,
        Transformer::PhiMinus => verdict.inverse_stieltjes,
    };
    if !ok {
        return Err(Error::Hypothesis(format!(
            "class mismatch: {} needs a{} family",
            match which {
                Transformer::PhiPlus => "Φ₊",
                Transformer::PhiMinus => "Φ₋",
            },
            match which {
                Transformer::PhiPlus => " Stieltjes",
                Transformer::PhiMinus => "n inverse Stieltjes",
            }
        )));
    }
    Ok(transformer(fam, which))
}

pub fn fixed_point_family(which: FixedPoint, dim: usize) -> OperatorFamily {
    OperatorFamily::FixedPoint { which, dim }
}

/// Largest pointwise distance between two families: the matrix 2-norm when
/// both values are operators, the graph angle otherwise.
pub fn family_distance(a: &OperatorFamily, b: &OperatorFamily, grid: &[Complex64], tol: &Tolerance) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &l in grid {
        let (ra, rb) = (a.eval_at(l, tol)?, b.eval_at(l, tol)?);
        let d = match (ra.to_operator(tol), rb.to_operator(tol)) {
            (Some(x), Some(y)) => spectral_norm(&(x - y)),
            _ => ra.angle(&rb)?,
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub lambda: [f64; 2],
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub tag: Representation,
    pub points: usize,
    /// Grid points outside the identity's domain.
    pub skipped: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<ResidualRow>,
    pub summary: VerificationSummary,
}

/// Residual of the identity `tag` between `fam` and the compressed resolvent
/// of `rel`, in the form where both sides are bounded:
///
/// | tag | residual |
/// |-----|----------|
/// | opexpr, aarep, arep | `‖C(λ) + (𝓜(λ) + λ)⁻¹‖` |
/// | brep | `‖C(λ) − (𝓠(λ) − λ)⁻¹‖` |
/// | opexpr3 | `‖C(λ) − (𝓠(1/λ) − λ)⁻¹‖` |
/// | einundzwan | `‖C(λ) + λ⁻¹(𝓠(λ) + I)⁻¹‖` |
/// | einundzwan2 | `‖(I + λC(λ)) + (𝓡(λ) − I)⁻¹‖` |
pub fn representation_residual(
    fam: &OperatorFamily,
    rel: &LinearRelation,
    tag: Representation,
    lambda: Complex64,
    tol: &Tolerance,
) -> Result<f64> {
    let c = rel.compress_resolvent(lambda, tol)?;
    let diff = match tag {
        Representation::Opexpr | Representation::Aarep | Representation::Arep => {
            c + fam.eval(lambda, tol)?.resolvent(-lambda, tol)?
        }
        Representation::Brep => c - fam.eval(lambda, tol)?.resolvent(lambda, tol)?,
        Representation::Opexpr3 => c - fam.eval(ONE / lambda, tol)?.resolvent(lambda, tol)?,
        Representation::Einundzwan => c + fam.eval(lambda, tol)?.resolvent(-ONE, tol)? / lambda,
        Representation::Einundzwan2 => {
            let k = identity(c.nrows()) + c * lambda;
            k + fam.eval(lambda, tol)?.resolvent(ONE, tol)?
        }
    };
    Ok(spectral_norm(&diff))
}

/// Checks the relation's hypothesis for `tag`, then the identity at every
/// admissible grid point.
pub fn verify_representation(
    fam: &OperatorFamily,
    rel: &LinearRelation,
    tag: Representation,
    grid: &[Complex64],
    threshold: f64,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    if fam.dim() != rel.split().dim_m {
        return Err(Error::Dimension(format!(
            "family acts on a space of dimension {}, relation has dim 𝔐 = {}",
            fam.dim(),
            rel.split().dim_m
        )));
    }
    tag.check_hypothesis(rel, tol)?;
    let mut pts = grid.to_vec();
    sort_grid(&mut pts);
    let total = pts.len();
    pts.retain(|&l| tag.admits(l));
    let mut rows = Vec::with_capacity(pts.len());
    let mut max_residual: f64 = 0.0;
    for l in pts {
        let residual = representation_residual(fam, rel, tag, l, tol).map_err(|e| Error::Evaluation {
            lambda: l,
            reason: e.to_string(),
        })?;
        max_residual = max_residual.max(residual);
        rows.push(ResidualRow {
            lambda: [l.re, l.im],
            residual,
            pass: residual <= threshold,
        });
    }
    let points = rows.len();
    Ok(VerificationReport {
        rows,
        summary: VerificationSummary {
            tag,
            points,
            skipped: total - points,
            max_residual,
            threshold,
            pass: points > 0 && max_residual <= threshold,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_rows, real_diag};
    use crate::relation::scalar;
    use crate::systems::identity_transfer_system;
    use crate::transforms::{p_transform, relation_from_contraction};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn scalar_value(fam: &OperatorFamily, l: Complex64) -> Complex64 {
        fam.eval_operator(l, &tol()).unwrap().expect("operator value")[(0, 0)]
    }

    fn z_family(bridge: Bridge) -> OperatorFamily {
        family_from_omega(
            ZFunction::System {
                system: identity_transfer_system(),
            },
            bridge,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn moebius_pairs() {
        assert_eq!(moebius_z_of_lambda(c64(-1.0, 0.0)).unwrap(), ZERO);
        assert!((moebius_z_of_lambda(I).unwrap() - I).norm() < 1e-15);
        assert!(matches!(moebius_z_of_lambda(ONE), Err(Error::Pole(_))));
        assert!(matches!(moebius_lambda_of_z(-ONE), Err(Error::Pole(_))));
        for l in default_grid() {
            let back = moebius_lambda_of_z(moebius_z_of_lambda(l).unwrap()).unwrap();
            assert!((back - l).norm() <= 1e-12 * l.norm().max(1.0));
            let z = moebius_z_of_lambda(l).unwrap();
            assert!(l.im * z.im >= 0.0);
        }
    }

    #[test]
    fn branch_values() {
        assert_eq!(branch_sqrt(c64(-1.0, 0.0)).unwrap(), I);
        assert_eq!(branch_sqrt(c64(-4.0, 0.0)).unwrap(), c64(0.0, 2.0));
        for l in default_grid() {
            assert!(branch_sqrt(l).unwrap().im > 0.0);
        }
        assert!(branch_sqrt(c64(0.0, 0.0)).is_err());
    }

    #[test]
    fn omega_z_gives_minus_inverse_lambda_and_lambda() {
        let q = z_family(Bridge::Formula1);
        let r = z_family(Bridge::Formula2);
        for l in default_grid() {
            assert!((scalar_value(&q, l) + ONE / l).norm() < 1e-12);
            assert!((scalar_value(&r, l) - l).norm() < 1e-12 * l.norm().max(1.0));
            let neg_inv = q.eval(l, &tol()).unwrap().inverse().negate();
            assert!(neg_inv.angle(&r.eval(l, &tol()).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn omega_zero_gives_identity() {
        let q = family_from_omega(ZFunction::Constant { value: scalar(ZERO) }, Bridge::Formula1, &tol()).unwrap();
        assert!((scalar_value(&q, c64(-3.0, 0.5)) - ONE).norm() < 1e-14);
    }

    #[test]
    fn omega_round_trips() {
        let q_one = OperatorFamily::constant_operator(&scalar(ONE), &tol()).unwrap();
        let w = omega_from_family(q_one, Flavor::Stieltjes);
        assert!(w.eval(c64(0.3, 0.2), &tol()).unwrap()[(0, 0)].norm() < 1e-14);
        for (fam, flavor) in [
            (z_family(Bridge::Formula1), Flavor::Stieltjes),
            (z_family(Bridge::Formula2), Flavor::InverseStieltjes),
        ] {
            let w = omega_from_family(fam, flavor);
            for z in default_z_grid() {
                assert!((w.eval(z, &tol()).unwrap()[(0, 0)] - z).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn upsilon_examples() {
        let zero = ZFunction::Constant { value: scalar(ZERO) };
        let ident = ZFunction::System {
            system: identity_transfer_system(),
        };
        let u0 = upsilon_transform(zero);
        let u1 = upsilon_transform(ident);
        let fp = ZFunction::FixedPoint { dim: 1 };
        let ufp = upsilon_transform(fp.clone());
        for z in default_z_grid() {
            assert!((u0.eval(z, &tol()).unwrap()[(0, 0)] - z).norm() < 1e-14);
            assert!(u1.eval(z, &tol()).unwrap()[(0, 0)].norm() < 1e-14);
            let d = ufp.eval(z, &tol()).unwrap() - fp.eval(z, &tol()).unwrap();
            assert!(d.norm() <= 1e-10);
        }
        assert!(rs_check(&ufp, &default_z_grid(), &tol()).unwrap().rs_class);
    }

    #[test]
    fn rs_check_examples() {
        let ident = ZFunction::System {
            system: identity_transfer_system(),
        };
        assert!(rs_check(&ident, &default_z_grid(), &tol()).unwrap().rs_class);

        let u = from_real_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let v = rs_check(&ZFunction::Constant { value: u }, &default_z_grid(), &tol()).unwrap();
        assert!(!v.bounded_on_interval && !v.symmetric && !v.rs_class);

        let mut double = identity_transfer_system();
        double.c[(0, 0)] = c64(2.0, 0.0);
        let v = rs_check(&ZFunction::System { system: double }, &default_z_grid(), &tol()).unwrap();
        assert!(!v.bounded_on_interval);
        let at_09 = v
            .rows
            .iter()
            .find(|r| r.check == "bounded_on_interval" && r.lambda == [0.9, 0.0])
            .unwrap();
        assert!(!at_09.pass);
    }

    #[test]
    fn classify_examples() {
        let q = z_family(Bridge::Formula1);
        let v = classify_family(&q, &default_grid(), &tol()).unwrap();
        assert!(v.nevanlinna && v.stieltjes && !v.inverse_stieltjes, "{:?}", v.reasons);
        assert!(v.inner);
        assert_eq!(v.rs_class, Some(true));

        let r = z_family(Bridge::Formula2);
        let v = classify_family(&r, &default_grid(), &tol()).unwrap();
        assert!(v.inverse_stieltjes && !v.stieltjes);

        let d = OperatorFamily::constant_operator(&(identity(2) * I), &tol()).unwrap();
        let v = classify_family(&d, &default_grid(), &tol()).unwrap();
        assert!(!v.nevanlinna);
    }

    #[test]
    fn projection_graph_is_both_and_constant() {
        let fam = OperatorFamily::ProjectionGraph {
            p: real_diag(&[1.0, 0.0]),
        };
        let v = classify_family(&fam, &default_grid(), &tol()).unwrap();
        assert!(v.stieltjes && v.inverse_stieltjes);
        assert_eq!(v.constant_projection, Some(true));
        assert!(v.inner);
    }

    #[test]
    fn inner_examples() {
        let q = OperatorFamily::InnerStieltjes {
            b: scalar(c64(2.0, 0.0)),
        };
        let rep = inner_check(&q, Flavor::Stieltjes, &default_y_grid(), &tol()).unwrap();
        assert!(rep.inner && rep.consistent);
        let b = rep.fitted.unwrap().to_operator(&tol()).unwrap();
        assert!((b[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-12);

        let one = OperatorFamily::constant_operator(&scalar(ONE), &tol()).unwrap();
        let rep = inner_check(&one, Flavor::Stieltjes, &default_y_grid(), &tol()).unwrap();
        assert!(!rep.inner && rep.consistent);

        let p = OperatorFamily::ProjectionGraph {
            p: real_diag(&[1.0, 0.0]),
        };
        for flavor in [Flavor::Stieltjes, Flavor::InverseStieltjes] {
            assert!(inner_check(&p, flavor, &default_y_grid(), &tol()).unwrap().inner);
        }
    }

    #[test]
    fn scale_examples() {
        let g = default_grid();
        let d = OperatorFamily::constant_operator(&real_diag(&[2.0]), &tol()).unwrap();
        assert!(scale_invariance_check(&d, 3.0, 0, &g, &tol()).unwrap().invariant);
        let q = OperatorFamily::InnerStieltjes {
            b: scalar(c64(2.0, 0.0)),
        };
        assert!(scale_invariance_check(&q, 3.0, -1, &g, &tol()).unwrap().invariant);
        assert!(!scale_invariance_check(&q, 3.0, 0, &g, &tol()).unwrap().invariant);
        assert!(scale_invariance_check(&q, 1.0, 0, &g, &tol()).is_err());
    }

    #[test]
    fn fixed_points() {
        let q0 = fixed_point_family(FixedPoint::Q0, 1);
        let r0 = fixed_point_family(FixedPoint::R0, 1);
        assert_eq!(scalar_value(&q0, c64(-1.0, 0.0)), ONE);
        assert_eq!(scalar_value(&r0, c64(-1.0, 0.0)), -ONE);
        assert!((scalar_value(&q0, c64(-4.0, 0.0)) - c64(0.5, 0.0)).norm() < 1e-15);
        assert!(q0.eval(c64(2.0, 0.0), &tol()).is_err());
        for l in default_grid() {
            let v = scalar_value(&q0, l);
            assert!((v * v + ONE / l).norm() < 1e-12);
        }
        let g = default_grid();
        let phi_q = transformer_apply(q0.clone(), Transformer::PhiPlus, &tol()).unwrap();
        assert!(family_distance(&phi_q, &q0, &g, &tol()).unwrap() <= 1e-10);
        let phi_r = transformer_apply(r0.clone(), Transformer::PhiMinus, &tol()).unwrap();
        assert!(family_distance(&phi_r, &r0, &g, &tol()).unwrap() <= 1e-10);
        assert!(transformer_apply(r0, Transformer::PhiPlus, &tol()).is_err());
    }

    #[test]
    fn phi_plus_of_identity() {
        let one = OperatorFamily::constant_operator(&scalar(ONE), &tol()).unwrap();
        let phi = transformer(one, Transformer::PhiPlus);
        assert!((scalar_value(&phi, c64(-1.0, 0.0)) - ONE).norm() < 1e-14);
    }

    #[test]
    fn omega_fixed_point_bridges_to_q0() {
        let q = family_from_omega(ZFunction::FixedPoint { dim: 1 }, Bridge::Formula1, &tol()).unwrap();
        let q0 = fixed_point_family(FixedPoint::Q0, 1);
        assert!(family_distance(&q, &q0, &default_grid(), &tol()).unwrap() < 1e-10);
    }

    fn swap_contraction() -> (CMatrix, LinearRelation) {
        let t = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let a = relation_from_contraction(&t, SpaceSplit::new(1, 1).unwrap(), &tol()).unwrap();
        (t, a)
    }

    #[test]
    fn worked_example_aarep_and_brep() {
        let (_, a) = swap_contraction();
        let r = z_family(Bridge::Formula2);
        let rep = verify_representation(&r, &a, Representation::Aarep, &default_grid(), 1e-12, &tol()).unwrap();
        assert!(rep.summary.pass, "{:?}", rep.summary);
        assert_eq!(rep.summary.points, default_grid().len());

        let b = p_transform(&a).unwrap();
        let b_op = b.to_operator(&tol()).unwrap();
        assert!((b_op - from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0])).norm() < 1e-12);
        let q = z_family(Bridge::Formula1);
        let rep = verify_representation(&q, &b, Representation::Brep, &default_grid(), 1e-12, &tol()).unwrap();
        assert!(rep.summary.pass && rep.summary.skipped > 0);
        for row in &rep.rows {
            assert!(row.lambda[0] < 0.0);
        }
    }

    #[test]
    fn identity_relation_gives_minus_one() {
        let a = LinearRelation::from_operator(&scalar(ONE), SpaceSplit::whole(1), &tol()).unwrap();
        let minus_one = OperatorFamily::constant_operator(&scalar(-ONE), &tol()).unwrap();
        let rep = verify_representation(&minus_one, &a, Representation::Aarep, &default_grid(), 1e-12, &tol()).unwrap();
        assert!(rep.summary.pass);
        let derived = OperatorFamily::Relation {
            relation: a,
            tag: Representation::Aarep,
        };
        assert!((scalar_value(&derived, c64(-2.0, 0.0)) + ONE).norm() < 1e-14);
    }

    #[test]
    fn hypothesis_failure_names_flag() {
        let a = LinearRelation::from_operator(&scalar(-ONE), SpaceSplit::whole(1), &tol()).unwrap();
        let fam = OperatorFamily::constant_operator(&scalar(ONE), &tol()).unwrap();
        match verify_representation(&fam, &a, Representation::Aarep, &default_grid(), 1e-8, &tol()) {
            Err(Error::Hypothesis(msg)) => assert_eq!(msg, "not nonnegative"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relation_backed_family_matches_identities() {
        let (_, a) = swap_contraction();
        for tag in [
            Representation::Aarep,
            Representation::Einundzwan,
            Representation::Einundzwan2,
        ] {
            let fam = OperatorFamily::Relation {
                relation: a.clone(),
                tag,
            };
            let rep = verify_representation(&fam, &a, tag, &default_grid(), 1e-12, &tol()).unwrap();
            assert!(rep.summary.pass, "{tag:?}");
        }
        let q_e = OperatorFamily::Relation {
            relation: a.clone(),
            tag: Representation::Einundzwan,
        };
        assert!((scalar_value(&q_e, c64(-2.0, 0.0)) - ONE).norm() < 1e-12);
    }

    #[test]
    fn family_json_round_trip() {
        let fam = transformer(
            family_from_omega(
                ZFunction::System {
                    system: identity_transfer_system(),
                },
                Bridge::Formula1,
                &tol(),
            )
            .unwrap(),
            Transformer::PhiPlus,
        );
        let s = serde_json::to_string(&fam).unwrap();
        let back: OperatorFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["kind"], "lambda_power");
        let q0: OperatorFamily = serde_json::from_str(r#"{"kind":"fixed_point","which":"q0","dim":2}"#).unwrap();
        assert_eq!(q0, fixed_point_family(FixedPoint::Q0, 2));
    }

    #[test]
    fn tag_names_round_trip() {
        for t in Representation::ALL {
            assert_eq!(t.name().parse::<Representation>().unwrap(), t);
            assert_eq!(serde_json::to_value(t).unwrap(), t.name());
        }
        assert!("nope".parse::<Representation>().is_err());
    }
}
