//! Two half-line models whose compressed resolvent is `m(λ) = −1/(λ + i√λ)`:
//! multiplication by `t²` in `L²(ℝ₊, ρ₀)` with `ρ₀(t) = (2/π)/(1 + t²)`, and
//! `−u″` on the half-line with the boundary condition `−u′(0) − λu(0) = h`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::branch_sqrt;
use crate::linalg::{c64, I};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_subdivisions: 1000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Tolerance("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 32 {
            return Err(Error::Tolerance("max_subdivisions must be at least 32".into()));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel with the embedded 7-point Gauss rule as error estimate.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

/// Adaptive bisection of the panel with the largest error estimate.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut subdivisions = 0;
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                subdivisions,
                estimate: err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        let (lv, le) = gk15(&f, pa, mid);
        let (rv, re) = gk15(&f, mid, pb);
        panels.push((pa, mid, lv, le));
        panels.push((mid, pb, rv, re));
        subdivisions += 1;
    }
}

/// `−1/(λ + i√λ)` on the branch with `Im √λ > 0`.
pub fn closed_form(lambda: Complex64) -> Result<Complex64> {
    let s = branch_sqrt(lambda)?;
    Ok(-1.0 / (lambda + I * s))
}

/// `(2/π) ∫₀^∞ dt / ((t² − λ)(1 + t²))` after `t = tan s`.
pub fn l2_model_compress(lambda: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    branch_sqrt(lambda)?;
    let integrand = |s: f64| {
        let (sin, cos) = s.sin_cos();
        let t2 = (sin * sin) / (cos * cos);
        c64(2.0 / PI, 0.0) / (c64(t2, 0.0) - lambda)
    };
    integrate(integrand, 0.0, FRAC_PI_2, spec)
}

/// Boundary value `u(0)` of the decaying solution `u(x) = −e^{i√λ x} h/(i√λ + λ)`, `h = 1`.
pub fn ode_model_compress(lambda: Complex64) -> Result<Complex64> {
    let s = branch_sqrt(lambda)?;
    if (I * s).exp().norm() >= 1.0 {
        return Err(Error::BranchCut(lambda));
    }
    Ok(-1.0 / (I * s + lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    WeightedL2,
    OdeBoundaryTriplet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineModel {
    pub kind: ModelKind,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl HalfLineModel {
    pub fn new(kind: ModelKind) -> Self {
        HalfLineModel {
            kind,
            quadrature: QuadratureSpec::default(),
        }
    }

    /// `P_𝔐 (A − λ)⁻¹ ↾ 𝔐` for the model operator.
    pub fn compress(&self, lambda: Complex64) -> Result<Complex64> {
        match self.kind {
            ModelKind::WeightedL2 => l2_model_compress(lambda, &self.quadrature),
            ModelKind::OdeBoundaryTriplet => ode_model_compress(lambda),
        }
    }

    /// Boundary maps of the differential model; the weighted model has none.
    pub fn boundary_maps(&self) -> Option<(&'static str, &'static str)> {
        match self.kind {
            ModelKind::WeightedL2 => None,
            ModelKind::OdeBoundaryTriplet => Some(("u(0)", "u'(0)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub lambda: [f64; 2],
    pub quadrature: [f64; 2],
    pub closed_form: [f64; 2],
    pub abs_err: f64,
}

/// Quadrature against the closed form at every grid point, sorted by `(Re λ, Im λ)`.
pub fn model_check(grid: &[Complex64], spec: &QuadratureSpec) -> Result<Vec<ModelReport>> {
    let mut pts = grid.to_vec();
    crate::families::sort_grid(&mut pts);
    pts.iter()
        .map(|&lambda| {
            let q = l2_model_compress(lambda, spec)?;
            let c = closed_form(lambda)?;
            Ok(ModelReport {
                lambda: [lambda.re, lambda.im],
                quadrature: [q.re, q.im],
                closed_form: [c.re, c.im],
                abs_err: (q - c).norm(),
            })
        })
        .collect()
}
