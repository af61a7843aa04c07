//! Seeded generators for random test instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c64, real_diag, spectral_norm, CMatrix, Tolerance};
use crate::relation::{LinearRelation, SpaceSplit};
use crate::systems::PassiveSystem;
use crate::transforms::relation_from_contraction;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn uniform_vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Entries with real and imaginary parts uniform on `[−1, 1)`.
    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c64(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
        })
    }

    pub fn unitary(&mut self, n: usize) -> CMatrix {
        self.complex_matrix(n, n).qr().q()
    }

    pub fn hermitian_with_spectrum(&mut self, eigenvalues: &[f64]) -> CMatrix {
        let u = self.unitary(eigenvalues.len());
        let h = &u * real_diag(eigenvalues) * u.adjoint();
        (&h + h.adjoint()) * c64(0.5, 0.0)
    }

    /// Selfadjoint `T` with `‖T‖ ≤ 1`. With `allow_boundary` some eigenvalues
    /// are put exactly at ±1, which gives the relation a kernel or a
    /// multivalued part.
    pub fn selfadjoint_contraction(&mut self, n: usize, allow_boundary: bool) -> CMatrix {
        let eigs: Vec<f64> = (0..n)
            .map(|_| {
                if allow_boundary && self.coin(0.2) {
                    if self.coin(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    self.uniform(-0.95, 0.95)
                }
            })
            .collect();
        self.hermitian_with_spectrum(&eigs)
    }

    /// Positive semidefinite matrix with at least one zero eigenvalue when `singular`.
    pub fn psd(&mut self, n: usize, singular: bool) -> CMatrix {
        let mut eigs = self.uniform_vec(n, 0.2, 3.0);
        if singular && n > 1 {
            let k = self.index(0, n - 1);
            eigs[k] = 0.0;
        }
        self.hermitian_with_spectrum(&eigs)
    }

    /// Orthogonal projector of rank in `1..n` (rank 1 when `n = 1`).
    pub fn projector(&mut self, n: usize) -> CMatrix {
        let rank = if n == 1 { 1 } else { self.index(1, n - 1) };
        let eigs: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
        self.hermitian_with_spectrum(&eigs)
    }

    /// A relation drawn from one of three shapes: an operator graph, an
    /// operator graph with a multivalued part, or a random subspace of
    /// random dimension.
    pub fn relation(&mut self, split: SpaceSplit, tol: &Tolerance) -> LinearRelation {
        let n = split.n();
        let rel = match self.index(0, 2) {
            0 => LinearRelation::from_operator(&self.complex_matrix(n, n), split, tol),
            1 => {
                let mut x = self.complex_matrix(n, n);
                let y = self.complex_matrix(n, n);
                let zeroed = self.index(1, n);
                for j in 0..zeroed {
                    x.column_mut(j).fill(c64(0.0, 0.0));
                }
                LinearRelation::from_blocks(&x, &y, split, tol)
            }
            _ => {
                let d = self.index(1, 2 * n);
                let x = self.complex_matrix(n, d);
                let y = self.complex_matrix(n, d);
                LinearRelation::from_blocks(&x, &y, split, tol)
            }
        };
        rel.expect("random frames have full column rank")
    }

    /// Nonnegative selfadjoint relation `{(I + T)h, (I − T)h}`.
    pub fn nonnegative_relation(
        &mut self,
        split: SpaceSplit,
        allow_boundary: bool,
        tol: &Tolerance,
    ) -> (CMatrix, LinearRelation) {
        let t = self.selfadjoint_contraction(split.n(), allow_boundary);
        let rel = relation_from_contraction(&t, split, tol).expect("T is a selfadjoint contraction");
        (t, rel)
    }

    /// Selfadjoint system whose state operator has well separated
    /// eigenvalues in `[−0.75, 0.75]·max_norm`, with `‖D‖ ≤ 0.4·max_norm` and
    /// `‖C‖ ≤ 0.2·max_norm`, so `‖T‖ ≤ max_norm` without rescaling.
    pub fn minimal_system(&mut self, dim_m: usize, dim_k: usize, max_norm: f64) -> PassiveSystem {
        let spread = 0.75 * max_norm;
        let spacing = 2.0 * spread / dim_k.max(1) as f64;
        let eigs: Vec<f64> = (0..dim_k)
            .map(|i| -spread + spacing * (i as f64 + 0.5 + self.uniform(-0.2, 0.2)))
            .collect();
        let f = self.hermitian_with_spectrum(&eigs);
        let d_eigs = self.uniform_vec(dim_m, -0.4 * max_norm, 0.4 * max_norm);
        let d = self.hermitian_with_spectrum(&d_eigs);
        let mut c = self.complex_matrix(dim_m, dim_k);
        if dim_k > 0 {
            let target = self.uniform(0.1, 0.2) * max_norm;
            c *= c64(target / spectral_norm(&c), 0.0);
        }
        scaled_system(d, c, f, max_norm)
    }

    /// Selfadjoint system with a state block decoupled from the input, so it
    /// is never simple. Requires `dim_k ≥ 2`.
    pub fn decoupled_system(&mut self, dim_m: usize, dim_k: usize, max_norm: f64) -> PassiveSystem {
        let coupled = self.index(1, dim_k - 1);
        let mut sys = self.minimal_system(dim_m, coupled, 1.0);
        let rest_eigs = self.uniform_vec(dim_k - coupled, -0.9, 0.9);
        let rest = self.hermitian_with_spectrum(&rest_eigs);
        let mut f = CMatrix::zeros(dim_k, dim_k);
        f.view_mut((0, 0), (coupled, coupled)).copy_from(&sys.f);
        f.view_mut((coupled, coupled), (dim_k - coupled, dim_k - coupled))
            .copy_from(&rest);
        let mut c = CMatrix::zeros(dim_m, dim_k);
        c.view_mut((0, 0), (dim_m, coupled)).copy_from(&sys.c);
        let w = self.unitary(dim_k);
        sys = scaled_system(sys.d, c, f, max_norm);
        sys.conjugate_state(&w).expect("unitary has the state size")
    }

    /// A dense random selfadjoint system, simple with probability one.
    pub fn dense_system(&mut self, dim_m: usize, dim_k: usize, max_norm: f64) -> PassiveSystem {
        let t = self.complex_matrix(dim_m + dim_k, dim_m + dim_k);
        let t = (&t + t.adjoint()) * c64(0.5, 0.0);
        let t = &t * c64(max_norm / spectral_norm(&t), 0.0);
        PassiveSystem::from_block(&t, dim_m, true).expect("square block")
    }
}

fn scaled_system(d: CMatrix, c: CMatrix, f: CMatrix, max_norm: f64) -> PassiveSystem {
    let sys = PassiveSystem::selfadjoint(d, c, f).expect("consistent shapes");
    let norm = sys.norm();
    if norm <= max_norm {
        return sys;
    }
    let s = c64(max_norm / norm, 0.0);
    PassiveSystem::selfadjoint(&sys.d * s, &sys.c * s, &sys.f * s).expect("consistent shapes")
}
