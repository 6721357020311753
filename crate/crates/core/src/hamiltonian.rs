//! Matrix representations of the driven-ion Hamiltonian.
//!
//! Bare-basis matrices index the spin-major product basis
//! `[|0,e>, ..., |n,e>, |0,g>, ..., |n,g>]`; the displaced-basis matrix uses the
//! same layout for the coefficients `[c_0, ..., c_n, d_0, ..., d_n]`.
//!
//! | builder | frame |
//! |---------|-------|
//! | [`build_lab_hamiltonian`] | laser frame, `(Δ/2)σz + a†a + (Ω/2)(σ+ e^{iηx} + h.c.)` |
//! | [`build_transformed_hamiltonian`] | after `U`: `(Ω/2)σz + a†a + g x σx + ε σx + g²` |
//! | [`build_bare_rabi_hamiltonian`] | after `V`: `-(Ω/2)σx + a†a + g x σz + ε σz + g²` |
//! | [`build_displaced_hamiltonian`] | same operator in the spin-conditioned displaced bases |
//! | [`build_rwa_hamiltonian`] | rotating-wave form `(Ω/2)σz + a†a + g(aσ+ + a†σ-) + g²` |

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::overlap::{self, OverlapError, OverlapKernel, SeriesKernel};

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// Builds from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value;
    }

    pub fn add_to_diagonal(&mut self, shift: f64) {
        for i in 0..self.dim {
            self.entries[i * self.dim + i] += shift;
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

/// Dense complex Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// Sets `(i, j)` to `value` and `(j, i)` to its conjugate.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        if i == j {
            self.entries[i * self.dim + i] = Complex64::new(value.re, 0.0);
        } else {
            self.entries[i * self.dim + j] = value;
            self.entries[j * self.dim + i] = value.conj();
        }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `[[Re H, -Im H], [Im H, Re H]]`: every eigenvalue of `H` appears twice.
    pub fn real_embedding(&self) -> SymmetricMatrix {
        let d = self.dim;
        let mut m = SymmetricMatrix::zeros(2 * d);
        for i in 0..d {
            for j in i..d {
                let h = self.get(i, j);
                m.set(i, j, h.re);
                m.set(d + i, d + j, h.re);
            }
            for j in 0..d {
                // lower-left block Im H; upper-right is its transpose -Im H^T = -Im H
                m.set(d + i, j, self.get(i, j).im);
            }
        }
        m
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

#[inline]
fn e_index(k: usize) -> usize {
    k
}

#[inline]
fn g_index(n: usize, k: usize) -> usize {
    n + 1 + k
}

/// Eigenproblem for the coefficients of `|φ1> = Σ c_m |m>_A`, `|φ2> = Σ d_m |m>_B`:
///
/// ```text
/// (m + ε) c_m - (Ω/2) Σ_k (-1)^k D_mk d_k = E c_m
/// (m - ε) d_m - (Ω/2) Σ_k (-1)^m D_mk c_k = E d_m
/// ```
///
/// The `g²` of the rotated Hamiltonian is already inside `A†A` and `B†B`.
pub fn build_displaced_hamiltonian(
    params: &ModelParams,
    n: usize,
) -> Result<SymmetricMatrix, OverlapError> {
    build_displaced_hamiltonian_with(&SeriesKernel, params, n)
}

pub fn build_displaced_hamiltonian_with(
    kernel: &dyn OverlapKernel,
    params: &ModelParams,
    n: usize,
) -> Result<SymmetricMatrix, OverlapError> {
    let overlaps = overlap::overlap_matrix_with(kernel, n, params.g())?;
    let eps = params.epsilon();
    let half_omega = 0.5 * params.omega();
    let mut h = SymmetricMatrix::zeros(2 * (n + 1));
    for m in 0..=n {
        h.set(e_index(m), e_index(m), m as f64 + eps);
        h.set(g_index(n, m), g_index(n, m), m as f64 - eps);
        for k in 0..=n {
            // row c_m, column d_k; the mirrored entry row d_k, column c_m is
            // -(Ω/2)(-1)^k D_km, identical since D is symmetric
            h.set(e_index(m), g_index(n, k), -half_omega * overlaps.ab(m, k));
        }
    }
    Ok(h)
}

/// Rotated Hamiltonian `-(Ω/2)σx + a†a + g(a†+a)σz + εσz + g²` in the bare basis.
pub fn build_bare_rabi_hamiltonian(params: &ModelParams, n: usize) -> SymmetricMatrix {
    let g = params.g();
    let eps = params.epsilon();
    let shift = g * g;
    let mut h = SymmetricMatrix::zeros(2 * (n + 1));
    for k in 0..=n {
        let kf = k as f64;
        h.set(e_index(k), e_index(k), kf + eps + shift);
        h.set(g_index(n, k), g_index(n, k), kf - eps + shift);
        h.set(e_index(k), g_index(n, k), -0.5 * params.omega());
        if k < n {
            let x = ((k + 1) as f64).sqrt();
            h.set(e_index(k), e_index(k + 1), g * x);
            h.set(g_index(n, k), g_index(n, k + 1), -g * x);
        }
    }
    h
}

/// Transformed Hamiltonian `(Ω/2)σz + a†a + g(a†+a)σx + εσx + g²` in the bare basis.
pub fn build_transformed_hamiltonian(params: &ModelParams, n: usize) -> SymmetricMatrix {
    let g = params.g();
    let eps = params.epsilon();
    let shift = g * g;
    let half_omega = 0.5 * params.omega();
    let mut h = SymmetricMatrix::zeros(2 * (n + 1));
    for k in 0..=n {
        let kf = k as f64;
        h.set(e_index(k), e_index(k), half_omega + kf + shift);
        h.set(g_index(n, k), g_index(n, k), -half_omega + kf + shift);
        h.set(e_index(k), g_index(n, k), eps);
        if k < n {
            let x = ((k + 1) as f64).sqrt();
            h.set(e_index(k), g_index(n, k + 1), g * x);
            h.set(e_index(k + 1), g_index(n, k), g * x);
        }
    }
    h
}

/// Laser-frame Hamiltonian `(Δ/2)σz + a†a + (Ω/2)(σ+ e^{iηx} + σ- e^{-iηx})`,
/// with `<m|e^{iηx}|k>` from the displacement closed form at `β = iη`.
pub fn build_lab_hamiltonian(params: &ModelParams, n: usize) -> HermitianMatrix {
    let half_omega = 0.5 * params.omega();
    let half_delta = 0.5 * params.delta();
    let beta = Complex64::new(0.0, params.eta());
    let mut h = HermitianMatrix::zeros(2 * (n + 1));
    for m in 0..=n {
        let mf = m as f64;
        h.set(e_index(m), e_index(m), Complex64::new(mf + half_delta, 0.0));
        h.set(
            g_index(n, m),
            g_index(n, m),
            Complex64::new(mf - half_delta, 0.0),
        );
        for k in 0..=n {
            let kick = overlap::displacement_element(beta, m, k);
            h.set(e_index(m), g_index(n, k), kick * half_omega);
        }
    }
    h
}

/// `U = (1/√2) e^{iπ a†a/2} [[F†, F], [-F†, F]]` with `F = exp(iη(a†+a)/2)`,
/// mapping laser-frame states to the transformed frame.
pub fn build_u_matrix(eta: f64, n: usize) -> DMatrix<Complex64> {
    let dim = n + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let half_kick = Complex64::new(0.0, 0.5 * eta);
    let mut u = DMatrix::from_element(2 * dim, 2 * dim, Complex64::new(0.0, 0.0));
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    for m in 0..dim {
        let phase = i_pow[m % 4] * s;
        for k in 0..dim {
            let f = overlap::displacement_element(half_kick, m, k);
            let f_dag = overlap::displacement_element(-half_kick, m, k);
            u[(e_index(m), e_index(k))] = phase * f_dag;
            u[(e_index(m), g_index(n, k))] = phase * f;
            u[(g_index(n, m), e_index(k))] = -phase * f_dag;
            u[(g_index(n, m), g_index(n, k))] = phase * f;
        }
    }
    u
}

/// Spin rotation `V = exp(iπσy/4)` in the `(e, g)` ordering.
pub fn build_v_matrix() -> [[f64; 2]; 2] {
    let c = std::f64::consts::FRAC_PI_4.cos();
    let s = std::f64::consts::FRAC_PI_4.sin();
    [[c, s], [-s, c]]
}

/// Rotating-wave Hamiltonian, block-diagonal in the doublets `{|k,e>, |k+1,g>}`.
pub fn build_rwa_hamiltonian(params: &ModelParams, n: usize) -> SymmetricMatrix {
    let g = params.g();
    let shift = g * g;
    let half_omega = 0.5 * params.omega();
    let mut h = SymmetricMatrix::zeros(2 * (n + 1));
    for k in 0..=n {
        let kf = k as f64;
        h.set(e_index(k), e_index(k), half_omega + kf + shift);
        h.set(g_index(n, k), g_index(n, k), -half_omega + kf + shift);
        if k < n {
            h.set(e_index(k), g_index(n, k + 1), g * ((k + 1) as f64).sqrt());
        }
    }
    h
}

/// Level label of the rotating-wave spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RwaLabel {
    /// The uncoupled `|0, g>`.
    Ground,
    Minus(usize),
    Plus(usize),
}

impl fmt::Display for RwaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RwaLabel::Ground => write!(f, "G"),
            RwaLabel::Minus(k) => write!(f, "E-{k}"),
            RwaLabel::Plus(k) => write!(f, "E+{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaLevel {
    pub label: RwaLabel,
    pub energy: f64,
}

/// Closed-form rotating-wave energies: the ground `-Ω/2 + g²` and the doublets
/// `E±_k = k + g² + 1/2 ± (1/2) sqrt((Ω-1)² + 4g²(k+1))` for `k = 0..=n_max`.
/// At `Ω = 1` the doublets reduce to `(k + g² + 1/2) ± g sqrt(k+1)`.
///
/// Returned in label order: ground, then `E-_0, E+_0, E-_1, ...`.
pub fn rwa_spectrum(params: &ModelParams, n_max: usize) -> Vec<RwaLevel> {
    let g = params.g();
    let detune = params.omega() - 1.0;
    let mut out = Vec::with_capacity(2 * n_max + 3);
    out.push(RwaLevel {
        label: RwaLabel::Ground,
        energy: -0.5 * params.omega() + g * g,
    });
    for k in 0..=n_max {
        let centre = k as f64 + g * g + 0.5;
        let half_split = 0.5 * (detune * detune + 4.0 * g * g * (k + 1) as f64).sqrt();
        out.push(RwaLevel {
            label: RwaLabel::Minus(k),
            energy: centre - half_split,
        });
        out.push(RwaLevel {
            label: RwaLabel::Plus(k),
            energy: centre + half_split,
        });
    }
    out
}

/// [`rwa_spectrum`] sorted by energy; ties put `Ground < Minus < Plus`, then by `k`.
pub fn rwa_spectrum_sorted(params: &ModelParams, n_max: usize) -> Vec<RwaLevel> {
    let mut levels = rwa_spectrum(params, n_max);
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.label.cmp(&b.label)));
    levels
}
