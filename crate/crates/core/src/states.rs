//! Bare-basis states, frame transforms and spectral time evolution.
//!
//! Amplitudes are stored spin-major, `[ψ(0,e), ..., ψ(n,e), ψ(0,g), ..., ψ(n,g)]`,
//! matching the Hamiltonian builders. Every state carries the frame it is
//! written in; operations that mix frames are rejected.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian;
use crate::model::ModelParams;
use crate::overlap::real_displacement_element;
use crate::solver::{LevelVector, SpectralResult};

/// Norm deficit tolerated when re-expanding displaced states in the bare basis.
pub const NORM_LOSS_TOL: f64 = 1e-6;
/// Minimum weight of the initial state inside the propagated eigenbasis.
pub const COMPLETENESS_TOL: f64 = 1e-8;
const CAT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state norm {norm} below 1 - {tol:e}; truncation too small")]
    NormLoss { norm: f64, tol: f64 },
    #[error("frame mismatch: {left} vs {right}")]
    FrameMismatch { left: Frame, right: Frame },
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("initial state has only {captured} of its weight in the propagated eigenbasis")]
    IncompleteBasis { captured: f64 },
    #[error("zero state cannot be normalized")]
    ZeroNorm,
    #[error("no transform from {from} to {to}")]
    Unsupported { from: Frame, to: Frame },
    #[error("spectral result is not converged")]
    NotConverged,
}

/// Picture in which the amplitudes are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    /// Laser frame before any transformation.
    Lab,
    /// After `U`.
    #[serde(rename = "H_I")]
    Transformed,
    /// After `U` and `V`; the frame of the displaced-basis eigenproblem.
    #[serde(rename = "H_prime")]
    Rotated,
    #[serde(rename = "RWA")]
    Rwa,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Transformed => "H_I",
            Frame::Rotated => "H_prime",
            Frame::Rwa => "RWA",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Excited,
    Ground,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    n: usize,
    amps: Vec<Complex64>,
    frame: Frame,
}

impl QuantumState {
    /// Normalizes `amps` (length `2(n+1)`).
    pub fn from_amplitudes(
        n: usize,
        amps: Vec<Complex64>,
        frame: Frame,
    ) -> Result<Self, StateError> {
        assert_eq!(amps.len(), 2 * (n + 1), "amplitude vector length");
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n, amps, frame })
    }

    /// Keeps `amps` as given; used where the norm itself is the observable.
    fn raw(n: usize, amps: Vec<Complex64>, frame: Frame) -> Self {
        Self { n, amps, frame }
    }

    pub fn fock(n: usize, k: usize, spin: Spin, frame: Frame) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * (n + 1)];
        amps[index(n, k, spin)] = Complex64::new(1.0, 0.0);
        Self { n, amps, frame }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, k: usize, spin: Spin) -> Complex64 {
        self.amps[index(self.n, k, spin)]
    }

    pub fn excited(&self) -> &[Complex64] {
        &self.amps[..=self.n]
    }

    pub fn ground(&self) -> &[Complex64] {
        &self.amps[self.n + 1..]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64, StateError> {
        check_compatible(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Copy with the global phase fixed: first non-negligible amplitude real positive.
    pub fn with_canonical_phase(&self) -> Self {
        let mut out = self.clone();
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-14) {
            let phase = first.conj() / first.norm();
            out.amps.iter_mut().for_each(|a| *a *= phase);
        }
        out
    }
}

#[inline]
fn index(n: usize, k: usize, spin: Spin) -> usize {
    match spin {
        Spin::Excited => k,
        Spin::Ground => n + 1 + k,
    }
}

fn check_compatible(a: &QuantumState, b: &QuantumState) -> Result<(), StateError> {
    if a.frame != b.frame {
        return Err(StateError::FrameMismatch {
            left: a.frame,
            right: b.frame,
        });
    }
    if a.n != b.n {
        return Err(StateError::TruncationMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(())
}

/// `<k|D(beta)|j>` for `k <= n_bare`, `j <= n_disp`, row-major.
fn displacement_table(beta: f64, n_bare: usize, n_disp: usize) -> Vec<f64> {
    let cols = n_disp + 1;
    let mut t = vec![0.0; (n_bare + 1) * cols];
    for k in 0..=n_bare {
        for j in 0..cols {
            t[k * cols + j] = real_displacement_element(beta, k, j);
        }
    }
    t
}

/// Maps displaced-basis coefficients to Fock amplitudes and back.
///
/// `<k|n>_A = <k|D(-g)|n>` and `<k|n>_B = <k|D(g)|n>`.
#[derive(Debug, Clone)]
pub struct BareMap {
    n_disp: usize,
    n_bare: usize,
    to_a: Vec<f64>,
    to_b: Vec<f64>,
}

impl BareMap {
    pub fn new(g: f64, n_disp: usize, n_bare: usize) -> Self {
        Self {
            n_disp,
            n_bare,
            to_a: displacement_table(-g, n_bare, n_disp),
            to_b: displacement_table(g, n_bare, n_disp),
        }
    }

    fn apply_table(&self, table: &[f64], coeffs: &[f64]) -> Vec<f64> {
        let cols = self.n_disp + 1;
        (0..=self.n_bare)
            .map(|k| {
                table[k * cols..(k + 1) * cols]
                    .iter()
                    .zip(coeffs)
                    .map(|(t, c)| t * c)
                    .sum()
            })
            .collect()
    }

    /// Bare amplitudes of a displaced-basis level; not renormalized.
    pub fn to_bare_raw(&self, level: &LevelVector) -> Vec<Complex64> {
        assert_eq!(level.n(), self.n_disp, "level truncation");
        self.apply_table(&self.to_a, &level.c)
            .into_iter()
            .chain(self.apply_table(&self.to_b, &level.d))
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    }

    pub fn to_bare(&self, level: &LevelVector) -> Result<QuantumState, StateError> {
        let amps = self.to_bare_raw(level);
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1.0 - NORM_LOSS_TOL {
            return Err(StateError::NormLoss {
                norm,
                tol: NORM_LOSS_TOL,
            });
        }
        QuantumState::from_amplitudes(self.n_bare, amps, Frame::Rotated)
    }

    /// Displaced-basis coefficients `(c, d)` of a bare state in the rotated frame.
    pub fn to_displaced(
        &self,
        state: &QuantumState,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>), StateError> {
        if state.frame != Frame::Rotated {
            return Err(StateError::FrameMismatch {
                left: state.frame,
                right: Frame::Rotated,
            });
        }
        if state.n != self.n_bare {
            return Err(StateError::TruncationMismatch {
                left: state.n,
                right: self.n_bare,
            });
        }
        let cols = self.n_disp + 1;
        let project = |table: &[f64], amps: &[Complex64]| -> Vec<Complex64> {
            (0..cols)
                .map(|j| {
                    (0..=self.n_bare)
                        .map(|k| amps[k] * table[k * cols + j])
                        .sum()
                })
                .collect()
        };
        Ok((
            project(&self.to_a, state.excited()),
            project(&self.to_b, state.ground()),
        ))
    }
}

/// Bare-basis image of a displaced-basis level, in the rotated frame.
pub fn eigvec_to_bare(
    level: &LevelVector,
    g: f64,
    n_bare: usize,
) -> Result<QuantumState, StateError> {
    BareMap::new(g, level.n(), n_bare).to_bare(level)
}

/// `|g> -> (|g> + |e>)/√2`, `|e> -> (|g> - |e>)/√2` on every Fock index.
pub fn hadamard_on_spin(state: &QuantumState) -> QuantumState {
    let n = state.n;
    let mut amps = state.amps.clone();
    for k in 0..=n {
        let e = state.amps[k];
        let g = state.amps[n + 1 + k];
        amps[k] = (g - e) * FRAC_1_SQRT_2;
        amps[n + 1 + k] = (g + e) * FRAC_1_SQRT_2;
    }
    QuantumState::raw(n, amps, state.frame)
}

/// `(1/2){[D†(g)|0> + D†(-g)|0>]|g> - [D†(g)|0> - D†(-g)|0>]|e>}` in the rotated frame.
pub fn ideal_cat_state(g: f64, n: usize) -> Result<QuantumState, StateError> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * (n + 1)];
    for k in 0..=n {
        // D†(g)|0> = D(-g)|0>
        let minus = real_displacement_element(-g, k, 0);
        let plus = real_displacement_element(g, k, 0);
        amps[k] = Complex64::new(-0.5 * (minus - plus), 0.0);
        amps[n + 1 + k] = Complex64::new(0.5 * (minus + plus), 0.0);
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr < 1.0 - CAT_TAIL_TOL {
        return Err(StateError::NormLoss {
            norm: norm_sqr.sqrt(),
            tol: CAT_TAIL_TOL,
        });
    }
    QuantumState::from_amplitudes(n, amps, Frame::Rotated)
}

/// `|<a|b>|²`, clamped to `[0, 1]` against rounding for normalized inputs.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64, StateError> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

pub fn expect_sigma_z(state: &QuantumState) -> f64 {
    let e: f64 = state.excited().iter().map(|a| a.norm_sqr()).sum();
    let g: f64 = state.ground().iter().map(|a| a.norm_sqr()).sum();
    e - g
}

pub fn expect_sigma_x(state: &QuantumState) -> f64 {
    2.0 * state
        .excited()
        .iter()
        .zip(state.ground())
        .map(|(e, g)| (e.conj() * g).re)
        .sum::<f64>()
}

pub fn expect_number(state: &QuantumState) -> f64 {
    state
        .excited()
        .iter()
        .zip(state.ground())
        .enumerate()
        .map(|(k, (e, g))| k as f64 * (e.norm_sqr() + g.norm_sqr()))
        .sum()
}

/// `<σx (-1)^{a†a}>`.
pub fn expect_parity(state: &QuantumState) -> f64 {
    2.0 * state
        .excited()
        .iter()
        .zip(state.ground())
        .enumerate()
        .map(|(k, (e, g))| {
            let v = (e.conj() * g).re;
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .sum::<f64>()
}

/// `<H'>` in the bare basis, applying the rotated Hamiltonian directly.
pub fn energy_expectation(state: &QuantumState, params: &ModelParams) -> Result<f64, StateError> {
    if state.frame != Frame::Rotated {
        return Err(StateError::FrameMismatch {
            left: state.frame,
            right: Frame::Rotated,
        });
    }
    let n = state.n;
    let g = params.g();
    let eps = params.epsilon();
    let half_omega = 0.5 * params.omega();
    let e = state.excited();
    let gr = state.ground();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let kf = k as f64;
        let mut he = e[k] * (kf + eps + g * g) - gr[k] * half_omega;
        let mut hg = gr[k] * (kf - eps + g * g) - e[k] * half_omega;
        if k > 0 {
            let x = (k as f64).sqrt();
            he += e[k - 1] * (g * x);
            hg -= gr[k - 1] * (g * x);
        }
        if k < n {
            let x = ((k + 1) as f64).sqrt();
            he += e[k + 1] * (g * x);
            hg -= gr[k + 1] * (g * x);
        }
        acc += e[k].conj() * he + gr[k].conj() * hg;
    }
    Ok(acc.re)
}

fn apply_spin_rotation(state: &QuantumState, r: [[f64; 2]; 2], frame: Frame) -> QuantumState {
    let n = state.n;
    let mut amps = state.amps.clone();
    for k in 0..=n {
        let e = state.amps[k];
        let g = state.amps[n + 1 + k];
        amps[k] = e * r[0][0] + g * r[0][1];
        amps[n + 1 + k] = e * r[1][0] + g * r[1][1];
    }
    QuantumState::raw(n, amps, frame)
}

fn transpose(r: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[r[0][0], r[1][0]], [r[0][1], r[1][1]]]
}

/// Moves a state between the lab, transformed and rotated frames with the
/// truncated `U` and `V`. Amplitudes near the truncation edge are only
/// approximately mapped.
pub fn transform_frame(
    state: &QuantumState,
    target: Frame,
    eta: f64,
) -> Result<QuantumState, StateError> {
    use Frame::*;
    let v = hamiltonian::build_v_matrix();
    let apply_u = |s: &QuantumState, adjoint: bool, frame: Frame| {
        let u = hamiltonian::build_u_matrix(eta, s.n);
        let u = if adjoint { u.adjoint() } else { u };
        let out = u * DVector::from_column_slice(&s.amps);
        QuantumState::raw(s.n, out.iter().copied().collect(), frame)
    };
    match (state.frame, target) {
        (a, b) if a == b => Ok(state.clone()),
        (Lab, Transformed) => Ok(apply_u(state, false, Transformed)),
        (Transformed, Lab) => Ok(apply_u(state, true, Lab)),
        (Transformed, Rotated) => Ok(apply_spin_rotation(state, v, Rotated)),
        (Rotated, Transformed) => Ok(apply_spin_rotation(state, transpose(v), Transformed)),
        (Lab, Rotated) => transform_frame(&apply_u(state, false, Transformed), Rotated, eta),
        (Rotated, Lab) => transform_frame(
            &apply_spin_rotation(state, transpose(v), Transformed),
            Lab,
            eta,
        ),
        (from, to) => Err(StateError::Unsupported { from, to }),
    }
}

/// `|ψ(t)> = Σ_i exp(-i E_i t) |E_i><E_i|ψ(0)>` over the levels of a converged
/// spectral result.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    n: usize,
    energies: Vec<f64>,
    eigenstates: Vec<Vec<Complex64>>,
    weights: Vec<Complex64>,
    captured: f64,
}

impl SpectralPropagator {
    pub fn new(result: &SpectralResult, initial: &QuantumState) -> Result<Self, StateError> {
        if initial.frame != Frame::Rotated {
            return Err(StateError::FrameMismatch {
                left: initial.frame,
                right: Frame::Rotated,
            });
        }
        if !result.all_converged() {
            return Err(StateError::NotConverged);
        }
        let map = BareMap::new(result.params.g(), result.n_final, initial.n);
        let mut eigenstates = Vec::with_capacity(result.vectors.len());
        let mut weights = Vec::with_capacity(result.vectors.len());
        for level in &result.vectors {
            let v = map.to_bare_raw(level);
            let w: Complex64 = v.iter().zip(&initial.amps).map(|(a, b)| a.conj() * b).sum();
            eigenstates.push(v);
            weights.push(w);
        }
        let captured: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
        if captured < 1.0 - COMPLETENESS_TOL {
            return Err(StateError::IncompleteBasis { captured });
        }
        Ok(Self {
            n: initial.n,
            energies: result.energies.clone(),
            eigenstates,
            weights,
            captured,
        })
    }

    /// `Σ_i |<E_i|ψ(0)>|²`.
    pub fn captured_weight(&self) -> f64 {
        self.captured
    }

    pub fn state_at(&self, t: f64) -> QuantumState {
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * (self.n + 1)];
        for ((e, v), w) in self
            .energies
            .iter()
            .zip(&self.eigenstates)
            .zip(&self.weights)
        {
            let coeff = w * Complex64::from_polar(1.0, -e * t);
            for (a, x) in amps.iter_mut().zip(v) {
                *a += coeff * x;
            }
        }
        QuantumState::raw(self.n, amps, Frame::Rotated)
    }
}

pub fn evolve(
    initial: &QuantumState,
    result: &SpectralResult,
    t: f64,
) -> Result<QuantumState, StateError> {
    Ok(SpectralPropagator::new(result, initial)?.state_at(t))
}
