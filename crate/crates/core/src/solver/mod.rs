//! Adaptive-truncation eigensolution of the displaced-basis problem.
//!
//! [`solve_spectrum`] grows the truncation `N` along the [`BasisSpec`]
//! schedule until every requested level carries negligible weight on the last
//! basis indices and its energy has stopped moving.

mod eigen;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{eigh_symmetric, EigenDecomposition, EigenError};

use crate::hamiltonian::{self, RwaLabel, RwaLevel};
use crate::model::{BasisSpec, ModelError, ModelParams};
use crate::overlap::{OverlapError, OverlapKernel, SeriesKernel};
use crate::states::{self, StateError};

/// Number of trailing basis indices summed into a level's tail weight.
pub const TAIL_WINDOW: usize = 5;

/// Extra Fock states used when re-expressing a level in the bare basis.
pub const BARE_MARGIN: usize = 30;

const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("levels {unconverged:?} not converged at the hard cap N = {n_final}")]
    ConvergenceFailure {
        best: Box<SpectralResult>,
        unconverged: Vec<usize>,
        n_final: usize,
    },
    #[error("{0}")]
    Domain(String),
}

/// One eigenvector in displaced coordinates: `|φ1> = Σ c_n |n>_A` on the
/// excited spin, `|φ2> = Σ d_n |n>_B` on the ground spin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelVector {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl LevelVector {
    fn from_stacked(v: &[f64]) -> Self {
        let half = v.len() / 2;
        Self {
            c: v[..half].to_vec(),
            d: v[half..].to_vec(),
        }
    }

    /// Highest displaced-basis index.
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().chain(&self.d).map(|x| x * x).sum()
    }

    pub fn c_weight(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    /// `Σ |c_n|² + |d_n|²` over the last [`TAIL_WINDOW`] indices.
    pub fn tail_weight(&self) -> f64 {
        let len = self.c.len();
        let from = len.saturating_sub(TAIL_WINDOW);
        (from..len)
            .map(|i| self.c[i] * self.c[i] + self.d[i] * self.d[i])
            .sum()
    }

    pub fn dot(&self, other: &LevelVector) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a * b).sum::<f64>()
            + self.d.iter().zip(&other.d).map(|(a, b)| a * b).sum::<f64>()
    }

    fn first_significant(&self) -> usize {
        self.c
            .iter()
            .chain(&self.d)
            .position(|x| x.abs() > 1e-8)
            .unwrap_or(0)
    }
}

/// Lowest `levels` eigenpairs at one fixed truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    pub n: usize,
    pub energies: Vec<f64>,
    pub tail_weights: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<LevelVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub params: ModelParams,
    pub basis: BasisSpec,
    pub kernel: String,
    pub n_final: usize,
    pub energies: Vec<f64>,
    pub vectors: Vec<LevelVector>,
    pub tail_weights: Vec<f64>,
    /// `|E(N) - E(N - n_step)|`; unset when only one truncation was visited.
    pub drifts: Vec<Option<f64>>,
    /// Parity `<σx (-1)^{a†a}>` per level, only at zero detuning.
    pub parities: Option<Vec<f64>>,
    pub converged: Vec<bool>,
    /// Every truncation visited, in order.
    pub trace: Vec<TruncationStep>,
}

impl SpectralResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// `E_0 - (-Ω/2 + g²)`: negative when the full ground state lies below the
    /// rotating-wave ground state.
    pub fn ground_gap_vs_rwa(&self) -> f64 {
        let g = self.params.g();
        self.energies[0] - (-0.5 * self.params.omega() + g * g)
    }
}

/// Diagonalizes the displaced-basis matrix at truncation `n` and returns the
/// lowest `levels` pairs, with degenerate clusters in canonical order.
pub fn solve_at_truncation(
    kernel: &dyn OverlapKernel,
    params: &ModelParams,
    n: usize,
    levels: usize,
) -> Result<TruncationStep, SolverError> {
    let h = hamiltonian::build_displaced_hamiltonian_with(kernel, params, n)?;
    let eig = eigh_symmetric(&h)?;
    let take = levels.min(eig.dim);
    let mut pairs: Vec<(f64, LevelVector)> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .map(|(&e, v)| (e, LevelVector::from_stacked(v)))
        .collect();
    order_degenerate(params, &mut pairs, take)?;
    pairs.truncate(take);
    let tail_weights = pairs.iter().map(|(_, v)| v.tail_weight()).collect();
    let (energies, vectors) = pairs.into_iter().unzip();
    Ok(TruncationStep {
        n,
        energies,
        tail_weights,
        vectors,
    })
}

/// Within clusters of equal energy: parity descending (zero detuning only),
/// then excited-spin weight descending, then first significant index.
fn order_degenerate(
    params: &ModelParams,
    pairs: &mut [(f64, LevelVector)],
    upto: usize,
) -> Result<(), SolverError> {
    let mut start = 0;
    while start < upto.min(pairs.len()) {
        let mut end = start + 1;
        while end < pairs.len()
            && (pairs[end].0 - pairs[start].0).abs()
                <= DEGENERACY_TOL * (1.0 + pairs[start].0.abs())
        {
            end += 1;
        }
        if end - start > 1 {
            let mut keyed = Vec::with_capacity(end - start);
            for (e, v) in pairs[start..end].iter() {
                let parity = if params.delta() == 0.0 {
                    parity_expectation(v, params)?
                } else {
                    0.0
                };
                keyed.push((parity, v.c_weight(), v.first_significant(), *e, v.clone()));
            }
            keyed.sort_by(|a, b| {
                b.0.total_cmp(&a.0)
                    .then(b.1.total_cmp(&a.1))
                    .then(a.2.cmp(&b.2))
            });
            for (slot, (_, _, _, e, v)) in pairs[start..end].iter_mut().zip(keyed) {
                *slot = (e, v);
            }
        }
        start = end;
    }
    Ok(())
}

pub fn solve_spectrum(
    params: &ModelParams,
    basis: &BasisSpec,
) -> Result<SpectralResult, SolverError> {
    solve_spectrum_with(&SeriesKernel, params, basis)
}

pub fn solve_spectrum_with(
    kernel: &dyn OverlapKernel,
    params: &ModelParams,
    basis: &BasisSpec,
) -> Result<SpectralResult, SolverError> {
    let params = params.validate()?;
    let basis = basis.validate()?;
    let levels = basis.levels_requested;

    let mut trace: Vec<TruncationStep> = Vec::new();
    let mut drifts: Vec<Option<f64>> = vec![None; levels];
    let mut converged = vec![false; levels];

    for n in basis.schedule() {
        let step = solve_at_truncation(kernel, &params, n, levels)?;
        drifts = match trace.last() {
            Some(prev) => step
                .energies
                .iter()
                .zip(&prev.energies)
                .map(|(e, p)| Some((e - p).abs()))
                .collect(),
            None => vec![None; levels],
        };
        converged = step
            .tail_weights
            .iter()
            .zip(&drifts)
            .map(|(&t, d)| t <= basis.tail_tol && d.is_some_and(|d| d <= basis.drift_tol))
            .collect();
        trace.push(step);
        if converged.iter().all(|&c| c) {
            break;
        }
    }

    let last = trace
        .last()
        .expect("schedule visits at least n_start")
        .clone();
    let parities = if params.delta() == 0.0 {
        Some(
            last.vectors
                .iter()
                .map(|v| parity_expectation(v, &params))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let result = SpectralResult {
        params,
        basis,
        kernel: kernel.name().to_string(),
        n_final: last.n,
        energies: last.energies,
        vectors: last.vectors,
        tail_weights: last.tail_weights,
        drifts,
        parities,
        converged: converged.clone(),
        trace,
    };
    if result.all_converged() {
        Ok(result)
    } else {
        let unconverged = converged
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| i)
            .collect();
        Err(SolverError::ConvergenceFailure {
            n_final: result.n_final,
            best: Box::new(result),
            unconverged,
        })
    }
}

/// `<P>` with `P = σx ⊗ (-1)^{a†a}`, evaluated on the bare-basis image of the
/// level. Only meaningful at zero detuning, where `P` commutes with the
/// Hamiltonian.
pub fn parity_expectation(level: &LevelVector, params: &ModelParams) -> Result<f64, SolverError> {
    if params.delta() != 0.0 {
        return Err(SolverError::Domain(format!(
            "parity is a symmetry only at zero detuning (delta = {})",
            params.delta()
        )));
    }
    let state = states::eigvec_to_bare(level, params.g(), level.n() + BARE_MARGIN)?;
    Ok(states::expect_parity(&state))
}

/// A non-RWA level next to its rotating-wave partner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPairing {
    pub level: usize,
    pub energy: f64,
    /// Ground for level 0; odd excited levels pair with `E-`, even with `E+`.
    pub label: RwaLabel,
    pub rwa_energy: f64,
    pub gap: f64,
    /// Closest rotating-wave level by energy.
    pub nearest_label: RwaLabel,
    pub nearest_energy: f64,
    /// The assigned partner is (one of) the nearest rotating-wave levels.
    pub agrees: bool,
}

/// Partner rule for level `j`: `0 -> G`, `2k+1 -> E-_k`, `2k+2 -> E+_k`.
pub fn partner_label(level: usize) -> RwaLabel {
    match level {
        0 => RwaLabel::Ground,
        j if j % 2 == 1 => RwaLabel::Minus((j - 1) / 2),
        j => RwaLabel::Plus((j - 2) / 2),
    }
}

pub fn classify_levels(result: &SpectralResult, rwa: &[RwaLevel]) -> Vec<LevelPairing> {
    result
        .energies
        .iter()
        .enumerate()
        .filter_map(|(level, &energy)| {
            let label = partner_label(level);
            let partner = rwa.iter().find(|r| r.label == label)?;
            let nearest = rwa
                .iter()
                .min_by(|a, b| {
                    (a.energy - energy)
                        .abs()
                        .total_cmp(&(b.energy - energy).abs())
                        .then(a.label.cmp(&b.label))
                })
                .copied()?;
            Some(LevelPairing {
                level,
                energy,
                label,
                rwa_energy: partner.energy,
                gap: energy - partner.energy,
                nearest_label: nearest.label,
                nearest_energy: nearest.energy,
                agrees: (partner.energy - nearest.energy).abs() <= DEGENERACY_TOL,
            })
        })
        .collect()
}

/// Pairing table against [`hamiltonian::rwa_spectrum`] with enough doublets
/// for every level in `result`.
pub fn pair_with_rwa(result: &SpectralResult) -> Vec<LevelPairing> {
    let n_max = result.energies.len() / 2 + 1;
    classify_levels(result, &hamiltonian::rwa_spectrum(&result.params, n_max))
}
