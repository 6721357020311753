//! Name-keyed registries of interchangeable algorithm variants.
//!
//! Overlap kernels and Hamiltonian representations are selected at run time
//! by name (from the command line or a config file).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::hamiltonian::{self, RwaLevel};
use crate::model::ModelParams;
use crate::overlap::{LaguerreKernel, OverlapKernel, SeriesKernel};
use crate::solver::{eigh_symmetric, SolverError};
use crate::states::Frame;

pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any entry already registered under `name`.
    pub fn register(&mut self, name: &'static str, item: Arc<T>) {
        self.entries.insert(name, item);
    }

    pub fn get(&self, name: &str) -> Option<Arc<T>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub const DEFAULT_KERNEL: &str = "series";

pub fn overlap_kernels() -> Registry<dyn OverlapKernel> {
    let mut r: Registry<dyn OverlapKernel> = Registry::new();
    for k in [
        Arc::new(SeriesKernel) as Arc<dyn OverlapKernel>,
        Arc::new(LaguerreKernel) as Arc<dyn OverlapKernel>,
    ] {
        r.register(k.name(), k);
    }
    r
}

/// A matrix representation of the model that can produce its low spectrum
/// at a fixed truncation.
pub trait Representation: Send + Sync {
    fn name(&self) -> &'static str;
    fn frame(&self) -> Frame;
    /// Lowest `levels` eigenvalues, ascending, with Fock cutoff `n`.
    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError>;
}

fn lowest(values: Vec<f64>, levels: usize) -> Vec<f64> {
    values.into_iter().take(levels).collect()
}

pub struct Displaced {
    kernel: Arc<dyn OverlapKernel>,
}

impl Displaced {
    pub fn new(kernel: Arc<dyn OverlapKernel>) -> Self {
        Self { kernel }
    }
}

impl Representation for Displaced {
    fn name(&self) -> &'static str {
        "displaced"
    }

    fn frame(&self) -> Frame {
        Frame::Rotated
    }

    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let h = hamiltonian::build_displaced_hamiltonian_with(self.kernel.as_ref(), params, n)?;
        Ok(lowest(eigh_symmetric(&h)?.eigenvalues, levels))
    }
}

pub struct Bare;

impl Representation for Bare {
    fn name(&self) -> &'static str {
        "bare"
    }

    fn frame(&self) -> Frame {
        Frame::Rotated
    }

    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let h = hamiltonian::build_bare_rabi_hamiltonian(params, n);
        Ok(lowest(eigh_symmetric(&h)?.eigenvalues, levels))
    }
}

pub struct Transformed;

impl Representation for Transformed {
    fn name(&self) -> &'static str {
        "transformed"
    }

    fn frame(&self) -> Frame {
        Frame::Transformed
    }

    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let h = hamiltonian::build_transformed_hamiltonian(params, n);
        Ok(lowest(eigh_symmetric(&h)?.eigenvalues, levels))
    }
}

pub struct Lab;

impl Representation for Lab {
    fn name(&self) -> &'static str {
        "lab"
    }

    fn frame(&self) -> Frame {
        Frame::Lab
    }

    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let h = hamiltonian::build_lab_hamiltonian(params, n).real_embedding();
        // the real embedding doubles every eigenvalue
        let values: Vec<f64> = eigh_symmetric(&h)?
            .eigenvalues
            .into_iter()
            .step_by(2)
            .collect();
        Ok(lowest(values, levels))
    }
}

pub struct Rwa;

impl Representation for Rwa {
    fn name(&self) -> &'static str {
        "rwa"
    }

    fn frame(&self) -> Frame {
        Frame::Rwa
    }

    fn low_spectrum(
        &self,
        params: &ModelParams,
        n: usize,
        levels: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let sorted: Vec<RwaLevel> = hamiltonian::rwa_spectrum_sorted(params, n);
        Ok(lowest(
            sorted.into_iter().map(|l| l.energy).collect(),
            levels,
        ))
    }
}

pub fn representations() -> Registry<dyn Representation> {
    let series: Arc<dyn OverlapKernel> = Arc::new(SeriesKernel);
    let mut r: Registry<dyn Representation> = Registry::new();
    for rep in [
        Arc::new(Displaced::new(series)) as Arc<dyn Representation>,
        Arc::new(Bare),
        Arc::new(Transformed),
        Arc::new(Lab),
        Arc::new(Rwa),
    ] {
        r.register(rep.name(), rep);
    }
    r
}
