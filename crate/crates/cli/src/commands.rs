//! Subcommand bodies. Each returns a [`Report`] holding the serialized
//! payload; writing and manifests happen in [`crate::run`].

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use rabi_core::hamiltonian::{rwa_spectrum, RwaLabel};
use rabi_core::overlap::OverlapError;
use rabi_core::solver::{
    pair_with_rwa, solve_at_truncation, LevelPairing, TruncationStep, BARE_MARGIN,
};
use rabi_core::states::{
    eigvec_to_bare, energy_expectation, expect_number, expect_sigma_x, expect_sigma_z, fidelity,
    hadamard_on_spin, ideal_cat_state, SpectralPropagator,
};
use rabi_core::{
    overlap_kernels, representations, BasisSpec, Frame, ModelParams, OverlapKernel, QuantumState,
    SolverError, SpectralResult, StateError,
};

use crate::args::{
    CatArgs, CompareRwaArgs, ConvergeArgs, EvolveArgs, Format, Initial, SpectrumArgs, SweepArgs,
    SweepParam,
};
use crate::output::{to_json, Cell, PointConvergence, Table, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;

pub const THREADS_ENV: &str = "RABI_SPECTRA_THREADS";

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match &e {
            SolverError::Model(_) | SolverError::Overlap(OverlapError::OutOfDomain { .. }) => {
                CliError::usage(e.to_string())
            }
            SolverError::State(s) => s.clone().into(),
            _ => CliError::numeric(e.to_string()),
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        let exit_code = match e {
            StateError::IncompleteBasis { .. } => EXIT_INCOMPLETE,
            _ => EXIT_NUMERIC,
        };
        Self {
            exit_code,
            message: e.to_string(),
        }
    }
}

impl From<rabi_core::ModelError> for CliError {
    fn from(e: rabi_core::ModelError) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Serialized output of one command, plus what the manifest needs.
#[derive(Debug)]
pub struct Report {
    pub payload: String,
    /// Additional files requested on the command line.
    pub extra: Vec<(PathBuf, String)>,
    pub parameters: serde_json::Value,
    pub basis: Option<BasisSpec>,
    pub kernel: String,
    pub convergence: Vec<PointConvergence>,
    pub exit_code: i32,
}

impl Report {
    fn new(payload: String, parameters: serde_json::Value, kernel: &str) -> Self {
        Self {
            payload,
            extra: Vec::new(),
            parameters,
            basis: None,
            kernel: kernel.to_string(),
            convergence: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    fn with_points(mut self, basis: BasisSpec, points: &[(Option<f64>, &SpectralResult)]) -> Self {
        self.basis = Some(basis);
        self.convergence = points
            .iter()
            .map(|(at, r)| PointConvergence {
                at: *at,
                n_final: r.n_final,
                converged: r.converged.clone(),
            })
            .collect();
        if points.iter().any(|(_, r)| !r.all_converged()) {
            self.exit_code = EXIT_NUMERIC;
        }
        self
    }
}

fn kernel(name: &str) -> Result<Arc<dyn OverlapKernel>, CliError> {
    let registry = overlap_kernels();
    registry.get(name).ok_or_else(|| {
        CliError::usage(format!(
            "unknown kernel `{name}`; available: {}",
            registry.names().join(", ")
        ))
    })
}

/// Pool sized from [`THREADS_ENV`]; one thread when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            })?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError {
            exit_code: EXIT_INTERNAL,
            message: e.to_string(),
        })
}

/// Solves one point; a convergence failure yields the best partial result.
fn solve(
    kernel: &dyn OverlapKernel,
    params: &ModelParams,
    basis: &BasisSpec,
) -> Result<SpectralResult, CliError> {
    match rabi_core::solve_spectrum_with(kernel, params, basis) {
        Ok(r) => Ok(r),
        Err(SolverError::ConvergenceFailure { best, .. }) => Ok(*best),
        Err(e) => Err(e.into()),
    }
}

fn point_json(params: &ModelParams) -> serde_json::Value {
    json!({
        "omega": params.omega(),
        "eta": params.eta(),
        "delta": params.delta(),
        "g": params.g(),
        "epsilon": params.epsilon(),
    })
}

fn meta_params(table: &mut Table, params: &ModelParams) {
    table.meta("omega", crate::format::g17(params.omega()));
    table.meta("eta", crate::format::g17(params.eta()));
    table.meta("delta", crate::format::g17(params.delta()));
}

fn rwa_available(params: &ModelParams) -> bool {
    params.delta() == 0.0
}

#[derive(Serialize)]
struct CrossCheck {
    representation: String,
    n: usize,
    energies: Vec<f64>,
    max_abs_diff: f64,
}

#[derive(Serialize)]
struct SpectrumDoc<'a> {
    schema: u32,
    #[serde(flatten)]
    result: &'a SpectralResult,
    all_converged: bool,
    ground_gap_vs_rwa: Option<f64>,
    rwa: Option<Vec<LevelPairing>>,
    cross_check: Option<CrossCheck>,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Report, CliError> {
    let params = args.point.params()?;
    let basis = args.basis.spec()?;
    let kernel = kernel(&args.basis.kernel)?;
    let rep = match &args.cross_check {
        Some(name) => {
            let registry = representations();
            Some(registry.get(name).ok_or_else(|| {
                CliError::usage(format!(
                    "unknown representation `{name}`; available: {}",
                    registry.names().join(", ")
                ))
            })?)
        }
        None => None,
    };

    let result = solve(kernel.as_ref(), &params, &basis)?;
    let rwa = rwa_available(&params).then(|| pair_with_rwa(&result));
    let cross = match rep {
        Some(rep) => {
            let energies = rep.low_spectrum(&params, args.cross_check_n, result.energies.len())?;
            let max_abs_diff = energies
                .iter()
                .zip(&result.energies)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Some(CrossCheck {
                representation: rep.name().to_string(),
                n: args.cross_check_n,
                energies,
                max_abs_diff,
            })
        }
        None => None,
    };

    let payload = match args.output.format {
        Format::Json => to_json(&SpectrumDoc {
            schema: SCHEMA_VERSION,
            result: &result,
            all_converged: result.all_converged(),
            ground_gap_vs_rwa: rwa.as_ref().map(|_| result.ground_gap_vs_rwa()),
            rwa: rwa.clone(),
            cross_check: cross,
        }),
        Format::Csv => {
            let mut header = vec![
                "level",
                "energy",
                "tail_weight",
                "drift",
                "converged",
                "parity",
                "rwa_label",
                "rwa_energy",
                "gap",
            ];
            if cross.is_some() {
                header.extend(["cross_check_energy", "cross_check_diff"]);
            }
            let mut t = Table::new(header);
            meta_params(&mut t, &params);
            t.meta("n_final", result.n_final.to_string());
            t.meta("kernel", result.kernel.clone());
            if rwa.is_some() {
                t.meta(
                    "ground_gap_vs_rwa",
                    crate::format::g17(result.ground_gap_vs_rwa()),
                );
            }
            if let Some(c) = &cross {
                t.meta("cross_check", format!("{}@{}", c.representation, c.n));
            }
            for (i, &e) in result.energies.iter().enumerate() {
                let parity = result.parities.as_ref().map(|p| p[i]);
                let pair = rwa.as_ref().and_then(|r| r.iter().find(|p| p.level == i));
                let mut row: Vec<Cell> = vec![
                    i.into(),
                    e.into(),
                    result.tail_weights[i].into(),
                    result.drifts[i].into(),
                    result.converged[i].into(),
                    parity.into(),
                    pair.map_or(Cell::Empty, |p| p.label.to_string().into()),
                    pair.map(|p| p.rwa_energy).into(),
                    pair.map(|p| p.gap).into(),
                ];
                if let Some(c) = &cross {
                    row.push(c.energies.get(i).copied().into());
                    row.push(c.energies.get(i).map(|x| x - e).into());
                }
                t.push(row);
            }
            t.to_csv()
        }
    };
    Ok(Report::new(payload, point_json(&params), kernel.name())
        .with_points(basis, &[(None, &result)]))
}

#[derive(Serialize)]
struct RwaPoint {
    eta: f64,
    ground_gap_vs_rwa: f64,
    /// `E-_0(RWA) - E_0`.
    offset_to_rwa_minus0: f64,
    /// `(offset_to_rwa_minus0 - 1) / eta`.
    x_coefficient: Option<f64>,
    converged: bool,
    pairs: Vec<LevelPairing>,
}

fn rwa_point(result: &SpectralResult) -> RwaPoint {
    let p = &result.params;
    let minus0 = rwa_spectrum(p, 0)
        .into_iter()
        .find(|l| l.label == RwaLabel::Minus(0))
        .expect("doublet 0 present")
        .energy;
    let offset = minus0 - result.energies[0];
    RwaPoint {
        eta: p.eta(),
        ground_gap_vs_rwa: result.ground_gap_vs_rwa(),
        offset_to_rwa_minus0: offset,
        x_coefficient: (p.eta() > 0.0).then(|| (offset - 1.0) / p.eta()),
        converged: result.all_converged(),
        pairs: pair_with_rwa(result),
    }
}

pub fn compare_rwa(args: &CompareRwaArgs) -> Result<Report, CliError> {
    let etas = args
        .eta_list
        .clone()
        .unwrap_or_else(|| vec![args.point.eta]);
    if etas.is_empty() {
        return Err(CliError::usage("--eta-list is empty"));
    }
    let points: Vec<ModelParams> = etas
        .iter()
        .map(|&eta| ModelParams::new(args.point.omega, eta, args.point.delta))
        .collect::<Result<_, _>>()?;
    if !rwa_available(&points[0]) {
        return Err(CliError::usage(
            "the rotating-wave comparison needs --delta 0",
        ));
    }
    let basis = args.basis.spec()?;
    let kernel = kernel(&args.basis.kernel)?;
    let pool = thread_pool()?;
    let results: Vec<SpectralResult> = pool.install(|| {
        points
            .par_iter()
            .map(|p| solve(kernel.as_ref(), p, &basis))
            .collect::<Result<_, _>>()
    })?;
    let rows: Vec<RwaPoint> = results.iter().map(rwa_point).collect();

    let payload = match args.output.format {
        Format::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "omega": args.point.omega,
            "delta": args.point.delta,
            "points": rows,
        })),
        Format::Csv => {
            let mut t = Table::new(vec![
                "eta",
                "level",
                "energy",
                "rwa_label",
                "rwa_energy",
                "gap",
                "nearest_label",
                "nearest_energy",
                "agrees",
                "offset_to_rwa_minus0",
                "x_coefficient",
            ]);
            t.meta("omega", crate::format::g17(args.point.omega));
            t.meta("delta", crate::format::g17(args.point.delta));
            for pt in &rows {
                for pair in &pt.pairs {
                    let first = pair.level == 0;
                    t.push(vec![
                        pt.eta.into(),
                        pair.level.into(),
                        pair.energy.into(),
                        pair.label.to_string().into(),
                        pair.rwa_energy.into(),
                        pair.gap.into(),
                        pair.nearest_label.to_string().into(),
                        pair.nearest_energy.into(),
                        pair.agrees.into(),
                        if first {
                            pt.offset_to_rwa_minus0.into()
                        } else {
                            Cell::Empty
                        },
                        if first {
                            pt.x_coefficient.into()
                        } else {
                            Cell::Empty
                        },
                    ]);
                }
            }
            t.to_csv()
        }
    };
    let at: Vec<(Option<f64>, &SpectralResult)> =
        results.iter().map(|r| (Some(r.params.eta()), r)).collect();
    let parameters = json!({ "omega": args.point.omega, "delta": args.point.delta, "eta": etas });
    Ok(Report::new(payload, parameters, kernel.name()).with_points(basis, &at))
}

pub fn sweep(args: &SweepArgs) -> Result<Report, CliError> {
    let plan = args.plan().map_err(CliError::usage)?;
    let grid = plan.grid();
    let points: Vec<ModelParams> = grid
        .iter()
        .map(|&v| plan.params_at(v))
        .collect::<Result<_, _>>()?;
    let basis = args.basis.spec()?;
    let kernel = kernel(&args.basis.kernel)?;
    let pool = thread_pool()?;
    let results: Vec<SpectralResult> = pool.install(|| {
        points
            .par_iter()
            .map(|p| solve(kernel.as_ref(), p, &basis))
            .collect::<Result<_, _>>()
    })?;
    let with_rwa = plan.param == SweepParam::Eta && rwa_available(&points[0]);

    #[derive(Serialize)]
    struct Row {
        param: f64,
        level: usize,
        energy: f64,
        parity: Option<f64>,
        rwa_label: Option<String>,
        rwa_energy: Option<f64>,
        gap: Option<f64>,
        converged: bool,
    }
    let mut rows = Vec::new();
    for (&value, r) in grid.iter().zip(&results) {
        let pairs = with_rwa.then(|| pair_with_rwa(r));
        for (i, &e) in r.energies.iter().enumerate() {
            let pair = pairs
                .as_ref()
                .and_then(|ps| ps.iter().find(|p| p.level == i));
            rows.push(Row {
                param: value,
                level: i,
                energy: e,
                parity: r.parities.as_ref().map(|p| p[i]),
                rwa_label: pair.map(|p| p.label.to_string()),
                rwa_energy: pair.map(|p| p.rwa_energy),
                gap: pair.map(|p| p.gap),
                converged: r.converged[i],
            });
        }
    }

    let payload = match args.output.format {
        Format::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "swept": plan.param.name(),
            "omega": plan.omega,
            "eta": plan.eta,
            "delta": plan.delta,
            "rows": rows,
        })),
        Format::Csv => {
            let mut t = Table::new(vec![
                "param",
                "level",
                "energy",
                "parity",
                "rwa_label",
                "rwa_energy",
                "gap",
                "converged",
            ]);
            t.meta("swept", plan.param.name());
            t.meta("omega", crate::format::g17(plan.omega));
            match plan.param {
                SweepParam::Eta => t.meta("delta", crate::format::g17(plan.delta)),
                SweepParam::Delta => t.meta("eta", crate::format::g17(plan.eta)),
            }
            for r in rows {
                t.push(vec![
                    r.param.into(),
                    r.level.into(),
                    r.energy.into(),
                    r.parity.into(),
                    r.rwa_label.map_or(Cell::Empty, Cell::Text),
                    r.rwa_energy.into(),
                    r.gap.into(),
                    r.converged.into(),
                ]);
            }
            t.to_csv()
        }
    };
    let parameters = json!({
        "swept": plan.param.name(),
        "from": plan.from,
        "to": plan.to,
        "steps": plan.steps,
        "omega": plan.omega,
        "eta": plan.eta,
        "delta": plan.delta,
        "preset": args.preset.map(|p| format!("{p:?}").to_lowercase()),
    });
    let at: Vec<(Option<f64>, &SpectralResult)> =
        grid.iter().map(|&v| Some(v)).zip(&results).collect();
    Ok(Report::new(payload, parameters, kernel.name()).with_points(basis, &at))
}

pub fn converge(args: &ConvergeArgs) -> Result<Report, CliError> {
    let params = args.point.params()?;
    let kernel = kernel(&args.kernel)?;
    if args.levels == 0 {
        return Err(CliError::usage("--levels must be >= 1"));
    }
    if let Some(&n) = args.n_list.iter().find(|&&n| n + 1 < args.levels) {
        return Err(CliError::usage(format!(
            "truncation {n} holds fewer than {} levels",
            args.levels
        )));
    }
    let steps: Vec<TruncationStep> = args
        .n_list
        .iter()
        .map(|&n| solve_at_truncation(kernel.as_ref(), &params, n, args.levels))
        .collect::<Result<_, _>>()?;

    let drifts: Vec<Vec<Option<f64>>> = steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.energies
                .iter()
                .enumerate()
                .map(|(k, e)| i.checked_sub(1).map(|p| (e - steps[p].energies[k]).abs()))
                .collect()
        })
        .collect();

    let payload = match args.output.format {
        Format::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "params": point_json(&params),
            "kernel": kernel.name(),
            "steps": steps,
            "drifts": drifts,
        })),
        Format::Csv => {
            let mut t = Table::new(vec!["n", "level", "energy", "tail_weight", "drift"]);
            meta_params(&mut t, &params);
            t.meta("kernel", kernel.name());
            for (s, d) in steps.iter().zip(&drifts) {
                for k in 0..s.energies.len() {
                    t.push(vec![
                        s.n.into(),
                        k.into(),
                        s.energies[k].into(),
                        s.tail_weights[k].into(),
                        d[k].into(),
                    ]);
                }
            }
            t.to_csv()
        }
    };
    let mut parameters = point_json(&params);
    parameters["n_list"] = json!(args.n_list);
    parameters["levels"] = json!(args.levels);
    Ok(Report::new(payload, parameters, kernel.name()))
}

struct CatPoint {
    params: ModelParams,
    result: SpectralResult,
    n_bare: usize,
    cat: QuantumState,
    rotated_ground: QuantumState,
    fidelity: f64,
}

fn cat_point(
    kernel: &dyn OverlapKernel,
    params: ModelParams,
    basis: &BasisSpec,
) -> Result<CatPoint, CliError> {
    let result = solve(kernel, &params, basis)?;
    let n_bare = result.n_final + BARE_MARGIN;
    let ground = eigvec_to_bare(&result.vectors[0], params.g(), n_bare)?;
    let rotated_ground = hadamard_on_spin(&ground);
    let cat = ideal_cat_state(params.g(), n_bare)?;
    let fidelity = fidelity(&cat, &rotated_ground)?;
    Ok(CatPoint {
        params,
        result,
        n_bare,
        cat,
        rotated_ground,
        fidelity,
    })
}

fn amplitude_table(pt: &CatPoint) -> Table {
    let mut t = Table::new(vec![
        "k",
        "spin",
        "cat_re",
        "cat_im",
        "hadamard_ground_re",
        "hadamard_ground_im",
    ]);
    meta_params(&mut t, &pt.params);
    t.meta("frame", Frame::Rotated.to_string());
    let cat = pt.cat.with_canonical_phase();
    let hg = pt.rotated_ground.with_canonical_phase();
    for (spin_name, spin) in [
        ("e", rabi_core::Spin::Excited),
        ("g", rabi_core::Spin::Ground),
    ] {
        for k in 0..=pt.n_bare {
            let a = cat.amp(k, spin);
            let b = hg.amp(k, spin);
            t.push(vec![
                k.into(),
                spin_name.into(),
                a.re.into(),
                a.im.into(),
                b.re.into(),
                b.im.into(),
            ]);
        }
    }
    t
}

fn amplitude_json(pt: &CatPoint) -> serde_json::Value {
    let pairs = |s: &QuantumState| -> Vec<[f64; 2]> {
        s.amplitudes().iter().map(|a| [a.re, a.im]).collect()
    };
    json!({
        "schema": SCHEMA_VERSION,
        "frame": Frame::Rotated,
        "layout": "excited spin k=0..n, then ground spin k=0..n",
        "n": pt.n_bare,
        "params": point_json(&pt.params),
        "cat": pairs(&pt.cat.with_canonical_phase()),
        "hadamard_ground": pairs(&pt.rotated_ground.with_canonical_phase()),
    })
}

pub fn cat(args: &CatArgs) -> Result<Report, CliError> {
    let etas = args
        .eta_list
        .clone()
        .unwrap_or_else(|| vec![args.point.eta]);
    if etas.is_empty() {
        return Err(CliError::usage("--eta-list is empty"));
    }
    let points: Vec<ModelParams> = etas
        .iter()
        .map(|&eta| ModelParams::new(args.point.omega, eta, args.point.delta))
        .collect::<Result<_, _>>()?;
    let basis = args.basis.spec()?;
    let kernel = kernel(&args.basis.kernel)?;
    let pool = thread_pool()?;
    let cats: Vec<CatPoint> = pool.install(|| {
        points
            .par_iter()
            .map(|&p| cat_point(kernel.as_ref(), p, &basis))
            .collect::<Result<_, _>>()
    })?;

    let payload = match args.output.format {
        Format::Json => {
            let rows: Vec<_> = cats
                .iter()
                .map(|c| {
                    json!({
                        "params": point_json(&c.params),
                        "n_final": c.result.n_final,
                        "n_bare": c.n_bare,
                        "cat_norm": c.cat.norm(),
                        "hadamard_ground_norm": c.rotated_ground.norm(),
                        "fidelity": c.fidelity,
                        "converged": c.result.all_converged(),
                    })
                })
                .collect();
            to_json(&json!({ "schema": SCHEMA_VERSION, "frame": Frame::Rotated, "points": rows }))
        }
        Format::Csv => {
            let mut t = Table::new(vec![
                "omega",
                "eta",
                "delta",
                "g",
                "n_final",
                "n_bare",
                "cat_norm",
                "hadamard_ground_norm",
                "fidelity",
                "converged",
            ]);
            t.meta("frame", Frame::Rotated.to_string());
            for c in &cats {
                t.push(vec![
                    c.params.omega().into(),
                    c.params.eta().into(),
                    c.params.delta().into(),
                    c.params.g().into(),
                    c.result.n_final.into(),
                    c.n_bare.into(),
                    c.cat.norm().into(),
                    c.rotated_ground.norm().into(),
                    c.fidelity.into(),
                    c.result.all_converged().into(),
                ]);
            }
            t.to_csv()
        }
    };
    let parameters = json!({ "omega": args.point.omega, "delta": args.point.delta, "eta": etas });
    let at: Vec<(Option<f64>, &SpectralResult)> = cats
        .iter()
        .map(|c| (Some(c.params.eta()), &c.result))
        .collect();
    let mut report = Report::new(payload, parameters, kernel.name()).with_points(basis, &at);
    if let Some(path) = &args.amplitudes {
        let body = match args.output.format {
            Format::Json => to_json(&amplitude_json(&cats[0])),
            Format::Csv => amplitude_table(&cats[0]).to_csv(),
        };
        report.extra.push((path.clone(), body));
    }
    Ok(report)
}

pub fn evolve(args: &EvolveArgs) -> Result<Report, CliError> {
    let params = args.point.params()?;
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(CliError::usage("--dt must be finite and > 0"));
    }
    if !(args.t_max >= 0.0 && args.t_max.is_finite()) {
        return Err(CliError::usage("--t-max must be finite and >= 0"));
    }
    let basis = BasisSpec::default().with_levels(args.levels).validate()?;
    let kernel = kernel(&args.kernel)?;
    let result = solve(kernel.as_ref(), &params, &basis)?;
    if !result.all_converged() {
        return Err(CliError::numeric(format!(
            "spectrum not converged at N = {}; no time series written",
            result.n_final
        )));
    }
    let n_bare = result.n_final + BARE_MARGIN;
    let initial = match args.initial {
        Initial::Ground => eigvec_to_bare(&result.vectors[0], params.g(), n_bare)?,
        Initial::Cat => ideal_cat_state(params.g(), n_bare)?,
        Initial::Fock(k, spin) => {
            if k > n_bare {
                return Err(CliError::usage(format!(
                    "Fock index {k} exceeds truncation {n_bare}"
                )));
            }
            QuantumState::fock(n_bare, k, spin, Frame::Rotated)
        }
    };
    let prop = SpectralPropagator::new(&result, &initial)?;
    let steps = (args.t_max / args.dt).round() as usize;
    let pool = thread_pool()?;
    let samples: Vec<[f64; 6]> = pool.install(|| {
        (0..=steps)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 * args.dt;
                let s = prop.state_at(t);
                let energy = energy_expectation(&s, &params)?;
                Ok([
                    t,
                    s.norm(),
                    energy,
                    expect_sigma_z(&s),
                    expect_sigma_x(&s),
                    expect_number(&s),
                ])
            })
            .collect::<Result<_, StateError>>()
    })?;

    let initial_label = match args.initial {
        Initial::Ground => "ground".to_string(),
        Initial::Cat => "cat".to_string(),
        Initial::Fock(k, rabi_core::Spin::Excited) => format!("fock:{k},e"),
        Initial::Fock(k, rabi_core::Spin::Ground) => format!("fock:{k},g"),
    };
    let payload = match args.output.format {
        Format::Json => {
            let rows: Vec<_> = samples
                .iter()
                .map(|s| json!({"t": s[0], "norm": s[1], "energy": s[2], "sigma_z": s[3], "sigma_x": s[4], "number": s[5]}))
                .collect();
            to_json(&json!({
                "schema": SCHEMA_VERSION,
                "frame": Frame::Rotated,
                "params": point_json(&params),
                "initial": initial_label,
                "n_bare": n_bare,
                "captured_weight": prop.captured_weight(),
                "samples": rows,
            }))
        }
        Format::Csv => {
            let mut t = Table::new(vec!["t", "norm", "energy", "sigma_z", "sigma_x", "number"]);
            meta_params(&mut t, &params);
            t.meta("frame", Frame::Rotated.to_string());
            t.meta("initial", initial_label.clone());
            t.meta(
                "captured_weight",
                crate::format::g17(prop.captured_weight()),
            );
            for s in &samples {
                t.push(s.iter().map(|&x| x.into()).collect());
            }
            t.to_csv()
        }
    };
    let mut parameters = point_json(&params);
    parameters["initial"] = json!(initial_label);
    parameters["t_max"] = json!(args.t_max);
    parameters["dt"] = json!(args.dt);
    Ok(Report::new(payload, parameters, kernel.name()).with_points(basis, &[(None, &result)]))
}
