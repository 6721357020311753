use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rabi_core::{BasisSpec, ModelError, ModelParams, Spin};

#[derive(Debug, Parser)]
#[command(
    name = "rabi-spectra",
    version,
    about = "Spectra and dynamics of a laser-driven trapped ion beyond the Lamb-Dicke and rotating-wave approximations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Converged low spectrum at one parameter point.
    Spectrum(SpectrumArgs),
    /// Spectrum along a one-parameter grid.
    Sweep(SweepArgs),
    /// Lowest levels at an explicit list of truncations.
    Converge(ConvergeArgs),
    /// Level-by-level comparison with the rotating-wave spectrum.
    CompareRwa(CompareRwaArgs),
    /// Ideal cat state against the spin-rotated exact ground state.
    Cat(CatArgs),
    /// Time evolution through the spectral propagator.
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Rabi frequency in trap units.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    /// Lamb-Dicke parameter.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eta: f64,
    /// Detuning in trap units.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
}

impl PointArgs {
    pub fn params(&self) -> Result<ModelParams, ModelError> {
        ModelParams::new(self.omega, self.eta, self.delta)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    /// Number of levels to converge.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    /// Overlap kernel.
    #[arg(long, default_value = "series")]
    pub kernel: String,
    #[arg(long, default_value_t = BasisSpec::default().n_start)]
    pub n_start: usize,
    #[arg(long, default_value_t = BasisSpec::default().n_step)]
    pub n_step: usize,
    #[arg(long, default_value_t = BasisSpec::default().n_max_hard)]
    pub n_max: usize,
    #[arg(long, default_value_t = BasisSpec::default().tail_tol)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = BasisSpec::default().drift_tol)]
    pub drift_tol: f64,
}

impl BasisArgs {
    pub fn spec(&self) -> Result<BasisSpec, ModelError> {
        BasisSpec {
            n_start: self.n_start,
            n_step: self.n_step,
            n_max_hard: self.n_max,
            tail_tol: self.tail_tol,
            drift_tol: self.drift_tol,
            levels_requested: self.levels,
        }
        .with_levels(self.levels)
        .validate()
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    /// Without it the payload goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also diagonalize another representation (bare, transformed, lab, rwa) and report the difference.
    #[arg(long)]
    pub cross_check: Option<String>,
    /// Fock cutoff for the cross-check representation.
    #[arg(long, default_value_t = 200)]
    pub cross_check_n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CompareRwaArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Comma-separated eta values; overrides --eta.
    #[arg(long, value_delimiter = ',')]
    pub eta_list: Option<Vec<f64>>,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Eta,
    Delta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::Delta => "delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// eta from 0 to 1, 101 points, omega 1, delta 0.
    Fig2,
    /// delta from -2 to 2, 161 points, omega 2, eta 0.2.
    Fig3a,
    /// As fig3a with eta 0.4.
    Fig3b,
    /// As fig3a with eta 0.6.
    Fig3c,
}

/// Fully resolved sweep definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPlan {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub omega: f64,
    pub eta: f64,
    pub delta: f64,
}

impl Preset {
    pub fn plan(self) -> SweepPlan {
        let delta_sweep = |eta| SweepPlan {
            param: SweepParam::Delta,
            from: -2.0,
            to: 2.0,
            steps: 161,
            omega: 2.0,
            eta,
            delta: 0.0,
        };
        match self {
            Preset::Fig2 => SweepPlan {
                param: SweepParam::Eta,
                from: 0.0,
                to: 1.0,
                steps: 101,
                omega: 1.0,
                eta: 0.0,
                delta: 0.0,
            },
            Preset::Fig3a => delta_sweep(0.2),
            Preset::Fig3b => delta_sweep(0.4),
            Preset::Fig3c => delta_sweep(0.6),
        }
    }
}

impl SweepPlan {
    /// `from + i (to - from)/(steps - 1)` written so mirrored ranges give
    /// exactly mirrored values.
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let i = i as f64;
                (self.from * (last - i) + self.to * i) / last
            })
            .collect()
    }

    pub fn params_at(&self, value: f64) -> Result<ModelParams, ModelError> {
        match self.param {
            SweepParam::Eta => ModelParams::new(self.omega, value, self.delta),
            SweepParam::Delta => ModelParams::new(self.omega, self.eta, value),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, required_unless_present = "preset")]
    pub param: Option<SweepParam>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "preset")]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "preset")]
    pub to: Option<f64>,
    #[arg(long, required_unless_present = "preset")]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SweepArgs {
    pub fn plan(&self) -> Result<SweepPlan, String> {
        if let Some(p) = self.preset {
            return Ok(p.plan());
        }
        let steps = self.steps.expect("required by clap");
        if steps == 0 {
            return Err("--steps must be >= 1".into());
        }
        Ok(SweepPlan {
            param: self.param.expect("required by clap"),
            from: self.from.expect("required by clap"),
            to: self.to.expect("required by clap"),
            steps,
            omega: self.point.omega,
            eta: self.point.eta,
            delta: self.point.delta,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Comma-separated truncations, e.g. `20,40,60`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long, default_value = "series")]
    pub kernel: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CatArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Comma-separated eta values; overrides --eta with one summary row each.
    #[arg(long, value_delimiter = ',')]
    pub eta_list: Option<Vec<f64>>,
    /// Also write amplitudes of both states (first eta only) to this file.
    #[arg(long)]
    pub amplitudes: Option<PathBuf>,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Ground,
    Fock(usize, Spin),
    Cat,
}

impl FromStr for Initial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ground" => Ok(Initial::Ground),
            "cat" => Ok(Initial::Cat),
            _ => {
                let spec = s
                    .strip_prefix("fock:")
                    .ok_or_else(|| format!("expected ground, cat or fock:k,e|g; got `{s}`"))?;
                let (k, spin) = spec
                    .split_once(',')
                    .ok_or_else(|| format!("expected fock:k,e|g; got `{s}`"))?;
                let k = k
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad Fock index: {e}"))?;
                let spin = match spin.trim() {
                    "e" => Spin::Excited,
                    "g" => Spin::Ground,
                    other => return Err(format!("spin must be e or g, got `{other}`")),
                };
                Ok(Initial::Fock(k, spin))
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// ground, cat, or fock:k,e|g.
    #[arg(long, default_value = "ground")]
    pub initial: Initial,
    /// Levels in the propagator.
    #[arg(long, default_value_t = 20)]
    pub levels: usize,
    #[arg(long, default_value = "series")]
    pub kernel: String,
    #[command(flatten)]
    pub output: OutputArgs,
}
