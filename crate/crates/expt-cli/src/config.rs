//! Experiment configuration, read from TOML. Every dimensional value carries
//! its unit; see `docs/config.md` in the repository for the schema.

use std::path::{Path, PathBuf};

use cqed_core::{build_scheme, CqedParams, LevelScheme, ModelVariant, ReferenceData};
use homodyne_modes::Stage;
use pulse_shaper::{make_shape, Direction, PulseOptions, ShapeSpec};
use serde::{Deserialize, Serialize};

use crate::units::{Angle, Duration, Frequency};
use crate::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub output_dir: Option<PathBuf>,
    pub params: ParamsConfig,
    pub model: ModelConfig,
    pub shape: ShapeConfig,
    pub pulse: PulseConfig,
    pub simulation: SimulationConfig,
    pub sweep: SweepConfig,
    pub select: SelectConfig,
    pub convert: ConvertConfig,
    pub homodyne: HomodyneConfig,
    pub budget: BudgetConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running a command.
    pub fn validate(&self) -> Result<()> {
        self.cqed_params()?;
        self.reference()?;
        self.shape.spec()?;
        self.convert.input.spec()?;
        self.convert.output.spec()?;
        let positive = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(CliError::Config(format!("{name} must be positive, got {v}"))) };
        positive("pulse.omega_max", self.pulse.omega_max.0)?;
        positive("pulse.tail_epsilon", self.pulse.tail_epsilon)?;
        positive("simulation.rtol", self.simulation.rtol)?;
        positive("simulation.atol", self.simulation.atol)?;
        if self.sweep.points < 2 || self.sweep.stop.0 <= self.sweep.start.0 {
            return Err(CliError::Config("sweep needs stop > start and at least 2 points".into()));
        }
        if self.select.points < 3 {
            return Err(CliError::Config("select.points must be at least 3".into()));
        }
        let h = &self.homodyne;
        if h.window[1].0 <= h.window[0].0 || h.n_bins < pulse_shaper::MIN_SAMPLES {
            return Err(CliError::Config(format!("homodyne grid needs a non-empty window and at least {} bins", pulse_shaper::MIN_SAMPLES)));
        }
        if h.p1.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
            return Err(CliError::Config("homodyne.p1 must lie in [0, 1]".into()));
        }
        if h.trials < homodyne_modes::MIN_TRIALS || h.stats_trials < homodyne_modes::MIN_TRIALS {
            return Err(CliError::Config(format!("homodyne trials must be at least {}", homodyne_modes::MIN_TRIALS)));
        }
        Ok(())
    }

    pub fn cqed_params(&self) -> Result<CqedParams> {
        let p = &self.params;
        Ok(CqedParams::new(p.g.0, p.kappa_c.0, p.kappa_l.0, p.gamma.0)?)
    }

    pub fn reference(&self) -> Result<ReferenceData> {
        match &self.model.reference {
            Some(path) => Ok(ReferenceData::from_path(path)?),
            None => Ok(ReferenceData::rb87_d2()),
        }
    }

    /// Level scheme of `variant` at `delta` MHz.
    pub fn scheme(&self, variant: Variant, delta: f64) -> Result<LevelScheme> {
        match variant {
            Variant::IdealLambda => Ok(LevelScheme::ideal_lambda(delta)),
            Variant::Model(v) => Ok(build_scheme(&self.cqed_params()?, delta, v, &self.reference()?)?),
        }
    }

    pub fn model_scheme(&self) -> Result<LevelScheme> {
        self.scheme(self.model.variant, self.model.detuning.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub g: Frequency,
    pub kappa_c: Frequency,
    pub kappa_l: Frequency,
    pub gamma: Frequency,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = CqedParams::rb87_setup();
        Self { g: Frequency(p.g), kappa_c: Frequency(p.kappa_c), kappa_l: Frequency(p.kappa_l), gamma: Frequency(p.gamma) }
    }
}

/// A model variant, or the unit-coefficient single-level Λ-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Model(ModelVariant),
    IdealLambda,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Model(v) => v.name(),
            Self::IdealLambda => "ideal_lambda",
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        if name == "ideal_lambda" {
            return Ok(Self::IdealLambda);
        }
        ModelVariant::from_name(&name)
            .map(Self::Model)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown variant '{name}' (one_level, two_level, three_level, ideal_lambda)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub variant: Variant,
    pub detuning: Frequency,
    /// Reference-data TOML replacing the built-in 87Rb D2 table.
    pub reference: Option<PathBuf>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { variant: Variant::Model(ModelVariant::ThreeLevel), detuning: Frequency(-20.0), reference: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseJumpConfig {
    pub time: Duration,
    pub delta_phi: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapeConfig {
    /// Registered family name: sech, gaussian or square.
    pub family: String,
    /// T for sech and square, σ for gaussian.
    pub time: Duration,
    /// Explicit window; defaults to ±half_width·T (or [0, T] for square).
    pub window: Option<[Duration; 2]>,
    pub half_width: f64,
    pub samples: usize,
    pub phase_jump: Option<PhaseJumpConfig>,
    pub direction: DirectionConfig,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    Emission,
    Storage,
}

impl From<DirectionConfig> for Direction {
    fn from(d: DirectionConfig) -> Self {
        match d {
            DirectionConfig::Emission => Direction::Emission,
            DirectionConfig::Storage => Direction::Storage,
        }
    }
}

impl ShapeConfig {
    pub fn sech(t: f64, samples: usize) -> Self {
        Self {
            family: "sech".into(),
            time: Duration(t),
            window: None,
            half_width: 6.0,
            samples,
            phase_jump: None,
            direction: DirectionConfig::Emission,
        }
    }

    pub fn spec(&self) -> Result<ShapeSpec> {
        let t = self.time.0;
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("shape time must be positive, got {t}")));
        }
        let window = match (self.window, self.family.as_str()) {
            (Some([a, b]), _) => (a.0, b.0),
            (None, "square") => (0.0, t),
            (None, _) => (-self.half_width * t, self.half_width * t),
        };
        let mut spec = ShapeSpec::analytic(&self.family, t, window, self.samples);
        if let Some(j) = self.phase_jump {
            spec = spec.with_phase_jump(j.time.0, j.delta_phi.0);
        }
        Ok(spec)
    }

    pub fn mode(&self) -> Result<pulse_shaper::TemporalMode> {
        Ok(make_shape(&self.spec()?)?)
    }
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self::sech(0.5, 1200)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub compensate: bool,
    pub omega_max: Frequency,
    pub tail_epsilon: f64,
    /// Replace the synthesized pulse by Ω = 0 (emit only).
    pub zero_drive: bool,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { compensate: true, omega_max: Frequency(200.0), tail_epsilon: 1e-4, zero_drive: false }
    }
}

impl PulseConfig {
    pub fn options(&self) -> PulseOptions {
        PulseOptions { compensate_phase: self.compensate, omega_max: self.omega_max.0, tail_epsilon: self.tail_epsilon }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub integrator: String,
    pub step: Option<Duration>,
    pub rtol: f64,
    pub atol: f64,
    pub extension: Option<Duration>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { integrator: "rk4".into(), step: None, rtol: 1e-8, atol: 1e-10, extension: None }
    }
}

impl SimulationConfig {
    pub fn emission_options(&self, pulse: &PulseConfig) -> lindblad_sim::EmissionOptions {
        lindblad_sim::EmissionOptions {
            pulse: pulse.options(),
            extension: self.extension.map(|d| d.0),
            integrator: self.integrator.clone(),
            step: self.step.map(|d| d.0),
            rtol: self.rtol,
            atol: self.atol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub start: Frequency,
    pub stop: Frequency,
    pub points: usize,
    pub variants: Vec<Variant>,
    /// Detunings at which the master equation is run for `lindblad_variant`.
    pub lindblad_checks: Vec<Frequency>,
    pub lindblad_variant: Variant,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: Frequency(-100.0),
            stop: Frequency(500.0),
            points: 1201,
            variants: ModelVariant::ALL.iter().map(|&v| Variant::Model(v)).collect(),
            lindblad_checks: Vec::new(),
            lindblad_variant: Variant::Model(ModelVariant::TwoLevel),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectConfig {
    /// Phase steps over [0, 2π].
    pub points: usize,
    pub jump_time: Duration,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self { points: 73, jump_time: Duration(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvertConfig {
    pub variant: Variant,
    pub detuning: Frequency,
    pub input: ShapeConfig,
    pub output: ShapeConfig,
    /// Master-equation run of a retrieval leg at a reduced time scale.
    pub validate: bool,
    pub validation_output: ShapeConfig,
    pub validation_variant: Variant,
    pub validation_detuning: Frequency,
    pub validation_integrator: String,
}

impl Default for ConvertConfig {
    fn default() -> Self {
        Self {
            variant: Variant::IdealLambda,
            detuning: Frequency(0.0),
            input: ShapeConfig::sech(0.5, 1200),
            output: ShapeConfig::sech(500.0, 1200),
            validate: false,
            validation_output: ShapeConfig { half_width: 4.0, ..ShapeConfig::sech(50.0, 4000) },
            validation_variant: Variant::Model(ModelVariant::ThreeLevel),
            validation_detuning: Frequency(-20.0),
            validation_integrator: "dopri5".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VacuumReference {
    /// The shot-noise identity.
    Exact,
    /// Correlation of separately synthesized vacuum records.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomodyneConfig {
    pub trials: usize,
    pub seed: u64,
    pub n_bins: usize,
    pub window: [Duration; 2],
    /// Single-photon probability; defaults to the predicted efficiency.
    pub p1: Option<f64>,
    /// Trials of the Fock-mixture records used for photon statistics.
    pub stats_trials: usize,
    pub photon_stats: bool,
    pub vacuum_reference: VacuumReference,
    pub threshold_sigma: f64,
    pub write_records: bool,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        Self {
            trials: 20_000,
            seed: 1,
            n_bins: 32,
            window: [Duration(-2.0), Duration(2.0)],
            p1: None,
            stats_trials: 100_000,
            photon_stats: true,
            vacuum_reference: VacuumReference::Exact,
            threshold_sigma: 5.0,
            write_records: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrightnessConfig {
    pub p1: f64,
    pub detection: f64,
    pub preparation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub stages: Vec<Stage>,
    pub brightness: Option<BrightnessConfig>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { stages: homodyne_modes::setup_chain(), brightness: Some(BrightnessConfig { p1: 0.284, detection: 0.6, preparation: 0.74 }) }
    }
}
