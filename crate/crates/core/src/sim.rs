//! Monte-Carlo engine.
//!
//! A trial runs the two-phase protocol: the BS estimates the composite
//! channels while the surface holds its training state, then the surface
//! switches to the attack configuration for the data phase. The result is a
//! [`TrialRealization`]: the true, estimated and allocation channels of the
//! safe and attacked links. Transmit power, SIC error and scheme only enter at
//! evaluation time, so sweeps over those axes reuse one realization per trial.
//!
//! Every random draw comes from [`crate::rng::stream`], keyed by the seed, the
//! trial index and a purpose label, and trial results are reduced in index
//! order. Serial and parallel runs are therefore bit-identical.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::attack::{aligned_reflection, random_reflection, Architecture};
use crate::channel::{dbm_to_mw, estimate_bs, estimate_with_errors, sample_channels, CsiErrors, Scenario, UplinkMode};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::metrics::{robustness, RobustnessReport};
use crate::rng::{stream, Purpose};
use crate::transceiver::{
    allocate_power, common_precoder, private_precoders, sdma_rates, ChannelGains, RateReport, DEFAULT_GRID,
};

/// Environment variable capping worker threads (`0` = all cores).
pub const THREADS_ENV: &str = "SIM_THREADS";

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($label => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($name).to_lowercase(),
                        s,
                        [$($label),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(
    /// Downlink multiple-access scheme.
    Scheme { Rsma => "rsma", Sdma => "sdma" }
);

named_enum!(
    /// Data-phase behaviour of the surface.
    AttackKind { None => "none", Random => "random", Aligned => "aligned" }
);

named_enum!(
    /// What the attack is compared against.
    SafeMode { StaticRis => "static-ris", NoRis => "no-ris" }
);

named_enum!(
    /// Parameter varied by a sweep.
    SweepAxis {
        TransmitPowerDbm => "transmit_power_dbm",
        NumElements => "num_elements",
        GroupSize => "group_size",
        CsiError => "csi_error",
        SicError => "sic_error",
    }
);

impl SweepAxis {
    /// Whether the axis changes the channel draw (as opposed to evaluation only).
    pub fn changes_realization(self) -> bool {
        matches!(self, SweepAxis::NumElements | SweepAxis::GroupSize | SweepAxis::CsiError)
    }

    /// `scenario` with this axis set to `value`.
    pub fn apply(self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = scenario.clone();
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::Scenario(format!("{} must be a positive integer, got {value}", self.name())))
            }
        };
        match self {
            SweepAxis::TransmitPowerDbm => s.transmit_power_dbm = value,
            SweepAxis::NumElements => s.num_elements = count()?,
            SweepAxis::GroupSize => s.group_size = count()?,
            SweepAxis::CsiError => {
                s.csi_error_bs_user = value;
                s.csi_error_bs_ris = value;
                s.csi_error_ris_user = value;
            }
            SweepAxis::SicError => s.sic_error = value,
        }
        s.validate()?;
        Ok(s)
    }

    /// Current value of the axis in `scenario`.
    pub fn current(self, scenario: &Scenario) -> f64 {
        match self {
            SweepAxis::TransmitPowerDbm => scenario.transmit_power_dbm,
            SweepAxis::NumElements => scenario.num_elements as f64,
            SweepAxis::GroupSize => scenario.group_size as f64,
            SweepAxis::CsiError => scenario.csi_error_bs_user,
            SweepAxis::SicError => scenario.sic_error,
        }
    }
}

/// Axis and ascending value list.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    /// Schemes evaluated on the same realizations, in output order.
    pub schemes: Vec<Scheme>,
    pub attack: AttackKind,
    pub architecture: Architecture,
    pub safe_mode: SafeMode,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    /// η grid size of the power allocation.
    pub grid_size: usize,
    /// Run trials on the rayon pool.
    pub parallel: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            scenario: Scenario::default(),
            schemes: vec![Scheme::Rsma],
            attack: AttackKind::Aligned,
            architecture: Architecture::Fully,
            safe_mode: SafeMode::StaticRis,
            trials: 1000,
            seed: 1,
            sweep: None,
            grid_size: DEFAULT_GRID,
            parallel: true,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.trials == 0 {
            return Err(Error::Scenario("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Scenario("no scheme selected".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::Scenario("power grid needs at least 2 points".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Scenario("sweep value list is empty".into()));
            }
            if sweep.values.windows(2).any(|w| !(w[0] <= w[1])) {
                return Err(Error::Scenario("sweep values must be sorted ascending".into()));
            }
            for &v in &sweep.values {
                sweep.axis.apply(&self.scenario, v)?;
            }
        }
        Ok(())
    }

    /// Sweep axis and values, defaulting to the scenario's transmit power.
    pub fn sweep_points(&self) -> (SweepAxis, Vec<f64>) {
        match &self.sweep {
            Some(s) => (s.axis, s.values.clone()),
            None => (SweepAxis::TransmitPowerDbm, vec![self.scenario.transmit_power_dbm]),
        }
    }
}

/// Channels the BS and users see for one surface state.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    /// True composite channels during data transmission.
    pub truth: Vec<CVector>,
    /// BS estimates used for precoding.
    pub estimate: Vec<CVector>,
    /// Channels used by the power allocation: the composite channels of the
    /// training state, i.e. what the downlink would be without reconfiguration.
    pub reference: Vec<CVector>,
}

/// Safe and attacked links of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRealization {
    pub trial_index: u64,
    pub safe: Link,
    pub attacked: Link,
    pub noise_mw: f64,
    pub grid_size: usize,
}

/// Safe and attacked rates of one trial plus the derived metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub safe: RateReport,
    pub attacked: RateReport,
    pub metrics: RobustnessReport,
}

fn composites(truth: &crate::channel::Channels, theta: &CMatrix) -> Vec<CVector> {
    (0..truth.num_users()).map(|u| truth.composite(u, theta)).collect()
}

/// Draws channels, training state, estimates and attack for one trial.
pub fn realize_trial(
    scenario: &Scenario,
    architecture: Architecture,
    attack: AttackKind,
    safe_mode: SafeMode,
    seed: u64,
    trial_index: u64,
) -> Result<TrialRealization> {
    let wrap = |e: Error| Error::Trial {
        trial: trial_index,
        source: Box::new(e),
    };
    let d = scenario.num_elements;
    let sizes = architecture.group_sizes(d, scenario.group_size).map_err(wrap)?;
    let truth = sample_channels(scenario, &mut stream(seed, trial_index, Purpose::Channels));
    let theta_train = match scenario.uplink_mode {
        UplinkMode::Reflect => {
            random_reflection(architecture, &sizes, &mut stream(seed, trial_index, Purpose::TrainingReflection))
                .map_err(wrap)?
                .theta
        }
        UplinkMode::Absorb => CMatrix::zeros(d, d),
    };
    let errors = CsiErrors::sample(
        scenario,
        &mut stream(seed, trial_index, Purpose::BsCsi),
        &mut stream(seed, trial_index, Purpose::AttackerCsi),
    );
    let set = estimate_with_errors(scenario, &truth, &errors, &theta_train);
    let psi = scenario.uplink_mode.psi();
    let reference = composites(&truth, &(&theta_train * crate::linalg::C64::from(psi)));

    let safe = match safe_mode {
        SafeMode::StaticRis => Link {
            truth: composites(&truth, &theta_train),
            estimate: set.estimate.direct.clone(),
            reference: reference.clone(),
        },
        SafeMode::NoRis => Link {
            truth: truth.direct.clone(),
            estimate: estimate_bs(scenario, &truth, &errors, &CMatrix::zeros(d, d), 0.0),
            reference: truth.direct.clone(),
        },
    };

    let theta_data = match attack {
        AttackKind::None => {
            return Ok(TrialRealization {
                trial_index,
                attacked: safe.clone(),
                safe,
                noise_mw: scenario.noise_power_mw(),
                grid_size: DEFAULT_GRID,
            })
        }
        AttackKind::Random => {
            random_reflection(architecture, &sizes, &mut stream(seed, trial_index, Purpose::AttackRandom))
                .map_err(wrap)?
                .theta
        }
        AttackKind::Aligned => {
            aligned_reflection(
                architecture,
                &sizes,
                &set.estimate.bs_ris,
                &set.estimate.ris_user,
                &scenario.adversary_weights,
            )
            .map_err(wrap)?
            .theta
        }
    };
    let attacked = Link {
        truth: composites(&truth, &theta_data),
        estimate: set.estimate.direct,
        reference,
    };
    Ok(TrialRealization {
        trial_index,
        safe,
        attacked,
        noise_mw: scenario.noise_power_mw(),
        grid_size: DEFAULT_GRID,
    })
}

/// Rates of `scheme` over `link` at transmit power `power_mw`.
pub fn evaluate_link(link: &Link, scheme: Scheme, power_mw: f64, noise_mw: f64, sic_error: f64, grid_size: usize) -> Result<RateReport> {
    let private = private_precoders(&link.estimate, power_mw, noise_mw)?;
    match scheme {
        Scheme::Sdma => sdma_rates(&link.truth, &private, power_mw, noise_mw),
        Scheme::Rsma => {
            let common = common_precoder(&link.estimate)?;
            let reference = ChannelGains::new(&link.reference, &common, &private)?;
            let alloc = allocate_power(&reference, power_mw, noise_mw, sic_error, grid_size);
            let gains = ChannelGains::new(&link.truth, &common, &private)?;
            Ok(gains.rates(alloc.alpha_common, alloc.alpha_private, power_mw, noise_mw, sic_error))
        }
    }
}

impl TrialRealization {
    /// Safe and attacked rates and metrics for one operating point.
    pub fn evaluate(&self, scheme: Scheme, power_dbm: f64, sic_error: f64) -> Result<TrialResult> {
        let wrap = |e: Error| Error::Trial {
            trial: self.trial_index,
            source: Box::new(e),
        };
        let p = dbm_to_mw(power_dbm);
        let safe = evaluate_link(&self.safe, scheme, p, self.noise_mw, sic_error, self.grid_size).map_err(wrap)?;
        let attacked = if self.attacked == self.safe {
            safe.clone()
        } else {
            evaluate_link(&self.attacked, scheme, p, self.noise_mw, sic_error, self.grid_size).map_err(wrap)?
        };
        let metrics = robustness(&safe, &attacked, safe.num_users()).map_err(wrap)?;
        Ok(TrialResult { safe, attacked, metrics })
    }
}

/// One trial of `spec` (ignoring any sweep) for `scheme`.
pub fn run_trial(spec: &ExperimentSpec, scheme: Scheme, trial_index: u64) -> Result<TrialResult> {
    let s = &spec.scenario;
    let mut r = realize_trial(s, spec.architecture, spec.attack, spec.safe_mode, spec.seed, trial_index)?;
    r.grid_size = spec.grid_size;
    r.evaluate(scheme, s.transmit_power_dbm, s.sic_error)
}

/// Aggregated result of one (sweep value, scheme) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_axis: SweepAxis,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub attack: AttackKind,
    pub architecture: Architecture,
    pub mode: UplinkMode,
    pub trials: usize,
    pub seed: u64,
    pub mean_sum_rate: f64,
    pub mean_common_rate: f64,
    pub mean_private_rates: Vec<f64>,
    /// Mean over trials of `Σ_u ΔR_u`.
    pub mean_degradation: f64,
    pub mean_robustness: f64,
}

/// Running sums for one row; reduced in trial order.
#[derive(Debug, Clone)]
struct Accumulator {
    sum_rate: f64,
    common: f64,
    private: Vec<f64>,
    degradation: f64,
    robustness: f64,
    count: usize,
}

impl Accumulator {
    fn new(users: usize) -> Self {
        Accumulator {
            sum_rate: 0.0,
            common: 0.0,
            private: vec![0.0; users],
            degradation: 0.0,
            robustness: 0.0,
            count: 0,
        }
    }

    fn add(&mut self, r: &TrialResult) {
        self.sum_rate += r.attacked.sum_rate;
        self.common += r.attacked.common_rate;
        for (acc, p) in self.private.iter_mut().zip(&r.attacked.private_rates) {
            *acc += p;
        }
        self.degradation += r.metrics.per_user_degradation.iter().sum::<f64>();
        self.robustness += r.metrics.robustness_index;
        self.count += 1;
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Maps `f` over trial indices, in parallel or serially, preserving order.
pub fn map_trials<T: Send>(trials: usize, parallel: bool, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if parallel {
        with_thread_pool(|| (0..trials as u64).into_par_iter().map(&f).collect())
    } else {
        (0..trials as u64).map(f).collect()
    }
}

/// Runs every sweep value and scheme and aggregates the means.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let (axis, values) = spec.sweep_points();
    let users = spec.scenario.num_users;
    let schemes = &spec.schemes;

    // Scenarios grouped by realization: evaluation-only axes share one draw.
    let scenarios: Vec<Scenario> = values
        .iter()
        .map(|&v| axis.apply(&spec.scenario, v))
        .collect::<Result<_>>()?;
    let groups: Vec<Vec<usize>> = if axis.changes_realization() {
        (0..values.len()).map(|i| vec![i]).collect()
    } else {
        vec![(0..values.len()).collect()]
    };

    let mut accs: Vec<Vec<Accumulator>> = vec![vec![Accumulator::new(users); schemes.len()]; values.len()];
    for group in &groups {
        let base = &scenarios[group[0]];
        let per_trial = map_trials(spec.trials, spec.parallel, |t| {
            let mut r = realize_trial(base, spec.architecture, spec.attack, spec.safe_mode, spec.seed, t)?;
            r.grid_size = spec.grid_size;
            let mut out = Vec::with_capacity(group.len() * schemes.len());
            for &vi in group {
                let s = &scenarios[vi];
                for &scheme in schemes {
                    out.push(r.evaluate(scheme, s.transmit_power_dbm, s.sic_error)?);
                }
            }
            Ok(out)
        })?;
        for results in &per_trial {
            let mut it = results.iter();
            for &vi in group {
                for acc in accs[vi].iter_mut() {
                    acc.add(it.next().expect("one result per value and scheme"));
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(values.len() * schemes.len());
    for (vi, &value) in values.iter().enumerate() {
        for (si, &scheme) in schemes.iter().enumerate() {
            let a = &accs[vi][si];
            let n = a.count as f64;
            rows.push(SweepRow {
                sweep_axis: axis,
                sweep_value: value,
                scheme,
                attack: spec.attack,
                architecture: spec.architecture,
                mode: spec.scenario.uplink_mode,
                trials: spec.trials,
                seed: spec.seed,
                mean_sum_rate: a.sum_rate / n,
                mean_common_rate: a.common / n,
                mean_private_rates: a.private.iter().map(|p| p / n).collect(),
                mean_degradation: a.degradation / n,
                mean_robustness: a.robustness / n,
            });
        }
    }
    Ok(rows)
}

/// `x` rounded to `digits` significant digits, shortest form.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// CSV header for `users` users.
pub fn csv_header(users: usize) -> String {
    let mut cols = vec![
        "sweep_axis",
        "sweep_value",
        "scheme",
        "attack",
        "arch",
        "mode",
        "trials",
        "seed",
        "mean_sum_rate",
        "mean_common_rate",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    cols.extend((1..=users).map(|u| format!("mean_private_rate_{u}")));
    cols.push("mean_degradation".into());
    cols.push("mean_robustness".into());
    cols.join(",")
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let f = |x: f64| format_significant(x, 9);
        let mut cols = vec![
            self.sweep_axis.name().to_string(),
            f(self.sweep_value),
            self.scheme.name().into(),
            self.attack.name().into(),
            self.architecture.name().into(),
            self.mode.name().into(),
            self.trials.to_string(),
            self.seed.to_string(),
            f(self.mean_sum_rate),
            f(self.mean_common_rate),
        ];
        cols.extend(self.mean_private_rates.iter().map(|&p| f(p)));
        cols.push(f(self.mean_degradation));
        cols.push(f(self.mean_robustness));
        cols.join(",")
    }
}

/// Header plus one line per row.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let users = rows.first().map_or(0, |r| r.mean_private_rates.len());
    let mut out = csv_header(users);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Writes [`rows_to_csv`] to `path`.
pub fn write_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(rows_to_csv(rows).as_bytes()).map_err(io)?;
    Ok(())
}
