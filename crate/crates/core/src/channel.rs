//! Scenario geometry, Rayleigh channels and the imperfect-CSI model.
//!
//! Each estimate is a convex power mix of the true link and an independent
//! Gaussian error, `x̂ = √(1−ε) x + √ε e`, where `e` has the same per-entry
//! variance as `x`. The BS only ever sees the composite downlink channel
//! `h_u + ψ Gᴴ Θ_trainᴴ g_u` measured while the surface holds its training
//! state; the attacker sees `Ĝ` and `ĝ_u`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMatrix, CVector, C64};

/// Surface behaviour while the BS collects uplink pilots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UplinkMode {
    /// The surface absorbs (ψ = 0): the BS estimates the direct links only.
    Absorb,
    /// The surface reflects with its training configuration (ψ = 1).
    Reflect,
}

impl UplinkMode {
    pub fn psi(self) -> f64 {
        match self {
            UplinkMode::Absorb => 0.0,
            UplinkMode::Reflect => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UplinkMode::Absorb => "absorb",
            UplinkMode::Reflect => "reflect",
        }
    }
}

impl std::str::FromStr for UplinkMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "absorb" => Ok(UplinkMode::Absorb),
            "reflect" => Ok(UplinkMode::Reflect),
            _ => Err(format!("unknown mode `{s}` (expected absorb or reflect)")),
        }
    }
}

/// Physical and protocol parameters of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// BS antennas `M`.
    pub num_antennas: usize,
    /// Surface elements `D`.
    pub num_elements: usize,
    /// Elements per group `D_g` (group-connected surfaces).
    pub group_size: usize,
    /// Single-antenna users `U`.
    pub num_users: usize,
    /// BS-user distances in meters.
    pub user_distances: Vec<f64>,
    /// User azimuths in degrees.
    pub user_azimuths_deg: Vec<f64>,
    /// BS-surface distance in meters.
    pub ris_distance: f64,
    /// Surface azimuth in degrees.
    pub ris_azimuth_deg: f64,
    pub pathloss_exponent: f64,
    pub csi_error_bs_user: f64,
    pub csi_error_bs_ris: f64,
    pub csi_error_ris_user: f64,
    /// Residual fraction of imperfect SIC.
    pub sic_error: f64,
    pub noise_power_dbm: f64,
    pub transmit_power_dbm: f64,
    pub uplink_mode: UplinkMode,
    /// Adversarial weights `μ_i`.
    pub adversary_weights: Vec<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            num_antennas: 32,
            num_elements: 200,
            group_size: 5,
            num_users: 3,
            user_distances: vec![30.0, 50.0, 60.0],
            user_azimuths_deg: vec![25.0, 15.0, 10.0],
            ris_distance: 40.0,
            ris_azimuth_deg: 5.0,
            pathloss_exponent: 3.0,
            csi_error_bs_user: 0.3,
            csi_error_bs_ris: 0.3,
            csi_error_ris_user: 0.3,
            sic_error: 0.0,
            noise_power_dbm: -60.0,
            transmit_power_dbm: 30.0,
            uplink_mode: UplinkMode::Reflect,
            adversary_weights: vec![1.0 / 3.0; 3],
        }
    }
}

impl Scenario {
    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        if self.num_users == 0 {
            return bad("at least one user is required".into());
        }
        if self.num_antennas < self.num_users {
            return bad(format!(
                "M ≥ U violated (M = {}, U = {})",
                self.num_antennas, self.num_users
            ));
        }
        if self.num_elements == 0 {
            return bad("the surface needs at least one element".into());
        }
        if self.group_size == 0 || self.num_elements % self.group_size != 0 {
            return bad(format!(
                "D divisible by D_g required (D = {}, D_g = {})",
                self.num_elements, self.group_size
            ));
        }
        for (name, len) in [
            ("user_distances", self.user_distances.len()),
            ("user_azimuths", self.user_azimuths_deg.len()),
            ("adversary_weights", self.adversary_weights.len()),
        ] {
            if len != self.num_users {
                return bad(format!("{name} has {len} entries, expected U = {}", self.num_users));
            }
        }
        if self.user_distances.iter().chain([&self.ris_distance]).any(|&d| !(d > 0.0 && d.is_finite())) {
            return bad("distances must be positive".into());
        }
        for (name, e) in [
            ("csi_error_bs_user", self.csi_error_bs_user),
            ("csi_error_bs_ris", self.csi_error_bs_ris),
            ("csi_error_ris_user", self.csi_error_ris_user),
            ("sic_error", self.sic_error),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("{name} = {e} outside [0, 1]"));
            }
        }
        if self.adversary_weights.iter().any(|&w| !(w > 0.0)) {
            return bad("adversary weights must be positive".into());
        }
        let total: f64 = self.adversary_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("adversary weights sum to {total}, expected 1"));
        }
        if !self.pathloss_exponent.is_finite() || !self.noise_power_dbm.is_finite() || !self.transmit_power_dbm.is_finite()
        {
            return bad("non-finite power or path-loss parameter".into());
        }
        Ok(())
    }

    pub fn noise_power_mw(&self) -> f64 {
        dbm_to_mw(self.noise_power_dbm)
    }

    pub fn transmit_power_mw(&self) -> f64 {
        dbm_to_mw(self.transmit_power_dbm)
    }

    /// Per-entry variance of `h_u`.
    pub fn direct_variance(&self, u: usize) -> f64 {
        self.user_distances[u].powf(-self.pathloss_exponent)
    }

    /// Per-entry variance of `G`.
    pub fn bs_ris_variance(&self) -> f64 {
        self.ris_distance.powf(-self.pathloss_exponent)
    }

    /// Per-entry variance of `g_u`.
    pub fn ris_user_variance(&self, u: usize) -> f64 {
        ris_user_distance(self, u).powf(-self.pathloss_exponent)
    }
}

/// dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Surface-to-user distance by the law of cosines.
pub fn ris_user_distance(scenario: &Scenario, u: usize) -> f64 {
    let d = scenario.ris_distance;
    let du = scenario.user_distances[u];
    let delta = (scenario.ris_azimuth_deg - scenario.user_azimuths_deg[u]).to_radians();
    (d * d + du * du - 2.0 * d * du * delta.cos()).max(0.0).sqrt()
}

/// One draw of `CN(0, variance)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, variance: f64) -> CMatrix {
    // Filled in column-major order so draws map onto vec() positions.
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_normal(rng, variance)).collect();
    CMatrix::from_vec(rows, cols, data)
}

fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> CVector {
    CVector::from_iterator(len, (0..len).map(|_| complex_normal(rng, variance)))
}

/// Links of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels {
    /// `h_u ∈ C^M` per user. In an estimate this holds the BS-side
    /// composite estimate `ĥ_u`.
    pub direct: Vec<CVector>,
    /// `G ∈ C^{D×M}`.
    pub bs_ris: CMatrix,
    /// `g_u ∈ C^D` per user.
    pub ris_user: Vec<CVector>,
}

impl Channels {
    pub fn num_users(&self) -> usize {
        self.direct.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.bs_ris.ncols()
    }

    pub fn num_elements(&self) -> usize {
        self.bs_ris.nrows()
    }

    /// Downlink composite channel of user `u` for reflection `theta`.
    pub fn composite(&self, u: usize, theta: &CMatrix) -> CVector {
        composite_channel(&self.direct[u], &self.bs_ris, &self.ris_user[u], theta)
    }
}

/// `h + Gᴴ Θᴴ g`, so that `(h + GᴴΘᴴg)ᴴ = hᴴ + gᴴΘG` is the received row.
pub fn composite_channel(h: &CVector, g_bs: &CMatrix, g_user: &CVector, theta: &CMatrix) -> CVector {
    let reflected = theta.adjoint() * g_user;
    h + g_bs.adjoint() * reflected
}

/// True channels plus the BS and attacker estimates of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub truth: Channels,
    /// `ĥ_u` (composite, BS side), `Ĝ` and `ĝ_u` (attacker side).
    pub estimate: Channels,
    /// Surface state during uplink training (zero matrix in absorb mode).
    pub training_reflection: CMatrix,
}

/// Draws the true channels of one trial.
pub fn sample_channels<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Channels {
    let (m, d, u) = (scenario.num_antennas, scenario.num_elements, scenario.num_users);
    let direct = (0..u).map(|k| complex_normal_vector(rng, m, scenario.direct_variance(k))).collect();
    let bs_ris = complex_normal_matrix(rng, d, m, scenario.bs_ris_variance());
    let ris_user = (0..u).map(|k| complex_normal_vector(rng, d, scenario.ris_user_variance(k))).collect();
    Channels {
        direct,
        bs_ris,
        ris_user,
    }
}

/// Standard (unit-variance) error draws, scaled per link at estimation time.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiErrors {
    pub bs_user: Vec<CVector>,
    pub bs_ris: CMatrix,
    pub ris_user: Vec<CVector>,
}

impl CsiErrors {
    /// BS errors come from `bs_rng`, attacker errors from `attacker_rng`.
    pub fn sample<R: Rng + ?Sized, S: Rng + ?Sized>(scenario: &Scenario, bs_rng: &mut R, attacker_rng: &mut S) -> Self {
        let (m, d, u) = (scenario.num_antennas, scenario.num_elements, scenario.num_users);
        let bs_user = (0..u).map(|_| complex_normal_vector(bs_rng, m, 1.0)).collect();
        let bs_ris = complex_normal_matrix(attacker_rng, d, m, 1.0);
        let ris_user = (0..u).map(|_| complex_normal_vector(attacker_rng, d, 1.0)).collect();
        CsiErrors {
            bs_user,
            bs_ris,
            ris_user,
        }
    }
}

fn mix(truth: &CMatrix, error: &CMatrix, eps: f64, error_std: f64) -> CMatrix {
    if eps == 0.0 {
        return truth.clone();
    }
    truth * C64::from((1.0 - eps).sqrt()) + error * C64::from(eps.sqrt() * error_std)
}

fn mix_vec(truth: &CVector, error: &CVector, eps: f64, error_std: f64) -> CVector {
    if eps == 0.0 {
        return truth.clone();
    }
    truth * C64::from((1.0 - eps).sqrt()) + error * C64::from(eps.sqrt() * error_std)
}

/// BS-side composite estimates `ĥ_u` for training reflection `theta_train`
/// observed with factor `psi`.
pub fn estimate_bs(scenario: &Scenario, truth: &Channels, errors: &CsiErrors, theta_train: &CMatrix, psi: f64) -> Vec<CVector> {
    let eps = scenario.csi_error_bs_user;
    let reflected_power = psi * frobenius(theta_train).powi(2) * scenario.bs_ris_variance();
    (0..truth.num_users())
        .map(|u| {
            let clean = if psi == 0.0 {
                truth.direct[u].clone()
            } else {
                composite_channel(&truth.direct[u], &truth.bs_ris, &truth.ris_user[u], &(theta_train * C64::from(psi)))
            };
            let var = scenario.direct_variance(u) + reflected_power * scenario.ris_user_variance(u);
            mix_vec(&clean, &errors.bs_user[u], eps, var.sqrt())
        })
        .collect()
}

/// Full estimate set from pre-drawn errors.
pub fn estimate_with_errors(scenario: &Scenario, truth: &Channels, errors: &CsiErrors, theta_train: &CMatrix) -> ChannelSet {
    let psi = scenario.uplink_mode.psi();
    let direct = estimate_bs(scenario, truth, errors, theta_train, psi);
    let bs_ris = mix(
        &truth.bs_ris,
        &errors.bs_ris,
        scenario.csi_error_bs_ris,
        scenario.bs_ris_variance().sqrt(),
    );
    let ris_user = (0..truth.num_users())
        .map(|u| {
            mix_vec(
                &truth.ris_user[u],
                &errors.ris_user[u],
                scenario.csi_error_ris_user,
                scenario.ris_user_variance(u).sqrt(),
            )
        })
        .collect();
    ChannelSet {
        truth: truth.clone(),
        estimate: Channels {
            direct,
            bs_ris,
            ris_user,
        },
        training_reflection: theta_train.clone(),
    }
}

/// Draws errors from one stream and forms every estimate.
pub fn estimate_channels<R: Rng + ?Sized>(scenario: &Scenario, truth: &Channels, rng: &mut R, theta_train: &CMatrix) -> ChannelSet {
    let (m, d, u) = (scenario.num_antennas, scenario.num_elements, scenario.num_users);
    let bs_user = (0..u).map(|_| complex_normal_vector(rng, m, 1.0)).collect();
    let bs_ris = complex_normal_matrix(rng, d, m, 1.0);
    let ris_user = (0..u).map(|_| complex_normal_vector(rng, d, 1.0)).collect();
    let errors = CsiErrors {
        bs_user,
        bs_ris,
        ris_user,
    };
    estimate_with_errors(scenario, truth, &errors, theta_train)
}
