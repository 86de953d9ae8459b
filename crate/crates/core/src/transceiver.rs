//! The legitimate downlink: precoders, power allocation and achievable rates.
//!
//! Every SINR depends on the channels only through the received gains
//! `|c_uᴴ w_j|²` and `|c_uᴴ w_c|²`, so they are computed once per
//! (channel, precoder) pair as [`ChannelGains`] and reused across the power
//! allocation grid, SIC error values and schemes.

use nalgebra::DMatrix;

use crate::channel::Channels;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Default number of η grid points.
pub const DEFAULT_GRID: usize = 16384;

/// Composite downlink channel `c_u` of user `u` under reflection `theta`.
///
/// The received signal is `c_uᴴ x`, so `c_u = h_u + Gᴴ Θᴴ g_u`.
pub fn effective_channel(u: usize, channels: &Channels, theta: &CMatrix) -> Result<CVector> {
    let d = channels.num_elements();
    if u >= channels.num_users() {
        return Err(Error::Dimension(format!("user {u} out of range")));
    }
    if theta.nrows() != d || theta.ncols() != d {
        return Err(Error::Dimension(format!(
            "reflection is {}x{}, surface has {d} elements",
            theta.nrows(),
            theta.ncols()
        )));
    }
    if channels.direct[u].len() != channels.num_antennas() || channels.ris_user[u].len() != d {
        return Err(Error::Dimension(format!("channel lengths of user {u} are inconsistent")));
    }
    Ok(channels.composite(u, theta))
}

/// Precoders and power split of one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    pub common: CVector,
    pub private: Vec<CVector>,
    pub alpha_common: f64,
    /// Per-user private fraction (uniform across users).
    pub alpha_private: f64,
}

/// Rates of one transmission, in bits/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub common_rate: f64,
    pub private_rates: Vec<f64>,
    pub sum_rate: f64,
    pub common_sinr: Vec<f64>,
    pub private_sinr: Vec<f64>,
}

impl RateReport {
    pub fn num_users(&self) -> usize {
        self.private_rates.len()
    }
}

fn normalize(v: CVector, what: &str) -> Result<CVector> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Degenerate(format!("{what} has zero norm")));
    }
    Ok(v.unscale(n))
}

fn stack(channels: &[CVector]) -> Result<CMatrix> {
    let m = channels.first().ok_or_else(|| Error::Dimension("no users".into()))?.len();
    if channels.iter().any(|h| h.len() != m) {
        return Err(Error::Dimension("users have different antenna counts".into()));
    }
    Ok(CMatrix::from_columns(channels))
}

/// RZF precoders `Ĥ(ĤᴴĤ + ωI)⁻¹`, `ω = σ²/P`, columns scaled to unit norm.
pub fn private_precoders(estimates: &[CVector], power_mw: f64, noise_mw: f64) -> Result<Vec<CVector>> {
    let h = stack(estimates)?;
    let (m, u) = (h.nrows(), h.ncols());
    if m < u {
        return Err(Error::Dimension(format!("M ≥ U violated (M = {m}, U = {u})")));
    }
    let omega = noise_mw / power_mw;
    let gram = h.adjoint() * &h + CMatrix::identity(u, u) * C64::from(omega);
    let singular = || Error::Degenerate("singular channel Gram matrix".into());
    let inv = match gram.clone().cholesky() {
        Some(c) => c.inverse(),
        None => gram.clone().try_inverse().ok_or_else(singular)?,
    };
    let residual = crate::linalg::frobenius(&(&gram * &inv - CMatrix::identity(u, u)));
    if !(residual < 1e-6) {
        return Err(singular());
    }
    let w = h * inv;
    w.column_iter()
        .map(|c| normalize(c.into_owned(), "private precoder"))
        .collect()
}

/// Weighted matched filter `Σ_i ĥ_i/‖ĥ_i‖²`, normalised.
pub fn common_precoder(estimates: &[CVector]) -> Result<CVector> {
    let h = stack(estimates)?;
    let mut acc = CVector::zeros(h.nrows());
    for col in h.column_iter() {
        let p = col.norm_squared();
        if !(p > 0.0) {
            return Err(Error::Degenerate("zero channel estimate".into()));
        }
        acc += col.unscale(p);
    }
    normalize(acc, "common precoder")
}

/// Residual common-stream power after imperfect SIC, `ξ |cᴴw_c|² P α^c`.
pub fn sic_residual(channel: &CVector, common: &CVector, power_mw: f64, alpha_common: f64, sic_error: f64) -> f64 {
    sic_error * channel.dotc(common).norm_sqr() * power_mw * alpha_common
}

/// Received gains `|c_uᴴ w_j|²` and `|c_uᴴ w_c|²` for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    /// `private[(u, j)] = |c_uᴴ w_j|²`.
    pub private: DMatrix<f64>,
    /// `common[u] = |c_uᴴ w_c|²`.
    pub common: Vec<f64>,
}

impl ChannelGains {
    pub fn new(channels: &[CVector], common: &CVector, private: &[CVector]) -> Result<Self> {
        let u = channels.len();
        if private.len() != u {
            return Err(Error::Dimension(format!("{} private precoders for {u} users", private.len())));
        }
        let m = common.len();
        if channels.iter().chain(private).any(|v| v.len() != m) {
            return Err(Error::Dimension("precoder and channel lengths differ".into()));
        }
        Ok(ChannelGains {
            private: DMatrix::from_fn(u, u, |k, j| channels[k].dotc(&private[j]).norm_sqr()),
            common: channels.iter().map(|c| c.dotc(common).norm_sqr()).collect(),
        })
    }

    pub fn num_users(&self) -> usize {
        self.common.len()
    }

    fn leakage(&self, u: usize) -> f64 {
        (0..self.num_users()).filter(|&j| j != u).map(|j| self.private[(u, j)]).sum()
    }

    /// Rates for a power split; `alpha_common = 0` disables the common stream.
    pub fn rates(&self, alpha_common: f64, alpha_private: f64, power_mw: f64, noise_mw: f64, sic_error: f64) -> RateReport {
        let n = self.num_users();
        let mut common_sinr = vec![0.0; n];
        let mut private_sinr = vec![0.0; n];
        for u in 0..n {
            let all_private: f64 = self.private.row(u).iter().sum::<f64>() * power_mw * alpha_private;
            let common_power = self.common[u] * power_mw * alpha_common;
            common_sinr[u] = common_power / (all_private + noise_mw);
            let leak = self.leakage(u) * power_mw * alpha_private;
            let residual = sic_error * common_power;
            private_sinr[u] = self.private[(u, u)] * power_mw * alpha_private / (leak + residual + noise_mw);
        }
        let common_rate = if alpha_common > 0.0 {
            common_sinr.iter().map(|g| (1.0 + g).log2()).fold(f64::INFINITY, f64::min)
        } else {
            0.0
        };
        let private_rates: Vec<f64> = private_sinr.iter().map(|g| (1.0 + g).log2()).collect();
        let sum_rate = common_rate + private_rates.iter().sum::<f64>();
        RateReport {
            common_rate,
            private_rates,
            sum_rate,
            common_sinr,
            private_sinr,
        }
    }

    /// `rates(..).sum_rate` without building the report.
    pub fn sum_rate(&self, alpha_common: f64, alpha_private: f64, power_mw: f64, noise_mw: f64, sic_error: f64) -> f64 {
        let mut common_rate = f64::INFINITY;
        let mut private_sum = 0.0;
        for u in 0..self.num_users() {
            let all_private: f64 = self.private.row(u).iter().sum::<f64>() * power_mw * alpha_private;
            let common_power = self.common[u] * power_mw * alpha_common;
            common_rate = common_rate.min((1.0 + common_power / (all_private + noise_mw)).log2());
            let leak = self.leakage(u) * power_mw * alpha_private;
            let residual = sic_error * common_power;
            private_sum += (1.0 + self.private[(u, u)] * power_mw * alpha_private / (leak + residual + noise_mw)).log2();
        }
        if alpha_common > 0.0 {
            common_rate + private_sum
        } else {
            private_sum
        }
    }

    /// Reference-user indicator `|c_uᴴw_u|²P / (leak·P + ξ|c_uᴴw_c|²P + σ²)`.
    pub fn indicator(&self, u: usize, power_mw: f64, noise_mw: f64, sic_error: f64) -> f64 {
        let signal = self.private[(u, u)] * power_mw;
        signal / (self.leakage(u) * power_mw + sic_error * self.common[u] * power_mw + noise_mw)
    }
}

/// Rates of an RSMA transmission over the given (true) effective channels.
pub fn evaluate_rates(channels: &[CVector], precoders: &PrecoderSet, power_mw: f64, noise_mw: f64, sic_error: f64) -> Result<RateReport> {
    let gains = ChannelGains::new(channels, &precoders.common, &precoders.private)?;
    Ok(gains.rates(precoders.alpha_common, precoders.alpha_private, power_mw, noise_mw, sic_error))
}

/// User maximising the reference indicator; ties go to the lowest index.
pub fn select_reference_user(gains: &ChannelGains, power_mw: f64, noise_mw: f64, sic_error: f64) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for u in 0..gains.num_users() {
        let v = gains.indicator(u, power_mw, noise_mw, sic_error);
        if v > best_value {
            best = u;
            best_value = v;
        }
    }
    best
}

/// Result of the η line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub alpha_common: f64,
    pub alpha_private: f64,
    pub eta: f64,
    pub eta_max: f64,
    pub reference_user: usize,
}

/// The η grid of the line search: `(η, α^p)` pairs, endpoints included.
pub fn eta_grid(gains: &ChannelGains, reference_user: usize, power_mw: f64, noise_mw: f64, sic_error: f64, grid_size: usize) -> Option<(f64, Vec<(f64, f64)>)> {
    let line = EtaLine::new(gains, reference_user, power_mw, noise_mw, sic_error, grid_size)?;
    Some((line.eta_max, (0..grid_size).map(|k| line.point(k)).collect()))
}

/// `α^p` as a linear function of η, sampled on a uniform grid over `[0, η_max]`.
struct EtaLine {
    eta_max: f64,
    slope: f64,
    last: usize,
    cap: f64,
}

impl EtaLine {
    fn new(gains: &ChannelGains, reference_user: usize, power_mw: f64, noise_mw: f64, sic_error: f64, grid_size: usize) -> Option<Self> {
        let u = gains.num_users() as f64;
        let r = reference_user;
        let num = sic_error * gains.common[r] * power_mw + noise_mw;
        let den = gains.leakage(r) * power_mw + sic_error * u * gains.common[r] * power_mw;
        let eta_max = den / (u * num);
        if !(den > 0.0) || !(num > 0.0) || !eta_max.is_finite() || grid_size < 2 {
            return None;
        }
        Some(EtaLine {
            eta_max,
            slope: num / den,
            last: grid_size - 1,
            cap: 1.0 / u,
        })
    }

    fn point(&self, k: usize) -> (f64, f64) {
        if k == self.last {
            // Exact feasibility-cap endpoint.
            (self.eta_max, self.cap)
        } else {
            let eta = self.eta_max * k as f64 / self.last as f64;
            (eta, eta * self.slope)
        }
    }
}

/// Line search over η maximising the sum rate evaluated on `gains`.
pub fn allocate_power(gains: &ChannelGains, power_mw: f64, noise_mw: f64, sic_error: f64, grid_size: usize) -> PowerAllocation {
    let n = gains.num_users() as f64;
    let reference_user = select_reference_user(gains, power_mw, noise_mw, sic_error);
    let Some(line) = EtaLine::new(gains, reference_user, power_mw, noise_mw, sic_error, grid_size) else {
        return PowerAllocation {
            alpha_common: 0.0,
            alpha_private: 1.0 / n,
            eta: f64::NAN,
            eta_max: f64::NAN,
            reference_user,
        };
    };
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for k in 0..grid_size {
        let (eta, alpha_private) = line.point(k);
        let alpha_common = (1.0 - n * alpha_private).max(0.0);
        let rate = gains.sum_rate(alpha_common, alpha_private, power_mw, noise_mw, sic_error);
        if rate > best.0 {
            best = (rate, eta, alpha_private);
        }
    }
    PowerAllocation {
        alpha_common: (1.0 - n * best.2).max(0.0),
        alpha_private: best.2,
        eta: best.1,
        eta_max: line.eta_max,
        reference_user,
    }
}

/// SDMA: RZF privates with uniform power and no common stream.
pub fn sdma_rates(channels: &[CVector], private: &[CVector], power_mw: f64, noise_mw: f64) -> Result<RateReport> {
    let u = channels.len();
    let dummy = CVector::zeros(private.first().map_or(0, |p| p.len()));
    let gains = ChannelGains::new(channels, &dummy, private)?;
    Ok(gains.rates(0.0, 1.0 / u as f64, power_mw, noise_mw, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{complex_normal, sample_channels, Scenario};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_channels(rng: &mut ChaCha8Rng, m: usize, u: usize) -> Vec<CVector> {
        (0..u).map(|_| CVector::from_fn(m, |_, _| complex_normal(rng, 1.0))).collect()
    }

    #[test]
    fn effective_channel_cases() {
        let s = Scenario {
            num_elements: 10,
            ..Scenario::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = sample_channels(&s, &mut rng);
        assert_eq!(effective_channel(0, &ch, &CMatrix::zeros(10, 10)).unwrap(), ch.direct[0]);
        let theta = CMatrix::from_fn(10, 10, |_, _| complex_normal(&mut rng, 1.0));
        let got = effective_channel(2, &ch, &theta).unwrap();
        // (gᴴΘG + hᴴ)ᴴ entrywise
        let row = ch.ris_user[2].adjoint() * &theta * &ch.bs_ris + ch.direct[2].adjoint();
        for m in 0..32 {
            assert!((got[m] - row[(0, m)].conj()).norm() < 1e-12 * got.norm());
        }
        assert!(effective_channel(0, &ch, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn single_user_rzf_is_matched_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_channels(&mut rng, 4, 1);
        let w = private_precoders(&h, 10.0, 0.1).unwrap();
        let mf = h[0].unscale(h[0].norm());
        assert!((&w[0] - mf).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_users_get_zero_forcing() {
        let h = vec![
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)]),
        ];
        let w = private_precoders(&h, 1e12, 1e-3).unwrap();
        assert!(h[0].dotc(&w[1]).norm() < 1e-10 && h[1].dotc(&w[0]).norm() < 1e-10);
    }

    #[test]
    fn rzf_matches_inverse_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_channels(&mut rng, 8, 3);
        let w = private_precoders(&h, 10.0, 1.0).unwrap();
        let hm = CMatrix::from_columns(&h);
        let inv = (hm.adjoint() * &hm + CMatrix::identity(3, 3) * c(0.1, 0.0)).try_inverse().unwrap();
        let raw = hm * inv;
        for j in 0..3 {
            let col = raw.column(j).into_owned();
            let expect = col.unscale(col.norm());
            assert!((&w[j] - expect).norm() < 1e-10);
            assert!((w[j].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_gram_without_regularization() {
        let h = vec![CVector::from_element(2, c(1.0, 0.0)), CVector::from_element(2, c(1.0, 0.0))];
        let r = private_precoders(&h, 1.0, 0.0);
        assert!(r.is_err(), "{r:?}");
        let three = random_channels(&mut ChaCha8Rng::seed_from_u64(4), 2, 3);
        assert!(private_precoders(&three, 1.0, 1.0).is_err());
    }

    #[test]
    fn common_precoder_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_channels(&mut rng, 5, 3);
        let one = common_precoder(&h[..1]).unwrap();
        assert!((&one - h[0].unscale(h[0].norm())).norm() < 1e-12);
        let pair = vec![h[0].clone(), &h[0] * c(2.0, 0.0)];
        let w = common_precoder(&pair).unwrap();
        assert!((&w - h[0].unscale(h[0].norm())).norm() < 1e-12);
        assert!((common_precoder(&h).unwrap().norm() - 1.0).abs() < 1e-12);
        let zero = vec![h[0].clone(), CVector::zeros(5)];
        assert!(matches!(common_precoder(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sic_residual_cases() {
        let ch = CVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        let w = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert_eq!(sic_residual(&ch, &w, 5.0, 0.4, 0.0), 0.0);
        let full = ch.dotc(&w).norm_sqr() * 5.0 * 0.4;
        assert!((sic_residual(&ch, &w, 5.0, 0.4, 1.0) - full).abs() < 1e-15 * full);
        // cᴴw = conj(1+2i)·0.6 + conj(−0.5)·0.8i = 0.6 − 1.6i
        let expect = 1e-3 * (0.6f64 * 0.6 + 1.6 * 1.6) * 5.0 * 0.4;
        assert!((sic_residual(&ch, &w, 5.0, 0.4, 1e-3) - expect).abs() < 1e-15 * expect.max(1.0) * 10.0);
    }

    #[test]
    fn interference_free_single_user() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_channels(&mut rng, 4, 1);
        let w = private_precoders(&h, 100.0, 0.01).unwrap();
        let p = PrecoderSet {
            common: w[0].clone(),
            private: w,
            alpha_common: 0.0,
            alpha_private: 1.0,
        };
        let r = evaluate_rates(&h, &p, 100.0, 0.01, 0.0).unwrap();
        let expect = (1.0 + 100.0 * h[0].norm_squared() / 0.01).log2();
        assert!((r.sum_rate - expect).abs() < 1e-12);
        assert_eq!(r.common_rate, 0.0);
    }

    #[test]
    fn two_user_hand_evaluation() {
        // Hand-built channels and precoders; every gain worked out below.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ch = vec![
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 2.0)]),
        ];
        let private = vec![
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]),
        ];
        let common = CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
        let (pw, n0, xi, ac, ap) = (10.0, 0.5, 0.1, 0.4, 0.3);
        let p = PrecoderSet {
            common,
            private,
            alpha_common: ac,
            alpha_private: ap,
        };
        let r = evaluate_rates(&ch, &p, pw, n0, xi).unwrap();
        // user 1: |h1ᴴw1|² = 1, |h1ᴴw2|² = 0.36, |h1ᴴwc|² = 0.5
        // user 2: |h2ᴴw1|² = 0,  |h2ᴴw2|² = 2.56, |h2ᴴwc|² = 2
        let gc1 = 0.5 * pw * ac / ((1.0 + 0.36) * pw * ap + n0);
        let gc2 = 2.0 * pw * ac / (2.56 * pw * ap + n0);
        let gp1 = 1.0 * pw * ap / (0.36 * pw * ap + xi * 0.5 * pw * ac + n0);
        let gp2 = 2.56 * pw * ap / (0.0 + xi * 2.0 * pw * ac + n0);
        let rc = (1.0 + gc1).log2().min((1.0 + gc2).log2());
        assert!((r.common_sinr[0] - gc1).abs() < 1e-12 && (r.common_sinr[1] - gc2).abs() < 1e-12);
        assert!((r.private_sinr[0] - gp1).abs() < 1e-12 && (r.private_sinr[1] - gp2).abs() < 1e-12);
        assert!((r.common_rate - rc).abs() < 1e-12);
        let total = rc + (1.0 + gp1).log2() + (1.0 + gp2).log2();
        assert!((r.sum_rate - total).abs() < 1e-12);
    }

    #[test]
    fn reference_user_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_channels(&mut rng, 4, 1);
        let g = ChannelGains::new(&h, &h[0], &h).unwrap();
        assert_eq!(select_reference_user(&g, 1.0, 1.0, 0.0), 0);

        let mut gains = ChannelGains {
            private: DMatrix::from_row_slice(3, 3, &[1.0, 5.0, 5.0, 0.0, 1.0, 0.0, 5.0, 5.0, 1.0]),
            common: vec![1.0; 3],
        };
        assert_eq!(select_reference_user(&gains, 10.0, 1e-3, 0.0), 1);
        gains.private = DMatrix::from_element(3, 3, 1.0);
        assert_eq!(select_reference_user(&gains, 10.0, 1e-3, 0.0), 0);
    }

    #[test]
    fn reference_user_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let h = random_channels(&mut rng, 6, 4);
            let est: Vec<CVector> = h.iter().map(|x| x + CVector::from_fn(6, |_, _| complex_normal(&mut rng, 0.3))).collect();
            let w = private_precoders(&est, 10.0, 0.1).unwrap();
            let wc = common_precoder(&est).unwrap();
            let gains = ChannelGains::new(&h, &wc, &w).unwrap();
            let chosen = select_reference_user(&gains, 10.0, 0.1, 0.01);
            let score = |u: usize| {
                let sig = h[u].dotc(&w[u]).norm_sqr() * 10.0;
                let leak: f64 = (0..4).filter(|&j| j != u).map(|j| h[u].dotc(&w[j]).norm_sqr() * 10.0).sum();
                sig / (leak + 0.01 * h[u].dotc(&wc).norm_sqr() * 10.0 + 0.1)
            };
            let best = (0..4).fold(0, |b, u| if score(u) > score(b) { u } else { b });
            assert_eq!(chosen, best);
        }
    }

    fn noisy_gains(rng: &mut ChaCha8Rng, eps: f64) -> ChannelGains {
        let h = random_channels(rng, 8, 3);
        let est: Vec<CVector> = h
            .iter()
            .map(|x| x * c((1.0 - eps).sqrt(), 0.0) + CVector::from_fn(8, |_, _| complex_normal(rng, eps)))
            .collect();
        let w = private_precoders(&est, 1e3, 1.0).unwrap();
        let wc = common_precoder(&est).unwrap();
        ChannelGains::new(&h, &wc, &w).unwrap()
    }

    #[test]
    fn grid_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gains = noisy_gains(&mut rng, 0.3);
        let r = select_reference_user(&gains, 1e3, 1.0, 0.01);
        let (_, grid) = eta_grid(&gains, r, 1e3, 1.0, 0.01, DEFAULT_GRID).unwrap();
        assert_eq!(grid[0], (0.0, 0.0));
        assert!((3.0 * grid[DEFAULT_GRID - 1].1 - 1.0).abs() < 1e-12);
        assert_eq!(grid.len(), DEFAULT_GRID);
    }

    #[test]
    fn allocation_attains_grid_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let gains = noisy_gains(&mut rng, 0.3);
            let a = allocate_power(&gains, 1e3, 1.0, 0.0, DEFAULT_GRID);
            assert!((a.alpha_common + 3.0 * a.alpha_private - 1.0).abs() < 1e-12);
            assert!(a.alpha_common >= 0.0 && a.alpha_private >= 0.0);
            let chosen = gains.rates(a.alpha_common, a.alpha_private, 1e3, 1.0, 0.0).sum_rate;
            let (_, grid) = eta_grid(&gains, a.reference_user, 1e3, 1.0, 0.0, DEFAULT_GRID).unwrap();
            for (_, ap) in grid {
                let r = gains.rates((1.0 - 3.0 * ap).max(0.0), ap, 1e3, 1.0, 0.0).sum_rate;
                assert!(r.is_finite() && r <= chosen);
            }
        }
    }

    #[test]
    fn fast_sum_rate_matches_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let gains = noisy_gains(&mut rng, 0.3);
            for (ac, ap, xi) in [(0.0, 1.0 / 3.0, 0.0), (1.0, 0.0, 0.1), (0.4, 0.2, 1e-3)] {
                let report = gains.rates(ac, ap, 1e3, 1.0, xi).sum_rate;
                assert_eq!(gains.sum_rate(ac, ap, 1e3, 1.0, xi), report);
            }
        }
    }

    #[test]
    fn perfect_csi_sends_power_to_privates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let h = random_channels(&mut rng, 32, 3);
            let w = private_precoders(&h, 1e4, 1e-6).unwrap();
            let wc = common_precoder(&h).unwrap();
            let gains = ChannelGains::new(&h, &wc, &w).unwrap();
            assert!(allocate_power(&gains, 1e4, 1e-6, 0.0, DEFAULT_GRID).alpha_common < 0.05);
        }
    }

    #[test]
    fn degenerate_denominator_falls_back_to_cap() {
        let gains = ChannelGains {
            private: DMatrix::identity(2, 2),
            common: vec![1.0, 1.0],
        };
        let a = allocate_power(&gains, 1.0, 1.0, 0.0, DEFAULT_GRID);
        assert_eq!((a.alpha_common, a.alpha_private), (0.0, 0.5));
    }

    #[test]
    fn private_sinr_non_increasing_in_sic_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let gains = noisy_gains(&mut rng, 0.3);
        let mut prev = vec![f64::INFINITY; 3];
        for xi in [0.0, 1e-4, 1e-3, 1e-2, 0.1, 1.0] {
            let r = gains.rates(0.4, 0.2, 1e3, 1.0, xi);
            for u in 0..3 {
                assert!(r.private_sinr[u] <= prev[u]);
                prev[u] = r.private_sinr[u];
            }
        }
    }

    #[test]
    fn sdma_equivalences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_channels(&mut rng, 4, 1);
        let w = private_precoders(&h, 10.0, 0.1).unwrap();
        let sd = sdma_rates(&h, &w, 10.0, 0.1).unwrap();
        let p = PrecoderSet {
            common: w[0].clone(),
            private: w.clone(),
            alpha_common: 0.0,
            alpha_private: 1.0,
        };
        assert_eq!(sd.sum_rate, evaluate_rates(&h, &p, 10.0, 0.1, 0.3).unwrap().sum_rate);

        let h = random_channels(&mut rng, 8, 3);
        let w = private_precoders(&h, 10.0, 0.1).unwrap();
        let sd = sdma_rates(&h, &w, 10.0, 0.1).unwrap();
        assert_eq!(sd.common_rate, 0.0);
        let any = CVector::from_fn(8, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let p = PrecoderSet {
            common: any,
            private: w,
            alpha_common: 0.0,
            alpha_private: 1.0 / 3.0,
        };
        let rs = evaluate_rates(&h, &p, 10.0, 0.1, 0.5).unwrap();
        assert!((rs.sum_rate - sd.sum_rate).abs() < 1e-12);
    }
}
