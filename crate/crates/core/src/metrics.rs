//! Rate degradation and the robustness index.

use crate::error::{Error, Result};
use crate::transceiver::RateReport;

/// Paired safe/attacked comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub per_user_degradation: Vec<f64>,
    pub robustness_index: f64,
}

fn check_users(safe: &RateReport, attacked: &RateReport, users: usize) -> Result<()> {
    if safe.num_users() != users || attacked.num_users() != users || users == 0 {
        return Err(Error::Dimension(format!(
            "reports carry {} and {} users, expected {users}",
            safe.num_users(),
            attacked.num_users()
        )));
    }
    Ok(())
}

/// `ΔR_u = (R̄ᵖ_u − R̃ᵖ_u) + (R̄ᶜ − R̃ᶜ)/U`.
pub fn rate_degradation(safe: &RateReport, attacked: &RateReport, users: usize) -> Result<Vec<f64>> {
    check_users(safe, attacked, users)?;
    let common = (safe.common_rate - attacked.common_rate) / users as f64;
    Ok(safe
        .private_rates
        .iter()
        .zip(&attacked.private_rates)
        .map(|(s, a)| (s - a) + common)
        .collect())
}

/// `κ = (1/U) Σ_u (1 − ΔR_u / (R̄ᶜ/U + R̄ᵖ_u))`, clamped to `[0, 1]`.
pub fn robustness_index(safe: &RateReport, attacked: &RateReport, users: usize) -> Result<f64> {
    Ok(robustness(safe, attacked, users)?.robustness_index)
}

/// Degradation and robustness index together.
pub fn robustness(safe: &RateReport, attacked: &RateReport, users: usize) -> Result<RobustnessReport> {
    let delta = rate_degradation(safe, attacked, users)?;
    let share = safe.common_rate / users as f64;
    let mut acc = 0.0;
    for (u, d) in delta.iter().enumerate() {
        let base = share + safe.private_rates[u];
        if !(base > 0.0) {
            return Err(Error::UndefinedBaseline(format!("user {u} has zero safe rate")));
        }
        acc += 1.0 - d / base;
    }
    Ok(RobustnessReport {
        per_user_degradation: delta,
        robustness_index: (acc / users as f64).clamp(0.0, 1.0),
    })
}
