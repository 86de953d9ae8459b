//! Built-in invariant suites and attack timing.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attack::{aligned_reflection, aligned_relaxation, interference_matrix_fully, random_reflection, Architecture};
use crate::channel::{complex_normal, sample_channels, Scenario};
use crate::linalg::{
    duplication_matrix, frobenius, kron, project_symmetric_unitary, symmetrize, takagi, vec, vech, CMatrix, CVector, C64,
    CONSTRAINT_TOL, RECONSTRUCTION_TOL,
};
use crate::sim::{run_sweep, ExperimentSpec, Scheme};
use crate::transceiver::{allocate_power, common_precoder, private_precoders, ChannelGains, DEFAULT_GRID};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| complex_normal(rng, 1.0))
}

fn outcome(name: &'static str, check: impl FnOnce() -> Result<String, String>) -> SuiteOutcome {
    match check() {
        Ok(detail) => SuiteOutcome { name, passed: true, detail },
        Err(detail) => SuiteOutcome { name, passed: false, detail },
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn takagi_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for n in [1, 2, 3, 8, 16, 32, 64] {
        let s = symmetrize(&gaussian(&mut rng, n, n)).map_err(|e| e.to_string())?;
        let t = takagi(&s).map_err(|e| e.to_string())?;
        let u = &t.takagi_vectors;
        let unit = frobenius(&(u.adjoint() * u - CMatrix::identity(n, n)));
        let rec = frobenius(&(t.reconstruct() - &s)) / frobenius(&s);
        ensure(unit < CONSTRAINT_TOL, || format!("n = {n}: ‖UᴴU − I‖ = {unit:.2e}"))?;
        ensure(rec < RECONSTRUCTION_TOL, || format!("n = {n}: reconstruction {rec:.2e}"))?;
        worst = worst.max(rec);
    }
    Ok(format!("worst relative reconstruction {worst:.2e}"))
}

fn projection_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for n in [2, 5, 8] {
        let s = symmetrize(&gaussian(&mut rng, n, n)).map_err(|e| e.to_string())?;
        let theta = project_symmetric_unitary(&s).map_err(|e| e.to_string())?;
        let best = frobenius(&(&s - &theta));
        for _ in 0..200 {
            let other = project_symmetric_unitary(&symmetrize(&gaussian(&mut rng, n, n)).unwrap()).unwrap();
            ensure(best <= frobenius(&(&s - other)) + 1e-12, || format!("n = {n}: a random candidate is closer"))?;
        }
        ensure(frobenius(&(&theta - theta.transpose())) < CONSTRAINT_TOL, || "projection is not symmetric".into())?;
    }
    Ok("projection beats 600 random symmetric unitaries".into())
}

fn vectorization_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for n in [1, 2, 4, 9] {
        let d = duplication_matrix(n).map_err(|e| e.to_string())?.map(C64::from);
        let s = symmetrize(&gaussian(&mut rng, n, n)).unwrap();
        ensure(vec(&s) == &d * vech(&s).unwrap(), || format!("vec ≠ D vech at n = {n}"))?;
    }
    let (a, t, c) = (gaussian(&mut rng, 3, 3), gaussian(&mut rng, 3, 3), gaussian(&mut rng, 3, 3));
    let diff = (vec(&(&a * &t * &c)) - kron(&c.transpose(), &a) * vec(&t)).camax();
    ensure(diff < 1e-12, || format!("Kronecker identity off by {diff:.2e}"))?;
    Ok("duplication and Kronecker identities hold".into())
}

fn reflection_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut count = 0;
    for d in [1usize, 2, 4, 16] {
        let (m, u) = (4, 3);
        let g = gaussian(&mut rng, d, m);
        let gs: Vec<CVector> = (0..u).map(|_| gaussian(&mut rng, d, 1).column(0).into_owned()).collect();
        let mu = vec![1.0 / 3.0; 3];
        for arch in Architecture::ALL {
            let dg = if d % 2 == 0 { 2 } else { 1 };
            let sizes = arch.group_sizes(d, dg).map_err(|e| e.to_string())?;
            let r = random_reflection(arch, &sizes, &mut rng).map_err(|e| e.to_string())?;
            r.validate(CONSTRAINT_TOL).map_err(|e| e.to_string())?;
            let a = aligned_reflection(arch, &sizes, &g, &gs, &mu).map_err(|e| e.to_string())?;
            a.validate(CONSTRAINT_TOL).map_err(|e| e.to_string())?;
            count += 2;
        }
    }
    Ok(format!("{count} generated reflections pass the validator"))
}

fn relaxation_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..5 {
        let g = gaussian(&mut rng, 6, 4);
        let gs: Vec<CVector> = (0..3).map(|_| gaussian(&mut rng, 6, 1).column(0).into_owned()).collect();
        let mu = vec![1.0 / 3.0; 3];
        let relaxed = aligned_relaxation(&g, &gs, &mu, &[6]).map_err(|e| e.to_string())?;
        let sbar = interference_matrix_fully(&g, &gs, &mu).map_err(|e| e.to_string())?;
        let value = (&sbar * &relaxed.theta).norm_squared();
        let sigma2 = relaxed.singular_value.powi(2);
        ensure((value - sigma2).abs() <= 1e-9 * sigma2, || format!("‖S̄θ‖² = {value}, σ₁² = {sigma2}"))?;
    }
    Ok("‖S̄θ‖² = σ₁² on 5 instances".into())
}

fn transceiver_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let scenario = Scenario::default();
    for _ in 0..20 {
        let ch = sample_channels(&scenario, &mut rng);
        let est: Vec<CVector> = ch.direct.iter().map(|h| h + gaussian(&mut rng, 32, 1).column(0) * C64::from(3e-3)).collect();
        let (p, n) = (scenario.transmit_power_mw(), scenario.noise_power_mw());
        let w = private_precoders(&est, p, n).map_err(|e| e.to_string())?;
        let wc = common_precoder(&est).map_err(|e| e.to_string())?;
        let gains = ChannelGains::new(&ch.direct, &wc, &w).map_err(|e| e.to_string())?;
        let a = allocate_power(&gains, p, n, 1e-3, DEFAULT_GRID);
        ensure((a.alpha_common + 3.0 * a.alpha_private - 1.0).abs() < 1e-12, || "power budget violated".into())?;
        let r = gains.rates(a.alpha_common, a.alpha_private, p, n, 1e-3);
        let total = r.common_rate + r.private_rates.iter().sum::<f64>();
        ensure((r.sum_rate - total).abs() < 1e-12, || "sum rate is not R^c + Σ R^p".into())?;
        ensure(r.private_rates.iter().all(|&x| x >= 0.0) && r.common_rate >= 0.0, || "negative rate".into())?;
    }
    Ok("power budget and rate identities hold on 20 draws".into())
}

fn determinism_suite() -> Result<String, String> {
    let mut spec = ExperimentSpec::default();
    spec.scenario.num_elements = 10;
    spec.schemes = vec![Scheme::Rsma, Scheme::Sdma];
    spec.trials = 8;
    let a = run_sweep(&spec).map_err(|e| e.to_string())?;
    spec.parallel = false;
    let b = run_sweep(&spec).map_err(|e| e.to_string())?;
    ensure(a == b, || "serial and parallel sweeps differ".into())?;
    Ok("serial and parallel sweeps are identical".into())
}

/// Runs every suite.
pub fn run_suites() -> Vec<SuiteOutcome> {
    vec![
        outcome("takagi", takagi_suite),
        outcome("projection", projection_suite),
        outcome("vectorization", vectorization_suite),
        outcome("reflection-constraints", reflection_suite),
        outcome("qcqp-relaxation", relaxation_suite),
        outcome("transceiver", transceiver_suite),
        outcome("determinism", determinism_suite),
    ]
}

/// Median aligned-attack generation time for one architecture and size.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub num_elements: usize,
    pub architecture: Architecture,
    pub seconds: f64,
}

/// Times aligned-attack generation on default-scenario channels.
pub fn bench_attacks(element_counts: &[usize], repetitions: usize, seed: u64) -> crate::error::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &d in element_counts {
        let scenario = Scenario {
            num_elements: d,
            ..Scenario::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<_> = (0..repetitions.max(1)).map(|_| sample_channels(&scenario, &mut rng)).collect();
        for arch in Architecture::ALL {
            let sizes = arch.group_sizes(d, scenario.group_size)?;
            let mut times = Vec::with_capacity(draws.len());
            for ch in &draws {
                let start = Instant::now();
                let r = aligned_reflection(arch, &sizes, &ch.bs_ris, &ch.ris_user, &scenario.adversary_weights)?;
                times.push(start.elapsed().as_secs_f64());
                std::hint::black_box(r);
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                num_elements: d,
                architecture: arch,
                seconds: times[times.len() / 2],
            });
        }
    }
    Ok(rows)
}
