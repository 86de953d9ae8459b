//! Monte-Carlo link-level simulator for a multi-user MISO downlink in which an
//! adversarial beyond-diagonal RIS reconfigures itself between uplink channel
//! training and downlink data transmission.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: Takagi factorization, symmetric-unitary projection,
//!   duplication matrices and the dominant singular vector.
//! - [`channel`]: scenario geometry, Rayleigh channels and imperfect CSI.
//! - [`attack`]: random and aligned reflection designs for single-, group- and
//!   fully connected surfaces.
//! - [`transceiver`]: RZF/MF precoders, power allocation, SINRs and rates for
//!   RSMA and SDMA.
//! - [`metrics`]: per-user rate degradation and the robustness index.
//! - [`sim`]: seeded trial engine, sweeps and CSV output.
//! - [`config`]: the plain `key = value` experiment file.
//! - [`verify`]: self-contained invariant suites and attack timing.
//!
//! ```
//! use bdris::sim::{ExperimentSpec, run_sweep};
//!
//! let mut spec = ExperimentSpec::default();
//! spec.scenario.num_elements = 20;
//! spec.scenario.group_size = 5;
//! spec.trials = 4;
//! let rows = run_sweep(&spec).unwrap();
//! assert_eq!(rows.len(), 1);
//! assert!(rows[0].mean_sum_rate > 0.0);
//! ```

pub mod attack;
pub mod channel;
pub mod config;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod sim;
pub mod transceiver;
pub mod verify;

mod error;

pub use error::Error;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/system-model.md")]
    pub mod system_model {}
    #[doc = include_str!("../../../book/src/reflection.md")]
    pub mod reflection {}
    #[doc = include_str!("../../../book/src/aligned-attack.md")]
    pub mod aligned_attack {}
    #[doc = include_str!("../../../book/src/transceiver.md")]
    pub mod transceiver {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub mod metrics {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
