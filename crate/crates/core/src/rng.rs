//! Counter-derived random streams.
//!
//! Every trial owns a handful of independent ChaCha8 streams, keyed by the
//! run seed and selected by `(trial_index, purpose)`. Streams never depend on
//! scheduling order, so serial and parallel runs draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Channels,
    TrainingReflection,
    BsCsi,
    AttackerCsi,
    AttackRandom,
}

impl Purpose {
    pub fn label(self) -> &'static str {
        match self {
            Purpose::Channels => "channels",
            Purpose::TrainingReflection => "train-ris",
            Purpose::BsCsi => "bs-csi",
            Purpose::AttackerCsi => "attacker-csi",
            Purpose::AttackRandom => "attack-random",
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// FNV-1a over the label, folded into the trial index.
fn stream_id(trial_index: u64, purpose: Purpose) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.label().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h ^ splitmix64(trial_index))
}

/// Stream for one `(seed, trial_index, purpose)` triple.
pub fn stream(seed: u64, trial_index: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream_id(trial_index, purpose));
    rng
}
