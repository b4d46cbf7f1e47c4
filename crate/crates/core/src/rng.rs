//! Reproducible random streams.
//!
//! Every random draw in the simulator comes from a ChaCha20 stream whose key is
//! derived from `(experiment seed, purpose)` with the SplitMix64 finalizer and
//! whose 64-bit stream id is a caller-chosen index (a trial, a round or a
//! device). ChaCha20 output is specified bit-for-bit, so traces and sampling
//! decisions are identical on every platform. No wall-clock entropy is used.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a stream is used for. The tag is mixed into the key so that, for
/// example, the fading draws of trial 3 never alias the sampling draws of
/// trial 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Placement,
    Fading,
    Sampling,
    Noise,
    Problem,
    Probe,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Placement => 0x706c_6163_656d_656e,
            Purpose::Fading => 0x6661_6469_6e67_0001,
            Purpose::Sampling => 0x7361_6d70_6c69_6e67,
            Purpose::Noise => 0x6e6f_6973_6500_0002,
            Purpose::Problem => 0x7072_6f62_6c65_6d00,
            Purpose::Probe => 0x7072_6f62_6500_0003,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 256-bit ChaCha key for `(seed, purpose)`.
pub fn derive_key(seed: u64, purpose: Purpose) -> [u8; 32] {
    let mut state = seed ^ purpose.tag().rotate_left(17);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// The stream `index` of the generator keyed by `(seed, purpose)`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(derive_key(seed, purpose));
    rng.set_stream(index);
    rng
}

/// Packs two small indices (e.g. round and device) into one stream id.
pub fn pair_index(major: u64, minor: u64) -> u64 {
    (major << 24) | (minor & 0xff_ffff)
}
