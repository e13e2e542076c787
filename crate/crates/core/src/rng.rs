use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Master seed for every randomized operation.
///
/// Child seeds are derived by hashing, never by drawing from a shared
/// generator, so a computation's randomness depends only on its position in
/// the call tree and not on scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RngSeed(pub u64);

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub const fn new(seed: u64) -> Self {
        RngSeed(seed)
    }

    /// Child seed for `(role, index)`.
    pub fn derive(self, role: u64, index: u64) -> RngSeed {
        RngSeed(mix(mix(self.0 ^ mix(role)) ^ index))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

/// Role tags for derived seeds.
pub(crate) mod role {
    pub const TRAIN: u64 = 2;
    pub const KERNEL: u64 = 3;
    pub const FOLDS: u64 = 4;
    pub const BOOTSTRAP: u64 = 5;
    pub const SPLIT: u64 = 6;
    pub const CALIBRATION: u64 = 7;
}
