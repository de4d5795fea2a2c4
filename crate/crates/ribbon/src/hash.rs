//! Hash expansion: start position, coefficient vector and fingerprint.
//!
//! The library consumes a single avalanche-quality 64-bit hash per key and
//! expands it into everything a ribbon needs. Each consumer multiplies the
//! hash by its own large odd constant so that, in particular, the start
//! position (which uses the high bits via a multiply-high range reduction)
//! stays decorrelated from coefficient and fingerprint bits. The constants
//! are pinned in `FORMAT.md`; changing any of them breaks serialized-filter
//! compatibility.

use crate::words::RibbonWord;

/// Multiplier applied after XOR-ing in a seed; odd, so the map is bijective.
pub const SEED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
/// Start-position consumer.
pub const START_MULTIPLIER: u64 = 0xBF58_476D_1CE4_E5B9;
/// Coefficient-vector consumer (low 64 bits).
pub const COEFF_MULTIPLIER: u64 = 0xFF51_AFD7_ED55_8CCD;
/// Second multiply for the high half of 128-bit coefficient vectors.
pub const COEFF_MULTIPLIER_HI: u64 = 0xC4CE_B9FE_1A85_EC53;
/// Fingerprint consumer.
pub const FINGERPRINT_MULTIPLIER: u64 = 0x94D0_49BB_1331_11EB;
/// Primary-shard consumer (balanced variant).
pub const SHARD_MULTIPLIER: u64 = 0xD6E8_FEB8_6659_FD93;
/// Secondary-shard consumer (balanced variant).
pub const SECONDARY_MULTIPLIER: u64 = 0xA076_1D64_78BD_642F;
/// Bump-bucket consumer (balanced variant).
pub const BUCKET_MULTIPLIER: u64 = 0xE703_7ED1_A0B4_28DB;

/// An avalanche-quality 64-bit hash of a key. The library never sees raw
/// keys; hashing them down to 64 bits is the caller's (or the CLI's) job.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct KeyHash(pub u64);

impl From<u64> for KeyHash {
    fn from(v: u64) -> Self {
        KeyHash(v)
    }
}

/// Remix a key hash with a seed: `(h XOR seed) * SEED_MULTIPLIER`.
///
/// Bijective for every seed, and cheap enough to apply per query. Retrying a
/// failed construction with a different seed yields an independent success
/// probability.
#[inline]
pub fn derive_seeded_hash(h: KeyHash, seed: u64) -> KeyHash {
    KeyHash((h.0 ^ seed).wrapping_mul(SEED_MULTIPLIER))
}

/// Multiply-high range reduction of `word` onto `[0, p)`.
#[inline]
pub fn fastrange64(word: u64, p: u64) -> u64 {
    debug_assert!(p > 0);
    (((word as u128) * (p as u128)) >> 64) as u64
}

/// Start position on `[0, num_starts)` with optional smash.
///
/// With `smash == 0` the distribution is uniform. With `smash = l > 0` the
/// value is sampled uniformly from an interval widened by `l - 1` on both
/// sides and clamped with min/max, so each endpoint receives `l` times the
/// probability mass of an interior position. This fills the corners of
/// near-square systems.
#[inline]
pub fn start_in_range(h: KeyHash, num_starts: usize, smash: u32) -> usize {
    debug_assert!(num_starts >= 1);
    let mixed = h.0.wrapping_mul(START_MULTIPLIER);
    if smash == 0 {
        return fastrange64(mixed, num_starts as u64) as usize;
    }
    let pad = (smash - 1) as u64;
    let sampled = fastrange64(mixed, num_starts as u64 + 2 * pad);
    (sampled.saturating_sub(pad) as usize).min(num_starts - 1)
}

/// Coefficient vector: `w` pseudo-random bits with bit 0 forced to 1.
///
/// Bits come from the top of `h * COEFF_MULTIPLIER`; widths above 64 take a
/// second chained odd multiply for the high half.
#[inline]
pub fn coefficient_vector<W: RibbonWord>(h: KeyHash, w: u32) -> W {
    debug_assert!(w >= 1 && w <= W::BITS);
    if w <= 64 {
        let bits = h.0.wrapping_mul(COEFF_MULTIPLIER) >> (64 - w);
        W::from_u64(bits | 1)
    } else {
        let lo = h.0.wrapping_mul(COEFF_MULTIPLIER);
        let hi = lo.wrapping_mul(COEFF_MULTIPLIER_HI) >> (128 - w);
        W::from_halves(lo | 1, hi)
    }
}

/// `r`-bit fingerprint, `1 <= r <= 64`: the top `r` bits of
/// `h * FINGERPRINT_MULTIPLIER`.
#[inline]
pub fn fingerprint(h: KeyHash, r: u32) -> u64 {
    debug_assert!((1..=64).contains(&r));
    h.0.wrapping_mul(FINGERPRINT_MULTIPLIER) >> (64 - r)
}

/// Stateless splitmix-style generator; used for deterministic pseudo-random
/// streams in measurements and for the seeded free-variable policy.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    #[inline]
    pub fn next_hash(&mut self) -> KeyHash {
        KeyHash(self.next_u64())
    }
}

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
