//! Construction parameters shared by every variant.

use crate::error::RibbonError;

pub const SUPPORTED_WIDTHS: [u32; 4] = [16, 32, 64, 128];

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Variant {
    Standard,
    Homogeneous,
    Balanced,
}

impl Variant {
    pub fn code(self) -> u8 {
        match self {
            Variant::Standard => 0,
            Variant::Homogeneous => 1,
            Variant::Balanced => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Variant::Standard),
            1 => Some(Variant::Homogeneous),
            2 => Some(Variant::Balanced),
            _ => None,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Variant::Standard => "standard",
            Variant::Homogeneous => "homogeneous",
            Variant::Balanced => "balanced",
        };
        f.write_str(name)
    }
}

/// Everything a build or query needs to know about a ribbon's shape.
///
/// `m` is the number of solution rows, `w` the ribbon width. Bits per key are
/// described by `r_lower` and `upper_start_block`: solution blocks (groups of
/// `w` rows) with index below `upper_start_block` carry `r_lower` columns,
/// later blocks carry `r_lower + 1`. An integral `r` therefore has
/// `upper_start_block == m / w`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RibbonConfig {
    pub m: usize,
    pub w: u32,
    pub r_lower: u32,
    pub upper_start_block: usize,
    pub smash: u32,
    pub seed: u64,
    pub variant: Variant,
}

impl RibbonConfig {
    pub fn validate(&self) -> Result<(), RibbonError> {
        if !SUPPORTED_WIDTHS.contains(&self.w) {
            return Err(RibbonError::InvalidConfig(format!(
                "ribbon width {} not in {:?}",
                self.w, SUPPORTED_WIDTHS
            )));
        }
        if self.m < self.w as usize {
            return Err(RibbonError::InvalidConfig(format!(
                "m = {} smaller than ribbon width {}",
                self.m, self.w
            )));
        }
        if !self.m.is_multiple_of(self.w as usize) {
            return Err(RibbonError::InvalidConfig(format!(
                "m = {} not a multiple of ribbon width {}",
                self.m, self.w
            )));
        }
        if self.r_lower == 0 || self.r_lower > 64 {
            return Err(RibbonError::InvalidConfig(format!(
                "r_lower = {} outside [1, 64]",
                self.r_lower
            )));
        }
        if self.fingerprint_bits() > 64 {
            return Err(RibbonError::InvalidConfig(
                "fractional r with r_lower = 64 needs 65 rhs bits".to_string(),
            ));
        }
        if self.smash > self.w / 2 {
            return Err(RibbonError::InvalidConfig(format!(
                "smash {} exceeds w/2 = {}",
                self.smash,
                self.w / 2
            )));
        }
        if self.upper_start_block > self.num_blocks() {
            return Err(RibbonError::InvalidConfig(format!(
                "upper_start_block {} exceeds block count {}",
                self.upper_start_block,
                self.num_blocks()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.m / self.w as usize
    }

    /// Number of valid start positions, `m - w + 1`.
    #[inline]
    pub fn num_starts(&self) -> usize {
        self.m - self.w as usize + 1
    }

    /// Right-hand-side width in bits: `ceil(r)` of the configured rate.
    #[inline]
    pub fn fingerprint_bits(&self) -> u32 {
        if self.upper_start_block < self.num_blocks() {
            self.r_lower + 1
        } else {
            self.r_lower
        }
    }

    /// Total solution storage in bits (interleaved layout accounting).
    #[inline]
    pub fn solution_bits(&self) -> u64 {
        let nb = self.num_blocks() as u64;
        let upper = nb - self.upper_start_block as u64;
        (nb * self.r_lower as u64 + upper) * self.w as u64
    }

    /// Average solution columns per row.
    pub fn average_r(&self) -> f64 {
        self.solution_bits() as f64 / self.m as f64
    }
}

/// Default smash rule: half-width smash for small Standard ribbons (below the
/// natural shard size of about `w^2 / 4` rows), none otherwise. Balanced
/// plans that small degenerate to a single standard shard, so they share the
/// rule; homogeneous construction cannot fail and never smashes.
pub fn default_smash(variant: Variant, m: usize, w: u32) -> u32 {
    match variant {
        Variant::Standard | Variant::Balanced if m < (w as usize * w as usize) / 4 => w / 2,
        _ => 0,
    }
}
