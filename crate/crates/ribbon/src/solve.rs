//! Back-substitution and the solved matrix `Z`.
//!
//! Two memory layouts are supported. Plain column-major keeps each solution
//! column contiguous and is the simple reference layout. Interleaved
//! column-major (ICML) groups rows into blocks of `w` and stores each block
//! column-major in `w`-bit words, so a query touches at most two adjacent
//! words per column. Blocks may carry `r_lower` or `r_lower + 1` columns;
//! the narrow blocks come first, which lets a query derive its column count
//! from its starting block alone.

use crate::banding::{low_mask64, BandingStorage};
use crate::config::Variant;
use crate::error::RibbonError;
use crate::hash::{self, KeyHash};
use crate::words::RibbonWord;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Layout {
    ColumnMajor,
    InterleavedColumnMajor,
}

/// How to fill solution rows whose banding slot is empty.
///
/// Member queries never observe free rows' values, but non-member queries do:
/// homogeneous filters need them pseudo-random, while zeros keep standard
/// filters compressible.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FreeVariablePolicy {
    Zeros,
    /// Row `i` gets `(p * i) mod 2^bits` for the given large odd `p`.
    PseudoRandomOddMultiple(u64),
    /// Row `i` gets a stateless mix of the seed and `i`.
    TrueRandom(u64),
}

/// Default multiplier for [`FreeVariablePolicy::PseudoRandomOddMultiple`].
pub const FREE_VARIABLE_MULTIPLIER: u64 = 0x6A09_E667_F3BC_C909;

impl FreeVariablePolicy {
    #[inline]
    fn value(&self, row: usize, bits: u32) -> u64 {
        match *self {
            FreeVariablePolicy::Zeros => 0,
            FreeVariablePolicy::PseudoRandomOddMultiple(p) => {
                p.wrapping_mul(row as u64) & low_mask64(bits)
            }
            FreeVariablePolicy::TrueRandom(seed) => {
                hash::mix64(seed ^ (row as u64).wrapping_mul(hash::SEED_MULTIPLIER))
                    & low_mask64(bits)
            }
        }
    }
}

/// The solved matrix `Z`, immutable after construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolutionStorage<W> {
    layout: Layout,
    m: usize,
    w: u32,
    r_lower: u32,
    upper_start_block: usize,
    words: Vec<W>,
}

impl<W: RibbonWord> SolutionStorage<W> {
    #[inline]
    pub fn layout(&self) -> Layout {
        self.layout
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.w
    }

    #[inline]
    pub fn r_lower(&self) -> u32 {
        self.r_lower
    }

    #[inline]
    pub fn upper_start_block(&self) -> usize {
        self.upper_start_block
    }

    #[inline]
    pub fn num_starts(&self) -> usize {
        self.m - self.w as usize + 1
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.m.div_ceil(self.w as usize)
    }

    /// Columns stored for block `k`.
    #[inline]
    pub fn block_cols(&self, k: usize) -> u32 {
        self.r_lower + (k >= self.upper_start_block) as u32
    }

    /// Columns available to a query beginning at `start`. Queries that begin
    /// in a narrow block and cross into a wide one use only the narrow count.
    #[inline]
    pub fn cols_at_start(&self, start: usize) -> u32 {
        self.block_cols(start / self.w as usize)
    }

    /// Greatest number of columns stored for any block.
    #[inline]
    pub fn max_cols(&self) -> u32 {
        self.r_lower + (self.upper_start_block < self.num_blocks()) as u32
    }

    /// First word of block `k` in the interleaved layout.
    #[inline]
    fn icml_base(&self, k: usize) -> usize {
        k * self.r_lower as usize + k.saturating_sub(self.upper_start_block)
    }

    #[inline]
    fn col_major_words_per_col(&self) -> usize {
        self.m.div_ceil(W::BITS as usize)
    }

    fn expected_word_count(
        layout: Layout,
        m: usize,
        w: u32,
        r_lower: u32,
        upper_start_block: usize,
    ) -> usize {
        match layout {
            Layout::InterleavedColumnMajor => {
                let nb = m / w as usize;
                nb * r_lower as usize + (nb - upper_start_block)
            }
            Layout::ColumnMajor => {
                let nb = m.div_ceil(w as usize);
                let max_cols = r_lower as usize + usize::from(upper_start_block < nb);
                m.div_ceil(W::BITS as usize) * max_cols
            }
        }
    }

    /// Rebuild a storage from raw parts, e.g. when deserializing.
    pub fn from_parts(
        layout: Layout,
        m: usize,
        w: u32,
        r_lower: u32,
        upper_start_block: usize,
        words: Vec<W>,
    ) -> Result<Self, RibbonError> {
        validate_geometry::<W>(layout, m, w, r_lower, upper_start_block)?;
        let expected = Self::expected_word_count(layout, m, w, r_lower, upper_start_block);
        if words.len() != expected {
            return Err(RibbonError::InvalidConfig(format!(
                "solution has {} words, geometry needs {}",
                words.len(),
                expected
            )));
        }
        Ok(SolutionStorage {
            layout,
            m,
            w,
            r_lower,
            upper_start_block,
            words,
        })
    }

    #[inline]
    pub fn words(&self) -> &[W] {
        &self.words
    }

    /// Storage size in bits. For the interleaved layout this is exactly the
    /// sum over blocks of `cols(k) * w`.
    #[inline]
    pub fn total_bits(&self) -> u64 {
        self.words.len() as u64 * W::BITS as u64
    }

    /// Bits `[start, start + w)` of column `j`.
    #[inline]
    fn column_window(&self, start: usize, j: u32) -> W {
        match self.layout {
            Layout::InterleavedColumnMajor => {
                let w = self.w as usize;
                let k = start / w;
                let off = (start % w) as u32;
                let lo = self.words[self.icml_base(k) + j as usize];
                if off == 0 {
                    lo
                } else {
                    // start <= m - w puts block k + 1 in bounds whenever the
                    // offset is nonzero.
                    let hi = self.words[self.icml_base(k + 1) + j as usize];
                    (lo >> off) | (hi << (self.w - off))
                }
            }
            Layout::ColumnMajor => {
                let wb = W::BITS as usize;
                let per_col = self.col_major_words_per_col();
                let base = j as usize * per_col;
                let wi = start / wb;
                let off = (start % wb) as u32;
                let lo = self.words[base + wi] >> off;
                if off > 0 && wi + 1 < per_col {
                    lo | (self.words[base + wi + 1] << (W::BITS - off))
                } else {
                    lo
                }
            }
        }
    }

    /// XOR of the solution rows selected by `coeff` from `start`, one parity
    /// bit per available column.
    pub fn retrieve(&self, start: usize, coeff: W) -> u64 {
        debug_assert!(start <= self.m - self.w as usize);
        let cols = self.cols_at_start(start);
        let mut out = 0u64;
        for j in 0..cols {
            out |= (self.column_window(start, j) & coeff).parity() << j;
        }
        out
    }

    /// Does the retrieved value equal `expected` on the columns available at
    /// `start`? Equivalent to comparing [`Self::retrieve`], but for more than
    /// four columns the comparison short-circuits on the first mismatch.
    pub fn query_match(&self, start: usize, coeff: W, expected: u64) -> bool {
        let cols = self.cols_at_start(start);
        if cols <= 4 {
            return self.retrieve(start, coeff) == expected & low_mask64(cols);
        }
        for j in 0..cols {
            let bit = (self.column_window(start, j) & coeff).parity();
            if bit != (expected >> j) & 1 {
                return false;
            }
        }
        true
    }

    /// Drop the `k` highest solution columns, trading false-positive rate for
    /// space. Queries against the returned storage check `k` fewer bits.
    pub fn drop_columns(&self, k: u32) -> Result<Self, RibbonError> {
        if k >= self.r_lower {
            return Err(RibbonError::InvalidConfig(format!(
                "cannot drop {} of {} guaranteed columns",
                k, self.r_lower
            )));
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let r_lower = self.r_lower - k;
        let words = match self.layout {
            Layout::InterleavedColumnMajor => {
                let mut words = Vec::with_capacity(
                    self.words.len() - self.num_blocks() * k as usize,
                );
                for kb in 0..self.num_blocks() {
                    let base = self.icml_base(kb);
                    let cols = (self.block_cols(kb) - k) as usize;
                    words.extend_from_slice(&self.words[base..base + cols]);
                }
                words
            }
            Layout::ColumnMajor => {
                let keep = (self.max_cols() - k) as usize * self.col_major_words_per_col();
                self.words[..keep].to_vec()
            }
        };
        Ok(SolutionStorage {
            layout: self.layout,
            m: self.m,
            w: self.w,
            r_lower,
            upper_start_block: self.upper_start_block,
            words,
        })
    }
}

fn validate_geometry<W: RibbonWord>(
    layout: Layout,
    m: usize,
    w: u32,
    r_lower: u32,
    upper_start_block: usize,
) -> Result<(), RibbonError> {
    if w == 0 || w > W::BITS {
        return Err(RibbonError::InvalidConfig(format!(
            "ribbon width {} must be in [1, {}]",
            w,
            W::BITS
        )));
    }
    if m < w as usize {
        return Err(RibbonError::InvalidConfig(format!(
            "m = {m} smaller than ribbon width {w}"
        )));
    }
    if r_lower == 0 {
        return Err(RibbonError::InvalidConfig("r_lower must be at least 1".into()));
    }
    match layout {
        Layout::InterleavedColumnMajor => {
            if w != W::BITS {
                return Err(RibbonError::InvalidConfig(format!(
                    "interleaved layout requires word-width ribbon ({} != {})",
                    w,
                    W::BITS
                )));
            }
            if !m.is_multiple_of(w as usize) {
                return Err(RibbonError::InvalidConfig(format!(
                    "interleaved layout requires m ({m}) to be a multiple of w ({w})"
                )));
            }
            if upper_start_block > m / w as usize {
                return Err(RibbonError::InvalidConfig(
                    "upper_start_block exceeds block count".into(),
                ));
            }
        }
        Layout::ColumnMajor => {
            if upper_start_block > m.div_ceil(w as usize) {
                return Err(RibbonError::InvalidConfig(
                    "upper_start_block exceeds block count".into(),
                ));
            }
        }
    }
    let ceil_r = r_lower
        + u32::from(upper_start_block < m.div_ceil(w as usize));
    if ceil_r > 64 {
        return Err(RibbonError::InvalidConfig(
            "more than 64 solution columns".into(),
        ));
    }
    Ok(())
}

/// Solve the finalized system bottom-up and render `Z` in the requested
/// layout.
///
/// Occupied row `i` satisfies `c_i . Z[i, i+w) = b_i`; since `c_i` starts
/// with a 1 its row is determined by later rows. Empty rows take the policy
/// value. The last `w` computed bits of every column ride along in one
/// register each and are flushed a word at a time.
pub fn back_substitute<W: RibbonWord>(
    banding: &BandingStorage<W>,
    policy: FreeVariablePolicy,
    layout: Layout,
    r_lower: u32,
    upper_start_block: usize,
) -> Result<SolutionStorage<W>, RibbonError> {
    let m = banding.m();
    let w = banding.w();
    validate_geometry::<W>(layout, m, w, r_lower, upper_start_block)?;
    let nb = m.div_ceil(w as usize);
    let max_cols = r_lower + u32::from(upper_start_block < nb);
    if max_cols > banding.rhs_bits() {
        return Err(RibbonError::InvalidConfig(format!(
            "banding stores {}-bit rhs but layout needs {} columns",
            banding.rhs_bits(),
            max_cols
        )));
    }

    let word_count =
        SolutionStorage::<W>::expected_word_count(layout, m, w, r_lower, upper_start_block);
    let mut words = vec![W::ZERO; word_count];
    let mut state = vec![W::ZERO; max_cols as usize];
    let wb = W::BITS as usize;

    for i in (0..m).rev() {
        let z_row = match banding.row(i) {
            Some((c, b)) => {
                let selector = c >> 1;
                let mut z = 0u64;
                for (j, st) in state.iter().enumerate() {
                    let prior = (selector & *st).parity();
                    z |= (((b >> j) & 1) ^ prior) << j;
                }
                z
            }
            None => policy.value(i, max_cols),
        };
        for (j, st) in state.iter_mut().enumerate() {
            *st = (*st << 1) | W::from_bit(z_row >> j);
        }
        match layout {
            Layout::InterleavedColumnMajor => {
                if i % w as usize == 0 {
                    let k = i / w as usize;
                    let base = k * r_lower as usize + k.saturating_sub(upper_start_block);
                    let cols = r_lower + (k >= upper_start_block) as u32;
                    words[base..base + cols as usize].copy_from_slice(&state[..cols as usize]);
                }
            }
            Layout::ColumnMajor => {
                if i % wb == 0 {
                    let wi = i / wb;
                    let per_col = m.div_ceil(wb);
                    for (j, st) in state.iter().enumerate() {
                        words[j * per_col + wi] = *st;
                    }
                }
            }
        }
    }

    Ok(SolutionStorage {
        layout,
        m,
        w,
        r_lower,
        upper_start_block,
        words,
    })
}

/// Membership check against a solved filter for an already-seeded hash.
///
/// Standard (and balanced) filters compare the retrieved value against the
/// key's fingerprint; homogeneous filters accept iff it is zero.
#[inline]
pub fn filter_query<W: RibbonWord>(
    z: &SolutionStorage<W>,
    seeded: KeyHash,
    variant: Variant,
    smash: u32,
    fp_bits: u32,
) -> bool {
    let start = hash::start_in_range(seeded, z.num_starts(), smash);
    let coeff = hash::coefficient_vector::<W>(seeded, z.w());
    let expected = match variant {
        Variant::Homogeneous => 0,
        Variant::Standard | Variant::Balanced => hash::fingerprint(seeded, fp_bits),
    };
    z.query_match(start, coeff, expected)
}
