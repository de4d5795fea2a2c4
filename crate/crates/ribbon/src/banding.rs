//! Incremental boolean banding: the reduced linear system and insertion.
//!
//! The system `M` has one slot per solution row. Row `i` is either empty
//! (`c_i == 0`) or holds an equation `c_i . Z[i, i+w) = b_i` whose coefficient
//! vector starts with a 1. Inserting a key's equation walks forward from its
//! start row, XOR-ing against occupied rows and shifting off leading zeroes,
//! until it lands in an empty row or cancels out entirely. Insertions can be
//! undone by clearing the rows they filled, which is what the balanced
//! builder uses to bump whole buckets.

use crate::error::RibbonError;
use crate::words::RibbonWord;

/// A key's reduced equation: start row, `w`-bit coefficient vector with bit 0
/// set, and a right-hand side of up to 64 bits.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Equation<W> {
    pub start: usize,
    pub coeff: W,
    pub rhs: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InsertOutcome {
    /// The equation now occupies this row.
    Inserted(usize),
    /// The equation was implied by earlier ones; nothing was written.
    Redundant,
    /// The equation contradicts earlier ones; nothing was written.
    Inconsistent,
}

impl InsertOutcome {
    #[inline]
    pub fn is_success(self) -> bool {
        !matches!(self, InsertOutcome::Inconsistent)
    }
}

#[derive(Clone, Debug)]
pub struct BandingStorage<W> {
    m: usize,
    w: u32,
    rhs_bits: u32,
    coeff: Vec<W>,
    rhs: Vec<u64>,
    occupied: usize,
    displacement: u64,
}

impl<W: RibbonWord> BandingStorage<W> {
    /// Fresh all-empty system with `m` rows for ribbon width `w` and
    /// `rhs_bits`-bit right-hand sides.
    pub fn new(m: usize, w: u32, rhs_bits: u32) -> Result<Self, RibbonError> {
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
        if rhs_bits == 0 || rhs_bits > 64 {
            return Err(RibbonError::InvalidConfig(format!(
                "rhs width {rhs_bits} outside [1, 64]"
            )));
        }
        Ok(BandingStorage {
            m,
            w,
            rhs_bits,
            coeff: vec![W::ZERO; m],
            rhs: vec![0; m],
            occupied: 0,
            displacement: 0,
        })
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
    pub fn rhs_bits(&self) -> u32 {
        self.rhs_bits
    }

    #[inline]
    pub fn occupied_count(&self) -> usize {
        self.occupied
    }

    /// Total displacement (sum of `row - start` over successful insertions).
    /// Diagnostic only; `backtrack` does not rewind it.
    #[inline]
    pub fn displacement(&self) -> u64 {
        self.displacement
    }

    #[inline]
    pub fn is_occupied(&self, row: usize) -> bool {
        !self.coeff[row].is_zero()
    }

    /// Coefficients and rhs of `row`, or `None` if the row is empty.
    #[inline]
    pub fn row(&self, row: usize) -> Option<(W, u64)> {
        if self.is_occupied(row) {
            Some((self.coeff[row], self.rhs[row]))
        } else {
            None
        }
    }

    /// Add one equation to the system. On `Inconsistent` the storage is left
    /// exactly as it was before the call; the loop only ever writes when it
    /// finds an empty row.
    pub fn insert(&mut self, eq: &Equation<W>) -> InsertOutcome {
        debug_assert!(eq.start + self.w as usize <= self.m, "start out of range");
        debug_assert!(!eq.coeff.is_zero() && eq.coeff.bit(0) == 1, "coeff must start with 1");
        debug_assert!(
            eq.rhs & !low_mask64(self.rhs_bits) == 0,
            "rhs wider than {} bits",
            self.rhs_bits
        );
        let mut i = eq.start;
        let mut c = eq.coeff;
        let mut b = eq.rhs;
        loop {
            if self.coeff[i].is_zero() {
                self.coeff[i] = c;
                self.rhs[i] = b;
                self.occupied += 1;
                self.displacement += (i - eq.start) as u64;
                return InsertOutcome::Inserted(i);
            }
            c = c ^ self.coeff[i];
            b ^= self.rhs[i];
            if c.is_zero() {
                return if b == 0 {
                    InsertOutcome::Redundant
                } else {
                    InsertOutcome::Inconsistent
                };
            }
            let j = c.trailing_zeros();
            i += j as usize;
            c = c >> j;
        }
    }

    /// Insert equations in order, stopping before the first inconsistent one.
    /// Returns how many were accepted (redundant ones count as accepted); the
    /// storage reflects exactly that prefix.
    pub fn fill_until_failure<I>(&mut self, eqs: I) -> usize
    where
        I: IntoIterator<Item = Equation<W>>,
    {
        let mut accepted = 0;
        for eq in eqs {
            if !self.insert(&eq).is_success() {
                break;
            }
            accepted += 1;
        }
        accepted
    }

    /// Undo a batch of insertions by clearing the rows they filled. `rows`
    /// must be the distinct row indices reported by `Inserted` outcomes of
    /// the most recent batch; any index that is currently empty (or listed
    /// twice) is rejected before anything is modified.
    pub fn backtrack(&mut self, rows: &[usize]) -> Result<(), RibbonError> {
        for &row in rows {
            if row >= self.m || !self.is_occupied(row) {
                return Err(RibbonError::BacktrackEmptyRow { row });
            }
        }
        let mut sorted: Vec<usize> = rows.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(RibbonError::BacktrackEmptyRow { row: sorted[0] });
        }
        for &row in rows {
            self.coeff[row] = W::ZERO;
            self.rhs[row] = 0;
        }
        self.occupied -= rows.len();
        Ok(())
    }

    /// Indices of occupied rows, ascending.
    pub fn occupied_rows(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.is_occupied(i)).collect()
    }
}

// Equality compares the linear system itself; the displacement diagnostic is
// intentionally excluded so a backtracked batch restores equality.
impl<W: RibbonWord> PartialEq for BandingStorage<W> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.w == other.w
            && self.rhs_bits == other.rhs_bits
            && self.occupied == other.occupied
            && self.coeff == other.coeff
            && self.rhs == other.rhs
    }
}

impl<W: RibbonWord> Eq for BandingStorage<W> {}

#[inline]
pub(crate) fn low_mask64(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
