//! Fixed-width bit vectors used for coefficient windows and solution words.
//!
//! A ribbon of width `w` manipulates `w`-bit coefficient vectors and, for the
//! interleaved layout, `w`-bit storage words. The trait below abstracts over
//! the unsigned integer widths we support so banding and solving code is
//! written once. `u8` is included for small exhaustive tests; production
//! configurations use 16 through 128 bits.

use std::fmt::Debug;
use std::ops::{BitAnd, BitOr, BitXor, Not, Shl, Shr};

pub trait RibbonWord:
    Copy
    + Eq
    + Debug
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
    + Shl<u32, Output = Self>
    + Shr<u32, Output = Self>
{
    const BITS: u32;
    const ZERO: Self;
    const ONE: Self;

    fn from_bit(bit: u64) -> Self;
    /// Low 64 bits of the word, truncating wider values.
    fn from_u64(v: u64) -> Self;
    /// Assemble from low/high 64-bit halves; the high half is ignored for
    /// words of 64 bits or fewer.
    fn from_halves(lo: u64, hi: u64) -> Self;
    fn trailing_zeros(self) -> u32;
    fn count_ones(self) -> u32;
    fn to_le_bytes_vec(self) -> Vec<u8>;
    fn from_le_slice(bytes: &[u8]) -> Self;

    #[inline]
    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    #[inline]
    fn parity(self) -> u64 {
        (self.count_ones() & 1) as u64
    }

    #[inline]
    fn bit(self, i: u32) -> u64 {
        (self >> i).parity_low()
    }

    #[inline]
    fn parity_low(self) -> u64 {
        if (self & Self::ONE) == Self::ONE {
            1
        } else {
            0
        }
    }

    /// Mask with the `n` lowest bits set; `n` must not exceed `BITS`.
    #[inline]
    fn low_mask(n: u32) -> Self {
        if n == 0 {
            Self::ZERO
        } else if n >= Self::BITS {
            !Self::ZERO
        } else {
            (Self::ONE << n).wrapping_sub_one()
        }
    }

    fn wrapping_sub_one(self) -> Self;
}

macro_rules! impl_ribbon_word {
    ($t:ty, $bits:expr, $bytes:expr) => {
        impl RibbonWord for $t {
            const BITS: u32 = $bits;
            const ZERO: Self = 0;
            const ONE: Self = 1;

            #[inline]
            fn from_bit(bit: u64) -> Self {
                (bit & 1) as $t
            }

            #[inline]
            fn from_u64(v: u64) -> Self {
                v as $t
            }

            #[inline]
            fn from_halves(lo: u64, hi: u64) -> Self {
                if Self::BITS > 64 {
                    ((lo as u128) | ((hi as u128) << 64)) as $t
                } else {
                    let _ = hi;
                    lo as $t
                }
            }

            #[inline]
            fn trailing_zeros(self) -> u32 {
                <$t>::trailing_zeros(self)
            }

            #[inline]
            fn count_ones(self) -> u32 {
                <$t>::count_ones(self)
            }

            #[inline]
            fn to_le_bytes_vec(self) -> Vec<u8> {
                self.to_le_bytes().to_vec()
            }

            #[inline]
            fn from_le_slice(bytes: &[u8]) -> Self {
                let mut buf = [0u8; $bytes];
                buf.copy_from_slice(&bytes[..$bytes]);
                <$t>::from_le_bytes(buf)
            }

            #[inline]
            fn wrapping_sub_one(self) -> Self {
                self.wrapping_sub(1)
            }
        }
    };
}

impl_ribbon_word!(u8, 8, 1);
impl_ribbon_word!(u16, 16, 2);
impl_ribbon_word!(u32, 32, 4);
impl_ribbon_word!(u64, 64, 8);
impl_ribbon_word!(u128, 128, 16);
