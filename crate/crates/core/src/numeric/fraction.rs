/// Fixed-point fraction in `[0, 1]` with 62 fractional bits (Q0.62).
///
/// All arithmetic is exact at 62 bits with truncation toward zero, so
/// keystream computations are bit-identical across platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction64 {
    bits: u64,
}

impl Fraction64 {
    pub const FRACTION_BITS: u32 = 62;
    const ONE_BITS: u64 = 1 << 62;
    const MASK: u64 = (1 << 62) - 1;

    pub const ZERO: Fraction64 = Fraction64 { bits: 0 };
    pub const ONE: Fraction64 = Fraction64 {
        bits: Self::ONE_BITS,
    };
    pub const HALF: Fraction64 = Fraction64 {
        bits: 1 << 61,
    };

    /// Builds a fraction from raw Q0.62 bits; values above one saturate.
    pub fn from_bits(bits: u64) -> Self {
        Fraction64 {
            bits: bits.min(Self::ONE_BITS),
        }
    }

    /// Truncates an `f64` in `[0, 1]` to Q0.62.
    pub fn from_f64(v: f64) -> Self {
        assert!((0.0..=1.0).contains(&v), "fraction out of [0, 1]: {v}");
        Fraction64 {
            bits: (v * Self::ONE_BITS as f64) as u64,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.bits as f64 / Self::ONE_BITS as f64
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn is_one(self) -> bool {
        self.bits == Self::ONE_BITS
    }

    /// Bitwise XOR of the 62 fractional bits; both operands must be below
    /// one, and the result stays in `[0, 1)`.
    pub fn xor(self, other: Fraction64) -> Fraction64 {
        debug_assert!(!self.is_one() && !other.is_one());
        Fraction64 {
            bits: (self.bits ^ other.bits) & Self::MASK,
        }
    }

    /// Exact subtraction; requires `self >= other`.
    pub fn sub(self, other: Fraction64) -> Fraction64 {
        Fraction64 {
            bits: self.bits.checked_sub(other.bits).expect("fraction underflow"),
        }
    }

    /// Truncating division; requires `other` nonzero and `self <= other`,
    /// so the quotient stays in `[0, 1]`.
    pub fn div(self, other: Fraction64) -> Fraction64 {
        assert!(other.bits != 0, "division by zero fraction");
        debug_assert!(self.bits <= other.bits);
        let q = ((self.bits as u128) << Self::FRACTION_BITS) / other.bits as u128;
        Fraction64 {
            bits: (q as u64).min(Self::ONE_BITS),
        }
    }

    /// `floor(n * self)`, exact.
    pub fn scale_floor(self, n: u64) -> u64 {
        ((n as u128 * self.bits as u128) >> Self::FRACTION_BITS) as u64
    }
}
