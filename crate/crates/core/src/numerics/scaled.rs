use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

/// A real number stored as `sign * exp(log_mag)`.
///
/// Products and quotients only touch the logarithm, so normalization
/// constants such as `a^(n nA)` or products of gamma functions never
/// overflow before the final exponentiation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    sign: i8,
    log_mag: f64,
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: ScaledValue = ScaledValue {
        sign: 1,
        log_mag: 0.0,
    };

    /// Builds a value from its parts. A zero sign or an infinite negative
    /// magnitude both collapse to [`ScaledValue::ZERO`].
    pub fn new(sign: i8, log_mag: f64) -> Self {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            ScaledValue {
                sign: sign.signum(),
                log_mag,
            }
        }
    }

    /// Positive value given by its natural logarithm.
    pub fn from_ln(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero ScaledValue");
        ScaledValue {
            sign: self.sign,
            log_mag: -self.log_mag,
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
        ScaledValue {
            sign,
            log_mag: self.log_mag * f64::from(k),
        }
    }

    /// Sum in log space; exact cancellation yields zero.
    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (big, small) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.log_mag - big.log_mag).exp();
        if big.sign == small.sign {
            ScaledValue::new(big.sign, big.log_mag + ratio.ln_1p())
        } else if ratio == 1.0 {
            Self::ZERO
        } else {
            ScaledValue::new(big.sign, big.log_mag + (-ratio).ln_1p())
        }
    }
}

impl Mul for ScaledValue {
    type Output = ScaledValue;

    fn mul(self, rhs: ScaledValue) -> ScaledValue {
        if self.sign == 0 || rhs.sign == 0 {
            return ScaledValue::ZERO;
        }
        ScaledValue {
            sign: self.sign * rhs.sign,
            log_mag: self.log_mag + rhs.log_mag,
        }
    }
}

impl Div for ScaledValue {
    type Output = ScaledValue;

    fn div(self, rhs: ScaledValue) -> ScaledValue {
        self * rhs.recip()
    }
}

impl Neg for ScaledValue {
    type Output = ScaledValue;

    fn neg(self) -> ScaledValue {
        ScaledValue {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl PartialOrd for ScaledValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for ScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.log_mag),
            _ => write!(f, "-exp({})", self.log_mag),
        }
    }
}

impl Default for ScaledValue {
    fn default() -> Self {
        Self::ONE
    }
}
