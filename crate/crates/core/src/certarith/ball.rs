use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors from ball operations. Each one means "cannot conclude at this
/// precision", not "the value is undefined": callers retry on a higher
/// rung of the precision ladder.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallError {
    #[error("interval denominator contains zero")]
    DenominatorStraddlesZero,
    #[error("interval argument of sqrt dips below zero")]
    SqrtBelowZero,
    #[error("sign of interval cannot be determined")]
    NeedsRefine,
    #[error("argument outside supported range: {0}")]
    RangeTooLarge(&'static str),
}

/// Shift right rounding toward -inf, valid for negative values.
pub fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    if x.is_negative() {
        -((-x + ((BigInt::one() << s) - 1u8)) >> s)
    } else {
        x >> s
    }
}

/// Shift right rounding toward +inf.
pub fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    -shr_floor(&-x, s)
}

/// Dyadic interval `[lo, hi] / 2^prec` certified to contain an exact real
/// value. `prec` is a scale, not an accuracy promise; accuracy lives in
/// the radius. Invariant: `lo <= hi`.
#[derive(Clone, Debug)]
pub struct Ball {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl Ball {
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Ball {
        assert!(lo <= hi, "ball endpoints out of order");
        Ball { lo, hi, prec }
    }

    pub fn from_int(v: i64, prec: u32) -> Ball {
        let x = BigInt::from(v) << prec;
        Ball { lo: x.clone(), hi: x, prec }
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Ball {
        let x = v << prec;
        Ball { lo: x.clone(), hi: x, prec }
    }

    /// Tightest ball at `prec` around `num/den`. Exact when `den` is a
    /// power of two dividing the shifted numerator.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Ball {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let shifted = num << prec;
        Ball { lo: shifted.div_floor(&den), hi: shifted.div_ceil(&den), prec }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Ball {
        Ball::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn zero(prec: u32) -> Ball {
        Ball { lo: BigInt::zero(), hi: BigInt::zero(), prec }
    }

    pub fn one(prec: u32) -> Ball {
        Ball::from_int(1, prec)
    }

    pub fn lo(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi(&self) -> &BigInt {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.prec + 1))
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << (self.prec + 1))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Rescale. Raising precision is exact, lowering rounds outward.
    pub fn to_prec(&self, p: u32) -> Ball {
        if p >= self.prec {
            let d = p - self.prec;
            Ball { lo: &self.lo << d, hi: &self.hi << d, prec: p }
        } else {
            let d = self.prec - p;
            Ball { lo: shr_floor(&self.lo, d), hi: shr_ceil(&self.hi, d), prec: p }
        }
    }

    fn aligned(&self, o: &Ball) -> (Ball, Ball) {
        let p = self.prec.max(o.prec);
        (self.to_prec(p), o.to_prec(p))
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let (a, b) = self.aligned(o);
        Ball { lo: a.lo + b.lo, hi: a.hi + b.hi, prec: a.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        let (a, b) = self.aligned(o);
        Ball { lo: a.lo - b.hi, hi: a.hi - b.lo, prec: a.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn abs(&self) -> Ball {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Ball { lo: BigInt::zero(), hi: (-&self.lo).max(self.hi.clone()), prec: self.prec }
        }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let (a, b) = self.aligned(o);
        let p = a.prec;
        let c1 = &a.lo * &b.lo;
        let c2 = &a.lo * &b.hi;
        let c3 = &a.hi * &b.lo;
        let c4 = &a.hi * &b.hi;
        let lo = c1.clone().min(c2.clone()).min(c3.clone()).min(c4.clone());
        let hi = c1.max(c2).max(c3).max(c4);
        Ball { lo: shr_floor(&lo, p), hi: shr_ceil(&hi, p), prec: p }
    }

    /// Multiply by an exact integer.
    pub fn mul_int(&self, c: i64) -> Ball {
        let c = BigInt::from(c);
        let x = &self.lo * &c;
        let y = &self.hi * &c;
        if c.is_negative() {
            Ball { lo: y, hi: x, prec: self.prec }
        } else {
            Ball { lo: x, hi: y, prec: self.prec }
        }
    }

    /// Divide by an exact nonzero integer, rounding outward.
    pub fn div_int(&self, c: i64) -> Ball {
        assert!(c != 0, "division by zero");
        let neg = c < 0;
        let c = BigInt::from(c.unsigned_abs());
        let (lo, hi) = if neg { (-&self.hi, -&self.lo) } else { (self.lo.clone(), self.hi.clone()) };
        Ball { lo: lo.div_floor(&c), hi: hi.div_ceil(&c), prec: self.prec }
    }

    pub fn div(&self, o: &Ball) -> Result<Ball, BallError> {
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return Err(BallError::DenominatorStraddlesZero);
        }
        let (a, b) = self.aligned(o);
        let p = a.prec;
        let na = &a.lo << p;
        let nb = &a.hi << p;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for num in [&na, &nb] {
            for den in [&b.lo, &b.hi] {
                let f = num.div_floor(den);
                let c = num.div_ceil(den);
                lo = Some(match lo {
                    Some(v) => v.min(f),
                    None => f,
                });
                hi = Some(match hi {
                    Some(v) => v.max(c),
                    None => c,
                });
            }
        }
        Ok(Ball { lo: lo.unwrap(), hi: hi.unwrap(), prec: p })
    }

    pub fn sqrt(&self) -> Result<Ball, BallError> {
        if self.lo.is_negative() {
            return Err(BallError::SqrtBelowZero);
        }
        let p = self.prec;
        let lo_s = (&self.lo << p).sqrt();
        let hi_shift = &self.hi << p;
        let hi_root = hi_shift.sqrt();
        let hi_s = if &hi_root * &hi_root == hi_shift { hi_root } else { hi_root + 1u8 };
        Ok(Ball { lo: lo_s, hi: hi_s, prec: p })
    }

    /// Multiply the value by 2^e, exactly, by moving the scale.
    pub fn shift_pow2(&self, e: i32) -> Ball {
        if e >= 0 {
            let e = e as u32;
            if self.prec >= e {
                Ball { lo: self.lo.clone(), hi: self.hi.clone(), prec: self.prec - e }
            } else {
                let d = e - self.prec;
                Ball { lo: &self.lo << d, hi: &self.hi << d, prec: 0 }
            }
        } else {
            Ball { lo: self.lo.clone(), hi: self.hi.clone(), prec: self.prec + (-e) as u32 }
        }
    }

    /// Enlarge both endpoints by `m >= 0` units of the ball's own scale.
    pub fn pad(&self, m: &BigInt) -> Ball {
        debug_assert!(!m.is_negative());
        Ball { lo: &self.lo - m, hi: &self.hi + m, prec: self.prec }
    }

    /// Largest absolute endpoint, in units of the ball's scale.
    pub fn mag(&self) -> BigInt {
        (-&self.lo).max(self.hi.clone())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified sign. `Some(Equal)` only for the exact zero ball.
    pub fn sign_certified(&self) -> Option<Ordering> {
        if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified strict comparison of disjoint intervals. `None` on overlap.
    pub fn lt_certified(&self, o: &Ball) -> Option<bool> {
        let (a, b) = self.aligned(o);
        if a.hi < b.lo {
            Some(true)
        } else if b.hi < a.lo {
            Some(false)
        } else {
            None
        }
    }

    /// Deterministic fixed-point decimal rendering of the midpoint,
    /// round-half-up on the absolute value. Integer arithmetic only.
    pub fn decimal(&self, digits: u32) -> String {
        let mid2 = &self.lo + &self.hi;
        let scaled = &mid2 * BigInt::from(10u8).pow(digits);
        let denom = BigInt::one() << (self.prec + 1);
        let neg = scaled.is_negative();
        let two = num_bigint::BigUint::from(2u8);
        let q = (scaled.magnitude() * &two + denom.magnitude())
            .div_floor(&(denom.magnitude() * &two));
        let ten = num_bigint::BigUint::from(10u8).pow(digits);
        let (int_part, frac_part) = q.div_rem(&ten);
        let sign = if neg && (!int_part.is_zero() || !frac_part.is_zero()) { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part:0>width$}", width = digits as usize)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn shr_floor_is_floor_on_negatives() {
        assert_eq!(shr_floor(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(shr_floor(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(shr_ceil(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(shr_ceil(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn rational_embedding_respects_arithmetic() {
        let cases = [
            (rat(3, 7), rat(-2, 5)),
            (rat(-1, 3), rat(-1, 6)),
            (rat(22, 7), rat(355, 113)),
            (rat(0, 1), rat(5, 8)),
        ];
        for (x, y) in &cases {
            let bx = Ball::from_rational(x, 96);
            let by = Ball::from_rational(y, 96);
            let contains = |b: &Ball, v: &BigRational| {
                let lo = BigRational::new(b.lo().clone(), BigInt::one() << b.prec());
                let hi = BigRational::new(b.hi().clone(), BigInt::one() << b.prec());
                lo <= *v && *v <= hi
            };
            assert!(contains(&bx.add(&by), &(x + y)));
            assert!(contains(&bx.sub(&by), &(x - y)));
            assert!(contains(&bx.mul(&by), &(x * y)));
            if !y.is_zero() {
                assert!(contains(&bx.div(&by).unwrap(), &(x / y)));
            }
        }
    }

    #[test]
    fn sqrt_contains_square_root() {
        let two = Ball::from_int(2, 128);
        let r = two.sqrt().unwrap();
        let sq = r.mul(&r);
        // 2 must lie inside r^2
        assert!(sq.lo() <= &(BigInt::from(2) << 128));
        assert!(sq.hi() >= &(BigInt::from(2) << 128));
        // radius stays tiny
        assert!(r.radius() < BigRational::new(BigInt::one(), BigInt::one() << 90));
    }

    #[test]
    fn div_rejects_zero_straddle() {
        let a = Ball::from_int(1, 32);
        let b = Ball::new(BigInt::from(-5), BigInt::from(5), 32);
        assert_eq!(a.div(&b).unwrap_err(), BallError::DenominatorStraddlesZero);
    }

    #[test]
    fn certified_comparisons() {
        let a = Ball::from_rational(&rat(1, 3), 64);
        let b = Ball::from_rational(&rat(1, 2), 64);
        assert_eq!(a.lt_certified(&b), Some(true));
        assert_eq!(b.lt_certified(&a), Some(false));
        let wide = Ball::new(BigInt::from(0), BigInt::from(1) << 64, 64);
        assert_eq!(a.lt_certified(&wide), None);
        assert_eq!(a.sign_certified(), Some(Ordering::Greater));
        assert_eq!(a.neg().sign_certified(), Some(Ordering::Less));
        assert_eq!(Ball::zero(10).sign_certified(), Some(Ordering::Equal));
    }

    #[test]
    fn decimal_rendering_is_stable() {
        let x = Ball::from_rational(&rat(-355, 113), 128);
        assert_eq!(x.decimal(3), "-3.142");
        assert_eq!(Ball::from_rational(&rat(1, 2), 128).decimal(0), "1");
        assert_eq!(Ball::from_rational(&rat(25, 1000), 128).decimal(2), "0.03");
        assert_eq!(Ball::zero(16).decimal(3), "0.000");
    }

    #[test]
    fn shift_pow2_is_exact() {
        let x = Ball::from_rational(&rat(3, 4), 16);
        let y = x.shift_pow2(-2);
        assert_eq!(y.midpoint(), rat(3, 16));
        let z = x.shift_pow2(3);
        assert_eq!(z.midpoint(), rat(6, 1));
    }
}
