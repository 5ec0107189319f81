use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;
use once_cell::sync::Lazy;

use super::ball::{Ball, BallError};

static PI_CACHE: Lazy<Mutex<HashMap<u32, Ball>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Alternating integer series for atan(1/x) at scale `s`. Repeated floor
/// division is exact for the power chain, so the only slack is one unit
/// per term plus the truncated tail.
fn atan_inv_interval(x: i64, s: u32) -> Ball {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = (BigInt::from(1) << s) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    loop {
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        terms += 1;
        power /= &x2;
        k += 1;
    }
    let slack = BigInt::from(terms + 2);
    Ball::new(&sum - &slack, &sum + &slack, s)
}

/// Certified pi, cached per precision. Machin: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi_ball(prec: u32) -> Ball {
    if let Some(b) = PI_CACHE.lock().unwrap().get(&prec) {
        return b.clone();
    }
    let s = prec + 16;
    let a = atan_inv_interval(5, s).mul_int(16);
    let b = atan_inv_interval(239, s).mul_int(4);
    let pi = a.sub(&b).to_prec(prec);
    PI_CACHE.lock().unwrap().insert(prec, pi.clone());
    pi
}

/// Taylor sum for sin or cos of a ball with |value| <= ~3.5, at the
/// ball's own scale. Falls back to the always-true envelope [-1, 1] if
/// the interval is too wide to say anything.
fn sincos_core(m: &Ball, want_sin: bool) -> Ball {
    let s = m.prec();
    let envelope = || Ball::new(BigInt::from(-1) << s, BigInt::from(1) << s, s);
    let m2 = {
        let a = m.abs();
        a.mul(&a)
    };
    // need the term ratio m^2/((2k)(2k+1)) to fall below 1/2 quickly
    if m2.mag() > (BigInt::from(16) << s) {
        return envelope();
    }
    let mut sum;
    let mut term;
    if want_sin {
        sum = m.clone();
        term = m.clone();
    } else {
        sum = Ball::one(s);
        term = Ball::one(s);
    }
    let mut k: i64 = 1;
    loop {
        if k > 4000 {
            return envelope();
        }
        let div = if want_sin { (2 * k) * (2 * k + 1) } else { (2 * k - 1) * (2 * k) };
        term = term.mul(&m2).div_int(div);
        let contrib = term.clone();
        if k % 2 == 1 {
            sum = sum.sub(&contrib);
        } else {
            sum = sum.add(&contrib);
        }
        // ratio of the next term is below 1/2 once the divisor dominates
        let ratio_ok = (BigInt::from((2 * k + 2) * (2 * k + 3)) << s) > m2.mag() * BigInt::from(2);
        if ratio_ok && contrib.mag() < BigInt::from(4) {
            let pad = contrib.mag() + BigInt::from(1);
            return sum.pad(&pad);
        }
        k += 1;
    }
}

fn reduce_to_pi(m: Ball, s: u32) -> Option<Ball> {
    let pi = pi_ball(s);
    let two_pi = pi.shift_pow2(1);
    let mut m = m;
    for _ in 0..8 {
        // all balls here share scale s, so endpoint integers compare directly
        debug_assert_eq!(m.prec(), s);
        if m.lo() > pi.hi() {
            m = m.sub(&two_pi);
        } else if *m.hi() < -pi.hi() {
            m = m.add(&two_pi);
        } else {
            return Some(m);
        }
    }
    None
}

fn sincos_ball(x: &Ball, want_sin: bool) -> Ball {
    let p = x.prec();
    let s = p + 32;
    let mid = Ball::new(x.lo() + x.hi(), x.lo() + x.hi(), p + 1).to_prec(s);
    let m = match reduce_to_pi(mid, s) {
        Some(m) => m,
        None => return Ball::new(BigInt::from(-1) << s, BigInt::from(1) << s, s),
    };
    let core = sincos_core(&m, want_sin);
    // Lipschitz constant 1: pad by the input radius
    let rad = (x.hi() - x.lo()) << (s - p - 1);
    core.pad(&rad)
}

/// Certified sin. Always sound; wide inputs degrade to [-1, 1].
pub fn sin_ball(x: &Ball) -> Ball {
    sincos_ball(x, true)
}

/// Certified cos.
pub fn cos_ball(x: &Ball) -> Ball {
    sincos_ball(x, false)
}

/// (cos 2 pi theta, sin 2 pi theta) for an angle in turns.
pub fn sincos_turns(theta: &Ball) -> (Ball, Ball) {
    let s = theta.prec() + 32;
    let rad = theta.to_prec(s).mul(&pi_ball(s).shift_pow2(1));
    (cos_ball(&rad), sin_ball(&rad))
}

/// atan on a ball of any magnitude, via two unconditional halvings
/// t -> t / (1 + sqrt(1 + t^2)) and a short alternating series.
fn atan_core(t: &Ball) -> Result<Ball, BallError> {
    let s = t.prec();
    let one = Ball::one(s);
    let halve = |v: &Ball| -> Result<Ball, BallError> {
        let a = v.abs();
        let den = one.add(&one.add(&a.mul(&a)).sqrt()?);
        v.div(&den)
    };
    let t1 = halve(t)?;
    let t2 = halve(&t1)?;
    let u2 = {
        let a = t2.abs();
        a.mul(&a)
    };
    // after two halvings |t2| < 0.415 for any real input; if the interval
    // is still wide, return the always-true bound (-pi/2, pi/2) c (-2, 2)
    if u2.mag() > (BigInt::from(1) << (s - 1)) {
        return Ok(Ball::new(BigInt::from(-2) << s, BigInt::from(2) << s, s));
    }
    let mut sum = t2.clone();
    let mut term = t2.clone();
    let mut k: i64 = 1;
    loop {
        if k > 4000 {
            return Ok(Ball::new(BigInt::from(-2) << s, BigInt::from(2) << s, s));
        }
        term = term.mul(&u2);
        let contrib = term.div_int(2 * k + 1);
        if k % 2 == 1 {
            sum = sum.sub(&contrib);
        } else {
            sum = sum.add(&contrib);
        }
        if contrib.mag() < BigInt::from(4) {
            let pad = contrib.mag() + BigInt::from(1);
            return Ok(sum.pad(&pad).mul_int(4));
        }
        k += 1;
    }
}

/// Certified atan2 with value in (-pi, pi]. Branch selection needs a
/// certified sign on one coordinate; near-axis ambiguity surfaces as
/// NeedsRefine so the precision ladder can retry.
pub fn atan2_ball(y: &Ball, x: &Ball) -> Result<Ball, BallError> {
    let s = y.prec().max(x.prec()) + 32;
    let y = y.to_prec(s);
    let x = x.to_prec(s);
    let half_pi = pi_ball(s).shift_pow2(-1);
    match y.sign_certified() {
        Some(std::cmp::Ordering::Greater) => {
            let at = atan_core(&x.div(&y)?)?;
            Ok(half_pi.sub(&at))
        }
        Some(std::cmp::Ordering::Less) => {
            let at = atan_core(&x.div(&y)?)?;
            Ok(half_pi.neg().sub(&at))
        }
        Some(std::cmp::Ordering::Equal) => match x.sign_certified() {
            Some(std::cmp::Ordering::Greater) => Ok(Ball::zero(s)),
            Some(std::cmp::Ordering::Less) => Ok(pi_ball(s)),
            _ => Err(BallError::NeedsRefine),
        },
        None => match x.sign_certified() {
            Some(std::cmp::Ordering::Greater) => atan_core(&y.div(&x)?),
            _ => Err(BallError::NeedsRefine),
        },
    }
}

/// Boundary angle of a complex ball, in turns, canonicalized to [0, 1).
/// The cut sits at angle 0, so only the right half plane can be
/// ambiguous; the left half plane and the two open half planes in y use
/// interior formulas that cannot wrap.
pub fn angle_turns(re: &Ball, im: &Ball) -> Result<Ball, BallError> {
    use std::cmp::Ordering;
    let s = re.prec().max(im.prec()) + 32;
    let x = re.to_prec(s);
    let y = im.to_prec(s);
    let two_pi = pi_ball(s).shift_pow2(1);
    let quarters = |q: i64| Ball::from_ratio(&BigInt::from(q), &BigInt::from(4), s);
    match x.sign_certified() {
        Some(Ordering::Less) => {
            let t = atan_core(&y.div(&x)?)?.div(&two_pi)?;
            Ok(quarters(2).add(&t))
        }
        Some(Ordering::Greater) => {
            let t = atan_core(&y.div(&x)?)?.div(&two_pi)?;
            match t.sign_certified() {
                Some(Ordering::Greater) | Some(Ordering::Equal) => Ok(t),
                Some(Ordering::Less) => Ok(t.add(&Ball::one(t.prec()))),
                None => Err(BallError::NeedsRefine),
            }
        }
        _ => match y.sign_certified() {
            Some(Ordering::Greater) => {
                let t = atan_core(&x.div(&y)?)?.div(&two_pi)?;
                Ok(quarters(1).sub(&t))
            }
            Some(Ordering::Less) => {
                let t = atan_core(&x.div(&y)?)?.div(&two_pi)?;
                Ok(quarters(3).sub(&t))
            }
            _ => Err(BallError::NeedsRefine),
        },
    }
}

/// Certified exp via argument halving and squaring.
pub fn exp_ball(x: &Ball) -> Result<Ball, BallError> {
    let p = x.prec();
    if x.mag() > (BigInt::from(64) << p) {
        return Err(BallError::RangeTooLarge("exp argument beyond 64"));
    }
    let s = p + 48;
    let mut v = x.to_prec(s);
    let mut halvings = 0u32;
    while v.mag() > (BigInt::from(1) << (s - 1)) {
        v = v.shift_pow2(-1).to_prec(s);
        halvings += 1;
        if halvings > 80 {
            return Err(BallError::RangeTooLarge("exp halving runaway"));
        }
    }
    let mut sum = Ball::one(s);
    let mut term = Ball::one(s);
    let mut k: i64 = 1;
    loop {
        term = term.mul(&v).div_int(k);
        sum = sum.add(&term);
        if k > 1 && term.mag() < BigInt::from(4) {
            let pad = term.mag() + BigInt::from(1);
            sum = sum.pad(&pad);
            break;
        }
        if k > 4000 {
            return Err(BallError::RangeTooLarge("exp series runaway"));
        }
        k += 1;
    }
    for _ in 0..halvings {
        sum = sum.mul(&sum);
    }
    Ok(sum)
}
