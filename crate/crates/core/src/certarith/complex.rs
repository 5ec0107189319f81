use num_rational::BigRational;

use super::ball::{Ball, BallError};

/// Rectangular complex interval: both coordinates are certified balls.
#[derive(Clone, Debug)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> CBall {
        CBall { re, im }
    }

    pub fn zero(prec: u32) -> CBall {
        CBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn one(prec: u32) -> CBall {
        CBall { re: Ball::one(prec), im: Ball::zero(prec) }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> CBall {
        CBall { re: Ball::from_rational(re, prec), im: Ball::from_rational(im, prec) }
    }

    pub fn from_real(re: Ball) -> CBall {
        let p = re.prec();
        CBall { re, im: Ball::zero(p) }
    }

    pub fn add(&self, o: &CBall) -> CBall {
        CBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        CBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> CBall {
        CBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        CBall { re, im }
    }

    pub fn mul_real(&self, r: &Ball) -> CBall {
        CBall { re: self.re.mul(r), im: self.im.mul(r) }
    }

    /// |z|^2 as a real ball.
    pub fn abs2(&self) -> Ball {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &CBall) -> Result<CBall, BallError> {
        let d = o.abs2();
        let num = self.mul(&o.conj());
        Ok(CBall { re: num.re.div(&d)?, im: num.im.div(&d)? })
    }

    pub fn div_real(&self, r: &Ball) -> Result<CBall, BallError> {
        Ok(CBall { re: self.re.div(r)?, im: self.im.div(r)? })
    }
}
