//! Moebius transformations of the unit disk, stored as matrices
//! `[[a, b], [conj b, conj a]]` with complex-ball entries. The action on
//! the boundary circle is `z -> (a z + b) / (conj(b) z + conj(a))`.
//!
//! Scaling a matrix by a positive real does not change the map, so
//! nothing here assumes det exactly 1: classification compares
//! `Re(a)^2` against det, and the attracting fixed point is the one
//! where `|conj(b) z + conj(a)|^2 > det`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::certarith::{angle_turns, sincos_turns, Ball, BallError, CBall};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoebiusError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("half-plane matrix must have positive determinant")]
    NonPositiveDet,
    #[error("attracting and repelling angles coincide")]
    CoincidentFixedPoints,
    #[error("radius must lie strictly inside the disk")]
    RadiusOutOfRange,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MoebiusClass {
    Elliptic,
    Hyperbolic,
    /// Sign of `Re(a)^2 - det` not certified at this precision.
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct Moebius {
    a: CBall,
    b: CBall,
}

/// Boundary point `e^{2 pi i theta}` as a complex ball.
pub fn unit_point(theta: &Ball) -> CBall {
    let (c, s) = sincos_turns(theta);
    CBall::new(c, s)
}

impl Moebius {
    pub fn new(a: CBall, b: CBall) -> Moebius {
        Moebius { a, b }
    }

    pub fn identity(prec: u32) -> Moebius {
        Moebius::new(CBall::one(prec), CBall::zero(prec))
    }

    pub fn a(&self) -> &CBall {
        &self.a
    }

    pub fn b(&self) -> &CBall {
        &self.b
    }

    pub fn prec(&self) -> u32 {
        self.a.re.prec()
    }

    /// Rotation by `phi` turns about the disk center.
    pub fn rotation_turns(phi: &BigRational, prec: u32) -> Moebius {
        // half angle: the matrix diag(e^{i pi phi}, e^{-i pi phi})
        let half = Ball::from_rational(&(phi / BigRational::from(BigInt::from(2))), prec);
        let (c, s) = sincos_turns(&half);
        Moebius::new(CBall::new(c, s), CBall::zero(prec))
    }

    /// Rotation of order m about the interior point at distance `r`
    /// (rational, in (0,1)) in direction `center_dir` turns. The map is
    /// `T R T^{-1}` where T translates the center onto the origin's
    /// image.
    pub fn elliptic(
        center_dir: &BigRational,
        r: &BigRational,
        rot: &BigRational,
        prec: u32,
    ) -> Result<Moebius, MoebiusError> {
        if r.abs() >= BigRational::one() {
            return Err(MoebiusError::RadiusOutOfRange);
        }
        let one = BigRational::one();
        let n_sq = &one / (&one - r * r);
        let n = Ball::from_rational(&n_sq, prec).sqrt()?;
        let dir = unit_point(&Ball::from_rational(center_dir, prec));
        let p = dir.mul_real(&Ball::from_rational(r, prec));
        let np = p.mul_real(&n);
        let t = Moebius::new(CBall::from_real(n.clone()), np.clone());
        let t_inv = Moebius::new(CBall::from_real(n), np.neg());
        let rot = Moebius::rotation_turns(rot, prec);
        Ok(t.compose(&rot).compose(&t_inv))
    }

    /// Hyperbolic map with attracting boundary fixed point at `att`
    /// turns, repelling at `rep` turns, and translation length set by
    /// `cosh`/`sinh` of half the length (exact rationals).
    pub fn hyperbolic(
        att: &BigRational,
        rep: &BigRational,
        cosh: &BigRational,
        sinh: &BigRational,
        prec: u32,
    ) -> Result<Moebius, MoebiusError> {
        let one = BigRational::one();
        let mut gamma = rep - att;
        gamma -= gamma.floor();
        if gamma.is_zero() {
            return Err(MoebiusError::CoincidentFixedPoints);
        }
        // conjugate the standard axis through -1,+1 by g = R_psi M_{it}:
        // then g(1) = att and g(-1) = rep on the nose
        let beta_turns = (&one - &gamma - &gamma) / BigRational::from(BigInt::from(8));
        let (cb, sb) = sincos_turns(&Ball::from_rational(&beta_turns, prec));
        let t = sb.div(&cb)?;
        let n = Ball::one(prec).sub(&t.mul(&t));
        let n = Ball::one(prec).div(&n.sqrt()?)?;
        let m_it = Moebius::new(CBall::from_real(n.clone()), CBall::new(Ball::zero(prec), t.mul(&n)));
        let psi_turns = att - (&one - &gamma - &gamma) / BigRational::from(BigInt::from(4));
        let g = Moebius::rotation_turns(&psi_turns, prec).compose(&m_it);
        let axis = Moebius::new(
            CBall::from_real(Ball::from_rational(cosh, prec)),
            CBall::from_real(Ball::from_rational(sinh, prec)),
        );
        Ok(g.compose(&axis).compose(&g.inverse()))
    }

    /// Import a real matrix [[a, b], [c, d]] acting on the upper half
    /// plane, conjugated to the disk by the Cayley transform.
    pub fn from_half_plane(
        a: &BigRational,
        b: &BigRational,
        c: &BigRational,
        d: &BigRational,
        prec: u32,
    ) -> Result<Moebius, MoebiusError> {
        if (a * d - b * c) <= BigRational::zero() {
            return Err(MoebiusError::NonPositiveDet);
        }
        let two = BigRational::from(BigInt::from(2));
        let re_a = (a + d) / &two;
        let im_a = (b - c) / &two;
        let re_b = (a - d) / &two;
        let im_b = -((b + c) / &two);
        Ok(Moebius::new(
            CBall::from_rationals(&re_a, &im_a, prec),
            CBall::from_rationals(&re_b, &im_b, prec),
        ))
    }

    pub fn det(&self) -> Ball {
        self.a.abs2().sub(&self.b.abs2())
    }

    /// `self` after `rhs` (matrix product `self * rhs`). No
    /// renormalization: the action is projective, so a drifting det is
    /// harmless, and dividing by `sqrt(det)` would amplify radii because
    /// `|a|^2 - |b|^2` cancels catastrophically. Radii still grow by
    /// roughly the matrix norm per factor; callers size precision to the
    /// product length.
    pub fn compose(&self, rhs: &Moebius) -> Moebius {
        let a = self.a.mul(&rhs.a).add(&self.b.mul(&rhs.b.conj()));
        let b = self.a.mul(&rhs.b).add(&self.b.mul(&rhs.a.conj()));
        Moebius { a, b }
    }

    /// Inverse as the adjugate, which is the same projective map.
    pub fn inverse(&self) -> Moebius {
        Moebius { a: self.a.conj(), b: self.b.neg() }
    }

    pub fn pow(&self, e: i64) -> Moebius {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut rem = e.unsigned_abs();
        let mut out = Moebius::identity(self.prec());
        while rem > 0 {
            if rem & 1 == 1 {
                out = out.compose(&base);
            }
            rem >>= 1;
            if rem > 0 {
                base = base.compose(&base);
            }
        }
        out
    }

    pub fn act(&self, z: &CBall) -> Result<CBall, BallError> {
        let num = self.a.mul(z).add(&self.b);
        let den = self.b.conj().mul(z).add(&self.a.conj());
        num.div(&den)
    }

    /// Image of the boundary point at `theta` turns, as an angle in
    /// turns canonicalized to [0, 1). Output precision is clamped to the
    /// operands' so chained applications stay linear in cost.
    pub fn act_angle(&self, theta: &Ball) -> Result<Ball, BallError> {
        let w = self.act(&unit_point(theta))?;
        let t = angle_turns(&w.re, &w.im)?;
        Ok(t.to_prec(self.prec().max(theta.prec())))
    }

    pub fn classify(&self) -> MoebiusClass {
        let ra = &self.a.re;
        let ra2 = ra.mul(ra);
        let det = self.det();
        match det.lt_certified(&ra2) {
            Some(true) => MoebiusClass::Hyperbolic,
            Some(false) => {
                if let Some(true) = ra2.lt_certified(&det) {
                    MoebiusClass::Elliptic
                } else {
                    MoebiusClass::Unresolved
                }
            }
            None => match ra2.lt_certified(&det) {
                Some(true) => MoebiusClass::Elliptic,
                _ => MoebiusClass::Unresolved,
            },
        }
    }

    /// Boundary fixed points of a hyperbolic map, attracting first.
    /// Solves `conj(b) z^2 + (conj(a) - a) z - b = 0` on the circle and
    /// certifies which root contracts.
    pub fn fixed_points(&self) -> Result<(CBall, CBall), BallError> {
        let im_a = &self.a.im;
        let disc = self.b.abs2().sub(&im_a.mul(im_a));
        let d = disc.sqrt()?;
        let bc = self.b.conj();
        let z1 = CBall::new(d.clone(), im_a.clone()).div(&bc)?;
        let z2 = CBall::new(d.neg(), im_a.clone()).div(&bc)?;
        let det = self.det();
        let strength = |z: &CBall| -> Ball {
            // |conj(b) z + conj(a)|^2; larger than det means contracting
            self.b.conj().mul(z).add(&self.a.conj()).abs2()
        };
        let s1 = strength(&z1);
        let s2 = strength(&z2);
        match (det.lt_certified(&s1), det.lt_certified(&s2)) {
            (Some(true), Some(false)) => Ok((z1, z2)),
            (Some(false), Some(true)) => Ok((z2, z1)),
            _ => Err(BallError::NeedsRefine),
        }
    }

    /// Fixed points as angles in turns, attracting first.
    pub fn fixed_angles(&self) -> Result<(Ball, Ball), BallError> {
        let (att, rep) = self.fixed_points()?;
        Ok((angle_turns(&att.re, &att.im)?, angle_turns(&rep.re, &rep.im)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn angle_ball(n: i64, d: i64, prec: u32) -> Ball {
        Ball::from_rational(&rat(n, d), prec)
    }

    fn assert_close(b: &Ball, v: &BigRational, bits: u32) {
        let mid = b.midpoint();
        let err = (mid - v).abs();
        let bound = BigRational::new(BigInt::one(), BigInt::one() << bits);
        assert!(err < bound, "off by {}", err.to_f64().unwrap_or(f64::NAN));
    }

    #[test]
    fn identity_preserves_angles() {
        let id = Moebius::identity(128);
        let t = id.act_angle(&angle_ball(3, 10, 128)).unwrap();
        assert_close(&t, &rat(3, 10), 100);
        let d = id.det();
        assert_eq!(d.sign_certified(), Some(std::cmp::Ordering::Greater));
    }

    #[test]
    fn rotation_adds_to_angle() {
        let r = Moebius::rotation_turns(&rat(1, 5), 128);
        let t = r.act_angle(&angle_ball(1, 10, 128)).unwrap();
        assert_close(&t, &rat(3, 10), 100);
        assert_eq!(r.classify(), MoebiusClass::Elliptic);
        // full cycle returns
        let t5 = r.pow(5).act_angle(&angle_ball(1, 10, 128)).unwrap();
        assert_close(&t5, &rat(1, 10), 90);
    }

    #[test]
    fn elliptic_has_order_m() {
        let e = Moebius::elliptic(&rat(1, 4), &rat(63, 64), &rat(1, 3), 160).unwrap();
        assert_eq!(e.classify(), MoebiusClass::Elliptic);
        let theta = angle_ball(1, 3, 160);
        let cubed = e.pow(3).act_angle(&theta).unwrap();
        assert_close(&cubed, &rat(1, 3), 100);
        // far-away points land near the center direction
        let moved = e.act_angle(&angle_ball(3, 4, 160)).unwrap();
        assert_close(&moved, &rat(1, 4), 3);
    }

    #[test]
    fn hyperbolic_fixes_prescribed_angles() {
        let s = rat(256, 1);
        let cosh = (&s + &rat(1, 256)) / rat(2, 1);
        let sinh = (&s - &rat(1, 256)) / rat(2, 1);
        let h = Moebius::hyperbolic(&rat(1, 8), &rat(1, 2), &cosh, &sinh, 192).unwrap();
        assert_eq!(h.classify(), MoebiusClass::Hyperbolic);
        let (att, rep) = h.fixed_angles().unwrap();
        assert_close(&att, &rat(1, 8), 100);
        assert_close(&rep, &rat(1, 2), 100);
        // attraction: a generic point moves toward 1/8
        let start = rat(9, 10);
        let moved = h.act_angle(&angle_ball(9, 10, 192)).unwrap();
        let dist0 = (&start - rat(1, 8)).abs();
        let dist1 = (moved.midpoint() - rat(1, 8)).abs();
        assert!(dist1 < dist0);
        // inverse swaps the roles
        let (att_i, rep_i) = h.inverse().fixed_angles().unwrap();
        assert_close(&att_i, &rat(1, 2), 100);
        assert_close(&rep_i, &rat(1, 8), 100);
    }

    #[test]
    fn half_plane_import_matches_known_map() {
        // w -> (2w + 1)/(w + 1): fixed points (1 +- sqrt 5)/2 on the real
        // axis, attracting at the golden ratio
        let h = Moebius::from_half_plane(&rat(2, 1), &rat(1, 1), &rat(1, 1), &rat(1, 1), 160).unwrap();
        assert_eq!(h.classify(), MoebiusClass::Hyperbolic);
        let d = h.det();
        let one = BigRational::one();
        assert!(h.det().midpoint() == one || d.contains_zero() == false);
        let (att, rep) = h.fixed_angles().unwrap();
        assert_eq!(att.decimal(3), "0.824");
        assert_eq!(rep.decimal(3), "0.324");
        // diag(2, 1/2) fixes 0 and infinity, landing at angles 1/2 and 0
        let g = Moebius::from_half_plane(&rat(2, 1), &rat(0, 1), &rat(0, 1), &rat(1, 2), 160).unwrap();
        assert_close(&g.a().re, &rat(5, 4), 100);
        assert_close(&g.b().re, &rat(3, 4), 100);
        assert_eq!(g.classify(), MoebiusClass::Hyperbolic);
        let (att_g, _) = g.fixed_points().unwrap();
        assert_close(&att_g.re, &rat(1, 1), 100);
        assert_close(&att_g.im, &rat(0, 1), 100);
        assert!(Moebius::from_half_plane(&rat(1, 1), &rat(2, 1), &rat(1, 1), &rat(1, 1), 64).is_err());
    }

    #[test]
    fn compose_agrees_with_sequential_action() {
        let e = Moebius::elliptic(&rat(1, 8), &rat(63, 64), &rat(1, 2), 160).unwrap();
        let s = rat(256, 1);
        let cosh = (&s + &rat(1, 256)) / rat(2, 1);
        let sinh = (&s - &rat(1, 256)) / rat(2, 1);
        let h = Moebius::hyperbolic(&rat(1, 8), &rat(1, 2), &cosh, &sinh, 160).unwrap();
        let theta = angle_ball(7, 10, 160);
        let seq = h.act_angle(&e.act_angle(&theta).unwrap()).unwrap();
        let joint = h.compose(&e).act_angle(&theta).unwrap();
        let err = seq.sub(&joint);
        // both routes enclose the same point; mag is at scale 2^-prec
        assert!(err.mag() < (BigInt::one() << (err.prec() - 120)));
    }

    #[test]
    fn long_compositions_keep_unit_det() {
        // radii amplify multiplicatively along a product, so a 100-fold
        // composition needs headroom: ~4 bits per factor here
        let r = Moebius::rotation_turns(&rat(1, 7), 1024);
        let e = Moebius::elliptic(&rat(1, 3), &rat(3, 4), &rat(1, 2), 1024).unwrap();
        let mut m = Moebius::identity(1024);
        for i in 0..100 {
            m = if i % 2 == 0 { m.compose(&r) } else { m.compose(&e) };
        }
        let det = m.det();
        let one = BigRational::one();
        let lo = det.midpoint() - det.radius();
        let hi = det.midpoint() + det.radius();
        assert!(lo <= one && one <= hi, "det drifted: {}", det.decimal(6));
        assert!(det.radius() < BigRational::new(BigInt::one(), BigInt::from(1) << 400));
    }

    #[test]
    fn ten_thousand_fold_composition_pins_unit_det() {
        use rand::{Rng, SeedableRng};
        // every pool entry has exact determinant 1, so the product det
        // ball must trap 1 no matter how the entries themselves grow;
        // factor norms stay below 2, which bounds the growth by one bit
        // per step and leaves the 24576-bit grid with room to spare
        let prec = 24_576;
        let pool = [
            Moebius::rotation_turns(&rat(1, 3), prec),
            Moebius::rotation_turns(&rat(2, 7), prec),
            Moebius::elliptic(&rat(0, 1), &rat(1, 2), &rat(1, 2), prec).unwrap(),
            Moebius::elliptic(&rat(3, 8), &rat(1, 3), &rat(1, 3), prec).unwrap(),
            Moebius::hyperbolic(&rat(0, 1), &rat(1, 2), &rat(5, 4), &rat(3, 4), prec).unwrap(),
            Moebius::hyperbolic(&rat(1, 4), &rat(3, 4), &rat(13, 12), &rat(5, 12), prec).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let one = Ball::one(prec);
        let mut acc = Moebius::identity(prec);
        for step in 1..=10_000usize {
            acc = acc.compose(&pool[rng.gen_range(0..pool.len())]);
            if step % 2_500 == 0 {
                let det = acc.det();
                assert!(
                    det.sub(&one).contains_zero(),
                    "det lost 1 at step {step}: {}",
                    det.decimal(6)
                );
            }
        }
        let det = acc.det();
        assert!(det.sub(&one).contains_zero(), "det lost 1: {}", det.decimal(6));
        let bound = BigRational::new(BigInt::one(), BigInt::one() << 1024);
        assert!(det.radius() < bound, "det ball too wide");
    }

    #[test]
    fn inverse_composes_to_identity_action() {
        let e = Moebius::elliptic(&rat(2, 5), &rat(15, 16), &rat(1, 4), 160).unwrap();
        let m = e.compose(&e.inverse());
        let t = m.act_angle(&angle_ball(1, 9, 160)).unwrap();
        assert_close(&t, &rat(1, 9), 80);
    }
}
