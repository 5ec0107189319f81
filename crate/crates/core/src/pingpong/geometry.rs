//! Landmark angles and generator matrices for one group.
//!
//! The circle is split into `N = k + 2n` equal sectors. Each finite-order
//! generator `e_i` rotates about a center placed in sector `i`; each
//! hyperbolic generator `h_j` has its axis endpoints on the quarter points
//! of the last `2n` sectors. All landmark angles are exact rationals, so
//! every certified comparison bottoms out in rational or algebraic data.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::certarith::{Ball, BallError, CertError, PrecLadder};
use crate::moebius::{Moebius, MoebiusClass, MoebiusError};
use crate::words::{Gen, GroupSpec, Word};

use super::points::{canon_ball, ord3_balls, AnglePos};

/// Shape parameters for the circle configuration.
///
/// `spread_exp` sets the elliptic conjugation radius `r = 1 - 2^-spread_exp`:
/// larger values squeeze each rotation's displacement away from its fixed
/// sector. `length_exp` sets the hyperbolic translation length through
/// `s = 2^length_exp`, `cosh(L/2) = (s + 1/s)/2`. Both stay exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PingPongParams {
    pub spread_exp: u32,
    pub length_exp: u32,
    pub ladder: PrecLadder,
}

impl Default for PingPongParams {
    fn default() -> PingPongParams {
        PingPongParams { spread_exp: 6, length_exp: 8, ladder: PrecLadder::default() }
    }
}

struct GenMats {
    e: Vec<Moebius>,
    h: Vec<Moebius>,
    alpha: Moebius,
}

/// One group's landmarks plus a per-precision cache of generator matrices.
pub struct Geometry {
    spec: GroupSpec,
    params: PingPongParams,
    cache: Mutex<HashMap<u32, Arc<GenMats>>>,
}

fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn flatten(err: MoebiusError) -> BallError {
    match err {
        MoebiusError::Ball(b) => b,
        _ => BallError::RangeTooLarge("degenerate circle configuration"),
    }
}

impl Geometry {
    pub fn new(spec: GroupSpec, params: PingPongParams) -> Geometry {
        Geometry { spec, params, cache: Mutex::new(HashMap::new()) }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn params(&self) -> PingPongParams {
        self.params
    }

    pub fn ladder(&self) -> PrecLadder {
        self.params.ladder
    }

    /// Number of equal sectors.
    pub fn sector_count(&self) -> i64 {
        self.spec.sectors() as i64
    }

    /// Fixed marked point of sector `i`, the base landmark for `e_i`.
    pub fn x_e(&self, i: u16) -> BigRational {
        debug_assert!(i >= 1 && i <= self.spec.k());
        frac(i as i64 - 1, self.sector_count())
    }

    /// Rotation center direction for `e_i`, the middle of sector `i`.
    pub fn center_dir(&self, i: u16) -> BigRational {
        frac(2 * (i as i64) - 1, 2 * self.sector_count())
    }

    pub fn spread_radius(&self) -> BigRational {
        BigRational::one() - frac(1, 1i64 << self.params.spread_exp.min(62))
    }

    fn pair_quarter(&self, j: u16) -> (i64, i64) {
        debug_assert!(j >= 1 && j <= self.spec.two_n());
        let k = self.spec.k() as i64;
        let p = (j as i64 + 1) / 2;
        if j % 2 == 1 {
            // odd: attractor on the 1/4 point of the pair's first sector,
            // repeller on the 1/4 point of the second
            (4 * (k + 2 * p - 2) + 1, 4 * (k + 2 * p - 1) + 1)
        } else {
            // even: attractor on the 3/4 point of the second sector,
            // repeller on the 3/4 point of the first
            (4 * (k + 2 * p - 1) + 3, 4 * (k + 2 * p - 2) + 3)
        }
    }

    pub fn att_angle(&self, j: u16) -> BigRational {
        let (a, _) = self.pair_quarter(j);
        frac(a, 4 * self.sector_count())
    }

    pub fn rep_angle(&self, j: u16) -> BigRational {
        let (_, r) = self.pair_quarter(j);
        frac(r, 4 * self.sector_count())
    }

    /// Half-width of the protected window around each repeller.
    pub fn window_delta(&self) -> BigRational {
        frac(1, 32 * self.sector_count())
    }

    /// Window endpoint `x_j^+` (counterclockwise of the repeller) or
    /// `x_j^-` (clockwise) as an exact angle.
    pub fn x_h(&self, j: u16, plus: bool) -> BigRational {
        let d = self.window_delta();
        if plus {
            self.rep_angle(j) + d
        } else {
            self.rep_angle(j) - d
        }
    }

    pub fn x_h_pos(&self, j: u16, plus: bool) -> AnglePos {
        AnglePos::turns(self.x_h(j, plus))
    }

    pub fn x_e_pos(&self, i: u16) -> AnglePos {
        AnglePos::turns(self.x_e(i))
    }

    fn build_mats(&self, prec: u32) -> Result<GenMats, BallError> {
        let r = self.spread_radius();
        let s = frac(1i64 << self.params.length_exp.min(62), 1);
        let cosh = (&s + s.recip()) / frac(2, 1);
        let sinh = (&s - s.recip()) / frac(2, 1);

        let mut e = Vec::with_capacity(self.spec.k() as usize);
        for i in 1..=self.spec.k() {
            let rot = frac(1, self.spec.m(i) as i64);
            e.push(
                Moebius::elliptic(&self.center_dir(i), &r, &rot, prec).map_err(flatten)?,
            );
        }
        let mut h = Vec::with_capacity(self.spec.two_n() as usize);
        for j in 1..=self.spec.two_n() {
            h.push(
                Moebius::hyperbolic(
                    &self.att_angle(j),
                    &self.rep_angle(j),
                    &cosh,
                    &sinh,
                    prec,
                )
                .map_err(flatten)?,
            );
        }

        let mut alpha = Moebius::identity(prec);
        for syl in Word::alpha(&self.spec).syllables() {
            let base = match syl.gen {
                Gen::E(i) => &e[(i - 1) as usize],
                Gen::H(j) => &h[(j - 1) as usize],
            };
            alpha = alpha.compose(&base.pow(syl.exp));
        }

        Ok(GenMats { e, h, alpha })
    }

    fn mats(&self, prec: u32) -> Result<Arc<GenMats>, BallError> {
        if let Some(m) = self.cache.lock().unwrap().get(&prec) {
            return Ok(m.clone());
        }
        let built = Arc::new(self.build_mats(prec)?);
        self.cache.lock().unwrap().insert(prec, built.clone());
        Ok(built)
    }

    pub fn gen_matrix(&self, g: Gen, prec: u32) -> Result<Moebius, BallError> {
        let mats = self.mats(prec)?;
        Ok(match g {
            Gen::E(i) => mats.e[(i - 1) as usize].clone(),
            Gen::H(j) => mats.h[(j - 1) as usize].clone(),
        })
    }

    /// Matrix of a reduced word, composed left to right so the product acts
    /// the way the word reads: `w = s t` acts as `x -> s(t(x))`.
    pub fn word_matrix(&self, w: &Word, prec: u32) -> Result<Moebius, BallError> {
        let mats = self.mats(prec)?;
        let mut acc = Moebius::identity(prec);
        for syl in w.syllables() {
            let base = match syl.gen {
                Gen::E(i) => &mats.e[(i - 1) as usize],
                Gen::H(j) => &mats.h[(j - 1) as usize],
            };
            acc = acc.compose(&base.pow(syl.exp));
        }
        Ok(acc)
    }

    pub fn alpha_matrix(&self, prec: u32) -> Result<Moebius, BallError> {
        Ok(self.mats(prec)?.alpha.clone())
    }

    /// Numeric value of a symbolic position at one precision, canonical in
    /// `[0, 1)`. Any failure means "refine", never "undefined".
    pub fn eval(&self, pos: &AnglePos, prec: u32) -> Result<Ball, BallError> {
        match pos {
            AnglePos::Turns(r) => Ok(Ball::from_rational(r, prec)),
            AnglePos::Image { word, base } => {
                let b = self.eval(base, prec)?;
                self.word_matrix(word, prec)?.act_angle(&b)
            }
            AnglePos::Shifted { base, delta } => {
                let b = self.eval(base, prec)?;
                canon_ball(&b.add(&Ball::from_rational(delta, prec)))
            }
            AnglePos::AlphaEnd { attracting } => {
                let (att, rep) = self.mats(prec)?.alpha.fixed_angles()?;
                Ok(if *attracting { att } else { rep })
            }
        }
    }

    /// Certified cyclic orientation of three positions. Structural equality
    /// of any two gives 0 without touching arithmetic; otherwise the ladder
    /// refines until the three separate.
    pub fn ord3(&self, a: &AnglePos, b: &AnglePos, c: &AnglePos) -> Result<i8, CertError> {
        self.ord3_with(self.params.ladder, a, b, c)
    }

    pub fn ord3_with(
        &self,
        ladder: PrecLadder,
        a: &AnglePos,
        b: &AnglePos,
        c: &AnglePos,
    ) -> Result<i8, CertError> {
        if a == b || b == c || a == c {
            return Ok(0);
        }
        for prec in ladder.rungs() {
            let xa = self.eval(a, prec);
            let xb = self.eval(b, prec);
            let xc = self.eval(c, prec);
            if let (Ok(xa), Ok(xb), Ok(xc)) = (xa, xb, xc) {
                if let Some(s) = ord3_balls(&xa, &xb, &xc) {
                    return Ok(s);
                }
            }
        }
        Err(CertError::Inconclusive {
            cap: ladder.cap,
            detail: format!("ord3({a}, {b}, {c})"),
        })
    }

    /// Classification of alpha, refined until it resolves or the ladder is
    /// spent.
    pub fn alpha_class(&self, ladder: PrecLadder) -> MoebiusClass {
        for prec in ladder.rungs() {
            if let Ok(m) = self.alpha_matrix(prec) {
                let c = m.classify();
                if c != MoebiusClass::Unresolved {
                    return c;
                }
            }
        }
        MoebiusClass::Unresolved
    }
}

impl std::fmt::Debug for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Geometry")
            .field("spec", &self.spec)
            .field("params", &self.params)
            .finish()
    }
}
