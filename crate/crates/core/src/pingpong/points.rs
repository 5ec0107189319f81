//! Symbolic boundary points and closed circle arcs.
//!
//! Positions carry their construction: an exact angle, the image of another
//! position under a reduced word, an exact displacement, or a fixed point of
//! the chain word alpha. Equality is structural and never numeric, so two
//! positions compare equal exactly when they are built the same way. Numeric
//! evaluation happens elsewhere, one precision rung at a time.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::certarith::{shr_floor, Ball, BallError};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnglePos {
    /// Exact angle in turns, canonical in `[0, 1)`.
    Turns(BigRational),
    /// Image of `base` under the boundary action of a nonempty reduced word.
    /// `base` is never itself an `Image`; nested images merge their words.
    Image { word: Word, base: Box<AnglePos> },
    /// `base` displaced by an exact nonzero number of turns. `base` is never
    /// `Turns` (the shift folds in) and never `Shifted` (deltas merge).
    Shifted { base: Box<AnglePos>, delta: BigRational },
    /// Boundary fixed point of the chain word alpha.
    AlphaEnd { attracting: bool },
}

impl AnglePos {
    pub fn turns(r: BigRational) -> AnglePos {
        AnglePos::Turns(canon_rational(r))
    }

    pub fn turns_frac(num: i64, den: i64) -> AnglePos {
        AnglePos::turns(BigRational::new(num.into(), den.into()))
    }

    /// Image under `word`, with cancellation against an inner image. The
    /// merge keeps words reduced, so points that agree as group translates
    /// of the same base agree structurally. Powers of alpha fix both of
    /// alpha's boundary fixed points, so those images collapse too.
    pub fn image(word: &Word, base: AnglePos) -> AnglePos {
        if word.is_identity() {
            return base;
        }
        match base {
            AnglePos::Image { word: inner, base } => {
                let merged = word.multiply(&inner).expect("word algebra on one spec");
                if merged.is_identity() || fixes_base(&merged, &base) {
                    *base
                } else {
                    AnglePos::Image { word: merged, base }
                }
            }
            other => {
                if fixes_base(word, &other) {
                    other
                } else {
                    AnglePos::Image { word: word.clone(), base: Box::new(other) }
                }
            }
        }
    }

    pub fn shifted(base: AnglePos, delta: &BigRational) -> AnglePos {
        if delta.is_zero() {
            return base;
        }
        match base {
            AnglePos::Turns(r) => AnglePos::turns(r + delta),
            AnglePos::Shifted { base, delta: inner } => {
                let total = inner + delta;
                if total.is_zero() {
                    *base
                } else {
                    AnglePos::Shifted { base, delta: total }
                }
            }
            other => AnglePos::Shifted { base: Box::new(other), delta: delta.clone() },
        }
    }

    pub fn alpha_end(attracting: bool) -> AnglePos {
        AnglePos::AlphaEnd { attracting }
    }
}

impl fmt::Display for AnglePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnglePos::Turns(r) => write!(f, "{r}"),
            AnglePos::Image { word, base } => write!(f, "{word}({base})"),
            AnglePos::Shifted { base, delta } => {
                if delta.is_negative() {
                    write!(f, "{base}-{}", -delta)
                } else {
                    write!(f, "{base}+{delta}")
                }
            }
            AnglePos::AlphaEnd { attracting: true } => write!(f, "fix+(alpha)"),
            AnglePos::AlphaEnd { attracting: false } => write!(f, "fix-(alpha)"),
        }
    }
}

fn canon_rational(r: BigRational) -> BigRational {
    let f = r.floor();
    r - f
}

/// True when `word` provably fixes the circle point `base`: only alpha
/// powers acting on alpha's own fixed points qualify.
fn fixes_base(word: &Word, base: &AnglePos) -> bool {
    matches!(base, AnglePos::AlphaEnd { .. })
        && word.power_exponent_of(&Word::alpha(word.spec())).is_some()
}

/// Closed arc traversed counterclockwise from `lo` to `hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleInterval {
    pub lo: AnglePos,
    pub hi: AnglePos,
}

impl CircleInterval {
    pub fn new(lo: AnglePos, hi: AnglePos) -> CircleInterval {
        CircleInterval { lo, hi }
    }

    /// Arc image under a word; endpoints map individually since the action
    /// preserves orientation.
    pub fn translated(&self, word: &Word) -> CircleInterval {
        CircleInterval {
            lo: AnglePos::image(word, self.lo.clone()),
            hi: AnglePos::image(word, self.hi.clone()),
        }
    }

    /// Arc grown by an exact margin on both sides.
    pub fn thickened(&self, eps: &BigRational) -> CircleInterval {
        CircleInterval {
            lo: AnglePos::shifted(self.lo.clone(), &-eps.clone()),
            hi: AnglePos::shifted(self.hi.clone(), eps),
        }
    }

    pub fn shares_endpoint_with(&self, other: &CircleInterval) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }
}

impl fmt::Display for CircleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Reduces a ball known to lie within one unit of `[0, 1)` into `[0, 1)` by
/// subtracting its certified floor. Fails when the ball straddles an integer.
pub fn canon_ball(b: &Ball) -> Result<Ball, BallError> {
    let f_lo = shr_floor(b.lo(), b.prec());
    let f_hi = shr_floor(b.hi(), b.prec());
    if f_lo != f_hi {
        return Err(BallError::NeedsRefine);
    }
    let shift = &f_lo << b.prec();
    Ok(Ball::new(b.lo() - &shift, b.hi() - &shift, b.prec()))
}

/// Counterclockwise distance from `from` to `to`, both canonical in
/// `[0, 1)`. `None` when the difference's sign cannot be certified.
fn cyc_diff(to: &Ball, from: &Ball) -> Option<Ball> {
    let d = to.sub(from);
    match d.sign_certified()? {
        Ordering::Less => Some(d.add(&Ball::one(d.prec()))),
        _ => Some(d),
    }
}

/// Cyclic orientation of three angle balls canonical in `[0, 1)`.
///
/// `Some(1)` when the walk `a -> b -> c -> a` is counterclockwise,
/// `Some(-1)` when clockwise, `Some(0)` when two inputs coincide exactly,
/// `None` when the precision does not separate them.
pub fn ord3_balls(a: &Ball, b: &Ball, c: &Ball) -> Option<i8> {
    let u = cyc_diff(b, a)?;
    let v = cyc_diff(c, a)?;
    if u.is_exact() && u.lo().is_zero() {
        return Some(0);
    }
    if v.is_exact() && v.lo().is_zero() {
        return Some(0);
    }
    match u.lt_certified(&v) {
        Some(true) => Some(1),
        Some(false) => Some(-1),
        None => {
            if u.is_exact() && v.is_exact() && u.lo() == v.lo() {
                Some(0)
            } else {
                None
            }
        }
    }
}
