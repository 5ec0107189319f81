use thiserror::Error;

use super::ball::{Ball, BallError};

/// Outcome of a certified three-way comparison. Strict inequalities are
/// certified numerically; equality is only ever established symbolically,
/// by the caller proving the two expressions are the same word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Less,
    Greater,
    EqualAsWords,
}

/// Hard failure: the ladder was exhausted without separating the values.
#[derive(Debug, Error, Clone)]
pub enum CertError {
    #[error("inconclusive at precision cap {cap}: {detail}")]
    Inconclusive { cap: u32, detail: String },
}

/// Doubling schedule of working precisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecLadder {
    pub start: u32,
    pub cap: u32,
}

impl Default for PrecLadder {
    fn default() -> Self {
        PrecLadder { start: 64, cap: 8192 }
    }
}

impl PrecLadder {
    pub fn new(start: u32, cap: u32) -> PrecLadder {
        let start = start.max(8);
        PrecLadder { start, cap: cap.max(start) }
    }

    pub fn rungs(&self) -> impl Iterator<Item = u32> {
        let (start, cap) = (self.start, self.cap);
        let mut cur = start;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            if cur >= cap {
                done = true;
                return Some(cap);
            }
            let out = cur;
            cur = cur.saturating_mul(2);
            Some(out)
        })
    }
}

/// Compare two real values given by ball evaluators. `sym_equal` is the
/// caller's symbolic equality proof; when false the values are distinct
/// reals and the ladder separates them (or reports honestly that it
/// could not).
pub fn certified_compare<F>(sym_equal: bool, mut eval: F, ladder: PrecLadder) -> Result<Verdict, CertError>
where
    F: FnMut(u32) -> Result<(Ball, Ball), BallError>,
{
    if sym_equal {
        return Ok(Verdict::EqualAsWords);
    }
    let mut last_err: Option<BallError> = None;
    for p in ladder.rungs() {
        match eval(p) {
            Err(e) => last_err = Some(e),
            Ok((a, b)) => match a.lt_certified(&b) {
                Some(true) => return Ok(Verdict::Less),
                Some(false) => return Ok(Verdict::Greater),
                None => {}
            },
        }
    }
    Err(CertError::Inconclusive {
        cap: ladder.cap,
        detail: match last_err {
            Some(e) => format!("balls never separated; last evaluator error: {e}"),
            None => "balls never separated".into(),
        },
    })
}

/// Certified strict sign of a real value (against zero). The value must
/// be nonzero unless `sym_zero` proves it is exactly zero.
pub fn certified_sign<F>(sym_zero: bool, mut eval: F, ladder: PrecLadder) -> Result<Verdict, CertError>
where
    F: FnMut(u32) -> Result<Ball, BallError>,
{
    certified_compare(sym_zero, |p| eval(p).map(|b| (b, Ball::zero(1))), ladder).map(|v| match v {
        Verdict::Less => Verdict::Less,
        Verdict::Greater => Verdict::Greater,
        Verdict::EqualAsWords => Verdict::EqualAsWords,
    })
}
