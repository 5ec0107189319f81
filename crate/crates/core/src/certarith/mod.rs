//! Certified interval arithmetic with exact integer endpoints.
//!
//! A [`Ball`] is a dyadic interval `[lo, hi] / 2^prec` guaranteed to
//! contain the exact real value it stands for. Every operation rounds
//! outward, so containment is an invariant, never a probability. Strict
//! comparisons are decided by separating intervals on a doubling
//! precision ladder; equality is never decided numerically, only by
//! word-level (symbolic) arguments supplied by callers.

mod ball;
mod cmp;
mod complex;
mod trig;

pub use ball::{shr_ceil, shr_floor, Ball, BallError};
pub use cmp::{certified_compare, certified_sign, CertError, PrecLadder, Verdict};
pub use complex::CBall;
pub use trig::{angle_turns, atan2_ball, cos_ball, exp_ball, pi_ball, sin_ball, sincos_turns};
