//! Circular orders on free products of cyclic groups, realized dynamically.
//!
//! The library builds an explicit action of
//! `G = Z_{m_1} * ... * Z_{m_k} * F_{2n}` on the circle by Möbius
//! transformations, certifies a ping-pong configuration for an explicit
//! free subgroup of finite index, and uses the action to evaluate and
//! verify circular orders on `G`, their lifts to finite cyclic covers,
//! and the induced left orders on the central extension obtained by
//! replacing each relation `e_l^{m_l} = 1` with `e_l^{m_l} = z`.
//!
//! All order comparisons are certified: interval arithmetic with exact
//! integer ball endpoints decides strict inequalities, and word-level
//! normal forms decide equalities. No comparison is ever resolved by
//! floating point.

pub mod certarith;
pub mod circular;
pub mod cover;
pub mod leftorder;
pub mod moebius;
pub mod pingpong;
pub mod realization;
pub mod sampling;
pub mod words;

pub use certarith::{Ball, CertError, PrecLadder, Verdict};
pub use circular::{
    Automorphism, AutomorphicOrder, AxiomReport, CircularError, LinearPart, OrderHandle,
};
pub use cover::{
    np0_minus_p1, np0_witness, search_valid_d, CoverDatum, CoverError, GapOrbitReport, LiftEval,
    LinePoint, RotationCert,
};
pub use leftorder::{
    parse_hat, CompatReport, HatAutomorphism, HatWord, LeftOrderError, LeftOrderHandle,
};
pub use moebius::{Moebius, MoebiusClass};
pub use pingpong::{
    build_configuration, AnglePos, CircleInterval, PingPongCert, PingPongConfig, PingPongError,
    PingPongParams,
};
pub use realization::{
    length_lex_words, realize, roundtrip, FiniteOrderTable, RealizeError, RoundtripReport,
};
pub use words::{Gen, GroupSpec, Syllable, Word};
