//! The circular order as an evaluable object.
//!
//! A handle pairs a certified configuration with an admissible covering
//! degree. Order values come from the orbit of the marked basepoint: three
//! distinct words map the basepoint to three distinct circle points (the
//! action on the orbit is free), and the value is the certified cyclic
//! orientation of those points, on the base circle for degree one and on
//! the cover circle otherwise. Zero values are decided by word equality
//! alone; no numeric computation ever returns zero for distinct words.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::certarith::CertError;
use crate::cover::{CoverDatum, CoverError, GapOrbitReport, LiftEval};
use crate::pingpong::{AnglePos, PingPongConfig};
use crate::words::{Gen, GroupSpec, Word};

#[derive(Debug, Error)]
pub enum CircularError {
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("automorphism rejected: {detail}")]
    BadAutomorphism { detail: String },
}

/// An evaluable circular order: a certified configuration together with a
/// covering degree. Degree one is the base order; higher degrees evaluate
/// through the lifted action on the cover circle.
#[derive(Clone)]
pub struct OrderHandle {
    lift: LiftEval,
}

impl OrderHandle {
    /// Validates the degree against the configuration: the datum's own
    /// arithmetic was checked at construction, and the gap orbit check
    /// certifies that the lifted chain word permutes the `d` gap copies in
    /// a single cycle.
    pub fn new(config: Arc<PingPongConfig>, datum: CoverDatum) -> Result<OrderHandle, CircularError> {
        let lift = LiftEval::new(config, datum)?;
        let report = lift.gap_orbit_check()?;
        if !report.pass() {
            return Err(CircularError::Cover(CoverError::CheckFailed {
                stage: "gap orbit",
                detail: format!("degree {} rejected: {report:?}", lift.datum().degree()),
            }));
        }
        Ok(OrderHandle { lift })
    }

    /// The base order at degree one.
    pub fn base(config: Arc<PingPongConfig>) -> Result<OrderHandle, CircularError> {
        let datum = CoverDatum::new(config.spec(), 0)?;
        OrderHandle::new(config, datum)
    }

    pub fn config(&self) -> &Arc<PingPongConfig> {
        self.lift.config()
    }

    pub fn datum(&self) -> &CoverDatum {
        self.lift.datum()
    }

    pub fn degree(&self) -> u64 {
        self.lift.datum().degree()
    }

    pub fn spec(&self) -> &GroupSpec {
        self.config().spec()
    }

    pub fn basepoint(&self) -> &AnglePos {
        self.config().basepoint()
    }

    pub fn lift(&self) -> &LiftEval {
        &self.lift
    }

    /// Value of the order on a triple of group elements. Zero exactly when
    /// two of the reduced words coincide; otherwise the certified
    /// orientation of the three orbit points, which is never zero because
    /// the action at the basepoint is free.
    pub fn eval_c(&self, g1: &Word, g2: &Word, g3: &Word) -> Result<i8, CertError> {
        if g1 == g2 || g2 == g3 || g1 == g3 {
            return Ok(0);
        }
        if self.degree() == 1 {
            let bp = self.basepoint();
            let geom = self.config().geometry();
            return geom.ord3(
                &AnglePos::image(g1, bp.clone()),
                &AnglePos::image(g2, bp.clone()),
                &AnglePos::image(g3, bp.clone()),
            );
        }
        let p1 = self.lift.eval_word(g1)?;
        let p2 = self.lift.eval_word(g2)?;
        let p3 = self.lift.eval_word(g3)?;
        self.lift.ord3_cover(&p1, &p2, &p3)
    }

    /// Runs the three order axioms over a quadruple sample: values vanish
    /// exactly on repeated entries, the alternating cocycle sum of the four
    /// face values is zero as literal integer arithmetic, and left
    /// translation by the first entry preserves the value of the remaining
    /// triple. Work is parallel per quadruple; the report is deterministic
    /// because outcomes are collected in sample order.
    pub fn check_axioms(&self, quadruples: &[[Word; 4]]) -> AxiomReport {
        let outcomes: Vec<Result<Vec<String>, CertError>> = quadruples
            .par_iter()
            .enumerate()
            .map(|(idx, q)| self.check_quadruple(idx, q))
            .collect();
        let mut report = AxiomReport {
            quadruples: quadruples.len(),
            ..AxiomReport::default()
        };
        for (idx, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(bad) => {
                    report.conclusive += 1;
                    report.violations.extend(bad);
                }
                Err(CertError::Inconclusive { .. }) => report.inconclusive.push(idx),
            }
        }
        report
    }

    fn check_quadruple(&self, idx: usize, q: &[Word; 4]) -> Result<Vec<String>, CertError> {
        let mut bad = Vec::new();
        let faces = [(1usize, 2usize, 3usize), (0, 2, 3), (0, 1, 3), (0, 1, 2)];
        let mut values = [0i32; 4];
        for (slot, &(a, b, c)) in faces.iter().enumerate() {
            let v = self.eval_c(&q[a], &q[b], &q[c])?;
            values[slot] = v as i32;
            let repeats = q[a] == q[b] || q[b] == q[c] || q[a] == q[c];
            if repeats != (v == 0) {
                bad.push(format!(
                    "quadruple {idx}: face ({a},{b},{c}) has value {v} with repeats={repeats}"
                ));
            }
        }
        let cocycle = values[0] - values[1] + values[2] - values[3];
        if cocycle != 0 {
            bad.push(format!("quadruple {idx}: cocycle sum {cocycle}"));
        }
        let shift = |j: usize| q[0].multiply(&q[j]).expect("words share the spec");
        let translated = self.eval_c(&shift(1), &shift(2), &shift(3))?;
        if translated as i32 != values[0] {
            bad.push(format!(
                "quadruple {idx}: left translation changed {} to {translated}",
                values[0]
            ));
        }
        Ok(bad)
    }

    /// Precomposition with a verified automorphism.
    pub fn automorphic_image(&self, phi: Automorphism) -> Result<AutomorphicOrder, CircularError> {
        if phi.spec() != self.spec() {
            return Err(CircularError::BadAutomorphism {
                detail: "automorphism and handle disagree on the group".into(),
            });
        }
        Ok(AutomorphicOrder { base: self.clone(), phi })
    }

    /// Generator of the order's linear part: the chain word raised to the
    /// covering degree, with a certificate that it fixes both symbolic
    /// endpoints of the basepoint gap while every smaller positive power
    /// moves the gap to a disjoint copy.
    pub fn linear_part(&self) -> Result<LinearPart, CircularError> {
        let d = self.degree();
        let alpha = Word::alpha(self.spec());
        let generator = alpha.pow(d as i64).expect("alpha powers stay reduced");
        let endpoints_fixed = [true, false].into_iter().all(|att| {
            let end = AnglePos::alpha_end(att);
            AnglePos::image(&generator, end.clone()) == end
        });
        let orbit = self.lift.gap_orbit_check()?;
        Ok(LinearPart { generator, exponent: d, endpoints_fixed, orbit })
    }
}

/// Outcome of an axiom suite. Inconclusive quadruples are indexed
/// separately and never counted as violations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub quadruples: usize,
    pub conclusive: usize,
    pub violations: Vec<String>,
    pub inconclusive: Vec<usize>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A group automorphism given by generator images, accepted only together
/// with an inverse assignment; the pair is verified by composing on every
/// generator both ways, and each torsion image must have the exact order
/// of its generator.
#[derive(Clone, Debug)]
pub struct Automorphism {
    spec: GroupSpec,
    forward: HashMap<Gen, Word>,
    backward: HashMap<Gen, Word>,
}

impl Automorphism {
    pub fn new(
        spec: &GroupSpec,
        forward: Vec<(Gen, Word)>,
        inverse: Vec<(Gen, Word)>,
    ) -> Result<Automorphism, CircularError> {
        let reject = |detail: String| CircularError::BadAutomorphism { detail };
        let collect = |assign: Vec<(Gen, Word)>, side: &str| {
            let mut map = HashMap::new();
            for (g, w) in assign {
                if !spec.holds(g) {
                    return Err(reject(format!("{side} names {g:?} outside the group")));
                }
                if map.insert(g, w).is_some() {
                    return Err(reject(format!("{side} assigns {g:?} twice")));
                }
            }
            for g in spec.gens() {
                if !map.contains_key(&g) {
                    return Err(reject(format!("{side} misses {g:?}")));
                }
            }
            Ok(map)
        };
        let forward = collect(forward, "assignment")?;
        let backward = collect(inverse, "inverse")?;
        let phi = Automorphism { spec: spec.clone(), forward, backward };

        for g in spec.gens() {
            let gen_word = Word::generator(spec, g, 1).expect("generator in spec");
            let round = phi.inverse_apply(&phi.apply(&gen_word));
            if round != gen_word {
                return Err(reject(format!("inverse fails on {g:?}: got {round}")));
            }
            let round = phi.apply(&phi.inverse_apply(&gen_word));
            if round != gen_word {
                return Err(reject(format!("inverse fails against {g:?}: got {round}")));
            }
            if let Gen::E(l) = g {
                let image = phi.apply(&gen_word);
                let m = spec.m(l);
                for p in 1..m {
                    if image.pow(p as i64).expect("reduced powers").is_identity() {
                        return Err(reject(format!(
                            "image of e_{l} has order dividing {p}, need {m}"
                        )));
                    }
                }
                if !image.pow(m as i64).expect("reduced powers").is_identity() {
                    return Err(reject(format!("image of e_{l} does not have order {m}")));
                }
            }
        }
        Ok(phi)
    }

    pub fn identity(spec: &GroupSpec) -> Automorphism {
        let assign: Vec<(Gen, Word)> = spec
            .gens()
            .map(|g| (g, Word::generator(spec, g, 1).expect("generator in spec")))
            .collect();
        Automorphism::new(spec, assign.clone(), assign).expect("identity is an automorphism")
    }

    /// Conjugation by `g`.
    pub fn inner(spec: &GroupSpec, g: &Word) -> Automorphism {
        let assign = |by: &Word| -> Vec<(Gen, Word)> {
            spec.gens()
                .map(|gen| {
                    let w = Word::generator(spec, gen, 1).expect("generator in spec");
                    (gen, w.conjugate(by).expect("words share the spec"))
                })
                .collect()
        };
        Automorphism::new(spec, assign(g), assign(&g.invert()))
            .expect("conjugation is an automorphism")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn map_with(&self, table: &HashMap<Gen, Word>, w: &Word) -> Word {
        let mut out = Word::identity(&self.spec);
        for syl in w.syllables() {
            let image = table[&syl.gen].pow(syl.exp).expect("reduced powers");
            out = out.multiply(&image).expect("words share the spec");
        }
        out
    }

    pub fn apply(&self, w: &Word) -> Word {
        self.map_with(&self.forward, w)
    }

    pub fn inverse_apply(&self, w: &Word) -> Word {
        self.map_with(&self.backward, w)
    }
}

/// The order pulled back along an automorphism: values on a triple are the
/// base order's values on the image triple.
pub struct AutomorphicOrder {
    base: OrderHandle,
    phi: Automorphism,
}

impl AutomorphicOrder {
    pub fn eval_c(&self, g1: &Word, g2: &Word, g3: &Word) -> Result<i8, CertError> {
        self.base
            .eval_c(&self.phi.apply(g1), &self.phi.apply(g2), &self.phi.apply(g3))
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.phi
    }
}

/// Generator of the cyclic stabilizer of the basepoint gap, with its
/// certificate data.
#[derive(Clone, Debug)]
pub struct LinearPart {
    /// The chain word raised to the covering degree.
    pub generator: Word,
    pub exponent: u64,
    /// Both symbolic gap endpoints collapse under the generator.
    pub endpoints_fixed: bool,
    /// Smaller powers move the gap to disjoint copies.
    pub orbit: GapOrbitReport,
}

impl LinearPart {
    pub fn pass(&self) -> bool {
        self.endpoints_fixed && self.orbit.pass()
    }
}
