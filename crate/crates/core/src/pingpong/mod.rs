//! Certified ping-pong configurations on the boundary circle.
//!
//! A configuration places one elliptic rotation per torsion factor and one
//! hyperbolic map per handle generator in the disk model, then certifies
//! that the resulting dynamics realizes the intended cyclic order: the
//! chain of fundamental arcs closes up through the total monodromy, the
//! translate intervals are pairwise disjoint, every S generator owns a pair
//! of attracting domains separated from all others, and the finite
//! combinatorial data (ring plus nesting table) extracted from those
//! domains decides the orbit order by itself.
//!
//! All analytic claims go through interval arithmetic with a precision
//! ladder, so a returned configuration is a proof object, not a numerical
//! guess. Failures at a fixed geometry are retried with sharper rotations
//! and longer translation lengths before giving up.

pub mod chain;
pub mod combinat;
pub mod domains;
pub mod geometry;
pub mod points;
pub mod svg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::certarith::{CertError, PrecLadder};
use crate::words::{coset_tuples, coset_word, enumerate_s, identity_tuple, GroupSpec, SGen, Word};

use chain::{certify_chain, chain_anchor, check_transitions, ChainCert, TransitionsReport};
use combinat::{extract_order, CombinatorialOrder};
use domains::{
    attracting_domains, build_translates, certify_family, check_intersections, DomainFamily,
    IntersectionsReport, TranslateFamilies,
};

pub use combinat::{RingItem, SLetter, SPoint};
pub use geometry::{Geometry, PingPongParams};
pub use points::{AnglePos, CircleInterval};

#[derive(Debug, Error)]
pub enum PingPongError {
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("{stage}: {detail}")]
    CheckFailed { stage: &'static str, detail: String },
    #[error("no separation margin admits a certified domain family")]
    NoMargin,
    #[error("no geometry certified after {attempts} attempts, last failure: {last}")]
    Exhausted { attempts: u32, last: String },
}

/// Everything one verification run certifies, with enough counts to print a
/// deterministic report.
#[derive(Clone, Debug)]
pub struct PingPongCert {
    pub params: PingPongParams,
    pub transitions: TransitionsReport,
    pub chain: ChainCert,
    pub intersections: IntersectionsReport,
    pub epsilon: BigRational,
    pub domain_count: usize,
    pub formal_ok: bool,
    pub ring_len: usize,
    pub containment_checks: usize,
    pub containments_ok: bool,
}

impl PingPongCert {
    pub fn pass(&self) -> bool {
        self.transitions.pass()
            && self.chain.pass()
            && self.intersections.pass()
            && self.formal_ok
            && self.containments_ok
    }

    /// One line per certified claim, stable across runs.
    pub fn report_text(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, name: &str, detail: String, ok: bool| {
            out.push_str(&format!(
                "{name}: {detail}: {}\n",
                if ok { "PASS" } else { "FAIL" }
            ));
        };
        line(
            &mut out,
            "transitions",
            format!(
                "{} word identities, adjacency {}, closes through the monodromy {}",
                self.transitions.entries.len(),
                if self.transitions.adjacency_ok { "ok" } else { "broken" },
                if self.transitions.closes_with_alpha { "ok" } else { "broken" },
            ),
            self.transitions.pass(),
        );
        line(
            &mut out,
            "chain",
            format!(
                "{} arcs monotone {}, monodromy hyperbolic {}, basepoint placed {}",
                self.chain.arc_count,
                if self.chain.monotone_ok { "ok" } else { "broken" },
                if self.chain.alpha_hyperbolic { "ok" } else { "broken" },
                if self.chain.basepoint_ok { "ok" } else { "broken" },
            ),
            self.chain.pass(),
        );
        line(
            &mut out,
            "intersections",
            format!(
                "{} items over {} pairs, {} failures",
                self.intersections.items.len(),
                self.intersections.total_pairs(),
                self.intersections
                    .items
                    .iter()
                    .map(|i| i.failures.len())
                    .sum::<usize>(),
            ),
            self.intersections.pass(),
        );
        line(
            &mut out,
            "domains",
            format!(
                "{} arcs at margin {}, inclusions exact {}",
                self.domain_count,
                self.epsilon,
                if self.formal_ok { "ok" } else { "broken" },
            ),
            self.formal_ok,
        );
        line(
            &mut out,
            "order",
            format!(
                "ring of {} items, {} containments",
                self.ring_len, self.containment_checks,
            ),
            self.containments_ok,
        );
        line(
            &mut out,
            "overall",
            format!(
                "spread_exp={} length_exp={} prec {}..{}",
                self.params.spread_exp,
                self.params.length_exp,
                self.params.ladder.start,
                self.params.ladder.cap,
            ),
            self.pass(),
        );
        out
    }
}

/// A certified configuration: the geometry, the basepoint whose orbit
/// realizes the order, and the finite combinatorial order extracted from
/// the attracting domains.
#[derive(Debug)]
pub struct PingPongConfig {
    geom: Geometry,
    basepoint: AnglePos,
    sgens: Vec<SGen>,
    coset_words: Vec<Word>,
    identity_coset: usize,
    fams: TranslateFamilies,
    family: DomainFamily,
    order: CombinatorialOrder,
    cert: PingPongCert,
}

impl PingPongConfig {
    pub fn spec(&self) -> &GroupSpec {
        self.geom.spec()
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn basepoint(&self) -> &AnglePos {
        &self.basepoint
    }

    pub fn sgens(&self) -> &[SGen] {
        &self.sgens
    }

    pub fn coset_words(&self) -> &[Word] {
        &self.coset_words
    }

    pub fn identity_coset(&self) -> usize {
        self.identity_coset
    }

    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn order(&self) -> &CombinatorialOrder {
        &self.order
    }

    pub fn cert(&self) -> &PingPongCert {
        &self.cert
    }

    /// Re-runs every analytic check on the stored geometry and domains at
    /// another ladder, without rebuilding anything. Used to confirm that
    /// verdicts are stable under extra precision.
    pub fn recertify(&self, ladder: PrecLadder) -> Result<PingPongCert, PingPongError> {
        let transitions = check_transitions(&self.geom);
        let chain = certify_chain(&self.geom, ladder, &self.basepoint)?;
        let intersections = check_intersections(&self.geom, &self.sgens, &self.fams, ladder)?;
        if let Some(fail) = certify_family(&self.geom, &self.family, &self.fams.coset_points, ladder)? {
            return Err(PingPongError::CheckFailed { stage: "domain separation", detail: fail });
        }
        let order = extract_order(
            &self.geom,
            &self.sgens,
            &self.family,
            &self.fams,
            self.identity_coset,
            ladder,
        )?;
        if order.ring() != self.order.ring() {
            return Err(PingPongError::CheckFailed {
                stage: "recertify",
                detail: "ring changed under refinement".into(),
            });
        }
        Ok(PingPongCert {
            params: PingPongParams { ladder, ..self.geom.params() },
            transitions,
            chain,
            intersections,
            epsilon: self.family.epsilon.clone(),
            domain_count: self.family.domains.len(),
            formal_ok: self.family.formal_ok,
            ring_len: order.ring().len(),
            containment_checks: order.containment_checks,
            containments_ok: order.containments_ok,
        })
    }

    /// Renders the configuration as a standalone SVG document.
    pub fn export_svg(&self, orbit_count: usize) -> String {
        svg::render(self, orbit_count)
    }
}

/// Places the basepoint: the chain anchor directly when rotation landmarks
/// exist, otherwise a certified nudge clockwise off the anchor so the orbit
/// avoids every domain boundary.
fn place_basepoint(geom: &Geometry, ladder: PrecLadder) -> Result<AnglePos, PingPongError> {
    let anchor = chain_anchor(geom);
    if geom.spec().k() >= 1 {
        return Ok(anchor);
    }
    let rep = AnglePos::alpha_end(false);
    for b in [24u32, 48, 96, 192, 384] {
        let delta = -BigRational::new(BigInt::one(), BigInt::one() << b);
        let bp = AnglePos::shifted(anchor.clone(), &delta);
        if let Ok(1) = geom.ord3_with(ladder, &rep, &bp, &anchor) {
            return Ok(bp);
        }
    }
    Err(PingPongError::CheckFailed {
        stage: "basepoint",
        detail: "no certified offset between the repeller and the anchor".into(),
    })
}

fn try_build(spec: &GroupSpec, params: PingPongParams) -> Result<PingPongConfig, PingPongError> {
    let geom = Geometry::new(spec.clone(), params);
    let ladder = params.ladder;

    let transitions = check_transitions(&geom);
    if !transitions.pass() {
        let bad: Vec<&str> = transitions
            .entries
            .iter()
            .filter(|e| !e.ok)
            .map(|e| e.name.as_str())
            .collect();
        return Err(PingPongError::CheckFailed {
            stage: "chain transitions",
            detail: if bad.is_empty() {
                "arc endpoints do not chain".into()
            } else {
                bad.join(", ")
            },
        });
    }

    let basepoint = place_basepoint(&geom, ladder)?;

    let chain = certify_chain(&geom, ladder, &basepoint)?;
    if !chain.pass() {
        return Err(PingPongError::CheckFailed {
            stage: "chain",
            detail: format!(
                "monotone={} hyperbolic={} io={} basepoint={}",
                chain.monotone_ok, chain.alpha_hyperbolic, chain.io_ok, chain.basepoint_ok
            ),
        });
    }

    let sgens = enumerate_s(spec);
    let fams = build_translates(&geom, &sgens, &basepoint);

    let intersections = check_intersections(&geom, &sgens, &fams, ladder)?;
    if !intersections.pass() {
        let first = intersections
            .items
            .iter()
            .find_map(|i| i.failures.first().map(|f| format!("{}: {f}", i.name)))
            .unwrap_or_default();
        return Err(PingPongError::CheckFailed { stage: "intersections", detail: first });
    }

    let family = attracting_domains(&geom, &sgens, &fams, ladder)?;

    let tuples = coset_tuples(spec);
    let identity_coset = tuples
        .iter()
        .position(|t| *t == identity_tuple(spec))
        .expect("identity tuple enumerated");
    let coset_words: Vec<Word> = tuples.iter().map(|t| coset_word(spec, t)).collect();

    let order = extract_order(&geom, &sgens, &family, &fams, identity_coset, ladder)?;
    if !order.containments_ok {
        return Err(PingPongError::CheckFailed {
            stage: "containments",
            detail: order.containment_failures.join(", "),
        });
    }

    let cert = PingPongCert {
        params,
        transitions,
        chain,
        intersections,
        epsilon: family.epsilon.clone(),
        domain_count: family.domains.len(),
        formal_ok: family.formal_ok,
        ring_len: order.ring().len(),
        containment_checks: order.containment_checks,
        containments_ok: order.containments_ok,
    };

    Ok(PingPongConfig {
        geom,
        basepoint,
        sgens,
        coset_words,
        identity_coset,
        fams,
        family,
        order,
        cert,
    })
}

/// Builds a certified configuration, sharpening the geometry up to three
/// times when a check cannot be certified: each retry narrows the elliptic
/// spread and lengthens the hyperbolic translation.
pub fn build_configuration(
    spec: &GroupSpec,
    params: PingPongParams,
) -> Result<PingPongConfig, PingPongError> {
    const ATTEMPTS: u32 = 4;
    let mut last = String::new();
    for attempt in 0..ATTEMPTS {
        let grown = PingPongParams {
            spread_exp: params.spread_exp + 2 * attempt,
            length_exp: params.length_exp + attempt,
            ladder: params.ladder,
        };
        match try_build(spec, grown) {
            Ok(cfg) => return Ok(cfg),
            Err(e) => last = e.to_string(),
        }
    }
    Err(PingPongError::Exhausted { attempts: ATTEMPTS, last })
}
