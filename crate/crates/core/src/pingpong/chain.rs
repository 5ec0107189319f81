//! The interval chain and its transition certificates.
//!
//! One fundamental period of the monodromy action is tiled by `k + 4n`
//! closed arcs whose consecutive endpoints agree as reduced words applied
//! to landmarks, so adjacency is a word identity and not a numeric
//! coincidence. The untranslated intervals `J_i` and `K_j^±` sit near
//! their landmarks; the chain translates them by prefixes of alpha and
//! walks once counterclockwise from the anchor to `alpha(anchor)`.

use crate::certarith::{CertError, PrecLadder};
use crate::moebius::MoebiusClass;
use crate::words::{Gen, GroupSpec, Word};

use super::geometry::Geometry;
use super::points::{AnglePos, CircleInterval};

fn gen1(spec: &GroupSpec, g: Gen) -> Word {
    Word::generator(spec, g, 1).expect("generator in spec")
}

/// `gamma_p = [h_{2p-1}, h_{2p}]`.
pub(crate) fn gamma_word(spec: &GroupSpec, p: u16) -> Word {
    Word::commutator(&gen1(spec, Gen::H(2 * p - 1)), &gen1(spec, Gen::H(2 * p))).unwrap()
}

/// `J_i`: from `e_i^{-1}(x_{e_i})` counterclockwise across sector `i`.
pub fn interval_j(geom: &Geometry, i: u16) -> CircleInterval {
    let spec = geom.spec();
    assert!(i >= 1 && i <= spec.k(), "J_i needs 1 <= i <= k");
    let lo = AnglePos::image(&gen1(spec, Gen::E(i)).invert(), geom.x_e_pos(i));
    let hi = if i < spec.k() {
        geom.x_e_pos(i + 1)
    } else if spec.two_n() >= 1 {
        AnglePos::image(&gen1(spec, Gen::H(1)), geom.x_h_pos(1, true))
    } else {
        geom.x_e_pos(1)
    };
    CircleInterval::new(lo, hi)
}

/// `K_j^+` (plus) or `K_j^-` (minus), the handle intervals for `h_j`.
pub fn interval_k(geom: &Geometry, j: u16, plus: bool) -> CircleInterval {
    let spec = geom.spec();
    let two_n = spec.two_n();
    assert!(j >= 1 && j <= two_n, "K_j needs 1 <= j <= 2n");
    if plus {
        if j % 2 == 1 {
            CircleInterval::new(
                geom.x_h_pos(j, true),
                AnglePos::image(&gen1(spec, Gen::H(j + 1)), geom.x_h_pos(j + 1, true)),
            )
        } else {
            CircleInterval::new(geom.x_h_pos(j, true), geom.x_h_pos(j - 1, false))
        }
    } else {
        let lo = AnglePos::image(&gen1(spec, Gen::H(j)), geom.x_h_pos(j, false));
        let hi = if j % 2 == 1 {
            geom.x_h_pos(j + 1, false)
        } else if j < two_n {
            AnglePos::image(&gen1(spec, Gen::H(j + 1)), geom.x_h_pos(j + 1, true))
        } else if spec.k() >= 1 {
            geom.x_e_pos(1)
        } else {
            AnglePos::image(&gen1(spec, Gen::H(1)), geom.x_h_pos(1, true))
        };
        CircleInterval::new(lo, hi)
    }
}

/// Start of the chain: the first sector landmark, or `h_1(x_1^+)` when
/// there are no rotation generators.
pub fn chain_anchor(geom: &Geometry) -> AnglePos {
    if geom.spec().k() >= 1 {
        geom.x_e_pos(1)
    } else {
        AnglePos::image(&gen1(geom.spec(), Gen::H(1)), geom.x_h_pos(1, true))
    }
}

#[derive(Clone, Debug)]
pub struct ChainArc {
    pub name: String,
    pub outer: Word,
    pub base: CircleInterval,
    pub arc: CircleInterval,
}

/// The `k + 4n` chain arcs in counterclockwise order.
pub fn chain_arcs(geom: &Geometry) -> Vec<ChainArc> {
    let spec = geom.spec();
    let mut arcs = Vec::new();
    let mut prefix = Word::identity(spec);
    for i in 1..=spec.k() {
        prefix = prefix.multiply(&gen1(spec, Gen::E(i))).unwrap();
        let base = interval_j(geom, i);
        arcs.push(ChainArc {
            name: format!("J{i}"),
            outer: prefix.clone(),
            arc: base.translated(&prefix),
            base,
        });
    }
    // prefix now holds beta; advance by one commutator per handle pair
    for p in 1..=spec.n() {
        let (a, b) = (2 * p - 1, 2 * p);
        let ha = gen1(spec, Gen::H(a));
        let hb = gen1(spec, Gen::H(b));
        let stages = [
            (format!("K{a}+"), ha.clone(), interval_k(geom, a, true)),
            (format!("K{b}+"), ha.multiply(&hb).unwrap(), interval_k(geom, b, true)),
            (
                format!("K{a}-"),
                ha.multiply(&hb).unwrap().multiply(&ha.invert()).unwrap(),
                interval_k(geom, a, false),
            ),
            (format!("K{b}-"), gamma_word(spec, p), interval_k(geom, b, false)),
        ];
        for (name, inner, base) in stages {
            let outer = prefix.multiply(&inner).unwrap();
            arcs.push(ChainArc { name, outer: outer.clone(), arc: base.translated(&outer), base });
        }
        prefix = prefix.multiply(&gamma_word(spec, p)).unwrap();
    }
    arcs
}

#[derive(Clone, Debug)]
pub struct TransitionEntry {
    pub name: String,
    pub lhs: AnglePos,
    pub rhs: AnglePos,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct TransitionsReport {
    pub entries: Vec<TransitionEntry>,
    pub adjacency_ok: bool,
    pub closes_with_alpha: bool,
}

impl TransitionsReport {
    pub fn pass(&self) -> bool {
        self.adjacency_ok && self.closes_with_alpha && self.entries.iter().all(|e| e.ok)
    }
}

/// Word-level transition identities: the right endpoint of each interval,
/// pushed by the step that enters the next one, is the next interval's left
/// endpoint. Every entry is a structural equality of symbolic positions.
pub fn check_transitions(geom: &Geometry) -> TransitionsReport {
    let spec = geom.spec();
    let mut entries = Vec::new();
    let mut push = |name: String, lhs: AnglePos, rhs: AnglePos| {
        let ok = lhs == rhs;
        entries.push(TransitionEntry { name, lhs, rhs, ok });
    };

    for i in 2..=spec.k() {
        let ei = gen1(spec, Gen::E(i));
        push(
            format!("J{} meets e{}(J{})", i - 1, i, i),
            interval_j(geom, i - 1).hi,
            AnglePos::image(&ei, interval_j(geom, i).lo),
        );
    }
    let two_n = spec.two_n();
    if spec.k() >= 1 && two_n >= 1 {
        push(
            format!("J{} meets h1(K1+)", spec.k()),
            interval_j(geom, spec.k()).hi,
            AnglePos::image(&gen1(spec, Gen::H(1)), interval_k(geom, 1, true).lo),
        );
    }
    for j in 1..=two_n {
        if j % 2 == 1 {
            // odd: K_j^+ hands to h_{j+1}(K_{j+1}^+), K_j^- to h_{j+1}^{-1}(K_{j+1}^-)
            push(
                format!("K{j}+ meets h{}(K{}+)", j + 1, j + 1),
                interval_k(geom, j, true).hi,
                AnglePos::image(&gen1(spec, Gen::H(j + 1)), interval_k(geom, j + 1, true).lo),
            );
            push(
                format!("K{j}- meets h{}^-1(K{}-)", j + 1, j + 1),
                interval_k(geom, j, false).hi,
                AnglePos::image(&gen1(spec, Gen::H(j + 1)).invert(), interval_k(geom, j + 1, false).lo),
            );
        } else {
            // even: K_j^+ hands back to h_{j-1}^{-1}(K_{j-1}^-)
            push(
                format!("K{j}+ meets h{}^-1(K{}-)", j - 1, j - 1),
                interval_k(geom, j, true).hi,
                AnglePos::image(&gen1(spec, Gen::H(j - 1)).invert(), interval_k(geom, j - 1, false).lo),
            );
            if j < two_n {
                push(
                    format!("K{j}- meets h{}(K{}+)", j + 1, j + 1),
                    interval_k(geom, j, false).hi,
                    AnglePos::image(&gen1(spec, Gen::H(j + 1)), interval_k(geom, j + 1, true).lo),
                );
            } else {
                push(
                    format!("K{j}- meets the anchor"),
                    interval_k(geom, j, false).hi,
                    chain_anchor(geom),
                );
            }
        }
    }
    if two_n == 0 {
        push(
            format!("J{} meets the anchor", spec.k()),
            interval_j(geom, spec.k()).hi,
            chain_anchor(geom),
        );
    }

    let arcs = chain_arcs(geom);
    let adjacency_ok = arcs.windows(2).all(|w| w[0].arc.hi == w[1].arc.lo)
        && arcs.first().map_or(false, |a| a.arc.lo == chain_anchor(geom));
    let closes_with_alpha = arcs.last().map_or(false, |a| {
        a.arc.hi == AnglePos::image(&Word::alpha(spec), chain_anchor(geom))
    });

    TransitionsReport { entries, adjacency_ok, closes_with_alpha }
}

#[derive(Clone, Debug)]
pub struct ChainCert {
    pub arc_count: usize,
    pub monotone_ok: bool,
    pub alpha_hyperbolic: bool,
    /// Interval of the basepoint, bounded by the fixed points of alpha:
    /// counterclockwise from the repeller through the anchor and its
    /// alpha-image to the attractor. Alpha translates it counterclockwise
    /// and the chain is one fundamental period of that action.
    pub io: CircleInterval,
    pub io_ok: bool,
    pub basepoint_ok: bool,
}

impl ChainCert {
    pub fn pass(&self) -> bool {
        self.monotone_ok && self.alpha_hyperbolic && self.io_ok && self.basepoint_ok
    }
}

/// Certifies the numeric half of the chain: endpoints strictly increase
/// counterclockwise (so the walk stays under one full turn), alpha is
/// hyperbolic, and the anchor, its alpha-image, and the basepoint sit
/// strictly between the repelling and attracting fixed points in that
/// counterclockwise order.
pub fn certify_chain(
    geom: &Geometry,
    ladder: PrecLadder,
    basepoint: &AnglePos,
) -> Result<ChainCert, CertError> {
    let arcs = chain_arcs(geom);
    let q0 = arcs[0].arc.lo.clone();
    let mut points = vec![q0.clone()];
    points.extend(arcs.iter().map(|a| a.arc.hi.clone()));

    let mut monotone_ok = true;
    for i in 2..points.len() {
        if geom.ord3_with(ladder, &q0, &points[i - 1], &points[i])? != 1 {
            monotone_ok = false;
            break;
        }
    }

    let alpha_hyperbolic = geom.alpha_class(ladder) == MoebiusClass::Hyperbolic;

    let att = AnglePos::alpha_end(true);
    let rep = AnglePos::alpha_end(false);
    let q_last = points.last().unwrap().clone();
    let io_ok = geom.ord3_with(ladder, &rep, &q0, &q_last)? == 1
        && geom.ord3_with(ladder, &rep, &q_last, &att)? == 1;

    let basepoint_ok = if *basepoint == q0 {
        true
    } else {
        geom.ord3_with(ladder, &rep, basepoint, &q0)? == 1
    };

    Ok(ChainCert {
        arc_count: arcs.len(),
        monotone_ok,
        alpha_hyperbolic,
        io: CircleInterval::new(rep, att),
        io_ok,
        basepoint_ok,
    })
}
