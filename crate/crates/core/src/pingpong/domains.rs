//! Translate families and attracting domains.
//!
//! Layer one takes the exact, unthickened intervals near the landmarks and
//! certifies the disjointness table for their translates under the coset
//! words. Layer two thickens the rotation-side intervals by a margin
//! `epsilon`, builds one attracting domain per S generator and direction,
//! and certifies that all domains and coset basepoints are pairwise
//! separated. The ping-pong inclusions themselves are word identities over
//! the domain endpoints, so they need no arithmetic at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::certarith::{CertError, PrecLadder};
use crate::words::{coset_tuples, coset_word, e_power, low_word, Gen, SGen, SKind, Word};

use super::geometry::Geometry;
use super::points::{AnglePos, CircleInterval};
use super::PingPongError;

fn e_word(geom: &Geometry, t: u16, exp: i64) -> Word {
    Word::generator(geom.spec(), Gen::E(t), exp).expect("generator in spec")
}

fn h_word(geom: &Geometry, l: u16) -> Word {
    Word::generator(geom.spec(), Gen::H(l), 1).expect("generator in spec")
}

/// The rotation-side interval pair for `lambda = (u_1..u_t)`: the minus
/// interval is one sheet of the fan around `L(x_{e_t})` and the plus
/// interval is its image under the commutator `[e_t^{u_t}, L]`.
pub fn interval_j_lambda(geom: &Geometry, t: u16, lambda: &[u32], plus: bool) -> CircleInterval {
    let spec = geom.spec();
    assert!(t >= 2 && (t as usize) == lambda.len(), "lambda must reach its own slot");
    let u_t = lambda[(t - 1) as usize] as i64;
    let low = low_word(spec, &lambda[..(t - 1) as usize]);
    let x = geom.x_e_pos(t);
    if plus {
        let head = e_word(geom, t, u_t).multiply(&low).unwrap();
        CircleInterval::new(
            AnglePos::image(&head, x.clone()),
            AnglePos::image(&head.multiply(&e_word(geom, t, -1)).unwrap(), x),
        )
    } else {
        CircleInterval::new(
            AnglePos::image(&low.multiply(&e_word(geom, t, u_t - 1)).unwrap(), x.clone()),
            AnglePos::image(&low.multiply(&e_word(geom, t, u_t)).unwrap(), x),
        )
    }
}

/// The handle-side interval pair for `h_l`: the minus interval is the
/// protected window around the repeller, the plus interval its image.
pub fn interval_j_h(geom: &Geometry, l: u16, plus: bool) -> CircleInterval {
    if plus {
        let h = h_word(geom, l);
        CircleInterval::new(
            AnglePos::image(&h, geom.x_h_pos(l, true)),
            AnglePos::image(&h, geom.x_h_pos(l, false)),
        )
    } else {
        CircleInterval::new(geom.x_h_pos(l, false), geom.x_h_pos(l, true))
    }
}

/// Per-generator translate pairs, aligned with the S enumeration, plus the
/// coset images of the basepoint.
#[derive(Clone, Debug)]
pub struct TranslateFamilies {
    pub plus: Vec<CircleInterval>,
    pub minus: Vec<CircleInterval>,
    pub coset_points: Vec<AnglePos>,
}

pub fn build_translates(geom: &Geometry, sgens: &[SGen], basepoint: &AnglePos) -> TranslateFamilies {
    let spec = geom.spec();
    let mut plus = Vec::with_capacity(sgens.len());
    let mut minus = Vec::with_capacity(sgens.len());
    for s in sgens {
        match &s.kind {
            SKind::Conj { t, lambda, xi } => {
                let mut g_xi = Word::identity(spec);
                for (offset, l) in ((t + 1)..=spec.k()).enumerate().collect::<Vec<_>>().into_iter().rev() {
                    g_xi = g_xi.multiply(&e_power(spec, l, xi[offset])).unwrap();
                }
                plus.push(interval_j_lambda(geom, *t, lambda, true).translated(&g_xi));
                minus.push(interval_j_lambda(geom, *t, lambda, false).translated(&g_xi));
            }
            SKind::HConj { tuple, l } => {
                let e = coset_word(spec, tuple);
                plus.push(interval_j_h(geom, *l, true).translated(&e));
                minus.push(interval_j_h(geom, *l, false).translated(&e));
            }
        }
    }
    let coset_points = coset_tuples(spec)
        .iter()
        .map(|t| AnglePos::image(&coset_word(spec, t), basepoint.clone()))
        .collect();
    TranslateFamilies { plus, minus, coset_points }
}

/// Closed arcs with all four endpoints distinct are disjoint iff both ends
/// of one lie in the open complement of the other and the other's left end
/// lies in the first one's open complement.
fn arcs_disjoint_strict(
    geom: &Geometry,
    ladder: PrecLadder,
    a: &CircleInterval,
    b: &CircleInterval,
) -> Result<bool, CertError> {
    if a.shares_endpoint_with(b) {
        return Ok(false);
    }
    Ok(geom.ord3_with(ladder, &a.hi, &b.lo, &a.lo)? == 1
        && geom.ord3_with(ladder, &a.hi, &b.hi, &a.lo)? == 1
        && geom.ord3_with(ladder, &b.hi, &a.lo, &b.lo)? == 1)
}

/// Interior disjointness, allowing the arcs to touch at shared endpoints
/// when the sharing is a word identity.
fn arcs_interior_disjoint(
    geom: &Geometry,
    ladder: PrecLadder,
    a: &CircleInterval,
    b: &CircleInterval,
) -> Result<bool, CertError> {
    if a.lo == b.lo || a.hi == b.hi {
        // same-side sharing forces overlapping interiors
        return Ok(false);
    }
    match (a.hi == b.lo, b.hi == a.lo) {
        (true, true) => Ok(true),
        (true, false) => Ok(geom.ord3_with(ladder, &a.hi, &b.hi, &a.lo)? == 1),
        (false, true) => Ok(geom.ord3_with(ladder, &b.hi, &a.hi, &b.lo)? == 1),
        (false, false) => arcs_disjoint_strict(geom, ladder, a, b),
    }
}

fn point_outside(
    geom: &Geometry,
    ladder: PrecLadder,
    p: &AnglePos,
    arc: &CircleInterval,
) -> Result<bool, CertError> {
    if *p == arc.lo || *p == arc.hi {
        return Ok(false);
    }
    Ok(geom.ord3_with(ladder, &arc.hi, p, &arc.lo)? == 1)
}

pub(crate) fn point_strictly_inside(
    geom: &Geometry,
    ladder: PrecLadder,
    p: &AnglePos,
    arc: &CircleInterval,
) -> Result<bool, CertError> {
    if *p == arc.lo || *p == arc.hi {
        return Ok(false);
    }
    Ok(geom.ord3_with(ladder, &arc.lo, p, &arc.hi)? == 1)
}

pub(crate) fn arc_strictly_inside(
    geom: &Geometry,
    ladder: PrecLadder,
    inner: &CircleInterval,
    outer: &CircleInterval,
) -> Result<bool, CertError> {
    if inner.shares_endpoint_with(outer) {
        return Ok(false);
    }
    Ok(geom.ord3_with(ladder, &outer.lo, &inner.lo, &outer.hi)? == 1
        && geom.ord3_with(ladder, &inner.lo, &inner.hi, &outer.hi)? == 1)
}

#[derive(Clone, Debug)]
pub struct ItemReport {
    pub name: &'static str,
    pub pairs: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct IntersectionsReport {
    pub items: Vec<ItemReport>,
}

impl IntersectionsReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.failures.is_empty())
    }

    pub fn total_pairs(&self) -> usize {
        self.items.iter().map(|i| i.pairs).sum()
    }
}

/// The full disjointness table over the translate families:
/// plus-translates pairwise, minus-translate interiors pairwise, plus
/// against minus, each rotation family against each handle family, handle
/// families against each other, and every coset basepoint outside
/// everything.
pub fn check_intersections(
    geom: &Geometry,
    sgens: &[SGen],
    fams: &TranslateFamilies,
    ladder: PrecLadder,
) -> Result<IntersectionsReport, CertError> {
    let conj: Vec<usize> = (0..sgens.len())
        .filter(|&i| matches!(sgens[i].kind, SKind::Conj { .. }))
        .collect();
    let hc: Vec<usize> = (0..sgens.len())
        .filter(|&i| matches!(sgens[i].kind, SKind::HConj { .. }))
        .collect();

    let mut items = Vec::new();
    let mut pair_item = |name: &'static str,
                         pairs: Vec<(String, &CircleInterval, String, &CircleInterval, bool)>|
     -> Result<(), CertError> {
        let mut report = ItemReport { name, pairs: pairs.len(), failures: Vec::new() };
        for (la, a, lb, b, interior_only) in pairs {
            let ok = if interior_only {
                arcs_interior_disjoint(geom, ladder, a, b)?
            } else {
                arcs_disjoint_strict(geom, ladder, a, b)?
            };
            if !ok {
                report.failures.push(format!("{la} meets {lb}"));
            }
        }
        items.push(report);
        Ok(())
    };

    let mut pairs = Vec::new();
    for (ai, &i) in conj.iter().enumerate() {
        for &j in conj.iter().skip(ai + 1) {
            pairs.push((format!("P{i}"), &fams.plus[i], format!("P{j}"), &fams.plus[j], false));
        }
    }
    pair_item("rotation plus pairwise", pairs)?;

    let mut pairs = Vec::new();
    for (ai, &i) in conj.iter().enumerate() {
        for &j in conj.iter().skip(ai + 1) {
            pairs.push((format!("M{i}"), &fams.minus[i], format!("M{j}"), &fams.minus[j], true));
        }
    }
    pair_item("rotation minus interiors", pairs)?;

    let mut pairs = Vec::new();
    for &i in &conj {
        for &j in &conj {
            pairs.push((format!("P{i}"), &fams.plus[i], format!("M{j}"), &fams.minus[j], false));
        }
    }
    pair_item("rotation plus against minus", pairs)?;

    let mut pairs = Vec::new();
    for &i in &conj {
        for &j in &hc {
            pairs.push((format!("P{i}"), &fams.plus[i], format!("HP{j}"), &fams.plus[j], false));
            pairs.push((format!("P{i}"), &fams.plus[i], format!("HM{j}"), &fams.minus[j], false));
        }
    }
    pair_item("rotation plus against handles", pairs)?;

    let mut pairs = Vec::new();
    for &i in &conj {
        for &j in &hc {
            pairs.push((format!("M{i}"), &fams.minus[i], format!("HP{j}"), &fams.plus[j], false));
            pairs.push((format!("M{i}"), &fams.minus[i], format!("HM{j}"), &fams.minus[j], false));
        }
    }
    pair_item("rotation minus against handles", pairs)?;

    let mut pairs = Vec::new();
    for &i in &hc {
        for &j in &hc {
            pairs.push((format!("HP{i}"), &fams.plus[i], format!("HM{j}"), &fams.minus[j], false));
        }
    }
    pair_item("handle plus against minus", pairs)?;

    let mut pairs = Vec::new();
    for (ai, &i) in hc.iter().enumerate() {
        for &j in hc.iter().skip(ai + 1) {
            pairs.push((format!("HP{i}"), &fams.plus[i], format!("HP{j}"), &fams.plus[j], false));
            pairs.push((format!("HM{i}"), &fams.minus[i], format!("HM{j}"), &fams.minus[j], false));
        }
    }
    pair_item("handle same-sign pairwise", pairs)?;

    let mut report = ItemReport { name: "coset points exterior", pairs: 0, failures: Vec::new() };
    for (ci, p) in fams.coset_points.iter().enumerate() {
        for (i, arc) in fams.plus.iter().chain(fams.minus.iter()).enumerate() {
            report.pairs += 1;
            if !point_outside(geom, ladder, p, arc)? {
                report.failures.push(format!("x{ci} meets arc {i}"));
            }
        }
    }
    items.push(report);

    Ok(IntersectionsReport { items })
}

#[derive(Clone, Debug)]
pub struct AttractingDomain {
    /// Index into the S enumeration.
    pub sgen: usize,
    pub inverse: bool,
    pub arc: CircleInterval,
}

#[derive(Clone, Debug)]
pub struct DomainFamily {
    pub epsilon: BigRational,
    pub domains: Vec<AttractingDomain>,
    /// The ping-pong inclusions hold as word identities over the endpoints.
    pub formal_ok: bool,
}

impl DomainFamily {
    pub fn domain(&self, sgen: usize, inverse: bool) -> &CircleInterval {
        &self.domains[2 * sgen + usize::from(inverse)].arc
    }
}

fn build_domains(
    geom: &Geometry,
    sgens: &[SGen],
    fams: &TranslateFamilies,
    eps: &BigRational,
) -> Vec<AttractingDomain> {
    let _ = geom;
    let mut out = Vec::with_capacity(2 * sgens.len());
    for (i, s) in sgens.iter().enumerate() {
        let (fwd, inv) = match s.kind {
            SKind::Conj { .. } => {
                let fwd = fams.plus[i].thickened(eps);
                let w_inv = s.word.invert();
                let inv = CircleInterval::new(
                    AnglePos::image(&w_inv, fwd.hi.clone()),
                    AnglePos::image(&w_inv, fwd.lo.clone()),
                );
                (fwd, inv)
            }
            SKind::HConj { .. } => (fams.plus[i].clone(), fams.minus[i].clone()),
        };
        out.push(AttractingDomain { sgen: i, inverse: false, arc: fwd });
        out.push(AttractingDomain { sgen: i, inverse: true, arc: inv });
    }
    out
}

fn family_separated(
    geom: &Geometry,
    domains: &[AttractingDomain],
    points: &[AnglePos],
    ladder: PrecLadder,
) -> Result<Option<String>, CertError> {
    for (ai, a) in domains.iter().enumerate() {
        for b in domains.iter().skip(ai + 1) {
            if !arcs_disjoint_strict(geom, ladder, &a.arc, &b.arc)? {
                return Ok(Some(format!(
                    "D({}{}) meets D({}{})",
                    a.sgen,
                    if a.inverse { "^-1" } else { "" },
                    b.sgen,
                    if b.inverse { "^-1" } else { "" }
                )));
            }
        }
    }
    for (ci, p) in points.iter().enumerate() {
        for d in domains {
            if !point_outside(geom, ladder, p, &d.arc)? {
                return Ok(Some(format!(
                    "x{ci} inside D({}{})",
                    d.sgen,
                    if d.inverse { "^-1" } else { "" }
                )));
            }
        }
    }
    Ok(None)
}

/// Re-runs the separation table on an already built family, typically at a
/// different precision ladder.
pub fn certify_family(
    geom: &Geometry,
    family: &DomainFamily,
    points: &[AnglePos],
    ladder: PrecLadder,
) -> Result<Option<String>, CertError> {
    family_separated(geom, &family.domains, points, ladder)
}

fn formal_inclusions(sgens: &[SGen], domains: &[AttractingDomain]) -> bool {
    sgens.iter().enumerate().all(|(i, s)| {
        let fwd = &domains[2 * i].arc;
        let inv = &domains[2 * i + 1].arc;
        AnglePos::image(&s.word, inv.hi.clone()) == fwd.lo
            && AnglePos::image(&s.word, inv.lo.clone()) == fwd.hi
    })
}

/// Thickens the rotation-side translates, pairs every S generator with a
/// domain for each direction, and certifies that the whole family plus the
/// coset basepoints is pairwise separated.
///
/// The margin must sit below every gap in the translate pattern, and those
/// gaps shrink superexponentially with word length, so the search walks
/// dyadic exponents: doubling from `1/(8 * #domains)` until a margin
/// certifies, then bisecting exponents to keep the margin as large as the
/// certificates allow.
pub fn attracting_domains(
    geom: &Geometry,
    sgens: &[SGen],
    fams: &TranslateFamilies,
    ladder: PrecLadder,
) -> Result<DomainFamily, PingPongError> {
    let count = 2 * sgens.len().max(1);
    // smallest exponent with 2^exp at or above 8 * count
    let start = (8 * count as u128).next_power_of_two().trailing_zeros().max(3);
    const EXP_CAP: u32 = 4096;

    let probe = |exp: u32| -> bool {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << exp);
        let domains = build_domains(geom, sgens, fams, &eps);
        matches!(
            family_separated(geom, &domains, &fams.coset_points, ladder),
            Ok(None)
        )
    };

    let mut exp = start;
    let mut passing = loop {
        if probe(exp) {
            break exp;
        }
        if exp >= EXP_CAP {
            return Err(PingPongError::NoMargin);
        }
        exp = (2 * exp).min(EXP_CAP);
    };
    if passing > start {
        // widen the margin: bisect exponents between the last failing value
        // and the first passing one
        let mut failing = passing / 2;
        for _ in 0..3 {
            let mid = failing + (passing - failing) / 2;
            if mid == failing || mid == passing {
                break;
            }
            if probe(mid) {
                passing = mid;
            } else {
                failing = mid;
            }
        }
    }
    let chosen = BigRational::new(BigInt::one(), BigInt::one() << passing);

    let domains = build_domains(geom, sgens, fams, &chosen);
    if let Some(fail) = family_separated(geom, &domains, &fams.coset_points, ladder)? {
        return Err(PingPongError::CheckFailed { stage: "attracting domains", detail: fail });
    }
    let formal_ok = formal_inclusions(sgens, &domains);
    if !formal_ok {
        return Err(PingPongError::CheckFailed {
            stage: "attracting domains",
            detail: "ping-pong inclusion is not a word identity".into(),
        });
    }
    Ok(DomainFamily { epsilon: chosen, domains, formal_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pingpong::chain::chain_anchor;
    use crate::pingpong::geometry::PingPongParams;
    use crate::words::enumerate_s;

    fn geom(spec: &str) -> Geometry {
        Geometry::new(spec.parse().unwrap(), PingPongParams::default())
    }

    #[test]
    fn j_lambda_matches_expected_words() {
        let g = geom("0,2,2,3");
        let spec = g.spec().clone();
        // t = 2, lambda = (1, 1): minus side is [e1(x_e2), e1 e2(x_e2)]
        let jm = interval_j_lambda(&g, 2, &[1, 1], false);
        let x = g.x_e_pos(2);
        let e1 = Word::parse(&spec, "e1").unwrap();
        let e1e2 = Word::parse(&spec, "e1 e2").unwrap();
        assert_eq!(jm.lo, AnglePos::image(&e1, x.clone()));
        assert_eq!(jm.hi, AnglePos::image(&e1e2, x.clone()));
        // plus side is [e2 e1(x_e2), e2 e1 e2^-1(x_e2)]
        let jp = interval_j_lambda(&g, 2, &[1, 1], true);
        let e2e1 = Word::parse(&spec, "e2 e1").unwrap();
        let e2e1e2i = Word::parse(&spec, "e2 e1 e2^-1").unwrap();
        assert_eq!(jp.lo, AnglePos::image(&e2e1, x.clone()));
        assert_eq!(jp.hi, AnglePos::image(&e2e1e2i, x));
    }

    #[test]
    fn minus_fan_shares_endpoints() {
        let g = geom("0,2,2,3");
        let a = interval_j_lambda(&g, 2, &[1, 1], false);
        let b = interval_j_lambda(&g, 2, &[1, 2], false);
        assert_eq!(a.hi, b.lo);
        assert!(arcs_interior_disjoint(&g, g.ladder(), &a, &b).unwrap());
    }

    #[test]
    fn handle_interval_words() {
        let g = geom("1,1,2");
        let spec = g.spec().clone();
        let jp = interval_j_h(&g, 1, true);
        let h1 = Word::parse(&spec, "h1").unwrap();
        assert_eq!(jp.lo, AnglePos::image(&h1, g.x_h_pos(1, true)));
        assert_eq!(jp.hi, AnglePos::image(&h1, g.x_h_pos(1, false)));
        let jm = interval_j_h(&g, 1, false);
        assert_eq!(jm.lo, g.x_h_pos(1, false));
        assert_eq!(jm.hi, g.x_h_pos(1, true));
    }

    #[test]
    fn intersections_certify_for_sample_specs() {
        for s in ["0,2,2,3", "1,1,2", "0,3,2,2,2"] {
            let g = geom(s);
            let sgens = enumerate_s(g.spec());
            let fams = build_translates(&g, &sgens, &chain_anchor(&g));
            let rep = check_intersections(&g, &sgens, &fams, g.ladder()).unwrap();
            for item in &rep.items {
                assert!(item.failures.is_empty(), "{s}: {} fails {:?}", item.name, item.failures);
            }
        }
    }

    #[test]
    fn domains_certify_for_sample_specs() {
        for s in ["0,2,2,3", "1,1,2", "0,3,2,2,2"] {
            let g = geom(s);
            let sgens = enumerate_s(g.spec());
            let fams = build_translates(&g, &sgens, &chain_anchor(&g));
            let family = attracting_domains(&g, &sgens, &fams, g.ladder()).unwrap();
            assert!(family.formal_ok, "{s}");
            assert_eq!(family.domains.len(), 2 * sgens.len(), "{s}");
            assert!(family.epsilon.numer().is_one(), "{s}: margin is dyadic");
            assert!(family.epsilon > BigRational::new(BigInt::one(), BigInt::one() << 4097), "{s}");
        }
    }
}
