//! The central extension and its left orders.
//!
//! Replacing each relation `e_l^{m_l} = 1` with `e_l^{m_l} = z`, `z`
//! central, gives a group whose elements canonicalize as a pair: a normal
//! form word in the base group and an integer power of `z`. Multiplication
//! reduces the base words while counting how often a torsion exponent
//! wraps; each wrap carries one `z`. The lifted circle action orders this
//! group: `z` translates by one full cover turn, so comparisons reduce to
//! certified positions of lifted orbit points, and the center is cofinal.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::certarith::CertError;
use crate::circular::OrderHandle;
use crate::cover::LinePoint;
use crate::words::{tokenize, Gen, GroupSpec, Syllable, Word, WordError};

#[derive(Debug, Error)]
pub enum LeftOrderError {
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("center not preserved: z maps to z^{got}")]
    CenterNotPreserved { got: i64 },
    #[error("hat automorphism rejected: {detail}")]
    BadAutomorphism { detail: String },
}

/// Element of the central extension: a base-group normal form and the
/// exponent of the central generator. Every such pair is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HatWord {
    base: Word,
    z_exp: i64,
}

fn carry_normalize(spec: &GroupSpec, gen: Gen, exp: i64, carry: &mut i64) -> i64 {
    match gen {
        Gen::E(l) => {
            let m = spec.m(l) as i64;
            let (q, r) = exp.div_mod_floor(&m);
            *carry += q;
            r
        }
        Gen::H(_) => exp,
    }
}

/// Reduction step shared with the base group's word arithmetic, plus the
/// carry count: a torsion exponent leaving `[0, m)` moves whole powers of
/// `e_l^{m_l} = z` into the central coordinate.
fn carry_push(spec: &GroupSpec, out: &mut Vec<Syllable>, gen: Gen, exp: i64, carry: &mut i64) {
    let mut exp = carry_normalize(spec, gen, exp, carry);
    loop {
        if exp == 0 {
            return;
        }
        match out.last() {
            Some(top) if top.gen == gen => {
                let merged = top.exp + exp;
                out.pop();
                exp = carry_normalize(spec, gen, merged, carry);
            }
            _ => {
                out.push(Syllable { gen, exp });
                return;
            }
        }
    }
}

impl HatWord {
    pub fn new(base: Word, z_exp: i64) -> HatWord {
        HatWord { base, z_exp }
    }

    pub fn identity(spec: &GroupSpec) -> HatWord {
        HatWord { base: Word::identity(spec), z_exp: 0 }
    }

    pub fn from_word(base: Word) -> HatWord {
        HatWord { base, z_exp: 0 }
    }

    pub fn z_power(spec: &GroupSpec, exp: i64) -> HatWord {
        HatWord { base: Word::identity(spec), z_exp: exp }
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn z_exp(&self) -> i64 {
        self.z_exp
    }

    pub fn spec(&self) -> &GroupSpec {
        self.base.spec()
    }

    pub fn is_identity(&self) -> bool {
        self.base.is_identity() && self.z_exp == 0
    }

    pub fn multiply(&self, other: &HatWord) -> Result<HatWord, WordError> {
        if self.spec() != other.spec() {
            return Err(WordError::SpecMismatch);
        }
        let spec = self.spec().clone();
        let mut syls: Vec<Syllable> = self.base.syllables().to_vec();
        let mut carry = 0i64;
        for s in other.base.syllables() {
            carry_push(&spec, &mut syls, s.gen, s.exp, &mut carry);
        }
        let base = Word::from_syllables(&spec, syls)?;
        debug_assert_eq!(base, self.base.multiply(&other.base)?, "carry reduction tracks the base product");
        Ok(HatWord { base, z_exp: self.z_exp + other.z_exp + carry })
    }

    /// Inverting each torsion syllable costs one `z`:
    /// `(e_l^j)^{-1} = e_l^{m_l - j} z^{-1}`. The reversed inverses never
    /// merge, so the base is the plain word inverse.
    pub fn invert(&self) -> HatWord {
        let torsion = self
            .base
            .syllables()
            .iter()
            .filter(|s| matches!(s.gen, Gen::E(_)))
            .count() as i64;
        HatWord { base: self.base.invert(), z_exp: -self.z_exp - torsion }
    }

    pub fn pow(&self, e: i64) -> Result<HatWord, WordError> {
        let factor = if e < 0 { self.invert() } else { self.clone() };
        let mut out = HatWord::identity(self.spec());
        for _ in 0..e.unsigned_abs() {
            out = out.multiply(&factor)?;
        }
        Ok(out)
    }
}

/// Parses a word over the generators plus the central letter `z`, e.g.
/// `"e1 h2^-1 z^3"`. Central letters commute to the end regardless of
/// where they appear.
pub fn parse_hat(spec: &GroupSpec, input: &str) -> Result<HatWord, WordError> {
    let mut syls: Vec<Syllable> = Vec::new();
    let mut carry = 0i64;
    for (gen, exp, is_z) in tokenize(input, true)? {
        if is_z {
            carry += exp;
        } else {
            if !spec.holds(gen) {
                return Err(WordError::UnknownGenerator(gen));
            }
            carry_push(spec, &mut syls, gen, exp, &mut carry);
        }
    }
    Ok(HatWord { base: Word::from_syllables(spec, syls)?, z_exp: carry })
}

impl fmt::Display for HatWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.base.is_identity(), self.z_exp) {
            (true, 0) => write!(f, "1"),
            (true, t) => write!(f, "z^{t}"),
            (false, 0) => write!(f, "{}", self.base),
            (false, t) => write!(f, "{} z^{t}", self.base),
        }
    }
}

/// A left order on the central extension: compare lifted orbit points of
/// the marked basepoint, with `z` acting as translation by one cover turn.
pub struct LeftOrderHandle {
    order: OrderHandle,
}

impl LeftOrderHandle {
    pub fn new(order: OrderHandle) -> LeftOrderHandle {
        LeftOrderHandle { order }
    }

    pub fn order(&self) -> &OrderHandle {
        &self.order
    }

    pub fn spec(&self) -> &GroupSpec {
        self.order.spec()
    }

    fn point(&self, g: &HatWord) -> Result<LinePoint, CertError> {
        let p = self.order.lift().eval_word(g.base())?;
        Ok(self.order.lift().z_shift(&p, g.z_exp()))
    }

    /// Strict total order: equality holds exactly for equal canonical
    /// pairs, every other comparison is a certified position comparison.
    pub fn hat_compare(&self, a: &HatWord, b: &HatWord) -> Result<Ordering, CertError> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let pa = self.point(a)?;
        let pb = self.point(b)?;
        let ord = self.order.lift().cmp_line(&pa, &pb)?;
        debug_assert_ne!(ord, Ordering::Equal, "the orbit of the basepoint is free");
        Ok(ord)
    }

    /// Floor of the basepoint displacement in cover turns. The
    /// displacement is an exact multiple of the degree only for a trivial
    /// base word, so the boundary cases are decided structurally or by one
    /// certified angle comparison.
    fn displacement_floor(&self, p: &LinePoint, base_is_identity: bool) -> Result<i64, CertError> {
        let d = self.order.degree() as i64;
        if base_is_identity {
            debug_assert_eq!(p.sheet.rem_euclid(d), 0);
            return Ok(Integer::div_floor(&p.sheet, &d));
        }
        let (q, r) = p.sheet.div_mod_floor(&d);
        if r != 0 {
            return Ok(q);
        }
        let angle_only = LinePoint { pos: p.pos.clone(), sheet: 0 };
        match self.order.lift().cmp_line(&angle_only, &self.order.lift().start())? {
            Ordering::Greater => Ok(q),
            Ordering::Less => Ok(q - 1),
            // Exact angle coincidence with the basepoint cannot happen for
            // a nontrivial base word; treat it as the window start.
            Ordering::Equal => Ok(q),
        }
    }

    /// Minimal integers with `z^kLow < g < z^kHigh`. Both bounds are
    /// strict, so a pure central power gets the two neighbours around its
    /// own exponent.
    pub fn cofinal_bounds(&self, g: &HatWord) -> Result<(i64, i64), CertError> {
        let p = self.point(g)?;
        if g.base().is_identity() {
            let q = self.displacement_floor(&p, true)?;
            return Ok((q - 1, q + 1));
        }
        let floor = self.displacement_floor(&p, false)?;
        Ok((floor, floor + 1))
    }

    /// The unique central twist putting the element's point into the
    /// half-open fundamental window `[basepoint, z basepoint)`.
    fn window_exp(&self, g: &HatWord) -> Result<i64, CertError> {
        let p = self.point(g)?;
        Ok(-self.displacement_floor(&p, g.base().is_identity())?)
    }

    /// Lift of a base-group element into the fundamental window,
    /// closed on the identity side.
    pub fn project_lift(&self, g: &Word) -> Result<HatWord, CertError> {
        let hat = HatWord::from_word(g.clone());
        let t = self.window_exp(&hat)?;
        Ok(HatWord::new(g.clone(), t))
    }

    /// Projection back to the circular order: lift the three elements into
    /// the fundamental window and return the sign of the permutation that
    /// sorts them. Equals the underlying order's triple value.
    pub fn project_order(&self, g1: &Word, g2: &Word, g3: &Word) -> Result<i8, CertError> {
        if g1 == g2 || g2 == g3 || g1 == g3 {
            return Ok(0);
        }
        let pts = [
            self.point(&self.project_lift(g1)?)?,
            self.point(&self.project_lift(g2)?)?,
            self.point(&self.project_lift(g3)?)?,
        ];
        self.window_sign(&pts)
    }

    fn window_sign(&self, pts: &[LinePoint; 3]) -> Result<i8, CertError> {
        let mut inversions = 0u32;
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if self.order.lift().cmp_line(&pts[i], &pts[j])? == Ordering::Greater {
                inversions += 1;
            }
        }
        Ok(if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// Commuting-diagram test: projecting the order pulled back along a
    /// hat automorphism must match pulling the projected order back along
    /// the base automorphism, triple by triple.
    pub fn automorphism_compat_check(
        &self,
        phi: &HatAutomorphism,
        samples: &[[Word; 3]],
    ) -> Result<CompatReport, LeftOrderError> {
        let mut report = CompatReport {
            samples: samples.len(),
            mismatches: Vec::new(),
            inconclusive: Vec::new(),
        };
        for (idx, triple) in samples.iter().enumerate() {
            match self.compat_one(phi, triple) {
                Ok(true) => {}
                Ok(false) => report.mismatches.push(idx),
                Err(LeftOrderError::Cert(CertError::Inconclusive { .. })) => {
                    report.inconclusive.push(idx)
                }
                Err(other) => return Err(other),
            }
        }
        Ok(report)
    }

    fn compat_one(&self, phi: &HatAutomorphism, triple: &[Word; 3]) -> Result<bool, LeftOrderError> {
        let images: Vec<HatWord> = triple
            .iter()
            .map(|g| phi.apply(&HatWord::from_word(g.clone())))
            .collect::<Result<_, _>>()?;
        // Projection of the pulled-back order: the window condition for a
        // lift g z^t transports to the image point landing in the window,
        // and sorting by the pulled-back order is sorting the image points.
        let lhs = if triple[0] == triple[1] || triple[1] == triple[2] || triple[0] == triple[2] {
            0
        } else {
            let mut pts = Vec::with_capacity(3);
            for img in &images {
                let u = self.window_exp(img)?;
                let shifted = img.multiply(&HatWord::z_power(self.spec(), u))?;
                pts.push(self.point(&shifted)?);
            }
            let pts: [LinePoint; 3] = pts.try_into().expect("three points");
            self.window_sign(&pts)?
        };
        let rhs = self.project_order(
            images[0].base(),
            images[1].base(),
            images[2].base(),
        )?;
        Ok(lhs == rhs)
    }
}

/// Outcome of the commuting-diagram suite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatReport {
    pub samples: usize,
    pub mismatches: Vec<usize>,
    pub inconclusive: Vec<usize>,
}

impl CompatReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Automorphism of the central extension given by generator images and the
/// central sign, accepted only with a verified inverse assignment. The
/// center must map to `z^{+1}` or `z^{-1}`, each torsion image must
/// satisfy its lifted relation, and both compositions must fix every
/// generator.
#[derive(Clone, Debug)]
pub struct HatAutomorphism {
    spec: GroupSpec,
    forward: HashMap<Gen, HatWord>,
    backward: HashMap<Gen, HatWord>,
    z_sign: i64,
}

impl HatAutomorphism {
    pub fn new(
        spec: &GroupSpec,
        forward: Vec<(Gen, HatWord)>,
        z_forward: i64,
        inverse: Vec<(Gen, HatWord)>,
        z_inverse: i64,
    ) -> Result<HatAutomorphism, LeftOrderError> {
        let reject = |detail: String| LeftOrderError::BadAutomorphism { detail };
        if z_forward.abs() != 1 {
            return Err(LeftOrderError::CenterNotPreserved { got: z_forward });
        }
        if z_forward * z_inverse != 1 {
            return Err(reject(format!(
                "central images z^{z_forward} and z^{z_inverse} do not compose to z"
            )));
        }
        let collect = |assign: Vec<(Gen, HatWord)>, side: &str| {
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
        let phi = HatAutomorphism { spec: spec.clone(), forward, backward, z_sign: z_forward };

        for g in spec.gens() {
            let gen_hat = HatWord::from_word(Word::generator(spec, g, 1).expect("generator in spec"));
            let round = phi.inverse_apply(&phi.apply(&gen_hat)?)?;
            if round != gen_hat {
                return Err(reject(format!("inverse fails on {g:?}: got {round}")));
            }
            let round = phi.apply(&phi.inverse_apply(&gen_hat)?)?;
            if round != gen_hat {
                return Err(reject(format!("inverse fails against {g:?}: got {round}")));
            }
            if let Gen::E(l) = g {
                let m = spec.m(l) as i64;
                let relation = phi.forward[&g].pow(m)?;
                if relation != HatWord::z_power(spec, z_forward) {
                    return Err(reject(format!(
                        "image of e_{l} raised to {m} gives {relation}, expected z^{z_forward}"
                    )));
                }
            }
        }
        Ok(phi)
    }

    pub fn identity(spec: &GroupSpec) -> HatAutomorphism {
        let assign: Vec<(Gen, HatWord)> = spec
            .gens()
            .map(|g| {
                (g, HatWord::from_word(Word::generator(spec, g, 1).expect("generator in spec")))
            })
            .collect();
        HatAutomorphism::new(spec, assign.clone(), 1, assign, 1)
            .expect("identity is a hat automorphism")
    }

    /// Conjugation by a fixed element; the center is untouched.
    pub fn inner(spec: &GroupSpec, g: &HatWord) -> Result<HatAutomorphism, LeftOrderError> {
        let assign = |by: &HatWord| -> Result<Vec<(Gen, HatWord)>, WordError> {
            spec.gens()
                .map(|gen| {
                    let w = HatWord::from_word(
                        Word::generator(spec, gen, 1).expect("generator in spec"),
                    );
                    Ok((gen, by.multiply(&w)?.multiply(&by.invert())?))
                })
                .collect()
        };
        HatAutomorphism::new(spec, assign(g)?, 1, assign(&g.invert())?, 1)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn z_sign(&self) -> i64 {
        self.z_sign
    }

    fn map_with(&self, table: &HashMap<Gen, HatWord>, g: &HatWord) -> Result<HatWord, WordError> {
        let mut out = HatWord::identity(&self.spec);
        for syl in g.base().syllables() {
            let img = table[&syl.gen].pow(syl.exp)?;
            out = out.multiply(&img)?;
        }
        Ok(HatWord::new(out.base, out.z_exp + self.z_sign * g.z_exp()))
    }

    pub fn apply(&self, g: &HatWord) -> Result<HatWord, WordError> {
        self.map_with(&self.forward, g)
    }

    pub fn inverse_apply(&self, g: &HatWord) -> Result<HatWord, WordError> {
        self.map_with(&self.backward, g)
    }

    /// The induced base-group automorphism image.
    pub fn base_image(&self, g: &Word) -> Result<Word, WordError> {
        Ok(self.apply(&HatWord::from_word(g.clone()))?.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circular::OrderHandle;
    use crate::cover::CoverDatum;
    use crate::pingpong::{build_configuration, PingPongConfig, PingPongParams};
    use once_cell::sync::Lazy;
    use std::sync::Arc;

    fn spec23() -> GroupSpec {
        "0,2,2,3".parse().unwrap()
    }

    fn genus_spec() -> GroupSpec {
        "1,1,2".parse().unwrap()
    }

    static CONFIG_23: Lazy<Arc<PingPongConfig>> = Lazy::new(|| {
        Arc::new(build_configuration(&spec23(), PingPongParams::default()).unwrap())
    });

    static CONFIG_GENUS: Lazy<Arc<PingPongConfig>> = Lazy::new(|| {
        Arc::new(build_configuration(&genus_spec(), PingPongParams::default()).unwrap())
    });

    fn handle(a: u64) -> LeftOrderHandle {
        let datum = CoverDatum::new(&spec23(), a).unwrap();
        LeftOrderHandle::new(OrderHandle::new(CONFIG_23.clone(), datum).unwrap())
    }

    fn genus_handle() -> LeftOrderHandle {
        let datum = CoverDatum::new(&genus_spec(), 0).unwrap();
        LeftOrderHandle::new(OrderHandle::new(CONFIG_GENUS.clone(), datum).unwrap())
    }

    fn hw(s: &str) -> HatWord {
        parse_hat(&spec23(), s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&spec23(), s).unwrap()
    }

    #[test]
    fn carry_arithmetic_matches_relations() {
        // e1^2 = z and the overflow carry.
        assert_eq!(hw("e1^2"), HatWord::z_power(&spec23(), 1));
        assert_eq!(hw("e1^3"), HatWord::new(w("e1"), 1));
        assert_eq!(hw("e2^3"), HatWord::z_power(&spec23(), 1));
        assert_eq!(hw("e2^-1"), HatWord::new(w("e2 e2"), -1));

        // z is central.
        let g = parse_hat(&genus_spec(), "h1 z h1^-1").unwrap();
        assert_eq!(g, HatWord::z_power(&genus_spec(), 1));

        // A cascading collapse picks up every wrap: merging e2 exponents
        // wraps once, then the exposed e1 pair wraps again.
        let a = hw("e1 e2");
        let b = hw("e2^2 e1");
        assert_eq!(a.multiply(&b).unwrap(), HatWord::z_power(&spec23(), 2));
    }

    #[test]
    fn products_inverses_and_parse_display() {
        let samples = ["1", "z^3", "e1", "e2^2 z^-1", "e1 e2 e1 z^2", "e2 e1 e2^2"];
        for s in samples {
            let g = hw(s);
            let round = parse_hat(&spec23(), &g.to_string()).unwrap();
            assert_eq!(g, round, "display/parse round trip for {s}");
            let inv = g.invert();
            assert!(g.multiply(&inv).unwrap().is_identity(), "{s} times inverse");
            assert!(inv.multiply(&g).unwrap().is_identity(), "inverse times {s}");
        }
        assert_eq!(hw("e2").pow(4).unwrap(), HatWord::new(w("e2"), 1));
        assert_eq!(hw("e1").pow(-3).unwrap(), HatWord::new(w("e1"), -2));
    }

    #[test]
    fn compare_basics_and_cofinality() {
        let h = handle(1);
        let one = HatWord::identity(&spec23());
        let z = HatWord::z_power(&spec23(), 1);
        assert_eq!(h.hat_compare(&one, &z).unwrap(), Ordering::Less);

        for s in ["e1", "e2", "e1 e2 z^-2", "e2^2 e1 z^1", "z^-3"] {
            let g = hw(s);
            let gz = g.multiply(&z).unwrap();
            assert_eq!(h.hat_compare(&g, &gz).unwrap(), Ordering::Less, "{s} < {s} z");
            assert_eq!(h.hat_compare(&gz, &g).unwrap(), Ordering::Greater);
            assert_eq!(h.hat_compare(&g, &g).unwrap(), Ordering::Equal);
        }

        assert_eq!(h.cofinal_bounds(&hw("z^5")).unwrap(), (4, 6));
        assert_eq!(h.cofinal_bounds(&one).unwrap(), (-1, 1));
        for s in ["e1", "e1 e2", "e2^2 z^-4", "e1 e2 e1 z^3"] {
            let g = hw(s);
            let (lo, hi) = h.cofinal_bounds(&g).unwrap();
            assert_eq!(hi - lo, 1, "nontrivial base gives strict unit window for {s}");
            let zlo = HatWord::z_power(&spec23(), lo);
            let zhi = HatWord::z_power(&spec23(), hi);
            assert_eq!(h.hat_compare(&zlo, &g).unwrap(), Ordering::Less);
            assert_eq!(h.hat_compare(&g, &zhi).unwrap(), Ordering::Less);
        }
    }

    #[test]
    fn order_axioms_on_fixed_sample() {
        let h = handle(1);
        let sample: Vec<HatWord> = ["1", "z", "z^-1", "e1", "e2", "e1 z^-1", "e1 e2", "e2 e1 z^2"]
            .iter()
            .map(|s| hw(s))
            .collect();
        for a in &sample {
            for b in &sample {
                let ab = h.hat_compare(a, b).unwrap();
                let ba = h.hat_compare(b, a).unwrap();
                assert_eq!(ab, ba.reverse(), "antisymmetry for {a} vs {b}");
                if a != b {
                    assert_ne!(ab, Ordering::Equal, "totality for {a} vs {b}");
                }
                // Left invariance under a fixed shift.
                let s = hw("e2 e1 z^-1");
                let sa = s.multiply(a).unwrap();
                let sb = s.multiply(b).unwrap();
                assert_eq!(h.hat_compare(&sa, &sb).unwrap(), ab, "left shift of {a} vs {b}");
            }
        }
        for a in &sample {
            for b in &sample {
                for c in &sample {
                    if h.hat_compare(a, b).unwrap() == Ordering::Less
                        && h.hat_compare(b, c).unwrap() == Ordering::Less
                    {
                        assert_eq!(
                            h.hat_compare(a, c).unwrap(),
                            Ordering::Less,
                            "transitivity on {a}, {b}, {c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn window_lift_is_unique_and_projects_to_eval_c() {
        for a in [0u64, 1] {
            let h = handle(a);
            let z = HatWord::z_power(&spec23(), 1);
            for s in ["", "e1", "e2", "e1 e2", "e2 e1", "e2^2 e1 e2"] {
                let lift = h.project_lift(&w(s)).unwrap();
                let p = h.point(&lift).unwrap();
                // In window: basepoint <= p < basepoint + d.
                let start = h.order().lift().start();
                let top = h.order().lift().z_shift(&start, 1);
                assert_ne!(h.order().lift().cmp_line(&p, &start).unwrap(), Ordering::Less, "{s}");
                assert_eq!(h.order().lift().cmp_line(&p, &top).unwrap(), Ordering::Less, "{s}");
                // Neighbouring twists leave the window.
                let up = h.point(&lift.multiply(&z).unwrap()).unwrap();
                let down = h.point(&lift.multiply(&z.invert()).unwrap()).unwrap();
                assert_ne!(h.order().lift().cmp_line(&up, &top).unwrap(), Ordering::Less);
                assert_eq!(h.order().lift().cmp_line(&down, &start).unwrap(), Ordering::Less);
            }

            let triples = [
                ("", "e1", "e1 e2"),
                ("e2", "e1", "e2 e1"),
                ("e1", "e2 e2", "e1 e2 e1"),
                ("", "", "e1"),
            ];
            for (x, y, t) in triples {
                let lhs = h.project_order(&w(x), &w(y), &w(t)).unwrap();
                let rhs = h.order().eval_c(&w(x), &w(y), &w(t)).unwrap();
                assert_eq!(lhs, rhs, "projection equals the circular value on ({x}, {y}, {t})");
            }
        }
    }

    #[test]
    fn z_exponent_equals_lifted_winding() {
        for a in [0u64, 1] {
            let h = handle(a);
            let lift = h.order().lift();
            let pairs = [
                ("e1", "e1"),
                ("e2^2", "e2"),
                ("e1 e2", "e2^2 e1"),
                ("e2 e1 e2", "e2^2 e1 e2^2"),
                ("e1 e2 e1", "e1 e2^2 e1"),
            ];
            for (s1, s2) in pairs {
                let a1 = hw(s1);
                let a2 = hw(s2);
                assert_eq!((a1.z_exp(), a2.z_exp()), (0, 0));
                let prod = a1.multiply(&a2).unwrap();
                // Composite evaluation: apply the second factor, then the
                // first, exactly as the lifted maps compose.
                let composite = lift.eval(a1.base(), &lift.eval_word(a2.base()).unwrap()).unwrap();
                let reduced = lift.eval_word(prod.base()).unwrap();
                assert_eq!(composite.pos, reduced.pos, "({s1}) * ({s2})");
                let d = h.order().degree() as i64;
                assert_eq!(
                    composite.sheet - reduced.sheet,
                    prod.z_exp() * d,
                    "carry count is the lifted winding for ({s1}) * ({s2})"
                );
            }
        }
    }

    #[test]
    fn cofinal_bounds_on_genus_spec() {
        let h = genus_handle();
        let g = parse_hat(&genus_spec(), "e1 h1").unwrap();
        let (lo, hi) = h.cofinal_bounds(&g).unwrap();
        assert_eq!(hi - lo, 1);
        let zlo = HatWord::z_power(&genus_spec(), lo);
        let zhi = HatWord::z_power(&genus_spec(), hi);
        assert_eq!(h.hat_compare(&zlo, &g).unwrap(), Ordering::Less);
        assert_eq!(h.hat_compare(&g, &zhi).unwrap(), Ordering::Less);
    }

    #[test]
    fn hat_automorphisms_gate_and_commute() {
        let spec = spec23();
        let h = handle(1);
        let samples: Vec<[Word; 3]> = vec![
            [w(""), w("e1"), w("e1 e2")],
            [w("e2"), w("e1"), w("e2 e1")],
            [w("e1"), w("e2 e2"), w("e1 e2 e1")],
            [w("e2 e1"), w("e2"), w("e1 e2 e2")],
            [w(""), w(""), w("e1")],
        ];

        let id = HatAutomorphism::identity(&spec);
        let report = h.automorphism_compat_check(&id, &samples).unwrap();
        assert!(report.pass() && report.inconclusive.is_empty(), "{report:?}");

        let inner = HatAutomorphism::inner(&spec, &hw("e1")).unwrap();
        let report = h.automorphism_compat_check(&inner, &samples).unwrap();
        assert!(report.pass(), "{report:?}");

        // The involution inverting the center: e1 -> e1 z^-1,
        // e2 -> e2^2 z^-1, z -> z^-1; it is its own inverse.
        let twist = vec![
            (Gen::E(1), hw("e1 z^-1")),
            (Gen::E(2), hw("e2^2 z^-1")),
        ];
        let flip = HatAutomorphism::new(&spec, twist.clone(), -1, twist.clone(), -1).unwrap();
        assert_eq!(flip.z_sign(), -1);
        let report = h.automorphism_compat_check(&flip, &samples).unwrap();
        assert!(report.pass(), "{report:?}");

        // Same data without a consistent inverse is rejected.
        let id_assign: Vec<(Gen, HatWord)> = vec![
            (Gen::E(1), hw("e1")),
            (Gen::E(2), hw("e2")),
        ];
        let bad = HatAutomorphism::new(&spec, twist.clone(), -1, id_assign.clone(), 1);
        assert!(matches!(bad, Err(LeftOrderError::BadAutomorphism { .. })));

        // The center must land on z^{+-1}.
        let bad = HatAutomorphism::new(&spec, id_assign.clone(), 2, id_assign, 2);
        assert!(matches!(bad, Err(LeftOrderError::CenterNotPreserved { got: 2 })));

        // Torsion relation must lift: e1 -> e1 with z -> z^-1 breaks
        // e1^2 = z.
        let half = vec![
            (Gen::E(1), hw("e1")),
            (Gen::E(2), hw("e2^2 z^-1")),
        ];
        let bad = HatAutomorphism::new(&spec, half.clone(), -1, half, -1);
        assert!(matches!(bad, Err(LeftOrderError::BadAutomorphism { .. })));
    }
}
