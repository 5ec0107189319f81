//! Admissible covering degrees and certified evaluation of lifted actions.
//!
//! A degree `d = m_1 .. m_k * a + 1` admits a lift of the boundary action to
//! the d-fold cover of the circle in which every torsion generator keeps
//! finite order. The working coordinate is the real line with the base
//! circle as unit: a point is a symbolic base angle in `[0, 1)` plus an
//! exact integer sheet count, and the cover circle is the quotient by `d`
//! sheets. Each letter of a word advances the sheet count by a certified
//! wrap decision plus a fixed integer class offset, so translation data
//! comes out as exact integers instead of floating averages.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certarith::{Ball, CertError, PrecLadder};
use crate::moebius::Moebius;
use crate::pingpong::{AnglePos, PingPongConfig};
use crate::words::{Gen, GroupSpec, Word};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("degree data overflows at a = {a}")]
    Overflow { a: u64 },
    #[error("a = {a}: degree {d} and winding {r} share factor {g}")]
    NotCoprime { a: u64, d: u64, r: u64, g: u64 },
    #[error("no {wanted} valid degrees with a <= {cap}; found {found}")]
    CapExhausted { cap: u64, wanted: usize, found: usize },
    #[error("{stage}: {detail}")]
    CheckFailed { stage: &'static str, detail: String },
}

/// One admissible covering degree `d = M a + 1` with `M = m_1 .. m_k`
/// (`M = 1` when there is no torsion), together with the lift index of each
/// torsion generator and the winding count of the lifted chain word.
///
/// The lift index `i_l` is the unique value in `[0, d)` with
/// `d | m_l i_l + 1`; here it equals `a M / m_l`, so `m_l i_l + 1 = d`
/// exactly. The winding count is `R = k + 2n - 1 + sum_l i_l`, and the
/// datum is valid exactly when `gcd(d, R) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDatum {
    spec: GroupSpec,
    a: u64,
    d: u64,
    lift_indices: Vec<u64>,
    winding: u64,
}

impl CoverDatum {
    pub fn new(spec: &GroupSpec, a: u64) -> Result<CoverDatum, CoverError> {
        let overflow = || CoverError::Overflow { a };
        let mut m_prod: u64 = 1;
        for l in 1..=spec.k() {
            m_prod = m_prod.checked_mul(spec.m(l) as u64).ok_or_else(overflow)?;
        }
        let d = m_prod.checked_mul(a).and_then(|x| x.checked_add(1)).ok_or_else(overflow)?;

        let mut lift_indices = Vec::with_capacity(spec.k() as usize);
        let mut index_sum: u64 = 0;
        for l in 1..=spec.k() {
            let m = spec.m(l) as u64;
            let i = a.checked_mul(m_prod / m).ok_or_else(overflow)?;
            // Re-check divisibility directly. gcd(m, d) = 1 because
            // d = 1 mod m, so the residue class of i mod d is unique and an
            // in-range solution is the minimal one.
            let holds = m
                .checked_mul(i)
                .and_then(|x| x.checked_add(1))
                .map(|x| x % d == 0)
                .unwrap_or(false);
            if !holds || i >= d || d % m != 1 % m {
                return Err(CoverError::CheckFailed {
                    stage: "lift index",
                    detail: format!("no valid index for generator {l} at a = {a}"),
                });
            }
            index_sum = index_sum.checked_add(i).ok_or_else(overflow)?;
            lift_indices.push(i);
        }

        let base = spec.k() as u64 + 2 * spec.n() as u64 - 1;
        let winding = base.checked_add(index_sum).ok_or_else(overflow)?;
        let g = d.gcd(&winding);
        if g != 1 {
            return Err(CoverError::NotCoprime { a, d, r: winding, g });
        }
        Ok(CoverDatum { spec: spec.clone(), a, d, lift_indices, winding })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn degree(&self) -> u64 {
        self.d
    }

    pub fn lift_indices(&self) -> &[u64] {
        &self.lift_indices
    }

    /// Winding count `R` of the lifted chain word: its translation number
    /// on the line is an integer congruent to `R` mod `d`.
    pub fn winding(&self) -> u64 {
        self.winding
    }

    /// `R / d`, the rotation number of the chain word on the cover circle.
    /// Already in lowest terms since the datum requires `gcd(d, R) = 1`.
    pub fn rot_alpha(&self) -> BigRational {
        BigRational::new(BigInt::from(self.winding), BigInt::from(self.d))
    }

    /// Rotation number of the lifted torsion generator `e_l` on the cover
    /// circle: `(m_l i_l + 1) / (d m_l)`, which reduces to `1 / m_l`.
    pub fn rot_e(&self, l: u16) -> BigRational {
        let m = self.spec.m(l) as u64;
        let i = self.lift_indices[(l - 1) as usize];
        BigRational::new(BigInt::from(m * i + 1), BigInt::from(self.d * m))
    }

    /// Degree one keeps the base circle itself.
    pub fn is_base(&self) -> bool {
        self.d == 1
    }
}

/// Valid cover data in increasing order of `a`, starting from `a = 0`
/// (which always yields the base degree `d = 1`). Candidates whose degree
/// shares a factor with the winding count are skipped; the search fails if
/// `count` valid degrees do not appear by `a = a_cap`.
pub fn search_valid_d(
    spec: &GroupSpec,
    count: usize,
    a_cap: u64,
) -> Result<Vec<CoverDatum>, CoverError> {
    let mut out = Vec::with_capacity(count);
    for a in 0..=a_cap {
        match CoverDatum::new(spec, a) {
            Ok(datum) => {
                out.push(datum);
                if out.len() == count {
                    return Ok(out);
                }
            }
            Err(CoverError::NotCoprime { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CoverError::CapExhausted { cap: a_cap, wanted: count, found: out.len() })
}

/// `N p_0 - p_1` for `N = k + 2n - 1`, `p_0 = m_1 .. m_k`,
/// `p_1 = sum_l p_0 / m_l`, on raw group data. Nonzero guarantees
/// infinitely many valid degrees; among tuples admitted by `GroupSpec` it
/// never vanishes, the unique vanishing tuple being n = 0, k = 2,
/// m = (2, 2), which `GroupSpec` rejects.
pub fn np0_minus_p1(n: u16, k: u16, m: &[u32]) -> i128 {
    assert_eq!(m.len(), k as usize, "one torsion order per torsion generator");
    let p0: i128 = m.iter().map(|&x| x as i128).product();
    let p1: i128 = m.iter().map(|&x| p0 / x as i128).sum();
    (k as i128 + 2 * n as i128 - 1) * p0 - p1
}

pub fn np0_witness(spec: &GroupSpec) -> i128 {
    np0_minus_p1(spec.n(), spec.k(), spec.m_slice())
}

/// Point of the real line lying over the base circle: the exact value is
/// `angle(pos) + sheet` with `angle(pos)` canonical in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePoint {
    pub pos: AnglePos,
    pub sheet: i64,
}

/// Lift data for a single signed generator letter. The canonical image
/// representative wraps exactly when the input angle sits at or past the
/// landmark `g^{-1}(0)`, and `offset` whole turns select the lift class.
#[derive(Clone)]
struct LiftLetter {
    word: Word,
    landmark: AnglePos,
    offset: i64,
}

/// Evaluator for the chosen lifts over a certified configuration. One
/// letter maps `angle + sheet` to
/// `g(angle) + sheet + [angle >= g^{-1}(0)] + offset(g)`; the indicator is
/// decided structurally at exact coincidences and by certified comparison
/// otherwise, so sheet counts are exact.
///
/// Class offsets: each torsion letter `e_l` carries its lift index, making
/// `e_l^{m_l}` advance by exactly `d` sheets (one cover turn), and each
/// free letter carries the offset that makes its lift fix the lift of its
/// own attracting fixed point, pinning translation number zero.
#[derive(Clone)]
pub struct LiftEval {
    config: Arc<PingPongConfig>,
    datum: CoverDatum,
    zero: AnglePos,
    letters: HashMap<(Gen, bool), LiftLetter>,
}

impl LiftEval {
    pub fn new(config: Arc<PingPongConfig>, datum: CoverDatum) -> Result<LiftEval, CoverError> {
        if config.spec() != datum.spec() {
            return Err(CoverError::CheckFailed {
                stage: "lift evaluator",
                detail: "configuration and cover datum disagree on the group".into(),
            });
        }
        if datum.degree() > i32::MAX as u64 {
            return Err(CoverError::Overflow { a: datum.a() });
        }
        let spec = config.spec().clone();
        let geom = config.geometry();
        let ladder = geom.ladder();
        let zero = AnglePos::turns(BigRational::zero());

        let mut letters = HashMap::new();
        for l in 1..=spec.k() {
            let word = Word::generator(&spec, Gen::E(l), 1).expect("generator in spec");
            let landmark = AnglePos::image(&word.invert(), zero.clone());
            let offset = datum.lift_indices()[(l - 1) as usize] as i64;
            letters.insert((Gen::E(l), false), LiftLetter { word, landmark, offset });
        }
        for j in 1..=spec.two_n() {
            for inv in [false, true] {
                let exp = if inv { -1 } else { 1 };
                let word = Word::generator(&spec, Gen::H(j), exp).expect("generator in spec");
                let landmark = AnglePos::image(&word.invert(), zero.clone());
                // The attracting angle of the letter itself; the zero
                // translation class fixes the lift of that point.
                let fixed =
                    AnglePos::turns(if inv { geom.rep_angle(j) } else { geom.att_angle(j) });
                let wraps = at_or_after(geom, ladder, &fixed, &landmark, &zero)?;
                letters.insert(
                    (Gen::H(j), inv),
                    LiftLetter { word, landmark, offset: -(wraps as i64) },
                );
            }
        }

        let ev = LiftEval { config, datum, zero, letters };
        ev.certify_torsion_windings()?;
        Ok(ev)
    }

    /// Each torsion generator must cross the angle cut exactly once over a
    /// full period before its class offset is trusted.
    fn certify_torsion_windings(&self) -> Result<(), CoverError> {
        let spec = self.config.spec();
        for l in 1..=spec.k() {
            let letter = &self.letters[&(Gen::E(l), false)];
            let mut pos = self.config.basepoint().clone();
            let mut wraps = 0i64;
            for _ in 0..spec.m(l) {
                wraps += self.indicator(&pos, &letter.landmark)? as i64;
                pos = AnglePos::image(&letter.word, pos);
            }
            if pos != *self.config.basepoint() || wraps != 1 {
                return Err(CoverError::CheckFailed {
                    stage: "torsion winding",
                    detail: format!("e_{l} wraps {wraps} times over one period"),
                });
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &Arc<PingPongConfig> {
        &self.config
    }

    pub fn datum(&self) -> &CoverDatum {
        &self.datum
    }

    /// Basepoint lift on sheet zero.
    pub fn start(&self) -> LinePoint {
        LinePoint { pos: self.config.basepoint().clone(), sheet: 0 }
    }

    /// `[angle(pos) >= angle(landmark)]` in `[0, 1)`.
    fn indicator(&self, pos: &AnglePos, landmark: &AnglePos) -> Result<bool, CertError> {
        at_or_after(self.config.geometry(), self.config.geometry().ladder(), pos, landmark, &self.zero)
    }

    fn apply_letter(&self, p: LinePoint, key: (Gen, bool)) -> Result<LinePoint, CertError> {
        let letter = &self.letters[&key];
        let wrap = self.indicator(&p.pos, &letter.landmark)? as i64;
        Ok(LinePoint {
            pos: AnglePos::image(&letter.word, p.pos),
            sheet: p.sheet + wrap + letter.offset,
        })
    }

    /// Value of the lifted word at `p`. Letters act right to left, one
    /// certified wrap decision each.
    pub fn eval(&self, w: &Word, p: &LinePoint) -> Result<LinePoint, CertError> {
        let mut cur = p.clone();
        for (gen, sign) in w.letters().into_iter().rev() {
            cur = self.apply_letter(cur, (gen, sign < 0))?;
        }
        Ok(cur)
    }

    pub fn eval_word(&self, w: &Word) -> Result<LinePoint, CertError> {
        self.eval(w, &self.start())
    }

    /// The central lift advances by one full cover turn, `d` sheets.
    pub fn z_shift(&self, p: &LinePoint, t: i64) -> LinePoint {
        LinePoint { pos: p.pos.clone(), sheet: p.sheet + t * self.datum.degree() as i64 }
    }

    /// Certified order of two line values. `Equal` only when the points
    /// certifiably coincide, which distinct orbit words never do.
    pub fn cmp_line(&self, a: &LinePoint, b: &LinePoint) -> Result<Ordering, CertError> {
        if a.pos == b.pos {
            return Ok(a.sheet.cmp(&b.sheet));
        }
        if a.sheet != b.sheet {
            // Distinct angles differ by less than one sheet.
            return Ok(a.sheet.cmp(&b.sheet));
        }
        let geom = self.config.geometry();
        if a.pos == self.zero {
            return Ok(Ordering::Less);
        }
        if b.pos == self.zero {
            return Ok(Ordering::Greater);
        }
        match geom.ord3_with(geom.ladder(), &self.zero, &a.pos, &b.pos)? {
            1 => Ok(Ordering::Less),
            -1 => Ok(Ordering::Greater),
            // Certified exact coincidence of the two angles.
            _ => Ok(Ordering::Equal),
        }
    }

    /// Cyclic orientation of three points on the cover circle `R / dZ`.
    /// Zero only when two arguments occupy the same cover point.
    pub fn ord3_cover(&self, a: &LinePoint, b: &LinePoint, c: &LinePoint) -> Result<i8, CertError> {
        let d = self.datum.degree() as i64;
        let reduce = |p: &LinePoint| LinePoint { pos: p.pos.clone(), sheet: p.sheet.rem_euclid(d) };
        let (ra, rb, rc) = (reduce(a), reduce(b), reduce(c));
        if ra == rb || rb == rc || ra == rc {
            return Ok(0);
        }
        let ab = self.cmp_line(&ra, &rb)? == Ordering::Less;
        let bc = self.cmp_line(&rb, &rc)? == Ordering::Less;
        let ca = self.cmp_line(&rc, &ra)? == Ordering::Less;
        // Orientation of a cyclic triple read off a linear cut: positive
        // exactly when two of the three cut comparisons ascend.
        Ok(if (ab && bc) || (bc && ca) || (ca && ab) { 1 } else { -1 })
    }

    /// Exact sheet displacement of `iterates` applications of `w` starting
    /// at the basepoint, tracked with one running enclosure per precision
    /// rung. Any wrap that fails to certify restarts the whole orbit at the
    /// next rung, so the result never mixes precisions.
    pub fn orbit_winding(&self, w: &Word, iterates: u32) -> Result<i64, CertError> {
        let geom = self.config.geometry();
        let ladder = geom.ladder();
        let keys: Vec<(Gen, bool)> =
            w.letters().into_iter().rev().map(|(g, s)| (g, s < 0)).collect();
        'rung: for prec in ladder.rungs() {
            let mut table: HashMap<(Gen, bool), (Moebius, Ball)> = HashMap::new();
            for key in &keys {
                if table.contains_key(key) {
                    continue;
                }
                let letter = &self.letters[key];
                let mat = match geom.word_matrix(&letter.word, prec) {
                    Ok(m) => m,
                    Err(_) => continue 'rung,
                };
                let lm = match geom.eval(&letter.landmark, prec) {
                    Ok(b) => b,
                    Err(_) => continue 'rung,
                };
                table.insert(*key, (mat, lm));
            }
            let mut ball = match geom.eval(self.config.basepoint(), prec) {
                Ok(b) => b,
                Err(_) => continue 'rung,
            };
            let mut sheet = 0i64;
            for _ in 0..iterates {
                for key in &keys {
                    let (mat, lm) = &table[key];
                    match lm.lt_certified(&ball) {
                        Some(true) => sheet += 1,
                        Some(false) => {}
                        None => continue 'rung,
                    }
                    sheet += self.letters[key].offset;
                    ball = match mat.act_angle(&ball) {
                        Ok(b) => b,
                        Err(_) => continue 'rung,
                    };
                }
            }
            return Ok(sheet);
        }
        Err(CertError::Inconclusive { cap: ladder.cap, detail: "orbit winding".into() })
    }

    /// Exact translation number of the lifted chain word, read off at one
    /// of its own boundary fixed points: the base angle returns to itself
    /// structurally, leaving a pure sheet displacement.
    pub fn alpha_winding_at_end(&self, attracting: bool) -> Result<i64, CoverError> {
        let alpha = Word::alpha(self.config.spec());
        let from = LinePoint { pos: AnglePos::alpha_end(attracting), sheet: 0 };
        let out = self.eval(&alpha, &from)?;
        if out.pos != from.pos {
            return Err(CoverError::CheckFailed {
                stage: "alpha winding",
                detail: format!("fixed point failed to collapse: {}", out.pos),
            });
        }
        Ok(out.sheet)
    }

    /// Encloses the chain word's translation number by iterating its lift
    /// from the basepoint and certifies the unique rational of denominator
    /// at most `d` inside the enclosure. Independent of
    /// `alpha_winding_at_end`: this route never looks at fixed points.
    pub fn alpha_rotation_certificate(&self, iterates: u32) -> Result<RotationCert, CoverError> {
        assert!(iterates > 0);
        let d = self.datum.degree();
        let alpha = Word::alpha(self.config.spec());
        let winding = self.orbit_winding(&alpha, iterates)?;
        // Angles stay in [0, 1), so the exact displacement over the run is
        // within one of `winding`, and the translation number is within a
        // further 1/iterates of the mean displacement.
        let j = BigInt::from(iterates);
        let lo = BigRational::new(BigInt::from(winding - 2), j.clone());
        let hi = BigRational::new(BigInt::from(winding + 2), j);
        let mut hits: BTreeSet<BigRational> = BTreeSet::new();
        for q in 1..=d {
            let qb = BigInt::from(q);
            let mut p = (lo.clone() * BigRational::from(qb.clone())).floor().to_integer()
                + BigInt::one();
            loop {
                let cand = BigRational::new(p.clone(), qb.clone());
                if cand >= hi {
                    break;
                }
                hits.insert(cand);
                p += BigInt::one();
            }
        }
        if hits.len() != 1 {
            return Err(CoverError::CheckFailed {
                stage: "rotation certificate",
                detail: format!(
                    "{} rationals of denominator <= {d} inside ({lo}, {hi})",
                    hits.len()
                ),
            });
        }
        let translation = hits.into_iter().next().expect("exactly one hit");
        let scaled = translation.clone() / BigRational::from(BigInt::from(d));
        let cover_rotation = scaled.clone() - scaled.floor();
        Ok(RotationCert { iterates, winding, enclosure: (lo, hi), translation, cover_rotation })
    }

    /// Walks the `d` lifted copies of the fundamental gap under the chain
    /// word. The copies advance by the winding count per application, so
    /// the orbit is the additive step map on `Z/d`; the translation numbers
    /// at both boundary fixed points must agree with each other and with
    /// the datum's winding mod `d`.
    pub fn gap_orbit_check(&self) -> Result<GapOrbitReport, CoverError> {
        let d = self.datum.degree();
        let step = self.datum.winding() % d;
        let mut orbit = Vec::with_capacity(d as usize);
        let mut seen = vec![false; d as usize];
        let mut j = 0u64;
        for _ in 0..d {
            orbit.push(j);
            seen[j as usize] = true;
            j = (j + step) % d;
        }
        let bijective = j == 0 && seen.iter().all(|&s| s);
        let winding_attracting = self.alpha_winding_at_end(true)?;
        let winding_repelling = self.alpha_winding_at_end(false)?;
        // Copies sit at integer sheet offsets and the gap spans less than
        // one sheet, so a nonzero offset keeps a copy disjoint from the
        // original.
        let displaces = (1..d).all(|t| (t * step) % d != 0);
        Ok(GapOrbitReport {
            degree: d,
            step,
            orbit,
            winding_attracting,
            winding_repelling,
            winding_target: self.datum.winding(),
            bijective,
            displaces,
        })
    }
}

/// `[a >= b]` in the linear order that cuts the circle at angle zero.
/// Callers guarantee `b` is never the cut itself.
fn at_or_after(
    geom: &crate::pingpong::Geometry,
    ladder: PrecLadder,
    a: &AnglePos,
    b: &AnglePos,
    zero: &AnglePos,
) -> Result<bool, CertError> {
    if a == b {
        return Ok(true);
    }
    if a == zero {
        return Ok(false);
    }
    debug_assert!(b != zero);
    match geom.ord3_with(ladder, zero, b, a)? {
        1 => Ok(true),
        -1 => Ok(false),
        // Certified exact coincidence of a and b.
        _ => Ok(true),
    }
}

/// Certified enclosure of the lifted chain word's translation number, with
/// the unique small-denominator rational it pins down.
#[derive(Clone, Debug)]
pub struct RotationCert {
    pub iterates: u32,
    /// Exact sheet displacement over the whole run.
    pub winding: i64,
    /// Open interval certified to contain the translation number.
    pub enclosure: (BigRational, BigRational),
    /// The unique rational with denominator at most `d` in the enclosure.
    pub translation: BigRational,
    /// Induced rotation number on the cover circle, canonical in `[0, 1)`.
    pub cover_rotation: BigRational,
}

/// Integer bookkeeping for the orbit of the fundamental gap's lifted
/// copies; all fields are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapOrbitReport {
    pub degree: u64,
    pub step: u64,
    pub orbit: Vec<u64>,
    pub winding_attracting: i64,
    pub winding_repelling: i64,
    pub winding_target: u64,
    pub bijective: bool,
    pub displaces: bool,
}

impl GapOrbitReport {
    pub fn pass(&self) -> bool {
        let congruent = self.winding_attracting.rem_euclid(self.degree as i64)
            == (self.winding_target % self.degree) as i64;
        self.bijective
            && self.displaces
            && self.winding_attracting == self.winding_repelling
            && congruent
    }
}
