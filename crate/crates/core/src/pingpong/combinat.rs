//! Combinatorial cyclic order extracted from one certified configuration.
//!
//! Two finite certificates are read off the circle once: the
//! counterclockwise ring of all attracting domains and coset basepoints,
//! and the nesting table saying that each S letter maps every domain other
//! than its inverse's, and every coset basepoint, strictly inside its own
//! domain. After extraction, the cyclic order of any three orbit points is
//! decided by letter-by-letter recursion on those tables alone, with no
//! further arithmetic.

use std::collections::HashMap;

use crate::certarith::{CertError, PrecLadder};
use crate::words::{SGen, Word};

use super::domains::{arc_strictly_inside, point_strictly_inside, DomainFamily, TranslateFamilies};
use super::geometry::Geometry;
use super::points::AnglePos;
use super::PingPongError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SLetter {
    pub sgen: usize,
    pub inverse: bool,
}

impl SLetter {
    pub fn inv(self) -> SLetter {
        SLetter { sgen: self.sgen, inverse: !self.inverse }
    }
}

/// An orbit point named by a freely reduced word in the S letters followed
/// by a coset basepoint index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPoint {
    letters: Vec<SLetter>,
    coset: usize,
}

impl SPoint {
    /// Builds the point, freely reducing the letter string.
    pub fn new(letters: impl IntoIterator<Item = SLetter>, coset: usize) -> SPoint {
        let mut out: Vec<SLetter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        SPoint { letters: out, coset }
    }

    pub fn letters(&self) -> &[SLetter] {
        &self.letters
    }

    pub fn coset(&self) -> usize {
        self.coset
    }

    fn head(&self) -> Option<SLetter> {
        self.letters.first().copied()
    }

    fn tail(&self) -> SPoint {
        SPoint { letters: self.letters[1..].to_vec(), coset: self.coset }
    }

    /// The group element this point names: the S word times the coset word.
    pub fn to_word(&self, sgens: &[SGen], coset_words: &[Word]) -> Word {
        let mut w = Word::identity(coset_words[self.coset].spec());
        for l in &self.letters {
            let part = if l.inverse { sgens[l.sgen].word.invert() } else { sgens[l.sgen].word.clone() };
            w = w.multiply(&part).unwrap();
        }
        w.multiply(&coset_words[self.coset]).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingItem {
    Dom(SLetter),
    Coset(usize),
}

/// The extracted order: a counterclockwise ring of disjoint items and the
/// nesting table over the S letters.
#[derive(Clone, Debug)]
pub struct CombinatorialOrder {
    ring: Vec<RingItem>,
    index: HashMap<RingItem, usize>,
    pub containments_ok: bool,
    pub containment_failures: Vec<String>,
    pub containment_checks: usize,
}

fn letter_word(sgens: &[SGen], l: SLetter) -> Word {
    if l.inverse {
        sgens[l.sgen].word.invert()
    } else {
        sgens[l.sgen].word.clone()
    }
}

/// Sorts the ring by certified separation: at each rung every representative
/// is evaluated, and the order stands once consecutive balls are disjoint.
fn certified_ring(
    geom: &Geometry,
    items: &[(RingItem, AnglePos)],
    ladder: PrecLadder,
) -> Result<Vec<RingItem>, CertError> {
    for prec in ladder.rungs() {
        let balls: Vec<_> = items.iter().map(|(_, p)| geom.eval(p, prec)).collect();
        if balls.iter().any(|b| b.is_err()) {
            continue;
        }
        let balls: Vec<_> = balls.into_iter().map(|b| b.unwrap()).collect();
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.sort_by(|&a, &b| balls[a].midpoint().cmp(&balls[b].midpoint()));
        let separated = order
            .windows(2)
            .all(|w| balls[w[0]].lt_certified(&balls[w[1]]) == Some(true));
        if separated {
            return Ok(order.into_iter().map(|i| items[i].0).collect());
        }
    }
    Err(CertError::Inconclusive { cap: ladder.cap, detail: "ring separation".into() })
}

/// Reads both certificates off the configuration.
pub fn extract_order(
    geom: &Geometry,
    sgens: &[SGen],
    family: &DomainFamily,
    fams: &TranslateFamilies,
    identity_coset: usize,
    ladder: PrecLadder,
) -> Result<CombinatorialOrder, PingPongError> {
    let mut items: Vec<(RingItem, AnglePos)> = Vec::new();
    for d in &family.domains {
        items.push((RingItem::Dom(SLetter { sgen: d.sgen, inverse: d.inverse }), d.arc.lo.clone()));
    }
    for (ci, p) in fams.coset_points.iter().enumerate() {
        items.push((RingItem::Coset(ci), p.clone()));
    }

    let mut ring = certified_ring(geom, &items, ladder)?;
    let anchor = ring
        .iter()
        .position(|&it| it == RingItem::Coset(identity_coset))
        .expect("identity coset present");
    ring.rotate_left(anchor);

    let letters: Vec<SLetter> = (0..sgens.len())
        .flat_map(|s| [SLetter { sgen: s, inverse: false }, SLetter { sgen: s, inverse: true }])
        .collect();
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for &x in &letters {
        let w = letter_word(sgens, x);
        let dom_x = family.domain(x.sgen, x.inverse);
        for &y in &letters {
            if y == x.inv() {
                continue;
            }
            checks += 1;
            let image = family.domain(y.sgen, y.inverse).translated(&w);
            if !arc_strictly_inside(geom, ladder, &image, dom_x)? {
                failures.push(format!("{x:?} does not nest {y:?}"));
            }
        }
        for (ci, p) in fams.coset_points.iter().enumerate() {
            checks += 1;
            let image = AnglePos::image(&w, p.clone());
            if !point_strictly_inside(geom, ladder, &image, dom_x)? {
                failures.push(format!("{x:?} does not capture x{ci}"));
            }
        }
    }

    let index = ring.iter().enumerate().map(|(i, &it)| (it, i)).collect();
    Ok(CombinatorialOrder {
        ring,
        index,
        containments_ok: failures.is_empty(),
        containment_failures: failures,
        containment_checks: checks,
    })
}

impl CombinatorialOrder {
    pub fn ring(&self) -> &[RingItem] {
        &self.ring
    }

    fn region(&self, p: &SPoint) -> RingItem {
        match p.head() {
            Some(l) => RingItem::Dom(l),
            None => RingItem::Coset(p.coset()),
        }
    }

    fn ring_orient(&self, a: RingItem, b: RingItem, c: RingItem) -> i8 {
        let n = self.ring.len();
        let pa = self.index[&a];
        let x = (self.index[&b] + n - pa) % n;
        let y = (self.index[&c] + n - pa) % n;
        if x < y {
            1
        } else {
            -1
        }
    }

    /// Position of `a` against `b` in the linear (cut) order of the domain
    /// of `s`: 1 when `a` comes first counterclockwise.
    fn linear_order(&self, s: SLetter, a: &SPoint, b: &SPoint) -> i8 {
        debug_assert_eq!(a.head(), Some(s));
        debug_assert_eq!(b.head(), Some(s));
        let a = a.tail();
        let b = b.tail();
        let ra = self.region(&a);
        let rb = self.region(&b);
        if ra == rb {
            match a.head() {
                Some(t) => self.linear_order(t, &a, &b),
                // equal coset regions with no letters left means equal
                // points, which the caller has excluded
                None => 0,
            }
        } else {
            // the inverse domain is the cut: the domain of s pulls back,
            // orientation preserved, onto the complement of that cut
            self.ring_orient(RingItem::Dom(s.inv()), ra, rb)
        }
    }

    /// Cyclic orientation of three orbit points, decided purely from the
    /// ring and the nesting table. Zero exactly on repeated points.
    pub fn ord3(&self, p1: &SPoint, p2: &SPoint, p3: &SPoint) -> i8 {
        if p1 == p2 || p2 == p3 || p1 == p3 {
            return 0;
        }
        let r1 = self.region(p1);
        let r2 = self.region(p2);
        let r3 = self.region(p3);
        if r1 != r2 && r2 != r3 && r1 != r3 {
            return self.ring_orient(r1, r2, r3);
        }
        if r1 == r2 && r2 == r3 {
            // all in one domain: its letter pulls back preserving the
            // cyclic order of the three tails
            debug_assert!(matches!(r1, RingItem::Dom(_)), "coset repeats force equal points");
            return self.ord3(&p1.tail(), &p2.tail(), &p3.tail());
        }
        // exactly one coincidence: rotate the pair to the front, which
        // preserves the cyclic orientation
        let (a, b) = if r1 == r2 {
            (p1, p2)
        } else if r2 == r3 {
            (p2, p3)
        } else {
            (p3, p1)
        };
        let s = match self.region(a) {
            RingItem::Dom(s) => s,
            RingItem::Coset(_) => unreachable!("equal coset regions force equal points"),
        };
        self.linear_order(s, a, b)
    }
}
