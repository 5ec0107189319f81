//! Midpoint realization of finite circular-order tables.
//!
//! A finite table of order values embeds into the circle one element at a
//! time: the first two elements go to `x0` and `x0 + 1/2`, and each later
//! element goes to the midpoint of the unique complementary arc on which
//! every recorded triple value matches the orientation of the images. All
//! angles are exact rationals (dyadic offsets from `x0`), so the
//! re-extraction check is pure integer arithmetic.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certarith::CertError;
use crate::circular::OrderHandle;
use crate::words::{Gen, GroupSpec, Word};

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("table rejected: {detail}")]
    BadTable { detail: String },
    #[error("element {index} admits {admissible} arcs, need exactly 1")]
    Inconsistent { index: usize, admissible: usize },
}

/// Order values over a finite element list, keyed by ascending index
/// triples. The first element is always the identity.
#[derive(Clone, Debug)]
pub struct FiniteOrderTable {
    elements: Vec<Word>,
    values: HashMap<[usize; 3], i8>,
}

impl FiniteOrderTable {
    pub fn new(
        elements: Vec<Word>,
        values: HashMap<[usize; 3], i8>,
    ) -> Result<FiniteOrderTable, RealizeError> {
        let reject = |detail: String| RealizeError::BadTable { detail };
        match elements.first() {
            None => return Err(reject("empty element list".into())),
            Some(first) if !first.is_identity() => {
                return Err(reject("first element must be the identity".into()))
            }
            _ => {}
        }
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                if elements[i] == elements[j] {
                    return Err(reject(format!("elements {i} and {j} coincide")));
                }
            }
        }
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                for k in (j + 1)..elements.len() {
                    match values.get(&[i, j, k]) {
                        Some(1) | Some(-1) => {}
                        Some(v) => {
                            return Err(reject(format!(
                                "triple ({i},{j},{k}) has value {v}, distinct elements need +1 or -1"
                            )))
                        }
                        None => return Err(reject(format!("triple ({i},{j},{k}) missing"))),
                    }
                }
            }
        }
        Ok(FiniteOrderTable { elements, values })
    }

    /// Tabulates the handle's order values over the given elements.
    pub fn from_handle(
        handle: &OrderHandle,
        elements: Vec<Word>,
    ) -> Result<FiniteOrderTable, RealizeError> {
        let mut values = HashMap::new();
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                for k in (j + 1)..elements.len() {
                    let v = handle.eval_c(&elements[i], &elements[j], &elements[k])?;
                    values.insert([i, j, k], v);
                }
            }
        }
        FiniteOrderTable::new(elements, values)
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Value on an arbitrary index triple: repeats give zero, otherwise the
    /// stored ascending value adjusted by the permutation sign.
    pub fn value(&self, i: usize, j: usize, k: usize) -> i8 {
        if i == j || j == k || i == k {
            return 0;
        }
        let (mut a, mut b, mut c) = (i, j, k);
        let mut sign = 1i8;
        if a > b {
            std::mem::swap(&mut a, &mut b);
            sign = -sign;
        }
        if b > c {
            std::mem::swap(&mut b, &mut c);
            sign = -sign;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
            sign = -sign;
        }
        sign * self.values[&[a, b, c]]
    }
}

fn wrap(x: BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Orientation of three distinct angles in `[0, 1)`: `+1` when the listed
/// order is counterclockwise, decided by how many of the three cyclic
/// comparisons ascend.
fn ord3_rat(a: &BigRational, b: &BigRational, c: &BigRational) -> i8 {
    let ascents = (a < b) as u8 + (b < c) as u8 + (c < a) as u8;
    if ascents == 2 {
        1
    } else {
        -1
    }
}

/// Embeds the table's elements into the circle: `g0 -> x0`,
/// `g1 -> x0 + 1/2`, and each later element to the midpoint of the unique
/// arc between already placed points on which the orientation of the
/// images matches every recorded value. Orientations are constant on each
/// arc, so testing the midpoint decides the whole component.
pub fn realize(table: &FiniteOrderTable, x0: &BigRational) -> Result<Vec<BigRational>, RealizeError> {
    let n = table.len();
    let mut out: Vec<BigRational> = Vec::with_capacity(n);
    out.push(wrap(x0.clone()));
    if n >= 2 {
        out.push(wrap(x0 + half()));
    }
    for next in 2..n {
        let mut sorted = out.clone();
        sorted.sort();
        let mut admissible: Vec<BigRational> = Vec::new();
        for g in 0..sorted.len() {
            let a = &sorted[g];
            let candidate = if g + 1 < sorted.len() {
                (a + &sorted[g + 1]) / BigInt::from(2)
            } else {
                wrap((a + &sorted[0] + BigRational::one()) / BigInt::from(2))
            };
            let mut fits = true;
            'pairs: for i in 0..next {
                for j in (i + 1)..next {
                    if ord3_rat(&out[i], &out[j], &candidate) != table.value(i, j, next) {
                        fits = false;
                        break 'pairs;
                    }
                }
            }
            if fits {
                admissible.push(candidate);
            }
        }
        if admissible.len() != 1 {
            return Err(RealizeError::Inconsistent { index: next, admissible: admissible.len() });
        }
        out.push(admissible.pop().expect("checked length"));
    }
    Ok(out)
}

/// Deterministic enumeration of reduced words: identity first, then by
/// letter length with ties broken by the alphabet order
/// `e_1 < ... < e_k < h_1 < h_1^{-1} < ... < h_{2n} < h_{2n}^{-1}`.
/// Torsion letters only occur with positive exponent, so `e_l^j` counts as
/// `j` letters.
pub fn length_lex_words(spec: &GroupSpec, count: usize) -> Vec<Word> {
    let mut alphabet: Vec<Word> = Vec::new();
    for l in 1..=spec.k() {
        alphabet.push(Word::generator(spec, Gen::E(l), 1).expect("generator in spec"));
    }
    for j in 1..=spec.two_n() {
        alphabet.push(Word::generator(spec, Gen::H(j), 1).expect("generator in spec"));
        alphabet.push(Word::generator(spec, Gen::H(j), -1).expect("generator in spec"));
    }
    let mut out = vec![Word::identity(spec)];
    let mut frontier = out.clone();
    while out.len() < count && !frontier.is_empty() {
        let mut longer = Vec::new();
        for w in &frontier {
            for a in &alphabet {
                let prod = w.multiply(a).expect("words share the spec");
                // Keeping only length-increasing extensions makes each
                // reduced word appear exactly once, via its own letters.
                if prod.len_letters() == w.len_letters() + 1 {
                    longer.push(prod);
                }
            }
        }
        out.extend(longer.iter().cloned());
        frontier = longer;
    }
    out.truncate(count);
    out
}

/// Outcome of orbit -> table -> embedding -> table.
#[derive(Clone, Debug)]
pub struct RoundtripReport {
    pub elements: Vec<Word>,
    pub angles: Vec<BigRational>,
    pub checked: usize,
    pub mismatches: Vec<[usize; 3]>,
}

impl RoundtripReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// All realized angles are dyadic offsets from the seed.
    pub fn angles_dyadic(&self) -> bool {
        self.angles.iter().all(|x| {
            let mut d = x.denom().clone();
            while (&d % BigInt::from(2)).is_zero() {
                d /= BigInt::from(2);
            }
            d.is_one()
        })
    }
}

/// Tabulates the order on the first `depth` length-lex elements, realizes
/// the table from angle zero, and re-extracts every triple value from the
/// embedded points.
pub fn roundtrip(handle: &OrderHandle, depth: usize) -> Result<RoundtripReport, RealizeError> {
    let elements = length_lex_words(handle.spec(), depth);
    let table = FiniteOrderTable::from_handle(handle, elements.clone())?;
    let angles = realize(&table, &BigRational::zero())?;
    let mut mismatches = Vec::new();
    let mut checked = 0usize;
    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            for k in (j + 1)..elements.len() {
                checked += 1;
                if ord3_rat(&angles[i], &angles[j], &angles[k]) != table.value(i, j, k) {
                    mismatches.push([i, j, k]);
                }
            }
        }
    }
    Ok(RoundtripReport { elements, angles, checked, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CoverDatum;
    use crate::pingpong::{build_configuration, PingPongConfig, PingPongParams};
    use once_cell::sync::Lazy;
    use std::sync::Arc;

    fn spec23() -> GroupSpec {
        "0,2,2,3".parse().unwrap()
    }

    static CONFIG_23: Lazy<Arc<PingPongConfig>> = Lazy::new(|| {
        Arc::new(build_configuration(&spec23(), PingPongParams::default()).unwrap())
    });

    fn handle(a: u64) -> OrderHandle {
        let datum = CoverDatum::new(&spec23(), a).unwrap();
        OrderHandle::new(CONFIG_23.clone(), datum).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&spec23(), s).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn manual_table(elements: Vec<Word>, triples: &[([usize; 3], i8)]) -> FiniteOrderTable {
        let values: HashMap<[usize; 3], i8> = triples.iter().cloned().collect();
        FiniteOrderTable::new(elements, values).unwrap()
    }

    #[test]
    fn seed_placement_and_third_point() {
        let two = manual_table(vec![w(""), w("e1")], &[]);
        let angles = realize(&two, &rat(1, 8)).unwrap();
        assert_eq!(angles, vec![rat(1, 8), rat(5, 8)]);

        // Positive value: the third point lands where the image triple is
        // counterclockwise, the arc from x0 + 1/2 back around to x0.
        let three = manual_table(vec![w(""), w("e1"), w("e1 e2")], &[([0, 1, 2], 1)]);
        let angles = realize(&three, &BigRational::zero()).unwrap();
        assert_eq!(angles[2], rat(3, 4));
        assert_eq!(ord3_rat(&angles[0], &angles[1], &angles[2]), 1);

        let three = manual_table(vec![w(""), w("e1"), w("e1 e2")], &[([0, 1, 2], -1)]);
        let angles = realize(&three, &BigRational::zero()).unwrap();
        assert_eq!(angles[2], rat(1, 4));
        assert_eq!(ord3_rat(&angles[0], &angles[1], &angles[2]), -1);
    }

    #[test]
    fn inconsistent_table_reports_offender() {
        // With iota_2 forced to 3/4, no arc satisfies (+1, -1, +1) against
        // the pairs (0,1), (0,2), (1,2): the three free arcs realize the
        // signatures (-1,-1,+1), (+1,-1,-1), (+1,+1,+1).
        let table = manual_table(
            vec![w(""), w("e1"), w("e2"), w("e1 e2")],
            &[([0, 1, 2], 1), ([0, 1, 3], 1), ([0, 2, 3], -1), ([1, 2, 3], 1)],
        );
        match realize(&table, &BigRational::zero()) {
            Err(RealizeError::Inconsistent { index: 3, admissible: 0 }) => {}
            other => panic!("expected inconsistency at element 3, got {other:?}"),
        }
    }

    #[test]
    fn table_validation_rejects_bad_input() {
        let missing = FiniteOrderTable::new(
            vec![w(""), w("e1"), w("e2")],
            HashMap::new(),
        );
        assert!(matches!(missing, Err(RealizeError::BadTable { .. })));

        let headless = FiniteOrderTable::new(
            vec![w("e1"), w("e2")],
            HashMap::new(),
        );
        assert!(matches!(headless, Err(RealizeError::BadTable { .. })));

        let dup = FiniteOrderTable::new(
            vec![w(""), w("e1"), w("e1")],
            HashMap::from([([0usize, 1, 2], 1i8)]),
        );
        assert!(matches!(dup, Err(RealizeError::BadTable { .. })));
    }

    #[test]
    fn value_accessor_is_alternating() {
        let table = manual_table(
            vec![w(""), w("e1"), w("e2"), w("e1 e2")],
            &[([0, 1, 2], 1), ([0, 1, 3], 1), ([0, 2, 3], 1), ([1, 2, 3], -1)],
        );
        assert_eq!(table.value(0, 1, 2), 1);
        assert_eq!(table.value(1, 0, 2), -1);
        assert_eq!(table.value(2, 0, 1), 1);
        assert_eq!(table.value(3, 2, 1), 1);
        assert_eq!(table.value(1, 1, 2), 0);
    }

    #[test]
    fn length_lex_enumeration_is_deterministic() {
        let words = length_lex_words(&spec23(), 10);
        let expect = ["", "e1", "e2", "e1 e2", "e2 e1", "e2 e2", "e1 e2 e1", "e1 e2 e2",
            "e2 e1 e2", "e2 e2 e1"];
        let got: Vec<String> = words.iter().map(|x| x.to_string()).collect();
        let expect: Vec<String> = expect.iter().map(|s| w(s).to_string()).collect();
        assert_eq!(got, expect);

        let genus: GroupSpec = "1,0".parse().unwrap();
        let words = length_lex_words(&genus, 17);
        assert!(words[0].is_identity());
        assert_eq!(words.len(), 17);
        for pair in words.windows(2) {
            assert!(pair[0].len_letters() <= pair[1].len_letters());
        }
        // 1 identity + 4 letters + 4*3 two-letter words.
        assert_eq!(words[16].len_letters(), 2);
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                assert_ne!(words[i], words[j]);
            }
        }
    }

    #[test]
    fn roundtrip_base_order() {
        let report = roundtrip(&handle(0), 2).unwrap();
        assert!(report.pass());

        let report = roundtrip(&handle(0), 20).unwrap();
        assert_eq!(report.checked, 1140);
        assert!(report.pass(), "mismatches: {:?}", report.mismatches);
        assert!(report.angles_dyadic());
    }

    #[test]
    fn roundtrip_degree_seven() {
        let report = roundtrip(&handle(1), 12).unwrap();
        assert!(report.pass(), "mismatches: {:?}", report.mismatches);
        assert!(report.angles_dyadic());
    }

    #[test]
    fn permuted_enumeration_gives_equivalent_embedding() {
        let h = handle(0);
        let elements = length_lex_words(&spec23(), 10);
        let table = FiniteOrderTable::from_handle(&h, elements.clone()).unwrap();
        let angles = realize(&table, &BigRational::zero()).unwrap();

        // Fixed permutation keeping the identity first.
        let perm = [0usize, 3, 1, 7, 2, 9, 4, 6, 5, 8];
        let shuffled: Vec<Word> = perm.iter().map(|&i| elements[i].clone()).collect();
        let table2 = FiniteOrderTable::from_handle(&h, shuffled).unwrap();
        let angles2 = realize(&table2, &BigRational::zero()).unwrap();

        // Same ord on every triple of the same group elements.
        for i in 0..10 {
            for j in (i + 1)..10 {
                for k in (j + 1)..10 {
                    let (pi, pj, pk) = (
                        perm.iter().position(|&p| p == i).unwrap(),
                        perm.iter().position(|&p| p == j).unwrap(),
                        perm.iter().position(|&p| p == k).unwrap(),
                    );
                    assert_eq!(
                        ord3_rat(&angles[i], &angles[j], &angles[k]),
                        ord3_rat(&angles2[pi], &angles2[pj], &angles2[pk]),
                        "triple ({i},{j},{k})"
                    );
                }
            }
        }
    }
}
