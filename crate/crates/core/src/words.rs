//! Words in `G = Z_{m_1} * ... * Z_{m_k} * F_{2n}` with torsion generators
//! `e_1..e_k` (orders `m_l`) and free generators `h_1..h_{2n}`.
//!
//! Normal form: alternating syllables `gen^exp` where adjacent syllables
//! use distinct generators, torsion exponents sit in `[1, m_l - 1]`, and
//! free exponents are nonzero. This is the unique reduced form in a free
//! product, so word equality is syllable-list equality.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

const MAX_SYLLABLES: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("torsion order m_{index} = {value} must be at least 2")]
    TorsionOrderTooSmall { index: usize, value: u32 },
    #[error("spec (n=0, k=0) is the trivial group; excluded")]
    Trivial,
    #[error("spec (n=0, k=1) is a finite cyclic group; excluded")]
    FiniteCyclic,
    #[error("spec (n=0, k=2, m=(2,2)) is the infinite dihedral group; excluded")]
    InfiniteDihedral,
    #[error("malformed spec string: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator {0:?} is outside the spec")]
    UnknownGenerator(Gen),
    #[error("words belong to different specs")]
    SpecMismatch,
    #[error("word exceeds {MAX_SYLLABLES} syllables")]
    TooLong,
    #[error("exponent arithmetic overflow")]
    ExponentOverflow,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Generator name. Indices are 1-based to match the usual notation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    E(u16),
    H(u16),
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::E(l) => write!(f, "e{l}"),
            Gen::H(j) => write!(f, "h{j}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Syllable {
    pub gen: Gen,
    pub exp: i64,
}

#[derive(Debug)]
struct SpecInner {
    n: u16,
    k: u16,
    m: Vec<u32>,
}

/// Group specification `(n, k, (m_1..m_k))`. Cheap to clone; equality and
/// hashing are by content, so words from two identically built specs mix.
#[derive(Clone, Debug)]
pub struct GroupSpec(Arc<SpecInner>);

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.n == other.0.n && self.0.k == other.0.k && self.0.m == other.0.m
    }
}

impl Eq for GroupSpec {}

impl std::hash::Hash for GroupSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.n.hash(state);
        self.0.k.hash(state);
        self.0.m.hash(state);
    }
}

impl GroupSpec {
    pub fn new(n: u16, k: u16, m: Vec<u32>) -> Result<GroupSpec, SpecError> {
        if m.len() != k as usize {
            return Err(SpecError::Malformed(format!("k = {k} but {} torsion orders given", m.len())));
        }
        for (i, &v) in m.iter().enumerate() {
            if v < 2 {
                return Err(SpecError::TorsionOrderTooSmall { index: i + 1, value: v });
            }
        }
        if n == 0 && k == 0 {
            return Err(SpecError::Trivial);
        }
        if n == 0 && k == 1 {
            return Err(SpecError::FiniteCyclic);
        }
        if n == 0 && k == 2 && m == [2, 2] {
            return Err(SpecError::InfiniteDihedral);
        }
        Ok(GroupSpec(Arc::new(SpecInner { n, k, m })))
    }

    pub fn n(&self) -> u16 {
        self.0.n
    }

    pub fn k(&self) -> u16 {
        self.0.k
    }

    pub fn two_n(&self) -> u16 {
        2 * self.0.n
    }

    /// Torsion order of `e_l`, 1-based.
    pub fn m(&self, l: u16) -> u32 {
        self.0.m[(l - 1) as usize]
    }

    pub fn m_slice(&self) -> &[u32] {
        &self.0.m
    }

    /// Number of circle sectors used by the geometric realization.
    pub fn sectors(&self) -> u16 {
        self.0.k + 2 * self.0.n
    }

    /// Product of the torsion orders (1 for k = 0).
    pub fn m_product(&self) -> BigInt {
        self.0.m.iter().fold(BigInt::one(), |acc, &v| acc * BigInt::from(v))
    }

    pub fn holds(&self, gen: Gen) -> bool {
        match gen {
            Gen::E(l) => l >= 1 && l <= self.0.k,
            Gen::H(j) => j >= 1 && j <= 2 * self.0.n,
        }
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        let k = self.0.k;
        let two_n = 2 * self.0.n;
        (1..=k).map(Gen::E).chain((1..=two_n).map(Gen::H))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0.n, self.0.k)?;
        for v in &self.0.m {
            write!(f, ",{v}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = SpecError;

    /// Format: `n,k,m_1,..,m_k`, e.g. `1,2,2,3`.
    fn from_str(s: &str) -> Result<GroupSpec, SpecError> {
        let parts: Vec<&str> = s.split(',').map(|p| p.trim()).collect();
        if parts.len() < 2 {
            return Err(SpecError::Malformed(format!("need at least n,k in {s:?}")));
        }
        let n: u16 = parts[0].parse().map_err(|_| SpecError::Malformed(format!("bad n in {s:?}")))?;
        let k: u16 = parts[1].parse().map_err(|_| SpecError::Malformed(format!("bad k in {s:?}")))?;
        let m: Result<Vec<u32>, _> = parts[2..].iter().map(|p| p.parse::<u32>()).collect();
        let m = m.map_err(|_| SpecError::Malformed(format!("bad torsion order in {s:?}")))?;
        GroupSpec::new(n, k, m)
    }
}

/// Reduced word. Construction reduces, so every held value is in normal
/// form and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    spec: GroupSpec,
    syls: Vec<Syllable>,
}

fn normalize_exp(spec: &GroupSpec, gen: Gen, exp: i64) -> Result<i64, WordError> {
    match gen {
        Gen::E(l) => {
            let m = spec.m(l) as i64;
            Ok(exp.rem_euclid(m))
        }
        Gen::H(_) => Ok(exp),
    }
}

fn push_reduced(spec: &GroupSpec, out: &mut Vec<Syllable>, gen: Gen, exp: i64) -> Result<(), WordError> {
    let mut exp = normalize_exp(spec, gen, exp)?;
    loop {
        if exp == 0 {
            return Ok(());
        }
        match out.last() {
            Some(top) if top.gen == gen => {
                let merged = top.exp.checked_add(exp).ok_or(WordError::ExponentOverflow)?;
                out.pop();
                exp = normalize_exp(spec, gen, merged)?;
            }
            _ => {
                if out.len() >= MAX_SYLLABLES {
                    return Err(WordError::TooLong);
                }
                out.push(Syllable { gen, exp });
                return Ok(());
            }
        }
    }
}

impl Word {
    pub fn identity(spec: &GroupSpec) -> Word {
        Word { spec: spec.clone(), syls: Vec::new() }
    }

    pub fn generator(spec: &GroupSpec, gen: Gen, exp: i64) -> Result<Word, WordError> {
        Word::from_syllables(spec, [Syllable { gen, exp }])
    }

    pub fn from_syllables<I>(spec: &GroupSpec, syls: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = Syllable>,
    {
        let mut out = Vec::new();
        for s in syls {
            if !spec.holds(s.gen) {
                return Err(WordError::UnknownGenerator(s.gen));
            }
            push_reduced(spec, &mut out, s.gen, s.exp)?;
        }
        Ok(Word { spec: spec.clone(), syls: out })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syls
    }

    pub fn is_identity(&self) -> bool {
        self.syls.is_empty()
    }

    pub fn len_syllables(&self) -> usize {
        self.syls.len()
    }

    /// Total letter count: torsion exponents count positively, free
    /// exponents by absolute value.
    pub fn len_letters(&self) -> u64 {
        self.syls.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    /// Expansion into single-generator letters with sign, in word order.
    pub fn letters(&self) -> Vec<(Gen, i8)> {
        let mut out = Vec::new();
        for s in &self.syls {
            let sign: i8 = if s.exp < 0 { -1 } else { 1 };
            for _ in 0..s.exp.unsigned_abs() {
                out.push((s.gen, sign));
            }
        }
        out
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        if self.spec != other.spec {
            return Err(WordError::SpecMismatch);
        }
        let mut out = self.syls.clone();
        for s in &other.syls {
            push_reduced(&self.spec, &mut out, s.gen, s.exp)?;
        }
        Ok(Word { spec: self.spec.clone(), syls: out })
    }

    pub fn invert(&self) -> Word {
        let mut out = Vec::with_capacity(self.syls.len());
        for s in self.syls.iter().rev() {
            let exp = normalize_exp(&self.spec, s.gen, -s.exp).expect("negation cannot overflow normal form");
            debug_assert!(exp != 0);
            out.push(Syllable { gen: s.gen, exp });
        }
        Word { spec: self.spec.clone(), syls: out }
    }

    /// `by * self * by^{-1}`.
    pub fn conjugate(&self, by: &Word) -> Result<Word, WordError> {
        by.multiply(self)?.multiply(&by.invert())
    }

    /// `[a, b] = a b a^{-1} b^{-1}`.
    pub fn commutator(a: &Word, b: &Word) -> Result<Word, WordError> {
        a.multiply(b)?.multiply(&a.invert())?.multiply(&b.invert())
    }

    pub fn pow(&self, e: i64) -> Result<Word, WordError> {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity(&self.spec);
        for _ in 0..e.unsigned_abs() {
            out = out.multiply(&base)?;
        }
        Ok(out)
    }

    /// If `self == base^t` for some integer t, return it. Search is
    /// length-bounded, so this always terminates.
    pub fn power_exponent_of(&self, base: &Word) -> Option<i64> {
        if self.is_identity() {
            return Some(0);
        }
        if base.is_identity() {
            return None;
        }
        for sign in [1i64, -1] {
            let step = if sign > 0 { base.clone() } else { base.invert() };
            let mut acc = Word::identity(&self.spec);
            let mut t: i64 = 0;
            loop {
                acc = acc.multiply(&step).ok()?;
                t += 1;
                if acc == *self {
                    return Some(sign * t);
                }
                if acc.len_letters() > self.len_letters() + 2 * base.len_letters() || t > 1_000_000 {
                    break;
                }
            }
        }
        None
    }

    /// `alpha = e_1 .. e_k [h_1, h_2] .. [h_{2n-1}, h_{2n}]`.
    pub fn alpha(spec: &GroupSpec) -> Word {
        let mut w = Word::identity(spec);
        for l in 1..=spec.k() {
            w = w.multiply(&Word::generator(spec, Gen::E(l), 1).unwrap()).unwrap();
        }
        for p in 1..=spec.n() {
            let a = Word::generator(spec, Gen::H(2 * p - 1), 1).unwrap();
            let b = Word::generator(spec, Gen::H(2 * p), 1).unwrap();
            w = w.multiply(&Word::commutator(&a, &b).unwrap()).unwrap();
        }
        w
    }

    /// Image in `H_1(G) = Z^{2n} x prod Z_{m_l}`: free exponent sums and
    /// torsion exponent residues in `[0, m_l)`.
    pub fn abelianize(&self) -> (Vec<i64>, Vec<u32>) {
        let mut free = vec![0i64; self.spec.two_n() as usize];
        let mut tor = vec![0u32; self.spec.k() as usize];
        for s in &self.syls {
            match s.gen {
                Gen::H(j) => free[(j - 1) as usize] += s.exp,
                Gen::E(l) => {
                    let m = self.spec.m(l) as i64;
                    let cur = tor[(l - 1) as usize] as i64;
                    tor[(l - 1) as usize] = (cur + s.exp).rem_euclid(m) as u32;
                }
            }
        }
        (free, tor)
    }

    /// Parse from the grammar: letters `e<i>`/`h<j>` with optional
    /// `^<signed int>`, whitespace or juxtaposition between syllables,
    /// `1` for the identity. `z` is not a generator of G; the central
    /// extension has its own parser.
    pub fn parse(spec: &GroupSpec, input: &str) -> Result<Word, WordError> {
        let syls = tokenize(input, false)?;
        Word::from_syllables(spec, syls.into_iter().map(|(g, e, _)| Syllable { gen: g, exp: e }))
    }
}

/// Shared tokenizer. With `allow_z`, the letter `z` is accepted and
/// reported via the third tuple slot (gen is a placeholder, flag true).
pub(crate) fn tokenize(input: &str, allow_z: bool) -> Result<Vec<(Gen, i64, bool)>, WordError> {
    let b = input.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let read_u16 = |b: &[u8], i: &mut usize| -> Option<u16> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        if start == *i {
            return None;
        }
        std::str::from_utf8(&b[start..*i]).ok()?.parse().ok()
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'1' {
            i += 1;
            continue;
        }
        let (gen, is_z) = match c {
            b'e' | b'h' => {
                let pos = i;
                i += 1;
                let idx = read_u16(b, &mut i).ok_or_else(|| WordError::Parse {
                    pos,
                    msg: format!("letter '{}' needs an index", c as char),
                })?;
                if idx == 0 {
                    return Err(WordError::Parse { pos, msg: "indices are 1-based".into() });
                }
                (if c == b'e' { Gen::E(idx) } else { Gen::H(idx) }, false)
            }
            b'z' if allow_z => {
                i += 1;
                (Gen::E(1), true)
            }
            _ => {
                return Err(WordError::Parse { pos: i, msg: format!("unexpected character '{}'", c as char) });
            }
        };
        let mut exp: i64 = 1;
        if i < b.len() && b[i] == b'^' {
            let pos = i;
            i += 1;
            let mut sign = 1i64;
            if i < b.len() && (b[i] == b'-' || b[i] == b'+') {
                if b[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            }
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(WordError::Parse { pos, msg: "'^' needs an integer exponent".into() });
            }
            let mag: i64 = std::str::from_utf8(&b[start..i])
                .unwrap()
                .parse()
                .map_err(|_| WordError::Parse { pos, msg: "exponent overflows".into() })?;
            exp = sign * mag;
        }
        out.push((gen, exp, is_z));
    }
    Ok(out)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syls.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syls.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if s.exp == 1 {
                write!(f, "{}", s.gen)?;
            } else {
                write!(f, "{}^{}", s.gen, s.exp)?;
            }
        }
        Ok(())
    }
}

fn letter_rank(spec: &GroupSpec, gen: Gen, sign: i8) -> u32 {
    match gen {
        Gen::E(l) => (l - 1) as u32,
        Gen::H(j) => spec.k() as u32 + 2 * (j - 1) as u32 + if sign < 0 { 1 } else { 0 },
    }
}

/// First `count` reduced words in length-lex order over the letter
/// alphabet `e_1 < .. < e_k < h_1 < h_1^{-1} < .. < h_{2n}^{-1}`
/// (torsion letters only appear positively; runs respect `m_l - 1`).
pub fn enumerate_words(spec: &GroupSpec, count: usize) -> Vec<Word> {
    let mut alphabet: Vec<(Gen, i8)> = Vec::new();
    for l in 1..=spec.k() {
        alphabet.push((Gen::E(l), 1));
    }
    for j in 1..=spec.two_n() {
        alphabet.push((Gen::H(j), 1));
        alphabet.push((Gen::H(j), -1));
    }
    alphabet.sort_by_key(|&(g, s)| letter_rank(spec, g, s));

    let mut out: Vec<Word> = vec![Word::identity(spec)];
    let mut layer: Vec<Vec<(Gen, i8)>> = vec![Vec::new()];
    while out.len() < count {
        let mut next_layer: Vec<Vec<(Gen, i8)>> = Vec::new();
        for prefix in &layer {
            for &(g, s) in &alphabet {
                if let Some(&(pg, ps)) = prefix.last() {
                    if pg == g {
                        match g {
                            Gen::E(l) => {
                                // run length cap m_l - 1 keeps the word reduced
                                let run = prefix.iter().rev().take_while(|&&(x, _)| x == g).count() as u32;
                                if run >= spec.m(l) - 1 {
                                    continue;
                                }
                            }
                            Gen::H(_) => {
                                if ps != s {
                                    continue;
                                }
                            }
                        }
                    }
                }
                let mut w = prefix.clone();
                w.push((g, s));
                next_layer.push(w);
            }
        }
        if next_layer.is_empty() {
            break;
        }
        for letters in &next_layer {
            let syls = letters.iter().map(|&(g, s)| Syllable { gen: g, exp: s as i64 });
            out.push(Word::from_syllables(spec, syls).expect("constrained letters stay reduced"));
            if out.len() == count {
                break;
            }
        }
        layer = next_layer;
    }
    out.truncate(count);
    out
}

/// A generator of the finite-index free subgroup, with its combinatorial
/// address.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SGen {
    pub word: Word,
    pub kind: SKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SKind {
    /// `^{g_xi}[e_t^{u_t}, e_{t-1}^{u_{t-1}} .. e_1^{u_1}]` with
    /// `lambda = (u_1..u_t)` and `xi = (u_{t+1}..u_k)`.
    Conj { t: u16, lambda: Vec<u32>, xi: Vec<u32> },
    /// `^{E(tuple)} h_l` over all coset tuples.
    HConj { tuple: Vec<u32>, l: u16 },
}

/// Exponent convention for tuples: entries live in `[1, m_l]` and the
/// value `m_l` is the identity exponent.
pub(crate) fn e_power(spec: &GroupSpec, l: u16, u: u32) -> Word {
    let m = spec.m(l);
    if u % m == 0 {
        Word::identity(spec)
    } else {
        Word::generator(spec, Gen::E(l), (u % m) as i64).unwrap()
    }
}

/// `E(tuple) = e_k^{i_k} .. e_1^{i_1}` (descending index order).
pub fn coset_word(spec: &GroupSpec, tuple: &[u32]) -> Word {
    debug_assert_eq!(tuple.len(), spec.k() as usize);
    let mut w = Word::identity(spec);
    for l in (1..=spec.k()).rev() {
        w = w.multiply(&e_power(spec, l, tuple[(l - 1) as usize])).unwrap();
    }
    w
}

/// All coset tuples in lexicographic order, entries in `[1, m_l]`.
pub fn coset_tuples(spec: &GroupSpec) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for l in 1..=spec.k() {
        let m = spec.m(l);
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for t in &out {
            for v in 1..=m {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Identity coset tuple `(m_1, .., m_k)`.
pub fn identity_tuple(spec: &GroupSpec) -> Vec<u32> {
    (1..=spec.k()).map(|l| spec.m(l)).collect()
}

fn tuples_over(ranges: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &m in ranges {
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for t in &out {
            for v in 1..=m {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn low_word(spec: &GroupSpec, lambda_prefix: &[u32]) -> Word {
    // e_{t-1}^{u_{t-1}} .. e_1^{u_1}
    let mut w = Word::identity(spec);
    for l in (1..=lambda_prefix.len() as u16).rev() {
        w = w.multiply(&e_power(spec, l, lambda_prefix[(l - 1) as usize])).unwrap();
    }
    w
}

pub(crate) fn high_word(spec: &GroupSpec, t: u16, xi: &[u32]) -> Word {
    // e_k^{u_k} .. e_{t+1}^{u_{t+1}}
    let mut w = Word::identity(spec);
    for (offset, l) in ((t + 1)..=spec.k()).enumerate().collect::<Vec<_>>().into_iter().rev() {
        w = w.multiply(&e_power(spec, l, xi[offset])).unwrap();
    }
    w
}

pub(crate) fn conj_s_word(spec: &GroupSpec, t: u16, lambda: &[u32], xi: &[u32]) -> Word {
    let u_t = lambda[(t - 1) as usize];
    let inner = low_word(spec, &lambda[..(t - 1) as usize]);
    let f = Word::commutator(&e_power(spec, t, u_t), &inner).unwrap();
    let g = high_word(spec, t, xi);
    f.conjugate(&g).unwrap()
}

/// The free generating set `S = S_1 u S_2` in a fixed deterministic
/// order: conjugated torsion commutators first (by `t`, then `lambda`,
/// then `xi`, all lexicographic), then conjugated free generators (by
/// `l`, then coset tuple).
pub fn enumerate_s(spec: &GroupSpec) -> Vec<SGen> {
    let mut out = Vec::new();
    for t in 2..=spec.k() {
        let prefix_ranges: Vec<u32> = (1..t).map(|l| spec.m(l)).collect();
        let ident_prefix: Vec<u32> = prefix_ranges.clone();
        for prefix in tuples_over(&prefix_ranges) {
            if prefix == ident_prefix {
                continue;
            }
            for u_t in 1..spec.m(t) {
                let mut lambda = prefix.clone();
                lambda.push(u_t);
                let xi_ranges: Vec<u32> = ((t + 1)..=spec.k()).map(|l| spec.m(l)).collect();
                for xi in tuples_over(&xi_ranges) {
                    let word = conj_s_word(spec, t, &lambda, &xi);
                    out.push(SGen { word, kind: SKind::Conj { t, lambda: lambda.clone(), xi } });
                }
            }
        }
    }
    for l in 1..=spec.two_n() {
        for tuple in coset_tuples(spec) {
            let e = coset_word(spec, &tuple);
            let h = Word::generator(spec, Gen::H(l), 1).unwrap();
            let word = h.conjugate(&e).unwrap();
            out.push(SGen { word, kind: SKind::HConj { tuple, l } });
        }
    }
    out
}

/// `|S| = 1 - M chi` with `chi = 1 - 2n - k + sum 1/m_l`, i.e.
/// `1 + M (2n + k - 1) - sum_l M / m_l`.
pub fn s_count_formula(spec: &GroupSpec) -> BigInt {
    let m_prod = spec.m_product();
    let mut sum_quot = BigInt::zero();
    for l in 1..=spec.k() {
        sum_quot += &m_prod / BigInt::from(spec.m(l));
    }
    BigInt::one() + &m_prod * BigInt::from(2 * spec.n() as i64 + spec.k() as i64 - 1) - sum_quot
}

/// One factor of a sorted word: an element of `S` raised to a power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFactor {
    pub base: Word,
    pub exp: i64,
}

/// Result of `sort_to_coset`: the input equals
/// `prod_i base_i^{exp_i} * E(coset)` with every base in `S`.
#[derive(Clone, Debug)]
pub struct SortedWord {
    pub factors: Vec<SFactor>,
    pub coset: Vec<u32>,
}

impl SortedWord {
    pub fn expand(&self, spec: &GroupSpec) -> Result<Word, WordError> {
        let mut w = Word::identity(spec);
        for f in &self.factors {
            w = w.multiply(&f.base.pow(f.exp)?)?;
        }
        w.multiply(&coset_word(spec, &self.coset))
    }
}

fn push_factor(factors: &mut Vec<SFactor>, base: Word, exp: i64) {
    if exp == 0 {
        return;
    }
    if let Some(top) = factors.last_mut() {
        if top.base == base {
            top.exp += exp;
            if top.exp == 0 {
                factors.pop();
            }
            return;
        }
    }
    factors.push(SFactor { base, exp });
}

/// Rewrite a word as (free-subgroup element) * (coset representative) in
/// a single left-to-right pass. Each consumed torsion letter moves the
/// running coset tuple one step and emits at most two `S_1` factors;
/// each free letter emits one `S_2` factor.
pub fn sort_to_coset(w: &Word) -> SortedWord {
    let spec = w.spec().clone();
    let mut tuple = identity_tuple(&spec);
    let mut factors: Vec<SFactor> = Vec::new();

    let lambda_b = |tuple: &[u32], l: u16, u: u32| -> Option<Word> {
        // ^P [e_l^u, L]; trivial when u = m_l or the low prefix is all-identity
        let m = spec.m(l);
        if u % m == 0 {
            return None;
        }
        let low_trivial = (1..l).all(|j| tuple[(j - 1) as usize] % spec.m(j) == 0);
        if low_trivial {
            return None;
        }
        let mut lambda: Vec<u32> = tuple[..(l - 1) as usize].to_vec();
        lambda.push(u);
        let xi: Vec<u32> = tuple[l as usize..].to_vec();
        Some(conj_s_word(&spec, l, &lambda, &xi))
    };

    for s in w.syllables() {
        match s.gen {
            Gen::E(l) => {
                let m = spec.m(l) as i64;
                let cur = tuple[(l - 1) as usize];
                let new = ((cur as i64 + s.exp - 1).rem_euclid(m) + 1) as u32;
                if let Some(b) = lambda_b(&tuple, l, cur) {
                    push_factor(&mut factors, b, 1);
                }
                if let Some(b) = lambda_b(&tuple, l, new) {
                    push_factor(&mut factors, b, -1);
                }
                tuple[(l - 1) as usize] = new;
            }
            Gen::H(j) => {
                let e = coset_word(&spec, &tuple);
                let h = Word::generator(&spec, Gen::H(j), 1).unwrap();
                let base = h.conjugate(&e).unwrap();
                push_factor(&mut factors, base, s.exp);
            }
        }
    }
    SortedWord { factors, coset: tuple }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_023() -> GroupSpec {
        GroupSpec::new(0, 2, vec![2, 3]).unwrap()
    }

    fn spec_112() -> GroupSpec {
        GroupSpec::new(1, 1, vec![2]).unwrap()
    }

    fn spec_1223() -> GroupSpec {
        GroupSpec::new(1, 2, vec![2, 3]).unwrap()
    }

    #[test]
    fn excluded_specs_are_rejected() {
        assert_eq!(GroupSpec::new(0, 0, vec![]).unwrap_err(), SpecError::Trivial);
        assert_eq!(GroupSpec::new(0, 1, vec![5]).unwrap_err(), SpecError::FiniteCyclic);
        assert_eq!(GroupSpec::new(0, 2, vec![2, 2]).unwrap_err(), SpecError::InfiniteDihedral);
        assert!(GroupSpec::new(0, 2, vec![2, 3]).is_ok());
        assert!(GroupSpec::new(1, 0, vec![]).is_ok());
    }

    #[test]
    fn spec_string_roundtrip() {
        for s in ["1,2,2,3", "0,2,2,3", "1,0", "2,1,7"] {
            let spec: GroupSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("0,2,2,2".parse::<GroupSpec>().is_err());
    }

    /// Independent letter-level reducer: expand to single letters, cancel
    /// adjacent inverse pairs and full torsion cycles to a fixpoint, then
    /// rewrite negative torsion runs positively.
    fn oracle_normal_letters(spec: &GroupSpec, raw: &[(Gen, i64)]) -> Vec<(Gen, i8)> {
        let mut letters: Vec<(Gen, i8)> = Vec::new();
        for &(g, e) in raw {
            let sign: i8 = if e < 0 { -1 } else { 1 };
            for _ in 0..e.unsigned_abs() {
                letters.push((g, sign));
            }
        }
        loop {
            let mut changed = false;
            let mut out: Vec<(Gen, i8)> = Vec::new();
            for &(g, s) in &letters {
                if let Some(&(pg, ps)) = out.last() {
                    if pg == g && ps == -s {
                        out.pop();
                        changed = true;
                        continue;
                    }
                }
                out.push((g, s));
                if let Gen::E(l) = g {
                    let m = spec.m(l) as usize;
                    let run = out.iter().rev().take_while(|&&(x, sg)| x == g && sg == s).count();
                    if run == m {
                        out.truncate(out.len() - m);
                        changed = true;
                    }
                }
            }
            letters = out;
            if !changed {
                break;
            }
        }
        // positive normal form for torsion runs
        let mut out: Vec<(Gen, i8)> = Vec::new();
        let mut i = 0;
        while i < letters.len() {
            let (g, s) = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == (g, s) {
                j += 1;
            }
            let run = j - i;
            match g {
                Gen::E(l) if s < 0 => {
                    let m = spec.m(l) as usize;
                    for _ in 0..(m - run) {
                        out.push((g, 1));
                    }
                }
                _ => {
                    for _ in 0..run {
                        out.push((g, s));
                    }
                }
            }
            i = j;
        }
        out
    }

    #[test]
    fn reduction_matches_letter_oracle() {
        let specs = [spec_023(), spec_112(), spec_1223()];
        let mut state: u64 = 42;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for round in 0..3000 {
            let spec = &specs[(round % specs.len()) as usize];
            let gens: Vec<Gen> = spec.gens().collect();
            let len = (next() % 12) as usize;
            let mut raw = Vec::new();
            for _ in 0..len {
                let g = gens[(next() as usize) % gens.len()];
                let e = (next() % 9) as i64 - 4;
                if e != 0 {
                    raw.push((g, e));
                }
            }
            let word =
                Word::from_syllables(spec, raw.iter().map(|&(g, e)| Syllable { gen: g, exp: e })).unwrap();
            assert_eq!(word.letters(), oracle_normal_letters(spec, &raw), "raw: {raw:?}");
        }
    }

    #[test]
    fn invert_and_conjugate_laws() {
        let spec = spec_1223();
        let w = Word::parse(&spec, "e1 e2^2 h1^-1 h2^3").unwrap();
        assert!(w.multiply(&w.invert()).unwrap().is_identity());
        let g = Word::parse(&spec, "h2 e2").unwrap();
        let c = w.conjugate(&g).unwrap();
        assert_eq!(c, g.multiply(&w).unwrap().multiply(&g.invert()).unwrap());
        let com = Word::commutator(&w, &g).unwrap();
        assert!(com
            .multiply(&g.multiply(&w).unwrap())
            .unwrap()
            .multiply(&w.multiply(&g).unwrap().invert())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn torsion_relations_hold() {
        let spec = spec_023();
        let e1 = Word::generator(&spec, Gen::E(1), 1).unwrap();
        assert!(e1.pow(2).unwrap().is_identity());
        let e2 = Word::generator(&spec, Gen::E(2), 1).unwrap();
        assert!(e2.pow(3).unwrap().is_identity());
        assert_eq!(e2.pow(-1).unwrap(), e2.pow(2).unwrap());
    }

    #[test]
    fn display_parse_roundtrip() {
        let spec = spec_1223();
        for s in ["1", "e1", "e2^2", "h1^-2 e1 h2", "e2 h1 e2^2 h1^-1"] {
            let w = Word::parse(&spec, s).unwrap();
            assert_eq!(Word::parse(&spec, &w.to_string()).unwrap(), w);
        }
        // juxtaposition without spaces
        let a = Word::parse(&spec, "e1h1^-2e2").unwrap();
        let b = Word::parse(&spec, "e1 h1^-2 e2").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alpha_has_trivial_free_abelianization() {
        let spec = spec_1223();
        let a = Word::alpha(&spec);
        let (free, tor) = a.abelianize();
        assert_eq!(free, vec![0, 0]);
        assert_eq!(tor, vec![1, 1]);
        assert_eq!(a.to_string(), "e1 e2 h1 h2 h1^-1 h2^-1");
    }

    #[test]
    fn length_lex_enumeration_prefix() {
        let spec = spec_112();
        let ws: Vec<String> = enumerate_words(&spec, 8).iter().map(|w| w.to_string()).collect();
        assert_eq!(ws, vec!["1", "e1", "h1", "h1^-1", "h2", "h2^-1", "e1 h1", "e1 h1^-1"]);
        // no m_l run violations deeper in
        for w in enumerate_words(&spec_023(), 200) {
            for s in w.syllables() {
                if let Gen::E(l) = s.gen {
                    assert!(s.exp >= 1 && s.exp < spec_023().m(l) as i64);
                }
            }
        }
    }

    #[test]
    fn enumerated_words_are_distinct() {
        let ws = enumerate_words(&spec_1223(), 300);
        let set: std::collections::HashSet<&Word> = ws.iter().collect();
        assert_eq!(set.len(), ws.len());
    }

    #[test]
    fn s_counts_match_euler_characteristic() {
        for (spec, expect) in [
            (spec_023(), 2),
            (spec_112(), 4),
            (GroupSpec::new(0, 3, vec![2, 2, 2]).unwrap(), 5),
            (spec_1223(), 14),
        ] {
            let s = enumerate_s(&spec);
            assert_eq!(s.len() as i64, expect);
            assert_eq!(s_count_formula(&spec), BigInt::from(expect));
            let set: std::collections::HashSet<&Word> = s.iter().map(|g| &g.word).collect();
            assert_eq!(set.len(), s.len(), "S has duplicate words");
            for g in &s {
                assert!(!g.word.is_identity());
            }
        }
    }

    #[test]
    fn sort_to_coset_invariant_random() {
        let specs = [spec_023(), spec_1223(), GroupSpec::new(0, 3, vec![2, 2, 2]).unwrap()];
        let mut state: u64 = 7;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for round in 0..600 {
            let spec = &specs[round % specs.len()];
            let s_words: std::collections::HashSet<Word> =
                enumerate_s(spec).into_iter().map(|g| g.word).collect();
            let gens: Vec<Gen> = spec.gens().collect();
            let mut w = Word::identity(spec);
            let len = (next() % 12) as usize;
            for _ in 0..len {
                let g = gens[(next() as usize) % gens.len()];
                let e = (next() % 7) as i64 - 3;
                if e == 0 {
                    continue;
                }
                w = w.multiply(&Word::generator(spec, g, e).unwrap()).unwrap();
            }
            let sorted = sort_to_coset(&w);
            assert_eq!(sorted.expand(spec).unwrap(), w, "word: {w}");
            for f in &sorted.factors {
                assert!(s_words.contains(&f.base), "factor {} not in S (word {w})", f.base);
                assert!(f.exp != 0);
            }
            for (i, l) in (1..=spec.k()).enumerate() {
                assert!(sorted.coset[i] >= 1 && sorted.coset[i] <= spec.m(l));
            }
        }
    }

    #[test]
    fn sort_to_coset_identity_and_pure_coset() {
        let spec = spec_023();
        let id = sort_to_coset(&Word::identity(&spec));
        assert!(id.factors.is_empty());
        assert_eq!(id.coset, identity_tuple(&spec));
        let w = Word::parse(&spec, "e2^2 e1").unwrap();
        let sorted = sort_to_coset(&w);
        assert_eq!(coset_word(&spec, &sorted.coset).multiply(&Word::identity(&spec)).unwrap().is_identity(), false);
        assert_eq!(sorted.expand(&spec).unwrap(), w);
    }

    #[test]
    fn power_exponent_detection() {
        let spec = spec_1223();
        let a = Word::alpha(&spec);
        let a3 = a.pow(3).unwrap();
        assert_eq!(a3.power_exponent_of(&a), Some(3));
        assert_eq!(a.invert().power_exponent_of(&a), Some(-1));
        assert_eq!(Word::identity(&spec).power_exponent_of(&a), Some(0));
        let other = Word::parse(&spec, "h1").unwrap();
        assert_eq!(other.power_exponent_of(&a), None);
    }
}
