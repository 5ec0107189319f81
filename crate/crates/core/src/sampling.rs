//! Seeded random elements for the property suites.
//!
//! Every sampler takes an explicit seed and a stream index, so suites can
//! draw independent families that are reproducible across runs, platforms,
//! and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::leftorder::HatWord;
use crate::pingpong::{SLetter, SPoint};
use crate::words::{Gen, GroupSpec, Syllable, Word};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random reduced word with at most `max_syllables` syllables: adjacent
/// generators always differ, torsion exponents stay in normal form, free
/// exponents are small and nonzero. No trailing reduction is ever needed.
pub fn random_word(rng: &mut impl Rng, spec: &GroupSpec, max_syllables: usize) -> Word {
    let gens: Vec<Gen> = spec.gens().collect();
    let length = rng.gen_range(0..=max_syllables);
    let mut syls: Vec<Syllable> = Vec::with_capacity(length);
    let mut last: Option<Gen> = None;
    for _ in 0..length {
        let gen = loop {
            let pick = gens[rng.gen_range(0..gens.len())];
            if last != Some(pick) {
                break pick;
            }
        };
        let exp = match gen {
            Gen::E(l) => rng.gen_range(1..spec.m(l) as i64),
            Gen::H(_) => {
                let mag = rng.gen_range(1..=3i64);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
        };
        syls.push(Syllable { gen, exp });
        last = Some(gen);
    }
    Word::from_syllables(spec, syls).expect("syllables built in normal form")
}

pub fn random_words(spec: &GroupSpec, count: usize, max_syllables: usize, seed: u64) -> Vec<Word> {
    let mut rng = rng_for(seed, 1);
    (0..count).map(|_| random_word(&mut rng, spec, max_syllables)).collect()
}

/// Quadruples for the axiom suite. Every eighth quadruple duplicates one
/// slot so the degeneracy axiom is exercised alongside the generic case.
pub fn random_quadruples(
    spec: &GroupSpec,
    count: usize,
    max_syllables: usize,
    seed: u64,
) -> Vec<[Word; 4]> {
    let mut rng = rng_for(seed, 2);
    (0..count)
        .map(|i| {
            let mut q = [
                random_word(&mut rng, spec, max_syllables),
                random_word(&mut rng, spec, max_syllables),
                random_word(&mut rng, spec, max_syllables),
                random_word(&mut rng, spec, max_syllables),
            ];
            if i % 8 == 0 {
                let from = rng.gen_range(0..4);
                let to = (from + rng.gen_range(1..4)) % 4;
                q[to] = q[from].clone();
            }
            q
        })
        .collect()
}

pub fn random_triples(
    spec: &GroupSpec,
    count: usize,
    max_syllables: usize,
    seed: u64,
) -> Vec<[Word; 3]> {
    let mut rng = rng_for(seed, 3);
    (0..count)
        .map(|i| {
            let mut t = [
                random_word(&mut rng, spec, max_syllables),
                random_word(&mut rng, spec, max_syllables),
                random_word(&mut rng, spec, max_syllables),
            ];
            if i % 8 == 0 {
                let from = rng.gen_range(0..3);
                let to = (from + rng.gen_range(1..3)) % 3;
                t[to] = t[from].clone();
            }
            t
        })
        .collect()
}

pub fn random_hat_words(
    spec: &GroupSpec,
    count: usize,
    max_syllables: usize,
    z_span: i64,
    seed: u64,
) -> Vec<HatWord> {
    let mut rng = rng_for(seed, 4);
    (0..count)
        .map(|_| {
            let base = random_word(&mut rng, spec, max_syllables);
            let z = rng.gen_range(-z_span..=z_span);
            HatWord::new(base, z)
        })
        .collect()
}

/// Random orbit points: a freely reduced string of at most `max_letters`
/// letters over `sgen_count` symbols, attached to a random coset index.
pub fn random_s_points(
    sgen_count: usize,
    coset_count: usize,
    count: usize,
    max_letters: usize,
    seed: u64,
) -> Vec<SPoint> {
    let mut rng = rng_for(seed, 5);
    (0..count)
        .map(|_| {
            let length = rng.gen_range(0..=max_letters);
            let letters: Vec<SLetter> = (0..length)
                .map(|_| SLetter {
                    sgen: rng.gen_range(0..sgen_count),
                    inverse: rng.gen_bool(0.5),
                })
                .collect();
            SPoint::new(letters, rng.gen_range(0..coset_count))
        })
        .collect()
}
