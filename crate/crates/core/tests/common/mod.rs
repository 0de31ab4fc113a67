//! Word and element generators shared by the integration tests: seeded
//! `ChaCha8Rng` draws and proptest strategies.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wmono::{Case, Coeff, Element, Gen, Word};

/// Uniform letters over `[lo, hi]`, `1..=max_len` of them.
pub fn uniform_word(rng: &mut ChaCha8Rng, lo: i32, hi: i32, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len);
    Word::new(
        (0..len)
            .map(|_| Gen {
                index: rng.random_range(lo..=hi),
                dagger: rng.random(),
            })
            .collect(),
    )
}

/// Words assembled from pairs, supports and single letters, so that a good
/// share of them survives the deletion rules.
pub fn structured_word(rng: &mut ChaCha8Rng, lo: i32, hi: i32, max_len: usize) -> Word {
    let mut letters = Vec::new();
    let target = rng.random_range(1..=max_len);
    while letters.len() < target {
        let i = rng.random_range(lo..=hi);
        let room = target - letters.len();
        match rng.random_range(0..4) {
            0 if room >= 2 => letters.extend([Gen::a(i), Gen::c(i)]),
            1 if room >= 2 => letters.extend([Gen::c(i), Gen::a(i)]),
            2 => letters.push(Gen::c(i)),
            _ => letters.push(Gen::a(i)),
        }
    }
    Word::new(letters)
}

pub fn mixed_word(rng: &mut ChaCha8Rng, lo: i32, hi: i32, max_len: usize) -> Word {
    if rng.random() {
        uniform_word(rng, lo, hi, max_len)
    } else {
        structured_word(rng, lo, hi, max_len)
    }
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Coeff {
    let num = rng.random_range(-4i64..=4);
    let den = rng.random_range(1i64..=3);
    Coeff::ratio(num, den)
}

/// One to four words with small rational coefficients; a random unit term when `unital`.
pub fn element(
    rng: &mut ChaCha8Rng,
    case: Case,
    lo: i32,
    hi: i32,
    max_len: usize,
    unital: bool,
) -> Element {
    let unit = if unital {
        small_rational(rng)
    } else {
        Coeff::zero()
    };
    let mut x = Element::unit(case, unit);
    for _ in 0..rng.random_range(1..=4) {
        let w = mixed_word(rng, lo, hi, max_len);
        x.add_term(w, small_rational(rng));
    }
    x
}

pub fn gen(lo: i32, hi: i32) -> impl Strategy<Value = Gen> {
    (lo..=hi, any::<bool>()).prop_map(|(index, dagger)| Gen { index, dagger })
}

/// Words biased towards surviving the deletion rules: runs of creators and
/// annihilators around matched support pairs.
pub fn word(lo: i32, hi: i32, max_len: usize) -> impl Strategy<Value = Word> {
    prop_oneof![
        prop::collection::vec(gen(lo, hi), 1..=max_len).prop_map(Word),
        prop::collection::vec((lo..=hi, 0u8..4), 1..=max_len / 2).prop_map(|v| {
            let mut letters = Vec::new();
            for (i, kind) in v {
                match kind {
                    0 => letters.extend([Gen::a(i), Gen::c(i)]),
                    1 => letters.extend([Gen::c(i), Gen::a(i)]),
                    2 => letters.push(Gen::c(i)),
                    _ => letters.push(Gen::a(i)),
                }
            }
            Word(letters)
        }),
    ]
}

pub fn element_strategy(
    case: Case,
    lo: i32,
    hi: i32,
    max_len: usize,
) -> impl Strategy<Value = Element> {
    (
        -3i64..=3,
        prop::collection::vec((word(lo, hi, max_len), -3i64..=3), 0..4),
    )
        .prop_map(move |(u, ws)| {
            let mut e = Element::unit(case, Coeff::int(u));
            for (w, c) in ws {
                e.add_term(w, Coeff::int(c));
            }
            e
        })
}
