//! Normal forms of generator words.
//!
//! `Z` case: every element reduces to a unit part, words of the shape
//! `c(i1)..c(im) a(j1)..a(jn)` with non-increasing creator indices and
//! non-decreasing annihilator indices (a bare `c(i)a(i)` excluded), and range
//! pairs `a(i)c(i)`. These words form a linear basis, so comparing normal forms
//! decides equality.
//!
//! `N` case: every element reduces to a unit part and words `s_μ s_ν*`; equality
//! is additionally cross-checked by evaluation in the gauge-parametric Fock
//! representation.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Case, Element, Gen, Word};
use crate::fock::{evaluate_gauge_columns, FockError, TruncSpace};
use crate::scalar::{Coeff, FLOAT_TOL};

/// Upper limit on the step budget, whatever the word-length estimate says.
pub const MAX_FUEL: u64 = 50_000_000;

/// Longest step trace kept when tracing is on.
const MAX_TRACE: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("rewrite budget of {0} steps exhausted")]
    FuelExhausted(u64),
    #[error("expected a {expected} element, got {got}")]
    WrongCase { expected: Case, got: Case },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// One applied rule, for step traces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub rule: &'static str,
    pub before: String,
    pub after: String,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.rule, self.before, self.after)
    }
}

enum Outcome {
    Normal,
    Replace(&'static str, Vec<(Word, Coeff)>),
}

fn splice(l: &[Gen], from: usize, to: usize, mid: &[Gen]) -> Word {
    let mut v = Vec::with_capacity(l.len() - (to - from) + mid.len());
    v.extend_from_slice(&l[..from]);
    v.extend_from_slice(mid);
    v.extend_from_slice(&l[to..]);
    Word(v)
}

/// Deletion rules shared by both cases: orthogonal ranges and ordering of
/// consecutive creators or annihilators.
fn vanishing_pair(l: &[Gen]) -> Option<&'static str> {
    l.windows(2).find_map(|p| {
        let (x, y) = (p[0], p[1]);
        if !x.dagger && y.dagger && x.index != y.index {
            Some("orthogonal-ranges")
        } else if x.dagger && y.dagger && x.index < y.index {
            Some("creator-order")
        } else if !x.dagger && !y.dagger && y.index < x.index {
            Some("annihilator-order")
        } else {
            None
        }
    })
}

fn first_support(l: &[Gen]) -> Option<usize> {
    l.windows(2).position(|p| !p[0].dagger && p[1].dagger)
}

fn one() -> Coeff {
    Coeff::one()
}

fn minus_one() -> Coeff {
    Coeff::int(-1)
}

fn z_step(w: &Word) -> Outcome {
    let l = w.letters();
    let n = l.len();
    if let Some(rule) = vanishing_pair(l) {
        return Outcome::Replace(rule, vec![]);
    }
    if let Some(k) = first_support(l) {
        if n == 2 {
            return Outcome::Normal;
        }
        let i = l[k].index;
        if k + 2 < n {
            let y = l[k + 2];
            let j = y.index;
            if y.dagger {
                let out = if i >= j {
                    vec![(splice(l, k, k + 3, &[Gen::c(j)]), one())]
                } else {
                    vec![]
                };
                return Outcome::Replace("support-creator", out);
            }
            let mut out = vec![(splice(l, k, k + 3, &[Gen::a(j)]), one())];
            for m in i + 1..=j {
                out.push((
                    splice(l, k, k + 3, &[Gen::c(m), Gen::a(m), Gen::a(j)]),
                    minus_one(),
                ));
            }
            return Outcome::Replace("support-annihilator", out);
        }
        let x = l[k - 1];
        let p = x.index;
        if !x.dagger {
            let out = if i >= p {
                vec![(splice(l, k - 1, k + 2, &[Gen::a(p)]), one())]
            } else {
                vec![]
            };
            return Outcome::Replace("annihilator-support", out);
        }
        let mut out = vec![(splice(l, k - 1, k + 2, &[Gen::c(p)]), one())];
        for m in i + 1..=p {
            out.push((
                splice(l, k - 1, k + 2, &[Gen::c(p), Gen::c(m), Gen::a(m)]),
                minus_one(),
            ));
        }
        return Outcome::Replace("creator-support", out);
    }
    if n == 2 && l[0].dagger && !l[1].dagger && l[0].index == l[1].index {
        let i = l[0].index;
        return Outcome::Replace(
            "range-pair",
            vec![
                (Word(vec![Gen::a(i), Gen::c(i)]), one()),
                (Word(vec![Gen::a(i - 1), Gen::c(i - 1)]), minus_one()),
            ],
        );
    }
    Outcome::Normal
}

fn n_step(w: &Word) -> Outcome {
    let l = w.letters();
    let n = l.len();
    if let Some(rule) = vanishing_pair(l) {
        return Outcome::Replace(rule, vec![]);
    }
    let Some(k) = first_support(l) else {
        return path_completion(l);
    };
    let i = l[k].index;
    if k + 2 < n {
        let y = l[k + 2];
        let j = y.index;
        if y.dagger {
            let out = if i >= j {
                vec![(splice(l, k, k + 3, &[Gen::c(j)]), one())]
            } else {
                vec![]
            };
            return Outcome::Replace("support-creator", out);
        }
        let out = (0..=i.min(j))
            .map(|m| (splice(l, k, k + 2, &[Gen::c(m), Gen::a(m)]), one()))
            .collect();
        return Outcome::Replace("support-expansion", out);
    }
    if k == 0 {
        let out = (0..=i)
            .map(|m| (Word(vec![Gen::c(m), Gen::a(m)]), one()))
            .collect();
        return Outcome::Replace("support-expansion", out);
    }
    let x = l[k - 1];
    let p = x.index;
    if !x.dagger {
        let out = if i >= p {
            vec![(splice(l, k - 1, k + 2, &[Gen::a(p)]), one())]
        } else {
            vec![]
        };
        return Outcome::Replace("annihilator-support", out);
    }
    if i >= p {
        return Outcome::Replace(
            "creator-support",
            vec![(splice(l, k - 1, k + 2, &[Gen::c(p)]), one())],
        );
    }
    let out = (0..=i)
        .map(|m| {
            (
                splice(l, k - 1, k + 2, &[Gen::c(p), Gen::c(m), Gen::a(m)]),
                one(),
            )
        })
        .collect();
    Outcome::Replace("creator-support", out)
}

/// `s_μ s_ν* = Σ_{k ≤ m} s_μ s_k s_k* s_ν*` with `m` the smaller of the last
/// indices of `μ` and `ν`: the `k = m` term at the junction of a word is
/// traded for the shorter word, which keeps normal forms unique.
fn path_completion(l: &[Gen]) -> Outcome {
    let p = l.iter().position(|g| !g.dagger).unwrap_or(l.len());
    if p == 0 || p == l.len() || l[p - 1].index != l[p].index {
        return Outcome::Normal;
    }
    let before = (p >= 2).then(|| l[p - 2].index);
    let after = l.get(p + 1).map(|g| g.index);
    let m = match (before, after) {
        (Some(b), Some(a)) => b.min(a),
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => return Outcome::Normal,
    };
    if l[p].index != m {
        return Outcome::Normal;
    }
    let mut out = vec![(splice(l, p - 1, p + 1, &[]), one())];
    for k in 0..m {
        out.push((
            splice(l, p - 1, p + 1, &[Gen::c(k), Gen::a(k)]),
            minus_one(),
        ));
    }
    Outcome::Replace("path-completion", out)
}

/// Step budget for an element: `4^l (hi - lo + 2)^l` summed over words, capped at [`MAX_FUEL`].
pub fn default_fuel(x: &Element) -> u64 {
    let (lo, hi) = (x.min_index().unwrap_or(0), x.max_index().unwrap_or(0));
    let base = 4u64.saturating_mul((hi - lo + 2) as u64);
    x.terms()
        .map(|(w, _)| base.saturating_pow(w.len() as u32))
        .fold(1u64, u64::saturating_add)
        .min(MAX_FUEL)
}

struct Rewrite {
    unit: Coeff,
    words: BTreeMap<Word, Coeff>,
    steps: Vec<Step>,
}

fn add_into(map: &mut BTreeMap<Word, Coeff>, w: Word, c: Coeff) {
    use std::collections::btree_map::Entry;
    match map.entry(w) {
        Entry::Occupied(mut e) => {
            let v = e.get() + &c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
    }
}

fn render(terms: &[(Word, Coeff)], case: Case) -> String {
    let mut e = Element::zero(case);
    for (w, c) in terms {
        e.add_term(w.clone(), c.clone());
    }
    e.to_string()
}

fn run(
    x: &Element,
    step: fn(&Word) -> Outcome,
    fuel: u64,
    trace: bool,
) -> Result<Rewrite, RewriteError> {
    let mut pending: BTreeMap<Word, Coeff> = x.term_map().clone();
    let mut done: BTreeMap<Word, Coeff> = BTreeMap::new();
    let mut unit = x.unit_coeff().clone();
    let mut steps = Vec::new();
    let mut used = 0u64;
    // longest words first, so that like terms merge before they are expanded
    while let Some((w, c)) = pending.pop_last() {
        match step(&w) {
            Outcome::Normal => add_into(&mut done, w, c),
            Outcome::Replace(rule, out) => {
                used += 1;
                if used > fuel {
                    return Err(RewriteError::FuelExhausted(fuel));
                }
                if trace && steps.len() < MAX_TRACE {
                    steps.push(Step {
                        rule,
                        before: w.to_string(),
                        after: render(&out, x.case()),
                    });
                }
                for (w2, c2) in out {
                    let v = &c * &c2;
                    if w2.is_empty() {
                        unit = &unit + &v;
                    } else {
                        add_into(&mut pending, w2, v);
                    }
                }
            }
        }
    }
    Ok(Rewrite {
        unit,
        words: done,
        steps,
    })
}

fn check_case(x: &Element, expected: Case) -> Result<(), RewriteError> {
    if x.case() == expected {
        Ok(())
    } else {
        Err(RewriteError::WrongCase {
            expected,
            got: x.case(),
        })
    }
}

/// Canonical decomposition in the `Z` case.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NormalFormZ {
    pub unit: Coeff,
    /// Creator block then annihilator block, never a bare `c(i)a(i)`.
    pub lambda: BTreeMap<Word, Coeff>,
    /// Coefficient of `a(i)c(i)`.
    pub pairs: BTreeMap<i32, Coeff>,
}

impl NormalFormZ {
    pub fn to_element(&self) -> Element {
        let mut e = Element::unit(Case::Z, self.unit.clone());
        for (w, c) in &self.lambda {
            e.add_term(w.clone(), c.clone());
        }
        for (i, c) in &self.pairs {
            e.add_term(Word(vec![Gen::a(*i), Gen::c(*i)]), c.clone());
        }
        e
    }

    pub fn is_exact(&self) -> bool {
        self.unit.is_exact()
            && self.lambda.values().all(Coeff::is_exact)
            && self.pairs.values().all(Coeff::is_exact)
    }

    /// Sum of the pair coefficients.
    pub fn pair_sum(&self) -> Coeff {
        self.pairs.values().fold(Coeff::zero(), |a, c| &a + c)
    }

    /// Coefficient-wise agreement: exact equality, or `1e-12` per coefficient
    /// when either side is inexact.
    pub fn agrees_with(&self, other: &NormalFormZ) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        self.to_element().max_coeff_diff(&other.to_element()) <= FLOAT_TOL
    }
}

impl fmt::Display for NormalFormZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_element())
    }
}

pub fn normalize_z(x: &Element) -> Result<NormalFormZ, RewriteError> {
    normalize_z_traced(x, default_fuel(x), false).map(|(nf, _)| nf)
}

/// Normalizes with an explicit budget, optionally recording every step.
pub fn normalize_z_traced(
    x: &Element,
    fuel: u64,
    trace: bool,
) -> Result<(NormalFormZ, Vec<Step>), RewriteError> {
    check_case(x, Case::Z)?;
    let r = run(x, z_step, fuel, trace)?;
    let mut nf = NormalFormZ {
        unit: r.unit,
        ..Default::default()
    };
    for (w, c) in r.words {
        match classify_word(&w) {
            WordClass::Pair(i) => {
                nf.pairs.insert(i, c);
            }
            WordClass::Lambda => {
                nf.lambda.insert(w, c);
            }
            other => {
                return Err(RewriteError::Inconsistent(format!(
                    "irreducible word {w} classified as {other:?}"
                )))
            }
        }
    }
    Ok((nf, r.steps))
}

pub fn equal_z(x: &Element, y: &Element) -> Result<bool, RewriteError> {
    Ok(normalize_z(x)?.agrees_with(&normalize_z(y)?))
}

/// Shape of a `Z`-case word relative to the normal-form basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WordClass {
    Lambda,
    Pair(i32),
    Support(i32),
    NotNormal,
}

pub fn classify_word(w: &Word) -> WordClass {
    let l = w.letters();
    if l.len() == 2 && l[0].index == l[1].index {
        if !l[0].dagger && l[1].dagger {
            return WordClass::Pair(l[0].index);
        }
        if l[0].dagger && !l[1].dagger {
            return WordClass::Support(l[0].index);
        }
    }
    if l.is_empty() {
        return WordClass::NotNormal;
    }
    let split = l.iter().position(|g| !g.dagger).unwrap_or(l.len());
    let (cs, as_) = l.split_at(split);
    let ok = as_.iter().all(|g| !g.dagger)
        && cs.windows(2).all(|p| p[0].index >= p[1].index)
        && as_.windows(2).all(|p| p[0].index <= p[1].index);
    if ok {
        WordClass::Lambda
    } else {
        WordClass::NotNormal
    }
}

/// Canonical decomposition in the `N` case: `s_μ s_ν*` keyed by `(μ, ν)`, both non-increasing.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NormalFormN {
    pub unit: Coeff,
    pub paths: BTreeMap<(Vec<i32>, Vec<i32>), Coeff>,
}

impl NormalFormN {
    pub fn word_of(mu: &[i32], nu: &[i32]) -> Word {
        let mut v: Vec<Gen> = mu.iter().map(|&i| Gen::c(i)).collect();
        v.extend(nu.iter().rev().map(|&i| Gen::a(i)));
        Word(v)
    }

    pub fn to_element(&self) -> Element {
        let mut e = Element::unit(Case::N, self.unit.clone());
        for ((mu, nu), c) in &self.paths {
            e.add_term(Self::word_of(mu, nu), c.clone());
        }
        e
    }

    pub fn is_exact(&self) -> bool {
        self.unit.is_exact() && self.paths.values().all(Coeff::is_exact)
    }

    pub fn agrees_with(&self, other: &NormalFormN) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        self.to_element().max_coeff_diff(&other.to_element()) <= FLOAT_TOL
    }
}

impl fmt::Display for NormalFormN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_element())
    }
}

pub fn normalize_n(x: &Element) -> Result<NormalFormN, RewriteError> {
    normalize_n_traced(x, default_fuel(x), false).map(|(nf, _)| nf)
}

pub fn normalize_n_traced(
    x: &Element,
    fuel: u64,
    trace: bool,
) -> Result<(NormalFormN, Vec<Step>), RewriteError> {
    check_case(x, Case::N)?;
    let r = run(x, n_step, fuel, trace)?;
    let mut nf = NormalFormN {
        unit: r.unit,
        ..Default::default()
    };
    for (w, c) in r.words {
        let l = w.letters();
        let split = l.iter().position(|g| !g.dagger).unwrap_or(l.len());
        if l[split..].iter().any(|g| g.dagger) {
            return Err(RewriteError::Inconsistent(format!(
                "irreducible word {w} is not of the form s_μ s_ν*"
            )));
        }
        let mu = l[..split].iter().map(|g| g.index).collect();
        let nu = l[split..].iter().rev().map(|g| g.index).collect();
        nf.paths.insert((mu, nu), c);
    }
    Ok((nf, r.steps))
}

/// Compares normal forms and confirms the verdict by evaluating `x - y` in the
/// Fock representation with a formal gauge variable.
pub fn equal_n(x: &Element, y: &Element) -> Result<bool, RewriteError> {
    check_case(x, Case::N)?;
    check_case(y, Case::N)?;
    let same = normalize_n(x)?.agrees_with(&normalize_n(y)?);
    let diff = x - y;
    let d = diff.max_index().unwrap_or(0) + 1;
    let len = x.max_len().max(y.max_len());
    let rise = diff.max_rise();
    let space = TruncSpace::n(d, len + rise + 1)?;
    let cols = space.interior_columns(rise, 0);
    let m = evaluate_gauge_columns(&space, &diff, 0, &cols)?;
    let vanishes = if diff.is_exact() {
        m.is_zero()
    } else {
        m.max_magnitude() <= FLOAT_TOL
    };
    if same != vanishes {
        return Err(RewriteError::Inconsistent(format!(
            "normal forms {} but evaluations on {} {}",
            if same { "agree" } else { "differ" },
            space.describe(),
            if vanishes { "agree" } else { "differ" },
        )));
    }
    Ok(same)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn z(s: &str) -> Element {
        parse(s, Case::Z).unwrap()
    }

    fn n(s: &str) -> Element {
        parse(s, Case::N).unwrap()
    }

    fn nz(s: &str) -> Element {
        normalize_z(&z(s)).unwrap().to_element()
    }

    #[test]
    fn n_equality_needs_a_spare_index() {
        assert!(!equal_n(&n("3*I"), &n("2*I + a(1)c(1)")).unwrap());
        assert!(equal_n(&n("a(1)c(1)"), &n("c(0)a(0) + c(1)a(1)")).unwrap());
    }

    #[test]
    fn z_examples() {
        assert!(nz("a(2)c(3)").is_zero());
        let nf = normalize_z(&z("c(1)a(1)")).unwrap();
        assert_eq!(
            nf.pairs,
            BTreeMap::from([(0, Coeff::int(-1)), (1, Coeff::one())])
        );
        assert!(nf.lambda.is_empty() && nf.unit.is_zero());
        assert_eq!(nz("a(2)c(2)c(0)"), z("c(0)"));
        assert!(nz("a(0)c(0)c(2)").is_zero());
        assert_eq!(nz("a(0)c(0)a(2)"), z("a(2) - c(1)a(1)a(2) - c(2)a(2)a(2)"));
    }

    #[test]
    fn z_equalities() {
        assert!(equal_z(&z("c(1)a(1)"), &z("c(1)a(1)")).unwrap());
        assert!(equal_z(&z("q(1)"), &z("a(1)c(1)")).unwrap());
        assert!(!equal_z(&z("c(1)a(1)"), &z("a(1)c(1)")).unwrap());
        assert!(equal_z(&z("a(0)c(0)a(2)"), &z("a(2) - c(1)a(1)a(2) - c(2)a(2)a(2)")).unwrap());
    }

    #[test]
    fn classify_examples() {
        let w = Word(vec![Gen::c(3), Gen::c(1), Gen::a(0), Gen::a(2)]);
        assert_eq!(classify_word(&w), WordClass::Lambda);
        assert_eq!(
            classify_word(&Word(vec![Gen::a(5), Gen::c(5)])),
            WordClass::Pair(5)
        );
        assert_eq!(
            classify_word(&Word(vec![Gen::c(5), Gen::a(5)])),
            WordClass::Support(5)
        );
        assert_eq!(
            classify_word(&Word(vec![Gen::a(1), Gen::c(2)])),
            WordClass::NotNormal
        );
        assert_eq!(classify_word(&Word::empty()), WordClass::NotNormal);
    }

    #[test]
    fn n_examples() {
        let nf = normalize_n(&n("q(1)")).unwrap();
        assert_eq!(nf.to_element(), n("c(0)a(0) + c(1)a(1)"));
        assert!(normalize_n(&n("c(0)c(1)")).unwrap().to_element().is_zero());
        assert_eq!(
            normalize_n(&n("a(2)c(2)c(1)")).unwrap().to_element(),
            n("c(1)")
        );
    }

    #[test]
    fn n_equalities() {
        assert!(equal_n(&n("q(1)"), &n("p(0)+p(1)")).unwrap());
        let x = n("c(2)a(1) - 3*a(0)c(0)c(0)");
        assert!(equal_n(&x, &x).unwrap());
        assert!(equal_n(&n("c(1)a(1)c(1)"), &n("c(1)")).unwrap());
        assert!(equal_n(&n("c(0)c(0)a(0)"), &n("c(0)")).unwrap());
        assert!(!equal_n(&n("c(1)"), &n("c(2)")).unwrap());
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let x = z("a(0)c(0)a(3)");
        assert!(matches!(
            normalize_z_traced(&x, 0, false),
            Err(RewriteError::FuelExhausted(0))
        ));
    }

    #[test]
    fn trace_lists_rules() {
        let (_, steps) = normalize_z_traced(&z("c(1)a(1)"), 100, true).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].rule, "range-pair");
        assert_eq!(
            steps[0].to_string(),
            "range-pair: c(1)a(1) -> -a(0)c(0) + a(1)c(1)"
        );
    }

    #[test]
    fn wrong_case_is_rejected() {
        assert!(matches!(
            normalize_z(&n("c(1)")),
            Err(RewriteError::WrongCase { .. })
        ));
    }
}
