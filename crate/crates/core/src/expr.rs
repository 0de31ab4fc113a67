//! Generator words, formal algebra elements and the text grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := scalar? factor+ | scalar
//! factor := atom "'"*
//! atom   := 'I' | gen '(' int ')' | '(' expr ')'
//! gen    := 'a' | 'c' | 'p' | 'q' | 'x'
//! scalar := (number | '(' number ('+'|'-') number 'i' ')') '*'?
//! ```
//!
//! `c(i)` is the creator (abstract generator `s_i`), `a(i)` its adjoint,
//! `x(i) = a(i)+c(i)`, `p(i) = c(i)a(i)`, `q(i) = a(i)c(i)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Coeff, GaussRat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    Z,
    N,
    Anti,
}

impl Case {
    pub fn allows(self, index: i32) -> bool {
        match self {
            Case::Z => true,
            Case::N | Case::Anti => index >= 0,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Z => "z",
            Case::N => "n",
            Case::Anti => "anti",
        })
    }
}

impl std::str::FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Case::Z),
            "n" => Ok(Case::N),
            "anti" => Ok(Case::Anti),
            _ => Err(format!("unknown case `{s}` (expected z, n or anti)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("index {index} at {pos} is not allowed in the {case} case")]
    IndexDomain { pos: usize, index: i64, case: Case },
    #[error("adjoint at {pos} applied to nothing")]
    DanglingAdjoint { pos: usize },
    #[error("case mismatch: {0} vs {1}")]
    CaseMismatch(Case, Case),
    #[error("shift by {shift} takes index {index} below zero")]
    IndexUnderflow { index: i32, shift: i32 },
}

/// One letter: `dagger = true` is the creator `c(i)`, `false` the annihilator `a(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub index: i32,
    pub dagger: bool,
}

impl Gen {
    pub fn c(index: i32) -> Self {
        Gen {
            index,
            dagger: true,
        }
    }

    pub fn a(index: i32) -> Self {
        Gen {
            index,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Gen {
            index: self.index,
            dagger: !self.dagger,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", if self.dagger { 'c' } else { 'a' }, self.index)
    }
}

/// Product of generators, leftmost letter acting last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Gen>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.adjoint()).collect())
    }

    pub fn shifted(&self, m: i32) -> Word {
        Word(
            self.0
                .iter()
                .map(|g| Gen {
                    index: g.index + m,
                    dagger: g.dagger,
                })
                .collect(),
        )
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn min_index(&self) -> Option<i32> {
        self.0.iter().map(|g| g.index).min()
    }

    pub fn max_index(&self) -> Option<i32> {
        self.0.iter().map(|g| g.index).max()
    }

    /// Largest particle-number increase reached while the word acts on a vector
    /// (letters applied right to left).
    pub fn rise(&self) -> usize {
        let mut level: i64 = 0;
        let mut peak: i64 = 0;
        for g in self.0.iter().rev() {
            level += if g.dagger { 1 } else { -1 };
            peak = peak.max(level);
        }
        peak as usize
    }

    /// Net particle-number change.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|g| if g.dagger { 1 } else { -1 }).sum()
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for g in &self.0 {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl From<Vec<Gen>> for Word {
    fn from(v: Vec<Gen>) -> Self {
        Word(v)
    }
}

/// Finite linear combination of words plus a unit coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    case: Case,
    unit: Coeff,
    terms: BTreeMap<Word, Coeff>,
}

impl Element {
    pub fn zero(case: Case) -> Self {
        Element {
            case,
            unit: Coeff::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(case: Case, c: Coeff) -> Self {
        Element {
            case,
            unit: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(case: Case) -> Self {
        Element::unit(case, Coeff::one())
    }

    pub fn word(case: Case, w: Word, c: Coeff) -> Self {
        let mut e = Element::zero(case);
        e.add_term(w, c);
        e
    }

    pub fn gen(case: Case, index: i32, dagger: bool) -> Self {
        Element::word(case, Word(vec![Gen { index, dagger }]), Coeff::one())
    }

    pub fn c(case: Case, index: i32) -> Self {
        Element::gen(case, index, true)
    }

    pub fn a(case: Case, index: i32) -> Self {
        Element::gen(case, index, false)
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn unit_coeff(&self) -> &Coeff {
        &self.unit
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<Word, Coeff> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        if w.is_empty() {
            return self.unit.clone();
        }
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.unit.is_exact() && self.terms.values().all(Coeff::is_exact)
    }

    /// Adds `c·w`; the empty word goes to the unit coefficient.
    pub fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        if w.is_empty() {
            self.unit = &self.unit + &c;
            return;
        }
        match self.terms.get_mut(&w) {
            Some(old) => {
                let v = &*old + &c;
                if v.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *old = v;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn set_unit(&mut self, c: Coeff) {
        self.unit = c;
    }

    pub fn scale(&self, c: &Coeff) -> Element {
        let mut out = Element::unit(self.case, &self.unit * c);
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    pub fn adjoint(&self) -> Element {
        let mut out = Element::unit(self.case, self.unit.conj());
        for (w, x) in &self.terms {
            out.add_term(w.adjoint(), x.conj());
        }
        out
    }

    /// Adds `m` to every index.
    pub fn shift(&self, m: i32) -> Result<Element, ExprError> {
        if self.case != Case::Z {
            if let Some(lo) = self.min_index() {
                if lo + m < 0 {
                    return Err(ExprError::IndexUnderflow {
                        index: lo,
                        shift: m,
                    });
                }
            }
        }
        let mut out = Element::unit(self.case, self.unit.clone());
        for (w, x) in &self.terms {
            out.add_term(w.shifted(m), x.clone());
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Element) -> Result<Element, ExprError> {
        self.check_case(other)?;
        let mut out = self.clone();
        out.unit = &out.unit + &other.unit;
        for (w, x) in &other.terms {
            out.add_term(w.clone(), x.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element, ExprError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element, ExprError> {
        self.check_case(other)?;
        let mut out = Element::unit(self.case, &self.unit * &other.unit);
        if !self.unit.is_zero() {
            for (w, x) in &other.terms {
                out.add_term(w.clone(), &self.unit * x);
            }
        }
        for (u, x) in &self.terms {
            if !other.unit.is_zero() {
                out.add_term(u.clone(), x * &other.unit);
            }
            for (v, y) in &other.terms {
                out.add_term(u.concat(v), x * y);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut acc = Element::identity(self.case);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_case(&self, other: &Element) -> Result<(), ExprError> {
        if self.case == other.case {
            Ok(())
        } else {
            Err(ExprError::CaseMismatch(self.case, other.case))
        }
    }

    pub fn min_index(&self) -> Option<i32> {
        self.terms.keys().filter_map(Word::min_index).min()
    }

    pub fn max_index(&self) -> Option<i32> {
        self.terms.keys().filter_map(Word::max_index).max()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn max_rise(&self) -> usize {
        self.terms.keys().map(Word::rise).max().unwrap_or(0)
    }

    /// Same element with the case tag replaced (indices must be admissible).
    pub fn with_case(&self, case: Case) -> Result<Element, ExprError> {
        if let Some(lo) = self.min_index() {
            if !case.allows(lo) {
                return Err(ExprError::IndexDomain {
                    pos: 0,
                    index: lo as i64,
                    case,
                });
            }
        }
        Ok(Element {
            case,
            unit: self.unit.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Largest coefficient difference against `other` (0 when identical).
    pub fn max_coeff_diff(&self, other: &Element) -> f64 {
        let d = self - other;
        d.terms
            .values()
            .map(Coeff::abs)
            .fold(d.unit.abs(), f64::max)
    }
}

macro_rules! element_ops {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr<&'a Element> for &'a Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                self.$f(rhs).expect("case mismatch")
            }
        }
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                self.$f(&rhs).expect("case mismatch")
            }
        }
    };
}

element_ops!(Add, add, try_add);
element_ops!(Sub, sub, try_sub);
element_ops!(Mul, mul, try_mul);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Coeff::int(-1))
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// Sign-aware rendering of a coefficient in front of a term.
fn split_sign(c: &Coeff) -> (bool, Coeff) {
    match c {
        Coeff::Exact(g) if g.is_real() && g.re.is_negative() => (true, -c),
        Coeff::Float(z) if z.im == 0.0 && z.re < 0.0 => (true, -c),
        _ => (false, c.clone()),
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let unit = (!self.unit.is_zero()).then(|| (Word::empty(), self.unit.clone()));
        let all = unit
            .into_iter()
            .chain(self.terms.iter().map(|(w, c)| (w.clone(), c.clone())));
        for (n, (w, c)) in all.enumerate() {
            let (neg, mag) = split_sign(&c);
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag.is_one() && mag.is_exact() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Parses `text` as an element of the given case.
pub fn parse(text: &str, case: Case) -> Result<Element, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        case,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl Element {
    pub fn parse(text: &str, case: Case) -> Result<Element, ExprError> {
        parse(text, case)
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    case: Case,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ExprError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Element, ExprError> {
        let mut acc = Element::zero(self.case);
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(
            self.peek(),
            Some(b'I' | b'a' | b'c' | b'p' | b'q' | b'x' | b'(')
        )
    }

    fn term(&mut self) -> Result<Element, ExprError> {
        if self.peek() == Some(b'\'') {
            return Err(ExprError::DanglingAdjoint { pos: self.pos });
        }
        let scalar = self.scalar()?;
        if scalar.is_some() {
            self.eat(b'*');
        }
        let mut acc: Option<Element> = None;
        while self.starts_factor() {
            let f = self.factor()?;
            acc = Some(match acc {
                Some(a) => &a * &f,
                None => f,
            });
            self.eat(b'*');
        }
        match (scalar, acc) {
            (Some(s), Some(a)) => Ok(a.scale(&s)),
            (Some(s), None) => Ok(Element::unit(self.case, s)),
            (None, Some(a)) => Ok(a),
            (None, None) => {
                if self.peek() == Some(b'\'') {
                    Err(ExprError::DanglingAdjoint { pos: self.pos })
                } else {
                    Err(self.err("expected a term"))
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Element, ExprError> {
        let mut e = self.atom()?;
        while self.eat(b'\'') {
            e = e.adjoint();
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Element, ExprError> {
        let case = self.case;
        match self.peek() {
            Some(b'I') => {
                self.pos += 1;
                Ok(Element::identity(case))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(g @ (b'a' | b'c' | b'p' | b'q' | b'x')) => {
                self.pos += 1;
                self.expect(b'(')?;
                self.skip_ws();
                let at = self.pos;
                let i = self.integer()?;
                self.expect(b')')?;
                let index = i32::try_from(i).ok().filter(|&v| case.allows(v)).ok_or(
                    ExprError::IndexDomain {
                        pos: at,
                        index: i,
                        case,
                    },
                )?;
                let c = Element::c(case, index);
                let a = Element::a(case, index);
                Ok(match g {
                    b'c' => c,
                    b'a' => a,
                    b'x' => &a + &c,
                    b'p' => &c * &a,
                    _ => &a * &c,
                })
            }
            _ => Err(self.err("expected `I`, a generator or `(`")),
        }
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        s.parse::<i64>().map_err(|_| ExprError::Syntax {
            pos: start,
            msg: "expected an integer".into(),
        })
    }

    /// Raw number token: digits with optional `.`, `/q` or exponent. Does not
    /// consume a sign.
    fn number_token(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return None;
        }
        if p < s.len() && s[p] == b'/' {
            let mut q = p + 1;
            if digits(&mut q) {
                p = q;
            }
        } else if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        std::str::from_utf8(&s[start..p]).ok()
    }

    fn real(&mut self, text: &str) -> Result<Scal, ExprError> {
        if text.contains(['e', 'E']) {
            let v: f64 = text.parse().map_err(|_| self.err("bad float literal"))?;
            Ok(Scal::F(v))
        } else {
            let r: Rational = text.parse().map_err(|_| self.err("bad number literal"))?;
            Ok(Scal::R(r))
        }
    }

    fn scalar(&mut self) -> Result<Option<Coeff>, ExprError> {
        let save = self.pos;
        if let Some(t) = self.number_token() {
            let t = t.to_string();
            return Ok(Some(self.real(&t)?.into_coeff(Scal::R(Rational::zero()))));
        }
        self.pos = save;
        if self.peek() != Some(b'(') {
            return Ok(None);
        }
        // `(re+imi)`: backtrack to a parenthesised expression if it is not one
        self.pos += 1;
        let re_neg = self.eat(b'-');
        if !re_neg {
            self.eat(b'+');
        }
        let Some(re) = self.number_token().map(str::to_string) else {
            self.pos = save;
            return Ok(None);
        };
        let sign = match self.peek() {
            Some(b'+') => 1,
            Some(b'-') => -1,
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        self.pos += 1;
        let Some(im) = self.number_token().map(str::to_string) else {
            self.pos = save;
            return Ok(None);
        };
        if !self.eat(b'i') || !self.eat(b')') {
            self.pos = save;
            return Ok(None);
        }
        let mut re = self.real(&re)?;
        let mut im = self.real(&im)?;
        if re_neg {
            re = re.neg();
        }
        if sign < 0 {
            im = im.neg();
        }
        Ok(Some(re.into_coeff(im)))
    }
}

enum Scal {
    R(Rational),
    F(f64),
}

impl Scal {
    fn neg(self) -> Scal {
        match self {
            Scal::R(r) => Scal::R(-r),
            Scal::F(f) => Scal::F(-f),
        }
    }

    fn to_f64(&self) -> f64 {
        match self {
            Scal::R(r) => r.to_f64(),
            Scal::F(f) => *f,
        }
    }

    fn into_coeff(self, im: Scal) -> Coeff {
        match (self, im) {
            (Scal::R(re), Scal::R(im)) => Coeff::Exact(GaussRat::new(re, im)),
            (re, im) => Coeff::Float(Complex64::new(re.to_f64(), im.to_f64())),
        }
    }
}
