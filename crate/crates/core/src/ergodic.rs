//! Shift dynamics in the `Z` case: Cesàro averages and their norm decay, the
//! invariant states `ω_t`, fixed points, and the vacuum-distance certificate.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Case, Element, ExprError, Word};
use crate::fock::{
    apply_to_tuple, build_generator, evaluate_columns, operator_norm, FockError, NormEstimate,
    TruncSpace,
};
use crate::rewrite::{classify_word, normalize_z, RewriteError, WordClass};
use crate::scalar::{Coeff, Rational, FLOAT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErgodicError {
    #[error("expected a {expected} element, got {got}")]
    WrongCase { expected: Case, got: Case },
    #[error("averaging length must be at least 1")]
    EmptyAverage,
    #[error("{0} is not a creator block followed by an annihilator block")]
    NotLambda(String),
    #[error("window [{have_lo}, {have_hi}] does not contain [{need_lo}, {need_hi}]")]
    WindowTooSmall {
        need_lo: i32,
        need_hi: i32,
        have_lo: i32,
        have_hi: i32,
    },
    #[error("need at least {need} particles, the space has {have}")]
    TooFewParticles { need: usize, have: usize },
    #[error("state parameter {0} outside [0, 1]")]
    ParamRange(String),
    #[error("vectors are not supported in a single non-top particle level")]
    LevelMismatch,
    #[error("vector length {got} does not match the space dimension {dim}")]
    DimensionMismatch { got: usize, dim: usize },
    #[error("the element has a nonzero unit coefficient")]
    NonUnital,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn require_case(x: &Element, case: Case) -> Result<(), ErgodicError> {
    if x.case() != case {
        return Err(ErgodicError::WrongCase {
            expected: case,
            got: x.case(),
        });
    }
    Ok(())
}

fn require_window(space: &TruncSpace, lo: i32, hi: i32) -> Result<(), ErgodicError> {
    let (have_lo, have_hi) = space.window();
    if lo < have_lo || hi > have_hi {
        return Err(ErgodicError::WindowTooSmall {
            need_lo: lo,
            need_hi: hi,
            have_lo,
            have_hi,
        });
    }
    Ok(())
}

/// Space used only to resolve indices for untruncated actions on tuples.
fn index_space(case: Case, lo: i32, hi: i32) -> Result<TruncSpace, FockError> {
    TruncSpace::new(case, lo, hi.max(lo), 0)
}

fn sq_norm<'a>(v: impl IntoIterator<Item = &'a Coeff>) -> Coeff {
    v.into_iter()
        .fold(Coeff::zero(), |acc, c| &acc + &c.norm_sqr())
}

/// Real part comparison, exact when both sides are exact.
fn cmp_real(a: &Coeff, b: &Coeff) -> Ordering {
    match (a.exact_real(), b.exact_real()) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => a
            .to_c64()
            .re
            .partial_cmp(&b.to_c64().re)
            .unwrap_or(Ordering::Equal),
    }
}

fn le(a: &Coeff, b: &Coeff) -> bool {
    match (a.exact_real(), b.exact_real()) {
        (Some(x), Some(y)) => x <= y,
        _ => a.to_c64().re <= b.to_c64().re + FLOAT_TOL,
    }
}

/// `(1/n) Σ_{k<n} τ^k(x)`.
pub fn cesaro_average(x: &Element, n: usize) -> Result<Element, ErgodicError> {
    require_case(x, Case::Z)?;
    if n == 0 {
        return Err(ErgodicError::EmptyAverage);
    }
    let mut sum = Element::zero(Case::Z);
    for k in 0..n {
        sum = &sum + &x.shift(k as i32)?;
    }
    Ok(sum.scale(&Coeff::ratio(1, n as i64)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroReport {
    pub word: String,
    pub n: usize,
    pub norm: f64,
    pub column_lower_bound: f64,
    pub bound: f64,
    pub pass: bool,
    pub space: String,
    pub columns: usize,
}

/// Norm of the averaged word on the interior against `1/√n`. Without a space
/// the window is the smallest one holding every shift, with one spare particle.
pub fn check_cesaro_bound(
    y: &Word,
    n: usize,
    space: Option<&TruncSpace>,
) -> Result<CesaroReport, ErgodicError> {
    if classify_word(y) != WordClass::Lambda {
        return Err(ErgodicError::NotLambda(y.to_string()));
    }
    if n == 0 {
        return Err(ErgodicError::EmptyAverage);
    }
    let (lo, hi) = (
        y.min_index().unwrap_or(0),
        y.max_index().unwrap_or(0) + n as i32 - 1,
    );
    let owned;
    let space = match space {
        Some(s) => s,
        None => {
            owned = TruncSpace::z(lo, hi, y.len() + 1)?;
            &owned
        }
    };
    if space.case() != Case::Z {
        return Err(ErgodicError::WrongCase {
            expected: Case::Z,
            got: space.case(),
        });
    }
    require_window(space, lo, hi)?;
    if space.max_particles() < y.len() + 1 {
        return Err(ErgodicError::TooFewParticles {
            need: y.len() + 1,
            have: space.max_particles(),
        });
    }
    let avg = cesaro_average(&Element::word(Case::Z, y.clone(), Coeff::one()), n)?;
    let cols = space.interior_columns(y.rise(), 0);
    let m = evaluate_columns(space, &avg, &cols)?;
    let NormEstimate { lower, value } = operator_norm(&m, 1e-12)?;
    let bound = 1.0 / (n as f64).sqrt();
    Ok(CesaroReport {
        word: y.to_string(),
        n,
        norm: value,
        column_lower_bound: lower,
        bound,
        pass: value <= bound + 1e-9,
        space: space.describe(),
        columns: cols.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CreatorSumReport {
    pub n: usize,
    pub level: usize,
    /// `‖Σ_j A_j† η_j‖²`.
    pub lhs: Coeff,
    /// `Σ_j ‖A_j† η_j‖²`.
    pub sum_of_squares: Coeff,
    /// `n · max_j ‖η_j‖²`.
    pub bound: Coeff,
    pub identity_holds: bool,
    pub pass: bool,
}

/// `‖Σ_{j=1}^n A_j† η_j‖² = Σ_j ‖A_j† η_j‖² ≤ n max_j ‖η_j‖²` for vectors in
/// one particle level below the top.
pub fn check_creator_sum_estimate(
    space: &TruncSpace,
    etas: &[Vec<Coeff>],
) -> Result<CreatorSumReport, ErgodicError> {
    let n = etas.len();
    if n == 0 {
        return Err(ErgodicError::EmptyAverage);
    }
    let dim = space.dim();
    let mut level = None;
    for eta in etas {
        if eta.len() != dim {
            return Err(ErgodicError::DimensionMismatch {
                got: eta.len(),
                dim,
            });
        }
        for (pos, c) in eta.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = space.level_of(pos);
            if *level.get_or_insert(k) != k {
                return Err(ErgodicError::LevelMismatch);
            }
        }
    }
    let level = level.unwrap_or(0);
    if level >= space.max_particles() {
        return Err(ErgodicError::LevelMismatch);
    }
    let mut total = vec![Coeff::zero(); dim];
    let mut sum_of_squares = Coeff::zero();
    let mut max_eta = Coeff::zero();
    for (j, eta) in etas.iter().enumerate() {
        let a = build_generator(space, j as i32 + 1, true)?;
        let v = a.mul_vec(eta);
        sum_of_squares = &sum_of_squares + &sq_norm(&v);
        for (t, x) in total.iter_mut().zip(&v) {
            *t = &*t + x;
        }
        let e = sq_norm(eta);
        if cmp_real(&e, &max_eta) == Ordering::Greater {
            max_eta = e;
        }
    }
    let lhs = sq_norm(&total);
    let bound = &Coeff::int(n as i64) * &max_eta;
    let identity_holds = if lhs.is_exact() && sum_of_squares.is_exact() {
        lhs == sum_of_squares
    } else {
        (&lhs - &sum_of_squares).abs() <= FLOAT_TOL
    };
    let pass = identity_holds && le(&lhs, &bound);
    Ok(CreatorSumReport {
        n,
        level,
        lhs,
        sum_of_squares,
        bound,
        identity_holds,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NonconvergenceReport {
    pub n: usize,
    /// `‖D e_{-n}‖`, exact.
    pub lower_bound: Rational,
    /// Norm of `D` on the interior, exact when `D` is diagonal there.
    pub norm: f64,
    pub exact_norm: Option<Rational>,
    pub pass: bool,
    pub space: String,
    /// `P_Ω` enters as an explicit rank-one matrix.
    pub vacuum_projection: &'static str,
}

/// `(1/n) Σ_{k<n} A_{-k} A_{-k}†` as an element.
fn negative_pair_average(n: usize) -> Element {
    let mut sum = Element::zero(Case::Z);
    for k in 0..n as i32 {
        sum = &sum + &(&Element::a(Case::Z, -k) * &Element::c(Case::Z, -k));
    }
    sum.scale(&Coeff::ratio(1, n as i64))
}

/// `D = P_Ω − (1/n) Σ_{k<n} A_{-k} A_{-k}†` does not tend to zero in norm:
/// `‖D e_{-n}‖ = 1` and `‖D‖ = 1`. The default space is window `[-n, 0]`
/// with two particles, the least that keeps the pairs exact on `e_{-n}`.
pub fn check_nonconvergence(
    space: Option<&TruncSpace>,
    n: usize,
) -> Result<NonconvergenceReport, ErgodicError> {
    if n == 0 {
        return Err(ErgodicError::EmptyAverage);
    }
    let owned;
    let space = match space {
        Some(s) => s,
        None => {
            owned = TruncSpace::z(-(n as i32), 0, 2)?;
            &owned
        }
    };
    if space.case() != Case::Z {
        return Err(ErgodicError::WrongCase {
            expected: Case::Z,
            got: space.case(),
        });
    }
    require_window(space, -(n as i32), 0)?;
    if space.max_particles() < 2 {
        return Err(ErgodicError::TooFewParticles {
            need: 2,
            have: space.max_particles(),
        });
    }
    let cols = space.interior_columns(1, 0);
    let avg = evaluate_columns(space, &negative_pair_average(n), &cols)?;
    let mut diagonal = true;
    let mut max_abs = Rational::zero();
    let mut lower_bound = Rational::zero();
    let probe = space.rank(&[-(n as i32)]).expect("probe in window");
    for (ci, &pos) in cols.iter().enumerate() {
        let mut d = if pos == 0 {
            Coeff::one()
        } else {
            Coeff::zero()
        };
        for (r, v) in avg.column(ci) {
            if *r == pos {
                d = &d - v;
            } else if !v.is_zero() {
                diagonal = false;
            }
        }
        let a = d
            .exact_real()
            .map(|r| r.abs())
            .unwrap_or_else(Rational::zero);
        if pos == probe {
            lower_bound = a.clone();
        }
        if a > max_abs {
            max_abs = a;
        }
    }
    let (norm, exact_norm) = if diagonal {
        (max_abs.to_f64(), Some(max_abs))
    } else {
        let p = crate::sparse::SparseMat::from_triplets(
            space.dim(),
            cols.len(),
            vec![(0, 0, Coeff::one())],
        );
        (operator_norm(&p.sub(&avg), 1e-12)?.value, None)
    };
    let pass = lower_bound.is_one() && exact_norm.as_ref().is_some_and(Rational::is_one);
    Ok(NonconvergenceReport {
        n,
        lower_bound,
        norm,
        exact_norm,
        pass,
        space: space.describe(),
        vacuum_projection: "explicit rank-one matrix",
    })
}

/// `‖D e_γ‖²` for the operator of [`check_nonconvergence`], computed without
/// truncation; tends to zero as `n` grows when `γ` starts at or below 0.
pub fn nonconvergence_residual_sq(n: usize, gamma: &[i32]) -> Result<Coeff, ErgodicError> {
    if n == 0 {
        return Err(ErgodicError::EmptyAverage);
    }
    let lo = gamma.iter().copied().min().unwrap_or(0).min(-(n as i32));
    let hi = gamma.iter().copied().max().unwrap_or(0).max(0);
    let space = index_space(Case::Z, lo, hi)?;
    let mut v = apply_to_tuple(&space, &-negative_pair_average(n), gamma)?;
    if gamma.is_empty() {
        match v.iter_mut().find(|(t, _)| t.is_empty()) {
            Some((_, c)) => *c = &*c + &Coeff::one(),
            None => v.push((vec![], Coeff::one())),
        }
    }
    Ok(sq_norm(v.iter().map(|(_, c)| c)))
}

/// Parameter `t ∈ [0, 1]` of `ω_t = t ω_Ω + (1 − t) ω_∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateParam(Rational);

impl StateParam {
    pub fn new(t: Rational) -> Result<Self, ErgodicError> {
        if t.is_negative() || t > Rational::one() {
            return Err(ErgodicError::ParamRange(t.to_string()));
        }
        Ok(StateParam(t))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// `γ + t Σ_j β_j` read off the normal form `γ I + Σ c_λ Y_λ + Σ β_j a(j)c(j)`.
pub fn omega_t(x: &Element, t: &StateParam) -> Result<Coeff, ErgodicError> {
    require_case(x, Case::Z)?;
    let nf = normalize_z(x)?;
    Ok(&nf.unit + &(&Coeff::from(t.0.clone()) * &nf.pair_sum()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FixedPoint {
    FixedScalar(Coeff),
    /// `τ^shift(x) ≠ x`; `discrepancy` is the largest normal-form coefficient difference.
    NotFixed {
        shift: i32,
        discrepancy: f64,
    },
}

/// Finitely supported normal forms are shift invariant only when scalar.
pub fn fixed_point_check(x: &Element) -> Result<FixedPoint, ErgodicError> {
    require_case(x, Case::Z)?;
    let nf = normalize_z(x)?;
    if nf.lambda.is_empty() && nf.pairs.is_empty() {
        return Ok(FixedPoint::FixedScalar(nf.unit));
    }
    let moved = normalize_z(&x.shift(1)?)?;
    Ok(FixedPoint::NotFixed {
        shift: 1,
        discrepancy: moved.to_element().max_coeff_diff(&nf.to_element()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// `max(‖(P_Ω − x)Ω‖, ‖(P_Ω − x)e_s‖)`.
    pub value: f64,
    /// Square of `value`, exact when `x` is.
    pub value_sq: Coeff,
    pub at_vacuum_sq: Coeff,
    pub at_probe_sq: Coeff,
    pub probe: i32,
}

/// Lower bound for `‖P_Ω − x‖` from the vacuum and one probe vector `e_s`
/// that every letter of `x` sees as the vacuum: `s` lies below all indices
/// in the `Z` case and above them in the anti-monotone case.
pub fn vacuum_certificate(x: &Element) -> Result<Certificate, ErgodicError> {
    if !x.unit_coeff().is_zero() {
        return Err(ErgodicError::NonUnital);
    }
    let (probe, space) = match x.case() {
        Case::Z => {
            let s = x.min_index().map_or(-1, |m| m - 1);
            (s, index_space(Case::Z, s, x.max_index().unwrap_or(s))?)
        }
        Case::Anti => {
            let s = x.max_index().map_or(1, |m| m + 1);
            (s, index_space(Case::Anti, 1, s)?)
        }
        Case::N => {
            return Err(ErgodicError::WrongCase {
                expected: Case::Z,
                got: Case::N,
            })
        }
    };
    let neg = -x;
    let mut at_vacuum = apply_to_tuple(&space, &neg, &[])?;
    match at_vacuum.iter_mut().find(|(t, _)| t.is_empty()) {
        Some((_, c)) => *c = &*c + &Coeff::one(),
        None => at_vacuum.push((vec![], Coeff::one())),
    }
    let at_probe = apply_to_tuple(&space, &neg, &[probe])?;
    let at_vacuum_sq = sq_norm(at_vacuum.iter().map(|(_, c)| c));
    let at_probe_sq = sq_norm(at_probe.iter().map(|(_, c)| c));
    let value_sq = if cmp_real(&at_vacuum_sq, &at_probe_sq) == Ordering::Less {
        at_probe_sq.clone()
    } else {
        at_vacuum_sq.clone()
    };
    Ok(Certificate {
        value: value_sq.to_c64().re.sqrt(),
        value_sq,
        at_vacuum_sq,
        at_probe_sq,
        probe,
    })
}
