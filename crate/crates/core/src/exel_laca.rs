//! Exel-Laca data for the weakly monotone matrices: the coefficient
//! `a(X, Y, j)`, support sets, and relation instances checked on Fock space.
//!
//! Letters follow the abstract reading `s_i ↦ c(i)`, so `q(i) = s_i* s_i` is
//! `a(i)c(i)` and `p(i) = s_i s_i*` is `c(i)a(i)`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::expr::{Case, Element};
use crate::fock::{verify_identity, FockError, TruncSpace};
use crate::report::{Discrepancy, Instance, Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElError {
    #[error("index ({i}, {j}) outside the matrix domain")]
    OutOfDomain { i: i32, j: i32 },
    #[error("infinitely many j satisfy a(X, Y, j) = 1 for X = {x:?}, Y = {y:?}")]
    InfiniteSupport { x: Vec<i32>, y: Vec<i32> },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("explicit tables have no Fock realization to verify against")]
    NotVerifiable,
    #[error("space must be of case {expected}, got {got}")]
    WrongSpace { expected: Case, got: Case },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// The 0/1 matrix `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElMatrix {
    /// `a_ij = [i ≥ j]` over all integers.
    WmZ,
    /// `a_ij = [i ≥ j]` over the non-negative integers.
    WmN,
    /// Explicit square table indexed from 0.
    Table { rows: Vec<Vec<u8>> },
}

impl ElMatrix {
    pub fn table(rows: Vec<Vec<u8>>) -> Result<Self, ElError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ElError::InvalidTable(format!(
                    "row {i} has length {}, expected {n}",
                    r.len()
                )));
            }
            if r.iter().any(|&v| v > 1) {
                return Err(ElError::InvalidTable(format!(
                    "row {i} has an entry other than 0 or 1"
                )));
            }
            if r.iter().all(|&v| v == 0) {
                return Err(ElError::InvalidTable(format!(
                    "row {i} is identically zero"
                )));
            }
        }
        Ok(ElMatrix::Table { rows })
    }

    pub fn in_domain(&self, i: i32) -> bool {
        match self {
            ElMatrix::WmZ => true,
            ElMatrix::WmN => i >= 0,
            ElMatrix::Table { rows } => i >= 0 && (i as usize) < rows.len(),
        }
    }

    pub fn entry(&self, i: i32, j: i32) -> Result<u8, ElError> {
        if !self.in_domain(i) || !self.in_domain(j) {
            return Err(ElError::OutOfDomain { i, j });
        }
        Ok(match self {
            ElMatrix::WmZ | ElMatrix::WmN => u8::from(i >= j),
            ElMatrix::Table { rows } => rows[i as usize][j as usize],
        })
    }

    /// Case of the algebra realizing the matrix, if any.
    pub fn case(&self) -> Option<Case> {
        match self {
            ElMatrix::WmZ => Some(Case::Z),
            ElMatrix::WmN => Some(Case::N),
            ElMatrix::Table { .. } => None,
        }
    }
}

/// `a(X, Y, j) = Π_{x∈X} a_xj Π_{y∈Y} (1 − a_yj)`.
pub fn a_coeff(m: &ElMatrix, x: &BTreeSet<i32>, y: &BTreeSet<i32>, j: i32) -> Result<u8, ElError> {
    let mut v = 1;
    for &i in x {
        v *= m.entry(i, j)?;
    }
    for &i in y {
        v *= 1 - m.entry(i, j)?;
    }
    Ok(v)
}

/// All `j` with `a(X, Y, j) = 1`, or an error when there are infinitely many.
pub fn support_set(
    m: &ElMatrix,
    x: &BTreeSet<i32>,
    y: &BTreeSet<i32>,
) -> Result<BTreeSet<i32>, ElError> {
    for &i in x.iter().chain(y) {
        if !m.in_domain(i) {
            return Err(ElError::OutOfDomain { i, j: i });
        }
    }
    let infinite = || ElError::InfiniteSupport {
        x: x.iter().copied().collect(),
        y: y.iter().copied().collect(),
    };
    match m {
        ElMatrix::WmZ | ElMatrix::WmN => {
            let floor = if matches!(m, ElMatrix::WmN) {
                Some(0)
            } else {
                None
            };
            let lo = match (y.last(), floor) {
                (Some(&my), _) => my + 1,
                (None, Some(f)) => f,
                (None, None) => return Err(infinite()),
            };
            let hi = *x.first().ok_or_else(infinite)?;
            Ok((lo..=hi).collect())
        }
        ElMatrix::Table { rows } => {
            let mut out = BTreeSet::new();
            for j in 0..rows.len() as i32 {
                if a_coeff(m, x, y, j)? == 1 {
                    out.insert(j);
                }
            }
            Ok(out)
        }
    }
}

/// `q(i) = a(i)c(i)`.
pub fn q(case: Case, i: i32) -> Element {
    &Element::a(case, i) * &Element::c(case, i)
}

/// `p(i) = c(i)a(i)`.
pub fn p(case: Case, i: i32) -> Element {
    &Element::c(case, i) * &Element::a(case, i)
}

/// Condition (4) for `(X, Y)`: `Π q(x) Π (I − q(y))` against `Σ_{j ∈ support} p(j)`.
pub fn relation_instance(
    m: &ElMatrix,
    x: &BTreeSet<i32>,
    y: &BTreeSet<i32>,
) -> Result<(Element, Element), ElError> {
    let support = support_set(m, x, y)?;
    let case = m.case().unwrap_or(Case::N);
    let mut lhs = Element::identity(case);
    for &i in x {
        lhs = &lhs * &q(case, i);
    }
    for &i in y {
        lhs = &lhs * &(&Element::identity(case) - &q(case, i));
    }
    let mut rhs = Element::zero(case);
    for j in support {
        rhs = &rhs + &p(case, j);
    }
    Ok((lhs, rhs))
}

/// The `(X, Y)` pairs to check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    Explicit(Vec<SetPair>),
    /// Every pair of subsets of `[lo, hi]` with at most `max_size` elements each.
    Subsets {
        lo: i32,
        hi: i32,
        max_size: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPair {
    pub x: BTreeSet<i32>,
    pub y: BTreeSet<i32>,
}

fn subsets(lo: i32, hi: i32, max_size: usize) -> Vec<BTreeSet<i32>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier = vec![BTreeSet::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(lo, |&m| m + 1);
            for i in start..=hi {
                let mut t = s.clone();
                t.insert(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

impl FamilySpec {
    pub fn pairs(&self) -> Vec<SetPair> {
        match self {
            FamilySpec::Explicit(v) => v.clone(),
            FamilySpec::Subsets { lo, hi, max_size } => {
                let sets = subsets(*lo, *hi, *max_size);
                let mut out = Vec::with_capacity(sets.len() * sets.len());
                for x in &sets {
                    for y in &sets {
                        out.push(SetPair {
                            x: x.clone(),
                            y: y.clone(),
                        });
                    }
                }
                out
            }
        }
    }

    /// Every index mentioned by the family.
    pub fn indices(&self) -> BTreeSet<i32> {
        match self {
            FamilySpec::Subsets { lo, hi, .. } => (*lo..=*hi).collect(),
            FamilySpec::Explicit(v) => v
                .iter()
                .flat_map(|p| p.x.iter().chain(&p.y).copied())
                .collect(),
        }
    }
}

fn fmt_set(s: &BTreeSet<i32>) -> String {
    let v: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn check(
    space: &TruncSpace,
    id: String,
    lhs: &Element,
    rhs: &Element,
) -> Result<Instance, ElError> {
    let r = verify_identity(space, lhs, rhs, None)?;
    Ok(Instance::from_identity(id, &r))
}

/// Conditions (1)-(3) over all index pairs of the family and (4) for every
/// `(X, Y)`; pairs whose support is infinite are reported as skipped passes.
pub fn verify_el_suite(
    space: &TruncSpace,
    m: &ElMatrix,
    family: &FamilySpec,
) -> Result<Report, ElError> {
    let case = m.case().ok_or(ElError::NotVerifiable)?;
    if space.case() != case {
        return Err(ElError::WrongSpace {
            expected: case,
            got: space.case(),
        });
    }
    let idx: Vec<i32> = family.indices().into_iter().collect();
    for &i in &idx {
        let vacuum_index = case == Case::N && i == 0;
        if !space.in_window(i) && !vacuum_index {
            let (lo, hi) = space.window();
            return Err(FockError::OutOfWindow { index: i, lo, hi }.into());
        }
    }
    let mut jobs: Vec<(String, Element, Element)> = Vec::new();
    for &i in &idx {
        for &j in &idx {
            if i < j {
                jobs.push((
                    format!("q-commute({i},{j})"),
                    &q(case, i) * &q(case, j),
                    &q(case, j) * &q(case, i),
                ));
            }
            if i != j {
                jobs.push((
                    format!("p-orthogonal({i},{j})"),
                    &p(case, i) * &p(case, j),
                    Element::zero(case),
                ));
            }
            let a = m.entry(i, j)?;
            let rhs = if a == 1 {
                p(case, j)
            } else {
                Element::zero(case)
            };
            jobs.push((format!("q-p({i},{j})"), &q(case, i) * &p(case, j), rhs));
        }
    }
    let mut skipped = Vec::new();
    for pair in family.pairs() {
        let id = format!("relation(X={},Y={})", fmt_set(&pair.x), fmt_set(&pair.y));
        match relation_instance(m, &pair.x, &pair.y) {
            Ok((lhs, rhs)) => jobs.push((id, lhs, rhs)),
            Err(ElError::InfiniteSupport { .. }) => skipped.push(id),
            Err(e) => return Err(e),
        }
    }
    let mut instances: Vec<Instance> = jobs
        .par_iter()
        .map(|(id, l, r)| check(space, id.clone(), l, r))
        .collect::<Result<_, _>>()?;
    instances.extend(skipped.into_iter().map(|id| {
        Instance::new(id, true, Discrepancy::ExactZero)
            .with_details(json!({"skipped": "infinite support"}))
    }));
    let config = json!({
        "matrix": m,
        "space": space.describe(),
        "family": family,
        "unitalized": true,
    });
    Ok(Report::new("exel-laca", config, instances))
}

/// `q(j+1) = q(j) + p(j+1)` on the interior.
pub fn verify_step_identity(space: &TruncSpace, j: i32) -> Result<Instance, ElError> {
    let case = space.case();
    let rhs = &q(case, j) + &p(case, j + 1);
    check(space, format!("q-step({j})"), &q(case, j + 1), &rhs)
}
