//! Position operators and their vacuum moments, the cyclicity polynomials
//! `q_n`, the averaged `X_i²` limit, commutants, the level-`n`
//! representations of the `N` algebra, and recovery of finite direct sums.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::expr::{parse, Case, Element, ExprError};
use crate::fock::{
    apply_to_tuple, evaluate, evaluate_gauge_columns, evaluate_rep, FockError, TruncSpace,
};
use crate::linalg::{nullspace, EchelonBasis, SparseVec};
use crate::report::{Discrepancy, Instance, Report};
use crate::scalar::{Coeff, GaussRat, Laurent, FLOAT_TOL};
use crate::sparse::SparseMat;

/// Largest matrix size accepted by [`commutant_dim`].
pub const COMMUTANT_MAX_DIM: usize = 24;
/// Tolerance for the normality test in [`decompose`].
pub const NORMAL_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are counted as one phase.
pub const CLUSTER_TOL: f64 = 1e-6;
const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrices must be square and of equal size")]
    Shape,
    #[error("matrix size {0} exceeds the limit {1}")]
    TooLarge(usize, usize),
    #[error("exact entries required")]
    Inexact,
    #[error("restriction of s_{index} is not normal (deviation {deviation:e})")]
    NotNormal { index: usize, deviation: f64 },
    #[error("phase {0} is not unimodular")]
    NotUnimodular(String),
    #[error("need at least {need} particles, the space has {have}")]
    TooFewParticles { need: usize, have: usize },
    #[error("window [{have_lo}, {have_hi}] does not contain [{need_lo}, {need_hi}]")]
    WindowTooSmall {
        need_lo: i32,
        need_hi: i32,
        have_lo: i32,
        have_hi: i32,
    },
    #[error("invalid direct-sum input: {0}")]
    Spec(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `X_i = a(i) + c(i)`.
pub fn position_element(case: Case, i: i32) -> Element {
    &Element::a(case, i) + &Element::c(case, i)
}

/// Smallest space on which `⟨Ω, x^k Ω⟩` is unaffected by truncation: a path
/// of `k` words of length `ℓ` that returns to the vacuum never holds more
/// than `kℓ/2` particles.
fn moment_space(x: &Element, k: usize) -> Result<TruncSpace, FockError> {
    let l = (k * x.max_len()).div_ceil(2);
    let lo = x.min_index().unwrap_or(1);
    let hi = x.max_index().unwrap_or(1);
    match x.case() {
        Case::Z => TruncSpace::z(lo, hi, l),
        Case::N => TruncSpace::n(hi.max(1), l),
        Case::Anti => TruncSpace::anti(hi.max(1), l),
    }
}

/// `⟨Ω, x^k Ω⟩`.
pub fn vacuum_moment(x: &Element, k: usize) -> Result<Coeff, SpectralError> {
    let space = moment_space(x, k)?;
    let m = evaluate(&space, x)?;
    let mut v = space.vacuum();
    for _ in 0..k {
        v = m.mul_vec(&v);
    }
    Ok(v[0].clone())
}

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polynomial {
    coeffs: Vec<i64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `x·self − other`.
    fn shift_sub(&self, other: &Polynomial) -> Polynomial {
        let n = (self.coeffs.len() + 1).max(other.coeffs.len());
        let mut out = vec![0i64; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] -= c;
        }
        Polynomial::new(out)
    }

    /// `p(x)` by Horner's rule.
    pub fn eval_element(&self, x: &Element) -> Element {
        let mut acc = Element::zero(x.case());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Element::unit(x.case(), Coeff::int(*c));
        }
        acc
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c as f64)
    }
}

/// `q_0 = 1`, `q_1 = x`, `q_{n+1} = x q_n − q_{n−1}`, up to `q_{n_max}`.
pub fn cyclic_polynomials(n_max: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::new(vec![1])];
    if n_max >= 1 {
        out.push(Polynomial::new(vec![0, 1]));
    }
    for n in 1..n_max {
        let next = out[n].shift_sub(&out[n - 1]);
        out.push(next);
    }
    out
}

/// Checks `q_{n_1}(X_{i_1}) ⋯ q_{n_k}(X_{i_k}) Ω = e_{i_1}^{⊗n_1} ⊗ ⋯ ⊗ e_{i_k}^{⊗n_k}` exactly.
pub fn verify_qn_product(
    space: &TruncSpace,
    factors: &[(usize, i32)],
) -> Result<Instance, SpectralError> {
    let total: usize = factors.iter().map(|f| f.0).sum();
    if space.max_particles() < total {
        return Err(SpectralError::TooFewParticles {
            need: total,
            have: space.max_particles(),
        });
    }
    let n_max = factors.iter().map(|f| f.0).max().unwrap_or(0);
    let qs = cyclic_polynomials(n_max);
    let mut x = Element::identity(space.case());
    let mut target = Vec::with_capacity(total);
    let mut label = Vec::new();
    for &(n, i) in factors {
        x = &x * &qs[n].eval_element(&position_element(space.case(), i));
        target.extend(std::iter::repeat_n(i, n));
        label.push(format!("q{n}(X{i})"));
    }
    let pos = space
        .rank(&target)
        .ok_or_else(|| SpectralError::Spec(format!("{target:?} is not a basis vector")))?;
    let col = crate::fock::evaluate_columns(space, &x, &[0])?;
    let entries = col.column(0);
    let at_pos = entries
        .iter()
        .find(|e| e.0 == pos)
        .map_or_else(Coeff::zero, |e| e.1.clone());
    let worst = entries
        .iter()
        .filter(|e| e.0 != pos)
        .map(|e| e.1.abs())
        .fold((&at_pos - &Coeff::one()).abs(), f64::max);
    let pass = entries.len() == 1 && at_pos.is_one();
    let disc = if pass {
        Discrepancy::ExactZero
    } else {
        Discrepancy::Value(worst)
    };
    Ok(Instance::new(format!("{}Ω", label.join("")), pass, disc)
        .with_details(json!({ "expected": target })))
}

/// `q_n(X_i) Ω = e_i^{⊗n}` for `n = 0..=n_max`.
pub fn verify_qn(space: &TruncSpace, i: i32, n_max: usize) -> Result<Report, SpectralError> {
    if space.max_particles() < n_max {
        return Err(SpectralError::TooFewParticles {
            need: n_max,
            have: space.max_particles(),
        });
    }
    let instances = (0..=n_max)
        .map(|n| verify_qn_product(space, &[(n, i)]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(
        "cyclic-polynomials",
        json!({ "space": space.describe(), "index": i, "nMax": n_max }),
        instances,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitResidual {
    pub n: usize,
    pub vector: Vec<i32>,
    pub residual: f64,
    /// Square of the residual, exact.
    pub residual_sq: Coeff,
    /// Three-term estimate with the computed `‖X_{i_1}² ξ‖`.
    pub bound: f64,
    /// The same estimate with `‖X_{i_1}² ξ‖` replaced by 2.
    pub bound_with_constant_two: f64,
    pub x_sq_norm: f64,
}

fn sq_norm(v: &[(Vec<i32>, Coeff)]) -> Coeff {
    v.iter()
        .fold(Coeff::zero(), |acc, (_, c)| &acc + &c.norm_sqr())
}

fn add_at(v: &mut Vec<(Vec<i32>, Coeff)>, t: &[i32], c: Coeff) {
    match v.iter_mut().find(|(s, _)| s == t) {
        Some((_, x)) => *x = &*x + &c,
        None => v.push((t.to_vec(), c)),
    }
}

/// `‖(1/(2N+1)) Σ_{|i|≤N} X_i² ξ − T ξ‖` with `T = P_Ω + (I − P_Ω)/2`,
/// computed exactly on the untruncated space (the operator raises the
/// particle number by at most two).
pub fn limit_residual(n: usize, xi: &[i32]) -> Result<LimitResidual, SpectralError> {
    let ni = n as i32;
    if xi.windows(2).any(|w| w[1] > w[0]) {
        return Err(SpectralError::Spec(format!("{xi:?} is not non-increasing")));
    }
    let lo = xi.iter().copied().min().unwrap_or(0).min(-ni);
    let hi = xi.iter().copied().max().unwrap_or(0).max(ni);
    let space = TruncSpace::z(lo, hi, 0)?;
    let mut sum = Element::zero(Case::Z);
    for i in -ni..=ni {
        sum = &sum + &position_element(Case::Z, i).pow(2);
    }
    let denom = 2 * n as i64 + 1;
    let s = sum.scale(&Coeff::ratio(1, denom));
    let mut v = apply_to_tuple(&space, &s, xi)?;
    let t = if xi.is_empty() {
        Coeff::one()
    } else {
        Coeff::ratio(1, 2)
    };
    add_at(&mut v, xi, -&t);
    let residual_sq = sq_norm(&v);
    let residual = residual_sq.to_c64().re.sqrt();
    let (bound, bound2, x_sq_norm) = match xi.first() {
        None => {
            let b = 1.0 / (denom as f64).sqrt();
            (b, b, 0.0)
        }
        Some(&i1) => {
            if i1.abs() > ni {
                return Err(SpectralError::WindowTooSmall {
                    need_lo: -i1.abs(),
                    need_hi: i1.abs(),
                    have_lo: -ni,
                    have_hi: ni,
                });
            }
            let xs = apply_to_tuple(&space, &position_element(Case::Z, i1).pow(2), xi)?;
            let x_sq_norm = sq_norm(&xs).to_c64().re.sqrt();
            let above = (ni - i1) as f64;
            let d = denom as f64;
            let head = (0.5 - above / d).abs() + above.sqrt() / d;
            (head + x_sq_norm / d, head + 2.0 / d, x_sq_norm)
        }
    };
    Ok(LimitResidual {
        n,
        vector: xi.to_vec(),
        residual,
        residual_sq,
        bound,
        bound_with_constant_two: bound2,
        x_sq_norm,
    })
}

fn require_square(mats: &[SparseMat<Coeff>]) -> Result<usize, SpectralError> {
    let n = mats.first().map_or(0, SparseMat::rows);
    if mats.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(SpectralError::Shape);
    }
    Ok(n)
}

fn exact(c: &Coeff) -> Result<GaussRat, SpectralError> {
    c.as_exact().cloned().ok_or(SpectralError::Inexact)
}

/// Dimension and basis of `{T : TM = MT, TM* = M*T for every M}`, by exact
/// elimination on the stacked commutator equations.
pub fn commutant_dim(
    mats: &[SparseMat<Coeff>],
) -> Result<(usize, Vec<SparseMat<Coeff>>), SpectralError> {
    let n = require_square(mats)?;
    if n > COMMUTANT_MAX_DIM {
        return Err(SpectralError::TooLarge(n, COMMUTANT_MAX_DIM));
    }
    let mut ops = Vec::with_capacity(2 * mats.len());
    for m in mats {
        ops.push(m.clone());
        ops.push(m.adjoint());
    }
    let mut echelon = EchelonBasis::new();
    for m in &ops {
        let rows_of = m.transpose();
        for r in 0..n {
            for c in 0..n {
                // (TM − MT)_{rc} = Σ_k T_{rk} M_{kc} − Σ_k M_{rk} T_{kc}
                let mut eq = SparseVec::new();
                for (k, v) in m.column(c) {
                    let e = eq.entry(r * n + k).or_default();
                    *e = &*e + &exact(v)?;
                }
                for (k, v) in rows_of.column(r) {
                    let e = eq.entry(k * n + c).or_default();
                    *e = &*e - &exact(v)?;
                }
                echelon.insert(eq);
            }
        }
    }
    let dense: Vec<Vec<GaussRat>> = echelon
        .into_rows()
        .into_iter()
        .map(|row| {
            let mut d = vec![GaussRat::zero(); n * n];
            for (k, v) in row {
                d[k] = v;
            }
            d
        })
        .collect();
    let basis: Vec<SparseMat<Coeff>> = nullspace(dense, n * n)
        .into_iter()
        .map(|v| {
            let trip = v
                .into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (k / n, k % n, Coeff::Exact(x)))
                .collect();
            SparseMat::from_triplets(n, n, trip)
        })
        .collect();
    Ok((basis.len(), basis))
}

/// Gauge phase of a representation: a formal unimodular variable or a number.
#[derive(Clone, Debug, PartialEq)]
pub enum Phase {
    Formal,
    Fixed(Coeff),
}

impl Phase {
    pub fn fixed(z: Coeff) -> Result<Self, SpectralError> {
        let ok = match z.norm_sqr() {
            Coeff::Exact(g) => g.is_real() && g.re.is_one(),
            Coeff::Float(f) => (f.re - 1.0).abs() <= FLOAT_TOL,
        };
        if !ok {
            return Err(SpectralError::NotUnimodular(z.to_string()));
        }
        Ok(Phase::Fixed(z))
    }
}

/// The level-`n` representation with `s_i ↦ 0` (`i < n`), `z P_Ω` (`i = n`)
/// and `A†_{i−n}` (`i > n`) on a truncated `N` space.
#[derive(Clone, Debug)]
pub struct RepSpec {
    pub level: i32,
    pub phase: Phase,
    pub space: TruncSpace,
}

impl RepSpec {
    pub fn new(level: i32, phase: Phase, space: TruncSpace) -> Result<Self, SpectralError> {
        if level < 0 {
            return Err(SpectralError::Spec(format!("negative level {level}")));
        }
        if space.case() != Case::N {
            return Err(FockError::CaseMismatch {
                space: space.case(),
                element: Case::N,
            }
            .into());
        }
        Ok(RepSpec {
            level,
            phase,
            space,
        })
    }

    fn specialize(&self, m: SparseMat<Laurent>) -> SparseMat<Laurent> {
        match &self.phase {
            Phase::Formal => m,
            Phase::Fixed(z) => m.map(|p| Laurent::constant(p.eval(z))),
        }
    }

    /// Image of `x` on the listed columns.
    pub fn image_columns(
        &self,
        x: &Element,
        cols: &[usize],
    ) -> Result<SparseMat<Laurent>, SpectralError> {
        Ok(self.specialize(evaluate_gauge_columns(&self.space, x, self.level, cols)?))
    }

    pub fn image(&self, x: &Element) -> Result<SparseMat<Laurent>, SpectralError> {
        let cols: Vec<usize> = (0..self.space.dim()).collect();
        self.image_columns(x, &cols)
    }
}

/// Matrix of `s_i`.
pub fn rep_matrix(spec: &RepSpec, i: i32) -> Result<SparseMat<Laurent>, SpectralError> {
    if i < 0 {
        return Err(SpectralError::Spec(format!("negative generator index {i}")));
    }
    spec.image(&Element::c(Case::N, i))
}

fn identity_instance(
    spec: &RepSpec,
    id: String,
    lhs: &Element,
    rhs: &Element,
) -> Result<Instance, SpectralError> {
    let diff = lhs - rhs;
    let margin = lhs.max_rise().max(rhs.max_rise());
    let cols = spec.space.interior_columns(margin, 0);
    let m = spec.image_columns(&diff, &cols)?;
    let exact = m.is_exact() && diff.is_exact();
    let mag = m.max_magnitude();
    let pass = if exact { m.is_zero() } else { mag <= FLOAT_TOL };
    let disc = if pass && exact {
        Discrepancy::ExactZero
    } else {
        Discrepancy::Value(mag)
    };
    Ok(Instance::new(id, pass, disc)
        .with_details(json!({ "columns": cols.len(), "margin": margin })))
}

/// `w^{|r|−|c|} M_rc(wz) = w M_rc(z)` entrywise, i.e. conjugating by the
/// number operator phase turns `z ↦ wz` into multiplication by `w`.
fn gauge_instance(spec: &RepSpec, i: i32, w: &Coeff) -> Result<Instance, SpectralError> {
    let m = rep_matrix(
        &RepSpec {
            phase: Phase::Formal,
            ..spec.clone()
        },
        i,
    )?;
    let sp = &spec.space;
    let mut worst = 0.0f64;
    let mut pass = true;
    for (r, c, p) in m.entries() {
        let k = sp.level_of(r) as i32 - sp.level_of(c) as i32;
        let lhs = p.rescale(w).scale(&w.pow(k));
        let rhs = p.scale(w);
        let d = &lhs - &rhs;
        if !d.is_zero() {
            pass = false;
            worst = worst.max(d.max_abs());
        }
    }
    let disc = if pass {
        Discrepancy::ExactZero
    } else {
        Discrepancy::Value(worst)
    };
    Ok(Instance::new(
        format!("gauge-covariance(s{i}, w={w})"),
        pass,
        disc,
    ))
}

/// Relations `s_i* s_j = 0` (`i ≠ j`), `s_i* s_i = Σ_{k≤i} s_k s_k*`, partial
/// isometries, `s_{n+1}* s_{n+1} − s_{n+1} s_{n+1}* = s_n s_n*` (the vacuum
/// projection) and gauge covariance, for indices up to `max_index`.
pub fn verify_rep(spec: &RepSpec, max_index: i32) -> Result<Report, SpectralError> {
    let (_, d) = spec.space.window();
    if max_index - spec.level > d {
        return Err(SpectralError::WindowTooSmall {
            need_lo: 1,
            need_hi: max_index - spec.level,
            have_lo: 1,
            have_hi: d,
        });
    }
    let c = |i| Element::c(Case::N, i);
    let a = |i| Element::a(Case::N, i);
    let zero = Element::zero(Case::N);
    let mut instances = Vec::new();
    for i in 0..=max_index {
        for j in 0..=max_index {
            if i != j {
                instances.push(identity_instance(
                    spec,
                    format!("orthogonal-ranges({i},{j})"),
                    &(&a(i) * &c(j)),
                    &zero,
                )?);
            }
        }
        let mut sum = Element::zero(Case::N);
        for k in 0..=i {
            sum = &sum + &(&c(k) * &a(k));
        }
        instances.push(identity_instance(
            spec,
            format!("support-sum({i})"),
            &(&a(i) * &c(i)),
            &sum,
        )?);
        instances.push(identity_instance(
            spec,
            format!("partial-isometry({i})"),
            &(&(&c(i) * &a(i)) * &c(i)),
            &c(i),
        )?);
    }
    let n = spec.level;
    if n < max_index {
        let lhs = &(&a(n + 1) * &c(n + 1)) - &(&c(n + 1) * &a(n + 1));
        instances.push(identity_instance(
            spec,
            "vacuum-projection".into(),
            &lhs,
            &(&c(n) * &a(n)),
        )?);
        let p = spec.space.vacuum_projection::<Laurent>();
        let cols: Vec<usize> = spec.space.interior_columns(1, 0);
        let m = spec.image_columns(&lhs, &cols)?;
        let pc = p.select_columns(&cols);
        let ok = m.sub(&pc).is_zero();
        let disc = if ok {
            Discrepancy::ExactZero
        } else {
            Discrepancy::Value(m.sub(&pc).max_magnitude())
        };
        instances.push(Instance::new("vacuum-projection-rank-one", ok, disc));
    }
    let ws = [
        Coeff::i(),
        Coeff::int(-1),
        Coeff::gauss(crate::Rational::new(3, 5), crate::Rational::new(4, 5)),
    ];
    for i in 0..=max_index {
        for w in &ws {
            instances.push(gauge_instance(spec, i, w)?);
        }
    }
    let phase = match &spec.phase {
        Phase::Formal => json!("formal"),
        Phase::Fixed(z) => serde_json::to_value(z).expect("coefficients serialize"),
    };
    let config = json!({ "level": n, "phase": phase, "space": spec.space.describe(), "maxIndex": max_index });
    Ok(Report::new("rep-n", config, instances))
}

/// Phase as written in JSON: a number, `{"re", "im"}`, or an expression
/// scalar such as `"(3/5+4/5i)"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseValue {
    Real(f64),
    Complex { re: f64, im: f64 },
    Text(String),
}

impl PhaseValue {
    pub fn to_coeff(&self) -> Result<Coeff, SpectralError> {
        match self {
            PhaseValue::Real(r) => Ok(Coeff::float(*r, 0.0)),
            PhaseValue::Complex { re, im } => Ok(Coeff::float(*re, *im)),
            PhaseValue::Text(s) => {
                let e = parse(s, Case::N)?;
                if e.num_terms() != 0 {
                    return Err(SpectralError::Spec(format!("phase `{s}` is not a scalar")));
                }
                Ok(e.unit_coeff().clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub level: i32,
    pub phase: PhaseValue,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

/// Finite direct sum of truncated level representations of `s_0, …, s_G`.
/// A level-`k` block lives on the `N` space with `d = G − k` and `particles`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSum {
    pub generators: i32,
    pub particles: usize,
    pub blocks: Vec<BlockSpec>,
    /// Dimension of an appended block on which every generator vanishes.
    #[serde(default)]
    pub zero_block: usize,
}

impl SyntheticSum {
    /// Matrices of `s_0, …, s_G` on the direct sum.
    pub fn build(&self) -> Result<Vec<SparseMat<Coeff>>, SpectralError> {
        let g = self.generators;
        let mut blocks: Vec<Vec<SparseMat<Coeff>>> = Vec::new();
        for b in &self.blocks {
            if b.level < 0 || b.level >= g {
                return Err(SpectralError::Spec(format!(
                    "level {} must lie in [0, {})",
                    b.level, g
                )));
            }
            let z = b.phase.to_coeff()?;
            Phase::fixed(z.clone())?;
            let space = TruncSpace::n(g - b.level, self.particles)?;
            let mats = (0..=g)
                .map(|i| evaluate_rep(&space, &Element::c(Case::N, i), b.level, &z))
                .collect::<Result<Vec<_>, _>>()?;
            for _ in 0..b.multiplicity {
                blocks.push(mats.clone());
            }
        }
        let total: usize = blocks.iter().map(|b| b[0].rows()).sum::<usize>() + self.zero_block;
        let mut out = Vec::new();
        for i in 0..=g as usize {
            let mut trip = Vec::new();
            let mut off = 0;
            for b in &blocks {
                for (r, c, v) in b[i].entries() {
                    trip.push((off + r, off + c, v.clone()));
                }
                off += b[i].rows();
            }
            out.push(SparseMat::from_triplets(total, total, trip));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub level: usize,
    pub phase: Coeff,
    pub multiplicity: usize,
    /// Dimension of the invariant subspace carrying these copies.
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub components: Vec<Component>,
    pub residual_dim: usize,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Gram-Schmidt step against an orthonormal family, applied twice.
fn orthogonalize(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = b.dotc(v);
            *v -= b * p;
        }
    }
}

/// Orthonormal basis of the complement of `claimed` in `C^n`.
fn complement(n: usize, claimed: &[DVector<Complex64>]) -> DMatrix<Complex64> {
    if claimed.is_empty() {
        return DMatrix::identity(n, n);
    }
    let mut p = DMatrix::<Complex64>::identity(n, n);
    for v in claimed {
        p -= v * v.adjoint();
    }
    let eig = SymmetricEigen::new(p);
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    eig.eigenvectors.select_columns(&keep)
}

/// Recovers `(level, phase, multiplicity)` of a finite direct sum of level
/// representations. Components are peeled off by increasing level: on what
/// remains, the first generator that does not vanish is `z P_Ω` on each
/// block of that level; its nonzero eigenvalues are the phases and its
/// eigenvectors the vacua, whose cyclic subspaces carry the blocks.
pub fn decompose(gens: &[SparseMat<Coeff>]) -> Result<DecompositionReport, SpectralError> {
    let n = require_square(gens)?;
    let dense: Vec<DMatrix<Complex64>> = gens.iter().map(SparseMat::to_dense).collect();
    let mut ops = dense.clone();
    ops.extend(dense.iter().map(|m| m.adjoint()));
    let mut claimed: Vec<DVector<Complex64>> = Vec::new();
    let mut components = Vec::new();
    loop {
        let q = complement(n, &claimed);
        if q.ncols() == 0 {
            return Ok(DecompositionReport {
                components,
                residual_dim: 0,
            });
        }
        let restricted = dense
            .iter()
            .map(|g| q.adjoint() * g * &q)
            .enumerate()
            .find(|(_, u)| max_abs(u) > RANK_TOL);
        let Some((level, u)) = restricted else {
            return Ok(DecompositionReport {
                components,
                residual_dim: q.ncols(),
            });
        };
        let uh = u.adjoint();
        let deviation = max_abs(&(&u * &uh - &uh * &u));
        if deviation > NORMAL_TOL {
            return Err(SpectralError::NotNormal {
                index: level,
                deviation,
            });
        }
        let eig = SymmetricEigen::new(&u * &uh);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k] > CLUSTER_TOL)
            .collect();
        let b = eig.eigenvectors.select_columns(&keep);
        let (qs, t) = Schur::new(b.adjoint() * &u * &b).unpack();
        let mut clusters: Vec<(Complex64, Vec<usize>)> = Vec::new();
        for k in 0..t.nrows() {
            let z = t[(k, k)];
            match clusters
                .iter_mut()
                .find(|(c, _)| (c - z).norm() < CLUSTER_TOL)
            {
                Some((_, v)) => v.push(k),
                None => clusters.push((z, vec![k])),
            }
        }
        clusters.sort_by(|x, y| {
            (x.0.re, x.0.im)
                .partial_cmp(&(y.0.re, y.0.im))
                .expect("finite phases")
        });
        let lift = &q * &b * &qs;
        for (_, idx) in clusters {
            let phase = idx.iter().map(|&k| t[(k, k)]).sum::<Complex64>() / idx.len() as f64;
            let mut span: Vec<DVector<Complex64>> = Vec::new();
            let mut queue: Vec<DVector<Complex64>> =
                idx.iter().map(|&k| lift.column(k).into_owned()).collect();
            while let Some(mut v) = queue.pop() {
                orthogonalize(&mut v, &claimed);
                orthogonalize(&mut v, &span);
                let nv = v.norm();
                if nv <= RANK_TOL {
                    continue;
                }
                v /= Complex64::new(nv, 0.0);
                queue.extend(ops.iter().map(|g| g * &v));
                span.push(v);
            }
            components.push(Component {
                level,
                phase: Coeff::Float(phase),
                multiplicity: idx.len(),
                dim: span.len(),
            });
            claimed.extend(span);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_generator;

    #[test]
    fn position_is_self_adjoint() {
        let x = position_element(Case::N, 1);
        assert_eq!(x, parse("a(1) + c(1)", Case::N).unwrap());
        assert_eq!(x.adjoint(), x);
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn moments_are_catalan() {
        let x = position_element(Case::N, 1);
        let want = [1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(vacuum_moment(&x, k).unwrap(), Coeff::int(*w), "order {k}");
        }
    }

    #[test]
    fn polynomial_family() {
        let qs = cyclic_polynomials(4);
        assert_eq!(qs[2].coeffs(), &[-1, 0, 1]);
        assert_eq!(qs[3].coeffs(), &[0, -2, 0, 1]);
        assert_eq!(qs[4].degree(), Some(4));
        assert_eq!(cyclic_polynomials(0).len(), 1);
    }

    #[test]
    fn cyclic_vectors() {
        let s = TruncSpace::n(3, 6).unwrap();
        assert!(verify_qn(&s, 2, 6).unwrap().all_pass());
        assert!(verify_qn_product(&s, &[(2, 2), (1, 1)]).unwrap().pass);
        assert!(verify_qn(&s, 1, 7).is_err());
    }

    #[test]
    fn limit_residuals() {
        for n in [10usize, 12] {
            let r = limit_residual(n, &[]).unwrap();
            assert_eq!(r.residual_sq, Coeff::ratio(1, 2 * n as i64 + 1));
        }
        let r = limit_residual(10, &[2, 1]).unwrap();
        // 1/(4·21²) + 9/21²
        assert_eq!(r.residual_sq, Coeff::ratio(37, 4 * 441));
        assert!((r.x_sq_norm - 5f64.sqrt()).abs() < 1e-12);
        assert!(r.residual <= r.bound);
    }

    #[test]
    fn commutants() {
        let s = TruncSpace::n(1, 1).unwrap();
        let c1 = build_generator(&s, 1, true).unwrap();
        assert_eq!(commutant_dim(std::slice::from_ref(&c1)).unwrap().0, 1);
        let x1 = evaluate(&s, &position_element(Case::N, 1)).unwrap();
        assert_eq!(commutant_dim(&[x1]).unwrap().0, 2);
        let s = TruncSpace::n(2, 2).unwrap();
        let gens: Vec<_> = (1..=2)
            .map(|i| build_generator(&s, i, true).unwrap())
            .collect();
        let (d, basis) = commutant_dim(&gens).unwrap();
        assert_eq!(d, 1);
        assert_eq!(basis[0].nnz(), 6);
        assert!(commutant_dim(&[]).unwrap().0 == 0);
    }

    #[test]
    fn rep_matrices() {
        let space = TruncSpace::n(3, 3).unwrap();
        let spec = RepSpec::new(0, Phase::Formal, space.clone()).unwrap();
        let m = rep_matrix(&spec, 0).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), Laurent::z());
        let spec2 = RepSpec::new(2, Phase::Formal, space.clone()).unwrap();
        assert!(rep_matrix(&spec2, 1).unwrap().is_zero());
        let spec1 = RepSpec::new(1, Phase::Formal, space.clone()).unwrap();
        let c1 = build_generator(&space, 1, true)
            .unwrap()
            .map(|c| Laurent::constant(c.clone()));
        assert_eq!(rep_matrix(&spec1, 2).unwrap(), c1);
        assert!(rep_matrix(&spec1, 5).is_err());
    }

    #[test]
    fn rep_relations() {
        let space = TruncSpace::n(4, 3).unwrap();
        for (n, phase) in [
            (0, Phase::Formal),
            (0, Phase::fixed(Coeff::one()).unwrap()),
            (2, Phase::fixed(Coeff::i()).unwrap()),
        ] {
            let spec = RepSpec::new(n, phase, space.clone()).unwrap();
            let r = verify_rep(&spec, 3).unwrap();
            assert!(r.all_pass(), "{}", r.to_json());
        }
        assert!(Phase::fixed(Coeff::int(2)).is_err());
    }

    #[test]
    fn decomposition_recovers_components() {
        let spec: SyntheticSum = serde_json::from_value(json!({
            "generators": 3,
            "particles": 3,
            "blocks": [
                {"level": 0, "phase": {"re": 0.0, "im": 1.0}},
                {"level": 1, "phase": -1.0, "multiplicity": 2}
            ]
        }))
        .unwrap();
        let gens = spec.build().unwrap();
        assert_eq!(gens[0].rows(), 40);
        let r = decompose(&gens).unwrap();
        assert_eq!(r.residual_dim, 0);
        assert_eq!(r.components.len(), 2);
        let c0 = &r.components[0];
        assert_eq!((c0.level, c0.multiplicity, c0.dim), (0, 1, 20));
        assert!((c0.phase.to_c64() - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        let c1 = &r.components[1];
        assert_eq!((c1.level, c1.multiplicity, c1.dim), (1, 2, 20));
        assert!((c1.phase.to_c64() + Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn decomposition_residual_and_rejection() {
        let spec = SyntheticSum {
            generators: 2,
            particles: 2,
            blocks: vec![BlockSpec {
                level: 0,
                phase: PhaseValue::Text("1".into()),
                multiplicity: 1,
            }],
            zero_block: 3,
        };
        let r = decompose(&spec.build().unwrap()).unwrap();
        assert_eq!(r.residual_dim, 3);
        assert_eq!(r.components.len(), 1);
        let s = TruncSpace::n(2, 2).unwrap();
        let c1 = build_generator(&s, 1, true).unwrap();
        assert!(matches!(
            decompose(&[c1]),
            Err(SpectralError::NotNormal { .. })
        ));
    }
}
