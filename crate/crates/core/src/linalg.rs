//! Exact linear algebra over Gaussian rationals: rank of sparse vector
//! families and nullspaces of small dense systems.

use std::collections::BTreeMap;

use crate::scalar::GaussRat;

/// Sparse vector keyed by coordinate.
pub type SparseVec = BTreeMap<usize, GaussRat>;

/// Incremental echelon basis; vectors are reduced against pivots on insertion.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: BTreeMap<usize, SparseVec>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        v.retain(|_, x| !x.is_zero());
        let mut floor = 0usize;
        loop {
            let Some((&p, x)) = v.range(floor..).next() else {
                return v;
            };
            let Some(row) = self.rows.get(&p) else {
                floor = p + 1;
                continue;
            };
            let f = x.clone();
            for (k, r) in row {
                let nv = &v.get(k).cloned().unwrap_or_default() - &(&f * r);
                if nv.is_zero() {
                    v.remove(k);
                } else {
                    v.insert(*k, nv);
                }
            }
            floor = p + 1;
        }
    }

    /// Adds `v`; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        let Some((&p, lead)) = v.iter().next() else {
            return false;
        };
        let inv = lead.inv();
        let row: SparseVec = v.iter().map(|(k, x)| (*k, x * &inv)).collect();
        self.rows.insert(p, row);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Echelon rows, normalized to a leading 1, in pivot order.
    pub fn into_rows(self) -> Vec<SparseVec> {
        self.rows.into_values().collect()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut b = EchelonBasis::new();
    for v in vectors {
        b.insert(v);
    }
    b.rank()
}

/// Basis of `{x : A x = 0}` for a dense row-major `A` with `ncols` columns,
/// from the reduced row echelon form.
pub fn nullspace(mut a: Vec<Vec<GaussRat>>, ncols: usize) -> Vec<Vec<GaussRat>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, sel);
        let inv = a[r][c].inv();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![GaussRat::zero(); ncols];
            v[fc] = GaussRat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&a[row][fc];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    fn sv(e: &[(usize, i64)]) -> SparseVec {
        e.iter().map(|&(k, v)| (k, g(v))).collect()
    }

    #[test]
    fn rank_detects_dependence() {
        let vs = vec![
            sv(&[(0, 1), (3, 2)]),
            sv(&[(3, 1), (5, 1)]),
            sv(&[(0, 1), (3, 4), (5, 2)]),
        ];
        assert_eq!(rank(vs), 2);
        assert_eq!(rank(vec![sv(&[]), sv(&[(7, 3)])]), 1);
    }

    #[test]
    fn nullspace_of_rank_one() {
        // x + 2y - z = 0
        let a = vec![vec![g(1), g(2), g(-1)]];
        let ns = nullspace(a.clone(), 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = a[0]
                .iter()
                .zip(v)
                .fold(GaussRat::zero(), |acc, (x, y)| &acc + &(x * y));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn nullspace_of_invertible_is_trivial() {
        let a = vec![vec![g(2), g(1)], vec![g(1), GaussRat::i()]];
        assert!(nullspace(a, 2).is_empty());
    }
}
