//! Dense exact linear algebra over Q: reduced row echelon form, rank,
//! nullspace, and linear solves. Sizes here are small (hundreds of rows),
//! so a dense fraction-free-ish Gauss-Jordan is plenty.

use crate::q::Q;
use num::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>, // row-major
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.at(r, c).recip();
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j) - &(self.at(r, j) * &f);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the (right) nullspace, each vector of length `cols`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut out = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut vec = vec![Q::zero(); self.cols];
            vec[free] = Q::from_integer(1.into());
            for (row, &p) in pivots.iter().enumerate() {
                vec[p] = -m.at(row, free).clone();
            }
            out.push(vec);
        }
        out
    }

    /// Solve self * x = rhs; None if inconsistent. Free variables set to 0.
    pub fn solve(&self, rhs: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, rhs[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug.at(row, self.cols).clone();
        }
        Some(x)
    }
}

/// Incremental row space with expression of each pivot row in terms of the
/// originally inserted rows. Used for quotient constructions where we need
/// certificates, not just ranks.
pub struct RowSpace {
    pub cols: usize,
    /// Echelon rows (not fully reduced upward) with leading column and the
    /// combination of inserted rows producing them.
    rows: Vec<(usize, Vec<Q>, Vec<Q>)>, // (lead, row, combo over inserted rows)
    inserted: usize,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn lead_cols(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.0).collect()
    }

    /// Insert a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: Vec<Q>) -> bool {
        assert_eq!(row.len(), self.cols);
        let idx = self.inserted;
        self.inserted += 1;
        let mut combo = vec![Q::zero(); idx + 1];
        combo[idx] = Q::from_integer(1.into());
        let (row, combo) = self.reduce_row(row, combo);
        if let Some(lead) = row.iter().position(|v| !v.is_zero()) {
            let inv = row[lead].recip();
            let row: Vec<Q> = row.iter().map(|v| v * &inv).collect();
            let combo: Vec<Q> = combo.iter().map(|v| v * &inv).collect();
            let pos = self.rows.partition_point(|r| r.0 < lead);
            self.rows.insert(pos, (lead, row, combo));
            true
        } else {
            false
        }
    }

    fn reduce_row(&self, mut row: Vec<Q>, mut combo: Vec<Q>) -> (Vec<Q>, Vec<Q>) {
        for (lead, r, c) in &self.rows {
            if row[*lead].is_zero() {
                continue;
            }
            let f = row[*lead].clone();
            for j in *lead..self.cols {
                row[j] = &row[j] - &(&r[j] * &f);
            }
            if combo.len() < c.len() {
                combo.resize(c.len(), Q::zero());
            }
            for (j, cv) in c.iter().enumerate() {
                combo[j] = &combo[j] - &(cv * &f);
            }
        }
        (row, combo)
    }

    /// Reduce `row` against the space: returns (residue, combo) such that
    /// row = residue + sum_i combo[i] * inserted_row[i], and the residue has
    /// zeros at all lead columns.
    pub fn decompose(&self, row: Vec<Q>) -> (Vec<Q>, Vec<Q>) {
        let (res, combo) = self.reduce_row(row, vec![Q::zero(); self.inserted]);
        let mut combo = combo;
        combo.resize(self.inserted, Q::zero());
        (res, combo.iter().map(|v| -v.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::qi;

    #[test]
    fn rref_rank_nullspace() {
        let m = Mat::from_rows(vec![
            vec![qi(1), qi(2), qi(3)],
            vec![qi(2), qi(4), qi(6)],
            vec![qi(1), qi(0), qi(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for row in 0..m.rows {
            let mut acc = Q::zero();
            for j in 0..m.cols {
                acc += m.at(row, j) * &ns[0][j];
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = Mat::from_rows(vec![vec![qi(1), qi(1)], vec![qi(1), qi(-1)]]);
        let x = m.solve(&[qi(3), qi(1)]).unwrap();
        assert_eq!(x, vec![qi(2), qi(1)]);
        let s = Mat::from_rows(vec![vec![qi(1), qi(1)], vec![qi(2), qi(2)]]);
        assert!(s.solve(&[qi(1), qi(3)]).is_none());
    }

    #[test]
    fn rowspace_certificates() {
        let mut rs = RowSpace::new(3);
        let r0 = vec![qi(1), qi(2), qi(0)];
        let r1 = vec![qi(0), qi(1), qi(1)];
        assert!(rs.insert(r0.clone()));
        assert!(rs.insert(r1.clone()));
        assert!(!rs.insert(vec![qi(1), qi(3), qi(1)]));
        let target = vec![qi(2), qi(5), qi(7)];
        let (res, combo) = rs.decompose(target.clone());
        // target = res + combo[0]*r0 + combo[1]*r1, res zero at lead cols 0,1
        assert!(res[0].is_zero() && res[1].is_zero());
        for j in 0..3 {
            let re = &res[j] + &(&combo[0] * &r0[j]) + &(&combo[1] * &r1[j]);
            assert_eq!(re, target[j]);
        }
    }
}
