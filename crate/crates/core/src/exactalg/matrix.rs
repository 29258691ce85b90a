use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rat;

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

/// Fraction-free row echelon form of an integer-scaled copy of a matrix.
struct Echelon {
    /// Echelon rows over the integers (row space equals the input's).
    rows: Vec<Vec<BigInt>>,
    /// Pivot column of echelon row `i`, for `i < rank`.
    pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    /// Builds a `rows x cols` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rat) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect()
    }

    /// Bareiss elimination: every division below is exact.
    fn echelon(&self) -> Echelon {
        let mut a = self.integer_rows();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in rest.iter_mut() {
                let lead = row[c].clone();
                for j in (c + 1)..self.cols {
                    let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                    row[j] = v / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon { rows: a, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Exact basis of the null space.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let ech = self.echelon();
        let rank = ech.pivots.len();
        // back-substitute to reduced form over the rationals
        let mut red: Vec<Vec<Rat>> =
            ech.rows.iter().map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
        for i in (0..rank).rev() {
            let pc = ech.pivots[i];
            let inv = red[i][pc].recip();
            for x in red[i].iter_mut() {
                *x *= &inv;
            }
            for k in 0..i {
                let f = red[k][pc].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let d = &f * &red[i][j];
                    red[k][j] -= d;
                }
            }
        }
        let is_pivot: Vec<bool> = (0..self.cols).map(|j| ech.pivots.contains(&j)).collect();
        (0..self.cols)
            .filter(|&j| !is_pivot[j])
            .map(|free| {
                let mut v = vec![Rat::zero(); self.cols];
                v[free] = Rat::one();
                for (i, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = -red[i][free].clone();
                }
                v
            })
            .collect()
    }

    /// Rank and the row indices whose standard basis vectors span a
    /// complement of the column space.
    pub fn cokernel_complement(&self) -> (usize, Vec<usize>) {
        let ech = self.transpose().echelon();
        let complement = (0..self.rows).filter(|i| !ech.pivots.contains(i)).collect();
        (ech.pivots.len(), complement)
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let kernel = aug.kernel_basis();
        // a kernel vector with last entry nonzero gives a solution
        let v = kernel.into_iter().find(|v| !v[self.cols].is_zero())?;
        let scale = -v[self.cols].recip();
        Some(v[..self.cols].iter().map(|x| x * &scale).collect())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$}", cells[i * self.cols + j], w = width)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(RatMatrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        assert_eq!(RatMatrix::zeros(2, 4).kernel_basis().len(), 4);
    }

    #[test]
    fn rank_one_kernel() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&k[0][0] * rat(-1, 1), &k[0][1] * rat(2, 1));
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn cokernels() {
        assert_eq!(RatMatrix::identity(2).cokernel_complement(), (2, vec![]));
        assert_eq!(RatMatrix::zeros(3, 1).cokernel_complement(), (0, vec![0, 1, 2]));
        let (r, c) = RatMatrix::from_i64(&[&[1], &[1]]).cokernel_complement();
        assert_eq!((r, c.len()), (1, 1));
    }

    #[test]
    fn bareiss_handles_rank_deficient_columns() {
        let m = RatMatrix::from_i64(&[&[0, 1, 2, 3], &[0, 2, 4, 7], &[0, 0, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = RatMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        let x = m.solve(&[rat(3, 1), rat(1, 1)]).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
        let s = RatMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[rat(1, 1), rat(3, 1)]).is_none());
    }

    #[test]
    fn fractional_entries() {
        let m = RatMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), rat(1, 1)]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }
}
