//! Exact linear algebra over ℚ.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rational;

/// Rank of a dense matrix given by rows.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for j in c..ncols {
            rows[r][j] = &rows[r][j] * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Sparse row: column index → nonzero coefficient.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Incremental sparse Gaussian elimination for `A x = b`.
///
/// Rows are reduced against the current pivots as they arrive, with the
/// pivot of each row being its smallest column. Free variables are set to
/// zero in [`SparseSolver::solve`], so the solution favours low columns.
#[derive(Default, Clone, Debug)]
pub struct SparseSolver {
    // pivot column → (row normalized so pivot coefficient is 1, rhs)
    pivots: BTreeMap<usize, (SparseRow, Rational)>,
    inconsistent: Option<usize>,
    nrows: usize,
}

fn axpy(row: &mut SparseRow, f: &Rational, other: &SparseRow) {
    for (c, v) in other {
        let e = row.entry(*c).or_insert_with(Rational::zero);
        *e -= f * v;
        if e.is_zero() {
            row.remove(c);
        }
    }
}

impl SparseSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the equation `Σ row[c]·x_c = rhs`.
    pub fn push(&mut self, mut row: SparseRow, mut rhs: Rational) {
        self.nrows += 1;
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some(c) = row.keys().copied().find(|c| self.pivots.contains_key(c)) else {
                break;
            };
            let f = row[&c].clone();
            let (prow, prhs) = &self.pivots[&c];
            axpy(&mut row, &f, prow);
            rhs -= &f * prhs;
        }
        let Some((&c, v)) = row.iter().next() else {
            if !rhs.is_zero() && self.inconsistent.is_none() {
                self.inconsistent = Some(self.nrows - 1);
            }
            return;
        };
        let inv = Rational::one() / v;
        for v in row.values_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        // keep existing pivot rows free of the new pivot column
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(f) = prow.get(&c).cloned() {
                axpy(prow, &f, &row);
                *prhs -= &f * &rhs;
            }
        }
        self.pivots.insert(c, (row, rhs));
    }

    pub fn is_consistent(&self) -> bool {
        self.inconsistent.is_none()
    }

    /// Index (in push order) of the first equation found inconsistent.
    pub fn first_inconsistent(&self) -> Option<usize> {
        self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A solution with all free variables zero, or `None` if inconsistent.
    pub fn solve(&self) -> Option<BTreeMap<usize, Rational>> {
        if self.inconsistent.is_some() {
            return None;
        }
        // rows are fully reduced against every other pivot column
        Some(
            self.pivots
                .iter()
                .filter(|(_, (_, rhs))| !rhs.is_zero())
                .map(|(c, (_, rhs))| (*c, rhs.clone()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|(c, v)| (*c, rat(*v))).collect()
    }

    #[test]
    fn dense_rank() {
        let m = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)], vec![rat(0), rat(1)]];
        assert_eq!(rank(m), 2);
        assert_eq!(rank(vec![vec![rat(0), rat(0)]]), 0);
    }

    #[test]
    fn sparse_solve_and_check() {
        let mut s = SparseSolver::new();
        s.push(row(&[(0, 1), (1, 1)]), rat(3));
        s.push(row(&[(1, 2)]), rat(1));
        let x = s.solve().unwrap();
        assert_eq!(x[&0], ratio(5, 2));
        assert_eq!(x[&1], ratio(1, 2));
        s.push(row(&[(0, 1)]), rat(0));
        assert!(!s.is_consistent());
        assert_eq!(s.first_inconsistent(), Some(2));
    }

    #[test]
    fn free_variables_are_zero() {
        let mut s = SparseSolver::new();
        s.push(row(&[(0, 1), (3, 1)]), rat(2));
        let x = s.solve().unwrap();
        assert_eq!(x.get(&3), None);
        assert_eq!(x[&0], rat(2));
    }
}
