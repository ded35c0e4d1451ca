//! Dense linear algebra for the small systems produced by exponent tables.
//!
//! Every system solved here is at most a few dozen unknowns, so plain
//! Gaussian elimination with partial pivoting is used throughout.

/// Pivot magnitude at or below which a system is declared singular.
pub const PIVOT_EPS: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut out = Matrix::zeros(n, m);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), m, "ragged matrix rows");
            out.data[i * m..(i + 1) * m].copy_from_slice(r);
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
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
}

/// Outcome of a successful elimination.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: Vec<f64>,
    /// Product of the pivots with the permutation sign.
    pub determinant: f64,
}

/// Elimination stopped on a pivot not exceeding [`PIVOT_EPS`].
#[derive(Debug, Clone)]
pub struct Singular {
    /// Column at which elimination failed.
    pub column: usize,
    /// Determinant accumulated up to the failing column (times the tiny pivot).
    pub determinant: f64,
}

/// Solves `a · x = b` for square `a`.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Solved, Singular> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve requires a square matrix");
    assert_eq!(b.len(), n);

    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut det = 1.0;

    for col in 0..n {
        let (piv_row, piv_abs) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= PIVOT_EPS {
            return Err(Singular {
                column: col,
                determinant: det * m.get(piv_row, col),
            });
        }
        if piv_row != col {
            m.swap_rows(piv_row, col);
            rhs.swap(piv_row, col);
            det = -det;
        }
        let p = m.get(col, col);
        det *= p;
        for r in col + 1..n {
            let f = m.get(r, col) / p;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                let v = m.get(r, c) - f * m.get(col, c);
                m.set(r, c, v);
            }
            rhs[r] -= f * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m.get(i, j) * x[j];
        }
        x[i] = s / m.get(i, i);
    }
    Ok(Solved { x, determinant: det })
}

/// Numerical rank by elimination with full pivoting.
pub fn rank(a: &Matrix, tol: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    let mut used_col = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best = (0, 0, 0.0);
        for r in rank..rows {
            for c in (0..cols).filter(|&c| !used_col[c]) {
                let v = m.get(r, c).abs();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        let (pr, pc, _) = best;
        m.swap_rows(pr, rank);
        used_col[pc] = true;
        let p = m.get(rank, pc);
        for r in rank + 1..rows {
            let f = m.get(r, pc) / p;
            for c in 0..cols {
                let v = m.get(r, c) - f * m.get(rank, c);
                m.set(r, c, v);
            }
        }
        rank += 1;
    }
    rank
}
