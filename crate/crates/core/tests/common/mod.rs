//! Reference implementations written from the definitions, sharing no code
//! with the library beyond its public types.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Brute-force `(A, b)` for an energy on an `n`-sided grid: every energy term
/// is written out as a dense row over all vertices, then constrained columns
/// are folded into the right-hand side and unit rows appended.
pub fn brute_force_system(dim: usize, n: usize, laplacian: bool, constraints: &[(usize, f64)]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let count = if dim == 1 { n } else { n * n };
    let idx = |i: usize, j: usize| if dim == 1 { i } else { n * i + j };
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::new();
    if !laplacian {
        if dim == 1 {
            for i in 0..n - 1 {
                terms.push(vec![(i, 1.0), (i + 1, -1.0)]);
            }
        } else {
            for i in 0..n {
                for j in 0..n - 1 {
                    terms.push(vec![(idx(i, j), 1.0), (idx(i, j + 1), -1.0)]);
                }
            }
            for i in 0..n - 1 {
                for j in 0..n {
                    terms.push(vec![(idx(i, j), 1.0), (idx(i + 1, j), -1.0)]);
                }
            }
        }
    } else if dim == 1 {
        for i in 1..n - 1 {
            terms.push(vec![(i - 1, -1.0), (i, 2.0), (i + 1, -1.0)]);
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                if j > 0 && j + 1 < n {
                    terms.push(vec![(idx(i, j - 1), -1.0), (idx(i, j), 2.0), (idx(i, j + 1), -1.0)]);
                }
                if i > 0 && i + 1 < n {
                    terms.push(vec![(idx(i - 1, j), -1.0), (idx(i, j), 2.0), (idx(i + 1, j), -1.0)]);
                }
            }
        }
    }
    let fixed: BTreeMap<usize, f64> = constraints.iter().copied().collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for term in terms {
        let mut row = vec![0.0; count];
        let mut rhs = 0.0;
        for (v, c) in term {
            match fixed.get(&v) {
                Some(value) => rhs -= c * value,
                None => row[v] += c,
            }
        }
        if row.iter().any(|&c| c != 0.0) || rhs != 0.0 {
            a.push(row);
            b.push(rhs);
        }
    }
    for &(v, value) in constraints {
        let mut row = vec![0.0; count];
        row[v] = 1.0;
        a.push(row);
        b.push(value);
    }
    (a, b)
}

/// `A^T A` by the textbook triple loop, accumulating rows in order.
pub fn dense_ata(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut m = vec![vec![0.0; cols]; cols];
    for row in a {
        for i in 0..cols {
            for j in 0..cols {
                if row[i] != 0.0 && row[j] != 0.0 {
                    m[i][j] += row[i] * row[j];
                }
            }
        }
    }
    m
}

pub fn dense_atb(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().zip(b).map(|(row, &bi)| row[j] * bi).sum()).collect()
}

/// Gaussian elimination with partial pivoting on an augmented copy.
pub fn gauss_solve(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.len();
    let mut aug: Vec<Vec<f64>> = m.iter().zip(rhs).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[p][col].abs() < 1e-12 {
            return None;
        }
        aug.swap(col, p);
        for r in col + 1..n {
            let f = aug[r][col] / aug[col][col];
            for c in col..=n {
                aug[r][c] -= f * aug[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| aug[r][c] * x[c]).sum();
        x[r] = (aug[r][n] - s) / aug[r][r];
    }
    Some(x)
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Manhattan distance between flat indices on an `n`-sided grid.
pub fn manhattan(dim: usize, n: usize, u: usize, v: usize) -> usize {
    if dim == 1 {
        u.abs_diff(v)
    } else {
        (u / n).abs_diff(v / n) + (u % n).abs_diff(v % n)
    }
}

/// Reference Gauss-Seidel / SOR sweep on a dense matrix.
pub fn sor_sweep(m: &[Vec<f64>], b: &[f64], omega: f64, x: &mut [f64], reverse: bool) {
    let n = m.len();
    let order: Vec<usize> = if reverse { (0..n).rev().collect() } else { (0..n).collect() };
    for i in order {
        let mut acc = 0.0;
        for j in 0..n {
            if j != i {
                acc += m[i][j] * x[j];
            }
        }
        let gs = (b[i] - acc) / m[i][i];
        x[i] = (1.0 - omega) * x[i] + omega * gs;
    }
}
