//! Least-squares systems for the gradient and Laplacian energies.
//!
//! Each energy term becomes one row of a rectangular system `A x = b`.
//! Coefficients that hit a constrained vertex are moved to the right hand
//! side (`b_row -= coef * value`), and one unit row per constraint is appended
//! so the constrained values are also stated explicitly. The system actually
//! iterated on is the normal system `A^T A x = A^T b`.
//!
//! Laplacian rows use the integer stencil `(-1, 2, -1)`, twice the
//! `(-1/2, 1, -1/2)` form of the energy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dim, GridSpec, VertexId};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyKind {
    /// Sum of squared differences across grid edges.
    Gradient,
    /// Sum of squared deviations from the mean of the two axis neighbors.
    Laplacian,
}

impl fmt::Display for EnergyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyKind::Gradient => "gradient",
            EnergyKind::Laplacian => "laplacian",
        })
    }
}

impl FromStr for EnergyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gradient" => Ok(EnergyKind::Gradient),
            "laplacian" => Ok(EnergyKind::Laplacian),
            other => Err(format!("unknown energy '{other}' (expected gradient or laplacian)")),
        }
    }
}

/// A hard value for one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint<T> {
    pub vertex: VertexId,
    pub value: T,
}

impl<T> Constraint<T> {
    pub fn new(vertex: usize, value: T) -> Self {
        Self {
            vertex: VertexId(vertex),
            value,
        }
    }
}

/// Constraints on distinct vertices, kept in insertion order (the order of
/// the appended unit rows).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<T> {
    items: Vec<Constraint<T>>,
}

impl<T: Scalar> ConstraintSet<T> {
    pub fn new(items: Vec<Constraint<T>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &items {
            if !seen.insert(c.vertex) {
                return Err(Error::domain(format!("vertex {} is constrained more than once", c.vertex)));
            }
        }
        Ok(Self { items })
    }

    /// Shorthand for `(vertex, value)` pairs.
    pub fn from_pairs(pairs: &[(usize, T)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(v, x)| Constraint::new(v, x)).collect())
    }

    /// Default 2D placement: corners `(0,0)` and `(n-1,n-1)` plus the center,
    /// with values `0, 0, 1`.
    pub fn corners_and_center(grid: &GridSpec) -> Result<Self> {
        let n = grid.side();
        let c = n / 2;
        Self::new(vec![
            Constraint {
                vertex: grid.vertex_index(0, 0)?,
                value: T::zero(),
            },
            Constraint {
                vertex: grid.vertex_index(n - 1, if grid.dim() == Dim::TwoD { n - 1 } else { 0 })?,
                value: T::zero(),
            },
            Constraint {
                vertex: grid.vertex_index(c, if grid.dim() == Dim::TwoD { c } else { 0 })?,
                value: T::one(),
            },
        ])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint<T>> {
        self.items.iter()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.items.iter().map(|c| c.vertex).collect()
    }

    pub fn value_of(&self, v: VertexId) -> Option<T> {
        self.items.iter().find(|c| c.vertex == v).map(|c| c.value)
    }

    fn lookup(&self) -> BTreeMap<usize, T> {
        self.items.iter().map(|c| (c.vertex.0, c.value)).collect()
    }
}

/// Rectangular system `A x = b` before normalization.
#[derive(Debug, Clone)]
pub struct LeastSquaresSystem<T> {
    pub matrix: SparseMatrix<T>,
    pub rhs: Vec<T>,
    pub constraints: ConstraintSet<T>,
    pub grid: GridSpec,
    pub energy: EnergyKind,
    /// Number of leading energy rows; the remaining rows are constraint rows.
    pub objective_rows: usize,
    /// Non-fatal diagnostics, e.g. a normal matrix that is only semidefinite.
    pub warnings: Vec<String>,
}

/// Square symmetric system `M x = rhs` with `M = A^T A`, `rhs = A^T b`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSystem<T> {
    pub matrix: SparseMatrix<T>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> NormalSystem<T> {
    pub fn new(matrix: SparseMatrix<T>, rhs: Vec<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != rhs.len() {
            return Err(Error::domain(format!(
                "normal system needs a square matrix matching rhs: {}x{} vs {}",
                matrix.rows(),
                matrix.cols(),
                rhs.len()
            )));
        }
        Ok(Self { matrix, rhs })
    }

    pub fn order(&self) -> usize {
        self.rhs.len()
    }

    pub fn cast<U: Scalar>(&self) -> NormalSystem<U> {
        NormalSystem {
            matrix: self.matrix.cast(),
            rhs: self.rhs.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Energy term stencils as `(vertex, coefficient)` lists, in row order.
fn stencil_rows<T: Scalar>(grid: &GridSpec, energy: EnergyKind) -> Vec<Vec<(usize, T)>> {
    let one = T::one();
    let two = T::lit(2.0);
    match energy {
        EnergyKind::Gradient => grid
            .edges()
            .into_iter()
            .map(|(lo, hi)| vec![(lo, one), (hi, -one)])
            .collect(),
        EnergyKind::Laplacian => {
            let n = grid.side();
            let line = |prev: usize, v: usize, next: usize| vec![(prev, -one), (v, two), (next, -one)];
            match grid.dim() {
                Dim::OneD => (1..n - 1).map(|i| line(i - 1, i, i + 1)).collect(),
                Dim::TwoD => {
                    let mut rows = Vec::new();
                    for i in 0..n {
                        for j in 0..n {
                            let v = n * i + j;
                            let row_interior = j > 0 && j + 1 < n;
                            let col_interior = i > 0 && i + 1 < n;
                            // Interior vertices get both stencils; boundary
                            // vertices the one along their boundary line;
                            // corners none.
                            if row_interior {
                                rows.push(line(v - 1, v, v + 1));
                            }
                            if col_interior {
                                rows.push(line(v - n, v, v + n));
                            }
                        }
                    }
                    rows
                }
            }
        }
    }
}

fn assemble<T: Scalar>(grid: &GridSpec, energy: EnergyKind, constraints: &ConstraintSet<T>) -> Result<LeastSquaresSystem<T>> {
    if constraints.is_empty() {
        return Err(Error::domain(format!(
            "{energy} energy on {grid} needs at least one constraint (the system is singular otherwise)"
        )));
    }
    for c in constraints.iter() {
        grid.check(c.vertex)?;
    }
    let fixed = constraints.lookup();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for stencil in stencil_rows::<T>(grid, energy) {
        let mut b = T::zero();
        let mut kept = Vec::with_capacity(stencil.len());
        for (v, coef) in stencil {
            match fixed.get(&v) {
                Some(&value) => b -= coef * value,
                None => kept.push((v, coef)),
            }
        }
        if kept.is_empty() && b.is_zero() {
            continue;
        }
        rows.push(kept);
        rhs.push(b);
    }
    let objective_rows = rows.len();
    for c in constraints.iter() {
        rows.push(vec![(c.vertex.0, T::one())]);
        rhs.push(c.value);
    }
    let matrix = SparseMatrix::from_rows(grid.vertex_count(), rows)?;
    let warnings = null_space_warning(grid, energy, constraints).into_iter().collect();
    Ok(LeastSquaresSystem {
        matrix,
        rhs,
        constraints: constraints.clone(),
        grid: *grid,
        energy,
        objective_rows,
        warnings,
    })
}

/// The Laplacian energy vanishes on affine functions (1D) and on bilinear
/// functions `a + b i + c j + d i j` (2D, corners carry no rows). The normal
/// matrix is definite only if the constraints pin that space.
fn null_space_warning<T: Scalar>(grid: &GridSpec, energy: EnergyKind, constraints: &ConstraintSet<T>) -> Option<String> {
    if energy != EnergyKind::Laplacian {
        return None;
    }
    let n = grid.side();
    let basis: Vec<Vec<f64>> = constraints
        .iter()
        .map(|c| {
            let v = c.vertex.0;
            match grid.dim() {
                Dim::OneD => vec![1.0, v as f64],
                Dim::TwoD => {
                    let (i, j) = ((v / n) as f64, (v % n) as f64);
                    vec![1.0, i, j, i * j]
                }
            }
        })
        .collect();
    let needed = if grid.dim() == Dim::OneD { 2 } else { 4 };
    let rank = numeric_rank(basis, needed);
    (rank < needed).then(|| {
        format!(
            "laplacian normal matrix is only positive semidefinite: constraints pin {rank} of {needed} null-space directions"
        )
    })
}

fn numeric_rank(mut rows: Vec<Vec<f64>>, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[p][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            let f = rows[r][col] / rows[rank][col];
            for c in col..cols {
                rows[r][c] -= f * rows[rank][c];
            }
        }
        rank += 1;
    }
    rank
}

pub fn assemble_gradient<T: Scalar>(grid: &GridSpec, constraints: &ConstraintSet<T>) -> Result<LeastSquaresSystem<T>> {
    assemble(grid, EnergyKind::Gradient, constraints)
}

pub fn assemble_laplacian<T: Scalar>(grid: &GridSpec, constraints: &ConstraintSet<T>) -> Result<LeastSquaresSystem<T>> {
    assemble(grid, EnergyKind::Laplacian, constraints)
}

pub fn assemble_energy<T: Scalar>(
    grid: &GridSpec,
    energy: EnergyKind,
    constraints: &ConstraintSet<T>,
) -> Result<LeastSquaresSystem<T>> {
    assemble(grid, energy, constraints)
}

impl<T: Scalar> LeastSquaresSystem<T> {
    pub fn normal_equations(&self) -> NormalSystem<T> {
        normal_equations(self)
    }

    /// Squared residual of the energy rows, `sum_r (a_r . x - b_r)^2`.
    pub fn objective_residual(&self, x: &[T]) -> Result<T> {
        let ax = self.matrix.mul_vec(x)?;
        Ok(ax[..self.objective_rows]
            .iter()
            .zip(&self.rhs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum())
    }
}

/// `A^T A` by row outer products into the upper triangle, mirrored.
pub fn normal_equations<T: Scalar>(sys: &LeastSquaresSystem<T>) -> NormalSystem<T> {
    let a = &sys.matrix;
    let order = a.cols();
    let mut upper: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); order];
    for r in 0..a.rows() {
        let entries: Vec<(usize, T)> = a.row(r).collect();
        for (k, &(ci, vi)) in entries.iter().enumerate() {
            for &(cj, vj) in &entries[k..] {
                *upper[ci].entry(cj).or_insert_with(T::zero) += vi * vj;
            }
        }
    }
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); order];
    for (i, row) in upper.iter().enumerate() {
        for (&j, &v) in row {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
    }
    let matrix = SparseMatrix::from_rows(order, rows).expect("normal matrix indices are in range");
    let rhs = a.transpose_mul_vec(&sys.rhs).expect("rhs length matches rows");
    NormalSystem { matrix, rhs }
}

/// Energy evaluated straight from its definition, independent of any matrix.
pub fn energy_value<T: Scalar>(grid: &GridSpec, kind: EnergyKind, x: &[T]) -> Result<T> {
    if x.len() != grid.vertex_count() {
        return Err(Error::domain(format!(
            "vector length {} does not match {} vertices of {grid}",
            x.len(),
            grid.vertex_count()
        )));
    }
    let half = T::lit(0.5);
    let sq = |d: T| d * d;
    let n = grid.side();
    let total = match kind {
        EnergyKind::Gradient => grid.edges().into_iter().map(|(u, v)| sq(x[u] - x[v])).sum(),
        EnergyKind::Laplacian => {
            let dev = |prev: usize, v: usize, next: usize| sq(x[v] - half * x[prev] - half * x[next]);
            match grid.dim() {
                Dim::OneD => (1..n - 1).map(|i| dev(i - 1, i, i + 1)).sum(),
                Dim::TwoD => {
                    let mut acc = T::zero();
                    for i in 0..n {
                        for j in 0..n {
                            let v = n * i + j;
                            if j > 0 && j + 1 < n {
                                acc += dev(v - 1, v, v + 1);
                            }
                            if i > 0 && i + 1 < n {
                                acc += dev(v - n, v, v + n);
                            }
                        }
                    }
                    acc
                }
            }
        }
    };
    Ok(total)
}
