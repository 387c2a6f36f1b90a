//! Jacobi, Gauss-Seidel, SSOR and conjugate gradient over a [`NormalSystem`].
//!
//! All four share one trace contract. An iteration is one full pass over the
//! unknowns (Jacobi, Gauss-Seidel), one forward plus one backward relaxed
//! sweep (SSOR), or one CG step. The residual `||rhs - M x||_2` is evaluated
//! from scratch after every iteration and drives the stopping test.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::NormalSystem;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// SSOR relaxation factor used when none is given.
pub const DEFAULT_OMEGA: f64 = 1.5;

/// Residual tolerance used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolverKind {
    Jacobi,
    GaussSeidel,
    Ssor { omega: f64 },
    ConjugateGradient,
}

impl SolverKind {
    pub const ALL_DEFAULT: [SolverKind; 4] = [
        SolverKind::Jacobi,
        SolverKind::GaussSeidel,
        SolverKind::Ssor { omega: DEFAULT_OMEGA },
        SolverKind::ConjugateGradient,
    ];

    /// Short config/file name.
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Jacobi => "jacobi",
            SolverKind::GaussSeidel => "gauss-seidel",
            SolverKind::Ssor { .. } => "ssor",
            SolverKind::ConjugateGradient => "cg",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SolverKind::Ssor { omega } if !(omega > 0.0 && omega < 2.0) => {
                Err(Error::domain(format!("SSOR relaxation omega = {omega} must lie in (0, 2)")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Ssor { omega } => write!(f, "ssor(omega={omega})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    /// Parses the solver name; SSOR gets [`DEFAULT_OMEGA`].
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "jacobi" => Ok(SolverKind::Jacobi),
            "gauss-seidel" | "gauss_seidel" | "gs" => Ok(SolverKind::GaussSeidel),
            "ssor" => Ok(SolverKind::Ssor { omega: DEFAULT_OMEGA }),
            "cg" | "conjugate-gradient" => Ok(SolverKind::ConjugateGradient),
            other => Err(format!("unknown solver '{other}' (expected jacobi, gauss-seidel, ssor or cg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings<T> {
    pub max_iterations: usize,
    /// Absolute bound on `||rhs - M x||_2`.
    pub tolerance: T,
    pub snapshot_stride: usize,
    /// Explicit snapshot iterations; overrides the stride when set.
    pub snapshot_iterations: Option<Vec<usize>>,
    /// `None` starts from the zero vector.
    pub initial_guess: Option<Vec<T>>,
}

impl<T: Scalar> RunSettings<T> {
    pub fn new(max_iterations: usize) -> Self {
        Self {
            max_iterations,
            tolerance: T::lit(DEFAULT_TOLERANCE),
            snapshot_stride: 1,
            snapshot_iterations: None,
            initial_guess: None,
        }
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_snapshots(mut self, iterations: Vec<usize>) -> Self {
        self.snapshot_iterations = Some(iterations);
        self
    }

    pub fn with_initial_guess(mut self, x0: Vec<T>) -> Self {
        self.initial_guess = Some(x0);
        self
    }

    pub fn validate(&self, order: usize) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be at least 1"));
        }
        if !(self.tolerance >= T::zero()) {
            return Err(Error::domain(format!("tolerance {} must be non-negative", self.tolerance)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::domain("snapshot_stride must be at least 1"));
        }
        if let Some(list) = &self.snapshot_iterations {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain("snapshot iterations must be strictly increasing"));
            }
            if list.last().is_some_and(|&last| last > self.max_iterations) {
                return Err(Error::domain("snapshot iterations must not exceed max_iterations"));
            }
        }
        if let Some(x0) = &self.initial_guess {
            if x0.len() != order {
                return Err(Error::domain(format!(
                    "initial guess has length {}, system order is {order}",
                    x0.len()
                )));
            }
        }
        Ok(())
    }

    fn wants_snapshot(&self, k: usize) -> bool {
        match &self.snapshot_iterations {
            Some(list) => k == 0 || list.binary_search(&k).is_ok(),
            None => k.is_multiple_of(self.snapshot_stride),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// CG met `p^T M p <= 0`: the matrix is not positive definite along `p`.
    Breakdown,
    /// The residual became non-finite.
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub iteration: usize,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace<T> {
    pub solver: SolverKind,
    /// Iteration 0 is the initial guess; iterations strictly increase.
    pub snapshots: Vec<Snapshot<T>>,
    /// `(iteration, ||rhs - M x||_2)` for every iteration including 0.
    pub residual_norms: Vec<(usize, T)>,
    pub iterations_run: usize,
    pub converged_at: Option<usize>,
    pub termination: Termination,
}

impl<T: Scalar> SolveTrace<T> {
    pub fn final_residual(&self) -> T {
        self.residual_norms.last().map(|&(_, r)| r).unwrap_or_else(T::nan)
    }

    pub fn final_solution(&self) -> &[T] {
        &self.snapshots.last().expect("trace holds the initial snapshot").values
    }

    pub fn residual_at(&self, iteration: usize) -> Option<T> {
        self.residual_norms.get(iteration).filter(|(k, _)| *k == iteration).map(|&(_, r)| r)
    }

    pub fn snapshot_at(&self, iteration: usize) -> Option<&Snapshot<T>> {
        self.snapshots.iter().find(|s| s.iteration == iteration)
    }
}

pub fn residual_norm<T: Scalar>(sys: &NormalSystem<T>, x: &[T]) -> Result<T> {
    let mx = sys.matrix.mul_vec(x)?;
    Ok(residual_from(&sys.rhs, &mx))
}

fn residual_from<T: Scalar>(rhs: &[T], mx: &[T]) -> T {
    rhs.iter().zip(mx).map(|(&b, &m)| (b - m) * (b - m)).sum::<T>().sqrt()
}

/// Shared bookkeeping: snapshot policy, residual history, stopping test.
struct Recorder<'a, T: Scalar> {
    sys: &'a NormalSystem<T>,
    settings: &'a RunSettings<T>,
    trace: SolveTrace<T>,
    scratch: Vec<T>,
    /// The initial guess already met a stopping condition.
    done_at_start: bool,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    fn start(solver: SolverKind, sys: &'a NormalSystem<T>, settings: &'a RunSettings<T>) -> Result<(Self, Vec<T>)> {
        settings.validate(sys.order())?;
        solver.validate()?;
        let x0 = settings.initial_guess.clone().unwrap_or_else(|| vec![T::zero(); sys.order()]);
        let mut rec = Self {
            sys,
            settings,
            trace: SolveTrace {
                solver,
                snapshots: Vec::new(),
                residual_norms: Vec::new(),
                iterations_run: 0,
                converged_at: None,
                termination: Termination::MaxIterations,
            },
            scratch: vec![T::zero(); sys.order()],
            done_at_start: false,
        };
        rec.done_at_start = rec.observe(0, &x0);
        Ok((rec, x0))
    }

    /// Records iterate `k`; returns true when the run should stop.
    fn observe(&mut self, k: usize, x: &[T]) -> bool {
        self.sys.matrix.mul_vec_into(x, &mut self.scratch);
        let r = residual_from(&self.sys.rhs, &self.scratch);
        self.trace.iterations_run = k;
        self.trace.residual_norms.push((k, r));
        if self.settings.wants_snapshot(k) {
            self.trace.snapshots.push(Snapshot {
                iteration: k,
                values: x.to_vec(),
            });
        }
        if r <= self.settings.tolerance {
            self.trace.converged_at = Some(k);
            self.trace.termination = Termination::Converged;
            true
        } else if !r.is_finite() {
            self.trace.termination = Termination::Diverged;
            true
        } else {
            k >= self.settings.max_iterations
        }
    }

    fn stop(&mut self, termination: Termination) {
        self.trace.termination = termination;
    }

    fn finish(mut self, x: &[T]) -> SolveTrace<T> {
        let k = self.trace.iterations_run;
        let has_last = self.trace.snapshots.last().is_some_and(|s| s.iteration == k);
        if !has_last && self.settings.snapshot_iterations.is_none() {
            self.trace.snapshots.push(Snapshot {
                iteration: k,
                values: x.to_vec(),
            });
        }
        self.trace
    }
}

fn checked_diagonal<T: Scalar>(sys: &NormalSystem<T>) -> Result<Vec<T>> {
    let diag = sys.matrix.diagonal();
    if let Some(v) = diag.iter().position(|d| d.is_zero()) {
        return Err(Error::domain(format!("zero diagonal entry at vertex {v}")));
    }
    Ok(diag)
}

/// `sum_{u != v} M_vu x_u`.
fn off_diagonal_sum<T: Scalar>(sys: &NormalSystem<T>, v: usize, x: &[T]) -> T {
    sys.matrix
        .row(v)
        .filter(|&(u, _)| u != v)
        .fold(T::zero(), |acc, (u, m)| acc + m * x[u])
}

pub fn jacobi_solve<T: Scalar>(sys: &NormalSystem<T>, settings: &RunSettings<T>) -> Result<SolveTrace<T>> {
    let diag = checked_diagonal(sys)?;
    let (mut rec, mut x) = Recorder::start(SolverKind::Jacobi, sys, settings)?;
    if rec.done_at_start {
        return Ok(rec.finish(&x));
    }
    let mut next = vec![T::zero(); sys.order()];
    for k in 1..=settings.max_iterations {
        for (v, out) in next.iter_mut().enumerate() {
            *out = (sys.rhs[v] - off_diagonal_sum(sys, v, &x)) / diag[v];
        }
        std::mem::swap(&mut x, &mut next);
        if rec.observe(k, &x) {
            break;
        }
    }
    Ok(rec.finish(&x))
}

fn relax_sweep<T: Scalar, I: Iterator<Item = usize>>(sys: &NormalSystem<T>, diag: &[T], omega: T, x: &mut [T], order: I) {
    let keep = T::one() - omega;
    for v in order {
        let gs = (sys.rhs[v] - off_diagonal_sum(sys, v, x)) / diag[v];
        x[v] = keep * x[v] + omega * gs;
    }
}

pub fn gauss_seidel_solve<T: Scalar>(sys: &NormalSystem<T>, settings: &RunSettings<T>) -> Result<SolveTrace<T>> {
    let diag = checked_diagonal(sys)?;
    let (mut rec, mut x) = Recorder::start(SolverKind::GaussSeidel, sys, settings)?;
    if rec.done_at_start {
        return Ok(rec.finish(&x));
    }
    let n = sys.order();
    for k in 1..=settings.max_iterations {
        for v in 0..n {
            x[v] = (sys.rhs[v] - off_diagonal_sum(sys, v, &x)) / diag[v];
        }
        if rec.observe(k, &x) {
            break;
        }
    }
    Ok(rec.finish(&x))
}

pub fn ssor_solve<T: Scalar>(sys: &NormalSystem<T>, settings: &RunSettings<T>, omega: f64) -> Result<SolveTrace<T>> {
    let kind = SolverKind::Ssor { omega };
    kind.validate()?;
    let diag = checked_diagonal(sys)?;
    let (mut rec, mut x) = Recorder::start(kind, sys, settings)?;
    if rec.done_at_start {
        return Ok(rec.finish(&x));
    }
    let w = T::lit(omega);
    let n = sys.order();
    for k in 1..=settings.max_iterations {
        relax_sweep(sys, &diag, w, &mut x, 0..n);
        relax_sweep(sys, &diag, w, &mut x, (0..n).rev());
        if rec.observe(k, &x) {
            break;
        }
    }
    Ok(rec.finish(&x))
}

/// Plain (unpreconditioned) conjugate gradient.
pub fn cg_solve<T: Scalar>(sys: &NormalSystem<T>, settings: &RunSettings<T>) -> Result<SolveTrace<T>> {
    if !sys.matrix.is_symmetric() {
        return Err(Error::domain("conjugate gradient needs a symmetric matrix"));
    }
    let (mut rec, mut x) = Recorder::start(SolverKind::ConjugateGradient, sys, settings)?;
    if rec.done_at_start {
        return Ok(rec.finish(&x));
    }
    let n = sys.order();
    let mut mp = vec![T::zero(); n];
    sys.matrix.mul_vec_into(&x, &mut mp);
    let mut r: Vec<T> = sys.rhs.iter().zip(&mp).map(|(&b, &m)| b - m).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for k in 1..=settings.max_iterations {
        sys.matrix.mul_vec_into(&p, &mut mp);
        let curvature = dot(&p, &mp);
        if !(curvature > T::zero()) || rr.is_zero() {
            rec.stop(Termination::Breakdown);
            break;
        }
        let alpha = rr / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        if rec.observe(k, &x) {
            break;
        }
    }
    Ok(rec.finish(&x))
}

/// Runs the solver named by `kind`.
pub fn solve<T: Scalar>(kind: SolverKind, sys: &NormalSystem<T>, settings: &RunSettings<T>) -> Result<SolveTrace<T>> {
    match kind {
        SolverKind::Jacobi => jacobi_solve(sys, settings),
        SolverKind::GaussSeidel => gauss_seidel_solve(sys, settings),
        SolverKind::Ssor { omega } => ssor_solve(sys, settings, omega),
        SolverKind::ConjugateGradient => cg_solve(sys, settings),
    }
}

/// `1/2 x^T M x - rhs^T x`, the quadratic CG minimizes.
pub fn quadratic_energy<T: Scalar>(sys: &NormalSystem<T>, x: &[T]) -> Result<T> {
    let mx = sys.matrix.mul_vec(x)?;
    Ok(T::lit(0.5) * dot(x, &mx) - dot(&sys.rhs, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_gradient, assemble_laplacian, ConstraintSet};
    use crate::grid::GridSpec;
    use crate::sparse::SparseMatrix;

    fn identity_system(rhs: Vec<f64>) -> NormalSystem<f64> {
        NormalSystem::new(SparseMatrix::identity(rhs.len()), rhs).unwrap()
    }

    fn line(lap: bool, n: usize, pairs: &[(usize, f64)]) -> NormalSystem<f64> {
        let g = GridSpec::one_d(n).unwrap();
        let cs = ConstraintSet::from_pairs(pairs).unwrap();
        let sys = if lap {
            assemble_laplacian(&g, &cs)
        } else {
            assemble_gradient(&g, &cs)
        };
        sys.unwrap().normal_equations()
    }

    #[test]
    fn identity_is_solved_in_one_iteration_by_every_solver() {
        let sys = identity_system(vec![2.0, 6.0]);
        for kind in [
            SolverKind::Jacobi,
            SolverKind::GaussSeidel,
            SolverKind::Ssor { omega: 1.0 },
            SolverKind::ConjugateGradient,
        ] {
            let t = solve(kind, &sys, &RunSettings::new(10)).unwrap();
            assert_eq!(t.converged_at, Some(1), "{kind}");
            assert_eq!(t.final_solution(), &[2.0, 6.0], "{kind}");
        }
    }

    #[test]
    fn relaxed_ssor_on_identity_contracts_by_one_minus_omega_squared() {
        // Forward sweep gives omega*b, backward (1 - (1 - omega)^2) b.
        let sys = identity_system(vec![2.0, 6.0]);
        for omega in [0.5, 0.7, 1.5, 1.9] {
            let t = ssor_solve(&sys, &RunSettings::new(1), omega).unwrap();
            let gain = 1.0 - (1.0 - omega) * (1.0 - omega);
            for (got, b) in t.final_solution().iter().zip([2.0, 6.0]) {
                assert!((got - gain * b).abs() < 1e-15, "omega={omega}");
            }
        }
    }

    #[test]
    fn jacobi_single_step_is_rhs_over_diagonal() {
        let sys = line(false, 5, &[(0, 2.0), (4, 6.0)]);
        let t = jacobi_solve(&sys, &RunSettings::new(1)).unwrap();
        assert_eq!(t.final_solution(), &[2.0, 1.0, 0.0, 3.0, 6.0]);
        assert_eq!(t.termination, Termination::MaxIterations);
    }

    #[test]
    fn jacobi_converges_to_ramp() {
        let sys = line(false, 5, &[(0, 2.0), (4, 6.0)]);
        let t = jacobi_solve(&sys, &RunSettings::new(10_000)).unwrap();
        assert!(t.converged_at.is_some());
        for (got, want) in t.final_solution().iter().zip([2.0, 3.0, 4.0, 5.0, 6.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_diagonal_is_reported() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let sys = NormalSystem::new(m, vec![1.0, 0.0]).unwrap();
        let err = jacobi_solve(&sys, &RunSettings::new(5)).unwrap_err().to_string();
        assert!(err.contains("vertex 1"), "{err}");
        assert!(gauss_seidel_solve(&sys, &RunSettings::new(5)).is_err());
    }

    #[test]
    fn ssor_rejects_bad_omega() {
        let sys = identity_system(vec![1.0]);
        for omega in [0.0, 2.0, -1.0, f64::NAN] {
            assert!(ssor_solve(&sys, &RunSettings::new(3), omega).is_err());
        }
    }

    #[test]
    fn ssor_with_unit_omega_is_symmetric_gauss_seidel() {
        let sys = line(true, 7, &[(0, 1.0), (6, -2.0)]);
        let ssor = ssor_solve(&sys, &RunSettings::new(1), 1.0).unwrap();
        let mut x = vec![0.0; 7];
        let diag = sys.matrix.diagonal();
        for order in [(0..7).collect::<Vec<_>>(), (0..7).rev().collect()] {
            for v in order {
                x[v] = (sys.rhs[v] - off_diagonal_sum(&sys, v, &x)) / diag[v];
            }
        }
        assert_eq!(ssor.final_solution(), x.as_slice());
    }

    #[test]
    fn ssor_beats_gauss_seidel_on_locked_line() {
        let sys = line(false, 20, &[(0, 2.0), (19, 6.0)]);
        let s = RunSettings::new(120).with_tolerance(0.0);
        let gs = gauss_seidel_solve(&sys, &s).unwrap();
        let ssor = ssor_solve(&sys, &s, 1.5).unwrap();
        assert!(ssor.final_residual() < gs.final_residual());
    }

    #[test]
    fn cg_iteration_counts() {
        let grad = line(false, 20, &[(0, 2.0), (19, 6.0)]);
        let t = cg_solve(&grad, &RunSettings::new(1000)).unwrap();
        assert!(t.converged_at.unwrap() <= 20, "{:?}", t.converged_at);
        let lap = line(true, 20, &[(0, 2.0), (19, 6.0)]);
        let t = cg_solve(&lap, &RunSettings::new(1000)).unwrap();
        assert!(t.converged_at.unwrap() > 20, "{:?}", t.converged_at);
    }

    #[test]
    fn cg_rejects_asymmetric_and_flags_indefinite() {
        let m = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let sys = NormalSystem::new(m, vec![1.0, 1.0]).unwrap();
        assert!(cg_solve(&sys, &RunSettings::new(5)).is_err());
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let sys = NormalSystem::new(m, vec![0.0, 1.0]).unwrap();
        let t = cg_solve(&sys, &RunSettings::new(5)).unwrap();
        assert_eq!(t.termination, Termination::Breakdown);
        assert_eq!(t.iterations_run, 0);
        assert!(t.converged_at.is_none());
    }

    #[test]
    fn residual_norm_examples() {
        let sys = line(false, 5, &[(0, 2.0), (4, 6.0)]);
        assert_eq!(residual_norm(&sys, &[0.0; 5]).unwrap(), 80f64.sqrt());
        assert_eq!(residual_norm(&identity_system(vec![0.0; 3]), &[0.0; 3]).unwrap(), 0.0);
        assert!(residual_norm(&sys, &[0.0; 4]).is_err());
    }

    #[test]
    fn snapshot_policies() {
        let sys = line(false, 20, &[(0, 2.0), (19, 6.0)]);
        let s = RunSettings::new(100).with_tolerance(0.0).with_stride(10);
        let t = jacobi_solve(&sys, &s).unwrap();
        assert_eq!(t.snapshots.len(), 11);
        assert_eq!(t.residual_norms.len(), 101);
        let s = RunSettings::new(100).with_tolerance(0.0).with_snapshots(vec![1, 5, 50]);
        let t = gauss_seidel_solve(&sys, &s).unwrap();
        let its: Vec<_> = t.snapshots.iter().map(|s| s.iteration).collect();
        assert_eq!(its, vec![0, 1, 5, 50]);
        // Stride runs always keep the final iterate.
        let s = RunSettings::new(100).with_stride(7);
        let t = cg_solve(&sys, &s).unwrap();
        assert_eq!(t.snapshots.last().unwrap().iteration, t.iterations_run);
    }

    #[test]
    fn invalid_settings() {
        let sys = identity_system(vec![1.0, 2.0]);
        assert!(jacobi_solve(&sys, &RunSettings::new(0)).is_err());
        assert!(jacobi_solve(&sys, &RunSettings::new(5).with_stride(0)).is_err());
        assert!(jacobi_solve(&sys, &RunSettings::new(5).with_tolerance(-1.0)).is_err());
        assert!(jacobi_solve(&sys, &RunSettings::new(5).with_snapshots(vec![3, 2])).is_err());
        assert!(jacobi_solve(&sys, &RunSettings::new(5).with_snapshots(vec![6])).is_err());
        assert!(jacobi_solve(&sys, &RunSettings::new(5).with_initial_guess(vec![0.0])).is_err());
    }

    #[test]
    fn converged_initial_guess_stops_at_zero() {
        let sys = identity_system(vec![1.0, 2.0]);
        let t = cg_solve(&sys, &RunSettings::new(5).with_initial_guess(vec![1.0, 2.0])).unwrap();
        assert_eq!(t.converged_at, Some(0));
        assert_eq!(t.snapshots.len(), 1);
    }

    #[test]
    fn jacobi_divergence_is_reported() {
        // Jacobi's iteration matrix has spectral radius > 1 on this system.
        let sys = line(true, 20, &[(0, 2.0), (19, 6.0)]);
        let t = jacobi_solve(&sys, &RunSettings::new(40_000).with_stride(1000)).unwrap();
        assert_eq!(t.termination, Termination::Diverged);
        assert!(t.converged_at.is_none());
    }

    #[test]
    fn runs_in_single_precision() {
        let ne = line(false, 5, &[(0, 2.0), (4, 6.0)]).cast::<f32>();
        let t = cg_solve(&ne, &RunSettings::new(10).with_tolerance(1e-5f32)).unwrap();
        for (got, want) in t.final_solution().iter().zip([2.0f32, 3.0, 4.0, 5.0, 6.0]) {
            assert!((got - want).abs() < 1e-5);
        }
    }
}
