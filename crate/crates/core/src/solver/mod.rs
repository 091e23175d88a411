//! LP solving on top of a sparse simplex backend, plus LP-file interchange.

mod lp_format;

use std::time::Duration;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LpProblem, Malformed, Sense};

pub use lp_format::{export_lp_file, parse_lp_file, sanitize_name};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Malformed(#[from] Malformed),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("could not parse LP file at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("solver finished with status {0:?}")]
    NotOptimal(SolveStatus),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Admissible constraint violation, scaled by the row magnitude (see
    /// [`scaled_violation`]).
    pub feasibility_tol: f64,
    /// Relative optimality gap; the simplex backend terminates at a vertex
    /// with no improving reduced cost, which satisfies this by construction.
    pub optimality_tol: f64,
    #[serde(skip)]
    pub time_limit: Option<Duration>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            feasibility_tol: 1e-6,
            optimality_tol: 1e-6,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective value; NaN unless optimal.
    pub objective: f64,
    /// Variable values aligned with the problem; empty unless optimal.
    pub values: Vec<f64>,
    /// Row duals. The simplex backend does not expose them.
    pub duals: Option<Vec<f64>>,
}

impl Solution {
    fn without_point(status: SolveStatus) -> Self {
        Solution {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            duals: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Values of a tagged variable range.
    pub fn tagged<'a>(&'a self, problem: &LpProblem, tag: &str) -> Option<&'a [f64]> {
        let r = problem.tagged(tag)?;
        self.values.get(r)
    }
}

/// Row violation divided by `max(1, |rhs|, max_j |a_j x_j|)`.
///
/// Rows in the capacity-expansion model mix hourly MW values with
/// year-aggregated MWh cuts, so an absolute test would be dominated by
/// floating-point cancellation on the large rows.
pub fn scaled_violation(problem: &LpProblem, values: &[f64]) -> f64 {
    let bounds = problem
        .variables
        .iter()
        .zip(values)
        .map(|(v, &x)| {
            let raw = (v.lower - x).max(x - v.upper).max(0.0);
            raw / x.abs().max(1.0)
        });
    let rows = problem.constraints.iter().map(|c| {
        let scale = c
            .terms
            .iter()
            .map(|&(j, a)| (a * values[j]).abs())
            .fold(c.rhs.abs().max(1.0), f64::max);
        c.violation(values) / scale
    });
    bounds.chain(rows).fold(0.0, f64::max)
}

/// Solves `problem` to optimality.
///
/// Infeasible and unbounded problems are reported through
/// [`Solution::status`]; a returned optimal point always passes the
/// feasibility check, otherwise [`SolverError::Numerical`] is raised.
pub fn solve(problem: &LpProblem, settings: &SolverSettings) -> Result<Solution, SolverError> {
    problem.validate()?;

    let mut backend = Problem::new(OptimizationDirection::Minimize);
    let mut cost = vec![0.0; problem.num_variables()];
    for &(j, c) in &problem.objective {
        cost[j] += c;
    }
    let vars: Vec<_> = problem
        .variables
        .iter()
        .zip(&cost)
        .map(|(v, &c)| backend.add_var(c, (v.lower, v.upper)))
        .collect();
    for row in &problem.constraints {
        let op = match row.sense {
            Sense::Ge => ComparisonOp::Ge,
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
        };
        let expr: Vec<_> = row.terms.iter().map(|&(j, a)| (vars[j], a)).collect();
        backend.add_constraint(expr.as_slice(), op, row.rhs);
    }
    if let Some(limit) = settings.time_limit {
        backend.set_time_limit(limit);
    }

    let outcome = match backend.solve() {
        Ok(outcome) => outcome,
        Err(microlp::Error::Infeasible) => return Ok(Solution::without_point(SolveStatus::Infeasible)),
        Err(microlp::Error::Unbounded) => return Ok(Solution::without_point(SolveStatus::Unbounded)),
        Err(e) => return Err(SolverError::Numerical(e.to_string())),
    };
    let Some(sol) = outcome.solution() else {
        return Ok(Solution::without_point(SolveStatus::IterationLimit));
    };

    let values: Vec<f64> = problem
        .variables
        .iter()
        .zip(&vars)
        .map(|(v, &var)| sol.var_value_raw(var).clamp(v.lower, v.upper))
        .collect();
    let violation = scaled_violation(problem, &values);
    if !(violation <= settings.feasibility_tol) {
        return Err(SolverError::Numerical(format!(
            "{}: returned point violates constraints by {violation:e}",
            problem.name
        )));
    }
    Ok(Solution {
        status: SolveStatus::Optimal,
        objective: problem.objective_value(&values),
        values,
        duals: None,
    })
}

/// Like [`solve`], but treats any non-optimal status as an error.
pub fn solve_optimal(problem: &LpProblem, settings: &SolverSettings) -> Result<Solution, SolverError> {
    let sol = solve(problem, settings)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        status => Err(SolverError::NotOptimal(status)),
    }
}
