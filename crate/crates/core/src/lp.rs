//! Backend-independent linear program representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LpConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` violate the row, zero when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimisation problem over bounded continuous variables.
///
/// `tags` names contiguous index ranges of variables (e.g. `capacity`,
/// `shedding`) so that callers can pull typed results out of a solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub name: String,
    pub variables: Vec<LpVariable>,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<LpConstraint>,
    pub tags: BTreeMap<String, Range<usize>>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("malformed problem: {0}")]
pub struct Malformed(pub String);

impl LpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        LpProblem {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        let idx = self.variables.len();
        self.variables.push(LpVariable {
            name: name.into(),
            lower,
            upper,
        });
        if cost != 0.0 {
            self.objective.push((idx, cost));
        }
        idx
    }

    /// Adds a row, merging repeated variables and dropping zero coefficients.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (j, a) in terms {
            *merged.entry(j).or_insert(0.0) += a;
        }
        let terms = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
        self.constraints.push(LpConstraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn tag(&mut self, tag: impl Into<String>, range: Range<usize>) {
        self.tags.insert(tag.into(), range);
    }

    pub fn tagged(&self, tag: &str) -> Option<Range<usize>> {
        self.tags.get(tag).cloned()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(values));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<(), Malformed> {
        let n = self.variables.len();
        for v in &self.variables {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(Malformed(format!(
                    "variable {} has bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(Malformed(format!("variable {} has an empty domain", v.name)));
            }
        }
        for &(j, c) in &self.objective {
            if j >= n || !c.is_finite() {
                return Err(Malformed(format!("objective term ({j}, {c}) invalid")));
            }
        }
        for row in &self.constraints {
            if row.terms.is_empty() {
                return Err(Malformed(format!("row {} is empty", row.name)));
            }
            if !row.rhs.is_finite() {
                return Err(Malformed(format!("row {} has rhs {}", row.name, row.rhs)));
            }
            if let Some(&(j, a)) = row.terms.iter().find(|&&(j, a)| j >= n || !a.is_finite()) {
                return Err(Malformed(format!(
                    "row {} has invalid term ({j}, {a})",
                    row.name
                )));
            }
        }
        for (tag, r) in &self.tags {
            if r.end > n || r.start > r.end {
                return Err(Malformed(format!("tag {tag} range {r:?} out of bounds")));
            }
        }
        Ok(())
    }
}
