//! Grouping of supply-gap hours into critical periods and their scoring.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::TechnologyCatalog;
use crate::design::{potential_supply, SystemDesign};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Inclusive range of hours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HourSpan {
    pub start: usize,
    pub end: usize,
}

impl HourSpan {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidParameter(format!("empty period {start}..={end}")));
        }
        Ok(HourSpan { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hours(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn contains(&self, hour: usize) -> bool {
        self.start <= hour && hour <= self.end
    }

    pub fn overlaps(&self, other: &HourSpan) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    /// Widens the span by `margin` hours on both sides, clipped to the
    /// horizon.
    pub fn padded(&self, margin: usize, horizon: usize) -> HourSpan {
        HourSpan {
            start: self.start.saturating_sub(margin),
            end: (self.end + margin).min(horizon.saturating_sub(1)),
        }
    }

    pub fn check_within(&self, horizon: usize) -> Result<()> {
        if self.end >= horizon {
            return Err(Error::InvalidParameter(format!(
                "period {self} exceeds horizon {horizon}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for HourSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// A period of a scenario scored against a design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPeriod {
    pub scenario_id: String,
    pub span: HourSpan,
    /// Mean hourly surplus of full-load potential supply over demand;
    /// negative values are deficits.
    pub avg_gap: f64,
    /// Summed capacity factors of all supply technologies over the span.
    pub flh_sum: f64,
    pub iteration_found: usize,
}

/// Single-linkage clustering of gap hours along the time axis.
///
/// Hours with a gap above `eps_hour` are joined into one period when the
/// distance between neighbouring gap hours is at most `max_join_distance`.
/// The result is sorted and pairwise disjoint.
pub fn cluster_gap_hours(gaps: &[f64], max_join_distance: usize, eps_hour: f64) -> Vec<HourSpan> {
    let mut spans: Vec<HourSpan> = Vec::new();
    for hour in gaps
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > eps_hour)
        .map(|(t, _)| t)
    {
        match spans.last_mut() {
            Some(last) if hour - last.end <= max_join_distance => last.end = hour,
            _ => spans.push(HourSpan { start: hour, end: hour }),
        }
    }
    spans
}

/// Mean over `span` of full-load potential supply minus demand.
pub fn average_hourly_gap(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    span: HourSpan,
) -> Result<f64> {
    span.check_within(scenario.horizon())?;
    let mut sum = 0.0;
    for t in span.hours() {
        sum += potential_supply(design, scenario, catalog, t)? - scenario.demand[t];
    }
    Ok(sum / span.len() as f64)
}

/// Summed capacity factors of all supply technologies over `span`.
pub fn flh_sum(scenario: &Scenario, catalog: &TechnologyCatalog, span: HourSpan) -> f64 {
    catalog
        .supply()
        .map(|(_, t)| scenario.full_load_hours(&t.id, span.hours()))
        .sum()
}

pub fn assess_period(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    span: HourSpan,
    iteration: usize,
) -> Result<CriticalPeriod> {
    Ok(CriticalPeriod {
        scenario_id: scenario.year_id.clone(),
        span,
        avg_gap: average_hourly_gap(design, scenario, catalog, span)?,
        flh_sum: flh_sum(scenario, catalog, span),
        iteration_found: iteration,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedPeriod {
    pub period: CriticalPeriod,
    /// Full load hours of the current reference data over the span minus
    /// those of the donor; positive when the donor is poorer.
    pub flh_reduction: f64,
}

impl RankedPeriod {
    fn deficit(&self) -> bool {
        self.period.avg_gap < 0.0
    }
}

fn rank_order(a: &RankedPeriod, b: &RankedPeriod) -> Ordering {
    let by_key = match (a.deficit(), b.deficit()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a.period.avg_gap.total_cmp(&b.period.avg_gap),
        (false, false) => b.flh_reduction.total_cmp(&a.flh_reduction),
    };
    by_key
        .then_with(|| a.period.scenario_id.cmp(&b.period.scenario_id))
        .then_with(|| a.period.span.start.cmp(&b.period.span.start))
}

/// Orders candidate splice periods: deficit periods first, most negative
/// first; then by how much the donor lowers full load hours relative to the
/// current reference data.
pub fn rank_candidate_periods(
    reference: &Scenario,
    catalog: &TechnologyCatalog,
    periods: Vec<CriticalPeriod>,
) -> Result<Vec<RankedPeriod>> {
    let mut ranked = periods
        .into_iter()
        .map(|p| {
            p.span.check_within(reference.horizon())?;
            let reduction = flh_sum(reference, catalog, p.span) - p.flh_sum;
            Ok(RankedPeriod {
                period: p,
                flh_reduction: reduction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(rank_order);
    Ok(ranked)
}
