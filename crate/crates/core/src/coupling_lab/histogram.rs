//! Finite projections of excursion laws.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::linf_norm;
use crate::potential_theory::{box_boundary, QSummary};

/// Summary of one centered excursion through a core box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSummary {
    /// Which center's box was entered.
    pub center: usize,
    /// Entry point relative to the center, on the sphere of radius `L`.
    pub entry: Vec<i64>,
    /// First point outside the halo, relative to the center. Absent on
    /// the limit-law side.
    pub exit: Option<Vec<i64>>,
    /// Distinct cells of the core box visited.
    pub trace_size: usize,
    /// Steps from entry to last visit, when known.
    pub duration: Option<u64>,
}

impl From<QSummary> for ExcursionSummary {
    fn from(s: QSummary) -> Self {
        Self {
            center: 0,
            entry: s.entry,
            exit: None,
            trace_size: s.trace_size,
            duration: s.duration,
        }
    }
}

/// Geometric buckets `{1}, {2}, {3,4}, {5..8}, ...` indexed from 0.
pub fn trace_bucket(size: usize) -> usize {
    if size <= 1 {
        0
    } else {
        (usize::BITS - (size - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum SummaryAxis {
    EntryPoint,
    TraceSizeBucket,
    Joint,
}

impl std::str::FromStr for SummaryAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entry-point" => Ok(Self::EntryPoint),
            "trace-size-bucket" => Ok(Self::TraceSizeBucket),
            "joint" => Ok(Self::Joint),
            _ => Err(Error::Parameter(format!("unknown summary axis {s:?}"))),
        }
    }
}

/// Counts of summaries over a fixed atom set determined by `(axis, d, L)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryHistogram {
    pub axis: SummaryAxis,
    pub d: usize,
    #[serde(rename = "L")]
    pub radius: usize,
    pub counts: Vec<u64>,
    pub total: u64,
    #[serde(skip)]
    entries: Vec<Vec<i64>>,
    #[serde(skip)]
    entry_index: HashMap<Vec<i64>, usize>,
}

impl SummaryHistogram {
    pub fn new(axis: SummaryAxis, d: usize, radius: usize) -> Self {
        let entries = box_boundary(d, radius);
        let entry_index = entries.iter().enumerate().map(|(i, z)| (z.clone(), i)).collect();
        let buckets = trace_bucket((2 * radius + 1).pow(d as u32)) + 1;
        let atoms = match axis {
            SummaryAxis::EntryPoint => entries.len(),
            SummaryAxis::TraceSizeBucket => buckets,
            SummaryAxis::Joint => entries.len() * buckets,
        };
        Self {
            axis,
            d,
            radius,
            counts: vec![0; atoms],
            total: 0,
            entries,
            entry_index,
        }
    }

    pub fn from_summaries<'a>(
        axis: SummaryAxis,
        d: usize,
        radius: usize,
        summaries: impl IntoIterator<Item = &'a ExcursionSummary>,
    ) -> Result<Self> {
        let mut h = Self::new(axis, d, radius);
        for s in summaries {
            h.add(s)?;
        }
        Ok(h)
    }

    fn buckets(&self) -> usize {
        trace_bucket((2 * self.radius + 1).pow(self.d as u32)) + 1
    }

    pub fn atom_of(&self, s: &ExcursionSummary) -> Result<usize> {
        if s.entry.len() != self.d || linf_norm(&s.entry) != self.radius as i64 {
            return Err(Error::Parameter(format!("entry {:?} is not on the sphere of radius {}", s.entry, self.radius)));
        }
        let e = self.entry_index[&s.entry];
        let b = trace_bucket(s.trace_size);
        Ok(match self.axis {
            SummaryAxis::EntryPoint => e,
            SummaryAxis::TraceSizeBucket => b,
            SummaryAxis::Joint => e * self.buckets() + b,
        })
    }

    pub fn add(&mut self, s: &ExcursionSummary) -> Result<()> {
        let a = self.atom_of(s)?;
        self.counts[a] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn same_atoms(&self, other: &Self) -> bool {
        self.axis == other.axis && self.d == other.d && self.radius == other.radius
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if !self.same_atoms(other) {
            return Err(Error::AtomMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    /// Normalized frequencies (all zero for an empty histogram).
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Entry points in atom order, for the entry-point axis.
    pub fn entry_atoms(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Histogram with the same atoms and the given counts.
    pub fn with_counts(&self, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != self.counts.len() {
            return Err(Error::AtomMismatch);
        }
        let mut h = self.clone();
        h.total = counts.iter().sum();
        h.counts = counts;
        Ok(h)
    }
}
