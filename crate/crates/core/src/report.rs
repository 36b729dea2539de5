//! Outcome of an inequality or condition check.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions of the inequality do not hold (negative control).
    NotApplicable,
    /// The weight is outside the class the statement needs; nothing was tested.
    Vacuous,
    /// Run outside the proven range; values are recorded without pass semantics.
    Experimental,
}

impl Status {
    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }
}

/// Which summary of the row ratios is compared against the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// `C_emp = max ratio`.
    MaxRatio,
    /// `max ratio / min ratio`.
    Spread,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub case_id: String,
    pub input_desc: String,
    /// Lattice spacing the row was computed at, when a lattice is involved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub r: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(case_id: impl Into<String>, input_desc: impl Into<String>, r: Option<f64>, lhs: f64, rhs: f64) -> Self {
        Self {
            case_id: case_id.into(),
            input_desc: input_desc.into(),
            h: None,
            r,
            lhs,
            rhs,
            ratio: lhs / rhs,
            pass: true,
        }
    }

    pub fn at_spacing(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }
}

/// Statistic at the base resolution against the refined one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub coarse: f64,
    pub fine: f64,
    /// `|fine − coarse| / coarse`.
    pub drift: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub status: Status,
    pub statistic: Statistic,
    pub c_emp: Option<f64>,
    pub c_min: Option<f64>,
    pub spread: Option<f64>,
    pub cap: f64,
    pub refinement: Option<Refinement>,
    /// Rows dropped as `0/0`.
    pub skipped: usize,
    pub rows: Vec<CheckRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn summarize(rows: &[CheckRow]) -> Option<(f64, f64)> {
    if rows.is_empty() {
        return None;
    }
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Some((max, min))
}

fn statistic_value(stat: Statistic, max: f64, min: f64) -> f64 {
    match stat {
        Statistic::MaxRatio => max,
        Statistic::Spread => max / min,
    }
}

impl CheckReport {
    /// Report with a fixed status and no rows.
    pub fn with_status(id: impl Into<String>, status: Status, note: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            status,
            statistic: Statistic::MaxRatio,
            c_emp: None,
            c_min: None,
            spread: None,
            cap: f64::INFINITY,
            refinement: None,
            skipped: 0,
            rows: Vec::new(),
            notes: vec![note.into()],
        }
    }

    /// Assembles a report from base rows and optional refined rows.
    ///
    /// Passing requires a finite statistic at or below `cap`, and, when refined
    /// rows are given, a relative drift of the statistic at most `drift_bound`.
    pub fn from_rows(
        id: impl Into<String>,
        statistic: Statistic,
        cap: f64,
        mut base: Vec<CheckRow>,
        refined: Option<Vec<CheckRow>>,
        drift_bound: f64,
        skipped: usize,
    ) -> Self {
        let summary = summarize(&base);
        let refinement = match (&summary, &refined) {
            (Some((max, min)), Some(fine_rows)) => summarize(fine_rows).map(|(fmax, fmin)| {
                let coarse = statistic_value(statistic, *max, *min);
                let fine = statistic_value(statistic, fmax, fmin);
                Refinement { coarse, fine, drift: (fine - coarse).abs() / coarse.abs(), bound: drift_bound }
            }),
            _ => None,
        };
        let mut rows = Vec::new();
        let (status, c_emp, c_min, spread) = match summary {
            None => (Status::Vacuous, None, None, None),
            Some((max, min)) => {
                let value = statistic_value(statistic, max, min);
                let within = value.is_finite() && value <= cap;
                let stable = refinement.as_ref().is_none_or(|r| r.drift <= r.bound);
                let status = if within && stable { Status::Pass } else { Status::Fail };
                (status, Some(max), Some(min), Some(max / min))
            }
        };
        let row_ok = |row: &CheckRow| -> bool {
            row.ratio.is_finite()
                && match statistic {
                    Statistic::MaxRatio => row.ratio <= cap,
                    Statistic::Spread => c_min.is_none_or(|m| row.ratio / m <= cap),
                }
        };
        for row in base.iter_mut() {
            row.pass = row_ok(row);
        }
        rows.append(&mut base);
        if let Some(mut fine) = refined {
            for row in fine.iter_mut() {
                row.pass = row_ok(row);
            }
            rows.append(&mut fine);
        }
        Self {
            id: id.into(),
            status,
            statistic,
            c_emp,
            c_min,
            spread,
            cap,
            refinement,
            skipped,
            rows,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Current statistic (`C_emp` or spread).
    pub fn statistic_value(&self) -> Option<f64> {
        match self.statistic {
            Statistic::MaxRatio => self.c_emp,
            Statistic::Spread => self.spread,
        }
    }
}
