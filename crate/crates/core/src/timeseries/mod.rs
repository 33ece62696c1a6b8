//! Dated scalar series and the transforms the rest of the crate builds on.
//!
//! A [`TimeSeries`] is an ordered list of trading dates with one finite value
//! per date. Dates are opaque ordered labels: model time between consecutive
//! observations is a constant step (see [`DEFAULT_DT`]), not calendar days.

mod synth;

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use synth::{synth_cointegrated_pair, synth_gbm, synth_sentiment, trading_days};

/// Trading days per model year.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Default model time elapsed between consecutive observations, in years.
pub const DEFAULT_DT: f64 = 1.0 / TRADING_DAYS_PER_YEAR;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    label: String,
}

/// Where to cut a series into a training and a test part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub boundary_date: NaiveDate,
}

impl TimeSeries {
    /// Builds a series, checking every invariant.
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch(dates.len(), values.len()));
        }
        if dates.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneDates(i + 1));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            dates,
            values,
            label: label.into(),
        })
    }

    /// Same dates, new values. Used internally where the dates are already
    /// known to be valid.
    fn with_values(&self, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::new(self.dates.clone(), values, label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Reads a series from a CSV file with a header row.
    pub fn load_csv(path: impl AsRef<Path>, date_col: &str, value_col: &str) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::read_csv(file, date_col, value_col, label)
    }

    pub fn read_csv<R: Read>(
        reader: R,
        date_col: &str,
        value_col: &str,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let di = find(date_col)?;
        let vi = find(value_col)?;

        let mut dates = Vec::new();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            // header is line 1
            let line = row + 2;
            let raw_date = record.get(di).unwrap_or("");
            let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
                Error::UnparsableDate {
                    value: raw_date.to_string(),
                    line,
                }
            })?;
            let raw_value = record.get(vi).unwrap_or("");
            let value: f64 = raw_value.parse().map_err(|_| Error::UnparsableValue {
                value: raw_value.to_string(),
                line,
            })?;
            dates.push(date);
            values.push(value);
        }
        Self::new(dates, values, label)
    }

    /// Writes the `date,value` CSV format read by [`TimeSeries::load_csv`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["date", "value"])?;
        for (d, v) in self.dates.iter().zip(&self.values) {
            wtr.write_record([d.format("%Y-%m-%d").to_string(), format_value(*v)])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Elementwise natural logarithm.
    pub fn log_series(&self) -> Result<Self> {
        if let Some((index, &value)) = self.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositiveValue { index, value });
        }
        let values = self.values.iter().map(|v| v.ln()).collect();
        self.with_values(values, format!("ln({})", self.label))
    }

    /// `y_t - y_{t-lag}`, dated at the later date.
    pub fn diff_series(&self, lag: usize) -> Result<Self> {
        if lag == 0 {
            return Err(Error::InvalidParameter("difference lag must be positive".into()));
        }
        if self.len() <= lag {
            return Err(Error::SeriesTooShort {
                needed: lag + 1,
                actual: self.len(),
            });
        }
        let values = self
            .values
            .iter()
            .skip(lag)
            .zip(&self.values)
            .map(|(later, earlier)| later - earlier)
            .collect();
        Self::new(self.dates[lag..].to_vec(), values, format!("D({})", self.label))
    }

    /// Inverse of a lag-1 [`TimeSeries::diff_series`]: cumulative sum of `self`
    /// anchored at `(anchor_date, anchor_value)`.
    pub fn cumsum_from(&self, anchor_date: NaiveDate, anchor_value: f64) -> Result<Self> {
        let mut dates = Vec::with_capacity(self.len() + 1);
        let mut values = Vec::with_capacity(self.len() + 1);
        dates.push(anchor_date);
        values.push(anchor_value);
        let mut acc = anchor_value;
        for (d, v) in self.dates.iter().zip(&self.values) {
            acc += v;
            dates.push(*d);
            values.push(acc);
        }
        Self::new(dates, values, self.label.clone())
    }

    /// Keeps the rows whose date is in `keep` (sorted).
    fn restrict_to(&self, keep: &[NaiveDate]) -> Result<Self> {
        let index: HashMap<NaiveDate, usize> =
            self.dates.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        let values = keep.iter().map(|d| self.values[index[d]]).collect();
        Self::new(keep.to_vec(), values, self.label.clone())
    }

    /// Splits at `spec.boundary_date`: training gets dates `<=` the boundary.
    pub fn split(&self, spec: SplitSpec) -> Result<(Self, Self)> {
        let cut = self.dates.partition_point(|d| *d <= spec.boundary_date);
        if cut == 0 || cut == self.len() {
            return Err(Error::BoundaryOutOfRange(spec.boundary_date));
        }
        let train = Self::new(
            self.dates[..cut].to_vec(),
            self.values[..cut].to_vec(),
            self.label.clone(),
        )?;
        let test = Self::new(
            self.dates[cut..].to_vec(),
            self.values[cut..].to_vec(),
            self.label.clone(),
        )?;
        Ok((train, test))
    }

    /// Rows with `from <= date`.
    pub fn since(&self, from: NaiveDate) -> Result<Self> {
        let cut = self.dates.partition_point(|d| *d < from);
        Self::new(self.dates[cut..].to_vec(), self.values[cut..].to_vec(), self.label.clone())
    }
}

/// Inner join on dates. Both outputs share one date vector.
pub fn align(a: &TimeSeries, b: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    let mut common = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.dates.len() && j < b.dates.len() {
        match a.dates[i].cmp(&b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common.push(a.dates[i]);
                i += 1;
                j += 1;
            }
        }
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok((a.restrict_to(&common)?, b.restrict_to(&common)?))
}

/// Shortest decimal that round-trips exactly.
pub(crate) fn format_value(v: f64) -> String {
    format!("{v:?}")
}
