//! Grouped (binned) income data: validation, parsing, serialization, and
//! quantile binning of raw samples.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::sample_quantile;
use crate::scalar::Real;

/// Bins `[a₀, a₁), …, [a_{J−1}, a_J)` with counts and optional bin means.
///
/// `a_J` may be `+∞`. Values are immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedData<T> {
    boundaries: Vec<T>,
    counts: Vec<u64>,
    means: Option<Vec<T>>,
    label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// `lower,upper,count[,mean]`
    BinsCsv,
    /// `percentile,value`
    PercentileTable,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bins" | "bins-csv" | "binscsv" => Ok(InputFormat::BinsCsv),
            "percentile-table" | "percentiles" | "percentiletable" => Ok(InputFormat::PercentileTable),
            other => Err(Error::Domain(format!("unknown input format '{other}'"))),
        }
    }
}

/// Extra information a percentile table does not carry itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions<T> {
    /// `a₀`; incomes are positive so this defaults to zero.
    pub lower_bound: T,
    /// `a_J`; `None` leaves the last bin open.
    pub top_value: Option<T>,
    /// Total sample size behind a percentile table.
    pub total_n: Option<u64>,
}

impl<T: Real> Default for ParseOptions<T> {
    fn default() -> Self {
        Self {
            lower_bound: T::zero(),
            top_value: None,
            total_n: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingScheme {
    Quintiles,
    Deciles,
}

impl GroupingScheme {
    pub fn bins(self) -> usize {
        match self {
            GroupingScheme::Quintiles => 5,
            GroupingScheme::Deciles => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupingScheme::Quintiles => "quintiles",
            GroupingScheme::Deciles => "deciles",
        }
    }
}

impl FromStr for GroupingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quintiles" | "quintile" | "5" => Ok(GroupingScheme::Quintiles),
            "deciles" | "decile" | "10" => Ok(GroupingScheme::Deciles),
            other => Err(Error::Domain(format!("unknown grouping scheme '{other}'"))),
        }
    }
}

impl<T: Real> GroupedData<T> {
    /// Validates and builds grouped data. `boundaries` has one more entry
    /// than `counts`; only the final boundary may be infinite.
    pub fn new(
        boundaries: Vec<T>,
        counts: Vec<u64>,
        means: Option<Vec<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let bins = counts.len();
        if bins < 2 {
            return Err(Error::validation(None, format!("need at least 2 bins, got {bins}")));
        }
        if boundaries.len() != bins + 1 {
            return Err(Error::validation(
                None,
                format!("{} boundaries for {bins} bins (expected {})", boundaries.len(), bins + 1),
            ));
        }
        for (j, &b) in boundaries.iter().enumerate() {
            let last = j == bins;
            let ok = b.is_finite() || (last && b == T::infinity());
            if !ok {
                return Err(Error::validation(
                    Some(j.max(1)),
                    format!("boundary {b} is not allowed here"),
                ));
            }
        }
        for j in 1..=bins {
            if !(boundaries[j] > boundaries[j - 1]) {
                return Err(Error::validation(
                    Some(j),
                    format!(
                        "boundaries must be strictly increasing ({} then {})",
                        boundaries[j - 1],
                        boundaries[j]
                    ),
                ));
            }
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::validation(None, "total count must be at least 1"));
        }
        if let Some(m) = &means {
            if m.len() != bins {
                return Err(Error::validation(
                    None,
                    format!("{} means for {bins} bins", m.len()),
                ));
            }
            for (j, &mean) in m.iter().enumerate() {
                let (lo, hi) = (boundaries[j], boundaries[j + 1]);
                let ok = if hi.is_infinite() {
                    mean > lo && mean.is_finite()
                } else {
                    mean >= lo && mean <= hi
                };
                if !ok {
                    return Err(Error::validation(
                        Some(j + 1),
                        format!("mean {mean} lies outside its bin [{lo}, {hi})"),
                    ));
                }
            }
        }
        Ok(Self {
            boundaries,
            counts,
            means,
            label: label.into(),
        })
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> Option<&[T]> {
        self.means.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `a₁, …, a_{J−1}`.
    pub fn interior_boundaries(&self) -> &[T] {
        &self.boundaries[1..self.num_bins()]
    }

    pub fn is_open_ended(&self) -> bool {
        self.boundaries[self.num_bins()].is_infinite()
    }

    /// Relative frequencies `f̂ⱼ = countⱼ / n`.
    pub fn rel_freqs(&self) -> Vec<T> {
        let n = T::lit(self.total() as f64);
        self.counts.iter().map(|&c| T::lit(c as f64) / n).collect()
    }

    /// Cumulative relative frequencies `F̂₀ = 0, …, F̂_J = 1` (length `J + 1`).
    pub fn cumulative(&self) -> Vec<T> {
        let n = self.total() as f64;
        let mut acc = 0_u64;
        let mut out = Vec::with_capacity(self.num_bins() + 1);
        out.push(T::zero());
        for &c in &self.counts {
            acc += c;
            out.push(T::lit(acc as f64 / n));
        }
        out
    }

    /// Replaces an open final boundary with a finite `top`.
    pub fn with_top(&self, top: T) -> Result<Self> {
        let mut b = self.boundaries.clone();
        let last = b.len() - 1;
        b[last] = top;
        Self::new(b, self.counts.clone(), self.means.clone(), self.label.clone())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Serializes to the bins CSV format; the label becomes a `#` comment.
    pub fn to_bins_csv(&self) -> String {
        let mut out = String::new();
        for line in self.label.lines() {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(if self.means.is_some() {
            "lower,upper,count,mean\n"
        } else {
            "lower,upper,count\n"
        });
        for j in 0..self.num_bins() {
            let hi = self.boundaries[j + 1];
            let hi = if hi.is_infinite() { "inf".to_string() } else { hi.to_string() };
            let _ = write!(out, "{},{},{}", self.boundaries[j], hi, self.counts[j]);
            if let Some(m) = &self.means {
                let _ = write!(out, ",{}", m[j]);
            }
            out.push('\n');
        }
        out
    }
}

fn parse_number<T: Real>(field: &str, row: usize, column: &str) -> Result<T> {
    let t = field.trim();
    let lower = t.to_ascii_lowercase();
    if matches!(lower.as_str(), "inf" | "+inf" | "infinity" | "+infinity") {
        return Ok(T::infinity());
    }
    let v: f64 = t.parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{column} '{t}' is not a number"),
    })?;
    if v.is_nan() {
        return Err(Error::Parse {
            row,
            msg: format!("{column} is NaN"),
        });
    }
    Ok(T::lit(v))
}

/// Splits leading `#` comment lines (the label) from the CSV body.
fn split_label(text: &str) -> (String, String) {
    let mut label = Vec::new();
    let mut body = String::new();
    let mut in_header = true;
    for line in text.lines() {
        if in_header {
            if let Some(rest) = line.trim_start().strip_prefix('#') {
                label.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
            in_header = false;
        }
        body.push_str(line);
        body.push('\n');
    }
    (label.join("\n"), body)
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

/// Parses grouped data from text in either supported format.
pub fn parse_grouped<T: Real>(
    text: &str,
    format: InputFormat,
    opts: &ParseOptions<T>,
) -> Result<GroupedData<T>> {
    let (label, body) = split_label(text);
    // Report rows against the original text, comment lines included.
    let offset = if label.is_empty() { 0 } else { label.lines().count() };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { row: 1, msg: e.to_string() })?
        .clone();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            row: e.position().map(|p| p.line() as usize).unwrap_or(0) + offset,
            msg: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0) + offset;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(Error::Parse { row: 1, msg: "no data rows".into() });
    }
    let grouped = match format {
        InputFormat::BinsCsv => parse_bins(&headers, &rows, label)?,
        InputFormat::PercentileTable => parse_percentiles(&headers, &rows, label, opts)?,
    };
    match (format, opts.top_value) {
        (InputFormat::BinsCsv, Some(top)) if grouped.is_open_ended() => grouped.with_top(top),
        _ => Ok(grouped),
    }
}

fn parse_bins<T: Real>(
    headers: &csv::StringRecord,
    rows: &[(usize, csv::StringRecord)],
    label: String,
) -> Result<GroupedData<T>> {
    let need = |name: &str| {
        column_index(headers, name).ok_or_else(|| Error::Parse {
            row: 1,
            msg: format!("missing '{name}' column (expected lower,upper,count[,mean])"),
        })
    };
    let (lo_i, hi_i, n_i) = (need("lower")?, need("upper")?, need("count")?);
    let mean_i = column_index(headers, "mean");
    let mut boundaries = Vec::with_capacity(rows.len() + 1);
    let mut counts = Vec::with_capacity(rows.len());
    let mut means = mean_i.map(|_| Vec::with_capacity(rows.len()));
    for (k, (line, rec)) in rows.iter().enumerate() {
        let line = *line;
        let lower: T = parse_number(&rec[lo_i], line, "lower")?;
        let upper: T = parse_number(&rec[hi_i], line, "upper")?;
        let count_field = rec[n_i].trim();
        let count: f64 = count_field.parse().map_err(|_| Error::Parse {
            row: line,
            msg: format!("count '{count_field}' is not a number"),
        })?;
        if count < 0.0 {
            return Err(Error::validation(Some(line), format!("negative count {count}")));
        }
        if count.fract() != 0.0 {
            return Err(Error::validation(Some(line), format!("count {count} is not an integer")));
        }
        if k == 0 {
            boundaries.push(lower);
        } else if lower != boundaries[k] {
            return Err(Error::validation(
                Some(line),
                format!("lower bound {lower} does not continue previous upper bound {}", boundaries[k]),
            ));
        }
        if upper.is_infinite() && k + 1 != rows.len() {
            return Err(Error::validation(Some(line), "only the last bin may be unbounded"));
        }
        if !(upper > lower) {
            return Err(Error::validation(
                Some(line),
                format!("boundaries must be strictly increasing ({lower} then {upper})"),
            ));
        }
        boundaries.push(upper);
        counts.push(count as u64);
        if let (Some(ms), Some(i)) = (means.as_mut(), mean_i) {
            let m: T = parse_number(&rec[i], line, "mean")?;
            let ok = if upper.is_infinite() { m > lower } else { m >= lower && m <= upper };
            if !ok {
                return Err(Error::validation(
                    Some(line),
                    format!("mean {m} lies outside its bin [{lower}, {upper})"),
                ));
            }
            ms.push(m);
        }
    }
    GroupedData::new(boundaries, counts, means, label)
}

fn parse_percentiles<T: Real>(
    headers: &csv::StringRecord,
    rows: &[(usize, csv::StringRecord)],
    label: String,
    opts: &ParseOptions<T>,
) -> Result<GroupedData<T>> {
    let need = |name: &str| {
        column_index(headers, name).ok_or_else(|| Error::Parse {
            row: 1,
            msg: format!("missing '{name}' column (expected percentile,value)"),
        })
    };
    let (p_i, v_i) = (need("percentile")?, need("value")?);
    let total = opts
        .total_n
        .ok_or_else(|| Error::Precondition("a percentile table needs the total sample size".into()))?;
    let mut percents = vec![0.0_f64];
    let mut boundaries = vec![opts.lower_bound];
    for (line, rec) in rows {
        let p: f64 = parse_number::<f64>(&rec[p_i], *line, "percentile")?;
        let v: T = parse_number(&rec[v_i], *line, "value")?;
        let prev = *percents.last().expect("non-empty");
        if !(p > prev && p < 100.0) {
            return Err(Error::validation(
                Some(*line),
                format!("percentiles must increase strictly within (0, 100); got {p} after {prev}"),
            ));
        }
        let last = *boundaries.last().expect("non-empty");
        if !(v > last) || v.is_infinite() {
            return Err(Error::validation(
                Some(*line),
                format!("value {v} must be finite and exceed the previous boundary {last}"),
            ));
        }
        percents.push(p);
        boundaries.push(v);
    }
    percents.push(100.0);
    let top = opts.top_value.unwrap_or(T::infinity());
    boundaries.push(top);
    let counts = apportion(total, &percents);
    GroupedData::new(boundaries, counts, None, label)
}

/// Splits `total` across bins in proportion to percentile gaps, using
/// largest remainders so the counts sum to `total` exactly.
fn apportion(total: u64, percents: &[f64]) -> Vec<u64> {
    let shares: Vec<f64> = percents
        .windows(2)
        .map(|w| total as f64 * (w[1] - w[0]) / 100.0)
        .collect();
    let mut counts: Vec<u64> = shares.iter().map(|s| s.floor() as u64).collect();
    let mut short = total - counts.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (shares[a] - shares[a].floor(), shares[b] - shares[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in order {
        if short == 0 {
            break;
        }
        counts[i] += 1;
        short -= 1;
    }
    counts
}

/// Groups a raw sample at its sample quintiles or deciles.
///
/// The lowest boundary is zero, interior boundaries are the interpolated
/// sample quantiles at `k/B`, and the last bin is open. Tied boundaries are
/// an error rather than being merged.
pub fn group_sample<T: Real>(x: &[T], scheme: GroupingScheme, with_means: bool) -> Result<GroupedData<T>> {
    let bins = scheme.bins();
    if x.len() < bins {
        return Err(Error::Domain(format!(
            "{} observations cannot fill {bins} bins",
            x.len()
        )));
    }
    if let Some(i) = x.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::Domain(format!(
            "incomes must be positive; observation {} is {}",
            i + 1,
            x[i]
        )));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let bf = T::from_count(bins);
    let mut boundaries = Vec::with_capacity(bins + 1);
    boundaries.push(T::zero());
    for k in 1..bins {
        let q = sample_quantile(&sorted, T::from_count(k) / bf);
        if q <= *boundaries.last().expect("non-empty") {
            return Err(Error::Domain(format!(
                "degenerate boundaries: quantile {k}/{bins} ties with the previous boundary ({q})"
            )));
        }
        boundaries.push(q);
    }
    boundaries.push(T::infinity());
    let mut counts = Vec::with_capacity(bins);
    let mut means = Vec::with_capacity(bins);
    let mut start = 0;
    for j in 0..bins {
        let end = if j + 1 == bins {
            sorted.len()
        } else {
            sorted.partition_point(|&v| v < boundaries[j + 1])
        };
        let slice = &sorted[start..end];
        counts.push(slice.len() as u64);
        if with_means {
            if slice.is_empty() {
                return Err(Error::Domain(format!("degenerate grouping: bin {} is empty", j + 1)));
            }
            means.push(slice.iter().copied().sum::<T>() / T::from_count(slice.len()));
        }
        start = end;
    }
    GroupedData::new(boundaries, counts, with_means.then_some(means), "")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE5: &str = "\
lower,upper,count,mean
0,1000,310,674.39
1000,2000,552,1426.10
2000,3000,1007,2545.79
3000,4000,1193,3469.35
4000,5000,884,4470.33
5000,6000,608,5446.60
6000,7000,314,6460.93
7000,8000,222,7459.14
8000,9000,128,8456.66
9000,11000,112,9788.38
11000,inf,110,15617.69
";

    #[test]
    fn parses_table5() {
        let g: GroupedData<f64> = parse_grouped(TABLE5, InputFormat::BinsCsv, &ParseOptions::default()).unwrap();
        assert_eq!(g.num_bins(), 11);
        assert_eq!(g.total(), 5440);
        assert!(g.is_open_ended());
        assert_eq!(g.boundaries()[9], 9000.0);
        assert_eq!(g.boundaries()[10], 11000.0);
        let m = g.means().unwrap();
        assert_eq!(m[0], 674.39);
        assert_eq!(m[10], 15617.69);
        let cum = g.cumulative();
        assert_eq!(cum[0], 0.0);
        assert_eq!(cum[11], 1.0);
    }

    #[test]
    fn top_value_closes_last_bin() {
        let opts = ParseOptions { top_value: Some(500_000.0), ..Default::default() };
        let g: GroupedData<f64> = parse_grouped(TABLE5, InputFormat::BinsCsv, &opts).unwrap();
        assert!(!g.is_open_ended());
        assert_eq!(g.boundaries()[11], 500_000.0);
    }

    #[test]
    fn minimal_two_bins() {
        let g: GroupedData<f64> =
            parse_grouped("lower,upper,count\n0,1,5\n1,2,5\n", InputFormat::BinsCsv, &ParseOptions::default()).unwrap();
        assert_eq!(g.num_bins(), 2);
        assert_eq!(g.total(), 10);
        assert_eq!(g.rel_freqs(), vec![0.5, 0.5]);
        assert!(g.means().is_none());
    }

    #[test]
    fn percentile_table7() {
        let text = "percentile,value\n10,263\n20,311\n30,364\n40,434\n50,518\n60,586\n70,665\n80,778\n90,955\n";
        let opts = ParseOptions { lower_bound: 0.0, top_value: Some(5000.0), total_n: Some(5000) };
        let g: GroupedData<f64> = parse_grouped(text, InputFormat::PercentileTable, &opts).unwrap();
        assert_eq!(g.num_bins(), 10);
        assert_eq!(g.interior_boundaries(), &[263.0, 311.0, 364.0, 434.0, 518.0, 586.0, 665.0, 778.0, 955.0]);
        assert_eq!(g.boundaries()[0], 0.0);
        assert_eq!(g.boundaries()[10], 5000.0);
        assert!(g.counts().iter().all(|&c| c == 500));
        assert!(g.means().is_none());

        let no_n = ParseOptions { total_n: None, ..opts };
        assert!(matches!(
            parse_grouped::<f64>(text, InputFormat::PercentileTable, &no_n),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uneven_percentiles_apportion_exactly() {
        assert_eq!(apportion(7, &[0.0, 50.0, 100.0]), vec![4, 3]);
        assert_eq!(apportion(100, &[0.0, 10.0, 50.0, 100.0]), vec![10, 40, 50]);
        let c = apportion(1001, &[0.0, 33.3, 66.6, 100.0]);
        assert_eq!(c.iter().sum::<u64>(), 1001);
    }

    #[test]
    fn validation_errors_name_the_row() {
        let bad_order = "lower,upper,count\n0,2,5\n2,1,5\n";
        let e = parse_grouped::<f64>(bad_order, InputFormat::BinsCsv, &ParseOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Validation { row: Some(3), .. }), "{e}");

        let bad_mean = "lower,upper,count,mean\n0,1,5,0.5\n1,2,5,2.5\n";
        let e = parse_grouped::<f64>(bad_mean, InputFormat::BinsCsv, &ParseOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Validation { row: Some(3), .. }), "{e}");

        let negative = "lower,upper,count\n0,1,-5\n1,2,5\n";
        let e = parse_grouped::<f64>(negative, InputFormat::BinsCsv, &ParseOptions::default()).unwrap_err();
        assert!(e.to_string().contains("negative count"), "{e}");
        assert!(e.to_string().contains("row 2"), "{e}");

        let junk = "lower,upper,count\n0,1,five\n1,2,5\n";
        let e = parse_grouped::<f64>(junk, InputFormat::BinsCsv, &ParseOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Parse { row: 2, .. }), "{e}");

        let gap = "lower,upper,count\n0,1,5\n2,3,5\n";
        assert!(parse_grouped::<f64>(gap, InputFormat::BinsCsv, &ParseOptions::default()).is_err());

        let pct = "percentile,value\n10,5\n10,6\n";
        let opts = ParseOptions { total_n: Some(10), ..Default::default() };
        let e = parse_grouped::<f64>(pct, InputFormat::PercentileTable, &opts).unwrap_err();
        assert!(matches!(e, Error::Validation { row: Some(3), .. }), "{e}");
    }

    #[test]
    fn new_rejects_bad_shapes() {
        assert!(GroupedData::<f64>::new(vec![0.0, 1.0], vec![3], None, "").is_err());
        assert!(GroupedData::<f64>::new(vec![0.0, 1.0, 2.0], vec![0, 0], None, "").is_err());
        assert!(GroupedData::<f64>::new(vec![0.0, f64::INFINITY, 2.0], vec![1, 1], None, "").is_err());
        assert!(GroupedData::<f64>::new(vec![0.0, 1.0, f64::INFINITY], vec![1, 1], Some(vec![0.5, 1.0]), "").is_err());
    }

    #[test]
    fn groups_one_to_ten_into_quintiles() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let g = group_sample(&x, GroupingScheme::Quintiles, true).unwrap();
        let b = g.boundaries();
        assert_eq!(b[0], 0.0);
        for (got, want) in b[1..5].iter().zip([2.8, 4.6, 6.4, 8.2]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(b[5].is_infinite());
        assert_eq!(g.counts(), &[2, 2, 2, 2, 2]);
        assert_eq!(g.means().unwrap(), &[1.5, 3.5, 5.5, 7.5, 9.5]);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let x = vec![4.0_f64; 20];
        assert!(group_sample(&x, GroupingScheme::Deciles, false).is_err());
        assert!(group_sample(&[1.0_f64, -1.0, 2.0, 3.0, 4.0], GroupingScheme::Quintiles, false).is_err());
        assert!(group_sample(&[1.0_f64, 2.0], GroupingScheme::Quintiles, false).is_err());
    }

    #[test]
    fn label_survives_serialization() {
        let g: GroupedData<f64> = parse_grouped(TABLE5, InputFormat::BinsCsv, &ParseOptions::default())
            .unwrap()
            .with_label("Household income 1967-68");
        let back: GroupedData<f64> =
            parse_grouped(&g.to_bins_csv(), InputFormat::BinsCsv, &ParseOptions::default()).unwrap();
        assert_eq!(back, g);
    }
}
