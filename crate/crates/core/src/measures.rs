//! Sample estimators of the Gini, Theil, Atkinson and quantile ratio indices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default Atkinson inequality-aversion parameter.
pub const DEFAULT_EPSILON: f64 = 0.5;
/// Default QRI midpoint grid size.
pub const DEFAULT_QRI_GRID: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Gini,
    Theil,
    Atkinson,
    Qri,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Gini, Measure::Theil, Measure::Atkinson, Measure::Qri];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Gini => "gini",
            Measure::Theil => "theil",
            Measure::Atkinson => "atkinson",
            Measure::Qri => "qri",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gini" | "g" => Ok(Measure::Gini),
            "theil" | "t" => Ok(Measure::Theil),
            "atkinson" | "a" => Ok(Measure::Atkinson),
            "qri" | "i" => Ok(Measure::Qri),
            other => Err(Error::Domain(format!("unknown measure '{other}'"))),
        }
    }
}

/// All four measures computed on one sample or distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSet<T> {
    pub gini: T,
    pub theil: T,
    pub atkinson: T,
    pub qri: T,
    pub epsilon: T,
    pub qri_grid: usize,
}

impl<T: Real> MeasureSet<T> {
    pub fn get(&self, m: Measure) -> T {
        match m {
            Measure::Gini => self.gini,
            Measure::Theil => self.theil,
            Measure::Atkinson => self.atkinson,
            Measure::Qri => self.qri,
        }
    }
}

fn check_positive<T: Real>(x: &[T]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Domain("income sample is empty".into()));
    }
    match x.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
        Some(i) => Err(Error::Domain(format!(
            "incomes must be positive and finite; observation {} is {}",
            i + 1,
            x[i]
        ))),
        None => Ok(()),
    }
}

fn mean<T: Real>(x: &[T]) -> T {
    x.iter().copied().sum::<T>() / T::from_count(x.len())
}

fn sorted<T: Real>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v
}

/// Gini index `2Σ i·x₍ᵢ₎ / (nΣx) − (n+1)/n`.
pub fn gini_hat<T: Real>(x: &[T]) -> Result<T> {
    check_positive(x)?;
    Ok(gini_sorted(&sorted(x)))
}

pub(crate) fn gini_sorted<T: Real>(x: &[T]) -> T {
    let n = T::from_count(x.len());
    let (weighted, total) = x
        .iter()
        .enumerate()
        .fold((T::zero(), T::zero()), |(w, s), (i, &v)| {
            (w + T::from_count(i + 1) * v, s + v)
        });
    let g = T::lit(2.0) * weighted / (n * total) - (n + T::one()) / n;
    g.max(T::zero())
}

/// Theil index `(1/n)Σ (xᵢ/x̄) ln(xᵢ/x̄)`.
pub fn theil_hat<T: Real>(x: &[T]) -> Result<T> {
    check_positive(x)?;
    Ok(theil_unchecked(x))
}

pub(crate) fn theil_unchecked<T: Real>(x: &[T]) -> T {
    let m = mean(x);
    let t = x
        .iter()
        .map(|&v| {
            let r = v / m;
            r * r.ln()
        })
        .sum::<T>()
        / T::from_count(x.len());
    t.max(T::zero())
}

/// Atkinson index with inequality aversion `epsilon > 0`.
pub fn atkinson_hat<T: Real>(x: &[T], epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::Domain(format!("Atkinson epsilon must be > 0, got {epsilon}")));
    }
    check_positive(x)?;
    Ok(atkinson_unchecked(x, epsilon))
}

pub(crate) fn atkinson_unchecked<T: Real>(x: &[T], epsilon: T) -> T {
    let m = mean(x);
    let n = T::from_count(x.len());
    let one_minus = T::one() - epsilon;
    // Work with x/x̄ so the power mean cannot overflow.
    let ede = if one_minus == T::zero() {
        (x.iter().map(|&v| (v / m).ln()).sum::<T>() / n).exp()
    } else {
        (x.iter().map(|&v| (v / m).powf(one_minus)).sum::<T>() / n).powf(T::one() / one_minus)
    };
    (T::one() - ede).max(T::zero())
}

/// Quantile ratio index `J⁻¹ Σⱼ [1 − Q(pⱼ/2) / Q(1 − pⱼ/2)]`, `pⱼ = (j − ½)/J`.
///
/// `quantile` may be a population quantile function, a fitted one, or a
/// sample quantile evaluator (see [`SampleQuantiles`]).
pub fn qri_hat<T, Q>(quantile: Q, grid: usize) -> Result<T>
where
    T: Real,
    Q: Fn(T) -> Result<T>,
{
    if grid == 0 {
        return Err(Error::Domain("QRI grid size must be at least 1".into()));
    }
    let jf = T::from_count(grid);
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for j in 1..=grid {
        let p = (T::from_count(j) - half) / jf;
        let lo = quantile(p * half)?;
        let hi = quantile(T::one() - p * half)?;
        if !(lo > T::zero()) || !(hi > T::zero()) {
            return Err(Error::Domain(format!(
                "QRI needs positive quantiles; got Q({}) = {lo}, Q({}) = {hi}",
                p * half,
                T::one() - p * half
            )));
        }
        acc = acc + (T::one() - lo / hi);
    }
    Ok(acc / jf)
}

/// Sample quantile by linear interpolation of order statistics: the
/// `p`-quantile sits at 1-based position `1 + (n − 1)p`.
pub fn sample_quantile<T: Real>(sorted: &[T], p: T) -> T {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = (T::from_count(n - 1) * p).max(T::zero()).min(T::from_count(n - 1));
    let lo = h.floor();
    let i = lo.to_usize().unwrap_or(0).min(n - 1);
    if i + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo;
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

/// Sorted sample exposing the interpolated quantile function.
#[derive(Debug, Clone)]
pub struct SampleQuantiles<T> {
    sorted: Vec<T>,
}

impl<T: Real> SampleQuantiles<T> {
    pub fn new(x: &[T]) -> Self {
        Self { sorted: sorted(x) }
    }

    pub fn from_sorted(sorted: Vec<T>) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        Self { sorted }
    }

    pub fn quantile(&self, p: T) -> T {
        sample_quantile(&self.sorted, p)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.sorted
    }
}

/// All four estimators on a raw sample; QRI uses sample quantiles.
pub fn measure_set<T: Real>(x: &[T], epsilon: T, qri_grid: usize) -> Result<MeasureSet<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::Domain(format!("Atkinson epsilon must be > 0, got {epsilon}")));
    }
    check_positive(x)?;
    measure_set_sorted(&sorted(x), epsilon, qri_grid)
}

/// As [`measure_set`] for an already sorted, validated sample.
pub(crate) fn measure_set_sorted<T: Real>(x: &[T], epsilon: T, qri_grid: usize) -> Result<MeasureSet<T>> {
    Ok(MeasureSet {
        gini: gini_sorted(x),
        theil: theil_unchecked(x),
        atkinson: atkinson_unchecked(x, epsilon),
        qri: qri_hat(|p| Ok(sample_quantile(x, p)), qri_grid)?,
        epsilon,
        qri_grid,
    })
}
