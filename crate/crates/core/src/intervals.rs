//! Percentile-bootstrap intervals for all four measures, Wald intervals for
//! the QRI, and two-sample difference intervals.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density_fit::QuantileModel;
use crate::error::{Error, Result};
use crate::measures::{
    atkinson_unchecked, gini_sorted, qri_hat, sample_quantile, theil_unchecked, Measure, MeasureSet,
    DEFAULT_EPSILON, DEFAULT_QRI_GRID,
};
use crate::rng::{derive_seed, open_uniform, substream};
use crate::scalar::Real;
use crate::special::z_critical;

/// Grid size for plug-in point estimates of Gini, Theil and Atkinson.
pub const PLUG_IN_GRID: usize = 10_000;
pub const DEFAULT_REPLICATES: usize = 500;
pub const DEFAULT_LEVEL: f64 = 0.95;
/// Draws below this fraction of the fitted median are raised to it.
pub const CLAMP_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CiMethod {
    #[serde(rename = "bootstrap")]
    BootstrapPercentile,
    #[serde(rename = "wald")]
    Wald,
}

impl CiMethod {
    pub fn name(self) -> &'static str {
        match self {
            CiMethod::BootstrapPercentile => "bootstrap",
            CiMethod::Wald => "wald",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bootstrap" | "boot" | "percentile" => Ok(CiMethod::BootstrapPercentile),
            "wald" => Ok(CiMethod::Wald),
            other => Err(Error::Domain(format!("unknown interval method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalResult<T> {
    pub measure: Measure,
    pub point: T,
    pub lower: T,
    pub upper: T,
    pub level: T,
    pub method: CiMethod,
    /// Bootstrap replicate count; `None` for Wald intervals.
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
}

impl<T: Real> IntervalResult<T> {
    pub const CSV_HEADER: &'static str = "measure,method,point,lower,upper,level,B,seed";

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, v: T) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.measure,
            self.method,
            self.point,
            self.lower,
            self.upper,
            self.level,
            self.replicates.map(|b| b.to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        )
    }
}

/// Renders intervals as CSV with a header row.
pub fn intervals_to_csv<T: Real>(rows: &[IntervalResult<T>]) -> String {
    let mut out = String::from(IntervalResult::<T>::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Settings shared by the bootstrap engines.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig<T> {
    pub replicates: usize,
    pub level: T,
    pub seed: u64,
    pub epsilon: T,
    pub qri_grid: usize,
    pub measures: Vec<Measure>,
}

impl<T: Real> BootstrapConfig<T> {
    /// All four measures, 500 replicates, 95% level.
    pub fn new(seed: u64) -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            level: T::lit(DEFAULT_LEVEL),
            seed,
            epsilon: T::lit(DEFAULT_EPSILON),
            qri_grid: DEFAULT_QRI_GRID,
            measures: Measure::ALL.to_vec(),
        }
    }

    pub fn replicates(mut self, b: usize) -> Self {
        self.replicates = b;
        self
    }

    pub fn level(mut self, level: T) -> Self {
        self.level = level;
        self
    }

    pub fn measures(mut self, measures: &[Measure]) -> Self {
        self.measures = measures.to_vec();
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Domain(format!("bootstrap sample size must be at least 2, got {n}")));
        }
        if self.replicates < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 bootstrap replicates, got {}",
                self.replicates
            )));
        }
        check_level(self.level)?;
        if !(self.epsilon > T::zero()) {
            return Err(Error::Domain(format!("Atkinson epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.measures.is_empty() {
            return Err(Error::Domain("no measures requested".into()));
        }
        Ok(())
    }
}

fn check_level<T: Real>(level: T) -> Result<()> {
    if level > T::zero() && level < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("confidence level must lie in (0,1), got {level}")))
    }
}

/// Replicate estimates in replicate order, one vector per requested measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReplicates<T> {
    pub measures: Vec<Measure>,
    pub estimates: Vec<Vec<T>>,
    /// Draws raised to the clamping floor, over all replicates.
    pub clamped_draws: u64,
    pub total_draws: u64,
}

impl<T: Real> BootstrapReplicates<T> {
    pub fn of(&self, m: Measure) -> Option<&[T]> {
        self.measures.iter().position(|&x| x == m).map(|i| self.estimates[i].as_slice())
    }
}

/// `CLAMP_FRACTION` times the model median. Draws and model quantiles
/// below it are raised to it everywhere in this module, so point estimates,
/// Wald variances and bootstrap resamples all describe one distribution.
pub fn clamp_floor<T: Real, M: QuantileModel<T> + ?Sized>(model: &M) -> Result<T> {
    let median = model.quantile(T::lit(0.5))?;
    if !(median > T::zero()) || !median.is_finite() {
        return Err(Error::Domain(format!("fitted median {median} is not a positive income")));
    }
    Ok(T::lit(CLAMP_FRACTION) * median)
}

/// QRI of the floored model quantile function.
pub fn model_qri<T, M>(model: &M, grid: usize) -> Result<T>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    let floor = clamp_floor(model)?;
    qri_hat(|p| model.quantile(p).map(|v| v.max(floor)), grid)
}

fn estimate<T: Real>(sorted: &[T], m: Measure, epsilon: T, grid: usize) -> Result<T> {
    Ok(match m {
        Measure::Gini => gini_sorted(sorted),
        Measure::Theil => theil_unchecked(sorted),
        Measure::Atkinson => atkinson_unchecked(sorted, epsilon),
        Measure::Qri => qri_hat(|p| Ok(sample_quantile(sorted, p)), grid)?,
    })
}

/// One inverse-transform resample from `model`, sorted, with the number of
/// clamped draws.
fn resample<T: Real, M: QuantileModel<T> + ?Sized>(model: &M, n: usize, floor: T, seed: u64, stream: u64) -> Result<(Vec<T>, u64)> {
    let mut rng = substream(seed, stream);
    let mut clamped = 0;
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = model.quantile(open_uniform(&mut rng))?;
        if v < floor {
            v = floor;
            clamped += 1;
        }
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!("draw {v} is not a positive income")));
        }
        y.push(v);
    }
    y.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    Ok((y, clamped))
}

/// Runs `B` resamples of size `n` and evaluates each requested measure.
///
/// Replicate `b` draws from stream `b` of `cfg.seed`, so the output does not
/// depend on the number of worker threads.
pub fn bootstrap_replicates<T, M>(model: &M, n: usize, cfg: &BootstrapConfig<T>) -> Result<BootstrapReplicates<T>>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    cfg.validate(n)?;
    let floor = clamp_floor(model)?;
    let per_rep: Vec<Result<(Vec<T>, u64)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let (y, clamped) = resample(model, n, floor, cfg.seed, b as u64)?;
            let est = cfg
                .measures
                .iter()
                .map(|&m| estimate(&y, m, cfg.epsilon, cfg.qri_grid))
                .collect::<Result<Vec<T>>>()?;
            Ok((est, clamped))
        })
        .collect();

    let mut estimates = vec![Vec::with_capacity(cfg.replicates); cfg.measures.len()];
    let mut clamped_draws = 0;
    for (b, r) in per_rep.into_iter().enumerate() {
        let (est, c) = r.map_err(|e| Error::Replicate {
            replicate: b + 1,
            source: Box::new(e),
        })?;
        clamped_draws += c;
        for (slot, v) in estimates.iter_mut().zip(est) {
            slot.push(v);
        }
    }
    Ok(BootstrapReplicates {
        measures: cfg.measures.clone(),
        estimates,
        clamped_draws,
        total_draws: (cfg.replicates * n) as u64,
    })
}

/// Plug-in measures of a fitted model: Gini, Theil and Atkinson on the
/// deterministic grid `Q((i − ½)/n_eval)`, the QRI directly from the
/// quantile function, both floored like bootstrap draws.
pub fn plug_in<T, M>(model: &M, epsilon: T, qri_grid: usize, n_eval: usize) -> Result<MeasureSet<T>>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    if n_eval == 0 {
        return Err(Error::Domain("plug-in grid must be nonempty".into()));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::Domain(format!("Atkinson epsilon must be > 0, got {epsilon}")));
    }
    let floor = clamp_floor(model)?;
    let nf = T::from_count(n_eval);
    let half = T::lit(0.5);
    let mut y = (1..=n_eval)
        .map(|i| model.quantile((T::from_count(i) - half) / nf).map(|v| v.max(floor)))
        .collect::<Result<Vec<T>>>()?;
    if let Some(bad) = y.iter().find(|v| !(**v > T::zero()) || !v.is_finite()) {
        return Err(Error::Domain(format!("fitted quantile grid contains nonpositive value {bad}")));
    }
    y.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(MeasureSet {
        gini: gini_sorted(&y),
        theil: theil_unchecked(&y),
        atkinson: atkinson_unchecked(&y, epsilon),
        qri: qri_hat(|p| model.quantile(p).map(|v| v.max(floor)), qri_grid)?,
        epsilon,
        qri_grid,
    })
}

fn percentile_bounds<T: Real>(estimates: &[T], level: T) -> (T, T) {
    let mut s = estimates.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let alpha = T::one() - level;
    let half = T::lit(0.5);
    (sample_quantile(&s, alpha * half), sample_quantile(&s, T::one() - alpha * half))
}

/// Percentile-bootstrap intervals for every measure in `cfg`.
pub fn bootstrap_ci<T, M>(model: &M, n: usize, cfg: &BootstrapConfig<T>) -> Result<Vec<IntervalResult<T>>>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    let reps = bootstrap_replicates(model, n, cfg)?;
    let point = plug_in(model, cfg.epsilon, cfg.qri_grid, PLUG_IN_GRID)?;
    Ok(reps
        .measures
        .iter()
        .zip(&reps.estimates)
        .map(|(&m, est)| {
            let (lower, upper) = percentile_bounds(est, cfg.level);
            IntervalResult {
                measure: m,
                point: point.get(m),
                lower,
                upper,
                level: cfg.level,
                method: CiMethod::BootstrapPercentile,
                replicates: Some(cfg.replicates),
                seed: Some(cfg.seed),
            }
        })
        .collect())
}

/// Delta-method variance of the QRI estimator together with the grid
/// quantities it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct QriVariance<T> {
    pub var: T,
    pub grid: usize,
    pub n: usize,
    /// `x_{pⱼ/2}` and `x_{1−pⱼ/2}` for `j = 1..J`.
    pub lower_quantiles: Vec<T>,
    pub upper_quantiles: Vec<T>,
    /// Densities at those quantiles.
    pub lower_densities: Vec<T>,
    pub upper_densities: Vec<T>,
}

/// `Var(Î) = J⁻² Σⱼ Σₖ Cov(R̂ⱼ, R̂ₖ)` with `R̂ⱼ = x̂_{lⱼ}/x̂_{uⱼ}` linearized
/// around the model quantiles and
/// `Cov(x̂_a, x̂_b) = a(1 − b) / (n f(x_a) f(x_b))` for `a ≤ b`.
///
/// A lower quantile sitting on the clamping floor is a point mass and adds
/// no variance; its recorded density is `+∞`.
pub fn qri_variance<T, M>(model: &M, n: usize, grid: usize) -> Result<QriVariance<T>>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    if n < 2 {
        return Err(Error::Domain(format!("sample size must be at least 2, got {n}")));
    }
    if grid == 0 {
        return Err(Error::Domain("QRI grid size must be at least 1".into()));
    }
    let floor = clamp_floor(model)?;
    let density = |p: T| -> Result<T> {
        let f = model.density_at_quantile(p)?;
        if f > T::zero() && f.is_finite() {
            Ok(f)
        } else {
            Err(Error::Numerical(format!("density at p = {p} is {f}")))
        }
    };
    let jf = T::from_count(grid);
    let half = T::lit(0.5);
    let mut lq = Vec::with_capacity(grid);
    let mut uq = Vec::with_capacity(grid);
    let mut ld = Vec::with_capacity(grid);
    let mut ud = Vec::with_capacity(grid);
    // (probability, ∂R/∂x / f) for each of the 2J quantiles
    let mut terms: Vec<(T, T)> = Vec::with_capacity(2 * grid);
    for j in 1..=grid {
        let p = (T::from_count(j) - half) / jf;
        let (l, u) = (p * half, T::one() - p * half);
        let raw_l = model.quantile(l)?;
        let xu = model.quantile(u)?.max(floor);
        let fu = density(u)?;
        let (xl, fl) = if raw_l < floor {
            (floor, T::infinity())
        } else {
            let fl = density(l)?;
            terms.push((l, T::one() / (xu * fl)));
            (raw_l, fl)
        };
        terms.push((u, -xl / (xu * xu * fu)));
        lq.push(xl);
        uq.push(xu);
        ld.push(fl);
        ud.push(fu);
    }
    let mut sum = T::zero();
    for &(a, ga) in &terms {
        for &(b, gb) in &terms {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            sum = sum + ga * gb * lo * (T::one() - hi);
        }
    }
    let var = (sum / (T::from_count(n) * jf * jf)).max(T::zero());
    Ok(QriVariance {
        var,
        grid,
        n,
        lower_quantiles: lq,
        upper_quantiles: uq,
        lower_densities: ld,
        upper_densities: ud,
    })
}

/// `point ∓ half`, with `half` rounded so both sides are exactly equal in
/// floating point.
fn symmetric<T: Real>(point: T, half: T) -> (T, T) {
    let upper = point + half;
    let half = upper - point;
    (point - half, upper)
}

fn wald_interval<T: Real>(measure: Measure, point: T, var: T, level: T) -> Result<IntervalResult<T>> {
    let z = z_critical(level)?;
    let (lower, upper) = symmetric(point, z * var.sqrt());
    Ok(IntervalResult {
        measure,
        point,
        lower,
        upper,
        level,
        method: CiMethod::Wald,
        replicates: None,
        seed: None,
    })
}

/// `Î ± z_{1−α/2} √Var(Î)` with `Î` the QRI of the (floored) model on a
/// `grid`-point grid.
pub fn wald_qri_ci<T, M>(model: &M, n: usize, level: T, grid: usize) -> Result<IntervalResult<T>>
where
    T: Real,
    M: QuantileModel<T> + ?Sized,
{
    check_level(level)?;
    let v = qri_variance(model, n, grid)?;
    let point = model_qri(model, grid)?;
    wald_interval(Measure::Qri, point, v.var, level)
}

/// Bootstrap intervals for `measure(e₂) − measure(e₁)`.
///
/// The two samples are resampled independently, from seeds derived from
/// `cfg.seed`; replicate `b` pairs resample `b` of each side.
pub fn diff_bootstrap_ci<T, M1, M2>(
    e1: &M1,
    n1: usize,
    e2: &M2,
    n2: usize,
    cfg: &BootstrapConfig<T>,
) -> Result<Vec<IntervalResult<T>>>
where
    T: Real,
    M1: QuantileModel<T> + ?Sized,
    M2: QuantileModel<T> + ?Sized,
{
    let side = |seed_index: u64| BootstrapConfig {
        seed: derive_seed(cfg.seed, seed_index),
        ..cfg.clone()
    };
    let r1 = bootstrap_replicates(e1, n1, &side(1))?;
    let r2 = bootstrap_replicates(e2, n2, &side(2))?;
    let p1 = plug_in(e1, cfg.epsilon, cfg.qri_grid, PLUG_IN_GRID)?;
    let p2 = plug_in(e2, cfg.epsilon, cfg.qri_grid, PLUG_IN_GRID)?;
    Ok(cfg
        .measures
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let diffs: Vec<T> = r1.estimates[i].iter().zip(&r2.estimates[i]).map(|(a, b)| *b - *a).collect();
            let (lower, upper) = percentile_bounds(&diffs, cfg.level);
            IntervalResult {
                measure: m,
                point: p2.get(m) - p1.get(m),
                lower,
                upper,
                level: cfg.level,
                method: CiMethod::BootstrapPercentile,
                replicates: Some(cfg.replicates),
                seed: Some(cfg.seed),
            }
        })
        .collect())
}

/// Wald interval for `QRI(e₂) − QRI(e₁)` with `Var = Var₁ + Var₂`.
pub fn diff_wald_qri_ci<T, M1, M2>(e1: &M1, n1: usize, e2: &M2, n2: usize, level: T, grid: usize) -> Result<IntervalResult<T>>
where
    T: Real,
    M1: QuantileModel<T> + ?Sized,
    M2: QuantileModel<T> + ?Sized,
{
    check_level(level)?;
    let v1 = qri_variance(e1, n1, grid)?;
    let v2 = qri_variance(e2, n2, grid)?;
    let i1 = model_qri(e1, grid)?;
    let i2 = model_qri(e2, grid)?;
    wald_interval(Measure::Qri, i2 - i1, v1.var + v2.var, level)
}

/// Dispatches to [`diff_bootstrap_ci`] or [`diff_wald_qri_ci`]. Wald only
/// covers the QRI, so other requested measures are ignored for it.
pub fn diff_ci<T, M1, M2>(
    e1: &M1,
    n1: usize,
    e2: &M2,
    n2: usize,
    method: CiMethod,
    cfg: &BootstrapConfig<T>,
) -> Result<Vec<IntervalResult<T>>>
where
    T: Real,
    M1: QuantileModel<T> + ?Sized,
    M2: QuantileModel<T> + ?Sized,
{
    match method {
        CiMethod::BootstrapPercentile => diff_bootstrap_ci(e1, n1, e2, n2, cfg),
        CiMethod::Wald => Ok(vec![diff_wald_qri_ci(e1, n1, e2, n2, cfg.level, cfg.qri_grid)?]),
    }
}
