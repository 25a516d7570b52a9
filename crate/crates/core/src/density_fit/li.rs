//! Piecewise-linear density from bin frequencies and means, with an
//! exponential density on an open final bin.

use crate::error::{Error, Result};
use crate::grouped::GroupedData;
use crate::scalar::Real;

/// Exponential density `(η/λ) exp{−(x − a)/λ}` on `[a, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTail<T> {
    pub start: T,
    /// Probability mass of the tail bin.
    pub eta: T,
    /// Mean excess over `start`.
    pub lambda: T,
}

/// How the final bin is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LastBin {
    /// Exponential tail for an open final bin, linear for a bounded one.
    #[default]
    Auto,
    /// Exponential tail whenever the final bin has a mean, even if a finite
    /// top boundary was supplied (the top is then ignored).
    ExponentialTail,
}

/// Fitted linear-interpolation density.
///
/// Bin `j` carries `h_j(x) = α_j + β_j x` on `[a_{j−1}, a_j)`; when `tail`
/// is present the final bin is exponential instead and `alphas`/`betas`
/// cover only the bounded bins.
#[derive(Debug, Clone, PartialEq)]
pub struct LiDensity<T> {
    boundaries: Vec<T>,
    freqs: Vec<T>,
    cumulative: Vec<T>,
    alphas: Vec<T>,
    betas: Vec<T>,
    tail: Option<ExpTail<T>>,
    clamped: usize,
}

/// Relative slope below which a bin is treated as uniform.
const FLAT_SLOPE: f64 = 1e-12;

impl<T: Real> LiDensity<T> {
    /// Builds the density from raw bin data. `boundaries` has `freqs.len() + 1`
    /// entries and `freqs` must sum to one.
    pub fn from_bins(boundaries: &[T], freqs: &[T], means: &[T], last: LastBin) -> Result<Self> {
        let bins = freqs.len();
        if bins == 0 || boundaries.len() != bins + 1 || means.len() != bins {
            return Err(Error::Precondition(format!(
                "{bins} bins need {} boundaries and {bins} means",
                bins + 1
            )));
        }
        let open = boundaries[bins].is_infinite();
        let use_tail = open || last == LastBin::ExponentialTail;
        let bounded = if use_tail { bins - 1 } else { bins };

        let mut cumulative = Vec::with_capacity(bins + 1);
        cumulative.push(T::zero());
        for &f in freqs {
            cumulative.push(*cumulative.last().expect("non-empty") + f);
        }
        let total = cumulative[bins];
        if (total - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::Precondition(format!("frequencies sum to {total}, not 1")));
        }
        cumulative[bins] = T::one();

        let two = T::lit(2.0);
        let mut alphas = Vec::with_capacity(bounded);
        let mut betas = Vec::with_capacity(bounded);
        let mut clamped = 0;
        for j in 0..bounded {
            let (lo, hi, f) = (boundaries[j], boundaries[j + 1], freqs[j]);
            let width = hi - lo;
            let centre = T::lit(0.5) * (lo + hi);
            let mut beta = f * T::lit(12.0) * (means[j] - centre) / width.powi(3);
            // Steepest slope that keeps the density nonnegative on the bin.
            let limit = two * f / (width * width);
            if beta.abs() > limit {
                beta = limit.copysign(beta);
                clamped += 1;
            }
            alphas.push(f / width - beta * centre);
            betas.push(beta);
        }
        let tail = if use_tail {
            let start = boundaries[bins - 1];
            let lambda = means[bins - 1] - start;
            if !(lambda > T::zero()) || !lambda.is_finite() {
                return Err(Error::Domain(format!(
                    "invalid tail: last-bin mean {} must exceed its lower bound {start}",
                    means[bins - 1]
                )));
            }
            Some(ExpTail {
                start,
                eta: freqs[bins - 1],
                lambda,
            })
        } else {
            None
        };
        Ok(Self {
            boundaries: boundaries.to_vec(),
            freqs: freqs.to_vec(),
            cumulative,
            alphas,
            betas,
            tail,
            clamped,
        })
    }

    /// Reassembles a density from stored coefficients (e.g. a saved model).
    pub fn from_parts(
        boundaries: Vec<T>,
        freqs: Vec<T>,
        alphas: Vec<T>,
        betas: Vec<T>,
        tail: Option<ExpTail<T>>,
    ) -> Result<Self> {
        let bins = freqs.len();
        let bounded = if tail.is_some() { bins.saturating_sub(1) } else { bins };
        if bins == 0 || boundaries.len() != bins + 1 || alphas.len() != bounded || betas.len() != bounded {
            return Err(Error::validation(None, "inconsistent linear-density coefficient lengths"));
        }
        if let Some(t) = &tail {
            if !(t.lambda > T::zero()) || t.start != boundaries[bins - 1] {
                return Err(Error::validation(None, "invalid exponential tail"));
            }
        }
        let mut cumulative = vec![T::zero()];
        for &f in &freqs {
            cumulative.push(*cumulative.last().expect("non-empty") + f);
        }
        cumulative[bins] = T::one();
        Ok(Self {
            boundaries,
            freqs,
            cumulative,
            alphas,
            betas,
            tail,
            clamped: 0,
        })
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn freqs(&self) -> &[T] {
        &self.freqs
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }

    pub fn tail(&self) -> Option<&ExpTail<T>> {
        self.tail.as_ref()
    }

    /// Number of bins whose slope had to be limited to keep `h ≥ 0`.
    pub fn clamped_bins(&self) -> usize {
        self.clamped
    }

    fn num_bins(&self) -> usize {
        self.freqs.len()
    }

    fn is_tail_bin(&self, j: usize) -> bool {
        self.tail.is_some() && j + 1 == self.num_bins()
    }

    /// Density value at the lower edge of bounded bin `j`, computed without
    /// the `α + βa` cancellation.
    fn edge_density(&self, j: usize) -> T {
        let width = self.boundaries[j + 1] - self.boundaries[j];
        self.freqs[j] / width - self.betas[j] * width * T::lit(0.5)
    }

    /// Bin holding probability level `p`: `F̂_{j−1} ≤ p < F̂_j` (0-based `j`).
    fn bin_for_level(&self, p: T) -> usize {
        let idx = self.cumulative.partition_point(|&c| c <= p);
        idx.clamp(1, self.num_bins()) - 1
    }

    fn is_flat(&self, j: usize) -> bool {
        let width = self.boundaries[j + 1] - self.boundaries[j];
        self.betas[j].abs() < T::lit(FLAT_SLOPE) * self.freqs[j] / (width * width)
    }

    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("quantile needs 0 < p < 1, got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: T) -> T {
        let j = self.bin_for_level(p);
        let lo = self.boundaries[j];
        let excess = (p - self.cumulative[j]).max(T::zero());
        if self.is_tail_bin(j) {
            let t = self.tail.as_ref().expect("tail bin");
            return lo - t.lambda * (-(excess / t.eta)).ln_1p();
        }
        let f = self.freqs[j];
        let width = self.boundaries[j + 1] - lo;
        if f <= T::zero() {
            return lo;
        }
        let x = if self.is_flat(j) {
            lo + excess * width / f
        } else {
            // (−α + √(2βp + C))/β rewritten about the bin edge so it stays
            // accurate as β → 0.
            let h = self.edge_density(j);
            let disc = (h * h + T::lit(2.0) * self.betas[j] * excess).max(T::zero());
            let denom = h + disc.sqrt();
            if denom > T::zero() {
                lo + T::lit(2.0) * excess / denom
            } else {
                lo
            }
        };
        x.min(self.boundaries[j + 1])
    }

    /// Density at the p-th estimated quantile.
    pub fn density_at_quantile(&self, p: T) -> Result<T> {
        let x = self.quantile(p)?;
        let j = self.bin_for_level(p);
        let d = if self.is_tail_bin(j) {
            let t = self.tail.as_ref().expect("tail bin");
            t.eta / t.lambda * (-(x - t.start) / t.lambda).exp()
        } else {
            let lo = self.boundaries[j];
            self.edge_density(j) + self.betas[j] * (x - lo)
        };
        if d > T::zero() && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Numerical(format!("linear density at p = {p} (x = {x}) is {d}")))
        }
    }

    /// Density at income `x`.
    pub fn density(&self, x: T) -> T {
        let bins = self.num_bins();
        if x < self.boundaries[0] || x.is_nan() {
            return T::zero();
        }
        let j = self.boundaries.partition_point(|&b| b <= x).clamp(1, bins + 1) - 1;
        if j >= bins {
            return T::zero();
        }
        if self.is_tail_bin(j) {
            let t = self.tail.as_ref().expect("tail bin");
            return t.eta / t.lambda * (-(x - t.start) / t.lambda).exp();
        }
        self.edge_density(j) + self.betas[j] * (x - self.boundaries[j])
    }

    pub fn cdf(&self, x: T) -> T {
        let bins = self.num_bins();
        if x.is_nan() {
            return T::nan();
        }
        if x <= self.boundaries[0] {
            return T::zero();
        }
        let j = self.boundaries.partition_point(|&b| b <= x).clamp(1, bins + 1) - 1;
        if j >= bins {
            return T::one();
        }
        let lo = self.boundaries[j];
        let dx = x - lo;
        let mass = if self.is_tail_bin(j) {
            let t = self.tail.as_ref().expect("tail bin");
            -t.eta * (-dx / t.lambda).exp_m1()
        } else {
            dx * (self.edge_density(j) + self.betas[j] * dx * T::lit(0.5))
        };
        (self.cumulative[j] + mass).max(T::zero()).min(T::one())
    }

    /// Integral of the density over bin `j` (exact per-bin formulas).
    pub fn bin_mass(&self, j: usize) -> T {
        if self.is_tail_bin(j) {
            return self.tail.as_ref().expect("tail bin").eta;
        }
        let width = self.boundaries[j + 1] - self.boundaries[j];
        width * (self.edge_density(j) + self.betas[j] * width * T::lit(0.5))
    }
}

/// Fits the linear-interpolation density; the final bin gets an
/// exponential tail iff it is open.
pub fn fit_li<T: Real>(g: &GroupedData<T>) -> Result<LiDensity<T>> {
    fit_li_with(g, LastBin::Auto)
}

pub fn fit_li_with<T: Real>(g: &GroupedData<T>, last: LastBin) -> Result<LiDensity<T>> {
    let means = g
        .means()
        .ok_or_else(|| Error::Precondition("the linear interpolation fit needs bin means".into()))?;
    LiDensity::from_bins(g.boundaries(), &g.rel_freqs(), means, last)
}
