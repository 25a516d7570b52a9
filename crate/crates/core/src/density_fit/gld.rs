//! Generalized lambda distribution (FKML parameterization) and its
//! percentile-matching fit to grouped data.

use crate::density_fit::nelder_mead::{nelder_mead, NelderMeadOptions};
use crate::error::{Error, Result};
use crate::grouped::GroupedData;
use crate::scalar::Real;

/// `Q(p) = λ + (1/η) [ (p^α − 1)/α − ((1 − p)^β − 1)/β ]`, `η > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GldParams<T> {
    pub lambda: T,
    pub eta: T,
    pub alpha: T,
    pub beta: T,
}

/// Below this magnitude a shape parameter is treated as zero and the
/// Box–Cox term becomes a logarithm.
const SHAPE_ZERO: f64 = 1e-8;

#[inline]
fn box_cox<T: Real>(u: T, shape: T) -> T {
    if shape.abs() < T::lit(SHAPE_ZERO) {
        u.ln()
    } else {
        (shape * u.ln()).exp_m1() / shape
    }
}

impl<T: Real> GldParams<T> {
    pub fn new(lambda: T, eta: T, alpha: T, beta: T) -> Result<Self> {
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::Domain(format!("GLD scale parameter eta must be > 0, got {eta}")));
        }
        if !lambda.is_finite() || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Domain("GLD parameters must be finite".into()));
        }
        Ok(Self { lambda, eta, alpha, beta })
    }

    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("quantile needs 0 < p < 1, got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, p: T) -> T {
        self.lambda + (box_cox(p, self.alpha) - box_cox(T::one() - p, self.beta)) / self.eta
    }

    /// `Q′(p) = (1/η) [p^{α−1} + (1 − p)^{β−1}]`.
    pub fn quantile_density(&self, p: T) -> T {
        let one = T::one();
        (p.powf(self.alpha - one) + (one - p).powf(self.beta - one)) / self.eta
    }

    /// Density at the p-th quantile, `1 / Q′(p)`.
    pub fn density_at_quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("density needs 0 < p < 1, got {p}")));
        }
        let d = T::one() / self.quantile_density(p);
        if d > T::zero() && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Numerical(format!("GLD density at p = {p} is {d}")))
        }
    }

    /// Support endpoints; infinite when the corresponding shape is `≤ 0`.
    pub fn support(&self) -> (T, T) {
        let zero_tol = T::lit(SHAPE_ZERO);
        let lower = if self.alpha >= zero_tol {
            self.lambda - T::one() / (self.eta * self.alpha)
        } else {
            T::neg_infinity()
        };
        let upper = if self.beta >= zero_tol {
            self.lambda + T::one() / (self.eta * self.beta)
        } else {
            T::infinity()
        };
        (lower, upper)
    }

    /// Distribution function by bisection on the strictly increasing `Q`.
    pub fn cdf(&self, x: T) -> T {
        let (lower, upper) = self.support();
        if x.is_nan() {
            return T::nan();
        }
        if x <= lower {
            return T::zero();
        }
        if x >= upper {
            return T::one();
        }
        let (mut lo, mut hi) = (T::zero(), T::one());
        let half = T::lit(0.5);
        for _ in 0..200 {
            let mid = half * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.quantile_unchecked(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        half * (lo + hi)
    }
}

/// Outcome of a percentile-matching fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GldFit<T> {
    pub params: GldParams<T>,
    /// `Σₖ [Q(F̂ₖ) − aₖ]²` at the optimum, in squared data units.
    pub residual: T,
    /// Number of starting points whose simplex met a stopping tolerance.
    pub converged_starts: usize,
}

fn median<T: Real>(v: &[T]) -> T {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        T::lit(0.5) * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares percentile matching of the interior bin boundaries:
/// minimizes `Σₖ [Q_θ(F̂ₖ) − aₖ]²` over `k = 1..J−1`.
///
/// Bin means and the outer boundaries `a₀`, `a_J` are not used.
pub fn fit_gld<T: Real>(g: &GroupedData<T>) -> Result<GldFit<T>> {
    let cum = g.cumulative();
    let points: Vec<(T, T)> = g
        .interior_boundaries()
        .iter()
        .zip(&cum[1..g.num_bins()])
        .filter(|(_, &f)| f > T::zero() && f < T::one())
        .map(|(&a, &f)| (f, a))
        .collect();
    if points.len() < 4 {
        return Err(Error::Identifiability(format!(
            "need at least 4 interior boundaries strictly inside (0,1) in probability, got {}",
            points.len()
        )));
    }
    fit_gld_points(&points)
}

/// Fits to arbitrary `(probability, value)` pairs.
pub fn fit_gld_points<T: Real>(points: &[(T, T)]) -> Result<GldFit<T>> {
    let values: Vec<T> = points.iter().map(|&(_, a)| a).collect();
    let first = values[0];
    let last = values[values.len() - 1];
    let scale = last - first;
    if !(scale > T::zero()) {
        return Err(Error::Identifiability("matched values must not all coincide".into()));
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let lambda0 = median(&sorted);

    // Work in units of the data spread so tolerances are scale-free:
    // λ = λ₀ + s·θ₀, η = exp(θ₁)/s.
    let unpack = |th: &[T]| GldParams {
        lambda: lambda0 + scale * th[0],
        eta: th[1].exp() / scale,
        alpha: th[2],
        beta: th[3],
    };
    let objective = |th: &[T]| -> T {
        let q = unpack(th);
        points
            .iter()
            .map(|&(p, a)| {
                let r = (q.quantile_unchecked(p) - a) / scale;
                r * r
            })
            .sum()
    };

    let opts = NelderMeadOptions::default();
    let steps = [T::lit(0.1), T::lit(0.5), T::lit(0.1), T::lit(0.1)];
    let mut best: Option<(Vec<T>, T)> = None;
    let mut converged_starts = 0;
    for eta_mult in [2.0, 20.0] {
        for alpha0 in [0.1, 0.5] {
            for beta0 in [0.1, 0.5] {
                let x0 = [T::zero(), T::lit(eta_mult).ln(), T::lit(alpha0), T::lit(beta0)];
                let out = nelder_mead(&objective, &x0, &steps, &opts);
                if out.converged && out.f.is_finite() {
                    converged_starts += 1;
                }
                if out.f.is_finite() && best.as_ref().is_none_or(|(_, f)| out.f < *f) {
                    best = Some((out.x, out.f));
                }
            }
        }
    }
    let Some((x, f)) = best else {
        return Err(Error::FitFailed { best_residual: f64::INFINITY });
    };
    let residual = f * scale * scale;
    if converged_starts == 0 {
        return Err(Error::FitFailed { best_residual: residual.as_f64() });
    }
    let p = unpack(&x);
    Ok(GldFit {
        params: GldParams::new(p.lambda, p.eta, p.alpha, p.beta)?,
        residual,
        converged_starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform() -> GldParams<f64> {
        GldParams::new(0.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn uniform_special_case() {
        let u = uniform();
        assert_eq!(u.quantile(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(u.quantile(0.9).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(u.density_at_quantile(0.3).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.cdf(0.0), 0.5, epsilon = 1e-15);
        assert_eq!(u.support(), (-1.0, 1.0));
        assert_eq!(u.cdf(-2.0), 0.0);
        assert_eq!(u.cdf(2.0), 1.0);
    }

    #[test]
    fn zero_shape_limit_is_continuous() {
        let near = GldParams::new(1.0, 2.0, 1e-9, -1e-9).unwrap();
        let small = GldParams::new(1.0, 2.0, 1e-6, -1e-6).unwrap();
        for &p in &[0.01_f64, 0.3, 0.77, 0.999] {
            let logistic = 1.0 + (p / (1.0 - p)).ln() / 2.0;
            assert_abs_diff_eq!(near.quantile(p).unwrap(), logistic, epsilon = 1e-12);
            assert_abs_diff_eq!(small.quantile(p).unwrap(), logistic, epsilon = 1e-4);
        }
    }

    #[test]
    fn quantile_density_matches_finite_difference() {
        let g = GldParams::new(3.0_f64, 0.7, 0.2, -0.15).unwrap();
        for &p in &[0.05, 0.5, 0.93] {
            let h = 1e-6;
            let fd = (g.quantile(p + h).unwrap() - g.quantile(p - h).unwrap()) / (2.0 * h);
            assert!((fd - g.quantile_density(p)).abs() / fd < 1e-7);
        }
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(GldParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(GldParams::new(0.0, -1.0, 1.0, 1.0).is_err());
        assert!(uniform().quantile(1.0).is_err());
    }

    #[test]
    fn recovers_uniform_from_deciles() {
        let pts: Vec<(f64, f64)> = (1..10).map(|k| (k as f64 / 10.0, 2.0 * k as f64 / 10.0 - 1.0)).collect();
        let fit = fit_gld_points(&pts).unwrap();
        for &(p, a) in &pts {
            assert!((fit.params.quantile(p).unwrap() - a).abs() < 1e-4);
        }
    }

    #[test]
    fn too_few_boundaries() {
        let g = GroupedData::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![1, 1, 1, 1], None, "").unwrap();
        assert!(matches!(fit_gld(&g), Err(Error::Identifiability(_))));
    }
}
