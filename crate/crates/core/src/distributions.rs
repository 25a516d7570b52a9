//! Reference income distributions used for simulation and ground truth.
//!
//! Every family exposes a closed-form (or library-backed) quantile function,
//! so simulation draws are made by inverse transform and population values
//! of the inequality measures are integrals over `p ∈ (0, 1)`.

use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::Real;
use crate::special::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lognormal,
    SinghMaddala,
    Dagum,
    ChiSquare,
    ParetoII,
    Exponential,
    Weibull,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Lognormal,
        Family::SinghMaddala,
        Family::Dagum,
        Family::ChiSquare,
        Family::ParetoII,
        Family::Exponential,
        Family::Weibull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Lognormal => "lognormal",
            Family::SinghMaddala => "singhmaddala",
            Family::Dagum => "dagum",
            Family::ChiSquare => "chisquare",
            Family::ParetoII => "pareto2",
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
        }
    }

    /// Number of parameters, in the fixed order
    /// Lognormal(μ,σ); SinghMaddala(a,b,q); Dagum(a,b,p); ChiSquare(k);
    /// ParetoII(scale,shape); Exponential(rate); Weibull(shape,scale).
    pub fn arity(self) -> usize {
        match self {
            Family::Lognormal => 2,
            Family::SinghMaddala | Family::Dagum => 3,
            Family::ChiSquare | Family::Exponential => 1,
            Family::ParetoII | Family::Weibull => 2,
        }
    }

    /// Parameters of the simulation study (US family income fits and friends).
    pub fn default_params(self) -> &'static [f64] {
        match self {
            Family::Lognormal => &[0.0, 1.0],
            Family::SinghMaddala => &[1.6971, 87.6981, 8.3679],
            Family::Dagum => &[4.273, 14.28, 0.36],
            Family::ChiSquare => &[2.0],
            Family::ParetoII => &[1.0, 2.0],
            Family::Exponential => &[1.0],
            Family::Weibull => &[10.0, 1.0],
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "lognormal" | "lnorm" => Family::Lognormal,
            "singhmaddala" | "sm" => Family::SinghMaddala,
            "dagum" => Family::Dagum,
            "chisquare" | "chisq" | "chi2" => Family::ChiSquare,
            "pareto2" | "paretoii" | "pareto" | "lomax" => Family::ParetoII,
            "exponential" | "exp" => Family::Exponential,
            "weibull" => Family::Weibull,
            _ => return Err(Error::Domain(format!("unknown distribution family '{s}'"))),
        })
    }
}

/// A fully parameterized reference distribution. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct RefDistribution<T> {
    family: Family,
    params: Vec<T>,
}

/// Population values of the four inequality measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueMeasures<T> {
    pub gini: T,
    pub theil: T,
    pub atkinson: T,
    pub qri: T,
    /// Largest absolute error estimate reported by the integrator.
    pub quad_error: T,
}

impl<T: Real> RefDistribution<T> {
    pub fn new(family: Family, params: &[T]) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::Domain(format!(
                "{} takes {} parameter(s), got {}",
                family.name(),
                family.arity(),
                params.len()
            )));
        }
        for (i, &v) in params.iter().enumerate() {
            let free = family == Family::Lognormal && i == 0;
            if !v.is_finite() || (!free && v <= T::zero()) {
                return Err(Error::Domain(format!(
                    "{} parameter #{} must be {}, got {v}",
                    family.name(),
                    i + 1,
                    if free { "finite" } else { "positive" }
                )));
            }
        }
        Ok(Self {
            family,
            params: params.to_vec(),
        })
    }

    pub fn with_defaults(family: Family) -> Self {
        let params: Vec<T> = family.default_params().iter().map(|&v| T::lit(v)).collect();
        Self::new(family, &params).expect("default parameters are valid")
    }

    pub fn lognormal(mu: T, sigma: T) -> Result<Self> {
        Self::new(Family::Lognormal, &[mu, sigma])
    }

    pub fn exponential(rate: T) -> Result<Self> {
        Self::new(Family::Exponential, &[rate])
    }

    pub fn pareto2(scale: T, shape: T) -> Result<Self> {
        Self::new(Family::ParetoII, &[scale, shape])
    }

    pub fn chi_square(k: T) -> Result<Self> {
        Self::new(Family::ChiSquare, &[k])
    }

    pub fn weibull(shape: T, scale: T) -> Result<Self> {
        Self::new(Family::Weibull, &[shape, scale])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Quantile function `Q(p)`; requires `0 < p < 1`.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("quantile needs 0 < p < 1, got {p}")));
        }
        Ok(self.quantile_in_range(p))
    }

    fn quantile_in_range(&self, p: T) -> T {
        let th = &self.params;
        let one = T::one();
        // -ln(1 - p), accurate for small p
        let upper_log = || -(-p).ln_1p();
        match self.family {
            Family::Lognormal => {
                let z = normal_quantile(p).expect("p already range-checked");
                (th[0] + th[1] * z).exp()
            }
            Family::SinghMaddala => {
                let (a, b, q) = (th[0], th[1], th[2]);
                b * (upper_log() / q).exp_m1().powf(one / a)
            }
            Family::Dagum => {
                let (a, b, shape) = (th[0], th[1], th[2]);
                b * (-p.ln() / shape).exp_m1().powf(-one / a)
            }
            Family::ChiSquare => {
                let k = th[0];
                if k == T::lit(2.0) {
                    T::lit(2.0) * upper_log()
                } else {
                    let chi = ChiSquared::new(k.as_f64()).expect("validated degrees of freedom");
                    T::lit(chi.inverse_cdf(p.as_f64()))
                }
            }
            Family::ParetoII => {
                let (scale, shape) = (th[0], th[1]);
                scale * (upper_log() / shape).exp_m1()
            }
            Family::Exponential => upper_log() / th[0],
            Family::Weibull => {
                let (shape, scale) = (th[0], th[1]);
                scale * upper_log().powf(one / shape)
            }
        }
    }

    /// Probability density at `x`; zero outside the support.
    pub fn density(&self, x: T) -> T {
        let th = &self.params;
        let zero = T::zero();
        let one = T::one();
        if x < zero || !x.is_finite() {
            return zero;
        }
        match self.family {
            Family::Exponential => th[0] * (-th[0] * x).exp(),
            Family::ParetoII => {
                let (scale, shape) = (th[0], th[1]);
                shape / scale * (one + x / scale).powf(-(shape + one))
            }
            Family::ChiSquare if th[0] == T::lit(2.0) => T::lit(0.5) * (-x / T::lit(2.0)).exp(),
            _ if x == zero => zero,
            Family::Lognormal => {
                let (mu, sigma) = (th[0], th[1]);
                let z = (x.ln() - mu) / sigma;
                (-(z * z) / T::lit(2.0)).exp() / (x * sigma * (T::TAU()).sqrt())
            }
            Family::SinghMaddala => {
                let (a, b, q) = (th[0], th[1], th[2]);
                let r = (x / b).powf(a);
                a * q * r / (x * (one + r).powf(q + one))
            }
            Family::Dagum => {
                let (a, b, shape) = (th[0], th[1], th[2]);
                let r = (x / b).powf(a);
                a * shape * (x / b).powf(a * shape) / (x * (r + one).powf(shape + one))
            }
            Family::ChiSquare => {
                let chi = ChiSquared::new(th[0].as_f64()).expect("validated degrees of freedom");
                T::lit(chi.pdf(x.as_f64()))
            }
            Family::Weibull => {
                let (shape, scale) = (th[0], th[1]);
                let r = x / scale;
                shape / scale * r.powf(shape - one) * (-r.powf(shape)).exp()
            }
        }
    }

    /// Population Gini, Theil, Atkinson(ε) and QRI (J-point midpoint grid).
    pub fn true_measures(&self, epsilon: T, grid: usize) -> Result<TrueMeasures<T>> {
        true_measures_of(|p| self.quantile_in_range(p), epsilon, grid)
    }
}

/// Population measures for an arbitrary positive quantile function.
///
/// Integrals run over `(δ, 1 − δ)` with `δ = 1e-10` (or a few ulps of one
/// in low precision) by adaptive Gauss–Kronrod at relative tolerance 1e-8.
pub fn true_measures_of<T, Q>(quantile: Q, epsilon: T, grid: usize) -> Result<TrueMeasures<T>>
where
    T: Real,
    Q: Fn(T) -> T,
{
    if !(epsilon > T::zero()) {
        return Err(Error::Domain(format!("Atkinson epsilon must be > 0, got {epsilon}")));
    }
    if grid == 0 {
        return Err(Error::Domain("QRI grid size must be at least 1".into()));
    }
    let delta = T::lit(1e-10).max(T::lit(8.0) * T::epsilon());
    let (lo, hi) = (delta, T::one() - delta);
    let opts = QuadOptions {
        rel_tol: 1e-8_f64.max(100.0 * T::epsilon().as_f64()),
        ..QuadOptions::default()
    };
    let mut worst = T::zero();
    let mut run = |name: &str, f: &dyn Fn(T) -> T| -> Result<T> {
        let r = integrate(f, lo, hi, &opts)?;
        let slack = T::lit(1e-6) * T::one().max(r.value.abs());
        if !r.converged && r.error > slack {
            return Err(Error::Numerical(format!(
                "quadrature for {name} did not converge: estimate {}, error {} after {} intervals",
                r.value, r.error, r.intervals
            )));
        }
        worst = worst.max(r.error);
        Ok(r.value)
    };

    let mean = run("mean", &|p| quantile(p))?;
    if !(mean > T::zero()) {
        return Err(Error::Domain(format!("distribution mean must be positive, got {mean}")));
    }
    let two = T::lit(2.0);
    let gini = run("Gini", &|p| quantile(p) * (two * p - T::one()))? / mean;
    let theil = run("Theil", &|p| {
        let r = quantile(p) / mean;
        if r > T::zero() {
            r * r.ln()
        } else {
            T::zero()
        }
    })?;
    let one_minus = T::one() - epsilon;
    let atkinson = if one_minus.abs() < T::lit(1e-12) {
        let lg = run("Atkinson", &|p| (quantile(p) / mean).ln())?;
        T::one() - lg.exp()
    } else {
        let pm = run("Atkinson", &|p| (quantile(p) / mean).powf(one_minus))?;
        T::one() - pm.powf(T::one() / one_minus)
    };
    let qri = crate::measures::qri_hat(|p| Ok(quantile(p)), grid)?;
    Ok(TrueMeasures {
        gini,
        theil,
        atkinson,
        qri,
        quad_error: worst,
    })
}

impl<T: Real> fmt::Display for RefDistribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family.name())?;
        for (i, v) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Parses `family:param1,param2,...`; a bare family name takes the
/// simulation-study defaults, and Weibull accepts its shape alone.
impl<T: Real> FromStr for RefDistribution<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let family: Family = name.trim().parse()?;
        let Some(rest) = rest.filter(|r| !r.trim().is_empty()) else {
            return Ok(Self::with_defaults(family));
        };
        let mut params = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| Error::Domain(format!("bad parameter '{t}' in '{s}': {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if family == Family::Weibull && params.len() == 1 {
            params.push(T::one());
        }
        Self::new(family, &params)
    }
}

/// The seven distributions of the simulation study, in table order.
pub fn study_distributions<T: Real>() -> Vec<RefDistribution<T>> {
    Family::ALL.into_iter().map(RefDistribution::with_defaults).collect()
}
