//! Reconstructing an income distribution from grouped data.

mod gld;
mod li;
mod model;
pub mod nelder_mead;

use std::fmt;
use std::str::FromStr;

pub use gld::{fit_gld, fit_gld_points, GldFit, GldParams};
pub use li::{fit_li, fit_li_with, ExpTail, LastBin, LiDensity};
pub use model::FittedModel;

use crate::distributions::RefDistribution;
use crate::error::{Error, Result};
use crate::grouped::GroupedData;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    Gld,
    Li,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::Gld => "gld",
            FitMethod::Li => "li",
        }
    }
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gld" => Ok(FitMethod::Gld),
            "li" | "linear" => Ok(FitMethod::Li),
            other => Err(Error::Domain(format!("unknown fit method '{other}'"))),
        }
    }
}

/// Anything that can feed the interval engines: a quantile function and
/// the density evaluated at its quantiles.
pub trait QuantileModel<T: Real>: Sync {
    fn quantile(&self, p: T) -> Result<T>;

    /// `f(Q(p))`, strictly positive.
    fn density_at_quantile(&self, p: T) -> Result<T>;
}

/// A distribution estimated from grouped data by either method.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatedDistribution<T> {
    Gld(GldParams<T>),
    Li(LiDensity<T>),
}

impl<T: Real> EstimatedDistribution<T> {
    pub fn method(&self) -> FitMethod {
        match self {
            EstimatedDistribution::Gld(_) => FitMethod::Gld,
            EstimatedDistribution::Li(_) => FitMethod::Li,
        }
    }

    pub fn quantile(&self, p: T) -> Result<T> {
        match self {
            EstimatedDistribution::Gld(g) => g.quantile(p),
            EstimatedDistribution::Li(l) => l.quantile(p),
        }
    }

    /// Density at the p-th estimated quantile; a nonpositive value means
    /// the fit is unusable there.
    pub fn density(&self, p: T) -> Result<T> {
        match self {
            EstimatedDistribution::Gld(g) => g.density_at_quantile(p),
            EstimatedDistribution::Li(l) => l.density_at_quantile(p),
        }
    }

    /// Distribution function, clamped to `[0, 1]`.
    pub fn cdf(&self, x: T) -> T {
        match self {
            EstimatedDistribution::Gld(g) => g.cdf(x),
            EstimatedDistribution::Li(l) => l.cdf(x),
        }
    }
}

impl<T: Real> QuantileModel<T> for EstimatedDistribution<T> {
    fn quantile(&self, p: T) -> Result<T> {
        EstimatedDistribution::quantile(self, p)
    }

    fn density_at_quantile(&self, p: T) -> Result<T> {
        self.density(p)
    }
}

impl<T: Real> QuantileModel<T> for RefDistribution<T> {
    fn quantile(&self, p: T) -> Result<T> {
        RefDistribution::quantile(self, p)
    }

    fn density_at_quantile(&self, p: T) -> Result<T> {
        let d = self.density(RefDistribution::quantile(self, p)?);
        if d > T::zero() && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Numerical(format!("density at p = {p} is {d}")))
        }
    }
}

/// A fitted distribution plus the matching residual (GLD only).
#[derive(Debug, Clone, PartialEq)]
pub struct Fitted<T> {
    pub dist: EstimatedDistribution<T>,
    pub residual: Option<T>,
}

/// Fits grouped data by the chosen method.
///
/// The linear-interpolation route always models the final bin with the
/// exponential tail, so a finite top value supplied for GLD purposes does
/// not turn it into a wide linear bin.
pub fn fit<T: Real>(g: &GroupedData<T>, method: FitMethod) -> Result<Fitted<T>> {
    match method {
        FitMethod::Gld => {
            let f = fit_gld(g)?;
            Ok(Fitted {
                dist: EstimatedDistribution::Gld(f.params),
                residual: Some(f.residual),
            })
        }
        FitMethod::Li => Ok(Fitted {
            dist: EstimatedDistribution::Li(fit_li_with(g, LastBin::ExponentialTail)?),
            residual: None,
        }),
    }
}
