//! JSON document for a fitted model.

use serde::{Deserialize, Serialize};

use super::{EstimatedDistribution, ExpTail, Fitted, GldParams, LiDensity};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GldJson {
    pub lambda: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailJson {
    pub start: f64,
    pub eta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ModelBody {
    Gld {
        params: GldJson,
    },
    Li {
        /// `null` marks an infinite final boundary.
        boundaries: Vec<Option<f64>>,
        frequencies: Vec<f64>,
        alphas: Vec<f64>,
        betas: Vec<f64>,
        tail: Option<TailJson>,
    },
}

/// `{method, params | {boundaries, alphas, betas, tail}, residual}` plus
/// the grouped sample size and label for downstream commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    #[serde(flatten)]
    pub body: ModelBody,
    pub residual: Option<f64>,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub label: String,
}

impl FittedModel {
    pub fn from_fitted<T: Real>(fitted: &Fitted<T>, n: Option<u64>, label: impl Into<String>) -> Self {
        let body = match &fitted.dist {
            EstimatedDistribution::Gld(g) => ModelBody::Gld {
                params: GldJson {
                    lambda: g.lambda.as_f64(),
                    eta: g.eta.as_f64(),
                    alpha: g.alpha.as_f64(),
                    beta: g.beta.as_f64(),
                },
            },
            EstimatedDistribution::Li(l) => ModelBody::Li {
                boundaries: l
                    .boundaries()
                    .iter()
                    .map(|b| b.is_finite().then(|| b.as_f64()))
                    .collect(),
                frequencies: l.freqs().iter().map(|v| v.as_f64()).collect(),
                alphas: l.alphas().iter().map(|v| v.as_f64()).collect(),
                betas: l.betas().iter().map(|v| v.as_f64()).collect(),
                tail: l.tail().map(|t| TailJson {
                    start: t.start.as_f64(),
                    eta: t.eta.as_f64(),
                    lambda: t.lambda.as_f64(),
                }),
            },
        };
        Self {
            body,
            residual: fitted.residual.map(|r| r.as_f64()),
            n,
            label: label.into(),
        }
    }

    pub fn to_distribution<T: Real>(&self) -> Result<EstimatedDistribution<T>> {
        match &self.body {
            ModelBody::Gld { params: p } => Ok(EstimatedDistribution::Gld(GldParams::new(
                T::lit(p.lambda),
                T::lit(p.eta),
                T::lit(p.alpha),
                T::lit(p.beta),
            )?)),
            ModelBody::Li {
                boundaries,
                frequencies,
                alphas,
                betas,
                tail,
            } => {
                let last = boundaries.len().saturating_sub(1);
                let bounds = boundaries
                    .iter()
                    .enumerate()
                    .map(|(i, b)| match b {
                        Some(v) => Ok(T::lit(*v)),
                        None if i == last => Ok(T::infinity()),
                        None => Err(Error::Serialization(format!("boundary #{} is null", i + 1))),
                    })
                    .collect::<Result<Vec<T>>>()?;
                let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
                Ok(EstimatedDistribution::Li(LiDensity::from_parts(
                    bounds,
                    lit(frequencies),
                    lit(alphas),
                    lit(betas),
                    tail.as_ref().map(|t| ExpTail {
                        start: T::lit(t.start),
                        eta: T::lit(t.eta),
                        lambda: T::lit(t.lambda),
                    }),
                )?))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density_fit::{LastBin, LiDensity};

    #[test]
    fn gld_document_shape() {
        let fitted = Fitted {
            dist: EstimatedDistribution::Gld(GldParams::new(1.0_f64, 2.0, 0.1, 0.2).unwrap()),
            residual: Some(0.5),
        };
        let m = FittedModel::from_fitted(&fitted, Some(100), "demo");
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["method"], "gld");
        assert_eq!(v["params"]["eta"], 2.0);
        assert_eq!(v["residual"], 0.5);
        let back = FittedModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.to_distribution::<f64>().unwrap(), fitted.dist);
    }

    #[test]
    fn li_document_round_trips() {
        let li = LiDensity::from_bins(&[0.0, 10.0, f64::INFINITY], &[0.9, 0.1], &[4.0, 12.0], LastBin::Auto).unwrap();
        let fitted = Fitted { dist: EstimatedDistribution::Li(li), residual: None };
        let m = FittedModel::from_fitted(&fitted, None, "");
        let text = m.to_json_pretty().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["method"], "li");
        assert!(v["boundaries"][2].is_null());
        assert_eq!(v["tail"]["lambda"], 2.0);
        assert!(v["residual"].is_null());
        let dist = FittedModel::from_json(&text).unwrap().to_distribution::<f64>().unwrap();
        for &p in &[0.1, 0.5, 0.95] {
            assert_eq!(dist.quantile(p).unwrap(), fitted.dist.quantile(p).unwrap());
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(FittedModel::from_json("{\"method\":\"spline\"}").is_err());
        let bad = r#"{"method":"gld","params":{"lambda":0,"eta":-1,"alpha":1,"beta":1},"residual":null}"#;
        assert!(FittedModel::from_json(bad).unwrap().to_distribution::<f64>().is_err());
    }
}
