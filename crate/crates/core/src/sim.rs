//! Monte-Carlo coverage harness and the centered-estimate experiment.

use rayon::prelude::*;

use crate::density_fit::{fit, EstimatedDistribution, FitMethod};
use crate::distributions::{RefDistribution, TrueMeasures};
use crate::error::{Error, Result};
use crate::grouped::{group_sample, GroupedData, GroupingScheme};
use crate::intervals::{bootstrap_ci, bootstrap_replicates, wald_qri_ci, BootstrapConfig, CiMethod};
use crate::measures::{Measure, DEFAULT_EPSILON, DEFAULT_QRI_GRID};
use crate::rng::{derive_seed, open_uniform, substream};
use crate::scalar::Real;

/// Desk-scale defaults: minutes of runtime, about ±0.025 Monte-Carlo error
/// on a coverage near 0.95.
pub const DESK_REPS: usize = 300;
pub const DESK_REPLICATES: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub dist: RefDistribution<T>,
    pub n: usize,
    pub scheme: GroupingScheme,
    pub fit_method: FitMethod,
    pub reps: usize,
    pub replicates: usize,
    pub level: T,
    pub seed: u64,
    pub measures: Vec<Measure>,
    pub epsilon: T,
    pub qri_grid: usize,
}

impl<T: Real> SimConfig<T> {
    /// Desk-scale run at the 95% level over all four measures.
    pub fn new(dist: RefDistribution<T>, n: usize, scheme: GroupingScheme, fit_method: FitMethod, seed: u64) -> Self {
        Self {
            dist,
            n,
            scheme,
            fit_method,
            reps: DESK_REPS,
            replicates: DESK_REPLICATES,
            level: T::lit(0.95),
            seed,
            measures: Measure::ALL.to_vec(),
            epsilon: T::lit(DEFAULT_EPSILON),
            qri_grid: DEFAULT_QRI_GRID,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Domain("need at least one simulation replicate".into()));
        }
        if self.replicates < 2 {
            return Err(Error::Domain("need at least 2 bootstrap replicates".into()));
        }
        if self.n < self.scheme.bins() {
            return Err(Error::Domain(format!(
                "sample size {} is too small for {} bins",
                self.n,
                self.scheme.bins()
            )));
        }
        if self.measures.is_empty() {
            return Err(Error::Domain("no measures requested".into()));
        }
        Ok(())
    }

    /// The (measure, method) cells the run reports, in output order.
    pub fn cells(&self) -> Vec<(Measure, CiMethod)> {
        let mut cells: Vec<(Measure, CiMethod)> =
            self.measures.iter().map(|&m| (m, CiMethod::BootstrapPercentile)).collect();
        if self.measures.contains(&Measure::Qri) {
            cells.push((Measure::Qri, CiMethod::Wald));
        }
        cells
    }
}

/// Coverage summary for one (measure, interval method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow<T> {
    pub dist: String,
    pub n: usize,
    pub scheme: GroupingScheme,
    pub fit: FitMethod,
    pub measure: Measure,
    pub method: CiMethod,
    /// Share of successful replicates whose interval holds the true value;
    /// NaN when every replicate failed.
    pub coverage: T,
    pub avg_width: T,
    pub failures: usize,
    pub reps: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl<T: Real> CoverageRow<T> {
    pub const CSV_HEADER: &'static str = "dist,n,scheme,fit,measure,method,coverage,avg_width,failures,reps,B,seed";

    pub fn to_csv_row(&self) -> String {
        format!(
            "\"{}\",{},{},{},{},{},{},{},{},{},{},{}",
            self.dist,
            self.n,
            self.scheme.name(),
            self.fit,
            self.measure,
            self.method,
            self.coverage,
            self.avg_width,
            self.failures,
            self.reps,
            self.replicates,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport<T> {
    pub truths: TrueMeasures<T>,
    pub rows: Vec<CoverageRow<T>>,
}

impl<T: Real> CoverageReport<T> {
    pub fn row(&self, measure: Measure, method: CiMethod) -> Option<&CoverageRow<T>> {
        self.rows.iter().find(|r| r.measure == measure && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CoverageRow::<T>::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv_row());
            out.push('\n');
        }
        out
    }
}

fn truth<T: Real>(t: &TrueMeasures<T>, m: Measure) -> T {
    match m {
        Measure::Gini => t.gini,
        Measure::Theil => t.theil,
        Measure::Atkinson => t.atkinson,
        Measure::Qri => t.qri,
    }
}

/// Raw sample of size `n` by inverse transform.
pub fn draw_sample<T: Real>(dist: &RefDistribution<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    let mut rng = substream(seed, 0);
    (0..n).map(|_| dist.quantile(open_uniform(&mut rng))).collect()
}

/// Sample, group (with bin means iff LI) and fit one replicate.
fn grouped_fit<T: Real>(
    dist: &RefDistribution<T>,
    n: usize,
    scheme: GroupingScheme,
    method: FitMethod,
    seed: u64,
) -> Result<(GroupedData<T>, EstimatedDistribution<T>)> {
    let x = draw_sample(dist, n, seed)?;
    let g = group_sample(&x, scheme, method == FitMethod::Li)?;
    let fitted = fit(&g, method)?;
    Ok((g, fitted.dist))
}

/// Per-cell `Some((covered, width))`, or `None` where that interval failed.
fn one_replicate<T: Real>(c: &SimConfig<T>, truths: &TrueMeasures<T>, rep: usize) -> Vec<Option<(bool, T)>> {
    let cells = c.cells();
    let rep_seed = derive_seed(c.seed, rep as u64);
    let Ok((_, est)) = grouped_fit(&c.dist, c.n, c.scheme, c.fit_method, rep_seed) else {
        return vec![None; cells.len()];
    };
    let cfg = BootstrapConfig {
        replicates: c.replicates,
        level: c.level,
        seed: derive_seed(rep_seed, 1),
        epsilon: c.epsilon,
        qri_grid: c.qri_grid,
        measures: c.measures.clone(),
    };
    let boot = bootstrap_ci(&est, c.n, &cfg).ok();
    let wald = wald_qri_ci(&est, c.n, c.level, c.qri_grid).ok();
    cells
        .iter()
        .map(|&(m, method)| {
            let ci = match method {
                CiMethod::BootstrapPercentile => boot.as_ref().and_then(|v| v.iter().find(|r| r.measure == m)),
                CiMethod::Wald => wald.as_ref(),
            }?;
            Some((ci.contains(truth(truths, m)), ci.width()))
        })
        .collect()
}

/// Coverage and average width of bootstrap intervals (every requested
/// measure) and the Wald QRI interval over `reps` simulated grouped samples.
///
/// Replicates whose fit or interval fails are counted per cell and left out
/// of that cell's coverage.
pub fn run_coverage<T: Real>(c: &SimConfig<T>) -> Result<CoverageReport<T>> {
    c.validate()?;
    let truths = c.dist.true_measures(c.epsilon, c.qri_grid)?;
    let outcomes: Vec<Vec<Option<(bool, T)>>> =
        (0..c.reps).into_par_iter().map(|rep| one_replicate(c, &truths, rep)).collect();

    let rows = c
        .cells()
        .into_iter()
        .enumerate()
        .map(|(i, (measure, method))| {
            let ok: Vec<(bool, T)> = outcomes.iter().filter_map(|o| o[i]).collect();
            let k = T::from_count(ok.len());
            let covered = T::from_count(ok.iter().filter(|(hit, _)| *hit).count());
            let widths: T = ok.iter().map(|&(_, w)| w).sum();
            CoverageRow {
                dist: c.dist.to_string(),
                n: c.n,
                scheme: c.scheme,
                fit: c.fit_method,
                measure,
                method,
                coverage: covered / k,
                avg_width: widths / k,
                failures: c.reps - ok.len(),
                reps: c.reps,
                replicates: c.replicates,
                seed: c.seed,
            }
        })
        .collect();
    Ok(CoverageReport { truths, rows })
}

/// The centered-estimate experiment: lognormal(0, σ) samples grouped into
/// quintiles and fitted by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredConfig<T> {
    pub sigmas: Vec<T>,
    pub n: usize,
    pub reps: usize,
    pub scheme: GroupingScheme,
    pub fit_method: FitMethod,
    pub seed: u64,
    pub epsilon: T,
    pub qri_grid: usize,
}

impl<T: Real> CenteredConfig<T> {
    /// σ ∈ {0.5, 1, 1.5, 2}, n = 250, quintiles, LI.
    pub fn new(reps: usize, seed: u64) -> Self {
        Self {
            sigmas: [0.5, 1.0, 1.5, 2.0].iter().map(|&s| T::lit(s)).collect(),
            n: 250,
            reps,
            scheme: GroupingScheme::Quintiles,
            fit_method: FitMethod::Li,
            seed,
            epsilon: T::lit(DEFAULT_EPSILON),
            qri_grid: DEFAULT_QRI_GRID,
        }
    }
}

/// Measures reported by the centered-estimate experiment (Theil is
/// unbounded above and left out).
pub const CENTERED_MEASURES: [Measure; 3] = [Measure::Gini, Measure::Atkinson, Measure::Qri];

/// One row of `sigma,measure,centered_estimate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredRow<T> {
    pub sigma: T,
    pub measure: Measure,
    pub centered: T,
}

pub const CENTERED_CSV_HEADER: &str = "sigma,measure,centered_estimate";

pub fn centered_to_csv<T: Real>(rows: &[CenteredRow<T>]) -> String {
    let mut out = String::from(CENTERED_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.sigma, r.measure, r.centered));
    }
    out
}

/// Inputs handed to a centered-estimate estimator for one replicate.
pub struct ReplicateContext<'a, T> {
    pub grouped: &'a GroupedData<T>,
    pub fitted: &'a EstimatedDistribution<T>,
    pub population: &'a RefDistribution<T>,
    pub n: usize,
    pub epsilon: T,
    pub qri_grid: usize,
    /// Seed reserved for the estimator's own randomness.
    pub seed: u64,
}

/// Default estimator: the measures of one bootstrap sample of size `n`
/// drawn from the fitted distribution.
pub fn bootstrap_sample_estimate<T: Real>(ctx: &ReplicateContext<'_, T>, m: Measure) -> Result<T> {
    let cfg = BootstrapConfig {
        replicates: 2,
        level: T::lit(0.95),
        seed: ctx.seed,
        epsilon: ctx.epsilon,
        qri_grid: ctx.qri_grid,
        measures: vec![m],
    };
    let r = bootstrap_replicates(ctx.fitted, ctx.n, &cfg)?;
    Ok(r.estimates[0][0])
}

pub fn centered_estimates<T: Real>(c: &CenteredConfig<T>) -> Result<Vec<CenteredRow<T>>> {
    centered_estimates_with(c, bootstrap_sample_estimate)
}

/// Centered estimates `estimate − truth` for every σ, replicate and
/// measure, with a caller-supplied estimator. Failed replicates are skipped.
pub fn centered_estimates_with<T, E>(c: &CenteredConfig<T>, estimator: E) -> Result<Vec<CenteredRow<T>>>
where
    T: Real,
    E: Fn(&ReplicateContext<'_, T>, Measure) -> Result<T> + Sync,
{
    if c.reps == 0 {
        return Err(Error::Domain("need at least one replicate".into()));
    }
    let mut rows = Vec::new();
    for (si, &sigma) in c.sigmas.iter().enumerate() {
        let dist = RefDistribution::lognormal(T::zero(), sigma)?;
        let truths = dist.true_measures(c.epsilon, c.qri_grid)?;
        let sigma_seed = derive_seed(c.seed, si as u64);
        let per_rep: Vec<Option<Vec<CenteredRow<T>>>> = (0..c.reps)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = derive_seed(sigma_seed, rep as u64);
                let (g, est) = grouped_fit(&dist, c.n, c.scheme, c.fit_method, rep_seed).ok()?;
                let ctx = ReplicateContext {
                    grouped: &g,
                    fitted: &est,
                    population: &dist,
                    n: c.n,
                    epsilon: c.epsilon,
                    qri_grid: c.qri_grid,
                    seed: derive_seed(rep_seed, 1),
                };
                CENTERED_MEASURES
                    .iter()
                    .map(|&m| {
                        estimator(&ctx, m).ok().map(|v| CenteredRow {
                            sigma,
                            measure: m,
                            centered: v - truth(&truths, m),
                        })
                    })
                    .collect()
            })
            .collect();
        rows.extend(per_rep.into_iter().flatten().flatten());
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_replicate_is_all_or_nothing() {
        let mut c = SimConfig::new(
            RefDistribution::exponential(1.0).unwrap(),
            200,
            GroupingScheme::Quintiles,
            FitMethod::Li,
            17,
        );
        c.reps = 1;
        c.replicates = 50;
        let r = run_coverage(&c).unwrap();
        assert_eq!(r.rows.len(), 5);
        for row in &r.rows {
            assert!(row.coverage == 0.0 || row.coverage == 1.0);
            assert!(row.avg_width > 0.0);
            assert_eq!(row.failures, 0);
        }
        let wald = r.row(Measure::Qri, CiMethod::Wald).unwrap();
        let est = grouped_fit(&c.dist, 200, c.scheme, c.fit_method, derive_seed(17, 0)).unwrap().1;
        let ci = wald_qri_ci(&est, 200, 0.95, 100).unwrap();
        assert_eq!(wald.avg_width, ci.width());
    }

    #[test]
    fn truth_injected_estimator_centers_at_zero() {
        let c = CenteredConfig::<f64> {
            sigmas: vec![0.5, 1.0],
            ..CenteredConfig::new(5, 3)
        };
        let rows = centered_estimates_with(&c, |ctx, m| {
            let t = ctx.population.true_measures(ctx.epsilon, ctx.qri_grid)?;
            Ok(truth(&t, m))
        })
        .unwrap();
        assert_eq!(rows.len(), 2 * 5 * 3);
        assert!(rows.iter().all(|r| r.centered == 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = SimConfig::new(
            RefDistribution::exponential(1.0).unwrap(),
            3,
            GroupingScheme::Quintiles,
            FitMethod::Li,
            0,
        );
        assert!(run_coverage(&c).is_err());
        c.n = 100;
        c.reps = 0;
        assert!(run_coverage(&c).is_err());
    }

    #[test]
    fn csv_layout() {
        let c = SimConfig::new(
            RefDistribution::exponential(1.0).unwrap(),
            100,
            GroupingScheme::Deciles,
            FitMethod::Li,
            9,
        );
        let row = CoverageRow {
            dist: c.dist.to_string(),
            n: 100,
            scheme: c.scheme,
            fit: c.fit_method,
            measure: Measure::Qri,
            method: CiMethod::Wald,
            coverage: 0.95,
            avg_width: 0.07,
            failures: 0,
            reps: 300,
            replicates: 300,
            seed: 9,
        };
        assert!(row.to_csv_row().ends_with(",deciles,li,qri,wald,0.95,0.07,0,300,300,9"));
    }
}
