//! Derivative-free simplex minimizer.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions<T> {
    pub max_iter: usize,
    /// Stop once every vertex lies within this (sup-norm) distance of the best.
    pub x_tol: T,
    /// Or once the spread of function values falls below `f_tol · |f_best|`.
    pub f_tol: T,
}

impl<T: Real> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            x_tol: T::lit(1e-10),
            f_tol: T::lit(1e-15),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadOutcome<T> {
    pub x: Vec<T>,
    pub f: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` with an axis-aligned initial simplex
/// of edge lengths `steps`. Non-finite objective values act as `+∞`.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], steps: &[T], opts: &NelderMeadOptions<T>) -> NelderMeadOutcome<T>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    let dim = x0.len();
    assert_eq!(steps.len(), dim, "one step per coordinate");
    let mut eval = |x: &[T]| {
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let (reflect, expand, contract, shrink) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for k in 0..dim {
        let mut v = x0.to_vec();
        v[k] = v[k] + steps[k];
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = &simplex[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(best).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        let spread = values[dim] - values[0];
        if diameter < opts.x_tol || (values[dim].is_finite() && spread <= opts.f_tol * values[0].abs()) {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let nf = T::from_count(dim);
        let centroid: Vec<T> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<T>() / nf)
            .collect();
        let toward = |t: T| -> Vec<T> {
            // centroid + t (centroid − worst)
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let xr = toward(reflect);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = toward(reflect * expand);
            let fe = eval(&xe);
            if fe < fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[dim] {
            let xc = toward(reflect * contract);
            let fc = eval(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = toward(-contract);
            let fc = eval(&xc);
            (xc, fc, fc < values[dim])
        };
        if accept {
            simplex[dim] = xc;
            values[dim] = fc;
            continue;
        }
        let anchor = simplex[0].clone();
        for i in 1..=dim {
            let v: Vec<T> = anchor
                .iter()
                .zip(&simplex[i])
                .map(|(&a, &x)| a + shrink * (x - a))
                .collect();
            values[i] = eval(&v);
            simplex[i] = v;
        }
    }
    NelderMeadOutcome {
        x: simplex.swap_remove(0),
        f: values[0],
        iterations,
        converged,
    }
}
