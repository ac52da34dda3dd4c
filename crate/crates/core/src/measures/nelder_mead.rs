//! Nelder–Mead simplex minimization with dimension-adaptive coefficients
//! (Gao & Han), suited to the 10–100 parameter problems of the convex roof.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop once `f(worst) − f(best)` falls below this.
    pub spread_tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iterations: 2000, spread_tolerance: 1e-10, initial_step: 0.4 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0);
        return NelderMeadResult { x: Vec::new(), value, iterations: 0, evaluations: 1, converged: true };
    }

    let nf = n as f64;
    let reflect = 1.0;
    let expand = 1.0 + 2.0 / nf;
    let contract = 0.75 - 1.0 / (2.0 * nf);
    let shrink = 1.0 - 1.0 / nf;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if values[worst] - values[best] < opts.spread_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= nf);

        let along = |out: &mut [f64], from: &[f64], coef: f64| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(from) {
                *o = c + coef * (c - w);
            }
        };

        along(&mut trial, &simplex[worst], reflect);
        let fr = eval(&trial);
        if fr < values[best] {
            along(&mut trial2, &simplex[worst], reflect * expand);
            let fe = eval(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        let (fc, accept) = if fr < values[worst] {
            along(&mut trial2, &simplex[worst], reflect * contract);
            let fc = eval(&trial2);
            (fc, fc <= fr)
        } else {
            along(&mut trial2, &simplex[worst], -contract);
            let fc = eval(&trial2);
            (fc, fc < values[worst])
        };
        if accept {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                *x = a + shrink * (*x - a);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    NelderMeadResult { x: simplex[best].clone(), value: values[best], iterations, evaluations, converged }
}
