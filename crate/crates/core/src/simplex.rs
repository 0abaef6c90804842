//! Nelder-Mead simplex minimizer with dimension-adaptive coefficients
//! (Gao & Han). Non-finite objective values are treated as `+inf`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Stop as soon as a value at or below this is reached.
    pub f_target: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_evals: 2000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            f_target: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    /// Minimizes `f` from an axis-aligned simplex of edge `step` around `x0`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], step: f64) -> SimplexResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        if n == 0 {
            let v = sanitize(f(x0));
            return SimplexResult {
                x: Vec::new(),
                f: v,
                evals: 1,
                converged: true,
            };
        }
        let nf = n as f64;
        let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
        let (rho, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            sanitize(f(x))
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let mut converged = false;
        while evals < self.max_evals {
            // Stable sort keeps the outcome independent of float ties.
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            if best <= self.f_target {
                converged = true;
                break;
            }
            let worst = simplex[n].1;
            let spread = if best.is_finite() && worst.is_finite() {
                (worst - best).abs()
            } else {
                f64::INFINITY
            };
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= self.f_tol && size <= self.x_tol {
                converged = true;
                break;
            }
            if size <= self.x_tol * 1e-3 {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let worst_x = simplex[n].0.clone();
            let xr = along(alpha, &worst_x);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(gamma, &worst_x);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(alpha * rho, &worst_x);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho, &worst_x);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best_x = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                for (xi, bi) in vertex.0.iter_mut().zip(&best_x) {
                    *xi = bi + sigma * (*xi - bi);
                }
                vertex.1 = eval(&vertex.0, &mut evals);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, f) = simplex.swap_remove(0);
        SimplexResult {
            x,
            f,
            evals,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let nm = NelderMead {
            max_evals: 5000,
            ..Default::default()
        };
        let r = nm.minimize(|x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            max_evals: 20_000,
            ..Default::default()
        };
        let r = nm.minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            0.3,
        );
        assert!(r.f < 1e-10, "f = {}", r.f);
    }

    #[test]
    fn higher_dimension() {
        let nm = NelderMead {
            max_evals: 40_000,
            ..Default::default()
        };
        let target: Vec<f64> = (0..12).map(|i| i as f64 * 0.25 - 1.0).collect();
        let r = nm.minimize(
            |x| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum(),
            &[0.0; 12],
            0.5,
        );
        assert!(r.f < 1e-12, "f = {}", r.f);
    }

    #[test]
    fn stops_at_target() {
        let nm = NelderMead {
            max_evals: 10_000,
            f_target: 1e-3,
            ..Default::default()
        };
        let r = nm.minimize(|x| x[0] * x[0] + x[1] * x[1], &[1.0, 1.0], 0.5);
        assert!(r.f <= 1e-3 && r.evals < 200);
    }

    #[test]
    fn nan_is_rejected() {
        let nm = NelderMead::default();
        let r = nm.minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) }, &[0.1], 0.2);
        assert!((r.x[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn eval_budget_respected() {
        let nm = NelderMead {
            max_evals: 50,
            ..Default::default()
        };
        let mut count = 0;
        let r = nm.minimize(
            |x| {
                count += 1;
                x.iter().map(|v| v.sin()).sum()
            },
            &[0.3; 6],
            0.1,
        );
        assert_eq!(r.evals, count);
        assert!(count <= 50 + 6 + 1);
    }
}
