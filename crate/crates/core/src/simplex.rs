// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Nelder-Mead simplex minimiser (alpha = 1, gamma = 2, rho = 1/2, sigma = 1/2).

use alloc::vec::Vec;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Stop when the largest vertex distance from the best vertex drops below this.
    pub diameter: f64,
    /// Stop when max f - min f over the simplex drops below this.
    pub spread: f64,
    /// Iteration cap per dimension.
    pub iterations_per_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            diameter: 1e-10,
            spread: 1e-12,
            iterations_per_dim: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// True when the iteration cap ended the search.
    pub hit_iteration_cap: bool,
}

/// Axis-aligned starting simplex around `x0`.
pub fn initial_simplex(x0: &[f64], steps: &[f64]) -> Vec<Vec<f64>> {
    let mut s = alloc::vec![x0.to_vec()];
    for (i, &h) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += h;
        s.push(v);
    }
    s
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub fn nelder_mead_minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    simplex: Vec<Vec<f64>>,
    tol: Tolerances,
) -> Minimum {
    let n = simplex.len() - 1;
    assert!(
        n >= 1 && simplex.iter().all(|v| v.len() == n),
        "simplex needs dim + 1 vertices"
    );
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<(Vec<f64>, f64)> = simplex
        .into_iter()
        .map(|x| {
            let v = eval(&x, &mut evals);
            (x, v)
        })
        .collect();
    let cap = tol.iterations_per_dim * n;
    let mut it = 0usize;
    loop {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &pts[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| dist(&p.0, &best.0))
            .fold(0.0, f64::max);
        let spread = pts[n].1 - pts[0].1;
        if diameter < tol.diameter || spread < tol.spread {
            break;
        }
        if it >= cap {
            let (point, value) = pts.swap_remove(0);
            return Minimum {
                point,
                value,
                iterations: it,
                evaluations: evals,
                hit_iteration_cap: true,
            };
        }
        it += 1;
        let mut centroid = alloc::vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(&p.0) {
                *c += x / n as f64;
            }
        }
        let worst = pts[n].clone();
        let xr = lerp(&centroid, &worst.0, -1.0);
        let fr = eval(&xr, &mut evals);
        if fr < pts[0].1 {
            let xe = lerp(&centroid, &worst.0, -2.0);
            let fe = eval(&xe, &mut evals);
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = lerp(&centroid, &xr, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst.0, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            pts[n] = (xc, fc);
            continue;
        }
        let x0 = pts[0].0.clone();
        for p in pts[1..].iter_mut() {
            let x = lerp(&x0, &p.0, 0.5);
            let v = eval(&x, &mut evals);
            *p = (x, v);
        }
    }
    let (point, value) = pts.swap_remove(0);
    Minimum {
        point,
        value,
        iterations: it,
        evaluations: evals,
        hit_iteration_cap: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_is_flagged() {
        let m = nelder_mead_minimize(
            |x| (x[0] - 3.0).powi(2),
            initial_simplex(&[0.0], &[1e-3]),
            Tolerances {
                iterations_per_dim: 2,
                ..Default::default()
            },
        );
        assert!(m.hit_iteration_cap);
        assert_eq!(m.iterations, 2);
    }
}
