// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers: Pade matrix exponential, monotone cubic interpolation.

pub mod fixed;

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;

/// Induced 1-norm (max column sum).
pub fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |A^H A - I|.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.ncols();
    let p = a.adjoint() * a;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
    }
}

fn scaled_identity(n: usize, s: f64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, Complex64::new(s, 0.0))
}

fn scale(a: &CMatrix, s: f64) -> CMatrix {
    a.map(|z| z * s)
}

/// Matrix exponential by scaling and squaring with a Pade approximant
/// (degree picked from the 1-norm, Higham's 2005 thresholds).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    if n == 1 {
        return CMatrix::from_element(1, 1, a[(0, 0)].exp());
    }
    let norm = one_norm(a);
    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            return pade_low(a, m);
        }
    }
    let mut s = 0u32;
    if norm > THETA_13 {
        s = (norm / THETA_13).log2().ceil().max(0.0) as u32;
    }
    let a_scaled = scale(a, 0.5f64.powi(s as i32));
    let mut r = pade_13(&a_scaled);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn solve_pade(u: CMatrix, v: CMatrix) -> CMatrix {
    let p = &v + &u;
    let q = &v - &u;
    q.lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular for admissible norms")
}

fn pade_low(a: &CMatrix, m: usize) -> CMatrix {
    let n = a.nrows();
    let b = pade_coefficients(m);
    let a2 = a * a;
    let mut powers = Vec::with_capacity(m / 2 + 1);
    powers.push(scaled_identity(n, 1.0));
    powers.push(a2.clone());
    for k in 2..=m / 2 {
        let next = &powers[k - 1] * &a2;
        powers.push(next);
    }
    let mut u_inner = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for (k, pk) in powers.iter().enumerate() {
        u_inner += scale(pk, b[2 * k + 1]);
        v += scale(pk, b[2 * k]);
    }
    solve_pade(a * u_inner, v)
}

fn pade_13(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let b = pade_coefficients(13);
    let id = scaled_identity(n, 1.0);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u_inner =
        &a6 * u_hi + scale(&a6, b[7]) + scale(&a4, b[5]) + scale(&a2, b[3]) + scale(&id, b[1]);
    let v_hi = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v = &a6 * v_hi + scale(&a6, b[6]) + scale(&a4, b[4]) + scale(&a2, b[2]) + scale(&id, b[0]);
    solve_pade(a * u_inner, v)
}

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes.
/// Monotone data gives a monotone interpolant, so step-like samples do not ring.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
    uniform: Option<(f64, f64)>,
}

impl Pchip {
    /// `xs` strictly increasing, at least two points.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len());
        let ds = pchip_slopes(&xs, &ys);
        Pchip {
            xs,
            ys,
            ds,
            uniform: None,
        }
    }

    /// Samples on x0 + k h.
    pub fn uniform(x0: f64, h: f64, ys: Vec<f64>) -> Self {
        let xs: Vec<f64> = (0..ys.len()).map(|k| x0 + h * k as f64).collect();
        let mut p = Pchip::new(xs, ys);
        p.uniform = Some((x0, h));
        p
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn interval(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        match self.uniform {
            Some((x0, h)) => {
                let k = ((x - x0) / h).floor();
                if k <= 0.0 {
                    0
                } else {
                    (k as usize).min(last)
                }
            }
            None => self
                .xs
                .partition_point(|&v| v <= x)
                .saturating_sub(1)
                .min(last),
        }
    }

    /// Evaluate; outside the domain the end cubic is extended.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.interval(x);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.ds[k] + h01 * self.ys[k + 1] + h11 * h * self.ds[k + 1]
    }
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    let mut d = alloc::vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_exp(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut term = scaled_identity(n, 1.0);
        let mut acc = term.clone();
        for k in 1..80 {
            term = &term * a / Complex64::new(k as f64, 0.0);
            acc += &term;
        }
        acc
    }

    #[test]
    fn expm_matches_series_across_degrees() {
        for &s in &[0.005, 0.1, 0.5, 1.5, 4.0, 20.0] {
            let a = CMatrix::from_fn(4, 4, |i, j| {
                Complex64::new(
                    ((i * 3 + j) as f64).sin() * s,
                    ((i + 2 * j) as f64).cos() * s * 0.5,
                )
            });
            let half = scale(&a, 1.0 / 16.0);
            let mut reference = series_exp(&half);
            for _ in 0..4 {
                reference = &reference * &reference;
            }
            let e = expm(&a);
            let err = max_abs(&(&e - &reference)) / max_abs(&reference);
            assert!(err < 1e-12, "s={s} err={err}");
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(-2.0, 0.3)
        ]));
        let e = expm(&a);
        assert!((e[(0, 0)] - Complex64::new(0.0, 1.0).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - Complex64::new(-2.0, 0.3).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn pchip_reproduces_cubic_nodes_and_monotone_step() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| if x < 4.5 { 0.0 } else { 1.0 })
            .collect();
        let p = Pchip::new(xs.clone(), ys.clone());
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(p.eval(*x), *y);
        }
        let mut prev = -1.0;
        for k in 0..=900 {
            let v = p.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
        let u = Pchip::uniform(0.0, 1.0, ys);
        assert!((u.eval(4.3) - p.eval(4.3)).abs() < 1e-15);
    }
}
