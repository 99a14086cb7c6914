// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Stack-allocated K x K complex matrices for the propagator's inner loop.
//! Same Pade scaling-and-squaring scheme as [`super::expm`].

use num_complex::Complex64;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

use super::{pade_coefficients, THETA, THETA_13};

pub type Mat<const K: usize> = [[Complex64; K]; K];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn identity<const K: usize>() -> Mat<K> {
    let mut m = [[ZERO; K]; K];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn mul<const K: usize>(a: &Mat<K>, b: &Mat<K>) -> Mat<K> {
    let mut c = [[ZERO; K]; K];
    for i in 0..K {
        for k in 0..K {
            let aik = a[i][k];
            for j in 0..K {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn one_norm<const K: usize>(a: &Mat<K>) -> f64 {
    (0..K)
        .map(|j| (0..K).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// sum_k c_k P_k.
fn combo<const K: usize>(terms: &[(&Mat<K>, f64)]) -> Mat<K> {
    let mut out = [[ZERO; K]; K];
    for (m, c) in terms {
        for i in 0..K {
            for j in 0..K {
                out[i][j] += m[i][j] * *c;
            }
        }
    }
    out
}

/// Solve Q X = P by Gaussian elimination with partial pivoting.
fn solve<const K: usize>(mut q: Mat<K>, mut p: Mat<K>) -> Mat<K> {
    for col in 0..K {
        let piv = (col..K)
            .max_by(|&a, &b| q[a][col].norm().total_cmp(&q[b][col].norm()))
            .unwrap();
        q.swap(col, piv);
        p.swap(col, piv);
        let inv = Complex64::new(1.0, 0.0) / q[col][col];
        for r in col + 1..K {
            let f = q[r][col] * inv;
            if f == ZERO {
                continue;
            }
            for c in col..K {
                let v = q[col][c];
                q[r][c] -= f * v;
            }
            for c in 0..K {
                let v = p[col][c];
                p[r][c] -= f * v;
            }
        }
    }
    for col in (0..K).rev() {
        let inv = Complex64::new(1.0, 0.0) / q[col][col];
        for c in 0..K {
            p[col][c] *= inv;
        }
        for r in 0..col {
            let f = q[r][col];
            if f == ZERO {
                continue;
            }
            for c in 0..K {
                let v = p[col][c];
                p[r][c] -= f * v;
            }
        }
    }
    p
}

fn finish<const K: usize>(u: Mat<K>, v: Mat<K>) -> Mat<K> {
    let mut p = v;
    let mut q = v;
    for i in 0..K {
        for j in 0..K {
            p[i][j] += u[i][j];
            q[i][j] -= u[i][j];
        }
    }
    solve(q, p)
}

pub fn expm<const K: usize>(a: &Mat<K>) -> Mat<K> {
    let norm = one_norm(a);
    let id = identity::<K>();
    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            let b = pade_coefficients(m);
            let a2 = mul(a, a);
            let mut pows = [id; 5];
            pows[1] = a2;
            for k in 2..=m / 2 {
                pows[k] = mul(&pows[k - 1], &a2);
            }
            let odd: [(&Mat<K>, f64); 5] =
                core::array::from_fn(|k| (&pows[k], if k <= m / 2 { b[2 * k + 1] } else { 0.0 }));
            let even: [(&Mat<K>, f64); 5] =
                core::array::from_fn(|k| (&pows[k], if k <= m / 2 { b[2 * k] } else { 0.0 }));
            let u = mul(a, &combo(&odd[..=m / 2]));
            let v = combo(&even[..=m / 2]);
            return finish(u, v);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let f = 0.5f64.powi(s);
    let mut sa = *a;
    for row in sa.iter_mut() {
        for z in row.iter_mut() {
            *z *= f;
        }
    }
    let b = pade_coefficients(13);
    let a2 = mul(&sa, &sa);
    let a4 = mul(&a2, &a2);
    let a6 = mul(&a4, &a2);
    let u_hi = combo(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])]);
    let u_in = combo(&[
        (&mul(&a6, &u_hi), 1.0),
        (&a6, b[7]),
        (&a4, b[5]),
        (&a2, b[3]),
        (&id, b[1]),
    ]);
    let v_hi = combo(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])]);
    let v = combo(&[
        (&mul(&a6, &v_hi), 1.0),
        (&a6, b[6]),
        (&a4, b[4]),
        (&a2, b[2]),
        (&id, b[0]),
    ]);
    let mut r = finish(mul(&sa, &u_in), v);
    for _ in 0..s {
        r = mul(&r, &r);
    }
    r
}
