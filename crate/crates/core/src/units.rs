// Copyright 2026 The czsim Authors
// SPDX-License-Identifier: Apache-2.0

//! GHz <-> rad/ns conversion. Only the propagator crosses this boundary.

use core::f64::consts::PI;
#[allow(unused_imports)] // std supplies these inherently under test
use num_traits::Float;

pub const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub fn ghz_to_angular(f: f64) -> f64 {
    TWO_PI * f
}

#[inline]
pub fn angular_to_ghz(w: f64) -> f64 {
    w / TWO_PI
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_pi(x: f64) -> f64 {
    let mut y = libm_rem(x + PI, 2.0 * PI);
    if y <= 0.0 {
        y += 2.0 * PI;
    }
    y - PI
}

/// Wrap an angle in degrees to [0, 360).
pub fn wrap_deg_360(x: f64) -> f64 {
    let y = libm_rem(x, 360.0);
    let y = if y < 0.0 { y + 360.0 } else { y };
    if y >= 360.0 {
        0.0
    } else {
        y
    }
}

/// Wrap an angle in degrees to (-180, 180].
pub fn wrap_deg_180(x: f64) -> f64 {
    let y = wrap_deg_360(x);
    if y > 180.0 {
        y - 360.0
    } else {
        y
    }
}

fn libm_rem(x: f64, m: f64) -> f64 {
    x - m * (x / m).floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_keeps_pi_positive() {
        assert_eq!(wrap_pi(PI), PI);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI) - PI).abs() < 1e-12);
        assert!(wrap_pi(0.1).abs() - 0.1 < 1e-15);
    }

    #[test]
    fn degree_wraps() {
        assert_eq!(wrap_deg_360(-1.0), 359.0);
        assert_eq!(wrap_deg_180(190.0), -170.0);
        assert_eq!(wrap_deg_180(180.0), 180.0);
    }
}
