//! One-dimensional Dirichlet and Fejér kernels on the unit-period torus and
//! their tensor products.
//!
//! Conventions: period 1, characters `e^{2πint}`. The Dirichlet kernel of
//! degree `l` is `D_l(t) = Σ_{r=-l}^{l} e^{2πirt} = sin((2l+1)πt)/sin(πt)`,
//! and the Fejér kernel is the arithmetic mean of `D_0..D_l`:
//! `K_l(t) = (1/(l+1)) (sin((l+1)πt)/sin(πt))^2`. `K_l` is nonnegative with
//! unit mass, which is what makes the means it generates well behaved.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::index::RectIndex;

/// Below this the closed forms lose too many digits to cancellation; the
/// finite cosine sums are exact there and cheap at desk-scale degrees.
const SIN_SINGULAR: f64 = 1e-8;

/// Dirichlet kernel `D_l(t)`, `t` in `[0,1)`. `D_l(0) = 2l+1` exactly.
pub fn dirichlet(l: u32, t: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&t), "torus point out of range: {t}");
    if t == 0.0 {
        return (2 * l + 1) as f64;
    }
    let s = (PI * t).sin();
    if s.abs() < SIN_SINGULAR {
        dirichlet_cosine_sum(l, t)
    } else {
        (((2 * l + 1) as f64) * PI * t).sin() / s
    }
}

/// Fejér kernel `K_l(t)`, `t` in `[0,1)`. `K_l(0) = l+1` exactly and
/// `K_l >= 0` everywhere.
pub fn fejer(l: u32, t: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&t), "torus point out of range: {t}");
    if t == 0.0 {
        return (l + 1) as f64;
    }
    let s = (PI * t).sin();
    if s.abs() < SIN_SINGULAR {
        fejer_cosine_sum(l, t)
    } else {
        let q = (((l + 1) as f64) * PI * t).sin() / s;
        q * q / ((l + 1) as f64)
    }
}

/// `D_l` by its definition, `1 + 2 Σ_{r=1}^{l} cos(2πrt)`.
fn dirichlet_cosine_sum(l: u32, t: f64) -> f64 {
    1.0 + 2.0 * (1..=l).map(|r| (2.0 * PI * r as f64 * t).cos()).sum::<f64>()
}

/// `K_l` by its Fourier expansion, `Σ_{|r|<=l} (1 - |r|/(l+1)) e^{2πirt}`.
fn fejer_cosine_sum(l: u32, t: f64) -> f64 {
    let next = (l + 1) as f64;
    1.0 + 2.0
        * (1..=l)
            .map(|r| (1.0 - r as f64 / next) * (2.0 * PI * r as f64 * t).cos())
            .sum::<f64>()
}

/// Product Fejér kernel `Π_j K_{N_j}((x_j - t_j) mod 1)` over the first
/// `rect.p()` axes.
pub fn kernel_tensor(rect: &RectIndex, x: &[f64], t: &[f64]) -> Result<f64> {
    let p = rect.p();
    if x.len() != p || t.len() != p {
        return Err(Error::ShapeMismatch {
            expected: vec![p, p],
            got: vec![x.len(), t.len()],
        });
    }
    Ok(rect
        .degrees()
        .iter()
        .zip(x.iter().zip(t))
        .map(|(&n, (&xj, &tj))| fejer(n, wrap_unit(xj - tj)))
        .product())
}

/// Reduces a real number into `[0, 1)`.
pub(crate) fn wrap_unit(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
