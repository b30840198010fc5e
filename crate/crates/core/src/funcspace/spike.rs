//! Products of one-dimensional unit-mass indicator spikes.
//!
//! Every quantity of interest for these functions has a closed form, which
//! makes them the reference family for checking the numerical routines:
//! Fourier coefficients factor per axis, and the integral of
//! `|f| ln^d(|f| + 1)` collapses to a single logarithm because `f` takes
//! only the values `0` and its peak.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::kernels::wrap_unit;

const TAU: f64 = std::f64::consts::TAU;

/// Product of per-coordinate spikes `x_k -> (1/eps_k) * [0 <= x_k < eps_k]`.
///
/// Each factor has unit integral, so the whole product integrates to one
/// and dropping a factor is the same as integrating its coordinate out.
/// A factor with width `1` is the constant function one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SpikeTensor {
    eps: BTreeMap<usize, f64>,
}

impl<'de> Deserialize<'de> for SpikeTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let eps = BTreeMap::<crate::index::CoordKey, f64>::deserialize(d)?;
        SpikeTensor::new(eps.into_iter().map(|(k, v)| (k.0, v)))
            .map_err(serde::de::Error::custom)
    }
}

impl SpikeTensor {
    /// Builds a spike product from `(coordinate, width)` pairs.
    ///
    /// Coordinates are 1-based and widths must lie in `(0, 1]`.
    pub fn new(eps: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let eps: BTreeMap<usize, f64> = eps.into_iter().collect();
        for (&coord, &e) in &eps {
            if coord == 0 {
                return Err(Error::invalid("spike coordinates are 1-based"));
            }
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::invalid(format!(
                    "spike width must lie in (0, 1], got {e} at coordinate {coord}"
                )));
            }
        }
        Ok(Self { eps })
    }

    /// Iterates over `(coordinate, width)` factors in coordinate order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.eps.iter().map(|(&k, &e)| (k, e))
    }

    /// Largest coordinate carrying a spike factor; zero when constant.
    pub fn max_coord(&self) -> usize {
        self.eps.keys().max().copied().unwrap_or(0)
    }

    /// Peak value `prod_k 1/eps_k`, attained on the support box.
    pub fn peak(&self) -> f64 {
        self.eps.values().map(|e| 1.0 / e).product()
    }

    /// Evaluates at `x`; coordinates wrap onto `[0, 1)`.
    ///
    /// Fails with [`Error::MissingCoordinate`] when a factor sits on a
    /// coordinate beyond `x.len()`.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let mut v = 1.0;
        for (&coord, &e) in &self.eps {
            let Some(&xk) = x.get(coord - 1) else {
                return Err(Error::MissingCoordinate {
                    needed: coord,
                    got: x.len(),
                });
            };
            let t = wrap_unit(xk);
            if t < e {
                v /= e;
            } else {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        Ok(Complex64::new(v, 0.0))
    }

    /// Drops the factors on coordinates beyond `m`.
    ///
    /// Because each factor integrates to one, the result is exactly the
    /// integral of the function over those coordinates.
    pub fn marginalize(&self, m: usize) -> SpikeTensor {
        SpikeTensor {
            eps: self
                .eps
                .iter()
                .filter(|(&k, _)| k <= m)
                .map(|(&k, &e)| (k, e))
                .collect(),
        }
    }

    /// Fourier coefficient at frequency `index`, in closed form.
    ///
    /// Per axis: the transform of a width-`eps` unit-mass spike is
    /// `(1 - exp(-2 pi i n eps)) / (2 pi i n eps)` for `n != 0` and `1` at
    /// `n = 0`. An axis outside the factor set contributes the coefficient
    /// of the constant one, which vanishes at every nonzero frequency.
    pub fn fourier_coeff(&self, index: &MultiIndex) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        for (coord, n) in index.iter() {
            match self.eps.get(&coord) {
                Some(&e) => c *= spike_factor_coeff(e, n),
                None => return Complex64::new(0.0, 0.0),
            }
        }
        c
    }

    /// Value of `integral |f| ln^d(|f| + 1)` in closed form.
    ///
    /// The function equals its peak `V` on a box of measure `1/V` and is
    /// zero elsewhere, so the integral is `ln^d(V + 1)`.
    pub fn orlicz_closed(&self, d: u32) -> f64 {
        let v = self.peak();
        (v + 1.0).ln().powi(d as i32)
    }
}

/// One-axis spike coefficient `(1 - exp(-2 pi i n eps)) / (2 pi i n eps)`.
pub fn spike_factor_coeff(eps: f64, n: i64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let w = TAU * n as f64 * eps;
    let numer = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -w);
    numer / Complex64::new(0.0, w)
}
