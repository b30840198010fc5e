//! Functions stored as samples on a uniform grid over a finite cylinder.

use ndarray::{ArrayD, Axis, Dimension, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::wrap_unit;

/// Samples of a function on the uniform grid `{j_k / G_k}` over the first
/// `m` coordinates, constant in all later coordinates.
///
/// Axis `k` of the sample array corresponds to coordinate `k + 1` and holds
/// `G_k` nodes. Evaluation snaps to the nearest node with wraparound, so a
/// grid represents the piecewise-constant extension of its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderGrid {
    samples: ArrayD<Complex64>,
}

impl CylinderGrid {
    /// Wraps an already sampled array. Every axis must be nonempty.
    pub fn new(samples: ArrayD<Complex64>) -> Result<Self> {
        if samples.shape().contains(&0) {
            return Err(Error::invalid("grid axes must hold at least one node"));
        }
        Ok(Self { samples })
    }

    /// Samples `f` at every node `(j_1 / G_1, ..., j_m / G_m)`.
    pub fn sample_with(
        sizes: &[usize],
        mut f: impl FnMut(&[f64]) -> Result<Complex64>,
    ) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::invalid("grid axes must hold at least one node"));
        }
        if sizes.is_empty() {
            return Ok(Self {
                samples: ndarray::arr0(f(&[])?).into_dyn(),
            });
        }
        let mut samples = ArrayD::from_elem(IxDyn(sizes), Complex64::new(0.0, 0.0));
        let mut x = vec![0.0; sizes.len()];
        for (idx, slot) in samples.indexed_iter_mut() {
            for (k, &j) in idx.slice().iter().enumerate() {
                x[k] = j as f64 / sizes[k] as f64;
            }
            *slot = f(&x)?;
        }
        Ok(Self { samples })
    }

    /// Number of gridded coordinates.
    pub fn ndim(&self) -> usize {
        self.samples.ndim()
    }

    /// Per-axis node counts.
    pub fn sizes(&self) -> &[usize] {
        self.samples.shape()
    }

    /// The raw sample array, axis `k` being coordinate `k + 1`.
    pub fn samples(&self) -> &ArrayD<Complex64> {
        &self.samples
    }

    /// Value at the node nearest to `x`, with wraparound on each axis.
    ///
    /// `x` must supply at least `ndim()` coordinates; later coordinates are
    /// ignored since the function is constant there.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let m = self.ndim();
        if x.len() < m {
            return Err(Error::MissingCoordinate {
                needed: m,
                got: x.len(),
            });
        }
        let mut idx = Vec::with_capacity(m);
        for (k, &g) in self.sizes().iter().enumerate() {
            let j = (wrap_unit(x[k]) * g as f64).round() as usize % g;
            idx.push(j);
        }
        Ok(self.samples[IxDyn(&idx)])
    }

    /// Mean of all samples, the grid version of integrating the function.
    pub fn mean(&self) -> Complex64 {
        let n = self.samples.len() as f64;
        self.samples.iter().sum::<Complex64>() / n
    }

    /// Averages out every axis beyond the first `m`, mirroring integration
    /// of the trailing coordinates. With `m >= ndim()` this is a clone.
    pub fn marginalize(&self, m: usize) -> CylinderGrid {
        let mut a = self.samples.clone();
        while a.ndim() > m {
            let ax = Axis(a.ndim() - 1);
            let len = a.len_of(ax) as f64;
            a = a.sum_axis(ax).mapv(|v| v / len);
        }
        CylinderGrid { samples: a }
    }

    /// Grid quadrature of `|f| ln^d(|f| + 1)` at the grid's own resolution.
    pub fn orlicz(&self, d: u32) -> f64 {
        let n = self.samples.len() as f64;
        self.samples
            .iter()
            .map(|v| super::orlicz_integrand(v.norm(), d))
            .sum::<f64>()
            / n
    }

    /// Serializes the samples as little-endian `f64` pairs `(re, im)` in
    /// row-major order, coordinate 1 outermost.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.samples.len() * 16);
        for v in self.samples.iter() {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    /// Parses the format written by [`to_bytes`](Self::to_bytes); `sizes`
    /// supplies the shape since the byte stream carries none.
    pub fn from_bytes(sizes: &[usize], bytes: &[u8]) -> Result<Self> {
        let nodes: usize = sizes.iter().product();
        if bytes.len() != nodes * 16 {
            return Err(Error::invalid(format!(
                "grid payload holds {} bytes but shape {:?} needs {}",
                bytes.len(),
                sizes,
                nodes * 16
            )));
        }
        let values: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|chunk| {
                let re = f64::from_le_bytes(chunk[0..8].try_into().expect("chunk is 16 bytes"));
                let im = f64::from_le_bytes(chunk[8..16].try_into().expect("chunk is 16 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        let samples = ArrayD::from_shape_vec(IxDyn(sizes), values)
            .map_err(|e| Error::invalid(e.to_string()))?;
        Self::new(samples)
    }
}
