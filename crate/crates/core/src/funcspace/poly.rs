//! Trigonometric polynomials on the product torus with finitely many terms.

use std::collections::BTreeMap;

use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::index::MultiIndex;

const TAU: f64 = std::f64::consts::TAU;

/// Finite linear combination of characters `x -> exp(2*pi*i <n, x>)`.
///
/// Coefficients are stored sparsely by [`MultiIndex`]; exact zeros are
/// dropped so the term set is canonical. The polynomial depends only on
/// coordinates `1..=max_coord()` and is constant in the rest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl TrigPoly {
    /// The zero polynomial.
    pub fn new() -> Self {
        Self::default()
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([(MultiIndex::zero(), c)])
    }

    /// The single character with frequency `index` and coefficient one.
    pub fn character(index: MultiIndex) -> Self {
        Self::from_terms([(index, Complex64::new(1.0, 0.0))])
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs.
    ///
    /// Repeated frequencies are accumulated; coefficients that end up
    /// exactly zero are dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut p = Self::new();
        for (index, c) in terms {
            p.add_term(index, c);
        }
        p
    }

    /// Adds `c` to the coefficient at `index`.
    pub fn add_term(&mut self, index: MultiIndex, c: Complex64) {
        let vanished = {
            let slot = self
                .terms
                .entry(index.clone())
                .or_insert(Complex64::new(0.0, 0.0));
            *slot += c;
            slot.re == 0.0 && slot.im == 0.0
        };
        if vanished {
            self.terms.remove(&index);
        }
    }

    /// Coefficient at `index`; zero when the term is absent.
    pub fn coeff(&self, index: &MultiIndex) -> Complex64 {
        self.terms
            .get(index)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Iterates over `(frequency, coefficient)` pairs in frequency order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether this is the zero polynomial.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coordinate any term depends on; zero for constants.
    pub fn max_coord(&self) -> usize {
        self.terms
            .keys()
            .map(MultiIndex::max_coord)
            .max()
            .unwrap_or(0)
    }

    /// Largest `|n_coord|` over all terms. Coordinates are 1-based.
    pub fn degree_in(&self, coord: usize) -> u32 {
        self.terms
            .keys()
            .map(|n| n.get(coord).unsigned_abs() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Per-axis degrees for coordinates `1..=m`.
    pub fn degrees_up_to(&self, m: usize) -> Vec<u32> {
        (1..=m).map(|k| self.degree_in(k)).collect()
    }

    /// Evaluates at `x` interpreted as the first `x.len()` coordinates.
    ///
    /// Fails with [`Error::MissingCoordinate`] when some term depends on a
    /// coordinate beyond `x.len()`.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (index, c) in &self.terms {
            let phase = index.dot(x)?;
            acc += c * Complex64::from_polar(1.0, TAU * phase);
        }
        Ok(acc)
    }

    /// Keeps only the terms supported on coordinates `1..=m`.
    ///
    /// This equals integrating out all coordinates beyond `m`: characters
    /// that depend on a dropped coordinate integrate to zero, the rest are
    /// untouched.
    pub fn marginalize(&self, m: usize) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .filter(|(index, _)| index.max_coord() <= m)
                .map(|(index, c)| (index.clone(), *c))
                .collect(),
        }
    }

    /// Pointwise product; frequencies add, coefficients convolve.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }

    /// Complex conjugate; frequencies negate, coefficients conjugate.
    pub fn conjugate(&self) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|(index, c)| (index.neg(), c.conj()))
                .collect(),
        }
    }

    /// The polynomial `|self|^2 = self * conj(self)`.
    ///
    /// Its values are real and nonnegative up to rounding, which makes it a
    /// convenient source of nonnegative test functions.
    pub fn modulus_squared(&self) -> TrigPoly {
        self.mul(&self.conjugate())
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (index, c) in &other.terms {
            out.add_term(index.clone(), *c);
        }
        out
    }

    /// Scales every coefficient by `c`.
    pub fn scale(&self, c: Complex64) -> TrigPoly {
        TrigPoly::from_terms(self.terms.iter().map(|(n, v)| (n.clone(), c * v)))
    }

    /// Pseudorandom polynomial on coordinates `1..=p`.
    ///
    /// Draws `terms` frequencies with each component uniform in
    /// `-max_degree..=max_degree` and coefficients with real and imaginary
    /// parts uniform in `[-1, 1)`. Duplicate frequencies accumulate, so the
    /// stored term count may be smaller than `terms`.
    pub fn random<R: Rng>(rng: &mut R, p: usize, max_degree: u32, terms: usize) -> TrigPoly {
        let d = i64::from(max_degree);
        let mut out = TrigPoly::new();
        for _ in 0..terms {
            let pairs: Vec<(usize, i64)> = (1..=p).map(|k| (k, rng.gen_range(-d..=d))).collect();
            let index = MultiIndex::from_pairs(pairs).expect("coordinates start at 1");
            let c = Complex64::new(
                2.0 * rng.gen::<f64>() - 1.0,
                2.0 * rng.gen::<f64>() - 1.0,
            );
            out.add_term(index, c);
        }
        out
    }

    /// Samples the polynomial on the uniform grid with `sizes[k]` nodes on
    /// axis `k + 1`, at nodes `j / sizes[k]`.
    ///
    /// `sizes` must cover every coordinate the polynomial depends on and
    /// every entry must be positive. Uses per-axis phase tables, so the cost
    /// is `O(terms * nodes * axes)` with no transcendental calls in the
    /// inner loop.
    pub fn sample_on_grid(&self, sizes: &[usize]) -> Result<ArrayD<Complex64>> {
        if sizes.contains(&0) {
            return Err(Error::invalid("grid sizes must be positive"));
        }
        if self.max_coord() > sizes.len() {
            return Err(Error::MissingCoordinate {
                needed: self.max_coord(),
                got: sizes.len(),
            });
        }
        if sizes.is_empty() {
            let v = self.eval(&[]).expect("constant polynomial needs no coordinates");
            return Ok(ndarray::arr0(v).into_dyn());
        }
        // tables[t][k][j] = exp(2 pi i n_k j / G_k) for term t, axis k.
        let tables: Vec<Vec<Vec<Complex64>>> = self
            .terms
            .keys()
            .map(|index| {
                sizes
                    .iter()
                    .enumerate()
                    .map(|(k, &g)| {
                        let n = index.get(k + 1) as f64;
                        (0..g)
                            .map(|j| Complex64::from_polar(1.0, TAU * n * j as f64 / g as f64))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let coeffs: Vec<Complex64> = self.terms.values().copied().collect();
        let mut out = ArrayD::from_elem(IxDyn(sizes), Complex64::new(0.0, 0.0));
        for (idx, slot) in out.indexed_iter_mut() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, c) in coeffs.iter().enumerate() {
                let mut prod = *c;
                for (k, &j) in idx.slice().iter().enumerate() {
                    prod *= tables[t][k][j];
                }
                acc += prod;
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Uniform-grid sizes adequate for quadrature of smooth transforms of
    /// the polynomial: powers of two with at least 32 nodes and four nodes
    /// per unit of degree on every active axis, one node on constant axes.
    pub fn quadrature_sizes(&self) -> Vec<usize> {
        (1..=self.max_coord())
            .map(|k| {
                let deg = self.degree_in(k) as usize;
                if deg == 0 {
                    1
                } else {
                    (4 * (deg + 1)).max(32).next_power_of_two()
                }
            })
            .collect()
    }

    /// Grid quadrature of `|f| ln^d(|f| + 1)` on automatically chosen
    /// sizes; see [`quadrature_sizes`](Self::quadrature_sizes).
    pub fn orlicz(&self, d: u32) -> f64 {
        self.orlicz_on_grid(d, &self.quadrature_sizes())
            .expect("automatic sizes satisfy the resolution floor")
    }

    /// Grid quadrature of `|f| ln^d(|f| + 1)` on caller-provided sizes.
    ///
    /// Requires at least `2 deg_k + 2` nodes on every active axis, the
    /// floor below which the samples cannot even represent the polynomial.
    /// The floor alone does not bound the quadrature error of the
    /// logarithmic integrand; refine the grid to tighten the value.
    pub fn orlicz_on_grid(&self, d: u32, sizes: &[usize]) -> Result<f64> {
        let m = self.max_coord();
        if sizes.len() < m {
            return Err(Error::MissingCoordinate {
                needed: m,
                got: sizes.len(),
            });
        }
        for (k, &g) in sizes.iter().enumerate() {
            let deg = self.degree_in(k + 1) as usize;
            let needed = if deg == 0 { 1 } else { 2 * deg + 2 };
            if g < needed {
                return Err(Error::ResolutionInsufficient {
                    coord: k + 1,
                    needed,
                    got: g,
                });
            }
        }
        let samples = self.sample_on_grid(sizes)?;
        let n = samples.len() as f64;
        Ok(samples
            .iter()
            .map(|v| super::orlicz_integrand(v.norm(), d))
            .sum::<f64>()
            / n)
    }
}
