//! Test-function families on the product torus and the logarithmic Orlicz
//! functional shared by all of them.
//!
//! Three families cover the needs of the summation experiments:
//!
//! * [`TrigPoly`]: band-limited functions whose Fourier data is explicit,
//! * [`SpikeTensor`]: sharply peaked products with closed-form
//!   coefficients and integrals, the reference against which numerics are
//!   checked,
//! * [`CylinderGrid`]: arbitrary sampled functions on finitely many
//!   coordinates.
//!
//! Each family evaluates at points of the torus, marginalizes to its first
//! `m` coordinates, and admits the functional
//! `integral |f| ln^d(|f| + 1) d mu`. Marginalizing can only shrink that
//! functional; [`marginal_orlicz_check`] tests the inequality for a
//! concrete function.

pub mod grid;
pub mod poly;
pub mod spike;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::index::MultiIndex;

pub use grid::CylinderGrid;
pub use poly::TrigPoly;
pub use spike::{spike_factor_coeff, SpikeTensor};

/// Exponent `d` of the logarithm in `integral |f| ln^d(|f| + 1)`.
///
/// `d = 0` recovers the plain integral of `|f|`; each increment demands
/// one more logarithmic order of integrability.
pub type OrliczExponent = u32;

/// Integrand `v ln^d(v + 1)` for `v >= 0`; nondecreasing and convex-like
/// enough that averaging before applying it can only lower the result.
pub(crate) fn orlicz_integrand(v: f64, d: OrliczExponent) -> f64 {
    v * (v + 1.0).ln().powi(d as i32)
}

/// A function from any of the supported families, under one interface.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Poly(TrigPoly),
    Spike(SpikeTensor),
    Grid(CylinderGrid),
}

impl TestFunction {
    /// Evaluates at `x` interpreted as the first `x.len()` coordinates.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        match self {
            TestFunction::Poly(p) => p.eval(x),
            TestFunction::Spike(s) => s.eval(x),
            TestFunction::Grid(g) => g.eval(x),
        }
    }

    /// Largest coordinate the function depends on.
    pub fn max_coord(&self) -> usize {
        match self {
            TestFunction::Poly(p) => p.max_coord(),
            TestFunction::Spike(s) => s.max_coord(),
            TestFunction::Grid(g) => g.ndim(),
        }
    }

    /// Integrates out every coordinate beyond `m`, staying in the family.
    pub fn marginalize(&self, m: usize) -> TestFunction {
        match self {
            TestFunction::Poly(p) => TestFunction::Poly(p.marginalize(m)),
            TestFunction::Spike(s) => TestFunction::Spike(s.marginalize(m)),
            TestFunction::Grid(g) => TestFunction::Grid(g.marginalize(m)),
        }
    }

    /// The functional `integral |f| ln^d(|f| + 1) d mu`.
    ///
    /// Spikes use their closed form, polynomials a uniform-grid quadrature
    /// at automatically chosen resolution, grids their own nodes.
    pub fn orlicz_functional(&self, d: OrliczExponent) -> f64 {
        match self {
            TestFunction::Poly(p) => p.orlicz(d),
            TestFunction::Spike(s) => s.orlicz_closed(d),
            TestFunction::Grid(g) => g.orlicz(d),
        }
    }

    /// Samples the function on the uniform grid with the given sizes.
    ///
    /// Polynomials use their table-driven sampler; the other families
    /// evaluate node by node. Resampling a grid function onto its own
    /// sizes reproduces it exactly, other sizes snap to nearest nodes.
    pub fn sample_grid(&self, sizes: &[usize]) -> Result<CylinderGrid> {
        match self {
            TestFunction::Poly(p) => CylinderGrid::new(p.sample_on_grid(sizes)?),
            other => CylinderGrid::sample_with(sizes, |x| other.eval(x)),
        }
    }
}

/// Slack allowed when testing the marginal inequality, absorbing the
/// quadrature error of the two functional evaluations.
pub const ORLICZ_INEQUALITY_TOL: f64 = 1e-8;

/// Outcome of one marginal-inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalCheck {
    /// Functional of the marginal `f_m`.
    pub lhs: f64,
    /// Functional of `f` itself.
    pub rhs: f64,
    /// Whether `lhs <= rhs + ORLICZ_INEQUALITY_TOL`.
    pub holds: bool,
}

/// Checks that marginalizing to `m` coordinates does not increase the
/// functional `integral |f| ln^d(|f| + 1)`.
///
/// Averaging inside the nondecreasing convex integrand never beats
/// averaging outside, so `lhs <= rhs` holds for every nonnegative `f`;
/// numerically the comparison carries [`ORLICZ_INEQUALITY_TOL`] of slack.
pub fn marginal_orlicz_check(f: &TestFunction, m: usize, d: OrliczExponent) -> MarginalCheck {
    let lhs = f.marginalize(m).orlicz_functional(d);
    let rhs = f.orlicz_functional(d);
    MarginalCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + ORLICZ_INEQUALITY_TOL,
    }
}

/// Declarative description of a test function, as found in experiment
/// configuration files.
///
/// ```json
/// {"type": "trigpoly", "terms": [{"index": {"1": 1}, "re": 1.0, "im": 0.0}]}
/// {"type": "spike", "eps": {"1": 0.1, "2": 0.2}}
/// {"type": "grid", "file": "samples.bin", "sizes": [64, 64]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FunctionSpec {
    Trigpoly { terms: Vec<TermSpec> },
    Spike { eps: SpikeTensor },
    Grid { file: String, sizes: Vec<usize> },
}

/// One term of a polynomial spec: frequency plus complex coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub index: MultiIndex,
    pub re: f64,
    pub im: f64,
}

impl TestFunction {
    /// Materializes a spec; grid sample files resolve relative to `base`.
    pub fn from_spec(spec: &FunctionSpec, base: &Path) -> Result<TestFunction> {
        match spec {
            FunctionSpec::Trigpoly { terms } => Ok(TestFunction::Poly(TrigPoly::from_terms(
                terms
                    .iter()
                    .map(|t| (t.index.clone(), Complex64::new(t.re, t.im))),
            ))),
            FunctionSpec::Spike { eps } => Ok(TestFunction::Spike(eps.clone())),
            FunctionSpec::Grid { file, sizes } => {
                let bytes = std::fs::read(base.join(file))?;
                Ok(TestFunction::Grid(CylinderGrid::from_bytes(sizes, &bytes)?))
            }
        }
    }
}
