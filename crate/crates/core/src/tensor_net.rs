//! Tensor products of operator nets on finite factor spaces.
//!
//! Each factor is a finite probability space carrying a chain of linear
//! operators whose first element is integration against the factor's
//! measure. A position of the product net assigns one operator per factor,
//! all but finitely many being that integration element; applying the
//! product operator therefore averages the untouched factors out and
//! broadcasts the result back, which is what makes nets over infinitely
//! many factors finitely computable.
//!
//! [`fejer_on_circle`](OperatorNet::fejer_on_circle) realizes the discrete
//! Fejér means on a sampled circle as such a chain, with degree zero being
//! integration and degree `G - 1` the exact identity on `G` nodes, so the
//! product net walks all the way from the global mean to the field itself.

use ndarray::{Array2, ArrayD, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernels::{fejer, wrap_unit};

/// How far a row of the null operator may deviate from the factor weights
/// and still count as integration.
const NULL_ELEMENT_TOL: f64 = 1e-12;

/// A finite probability space: nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpace {
    weights: Vec<f64>,
}

impl FactorSpace {
    /// Validates that `weights` are nonnegative and sum to one within
    /// `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("a factor space needs at least one atom"));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::invalid("factor weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "factor weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    /// The uniform space on `n` atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a factor space needs at least one atom"));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of a function on the atoms against the measure.
    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        if values.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: vec![self.len()],
                got: vec![values.len()],
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(&w, &v)| v.scale(w))
            .sum())
    }
}

/// A chain of linear operators on one factor space, position 0 being
/// integration (the null element of the net).
///
/// Operators are dense matrices acting on functions over the atoms:
/// `(T v)_i = sum_j M[i, j] v_j`.
#[derive(Clone, Debug)]
pub struct OperatorNet {
    space: FactorSpace,
    ops: Vec<Array2<Complex64>>,
}

impl OperatorNet {
    /// Validates shapes and the null element: every row of `ops[0]` must
    /// equal the factor weights, so that applying it integrates and
    /// broadcasts.
    pub fn new(space: FactorSpace, ops: Vec<Array2<Complex64>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::invalid("an operator net needs at least the null element"));
        }
        let n = space.len();
        for (s, m) in ops.iter().enumerate() {
            if m.shape() != [n, n] {
                return Err(Error::ShapeMismatch {
                    expected: vec![n, n],
                    got: m.shape().to_vec(),
                });
            }
            if s == 0 {
                for i in 0..n {
                    for j in 0..n {
                        let want = space.weights()[j];
                        let got = m[[i, j]];
                        if (got.re - want).abs() > NULL_ELEMENT_TOL
                            || got.im.abs() > NULL_ELEMENT_TOL
                        {
                            return Err(Error::invalid(
                                "the first operator must integrate against the factor weights",
                            ));
                        }
                    }
                }
            }
        }
        Ok(Self { space, ops })
    }

    /// Chain of discrete Fejér means on the circle sampled at `grid`
    /// uniform nodes.
    ///
    /// `degrees` lists the kernel degrees along the chain; it must start
    /// at 0 (making the null element integration), be nondecreasing, and
    /// stay below `grid` so each mean's quadrature keeps unit mass. At
    /// degree `grid - 1` the mean is the identity on the grid.
    pub fn fejer_on_circle(grid: usize, degrees: &[u32]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::invalid("the degree chain must be nonempty"));
        }
        if degrees[0] != 0 {
            return Err(Error::invalid("the degree chain must start at 0"));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("the degree chain must be nondecreasing"));
        }
        let top = *degrees.last().expect("nonempty") as usize;
        if top >= grid {
            return Err(Error::ResolutionInsufficient {
                coord: 1,
                needed: top + 1,
                got: grid,
            });
        }
        let space = FactorSpace::uniform(grid)?;
        let ops = degrees
            .iter()
            .map(|&deg| {
                Array2::from_shape_fn((grid, grid), |(i, j)| {
                    let t = wrap_unit((i as f64 - j as f64) / grid as f64);
                    Complex64::new(fejer(deg, t) / grid as f64, 0.0)
                })
            })
            .collect();
        Self::new(space, ops)
    }

    /// Number of operators in the chain.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn space(&self) -> &FactorSpace {
        &self.space
    }

    /// Matrix of the operator at chain position `s`.
    pub fn op(&self, s: usize) -> Result<&Array2<Complex64>> {
        self.ops.get(s).ok_or_else(|| {
            Error::invalid(format!(
                "chain position {s} out of range, the net has {} operators",
                self.ops.len()
            ))
        })
    }
}

/// Position of the product net: one chain position per factor, all but
/// finitely many being 0 (the null element). Coordinates are 1-based and
/// zero positions are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductNetIndex {
    positions: BTreeMap<usize, usize>,
}

impl ProductNetIndex {
    /// The all-null position, the null element of the product net.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(coordinate, position)` pairs; zero positions are
    /// dropped, repeated coordinates are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut positions = BTreeMap::new();
        for (coord, s) in pairs {
            if coord == 0 {
                return Err(Error::invalid("product net coordinates are 1-based"));
            }
            if s == 0 {
                continue;
            }
            if positions.insert(coord, s).is_some() {
                return Err(Error::invalid(format!(
                    "coordinate {coord} given more than once"
                )));
            }
        }
        Ok(Self { positions })
    }

    /// Chain position at `coord`; 0 (null) when absent.
    pub fn get(&self, coord: usize) -> usize {
        self.positions.get(&coord).copied().unwrap_or(0)
    }

    /// Coordinates holding a non-null position, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.keys().copied()
    }

    /// Number of non-null positions.
    pub fn support_len(&self) -> usize {
        self.positions.len()
    }

    /// Largest coordinate with a non-null position (0 when all null).
    pub fn max_coord(&self) -> usize {
        self.positions.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Applies one factor's operator along one axis of a product field.
pub fn apply_axis(
    net: &OperatorNet,
    s: usize,
    axis: usize,
    field: &ArrayD<Complex64>,
) -> Result<ArrayD<Complex64>> {
    if axis >= field.ndim() {
        return Err(Error::invalid(format!(
            "axis {axis} out of range for a field with {} axes",
            field.ndim()
        )));
    }
    let n = net.space().len();
    if field.shape()[axis] != n {
        return Err(Error::ShapeMismatch {
            expected: vec![n],
            got: vec![field.shape()[axis]],
        });
    }
    let m = net.op(s)?;
    let mut out = field.clone();
    let mut src = vec![Complex64::new(0.0, 0.0); n];
    for mut lane in out.lanes_mut(Axis(axis)) {
        for (slot, v) in src.iter_mut().zip(lane.iter()) {
            *slot = *v;
        }
        for (i, slot) in lane.iter_mut().enumerate() {
            *slot = m
                .row(i)
                .iter()
                .zip(&src)
                .map(|(a, b)| a * b)
                .sum();
        }
    }
    Ok(out)
}

/// Applies the product operator at `index` to a field sampled on the
/// product of the factors' atoms (axis `k` belongs to factor `k + 1`).
///
/// Every axis gets its factor's operator, null positions included: those
/// axes are integrated out and the mean broadcast back, so the result
/// lives on the same grid as the input.
pub fn tensor_apply(
    nets: &[OperatorNet],
    index: &ProductNetIndex,
    field: &ArrayD<Complex64>,
) -> Result<ArrayD<Complex64>> {
    if field.ndim() != nets.len() {
        return Err(Error::ShapeMismatch {
            expected: nets.iter().map(|n| n.space().len()).collect(),
            got: field.shape().to_vec(),
        });
    }
    if index.max_coord() > nets.len() {
        return Err(Error::DimensionMismatch {
            expected: nets.len(),
            got: index.max_coord(),
        });
    }
    let mut a = field.clone();
    for (k, net) in nets.iter().enumerate() {
        a = apply_axis(net, index.get(k + 1), k, &a)?;
    }
    Ok(a)
}

/// Integral of a product field against the product measure.
pub fn integrate(nets: &[OperatorNet], field: &ArrayD<Complex64>) -> Result<Complex64> {
    if field.ndim() != nets.len() {
        return Err(Error::ShapeMismatch {
            expected: nets.iter().map(|n| n.space().len()).collect(),
            got: field.shape().to_vec(),
        });
    }
    let mut a = field.clone();
    for k in (0..nets.len()).rev() {
        let w = nets[k].space().weights();
        if a.shape()[k] != w.len() {
            return Err(Error::ShapeMismatch {
                expected: vec![w.len()],
                got: vec![a.shape()[k]],
            });
        }
        let ax = Axis(k);
        let mut acc: ArrayD<Complex64> = ArrayD::zeros(a.shape()[..k].to_vec());
        for (j, &wj) in w.iter().enumerate() {
            acc.zip_mut_with(&a.index_axis(ax, j), |slot, &z| *slot += z.scale(wj));
        }
        a = acc;
    }
    Ok(*a.first().expect("fully contracted array holds one value"))
}

/// One record of [`staircase_harness`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessStep {
    /// Step number along the staircase.
    pub step: usize,
    /// How many factors hold a non-null operator.
    pub support: usize,
    /// Chain position of every factor, in factor order.
    pub positions: Vec<usize>,
    /// `max |T f - f|` over all grid points.
    pub max_error: f64,
}

/// Walks the product net along a staircase and records how far the
/// applied field is from the target.
///
/// At step `s`, factor `k` (0-based) sits at chain position
/// `min(s - k, len_k - 1)` (null before the staircase reaches it). One new
/// factor activates per step while earlier factors keep climbing, so both
/// the support and the per-factor positions grow without bound until every
/// factor tops out; the walk ends exactly there. When each chain ends in
/// an operator that reproduces the field (for
/// [`OperatorNet::fejer_on_circle`] with top degree `grid - 1`, the
/// identity), the final error vanishes up to rounding; the decay along the
/// way is the quantity of interest.
pub fn staircase_harness(
    nets: &[OperatorNet],
    field: &ArrayD<Complex64>,
) -> Result<Vec<HarnessStep>> {
    if nets.is_empty() {
        return Err(Error::invalid("the harness needs at least one factor"));
    }
    let last_step = nets
        .iter()
        .enumerate()
        .map(|(k, n)| k + n.len() - 1)
        .max()
        .expect("nonempty");
    let mut out = Vec::with_capacity(last_step + 1);
    for step in 0..=last_step {
        let positions: Vec<usize> = nets
            .iter()
            .enumerate()
            .map(|(k, n)| step.saturating_sub(k).min(n.len() - 1))
            .collect();
        let index = ProductNetIndex::from_pairs(
            positions.iter().enumerate().map(|(k, &s)| (k + 1, s)),
        )?;
        let applied = tensor_apply(nets, &index, field)?;
        let max_error = applied
            .iter()
            .zip(field.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        out.push(HarnessStep {
            step,
            support: index.support_len(),
            positions,
            max_error,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{TestFunction, TrigPoly};
    use crate::index::{MultiIndex, RectIndex};
    use crate::summation::fejer_mean_weights;
    use ndarray::IxDyn;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(shape: &[usize], seed: u64) -> ArrayD<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ArrayD::from_shape_fn(IxDyn(shape), |_| {
            c(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0)
        })
    }

    #[test]
    fn factor_space_validation_and_integration() {
        assert!(FactorSpace::new(vec![]).is_err());
        assert!(FactorSpace::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(FactorSpace::new(vec![0.5, 0.6]).is_err());
        assert!(FactorSpace::new(vec![0.5, 0.5 + 1e-10]).is_err());
        let s = FactorSpace::new(vec![0.25, 0.75]).unwrap();
        let v = s.integrate(&[c(4.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((v - c(1.0, 3.0)).norm() < 1e-15);
        assert!(s.integrate(&[c(1.0, 0.0)]).is_err());
        let u = FactorSpace::uniform(4).unwrap();
        assert!((u.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn operator_net_enforces_null_element() {
        let space = FactorSpace::uniform(2).unwrap();
        let good = Array2::from_elem((2, 2), c(0.5, 0.0));
        let bad = Array2::from_shape_fn((2, 2), |(i, j)| c(if i == j { 1.0 } else { 0.0 }, 0.0));
        assert!(OperatorNet::new(space.clone(), vec![good.clone()]).is_ok());
        assert!(OperatorNet::new(space.clone(), vec![bad.clone()]).is_err());
        assert!(OperatorNet::new(space.clone(), vec![good, bad]).is_ok());
        assert!(OperatorNet::new(space, vec![]).is_err());
    }

    #[test]
    fn fejer_chain_endpoints_are_integration_and_identity() {
        let g = 8;
        let net = OperatorNet::fejer_on_circle(g, &[0, 1, 3, 7]).unwrap();
        assert_eq!(net.len(), 4);
        let null = net.op(0).unwrap();
        for v in null.iter() {
            assert!((v - c(1.0 / g as f64, 0.0)).norm() < 1e-15);
        }
        let top = net.op(3).unwrap();
        for ((i, j), v) in top.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-13, "({i},{j}): {v}");
        }
        assert!(net.op(4).is_err());
    }

    #[test]
    fn fejer_chain_rejects_bad_degree_lists() {
        assert!(OperatorNet::fejer_on_circle(8, &[]).is_err());
        assert!(OperatorNet::fejer_on_circle(8, &[1, 2]).is_err());
        assert!(OperatorNet::fejer_on_circle(8, &[0, 3, 2]).is_err());
        assert!(matches!(
            OperatorNet::fejer_on_circle(8, &[0, 8]),
            Err(Error::ResolutionInsufficient { .. })
        ));
        assert!(OperatorNet::fejer_on_circle(8, &[0, 7]).is_ok());
    }

    #[test]
    fn null_position_integrates_and_broadcasts() {
        let nets = vec![
            OperatorNet::fejer_on_circle(4, &[0, 3]).unwrap(),
            OperatorNet::fejer_on_circle(6, &[0, 5]).unwrap(),
        ];
        let field = random_field(&[4, 6], 12);
        let mean = integrate(&nets, &field).unwrap();
        let applied = tensor_apply(&nets, &ProductNetIndex::zero(), &field).unwrap();
        for v in applied.iter() {
            assert!((v - mean).norm() < 1e-13);
        }
        // plain average, since both factors are uniform
        let brute: Complex64 =
            field.iter().sum::<Complex64>() / field.len() as f64;
        assert!((mean - brute).norm() < 1e-13);
    }

    #[test]
    fn axes_commute() {
        let nets = [
            OperatorNet::fejer_on_circle(5, &[0, 2, 4]).unwrap(),
            OperatorNet::fejer_on_circle(7, &[0, 3, 6]).unwrap(),
        ];
        let field = random_field(&[5, 7], 77);
        let ab = apply_axis(&nets[1], 1, 1, &apply_axis(&nets[0], 2, 0, &field).unwrap()).unwrap();
        let ba = apply_axis(&nets[0], 2, 0, &apply_axis(&nets[1], 1, 1, &field).unwrap()).unwrap();
        for (x, y) in ab.iter().zip(ba.iter()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn product_net_matches_series_fejer_mean() {
        // the discrete chain applied to samples of theta_(1,1) must equal
        // the series-side Fejér mean at every node
        let g = 8usize;
        let degrees = [0u32, 1, 2, 3];
        let nets = vec![
            OperatorNet::fejer_on_circle(g, &degrees).unwrap(),
            OperatorNet::fejer_on_circle(g, &degrees).unwrap(),
        ];
        let poly = TrigPoly::character(
            MultiIndex::from_pairs([(1, 1), (2, 1)]).unwrap(),
        );
        let f = TestFunction::Poly(poly);
        let field = f.sample_grid(&[g, g]).unwrap().samples().clone();
        let index = ProductNetIndex::from_pairs([(1, 2), (2, 3)]).unwrap();
        let applied = tensor_apply(&nets, &index, &field).unwrap();
        let rect = RectIndex::new(vec![degrees[2], degrees[3]]).unwrap();
        for j0 in 0..g {
            for j1 in 0..g {
                let x = [j0 as f64 / g as f64, j1 as f64 / g as f64];
                let want = fejer_mean_weights(&f, &rect, &x).unwrap();
                let got = applied[IxDyn(&[j0, j1])];
                assert!((got - want).norm() < 1e-10, "({j0},{j1})");
            }
        }
    }

    #[test]
    fn staircase_reaches_the_field() {
        let nets = vec![
            OperatorNet::fejer_on_circle(6, &[0, 1, 3, 5]).unwrap(),
            OperatorNet::fejer_on_circle(6, &[0, 2, 5]).unwrap(),
        ];
        let field = random_field(&[6, 6], 5);
        let steps = staircase_harness(&nets, &field).unwrap();
        // factor 0 tops out at step 3, factor 1 (offset by one) at step 3
        assert_eq!(steps.len(), 4);
        assert_eq!(steps[0].positions, vec![0, 0]);
        assert_eq!(steps[0].support, 0);
        assert_eq!(steps[1].positions, vec![1, 0]);
        assert_eq!(steps[1].support, 1);
        assert_eq!(steps[2].positions, vec![2, 1]);
        assert_eq!(steps[3].positions, vec![3, 2]);
        assert_eq!(steps[3].support, 2);
        // both chains end at the identity, so the last error is rounding
        assert!(steps[3].max_error < 1e-12, "{}", steps[3].max_error);
        // the first step is the distance of the field from its mean,
        // which is large for this field
        assert!(steps[0].max_error > 0.1);
    }

    #[test]
    fn product_index_drops_nulls() {
        let i = ProductNetIndex::from_pairs([(1, 0), (3, 2)]).unwrap();
        assert_eq!(i.get(1), 0);
        assert_eq!(i.get(3), 2);
        assert_eq!(i.support_len(), 1);
        assert_eq!(i.max_coord(), 3);
        assert!(ProductNetIndex::from_pairs([(0, 1)]).is_err());
        assert!(ProductNetIndex::from_pairs([(2, 1), (2, 2)]).is_err());
        assert!(ProductNetIndex::zero().is_zero());
    }
}
