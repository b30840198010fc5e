//! Rectangular partial sums and Fejér means of multiple Fourier series.
//!
//! Everything here works from a [`FourierTable`], a dense block of Fourier
//! coefficients on a degree box. The Fejér mean has two independent
//! computational routes:
//!
//! * [`fejer_mean_weights`]: triangular reweighting of the coefficients in
//!   the table,
//! * [`fejer_mean_conv`]: quadrature of the convolution against a tensor
//!   product of Fejér kernels, which never touches coefficients.
//!
//! The two must agree wherever both are accurate; keeping them separate is
//! what makes that agreement a meaningful check.

use ndarray::{ArrayD, Axis, Dimension, IxDyn, Slice};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::funcspace::{CylinderGrid, SpikeTensor, TestFunction, TrigPoly};
use crate::index::{enumerate_net, MultiIndex, RectIndex, Schedule};
use crate::kernels::{fejer, wrap_unit};

const TAU: f64 = std::f64::consts::TAU;

/// Dense Fourier coefficients of a function on the degree box
/// `|n_k| <= N_k`, `k = 1..=p`.
///
/// Axis `k` of the array has `2 N_k + 1` entries and position `j` holds
/// frequency `n = j - N_k`. Frequencies supported outside the first `p`
/// coordinates belong to the marginal that was integrated out and do not
/// appear.
#[derive(Clone, Debug)]
pub struct FourierTable {
    degrees: Vec<u32>,
    coeffs: ArrayD<Complex64>,
}

impl FourierTable {
    /// Computes the coefficient table of `f` on the box given by
    /// `degrees`, after marginalizing `f` to the first `degrees.len()`
    /// coordinates.
    ///
    /// Polynomials and spikes fill the box exactly from their coefficient
    /// formulas. Grid functions go through a per-axis DFT of their
    /// samples, which requires `G_k >= 2 N_k + 1` nodes on every gridded
    /// axis; coarser grids fail with [`Error::Aliasing`].
    pub fn build(f: &TestFunction, degrees: &[u32]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::invalid("a coefficient table needs at least one axis"));
        }
        let p = degrees.len();
        let coeffs = match f.marginalize(p) {
            TestFunction::Poly(poly) => scatter_poly(&poly, degrees),
            TestFunction::Spike(spike) => outer_spike(&spike, degrees),
            TestFunction::Grid(grid) => dft_grid(&grid, degrees)?,
        };
        Ok(Self {
            degrees: degrees.to_vec(),
            coeffs,
        })
    }

    /// Number of active coordinates.
    pub fn p(&self) -> usize {
        self.degrees.len()
    }

    /// Per-axis box half-widths.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Stored coefficient at `index`.
    ///
    /// Fails with [`Error::CoefficientOutsideBox`] when the frequency has
    /// support beyond coordinate `p` or exceeds a half-width.
    pub fn coeff(&self, index: &MultiIndex) -> Result<Complex64> {
        if index.max_coord() > self.p() {
            return Err(Error::CoefficientOutsideBox);
        }
        let mut pos = Vec::with_capacity(self.p());
        for (k, &n_cap) in self.degrees.iter().enumerate() {
            let n = index.get(k + 1);
            if n.unsigned_abs() > u64::from(n_cap) {
                return Err(Error::CoefficientOutsideBox);
            }
            pos.push((n + i64::from(n_cap)) as usize);
        }
        Ok(self.coeffs[IxDyn(&pos)])
    }

    /// Rectangular partial sum over `rect` evaluated at `x`.
    pub fn partial_sum_at(&self, rect: &RectIndex, x: &[f64]) -> Result<Complex64> {
        self.weighted_sum(rect, x, false)
    }

    /// Fejér mean over `rect` evaluated at `x`: each axis reweights its
    /// frequencies by `1 - |n| / (N + 1)`.
    pub fn fejer_mean_at(&self, rect: &RectIndex, x: &[f64]) -> Result<Complex64> {
        self.weighted_sum(rect, x, true)
    }

    fn weighted_sum(&self, rect: &RectIndex, x: &[f64], triangular: bool) -> Result<Complex64> {
        let p = self.p();
        if rect.p() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: rect.p(),
            });
        }
        if x.len() < p {
            return Err(Error::MissingCoordinate {
                needed: p,
                got: x.len(),
            });
        }
        for (k, &n) in rect.degrees().iter().enumerate() {
            if n > self.degrees[k] {
                return Err(Error::CoefficientOutsideBox);
            }
        }
        // per-axis factors u_k[i] = w(n) exp(2 pi i n x_k), n = i - N_k
        let factors: Vec<Vec<Complex64>> = rect
            .degrees()
            .iter()
            .enumerate()
            .map(|(k, &n_cap)| {
                let half = i64::from(n_cap);
                (-half..=half)
                    .map(|n| {
                        let w = if triangular {
                            1.0 - (n.unsigned_abs() as f64) / f64::from(n_cap + 1)
                        } else {
                            1.0
                        };
                        Complex64::from_polar(1.0, TAU * n as f64 * x[k]).scale(w)
                    })
                    .collect()
            })
            .collect();
        let view = self.coeffs.slice_each_axis(|ad| {
            let k = ad.axis.index();
            let center = self.degrees[k] as usize;
            let half = rect.degree(k) as usize;
            Slice::from((center - half)..(center + half + 1))
        });
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &c) in view.indexed_iter() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let mut term = c;
            for (k, &i) in idx.slice().iter().enumerate() {
                term *= factors[k][i];
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// Fourier coefficient of `f` at `index`, by the most precise route the
/// family offers: coefficient lookup for polynomials, the closed form for
/// spikes, direct node summation for grids.
pub fn fourier_coeff(f: &TestFunction, index: &MultiIndex) -> Result<Complex64> {
    match f {
        TestFunction::Poly(p) => Ok(p.coeff(index)),
        TestFunction::Spike(s) => Ok(s.fourier_coeff(index)),
        TestFunction::Grid(g) => grid_coeff_direct(g, index),
    }
}

/// Rectangular partial sum of `f` over `rect` at `x`.
///
/// Builds a one-shot table; hold a [`FourierTable`] when evaluating many
/// rectangles or points.
pub fn partial_sum(f: &TestFunction, rect: &RectIndex, x: &[f64]) -> Result<Complex64> {
    FourierTable::build(f, rect.degrees())?.partial_sum_at(rect, x)
}

/// Fejér mean of `f` over `rect` at `x`, by coefficient reweighting.
pub fn fejer_mean_weights(f: &TestFunction, rect: &RectIndex, x: &[f64]) -> Result<Complex64> {
    FourierTable::build(f, rect.degrees())?.fejer_mean_at(rect, x)
}

/// Fejér mean of `f` over `rect` at `x`, by quadrature of the kernel
/// convolution on a uniform grid with the given sizes.
///
/// `sizes` must cover both the `rect.p()` kernel axes and every coordinate
/// `f` depends on; surplus axes integrate `f` plainly. For a polynomial
/// the quadrature is exact as soon as `G_k > N_k + deg_k(f)` on every
/// kernel axis; for other families the error decays with the grid.
pub fn fejer_mean_conv(
    f: &TestFunction,
    rect: &RectIndex,
    x: &[f64],
    sizes: &[usize],
) -> Result<Complex64> {
    if sizes.len() < rect.p().max(f.max_coord()) {
        return Err(Error::MissingCoordinate {
            needed: rect.p().max(f.max_coord()),
            got: sizes.len(),
        });
    }
    fejer_mean_conv_sampled(&f.sample_grid(sizes)?, rect, x)
}

/// The convolution route of [`fejer_mean_conv`], starting from an already
/// sampled function. Reuse the samples when sweeping rectangles or points.
pub fn fejer_mean_conv_sampled(
    samples: &CylinderGrid,
    rect: &RectIndex,
    x: &[f64],
) -> Result<Complex64> {
    let p = rect.p();
    let q = samples.ndim();
    if q < p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: q,
        });
    }
    if x.len() < p {
        return Err(Error::MissingCoordinate {
            needed: p,
            got: x.len(),
        });
    }
    let sizes = samples.sizes().to_vec();
    let mut a = samples.samples().clone();
    // contract axes from the last inward; axis k < p integrates against the
    // Fejér kernel at x_k, later axes integrate plainly
    for k in (0..q).rev() {
        let g = sizes[k];
        let scale = 1.0 / g as f64;
        let weights: Vec<f64> = (0..g)
            .map(|j| {
                let t = j as f64 / g as f64;
                if k < p {
                    fejer(rect.degree(k), wrap_unit(x[k] - t)) * scale
                } else {
                    scale
                }
            })
            .collect();
        let ax = Axis(k);
        let mut acc: ArrayD<Complex64> = ArrayD::zeros(a.shape()[..k].to_vec());
        for (j, &w) in weights.iter().enumerate() {
            acc.zip_mut_with(&a.index_axis(ax, j), |s, &z| *s += z.scale(w));
        }
        a = acc;
    }
    Ok(*a.first().expect("fully contracted array holds one value"))
}

/// One record of [`dimension_sweep`]: the error statistics of the Fejér
/// mean over `rect` in dimension `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepStep {
    pub p: usize,
    pub rect: RectIndex,
    pub err_max: f64,
    pub err_median: f64,
}

/// Walks a schedule-admissible path to degree `n_max` in every dimension
/// `1..=p_max` and records `|Fejér mean - f|` statistics over the sample
/// points at every step.
///
/// Dimensions are swept in order, so the result shows whether convergence
/// survives growing the number of active variables, not just the degrees.
/// The path in dimension `p` is drawn with `seed + p`, making the whole
/// sweep reproducible from one seed. Every sample point must supply at
/// least `max(p_max, f.max_coord())` coordinates.
pub fn dimension_sweep(
    f: &TestFunction,
    schedule: &Schedule,
    p_max: usize,
    n_max: u32,
    points: &[Vec<f64>],
    seed: u64,
) -> Result<Vec<SweepStep>> {
    if p_max == 0 {
        return Err(Error::invalid("the sweep needs at least one dimension"));
    }
    if points.is_empty() {
        return Err(Error::invalid("the sweep needs at least one sample point"));
    }
    let targets: Vec<Complex64> = points.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for p in 1..=p_max {
        let path = enumerate_net(schedule, p, n_max, seed.wrapping_add(p as u64))?;
        let table = FourierTable::build(f, &vec![n_max; p])?;
        for rect in path {
            let mut errs = Vec::with_capacity(points.len());
            for (x, target) in points.iter().zip(&targets) {
                let sigma = table.fejer_mean_at(&rect, x)?;
                errs.push((sigma - target).norm());
            }
            let (err_max, err_median) = max_and_median(&mut errs);
            out.push(SweepStep {
                p,
                rect,
                err_max,
                err_median,
            });
        }
    }
    Ok(out)
}

/// Maximum and median of a nonempty slice; sorts in place. An even count
/// takes the midpoint of the two central values.
pub fn max_and_median(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("error statistics are finite"));
    let max = values[values.len() - 1];
    let median = if values.len() % 2 == 1 {
        values[values.len() / 2]
    } else {
        0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
    };
    (max, median)
}

fn scatter_poly(poly: &TrigPoly, degrees: &[u32]) -> ArrayD<Complex64> {
    let shape: Vec<usize> = degrees.iter().map(|&n| 2 * n as usize + 1).collect();
    let mut out = ArrayD::from_elem(IxDyn(&shape), Complex64::new(0.0, 0.0));
    'term: for (index, &c) in poly.terms() {
        let mut pos = Vec::with_capacity(degrees.len());
        for (k, &n_cap) in degrees.iter().enumerate() {
            let n = index.get(k + 1);
            if n.unsigned_abs() > u64::from(n_cap) {
                continue 'term;
            }
            pos.push((n + i64::from(n_cap)) as usize);
        }
        out[IxDyn(&pos)] = c;
    }
    out
}

fn outer_spike(spike: &SpikeTensor, degrees: &[u32]) -> ArrayD<Complex64> {
    use crate::funcspace::spike_factor_coeff;
    let eps: std::collections::BTreeMap<usize, f64> = spike.factors().collect();
    // per-axis coefficient vectors; an axis without a spike factor is the
    // constant one, whose only nonzero coefficient sits at frequency zero
    let axes: Vec<Vec<Complex64>> = degrees
        .iter()
        .enumerate()
        .map(|(k, &n_cap)| {
            let half = i64::from(n_cap);
            (-half..=half)
                .map(|n| match eps.get(&(k + 1)) {
                    Some(&e) => spike_factor_coeff(e, n),
                    None if n == 0 => Complex64::new(1.0, 0.0),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
        .collect();
    let shape: Vec<usize> = degrees.iter().map(|&n| 2 * n as usize + 1).collect();
    let mut out = ArrayD::from_elem(IxDyn(&shape), Complex64::new(0.0, 0.0));
    for (idx, slot) in out.indexed_iter_mut() {
        let mut c = Complex64::new(1.0, 0.0);
        for (k, &i) in idx.slice().iter().enumerate() {
            c *= axes[k][i];
            if c.re == 0.0 && c.im == 0.0 {
                break;
            }
        }
        *slot = c;
    }
    out
}

fn dft_grid(grid: &CylinderGrid, degrees: &[u32]) -> Result<ArrayD<Complex64>> {
    let p = degrees.len();
    let m = grid.ndim();
    debug_assert!(m <= p, "caller marginalizes the grid to at most p axes");
    for (k, (&g, &deg)) in grid.sizes().iter().zip(degrees).enumerate() {
        if 2 * deg as usize + 1 > g {
            return Err(Error::Aliasing {
                coord: k + 1,
                degree: i64::from(deg),
                grid: g,
            });
        }
    }
    // unnormalized forward DFT along every gridded axis, then one global
    // normalization by the node count
    let mut a = grid.samples().clone();
    let mut planner = FftPlanner::new();
    for k in 0..m {
        let fft = planner.plan_fft_forward(grid.sizes()[k]);
        for mut lane in a.lanes_mut(Axis(k)) {
            let mut buf: Vec<Complex64> = lane.iter().copied().collect();
            fft.process(&mut buf);
            for (slot, v) in lane.iter_mut().zip(buf) {
                *slot = v;
            }
        }
    }
    let nodes = a.len() as f64;
    let a = a.mapv(|z| z / nodes);
    let shape: Vec<usize> = degrees.iter().map(|&n| 2 * n as usize + 1).collect();
    let mut out = ArrayD::from_elem(IxDyn(&shape), Complex64::new(0.0, 0.0));
    for (idx, slot) in out.indexed_iter_mut() {
        // axes beyond the gridded m are constant: only frequency zero
        let centered = idx.slice();
        if (m..p).any(|k| centered[k] != degrees[k] as usize) {
            continue;
        }
        let mut bins = Vec::with_capacity(m);
        for k in 0..m {
            let n = centered[k] as i64 - i64::from(degrees[k]);
            bins.push(n.rem_euclid(grid.sizes()[k] as i64) as usize);
        }
        *slot = a[IxDyn(&bins)];
    }
    Ok(out)
}

fn grid_coeff_direct(grid: &CylinderGrid, index: &MultiIndex) -> Result<Complex64> {
    let m = grid.ndim();
    if index.max_coord() > m {
        // the function is constant in those coordinates, so the character
        // integrates to zero
        return Ok(Complex64::new(0.0, 0.0));
    }
    for (coord, n) in index.iter() {
        let g = grid.sizes()[coord - 1];
        if 2 * n.unsigned_abs() as usize + 1 > g {
            return Err(Error::Aliasing {
                coord,
                degree: n,
                grid: g,
            });
        }
    }
    let tables: Vec<Vec<Complex64>> = grid
        .sizes()
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let n = index.get(k + 1) as f64;
            (0..g)
                .map(|j| Complex64::from_polar(1.0, -TAU * n * j as f64 / g as f64))
                .collect()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, &v) in grid.samples().indexed_iter() {
        let mut term = v;
        for (k, &j) in idx.slice().iter().enumerate() {
            term *= tables[k][j];
        }
        acc += term;
    }
    Ok(acc / grid.samples().len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::FunctionSpec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn idx(pairs: &[(usize, i64)]) -> MultiIndex {
        MultiIndex::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn poly_table_stores_exact_coefficients() {
        let poly = TrigPoly::from_terms([
            (MultiIndex::zero(), c(0.5, 0.0)),
            (idx(&[(1, 2), (2, -1)]), c(1.0, -3.0)),
            (idx(&[(1, -3)]), c(0.0, 1.0)),
        ]);
        let table = FourierTable::build(&TestFunction::Poly(poly), &[3, 2]).unwrap();
        assert_eq!(table.coeff(&MultiIndex::zero()).unwrap(), c(0.5, 0.0));
        assert_eq!(table.coeff(&idx(&[(1, 2), (2, -1)])).unwrap(), c(1.0, -3.0));
        assert_eq!(table.coeff(&idx(&[(1, -3)])).unwrap(), c(0.0, 1.0));
        assert_eq!(table.coeff(&idx(&[(1, 1)])).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            table.coeff(&idx(&[(1, 4)])),
            Err(Error::CoefficientOutsideBox)
        ));
        assert!(matches!(
            table.coeff(&idx(&[(3, 1)])),
            Err(Error::CoefficientOutsideBox)
        ));
    }

    #[test]
    fn partial_sum_is_coefficient_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let poly = TrigPoly::random(&mut rng, 2, 4, 8);
        let f = TestFunction::Poly(poly.clone());
        let rect = RectIndex::new(vec![2, 1]).unwrap();
        // truncating the series and summing it are the same operation
        let truncated = TrigPoly::from_terms(poly.terms().filter_map(|(n, &c)| {
            let inside = n.max_coord() <= 2 && n.get(1).abs() <= 2 && n.get(2).abs() <= 1;
            inside.then(|| (n.clone(), c))
        }));
        for x in [[0.0, 0.0], [0.37, 0.11], [0.83, 0.64]] {
            let s = partial_sum(&f, &rect, &x).unwrap();
            let direct = truncated.eval(&x).unwrap();
            assert!((s - direct).norm() < 1e-12);
        }
        // a box containing all terms reproduces the polynomial
        let full = RectIndex::cube(2, 4).unwrap();
        for x in [[0.2, 0.9], [0.55, 0.31]] {
            let s = partial_sum(&f, &full, &x).unwrap();
            let direct = poly.eval(&x).unwrap();
            assert!((s - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn fejer_mean_first_character_error_is_reciprocal() {
        // f = theta_(1): the mean damps the single coefficient by
        // 1 - 1/(N+1), so the error at 0 is exactly 1/(N+1) whenever
        // N + 1 is a power of two
        let f = TestFunction::Poly(TrigPoly::character(idx(&[(1, 1)])));
        for n in [1u32, 3, 7, 15, 63] {
            let rect = RectIndex::cube(1, n).unwrap();
            let sigma = fejer_mean_weights(&f, &rect, &[0.0]).unwrap();
            let err = (sigma - c(1.0, 0.0)).norm();
            assert_eq!(err, 1.0 / f64::from(n + 1));
        }
    }

    #[test]
    fn fejer_mean_matches_bruteforce_weighting() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let poly = TrigPoly::random(&mut rng, 2, 3, 6);
        let f = TestFunction::Poly(poly.clone());
        let rect = RectIndex::new(vec![3, 2]).unwrap();
        let x = [0.21, 0.68];
        let mut direct = c(0.0, 0.0);
        for (n, coeff) in poly.terms() {
            if n.max_coord() > 2 || n.get(1).abs() > 3 || n.get(2).abs() > 2 {
                continue;
            }
            let w = (1.0 - n.get(1).unsigned_abs() as f64 / 4.0)
                * (1.0 - n.get(2).unsigned_abs() as f64 / 3.0);
            direct += coeff * w * Complex64::from_polar(1.0, TAU * n.dot(&x).unwrap());
        }
        let sigma = fejer_mean_weights(&f, &rect, &x).unwrap();
        assert!((sigma - direct).norm() < 1e-13);
    }

    #[test]
    fn spike_table_matches_closed_form_coefficients() {
        let spike = SpikeTensor::new([(1, 0.2), (3, 0.4)]).unwrap();
        let f = TestFunction::Spike(spike.clone());
        let table = FourierTable::build(&f, &[2, 1, 2]).unwrap();
        for n1 in -2i64..=2 {
            for n2 in -1i64..=1 {
                for n3 in -2i64..=2 {
                    let n = MultiIndex::from_pairs([(1, n1), (2, n2), (3, n3)]).unwrap();
                    let got = table.coeff(&n).unwrap();
                    let want = spike.fourier_coeff(&n);
                    assert!((got - want).norm() < 1e-15, "{n:?}");
                }
            }
        }
        // p below the spike support integrates the rest out
        let low = FourierTable::build(&f, &[2]).unwrap();
        let n = idx(&[(1, 1)]);
        assert!((low.coeff(&n).unwrap() - spike.fourier_coeff(&n)).norm() < 1e-15);
    }

    #[test]
    fn grid_table_recovers_polynomial_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let poly = TrigPoly::random(&mut rng, 2, 3, 7);
        // sampling on 16 >= 2 * 3 + 1 nodes per axis keeps every frequency
        // of the polynomial alias-free
        let grid = TestFunction::Poly(poly.clone())
            .sample_grid(&[16, 16])
            .unwrap();
        let f = TestFunction::Grid(grid);
        let table = FourierTable::build(&f, &[3, 3]).unwrap();
        for (n, &want) in poly.terms() {
            assert!((table.coeff(n).unwrap() - want).norm() < 1e-12, "{n:?}");
        }
        assert!((fourier_coeff(&f, &idx(&[(1, 2), (2, -3)])).unwrap()
            - poly.coeff(&idx(&[(1, 2), (2, -3)])))
        .norm()
            < 1e-12);
        // frequencies beyond the gridded axes vanish
        assert_eq!(
            fourier_coeff(&f, &idx(&[(3, 1)])).unwrap(),
            c(0.0, 0.0)
        );
        // a degree-8 box would alias on 16 nodes
        assert!(matches!(
            FourierTable::build(&f, &[8, 3]),
            Err(Error::Aliasing { coord: 1, .. })
        ));
    }

    #[test]
    fn conv_route_agrees_with_weight_route_on_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let poly = TrigPoly::random(&mut rng, 2, 3, 6);
        let f = TestFunction::Poly(poly);
        let rect = RectIndex::new(vec![3, 2]).unwrap();
        // exactness needs G > N + deg = 6 per axis
        let samples = f.sample_grid(&[8, 8]).unwrap();
        for x in [[0.0, 0.0], [0.41, 0.77], [0.138, 0.592]] {
            let by_weights = fejer_mean_weights(&f, &rect, &x).unwrap();
            let by_conv = fejer_mean_conv_sampled(&samples, &rect, &x).unwrap();
            assert!(
                (by_weights - by_conv).norm() < 1e-11,
                "{by_weights} vs {by_conv}"
            );
        }
    }

    #[test]
    fn conv_route_preserves_constants() {
        // the kernel tensor has unit mass, so the mean of a constant is
        // that constant under exact quadrature
        let f = TestFunction::Poly(TrigPoly::constant(c(2.5, -1.0)));
        let rect = RectIndex::new(vec![5, 3]).unwrap();
        let v = fejer_mean_conv(&f, &rect, &[0.3, 0.9], &[8, 8]).unwrap();
        assert!((v - c(2.5, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn conv_route_integrates_surplus_axes() {
        // f depends on 2 coordinates, kernels act on the first only: the
        // second axis is averaged, which is the marginal in coordinate 1
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let poly = TrigPoly::random(&mut rng, 2, 2, 5);
        let f = TestFunction::Poly(poly.clone());
        let rect = RectIndex::new(vec![2]).unwrap();
        let x = [0.37, 0.0];
        let conv = fejer_mean_conv(&f, &rect, &x, &[8, 8]).unwrap();
        let marginal = TestFunction::Poly(poly.marginalize(1));
        let weights = fejer_mean_weights(&marginal, &rect, &x).unwrap();
        assert!((conv - weights).norm() < 1e-12);
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let f = TestFunction::Spike(SpikeTensor::new([(1, 0.25), (2, 0.5)]).unwrap());
        let points: Vec<Vec<f64>> = vec![vec![0.05, 0.1], vec![0.6, 0.3], vec![0.2, 0.9]];
        let schedule: Schedule = serde_json::from_str(r#"{"kind":"regular","lambda":2.0}"#).unwrap();
        let a = dimension_sweep(&f, &schedule, 2, 6, &points, 99).unwrap();
        let b = dimension_sweep(&f, &schedule, 2, 6, &points, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().map(|s| s.p).collect::<Vec<_>>().windows(2).all(|w| w[0] <= w[1]));
        assert!(a.first().unwrap().rect.degrees().iter().all(|&d| d == 0));
        assert!(a.iter().all(|s| s.err_median <= s.err_max + 1e-15));
        // degree zero in every axis means plain integration: sigma = 1,
        // so the error against the spike at an interior zero of f is 1
        let first = &a[0];
        assert_eq!(first.p, 1);
        // different seed, different path (with overwhelming probability
        // for this schedule), same determinism
        let c = dimension_sweep(&f, &schedule, 2, 6, &points, 100).unwrap();
        assert_eq!(c, dimension_sweep(&f, &schedule, 2, 6, &points, 100).unwrap());
    }

    #[test]
    fn sweep_validates_inputs() {
        let f = TestFunction::Poly(TrigPoly::constant(c(1.0, 0.0)));
        let schedule: Schedule = serde_json::from_str(r#"{"kind":"cube"}"#).unwrap();
        assert!(dimension_sweep(&f, &schedule, 0, 4, &[vec![0.0]], 1).is_err());
        assert!(dimension_sweep(&f, &schedule, 1, 4, &[], 1).is_err());
        // points shorter than p_max cannot be evaluated
        assert!(dimension_sweep(&f, &schedule, 2, 4, &[vec![0.5]], 1).is_err());
    }

    #[test]
    fn median_and_max_conventions() {
        let mut odd = vec![3.0, 1.0, 2.0];
        assert_eq!(max_and_median(&mut odd), (3.0, 2.0));
        let mut even = vec![4.0, 1.0, 2.0, 3.0];
        assert_eq!(max_and_median(&mut even), (4.0, 2.5));
        let mut single = vec![0.25];
        assert_eq!(max_and_median(&mut single), (0.25, 0.25));
    }

    #[test]
    fn config_loaded_functions_flow_through_the_table() {
        let spec: FunctionSpec = serde_json::from_str(
            r#"{"type":"trigpoly","terms":[
                {"index":{"1":1},"re":1.0,"im":0.0},
                {"index":{"1":-1},"re":1.0,"im":0.0}]}"#,
        )
        .unwrap();
        let f = TestFunction::from_spec(&spec, std::path::Path::new(".")).unwrap();
        // f = 2 cos(2 pi x): Fejér mean at 0 with N = 1 is 2 * (1 - 1/2)
        let rect = RectIndex::cube(1, 1).unwrap();
        let sigma = fejer_mean_weights(&f, &rect, &[0.0]).unwrap();
        assert!((sigma - c(1.0, 0.0)).norm() < 1e-15);
    }
}
