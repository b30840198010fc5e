//! Multi-indices over the integer lattice with finite support, the net of
//! summation rectangles, and index-growth schedules.
//!
//! A [`MultiIndex`] is a finitely supported integer vector: it indexes one
//! character of the product torus. A [`RectIndex`] is a point of the
//! rectangular summation net at a fixed active dimension `p`: the per-axis
//! degree caps `(N_1, ..., N_p)`. A [`Schedule`] constrains how a monotone
//! path through that net is allowed to grow.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely supported integer vector; coordinates are 1-based.
///
/// Stored sparsely: only nonzero entries are kept, so equality and ordering
/// are canonical. Addition and integer scaling are componentwise.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiIndex {
    entries: BTreeMap<usize, i64>,
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = BTreeMap::<CoordKey, i64>::deserialize(d)?;
        MultiIndex::from_pairs(entries.into_iter().map(|(k, v)| (k.0, v)))
            .map_err(serde::de::Error::custom)
    }
}

/// Map-key adapter for 1-based coordinates.
///
/// JSON object keys are strings, and serde's internal buffering (used for
/// tagged enums) keeps them that way, so coordinate keys must accept both
/// integer and numeric-string forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct CoordKey(pub usize);

impl<'de> Deserialize<'de> for CoordKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = CoordKey;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a coordinate, as an integer or a numeric string")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<CoordKey, E> {
                usize::try_from(v).map(CoordKey).map_err(E::custom)
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<CoordKey, E> {
                usize::try_from(v).map(CoordKey).map_err(E::custom)
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<CoordKey, E> {
                v.parse::<usize>().map(CoordKey).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl MultiIndex {
    /// The zero vector.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(coordinate, value)` pairs. Zero values are dropped,
    /// duplicate coordinates accumulate. Coordinate 0 is rejected.
    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (coord, value) in pairs {
            if coord == 0 {
                return Err(Error::invalid("multi-index coordinates are 1-based"));
            }
            *entries.entry(coord).or_insert(0) += value;
        }
        entries.retain(|_, v| *v != 0);
        Ok(Self { entries })
    }

    /// Single nonzero entry `value` at `coord`.
    pub fn unit(coord: usize, value: i64) -> Result<Self> {
        Self::from_pairs([(coord, value)])
    }

    /// Entry at `coord` (0 when absent).
    pub fn get(&self, coord: usize) -> i64 {
        self.entries.get(&coord).copied().unwrap_or(0)
    }

    /// Coordinates with nonzero entries, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Nonzero `(coordinate, value)` pairs, ascending by coordinate.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.entries.iter().map(|(&c, &v)| (c, v))
    }

    /// Largest coordinate with a nonzero entry (0 for the zero vector).
    pub fn max_coord(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (&c, &v) in &other.entries {
            *entries.entry(c).or_insert(0) += v;
        }
        entries.retain(|_, v| *v != 0);
        Self { entries }
    }

    /// Componentwise integer scaling.
    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self {
            entries: self.entries.iter().map(|(&c, &v)| (c, v * k)).collect(),
        }
    }

    /// Componentwise negation.
    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Pairing `n·x = Σ n_k x_k` against a point given by its leading
    /// coordinates. Fails when the support reaches past the supplied slice.
    pub fn dot(&self, x: &[f64]) -> Result<f64> {
        let needed = self.max_coord();
        if needed > x.len() {
            return Err(Error::MissingCoordinate {
                needed,
                got: x.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|(&c, &v)| v as f64 * x[c - 1])
            .sum())
    }
}

/// A point of the rectangular summation net: active dimension `p` together
/// with per-axis degrees `(N_1, ..., N_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct RectIndex {
    degrees: Vec<u32>,
}

impl<'de> Deserialize<'de> for RectIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let degrees = Vec::<u32>::deserialize(d)?;
        RectIndex::new(degrees).map_err(serde::de::Error::custom)
    }
}

impl RectIndex {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::invalid("a rectangle index needs at least one axis"));
        }
        Ok(Self { degrees })
    }

    /// Cube index: all `p` degrees equal to `n`.
    pub fn cube(p: usize, n: u32) -> Result<Self> {
        Self::new(vec![n; p])
    }

    /// Active dimension.
    pub fn p(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, axis: usize) -> u32 {
        self.degrees[axis]
    }

    /// Componentwise dominance `N_j(self) >= N_j(other)` for all axes; the
    /// partial order of the net at fixed `p`. Positions with different `p`
    /// are incomparable and yield an error.
    pub fn dominates(&self, other: &Self) -> Result<bool> {
        if self.p() != other.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                got: other.p(),
            });
        }
        Ok(self
            .degrees
            .iter()
            .zip(&other.degrees)
            .all(|(a, b)| a >= b))
    }

    /// Componentwise maximum; dominates both arguments (directedness).
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.p() != other.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                got: other.p(),
            });
        }
        Ok(Self {
            degrees: self
                .degrees
                .iter()
                .zip(&other.degrees)
                .map(|(a, b)| *a.max(b))
                .collect(),
        })
    }
}

/// How the degrees of a rectangle path are allowed to grow.
///
/// `Cube` keeps all degrees equal. `Regular` bounds the spread of the degrees:
/// `max_j (N_j + 1) / min_j (N_j + 1) <= lambda` at every path element.
/// `Pringsheim` puts no constraint at all. `DRegular` splits the axes into
/// blocks and applies the `Regular` ratio bound inside each block only.
///
/// The ratio is measured on `N + 1` so that degree 0 needs no special case,
/// and the bound is closed (`<=`): a cube path (ratio exactly 1) is regular
/// for every `lambda >= 1`, and a singleton block never constrains anything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Schedule {
    Cube,
    Regular {
        lambda: f64,
    },
    Pringsheim,
    DRegular {
        /// Partition of the active axes `{1..p}`, 1-based.
        blocks: Vec<Vec<usize>>,
        lambda: f64,
    },
}

impl Schedule {
    /// Checks the schedule parameters against an active dimension `p`:
    /// `lambda >= 1` and, for `DRegular`, blocks must partition `{1..p}`
    /// once truncated to it (axes beyond `p` are ignored).
    pub fn validate(&self, p: usize) -> Result<()> {
        if p == 0 {
            return Err(Error::invalid("active dimension p must be positive"));
        }
        match self {
            Schedule::Cube | Schedule::Pringsheim => Ok(()),
            Schedule::Regular { lambda } => check_lambda(*lambda),
            Schedule::DRegular { blocks, lambda } => {
                check_lambda(*lambda)?;
                let mut seen = vec![false; p];
                for block in blocks {
                    for &axis in block {
                        if axis == 0 {
                            return Err(Error::invalid("block axes are 1-based"));
                        }
                        if axis <= p {
                            if seen[axis - 1] {
                                return Err(Error::invalid(format!(
                                    "axis {axis} appears in more than one block"
                                )));
                            }
                            seen[axis - 1] = true;
                        }
                    }
                }
                if let Some(missing) = seen.iter().position(|s| !s) {
                    return Err(Error::invalid(format!(
                        "axis {} is not covered by any block",
                        missing + 1
                    )));
                }
                Ok(())
            }
        }
    }

    /// Ratio-constrained axis blocks for dimension `p`, or `None` when the
    /// schedule imposes no ratio constraint at that dimension.
    ///
    /// `Regular` is the one-block case and `Pringsheim` the all-singletons
    /// case of `DRegular`; routing every schedule through the same block
    /// shape keeps those identities exact, including the random draws of
    /// [`enumerate_net`].
    fn blocks_for(&self, p: usize) -> Option<(Vec<Vec<usize>>, f64)> {
        match self {
            Schedule::Cube => None,
            Schedule::Regular { lambda } => Some((vec![(1..=p).collect()], *lambda)),
            Schedule::Pringsheim => Some(((1..=p).map(|a| vec![a]).collect(), f64::INFINITY)),
            Schedule::DRegular { blocks, lambda } => {
                let truncated: Vec<Vec<usize>> = blocks
                    .iter()
                    .map(|b| {
                        let mut b: Vec<usize> =
                            b.iter().copied().filter(|&a| a <= p).collect();
                        b.sort_unstable();
                        b
                    })
                    .filter(|b| !b.is_empty())
                    .collect();
                Some((truncated, *lambda))
            }
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "regularity ratio lambda must be >= 1, got {lambda}"
        )))
    }
}

fn block_ratio_ok(rect: &RectIndex, block: &[usize], lambda: f64) -> bool {
    let mut lo = u32::MAX;
    let mut hi = 0u32;
    for &axis in block {
        let n = rect.degree(axis - 1);
        lo = lo.min(n);
        hi = hi.max(n);
    }
    (hi as f64 + 1.0) <= lambda * (lo as f64 + 1.0)
}

fn rect_admitted(schedule: &Schedule, rect: &RectIndex) -> bool {
    match schedule.blocks_for(rect.p()) {
        None => rect.degrees().iter().all(|&n| n == rect.degree(0)),
        Some((blocks, lambda)) => blocks
            .iter()
            .all(|block| block_ratio_ok(rect, block, lambda)),
    }
}

/// Whether every element of a monotone path conforms to the schedule.
///
/// The path must be nondecreasing under [`RectIndex::dominates`] and all
/// elements must share the same active dimension; violations are errors,
/// not `false`.
pub fn schedule_admits(schedule: &Schedule, path: &[RectIndex]) -> Result<bool> {
    let Some(first) = path.first() else {
        return Ok(true);
    };
    schedule.validate(first.p())?;
    for (step, pair) in path.windows(2).enumerate() {
        if !pair[1].dominates(&pair[0])? {
            return Err(Error::NonMonotonePath { step: step + 1 });
        }
    }
    Ok(path.iter().all(|rect| rect_admitted(schedule, rect)))
}

/// Deterministic monotone path through the rectangle net at dimension `p`,
/// conforming to `schedule`, from the all-zero element up to the first
/// element with every degree `>= n_max` (degrees are capped at `n_max`, so
/// the path ends at the full cube corner).
///
/// Cube paths are canonical (all degrees advance together). The other
/// schedules advance a seeded random nonempty set of axes per step and then
/// lift each block's laggards just enough to restore its ratio bound, so a
/// one-block `DRegular` replays `Regular` and all-singleton blocks replay
/// `Pringsheim` draw for draw.
pub fn enumerate_net(
    schedule: &Schedule,
    p: usize,
    n_max: u32,
    seed: u64,
) -> Result<Vec<RectIndex>> {
    schedule.validate(p)?;
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }

    let Some((blocks, lambda)) = schedule.blocks_for(p) else {
        return (0..=n_max).map(|n| RectIndex::cube(p, n)).collect();
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degrees = vec![0u32; p];
    let mut path = vec![RectIndex::new(degrees.clone())?];

    while degrees.iter().any(|&n| n < n_max) {
        // Random nonempty subset of the axes still below the cap.
        let eligible: Vec<usize> = (0..p).filter(|&j| degrees[j] < n_max).collect();
        let mut grew = false;
        while !grew {
            for &j in &eligible {
                if rng.gen_bool(0.5) {
                    degrees[j] += 1;
                    grew = true;
                }
            }
        }
        // Restore each block's ratio bound by lifting its minimum axes.
        for block in &blocks {
            loop {
                let lo = block.iter().map(|&a| degrees[a - 1]).min().unwrap();
                let hi = block.iter().map(|&a| degrees[a - 1]).max().unwrap();
                if (hi as f64 + 1.0) <= lambda * (lo as f64 + 1.0) {
                    break;
                }
                for &a in block {
                    if degrees[a - 1] == lo {
                        degrees[a - 1] += 1;
                    }
                }
            }
        }
        path.push(RectIndex::new(degrees.clone())?);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(degrees: &[u32]) -> RectIndex {
        RectIndex::new(degrees.to_vec()).unwrap()
    }

    #[test]
    fn multi_index_is_canonical() {
        let a = MultiIndex::from_pairs([(1, 2), (3, -1), (5, 0)]).unwrap();
        assert_eq!(a.get(1), 2);
        assert_eq!(a.get(5), 0);
        assert_eq!(a.support().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(a.max_coord(), 3);

        // cancellation leaves no stored zero
        let b = MultiIndex::from_pairs([(3, 1)]).unwrap();
        let sum = a.add(&b);
        assert_eq!(sum.support().collect::<Vec<_>>(), vec![1]);
        assert!(a.add(&a.neg()).is_zero());
        assert_eq!(a.scale(0), MultiIndex::zero());
    }

    #[test]
    fn multi_index_rejects_coordinate_zero() {
        assert!(MultiIndex::from_pairs([(0, 1)]).is_err());
    }

    #[test]
    fn pairing_needs_all_coordinates() {
        let n = MultiIndex::from_pairs([(1, 1), (3, 2)]).unwrap();
        assert_eq!(n.dot(&[0.5, 0.0, 0.25]).unwrap(), 0.5 + 2.0 * 0.25);
        assert!(matches!(
            n.dot(&[0.5, 0.0]),
            Err(Error::MissingCoordinate { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn dominance_examples() {
        assert!(rect(&[3, 3]).dominates(&rect(&[2, 2])).unwrap());
        assert!(!rect(&[3, 2]).dominates(&rect(&[2, 3])).unwrap());
        assert!(!rect(&[2, 3]).dominates(&rect(&[3, 2])).unwrap());
        assert!(rect(&[2, 2]).dominates(&rect(&[2, 2])).unwrap());
        assert!(rect(&[1, 1]).dominates(&rect(&[1])).is_err());
    }

    #[test]
    fn cube_admits_equal_degrees_only() {
        let path = vec![rect(&[1, 1]), rect(&[2, 2]), rect(&[3, 3])];
        assert!(schedule_admits(&Schedule::Cube, &path).unwrap());
        assert!(!schedule_admits(&Schedule::Cube, &[rect(&[1, 2])]).unwrap());
    }

    // The ratio bound is closed: a cube element (ratio exactly 1) must be
    // admitted at lambda = 1, so ratio == lambda admits. (4,2) gives 5/3 and
    // (5,2) sits exactly on the bound 6/3 = 2; (6,2) exceeds it.
    #[test]
    fn regular_ratio_boundary() {
        let s = Schedule::Regular { lambda: 2.0 };
        assert!(schedule_admits(&s, &[rect(&[4, 2])]).unwrap());
        assert!(schedule_admits(&s, &[rect(&[5, 2])]).unwrap());
        assert!(!schedule_admits(&s, &[rect(&[6, 2])]).unwrap());

        let tight = Schedule::Regular { lambda: 1.0 };
        assert!(schedule_admits(&tight, &[rect(&[3, 3])]).unwrap());
        assert!(!schedule_admits(&tight, &[rect(&[3, 2])]).unwrap());
    }

    #[test]
    fn admits_rejects_bad_paths() {
        let s = Schedule::Pringsheim;
        assert!(matches!(
            schedule_admits(&s, &[rect(&[2, 2]), rect(&[1, 2])]),
            Err(Error::NonMonotonePath { step: 1 })
        ));
        assert!(schedule_admits(&s, &[rect(&[2, 2]), rect(&[1])]).is_err());
        assert!(schedule_admits(&Schedule::Regular { lambda: 0.5 }, &[rect(&[1])]).is_err());
    }

    #[test]
    fn dregular_blocks_must_partition() {
        let s = Schedule::DRegular {
            blocks: vec![vec![1], vec![1, 2]],
            lambda: 2.0,
        };
        assert!(s.validate(2).is_err());
        let s = Schedule::DRegular {
            blocks: vec![vec![1]],
            lambda: 2.0,
        };
        assert!(s.validate(2).is_err());
        let s = Schedule::DRegular {
            blocks: vec![vec![2], vec![1, 3]],
            lambda: 2.0,
        };
        assert!(s.validate(3).is_ok());
    }

    #[test]
    fn cube_path_is_canonical() {
        let path = enumerate_net(&Schedule::Cube, 2, 3, 7).unwrap();
        let want: Vec<RectIndex> = (0..=3).map(|n| rect(&[n, n])).collect();
        assert_eq!(path, want);
    }

    #[test]
    fn pringsheim_single_axis_is_cube() {
        let path = enumerate_net(&Schedule::Pringsheim, 1, 5, 123).unwrap();
        let want = enumerate_net(&Schedule::Cube, 1, 5, 0).unwrap();
        assert_eq!(path, want);
    }

    #[test]
    fn generated_paths_conform() {
        for seed in 0..8 {
            let s = Schedule::Regular { lambda: 2.0 };
            let path = enumerate_net(&s, 3, 6, seed).unwrap();
            assert!(schedule_admits(&s, &path).unwrap());
            assert!(path.last().unwrap().degrees().iter().all(|&n| n == 6));

            let s = Schedule::Pringsheim;
            let path = enumerate_net(&s, 3, 6, seed).unwrap();
            assert!(schedule_admits(&s, &path).unwrap());

            let s = Schedule::DRegular {
                blocks: vec![vec![1, 3], vec![2]],
                lambda: 1.5,
            };
            let path = enumerate_net(&s, 3, 6, seed).unwrap();
            assert!(schedule_admits(&s, &path).unwrap());
        }
    }

    #[test]
    fn one_block_dregular_replays_regular() {
        let one_block = Schedule::DRegular {
            blocks: vec![vec![1, 2, 3]],
            lambda: 2.0,
        };
        let regular = Schedule::Regular { lambda: 2.0 };
        for seed in [0u64, 1, 42] {
            assert_eq!(
                enumerate_net(&one_block, 3, 8, seed).unwrap(),
                enumerate_net(&regular, 3, 8, seed).unwrap()
            );
        }
    }

    #[test]
    fn singleton_dregular_replays_pringsheim() {
        let singletons = Schedule::DRegular {
            blocks: vec![vec![1], vec![2], vec![3]],
            lambda: 1.0,
        };
        for seed in [0u64, 9, 77] {
            assert_eq!(
                enumerate_net(&singletons, 3, 8, seed).unwrap(),
                enumerate_net(&Schedule::Pringsheim, 3, 8, seed).unwrap()
            );
        }
    }

    #[test]
    fn schedule_serialization_shape() {
        let s = Schedule::DRegular {
            blocks: vec![vec![1, 2], vec![3]],
            lambda: 2.0,
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"dregular","blocks":[[1,2],[3]],"lambda":2.0}"#);
        let back: Schedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            serde_json::to_string(&Schedule::Cube).unwrap(),
            r#"{"kind":"cube"}"#
        );
    }
}
