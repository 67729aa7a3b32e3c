//! Scalar fields on a box of unit cubes and their excursion sets.
//!
//! Values live on cubes, not on lattice points. Every module linearizes cube
//! `(i, j, k)` as `i + nx * (j + ny * k)` (x fastest).

use std::fmt;

use crate::error::{Error, Result};

#[inline]
pub fn linear_index(dims: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    i + dims[0] * (j + dims[1] * k)
}

fn check_dims(dims: [usize; 3]) -> Result<usize> {
    if dims.contains(&0) {
        return Err(Error::InvalidDims(dims));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(Error::InvalidDims(dims))
}

/// One finite value per elementary cube of an `nx * ny * nz` box.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    dims: [usize; 3],
    values: Vec<f64>,
    /// Free-form provenance (generator, seed, source file).
    pub meta: Option<String>,
}

impl ScalarGrid {
    pub fn new(dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        let expected = check_dims(dims)?;
        if values.len() != expected {
            return Err(Error::DimsMismatch {
                dims,
                expected,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(ScalarGrid {
            dims,
            values,
            meta: None,
        })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let n = check_dims(dims)?;
        let mut values = Vec::with_capacity(n);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::new(dims, values)
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = Some(meta.into());
        self
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[linear_index(self.dims, i, j, k)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(min, max)` of the values.
    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Occupancy of the elementary cubes of a box.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VoxelBody {
    dims: [usize; 3],
    occupancy: Vec<bool>,
}

impl VoxelBody {
    pub fn new(dims: [usize; 3], occupancy: Vec<bool>) -> Result<Self> {
        let expected = check_dims(dims)?;
        if occupancy.len() != expected {
            return Err(Error::DimsMismatch {
                dims,
                expected,
                found: occupancy.len(),
            });
        }
        Ok(VoxelBody { dims, occupancy })
    }

    pub fn empty(dims: [usize; 3]) -> Result<Self> {
        let n = check_dims(dims)?;
        Ok(VoxelBody {
            dims,
            occupancy: vec![false; n],
        })
    }

    pub fn full(dims: [usize; 3]) -> Result<Self> {
        let n = check_dims(dims)?;
        Ok(VoxelBody {
            dims,
            occupancy: vec![true; n],
        })
    }

    /// Body whose occupied cubes are listed explicitly.
    pub fn from_cubes(dims: [usize; 3], cubes: &[[usize; 3]]) -> Result<Self> {
        let mut body = Self::empty(dims)?;
        for c in cubes {
            if c[0] >= dims[0] || c[1] >= dims[1] || c[2] >= dims[2] {
                return Err(Error::InvalidParams(format!("cube {c:?} outside dims {dims:?}")));
            }
            body.set(c[0], c[1], c[2], true);
        }
        Ok(body)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.occupancy[linear_index(self.dims, i, j, k)]
    }

    /// Occupancy with out-of-box coordinates reading as empty.
    pub fn get_signed(&self, i: i64, j: i64, k: i64) -> bool {
        if i < 0 || j < 0 || k < 0 {
            return false;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.dims[0] || j >= self.dims[1] || k >= self.dims[2] {
            return false;
        }
        self.get(i, j, k)
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let idx = linear_index(self.dims, i, j, k);
        self.occupancy[idx] = value;
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// Cube-wise inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &VoxelBody) -> bool {
        self.dims == other.dims && self.occupancy.iter().zip(&other.occupancy).all(|(&a, &b)| !a || b)
    }

    /// Complement inside the box grown by `pad` cubes on every side.
    pub fn padded_complement(&self, pad: usize) -> VoxelBody {
        let [nx, ny, nz] = self.dims;
        let dims = [nx + 2 * pad, ny + 2 * pad, nz + 2 * pad];
        let mut occupancy = vec![true; dims[0] * dims[1] * dims[2]];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if self.get(i, j, k) {
                        occupancy[linear_index(dims, i + pad, j + pad, k + pad)] = false;
                    }
                }
            }
        }
        VoxelBody { dims, occupancy }
    }
}

/// Which side of the threshold is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `{f <= c}`; bodies grow as the level increases.
    Leq,
    /// `{f >= c}`; bodies grow as the level decreases.
    Geq,
}

impl Direction {
    #[inline]
    pub fn contains(self, value: f64, level: f64) -> bool {
        match self {
            Direction::Leq => value <= level,
            Direction::Geq => value >= level,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Leq => "leq",
            Direction::Geq => "geq",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "leq" | "le" | "<=" => Ok(Direction::Leq),
            "geq" | "ge" | ">=" => Ok(Direction::Geq),
            other => Err(Error::InvalidParams(format!("unknown direction {other:?}"))),
        }
    }
}

/// Excursion levels ordered so that the bodies are nested increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSchedule {
    levels: Vec<f64>,
    direction: Direction,
}

impl LevelSchedule {
    /// Strictly increasing levels for `Leq`, strictly decreasing for `Geq`.
    pub fn new(levels: Vec<f64>, direction: Direction) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::NonMonotoneSchedule {
                direction: direction.name(),
                detail: "schedule is empty".into(),
            });
        }
        if let Some(bad) = levels.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonMonotoneSchedule {
                direction: direction.name(),
                detail: format!("level {} is not finite", bad + 1),
            });
        }
        for (i, w) in levels.windows(2).enumerate() {
            let ok = match direction {
                Direction::Leq => w[0] < w[1],
                Direction::Geq => w[0] > w[1],
            };
            if !ok {
                return Err(Error::NonMonotoneSchedule {
                    direction: direction.name(),
                    detail: format!("levels {} and {} are {} then {}", i + 1, i + 2, w[0], w[1]),
                });
            }
        }
        Ok(LevelSchedule { levels, direction })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Affine rescaling of the values onto `[0, 1]`.
pub fn normalize(grid: &ScalarGrid) -> Result<ScalarGrid> {
    let (lo, hi) = grid.range();
    if hi <= lo {
        return Err(Error::DegenerateRange(lo));
    }
    let span = hi - lo;
    let values = grid.values.iter().map(|&v| ((v - lo) / span).clamp(0.0, 1.0)).collect();
    Ok(ScalarGrid {
        dims: grid.dims,
        values,
        meta: grid.meta.clone(),
    })
}

pub fn excursion(grid: &ScalarGrid, level: f64, direction: Direction) -> VoxelBody {
    VoxelBody {
        dims: grid.dims,
        occupancy: grid.values.iter().map(|&v| direction.contains(v, level)).collect(),
    }
}

/// Nested bodies `M_1 ⊂ … ⊂ M_n`, one per scheduled level.
pub fn filtration(grid: &ScalarGrid, schedule: &LevelSchedule) -> Vec<VoxelBody> {
    schedule
        .levels
        .iter()
        .map(|&c| excursion(grid, c, schedule.direction))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(seed: u64, dims: [usize; 3]) -> ScalarGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ScalarGrid::from_fn(dims, |_, _, _| rng.gen_range(-3.0..7.0)).unwrap()
    }

    #[test]
    fn normalize_maps_endpoints() {
        let g = ScalarGrid::new([3, 1, 1], vec![2.0, 4.0, 6.0]).unwrap();
        assert_eq!(normalize(&g).unwrap().values(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_constant_field_fails() {
        let g = ScalarGrid::new([2, 1, 1], vec![5.0, 5.0]).unwrap();
        assert!(matches!(normalize(&g), Err(Error::DegenerateRange(_))));
    }

    #[test]
    fn normalize_keeps_sort_order() {
        let g = random_grid(11, [4, 4, 4]);
        let n = normalize(&g).unwrap();
        let (lo, hi) = n.range();
        assert_eq!((lo, hi), (0.0, 1.0));
        let argsort = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap().then(a.cmp(&b)));
            idx
        };
        assert_eq!(argsort(g.values()), argsort(n.values()));
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(ScalarGrid::new([0, 1, 1], vec![]), Err(Error::InvalidDims(_))));
        assert!(matches!(
            ScalarGrid::new([2, 1, 1], vec![1.0]),
            Err(Error::DimsMismatch { .. })
        ));
        assert!(matches!(
            ScalarGrid::new([2, 1, 1], vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn excursion_extremes() {
        let g = random_grid(3, [3, 2, 2]);
        let (lo, hi) = g.range();
        assert_eq!(excursion(&g, hi, Direction::Leq).count(), g.len());
        assert_eq!(excursion(&g, lo - 1.0, Direction::Leq).count(), 0);
        let g = ScalarGrid::new([2, 1, 1], vec![0.3, 0.7]).unwrap();
        assert_eq!(excursion(&g, 0.5, Direction::Leq).occupancy(), &[true, false]);
    }

    #[test]
    fn excursion_ties_are_inclusive() {
        let g = ScalarGrid::new([2, 1, 1], vec![0.5, 0.7]).unwrap();
        assert_eq!(excursion(&g, 0.5, Direction::Leq).occupancy(), &[true, false]);
        assert_eq!(excursion(&g, 0.7, Direction::Geq).occupancy(), &[false, true]);
    }

    #[test]
    fn filtration_nested_and_full() {
        let g = normalize(&random_grid(5, [4, 3, 2])).unwrap();
        let s = LevelSchedule::new(vec![0.2, 0.5, 1.0], Direction::Leq).unwrap();
        let f = filtration(&g, &s);
        assert_eq!(f.len(), 3);
        assert!(f[0].is_subset_of(&f[1]) && f[1].is_subset_of(&f[2]));
        assert_eq!(f[2].count(), g.len());
    }

    #[test]
    fn filtration_single_level_is_excursion() {
        let g = random_grid(8, [3, 3, 3]);
        let s = LevelSchedule::new(vec![1.5], Direction::Geq).unwrap();
        assert_eq!(filtration(&g, &s), vec![excursion(&g, 1.5, Direction::Geq)]);
    }

    #[test]
    fn filtration_geq_matches_direct_comparison() {
        let g = normalize(&random_grid(21, [4, 4, 4])).unwrap();
        let s = LevelSchedule::new(vec![0.9, 0.5, 0.1], Direction::Geq).unwrap();
        let f = filtration(&g, &s);
        for (body, &c) in f.iter().zip(s.levels()) {
            for (idx, &v) in g.values().iter().enumerate() {
                assert_eq!(body.occupancy()[idx], v >= c);
            }
        }
    }

    #[test]
    fn schedule_rejects_wrong_direction() {
        assert!(LevelSchedule::new(vec![0.5, 0.2], Direction::Leq).is_err());
        assert!(LevelSchedule::new(vec![0.2, 0.5], Direction::Geq).is_err());
        assert!(LevelSchedule::new(vec![0.2, 0.2], Direction::Leq).is_err());
        assert!(LevelSchedule::new(vec![], Direction::Leq).is_err());
    }

    #[test]
    fn padded_complement_layout() {
        let body = VoxelBody::from_cubes([2, 1, 1], &[[0, 0, 0]]).unwrap();
        let c = body.padded_complement(1);
        assert_eq!(c.dims(), [4, 3, 3]);
        assert!(!c.get(1, 1, 1));
        assert!(c.get(2, 1, 1));
        assert_eq!(c.count(), 4 * 3 * 3 - 1);
    }

    proptest! {
        #[test]
        fn excursion_is_monotone(seed in any::<u64>(), a in -3.0f64..7.0, b in -3.0f64..7.0) {
            let g = random_grid(seed, [3, 3, 2]);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(excursion(&g, lo, Direction::Leq).is_subset_of(&excursion(&g, hi, Direction::Leq)));
            prop_assert!(excursion(&g, hi, Direction::Geq).is_subset_of(&excursion(&g, lo, Direction::Geq)));
        }

        #[test]
        fn normalization_preserves_excursions(seed in any::<u64>(), c in -3.0f64..7.0) {
            let g = random_grid(seed, [3, 2, 2]);
            let (lo, hi) = g.range();
            let n = normalize(&g).unwrap();
            let c2 = (c - lo) / (hi - lo);
            // Rounding can move a value across the mapped threshold only when
            // it sits on the threshold itself; skip those draws.
            prop_assume!(g.values().iter().all(|v| (v - c).abs() > 1e-9));
            prop_assert_eq!(excursion(&g, c, Direction::Leq), excursion(&n, c2, Direction::Leq));
        }
    }
}
