//! Reference homology by plain boundary-matrix reduction.
//!
//! Nothing here uses the gradient, the Morse complex or the persistence
//! module. Betti numbers come from the ranks of the full cellular boundary
//! matrices. Barcodes come from a filtered complex built as a mapping
//! telescope: a cell that merges replicas of the previous level cannot simply
//! "enter" the filtration, so every level's cells that are not carried over
//! unchanged get a cylinder connecting them to their image at the next level.
//! The telescope up to level `i` deformation retracts onto level `i`, so the
//! standard reduction of its boundary matrix gives the persistence of the
//! inclusions.

use std::collections::HashMap;

use crate::chain::BettiTriple;
use crate::complex::{build_complex, CellId, CubicalComplex, NONE};
use crate::error::{Error, Result};
use crate::grid::VoxelBody;
use crate::persistence::{check_nested, Barcode};

/// Largest occupied bounding box accepted, in cubes.
pub const ORACLE_LIMIT: usize = 32 * 32 * 32;

fn guard(body: &VoxelBody) -> Result<()> {
    let [nx, ny, nz] = body.dims();
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                if body.get(i, j, k) {
                    for (a, x) in [i, j, k].into_iter().enumerate() {
                        lo[a] = lo[a].min(x);
                        hi[a] = hi[a].max(x);
                    }
                }
            }
        }
    }
    if lo[0] == usize::MAX {
        return Ok(());
    }
    let cells = (0..3).map(|a| hi[a] - lo[a] + 1).product::<usize>();
    if cells > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            cells,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

fn xor_into(a: &mut Vec<u32>, b: &[u32]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Left-to-right reduction; returns `low[j]` per column (None for zero columns).
fn reduce(columns: &[Vec<u32>]) -> Vec<Option<u32>> {
    let mut owner: HashMap<u32, usize> = HashMap::new();
    let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
    let mut lows = Vec::with_capacity(columns.len());
    for (j, col) in columns.iter().enumerate() {
        let mut c = col.clone();
        while let Some(&low) = c.last() {
            match owner.get(&low) {
                Some(&k) => xor_into(&mut c, &reduced[k]),
                None => break,
            }
        }
        let low = c.last().copied();
        if let Some(l) = low {
            owner.insert(l, j);
        }
        lows.push(low);
        reduced.push(c);
    }
    lows
}

fn rank(columns: &[Vec<u32>]) -> usize {
    reduce(columns).iter().filter(|l| l.is_some()).count()
}

/// Betti numbers of the face-connected cell complex of a body.
pub fn oracle_betti(body: &VoxelBody) -> Result<BettiTriple> {
    guard(body)?;
    let (cx, _) = build_complex(body);
    let n: Vec<usize> = (0..4).map(|d| cx.num_cells(d)).collect();
    let r: Vec<usize> = (0..5)
        .map(|d| {
            if d == 0 || d == 4 {
                0
            } else {
                rank(&cx.boundary_columns(d))
            }
        })
        .collect();
    let b = |q: usize| n[q] - r[q] - r[q + 1];
    Ok(BettiTriple::new(b(0), b(1), b(2)))
}

/// Cells of a filtered complex in filtration order with their boundaries.
#[derive(Clone, Debug, Default)]
pub struct FilteredBoundaryMatrix {
    pub dim: Vec<u8>,
    /// 1-based level at which each cell enters.
    pub level: Vec<usize>,
    /// Boundary of each cell as sorted positions in this order.
    pub columns: Vec<Vec<u32>>,
}

impl FilteredBoundaryMatrix {
    pub fn len(&self) -> usize {
        self.dim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dim.is_empty()
    }

    /// Whether every face precedes its cofaces and has one dimension less.
    pub fn is_well_ordered(&self) -> bool {
        self.columns.iter().enumerate().all(|(j, c)| {
            c.iter().all(|&i| {
                (i as usize) < j && self.dim[i as usize] + 1 == self.dim[j] && self.level[i as usize] <= self.level[j]
            })
        })
    }

    /// Whether the boundary of every boundary vanishes.
    pub fn boundary_squared_is_zero(&self) -> bool {
        self.columns.iter().all(|c| {
            let mut acc: Vec<u32> = Vec::new();
            for &f in c {
                xor_into(&mut acc, &self.columns[f as usize]);
            }
            acc.is_empty()
        })
    }
}

struct TCell {
    dim: u8,
    level: usize,
    boundary: Vec<usize>,
}

/// Mapping telescope of the face-connected complexes of nested bodies.
pub fn telescope(bodies: &[VoxelBody]) -> Result<FilteredBoundaryMatrix> {
    check_nested(bodies)?;
    for b in bodies {
        guard(b)?;
    }
    let complexes: Vec<CubicalComplex> = bodies.iter().map(|b| build_complex(b).0).collect();
    let mut cells: Vec<TCell> = Vec::new();
    // tip[d][c]: telescope cell standing for cell c of the current level
    let mut tip: [Vec<usize>; 4] = Default::default();
    for (li, cx) in complexes.iter().enumerate() {
        let level = li + 1;
        let mut next: [Vec<usize>; 4] = [0, 1, 2, 3].map(|d| vec![usize::MAX; cx.num_cells(d)]);
        let prev = if li == 0 { None } else { Some(&complexes[li - 1]) };
        // images of the previous level and preimage counts
        let mut image: [Vec<CellId>; 4] = Default::default();
        let mut preimages: [Vec<u32>; 4] = [0, 1, 2, 3].map(|d| vec![0; cx.num_cells(d)]);
        let mut unique_pre: [Vec<CellId>; 4] = [0, 1, 2, 3].map(|d| vec![NONE; cx.num_cells(d)]);
        if let Some(p) = prev {
            for d in 0..4 {
                image[d] = (0..p.num_cells(d) as u32)
                    .map(|c| p.image_in(cx, d, c).expect("nested bodies have images"))
                    .collect();
                for (c, &t) in image[d].iter().enumerate() {
                    preimages[d][t as usize] += 1;
                    unique_pre[d][t as usize] = c as u32;
                }
            }
        }
        let mut continuing: [Vec<bool>; 4] = [0, 1, 2, 3].map(|d| vec![false; cx.num_cells(d)]);
        for d in 0..4 {
            for c in 0..cx.num_cells(d) {
                let faces_ok = cx.faces(d, c as u32).iter().all(|&f| continuing[d - 1][f as usize]);
                if prev.is_some() && preimages[d][c] == 1 && faces_ok {
                    continuing[d][c] = true;
                    next[d][c] = tip[d][unique_pre[d][c] as usize];
                } else {
                    let boundary = cx.faces(d, c as u32).iter().map(|&f| next[d - 1][f as usize]).collect();
                    next[d][c] = cells.len();
                    cells.push(TCell {
                        dim: d as u8,
                        level,
                        boundary,
                    });
                }
            }
        }
        if let Some(p) = prev {
            // cylinders over cells that are not carried over, up to dim 2
            let mut cyl: [Vec<usize>; 3] = [0, 1, 2].map(|d| vec![usize::MAX; p.num_cells(d)]);
            for d in 0..3 {
                for c in 0..p.num_cells(d) {
                    let t = image[d][c] as usize;
                    if continuing[d][t] && unique_pre[d][t] == c as u32 {
                        continue;
                    }
                    let mut boundary = vec![tip[d][c], next[d][t]];
                    for &f in p.faces(d, c as u32) {
                        let z = cyl[d - 1][f as usize];
                        if z != usize::MAX {
                            boundary.push(z);
                        }
                    }
                    cyl[d][c] = cells.len();
                    cells.push(TCell {
                        dim: d as u8 + 1,
                        level,
                        boundary,
                    });
                }
            }
        }
        tip = next;
    }

    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (cells[i].level, cells[i].dim, i));
    let mut pos = vec![0u32; cells.len()];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p as u32;
    }
    let mut m = FilteredBoundaryMatrix::default();
    for &i in &order {
        let c = &cells[i];
        let mut col: Vec<u32> = c.boundary.iter().map(|&f| pos[f]).collect();
        col.sort_unstable();
        debug_assert!(col.windows(2).all(|w| w[0] < w[1]));
        m.dim.push(c.dim);
        m.level.push(c.level);
        m.columns.push(col);
    }
    Ok(m)
}

/// Barcode in dimension `q` (0, 1 or 2) of nested bodies by filtered reduction.
pub fn oracle_barcode(bodies: &[VoxelBody], levels: &[f64], q: usize) -> Result<Barcode> {
    if bodies.len() != levels.len() {
        return Err(Error::InvalidParams(format!(
            "{} bodies but {} levels",
            bodies.len(),
            levels.len()
        )));
    }
    let n = bodies.len();
    let m = telescope(bodies)?;
    let lows = reduce(&m.columns);
    let mut paired = vec![false; m.len()];
    let mut triples = Vec::new();
    for (j, low) in lows.iter().enumerate() {
        if let Some(i) = *low {
            let i = i as usize;
            paired[i] = true;
            paired[j] = true;
            if m.dim[i] as usize == q && m.level[i] < m.level[j] {
                triples.push((q as u8, m.level[i], m.level[j]));
            }
        }
    }
    for i in 0..m.len() {
        if !paired[i] && m.dim[i] as usize == q {
            triples.push((q as u8, m.level[i], n + 1));
        }
    }
    Ok(Barcode::from_indices(levels, triples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::euler_cells;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_body(seed: u64, dims: [usize; 3], p: f64) -> VoxelBody {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let occ = (0..dims[0] * dims[1] * dims[2]).map(|_| rng.gen_bool(p)).collect();
        VoxelBody::new(dims, occ).unwrap()
    }

    #[test]
    fn fixtures() {
        assert_eq!(
            oracle_betti(&VoxelBody::full([1, 1, 1]).unwrap()).unwrap(),
            BettiTriple::new(1, 0, 0)
        );
        let pair = VoxelBody::from_cubes([2, 2, 2], &[[0, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(oracle_betti(&pair).unwrap(), BettiTriple::new(2, 0, 0));
        let mut shell = VoxelBody::full([3, 3, 3]).unwrap();
        shell.set(1, 1, 1, false);
        assert_eq!(oracle_betti(&shell).unwrap(), BettiTriple::new(1, 0, 1));
    }

    #[test]
    fn size_guard() {
        let mut b = VoxelBody::empty([40, 30, 30]).unwrap();
        b.set(0, 0, 0, true);
        b.set(39, 29, 29, true);
        assert!(matches!(oracle_betti(&b), Err(Error::TooLarge { .. })));
        let mut small = VoxelBody::empty([40, 30, 30]).unwrap();
        small.set(39, 29, 29, true);
        assert!(oracle_betti(&small).is_ok());
    }

    #[test]
    fn chi_matches_cells() {
        for seed in 0..30 {
            let b = random_body(seed, [6, 6, 6], 0.5);
            let t = oracle_betti(&b).unwrap();
            assert_eq!(t.chi, euler_cells(&build_complex(&b).0));
        }
    }

    fn nested(seed: u64, dims: [usize; 3], n: usize) -> Vec<VoxelBody> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..dims[0] * dims[1] * dims[2]).map(|_| rng.gen()).collect();
        (1..=n)
            .map(|i| {
                let c = 0.2 + 0.6 * i as f64 / n as f64;
                VoxelBody::new(dims, vals.iter().map(|&v| v <= c).collect()).unwrap()
            })
            .collect()
    }

    #[test]
    fn telescope_is_a_filtered_complex() {
        for seed in 0..8 {
            let m = telescope(&nested(seed, [5, 5, 5], 4)).unwrap();
            assert!(m.is_well_ordered());
            assert!(m.boundary_squared_is_zero());
        }
    }

    #[test]
    fn single_level_reproduces_betti() {
        for seed in 0..10 {
            let bodies = nested(seed, [6, 6, 6], 3);
            let levels = [0.1, 0.2, 0.3];
            let t = oracle_betti(&bodies[2]).unwrap();
            for q in 0..3 {
                let bc = oracle_barcode(&bodies[2..], &levels[2..], q).unwrap();
                assert_eq!(bc.len(), t.get(q));
                let bc = oracle_barcode(&bodies, &levels, q).unwrap();
                for (i, b) in bodies.iter().enumerate() {
                    assert_eq!(bc.alive(q as u8, i + 1), oracle_betti(b).unwrap().get(q));
                }
            }
        }
    }

    #[test]
    fn constant_and_merging() {
        let b = VoxelBody::from_cubes([3, 1, 1], &[[0, 0, 0], [2, 0, 0]]).unwrap();
        let bc = oracle_barcode(&[b.clone(), b.clone()], &[1.0, 2.0], 0).unwrap();
        assert_eq!(bc.triples(), vec![(0, 1, 3), (0, 1, 3)]);
        let full = VoxelBody::full([3, 1, 1]).unwrap();
        let bc = oracle_barcode(&[b, full], &[1.0, 2.0], 0).unwrap();
        assert_eq!(bc.triples(), vec![(0, 1, 2), (0, 1, 3)]);
    }

    #[test]
    fn replica_merge_is_followed() {
        // two cubes sharing only an edge become face-connected through a third
        let a = VoxelBody::from_cubes([2, 2, 1], &[[0, 0, 0], [1, 1, 0]]).unwrap();
        let b = VoxelBody::from_cubes([2, 2, 1], &[[0, 0, 0], [1, 1, 0], [1, 0, 0]]).unwrap();
        let bc = oracle_barcode(&[a, b], &[1.0, 2.0], 0).unwrap();
        assert_eq!(bc.triples(), vec![(0, 1, 2), (0, 1, 3)]);
    }

    #[test]
    fn rejects_non_nested() {
        let a = VoxelBody::full([2, 2, 2]).unwrap();
        let b = VoxelBody::empty([2, 2, 2]).unwrap();
        assert!(matches!(
            oracle_barcode(&[a, b], &[1.0, 2.0], 0),
            Err(Error::NotNested(1))
        ));
    }
}
