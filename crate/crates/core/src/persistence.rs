//! Persistent homology of a nested sequence of bodies `M_1 ⊆ … ⊆ M_n`.
//!
//! Each level gets its Morse complex. Consecutive levels are connected by
//! chain maps `φ = R ∘ ι ∘ J`: lift a critical cell of `M_i` to its
//! flow-invariant chain, push it into `M_{i+1}` along the inclusion (replicas
//! that merge are summed), and reduce it along the gradient of `M_{i+1}`.
//! Homology of every level is computed with an explicit basis, the chain maps
//! induce matrices between these bases, and the barcode follows by the elder
//! rule. Levels are numbered from 1; death index `n + 1` means the class is
//! alive at the last level.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chain::MorseComplex;
use crate::complex::Adjacency;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, QuotientBasis, SparseMatrix, SparseVec};
use crate::grid::VoxelBody;
use crate::morse::VertexOrder;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub q: u8,
    pub birth: usize,
    /// `None` when the class survives to the last level.
    pub death: Option<usize>,
    pub birth_level: f64,
    pub death_level: Option<f64>,
}

impl Interval {
    /// Death index with the formal convention `n + 1` for open intervals.
    pub fn death_index(&self, n: usize) -> usize {
        self.death.unwrap_or(n + 1)
    }

    pub fn contains(&self, i: usize, n: usize) -> bool {
        self.birth <= i && i < self.death_index(n)
    }
}

/// Multiset of intervals, kept sorted by `(q, birth, death)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode {
    levels: Vec<f64>,
    intervals: Vec<Interval>,
}

impl Barcode {
    /// Builds a barcode from `(q, birth, death)` index triples, where a death
    /// of `levels.len() + 1` means open.
    pub fn from_indices(levels: &[f64], triples: impl IntoIterator<Item = (u8, usize, usize)>) -> Self {
        let n = levels.len();
        let intervals = triples
            .into_iter()
            .map(|(q, b, d)| {
                assert!(1 <= b && b < d && d <= n + 1, "bad interval ({b}, {d}) for {n} levels");
                let open = d == n + 1;
                Interval {
                    q,
                    birth: b,
                    death: (!open).then_some(d),
                    birth_level: levels[b - 1],
                    death_level: (!open).then(|| levels[d - 1]),
                }
            })
            .collect();
        let mut bc = Barcode {
            levels: levels.to_vec(),
            intervals,
        };
        bc.sort();
        bc
    }

    pub fn empty(levels: &[f64]) -> Self {
        Barcode {
            levels: levels.to_vec(),
            intervals: Vec::new(),
        }
    }

    fn sort(&mut self) {
        let n = self.levels.len();
        self.intervals.sort_by_key(|iv| (iv.q, iv.birth, iv.death_index(n)));
    }

    /// Union of two barcodes over the same levels.
    pub fn merged(mut self, other: &Barcode) -> Barcode {
        assert_eq!(self.levels, other.levels);
        self.intervals.extend_from_slice(&other.intervals);
        self.sort();
        self
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Intervals of one dimension.
    pub fn of_dim(&self, q: u8) -> Barcode {
        Barcode {
            levels: self.levels.clone(),
            intervals: self.intervals.iter().copied().filter(|iv| iv.q == q).collect(),
        }
    }

    /// `(q, birth, death)` with the formal death `n + 1` for open intervals.
    pub fn triples(&self) -> Vec<(u8, usize, usize)> {
        let n = self.levels.len();
        self.intervals
            .iter()
            .map(|iv| (iv.q, iv.birth, iv.death_index(n)))
            .collect()
    }

    /// Number of `q`-intervals alive at level `i`.
    pub fn alive(&self, q: u8, i: usize) -> usize {
        let n = self.levels.len();
        self.intervals
            .iter()
            .filter(|iv| iv.q == q && iv.contains(i, n))
            .count()
    }

    /// Number of `q`-intervals with birth ≤ i and death > j.
    pub fn spanning(&self, q: u8, i: usize, j: usize) -> usize {
        let n = self.levels.len();
        self.intervals
            .iter()
            .filter(|iv| iv.q == q && iv.birth <= i && iv.death_index(n) > j)
            .count()
    }

    /// `q,birth_index,death_index,birth_level,death_level`, open deaths as `inf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,birth_index,death_index,birth_level,death_level\n");
        for iv in &self.intervals {
            let (di, dl) = match (iv.death, iv.death_level) {
                (Some(d), Some(l)) => (d.to_string(), l.to_string()),
                _ => ("inf".to_string(), "inf".to_string()),
            };
            let _ = writeln!(s, "{},{},{},{},{}", iv.q, iv.birth, di, iv.birth_level, dl);
        }
        s
    }
}

/// Chain map between the Morse complexes of two nested bodies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub phi0: SparseMatrix,
    pub phi1: SparseMatrix,
    pub phi2: SparseMatrix,
}

impl ChainMap {
    pub fn phi(&self, q: usize) -> &SparseMatrix {
        match q {
            0 => &self.phi0,
            1 => &self.phi1,
            _ => &self.phi2,
        }
    }
}

/// Checks `φ_{q-1} ∘ d_q = d_q ∘ φ_q` for q = 1, 2.
pub fn check_commutation(src: &MorseComplex, dst: &MorseComplex, map: &ChainMap) -> Result<()> {
    if map.phi0.mul(&src.chain.d1) != dst.chain.d1.mul(&map.phi1) {
        return Err(Error::CommutationFailure("phi0 * d1 != d1 * phi1".into()));
    }
    if map.phi1.mul(&src.chain.d2) != dst.chain.d2.mul(&map.phi2) {
        return Err(Error::CommutationFailure("phi1 * d2 != d2 * phi2".into()));
    }
    Ok(())
}

/// Chain map induced by the inclusion of `src`'s body into `dst`'s.
pub fn chain_map(src: &MorseComplex, dst: &MorseComplex) -> Result<ChainMap> {
    let column = |q: usize| -> Result<SparseMatrix> {
        let cols: Result<Vec<SparseVec>> = src
            .gradient
            .critical_cells(q)
            .par_iter()
            .map(|&c| {
                let lifted = src.gradient.stabilize(&src.complex, q, c);
                let mut image = Vec::with_capacity(lifted.len());
                for x in lifted {
                    let y = src
                        .complex
                        .image_in(&dst.complex, q, x)
                        .ok_or_else(|| Error::CommutationFailure(format!("{q}-cell {x} has no image")))?;
                    image.push(y);
                }
                Ok(dst.gradient.reduce(&dst.complex, q, image))
            })
            .collect();
        Ok(SparseMatrix::new(dst.gradient.critical_cells(q).len(), cols?))
    };
    let map = ChainMap {
        phi0: column(0)?,
        phi1: column(1)?,
        phi2: column(2)?,
    };
    check_commutation(src, dst, &map)?;
    Ok(map)
}

/// Morse complexes of a nested sequence of bodies and the chain maps between them.
#[derive(Clone, Debug)]
pub struct MorseFiltration {
    pub levels: Vec<f64>,
    pub complexes: Vec<MorseComplex>,
    pub maps: Vec<ChainMap>,
}

/// Fails unless all bodies share dims and each is contained in the next.
pub fn check_nested(bodies: &[VoxelBody]) -> Result<()> {
    for (i, w) in bodies.windows(2).enumerate() {
        if w[0].dims() != w[1].dims() {
            return Err(Error::DimsDisagree);
        }
        if !w[0].is_subset_of(&w[1]) {
            return Err(Error::NotNested(i + 1));
        }
    }
    Ok(())
}

impl MorseFiltration {
    pub fn new(bodies: &[VoxelBody], levels: &[f64], adjacency: Adjacency, order: VertexOrder) -> Result<Self> {
        if bodies.len() != levels.len() {
            return Err(Error::InvalidParams(format!(
                "{} bodies but {} levels",
                bodies.len(),
                levels.len()
            )));
        }
        check_nested(bodies)?;
        let complexes: Result<Vec<MorseComplex>> = bodies
            .par_iter()
            .map(|b| MorseComplex::new(b, adjacency, order))
            .collect();
        let complexes = complexes?;
        let maps: Result<Vec<ChainMap>> = complexes.par_windows(2).map(|w| chain_map(&w[0], &w[1])).collect();
        Ok(MorseFiltration {
            levels: levels.to_vec(),
            complexes,
            maps: maps?,
        })
    }
}

/// Homology of one level in one dimension with a chosen basis.
#[derive(Clone, Debug)]
struct LevelHomology {
    basis: QuotientBasis,
}

impl LevelHomology {
    fn new(m: &MorseComplex, q: usize) -> Self {
        let mut basis = QuotientBasis::new();
        let cycles: Vec<SparseVec> = match q {
            0 => (0..m.chain.dims[0] as u32).map(|i| vec![i]).collect(),
            1 => m.chain.d1.kernel(),
            _ => m.chain.d2.kernel(),
        };
        if q < 2 {
            let bd = if q == 0 { &m.chain.d1 } else { &m.chain.d2 };
            for c in &bd.cols {
                basis.add_relation(c);
            }
        }
        for z in &cycles {
            basis.add_generator(z);
        }
        LevelHomology { basis }
    }

    fn rank(&self) -> usize {
        self.basis.num_generators()
    }
}

/// Homology spaces of every level with the maps induced between consecutive ones.
#[derive(Clone, Debug)]
pub struct PersistenceModule {
    levels: Vec<f64>,
    ranks: [Vec<usize>; 3],
    /// `maps[q][i]`: H_q of level i+1 to level i+2 (0-based storage).
    maps: [Vec<BitMatrix>; 3],
}

impl PersistenceModule {
    pub fn new(filt: &MorseFiltration) -> Result<Self> {
        let per_q: Result<Vec<(Vec<usize>, Vec<BitMatrix>)>> = (0..3)
            .into_par_iter()
            .map(|q| {
                let homs: Vec<LevelHomology> = filt.complexes.iter().map(|m| LevelHomology::new(m, q)).collect();
                let ranks = homs.iter().map(|h| h.rank()).collect();
                let mut maps = Vec::new();
                for (i, map) in filt.maps.iter().enumerate() {
                    let (src, dst) = (&homs[i], &homs[i + 1]);
                    let mut cols = Vec::with_capacity(src.rank());
                    for k in 0..src.rank() {
                        let image = map.phi(q).apply(src.basis.generator(k));
                        let coords = dst.basis.coordinates(&image).ok_or_else(|| {
                            Error::CommutationFailure(format!(
                                "image of an H{q} cycle at level {} is not a cycle",
                                i + 1
                            ))
                        })?;
                        cols.push(BitVec::from_indices(dst.rank(), &coords));
                    }
                    maps.push(BitMatrix::from_columns(dst.rank(), cols));
                }
                Ok((ranks, maps))
            })
            .collect();
        let mut per_q = per_q?;
        let (r2, m2) = per_q.pop().unwrap();
        let (r1, m1) = per_q.pop().unwrap();
        let (r0, m0) = per_q.pop().unwrap();
        Ok(PersistenceModule {
            levels: filt.levels.clone(),
            ranks: [r0, r1, r2],
            maps: [m0, m1, m2],
        })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `b_q` of level `i` (1-based).
    pub fn betti(&self, q: usize, i: usize) -> usize {
        self.ranks[q][i - 1]
    }

    /// Induced map from level `i` to level `i + 1`.
    pub fn induced(&self, q: usize, i: usize) -> &BitMatrix {
        &self.maps[q][i - 1]
    }

    /// Rank of the map H_q(M_i) → H_q(M_j) for 0 ≤ i ≤ j ≤ n + 1.
    pub fn persistent_betti(&self, q: usize, i: usize, j: usize) -> Result<usize> {
        let n = self.num_levels();
        if q > 2 || i > j || j > n + 1 {
            return Err(Error::IndexOutOfRange(format!("b_{q}^({i},{j}) with {n} levels")));
        }
        if i == 0 || j == n + 1 {
            return Ok(0);
        }
        let mut m = BitMatrix::identity(self.betti(q, i));
        for k in i..j {
            m = self.induced(q, k).mul(&m);
        }
        Ok(m.rank())
    }

    /// Interval decomposition in dimension `q`.
    pub fn barcode(&self, q: usize) -> Barcode {
        let n = self.num_levels();
        let mut triples = Vec::new();
        if n == 0 {
            return Barcode::empty(&self.levels);
        }
        // alive classes: (birth, coordinates at the current level), oldest first
        let mut alive: Vec<(usize, BitVec)> = (0..self.betti(q, 1))
            .map(|k| (1, BitVec::unit(self.betti(q, 1), k)))
            .collect();
        for i in 1..n {
            let f = self.induced(q, i);
            let dim = self.betti(q, i + 1);
            let mut echelon: Vec<(usize, BitVec)> = Vec::new();
            let mut next = Vec::new();
            for (birth, v) in alive {
                let img = f.apply(&v);
                let mut r = img.clone();
                reduce_against(&mut r, &echelon);
                match r.highest_one() {
                    None => triples.push((q as u8, birth, i + 1)),
                    Some(h) => {
                        echelon.push((h, r));
                        next.push((birth, img));
                    }
                }
            }
            for k in 0..dim {
                let mut r = BitVec::unit(dim, k);
                reduce_against(&mut r, &echelon);
                if let Some(h) = r.highest_one() {
                    echelon.push((h, r));
                    next.push((i + 1, BitVec::unit(dim, k)));
                }
            }
            alive = next;
        }
        triples.extend(alive.into_iter().map(|(b, _)| (q as u8, b, n + 1)));
        Barcode::from_indices(&self.levels, triples)
    }

    /// Barcodes of dimensions 0, 1 and 2 together.
    pub fn full_barcode(&self) -> Barcode {
        self.barcode(0).merged(&self.barcode(1)).merged(&self.barcode(2))
    }
}

fn reduce_against(r: &mut BitVec, echelon: &[(usize, BitVec)]) {
    loop {
        let Some(h) = r.highest_one() else { return };
        match echelon.iter().find(|(p, _)| *p == h) {
            Some((_, row)) => r.xor_assign(row),
            None => return,
        }
    }
}

/// Barcode in dimension `q` of a nested sequence of bodies with face connectivity.
pub fn morse_barcode(bodies: &[VoxelBody], levels: &[f64], q: usize) -> Result<Barcode> {
    if q == 2 {
        return dual_h2(bodies, levels);
    }
    let filt = MorseFiltration::new(bodies, levels, Adjacency::Face, VertexOrder::Ascending)?;
    Ok(PersistenceModule::new(&filt)?.barcode(q))
}

/// The 2-barcode from 0-persistence of the complements.
///
/// Each body is complemented inside its box padded by one layer, with
/// 18-connectivity and the reversed vertex order. The complements shrink as
/// the bodies grow, so they are read in reverse; after dropping the outer
/// component, which lives through every level, a complement interval `[a, b)`
/// corresponds to the void interval `[n + 2 - b, n + 2 - a)`.
pub fn dual_h2(bodies: &[VoxelBody], levels: &[f64]) -> Result<Barcode> {
    let n = bodies.len();
    check_nested(bodies)?;
    if n == 0 {
        return Ok(Barcode::empty(levels));
    }
    let comps: Vec<VoxelBody> = bodies.iter().rev().map(|b| b.padded_complement(1)).collect();
    let idx: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let filt = MorseFiltration::new(&comps, &idx, Adjacency::Edge, VertexOrder::Descending)?;
    let bc0 = PersistenceModule::new(&filt)?.barcode(0);
    let mut triples = Vec::new();
    let mut outer_dropped = false;
    for (_, a, b) in bc0.triples() {
        if !outer_dropped && a == 1 && b == n + 1 {
            outer_dropped = true;
            continue;
        }
        triples.push((2u8, n + 2 - b, n + 2 - a));
    }
    Ok(Barcode::from_indices(levels, triples))
}
