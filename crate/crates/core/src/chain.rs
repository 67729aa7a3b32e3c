//! Morse chain complexes over GF(2) and their Betti numbers.
//!
//! The chain groups are spanned by the critical cells of a
//! [`DiscreteGradient`]; a monkey saddle contributes two 1-cells. The
//! differential of a critical cell is the critical part of the gradient flow
//! applied to its cellular boundary. In dimension 1 this is the sum of the
//! endpoints of the two descending paths, in dimension 2 the index-1 cells met
//! while the boundary circle of the 2-cell is pushed down the gradient.

use rayon::prelude::*;

use crate::complex::{build_complex_with, Adjacency, CubicalComplex};
use crate::error::{Error, Result};
use crate::gf2::SparseMatrix;
use crate::grid::VoxelBody;
use crate::morse::{DiscreteGradient, VertexOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct BettiTriple {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub chi: i64,
}

impl BettiTriple {
    pub fn new(b0: usize, b1: usize, b2: usize) -> Self {
        BettiTriple {
            b0,
            b1,
            b2,
            chi: b0 as i64 - b1 as i64 + b2 as i64,
        }
    }

    pub fn get(&self, q: usize) -> usize {
        match q {
            0 => self.b0,
            1 => self.b1,
            2 => self.b2,
            _ => 0,
        }
    }
}

impl std::fmt::Display for BettiTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "b0={} b1={} b2={} chi={}", self.b0, self.b1, self.b2, self.chi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexZ2 {
    /// Ranks of the chain groups in dimensions 0, 1, 2.
    pub dims: [usize; 3],
    /// `d1: C1 -> C0`, one column per critical 1-cell.
    pub d1: SparseMatrix,
    /// `d2: C2 -> C1`, one column per critical 2-cell.
    pub d2: SparseMatrix,
}

/// Morse complex of a body from a gradient on its cell complex.
pub fn build_chain(cx: &CubicalComplex, grad: &DiscreteGradient) -> Result<ChainComplexZ2> {
    let n = [0, 1, 2].map(|d| grad.critical_cells(d).len());
    let column = |d: usize| -> Vec<Vec<u32>> {
        grad.critical_cells(d)
            .par_iter()
            .map(|&c| grad.reduce(cx, d - 1, cx.faces(d, c).iter().copied()))
            .collect()
    };
    let d1 = SparseMatrix::new(n[0], column(1));
    let d2 = SparseMatrix::new(n[1], column(2));
    if !d1.mul(&d2).is_zero() {
        return Err(Error::ChainInconsistency(format!(
            "d1*d2 != 0 on a complex with critical counts {n:?}"
        )));
    }
    if let Some((j, c)) = d1.cols.iter().enumerate().find(|(_, c)| c.len() > 2) {
        return Err(Error::ChainInconsistency(format!(
            "column {j} of d1 has {} entries",
            c.len()
        )));
    }
    Ok(ChainComplexZ2 { dims: n, d1, d2 })
}

pub fn betti(cc: &ChainComplexZ2) -> BettiTriple {
    let r1 = cc.d1.rank();
    let r2 = cc.d2.rank();
    BettiTriple::new(cc.dims[0] - r1, cc.dims[1] - r1 - r2, cc.dims[2] - r2)
}

/// Complex, gradient and Morse complex of one body.
#[derive(Clone, Debug)]
pub struct MorseComplex {
    pub complex: CubicalComplex,
    pub gradient: DiscreteGradient,
    pub chain: ChainComplexZ2,
}

impl MorseComplex {
    pub fn new(body: &VoxelBody, adjacency: Adjacency, order: VertexOrder) -> Result<Self> {
        let (complex, _) = build_complex_with(body, adjacency);
        let gradient = DiscreteGradient::new(&complex, order);
        let chain = build_chain(&complex, &gradient)?;
        Ok(MorseComplex {
            complex,
            gradient,
            chain,
        })
    }

    pub fn betti(&self) -> BettiTriple {
        betti(&self.chain)
    }
}

/// Betti numbers of a body with face connectivity.
pub fn body_betti(body: &VoxelBody) -> Result<BettiTriple> {
    Ok(MorseComplex::new(body, Adjacency::Face, VertexOrder::Ascending)?.betti())
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
    fn table_identities() {
        assert_eq!(BettiTriple::new(19085, 72, 0).chi, 19013);
        assert_eq!(BettiTriple::new(26, 38288, 76722).chi, 38460);
    }

    #[test]
    fn empty_and_single_cube() {
        let e = body_betti(&VoxelBody::empty([3, 3, 3]).unwrap()).unwrap();
        assert_eq!(e, BettiTriple::new(0, 0, 0));
        let m = MorseComplex::new(
            &VoxelBody::full([1, 1, 1]).unwrap(),
            Adjacency::Face,
            VertexOrder::Ascending,
        )
        .unwrap();
        assert_eq!(m.chain.dims, [1, 0, 0]);
        assert_eq!(m.betti(), BettiTriple::new(1, 0, 0));
    }

    #[test]
    fn fixtures() {
        let mut shell = VoxelBody::full([3, 3, 3]).unwrap();
        shell.set(1, 1, 1, false);
        assert_eq!(body_betti(&shell).unwrap(), BettiTriple::new(1, 0, 1));
        let mut ring = VoxelBody::full([3, 3, 1]).unwrap();
        ring.set(1, 1, 0, false);
        assert_eq!(body_betti(&ring).unwrap(), BettiTriple::new(1, 1, 0));
        let pair = VoxelBody::from_cubes([2, 2, 2], &[[0, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(body_betti(&pair).unwrap(), BettiTriple::new(2, 0, 0));
    }

    #[test]
    fn chi_matches_cells_and_rank_nullity() {
        for seed in 0..40 {
            let b = random_body(seed, [6, 6, 6], 0.5);
            for (adj, order) in [
                (Adjacency::Face, VertexOrder::Ascending),
                (Adjacency::Edge, VertexOrder::Descending),
            ] {
                let m = MorseComplex::new(&b, adj, order).unwrap();
                assert_eq!(m.betti().chi, euler_cells(&m.complex));
                for d in [&m.chain.d1, &m.chain.d2] {
                    assert_eq!(d.ncols(), d.rank() + d.kernel().len());
                }
            }
        }
    }
}
