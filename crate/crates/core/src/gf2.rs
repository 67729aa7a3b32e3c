//! Linear algebra over GF(2).
//!
//! Two representations: sorted index lists for large, sparse boundary
//! matrices, and bit-packed words for the small dense matrices of induced maps
//! on homology.

use std::collections::HashMap;

/// Sparse GF(2) vector: strictly increasing indices of the nonzero entries.
pub type SparseVec = Vec<u32>;

/// Symmetric difference of two sorted index lists.
pub fn xor_sorted(a: &[u32], b: &[u32]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts an index list and cancels repeated entries in pairs.
pub fn normalize_mod2(mut v: Vec<u32>) -> SparseVec {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

/// Column-major sparse matrix over GF(2).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0] < w[1])));
        debug_assert!(cols.iter().all(|c| c.last().is_none_or(|&r| (r as usize) < nrows)));
        SparseMatrix { nrows, cols }
    }

    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// Image of a sparse vector indexed by columns.
    pub fn apply(&self, v: &[u32]) -> SparseVec {
        let mut acc = Vec::new();
        for &j in v {
            acc.extend_from_slice(&self.cols[j as usize]);
        }
        normalize_mod2(acc)
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch in product");
        SparseMatrix {
            nrows: self.nrows,
            cols: rhs.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    /// Rank by left-to-right column reduction on the lowest nonzero entry.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<u32, SparseVec> = HashMap::new();
        let mut rank = 0;
        for col in &self.cols {
            let mut c = col.clone();
            while let Some(&low) = c.last() {
                match pivots.get(&low) {
                    Some(p) => c = xor_sorted(&c, p),
                    None => break,
                }
            }
            if let Some(&low) = c.last() {
                pivots.insert(low, c);
                rank += 1;
            }
        }
        rank
    }

    /// Basis of the null space, each vector given as a set of column indices.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut pivots: HashMap<u32, (SparseVec, SparseVec)> = HashMap::new();
        let mut kernel = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut c = col.clone();
            let mut combo = vec![j as u32];
            while let Some(&low) = c.last() {
                match pivots.get(&low) {
                    Some((pc, pv)) => {
                        c = xor_sorted(&c, pc);
                        combo = xor_sorted(&combo, pv);
                    }
                    None => break,
                }
            }
            match c.last() {
                Some(&low) => {
                    pivots.insert(low, (c, combo));
                }
                None => kernel.push(combo),
            }
        }
        kernel
    }
}

/// Echelon basis of a subspace, each row carrying a label vector that records
/// its coordinates in a chosen set of generators.
///
/// Used for homology: boundaries are inserted with empty labels, then cycle
/// representatives with unit labels, so reducing a cycle yields its homology
/// class coordinates.
#[derive(Clone, Debug, Default)]
pub struct QuotientBasis {
    rows: HashMap<u32, (SparseVec, SparseVec)>,
    generators: Vec<SparseVec>,
}

impl QuotientBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v`; returns the residual and the accumulated label.
    pub fn reduce(&self, v: &[u32]) -> (SparseVec, SparseVec) {
        let mut c = v.to_vec();
        let mut label = Vec::new();
        while let Some(&low) = c.last() {
            match self.rows.get(&low) {
                Some((rv, rl)) => {
                    c = xor_sorted(&c, rv);
                    label = xor_sorted(&label, rl);
                }
                None => break,
            }
        }
        (c, label)
    }

    /// Adds `v` to the span of the zero-labelled part; returns whether it was new.
    pub fn add_relation(&mut self, v: &[u32]) -> bool {
        let (c, label) = self.reduce(v);
        match c.last() {
            Some(&low) => {
                self.rows.insert(low, (c, label));
                true
            }
            None => false,
        }
    }

    /// Adds `v` as a new generator if it is independent of the current span.
    pub fn add_generator(&mut self, v: &[u32]) -> Option<usize> {
        let (c, mut label) = self.reduce(v);
        let &low = c.last()?;
        let k = self.generators.len() as u32;
        // row = v + (span of earlier rows); label it so that reducing v gives e_k.
        label = xor_sorted(&label, &[k]);
        self.rows.insert(low, (c, label));
        self.generators.push(v.to_vec());
        Some(k as usize)
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Representative chain of generator `k`.
    pub fn generator(&self, k: usize) -> &[u32] {
        &self.generators[k]
    }

    /// Generator coordinates of `v`, or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<SparseVec> {
        let (c, label) = self.reduce(v);
        if c.is_empty() {
            Some(label)
        } else {
            None
        }
    }
}

const WORD: usize = 64;

/// Fixed-length bit-packed GF(2) vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, idx: &[u32]) -> Self {
        let mut v = Self::zeros(len);
        for &i in idx {
            v.toggle(i as usize);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the highest set bit.
    pub fn highest_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + (WORD - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }
}

/// Dense column-major GF(2) matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zero(rows: usize, ncols: usize) -> Self {
        BitMatrix {
            rows,
            cols: vec![BitVec::zeros(rows); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            rows: n,
            cols: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<BitVec>) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows));
        BitMatrix { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &BitVec {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j].get(i)
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ncols());
        let mut out = BitVec::zeros(self.rows);
        for j in v.ones() {
            out.xor_assign(&self.cols[j]);
        }
        out
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols(), rhs.rows);
        BitMatrix {
            rows: self.rows,
            cols: rhs.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, BitVec> = HashMap::new();
        for col in &self.cols {
            let mut c = col.clone();
            while let Some(h) = c.highest_one() {
                match pivots.get(&h) {
                    Some(p) => c.xor_assign(p),
                    None => {
                        pivots.insert(h, c);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_of(m: &SparseMatrix) -> BitMatrix {
        BitMatrix::from_columns(
            m.nrows,
            m.cols.iter().map(|c| BitVec::from_indices(m.nrows, c)).collect(),
        )
    }

    #[test]
    fn xor_and_normalize() {
        assert_eq!(xor_sorted(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(normalize_mod2(vec![5, 1, 5, 2, 5]), vec![1, 2, 5]);
    }

    #[test]
    fn rank_of_cycle_boundary() {
        // boundary of a triangle: edges {01, 12, 02} over vertices 0..3
        let d = SparseMatrix::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(d.rank(), 2);
        let k = d.kernel();
        assert_eq!(k, vec![vec![0, 1, 2]]);
        assert!(d.mul(&SparseMatrix::new(3, k)).is_zero());
    }

    #[test]
    fn quotient_coordinates() {
        let mut q = QuotientBasis::new();
        assert!(q.add_relation(&[0, 1]));
        assert!(!q.add_relation(&[0, 1]));
        assert_eq!(q.add_generator(&[1, 2]), Some(0));
        assert_eq!(q.add_generator(&[0, 2]), None);
        assert_eq!(q.coordinates(&[0, 2]), Some(vec![0]));
        assert_eq!(q.coordinates(&[0, 1]), Some(vec![]));
        assert_eq!(q.coordinates(&[3]), None);
    }

    #[test]
    fn bitvec_ops() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(129, true);
        v.toggle(64);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.highest_one(), Some(129));
        assert_eq!(v.count_ones(), 3);
        assert!(BitVec::zeros(7).highest_one().is_none());
    }

    proptest! {
        #[test]
        fn sparse_and_dense_rank_agree(bits in proptest::collection::vec(any::<u16>(), 1..12)) {
            let cols: Vec<SparseVec> = bits
                .iter()
                .map(|b| (0..13u32).filter(|i| b >> (i % 16) & 1 == 1 && *i < 13).collect())
                .collect();
            let m = SparseMatrix::new(13, cols);
            let dense = dense_of(&m);
            prop_assert_eq!(m.rank(), dense.rank());
            let k = m.kernel();
            prop_assert_eq!(k.len() + m.rank(), m.ncols());
            prop_assert!(m.mul(&SparseMatrix::new(m.ncols(), k)).is_zero());
        }

        #[test]
        fn dense_product_matches_sparse(a in proptest::collection::vec(any::<u8>(), 1..8), b in proptest::collection::vec(any::<u8>(), 1..8)) {
            let ma = SparseMatrix::new(8, a.iter().map(|x| (0..8u32).filter(|i| x >> i & 1 == 1).collect()).collect());
            let mb = SparseMatrix::new(ma.ncols(), b.iter().map(|x| (0..ma.ncols() as u32).filter(|i| x >> i & 1 == 1).collect()).collect());
            prop_assert_eq!(dense_of(&ma.mul(&mb)), dense_of(&ma).mul(&dense_of(&mb)));
        }
    }
}
