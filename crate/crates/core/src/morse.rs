//! Discrete Morse theory for the diagonal function `x + y + z`.
//!
//! Vertices are totally ordered by `(x + y + z, x, y, z, replica)`. Every cell
//! belongs to the lower star of its highest vertex. A vertex is critical when
//! the lower link (the part of its neighbourhood strictly below it) is not
//! contractible: it has index 0 when the lower link is empty, `components - 1`
//! index-1 points and `rank H1` index-2 points. These are the ranks of the
//! homology of the lower star relative to its boundary, which is what
//! [`classify`] computes.
//!
//! [`DiscreteGradient`] realizes the classification as an acyclic matching
//! inside each lower star, so that the critical cells of the matching are the
//! basis of the Morse chain complex. The vertex paired with a vertex is always
//! its lowest neighbour, so descending paths are steepest-descent paths.

use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::complex::{CellId, CubicalComplex, NONE};
use crate::error::{Error, Result};

/// Direction of the vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum VertexOrder {
    /// Increasing `(x + y + z, x, y, z, replica)`.
    #[default]
    Ascending,
    /// The reverse order, i.e. the order of `-(x + y + z)`.
    Descending,
}

impl VertexOrder {
    /// Ascending key of a vertex.
    pub fn key(cx: &CubicalComplex, v: CellId) -> (u32, u32, u32, u32, u8) {
        let c = cx.cell(0, v);
        let [x, y, z] = c.anchor;
        (x + y + z, x, y, z, c.replica)
    }

    /// Rank of every vertex; higher rank means higher in the order.
    pub fn ranks(self, cx: &CubicalComplex) -> Vec<u32> {
        let n = cx.num_cells(0);
        let mut ids: Vec<u32> = (0..n as u32).collect();
        ids.par_sort_unstable_by_key(|&v| Self::key(cx, v));
        let mut rank = vec![0u32; n];
        for (r, &v) in ids.iter().enumerate() {
            rank[v as usize] = match self {
                VertexOrder::Ascending => r as u32,
                VertexOrder::Descending => (n - 1 - r) as u32,
            };
        }
        rank
    }

    /// Highest vertex of a cell.
    pub fn peak(self, cx: &CubicalComplex, dim: usize, id: CellId) -> CellId {
        let c = cx.cell(dim, id);
        let corner = match self {
            VertexOrder::Ascending => c.top_corner(),
            VertexOrder::Descending => c.anchor,
        };
        cx.corner_vertex(dim, id, corner)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPoint {
    pub vertex: CellId,
    pub position: [u32; 3],
    pub index: u8,
    /// 2 for a monkey saddle, 1 otherwise.
    pub multiplicity: u8,
    /// Critical cells of dimension `index` in the lower star of `vertex`.
    pub cells: Vec<CellId>,
    /// For a monkey saddle: the second 1-cell, which plays the role of the
    /// edge to a fictive vertex just above `vertex`.
    pub fictive: Option<CellId>,
}

/// A lower star whose configuration falls outside the expected cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anomaly {
    pub vertex: CellId,
    pub position: [u32; 3],
    /// Relative homology ranks of the lower star in dimensions 0 to 3.
    pub relative_betti: [u8; 4],
    /// Critical cells of the matching per dimension.
    pub critical: [u8; 4],
}

/// Acyclic matching on the cells of a complex.
#[derive(Clone, Debug)]
pub struct DiscreteGradient {
    order: VertexOrder,
    rank: Vec<u32>,
    peak: [Vec<CellId>; 4],
    /// Coface partner (V of the cell), or NONE.
    up: [Vec<CellId>; 4],
    /// Face partner, or NONE.
    down: [Vec<CellId>; 4],
    /// Linear extension of the gradient paths: `(peak rank << 8) | seq`.
    key: [Vec<u64>; 4],
    critical: [Vec<CellId>; 4],
    critical_index: [Vec<u32>; 4],
    points: Vec<CriticalPoint>,
    anomalies: Vec<Anomaly>,
}

/// Critical points of the ascending order, in vertex order.
pub fn classify(cx: &CubicalComplex) -> Vec<CriticalPoint> {
    DiscreteGradient::new(cx, VertexOrder::Ascending).points
}

/// `x,y,z,index,multiplicity` lines with a header.
pub fn critical_points_csv(points: &[CriticalPoint]) -> String {
    let mut s = String::from("x,y,z,index,multiplicity\n");
    for p in points {
        let [x, y, z] = p.position;
        let _ = writeln!(s, "{x},{y},{z},{},{}", p.index, p.multiplicity);
    }
    s
}

/// Alternating count of critical points, monkey saddles counted twice.
pub fn morse_euler(points: &[CriticalPoint]) -> i64 {
    points
        .iter()
        .map(|p| {
            let m = p.multiplicity as i64;
            if p.index % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .sum()
}

struct Star {
    cells: Vec<(u8, CellId)>,
    faces: Vec<Vec<usize>>,
    cofaces: Vec<Vec<usize>>,
    gkey: Vec<Vec<u32>>,
}

#[derive(Default)]
struct StarResult {
    /// (dim of lower cell, lower id, upper id)
    pairs: Vec<(u8, CellId, CellId)>,
    critical: Vec<(u8, CellId)>,
    seq: Vec<(u8, CellId, u8)>,
    relative: [u8; 4],
    crit_count: [u8; 4],
}

fn gf2_rank(rows: &mut [u16]) -> usize {
    let mut rank = 0;
    for col in 0..16 {
        let bit = 1u16 << col;
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row & bit != 0 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

impl Star {
    fn relative_betti(&self) -> [u8; 4] {
        let mut n = [0usize; 4];
        for &(d, _) in &self.cells {
            n[d as usize] += 1;
        }
        let mut r = [0usize; 5];
        for d in 1..4 {
            let mut rows: Vec<u16> = (0..self.cells.len())
                .filter(|&i| self.cells[i].0 as usize == d)
                .map(|i| self.faces[i].iter().fold(0u16, |m, &f| m | 1 << f))
                .collect();
            r[d] = gf2_rank(&mut rows);
        }
        [0, 1, 2, 3].map(|d| (n[d] - r[d] - r[d + 1]) as u8)
    }

    fn gcmp(&self, a: usize, b: usize) -> std::cmp::Ordering {
        (&self.gkey[a], self.cells[a]).cmp(&(&self.gkey[b], self.cells[b]))
    }

    /// Process-lower-stars matching; `partner[i]` is the local partner or None.
    fn greedy(&self) -> Vec<Option<usize>> {
        let m = self.cells.len();
        let mut partner = vec![None; m];
        let mut done = vec![false; m];
        if m == 1 {
            done[0] = true;
            return partner;
        }
        let unclassified = |done: &[bool], i: usize| self.faces[i].iter().filter(|&&f| !done[f]).count();
        let pop_min = |q: &mut Vec<usize>, done: &[bool]| -> Option<usize> {
            q.retain(|&i| !done[i]);
            let (pos, _) = q.iter().enumerate().min_by(|a, b| self.gcmp(*a.1, *b.1))?;
            Some(q.swap_remove(pos))
        };
        let edges: Vec<usize> = (0..m).filter(|&i| self.cells[i].0 == 1).collect();
        let delta = *edges
            .iter()
            .min_by(|&&a, &&b| self.gcmp(a, b))
            .expect("nontrivial lower star has an edge");
        partner[0] = Some(delta);
        partner[delta] = Some(0);
        done[0] = true;
        done[delta] = true;
        let mut pq_zero: Vec<usize> = edges.iter().copied().filter(|&e| e != delta).collect();
        let mut pq_one: Vec<usize> = self.cofaces[delta]
            .iter()
            .copied()
            .filter(|&c| unclassified(&done, c) == 1)
            .collect();
        loop {
            while let Some(alpha) = pop_min(&mut pq_one, &done) {
                let free: Vec<usize> = self.faces[alpha].iter().copied().filter(|&f| !done[f]).collect();
                if free.is_empty() {
                    pq_zero.push(alpha);
                    continue;
                }
                let pi = free[0];
                partner[alpha] = Some(pi);
                partner[pi] = Some(alpha);
                done[alpha] = true;
                done[pi] = true;
                for &beta in self.cofaces[alpha].iter().chain(&self.cofaces[pi]) {
                    if !done[beta] && unclassified(&done, beta) == 1 && !pq_one.contains(&beta) {
                        pq_one.push(beta);
                    }
                }
            }
            match pop_min(&mut pq_zero, &done) {
                Some(gamma) => {
                    done[gamma] = true;
                    for &beta in &self.cofaces[gamma] {
                        if !done[beta] && unclassified(&done, beta) == 1 && !pq_one.contains(&beta) {
                            pq_one.push(beta);
                        }
                    }
                }
                None => break,
            }
        }
        partner
    }

    /// Cells in an order where every gradient path strictly decreases, or
    /// None if the matching has a cycle.
    fn linear_extension(&self, partner: &[Option<usize>]) -> Option<Vec<usize>> {
        // Modified Hasse diagram: c -> f for unmatched face pairs, f -> c for
        // matched ones. Paths must run from high to low position.
        let m = self.cells.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut indeg = vec![0usize; m];
        for c in 0..m {
            for &f in &self.faces[c] {
                let (a, b) = if partner[f] == Some(c) { (f, c) } else { (c, f) };
                succ[a].push(b);
                indeg[b] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..m).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(m);
        while let Some(x) = ready.pop() {
            topo.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.push(y);
                }
            }
        }
        if topo.len() < m {
            return None;
        }
        let mut pos = vec![0usize; m];
        for (i, &x) in topo.iter().enumerate() {
            pos[x] = m - 1 - i;
        }
        Some(pos)
    }

    /// Acyclic matching with the fewest critical cells, by exhaustive search.
    fn exhaustive(&self) -> Vec<Option<usize>> {
        let m = self.cells.len();
        let mut best: (usize, Vec<Option<usize>>) = (m + 1, vec![None; m]);
        let mut cur = vec![None; m];
        fn rec(
            star: &Star,
            i: usize,
            unmatched: usize,
            cur: &mut Vec<Option<usize>>,
            best: &mut (usize, Vec<Option<usize>>),
        ) {
            let m = star.cells.len();
            if i == m {
                if unmatched < best.0 && star.linear_extension(cur).is_some() {
                    *best = (unmatched, cur.clone());
                }
                return;
            }
            if cur[i].is_some() {
                rec(star, i + 1, unmatched, cur, best);
                return;
            }
            for &c in &star.cofaces[i] {
                if cur[c].is_none() {
                    cur[i] = Some(c);
                    cur[c] = Some(i);
                    rec(star, i + 1, unmatched, cur, best);
                    cur[i] = None;
                    cur[c] = None;
                }
            }
            if unmatched + 1 < best.0 {
                rec(star, i + 1, unmatched + 1, cur, best);
            }
        }
        rec(self, 0, 0, &mut cur, &mut best);
        best.1
    }
}

impl DiscreteGradient {
    pub fn new(cx: &CubicalComplex, order: VertexOrder) -> Self {
        let rank = order.ranks(cx);
        let nv = cx.num_cells(0);
        let peak: [Vec<CellId>; 4] = [0, 1, 2, 3].map(|d| {
            (0..cx.num_cells(d) as u32)
                .into_par_iter()
                .map(|id| order.peak(cx, d, id))
                .collect()
        });
        // CSR of lower stars over (dim, id), grouped by peak vertex.
        let mut start = vec![0u32; nv + 1];
        for p in peak.iter().flatten() {
            start[*p as usize + 1] += 1;
        }
        for i in 0..nv {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut members = vec![(0u8, 0u32); start[nv] as usize];
        for (d, pk) in peak.iter().enumerate() {
            for (id, &p) in pk.iter().enumerate() {
                members[fill[p as usize] as usize] = (d as u8, id as u32);
                fill[p as usize] += 1;
            }
        }

        let results: Vec<StarResult> = (0..nv as u32)
            .into_par_iter()
            .map(|v| {
                let s = start[v as usize] as usize;
                let e = start[v as usize + 1] as usize;
                process_star(cx, &rank, &peak, v, &members[s..e])
            })
            .collect();

        let mut up: [Vec<CellId>; 4] = [0, 1, 2, 3].map(|d| vec![NONE; cx.num_cells(d)]);
        let mut down: [Vec<CellId>; 4] = [0, 1, 2, 3].map(|d| vec![NONE; cx.num_cells(d)]);
        let mut key: [Vec<u64>; 4] = [0, 1, 2, 3].map(|d| vec![0u64; cx.num_cells(d)]);
        let mut critical: [Vec<CellId>; 4] = Default::default();
        let mut critical_index: [Vec<u32>; 4] = [0, 1, 2, 3].map(|d| vec![NONE; cx.num_cells(d)]);
        let mut points = Vec::new();
        let mut anomalies = Vec::new();

        let mut by_rank: Vec<u32> = (0..nv as u32).collect();
        by_rank.sort_unstable_by_key(|&v| rank[v as usize]);
        for &v in &by_rank {
            let r = &results[v as usize];
            for &(d, lo, hi) in &r.pairs {
                up[d as usize][lo as usize] = hi;
                down[d as usize + 1][hi as usize] = lo;
            }
            for &(d, id, s) in &r.seq {
                key[d as usize][id as usize] = (rank[v as usize] as u64) << 8 | s as u64;
            }
            let mut crit = r.critical.clone();
            crit.sort_unstable_by_key(|&(d, id)| key[d as usize][id as usize]);
            for &(d, id) in &crit {
                critical_index[d as usize][id as usize] = critical[d as usize].len() as u32;
                critical[d as usize].push(id);
            }
            let position = cx.cell(0, v).anchor;
            let rel = r.relative;
            if rel != r.crit_count || rel[1] > 2 || rel[2] > 1 || rel[3] > 0 {
                anomalies.push(Anomaly {
                    vertex: v,
                    position,
                    relative_betti: rel,
                    critical: r.crit_count,
                });
            }
            for index in 0..4u8 {
                let mut cells: Vec<CellId> = crit.iter().filter(|&&(d, _)| d == index).map(|&(_, id)| id).collect();
                let mut remaining = rel[index as usize] as usize;
                while remaining > 0 {
                    let multiplicity = if index == 1 && remaining >= 2 { 2 } else { 1 };
                    let take = cells.len().min(multiplicity);
                    let these: Vec<CellId> = cells.drain(..take).collect();
                    points.push(CriticalPoint {
                        vertex: v,
                        position,
                        index,
                        multiplicity: multiplicity as u8,
                        fictive: if multiplicity == 2 { these.get(1).copied() } else { None },
                        cells: these,
                    });
                    remaining -= multiplicity;
                }
            }
        }

        DiscreteGradient {
            order,
            rank,
            peak,
            up,
            down,
            key,
            critical,
            critical_index,
            points,
            anomalies,
        }
    }

    pub fn order(&self) -> VertexOrder {
        self.order
    }

    pub fn rank(&self, v: CellId) -> u32 {
        self.rank[v as usize]
    }

    pub fn peak(&self, dim: usize, id: CellId) -> CellId {
        self.peak[dim][id as usize]
    }

    /// Coface paired with the cell, if any.
    pub fn up(&self, dim: usize, id: CellId) -> Option<CellId> {
        let p = self.up[dim][id as usize];
        (p != NONE).then_some(p)
    }

    /// Face paired with the cell, if any.
    pub fn down(&self, dim: usize, id: CellId) -> Option<CellId> {
        let p = self.down[dim][id as usize];
        (p != NONE).then_some(p)
    }

    pub fn is_critical(&self, dim: usize, id: CellId) -> bool {
        self.critical_index[dim][id as usize] != NONE
    }

    /// Critical cells of a dimension, in gradient order.
    pub fn critical_cells(&self, dim: usize) -> &[CellId] {
        &self.critical[dim]
    }

    pub fn critical_index(&self, dim: usize, id: CellId) -> Option<usize> {
        let i = self.critical_index[dim][id as usize];
        (i != NONE).then_some(i as usize)
    }

    pub fn critical_counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|d| self.critical[d].len())
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.points
    }

    pub fn anomalies(&self) -> &[Anomaly] {
        &self.anomalies
    }

    pub fn flow_key(&self, dim: usize, id: CellId) -> u64 {
        self.key[dim][id as usize]
    }

    /// Critical part of the stabilized flow of a chain of `dim`-cells, as
    /// sorted indices into [`critical_cells`](Self::critical_cells).
    pub fn reduce(&self, cx: &CubicalComplex, dim: usize, chain: impl IntoIterator<Item = CellId>) -> Vec<u32> {
        let mut live = HashSet::new();
        let mut heap = BinaryHeap::new();
        let toggle = |c: CellId, live: &mut HashSet<CellId>, heap: &mut BinaryHeap<(u64, CellId)>| {
            if !live.remove(&c) {
                live.insert(c);
                heap.push((self.key[dim][c as usize], c));
            }
        };
        for c in chain {
            toggle(c, &mut live, &mut heap);
        }
        let mut out = Vec::new();
        while let Some((k, c)) = heap.pop() {
            if !live.remove(&c) {
                continue;
            }
            let ci = self.critical_index[dim][c as usize];
            if ci != NONE {
                out.push(ci);
            } else if let Some(rho) = self.up(dim, c) {
                for &f in cx.faces(dim + 1, rho) {
                    if f != c {
                        debug_assert!(self.key[dim][f as usize] < k);
                        toggle(f, &mut live, &mut heap);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The flow-invariant chain whose only critical cell is `cell`.
    pub fn stabilize(&self, cx: &CubicalComplex, dim: usize, cell: CellId) -> Vec<CellId> {
        let mut chain = vec![cell];
        if dim == 0 {
            return chain;
        }
        let fd = dim - 1;
        let mut live = HashSet::new();
        let mut heap = BinaryHeap::new();
        let toggle = |c: CellId, live: &mut HashSet<CellId>, heap: &mut BinaryHeap<(u64, CellId)>| {
            if !live.remove(&c) {
                live.insert(c);
                heap.push((self.key[fd][c as usize], c));
            }
        };
        for &f in cx.faces(dim, cell) {
            toggle(f, &mut live, &mut heap);
        }
        while let Some((_, s)) = heap.pop() {
            if !live.remove(&s) {
                continue;
            }
            if let Some(rho) = self.up(fd, s) {
                chain.push(rho);
                for &f in cx.faces(dim, rho) {
                    if f != s {
                        toggle(f, &mut live, &mut heap);
                    }
                }
            }
        }
        chain.sort_unstable();
        chain
    }

    /// Vertex reached by following the gradient down from `v`.
    pub fn sink(&self, cx: &CubicalComplex, mut v: CellId) -> CellId {
        while let Some(e) = self.up(0, v) {
            let [a, b] = cx.edge_vertices(e);
            v = if a == v { b } else { a };
        }
        v
    }

    fn descend_from(&self, cx: &CubicalComplex, top: CellId, first: CellId) -> Vec<CellId> {
        let mut path = vec![top, first];
        let mut v = first;
        while let Some(e) = self.up(0, v) {
            let [a, b] = cx.edge_vertices(e);
            v = if a == v { b } else { a };
            path.push(v);
        }
        path
    }

    /// The two descending paths from the top vertex of a critical edge.
    pub fn separatrix(&self, cx: &CubicalComplex, edge: CellId) -> SeparatrixPair {
        let v = self.peak(1, edge);
        let [a, b] = cx.edge_vertices(edge);
        let lower = if a == v { b } else { a };
        let e = self.up(0, v).expect("top vertex of a critical edge is paired");
        let [c, d] = cx.edge_vertices(e);
        let other = if c == v { d } else { c };
        SeparatrixPair {
            edge,
            branches: [self.descend_from(cx, v, lower), self.descend_from(cx, v, other)],
        }
    }

    /// Separatrix pairs of an index-1 critical point, one per 1-cell.
    pub fn separatrices(&self, cx: &CubicalComplex, point: &CriticalPoint) -> Vec<SeparatrixPair> {
        assert_eq!(point.index, 1, "separatrices need an index-1 point");
        point.cells.iter().map(|&e| self.separatrix(cx, e)).collect()
    }
}

fn process_star(
    cx: &CubicalComplex,
    rank: &[u32],
    peak: &[Vec<CellId>; 4],
    v: CellId,
    members: &[(u8, CellId)],
) -> StarResult {
    let mut cells: Vec<(u8, CellId)> = members.to_vec();
    cells.sort_unstable();
    let m = cells.len();
    debug_assert!(m <= 16 && cells[0] == (0, v));
    let local = |d: u8, id: CellId| cells.binary_search(&(d, id)).ok();
    let mut faces = vec![Vec::new(); m];
    let mut cofaces = vec![Vec::new(); m];
    for i in 0..m {
        let (d, id) = cells[i];
        if d == 0 {
            continue;
        }
        for &f in cx.faces(d as usize, id) {
            if peak[d as usize - 1][f as usize] == v {
                let j = local(d - 1, f).expect("face in lower star");
                faces[i].push(j);
                cofaces[j].push(i);
            }
        }
    }
    let gkey = cells
        .iter()
        .map(|&(d, id)| {
            let mut k: Vec<u32> = cx
                .cell_vertices(d as usize, id)
                .iter()
                .map(|&u| rank[u as usize])
                .collect();
            k.sort_unstable_by(|a, b| b.cmp(a));
            k
        })
        .collect();
    let star = Star {
        cells,
        faces,
        cofaces,
        gkey,
    };
    let relative = star.relative_betti();

    let count = |partner: &[Option<usize>]| {
        let mut c = [0u8; 4];
        for (i, p) in partner.iter().enumerate() {
            if p.is_none() {
                c[star.cells[i].0 as usize] += 1;
            }
        }
        c
    };
    let mut partner = star.greedy();
    let mut ext = star.linear_extension(&partner);
    if count(&partner) != relative || ext.is_none() {
        let alt = star.exhaustive();
        let alt_ext = star.linear_extension(&alt);
        if alt_ext.is_some() {
            partner = alt;
            ext = alt_ext;
        }
    }
    let pos = ext.expect("lower-star matching is acyclic");
    let mut out = StarResult {
        relative,
        crit_count: count(&partner),
        ..Default::default()
    };
    for i in 0..m {
        let (d, id) = star.cells[i];
        out.seq.push((d, id, pos[i] as u8));
        match partner[i] {
            None => out.critical.push((d, id)),
            Some(j) if star.cells[j].0 == d + 1 => out.pairs.push((d, id, star.cells[j].1)),
            Some(_) => {}
        }
    }
    out
}

/// Descending paths `(v, v1, ..., vk)` from an index-1 point to index-0 points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatrixPair {
    /// The critical 1-cell the paths start from.
    pub edge: CellId,
    pub branches: [Vec<CellId>; 2],
}

impl SeparatrixPair {
    pub fn endpoints(&self) -> [CellId; 2] {
        [
            *self.branches[0].last().expect("nonempty branch"),
            *self.branches[1].last().expect("nonempty branch"),
        ]
    }
}

/// A set of edges of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradientGraph {
    pub edges: BTreeSet<CellId>,
}

impl GradientGraph {
    pub fn new(edges: impl IntoIterator<Item = CellId>) -> Self {
        GradientGraph {
            edges: edges.into_iter().collect(),
        }
    }

    pub fn vertices(&self, cx: &CubicalComplex) -> BTreeSet<CellId> {
        self.edges.iter().flat_map(|&e| cx.edge_vertices(e)).collect()
    }
}

/// Result of exchanging `g` across square `s`, if that is an elementary descent.
pub fn elementary_descent(
    cx: &CubicalComplex,
    rank: &[u32],
    g: &GradientGraph,
    square: CellId,
) -> Option<GradientGraph> {
    let bd = cx.faces(2, square);
    if !bd.iter().any(|e| g.edges.contains(e)) || bd.iter().all(|e| g.edges.contains(e)) {
        return None;
    }
    let mut next = g.edges.clone();
    for e in bd {
        if !next.remove(e) {
            next.insert(*e);
        }
    }
    let next = GradientGraph { edges: next };
    let before = g.vertices(cx);
    let after = next.vertices(cx);
    let lowest_lost = before.difference(&after).map(|&v| rank[v as usize]).min()?;
    if after.difference(&before).all(|&v| rank[v as usize] < lowest_lost) {
        Some(next)
    } else {
        None
    }
}

/// Applies elementary descents until none applies. Among applicable squares
/// the one with the highest peak vertex (then the highest id) is used.
pub fn gradient_descent(cx: &CubicalComplex, order: VertexOrder, g: &GradientGraph) -> Result<GradientGraph> {
    let rank = order.ranks(cx);
    descend_with_ranks(cx, order, &rank, g)
}

fn squares_touching(cx: &CubicalComplex, g: &GradientGraph) -> BTreeSet<CellId> {
    let mut out = BTreeSet::new();
    for &e in &g.edges {
        out.extend(edge_cofaces(cx, e));
    }
    out
}

/// Squares having `edge` as a face.
pub fn edge_cofaces(cx: &CubicalComplex, edge: CellId) -> Vec<CellId> {
    let c = *cx.cell(1, edge);
    let a = c.axes.trailing_zeros() as usize;
    let mut out = Vec::new();
    for b in 0..3 {
        if b == a {
            continue;
        }
        for lower in [true, false] {
            let mut anchor = c.anchor;
            if lower {
                if anchor[b] == 0 {
                    continue;
                }
                anchor[b] -= 1;
            }
            if anchor[b] as usize >= cx.dims()[b] {
                continue;
            }
            // squares are never split, but the edge at this position may be
            // a different replica
            if let Some(s) = cx.locate(2, anchor, c.axes | 1 << b, c.cube) {
                if cx.faces(2, s).contains(&edge) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn descend_with_ranks(
    cx: &CubicalComplex,
    order: VertexOrder,
    rank: &[u32],
    g: &GradientGraph,
) -> Result<GradientGraph> {
    let guard = 64 * (cx.num_cells(1) + 16);
    let mut cur = g.clone();
    for _ in 0..guard {
        let mut best: Option<((u32, CellId), GradientGraph)> = None;
        for s in squares_touching(cx, &cur) {
            if let Some(next) = elementary_descent(cx, rank, &cur, s) {
                let k = (rank[order.peak(cx, 2, s) as usize], s);
                if best.as_ref().is_none_or(|(bk, _)| k > *bk) {
                    best = Some((k, next));
                }
            }
        }
        match best {
            Some((_, next)) => cur = next,
            None => return Ok(cur),
        }
    }
    Err(Error::NonTermination(guard))
}
