//! Cubical cell complex of a voxel body.
//!
//! Cells are the closed elementary cubes of the lattice that touch the body,
//! with one refinement: a lattice vertex or edge shared by several occupied
//! cubes is split into one replica per cluster of those cubes, where cubes are
//! clustered by the chosen [`Adjacency`]. Under [`Adjacency::Face`] cubes that
//! meet only along an edge or at a vertex therefore share no cell, so the
//! complex has the topology of the body with 6-connectivity.
//! [`Adjacency::Edge`] keeps edges whole and separates only cubes that meet at
//! a single vertex; that is the dual (18-connected) model used for
//! complements.

use std::sync::OnceLock;

use crate::grid::VoxelBody;

/// How occupied cubes around a shared vertex or edge are glued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adjacency {
    /// Cubes are glued only through common 2-faces (6-connectivity).
    Face,
    /// Cubes are glued through common 2-faces or edges (18-connectivity).
    Edge,
}

pub type CellId = u32;

pub const NONE: u32 = u32::MAX;

/// One cell of the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    /// Lower corner of the cell's lattice footprint.
    pub anchor: [u32; 3],
    /// Bit `a` set iff the cell extends one unit along axis `a`.
    pub axes: u8,
    /// Index among the replicas at this lattice position.
    pub replica: u8,
    /// Linear index of one occupied cube whose closure contains the cell.
    pub cube: u32,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.axes.count_ones() as usize
    }

    /// Upper corner: anchor plus the extent along every spanned axis.
    pub fn top_corner(&self) -> [u32; 3] {
        let mut c = self.anchor;
        for (a, x) in c.iter_mut().enumerate() {
            if self.axes >> a & 1 == 1 {
                *x += 1;
            }
        }
        c
    }
}

/// Duplications performed while splitting touching configurations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub split_vertices: usize,
    pub split_edges: usize,
    /// Lattice vertices that received more than one replica.
    pub vertex_locations: Vec<[u32; 3]>,
    /// Lower endpoints and axis of lattice edges that received more than one replica.
    pub edge_locations: Vec<([u32; 3], u8)>,
}

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    dims: [usize; 3],
    adjacency: Adjacency,
    cells: [Vec<Cell>; 4],
    /// Flat face lists: a `d`-cell has `2d` faces.
    faces: [Vec<CellId>; 4],
    vertex_start: Vec<u32>,
    vertex_mask: Vec<u8>,
    edge_start: [Vec<u32>; 3],
    edge_mask: Vec<u8>,
    square_id: [Vec<u32>; 3],
    cube_id: Vec<u32>,
}

fn other_axes(a: usize) -> (usize, usize) {
    match a {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Partition of an occupancy mask into clusters.
fn cluster(mask: u8, nodes: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<u8> {
    let mut out = Vec::new();
    let mut seen = 0u8;
    for start in 0..nodes {
        if mask >> start & 1 == 0 || seen >> start & 1 == 1 {
            continue;
        }
        let mut comp = 1u8 << start;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in 0..nodes {
                if mask >> y & 1 == 1 && comp >> y & 1 == 0 && adjacent(x, y) {
                    comp |= 1 << y;
                    stack.push(y);
                }
            }
        }
        seen |= comp;
        out.push(comp);
    }
    out
}

struct ClusterTables {
    vertex: [Vec<Vec<u8>>; 2],
    edge: [Vec<Vec<u8>>; 2],
}

fn tables() -> &'static ClusterTables {
    static T: OnceLock<ClusterTables> = OnceLock::new();
    T.get_or_init(|| {
        let pop = |x: usize, y: usize| (x ^ y).count_ones();
        let vertex_face: Vec<Vec<u8>> = (0..256).map(|m| cluster(m as u8, 8, |x, y| pop(x, y) == 1)).collect();
        let vertex_edge: Vec<Vec<u8>> = (0..256).map(|m| cluster(m as u8, 8, |x, y| pop(x, y) <= 2)).collect();
        let edge_face: Vec<Vec<u8>> = (0..16).map(|m| cluster(m as u8, 4, |x, y| pop(x, y) == 1)).collect();
        let edge_edge: Vec<Vec<u8>> = (0..16).map(|m| cluster(m as u8, 4, |_, _| true)).collect();
        ClusterTables {
            vertex: [vertex_face, vertex_edge],
            edge: [edge_face, edge_edge],
        }
    })
}

impl Adjacency {
    fn slot(self) -> usize {
        match self {
            Adjacency::Face => 0,
            Adjacency::Edge => 1,
        }
    }
}

/// Complex of `body` with face-only gluing.
pub fn build_complex(body: &VoxelBody) -> (CubicalComplex, PreprocessReport) {
    build_complex_with(body, Adjacency::Face)
}

pub fn build_complex_with(body: &VoxelBody, adjacency: Adjacency) -> (CubicalComplex, PreprocessReport) {
    CubicalComplex::build(body, adjacency)
}

/// `V - E + F - C`.
pub fn euler_cells(complex: &CubicalComplex) -> i64 {
    let [v, e, f, c] = complex.counts();
    v as i64 - e as i64 + f as i64 - c as i64
}

impl CubicalComplex {
    fn build(body: &VoxelBody, adjacency: Adjacency) -> (Self, PreprocessReport) {
        let dims = body.dims();
        let [nx, ny, nz] = dims;
        let occ = |x: i64, y: i64, z: i64| body.get_signed(x, y, z);
        let lin = |p: [usize; 3], d: [usize; 3]| p[0] + d[0] * (p[1] + d[1] * p[2]);
        let cube_lin = |c: [i64; 3]| (c[0] as usize + nx * (c[1] as usize + ny * c[2] as usize)) as u32;
        let tabs = tables();
        let mut report = PreprocessReport::default();

        // cubes
        let mut cube_id = vec![NONE; nx * ny * nz];
        let mut cubes = Vec::new();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if body.get(i, j, k) {
                        let l = lin([i, j, k], dims);
                        cube_id[l] = cubes.len() as u32;
                        cubes.push(Cell {
                            anchor: [i as u32, j as u32, k as u32],
                            axes: 0b111,
                            replica: 0,
                            cube: l as u32,
                        });
                    }
                }
            }
        }

        // squares, one per normal axis and lattice position
        let mut squares = Vec::new();
        let mut square_id: [Vec<u32>; 3] = Default::default();
        for a in 0..3 {
            let mut sd = dims;
            sd[a] += 1;
            let mut ids = vec![NONE; sd[0] * sd[1] * sd[2]];
            let (b, c) = other_axes(a);
            for k in 0..sd[2] {
                for j in 0..sd[1] {
                    for i in 0..sd[0] {
                        let p = [i as i64, j as i64, k as i64];
                        let mut below = p;
                        below[a] -= 1;
                        let rep = if occ(p[0], p[1], p[2]) {
                            Some(p)
                        } else if occ(below[0], below[1], below[2]) {
                            Some(below)
                        } else {
                            None
                        };
                        if let Some(r) = rep {
                            ids[lin([i, j, k], sd)] = squares.len() as u32;
                            squares.push(Cell {
                                anchor: [i as u32, j as u32, k as u32],
                                axes: (1 << b) | (1 << c),
                                replica: 0,
                                cube: cube_lin(r),
                            });
                        }
                    }
                }
            }
            square_id[a] = ids;
        }

        // edges, split per cluster of the (up to four) incident cubes
        let mut edges = Vec::new();
        let mut edge_mask = Vec::new();
        let mut edge_start: [Vec<u32>; 3] = Default::default();
        for a in 0..3 {
            let mut ed = [nx + 1, ny + 1, nz + 1];
            ed[a] -= 1;
            let (b, c) = other_axes(a);
            let mut start = Vec::with_capacity(ed[0] * ed[1] * ed[2] + 1);
            for k in 0..ed[2] {
                for j in 0..ed[1] {
                    for i in 0..ed[0] {
                        start.push(edges.len() as u32);
                        let p = [i as i64, j as i64, k as i64];
                        let mut mask = 0u8;
                        let mut local = [[0i64; 3]; 4];
                        for l in 0..4 {
                            let mut q = p;
                            q[b] += (l & 1) as i64 - 1;
                            q[c] += (l >> 1 & 1) as i64 - 1;
                            local[l] = q;
                            if occ(q[0], q[1], q[2]) {
                                mask |= 1 << l;
                            }
                        }
                        let clusters = &tabs.edge[adjacency.slot()][mask as usize];
                        if clusters.len() > 1 {
                            report.split_edges += 1;
                            report.edge_locations.push(([i as u32, j as u32, k as u32], a as u8));
                        }
                        for (r, &m) in clusters.iter().enumerate() {
                            let first = m.trailing_zeros() as usize;
                            edges.push(Cell {
                                anchor: [i as u32, j as u32, k as u32],
                                axes: 1 << a,
                                replica: r as u8,
                                cube: cube_lin(local[first]),
                            });
                            edge_mask.push(m);
                        }
                    }
                }
            }
            start.push(edges.len() as u32);
            edge_start[a] = start;
        }

        // vertices, split per cluster of the (up to eight) incident cubes
        let mut vertices = Vec::new();
        let mut vertex_mask = Vec::new();
        let vd = [nx + 1, ny + 1, nz + 1];
        let mut vertex_start = Vec::with_capacity(vd[0] * vd[1] * vd[2] + 1);
        for k in 0..vd[2] {
            for j in 0..vd[1] {
                for i in 0..vd[0] {
                    vertex_start.push(vertices.len() as u32);
                    let p = [i as i64, j as i64, k as i64];
                    let mut mask = 0u8;
                    let mut local = [[0i64; 3]; 8];
                    for (l, q) in local.iter_mut().enumerate() {
                        *q = [
                            p[0] + (l & 1) as i64 - 1,
                            p[1] + (l >> 1 & 1) as i64 - 1,
                            p[2] + (l >> 2 & 1) as i64 - 1,
                        ];
                        if occ(q[0], q[1], q[2]) {
                            mask |= 1 << l;
                        }
                    }
                    let clusters = &tabs.vertex[adjacency.slot()][mask as usize];
                    if clusters.len() > 1 {
                        report.split_vertices += 1;
                        report.vertex_locations.push([i as u32, j as u32, k as u32]);
                    }
                    for (r, &m) in clusters.iter().enumerate() {
                        let first = m.trailing_zeros() as usize;
                        vertices.push(Cell {
                            anchor: [i as u32, j as u32, k as u32],
                            axes: 0,
                            replica: r as u8,
                            cube: cube_lin(local[first]),
                        });
                        vertex_mask.push(m);
                    }
                }
            }
        }
        vertex_start.push(vertices.len() as u32);

        let mut cx = CubicalComplex {
            dims,
            adjacency,
            cells: [vertices, edges, squares, cubes],
            faces: Default::default(),
            vertex_start,
            vertex_mask,
            edge_start,
            edge_mask,
            square_id,
            cube_id,
        };
        cx.faces = [
            Vec::new(),
            cx.collect_faces(1),
            cx.collect_faces(2),
            cx.collect_faces(3),
        ];
        (cx, report)
    }

    fn collect_faces(&self, dim: usize) -> Vec<CellId> {
        let mut out = Vec::with_capacity(self.cells[dim].len() * 2 * dim);
        for cell in &self.cells[dim] {
            for a in 0..3 {
                if cell.axes >> a & 1 == 0 {
                    continue;
                }
                let axes = cell.axes & !(1 << a);
                for step in 0..2 {
                    let mut anchor = cell.anchor;
                    anchor[a] += step;
                    let id = self
                        .locate(dim - 1, anchor, axes, cell.cube)
                        .expect("face of a cell must exist");
                    out.push(id);
                }
            }
        }
        out
    }

    fn vertex_dims(&self) -> [usize; 3] {
        [self.dims[0] + 1, self.dims[1] + 1, self.dims[2] + 1]
    }

    fn cube_coords(&self, cube: u32) -> [i64; 3] {
        let c = cube as usize;
        let [nx, ny, _] = self.dims;
        [(c % nx) as i64, (c / nx % ny) as i64, (c / (nx * ny)) as i64]
    }

    /// Cell with the given lattice footprint whose cluster contains `cube`.
    pub fn locate(&self, dim: usize, anchor: [u32; 3], axes: u8, cube: u32) -> Option<CellId> {
        let q = self.cube_coords(cube);
        let p = [anchor[0] as i64, anchor[1] as i64, anchor[2] as i64];
        match dim {
            0 => {
                let d = [q[0] - p[0] + 1, q[1] - p[1] + 1, q[2] - p[2] + 1];
                if d.iter().any(|&x| !(0..=1).contains(&x)) {
                    return None;
                }
                let l = d[0] + 2 * d[1] + 4 * d[2];
                let vd = self.vertex_dims();
                let idx = anchor[0] as usize + vd[0] * (anchor[1] as usize + vd[1] * anchor[2] as usize);
                let (s, e) = (self.vertex_start[idx], self.vertex_start[idx + 1]);
                (s..e).find(|&v| self.vertex_mask[v as usize] >> l & 1 == 1)
            }
            1 => {
                let a = axes.trailing_zeros() as usize;
                let (b, c) = other_axes(a);
                if q[a] != p[a] {
                    return None;
                }
                let (db, dc) = (q[b] - p[b] + 1, q[c] - p[c] + 1);
                if !(0..=1).contains(&db) || !(0..=1).contains(&dc) {
                    return None;
                }
                let l = db + 2 * dc;
                let mut ed = self.vertex_dims();
                ed[a] -= 1;
                let idx = anchor[0] as usize + ed[0] * (anchor[1] as usize + ed[1] * anchor[2] as usize);
                let start = &self.edge_start[a];
                let (s, e) = (start[idx], start[idx + 1]);
                (s..e).find(|&x| self.edge_mask[x as usize] >> l & 1 == 1)
            }
            2 => {
                let a = (!axes & 0b111).trailing_zeros() as usize;
                let mut sd = self.dims;
                sd[a] += 1;
                let idx = anchor[0] as usize + sd[0] * (anchor[1] as usize + sd[1] * anchor[2] as usize);
                let id = self.square_id[a][idx];
                (id != NONE).then_some(id)
            }
            3 => {
                let idx = anchor[0] as usize + self.dims[0] * (anchor[1] as usize + self.dims[1] * anchor[2] as usize);
                let id = self.cube_id[idx];
                (id != NONE).then_some(id)
            }
            _ => None,
        }
    }

    /// Image of a cell of `self` in a complex built from a superset body.
    pub fn image_in(&self, other: &CubicalComplex, dim: usize, id: CellId) -> Option<CellId> {
        let c = &self.cells[dim][id as usize];
        other.locate(dim, c.anchor, c.axes, c.cube)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }

    pub fn cells(&self, dim: usize) -> &[Cell] {
        &self.cells[dim]
    }

    pub fn cell(&self, dim: usize, id: CellId) -> &Cell {
        &self.cells[dim][id as usize]
    }

    pub fn num_cells(&self, dim: usize) -> usize {
        self.cells[dim].len()
    }

    /// `(V, E, F, C)`.
    pub fn counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|d| self.cells[d].len())
    }

    /// `V,E,F,C` as a CSV line.
    pub fn counts_csv(&self) -> String {
        let [v, e, f, c] = self.counts();
        format!("{v},{e},{f},{c}")
    }

    pub fn is_empty(&self) -> bool {
        self.cells[0].is_empty()
    }

    /// Codimension-one faces of a cell (empty for vertices).
    pub fn faces(&self, dim: usize, id: CellId) -> &[CellId] {
        if dim == 0 {
            return &[];
        }
        let k = 2 * dim;
        let s = id as usize * k;
        &self.faces[dim][s..s + k]
    }

    /// Vertex replica at the given lattice corner of a cell.
    pub fn corner_vertex(&self, dim: usize, id: CellId, corner: [u32; 3]) -> CellId {
        let c = &self.cells[dim][id as usize];
        self.locate(0, corner, 0, c.cube)
            .expect("corner vertex of a cell must exist")
    }

    /// Endpoints of an edge, lower corner first.
    pub fn edge_vertices(&self, id: CellId) -> [CellId; 2] {
        let f = self.faces(1, id);
        [f[0], f[1]]
    }

    /// All vertex replicas of a cell.
    pub fn cell_vertices(&self, dim: usize, id: CellId) -> Vec<CellId> {
        let c = &self.cells[dim][id as usize];
        let mut out = Vec::with_capacity(1 << dim);
        for bits in 0u8..8 {
            if bits & !c.axes != 0 {
                continue;
            }
            let mut corner = c.anchor;
            for (a, x) in corner.iter_mut().enumerate() {
                *x += (bits >> a & 1) as u32;
            }
            out.push(self.corner_vertex(dim, id, corner));
        }
        out
    }

    /// Boundary columns of dimension `dim` as sorted face lists.
    pub fn boundary_columns(&self, dim: usize) -> Vec<Vec<u32>> {
        (0..self.cells[dim].len() as u32)
            .map(|id| {
                let mut f = self.faces(dim, id).to_vec();
                f.sort_unstable();
                f
            })
            .collect()
    }
}
