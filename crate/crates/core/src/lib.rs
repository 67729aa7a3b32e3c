//! Topology of voxel excursion sets.
//!
//! The crate computes Betti numbers, Euler characteristics and persistence
//! barcodes of three-dimensional bodies made of unit cubes, where each body is
//! an excursion set `{f <= c}` or `{f >= c}` of a per-cube scalar field. The
//! homology engine is a discrete Morse complex for the diagonal function
//! `x + y + z`; a brute-force boundary-matrix reduction ([`oracle`]) serves as
//! an independent referee. Synthetic stationary fields for level sweeps come
//! from [`fieldgen`].
//!
//! Bodies use face connectivity: two cubes that meet only along an edge or at
//! a vertex do not touch (see [`complex`]).

pub mod chain;
pub mod cli;
pub mod complex;
pub mod error;
pub mod fieldgen;
pub mod gf2;
pub mod grid;
pub mod io;
pub mod morse;
pub mod oracle;
pub mod persistence;
pub mod svg;
pub mod sweep;

pub use chain::{betti, build_chain, BettiTriple, ChainComplexZ2};
pub use complex::{build_complex, euler_cells, Adjacency, CubicalComplex, PreprocessReport};
pub use error::{Error, Result};
pub use grid::{excursion, filtration, normalize, Direction, LevelSchedule, ScalarGrid, VoxelBody};
pub use morse::{classify, CriticalPoint, DiscreteGradient, VertexOrder};
pub use persistence::{Barcode, Interval, MorseFiltration, PersistenceModule};
