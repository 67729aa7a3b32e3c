//! Property tests for the documented invariants.

use std::collections::{BTreeMap, BTreeSet};

use cubetopo::chain::{betti, build_chain, MorseComplex};
use cubetopo::complex::{build_complex, build_complex_with, euler_cells, Adjacency};
use cubetopo::fieldgen::{generate_sgs, generate_spectral, SgsParams, SpectralParams};
use cubetopo::grid::{excursion, filtration, normalize, Direction, LevelSchedule, ScalarGrid, VoxelBody};
use cubetopo::morse::{edge_cofaces, elementary_descent, morse_euler, DiscreteGradient, GradientGraph, VertexOrder};
use cubetopo::oracle::{oracle_barcode, oracle_betti, telescope};
use cubetopo::persistence::{check_commutation, MorseFiltration, PersistenceModule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn body_from(dims: [usize; 3], density: f64, seed: u64) -> VoxelBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let occ = (0..dims.iter().product()).map(|_| rng.gen_bool(density)).collect();
    VoxelBody::new(dims, occ).unwrap()
}

fn grid_from(dims: [usize; 3], seed: u64) -> ScalarGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarGrid::from_fn(dims, |_, _, _| rng.gen::<f64>()).unwrap()
}

fn dims_strategy(max: usize) -> impl Strategy<Value = [usize; 3]> {
    [1..=max, 1..=max, 1..=max]
}

fn body_strategy(max: usize) -> impl Strategy<Value = VoxelBody> {
    (dims_strategy(max), 0.15f64..0.85, any::<u64>()).prop_map(|(d, p, s)| body_from(d, p, s))
}

/// Filtration of a random grid: (bodies, levels).
fn filtration_strategy(max: usize) -> impl Strategy<Value = (Vec<VoxelBody>, Vec<f64>)> {
    (
        dims_strategy(max),
        any::<u64>(),
        prop::collection::btree_set(1u32..20, 1..6),
    )
        .prop_map(|(d, s, lv)| {
            let g = grid_from(d, s);
            let levels: Vec<f64> = lv.into_iter().map(|v| v as f64 / 20.0).collect();
            let schedule = LevelSchedule::new(levels.clone(), Direction::Leq).unwrap();
            (filtration(&g, &schedule), levels)
        })
}

/// 6-connected components of the occupied cubes.
fn components(body: &VoxelBody) -> Vec<Vec<[usize; 3]>> {
    let d = body.dims();
    let mut seen = vec![false; d[0] * d[1] * d[2]];
    let idx = |c: [usize; 3]| c[0] + d[0] * (c[1] + d[1] * c[2]);
    let mut out = Vec::new();
    for k in 0..d[2] {
        for j in 0..d[1] {
            for i in 0..d[0] {
                if !body.get(i, j, k) || seen[idx([i, j, k])] {
                    continue;
                }
                let mut comp = Vec::new();
                let mut stack = vec![[i, j, k]];
                seen[idx([i, j, k])] = true;
                while let Some(c) = stack.pop() {
                    comp.push(c);
                    for a in 0..3 {
                        for step in [-1i64, 1] {
                            let mut n = c.map(|v| v as i64);
                            n[a] += step;
                            if n[a] < 0 || n[a] >= d[a] as i64 {
                                continue;
                            }
                            let n = n.map(|v| v as usize);
                            if body.get(n[0], n[1], n[2]) && !seen[idx(n)] {
                                seen[idx(n)] = true;
                                stack.push(n);
                            }
                        }
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn excursion_is_monotone((d, s) in (dims_strategy(6), any::<u64>()), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g = grid_from(d, s);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(excursion(&g, lo, Direction::Leq).is_subset_of(&excursion(&g, hi, Direction::Leq)));
        prop_assert!(excursion(&g, hi, Direction::Geq).is_subset_of(&excursion(&g, lo, Direction::Geq)));
    }

    #[test]
    fn normalize_preserves_excursions((d, s) in (dims_strategy(6), any::<u64>()), shift in -50.0f64..50.0, scale in 0.1f64..20.0, c in 0.0f64..1.0) {
        let g = grid_from(d, s);
        let raw = ScalarGrid::new(d, g.values().iter().map(|v| shift + scale * v).collect()).unwrap();
        let (min, max) = raw.range();
        prop_assume!(max > min);
        let level = min + c * (max - min);
        let n = normalize(&raw).unwrap();
        let mapped = (level - min) / (max - min);
        for dir in [Direction::Leq, Direction::Geq] {
            // the comparison must agree on every cube away from round-off
            let a = excursion(&raw, level, dir);
            let b = excursion(&n, mapped, dir);
            let close = raw.values().iter().any(|v| ((v - level) / (max - min)).abs() < 1e-12);
            prop_assert!(close || a == b);
        }
    }

    #[test]
    fn filtration_is_elementwise_excursion((d, s) in (dims_strategy(5), any::<u64>()), lv in prop::collection::btree_set(0u32..100, 1..8)) {
        let g = grid_from(d, s);
        let levels: Vec<f64> = lv.into_iter().map(|v| v as f64 / 100.0).collect();
        for dir in [Direction::Leq, Direction::Geq] {
            let mut l = levels.clone();
            if dir == Direction::Geq { l.reverse(); }
            let schedule = LevelSchedule::new(l.clone(), dir).unwrap();
            let f = filtration(&g, &schedule);
            prop_assert_eq!(f.len(), l.len());
            for (b, &c) in f.iter().zip(&l) {
                prop_assert_eq!(b, &excursion(&g, c, dir));
            }
        }
    }

    #[test]
    fn complex_counts_and_euler(body in body_strategy(6)) {
        let (cx, _) = build_complex(&body);
        prop_assert_eq!(cx.num_cells(3), body.count());
        let t = oracle_betti(&body).unwrap();
        prop_assert_eq!(euler_cells(&cx), t.chi);
    }

    #[test]
    fn morse_counting_identity(body in body_strategy(6), desc in any::<bool>()) {
        let order = if desc { VertexOrder::Descending } else { VertexOrder::Ascending };
        for adj in [Adjacency::Face, Adjacency::Edge] {
            let (cx, _) = build_complex_with(&body, adj);
            let g = DiscreteGradient::new(&cx, order);
            prop_assert_eq!(morse_euler(g.critical_points()), euler_cells(&cx));
            prop_assert!(g.anomalies().is_empty());
        }
    }

    #[test]
    fn one_minimum_per_component(body in body_strategy(6)) {
        let (cx, _) = build_complex(&body);
        let g = DiscreteGradient::new(&cx, VertexOrder::Ascending);
        let minima: BTreeSet<[u32; 3]> = g.critical_points().iter().filter(|p| p.index == 0).map(|p| p.position).collect();
        let comps = components(&body);
        for comp in &comps {
            let low = comp.iter()
                .map(|c| c.map(|v| v as u32))
                .min_by_key(|c| (c[0] + c[1] + c[2], c[0], c[1], c[2]))
                .unwrap();
            prop_assert!(minima.contains(&low), "component minimum {:?} not critical", low);
        }
        let n0 = g.critical_points().iter().filter(|p| p.index == 0).count();
        prop_assert!(n0 >= comps.len());
        prop_assert_eq!(betti(&build_chain(&cx, &g).unwrap()).b0, comps.len());
    }

    #[test]
    fn descent_decreases_vertex_multiset(body in body_strategy(5), seed in any::<u64>()) {
        let (cx, _) = build_complex(&body);
        prop_assume!(cx.num_cells(1) > 0);
        let rank = VertexOrder::Ascending.ranks(&cx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<u32> = (0..cx.num_cells(1) as u32).filter(|_| rng.gen_bool(0.3)).collect();
        let g = GradientGraph::new(edges);
        let desc = |gr: &GradientGraph| {
            let mut r: Vec<u32> = gr.vertices(&cx).iter().map(|&v| rank[v as usize]).collect();
            r.sort_unstable_by(|a, b| b.cmp(a));
            r
        };
        let before = desc(&g);
        let squares: BTreeSet<u32> = g.edges.iter().flat_map(|&e| edge_cofaces(&cx, e)).collect();
        for s in squares {
            if let Some(next) = elementary_descent(&cx, &rank, &g, s) {
                prop_assert!(desc(&next) < before);
            }
        }
    }

    #[test]
    fn morse_betti_matches_oracle(body in body_strategy(8)) {
        let m = MorseComplex::new(&body, Adjacency::Face, VertexOrder::Ascending).unwrap();
        let t = m.betti();
        prop_assert_eq!(t, oracle_betti(&body).unwrap());
        prop_assert_eq!(t.chi, euler_cells(&m.complex));
        // rank-nullity in each degree
        let c = &m.chain;
        let (r1, r2) = (c.d1.rank(), c.d2.rank());
        prop_assert_eq!(c.d1.kernel().len(), c.dims[1] - r1);
        prop_assert_eq!(c.d2.kernel().len(), c.dims[2] - r2);
        prop_assert_eq!(t.b1 + r2, c.dims[1] - r1);
    }

    #[test]
    fn chain_maps_commute((bodies, levels) in filtration_strategy(6)) {
        for (adj, order) in [(Adjacency::Face, VertexOrder::Ascending), (Adjacency::Edge, VertexOrder::Descending)] {
            let bs: Vec<VoxelBody> = if adj == Adjacency::Face {
                bodies.clone()
            } else {
                bodies.iter().rev().map(|b| b.padded_complement(1)).collect()
            };
            let f = MorseFiltration::new(&bs, &levels, adj, order).unwrap();
            for (i, map) in f.maps.iter().enumerate() {
                prop_assert!(check_commutation(&f.complexes[i], &f.complexes[i + 1], map).is_ok());
            }
        }
    }

    #[test]
    fn persistent_betti_monotone_and_counted((bodies, levels) in filtration_strategy(6)) {
        let f = MorseFiltration::new(&bodies, &levels, Adjacency::Face, VertexOrder::Ascending).unwrap();
        let pm = PersistenceModule::new(&f).unwrap();
        let n = levels.len();
        for q in 0..3 {
            let bc = pm.barcode(q);
            for i in 1..=n {
                for j in i..=n {
                    let b = pm.persistent_betti(q, i, j).unwrap();
                    prop_assert_eq!(b, bc.spanning(q as u8, i, j));
                    if j > i {
                        prop_assert!(b <= pm.persistent_betti(q, i, j - 1).unwrap());
                        prop_assert!(pm.persistent_betti(q, i + 1, j).unwrap() >= b);
                    }
                }
            }
        }
    }

    #[test]
    fn complement_indices_flip(body in body_strategy(5)) {
        let (cm, _) = build_complex_with(&body, Adjacency::Face);
        let comp = body.padded_complement(1);
        let (cc, _) = build_complex_with(&comp, Adjacency::Edge);
        let mut f: BTreeMap<[u32; 3], Vec<(u8, u8)>> = BTreeMap::new();
        for p in DiscreteGradient::new(&cm, VertexOrder::Ascending).critical_points() {
            f.entry(p.position.map(|v| v + 1)).or_default().push((2 - p.index, p.multiplicity));
        }
        let d = body.dims();
        let inside = |p: &[u32; 3]| (0..3).all(|a| p[a] >= 1 && p[a] as usize <= d[a] + 1);
        let mut h: BTreeMap<[u32; 3], Vec<(u8, u8)>> = BTreeMap::new();
        let mut outside = Vec::new();
        for p in DiscreteGradient::new(&cc, VertexOrder::Descending).critical_points() {
            if inside(&p.position) {
                h.entry(p.position).or_default().push((p.index, p.multiplicity));
            } else {
                outside.push((p.position, p.index));
            }
        }
        for v in f.values_mut().chain(h.values_mut()) {
            v.sort_unstable();
        }
        prop_assert_eq!(f, h);
        // the padded box contributes only its top corner, as a minimum of -f
        let top = [d[0] as u32 + 2, d[1] as u32 + 2, d[2] as u32 + 2];
        prop_assert_eq!(outside, vec![(top, 0)]);
    }

    #[test]
    fn telescope_is_a_filtered_complex((bodies, levels) in filtration_strategy(6)) {
        let t = telescope(&bodies).unwrap();
        prop_assert!(t.is_well_ordered());
        prop_assert!(t.boundary_squared_is_zero());
        let last = bodies.last().unwrap();
        for q in 0..3 {
            let one = oracle_barcode(std::slice::from_ref(last), &levels[levels.len() - 1..], q).unwrap();
            prop_assert_eq!(one.len(), oracle_betti(last).unwrap().get(q));
        }
    }

    #[test]
    fn generators_are_pure(d in dims_strategy(10), seed in any::<u64>(), k in 0usize..5) {
        let p = SgsParams::default();
        prop_assert_eq!(generate_sgs(&p, d, seed).unwrap(), generate_sgs(&p, d, seed).unwrap());
        let sp = SpectralParams::with_order(k);
        prop_assert_eq!(generate_spectral(&sp, d, seed).unwrap(), generate_spectral(&sp, d, seed).unwrap());
    }
}
