use cubetopo::chain::body_betti;
use cubetopo::oracle::{oracle_barcode, oracle_betti};
use cubetopo::persistence::{dual_h2, MorseFiltration, PersistenceModule};
use cubetopo::{Adjacency, VertexOrder, VoxelBody};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_body(rng: &mut ChaCha8Rng, dims: [usize; 3], p: f64) -> VoxelBody {
    let occ = (0..dims[0] * dims[1] * dims[2]).map(|_| rng.gen_bool(p)).collect();
    VoxelBody::new(dims, occ).unwrap()
}

/// Nested excursion sets of a smoothed random field.
fn filtration(seed: u64, dims: [usize; 3], n: usize) -> (Vec<VoxelBody>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = dims[0] * dims[1] * dims[2];
    let raw: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
    let idx = |i: usize, j: usize, k: usize| i + dims[0] * (j + dims[1] * k);
    let mut vals = vec![0.0; len];
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let mut s = raw[idx(i, j, k)] * 2.0;
                if i + 1 < dims[0] {
                    s += raw[idx(i + 1, j, k)];
                }
                if j + 1 < dims[1] {
                    s += raw[idx(i, j + 1, k)];
                }
                vals[idx(i, j, k)] = s;
            }
        }
    }
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let levels: Vec<f64> = (1..=n).map(|i| sorted[(len * (i + 1)) / (n + 3)]).collect();
    let bodies = levels
        .iter()
        .map(|&c| VoxelBody::new(dims, vals.iter().map(|&v| v <= c).collect()).unwrap())
        .collect();
    (bodies, levels)
}

#[test]
fn betti_matches_oracle_on_random_bodies() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..120 {
        let dims = if t % 2 == 0 { [6, 6, 6] } else { [8, 8, 8] };
        let p = rng.gen_range(0.2..0.8);
        let b = random_body(&mut rng, dims, p);
        assert_eq!(body_betti(&b).unwrap(), oracle_betti(&b).unwrap(), "case {t}");
    }
}

#[test]
fn barcodes_match_oracle() {
    for seed in 0..20 {
        let dims = [6 + (seed as usize % 4), 7, 6];
        let n = 5 + seed as usize % 3;
        let (bodies, levels) = filtration(seed, dims, n);
        let filt = MorseFiltration::new(&bodies, &levels, Adjacency::Face, VertexOrder::Ascending).unwrap();
        let pm = PersistenceModule::new(&filt).unwrap();
        for q in 0..3 {
            let ob = oracle_barcode(&bodies, &levels, q).unwrap();
            assert_eq!(pm.barcode(q).triples(), ob.triples(), "seed {seed} q {q}");
            if q == 2 {
                assert_eq!(
                    dual_h2(&bodies, &levels).unwrap().triples(),
                    ob.triples(),
                    "dual seed {seed}"
                );
            }
        }
    }
}

#[test]
fn barcodes_match_oracle_on_white_noise() {
    for seed in 100..115 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [7, 6, 8];
        let vals: Vec<f64> = (0..dims[0] * dims[1] * dims[2]).map(|_| rng.gen()).collect();
        let levels = [0.15, 0.3, 0.45, 0.6, 0.75, 0.9];
        let bodies: Vec<VoxelBody> = levels
            .iter()
            .map(|&c| VoxelBody::new(dims, vals.iter().map(|&v| v <= c).collect()).unwrap())
            .collect();
        let filt = MorseFiltration::new(&bodies, &levels, Adjacency::Face, VertexOrder::Ascending).unwrap();
        let pm = PersistenceModule::new(&filt).unwrap();
        for q in 0..3 {
            let ob = oracle_barcode(&bodies, &levels, q).unwrap();
            assert_eq!(pm.barcode(q), ob, "seed {seed} q {q}");
        }
        assert_eq!(
            dual_h2(&bodies, &levels).unwrap(),
            oracle_barcode(&bodies, &levels, 2).unwrap()
        );
    }
}
