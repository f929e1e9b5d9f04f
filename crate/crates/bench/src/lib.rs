//! Shared inputs for the decoding and construction benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sldgm::gf2::hamming_7_4;
use sldgm::peg::systematic_ldgm_from_graph;
use sldgm::sim::sigma_from_snr;
use sldgm::{construction_d, peg_construct, ConstructionDLattice, NestedCodeFamily, TannerGraph};

/// Degree-3 PEG graph with `k` symbols and `k` checks.
pub fn peg_graph(k: usize, seed: u64) -> TannerGraph {
    peg_construct(k, k, &vec![3; k], seed).expect("valid PEG parameters")
}

/// One-level lattice of the systematic LDGM code of [`peg_graph`].
pub fn ldgm_lattice(k: usize, seed: u64) -> ConstructionDLattice {
    let code = systematic_ldgm_from_graph(&peg_graph(k, seed));
    construction_d(&NestedCodeFamily::new(1, vec![code]).expect("one code")).expect("nested")
}

pub fn hamming_lattice() -> ConstructionDLattice {
    construction_d(&NestedCodeFamily::new(2, vec![hamming_7_4()]).expect("one code")).expect("nested")
}

/// `count` received vectors: the zero point plus Gaussian noise at `snr_db`.
pub fn noisy_zero(lat: &ConstructionDLattice, snr_db: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, sigma_from_snr(lat, snr_db)).expect("finite sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..lat.dimension()).map(|_| normal.sample(&mut rng)).collect())
        .collect()
}
