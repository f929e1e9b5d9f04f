use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sldgm::gf2::{gf2_rank, hamming_7_4};
use sldgm::lattice::min_dist_sq_bound;
use sldgm::{
    construction_d, lattice_min_dist_sq, ml_decode, run_campaign, BinaryCode, BitVector,
    ConstructionDLattice, DecoderConfig, DyadicVector, MultistageDecoder, NestedCodeFamily,
    SimConfig,
};

fn random_family(seed: u64, n_max: usize, k_max: usize) -> NestedCodeFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=n_max);
    let k1 = rng.random_range(1..=n.min(k_max));
    let rows = loop {
        let rows: Vec<BitVector> = (0..k1)
            .map(|_| BitVector::from_bools(&(0..n).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>()))
            .collect();
        if gf2_rank(&rows).unwrap() == k1 {
            break rows;
        }
    };
    let base = BinaryCode::new(n, rows).unwrap();
    let mut dims = vec![k1];
    if rng.random_bool(0.5) {
        dims.push(rng.random_range(0..=k1));
    }
    let alpha = rng.random_range(1..=2);
    NestedCodeFamily::from_prefixes(alpha, &base, &dims).unwrap()
}

fn random_lattice(seed: u64, n_max: usize, k_max: usize) -> ConstructionDLattice {
    construction_d(&random_family(seed, n_max, k_max)).unwrap()
}

/// Membership by `v · B^{-1} ∈ Z^n` with the exact rational inverse.
fn member_by_inverse(inv: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    (0..v.len()).all(|j| {
        let s: BigRational = v.iter().zip(inv).map(|(x, row)| x * &row[j]).sum();
        s.is_integer()
    })
}

/// `d²_min` by scanning every vector with coordinates in `[-1, 1]` on the
/// lattice's dyadic grid. Reducing a shortest vector modulo `2Z^n` lands in
/// this box unless the vector lies in `2Z^n`, whose minimum is 4.
fn box_search_min_dist_sq(lat: &ConstructionDLattice) -> BigRational {
    let n = lat.dimension();
    let e = lat.denominator_exp();
    let s = 1i64 << e;
    let inv = lat.inverse_basis().unwrap();
    let denom = BigInt::from(s);
    let mut best = BigRational::from_integer(4.into());
    let mut num = vec![-s; n];
    loop {
        if num.iter().any(|&x| x != 0) {
            let v: Vec<BigRational> = num
                .iter()
                .map(|&x| BigRational::new(x.into(), denom.clone()))
                .collect();
            let norm: BigRational = v.iter().map(|x| x * x).sum();
            if norm < best && member_by_inverse(&inv, &v) {
                best = norm;
            }
        }
        let mut i = 0;
        while i < n && num[i] == s {
            num[i] = -s;
            i += 1;
        }
        if i == n {
            return best;
        }
        num[i] += 1;
    }
}

fn dist_sq(y: &[f64], v: &DyadicVector) -> f64 {
    y.iter().zip(v.to_f64()).map(|(a, b)| (a - b) * (a - b)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_matches_formula(seed in any::<u64>()) {
        let lat = random_lattice(seed, 12, 12);
        prop_assert_eq!(lat.determinant_from_basis(), lat.determinant_formula());
    }

    #[test]
    fn distance_bound_is_sound(seed in any::<u64>()) {
        let lat = random_lattice(seed, 9, 6);
        let d2 = lattice_min_dist_sq(&lat).unwrap();
        prop_assert!(d2 >= lat.min_dist_sq_lower_bound().unwrap());
        let gains = lat.coding_gain_bounds().unwrap();
        if gains.distance_conditions_hold {
            let alpha = BigRational::from_integer(lat.alpha().into());
            prop_assert!(d2.clone() * alpha >= BigRational::from_integer(4.into()));
        }
        prop_assert!(lat.coding_gain_exact(&d2).unwrap() >= gains.coding_gain_bound - 1e-12);
    }

    #[test]
    fn eq3_and_basis_encodings_agree(seed in any::<u64>(), coeffs in proptest::collection::vec(-3i64..=3, 12)) {
        let lat = random_lattice(seed, 12, 8);
        let n = lat.dimension();
        let v = lat.encode_b(&coeffs[..n]).unwrap();
        let (z, bits) = lat.decompose_eq3(&v).expect("basis point splits into codeword layers");
        prop_assert_eq!(lat.encode_eq3(&z, &bits).unwrap(), v);

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let z: Vec<i64> = (0..n).map(|_| 2 * rng.random_range(-2..=2)).collect();
        let bits: Vec<BitVector> = lat
            .code_dimensions()
            .iter()
            .map(|&k| BitVector::from_bools(&(0..k).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>()))
            .collect();
        let w = lat.encode_eq3(&z, &bits).unwrap();
        prop_assert!(lat.is_lattice_point(&w));
        let inv = lat.inverse_basis().unwrap();
        prop_assert!(member_by_inverse(&inv, &w.to_rational()));
    }

    #[test]
    fn coset_and_box_oracles_agree(seed in any::<u64>()) {
        let lat = random_lattice(seed, 6, 5);
        prop_assert_eq!(lattice_min_dist_sq(&lat).unwrap(), box_search_min_dist_sq(&lat));
    }

    #[test]
    fn decoder_never_beats_ml(seed in any::<u64>(), noise in proptest::collection::vec(-0.9f64..0.9, 8)) {
        let lat = random_lattice(seed, 8, 6);
        let n = lat.dimension();
        let dec = MultistageDecoder::new(&lat, DecoderConfig::default()).unwrap();
        let y = &noise[..n];
        let ml = ml_decode(&lat, y).unwrap();
        let out = dec.decode(y);
        prop_assert!(lat.is_lattice_point(&out.point));
        prop_assert!(dist_sq(y, &ml) <= dist_sq(y, &out.point) + 1e-9);
    }
}

#[test]
fn hamming_box_search_gives_three() {
    let lat = construction_d(&NestedCodeFamily::new(2, vec![hamming_7_4()]).unwrap()).unwrap();
    assert_eq!(box_search_min_dist_sq(&lat), BigRational::from_integer(3.into()));
    assert_eq!(min_dist_sq_bound(&[3], 2), BigRational::new(3.into(), 2.into()));
}

#[test]
fn campaign_is_independent_of_worker_count() {
    let lat = random_lattice(11, 10, 6);
    let config = |workers| SimConfig {
        lattice: None,
        snr_db: vec![0.0, 3.0],
        trials: 2_500,
        target_errors: None,
        seed: 5,
        decoder: DecoderConfig::default(),
        workers,
    };
    let one = run_campaign(&lat, &config(1)).unwrap();
    let three = run_campaign(&lat, &config(3)).unwrap();
    for (a, b) in one.iter().zip(&three) {
        assert_eq!((a.trials, a.errors, a.nonconverged), (b.trials, b.errors, b.nonconverged));
        assert_eq!(a.avg_iterations, b.avg_iterations);
    }
}
