use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use unified_monogamy::bounds::{
    check_tail_condition, check_gap_ordering, hamming_weight, tightening_coefficient, weighted_power_sum,
    TighteningParams, Weighting,
};
use unified_monogamy::entropy::{unified_entropy, EntropyParams};
use unified_monogamy::harness::output::format_g12;
use unified_monogamy::linalg::{hermitian_eigensystem, tensor_product, ComplexMatrix, Spectrum, C64};
use unified_monogamy::measures::{
    convex_roof, pure_state_ue, ue_two_qubit, Direction, RoofOptions,
};
use unified_monogamy::states::{ginibre_mixed, haar_random_unitary, DensityMatrix, PartitionSpec, PureState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn scalar_lemma_lower(k in 1e-6f64..=1.0, delta in 1.0f64..8.0, frac in 0.0f64..=1.0, alpha in 1.0f64..10.0) {
        let x = frac * k.powf(delta);
        let c = tightening_coefficient(&TighteningParams::new(k, delta, alpha).unwrap()).unwrap();
        prop_assert!((1.0 + x).powf(alpha) >= 1.0 + c * x.powf(alpha) - 1e-12);
    }

    #[test]
    fn scalar_lemma_upper(k in 1e-6f64..=1.0, delta in 1.0f64..8.0, frac in 0.0f64..=1.0, beta in 0.0f64..=1.0) {
        let x = frac * k.powf(delta);
        let c = tightening_coefficient(&TighteningParams::new(k, delta, beta).unwrap()).unwrap();
        prop_assert!((1.0 + x).powf(beta) <= 1.0 + c * x.powf(beta) + 1e-12);
    }

    #[test]
    fn coefficient_dominates_baseline(k in 1e-3f64..=1.0, delta in 1.0f64..5.0, e in 0.0f64..6.0) {
        let c = tightening_coefficient(&TighteningParams::new(k, delta, e).unwrap()).unwrap();
        if e >= 1.0 {
            prop_assert!(c >= e * (1.0 - 1e-12));
        } else {
            prop_assert!(c <= e + 1e-12);
        }
    }

    #[test]
    fn hamming_weight_recursion(j in any::<u64>()) {
        prop_assert_eq!(hamming_weight(j), hamming_weight(j >> 1) + (j & 1) as u32);
        prop_assert!(hamming_weight(j) <= 64 && (j == 0) == (hamming_weight(j) == 0));
    }

    #[test]
    fn weighted_sums_are_ordered(
        mut v in prop::collection::vec(0.0f64..1.0, 1..9),
        k in 0.05f64..=1.0,
        e in 0.0f64..4.0,
    ) {
        v.sort_by(|a, b| b.total_cmp(a));
        let t = TighteningParams::new(k, 1.0, e).unwrap();
        let pos = weighted_power_sum(&v, &t, Weighting::Positional).unwrap();
        let ham = weighted_power_sum(&v, &t, Weighting::Hamming).unwrap();
        let kim = weighted_power_sum(&v, &t, Weighting::KimHamming).unwrap();
        let tol = 1e-12 * pos.abs().max(kim.abs()).max(1.0);
        if e >= 1.0 {
            prop_assert!(pos >= ham - tol && ham >= kim - tol);
        } else {
            prop_assert!(pos <= ham + tol && ham <= kim + tol);
        }
    }

    #[test]
    fn tail_condition_implies_gap_ordering(v in prop::collection::vec(0.0f64..1.0, 1..8), k in 0.05f64..=1.0) {
        let t = TighteningParams::new(k, 1.0, 2.0).unwrap();
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if check_tail_condition(&sorted, &t) {
            prop_assert!(check_gap_ordering(&v, &t).1);
        }
    }

    #[test]
    fn g12_round_trips(x in -1e6f64..1e6) {
        let back: f64 = format_g12(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }

    #[test]
    fn unified_entropy_is_bounded(raw in prop::collection::vec(1e-9f64..1.0, 2..9), q in 0.1f64..5.0, s in 0.0f64..=1.0) {
        let total: f64 = raw.iter().sum();
        let d = raw.len();
        let sp = Spectrum::density(raw.iter().map(|x| x / total).collect()).unwrap();
        let p = EntropyParams::new(q, s).unwrap();
        let top = unified_entropy(&Spectrum::density(vec![1.0 / d as f64; d]).unwrap(), &p).unwrap();
        let v = unified_entropy(&sp, &p).unwrap();
        prop_assert!(v >= -1e-12 && v <= top + 1e-9);
    }
}

fn opts(restarts: usize, seed: u64) -> RoofOptions {
    RoofOptions { restarts, seed, fast_path: false, ..Default::default() }
}

/// `Σ p_i E(ψ_i)` over the ensemble `ψ̃_i = Σ_j V_ij √μ_j v_j` for a random isometry `V`.
fn random_ensemble_average(rho: &DensityMatrix, p: &EntropyParams, rng: &mut Xoshiro256PlusPlus) -> f64 {
    let (spec, vecs) = hermitian_eigensystem(rho.matrix()).unwrap();
    let r = spec.values().iter().filter(|&&l| l > 1e-12).count();
    let m = rng.random_range(r..=r * r + 1);
    let u = haar_random_unitary(m, rng);
    let part = PartitionSpec::new(0, vec![1]);
    let mut total = 0.0;
    for i in 0..m {
        let mut psi = vec![C64::new(0.0, 0.0); rho.dim()];
        for j in 0..r {
            let w = u[(i, j)] * spec.values()[j].sqrt();
            for (a, v) in psi.iter_mut().zip(vecs.column(j)) {
                *a += w * v;
            }
        }
        let weight: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if weight > 1e-15 {
            let member = PureState::normalized(rho.dims().to_vec(), psi).unwrap();
            total += weight * pure_state_ue(&member, &part, p).unwrap();
        }
    }
    total
}

#[test]
fn roof_values_bracket_random_ensembles() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xB0C5);
    let part = PartitionSpec::new(0, vec![1]);
    for (i, &(q, s)) in [(2.0, 1.0), (2.5, 0.5), (1.5, 0.9)].iter().enumerate() {
        let p = EntropyParams::new(q, s).unwrap();
        let rho = ginibre_mixed(4, 2, 400 + i as u64).unwrap();
        let lo = convex_roof(&rho, &part, &p, Direction::Min, &opts(16, i as u64)).unwrap().value;
        let hi = convex_roof(&rho, &part, &p, Direction::Max, &opts(16, i as u64)).unwrap().value;
        assert!(lo <= hi);
        for _ in 0..100 {
            let avg = random_ensemble_average(&rho, &p, &mut rng);
            assert!(lo <= avg + 1e-9 && avg <= hi + 1e-9, "({q},{s}): {lo} <= {avg} <= {hi}");
        }
    }
}

fn local(u: &ComplexMatrix, v: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    let w = tensor_product(u, v).unwrap();
    let m = w.matmul(rho.matrix()).unwrap().matmul(&w.adjoint()).unwrap();
    DensityMatrix::new(vec![2, 2], m).unwrap()
}

#[test]
fn ue_is_local_unitary_invariant() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x10CA1);
    let p = EntropyParams::new(2.5, 0.5).unwrap();
    for i in 0..10u64 {
        let rho = ginibre_mixed(4, 2, 500 + i).unwrap();
        let base = ue_two_qubit(&rho, &p, &opts(8, i)).unwrap();
        for j in 0..10u64 {
            let (u, v) = (haar_random_unitary(2, &mut rng), haar_random_unitary(2, &mut rng));
            let moved = ue_two_qubit(&local(&u, &v, &rho), &p, &opts(8, 100 * i + j)).unwrap();
            assert!((moved - base).abs() < 1e-6, "state {i}: {base} vs {moved}");
        }
    }
}
