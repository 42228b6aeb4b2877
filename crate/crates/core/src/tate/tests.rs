use proptest::prelude::*;

use super::*;

const Z: BaseRing = BaseRing::Integers;

fn cyclic_group(n: i64) -> HomologyGroup {
    if n == 1 {
        HomologyGroup::zero(Z)
    } else {
        HomologyGroup::integral(0, vec![n])
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn tate_table(m: &GModuleComplex, degrees: RangeInclusive<i64>) -> Vec<(i64, HomologyGroup)> {
    let p = complete_resolution_cyclic(m.base, m.n).unwrap();
    tate_complex(m, &p, degrees).unwrap().table().unwrap()
}

#[test]
fn small_resolutions() {
    let p1 = complete_resolution_cyclic(Z, 1).unwrap();
    assert_eq!(p1.sigma(), &ExactMatrix::identity(Z, 1));
    assert!(p1.differential(0).is_zero());
    assert_eq!(p1.differential(1), &ExactMatrix::identity(Z, 1));
    let p2 = complete_resolution_cyclic(Z, 2).unwrap();
    assert_eq!(p2.differential(0).to_i64_rows().unwrap(), vec![vec![-1, 1], vec![1, -1]]);
    assert_eq!(p2.differential(-3).to_i64_rows().unwrap(), vec![vec![1, 1], vec![1, 1]]);
    assert_eq!(p2.augmentation().to_i64_rows().unwrap(), vec![vec![1], vec![1]]);
    assert!(complete_resolution_cyclic(Z, 0).is_err());
}

#[test]
fn resolution_is_acyclic_over_integers_and_fields() {
    for base in [Z, BaseRing::PrimeField(2), BaseRing::PrimeField(3), BaseRing::Rationals] {
        let p = complete_resolution_cyclic(base, 6).unwrap();
        let w = p.window(-5, 5);
        for d in -4..=4 {
            assert!(complex_homology(&w, d).unwrap().is_zero(), "{base:?} degree {d}");
        }
    }
}

#[test]
fn trivial_integers_give_z_mod_n_in_even_degrees() {
    for n in [2usize, 3, 4, 6] {
        for (d, g) in tate_table(&GModuleComplex::trivial(Z, n).unwrap(), -6..=6) {
            let expected = if d % 2 == 0 { cyclic_group(n as i64) } else { HomologyGroup::zero(Z) };
            assert_eq!(g, expected, "n = {n}, d = {d}");
        }
    }
}

#[test]
fn trivial_prime_field_depends_on_divisibility() {
    for (p, n) in [(2u64, 4usize), (3, 6), (5, 3)] {
        let base = BaseRing::PrimeField(p);
        let dim = usize::from(n as u64 % p == 0);
        for (d, g) in tate_table(&GModuleComplex::trivial(base, n).unwrap(), -4..=4) {
            assert_eq!(g.dimension(), Some(dim), "p = {p}, n = {n}, d = {d}");
        }
    }
}

#[test]
fn norm_oracle_on_known_modules() {
    let z4 = norm_oracle(&PresentedGModule::free(GModule::trivial(Z, 1)), 4).unwrap();
    assert_eq!(z4.h0, cyclic_group(4));
    assert!(z4.h_minus_1.is_zero());
    for n in [2usize, 3, 6] {
        let q = norm_oracle(&PresentedGModule::trivial_quotient(n as i64), n).unwrap();
        assert_eq!(q.h0, cyclic_group(n as i64));
        assert_eq!(q.h_minus_1, cyclic_group(n as i64));
    }
    let free = norm_oracle(&PresentedGModule::free(GModule::free(Z, 3)), 3).unwrap();
    assert!(free.h0.is_zero() && free.h_minus_1.is_zero());
}

#[test]
fn tate_complex_agrees_with_norm_oracle() {
    for n in 2usize..=8 {
        let modules = [
            (GModuleComplex::trivial(Z, n).unwrap(), PresentedGModule::free(GModule::trivial(Z, 1))),
            (GModuleComplex::free(Z, n).unwrap(), PresentedGModule::free(GModule::free(Z, n))),
            (GModuleComplex::trivial_quotient(Z, n, 2).unwrap(), PresentedGModule::trivial_quotient(2)),
        ];
        for (m, presented) in modules {
            let oracle = norm_oracle(&presented, n).unwrap();
            let t = tate_table(&m, 0..=1);
            assert_eq!(t[0].1, oracle.h0, "n = {n}, degree 0");
            assert_eq!(t[1].1, oracle.h_minus_1, "n = {n}, degree −1");
        }
    }
}

#[test]
fn free_modules_are_acyclic() {
    for n in [2usize, 5] {
        let m = GModuleComplex::free(Z, n).unwrap().direct_sum(&GModuleComplex::free(Z, n).unwrap()).unwrap();
        assert!(tate_table(&m, -4..=4).iter().all(|(_, g)| g.is_zero()));
    }
}

#[test]
fn two_term_sigma_minus_one_is_perfect() {
    for n in [2usize, 3, 4] {
        let m = GModuleComplex::sigma_minus_one(Z, n).unwrap();
        assert!(tate_table(&m, -4..=4).iter().all(|(_, g)| g.is_zero()), "n = {n}");
    }
}

#[test]
fn contractible_summands_change_nothing() {
    let n = 4;
    let m = GModuleComplex::trivial(Z, n).unwrap();
    let expected = tate_table(&m, -3..=3);
    for at in [-1i64, 0, 2] {
        let bigger = m.direct_sum(&GModuleComplex::contractible(Z, n, at).unwrap()).unwrap();
        assert_eq!(tate_table(&bigger, -3..=3), expected, "contractible at {at}");
    }
}

#[test]
fn transport_along_isomorphism_changes_nothing() {
    let n = 3;
    let m = GModuleComplex::trivial_quotient(Z, n, 3).unwrap().direct_sum(&GModuleComplex::free(Z, n).unwrap()).unwrap();
    // degree 0 has rank 4 (ℤ ⊕ ℤ[C_3]); shear by a unimodular equivariant map on the ℤ summand
    let mut phi = BTreeMap::new();
    let mut inv = BTreeMap::new();
    phi.insert(1, ExactMatrix::scalar_identity(Z, 1, Scalar::from_integer(-1)));
    inv.insert(1, ExactMatrix::scalar_identity(Z, 1, Scalar::from_integer(-1)));
    let shear = ExactMatrix::from_rows(Z, &[vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]]).unwrap();
    let shear_inv = ExactMatrix::from_rows(Z, &[vec![1, 0, 0, 0], vec![-1, 1, 0, 0], vec![-1, 0, 1, 0], vec![-1, 0, 0, 1]]).unwrap();
    phi.insert(0, shear);
    inv.insert(0, shear_inv);
    let moved = m.transport(&phi, &inv).unwrap();
    assert_eq!(tate_table(&moved, -3..=3), tate_table(&m, -3..=3));
}

#[test]
fn non_equivariant_differential_is_rejected() {
    let n = 2;
    let mut diffs = BTreeMap::new();
    diffs.insert(1, ExactMatrix::from_rows(Z, &[vec![1, 0]]).unwrap());
    let r = GModuleComplex::new(Z, n, 0, vec![GModule::trivial(Z, 1), GModule::free(Z, 2)], diffs);
    assert!(r.is_err());
}

#[test]
fn surjection_kernel_matches_model() {
    for n in [1u64, 2, 3, 6] {
        let r = surjection_kernel_check(n).unwrap();
        assert!(r.passed, "n = {n}: {:?}", r.witness);
        assert!(r.chain_map && r.surjective && r.kernel_d_zero);
        assert_eq!(r.kernel_index, vec![(-1, 1), (0, n as i64)]);
        assert_eq!(r.kernel_b[0][0].abs(), 1);
    }
    assert!(surjection_kernel_check(0).is_err());
}

#[test]
fn base_change_matches_quotient() {
    for n in [2usize, 3, 4] {
        let r = tate_base_change_check(n, -4..=4).unwrap();
        assert!(r.passed && r.oracle_agrees, "n = {n}");
        for row in &r.rows {
            assert_eq!(row.rhs, cyclic_group(n as i64), "n = {n}, d = {}", row.degree);
        }
    }
    assert!(tate_base_change_check(1, 0..=0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tate_homology_is_two_periodic(n in 2usize..6, m in 1i64..7, d in -3i64..3) {
        let c = GModuleComplex::trivial_quotient(Z, n, m).unwrap();
        let p = complete_resolution_cyclic(Z, n).unwrap();
        let t = tate_complex(&c, &p, d..=d + 2).unwrap();
        prop_assert_eq!(t.homology(d).unwrap(), t.homology(d + 2).unwrap());
    }

    #[test]
    fn trivial_quotient_matches_oracle(n in 2usize..7, m in 1i64..9) {
        let c = GModuleComplex::trivial_quotient(Z, n, m).unwrap();
        let oracle = norm_oracle(&PresentedGModule::trivial_quotient(m), n).unwrap();
        let t = tate_table(&c, 0..=1);
        prop_assert_eq!(&t[0].1, &oracle.h0);
        prop_assert_eq!(&t[1].1, &oracle.h_minus_1);
        // independent count: both are ℤ/gcd(n, m)
        let g = gcd(n as i64, m);
        prop_assert_eq!(&oracle.h0, &cyclic_group(g));
    }
}
