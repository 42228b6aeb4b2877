use super::*;
use crate::algebra::{catalog, AlgebraName};
use crate::exactla::{complex_homology, rank, validate_complex};

fn alg(name: &str, base: BaseRing) -> Algebra {
    catalog(&name.parse().unwrap(), base).unwrap()
}

fn dims(c: &ChainComplex, upto: i64) -> Vec<usize> {
    (0..upto).map(|d| complex_homology(c, d).unwrap().dimension().unwrap()).collect()
}

#[test]
fn identities_hold_for_catalog_algebras() {
    let f3 = BaseRing::PrimeField(3);
    let cases = [
        ("ground-field", 4),
        ("dual-numbers", 4),
        ("truncated-poly:3", 3),
        ("group-algebra:3", 3),
        ("matrix-algebra:2", 2),
    ];
    for (name, n) in cases {
        let x = cyclic_bar_module(&alg(name, f3), n + 1);
        check_cyclic_identities(&x, n).unwrap_or_else(|e| panic!("{name}: {e}"));
        check_differential_identities(&x, n).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let f4 = catalog(&AlgebraName::FieldExtension(vec![1, 1, 1]), BaseRing::PrimeField(2)).unwrap();
    check_cyclic_identities(&cyclic_bar_module(&f4, 4), 3).unwrap();
}

#[test]
fn identities_over_integers() {
    let x = cyclic_bar_module(&alg("dual-numbers", BaseRing::Integers), 4);
    check_cyclic_identities(&x, 3).unwrap();
    check_differential_identities(&x, 4).unwrap();
}

#[test]
fn corrupted_raw_module_is_caught() {
    let x = cyclic_bar_module(&alg("dual-numbers", BaseRing::Rationals), 3);
    let ranks: Vec<usize> = (0..=3).map(|n| x.rank(n)).collect();
    let faces = (0..=3).map(|n| if n == 0 { vec![] } else { (0..=n).map(|i| (*x.face(n, i).unwrap()).clone()).collect() }).collect();
    let degeneracies = (0..3).map(|n| (0..=n).map(|j| (*x.degeneracy(n, j).unwrap()).clone()).collect()).collect();
    let mut cyclic: Vec<ExactMatrix> = (0..=3).map(|n| (*x.cyclic_op(n).unwrap()).clone()).collect();
    let raw = RawCyclic { ranks, faces, degeneracies, cyclic: cyclic.clone() };
    let good = CyclicModule::from_raw(x.base(), raw.clone()).unwrap();
    check_cyclic_identities(&good, 3).unwrap();
    // drop the sign of t_2
    cyclic[2] = cyclic[2].neg();
    let bad = CyclicModule::from_raw(BaseRing::Rationals, RawCyclic { cyclic, ..raw }).unwrap();
    assert!(matches!(check_cyclic_identities(&bad, 3), Err(CyclicError::IdentityViolation { .. })));
}

#[test]
fn ranks_of_bar_modules() {
    let x = cyclic_bar_module(&alg("matrix-algebra:2", BaseRing::PrimeField(3)), 5);
    assert_eq!((0..=5).map(|n| x.rank(n)).collect::<Vec<_>>(), vec![4, 16, 64, 256, 1024, 4096]);
    let nm = normalized(&x).unwrap();
    assert_eq!((0..=3).map(|n| ChainSource::rank(&nm, n)).collect::<Vec<_>>(), vec![4, 12, 36, 108]);
    assert_eq!(nm.nondegenerate_indices(2).len(), 36);
    assert!(matches!(x.face(6, 0), Err(CyclicError::OutOfRange { .. })));
}

#[test]
fn hochschild_of_dual_numbers() {
    // HH_n(k[x]/x^2): A/(2x) in odd degrees, Ann(2x) in even degrees ≥ 2
    for (p, expected) in [(3u64, vec![2, 1, 1, 1, 1]), (2, vec![2, 2, 2, 2, 2])] {
        let x = cyclic_bar_module(&alg("dual-numbers", BaseRing::PrimeField(p)), 6);
        let c = hochschild_complex(&x, 6).unwrap();
        assert!(validate_complex(&c).passed);
        assert_eq!(dims(&c, 5), expected, "p = {p}");
    }
}

#[test]
fn normalized_and_unnormalized_hochschild_agree() {
    for (name, base, n) in [
        ("dual-numbers", BaseRing::PrimeField(3), 5),
        ("truncated-poly:3", BaseRing::Rationals, 4),
        ("matrix-algebra:2", BaseRing::PrimeField(3), 3),
        ("group-algebra:2", BaseRing::PrimeField(2), 5),
    ] {
        let x = cyclic_bar_module(&alg(name, base), n);
        let nm = normalized(&x).unwrap();
        check_differential_identities(&nm, n).unwrap();
        let full = hochschild_complex(&x, n).unwrap();
        let red = hochschild_complex(&nm, n).unwrap();
        assert_eq!(dims(&full, n as i64), dims(&red, n as i64), "{name}");
    }
}

#[test]
fn cyclic_operator_does_not_descend() {
    let x = cyclic_bar_module(&alg("dual-numbers", BaseRing::PrimeField(3)), 3);
    let nm = normalized(&x).unwrap();
    assert!(nm.hochschild_b(2).is_ok());
    assert!(matches!(nm.bar_b(2), Err(CyclicError::QuotientIllDefined { .. })));
    assert!(matches!(nm.cyclic_op(1), Err(CyclicError::QuotientIllDefined { .. })));
    assert!(matches!(nm.cyclic_op(2), Err(CyclicError::QuotientIllDefined { .. })));
}

#[test]
fn bar_complex_is_acyclic() {
    for (name, base) in [("dual-numbers", BaseRing::PrimeField(5)), ("matrix-algebra:2", BaseRing::PrimeField(3))] {
        let n = if name.starts_with("matrix") { 3 } else { 5 };
        let x = cyclic_bar_module(&alg(name, base), n);
        let c = bar_complex(&x, n).unwrap();
        assert!(dims(&c, n as i64).iter().all(|&d| d == 0), "{name}");
    }
}

/// Homology of the coinvariant complex `X / (1 − t)` with b; agrees with HC in characteristic 0.
fn connes_quotient_dims(x: &CyclicModule, upto: usize) -> Vec<usize> {
    let omt = |n: usize| (*x.one_minus_t(n).unwrap()).clone();
    let q = |n: usize| x.rank(n) - rank(&omt(n));
    // rank of b_n induced on the quotient
    let rk = |n: usize| {
        if n == 0 {
            return 0;
        }
        let stacked = x.hochschild_b(n).unwrap().hstack(&omt(n - 1)).unwrap();
        rank(&stacked) - rank(&omt(n - 1))
    };
    (0..upto).map(|n| q(n) - rk(n) - rk(n + 1)).collect()
}

#[test]
fn cyclic_homology_over_rationals_matches_the_connes_quotient() {
    for name in ["ground-field", "dual-numbers", "truncated-poly:3", "group-algebra:2"] {
        let n = 5;
        let x = cyclic_bar_module(&alg(name, BaseRing::Rationals), n + 1);
        let mc = mixed_complex(&x, n + 1).unwrap();
        assert!(mc.validate().passed);
        let tot = cyclic_total(&mc, 0, n as i64 + 1).unwrap();
        assert!(validate_complex(&tot).passed);
        assert_eq!(dims(&tot, n as i64), connes_quotient_dims(&x, n), "{name}");
    }
    let x = cyclic_bar_module(&alg("ground-field", BaseRing::Rationals), 7);
    let tot = cyclic_total(&mixed_complex(&x, 7).unwrap(), 0, 7).unwrap();
    assert_eq!(dims(&tot, 6), vec![1, 0, 1, 0, 1, 0]);
}

#[test]
fn normalized_mixed_complex_gives_the_same_cyclic_homology() {
    let x = cyclic_bar_module(&alg("dual-numbers", BaseRing::PrimeField(2)), 5);
    let nm = normalized(&x).unwrap();
    let full = cyclic_total(&mixed_complex(&x, 5).unwrap(), 0, 5).unwrap();
    let red = cyclic_total(&mixed_complex(&nm, 5).unwrap(), 0, 5).unwrap();
    assert_eq!(dims(&full, 4), dims(&red, 4));
}
