use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::algebra::{catalog, commutator_quotient, AlgebraName};
use crate::cyclic::cyclic_bar_module;
use crate::exactla::{complex_homology, homology_map, rank, validate_complex};

fn module(name: &str, base: BaseRing, n: usize) -> Arc<CyclicModule> {
    Arc::new(cyclic_bar_module(&catalog(&name.parse().unwrap(), base).unwrap(), n))
}

fn field_ext(coeffs: &[i64], p: u64, n: usize) -> Arc<CyclicModule> {
    let a = catalog(&AlgebraName::FieldExtension(coeffs.to_vec()), BaseRing::PrimeField(p)).unwrap();
    Arc::new(cyclic_bar_module(&a, n))
}

fn dims(t: &HomologyTable) -> Vec<Option<usize>> {
    t.entries.iter().map(|e| e.group.as_ref().and_then(|g| g.dimension())).collect()
}

fn even_pattern(degrees: std::ops::RangeInclusive<i64>, v: usize) -> Vec<Option<usize>> {
    degrees.map(|d| Some(if d % 2 == 0 { v } else { 0 })).collect()
}

#[test]
fn windows_validate() {
    build_window(module("ground-field", BaseRing::PrimeField(3), 6), -4, 4, 6).unwrap();
    build_window(module("dual-numbers", BaseRing::PrimeField(2), 10), -6, 6, 10).unwrap();
    for name in ["dual-numbers", "truncated-poly:3", "group-algebra:3", "matrix-algebra:2"] {
        for base in [BaseRing::PrimeField(3), BaseRing::Rationals, BaseRing::Integers] {
            build_window(module(name, base, 3), -3, 3, 3).unwrap_or_else(|e| panic!("{name}/{base}: {e}"));
        }
    }
}

#[test]
fn flipped_bar_sign_is_caught() {
    // over the ground field b′ and 1 − t never overlap, so the flip is invisible there
    let x = module("ground-field", BaseRing::PrimeField(3), 4);
    assert!(build_window_with(x, -2, 2, 4, SignConvention::FlippedBarSign).is_ok());
    let x = module("dual-numbers", BaseRing::PrimeField(3), 4);
    match build_window_with(x, -2, 2, 4, SignConvention::FlippedBarSign) {
        Err(BicomplexError::WindowIdentity { identity, .. }) => assert_eq!(identity, "d_h d_v + d_v d_h = 0"),
        other => panic!("expected an anticommutation witness, got {other:?}"),
    }
}

#[test]
fn window_needs_materialized_rows() {
    let x = module("ground-field", BaseRing::PrimeField(3), 2);
    assert!(build_window(x, 0, 1, 3).is_err());
}

#[test]
fn truncation_ranks_count_lattice_points() {
    let x = module("ground-field", BaseRing::PrimeField(5), 4);
    let t = row_truncated_total(&x, Region::FullPlane, 0, 0..=0).unwrap();
    assert_eq!(t.complex.rank(0), 1);
    let t = row_truncated_total(&x, Region::FullPlane, 2, -2..=2).unwrap();
    for d in -2..=2 {
        assert_eq!(t.complex.rank(d), 3);
    }
    assert!(validate_complex(&t.complex).passed);
}

#[test]
fn inclusions_compose() {
    let x = module("dual-numbers", BaseRing::PrimeField(3), 4);
    let t: Vec<TruncatedTotal> = (2..=4).map(|q| row_truncated_total(&x, Region::FullPlane, q, -1..=2).unwrap()).collect();
    let i23 = inclusion_map(&t[0], &t[1]).unwrap();
    let i34 = inclusion_map(&t[1], &t[2]).unwrap();
    let i24 = inclusion_map(&t[0], &t[2]).unwrap();
    for (f, a, b) in [(&i23, 0, 1), (&i34, 1, 2), (&i24, 0, 2)] {
        assert!(f.validate(&t[a].complex, &t[b].complex).passed);
    }
    let composed = i23.then(&i34, &t[0].complex, &t[1].complex, &t[2].complex).unwrap();
    for d in -2..=3 {
        assert_eq!(composed.component(d, &t[0].complex, &t[2].complex), i24.component(d, &t[0].complex, &t[2].complex));
    }
}

/// Image ranks from the rank formula against explicit induced maps.
#[test]
fn tower_ranks_match_induced_maps() {
    let x = module("dual-numbers", BaseRing::PrimeField(3), 5);
    let schedule = [2, 3, 5];
    let table = hp_poly_with(&x, 0..=1, &schedule, 2, Engine::Direct).unwrap();
    let t: Vec<TruncatedTotal> =
        schedule.iter().map(|&q| row_truncated_total(&x, Region::FullPlane, q, 0..=1).unwrap()).collect();
    for d in 0..=1 {
        let rep = table.entry(d).unwrap().report.as_ref().unwrap();
        for a in 0..3 {
            assert_eq!(rep.image_ranks[a][a], complex_homology(&t[a].complex, d).unwrap().free_rank);
            for b in a + 1..3 {
                let m = homology_map(&inclusion_map(&t[a], &t[b]).unwrap(), &t[a].complex, &t[b].complex, d).unwrap();
                assert_eq!(rep.image_ranks[a][b], rank(&m), "d = {d}, q {} -> {}", schedule[a], schedule[b]);
            }
        }
    }
}

fn image_ranks(t: &HomologyTable) -> Vec<Vec<Vec<usize>>> {
    t.entries.iter().map(|e| e.report.as_ref().unwrap().image_ranks.clone()).collect()
}

fn engines_agree(x: &Arc<CyclicModule>, schedule: &[usize]) {
    let degrees = -2..=3;
    let direct = hp_poly_with(x, degrees.clone(), schedule, 2, Engine::Direct).unwrap();
    let reduced = hp_poly_with(x, degrees, schedule, 2, Engine::Reduced).unwrap();
    assert_eq!(image_ranks(&direct), image_ranks(&reduced), "{x:?}");
}

#[test]
fn reduced_engine_matches_direct() {
    for p in [2, 3, 5] {
        engines_agree(&module("ground-field", BaseRing::PrimeField(p), 7), &[1, 2, 3, 5, 7]);
        engines_agree(&module("dual-numbers", BaseRing::PrimeField(p), 5), &[1, 2, 3, 4, 5]);
    }
    engines_agree(&field_ext(&[1, 1, 1], 2, 5), &[1, 2, 4, 5]);
    engines_agree(&field_ext(&[1, 0, 1], 3, 4), &[1, 2, 3, 4]);
    engines_agree(&module("group-algebra:3", BaseRing::PrimeField(3), 4), &[1, 2, 3, 4]);
    engines_agree(&module("truncated-poly:3", BaseRing::PrimeField(2), 4), &[1, 2, 3, 4]);
    engines_agree(&module("matrix-algebra:2", BaseRing::PrimeField(3), 3), &[1, 2, 3]);
}

#[test]
fn reduced_engine_needs_a_prime_field_bar_module() {
    let x = module("ground-field", BaseRing::Rationals, 4);
    assert!(matches!(hp_poly_with(&x, 0..=0, &[2, 4], 2, Engine::Reduced), Err(BicomplexError::NeedsField(_))));
    let z = module("ground-field", BaseRing::Integers, 4);
    assert!(matches!(hp_poly(&z, 0..=0, &[2, 4], 2), Err(BicomplexError::NeedsField(_))));
}

#[test]
fn generator_rows_of_ground_fields() {
    // k with C_{q+1} acting by (−1)^q: nonzero Tate homology iff p | q + 1 and the action is trivial
    let x = module("ground-field", BaseRing::PrimeField(3), 14);
    let r = super::reduced::ReducedSource::new(&x, 14).unwrap();
    assert_eq!(r.generator_rows(), &[2, 8, 14]);
    let x = module("ground-field", BaseRing::PrimeField(2), 6);
    let r = super::reduced::ReducedSource::new(&x, 6).unwrap();
    assert_eq!(r.generator_rows(), &[1, 3, 5]);
}

#[test]
fn bad_schedules_are_rejected() {
    let x = module("ground-field", BaseRing::PrimeField(3), 4);
    assert!(matches!(hp_poly(&x, 0..=0, &[], 3), Err(BicomplexError::BadSchedule(_))));
    assert!(matches!(hp_poly(&x, 0..=0, &[4, 2], 3), Err(BicomplexError::BadSchedule(_))));
    assert!(matches!(hp_poly(&x, 0..=0, &[2, 4], 1), Err(BicomplexError::BadSchedule(_))));
}

#[test]
fn hp_poly_of_prime_fields() {
    for p in [2, 3, 5] {
        let x = module("ground-field", BaseRing::PrimeField(p), 1);
        let t = hp_poly(&x, -2..=3, &default_schedule(), 3).unwrap();
        assert_eq!(dims(&t), even_pattern(-2..=3, 1), "p = {p}");
        assert!(t.is_contiguous());
    }
}

#[test]
fn hp_poly_over_rationals_dies() {
    let x = module("ground-field", BaseRing::Rationals, 1);
    let t = hp_poly(&x, -1..=2, &[2, 4, 6, 8, 10, 12], 3).unwrap();
    assert_eq!(dims(&t), vec![Some(0); 4]);
    for e in &t.entries {
        let rep = e.report.as_ref().unwrap();
        for death in &rep.deaths {
            let dead = death.all_dead_q.expect("every class dies");
            assert!(dead - death.born_q <= 8);
        }
    }
}

#[test]
fn hp_poly_of_dual_numbers_reports_a_verdict() {
    let x = module("dual-numbers", BaseRing::PrimeField(3), 1);
    let t = hp_poly(&x, 0..=0, &[2, 4, 6, 8], 2).unwrap();
    let rep = t.entries[0].report.as_ref().unwrap();
    assert_eq!(rep.tower.len(), 4);
    match &rep.verdict {
        Verdict::Stabilized { value, .. } => assert_eq!(t.dimension(0), Some(*value)),
        Verdict::NotStabilized { reason, .. } => {
            assert!(!reason.is_empty());
            assert_eq!(t.dimension(0), None);
        }
    }
}

#[test]
fn hc_zero_is_the_commutator_quotient() {
    for base in [BaseRing::PrimeField(3), BaseRing::Rationals] {
        for name in ["ground-field", "dual-numbers", "truncated-poly:3", "group-algebra:3", "matrix-algebra:2"] {
            let a = catalog(&name.parse().unwrap(), base).unwrap();
            let x = Arc::new(cyclic_bar_module(&a, 1));
            let t = hc(&x, 0, HcRoute::Normalized).unwrap();
            assert_eq!(t.dimension(0), Some(commutator_quotient(&a).unwrap()), "{name}/{base}");
        }
    }
}

#[test]
fn hc_routes_agree() {
    for (name, base, d_max) in [
        ("dual-numbers", BaseRing::PrimeField(3), 4),
        ("dual-numbers", BaseRing::PrimeField(2), 4),
        ("group-algebra:2", BaseRing::Rationals, 3),
        ("dual-numbers", BaseRing::Integers, 3),
    ] {
        let x = module(name, base, 1);
        let a = hc(&x, d_max, HcRoute::Normalized).unwrap();
        let b = hc(&x, d_max, HcRoute::Mixed).unwrap();
        let c = hc(&x, d_max, HcRoute::Bicomplex).unwrap();
        assert_eq!(a, b, "{name}/{base}");
        assert_eq!(b, c, "{name}/{base}");
    }
}

#[test]
fn hc_of_prime_field() {
    let x = module("ground-field", BaseRing::PrimeField(5), 1);
    let t = hc(&x, 10, HcRoute::Bicomplex).unwrap();
    assert_eq!(dims(&t), even_pattern(0..=10, 1));
}

#[test]
fn hc_morita_matrix_algebra() {
    let f3 = BaseRing::PrimeField(3);
    let g = hc(&module("ground-field", f3, 1), 5, HcRoute::Normalized).unwrap();
    let m = hc(&module("matrix-algebra:2", f3, 1), 5, HcRoute::Normalized).unwrap();
    assert_eq!(dims(&g), dims(&m));
}

#[test]
fn s_maps_of_ground_field() {
    for base in [BaseRing::PrimeField(2), BaseRing::PrimeField(3), BaseRing::Rationals] {
        let x = module("ground-field", base, 1);
        let s = sbi_s_map(&x, 0, 1).unwrap();
        assert_eq!((s.source.free_rank, s.target.free_rank), (1, 1));
        assert!(s.is_iso());
        let odd = sbi_s_map(&x, 1, 1).unwrap();
        assert!(odd.source.is_zero() && odd.target.is_zero() && odd.matrix.is_zero());
    }
}

#[test]
fn s_maps_compose() {
    for (name, base) in [("dual-numbers", BaseRing::PrimeField(2)), ("ground-field", BaseRing::Rationals)] {
        let x = module(name, base, 1);
        for d in 0..=1 {
            let s2 = s_power_map(&x, d, 2, 2).unwrap();
            let upper = sbi_s_map(&x, d, 2).unwrap();
            let lower = sbi_s_map(&x, d, 1).unwrap();
            assert_eq!(lower.matrix.mul(&upper.matrix).unwrap(), s2.matrix, "{name} d = {d}");
        }
    }
}

#[test]
fn hp_via_s_tower_over_rationals_is_nonzero() {
    let x = module("ground-field", BaseRing::Rationals, 1);
    for d in [-4, -1, 0, 3, 6] {
        let r = hp_via_s_tower(&x, d, 3, 3).unwrap();
        assert_eq!(r.verdict.value(), Some(if d % 2 == 0 { 1 } else { 0 }), "d = {d}");
    }
    assert!(hp_via_s_tower(&x, 0, 2, 3).is_err());
}

#[test]
fn hc_minus_poly_of_prime_field() {
    let x = module("ground-field", BaseRing::PrimeField(3), 1);
    let t = hc_minus_poly(&x, 0..=2, &default_schedule(), 3).unwrap();
    assert_eq!(t.dimension(0), Some(1));
    assert_eq!(t.dimension(2), Some(0));
}

#[test]
fn fiber_sequence_is_exact() {
    for (base, q) in [(BaseRing::Rationals, 8), (BaseRing::PrimeField(2), 6), (BaseRing::PrimeField(3), 9)] {
        let x = module("ground-field", base, q);
        let r = fiber_bookkeeping(&x, -3..=5, q).unwrap();
        assert!(r.passed, "{base}: {:?}", r.rows);
    }
    let x = module("dual-numbers", BaseRing::PrimeField(3), 3);
    assert!(fiber_bookkeeping(&x, -1..=2, 3).unwrap().passed);
}

#[test]
fn conjugate_check_of_prime_field() {
    let x = module("ground-field", BaseRing::PrimeField(3), 1);
    let r = conjugate_dimension_check(&x, -2..=3, &default_schedule(), 3, 4).unwrap();
    assert!(r.passed && r.all_equal, "{r:?}");
    assert_eq!(r.hh_dims, vec![1, 0, 0, 0, 0]);
}

#[test]
fn conjugate_check_refuses_unbounded_hh() {
    let x = module("dual-numbers", BaseRing::PrimeField(3), 1);
    assert!(matches!(
        conjugate_dimension_check(&x, 0..=1, &[2, 4], 2, 4),
        Err(BicomplexError::HhUnbounded { .. })
    ));
}

const SMALL: [&str; 4] = ["ground-field", "dual-numbers", "group-algebra:2", "truncated-poly:3"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn windows_validate_for_catalog_algebras(k in 0..SMALL.len(), pi in 0..3usize, p_lo in -4i64..0, width in 0i64..5, q in 0usize..4) {
        let p = [2, 3, 5][pi];
        let x = module(SMALL[k], BaseRing::PrimeField(p), q);
        prop_assert!(build_window(x, p_lo, p_lo + width, q).is_ok());
    }

    #[test]
    fn engines_agree_on_random_schedules(k in 0..SMALL.len(), pi in 0..3usize, steps in proptest::collection::vec(1usize..3, 2..4)) {
        let p = [2, 3, 5][pi];
        let mut schedule = Vec::new();
        let mut q = 0;
        for s in steps {
            q += s;
            schedule.push(q);
        }
        let x = module(SMALL[k], BaseRing::PrimeField(p), q);
        let direct = hp_poly_with(&x, -1..=2, &schedule, 2, Engine::Direct).unwrap();
        let reduced = hp_poly_with(&x, -1..=2, &schedule, 2, Engine::Reduced).unwrap();
        prop_assert_eq!(image_ranks(&direct), image_ranks(&reduced));
    }
}
