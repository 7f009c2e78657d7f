use proptest::prelude::*;

use zerosum::engine::constants::{davenport, ConstantKind};
use zerosum::engine::search::Symmetry;
use zerosum::engine::{is_zero_sum_free, shortest_zero_sum, SearchConfig};
use zerosum::extraction::{greedy_extract, validate_system};
use zerosum::fourier::zero_sum_counts;
use zerosum::group::groups_of_order;
use zerosum::verifier::{verify_p2count, VerificationReport};
use zerosum::witness::{load_witness, store_witness, WitnessRecord};
use zerosum::{AbelianGroup, Sequence};

fn small_groups() -> Vec<AbelianGroup> {
    (1..=36).flat_map(groups_of_order).collect()
}

fn group_strategy() -> impl Strategy<Value = AbelianGroup> {
    let groups = small_groups();
    (0..groups.len()).prop_map(move |i| groups[i].clone())
}

fn sequence_strategy(max_len: usize) -> impl Strategy<Value = Sequence> {
    group_strategy().prop_flat_map(move |g| {
        let n = g.order();
        prop::collection::vec(0..n, 0..=max_len)
            .prop_map(move |terms| Sequence::from_indices(&g, terms).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms(g in group_strategy(), seeds in prop::array::uniform3(any::<u32>())) {
        let n = g.order();
        let [a, b, c] = seeds.map(|s| s as usize % n);
        prop_assert_eq!(g.add(a, b), g.add(b, a));
        prop_assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
        prop_assert_eq!(g.add(a, g.zero()), a);
        prop_assert_eq!(g.add(a, g.neg(a)), g.zero());
        prop_assert_eq!(g.index_of(&g.coords(a)).unwrap(), a);
        prop_assert_eq!(g.scalar_mul(g.element_order(a) as i64, a), g.zero());
        prop_assert_eq!(g.exponent() % g.element_order(a), 0);
    }

    #[test]
    fn canonical_form_is_order_preserving(moduli in prop::collection::vec(1i64..=12, 0..4)) {
        let g = AbelianGroup::canonicalize(&moduli).unwrap();
        let order: i64 = moduli.iter().product();
        prop_assert_eq!(g.order() as i64, order);
        let f = g.invariant_factors();
        prop_assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
        let mut rev = moduli.clone();
        rev.reverse();
        prop_assert_eq!(AbelianGroup::canonicalize(&rev).unwrap(), g.clone());
        let reparsed: AbelianGroup = g.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, g);
    }

    #[test]
    fn shortest_zero_sum_is_a_minimal_zero_sum(s in sequence_strategy(14)) {
        let counts = zero_sum_counts(&s);
        let first = (1..counts.len()).find(|&l| counts[l] > 0u32.into());
        match shortest_zero_sum(&s, None) {
            Some((len, w)) => {
                prop_assert_eq!(Some(len), first);
                prop_assert_eq!(w.len(), len);
                prop_assert!(w.is_zero_sum() && s.contains(&w));
            }
            None => {
                prop_assert_eq!(first, None);
                prop_assert!(is_zero_sum_free(&s));
            }
        }
    }

    #[test]
    fn greedy_system_is_valid(s in sequence_strategy(16)) {
        let sys = greedy_extract(&s, None);
        prop_assert!(validate_system(&sys, None).is_ok());
        prop_assert!(is_zero_sum_free(sys.leftover()));
    }

    #[test]
    fn automorphisms_preserve_short_zero_sums(p in prop::sample::select(vec![2u64, 3]), terms in prop::collection::vec(0usize..9, 0..10), pick in any::<u32>()) {
        let g = AbelianGroup::elementary(p, 2).unwrap();
        let s = Sequence::from_indices(&g, terms.into_iter().map(|t| t % g.order())).unwrap();
        let autos = g.linear_automorphisms().unwrap();
        let image = s.map(&autos[pick as usize % autos.len()]);
        let len = |x: &Sequence| shortest_zero_sum(x, None).map(|(l, _)| l);
        prop_assert_eq!(len(&s), len(&image));
    }

    #[test]
    fn report_json_round_trip(dmax in 3u32..12) {
        let r: VerificationReport = verify_p2count(dmax).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn symmetry_reduction_is_sound() {
    for g in (2..=16).flat_map(groups_of_order) {
        let values: Vec<u64> = [Symmetry::None, Symmetry::CoordinatePermutations, Symmetry::Linear]
            .into_iter()
            .map(|symmetry| davenport(&g, &SearchConfig { symmetry, ..SearchConfig::default() }).unwrap().value)
            .collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]), "{g}: {values:?}");
    }
}

#[test]
fn witness_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["2x4", "3^2", "6"] {
        let g: AbelianGroup = spec.parse().unwrap();
        for kind in [ConstantKind::Davenport, ConstantKind::Eta] {
            let r = zerosum::engine::constants::compute(&g, kind, &SearchConfig::default()).unwrap();
            let rec = WitnessRecord::from_constant(&r);
            let path = store_witness(dir.path(), &rec).unwrap();
            let (loaded, warnings) = load_witness(&path).unwrap();
            assert_eq!(loaded, rec);
            assert!(warnings.is_empty());
        }
    }
}

#[test]
fn tampered_witness_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let g: AbelianGroup = "3^2".parse().unwrap();
    let r = davenport(&g, &SearchConfig::default()).unwrap();
    let mut rec = WitnessRecord::from_constant(&r);
    if let zerosum::witness::WitnessBody::Constant { sequence, .. } = &mut rec.body {
        sequence[0] = vec![0, 0];
    }
    rec.recompute_digest();
    let path = store_witness(dir.path(), &rec).unwrap();
    assert!(load_witness(&path).is_err());
}
