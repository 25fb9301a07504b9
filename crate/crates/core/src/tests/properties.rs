use std::sync::Arc;

use proptest::prelude::*;

use crate::address::Address;
use crate::coding::{to_named, to_named_derivation, to_preopetope, Namer};
use crate::complex::{check_identities, isomorphic, materialize};
use crate::counting::{count, count_oracle};
use crate::named::{alpha_equivalent, check_coherence, Var};
use crate::nset::os_repr;
use crate::preopetope::Preopetope;
use crate::textio::{
    named_script, parse_address, parse_ocmt, parse_preopetope, preopetope_from_json, preopetope_to_json, run_script,
    serialize_address, serialize_ocmt, Value,
};
use crate::unnamed::{check_units, derive, derive_in_random_order, Generator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn address(dim: usize) -> BoxedStrategy<Address> {
    match dim {
        0 => Just(Address::atom()).boxed(),
        d => prop::collection::vec(address(d - 1), 0..3)
            .prop_map(move |items| Address::seq(d, items).expect("entries one dimension down"))
            .boxed(),
    }
}

fn any_address() -> impl Strategy<Value = Address> {
    (0usize..4).prop_flat_map(address)
}

/// A generated opetope of dimension at most 4, keyed by seed.
fn opetope() -> impl Strategy<Value = Preopetope> {
    (any::<u64>(), 0usize..5).prop_map(|(seed, n)| Generator::new(seed).preopetope(n, 3))
}

fn rename_all(v: &Var) -> Var {
    Var { name: Arc::from(format!("{}_r", v.name).as_str()), tags: v.tags, dim: v.dim }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn address_text_round_trip(a in any_address()) {
        prop_assert_eq!(parse_address(&serialize_address(&a)).unwrap(), a);
    }

    #[test]
    fn concatenation_is_associative(a in address(2), b in address(2), c in address(2)) {
        let left = a.concat(&b).unwrap().concat(&c).unwrap();
        let right = a.concat(&b.concat(&c).unwrap()).unwrap();
        prop_assert!(a.is_prefix(&left).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn preopetope_text_and_json_round_trip(p in opetope()) {
        prop_assert_eq!(&parse_preopetope(&p.to_string()).unwrap(), &p);
        prop_assert_eq!(&preopetope_from_json(&preopetope_to_json(&p)).unwrap(), &p);
    }

    #[test]
    fn deciding_recovers_the_generated_sequent(seed in any::<u64>(), n in 0usize..6) {
        let s = Generator::new(seed).sequent(n, 3);
        let d = derive(&s.src).unwrap();
        prop_assert_eq!(&d, &s);
        let r = derive_in_random_order(&s.src, &mut ChaCha8Rng::seed_from_u64(seed ^ 1)).unwrap();
        prop_assert_eq!(r, s);
    }

    #[test]
    fn unit_laws(seed in any::<u64>(), n in 2usize..5) {
        let s = Generator::new(seed).sequent(n, 3);
        prop_assert!(check_units(&s).unwrap());
    }

    #[test]
    fn counting_matches_representable(p in opetope()) {
        prop_assert_eq!(count(&p).unwrap(), count_oracle(&p).unwrap());
    }

    #[test]
    fn named_round_trip(p in opetope()) {
        let (s, d) = to_named_derivation(&p, &mut Namer::default()).unwrap();
        prop_assert_eq!(&to_preopetope(&s).unwrap(), &p);
        check_coherence(&s).unwrap();
        let Value::Named(again) = run_script(&named_script(&d)).unwrap() else { panic!("named script") };
        prop_assert!(alpha_equivalent(&again, &s));
        prop_assert!(alpha_equivalent(&s.rename(&rename_all), &s));
    }

    #[test]
    fn representables_are_coherent_sets(p in opetope()) {
        let s = to_named(&p, &mut Namer::default()).unwrap();
        let o = os_repr(&s).unwrap();
        let c = materialize(&o).unwrap();
        check_identities(&c).unwrap();
        let text = serialize_ocmt(&o);
        let back = parse_ocmt(&text).unwrap();
        prop_assert_eq!(serialize_ocmt(&back), text);
        let renamed = materialize(&os_repr(&s.rename(&rename_all)).unwrap()).unwrap();
        prop_assert!(isomorphic(&c, &renamed));
    }
}
