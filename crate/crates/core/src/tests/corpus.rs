use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use crate::address::Address;
use crate::coding::to_preopetope;
use crate::complex::{check_identities, isomorphic, materialize, Complex};
use crate::preopetope::Preopetope;
use crate::textio::{parse_address, parse_preopetope, parse_script, run_script, serialize_address, Value};
use crate::uset::u_materialize;

fn corpus_dir() -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "corpus"].iter().collect()
}

fn read(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(name)).unwrap()
}

fn run(name: &str) -> Value {
    run_script(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn set(name: &str) -> Complex {
    match run(name) {
        Value::Set(o) => materialize(&o).unwrap(),
        Value::Context(c) => u_materialize(&c),
        v => panic!("{name} concluded {v}"),
    }
}

fn named_type(name: &str) -> String {
    match run(name) {
        Value::Named(s) => s.ty.to_string(),
        v => panic!("{name} concluded {v}"),
    }
}

fn two() -> Preopetope {
    let arrow = Preopetope::arrow();
    Preopetope::from_map(BTreeMap::from([(Address::empty(1), arrow.clone()), (Address::stars(1), arrow)])).unwrap()
}

#[test]
fn every_script_runs() {
    let mut seen = 0;
    for entry in fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        match path.extension().and_then(|e| e.to_str()) {
            Some("drv") => {
                parse_script(&text).and_then(|s| s.run()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            }
            Some("popt") => {
                parse_preopetope(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            }
            _ => continue,
        }
        seen += 1;
    }
    assert!(seen >= 18);
}

#[test]
fn address_examples() {
    let a = parse_address("[[][*]]").unwrap();
    let expected = Address::seq(2, vec![Address::empty(1), Address::stars(1)]).unwrap();
    assert_eq!(a, expected);
    assert_eq!(parse_address("*").unwrap(), Address::atom());
    assert!(parse_address("[]").is_err());
    assert_eq!(parse_address("[]:2").unwrap(), Address::empty(2));
    assert_eq!(serialize_address(&Address::empty(2)), "[]:2");
}

#[test]
fn preopetope_examples() {
    let p = parse_preopetope("let arrow = { * <- point }\n{ [] <- arrow; [*] <- arrow }").unwrap();
    assert_eq!(p, two());
    assert_eq!(parse_preopetope("point").unwrap(), Preopetope::Point);
    assert_eq!(parse_preopetope("degen{ point }").unwrap(), Preopetope::degen(Preopetope::Point));
    assert_eq!(parse_preopetope("♦").unwrap(), Preopetope::Point);
    let dup = parse_preopetope("{ [] <- arrow; [] <- arrow }").unwrap_err();
    assert!(dup.to_string().contains("duplicate"), "{dup}");
    let mixed = parse_preopetope("{ [] <- arrow; [*] <- point }").unwrap_err();
    assert!(mixed.to_string().contains("dimension"), "{mixed}");
}

#[test]
fn unnamed_omega() {
    let Value::Unnamed(s) = run("unnamed_classic.drv") else { panic!() };
    let omega = Preopetope::corolla(two()).improper_graft(&Address::stars(1).wrap(), two()).unwrap();
    assert_eq!(s.src, omega);
    assert_eq!(s.tgt, Some(Preopetope::integer(3)));
    let Value::Unnamed(s) = run("unnamed_integers.drv") else { panic!() };
    assert_eq!(s.src, Preopetope::integer(3));
    assert_eq!(s.tgt, Some(Preopetope::arrow()));
}

#[test]
fn named_conclusions() {
    assert_eq!(named_type("named_arrow.drv"), "a ~> 0");
    assert_eq!(named_type("named_integers.drv"), "g(b <- f) ~> a ~> 0");
    assert_eq!(named_type("named_classic.drv"), "beta(i <- alpha) ~> h(c <- g(b <- f)) ~> a ~> 0");
    assert_eq!(named_type("named_degenerate.drv"), "beta(f <- alpha) ~> g ~> a ~> 0");
    let Value::Named(d) = run("named_degenerate.drv") else { panic!() };
    let (a, b) = (d.find_var("a").unwrap(), d.find_var("b").unwrap());
    assert!(d.theory.eq(&a, &b));
    let Value::Named(c) = run("named_classic.drv") else { panic!() };
    let omega = Preopetope::corolla(two()).improper_graft(&Address::stars(1).wrap(), two()).unwrap();
    assert_eq!(to_preopetope(&c).unwrap(), omega);
}

#[test]
fn folded_classic_context() {
    let Value::Context(c) = run("uset_classic_folded.drv") else { panic!() };
    let names: Vec<&str> = c.cells.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["a", "f", "alpha", "beta", "A"]);
    let a = c.get("A").unwrap();
    assert_eq!(a.tgt.as_deref(), Some("beta"));
    assert!(a.srcs.values().all(|s| s == "alpha"));
    assert_eq!(a.srcs.len(), 2);
    check_identities(&u_materialize(&c)).unwrap();
}

#[test]
fn opetopic_sets_materialize() {
    for n in ["set_repr_glue.drv", "set_two_cells.drv", "set_hand_written.drv", "mixed_glue.drv", "mixed_two_cells.drv"] {
        check_identities(&set(n)).unwrap_or_else(|e| panic!("{n}: {e}"));
    }
    for n in ["uset_not_representable.drv", "uset_two_loops.drv"] {
        check_identities(&set(n)).unwrap_or_else(|e| panic!("{n}: {e}"));
    }
}

#[test]
fn isomorphism_classes() {
    let s1 = [set("set_repr_glue.drv"), set("mixed_glue.drv"), set("uset_not_representable.drv")];
    let s2 = [set("set_two_cells.drv"), set("set_hand_written.drv"), set("mixed_two_cells.drv")];
    for x in &s1 {
        assert_eq!(x.cells.len(), 6);
        assert!(s1.iter().all(|y| isomorphic(x, y)));
        assert!(s2.iter().all(|y| !isomorphic(x, y)));
    }
    for x in &s2 {
        assert_eq!(x.cells.len(), 7);
        assert!(s2.iter().all(|y| isomorphic(x, y)));
    }
}

#[test]
fn script_errors_carry_positions() {
    let bad = read("named_classic.drv").replace("graft(beta, i, alpha)", "graft(beta, c, alpha)");
    let e = run_script(&bad).unwrap_err();
    assert!(!e.is_parse());
    assert!(e.to_string().starts_with("8:"), "{e}");
    let e = run_script(&read("named_classic.drv").replace("shift(point b, g)", "shift(point b g)")).unwrap_err();
    assert!(e.is_parse());
    assert!(e.to_string().starts_with("3:"), "{e}");
}
