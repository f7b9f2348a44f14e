use pbtlang::{parse_module, run_source, tokenize, Interpreter, Value};
use proptest::prelude::*;

fn eval(expr: &str) -> Value {
    let mut interp = Interpreter::new();
    let scope = run_source(&mut interp, &format!("r = {expr}\n")).unwrap();
    let v = scope.borrow()["r"].clone();
    v
}

proptest! {
    #[test]
    fn lexer_and_parser_never_panic(src in "\\PC{0,80}") {
        let _ = tokenize(&src);
        let _ = parse_module(&src);
    }

    #[test]
    fn floor_division_identity(a in -10_000i64..10_000, b in (-100i64..100).prop_filter("nonzero", |b| *b != 0)) {
        let q = eval(&format!("({a}) // ({b})")).as_int().unwrap();
        let r = eval(&format!("({a}) % ({b})")).as_int().unwrap();
        prop_assert_eq!(q * b + r, a);
        prop_assert!(r == 0 || (r < 0) == (b < 0));
    }

    #[test]
    fn float_repr_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let text = pbtlang::value::float_repr(x);
        let back = eval(&format!("float('{text}')")).as_f64().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn chained_comparison_matches_conjunction(a in -5i64..5, b in -5i64..5, c in -5i64..5) {
        let chained = eval(&format!("{a} <= {b} < {c}")).truthy();
        prop_assert_eq!(chained, a <= b && b < c);
    }
}
