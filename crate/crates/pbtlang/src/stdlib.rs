//! The `math` module.

use crate::builtins::{bind_required, expect_float};
use crate::interp::Interpreter;
use crate::value::*;

fn unary(name: &'static str, f: fn(f64) -> f64) -> (String, Value) {
    (
        name.to_string(),
        Builtin::value(name, move |i, args, kw| {
            let [x] = <[Value; 1]>::try_from(bind_required(i, name, &["x"], args, kw)?).unwrap();
            let x = expect_float(i, &x, "must be real number")?;
            let r = f(x);
            if r.is_nan() && !x.is_nan() {
                return Err(i.error("ValueError", "math domain error"));
            }
            Ok(Value::Float(r))
        }),
    )
}

fn predicate(name: &'static str, f: fn(f64) -> bool) -> (String, Value) {
    (
        name.to_string(),
        Builtin::value(name, move |i, args, kw| {
            let [x] = <[Value; 1]>::try_from(bind_required(i, name, &["x"], args, kw)?).unwrap();
            Ok(Value::Bool(f(expect_float(i, &x, "must be real number")?)))
        }),
    )
}

fn rounding(name: &'static str, f: fn(f64) -> f64) -> (String, Value) {
    (
        name.to_string(),
        Builtin::value(name, move |i, args, kw| {
            let [x] = <[Value; 1]>::try_from(bind_required(i, name, &["x"], args, kw)?).unwrap();
            if let Some(n) = x.as_int() {
                return Ok(Value::Int(n));
            }
            let v = expect_float(i, &x, "must be real number")?;
            if !v.is_finite() {
                return Err(i.error("OverflowError", "cannot convert float infinity to integer"));
            }
            Ok(Value::Int(f(v) as i64))
        }),
    )
}

pub(crate) fn install(interp: &mut Interpreter) {
    interp.register_module("math", |_| {
        let mut attrs = vec![
            ("pi".to_string(), Value::Float(std::f64::consts::PI)),
            ("e".to_string(), Value::Float(std::f64::consts::E)),
            ("inf".to_string(), Value::Float(f64::INFINITY)),
            ("nan".to_string(), Value::Float(f64::NAN)),
            unary("sqrt", f64::sqrt),
            unary("fabs", f64::abs),
            unary("exp", f64::exp),
            unary("log10", f64::log10),
            unary("sin", f64::sin),
            unary("cos", f64::cos),
            unary("tan", f64::tan),
            predicate("isnan", f64::is_nan),
            predicate("isinf", f64::is_infinite),
            predicate("isfinite", f64::is_finite),
            rounding("floor", f64::floor),
            rounding("ceil", f64::ceil),
            rounding("trunc", f64::trunc),
        ];
        attrs.push((
            "log".to_string(),
            Builtin::value("log", |i, args, _| {
                let x = expect_float(i, args.first().unwrap_or(&Value::None), "must be real number")?;
                if x <= 0.0 {
                    return Err(i.error("ValueError", "math domain error"));
                }
                match args.get(1) {
                    Some(b) => Ok(Value::Float(x.ln() / expect_float(i, b, "base")?.ln())),
                    None => Ok(Value::Float(x.ln())),
                }
            }),
        ));
        attrs.push((
            "isclose".to_string(),
            Builtin::value("isclose", |i, args, kw| {
                let mut rel = 1e-9;
                let mut abs = 0.0;
                for (k, v) in &kw {
                    match k.as_str() {
                        "rel_tol" => rel = expect_float(i, v, "rel_tol")?,
                        "abs_tol" => abs = expect_float(i, v, "abs_tol")?,
                        _ => {
                            return Err(i.error("TypeError", format!("isclose() got an unexpected keyword argument '{k}'")))
                        }
                    }
                }
                let [a, b] = <[Value; 2]>::try_from(args)
                    .map_err(|_| i.error("TypeError", "isclose() takes exactly 2 positional arguments"))?;
                let a = expect_float(i, &a, "must be real number")?;
                let b = expect_float(i, &b, "must be real number")?;
                if a == b {
                    return Ok(Value::Bool(true));
                }
                if a.is_infinite() || b.is_infinite() {
                    return Ok(Value::Bool(false));
                }
                let diff = (a - b).abs();
                Ok(Value::Bool(diff <= (rel * b.abs()).max(rel * a.abs()) || diff <= abs))
            }),
        ));
        Ok(ModuleObj::value("math", attrs))
    });
}
