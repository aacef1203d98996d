//! Fixed three-decimal coordinates.
//!
//! Layout files store coordinates at three decimals, rounded half-to-even on
//! the exact binary value. Exact geometric predicates work on the same
//! quantized values (as integer thousandths), so a metric recomputed from a
//! saved layout agrees with the one computed in memory.

/// `v` rounded to three decimals, half-to-even, without a negative zero.
pub fn fixed3(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// The value `fixed3` prints, as an `f64`.
pub fn round3(v: f64) -> f64 {
    fixed3(v).parse().expect("fixed3 prints a decimal")
}

/// The value `fixed3` prints, in integer thousandths.
pub fn millis(v: f64) -> i64 {
    let s = fixed3(v);
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (int, frac) = digits.split_once('.').expect("three decimals");
    let m = int.parse::<i64>().expect("finite coordinate") * 1000 + frac.parse::<i64>().expect("digits");
    if neg {
        -m
    } else {
        m
    }
}
