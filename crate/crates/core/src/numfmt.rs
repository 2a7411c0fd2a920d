//! Fixed-precision float output.

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `sig12(x)` printed in shortest round-trip form, in exponent notation
/// for very small or large magnitudes.
pub fn fmt12(x: f64) -> String {
    let r = sig12(x);
    if r == 0.0 {
        return "0".into();
    }
    let s = format!("{r:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}
