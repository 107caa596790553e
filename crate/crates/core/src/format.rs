//! Fixed-width numeric formatting for diff-stable text output.

/// Twelve significant digits in scientific notation, e.g.
/// `1.00000000000e+00`. Non-finite values print as `nan`, `inf`, `-inf`.
pub fn sci12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Normalise negative zero so equal results print identically.
    let x = if x == 0.0 { 0.0 } else { x };
    let raw = format!("{x:.11e}");
    let (mantissa, exp) = raw
        .split_once('e')
        .expect("`e` formatting always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}
