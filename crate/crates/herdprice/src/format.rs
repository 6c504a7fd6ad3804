//! Number formatting shared by the file writers.

/// Significant digits of every number written by this crate.
pub const SIG_DIGITS: i32 = 9;

/// Fixed-point rendering with [`SIG_DIGITS`] significant digits.
///
/// Values too large or too small for a readable fixed-point form fall back to
/// scientific notation with the same precision.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // round first so that the exponent reflects the rounded value
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The value `fmt_sig` writes, as read back.
pub fn quantize(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}
