//! Number formatting for CSV output and file names.

/// Fixed-point rendering with six significant digits (`0.0165270`,
/// `4.73621`, `201.716`). Values too small for a readable fixed form fall
/// back to scientific notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-7..=15).contains(&exponent) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Parameter value as it appears in file names: six significant digits with
/// trailing zeros removed (`1.2`, `0.748331`, `2`).
pub fn param_label(x: f64) -> String {
    let s = sig6(x);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(0.01652702), "0.0165270");
        assert_eq!(sig6(4.7362112), "4.73621");
        assert_eq!(sig6(201.71564), "201.716");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(1.2376e-12), "1.23760e-12");
        assert_eq!(sig6(-0.5), "-0.500000");
    }

    #[test]
    fn labels() {
        assert_eq!(param_label(1.2), "1.2");
        assert_eq!(param_label(2.0), "2");
        assert_eq!(param_label(0.56f64.sqrt()), "0.748331");
        assert_eq!(param_label(1.01), "1.01");
    }
}
