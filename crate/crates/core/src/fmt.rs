//! Number formatting for reports and CSV output.

/// Formats `x` with the given number of significant digits in plain
/// decimal notation (probabilities in output files use 6).
pub fn format_sig(x: f64, digits: u32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0911063, 6), "0.0911063");
        assert_eq!(format_sig(0.9376, 6), "0.937600");
        assert_eq!(format_sig(0.00270, 4), "0.002700");
        assert_eq!(format_sig(61.51, 4), "61.51");
        assert_eq!(format_sig(12345.6, 3), "12346");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(-0.0025, 2), "-0.0025");
    }
}
