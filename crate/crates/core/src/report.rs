//! Number formatting shared by every artifact writer.

/// Rounds to 12 significant digits so that printed values are stable.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal form of `round_sig(x)`.
pub fn sig12(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(2.5e-20), "0.000000000000000000025");
        assert_eq!(round_sig(123456789012345.0), 123456789012000.0);
        assert!(round_sig(f64::NAN).is_nan());
    }
}
