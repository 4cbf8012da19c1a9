/// Shortest round-trip decimal of `x` after rounding to 15 significant
/// digits; scientific notation outside `[1e-5, 1e16)`.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    let mag = rounded.abs();
    if (1e-5..1e16).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(sig15(0.5), "0.5");
        assert_eq!(sig15(-0.125), "-0.125");
        assert_eq!(sig15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(sig15(0.1 + 0.2), "0.3");
        assert_eq!(sig15(3.0), "3");
        assert_eq!(sig15(1.5e-7), "1.5e-7");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(-1.0 / 18.0), "-0.0555555555555556");
    }
}
