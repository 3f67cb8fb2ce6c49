//! Stable number formatting shared by the CLI and its byte-diff tests.

/// 12 significant digits in scientific notation, the CSV cell format.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1.00000000000e0");
        assert_eq!(sig12(0.6780719051126377), "6.78071905113e-1");
        assert_eq!(sig12(-1234.5), "-1.23450000000e3");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
    }
}
