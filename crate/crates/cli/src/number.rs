//! Locale-independent number formatting in the style of C's `%.Ng`.

/// Digits used for human-readable reports.
pub const HUMAN_DIGITS: usize = 6;
/// Enough digits to round-trip any `f64`.
pub const EXACT_DIGITS: usize = 17;

/// Formats `x` with `digits` significant digits, switching to scientific
/// notation for very small or large magnitudes and dropping trailing zeros.
pub fn significant(x: f64, digits: usize) -> String {
    assert!(digits > 0, "at least one significant digit");
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

pub fn human(x: f64) -> String {
    significant(x, HUMAN_DIGITS)
}

pub fn exact(x: f64) -> String {
    significant(x, EXACT_DIGITS)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(human(0.25), "0.25");
        assert_eq!(human(1.0 / 11.0), "0.0909091");
        assert_eq!(human(1439.0713598), "1439.07");
        assert_eq!(human(1234567.0), "1.23457e+06");
        assert_eq!(human(1.5e-7), "1.5e-07");
        assert_eq!(human(-2.0), "-2");
        assert_eq!(human(0.0), "0");
        assert_eq!(human(999999.5), "1e+06");
    }

    #[test]
    fn exact_round_trips() {
        for x in [
            9.0 / 11.0,
            0.1,
            1.0 / 3.0,
            1e-300,
            123456789.12345679,
            0.7882118456652614,
        ] {
            let s = exact(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(exact(0.5), "0.5");
        assert_eq!(exact(9.0 / 11.0), "0.81818181818181823");
    }
}
