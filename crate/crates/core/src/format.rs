//! Locale-independent numeric formatting for CSV artifacts: 9 significant
//! digits, `.` decimal separator, trailing zeros trimmed (C `%g` style).

/// Format `x` with `sig` significant digits.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round once in scientific form, then rearrange digits as text so no
    // second rounding can occur.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp_str.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        let point = (exp + 1) as usize;
        out.push_str(&digits[..point.min(digits.len())]);
        while out.len() < point + usize::from(neg) {
            out.push('0');
        }
        if point < digits.len() {
            out.push('.');
            out.push_str(&digits[point..]);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    }
    trim_zeros(&out)
}

/// Default artifact formatting: 9 significant digits.
pub fn format_g9(x: f64) -> String {
    format_sig(x, 9)
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_range() {
        assert_eq!(format_g9(1.30083), "1.30083");
        assert_eq!(format_g9(3.480_486_557_4), "3.48048656");
        assert_eq!(format_g9(-0.926293), "-0.926293");
        assert_eq!(format_g9(14.134_725_141_7), "14.1347251");
        assert_eq!(format_g9(236.524_229_665_8), "236.52423");
        assert_eq!(format_g9(0.0001), "0.0001");
        assert_eq!(format_g9(123_456_789.0), "123456789");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(format_g9(1e-5), "1e-5");
        assert_eq!(format_g9(6.00153e-23), "6.00153e-23");
        assert_eq!(format_g9(1.234_567_891e12), "1.23456789e12");
        assert_eq!(format_g9(-2.5e-7), "-2.5e-7");
    }

    #[test]
    fn carries_across_magnitude() {
        // rounding 0.99999999951 at 9 digits bumps the exponent
        assert_eq!(format_g9(0.999_999_999_51), "1");
        assert_eq!(format_g9(9.999_999_996e8), "1e9");
    }

    #[test]
    fn special_values() {
        assert_eq!(format_g9(0.0), "0");
        assert_eq!(format_g9(f64::NAN), "nan");
        assert_eq!(format_g9(f64::INFINITY), "inf");
        assert_eq!(format_g9(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn round_trip_within_9_digits() {
        let vals = [1.0 / 3.0, 2.0f64.sqrt(), 981.123_456_7, 1.5e-3];
        for v in vals {
            let s = format_sig(v, 9);
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= 1e-8 * v.abs().max(1.0));
        }
    }
}
