//! Exact rational values used for communication times, QoS bounds and storage costs.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

/// Parses a non-negative exact decimal (`0.25`, `3`, `12.5`) or a fraction (`3/4`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = parse_digits(num)?;
        let den: i64 = parse_digits(den)?;
        if den == 0 {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let int_value: i64 = if int_part.is_empty() { 0 } else { parse_digits(int_part)? };
    if frac_part.is_empty() {
        return if text.ends_with('.') { None } else { Some(Rational::from_integer(int_value)) };
    }
    let frac_value: i64 = parse_digits(frac_part)?;
    let scale = 10i64.checked_pow(u32::try_from(frac_part.len()).ok()?)?;
    let numer = int_value.checked_mul(scale)?.checked_add(frac_value)?;
    Some(Rational::new(numer, scale))
}

fn parse_digits(text: &str) -> Option<i64> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Formats a rational as a terminating decimal when possible, otherwise as `p/q`.
/// The output always parses back to the same value with [`parse_rational`].
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        return value.to_integer().to_string();
    }
    let negative = *value < Rational::zero();
    let value = if negative { -*value } else { *value };
    let mut den = *value.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    let sign = if negative { "-" } else { "" };
    if den != 1 {
        return format!("{sign}{}/{}", value.numer(), value.denom());
    }
    let digits = twos.max(fives);
    let scaled = 10i128.pow(digits) * i128::from(*value.numer()) / i128::from(*value.denom());
    let scale = 10i128.pow(digits);
    let frac = format!("{:0width$}", scaled % scale, width = digits as usize);
    format!("{sign}{}.{}", scaled / scale, frac.trim_end_matches('0'))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1, 4)));
        assert_eq!(parse_rational("3"), Some(Rational::from_integer(3)));
        assert_eq!(parse_rational(".5"), Some(Rational::new(1, 2)));
        assert_eq!(parse_rational("2/6"), Some(Rational::new(1, 3)));
        assert_eq!(parse_rational("1."), None);
        assert_eq!(parse_rational("-1"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn formats_terminating_and_repeating() {
        assert_eq!(format_rational(&Rational::new(3, 4)), "0.75");
        assert_eq!(format_rational(&Rational::new(5, 2)), "2.5");
        assert_eq!(format_rational(&Rational::new(1, 3)), "1/3");
        assert_eq!(format_rational(&Rational::from_integer(7)), "7");
        assert_eq!(format_rational(&Rational::new(1, 80)), "0.0125");
    }

    proptest::proptest! {
        #[test]
        fn format_then_parse_is_identity(num in 0i64..100_000, den in 1i64..2_000) {
            let value = Rational::new(num, den);
            proptest::prop_assert_eq!(parse_rational(&format_rational(&value)), Some(value));
        }
    }
}
