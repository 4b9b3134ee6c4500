//! Angle literals: plain radians (`1.5708`) or multiples of π (`0.25pi`, `-pi`, `pi/4`).

use std::f64::consts::PI;

/// Parses `"<number>"`, `"<number>pi"`, `"pi"` or `"-pi"` into radians,
/// optionally divided by a positive number (`"3pi/4"`).
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let invalid = || format!("invalid angle literal `{text}`");
    let (t, divisor) = match text.trim().split_once('/') {
        Some((num, den)) => {
            let d: f64 = den.trim().parse().map_err(|_| invalid())?;
            if !(d > 0.0) {
                return Err(invalid());
            }
            (num.trim(), d)
        }
        None => (text.trim(), 1.0),
    };
    let lower = t.to_ascii_lowercase();
    let (number, scale) = if let Some(head) = lower.strip_suffix("pi") {
        (head.trim().to_owned(), PI)
    } else if let Some(head) = t.strip_suffix('π') {
        (head.trim().to_owned(), PI)
    } else {
        (lower.clone(), 1.0)
    };
    let coefficient = match number.as_str() {
        "" | "+" if scale == PI => 1.0,
        "-" if scale == PI => -1.0,
        n => n.parse::<f64>().map_err(|_| invalid())?,
    };
    let value = coefficient * scale / divisor;
    if !value.is_finite() {
        return Err(format!("angle `{text}` is not finite"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("0.25pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("20PI").unwrap(), 20.0 * PI);
        assert_eq!(parse_angle("0.5π").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle(" -0.5 pi ").unwrap(), -0.5 * PI);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("-3pi / 2").unwrap(), -3.0 * PI / 2.0);
        assert_eq!(parse_angle("1/8").unwrap(), 0.125);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pi/-2").is_err());
        assert!(parse_angle("/4").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("").is_err());
        assert!(parse_angle("-").is_err());
        assert!(parse_angle("inf").is_err());
    }
}
