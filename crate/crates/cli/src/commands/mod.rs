pub mod calibrate;
pub mod codesign;
pub mod predict;
pub mod simulate;

use crate::error::{CliError, CliResult};

/// Parses `LO:HI`; an empty end takes the matching default.
pub fn parse_window(text: &str, default: (f64, f64)) -> CliResult<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::input(format!("window `{text}` must look like LO:HI")))?;
    let num = |s: &str, d: f64| -> CliResult<f64> {
        let s = s.trim();
        if s.is_empty() {
            Ok(d)
        } else {
            s.parse()
                .map_err(|_| CliError::input(format!("window `{text}`: cannot parse `{s}`")))
        }
    };
    let w = (num(lo, default.0)?, num(hi, default.1)?);
    if w.0.partial_cmp(&w.1) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::input(format!("window `{text}` must have LO < HI")));
    }
    Ok(w)
}

/// Parses `START:STOP:STEP` into the inclusive list of values.
pub fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::input(format!("range `{text}` must look like START:STOP:STEP"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (start, stop, step) = (v[0], v[1], v[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(CliError::input(format!(
            "range `{text}` needs finite values, STEP > 0 and STOP >= START"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // Snap away representation noise such as 6.500000000000001.
    Ok((0..n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(parse_window("0.5:4", (0.0, 1.0)).unwrap(), (0.5, 4.0));
        assert_eq!(
            parse_window("0.5:", (0.0, f64::INFINITY)).unwrap(),
            (0.5, f64::INFINITY)
        );
        assert!(parse_window("4:0.5", (0.0, 1.0)).is_err());
        assert!(parse_window("4", (0.0, 1.0)).is_err());
        assert!(parse_window("a:1", (0.0, 1.0)).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2:24:2").unwrap().len(), 12);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        let r = parse_range("0.1:0.3:0.1").unwrap();
        assert_eq!(r.len(), 3);
        assert!(parse_range("2:1:1").is_err());
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("1:2").is_err());
    }
}
