//! Value parsers for angles, grids and integer ranges.

use std::f64::consts::PI;

/// An angle in radians, written either as radians (`0.63`) or as a multiple
/// of π (`0.2pi`, `pi`, `0.5π`, `pi/4`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let value = if let Some(rest) = t.strip_prefix("pi/") {
        let d: f64 = rest.parse().map_err(|_| format!("bad angle '{s}'"))?;
        PI / d
    } else if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim_end_matches('*');
        let m: f64 = if head.is_empty() { 1.0 } else { head.parse().map_err(|_| format!("bad angle '{s}'"))? };
        m * PI
    } else {
        t.parse().map_err(|_| format!("bad angle '{s}'"))?
    };
    if !value.is_finite() {
        return Err(format!("bad angle '{s}'"));
    }
    Ok(value)
}

/// A list of angles: comma-separated values, or `start..end:step` (inclusive
/// of `end` up to rounding).
pub fn parse_angle_list(s: &str) -> Result<Vec<f64>, String> {
    if let Some((range, step)) = s.split_once(':') {
        let (a, b) = range.split_once("..").ok_or_else(|| format!("bad range '{s}'"))?;
        let (a, b, step) = (parse_angle(a)?, parse_angle(b)?, parse_angle(step)?);
        if step <= 0.0 || b < a {
            return Err(format!("empty range '{s}'"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| a + step * i as f64).collect());
    }
    let list: Vec<f64> = s.split(',').map(parse_angle).collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err("empty angle list".into());
    }
    Ok(list)
}

/// Integers as `a..b` (inclusive), `a..b:step`, or a comma list.
pub fn parse_int_list(s: &str) -> Result<Vec<u32>, String> {
    let bad = || format!("bad integer list '{s}'");
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (b, st.parse::<u32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let (a, b): (u32, u32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if step == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step as usize).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

/// 1-based positions separated by commas.
pub fn parse_positions(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|v| v.trim().parse().map_err(|_| format!("bad position list '{s}'"))).collect()
}

/// A word written as a bit string, e.g. `10011`.
pub fn parse_bits(s: &str) -> Result<Vec<u8>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("bad bit string '{s}'")),
        })
        .collect()
}
