//! Plain-text depth maps: a `width height z_max` header line, then one line
//! per image row with `width` space-separated values. INVALID pixels are
//! written as `inf`. Values use the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write;

use super::{real, tokens, ParseError};
use crate::geometry::DepthMap;

pub fn format_depth_map(map: &DepthMap<f64>) -> String {
    let mut out = String::with_capacity(map.values.len() * 8);
    let _ = writeln!(out, "{} {} {}", map.width, map.height, map.z_max);
    if map.width == 0 {
        return out;
    }
    for row in map.values.chunks(map.width as usize) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            if v.is_finite() {
                let _ = write!(out, "{v}");
            } else {
                out.push_str("inf");
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_depth_map(text: &str) -> Result<DepthMap<f64>, ParseError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().unwrap_or((1, ""));
    let h = tokens(header);
    if h.len() != 3 {
        return Err(ParseError::at(1, 1, "header must be `width height z_max`"));
    }
    let dim = |(c, t): (usize, &str)| t.parse::<u32>().map_err(|_| ParseError::at(1, c, format!("bad dimension {t:?}")));
    let (width, height) = (dim(h[0])?, dim(h[1])?);
    let z_max = real(1, h[2])?;
    if z_max <= 0.0 {
        return Err(ParseError::at(1, h[2].0, "z_max must be positive"));
    }
    // Every value takes at least two bytes, which bounds the allocation for
    // headers that overstate the size.
    let mut values = Vec::with_capacity((width as usize).saturating_mul(height as usize).min(text.len() / 2));
    let mut rows = 0u32;
    let mut last = 1;
    for (n, line) in lines {
        last = n;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if rows == height {
            return Err(ParseError::at(n, toks[0].0, "more rows than the header declares"));
        }
        if toks.len() != width as usize {
            return Err(ParseError::at(n, 1, format!("expected {width} values, found {}", toks.len())));
        }
        for (c, t) in toks {
            let v = if t == "inf" {
                f64::INFINITY
            } else {
                let v = real(n, (c, t))?;
                if !(v > 0.0 && v <= z_max) {
                    return Err(ParseError::at(n, c, format!("depth {v} outside (0, z_max]")));
                }
                v
            };
            values.push(v);
        }
        rows += 1;
    }
    if rows != height {
        return Err(ParseError::at(last, 1, format!("expected {height} rows, found {rows}")));
    }
    Ok(DepthMap { width, height, z_max, values })
}
