//! Per-frame calibration files.
//!
//! ```text
//! P2: fx 0 cx 0 0 fy cy 0 0 0 1 0
//! g: alpha beta gamma d
//! image_size: 1920 1080               (optional)
//! Tr_lidar_to_cam: r00 r01 r02 tx ... (optional, row-major 3x4)
//! gg_meta: cell_size ox oz            (optional gridded ground)
//! gg: i j alpha beta gamma d          (one line per cell)
//! ```
//!
//! Unrecognized `key:` lines are skipped so KITTI-style files with extra
//! projection matrices still parse.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{real, tokens, ParseError};
use crate::geometry::{CameraModel, GriddedGround, GroundPlane, RigidTransform};

/// Image size assumed when a calibration file has no `image_size:` line.
pub const DEFAULT_IMAGE_SIZE: (u32, u32) = (1920, 1080);

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub camera: CameraModel<f64>,
    pub plane: GroundPlane<f64>,
    pub lidar_to_camera: Option<RigidTransform<f64>>,
    /// Piecewise ground stored alongside the plane; its fallback is `plane`.
    pub gridded: Option<GriddedGround<f64>>,
}

struct Line<'a> {
    number: usize,
    key_column: usize,
    values: Vec<(usize, &'a str)>,
}

/// Splits into `key: values` lines; `gg` may repeat, other keys may not.
fn sections(text: &str) -> Result<BTreeMap<String, Vec<Line<'_>>>, ParseError> {
    let mut out: BTreeMap<String, Vec<Line<'_>>> = BTreeMap::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let number = idx + 1;
        let toks = tokens(raw);
        let Some(&(key_column, first)) = toks.first() else { continue };
        let Some(key) = first.strip_suffix(':') else {
            return Err(ParseError::at(number, key_column, format!("expected `key:`, got {first:?}")));
        };
        if key.is_empty() {
            return Err(ParseError::at(number, key_column, "empty key"));
        }
        let entry = out.entry(key.to_string()).or_default();
        if key != "gg" && !entry.is_empty() {
            return Err(ParseError::at(number, key_column, format!("duplicate {key:?} line")));
        }
        entry.push(Line { number, key_column, values: toks[1..].to_vec() });
    }
    Ok(out)
}

fn reals<const N: usize>(line: &Line<'_>, key: &str) -> Result<[f64; N], ParseError> {
    if line.values.len() != N {
        let column = line.values.get(N).map_or(line.key_column, |t| t.0);
        return Err(ParseError::at(line.number, column, format!("{key} needs {N} values, found {}", line.values.len())));
    }
    let mut out = [0.0; N];
    for (slot, tok) in out.iter_mut().zip(&line.values) {
        *slot = real(line.number, *tok)?;
    }
    Ok(out)
}

fn single<'s, 'a>(s: &'s BTreeMap<String, Vec<Line<'a>>>, key: &str) -> Option<&'s Line<'a>> {
    s.get(key).and_then(|v| v.first())
}

fn integer(line: usize, (column, tok): (usize, &str)) -> Result<i64, ParseError> {
    tok.parse::<i64>().map_err(|_| ParseError::at(line, column, format!("expected an integer, got {tok:?}")))
}

fn plane_from(line: &Line<'_>, values: [f64; 4]) -> Result<GroundPlane<f64>, ParseError> {
    GroundPlane::new(values[0], values[1], values[2], values[3])
        .map_err(|e| ParseError::at(line.number, line.values.first().map_or(line.key_column, |t| t.0), e.to_string()))
}

fn gridded_from(
    s: &BTreeMap<String, Vec<Line<'_>>>,
    fallback: GroundPlane<f64>,
) -> Result<Option<GriddedGround<f64>>, ParseError> {
    let cells = s.get("gg").map(Vec::as_slice).unwrap_or(&[]);
    let Some(meta) = single(s, "gg_meta") else {
        return match cells.first() {
            Some(l) => Err(ParseError::at(l.number, l.key_column, "gg lines need a gg_meta line")),
            None => Ok(None),
        };
    };
    let [cell_size, ox, oz] = reals::<3>(meta, "gg_meta")?;
    let mut grid = GriddedGround::new(cell_size, [ox, oz], fallback)
        .map_err(|e| ParseError::at(meta.number, meta.key_column, e.to_string()))?;
    for l in cells {
        if l.values.len() != 6 {
            return Err(ParseError::at(l.number, l.key_column, format!("gg needs 6 values, found {}", l.values.len())));
        }
        let i = integer(l.number, l.values[0])?;
        let j = integer(l.number, l.values[1])?;
        let mut c = [0.0; 4];
        for (slot, tok) in c.iter_mut().zip(&l.values[2..]) {
            *slot = real(l.number, *tok)?;
        }
        let plane = plane_from(l, c)?;
        if grid.cells.insert((i, j), plane).is_some() {
            return Err(ParseError::at(l.number, l.values[0].0, format!("duplicate cell ({i}, {j})")));
        }
    }
    Ok(Some(grid))
}

pub fn parse_calib(text: &str) -> Result<Calibration, ParseError> {
    let s = sections(text)?;
    let p2_line = single(&s, "P2").ok_or_else(|| ParseError::MissingSection("P2".into()))?;
    let g_line = single(&s, "g").ok_or_else(|| ParseError::MissingSection("g".into()))?;

    let p = reals::<12>(p2_line, "P2")?;
    let col = |k: usize| p2_line.values[k].0;
    if p[1] != 0.0 || p[4] != 0.0 || p[8] != 0.0 || p[9] != 0.0 || p[10] != 1.0 {
        return Err(ParseError::at(p2_line.number, col(0), "P2 is not a zero-skew pinhole projection"));
    }
    let (width, height) = match single(&s, "image_size") {
        Some(l) => {
            if l.values.len() != 2 {
                return Err(ParseError::at(l.number, l.key_column, "image_size needs 2 values"));
            }
            let w = integer(l.number, l.values[0])?;
            let h = integer(l.number, l.values[1])?;
            let fit = |v: i64, tok: (usize, &str)| {
                u32::try_from(v).map_err(|_| ParseError::at(l.number, tok.0, "image size out of range"))
            };
            (fit(w, l.values[0])?, fit(h, l.values[1])?)
        }
        None => DEFAULT_IMAGE_SIZE,
    };
    let camera = CameraModel::new(p[0], p[5], p[2], p[6], width, height)
        .map_err(|e| ParseError::at(p2_line.number, col(0), e.to_string()))?;

    let plane = plane_from(g_line, reals::<4>(g_line, "g")?)?;

    let lidar_to_camera = match single(&s, "Tr_lidar_to_cam") {
        Some(l) => Some(
            RigidTransform::from_row_major_3x4(&reals::<12>(l, "Tr_lidar_to_cam")?)
                .map_err(|e| ParseError::at(l.number, l.values[0].0, e.to_string()))?,
        ),
        None => None,
    };
    let gridded = gridded_from(&s, plane)?;
    Ok(Calibration { camera, plane, lidar_to_camera, gridded })
}

/// Parses a file holding only `gg_meta:` / `gg:` lines (other keys are
/// skipped) into a grid that falls back to `fallback`.
pub fn parse_gridded(text: &str, fallback: GroundPlane<f64>) -> Result<GriddedGround<f64>, ParseError> {
    let s = sections(text)?;
    gridded_from(&s, fallback)?.ok_or_else(|| ParseError::MissingSection("gg_meta".into()))
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes `gg_meta:` and `gg:` lines.
pub fn format_gridded(grid: &GriddedGround<f64>) -> String {
    let mut out = format!("gg_meta: {}\n", join(&[grid.cell_size, grid.origin[0], grid.origin[1]]));
    for ((i, j), p) in &grid.cells {
        let _ = writeln!(out, "gg: {i} {j} {}", join(&p.coefficients()));
    }
    out
}

pub fn format_calib(c: &Calibration) -> String {
    let k = &c.camera;
    let mut out = format!(
        "P2: {}\n",
        join(&[k.fx, 0.0, k.cx, 0.0, 0.0, k.fy, k.cy, 0.0, 0.0, 0.0, 1.0, 0.0])
    );
    let _ = writeln!(out, "image_size: {} {}", k.width, k.height);
    let _ = writeln!(out, "g: {}", join(&c.plane.coefficients()));
    if let Some(t) = &c.lidar_to_camera {
        let _ = writeln!(out, "Tr_lidar_to_cam: {}", join(&t.to_row_major_3x4()));
    }
    if let Some(g) = &c.gridded {
        out.push_str(&format_gridded(g));
    }
    out
}
