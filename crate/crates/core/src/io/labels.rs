//! KITTI-compatible label records, one object per line:
//!
//! ```text
//! category truncation occlusion alpha xmin ymin xmax ymax H W L x y z rotation_y [score]
//! ```
//!
//! Ground truth has 15 fields, predictions 16. `x y z` is the bottom-face
//! center in the camera frame; it is converted to the cuboid center on
//! parse and back on format. A ground-truth record whose seven 3D fields
//! are all -1000 is an image-only label.

use super::{real, tokens, ParseError};
use crate::category::Category;
use crate::geometry::{Box2D, Box3D, Vec3};
use crate::metrics::{Annotation, Detection};

pub const SENTINEL_2D_ONLY: f64 = -1000.0;

const GT_FIELDS: usize = 15;
const PRED_FIELDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    GroundTruth,
    Prediction,
}

/// An unknown category token that was mapped to `unknown_movable`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelWarning {
    pub line: usize,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<R> {
    pub records: Vec<R>,
    pub warnings: Vec<LabelWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    GroundTruth(Parsed<Annotation<f64>>),
    Predictions(Parsed<Detection<f64>>),
}

struct Common {
    category: Category,
    truncation: u8,
    occlusion: u8,
    alpha: f64,
    box2d: Box2D<f64>,
    box3d: Option<Box3D<f64>>,
}

fn level(line: usize, tok: (usize, &str), what: &str) -> Result<u8, ParseError> {
    let v = real(line, tok)?;
    if v.fract() != 0.0 || !(0.0..=2.0).contains(&v) {
        return Err(ParseError::at(line, tok.0, format!("{what} must be 0, 1 or 2, got {:?}", tok.1)));
    }
    Ok(v as u8)
}

fn parse_common(
    line: usize,
    f: &[(usize, &str)],
    kind: LabelKind,
    warnings: &mut Vec<LabelWarning>,
) -> Result<Common, ParseError> {
    let category = f[0].1.parse::<Category>().unwrap_or_else(|_| {
        warnings.push(LabelWarning { line, token: f[0].1.to_string() });
        Category::UnknownMovable
    });
    let truncation = level(line, f[1], "truncation")?;
    let occlusion = level(line, f[2], "occlusion")?;
    let alpha = real(line, f[3])?;
    let b = [real(line, f[4])?, real(line, f[5])?, real(line, f[6])?, real(line, f[7])?];
    let box2d = Box2D::new(b[0], b[1], b[2], b[3])
        .map_err(|_| ParseError::at(line, f[4].0, "2D box needs xmin <= xmax and ymin <= ymax"))?;
    let mut v3 = [0.0; 7];
    for (k, slot) in v3.iter_mut().enumerate() {
        *slot = real(line, f[8 + k])?;
    }
    let box3d = if v3.iter().all(|v| *v == SENTINEL_2D_ONLY) {
        if kind == LabelKind::Prediction {
            return Err(ParseError::at(line, f[8].0, "predictions need a 3D box"));
        }
        None
    } else {
        let [h, w, l, x, y, z, ry] = v3;
        for (k, v) in [h, w, l].into_iter().enumerate() {
            if v <= 0.0 {
                return Err(ParseError::at(line, f[8 + k].0, "dimensions must be positive"));
            }
        }
        let center = Vec3::new(x, y - h / 2.0, z);
        Some(Box3D::new(center, l, w, h, ry).map_err(|e| ParseError::at(line, f[8].0, e.to_string()))?)
    };
    Ok(Common { category, truncation, occlusion, alpha, box2d, box3d })
}

/// Parses a label file for frame `frame_id`.
pub fn parse_labels(text: &str, frame_id: &str, kind: LabelKind) -> Result<Labels, ParseError> {
    let want = match kind {
        LabelKind::GroundTruth => GT_FIELDS,
        LabelKind::Prediction => PRED_FIELDS,
    };
    let mut warnings = Vec::new();
    let mut gts = Vec::new();
    let mut preds = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let f = tokens(raw);
        if f.is_empty() {
            continue;
        }
        if f.len() != want {
            let column = f.get(want).map_or(raw.chars().count() + 1, |t| t.0);
            return Err(ParseError::at(line, column, format!("expected {want} fields, found {}", f.len())));
        }
        let c = parse_common(line, &f, kind, &mut warnings)?;
        match kind {
            LabelKind::GroundTruth => gts.push(Annotation {
                frame_id: frame_id.to_string(),
                category: c.category,
                occlusion: c.occlusion,
                truncation: c.truncation,
                box2d: c.box2d,
                box3d: c.box3d,
                alpha: c.alpha,
            }),
            LabelKind::Prediction => {
                let score = real(line, f[15])?;
                if !(0.0..=1.0).contains(&score) {
                    return Err(ParseError::at(line, f[15].0, "score must lie in [0, 1]"));
                }
                preds.push(Detection {
                    frame_id: frame_id.to_string(),
                    category: c.category,
                    box3d: c.box3d.expect("prediction boxes are checked above"),
                    box2d: Some(c.box2d),
                    score,
                    alpha: c.alpha,
                });
            }
        }
    }
    Ok(match kind {
        LabelKind::GroundTruth => Labels::GroundTruth(Parsed { records: gts, warnings }),
        LabelKind::Prediction => Labels::Predictions(Parsed { records: preds, warnings }),
    })
}

pub fn parse_ground_truth(text: &str, frame_id: &str) -> Result<Parsed<Annotation<f64>>, ParseError> {
    match parse_labels(text, frame_id, LabelKind::GroundTruth)? {
        Labels::GroundTruth(p) => Ok(p),
        Labels::Predictions(_) => unreachable!(),
    }
}

pub fn parse_predictions(text: &str, frame_id: &str) -> Result<Parsed<Detection<f64>>, ParseError> {
    match parse_labels(text, frame_id, LabelKind::Prediction)? {
        Labels::Predictions(p) => Ok(p),
        Labels::GroundTruth(_) => unreachable!(),
    }
}

fn push_record(out: &mut String, category: Category, trunc: u8, occ: u8, alpha: f64, b2: &Box2D<f64>, b3: Option<&Box3D<f64>>) {
    use std::fmt::Write;
    let _ = write!(out, "{} {} {} {} {} {} {} {}", category, trunc, occ, alpha, b2.xmin, b2.ymin, b2.xmax, b2.ymax);
    match b3 {
        Some(b) => {
            let bottom = b.bottom_center();
            let _ = write!(
                out,
                " {} {} {} {} {} {} {}",
                b.height, b.width, b.length, bottom.x, bottom.y, bottom.z, b.yaw
            );
        }
        None => {
            for _ in 0..7 {
                let _ = write!(out, " {SENTINEL_2D_ONLY}");
            }
        }
    }
}

/// Formats ground truth as a 15-field label file.
pub fn format_ground_truth(records: &[Annotation<f64>]) -> String {
    let mut out = String::new();
    for r in records {
        push_record(&mut out, r.category, r.truncation, r.occlusion, r.alpha, &r.box2d, r.box3d.as_ref());
        out.push('\n');
    }
    out
}

/// Formats predictions as a 16-field label file. Detections without a 2D
/// box get a zero-size box at the origin.
pub fn format_predictions(records: &[Detection<f64>]) -> String {
    let mut out = String::new();
    let empty = Box2D { xmin: 0.0, ymin: 0.0, xmax: 0.0, ymax: 0.0 };
    for r in records {
        push_record(&mut out, r.category, 0, 0, r.alpha, r.box2d.as_ref().unwrap_or(&empty), Some(&r.box3d));
        out.push_str(&format!(" {}\n", r.score));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAR: &str = "car 0 0 -1.2 100 200 300 400 1.4 1.7 4.2 5.0 1.5 60.0 0.3";

    #[test]
    fn direct_field_map() {
        let p = parse_ground_truth(CAR, "000001").unwrap();
        assert!(p.warnings.is_empty());
        let a = &p.records[0];
        assert_eq!(a.category, Category::Car);
        assert_eq!((a.truncation, a.occlusion, a.alpha), (0, 0, -1.2));
        assert_eq!(a.box2d, Box2D { xmin: 100.0, ymin: 200.0, xmax: 300.0, ymax: 400.0 });
        let b = a.box3d.unwrap();
        assert_eq!((b.height, b.width, b.length, b.yaw), (1.4, 1.7, 4.2, 0.3));
        assert_eq!(b.center, Vec3::new(5.0, 1.5 - 0.7, 60.0));
        assert_eq!(b.bottom_center(), Vec3::new(5.0, 1.5, 60.0));
        assert_eq!(a.frame_id, "000001");
    }

    #[test]
    fn wrong_field_count() {
        let short = "car 0 0 -1.2 100 200 300 400 1.4 1.7 4.2 5.0 1.5 60.0";
        let err = parse_ground_truth(short, "f").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err}");
        assert!(parse_predictions(CAR, "f").is_err());
        assert!(parse_ground_truth(&format!("{CAR} 0.9"), "f").is_err());
    }

    #[test]
    fn sentinel_gives_image_only_label() {
        let line = "pedestrian 1 2 0 10 20 30 40 -1000 -1000 -1000 -1000 -1000 -1000 -1000";
        let p = parse_ground_truth(line, "f").unwrap();
        assert!(p.records[0].box3d.is_none());
        assert_eq!(p.records[0].occlusion, 2);
        let round = parse_ground_truth(&format_ground_truth(&p.records), "f").unwrap();
        assert_eq!(round.records, p.records);
    }

    #[test]
    fn diagnostics() {
        let text = format!("{CAR}\n\ncar 0 3 -1.2 100 200 300 400 1.4 1.7 4.2 5.0 1.5 60.0 0.3\n");
        let err = parse_ground_truth(&text, "f").unwrap_err();
        assert_eq!(err.location(), Some((3, 7)));
        let err = parse_ground_truth("car 0 0 x 1 2 3 4 1 1 1 0 0 9 0", "f").unwrap_err();
        assert_eq!(err.location(), Some((1, 9)));
        let err = parse_ground_truth("car 0 0 0 1 2 3 4 1 nan 1 0 0 9 0", "f").unwrap_err();
        assert_eq!(err.location(), Some((1, 21)));
        assert!(parse_ground_truth("car 0 0 0 5 2 3 4 1 1 1 0 0 9 0", "f").is_err());
        assert!(parse_ground_truth("car 0 0 0 1 2 3 4 1 0 1 0 0 9 0", "f").is_err());
        assert!(parse_predictions(&format!("{CAR} 1.5"), "f").is_err());
    }

    #[test]
    fn unknown_category_warns() {
        let p = parse_ground_truth(&CAR.replacen("car", "hovercraft", 1), "f").unwrap();
        assert_eq!(p.records[0].category, Category::UnknownMovable);
        assert_eq!(p.warnings, vec![LabelWarning { line: 1, token: "hovercraft".into() }]);
    }

    #[test]
    fn predictions_round_trip() {
        let p = parse_predictions(&format!("{CAR} 0.75\nvan 0 0 0.1 1 2 3 4 1.8 1.9 4.6 -3 6 40 -2.5 0.5\n"), "f").unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[0].score, 0.75);
        let again = parse_predictions(&format_predictions(&p.records), "f").unwrap();
        for (a, b) in again.records.iter().zip(&p.records) {
            assert!(a.box3d.center.distance(b.box3d.center) < 1e-9);
            assert_eq!(a.score, b.score);
        }
    }

    proptest! {
        #[test]
        fn location_convention_round_trip(x in -50.0..50.0f64, y in -5.0..10.0f64, z in 1.0..200.0f64,
                                          l in 0.1..15.0f64, w in 0.1..4.0f64, h in 0.1..5.0f64, yaw in -3.2..3.2f64) {
            let b = Box3D::new(Vec3::new(x, y, z), l, w, h, yaw).unwrap();
            let a = Annotation { frame_id: "f".into(), category: Category::Truck, occlusion: 1, truncation: 2,
                                 box2d: Box2D { xmin: 1.0, ymin: 2.0, xmax: 3.0, ymax: 4.0 }, box3d: Some(b), alpha: 0.5 };
            let back = parse_ground_truth(&format_ground_truth(std::slice::from_ref(&a)), "f").unwrap();
            let got = back.records[0].box3d.unwrap();
            prop_assert!(got.center.distance(b.center) < 1e-9);
            prop_assert_eq!((got.length, got.width, got.height, got.yaw), (l, w, h, b.yaw));
        }

        #[test]
        fn never_panics(s in "\\PC*") {
            let _ = parse_ground_truth(&s, "f");
            let _ = parse_predictions(&s, "f");
        }
    }
}
