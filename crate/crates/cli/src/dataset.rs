//! Loading label/calibration directory trees.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use roadside_eval::io::{decode_utf8, parse_calib, parse_ground_truth, parse_predictions, Calibration, ParseError};
use roadside_eval::metrics::{FrameAnnotations, FrameDetections, FramePlanes};

use crate::CliError;

pub const GT_DIR: &str = "gt";
pub const PRED_DIR: &str = "pred";
pub const CALIB_DIR: &str = "calib";

pub struct Dataset {
    pub gts: FrameAnnotations<f64>,
    pub dets: FrameDetections<f64>,
    pub planes: FramePlanes<f64>,
    pub warnings: Vec<String>,
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    decode_utf8(&bytes).map(str::to_owned).map_err(|e| located(path, e))
}

pub(crate) fn located(path: &Path, e: ParseError) -> CliError {
    match e.location() {
        Some((line, column)) => CliError::Data(format!("{}:{line}:{column}: {}", path.display(), e.reason())),
        None => CliError::Data(format!("{}: {e}", path.display())),
    }
}

/// `*.txt` files in `dir` keyed by file stem, in sorted order.
pub fn frame_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?.path();
        if path.extension().is_some_and(|x| x == "txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string(), path);
            }
        }
    }
    Ok(out)
}

pub fn load_calibration(path: &Path) -> Result<Calibration, CliError> {
    parse_calib(&read_text(path)?).map_err(|e| located(path, e))
}

/// Reads ground truth, predictions and calibration, pairing files by stem.
/// A frame without a prediction file has no detections; a prediction or a
/// missing calibration file for a frame without ground truth is an error.
pub fn load(gt_dir: &Path, pred_dir: &Path, calib_dir: &Path) -> Result<Dataset, CliError> {
    let gt_files = frame_files(gt_dir)?;
    let pred_files = frame_files(pred_dir)?;
    let mut ds = Dataset { gts: BTreeMap::new(), dets: BTreeMap::new(), planes: BTreeMap::new(), warnings: Vec::new() };
    for (id, path) in &gt_files {
        let parsed = parse_ground_truth(&read_text(path)?, id).map_err(|e| located(path, e))?;
        ds.warnings.extend(parsed.warnings.iter().map(|w| format!("{}:{}: unknown category {:?}", path.display(), w.line, w.token)));
        ds.gts.insert(id.clone(), parsed.records);
        let calib = calib_dir.join(format!("{id}.txt"));
        ds.planes.insert(id.clone(), load_calibration(&calib)?.plane);
    }
    for (id, path) in &pred_files {
        if !gt_files.contains_key(id) {
            return Err(CliError::Data(format!("{}: no ground truth for frame {id:?}", path.display())));
        }
        let parsed = parse_predictions(&read_text(path)?, id).map_err(|e| located(path, e))?;
        ds.warnings.extend(parsed.warnings.iter().map(|w| format!("{}:{}: unknown category {:?}", path.display(), w.line, w.token)));
        ds.dets.insert(id.clone(), parsed.records);
    }
    Ok(ds)
}
