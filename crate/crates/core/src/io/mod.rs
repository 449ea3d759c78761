//! Text file formats: KITTI-style label files, calibration files with ground
//! planes, TOML configs and reports, and plain-text depth maps.
//!
//! All formats are UTF-8 with LF line endings and `.` as the decimal
//! separator. Parsers never panic; malformed input yields a [`ParseError`]
//! carrying a 1-based line and column.

mod calib;
mod config;
mod depth;
mod labels;
mod report;

use thiserror::Error;

pub use calib::{format_calib, format_gridded, parse_calib, parse_gridded, Calibration, DEFAULT_IMAGE_SIZE};
pub(crate) use config::toml_error;
pub use config::{format_eval_config, parse_eval_config};
pub use depth::{format_depth_map, parse_depth_map};
pub use labels::{
    format_ground_truth, format_predictions, parse_ground_truth, parse_labels, parse_predictions, LabelKind,
    LabelWarning, Labels, Parsed, SENTINEL_2D_ONLY,
};
pub use report::{parse_report, round_significant, serialize_report, REPORT_SIGNIFICANT_DIGITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {reason}")]
    Syntax { line: usize, column: usize, reason: String },
    #[error("missing section {0:?}")]
    MissingSection(String),
}

impl ParseError {
    pub(crate) fn at(line: usize, column: usize, reason: impl Into<String>) -> Self {
        ParseError::Syntax { line, column, reason: reason.into() }
    }

    /// Line and column for syntax errors.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, column, .. } => Some((*line, *column)),
            ParseError::MissingSection(_) => None,
        }
    }

    /// The message without the location prefix.
    pub fn reason(&self) -> String {
        match self {
            ParseError::Syntax { reason, .. } => reason.clone(),
            other => other.to_string(),
        }
    }
}

/// Decodes raw bytes, reporting the position of the first invalid UTF-8
/// sequence.
pub fn decode_utf8(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let (line, column) = line_column(&String::from_utf8_lossy(&bytes[..e.valid_up_to()]), e.valid_up_to());
        ParseError::at(line, column, "invalid UTF-8")
    })
}

/// 1-based line and column of byte offset `offset` in `text`.
pub(crate) fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let mut line = 1;
    let mut column = 1;
    for (i, ch) in text.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

/// Whitespace-separated tokens with their 1-based character columns.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0;
    for (i, ch) in line.char_indices() {
        col += 1;
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((i, col)),
            (true, Some((s, c))) => {
                out.push((c, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((s, c)) = start {
        out.push((c, &line[s..]));
    }
    out
}

/// Parses a finite real.
pub(crate) fn real(line: usize, (column, tok): (usize, &str)) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::at(line, column, format!("expected a finite number, got {tok:?}"))),
    }
}
