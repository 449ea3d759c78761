//! Evaluation config as TOML. Every key is optional and falls back to the
//! defaults of [`EvalConfig`]; unknown keys are rejected.
//!
//! ```toml
//! omega_ap = 8.0
//! omega_similarity = 2.0
//! ags_normalizer = "predicted"
//!
//! [iou_thresholds]
//! car = [0.5, 0.7]
//! pedestrian = [0.25, 0.5]
//!
//! [[range_buckets]]
//! name = "all"
//! z_min = 0.0
//! z_max = inf
//! ```

use super::{line_column, ParseError};
use crate::metrics::EvalConfig;

pub(crate) fn toml_error(text: &str, e: &toml::de::Error) -> ParseError {
    let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
    ParseError::at(line, column, e.message().trim().to_string())
}

/// Parses and validates a config.
pub fn parse_eval_config(text: &str) -> Result<EvalConfig, ParseError> {
    let cfg: EvalConfig = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    cfg.validate().map_err(|e| ParseError::at(1, 1, e.to_string()))?;
    Ok(cfg)
}

pub fn format_eval_config(cfg: &EvalConfig) -> String {
    toml::to_string(cfg).expect("config serializes to TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Category;
    use crate::metrics::AgsNormalizer;

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_eval_config("").unwrap(), EvalConfig::default());
    }

    #[test]
    fn default_round_trips() {
        let cfg = EvalConfig::default();
        let text = format_eval_config(&cfg);
        assert_eq!(parse_eval_config(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_override() {
        let cfg = parse_eval_config("ags_normalizer = \"ground_truth\"\n[iou_thresholds]\ncar = [0.7]\n").unwrap();
        assert_eq!(cfg.ags_normalizer, AgsNormalizer::GroundTruth);
        assert_eq!(cfg.iou_thresholds.len(), 1);
        assert_eq!(cfg.iou_thresholds[&Category::Car], vec![0.7]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_eval_config("omega_ap = 8.0\nbogus = 1\n").unwrap_err();
        assert_eq!(e.location().map(|l| l.0), Some(2));
        let e = parse_eval_config("[iou_thresholds]\nspaceship = [0.5]\n").unwrap_err();
        assert_eq!(e.location().map(|l| l.0), Some(2));
        assert!(parse_eval_config("[iou_thresholds]\ncar = [1.5]\n").is_err());
        assert!(parse_eval_config("recall_positions = 0\n").is_err());
    }
}
