//! Metric reports as TOML: a `[meta]` table echoing the config, then one
//! `[[cells]]` table per (category, threshold, bucket), in the order the
//! evaluator emits them. Floats are rounded to six significant digits, so
//! serializing a parsed report reproduces the file byte for byte.

use super::config::toml_error;
use super::ParseError;
use crate::metrics::REPORT_FORMAT;
use crate::metrics::MetricReport;

pub const REPORT_SIGNIFICANT_DIGITS: usize = 6;

/// Rounds to [`REPORT_SIGNIFICANT_DIGITS`] significant digits. Non-finite
/// values and zero pass through.
pub fn round_significant(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", REPORT_SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v)
}

fn round_tree(v: &mut toml::Value) {
    match v {
        toml::Value::Float(f) => *f = round_significant(*f),
        toml::Value::Array(a) => a.iter_mut().for_each(round_tree),
        toml::Value::Table(t) => t.iter_mut().for_each(|(_, v)| round_tree(v)),
        _ => {}
    }
}

pub fn serialize_report(report: &MetricReport) -> String {
    let mut tree = toml::Value::try_from(report).expect("report serializes to TOML");
    round_tree(&mut tree);
    toml::to_string(&tree).expect("report serializes to TOML")
}

pub fn parse_report(text: &str) -> Result<MetricReport, ParseError> {
    let report: MetricReport = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    if report.meta.format != REPORT_FORMAT {
        return Err(ParseError::at(1, 1, format!("unsupported report format {:?}", report.meta.format)));
    }
    report.meta.config.validate().map_err(|e| ParseError::at(1, 1, e.to_string()))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Category;
    use crate::metrics::CellReport;
    use crate::metrics::EvalConfig;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(1.23456789), 1.23457);
        assert_eq!(round_significant(-0.000123456789), -0.000123457);
        assert_eq!(round_significant(98765432.1), 98765400.0);
        assert_eq!(round_significant(f64::INFINITY), f64::INFINITY);
        assert_eq!(round_significant(0.7), 0.7);
    }

    #[test]
    fn empty_report_round_trips() {
        let r = MetricReport::empty(EvalConfig::default());
        let text = serialize_report(&r);
        assert_eq!(parse_report(&text).unwrap(), r);
    }

    #[test]
    fn wrong_format_rejected() {
        let mut r = MetricReport::empty(EvalConfig::default());
        r.meta.format = "v0".into();
        assert!(parse_report(&serialize_report(&r)).is_err());
        assert!(parse_report("[meta]\nformat = 3\n").unwrap_err().location().is_some());
    }

    fn cell_strategy() -> impl Strategy<Value = CellReport> {
        let cats = proptest::sample::select(Category::ALL.to_vec());
        (cats, 0.05..1.0f64, 0usize..5, proptest::array::uniform8(0.0..100.0f64), 0usize..500, any::<bool>(), proptest::option::of(0.0..1.0f64))
            .prop_map(|(category, iou, b, v, n, undefined, op)| CellReport {
                category,
                iou_threshold: iou,
                bucket: ["all", "0-30", "30-60", "60-90", "90-120"][b].into(),
                num_ground_truth: n,
                true_positives: n / 2,
                false_positives: n / 3,
                false_negatives: n - n / 2,
                ap: v[0],
                acs: v[1] / 100.0,
                aos: v[2] / 100.0,
                aas: v[3] / 100.0,
                agd: v[4],
                ags: v[5] / 100.0,
                rope_score: v[6],
                similarity_undefined: undefined,
                operating_score: op,
                operating_true_positives: n / 4,
            })
    }

    proptest! {
        #[test]
        fn randomized_round_trip(cells in proptest::collection::vec(cell_strategy(), 0..20), frames in 0usize..1000) {
            let mut r = MetricReport::empty(EvalConfig::default());
            r.meta.frames = frames;
            r.cells = cells;
            let text = serialize_report(&r);
            let once = parse_report(&text).unwrap();
            // Values are quantized once, after which the cycle is the identity.
            prop_assert_eq!(serialize_report(&once), text.clone());
            prop_assert_eq!(parse_report(&serialize_report(&once)).unwrap(), once.clone());
            for (a, b) in r.cells.iter().zip(&once.cells) {
                prop_assert!((a.ap - b.ap).abs() <= 1e-5 * a.ap.abs().max(1e-300));
                prop_assert_eq!(a.true_positives, b.true_positives);
            }
        }
    }
}
