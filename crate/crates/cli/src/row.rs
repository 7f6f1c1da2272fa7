//! One sample of a capacity curve and its CSV / JSON encodings.

use decohere::capacity::{closed_form_capacity, evaluate_capacity, OptimizerOptions};
use decohere::channels::ChannelSpec;
use serde::Serialize;

pub const CSV_HEADER: &str = "family,d,k,x,q_closed,q_numeric,gap";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub family: String,
    pub d: usize,
    pub k: usize,
    pub x: f64,
    pub q_closed: f64,
    pub q_numeric: Option<f64>,
    pub gap: Option<f64>,
}

impl CurveRow {
    /// Closed form only, or closed form plus diagonal maximization when `numeric` is set.
    pub fn compute(
        spec: &ChannelSpec,
        numeric: Option<&OptimizerOptions>,
    ) -> decohere::Result<Self> {
        let (q_closed, q_numeric, gap) = match numeric {
            Some(opts) => {
                let r = evaluate_capacity(spec, opts)?;
                (r.q_closed, Some(r.q_numeric), Some(r.gap))
            }
            None => (closed_form_capacity(spec), None, None),
        };
        Ok(Self {
            family: spec.family.to_string(),
            d: spec.d,
            k: spec.k,
            x: spec.x,
            q_closed,
            q_numeric,
            gap,
        })
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.family,
            self.d,
            self.k,
            format_sig(self.x),
            format_sig(self.q_closed),
            opt(self.q_numeric),
            opt(self.gap)
        )
    }
}

/// Header plus one line per row, LF terminated.
pub fn rows_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Ten significant digits with trailing zeros dropped, like C's `%.10g`. Magnitudes
/// below 1e-15 print as `0`.
pub fn format_sig(v: f64) -> String {
    if v.abs() < 1e-15 {
        return "0".to_string();
    }
    let sci = format!("{v:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..10).contains(&exp) {
        let decimals = (9 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-2e-16), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(12f64.log2()), "3.584962501");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(0.07), "0.07");
        assert_eq!(format_sig(3.3e-9), "3.3e-9");
        assert_eq!(format_sig(9.99999999999), "10");
        assert_eq!(format_sig(-1234.5), "-1234.5");
        assert_eq!(format_sig(2.5e12), "2.5e12");
    }

    #[test]
    fn csv_leaves_numeric_columns_empty() {
        let spec = ChannelSpec::fully(12, 0.0).unwrap();
        let row = CurveRow::compute(&spec, None).unwrap();
        assert_eq!(row.to_csv(), "fully,12,1,0,3.584962501,,");
    }

    #[test]
    fn numeric_row_has_small_gap() {
        let spec = ChannelSpec::weak(6, 2, 0.5).unwrap();
        let row = CurveRow::compute(&spec, Some(&OptimizerOptions::default())).unwrap();
        assert!(row.gap.unwrap() <= 1e-6);
        let json = serde_json::to_string(&row).unwrap();
        assert!(json.contains("\"q_numeric\""));
    }
}
