//! Number formatting and record types shared by the JSON/CSV emitters.

use serde::ser::SerializeSeq;
use serde::Serializer;

/// Convention string embedded in every report.
pub const CURVATURE_CONVENTION: &str = "spray G = y^i d/dx^i - 2G^i d/dy^i; \
R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k - dG^i/dy^j dG^j/dy^k; \
Ric = R^k_k; R = Ric/F^2; Ric_ij = 1/2 (F^2 R)_{y^i y^j}";

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_exact(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// CSV cell: 17 significant digits, '.' decimal separator.
pub fn fmt_csv(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        fmt_exact(v)
    }
}

pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_exact(*v))
}

pub fn ser_f64_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&fmt_exact(*x))?;
    }
    seq.end()
}

/// Joins cells into one CSV line (no quoting needed for numeric cells and
/// identifiers without commas).
pub fn csv_line<I: IntoIterator<Item = String>>(cells: I) -> String {
    let mut line = cells.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_exact(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn csv_has_seventeen_digits() {
        assert_eq!(fmt_csv(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_csv(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
