//! Table serialization. CSV is the primary interchange format and must
//! round-trip byte-identically through [`parse_csv`] → [`to_csv`]; JSON is
//! a convenience emission with the same field names.

use thiserror::Error;

use crate::table::{
    format_float, residual_from_label, scheme_from_label, sic_from_label, Metric, Row, RowFlag,
    RowUser,
};

pub const CSV_HEADER: &str =
    "scheme,user,sic,residual,metric,pu_db,m,theta,value,std_error,ci95,trials,flags";

#[derive(Debug, Error, PartialEq)]
pub enum EmitError {
    #[error("line 1: expected header {CSV_HEADER:?}, got {0:?}")]
    Header(String),
    #[error("line {line}: expected 13 fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: unknown {what} {got:?}")]
    UnknownLabel {
        line: usize,
        what: &'static str,
        got: String,
    },
    #[error("line {line}: cannot parse {what} from {got:?}")]
    Number {
        line: usize,
        what: &'static str,
        got: String,
    },
    #[error("line {line}: unterminated quoted field")]
    UnterminatedQuote { line: usize },
}

// ---- emission ---------------------------------------------------------------

/// Quote a field if it contains a comma, quote, or line break.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn flags_field(flags: &[RowFlag]) -> String {
    flags
        .iter()
        .map(|f| f.label())
        .collect::<Vec<_>>()
        .join(";")
}

fn csv_record(row: &Row) -> String {
    let fields = [
        csv_escape(row.scheme.label()),
        csv_escape(row.user.label()),
        row.sic.map_or("-".to_string(), |s| s.label().to_string()),
        row.residual
            .map_or("-".to_string(), |r| r.label().to_string()),
        csv_escape(row.metric.label()),
        format_float(row.pu_db),
        row.m.to_string(),
        row.theta.map_or(String::new(), format_float),
        format_float(row.value),
        row.std_error.map_or(String::new(), format_float),
        row.ci95.map_or(String::new(), format_float),
        row.trials.map_or(String::new(), |t| t.to_string()),
        csv_escape(&flags_field(&row.flags)),
    ];
    fields.join(",")
}

/// Serialize rows to CSV: header line, one record per row, LF endings,
/// trailing newline. An empty table is a header-only file.
pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_record(row));
        out.push('\n');
    }
    out
}

fn json_string(s: &str) -> String {
    // none of our labels need escapes, but stay correct for any input
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Finite values are emitted as bare JSON numbers in the same notation as
/// the CSV; infinities and NaN have no JSON number form and become strings.
fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        json_string(&format_float(x))
    }
}

fn json_object(row: &Row) -> String {
    let opt_str = |v: Option<&str>| v.map_or("null".to_string(), json_string);
    let opt_num = |v: Option<f64>| v.map_or("null".to_string(), json_number);
    let flags = row
        .flags
        .iter()
        .map(|f| json_string(f.label()))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"scheme\":{},\"user\":{},\"sic\":{},\"residual\":{},\"metric\":{},\
         \"pu_db\":{},\"m\":{},\"theta\":{},\"value\":{},\"std_error\":{},\
         \"ci95\":{},\"trials\":{},\"flags\":[{}]}}",
        json_string(row.scheme.label()),
        json_string(row.user.label()),
        opt_str(row.sic.map(|s| s.label())),
        opt_str(row.residual.map(|r| r.label())),
        json_string(row.metric.label()),
        json_number(row.pu_db),
        row.m,
        opt_num(row.theta),
        json_number(row.value),
        opt_num(row.std_error),
        opt_num(row.ci95),
        row.trials.map_or("null".to_string(), |t| t.to_string()),
        flags,
    )
}

/// Serialize rows to a JSON array, one object per line, trailing newline.
/// An empty table is `[]`.
pub fn to_json(rows: &[Row]) -> String {
    if rows.is_empty() {
        return "[]\n".to_string();
    }
    let body = rows
        .iter()
        .map(json_object)
        .collect::<Vec<_>>()
        .join(",\n");
    format!("[\n{body}\n]\n")
}

// ---- parsing ----------------------------------------------------------------

fn split_record(line: &str, line_no: usize) -> Result<Vec<String>, EmitError> {
    let mut fields = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        let mut field = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        field.push('"');
                    }
                    Some('"') => break,
                    Some(c) => field.push(c),
                    None => return Err(EmitError::UnterminatedQuote { line: line_no }),
                }
            }
        } else {
            while chars.peek().is_some_and(|&c| c != ',') {
                field.push(chars.next().unwrap());
            }
        }
        fields.push(field);
        if chars.next().is_none() {
            return Ok(fields);
        }
    }
}

fn parse_f64(field: &str, what: &'static str, line: usize) -> Result<f64, EmitError> {
    field.parse().map_err(|_| EmitError::Number {
        line,
        what,
        got: field.to_string(),
    })
}

fn parse_opt_f64(
    field: &str,
    what: &'static str,
    line: usize,
) -> Result<Option<f64>, EmitError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(field, what, line).map(Some)
    }
}

fn parse_record(fields: &[String], line: usize) -> Result<Row, EmitError> {
    let unknown = |what: &'static str, got: &str| EmitError::UnknownLabel {
        line,
        what,
        got: got.to_string(),
    };
    let scheme = scheme_from_label(&fields[0]).ok_or_else(|| unknown("scheme", &fields[0]))?;
    let user = RowUser::from_label(&fields[1]).ok_or_else(|| unknown("user", &fields[1]))?;
    let sic = match fields[2].as_str() {
        "-" => None,
        s => Some(sic_from_label(s).ok_or_else(|| unknown("sic", s))?),
    };
    let residual = match fields[3].as_str() {
        "-" => None,
        s => Some(residual_from_label(s).ok_or_else(|| unknown("residual", s))?),
    };
    let metric = Metric::from_label(&fields[4]).ok_or_else(|| unknown("metric", &fields[4]))?;
    let pu_db = parse_f64(&fields[5], "pu_db", line)?;
    let m = fields[6].parse().map_err(|_| EmitError::Number {
        line,
        what: "m",
        got: fields[6].clone(),
    })?;
    let theta = parse_opt_f64(&fields[7], "theta", line)?;
    let value = parse_f64(&fields[8], "value", line)?;
    let std_error = parse_opt_f64(&fields[9], "std_error", line)?;
    let ci95 = parse_opt_f64(&fields[10], "ci95", line)?;
    let trials = if fields[11].is_empty() {
        None
    } else {
        Some(fields[11].parse().map_err(|_| EmitError::Number {
            line,
            what: "trials",
            got: fields[11].clone(),
        })?)
    };
    let flags = if fields[12].is_empty() {
        Vec::new()
    } else {
        fields[12]
            .split(';')
            .map(|s| RowFlag::from_label(s).ok_or_else(|| unknown("flag", s)))
            .collect::<Result<_, _>>()?
    };
    Ok(Row {
        scheme,
        user,
        sic,
        residual,
        metric,
        pu_db,
        m,
        theta,
        value,
        std_error,
        ci95,
        trials,
        flags,
    })
}

/// Parse a CSV document produced by [`to_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<Row>, EmitError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != CSV_HEADER {
        return Err(EmitError::Header(header.to_string()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let fields = split_record(line, line_no)?;
        if fields.len() != 13 {
            return Err(EmitError::FieldCount {
                line: line_no,
                got: fields.len(),
            });
        }
        rows.push(parse_record(&fields, line_no)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ristw_core::mcsim::ResidualMode;
    use ristw_core::model::{Scheme, SicMode, User};

    fn sample_rows() -> Vec<Row> {
        vec![
            Row {
                scheme: Scheme::RisTwNoma,
                user: RowUser::Single(User::D1),
                sic: Some(SicMode::Imperfect),
                residual: Some(ResidualMode::Averaged),
                metric: Metric::OutageMc,
                pu_db: 15.0,
                m: 8,
                theta: None,
                value: 3.914259942e-2,
                std_error: Some(1.23e-4),
                ci95: Some(2.4108e-4),
                trials: Some(1_000_000),
                flags: vec![RowFlag::LowConfidence],
            },
            Row {
                scheme: Scheme::TwrOma,
                user: RowUser::Both,
                sic: None,
                residual: None,
                metric: Metric::ThroughputDl,
                pu_db: -5.0,
                m: 8,
                theta: Some(0.55),
                value: 2.75,
                std_error: None,
                ci95: None,
                trials: None,
                flags: vec![],
            },
            Row {
                scheme: Scheme::RisTwNoma,
                user: RowUser::Single(User::D2),
                sic: None,
                residual: None,
                metric: Metric::OutageAsymptotic,
                pu_db: 0.0,
                m: 8,
                theta: Some(1.0),
                value: f64::INFINITY,
                std_error: None,
                ci95: None,
                trials: None,
                flags: vec![RowFlag::Clamped, RowFlag::LowConfidence],
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let csv = to_csv(&sample_rows());
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(to_csv(&parsed), csv);
        // and the non-finite value survives
        assert!(parsed[2].value.is_infinite());
    }

    #[test]
    fn empty_table_emits_header_only_csv_and_empty_json() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(to_json(&[]), "[]\n");
        assert_eq!(parse_csv(&format!("{CSV_HEADER}\n")).unwrap(), vec![]);
    }

    #[test]
    fn csv_layout_is_stable() {
        let csv = to_csv(&sample_rows()[..1]);
        let expected = format!(
            "{CSV_HEADER}\n\
             ris_tw_noma,d1,ipsic,averaged,outage_mc,1.500000000e1,8,,\
             3.914259942e-2,1.230000000e-4,2.410800000e-4,1000000,low_confidence\n"
        );
        assert_eq!(csv, expected);
    }

    #[test]
    fn json_encodes_missing_fields_as_null_and_nonfinite_as_strings() {
        let json = to_json(&sample_rows());
        assert!(json.starts_with("[\n{\"scheme\":\"ris_tw_noma\""));
        assert!(json.ends_with("}\n]\n"));
        assert!(json.contains("\"residual\":null"));
        assert!(json.contains("\"value\":\"inf\""));
        assert!(json.contains("\"trials\":1000000"));
        assert!(json.contains("\"flags\":[\"clamped\",\"low_confidence\"]"));
        assert!(json.contains("\"pu_db\":-5.000000000e0"));
    }

    #[test]
    fn quoting_shields_delimiters_and_quotes() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
        let fields = split_record("\"a,b\",c,\"say \"\"hi\"\"\"", 1).unwrap();
        assert_eq!(fields, vec!["a,b", "c", "say \"hi\""]);
    }

    #[test]
    fn malformed_documents_are_rejected_with_positions() {
        assert!(matches!(parse_csv("bogus\n"), Err(EmitError::Header(_))));
        let short = format!("{CSV_HEADER}\na,b,c\n");
        assert!(matches!(
            parse_csv(&short),
            Err(EmitError::FieldCount { line: 2, got: 3 })
        ));
        let bad = to_csv(&sample_rows()[..1]).replace("ris_tw_noma", "nomaris");
        assert!(matches!(
            parse_csv(&bad),
            Err(EmitError::UnknownLabel { what: "scheme", .. })
        ));
    }
}
