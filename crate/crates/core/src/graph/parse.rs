use std::io::BufRead;

use super::format::{Column, Delimiter, FormatSpec};
use crate::error::{Error, Result};

/// One line of a rating file.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub user: String,
    pub object: String,
    pub rating: f64,
    pub timestamp: Option<i64>,
}

impl RatingRecord {
    pub fn new(user: impl Into<String>, object: impl Into<String>, rating: f64) -> Self {
        RatingRecord {
            user: user.into(),
            object: object.into(),
            rating,
            timestamp: None,
        }
    }
}

/// Parses every non-empty, non-`#` line after the header into a record.
pub fn parse_ratings<R: BufRead>(reader: R, format: &FormatSpec) -> Result<Vec<RatingRecord>> {
    format.validate()?;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if idx < format.header_lines {
            continue;
        }
        if let Some(record) = parse_line(&line, line_no, format)? {
            records.push(record);
        }
    }
    Ok(records)
}

pub fn parse_ratings_str(text: &str, format: &FormatSpec) -> Result<Vec<RatingRecord>> {
    parse_ratings(text.as_bytes(), format)
}

fn parse_line(line: &str, line_no: usize, format: &FormatSpec) -> Result<Option<RatingRecord>> {
    let line = line.trim_end_matches(['\r', '\n']);
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let fields: Vec<&str> = match &format.delimiter {
        Delimiter::Whitespace => trimmed.split_ascii_whitespace().collect(),
        Delimiter::Literal(sep) => line.split(sep.as_str()).collect(),
    };
    if fields.len() != format.columns.len() {
        return Err(Error::Parse {
            line: line_no,
            message: format!(
                "expected {} fields, found {}",
                format.columns.len(),
                fields.len()
            ),
        });
    }

    let mut user = None;
    let mut object = None;
    let mut rating = None;
    let mut timestamp = None;
    for (column, raw) in format.columns.iter().zip(fields) {
        let raw = raw.trim();
        match column {
            Column::User => user = Some(non_empty(raw, "user", line_no)?),
            Column::Object => object = Some(non_empty(raw, "object", line_no)?),
            Column::Rating => {
                let value = raw
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("rating `{raw}` is not a number"),
                    })?;
                if !format.scale.contains(value) {
                    return Err(Error::RatingOutOfRange {
                        line: line_no,
                        rating: value,
                        min: format.scale.min,
                        max: format.scale.max,
                    });
                }
                rating = Some(value);
            }
            Column::Timestamp => {
                timestamp = Some(raw.parse::<i64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("timestamp `{raw}` is not an integer"),
                })?)
            }
            Column::Skip => {}
        }
    }

    // validate() guarantees the three mandatory columns are present.
    Ok(Some(RatingRecord {
        user: user.unwrap(),
        object: object.unwrap(),
        rating: rating.unwrap(),
        timestamp,
    }))
}

fn non_empty(raw: &str, what: &str, line_no: usize) -> Result<String> {
    if raw.is_empty() {
        Err(Error::Parse {
            line: line_no,
            message: format!("empty {what} id"),
        })
    } else {
        Ok(raw.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn movielens_line() {
        let recs = parse_ratings_str("196\t242\t3\t881250949\n", &FormatSpec::movielens()).unwrap();
        assert_eq!(
            recs,
            vec![RatingRecord {
                user: "196".into(),
                object: "242".into(),
                rating: 3.0,
                timestamp: Some(881250949),
            }]
        );
    }

    #[test]
    fn empty_stream() {
        assert!(parse_ratings_str("", &FormatSpec::movielens()).unwrap().is_empty());
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        let text = "# header comment\n1\t2\t5\t0\n\n   \n2\t3\t1\t0\r\n";
        let recs = parse_ratings_str(text, &FormatSpec::movielens()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].object, "3");
    }

    #[test]
    fn wrong_arity_reports_line() {
        let err = parse_ratings_str("1\t2\t5\t0\n1\t2\t5\n", &FormatSpec::movielens()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn non_numeric_rating() {
        let err = parse_ratings_str("1\t2\tfive\t0\n", &FormatSpec::movielens()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rating_out_of_scale() {
        let err = parse_ratings_str("1\t2\t3\t0\n1\t3\t6\t0\n", &FormatSpec::movielens()).unwrap_err();
        assert_eq!(
            err,
            Error::RatingOutOfRange {
                line: 2,
                rating: 6.0,
                min: 1.0,
                max: 5.0
            }
        );
    }

    #[test]
    fn custom_format_with_header() {
        let spec: FormatSpec = "delimited(sep=comma;cols=_uor;max=10;header=1)".parse().unwrap();
        let text = "id,user,item,score\n0,alice,x,7\n1,bob,y,10\n";
        let recs = parse_ratings_str(text, &spec).unwrap();
        assert_eq!(recs[0], RatingRecord::new("alice", "x", 7.0));
        assert_eq!(recs[1].rating, 10.0);
    }

    #[test]
    fn whitespace_delimiter() {
        let spec: FormatSpec = "delimited(sep=whitespace;cols=uor)".parse().unwrap();
        let recs = parse_ratings_str("  1   2 \t 4\n", &spec).unwrap();
        assert_eq!(recs[0], RatingRecord::new("1", "2", 4.0));
    }
}
