//! Declarative description of a delimited rating file.
//!
//! A format is either one of the named presets or a `delimited(...)`
//! expression with `;`-separated `key=value` options:
//!
//! ```text
//! movielens                       tab, user object rating timestamp, scale 1..5
//! ml1m                            "::", user object rating timestamp, scale 1..5
//! delimited(sep=comma;cols=uor;min=1;max=10;header=1)
//! ```
//!
//! `cols` is a string of column letters: `u` user, `o` object, `r` rating,
//! `t` timestamp, `_` ignored field. `sep` accepts `tab`, `comma`, `space`,
//! `semicolon`, `pipe`, `whitespace` (runs of blanks) or a literal string.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    User,
    Object,
    Rating,
    Timestamp,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delimiter {
    /// Any run of ASCII whitespace.
    Whitespace,
    Literal(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingScale {
    pub min: f64,
    pub max: f64,
}

impl RatingScale {
    pub fn contains(&self, rating: f64) -> bool {
        rating >= self.min && rating <= self.max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormatSpec {
    pub delimiter: Delimiter,
    pub columns: Vec<Column>,
    pub scale: RatingScale,
    /// Leading lines skipped before parsing (headers).
    pub header_lines: usize,
}

impl Default for FormatSpec {
    fn default() -> Self {
        FormatSpec::movielens()
    }
}

impl FormatSpec {
    /// MovieLens-100K `u.data`: tab separated user, item, rating, timestamp.
    pub fn movielens() -> Self {
        FormatSpec {
            delimiter: Delimiter::Literal("\t".into()),
            columns: vec![Column::User, Column::Object, Column::Rating, Column::Timestamp],
            scale: RatingScale { min: 1.0, max: 5.0 },
            header_lines: 0,
        }
    }

    /// MovieLens-1M `ratings.dat`.
    pub fn movielens_1m() -> Self {
        FormatSpec {
            delimiter: Delimiter::Literal("::".into()),
            ..FormatSpec::movielens()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let count = |c: Column| self.columns.iter().filter(|&&x| x == c).count();
        if count(Column::User) != 1 || count(Column::Object) != 1 || count(Column::Rating) != 1 {
            return Err(Error::Format(
                "columns must name exactly one user, object and rating field".into(),
            ));
        }
        if count(Column::Timestamp) > 1 {
            return Err(Error::Format("at most one timestamp column".into()));
        }
        if !(self.scale.min.is_finite() && self.scale.max.is_finite()) || self.scale.min > self.scale.max {
            return Err(Error::Format(format!(
                "bad rating scale [{}, {}]",
                self.scale.min, self.scale.max
            )));
        }
        if let Delimiter::Literal(s) = &self.delimiter {
            if s.is_empty() {
                return Err(Error::Format("empty delimiter".into()));
            }
        }
        Ok(())
    }

    pub fn check_threshold(&self, threshold: f64) -> Result<()> {
        if threshold.is_finite() && self.scale.contains(threshold) {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "threshold {} outside rating scale [{}, {}]",
                threshold, self.scale.min, self.scale.max
            )))
        }
    }
}

fn parse_delimiter(value: &str) -> Delimiter {
    match value {
        "tab" | "\\t" => Delimiter::Literal("\t".into()),
        "comma" => Delimiter::Literal(",".into()),
        "space" => Delimiter::Literal(" ".into()),
        "semicolon" => Delimiter::Literal(";".into()),
        "pipe" => Delimiter::Literal("|".into()),
        "whitespace" | "ws" => Delimiter::Whitespace,
        other => Delimiter::Literal(other.to_string()),
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Format(format!("{key}: `{value}` is not a finite number")))
}

impl FromStr for FormatSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "movielens" | "ml100k" | "udata" => return Ok(FormatSpec::movielens()),
            "ml1m" => return Ok(FormatSpec::movielens_1m()),
            _ => {}
        }
        let body = s
            .strip_prefix("delimited(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::Format(format!("unknown format `{s}`")))?;

        let mut spec = FormatSpec::movielens();
        for option in body.split(';').map(str::trim).filter(|o| !o.is_empty()) {
            let (key, value) = option
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, got `{option}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "sep" => spec.delimiter = parse_delimiter(value),
                "cols" => {
                    spec.columns = value
                        .chars()
                        .map(|c| match c {
                            'u' => Ok(Column::User),
                            'o' | 'i' => Ok(Column::Object),
                            'r' => Ok(Column::Rating),
                            't' => Ok(Column::Timestamp),
                            '_' => Ok(Column::Skip),
                            other => Err(Error::Format(format!("unknown column letter `{other}`"))),
                        })
                        .collect::<Result<_>>()?
                }
                "min" => spec.scale.min = parse_number(key, value)?,
                "max" => spec.scale.max = parse_number(key, value)?,
                "header" => {
                    spec.header_lines = value
                        .parse()
                        .map_err(|_| Error::Format(format!("header: `{value}` is not a count")))?
                }
                other => return Err(Error::Format(format!("unknown option `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FormatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match &self.delimiter {
            Delimiter::Whitespace => "whitespace".to_string(),
            Delimiter::Literal(s) if s == "\t" => "tab".to_string(),
            Delimiter::Literal(s) if s == "," => "comma".to_string(),
            Delimiter::Literal(s) if s == " " => "space".to_string(),
            Delimiter::Literal(s) if s == ";" => "semicolon".to_string(),
            Delimiter::Literal(s) => s.clone(),
        };
        let cols: String = self
            .columns
            .iter()
            .map(|c| match c {
                Column::User => 'u',
                Column::Object => 'o',
                Column::Rating => 'r',
                Column::Timestamp => 't',
                Column::Skip => '_',
            })
            .collect();
        write!(
            f,
            "delimited(sep={sep};cols={cols};min={};max={};header={})",
            self.scale.min, self.scale.max, self.header_lines
        )
    }
}
