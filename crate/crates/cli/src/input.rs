//! Readers for string files and distance specs.

use std::fs;
use std::io::Read;

use rle_dtw::{DistanceFn, Letter, MatrixDistance, RleString, Run};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// Every character is a letter; line breaks are dropped.
    Raw,
    /// One `<letter> <count>` pair per line, `#` starts a comment line.
    Rle,
}

/// Reads a whole file, or standard input for `-`.
pub fn read_source(path: &str) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io)
    }
}

pub fn parse_raw(text: &str) -> Result<RleString, CliError> {
    let letters = text.chars().filter(|c| *c != '\n' && *c != '\r').map(Letter::from);
    Ok(rle_dtw::rle_encode(letters)?)
}

pub fn parse_rle(text: &str, source: &str) -> Result<RleString, CliError> {
    let mut runs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let bad = |message: String| CliError::Parse {
            file: source.to_string(),
            line: idx + 1,
            message,
        };
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (token, count) = trimmed
            .rsplit_once(' ')
            .ok_or_else(|| bad(format!("expected `<letter> <count>`, got {trimmed:?}")))?;
        let mut chars = token.chars();
        let (Some(letter), None) = (chars.next(), chars.next()) else {
            return Err(bad(format!("letter token must be one character, got {token:?}")));
        };
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| bad(format!("run count must be a nonnegative integer, got {count:?}")))?;
        runs.push(Run::new(letter, count));
    }
    Ok(RleString::from_runs(runs)?)
}

pub fn load_string(path: &str, format: InputFormat) -> Result<RleString, CliError> {
    let text = read_source(path)?;
    match format {
        InputFormat::Raw => parse_raw(&text),
        InputFormat::Rle => parse_rle(&text, path),
    }
}

#[derive(Deserialize)]
struct MatrixFile {
    letters: Vec<String>,
    matrix: Vec<Vec<u64>>,
}

pub fn parse_matrix(text: &str, source: &str) -> Result<MatrixDistance, CliError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        file: source.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut letters = Vec::with_capacity(file.letters.len());
    for token in &file.letters {
        let mut chars = token.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => letters.push(Letter::from(c)),
            _ => {
                return Err(rle_dtw::Error::InvalidMatrix(format!("letter {token:?} is not a single character")).into())
            }
        }
    }
    Ok(MatrixDistance::new(letters, file.matrix)?)
}

/// `hamming`, `absdiff`, or `matrix:<path>`.
pub fn parse_delta(spec: &str) -> Result<DistanceFn, CliError> {
    match spec {
        "hamming" => Ok(DistanceFn::Hamming),
        "absdiff" => Ok(DistanceFn::AbsDiff),
        _ => match spec.strip_prefix("matrix:") {
            Some(path) => {
                let text = read_source(path)?;
                Ok(DistanceFn::Matrix(parse_matrix(&text, path)?))
            }
            None => Err(CliError::Usage(format!(
                "unknown distance {spec:?}; expected hamming, absdiff or matrix:<path>"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_sample() {
        let x = parse_raw("aaabbbbddd\n").unwrap();
        let runs: Vec<_> = x
            .runs()
            .iter()
            .map(|r| (r.letter.as_char().unwrap(), r.count))
            .collect();
        assert_eq!(runs, vec![('a', 3), ('b', 4), ('d', 3)]);
    }

    #[test]
    fn raw_lines_are_concatenated() {
        assert_eq!(parse_raw("ab\nba\n").unwrap(), RleString::from_text("abba").unwrap());
    }

    #[test]
    fn rle_file() {
        let x = parse_rle("# header\na 5\nb 2\n\nc 1\n", "t").unwrap();
        assert_eq!(x, RleString::from_text("aaaaabbc").unwrap());
    }

    #[test]
    fn rle_errors_carry_line_numbers() {
        match parse_rle("a 1\nb x\n", "t") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_rle("ab 1\n", "t"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_rle("a 0\n", "t"),
            Err(CliError::Core(rle_dtw::Error::ZeroRunCount(_)))
        ));
    }

    #[test]
    fn matrix_file() {
        let m = parse_matrix(r#"{"letters":["a","b"],"matrix":[[0,3],[1,0]]}"#, "m").unwrap();
        assert_eq!(m.get(Letter::from('a'), Letter::from('b')).unwrap(), 3);
        assert!(parse_matrix(r#"{"letters":["a"],"matrix":[[1]]}"#, "m").is_err());
        assert!(parse_matrix("{", "m").is_err());
    }
}
