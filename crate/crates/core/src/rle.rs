//! Run-length encoded strings and the translation between absolute positions
//! and `(run, offset)` pairs.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An opaque letter identified by a stable integer code.
///
/// Text front ends use the Unicode scalar value of a character as its code, so
/// the absolute-difference distance on codes is the distance between alphabet
/// positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter(pub u32);

impl Letter {
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn as_char(self) -> Option<char> {
        char::from_u32(self.0)
    }
}

impl From<char> for Letter {
    fn from(c: char) -> Self {
        Letter(c as u32)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_char() {
            Some(c) if !c.is_control() && !c.is_whitespace() => write!(f, "'{c}'"),
            _ => write!(f, "#{}", self.0),
        }
    }
}

/// `count` repetitions of `letter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Run {
    pub letter: Letter,
    pub count: u64,
}

impl Run {
    pub fn new(letter: impl Into<Letter>, count: u64) -> Self {
        Run {
            letter: letter.into(),
            count,
        }
    }
}

/// Position `M_run + offset`, with `run` zero-based and `offset` one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HatIndex {
    pub run: usize,
    pub offset: u64,
}

/// A non-empty string stored as maximal runs plus cumulative run lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RleString {
    runs: Vec<Run>,
    // prefix[r] = total length of runs 0..r; prefix[0] = 0
    prefix: Vec<u64>,
}

impl RleString {
    /// Builds from runs, merging adjacent runs that share a letter.
    pub fn from_runs(runs: impl IntoIterator<Item = Run>) -> Result<Self> {
        let mut merged: Vec<Run> = Vec::new();
        for run in runs {
            if run.count == 0 {
                return Err(Error::ZeroRunCount(run.letter));
            }
            match merged.last_mut() {
                Some(last) if last.letter == run.letter => last.count += run.count,
                _ => merged.push(run),
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyString);
        }
        let mut prefix = Vec::with_capacity(merged.len() + 1);
        prefix.push(0);
        let mut acc = 0u64;
        for run in &merged {
            acc += run.count;
            prefix.push(acc);
        }
        Ok(RleString { runs: merged, prefix })
    }

    /// Shorthand for tests and examples: each character is a letter.
    pub fn from_text(s: &str) -> Result<Self> {
        rle_encode(s.chars().map(Letter::from))
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn run(&self, r: usize) -> Run {
        self.runs[r]
    }

    /// Number of runs.
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// Length of the decoded string.
    pub fn len(&self) -> u64 {
        self.prefix[self.runs.len()]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `M_0..M_k`.
    pub fn prefix_sums(&self) -> &[u64] {
        &self.prefix
    }

    /// First absolute position (one-based) of run `r`.
    pub fn run_start(&self, r: usize) -> u64 {
        self.prefix[r] + 1
    }

    /// Last absolute position (one-based) of run `r`.
    pub fn run_end(&self, r: usize) -> u64 {
        self.prefix[r + 1]
    }

    /// Letter at one-based position `i`.
    pub fn letter_at(&self, i: u64) -> Result<Letter> {
        Ok(self.runs[self.hat_index(i)?.run].letter)
    }

    /// Binary search for the run containing one-based position `i`.
    pub fn hat_index(&self, i: u64) -> Result<HatIndex> {
        if i == 0 || i > self.len() {
            return Err(Error::PositionOutOfBounds {
                position: i,
                length: self.len(),
            });
        }
        // first r with prefix[r] >= i, then the containing run is r - 1
        let r = self.prefix.partition_point(|&p| p < i);
        let run = r - 1;
        Ok(HatIndex {
            run,
            offset: i - self.prefix[run],
        })
    }

    /// Run index of position `i`; the caller guarantees `1 <= i <= len`.
    pub(crate) fn run_of(&self, i: u64) -> usize {
        debug_assert!(i >= 1 && i <= self.len());
        self.prefix.partition_point(|&p| p < i) - 1
    }

    pub fn decode(&self) -> Vec<Letter> {
        rle_decode(self)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.letter, r.count as usize))
    }

    /// Renders the string with each letter as its character, if possible.
    pub fn to_text(&self) -> Option<String> {
        self.letters().map(Letter::as_char).collect()
    }
}

pub fn rle_encode(s: impl IntoIterator<Item = Letter>) -> Result<RleString> {
    RleString::from_runs(s.into_iter().map(|letter| Run { letter, count: 1 }))
}

pub fn rle_decode(x: &RleString) -> Vec<Letter> {
    x.letters().collect()
}

pub fn hat_index(x: &RleString, i: u64) -> Result<HatIndex> {
    x.hat_index(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn runs(x: &RleString) -> Vec<(char, u64)> {
        x.runs()
            .iter()
            .map(|r| (r.letter.as_char().unwrap(), r.count))
            .collect()
    }

    #[test]
    fn encode_examples() {
        let x = RleString::from_text("aaaaabbc").unwrap();
        assert_eq!(runs(&x), vec![('a', 5), ('b', 2), ('c', 1)]);
        assert_eq!(runs(&RleString::from_text("a").unwrap()), vec![('a', 1)]);
        assert_eq!(
            runs(&RleString::from_text("abab").unwrap()),
            vec![('a', 1), ('b', 1), ('a', 1), ('b', 1)]
        );
        assert_eq!(x.prefix_sums(), &[0, 5, 7, 8]);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(RleString::from_text(""), Err(Error::EmptyString));
        assert_eq!(RleString::from_runs(vec![]), Err(Error::EmptyString));
    }

    #[test]
    fn decode_examples() {
        let x = RleString::from_runs(vec![Run::new('a', 3)]).unwrap();
        assert_eq!(x.to_text().unwrap(), "aaa");
        let x = RleString::from_runs(vec![Run::new('a', 5), Run::new('b', 2), Run::new('c', 1)]).unwrap();
        assert_eq!(x.to_text().unwrap(), "aaaaabbc");
        let x = RleString::from_runs(vec![Run::new('a', 1), Run::new('b', 1)]).unwrap();
        assert_eq!(x.to_text().unwrap(), "ab");
    }

    #[test]
    fn adjacent_equal_runs_are_merged() {
        let x = RleString::from_runs(vec![Run::new('a', 2), Run::new('a', 3), Run::new('b', 1)]).unwrap();
        assert_eq!(runs(&x), vec![('a', 5), ('b', 1)]);
    }

    #[test]
    fn zero_count_is_rejected() {
        let err = RleString::from_runs(vec![Run::new('a', 0)]).unwrap_err();
        assert_eq!(err, Error::ZeroRunCount(Letter::from('a')));
    }

    #[test]
    fn hat_index_examples() {
        let x = RleString::from_text("aaaaabbc").unwrap();
        assert_eq!(x.hat_index(1).unwrap(), HatIndex { run: 0, offset: 1 });
        assert_eq!(x.hat_index(6).unwrap(), HatIndex { run: 1, offset: 1 });
        assert_eq!(x.hat_index(8).unwrap(), HatIndex { run: 2, offset: 1 });
        assert_eq!(x.hat_index(5).unwrap(), HatIndex { run: 0, offset: 5 });
        assert!(matches!(x.hat_index(0), Err(Error::PositionOutOfBounds { .. })));
        assert!(matches!(x.hat_index(9), Err(Error::PositionOutOfBounds { .. })));
    }
}
