//! Brute-force reference codebooks.
//!
//! Every length-`m` word is tested against each forbidden pattern
//! `1 0^y 1` by shifting a bit mask across it. Survivors come out in
//! ascending numeric order, which is lexicographic order with the left-most
//! bit most significant. Nothing here touches the count table.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::codec::Codeword;
use crate::counts::CodeParams;
use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: usize = 24;

/// All codewords of one code, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    params: CodeParams,
    codewords: Vec<Codeword>,
}

impl Codebook {
    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// One `index codeword` pair per line.
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        for (k, word) in self.codewords.iter().enumerate() {
            writeln!(out, "{k} {word}").unwrap();
        }
        out
    }
}

fn avoids_patterns(word: u64, m: usize, patterns: &[(u64, u64, usize)]) -> bool {
    patterns.iter().all(|&(pattern, mask, width)| {
        width > m || (0..=m - width).all(|shift| (word >> shift) & mask != pattern)
    })
}

fn to_codeword(word: u64, m: usize) -> Codeword {
    Codeword::from_bits((0..m).rev().map(|k| word >> k & 1 == 1).collect())
}

/// Enumerates `AC_{m,x}` with the default size limit.
pub fn enumerate(params: CodeParams) -> Result<Codebook> {
    enumerate_with_limit(params, DEFAULT_LIMIT)
}

pub fn enumerate_with_limit(params: CodeParams, limit: usize) -> Result<Codebook> {
    let m = params.m();
    if m > limit || m > 63 {
        return Err(Error::OracleLimit {
            m,
            limit: limit.min(63),
        });
    }
    // (pattern, mask, width) for 1 0^y 1
    let patterns: Vec<(u64, u64, usize)> = (1..=params.x())
        .map(|y| {
            let width = y + 2;
            ((1u64 << (y + 1)) | 1, (1u64 << width) - 1, width)
        })
        .collect();
    let words: Vec<u64> = (0..1u64 << m)
        .into_par_iter()
        .filter(|&w| avoids_patterns(w, m, &patterns))
        .collect();
    Ok(Codebook {
        params,
        codewords: words.into_iter().map(|w| to_codeword(w, m)).collect(),
    })
}

/// Group of a codeword by its left-most bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    /// Starts with `0`.
    LeadingZero = 1,
    /// Starts with `11`.
    LeadingOnes = 2,
    /// Starts with `1 0^(x+1)` (or is `1 0^(m-1)` when `m <= x+1`).
    LeadingGap = 3,
}

impl Group {
    pub fn label(self) -> u8 {
        self as u8
    }
}

/// Group of `codeword`; `m >= 2`, and the word is assumed valid.
pub fn classify_group(codeword: &Codeword) -> Group {
    let bits = codeword.bits();
    assert!(bits.len() >= 2, "groups are defined for m >= 2");
    match (bits[0], bits[1]) {
        (false, _) => Group::LeadingZero,
        (true, true) => Group::LeadingOnes,
        (true, false) => Group::LeadingGap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: usize, x: usize) -> CodeParams {
        CodeParams::new(m, x).unwrap()
    }

    #[test]
    fn m3_x1() {
        let book = enumerate(p(3, 1)).unwrap();
        let words: Vec<String> = book.codewords().iter().map(|c| c.to_string()).collect();
        assert_eq!(words, ["000", "001", "010", "011", "100", "110", "111"]);
    }

    #[test]
    fn m1_x3() {
        let book = enumerate(p(1, 3)).unwrap();
        assert_eq!(book.to_ascii(), "0 0\n1 1\n");
    }

    #[test]
    fn m5_x2_size() {
        assert_eq!(enumerate(p(5, 2)).unwrap().len(), 17);
    }

    #[test]
    fn sorted_strictly() {
        let book = enumerate(p(10, 2)).unwrap();
        assert!(book.codewords().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn limit() {
        assert_eq!(
            enumerate_with_limit(p(12, 1), 10),
            Err(Error::OracleLimit { m: 12, limit: 10 })
        );
        assert!(enumerate(p(25, 1)).is_err());
    }

    #[test]
    fn groups() {
        let g = |s: &str| classify_group(&s.parse().unwrap());
        assert_eq!(g("01111"), Group::LeadingZero);
        assert_eq!(g("10010"), Group::LeadingGap);
        assert_eq!(g("11111"), Group::LeadingOnes);
        assert_eq!(Group::LeadingGap.label(), 3);
    }
}
