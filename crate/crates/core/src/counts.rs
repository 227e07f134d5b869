//! Code cardinalities.
//!
//! `N(m, x)` is the number of binary words of length `m` that avoid every
//! pattern `1 0^y 1` with `1 <= y <= x`. It satisfies
//!
//! ```text
//! N(i) = 1                              for i <= 0
//! N(1) = 2
//! N(i) = 2 N(i-1) - N(i-2) + N(i-x-2)   for i >= 2
//! ```
//!
//! The three terms split the code by its left-most bits: words starting
//! with `0`, with `11`, and with `1 0^(x+1)`.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// The pair `(m, x)`: codeword length and the longest forbidden zero gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    m: usize,
    x: usize,
}

impl CodeParams {
    pub fn new(m: usize, x: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::params(format!("m must be at least 1, got {m}")));
        }
        if x < 1 {
            return Err(Error::params(format!("x must be at least 1, got {x}")));
        }
        Ok(CodeParams { m, x })
    }

    /// Like [`CodeParams::new`], but also requires `m >= 2` as needed by the
    /// self-clocked code.
    pub fn clocked(m: usize, x: usize) -> Result<Self> {
        let params = Self::new(m, x)?;
        params.require_clocked()?;
        Ok(params)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub(crate) fn require_clocked(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::params(format!(
                "the self-clocked code needs m >= 2, got {}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Memoized `N(i, x)` for `-(x+1) <= i <= max_index`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    x: usize,
    max_index: usize,
    // values[k] = N(k - (x+1), x)
    values: Vec<BigUint>,
}

impl CountTable {
    /// Builds the table for constraint parameter `x` up to `N(max_index, x)`.
    pub fn new(x: usize, max_index: usize) -> Result<Self> {
        if x < 1 {
            return Err(Error::params(format!("x must be at least 1, got {x}")));
        }
        let offset = x + 1;
        let mut values: Vec<BigUint> = Vec::with_capacity(offset + max_index + 1);
        values.resize(offset + 1, BigUint::one());
        if max_index >= 1 {
            values.push(BigUint::from(2u32));
        }
        for i in 2..=max_index {
            let k = offset + i;
            // 2N(i-1) + N(i-x-2) - N(i-2); the sum is taken first so the
            // subtraction never goes negative.
            let mut next = &values[k - 1] << 1u32;
            next += &values[k - x - 2];
            next -= &values[k - 2];
            values.push(next);
        }
        Ok(CountTable {
            x,
            max_index,
            values,
        })
    }

    /// Table sized for the code `params` (covers index `m`).
    pub fn for_params(params: CodeParams) -> Self {
        Self::new(params.x, params.m).expect("CodeParams are validated")
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn min_index(&self) -> isize {
        -((self.x + 1) as isize)
    }

    /// `N(i, x)`, or an error when `i` is outside the stored range.
    pub fn get(&self, i: isize) -> Result<&BigUint> {
        if i < self.min_index() || i > self.max_index as isize {
            return Err(Error::TableTooShort {
                requested: i,
                max_index: self.max_index,
            });
        }
        Ok(&self.values[(i - self.min_index()) as usize])
    }

    /// `N(i, x)` for an index the caller has already range-checked.
    pub(crate) fn at(&self, i: isize) -> &BigUint {
        &self.values[(i - self.min_index()) as usize]
    }

    /// `N(m, x)` for the table's own `x`.
    pub fn cardinality(&self, m: usize) -> Result<&BigUint> {
        self.get(m as isize)
    }

    pub(crate) fn check_covers(&self, params: CodeParams) -> Result<()> {
        if params.x != self.x {
            return Err(Error::params(format!(
                "count table was built for x = {}, code has x = {}",
                self.x, params.x
            )));
        }
        if params.m > self.max_index {
            return Err(Error::TableTooShort {
                requested: params.m as isize,
                max_index: self.max_index,
            });
        }
        Ok(())
    }

    /// Iterates `(i, N(i, x))` over the whole stored range.
    pub fn iter(&self) -> impl Iterator<Item = (isize, &BigUint)> + '_ {
        let min = self.min_index();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (min + k as isize, v))
    }
}

/// Convenience wrapper: table for `params` up to `max_index`.
pub fn build_table(params: CodeParams, max_index: usize) -> Result<CountTable> {
    CountTable::new(params.x(), max_index)
}

/// Sizes of the three groups of `AC_{m,x}`, `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCounts {
    /// Words starting with `0`.
    pub leading_zero: BigUint,
    /// Words starting with `11`.
    pub leading_ones: BigUint,
    /// Words starting with `1 0^(x+1)`, or the lone word `1 0^(m-1)` when
    /// `m <= x + 1`.
    pub leading_gap: BigUint,
}

impl GroupCounts {
    pub fn total(&self) -> BigUint {
        &self.leading_zero + &self.leading_ones + &self.leading_gap
    }
}

pub fn group_counts(params: CodeParams, table: &CountTable) -> Result<GroupCounts> {
    params.require_clocked()?;
    table.check_covers(params)?;
    let m = params.m as isize;
    let x = params.x as isize;
    Ok(GroupCounts {
        leading_zero: table.at(m - 1).clone(),
        leading_ones: table.at(m - 1) - table.at(m - 2),
        leading_gap: table.at(m - x - 2).clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: usize, i: usize) -> BigUint {
        CountTable::new(x, i).unwrap().cardinality(i).unwrap().clone()
    }

    #[test]
    fn small_x1_values() {
        let t = CountTable::new(1, 5).unwrap();
        let got: Vec<u32> = (1..=5)
            .map(|i| u32::try_from(t.cardinality(i).unwrap()).unwrap())
            .collect();
        assert_eq!(got, vec![2, 4, 7, 12, 21]);
    }

    #[test]
    fn base_cases() {
        let t = CountTable::new(3, 0).unwrap();
        assert_eq!(t.get(0).unwrap(), &BigUint::one());
        assert_eq!(t.get(-4).unwrap(), &BigUint::one());
        assert!(t.get(-5).is_err());
        assert!(t.get(1).is_err());
        assert_eq!(t.iter().count(), 5);
    }

    #[test]
    fn x2_length5() {
        assert_eq!(n(2, 5), BigUint::from(17u32));
    }

    #[test]
    fn length_two_is_always_four() {
        for x in 1..=8 {
            assert_eq!(n(x, 2), BigUint::from(4u32), "x = {x}");
        }
    }

    #[test]
    fn strictly_increasing() {
        let t = CountTable::new(3, 60).unwrap();
        for i in 1..60 {
            assert!(t.get(i).unwrap() < t.get(i + 1).unwrap());
        }
    }

    #[test]
    fn long_table_does_not_overflow() {
        let t = CountTable::new(1, 357).unwrap();
        let v = t.cardinality(357).unwrap();
        assert!(v.bits() > 128);
    }

    #[test]
    fn invalid_params() {
        assert!(CodeParams::new(0, 1).is_err());
        assert!(CodeParams::new(3, 0).is_err());
        assert!(CountTable::new(0, 4).is_err());
        assert!(CodeParams::clocked(1, 1).is_err());
        assert!(CodeParams::new(1, 1).is_ok());
    }

    #[test]
    fn groups() {
        let p = CodeParams::new(5, 1).unwrap();
        let t = CountTable::for_params(p);
        let g = group_counts(p, &t).unwrap();
        assert_eq!(g.leading_zero, BigUint::from(12u32));
        assert_eq!(g.leading_ones, BigUint::from(5u32));
        assert_eq!(g.leading_gap, BigUint::from(4u32));
        assert_eq!(&g.total(), t.cardinality(5).unwrap());

        let p = CodeParams::new(2, 1).unwrap();
        let g = group_counts(p, &CountTable::for_params(p)).unwrap();
        assert_eq!(
            (g.leading_zero, g.leading_ones, g.leading_gap),
            (BigUint::from(2u32), BigUint::one(), BigUint::one())
        );

        let p = CodeParams::new(3, 5).unwrap();
        let g = group_counts(p, &CountTable::for_params(p)).unwrap();
        assert_eq!(g.leading_gap, BigUint::one());
    }

    #[test]
    fn group_counts_needs_covering_table() {
        let p = CodeParams::new(6, 1).unwrap();
        let short = CountTable::new(1, 5).unwrap();
        assert!(matches!(
            group_counts(p, &short),
            Err(Error::TableTooShort { .. })
        ));
        let wrong_x = CountTable::new(2, 10).unwrap();
        assert!(group_counts(p, &wrong_x).is_err());
    }
}
