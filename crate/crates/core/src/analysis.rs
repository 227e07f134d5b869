//! Finite-length rates, adder sizes, and constraint capacity.
//!
//! The self-clocked code spends `x` bridging bits per codeword, so its rate
//! is `s^c / (m + x)`. Capacity is `log2` of the growth rate of `N(m, x)`,
//! obtained two ways: as the root in `(1, 2)` of
//! `l^(x+2) - 2 l^(x+1) + l^x - 1`, and as the spectral radius of the
//! constraint's finite-state transition diagram.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::codec::message_size;
use crate::counts::{CodeParams, CountTable};
use crate::error::{Error, Result};

/// Lengths listed for `x = 1` in the published rate table.
pub const TABLE_M_X1: [usize; 5] = [17, 44, 76, 113, 357];
/// Lengths listed for `x = 2` in the published rate table.
pub const TABLE_M_X2: [usize; 5] = [18, 28, 64, 123, 244];

/// `numerator / denominator`, kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate {
    pub numerator: usize,
    pub denominator: usize,
}

impl Rate {
    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Value scaled by `10^4`, rounded half-up, computed exactly.
    pub fn round4(&self) -> u64 {
        let (n, d) = (self.numerator as u64, self.denominator as u64);
        (n * 20_000 + d) / (2 * d)
    }

    /// Four-decimal rendering, e.g. `0.6667`.
    pub fn decimal4(&self) -> String {
        let q = self.round4();
        format!("{}.{:04}", q / 10_000, q % 10_000)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub params: CodeParams,
    /// Message length `s^c`.
    pub s_c: usize,
    pub rate: Rate,
    /// Width of the adders the encoder and decoder need; equals `s^c`.
    pub adder_bits: usize,
    pub capacity: f64,
    /// `1 - rate / capacity`.
    pub capacity_gap: f64,
}

impl RateReport {
    pub fn gap_percent(&self) -> f64 {
        100.0 * self.capacity_gap
    }
}

const CAPACITY_TOLERANCE: f64 = 1e-12;

pub fn rate(params: CodeParams, table: &CountTable) -> Result<RateReport> {
    let s_c = message_size(params, table)?;
    let rate = Rate {
        numerator: s_c,
        denominator: params.m() + params.x(),
    };
    let capacity = capacity(params.x(), CAPACITY_TOLERANCE);
    Ok(RateReport {
        params,
        s_c,
        rate,
        adder_bits: s_c,
        capacity,
        capacity_gap: 1.0 - rate.as_f64() / capacity,
    })
}

/// One report per length in `m_list`, all for the table's `x`.
pub fn rate_table(x: usize, m_list: &[usize], table: &CountTable) -> Result<Vec<RateReport>> {
    if table.x() != x {
        return Err(Error::InvalidParams(format!(
            "count table was built for x = {}, requested x = {x}",
            table.x()
        )));
    }
    m_list
        .iter()
        .map(|&m| rate(CodeParams::clocked(m, x)?, table))
        .collect()
}

fn characteristic(lambda: f64, x: usize) -> f64 {
    let lx = lambda.powi(x as i32);
    lx * lambda * lambda - 2.0 * lx * lambda + lx - 1.0
}

/// Dominant root of `l^(x+2) = 2 l^(x+1) - l^x + 1`, by bisection on `(1, 2)`
/// until the bracket is narrower than `tolerance`.
pub fn growth_rate(x: usize, tolerance: f64) -> f64 {
    assert!(x >= 1 && tolerance > 0.0);
    // f(1) = -1 and f(2) = 2^x - 1 > 0
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if characteristic(mid, x) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Capacity of the constraint in bits per bit.
pub fn capacity(x: usize, tolerance: f64) -> f64 {
    growth_rate(x, tolerance).log2()
}

/// Finite-state transition diagram of the constraint: `x + 2` states.
///
/// State 0 is "free" (no 1 yet, or more than `x` zeros since the last one),
/// state 1 is "last bit was 1", and state `1 + j` is "`j` zeros since the
/// last 1" for `j = 1..=x`. Every state is accepting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fstd {
    x: usize,
    // next[state] = (on 0, on 1)
    next: Vec<(Option<usize>, Option<usize>)>,
}

impl Fstd {
    pub const FREE: usize = 0;
    pub const AFTER_ONE: usize = 1;

    pub fn new(x: usize) -> Self {
        assert!(x >= 1);
        let mut next = vec![(None, None); x + 2];
        next[Self::FREE] = (Some(Self::FREE), Some(Self::AFTER_ONE));
        next[Self::AFTER_ONE] = (Some(2), Some(Self::AFTER_ONE));
        for j in 1..=x {
            let state = 1 + j;
            let on_zero = if j == x { Self::FREE } else { state + 1 };
            next[state] = (Some(on_zero), None);
        }
        Fstd { x, next }
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn state_count(&self) -> usize {
        self.next.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let n = self.state_count();
        let mut a = vec![vec![0u32; n]; n];
        for (from, &(zero, one)) in self.next.iter().enumerate() {
            for to in [zero, one].into_iter().flatten() {
                a[from][to] += 1;
            }
        }
        a
    }

    pub fn step(&self, state: usize, bit: bool) -> Option<usize> {
        let (zero, one) = self.next[state];
        if bit {
            one
        } else {
            zero
        }
    }

    /// Whether the diagram, started in the free state, accepts `bits`.
    pub fn accepts(&self, bits: &[bool]) -> bool {
        bits.iter()
            .try_fold(Self::FREE, |s, &b| self.step(s, b))
            .is_some()
    }

    /// Number of accepted words of length `len`, counted by walks from the
    /// free state.
    pub fn count_words(&self, len: usize) -> BigUint {
        let n = self.state_count();
        let mut ways = vec![BigUint::zero(); n];
        ways[Self::FREE] = BigUint::one();
        for _ in 0..len {
            let mut next = vec![BigUint::zero(); n];
            for (s, w) in ways.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for t in [self.next[s].0, self.next[s].1].into_iter().flatten() {
                    next[t] += w;
                }
            }
            ways = next;
        }
        ways.into_iter().sum()
    }

    /// Perron root of the adjacency matrix, by power iteration.
    pub fn spectral_radius(&self) -> f64 {
        let a = self.adjacency();
        let n = a.len();
        // v stays normalized to unit sum, so sum(Av) is the ratio estimate
        let mut v = vec![1.0 / n as f64; n];
        let mut estimate = 0.0f64;
        for _ in 0..1_000_000 {
            let w: Vec<f64> = a
                .iter()
                .map(|row| row.iter().zip(&v).map(|(&aij, &vj)| aij as f64 * vj).sum())
                .collect();
            estimate = w.iter().sum();
            let next: Vec<f64> = w.into_iter().map(|wi| wi / estimate).collect();
            let moved = next
                .iter()
                .zip(&v)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0f64, f64::max);
            v = next;
            if moved < 1e-16 {
                break;
            }
        }
        estimate
    }

    pub fn capacity(&self) -> f64 {
        self.spectral_radius().log2()
    }
}

/// Plain-text rendering of a rate table.
pub fn render_table(reports: &[RateReport]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<20} {:>7} {:>11} {:>9} {:>8}",
        "code", "rate", "adder size", "capacity", "gap %"
    )
    .unwrap();
    for r in reports {
        writeln!(
            out,
            "{:<20} {:>7} {:>11} {:>9.4} {:>8.3}",
            format!("m={} and x={}", r.params.m(), r.params.x()),
            r.rate.decimal4(),
            format!("{} bits", r.adder_bits),
            r.capacity,
            r.gap_percent()
        )
        .unwrap();
    }
    out
}

pub const CSV_HEADER: &str = "m,x,s_c,rate,adder_bits,capacity,gap_percent";

pub fn render_csv(reports: &[RateReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.4}",
            r.params.m(),
            r.params.x(),
            r.s_c,
            r.rate.decimal4(),
            r.adder_bits,
            r.capacity,
            r.gap_percent()
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(m: usize, x: usize) -> RateReport {
        let p = CodeParams::new(m, x).unwrap();
        rate(p, &CountTable::for_params(p)).unwrap()
    }

    #[test]
    fn small_rates() {
        let r = report(5, 1);
        assert_eq!(r.s_c, 4);
        assert_eq!(r.rate.decimal4(), "0.6667");
        assert_eq!(r.rate.to_string(), "4/6");

        let r = report(76, 1);
        assert_eq!((r.rate.decimal4().as_str(), r.adder_bits), ("0.8052", 62));
        let r = report(18, 2);
        assert_eq!((r.rate.decimal4().as_str(), r.adder_bits), ("0.6500", 13));
        let r = report(2, 1);
        assert_eq!(r.rate.decimal4(), "0.3333");
    }

    #[test]
    fn rounding_is_half_up() {
        let r = Rate {
            numerator: 1,
            denominator: 8,
        };
        // 0.125 exactly
        assert_eq!(r.decimal4(), "0.1250");
        let r = Rate {
            numerator: 1,
            denominator: 32,
        };
        // 0.03125 -> 0.0313
        assert_eq!(r.decimal4(), "0.0313");
        let r = Rate {
            numerator: 3,
            denominator: 3,
        };
        assert_eq!(r.decimal4(), "1.0000");
    }

    #[test]
    fn known_capacities() {
        assert!((capacity(1, 1e-12) - 0.8114).abs() < 1e-4);
        assert!((capacity(2, 1e-12) - 0.6942).abs() < 1e-4);
    }

    #[test]
    fn fstd_shape() {
        let d = Fstd::new(1);
        assert_eq!(d.state_count(), 3);
        assert_eq!(
            d.adjacency(),
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]
        );
        assert!(d.accepts(&[true, false, false, true]));
        assert!(!d.accepts(&[true, false, true]));
        assert_eq!(d.count_words(5), BigUint::from(21u32));
    }

    #[test]
    fn rate_table_requires_matching_x() {
        let t = CountTable::new(1, 20).unwrap();
        assert!(rate_table(2, &[17], &t).is_err());
        assert!(rate_table(1, &[21], &t).is_err());
        assert!(rate_table(1, &[1], &t).is_err());
        assert_eq!(rate_table(1, &[17, 2], &t).unwrap().len(), 2);
    }

    #[test]
    fn csv_layout() {
        let t = CountTable::new(1, 17).unwrap();
        let csv = render_csv(&rate_table(1, &[17], &t).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("17,1,14,0.7778,14,0.811"));
        assert!(render_table(&rate_table(1, &[17], &t).unwrap()).contains("14 bits"));
    }
}
