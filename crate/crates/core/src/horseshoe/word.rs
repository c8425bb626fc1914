use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest word `enumerate_admissible_words` will produce.
pub const MAX_WORD_LEN: usize = 30;

/// A finite binary word with no two adjacent `1`s.
///
/// When `cyclic` is set the word is read around a circle, so a `1` at both
/// ends is also forbidden; cyclic words are the repeating blocks of periodic
/// points of the golden-mean shift.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItineraryWord {
    symbols: Vec<u8>,
    cyclic: bool,
}

impl ItineraryWord {
    pub fn new(symbols: Vec<u8>, cyclic: bool) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidWord {
                reason: "empty word".into(),
            });
        }
        if let Some(&s) = symbols.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidWord {
                reason: format!("symbol {s} is not 0 or 1"),
            });
        }
        if !is_admissible(&symbols, cyclic) {
            return Err(Error::InvalidWord {
                reason: format!(
                    "{} contains 11{}",
                    render(&symbols),
                    if cyclic { " (cyclically)" } else { "" }
                ),
            });
        }
        Ok(ItineraryWord { symbols, cyclic })
    }

    pub fn linear(symbols: Vec<u8>) -> Result<Self> {
        Self::new(symbols, false)
    }

    pub fn cyclic(symbols: Vec<u8>) -> Result<Self> {
        Self::new(symbols, true)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Cyclic shift by `k` places to the left.
    pub fn rotated(&self, k: usize) -> ItineraryWord {
        let mut symbols = self.symbols.clone();
        let n = symbols.len();
        symbols.rotate_left(k % n);
        ItineraryWord {
            symbols,
            cyclic: self.cyclic,
        }
    }

    /// The linear word obtained by writing this word `times` times.
    pub fn repeated(&self, times: usize) -> Result<ItineraryWord> {
        let symbols: Vec<u8> = self
            .symbols
            .iter()
            .copied()
            .cycle()
            .take(self.symbols.len() * times)
            .collect();
        ItineraryWord::linear(symbols)
    }

    /// Least period of the word as a cyclic sequence.
    pub fn primitive_period(&self) -> usize {
        let n = self.symbols.len();
        (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| self.symbols[i] == self.symbols[(i + d) % n]))
            .unwrap_or(n)
    }
}

pub fn is_admissible(symbols: &[u8], cyclic: bool) -> bool {
    let linear_ok = symbols.windows(2).all(|w| !(w[0] == 1 && w[1] == 1));
    let wrap_ok = !cyclic || !matches!((symbols.first(), symbols.last()), (Some(&1), Some(&1)));
    linear_ok && wrap_ok
}

fn render(symbols: &[u8]) -> String {
    symbols.iter().map(|&s| if s == 0 { '0' } else { '1' }).collect()
}

impl fmt::Display for ItineraryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.symbols))
    }
}

impl FromStr for ItineraryWord {
    type Err = Error;

    /// Parses a cyclic word such as `"0100"`.
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidWord {
                    reason: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        ItineraryWord::cyclic(symbols)
    }
}

/// All admissible words of length `n`, in lexicographic order.
pub fn enumerate_admissible_words(n: usize, cyclic: bool) -> Result<Vec<ItineraryWord>> {
    if n == 0 {
        return Err(Error::InvalidWord {
            reason: "length must be at least 1".into(),
        });
    }
    if n > MAX_WORD_LEN {
        return Err(Error::TooLarge {
            what: "word length",
            value: n,
            max: MAX_WORD_LEN,
        });
    }
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    extend(&mut buf, n, cyclic, &mut out);
    Ok(out)
}

fn extend(buf: &mut Vec<u8>, n: usize, cyclic: bool, out: &mut Vec<ItineraryWord>) {
    if buf.len() == n {
        if is_admissible(buf, cyclic) {
            out.push(ItineraryWord {
                symbols: buf.clone(),
                cyclic,
            });
        }
        return;
    }
    for s in [0u8, 1] {
        if s == 1 && buf.last() == Some(&1) {
            continue;
        }
        buf.push(s);
        extend(buf, n, cyclic, out);
        buf.pop();
    }
}

/// Number of admissible words of length `n` (Fibonacci for linear words,
/// Lucas for cyclic ones), by the transfer-matrix recurrence.
pub fn admissible_count(n: usize, cyclic: bool) -> u64 {
    if n == 0 {
        return 0;
    }
    if cyclic {
        // Lucas numbers: L1 = 1, L2 = 3, L(n) = L(n-1) + L(n-2).
        let (mut prev, mut cur) = (2u64, 1u64);
        for _ in 1..n {
            let next = prev + cur;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        // F(n+2) with F1 = F2 = 1.
        let (mut prev, mut cur) = (1u64, 2u64);
        for _ in 1..n {
            let next = prev + cur;
            prev = cur;
            cur = next;
        }
        cur
    }
}
