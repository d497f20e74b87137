use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// A finite word over {1, …, κ}; symbols are stored 1-based.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolWord(Vec<u8>);

impl SymbolWord {
    pub fn empty() -> Self {
        SymbolWord(Vec::new())
    }

    pub fn from_symbols(s: Vec<u8>) -> Self {
        SymbolWord(s)
    }

    pub fn repeat(symbol: u8, n: usize) -> Self {
        SymbolWord(alloc::vec![symbol; n])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: u8) {
        self.0.push(s);
    }

    pub fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }

    pub fn concat(&self, o: &SymbolWord) -> SymbolWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        SymbolWord(v)
    }

    /// i|_n, the first n symbols.
    pub fn truncate(&self, n: usize) -> SymbolWord {
        SymbolWord(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn validate(&self, kappa: usize) -> Result<()> {
        for &s in &self.0 {
            if s == 0 || s as usize > kappa {
                return Err(Error::InvalidSymbol { symbol: s as u32, kappa });
            }
        }
        Ok(())
    }

    /// All words of length `n` over κ symbols in lexicographic order.
    pub fn all_of_length(kappa: usize, n: usize) -> WordsOfLength {
        WordsOfLength { kappa: kappa as u8, cur: if kappa == 0 { None } else { Some(alloc::vec![1; n]) } }
    }

    /// Successor in lexicographic order among words of the same length.
    pub fn next_lex(&self, kappa: usize) -> Option<SymbolWord> {
        let mut v = self.0.clone();
        for i in (0..v.len()).rev() {
            if (v[i] as usize) < kappa {
                v[i] += 1;
                return Some(SymbolWord(v));
            }
            v[i] = 1;
        }
        None
    }
}

pub struct WordsOfLength {
    kappa: u8,
    cur: Option<Vec<u8>>,
}

impl Iterator for WordsOfLength {
    type Item = SymbolWord;

    fn next(&mut self) -> Option<SymbolWord> {
        let cur = self.cur.take()?;
        let out = SymbolWord(cur.clone());
        self.cur = out.next_lex(self.kappa as usize).map(|w| w.0);
        Some(out)
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
        } else {
            for (i, s) in self.0.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for SymbolWord {
    type Err = Error;

    /// `"121"` or, for κ ≥ 10, `"1.12.3"`. The empty word is `""` or `"∅"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" || s == "-" {
            return Ok(SymbolWord::empty());
        }
        let bad = || Error::Parse(alloc::format!("bad word `{s}`"));
        let v: Result<Vec<u8>> = if s.contains('.') {
            s.split('.').map(|t| t.parse::<u8>().map_err(|_| bad())).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad)).collect()
        };
        let v = v?;
        if v.contains(&0) {
            return Err(bad());
        }
        Ok(SymbolWord(v))
    }
}

/// Tail of an infinite coding after its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The tail repeats this non-empty word forever.
    Periodic(SymbolWord),
    /// Only the prefix is known.
    Unresolved,
}

/// A (possibly partially known) infinite coding i ∈ Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coding {
    pub prefix: SymbolWord,
    pub tail: Tail,
}

impl Coding {
    pub fn finite(prefix: SymbolWord) -> Self {
        Coding { prefix, tail: Tail::Unresolved }
    }

    pub fn periodic(prefix: SymbolWord, period: SymbolWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        Ok(Coding { prefix, tail: Tail::Periodic(period) })
    }

    /// Symbol at 0-based position k.
    pub fn symbol(&self, k: usize) -> Option<u8> {
        if k < self.prefix.len() {
            return Some(self.prefix.0[k]);
        }
        match &self.tail {
            Tail::Periodic(p) => Some(p.0[(k - self.prefix.len()) % p.len()]),
            Tail::Unresolved => None,
        }
    }

    /// Number of known symbols, `None` if infinite.
    pub fn known_len(&self) -> Option<usize> {
        match self.tail {
            Tail::Periodic(_) => None,
            Tail::Unresolved => Some(self.prefix.len()),
        }
    }

    /// i|_n; errors when the coding is shorter than n.
    pub fn word(&self, n: usize) -> Result<SymbolWord> {
        if let Some(k) = self.known_len() {
            if k < n {
                return Err(Error::CodingTooShort { needed: n, available: k });
            }
        }
        Ok(SymbolWord((0..n).map(|k| self.symbol(k).unwrap()).collect()))
    }

    /// True for codings ending in a constant symbol forever.
    pub fn is_eventually_constant(&self) -> bool {
        match &self.tail {
            Tail::Periodic(p) => p.0.iter().all(|&s| s == p.0[0]),
            Tail::Unresolved => false,
        }
    }

    pub fn validate(&self, kappa: usize) -> Result<()> {
        self.prefix.validate(kappa)?;
        if let Tail::Periodic(p) = &self.tail {
            p.validate(kappa)?;
        }
        Ok(())
    }
}

impl fmt::Display for Coding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        if let Tail::Periodic(p) = &self.tail {
            write!(f, "({p})")?;
        }
        Ok(())
    }
}

impl FromStr for Coding {
    type Err = Error;

    /// `"1222(2)"` is 1222 followed by 2 repeated; `"121"` is a finite prefix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.find('(') {
            Some(i) => {
                let body = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(alloc::format!("unclosed period in `{s}`")))?;
                Coding::periodic(s[..i].parse()?, body.parse()?)
            }
            None => Ok(Coding::finite(s.parse()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};

    #[test]
    fn word_roundtrip() {
        let w: SymbolWord = "1213".parse().unwrap();
        assert_eq!(w.symbols(), &[1, 2, 1, 3]);
        assert_eq!(w.to_string(), "1213");
        let big = SymbolWord::from_symbols(alloc::vec![1, 12, 3]);
        assert_eq!(big.to_string(), "1.12.3");
        assert_eq!(big.to_string().parse::<SymbolWord>().unwrap(), big);
        assert!("102".parse::<SymbolWord>().is_err());
        assert!(w.validate(2).is_err());
    }

    #[test]
    fn lex_enumeration() {
        let all: Vec<String> = SymbolWord::all_of_length(2, 2).map(|w| w.to_string()).collect();
        assert_eq!(all, ["11", "12", "21", "22"]);
        assert_eq!(SymbolWord::all_of_length(3, 0).count(), 1);
    }

    #[test]
    fn codings() {
        let c: Coding = "1222(2)".parse().unwrap();
        assert_eq!(c.symbol(0), Some(1));
        assert_eq!(c.symbol(100), Some(2));
        assert!(c.is_eventually_constant());
        assert_eq!(c.to_string(), "1222(2)");
        let f: Coding = "12".parse().unwrap();
        assert!(f.word(3).is_err());
        assert!(!"(12)".parse::<Coding>().unwrap().is_eventually_constant());
    }
}
