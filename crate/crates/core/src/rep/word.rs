//! Words over `u, c, a, b` and their inverses `U, C, A, B`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Letter {
    U,
    C,
    A,
    B,
    UInv,
    CInv,
    AInv,
    BInv,
}

impl Letter {
    pub fn from_char(ch: char) -> Option<Letter> {
        Some(match ch {
            'u' => Letter::U,
            'c' => Letter::C,
            'a' => Letter::A,
            'b' => Letter::B,
            'U' => Letter::UInv,
            'C' => Letter::CInv,
            'A' => Letter::AInv,
            'B' => Letter::BInv,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::U => 'u',
            Letter::C => 'c',
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::UInv => 'U',
            Letter::CInv => 'C',
            Letter::AInv => 'A',
            Letter::BInv => 'B',
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::U => Letter::UInv,
            Letter::C => Letter::CInv,
            Letter::A => Letter::AInv,
            Letter::B => Letter::BInv,
            Letter::UInv => Letter::U,
            Letter::CInv => Letter::C,
            Letter::AInv => Letter::A,
            Letter::BInv => Letter::B,
        }
    }

    /// Fixed macro expansion into the `{u, c}` alphabet.
    fn macro_text(self) -> &'static str {
        match self {
            Letter::U => "u",
            Letter::C => "c",
            Letter::UInv => "U",
            Letter::CInv => "C",
            Letter::A => "uuc",
            Letter::AInv => "CUU",
            Letter::B => "AUAu",
            Letter::BInv => "Uaua",
        }
    }
}

/// A freely reduced word. `Display` writes the empty word as `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        Word {
            letters: free_reduce(letters),
        }
    }

    pub fn parse(text: &str) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for ch in trimmed.chars() {
            if ch.is_whitespace() {
                continue;
            }
            letters.push(
                Letter::from_char(ch).ok_or_else(|| Error::Parse(format!("unexpected character {ch:?} in word {text:?}")))?,
            );
        }
        Ok(Word::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::empty(), |acc, _| acc.concat(&base))
    }

    /// Macro expansion into `{u, c, U, C}` with free reduction only.
    pub fn expand_free(&self) -> Word {
        let mut out = Vec::new();
        for &l in &self.letters {
            expand_into(l, &mut out);
        }
        Word::from_letters(out)
    }

    /// Macro expansion with free reduction and `u`-exponents reduced mod 4
    /// (`u³` is written `U`).
    pub fn expand(&self) -> Word {
        // Runs of (generator, exponent) with generator 0 = u, 1 = c.
        let mut runs: Vec<(u8, i64)> = Vec::new();
        for l in self.expand_free().letters {
            let (g, e) = match l {
                Letter::U => (0, 1),
                Letter::UInv => (0, -1),
                Letter::C => (1, 1),
                Letter::CInv => (1, -1),
                _ => unreachable!("expansion only yields u and c letters"),
            };
            push_run(&mut runs, g, e);
        }
        let mut letters = Vec::new();
        for (g, e) in runs {
            match g {
                0 => match e.rem_euclid(4) {
                    1 => letters.push(Letter::U),
                    2 => letters.extend([Letter::U, Letter::U]),
                    3 => letters.push(Letter::UInv),
                    _ => {}
                },
                _ => {
                    let l = if e > 0 { Letter::C } else { Letter::CInv };
                    letters.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
                }
            }
        }
        Word { letters }
    }

    /// Substitutes words for the letters `a, b` (and their inverses);
    /// `u, c` are kept.
    pub fn substitute(&self, a: &Word, b: &Word) -> Word {
        let mut out = Vec::new();
        for &l in &self.letters {
            match l {
                Letter::A => out.extend_from_slice(&a.letters),
                Letter::AInv => out.extend(a.inverse().letters),
                Letter::B => out.extend_from_slice(&b.letters),
                Letter::BInv => out.extend(b.inverse().letters),
                other => out.push(other),
            }
        }
        Word::from_letters(out)
    }
}

fn push_run(runs: &mut Vec<(u8, i64)>, g: u8, e: i64) {
    if let Some(last) = runs.last_mut() {
        if last.0 == g {
            last.1 += e;
            let vanishes = if g == 0 { last.1.rem_euclid(4) == 0 } else { last.1 == 0 };
            if vanishes {
                runs.pop();
            }
            return;
        }
    }
    runs.push((g, e));
}

fn expand_into(l: Letter, out: &mut Vec<Letter>) {
    match l {
        Letter::U | Letter::C | Letter::UInv | Letter::CInv => out.push(l),
        _ => {
            for ch in l.macro_text().chars() {
                expand_into(Letter::from_char(ch).expect("macro alphabet"), out);
            }
        }
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        assert_eq!(Word::parse("aB").unwrap().to_string(), "aB");
        assert!(Word::parse("uU").unwrap().is_empty());
        assert_eq!(Word::parse("aBaba").unwrap().len(), 5);
        assert_eq!(Word::parse(" a B ").unwrap().to_string(), "aB");
        assert!(matches!(Word::parse("ax"), Err(Error::Parse(_))));
        assert_eq!(Word::parse("aAbB").unwrap(), Word::empty());
    }

    #[test]
    fn macros() {
        assert_eq!(Word::parse("a").unwrap().expand().to_string(), "uuc");
        assert_eq!(Word::parse("A").unwrap().expand().to_string(), "Cuu");
        assert_eq!(Word::parse("b").unwrap().expand().to_string(), "CuCU");
        assert_eq!(Word::parse("B").unwrap().expand().to_string(), "ucUc");
        assert!(Word::parse("uuuu").unwrap().expand().is_empty());
        assert_eq!(Word::parse("uuu").unwrap().expand().to_string(), "U");
        assert_eq!(Word::parse("bB").unwrap().expand(), Word::empty());
    }

    #[test]
    fn inverse_and_powers() {
        let w = Word::parse("aBu").unwrap();
        assert!(w.concat(&w.inverse()).is_empty());
        assert_eq!(w.pow(2).to_string(), "aBuaBu");
        assert_eq!(w.pow(-1), w.inverse());
        let sub = Word::parse("aBu").unwrap().substitute(&Word::parse("uc").unwrap(), &Word::parse("cc").unwrap());
        assert_eq!(sub.to_string(), "uCu");
    }
}
