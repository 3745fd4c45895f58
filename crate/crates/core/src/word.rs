//! Words over `S ∪ S⁻¹` and the edge labels of subdivided relator polygons.

use std::fmt;

use crate::error::{Error, Result};

/// A generator or its inverse. Generators are numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u16, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// `a..z` for generators, `A..Z` for inverses.
    pub fn to_char(self) -> Option<char> {
        if self.gen >= 26 {
            return None;
        }
        let base = if self.inv { b'A' } else { b'a' };
        Some(char::from(base + self.gen as u8))
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as u16 - 'a' as u16, false)),
            'A'..='Z' => Some(Letter::new(c as u16 - 'A' as u16, true)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Word(format!("bad letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// No `w[i] = w[i+1]⁻¹`.
    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    /// Reduced, and the last letter does not cancel the first.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) if self.0.len() > 1 => self.is_reduced() && l != f.inverse(),
            _ => true,
        }
    }

    /// The maximal generator index used, plus one.
    pub fn rank(&self) -> u16 {
        self.0.iter().map(|l| l.gen + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            match l.to_char() {
                Some(c) => write!(f, "{c}")?,
                None => write!(f, "[{}{}]", l.gen, if l.inv { "'" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// The label of one edge slot of a subdivided relator polygon: a letter
/// together with which of its `k` pieces the slot carries, read in the
/// direction of the slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PieceLabel {
    pub gen: u16,
    pub piece: u16,
    pub inv: bool,
}

impl PieceLabel {
    /// The same piece read in the opposite direction.
    pub fn inverse(self) -> Self {
        PieceLabel { inv: !self.inv, ..self }
    }
}

/// Label of position `p` of the `k`-fold subdivision of `w`, read forward.
pub fn subdivided_label(w: &Word, k: usize, p: usize) -> PieceLabel {
    let letter = w.0[(p / k) % w.len()];
    let r = (p % k) as u16;
    if letter.inv {
        PieceLabel { gen: letter.gen, piece: k as u16 - 1 - r, inv: true }
    } else {
        PieceLabel { gen: letter.gen, piece: r, inv: false }
    }
}
