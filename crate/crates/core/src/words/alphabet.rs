//! Letter ids and the id-to-token mapping.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// A letter is a small integer id; the owning [`Alphabet`] maps ids to tokens.
pub type Letter = u8;

/// An ordered finite set of symbols. Ordering is the declaration order and is
/// total and stable; ids are assigned 0..n in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::Alphabet("alphabet must be nonempty".into()));
        }
        if tokens.len() > Letter::MAX as usize {
            return Err(Error::Alphabet(format!(
                "alphabet too large ({} letters, max {})",
                tokens.len(),
                Letter::MAX
            )));
        }
        let mut index = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.chars().any(|c| c.is_whitespace() || c == '#') {
                return Err(Error::Alphabet(format!("invalid symbol token {t:?}")));
            }
            if index.insert(t.clone(), i as Letter).is_some() {
                return Err(Error::Alphabet(format!("duplicate symbol {t:?}")));
            }
        }
        Ok(Alphabet { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.tokens.len()).map(|i| i as Letter)
    }

    pub fn get(&self, token: &str) -> Option<Letter> {
        self.index.get(token).copied()
    }

    pub fn token(&self, l: Letter) -> &str {
        &self.tokens[l as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains_id(&self, l: Letter) -> bool {
        (l as usize) < self.tokens.len()
    }

    /// Render a word as text. Single-character tokens are joined directly,
    /// otherwise tokens are space-separated.
    pub fn render(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let compact = self.tokens.iter().all(|t| t.chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&l| self.token(l)).collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn stable_ordering() {
        let a = Alphabet::new(["c", "a", "b"]).unwrap();
        assert_eq!(a.get("c"), Some(0));
        assert_eq!(a.get("b"), Some(2));
        assert_eq!(a.token(1), "a");
    }
}
