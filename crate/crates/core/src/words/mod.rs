//! Alphabets, finite words, morphisms and morphic systems.

mod alphabet;
pub mod morphism;
pub mod normalize;
pub mod parse;
pub mod system;

pub use alphabet::{Alphabet, Letter};
pub use morphism::Morphism;
pub use system::{FactorOracle, MorphicSystem, PrefixBuffer};

/// A finite word: a sequence of letter ids over some alphabet.
///
/// The empty word is valid everywhere unless an operation's precondition
/// says otherwise. Ownership of the id-to-token mapping stays with the
/// [`Alphabet`]; words are plain id sequences so higher layers compare
/// letters by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// All cyclic shifts of this word, including itself.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.len();
        (0..n.max(1))
            .map(|i| {
                let mut v = Vec::with_capacity(n);
                v.extend_from_slice(&self.0[i..]);
                v.extend_from_slice(&self.0[..i]);
                Word(v)
            })
            .collect()
    }

    /// Whether `self` occurs in `text` as a contiguous subword.
    pub fn occurs_in(&self, text: &[Letter]) -> bool {
        find_sub(text, &self.0).is_some()
    }
}

impl std::ops::Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

/// First occurrence of `pat` in `text`, via SIMD-accelerated search.
pub fn find_sub(text: &[Letter], pat: &[Letter]) -> Option<usize> {
    if pat.is_empty() {
        return Some(0);
    }
    memchr::memmem::find(text, pat)
}

/// First occurrence of `pat` in `text` at position >= `from`.
pub fn find_sub_from(text: &[Letter], pat: &[Letter], from: usize) -> Option<usize> {
    if from >= text.len() {
        return None;
    }
    memchr::memmem::find(&text[from..], pat).map(|p| p + from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_of_ab() {
        let w = Word(vec![0, 1]);
        let rots = w.rotations();
        assert_eq!(rots, vec![Word(vec![0, 1]), Word(vec![1, 0])]);
    }

    #[test]
    fn empty_word_has_one_rotation() {
        let w = Word::empty();
        assert_eq!(w.rotations(), vec![Word::empty()]);
    }

    #[test]
    fn find_sub_basic() {
        assert_eq!(find_sub(&[0, 1, 1, 0], &[1, 1]), Some(1));
        assert_eq!(find_sub(&[0, 1, 1, 0], &[0, 0]), None);
        assert_eq!(find_sub(&[], &[]), Some(0));
    }
}
