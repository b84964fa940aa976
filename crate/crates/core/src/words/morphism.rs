//! Morphisms between free monoids, given by letter images.

use super::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// A morphism `source* -> target*`, defined by one image word per source
/// letter and extended by concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub source: Alphabet,
    pub target: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Invalid(format!(
                "morphism needs {} images, got {}",
                source.len(),
                images.len()
            )));
        }
        for img in &images {
            for &l in img.iter() {
                if !target.contains_id(l) {
                    return Err(Error::OutOfAlphabet(l));
                }
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    /// The identity morphism on `alphabet`.
    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = alphabet.letters().map(Word::single).collect();
        Morphism {
            source: alphabet.clone(),
            target: alphabet.clone(),
            images,
        }
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_substitution(&self) -> bool {
        self.source == self.target
    }

    /// Non-erasing: no letter maps to the empty word.
    pub fn is_non_erasing(&self) -> bool {
        self.images.iter().all(|w| !w.is_empty())
    }

    /// Coding: every image has length exactly one.
    pub fn is_coding(&self) -> bool {
        self.images.iter().all(|w| w.len() == 1)
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Apply to a word: the concatenation of letter images in order.
    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut out = Vec::new();
        for &l in w {
            if !self.source.contains_id(l) {
                return Err(Error::OutOfAlphabet(l));
            }
            out.extend_from_slice(self.image(l));
        }
        Ok(Word(out))
    }

    /// Apply without per-letter validation (ids already checked by the caller).
    pub(crate) fn apply_unchecked(&self, w: &[Letter], out: &mut Vec<Letter>) {
        for &l in w {
            out.extend_from_slice(self.image(l));
        }
    }

    /// Letters whose iterated image eventually dies: `{ a : phi^k(a) = ε }`.
    ///
    /// Computed as the fixpoint of "image consists only of already-mortal
    /// letters", starting from letters with empty image. Requires a
    /// substitution. Mortality is reached within `|A|` rounds.
    pub fn mortal_letters(&self) -> BTreeSet<Letter> {
        assert!(self.is_substitution(), "mortal_letters needs a substitution");
        let n = self.source.len();
        let mut mortal = vec![false; n];
        loop {
            let mut changed = false;
            for l in 0..n {
                if !mortal[l] && self.images[l].iter().all(|&b| mortal[b as usize]) {
                    mortal[l] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n)
            .filter(|&l| mortal[l])
            .map(|l| l as Letter)
            .collect()
    }

    /// Compose: `(other ∘ self)(x) = other(self(x))`; `self: A->B`, `other: B->C`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if self.target != other.source {
            return Err(Error::Invalid(
                "composition alphabet mismatch".into(),
            ));
        }
        let images = self
            .images
            .iter()
            .map(|w| other.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.source.clone(), other.target.clone(), images)
    }

    /// `self^n` for a substitution; `n >= 1`. Caps total image size to keep
    /// accidental blowups from exhausting memory.
    pub fn power(&self, n: usize) -> Result<Morphism> {
        assert!(self.is_substitution() && n >= 1);
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.then(self)?;
            let total: usize = acc.images.iter().map(Word::len).sum();
            if total > 50_000_000 {
                return Err(Error::ResourceCap(format!(
                    "substitution power {n} image size exceeds cap"
                )));
            }
        }
        Ok(acc)
    }

    /// Occurrence digraph: adjacency `a -> {b : b occurs in image(a)}`, deduped.
    pub fn occurrence_graph(&self) -> Vec<Vec<usize>> {
        self.images
            .iter()
            .map(|w| {
                let mut succ: Vec<usize> = w.iter().map(|&b| b as usize).collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn thue_morse() -> Morphism {
        let a = Alphabet::new(["a", "b"]).unwrap();
        Morphism::new(a.clone(), a, vec![Word(vec![0, 1]), Word(vec![1, 0])]).unwrap()
    }

    pub fn fibonacci() -> Morphism {
        let a = Alphabet::new(["a", "b"]).unwrap();
        Morphism::new(a.clone(), a, vec![Word(vec![0, 1]), Word(vec![0])]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn apply_thue_morse_ab() {
        // phi_TM(ab) = abba
        let tm = thue_morse();
        assert_eq!(tm.apply(&[0, 1]).unwrap(), Word(vec![0, 1, 1, 0]));
    }

    #[test]
    fn apply_empty_is_empty() {
        let tm = thue_morse();
        assert_eq!(tm.apply(&[]).unwrap(), Word::empty());
    }

    #[test]
    fn apply_fibonacci_aba() {
        // phi_FIB(aba) = ab a ab = abaab
        let fib = fibonacci();
        assert_eq!(fib.apply(&[0, 1, 0]).unwrap(), Word(vec![0, 1, 0, 0, 1]));
    }

    #[test]
    fn mortal_simple() {
        // a -> ab, b -> ε  =>  {b}
        let a = Alphabet::new(["a", "b"]).unwrap();
        let m = Morphism::new(a.clone(), a, vec![Word(vec![0, 1]), Word::empty()]).unwrap();
        assert_eq!(m.mortal_letters(), BTreeSet::from([1]));
    }

    #[test]
    fn mortal_chain() {
        // a -> b, b -> c, c -> ε : all mortal (iterate images three times)
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let m = Morphism::new(
            a.clone(),
            a,
            vec![Word(vec![1]), Word(vec![2]), Word::empty()],
        )
        .unwrap();
        assert_eq!(m.mortal_letters(), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn mortal_none_for_non_erasing() {
        assert!(thue_morse().mortal_letters().is_empty());
    }

    proptest! {
        // apply is a monoid homomorphism: apply(uv) = apply(u)·apply(v)
        #[test]
        fn apply_is_homomorphism(u in prop::collection::vec(0u8..2, 0..20),
                                 v in prop::collection::vec(0u8..2, 0..20)) {
            let tm = thue_morse();
            let mut uv = u.clone();
            uv.extend_from_slice(&v);
            let lhs = tm.apply(&uv).unwrap();
            let rhs = tm.apply(&u).unwrap().concat(&tm.apply(&v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
