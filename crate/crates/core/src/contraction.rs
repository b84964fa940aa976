//! Triple-alphabet recoding.
//!
//! Replaces the alphabet by blocks `[t w t']` — a pivot letter `t`, a word
//! `w` of non-pivot letters, and the next pivot `t'` — so that the induced
//! substitution acts on blocks. With pivots = growing letters this makes
//! every letter of the new substitution growing; the same machinery with
//! pivots = non-mortal letters absorbs mortal runs during normalization.

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Morphism, MorphicSystem, Word};
use std::collections::HashMap;

/// A block letter `[t w t']`: `t·w·t'` is a factor of the fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleLetter {
    pub left: Letter,
    pub run: Word,
    pub right: Letter,
}

/// Result of the recoding: block alphabet `C`, induced substitution
/// `phi2: C* -> C*`, the flattening morphism `f: C* -> A*` with
/// `f([t w t']) = t·w`, and the start block.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub triples: Vec<TripleLetter>,
    pub alphabet: Alphabet,
    pub phi2: Morphism,
    pub flatten: Morphism,
    pub start: Letter,
}

impl Contraction {
    /// The recoded system generating the same word: `psi ∘ f` applied to the
    /// fixed point of `phi2`.
    pub fn recoded_system(&self, psi: &Morphism) -> Result<MorphicSystem> {
        let psi2 = self.flatten.then(psi)?;
        MorphicSystem::new(
            self.alphabet.clone(),
            psi.target.clone(),
            self.start,
            self.phi2.clone(),
            psi2,
        )
        .map_err(Into::into)
    }
}

/// Decomposition of a word by pivot letters:
/// `w0 p1 w1 p2 ... pk wk` with `p_i` pivots and `w_i` non-pivot runs.
struct Decomp {
    head: Word,
    pivots: Vec<Letter>,
    runs: Vec<Word>, // runs[i] follows pivots[i]
}

fn decompose(w: &[Letter], is_pivot: &[bool]) -> Decomp {
    let mut head = Vec::new();
    let mut pivots = Vec::new();
    let mut runs: Vec<Vec<Letter>> = Vec::new();
    for &l in w {
        if is_pivot[l as usize] {
            pivots.push(l);
            runs.push(Vec::new());
        } else if let Some(last) = runs.last_mut() {
            last.push(l);
        } else {
            head.push(l);
        }
    }
    Decomp {
        head: Word(head),
        pivots,
        runs: runs.into_iter().map(Word).collect(),
    }
}

/// Build the block recoding of `phi` over the given pivot set, starting from
/// the fixed point over `a1`.
///
/// The image of a block `[t w t']` is read off `phi(t·w)` decomposed by
/// pivots as `w0 t1 w1 ... tk w'_k`; the trailing run borrows the head run
/// `w''` of `phi(t')` before its first pivot `t_{k+1}`, giving blocks
/// `[t1 w1 t2] ... [tk (w'_k·w'') t_{k+1}]`. The leading run `w0` is absorbed
/// by the predecessor block's borrowed head, so flattened concatenations lose
/// no symbols; for the start block `w0 = ε` because `phi(a1)` begins with
/// `a1`.
pub fn block_recode(phi: &Morphism, a1: Letter, is_pivot: &[bool]) -> Result<Contraction> {
    assert!(phi.is_substitution());
    let n = phi.source.len();
    assert_eq!(is_pivot.len(), n);
    if !is_pivot[a1 as usize] {
        return Err(Error::Invalid("start letter must be a pivot".into()));
    }
    // every pivot's image must contain a pivot, otherwise blocks would erase
    for l in 0..n {
        if is_pivot[l] && !phi.image(l as Letter).iter().any(|&b| is_pivot[b as usize]) {
            return Err(Error::Invalid(format!(
                "pivot {:?} has a pivot-free image",
                phi.source.token(l as Letter)
            )));
        }
    }

    // start block from the fixed point: a1, its following run, the next pivot
    let start_triple = {
        let mut w = Word(vec![a1]);
        let mut pivot_count = w.iter().filter(|&&l| is_pivot[l as usize]).count();
        let mut round = 0;
        while pivot_count < 2 {
            w = phi.apply(&w)?;
            pivot_count = w.iter().filter(|&&l| is_pivot[l as usize]).count();
            round += 1;
            if round > 4 * n + 8 {
                return Err(Error::Invalid(
                    "fixed point never shows a second pivot".into(),
                ));
            }
        }
        let d = decompose(&w, is_pivot);
        TripleLetter {
            left: d.pivots[0],
            run: d.runs[0].clone(),
            right: d.pivots[1],
        }
    };

    // closure: repeatedly form images, adding newly referenced blocks
    let mut triples: Vec<TripleLetter> = vec![start_triple.clone()];
    let mut index: HashMap<TripleLetter, usize> = HashMap::new();
    index.insert(start_triple, 0);
    let mut images: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    while next < triples.len() {
        let t = triples[next].clone();
        let mut img_blocks = Vec::new();
        let body = {
            let mut b = vec![t.left];
            b.extend_from_slice(&t.run);
            phi.apply(&b)?
        };
        let d = decompose(&body, is_pivot);
        let right_img = phi.apply(&[t.right])?;
        let dr = decompose(&right_img, is_pivot);
        let borrowed_head = dr.head.clone();
        let next_pivot = dr.pivots[0];
        let k = d.pivots.len();
        debug_assert!(k >= 1);
        for i in 0..k {
            let (run, right) = if i + 1 < k {
                (d.runs[i].clone(), d.pivots[i + 1])
            } else {
                (d.runs[i].concat(&borrowed_head), next_pivot)
            };
            let block = TripleLetter {
                left: d.pivots[i],
                run,
                right,
            };
            let id = *index.entry(block.clone()).or_insert_with(|| {
                triples.push(block);
                triples.len() - 1
            });
            img_blocks.push(id);
        }
        images.push(img_blocks);
        next += 1;
        if triples.len() > 4096 {
            return Err(Error::ResourceCap("block alphabet exceeds cap".into()));
        }
    }

    let tokens: Vec<String> = triples
        .iter()
        .map(|t| {
            let run: Vec<&str> = t.run.iter().map(|&l| phi.source.token(l)).collect();
            format!(
                "{}:{}:{}",
                phi.source.token(t.left),
                run.concat(),
                phi.source.token(t.right)
            )
        })
        .collect();
    let alphabet = Alphabet::new(tokens)?;
    let phi2 = Morphism::new(
        alphabet.clone(),
        alphabet.clone(),
        images
            .into_iter()
            .map(|img| Word(img.into_iter().map(|i| i as Letter).collect()))
            .collect(),
    )?;
    let flatten = Morphism::new(
        alphabet.clone(),
        phi.source.clone(),
        triples
            .iter()
            .map(|t| {
                let mut w = vec![t.left];
                w.extend_from_slice(&t.run);
                Word(w)
            })
            .collect(),
    )?;
    Ok(Contraction {
        triples,
        alphabet,
        phi2,
        flatten,
        start: 0,
    })
}

/// Contract a normalized system with finitely many bounded factors: pivots
/// are the growing letters, so every letter of `phi2` is growing.
pub fn contract(sys: &MorphicSystem, growing: &[bool]) -> Result<Contraction> {
    if !sys.phi.is_non_erasing() {
        return Err(Error::Invalid("contract requires non-erasing phi".into()));
    }
    block_recode(&sys.phi, sys.start, growing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounded::classify_letters;

    fn sys(rules: &str) -> MorphicSystem {
        crate::words::parse::parse_rule_file(rules).unwrap().system
    }

    #[test]
    fn contract_periodic_example() {
        // a -> aba, b -> b: C = {[a b a]}, phi2: x -> x x, f(x) = ab
        let s = sys("alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n");
        let growing = classify_letters(&s.phi).growing_mask();
        let c = contract(&s, &growing).unwrap();
        assert_eq!(c.triples.len(), 1);
        assert_eq!(c.triples[0].run, Word(vec![1]));
        assert_eq!(c.phi2.image(0), &Word(vec![0, 0]));
        assert_eq!(c.flatten.image(0), &Word(vec![0, 1]));
    }

    #[test]
    fn contract_thue_morse_pairs() {
        // no bounded letters: blocks are adjacent pairs with empty runs
        let s = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let growing = classify_letters(&s.phi).growing_mask();
        let c = contract(&s, &growing).unwrap();
        assert!(c.triples.iter().all(|t| t.run.is_empty()));
        // TM has all four pairs as factors
        assert_eq!(c.triples.len(), 4);
        for t in &c.triples {
            assert_eq!(c.flatten.image(0).len(), 1);
            let _ = t;
        }
    }

    #[test]
    fn start_block_is_prolongable() {
        let s = sys("alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n");
        let growing = classify_letters(&s.phi).growing_mask();
        let c = contract(&s, &growing).unwrap();
        assert_eq!(c.phi2.image(c.start).first(), Some(&c.start));
    }

    #[test]
    fn prefix_fidelity() {
        // phi^n(a1) is a prefix of f(phi2^n(start)) for n = 1..8
        for rules in [
            "alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n",
            "alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n",
            "alphabet a b c\nstart a\nrule a -> a b c a\nrule b -> c\nrule c -> b\n",
        ] {
            let s = sys(rules);
            let growing = classify_letters(&s.phi).growing_mask();
            let c = contract(&s, &growing).unwrap();
            let mut a_side = Word(vec![s.start]);
            let mut c_side = Word(vec![c.start]);
            for n in 1..=8 {
                a_side = s.phi.apply(&a_side).unwrap();
                c_side = c.phi2.apply(&c_side).unwrap();
                let flat = c.flatten.apply(&c_side).unwrap();
                assert!(flat.len() >= a_side.len(), "n={n}");
                assert_eq!(&flat[..a_side.len()], &a_side[..], "n={n}");
            }
        }
    }

    #[test]
    fn recoded_word_matches() {
        let s = sys("alphabet a b c\nstart a\nrule a -> a b c a\nrule b -> c\nrule c -> b\n");
        let growing = classify_letters(&s.phi).growing_mask();
        let c = contract(&s, &growing).unwrap();
        let rec = c.recoded_system(&s.psi).unwrap();
        assert_eq!(rec.prefix(2000).unwrap(), s.prefix(2000).unwrap());
        // psi ∘ f is non-erasing
        assert!(rec.psi.is_non_erasing());
    }
}
