//! Normalization of an arbitrary morphic presentation `f(g^inf(a1))` to an
//! equivalent system with a non-erasing substitution and a coding.
//!
//! The construction runs in three stages:
//!
//! 1. remove letters whose whole orbit is output-silent, then absorb mortal
//!    runs into blocks `[p r p']` over non-mortal pivots (after raising `g`
//!    to a power that kills all mortals exactly), looping if removals
//!    re-introduce erasure;
//! 2. if the carried output morphism still has silent letters, absorb silent
//!    runs into blocks over speaking pivots, raising `g` to a power for which
//!    every block image speaks;
//! 3. split each letter into `|f(c)|` positional copies so the output
//!    morphism becomes a coding, after raising `g` to a power for which
//!    `|f(g^N(c))| >= |f(c)|` holds for every letter.
//!
//! Fresh letters are named deterministically from their origin (block
//! contents, or `(letter, index)` for splits), so runs are reproducible.

use super::{Alphabet, Letter, Morphism, MorphicSystem, Word};
use crate::contraction::block_recode;
use crate::error::{Error, Result};

/// Normalize `f(g^inf(a1))`; errors if the generated word is finite or the
/// presentation is not prolongable after removing mortal letters.
pub fn normalize(f: &Morphism, g: &Morphism, a1: Letter) -> Result<MorphicSystem> {
    if !g.is_substitution() {
        return Err(Error::Normalize("g must be a substitution".into()));
    }
    if f.source != g.source {
        return Err(Error::Normalize("f and g must share a source".into()));
    }
    let sys = MorphicSystem::new(
        g.source.clone(),
        f.target.clone(),
        a1,
        g.clone(),
        f.clone(),
    )?;
    let mut sys = sys.restrict_reachable()?;

    // already in shape: return unchanged
    if sys.phi.is_non_erasing() && sys.psi.is_coding() {
        sys.check_prolongable()?;
        return Ok(sys);
    }

    for _round in 0..6 {
        sys = drop_dead_letters(sys)?;
        if !sys.phi.is_non_erasing() {
            sys = absorb_mortal_runs(sys)?;
            sys = sys.restrict_reachable()?;
            continue;
        }
        break;
    }
    if !sys.phi.is_non_erasing() {
        return Err(Error::Normalize(
            "substitution still erasing after absorption rounds".into(),
        ));
    }
    sys.check_prolongable()?;

    if !sys.psi.is_non_erasing() {
        sys = absorb_silent_runs(sys)?;
        sys = sys.restrict_reachable()?;
    }
    sys.check_prolongable()?;

    if sys.psi.is_coding() {
        return Ok(sys);
    }
    split_letters(sys)
}

/// Letters whose whole `g`-orbit has empty `f`-image contribute nothing to
/// the output, ever; delete them from all images. Greatest fixpoint of
/// "`f(a) = ε` and every letter of `g(a)` is dead".
fn drop_dead_letters(sys: MorphicSystem) -> Result<MorphicSystem> {
    let n = sys.alphabet.len();
    let mut dead: Vec<bool> = (0..n as u8).map(|l| sys.psi.image(l).is_empty()).collect();
    loop {
        let mut changed = false;
        for l in 0..n {
            if dead[l] && !sys.phi.image(l as Letter).iter().all(|&b| dead[b as usize]) {
                dead[l] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if dead.iter().all(|&d| !d) {
        return Ok(sys);
    }
    if dead[sys.start as usize] {
        return Err(Error::FiniteWord("the output word is empty".into()));
    }
    let kept: Vec<usize> = (0..n).filter(|&l| !dead[l]).collect();
    let mut remap = vec![Letter::MAX; n];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new as Letter;
    }
    let alphabet = Alphabet::new(kept.iter().map(|&l| sys.alphabet.token(l as Letter)))?;
    let strip = |w: &Word| -> Word {
        Word(
            w.iter()
                .filter(|&&l| !dead[l as usize])
                .map(|&l| remap[l as usize])
                .collect(),
        )
    };
    let phi = Morphism::new(
        alphabet.clone(),
        alphabet.clone(),
        kept.iter().map(|&l| strip(sys.phi.image(l as Letter))).collect(),
    )?;
    let psi = Morphism::new(
        alphabet.clone(),
        sys.target.clone(),
        kept.iter()
            .map(|&l| sys.psi.image(l as Letter).clone())
            .collect(),
    )?;
    MorphicSystem::new(
        alphabet,
        sys.target.clone(),
        remap[sys.start as usize],
        phi,
        psi,
    )
}

/// Absorb mortal runs: raise `g` to the mortality depth (so mortal images are
/// exactly empty), then recode over blocks `[p r p']` with non-mortal pivots.
fn absorb_mortal_runs(sys: MorphicSystem) -> Result<MorphicSystem> {
    let mortal = sys.phi.mortal_letters();
    if mortal.contains(&sys.start) {
        return Err(Error::FiniteWord("start letter is mortal".into()));
    }
    // prolongability check in the presence of mortals
    sys.check_prolongable()?;
    let depth = sys.alphabet.len().max(1);
    let powered = sys.phi.power(depth)?;
    debug_assert!(mortal
        .iter()
        .all(|&m| powered.image(m).is_empty()));
    let is_pivot: Vec<bool> = (0..sys.alphabet.len() as u8)
        .map(|l| !mortal.contains(&l))
        .collect();
    let blocks = block_recode(&powered, sys.start, &is_pivot)?;
    let psi2 = blocks.flatten.then(&sys.psi)?;
    MorphicSystem::new(
        blocks.alphabet.clone(),
        sys.target.clone(),
        blocks.start,
        blocks.phi2,
        psi2,
    )
}

/// Absorb output-silent runs: pivots are the letters with nonempty `f`-image.
/// `g` is raised to the smallest power for which every block image contains a
/// speaking letter, so the block substitution stays non-erasing and the block
/// output morphism speaks on every letter.
fn absorb_silent_runs(sys: MorphicSystem) -> Result<MorphicSystem> {
    let n = sys.alphabet.len();
    let is_pivot: Vec<bool> = (0..n as u8)
        .map(|l| !sys.psi.image(l).is_empty())
        .collect();
    if !is_pivot[sys.start as usize] {
        return Err(Error::Normalize(
            "start letter is output-silent after dead-letter removal".into(),
        ));
    }
    for power in 1..=16usize {
        let g_pow = sys.phi.power(power)?;
        // every pivot image must contain a pivot for the recoding to work
        let ok = (0..n).all(|l| {
            !is_pivot[l]
                || g_pow
                    .image(l as Letter)
                    .iter()
                    .any(|&b| is_pivot[b as usize])
        });
        if !ok {
            continue;
        }
        match block_recode(&g_pow, sys.start, &is_pivot) {
            Ok(blocks) => {
                let psi2 = blocks.flatten.then(&sys.psi)?;
                debug_assert!(psi2.is_non_erasing());
                return MorphicSystem::new(
                    blocks.alphabet.clone(),
                    sys.target.clone(),
                    blocks.start,
                    blocks.phi2,
                    psi2,
                );
            }
            Err(_) => continue,
        }
    }
    Err(Error::Normalize(
        "unsupported output-silence structure (no usable power <= 16)".into(),
    ))
}

/// Split each letter `c` into `|f(c)|` positional copies so the output
/// morphism becomes a coding. Needs `|f(g(c))| >= |f(c)|` for every letter;
/// `g` is raised to a power to ensure it (the fixed point is unchanged).
fn split_letters(sys: MorphicSystem) -> Result<MorphicSystem> {
    debug_assert!(sys.phi.is_non_erasing() && sys.psi.is_non_erasing());
    let n = sys.alphabet.len();
    let mut phi = sys.phi.clone();
    let mut ok = false;
    for _power in 1..=64usize {
        // every letter's image must speak at least as much as the letter, and
        // the start letter strictly more (its first copy keeps a growing head)
        ok = (0..n as u8).all(|l| {
            let img_out: usize = phi.image(l).iter().map(|&b| sys.psi.image(b).len()).sum();
            let need = sys.psi.image(l).len() + usize::from(l == sys.start);
            img_out >= need
        });
        if ok {
            break;
        }
        phi = phi.then(&sys.phi)?;
    }
    if !ok {
        return Err(Error::Normalize(
            "no power makes image output lengths non-decreasing".into(),
        ));
    }

    // new alphabet: (c, i) for 1 <= i <= |f(c)|
    let mut ids: Vec<Vec<usize>> = Vec::with_capacity(n); // ids[c][i]
    let mut tokens = Vec::new();
    let mut coding = Vec::new();
    for c in 0..n as u8 {
        let m = sys.psi.image(c).len();
        let mut row = Vec::with_capacity(m);
        for i in 0..m {
            row.push(tokens.len());
            let tok = if m == 1 {
                sys.alphabet.token(c).to_string()
            } else {
                format!("{}.{}", sys.alphabet.token(c), i + 1)
            };
            tokens.push(tok);
            coding.push(Word(vec![sys.psi.image(c)[i]]));
        }
        ids.push(row);
    }
    let alphabet = Alphabet::new(tokens)?;
    let expand = |w: &[Letter]| -> Word {
        let mut out = Vec::new();
        for &d in w {
            for &id in &ids[d as usize] {
                out.push(id as Letter);
            }
        }
        Word(out)
    };
    // the first copy takes the expansion head, later copies one letter each,
    // so the start letter's first copy stays prolongable
    let mut images = vec![Word::empty(); alphabet.len()];
    for c in 0..n as u8 {
        let exp = expand(phi.image(c));
        let m = ids[c as usize].len();
        debug_assert!(exp.len() >= m);
        let head = exp.len() - (m - 1);
        for i in 0..m {
            let id = ids[c as usize][i];
            images[id] = if i == 0 {
                Word(exp[..head].to_vec())
            } else {
                Word(vec![exp[head + i - 1]])
            };
        }
    }
    let phi2 = Morphism::new(alphabet.clone(), alphabet.clone(), images)?;
    let psi2 = Morphism::new(alphabet.clone(), sys.target.clone(), coding)?;
    let start = ids[sys.start as usize][0] as Letter;
    let out = MorphicSystem::new(alphabet, sys.target.clone(), start, phi2, psi2)?;
    out.check_prolongable()?;
    Ok(out)
}

/// Reference prefix of `f(g^inf(a1))` computed directly from the raw
/// presentation, for fidelity checks. Returns fewer than `n` symbols only
/// when generation stalls.
pub fn raw_prefix(f: &Morphism, g: &Morphism, a1: Letter, n: usize) -> Result<Word> {
    let sys = MorphicSystem::new(
        g.source.clone(),
        f.target.clone(),
        a1,
        g.clone(),
        f.clone(),
    )?;
    match sys.prefix(n) {
        Ok(w) => Ok(w),
        Err(Error::FiniteWord(m)) => Err(Error::FiniteWord(m)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse::parse_rule_file;

    fn fg(rules: &str) -> (Morphism, Morphism, Letter) {
        let sys = parse_rule_file(rules).unwrap().system;
        (sys.psi.clone(), sys.phi.clone(), sys.start)
    }

    #[test]
    fn already_normal_unchanged() {
        let (f, g, a1) = fg("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let sys = normalize(&f, &g, a1).unwrap();
        assert_eq!(sys.alphabet.len(), 2);
        assert!(sys.phi.is_non_erasing() && sys.psi.is_coding());
    }

    #[test]
    fn finite_word_reported() {
        // g: a -> ab, b -> ε, f = id: tail is mortal, word finite
        let (f, g, a1) = fg("alphabet a b\nstart a\nrule a -> a b\nrule b ->\n");
        let err = normalize(&f, &g, a1).unwrap_err();
        assert!(matches!(err, Error::NotProlongable(_) | Error::FiniteWord(_)), "{err}");
    }

    #[test]
    fn splits_non_coding() {
        // g: a -> aab, b -> b, f: a -> 0, b -> 11
        let rules = "alphabet a b\ntarget 0 1\nstart a\nrule a -> a a b\nrule b -> b\ncode a -> 0\ncode b -> 1 1\n";
        let (f, g, a1) = fg(rules);
        let sys = normalize(&f, &g, a1).unwrap();
        assert!(sys.phi.is_non_erasing());
        assert!(sys.psi.is_coding());
        let want = raw_prefix(&f, &g, a1, 200).unwrap();
        assert_eq!(sys.prefix(200).unwrap(), want);
    }

    #[test]
    fn absorbs_mortal_letters() {
        // g: a -> a m b, m -> ε, b -> b a, f = id over {a, m, b}
        let rules = "alphabet a m b\nstart a\nrule a -> a m b\nrule m ->\nrule b -> b a\n";
        let (f, g, a1) = fg(rules);
        let sys = normalize(&f, &g, a1).unwrap();
        assert!(sys.phi.is_non_erasing());
        assert!(sys.psi.is_coding());
        let want = raw_prefix(&f, &g, a1, 500).unwrap();
        assert_eq!(sys.prefix(500).unwrap(), want);
    }

    #[test]
    fn absorbs_silent_letters() {
        // f silent on s, g non-erasing: s must be absorbed
        let rules = "alphabet a s\ntarget x y\nstart a\nrule a -> a s a\nrule s -> s\ncode a -> x\ncode s ->\n";
        let (f, g, a1) = fg(rules);
        let sys = normalize(&f, &g, a1).unwrap();
        assert!(sys.phi.is_non_erasing());
        assert!(sys.psi.is_coding());
        let want = raw_prefix(&f, &g, a1, 300).unwrap();
        assert_eq!(sys.prefix(300).unwrap(), want);
    }

    #[test]
    fn mortal_and_non_coding_combined() {
        let rules = "alphabet a m b\ntarget 0 1\nstart a\nrule a -> a m b\nrule m ->\nrule b -> b m a\ncode a -> 0 1\ncode m -> 1\ncode b -> 1\n";
        let (f, g, a1) = fg(rules);
        let sys = normalize(&f, &g, a1).unwrap();
        assert!(sys.phi.is_non_erasing());
        assert!(sys.psi.is_coding());
        let want = raw_prefix(&f, &g, a1, 500).unwrap();
        assert_eq!(sys.prefix(500).unwrap(), want);
    }
}
