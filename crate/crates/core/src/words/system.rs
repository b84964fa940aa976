//! Morphic systems: a prolongable substitution plus a morphism, and the
//! prefix/factor machinery of the generated infinite word.

use super::{find_sub, find_sub_from, Alphabet, Letter, Morphism, Word};
use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::sync::Mutex;

/// The problem instance: `W = psi(phi^inf(start))`.
#[derive(Debug, Clone)]
pub struct MorphicSystem {
    /// Source alphabet `A`.
    pub alphabet: Alphabet,
    /// Target alphabet `B`.
    pub target: Alphabet,
    /// Start letter; `phi` must be prolongable over it for the word ops.
    pub start: Letter,
    /// Substitution `A* -> A*`.
    pub phi: Morphism,
    /// Morphism `A* -> B*` applied to the fixed point.
    pub psi: Morphism,
}

impl MorphicSystem {
    pub fn new(
        alphabet: Alphabet,
        target: Alphabet,
        start: Letter,
        phi: Morphism,
        psi: Morphism,
    ) -> Result<Self> {
        if !alphabet.contains_id(start) {
            return Err(Error::Invalid("start letter outside alphabet".into()));
        }
        if phi.source != alphabet || phi.target != alphabet {
            return Err(Error::Invalid("phi must be a substitution on A".into()));
        }
        if psi.source != alphabet || psi.target != target {
            return Err(Error::Invalid("psi must map A to B".into()));
        }
        Ok(MorphicSystem {
            alphabet,
            target,
            start,
            phi,
            psi,
        })
    }

    /// Identity-coded system (`psi = id`).
    pub fn pure(alphabet: Alphabet, start: Letter, phi: Morphism) -> Result<Self> {
        let psi = Morphism::identity(&alphabet);
        let target = alphabet.clone();
        MorphicSystem::new(alphabet, target, start, phi, psi)
    }

    /// Prolongability over the start letter: `phi(a1) = a1·v` with `v`
    /// containing at least one non-mortal letter.
    pub fn check_prolongable(&self) -> Result<()> {
        let img = self.phi.image(self.start);
        if img.first() != Some(&self.start) {
            return Err(Error::NotProlongable(
                self.alphabet.token(self.start).to_string(),
            ));
        }
        let mortal = self.phi.mortal_letters();
        if img[1..].iter().all(|l| mortal.contains(l)) {
            return Err(Error::NotProlongable(format!(
                "{}: image tail is mortal",
                self.alphabet.token(self.start)
            )));
        }
        Ok(())
    }

    /// The first `n` symbols of `W = psi(phi^inf(start))`.
    pub fn prefix(&self, n: usize) -> Result<Word> {
        let mut buf = PrefixBuffer::new(self.clone())?;
        buf.ensure(n)?;
        Ok(Word(buf.word()[..n].to_vec()))
    }

    /// A-side factors of length exactly `m` of `phi^inf(start)`, exact.
    ///
    /// Seeds with the windows of the first iterate of length >= `m` and
    /// closes under "windows of the image": every length-`m` factor of the
    /// next iterate is a window of `phi(u)` for some length-`m` factor `u`
    /// (non-erasing), so the union is monotone, bounded by `|A|^m`, and its
    /// fixpoint is the factor set. Windows are taken across image boundaries.
    fn a_factors_exact(&self, m: usize) -> Result<BTreeSet<Word>> {
        if !self.phi.is_non_erasing() {
            return Err(Error::Invalid("factors requires non-erasing phi".into()));
        }
        self.check_prolongable()?;
        let mut seed = Word(vec![self.start]);
        let mut guard = 0usize;
        while seed.len() < m {
            seed = self.phi.apply(&seed)?;
            guard += 1;
            if guard > 64 && seed.len() < m {
                return Err(Error::ResourceCap("factor seed does not grow".into()));
            }
        }
        let mut facs: BTreeSet<Word> = seed.windows(m).map(|w| Word(w.to_vec())).collect();
        let mut frontier: Vec<Word> = facs.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut fresh = Vec::new();
            for u in frontier.drain(..) {
                let img = self.phi.apply(&u)?;
                for w in img.windows(m) {
                    if facs.insert(Word(w.to_vec())) {
                        fresh.push(Word(w.to_vec()));
                    }
                }
            }
            frontier = fresh;
        }
        Ok(facs)
    }

    /// The exact set of length-`n` factors of `W`. Requires `phi` and `psi`
    /// non-erasing.
    pub fn factors(&self, n: usize) -> Result<BTreeSet<Word>> {
        Ok(self.factors_upto(n)?.pop().expect("n >= 1"))
    }

    /// Exact factor sets of `W` for every length `1..=n` (index `len - 1`).
    ///
    /// Every length-`<= n` output window lies inside `psi(u)` for a length-`n`
    /// factor `u` of the fixed point (both maps non-erasing, and every short
    /// factor extends rightward inside the infinite word), so mapping the
    /// exact length-`n` A-factor set through `psi` covers everything.
    pub fn factors_upto(&self, n: usize) -> Result<Vec<BTreeSet<Word>>> {
        if n == 0 {
            return Err(Error::Invalid("factors requires n >= 1".into()));
        }
        if !self.psi.is_non_erasing() {
            return Err(Error::Invalid("factors requires non-erasing psi".into()));
        }
        let a_facs = self.a_factors_exact(n)?;
        let mut out = vec![BTreeSet::new(); n];
        for u in &a_facs {
            let img = self.psi.apply(u)?;
            for len in 1..=n.min(img.len()) {
                for w in img.windows(len) {
                    out[len - 1].insert(Word(w.to_vec()));
                }
            }
        }
        Ok(out)
    }

    /// Whether the nonempty word `u` occurs in `W` (exact, via [`Self::factors`]).
    pub fn occurs(&self, u: &[Letter]) -> Result<bool> {
        if u.is_empty() {
            return Err(Error::Invalid("occurs requires a nonempty word".into()));
        }
        Ok(self.factors(u.len())?.contains(&Word(u.to_vec())))
    }

    /// Restrict the alphabet to letters actually occurring in `phi^inf(start)`
    /// (occurrence closure from the start letter). The generated word is
    /// unchanged.
    pub fn restrict_reachable(&self) -> Result<MorphicSystem> {
        let graph = self.phi.occurrence_graph();
        let n = self.alphabet.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.start as usize];
        seen[self.start as usize] = true;
        while let Some(v) = stack.pop() {
            for &w in &graph[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            return Ok(self.clone());
        }
        let kept: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
        let mut remap = vec![Letter::MAX; n];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new as Letter;
        }
        let alphabet = Alphabet::new(kept.iter().map(|&i| self.alphabet.token(i as Letter)))?;
        let remap_word =
            |w: &Word| -> Word { Word(w.iter().map(|&l| remap[l as usize]).collect()) };
        let phi_images = kept
            .iter()
            .map(|&i| remap_word(self.phi.image(i as Letter)))
            .collect();
        let psi_images = kept
            .iter()
            .map(|&i| self.psi.image(i as Letter).clone())
            .collect();
        let phi = Morphism::new(alphabet.clone(), alphabet.clone(), phi_images)?;
        let psi = Morphism::new(alphabet.clone(), self.target.clone(), psi_images)?;
        MorphicSystem::new(
            alphabet,
            self.target.clone(),
            remap[self.start as usize],
            phi,
            psi,
        )
    }
}

/// Lazily extended prefix of `W = psi(phi^inf(start))`.
///
/// The A-side fixed point is generated chunkwise as `a1 · v · phi(v) · ...`;
/// each chunk is mapped through `psi` into the B-side buffer.
pub struct PrefixBuffer {
    sys: MorphicSystem,
    chunk: Word,
    b_buf: Vec<Letter>,
    stalled_rounds: usize,
}

impl PrefixBuffer {
    pub fn new(sys: MorphicSystem) -> Result<Self> {
        sys.check_prolongable()?;
        let img = sys.phi.image(sys.start).clone();
        let first = sys.psi.apply(&[sys.start])?;
        let chunk = Word(img[1..].to_vec());
        Ok(PrefixBuffer {
            sys,
            chunk,
            b_buf: first.0,
            stalled_rounds: 0,
        })
    }

    pub fn word(&self) -> &[Letter] {
        &self.b_buf
    }

    pub fn len(&self) -> usize {
        self.b_buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b_buf.is_empty()
    }

    /// Extend the buffer until it holds at least `n` symbols.
    pub fn ensure(&mut self, n: usize) -> Result<()> {
        while self.b_buf.len() < n {
            let before = self.b_buf.len();
            let mapped = self.sys.psi.apply(&self.chunk)?;
            self.b_buf.extend_from_slice(&mapped);
            let next = self.sys.phi.apply(&self.chunk)?;
            self.chunk = next;
            if self.b_buf.len() == before {
                self.stalled_rounds += 1;
                if self.stalled_rounds > 4 * (self.sys.alphabet.len() + 1) {
                    return Err(Error::FiniteWord(format!(
                        "prefix stalled at {} symbols",
                        self.b_buf.len()
                    )));
                }
            } else {
                self.stalled_rounds = 0;
            }
            if self.b_buf.len().max(self.chunk.len()) > (1 << 31) {
                return Err(Error::ResourceCap("prefix buffer exceeds cap".into()));
            }
        }
        Ok(())
    }
}

/// Factor queries against `W` for words too long for the exact factor-set
/// machinery: searches a lazily grown prefix sized by the word's observed
/// recurrence slope, and confirms negatives under window doubling.
///
/// Positives are exact. Negatives are empirical, calibrated for primitive
/// (linearly recurrent) words; callers that must certify a negative re-check
/// it with further doubling via [`FactorOracle::certify_absent`].
pub struct FactorOracle {
    inner: Mutex<OracleInner>,
    /// Recurrence slope estimate: max over measured n of R(n)/n.
    slope: f64,
    cap: usize,
}

struct OracleInner {
    buf: PrefixBuffer,
}

impl FactorOracle {
    pub fn new(sys: &MorphicSystem) -> Result<Self> {
        Self::with_cap(sys, 1 << 28)
    }

    pub fn with_cap(sys: &MorphicSystem, cap: usize) -> Result<Self> {
        let mut buf = PrefixBuffer::new(sys.clone())?;
        let probe = 20_000.min(cap);
        buf.ensure(probe)?;
        let slope = recurrence_slope(&buf.word()[..probe], 24).max(2.0);
        Ok(FactorOracle {
            inner: Mutex::new(OracleInner { buf }),
            slope,
            cap,
        })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    fn window_for(&self, len: usize) -> usize {
        let w = ((2.0 * self.slope + 4.0) * len as f64) as usize;
        w.clamp(4096, self.cap)
    }

    /// Whether `u` is a factor of `W`.
    pub fn contains(&self, u: &[Letter]) -> bool {
        self.find(u).is_some()
    }

    /// Leftmost occurrence position of `u` in `W`, if found within the
    /// calibrated (doubled on miss) search window.
    pub fn find(&self, u: &[Letter]) -> Option<usize> {
        if u.is_empty() {
            return Some(0);
        }
        let mut inner = self.inner.lock().unwrap();
        let mut window = self.window_for(u.len()).max(u.len() * 2);
        for _ in 0..3 {
            window = window.min(self.cap);
            if inner.buf.ensure(window).is_err() {
                break;
            }
            let text = &inner.buf.word()[..window.min(inner.buf.len())];
            if let Some(p) = find_sub(text, u) {
                return Some(p);
            }
            if window >= self.cap {
                break;
            }
            window *= 2;
        }
        None
    }

    /// Next occurrence strictly after `from`.
    pub fn find_after(&self, u: &[Letter], from: usize) -> Option<usize> {
        let mut inner = self.inner.lock().unwrap();
        let want = (from + self.window_for(u.len()))
            .min(self.cap)
            .max(from + 2 * u.len());
        inner.buf.ensure(want).ok()?;
        let text = &inner.buf.word()[..want.min(inner.buf.len())];
        find_sub_from(text, u, from + 1)
    }

    /// Re-confirm a negative with an extra round of window doubling.
    /// Returns true when the word is still absent at the enlarged window.
    pub fn certify_absent(&self, u: &[Letter]) -> bool {
        let mut inner = self.inner.lock().unwrap();
        let window = (8 * self.window_for(u.len())).min(self.cap);
        if inner.buf.ensure(window).is_err() {
            // fall back to whatever could be materialized
        }
        let text = inner.buf.word();
        find_sub(&text[..window.min(text.len())], u).is_none()
    }

    /// A view of the materialized prefix, at least `n` symbols long.
    pub fn with_prefix<R>(&self, n: usize, f: impl FnOnce(&[Letter]) -> R) -> Result<R> {
        let mut inner = self.inner.lock().unwrap();
        let n = n.min(self.cap);
        inner.buf.ensure(n)?;
        Ok(f(inner.buf.word()))
    }

    pub fn materialized_len(&self) -> usize {
        self.inner.lock().unwrap().buf.len()
    }
}

/// Max over `n <= n_max` of (max gap between consecutive occurrence starts of
/// any length-n factor) / n, measured on `text`.
pub fn recurrence_slope(text: &[Letter], n_max: usize) -> f64 {
    let mut slope: f64 = 1.0;
    for n in 1..=n_max.min(text.len() / 4) {
        let r = max_gap_for_len(text, n);
        slope = slope.max(r as f64 / n as f64);
    }
    slope
}

/// Max over length-`n` factors of the biggest gap between consecutive
/// occurrence starts (plus the lead-in to the first occurrence).
pub fn max_gap_for_len(text: &[Letter], n: usize) -> usize {
    use std::collections::HashMap;
    if text.len() < n || n == 0 {
        return 0;
    }
    let mut last: HashMap<&[Letter], usize> = HashMap::new();
    let mut gap: HashMap<&[Letter], usize> = HashMap::new();
    for i in 0..=text.len() - n {
        let w = &text[i..i + n];
        let e = gap.entry(w).or_insert(0);
        if let Some(&p) = last.get(w) {
            *e = (*e).max(i - p);
        } else {
            *e = (*e).max(i + 1);
        }
        last.insert(w, i);
    }
    gap.values().copied().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::morphism::fixtures::{fibonacci, thue_morse};

    fn tm_system() -> MorphicSystem {
        let a = Alphabet::new(["a", "b"]).unwrap();
        MorphicSystem::pure(a, 0, thue_morse()).unwrap()
    }

    fn fib_system() -> MorphicSystem {
        let a = Alphabet::new(["a", "b"]).unwrap();
        MorphicSystem::pure(a, 0, fibonacci()).unwrap()
    }

    #[test]
    fn tm_prefix_8() {
        // iterate phi_TM three times from a: abbabaab
        let w = tm_system().prefix(8).unwrap();
        assert_eq!(w, Word(vec![0, 1, 1, 0, 1, 0, 0, 1]));
    }

    #[test]
    fn fib_prefix_8() {
        // iterate phi_FIB from a: abaababa
        let w = fib_system().prefix(8).unwrap();
        assert_eq!(w, Word(vec![0, 1, 0, 0, 1, 0, 1, 0]));
    }

    #[test]
    fn prefix_1_is_psi_start() {
        let w = tm_system().prefix(1).unwrap();
        assert_eq!(w, Word(vec![0]));
    }

    #[test]
    fn tm_factors_2() {
        let f = tm_system().factors(2).unwrap();
        let expect: BTreeSet<Word> = [
            Word(vec![0, 1]),
            Word(vec![1, 0]),
            Word(vec![1, 1]),
            Word(vec![0, 0]),
        ]
        .into_iter()
        .collect();
        assert_eq!(f, expect);
    }

    #[test]
    fn periodic_system_factors_2() {
        // a -> aba, b -> b generates (ab)^inf; factors of length 2 are {ab, ba}
        let a = Alphabet::new(["a", "b"]).unwrap();
        let phi = Morphism::new(
            a.clone(),
            a.clone(),
            vec![Word(vec![0, 1, 0]), Word(vec![1])],
        )
        .unwrap();
        let sys = MorphicSystem::pure(a, 0, phi).unwrap();
        let f = sys.factors(2).unwrap();
        let expect: BTreeSet<Word> = [Word(vec![0, 1]), Word(vec![1, 0])].into_iter().collect();
        assert_eq!(f, expect);
    }

    #[test]
    fn factors_1_includes_first_letter() {
        let f = tm_system().factors(1).unwrap();
        assert!(f.contains(&Word(vec![0])));
    }

    #[test]
    fn tm_occurs() {
        let sys = tm_system();
        assert!(!sys.occurs(&[0, 0, 0]).unwrap()); // aaa is not a TM factor
        assert!(sys.occurs(&[0, 1, 1, 0]).unwrap()); // abba visible in the 8-prefix
        assert!(sys.occurs(&[0]).unwrap());
    }

    #[test]
    fn factors_agree_with_prefix_scan() {
        // factor sets equal the windows of a long prefix, for all n <= 8
        for sys in [tm_system(), fib_system()] {
            let prefix = sys.prefix(4096).unwrap();
            for n in 1..=8 {
                let exact = sys.factors(n).unwrap();
                let mut scanned = BTreeSet::new();
                for w in prefix.windows(n) {
                    scanned.insert(Word(w.to_vec()));
                }
                assert_eq!(exact, scanned, "n={n}");
            }
        }
    }

    #[test]
    fn prefix_monotone() {
        let sys = fib_system();
        let long = sys.prefix(256).unwrap();
        for n in [1usize, 5, 32, 100] {
            let short = sys.prefix(n).unwrap();
            assert_eq!(&long[..n], &short[..]);
        }
    }

    #[test]
    fn restrict_reachable_drops_junk() {
        // alphabet {a,b,z}, z unreachable
        let a = Alphabet::new(["a", "b", "z"]).unwrap();
        let phi = Morphism::new(
            a.clone(),
            a.clone(),
            vec![Word(vec![0, 1]), Word(vec![1, 0]), Word(vec![2, 2])],
        )
        .unwrap();
        let sys = MorphicSystem::pure(a, 0, phi).unwrap();
        let r = sys.restrict_reachable().unwrap();
        assert_eq!(r.alphabet.len(), 2);
        assert_eq!(r.alphabet.token(0), "a");
        assert_eq!(r.prefix(16).unwrap(), sys.prefix(16).unwrap());
    }

    #[test]
    fn restrict_reachable_keeps_all_when_reachable() {
        // c -> cb, a -> ab, b -> ba with start c keeps {c,a,b}
        let a = Alphabet::new(["c", "a", "b"]).unwrap();
        let phi = Morphism::new(
            a.clone(),
            a.clone(),
            vec![Word(vec![0, 2]), Word(vec![1, 2]), Word(vec![2, 1])],
        )
        .unwrap();
        let sys = MorphicSystem::pure(a, 0, phi).unwrap();
        let r = sys.restrict_reachable().unwrap();
        assert_eq!(r.alphabet.len(), 3);
    }

    #[test]
    fn oracle_finds_factors() {
        let sys = tm_system();
        let oracle = FactorOracle::new(&sys).unwrap();
        let prefix = sys.prefix(64).unwrap();
        assert_eq!(oracle.find(&prefix[10..30]), Some(10));
        assert!(!oracle.contains(&[0, 0, 0]));
        assert!(oracle.certify_absent(&[0, 0, 0]));
    }
}
