//! Primitive core extraction: a sub-alphabet on which a power of the
//! substitution is primitive, the uniformly recurrent word `H` it generates,
//! the periodicity test on `H`, and assembly of the decision instance.

use crate::error::{Error, Result};
use crate::graphs::{shortest_path, tarjan_scc};
use crate::growth::GrowthBounds;
use crate::words::{Alphabet, Letter, Morphism, MorphicSystem, Word};
use std::collections::BTreeSet;

/// Letters lying on a cycle of the occurrence digraph: `a` occurs in
/// `phi^k(a)` for some `k <= |A|`.
pub fn recurrent_letters(phi: &Morphism) -> BTreeSet<Letter> {
    let graph = phi.occurrence_graph();
    let comps = tarjan_scc(&graph);
    let mut out = BTreeSet::new();
    for comp in comps {
        if comp.len() >= 2 {
            out.extend(comp.into_iter().map(|v| v as Letter));
        } else if graph[comp[0]].contains(&comp[0]) {
            out.insert(comp[0] as Letter);
        }
    }
    out
}

/// The extracted core: `rho2 = (phi^n)^l` restricted to `D` is primitive and
/// prolongable over `d0`; `H = psi(rho2^inf(d0))` is uniformly recurrent and
/// every factor of `H` is a factor of the original word.
#[derive(Debug, Clone)]
pub struct PrimitiveCore {
    /// Letters of `D` in the ambient alphabet.
    pub d_letters: Vec<Letter>,
    /// `H` as a system over the remapped sub-alphabet.
    pub h_sys: MorphicSystem,
    /// Powers used: `rho = phi^n`, `rho2 = rho^l`.
    pub n: usize,
    pub l: usize,
}

/// Extract the primitive core of an all-growing system.
///
/// `n` is the lcm over recurrent letters of a minimal cycle length, so every
/// recurrent letter occurs in its own `rho = phi^n` image. `D` is the first
/// (by smallest letter id) terminal strongly connected component of the
/// occurrence digraph of `rho` reachable from the start letter; terminality
/// makes the restriction of `rho` to `D` a genuine substitution, and the
/// self-occurrences make that restriction primitive. `d0` and `l` come from
/// iterating the first-letter map of `rho` on `D` until it cycles.
pub fn extract_core(sys: &MorphicSystem) -> Result<PrimitiveCore> {
    let recurrent = recurrent_letters(&sys.phi);
    if recurrent.is_empty() {
        return Err(Error::Invalid("no recurrent letters".into()));
    }
    let graph = sys.phi.occurrence_graph();
    let mut n = 1usize;
    for &a in &recurrent {
        let cycle = shortest_path(&graph, a as usize, a as usize)
            .expect("recurrent letter lies on a cycle");
        let len = cycle.len() - 1;
        n = num_integer::lcm(n, len);
        if n > 1 << 16 {
            return Err(Error::ResourceCap("cycle lcm exceeds cap".into()));
        }
    }
    let rho = sys.phi.power(n)?;

    // terminal SCC of the rho-occurrence digraph reachable from the start,
    // the one holding the smallest letter id
    let rho_graph = rho.occurrence_graph();
    let comps = tarjan_scc(&rho_graph);
    let mut comp_of = vec![0usize; rho_graph.len()];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let reach = crate::graphs::reachable(&rho_graph, sys.start as usize);
    let mut candidate: Option<Vec<usize>> = None;
    for comp in &comps {
        if !comp.iter().any(|&v| reach[v]) {
            continue;
        }
        let terminal = comp
            .iter()
            .all(|&v| rho_graph[v].iter().all(|&w| comp_of[w] == comp_of[comp[0]]));
        if terminal {
            let better = match &candidate {
                None => true,
                Some(c) => comp.iter().min() < c.iter().min(),
            };
            if better {
                candidate = Some(comp.clone());
            }
        }
    }
    let mut d: Vec<usize> =
        candidate.ok_or_else(|| Error::Invalid("no terminal component".into()))?;
    d.sort_unstable();

    let mut remap = vec![Letter::MAX; sys.alphabet.len()];
    for (new, &old) in d.iter().enumerate() {
        remap[old] = new as Letter;
    }
    let d_alpha = Alphabet::new(d.iter().map(|&v| sys.alphabet.token(v as Letter)))?;
    let rho_d = Morphism::new(
        d_alpha.clone(),
        d_alpha.clone(),
        d.iter()
            .map(|&v| {
                Word(
                    rho.image(v as Letter)
                        .iter()
                        .map(|&b| remap[b as usize])
                        .collect(),
                )
            })
            .collect(),
    )?;
    let psi_d = Morphism::new(
        d_alpha.clone(),
        sys.target.clone(),
        d.iter()
            .map(|&v| sys.psi.image(v as Letter).clone())
            .collect(),
    )?;

    // first-letter map on D, iterated from the smallest letter until a cycle
    let sigma = |x: Letter| -> Letter { rho_d.image(x)[0] };
    let mut path = vec![0 as Letter];
    let (d0, l) = loop {
        let next = sigma(*path.last().unwrap());
        if let Some(pos) = path.iter().position(|&x| x == next) {
            break (next, path.len() - pos);
        }
        path.push(next);
    };
    let rho2 = rho_d.power(l)?;
    let h_sys = MorphicSystem::new(d_alpha, sys.target.clone(), d0, rho2, psi_d)?;
    h_sys.check_prolongable()?;
    Ok(PrimitiveCore {
        d_letters: d.into_iter().map(|v| v as Letter).collect(),
        h_sys,
        n,
        l,
    })
}

/// Primitivity check by boolean matrix powers: some `m <= (|D|-1)^2 + 1` has
/// every letter occurring in `phi^m(e)` for every `e`.
pub fn is_primitive(phi: &Morphism) -> bool {
    let n = phi.source.len();
    let base: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            let mut row = vec![false; n];
            for &b in phi.image(a as Letter).iter() {
                row[b as usize] = true;
            }
            row
        })
        .collect();
    let mut reach = base.clone();
    let cap = (n.saturating_sub(1)).pow(2) + 1;
    for _ in 0..cap {
        if reach.iter().all(|row| row.iter().all(|&x| x)) {
            return true;
        }
        let next: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                let mut row = vec![false; n];
                for k in 0..n {
                    if reach[i][k] {
                        for (j, cell) in row.iter_mut().enumerate() {
                            *cell |= base[k][j];
                        }
                    }
                }
                row
            })
            .collect();
        reach = next;
    }
    reach.iter().all(|row| row.iter().all(|&x| x))
}

/// Periodicity test for a primitive prolongable system, by factor counting:
/// the word is (purely, by recurrence) periodic iff `p(n) <= n` for some `n`.
/// Tests `n = 1..=n_max` and returns the shortest period, or `None` when
/// `p(n) >= n + 1` throughout. With the heuristic default bound the verdict
/// "aperiodic" relies on `n_max` being large enough; callers flag that.
pub fn is_periodic_primitive(h: &MorphicSystem, n_max: usize) -> Result<Option<Word>> {
    for n in 1..=n_max {
        let facs = h.factors(n)?;
        if facs.len() <= n {
            for q in 1..=n {
                let prefix = h.prefix(q)?;
                let shifts: BTreeSet<Word> = prefix.rotations().into_iter().collect();
                let fq = h.factors(q)?;
                if fq.iter().all(|f| shifts.contains(f)) {
                    return Ok(Some(prefix));
                }
            }
            debug_assert!(false, "factor count collapsed but no period found");
        }
    }
    Ok(None)
}

/// Default bound for the periodicity test:
/// `|D| * max|rho2(d)| * ceil(theta)^2`, clamped to a sane range.
pub fn default_periodicity_bound(h: &MorphicSystem) -> usize {
    let d = h.alphabet.len();
    let img = h.phi.max_image_len();
    let theta_ceil = img.max(2); // Perron root <= max image length
    (d * img * theta_ceil * theta_ceil).clamp(8, 4096)
}

/// The assembled decision instance: is every `h(g^k(source))` a factor of
/// the core word `H`?
#[derive(Debug, Clone)]
pub struct NosInstance {
    /// Full substitution whose fixed point carries the sources.
    pub g: Morphism,
    /// Output morphism applied to the `g`-iterates.
    pub h: Morphism,
    /// Start letter of the `g`-fixed point.
    pub start: Letter,
    /// The core word `H` (primitive; the decision loop requires it aperiodic).
    pub h_sys: MorphicSystem,
    /// Geometric bounds for `|h(g^k(a))|`.
    pub bounds: GrowthBounds,
}

/// Build the decision instance from the (contracted) system and its core.
///
/// The generated word is uniformly recurrent iff every factor of it is a
/// factor of `H`, iff every working word `h(g^k(q))` over length-<=2 sources
/// `q` is a factor of `H`: once `k` is large enough a factor spans at most
/// two adjacent `k`-th images, and working words are factors of the word
/// itself.
pub fn make_nos_instance(
    sys: &MorphicSystem,
    core: &PrimitiveCore,
    bounds: &GrowthBounds,
) -> NosInstance {
    NosInstance {
        g: sys.phi.clone(),
        h: sys.psi.clone(),
        start: sys.start,
        h_sys: core.h_sys.clone(),
        bounds: bounds.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse::parse_rule_file;

    fn sys(rules: &str) -> MorphicSystem {
        parse_rule_file(rules).unwrap().system
    }

    #[test]
    fn recurrent_simple() {
        let tm = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        assert_eq!(recurrent_letters(&tm.phi), BTreeSet::from([0, 1]));
        let tail = sys("alphabet c a b\nstart c\nrule c -> c b\nrule a -> a b\nrule b -> b a\n");
        assert_eq!(recurrent_letters(&tail.phi), BTreeSet::from([0, 1, 2]));
        // 2-cycle: a -> b, b -> a
        let swap = sys("alphabet a b\nstart a\nrule a -> b\nrule b -> a\n");
        assert_eq!(recurrent_letters(&swap.phi), BTreeSet::from([0, 1]));
    }

    #[test]
    fn core_of_tm_is_tm() {
        let tm = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let core = extract_core(&tm).unwrap();
        assert_eq!(core.d_letters, vec![0, 1]);
        assert_eq!((core.n, core.l), (1, 1));
        assert_eq!(core.h_sys.prefix(16).unwrap(), tm.prefix(16).unwrap());
        assert!(is_primitive(&core.h_sys.phi));
    }

    #[test]
    fn core_of_prefixed_tm() {
        // c -> cb, a -> ab, b -> ba, start c: D = {a,b}, H = TM over {a,b}
        let s = sys("alphabet c a b\nstart c\nrule c -> c b\nrule a -> a b\nrule b -> b a\n");
        let core = extract_core(&s).unwrap();
        assert_eq!(core.d_letters, vec![1, 2]);
        let tm = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        // compare rendered text: the two systems use different target ids
        assert_eq!(
            core.h_sys.target.render(&core.h_sys.prefix(64).unwrap()),
            tm.target.render(&tm.prefix(64).unwrap())
        );
        assert!(is_primitive(&core.h_sys.phi));
    }

    #[test]
    fn core_determinism() {
        let s = sys("alphabet c a b\nstart c\nrule c -> c a\nrule a -> a b\nrule b -> b a\n");
        let c1 = extract_core(&s).unwrap();
        let c2 = extract_core(&s).unwrap();
        assert_eq!(c1.d_letters, c2.d_letters);
        assert_eq!((c1.n, c1.l), (c2.n, c2.l));
        assert_eq!(c1.h_sys.phi, c2.h_sys.phi);
    }

    #[test]
    fn periodic_detection() {
        // single-letter core x -> xx with psi(x) = ab gives (ab)^inf
        let per = sys("alphabet x\ntarget a b\nstart x\nrule x -> x x\ncode x -> a b\n");
        let u = is_periodic_primitive(&per, 16).unwrap();
        assert_eq!(u, Some(Word(vec![0, 1])));
    }

    #[test]
    fn tm_and_fib_aperiodic() {
        let tm = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        assert_eq!(is_periodic_primitive(&tm, 64).unwrap(), None);
        let fib = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> a\n");
        assert_eq!(is_periodic_primitive(&fib, 64).unwrap(), None);
        // TM factor counts for n = 1..5 are 2, 4, 6, 10, 12
        let counts: Vec<usize> = (1..=5).map(|n| tm.factors(n).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 4, 6, 10, 12]);
        // FIB is Sturmian: p(n) = n + 1
        let fcounts: Vec<usize> = (1..=6).map(|n| fib.factors(n).unwrap().len()).collect();
        assert_eq!(fcounts, vec![2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn core_factors_are_word_factors() {
        // every length-<=12 factor of H is a factor of W
        let s = sys("alphabet c a b\nstart c\nrule c -> c a\nrule a -> a b\nrule b -> b a\n");
        let core = extract_core(&s).unwrap();
        for n in [1usize, 4, 8, 12] {
            let hf = core.h_sys.factors(n).unwrap();
            let wf = s.factors(n).unwrap();
            assert!(hf.is_subset(&wf), "n={n}");
        }
    }
}
