//! Bounded/growing letter classification, the pair graph deciding finiteness
//! of the bounded-factor set, and the pure-periodicity test.

use crate::error::{Error, Result};
use crate::graphs::{reachable, shortest_path, tarjan_scc};
use crate::words::{Alphabet, Letter, Morphism, MorphicSystem, Word};
use std::collections::{BTreeSet, HashMap};

/// Per-letter classification under iteration of the substitution.
#[derive(Debug, Clone)]
pub struct LetterClass {
    growing: Vec<bool>,
}

impl LetterClass {
    pub fn is_growing(&self, l: Letter) -> bool {
        self.growing[l as usize]
    }

    pub fn is_bounded(&self, l: Letter) -> bool {
        !self.growing[l as usize]
    }

    /// A word is bounded iff all its letters are bounded.
    pub fn word_is_bounded(&self, w: &[Letter]) -> bool {
        w.iter().all(|&l| self.is_bounded(l))
    }

    pub fn growing_mask(&self) -> Vec<bool> {
        self.growing.clone()
    }

    pub fn growing_letters(&self) -> Vec<Letter> {
        (0..self.growing.len() as u8)
            .filter(|&l| self.growing[l as usize])
            .collect()
    }

    pub fn bounded_letters(&self) -> Vec<Letter> {
        (0..self.growing.len() as u8)
            .filter(|&l| !self.growing[l as usize])
            .collect()
    }

    pub fn all_growing(&self) -> bool {
        self.growing.iter().all(|&g| g)
    }
}

/// Classify letters of a non-erasing substitution as bounded or growing.
///
/// A letter is growing iff, in the occurrence digraph (edge `a -> b` when `b`
/// occurs in `phi(a)`), it reaches a letter lying on a cycle whose image has
/// length >= 2. For non-erasing `phi` this is equivalent to
/// `|phi^k(a)| -> inf`: such a cycle pumps persistent extra material every
/// turn, while letters reaching only image-length-1 cycles have descendant
/// trees of bounded size.
pub fn classify_letters(phi: &Morphism) -> LetterClass {
    assert!(
        phi.is_non_erasing(),
        "classify_letters requires non-erasing phi"
    );
    let n = phi.source.len();
    let graph = phi.occurrence_graph();
    let comps = tarjan_scc(&graph);
    let mut on_cycle = vec![false; n];
    for comp in &comps {
        if comp.len() >= 2 {
            for &v in comp {
                on_cycle[v] = true;
            }
        } else {
            let v = comp[0];
            if graph[v].contains(&v) {
                on_cycle[v] = true;
            }
        }
    }
    let seed: Vec<bool> = (0..n)
        .map(|l| on_cycle[l] && phi.image(l as Letter).len() >= 2)
        .collect();
    // growing = reaches a seed; propagate backwards
    let mut rev = vec![Vec::new(); n];
    for (v, succs) in graph.iter().enumerate() {
        for &w in succs {
            rev[w].push(v);
        }
    }
    let mut growing = seed;
    let mut stack: Vec<usize> = (0..n).filter(|&v| growing[v]).collect();
    while let Some(v) = stack.pop() {
        for &p in &rev[v] {
            if !growing[p] {
                growing[p] = true;
                stack.push(p);
            }
        }
    }
    LetterClass { growing }
}

/// Vertex of the pair graph: a growing letter, an ordered pair of growing
/// letters, or a sentinel pair `(a, t)` with the fictitious end marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QVertex {
    Single(Letter),
    Pair(Letter, Letter),
    Sentinel(Letter),
}

/// Edge with an ordered pair of bounded words.
#[derive(Debug, Clone)]
pub struct QEdge {
    pub src: usize,
    pub dst: usize,
    pub w1: Word,
    pub w2: Word,
}

impl QEdge {
    pub fn is_blank(&self) -> bool {
        self.w1.is_empty() && self.w2.is_empty()
    }
}

/// The labeled digraph over growing letters and letter pairs whose reachable
/// cycles decide finiteness of the bounded-factor set.
#[derive(Debug, Clone)]
pub struct GraphQ {
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
    index: HashMap<QVertex, usize>,
}

impl GraphQ {
    pub fn vertex_id(&self, v: QVertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.src].push(e.dst);
        }
        adj
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let name = |v: &QVertex| -> String {
            match v {
                QVertex::Single(a) => alphabet.token(*a).to_string(),
                QVertex::Pair(a, b) => format!("{}{}", alphabet.token(*a), alphabet.token(*b)),
                QVertex::Sentinel(a) => format!("{}t", alphabet.token(*a)),
            }
        };
        let mut out = String::from("digraph Q {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", name(v)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{{{}, {}}}\"];\n",
                e.src,
                e.dst,
                alphabet.render(&e.w1),
                alphabet.render(&e.w2)
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Ordered pairs of growing letters that actually occur (with bounded
/// material between) in `phi^inf(a1)`: the length-2 factors of the projected
/// word obtained by deleting bounded letters. Computed exactly by the
/// monotone factor closure of the projected substitution.
fn realizable_pairs(phi: &Morphism, a1: Letter, cls: &LetterClass) -> BTreeSet<(Letter, Letter)> {
    let project = |w: &[Letter]| -> Vec<Letter> {
        w.iter().copied().filter(|&l| cls.is_growing(l)).collect()
    };
    let mut facs: BTreeSet<Vec<Letter>> = BTreeSet::new();
    facs.insert(vec![a1]);
    loop {
        let mut next = facs.clone();
        for u in &facs {
            let img = project(&phi.apply(u).expect("in-alphabet"));
            for len in 1..=2.min(img.len()) {
                for w in img.windows(len) {
                    next.insert(w.to_vec());
                }
            }
        }
        if next == facs {
            break;
        }
        facs = next;
    }
    facs.into_iter()
        .filter(|w| w.len() == 2)
        .map(|w| (w[0], w[1]))
        .collect()
}

struct ImageShape {
    head: Word,
    pivots: Vec<Letter>,
    runs: Vec<Word>,
}

fn image_shape(phi: &Morphism, cls: &LetterClass, l: Letter) -> ImageShape {
    let mut head = Vec::new();
    let mut pivots = Vec::new();
    let mut runs: Vec<Vec<Letter>> = Vec::new();
    for &b in phi.image(l).iter() {
        if cls.is_growing(b) {
            pivots.push(b);
            runs.push(Vec::new());
        } else if let Some(r) = runs.last_mut() {
            r.push(b);
        } else {
            head.push(b);
        }
    }
    ImageShape {
        head: Word(head),
        pivots,
        runs: runs.into_iter().map(Word).collect(),
    }
}

/// Build the pair graph per the edge rules, pruned to vertices whose letter
/// pairs actually occur as factors.
pub fn build_graph_q(phi: &Morphism, a1: Letter, cls: &LetterClass) -> Result<GraphQ> {
    if !phi.is_non_erasing() {
        return Err(Error::Invalid("graph Q requires non-erasing phi".into()));
    }
    let growing = cls.growing_letters();
    if growing.is_empty() {
        return Err(Error::Invalid("graph Q requires a growing letter".into()));
    }
    let pairs = realizable_pairs(phi, a1, cls);
    let mut vertices = Vec::new();
    let mut index = HashMap::new();
    let mut add = |v: QVertex, vertices: &mut Vec<QVertex>| -> usize {
        *index.entry(v).or_insert_with(|| {
            vertices.push(v);
            vertices.len() - 1
        })
    };
    for &g in &growing {
        add(QVertex::Single(g), &mut vertices);
    }
    for &(x, y) in &pairs {
        add(QVertex::Pair(x, y), &mut vertices);
    }
    for &g in &growing {
        add(QVertex::Sentinel(g), &mut vertices);
    }

    let shapes: HashMap<Letter, ImageShape> = growing
        .iter()
        .map(|&g| (g, image_shape(phi, cls, g)))
        .collect();

    let mut edges = Vec::new();
    let id = |v: QVertex| -> usize { index[&v] };
    for &g in &growing {
        let sh = &shapes[&g];
        // single -> single when the letter occurs in the image
        let mut seen = BTreeSet::new();
        for &p in &sh.pivots {
            if seen.insert(p) {
                edges.push(QEdge {
                    src: id(QVertex::Single(g)),
                    dst: id(QVertex::Single(p)),
                    w1: Word::empty(),
                    w2: Word::empty(),
                });
            }
        }
        // single -> pair for consecutive growing letters with bounded run between
        for j in 0..sh.pivots.len().saturating_sub(1) {
            let v = QVertex::Pair(sh.pivots[j], sh.pivots[j + 1]);
            if index.contains_key(&v) {
                edges.push(QEdge {
                    src: id(QVertex::Single(g)),
                    dst: id(v),
                    w1: sh.runs[j].clone(),
                    w2: Word::empty(),
                });
            }
        }
        // single -> sentinel and sentinel -> sentinel for the image tail
        let last = *sh.pivots.last().expect("growing image has a pivot");
        let tail = sh.runs.last().cloned().unwrap_or_default();
        edges.push(QEdge {
            src: id(QVertex::Single(g)),
            dst: id(QVertex::Sentinel(last)),
            w1: tail.clone(),
            w2: Word::empty(),
        });
        edges.push(QEdge {
            src: id(QVertex::Sentinel(g)),
            dst: id(QVertex::Sentinel(last)),
            w1: tail,
            w2: Word::empty(),
        });
    }
    // pair -> pair
    for &(x, y) in &pairs {
        let shx = &shapes[&x];
        let shy = &shapes[&y];
        let last = *shx.pivots.last().unwrap();
        let first = shy.pivots[0];
        let dst = QVertex::Pair(last, first);
        if index.contains_key(&dst) {
            edges.push(QEdge {
                src: id(QVertex::Pair(x, y)),
                dst: id(dst),
                w1: shx.runs.last().cloned().unwrap_or_default(),
                w2: shy.head.clone(),
            });
        }
    }
    Ok(GraphQ {
        vertices,
        edges,
        index,
    })
}

/// Outcome of the bounded-factor analysis.
#[derive(Debug, Clone)]
pub enum BoundedFactorReport {
    /// The full (subword-closed, `ε`-containing) set of bounded factors.
    Finite(BTreeSet<Word>),
    /// A nonempty word `U` with `U^k` a factor for every `k`.
    InfinitePower(Word),
}

/// Decide finiteness of the set of bounded factors of `phi^inf(a1)`.
///
/// If every cycle reachable from the start vertex carries only blank labels,
/// the bounded factors are enumerated by walking the labeled paths and
/// assembling `u_k·phi(u_{k-1})...` / `...phi(v_1)...v_k` words; the state
/// space (vertex, left word, right word) is finite because bounded words
/// cycle under iteration. Otherwise a reachable cycle with a nonempty label
/// is composed into a relation `rho(x)` ends-with `x·u` (or the mirrored
/// starts-with form), whose iteration yields the unbounded power `U`.
pub fn bounded_factors(
    phi: &Morphism,
    a1: Letter,
    _cls: &LetterClass,
    q: &GraphQ,
) -> Result<BoundedFactorReport> {
    let start = q
        .vertex_id(QVertex::Single(a1))
        .ok_or_else(|| Error::Invalid("start letter is not growing".into()))?;
    let adj = q.adjacency();
    let reach = reachable(&adj, start);

    // SCCs of the reachable part; look for an internal nonempty-labeled edge
    let comps = tarjan_scc(&adj);
    let mut comp_of = vec![usize::MAX; q.vertices.len()];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let in_cycle = |v: usize| -> bool {
        let c = &comps[comp_of[v]];
        c.len() >= 2 || adj[v].contains(&v)
    };
    for (ei, e) in q.edges.iter().enumerate() {
        if reach[e.src]
            && comp_of[e.src] == comp_of[e.dst]
            && in_cycle(e.src)
            && !e.is_blank()
        {
            let u = extract_power(phi, q, ei, &comps[comp_of[e.src]])?;
            return Ok(BoundedFactorReport::InfinitePower(u));
        }
    }

    // finite case: closed walk enumeration
    let mut seen: BTreeSet<(usize, Word, Word)> = BTreeSet::new();
    let mut stack = vec![(start, Word::empty(), Word::empty())];
    seen.insert(stack[0].clone());
    let mut out: BTreeSet<Word> = BTreeSet::new();
    out.insert(Word::empty());
    while let Some((v, u_acc, v_acc)) = stack.pop() {
        if !matches!(q.vertices[v], QVertex::Single(_)) {
            let full = u_acc.concat(&v_acc);
            for len in 1..=full.len() {
                for w in full.windows(len) {
                    out.insert(Word(w.to_vec()));
                }
            }
        }
        for e in q.edges.iter().filter(|e| e.src == v) {
            let nu = e.w1.concat(&phi.apply(&u_acc)?);
            let nv = phi.apply(&v_acc)?.concat(&e.w2);
            let state = (e.dst, nu, nv);
            if seen.insert(state.clone()) {
                stack.push(state);
            }
            if seen.len() > 200_000 {
                return Err(Error::ResourceCap(
                    "bounded-factor state enumeration exceeds cap".into(),
                ));
            }
        }
    }
    Ok(BoundedFactorReport::Finite(out))
}

/// Compose a nonempty-labeled cycle into the unbounded power witness.
fn extract_power(phi: &Morphism, q: &GraphQ, seed_edge: usize, comp: &[usize]) -> Result<Word> {
    // cycle through the seed edge, staying inside the component
    let e = &q.edges[seed_edge];
    let comp_set: BTreeSet<usize> = comp.iter().copied().collect();
    let sub_adj: Vec<Vec<usize>> = (0..q.vertices.len())
        .map(|v| {
            if comp_set.contains(&v) {
                q.edges
                    .iter()
                    .filter(|e| e.src == v && comp_set.contains(&e.dst))
                    .map(|e| e.dst)
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let back = if e.dst == e.src {
        vec![e.src]
    } else {
        shortest_path(&sub_adj, e.dst, e.src).ok_or_else(|| Error::Invalid("broken SCC".into()))?
    };
    // edge list of the cycle: seed edge, then edges along `back`
    let mut cycle_edges = vec![seed_edge];
    for w in back.windows(2) {
        let ei = q
            .edges
            .iter()
            .position(|e| e.src == w[0] && e.dst == w[1])
            .expect("path edge exists");
        cycle_edges.push(ei);
    }
    let left_side = cycle_edges.iter().any(|&ei| !q.edges[ei].w1.is_empty());
    let labels: Vec<Word> = cycle_edges
        .iter()
        .map(|&ei| {
            if left_side {
                q.edges[ei].w1.clone()
            } else {
                q.edges[ei].w2.clone()
            }
        })
        .collect();
    let qlen = labels.len();
    // left: rho(x) ends with x . w_{q-1} phi(w_{q-2}) ... phi^{q-1}(w_0)
    // right: rho(y) starts with phi^{q-1}(w_0) ... phi(w_{q-2}) w_{q-1} . y
    let mut u = Word::empty();
    for (j, lab) in labels.iter().enumerate() {
        let mut piece = lab.clone();
        let power = qlen - 1 - j;
        for _ in 0..power {
            piece = phi.apply(&piece)?;
        }
        if left_side {
            // w_{q-1} comes first: piece for edge j lands at position (q-1-j)
            u = if j == 0 { piece } else { piece.concat(&u) };
        } else {
            u = if j == 0 { piece } else { piece.concat(&u) };
        }
    }
    debug_assert!(!u.is_empty());
    // iterate rho = phi^qlen on u until the word sequence cycles
    let mut seq = vec![u.clone()];
    let mut seen: HashMap<Word, usize> = HashMap::new();
    seen.insert(u.clone(), 0);
    let mut cur = u;
    let (j1, j2) = loop {
        let mut next = cur.clone();
        for _ in 0..qlen {
            next = phi.apply(&next)?;
        }
        if let Some(&j1) = seen.get(&next) {
            break (j1, seq.len());
        }
        seen.insert(next.clone(), seq.len());
        seq.push(next.clone());
        cur = next;
        if seq.len() > 10_000 {
            return Err(Error::ResourceCap("power extraction did not cycle".into()));
        }
    };
    let mut out = Word::empty();
    if left_side {
        for w in &seq[j1..j2] {
            out = out.concat(w);
        }
    } else {
        for w in seq[j1..j2].iter().rev() {
            out = out.concat(w);
        }
    }
    Ok(out)
}

/// Whether `W` is purely periodic with period exactly `u`: the prefix of
/// length `|u|` is `u` itself and every length-`|u|` factor is a cyclic
/// shift of `u`.
pub fn periodic_with_period(sys: &MorphicSystem, u: &Word) -> Result<bool> {
    if u.is_empty() {
        return Err(Error::Invalid("period must be nonempty".into()));
    }
    if sys.prefix(u.len())?.0 != u.0 {
        return Ok(false);
    }
    let shifts: BTreeSet<Word> = u.rotations().into_iter().collect();
    let facs = sys.factors(u.len())?;
    Ok(facs.iter().all(|f| shifts.contains(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse::parse_rule_file;

    fn sys(rules: &str) -> MorphicSystem {
        parse_rule_file(rules).unwrap().system
    }

    #[test]
    fn classify_tail() {
        // a -> aab, b -> b: a growing, b bounded
        let s = sys("alphabet a b\nstart a\nrule a -> a a b\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        assert!(cls.is_growing(0));
        assert!(cls.is_bounded(1));
    }

    #[test]
    fn classify_tm_both_growing() {
        let s = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let cls = classify_letters(&s.phi);
        assert!(cls.all_growing());
    }

    #[test]
    fn classify_swap_cycle_bounded() {
        // a -> ab, b -> c, c -> b: cycle b<->c has image length 1
        let s = sys("alphabet a b c\nstart a\nrule a -> a b\nrule b -> c\nrule c -> b\n");
        let cls = classify_letters(&s.phi);
        assert!(cls.is_growing(0));
        assert!(cls.is_bounded(1));
        assert!(cls.is_bounded(2));
    }

    #[test]
    fn graph_q_runs_example() {
        // a -> aab, b -> b: edge a->a blank, edge a->aa blank (aa inside the
        // image), sentinel edge a->at carrying {b, ε}
        let s = sys("alphabet a b\nstart a\nrule a -> a a b\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        let a = q.vertex_id(QVertex::Single(0)).unwrap();
        let aa = q.vertex_id(QVertex::Pair(0, 0)).unwrap();
        let at = q.vertex_id(QVertex::Sentinel(0)).unwrap();
        assert!(q
            .edges
            .iter()
            .any(|e| e.src == a && e.dst == a && e.is_blank()));
        assert!(q
            .edges
            .iter()
            .any(|e| e.src == a && e.dst == aa && e.is_blank()));
        assert!(q
            .edges
            .iter()
            .any(|e| e.src == a && e.dst == at && e.w1 == Word(vec![1]) && e.w2.is_empty()));
    }

    #[test]
    fn graph_q_tm_all_blank() {
        let s = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        assert!(q.edges.iter().all(QEdge::is_blank));
    }

    #[test]
    fn graph_q_periodic_example() {
        // a -> aba, b -> b: edge a -> aa carries {b, ε}
        let s = sys("alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        let a = q.vertex_id(QVertex::Single(0)).unwrap();
        let aa = q.vertex_id(QVertex::Pair(0, 0)).unwrap();
        assert!(q
            .edges
            .iter()
            .any(|e| e.src == a && e.dst == aa && e.w1 == Word(vec![1])));
    }

    #[test]
    fn bounded_factors_runs_infinite() {
        let s = sys("alphabet a b\nstart a\nrule a -> a a b\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        match bounded_factors(&s.phi, s.start, &cls, &q).unwrap() {
            BoundedFactorReport::InfinitePower(u) => {
                assert_eq!(u, Word(vec![1]));
                // U^k occurs for k <= 8
                let prefix = s.prefix(100_000).unwrap();
                let mut pow = Word::empty();
                for _ in 0..8 {
                    pow = pow.concat(&u);
                }
                assert!(pow.occurs_in(&prefix));
            }
            other => panic!("expected InfinitePower, got {other:?}"),
        }
    }

    #[test]
    fn bounded_factors_tm_trivial() {
        let s = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        match bounded_factors(&s.phi, s.start, &cls, &q).unwrap() {
            BoundedFactorReport::Finite(set) => {
                assert_eq!(set, BTreeSet::from([Word::empty()]));
            }
            other => panic!("expected Finite, got {other:?}"),
        }
    }

    #[test]
    fn bounded_factors_periodic_finite() {
        // a -> aba, b -> b: (ab)^inf has b-runs of length exactly 1
        let s = sys("alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        match bounded_factors(&s.phi, s.start, &cls, &q).unwrap() {
            BoundedFactorReport::Finite(set) => {
                assert_eq!(set, BTreeSet::from([Word::empty(), Word(vec![1])]));
            }
            other => panic!("expected Finite, got {other:?}"),
        }
    }

    #[test]
    fn tail_system_infinite_power() {
        // a -> ab, b -> b: W = ab^inf, sentinel cycle carries {b, ε}
        let s = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b\n");
        let cls = classify_letters(&s.phi);
        let q = build_graph_q(&s.phi, s.start, &cls).unwrap();
        match bounded_factors(&s.phi, s.start, &cls, &q).unwrap() {
            BoundedFactorReport::InfinitePower(u) => assert_eq!(u, Word(vec![1])),
            other => panic!("expected InfinitePower, got {other:?}"),
        }
    }

    #[test]
    fn periodicity_test() {
        let per = sys("alphabet a b\nstart a\nrule a -> a b a\nrule b -> b\n");
        assert!(periodic_with_period(&per, &Word(vec![0, 1])).unwrap());
        let tm = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b a\n");
        assert!(!periodic_with_period(&tm, &Word(vec![0, 1])).unwrap());
        let tail = sys("alphabet a b\nstart a\nrule a -> a b\nrule b -> b\n");
        assert!(!periodic_with_period(&tail, &Word(vec![1])).unwrap());
    }
}
