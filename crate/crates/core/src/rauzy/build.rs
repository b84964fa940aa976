//! Initial scheme construction from Rauzy graphs.
//!
//! The Rauzy graph of order `n` has the length-`n` factors as vertices and an
//! edge per length-`(n+1)` factor, from its length-`n` prefix to its suffix.
//! Non-branching chains are contracted; a bispecial factor (branching on both
//! sides) splits into a collecting copy and a distributing copy joined by an
//! empty-read edge, which is supporting. Front and back words come from the
//! factor extensions:
//!
//! * `F(e)` = (source vertex word, when the source is collecting) + the
//!   letters read along `e` and its unique forward continuation up to the
//!   next distributing vertex;
//! * `B(e)` = the collecting anchor's vertex word + the letters read along
//!   the unique backward chain and `e`, trimmed by the target vertex word
//!   when the target is collecting.
//!
//! With those windows the front and back words of a symmetric path tile the
//! same stretch of `H`, so the scheme properties hold by construction; the
//! validator is the acceptance gate.

use super::walk::Walk;
use super::{Edge, EdgeLabel, Scheme, VertexKind};
use crate::error::{Error, Result};
use crate::words::{FactorOracle, Letter, MorphicSystem, Word};
use std::collections::{BTreeMap, BTreeSet};

pub struct BuiltScheme {
    pub scheme: Scheme,
    pub walk: Walk,
    pub order: usize,
}

/// Build the first Rauzy scheme of order `n = 2, 3, ...` whose scale reaches
/// `min_scale`. Errors if the word degenerates to a periodic cycle.
pub fn build_scheme(
    h_sys: &MorphicSystem,
    oracle: &FactorOracle,
    min_scale: usize,
) -> Result<BuiltScheme> {
    for n in 2..=192usize {
        let built = build_at_order(h_sys, oracle, n)?;
        if built.scheme.scale() >= min_scale {
            return Ok(built);
        }
    }
    Err(Error::ResourceCap(
        "no Rauzy graph order reaches the requested scale".into(),
    ))
}

#[derive(Clone, Copy, Default)]
struct Nodes {
    col: Option<usize>,
    dis: Option<usize>,
}

impl Nodes {
    fn main(&self) -> Option<usize> {
        self.col.or(self.dis)
    }
    fn exit(&self) -> Option<usize> {
        self.dis.or(self.col)
    }
}

struct RawEdge {
    src: usize,
    dst: usize,
    read: Word,
    from_factor: usize,
}

fn build_at_order(h_sys: &MorphicSystem, oracle: &FactorOracle, n: usize) -> Result<BuiltScheme> {
    let facs = h_sys.factors_upto(n + 1)?;
    let f_n: Vec<Word> = facs[n - 1].iter().cloned().collect();
    let f_n1: &BTreeSet<Word> = &facs[n];
    if f_n1.len() <= f_n.len() {
        return Err(Error::Invalid(
            "factor complexity is not increasing: the word is periodic".into(),
        ));
    }
    let vid: BTreeMap<&Word, usize> = f_n.iter().zip(0..).collect();
    // Rauzy graph adjacency with the appended letter per edge
    let mut rout: Vec<Vec<(usize, Letter)>> = vec![Vec::new(); f_n.len()];
    let mut rin: Vec<Vec<usize>> = vec![Vec::new(); f_n.len()];
    for w in f_n1 {
        let src = vid[&Word(w[..n].to_vec())];
        let dst = vid[&Word(w[1..].to_vec())];
        rout[src].push((dst, w[n]));
        rin[dst].push(src);
    }

    // scheme nodes: collecting/distributing copies of branching factors
    let mut nodes = vec![Nodes::default(); f_n.len()];
    let mut kinds: Vec<VertexKind> = Vec::new();
    for (i, node) in nodes.iter_mut().enumerate() {
        if rin[i].len() > 1 {
            node.col = Some(kinds.len());
            kinds.push(VertexKind::Collecting);
        }
        if rout[i].len() > 1 {
            node.dis = Some(kinds.len());
            kinds.push(VertexKind::Distributing);
        }
    }
    if kinds.is_empty() {
        return Err(Error::Invalid("no branching factors: periodic word".into()));
    }

    // edges: epsilon connectors at bispecial factors, plus contracted chains
    let mut raw: Vec<RawEdge> = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        if let (Some(c), Some(d)) = (node.col, node.dis) {
            raw.push(RawEdge {
                src: c,
                dst: d,
                read: Word::empty(),
                from_factor: i,
            });
        }
    }
    for (i, node) in nodes.iter().enumerate() {
        let Some(src_node) = node.exit() else {
            continue; // chain vertex
        };
        if node.dis.is_none() && rout[i].len() != 1 {
            return Err(Error::Scheme("degree bookkeeping broken".into()));
        }
        if node.dis.is_none() && node.col.is_some() && rout[i].len() == 1 {
            // collecting-only: its unique out-edge starts the chain below
        }
        for &(first_dst, first_letter) in &rout[i] {
            let mut cur = first_dst;
            let mut read = vec![first_letter];
            let mut guard = 0usize;
            while nodes[cur].main().is_none() {
                let (next, letter) = rout[cur][0];
                read.push(letter);
                cur = next;
                guard += 1;
                if guard > f_n.len() + 2 {
                    return Err(Error::Scheme("chain does not terminate".into()));
                }
            }
            let dst_node = nodes[cur].main().unwrap();
            raw.push(RawEdge {
                src: src_node,
                dst: dst_node,
                read: Word(read),
                from_factor: i,
            });
        }
    }

    let out_of: Vec<Vec<usize>> = {
        let mut o = vec![Vec::new(); kinds.len()];
        for (ei, e) in raw.iter().enumerate() {
            o[e.src].push(ei);
        }
        o
    };
    let in_of: Vec<Vec<usize>> = {
        let mut o = vec![Vec::new(); kinds.len()];
        for (ei, e) in raw.iter().enumerate() {
            o[e.dst].push(ei);
        }
        o
    };
    let front = |ei: usize| -> Result<Word> {
        let e = &raw[ei];
        let mut w = if kinds[e.src] == VertexKind::Collecting {
            f_n[e.from_factor].clone()
        } else {
            Word::empty()
        };
        w = w.concat(&e.read);
        let mut cur = e.dst;
        let mut guard = 0usize;
        while kinds[cur] == VertexKind::Collecting {
            let nxt = out_of[cur][0];
            w = w.concat(&raw[nxt].read);
            cur = raw[nxt].dst;
            guard += 1;
            if guard > raw.len() + 2 {
                return Err(Error::Scheme("front walk cycles".into()));
            }
        }
        Ok(w)
    };
    let back = |ei: usize| -> Result<Word> {
        let mut chain = vec![ei];
        let mut cur = raw[ei].src;
        let mut guard = 0usize;
        while kinds[cur] == VertexKind::Distributing {
            let prv = in_of[cur][0];
            chain.push(prv);
            cur = raw[prv].src;
            guard += 1;
            if guard > raw.len() + 2 {
                return Err(Error::Scheme("back walk cycles".into()));
            }
        }
        let anchor = raw[*chain.last().unwrap()].from_factor;
        let mut w = f_n[anchor].clone();
        for &c in chain.iter().rev() {
            w = w.concat(&raw[c].read);
        }
        if kinds[raw[ei].dst] == VertexKind::Collecting {
            if w.len() < n {
                return Err(Error::Scheme("back word shorter than the order".into()));
            }
            w = Word(w[..w.len() - n].to_vec());
        }
        Ok(w)
    };

    let mut edges = Vec::with_capacity(raw.len());
    for ei in 0..raw.len() {
        edges.push(Edge {
            src: raw[ei].src,
            dst: raw[ei].dst,
            front: front(ei)?,
            back: back(ei)?,
            label: EdgeLabel::Num(ei as u32 + 1),
        });
    }
    let mut scheme = Scheme::new(kinds, edges);
    scheme.check_degrees()?;
    if scheme.supporting_edges().is_empty() {
        return Err(Error::Scheme("no supporting edge".into()));
    }
    scheme.renumber_canonical();

    let walk = initial_walk(&scheme, &raw, &nodes, &f_n, oracle, n)?;
    Ok(BuiltScheme {
        scheme,
        walk,
        order: n,
    })
}

/// Seed the walk by scanning `H` for branching-factor visits, assigning cuts
/// positionally: a collecting visit at position `i` cuts at `i`, a
/// distributing one at `i + n`. Scans far enough to anchor both cut kinds;
/// the walk extends itself (with verification) from there.
fn initial_walk(
    scheme: &Scheme,
    raw: &[RawEdge],
    nodes: &[Nodes],
    f_n: &[Word],
    oracle: &FactorOracle,
    n: usize,
) -> Result<Walk> {
    // edge lookup: (src node, dst node, read word) -> edge id
    let mut lookup: BTreeMap<(usize, usize, Vec<Letter>), usize> = BTreeMap::new();
    for (ei, e) in raw.iter().enumerate() {
        if lookup
            .insert((e.src, e.dst, e.read.0.clone()), ei)
            .is_some()
        {
            return Err(Error::Scheme("ambiguous chain edge".into()));
        }
    }
    let vid: BTreeMap<Vec<Letter>, usize> =
        f_n.iter().map(|w| w.0.clone()).zip(0..).collect();

    let scan_len = 64 * (n + 4);
    oracle.with_prefix(scan_len + n + 1, |h| -> Result<Walk> {
        let mut steps: Vec<usize> = Vec::new();
        let mut cuts: Vec<usize> = Vec::new();
        let mut start_vertex = None;
        let mut prev: Option<(usize, usize)> = None; // (factor id, position)
        let mut have_col = 0usize;
        let mut have_dist = 0usize;
        for i in 0..scan_len {
            let Some(&f) = vid.get(&h[i..i + n]) else {
                return Err(Error::Scheme("window is not a known factor".into()));
            };
            let node = nodes[f];
            let Some(arrive) = node.main() else { continue };
            if let Some((pf, pi)) = prev {
                let src_node = nodes[pf].exit().unwrap();
                let read = h[pi + n..i + n].to_vec();
                let &ei = lookup.get(&(src_node, arrive, read)).ok_or_else(|| {
                    Error::Scheme("walk scan found no matching chain edge".into())
                })?;
                steps.push(ei);
                cuts.push(match scheme.kind(arrive) {
                    VertexKind::Collecting => i,
                    VertexKind::Distributing => i + n,
                });
            } else {
                start_vertex = Some(arrive);
                cuts.push(match scheme.kind(arrive) {
                    VertexKind::Collecting => i,
                    VertexKind::Distributing => i + n,
                });
            }
            match scheme.kind(arrive) {
                VertexKind::Collecting => have_col += 1,
                VertexKind::Distributing => have_dist += 1,
            }
            // bispecial: pass through the epsilon edge to the distributing copy
            if let (Some(c), Some(d)) = (node.col, node.dis) {
                let &ei = lookup
                    .get(&(c, d, Vec::new()))
                    .ok_or_else(|| Error::Scheme("missing epsilon edge".into()))?;
                steps.push(ei);
                cuts.push(i + n);
                have_dist += 1;
            }
            prev = Some((f, i));
            if have_col >= 2 && have_dist >= 2 && steps.len() >= 4 {
                break;
            }
        }
        let start_vertex =
            start_vertex.ok_or_else(|| Error::Scheme("no branching visit in prefix".into()))?;
        Walk::from_visits(scheme, start_vertex, steps, cuts)
    })?
}
