//! Rauzy schemes: strongly connected graphs-with-words presenting the factor
//! structure of an aperiodic uniformly recurrent word, their construction
//! from Rauzy graphs, validation, evolution, and protocols.
//!
//! Every vertex is either distributing (in-degree 1, out-degree > 1) or
//! collecting (in-degree > 1, out-degree 1). Each edge carries a front word
//! and a back word. A symmetric path starts at a collecting vertex and ends
//! at a distributing one; its front and back words coincide and the common
//! word is a factor of the underlying infinite word.

pub mod build;
pub mod evolve;
pub mod protocol;
pub mod truled;
pub mod validate;
pub mod walk;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};
use std::collections::VecDeque;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Distributing,
    Collecting,
}

/// Edge number: plain numbers, or the double index given to gadget edges
/// during evolution before renumbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Num(u32),
    Pair(u32, u32),
}

impl EdgeLabel {
    /// Total order used by the evolution method: a pair `(p, q)` sorts just
    /// after the plain number `p`.
    fn key(&self) -> (u32, u32, u32) {
        match *self {
            EdgeLabel::Num(a) => (a, 0, 0),
            EdgeLabel::Pair(p, q) => (p, 1, q),
        }
    }

    pub fn num(&self) -> u32 {
        match *self {
            EdgeLabel::Num(a) => a,
            EdgeLabel::Pair(..) => panic!("edge still carries a double index"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub front: Word,
    pub back: Word,
    pub label: EdgeLabel,
}

/// A graph-with-words with numbered edges.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub vertices: Vec<VertexKind>,
    pub edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl Scheme {
    pub fn new(vertices: Vec<VertexKind>, edges: Vec<Edge>) -> Self {
        let mut out = vec![Vec::new(); vertices.len()];
        let mut inc = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
            inc[e.dst].push(i);
        }
        Scheme {
            vertices,
            edges,
            out,
            inc,
        }
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.inc[v]
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.vertices[v]
    }

    /// Degree constraints: distributing = in 1 / out > 1, collecting =
    /// in > 1 / out 1.
    pub fn check_degrees(&self) -> Result<()> {
        for v in 0..self.vertices.len() {
            let (i, o) = (self.inc[v].len(), self.out[v].len());
            let ok = match self.vertices[v] {
                VertexKind::Distributing => i == 1 && o > 1,
                VertexKind::Collecting => i > 1 && o == 1,
            };
            if !ok {
                return Err(Error::Scheme(format!(
                    "vertex {v} has degrees in={i} out={o} for kind {:?}",
                    self.vertices[v]
                )));
            }
        }
        Ok(())
    }

    /// Supporting edge: leaves a collecting vertex and enters a distributing
    /// one. Every scheme has at least one, and its front word equals its
    /// back word.
    pub fn supporting_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| {
                self.kind(self.edges[e].src) == VertexKind::Collecting
                    && self.kind(self.edges[e].dst) == VertexKind::Distributing
            })
            .collect()
    }

    /// Scale: the minimal front-word length over supporting edges.
    pub fn scale(&self) -> usize {
        self.supporting_edges()
            .iter()
            .map(|&e| self.edges[e].front.len())
            .min()
            .unwrap_or(0)
    }

    /// Front word of a path: front word of the first edge, then the front
    /// words of the edges leaving distributing vertices, concatenated in
    /// path order.
    pub fn front_word(&self, path: &[EdgeId]) -> Result<Word> {
        self.check_path(path)?;
        let mut w = self.edges[path[0]].front.clone();
        for &e in &path[1..] {
            if self.kind(self.edges[e].src) == VertexKind::Distributing {
                w = w.concat(&self.edges[e].front);
            }
        }
        Ok(w)
    }

    /// Back word of a path: back words of the edges entering collecting
    /// vertices, then the back word of the last edge.
    pub fn back_word(&self, path: &[EdgeId]) -> Result<Word> {
        self.check_path(path)?;
        let mut w = Word::empty();
        for &e in &path[..path.len() - 1] {
            if self.kind(self.edges[e].dst) == VertexKind::Collecting {
                w = w.concat(&self.edges[e].back);
            }
        }
        Ok(w.concat(&self.edges[*path.last().unwrap()].back))
    }

    pub fn check_path(&self, path: &[EdgeId]) -> Result<()> {
        if path.is_empty() {
            return Err(Error::Invalid("empty path".into()));
        }
        for w in path.windows(2) {
            if self.edges[w[0]].dst != self.edges[w[1]].src {
                return Err(Error::Invalid("edge sequence is not a path".into()));
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self, path: &[EdgeId]) -> bool {
        !path.is_empty()
            && self.check_path(path).is_ok()
            && self.kind(self.edges[path[0]].src) == VertexKind::Collecting
            && self.kind(self.edges[*path.last().unwrap()].dst) == VertexKind::Distributing
    }

    /// Natural right extension: the minimal path starting with `path` that
    /// ends at a distributing vertex (unique: collecting vertices have one
    /// out-edge).
    pub fn extend_right(&self, path: &[EdgeId]) -> Result<Vec<EdgeId>> {
        let mut p = path.to_vec();
        let mut guard = 0;
        loop {
            let end = self.edges[*p.last().unwrap()].dst;
            if self.kind(end) == VertexKind::Distributing {
                return Ok(p);
            }
            p.push(self.out[end][0]);
            guard += 1;
            if guard > self.edges.len() + 2 {
                return Err(Error::Scheme("right extension cycles".into()));
            }
        }
    }

    /// Natural left extension: the minimal path ending with `path` that
    /// starts at a collecting vertex.
    pub fn extend_left(&self, path: &[EdgeId]) -> Result<Vec<EdgeId>> {
        let mut p = VecDeque::from(path.to_vec());
        let mut guard = 0;
        loop {
            let first = self.edges[p[0]].src;
            if self.kind(first) == VertexKind::Collecting {
                return Ok(p.into_iter().collect());
            }
            p.push_front(self.inc[first][0]);
            guard += 1;
            if guard > self.edges.len() + 2 {
                return Err(Error::Scheme("left extension cycles".into()));
            }
        }
    }

    /// Edge lookup by plain number.
    pub fn edge_by_num(&self, num: u32) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| e.label == EdgeLabel::Num(num))
    }

    pub fn labels_are_plain(&self) -> bool {
        self.edges
            .iter()
            .all(|e| matches!(e.label, EdgeLabel::Num(_)))
    }

    /// Numbering-and-topology fingerprint, words erased: edge `(src, dst)`
    /// codes in label-key order, with vertex codes assigned by first
    /// appearance. Two schemes with the same lightened form are the same
    /// numbered multigraph.
    pub fn lightened(&self) -> Lightened {
        let mut order: Vec<EdgeId> = (0..self.edges.len()).collect();
        order.sort_by_key(|&e| self.edges[e].label.key());
        let mut code = vec![usize::MAX; self.vertices.len()];
        let mut next = 0usize;
        let mut encode = |v: VertexId, code: &mut Vec<usize>| -> u32 {
            if code[v] == usize::MAX {
                code[v] = next;
                next += 1;
            }
            code[v] as u32
        };
        let rows = order
            .iter()
            .map(|&e| {
                let s = encode(self.edges[e].src, &mut code);
                let t = encode(self.edges[e].dst, &mut code);
                (s, t)
            })
            .collect();
        Lightened { rows }
    }

    /// The evolution method: canonical renumbering by BFS over edges rooted
    /// at the lowest-labeled edge, pushing out-edges of each popped edge's
    /// target in label-key order; numbers 1..n assigned in pop order. A pure
    /// function of the lightened numbered scheme.
    pub fn renumber_canonical(&mut self) -> Vec<(EdgeLabel, u32)> {
        let root = (0..self.edges.len())
            .min_by_key(|&e| self.edges[e].label.key())
            .expect("nonempty scheme");
        let mut assigned = vec![0u32; self.edges.len()];
        let mut visited = vec![false; self.edges.len()];
        let mut queue = VecDeque::new();
        queue.push_back(root);
        visited[root] = true;
        let mut next = 1u32;
        while let Some(e) = queue.pop_front() {
            assigned[e] = next;
            next += 1;
            let mut outs: Vec<EdgeId> = self.out[self.edges[e].dst].clone();
            outs.sort_by_key(|&f| self.edges[f].label.key());
            for f in outs {
                if !visited[f] {
                    visited[f] = true;
                    queue.push_back(f);
                }
            }
        }
        debug_assert!(visited.iter().all(|&v| v), "scheme not strongly connected");
        let map = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.label, assigned[i]))
            .collect();
        for (i, e) in self.edges.iter_mut().enumerate() {
            e.label = EdgeLabel::Num(assigned[i]);
        }
        map
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = String::from("digraph scheme {\n");
        for (v, k) in self.vertices.iter().enumerate() {
            let shape = match k {
                VertexKind::Distributing => "diamond",
                VertexKind::Collecting => "ellipse",
            };
            s.push_str(&format!("  v{v} [shape={shape}, label=\"{v}\"];\n"));
        }
        for e in &self.edges {
            let label = match e.label {
                EdgeLabel::Num(n) => format!("{n}"),
                EdgeLabel::Pair(p, q) => format!("({p},{q})"),
            };
            let clip = |w: &Word| -> String {
                let text = alphabet.render(w);
                if text.chars().count() > 24 {
                    let head: String = text.chars().take(21).collect();
                    format!("{head}... [{}]", w.len())
                } else {
                    text
                }
            };
            s.push_str(&format!(
                "  v{} -> v{} [label=\"#{label} F={} B={}\"];\n",
                e.src,
                e.dst,
                clip(&e.front),
                clip(&e.back)
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Lightened numbered scheme: numbering plus topology, words erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lightened {
    pub rows: Vec<(u32, u32)>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Hand-built theta shape: collecting vertex 0, distributing vertex 1;
    /// edge 1: 0 -> 1, edges 2, 3: 1 -> 0 (the two-loop scheme of a
    /// Sturmian word at small scale).
    pub(crate) fn theta_scheme() -> Scheme {
        let vertices = vec![VertexKind::Collecting, VertexKind::Distributing];
        let edges = vec![
            Edge {
                src: 0,
                dst: 1,
                front: Word(vec![0, 1, 0]),
                back: Word(vec![0, 1, 0]),
                label: EdgeLabel::Num(1),
            },
            Edge {
                src: 1,
                dst: 0,
                front: Word(vec![0, 1, 0]),
                back: Word(vec![0, 1, 0]),
                label: EdgeLabel::Num(2),
            },
            Edge {
                src: 1,
                dst: 0,
                front: Word(vec![1, 0]),
                back: Word(vec![0, 1]),
                label: EdgeLabel::Num(3),
            },
        ];
        Scheme::new(vertices, edges)
    }

    #[test]
    fn degrees_and_scale() {
        let s = theta_scheme();
        s.check_degrees().unwrap();
        assert_eq!(s.supporting_edges(), vec![0]);
        assert_eq!(s.scale(), 3);
    }

    #[test]
    fn single_edge_path_words() {
        let s = theta_scheme();
        assert_eq!(s.front_word(&[0]).unwrap(), Word(vec![0, 1, 0]));
        assert_eq!(s.back_word(&[0]).unwrap(), Word(vec![0, 1, 0]));
    }

    #[test]
    fn symmetric_path_words_match() {
        let s = theta_scheme();
        for path in [vec![0usize, 1, 0], vec![0, 2, 0]] {
            assert!(s.is_symmetric(&path));
            assert_eq!(
                s.front_word(&path).unwrap(),
                s.back_word(&path).unwrap(),
                "{path:?}"
            );
        }
    }

    #[test]
    fn lightened_is_stable() {
        let s = theta_scheme();
        assert_eq!(s.lightened(), s.lightened());
        let rows = s.lightened().rows;
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], (0, 1));
    }

    #[test]
    fn renumber_is_canonical() {
        let mut s = theta_scheme();
        s.edges[0].label = EdgeLabel::Num(7);
        s.edges[1].label = EdgeLabel::Pair(7, 2);
        s.edges[2].label = EdgeLabel::Num(2);
        let map1 = s.renumber_canonical();
        assert!(s.labels_are_plain());
        let mut nums: Vec<u32> = s.edges.iter().map(|e| e.label.num()).collect();
        nums.sort_unstable();
        assert_eq!(nums, vec![1, 2, 3]);
        assert_eq!(map1.len(), 3);
    }

    #[test]
    fn extensions() {
        let s = theta_scheme();
        assert_eq!(s.extend_right(&[1]).unwrap(), vec![1, 0]);
        assert_eq!(s.extend_left(&[0]).unwrap(), vec![0]);
        assert_eq!(s.extend_left(&[1]).unwrap(), vec![0, 1]);
    }
}
