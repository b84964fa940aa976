//! The walk: the tiling of the underlying word `H` by a scheme.
//!
//! Reading `H` left to right drives a unique infinite path through a scheme.
//! Each visited vertex gets a cut position in `H`: at a collecting visit the
//! back word of the arriving edge ends there, at a distributing visit the
//! front word of the leaving edge starts there. Front words tile `H` between
//! consecutive distributing cuts and back words between consecutive
//! collecting cuts; both tilings are verified letter-for-letter as the walk
//! extends, so a wrongly worded scheme fails fast.
//!
//! Minimal covering paths are read off the walk: the symmetric path covering
//! an occurrence `H[p .. p+len)` runs from the last collecting cut `<= p` to
//! the first distributing cut `>= p + len`.

use super::{EdgeId, Scheme, VertexId, VertexKind};
use crate::error::{Error, Result};
use crate::words::{FactorOracle, Letter};

#[derive(Debug, Clone)]
pub struct Walk {
    pub start_vertex: VertexId,
    pub steps: Vec<EdgeId>,
    /// Cut position per visit; visit 0 is the start vertex, visit `j >= 1`
    /// is the target of `steps[j-1]`.
    pub visit_cuts: Vec<usize>,
    /// (cut, visit index) for collecting visits, increasing in both.
    col: Vec<(usize, usize)>,
    /// (cut, visit index) for distributing visits, increasing in both.
    dist: Vec<(usize, usize)>,
}

impl Walk {
    /// Assemble from explicit visits (construction-time data) and index the
    /// cut tables.
    pub fn from_visits(
        scheme: &Scheme,
        start_vertex: VertexId,
        steps: Vec<EdgeId>,
        visit_cuts: Vec<usize>,
    ) -> Result<Walk> {
        if visit_cuts.len() != steps.len() + 1 {
            return Err(Error::Invalid("visit/step length mismatch".into()));
        }
        let mut w = Walk {
            start_vertex,
            steps,
            visit_cuts,
            col: Vec::new(),
            dist: Vec::new(),
        };
        w.reindex(scheme);
        Ok(w)
    }

    pub fn visit_vertex(&self, scheme: &Scheme, j: usize) -> VertexId {
        if j == 0 {
            self.start_vertex
        } else {
            scheme.edges[self.steps[j - 1]].dst
        }
    }

    pub fn len_visits(&self) -> usize {
        self.visit_cuts.len()
    }

    fn reindex(&mut self, scheme: &Scheme) {
        self.col.clear();
        self.dist.clear();
        for j in 0..self.len_visits() {
            let v = self.visit_vertex(scheme, j);
            match scheme.kind(v) {
                VertexKind::Collecting => self.col.push((self.visit_cuts[j], j)),
                VertexKind::Distributing => self.dist.push((self.visit_cuts[j], j)),
            }
        }
        debug_assert!(self.col.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(self.dist.windows(2).all(|w| w[0].0 < w[1].0));
    }

    pub fn first_col_cut(&self) -> Option<usize> {
        self.col.first().map(|&(c, _)| c)
    }

    pub fn last_dist_cut(&self) -> Option<usize> {
        self.dist.last().map(|&(c, _)| c)
    }

    /// Latest collecting visit with cut <= p.
    pub fn col_at_or_before(&self, p: usize) -> Option<(usize, usize)> {
        match self.col.binary_search_by_key(&p, |&(c, _)| c) {
            Ok(i) => Some(self.col[i]),
            Err(0) => None,
            Err(i) => Some(self.col[i - 1]),
        }
    }

    /// Earliest distributing visit with cut >= p (walk must be extended far
    /// enough first).
    pub fn dist_at_or_after(&self, p: usize) -> Option<(usize, usize)> {
        match self.dist.binary_search_by_key(&p, |&(c, _)| c) {
            Ok(i) => Some(self.dist[i]),
            Err(i) if i < self.dist.len() => Some(self.dist[i]),
            Err(_) => None,
        }
    }

    /// Next collecting visit strictly after visit index `j`.
    pub fn col_after_visit(&self, j: usize) -> Option<(usize, usize)> {
        self.col.iter().find(|&&(_, vj)| vj > j).copied()
    }

    /// Previous distributing visit strictly before visit index `j`.
    pub fn dist_before_visit(&self, j: usize) -> Option<(usize, usize)> {
        self.dist.iter().rev().find(|&&(_, vj)| vj < j).copied()
    }

    /// Extend by one step, verifying the word tiling against `H`.
    pub fn extend_step(&mut self, scheme: &Scheme, oracle: &FactorOracle) -> Result<()> {
        let j = self.len_visits() - 1;
        let v = self.visit_vertex(scheme, j);
        let e = match scheme.kind(v) {
            VertexKind::Collecting => scheme.out_edges(v)[0],
            VertexKind::Distributing => {
                // property 2: out-edges have distinct first front letters;
                // the front word must match H at the current front boundary
                let cut = self.visit_cuts[j];
                let next: Letter = oracle.with_prefix(cut + 1, |h| h[cut])?;
                let mut found = None;
                for &cand in scheme.out_edges(v) {
                    if scheme.edges[cand].front.first() == Some(&next) {
                        if found.is_some() {
                            return Err(Error::Scheme(
                                "two out-edges share a first front letter".into(),
                            ));
                        }
                        found = Some(cand);
                    }
                }
                found.ok_or_else(|| Error::Scheme("no out-edge matches the word".into()))?
            }
        };
        // when leaving a distributing vertex, the front word tiles up to the
        // next distributing cut; verify it now
        if scheme.kind(v) == VertexKind::Distributing {
            let cut = self.visit_cuts[j];
            let f = &scheme.edges[e].front;
            let ok = oracle.with_prefix(cut + f.len(), |h| h[cut..cut + f.len()] == f.0[..])?;
            if !ok {
                return Err(Error::Scheme("front word mismatch on the walk".into()));
            }
        }
        let w = scheme.edges[e].dst;
        let cut = match scheme.kind(w) {
            VertexKind::Collecting => {
                let (last_col, _) = *self
                    .col
                    .last()
                    .ok_or_else(|| Error::Scheme("walk lacks a collecting anchor".into()))?;
                let b = &scheme.edges[e].back;
                let new = last_col + b.len();
                let ok = oracle.with_prefix(new, |h| h[last_col..new] == b.0[..])?;
                if !ok {
                    return Err(Error::Scheme("back word mismatch on the walk".into()));
                }
                new
            }
            VertexKind::Distributing => {
                // the front boundary advanced by the front word of the edge
                // that left the previous distributing visit
                let (last_dist, jd) = *self
                    .dist
                    .last()
                    .ok_or_else(|| Error::Scheme("walk lacks a distributing anchor".into()))?;
                let leaving = self.steps.get(jd).copied().unwrap_or(e);
                last_dist + scheme.edges[leaving].front.len()
            }
        };
        self.steps.push(e);
        self.visit_cuts.push(cut);
        match scheme.kind(w) {
            VertexKind::Collecting => self.col.push((cut, self.len_visits() - 1)),
            VertexKind::Distributing => self.dist.push((cut, self.len_visits() - 1)),
        }
        Ok(())
    }

    /// Extend until some distributing cut reaches `target` (and at least one
    /// collecting cut exists).
    pub fn ensure_dist_cut(
        &mut self,
        scheme: &Scheme,
        oracle: &FactorOracle,
        target: usize,
        step_cap: usize,
    ) -> Result<()> {
        let mut guard = 0usize;
        while self.last_dist_cut().is_none_or(|c| c < target) {
            self.extend_step(scheme, oracle)?;
            guard += 1;
            if guard > step_cap {
                return Err(Error::ResourceCap("walk extension exceeds cap".into()));
            }
        }
        Ok(())
    }

    /// The edges between visit `i1` and visit `i2`.
    pub fn path_between(&self, i1: usize, i2: usize) -> &[EdgeId] {
        &self.steps[i1..i2]
    }
}
