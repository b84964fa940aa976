//! Exact growth orders of letters under a substitution, and certified
//! geometric bounds when all letters share one order.
//!
//! `|phi^k(a)|` grows like `k^d * theta^k`. The exponent base `theta(a)` is
//! the largest Perron root among strongly connected components reachable from
//! `a` in the occurrence digraph; the polynomial degree `d(a)` is one less
//! than the longest condensation chain of components realizing that root.
//! Perron roots are isolated exactly from characteristic polynomials, so
//! order comparison is an exact trichotomy.

pub mod matrix;
pub mod poly;

use crate::error::{Error, Result};
use crate::graphs::tarjan_scc;
use crate::words::{Letter, Morphism};
use matrix::{is_positive, rational_from_f64, solve_rational, IncidenceMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use poly::{AlgebraicReal, IntPoly};
use std::cmp::Ordering;

/// Growth order `(d, theta)`: `|phi^k(a)|` is within constant factors of
/// `k^d * theta^k`. Ordered lexicographically by `(theta, d)`.
#[derive(Debug, Clone)]
pub struct GrowthOrder {
    pub d: usize,
    pub theta: AlgebraicReal,
}

impl GrowthOrder {
    pub fn compare(&self, other: &GrowthOrder) -> Ordering {
        match self.theta.compare(&other.theta) {
            Ordering::Equal => self.d.cmp(&other.d),
            ord => ord,
        }
    }
}

/// Certified geometric bounds: for every letter and every `k`,
/// `c1 * theta_lo^k <= |psi(phi^k(a))| <= c2 * theta_hi^k`.
#[derive(Debug, Clone)]
pub struct GrowthBounds {
    pub c1: BigRational,
    pub c2: BigRational,
    pub theta_lo: BigRational,
    pub theta_hi: BigRational,
    pub theta: AlgebraicReal,
}

struct SccAnalysis {
    comp_of: Vec<usize>,
    comps: Vec<Vec<usize>>,
    /// Perron root per component; `None` for a trivial component without a
    /// self-loop (no cycle, contributes no growth base).
    roots: Vec<Option<AlgebraicReal>>,
    /// condensation successors
    succ: Vec<Vec<usize>>,
}

fn analyze(phi: &Morphism) -> SccAnalysis {
    let graph = phi.occurrence_graph();
    let comps = tarjan_scc(&graph);
    let n = graph.len();
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let inc = IncidenceMatrix::of(phi);
    let roots: Vec<Option<AlgebraicReal>> = comps
        .iter()
        .map(|comp| {
            if comp.len() == 1 && !graph[comp[0]].contains(&comp[0]) {
                return None;
            }
            let sub = inc.submatrix(comp);
            AlgebraicReal::largest_root(&sub.char_poly())
        })
        .collect();
    let mut succ = vec![Vec::new(); comps.len()];
    for (v, outs) in graph.iter().enumerate() {
        for &w in outs {
            let (cv, cw) = (comp_of[v], comp_of[w]);
            if cv != cw && !succ[cv].contains(&cw) {
                succ[cv].push(cw);
            }
        }
    }
    SccAnalysis {
        comp_of,
        comps,
        roots,
        succ,
    }
}

fn max_root_reachable(an: &SccAnalysis, start_comp: usize) -> Option<AlgebraicReal> {
    let mut best: Option<AlgebraicReal> = None;
    let mut stack = vec![start_comp];
    let mut seen = vec![false; an.comps.len()];
    seen[start_comp] = true;
    while let Some(c) = stack.pop() {
        if let Some(r) = &an.roots[c] {
            best = match best {
                None => Some(r.clone()),
                Some(b) => {
                    if r.compare(&b) == Ordering::Greater {
                        Some(r.clone())
                    } else {
                        Some(b)
                    }
                }
            };
        }
        for &s in &an.succ[c] {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    best
}

/// Longest count of components with root equal to `theta` along condensation
/// paths from `start_comp`.
fn theta_chain(an: &SccAnalysis, start_comp: usize, theta: &AlgebraicReal) -> usize {
    fn go(
        an: &SccAnalysis,
        theta: &AlgebraicReal,
        c: usize,
        memo: &mut Vec<Option<usize>>,
    ) -> usize {
        if let Some(v) = memo[c] {
            return v;
        }
        let own = usize::from(
            an.roots[c]
                .as_ref()
                .is_some_and(|r| r.compare(theta) == Ordering::Equal),
        );
        let best_succ = an.succ[c]
            .iter()
            .map(|&s| go(an, theta, s, memo))
            .max()
            .unwrap_or(0);
        memo[c] = Some(own + best_succ);
        own + best_succ
    }
    let mut memo = vec![None; an.comps.len()];
    go(an, theta, start_comp, &mut memo)
}

/// Exact growth order of a growing letter.
pub fn growth_order(phi: &Morphism, letter: Letter) -> Result<GrowthOrder> {
    let an = analyze(phi);
    let comp = an.comp_of[letter as usize];
    let theta = max_root_reachable(&an, comp).ok_or_else(|| {
        Error::Invalid(format!(
            "letter {:?} reaches no cycle",
            phi.source.token(letter)
        ))
    })?;
    let one = AlgebraicReal::rational(BigRational::one());
    if theta.compare(&one) != Ordering::Greater {
        return Err(Error::Invalid(format!(
            "letter {:?} is bounded (growth base 1)",
            phi.source.token(letter)
        )));
    }
    let d = theta_chain(&an, comp, &theta).saturating_sub(1);
    Ok(GrowthOrder { d, theta })
}

/// Exact trichotomy on growth orders.
pub fn compare(o1: &GrowthOrder, o2: &GrowthOrder) -> Ordering {
    o1.compare(o2)
}

/// Whether all letters share one growth order; returns the common order, or
/// the witness pair of letters that differ.
pub fn all_same_order(
    phi: &Morphism,
) -> Result<std::result::Result<GrowthOrder, (Letter, Letter)>> {
    let mut first: Option<(Letter, GrowthOrder)> = None;
    for l in phi.source.letters() {
        let o = growth_order(phi, l)?;
        match &first {
            None => first = Some((l, o)),
            Some((l0, o0)) => {
                if o0.compare(&o) != Ordering::Equal {
                    return Ok(Err((*l0, l)));
                }
            }
        }
    }
    Ok(Ok(first.expect("nonempty alphabet").1))
}

/// Per-letter image lengths `|psi(phi^k(a))|` for `k = 0..=k_max`, exact.
pub fn image_lengths(phi: &Morphism, psi: &Morphism, k_max: usize) -> Vec<Vec<BigInt>> {
    let n = phi.source.len();
    let mut rows = Vec::with_capacity(k_max + 1);
    let mut cur: Vec<BigInt> = (0..n as u8)
        .map(|l| BigInt::from(psi.image(l).len()))
        .collect();
    rows.push(cur.clone());
    for _ in 0..k_max {
        let next: Vec<BigInt> = (0..n as u8)
            .map(|l| {
                phi.image(l)
                    .iter()
                    .map(|&b| cur[b as usize].clone())
                    .sum::<BigInt>()
            })
            .collect();
        rows.push(next.clone());
        cur = next;
    }
    rows
}

/// Certified bounds for the uniform-order case.
///
/// Upper certificate: a rational `theta_hi` above the Perron root and a
/// positive rational vector `v >= 1` with `M v <= theta_hi v` (solved exactly
/// from `(I - M/theta_hi) v = 1`), giving `|phi^k(a)| <= v_a theta_hi^k`.
/// Lower certificate: per maximal-root component, a positive rational vector
/// `u` with `M_scc u >= theta_lo u` verified entrywise exactly; every letter
/// reaches such a component within `|A|` steps, which costs a factor
/// `theta_lo^{-|A|}`. Both certificates are exact rational arithmetic and are
/// additionally spot-verified against exact lengths for `k <= 30`. On
/// failure the isolating interval is refined and the construction retried,
/// with a retry cap.
pub fn growth_bounds(phi: &Morphism, psi: &Morphism) -> Result<GrowthBounds> {
    if !phi.is_non_erasing() || !psi.is_non_erasing() {
        return Err(Error::Invalid(
            "growth_bounds requires non-erasing maps".into(),
        ));
    }
    let common = match all_same_order(phi)? {
        Ok(o) => o,
        Err((a, b)) => {
            return Err(Error::Invalid(format!(
                "letters {:?} and {:?} have different growth orders",
                phi.source.token(a),
                phi.source.token(b)
            )))
        }
    };
    if common.d != 0 {
        return Err(Error::Invalid(
            "uniform order has polynomial part (d > 0)".into(),
        ));
    }
    let mut theta = common.theta.clone();
    theta.refine_below(&BigRational::new(BigInt::one(), BigInt::from(1u64 << 24)));

    let inc = IncidenceMatrix::of(phi);
    let n = inc.n;
    let an = analyze(phi);

    let mut attempt = 0usize;
    loop {
        attempt += 1;
        if attempt > 40 {
            return Err(Error::Inconclusive(
                "growth certificates failed after interval refinement".into(),
            ));
        }
        let (theta_lo, theta_hi) = match theta.as_rational() {
            Some(q) => {
                let eps = BigRational::new(BigInt::one(), BigInt::from(1u64 << (6 + attempt)));
                (q - &eps, q + &eps)
            }
            None => (theta.lo.clone(), theta.hi.clone()),
        };
        if theta_lo <= BigRational::one() {
            theta.refine();
            continue;
        }

        // upper: (I - M/theta_hi) v = 1
        let a_mat: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut x = if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        };
                        if inc.counts[i][j] != 0 {
                            x -= BigRational::from(BigInt::from(inc.counts[i][j])) / &theta_hi;
                        }
                        x
                    })
                    .collect()
            })
            .collect();
        let ones = vec![BigRational::one(); n];
        let v = match solve_rational(&a_mat, &ones) {
            Some(v) if is_positive(&v) => v,
            _ => {
                theta.refine();
                continue;
            }
        };
        let mv = inc.mul_vec(&v);
        let upper_ok = (0..n).all(|i| mv[i] <= &theta_hi * &v[i] && v[i] >= BigRational::one());
        if !upper_ok {
            theta.refine();
            continue;
        }

        // lower: per maximal-root component, u with M_scc u >= theta_lo u
        let mut min_ratio: Option<BigRational> = None;
        let mut lower_ok = true;
        for (ci, comp) in an.comps.iter().enumerate() {
            let Some(r) = &an.roots[ci] else { continue };
            if r.compare(&common.theta) != Ordering::Equal {
                continue;
            }
            let sub = inc.submatrix(comp);
            match perron_lower_vector(&sub, &theta_lo) {
                Some(u) => {
                    let mx = u.iter().cloned().fold(BigRational::zero(), |a, b| a.max(b));
                    let mn = u
                        .iter()
                        .cloned()
                        .fold(mx.clone(), |a, b| if b < a { b } else { a });
                    let ratio = mn / mx;
                    min_ratio = Some(match min_ratio {
                        None => ratio,
                        Some(m) => {
                            if ratio < m {
                                ratio
                            } else {
                                m
                            }
                        }
                    });
                }
                None => {
                    lower_ok = false;
                    break;
                }
            }
        }
        let Some(min_ratio) = min_ratio else {
            theta.refine();
            continue;
        };
        if !lower_ok {
            theta.refine();
            continue;
        }

        let vmax = v.iter().cloned().fold(BigRational::zero(), |a, b| a.max(b));
        let psi_max = BigRational::from(BigInt::from(psi.max_image_len()));
        let c2 = vmax * psi_max;
        let mut decay = BigRational::one();
        for _ in 0..n {
            decay /= &theta_lo;
        }
        let c1 = min_ratio * decay * BigRational::new(BigInt::from(255), BigInt::from(256));

        // spot verification against exact lengths for k <= 30
        let lens = image_lengths(phi, psi, 30);
        let mut lo_pow = BigRational::one();
        let mut hi_pow = BigRational::one();
        let mut verified = true;
        for row in lens.iter().take(31) {
            for len in row {
                let len = BigRational::from(len.clone());
                if len < &c1 * &lo_pow || len > &c2 * &hi_pow {
                    verified = false;
                }
            }
            lo_pow *= &theta_lo;
            hi_pow *= &theta_hi;
        }
        if !verified {
            theta.refine();
            continue;
        }
        return Ok(GrowthBounds {
            c1,
            c2,
            theta_lo,
            theta_hi,
            theta,
        });
    }
}

/// Positive rational `u` with `M u >= theta_lo * u` entrywise, from power
/// iteration rounded to rationals and verified exactly.
fn perron_lower_vector(m: &IncidenceMatrix, theta_lo: &BigRational) -> Option<Vec<BigRational>> {
    let n = m.n;
    let mut v = vec![1.0f64; n];
    for round in 0..12 {
        for _ in 0..(16 << round.min(4)) {
            let mut next = vec![0.0f64; n];
            for i in 0..n {
                for j in 0..n {
                    if m.counts[i][j] != 0 {
                        next[i] += m.counts[i][j] as f64 * v[j];
                    }
                }
            }
            let norm = next.iter().cloned().fold(0.0, f64::max);
            if norm == 0.0 {
                return None;
            }
            for x in &mut next {
                *x /= norm;
            }
            v = next;
        }
        let denom = 1u64 << (16 + 2 * round.min(20));
        let u: Vec<BigRational> = v
            .iter()
            .map(|&x| {
                let q = rational_from_f64(x.max(1e-9), denom);
                if q.is_positive() {
                    q
                } else {
                    BigRational::new(BigInt::one(), BigInt::from(denom))
                }
            })
            .collect();
        let mu = m.mul_vec(&u);
        if (0..n).all(|i| mu[i] >= theta_lo * &u[i]) {
            return Some(u);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::matrix::br;
    use super::*;
    use crate::words::morphism::fixtures::{fibonacci, thue_morse};
    use crate::words::parse::parse_rule_file;

    fn sub(rules: &str) -> Morphism {
        parse_rule_file(rules).unwrap().system.phi
    }

    #[test]
    fn tm_order_is_exactly_two() {
        let o = growth_order(&thue_morse(), 0).unwrap();
        assert_eq!(o.d, 0);
        assert_eq!(o.theta.as_rational(), Some(&br(2)));
    }

    #[test]
    fn fib_order_is_golden() {
        let o = growth_order(&fibonacci(), 0).unwrap();
        assert_eq!(o.d, 0);
        assert_eq!(o.theta.poly, IntPoly::from_i64(&[-1, -1, 1]));
        let mut t = o.theta.clone();
        t.refine_below(&BigRational::new(BigInt::one(), BigInt::from(1_000_000)));
        let v = t.to_f64();
        assert!(v > 1.61 && v < 1.62, "{v}");
    }

    #[test]
    fn sparse_letter_has_linear_factor() {
        // c -> cabc, a -> ab, b -> ba: component {c} has root 2 and reaches
        // {a,b} with root 2: chain of two, so d(c) = 1
        let phi = sub("alphabet c a b\nstart c\nrule c -> c a b c\nrule a -> a b\nrule b -> b a\n");
        let o = growth_order(&phi, 0).unwrap();
        assert_eq!((o.d, o.theta.as_rational()), (1, Some(&br(2))));
        let oa = growth_order(&phi, 1).unwrap();
        assert_eq!((oa.d, oa.theta.as_rational()), (0, Some(&br(2))));
    }

    #[test]
    fn compare_orders() {
        let two = GrowthOrder {
            d: 0,
            theta: AlgebraicReal::rational(br(2)),
        };
        let two_d1 = GrowthOrder {
            d: 1,
            theta: AlgebraicReal::rational(br(2)),
        };
        let golden = growth_order(&fibonacci(), 0).unwrap();
        assert_eq!(compare(&two, &two), Ordering::Equal);
        assert_eq!(compare(&golden, &two), Ordering::Less);
        assert_eq!(compare(&two, &two_d1), Ordering::Less);
    }

    #[test]
    fn same_order_verdicts() {
        assert!(all_same_order(&thue_morse()).unwrap().is_ok());
        let sparse =
            sub("alphabet c a b\nstart c\nrule c -> c a b c\nrule a -> a b\nrule b -> b a\n");
        assert!(all_same_order(&sparse).unwrap().is_err());
        // c -> cb, a -> ab, b -> ba: |phi^k(c)| = 2^k, all orders (0,2)
        let tail = sub("alphabet c a b\nstart c\nrule c -> c b\nrule a -> a b\nrule b -> b a\n");
        let o = all_same_order(&tail).unwrap().unwrap();
        assert_eq!((o.d, o.theta.as_rational()), (0, Some(&br(2))));
    }

    #[test]
    fn bounds_tm() {
        let phi = thue_morse();
        let psi = Morphism::identity(&phi.source);
        let b = growth_bounds(&phi, &psi).unwrap();
        assert!(b.theta_lo > BigRational::one());
        assert!(b.c1 <= BigRational::one());
        assert!(b.c2 >= BigRational::one());
    }

    #[test]
    fn bounds_fib_k30() {
        let phi = fibonacci();
        let psi = Morphism::identity(&phi.source);
        let b = growth_bounds(&phi, &psi).unwrap();
        let lens = image_lengths(&phi, &psi, 30);
        let mut lo_pow = BigRational::one();
        for row in lens.iter() {
            for len in row {
                assert!(BigRational::from(len.clone()) >= &b.c1 * &lo_pow);
            }
            lo_pow *= &b.theta_lo;
        }
    }

    #[test]
    fn bounds_three_letter_chain() {
        // c -> cb, a -> ab, b -> ba: valid bounds for all three letters
        let phi = sub("alphabet c a b\nstart c\nrule c -> c b\nrule a -> a b\nrule b -> b a\n");
        let psi = Morphism::identity(&phi.source);
        let b = growth_bounds(&phi, &psi).unwrap();
        let lens = image_lengths(&phi, &psi, 30);
        let mut lo_pow = BigRational::one();
        let mut hi_pow = BigRational::one();
        for row in lens.iter() {
            for len in row {
                let len = BigRational::from(len.clone());
                assert!(len >= &b.c1 * &lo_pow && len <= &b.c2 * &hi_pow);
            }
            lo_pow *= &b.theta_lo;
            hi_pow *= &b.theta_hi;
        }
    }

    #[test]
    fn order_consistent_under_powering() {
        // growth_order(phi^2, a) has theta squared and the same d
        for phi in [thue_morse(), fibonacci()] {
            let o1 = growth_order(&phi, 0).unwrap();
            let o2 = growth_order(&phi.power(2).unwrap(), 0).unwrap();
            // q with q(theta^2) = 0: even part of p(y)·p(-y)
            let p = &o1.theta.poly;
            let mut neg = p.clone();
            for (i, c) in neg.0.iter_mut().enumerate() {
                if i % 2 == 1 {
                    *c = -&*c;
                }
            }
            let mut prod = vec![BigInt::from(0); p.0.len() + neg.0.len() - 1];
            for (i, a) in p.0.iter().enumerate() {
                for (j, b) in neg.0.iter().enumerate() {
                    prod[i + j] += a * b;
                }
            }
            let even: Vec<BigInt> = prod.iter().step_by(2).cloned().collect();
            let q = IntPoly::new(even);
            let squared = AlgebraicReal::largest_root(&q).unwrap();
            assert_eq!(o2.theta.compare(&squared), Ordering::Equal);
            assert_eq!(o2.d, o1.d);
        }
    }
}
