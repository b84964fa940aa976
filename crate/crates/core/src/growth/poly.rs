//! Integer polynomials, Sturm sequences, and exactly represented real
//! algebraic numbers (defining polynomial + isolating rational interval).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Univariate polynomial over the integers, coefficients low to high, no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> IntPoly {
        if self.0.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Divide out the integer content and normalize the leading sign.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = num_integer::gcd(g, c.abs());
        }
        if g.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs: Vec<BigInt> = self.0.iter().map(|c| c / &g).collect();
        if coeffs.last().unwrap().is_negative() {
            for c in &mut coeffs {
                *c = -&*c;
            }
        }
        IntPoly::new(coeffs)
    }

    /// Divide out the positive integer content, keeping the sign pattern.
    fn reduce_content(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = num_integer::gcd(g, c.abs());
        }
        IntPoly::new(self.0.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder of `self` by `d`, scaled only by positive constants
    /// so the sign pattern is preserved (needed for Sturm chains).
    fn prem(&self, d: &IntPoly) -> IntPoly {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().unwrap().clone();
        let lead_abs = lead.abs();
        let lead_sign_pos = !lead.is_negative();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap().clone();
            for x in r.iter_mut() {
                *x = &*x * &lead_abs;
            }
            let cs = if lead_sign_pos { c } else { -c };
            for i in 0..=dd {
                r[k + i] -= &cs * &d.0[i];
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly::new(r).reduce_content()
    }

    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.prem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Squarefree part: `self / gcd(self, self')`.
    pub fn squarefree(&self) -> IntPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.primitive();
        }
        self.div_exact(&g).primitive()
    }

    /// Exact division over the rationals, assuming divisibility.
    fn div_exact(&self, d: &IntPoly) -> IntPoly {
        let mut num: Vec<BigRational> =
            self.0.iter().map(|c| BigRational::from(c.clone())).collect();
        let dd = d.degree();
        let lead = BigRational::from(d.0.last().unwrap().clone());
        let mut q = vec![BigRational::zero(); num.len().saturating_sub(dd)];
        while num.len() > dd {
            let k = num.len() - 1 - dd;
            let c = num.last().unwrap() / &lead;
            q[k] = c.clone();
            for i in 0..=dd {
                let t = &c * BigRational::from(d.0[i].clone());
                num[k + i] -= t;
            }
            while num.last().is_some_and(Zero::is_zero) {
                num.pop();
            }
        }
        // clear denominators (they must be trivial up to content)
        let mut den = BigInt::one();
        for c in &q {
            den = num_integer::lcm(den, c.denom().clone());
        }
        IntPoly::new(q.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect())
    }

    /// Sturm chain of the squarefree part.
    pub fn sturm_chain(&self) -> Vec<IntPoly> {
        let p = self.squarefree();
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].prem(&chain[n - 1]);
            let neg = IntPoly::new(r.0.iter().map(|c| -c).collect());
            chain.push(neg);
        }
        chain
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(chain: &[IntPoly], lo: &BigRational, hi: &BigRational) -> usize {
        let var = |x: &BigRational| -> usize {
            let mut prev = 0i32;
            let mut count = 0;
            for p in chain {
                let s = p.sign_at(x);
                if s != 0 {
                    if prev != 0 && s != prev {
                        count += 1;
                    }
                    prev = s;
                }
            }
            count
        };
        var(lo).saturating_sub(var(hi))
    }

    /// An upper bound on the absolute value of all real roots (Cauchy bound).
    pub fn root_bound(&self) -> BigRational {
        let lead = self.0.last().expect("nonzero polynomial").abs();
        let mut m = BigInt::zero();
        for c in &self.0[..self.0.len() - 1] {
            m = m.max(c.abs());
        }
        BigRational::from(m) / BigRational::from(lead) + BigRational::from(BigInt::from(2))
    }
}

/// A real algebraic number: exactly one real root of `poly` lies in
/// `[lo, hi]`; the interval refines to any width by bisection with exact
/// sign evaluation. A collapsed interval (`lo == hi`) is an exact rational.
#[derive(Debug, Clone)]
pub struct AlgebraicReal {
    pub poly: IntPoly,
    pub lo: BigRational,
    pub hi: BigRational,
    chain: Vec<IntPoly>,
}

impl AlgebraicReal {
    /// Wrap an exact rational value.
    pub fn rational(q: BigRational) -> Self {
        // root of denom*x - numer
        let poly = IntPoly::new(vec![-q.numer().clone(), q.denom().clone()]);
        AlgebraicReal {
            chain: poly.sturm_chain(),
            poly,
            lo: q.clone(),
            hi: q,
        }
    }

    /// Isolate the largest real root of `poly` in `(0, bound]`.
    pub fn largest_root(poly: &IntPoly) -> Option<AlgebraicReal> {
        let p = poly.squarefree();
        let chain = p.sturm_chain();
        let mut lo = BigRational::zero();
        let hi = p.root_bound();
        if IntPoly::count_roots(&chain, &lo, &hi) == 0 {
            return None;
        }
        // raise lo until (lo, hi] holds exactly the largest root
        loop {
            let in_interval = IntPoly::count_roots(&chain, &lo, &hi);
            debug_assert!(in_interval >= 1);
            if in_interval == 1 {
                break;
            }
            let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
            if IntPoly::count_roots(&chain, &mid, &hi) >= 1 {
                lo = mid;
            } else {
                // largest root in (lo, mid]: shrink hi by bisection inside
                let mut l = lo.clone();
                let mut h = mid;
                while IntPoly::count_roots(&chain, &l, &h) > 1 {
                    let m = (&l + &h) / BigRational::from(BigInt::from(2));
                    if IntPoly::count_roots(&chain, &m, &h) >= 1 {
                        l = m;
                    } else {
                        h = m;
                    }
                }
                let mut out = AlgebraicReal {
                    poly: p,
                    lo: l,
                    hi: h,
                    chain,
                };
                out.clear_lo_root();
                out.snap_rational();
                return Some(out);
            }
        }
        let mut out = AlgebraicReal {
            poly: p,
            lo,
            hi,
            chain,
        };
        out.clear_lo_root();
        out.snap_rational();
        Some(out)
    }

    /// The isolation works with half-open intervals `(lo, hi]`; when `lo`
    /// itself is a different root of the polynomial, shrink until the closed
    /// interval `[lo, hi]` contains exactly the isolated root.
    fn clear_lo_root(&mut self) {
        while self.poly.sign_at(&self.lo) == 0 && self.lo != self.hi {
            let mid = (&self.lo + &self.hi) / BigRational::from(BigInt::from(2));
            if self.poly.sign_at(&mid) == 0 {
                if IntPoly::count_roots(&self.chain, &mid, &self.hi) == 0 {
                    self.lo = mid.clone();
                    self.hi = mid;
                } else {
                    self.lo = mid;
                }
            } else if IntPoly::count_roots(&self.chain, &mid, &self.hi) >= 1 {
                self.lo = mid;
            } else {
                self.hi = mid;
            }
        }
    }

    /// Collapse the interval when an endpoint or a small rational candidate
    /// is an exact root.
    fn snap_rational(&mut self) {
        for cand in [self.hi.clone(), self.lo.clone()] {
            if self.poly.sign_at(&cand) == 0 {
                self.lo = cand.clone();
                self.hi = cand;
                return;
            }
        }
        // rational root candidates p/q: p | constant, q | leading
        if self.poly.0.len() >= 2 {
            let lead = self.poly.0.last().unwrap().abs();
            let cons = self.poly.0[0].abs();
            if !cons.is_zero() {
                for p in small_divisors(&cons, 64) {
                    for q in small_divisors(&lead, 64) {
                        let cand = BigRational::new(p.clone(), q.clone());
                        if cand >= self.lo
                            && cand <= self.hi
                            && self.poly.sign_at(&cand) == 0
                        {
                            self.lo = cand.clone();
                            self.hi = cand;
                            return;
                        }
                    }
                }
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// One bisection step with exact sign evaluation.
    pub fn refine(&mut self) {
        if self.is_rational() {
            return;
        }
        let mid = (&self.lo + &self.hi) / BigRational::from(BigInt::from(2));
        match self.poly.sign_at(&mid) {
            0 => {
                self.lo = mid.clone();
                self.hi = mid;
            }
            _ => {
                if IntPoly::count_roots(&self.chain, &self.lo, &mid) == 1 {
                    self.hi = mid;
                } else {
                    self.lo = mid;
                }
            }
        }
    }

    pub fn refine_below(&mut self, width: &BigRational) {
        while !self.is_rational() && &self.width() > width {
            self.refine();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from(BigInt::from(2));
        rational_to_f64(&mid)
    }

    /// Exact total comparison. Equality is decided by the gcd of the two
    /// defining polynomials having a root in the intersection of the
    /// isolating intervals; otherwise the intervals are refined until
    /// disjoint.
    pub fn compare(&self, other: &AlgebraicReal) -> Ordering {
        if let (Some(a), Some(b)) = (self.as_rational(), other.as_rational()) {
            return a.cmp(b);
        }
        let lo = max_r(&self.lo, &other.lo);
        let hi = min_r(&self.hi, &other.hi);
        if lo <= hi {
            let g = self.poly.gcd(&other.poly);
            if g.degree() >= 1 {
                let chain = g.sturm_chain();
                // common root in the (slightly widened, half-open) overlap?
                let eps = BigRational::new(BigInt::one(), BigInt::from(1_000_000u64));
                let wide_lo = &lo - (&eps * (&hi - &lo + BigRational::one()));
                if IntPoly::count_roots(&chain, &wide_lo, &hi) >= 1 {
                    // candidates agree on the common root iff both isolate it
                    let mut a = self.clone();
                    let mut b = other.clone();
                    for _ in 0..256 {
                        let alo = max_r(&a.lo, &b.lo);
                        let ahi = min_r(&a.hi, &b.hi);
                        if alo > ahi {
                            break;
                        }
                        let wl = &alo - &eps;
                        if IntPoly::count_roots(&chain, &wl, &ahi) >= 1
                            && IntPoly::count_roots(&a.chain, &wl, &ahi) >= 1
                            && IntPoly::count_roots(&b.chain, &wl, &ahi) >= 1
                        {
                            // the overlap still holds a common candidate;
                            // refine to confirm or separate
                            if a.width() >= b.width() {
                                a.refine();
                            } else {
                                b.refine();
                            }
                            if a.is_rational() && b.is_rational() {
                                return a.lo.cmp(&b.lo);
                            }
                            continue;
                        }
                        break;
                    }
                    let alo = max_r(&a.lo, &b.lo);
                    let ahi = min_r(&a.hi, &b.hi);
                    if alo <= ahi {
                        let wl = &alo - &eps;
                        if IntPoly::count_roots(&chain, &wl, &ahi) >= 1 {
                            return Ordering::Equal;
                        }
                    }
                    return disjoint_compare(&a, &b);
                }
            }
        }
        let mut a = self.clone();
        let mut b = other.clone();
        for _ in 0..4096 {
            if a.hi < b.lo {
                return Ordering::Less;
            }
            if b.hi < a.lo {
                return Ordering::Greater;
            }
            if a.width() >= b.width() {
                a.refine();
            } else {
                b.refine();
            }
            if a.is_rational() && b.is_rational() {
                return a.lo.cmp(&b.lo);
            }
        }
        disjoint_compare(&a, &b)
    }
}

fn disjoint_compare(a: &AlgebraicReal, b: &AlgebraicReal) -> Ordering {
    let mut a = a.clone();
    let mut b = b.clone();
    for _ in 0..4096 {
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if b.hi < a.lo {
            return Ordering::Greater;
        }
        a.refine();
        b.refine();
        if a.is_rational() && b.is_rational() {
            return a.lo.cmp(&b.lo);
        }
    }
    Ordering::Equal
}

fn max_r(a: &BigRational, b: &BigRational) -> BigRational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn min_r(a: &BigRational, b: &BigRational) -> BigRational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn small_divisors(n: &BigInt, cap: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &(&d * &d) <= n && out.len() < cap {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    // scale down to keep within f64 range
    let bits = n.bits().max(d.bits());
    if bits > 900 {
        let shift = bits - 900;
        let n2 = n >> shift;
        let d2 = d >> shift;
        return to_f64_lossy(&n2) / to_f64_lossy(&d2.max(BigInt::one()));
    }
    to_f64_lossy(n) / to_f64_lossy(d)
}

fn to_f64_lossy(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_counts_roots() {
        // x^2 - x - 1: roots phi and -1/phi
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let chain = p.sturm_chain();
        let m2 = BigRational::from(BigInt::from(-2));
        let two = BigRational::from(BigInt::from(2));
        let zero = BigRational::zero();
        assert_eq!(IntPoly::count_roots(&chain, &m2, &two), 2);
        assert_eq!(IntPoly::count_roots(&chain, &zero, &two), 1);
    }

    #[test]
    fn isolates_golden_ratio() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let mut r = AlgebraicReal::largest_root(&p).unwrap();
        r.refine_below(&BigRational::new(BigInt::one(), BigInt::from(1_000_000)));
        let v = r.to_f64();
        assert!((v - 1.618_033_988_75).abs() < 1e-5, "{v}");
        assert!(!r.is_rational());
    }

    #[test]
    fn exact_integer_root() {
        // x - 2
        let p = IntPoly::from_i64(&[-2, 1]);
        let r = AlgebraicReal::largest_root(&p).unwrap();
        assert_eq!(r.as_rational(), Some(&BigRational::from(BigInt::from(2))));
    }

    #[test]
    fn snaps_rational_root_of_quadratic() {
        // (x-2)(x-1) = x^2 - 3x + 2
        let p = IntPoly::from_i64(&[2, -3, 1]);
        let r = AlgebraicReal::largest_root(&p).unwrap();
        assert_eq!(r.as_rational(), Some(&BigRational::from(BigInt::from(2))));
    }

    #[test]
    fn compare_golden_vs_two() {
        let golden = AlgebraicReal::largest_root(&IntPoly::from_i64(&[-1, -1, 1])).unwrap();
        let two = AlgebraicReal::rational(BigRational::from(BigInt::from(2)));
        assert_eq!(golden.compare(&two), Ordering::Less);
        assert_eq!(two.compare(&golden), Ordering::Greater);
    }

    #[test]
    fn compare_equal_roots_different_polys() {
        // golden is the largest root of both x^2-x-1 and (x^2-x-1)(x+5)
        let a = AlgebraicReal::largest_root(&IntPoly::from_i64(&[-1, -1, 1])).unwrap();
        let b = AlgebraicReal::largest_root(&IntPoly::from_i64(&[-5, -6, 4, 1])).unwrap();
        assert_eq!(a.compare(&b), Ordering::Equal);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // gcd(x^2-1, x^2-3x+2) = x-1
        let a = IntPoly::from_i64(&[-1, 0, 1]);
        let b = IntPoly::from_i64(&[2, -3, 1]);
        let g = a.gcd(&b);
        assert_eq!(g, IntPoly::from_i64(&[-1, 1]));
    }
}
