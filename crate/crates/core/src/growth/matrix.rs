//! Incidence matrices of substitutions and exact rational linear algebra.

use super::poly::IntPoly;
use crate::words::{Letter, Morphism};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Occurrence counts: `counts[a][b]` = number of occurrences of `b` in
/// `phi(a)`. Row sums equal image lengths.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix {
    pub n: usize,
    pub counts: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn of(phi: &Morphism) -> Self {
        assert!(phi.is_substitution());
        let n = phi.source.len();
        let mut counts = vec![vec![0u64; n]; n];
        for a in 0..n {
            for &b in phi.image(a as Letter).iter() {
                counts[a][b as usize] += 1;
            }
        }
        IncidenceMatrix { n, counts }
    }

    pub fn submatrix(&self, rows: &[usize]) -> IncidenceMatrix {
        let counts = rows
            .iter()
            .map(|&a| rows.iter().map(|&b| self.counts[a][b]).collect())
            .collect();
        IncidenceMatrix {
            n: rows.len(),
            counts,
        }
    }

    /// Characteristic polynomial `det(xI - M)` via Faddeev-LeVerrier
    /// (exact integer coefficients).
    pub fn char_poly(&self) -> IntPoly {
        let n = self.n;
        let m: Vec<Vec<BigInt>> = self
            .counts
            .iter()
            .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        // M_1 = M, c_{n-1} = -tr(M_1); M_{k+1} = M(M_k + c_{n-k} I)
        let mut mk = m.clone();
        for k in 1..=n {
            let tr: BigInt = (0..n).map(|i| mk[i][i].clone()).sum();
            let c = -tr / BigInt::from(k as i64);
            coeffs[n - k] = c.clone();
            if k == n {
                break;
            }
            let mut adj = mk.clone();
            for (i, row) in adj.iter_mut().enumerate().take(n) {
                row[i] += &c;
            }
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigInt::zero();
                    for (l, adj_row) in adj.iter().enumerate() {
                        s += &m[i][l] * &adj_row[j];
                    }
                    next[i][j] = s;
                }
            }
            mk = next;
        }
        IntPoly::new(coeffs)
    }

    /// `v <- M v` over the rationals.
    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.n)
            .map(|i| {
                let mut s = BigRational::zero();
                for j in 0..self.n {
                    if self.counts[i][j] != 0 {
                        s += BigRational::from(BigInt::from(self.counts[i][j])) * &v[j];
                    }
                }
                s
            })
            .collect()
    }
}

/// Solve `A x = b` exactly over the rationals by Gaussian elimination.
/// Returns `None` for a singular system.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Round a float to a rational with the given denominator.
pub fn rational_from_f64(x: f64, denom: u64) -> BigRational {
    let num = (x * denom as f64).round() as i64;
    BigRational::new(BigInt::from(num), BigInt::from(denom))
}

pub fn br(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn is_positive(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::morphism::fixtures::{fibonacci, thue_morse};

    #[test]
    fn tm_char_poly() {
        // M = [[1,1],[1,1]]: char poly x^2 - 2x
        let m = IncidenceMatrix::of(&thue_morse());
        assert_eq!(m.char_poly(), IntPoly::from_i64(&[0, -2, 1]));
    }

    #[test]
    fn fib_char_poly() {
        // M = [[1,1],[1,0]]: char poly x^2 - x - 1
        let m = IncidenceMatrix::of(&fibonacci());
        assert_eq!(m.char_poly(), IntPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn solve_2x2() {
        let a = vec![vec![br(2), br(1)], vec![br(1), br(3)]];
        let b = vec![br(5), br(10)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![br(1), br(3)]);
    }
}
