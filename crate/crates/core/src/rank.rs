//! Exact rank and span dimensions.
//!
//! Every row is first scaled to an integral row (over ℤ for rational
//! matrices, over ℤ[i] otherwise) and divided by its content. Rows are
//! then inserted one at a time into an echelon basis keyed by pivot column,
//! eliminating with the fraction-free update `row ← p·row − a·basis_row`
//! followed by content removal. Only the basis rows whose pivots a row
//! actually hits are touched, which keeps sparse collinearity matrices cheap.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::SparseExactMatrix;
use crate::scalar::{Field, Scalar};

/// Integral domain with a gcd, as needed by fraction-free elimination.
trait GcdDomain: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn gcd(&self, rhs: &Self) -> Self;
    /// `self / rhs`, where `rhs` is known to divide `self`.
    fn div_exact(&self, rhs: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl GcdDomain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn gcd(&self, rhs: &Self) -> Self {
        Integer::gcd(self, rhs)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

/// Gaussian integer `re + im·i`.
#[derive(Clone, PartialEq, Debug)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Quotient rounded to the nearest Gaussian integer.
    fn div_round(&self, rhs: &Self) -> Self {
        let n = rhs.norm();
        // self * conj(rhs)
        let re = &self.re * &rhs.re + &self.im * &rhs.im;
        let im = &self.im * &rhs.re - &self.re * &rhs.im;
        let round = |x: BigInt| -> BigInt {
            // floor((2x + n) / 2n)
            let two = BigInt::from(2);
            (&two * x + &n).div_floor(&(&two * &n))
        };
        GaussInt {
            re: round(re),
            im: round(im),
        }
    }
}

impl GcdDomain for GaussInt {
    fn zero() -> Self {
        GaussInt {
            re: <BigInt as Zero>::zero(),
            im: <BigInt as Zero>::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn mul(&self, rhs: &Self) -> Self {
        GaussInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        GaussInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
    fn gcd(&self, rhs: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !GcdDomain::is_zero(&b) {
            let q = a.div_round(&b);
            let r = a.sub(&q.mul(&b));
            a = b;
            b = r;
        }
        a
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        let q = self.div_round(rhs);
        debug_assert!(q.mul(rhs) == *self, "inexact Gaussian division");
        q
    }
    fn is_unit(&self) -> bool {
        self.norm().is_one()
    }
}

type SparseRow<D> = Vec<(usize, D)>;

fn make_primitive<D: GcdDomain>(row: &mut SparseRow<D>) {
    let mut g = D::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_unit() {
            return;
        }
    }
    if !g.is_zero() {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
}

/// `p·row − a·pivot_row`, dropping zeros. Both inputs sorted by column.
fn combine<D: GcdDomain>(row: &SparseRow<D>, pivot_row: &SparseRow<D>, p: &D, a: &D) -> SparseRow<D> {
    let mut out = Vec::with_capacity(row.len() + pivot_row.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot_row.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = pivot_row.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        let (col, v) = if ci < cj {
            i += 1;
            (ci, p.mul(&row[i - 1].1))
        } else if cj < ci {
            j += 1;
            (cj, D::zero().sub(&a.mul(&pivot_row[j - 1].1)))
        } else {
            i += 1;
            j += 1;
            (ci, p.mul(&row[i - 1].1).sub(&a.mul(&pivot_row[j - 1].1)))
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

fn rank_integral<D: GcdDomain>(rows: impl Iterator<Item = SparseRow<D>>) -> usize {
    let mut basis: BTreeMap<usize, SparseRow<D>> = BTreeMap::new();
    for mut row in rows {
        make_primitive(&mut row);
        while let Some((lead, a)) = row.first().cloned() {
            match basis.get(&lead) {
                Some(pivot_row) => {
                    let p = &pivot_row[0].1;
                    let g = p.gcd(&a);
                    let (p, a) = (p.div_exact(&g), a.div_exact(&g));
                    row = combine(&row, pivot_row, &p, &a);
                    make_primitive(&mut row);
                }
                None => {
                    basis.insert(lead, row);
                    break;
                }
            }
        }
    }
    basis.len()
}

fn integral_row_z(row: &[(usize, Scalar)]) -> SparseRow<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.re().denom()));
    row.iter()
        .map(|(c, v)| (*c, (v.re() * &l).to_integer()))
        .collect()
}

fn integral_row_zi(row: &[(usize, Scalar)]) -> SparseRow<GaussInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(&v.denom_lcm()));
    row.iter()
        .map(|(c, v)| {
            (
                *c,
                GaussInt {
                    re: (v.re() * &l).to_integer(),
                    im: (v.im() * &l).to_integer(),
                },
            )
        })
        .collect()
}

/// Exact rank over the matrix's field. An empty matrix has rank 0.
pub fn exact_rank(mat: &SparseExactMatrix) -> usize {
    let all_real = mat.rows().all(|r| r.iter().all(|(_, v)| v.is_real()));
    if all_real {
        rank_integral(mat.rows().map(integral_row_z))
    } else {
        rank_integral(mat.rows().map(integral_row_zi))
    }
}

fn points_matrix(points: &[Vec<Scalar>]) -> Result<SparseExactMatrix> {
    let d = points.first().map_or(0, Vec::len);
    let field = if points.iter().flatten().all(Scalar::is_real) {
        Field::Rational
    } else {
        Field::Gaussian
    };
    SparseExactMatrix::from_dense(field, d, points)
}

/// Dimension of the linear span of `points`.
pub fn linear_dim(points: &[Vec<Scalar>]) -> Result<usize> {
    Ok(exact_rank(&points_matrix(points)?))
}

/// Dimension of the affine span of `points`; `-1` for the empty set.
pub fn affine_dim(points: &[Vec<Scalar>]) -> Result<isize> {
    let Some(base) = points.first() else {
        return Ok(-1);
    };
    let diffs = points[1..]
        .iter()
        .map(|p| {
            if p.len() != base.len() {
                return Err(Error::MismatchedVectors {
                    expected: base.len(),
                    found: p.len(),
                });
            }
            Ok(p.iter().zip(base).map(|(a, b)| a - b).collect())
        })
        .collect::<Result<Vec<Vec<Scalar>>>>()?;
    if diffs.is_empty() {
        return Ok(0);
    }
    Ok(linear_dim(&diffs)? as isize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect())
            .collect()
    }

    fn mat(rows: &[&[i64]]) -> SparseExactMatrix {
        SparseExactMatrix::from_dense(Field::Rational, rows[0].len(), &ints(rows)).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&mat(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(exact_rank(&SparseExactMatrix::zeros(Field::Rational, 3, 4)), 0);
        // (1,2,3) - (2,4,6)/2 = 0; (0,1,1) independent
        assert_eq!(exact_rank(&mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(exact_rank(&SparseExactMatrix::zeros(Field::Rational, 0, 0)), 0);
    }

    #[test]
    fn gaussian_rank_is_over_the_complex_field() {
        // (1, i) and (i, -1) are proportional over Q(i) but not over Q.
        let rows: Vec<Vec<Scalar>> = vec![
            vec!["1".parse().unwrap(), "i".parse().unwrap()],
            vec!["i".parse().unwrap(), "-1".parse().unwrap()],
        ];
        let m = SparseExactMatrix::from_dense(Field::Gaussian, 2, &rows).unwrap();
        assert_eq!(exact_rank(&m), 1);
        let rows: Vec<Vec<Scalar>> = vec![
            vec!["1".parse().unwrap(), "i".parse().unwrap()],
            vec!["1/2+i".parse().unwrap(), "3".parse().unwrap()],
        ];
        let m = SparseExactMatrix::from_dense(Field::Gaussian, 2, &rows).unwrap();
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn span_dimensions() {
        assert_eq!(linear_dim(&[]).unwrap(), 0);
        assert_eq!(linear_dim(&ints(&[&[1, 1], &[2, 2]])).unwrap(), 1);
        assert_eq!(linear_dim(&ints(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])).unwrap(), 2);
        assert_eq!(affine_dim(&ints(&[&[5, 7]])).unwrap(), 0);
        assert_eq!(affine_dim(&ints(&[&[0, 0], &[1, 0], &[2, 0], &[3, 0]])).unwrap(), 1);
        assert_eq!(affine_dim(&ints(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), 2);
        assert_eq!(affine_dim(&[]).unwrap(), -1);
        assert!(linear_dim(&ints(&[&[1, 0], &[1]])).is_err());
        assert!(affine_dim(&ints(&[&[1, 0], &[1]])).is_err());
    }

    #[test]
    fn gaussian_gcd_divides_both() {
        let a = GaussInt { re: 12.into(), im: 18.into() };
        let b = GaussInt { re: (-6).into(), im: 30.into() };
        let g = a.gcd(&b);
        assert_eq!(a.div_exact(&g).mul(&g), a);
        assert_eq!(b.div_exact(&g).mul(&g), b);
    }
}
