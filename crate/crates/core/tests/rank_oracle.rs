mod common;

use common::{rank_by_elimination, rank_by_minors};
use mrlab::matrix::SparseExactMatrix;
use mrlab::rank::{affine_dim, exact_rank, linear_dim};
use mrlab::scalar::{Field, Scalar};
use proptest::prelude::*;

fn int_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(
            prop::collection::vec((-5i64..=5).prop_map(Scalar::from_integer), n),
            m,
        )
    })
}

fn low_rank_matrix() -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    // products of thin factors, so rank deficiency is common
    (1usize..=8, 1usize..=8, 1usize..=3).prop_flat_map(|(m, n, k)| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..=3, k), m),
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), k),
        )
            .prop_map(move |(a, b)| {
                (0..m)
                    .map(|i| {
                        (0..n)
                            .map(|j| Scalar::from_integer((0..k).map(|l| a[i][l] * b[l][j]).sum()))
                            .collect()
                    })
                    .collect()
            })
    })
}

fn gaussian_matrix() -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        prop::collection::vec(
            prop::collection::vec(
                (-3i64..=3, -3i64..=3).prop_map(|(a, b)| {
                    Scalar::new(Scalar::from_integer(a).re().clone(), Scalar::from_integer(b).re().clone())
                }),
                n,
            ),
            m,
        )
    })
}

fn sparse(field: Field, rows: &[Vec<Scalar>]) -> SparseExactMatrix {
    SparseExactMatrix::from_dense(field, rows[0].len(), rows).unwrap()
}

proptest! {
    #[test]
    fn matches_elimination(rows in int_matrix(8, 8)) {
        prop_assert_eq!(exact_rank(&sparse(Field::Rational, &rows)), rank_by_elimination(&rows));
    }

    #[test]
    fn matches_minors(rows in int_matrix(5, 5)) {
        prop_assert_eq!(exact_rank(&sparse(Field::Rational, &rows)), rank_by_minors(&rows));
    }

    #[test]
    fn low_rank_matches_elimination(rows in low_rank_matrix()) {
        prop_assert_eq!(exact_rank(&sparse(Field::Rational, &rows)), rank_by_elimination(&rows));
    }

    #[test]
    fn gaussian_matches_elimination(rows in gaussian_matrix()) {
        prop_assert_eq!(exact_rank(&sparse(Field::Gaussian, &rows)), rank_by_elimination(&rows));
    }

    #[test]
    fn transpose_invariant(rows in low_rank_matrix()) {
        let m = sparse(Field::Rational, &rows);
        prop_assert_eq!(exact_rank(&m), exact_rank(&m.transpose()));
    }

    #[test]
    fn row_scaling_invariant(rows in low_rank_matrix(), num in 1i64..50, den in 1i64..50, neg in any::<bool>()) {
        let mut m = sparse(Field::Rational, &rows);
        let before = exact_rank(&m);
        let s = Scalar::ratio(if neg { -num } else { num }, den);
        for r in 0..m.nrows() {
            m.scale_row(r, &s);
        }
        prop_assert_eq!(exact_rank(&m), before);
    }

    #[test]
    fn permutation_invariant(rows in low_rank_matrix(), seed in any::<u64>()) {
        let m = sparse(Field::Rational, &rows);
        let mut rng = mrlab::generators::Rng64::new(seed);
        let mut rperm: Vec<usize> = (0..m.nrows()).collect();
        let mut cperm: Vec<usize> = (0..m.ncols()).collect();
        for i in (1..rperm.len()).rev() {
            rperm.swap(i, rng.index(i + 1));
        }
        for i in (1..cperm.len()).rev() {
            cperm.swap(i, rng.index(i + 1));
        }
        let shuffled = m.select_rows(&rperm).select_columns(&cperm);
        prop_assert_eq!(exact_rank(&shuffled), exact_rank(&m));
    }

    #[test]
    fn affine_dim_is_rank_of_differences(rows in int_matrix(7, 4)) {
        let diffs: Vec<Vec<Scalar>> = rows[1..]
            .iter()
            .map(|p| p.iter().zip(&rows[0]).map(|(a, b)| a - b).collect())
            .collect();
        let expected = if diffs.is_empty() { 0 } else { rank_by_elimination(&diffs) as isize };
        prop_assert_eq!(affine_dim(&rows).unwrap(), expected);
        let lin = linear_dim(&rows).unwrap() as isize;
        prop_assert!(expected <= lin && lin <= expected + 1);
    }
}

#[test]
fn rank_of_collinear_points_matrix() {
    let pts: Vec<Vec<Scalar>> = (1..=4).map(|t| vec![Scalar::from_integer(t), Scalar::from_integer(2 * t)]).collect();
    assert_eq!(linear_dim(&pts).unwrap(), 1);
    assert_eq!(affine_dim(&pts).unwrap(), 1);
}
