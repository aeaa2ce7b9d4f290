mod common;

use common::{delta_by_triples, fixtures, q};
use mrlab::config::config_from_ints;
use mrlab::lines::{enumerate_lines, line_key, on_line};
use mrlab::metrics::{compute_delta, is_mr_configuration, SingletonPolicy};
use mrlab::scalar::{Field, Scalar};
use mrlab::ColoredConfig;
use proptest::prelude::*;

/// Up to 12 distinct points in a small box, split into up to 3 colors.
fn small_config() -> impl Strategy<Value = ColoredConfig> {
    (2usize..=3, 1usize..=3).prop_flat_map(|(dim, colors)| {
        prop::collection::btree_set(prop::collection::vec(0i64..4, dim), colors..=12).prop_flat_map(
            move |pts| {
                let pts: Vec<Vec<i64>> = pts.into_iter().collect();
                let len = pts.len();
                prop::collection::vec(0..colors, len).prop_map(move |labels| {
                    let mut classes = vec![Vec::new(); colors];
                    for (p, c) in pts.iter().zip(&labels) {
                        classes[*c].push(p.clone());
                    }
                    for c in 0..colors {
                        if classes[c].is_empty() {
                            classes[c].push(vec![10 + c as i64; dim]);
                        }
                    }
                    config_from_ints(&classes).unwrap()
                })
            },
        )
    })
}

proptest! {
    #[test]
    fn delta_matches_triple_loop(config in small_config()) {
        for policy in [SingletonPolicy::Strict, SingletonPolicy::Vacuous] {
            prop_assert_eq!(compute_delta(&config, policy).delta_star, delta_by_triples(&config, policy));
        }
    }

    #[test]
    fn lines_cover_every_pair_once(config in small_config()) {
        let m = config.num_points();
        let lines = enumerate_lines(&config);
        let pairs: usize = lines.iter().map(|l| l.len() * (l.len() - 1) / 2).sum();
        prop_assert_eq!(pairs, m * (m - 1) / 2);
        for l in &lines {
            for &g in &l.members {
                prop_assert!(on_line(&l.key, config.point(g)));
            }
            let (a, b) = (config.point(l.members[0]), config.point(*l.members.last().unwrap()));
            prop_assert_eq!(&line_key(config.field(), b, a), &l.key);
        }
    }

    #[test]
    fn delta_is_affine_invariant(config in small_config(), s in 1i64..5, t in -3i64..3) {
        let scale = Scalar::ratio(-s, 3);
        let shift = Scalar::from_integer(t);
        let classes: Vec<Vec<Vec<Scalar>>> = config
            .classes()
            .iter()
            .map(|c| c.iter().map(|p| p.iter().map(|x| &(x * &scale) + &shift).collect()).collect())
            .collect();
        let moved = ColoredConfig::new(Field::Rational, config.dim(), classes).unwrap();
        prop_assert_eq!(
            compute_delta(&moved, SingletonPolicy::Strict).delta_star,
            compute_delta(&config, SingletonPolicy::Strict).delta_star
        );
    }
}

#[test]
fn fixtures_match_triple_loop() {
    for (name, config) in fixtures().iter().filter(|(_, c)| c.num_points() <= 40) {
        for policy in [SingletonPolicy::Strict, SingletonPolicy::Vacuous] {
            assert_eq!(
                compute_delta(config, policy).delta_star,
                delta_by_triples(config, policy),
                "{name} under {policy:?}"
            );
        }
    }
}

#[test]
fn parity_grid_delta_from_oracle() {
    let config = mrlab::generators::gen_grid(3, mrlab::generators::GridColoring::Parity).unwrap();
    assert_eq!(config.sizes(), vec![5, 4]);
    let oracle = delta_by_triples(&config, SingletonPolicy::Strict);
    assert_eq!(compute_delta(&config, SingletonPolicy::Strict).delta_star, oracle);
    // the centre sees only same-color points along both diagonals
    assert_eq!(oracle, q(0, 1));
}

#[test]
fn mr_examples() {
    let yes = config_from_ints(&[vec![vec![0, 0], vec![2, 0]], vec![vec![1, 0]]]).unwrap();
    assert!(is_mr_configuration(&yes).unwrap().holds);

    let no = config_from_ints(&[vec![vec![0, 0], vec![4, 0], vec![0, 4]], vec![vec![1, 1]]]).unwrap();
    let verdict = is_mr_configuration(&no).unwrap();
    assert!(!verdict.holds);
    let witness = verdict.witness.unwrap();
    assert!(witness.members.iter().all(|&g| no.color_of(g) == 0));
}
