//! Extraordinary lines, the collinearity matrix `A` with `A·M = 0`, and the
//! checks that tie its design parameters to the dimensions of a partition.
//!
//! For a partition `P1 | P2 | P3` of the color classes, a line is
//! extraordinary when it passes through a point of `P2` and through at least
//! three points of `P1 ∪ P2`; those points are associated with it. Each
//! extraordinary line with `ℓ` associated points contributes the `ℓ² − ℓ`
//! triples of a triple system, and each triple becomes one row of `A` holding
//! an all-nonzero linear dependency of its three points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::config::{Block, ColoredConfig, Partition};
use crate::design::{audit_design, rank_bound, DesignParams};
use crate::error::{Error, Result};
use crate::lines::{enumerate_lines, line_parameter, LineRecord};
use crate::matrix::SparseExactMatrix;
use crate::metrics::DeltaProfile;
use crate::rank::exact_rank;
use crate::scalar::{decimal, format_rational, Scalar};
use crate::triples::build_triples;

#[derive(Debug, Clone)]
pub struct ExtraordinaryLine {
    pub line: LineRecord,
    /// Members in `P1 ∪ P2`, sorted by their parameter along the line.
    pub associated: Vec<usize>,
    /// Line parameters of `associated`, same order, strictly increasing.
    pub parameters: Vec<Scalar>,
    /// Members in `P3`; they are on the line but not associated with it.
    pub extra: Vec<usize>,
}

impl ExtraordinaryLine {
    pub fn ell(&self) -> usize {
        self.associated.len()
    }
}

pub fn find_extraordinary_lines(config: &ColoredConfig, part: &Partition) -> Vec<ExtraordinaryLine> {
    find_extraordinary_lines_in(config, part, &enumerate_lines(config))
}

/// Same as [`find_extraordinary_lines`] over a precomputed line list, which
/// must be sorted by key.
pub fn find_extraordinary_lines_in(
    config: &ColoredConfig,
    part: &Partition,
    lines: &[LineRecord],
) -> Vec<ExtraordinaryLine> {
    lines
        .iter()
        .filter_map(|line| {
            let (extra, associated): (Vec<usize>, Vec<usize>) = line
                .members
                .iter()
                .partition(|&&g| part.block_of(g) == Block::P3);
            let touches_p2 = associated.iter().any(|&g| part.block_of(g) == Block::P2);
            if !touches_p2 || associated.len() < 3 {
                return None;
            }
            let mut keyed: Vec<(Scalar, usize)> = associated
                .into_iter()
                .map(|g| (line_parameter(&line.key.direction, config.point(g)), g))
                .collect();
            keyed.sort();
            let (parameters, associated) = keyed.into_iter().unzip();
            Some(ExtraordinaryLine {
                line: line.clone(),
                associated,
                parameters,
                extra,
            })
        })
        .collect()
}

/// One row of `A`.
#[derive(Debug, Clone)]
pub struct AssembledTriple {
    /// Index into [`CollinearityAssembly::lines`].
    pub line: usize,
    /// Index of the triple within that line's triple system.
    pub triple: usize,
    /// Global point indices.
    pub points: [usize; 3],
    pub coefficients: [Scalar; 3],
}

#[derive(Debug, Clone)]
pub struct CollinearityAssembly {
    pub partition: Partition,
    pub lines: Vec<ExtraordinaryLine>,
    pub triples: Vec<AssembledTriple>,
    /// `|T| × |V|`, one row per triple, columns indexed by global point.
    pub a: SparseExactMatrix,
    /// `|V| × d`, rows are the points.
    pub m: SparseExactMatrix,
}

impl CollinearityAssembly {
    /// Columns of `A` belonging to a block.
    pub fn a_block(&self, block: Block) -> SparseExactMatrix {
        let cols: Vec<usize> = self.partition.range(block).collect();
        self.a.select_columns(&cols)
    }

    /// Rows of `M` belonging to a block.
    pub fn m_block(&self, block: Block) -> SparseExactMatrix {
        let rows: Vec<usize> = self.partition.range(block).collect();
        self.m.select_rows(&rows)
    }

    /// `A_b · M_b`.
    pub fn block_product(&self, block: Block) -> SparseExactMatrix {
        self.a_block(block)
            .mul(&self.m_block(block))
            .expect("block shapes agree")
    }

    /// Number of rows of `A` with a nonzero entry in the column of `global`.
    pub fn column_support(&self, global: usize) -> usize {
        self.triples
            .iter()
            .filter(|t| t.points.contains(&global))
            .count()
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "x": self.partition.x,
            "y": self.partition.y,
            "extraordinary_lines": self.lines.len(),
            "line_sizes": self.lines.iter().map(ExtraordinaryLine::ell).collect::<Vec<_>>(),
            "rows": self.a.nrows(),
            "columns": self.a.ncols(),
            "nonzeros": self.a.nnz(),
        })
    }
}

/// `h1 = s2 − s3`, `h2 = s3 − s1`, `h3 = s1 − s2`: nonzero for distinct
/// parameters, summing to zero, with `Σ h_j s_j = 0`.
fn dependency(s: [&Scalar; 3]) -> [Scalar; 3] {
    [s[1] - s[2], s[2] - s[0], s[0] - s[1]]
}

pub fn assemble(config: &ColoredConfig, part: &Partition) -> Result<CollinearityAssembly> {
    assemble_with_lines(config, part, &enumerate_lines(config))
}

pub fn assemble_with_lines(
    config: &ColoredConfig,
    part: &Partition,
    lines: &[LineRecord],
) -> Result<CollinearityAssembly> {
    let field = config.field();
    let points = config.points();
    let m = SparseExactMatrix::from_dense(field, config.dim(), &points)?;
    let ext = find_extraordinary_lines_in(config, part, lines);
    let mut a = SparseExactMatrix::zeros(field, 0, points.len());
    let mut triples = Vec::new();
    for (li, line) in ext.iter().enumerate() {
        if line.ell() < 3 {
            return Err(Error::Invariant(format!("extraordinary line with {} points", line.ell())));
        }
        let ts = build_triples(line.ell())?;
        for (ti, t) in ts.triples.iter().enumerate() {
            let idx = [t[0] - 1, t[1] - 1, t[2] - 1];
            let pts = idx.map(|k| line.associated[k]);
            let coefficients = dependency(idx.map(|k| &line.parameters[k]));
            if coefficients.iter().any(Scalar::is_zero) {
                return Err(Error::Invariant("degenerate dependency coefficients".into()));
            }
            a.push_row(pts.iter().copied().zip(coefficients.iter().cloned()).collect())?;
            triples.push(AssembledTriple {
                line: li,
                triple: ti,
                points: pts,
                coefficients,
            });
        }
    }
    let asm = CollinearityAssembly {
        partition: part.clone(),
        lines: ext,
        triples,
        a,
        m,
    };
    check_assembly(&asm)?;
    Ok(asm)
}

fn check_assembly(asm: &CollinearityAssembly) -> Result<()> {
    if asm.a.rows().any(|r| r.len() != 3) {
        return Err(Error::Invariant("row of A without exactly three nonzeros".into()));
    }
    if !asm.a.mul(&asm.m)?.is_zero() {
        return Err(Error::Invariant("A·M is not zero".into()));
    }
    if !asm.a_block(Block::P3).is_zero() {
        return Err(Error::Invariant("A has a nonzero entry in a P3 column".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    HypothesesFailed,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::HypothesesFailed => "hypotheses-failed",
        }
    }
}

/// The size inequalities `|V_y| >= c1·|P2|` and `(δ − c2)·|V_y| >= |P3|`.
#[derive(Debug, Clone)]
pub struct Hypotheses {
    pub delta: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
    pub v_y: usize,
    pub p2: usize,
    pub p3: usize,
    pub positive: bool,
    pub size_ratio: bool,
    pub tail: bool,
}

impl Hypotheses {
    pub fn check(
        config: &ColoredConfig,
        part: &Partition,
        delta: &BigRational,
        c1: &BigRational,
        c2: &BigRational,
    ) -> Self {
        let v_y = config.class(part.y - 1).len();
        let (p2, p3) = (part.p2.len(), part.p3.len());
        let int = |v: usize| BigRational::from_integer(BigInt::from(v));
        Hypotheses {
            delta: delta.clone(),
            c1: c1.clone(),
            c2: c2.clone(),
            v_y,
            p2,
            p3,
            positive: c1 > &BigRational::zero() && c2 > &BigRational::zero(),
            size_ratio: int(v_y) >= c1 * int(p2),
            tail: (delta - c2) * int(v_y) >= int(p3),
        }
    }

    pub fn hold(&self) -> bool {
        self.positive && self.size_ratio && self.tail
    }

    pub fn to_json(&self) -> Value {
        json!({
            "delta": format_rational(&self.delta),
            "c1": format_rational(&self.c1),
            "c2": format_rational(&self.c2),
            "v_y": self.v_y,
            "p2": self.p2,
            "p3": self.p3,
            "positive": self.positive,
            "size_ratio": self.size_ratio,
            "tail": self.tail,
            "hold": self.hold(),
        })
    }
}

/// Returns the measured `δ*`, or an asserted smaller value.
pub fn resolve_delta(profile: &DeltaProfile, asserted: Option<&BigRational>) -> Result<BigRational> {
    match asserted {
        None => Ok(profile.delta_star.clone()),
        Some(d) if *d <= profile.delta_star => Ok(d.clone()),
        Some(d) => Err(Error::DeltaAboveMeasured {
            supplied: format_rational(d),
            measured: format_rational(&profile.delta_star),
        }),
    }
}

/// Per-point view of the column-support argument for a point `p` of `P2`.
#[derive(Debug, Clone)]
pub struct PointSupport {
    pub global: usize,
    pub color: usize,
    /// Points other than `p` associated with extraordinary lines through `p`.
    pub partners: usize,
    /// Nonzeros in the column of `p`.
    pub column_support: usize,
    /// `δ|V_i| − |P3|`.
    pub partners_floor: BigRational,
    /// `c2·|V_i|`.
    pub class_scale: BigRational,
    /// `c1·c2·|P2|`.
    pub block_scale: BigRational,
}

#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub hypotheses: Hypotheses,
    pub params: DesignParams,
    /// `3·c1·c2·|P2|`.
    pub required_k: BigRational,
    pub q_ok: bool,
    pub t_ok: bool,
    pub k_ok: bool,
    pub points_ok: bool,
    pub points: Vec<PointSupport>,
    pub verdict: Verdict,
}

impl ClaimReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.name(),
            "hypotheses": self.hypotheses.to_json(),
            "params": self.params.to_json(),
            "required_k": format_rational(&self.required_k),
            "q_le_3": self.q_ok,
            "t_le_6": self.t_ok,
            "k_ge_required": self.k_ok,
            "points_ok": self.points_ok,
            "points": self.points.iter().map(|p| json!({
                "global": p.global,
                "color": p.color,
                "partners": p.partners,
                "column_support": p.column_support,
                "partners_floor": format_rational(&p.partners_floor),
                "class_scale": format_rational(&p.class_scale),
                "block_scale": format_rational(&p.block_scale),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Audits `A2` against the `(3, 3·c1·c2·|P2|, 6)` design parameters.
///
/// `q <= 3` and `t <= 6` are checked unconditionally; the column bound and
/// the per-point partner counts only when the size inequalities hold.
pub fn audit_claim(
    config: &ColoredConfig,
    asm: &CollinearityAssembly,
    delta: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
) -> ClaimReport {
    let part = &asm.partition;
    let hypotheses = Hypotheses::check(config, part, delta, c1, c2);
    let params = audit_design(&asm.a_block(Block::P2));
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let p2 = int(part.p2.len());
    let p3 = int(part.p3.len());
    let required_k = int(3) * c1 * c2 * &p2;

    let mut partners = vec![0usize; config.num_points()];
    for line in &asm.lines {
        for &g in &line.associated {
            partners[g] += line.ell() - 1;
        }
    }
    let mut support = vec![0usize; config.num_points()];
    for t in &asm.triples {
        for &g in &t.points {
            support[g] += 1;
        }
    }
    let points: Vec<PointSupport> = part
        .p2
        .clone()
        .map(|g| {
            let color = config.color_of(g);
            let size = int(config.class(color).len());
            PointSupport {
                global: g,
                color,
                partners: partners[g],
                column_support: support[g],
                partners_floor: delta * &size - &p3,
                class_scale: c2 * &size,
                block_scale: c1 * c2 * &p2,
            }
        })
        .collect();
    let points_ok = points.iter().all(|p| {
        p.column_support == 3 * p.partners && int(p.partners) >= p.partners_floor
    });
    let q_ok = params.q <= 3;
    let t_ok = params.t <= 6;
    let k_ok = int(params.k) >= required_k;
    let verdict = if !(q_ok && t_ok) {
        Verdict::Violated
    } else if !hypotheses.hold() {
        Verdict::HypothesesFailed
    } else if k_ok && points_ok {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    ClaimReport {
        hypotheses,
        params,
        required_k,
        q_ok,
        t_ok,
        k_ok,
        points_ok,
        points,
        verdict,
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    /// Whether the check depends on the size inequalities.
    pub conditional: bool,
}

#[derive(Debug, Clone)]
pub struct Lemma31Report {
    pub claim: ClaimReport,
    pub sizes: [usize; 3],
    pub dim_p1: usize,
    pub dim_p2: usize,
    /// `12/(c1·c2)`, or `None` when a constant is not positive.
    pub slack: Option<BigRational>,
    pub rank_a2: usize,
    pub rank_m1: usize,
    pub rank_m2: usize,
    pub rank_a1m1: usize,
    pub rank_a2m2: usize,
    /// Rank bound from the audited parameters of `A2`, when `k >= 1`.
    pub audited_bound: Option<BigRational>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl Lemma31Report {
    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.name(),
            "sizes": { "p1": self.sizes[0], "p2": self.sizes[1], "p3": self.sizes[2] },
            "dim_p1": self.dim_p1,
            "dim_p2": self.dim_p2,
            "slack": self.slack.as_ref().map(format_rational),
            "slack_decimal": self.slack.as_ref().map(decimal),
            "rank_a2": self.rank_a2,
            "rank_m1": self.rank_m1,
            "rank_m2": self.rank_m2,
            "rank_a1m1": self.rank_a1m1,
            "rank_a2m2": self.rank_a2m2,
            "audited_bound": self.audited_bound.as_ref().map(format_rational),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "holds": c.holds, "conditional": c.conditional,
            })).collect::<Vec<_>>(),
            "claim": self.claim.to_json(),
        })
    }
}

/// Checks `dim(P2) <= dim(P1) + 12/(c1·c2)` together with the rank chain
/// that proves it, all from exact ranks.
pub fn verify_lemma31(
    config: &ColoredConfig,
    asm: &CollinearityAssembly,
    delta: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
) -> Lemma31Report {
    let part = &asm.partition;
    let claim = audit_claim(config, asm, delta, c1, c2);
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let p2 = part.p2.len();

    let a2 = asm.a_block(Block::P2);
    let rank_a2 = exact_rank(&a2);
    let rank_m1 = exact_rank(&asm.m_block(Block::P1));
    let rank_m2 = exact_rank(&asm.m_block(Block::P2));
    let rank_a1m1 = exact_rank(&asm.block_product(Block::P1));
    let rank_a2m2 = exact_rank(&asm.block_product(Block::P2));
    let slack = claim
        .hypotheses
        .positive
        .then(|| int(12) / (c1 * c2));
    let audited_bound = rank_bound(p2, claim.params).ok();

    let mut checks = vec![
        Check {
            name: "rank(A2M2) = rank(A1M1)",
            holds: rank_a2m2 == rank_a1m1,
            conditional: false,
        },
        Check {
            name: "rank(A1M1) <= rank(M1)",
            holds: rank_a1m1 <= rank_m1,
            conditional: false,
        },
        Check {
            name: "rank(A2M2) >= rank(M2) - (|P2| - rank(A2))",
            holds: rank_a2m2 + p2 >= rank_m2 + rank_a2,
            conditional: false,
        },
        Check {
            name: "rank(A2) >= audited design bound",
            holds: audited_bound.as_ref().is_none_or(|b| int(rank_a2) >= *b),
            conditional: false,
        },
    ];
    if let Some(s) = &slack {
        checks.push(Check {
            name: "rank(A2) >= |P2| - 12/(c1c2)",
            holds: int(rank_a2) >= int(p2) - s,
            conditional: true,
        });
        checks.push(Check {
            name: "dim(P2) <= dim(P1) + 12/(c1c2)",
            holds: int(rank_m2) <= int(rank_m1) + s,
            conditional: true,
        });
    }
    let unconditional_ok = checks.iter().filter(|c| !c.conditional).all(|c| c.holds);
    let conditional_ok = checks.iter().filter(|c| c.conditional).all(|c| c.holds);
    let verdict = if !unconditional_ok || claim.verdict == Verdict::Violated {
        Verdict::Violated
    } else if !claim.hypotheses.hold() {
        Verdict::HypothesesFailed
    } else if conditional_ok {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    Lemma31Report {
        claim,
        sizes: [part.p1.len(), p2, part.p3.len()],
        dim_p1: rank_m1,
        dim_p2: rank_m2,
        slack,
        rank_a2,
        rank_m1,
        rank_m2,
        rank_a1m1,
        rank_a2m2,
        audited_bound,
        checks,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{config_from_ints, restrict_partition};
    use crate::metrics::{compute_delta, SingletonPolicy};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn collinear_two_color() -> ColoredConfig {
        config_from_ints(&[
            vec![vec![0, 1], vec![2, 1], vec![4, 1]],
            vec![vec![1, 1], vec![3, 1], vec![5, 1]],
        ])
        .unwrap()
    }

    #[test]
    fn general_position_has_no_extraordinary_lines() {
        let c = config_from_ints(&[vec![vec![0, 0], vec![1, 3], vec![5, 1], vec![2, 7]]]).unwrap();
        let part = restrict_partition(&c, 0, 1).unwrap();
        assert!(find_extraordinary_lines(&c, &part).is_empty());
    }

    #[test]
    fn three_collinear_in_p2() {
        let c = config_from_ints(&[vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![0, 5]]]).unwrap();
        let part = restrict_partition(&c, 0, 1).unwrap();
        let ext = find_extraordinary_lines(&c, &part);
        assert_eq!(ext.len(), 1);
        assert_eq!(ext[0].ell(), 3);
        let asm = assemble(&c, &part).unwrap();
        assert_eq!(asm.a.nrows(), 6);
        assert!(asm.a.rows().all(|r| r.len() == 3));
        assert!(asm.a.mul(&asm.m).unwrap().is_zero());
    }

    #[test]
    fn line_without_p2_is_not_extraordinary() {
        // colors sorted by size: V1 = 2 points, V2 = 1 point, V3 = 1 point
        let c = config_from_ints(&[
            vec![vec![0, 0], vec![1, 0]],
            vec![vec![7, 7]],
            vec![vec![2, 0]],
        ])
        .unwrap();
        let part = restrict_partition(&c, 1, 2).unwrap();
        assert!(find_extraordinary_lines(&c, &part).is_empty());
    }

    #[test]
    fn p3_points_are_not_associated() {
        let c = config_from_ints(&[
            vec![vec![0, 0], vec![1, 0], vec![2, 0]],
            vec![vec![3, 0], vec![4, 0]],
        ])
        .unwrap();
        let part = restrict_partition(&c, 0, 1).unwrap();
        let ext = find_extraordinary_lines(&c, &part);
        assert_eq!((ext[0].ell(), ext[0].extra.len()), (3, 2));
        let asm = assemble(&c, &part).unwrap();
        assert!(asm.a_block(Block::P3).is_zero());
        assert_eq!(asm.a_block(Block::P3).ncols(), 2);
    }

    #[test]
    fn empty_p1_gives_zero_products() {
        let c = collinear_two_color();
        let part = restrict_partition(&c, 0, 2).unwrap();
        let asm = assemble(&c, &part).unwrap();
        assert_eq!(asm.a.nrows(), 30);
        assert_eq!(exact_rank(&asm.block_product(Block::P2)), 0);
        assert_eq!(exact_rank(&asm.block_product(Block::P1)), 0);
        assert_eq!(asm.a_block(Block::P3).ncols(), 0);
    }

    #[test]
    fn claim_and_lemma_on_collinear_fixture() {
        let c = collinear_two_color();
        let delta = compute_delta(&c, SingletonPolicy::Strict).delta_star;
        assert_eq!(delta, q(2, 3));
        let part = restrict_partition(&c, 0, 2).unwrap();
        let asm = assemble(&c, &part).unwrap();
        // c1 = |V_2|/|P2| = 1/2
        let (c1, c2) = (q(1, 2), delta.clone());
        let claim = audit_claim(&c, &asm, &delta, &c1, &c2);
        assert_eq!(claim.verdict, Verdict::Holds);
        // every point lies on the single line with 6 points: 3·5 triples
        assert_eq!(claim.params, DesignParams { q: 3, k: 15, t: 6 });
        assert_eq!(claim.required_k, q(6, 1));

        let report = verify_lemma31(&c, &asm, &delta, &c1, &c2);
        assert_eq!(report.verdict, Verdict::Holds, "{:?}", report.failed_checks());
        assert_eq!(report.dim_p2, 2);
        assert_eq!(report.slack, Some(q(36, 1)));
    }

    #[test]
    fn violated_tail_inequality_fails_hypotheses() {
        let c = collinear_two_color();
        let delta = q(2, 3);
        let part = restrict_partition(&c, 0, 1).unwrap();
        let asm = assemble(&c, &part).unwrap();
        // (δ − c2)|V_1| = (2/3 − 1/2)·3 = 1/2 < |P3| = 3
        let claim = audit_claim(&c, &asm, &delta, &q(1, 1), &q(1, 2));
        assert_eq!(claim.verdict, Verdict::HypothesesFailed);
        assert!(claim.q_ok && claim.t_ok);
    }

    #[test]
    fn p2_inside_span_of_p1() {
        let c = config_from_ints(&[
            vec![vec![1, 0], vec![0, 1], vec![5, 5]],
            vec![vec![2, 0], vec![0, 2]],
        ])
        .unwrap();
        let part = restrict_partition(&c, 1, 2).unwrap();
        let asm = assemble(&c, &part).unwrap();
        let r = verify_lemma31(&c, &asm, &q(0, 1), &q(1, 1), &q(1, 1));
        assert!(r.dim_p2 <= r.dim_p1);
        assert!(r.checks.iter().filter(|c| !c.conditional).all(|c| c.holds));
    }

    #[test]
    fn delta_resolution() {
        let c = collinear_two_color();
        let p = compute_delta(&c, SingletonPolicy::Strict);
        assert_eq!(resolve_delta(&p, None).unwrap(), q(2, 3));
        assert_eq!(resolve_delta(&p, Some(&q(1, 2))).unwrap(), q(1, 2));
        assert!(resolve_delta(&p, Some(&q(3, 4))).is_err());
    }
}
