//! Named property suites for `nfix check`.

use nfix_core::harness::{
    check_axiom_suite, check_bounded_iff_continuous, check_bounded_sets, check_contractive_ratio,
    check_product_ball_lemma, check_reduction_suite, random_space, OperatorFamily, PropertyReport,
    ProductBallLemma,
};
use nfix_core::nnorm::AnchoredSpace;
use nfix_core::operator::OperatorSpec;
use nfix_core::{Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Axioms,
    Bounded,
    BoundedSets,
    ProductBall,
    Reduction,
    Ratio,
    All,
}

pub const SUITES: [Suite; 6] = [
    Suite::Axioms,
    Suite::Bounded,
    Suite::BoundedSets,
    Suite::ProductBall,
    Suite::Reduction,
    Suite::Ratio,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub order: usize,
}

/// Runs one named suite (or `all` of them, in [`SUITES`] order).
pub fn run_suite(suite: Suite, p: &SuiteParams) -> Result<Vec<PropertyReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, p)?);
        }
        return Ok(out);
    }
    let family = OperatorFamily::RandomKernelPreserving { dim: p.dim, order: p.order };
    Ok(match suite {
        Suite::Axioms => check_axiom_suite(p.dim, p.order, p.trials, p.seed)?,
        Suite::Bounded => vec![check_bounded_iff_continuous(&family, p.trials, p.seed)?],
        Suite::BoundedSets => vec![check_bounded_sets(&family, p.trials, p.seed)?],
        Suite::ProductBall => {
            let lemma = ProductBallLemma {
                left: random_space(p.dim, p.order, p.seed)?,
                right: random_space(p.dim, p.order, p.seed.wrapping_add(1))?,
                x0: Vector::zeros(p.dim),
                y0: Vector::basis(p.dim, 0),
                r: 0.4,
                r_prime: 0.4,
                r1: 1.0,
            };
            vec![check_product_ball_lemma(&lemma, p.trials, p.seed)?]
        }
        Suite::Reduction => vec![check_reduction_suite(p.dim, p.order, p.trials, 1e-10, p.seed)?],
        Suite::Ratio => {
            let space = AnchoredSpace::standard(p.dim, p.order)?;
            let op = OperatorSpec::builtin("saturating", &[])?;
            vec![check_contractive_ratio(&op, &space, &Vector::basis(p.dim, 0), p.trials, 1100, p.seed)?]
        }
        Suite::All => unreachable!(),
    })
}
