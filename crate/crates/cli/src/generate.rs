//! Seeded random instances in the JSON schemas the other subcommands read.

use anyhow::{bail, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

use dirac_core::dirac_calculus::DiracMorphism;
use dirac_core::group_moment::{conjugacy_class_data, synthetic_reduction, GroupContext};
use dirac_core::orthogonal_bridge::{OrthogonalPoint, SkewPoint};
use dirac_core::random;
use dirac_core::RVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Orthogonal,
    Skew,
    DiracMorphism,
    QhamConjugacy,
    QhamReduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Su2,
    So3,
}

impl Group {
    pub fn context(self) -> GroupContext {
        match self {
            Group::Su2 => GroupContext::su2(),
            Group::So3 => GroupContext::so3(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    /// Matrix size for orthogonal / skew, source dimension for morphisms,
    /// `dim 𝔤` for reduction instances.
    pub n: usize,
    /// Target dimension for morphisms, `dim M` for reduction instances.
    pub m: Option<usize>,
    /// Scale of a skew matrix.
    pub scale: f64,
    pub group: Group,
    /// Angle of `exp(θ ξ̂)` for a conjugacy class; random when absent.
    pub theta: Option<f64>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 4,
            m: None,
            scale: 1.0,
            group: Group::Su2,
            theta: None,
        }
    }
}

pub fn generate_instance(kind: Kind, seed: u64, p: &GenParams) -> Result<Value> {
    let mut rng = random::rng(seed);
    let n = p.n;
    Ok(match kind {
        Kind::Orthogonal => serde_json::to_value(OrthogonalPoint::new(random::orthogonal(&mut rng, n))?)?,
        Kind::Skew => serde_json::to_value(SkewPoint::new(random::skew(&mut rng, n, p.scale))?)?,
        Kind::DiracMorphism => {
            let target = p.m.unwrap_or(n);
            let m = DiracMorphism::new(random::gaussian(&mut rng, target, n), random::skew(&mut rng, n, p.scale))?;
            serde_json::to_value(m)?
        }
        Kind::QhamConjugacy => {
            let ctx = p.group.context();
            let g = match p.theta {
                Some(theta) => {
                    let xi = random::gaussian(&mut rng, ctx.lie_dim(), 1).column(0).into_owned();
                    let unit: RVec = &xi / xi.norm();
                    ctx.exp(&(unit * theta))
                }
                None => ctx.random_element(&mut rng, 1.0),
            };
            serde_json::to_value(conjugacy_class_data(&ctx, &g)?)?
        }
        Kind::QhamReduction => {
            let dim_m = p.m.unwrap_or(2 * n + 2);
            if n == 0 || dim_m < 2 * n || (dim_m - 2 * n) % 2 != 0 {
                bail!("reduction instances need n ≥ 1 and m = r + 2n with r even (m = {dim_m}, n = {n})");
            }
            let s = synthetic_reduction(&mut rng, dim_m - 2 * n, n, true)?;
            // Ground truth travels with the instance.
            let mut v = serde_json::to_value(&s)?;
            json!({
                "instance": v["instance"].take(),
                "truth": { "omega_red": v["omega_red"].take(), "scramble": v["scramble"].take() },
            })
        }
    })
}
