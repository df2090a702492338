//! Where a problem comes from: a saved file or an inline family spec.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use opscale::instances::ProblemFile;
use opscale::{
    frame_instance, hilbert_instance, load_problem_file, FrameSpec, ProblemMeta, ScalingProblem,
    Seed,
};
use serde_json::json;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Hilbert,
    Frame,
    FrameExtreme,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hilbert => "hilbert",
            Family::Frame => "frame",
            Family::FrameExtreme => "frame-extreme",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        [Family::Hilbert, Family::Frame, Family::FrameExtreme]
            .into_iter()
            .find(|f| f.name() == name)
    }

    /// SOR activation iteration and iteration cap used by the experiments.
    pub fn defaults(self) -> RunDefaults {
        match self {
            Family::Hilbert => RunDefaults {
                activation: 5,
                max_iters: 100,
            },
            Family::Frame | Family::FrameExtreme => RunDefaults {
                activation: 20,
                max_iters: 200,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunDefaults {
    pub activation: usize,
    pub max_iters: usize,
}

/// Family parameters. Unset values take the experiment defaults: Hilbert
/// `n=5, k=7`; frame `n=50, k=55`; extreme frame `n=50, k=52`; `kappa=1e7`.
#[derive(Args, Clone, Debug, Default)]
pub struct FamilyParams {
    /// Matrix size (Hilbert) or vector dimension (frame).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of matrices (Hilbert) or vectors (frame).
    #[arg(long)]
    pub k: Option<usize>,
    /// Condition parameter of the frame generator.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Replace the first frame vector by e_1.
    #[arg(long)]
    pub extreme: bool,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// A problem ready to solve, with the metadata written alongside it.
pub struct Resolved {
    pub problem: ScalingProblem,
    pub meta: ProblemMeta,
    pub defaults: RunDefaults,
}

pub fn generate(family: Family, params: &FamilyParams) -> CliResult<Resolved> {
    let family = if params.extreme {
        Family::FrameExtreme
    } else {
        family
    };
    let seed = Seed(params.seed);
    let (problem, spec) = match family {
        Family::Hilbert => {
            if params.kappa.is_some() {
                return Err(CliError::usage("--kappa only applies to frame families"));
            }
            let (n, k) = (params.n.unwrap_or(5), params.k.unwrap_or(7));
            if n == 0 || k == 0 {
                return Err(CliError::usage("hilbert instances need n >= 1 and k >= 1"));
            }
            (hilbert_instance(n, k, seed)?, json!({"n": n, "k": k}))
        }
        Family::Frame | Family::FrameExtreme => {
            let extreme = family == Family::FrameExtreme;
            let spec = FrameSpec {
                n: params.n.unwrap_or(50),
                k: params.k.unwrap_or(if extreme { 52 } else { 55 }),
                kappa: params.kappa.unwrap_or(1e7),
                extreme,
            };
            spec.validate()?;
            let instance = frame_instance(&spec, seed)?;
            (
                instance.problem,
                serde_json::to_value(spec).expect("plain struct serializes"),
            )
        }
    };
    Ok(Resolved {
        problem,
        meta: ProblemMeta {
            family: family.name().into(),
            seed: params.seed.to_string(),
            spec,
        },
        defaults: family.defaults(),
    })
}

/// Problem source shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct Source {
    /// Problem file written by `gen`.
    #[arg(long, conflicts_with = "family")]
    pub instance: Option<PathBuf>,
    /// Generate the problem in memory instead of loading it.
    #[arg(long, value_enum, required_unless_present = "instance")]
    pub family: Option<Family>,
    #[command(flatten)]
    pub params: FamilyParams,
}

impl Source {
    pub fn resolve(&self) -> CliResult<Resolved> {
        match (&self.instance, self.family) {
            (Some(path), _) => {
                let ProblemFile { problem, meta } =
                    load_problem_file(path).map_err(|e| CliError::file(path, e))?;
                // Files of unknown provenance get the Hilbert defaults.
                let defaults = Family::from_name(&meta.family)
                    .unwrap_or(Family::Hilbert)
                    .defaults();
                Ok(Resolved {
                    problem,
                    meta,
                    defaults,
                })
            }
            (None, Some(family)) => generate(family, &self.params),
            (None, None) => Err(CliError::usage("pass --instance or --family")),
        }
    }
}
