//! Seeded randomized campaigns: generate instances satisfying a statement's
//! hypotheses, check its conclusion numerically, and aggregate the outcome.

mod campaigns;
mod generate;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame_file::FrameSpecFile;
use crate::numerics::ToleranceConfig;

pub use generate::{
    gen_commuting_surjective, gen_k_with_range_in, gen_orthogonal_pair, gen_parseval, gen_system, Generator,
};

pub const DEFAULT_DIM_CAP: usize = 16;
pub const COUNTEREXAMPLE_CAP: usize = 10;

/// The statements a campaign can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// g-frame bounds equal the bounds of the induced vector frame.
    L2_3,
    /// K-g-frame iff `R(K) ⊆ R(T_Λ)`.
    L2_4,
    /// K-g-frame iff a K-dual Bessel family exists.
    L2_5,
    /// Douglas factorization.
    L2_6,
    /// Canonical K-dual: reconstruction, `A_opt·‖T_Θ‖² = 1`, pointwise minimality.
    T3_2,
    /// A dual on `R(K)` plus `S_Λ`-invariance of `R(K)` gives a K-g-frame.
    T3_3,
    /// Atomic for K iff K-g-frame iff a K-dual exists.
    T4_3,
    /// Atomicity is preserved by `αK₁ + βK₂` and `K₁K₂`.
    T4_4,
    /// `{ΛᵢU + ΓᵢV}` for orthogonal systems and commuting surjective `U`.
    T4_5,
    /// `{ΛᵢU}` for commuting surjective `U`.
    C4_6,
    /// Sum of orthogonal Parseval K-g-frames is 2-tight.
    C4_7,
    /// `{ΛᵢU₁ + ΓᵢU₂}` with `R(Tⱼ) ⊆ R(Uⱼ*Tⱼ)`.
    T4_8,
    /// K-g-frame iff `S_Λ ⪰ λKK*` for some `λ > 0`.
    L4_9,
    /// `{Λᵢ(I + Uⁿ)}` for positive `U`.
    T4_10,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::L2_3,
        TheoremId::L2_4,
        TheoremId::L2_5,
        TheoremId::L2_6,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T4_3,
        TheoremId::T4_4,
        TheoremId::T4_5,
        TheoremId::C4_6,
        TheoremId::C4_7,
        TheoremId::T4_8,
        TheoremId::L4_9,
        TheoremId::T4_10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::L2_3 => "L2.3",
            TheoremId::L2_4 => "L2.4",
            TheoremId::L2_5 => "L2.5",
            TheoremId::L2_6 => "L2.6",
            TheoremId::T3_2 => "T3.2",
            TheoremId::T3_3 => "T3.3",
            TheoremId::T4_3 => "T4.3",
            TheoremId::T4_4 => "T4.4",
            TheoremId::T4_5 => "T4.5",
            TheoremId::C4_6 => "C4.6",
            TheoremId::C4_7 => "C4.7",
            TheoremId::T4_8 => "T4.8",
            TheoremId::L4_9 => "L4.9",
            TheoremId::T4_10 => "T4.10",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inclusive ranges for the ambient dimension `n`, the block count `N` and each block dimension `mᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimRanges {
    pub n: RangeInclusive<usize>,
    pub blocks: RangeInclusive<usize>,
    pub m: RangeInclusive<usize>,
}

impl Default for DimRanges {
    fn default() -> Self {
        Self {
            n: 1..=6,
            blocks: 1..=4,
            m: 1..=3,
        }
    }
}

impl DimRanges {
    pub fn validate(&self, cap: usize) -> Result<()> {
        for (name, r) in [("n", &self.n), ("blocks", &self.blocks), ("m", &self.m)] {
            if r.is_empty() || *r.start() == 0 {
                return Err(Error::InvalidInput(format!(
                    "dimension range {name}={}..{} must be nonempty and start at 1 or more",
                    r.start(),
                    r.end()
                )));
            }
        }
        if *self.n.end() > cap {
            return Err(Error::InvalidInput(format!(
                "n up to {} exceeds the dimension cap {cap}",
                self.n.end()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DimRanges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={}..{},blocks={}..{},m={}..{}",
            self.n.start(),
            self.n.end(),
            self.blocks.start(),
            self.blocks.end(),
            self.m.start(),
            self.m.end()
        )
    }
}

impl FromStr for DimRanges {
    type Err = Error;

    /// `n=2..8,blocks=1..4,m=1..3`; keys may be omitted, a single number is a
    /// one-point range, and a bare number sets `n`.
    fn from_str(s: &str) -> Result<Self> {
        fn range(text: &str) -> Result<RangeInclusive<usize>> {
            let bad = || Error::InvalidInput(format!("cannot parse dimension range `{text}`"));
            match text.split_once("..") {
                Some((a, b)) => {
                    let b = b.strip_prefix('=').unwrap_or(b);
                    Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
                }
                None => {
                    let v = text.trim().parse().map_err(|_| bad())?;
                    Ok(v..=v)
                }
            }
        }
        let mut out = DimRanges::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((key, value)) => {
                    let r = range(value)?;
                    match key.trim() {
                        "n" => out.n = r,
                        "blocks" | "N" => out.blocks = r,
                        "m" => out.m = r,
                        other => return Err(Error::InvalidInput(format!("unknown dimension key `{other}`"))),
                    }
                }
                None => out.n = range(part)?,
            }
        }
        out.validate(usize::MAX)?;
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub theorem: TheoremId,
    pub trials: usize,
    pub seed: u64,
    pub dims: DimRanges,
    pub dim_cap: usize,
    pub tol: ToleranceConfig,
}

impl CampaignSpec {
    pub fn new(theorem: TheoremId, trials: usize, seed: u64) -> Self {
        Self {
            theorem,
            trials,
            seed,
            dims: DimRanges::default(),
            dim_cap: DEFAULT_DIM_CAP,
            tol: ToleranceConfig::default(),
        }
    }

    pub fn with_dims(mut self, dims: DimRanges) -> Self {
        self.dims = dims;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("a campaign needs at least one trial".into()));
        }
        self.tol.validate()?;
        self.dims.validate(self.dim_cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    /// Seed of the trial's generator stream.
    pub seed: u64,
    pub reason: String,
    pub instance: FrameSpecFile,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SubfamilyTally {
    pub trials: usize,
    pub passes: usize,
}

/// Outcome of the K-g-frame conclusion for positive perturbations, which is
/// measured rather than required.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConclusionTally {
    /// `U` simultaneously diagonalizable with `S_Λ` and `KK*`.
    pub commuting: SubfamilyTally,
    pub generic: SubfamilyTally,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub counterexamples: Vec<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion_tally: Option<ConclusionTally>,
}

/// What a single trial reports back.
pub(crate) struct TrialOutcome {
    pub passed: bool,
    pub residual: f64,
    pub reason: String,
    pub instance: Option<FrameSpecFile>,
    /// Positive-perturbation conclusion: `(commuting subfamily, conclusion held)`.
    pub conclusion: Option<(bool, bool)>,
}

/// Runs a campaign on the global thread pool.
pub fn run_campaign(spec: &CampaignSpec) -> Result<VerificationReport> {
    spec.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|t| campaigns::run_trial(spec, t))
        .collect();
    Ok(aggregate(spec, outcomes))
}

/// Runs a campaign on a dedicated pool of `jobs` threads. The report does not depend on `jobs`.
pub fn run_campaign_with_jobs(spec: &CampaignSpec, jobs: usize) -> Result<VerificationReport> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_campaign(spec))
}

fn aggregate(spec: &CampaignSpec, outcomes: Vec<TrialOutcome>) -> VerificationReport {
    let mut report = VerificationReport {
        theorem: spec.theorem,
        trials: outcomes.len(),
        passes: 0,
        failures: 0,
        worst_residual: 0.0,
        counterexamples: Vec::new(),
        conclusion_tally: None,
    };
    let mut tally = ConclusionTally::default();
    for (t, o) in outcomes.into_iter().enumerate() {
        let seed = spec.seed ^ t as u64;
        if o.residual.is_nan() || o.residual > report.worst_residual {
            report.worst_residual = if o.residual.is_nan() { f64::INFINITY } else { o.residual };
        }
        if let Some((commuting, held)) = o.conclusion {
            let family = if commuting { &mut tally.commuting } else { &mut tally.generic };
            family.trials += 1;
            family.passes += usize::from(held);
            if !held && tally.counterexamples.len() < COUNTEREXAMPLE_CAP {
                if let Some(instance) = o.instance.clone() {
                    tally.counterexamples.push(Counterexample {
                        trial: t,
                        seed,
                        reason: format!(
                            "{} instance: perturbed family is not a K-g-frame",
                            if commuting { "commuting" } else { "generic" }
                        ),
                        instance,
                    });
                }
            }
        }
        if o.passed {
            report.passes += 1;
        } else {
            report.failures += 1;
            if report.counterexamples.len() < COUNTEREXAMPLE_CAP {
                if let Some(instance) = o.instance {
                    report.counterexamples.push(Counterexample {
                        trial: t,
                        seed,
                        reason: o.reason,
                        instance,
                    });
                }
            }
        }
    }
    if spec.theorem == TheoremId::T4_10 {
        report.conclusion_tally = Some(tally);
    }
    report
}
