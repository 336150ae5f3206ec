//! Sampling-criteria validation and compute budgeting.
//!
//! Three Nyquist-style rules govern the acquisition: the belt step against
//! the wanted scan resolution, the element pitch against the shortest
//! wavelength and view angle, and the frequency step against the maximum
//! range. Alongside them, a per-column FLOP model of the reconstruction
//! chain turns a proposed configuration into latency and throughput numbers.

use serde::{Deserialize, Serialize};

use crate::scalar::{real, Scalar, C_MM_PER_S};

/// Proposed sampling configuration. Lengths in mm, frequency step in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan<T> {
    /// Belt sampling step (mm).
    pub delta_x: T,
    /// Element pitch (mm).
    pub delta_y: T,
    /// Frequency step (MHz).
    pub delta_f_mhz: T,
    /// Target scan-direction resolution (mm).
    pub min_x_resolution: T,
    /// Shortest wavelength in the band (mm).
    pub lambda_min: T,
    /// Array height (mm).
    pub array_height: T,
    /// Imaging-domain height (mm).
    pub domain_height: T,
    /// Standoff distance to the target region (mm).
    pub standoff: T,
    /// Maximum imaging range (mm).
    pub r_max: T,
}

/// Outcome of one sampling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    /// Violated by a small engineering margin (up to 5% over the limit).
    Warn,
    Fail,
}

/// One evaluated criterion: the limit the actual value was held against and
/// the fractional margin (positive = headroom, negative = over the limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult<T> {
    pub actual: T,
    pub limit: T,
    pub margin: T,
    pub verdict: Verdict,
}

impl<T: Scalar> CriterionResult<T> {
    /// Compare `actual <= limit`, allowing `Warn` within the grace fraction.
    fn check(actual: T, limit: T, grace: T) -> Self {
        let margin = (limit - actual) / limit;
        let verdict = if actual <= limit {
            Verdict::Pass
        } else if actual <= limit * (T::one() + grace) {
            Verdict::Warn
        } else {
            Verdict::Fail
        };
        Self {
            actual,
            limit,
            margin,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Full sampling report: one entry per rule, plus the practical pitch rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingReport<T> {
    /// Belt step rule: `dx <= 0.5 * min x resolution`.
    pub x_rule: CriterionResult<T>,
    /// Angular pitch rule: `dy <= lambda_min / (4 sin(theta_max))`.
    pub y_rule_strict: CriterionResult<T>,
    /// Practical pitch rule: `dy <= lambda_min / 2` with a 5% grace band,
    /// reflecting that element beamwidth limits the usable view angle.
    pub y_rule_practical: CriterionResult<T>,
    /// Frequency step rule: `df <= c / (2 R_max)`.
    pub f_rule: CriterionResult<T>,
}

impl<T: Scalar> SamplingReport<T> {
    /// Overall verdict: hard rules must pass; the pitch may ride the
    /// practical rule's grace band.
    pub fn acceptable(&self) -> bool {
        self.x_rule.passed()
            && self.f_rule.passed()
            && (self.y_rule_strict.passed() || self.y_rule_practical.verdict != Verdict::Fail)
    }
}

/// Fraction over the limit tolerated as a warning by the practical pitch
/// rule (the prototype runs 4% over and images fine).
const PITCH_GRACE: f64 = 0.05;

/// Evaluate the three sampling criteria with margins.
pub fn validate_sampling<T: Scalar>(plan: &SamplingPlan<T>) -> SamplingReport<T> {
    let zero_grace = T::zero();
    let half = real::<T>(0.5);

    let x_rule = CriterionResult::check(plan.delta_x, half * plan.min_x_resolution, zero_grace);

    // sin of the steepest array-to-domain view angle.
    let half_extent = (plan.array_height + plan.domain_height) / real::<T>(2.0);
    let sin_theta =
        half_extent / (half_extent * half_extent + plan.standoff * plan.standoff).sqrt();
    let strict_limit = plan.lambda_min / (real::<T>(4.0) * sin_theta);
    let y_rule_strict = CriterionResult::check(plan.delta_y, strict_limit, zero_grace);

    let y_rule_practical =
        CriterionResult::check(plan.delta_y, half * plan.lambda_min, real(PITCH_GRACE));

    // c / (2 R_max), expressed in MHz.
    let f_limit = real::<T>(C_MM_PER_S / 1e6) / (real::<T>(2.0) * plan.r_max);
    let f_rule = CriterionResult::check(plan.delta_f_mhz, f_limit, zero_grace);

    SamplingReport {
        x_rule,
        y_rule_strict,
        y_rule_practical,
        f_rule,
    }
}

/// One stage of the per-column cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCost<T> {
    pub name: String,
    pub multiplications: T,
    pub additions: T,
}

/// Per-column FLOP accounting of the reconstruction chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport<T> {
    pub n_y: usize,
    pub n_f: usize,
    pub n_z: usize,
    pub stages: Vec<StageCost<T>>,
    pub total_multiplications: T,
    pub total_additions: T,
    /// Stage-sum total (multiplications + additions).
    pub total_flops: T,
    /// Closed-form total `N_y [17 N_f + 7 N_z + 5 N_f log2(N_y^2 N_f)]`.
    pub closed_form_flops: T,
}

/// Count per-column FLOPs stage by stage.
///
/// Counts assume a complex multiply is 4 real multiplications and 2 real
/// additions, an FFT of length N costs `2 N log2 N` mults and `3 N log2 N`
/// adds, and the Stolt step interpolates each sample linearly. The stage sum
/// reproduces the closed form exactly.
pub fn flop_cost<T: Scalar>(n_y: usize, n_f: usize, n_z: usize) -> CostReport<T> {
    assert!(n_y >= 1 && n_f >= 1 && n_z >= 1, "counts must be positive");
    let ny = real::<T>(n_y as f64);
    let nf = real::<T>(n_f as f64);
    let nz = real::<T>(n_z as f64);
    let log2_ny = real::<T>((n_y as f64).log2());
    let log2_nf = real::<T>((n_f as f64).log2());

    let c = |v: f64| real::<T>(v);
    let stages = vec![
        StageCost {
            name: "element-axis FFT".into(),
            multiplications: c(2.0) * nf * ny * log2_ny,
            additions: c(3.0) * nf * ny * log2_ny,
        },
        StageCost {
            name: "reference-depth phase multiply".into(),
            multiplications: c(4.0) * nf * ny,
            additions: c(2.0) * nf * ny,
        },
        StageCost {
            name: "Stolt interpolation".into(),
            multiplications: c(6.0) * nf * ny,
            additions: c(5.0) * nf * ny,
        },
        StageCost {
            name: "element-axis IFFT".into(),
            multiplications: c(2.0) * nf * ny * log2_ny,
            additions: c(3.0) * nf * ny * log2_ny,
        },
        StageCost {
            name: "depth-axis FFT".into(),
            multiplications: c(2.0) * ny * nf * log2_nf,
            additions: c(3.0) * ny * nf * log2_nf,
        },
        StageCost {
            name: "amplitude post-factor multiply".into(),
            multiplications: c(4.0) * nz * ny,
            additions: c(2.0) * nz * ny,
        },
        StageCost {
            name: "conjugation".into(),
            multiplications: T::zero(),
            additions: nz * ny,
        },
    ];

    let total_multiplications = stages
        .iter()
        .fold(T::zero(), |acc, s| acc + s.multiplications);
    let total_additions = stages.iter().fold(T::zero(), |acc, s| acc + s.additions);
    let total_flops = total_multiplications + total_additions;

    let closed_form_flops = ny
        * (c(17.0) * nf
            + c(7.0) * nz
            + c(5.0) * nf * real::<T>((n_y as f64 * n_y as f64 * n_f as f64).log2()));

    CostReport {
        n_y,
        n_f,
        n_z,
        stages,
        total_multiplications,
        total_additions,
        total_flops,
        closed_form_flops,
    }
}

/// Real-time assessment of a cost report against the belt motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBudget<T> {
    /// Time to reconstruct one column at the given compute rate (s).
    pub per_column_seconds: T,
    /// Time between adjacent belt samples (s).
    pub inter_column_seconds: T,
    /// True when the column finishes before the next sample arrives.
    pub real_time: bool,
}

/// Compare per-column compute time against the inter-sample interval.
pub fn latency_budget<T: Scalar>(
    report: &CostReport<T>,
    compute_rate_flops: T,
    belt_speed_mm_s: T,
    delta_x: T,
) -> LatencyBudget<T> {
    let per_column_seconds = report.total_flops / compute_rate_flops;
    let inter_column_seconds = delta_x / belt_speed_mm_s;
    LatencyBudget {
        per_column_seconds,
        inter_column_seconds,
        real_time: per_column_seconds <= inter_column_seconds,
    }
}

/// Screening throughput in people per hour for a belt speed (mm/s) and
/// spacing between subjects (mm).
pub fn throughput<T: Scalar>(belt_speed_mm_s: T, target_spacing_mm: T) -> T {
    real::<T>(3600.0) * belt_speed_mm_s / target_spacing_mm
}
