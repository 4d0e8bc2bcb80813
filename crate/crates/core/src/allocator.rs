//! Bandwidth policies for the two-link uplink.
//!
//! The proposed policy works in two stages. First it picks the highest
//! threshold on the deadline curve whose minimum bandwidths fit the budget.
//! Then it spends the leftover budget moving toward the next (stricter)
//! deadline point, splitting it in proportion to how much extra bandwidth each
//! link would need to get there.
//!
//! Two baselines ignore the quality surface: a rate-proportional split and the
//! split that minimizes the sum of both transmission times.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::channel::{required_bandwidth, transmission_time, LinkPair, LinkSpec};
use crate::deadline::{deadline_curve, DeadlineCurve, DeadlinePoint};
use crate::error::{Error, Result};
use crate::surface::QualitySurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Policy {
    Benchmark1,
    Benchmark2,
    Proposed { k: usize },
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Benchmark1 => f.write_str("benchmark1"),
            Policy::Benchmark2 => f.write_str("benchmark2"),
            Policy::Proposed { k } => write!(f, "proposed_k{k}"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "benchmark1" => Ok(Policy::Benchmark1),
            "benchmark2" => Ok(Policy::Benchmark2),
            _ => s
                .strip_prefix("proposed_k")
                .and_then(|k| k.parse().ok())
                .map(|k| Policy::Proposed { k })
                .ok_or_else(|| Error::domain(format!("unknown policy {s:?}"))),
        }
    }
}

impl Serialize for Policy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How benchmark 1 reads "maximize throughput".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThroughputRule {
    /// Bandwidth proportional to each link's spectral efficiency.
    #[default]
    RateProportional,
    /// Everything on the link with the better spectral efficiency.
    BestChannel,
}

/// How benchmark 2 reads "minimize total transmission time".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayObjective {
    /// Minimize `t_s + t_l`.
    #[default]
    Sum,
    /// Minimize `max(t_s, t_l)`.
    Makespan,
}

/// Treatment of a negative leftover weight, which appears when the next
/// deadline point sits on the other arm of the contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeftoverRule {
    /// Clamp negative weights to zero; no link drops below its threshold
    /// minimum.
    #[default]
    NonNegative,
    /// Use the signed weights as they are. The allocation then moves
    /// continuously onto the next deadline point as the budget grows, but one
    /// link may fall below its minimum.
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthPair {
    pub mask: f64,
    pub text: f64,
}

impl BandwidthPair {
    pub fn total(&self) -> f64 {
        self.mask + self.text
    }
}

/// Achieved quality of an evaluated allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Achieved {
    pub psnr: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation {
    pub policy: Policy,
    #[serde(rename = "B_s")]
    pub bandwidth_s: f64,
    #[serde(rename = "B_l")]
    pub bandwidth_l: f64,
    /// Mask delay in seconds; infinite when the link gets no bandwidth.
    pub t_s: f64,
    pub t_l: f64,
    pub eps_star: Option<f64>,
    pub achieved: Option<Achieved>,
}

impl Allocation {
    fn new(policy: Policy, bw: BandwidthPair, links: &LinkPair, eps_star: Option<f64>) -> Self {
        Self {
            policy,
            bandwidth_s: bw.mask,
            bandwidth_l: bw.text,
            t_s: delay_or_never(&links.mask, bw.mask),
            t_l: delay_or_never(&links.text, bw.text),
            eps_star,
            achieved: None,
        }
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.bandwidth_s + self.bandwidth_l
    }

    /// Normalized quality, or NaN before evaluation.
    pub fn q(&self) -> f64 {
        self.achieved.map_or(f64::NAN, |a| a.q)
    }

    pub fn psnr(&self) -> f64 {
        self.achieved.map_or(f64::NAN, |a| a.psnr)
    }
}

fn delay_or_never(link: &LinkSpec, bandwidth: f64) -> f64 {
    transmission_time(link, bandwidth).unwrap_or(f64::INFINITY)
}

fn check_budget(b_total: f64) -> Result<()> {
    if !(b_total.is_finite() && b_total > 0.0) {
        return Err(Error::domain(format!(
            "bandwidth budget must be positive, got {b_total}"
        )));
    }
    Ok(())
}

/// Smallest per-link bandwidths meeting a deadline point. `None` means a zero
/// delay coordinate, which no finite budget satisfies.
pub fn min_bandwidths(point: &DeadlinePoint, links: &LinkPair) -> Option<BandwidthPair> {
    let mask = required_bandwidth(&links.mask, point.t_s).ok()?;
    let text = required_bandwidth(&links.text, point.t_l).ok()?;
    Some(BandwidthPair { mask, text })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P2Outcome {
    /// Highest threshold whose minimum bandwidths fit the budget.
    Feasible {
        index: usize,
        eps_star: f64,
        base: BandwidthPair,
    },
    /// Even the loosest threshold does not fit.
    Fallback,
}

/// Scans thresholds from strictest to loosest and stops at the first one
/// whose minimum bandwidths sum to at most `b_total`.
pub fn solve_p2(curve: &DeadlineCurve, links: &LinkPair, b_total: f64) -> P2Outcome {
    curve
        .thresholds
        .iter()
        .enumerate()
        .rev()
        .find_map(|(index, th)| {
            let base = min_bandwidths(th.point.as_ref()?, links)?;
            (base.total() <= b_total).then_some(P2Outcome::Feasible {
                index,
                eps_star: th.epsilon,
                base,
            })
        })
        .unwrap_or(P2Outcome::Fallback)
}

/// Leftover split weights toward the next stricter threshold.
///
/// Each weight is the extra bandwidth a link needs to move from the current
/// deadline to the next one. When the next point is missing, needs infinite
/// bandwidth, or the weights sum to zero, the leftover follows the base
/// allocation instead, which shrinks both delays by the same factor.
pub fn leftover_weights(
    curve: &DeadlineCurve,
    index: usize,
    base: BandwidthPair,
    links: &LinkPair,
    rule: LeftoverRule,
) -> BandwidthPair {
    let next = curve
        .thresholds
        .get(index + 1)
        .and_then(|th| th.point.as_ref())
        .and_then(|p| min_bandwidths(p, links));
    if let Some(next) = next {
        let floor = match rule {
            LeftoverRule::NonNegative => 0.0,
            LeftoverRule::Signed => f64::NEG_INFINITY,
        };
        let alpha = BandwidthPair {
            mask: (next.mask - base.mask).max(floor),
            text: (next.text - base.text).max(floor),
        };
        if alpha.total() > 0.0 && alpha.total().is_finite() {
            return alpha;
        }
    }
    base
}

/// Spends the budget left after the threshold `eps_star` along the curve.
/// The returned allocation has delays set but is not yet evaluated.
pub fn solve_p3(
    curve: &DeadlineCurve,
    eps_star: Option<f64>,
    links: &LinkPair,
    b_total: f64,
) -> Result<Allocation> {
    solve_p3_with(curve, eps_star, links, b_total, LeftoverRule::default())
}

pub fn solve_p3_with(
    curve: &DeadlineCurve,
    eps_star: Option<f64>,
    links: &LinkPair,
    b_total: f64,
    rule: LeftoverRule,
) -> Result<Allocation> {
    let eps_star =
        eps_star.ok_or_else(|| Error::Contract("P3 needs a threshold from P2".into()))?;
    let (index, point) = curve
        .thresholds
        .iter()
        .enumerate()
        .find_map(|(i, th)| (th.epsilon == eps_star).then_some((i, th.point)))
        .ok_or_else(|| Error::Contract(format!("threshold {eps_star} is not on the curve")))?;
    let point =
        point.ok_or_else(|| Error::Contract(format!("threshold {eps_star} is unachievable")))?;
    let base = min_bandwidths(&point, links)
        .ok_or_else(|| Error::Contract(format!("threshold {eps_star} needs infinite bandwidth")))?;
    if base.total() > b_total * (1.0 + 1e-12) {
        return Err(Error::Contract(format!(
            "budget {b_total} is below the minimum {} for threshold {eps_star}",
            base.total()
        )));
    }
    let leftover = (b_total - base.total()).max(0.0);
    let weights = leftover_weights(curve, index, base, links, rule);
    let share = leftover * weights.mask / weights.total();
    let mask = base.mask + share;
    // the text link takes the exact remainder so the budget is met exactly
    let text = b_total - mask;
    let bw = match rule {
        LeftoverRule::NonNegative => BandwidthPair {
            mask,
            text: text.max(base.text),
        },
        LeftoverRule::Signed => BandwidthPair {
            mask: mask.max(0.0),
            text: text.max(0.0),
        },
    };
    Ok(Allocation::new(
        Policy::Proposed { k: curve.len() },
        bw,
        links,
        Some(eps_star),
    ))
}

/// Fills delays and achieved quality from the surface. Zero bandwidth means
/// the payload never arrives.
pub fn evaluate_allocation(
    alloc: &Allocation,
    links: &LinkPair,
    surface: &QualitySurface,
) -> Result<Allocation> {
    if alloc.bandwidth_s < 0.0 || alloc.bandwidth_l < 0.0 {
        return Err(Error::domain("bandwidths must be non-negative"));
    }
    let t_s = delay_or_never(&links.mask, alloc.bandwidth_s);
    let t_l = delay_or_never(&links.text, alloc.bandwidth_l);
    let (psnr, q) = surface.evaluate(t_s, t_l)?;
    Ok(Allocation {
        t_s,
        t_l,
        achieved: Some(Achieved { psnr, q }),
        ..*alloc
    })
}

/// Proposed policy with a precomputed curve. Falls back to benchmark 2 (sum
/// of delays) when the loosest threshold does not fit the budget.
pub fn allocate_with_curve(
    surface: &QualitySurface,
    curve: &DeadlineCurve,
    links: &LinkPair,
    b_total: f64,
) -> Result<Allocation> {
    check_budget(b_total)?;
    let policy = Policy::Proposed { k: curve.len() };
    let alloc = match solve_p2(curve, links, b_total) {
        P2Outcome::Feasible { eps_star, .. } => solve_p3(curve, Some(eps_star), links, b_total)?,
        P2Outcome::Fallback => Allocation {
            policy,
            eps_star: None,
            ..allocate_benchmark2(links, b_total)?
        },
    };
    evaluate_allocation(&alloc, links, surface)
}

/// Deadline curve, threshold selection and leftover split in one call.
pub fn allocate_proposed(
    surface: &QualitySurface,
    links: &LinkPair,
    b_total: f64,
    k: usize,
    eps_th: f64,
) -> Result<Allocation> {
    let curve = deadline_curve(surface, eps_th, k)?;
    allocate_with_curve(surface, &curve, links, b_total)
}

/// Rate-proportional split (throughput baseline).
pub fn allocate_benchmark1(links: &LinkPair, b_total: f64) -> Result<Allocation> {
    allocate_benchmark1_with(links, b_total, ThroughputRule::default())
}

pub fn allocate_benchmark1_with(
    links: &LinkPair,
    b_total: f64,
    rule: ThroughputRule,
) -> Result<Allocation> {
    check_budget(b_total)?;
    let r_s = links.mask.spectral_efficiency();
    let r_l = links.text.spectral_efficiency();
    let mask = match rule {
        ThroughputRule::RateProportional => b_total * r_s / (r_s + r_l),
        ThroughputRule::BestChannel if r_s > r_l => b_total,
        ThroughputRule::BestChannel if r_s < r_l => 0.0,
        ThroughputRule::BestChannel => b_total / 2.0,
    };
    let bw = BandwidthPair {
        mask,
        text: b_total - mask,
    };
    Ok(Allocation::new(Policy::Benchmark1, bw, links, None))
}

/// Split minimizing the sum of both transmission times:
/// `B_i ∝ sqrt(D_i / r_i)`.
pub fn allocate_benchmark2(links: &LinkPair, b_total: f64) -> Result<Allocation> {
    allocate_benchmark2_with(links, b_total, DelayObjective::default())
}

pub fn allocate_benchmark2_with(
    links: &LinkPair,
    b_total: f64,
    objective: DelayObjective,
) -> Result<Allocation> {
    check_budget(b_total)?;
    let (w_s, w_l) = match objective {
        DelayObjective::Sum => (
            links.mask.bit_hertz_seconds().sqrt(),
            links.text.bit_hertz_seconds().sqrt(),
        ),
        // equal delays
        DelayObjective::Makespan => (
            links.mask.bit_hertz_seconds(),
            links.text.bit_hertz_seconds(),
        ),
    };
    let mask = b_total * w_s / (w_s + w_l);
    let bw = BandwidthPair {
        mask,
        text: b_total - mask,
    };
    Ok(Allocation::new(Policy::Benchmark2, bw, links, None))
}

/// Runs `policy` end to end and evaluates the result.
pub fn allocate(
    policy: Policy,
    surface: &QualitySurface,
    links: &LinkPair,
    b_total: f64,
    eps_th: f64,
) -> Result<Allocation> {
    match policy {
        Policy::Benchmark1 => {
            evaluate_allocation(&allocate_benchmark1(links, b_total)?, links, surface)
        }
        Policy::Benchmark2 => {
            evaluate_allocation(&allocate_benchmark2(links, b_total)?, links, surface)
        }
        Policy::Proposed { k } => allocate_proposed(surface, links, b_total, k, eps_th),
    }
}
