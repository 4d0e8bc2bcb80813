//! Monte Carlo sweep over bandwidth budgets.
//!
//! Every trial draws both channel gains from its own generator, seeded by
//! mixing the base seed with the trial index, so a trial's records do not
//! depend on which other trials run or in which order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocator::{
    allocate_benchmark1, allocate_benchmark2, allocate_with_curve, evaluate_allocation, Allocation,
    Policy,
};
use crate::channel::{sample_gain, FadingModel, LinkPair, LinkSpec, BITS_PER_KB};
use crate::deadline::{deadline_curve, DeadlineCurve};
use crate::error::{Error, Result};
use crate::surface::{ParametricParams, QualitySurface};
use crate::toy_diffusion::ToyDiffusionConfig;

/// Where the quality surface comes from. Serialized as `toy`,
/// `parametric` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SurfaceSource {
    #[default]
    Toy,
    Parametric,
    File(PathBuf),
}

impl fmt::Display for SurfaceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSource::Toy => f.write_str("toy"),
            SurfaceSource::Parametric => f.write_str("parametric"),
            SurfaceSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for SurfaceSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(SurfaceSource::Toy),
            "parametric" => Ok(SurfaceSource::Parametric),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(SurfaceSource::File(PathBuf::from(p))),
                _ => Err(Error::Validation(format!(
                    "surface_source must be toy, parametric or file:<path>, got {s:?}"
                ))),
            },
        }
    }
}

impl TryFrom<String> for SurfaceSource {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SurfaceSource> for String {
    fn from(s: SurfaceSource) -> Self {
        s.to_string()
    }
}

/// Payload sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payloads {
    pub mask_bits: u64,
    pub text_bits: u64,
}

impl Default for Payloads {
    /// 4 KB mask, 1 KB text.
    fn default() -> Self {
        Self {
            mask_bits: 4 * BITS_PER_KB,
            text_bits: BITS_PER_KB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Total bandwidth budgets in Hz.
    pub bandwidth_sweep: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub fading: FadingModel,
    /// Multiplies the sampled gain to give the linear SNR.
    pub power_over_noise: f64,
    pub links: Payloads,
    /// One proposed policy per entry.
    pub k_values: Vec<usize>,
    pub eps_th: f64,
    pub surface_source: SurfaceSource,
    pub toy: ToyDiffusionConfig,
    pub parametric: ParametricParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            bandwidth_sweep: vec![1e5, 2e5, 3e5, 4e5, 5e5],
            trials: 200,
            base_seed: 2024,
            fading: FadingModel::default(),
            power_over_noise: 2.0,
            links: Payloads::default(),
            k_values: vec![4, 20],
            eps_th: 0.65,
            surface_source: SurfaceSource::Toy,
            toy: ToyDiffusionConfig::default(),
            parametric: ParametricParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.bandwidth_sweep.is_empty()
            || self
                .bandwidth_sweep
                .iter()
                .any(|b| !(b.is_finite() && *b > 0.0))
        {
            return fail("bandwidth_sweep must be non-empty with positive entries".into());
        }
        if !(0.0..1.0).contains(&self.eps_th) {
            return fail(format!("eps_th must lie in [0, 1), got {}", self.eps_th));
        }
        if self.k_values.iter().any(|&k| k < 2) {
            return fail("every K must be at least 2".into());
        }
        if !(self.power_over_noise.is_finite() && self.power_over_noise > 0.0) {
            return fail("power_over_noise must be positive".into());
        }
        if self.links.mask_bits == 0 || self.links.text_bits == 0 {
            return fail("payload sizes must be at least one bit".into());
        }
        self.fading
            .validate()
            .map_err(|e| Error::Validation(e.to_string()))?;
        self.toy
            .validate()
            .map_err(|e| Error::Validation(e.to_string()))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Policies in output order.
    pub fn policies(&self) -> Vec<Policy> {
        let mut p = vec![Policy::Benchmark1, Policy::Benchmark2];
        p.extend(self.k_values.iter().map(|&k| Policy::Proposed { k }));
        p.sort();
        p.dedup();
        p
    }

    pub fn build_surface(&self) -> Result<QualitySurface> {
        match &self.surface_source {
            SurfaceSource::Toy => QualitySurface::from_toy(&self.toy),
            SurfaceSource::Parametric => QualitySurface::from_parametric(&self.parametric),
            SurfaceSource::File(path) => QualitySurface::load(path),
        }
    }
}

/// SplitMix64 finalizer applied to `base_seed + (trial + 1) * golden gamma`.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    let mut z = base_seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Linear SNRs `(gamma_s, gamma_l)` of one trial.
pub fn trial_channels(cfg: &SimConfig, trial: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.base_seed, trial));
    let g_s = sample_gain(&mut rng, &cfg.fading);
    let g_l = sample_gain(&mut rng, &cfg.fading);
    (cfg.power_over_noise * g_s, cfg.power_over_noise * g_l)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    #[serde(rename = "B_total")]
    pub b_total: f64,
    pub policy: Policy,
    pub gamma_s: f64,
    pub gamma_l: f64,
    #[serde(rename = "B_s")]
    pub b_s: f64,
    #[serde(rename = "B_l")]
    pub b_l: f64,
    pub t_s: f64,
    pub t_l: f64,
    pub eps_star: Option<f64>,
    pub psnr: f64,
    pub q: f64,
}

impl TrialRecord {
    fn from_allocation(trial: usize, b_total: f64, gammas: (f64, f64), a: &Allocation) -> Self {
        Self {
            trial,
            b_total,
            policy: a.policy,
            gamma_s: gammas.0,
            gamma_l: gammas.1,
            b_s: a.bandwidth_s,
            b_l: a.bandwidth_l,
            t_s: a.t_s,
            t_l: a.t_l,
            eps_star: a.eps_star,
            psnr: a.psnr(),
            q: a.q(),
        }
    }
}

fn run_trial(
    cfg: &SimConfig,
    surface: &QualitySurface,
    curves: &[DeadlineCurve],
    trial: usize,
) -> Result<Vec<TrialRecord>> {
    // extreme fades can underflow the sampled gain; keep the SNR representable
    let (g_s, g_l) = trial_channels(cfg, trial);
    let links = LinkPair::new(
        LinkSpec::new(cfg.links.mask_bits, g_s.max(f64::MIN_POSITIVE))?,
        LinkSpec::new(cfg.links.text_bits, g_l.max(f64::MIN_POSITIVE))?,
    );
    let mut out = Vec::new();
    for &b in &cfg.bandwidth_sweep {
        let mut allocs = vec![
            evaluate_allocation(&allocate_benchmark1(&links, b)?, &links, surface)?,
            evaluate_allocation(&allocate_benchmark2(&links, b)?, &links, surface)?,
        ];
        for curve in curves {
            allocs.push(allocate_with_curve(surface, curve, &links, b)?);
        }
        out.extend(
            allocs
                .iter()
                .map(|a| TrialRecord::from_allocation(trial, b, (g_s, g_l), a)),
        );
    }
    Ok(out)
}

fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        a.trial
            .cmp(&b.trial)
            .then(a.b_total.total_cmp(&b.b_total))
            .then(a.policy.cmp(&b.policy))
    });
}

/// Runs every policy for every trial and budget on a prebuilt surface.
pub fn run_sweep_on(cfg: &SimConfig, surface: &QualitySurface) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let mut ks: Vec<usize> = cfg.k_values.clone();
    ks.sort_unstable();
    ks.dedup();
    let curves = ks
        .iter()
        .map(|&k| deadline_curve(surface, cfg.eps_th, k))
        .collect::<Result<Vec<_>>>()?;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, surface, &curves, t))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Builds the configured surface (failing before any trial on a bad file)
/// and runs the sweep.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let surface = cfg.build_surface()?;
    run_sweep_on(cfg, &surface)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "B_total")]
    pub b_total: f64,
    pub policy: Policy,
    pub mean_psnr: f64,
    pub std_psnr: f64,
    pub mean_q: f64,
    pub std_q: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-(budget, policy) mean and population standard deviation.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::domain("cannot summarize an empty record set"));
    }
    let mut groups: BTreeMap<(u64, Policy), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        // total_cmp order of positive floats equals their bit order
        let g = groups.entry((r.b_total.to_bits(), r.policy)).or_default();
        g.0.push(r.psnr);
        g.1.push(r.q);
    }
    Ok(groups
        .into_iter()
        .map(|((bits, policy), (mut psnr, mut q))| {
            // sorting makes the floating-point sums independent of record order
            psnr.sort_by(f64::total_cmp);
            q.sort_by(f64::total_cmp);
            let (mean_psnr, std_psnr) = mean_std(&psnr);
            let (mean_q, std_q) = mean_std(&q);
            SummaryRow {
                b_total: f64::from_bits(bits),
                policy,
                mean_psnr,
                std_psnr,
                mean_q,
                std_q,
            }
        })
        .collect())
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<memory>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Records CSV: `trial,B_total,policy,gamma_s,gamma_l,B_s,B_l,t_s,t_l,eps_star,psnr,q`.
pub fn records_csv(records: &[TrialRecord]) -> Result<String> {
    if records.is_empty() {
        return Ok("trial,B_total,policy,gamma_s,gamma_l,B_s,B_l,t_s,t_l,eps_star,psnr,q\n".into());
    }
    to_csv(records)
}

/// Summary CSV: `B_total,policy,mean_psnr,std_psnr,mean_q,std_q`.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    to_csv(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            trials: 3,
            bandwidth_sweep: vec![2e5],
            ..Default::default()
        }
    }

    #[test]
    fn one_record_per_policy() {
        let cfg = SimConfig {
            trials: 1,
            ..small()
        };
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 4);
        let names: Vec<_> = recs.iter().map(|r| r.policy.to_string()).collect();
        assert_eq!(
            names,
            ["benchmark1", "benchmark2", "proposed_k4", "proposed_k20"]
        );
    }

    #[test]
    fn trials_do_not_interact() {
        let three = run_sweep(&small()).unwrap();
        let five = run_sweep(&SimConfig {
            trials: 5,
            ..small()
        })
        .unwrap();
        assert_eq!(&five[..three.len()], &three[..]);
    }

    #[test]
    fn summary_shapes() {
        let cfg = SimConfig {
            trials: 4,
            bandwidth_sweep: vec![1e5, 3e5],
            ..Default::default()
        };
        let recs = run_sweep(&cfg).unwrap();
        let rows = summarize(&recs).unwrap();
        assert_eq!(rows.len(), 2 * 4);
        let mut reversed = recs.clone();
        reversed.reverse();
        assert_eq!(summarize(&reversed).unwrap(), rows);
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn single_record_summary() {
        let recs = run_sweep(&SimConfig {
            trials: 1,
            ..small()
        })
        .unwrap();
        let rows = summarize(&recs[..1]).unwrap();
        assert_eq!(rows[0].mean_q, recs[0].q);
        assert_eq!(rows[0].std_q, 0.0);
    }

    #[test]
    fn surface_source_strings() {
        for s in ["toy", "parametric", "file:/tmp/x.json"] {
            assert_eq!(s.parse::<SurfaceSource>().unwrap().to_string(), s);
        }
        assert!("file:".parse::<SurfaceSource>().is_err());
    }

    #[test]
    fn missing_surface_file_fails_early() {
        let cfg = SimConfig {
            surface_source: SurfaceSource::File("/nonexistent/grid.json".into()),
            ..small()
        };
        assert!(run_sweep(&cfg).unwrap_err().is_io());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig {
            trials: 0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            eps_th: 1.0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            bandwidth_sweep: vec![0.0],
            ..small()
        }
        .validate()
        .is_err());
        assert!(SimConfig::from_json("{\"trials\": 5, \"bogus\": 1}").is_err());
        assert_eq!(SimConfig::from_json("{\"trials\": 5}").unwrap().trials, 5);
    }

    #[test]
    fn seed_mixing_is_spread() {
        assert_ne!(trial_seed(0, 0), trial_seed(0, 1));
        assert_ne!(trial_seed(0, 1), trial_seed(1, 0));
    }
}
