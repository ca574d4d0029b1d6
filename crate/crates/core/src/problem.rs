//! `L_{n,δ}(x₀)`: the largest `M_n(x₀, E)` over sets of measure `2 - 2δ`,
//! searched over the Remez configuration and the one-gap sets `E(α, δ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{acosh_accurate, ln_cheb_t, remez_argument};
use crate::envelope::{upper_envelope, EnvelopeConfig};
use crate::extremal::{extremal_value, OracleConfig};
use crate::interval_sets::{make_gap_set, random_multigap_set, CompactSet, GapParams};
use crate::search::golden_max;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub oracle: OracleConfig,
    pub envelope: EnvelopeConfig,
    /// Coarse α samples before golden-section refinement.
    pub alpha_grid: usize,
    pub alpha_tol: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            oracle: OracleConfig { compute_extension: false, ..Default::default() },
            envelope: EnvelopeConfig::default(),
            alpha_grid: 33,
            alpha_tol: 1e-6,
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        self.oracle.validate()?;
        self.envelope.validate()?;
        if self.alpha_grid < 1 || !(self.alpha_tol > 0.0) {
            return Err(Error::domain("alpha_grid must be >= 1 and alpha_tol positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Candidate {
    Remez,
    Akhiezer { alpha: f64 },
}

impl Candidate {
    pub fn label(&self) -> &'static str {
        match self {
            Candidate::Remez => "remez",
            Candidate::Akhiezer { .. } => "akhiezer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndrievskiiResult {
    pub value: f64,
    pub log_value: f64,
    pub best: Candidate,
    /// Coarse `(α, M_n)` samples.
    pub akhiezer_profile: Vec<(f64, f64)>,
    /// Other candidates within `10·value_tol` (relative) of the best.
    pub near_ties: Vec<Candidate>,
}

/// Admissible α for which `x₀` lies in the open gap of `E(α, δ)`.
fn alpha_bounds(x0: f64, delta: f64) -> Option<(f64, f64)> {
    let lo = (delta - 1.0).max(x0 - delta);
    let hi = (1.0 - delta).min(x0 + delta);
    (hi > lo).then_some((lo, hi))
}

fn log_m(alpha: f64, delta: f64, x0: f64, n: usize, cfg: &OracleConfig) -> Result<f64> {
    let e = make_gap_set(GapParams::new(alpha, delta)?)?;
    Ok(extremal_value(&e, x0, n, cfg)?.1)
}

pub fn l_n_delta(x0: f64, delta: f64, n: usize, cfg: &ProblemConfig) -> Result<AndrievskiiResult> {
    cfg.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(-1.0..=0.0).contains(&x0) {
        return Err(Error::domain(format!("x0 must lie in [-1, 0], got {x0}")));
    }
    let mut cands: Vec<(Candidate, f64)> = Vec::new();
    if x0 < -1.0 + 2.0 * delta {
        let lv = if n == 0 { 0.0 } else { ln_cheb_t(n as u32, remez_argument(delta, x0))? };
        cands.push((Candidate::Remez, lv));
    }
    let mut profile = Vec::new();
    if let Some((lo, hi)) = alpha_bounds(x0, delta) {
        let m = cfg.alpha_grid;
        let alphas: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * (i + 1) as f64 / (m + 1) as f64).collect();
        let logs = alphas
            .par_iter()
            .map(|&a| log_m(a, delta, x0, n, &cfg.oracle))
            .collect::<Result<Vec<f64>>>()?;
        profile = alphas.iter().zip(&logs).map(|(&a, &l)| (a, l.exp())).collect();
        // refine every coarse local maximum
        let peaks: Vec<usize> = (0..m)
            .filter(|&i| (i == 0 || logs[i] >= logs[i - 1]) && (i + 1 == m || logs[i] >= logs[i + 1]))
            .collect();
        let refined = peaks
            .par_iter()
            .map(|&i| {
                let a = if i == 0 { lo } else { alphas[i - 1] };
                let b = if i + 1 == m { hi } else { alphas[i + 1] };
                let (a, b) = (a + 1e-3 * cfg.alpha_tol, b - 1e-3 * cfg.alpha_tol);
                let (alpha, lv) = golden_max(|al| log_m(al, delta, x0, n, &cfg.oracle), a, b, cfg.alpha_tol)?;
                // keep the coarse sample if refinement wandered off a plateau
                Ok(if lv >= logs[i] { (alpha, lv) } else { (alphas[i], logs[i]) })
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        cands.extend(refined.into_iter().map(|(alpha, lv)| (Candidate::Akhiezer { alpha }, lv)));
    }
    let (best, log_value) = cands
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Internal(format!("no admissible configuration for x0 = {x0}, delta = {delta}")))?;
    let tie = (10.0 * cfg.oracle.value_tol).ln_1p();
    let near_ties = cands
        .iter()
        .filter(|(c, lv)| *c != best && log_value - lv <= tie)
        .map(|(c, _)| *c)
        .collect();
    Ok(AndrievskiiResult { value: log_value.exp(), log_value, best, akhiezer_profile: profile, near_ties })
}

pub const RESIDUAL_CSV_HEADER: &str = "n,L_n,log2Ln,n_phi,residual";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub n: usize,
    #[serde(rename = "L_n")]
    pub l_n: f64,
    #[serde(rename = "log2Ln")]
    pub log_2ln: f64,
    pub n_phi: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub delta: f64,
    pub x0: f64,
    pub phi: f64,
    pub entries: Vec<ResidualEntry>,
}

impl ResidualSeries {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(RESIDUAL_CSV_HEADER);
        s.push('\n');
        for e in &self.entries {
            s.push_str(&format!("{},{:e},{},{},{:e}\n", e.n, e.l_n, e.log_2ln, e.n_phi, e.residual));
        }
        s
    }

    /// Least-squares slope of `r_n` against `n` over entries with `n ≥ n_min`.
    pub fn slope_from(&self, n_min: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.entries.iter().filter(|e| e.n >= n_min).map(|e| (e.n as f64, e.residual)).collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

fn sorted_unique(n_list: &[usize]) -> Vec<usize> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// Remez-region residuals from closed forms only:
/// `L_n = T_n(y)`, `Φ = arccosh y`, `r_n = log(1 + e^{-2nΦ})`.
pub fn remez_residuals(x0: f64, delta: f64, n_list: &[usize]) -> Result<ResidualSeries> {
    if !(delta > 0.0 && delta < 1.0) || !(-1.0..-1.0 + 2.0 * delta).contains(&x0) {
        return Err(Error::domain(format!("need 0 < delta < 1 and -1 <= x0 < -1 + 2 delta, got x0 = {x0}, delta = {delta}")));
    }
    let y = remez_argument(delta, x0);
    let phi = acosh_accurate(y);
    let entries = sorted_unique(n_list)
        .into_iter()
        .map(|n| {
            let n_phi = n as f64 * phi;
            let log_2ln = if n == 0 { std::f64::consts::LN_2 } else { std::f64::consts::LN_2 + ln_cheb_t(n as u32, y)? };
            // 2T_n(y) = e^{nΦ}(1 + e^{-2nΦ}) exactly; avoid the cancellation
            let residual = if n == 0 { std::f64::consts::LN_2 } else { (-2.0 * n_phi).exp().ln_1p() };
            Ok(ResidualEntry { n, l_n: (log_2ln - std::f64::consts::LN_2).exp(), log_2ln, n_phi, residual })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualSeries { delta, x0, phi, entries })
}

/// `r_n = log(2 L_n) - nΦ_δ(x₀)` with `L_n` from the LP search.
pub fn totik_widom_residuals(x0: f64, delta: f64, n_list: &[usize], cfg: &ProblemConfig) -> Result<ResidualSeries> {
    let phi = upper_envelope(delta, x0, &cfg.envelope)?.phi;
    let entries = sorted_unique(n_list)
        .into_iter()
        .map(|n| {
            let r = l_n_delta(x0, delta, n, cfg).map_err(|e| annotate(e, n))?;
            let log_2ln = std::f64::consts::LN_2 + r.log_value;
            let n_phi = n as f64 * phi;
            Ok(ResidualEntry { n, l_n: r.value, log_2ln, n_phi, residual: log_2ln - n_phi })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualSeries { delta, x0, phi, entries })
}

fn annotate(e: Error, n: usize) -> Error {
    match e {
        Error::Internal(m) => Error::Internal(format!("n = {n}: {m}")),
        Error::Infeasible(m) => Error::Infeasible(format!("n = {n}: {m}")),
        Error::Unbounded(m) => Error::Unbounded(format!("n = {n}: {m}")),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub set: CompactSet,
    pub m_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceReport {
    pub x0: f64,
    pub delta: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub l_n: f64,
    pub best: Candidate,
    /// Largest `M_n(x₀, E) / L_n` seen.
    pub max_ratio: f64,
    pub violations: Vec<Violation>,
}

impl BruteForceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random sets with 1 to 4 gaps, redrawn until `x₀` falls in a gap.
pub fn random_trial_sets(x0: f64, delta: f64, trials: usize, seed: u64) -> Result<Vec<CompactSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    while out.len() < trials {
        let mut attempts = 0;
        loop {
            let gaps = rng.random_range(1..=4);
            let e = random_multigap_set(delta, gaps, rng.random())?;
            if !e.contains(x0) {
                out.push(e);
                break;
            }
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::domain(format!("x0 = {x0} is almost never in a gap for delta = {delta}")));
            }
        }
    }
    Ok(out)
}

pub fn brute_force_theorem1(x0: f64, delta: f64, n: usize, trials: usize, seed: u64, cfg: &ProblemConfig) -> Result<BruteForceReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let l = l_n_delta(x0, delta, n, cfg)?;
    let sets = random_trial_sets(x0, delta, trials, seed)?;
    let values = sets
        .par_iter()
        .map(|e| extremal_value(e, x0, n, &cfg.oracle).map(|v| v.0))
        .collect::<Result<Vec<f64>>>()?;
    let bound = l.value * (1.0 + 10.0 * cfg.oracle.value_tol);
    let max_ratio = values.iter().map(|m| m / l.value).fold(0.0, f64::max);
    let violations = sets
        .into_iter()
        .zip(values)
        .enumerate()
        .filter(|(_, (_, m))| *m > bound)
        .map(|(trial, (set, m_n))| Violation { trial, set, m_n })
        .collect();
    Ok(BruteForceReport { x0, delta, n, trials, seed, l_n: l.value, best: l.best, max_ratio, violations })
}
