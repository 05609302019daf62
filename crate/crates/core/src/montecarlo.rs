//! Seeded path simulation for the continuous-time examples.
//!
//! Path `i` of a run with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `i`, and per-path results are combined by a fixed-order pairwise
//! sum, so estimates are bit-identical for every thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of paths for a verdict.
pub const MIN_PATHS: usize = 100;
/// Pinned generator identity, echoed in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng seed_from_u64(seed), set_stream(path index)";

pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithMartingale,
    RejectsMartingale,
    InsufficientSample,
}

/// CLT test of `E[X] = 0` from per-path samples of `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleTest {
    pub mean: f64,
    pub se: f64,
    pub z: f64,
    pub n: usize,
    pub z_crit: f64,
    pub verdict: Verdict,
    /// Analytic value of the mean under the alternative, when known.
    pub analytic_alternative: Option<f64>,
}

impl MartingaleTest {
    pub fn from_samples(samples: &[f64], z_crit: f64, analytic_alternative: Option<f64>) -> Self {
        let n = samples.len();
        let mean = pairwise_sum(samples) / n.max(1) as f64;
        let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        let se = (var / n.max(1) as f64).sqrt();
        let z = if se > 0.0 {
            mean / se
        } else if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        };
        let verdict = if n < MIN_PATHS {
            Verdict::InsufficientSample
        } else if z.abs() <= z_crit {
            Verdict::ConsistentWithMartingale
        } else {
            Verdict::RejectsMartingale
        };
        MartingaleTest {
            mean,
            se,
            z,
            n,
            z_crit,
            verdict,
            analytic_alternative,
        }
    }

    pub fn consistent(&self) -> bool {
        self.verdict == Verdict::ConsistentWithMartingale
    }

    pub fn rejects(&self) -> bool {
        self.verdict == Verdict::RejectsMartingale
    }

    /// `|mean| ≤ z_crit·SE + allowance`.
    pub fn within(&self, allowance: f64) -> bool {
        self.n >= MIN_PATHS && self.mean.abs() <= self.z_crit * self.se + allowance
    }

    /// Whether the estimate is within `z_crit·SE` of the analytic alternative.
    pub fn matches_alternative(&self) -> Option<bool> {
        self.analytic_alternative
            .map(|a| (self.mean - a).abs() <= self.z_crit * self.se)
    }
}

/// Execution settings shared by all simulations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub z_crit: f64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            z_crit: 3.0,
            threads: None,
        }
    }
}

/// Runs `f` on paths `0..paths`, returning per-path outputs in path order.
fn run_paths<T, F>(seed: u64, paths: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let go = || {
        (0..paths)
            .into_par_iter()
            .map(|i| f(&mut path_rng(seed, i)))
            .collect::<Vec<T>>()
    };
    match threads {
        None => Ok(go()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Scenario(format!("thread pool: {e}")))?;
            Ok(pool.install(go))
        }
    }
}

fn column<const K: usize>(rows: &[[f64; K]], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

/// Bounded strategy, constant on `[breaks[i], breaks[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    /// Left endpoints, starting at 0 and strictly increasing.
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn constant(v: f64) -> Self {
        PiecewiseConstant {
            breaks: vec![0.0],
            values: vec![v],
        }
    }

    /// Alternates between `v` and `−v` on `pieces` equal pieces of `[0, horizon]`.
    pub fn alternating(v: f64, pieces: usize, horizon: f64) -> Self {
        let pieces = pieces.max(1);
        PiecewiseConstant {
            breaks: (0..pieces).map(|i| horizon * i as f64 / pieces as f64).collect(),
            values: (0..pieces).map(|i| if i % 2 == 0 { v } else { -v }).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.breaks.is_empty() || self.breaks.len() != self.values.len() || self.breaks[0] != 0.0 {
            return Err(Error::Scenario("strategy needs matching breaks/values starting at 0".into()));
        }
        if self.breaks.windows(2).any(|w| w[0] >= w[1]) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Scenario("strategy breaks must increase and values be finite".into()));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b <= t);
        self.values[i.saturating_sub(1)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `S_t = s0 + µt + σB_t` on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiffusionScenario {
    pub mu: f64,
    pub sigma: f64,
    pub s0: f64,
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

impl Default for DiffusionScenario {
    fn default() -> Self {
        DiffusionScenario {
            mu: 0.2,
            sigma: 1.0,
            s0: 1.0,
            horizon: 1.0,
            steps: 1 << 9,
            paths: 100_000,
            seed: 7,
        }
    }
}

impl DiffusionScenario {
    /// Market price of risk per unit of `M = σB`.
    pub fn lambda(&self) -> f64 {
        self.mu / (self.sigma * self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Scenario("sigma must be positive".into()));
        }
        if self.steps == 0 || !(self.horizon > 0.0) || !self.mu.is_finite() {
            return Err(Error::Scenario("need steps ≥ 1, horizon > 0 and finite mu".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflatedWealthReport {
    /// Samples of `Z_T − 1`.
    pub density: MartingaleTest,
    /// Samples of `Z_T W_T − W_0`.
    pub wealth: MartingaleTest,
    /// Discretization allowance `2/m` added to `z_crit·SE`.
    pub allowance: f64,
    pub passed: bool,
}

/// Deflator `Z = E(−λM)` and wealth `W = 1 + ∫π dS` on the Euler grid; the
/// property under test is that `Z·W` is a martingale.
pub fn simulate_deflated_wealth(sc: &DiffusionScenario, pi: &PiecewiseConstant, run: &RunConfig) -> Result<DeflatedWealthReport> {
    sc.validate()?;
    pi.validate()?;
    let dt = sc.horizon / sc.steps as f64;
    let sq = dt.sqrt();
    let theta = sc.mu / sc.sigma;
    let pis: Vec<f64> = (0..sc.steps).map(|k| pi.at(k as f64 * dt)).collect();
    let rows = run_paths(sc.seed, sc.paths, run.threads, |rng| {
        let mut log_z = 0.0;
        let mut w = 1.0;
        for &p in &pis {
            let db: f64 = sq * normal(rng);
            let ds = sc.mu * dt + sc.sigma * db;
            w += p * ds;
            log_z += -theta * db - 0.5 * theta * theta * dt;
        }
        let z = log_z.exp();
        [z - 1.0, z * w - 1.0]
    })?;
    let density = MartingaleTest::from_samples(&column(&rows, 0), run.z_crit, None);
    let wealth = MartingaleTest::from_samples(&column(&rows, 1), run.z_crit, None);
    let allowance = 2.0 / sc.steps as f64;
    let passed = density.within(allowance) && wealth.within(allowance);
    Ok(DeflatedWealthReport {
        density,
        wealth,
        allowance,
        passed,
    })
}

/// `L = N¹ − N² + bt` with unit-rate Poisson `N¹, N²`, and an independent
/// death time `T ~ Exp(a)` kept only if `T ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LevyScenario {
    pub a: f64,
    pub b: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

impl Default for LevyScenario {
    fn default() -> Self {
        LevyScenario {
            a: 2.0,
            b: 1.0,
            steps: 1 << 8,
            paths: 100_000,
            seed: 11,
        }
    }
}

impl LevyScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > self.b.abs()) || !self.a.is_finite() {
            return Err(Error::Scenario(format!("need a > |b|, got a = {}, b = {}", self.a, self.b)));
        }
        if self.steps == 0 {
            return Err(Error::Scenario("need steps ≥ 1".into()));
        }
        Ok(())
    }

    /// `E_Q[L^{T−}_1] = b(1 − e^{−a})/a`.
    pub fn raw_mean(&self) -> f64 {
        self.b * (1.0 - (-self.a).exp()) / self.a
    }
}

/// Jump times and signs of `N¹ − N²` on `[0, 1]`, in increasing time.
fn levy_jumps(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let unit = Exp::new(1.0).expect("rate 1");
    let mut jumps = Vec::new();
    for sign in [1.0, -1.0] {
        let mut t: f64 = unit.sample(rng);
        while t <= 1.0 {
            jumps.push((t, sign));
            t += unit.sample(rng);
        }
    }
    jumps.sort_by(|x, y| x.0.total_cmp(&y.0));
    jumps
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyReport {
    /// Test of `E_Q[L^{T−}_1] = 0`.
    pub raw: MartingaleTest,
    /// Test of `E_Q[L̃_1] = 0` for `L̃ = L^{T−} − (b/a)1{t ≥ T}`.
    pub corrected: MartingaleTest,
}

/// Simulates under `Q` with exact jump and death times.
pub fn simulate_levy_counterexample(sc: &LevyScenario, run: &RunConfig) -> Result<LevyReport> {
    sc.validate()?;
    let death = Exp::new(sc.a).map_err(|e| Error::Scenario(e.to_string()))?;
    let rows = run_paths(sc.seed, sc.paths, run.threads, |rng| {
        let jumps = levy_jumps(rng);
        let tau: f64 = death.sample(rng);
        let stop = tau.min(1.0);
        let raw = jumps.iter().take_while(|j| j.0 < stop).map(|j| j.1).sum::<f64>() + sc.b * stop;
        let corrected = if tau <= 1.0 { raw - sc.b / sc.a } else { raw };
        [raw, corrected]
    })?;
    Ok(LevyReport {
        raw: MartingaleTest::from_samples(&column(&rows, 0), run.z_crit, Some(sc.raw_mean())),
        corrected: MartingaleTest::from_samples(&column(&rows, 1), run.z_crit, Some(0.0)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalReport {
    /// Samples of `Z_1 W^π_1 − 1`.
    pub gap: MartingaleTest,
    /// `mean ≤ z_crit·SE`.
    pub supermartingale: bool,
    /// `mean < 0`.
    pub strictly_negative: bool,
    /// Exact `E[Z_1 W^π_1] − 1` under the grid strategy.
    pub analytic_gap: f64,
}

/// Deflated wealth under the survival measure, where `L` has its `Q`-law,
/// `Z_t = e^{−at}` and `dW = W_− π dL`.
pub fn simulate_survival_measure(sc: &LevyScenario, pi: &PiecewiseConstant, run: &RunConfig) -> Result<SurvivalReport> {
    sc.validate()?;
    pi.validate()?;
    if pi.sup_norm() > 1.0 {
        return Err(Error::Admissibility(format!("|π| ≤ 1 required, got {}", pi.sup_norm())));
    }
    let m = sc.steps;
    let dt = 1.0 / m as f64;
    let pis: Vec<f64> = (0..m).map(|k| pi.at(k as f64 * dt)).collect();
    let drift: f64 = pis.iter().sum::<f64>() * dt * sc.b;
    let z1 = (-sc.a).exp();
    let rows = run_paths(sc.seed, sc.paths, run.threads, |rng| {
        let mut w = drift.exp();
        for (t, sign) in levy_jumps(rng) {
            let k = ((t * m as f64) as usize).min(m - 1);
            w *= 1.0 + pis[k] * sign;
        }
        [z1 * w - 1.0]
    })?;
    let analytic_gap = (drift - sc.a).exp() - 1.0;
    let gap = MartingaleTest::from_samples(&column(&rows, 0), run.z_crit, Some(analytic_gap));
    Ok(SurvivalReport {
        supermartingale: gap.mean <= gap.z_crit * gap.se,
        strictly_negative: gap.mean < 0.0,
        gap,
        analytic_gap,
    })
}

/// Brownian `W` with `G_t = F_t ∨ σ(W_1)`, observed up to `horizon < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InsiderScenario {
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    /// Sets the information drift to zero.
    pub zero_drift: bool,
}

impl Default for InsiderScenario {
    fn default() -> Self {
        InsiderScenario {
            horizon: 0.5,
            steps: 1 << 10,
            paths: 100_000,
            seed: 13,
            zero_drift: false,
        }
    }
}

impl InsiderScenario {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Scenario("need steps ≥ 1".into()));
        }
        if !(self.horizon >= 0.0) || self.horizon >= 1.0 {
            return Err(Error::Scenario(format!(
                "information drift is singular at 1; horizon {} must lie in [0, 1)",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationDriftReport {
    /// Samples of `Z_t − 1`.
    pub density: MartingaleTest,
    /// Samples of `Z_t W_t`.
    pub wealth: MartingaleTest,
    pub allowance: f64,
    pub passed: bool,
}

/// `Z = exp(−∫α dM̃ − ½∫α² ds)` with `α_s = (W_1 − W_s)/(1 − s)` evaluated at
/// left grid points.
pub fn information_drift_deflator(sc: &InsiderScenario, run: &RunConfig) -> Result<InformationDriftReport> {
    sc.validate()?;
    let dt = sc.horizon / sc.steps as f64;
    let sq = dt.sqrt();
    let rows = run_paths(sc.seed, sc.paths, run.threads, |rng| {
        let incs: Vec<f64> = (0..sc.steps).map(|_| sq * normal(rng)).collect::<Vec<f64>>();
        let w_h: f64 = incs.iter().sum();
        let tail: f64 = normal(rng);
        let w_1 = w_h + (1.0 - sc.horizon).sqrt() * tail;
        let mut w = 0.0;
        let mut log_z = 0.0;
        for (k, dw) in incs.iter().enumerate() {
            let s = k as f64 * dt;
            let alpha = if sc.zero_drift { 0.0 } else { (w_1 - w) / (1.0 - s) };
            log_z += -alpha * dw + 0.5 * alpha * alpha * dt;
            w += dw;
        }
        let z = log_z.exp();
        [z - 1.0, z * w]
    })?;
    let density = MartingaleTest::from_samples(&column(&rows, 0), run.z_crit, None);
    let wealth = MartingaleTest::from_samples(&column(&rows, 1), run.z_crit, None);
    let allowance = 2.0 / sc.steps as f64;
    let passed = density.within(allowance) && wealth.within(allowance);
    Ok(InformationDriftReport {
        density,
        wealth,
        allowance,
        passed,
    })
}

/// Grid values of a few paths, for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathBatch {
    pub times: Vec<f64>,
    pub stream_ids: Vec<usize>,
    /// Series name, then path, then grid index.
    pub series: Vec<(String, Vec<Vec<f64>>)>,
}

impl PathBatch {
    /// Long-format CSV: `path,time,<series...>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,time");
        for (name, _) in &self.series {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (p, id) in self.stream_ids.iter().enumerate() {
            for (k, t) in self.times.iter().enumerate() {
                out.push_str(&format!("{id},{t}"));
                for (_, v) in &self.series {
                    out.push_str(&format!(",{}", v[p][k]));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// The first `count` paths of a diffusion run: `S`, `Z` and `W`.
pub fn diffusion_paths(sc: &DiffusionScenario, pi: &PiecewiseConstant, count: usize) -> Result<PathBatch> {
    sc.validate()?;
    pi.validate()?;
    let dt = sc.horizon / sc.steps as f64;
    let theta = sc.mu / sc.sigma;
    let count = count.min(sc.paths);
    let mut series = vec![
        ("S".to_string(), Vec::new()),
        ("Z".to_string(), Vec::new()),
        ("W".to_string(), Vec::new()),
    ];
    for i in 0..count {
        let mut rng = path_rng(sc.seed, i);
        let (mut s, mut log_z, mut w) = (sc.s0, 0.0f64, 1.0);
        let (mut ss, mut zs, mut ws) = (vec![s], vec![1.0], vec![w]);
        for k in 0..sc.steps {
            let db: f64 = dt.sqrt() * normal(&mut rng);
            let ds = sc.mu * dt + sc.sigma * db;
            s += ds;
            w += pi.at(k as f64 * dt) * ds;
            log_z += -theta * db - 0.5 * theta * theta * dt;
            ss.push(s);
            zs.push(log_z.exp());
            ws.push(w);
        }
        series[0].1.push(ss);
        series[1].1.push(zs);
        series[2].1.push(ws);
    }
    Ok(PathBatch {
        times: (0..=sc.steps).map(|k| k as f64 * dt).collect(),
        stream_ids: (0..count).collect(),
        series,
    })
}

/// The first `count` paths of the Lévy example under `Q`: `L^{T−}` and `L̃`.
pub fn levy_paths(sc: &LevyScenario, count: usize) -> Result<PathBatch> {
    sc.validate()?;
    let death = Exp::new(sc.a).map_err(|e| Error::Scenario(e.to_string()))?;
    let count = count.min(sc.paths);
    let times: Vec<f64> = (0..=sc.steps).map(|k| k as f64 / sc.steps as f64).collect();
    let mut raw = Vec::new();
    let mut corrected = Vec::new();
    for i in 0..count {
        let mut rng = path_rng(sc.seed, i);
        let jumps = levy_jumps(&mut rng);
        let tau: f64 = death.sample(&mut rng);
        let (mut r, mut c) = (Vec::new(), Vec::new());
        for &t in &times {
            let stop = t.min(tau);
            let l = jumps.iter().take_while(|j| j.0 < stop).map(|j| j.1).sum::<f64>() + sc.b * stop;
            r.push(l);
            c.push(if tau <= t { l - sc.b / sc.a } else { l });
        }
        raw.push(r);
        corrected.push(c);
    }
    Ok(PathBatch {
        times,
        stream_ids: (0..count).collect(),
        series: vec![("L_stopped".into(), raw), ("L_corrected".into(), corrected)],
    })
}

/// The first `count` paths of the insider run: `W` and `Z`.
pub fn insider_paths(sc: &InsiderScenario, count: usize) -> Result<PathBatch> {
    sc.validate()?;
    let dt = sc.horizon / sc.steps as f64;
    let count = count.min(sc.paths);
    let mut ws_all = Vec::new();
    let mut zs_all = Vec::new();
    for i in 0..count {
        let mut rng = path_rng(sc.seed, i);
        let incs: Vec<f64> = (0..sc.steps)
            .map(|_| dt.sqrt() * normal(&mut rng))
            .collect::<Vec<f64>>();
        let tail: f64 = normal(&mut rng);
        let w_1 = incs.iter().sum::<f64>() + (1.0 - sc.horizon).sqrt() * tail;
        let (mut w, mut log_z) = (0.0f64, 0.0f64);
        let (mut ws, mut zs) = (vec![0.0], vec![1.0]);
        for (k, dw) in incs.iter().enumerate() {
            let alpha = if sc.zero_drift { 0.0 } else { (w_1 - w) / (1.0 - k as f64 * dt) };
            log_z += -alpha * dw + 0.5 * alpha * alpha * dt;
            w += dw;
            ws.push(w);
            zs.push(log_z.exp());
        }
        ws_all.push(ws);
        zs_all.push(zs);
    }
    Ok(PathBatch {
        times: (0..=sc.steps).map(|k| k as f64 * dt).collect(),
        stream_ids: (0..count).collect(),
        series: vec![("W".into(), ws_all), ("Z".into(), zs_all)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small<T: Clone>(mut sc: T, f: impl Fn(&mut T)) -> T {
        f(&mut sc);
        sc
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn driftless_density_is_one() {
        let sc = small(DiffusionScenario::default(), |s| {
            s.mu = 0.0;
            s.steps = 16;
            s.paths = 2000;
        });
        let r = simulate_deflated_wealth(&sc, &PiecewiseConstant::constant(1.0), &RunConfig::default()).unwrap();
        assert_eq!(r.density.mean, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn insufficient_sample_flag() {
        let sc = small(DiffusionScenario::default(), |s| {
            s.steps = 4;
            s.paths = 50;
        });
        let r = simulate_deflated_wealth(&sc, &PiecewiseConstant::constant(0.0), &RunConfig::default()).unwrap();
        assert_eq!(r.density.verdict, Verdict::InsufficientSample);
        assert!(!r.passed);
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let sc = small(LevyScenario::default(), |s| s.paths = 3000);
        let one = simulate_levy_counterexample(&sc, &RunConfig { threads: Some(1), ..Default::default() }).unwrap();
        let four = simulate_levy_counterexample(&sc, &RunConfig { threads: Some(4), ..Default::default() }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn survival_rejects_large_strategy() {
        let sc = LevyScenario::default();
        assert!(matches!(
            simulate_survival_measure(&sc, &PiecewiseConstant::constant(1.5), &RunConfig::default()),
            Err(Error::Admissibility(_))
        ));
        let zero = simulate_survival_measure(
            &small(sc, |s| s.paths = 200),
            &PiecewiseConstant::constant(0.0),
            &RunConfig::default(),
        )
        .unwrap();
        assert!((zero.gap.mean - ((-2.0f64).exp() - 1.0)).abs() < 1e-12);
        assert!(zero.supermartingale && zero.strictly_negative);
    }

    #[test]
    fn scenario_constraints() {
        assert!(small(LevyScenario::default(), |s| s.b = 2.0).validate().is_err());
        assert!(small(InsiderScenario::default(), |s| s.horizon = 1.0).validate().is_err());
        assert!(small(DiffusionScenario::default(), |s| s.sigma = 0.0).validate().is_err());
    }

    #[test]
    fn insider_at_time_zero_and_without_drift() {
        let sc = small(InsiderScenario::default(), |s| {
            s.horizon = 0.0;
            s.steps = 4;
            s.paths = 200;
        });
        let r = information_drift_deflator(&sc, &RunConfig::default()).unwrap();
        assert_eq!(r.density.mean, 0.0);
        let sc = small(InsiderScenario::default(), |s| {
            s.zero_drift = true;
            s.steps = 8;
            s.paths = 500;
        });
        let r = information_drift_deflator(&sc, &RunConfig::default()).unwrap();
        assert_eq!(r.density.mean, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn piecewise_lookup() {
        let pi = PiecewiseConstant::alternating(1.0, 4, 1.0);
        assert_eq!(pi.at(0.0), 1.0);
        assert_eq!(pi.at(0.3), -1.0);
        assert_eq!(pi.at(0.99), -1.0);
        assert_eq!(pi.at(0.5), 1.0);
    }

    #[test]
    fn csv_has_one_row_per_grid_point() {
        let sc = small(DiffusionScenario::default(), |s| s.steps = 4);
        let b = diffusion_paths(&sc, &PiecewiseConstant::constant(1.0), 3).unwrap();
        assert_eq!(b.to_csv().lines().count(), 1 + 3 * 5);
        assert!(levy_paths(&LevyScenario::default(), 2).is_ok());
        assert!(insider_paths(&InsiderScenario::default(), 2).is_ok());
    }
}
