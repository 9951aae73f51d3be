//! Hölder continuity parameters, stability bounds and perturbation experiments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::rifs::RifsSpec;
use crate::solver::{metric_d, solve, SampledFuzzyFunction, SolveOptions};

/// `δ` closer than this to 1 selects the borderline case.
pub const DELTA_TOL: f64 = 1e-12;

/// Default free exponent in the `δ = 1` case.
pub const DEFAULT_FREE_TAU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolderCase {
    #[serde(rename = "delta_lt_1")]
    DeltaLt1,
    #[serde(rename = "delta_eq_1")]
    DeltaEq1,
    #[serde(rename = "delta_gt_1")]
    DeltaGt1,
}

impl HolderCase {
    pub fn of(delta: f64) -> HolderCase {
        if (delta - 1.0).abs() <= DELTA_TOL {
            HolderCase::DeltaEq1
        } else if delta < 1.0 {
            HolderCase::DeltaLt1
        } else {
            HolderCase::DeltaGt1
        }
    }
}

impl fmt::Display for HolderCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HolderCase::DeltaLt1 => "delta_lt_1",
            HolderCase::DeltaEq1 => "delta_eq_1",
            HolderCase::DeltaGt1 => "delta_gt_1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    pub alpha: f64,
    pub c_min: f64,
    pub c_max: f64,
    /// Shortest and longest address interval.
    pub addr_len_min: f64,
    pub addr_len_max: f64,
    pub lipschitz: f64,
    pub delta: f64,
    pub case: HolderCase,
    pub tau: f64,
    pub q: f64,
    pub m_bound: f64,
    pub n_bound: f64,
    /// `H = 2Q`.
    pub h: f64,
}

pub fn holder_params(spec: &RifsSpec) -> Result<HolderParams> {
    holder_params_with(spec, DEFAULT_FREE_TAU)
}

/// Like [`holder_params`], with the exponent used when `δ = 1`.
pub fn holder_params_with(spec: &RifsSpec, free_tau: f64) -> Result<HolderParams> {
    if !(free_tau > 0.0 && free_tau < 1.0) {
        return Err(Error::BadFreeExponent(free_tau));
    }
    let c = spec.contraction_factors();
    let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let c_max = c.iter().copied().fold(0.0, f64::max);
    let lens: Vec<f64> = (1..=spec.intervals())
        .map(|i| {
            let (a, b) = spec.address_interval(i);
            b - a
        })
        .collect();
    let addr_len_min = lens.iter().copied().fold(f64::INFINITY, f64::min);
    let addr_len_max = lens.iter().copied().fold(0.0, f64::max);
    let alpha = spec.alpha_max();
    let lipschitz = spec.lipschitz_max();

    let m_bound = 2.0 * lipschitz * domain_radius(spec) / (1.0 - alpha);
    let n_bound = (m_bound / (c_min * addr_len_min)).max(lipschitz);
    let delta = alpha / c_min;
    let case = HolderCase::of(delta);
    let stretch = addr_len_max.max(1.0);
    let (tau, q) = match case {
        HolderCase::DeltaLt1 => (1.0, n_bound / (1.0 - delta)),
        HolderCase::DeltaEq1 => {
            let q = n_bound
                * (1.0 - 1.0 / ((1.0 - free_tau) * std::f64::consts::E * c_max.ln()))
                * stretch;
            (free_tau, q)
        }
        HolderCase::DeltaGt1 => {
            let tau = delta.ln() / c_max.ln() + 1.0;
            if !(tau > 0.0) {
                return Err(Error::NonPositiveExponent { tau, delta, c_max });
            }
            (tau, n_bound * delta / (delta - 1.0) * stretch)
        }
    };
    Ok(HolderParams {
        alpha,
        c_min,
        c_max,
        addr_len_min,
        addr_len_max,
        lipschitz,
        delta,
        case,
        tau,
        q,
        m_bound,
        n_bound,
        h: 2.0 * q,
    })
}

fn domain_radius(spec: &RifsSpec) -> f64 {
    let (lo, hi) = spec.data().domain();
    lo.abs().max(hi.abs())
}

/// `L_q·max(|x_0|, |x_n|)/(1-α)`.
pub fn apriori_norm_bound(spec: &RifsSpec) -> f64 {
    spec.lipschitz_max() * domain_radius(spec) / (1.0 - spec.alpha_max())
}

/// `D(f, 0)` for a sampled function.
pub fn sup_norm(f: &SampledFuzzyFunction) -> f64 {
    f.values().iter().map(FuzzyNumber::norm).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderCheck {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `d_∞(f(x), f(y)) / |x-y|^τ` seen.
    pub worst_ratio: f64,
    pub bound: f64,
    pub slack: f64,
}

impl HolderCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `d_∞(f(x), f(y)) ≤ H·|x-y|^τ + slack` on uniformly drawn pairs.
pub fn verify_holder(
    f: &SampledFuzzyFunction,
    hp: &HolderParams,
    num_pairs: usize,
    seed: u64,
    slack: f64,
) -> HolderCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = f.domain();
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..num_pairs {
        let x = rng.gen_range(lo..=hi);
        let y = rng.gen_range(lo..=hi);
        let d = f
            .evaluate(x)
            .and_then(|fx| Ok(fx.d_inf(&f.evaluate(y)?)))
            .expect("sample inside the domain");
        let gap = (x - y).abs().powf(hp.tau);
        if d > hp.h * gap + slack {
            violations += 1;
        }
        if gap > 0.0 {
            worst_ratio = worst_ratio.max(d / gap);
        }
    }
    HolderCheck {
        pairs: num_pairs,
        violations,
        worst_ratio,
        bound: hp.h,
        slack,
    }
}

fn check_xs(spec: &RifsSpec, x_star: &[f64]) -> Result<f64> {
    let xs = spec.data().xs();
    if x_star.len() != xs.len() {
        return Err(Error::PerturbationLength {
            expected: xs.len(),
            got: x_star.len(),
        });
    }
    if x_star[0] != xs[0] || x_star[xs.len() - 1] != xs[xs.len() - 1] {
        return Err(Error::EndpointMoved);
    }
    if let Some(k) = (1..x_star.len()).find(|&k| !(x_star[k] > x_star[k - 1])) {
        return Err(Error::NotIncreasing {
            index: k,
            value: x_star[k],
        });
    }
    Ok(xs
        .iter()
        .zip(x_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn check_us(spec: &RifsSpec, u_star: &[FuzzyNumber]) -> Result<f64> {
    let data = spec.data().with_ordinates(u_star.to_vec())?;
    spec.with_data(data)?.validate_scaling().into_result()?;
    Ok(spec
        .data()
        .ordinates()
        .iter()
        .zip(u_star)
        .map(|(a, b)| a.d_inf(b))
        .fold(0.0, f64::max))
}

/// `μ = 1 + α`, the constant for ordinate perturbations of the chord-based `q_i`.
pub fn default_mu_u(spec: &RifsSpec) -> f64 {
    1.0 + spec.alpha_max()
}

/// `μ = max d_∞(u_i, 0)`, the constant for scaling-factor perturbations.
pub fn default_mu_alpha(spec: &RifsSpec) -> f64 {
    spec.data()
        .ordinates()
        .iter()
        .map(FuzzyNumber::norm)
        .fold(0.0, f64::max)
}

/// `(1+α)·H·max|x_i - x_i*|^τ / (1-α)`.
pub fn bound_perturb_x(spec: &RifsSpec, hp: &HolderParams, x_star: &[f64]) -> Result<f64> {
    let dx = check_xs(spec, x_star)?;
    let alpha = spec.alpha_max();
    Ok((1.0 + alpha) * hp.h * dx.powf(hp.tau) / (1.0 - alpha))
}

/// `μ·max d_∞(u_i, u_i*) / (1-α)`.
pub fn bound_perturb_u(spec: &RifsSpec, u_star: &[FuzzyNumber], mu: f64) -> Result<f64> {
    let du = check_us(spec, u_star)?;
    Ok(mu * du / (1.0 - spec.alpha_max()))
}

/// `(1+α)/(1-α)·(H·max|x_i - x_i*|^τ + max d_∞(u_i, u_i*))`.
pub fn bound_perturb_both(
    spec: &RifsSpec,
    hp: &HolderParams,
    x_star: &[f64],
    u_star: &[FuzzyNumber],
) -> Result<f64> {
    let dx = check_xs(spec, x_star)?;
    let du = check_us(spec, u_star)?;
    let alpha = spec.alpha_max();
    Ok((1.0 + alpha) / (1.0 - alpha) * (hp.h * dx.powf(hp.tau) + du))
}

/// `[L_q·max(|x_0|,|x_n|)/((1-α)(1-α*)) + μ/(1-α*)]·max|α_i - α_i*|`.
pub fn bound_perturb_alpha(spec: &RifsSpec, alpha_star: &[f64], mu: f64) -> Result<f64> {
    let perturbed = with_alphas_checked(spec, alpha_star)?;
    perturbed.validate_scaling().into_result()?;
    let da = spec
        .alphas()
        .iter()
        .zip(alpha_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (alpha, alpha_star) = (spec.alpha_max(), perturbed.alpha_max());
    let lead = spec.lipschitz_max() * domain_radius(spec) / ((1.0 - alpha) * (1.0 - alpha_star));
    Ok((lead + mu / (1.0 - alpha_star)) * da)
}

fn with_alphas_checked(spec: &RifsSpec, alpha_star: &[f64]) -> Result<RifsSpec> {
    if alpha_star.len() != spec.intervals() {
        return Err(Error::PerturbationLength {
            expected: spec.intervals(),
            got: alpha_star.len(),
        });
    }
    spec.with_alphas(alpha_star.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    PerturbX,
    PerturbU,
    PerturbBoth,
    PerturbAlpha,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 4] = [
        PerturbationKind::PerturbX,
        PerturbationKind::PerturbU,
        PerturbationKind::PerturbBoth,
        PerturbationKind::PerturbAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PerturbationKind::PerturbX => "perturb_x",
            PerturbationKind::PerturbU => "perturb_u",
            PerturbationKind::PerturbBoth => "perturb_both",
            PerturbationKind::PerturbAlpha => "perturb_alpha",
        }
    }
}

impl fmt::Display for PerturbationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PerturbationKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown perturbation kind `{s}`"))
    }
}

/// How the perturbation of a given size is spread over the components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Seeded random direction with sup-norm 1. Abscissae move only at interior
    /// nodes, ordinates are translated, and scaling factors only shrink.
    Random(u64),
    /// Adds `size`, which may be negative, to one component (node index for
    /// x and u, 1-based interval for α).
    Component(usize),
}

/// A perturbed problem together with the perturbed quantities.
#[derive(Debug, Clone)]
pub struct Perturbed {
    pub spec: RifsSpec,
    pub x_star: Vec<f64>,
    pub u_star: Vec<FuzzyNumber>,
    pub alpha_star: Vec<f64>,
}

fn unit_direction(rng: &mut ChaCha8Rng, len: usize, signed: bool) -> Vec<f64> {
    let lo = if signed { -1.0 } else { 0.0 };
    let r: Vec<f64> = (0..len).map(|_| rng.gen_range(lo..=1.0)).collect();
    let peak = r.iter().map(|v: &f64| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        let mut e = vec![0.0; len];
        e[0] = 1.0;
        return e;
    }
    r.into_iter().map(|v| v / peak).collect()
}

fn component(len: usize, k: usize, what: &str) -> Result<Vec<f64>> {
    if k >= len {
        return Err(Error::InadmissiblePerturbation(format!(
            "{what} index {k} out of range"
        )));
    }
    let mut e = vec![0.0; len];
    e[k] = 1.0;
    Ok(e)
}

/// Builds the perturbed problem and checks that it is admissible.
pub fn perturb(
    spec: &RifsSpec,
    kind: PerturbationKind,
    size: f64,
    dir: Direction,
) -> Result<Perturbed> {
    let signed_ok = matches!(dir, Direction::Component(_));
    if !size.is_finite() || (size < 0.0 && !signed_ok) {
        return Err(Error::InadmissiblePerturbation(format!("size {size}")));
    }
    let data = spec.data();
    let n = spec.intervals();
    let mut rng = ChaCha8Rng::seed_from_u64(match dir {
        Direction::Random(seed) => seed,
        Direction::Component(_) => 0,
    });
    let mut x_star = data.xs().to_vec();
    let mut u_star = data.ordinates().to_vec();
    let mut alpha_star = spec.alphas().to_vec();

    if matches!(
        kind,
        PerturbationKind::PerturbX | PerturbationKind::PerturbBoth
    ) {
        let interior = match dir {
            Direction::Random(_) => unit_direction(&mut rng, n - 1, true),
            Direction::Component(k) => {
                if k == 0 || k == n {
                    return Err(Error::InadmissiblePerturbation(
                        "endpoints must stay fixed".into(),
                    ));
                }
                component(n - 1, k - 1, "node")?
            }
        };
        for (k, r) in interior.iter().enumerate() {
            x_star[k + 1] += size * r;
        }
        if let Some(k) = (1..=n).find(|&k| !(x_star[k] > x_star[k - 1])) {
            return Err(Error::InadmissiblePerturbation(format!(
                "perturbed abscissae are not increasing at x[{k}]"
            )));
        }
    }
    if matches!(
        kind,
        PerturbationKind::PerturbU | PerturbationKind::PerturbBoth
    ) {
        let r = match dir {
            Direction::Random(_) => unit_direction(&mut rng, n + 1, true),
            Direction::Component(k) => component(n + 1, k, "node")?,
        };
        for (u, r) in u_star.iter_mut().zip(&r) {
            *u = u.translate(size * r);
        }
    }
    if kind == PerturbationKind::PerturbAlpha {
        match dir {
            Direction::Random(_) => {
                let r = unit_direction(&mut rng, n, false);
                for (a, r) in alpha_star.iter_mut().zip(&r) {
                    *a -= size * r;
                }
            }
            Direction::Component(k) => {
                if k == 0 || k > n {
                    return Err(Error::InadmissiblePerturbation(format!(
                        "interval index {k} out of range"
                    )));
                }
                alpha_star[k - 1] += size;
            }
        }
    }

    let inadmissible = |e: Error| Error::InadmissiblePerturbation(e.to_string());
    let new_data = data
        .with_xs(x_star.clone())
        .and_then(|d| d.with_ordinates(u_star.clone()))
        .map_err(inadmissible)?;
    let perturbed = spec
        .with_data(new_data)
        .and_then(|s| s.with_alphas(alpha_star.clone()))
        .map_err(inadmissible)?;
    perturbed.ensure_admissible().map_err(inadmissible)?;
    Ok(Perturbed {
        spec: perturbed,
        x_star,
        u_star,
        alpha_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub kind: PerturbationKind,
    pub perturbation_size: f64,
    pub theoretical_bound: f64,
    pub observed_d: f64,
    /// `theoretical_bound - observed_d`.
    pub margin: f64,
    /// Numerical slack allowed on top of the bound (`10·tol`).
    pub slack: f64,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.observed_d <= self.theoretical_bound + self.slack
    }
}

/// The bound matching `kind` for an already perturbed problem.
pub fn theoretical_bound(
    spec: &RifsSpec,
    hp: &HolderParams,
    kind: PerturbationKind,
    p: &Perturbed,
) -> Result<f64> {
    match kind {
        PerturbationKind::PerturbX => bound_perturb_x(spec, hp, &p.x_star),
        PerturbationKind::PerturbU => bound_perturb_u(spec, &p.u_star, default_mu_u(spec)),
        PerturbationKind::PerturbBoth => bound_perturb_both(spec, hp, &p.x_star, &p.u_star),
        PerturbationKind::PerturbAlpha => {
            bound_perturb_alpha(spec, &p.alpha_star, default_mu_alpha(spec))
        }
    }
}

/// Random-direction experiment: solves the original and the perturbed problem
/// and compares the observed distance with the bound.
pub fn run_perturbation_experiment(
    spec: &RifsSpec,
    kind: PerturbationKind,
    size: f64,
    seed: u64,
    opts: &SolveOptions,
) -> Result<StabilityReport> {
    run_perturbation(spec, kind, size, Direction::Random(seed), opts)
}

pub fn run_perturbation(
    spec: &RifsSpec,
    kind: PerturbationKind,
    size: f64,
    dir: Direction,
    opts: &SolveOptions,
) -> Result<StabilityReport> {
    let hp = holder_params(spec)?;
    let p = perturb(spec, kind, size, dir)?;
    let bound = theoretical_bound(spec, &hp, kind, &p)?;
    let (f, g) = rayon::join(|| solve(spec, opts), || solve(&p.spec, opts));
    let observed_d = metric_d(&f?.0, &g?.0);
    Ok(StabilityReport {
        kind,
        perturbation_size: size,
        theoretical_bound: bound,
        observed_d,
        margin: bound - observed_d,
        slack: 10.0 * opts.tol,
    })
}
