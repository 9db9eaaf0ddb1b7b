use nalgebra::{DMatrix, DVector};
use statrs::function::beta::beta_reg;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("invalid binomial counts: {wins} wins out of {games}")]
    Counts { wins: f64, games: u64 },
    #[error("confidence level must be in (0, 1), got {0}")]
    Level(f64),
    #[error("result references agent {index} but only {agents} agents exist")]
    UnknownAgent { index: usize, agents: usize },
    #[error("results graph is disconnected; components: {0:?}")]
    Disconnected(Vec<Vec<usize>>),
    #[error("rating fit did not converge (gradient norm {0:e})")]
    NoConvergence(f64),
}

/// `x` with `I_x(a, b) = target`, by bisection.
fn beta_quantile(a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact (Clopper-Pearson) binomial confidence interval for `wins`
/// successes in `games` trials.
pub fn clopper_pearson(wins: u64, games: u64, level: f64) -> Result<(f64, f64), StatsError> {
    if games == 0 || wins > games {
        return Err(StatsError::Counts { wins: wins as f64, games });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Level(level));
    }
    let alpha = 1.0 - level;
    let (w, n) = (wins as f64, games as f64);
    let lo = if wins == 0 { 0.0 } else { beta_quantile(w, n - w + 1.0, alpha / 2.0) };
    let hi = if wins == games { 1.0 } else { beta_quantile(w + 1.0, n - w, 1.0 - alpha / 2.0) };
    Ok((lo, hi))
}

/// Interval for a score that may include half-points from draws: the lower
/// bound of the floor bracket and the upper bound of the ceiling bracket.
pub fn clopper_pearson_fractional(score: f64, games: u64, level: f64) -> Result<(f64, f64), StatsError> {
    if !(0.0..=games as f64).contains(&score) {
        return Err(StatsError::Counts { wins: score, games });
    }
    let lo = clopper_pearson(score.floor() as u64, games, level)?.0;
    let hi = clopper_pearson(score.ceil() as u64, games, level)?.1;
    Ok((lo, hi))
}

/// Head-to-head record between agents `i` and `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    pub wins_i: f64,
    pub wins_j: f64,
    pub draws: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EloTable {
    /// Ratings, agent 0 anchored at 0.
    pub ratings: Vec<f64>,
    /// Standard errors from the curvature of the log posterior (0 for the anchor).
    pub std_errors: Vec<f64>,
    pub gradient_norm: f64,
}

impl EloTable {
    /// Modelled probability that `i` beats `j`.
    pub fn win_probability(&self, i: usize, j: usize) -> f64 {
        elo_win_probability(self.ratings[i] - self.ratings[j])
    }
}

pub fn elo_win_probability(diff: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-diff / 400.0))
}

pub const ELO_PRIOR_SIGMA: f64 = 350.0;
const LN10_400: f64 = std::f64::consts::LN_10 / 400.0;

fn components(agents: usize, results: &[PairResult]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..agents).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for r in results {
        if r.wins_i + r.wins_j + r.draws > 0.0 {
            let (a, b) = (find(&mut parent, r.i), find(&mut parent, r.j));
            parent[a] = b;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; agents];
    for x in 0..agents {
        let r = find(&mut parent, x);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(x);
    }
    groups
}

/// Log posterior, its gradient and Hessian over all ratings.
fn objective(r: &[f64], results: &[PairResult], sigma: Option<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let k = r.len();
    let mut f = 0.0;
    let mut g = DVector::zeros(k);
    let mut h = DMatrix::zeros(k, k);
    for res in results {
        let wi = res.wins_i + 0.5 * res.draws;
        let wj = res.wins_j + 0.5 * res.draws;
        let d = (r[res.i] - r[res.j]) * LN10_400;
        let p = 1.0 / (1.0 + (-d).exp());
        // ln p and ln(1-p) computed stably.
        let ln_p = -(-d).exp().ln_1p();
        let ln_q = -d.exp().ln_1p();
        f += wi * ln_p + wj * ln_q;
        let dd = (wi * (1.0 - p) - wj * p) * LN10_400;
        g[res.i] += dd;
        g[res.j] -= dd;
        let curv = (wi + wj) * p * (1.0 - p) * LN10_400 * LN10_400;
        h[(res.i, res.i)] -= curv;
        h[(res.j, res.j)] -= curv;
        h[(res.i, res.j)] += curv;
        h[(res.j, res.i)] += curv;
    }
    if let Some(s) = sigma {
        for a in 1..k {
            f -= r[a] * r[a] / (2.0 * s * s);
            g[a] -= r[a] / (s * s);
            h[(a, a)] -= 1.0 / (s * s);
        }
    }
    (f, g, h)
}

/// Maximum a-posteriori Elo ratings under the logistic model with a
/// Gaussian prior of standard deviation `prior_sigma` on every non-anchor
/// rating (`None` for a flat prior). Agent 0 is anchored at 0. Solved by
/// damped Newton ascent until the gradient norm is below 1e-8.
pub fn elo_fit(agents: usize, results: &[PairResult], prior_sigma: Option<f64>) -> Result<EloTable, StatsError> {
    for r in results {
        for idx in [r.i, r.j] {
            if idx >= agents {
                return Err(StatsError::UnknownAgent { index: idx, agents });
            }
        }
        if r.wins_i < 0.0 || r.wins_j < 0.0 || r.draws < 0.0 {
            return Err(StatsError::Counts { wins: r.wins_i.min(r.wins_j), games: 0 });
        }
    }
    let comps = components(agents, results);
    if comps.len() > 1 {
        return Err(StatsError::Disconnected(comps));
    }
    let mut r = vec![0.0; agents];
    if agents == 1 {
        return Ok(EloTable { ratings: r, std_errors: vec![0.0], gradient_norm: 0.0 });
    }
    let free = agents - 1;
    let mut gnorm = f64::INFINITY;
    for _ in 0..500 {
        let (f, g, h) = objective(&r, results, prior_sigma);
        let gf = g.rows(1, free).into_owned();
        gnorm = gf.norm();
        if gnorm < 1e-8 {
            break;
        }
        let hf = h.view((1, 1), (free, free)).into_owned();
        // Newton direction for a concave objective: solve (−H) Δ = g.
        let step = (-hf).cholesky().map(|c| c.solve(&gf)).unwrap_or_else(|| gf.clone() * 100.0);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = (0..agents).map(|a| if a == 0 { 0.0 } else { r[a] + t * step[a - 1] }).collect();
            let (ft, _, _) = objective(&trial, results, prior_sigma);
            if ft >= f || t < 1e-12 {
                r = trial;
                break;
            }
            t *= 0.5;
        }
    }
    if gnorm >= 1e-8 {
        return Err(StatsError::NoConvergence(gnorm));
    }
    let (_, _, h) = objective(&r, results, prior_sigma);
    let hf = h.view((1, 1), (free, free)).into_owned();
    let mut std_errors = vec![0.0; agents];
    if let Some(inv) = (-hf).try_inverse() {
        for a in 0..free {
            std_errors[a + 1] = inv[(a, a)].max(0.0).sqrt();
        }
    }
    Ok(EloTable { ratings: r, std_errors, gradient_norm: gnorm })
}
