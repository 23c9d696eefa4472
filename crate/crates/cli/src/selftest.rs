//! Randomized property suites. Trial `i` of suite `s` draws from substream
//! `(seed, s, i)`, so any failing trial can be replayed on its own.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde_json::{json, Value};

use ircgain::linalg::{hermitian_inverse, rank_one_inverse_update, ComplexMatrix, ComplexVector};
use ircgain::random::{self, substream};
use ircgain::selection::{exhaustive_best, greedy_select, CandidatePool};
use ircgain::{
    cumulative_gain, init_state, irc_sinr_covariance_oracle, irc_sinr_direct, AntennaRow, Complex64,
    UserChannelSet,
};

const SIGMA2_GRID: [f64; 3] = [0.01, 0.1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Nonnegativity,
    Woodbury,
    Telescoping,
    Covariance,
    Greedy,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Nonnegativity,
        Suite::Woodbury,
        Suite::Telescoping,
        Suite::Covariance,
        Suite::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Nonnegativity => "nonnegativity",
            Suite::Woodbury => "woodbury",
            Suite::Telescoping => "telescoping",
            Suite::Covariance => "covariance",
            Suite::Greedy => "greedy",
        }
    }

    /// What the per-suite metric measures.
    pub fn metric_label(self) -> &'static str {
        match self {
            Suite::Nonnegativity => "min xi",
            Suite::Woodbury => "max |update - direct|",
            Suite::Telescoping => "max scaled |sum xi - diff|",
            Suite::Covariance => "max relative disagreement",
            Suite::Greedy => "max (greedy - exhaustive)",
        }
    }

    fn stream_id(self) -> u32 {
        self as u32 + 1
    }

    /// Nonnegativity reports a minimum; all others report a maximum.
    fn worse(self, a: f64, b: f64) -> f64 {
        match self {
            Suite::Nonnegativity => a.min(b),
            _ => a.max(b),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// A `suite:trial` pair selecting one instance for replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayTarget {
    pub suite: Suite,
    pub trial: u32,
}

impl FromStr for ReplayTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (suite, trial) = s
            .split_once(':')
            .ok_or_else(|| format!("expected SUITE:TRIAL, got '{s}'"))?;
        Ok(Self {
            suite: suite.parse()?,
            trial: trial.parse().map_err(|e| format!("trial '{trial}': {e}"))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub min_gain: f64,
    pub woodbury: f64,
    pub telescoping: f64,
    pub covariance: f64,
    pub greedy_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            min_gain: -1e-12,
            woodbury: 1e-9,
            telescoping: 1e-9,
            covariance: 1e-9,
            greedy_slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub metric: f64,
    pub passed: bool,
    pub instance: Value,
}

fn complex_json(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn vector_json(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(complex_json).collect())
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(&m.row(i))).collect())
}

fn ucs_json(ucs: &UserChannelSet) -> Value {
    json!({ "h": vector_json(ucs.h()), "p": matrix_json(ucs.p()), "sigma2": ucs.sigma2() })
}

fn row_json(row: &AntennaRow) -> Value {
    json!({ "h_new": complex_json(&row.h_new), "rho": vector_json(&row.rho) })
}

/// Runs one trial. Generation is deterministic in `(seed, suite, trial)`.
pub fn run_trial(suite: Suite, seed: u64, trial: u32, tol: &Tolerances) -> TrialOutcome {
    let mut rng = substream(seed, suite.stream_id(), trial);
    let sigma2 = SIGMA2_GRID[rng.random_range(0..SIGMA2_GRID.len())];
    match suite {
        Suite::Nonnegativity => {
            let n_r = rng.random_range(1..=8);
            let n_int = rng.random_range(0..=7);
            let base = random::channel_set(&mut rng, n_r, n_int, sigma2);
            let mut row = random::antenna_row(&mut rng, n_int);
            let state = init_state(&base).expect("valid instance");
            if trial.is_multiple_of(4) {
                let y = state.gain(&row).expect("matching row").y;
                row.h_new = y.conj() + random::complex_gaussian(&mut rng) * 1e-9;
            }
            let xi = state.gain(&row).expect("matching row").xi;
            TrialOutcome {
                metric: xi,
                passed: xi >= tol.min_gain,
                instance: json!({ "base": ucs_json(&base), "row": row_json(&row) }),
            }
        }
        Suite::Woodbury => {
            let n = rng.random_range(1..=8);
            let m = random::positive_definite(&mut rng, n, sigma2);
            let rho = random::gaussian_vector(&mut rng, n);
            let a = hermitian_inverse(&m).expect("positive definite");
            let updated = rank_one_inverse_update(&a, &rho).expect("matching dimension");
            let mut m1 = m.clone();
            for r in 0..n {
                for c in 0..n {
                    m1[(r, c)] += rho[r].conj() * rho[c];
                }
            }
            let err = updated
                .max_abs_diff(&hermitian_inverse(&m1).expect("positive definite"))
                .expect("same shape");
            TrialOutcome {
                metric: err,
                passed: err <= tol.woodbury,
                instance: json!({ "matrix": matrix_json(&m), "rho": vector_json(&rho) }),
            }
        }
        Suite::Telescoping => {
            let n_r = rng.random_range(1..=8);
            let n_int = rng.random_range(0..=7);
            let a = rng.random_range(1..=12);
            let full = random::channel_set(&mut rng, n_r + a, n_int, sigma2);
            let base = full.first_antennas(n_r);
            let (sum, _) = cumulative_gain(&init_state(&base).expect("valid"), &full.antenna_rows_from(n_r))
                .expect("matching rows");
            let s_full = irc_sinr_direct(&full).expect("valid");
            let s_init = irc_sinr_direct(&base).expect("valid");
            let err = (sum - (s_full - s_init)).abs() / s_full.max(1.0);
            TrialOutcome {
                metric: err,
                passed: err <= tol.telescoping,
                instance: json!({ "full": ucs_json(&full), "initial_antennas": n_r }),
            }
        }
        Suite::Covariance => {
            let n_r = rng.random_range(1..=16);
            let n_int = rng.random_range(0..=8);
            let ucs = random::channel_set(&mut rng, n_r, n_int, sigma2);
            let d = irc_sinr_direct(&ucs).expect("valid");
            let o = irc_sinr_covariance_oracle(&ucs).expect("valid");
            let err = (d - o).abs() / o.max(f64::MIN_POSITIVE);
            TrialOutcome {
                metric: err,
                passed: err <= tol.covariance,
                instance: ucs_json(&ucs),
            }
        }
        Suite::Greedy => {
            let n_r = rng.random_range(1..=4);
            let n_int = rng.random_range(0..=4);
            let pool_size = rng.random_range(1..=5);
            let k = rng.random_range(0..=pool_size.min(3));
            let base = random::channel_set(&mut rng, n_r, n_int, sigma2);
            let rows: Vec<AntennaRow> = (0..pool_size).map(|_| random::antenna_row(&mut rng, n_int)).collect();
            let state = init_state(&base).expect("valid");
            let (greedy, trace) = greedy_select(&state, &mut CandidatePool::from_rows(rows.clone()), k)
                .expect("enough candidates");
            let (_, best) = exhaustive_best(&base, &CandidatePool::from_rows(rows.clone()), k)
                .expect("enough candidates");
            let excess = greedy.sinr() - best;
            let picks_ok = trace.picks.iter().all(|p| p.xi >= tol.min_gain);
            TrialOutcome {
                metric: excess,
                passed: excess <= tol.greedy_slack && picks_ok,
                instance: json!({
                    "base": ucs_json(&base),
                    "pool": rows.iter().map(row_json).collect::<Vec<_>>(),
                    "k": k,
                }),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: u32,
    pub worst: f64,
    pub failures: u32,
    /// First failing trial and its inputs.
    pub first_failure: Option<(u32, Value)>,
}

pub fn run_suite(suite: Suite, seed: u64, trials: u32, tol: &Tolerances) -> SuiteSummary {
    let mut summary = SuiteSummary {
        suite,
        trials,
        worst: match suite {
            Suite::Nonnegativity => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        },
        failures: 0,
        first_failure: None,
    };
    for trial in 0..trials {
        let out = run_trial(suite, seed, trial, tol);
        summary.worst = suite.worse(summary.worst, out.metric);
        if !out.passed {
            summary.failures += 1;
            if summary.first_failure.is_none() {
                summary.first_failure = Some((trial, out.instance));
            }
        }
    }
    summary
}

pub fn run_all(seed: u64, trials: u32, tol: &Tolerances) -> Vec<SuiteSummary> {
    Suite::ALL.iter().map(|&s| run_suite(s, seed, trials, tol)).collect()
}

pub fn render_summary(summaries: &[SuiteSummary], seed: u64) -> String {
    let mut s = String::new();
    for sum in summaries {
        s.push_str(&format!(
            "[{}] {:<14} trials={:<6} {} = {:.3e} failures={}\n",
            if sum.failures == 0 { "PASS" } else { "FAIL" },
            sum.suite.name(),
            sum.trials,
            sum.suite.metric_label(),
            sum.worst,
            sum.failures
        ));
        if let Some((trial, instance)) = &sum.first_failure {
            s.push_str(&format!(
                "    first failing instance (replay with --seed {seed} --replay {}:{trial}):\n    {}\n",
                sum.suite.name(),
                instance
            ));
        }
    }
    s
}
