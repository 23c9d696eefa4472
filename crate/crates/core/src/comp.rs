//! Uplink CoMP Monte-Carlo harness.
//!
//! `n_cells` base stations with `antennas_per_bs` antennas each serve
//! `ues_per_cell` single-antenna UEs per cell. Own-cell channels have unit
//! energy and cross-cell channels have energy `1/SIR`. For every UE three
//! SINRs are computed: single-cell (own BS antennas only), multi-cell (all
//! antennas stacked, own BS first) and the multi-cell value predicted by
//! starting at the single-cell state and adding the remaining antennas one
//! at a time with the closed-form gain.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::irc::{cumulative_gain, init_state, irc_sinr_direct, IrcError, UserChannelSet};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::random::{gaussian_vector, substream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("unknown UE {0}")]
    UnknownUe(usize),
    #[error("unknown base station {0}")]
    UnknownBs(usize),
    #[error("base-station subset is empty")]
    EmptyBsSubset,
    #[error("spectral mean of an empty list")]
    EmptyList,
    #[error("SNR {0} is negative or not a number")]
    NegativeSnr(f64),
    #[error(transparent)]
    Irc(#[from] IrcError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// How per-UE SINRs of all iterations at one SIR point are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// One spectral mean over every (UE, iteration) sample.
    #[default]
    Pooled,
    /// Spectral mean over UEs per iteration, then the arithmetic mean.
    PerIteration,
}

impl std::str::FromStr for Aggregation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pooled" => Ok(Self::Pooled),
            "per-iteration" => Ok(Self::PerIteration),
            other => Err(format!("unknown aggregation '{other}' (expected pooled or per-iteration)")),
        }
    }
}

/// Default SIR sweep: −10 dB to 20 dB in 5 dB steps.
pub fn default_sir_points_db() -> Vec<f64> {
    (0..7).map(|i| -10.0 + 5.0 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_cells: usize,
    pub ues_per_cell: usize,
    pub antennas_per_bs: usize,
    pub sigma2: f64,
    pub sir_points_db: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    pub aggregation: Aggregation,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_cells: 4,
            ues_per_cell: 2,
            antennas_per_bs: 4,
            sigma2: 0.1,
            sir_points_db: default_sir_points_db(),
            iterations: 25,
            seed: 42,
            aggregation: Aggregation::Pooled,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_cells", self.n_cells),
            ("ues_per_cell", self.ues_per_cell),
            ("antennas_per_bs", self.antennas_per_bs),
            ("iterations", self.iterations),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(SimError::InvalidConfig(format!("{name} must be at least 1")));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        if self.sir_points_db.is_empty() {
            return Err(SimError::InvalidConfig("sir_points_db is empty".into()));
        }
        if let Some(bad) = self.sir_points_db.iter().find(|v| !v.is_finite()) {
            return Err(SimError::InvalidConfig(format!("non-finite SIR point {bad}")));
        }
        if self.sir_points_db.len() > u32::MAX as usize || self.iterations > u32::MAX as usize {
            return Err(SimError::InvalidConfig("sweep too large".into()));
        }
        Ok(())
    }

    pub fn n_ues(&self) -> usize {
        self.n_cells * self.ues_per_cell
    }
}

/// Channels of every (UE, BS) pair for one draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_cells: usize,
    antennas_per_bs: usize,
    /// Indexed `ue * n_cells + bs`.
    channels: Vec<ComplexVector>,
    own_cell: Vec<usize>,
}

impl ChannelRealization {
    pub fn n_ues(&self) -> usize {
        self.own_cell.len()
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn antennas_per_bs(&self) -> usize {
        self.antennas_per_bs
    }

    pub fn own_cell(&self, ue: usize) -> Result<usize> {
        self.own_cell.get(ue).copied().ok_or(SimError::UnknownUe(ue))
    }

    pub fn channel(&self, ue: usize, bs: usize) -> Result<&ComplexVector> {
        if ue >= self.n_ues() {
            return Err(SimError::UnknownUe(ue));
        }
        if bs >= self.n_cells {
            return Err(SimError::UnknownBs(bs));
        }
        Ok(&self.channels[ue * self.n_cells + bs])
    }

    /// Own BS first, then the others in ascending id.
    pub fn canonical_bs_order(&self, ue: usize) -> Result<Vec<usize>> {
        let own = self.own_cell(ue)?;
        Ok(std::iter::once(own)
            .chain((0..self.n_cells).filter(|&b| b != own))
            .collect())
    }
}

fn unit_direction<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ComplexVector {
    loop {
        let v = gaussian_vector(rng, len);
        let n2 = v.norm_sqr();
        if n2 > f64::MIN_POSITIVE {
            return v.scaled(n2.sqrt().recip());
        }
    }
}

fn rescale_to_energy(v: ComplexVector, energy: f64) -> ComplexVector {
    let n2 = v.norm_sqr();
    v.scaled((energy / n2).sqrt())
}

/// Draws one realization. Own-cell vectors are rescaled to unit energy,
/// cross-cell vectors to `10^(−sir_db/10)`.
pub fn generate_realization<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    sir_db: f64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    cfg.validate()?;
    let cross_energy = 10f64.powf(-sir_db / 10.0);
    let n_ues = cfg.n_ues();
    let own_cell: Vec<usize> = (0..n_ues).map(|ue| ue / cfg.ues_per_cell).collect();
    let mut channels = Vec::with_capacity(n_ues * cfg.n_cells);
    for &own in &own_cell {
        for bs in 0..cfg.n_cells {
            let dir = unit_direction(rng, cfg.antennas_per_bs);
            let energy = if bs == own { 1.0 } else { cross_energy };
            channels.push(rescale_to_energy(dir, energy));
        }
    }
    Ok(ChannelRealization {
        n_cells: cfg.n_cells,
        antennas_per_bs: cfg.antennas_per_bs,
        channels,
        own_cell,
    })
}

/// Stacks the channels of `ue` and of every other UE over the antennas of
/// `bs_subset`, in subset order.
pub fn per_ue_channel_set(
    real: &ChannelRealization,
    ue: usize,
    bs_subset: &[usize],
    sigma2: f64,
) -> Result<UserChannelSet> {
    if ue >= real.n_ues() {
        return Err(SimError::UnknownUe(ue));
    }
    if bs_subset.is_empty() {
        return Err(SimError::EmptyBsSubset);
    }
    if let Some(&bad) = bs_subset.iter().find(|&&b| b >= real.n_cells) {
        return Err(SimError::UnknownBs(bad));
    }
    let stack = |u: usize| {
        ComplexVector::concat(bs_subset.iter().map(|&b| &real.channels[u * real.n_cells + b]))
    };
    let h = stack(ue);
    let others: Vec<ComplexVector> = (0..real.n_ues()).filter(|&u| u != ue).map(stack).collect();
    let p = ComplexMatrix::from_columns(h.len(), &others).map_err(IrcError::from)?;
    Ok(UserChannelSet::new(h, p, sigma2)?)
}

/// `(∏(1 + sᵢ))^(1/A) − 1`, evaluated in the log domain.
pub fn spectral_mean(snrs: &[f64]) -> Result<f64> {
    if snrs.is_empty() {
        return Err(SimError::EmptyList);
    }
    if let Some(&bad) = snrs.iter().find(|s| s.is_nan() || **s < 0.0) {
        return Err(SimError::NegativeSnr(bad));
    }
    let mean_log = snrs.iter().map(|s| s.ln_1p()).sum::<f64>() / snrs.len() as f64;
    Ok(mean_log.exp_m1())
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// SINRs of one UE in one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeSinrs {
    pub single_cell: f64,
    pub multi_cell: f64,
    pub multi_cell_theory: f64,
}

/// Per-UE SINRs for one realization.
pub fn evaluate_realization(real: &ChannelRealization, sigma2: f64) -> Result<Vec<UeSinrs>> {
    (0..real.n_ues())
        .map(|ue| {
            let order = real.canonical_bs_order(ue)?;
            let multi = per_ue_channel_set(real, ue, &order, sigma2)?;
            let single = multi.first_antennas(real.antennas_per_bs);
            let single_sinr = irc_sinr_direct(&single)?;
            let multi_sinr = irc_sinr_direct(&multi)?;
            let state = init_state(&single)?;
            let (gain, _) = cumulative_gain(&state, &multi.antenna_rows_from(real.antennas_per_bs))?;
            Ok(UeSinrs {
                single_cell: single_sinr,
                multi_cell: multi_sinr,
                multi_cell_theory: single_sinr + gain,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sir_db: f64,
    pub single_cell_sm_db: f64,
    pub multi_cell_sim_sm_db: f64,
    pub multi_cell_theory_sm_db: f64,
}

fn aggregate(per_iter: &[Vec<f64>], mode: Aggregation) -> Result<f64> {
    match mode {
        Aggregation::Pooled => {
            let flat: Vec<f64> = per_iter.iter().flatten().copied().collect();
            spectral_mean(&flat)
        }
        Aggregation::PerIteration => {
            let sms = per_iter.iter().map(|v| spectral_mean(v)).collect::<Result<Vec<_>>>()?;
            Ok(sms.iter().sum::<f64>() / sms.len() as f64)
        }
    }
}

/// Runs the full SIR sweep. Iteration `i` at SIR index `j` draws from
/// substream `(seed, j, i)`, so the output does not depend on scheduling.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.sir_points_db
        .iter()
        .enumerate()
        .map(|(j, &sir_db)| {
            let samples = (0..cfg.iterations)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(cfg.seed, j as u32, i as u32);
                    let real = generate_realization(cfg, sir_db, &mut rng)?;
                    evaluate_realization(&real, cfg.sigma2)
                })
                .collect::<Result<Vec<_>>>()?;
            let pick = |f: fn(&UeSinrs) -> f64| -> Vec<Vec<f64>> {
                samples.iter().map(|it| it.iter().map(f).collect()).collect()
            };
            Ok(SweepRow {
                sir_db,
                single_cell_sm_db: to_db(aggregate(&pick(|s| s.single_cell), cfg.aggregation)?),
                multi_cell_sim_sm_db: to_db(aggregate(&pick(|s| s.multi_cell), cfg.aggregation)?),
                multi_cell_theory_sm_db: to_db(aggregate(
                    &pick(|s| s.multi_cell_theory),
                    cfg.aggregation,
                )?),
            })
        })
        .collect()
}
