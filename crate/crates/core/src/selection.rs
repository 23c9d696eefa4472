//! Greedy receive-antenna selection driven by the closed-form gain.
//!
//! Each round scores every unused candidate against the current state,
//! adds the best one and re-scores, since the gain of a candidate depends on
//! the inverse that the previous addition changed.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::irc::{irc_sinr_direct, AntennaRow, IrcError, IrcState, UserChannelSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("no unused candidates left in the pool")]
    EmptyPool,
    #[error("requested {requested} antennas but only {available} candidates are unused")]
    InsufficientCandidates { requested: usize, available: usize },
    #[error("duplicate candidate id {0}")]
    DuplicateId(usize),
    #[error(transparent)]
    Irc(#[from] IrcError),
}

pub type Result<T> = std::result::Result<T, SelectionError>;

/// Candidate antennas keyed by a stable id, with the ids already consumed.
#[derive(Debug, Clone, Default)]
pub struct CandidatePool {
    rows: BTreeMap<usize, AntennaRow>,
    used: BTreeSet<usize>,
}

impl CandidatePool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pool with ids `0..rows.len()`.
    pub fn from_rows(rows: impl IntoIterator<Item = AntennaRow>) -> Self {
        Self {
            rows: rows.into_iter().enumerate().collect(),
            used: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, id: usize, row: AntennaRow) -> Result<()> {
        if self.rows.contains_key(&id) {
            return Err(SelectionError::DuplicateId(id));
        }
        self.rows.insert(id, row);
        Ok(())
    }

    pub fn get(&self, id: usize) -> Option<&AntennaRow> {
        self.rows.get(&id)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_used(&self, id: usize) -> bool {
        self.used.contains(&id)
    }

    pub fn unused(&self) -> impl Iterator<Item = (usize, &AntennaRow)> {
        self.rows
            .iter()
            .filter(|(id, _)| !self.used.contains(id))
            .map(|(&id, row)| (id, row))
    }

    pub fn unused_count(&self) -> usize {
        self.rows.len() - self.used.len()
    }

    fn mark_used(&mut self, id: usize) {
        debug_assert!(self.rows.contains_key(&id));
        let fresh = self.used.insert(id);
        debug_assert!(fresh, "candidate {id} selected twice");
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pick {
    pub id: usize,
    pub xi: f64,
    pub sinr_after: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionTrace {
    pub picks: Vec<Pick>,
}

impl SelectionTrace {
    pub fn total_gain(&self) -> f64 {
        self.picks.iter().map(|p| p.xi).sum()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.picks.iter().map(|p| p.id).collect()
    }
}

/// Unused candidates with their gain, best first; ties go to the lower id.
pub fn rank_candidates(state: &IrcState, pool: &CandidatePool) -> Result<Vec<(usize, f64)>> {
    let unused: Vec<_> = pool.unused().collect();
    if unused.is_empty() {
        return Err(SelectionError::EmptyPool);
    }
    let mut scored = unused
        .par_iter()
        .map(|&(id, row)| Ok((id, state.gain(row)?.xi)))
        .collect::<std::result::Result<Vec<_>, IrcError>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored)
}

/// Adds `k` antennas from `pool`, one at a time, each time taking the
/// candidate with the largest gain. Picked ids are marked used in `pool`.
pub fn greedy_select(
    state: &IrcState,
    pool: &mut CandidatePool,
    k: usize,
) -> Result<(IrcState, SelectionTrace)> {
    if k > 0 && pool.unused_count() == 0 {
        return Err(SelectionError::EmptyPool);
    }
    if k > pool.unused_count() {
        return Err(SelectionError::InsufficientCandidates {
            requested: k,
            available: pool.unused_count(),
        });
    }
    let mut state = state.clone();
    let mut trace = SelectionTrace::default();
    for _ in 0..k {
        let (id, xi) = rank_candidates(&state, pool)?[0];
        state = state.add_antenna(&pool.rows[&id])?;
        pool.mark_used(id);
        trace.picks.push(Pick {
            id,
            xi,
            sinr_after: state.sinr(),
        });
    }
    Ok((state, trace))
}

/// Best achievable SINR when `k` unused candidates are appended to `base`,
/// found by evaluating every `k`-subset with [`irc_sinr_direct`] on the
/// stacked system. The final SINR does not depend on the order of addition,
/// so subsets cover all ordered selections. Exponential in pool size.
pub fn exhaustive_best(
    base: &UserChannelSet,
    pool: &CandidatePool,
    k: usize,
) -> Result<(Vec<usize>, f64)> {
    let ids: Vec<usize> = pool.unused().map(|(id, _)| id).collect();
    if k > ids.len() {
        return Err(SelectionError::InsufficientCandidates {
            requested: k,
            available: ids.len(),
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut subset = Vec::with_capacity(k);
    search(base, pool, &ids, 0, k, &mut subset, &mut best)?;
    Ok(best.expect("at least the empty subset is evaluated"))
}

fn search(
    base: &UserChannelSet,
    pool: &CandidatePool,
    ids: &[usize],
    start: usize,
    k: usize,
    subset: &mut Vec<usize>,
    best: &mut Option<(Vec<usize>, f64)>,
) -> Result<()> {
    if subset.len() == k {
        let mut sys = base.clone();
        for id in subset.iter() {
            sys = sys.with_antenna(&pool.rows[id])?;
        }
        let sinr = irc_sinr_direct(&sys)?;
        if best.as_ref().is_none_or(|(_, b)| sinr > *b) {
            *best = Some((subset.clone(), sinr));
        }
        return Ok(());
    }
    for i in start..ids.len() {
        subset.push(ids[i]);
        search(base, pool, ids, i + 1, k, subset, best)?;
        subset.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::irc::init_state;
    use crate::random;

    #[test]
    fn single_candidate() {
        let full = golden::example_channel_set();
        let st = init_state(&full.first_antennas(4)).unwrap();
        let row = full.antenna_row(4);
        let pool = CandidatePool::from_rows([row.clone()]);
        let ranked = rank_candidates(&st, &pool).unwrap();
        assert_eq!(ranked, vec![(0, st.gain(&row).unwrap().xi)]);
    }

    #[test]
    fn worked_example_outranks_null_antenna() {
        let full = golden::example_channel_set();
        let st = init_state(&full.first_antennas(4)).unwrap();
        let mut pool = CandidatePool::new();
        pool.insert(0, AntennaRow::null(3)).unwrap();
        pool.insert(1, full.antenna_row(4)).unwrap();
        let ranked = rank_candidates(&st, &pool).unwrap();
        assert_eq!(ranked[0].0, 1);
        assert!((ranked[0].1 - golden::EXAMPLE_GAIN).abs() < 5e-4);
        assert_eq!(ranked[1], (0, 0.0));
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let st = init_state(&random::channel_set(&mut random::substream(1, 0, 0), 3, 2, 0.1)).unwrap();
        let mut pool = CandidatePool::new();
        for id in [7, 3, 5] {
            pool.insert(id, AntennaRow::null(2)).unwrap();
        }
        let ids: Vec<_> = rank_candidates(&st, &pool).unwrap().into_iter().map(|r| r.0).collect();
        assert_eq!(ids, vec![3, 5, 7]);
    }

    #[test]
    fn ranking_matches_brute_force() {
        let mut rng = random::substream(2, 0, 0);
        let base = random::channel_set(&mut rng, 3, 3, 0.1);
        let st = init_state(&base).unwrap();
        let pool = CandidatePool::from_rows((0..5).map(|_| random::antenna_row(&mut rng, 3)));
        let ranked = rank_candidates(&st, &pool).unwrap();
        let s0 = irc_sinr_direct(&base).unwrap();
        let mut brute: Vec<(usize, f64)> = pool
            .unused()
            .map(|(id, row)| (id, irc_sinr_direct(&base.with_antenna(row).unwrap()).unwrap() - s0))
            .collect();
        brute.sort_by(|a, b| b.1.total_cmp(&a.1));
        assert_eq!(
            ranked.iter().map(|r| r.0).collect::<Vec<_>>(),
            brute.iter().map(|r| r.0).collect::<Vec<_>>()
        );
        for ((_, a), (_, b)) in ranked.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_picks_and_errors() {
        let st = init_state(&random::channel_set(&mut random::substream(3, 0, 0), 2, 1, 0.1)).unwrap();
        let mut empty = CandidatePool::new();
        let (s, trace) = greedy_select(&st, &mut empty, 0).unwrap();
        assert_eq!(s, st);
        assert!(trace.picks.is_empty());
        assert_eq!(greedy_select(&st, &mut empty, 1).unwrap_err(), SelectionError::EmptyPool);
        assert_eq!(rank_candidates(&st, &empty).unwrap_err(), SelectionError::EmptyPool);

        let mut pool = CandidatePool::from_rows([AntennaRow::null(1)]);
        assert_eq!(
            greedy_select(&st, &mut pool, 2).unwrap_err(),
            SelectionError::InsufficientCandidates { requested: 2, available: 1 }
        );
        assert_eq!(pool.insert(0, AntennaRow::null(1)).unwrap_err(), SelectionError::DuplicateId(0));
    }

    #[test]
    fn greedy_marks_used_and_accumulates() {
        let mut rng = random::substream(4, 0, 0);
        let base = random::channel_set(&mut rng, 2, 3, 0.1);
        let st = init_state(&base).unwrap();
        let mut pool = CandidatePool::from_rows((0..4).map(|_| random::antenna_row(&mut rng, 3)));
        let (end, trace) = greedy_select(&st, &mut pool, 3).unwrap();
        assert_eq!(pool.unused_count(), 1);
        assert!(trace.ids().iter().all(|&id| pool.is_used(id)));
        assert!((end.sinr() - (st.sinr() + trace.total_gain())).abs() < 1e-9);
        for w in trace.picks.windows(2) {
            assert!(w[1].sinr_after >= w[0].sinr_after - 1e-12);
        }
        let (_, best) = exhaustive_best(&base, &CandidatePool::from_rows((0..4).map(|i| pool.get(i).unwrap().clone())), 3).unwrap();
        assert!(end.sinr() <= best + 1e-9);
    }
}
