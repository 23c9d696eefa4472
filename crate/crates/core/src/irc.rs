//! IRC-SINR evaluation and the incremental per-antenna gain.
//!
//! For a desired channel `h` (length `N_R`) and interferer matrix `P`
//! (`N_R × (Z−1)`), the combiner output SINR is
//!
//! ```text
//! SINR = hᴴh/σ² − hᴴP (σ²I + PᴴP)⁻¹ Pᴴh / σ²
//! ```
//!
//! Appending one antenna that observes the desired UE as `h̃` and the
//! interferers as the row `ρ` raises the SINR by
//!
//! ```text
//! ξ = |y − h̃*|² / (σ²(1 + t)),   y = cᴴAρᴴ,   t = ρAρᴴ
//! ```
//!
//! with `A = (σ²I + PᴴP)⁻¹` and `c = Pᴴh` taken at the current antenna count.
//! [`IrcState`] caches `A`, `c` and `hᴴh` so that each addition costs
//! `O((Z−1)²)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    hermitian_inverse, hermitian_solve, rank_one_inverse_update, ComplexMatrix, ComplexVector,
    LinalgError,
};

/// Tolerance on the imaginary part of `ρAρᴴ`, relative to `max(1, |t|)`.
const QUAD_FORM_IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrcError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),
    #[error("noise variance must be positive and finite, got {0}")]
    InvalidNoiseVariance(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, IrcError>;

/// One UE's desired channel, the channels of the other `Z−1` UEs (as
/// columns of `p`) and the per-antenna noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannelSet {
    h: ComplexVector,
    p: ComplexMatrix,
    sigma2: f64,
}

impl UserChannelSet {
    pub fn new(h: ComplexVector, p: ComplexMatrix, sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(IrcError::InvalidNoiseVariance(sigma2));
        }
        if p.cols() == 0 {
            // A rows×0 matrix carries no data; normalize the row count.
            return Ok(Self {
                p: ComplexMatrix::zeros(h.len(), 0),
                h,
                sigma2,
            });
        }
        if p.rows() != h.len() {
            return Err(IrcError::DimensionMismatch(format!(
                "desired channel has {} antennas but interferer matrix has {} rows",
                h.len(),
                p.rows()
            )));
        }
        Ok(Self { h, p, sigma2 })
    }

    /// Channel set with no interferers (`Z = 1`).
    pub fn without_interferers(h: ComplexVector, sigma2: f64) -> Result<Self> {
        let n = h.len();
        Self::new(h, ComplexMatrix::zeros(n, 0), sigma2)
    }

    pub fn h(&self) -> &ComplexVector {
        &self.h
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn n_antennas(&self) -> usize {
        self.h.len()
    }

    pub fn n_interferers(&self) -> usize {
        self.p.cols()
    }

    /// The same system restricted to the first `n` antennas.
    pub fn first_antennas(&self, n: usize) -> UserChannelSet {
        let n = n.min(self.n_antennas());
        UserChannelSet {
            h: ComplexVector::new(self.h.as_slice()[..n].to_vec()).expect("finite subset"),
            p: self.p.top_rows(n),
            sigma2: self.sigma2,
        }
    }

    /// The observation of antenna `i` as an [`AntennaRow`].
    pub fn antenna_row(&self, i: usize) -> AntennaRow {
        AntennaRow {
            h_new: self.h[i],
            rho: self.p.row(i),
        }
    }

    /// Rows `from..` as a sequence of antenna additions.
    pub fn antenna_rows_from(&self, from: usize) -> Vec<AntennaRow> {
        (from..self.n_antennas()).map(|i| self.antenna_row(i)).collect()
    }

    /// The system extended by one antenna.
    pub fn with_antenna(&self, row: &AntennaRow) -> Result<UserChannelSet> {
        if row.rho.len() != self.n_interferers() {
            return Err(IrcError::DimensionMismatch(format!(
                "antenna row sees {} interferers, system has {}",
                row.rho.len(),
                self.n_interferers()
            )));
        }
        let mut h = self.h.clone().into_vec();
        h.push(row.h_new);
        let mut p = self.p.clone();
        p.push_row(&row.rho)?;
        Ok(UserChannelSet {
            h: ComplexVector::new(h)?,
            p,
            sigma2: self.sigma2,
        })
    }
}

/// What a newly added antenna observes: the desired UE's channel `h_new`
/// and the interferers' channels `rho`, read as a row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaRow {
    pub h_new: Complex64,
    pub rho: ComplexVector,
}

impl AntennaRow {
    pub fn new(h_new: Complex64, rho: ComplexVector) -> Result<Self> {
        if !(h_new.re.is_finite() && h_new.im.is_finite()) {
            return Err(IrcError::NonFiniteInput("antenna row desired channel"));
        }
        Ok(Self { h_new, rho })
    }

    /// An antenna that sees nothing.
    pub fn null(n_interferers: usize) -> Self {
        Self {
            h_new: Complex64::new(0.0, 0.0),
            rho: ComplexVector::zeros(n_interferers),
        }
    }
}

/// Incremental combiner state at `n_antennas` receive antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct IrcState {
    n_antennas: usize,
    /// `(σ²I + PᴴP)⁻¹`
    a: ComplexMatrix,
    /// `Pᴴh`
    c: ComplexVector,
    /// `hᴴh`
    g: f64,
    sigma2: f64,
    sinr: f64,
}

impl IrcState {
    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_interferers(&self) -> usize {
        self.c.len()
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn projected(&self) -> &ComplexVector {
        &self.c
    }

    pub fn desired_energy(&self) -> f64 {
        self.g
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sinr(&self) -> f64 {
        self.sinr
    }

    /// `(g − cᴴAc)/σ²` evaluated from the cached terms.
    pub fn sinr_from_cache(&self) -> f64 {
        let ac = self.a.matvec(&self.c).expect("cached dimensions agree");
        let quad = self.c.dot(&ac).expect("cached dimensions agree");
        (self.g - quad.re) / self.sigma2
    }

    fn check_row(&self, row: &AntennaRow) -> Result<()> {
        if row.rho.len() != self.n_interferers() {
            return Err(IrcError::DimensionMismatch(format!(
                "antenna row sees {} interferers, state tracks {}",
                row.rho.len(),
                self.n_interferers()
            )));
        }
        Ok(())
    }

    /// Closed-form SINR increase from appending `row`.
    pub fn gain(&self, row: &AntennaRow) -> Result<GainTerms> {
        self.check_row(row)?;
        if self.n_interferers() == 0 {
            return Ok(GainTerms {
                y: Complex64::new(0.0, 0.0),
                t: 0.0,
                xi: row.h_new.norm_sqr() / self.sigma2,
            });
        }
        // u = Aρᴴ
        let rho_h = ComplexVector::new(row.rho.iter().map(|z| z.conj()).collect())?;
        let u = self.a.matvec(&rho_h)?;
        let y = self.c.dot(&u)?;
        let t_c: Complex64 = row.rho.iter().zip(u.iter()).map(|(r, x)| r * x).sum();
        debug_assert!(
            t_c.im.abs() <= QUAD_FORM_IMAG_TOL * t_c.re.abs().max(1.0),
            "ρAρᴴ has imaginary part {:e}",
            t_c.im
        );
        let t = t_c.re;
        let xi = (y - row.h_new.conj()).norm_sqr() / (self.sigma2 * (1.0 + t));
        Ok(GainTerms { y, t, xi })
    }

    /// State after appending `row`. The new SINR is the old one plus the
    /// closed-form gain.
    pub fn add_antenna(&self, row: &AntennaRow) -> Result<IrcState> {
        let terms = self.gain(row)?;
        let a = rank_one_inverse_update(&self.a, &row.rho)?;
        let c = ComplexVector::new(
            self.c
                .iter()
                .zip(row.rho.iter())
                .map(|(ci, ri)| ci + ri.conj() * row.h_new)
                .collect(),
        )?;
        Ok(IrcState {
            n_antennas: self.n_antennas + 1,
            a,
            c,
            g: self.g + row.h_new.norm_sqr(),
            sigma2: self.sigma2,
            sinr: self.sinr + terms.xi,
        })
    }
}

/// Intermediate quantities of the closed-form gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainTerms {
    /// `cᴴAρᴴ`
    pub y: Complex64,
    /// `ρAρᴴ`, real part
    pub t: f64,
    /// `|y − h̃*|² / (σ²(1 + t))`
    pub xi: f64,
}

/// SINR of the combiner, evaluated by solving `(σ²I + PᴴP) x = Pᴴh`.
pub fn irc_sinr_direct(ucs: &UserChannelSet) -> Result<f64> {
    let g = ucs.h.norm_sqr();
    if ucs.n_interferers() == 0 {
        return Ok(g / ucs.sigma2);
    }
    let c = ucs.p.adjoint_matvec(&ucs.h)?;
    let m = ucs.p.regularized_gram(ucs.sigma2);
    let x = hermitian_solve(&m, &c.to_column())?;
    let quad = c.dot(&x.column(0))?;
    let sinr = (g - quad.re) / ucs.sigma2;
    if !sinr.is_finite() {
        return Err(IrcError::NonFiniteInput("channel set"));
    }
    Ok(sinr.max(0.0))
}

/// SINR via the interference-plus-noise covariance, `hᴴ(σ²I + PPᴴ)⁻¹h`.
/// Independent of [`irc_sinr_direct`]; both agree by the matrix inversion
/// lemma.
pub fn irc_sinr_covariance_oracle(ucs: &UserChannelSet) -> Result<f64> {
    let r = ucs.p.regularized_outer_gram(ucs.sigma2);
    let x = hermitian_solve(&r, &ucs.h.to_column())?;
    let sinr = ucs.h.dot(&x.column(0))?.re;
    if !sinr.is_finite() {
        return Err(IrcError::NonFiniteInput("channel set"));
    }
    Ok(sinr.max(0.0))
}

/// Builds the incremental state for `ucs`.
pub fn init_state(ucs: &UserChannelSet) -> Result<IrcState> {
    let a = hermitian_inverse(&ucs.p.regularized_gram(ucs.sigma2))?;
    let c = ucs.p.adjoint_matvec(&ucs.h)?;
    let mut state = IrcState {
        n_antennas: ucs.n_antennas(),
        a,
        c,
        g: ucs.h.norm_sqr(),
        sigma2: ucs.sigma2,
        sinr: 0.0,
    };
    state.sinr = state.sinr_from_cache();
    Ok(state)
}

pub fn gain_one_antenna(state: &IrcState, row: &AntennaRow) -> Result<GainTerms> {
    state.gain(row)
}

pub fn add_antenna(state: &IrcState, row: &AntennaRow) -> Result<IrcState> {
    state.add_antenna(row)
}

/// Adds `rows` in order and returns the summed gain with the final state.
pub fn cumulative_gain(state: &IrcState, rows: &[AntennaRow]) -> Result<(f64, IrcState)> {
    rows.iter()
        .try_fold((0.0, state.clone()), |(total, st), row| {
            let xi = st.gain(row)?.xi;
            Ok((total + xi, st.add_antenna(row)?))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_instance() -> UserChannelSet {
        let h = ComplexVector::from_parts(&[(0.5, 0.1), (-0.3, 0.7), (0.2, -0.2), (0.9, 0.0)]).unwrap();
        let p = ComplexMatrix::from_rows(&[
            &[(0.1, 0.4), (-0.6, 0.2)],
            &[(0.8, -0.1), (0.3, 0.3)],
            &[(-0.2, 0.5), (0.0, -0.9)],
            &[(0.4, 0.4), (0.7, 0.1)],
        ])
        .unwrap();
        UserChannelSet::new(h, p, 0.2).unwrap()
    }

    #[test]
    fn rejects_invalid_sets() {
        let h = ComplexVector::zeros(3);
        assert_eq!(
            UserChannelSet::new(h.clone(), ComplexMatrix::zeros(3, 0), 0.0),
            Err(IrcError::InvalidNoiseVariance(0.0))
        );
        assert!(matches!(
            UserChannelSet::new(h, ComplexMatrix::zeros(2, 1), 0.1),
            Err(IrcError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn no_interference_is_mrc() {
        let h = ComplexVector::from_parts(&[(0.6, 0.0), (0.0, 0.8)]).unwrap();
        let ucs = UserChannelSet::without_interferers(h, 0.1).unwrap();
        assert!((irc_sinr_direct(&ucs).unwrap() - 10.0).abs() < 1e-12);
        assert!((irc_sinr_covariance_oracle(&ucs).unwrap() - 10.0).abs() < 1e-12);
        let st = init_state(&ucs).unwrap();
        assert_eq!(st.inverse().rows(), 0);
        assert!(st.projected().is_empty());
        assert!((st.sinr() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn direct_agrees_with_covariance_form() {
        let ucs = small_instance();
        let d = irc_sinr_direct(&ucs).unwrap();
        let o = irc_sinr_covariance_oracle(&ucs).unwrap();
        assert!((d - o).abs() <= 1e-9 * o, "{d} vs {o}");
    }

    #[test]
    fn init_state_matches_direct() {
        let ucs = small_instance();
        let st = init_state(&ucs).unwrap();
        let d = irc_sinr_direct(&ucs).unwrap();
        assert!((st.sinr() - d).abs() <= 1e-12 * d.max(1.0));
        assert_eq!(st.n_antennas(), 4);
    }

    #[test]
    fn gain_of_null_interference_row() {
        let ucs = small_instance();
        let st = init_state(&ucs).unwrap();
        let row = AntennaRow::new(c(1.0, 0.0), ComplexVector::zeros(2)).unwrap();
        let g = UserChannelSet::without_interferers(ComplexVector::zeros(1), 0.1).unwrap();
        let st0 = init_state(&g).unwrap();
        let terms = st0.gain(&AntennaRow::new(c(1.0, 0.0), ComplexVector::zeros(0)).unwrap()).unwrap();
        assert_eq!(terms.y, c(0.0, 0.0));
        assert_eq!(terms.t, 0.0);
        assert!((terms.xi - 10.0).abs() < 1e-12);
        // With interferers present, ρ = 0 still gives t = 0.
        let terms = st.gain(&row).unwrap();
        assert_eq!(terms.t, 0.0);
        assert!(terms.xi >= 0.0);
    }

    #[test]
    fn gain_equals_direct_difference() {
        let full = small_instance();
        let base = full.first_antennas(3);
        let st = init_state(&base).unwrap();
        let xi = st.gain(&full.antenna_row(3)).unwrap().xi;
        let diff = irc_sinr_direct(&full).unwrap() - irc_sinr_direct(&base).unwrap();
        assert!((xi - diff).abs() < 1e-9, "{xi} vs {diff}");
    }

    #[test]
    fn gain_rejects_wrong_row_length() {
        let st = init_state(&small_instance()).unwrap();
        assert!(matches!(
            st.gain(&AntennaRow::null(3)),
            Err(IrcError::DimensionMismatch(_))
        ));
        assert!(st.add_antenna(&AntennaRow::null(1)).is_err());
    }

    #[test]
    fn null_antenna_changes_nothing() {
        let st = init_state(&small_instance()).unwrap();
        let next = st.add_antenna(&AntennaRow::null(2)).unwrap();
        assert_eq!(next.sinr(), st.sinr());
        assert_eq!(next.desired_energy(), st.desired_energy());
        assert_eq!(next.inverse(), st.inverse());
        assert_eq!(next.n_antennas(), st.n_antennas() + 1);
    }

    #[test]
    fn add_antenna_updates_caches() {
        let full = small_instance();
        let st = init_state(&full.first_antennas(2)).unwrap();
        let (total, end) = cumulative_gain(&st, &full.antenna_rows_from(2)).unwrap();
        let reference = init_state(&full).unwrap();
        assert!(end.inverse().max_abs_diff(reference.inverse()).unwrap() < 1e-12);
        let dc: f64 = end
            .projected()
            .iter()
            .zip(reference.projected().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dc < 1e-14);
        assert!((end.desired_energy() - reference.desired_energy()).abs() < 1e-14);
        assert!((end.sinr() - end.sinr_from_cache()).abs() <= 1e-9 * end.sinr());
        assert!((st.sinr() + total - end.sinr()).abs() < 1e-12);
    }

    #[test]
    fn empty_chain() {
        let st = init_state(&small_instance()).unwrap();
        let (total, end) = cumulative_gain(&st, &[]).unwrap();
        assert_eq!(total, 0.0);
        assert_eq!(end, st);
    }

    // Frozen from an independent double-precision evaluation of the
    // stacked-system formula on the embedded example inputs.
    const EXAMPLE_SINR_4: f64 = 5.400387353446352;
    const EXAMPLE_SINR_5: f64 = 5.897535472753472;

    #[test]
    fn worked_example() {
        let full = golden::example_channel_set();
        let base = full.first_antennas(4);
        let s4 = irc_sinr_direct(&base).unwrap();
        let s5 = irc_sinr_direct(&full).unwrap();
        assert!((s4 - EXAMPLE_SINR_4).abs() < 1e-9, "{s4}");
        assert!((s5 - EXAMPLE_SINR_5).abs() < 1e-9, "{s5}");

        let st = init_state(&base).unwrap();
        assert!((st.sinr() - s4).abs() < 1e-9);
        let row = full.antenna_row(4);
        let xi = st.gain(&row).unwrap().xi;
        assert!((xi - golden::EXAMPLE_GAIN).abs() < 5e-4, "{xi}");
        assert!((xi - (s5 - s4)).abs() < 1e-9);
        let next = st.add_antenna(&row).unwrap();
        assert!((next.sinr() - (st.sinr() + xi)).abs() < 1e-15);
        let (total, _) = cumulative_gain(&st, &[row]).unwrap();
        assert_eq!(total, xi);
    }
}
