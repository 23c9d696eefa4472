//! Checks the embedded worked example: SINR with 4 and 5 antennas, the
//! closed-form gain of the fifth antenna and the direct difference.

use std::fmt::Write as _;

use ircgain::golden;
use ircgain::{init_state, irc_sinr_direct, IrcError, UserChannelSet};

use crate::output::six_digits;

/// Published values the computation is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectations {
    /// Unordered pair of SINRs for the base and extended antenna counts.
    pub sinrs: [f64; 2],
    pub gain: f64,
    pub tolerance: f64,
    /// Closed form vs. direct difference.
    pub identity_tolerance: f64,
}

impl Expectations {
    pub fn published() -> Self {
        Self {
            sinrs: golden::EXAMPLE_SINRS,
            gain: golden::EXAMPLE_GAIN,
            tolerance: golden::EXAMPLE_TOL,
            identity_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub sinr_base: f64,
    pub sinr_extended: f64,
    pub xi: f64,
    pub direct_difference: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, base_antennas: usize) -> String {
        let mut s = String::new();
        let n = base_antennas;
        let _ = writeln!(s, "IRC-SINR with {n} antennas      : {:.4} ({})", self.sinr_base, six_digits(self.sinr_base));
        let _ = writeln!(
            s,
            "IRC-SINR with {} antennas      : {:.4} ({})",
            n + 1,
            self.sinr_extended,
            six_digits(self.sinr_extended)
        );
        let _ = writeln!(s, "closed-form gain xi           : {:.4} ({})", self.xi, six_digits(self.xi));
        let _ = writeln!(
            s,
            "direct difference             : {:.4} ({})",
            self.direct_difference,
            six_digits(self.direct_difference)
        );
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "ok" } else { "MISMATCH" }, c.name, c.detail);
        }
        s
    }
}

pub fn verify(full: &UserChannelSet, base_antennas: usize, want: &Expectations) -> Result<VerifyReport, IrcError> {
    let base = full.first_antennas(base_antennas);
    let sinr_base = irc_sinr_direct(&base)?;
    let sinr_extended = irc_sinr_direct(&full.first_antennas(base_antennas + 1))?;
    let xi = init_state(&base)?.gain(&full.antenna_row(base_antennas))?.xi;
    let direct_difference = sinr_extended - sinr_base;

    let identity_err = (xi - direct_difference).abs();
    let gain_err = (xi - want.gain).abs();
    let mut got = [sinr_base, sinr_extended];
    got.sort_by(f64::total_cmp);
    let mut expected = want.sinrs;
    expected.sort_by(f64::total_cmp);
    let errs: Vec<f64> = got.iter().zip(&expected).map(|(g, e)| (g - e).abs()).collect();
    let set_err = errs.iter().copied().fold(0.0, f64::max);

    let checks = vec![
        Check {
            name: "closed form equals direct difference",
            passed: identity_err <= want.identity_tolerance,
            detail: format!("|xi - diff| = {identity_err:.3e}, tolerance {:.0e}", want.identity_tolerance),
        },
        Check {
            name: "gain matches published value",
            passed: gain_err <= want.tolerance,
            detail: format!(
                "xi = {} vs {}, |error| = {gain_err:.3e}, tolerance {:.0e}",
                six_digits(xi),
                want.gain,
                want.tolerance
            ),
        },
        Check {
            name: "SINRs match published pair (unordered)",
            passed: set_err <= want.tolerance,
            detail: format!(
                "computed {{{}, {}}} vs {{{}, {}}}, |errors| = {{{:.3e}, {:.3e}}}, tolerance {:.0e}",
                six_digits(got[0]),
                six_digits(got[1]),
                expected[0],
                expected[1],
                errs[0],
                errs[1],
                want.tolerance
            ),
        },
    ];
    Ok(VerifyReport {
        sinr_base,
        sinr_extended,
        xi,
        direct_difference,
        checks,
    })
}

pub fn verify_embedded(want: &Expectations) -> Result<VerifyReport, IrcError> {
    verify(&golden::example_channel_set(), golden::EXAMPLE_BASE_ANTENNAS, want)
}
