//! Worked numerical example: a 5-antenna receiver, one desired UE and three
//! interferers, σ² = 0.1.

use crate::irc::UserChannelSet;
use crate::linalg::{ComplexMatrix, ComplexVector};

pub const EXAMPLE_SIGMA2: f64 = 0.1;

/// Antenna count before the fifth antenna is added.
pub const EXAMPLE_BASE_ANTENNAS: usize = 4;

/// Published SINR values for 4 and 5 antennas, as an unordered pair.
pub const EXAMPLE_SINRS: [f64; 2] = [5.3994, 5.8966];

/// Published gain from the fifth antenna.
pub const EXAMPLE_GAIN: f64 = 0.4972;

/// Tolerance on the published four-decimal values.
pub const EXAMPLE_TOL: f64 = 5e-4;

pub const EXAMPLE_H: [(f64, f64); 5] = [
    (0.0841, 0.0833),
    (-0.2455, -0.0302),
    (-0.5794, 0.5822),
    (0.3141, 0.3893),
    (0.0808, -0.1263),
];

pub const EXAMPLE_P: [[(f64, f64); 3]; 5] = [
    [(0.0896, 0.4466), (-0.2823, 0.0291), (-0.0967, 0.1620)],
    [(0.2063, -0.0202), (0.0948, -0.2504), (-0.2243, -0.1287)],
    [(-0.0261, 0.1448), (0.3144, -0.2070), (0.2673, -0.1650)],
    [(0.1745, -0.1172), (-0.1434, -0.0410), (-0.2230, 0.2557)],
    [(-0.0984, -0.2849), (-0.0457, 0.3269), (0.0004, 0.3256)],
];

/// The full 5-antenna system.
pub fn example_channel_set() -> UserChannelSet {
    let h = ComplexVector::from_parts(&EXAMPLE_H).expect("finite constants");
    let rows: Vec<&[(f64, f64)]> = EXAMPLE_P.iter().map(|r| r.as_slice()).collect();
    let p = ComplexMatrix::from_rows(&rows).expect("finite constants");
    UserChannelSet::new(h, p, EXAMPLE_SIGMA2).expect("valid example")
}
