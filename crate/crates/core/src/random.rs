//! Seeded random instances for simulations and property checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::irc::{AntennaRow, UserChannelSet};
use crate::linalg::{ComplexMatrix, ComplexVector};

/// Deterministic substream for `(seed, outer, inner)`, independent of the
/// order in which substreams are consumed.
pub fn substream(seed: u64, outer: u32, inner: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((outer as u64) << 32) | inner as u64);
    rng
}

/// Circularly-symmetric complex Gaussian sample with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ComplexVector {
    ComplexVector::new((0..len).map(|_| complex_gaussian(rng)).collect()).expect("finite samples")
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `shift·I + QᴴQ` for a Gaussian `Q` with `n + 2` rows.
pub fn positive_definite<R: Rng + ?Sized>(rng: &mut R, n: usize, shift: f64) -> ComplexMatrix {
    gaussian_matrix(rng, n + 2, n).regularized_gram(shift)
}

/// Random channel set with `n_antennas` rows and `n_interferers` columns.
pub fn channel_set<R: Rng + ?Sized>(
    rng: &mut R,
    n_antennas: usize,
    n_interferers: usize,
    sigma2: f64,
) -> UserChannelSet {
    let h = gaussian_vector(rng, n_antennas);
    let p = gaussian_matrix(rng, n_antennas, n_interferers);
    UserChannelSet::new(h, p, sigma2).expect("valid random instance")
}

pub fn antenna_row<R: Rng + ?Sized>(rng: &mut R, n_interferers: usize) -> AntennaRow {
    AntennaRow {
        h_new: complex_gaussian(rng),
        rho: gaussian_vector(rng, n_interferers),
    }
}
