//! Seeded 64-bit PRNG (splitmix-style) and the random fixtures built on it:
//! Gaussian samples, Haar-like unitaries, random pure states.
//!
//! Every randomized routine in the crate takes an explicit seed so runs are
//! reproducible bit-for-bit; per-task streams are derived with `fork`.

use crate::opalg::{C64, ComplexMatrix, ComplexVector};
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for a subtask, derived deterministically.
    pub fn fork(&mut self, salt: u64) -> Self {
        Self::new(self.next_u64() ^ salt.wrapping_mul(0x9e3779b97f4a7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe under log.
    fn next_f64_open(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let r = libm::sqrt(-2.0 * libm::log(self.next_f64_open()));
        r * libm::cos(2.0 * core::f64::consts::PI * self.next_f64())
    }

    /// Complex standard normal (unit total variance).
    pub fn next_c64_gaussian(&mut self) -> C64 {
        C64::new(
            self.next_gaussian() * core::f64::consts::FRAC_1_SQRT_2,
            self.next_gaussian() * core::f64::consts::FRAC_1_SQRT_2,
        )
    }

    pub fn next_range(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Haar-distributed random pure state.
pub fn random_pure_state(dim: usize, rng: &mut SplitMix64) -> ComplexVector {
    loop {
        let v = ComplexVector::new((0..dim).map(|_| rng.next_c64_gaussian()).collect());
        if v.norm() > 1e-6 {
            return v.normalized();
        }
    }
}

/// Haar-like random unitary from the QR sign-fixed Gram-Schmidt of a
/// complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = ComplexVector::new((0..dim).map(|_| rng.next_c64_gaussian()).collect());
        // Two rounds of modified Gram-Schmidt for orthogonality to machine precision.
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.inner(&v);
                v = v.sub(&c.scale(overlap));
            }
        }
        if v.norm() < 1e-8 {
            continue;
        }
        cols.push(v.normalized());
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Random positive-semidefinite unit-trace matrix of exact rank `rank`,
/// built as GG†/Tr(GG†) from a dim×rank complex Gaussian factor.
pub fn random_density_matrix(dim: usize, rank: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(dim, rank, |_, _| rng.next_c64_gaussian());
        let w = g.mul(&g.adjoint());
        let t = w.trace().re;
        if t > 1e-9 {
            return w.scale_re(1.0 / t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut rng = SplitMix64::new(1);
        let n = 20000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = rng.next_gaussian();
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = SplitMix64::new(5);
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            let gram = u.adjoint().mul(&u);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12);
        }
    }

    #[test]
    fn random_density_rank_and_trace() {
        let mut rng = SplitMix64::new(9);
        let m = random_density_matrix(4, 2, &mut rng);
        assert!((m.trace().re - 1.0).abs() < 1e-12);
        let spec = crate::opalg::eigh(&m).unwrap();
        let nonzero = spec.eigenvalues.iter().filter(|&&x| x > 1e-10).count();
        assert_eq!(nonzero, 2);
    }
}
