use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::nnorm::AnchoredSpace;
use crate::vector::Vector;

/// Seeded random source shared by every estimator and suite. The stream
/// depends only on the seed, so prefixes of a run are reproducible.
pub(crate) struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// `10^u` with `u` uniform in `[lo_exp, hi_exp)`.
    pub fn log_uniform(&mut self, lo_exp: f64, hi_exp: f64) -> f64 {
        libm::pow(10.0, self.uniform(lo_exp, hi_exp))
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_seed(&mut self) -> u64 {
        self.rng.random::<u64>()
    }

    pub fn gaussian_vector(&mut self, dim: usize) -> Vector {
        Vector::from_raw((0..dim).map(|_| self.normal()).collect())
    }

    /// Random combination of the given orthonormal directions with standard
    /// normal coefficients.
    pub fn combination(&mut self, dim: usize, basis: &[Vector]) -> Vector {
        let mut out = Vector::zeros(dim);
        for q in basis {
            out = out.add_scaled(self.normal(), q);
        }
        out
    }

    /// Uniform direction on the Euclidean unit sphere of the anchor-span
    /// complement.
    pub fn complement_direction(&mut self, space: &AnchoredSpace) -> Vector {
        loop {
            let v = self.combination(space.dim(), space.complement_basis());
            let len = v.norm2();
            if len > 1e-12 {
                return (1.0 / len) * &v;
            }
        }
    }

    /// Random anchor-span component with normal coefficients scaled by `scale`.
    pub fn kernel_component(&mut self, space: &AnchoredSpace, scale: f64) -> Vector {
        scale * &self.combination(space.dim(), space.kernel_basis())
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }
}
