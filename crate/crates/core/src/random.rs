//! Seeded generators for reproducible sweeps.
//!
//! Every task draws from its own ChaCha stream selected by `(seed, stream)`,
//! so results do not depend on how tasks are scheduled across threads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{GaussMatrix, GaussVector, GaussianInt, HamiltonianSpec};

pub type TaskRng = ChaCha8Rng;

/// Independent generator for task `stream` under the run seed `seed`.
pub fn task_rng(seed: u64, stream: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_int<R: Rng>(rng: &mut R, bound: i64) -> GaussianInt {
    GaussianInt::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

pub fn nonzero_gaussian_int<R: Rng>(rng: &mut R, bound: i64) -> GaussianInt {
    loop {
        let z = gaussian_int(rng, bound.max(1));
        if !z.is_zero() {
            return z;
        }
    }
}

pub fn gauss_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> GaussVector {
    GaussVector((0..dim).map(|_| gaussian_int(rng, bound)).collect())
}

pub fn unit<R: Rng>(rng: &mut R) -> GaussianInt {
    let pair: (i64, i64) = match rng.gen_range(0..4) {
        0 => (1, 0),
        1 => (-1, 0),
        2 => (0, 1),
        _ => (0, -1),
    };
    pair.into()
}

/// Random self-adjoint matrix with entries bounded by `bound` (no spectral
/// constraint).
pub fn self_adjoint<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> HamiltonianSpec {
    let mut m = GaussMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = GaussianInt::real(rng.gen_range(-bound..=bound));
        for j in i + 1..dim {
            let z = gaussian_int(rng, bound);
            m[(j, i)] = z.conj();
            m[(i, j)] = z;
        }
    }
    HamiltonianSpec::new(m).expect("constructed self-adjoint")
}

/// Random Hamiltonian whose spectrum lies strictly inside `(−2, 2)`.
///
/// The matrix is a direct sum of blocks, each a weighted tree whose
/// underlying graph is a path (type A) or a fork (type D), or a `1×1` block
/// with entry in `{−1, 0, 1}`. Edge weights are random Gaussian units; on a
/// tree they can be gauged away, so every block shares the spectrum of its
/// unweighted graph, whose spectral radius is below 2. A random simultaneous
/// row/column permutation hides the block structure.
pub fn admissible_hamiltonian<R: Rng>(rng: &mut R, dim: usize) -> HamiltonianSpec {
    let mut m = GaussMatrix::zeros(dim);
    let mut start = 0;
    while start < dim {
        let remaining = dim - start;
        let size = rng.gen_range(1..=remaining);
        if size == 1 {
            m[(start, start)] = GaussianInt::real(rng.gen_range(-1..=1));
        } else {
            // parent[k] for vertex k > 0 of the block
            let fork = size >= 4 && rng.gen_bool(0.5);
            for k in 1..size {
                let parent = if fork && k == size - 1 { size - 3 } else { k - 1 };
                let w = unit(rng);
                let (a, b) = (start + parent, start + k);
                m[(b, a)] = w.conj();
                m[(a, b)] = w;
            }
        }
        start += size;
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let mut p = GaussMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            p[(perm[i], perm[j])] = m[(i, j)].clone();
        }
    }
    HamiltonianSpec::new(p).expect("constructed self-adjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| task_rng(7, 1).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| task_rng(7, 1).gen()).collect();
        assert_eq!(a, b);
        let mut r1 = task_rng(7, 1);
        let mut r2 = task_rng(7, 2);
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn admissible_generator_is_strictly_inside_band() {
        let mut rng = task_rng(11, 0);
        for dim in 1..=16 {
            for _ in 0..10 {
                let h = admissible_hamiltonian(&mut rng, dim);
                assert!(h.matrix().is_self_adjoint());
                let s = spectrum(&h);
                assert!(s.admissible);
                assert!(s.max_abs_eigenvalue() < 2.0 - 1e-3, "{:?}", s.eigenvalues);
            }
        }
    }
}
