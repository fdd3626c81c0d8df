//! Seeded random matrices for property checks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{c64, Matrix, C64};

/// Complex Gaussian entry with `E|z|^2 = 1`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix: i.i.d. complex Gaussian entries.
pub fn random_operator<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = random_operator(d, d, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-random unitary: Gram–Schmidt on the columns of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    loop {
        let g = random_operator(n, n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.column(j);
            // two passes keep the columns orthogonal to machine precision
            for _ in 0..2 {
                for q in &cols {
                    let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                break;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v);
        }
        if cols.len() == n {
            return Matrix::from_columns(&cols).expect("n columns of length n");
        }
    }
}

/// Random unit vector in `C^d`.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        v[0] = c64(1.0, 0.0);
        return v;
    }
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 4, 9] {
            let u = random_unitary(n, &mut rng);
            assert!((&u.adjoint() * &u).max_abs_diff(&Matrix::identity(n)) < 1e-13);
            assert!((&u * &u.adjoint()).max_abs_diff(&Matrix::identity(n)) < 1e-13);
        }
    }

    #[test]
    fn hermitian_and_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_hermitian(3, &mut rng);
        assert_eq!(h.hermiticity_residual(), 0.0);
        let v = random_state(5, &mut rng);
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }
}
