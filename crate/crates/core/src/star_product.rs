//! Symbols of operators, their star product and the kernels relating the
//! symbols of two schemes on the same Hilbert space.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ToleranceConfig, C64, ZERO};
use crate::operator_space::hs_inner;
use crate::scheme::Scheme;

/// `f_A(k) = Tr[U_k^dagger A]` for every point `k` of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    pub values: Vec<C64>,
    pub scheme_tag: String,
}

impl SymbolVector {
    pub fn new(values: Vec<C64>, scheme_tag: impl Into<String>) -> Self {
        Self {
            values,
            scheme_tag: scheme_tag.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs_diff(&self, other: &SymbolVector) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn symbol(s: &Scheme, a: &Matrix) -> Result<SymbolVector> {
    if a.shape() != (s.d(), s.d()) {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, scheme acts on d = {}",
            a.rows(),
            a.cols(),
            s.d()
        )));
    }
    let values = s
        .dequantizers()
        .iter()
        .map(|u| hs_inner(u, a))
        .collect::<Result<_>>()?;
    Ok(SymbolVector::new(values, s.tag()))
}

/// `A = sum_k f(k) D_k`.
pub fn reconstruct(s: &Scheme, f: &SymbolVector) -> Result<Matrix> {
    let q = s.quantizers().ok_or(Error::MissingQuantizers)?;
    if f.len() != s.n() {
        return Err(Error::LengthMismatch {
            expected: s.n(),
            got: f.len(),
        });
    }
    let d = s.d();
    let mut out = Matrix::zeros(d, d);
    for (coef, dk) in f.values.iter().zip(q) {
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += coef * dk[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Dense structure tensor `K(k, k', k'') = Tr[U_k^dagger D_k' D_k'']`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarKernel {
    d: usize,
    n: usize,
    values: Vec<C64>,
}

impl StarKernel {
    /// Wraps raw `n^3` values laid out with `k''` fastest.
    pub fn from_values(d: usize, n: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != n * n * n {
            return Err(Error::LengthMismatch {
                expected: n * n * n,
                got: values.len(),
            });
        }
        Ok(Self { d, n, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, k1: usize, k2: usize) -> C64 {
        self.values[(k * self.n + k1) * self.n + k2]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

pub fn star_kernel(s: &Scheme) -> Result<StarKernel> {
    let q = s.quantizers().ok_or(Error::MissingQuantizers)?;
    let n = s.n();
    let products: Vec<Matrix> = q
        .iter()
        .flat_map(|a| q.iter().map(move |b| a * b))
        .collect();
    let mut values = Vec::with_capacity(n * n * n);
    for u in s.dequantizers() {
        for p in &products {
            values.push(hs_inner(u, p)?);
        }
    }
    StarKernel::from_values(s.d(), n, values)
}

/// `(f_A * f_B)(k) = sum_{k', k''} f_A(k') f_B(k'') K(k, k', k'')`.
pub fn star_multiply(kernel: &StarKernel, fa: &SymbolVector, fb: &SymbolVector) -> Result<SymbolVector> {
    let n = kernel.n;
    for f in [fa, fb] {
        if f.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: f.len(),
            });
        }
    }
    let values = (0..n)
        .map(|k| {
            let mut acc = ZERO;
            for (k1, a) in fa.values.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let inner: C64 = fb
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k2, b)| b * kernel.get(k, k1, k2))
                    .sum();
                acc += a * inner;
            }
            acc
        })
        .collect();
    Ok(SymbolVector::new(values, fa.scheme_tag.clone()))
}

/// Largest violation of the associativity identity
/// `sum_l K(k,l,k''') K(l,k',k'') = sum_l K(k,k',l) K(l,k'',k''')` over all
/// index tuples.
pub fn associativity_residual(kernel: &StarKernel) -> f64 {
    let n = kernel.n;
    let mut worst = 0.0f64;
    for k in 0..n {
        for k1 in 0..n {
            for k2 in 0..n {
                for k3 in 0..n {
                    let mut lhs = ZERO;
                    let mut rhs = ZERO;
                    for l in 0..n {
                        lhs += kernel.get(k, l, k3) * kernel.get(l, k1, k2);
                        rhs += kernel.get(k, k1, l) * kernel.get(l, k2, k3);
                    }
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
    }
    worst
}

/// Kernels converting symbols between a source scheme (points `k`) and a
/// target scheme (points `kappa`).
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinerPair {
    /// `M x N`: `forward(kappa, k) = Tr[U'_kappa^dagger D_k]`.
    pub forward: Matrix,
    /// `N x M`: `backward(k, kappa) = Tr[U_k^dagger D'_kappa]`.
    pub backward: Matrix,
}

impl IntertwinerPair {
    pub fn to_target(&self, f: &SymbolVector, target_tag: &str) -> Result<SymbolVector> {
        Ok(SymbolVector::new(self.forward.apply(&f.values)?, target_tag))
    }

    pub fn to_source(&self, f: &SymbolVector, source_tag: &str) -> Result<SymbolVector> {
        Ok(SymbolVector::new(self.backward.apply(&f.values)?, source_tag))
    }
}

/// Intertwining kernels between two tomographic schemes on `H_d`; attached
/// quantizers are used when present, the canonical ones otherwise.
pub fn intertwiner(from: &Scheme, to: &Scheme, tol: &ToleranceConfig) -> Result<IntertwinerPair> {
    if from.d() != to.d() {
        return Err(Error::DimensionMismatch(format!(
            "schemes act on d = {} and d = {}",
            from.d(),
            to.d()
        )));
    }
    let required = from.d() * from.d();
    for s in [from, to] {
        let rank = s.rank(tol);
        if rank < required {
            return Err(Error::NotTomographic { rank, required });
        }
    }
    let dq_from = from.quantizers_or_canonical(tol)?;
    let dq_to = to.quantizers_or_canonical(tol)?;
    let cross = |deq: &[Matrix], quant: &[Matrix]| -> Result<Matrix> {
        let mut m = Matrix::zeros(deq.len(), quant.len());
        for (r, u) in deq.iter().enumerate() {
            for (c, dq) in quant.iter().enumerate() {
                m[(r, c)] = hs_inner(u, dq)?;
            }
        }
        Ok(m)
    };
    Ok(IntertwinerPair {
        forward: cross(to.dequantizers(), &dq_from)?,
        backward: cross(from.dequantizers(), &dq_to)?,
    })
}

/// `max |u - (u u*) u^T|` for a unitary `u`; the identity holds because
/// `u* u^T = (u u^dagger)* = I`.
pub fn cubic_unitary_residual(u: &Matrix, tol: &ToleranceConfig) -> Result<f64> {
    u.require_square()?;
    let n = u.rows();
    let unitarity = (&u.adjoint() * u).max_abs_diff(&Matrix::identity(n));
    if unitarity > tol.residual_tol {
        return Err(Error::NotUnitary {
            residual: unitarity,
        });
    }
    let rhs = &(u * &u.conj()) * &u.transpose();
    Ok(u.max_abs_diff(&rhs))
}
