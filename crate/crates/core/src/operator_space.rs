//! The identification of operators on `H_d` with vectors in `H_{d^2}`.
//!
//! Matrix units are indexed `k = d*i + j` (zero-based), which is the
//! row-stacking order. An orthonormal operator basis `{B_mu}` gives the
//! alternative coordinates `Tr[B_mu^dagger Z]`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ToleranceConfig, C64, I, ONE, ZERO};

/// Orthonormal (in the trace inner product) basis of `d x d` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    d: usize,
    tag: String,
    ops: Vec<Matrix>,
}

impl OperatorBasis {
    /// Validates orthonormality to within `tol.residual_tol`.
    pub fn new(tag: impl Into<String>, ops: Vec<Matrix>, tol: &ToleranceConfig) -> Result<Self> {
        let residual = validate_orthonormal_basis(&ops)?;
        if residual > tol.residual_tol {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self {
            d: ops[0].rows(),
            tag: tag.into(),
            ops,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.ops
    }
}

/// Rule mapping a `d x d` operator to its `d^2` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorizationBasis {
    /// Concatenate the rows of the matrix.
    RowStacking,
    Orthonormal(Arc<OperatorBasis>),
}

impl VectorizationBasis {
    /// `(I, sigma_x, sigma_y, sigma_z) / sqrt(2)` on `H_2`.
    pub fn pauli() -> Self {
        let ops = pauli_matrices()
            .iter()
            .map(|p| p.scale_real(std::f64::consts::FRAC_1_SQRT_2))
            .collect::<Vec<_>>();
        VectorizationBasis::Orthonormal(Arc::new(OperatorBasis {
            d: 2,
            tag: "pauli".into(),
            ops,
        }))
    }

    pub fn orthonormal(
        tag: impl Into<String>,
        ops: Vec<Matrix>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        Ok(VectorizationBasis::Orthonormal(Arc::new(OperatorBasis::new(
            tag, ops, tol,
        )?)))
    }

    pub fn tag(&self) -> &str {
        match self {
            VectorizationBasis::RowStacking => "row-stacking",
            VectorizationBasis::Orthonormal(b) => b.tag(),
        }
    }

    /// Operator dimension `d` the basis is tied to, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            VectorizationBasis::RowStacking => None,
            VectorizationBasis::Orthonormal(b) => Some(b.dim()),
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self.fixed_dim() {
            Some(bd) if bd != d => Err(Error::DimensionMismatch(format!(
                "basis `{}` acts on d = {bd}, operator has d = {d}",
                self.tag()
            ))),
            _ => Ok(()),
        }
    }
}

/// Coordinates of an operator in `H_{d^2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorVector {
    pub components: Vec<C64>,
    pub basis_tag: String,
}

impl OperatorVector {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &OperatorVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `E_(i,j)` with one-based indices.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> Result<Matrix> {
    if d == 0 || i == 0 || j == 0 || i > d || j > d {
        return Err(Error::IndexOutOfRange { i, j, d });
    }
    let mut m = Matrix::zeros(d, d);
    m[(i - 1, j - 1)] = ONE;
    Ok(m)
}

/// `I, sigma_x, sigma_y, sigma_z`.
pub fn pauli_matrices() -> [Matrix; 4] {
    let m = |a: [C64; 4]| Matrix::new(2, 2, a.to_vec()).expect("2x2");
    [
        m([ONE, ZERO, ZERO, ONE]),
        m([ZERO, ONE, ONE, ZERO]),
        m([ZERO, -I, I, ZERO]),
        m([ONE, ZERO, ZERO, -ONE]),
    ]
}

pub fn vectorize(z: &Matrix, basis: &VectorizationBasis) -> Result<OperatorVector> {
    z.require_square()
        .map_err(|_| Error::DimensionMismatch(format!("operator is {}x{}", z.rows(), z.cols())))?;
    basis.check_dim(z.rows())?;
    let components = match basis {
        VectorizationBasis::RowStacking => z.as_slice().to_vec(),
        VectorizationBasis::Orthonormal(b) => b
            .operators()
            .iter()
            .map(|bm| hs_inner(bm, z))
            .collect::<Result<_>>()?,
    };
    Ok(OperatorVector {
        components,
        basis_tag: basis.tag().to_owned(),
    })
}

pub fn devectorize(v: &OperatorVector, basis: &VectorizationBasis) -> Result<Matrix> {
    let n = v.dim();
    let d = exact_sqrt(n).ok_or(Error::NotSquareLength(n))?;
    basis.check_dim(d)?;
    match basis {
        VectorizationBasis::RowStacking => Matrix::new(d, d, v.components.clone()),
        VectorizationBasis::Orthonormal(b) => {
            let mut out = Matrix::zeros(d, d);
            for (coef, bm) in v.components.iter().zip(b.operators()) {
                for i in 0..d {
                    for j in 0..d {
                        out[(i, j)] += coef * bm[(i, j)];
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `Tr[X^dagger Y]`.
pub fn hs_inner(x: &Matrix, y: &Matrix) -> Result<C64> {
    if x.shape() != y.shape() || !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "trace inner product of {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Ok(x.as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// `max_{mu,nu} |Tr[B_mu^dagger B_nu] - delta_{mu nu}|`.
pub fn validate_orthonormal_basis(ops: &[Matrix]) -> Result<f64> {
    let first = ops
        .first()
        .ok_or(Error::WrongCount { expected: 1, got: 0 })?;
    let d = first.rows();
    if ops.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::DimensionMismatch(
            "basis operators must all be d x d".into(),
        ));
    }
    if ops.len() != d * d {
        return Err(Error::WrongCount {
            expected: d * d,
            got: ops.len(),
        });
    }
    let mut worst = 0.0f64;
    for (mu, a) in ops.iter().enumerate() {
        for (nu, b) in ops.iter().enumerate().skip(mu) {
            let g = hs_inner(a, b)?;
            let target = if mu == nu { ONE } else { ZERO };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Row-stacking of a rectangular `m x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RectVector {
    pub rows: usize,
    pub cols: usize,
    pub components: Vec<C64>,
}

pub fn vectorize_rect(z: &Matrix) -> RectVector {
    RectVector {
        rows: z.rows(),
        cols: z.cols(),
        components: z.as_slice().to_vec(),
    }
}

/// Inverse of [`vectorize_rect`] for any factorization `len = rows * cols`.
pub fn devectorize_rect(components: &[C64], rows: usize, cols: usize) -> Result<Matrix> {
    Matrix::new(rows, cols, components.to_vec())
}

pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r > 0 && r * r == n).then_some(r)
}

/// Matrix units in row-stacking order, the basis that makes
/// `RowStacking` a special case of `Orthonormal`.
pub fn matrix_unit_basis(d: usize) -> Vec<Matrix> {
    (1..=d)
        .flat_map(|i| (1..=d).map(move |j| matrix_unit(d, i, j).expect("in range")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;
    use proptest::prelude::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn abcd() -> (C64, C64, C64, C64, Matrix) {
        let (a, b, c, d) = (c64(1.0, 2.0), c64(-3.0, 0.5), c64(0.25, -1.0), c64(4.0, 4.0));
        (a, b, c, d, Matrix::new(2, 2, vec![a, b, c, d]).unwrap())
    }

    #[test]
    fn matrix_units() {
        let e12 = matrix_unit(2, 1, 2).unwrap();
        assert_eq!(e12.as_slice(), &[ZERO, ONE, ZERO, ZERO]);
        let e11 = matrix_unit(2, 1, 1).unwrap();
        assert_eq!(e11.as_slice(), &[ONE, ZERO, ZERO, ZERO]);
        let e31 = matrix_unit(3, 3, 1).unwrap();
        assert_eq!(e31[(2, 0)], ONE);
        assert_eq!(e31.max_abs(), 1.0);
        assert_eq!(e31.as_slice().iter().filter(|z| **z != ZERO).count(), 1);
        assert_eq!(
            matrix_unit(2, 3, 1),
            Err(Error::IndexOutOfRange { i: 3, j: 1, d: 2 })
        );
        assert!(matrix_unit(2, 0, 1).is_err());
    }

    #[test]
    fn row_stacking_of_two_by_two() {
        let (a, b, c, d, z) = abcd();
        let v = vectorize(&z, &VectorizationBasis::RowStacking).unwrap();
        assert_eq!(v.components, vec![a, b, c, d]);
        let e12 = matrix_unit(2, 1, 2).unwrap();
        let v = vectorize(&e12, &VectorizationBasis::RowStacking).unwrap();
        assert_eq!(v.components, vec![ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn pauli_coordinates() {
        let (a, b, c, d, z) = abcd();
        let v = vectorize(&z, &VectorizationBasis::pauli()).unwrap();
        let want = [(a + d) * S, (b + c) * S, I * (b - c) * S, (a - d) * S];
        for (g, w) in v.components.iter().zip(want) {
            assert!((g - w).norm() < 1e-15);
        }
        let back = devectorize(
            &OperatorVector {
                components: want.to_vec(),
                basis_tag: "pauli".into(),
            },
            &VectorizationBasis::pauli(),
        )
        .unwrap();
        assert!(back.max_abs_diff(&z) < 1e-14);
    }

    #[test]
    fn devectorize_cases() {
        let rs = VectorizationBasis::RowStacking;
        let v = |c: Vec<C64>| OperatorVector {
            components: c,
            basis_tag: "row-stacking".into(),
        };
        assert_eq!(
            devectorize(&v(vec![ONE, ZERO, ZERO, ZERO]), &rs).unwrap(),
            matrix_unit(2, 1, 1).unwrap()
        );
        assert_eq!(devectorize(&v(vec![ZERO; 4]), &rs).unwrap(), Matrix::zeros(2, 2));
        assert_eq!(
            devectorize(&v(vec![ZERO; 3]), &rs),
            Err(Error::NotSquareLength(3))
        );
        assert!(matches!(
            devectorize(&v(vec![ZERO; 9]), &VectorizationBasis::pauli()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vectorize_rejects_mismatch() {
        assert!(vectorize(&Matrix::zeros(2, 3), &VectorizationBasis::RowStacking).is_err());
        assert!(vectorize(&Matrix::zeros(3, 3), &VectorizationBasis::pauli()).is_err());
    }

    #[test]
    fn trace_inner_product() {
        let e12 = matrix_unit(2, 1, 2).unwrap();
        assert_eq!(hs_inner(&e12, &e12).unwrap(), ONE);
        let e11 = matrix_unit(2, 1, 1).unwrap();
        let e22 = matrix_unit(2, 2, 2).unwrap();
        assert_eq!(hs_inner(&e11, &e22).unwrap(), ZERO);
        let sx = pauli_matrices()[1].scale_real(S);
        assert!((hs_inner(&sx, &sx).unwrap() - ONE).norm() < 1e-15);
        assert!(hs_inner(&e11, &Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn orthonormality_residuals() {
        assert_eq!(validate_orthonormal_basis(&matrix_unit_basis(2)).unwrap(), 0.0);
        let p = pauli_matrices();
        let paulis: Vec<Matrix> = p.iter().map(|m| m.scale_real(S)).collect();
        assert!(validate_orthonormal_basis(&paulis).unwrap() < 1e-15);
        let dup: Vec<Matrix> = [&p[0], &p[1], &p[1], &p[3]]
            .iter()
            .map(|m| m.scale_real(S))
            .collect();
        assert!((validate_orthonormal_basis(&dup).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            validate_orthonormal_basis(&paulis[..3]),
            Err(Error::WrongCount {
                expected: 4,
                got: 3
            })
        );
        let mut mixed = paulis.clone();
        mixed[2] = Matrix::zeros(3, 3);
        assert!(matches!(
            validate_orthonormal_basis(&mixed),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn row_stacking_equals_matrix_unit_basis() {
        let tol = ToleranceConfig::default();
        let units = VectorizationBasis::orthonormal("units", matrix_unit_basis(3), &tol).unwrap();
        let z = Matrix::from_fn(3, 3, |i, j| c64(i as f64 - 0.5 * j as f64, (i * j) as f64));
        let a = vectorize(&z, &VectorizationBasis::RowStacking).unwrap();
        let b = vectorize(&z, &units).unwrap();
        assert_eq!(a.components, b.components);
    }

    #[test]
    fn rectangular_round_trip() {
        let z = Matrix::from_fn(2, 3, |i, j| c64(i as f64, j as f64));
        let v = vectorize_rect(&z);
        assert_eq!(v.components.len(), 6);
        assert_eq!(v.components[3], c64(1.0, 0.0));
        assert_eq!(devectorize_rect(&v.components, 2, 3).unwrap(), z);
        let t = devectorize_rect(&v.components, 3, 2).unwrap();
        assert_eq!(t.shape(), (3, 2));
    }

    fn operator(d: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
            Matrix::new(d, d, v.into_iter().map(|(a, b)| c64(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn round_trip_both_bases(z in operator(2)) {
            for basis in [VectorizationBasis::RowStacking, VectorizationBasis::pauli()] {
                let back = devectorize(&vectorize(&z, &basis).unwrap(), &basis).unwrap();
                prop_assert!(back.max_abs_diff(&z) <= 1e-13);
            }
        }

        #[test]
        fn round_trip_row_stacking_d3(z in operator(3)) {
            let rs = VectorizationBasis::RowStacking;
            let back = devectorize(&vectorize(&z, &rs).unwrap(), &rs).unwrap();
            prop_assert_eq!(back, z);
        }

        #[test]
        fn inner_product_is_basis_independent(x in operator(2), y in operator(2)) {
            let direct = hs_inner(&x, &y).unwrap();
            for basis in [VectorizationBasis::RowStacking, VectorizationBasis::pauli()] {
                let vx = vectorize(&x, &basis).unwrap();
                let vy = vectorize(&y, &basis).unwrap();
                prop_assert!((vx.inner(&vy).unwrap() - direct).norm() <= 1e-12);
            }
            prop_assert!((hs_inner(&y, &x).unwrap() - direct.conj()).norm() <= 1e-15);
        }

        #[test]
        fn vectorize_is_linear(
            x in operator(2), y in operator(2),
            (ar, ai, br, bi) in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
        ) {
            let (alpha, beta) = (c64(ar, ai), c64(br, bi));
            let rs = VectorizationBasis::RowStacking;
            let combo = &x.scale(alpha) + &y.scale(beta);
            let lhs = vectorize(&combo, &rs).unwrap();
            let vx = vectorize(&x, &rs).unwrap();
            let vy = vectorize(&y, &rs).unwrap();
            for k in 0..4 {
                prop_assert_eq!(lhs.components[k], alpha * vx.components[k] + beta * vy.components[k]);
            }
        }
    }
}
