//! Star-product schemes: dequantization and quantization matrices, dual
//! quantizers and the classification of a scheme by the shape and type of
//! its dequantization matrix.
//!
//! All matrices of operator coordinates use a [`VectorizationBasis`]; the
//! structural results (rank, condition number, quantizers) do not depend on
//! which orthonormal basis is chosen.

use std::fmt;

use crate::error::{Error, Family, Result};
use crate::matrix::{
    condition_number, hermitian_eig, inverse, rank_from_singular_values, svd, Matrix,
    ToleranceConfig, C64,
};
use crate::operator_space::{devectorize, hs_inner, vectorize, OperatorVector, VectorizationBasis};

/// An ordered family of dequantizers `U_k` on `H_d`, optionally paired with
/// quantizers `D_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    d: usize,
    name: Option<String>,
    dequantizers: Vec<Matrix>,
    quantizers: Option<Vec<Matrix>>,
}

impl Scheme {
    pub fn new(d: usize, dequantizers: Vec<Matrix>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if dequantizers.is_empty() {
            return Err(Error::WrongCount {
                expected: 1,
                got: 0,
            });
        }
        check_family(d, &dequantizers)?;
        Ok(Self {
            d,
            name: None,
            dequantizers,
            quantizers: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attaches quantizers after a shape check only.
    pub fn with_quantizers(mut self, quantizers: Vec<Matrix>) -> Result<Self> {
        if quantizers.len() != self.n() {
            return Err(Error::WrongCount {
                expected: self.n(),
                got: quantizers.len(),
            });
        }
        check_family(self.d, &quantizers)?;
        self.quantizers = Some(quantizers);
        Ok(self)
    }

    /// Attaches quantizers and, for a tomographic scheme, requires the
    /// completeness relation `sum_k |D_k><U_k| = I` to hold.
    pub fn attach_quantizers(self, quantizers: Vec<Matrix>, tol: &ToleranceConfig) -> Result<Self> {
        let s = self.with_quantizers(quantizers)?;
        if s.is_tomographic(tol) {
            let r = completeness_residual(&s, &VectorizationBasis::RowStacking)?;
            if r > tol.residual_tol {
                return Err(Error::InvalidInput(format!(
                    "quantizers violate completeness (residual {r:e})"
                )));
            }
        }
        Ok(s)
    }

    pub fn without_quantizers(mut self) -> Self {
        self.quantizers = None;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of points `N`.
    pub fn n(&self) -> usize {
        self.dequantizers.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn tag(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("scheme(d={}, N={})", self.d, self.n()))
    }

    pub fn dequantizers(&self) -> &[Matrix] {
        &self.dequantizers
    }

    pub fn quantizers(&self) -> Option<&[Matrix]> {
        self.quantizers.as_deref()
    }

    pub fn is_tomographic(&self, tol: &ToleranceConfig) -> bool {
        self.rank(tol) == self.d * self.d
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        let u = dequantization_matrix(self, &VectorizationBasis::RowStacking).expect("well-formed");
        rank_from_singular_values(&svd(&u), tol)
    }

    /// Reorders the points: the new `k`th point is the old `perm[k]`th.
    pub fn permuted(&self, perm: &[usize]) -> Result<Scheme> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let pick = |v: &[Matrix]| perm.iter().map(|&p| v[p].clone()).collect::<Vec<_>>();
        Ok(Scheme {
            d: self.d,
            name: self.name.clone(),
            dequantizers: pick(&self.dequantizers),
            quantizers: self.quantizers.as_deref().map(pick),
        })
    }

    /// Quantizers attached to the scheme, or the canonical dual family.
    pub fn quantizers_or_canonical(&self, tol: &ToleranceConfig) -> Result<Vec<Matrix>> {
        match &self.quantizers {
            Some(q) => Ok(q.clone()),
            None => canonical_quantizers(self, tol),
        }
    }
}

fn check_family(d: usize, ops: &[Matrix]) -> Result<()> {
    match ops.iter().position(|m| m.shape() != (d, d)) {
        Some(k) => Err(Error::DimensionMismatch(format!(
            "operator {k} is {}x{}, expected {d}x{d}",
            ops[k].rows(),
            ops[k].cols()
        ))),
        None => Ok(()),
    }
}

fn family_matrix(d: usize, ops: &[Matrix], basis: &VectorizationBasis) -> Result<Matrix> {
    let columns = ops
        .iter()
        .map(|op| vectorize(op, basis).map(|v| v.components))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(columns.iter().all(|c| c.len() == d * d));
    Matrix::from_columns(&columns)
}

fn devectorize_columns(m: &Matrix, basis: &VectorizationBasis) -> Result<Vec<Matrix>> {
    (0..m.cols())
        .map(|k| {
            devectorize(
                &OperatorVector {
                    components: m.column(k),
                    basis_tag: basis.tag().to_owned(),
                },
                basis,
            )
        })
        .collect()
}

/// `d^2 x N` matrix whose `k`th column is the vectorized `U_k`.
pub fn dequantization_matrix(s: &Scheme, basis: &VectorizationBasis) -> Result<Matrix> {
    family_matrix(s.d, &s.dequantizers, basis)
}

/// `d^2 x N` matrix whose `k`th column is the vectorized `D_k`.
pub fn quantization_matrix(s: &Scheme, basis: &VectorizationBasis) -> Result<Matrix> {
    let q = s.quantizers.as_deref().ok_or(Error::MissingQuantizers)?;
    family_matrix(s.d, q, basis)
}

/// Dual family: `(U^dagger)^-1` for a minimal scheme, the pseudoinverse
/// `(U U^dagger)^-1 U` for an overfilled one.
pub fn canonical_quantizers(s: &Scheme, tol: &ToleranceConfig) -> Result<Vec<Matrix>> {
    let basis = VectorizationBasis::RowStacking;
    let u = dequantization_matrix(s, &basis)?;
    let required = s.d * s.d;
    let rank = rank_from_singular_values(&svd(&u), tol);
    if rank < required {
        return Err(Error::NotTomographic { rank, required });
    }
    let dq = if s.n() == required {
        inverse(&u.adjoint(), tol)?
    } else {
        // the frame operator squares the singular values of U
        let frame = &u * &u.adjoint();
        let frame_tol = ToleranceConfig {
            rank_tol: tol.rank_tol * tol.rank_tol,
            ..*tol
        };
        &inverse(&frame, &frame_tol)? * &u
    };
    devectorize_columns(&dq, &basis)
}

/// `max |sum_k |D_k><U_k| - I|` in the given basis.
pub fn completeness_residual(s: &Scheme, basis: &VectorizationBasis) -> Result<f64> {
    let u = dequantization_matrix(s, basis)?;
    let dq = quantization_matrix(s, basis)?;
    let d2 = s.d * s.d;
    Ok((&dq * &u.adjoint()).max_abs_diff(&Matrix::identity(d2)))
}

/// Quantizers `D + G` for a gauge `G` (row-stacking coordinates, `d^2 x N`)
/// satisfying `U G^dagger = 0`, which keeps the completeness relation intact.
pub fn gauge_quantizers(s: &Scheme, gauge: &Matrix, tol: &ToleranceConfig) -> Result<Vec<Matrix>> {
    let basis = VectorizationBasis::RowStacking;
    let q = quantization_matrix(s, &basis)?;
    let u = dequantization_matrix(s, &basis)?;
    let required = s.d * s.d;
    let rank = rank_from_singular_values(&svd(&u), tol);
    if rank < required {
        return Err(Error::NotTomographic { rank, required });
    }
    if s.n() == required {
        return Err(Error::NotOverfilled);
    }
    if gauge.shape() != u.shape() {
        return Err(Error::DimensionMismatch(format!(
            "gauge is {}x{}, expected {}x{}",
            gauge.rows(),
            gauge.cols(),
            u.rows(),
            u.cols()
        )));
    }
    let residual = (&u * &gauge.adjoint()).max_abs();
    let scale = (u.frobenius_norm() * gauge.frobenius_norm()).max(1.0);
    if residual > tol.residual_tol * scale {
        return Err(Error::InvalidGauge { residual });
    }
    devectorize_columns(&(&q + gauge), &basis)
}

/// `Delta(k, k') = Tr[U_k^dagger D_k']`.
pub fn duality_matrix(s: &Scheme) -> Result<Matrix> {
    let q = s.quantizers.as_deref().ok_or(Error::MissingQuantizers)?;
    let n = s.n();
    let mut out = Matrix::zeros(n, n);
    for (k, u) in s.dequantizers.iter().enumerate() {
        for (kp, dq) in q.iter().enumerate() {
            out[(k, kp)] = hs_inner(u, dq)?;
        }
    }
    Ok(out)
}

/// Coefficient of skewness `c > 0` with `U_k = c D_k` for every `k`, if any.
///
/// `c` is estimated as `||U||_F / ||D||_F` and then checked entrywise against
/// `residual_tol` relative to the largest dequantizer entry.
pub fn self_dual_coefficient(s: &Scheme, tol: &ToleranceConfig) -> Result<Option<f64>> {
    let q = s.quantizers.as_deref().ok_or(Error::MissingQuantizers)?;
    Ok(self_dual_of(&s.dequantizers, q, tol))
}

fn self_dual_of(deq: &[Matrix], q: &[Matrix], tol: &ToleranceConfig) -> Option<f64> {
    let fro = |ops: &[Matrix]| {
        ops.iter()
            .map(|m| m.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (nu, nd) = (fro(deq), fro(q));
    if nu == 0.0 || nd == 0.0 {
        return None;
    }
    let c = nu / nd;
    let scale = deq.iter().map(Matrix::max_abs).fold(0.0, f64::max);
    let worst = deq
        .iter()
        .zip(q)
        .map(|(u, dq)| u.max_abs_diff(&dq.scale_real(c)))
        .fold(0.0, f64::max);
    (worst <= tol.residual_tol * scale).then_some(c)
}

/// `c` with `U^dagger U = c I`, i.e. `U = sqrt(c)` times a unitary.
pub fn scaled_unitary_check(u: &Matrix, tol: &ToleranceConfig) -> Result<Option<f64>> {
    u.require_square()?;
    Ok(proportional_to_identity(&(&u.adjoint() * u), tol))
}

/// `c` with `U U^dagger = c I` (a tight frame); for square `U` this agrees
/// with [`scaled_unitary_check`].
pub fn tight_frame_coefficient(u: &Matrix, tol: &ToleranceConfig) -> Option<f64> {
    proportional_to_identity(&(u * &u.adjoint()), tol)
}

fn proportional_to_identity(g: &Matrix, tol: &ToleranceConfig) -> Option<f64> {
    let n = g.rows();
    let c = g.trace().ok()?.re / n as f64;
    if c.is_nan() || c <= 0.0 {
        return None;
    }
    let r = g.max_abs_diff(&Matrix::identity(n).scale_real(c));
    (r <= tol.residual_tol * c).then_some(c)
}

/// How a family deviates from being a POVM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmDiagnostics {
    /// `max |sum_k U_k - I|`.
    pub sum_residual: f64,
    /// Largest `max |U_k - U_k^dagger|`.
    pub hermiticity_residual: f64,
    /// Smallest eigenvalue over the Hermitian parts of all effects.
    pub min_effect_eigenvalue: f64,
    pub is_povm: bool,
}

pub fn povm_check(s: &Scheme, tol: &ToleranceConfig) -> PovmDiagnostics {
    let d = s.d;
    let mut sum = Matrix::zeros(d, d);
    let mut herm = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for u in &s.dequantizers {
        sum = &sum + u;
        herm = herm.max(u.hermiticity_residual());
        let h = u.hermitian_part().expect("square");
        let e = hermitian_eig(&h, tol).expect("Hermitian part");
        min_eig = min_eig.min(e.values[0]);
    }
    let sum_residual = sum.max_abs_diff(&Matrix::identity(d));
    PovmDiagnostics {
        sum_residual,
        hermiticity_residual: herm,
        min_effect_eigenvalue: min_eig,
        is_povm: sum_residual <= tol.residual_tol
            && herm <= tol.residual_tol
            && min_eig >= -tol.eig_tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityReport {
    pub min_dequantizer_eigenvalue: f64,
    /// Present when the scheme carries quantizers.
    pub min_quantizer_eigenvalue: Option<f64>,
}

/// Smallest eigenvalue in each Hermitian family.
pub fn negativity_report(s: &Scheme, tol: &ToleranceConfig) -> Result<NegativityReport> {
    let min_of = |family: Family, ops: &[Matrix]| -> Result<f64> {
        let mut m = f64::INFINITY;
        for (index, op) in ops.iter().enumerate() {
            let residual = op.hermiticity_residual();
            if residual > tol.residual_tol * op.max_abs().max(1.0) {
                return Err(Error::NonHermitianMember {
                    family,
                    index,
                    residual,
                });
            }
            m = m.min(hermitian_eig(op, tol)?.values[0]);
        }
        Ok(m)
    };
    Ok(NegativityReport {
        min_dequantizer_eigenvalue: min_of(Family::Dequantizers, &s.dequantizers)?,
        min_quantizer_eigenvalue: s
            .quantizers
            .as_deref()
            .map(|q| min_of(Family::Quantizers, q))
            .transpose()?,
    })
}

/// Detects `U_{d i + j} = |psi_i><psi_j|` for an orthonormal family `psi`
/// and returns the unitary whose columns are the `psi_i`.
///
/// The family is determined up to one global phase; it is fixed by making
/// the first non-negligible entry of `psi_0` real positive.
pub fn matrix_unit_like_detect(s: &Scheme, tol: &ToleranceConfig) -> Option<Matrix> {
    let d = s.d;
    if s.n() != d * d {
        return None;
    }
    let ops = &s.dequantizers;
    let scale = ops.iter().map(Matrix::max_abs).fold(0.0, f64::max).max(1.0);
    let eps = tol.residual_tol * scale;

    let p0 = &ops[0];
    let (q, pivot) = (0..d)
        .map(|q| (q, p0[(q, q)].re))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if pivot.is_nan() || pivot <= eps {
        return None;
    }
    let mut psi0: Vec<C64> = p0.column(q).iter().map(|z| z / pivot.sqrt()).collect();
    let cutoff = tol.residual_tol.sqrt();
    let lead = psi0.iter().find(|z| z.norm() > cutoff)?;
    let phase = lead.conj() / lead.norm();
    psi0.iter_mut().for_each(|z| *z *= phase);

    // U_{0 j} = psi_0 psi_j^dagger  =>  psi_j = U_{0 j}^dagger psi_0
    let mut columns = Vec::with_capacity(d);
    columns.push(psi0.clone());
    for op in &ops[1..d] {
        columns.push(op.adjoint().apply(&psi0).ok()?);
    }
    let u = Matrix::from_columns(&columns).ok()?;
    if (&u.adjoint() * &u).max_abs_diff(&Matrix::identity(d)) > tol.residual_tol.max(eps) {
        return None;
    }
    for i in 0..d {
        for j in 0..d {
            let expect = Matrix::outer(&columns[i], &columns[j]);
            if ops[d * i + j].max_abs_diff(&expect) > eps {
                return None;
            }
        }
    }
    Some(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    /// Rank below `d^2`: symbols carry partial information only.
    Underfilled,
    /// `N = d^2` and full rank.
    Minimal,
    /// `N > d^2` and full rank.
    Overfilled,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cardinality::Underfilled => "underfilled",
            Cardinality::Minimal => "minimal",
            Cardinality::Overfilled => "overfilled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerSource {
    Attached,
    Canonical,
    /// Not tomographic and none attached.
    Undefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeReport {
    pub d: usize,
    pub n: usize,
    pub basis: String,
    pub cardinality: Cardinality,
    pub tomographic: bool,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// `sigma_1 / sigma_{d^2}`; infinite when not tomographic.
    pub condition_number: f64,
    pub quantizer_source: QuantizerSource,
    pub completeness_residual: Option<f64>,
    pub self_dual_coefficient: Option<f64>,
    /// `c` with `U^dagger U = c I` (square) or `U U^dagger = c I` (wide).
    pub scaled_unitary: Option<f64>,
    pub povm: PovmDiagnostics,
    pub negativity: std::result::Result<NegativityReport, Error>,
    pub matrix_unit_like: Option<Matrix>,
}

pub fn classify(s: &Scheme, tol: &ToleranceConfig) -> SchemeReport {
    classify_in(s, &VectorizationBasis::RowStacking, tol)
        .expect("row stacking accepts every well-formed scheme")
}

/// Classification with an explicit vectorization basis; fails only when the
/// basis does not act on `H_d`.
pub fn classify_in(
    s: &Scheme,
    basis: &VectorizationBasis,
    tol: &ToleranceConfig,
) -> Result<SchemeReport> {
    let d2 = s.d * s.d;
    let u = dequantization_matrix(s, basis)?;
    let sv = svd(&u);
    let rank = rank_from_singular_values(&sv, tol);
    let tomographic = rank == d2;
    let cardinality = match (tomographic, s.n() == d2) {
        (false, _) => Cardinality::Underfilled,
        (true, true) => Cardinality::Minimal,
        (true, false) => Cardinality::Overfilled,
    };
    let condition = if tomographic {
        condition_number(&sv, d2)
    } else {
        f64::INFINITY
    };

    let (quantizer_source, with_q) = match (&s.quantizers, tomographic) {
        (Some(_), _) => (QuantizerSource::Attached, Some(s.clone())),
        (None, true) => {
            let q = canonical_quantizers(s, tol)?;
            (QuantizerSource::Canonical, Some(s.clone().with_quantizers(q)?))
        }
        (None, false) => (QuantizerSource::Undefined, None),
    };
    let completeness = match &with_q {
        Some(sq) if tomographic => Some(completeness_residual(sq, basis)?),
        _ => None,
    };
    let self_dual = match &with_q {
        Some(sq) => self_dual_coefficient(sq, tol)?,
        None => None,
    };
    let scaled_unitary = if u.is_square() {
        scaled_unitary_check(&u, tol)?
    } else if u.cols() > u.rows() {
        tight_frame_coefficient(&u, tol)
    } else {
        None
    };
    let negativity = negativity_report(with_q.as_ref().unwrap_or(s), tol);

    Ok(SchemeReport {
        d: s.d,
        n: s.n(),
        basis: basis.tag().to_owned(),
        cardinality,
        tomographic,
        rank,
        singular_values: sv,
        condition_number: condition,
        quantizer_source,
        completeness_residual: completeness,
        self_dual_coefficient: self_dual,
        scaled_unitary,
        povm: povm_check(s, tol),
        negativity,
        matrix_unit_like: matrix_unit_like_detect(s, tol),
    })
}

impl SchemeReport {
    /// One-line verdict used by the CLI.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        let tomo = if self.tomographic {
            "tomographic"
        } else {
            "not tomographic"
        };
        let head = format!("{}, {}", self.cardinality, tomo);
        if let Some(c) = self.self_dual_coefficient {
            parts.push(format!("{head}, self-dual, c = {}", fmt_num(c)));
        } else {
            parts.push(head);
        }
        if self.quantizer_source == QuantizerSource::Undefined {
            parts.push("quantizers undefined".into());
        }
        if self.povm.is_povm {
            if let Some(head) = parts.first_mut() {
                head.push_str(", POVM");
            }
        } else if self.povm.sum_residual <= 1e-9 && self.povm.hermiticity_residual <= 1e-9 {
            parts.push(format!(
                "NOT a POVM (min eigenvalue ≈ {:.5})",
                self.povm.min_effect_eigenvalue
            ));
        } else {
            parts.push("NOT a POVM".into());
        }
        let mut out = parts.join("; ");
        if self.condition_number.is_finite() {
            out.push_str(&format!("; condition number ≈ {:.7}", self.condition_number));
        }
        out
    }
}

fn fmt_num(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    format!("{r}")
}

/// Identity-valued helper used in several checks: `max |M - I|`.
pub fn identity_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    m.max_abs_diff(&Matrix::identity(m.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, ONE, ZERO};
    use crate::operator_space::{matrix_unit, pauli_matrices};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn units(d: usize) -> Vec<Matrix> {
        (1..=d)
            .flat_map(|i| (1..=d).map(move |j| matrix_unit(d, i, j).unwrap()))
            .collect()
    }

    fn projector(v: &[C64]) -> Matrix {
        Matrix::outer(v, v)
    }

    fn mub() -> Scheme {
        let s = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let i = c64(0.0, 1.0);
        let vs = [
            [ONE, ZERO],
            [ZERO, ONE],
            [s, s],
            [s, -s],
            [s, i * s],
            [s, -i * s],
        ];
        Scheme::new(2, vs.iter().map(|v| projector(v)).collect()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(Scheme::new(0, units(1)).is_err());
        assert!(matches!(Scheme::new(2, vec![]), Err(Error::WrongCount { .. })));
        assert!(matches!(
            Scheme::new(3, units(2)),
            Err(Error::DimensionMismatch(_))
        ));
        let s = Scheme::new(2, units(2)).unwrap();
        assert!(matches!(
            s.clone().with_quantizers(units(2)[..3].to_vec()),
            Err(Error::WrongCount { expected: 4, got: 3 })
        ));
        assert_eq!(s.tag(), "scheme(d=2, N=4)");
    }

    #[test]
    fn underfilled_scheme() {
        let s = Scheme::new(2, units(2)[..3].to_vec()).unwrap();
        let r = classify(&s, &tol());
        assert_eq!(r.cardinality, Cardinality::Underfilled);
        assert!(!r.tomographic);
        assert_eq!(r.rank, 3);
        assert_eq!(r.quantizer_source, QuantizerSource::Undefined);
        assert!(r.condition_number.is_infinite());
        assert!(r.summary().starts_with("underfilled, not tomographic; quantizers undefined"));
        assert_eq!(
            canonical_quantizers(&s, &tol()).unwrap_err(),
            Error::NotTomographic { rank: 3, required: 4 }
        );
    }

    #[test]
    fn rank_deficient_with_many_points_is_underfilled() {
        let mut ops = units(2)[..3].to_vec();
        ops.push(ops[0].scale_real(2.0));
        ops.push(&ops[1] + &ops[2]);
        let r = classify(&Scheme::new(2, ops).unwrap(), &tol());
        assert_eq!(r.cardinality, Cardinality::Underfilled);
    }

    #[test]
    fn matrix_units_are_self_dual() {
        let s = Scheme::new(3, units(3)).unwrap();
        let q = canonical_quantizers(&s, &tol()).unwrap();
        for (a, b) in q.iter().zip(s.dequantizers()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        let r = classify(&s, &tol());
        assert_eq!(r.cardinality, Cardinality::Minimal);
        assert_eq!(r.self_dual_coefficient, Some(1.0));
        assert_eq!(r.scaled_unitary, Some(1.0));
        assert_eq!(r.condition_number, 1.0);
        assert_eq!(r.matrix_unit_like, Some(Matrix::identity(3)));
    }

    #[test]
    fn pauli_scheme_classification() {
        let ops: Vec<Matrix> = pauli_matrices()
            .iter()
            .map(|p| p.scale_real(std::f64::consts::FRAC_1_SQRT_2))
            .collect();
        let s = Scheme::new(2, ops).unwrap();
        let r = classify(&s, &tol());
        assert_eq!(r.quantizer_source, QuantizerSource::Canonical);
        assert!((r.self_dual_coefficient.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.matrix_unit_like.is_none());
        let neg = r.negativity.unwrap();
        assert!((neg.min_dequantizer_eigenvalue + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(!r.povm.is_povm);
    }

    #[test]
    fn canonical_quantizers_of_sic_effects() {
        // tetrahedral effects Pi_k / 2; canonical duals are 3 Pi_k - I
        let r3 = 1.0 / 3f64.sqrt();
        let p = pauli_matrices();
        let signs = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let pis: Vec<Matrix> = signs
            .iter()
            .map(|n| {
                let mut m = p[0].clone();
                for (a, s) in n.iter().zip(&p[1..]) {
                    m = &m + &s.scale_real(a * r3);
                }
                m.scale_real(0.5)
            })
            .collect();
        let s = Scheme::new(2, pis.iter().map(|m| m.scale_real(0.5)).collect()).unwrap();
        let q = canonical_quantizers(&s, &tol()).unwrap();
        for (dq, pi) in q.iter().zip(&pis) {
            let want = &pi.scale_real(3.0) - &Matrix::identity(2);
            assert!(dq.max_abs_diff(&want) < 1e-12);
        }
        let r = classify(&s, &tol());
        assert!(r.povm.is_povm);
        assert!(r.summary().contains("minimal, tomographic, POVM; condition number ≈ 1.7320508"));
        assert!(r.self_dual_coefficient.is_none());
        let nq = r.negativity.unwrap().min_quantizer_eigenvalue.unwrap();
        assert!((nq + 1.0).abs() < 1e-12);
    }

    #[test]
    fn overfilled_canonical_quantizers() {
        let s = mub();
        let r = classify(&s, &tol());
        assert_eq!(r.cardinality, Cardinality::Overfilled);
        assert!((r.condition_number - 3f64.sqrt()).abs() < 1e-12);
        assert!(r.completeness_residual.unwrap() < 1e-12);
        let sq = s.clone().with_quantizers(canonical_quantizers(&s, &tol()).unwrap()).unwrap();
        let delta = duality_matrix(&sq).unwrap();
        assert!((&delta * &delta).max_abs_diff(&delta) < 1e-12);
        assert!((delta.trace().unwrap().re - 4.0).abs() < 1e-12);
        // biorthogonality fails for an overfilled family
        assert!(delta.max_abs_diff(&Matrix::identity(6)) > 0.1);
    }

    #[test]
    fn gauge_cases() {
        let tol = tol();
        let s = mub();
        assert_eq!(
            gauge_quantizers(&s, &Matrix::zeros(4, 6), &tol).unwrap_err(),
            Error::MissingQuantizers
        );
        let sq = s.clone().with_quantizers(canonical_quantizers(&s, &tol).unwrap()).unwrap();
        let u = dequantization_matrix(&s, &VectorizationBasis::RowStacking).unwrap();
        // a gauge row built from the null space of U
        let ns = crate::matrix::null_space(&u, &tol);
        assert_eq!(ns.len(), 2);
        let g = Matrix::from_fn(4, 6, |r, c| if r == 1 { ns[0][c].conj() } else { ZERO });
        let q = gauge_quantizers(&sq, &g, &tol).unwrap();
        let shifted = s.clone().with_quantizers(q).unwrap();
        assert!(completeness_residual(&shifted, &VectorizationBasis::RowStacking).unwrap() < 1e-12);
        let bad = Matrix::from_fn(4, 6, |r, c| if r == c { ONE } else { ZERO });
        assert!(matches!(gauge_quantizers(&sq, &bad, &tol), Err(Error::InvalidGauge { .. })));
        assert!(matches!(
            gauge_quantizers(&sq, &Matrix::zeros(4, 5), &tol),
            Err(Error::DimensionMismatch(_))
        ));
        let minimal = Scheme::new(2, units(2)).unwrap().with_quantizers(units(2)).unwrap();
        assert_eq!(
            gauge_quantizers(&minimal, &Matrix::zeros(4, 4), &tol).unwrap_err(),
            Error::NotOverfilled
        );
    }

    #[test]
    fn attach_checks_completeness() {
        let s = Scheme::new(2, units(2)).unwrap();
        assert!(s.clone().attach_quantizers(units(2), &tol()).is_ok());
        let wrong: Vec<Matrix> = units(2).iter().map(|m| m.scale_real(2.0)).collect();
        assert!(matches!(s.attach_quantizers(wrong, &tol()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn permutation() {
        let s = mub();
        let p = s.permuted(&[5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(p.dequantizers()[0], s.dequantizers()[5]);
        assert!(s.permuted(&[0, 0, 1, 2, 3, 4]).is_err());
        assert!(s.permuted(&[0, 1]).is_err());
    }

    #[test]
    fn self_dual_needs_quantizers() {
        let s = Scheme::new(2, units(2)).unwrap();
        assert_eq!(self_dual_coefficient(&s, &tol()).unwrap_err(), Error::MissingQuantizers);
        let scaled: Vec<Matrix> = units(2).iter().map(|m| m.scale_real(4.0)).collect();
        let s = s.with_quantizers(scaled).unwrap();
        assert_eq!(self_dual_coefficient(&s, &tol()).unwrap(), Some(0.25));
    }

    #[test]
    fn scaled_unitary_cases() {
        assert!(matches!(
            scaled_unitary_check(&Matrix::zeros(2, 3), &tol()),
            Err(Error::NotSquare { .. })
        ));
        assert_eq!(scaled_unitary_check(&Matrix::identity(3).scale_real(3.0), &tol()).unwrap(), Some(9.0));
        let m = Matrix::diag(&[ONE, c64(2.0, 0.0)]);
        assert_eq!(scaled_unitary_check(&m, &tol()).unwrap(), None);
        assert_eq!(scaled_unitary_check(&Matrix::zeros(2, 2), &tol()).unwrap(), None);
    }

    #[test]
    fn non_hermitian_negativity() {
        let ops: Vec<Matrix> = units(2);
        let r = classify(&Scheme::new(2, ops).unwrap(), &tol());
        assert!(matches!(
            r.negativity,
            Err(Error::NonHermitianMember {
                family: Family::Dequantizers,
                index: 1,
                ..
            })
        ));
    }

    #[test]
    fn rotated_matrix_units_are_detected() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let u = Matrix::from_rows(&[
            vec![c64(s2, 0.0), c64(0.0, s2)],
            vec![c64(0.0, s2), c64(s2, 0.0)],
        ])
        .unwrap();
        let cols = [u.column(0), u.column(1)];
        let ops: Vec<Matrix> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| Matrix::outer(&cols[i], &cols[j]))
            .collect();
        let got = matrix_unit_like_detect(&Scheme::new(2, ops.clone()).unwrap(), &tol()).unwrap();
        assert!(got.max_abs_diff(&u) < 1e-12);
        // order matters: U_1 and U_2 exchanged is no longer of the form psi_i psi_j^dagger
        let mut swapped = ops;
        swapped.swap(1, 2);
        assert!(matrix_unit_like_detect(&Scheme::new(2, swapped).unwrap(), &tol()).is_none());
    }

    #[test]
    fn classification_in_pauli_basis_matches() {
        let s = mub();
        let a = classify(&s, &tol());
        let b = classify_in(&s, &VectorizationBasis::pauli(), &tol()).unwrap();
        assert_eq!(a.rank, b.rank);
        assert!((a.condition_number - b.condition_number).abs() < 1e-12);
        assert!(classify_in(&Scheme::new(3, units(3)).unwrap(), &VectorizationBasis::pauli(), &tol()).is_err());
    }

    #[test]
    fn identity_residual_cases() {
        assert_eq!(identity_residual(&Matrix::identity(3)), 0.0);
        assert!(identity_residual(&Matrix::zeros(2, 3)).is_infinite());
    }
}
