//! Concrete schemes: matrix units, Pauli operators, the qubit phase-space
//! scheme with tetrahedral dequantizers, qubit SIC and MUB families,
//! Weyl–Heisenberg SIC orbits, prime-dimension MUBs and a seeded sampler of
//! random informationally complete POVMs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cli::files::VectorFile;
use crate::error::{Error, Family, Result};
use crate::matrix::{c64, hermitian_eig, Matrix, ToleranceConfig, C64, I, ONE, ZERO};
use crate::operator_space::{hs_inner, matrix_unit, pauli_matrices};
use crate::random::random_operator;
use crate::scheme::{Cardinality, Scheme};

const SHIPPED_FIDUCIAL_D3: &str = include_str!("../data/sic_fiducial_d3.json");

const MAX_SAMPLER_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliVariant {
    /// `(I, sx, sy, sz) / sqrt 2`.
    Hermitian,
    /// `(I, sx, i sy, sz) / sqrt 2`.
    WithISigmaY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LivineNormalization {
    /// `U_k = (I ± sx ± sy ± sz) / 4`, `D_k = 2 U_k`.
    Dequantizer,
    /// `U_k = D_k = sqrt(2) (I ± sx ± sy ± sz) / 4`.
    SelfDualNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicNormalization {
    /// Rank-one projectors `Pi_k`.
    Projector,
    /// Effects `Pi_k / 2` summing to the identity.
    Povm,
}

/// `E_(i,j)` at `k = d*i + j`, self-dual with `c = 1`.
pub fn matrix_units_scheme(d: usize) -> Result<Scheme> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let units: Vec<Matrix> = (1..=d)
        .flat_map(|i| (1..=d).map(move |j| (i, j)))
        .map(|(i, j)| matrix_unit(d, i, j))
        .collect::<Result<_>>()?;
    Scheme::new(d, units.clone())?
        .named(format!("matrix-units-d{d}"))
        .with_quantizers(units)
}

pub fn pauli_scheme(variant: PauliVariant) -> Scheme {
    let mut ops: Vec<Matrix> = pauli_matrices()
        .iter()
        .map(|m| m.scale_real(FRAC_1_SQRT_2))
        .collect();
    let name = match variant {
        PauliVariant::Hermitian => "pauli",
        PauliVariant::WithISigmaY => {
            ops[2] = ops[2].scale(I);
            "pauli-i-sigma-y"
        }
    };
    // unitary dequantization matrix: quantizers coincide with dequantizers
    Scheme::new(2, ops.clone())
        .and_then(|s| s.named(name).with_quantizers(ops))
        .expect("2x2 operators")
}

/// Signs of `(sx, sy, sz)` for the four tetrahedral phase-space points.
const LIVINE_SIGNS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

fn bloch_combination(scale: f64, identity: f64, n: [f64; 3]) -> Matrix {
    let p = pauli_matrices();
    let mut m = p[0].scale_real(identity);
    for (a, s) in n.iter().zip(&p[1..]) {
        m = &m + &s.scale_real(*a);
    }
    m.scale_real(scale)
}

pub fn livine_scheme(normalization: LivineNormalization) -> Scheme {
    let base: Vec<Matrix> = LIVINE_SIGNS
        .iter()
        .map(|&n| bloch_combination(0.25, 1.0, n))
        .collect();
    let (name, deq, quant) = match normalization {
        LivineNormalization::Dequantizer => (
            "livine",
            base.clone(),
            base.iter().map(|u| u.scale_real(2.0)).collect::<Vec<_>>(),
        ),
        LivineNormalization::SelfDualNormalized => {
            let t: Vec<Matrix> = base.iter().map(|u| u.scale_real(2f64.sqrt())).collect();
            ("livine-self-dual", t.clone(), t)
        }
    };
    Scheme::new(2, deq)
        .and_then(|s| s.named(name).with_quantizers(quant))
        .expect("2x2 operators")
}

/// Tetrahedral qubit SIC with Bloch vectors `(±1, ±1, ±1)/sqrt 3` (even
/// number of minus signs), ordered as in [`LIVINE_SIGNS`].
pub fn sic_qubit_scheme(normalization: SicNormalization) -> Scheme {
    let r = 1.0 / 3f64.sqrt();
    let (scale, name) = match normalization {
        SicNormalization::Projector => (0.5, "sic-qubit-projector"),
        SicNormalization::Povm => (0.25, "sic-qubit-povm"),
    };
    let ops = LIVINE_SIGNS
        .iter()
        .map(|n| bloch_combination(scale, 1.0, [n[0] * r, n[1] * r, n[2] * r]))
        .collect();
    Scheme::new(2, ops).expect("2x2 operators").named(name)
}

fn projector(v: &[C64]) -> Matrix {
    Matrix::outer(v, v)
}

fn qubit_mub_vectors() -> Vec<[C64; 2]> {
    let s = c64(FRAC_1_SQRT_2, 0.0);
    vec![
        [ONE, ZERO],
        [ZERO, ONE],
        [s, s],
        [s, -s],
        [s, I * s],
        [s, -I * s],
    ]
}

/// Projectors onto the eigenbases of `sz`, `sx`, `sy` in the order
/// `|0>, |1>, |x+>, |x->, |y+>, |y->`.
pub fn mub_qubit_scheme() -> Scheme {
    let ops = qubit_mub_vectors().iter().map(|v| projector(v)).collect();
    Scheme::new(2, ops).expect("2x2 operators").named("mub-qubit")
}

/// Clock `Z = diag(1, w, ..., w^{d-1})`, `w = exp(2 pi i / d)`.
pub fn clock(d: usize) -> Matrix {
    let w = |k: usize| C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    Matrix::from_fn(d, d, |i, j| if i == j { w(i) } else { ZERO })
}

/// Shift `X |e_j> = |e_{j+1 mod d}>`.
pub fn shift(d: usize) -> Matrix {
    Matrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
}

/// Overlaps `Tr[P_k P_k']` of a family of operators.
pub fn gram(ops: &[Matrix]) -> Matrix {
    let n = ops.len();
    Matrix::from_fn(n, n, |a, b| hs_inner(&ops[a], &ops[b]).expect("same shape"))
}

/// Projectors onto `X^a Z^b |fiducial>` at `k = d*a + b`, checked against the
/// SIC overlap condition `Tr[P_k P_k'] = (d delta + 1)/(d + 1)`.
pub fn wh_sic_scheme(d: usize, fiducial: &[C64], tol: &ToleranceConfig) -> Result<Scheme> {
    if d < 2 {
        return Err(Error::InvalidInput("SIC orbit needs d >= 2".into()));
    }
    if fiducial.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "fiducial has {} components, expected {d}",
            fiducial.len()
        )));
    }
    let norm: f64 = fiducial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol.residual_tol {
        return Err(Error::InvalidInput(format!(
            "fiducial norm {norm} differs from 1"
        )));
    }
    let (x, z) = (shift(d), clock(d));
    let mut ops = Vec::with_capacity(d * d);
    let mut xa = Matrix::identity(d);
    for _a in 0..d {
        let mut zb = Matrix::identity(d);
        for _b in 0..d {
            let v = (&xa * &zb).apply(fiducial)?;
            ops.push(projector(&v));
            zb = &zb * &z;
        }
        xa = &xa * &x;
    }
    let residual = sic_gram_residual(&ops, d);
    if residual > tol.residual_tol.max(1e-9) {
        return Err(Error::NotSic { residual });
    }
    Ok(Scheme::new(d, ops)?.named(format!("wh-sic-d{d}")))
}

/// `max |Tr[P_k P_k'] - (d delta + 1)/(d + 1)|`.
pub fn sic_gram_residual(projectors: &[Matrix], d: usize) -> f64 {
    let g = gram(projectors);
    let df = d as f64;
    let n = projectors.len();
    let target = Matrix::from_fn(n, n, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        c64((df * delta + 1.0) / (df + 1.0), 0.0)
    });
    g.max_abs_diff(&target)
}

/// Weyl–Heisenberg SIC fiducials shipped with the crate (`d = 2, 3`).
///
/// The qubit fiducial is the Bloch vector `(1,1,1)/sqrt 3`; the qutrit one
/// was produced by the `sic_fiducial_search` example.
pub fn shipped_fiducial(d: usize) -> Result<Vec<C64>> {
    match d {
        2 => {
            let theta = (1.0 / 3f64.sqrt()).acos();
            Ok(vec![
                c64((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), PI / 4.0),
            ])
        }
        3 => {
            let file: VectorFile = serde_json::from_str(SHIPPED_FIDUCIAL_D3)?;
            let v = file.to_complex();
            if v.len() != 3 {
                return Err(Error::Parse("shipped d = 3 fiducial has wrong length".into()));
            }
            Ok(v)
        }
        _ => Err(Error::InvalidInput(format!("no shipped fiducial for d = {d}"))),
    }
}

pub fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

/// Complete set of `p + 1` mutually unbiased bases for prime `p`: the
/// computational basis followed by the bases
/// `<e_m|a, alpha> = w^{a m^2 + alpha m} / sqrt p` (`p = 2`: the `sx`, `sy`
/// eigenbases).
pub fn mub_prime_scheme(p: usize) -> Result<Scheme> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(mub_qubit_scheme().named("mub-prime-2"));
    }
    let amp = 1.0 / (p as f64).sqrt();
    let w = |e: usize| C64::from_polar(amp, 2.0 * PI * (e % p) as f64 / p as f64);
    let mut vectors: Vec<Vec<C64>> = (0..p)
        .map(|m| (0..p).map(|j| if j == m { ONE } else { ZERO }).collect())
        .collect();
    for a in 0..p {
        for alpha in 0..p {
            vectors.push((0..p).map(|m| w(a * m * m + alpha * m)).collect());
        }
    }
    let ops = vectors.iter().map(|v| projector(v)).collect();
    Ok(Scheme::new(p, ops)?.named(format!("mub-prime-{p}")))
}

/// `d^2` random effects `S^{-1/2} G_k G_k^dagger S^{-1/2}` (`G_k` standard
/// complex Gaussian, `S = sum_k G_k G_k^dagger`), resampled until the family
/// is informationally complete.
pub fn random_minimal_povm_scheme(d: usize, seed: u64) -> Result<Scheme> {
    if d < 2 {
        return Err(Error::InvalidInput("random POVM needs d >= 2".into()));
    }
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLER_ATTEMPTS {
        let positives: Vec<Matrix> = (0..d * d)
            .map(|_| {
                let g = random_operator(d, d, &mut rng);
                &g * &g.adjoint()
            })
            .collect();
        let total = positives
            .iter()
            .skip(1)
            .fold(positives[0].clone(), |acc, a| &acc + a);
        let eig = hermitian_eig(&total.hermitian_part()?, &tol)?;
        if eig.values[0] <= 0.0 {
            continue;
        }
        let inv_sqrt = eig.map_spectrum(|x| 1.0 / x.sqrt());
        let effects: Vec<Matrix> = positives
            .iter()
            .map(|a| (&(&inv_sqrt * a) * &inv_sqrt).hermitian_part())
            .collect::<Result<_>>()?;
        let s = Scheme::new(d, effects)?.named(format!("random-povm-d{d}-seed{seed}"));
        if s.is_tomographic(&tol) {
            return Ok(s);
        }
    }
    Err(Error::SamplerFailure(MAX_SAMPLER_ATTEMPTS))
}

/// Known classification facts for a catalog scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedFragments {
    pub cardinality: Cardinality,
    pub tomographic: bool,
    pub rank: usize,
    pub condition_number: Option<f64>,
    /// `Some(None)`: known not to be self-dual.
    pub self_dual_coefficient: Option<Option<f64>>,
    pub is_povm: Option<bool>,
    pub min_dequantizer_eigenvalue: Option<f64>,
    pub matrix_unit_like: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub scheme: Scheme,
    pub expected: Option<ExpectedFragments>,
}

/// Every named scheme with its known report fragments.
pub fn catalog_entries() -> Vec<CatalogEntry> {
    let sqrt3 = 3f64.sqrt();
    let entry = |scheme: Scheme, expected: ExpectedFragments| CatalogEntry {
        name: scheme.tag(),
        scheme,
        expected: Some(expected),
    };
    let minimal = |rank: usize, cond: f64| ExpectedFragments {
        cardinality: Cardinality::Minimal,
        tomographic: true,
        rank,
        condition_number: Some(cond),
        self_dual_coefficient: None,
        is_povm: None,
        min_dequantizer_eigenvalue: None,
        matrix_unit_like: None,
    };
    let mut out = vec![
        entry(
            matrix_units_scheme(2).expect("d = 2"),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(1.0)),
                is_povm: Some(false),
                matrix_unit_like: Some(true),
                ..minimal(4, 1.0)
            },
        ),
        entry(
            matrix_units_scheme(3).expect("d = 3"),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(1.0)),
                is_povm: Some(false),
                matrix_unit_like: Some(true),
                ..minimal(9, 1.0)
            },
        ),
        entry(
            pauli_scheme(PauliVariant::Hermitian),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(1.0)),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(-FRAC_1_SQRT_2),
                matrix_unit_like: Some(false),
                ..minimal(4, 1.0)
            },
        ),
        entry(
            pauli_scheme(PauliVariant::WithISigmaY),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(1.0)),
                is_povm: Some(false),
                ..minimal(4, 1.0)
            },
        ),
        entry(
            livine_scheme(LivineNormalization::Dequantizer),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(0.5)),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some((1.0 - sqrt3) / 4.0),
                matrix_unit_like: Some(false),
                ..minimal(4, 1.0)
            },
        ),
        entry(
            livine_scheme(LivineNormalization::SelfDualNormalized),
            ExpectedFragments {
                self_dual_coefficient: Some(Some(1.0)),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(2f64.sqrt() * (1.0 - sqrt3) / 4.0),
                ..minimal(4, 1.0)
            },
        ),
        entry(
            sic_qubit_scheme(SicNormalization::Projector),
            ExpectedFragments {
                self_dual_coefficient: Some(None),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(0.0),
                ..minimal(4, sqrt3)
            },
        ),
        entry(
            sic_qubit_scheme(SicNormalization::Povm),
            ExpectedFragments {
                self_dual_coefficient: Some(None),
                is_povm: Some(true),
                min_dequantizer_eigenvalue: Some(0.0),
                matrix_unit_like: Some(false),
                ..minimal(4, sqrt3)
            },
        ),
        entry(
            mub_qubit_scheme(),
            ExpectedFragments {
                cardinality: Cardinality::Overfilled,
                self_dual_coefficient: Some(None),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(0.0),
                ..minimal(4, sqrt3)
            },
        ),
        entry(
            mub_prime_scheme(3).expect("prime"),
            ExpectedFragments {
                cardinality: Cardinality::Overfilled,
                self_dual_coefficient: Some(None),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(0.0),
                ..minimal(9, 2.0)
            },
        ),
    ];
    let tol = ToleranceConfig::default();
    for d in [2usize, 3] {
        let fid = shipped_fiducial(d).expect("shipped fiducial");
        out.push(entry(
            wh_sic_scheme(d, &fid, &tol).expect("shipped fiducial is SIC"),
            ExpectedFragments {
                self_dual_coefficient: Some(None),
                is_povm: Some(false),
                min_dequantizer_eigenvalue: Some(0.0),
                ..minimal(d * d, ((d + 1) as f64).sqrt())
            },
        ));
    }
    out
}

/// Which family of which scheme a printed matrix shows.
#[derive(Debug, Clone)]
pub struct MatrixSource {
    pub scheme: Scheme,
    pub family: Family,
}

impl MatrixSource {
    fn dequantizers(scheme: Scheme) -> Self {
        Self {
            scheme,
            family: Family::Dequantizers,
        }
    }

    pub fn matrix(&self, basis: &crate::operator_space::VectorizationBasis) -> Result<Matrix> {
        match self.family {
            Family::Dequantizers => crate::scheme::dequantization_matrix(&self.scheme, basis),
            Family::Quantizers => crate::scheme::quantization_matrix(&self.scheme, basis),
        }
    }
}

/// A deviation of the printed qubit table from the derived vectorization.
#[derive(Debug, Clone, PartialEq)]
pub struct Erratum {
    pub row: usize,
    pub description: String,
}

/// One row of the qubit reference table.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub row: usize,
    pub entry: CatalogEntry,
    pub row_stacking_source: MatrixSource,
    pub pauli_source: MatrixSource,
    /// Matrices the generated ones must reproduce.
    pub expected_row_stacking: Matrix,
    pub expected_pauli: Matrix,
    /// Matrices as printed in the reference table.
    pub printed_row_stacking: Matrix,
    pub printed_pauli: Matrix,
    pub erratum: Option<Erratum>,
}

impl TableRow {
    /// Generated `(row-stacking, Pauli)` matrices.
    pub fn generate(&self) -> Result<(Matrix, Matrix)> {
        use crate::operator_space::VectorizationBasis;
        Ok((
            self.row_stacking_source.matrix(&VectorizationBasis::RowStacking)?,
            self.pauli_source.matrix(&VectorizationBasis::pauli())?,
        ))
    }

    /// `max |printed - expected|` for the two blocks.
    pub fn printed_deviation(&self) -> (f64, f64) {
        (
            self.printed_row_stacking.max_abs_diff(&self.expected_row_stacking),
            self.printed_pauli.max_abs_diff(&self.expected_pauli),
        )
    }
}

fn lit(scale: f64, rows: &[&[C64]]) -> Matrix {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|z| z * scale).collect()).collect();
    Matrix::from_rows(&rows).expect("rectangular literal")
}

/// The six rows of the qubit reference table. Rows 1–3 expect the printed
/// matrices verbatim; rows 4–6 expect the derived vectorizations and carry
/// an erratum describing how the printed matrices differ.
pub fn table_regression_set() -> Vec<TableRow> {
    let r = |x: f64| c64(x, 0.0);
    let (o, z, i) = (ONE, ZERO, I);
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let id4 = Matrix::identity(4);
    let mut rows = Vec::new();

    let mu = matrix_units_scheme(2).expect("d = 2");
    let row1_pauli = lit(
        FRAC_1_SQRT_2,
        &[&[o, z, z, o], &[z, o, o, z], &[z, i, -i, z], &[o, z, z, -o]],
    );
    rows.push(TableRow {
        row: 1,
        entry: CatalogEntry {
            name: mu.tag(),
            scheme: mu.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource::dequantizers(mu.clone()),
        pauli_source: MatrixSource::dequantizers(mu),
        expected_row_stacking: id4.clone(),
        expected_pauli: row1_pauli.clone(),
        printed_row_stacking: id4.clone(),
        printed_pauli: row1_pauli,
        erratum: None,
    });

    let pauli = pauli_scheme(PauliVariant::Hermitian);
    let row2_rs = lit(
        FRAC_1_SQRT_2,
        &[&[o, z, z, o], &[z, o, -i, z], &[z, o, i, z], &[o, z, z, -o]],
    );
    rows.push(TableRow {
        row: 2,
        entry: CatalogEntry {
            name: pauli.tag(),
            scheme: pauli.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource::dequantizers(pauli.clone()),
        pauli_source: MatrixSource::dequantizers(pauli),
        expected_row_stacking: row2_rs.clone(),
        expected_pauli: id4.clone(),
        printed_row_stacking: row2_rs,
        printed_pauli: id4.clone(),
        erratum: None,
    });

    let pauli_i = pauli_scheme(PauliVariant::WithISigmaY);
    let row3_rs = lit(
        FRAC_1_SQRT_2,
        &[&[o, z, z, o], &[z, o, o, z], &[z, o, -o, z], &[o, z, z, -o]],
    );
    let row3_pauli = Matrix::diag(&[o, o, i, o]);
    rows.push(TableRow {
        row: 3,
        entry: CatalogEntry {
            name: pauli_i.tag(),
            scheme: pauli_i.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource::dequantizers(pauli_i.clone()),
        pauli_source: MatrixSource::dequantizers(pauli_i),
        expected_row_stacking: row3_rs.clone(),
        expected_pauli: row3_pauli.clone(),
        printed_row_stacking: row3_rs,
        printed_pauli: row3_pauli,
        erratum: None,
    });

    let livine = livine_scheme(LivineNormalization::Dequantizer);
    let livine_sd = livine_scheme(LivineNormalization::SelfDualNormalized);
    let (p, m) = (c64(1.0, 1.0), c64(1.0, -1.0));
    let row4_rs = lit(
        0.5,
        &[
            &[r(2.0), z, z, r(2.0)],
            &[m, p, -p, -m],
            &[p, m, -m, -p],
            &[z, r(2.0), r(2.0), z],
        ],
    );
    let row4_pauli = lit(
        0.5,
        &[&[o, o, o, o], &[o, o, -o, -o], &[o, -o, o, -o], &[o, -o, -o, o]],
    );
    rows.push(TableRow {
        row: 4,
        entry: CatalogEntry {
            name: livine.tag(),
            scheme: livine.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource {
            scheme: livine,
            family: Family::Quantizers,
        },
        pauli_source: MatrixSource::dequantizers(livine_sd),
        expected_row_stacking: row4_rs.clone(),
        expected_pauli: row4_pauli.clone(),
        printed_row_stacking: row4_rs,
        printed_pauli: row4_pauli,
        erratum: Some(Erratum {
            row: 4,
            description: "blocks use different normalizations of one scheme: the row-stacking \
                          block is the quantizer matrix D_k = 2 U_k, the Pauli block the \
                          coincident normalization sqrt(2) U_k; neither is the dequantization \
                          matrix of U_k = (I ± sx ± sy ± sz)/4 itself"
                .into(),
        }),
    });

    let sic = sic_qubit_scheme(SicNormalization::Projector);
    let (a, b) = (r(s3 + 1.0), r(s3 - 1.0));
    let row5_rs = lit(
        1.0 / (2.0 * s3),
        &[&[a, b, b, a], &[m, p, -p, -m], &[p, m, -m, -p], &[b, a, a, b]],
    );
    let row5_signs: &[&[C64]] = &[
        &[r(s3), r(s3), r(s3), r(s3)],
        &[o, o, -o, -o],
        &[o, -o, o, -o],
        &[o, -o, -o, o],
    ];
    rows.push(TableRow {
        row: 5,
        entry: CatalogEntry {
            name: sic.tag(),
            scheme: sic.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource::dequantizers(sic.clone()),
        pauli_source: MatrixSource::dequantizers(sic),
        expected_row_stacking: row5_rs.clone(),
        expected_pauli: lit(1.0 / 6f64.sqrt(), row5_signs),
        printed_row_stacking: row5_rs,
        printed_pauli: lit(1.0 / (2.0 * s3), row5_signs),
        erratum: Some(Erratum {
            row: 5,
            description: "columns are the projectors Pi_k rather than the POVM effects Pi_k/2; \
                          the printed Pauli block is a further factor 1/sqrt(2) below the Pauli \
                          coordinates of Pi_k"
                .into(),
        }),
    });

    let mub = mub_qubit_scheme();
    let h = r(0.5);
    let hi = c64(0.0, 0.5);
    let row6_rs_expected = Matrix::from_rows(&[
        vec![o, z, h, h, h, h],
        vec![z, z, h, -h, -hi, hi],
        vec![z, z, h, -h, hi, -hi],
        vec![z, o, h, h, h, h],
    ])
    .expect("4x6");
    let row6_rs_printed = lit(
        FRAC_1_SQRT_2,
        &[
            &[r(s2), z, o, o, o, o],
            &[z, z, o, -o, i, -i],
            &[z, z, o, -o, -i, i],
            &[z, r(s2), o, o, o, o],
        ],
    );
    let row6_pauli_expected = lit(
        FRAC_1_SQRT_2,
        &[
            &[o, o, o, o, o, o],
            &[z, z, o, -o, z, z],
            &[z, z, z, z, o, -o],
            &[o, -o, z, z, z, z],
        ],
    );
    let row6_pauli_printed = lit(
        1.0 / (2.0 * s2),
        &[
            &[r(s2), r(s2), o, o, o, o],
            &[z, z, o, -o, z, z],
            &[z, z, z, z, -o, o],
            &[r(s2), -r(s2), z, z, z, z],
        ],
    );
    rows.push(TableRow {
        row: 6,
        entry: CatalogEntry {
            name: mub.tag(),
            scheme: mub.clone(),
            expected: None,
        },
        row_stacking_source: MatrixSource::dequantizers(mub.clone()),
        pauli_source: MatrixSource::dequantizers(mub),
        expected_row_stacking: row6_rs_expected,
        expected_pauli: row6_pauli_expected,
        printed_row_stacking: row6_rs_printed,
        printed_pauli: row6_pauli_printed,
        erratum: Some(Erratum {
            row: 6,
            description: "printed columns 3-6 are sqrt(2) times the projector vectorization; \
                          the sy eigenbasis is printed as (y-, y+) and is ordered (y+, y-) \
                          here; the printed Pauli block is scaled 1/sqrt(2) in columns 1-2 and \
                          1/2 in columns 3-6 relative to the Pauli coordinates"
                .into(),
        }),
    });

    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_space::VectorizationBasis;
    use crate::scheme::{dequantization_matrix, povm_check};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn matrix_units_vectorize_to_identity() {
        for d in [2, 3] {
            let u = dequantization_matrix(&matrix_units_scheme(d).unwrap(), &VectorizationBasis::RowStacking)
                .unwrap();
            assert_eq!(u, Matrix::identity(d * d));
        }
    }

    #[test]
    fn livine_first_dequantizer_expanded() {
        let s = livine_scheme(LivineNormalization::Dequantizer);
        let want = Matrix::new(
            2,
            2,
            vec![c64(0.5, 0.0), c64(0.25, -0.25), c64(0.25, 0.25), ZERO],
        )
        .unwrap();
        assert!(s.dequantizers()[0].max_abs_diff(&want) < 1e-15);
        let q = s.quantizers().unwrap();
        assert!(q[0].max_abs_diff(&want.scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn sic_qubit_first_column() {
        let u = dequantization_matrix(
            &sic_qubit_scheme(SicNormalization::Projector),
            &VectorizationBasis::RowStacking,
        )
        .unwrap();
        let s3 = 3f64.sqrt();
        let k = 1.0 / (2.0 * s3);
        let want = [c64((s3 + 1.0) * k, 0.0), c64(k, -k), c64(k, k), c64((s3 - 1.0) * k, 0.0)];
        for (g, w) in u.column(0).iter().zip(want) {
            assert!((g - w).norm() < 1e-15);
        }
    }

    #[test]
    fn sic_qubit_grams() {
        let proj = sic_qubit_scheme(SicNormalization::Projector);
        assert!(sic_gram_residual(proj.dequantizers(), 2) < 1e-15);
        let povm = sic_qubit_scheme(SicNormalization::Povm);
        let g = gram(povm.dequantizers());
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    assert!((g[(a, b)] - c64(1.0 / 12.0, 0.0)).norm() < 1e-15);
                }
            }
        }
        assert!(povm_check(&povm, &tol()).is_povm);
    }

    #[test]
    fn mub_qubit_columns_and_unbiasedness() {
        let u = dequantization_matrix(&mub_qubit_scheme(), &VectorizationBasis::RowStacking).unwrap();
        assert_eq!(u.column(0), vec![ONE, ZERO, ZERO, ZERO]);
        assert_eq!(u.column(1), vec![ZERO, ZERO, ZERO, ONE]);
        for g in u.column(2) {
            assert!((g - c64(0.5, 0.0)).norm() < 1e-15);
        }
        let vs = qubit_mub_vectors();
        let mut pairs = 0;
        for a in 0..6 {
            for b in 0..6 {
                if a / 2 != b / 2 && a < b {
                    let ov: C64 = vs[a].iter().zip(&vs[b]).map(|(x, y)| x.conj() * y).sum();
                    assert!((ov.norm_sqr() - 0.5).abs() < 1e-15);
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, 12);
    }

    #[test]
    fn clock_and_shift_commutation() {
        // Z X = w X Z
        for d in [2, 3, 5] {
            let (x, z) = (shift(d), clock(d));
            let w = C64::from_polar(1.0, 2.0 * PI / d as f64);
            let lhs = &z * &x;
            let rhs = (&x * &z).scale(w);
            assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn wh_orbit_of_qubit_fiducial_is_the_tetrahedron() {
        let fid = shipped_fiducial(2).unwrap();
        let s = wh_sic_scheme(2, &fid, &tol()).unwrap();
        assert_eq!(s.n(), 4);
        let reference = sic_qubit_scheme(SicNormalization::Projector);
        for p in s.dequantizers() {
            let hits = reference
                .dequantizers()
                .iter()
                .filter(|q| q.max_abs_diff(p) < 1e-12)
                .count();
            assert_eq!(hits, 1);
        }
        assert!(s.dequantizers()[0].max_abs_diff(&reference.dequantizers()[0]) < 1e-12);
    }

    #[test]
    fn wh_rejects_basis_vector_and_bad_input() {
        let e1 = vec![ONE, ZERO];
        assert!(matches!(wh_sic_scheme(2, &e1, &tol()), Err(Error::NotSic { .. })));
        assert!(wh_sic_scheme(2, &[ONE, ONE], &tol()).is_err());
        assert!(wh_sic_scheme(3, &e1, &tol()).is_err());
    }

    #[test]
    fn shipped_qutrit_fiducial_is_sic() {
        let fid = shipped_fiducial(3).unwrap();
        let s = wh_sic_scheme(3, &fid, &tol()).unwrap();
        assert!(sic_gram_residual(s.dequantizers(), 3) < 1e-9);
        assert!(shipped_fiducial(4).is_err());
    }

    #[test]
    fn primes() {
        let ps: Vec<usize> = (0..20).filter(|&p| is_prime(p)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn mub_prime_cases() {
        assert_eq!(mub_prime_scheme(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(mub_prime_scheme(1).unwrap_err(), Error::NotPrime(1));
        let two = mub_prime_scheme(2).unwrap();
        for (a, b) in two.dequantizers().iter().zip(mub_qubit_scheme().dequantizers()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        for p in [3usize, 5] {
            let s = mub_prime_scheme(p).unwrap();
            assert_eq!(s.n(), p * (p + 1));
            let g = gram(s.dequantizers());
            let mut cross = 0;
            for a in 0..s.n() {
                for b in a + 1..s.n() {
                    let v = g[(a, b)].re;
                    if a / p == b / p {
                        assert!(v.abs() < 1e-12);
                    } else {
                        assert!((v - 1.0 / p as f64).abs() < 1e-12);
                        cross += 1;
                    }
                }
            }
            // p+1 bases, pairs of distinct bases times p^2 vector pairs
            assert_eq!(cross, (p + 1) * p / 2 * p * p);
            assert_eq!(s.rank(&tol()), p * p);
        }
    }

    #[test]
    fn random_povm_is_seeded_and_valid() {
        for seed in 0..20 {
            let s = random_minimal_povm_scheme(2, seed).unwrap();
            let diag = povm_check(&s, &tol());
            assert!(diag.sum_residual <= 1e-12, "{}", diag.sum_residual);
            assert!(diag.min_effect_eigenvalue >= -1e-12);
            assert!(s.is_tomographic(&tol()));
            assert_eq!(s, random_minimal_povm_scheme(2, seed).unwrap());
        }
        assert_ne!(
            random_minimal_povm_scheme(2, 1).unwrap(),
            random_minimal_povm_scheme(2, 2).unwrap()
        );
        assert!(random_minimal_povm_scheme(3, 0).unwrap().is_tomographic(&tol()));
    }
}
