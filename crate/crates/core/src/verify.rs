//! The verification battery behind `starquant verify`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    catalog_entries, livine_scheme, mub_qubit_scheme, matrix_units_scheme, pauli_scheme,
    random_minimal_povm_scheme, table_regression_set, LivineNormalization, PauliVariant,
};
use crate::matrix::{hermitian_eig, svd, Matrix, ToleranceConfig};
use crate::operator_space::{devectorize_rect, VectorizationBasis};
use crate::random::{random_operator, random_unitary};
use crate::scheme::{
    canonical_quantizers, completeness_residual, dequantization_matrix, duality_matrix,
    povm_check, self_dual_coefficient, Cardinality, Scheme,
};
use crate::star_product::{
    associativity_residual, cubic_unitary_residual, intertwiner, reconstruct, star_kernel,
    star_multiply, symbol,
};

/// Canonical quantizer eigenvalues closer to zero than this are inconclusive.
pub const NEGATIVITY_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Table,
    Propositions,
    RandomPovm,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Table => "table",
            Suite::Propositions => "propositions",
            Suite::RandomPovm => "random-povm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    /// Passes when `residual <= threshold`.
    pub fn at_most(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual <= threshold,
            residual,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs a suite; `seeds` is the number of random POVMs sampled.
pub fn run(suite: Suite, seeds: u64, tol: &ToleranceConfig) -> VerifyReport {
    let mut report = VerifyReport {
        suite,
        checks: Vec::new(),
        notes: Vec::new(),
    };
    if matches!(suite, Suite::All | Suite::Table) {
        table(&mut report);
    }
    if matches!(suite, Suite::All | Suite::Propositions) {
        propositions(&mut report, tol);
    }
    if matches!(suite, Suite::All | Suite::RandomPovm) {
        random_povm(&mut report, seeds, tol);
    }
    if suite == Suite::All {
        catalog_consistency(&mut report, tol);
        intertwining(&mut report, tol);
        cubic_identity(&mut report, tol);
        mub_frame(&mut report, tol);
    }
    report
}

fn table(report: &mut VerifyReport) {
    for row in table_regression_set() {
        let name = format!("table/row{}", row.row);
        match row.generate() {
            Ok((rs, pauli)) => {
                report.checks.push(Check::at_most(
                    format!("{name}/row-stacking"),
                    rs.max_abs_diff(&row.expected_row_stacking),
                    1e-12,
                ));
                report.checks.push(Check::at_most(
                    format!("{name}/pauli"),
                    pauli.max_abs_diff(&row.expected_pauli),
                    1e-12,
                ));
            }
            Err(e) => report.checks.push(failed(&name, &e)),
        }
        if let Some(erratum) = &row.erratum {
            let (drs, dp) = row.printed_deviation();
            report.notes.push(format!(
                "row {} erratum: {} (printed vs derived: row-stacking {drs:.3e}, Pauli {dp:.3e})",
                erratum.row, erratum.description
            ));
        }
    }
}

fn failed(name: &str, e: &crate::error::Error) -> Check {
    Check {
        name: format!("{name}: {e}"),
        passed: false,
        residual: f64::INFINITY,
        threshold: 0.0,
    }
}

/// Scheme whose dequantization matrix is `sqrt(c) W` for a unitary `W`.
pub fn scaled_unitary_scheme(w: &Matrix, c: f64) -> Scheme {
    let d = (w.rows() as f64).sqrt().round() as usize;
    let ops = (0..w.cols())
        .map(|k| {
            let col: Vec<_> = w.column(k).iter().map(|z| z * c.sqrt()).collect();
            devectorize_rect(&col, d, d).expect("d^2 components")
        })
        .collect();
    Scheme::new(d, ops).expect("square operators")
}

fn propositions(report: &mut VerifyReport, tol: &ToleranceConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for d in [2usize, 3] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let w = random_unitary(d * d, &mut rng);
            let c = 10f64.powf(rng.random_range(-1.0..=1.0));
            let s = scaled_unitary_scheme(&w, c);
            let rel = canonical_quantizers(&s, tol)
                .and_then(|q| s.clone().with_quantizers(q))
                .and_then(|sq| self_dual_coefficient(&sq, tol))
                .ok()
                .flatten()
                .map_or(f64::INFINITY, |got| (got - c).abs() / c);
            worst = worst.max(rel);
        }
        report.checks.push(Check::at_most(
            format!("self-duality/scaled-unitary-is-self-dual/d{d}"),
            worst,
            1e-9,
        ));
    }

    let mut worst = 0.0f64;
    let mut self_dual = 0;
    let mut povm_among_minimal_self_dual = 0;
    for entry in catalog_entries() {
        let s = &entry.scheme;
        let Ok(q) = s.quantizers_or_canonical(tol) else {
            continue;
        };
        let sq = s.clone().with_quantizers(q).expect("same count");
        let Ok(Some(c)) = self_dual_coefficient(&sq, tol) else {
            continue;
        };
        self_dual += 1;
        let u = dequantization_matrix(s, &VectorizationBasis::RowStacking).expect("row stacking");
        let gram = &u.adjoint() * &u;
        let r = if u.is_square() {
            gram.max_abs_diff(&Matrix::identity(u.cols()).scale_real(c)) / c
        } else {
            f64::INFINITY
        };
        worst = worst.max(r);
        if u.is_square() && povm_check(s, tol).is_povm {
            povm_among_minimal_self_dual += 1;
        }
    }
    report.checks.push(Check::at_most(
        "self-duality/self-dual-is-scaled-unitary",
        worst,
        1e-9,
    ));
    report.notes.push(format!("{self_dual} self-dual catalog schemes"));
    report.checks.push(Check::at_most(
        "self-duality/no-minimal-self-dual-povm-in-catalog",
        povm_among_minimal_self_dual as f64,
        0.0,
    ));

    let livine = livine_scheme(LivineNormalization::Dequantizer);
    let c = self_dual_coefficient(&livine, tol).ok().flatten();
    report.checks.push(Check::at_most(
        "livine/self-dual-coefficient",
        c.map_or(f64::INFINITY, |c| (c - 0.5).abs()),
        1e-12,
    ));
    let diag = povm_check(&livine, tol);
    report.checks.push(Check::at_most("livine/sum-is-identity", diag.sum_residual, 1e-12));
    report.checks.push(Check {
        name: "livine/positivity-fails".into(),
        passed: diag.min_effect_eigenvalue < -tol.eig_tol && !diag.is_povm,
        residual: diag.min_effect_eigenvalue,
        threshold: -tol.eig_tol,
    });
    let expect = [(1.0 - 3f64.sqrt()) / 4.0, (1.0 + 3f64.sqrt()) / 4.0];
    let eig = hermitian_eig(&livine.dequantizers()[0], tol).expect("Hermitian");
    let r = eig
        .values
        .iter()
        .zip(expect)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most("livine/first-dequantizer-spectrum", r, 1e-12));
}

/// Minimum canonical quantizer eigenvalue for each seed of the random
/// minimal qubit POVM sampler.
pub fn random_povm_min_eigenvalues(seeds: u64, tol: &ToleranceConfig) -> Vec<crate::error::Result<f64>> {
    (0..seeds)
        .map(|seed| {
            let s = random_minimal_povm_scheme(2, seed)?;
            let q = canonical_quantizers(&s, tol)?;
            let mut m = f64::INFINITY;
            for dq in &q {
                m = m.min(hermitian_eig(&dq.hermitian_part()?, tol)?.values[0]);
            }
            Ok(m)
        })
        .collect()
}

fn random_povm(report: &mut VerifyReport, seeds: u64, tol: &ToleranceConfig) {
    let results = random_povm_min_eigenvalues(seeds, tol);
    let errors = results.iter().filter(|r| r.is_err()).count();
    let mins: Vec<f64> = results.into_iter().filter_map(|r| r.ok()).collect();
    let counterexamples = mins.iter().filter(|&&m| m >= 0.0).count();
    let conclusive = mins.iter().filter(|&&m| m < -NEGATIVITY_GUARD).count();
    let inconclusive_fraction = if seeds == 0 {
        0.0
    } else {
        1.0 - conclusive as f64 / seeds as f64
    };
    report.checks.push(Check::at_most("random-povm/sampler-errors", errors as f64, 0.0));
    report.checks.push(Check::at_most(
        "random-povm/counterexamples",
        counterexamples as f64,
        0.0,
    ));
    report.checks.push(Check::at_most(
        "random-povm/inconclusive-fraction",
        inconclusive_fraction,
        0.01,
    ));
    let worst = mins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.notes.push(format!(
        "{} of {seeds} random minimal POVMs conclusive; largest minimum quantizer eigenvalue {worst:.6}",
        conclusive
    ));
}

fn catalog_consistency(report: &mut VerifyReport, tol: &ToleranceConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for entry in catalog_entries() {
        let s = &entry.scheme;
        let name = format!("catalog/{}", entry.name);
        let Ok(q) = s.quantizers_or_canonical(tol) else {
            continue;
        };
        let sq = s.clone().with_quantizers(q).expect("same count");
        let d = s.d();
        match completeness_residual(&sq, &VectorizationBasis::RowStacking) {
            Ok(r) => report.checks.push(Check::at_most(format!("{name}/completeness"), r, 1e-10)),
            Err(e) => report.checks.push(failed(&name, &e)),
        }
        let mut round_trip = 0.0f64;
        let mut homomorphism = 0.0f64;
        let kernel = star_kernel(&sq);
        for _ in 0..20 {
            let a = random_operator(d, d, &mut rng);
            let b = random_operator(d, d, &mut rng);
            let r = symbol(&sq, &a)
                .and_then(|f| reconstruct(&sq, &f))
                .map_or(f64::INFINITY, |back| back.max_abs_diff(&a));
            round_trip = round_trip.max(r);
            if let Ok(k) = &kernel {
                let h = (|| {
                    let fa = symbol(&sq, &a)?;
                    let fb = symbol(&sq, &b)?;
                    let prod = star_multiply(k, &fa, &fb)?;
                    Ok::<_, crate::error::Error>(prod.max_abs_diff(&symbol(&sq, &(&a * &b))?))
                })()
                .unwrap_or(f64::INFINITY);
                homomorphism = homomorphism.max(h);
            }
        }
        report.checks.push(Check::at_most(format!("{name}/round-trip"), round_trip, 1e-10));
        report.checks.push(Check::at_most(format!("{name}/homomorphism"), homomorphism, 1e-9));
        if let Ok(k) = &kernel {
            report.checks.push(Check::at_most(
                format!("{name}/associativity"),
                associativity_residual(k),
                1e-10,
            ));
        }
    }
}

fn intertwining(report: &mut VerifyReport, tol: &ToleranceConfig) {
    let mu = matrix_units_scheme(2).expect("d = 2");
    let pauli = pauli_scheme(PauliVariant::Hermitian);
    let mub = mub_qubit_scheme();
    match intertwiner(&mu, &pauli, tol) {
        Ok(k) => {
            let id = Matrix::identity(4);
            let r = (&k.backward * &k.forward)
                .max_abs_diff(&id)
                .max((&k.forward * &k.backward).max_abs_diff(&id));
            report.checks.push(Check::at_most("intertwine/matrix-units-pauli", r, 1e-12));
        }
        Err(e) => report.checks.push(failed("intertwine/matrix-units-pauli", &e)),
    }
    match intertwiner(&pauli, &mub, tol) {
        Ok(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let a = random_operator(2, 2, &mut rng);
                let r = symbol(&pauli, &a)
                    .and_then(|f| {
                        let g = k.to_target(&f, &mub.tag())?;
                        Ok(k.to_source(&g, &pauli.tag())?.max_abs_diff(&f))
                    })
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(r);
            }
            report.checks.push(Check::at_most("intertwine/pauli-mub-pauli", worst, 1e-10));
        }
        Err(e) => report.checks.push(failed("intertwine/pauli-mub-pauli", &e)),
    }
}

fn cubic_identity(report: &mut VerifyReport, tol: &ToleranceConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for n in [4usize, 9] {
        let worst = (0..100)
            .map(|_| cubic_unitary_residual(&random_unitary(n, &mut rng), tol).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(format!("cubic-identity/n{n}"), worst, 1e-12));
    }
}

fn mub_frame(report: &mut VerifyReport, tol: &ToleranceConfig) {
    let s = mub_qubit_scheme();
    let u = dequantization_matrix(&s, &VectorizationBasis::RowStacking).expect("row stacking");
    let sv = svd(&u);
    let expect = [3f64.sqrt(), 1.0, 1.0, 1.0];
    let r = sv.iter().zip(expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.checks.push(Check::at_most("mub-qubit/singular-values", r, 1e-10));
    let report_c = crate::scheme::classify(&s, tol);
    report.checks.push(Check::at_most(
        "mub-qubit/condition-number",
        (report_c.condition_number - 3f64.sqrt()).abs(),
        1e-10,
    ));
    report.checks.push(Check {
        name: "mub-qubit/overfilled".into(),
        passed: report_c.cardinality == Cardinality::Overfilled,
        residual: 0.0,
        threshold: 0.0,
    });
    let delta = canonical_quantizers(&s, tol)
        .and_then(|q| s.clone().with_quantizers(q))
        .and_then(|sq| duality_matrix(&sq));
    match delta {
        Ok(delta) => {
            let herm = delta.hermiticity_residual();
            let idem = (&delta * &delta).max_abs_diff(&delta);
            let tr = (delta.trace().expect("square").re - 4.0).abs();
            report.checks.push(Check::at_most("mub-qubit/duality-hermitian", herm, 1e-10));
            report.checks.push(Check::at_most("mub-qubit/duality-idempotent", idem, 1e-10));
            report.checks.push(Check::at_most("mub-qubit/duality-trace", tr, 1e-10));
        }
        Err(e) => report.checks.push(failed("mub-qubit/duality", &e)),
    }
}
