//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 when a
//! check or precondition fails, 2 for unusable input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{
    livine_scheme, matrix_units_scheme, mub_prime_scheme, mub_qubit_scheme, pauli_scheme,
    random_minimal_povm_scheme, shipped_fiducial, sic_qubit_scheme, wh_sic_scheme,
    LivineNormalization, PauliVariant, SicNormalization,
};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, ToleranceConfig};
use crate::operator_space::{OperatorBasis, VectorizationBasis};
use crate::scheme::{
    canonical_quantizers, classify_in, completeness_residual, gauge_quantizers, Scheme,
    SchemeReport,
};
use crate::star_product::{associativity_residual, intertwiner, reconstruct, star_kernel, symbol};
use crate::verify::{self, Check, Suite};

use files::{
    BasisFile, CheckJson, KernelFile, OperatorFile, ReportFile, ReportJson, SchemeFile,
    ToleranceJson, VectorFile,
};

/// JSON layouts read and written by the CLI. Complex numbers are `[re, im]`
/// pairs and matrices row-major nested arrays.
pub mod files {
    use serde::{Deserialize, Serialize};

    use crate::error::{Error, Result};
    use crate::matrix::{c64, Matrix, ToleranceConfig, C64};
    use crate::scheme::{Cardinality, QuantizerSource, Scheme, SchemeReport};
    use crate::star_product::StarKernel;

    pub type Pair = [f64; 2];
    pub type MatrixJson = Vec<Vec<Pair>>;

    pub fn pair(z: C64) -> Pair {
        [z.re, z.im]
    }

    pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(|&z| pair(z)).collect())
            .collect()
    }

    pub fn matrix_from_json(m: &MatrixJson) -> Result<Matrix> {
        let rows: Vec<Vec<C64>> = m
            .iter()
            .map(|r| r.iter().map(|p| c64(p[0], p[1])).collect())
            .collect();
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Error::Parse("matrix rows must be non-empty and of equal length".into()));
        }
        Matrix::from_rows(&rows)
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct SchemeFile {
        pub d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub name: Option<String>,
        pub dequantizers: Vec<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub quantizers: Option<Vec<MatrixJson>>,
    }

    impl SchemeFile {
        pub fn from_scheme(s: &Scheme) -> Self {
            Self {
                d: s.d(),
                name: s.name().map(str::to_owned),
                dequantizers: s.dequantizers().iter().map(matrix_to_json).collect(),
                quantizers: s
                    .quantizers()
                    .map(|q| q.iter().map(matrix_to_json).collect()),
            }
        }

        pub fn to_scheme(&self) -> Result<Scheme> {
            let parse = |ops: &[MatrixJson]| ops.iter().map(matrix_from_json).collect::<Result<Vec<_>>>();
            let mut s = Scheme::new(self.d, parse(&self.dequantizers)?)?;
            if let Some(name) = &self.name {
                s = s.named(name.clone());
            }
            match &self.quantizers {
                Some(q) => s.with_quantizers(parse(q)?),
                None => Ok(s),
            }
        }
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct OperatorFile {
        pub matrix: MatrixJson,
    }

    impl OperatorFile {
        pub fn new(m: &Matrix) -> Self {
            Self {
                matrix: matrix_to_json(m),
            }
        }

        pub fn to_matrix(&self) -> Result<Matrix> {
            matrix_from_json(&self.matrix)
        }
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct VectorFile {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub name: Option<String>,
        pub values: Vec<Pair>,
    }

    impl VectorFile {
        pub fn new(name: Option<String>, values: &[C64]) -> Self {
            Self {
                name,
                values: values.iter().map(|&z| pair(z)).collect(),
            }
        }

        pub fn to_complex(&self) -> Vec<C64> {
            self.values.iter().map(|p| c64(p[0], p[1])).collect()
        }
    }

    /// `values[k][k'][k'']` of a star kernel.
    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct KernelFile {
        pub d: usize,
        pub n: usize,
        pub values: Vec<Vec<Vec<Pair>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub associativity_residual: Option<f64>,
    }

    impl KernelFile {
        pub fn new(k: &StarKernel, associativity_residual: Option<f64>) -> Self {
            let n = k.n();
            Self {
                d: k.d(),
                n,
                values: (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| (0..n).map(|c| pair(k.get(a, b, c))).collect())
                            .collect()
                    })
                    .collect(),
                associativity_residual,
            }
        }

        pub fn to_kernel(&self) -> Result<StarKernel> {
            let flat: Vec<C64> = self
                .values
                .iter()
                .flatten()
                .flatten()
                .map(|p| c64(p[0], p[1]))
                .collect();
            let shaped = self.values.len() == self.n
                && self
                    .values
                    .iter()
                    .all(|m| m.len() == self.n && m.iter().all(|r| r.len() == self.n));
            if !shaped {
                return Err(Error::Parse(format!("kernel values are not {0}x{0}x{0}", self.n)));
            }
            StarKernel::from_values(self.d, self.n, flat)
        }
    }

    /// User-supplied orthonormal operator basis.
    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct BasisFile {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub name: Option<String>,
        pub operators: Vec<MatrixJson>,
    }

    #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
    pub struct ToleranceJson {
        pub rank_tol: f64,
        pub residual_tol: f64,
        pub eig_tol: f64,
    }

    impl From<&ToleranceConfig> for ToleranceJson {
        fn from(t: &ToleranceConfig) -> Self {
            Self {
                rank_tol: t.rank_tol,
                residual_tol: t.residual_tol,
                eig_tol: t.eig_tol,
            }
        }
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct CheckJson {
        pub name: String,
        pub passed: bool,
        /// `null` when not finite.
        pub residual: Option<f64>,
        pub threshold: f64,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct PovmJson {
        pub sum_residual: f64,
        pub hermiticity_residual: f64,
        pub min_effect_eigenvalue: f64,
        pub is_povm: bool,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct NegativityJson {
        pub min_dequantizer_eigenvalue: Option<f64>,
        pub min_quantizer_eigenvalue: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub error: Option<String>,
    }

    /// Machine-readable [`SchemeReport`].
    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct ReportJson {
        pub summary: String,
        pub d: usize,
        pub n: usize,
        pub basis: String,
        pub cardinality: String,
        pub tomographic: bool,
        pub rank: usize,
        pub singular_values: Vec<f64>,
        /// `null` when not tomographic.
        pub condition_number: Option<f64>,
        pub quantizer_source: String,
        pub completeness_residual: Option<f64>,
        pub self_dual_coefficient: Option<f64>,
        pub scaled_unitary: Option<f64>,
        pub povm: PovmJson,
        pub negativity: NegativityJson,
        pub matrix_unit_like: Option<MatrixJson>,
    }

    impl From<&SchemeReport> for ReportJson {
        fn from(r: &SchemeReport) -> Self {
            let negativity = match &r.negativity {
                Ok(n) => NegativityJson {
                    min_dequantizer_eigenvalue: Some(n.min_dequantizer_eigenvalue),
                    min_quantizer_eigenvalue: n.min_quantizer_eigenvalue,
                    error: None,
                },
                Err(e) => NegativityJson {
                    min_dequantizer_eigenvalue: None,
                    min_quantizer_eigenvalue: None,
                    error: Some(e.to_string()),
                },
            };
            Self {
                summary: r.summary(),
                d: r.d,
                n: r.n,
                basis: r.basis.clone(),
                cardinality: r.cardinality.to_string(),
                tomographic: r.tomographic,
                rank: r.rank,
                singular_values: r.singular_values.clone(),
                condition_number: r.condition_number.is_finite().then_some(r.condition_number),
                quantizer_source: match r.quantizer_source {
                    QuantizerSource::Attached => "attached",
                    QuantizerSource::Canonical => "canonical",
                    QuantizerSource::Undefined => "undefined",
                }
                .into(),
                completeness_residual: r.completeness_residual,
                self_dual_coefficient: r.self_dual_coefficient,
                scaled_unitary: r.scaled_unitary,
                povm: PovmJson {
                    sum_residual: r.povm.sum_residual,
                    hermiticity_residual: r.povm.hermiticity_residual,
                    min_effect_eigenvalue: r.povm.min_effect_eigenvalue,
                    is_povm: r.povm.is_povm,
                },
                negativity,
                matrix_unit_like: r.matrix_unit_like.as_ref().map(matrix_to_json),
            }
        }
    }

    impl ReportJson {
        pub fn cardinality(&self) -> Option<Cardinality> {
            match self.cardinality.as_str() {
                "underfilled" => Some(Cardinality::Underfilled),
                "minimal" => Some(Cardinality::Minimal),
                "overfilled" => Some(Cardinality::Overfilled),
                _ => None,
            }
        }
    }

    /// Report written by `--report`: the command's results plus every check
    /// with its residual.
    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct ReportFile {
        pub tool_version: String,
        pub command: String,
        pub tolerances: ToleranceJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub report: Option<ReportJson>,
        #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
        pub details: serde_json::Value,
        #[serde(default)]
        pub notes: Vec<String>,
        #[serde(default)]
        pub checks: Vec<CheckJson>,
    }
}

#[derive(Debug, Parser)]
#[command(name = "starquant", version, about = "Star-product quantization schemes on finite-dimensional Hilbert spaces")]
pub struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rank_tol: f64,
    /// Absolute tolerance for identity and consistency residuals.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub residual_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Rowstacking,
    Pauli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Table,
    Propositions,
    RandomPovm,
}

#[derive(Debug, clap::Args)]
pub struct BasisOpts {
    /// Vectorization basis for operator coordinates.
    #[arg(long, value_enum, default_value = "rowstacking", conflicts_with = "basis_file")]
    pub basis: BasisArg,
    /// JSON file with an orthonormal operator basis (`{"operators": [...]}`).
    #[arg(long)]
    pub basis_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in scheme to a scheme file.
    Emit {
        /// matrix-units, pauli, livine, sic-qubit, mub-qubit, mub-prime, wh-sic, random-povm
        name: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// pauli: hermitian | with-i-sigma-y
        #[arg(long)]
        variant: Option<String>,
        /// livine: dequantizer | self-dual-normalized; sic-qubit: projector | povm
        #[arg(long)]
        normalization: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Classify a scheme by its dequantization matrix.
    Classify {
        scheme: PathBuf,
        #[command(flatten)]
        basis: BasisOpts,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Attach canonical (or gauge-shifted) quantizers.
    Quantize {
        scheme: PathBuf,
        /// `d^2 x N` gauge matrix in row-stacking coordinates (`{"matrix": ...}`).
        #[arg(long)]
        gauge: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Symbol `f_A(k) = Tr[U_k^dagger A]` of an operator.
    Symbol {
        scheme: PathBuf,
        operator: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Operator `sum_k f(k) D_k` from a symbol.
    Reconstruct {
        scheme: PathBuf,
        symbol: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Star-product kernel tensor.
    Kernel {
        scheme: PathBuf,
        /// Also compute the exhaustive associativity residual.
        #[arg(long)]
        assoc_check: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Intertwining kernels between two schemes.
    Intertwine {
        scheme_a: PathBuf,
        scheme_b: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the verification battery.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Number of random minimal POVMs sampled.
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Exit code for an error: 2 for input errors, 1 for failed preconditions.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::DimensionMismatch(_)
        | Error::LengthMismatch { .. }
        | Error::UnknownScheme(_)
        | Error::InvalidInput(_)
        | Error::InvalidTolerance(_)
        | Error::NotSquare { .. }
        | Error::NotSquareLength(_)
        | Error::WrongCount { .. }
        | Error::IndexOutOfRange { .. }
        | Error::NotOrthonormal { .. }
        | Error::NotPrime(_)
        | Error::NotSic { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let tol = ToleranceConfig::new(cli.rank_tol, cli.residual_tol, ToleranceConfig::default().eig_tol)?;
    match &cli.command {
        Command::Emit {
            name,
            d,
            p,
            seed,
            variant,
            normalization,
            output,
        } => {
            let params = EmitParams {
                d: *d,
                p: *p,
                seed: *seed,
                variant: variant.clone(),
                normalization: normalization.clone(),
            };
            let s = builtin(name, &params, &tol)?;
            emit_json(out, output.as_deref(), &SchemeFile::from_scheme(&s))?;
            if output.is_some() {
                writeln!(out, "wrote {} (d = {}, N = {})", s.tag(), s.d(), s.n())?;
            }
            Ok(0)
        }
        Command::Classify {
            scheme,
            basis,
            report,
        } => {
            let s = load_scheme(scheme)?;
            let basis = basis_from(basis, &tol)?;
            let r = classify_in(&s, &basis, &tol)?;
            write!(out, "{}", render_report(&s, &r))?;
            if let Some(path) = report {
                let mut file = report_file("classify", &tol);
                file.report = Some(ReportJson::from(&r));
                write_json(path, &file)?;
            }
            Ok(0)
        }
        Command::Quantize {
            scheme,
            gauge,
            output,
            report,
        } => cmd_quantize(scheme, gauge.as_deref(), output.as_deref(), report.as_deref(), &tol, out),
        Command::Symbol {
            scheme,
            operator,
            output,
        } => {
            let s = load_scheme(scheme)?;
            let a: OperatorFile = read_json(operator)?;
            let f = symbol(&s, &a.to_matrix()?)?;
            emit_json(out, output.as_deref(), &VectorFile::new(Some(f.scheme_tag.clone()), &f.values))?;
            Ok(0)
        }
        Command::Reconstruct {
            scheme,
            symbol: sym,
            output,
        } => {
            let s = load_scheme(scheme)?;
            let f: VectorFile = read_json(sym)?;
            let f = crate::star_product::SymbolVector::new(f.to_complex(), s.tag());
            let a = reconstruct(&s, &f)?;
            emit_json(out, output.as_deref(), &OperatorFile::new(&a))?;
            Ok(0)
        }
        Command::Kernel {
            scheme,
            assoc_check,
            output,
            report,
        } => {
            let s = load_scheme(scheme)?;
            let required = s.d() * s.d();
            let rank = s.rank(&tol);
            if rank < required {
                return Err(Error::NotTomographic { rank, required });
            }
            let sq = with_quantizers(s, &tol)?;
            let k = star_kernel(&sq)?;
            let residual = assoc_check.then(|| associativity_residual(&k));
            emit_json(out, output.as_deref(), &KernelFile::new(&k, residual))?;
            let mut checks = Vec::new();
            if let Some(r) = residual {
                writeln!(out, "associativity residual: {r:.3e}")?;
                checks.push(Check::at_most("associativity", r, tol.residual_tol));
            }
            finish(out, report.as_deref(), "kernel", &tol, None, serde_json::Value::Null, vec![], &checks)
        }
        Command::Intertwine {
            scheme_a,
            scheme_b,
            operator,
            report,
        } => cmd_intertwine(scheme_a, scheme_b, operator, report.as_deref(), &tol, out),
        Command::Verify {
            suite,
            seeds,
            report,
        } => {
            let suite = match suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Table => Suite::Table,
                SuiteArg::Propositions => Suite::Propositions,
                SuiteArg::RandomPovm => Suite::RandomPovm,
            };
            let r = verify::run(suite, *seeds, &tol);
            for c in &r.checks {
                writeln!(
                    out,
                    "{} {} (residual {:.3e}, threshold {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.threshold
                )?;
            }
            for n in &r.notes {
                writeln!(out, "note: {n}")?;
            }
            let failed = r.failures().count();
            writeln!(out, "{} checks, {failed} failed", r.checks.len())?;
            let details = serde_json::json!({ "suite": suite.to_string(), "seeds": seeds });
            finish(out, report.as_deref(), "verify", &tol, None, details, r.notes.clone(), &r.checks)
        }
    }
}

/// Parameters accepted by `emit`.
#[derive(Debug, Clone, Default)]
pub struct EmitParams {
    pub d: Option<usize>,
    pub p: Option<usize>,
    pub seed: Option<u64>,
    pub variant: Option<String>,
    pub normalization: Option<String>,
}

pub const BUILTIN_NAMES: [&str; 8] = [
    "matrix-units",
    "pauli",
    "livine",
    "sic-qubit",
    "mub-qubit",
    "mub-prime",
    "wh-sic",
    "random-povm",
];

/// Built-in scheme registry.
pub fn builtin(name: &str, p: &EmitParams, tol: &ToleranceConfig) -> Result<Scheme> {
    let choice = |value: &Option<String>, default: &str, allowed: &[&str]| -> Result<String> {
        let v = value.clone().unwrap_or_else(|| default.to_owned());
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::InvalidInput(format!(
                "{name}: '{v}' is not one of {}",
                allowed.join(", ")
            )))
        }
    };
    match name {
        "matrix-units" => matrix_units_scheme(p.d.unwrap_or(2)),
        "pauli" => {
            let v = choice(&p.variant, "hermitian", &["hermitian", "with-i-sigma-y"])?;
            Ok(pauli_scheme(if v == "hermitian" {
                PauliVariant::Hermitian
            } else {
                PauliVariant::WithISigmaY
            }))
        }
        "livine" => {
            let v = choice(&p.normalization, "dequantizer", &["dequantizer", "self-dual-normalized"])?;
            Ok(livine_scheme(if v == "dequantizer" {
                LivineNormalization::Dequantizer
            } else {
                LivineNormalization::SelfDualNormalized
            }))
        }
        "sic-qubit" => {
            let v = choice(&p.normalization, "povm", &["povm", "projector"])?;
            Ok(sic_qubit_scheme(if v == "povm" {
                SicNormalization::Povm
            } else {
                SicNormalization::Projector
            }))
        }
        "mub-qubit" => Ok(mub_qubit_scheme()),
        "mub-prime" => mub_prime_scheme(p.p.unwrap_or(3)),
        "wh-sic" => {
            let d = p.d.unwrap_or(3);
            wh_sic_scheme(d, &shipped_fiducial(d)?, tol)
        }
        "random-povm" => random_minimal_povm_scheme(p.d.unwrap_or(2), p.seed.unwrap_or(0)),
        other => Err(Error::UnknownScheme(format!(
            "{other} (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

fn cmd_quantize(
    scheme: &Path,
    gauge: Option<&Path>,
    output: Option<&Path>,
    report: Option<&Path>,
    tol: &ToleranceConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let s = load_scheme(scheme)?.without_quantizers();
    let canonical = canonical_quantizers(&s, tol)?;
    let mut sq = s.clone().with_quantizers(canonical)?;
    if let Some(path) = gauge {
        let g: OperatorFile = read_json(path)?;
        let q = gauge_quantizers(&sq, &g.to_matrix()?, tol)?;
        sq = s.with_quantizers(q)?;
    }
    let residual = completeness_residual(&sq, &VectorizationBasis::RowStacking)?;
    emit_json(out, output, &SchemeFile::from_scheme(&sq))?;
    if output.is_some() || report.is_some() {
        writeln!(out, "completeness residual: {residual:.3e}")?;
    }
    let checks = [Check::at_most("completeness", residual, tol.residual_tol)];
    finish(out, report, "quantize", tol, None, serde_json::Value::Null, vec![], &checks)
}

fn cmd_intertwine(
    a: &Path,
    b: &Path,
    operator: &Path,
    report: Option<&Path>,
    tol: &ToleranceConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let sa = load_scheme(a)?;
    let sb = load_scheme(b)?;
    let op: OperatorFile = read_json(operator)?;
    let op = op.to_matrix()?;
    let k = intertwiner(&sa, &sb, tol)?;
    let fa = symbol(&sa, &op)?;
    let fb = symbol(&sb, &op)?;
    let mapped = k.to_target(&fa, &sb.tag())?;
    let back = k.to_source(&mapped, &sa.tag())?;
    let forward_residual = mapped.max_abs_diff(&fb);
    let round_trip = back.max_abs_diff(&fa);
    writeln!(out, "forward kernel ({} -> {}):", sa.tag(), sb.tag())?;
    write_matrix(out, &k.forward)?;
    writeln!(out, "backward kernel ({} -> {}):", sb.tag(), sa.tag())?;
    write_matrix(out, &k.backward)?;
    writeln!(out, "forward residual: {forward_residual:.3e}")?;
    writeln!(out, "round-trip residual: {round_trip:.3e}")?;
    let scale = fa.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let checks = [
        Check::at_most("forward", forward_residual, tol.residual_tol * scale),
        Check::at_most("round-trip", round_trip, tol.residual_tol * scale),
    ];
    let details = serde_json::json!({
        "forward": files::matrix_to_json(&k.forward),
        "backward": files::matrix_to_json(&k.backward),
    });
    finish(out, report, "intertwine", tol, None, details, vec![], &checks)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    out: &mut dyn Write,
    report: Option<&Path>,
    command: &str,
    tol: &ToleranceConfig,
    scheme_report: Option<ReportJson>,
    details: serde_json::Value,
    notes: Vec<String>,
    checks: &[Check],
) -> Result<i32> {
    for c in checks.iter().filter(|c| !c.passed) {
        writeln!(
            out,
            "FAIL {}: residual {:.3e} exceeds {:.1e}",
            c.name, c.residual, c.threshold
        )?;
    }
    if let Some(path) = report {
        let mut file = report_file(command, tol);
        file.report = scheme_report;
        file.details = details;
        file.notes = notes;
        file.checks = checks.iter().map(check_json).collect();
        write_json(path, &file)?;
    }
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
}

fn check_json(c: &Check) -> CheckJson {
    CheckJson {
        name: c.name.clone(),
        passed: c.passed,
        residual: c.residual.is_finite().then_some(c.residual),
        threshold: c.threshold,
    }
}

fn report_file(command: &str, tol: &ToleranceConfig) -> ReportFile {
    ReportFile {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        command: command.to_owned(),
        tolerances: ToleranceJson::from(tol),
        report: None,
        details: serde_json::Value::Null,
        notes: Vec::new(),
        checks: Vec::new(),
    }
}

fn with_quantizers(s: Scheme, tol: &ToleranceConfig) -> Result<Scheme> {
    if s.quantizers().is_some() {
        return Ok(s);
    }
    let q = canonical_quantizers(&s, tol)?;
    s.with_quantizers(q)
}

fn basis_from(opts: &BasisOpts, tol: &ToleranceConfig) -> Result<VectorizationBasis> {
    if let Some(path) = &opts.basis_file {
        let file: BasisFile = read_json(path)?;
        let ops = file
            .operators
            .iter()
            .map(files::matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let tag = file.name.unwrap_or_else(|| "basis-file".into());
        return Ok(VectorizationBasis::Orthonormal(Arc::new(OperatorBasis::new(tag, ops, tol)?)));
    }
    Ok(match opts.basis {
        BasisArg::Rowstacking => VectorizationBasis::RowStacking,
        BasisArg::Pauli => VectorizationBasis::pauli(),
    })
}

pub fn load_scheme(path: &Path) -> Result<Scheme> {
    read_json::<SchemeFile>(path)?.to_scheme()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => Ok(writeln!(out, "{}", serde_json::to_string(value)?)?),
    }
}

fn write_matrix(out: &mut dyn Write, m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:>9.5}{:+.5}i", z.re, z.im))
            .collect();
        writeln!(out, "  {}", row.join("  "))?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v}"))
}

/// Human-readable classification. Every number printed here is also a field
/// of [`ReportJson`].
pub fn render_report(s: &Scheme, r: &SchemeReport) -> String {
    let mut t = String::new();
    let mut line = |l: String| {
        t.push_str(&l);
        t.push('\n');
    };
    line(format!(
        "scheme: {} (d = {}, N = {}, basis {})",
        s.tag(),
        r.d,
        r.n,
        r.basis
    ));
    line(r.summary());
    line(format!("cardinality: {}", r.cardinality));
    line(format!("tomographic: {}", r.tomographic));
    line(format!("rank: {} (required {})", r.rank, r.d * r.d));
    let sv: Vec<String> = r.singular_values.iter().map(|v| format!("{v}")).collect();
    line(format!("singular values: {}", sv.join(", ")));
    line(format!(
        "condition number: {}",
        opt(r.condition_number.is_finite().then_some(r.condition_number))
    ));
    line(format!("quantizers: {:?}", r.quantizer_source).to_lowercase());
    line(format!("completeness residual: {}", opt(r.completeness_residual)));
    line(format!("self-dual coefficient: {}", opt(r.self_dual_coefficient)));
    line(format!("scaled unitary: {}", opt(r.scaled_unitary)));
    line(format!(
        "POVM: {} (sum residual {}, hermiticity residual {}, min effect eigenvalue {})",
        r.povm.is_povm, r.povm.sum_residual, r.povm.hermiticity_residual, r.povm.min_effect_eigenvalue
    ));
    match &r.negativity {
        Ok(n) => line(format!(
            "negativity: min dequantizer eigenvalue {}, min quantizer eigenvalue {}",
            n.min_dequantizer_eigenvalue,
            opt(n.min_quantizer_eigenvalue)
        )),
        Err(e) => line(format!("negativity: {e}")),
    }
    line(format!("matrix-unit-like: {}", r.matrix_unit_like.is_some()));
    t
}
