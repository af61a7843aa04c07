//! Command-line front end. Exit codes: 0 pass, 1 usage or I/O, 2 verdict
//! mismatch, 3 numerical indeterminacy.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::families::{
    classify_family, default_grid, family_distance, fixed_point_family, sort_grid, verify_representation, FixedPoint,
    OperatorFamily, Representation,
};
use crate::linalg::{c64, CMatrix, MatrixJson, Tolerance};
use crate::models::{model_check, HalfLineModel, ModelKind, QuadratureSpec};
use crate::relation::{LinearRelation, SpaceSplit};
use crate::sample::Sampler;
use crate::systems::{default_moment_len, ho_kalman_realize, MomentSequence, PassiveSystem};
use crate::transforms::{cayley, contraction_transform, j_transform, neg_j_k, p_transform, Side};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "relkit",
    version,
    about = "Linear relations, Stieltjes families and passive systems"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `default` or a JSON file holding `[[re, im], …]`.
    #[arg(long, global = true, default_value = "default")]
    pub grid: String,
    /// Pass threshold; defaults to 1e-8 (1e-7 for model-check).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExpectClass {
    Nevanlinna,
    Stieltjes,
    InverseStieltjes,
    RsClass,
    Inner,
}

impl ExpectClass {
    fn key(&self) -> &'static str {
        match self {
            ExpectClass::Nevanlinna => "nevanlinna",
            ExpectClass::Stieltjes => "stieltjes",
            ExpectClass::InverseStieltjes => "inverse_stieltjes",
            ExpectClass::RsClass => "rs_class",
            ExpectClass::Inner => "inner",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformOp {
    /// Swap the 𝔐-components.
    P,
    /// Rotate the 𝔐-components by `c = i`.
    J,
    /// Rotate the 𝔎-components by `c = i`.
    JK,
    /// `−𝔍_𝔎`.
    NegJK,
    Inverse,
    Adjoint,
    KreinAdjoint,
    /// Unitary `I − 2i(A + i)⁻¹` as a matrix.
    Cayley,
    /// `T = −I + 2(I + A)⁻¹` as a matrix.
    Contraction,
    /// Structural flags and residuals.
    Classify,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    /// Random relation, mixed operator and multivalued.
    Relation,
    /// `{(I + T)h, (I − T)h}` for a random selfadjoint contraction.
    Nonnegative,
    /// Minimal selfadjoint passive system.
    System,
    /// Moments of a minimal selfadjoint passive system.
    Moments,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a family given as JSON.
    Classify {
        family: PathBuf,
        #[arg(long, value_enum)]
        expect: Option<ExpectClass>,
    },
    /// Verify a compressed-resolvent identity between a relation and a family.
    Verify {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_parser = parse_tag)]
        tag: Representation,
    },
    /// Minimal selfadjoint realization from moments (or from a system's moments).
    Realize { moments: PathBuf },
    /// Quadrature of the weighted model against its closed form.
    ModelCheck,
    /// Apply a graph transformation to a relation.
    Transform {
        relation: PathBuf,
        #[arg(long, value_enum)]
        op: TransformOp,
    },
    /// Write a random instance drawn with `--seed`.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        #[arg(long, default_value_t = 1)]
        dim_m: usize,
        #[arg(long, default_value_t = 2)]
        dim_k: usize,
    },
}

/// Runs the CLI on the given arguments and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_PASS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) | Error::NotRealizable(_) | Error::NotContraction { .. } | Error::NotUnitary(_) => {
            EXIT_MISMATCH
        }
        Error::AmbiguousRank(_) | Error::Quadrature { .. } => EXIT_INDETERMINATE,
        _ => EXIT_IO,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    match &cli.command {
        Command::Classify { family, expect } => cmd_classify(c, family, *expect),
        Command::Verify { relation, family, tag } => cmd_verify(c, relation, family, *tag),
        Command::Realize { moments } => cmd_realize(c, moments),
        Command::ModelCheck => cmd_model_check(c),
        Command::Transform { relation, op } => cmd_transform(c, relation, *op),
        Command::Sample { kind, dim_m, dim_k } => cmd_sample(c, *kind, *dim_m, *dim_k),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("{}: {e}", path.display()),
        ))
    })
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn tolerance(common: &Common) -> Result<Tolerance> {
    let t = common.tol.unwrap_or(1e-8);
    let base = Tolerance::default();
    Tolerance::new(base.rank_rel, base.ortho, t, t)
}

pub fn load_grid(spec: &str) -> Result<Vec<Complex64>> {
    let mut pts = if spec == "default" {
        default_grid()
    } else {
        let raw: Vec<[f64; 2]> = read_json(Path::new(spec))?;
        raw.into_iter().map(|[re, im]| c64(re, im)).collect()
    };
    if pts.is_empty() {
        return Err(Error::Hypothesis("the grid is empty".into()));
    }
    sort_grid(&mut pts);
    Ok(pts)
}

fn cmd_classify(c: &Common, path: &Path, expect: Option<ExpectClass>) -> Result<i32> {
    let fam: OperatorFamily = read_json(path)?;
    let tol = tolerance(c)?;
    let grid = load_grid(&c.grid)?;
    let verdict = classify_family(&fam, &grid, &tol)?;
    let text = match c.format {
        Format::Json => to_json(&verdict)?,
        Format::Csv => {
            let mut s = String::from("check,re,im,residual,pass\n");
            for r in &verdict.residuals {
                s.push_str(&format!(
                    "{},{},{},{:e},{}\n",
                    r.check, r.lambda[0], r.lambda[1], r.residual, r.pass
                ));
            }
            s
        }
    };
    emit(c, &text)?;
    Ok(match expect {
        Some(class) if verdict.is(class.key()) != Some(true) => {
            eprintln!("expected {} but the verdict disagrees", class.key());
            EXIT_MISMATCH
        }
        _ => EXIT_PASS,
    })
}

fn parse_tag(s: &str) -> std::result::Result<Representation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn cmd_verify(c: &Common, rel_path: &Path, fam_path: &Path, tag: Representation) -> Result<i32> {
    let rel: LinearRelation = read_json(rel_path)?;
    let fam: OperatorFamily = read_json(fam_path)?;
    let grid = load_grid(&c.grid)?;
    let threshold = c.tol.unwrap_or(1e-8);
    let report = verify_representation(&fam, &rel, tag, &grid, threshold, &Tolerance::default())?;
    let text = match c.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("re,im,residual,pass\n");
            for r in &report.rows {
                s.push_str(&format!(
                    "{},{},{:e},{}\n",
                    r.lambda[0], r.lambda[1], r.residual, r.pass
                ));
            }
            s
        }
    };
    emit(c, &text)?;
    Ok(if report.summary.pass { EXIT_PASS } else { EXIT_MISMATCH })
}

/// Moments as a list of matrices, a list of real scalars, or a whole system.
#[derive(Deserialize)]
#[serde(untagged)]
enum RealizeInput {
    Scalars(Vec<f64>),
    Moments(MomentSequence),
    System(PassiveSystem),
}

fn series(moments: &[CMatrix], z: Complex64) -> CMatrix {
    let mut acc = CMatrix::zeros(moments[0].nrows(), moments[0].ncols());
    let mut power = c64(1.0, 0.0);
    for h in moments {
        acc += h * power;
        power *= z;
    }
    acc
}

fn cmd_realize(c: &Common, path: &Path) -> Result<i32> {
    let input: RealizeInput = read_json(path)?;
    let tol = Tolerance::default();
    let (seq, reference) = match input {
        RealizeInput::Scalars(v) => (
            MomentSequence {
                moments: v
                    .into_iter()
                    .map(|x| CMatrix::from_element(1, 1, c64(x, 0.0)))
                    .collect(),
            },
            None,
        ),
        RealizeInput::Moments(m) => (m, None),
        RealizeInput::System(s) => (s.moments(default_moment_len(s.dim_k())), Some(s)),
    };
    let real = ho_kalman_realize(&seq, &tol)?;
    let mut error: f64 = 0.0;
    for r in [0.125, 0.25, 0.375, 0.5] {
        for k in 0..16 {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 16.0);
            let got = real.system.transfer(z, &tol)?;
            let want = match &reference {
                Some(sys) => sys.transfer(z, &tol)?,
                None => series(&seq.moments, z),
            };
            error = error.max(crate::linalg::spectral_norm(&(got - want)));
        }
    }
    eprintln!(
        "state dimension {}, transfer max error {:.3e} ({}), moment residual {:.3e}",
        real.state_dim,
        error,
        if reference.is_some() {
            "against the input system"
        } else {
            "against the moment series"
        },
        real.moment_residual
    );
    emit(c, &to_json(&real.system)?)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct ModelSummary {
    max_abs_err: f64,
    family_vs_r0: f64,
    inverse_stieltjes: bool,
    threshold: f64,
    pass: bool,
}

fn cmd_model_check(c: &Common) -> Result<i32> {
    let grid = load_grid(&c.grid)?;
    let spec = QuadratureSpec::default();
    let rows = model_check(&grid, &spec)?;
    let threshold = c.tol.unwrap_or(1e-7);
    let max_abs_err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let tol = Tolerance::default();
    let fam = OperatorFamily::Model {
        model: HalfLineModel::new(ModelKind::WeightedL2),
    };
    let family_vs_r0 = family_distance(&fam, &fixed_point_family(FixedPoint::R0, 1), &grid, &tol)?;
    let inverse_stieltjes = classify_family(&fam, &grid, &tolerance(c)?)?.inverse_stieltjes;
    let pass = max_abs_err <= threshold && family_vs_r0 <= threshold && inverse_stieltjes;
    let summary = ModelSummary {
        max_abs_err,
        family_vs_r0,
        inverse_stieltjes,
        threshold,
        pass,
    };
    let text = match c.format {
        Format::Json => to_json(&json!({ "rows": rows, "summary": summary }))?,
        Format::Csv => {
            let mut s = String::from("re,im,quadrature_re,quadrature_im,closed_form_re,closed_form_im,abs_err\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{:e}\n",
                    r.lambda[0],
                    r.lambda[1],
                    r.quadrature[0],
                    r.quadrature[1],
                    r.closed_form[0],
                    r.closed_form[1],
                    r.abs_err
                ));
            }
            s
        }
    };
    emit(c, &text)?;
    Ok(if pass { EXIT_PASS } else { EXIT_MISMATCH })
}

fn cmd_transform(c: &Common, path: &Path, op: TransformOp) -> Result<i32> {
    let rel: LinearRelation = read_json(path)?;
    let tol = Tolerance::default();
    let i = c64(0.0, 1.0);
    let text = match op {
        TransformOp::P => to_json(&p_transform(&rel)?)?,
        TransformOp::J => to_json(&j_transform(&rel, i, Side::M)?)?,
        TransformOp::JK => to_json(&j_transform(&rel, i, Side::K)?)?,
        TransformOp::NegJK => to_json(&neg_j_k(&rel)?)?,
        TransformOp::Inverse => to_json(&rel.inverse())?,
        TransformOp::Adjoint => to_json(&rel.adjoint(&tol))?,
        TransformOp::KreinAdjoint => to_json(&rel.krein_adjoint(&tol))?,
        TransformOp::Cayley => to_json(&MatrixJson::from(&cayley(&rel, &tol)?))?,
        TransformOp::Contraction => {
            let t = contraction_transform(&rel, &tol)?;
            to_json(&json!({
                "t": MatrixJson::from(&t.t),
                "norm": t.norm,
                "asymmetry": t.asymmetry,
                "selfadjoint_contraction": t.selfadjoint_contraction,
            }))?
        }
        TransformOp::Classify => to_json(&rel.classify(&tol)?)?,
    };
    emit(c, &text)?;
    Ok(EXIT_PASS)
}

fn cmd_sample(c: &Common, kind: SampleKind, dim_m: usize, dim_k: usize) -> Result<i32> {
    let tol = Tolerance::default();
    let split = SpaceSplit::new(dim_m, dim_k)?;
    let mut s = Sampler::new(c.seed);
    let text = match kind {
        SampleKind::Relation => to_json(&s.relation(split, &tol))?,
        SampleKind::Nonnegative => to_json(&s.nonnegative_relation(split, true, &tol).1)?,
        SampleKind::System => to_json(&s.minimal_system(dim_m, dim_k, 0.95))?,
        SampleKind::Moments => to_json(&s.minimal_system(dim_m, dim_k, 0.95).moments(default_moment_len(dim_k)))?,
    };
    emit(c, &text)?;
    Ok(EXIT_PASS)
}
