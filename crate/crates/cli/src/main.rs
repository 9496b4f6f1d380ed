//! `agcurv` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, usage or data
//! the curvature completion cannot accept.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agcurv::manifest::{default_tolerance, encode_tensor};
use agcurv::{
    audit_batch, audit_with_hypersurface, classify_instance, extract_sigma, generate_instance, transport_check,
    BatchConfig, CurvatureBundle, InstanceKind, Manifest, RicciMode, SymmetryResiduals,
};
use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "agcurv", version, about = "Curvature of Kenmotsu-type almost contact metric structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the admissibility relations of a manifest.
    Validate {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Riemann, Ricci and generalized curvature tensors.
    Build {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "contraction")]
        ricci: RicciArg,
        /// Include the full tensors in the report.
        #[arg(long)]
        tensors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flags and fitted constants of one instance.
    Classify {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit the curvature statements on one manifest or on seeded trials.
    Audit {
        /// Audit this instance instead of generated trials.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second quadratic form of a hypersurface and a frame transport check.
    Hypersurface {
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated manifest.
    Gen {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        #[arg(long, value_enum, default_value = "random")]
        kind: KindArg,
        /// Attach consistent hypersurface data of ambient dimension n + 1.
        #[arg(long)]
        hypersurface: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RicciArg {
    Formula,
    Contraction,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Random,
    ConstantCurvature,
    FlatBranchA,
    FlatBranchB,
    PhiSemisymmetricNonflat,
    Twisted,
    Zero,
}

/// Every report is wrapped with the command and a hash of its inputs.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Envelope {
    command: String,
    input_sha256: String,
    ok: bool,
    report: Value,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load(path: &Path) -> anyhow::Result<(Manifest, String)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("manifest is not UTF-8")?;
    let m = Manifest::from_json_str(text).with_context(|| format!("invalid manifest {}", path.display()))?;
    Ok((m, sha256_hex(&bytes)))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}")?;
        }
    }
    Ok(())
}

fn finish(command: &str, hash: String, ok: bool, report: Value, out: Option<&Path>) -> anyhow::Result<bool> {
    let env = Envelope { command: command.into(), input_sha256: hash, ok, report };
    emit(out, &serde_json::to_string_pretty(&env)?)?;
    Ok(ok)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Validate { manifest, out } => {
            let (m, hash) = load(&manifest)?;
            let rep = m.structure.validate_admissible(m.options.tolerance)?;
            let ok = rep.is_admissible();
            let body = json!({
                "admissible": ok,
                "consistent": rep.is_consistent(),
                "max_residual": rep.max_residual(),
                "admissibility": rep,
            });
            finish("validate", hash, ok, body, out.as_deref())
        }
        Command::Build { manifest, ricci, tensors, out } => {
            let (m, hash) = load(&manifest)?;
            let tol = m.options.tolerance;
            let b = CurvatureBundle::build(&m.structure, m.coefficients, tol)?;
            let formula = agcurv::ricci_formula(&m.structure, &b.metric)?;
            let gap = formula.ricci.max_abs_diff(&b.ricci)?;
            let chosen = match ricci {
                RicciArg::Formula => &formula.ricci,
                RicciArg::Contraction => &b.ricci,
            };
            let gf = agcurv::generalized_components_formula(&m.structure, &b.ricci_data(), m.coefficients, tol)?;
            let g_gap = gf.max_abs_diff(&b.g)?;
            let sym = SymmetryResiduals::of(&b.r4);
            let ok = sym.max() <= tol && gap <= tol && g_gap <= tol;
            let mode = match ricci {
                RicciArg::Formula => RicciMode::Formula,
                RicciArg::Contraction => RicciMode::Contraction,
            };
            let mut body = json!({
                "n": b.n,
                "coefficients": b.coeffs,
                "ricci_mode": mode,
                "ricci": encode_tensor(chosen.data()),
                "scalar_curvature": b.s,
                "symmetry_residuals": sym,
                "ricci_formula_vs_contraction": gap,
                "generalized_formula_vs_definition": g_gap,
            });
            if tensors {
                body["riemann"] = encode_tensor(b.r4.data());
                body["generalized"] = encode_tensor(b.g.data());
                body["projective"] = encode_tensor(b.p.data());
                body["concircular"] = encode_tensor(b.c.data());
                body["conharmonic"] = encode_tensor(b.k.data());
            }
            finish("build", hash, ok, body, out.as_deref())
        }
        Command::Classify { manifest, out } => {
            let (m, hash) = load(&manifest)?;
            let rep = classify_instance(&m.structure, m.coefficients, m.options.tolerance)?;
            finish("classify", hash, true, serde_json::to_value(rep)?, out.as_deref())
        }
        Command::Audit { manifest: Some(path), out, .. } => {
            let (m, hash) = load(&path)?;
            let h = m.hypersurface.as_ref().map(|h| &h.data);
            let rep = audit_with_hypersurface(&m.structure, m.coefficients, m.options.tolerance, h)?;
            let ok = rep.consistency_failures().is_empty();
            finish("audit", hash, ok, serde_json::to_value(rep)?, out.as_deref())
        }
        Command::Audit { manifest: None, trials, seed, n, scale, tolerance, out } => {
            if n == 0 {
                anyhow::bail!("--n must be at least 1");
            }
            let tolerance = tolerance.unwrap_or_else(default_tolerance);
            let config = BatchConfig { n, trials, seed, scale, tolerance };
            let rep = audit_batch(config)?;
            let ok = !rep.has_consistency_failures();
            let hash = sha256_hex(serde_json::to_string(&config)?.as_bytes());
            finish("audit", hash, ok, serde_json::to_value(rep)?, out.as_deref())
        }
        Command::Hypersurface { manifest, seed, out } => {
            let (m, hash) = load(&manifest)?;
            let Some(h) = m.hypersurface.as_ref() else {
                anyhow::bail!("{}: hypersurface: missing section", manifest.display());
            };
            let tol = m.options.tolerance;
            let ex = extract_sigma(&h.data, tol)?;
            let tr = transport_check(2 * h.data.n, h.curvature.as_ref(), h.frame_change.as_ref(), seed)?;
            let scale = tr.condition_number.powi(5).max(1.0);
            let transport_ok = tr.round_trip <= tol * scale && tr.composition <= tol * scale;
            let s = &ex.sigma;
            let body = json!({
                "consistent": ex.consistent,
                "residuals": ex.residuals,
                "sigma": {
                    "sigma_ud": encode_tensor(&s.sigma_ud),
                    "sigma_du": encode_tensor(&s.sigma_du),
                    "sigma_uu": encode_tensor(&s.sigma_uu),
                    "sigma_dd": encode_tensor(&s.sigma_dd),
                    "sigma_nd": encode_tensor(&s.sigma_nd),
                    "sigma_nu": encode_tensor(&s.sigma_nu),
                },
                "transport": tr,
                "transport_ok": transport_ok,
            });
            finish("hypersurface", hash, ex.consistent && transport_ok, body, out.as_deref())
        }
        Command::Gen { n, seed, scale, kind, hypersurface, out } => {
            if n == 0 {
                anyhow::bail!("--n must be at least 1");
            }
            let (st, coeffs) = match kind {
                KindArg::Zero => (agcurv::StructureData::zeros(n)?, agcurv::CoefficientTriple::new(1.0, 0.0, 0.0)),
                other => generate_instance(instance_kind(other), n, seed, scale)?,
            };
            let mut m = Manifest::new(st, coeffs);
            if hypersurface {
                let data = agcurv::HypersurfaceData::consistent(n + 1, seed)?;
                m.hypersurface = Some(agcurv::HypersurfaceSection { data, frame_change: None, curvature: None });
            }
            emit(out.as_deref(), &m.to_json_string())?;
            Ok(true)
        }
    }
}

fn instance_kind(k: KindArg) -> InstanceKind {
    match k {
        KindArg::Random | KindArg::Zero => InstanceKind::Random,
        KindArg::ConstantCurvature => InstanceKind::ConstantCurvature,
        KindArg::FlatBranchA => InstanceKind::FlatBranchA,
        KindArg::FlatBranchB => InstanceKind::FlatBranchB,
        KindArg::PhiSemisymmetricNonflat => InstanceKind::PhiSemisymmetricNonflat,
        KindArg::Twisted => InstanceKind::Twisted,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
