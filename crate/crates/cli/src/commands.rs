//! Subcommand definitions and their implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sic_core::clifford::{self, SymplecticMatrix};
use sic_core::etf::{self, EtfFamily};
use sic_core::exec::Exec;
use sic_core::sic::{self, Fiducial, SearchOptions, Subspace};
use sic_core::{arith, linalg, wh, CMat};

use crate::catalog::{Catalog, Status};
use crate::config::{ConfigFile, Format, RunConfig};
use crate::files::{self, num, FamilyFile, FiducialFile, MatrixFile};
use crate::{CliError, Output};

#[derive(Debug, Parser)]
#[command(name = "sicx", version, about = "SIC-POVM and equiangular tight frame toolkit for odd dimensions")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// TOML file with defaults for `catalog`, `tol` and `format`.
    #[arg(long, global = true, env = "SICX_CONFIG")]
    pub config: Option<PathBuf>,
    /// Catalog directory.
    #[arg(long, global = true, env = "SICX_CATALOG")]
    pub catalog: Option<PathBuf>,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions up to a bound sharing the square-free part d0 of (d+1)(d-3).
    Tower {
        /// Square-free base d0.
        #[arg(long)]
        d0: u64,
        /// Largest dimension considered.
        #[arg(long)]
        bound: u64,
        /// CSV rows `d,m,d0,rung,ladder_base`.
        #[arg(long)]
        csv: bool,
    },
    /// Iterates d -> d(d-2).
    Ladder {
        /// Dimension.
        #[arg(long)]
        d: u64,
        /// Number of lifts.
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Divisibility edges among odd dimensions.
    Graph {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        dims: Vec<u64>,
        /// Graphviz output.
        #[arg(long)]
        dot: bool,
        /// Drop edges implied by transitivity.
        #[arg(long)]
        reduce: bool,
    },
    /// Weyl-Heisenberg group checks.
    #[command(subcommand)]
    Wh(WhCommand),
    /// Clifford group checks.
    #[command(subcommand)]
    Clifford(CliffordCommand),
    /// SIC search and verification.
    #[command(subcommand)]
    Sic(SicCommand),
    /// Lift, Naimark complement and alignment.
    #[command(subcommand)]
    Etf(EtfCommand),
    /// Stored fiducials.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Subcommand)]
pub enum WhCommand {
    /// Group law, operator basis and phase-point operators.
    Check {
        /// Dimension.
        #[arg(long)]
        d: u64,
    },
    /// Equidistance of the d^2 phase-point projectors.
    Grassmann {
        /// Dimension.
        #[arg(long)]
        d: u64,
        /// Verification tolerance [default: 1e-10].
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CliffordCommand {
    /// Defining relation for random symplectic matrices, and the parity case.
    Check {
        /// Dimension.
        #[arg(long)]
        d: u64,
        /// Random symplectic matrices to test.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Base seed; restart k derives its own seed from it.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Zauner unitary, normalised to U^3 = 1.
    Zauner {
        /// Dimension.
        #[arg(long)]
        d: u64,
        /// Write the matrix here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Dimension.
    #[arg(long)]
    pub d: u64,
    /// Base seed; restart k derives its own seed from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random starts per stage.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Iteration cap per start.
    #[arg(long, default_value_t = 3000)]
    pub max_iters: usize,
    /// Verification tolerance [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Search the full space only.
    #[arg(long)]
    pub no_zauner: bool,
    /// Restrict to fiducials fixed by U_P (x) 1 on C^{k-2} (x) C^k, with d = k(k-2).
    #[arg(long, conflicts_with = "no_zauner")]
    pub parity_of: Option<u64>,
    /// Output JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also store the result in the catalog.
    #[arg(long)]
    pub put: bool,
}

#[derive(Debug, Subcommand)]
pub enum SicCommand {
    Search(SearchArgs),
    Verify {
        /// Input JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Verification tolerance [default: 1e-10].
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EtfCommand {
    /// Symmetric-subspace lift of a fiducial.
    Lift {
        /// Input JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output JSON file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Naimark complement of a family.
    Naimark {
        /// Input JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output JSON file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compares a SIC in d with one in d(d-2).
    Align {
        /// Fiducial in dimension d.
        #[arg(long)]
        low: PathBuf,
        /// Fiducial in dimension d(d-2).
        #[arg(long)]
        high: PathBuf,
        /// Also report the SIC deviation over all displacements.
        #[arg(long)]
        full_sic: bool,
        /// Check the high fiducial as given, without relabelling.
        #[arg(long)]
        no_scan: bool,
        /// Largest overlap-phase residual counted as aligned.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        /// Write the best relabelled high fiducial here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    Put {
        /// Input JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Verification tolerance [default: 1e-10].
        #[arg(long)]
        tol: Option<f64>,
    },
    List,
    /// Lowest-residual entry for d.
    Get {
        /// Dimension.
        #[arg(long)]
        d: u64,
        /// Output JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Tower { .. } => "tower",
        Command::Ladder { .. } => "ladder",
        Command::Graph { .. } => "graph",
        Command::Wh(_) => "wh",
        Command::Clifford(_) => "clifford",
        Command::Sic(_) => "sic",
        Command::Etf(_) => "etf",
        Command::Catalog(_) => "catalog",
    }
}

pub fn dispatch(cli: Cli) -> Result<(Output, Format), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(command_name(&cli.command).to_string(), cli.json, cli.catalog.clone(), &file);
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let mut format = cfg.format;
    let out = match cli.command {
        Command::Tower { d0, bound, csv } => {
            if csv {
                format = Format::Csv;
            }
            tower(d0, bound)?
        }
        Command::Ladder { d, steps } => ladder(d, steps)?,
        Command::Graph { dims, dot, reduce } => graph(&dims, dot, reduce)?,
        Command::Wh(WhCommand::Check { d }) => wh_check(d, exec)?,
        Command::Wh(WhCommand::Grassmann { d, tol }) => wh_grassmann(d, cfg.tol(tol)?, exec)?,
        Command::Clifford(CliffordCommand::Check { d, samples, seed }) => clifford_check(d, samples, seed)?,
        Command::Clifford(CliffordCommand::Zauner { d, emit }) => clifford_zauner(d, emit.as_deref())?,
        Command::Sic(SicCommand::Search(a)) => sic_search(&a, &cfg, exec)?,
        Command::Sic(SicCommand::Verify { input, tol }) => sic_verify(&input, cfg.tol(tol)?)?,
        Command::Etf(EtfCommand::Lift { input, out }) => etf_lift(&input, &out)?,
        Command::Etf(EtfCommand::Naimark { input, out }) => etf_naimark(&input, &out)?,
        Command::Etf(EtfCommand::Align { low, high, full_sic, no_scan, threshold, out }) => {
            etf_align(&low, &high, full_sic, no_scan, threshold, out.as_deref(), exec)?
        }
        Command::Catalog(CatalogCommand::Put { input, tol }) => catalog_put(&cfg, &input, cfg.tol(tol)?)?,
        Command::Catalog(CatalogCommand::List) => catalog_list(&cfg)?,
        Command::Catalog(CatalogCommand::Get { d, out }) => catalog_get(&cfg, d, out.as_deref())?,
    };
    Ok((out, format))
}

/// `key: value` lines; nested keys are joined with dots and arrays of scalars
/// with spaces.
pub fn render(v: &Value) -> String {
    fn scalar(v: &Value) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Null => Some("null".into()),
            Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
            _ => None,
        }
    }
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| scalar(x).is_some()) => {
                let items: Vec<String> = a.iter().filter_map(scalar).collect();
                out.push_str(&format!("{prefix}: {}\n", items.join(" ")));
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            _ => out.push_str(&format!("{prefix}: {}\n", scalar(v).unwrap_or_default())),
        }
    }
    let mut s = String::new();
    walk("", v, &mut s);
    s
}

fn write_json_file<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    files::write_atomic(path, files::to_json(value).as_bytes())
}

fn tower(d0: u64, bound: u64) -> Result<Output, CliError> {
    let entries = arith::tower_enumerate(d0, bound)?;
    let dims: Vec<String> = entries.iter().map(|e| e.d.to_string()).collect();
    let mut csv = String::from("d,m,d0,rung,ladder_base\n");
    for e in &entries {
        csv.push_str(&format!("{},{},{},{},{}\n", e.d, e.m, e.d0, e.rung, e.ladder_base));
    }
    let json = json!({
        "d0": d0,
        "bound": bound,
        "entries": entries.iter().map(|e| json!({
            "d": e.d, "m": e.m, "d0": e.d0, "rung": e.rung, "ladder_base": e.ladder_base,
        })).collect::<Vec<_>>(),
    });
    let mut out = Output::new(true, json);
    out.human = Some(format!("{}\n", dims.join(" ")));
    out.csv = Some(csv);
    Ok(out)
}

fn ladder(d: u64, steps: usize) -> Result<Output, CliError> {
    let chain = arith::ladder(d, steps)?;
    let text: Vec<String> = chain.iter().map(u64::to_string).collect();
    let mut out = Output::new(true, json!({ "d": d, "steps": steps, "ladder": chain }));
    out.human = Some(format!("{}\n", text.join(" -> ")));
    Ok(out)
}

fn graph(dims: &[u64], dot: bool, reduce: bool) -> Result<Output, CliError> {
    let edges = arith::divisibility_graph(dims, reduce)?;
    let mut out = Output::new(
        true,
        json!({
            "dims": dims,
            "reduce": reduce,
            "edges": edges.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        }),
    );
    out.human = Some(if dot { arith::graph_to_dot(dims, &edges) } else { edges.iter().map(|(a, b)| format!("{a} -> {b}\n")).collect() });
    Ok(out)
}

/// Tolerance for the exhaustive group-law suite.
const GROUP_TOL: f64 = 1e-11;

fn wh_check(d: u64, exec: Exec) -> Result<Output, CliError> {
    wh::check_odd(d)?;
    let group_law = wh::group_law_residual(d, exec)?;
    let basis = wh::operator_basis_residual(d, exec)?;
    let orth = wh::phase_point_orthogonality_residual(d, exec)?;
    let a0 = wh::phase_point(wh::DisplacementIndex::zero(d))?;
    let (plus, minus) = a0.multiplicities(wh::STRUCTURAL_TOL);
    let mult_ok = plus as u64 == d.div_ceil(2) && minus as u64 == (d - 1) / 2;
    let ok = group_law < GROUP_TOL && basis < GROUP_TOL && orth < GROUP_TOL && mult_ok;
    Ok(Output::new(
        ok,
        json!({
            "d": d,
            "ok": ok,
            "group_law_residual": num(group_law),
            "operator_basis_residual": num(basis),
            "phase_point_orthogonality_residual": num(orth),
            "phase_point_multiplicities": [plus, minus],
            "tol": num(GROUP_TOL),
        }),
    ))
}

fn wh_grassmann(d: u64, tol: f64, exec: Exec) -> Result<Output, CliError> {
    let r = wh::grassmann_equidistance_check(d, tol, exec)?;
    Ok(Output::new(
        r.equidistant,
        json!({
            "d": d,
            "equidistant": r.equidistant,
            "common_distance_sq": num(r.common_distance_sq),
            "expected_distance_sq": num(d as f64 / 2.0),
            "max_deviation": num(r.max_deviation),
            "tol": num(tol),
        }),
    ))
}

fn clifford_check(d: u64, samples: usize, seed: u64) -> Result<Output, CliError> {
    wh::check_odd(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = SymplecticMatrix::random(d, &mut rng)?;
        let u = clifford::weil_representative(&f)?;
        worst = worst.max(clifford::defining_relation_residual(&u.matrix, &f));
    }
    let parity = clifford::parity_representative(d)?;
    let parity_dev = clifford::equal_up_to_phase(&parity.matrix, &wh::parity(d)?);
    let ok = worst < clifford::CONSTRUCTION_TOL && parity_dev < 1e-12;
    Ok(Output::new(
        ok,
        json!({
            "d": d,
            "ok": ok,
            "samples": samples,
            "seed": seed,
            "max_defining_relation_residual": num(worst),
            "parity_deviation": num(parity_dev),
            "tol": num(clifford::CONSTRUCTION_TOL),
        }),
    ))
}

fn clifford_zauner(d: u64, emit: Option<&Path>) -> Result<Output, CliError> {
    let u = clifford::zauner(d)?;
    let n = d as usize;
    let cube = linalg::max_abs(&(linalg::matrix_power(&u.matrix, 3) - CMat::identity(n, n)));
    let relation = clifford::defining_relation_residual(&u.matrix, &u.f);
    let spaces = clifford::order3_eigenspaces(&u.matrix);
    let mut dims = [0usize; 3];
    for e in &spaces {
        dims[e.k as usize] = e.dim();
    }
    if let Some(p) = emit {
        let meta = BTreeMap::from([("operator".to_string(), format!("zauner d={d}"))]);
        write_json_file(p, &MatrixFile::from_matrix(&u.matrix, meta))?;
    }
    let ok = cube < 1e-10 && relation < clifford::CONSTRUCTION_TOL;
    Ok(Output::new(
        ok,
        json!({
            "d": d,
            "ok": ok,
            "cube_residual": num(cube),
            "defining_relation_residual": num(relation),
            "eigenspace_dims": dims,
            "emitted": emit.map(|p| p.display().to_string()),
        }),
    ))
}

fn fiducial_summary(f: &Fiducial, tol: f64) -> Value {
    let r = sic::verify_sic(f, tol);
    let zauner = clifford::zauner(f.d).ok().and_then(|u| sic::check_projective_symmetry(f, &u.matrix, 1e-8).ok());
    json!({
        "d": f.d,
        "is_sic": r.is_sic,
        "max_modulus_deviation": num(r.max_modulus_deviation),
        "frame_potential": num(r.frame_potential),
        "potential_gap": num(r.frame_potential - sic::potential_minimum(f.d)),
        "tight_frame_residual": num(r.tight_frame_residual),
        "zauner_symmetric": zauner.map(|z| z.symmetric),
        "zauner_residual": zauner.map(|z| num(z.residual)),
        "tol": num(tol),
    })
}

fn sic_search(a: &SearchArgs, cfg: &RunConfig, exec: Exec) -> Result<Output, CliError> {
    let tol = cfg.tol(a.tol)?;
    let opts = SearchOptions {
        seed: a.seed,
        restarts: a.restarts,
        max_iters: a.max_iters,
        tol,
        subspace: if a.no_zauner { Subspace::Full } else { Subspace::Auto },
        exec,
    };
    let fid = match a.parity_of {
        Some(k) => {
            if k < 5 || k.checked_mul(k - 2) != Some(a.d) {
                return Err(CliError::Usage(format!("--parity-of {k} needs --d {}", k.saturating_mul(k.saturating_sub(2)))));
            }
            etf::search_parity_symmetric(k, &opts)?
        }
        None => sic::search_fiducial(a.d, &opts)?,
    };
    let file = FiducialFile::from_fiducial(&fid);
    if let Some(p) = &a.out {
        write_json_file(p, &file)?;
    }
    let stored = if a.put { Catalog::new(&cfg.catalog).put(&fid, tol)?.hash } else { None };
    let m = &fid.metadata;
    let mut json = json!({
        "found": true,
        "seed": a.seed,
        "restart": m.restart,
        "iterations": m.iterations,
        "subspace": m.subspace,
        "symmetry_tags": m.symmetry_tags,
        "verification": fiducial_summary(&fid, tol),
        "out": a.out.as_ref().map(|p| p.display().to_string()),
        "catalog_hash": stored,
    });
    if a.out.is_none() {
        json["fiducial"] = serde_json::to_value(&file).expect("serialisable");
    }
    Ok(Output::new(true, json))
}

fn sic_verify(input: &Path, tol: f64) -> Result<Output, CliError> {
    let f = files::read_fiducial(input)?;
    let v = fiducial_summary(&f, tol);
    let ok = v["is_sic"].as_bool().unwrap_or(false);
    Ok(Output::new(ok, v))
}

fn etf_report(r: &etf::EtfReport) -> Value {
    json!({
        "ambient_dim": r.ambient_dim,
        "count": r.count,
        "is_etf": r.is_etf,
        "c1": num(r.c1),
        "c2": num(r.c2),
        "tight_residual": num(r.tight_residual),
        "equiangular_spread": num(r.equiangular_spread),
        "c2_deviation": num(r.c2_deviation),
        "tol": num(r.tol),
    })
}

/// Family tolerance used by the ETF commands.
const ETF_TOL: f64 = 1e-9;

fn etf_lift(input: &Path, out: &Path) -> Result<Output, CliError> {
    let f = files::read_fiducial(input)?;
    let lift = etf::sym_lift(&f)?;
    let r = etf::verify_etf(&lift.family, ETF_TOL);
    let meta = BTreeMap::from([
        ("construction".to_string(), "symmetric lift".to_string()),
        ("d".to_string(), f.d.to_string()),
        ("index_order".to_string(), "p = (i, j) linear index i*d + j".to_string()),
    ]);
    write_json_file(out, &FamilyFile::from_family(&lift.family, meta))?;
    let ok = lift.input_is_sic && r.is_etf;
    Ok(Output::new(ok, json!({ "input_is_sic": lift.input_is_sic, "report": etf_report(&r), "out": out.display().to_string() })))
}

fn odd_sqrt(n: usize) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r * r == n as u64 && r % 2 == 1 && r >= 3).then_some(r)
}

fn etf_naimark(input: &Path, out: &Path) -> Result<Output, CliError> {
    let fam: EtfFamily = files::read_family(input)?;
    let comp = etf::naimark_complement(&fam)?;
    let r = etf::verify_etf(&comp, ETF_TOL);
    // A covariant complement with one copy of the standard representation is a SIC.
    let as_sic = odd_sqrt(comp.count)
        .filter(|&d| d as usize == comp.ambient_dim)
        .and_then(|d| etf::family_fiducial(&comp, d).ok())
        .map(|f| fiducial_summary(&f, ETF_TOL));
    let mut meta = BTreeMap::from([("construction".to_string(), "naimark complement".to_string())]);
    if let Ok(text) = files::read_json::<FamilyFile>(input) {
        if let Some(d) = text.metadata.get("d") {
            meta.insert("d".into(), d.clone());
        }
    }
    write_json_file(out, &FamilyFile::from_family(&comp, meta))?;
    Ok(Output::new(r.is_etf, json!({ "report": etf_report(&r), "as_sic": as_sic, "out": out.display().to_string() })))
}

fn alignment_json(r: &etf::AlignmentReport) -> Value {
    json!({
        "d": r.d,
        "high_dim": r.high_dim,
        "parity_symmetric": r.parity_symmetric,
        "parity_eigenvalue": files::pair(r.parity_eigenvalue),
        "parity_residual": num(r.parity_residual),
        "squared_phase_residual": num(r.squared_phase_residual),
        "phase_match_residual": num(r.phase_match_residual),
        "full_sic_residual": r.full_sic_residual.map(num),
    })
}

fn etf_align(
    low: &Path,
    high: &Path,
    full: bool,
    no_scan: bool,
    threshold: f64,
    out: Option<&Path>,
    exec: Exec,
) -> Result<Output, CliError> {
    let lo = files::read_fiducial(low)?;
    let hi = files::read_fiducial(high)?;
    let raw = etf::alignment_check(&lo, &hi, full)?;
    let mut json = json!({
        "tensor_order": format!("C^{} (x) C^{}, first factor major", lo.d.saturating_sub(2), lo.d),
        "threshold": num(threshold),
        "as_given": alignment_json(&raw),
    });
    let mut best = raw.squared_phase_residual;
    let mut parity = raw.parity_symmetric;
    if !no_scan {
        let scan = etf::alignment_scan(&lo, &hi, exec)?;
        let s = &scan.symplectic;
        json["scan"] = json!({
            "candidates": scan.candidates,
            "symplectic": [[s.alpha, s.beta], [s.gamma, s.delta]],
            "shift": [scan.shift.i, scan.shift.j],
            "conjugated": scan.conjugated,
            "report": alignment_json(&scan.report),
        });
        best = scan.report.squared_phase_residual;
        parity = scan.report.parity_symmetric;
        if let Some(p) = out {
            write_json_file(p, &FiducialFile::from_fiducial(&scan.aligned))?;
        }
    }
    let ok = parity && best < threshold;
    json["aligned"] = json!(ok);
    Ok(Output::new(ok, json))
}

fn catalog_put(cfg: &RunConfig, input: &Path, tol: f64) -> Result<Output, CliError> {
    let f = files::read_fiducial(input)?;
    let r = Catalog::new(&cfg.catalog).put(&f, tol)?;
    Ok(Output::new(
        r.stored,
        json!({
            "stored": r.stored,
            "hash": r.hash,
            "path": r.path.map(|p| p.display().to_string()),
            "max_modulus_deviation": num(r.report.max_modulus_deviation),
            "tol": num(tol),
        }),
    ))
}

fn catalog_list(cfg: &RunConfig) -> Result<Output, CliError> {
    let list = Catalog::new(&cfg.catalog).list()?;
    let mut warnings = Vec::new();
    let mut lines = String::new();
    let entries: Vec<Value> = list
        .iter()
        .map(|l| match &l.status {
            Status::Ok(e) => {
                lines.push_str(&format!("d={} {} created={} residual={}\n", l.d, l.hash, e.created, e.verification.max_modulus_deviation));
                json!({
                    "d": l.d,
                    "hash": l.hash,
                    "status": "ok",
                    "created": e.created,
                    "residual": e.verification.max_modulus_deviation,
                })
            }
            Status::Corrupt(why) => {
                warnings.push(format!("corrupt catalog entry {}: {why}", l.path.display()));
                lines.push_str(&format!("d={} {} corrupt\n", l.d, l.hash));
                json!({ "d": l.d, "hash": l.hash, "status": "corrupt", "reason": why })
            }
        })
        .collect();
    let mut out = Output::new(true, json!({ "catalog": cfg.catalog.display().to_string(), "entries": entries }));
    out.human = Some(lines);
    out.warnings = warnings;
    Ok(out)
}

fn catalog_get(cfg: &RunConfig, d: u64, out: Option<&Path>) -> Result<Output, CliError> {
    let cat = Catalog::new(&cfg.catalog);
    let Some(found) = cat.get(d)? else {
        return Ok(Output::new(false, json!({ "d": d, "found": false })));
    };
    let entry = found.entry().expect("get returns intact entries");
    if let Some(p) = out {
        write_json_file(p, &entry.fiducial)?;
    }
    let mut json = json!({
        "d": d,
        "found": true,
        "hash": found.hash,
        "created": entry.created,
        "residual": entry.verification.max_modulus_deviation,
        "out": out.map(|p| p.display().to_string()),
    });
    if out.is_none() {
        json["fiducial"] = serde_json::to_value(&entry.fiducial).expect("serialisable");
    }
    Ok(Output::new(true, json))
}
