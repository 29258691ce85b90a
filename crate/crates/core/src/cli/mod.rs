//! The `prs` command line.

pub mod parse;
pub mod table;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::Serialize;

use crate::atlas::SurfaceFamily;
use crate::cech::{presentation, stabilize, Section, Sheaf, Truncation};
use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};
use crate::exactalg::{parse_rat, Rat, RatMatrix};
use crate::families::{frame_identity_holds, ks_is_isomorphism, ks_matrix, registered_family, verify_lambda_welldefined};
use crate::poissonco::{obstruction_witness, poisson_cohomology, verdict_report, PoissonStructure};
use crate::polyvector::{lie_bracket, schouten_bv};

pub use table::{cmd_table, TableReport, TableRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Md,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyFlag {
    S0,
    Twisted,
    Sn,
    A0,
    Am1,
}

/// Shared run settings.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n_max: u32,
    pub samples: usize,
    pub seed: u64,
    pub g2: String,
    pub g3: String,
    pub trunc_m: Option<i64>,
    pub trunc_n: Option<i64>,
    pub trunc_k: Option<usize>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 6,
            samples: 3,
            seed: 42,
            g2: "7/3".into(),
            g3: "5/11".into(),
            trunc_m: None,
            trunc_n: None,
            trunc_k: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 || self.samples < 1 {
            return Err(Error::InvalidParameters("n-max and samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn elliptic(&self) -> Result<EllipticParams> {
        EllipticParams::new(parse_rat(&self.g2)?, parse_rat(&self.g3)?)
    }

    pub fn truncation_for(&self, family: &SurfaceFamily) -> Result<Truncation> {
        let mut tr = Truncation::default_for(family);
        if let Some(m) = self.trunc_m {
            tr.m = m;
        }
        if let Some(n) = self.trunc_n {
            tr.n = n;
        }
        if let Some(k) = self.trunc_k {
            tr.k = k;
        }
        tr.validate(family)?;
        Ok(tr)
    }
}

#[derive(Parser, Debug)]
#[command(name = "prs", version, about = "Exact Poisson cohomology of ruled surfaces over an elliptic curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[arg(long, default_value = "7/3")]
    pub g2: String,
    #[arg(long, default_value = "5/11")]
    pub g3: String,
    /// Override the pole depth M of overlap cochains.
    #[arg(long)]
    pub trunc_m: Option<i64>,
    /// Override the chart-1 order N.
    #[arg(long)]
    pub trunc_n: Option<i64>,
    /// Override the wp-derivative cap K.
    #[arg(long)]
    pub trunc_k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    #[arg(long, value_enum)]
    pub family: FamilyFlag,
    /// Fibre degree for `sn`.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Twist for `twisted`.
    #[arg(long, default_value = "1")]
    pub t0: String,
    #[command(flatten)]
    pub curve: CurveArgs,
}

#[derive(Args, Debug, Clone)]
pub struct StructureArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Poisson coefficients, e.g. `A=1,B=0,C=2/3` or `a0=0,c0=1`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub coeffs: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reproduce the classification table.
    Table {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Diff against a stored JSON table.
        #[arg(long)]
        golden: Option<std::path::PathBuf>,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Sheaf cohomology, induced maps and Poisson cohomology.
    Cohomology(StructureArgs),
    /// Search for an obstruction witness.
    Obstruction(StructureArgs),
    /// Check the registered deformation family.
    VerifyFamily(StructureArgs),
    /// Evaluate a bracket of two field expressions.
    Bracket {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        /// 0 for the chart at infinity of the fibre coordinate xi, 1 for the chart near the point.
        #[arg(long, default_value_t = 1)]
        chart: u8,
        /// Also print the reduced cohomology class (chart 1).
        #[arg(long)]
        reduce: bool,
    },
}

fn config_from(curve: &CurveArgs) -> RunConfig {
    RunConfig {
        g2: curve.g2.clone(),
        g3: curve.g3.clone(),
        trunc_m: curve.trunc_m,
        trunc_n: curve.trunc_n,
        trunc_k: curve.trunc_k,
        ..RunConfig::default()
    }
}

pub fn build_family(a: &SurfaceArgs) -> Result<SurfaceFamily> {
    let e = config_from(&a.curve).elliptic()?;
    match a.family {
        FamilyFlag::S0 => Ok(SurfaceFamily::s0(e)),
        FamilyFlag::Twisted => SurfaceFamily::twisted(parse_rat(&a.t0)?, e),
        FamilyFlag::Sn => SurfaceFamily::sn(a.n, e),
        FamilyFlag::A0 => Ok(SurfaceFamily::a0(e)),
        FamilyFlag::Am1 => Ok(SurfaceFamily::aminus1(e)),
    }
}

fn structure_from(a: &StructureArgs) -> Result<(PoissonStructure, Truncation)> {
    let fam = build_family(&a.surface)?;
    let tr = config_from(&a.surface.curve).truncation_for(&fam)?;
    Ok((parse::parse_coeffs(&fam, &a.coeffs)?, tr))
}

fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn fmt_matrix(out: &mut String, name: &str, m: &RatMatrix) {
    let _ = writeln!(out, "{} ({}x{}):", name, m.rows(), m.cols());
    for i in 0..m.rows() {
        let _ = writeln!(out, "  [{}]", m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
    }
}

pub fn cmd_cohomology(p: &PoissonStructure, tr: &Truncation) -> Result<String> {
    let fam = p.family();
    let mut out = String::new();
    let _ = writeln!(out, "surface: {}", fam);
    let _ = writeln!(out, "Lambda0: {} = {}", p, p.bivector());
    let _ = writeln!(out, "row: {}", p.class().label());
    let _ = writeln!(out, "truncation: {}", tr);
    for sheaf in [Sheaf::Theta, Sheaf::Wedge2Theta] {
        let pr = presentation(fam, sheaf, tr)?;
        let st = stabilize(fam, sheaf, tr)?;
        let _ = writeln!(out, "\n{}: h0 = {}, h1 = {} (stable under doubling: {})", sheaf, pr.h0_dim(), pr.h1_dim(), st.certified);
        let _ = writeln!(out, "  H0 basis:");
        for g in pr.h0_basis() {
            let _ = writeln!(out, "    {}", g);
        }
        let _ = writeln!(out, "  H1 representatives (chart 1):");
        for r in pr.h1_reps() {
            let _ = writeln!(out, "    {}", r);
        }
    }
    let pc = poisson_cohomology(p, tr)?;
    out.push('\n');
    fmt_matrix(&mut out, "[Lambda0,-] on H0", &pc.h0_map);
    fmt_matrix(&mut out, "[Lambda0,-] on H1", &pc.h1_map);
    let _ = writeln!(out, "\nHP = ({}, {}, {})", pc.hp[0], pc.hp[1], pc.hp[2]);
    Ok(out)
}

pub fn cmd_obstruction(p: &PoissonStructure, tr: &Truncation) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "Lambda0: {}", p);
    match obstruction_witness(p, tr)? {
        Some(w) => {
            let _ = writeln!(out, "witness found");
            let _ = writeln!(out, "  a = {}", w.a);
            let _ = writeln!(out, "  b = {}", w.b);
            let _ = writeln!(out, "  [a,b] = {}", w.bracket);
            let _ = writeln!(out, "  class of [a,b] = {} (not in the image of [Lambda0,-] on H1)", fmt_vec(&w.bracket_class));
        }
        None => {
            let _ = writeln!(out, "none found (inconclusive by the bracket criterion alone)");
        }
    }
    let _ = writeln!(out, "verdict: {}", verdict_report(p, tr)?.verdict);
    Ok(out)
}

pub fn cmd_verify_family(p: &PoissonStructure, tr: &Truncation) -> Result<(String, bool)> {
    let mut out = String::new();
    let _ = writeln!(out, "Lambda0: {}", p);
    let Some(f) = registered_family(p) else {
        let _ = writeln!(out, "no registered family for row {}", p.class().label());
        return Ok((out, false));
    };
    let params: Vec<String> = f.deformation_params.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "family: {:?} with parameters ({})", f.kind, params.join(", "));
    let samples = f.required_samples();
    let wd = verify_lambda_welldefined(&f, samples)?;
    let fi = frame_identity_holds(&f, samples)?;
    let ks = ks_matrix(&f, tr)?;
    let hp1 = poisson_cohomology(p, tr)?.hp[1];
    let iso = ks_is_isomorphism(&f, tr)?;
    let _ = writeln!(out, "well-defined: {} ({} samples per parameter)", wd, samples);
    let _ = writeln!(out, "frame identity: {}", fi);
    fmt_matrix(&mut out, "KS matrix", &ks.matrix);
    let _ = writeln!(out, "KS rank: {}/{}", ks.rank(), hp1);
    let ok = wd && fi && iso;
    let _ = writeln!(out, "isomorphism: {}", iso);
    Ok((out, ok))
}

pub fn cmd_bracket(fam: &SurfaceFamily, lhs: &str, rhs: &str, chart: u8, reduce: bool, tr: &Truncation) -> Result<String> {
    let order = tr.n;
    let t0 = match chart {
        0 => Rat::zero(),
        1 => fam.t0(),
        _ => return Err(Error::InvalidParameters("chart must be 0 or 1".into())),
    };
    let params = fam.elliptic();
    let l = parse::parse_section(lhs, params, order)?;
    let r = parse::parse_section(rhs, params, order)?;
    let res = match (&l, &r) {
        (Section::Vector(v), Section::Vector(w)) => Section::Vector(lie_bracket(v, w, &t0)?),
        (Section::Bivector(b), Section::Vector(v)) => Section::Bivector(schouten_bv(b, v, &t0)?),
        (Section::Vector(v), Section::Bivector(b)) => Section::Bivector(schouten_bv(b, v, &t0)?.scale(&-Rat::from_integer(1.into()))),
        (Section::Bivector(_), Section::Bivector(_)) => return Ok("0 (trivectors vanish on a surface)\n".into()),
    };
    let mut out = format!("{}\n", res);
    if reduce {
        if chart != 1 {
            return Err(Error::InvalidParameters("--reduce needs --chart 1".into()));
        }
        let pr = presentation(fam, res.sheaf(), tr)?;
        let _ = writeln!(out, "class: {}", fmt_vec(&pr.reduce_class(&res)?));
    }
    Ok(out)
}

/// Runs one command; returns the text for stdout and the exit code.
pub fn run(cli: Cli) -> Result<(String, i32)> {
    match cli.command {
        Command::Table { n_max, samples, seed, format, golden, curve } => {
            let cfg = RunConfig { n_max, samples, seed, format, ..config_from(&curve) };
            cfg.validate()?;
            let report = cmd_table(&cfg)?;
            let mut problems = report.mismatches.clone();
            if let Some(path) = golden {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {}", path.display(), e)))?;
                problems.extend(table::diff_golden(&report.rows, &text)?);
            }
            let out = match format {
                Format::Json => report.to_json() + "\n",
                Format::Md => report.to_markdown(),
            };
            for p in &problems {
                eprintln!("MISMATCH {}", p);
            }
            Ok((out, if problems.is_empty() { 0 } else { 1 }))
        }
        Command::Cohomology(a) => {
            let (p, tr) = structure_from(&a)?;
            Ok((cmd_cohomology(&p, &tr)?, 0))
        }
        Command::Obstruction(a) => {
            let (p, tr) = structure_from(&a)?;
            Ok((cmd_obstruction(&p, &tr)?, 0))
        }
        Command::VerifyFamily(a) => {
            let (p, tr) = structure_from(&a)?;
            let (out, ok) = cmd_verify_family(&p, &tr)?;
            Ok((out, if ok { 0 } else { 1 }))
        }
        Command::Bracket { surface, lhs, rhs, chart, reduce } => {
            let fam = build_family(&surface)?;
            let tr = config_from(&surface.curve).truncation_for(&fam)?;
            Ok((cmd_bracket(&fam, &lhs, &rhs, chart, reduce, &tr)?, 0))
        }
    }
}
