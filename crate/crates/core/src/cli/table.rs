//! Reproduction of the classification table.

use std::fmt::Write as _;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atlas::SurfaceFamily;
use crate::cech::{stabilize, Sheaf};
use crate::elliptic::EllipticParams;
use crate::error::Result;
use crate::exactalg::Rat;
use crate::poissonco::{poisson_cohomology, verdict_report, CoefficientClass, PoissonStructure, Verdict};

use super::RunConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub family: String,
    pub class: String,
    pub n: Option<u32>,
    pub hp: [usize; 3],
    pub verdict: Verdict,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_verified: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
    pub config: RunConfig,
    #[serde(skip)]
    pub mismatches: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str("| family | class | n | HP0 | HP1 | HP2 | verdict | certified |\n");
        s.push_str("|---|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let n = r.n.map_or_else(|| "-".to_string(), |n| n.to_string());
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                r.family, r.class, n, r.hp[0], r.hp[1], r.hp[2], r.verdict, r.certified
            );
        }
        s
    }
}

#[derive(Deserialize)]
struct Golden {
    rows: Vec<TableRow>,
}

/// Differences against a stored table, ignoring witness text.
pub fn diff_golden(rows: &[TableRow], golden_json: &str) -> Result<Vec<String>> {
    let golden: Golden =
        serde_json::from_str(golden_json).map_err(|e| crate::Error::Parse(format!("golden file: {}", e)))?;
    let key = |r: &TableRow| (r.family.clone(), r.class.clone(), r.n, r.hp, r.verdict, r.certified);
    let mut out = Vec::new();
    if golden.rows.len() != rows.len() {
        out.push(format!("row count: golden {} vs computed {}", golden.rows.len(), rows.len()));
    }
    for (g, r) in golden.rows.iter().zip(rows) {
        if key(g) != key(r) {
            out.push(format!("golden {:?}\n   got {:?}", key(g), key(r)));
        }
    }
    Ok(out)
}

fn sample_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(rng.gen_range(1..=97i64).into(), rng.gen_range(1..=97i64).into())
}

struct RowSpec {
    family: SurfaceFamily,
    label: &'static str,
    class: CoefficientClass,
    n: Option<u32>,
}

fn row_specs(cfg: &RunConfig, e: &EllipticParams, t0: Rat) -> Result<Vec<RowSpec>> {
    use CoefficientClass::*;
    let spec = |family, label, class, n| RowSpec { family, label, class, n };
    let mut v = vec![
        spec(SurfaceFamily::s0(e.clone()), "S0", S0Zero, None),
        spec(SurfaceFamily::s0(e.clone()), "S0", S0Nonzero, None),
        spec(SurfaceFamily::twisted(t0, e.clone())?, "twisted", TwistedAny, None),
    ];
    for n in 1..=cfg.n_max {
        v.push(spec(SurfaceFamily::sn(n, e.clone())?, "Sn", SnZero, Some(n)));
    }
    v.push(spec(SurfaceFamily::sn(1, e.clone())?, "Sn", S1A0ZeroC0Nonzero, Some(1)));
    for n in 2..=cfg.n_max {
        v.push(spec(SurfaceFamily::sn(n, e.clone())?, "Sn", SnA0ZeroANonzero, Some(n)));
    }
    for n in 1..=cfg.n_max {
        v.push(spec(SurfaceFamily::sn(n, e.clone())?, "Sn", SnA0Nonzero, Some(n)));
    }
    v.push(spec(SurfaceFamily::a0(e.clone()), "A0", A0Any, None));
    v.push(spec(SurfaceFamily::aminus1(e.clone()), "A-1", Aminus1Zero, None));
    Ok(v)
}

/// A generic member of `class` on `family`.
pub fn sample_structure(family: &SurfaceFamily, class: CoefficientClass, rng: &mut ChaCha8Rng) -> Result<PoissonStructure> {
    use CoefficientClass::*;
    let arity = crate::poissonco::param_names(family).len();
    let mut c: Vec<Rat> = (0..arity).map(|_| sample_rat(rng)).collect();
    match class {
        S0Zero | SnZero | Aminus1Zero => c.iter_mut().for_each(|x| *x = Rat::zero()),
        S1A0ZeroC0Nonzero | SnA0ZeroANonzero => c[0] = Rat::zero(),
        _ => {}
    }
    PoissonStructure::new(family.clone(), c)
}

pub fn cmd_table(cfg: &RunConfig) -> Result<TableReport> {
    let e = cfg.elliptic()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t0 = sample_rat(&mut rng);
    let specs = row_specs(cfg, &e, t0)?;
    let samples: Vec<Vec<PoissonStructure>> = specs
        .iter()
        .map(|s| {
            let k = if matches!(s.class, CoefficientClass::S0Zero | CoefficientClass::SnZero | CoefficientClass::Aminus1Zero) {
                1
            } else {
                cfg.samples
            };
            (0..k).map(|_| sample_structure(&s.family, s.class, &mut rng)).collect()
        })
        .collect::<Result<_>>()?;

    let results: Vec<Result<(TableRow, Vec<String>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .zip(&samples)
            .map(|(s, ps)| scope.spawn(move || evaluate_row(cfg, s, ps)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("row worker panicked")).collect()
    });
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for r in results {
        let (row, m) = r?;
        rows.push(row);
        mismatches.extend(m);
    }
    Ok(TableReport { rows, config: cfg.clone(), mismatches })
}

fn evaluate_row(cfg: &RunConfig, spec: &RowSpec, samples: &[PoissonStructure]) -> Result<(TableRow, Vec<String>)> {
    let tr = cfg.truncation_for(&spec.family)?;
    let (want_hp, want_verdict) = spec.class.expected(spec.n.unwrap_or(1));
    let mut certified = true;
    for sheaf in [Sheaf::Theta, Sheaf::Wedge2Theta] {
        certified &= stabilize(&spec.family, sheaf, &tr)?.certified;
    }
    let mut mismatches = Vec::new();
    let mut first: Option<TableRow> = None;
    for p in samples {
        let class = p.class();
        let hp = poisson_cohomology(p, &tr)?.hp;
        let rep = verdict_report(p, &tr)?;
        let row = TableRow {
            family: spec.label.to_string(),
            class: spec.class.label().to_string(),
            n: spec.n,
            hp,
            verdict: rep.verdict,
            certified,
            witness: rep.witness.as_ref().map(|w| w.to_string()),
            family_verified: rep.family_verified,
        };
        if class != spec.class || hp != want_hp || rep.verdict != want_verdict {
            mismatches.push(format!(
                "{} {} n={:?} at {}: expected {:?} {}, got {:?} {} (class {:?})",
                row.family, row.class, row.n, p, want_hp, want_verdict, hp, rep.verdict, class
            ));
        }
        first.get_or_insert(row);
    }
    if !certified {
        mismatches.push(format!("{} {} n={:?}: stabilization not certified at {}", spec.label, spec.class.label(), spec.n, tr));
    }
    Ok((first.expect("at least one sample"), mismatches))
}

/// The published table, used to seed golden files and as a test oracle.
pub fn expected_rows(n_max: u32) -> Vec<(String, String, Option<u32>, [usize; 3], Verdict)> {
    let cfg = RunConfig { n_max, ..RunConfig::default() };
    let e = EllipticParams::default();
    row_specs(&cfg, &e, Rat::from_integer(1.into()))
        .expect("default rows")
        .into_iter()
        .map(|s| {
            let (hp, v) = s.class.expected(s.n.unwrap_or(1));
            (s.label.to_string(), s.class.label().to_string(), s.n, hp, v)
        })
        .collect()
}
