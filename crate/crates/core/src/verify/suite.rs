use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::band::{BandConfig, RatioBandResult};
use super::checks::*;
use super::family::{geometric_schedule, FamilySpec};
use crate::error::{invalid, Error, Result};
use crate::funcspace::HoloFunction;
use crate::geometry::Aperture;
use crate::norms::SpaceParams;

/// What an experiment runs, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    PairingIdentity {
        dims: Vec<usize>,
        alphas: Vec<f64>,
        max_degree: usize,
        tol: f64,
    },
    FracOracle {
        cases: Vec<(usize, f64, f64)>,
        kmax: usize,
        degree: usize,
        trials: usize,
    },
    Reproducing {
        dims: Vec<usize>,
        betas: Vec<f64>,
        points: usize,
        tol: f64,
    },
    ForelliRudin {
        n: usize,
        t: f64,
        s: Vec<f64>,
        min_gap: f64,
    },
    FrGeneral {
        n: usize,
        s: f64,
        r: f64,
        t: f64,
        branch: FrBranch,
        approach: Approach,
        min_gap: f64,
    },
    ApproachBound {
        n: usize,
        s: f64,
        lambda: f64,
        gamma: f64,
        measure: ApproachMeasure,
    },
    SliceMeasure {
        dims: Vec<usize>,
        gamma: f64,
        max_gap: f64,
        min_gap: f64,
    },
    Equivalence {
        theorem: Theorem,
        params: Vec<EquivalenceParams>,
        family: FamilySpec,
    },
    Projection {
        n: usize,
        p: f64,
        q: f64,
        alpha: f64,
        count: usize,
        max_degree: usize,
    },
    UnboundedProjection {
        n: usize,
        p: f64,
        alpha: f64,
        min_gap: f64,
    },
    Dilation {
        n: usize,
        p: f64,
        q: f64,
        alpha: f64,
        family: FamilySpec,
        radii: Vec<f64>,
        c_max: f64,
    },
    Duality {
        variant: DualityVariant,
        n: usize,
        p: f64,
        q: f64,
        alpha: f64,
        family: FamilySpec,
        dual_family: FamilySpec,
        #[serde(default = "default_dual_t")]
        dual_t: f64,
    },
    CarlesonRoutes {
        n: usize,
        q: f64,
        alpha: f64,
        exponents: Vec<f64>,
        family: FamilySpec,
    },
    Lattice {
        n: usize,
        r: f64,
        eps: f64,
        samples: usize,
        max_obs: usize,
    },
    Neumann {
        function: HoloFunction<f64>,
        r: f64,
        lattice_eps: f64,
        theta: f64,
        alpha: f64,
        max_iter: usize,
        tol: f64,
        max_ratio: f64,
    },
}

fn default_dual_t() -> f64 {
    1.0
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::PairingIdentity { .. } => "pairing_identity",
            ExperimentSpec::FracOracle { .. } => "frac_oracle",
            ExperimentSpec::Reproducing { .. } => "reproducing",
            ExperimentSpec::ForelliRudin { .. } => "forelli_rudin",
            ExperimentSpec::FrGeneral { .. } => "fr_general",
            ExperimentSpec::ApproachBound { .. } => "approach_bound",
            ExperimentSpec::SliceMeasure { .. } => "slice_measure",
            ExperimentSpec::Equivalence { .. } => "equivalence",
            ExperimentSpec::Projection { .. } => "projection",
            ExperimentSpec::UnboundedProjection { .. } => "unbounded_projection",
            ExperimentSpec::Dilation { .. } => "dilation",
            ExperimentSpec::Duality { .. } => "duality",
            ExperimentSpec::CarlesonRoutes { .. } => "carleson_routes",
            ExperimentSpec::Lattice { .. } => "lattice",
            ExperimentSpec::Neumann { .. } => "neumann",
        }
    }
}

/// One named experiment; unset band, resolution and seed fall back to the
/// suite defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub name: String,
    #[serde(flatten)]
    pub spec: ExperimentSpec,
    #[serde(default)]
    pub band: Option<BandConfig>,
    #[serde(default)]
    pub resolution: Option<Resolution>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Experiment {
    pub fn new(name: &str, spec: ExperimentSpec) -> Self {
        Self {
            name: name.into(),
            spec,
            band: None,
            resolution: None,
            seed: None,
        }
    }

    pub fn with_band(mut self, band: f64) -> Self {
        self.band = Some(self.band.unwrap_or_default().with_band(band));
        self
    }

    pub fn without_slope(mut self) -> Self {
        self.band = Some(self.band.unwrap_or_default().without_slope());
        self
    }
}

/// Parameters of the duality table written next to the report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub n: usize,
    pub alpha: f64,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self { n: 1, alpha: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bands: BandConfig,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub table: Option<TableSpec>,
    pub experiments: Vec<Experiment>,
}

impl Suite {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Keeps only the named experiments, in suite order.
    pub fn select(mut self, names: &[String]) -> Result<Self> {
        if let Some(missing) = names.iter().find(|n| !self.experiments.iter().any(|e| &e.name == *n)) {
            return Err(invalid(format!("no experiment named {missing}")));
        }
        self.experiments.retain(|e| names.contains(&e.name));
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub kind: String,
    pub outcome: Outcome,
    /// Failed hypothesis, numerical error or the first offending member.
    pub reason: Option<String>,
    pub seed: u64,
    pub params: Value,
    /// Headline numbers, sorted by key.
    pub metrics: BTreeMap<String, f64>,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub experiments: Vec<ExperimentResult>,
    pub table: Vec<TableCell>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.experiments.iter().filter(|e| e.outcome == Outcome::Fail).count()
    }

    pub fn get(&self, name: &str) -> Option<&ExperimentResult> {
        self.experiments.iter().find(|e| e.name == name)
    }
}

struct Verdict {
    pass: bool,
    reason: Option<String>,
    metrics: BTreeMap<String, f64>,
    details: Value,
}

fn to_value<S: Serialize>(x: &S) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn band_metrics(prefix: &str, b: &RatioBandResult, m: &mut BTreeMap<String, f64>) {
    m.insert(format!("{prefix}min"), b.min);
    m.insert(format!("{prefix}max"), b.max);
    m.insert(format!("{prefix}spread"), b.spread);
    m.insert(format!("{prefix}slope"), b.slope);
}

fn band_reason(b: &RatioBandResult) -> Option<String> {
    if b.pass {
        return None;
    }
    Some(match &b.offending {
        Some(o) => format!("member {} (param {:.3e}, ratio {:.4e}): {}", o.index, o.param, o.ratio, o.reason),
        None => "empty family".into(),
    })
}

fn bands(results: Vec<(String, RatioBandResult)>) -> Verdict {
    let mut metrics = BTreeMap::new();
    let single = results.len() == 1;
    let mut reason = None;
    for (label, b) in &results {
        let prefix = if single { String::new() } else { format!("{label}.") };
        band_metrics(&prefix, b, &mut metrics);
        if reason.is_none() {
            reason = band_reason(b).map(|r| if single { r } else { format!("{label}: {r}") });
        }
    }
    let details: BTreeMap<String, Value> = results.iter().map(|(l, b)| (l.clone(), to_value(b))).collect();
    Verdict {
        pass: results.iter().all(|(_, b)| b.pass),
        reason,
        metrics,
        details: to_value(&details),
    }
}

fn verdict<S: Serialize>(pass: bool, reason: Option<String>, metrics: &[(&str, f64)], details: &S) -> Verdict {
    Verdict {
        pass,
        reason: if pass { None } else { reason },
        metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        details: to_value(details),
    }
}

/// Tolerance for ratios that are exactly 1 up to rounding.
const IDENTITY_TOL: f64 = 1e-9;

fn run_spec(spec: &ExperimentSpec, seed: u64, res: &Resolution, cfg: &BandConfig) -> Result<Verdict> {
    Ok(match spec {
        ExperimentSpec::PairingIdentity { dims, alphas, max_degree, tol } => {
            let r = check_pairing_identity(dims, alphas, *max_degree, *tol, res)?;
            verdict(
                r.pass,
                Some(format!("max relative error {:.3e}, spot value {:.12}", r.max_rel_error, r.spot_value)),
                &[("max_rel_error", r.max_rel_error), ("spot_value", r.spot_value)],
                &r,
            )
        }
        ExperimentSpec::FracOracle { cases, kmax, degree, trials } => {
            let r = check_frac_oracle(cases, *kmax, *degree, *trials, seed)?;
            verdict(
                r.pass,
                Some(format!("multiplier error {:.3e}, round trip error {:.3e}", r.max_multiplier_error, r.max_round_trip_error)),
                &[("max_multiplier_error", r.max_multiplier_error), ("max_round_trip_error", r.max_round_trip_error)],
                &r,
            )
        }
        ExperimentSpec::Reproducing { dims, betas, points, tol } => {
            let r = check_reproducing(dims, betas, *points, *tol, seed, res)?;
            verdict(
                r.pass,
                Some(format!("exact error {:.3e}, numeric error {:.3e}", r.exact_error, r.numeric_error)),
                &[("exact_error", r.exact_error), ("numeric_error", r.numeric_error)],
                &r,
            )
        }
        ExperimentSpec::ForelliRudin { n, t, s, min_gap } => {
            let gaps = geometric_schedule(0.5, *min_gap);
            let mut out = Vec::new();
            for &si in s {
                out.push((format!("s={si}"), check_forelli_rudin(*n, *t, si, &gaps, res, cfg)?));
            }
            bands(out)
        }
        ExperimentSpec::FrGeneral { n, s, r, t, branch, approach, min_gap } => {
            let gaps = geometric_schedule(0.5, *min_gap);
            bands(vec![("fr".into(), check_fr_general(*n, *s, *r, *t, *branch, *approach, &gaps, res, cfg)?)])
        }
        ExperimentSpec::ApproachBound { n, s, lambda, gamma, measure } => {
            let r = check_approach_bound(*n, *s, *lambda, *gamma, measure, res, cfg)?;
            let mut v = bands(vec![("gamma".into(), r.band.clone())]);
            v.metrics.insert("converse_bound".into(), r.converse_bound);
            if r.band.pass && !r.converse_ok {
                v.reason = Some(format!("a ratio falls below the converse bound {:.4e}", r.converse_bound));
            }
            v.pass = r.pass;
            v.details = to_value(&r);
            v
        }
        ExperimentSpec::SliceMeasure { dims, gamma, max_gap, min_gap } => {
            let gaps = geometric_schedule(*max_gap, *min_gap);
            let mut out = Vec::new();
            for &n in dims {
                out.push((format!("n={n}"), check_slice_measure(n, *gamma, &gaps, res, cfg)?));
            }
            bands(out)
        }
        ExperimentSpec::Equivalence { theorem, params, family } => {
            let mut out = Vec::new();
            for ep in params {
                let fam = family.build(ep.n, seed)?;
                let label = format!("p={:.4},q={},alpha={},t={}", ep.p, ep.q, ep.alpha, ep.t);
                let mut b = check_equivalence(*theorem, ep, &fam, res, cfg)?;
                if *theorem == Theorem::HTchar && ep.t == 0.0 {
                    // R^{s,0} is the identity, so the ratio must be 1
                    if let Some((i, r)) = b.ratios.iter().enumerate().find(|(_, r)| (*r - 1.0).abs() > IDENTITY_TOL) {
                        b.pass = false;
                        b.offending = Some(super::band::Offender {
                            index: i,
                            param: b.params[i],
                            ratio: *r,
                            reason: format!("identity case deviates from 1 by more than {IDENTITY_TOL:e}"),
                        });
                    }
                }
                out.push((label, b));
            }
            bands(out)
        }
        ExperimentSpec::Projection { n, p, q, alpha, count, max_degree } => {
            let (est, band) = check_projection(*n, *p, *q, *alpha, *count, *max_degree, seed, res, cfg)?;
            verdict(
                band.pass,
                Some(format!("operator estimate {:.4e} exceeds {}", est.estimate, cfg.band)),
                &[("estimate", est.estimate)],
                &est,
            )
        }
        ExperimentSpec::UnboundedProjection { n, p, alpha, min_gap } => {
            let gaps = geometric_schedule(0.5, *min_gap);
            let r = check_unbounded_projection(*n, *p, *alpha, &gaps, res)?;
            verdict(
                r.pass,
                Some(format!(
                    "growth {:.4} below {} (trend slope {:.4}); {}",
                    r.growth, r.required_growth, r.trend_slope, r.label
                )),
                &[("growth", r.growth), ("trend_slope", r.trend_slope)],
                &r,
            )
        }
        ExperimentSpec::Dilation { n, p, q, alpha, family, radii, c_max } => {
            let sp = SpaceParams::new(*n, *p, *q, *alpha, Aperture::default())?;
            let fam = family.build(*n, seed)?;
            let r = check_dilation(&fam, &sp, radii, *c_max, res)?;
            let reason = if !r.monotone {
                "distance to f does not decrease with r".to_string()
            } else {
                format!("ratio {:.4} exceeds {}", r.max_ratio, r.c_max)
            };
            verdict(r.pass, Some(reason), &[("max_ratio", r.max_ratio)], &r)
        }
        ExperimentSpec::Duality { variant, n, p, q, alpha, family, dual_family, dual_t } => {
            let sp = SpaceParams::new(*n, *p, *q, *alpha, Aperture::default())?;
            let f = family.build(*n, seed)?;
            let g = dual_family.build(*n, seed)?;
            let r = check_duality_pairing(*variant, &sp, &f, &g, *dual_t, res, cfg)?;
            let mut v = bands(vec![("upper".into(), r.upper.clone()), ("lower".into(), r.lower.clone())]);
            v.metrics.insert("excluded_pairs".into(), r.excluded_pairs as f64);
            v.details = to_value(&r);
            v
        }
        ExperimentSpec::CarlesonRoutes { n, q, alpha, exponents, family } => {
            let fam = family.build(*n, seed)?;
            bands(vec![("carleson".into(), check_carleson_routes(&fam, *q, *alpha, exponents, res, cfg)?)])
        }
        ExperimentSpec::Lattice { n, r, eps, samples, max_obs } => {
            let l = check_lattice(*n, *r, *eps, *samples, *max_obs, seed)?;
            let reason = format!(
                "covering {} (radius {:.4}), separation {:.4} vs {:.4}, N_obs {} vs {}",
                l.covering_ok,
                l.covering_radius,
                l.min_separation,
                r / 2.0,
                l.n_obs,
                l.max_obs
            );
            verdict(
                l.pass,
                Some(reason),
                &[
                    ("points", l.points as f64),
                    ("n_obs", l.n_obs as f64),
                    ("covering_radius", l.covering_radius),
                    ("min_separation", l.min_separation),
                ],
                &l,
            )
        }
        ExperimentSpec::Neumann { function, r, lattice_eps, theta, alpha, max_iter, tol, max_ratio } => {
            let s = check_neumann(function, *r, *lattice_eps, *theta, *alpha, *max_iter, *tol, *max_ratio, seed)?;
            let last = s.residuals.last().copied().unwrap_or(f64::NAN);
            let reason = match s.iterations {
                None => format!("residual {last:.3e} still above {} after {} iterations", s.tol, s.residuals.len()),
                Some(_) => format!("successive residual ratio {:.4} not below the limit", s.max_ratio),
            };
            verdict(
                s.pass,
                Some(reason),
                &[
                    ("iterations", s.iterations.map_or(f64::NAN, |k| k as f64)),
                    ("final_residual", last),
                    ("max_ratio", s.max_ratio),
                ],
                &s,
            )
        }
    })
}

/// Runs one experiment; failed hypotheses are reported as skipped.
pub fn run_experiment(e: &Experiment, index: usize, suite: &Suite) -> ExperimentResult {
    let seed = e.seed.unwrap_or_else(|| suite.seed.wrapping_add(index as u64));
    let res = e.resolution.clone().unwrap_or_else(|| suite.resolution.clone());
    let cfg = e.band.unwrap_or(suite.bands);
    let params = to_value(&e.spec);
    let base = |outcome, reason: Option<String>| ExperimentResult {
        name: e.name.clone(),
        kind: e.spec.kind().into(),
        outcome,
        reason,
        seed,
        params: params.clone(),
        metrics: BTreeMap::new(),
        details: Value::Null,
    };
    match run_spec(&e.spec, seed, &res, &cfg) {
        Ok(v) => ExperimentResult {
            metrics: v.metrics,
            details: v.details,
            ..base(if v.pass { Outcome::Pass } else { Outcome::Fail }, v.reason)
        },
        Err(Error::Hypothesis(msg)) => base(Outcome::Skipped, Some(format!("hypothesis not met: {msg}"))),
        Err(err) => base(Outcome::Fail, Some(err.to_string())),
    }
}

/// Runs every experiment (in parallel) and the duality table.
pub fn run_suite(suite: &Suite) -> Result<Report> {
    let experiments = suite
        .experiments
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_experiment(e, i, suite))
        .collect();
    let table = match suite.table {
        Some(t) => duality_table(t.n, t.alpha)?,
        None => Vec::new(),
    };
    Ok(Report {
        seed: suite.seed,
        experiments,
        table,
    })
}

fn fmt_metric(x: f64) -> String {
    format!("{x:.6e}")
}

/// `report.json`, `report.csv` (one row per experiment) and, when a table
/// was computed, `table.csv`. Returns the written paths.
pub fn emit_report(dir: &Path, report: &Report) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json_path = dir.join("report.json");
    fs::write(&json_path, serde_json::to_string_pretty(report)? + "\n")?;
    written.push(json_path);

    let csv_path = dir.join("report.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["name", "kind", "outcome", "seed", "metrics", "reason"])?;
    for e in &report.experiments {
        let metrics = e.metrics.iter().map(|(k, v)| format!("{k}={}", fmt_metric(*v))).collect::<Vec<_>>().join(";");
        w.write_record([
            e.name.as_str(),
            e.kind.as_str(),
            e.outcome.as_str(),
            &e.seed.to_string(),
            &metrics,
            e.reason.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    written.push(csv_path);

    if !report.table.is_empty() {
        let table_path = dir.join("table.csv");
        let mut w = csv::Writer::from_path(&table_path)?;
        w.write_record(["p", "q", "dual", "weight_exponent", "limit_pairing", "pairing_error", "pass"])?;
        for c in &report.table {
            w.write_record([
                c.p.to_string(),
                c.q.to_string(),
                c.dual.clone(),
                c.weight_exponent.to_string(),
                c.limit_pairing.to_string(),
                fmt_metric(c.pairing_error),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        written.push(table_path);
    }
    Ok(written)
}

fn atoms(exponent: f64, min_gap: f64) -> FamilySpec {
    FamilySpec::Atoms { exponent, min_gap }
}

fn polys(count: usize) -> FamilySpec {
    FamilySpec::Polynomials { count, max_degree: 8 }
}

fn ep(n: usize, p: f64, q: f64, alpha: f64, s: f64, t: f64) -> EquivalenceParams {
    EquivalenceParams {
        n,
        p,
        q,
        alpha,
        s,
        t,
        s2: 0.0,
        t2: 0.0,
        gamma: 2.0,
    }
}

/// Names of the acceptance experiments, in order.
pub const ACCEPTANCE: [&str; 13] = [
    "pairing_identity",
    "frac_oracle",
    "reproducing_kernel",
    "forelli_rudin",
    "slice_measure",
    "ht_characterization",
    "area_function",
    "lattice",
    "neumann",
    "duality_pairing",
    "projection_unbounded",
    "dilation",
    "carleson_routes",
];

/// The default acceptance suite.
pub fn acceptance_suite(seed: u64) -> Suite {
    use ExperimentSpec as S;
    let neumann_f = {
        let mut p = crate::funcspace::TaylorPoly::zero(1);
        p.add_term(crate::funcspace::MultiIndex::zeros(1), num_complex::Complex::new(1.0, 0.0));
        p.add_term(crate::funcspace::MultiIndex::axis(1, 0, 1), num_complex::Complex::new(1.0, 0.0));
        p.add_term(crate::funcspace::MultiIndex::axis(1, 0, 2), num_complex::Complex::new(0.5, 0.0));
        HoloFunction::from_poly(p)
    };
    let experiments = vec![
        Experiment::new(
            ACCEPTANCE[0],
            S::PairingIdentity {
                dims: vec![1, 2],
                alphas: vec![-0.5, 0.0, 1.0],
                max_degree: 6,
                tol: 1e-6,
            },
        ),
        Experiment::new(
            ACCEPTANCE[1],
            S::FracOracle {
                cases: vec![(1, 0.0, 1.0), (1, -0.5, 2.0), (2, 0.0, 1.5)],
                kmax: 30,
                degree: 10,
                trials: 5,
            },
        ),
        Experiment::new(
            ACCEPTANCE[2],
            S::Reproducing {
                dims: vec![1, 2],
                betas: vec![0.0, 1.0],
                points: 10,
                tol: 1e-4,
            },
        ),
        Experiment::new(
            ACCEPTANCE[3],
            S::ForelliRudin {
                n: 1,
                t: 0.0,
                s: vec![0.5, 1.0, 3.0],
                min_gap: 1e-3,
            },
        ),
        Experiment::new(
            ACCEPTANCE[4],
            S::SliceMeasure {
                dims: vec![1, 2],
                gamma: 2.0,
                max_gap: 0.7,
                min_gap: 1e-3,
            },
        )
        .with_band(20.0),
        Experiment::new(
            ACCEPTANCE[5],
            S::Equivalence {
                theorem: Theorem::HTchar,
                params: vec![
                    ep(1, 2.0, 2.0, 0.0, 0.0, 1.0),
                    ep(1, 4.0 / 3.0, 2.0, 0.0, 0.0, 1.0),
                    ep(1, 2.0, 1.0, 0.0, 0.0, 1.0),
                    ep(1, 2.0, 2.0, 0.0, 0.0, 0.0),
                ],
                family: atoms(2.0, 1e-3),
            },
        )
        .with_band(50.0),
        Experiment::new(
            ACCEPTANCE[6],
            S::Equivalence {
                theorem: Theorem::Area,
                params: vec![ep(1, 2.0, 2.0, 0.0, 0.0, 1.0)],
                family: FamilySpec::Union {
                    parts: vec![polys(5), atoms(2.0, 1e-3)],
                },
            },
        )
        .with_band(50.0),
        Experiment::new(
            ACCEPTANCE[7],
            S::Lattice {
                n: 1,
                r: 0.3,
                eps: 0.02,
                samples: 10_000,
                max_obs: 64,
            },
        ),
        Experiment::new(
            ACCEPTANCE[8],
            S::Neumann {
                function: neumann_f,
                r: 0.15,
                lattice_eps: 0.02,
                theta: 4.0,
                alpha: 0.0,
                max_iter: 25,
                tol: 1e-4,
                max_ratio: 0.9,
            },
        ),
        Experiment::new(
            ACCEPTANCE[9],
            S::Duality {
                variant: DualityVariant::Duality,
                n: 1,
                p: 2.0,
                q: 2.0,
                alpha: 0.0,
                family: FamilySpec::BergmanKernels { beta: 1.0, min_gap: 1e-2 },
                dual_family: FamilySpec::BergmanKernels { beta: 1.0, min_gap: 1e-2 },
                dual_t: 1.0,
            },
        )
        .with_band(20.0),
        Experiment::new(
            ACCEPTANCE[10],
            S::UnboundedProjection {
                n: 1,
                p: 2.0,
                alpha: 0.0,
                min_gap: 1e-2,
            },
        ),
        Experiment::new(
            ACCEPTANCE[11],
            S::Dilation {
                n: 1,
                p: 2.0,
                q: 1.0,
                alpha: 0.0,
                family: FamilySpec::Union {
                    parts: vec![
                        polys(4),
                        FamilySpec::TruncatedAtoms {
                            exponent: 2.0,
                            gaps: vec![0.5, 0.1, 0.02],
                            degree: 60,
                        },
                    ],
                },
                radii: vec![0.9, 0.99, 0.999],
                c_max: 5.0,
            },
        ),
        Experiment::new(
            ACCEPTANCE[12],
            S::CarlesonRoutes {
                n: 1,
                q: 2.0,
                alpha: 0.0,
                exponents: vec![1.0, 2.0, 4.0],
                family: FamilySpec::Union {
                    parts: vec![polys(5), atoms(1.0, 0.03)],
                },
            },
        )
        .with_band(20.0)
        .without_slope(),
    ];
    Suite {
        seed,
        bands: BandConfig::default(),
        resolution: Resolution::default(),
        table: Some(TableSpec::default()),
        experiments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_suite() -> Suite {
        Suite {
            seed: 7,
            bands: BandConfig::default(),
            resolution: Resolution::default(),
            table: Some(TableSpec::default()),
            experiments: vec![
                Experiment::new(
                    "fr",
                    ExperimentSpec::ForelliRudin {
                        n: 1,
                        t: 0.0,
                        s: vec![1.0],
                        min_gap: 0.1,
                    },
                ),
                Experiment::new(
                    "bad_fr",
                    ExperimentSpec::ForelliRudin {
                        n: 1,
                        t: 0.0,
                        s: vec![-1.0],
                        min_gap: 0.1,
                    },
                ),
                Experiment::new(
                    "frac",
                    ExperimentSpec::FracOracle {
                        cases: vec![(1, 0.0, 1.0)],
                        kmax: 10,
                        degree: 5,
                        trials: 1,
                    },
                ),
            ],
        }
    }

    #[test]
    fn outcomes_and_skips() {
        let r = run_suite(&tiny_suite()).unwrap();
        assert_eq!(r.experiments.len(), 3);
        assert_eq!(r.get("fr").unwrap().outcome, Outcome::Pass);
        let bad = r.get("bad_fr").unwrap();
        assert_eq!(bad.outcome, Outcome::Skipped);
        assert!(bad.reason.as_deref().unwrap().contains("s > 0"));
        assert_eq!(r.get("frac").unwrap().seed, 9);
        assert_eq!(r.failures(), 0);
        assert_eq!(r.table.len(), 6);
    }

    #[test]
    fn suite_round_trips_through_json() {
        let s = acceptance_suite(3);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(Suite::from_json(&text).unwrap(), s);
        assert!(text.contains("\"kind\":\"unbounded_projection\""));
        let sub = s.select(&["lattice".to_string()]).unwrap();
        assert_eq!(sub.experiments.len(), 1);
        assert!(acceptance_suite(3).select(&["nope".to_string()]).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let dir = std::env::temp_dir().join(format!("holotent-suite-{}", std::process::id()));
        let a = emit_report(&dir.join("a"), &run_suite(&tiny_suite()).unwrap()).unwrap();
        let b = emit_report(&dir.join("b"), &run_suite(&tiny_suite()).unwrap()).unwrap();
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let csv = fs::read_to_string(&a[1]).unwrap();
        assert!(csv.lines().next().unwrap().starts_with("name,kind,outcome"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
