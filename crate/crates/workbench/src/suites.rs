//! Property suites over random curvature instances.
//!
//! Each suite expands into cases `(n, k, instance)`; cases run in parallel
//! and are reassembled in case-id order, so a report depends only on the
//! configuration. A record passes iff `margin ≥ −tolerance`; equalities are
//! recorded with margin `−|lhs − rhs|`.

use std::time::Instant;

use kricci_core::certify::{global_extreme, shift_to_ric_k_upper, CertifyOptions};
use kricci_core::curvature::{hsc, ricci_trace, scalar, Which};
use kricci_core::forms::{b_form, BihermitianForm, HermitianForm};
use kricci_core::lemmas::{berger_check, interpolation_check, max_eigenvalue_rel, ric_scalar_matrix};
use kricci_core::random::{
    random_bihermitian, random_hermitian, random_metric, random_unit_vector, rng_for_stream, WorkRng,
};
use kricci_core::royden::{mixed_curvature_lambda, mixed_trace_bounds, royden_identity_check, MixedParams};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::formats::LoadedTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Royden,
    Interpolation,
    MixedTrace,
    RicScalar,
    Berger,
    RigidityModel,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Royden,
        Suite::Interpolation,
        Suite::MixedTrace,
        Suite::RicScalar,
        Suite::Berger,
        Suite::RigidityModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Royden => "royden",
            Suite::Interpolation => "interpolation",
            Suite::MixedTrace => "mixed-trace",
            Suite::RicScalar => "ric-scalar",
            Suite::Berger => "berger",
            Suite::RigidityModel => "rigidity-model",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite {s:?}")))
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Royden => 1e-10,
            Suite::Interpolation | Suite::MixedTrace | Suite::RicScalar => 1e-8,
            Suite::Berger => 0.0,
            Suite::RigidityModel => 1e-12,
        }
    }

    fn uses_k(self) -> bool {
        matches!(self, Suite::Interpolation | Suite::RicScalar | Suite::RigidityModel)
    }

    fn accepts(self, n: usize, k: usize) -> bool {
        match self {
            Suite::RicScalar => k > 1 && k <= n,
            s if s.uses_k() => k >= 1 && k <= n,
            _ => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub dims: Vec<usize>,
    pub ks: Vec<usize>,
    /// Random instances per `(n, k)`; ignored when `instances` is given.
    pub count: usize,
    pub seed: u64,
    pub tolerance: Option<f64>,
    /// `σ` in `Ric_k ≤ −(k+1)σ` for the shifted and model suites.
    pub sigma: f64,
    /// Monte Carlo samples per berger case.
    pub samples: usize,
    pub instances: Option<Vec<LoadedTensor>>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            dims: vec![2, 3],
            ks: vec![1, 2, 3],
            count: 10,
            seed: 0,
            tolerance: None,
            sigma: 1.0,
            samples: 100_000,
            instances: None,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(self.suite.default_tolerance())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CaseRecord {
    pub case_id: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub lemma: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub tolerance: f64,
    pub tolerance_overridden: bool,
    pub cases: usize,
    pub records: usize,
    pub pass_count: usize,
    pub fail_count: usize,
    pub worst_margin: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub records: Vec<CaseRecord>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.fail_count == 0
    }

    /// One JSON object per record followed by the summary, each tagged with
    /// `"type"`.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            let mut v = serde_json::to_value(r)?;
            v["type"] = "case".into();
            out.push_str(&serde_json::to_string(&v)?);
            out.push('\n');
        }
        let mut v = serde_json::to_value(&self.summary)?;
        v["type"] = "summary".into();
        out.push_str(&serde_json::to_string(&v)?);
        out.push('\n');
        Ok(out)
    }
}

struct Case {
    id: usize,
    n: usize,
    k: Option<usize>,
    /// Index into the loaded instances, or the random instance number.
    instance: usize,
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    tol: f64,
}

impl Ctx<'_> {
    fn rng(&self, case: &Case) -> WorkRng {
        rng_for_stream(self.cfg.seed, case.id as u64)
    }

    /// The case's form and metric, consuming the first draws of `rng` when
    /// random.
    fn instance(&self, case: &Case, rng: &mut WorkRng) -> (BihermitianForm, HermitianForm) {
        match &self.cfg.instances {
            Some(list) => {
                let t = &list[case.instance];
                (t.form.clone(), t.metric.clone())
            }
            None => {
                let s = random_bihermitian(case.n, rng);
                let h = random_metric(case.n, rng);
                (s, h)
            }
        }
    }

    fn certify_opts(&self, case: &Case) -> CertifyOptions {
        CertifyOptions { seed: self.cfg.seed ^ ((case.id as u64) << 20), ..CertifyOptions::default() }
    }

    fn inequality(&self, case: &Case, lemma: &str, lhs: f64, rhs: f64) -> CaseRecord {
        let margin = rhs - lhs;
        CaseRecord {
            case_id: case.id,
            n: case.n,
            k: case.k,
            lemma: lemma.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            pass: margin >= -self.tol,
            error: None,
        }
    }

    fn equality(&self, case: &Case, lemma: &str, lhs: f64, rhs: f64) -> CaseRecord {
        let margin = -(lhs - rhs).abs();
        CaseRecord { margin: Some(margin), pass: margin >= -self.tol, ..self.inequality(case, lemma, lhs, rhs) }
    }

    fn failure(&self, case: &Case, lemma: &str, err: impl ToString) -> CaseRecord {
        CaseRecord {
            case_id: case.id,
            n: case.n,
            k: case.k,
            lemma: lemma.into(),
            lhs: None,
            rhs: None,
            margin: None,
            pass: false,
            error: Some(err.to_string()),
        }
    }

    fn run(&self, case: &Case) -> Vec<CaseRecord> {
        let suite = self.cfg.suite;
        match self.run_inner(case) {
            Ok(v) => v,
            Err(e) => vec![self.failure(case, suite.name(), e)],
        }
    }

    fn run_inner(&self, case: &Case) -> Result<Vec<CaseRecord>> {
        let mut rng = self.rng(case);
        let n = case.n;
        let sigma = self.cfg.sigma;
        Ok(match self.cfg.suite {
            Suite::Royden => {
                let (s, h) = self.instance(case, &mut rng);
                let g = random_metric(n, &mut rng);
                let r = royden_identity_check(&s, &h, &g)?;
                vec![self.equality(case, "royden-identity", r, 0.0)]
            }
            Suite::Interpolation => {
                let k = case.k.unwrap();
                let (s, h) = self.instance(case, &mut rng);
                let bound = -(k as f64 + 1.0) * sigma;
                let shifted = shift_to_ric_k_upper(&s, &h, k, bound, &self.certify_opts(case))?;
                let x = random_unit_vector(&h, &mut rng);
                let sides = interpolation_check(&shifted.form, &h, k, sigma, &x)?;
                vec![self.inequality(case, "interpolation", sides.lhs, sides.rhs)]
            }
            Suite::MixedTrace => {
                let (s, h) = self.instance(case, &mut rng);
                let g = random_metric(n, &mut rng);
                let rho = random_hermitian(n, &mut rng);
                let alpha = rng.gen_range(0.5..2.0);
                let beta = rng.gen_range(0.5..2.0);
                let lambda = mixed_curvature_lambda(&s, &h, &rho, alpha, beta, &self.certify_opts(case))?.value;
                let b = mixed_trace_bounds(&s, &h, &g, &rho, MixedParams { alpha, beta, lambda })?;
                vec![
                    self.inequality(case, "mixed-trace:first", b.lhs, b.rhs1),
                    self.inequality(case, "mixed-trace:second", b.rhs1, b.rhs2),
                ]
            }
            Suite::RicScalar => {
                let k = case.k.unwrap();
                let (s, h) = self.instance(case, &mut rng);
                let bound = -(k as f64 + 1.0) * sigma;
                let shifted = shift_to_ric_k_upper(&s, &h, k, bound, &self.certify_opts(case))?;
                let d = ric_scalar_matrix(&shifted.form, &h, k, sigma)?;
                vec![self.inequality(case, "ric-scalar", max_eigenvalue_rel(&d, &h)?, 0.0)]
            }
            Suite::Berger => {
                let (s, h) = self.instance(case, &mut rng);
                let seed = rng.gen();
                let b = berger_check(&s, &h, self.cfg.samples, seed)?;
                let dev = (b.scalar_value - b.scaled_average(n)).abs();
                vec![self.inequality(case, "berger", dev, 3.0 * b.std_error)]
            }
            Suite::RigidityModel => self.rigidity(case, &mut rng)?,
        })
    }

    /// `S = −σB(h)`, where every bound in the chain is attained.
    fn rigidity(&self, case: &Case, rng: &mut WorkRng) -> Result<Vec<CaseRecord>> {
        let n = case.n;
        let k = case.k.unwrap();
        let sigma = self.cfg.sigma;
        let h = match &self.cfg.instances {
            Some(list) => list[case.instance].metric.clone(),
            None => random_metric(n, rng),
        };
        let s = b_form(&h).scaled(-sigma);
        let x = random_unit_vector(&h, rng);
        let nf = n as f64;
        let kf = k as f64;
        let mut out = vec![self.equality(case, "rigidity:hsc", hsc(&s, &h, &x)?, -2.0 * sigma)];
        let opts = self.certify_opts(case);
        for (tag, which) in [("rigidity:ric-k-max", Which::Max), ("rigidity:ric-k-min", Which::Min)] {
            let v = global_extreme(&s, &h, k, which, &opts)?.value;
            out.push(self.equality(case, tag, v, -(kf + 1.0) * sigma));
        }
        let ric = ricci_trace(&s, &h)?;
        let dev = ric.sub(&h.scaled(-(nf + 1.0) * sigma)).eigenvalues_rel(&h)?;
        let worst = dev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        out.push(self.equality(case, "rigidity:ricci", worst, 0.0));
        out.push(self.equality(case, "rigidity:scalar", scalar(&s, &h)?, -nf * (nf + 1.0) * sigma));
        let sides = interpolation_check(&s, &h, k, sigma, &x)?;
        out.push(self.equality(case, "rigidity:interpolation", sides.lhs, sides.rhs));
        if k > 1 {
            let d = ric_scalar_matrix(&s, &h, k, sigma)?;
            let ev = d.eigenvalues_rel(&h)?;
            let worst = ev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            out.push(self.equality(case, "rigidity:ric-scalar", worst, 0.0));
        }
        Ok(out)
    }
}

fn expand(cfg: &SuiteConfig) -> Vec<Case> {
    let mut cases = Vec::new();
    let ks = |n: usize| -> Vec<Option<usize>> {
        if cfg.suite.uses_k() {
            cfg.ks.iter().copied().filter(|&k| cfg.suite.accepts(n, k)).map(Some).collect()
        } else {
            vec![None]
        }
    };
    match &cfg.instances {
        Some(list) => {
            for (i, t) in list.iter().enumerate() {
                let n = t.form.dim();
                for k in ks(n) {
                    cases.push(Case { id: cases.len(), n, k, instance: i });
                }
            }
        }
        None => {
            for &n in &cfg.dims {
                for k in ks(n) {
                    for i in 0..cfg.count {
                        cases.push(Case { id: cases.len(), n, k, instance: i });
                    }
                }
            }
        }
    }
    cases
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.instances.is_none() {
        if let Some(&n) = cfg.dims.iter().find(|&&n| n == 0) {
            return Err(invalid(format!("dimension {n} must be positive")));
        }
    }
    let start = Instant::now();
    let tol = cfg.tolerance();
    let ctx = Ctx { cfg, tol };
    let cases = expand(cfg);
    let records: Vec<CaseRecord> = cases.par_iter().map(|c| ctx.run(c)).collect::<Vec<_>>().concat();
    let pass_count = records.iter().filter(|r| r.pass).count();
    let worst_margin = records.iter().filter_map(|r| r.margin).reduce(f64::min);
    let summary = SuiteSummary {
        suite: cfg.suite.name().into(),
        seed: cfg.seed,
        tolerance: tol,
        tolerance_overridden: cfg.tolerance.is_some(),
        cases: cases.len(),
        records: records.len(),
        pass_count,
        fail_count: records.len() - pass_count,
        worst_margin,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(SuiteReport { records, summary })
}
