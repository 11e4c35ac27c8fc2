//! Batch verification runner: configuration, the check catalog, parallel
//! execution with per-check seeds, and the JSON report.
//!
//! Sample sets come from ChaCha8 (`rand_chacha`) seeded per check with
//! `seed XOR fnv1a64(check label)`, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chart::ChartExt;
use crate::error::{Error, Result};
use crate::euler::{
    count_points_and_ap, hasse_invariant_symbolic, hasse_value_univariate, random_parameters, ClassicalEuler,
    EulerSystem,
};
use crate::flows::{isospectrality_defect, lax_flow, poisson_from_symplectic, LaxSetting, PoissonStructure};
use crate::forms::{lie_derivative, restrict_to_sphere};
use crate::jets::{is_solution, jet_of_point, prolong, Flavor};
use crate::lax::{
    companion, conj, conjugate_lift, eigen_split, frobenius_star, frobenius_star_from_split, frobenius_star_star,
    random_invertible, random_matrix, random_permutation, random_regular, random_teichmuller_invertible,
    random_torus, spectrum_delta_constant_check, PMatrix, TorusPoint,
};
use crate::padic::{teichmuller, TruncatedPadic};
use crate::poly::{vars, MultiPoly};
use crate::ring::{check_odd_prime, IntegerRing, RationalField, Ring, Zmod};

/// Every individual check, in report order.
pub const CHECKS: &[&str] = &[
    "padic",
    "jets",
    "classical.euler",
    "classical.symplectic",
    "classical.poisson",
    "classical.lax",
    "euler.build",
    "euler.verify",
    "hasse",
    "ap",
    "lax.star",
    "lax.starstar",
    "lax.spectrum",
];

const ARITHMETIC: &[&str] = &["euler.build", "euler.verify"];

fn expand_group(name: &str) -> Result<Vec<&'static str>> {
    if name == "all" {
        return Ok(CHECKS.to_vec());
    }
    if let Some(c) = CHECKS.iter().find(|c| **c == name) {
        return Ok(vec![c]);
    }
    let prefix = format!("{name}.");
    let group: Vec<_> = CHECKS.iter().copied().filter(|c| c.starts_with(&prefix)).collect();
    if group.is_empty() {
        return Err(Error::Config(format!("unknown check {name:?}")));
    }
    Ok(group)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSpec {
    Explicit([i64; 3]),
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberSpec {
    Explicit(Vec<[u64; 2]>),
    Sample(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub prec: u32,
    pub a: ParamSpec,
    pub fibers: FiberSpec,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub checks: Vec<String>,
    /// Debug: add `x1` to the third image of the gauged flow before verifying.
    pub perturb: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            primes: vec![5],
            prec: 3,
            a: ParamSpec::Random(1),
            fibers: FiberSpec::Sample(10),
            samples: 20,
            seed: 0,
            out: None,
            checks: Vec::new(),
            perturb: false,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("malformed value {s:?} for {key}"))))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("malformed value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("malformed value {v:?} for {key}"))),
    }
}

impl RunConfig {
    /// Set one `key=value` entry (also used for command-line overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.primes = parse_list(key, value)?,
            "prec" => self.prec = parse_scalar(key, value)?,
            "a" => {
                self.a = if let Some(k) = value.trim().strip_prefix("random:") {
                    ParamSpec::Random(parse_scalar(key, k)?)
                } else {
                    let v: Vec<i64> = parse_list(key, value)?;
                    let arr: [i64; 3] = v
                        .try_into()
                        .map_err(|_| Error::Config(format!("a needs three values, got {value:?}")))?;
                    ParamSpec::Explicit(arr)
                }
            }
            "c" => {
                self.fibers = if let Some(k) = value.trim().strip_prefix("sample:") {
                    FiberSpec::Sample(parse_scalar(key, k)?)
                } else {
                    let mut out = Vec::new();
                    for pair in value.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()) {
                        let (c1, c2) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::Config(format!("fiber {pair:?} is not c1:c2")))?;
                        out.push([parse_scalar(key, c1)?, parse_scalar(key, c2)?]);
                    }
                    FiberSpec::Explicit(out)
                }
            }
            "samples" => self.samples = parse_scalar(key, value)?,
            "seed" => self.seed = parse_scalar(key, value)?,
            "out" => {
                let v = value.trim();
                self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) }
            }
            "checks" => {
                self.checks = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty() && s != "none")
                    .collect()
            }
            "perturb" => self.perturb = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Sort and deduplicate primes and checks; validate.
    pub fn normalize(mut self) -> Result<Self> {
        if self.primes.is_empty() {
            return Err(Error::Config("no primes given".into()));
        }
        for &p in &self.primes {
            check_odd_prime(p).map_err(|e| Error::Config(e.to_string()))?;
        }
        self.primes.sort_unstable();
        self.primes.dedup();
        let mut checks = Vec::new();
        for c in &self.checks {
            checks.extend(expand_group(c)?);
        }
        let mut checks: Vec<String> = CHECKS
            .iter()
            .filter(|c| checks.contains(c))
            .map(|c| c.to_string())
            .collect();
        checks.dedup();
        self.checks = checks;
        if self.prec == 0 {
            return Err(Error::Config("prec must be positive".into()));
        }
        if self.prec < 3 && self.checks.iter().any(|c| ARITHMETIC.contains(&c.as_str())) {
            return Err(Error::Config(format!(
                "prec = {} but arithmetic Euler checks need at least 3",
                self.prec
            )));
        }
        if let ParamSpec::Explicit(a) = self.a {
            for &p in &self.primes {
                let r: Vec<i64> = a.iter().map(|v| v.rem_euclid(p as i64)).collect();
                if r[0] == r[1] || r[1] == r[2] || r[0] == r[2] {
                    return Err(Error::Config(format!("a = {a:?} has repeated residues mod {p}")));
                }
            }
        }
        Ok(self)
    }
}

/// Parse the plain-text format: `key = value` lines, `#` comments and
/// `[section]` headers (sections only group keys).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.normalize()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub params: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub detail: String,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub error: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub rng: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    /// 0 pass, 1 some check failed, 3 internal error.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 {
            3
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with timing fields zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Value {
        let mut v = serde_json::to_value(self).unwrap();
        if let Some(arr) = v.get_mut("checks").and_then(|c| c.as_array_mut()) {
            for r in arr {
                r["elapsed_ms"] = json!(0);
            }
        }
        v
    }
}

pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn check_rng(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(label))
}

struct Outcome {
    pass: bool,
    witness: Option<String>,
    detail: String,
}

impl Outcome {
    fn ok(detail: impl Into<String>) -> Self {
        Outcome {
            pass: true,
            witness: None,
            detail: detail.into(),
        }
    }

    fn from_failures(failures: Vec<String>, detail: impl Into<String>) -> Self {
        if failures.is_empty() {
            Self::ok(detail)
        } else {
            Outcome {
                pass: false,
                witness: Some(failures.join("; ")),
                detail: detail.into(),
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Task {
    id: &'static str,
    p: Option<u64>,
    a: Option<[u64; 3]>,
}

impl Task {
    fn label(&self) -> String {
        let mut s = self.id.to_string();
        if let Some(p) = self.p {
            s += &format!("/p={p}");
        }
        if let Some(a) = self.a {
            s += &format!("/a={},{},{}", a[0], a[1], a[2]);
        }
        s
    }

    fn params(&self, cfg: &RunConfig) -> Value {
        let mut m = serde_json::Map::new();
        if let Some(p) = self.p {
            m.insert("p".into(), json!(p));
            m.insert("prec".into(), json!(cfg.prec));
        }
        if let Some(a) = self.a {
            m.insert("a".into(), json!(a));
        }
        Value::Object(m)
    }
}

fn euler_parameters(cfg: &RunConfig, p: u64) -> Result<Vec<[u64; 3]>> {
    let m = Zmod::new(p, cfg.prec)?.modulus() as i64;
    match &cfg.a {
        ParamSpec::Explicit(a) => Ok(vec![a.map(|v| v.rem_euclid(m) as u64)]),
        ParamSpec::Random(k) => {
            let mut rng = check_rng(cfg.seed, &format!("euler.params/p={p}"));
            let mut out = Vec::new();
            for _ in 0..*k {
                let sys = random_parameters(p, cfg.prec, 10, &mut rng)?;
                out.push(sys.params().clone().map(|t| t.to_u64().unwrap()));
            }
            Ok(out)
        }
    }
}

fn plan(cfg: &RunConfig) -> Result<Vec<Task>> {
    let mut tasks = Vec::new();
    let mut params: BTreeMap<u64, Vec<[u64; 3]>> = BTreeMap::new();
    for id in CHECKS {
        if !cfg.checks.iter().any(|c| c == id) {
            continue;
        }
        match *id {
            "classical.euler" | "classical.lax" => tasks.push(Task { id, p: None, a: None }),
            "euler.build" | "euler.verify" => {
                for &p in &cfg.primes {
                    if !params.contains_key(&p) {
                        params.insert(p, euler_parameters(cfg, p)?);
                    }
                    for a in &params[&p] {
                        tasks.push(Task { id, p: Some(p), a: Some(*a) });
                    }
                }
            }
            _ => {
                for &p in &cfg.primes {
                    tasks.push(Task { id, p: Some(p), a: None });
                }
            }
        }
    }
    Ok(tasks)
}

/// Execute the selected checks.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let tasks = plan(cfg)?;
    let records: Vec<CheckRecord> = tasks
        .par_iter()
        .map(|t| {
            let label = t.label();
            let mut rng = check_rng(cfg.seed, &label);
            let start = Instant::now();
            let res = catch_unwind(AssertUnwindSafe(|| execute(t, cfg, &mut rng)));
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let (status, witness, detail) = match res {
                Ok(Ok(o)) if o.pass => (Status::Pass, None, o.detail),
                Ok(Ok(o)) => (Status::Fail, o.witness, o.detail),
                Ok(Err(Error::Internal(msg))) => (Status::Error, None, format!("internal: {msg}")),
                Ok(Err(e)) => (Status::Fail, Some(e.to_string()), "check raised an error".into()),
                Err(panic) => {
                    let msg = panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panic".into());
                    (Status::Error, None, format!("internal: {msg}"))
                }
            };
            CheckRecord {
                id: t.id.to_string(),
                params: t.params(cfg),
                status,
                witness,
                detail,
                elapsed_ms,
            }
        })
        .collect();
    let mut summary = Summary {
        total: records.len(),
        ..Default::default()
    };
    for r in &records {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Skip => summary.skip += 1,
            Status::Error => summary.error += 1,
        }
    }
    Ok(Report {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        rng: "ChaCha8 (rand_chacha 0.3), per-check seed = seed XOR fnv1a64(check label)".into(),
        config: cfg.clone(),
        checks: records,
        summary,
    })
}

fn execute(t: &Task, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let p = t.p.unwrap_or(5);
    match t.id {
        "padic" => check_padic(p, cfg.samples * 50, rng),
        "jets" => check_jets(p, rng),
        "classical.euler" => check_classical_euler(),
        "classical.symplectic" => check_classical_symplectic(p, cfg.samples, rng),
        "classical.poisson" => check_classical_poisson(p, rng),
        "classical.lax" => check_classical_lax(),
        "euler.build" => check_euler_build(&euler_system(p, cfg.prec, t.a.unwrap())?),
        "euler.verify" => check_euler_verify(&euler_system(p, cfg.prec, t.a.unwrap())?, cfg, rng),
        "hasse" => check_hasse(p, cfg.samples, rng),
        "ap" => check_ap(p, cfg.samples * 5, rng),
        "lax.star" => check_lax_star(p, cfg.prec, cfg.samples, rng),
        "lax.starstar" => check_lax_starstar(p, cfg.prec, cfg.samples, rng),
        "lax.spectrum" => check_lax_spectrum(p, cfg.prec, cfg.samples, rng),
        other => Err(Error::Config(format!("unknown check {other}"))),
    }
}

fn euler_system(p: u64, prec: u32, a: [u64; 3]) -> Result<EulerSystem> {
    EulerSystem::from_i64(p, prec, a.map(|v| v as i64))
}

fn random_padic(p: u64, prec: u32, rng: &mut ChaCha8Rng) -> Result<TruncatedPadic> {
    let m = Zmod::new(p, prec)?.modulus();
    TruncatedPadic::from_i64(p, prec, rng.gen_range(0..m) as i64)
}

/// Sum and product rules for `delta` and Teichmüller fixed points, at `N = 6`.
pub(crate) fn padic_identities(p: u64, pairs: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let n = 6;
    let mut failures = Vec::new();
    let coeffs: Vec<TruncatedPadic> = (1..p)
        .map(|i| {
            let c: BigInt = binomial(BigInt::from(p), BigInt::from(i)) / BigInt::from(p);
            TruncatedPadic::from_bigint(p, n, &c)
        })
        .collect::<Result<_>>()?;
    for _ in 0..pairs {
        let a = random_padic(p, n, rng)?;
        let b = random_padic(p, n, rng)?;
        let (da, db) = (a.delta()?, b.delta()?);
        let mut cross = TruncatedPadic::zero(p, n)?;
        for (i, c) in coeffs.iter().enumerate() {
            let i = i as u64 + 1;
            cross = cross.add(&c.mul(&a.pow(i)).mul(&b.pow(p - i)));
        }
        let sum = da.add(&db).sub(&cross.reduce(n - 1)?);
        if a.add(&b).delta()? != sum {
            failures.push(format!("delta(a+b) at a={}, b={}", a.value(), b.value()));
        }
        let prod = a
            .pow(p)
            .reduce(n - 1)?
            .mul(&db)
            .add(&b.pow(p).reduce(n - 1)?.mul(&da))
            .add(&da.mul(&db).scale(p as i64));
        if a.mul(&b).delta()? != prod {
            failures.push(format!("delta(ab) at a={}, b={}", a.value(), b.value()));
        }
        let r = rng.gen_range(0..p);
        let t = teichmuller(p, r, n)?;
        if t.pow(p) != t || t.residue() != r {
            failures.push(format!("teichmuller({r})"));
        }
    }
    Ok(failures)
}

fn check_padic(p: u64, pairs: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let failures = padic_identities(p, pairs, rng)?;
    Ok(Outcome::from_failures(failures, format!("{pairs} random pairs at N = 6")))
}

fn check_jets(p: u64, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = Vec::new();
    let x = MultiPoly::parse(IntegerRing, vars(&["x"]), "x^2")?;
    let j = prolong(&x, 1, Flavor::Arithmetic { p })?;
    let want = j.parse(&format!("2*x^{p}*x' + {p}*x'^2"))?;
    if j.relations[1] != want {
        failures.push(format!("delta(x^2) = {}", j.relations[1]));
    }
    let jc = prolong(&x, 2, Flavor::Classical)?;
    if jc.relations[2] != jc.parse("2*x'^2 + 2*x*x''")? {
        failures.push(format!("classical second prolongation {}", jc.relations[2]));
    }
    // f = (x - r) g(x) vanishes at r; its prolongations vanish at J^2(r)
    for _ in 0..5 {
        let r = rng.gen_range(0..1000i64);
        let g1 = rng.gen_range(-5..=5i64);
        let g0 = rng.gen_range(-5..=5i64);
        let f = MultiPoly::parse(IntegerRing, vars(&["x"]), &format!("(x - {r})*({g1}*x + {g0})"))?;
        let pres = prolong(&f, 2, Flavor::Arithmetic { p })?;
        let point = TruncatedPadic::from_i64(p, 6, r)?;
        let jet = jet_of_point(&[point], 2)?;
        if !is_solution(&pres, &pres.relations, &jet)? {
            failures.push(format!("prolongation of {f} at {r}"));
        }
    }
    let id = prolong(&MultiPoly::var(IntegerRing, vars(&["x"]), 0), 1, Flavor::Arithmetic { p })?;
    let t = teichmuller(p, rng.gen_range(1..p), 4)?;
    let jet = jet_of_point(&[t], 1)?;
    if !is_solution(&id, &[id.parse("x'")?], &jet)? || is_solution(&id, &[id.parse("x' - 1")?], &jet)? {
        failures.push("Teichmüller solution checks".into());
    }
    Ok(Outcome::from_failures(failures, "prolongation and solution checks"))
}

fn check_classical_euler() -> Result<Outcome> {
    let e = ClassicalEuler::symbolic();
    let mut failures = Vec::new();
    for (name, h) in [("H1", &e.h1), ("H2", &e.h2)] {
        let d = e.flow.apply(h);
        if !d.is_zero() {
            failures.push(format!("delta {name} = {d}"));
        }
    }
    Ok(Outcome::from_failures(failures, "symbolic over Z[a1,a2,a3]"))
}

fn distinct_triple(p: u64, rng: &mut ChaCha8Rng) -> [u64; 3] {
    let mut all: Vec<u64> = (0..p).collect();
    all.shuffle(rng);
    [all[0], all[1], all[2]]
}

/// Symplectic identities on one sphere; returns failure descriptions.
pub(crate) fn sphere_identities<R: Ring>(e: &ClassicalEuler<R>, c2: R::Elem, two: R::Elem) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let red = e.sphere(c2)?;
    let ring = e.chart.ring().clone();
    for i in 1..=3 {
        let b = e.dh(1).wedge(&e.omega(i)).neg();
        let h = restrict_to_sphere(&b, &e.frame, &red)?;
        if h.as_constant() != Some(two.clone()) {
            failures.push(format!("-dH1^omega_{i} restricts to {h}"));
        }
        let eta = restrict_to_sphere(&e.eta(i), &e.frame, &red)?;
        if eta.as_constant() != Some(ring.one()) {
            failures.push(format!("eta_{i} restricts to {eta}"));
        }
        let lie = restrict_to_sphere(&lie_derivative(&e.flow, &e.eta(i))?, &e.frame, &red)?;
        if !lie.is_zero() {
            failures.push(format!("Lie derivative of eta_{i} restricts to {lie}"));
        }
    }
    Ok(failures)
}

fn check_classical_symplectic(p: u64, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let f = Zmod::new(p, 1)?;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let a = distinct_triple(p, rng);
        let c2 = rng.gen_range(1..p);
        let e = ClassicalEuler::numeric(f, a)?;
        for msg in sphere_identities(&e, c2, 2)? {
            failures.push(format!("a={a:?}, c2={c2}: {msg}"));
        }
    }
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let e = ClassicalEuler::numeric(RationalField, [q(1), q(3), q(-2)])?;
    for msg in sphere_identities(&e, BigRational::new(7.into(), 2.into()), q(2))? {
        failures.push(format!("rational instance: {msg}"));
    }
    Ok(Outcome::from_failures(
        failures,
        format!("{samples} samples over F_{p} and one over Q; -dH1^omega_i = 2 eta on spheres"),
    ))
}

/// Poisson-layer checks for the rigid body over a ring, on the sphere `c2`.
pub(crate) fn poisson_identities<R: Ring>(e: &ClassicalEuler<R>, c2: R::Elem) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let pb = e.poisson();
    for d in pb.generator_jacobi_defects() {
        if !d.is_zero() {
            failures.push(format!("rigid-body Jacobi defect {d}"));
        }
    }
    if !pb.is_casimir(&e.h2) {
        failures.push("H2 is not a Casimir".into());
    }
    let red = e.sphere(c2)?;
    let eta = e.eta(1);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let (xi, xj) = (e.chart.var(i), e.chart.var(j));
        let from_eta = poisson_from_symplectic(&eta, &xi, &xj, &e.frame, &red)?;
        let lp = red.reduce(pb.generator_bracket(i, j))?;
        if from_eta != lp {
            failures.push(format!("{{x{},x{}}}: eta gives {from_eta}, Lie-Poisson gives {lp}", i + 1, j + 1));
        }
    }
    Ok(failures)
}

pub(crate) fn gl_jacobi_failures(n: usize) -> Vec<String> {
    let chart = crate::chart::Chart::polynomial(IntegerRing, crate::flows::gl_vars(n));
    let pb = PoissonStructure::gl_n(&chart, n).unwrap();
    pb.generator_jacobi_defects()
        .into_iter()
        .filter(|d| !d.is_zero())
        .map(|d| format!("gl_{n} Jacobi defect {d}"))
        .collect()
}

fn check_classical_poisson(p: u64, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = Vec::new();
    let a = distinct_triple(p, rng);
    let e = ClassicalEuler::numeric(Zmod::new(p, 1)?, a)?;
    failures.extend(poisson_identities(&e, rng.gen_range(1..p))?);
    for n in 2..=3 {
        failures.extend(gl_jacobi_failures(n));
    }
    Ok(Outcome::from_failures(failures, "rigid body over F_p, gl_2 and gl_3 over Z"))
}

pub(crate) fn lax_isospectral_failures(n: usize) -> Result<Vec<String>> {
    let s = LaxSetting::symbolic_linear(IntegerRing, n);
    let flow = lax_flow(&s.x, &s.m)?;
    Ok((1..=n)
        .filter_map(|j| {
            let d = isospectrality_defect(&flow, &s.x, j);
            (!d.is_zero()).then(|| format!("n={n}: delta P_{j} has {} terms", d.num().num_terms()))
        })
        .collect())
}

fn check_classical_lax() -> Result<Outcome> {
    let mut failures = Vec::new();
    for n in 2..=3 {
        failures.extend(lax_isospectral_failures(n)?);
    }
    Ok(Outcome::from_failures(failures, "symbolic M with entries of degree <= 1, n = 2, 3"))
}

fn check_euler_build(sys: &EulerSystem) -> Result<Outcome> {
    let flow = sys.build_flow()?;
    let mut failures = Vec::new();
    for (name, h) in [("H1", sys.h1()), ("H2", sys.h2())] {
        let r = flow.prime_integral_residual(h)?;
        if !r.is_zero() {
            failures.push(format!("phi({name}) - {name}^p = {r}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("exact at precision {}", sys.precision())))
}

fn euler_fibers(sys: &EulerSystem, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<crate::euler::AdmissibleFiber>> {
    match &cfg.fibers {
        FiberSpec::Explicit(list) => list.iter().map(|c| sys.fiber(c[0] % sys.p(), c[1] % sys.p())).collect(),
        FiberSpec::Sample(k) => Ok(sys.sample_fibers(*k, rng)),
    }
}

fn check_euler_verify(sys: &EulerSystem, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let p = sys.p();
    let plain = sys.build_flow()?;
    let mut flow = sys.gauge_adjust(&plain)?;
    if cfg.perturb {
        let top = flow.top_chart().clone();
        flow = flow.perturbed(2, &top.var(0))?;
    }
    let fibers = euler_fibers(sys, cfg, rng)?;
    let mut failures = Vec::new();
    for c in &fibers {
        let r = c.residues();
        let lin = sys.verify_linearization(&flow, c)?;
        if !lin.is_zero() {
            failures.push(format!("linearization at c={r:?}: {lin}"));
        }
        let new2 = sys.derive_new2_form(&flow, c, None)?;
        if !new2.is_zero() {
            failures.push(format!("new2 with A(c) at c={r:?}: {new2}"));
        }
        let (_, ap) = sys.count_points_and_ap(r)?;
        let new2_ap = sys.derive_new2_form(&flow, c, Some(ap))?;
        if !new2_ap.is_zero() {
            failures.push(format!("new2 with a_p={ap} at c={r:?}: {new2_ap}"));
        }
    }
    let mut c2s: Vec<u64> = (1..p).collect();
    c2s.shuffle(rng);
    let mut spheres = 0;
    for c2 in c2s.into_iter().take(5) {
        let t = teichmuller(p, c2, sys.precision())?;
        let r = sys.verify_new1(&flow, &t)?;
        spheres += 1;
        if !r.is_zero() {
            failures.push(format!("new1 at c2={c2}: {r}"));
        }
    }
    Ok(Outcome::from_failures(
        failures,
        format!("{} fibers, {spheres} spheres{}", fibers.len(), if cfg.perturb { ", perturbed flow" } else { "" }),
    ))
}

fn check_hasse(p: u64, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let sym = hasse_invariant_symbolic(p)?;
    let f = Zmod::new(p, 1)?;
    let fp = sym.map_coeffs(&f, |c| f.from_bigint(c));
    let mut failures = Vec::new();
    for _ in 0..samples {
        let a = distinct_triple(p, rng);
        let c = [rng.gen_range(0..p), rng.gen_range(0..p)];
        let v = fp.eval(&[c[0], c[1], a[0], a[1], a[2]])?;
        let w = hasse_value_univariate(p, a, c);
        if v != w {
            failures.push(format!("a={a:?}, c={c:?}: symbolic {v}, univariate {w}"));
        }
    }
    let detail = if p <= 5 {
        format!("A = {sym}")
    } else {
        format!("A has {} terms", sym.num_terms())
    };
    Ok(Outcome::from_failures(failures, detail))
}

/// `a_p = A(c) mod p` and `|a_p| <= 2 sqrt p` on random admissible `(a, c)`.
pub(crate) fn ap_samples(p: u64, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let mut done = 0;
    while done < samples {
        let a = distinct_triple(p, rng);
        let c = [rng.gen_range(0..p), rng.gen_range(0..p)];
        let hv = hasse_value_univariate(p, a, c);
        if hv == 0 {
            continue;
        }
        let (_, ap) = match count_points_and_ap(p, a, c) {
            Ok(v) => v,
            Err(Error::DegenerateQuartic(_)) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        if ap.rem_euclid(p as i64) as u64 != hv {
            failures.push(format!("a={a:?}, c={c:?}: a_p={ap}, A(c)={hv}"));
        }
        if (ap * ap) as u64 > 4 * p {
            failures.push(format!("a={a:?}, c={c:?}: Hasse bound violated by a_p={ap}"));
        }
    }
    Ok(failures)
}

fn check_ap(p: u64, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let failures = ap_samples(p, samples, rng)?;
    Ok(Outcome::from_failures(failures, format!("{samples} admissible samples")))
}

fn lax_sizes(p: u64) -> Vec<usize> {
    [2, 3].into_iter().filter(|&n| (n as u64) < p).collect()
}

/// Diagram t* on one random `(h, g)`, plus gauge independence.
pub(crate) fn star_sample(p: u64, prec: u32, n: usize, teich: bool, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let h = random_torus(p, prec, n, teich, rng)?;
    let g = random_invertible(p, prec, n, rng)?;
    let x = conj(&h, &g)?;
    let y = frobenius_star(&x)?;
    let want = conj(&h.phi0(), &g.phi0())?;
    if y != want {
        failures.push(format!("n={n}: phi*(C(h,g)) = {y}, C(phi0 h, phi0 g) = {want}"));
    }
    if !y.congruent_mod_p(&x.phi0()) {
        failures.push(format!("n={n}: not a Frobenius lift at {x}"));
    }
    Ok(failures)
}

/// `g' = D P g`, `h' = P h P^{-1}` gives the same value.
pub(crate) fn gauge_sample(p: u64, prec: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let h = random_torus(p, prec, n, false, rng)?;
    let g = random_invertible(p, prec, n, rng)?;
    let d = random_torus(p, prec, n, false, rng)?;
    let (perm, pm) = random_permutation(p, prec, n, rng)?;
    let g2 = d.matrix().mul(&pm).mul(&g);
    let h2 = TorusPoint::new(perm.iter().map(|&j| h.t[j].clone()).collect())?;
    let x1 = conj(&h, &g)?;
    let x2 = conj(&h2, &g2)?;
    let mut failures = Vec::new();
    if x1 != x2 {
        return Err(Error::Internal("double decomposition does not give the same matrix".into()));
    }
    if frobenius_star_from_split(&h, &g)? != frobenius_star_from_split(&h2, &g2)? {
        failures.push(format!("n={n}: gauge dependence at {x1}"));
    }
    let (h3, g3) = eigen_split(&x1)?;
    if frobenius_star_from_split(&h3, &g3)? != frobenius_star_from_split(&h, &g)? {
        failures.push(format!("n={n}: eigen_split gauge differs at {x1}"));
    }
    Ok(failures)
}

fn check_lax_star(p: u64, prec: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = Vec::new();
    let sizes = lax_sizes(p);
    for &n in &sizes {
        for k in 0..samples {
            failures.extend(star_sample(p, prec, n, k % 2 == 0, rng)?);
            failures.extend(gauge_sample(p, prec, n, rng)?);
        }
    }
    Ok(Outcome::from_failures(failures, format!("n in {sizes:?}, {samples} samples each")))
}

pub(crate) fn starstar_sample(p: u64, prec: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let x = random_regular(p, prec, n, rng)?;
    let y = frobenius_star_star(&x)?;
    let px: Vec<_> = x.char_poly().iter().map(|v| v.pow(p)).collect();
    if y.char_poly() != px {
        failures.push(format!("n={n}: P_j(phi**(x)) != P_j(x)^p at {x}"));
    }
    if !y.congruent_mod_p(&x.phi0()) {
        failures.push(format!("n={n}: not a Frobenius lift at {x}"));
    }
    let alpha = random_matrix(p, prec, n, rng)?;
    let z = conjugate_lift(&y, &alpha)?;
    if z.char_poly() != px {
        failures.push(format!("n={n}: conjugate lift changes P_j at {x}"));
    }
    Ok(failures)
}

fn check_lax_starstar(p: u64, prec: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = Vec::new();
    for n in 2..=3 {
        for _ in 0..samples {
            failures.extend(starstar_sample(p, prec, n, rng)?);
        }
    }
    // companion gauge is the identity on companion matrices
    let z = [random_padic(p, prec, rng)?, random_padic(p, prec, rng)?];
    let c = companion(&z)?;
    let zp: Vec<_> = z.iter().map(|v| v.pow(p)).collect();
    if frobenius_star_star(&c)? != companion(&zp)? {
        failures.push("companion matrix not sent to companion of P^p".into());
    }
    Ok(Outcome::from_failures(failures, format!("n in [2, 3], {samples} samples each")))
}

pub(crate) fn spectrum_sample(p: u64, prec: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
    let h = random_torus(p, prec, n, true, rng)?;
    let g = random_teichmuller_invertible(p, prec, n, rng)?;
    let x = conj(&h, &g)?;
    Ok(match spectrum_delta_constant_check(&x) {
        Ok(true) => vec![],
        Ok(false) => vec![format!("n={n}: non-Teichmüller spectrum at {x}")],
        Err(e) => vec![format!("n={n}: {e} at {x}")],
    })
}

fn check_lax_spectrum(p: u64, prec: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = Vec::new();
    let sizes = lax_sizes(p);
    for &n in &sizes {
        for _ in 0..samples {
            failures.extend(spectrum_sample(p, prec, n, rng)?);
        }
    }
    // a non-fixed point must be rejected, not reported as false
    let x = PMatrix::from_i64(p, prec, &[vec![1 + p as i64, 0], vec![0, 2]])?;
    if !matches!(spectrum_delta_constant_check(&x), Err(Error::Precondition(_))) {
        failures.push("diag(1+p, 2) was not rejected".into());
    }
    Ok(Outcome::from_failures(failures, format!("n in {sizes:?}, {samples} fixed points each")))
}
