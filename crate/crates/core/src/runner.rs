//! The verification harness: one [`Command`] per family of invariants, a
//! [`RunConfig`] shared by all of them, and a [`Report`] that renders to JSON
//! or CSV.
//!
//! Reports contain no timings or other run-dependent data, so the same config
//! and seed give byte-identical output. Randomized checks draw trial `i` from
//! [`crate::sampling::trial_rng`]`(seed, i)`.
//!
//! | command | invariants |
//! |---|---|
//! | `axioms` | groupoid composition, units, inverses, group laws of `Γ_n` |
//! | `haar` | left invariance of the counting Haar system, normalization, Kolmogorov consistency, Radon-Nikodym covariance, `Δ` homomorphism |
//! | `algebra` | associativity, `(F⋆G)† = G†⋆F†`, `S = JΔ^{1/2}`, operator bound, unitarity of `V_w` and of the modular flow |
//! | `glimm` | GNS expectation against the Powers state, `π(w)† = π(w reversed)`, exact diagonal moments |
//! | `trace` | traceality of `τ` at `λ = 1/2` and the non-traceality witness elsewhere |
//! | `dfs-build` | inductive DFS construction, `δ∘δ = 0` |
//! | `dfs-check` | DFS condition of a stored or generated table, Ising transition energy against brute force, exactness |
//! | `ising-partition` | brute force against transfer recursion, ratio identity, closed-form mismatch |
//! | `ising-dynamics` | Heisenberg equivalence, norm preservation, non-cocycle control |
//! | `spectrum` | modular spectrum on the lattice `log((1-λ)/λ)·ℤ` |

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{
    apply, canonical_weight, convolve, hahn_norm, inner_product, involution, l2_norm, modular_conjugation,
    modular_operator_pow, pukanszky_v, trace_witness, AlgebraElement,
};
use crate::dfs::{cochain_delta, dfs_build, dfs_check, dfs_check_integer, is_exact, Cochain, DfsTable};
use crate::error::{Error, Result};
use crate::exact::{to_f64, ExactBernoulli};
use crate::groupoid::{check_axioms, enumerate_gamma, FlipWord, GroupoidElement, Prefix};
use crate::ising::{
    energy_oracle_check, heisenberg_check_with, ising_dfs_table, ising_dfs_units, modular_hamiltonian_eval,
    modular_spectrum_points, ModularHamiltonian, PerturbedEnergy, TransitionEnergy,
};
use crate::matrix_bridge::{gns_compare_random, involution_defect, random_word};
use crate::measures::{partition_report, pushforward_projection_check, translation_covariance_check, MeasureSpec};
use crate::modular::{homomorphism_check, modular_delta};
use crate::numeric::compensated_sum_c;
use crate::sampling::{random_element, random_real_cylinder, trial_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Command {
    Axioms,
    Haar,
    Algebra,
    Glimm,
    Trace,
    DfsBuild,
    DfsCheck,
    IsingPartition,
    IsingDynamics,
    Spectrum,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Axioms,
        Command::Haar,
        Command::Algebra,
        Command::Glimm,
        Command::Trace,
        Command::DfsBuild,
        Command::DfsCheck,
        Command::IsingPartition,
        Command::IsingDynamics,
        Command::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Axioms => "axioms",
            Command::Haar => "haar",
            Command::Algebra => "algebra",
            Command::Glimm => "glimm",
            Command::Trace => "trace",
            Command::DfsBuild => "dfs-build",
            Command::DfsCheck => "dfs-check",
            Command::IsingPartition => "ising-partition",
            Command::IsingDynamics => "ising-dynamics",
            Command::Spectrum => "spectrum",
        }
    }

    /// Measure used when the config names none.
    pub fn default_measure(self) -> MeasureSpec {
        match self {
            Command::DfsCheck | Command::IsingPartition | Command::IsingDynamics => MeasureSpec::Ising { j: 1.0 },
            _ => MeasureSpec::Bernoulli { lambda: 0.3, sites: Vec::new() },
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Bernoulli,
    Ising,
}

pub const DEFAULT_LAMBDAS: [f64; 4] = [0.5, 0.2, 0.3, 0.4];
pub const DEFAULT_TIMES: [f64; 3] = [0.37, 1.0, PI];

/// Settings shared by every command. Missing fields in a JSON config file
/// take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `None` picks [`Command::default_measure`].
    pub measure: Option<MeasureSpec>,
    pub n: usize,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// `λ` values swept by `trace`.
    pub lambdas: Vec<f64>,
    /// Times used by `ising-dynamics`.
    pub times: Vec<f64>,
    /// Table read by `dfs-check`.
    pub input: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            measure: None,
            n: 4,
            depth: 6,
            trials: 1000,
            seed: 0,
            tol: 1e-12,
            format: OutputFormat::Json,
            out: None,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            times: DEFAULT_TIMES.to_vec(),
            input: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < self.n {
            return Err(Error::InvalidSpec(format!("depth {} below horizon {}", self.depth, self.n)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidSpec(format!("tolerance {} must be positive", self.tol)));
        }
        if let Some(m) = &self.measure {
            m.validate()?;
        }
        for &l in &self.lambdas {
            MeasureSpec::bernoulli(l)?;
        }
        Ok(())
    }

    pub fn measure_for(&self, cmd: Command) -> MeasureSpec {
        self.measure.clone().unwrap_or_else(|| cmd.default_measure())
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub measure: Option<MeasureKind>,
    pub lambda: Option<f64>,
    pub j: Option<f64>,
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
}

impl Overrides {
    /// `--lambda` alone implies a Bernoulli measure and `--J` alone an Ising
    /// one; an explicit `--lambda` also replaces the `trace` sweep.
    pub fn apply(self, mut cfg: RunConfig) -> Result<RunConfig> {
        let kind = self.measure.or(match (self.lambda, self.j) {
            (Some(_), Some(_)) => None,
            (Some(_), None) => Some(MeasureKind::Bernoulli),
            (None, Some(_)) => Some(MeasureKind::Ising),
            (None, None) => None,
        });
        if self.measure.is_none() && self.lambda.is_some() && self.j.is_some() {
            return Err(Error::InvalidSpec("--lambda and --J together need --measure".into()));
        }
        match kind {
            Some(MeasureKind::Bernoulli) => {
                let lambda = self
                    .lambda
                    .or(match &cfg.measure {
                        Some(MeasureSpec::Bernoulli { lambda, .. }) => Some(*lambda),
                        _ => None,
                    })
                    .unwrap_or(0.3);
                cfg.measure = Some(MeasureSpec::bernoulli(lambda)?);
            }
            Some(MeasureKind::Ising) => {
                let j = self
                    .j
                    .or(match &cfg.measure {
                        Some(MeasureSpec::Ising { j }) => Some(*j),
                        _ => None,
                    })
                    .unwrap_or(1.0);
                cfg.measure = Some(MeasureSpec::ising(j)?);
            }
            None => {}
        }
        if let Some(l) = self.lambda {
            cfg.lambdas = vec![l];
        }
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        set!(n, depth, trials, seed, tol, format);
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.input.is_some() {
            cfg.input = self.input;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        })
    }
}

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            threshold,
            pass: value <= threshold,
            witness: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            threshold,
            pass: value >= threshold,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

/// The first failing check, named with its witness input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub invariant: String,
    pub value: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub data: Value,
}

impl Report {
    fn new(cmd: Command, cfg: &RunConfig, checks: Vec<Check>, data: Value) -> Self {
        let failure = checks.iter().find(|c| !c.pass).map(|c| Failure {
            invariant: c.name.clone(),
            value: c.value,
            threshold: c.threshold,
            witness: c.witness.clone(),
        });
        Report { command: cmd.name().into(), config: cfg.clone(), pass: failure.is_none(), checks, failure, data }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// One row per check: `command,check,value,relation,threshold,pass,witness`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "check", "value", "relation", "threshold", "pass", "witness"]).expect("in memory");
        for c in &self.checks {
            w.write_record([
                self.command.as_str(),
                &c.name,
                &c.value.to_string(),
                &c.relation.to_string(),
                &c.threshold.to_string(),
                &c.pass.to_string(),
                c.witness.as_deref().unwrap_or(""),
            ])
            .expect("in memory");
        }
        String::from_utf8(w.into_inner().expect("in memory")).expect("csv is utf-8")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes to `config.out`, or to the given writer when unset.
    pub fn emit(&self, stdout: &mut impl Write) -> Result<()> {
        let text = self.render(self.config.format);
        match &self.config.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Malformed(format!("{}: {e}", p.display()))),
            None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Malformed(e.to_string())),
        }
    }
}

/// Exit status for an error raised before a report exists: invariant
/// violations are 1, everything else is a usage or config problem.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) => 1,
        _ => 2,
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    match cmd {
        Command::Axioms => run_axioms(cfg),
        Command::Haar => run_haar(cfg),
        Command::Algebra => run_algebra(cfg),
        Command::Glimm => run_glimm(cfg),
        Command::Trace => run_trace(cfg),
        Command::DfsBuild => run_dfs_build(cfg),
        Command::DfsCheck => run_dfs_check(cfg),
        Command::IsingPartition => run_ising_partition(cfg),
        Command::IsingDynamics => run_ising_dynamics(cfg),
        Command::Spectrum => run_spectrum(cfg),
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn run_axioms(cfg: &RunConfig) -> Result<Report> {
    let r = check_axioms(cfg.n);
    let mut c = Check::at_most("violations", r.violations as f64, 0.0);
    if let Some(w) = &r.first_violation {
        c = c.with_witness(w.clone());
    }
    Ok(Report::new(Command::Axioms, cfg, vec![c], to_value(&r)))
}

/// `Σ_β f(α ∘ β)` over `β ∈ 𝒢^{s(α)}` against `Σ_γ f(γ)` over `γ ∈ 𝒢^{r(α)}`,
/// both fibres cut to words of `Γ_n`, for every `α` with word in `Γ_n`.
fn left_invariance(f: &AlgebraElement, n: usize) -> Result<(f64, usize)> {
    let d = f.depth();
    let gamma = enumerate_gamma(n);
    let mut worst = 0.0f64;
    let mut count = 0;
    for x in Prefix::all(d) {
        let rhs = compensated_sum_c(gamma.iter().map(|&v| f.value(x.bits(), v)));
        for &u in &gamma {
            let a = GroupoidElement::new(x, u)?;
            let lhs = compensated_sum_c(gamma.iter().map(|&v| {
                let b = GroupoidElement::new(a.source(), v).expect("same depth");
                let ab = a.compose(b).expect("composable by construction");
                f.value(ab.point().bits(), ab.flips())
            }));
            worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            count += 1;
        }
    }
    Ok((worst, count))
}

fn run_haar(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.measure_for(Command::Haar);
    let (n, d, tol) = (cfg.n, cfg.depth, cfg.tol);
    let need = spec.delta_depth(n);
    if d < need {
        return Err(Error::DepthTooSmall { required: need, actual: d });
    }
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();

    let f = random_element(&mut trial_rng(cfg.seed, 0), n, d, 0.5);
    let (li, pairs) = left_invariance(&f, n)?;
    checks.push(Check::at_most("left_invariance", li, tol));
    data.insert("left_invariance_elements".into(), json!(pairs));

    let mass: f64 = crate::numeric::compensated_sum(spec.weight_table(d)?);
    checks.push(Check::at_most("normalization", (mass - 1.0).abs(), tol));

    let mut proj = 0.0f64;
    for k in 1..d {
        proj = proj.max(pushforward_projection_check(&spec, d, k)?);
    }
    checks.push(Check::at_most("projective_consistency", proj, tol));

    let mut cov = 0.0f64;
    let mut cov_at = FlipWord::EMPTY;
    for w in enumerate_gamma(n) {
        let dev = translation_covariance_check(&spec, w, d)?;
        if dev > cov {
            cov = dev;
            cov_at = w;
        }
    }
    checks.push(Check::at_most("radon_nikodym_covariance", cov, tol).with_witness(format!("{cov_at:?}")));

    if spec.is_bernoulli() {
        let ex = ExactBernoulli::from_spec(&spec)?;
        let mut worst = num_rational::BigRational::zero();
        for w in enumerate_gamma(n) {
            worst = worst.max(ex.covariance_deviation(w, d)?);
        }
        checks.push(Check::at_most("radon_nikodym_covariance_exact", to_f64(&worst), 0.0));
        let mut pw = num_rational::BigRational::zero();
        for k in 1..d {
            pw = pw.max(ex.pushforward_deviation(d, k)?);
        }
        checks.push(Check::at_most("projective_consistency_exact", to_f64(&pw), 0.0));
    }

    let hom = homomorphism_check(&spec, n)?;
    checks.push(Check::at_most("modular_homomorphism", hom.product_rel_dev, tol));
    checks.push(Check::at_most("modular_inverse", hom.inverse_rel_dev, tol));
    checks.push(Check::at_most("modular_unit", hom.unit_dev, tol));
    data.insert("measure".into(), to_value(&spec));
    data.insert("modular_homomorphism".into(), to_value(&hom));
    Ok(Report::new(Command::Haar, cfg, checks, Value::Object(data)))
}

struct Worst {
    value: f64,
    trial: Option<usize>,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, trial: None }
    }

    fn note(&mut self, v: f64, trial: usize) {
        if v > self.value || self.trial.is_none() {
            self.value = self.value.max(v);
            self.trial = Some(trial);
        }
    }

    fn at_most(&self, name: &str, threshold: f64, seed: u64) -> Check {
        let c = Check::at_most(name, self.value, threshold);
        match self.trial {
            Some(t) => c.with_witness(format!("seed {seed} trial {t}")),
            None => c,
        }
    }
}

fn run_algebra(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.measure_for(Command::Algebra);
    let (n, d, tol) = (cfg.n, cfg.depth, cfg.tol);
    let mut assoc = Worst::new();
    let mut anti = Worst::new();
    let mut polar = Worst::new();
    let mut bound = Worst::new();
    let mut bound_violations = 0usize;
    let mut unitary = Worst::new();
    let mut flow = Worst::new();
    let mut v_unitary = Worst::new();
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let f = random_element(&mut rng, n, d, 0.5);
        let g = random_element(&mut rng, n, d, 0.5);
        let k = random_element(&mut rng, n, d, 0.5);

        let fg = convolve(&f, &g)?;
        assoc.note(convolve(&fg, &k)?.rel_diff(&convolve(&f, &convolve(&g, &k)?)?)?, t);

        let lhs = involution(&fg, &spec)?;
        let rhs = convolve(&involution(&g, &spec)?, &involution(&f, &spec)?)?;
        anti.note(lhs.rel_diff(&rhs)?, t);

        let half = modular_operator_pow(&f, Complex64::new(0.5, 0.0), &spec)?;
        polar.note(modular_conjugation(&half, &spec)?.rel_diff(&involution(&f, &spec)?)?, t);

        let lhs = l2_norm(&apply(&f, &g)?, &spec)?;
        let rhs = hahn_norm(&f, &spec)? * l2_norm(&g, &spec)?;
        let excess = (lhs - rhs) / rhs.max(f64::MIN_POSITIVE);
        bound.note(excess.max(0.0), t);
        if excess > tol {
            bound_violations += 1;
        }

        let w = FlipWord::from_mask(rand::Rng::gen_range(&mut rng, 0..1u64 << n));
        let vw = pukanszky_v(w, &spec)?;
        let ng = l2_norm(&g, &spec)?;
        v_unitary.note((l2_norm(&apply(&vw, &g)?, &spec)? - ng).abs() / ng, t);
        let vv = convolve(&involution(&vw, &spec)?, &vw)?;
        unitary.note(vv.max_abs_diff(&AlgebraElement::unit())?, t);

        let s: f64 = rand::Rng::gen_range(&mut rng, -PI..PI);
        let it = Complex64::new(0.0, s);
        let before = inner_product(&f, &g, &spec)?;
        let after = inner_product(&modular_operator_pow(&f, it, &spec)?, &modular_operator_pow(&g, it, &spec)?, &spec)?;
        flow.note((after - before).norm() / before.norm().max(1.0), t);
    }
    let seed = cfg.seed;
    let checks = vec![
        assoc.at_most("associativity", tol, seed),
        anti.at_most("involution_antimultiplicative", tol, seed),
        polar.at_most("polar_decomposition", tol, seed),
        Check::at_most("operator_bound_violations", bound_violations as f64, 0.0),
        unitary.at_most("pukanszky_v_unitary", tol, seed),
        v_unitary.at_most("pukanszky_v_isometry", tol, seed),
        flow.at_most("modular_flow_unitary", tol, seed),
    ];
    let data = json!({ "measure": spec, "trials": cfg.trials, "operator_bound_max_excess": bound.value });
    Ok(Report::new(Command::Algebra, cfg, checks, data))
}

fn bernoulli_lambda(spec: &MeasureSpec) -> Result<f64> {
    spec.uniform_lambda().ok_or(Error::WrongMeasure("homogeneous Bernoulli"))
}

fn run_glimm(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.measure_for(Command::Glimm);
    let lambda = bernoulli_lambda(&spec)?;
    let r = gns_compare_random(cfg.n, cfg.trials, lambda, cfg.seed)?;
    let mut checks = vec![Check::at_most("gns_powers_equality", r.max_abs_deviation, cfg.tol)];

    let mut star = Worst::new();
    for t in 0..cfg.trials.min(100) {
        let (_, w) = random_word(&mut trial_rng(cfg.seed ^ 0x5eed, t as u64), cfg.n.max(1), 2 * cfg.n);
        star.note(involution_defect(&w, &spec)?, t);
    }
    checks.push(star.at_most("glimm_involution", cfg.tol, cfg.seed ^ 0x5eed));

    let exact = ExactBernoulli::from_spec(&spec)?.diagonal_gns_deviation(cfg.n)?;
    checks.push(Check::at_most("diagonal_words_exact", to_f64(&exact), 0.0));
    Ok(Report::new(Command::Glimm, cfg, checks, to_value(&r)))
}

/// `max |τ(F⋆G) - τ(G⋆F)|` over random pairs.
fn commutator_sweep(spec: &MeasureSpec, cfg: &RunConfig) -> Result<Worst> {
    let mut worst = Worst::new();
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let f = random_element(&mut rng, cfg.n, cfg.depth, 0.5);
        let g = random_element(&mut rng, cfg.n, cfg.depth, 0.5);
        let a = canonical_weight(&convolve(&f, &g)?, spec)?;
        let b = canonical_weight(&convolve(&g, &f)?, spec)?;
        worst.note((a - b).norm() / a.norm().max(b.norm()).max(1.0), t);
    }
    Ok(worst)
}

fn run_trace(cfg: &RunConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &lambda in &cfg.lambdas {
        let spec = MeasureSpec::bernoulli(lambda)?;
        let sweep = commutator_sweep(&spec, cfg)?;
        let wit = trace_witness(&spec)?;
        let closed = (1.0 - (lambda * lambda + (1.0 - lambda).powi(2)) / (lambda * (1.0 - lambda))).abs();
        if lambda == 0.5 {
            checks.push(sweep.at_most(&format!("traceality[lambda={lambda}]"), cfg.tol, cfg.seed));
        } else {
            checks.push(
                Check::at_least(format!("non_traceality[lambda={lambda}]"), wit.violation, wit.margin - 1e-12)
                    .with_witness("D = δ_{e1} ⊗ 1 against D†"),
            );
        }
        rows.push(json!({
            "lambda": lambda,
            "random_pairs_max_commutator": sweep.value,
            "witness_violation": wit.violation,
            "witness_margin": wit.margin,
            "two_point_closed_form": closed,
        }));
    }
    Ok(Report::new(Command::Trace, cfg, checks, json!({ "sweep": rows })))
}

fn run_dfs_build(cfg: &RunConfig) -> Result<Report> {
    let (n, d) = (cfg.n, cfg.depth);
    let seeds: Vec<_> = (0..n).map(|k| random_real_cylinder(&mut trial_rng(cfg.seed, k as u64), d)).collect();
    let table = dfs_build(n, &seeds, d)?;
    let rep = dfs_check(&table);
    let scale = table.max_abs().max(1.0);
    let mut c = Check::at_most("dfs_condition", rep.max_violation / scale, cfg.tol);
    if let Some(w) = &rep.witness {
        c = c.with_witness(format!("{w:?}"));
    }
    let cocycle = table.to_cochain().delta()?.max_abs() / scale;
    let h = random_real_cylinder(&mut trial_rng(cfg.seed, n as u64), d);
    let dd = cochain_delta(&cochain_delta(&Cochain::from_function(&h, n, d)?)?)?.max_abs();
    let checks = vec![
        c,
        Check::at_most("table_is_cocycle", cocycle, cfg.tol),
        Check::at_most("delta_squared_zero", dd, cfg.tol),
    ];
    let data = json!({ "check": rep, "table": table });
    Ok(Report::new(Command::DfsBuild, cfg, checks, data))
}

/// A table file is either a bare table or a `dfs-build` report.
fn read_table(path: &std::path::Path) -> Result<DfsTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let v = match v.pointer("/data/table") {
        Some(t) => t.clone(),
        None => v,
    };
    serde_json::from_value(v).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn run_dfs_check(cfg: &RunConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    let table = match &cfg.input {
        Some(p) => read_table(p)?,
        None => match cfg.measure_for(Command::DfsCheck) {
            MeasureSpec::Ising { j } => {
                let d = cfg.depth.max(cfg.n + 1);
                let units = ising_dfs_units(cfg.n, d)?;
                checks.push(Check::at_most("ising_dfs_exact_integer", dfs_check_integer(cfg.n, d, &units) as f64, 0.0));
                let oracle = energy_oracle_check(j, cfg.n.min(5), d.min(8))?;
                checks.push(Check::at_most("energy_vs_brute_force", oracle.max_deviation, cfg.tol * j.abs().max(1.0)));
                checks.push(Check::at_most("interior_flip_4J", (oracle.interior_flip - 4.0 * j).abs(), 0.0));
                checks.push(Check::at_most("boundary_flip_2J", (oracle.boundary_flip - 2.0 * j).abs(), 0.0));
                data.insert("energy_oracle".into(), to_value(&oracle));
                ising_dfs_table(j, cfg.n, d)?
            }
            spec @ MeasureSpec::Bernoulli { .. } => {
                let d = cfg.depth;
                DfsTable::from_fn(cfg.n, d, |x, w| crate::modular::log_delta_bits(&spec, x, d, w))?
            }
        },
    };
    let rep = dfs_check(&table);
    let scale = table.max_abs().max(1.0);
    let mut c = Check::at_most("dfs_condition", rep.max_violation / scale, cfg.tol);
    if let Some(w) = &rep.witness {
        c = c.with_witness(format!("{w:?}"));
    }
    checks.insert(0, c);
    data.insert("check".into(), to_value(&rep));
    // exactness is informative: a gauge exists at D = n, and per orbit beyond
    data.insert("exact".into(), json!(is_exact(&table).is_some()));
    Ok(Report::new(Command::DfsCheck, cfg, checks, Value::Object(data)))
}

fn ising_coupling(spec: &MeasureSpec) -> Result<f64> {
    match spec {
        MeasureSpec::Ising { j } => Ok(*j),
        _ => Err(Error::WrongMeasure("Ising")),
    }
}

fn run_ising_partition(cfg: &RunConfig) -> Result<Report> {
    let j = ising_coupling(&cfg.measure_for(Command::IsingPartition))?;
    let n = cfg.n.max(1);
    let mut rec = 0.0f64;
    let mut ratio = 0.0f64;
    for m in 1..=n {
        let r = partition_report(j, m);
        rec = rec.max(r.recursion_rel_dev);
        ratio = ratio.max(r.ratio_identity_rel_dev);
    }
    let r = partition_report(j, n);
    let checks = vec![
        Check::at_most("brute_force_vs_recursion", rec, cfg.tol),
        Check::at_most("ratio_identity", ratio, cfg.tol),
    ];
    let mut pj = 0.0f64;
    for k in 1..cfg.depth.max(2) {
        pj = pj.max(pushforward_projection_check(&MeasureSpec::ising(j)?, cfg.depth.max(2), k)?);
    }
    let mut checks = checks;
    checks.push(Check::at_most("projective_consistency", pj, cfg.tol));
    Ok(Report::new(Command::IsingPartition, cfg, checks, to_value(&r)))
}

fn run_ising_dynamics(cfg: &RunConfig) -> Result<Report> {
    let j = ising_coupling(&cfg.measure_for(Command::IsingDynamics))?;
    let spec = MeasureSpec::ising(j)?;
    let bern = MeasureSpec::bernoulli(0.3)?;
    let energy = TransitionEnergy { j };
    let modular = ModularHamiltonian { lambda: 0.3 };
    let control = PerturbedEnergy { base: energy, eps: 0.5 };
    let (n, d) = (cfg.n, cfg.depth.max(cfg.n + 1));
    let mut dev = Worst::new();
    let mut dev_modular = Worst::new();
    let mut norms = Worst::new();
    let mut swapped = 0.0f64;
    let mut control_dev = f64::INFINITY;
    let mut k = 0;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let f = random_element(&mut rng, n, d, 0.5);
        let psi = random_element(&mut rng, n, d, 0.5);
        for &t in &cfg.times {
            let r = heisenberg_check_with(&energy, &spec, &f, &psi, t)?;
            let scale = f.max_abs() * psi.max_abs() * (1u64 << n) as f64;
            dev.note(r.max_deviation / scale.max(1.0), k);
            swapped = swapped.max(r.swapped_phase_deviation);
            let nd = ((r.norms_after.l2 - r.norms_before.l2).abs() / r.norms_before.l2)
                .max((r.norms_after.hahn - r.norms_before.hahn).abs() / r.norms_before.hahn);
            norms.note(nd, k);
            let m = heisenberg_check_with(&modular, &bern, &f, &psi, t)?;
            dev_modular.note(m.max_deviation / scale.max(1.0), k);
            if trial < 10 && t != 0.0 {
                // fully supported elements, so the perturbation cannot cancel
                let mut rng = trial_rng(!cfg.seed, trial as u64);
                let f = random_element(&mut rng, n, d, 1.0);
                let psi = random_element(&mut rng, n, d, 1.0);
                let c = heisenberg_check_with(&control, &spec, &f, &psi, t)?;
                control_dev = control_dev.min(c.max_deviation);
            }
            k += 1;
        }
    }
    if !control_dev.is_finite() {
        control_dev = 0.0;
    }
    let seed = cfg.seed;
    let checks = vec![
        dev.at_most("heisenberg_equivalence", cfg.tol, seed),
        norms.at_most("norm_preservation", cfg.tol, seed),
        dev_modular.at_most("heisenberg_equivalence_modular", cfg.tol, seed),
        Check::at_least("non_cocycle_control", control_dev, 1e-3),
    ];
    let data = json!({
        "J": j,
        "times": cfg.times,
        "max_deviation": dev.value,
        "literal_phase_order_deviation": swapped,
        "non_cocycle_control_min_deviation": control_dev,
    });
    Ok(Report::new(Command::IsingDynamics, cfg, checks, data))
}

fn run_spectrum(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.measure_for(Command::Spectrum);
    let lambda = bernoulli_lambda(&spec)?;
    let s = modular_spectrum_points(lambda, cfg.n)?;
    let off: Vec<i64> = s.attained.iter().filter(|k| !s.lattice.contains(k)).copied().collect();
    let missing: Vec<i64> = s.lattice.iter().filter(|k| !s.attained.contains(k)).copied().collect();
    let exact: Vec<i64> = ExactBernoulli::from_spec(&spec)?.spectrum_indices(cfg.n)?.into_iter().collect();

    let mut log_dev = 0.0f64;
    for x in Prefix::all(cfg.n) {
        for w in enumerate_gamma(cfg.n) {
            let g = GroupoidElement::new(x, w)?;
            log_dev = log_dev.max((modular_hamiltonian_eval(lambda, g)? - modular_delta(&spec, g)?.ln()).abs());
        }
    }
    let checks = vec![
        Check::at_most("attained_off_lattice", off.len() as f64, 0.0),
        Check::at_most("lattice_points_missing", missing.len() as f64, 0.0),
        Check::at_most("exact_indices_mismatch", if exact == s.lattice { 0.0 } else { 1.0 }, 0.0),
        Check::at_most("hamiltonian_is_log_delta", log_dev, cfg.tol.max(1e-14)),
    ];
    let data = json!({ "spectrum": s, "points": s.points(), "exact_indices": exact });
    Ok(Report::new(Command::Spectrum, cfg, checks, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, depth: usize, trials: usize) -> RunConfig {
        RunConfig { n, depth, trials, ..RunConfig::default() }
    }

    #[test]
    fn every_command_passes_on_small_configs() {
        for cmd in Command::ALL {
            let r = run(cmd, &cfg(3, 4, 20)).unwrap();
            assert!(r.pass, "{cmd}: {:?}", r.failure);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        for cmd in [Command::Algebra, Command::Glimm, Command::DfsBuild] {
            let a = run(cmd, &cfg(3, 4, 10)).unwrap().to_json();
            let b = run(cmd, &cfg(3, 4, 10)).unwrap().to_json();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn overrides() {
        let base = RunConfig::default();
        let c = Overrides { j: Some(2.0), n: Some(2), ..Default::default() }.apply(base.clone()).unwrap();
        assert_eq!(c.measure, Some(MeasureSpec::Ising { j: 2.0 }));
        assert_eq!(c.n, 2);
        let c = Overrides { lambda: Some(0.2), ..Default::default() }.apply(base.clone()).unwrap();
        assert_eq!(c.lambdas, vec![0.2]);
        assert!(Overrides { n: Some(9), ..Default::default() }.apply(base.clone()).is_err());
        assert!(Overrides { lambda: Some(1.5), ..Default::default() }.apply(base).is_err());
    }

    #[test]
    fn config_file_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"n": 3, "measure": {"kind": "ising", "J": 0.5}}"#).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.depth, 6);
        assert_eq!(c.measure, Some(MeasureSpec::Ising { j: 0.5 }));
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn partition_example() {
        let c = RunConfig { measure: Some(MeasureSpec::Ising { j: 1.0 }), n: 2, ..RunConfig::default() };
        let r = run(Command::IsingPartition, &c).unwrap();
        assert!(r.pass);
        assert!((r.data["brute_force"].as_f64().unwrap() - 6.1723).abs() < 1e-4);
        assert!((r.data["cosh_power"].as_f64().unwrap() - 9.5244).abs() < 1e-4);
        assert_eq!(r.data["cosh_power_mismatch"], json!(true));
    }

    #[test]
    fn wrong_measure_is_a_usage_error() {
        let c = RunConfig { measure: Some(MeasureSpec::Ising { j: 1.0 }), ..cfg(2, 3, 1) };
        let e = run(Command::Glimm, &c).unwrap_err();
        assert_eq!(exit_code_for(&e), 2);
    }

    #[test]
    fn csv_projection() {
        let r = run(Command::Axioms, &cfg(2, 2, 1)).unwrap();
        let text = r.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "command,check,value,relation,threshold,pass,witness");
        assert_eq!(lines.next().unwrap(), "axioms,violations,0,<=,0,true,");
    }

    #[test]
    fn corrupted_table_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let mut t = ising_dfs_table(1.0, 2, 3).unwrap();
        t.set(5, FlipWord::site(2), 17.0).unwrap();
        std::fs::write(&path, serde_json::to_string(&t).unwrap()).unwrap();
        let c = RunConfig { input: Some(path), ..cfg(2, 3, 1) };
        let r = run(Command::DfsCheck, &c).unwrap();
        assert!(!r.pass);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failure.as_ref().unwrap().invariant, "dfs_condition");
    }
}
