//! Cylinder measures on `Ω∞`: the Bernoulli product measure and the Ising
//! Boltzmann measure with free boundary, together with the consistency and
//! covariance checks that make them Haar data for the groupoid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cylinder::CylinderFunction;
use crate::error::{Error, Result};
use crate::groupoid::{check_depth, FlipWord, Prefix};
use crate::ising;
use crate::modular;
use crate::numeric::{compensated_sum, compensated_sum_c, CompensatedSum};

/// Which measure sits on the base of the groupoid.
///
/// JSON form: `{"kind":"bernoulli","lambda":0.3}` or `{"kind":"ising","J":1.0}`.
/// A Bernoulli spec may carry per-site overrides in `sites` (site 1 first);
/// sites beyond the list use `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum MeasureSpec {
    Bernoulli { lambda: f64, sites: Vec<f64> },
    Ising { j: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecRepr {
    Bernoulli {
        lambda: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        sites: Vec<f64>,
    },
    Ising {
        #[serde(rename = "J")]
        j: f64,
    },
}

impl TryFrom<SpecRepr> for MeasureSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r {
            SpecRepr::Bernoulli { lambda, sites } => MeasureSpec::Bernoulli { lambda, sites },
            SpecRepr::Ising { j } => MeasureSpec::Ising { j },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<MeasureSpec> for SpecRepr {
    fn from(s: MeasureSpec) -> Self {
        match s {
            MeasureSpec::Bernoulli { lambda, sites } => SpecRepr::Bernoulli { lambda, sites },
            MeasureSpec::Ising { j } => SpecRepr::Ising { j },
        }
    }
}

fn check_probability(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 && l < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("site probability {l} outside (0, 1)")))
    }
}

impl MeasureSpec {
    pub fn bernoulli(lambda: f64) -> Result<Self> {
        let s = MeasureSpec::Bernoulli { lambda, sites: Vec::new() };
        s.validate()?;
        Ok(s)
    }

    /// Bernoulli measure with `λ_i` given for the first sites and `tail` after.
    pub fn bernoulli_sites(sites: Vec<f64>, tail: f64) -> Result<Self> {
        let s = MeasureSpec::Bernoulli { lambda: tail, sites };
        s.validate()?;
        Ok(s)
    }

    pub fn ising(j: f64) -> Result<Self> {
        let s = MeasureSpec::Ising { j };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Bernoulli { lambda, sites } => {
                check_probability(*lambda)?;
                sites.iter().try_for_each(|&l| check_probability(l))
            }
            MeasureSpec::Ising { j } if j.is_finite() => Ok(()),
            MeasureSpec::Ising { j } => Err(Error::InvalidSpec(format!("coupling {j} is not finite"))),
        }
    }

    /// `λ_k` for 1-indexed site `k` (Bernoulli only).
    pub fn lambda_at(&self, k: usize) -> Option<f64> {
        match self {
            MeasureSpec::Bernoulli { lambda, sites } => Some(sites.get(k.wrapping_sub(1)).copied().unwrap_or(*lambda)),
            MeasureSpec::Ising { .. } => None,
        }
    }

    /// Constant `λ` when this is a homogeneous Bernoulli measure.
    pub fn uniform_lambda(&self) -> Option<f64> {
        match self {
            MeasureSpec::Bernoulli { lambda, sites } if sites.iter().all(|l| l == lambda) => Some(*lambda),
            _ => None,
        }
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self, MeasureSpec::Bernoulli { .. })
    }

    /// How many sites past a word's horizon the modular function reads.
    pub fn reach(&self) -> usize {
        match self {
            MeasureSpec::Bernoulli { .. } => 0,
            MeasureSpec::Ising { .. } => 1,
        }
    }

    /// Depth needed to evaluate `Δ` on a word of the given horizon.
    pub fn delta_depth(&self, horizon: usize) -> usize {
        match self {
            MeasureSpec::Bernoulli { .. } => horizon,
            MeasureSpec::Ising { .. } => horizon + 1,
        }
    }

    /// Weights of every depth-`depth` cylinder, indexed by prefix bitmask.
    pub fn weight_table(&self, depth: usize) -> Result<Vec<f64>> {
        check_depth(depth)?;
        match self {
            MeasureSpec::Bernoulli { .. } => {
                let lambdas: Vec<f64> = (1..=depth).map(|k| self.lambda_at(k).unwrap()).collect();
                Ok((0..1u64 << depth)
                    .map(|bits| {
                        lambdas.iter().enumerate().map(|(i, &l)| if bits >> i & 1 == 0 { l } else { 1.0 - l }).product()
                    })
                    .collect())
            }
            MeasureSpec::Ising { j } => {
                let raw: Vec<f64> = (0..1u64 << depth).map(|b| ising::chain_energy(*j, b, depth).exp()).collect();
                let z = compensated_sum(raw.iter().copied());
                Ok(raw.into_iter().map(|w| w / z).collect())
            }
        }
    }
}

/// `ν(C(p))` for the cylinder generated by `p`.
pub fn cylinder_weight(spec: &MeasureSpec, p: Prefix) -> Result<f64> {
    spec.validate()?;
    match spec {
        MeasureSpec::Bernoulli { .. } => Ok((1..=p.depth())
            .map(|k| {
                let l = spec.lambda_at(k).unwrap();
                if p.bit(k) == 0 {
                    l
                } else {
                    1.0 - l
                }
            })
            .product()),
        MeasureSpec::Ising { j } => {
            let z = partition_brute_force(*j, p.depth());
            Ok(ising::chain_energy(*j, p.bits(), p.depth()).exp() / z)
        }
    }
}

/// `∫ f dν` over the cylinders of `f`'s depth.
pub fn integrate(spec: &MeasureSpec, f: &CylinderFunction<Complex64>) -> Result<Complex64> {
    let w = spec.weight_table(f.depth())?;
    Ok(integrate_with(&w, f.values()))
}

pub fn integrate_real(spec: &MeasureSpec, f: &CylinderFunction<f64>) -> Result<f64> {
    let w = spec.weight_table(f.depth())?;
    Ok(compensated_sum(w.iter().zip(f.values()).map(|(w, v)| w * v)))
}

pub(crate) fn integrate_with(weights: &[f64], values: &[Complex64]) -> Complex64 {
    debug_assert_eq!(weights.len(), values.len());
    compensated_sum_c(weights.iter().zip(values).map(|(&w, &v)| v * w))
}

/// `Σ_{p ∈ {0,1}^n} e^{H_n(p)}`, summed directly.
pub fn partition_brute_force(j: f64, n: usize) -> f64 {
    assert!(n <= crate::groupoid::MAX_SITES);
    let mut acc = CompensatedSum::new();
    for bits in 0..1u64 << n {
        acc.add(ising::chain_energy(j, bits, n).exp());
    }
    acc.value()
}

/// Same sum by the transfer recursion over the last spin.
pub fn partition_transfer(j: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    // partial[s]: sum over chains ending in spin s (s = 0 ↔ x̄ = -1).
    let mut partial = [1.0f64, 1.0];
    for _ in 1..n {
        let mut next = [0.0f64; 2];
        for (t, slot) in next.iter_mut().enumerate() {
            for (s, &p) in partial.iter().enumerate() {
                let ss = if s == t { 1.0 } else { -1.0 };
                *slot += p * (-j * ss).exp();
            }
        }
        partial = next;
    }
    partial[0] + partial[1]
}

/// `(2 cosh J)^n`, the periodic-style closed form; not the free-boundary value.
pub fn partition_cosh_power(j: f64, n: usize) -> f64 {
    (2.0 * j.cosh()).powi(n as i32)
}

/// `2 (2 cosh J)^{n-1}`, the free-boundary value.
pub fn partition_closed_form(j: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0 * (2.0 * j.cosh()).powi(n as i32 - 1)
    }
}

/// `Z_n` computed by the transfer recursion.
pub fn partition_function(j: f64, n: usize) -> f64 {
    partition_transfer(j, n)
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    #[serde(rename = "J")]
    pub j: f64,
    pub n: usize,
    pub brute_force: f64,
    pub recursion: f64,
    pub closed_form: f64,
    /// `(2 cosh J)^n`, reported for comparison.
    pub cosh_power: f64,
    pub recursion_rel_dev: f64,
    pub cosh_power_mismatch: bool,
    /// Largest relative deviation of `Z_n / Z_k` from `(2 cosh J)^{n-k}` over `1 ≤ k < n`.
    pub ratio_identity_rel_dev: f64,
}

pub fn partition_report(j: f64, n: usize) -> PartitionReport {
    let brute = partition_brute_force(j, n);
    let rec = partition_transfer(j, n);
    let cosh_power = partition_cosh_power(j, n);
    let ratio_dev = (1..n)
        .map(|k| {
            let lhs = brute / partition_brute_force(j, k);
            let rhs = (2.0 * j.cosh()).powi((n - k) as i32);
            (lhs - rhs).abs() / rhs
        })
        .fold(0.0, f64::max);
    PartitionReport {
        j,
        n,
        brute_force: brute,
        recursion: rec,
        closed_form: partition_closed_form(j, n),
        cosh_power,
        recursion_rel_dev: (brute - rec).abs() / brute,
        cosh_power_mismatch: (brute - cosh_power).abs() > 1e-12 * brute,
        ratio_identity_rel_dev: ratio_dev,
    }
}

/// Max absolute deviation between `(π_{n,k})_* ν^{(n)}` and `ν^{(k)}`.
pub fn pushforward_projection_check(spec: &MeasureSpec, n: usize, k: usize) -> Result<f64> {
    if !(n > k && k >= 1) {
        return Err(Error::Malformed(format!("projection needs n > k >= 1, got n={n}, k={k}")));
    }
    let fine = spec.weight_table(n)?;
    let coarse = spec.weight_table(k)?;
    let mut marginal = vec![CompensatedSum::new(); 1 << k];
    let mask = (1u64 << k) - 1;
    for (bits, w) in fine.iter().enumerate() {
        marginal[(bits as u64 & mask) as usize].add(*w);
    }
    Ok(marginal.iter().zip(&coarse).map(|(m, c)| (m.value() - c).abs()).fold(0.0, f64::max))
}

/// Max relative deviation of `ν(p ⊕ w)` from `Δ⁻¹((p, w)) ν(p)` over all
/// cylinders of the given depth.
pub fn translation_covariance_check(spec: &MeasureSpec, w: FlipWord, depth: usize) -> Result<f64> {
    let need = spec.delta_depth(w.horizon());
    if depth < need {
        return Err(Error::DepthTooSmall { required: need, actual: depth });
    }
    let weights = spec.weight_table(depth)?;
    let mut worst = 0.0f64;
    for p in Prefix::all(depth) {
        let lhs = weights[(p.bits() ^ w.mask()) as usize];
        let rhs = modular::delta_inv_bits(spec, p.bits(), depth, w)? * weights[p.bits() as usize];
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::psi;

    fn brute_h(j: f64, bits: &[i32]) -> f64 {
        // independent oracle in ±1 spin language
        let s: Vec<f64> = bits.iter().map(|&b| (2 * b - 1) as f64).collect();
        -j * s.windows(2).map(|w| w[0] * w[1]).sum::<f64>()
    }

    #[test]
    fn bernoulli_weights() {
        let half = MeasureSpec::bernoulli(0.5).unwrap();
        assert_eq!(cylinder_weight(&half, Prefix::from_bits(&[0, 1, 0]).unwrap()).unwrap(), 0.125);
        let s = MeasureSpec::bernoulli(0.3).unwrap();
        assert_eq!(cylinder_weight(&s, Prefix::from_bits(&[0]).unwrap()).unwrap(), 0.3);
        assert_eq!(cylinder_weight(&s, Prefix::from_bits(&[1]).unwrap()).unwrap(), 0.7);
    }

    #[test]
    fn boltzmann_depth_one_is_uniform() {
        for j in [-2.0, 0.0, 0.7, 3.0] {
            let s = MeasureSpec::ising(j).unwrap();
            for b in [0, 1] {
                let w = cylinder_weight(&s, Prefix::from_bits(&[b]).unwrap()).unwrap();
                assert!((w - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn invalid_lambda() {
        assert!(matches!(MeasureSpec::bernoulli(0.0), Err(Error::InvalidSpec(_))));
        assert!(MeasureSpec::bernoulli(1.0).is_err());
        assert!(MeasureSpec::bernoulli_sites(vec![0.2, 1.5], 0.3).is_err());
        assert!(MeasureSpec::ising(f64::NAN).is_err());
    }

    #[test]
    fn partition_examples() {
        for n in 1..=6 {
            assert_eq!(partition_brute_force(0.0, n), (1u64 << n) as f64);
        }
        // four configurations of two spins: e^{-1} twice, e^{+1} twice
        let oracle = 2.0 * (-1.0f64).exp() + 2.0 * 1.0f64.exp();
        assert!((partition_brute_force(1.0, 2) - oracle).abs() < 1e-14);
        assert!((oracle - 6.1723).abs() < 1e-4);
        assert!((partition_cosh_power(1.0, 2) - 9.5244).abs() < 1e-4);
    }

    #[test]
    fn transfer_matches_brute_force() {
        for j in [-1.3, -0.2, 0.0, 0.5, 1.0, 2.0] {
            for n in 1..=12 {
                let b = partition_brute_force(j, n);
                let t = partition_transfer(j, n);
                assert!((b - t).abs() <= 1e-12 * b, "J={j} n={n}");
                assert!((b - partition_closed_form(j, n)).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn partition_report_flags_mismatch() {
        let r = partition_report(1.0, 2);
        assert!(r.cosh_power_mismatch);
        assert!(r.ratio_identity_rel_dev < 1e-12);
        assert!(!partition_report(0.0, 3).cosh_power_mismatch);
    }

    #[test]
    fn boltzmann_weights_match_oracle() {
        let j = 0.8;
        let s = MeasureSpec::ising(j).unwrap();
        let table = s.weight_table(4).unwrap();
        let mut z = 0.0;
        let configs: Vec<Vec<i32>> = (0..16).map(|b| (0..4).map(|i| (b >> i) & 1).collect()).collect();
        for c in &configs {
            z += brute_h(j, c).exp();
        }
        for (b, c) in configs.iter().enumerate() {
            assert!((table[b] - brute_h(j, c).exp() / z).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization() {
        for spec in [
            MeasureSpec::bernoulli(0.25).unwrap(),
            MeasureSpec::bernoulli_sites(vec![0.1, 0.6, 0.45], 0.3).unwrap(),
            MeasureSpec::ising(1.1).unwrap(),
            MeasureSpec::ising(-0.4).unwrap(),
        ] {
            for d in 0..=12 {
                let total = compensated_sum(spec.weight_table(d).unwrap());
                assert!((total - 1.0).abs() <= 1e-12, "{spec:?} depth {d}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let b = MeasureSpec::bernoulli(0.3).unwrap();
        assert!(pushforward_projection_check(&b, 6, 3).unwrap() < 1e-15);
        let i = MeasureSpec::ising(0.7).unwrap();
        assert!(pushforward_projection_check(&i, 5, 2).unwrap() < 1e-12);
        let z = MeasureSpec::ising(0.0).unwrap();
        assert_eq!(pushforward_projection_check(&z, 4, 1).unwrap(), 0.0);
        assert!(pushforward_projection_check(&b, 2, 2).is_err());
    }

    #[test]
    fn projection_consistency_sweep() {
        for spec in [MeasureSpec::bernoulli(0.2).unwrap(), MeasureSpec::ising(1.3).unwrap()] {
            for n in 2..=10 {
                for k in 1..n {
                    assert!(pushforward_projection_check(&spec, n, k).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn covariance_examples() {
        let b = MeasureSpec::bernoulli(0.3).unwrap();
        assert_eq!(translation_covariance_check(&b, FlipWord::EMPTY, 3).unwrap(), 0.0);
        assert!(translation_covariance_check(&b, FlipWord::site(1), 3).unwrap() < 1e-12);
        let i = MeasureSpec::ising(1.0).unwrap();
        assert!(translation_covariance_check(&i, FlipWord::site(2), 4).unwrap() < 1e-12);
        assert!(matches!(
            translation_covariance_check(&i, FlipWord::site(4), 4),
            Err(Error::DepthTooSmall { required: 5, actual: 4 })
        ));
    }

    #[test]
    fn integrate_examples() {
        let s = MeasureSpec::bernoulli(0.3).unwrap();
        let c = CylinderFunction::constant(3, Complex64::new(2.0, -1.0)).unwrap();
        assert!((integrate(&s, &c).unwrap() - Complex64::new(2.0, -1.0)).norm() < 1e-15);
        let m = integrate_real(&s, &psi(1)).unwrap();
        assert!((m - (2.0 * 0.3 - 1.0)).abs() < 1e-15);
        let half = MeasureSpec::bernoulli(0.5).unwrap();
        let prod = psi(1).mul(&psi(2)).unwrap();
        assert_eq!(integrate_real(&half, &prod).unwrap(), 0.0);
    }

    #[test]
    fn integration_is_padding_invariant() {
        let s = MeasureSpec::ising(0.9).unwrap();
        let f = psi(2).mul(&psi(3)).unwrap().to_complex();
        let base = integrate(&s, &f).unwrap();
        for d in 4..=9 {
            assert!((integrate(&s, &f.lift(d).unwrap()).unwrap() - base).norm() < 1e-13);
        }
    }

    #[test]
    fn spec_json() {
        let b: MeasureSpec = serde_json::from_str(r#"{"kind":"bernoulli","lambda":0.3}"#).unwrap();
        assert_eq!(b, MeasureSpec::bernoulli(0.3).unwrap());
        let i: MeasureSpec = serde_json::from_str(r#"{"kind":"ising","J":1.0}"#).unwrap();
        assert_eq!(i, MeasureSpec::ising(1.0).unwrap());
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"kind":"bernoulli","lambda":0.3}"#);
        assert_eq!(serde_json::to_string(&i).unwrap(), r#"{"kind":"ising","J":1.0}"#);
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"kind":"bernoulli","lambda":1.2}"#).is_err());
    }
}
