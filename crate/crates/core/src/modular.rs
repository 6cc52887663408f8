//! The modular function `Δ: 𝒢 → ℝ₊` attached to a measure spec.
//!
//! Bernoulli: `Δ(x, w) = Π_{i ∈ w} ((1-λ_i)/λ_i)^{2x_i - 1}`.
//! Ising: `Δ_H(x, w) = e^{-S(x, w)}` with `S` the transition energy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{enumerate_gamma, FlipWord, GroupoidElement, Prefix};
use crate::ising;
use crate::measures::MeasureSpec;

fn check(spec: &MeasureSpec, depth: usize, w: FlipWord) -> Result<()> {
    let need = spec.delta_depth(w.horizon());
    if depth < need {
        return Err(Error::DepthTooSmall { required: need, actual: depth });
    }
    Ok(())
}

/// `log Δ((x, w))` for a raw prefix bitmask.
pub(crate) fn log_delta_bits(spec: &MeasureSpec, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
    check(spec, depth, w)?;
    Ok(match spec {
        MeasureSpec::Bernoulli { .. } => w
            .sites()
            .map(|k| {
                let l = spec.lambda_at(k).unwrap();
                let r = ((1.0 - l) / l).ln();
                if bits >> (k - 1) & 1 == 1 {
                    r
                } else {
                    -r
                }
            })
            .sum(),
        MeasureSpec::Ising { j } => -ising::transition_energy_bits(*j, bits, depth, w)?,
    })
}

pub(crate) fn delta_bits(spec: &MeasureSpec, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
    check(spec, depth, w)?;
    match spec {
        MeasureSpec::Bernoulli { .. } => Ok(w
            .sites()
            .map(|k| {
                let l = spec.lambda_at(k).unwrap();
                if bits >> (k - 1) & 1 == 1 {
                    (1.0 - l) / l
                } else {
                    l / (1.0 - l)
                }
            })
            .product()),
        MeasureSpec::Ising { .. } => Ok(log_delta_bits(spec, bits, depth, w)?.exp()),
    }
}

pub(crate) fn delta_inv_bits(spec: &MeasureSpec, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
    check(spec, depth, w)?;
    match spec {
        MeasureSpec::Bernoulli { .. } => Ok(w
            .sites()
            .map(|k| {
                let l = spec.lambda_at(k).unwrap();
                if bits >> (k - 1) & 1 == 1 {
                    l / (1.0 - l)
                } else {
                    (1.0 - l) / l
                }
            })
            .product()),
        MeasureSpec::Ising { .. } => Ok((-log_delta_bits(spec, bits, depth, w)?).exp()),
    }
}

/// `Δ(g)`.
pub fn modular_delta(spec: &MeasureSpec, g: GroupoidElement) -> Result<f64> {
    delta_bits(spec, g.point().bits(), g.point().depth(), g.flips())
}

/// The modular function of a measure spec, as a groupoid homomorphism into `ℝ₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularFunction {
    spec: MeasureSpec,
}

impl ModularFunction {
    pub fn new(spec: MeasureSpec) -> Self {
        ModularFunction { spec }
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn eval(&self, g: GroupoidElement) -> Result<f64> {
        modular_delta(&self.spec, g)
    }

    pub fn eval_inv(&self, g: GroupoidElement) -> Result<f64> {
        delta_inv_bits(&self.spec, g.point().bits(), g.point().depth(), g.flips())
    }

    pub fn log(&self, g: GroupoidElement) -> Result<f64> {
        log_delta_bits(&self.spec, g.point().bits(), g.point().depth(), g.flips())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    pub horizon: usize,
    pub depth: usize,
    pub pairs_checked: usize,
    /// Max relative deviation of `Δ(αβ)` from `Δ(α)Δ(β)`.
    pub product_rel_dev: f64,
    /// Max relative deviation of `Δ(α⁻¹)` from `1/Δ(α)`.
    pub inverse_rel_dev: f64,
    /// Max `|Δ((x, 0)) - 1|`.
    pub unit_dev: f64,
}

/// Exhaustive check that `Δ` is a homomorphism on all composable pairs with
/// flips in `Γ_n`, at the smallest depth on which `Δ` is defined.
pub fn homomorphism_check(spec: &MeasureSpec, n: usize) -> Result<HomomorphismReport> {
    let depth = spec.delta_depth(n);
    let f = ModularFunction::new(spec.clone());
    let gamma = enumerate_gamma(n);
    let mut rep = HomomorphismReport {
        horizon: n,
        depth,
        pairs_checked: 0,
        product_rel_dev: 0.0,
        inverse_rel_dev: 0.0,
        unit_dev: 0.0,
    };
    for x in Prefix::all(depth) {
        rep.unit_dev = rep.unit_dev.max((f.eval(GroupoidElement::identity(x))? - 1.0).abs());
        for &u in &gamma {
            let a = GroupoidElement::new(x, u)?;
            let da = f.eval(a)?;
            let dinv = f.eval(a.inverse())?;
            rep.inverse_rel_dev = rep.inverse_rel_dev.max((dinv * da - 1.0).abs());
            for &v in &gamma {
                let b = GroupoidElement::new(a.source(), v)?;
                let ab = a.compose(b)?;
                let lhs = f.eval(ab)?;
                let rhs = da * f.eval(b)?;
                rep.product_rel_dev = rep.product_rel_dev.max((lhs - rhs).abs() / lhs.max(rhs));
                rep.pairs_checked += 1;
            }
        }
    }
    Ok(rep)
}
