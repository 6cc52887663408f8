//! The convolution algebra of the groupoid.
//!
//! An [`AlgebraElement`] is a finitely supported map from flip words to
//! cylinder functions, `F = Σ_w δ_w ⊗ F(·, w)`. All tables of one element
//! share a common depth, at least the largest horizon in its support.
//! Binary operations lift both operands to the larger depth first.
//!
//! Convolution does not depend on the measure (the Haar system is counting
//! measure on each target fibre). Involution, norms, the modular operator and
//! conjugation do, through [`MeasureSpec`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cylinder::CylinderFunction;
use crate::error::{Error, Result};
use crate::groupoid::{check_depth, FlipWord, GroupoidElement};
use crate::measures::{integrate, integrate_with, MeasureSpec};
use crate::modular::{delta_inv_bits, log_delta_bits};
use crate::numeric::compensated_sum;

type Table = CylinderFunction<Complex64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TermRepr>", into = "Vec<TermRepr>")]
pub struct AlgebraElement {
    depth: usize,
    terms: BTreeMap<FlipWord, Table>,
}

impl Default for AlgebraElement {
    fn default() -> Self {
        AlgebraElement::zero()
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement { depth: 0, terms: BTreeMap::new() }
    }

    /// `E = δ_0 ⊗ 1`, the unit for convolution.
    pub fn unit() -> Self {
        Self::rank_one(FlipWord::EMPTY, &Table::constant(0, Complex64::new(1.0, 0.0)).unwrap()).unwrap()
    }

    /// `δ_w ⊗ f`.
    pub fn rank_one(w: FlipWord, f: &Table) -> Result<Self> {
        Self::from_terms([(w, f.clone())])
    }

    /// Builds an element from `(word, table)` pairs; repeated words are summed.
    pub fn from_terms<I: IntoIterator<Item = (FlipWord, Table)>>(terms: I) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let depth = terms.iter().map(|(w, f)| w.horizon().max(f.depth())).max().unwrap_or(0);
        check_depth(depth)?;
        let mut out: BTreeMap<FlipWord, Table> = BTreeMap::new();
        for (w, f) in terms {
            let f = f.lift(depth)?;
            match out.remove(&w) {
                Some(prev) => {
                    out.insert(w, prev.add(&f)?);
                }
                None => {
                    out.insert(w, f);
                }
            }
        }
        out.retain(|_, f| !f.is_zero());
        Ok(AlgebraElement { depth, terms: out })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Largest horizon among the support words.
    pub fn max_horizon(&self) -> usize {
        self.terms.keys().map(|w| w.horizon()).max().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = FlipWord> + '_ {
        self.terms.keys().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (FlipWord, &Table)> {
        self.terms.iter().map(|(w, f)| (*w, f))
    }

    pub fn term(&self, w: FlipWord) -> Option<&Table> {
        self.terms.get(&w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `F(x, w)` for a raw prefix bitmask (bits past the depth are ignored).
    pub fn value(&self, bits: u64, w: FlipWord) -> Complex64 {
        self.terms.get(&w).map_or(Complex64::new(0.0, 0.0), |f| f.at(bits))
    }

    pub fn eval(&self, g: GroupoidElement) -> Result<Complex64> {
        if g.point().depth() < self.depth {
            return Err(Error::DepthTooSmall { required: self.depth, actual: g.point().depth() });
        }
        Ok(self.value(g.point().bits(), g.flips()))
    }

    pub fn lift(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::DepthTooSmall { required: self.depth, actual: depth });
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        check_depth(depth)?;
        let terms = self.terms.iter().map(|(w, f)| Ok((*w, f.lift(depth)?))).collect::<Result<_>>()?;
        Ok(AlgebraElement { depth, terms })
    }

    /// Rewrites every stored value as `f(x, w, F(x, w))`.
    pub fn pointwise(&self, mut f: impl FnMut(u64, FlipWord, Complex64) -> Result<Complex64>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (w, tab) in &self.terms {
            let values =
                tab.values().iter().enumerate().map(|(x, v)| f(x as u64, *w, *v)).collect::<Result<Vec<_>>>()?;
            terms.insert(*w, Table::from_values(self.depth, values)?);
        }
        terms.retain(|_, t: &mut Table| !t.is_zero());
        Ok(AlgebraElement { depth: self.depth, terms })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|(w, f)| (*w, f.scale(c))).filter(|(_, f)| !f.is_zero()).collect();
        AlgebraElement { depth: self.depth, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).map(|(w, f)| (*w, f.clone())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().flat_map(|f| f.values().iter().map(|v| v.norm())).fold(0.0, f64::max)
    }

    /// `max_{x, w} |F(x, w) - G(x, w)|` at the common depth.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.depth.max(other.depth);
        let a = self.lift(d)?;
        let b = other.lift(d)?;
        let mut worst = 0.0f64;
        for w in a.terms.keys().chain(b.terms.keys()) {
            for x in 0..1u64 << d {
                worst = worst.max((a.value(x, *w) - b.value(x, *w)).norm());
            }
        }
        Ok(worst)
    }

    /// `max_abs_diff` scaled by `max(|F|_∞, |G|_∞, 1)`.
    pub fn rel_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.max_abs_diff(other)? / self.max_abs().max(other.max_abs()).max(1.0))
    }
}

/// Serialized form of one rank-one term.
#[derive(Serialize, Deserialize)]
struct TermRepr {
    flips: FlipWord,
    depth: usize,
    values: Vec<[f64; 2]>,
}

impl From<AlgebraElement> for Vec<TermRepr> {
    fn from(e: AlgebraElement) -> Self {
        e.terms
            .into_iter()
            .map(|(flips, f)| TermRepr {
                flips,
                depth: f.depth(),
                values: f.values().iter().map(|v| [v.re, v.im]).collect(),
            })
            .collect()
    }
}

impl TryFrom<Vec<TermRepr>> for AlgebraElement {
    type Error = Error;
    fn try_from(terms: Vec<TermRepr>) -> Result<Self> {
        let parsed = terms
            .into_iter()
            .map(|t| {
                let values = t.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                Ok((t.flips, Table::from_values(t.depth, values)?))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::from_terms(parsed)
    }
}

fn lift_pair(f: &AlgebraElement, g: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    let d = f.depth.max(g.depth);
    Ok((f.lift(d)?, g.lift(d)?))
}

/// Lifts `F` so that `Δ` is defined on its whole support.
fn lift_for_delta(f: &AlgebraElement, spec: &MeasureSpec) -> Result<AlgebraElement> {
    f.lift(f.depth.max(spec.delta_depth(f.max_horizon())))
}

/// `(F ⋆ G)(x, w) = Σ_y F(x, y) G(x ⊕ y, w ⊕ y)`.
pub fn convolve(f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement> {
    let (f, g) = lift_pair(f, g)?;
    let size = 1usize << f.depth;
    let mut out: BTreeMap<FlipWord, Vec<Complex64>> = BTreeMap::new();
    for (y, fy) in &f.terms {
        let ym = y.mask() as usize;
        let fy = fy.values();
        for (v, gv) in &g.terms {
            let gv = gv.values();
            let acc = out.entry(*y ^ *v).or_insert_with(|| vec![Complex64::new(0.0, 0.0); size]);
            for x in 0..size {
                acc[x] += fy[x] * gv[x ^ ym];
            }
        }
    }
    let terms =
        out.into_iter().map(|(w, vals)| Ok((w, Table::from_values(f.depth, vals)?))).collect::<Result<Vec<_>>>()?;
    AlgebraElement::from_terms(terms).and_then(|e| e.lift(f.depth))
}

/// `π_F ψ = F ⋆ ψ`, the left regular representation on `L²(𝒢, μ)`.
pub fn apply(f: &AlgebraElement, psi: &AlgebraElement) -> Result<AlgebraElement> {
    convolve(f, psi)
}

/// `F†(x, w) = Δ⁻¹((x, w)) · conj F(x ⊕ w, w)`.
pub fn involution(f: &AlgebraElement, spec: &MeasureSpec) -> Result<AlgebraElement> {
    let f = lift_for_delta(f, spec)?;
    let d = f.depth;
    let src = f.clone();
    f.pointwise(|x, w, _| Ok(delta_inv_bits(spec, x, d, w)? * src.value(x ^ w.mask(), w).conj()))
}

/// `(JF)(x, w) = Δ^{-1/2}((x, w)) · conj F(x ⊕ w, w)`.
pub fn modular_conjugation(f: &AlgebraElement, spec: &MeasureSpec) -> Result<AlgebraElement> {
    let f = lift_for_delta(f, spec)?;
    let d = f.depth;
    let src = f.clone();
    f.pointwise(|x, w, _| Ok((-0.5 * log_delta_bits(spec, x, d, w)?).exp() * src.value(x ^ w.mask(), w).conj()))
}

/// `(Δ̂ᵗ F)(x, w) = Δ((x, w))ᵗ F(x, w)` for complex `t`.
pub fn modular_operator_pow(f: &AlgebraElement, t: Complex64, spec: &MeasureSpec) -> Result<AlgebraElement> {
    let f = lift_for_delta(f, spec)?;
    let d = f.depth;
    f.pointwise(|x, w, v| Ok(v * (t * log_delta_bits(spec, x, d, w)?).exp()))
}

/// `⟨F, G⟩ = Σ_w ∫ conj F(x, w) G(x, w) dν(x)`.
pub fn inner_product(f: &AlgebraElement, g: &AlgebraElement, spec: &MeasureSpec) -> Result<Complex64> {
    let (f, g) = lift_pair(f, g)?;
    let weights = spec.weight_table(f.depth)?;
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (w, fw) in &f.terms {
        if let Some(gw) = g.terms.get(w) {
            let prod: Vec<Complex64> = fw.values().iter().zip(gw.values()).map(|(a, b)| a.conj() * b).collect();
            let z = integrate_with(&weights, &prod);
            re.push(z.re);
            im.push(z.im);
        }
    }
    Ok(Complex64::new(compensated_sum(re), compensated_sum(im)))
}

pub fn l2_norm(f: &AlgebraElement, spec: &MeasureSpec) -> Result<f64> {
    let weights = spec.weight_table(f.depth)?;
    let per_word = f.terms.values().map(|fw| {
        let sq: Vec<Complex64> = fw.values().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        integrate_with(&weights, &sq).re
    });
    Ok(compensated_sum(per_word).sqrt())
}

/// The two branches of the Hahn norm: `sup_x Σ_w |F(x, w)|` and
/// `sup_x Σ_w Δ⁻¹((x, w)) |F(x ⊕ w, w)|`.
pub fn hahn_branches(f: &AlgebraElement, spec: &MeasureSpec) -> Result<(f64, f64)> {
    let f = lift_for_delta(f, spec)?;
    let d = f.depth;
    let mut a = 0.0f64;
    let mut b = 0.0f64;
    for x in 0..1u64 << d {
        let mut sa = Vec::with_capacity(f.terms.len());
        let mut sb = Vec::with_capacity(f.terms.len());
        for (w, fw) in &f.terms {
            sa.push(fw.at(x).norm());
            sb.push(delta_inv_bits(spec, x, d, *w)? * fw.at(x ^ w.mask()).norm());
        }
        a = a.max(compensated_sum(sa));
        b = b.max(compensated_sum(sb));
    }
    Ok((a, b))
}

pub fn hahn_norm(f: &AlgebraElement, spec: &MeasureSpec) -> Result<f64> {
    let (a, b) = hahn_branches(f, spec)?;
    Ok(a.max(b))
}

/// `F_w(x, x°) = δ_w(x°) Δ((x, w))^{-1/2}`, whose left action is the
/// unitary `V_w`.
pub fn pukanszky_v(w: FlipWord, spec: &MeasureSpec) -> Result<AlgebraElement> {
    let d = spec.delta_depth(w.horizon());
    let tab = Table::from_fn(d, |x| {
        let l = log_delta_bits(spec, x.bits(), d, w).expect("depth chosen for delta");
        Complex64::new((-0.5 * l).exp(), 0.0)
    })?;
    AlgebraElement::rank_one(w, &tab)
}

/// `G_φ = δ_0 ⊗ φ`, whose left action is multiplication by `φ`.
pub fn pukanszky_l(phi: &CylinderFunction<Complex64>) -> AlgebraElement {
    AlgebraElement::rank_one(FlipWord::EMPTY, phi).expect("table already within the depth cap")
}

/// `τ(F) = ∫ F(x, 0) dν(x) = ⟨Ψ, F ⋆ Ψ⟩` with `Ψ = E`.
pub fn canonical_weight(f: &AlgebraElement, spec: &MeasureSpec) -> Result<Complex64> {
    match f.term(FlipWord::EMPTY) {
        Some(t) => integrate(spec, t),
        None => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// Non-traceality witness built on the unweighted shift `D = δ_{e_1} ⊗ 1`
/// and its adjoint.
#[derive(Debug, Clone, Serialize)]
pub struct TraceWitness {
    pub lambda: Option<f64>,
    /// `|τ(D ⋆ D†) - τ(D† ⋆ D)|`.
    pub violation: f64,
    /// `|∫ Δ⁻¹((x, e_1)) dν - ∫ Δ((x, e_1)) dν|`, integrated directly.
    pub margin: f64,
}

pub fn trace_witness(spec: &MeasureSpec) -> Result<TraceWitness> {
    let e1 = FlipWord::site(1);
    let d = spec.delta_depth(1);
    let shift = AlgebraElement::rank_one(e1, &Table::constant(d, Complex64::new(1.0, 0.0))?)?;
    let adj = involution(&shift, spec)?;
    let lhs = canonical_weight(&convolve(&shift, &adj)?, spec)?;
    let rhs = canonical_weight(&convolve(&adj, &shift)?, spec)?;

    let inv = CylinderFunction::from_fn(d, |x| delta_inv_bits(spec, x.bits(), d, e1).expect("depth"))?;
    let fwd = inv.map(|v| 1.0 / v);
    let margin = (crate::measures::integrate_real(spec, &inv)? - crate::measures::integrate_real(spec, &fwd)?).abs();
    Ok(TraceWitness { lambda: spec.uniform_lambda(), violation: (lhs - rhs).norm(), margin })
}
