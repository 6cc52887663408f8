//! Ising transition energies, the modular Hamiltonian of the Bernoulli
//! measure, and modular (Tomita-Takesaki) time evolution of algebra elements.
//!
//! The formal chain energy `H(x) = -J Σ_k ψ_k(x) ψ_{k+1}(x)` diverges on the
//! infinite chain and is never formed. Only the transition energy
//! `S(x, w) = H(x ⊕ w) - H(x)` is computed, as a finite sum over the bonds
//! that touch a flipped site. The chain is one-sided with free boundary.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{self, AlgebraElement};
use crate::dfs::DfsTable;
use crate::error::{Error, Result};
use crate::groupoid::{enumerate_gamma, low_mask, FlipWord, GroupoidElement, Prefix};
use crate::measures::MeasureSpec;

/// `H_D(p) = -J Σ_{k=1}^{D-1} (2p_k - 1)(2p_{k+1} - 1)`.
pub fn chain_energy(j: f64, bits: u64, depth: usize) -> f64 {
    if depth < 2 {
        return 0.0;
    }
    let bonds = (depth - 1) as i64;
    let anti = ((bits ^ (bits >> 1)) & low_mask(depth - 1)).count_ones() as i64;
    -j * (bonds - 2 * anti) as f64
}

/// `S(x, w) / J` as an exact integer (always even).
pub fn transition_energy_units(bits: u64, depth: usize, w: FlipWord) -> Result<i64> {
    let need = w.horizon() + 1;
    if depth < need && !w.is_empty() {
        return Err(Error::DepthTooSmall { required: need, actual: depth });
    }
    // bond k joins sites k and k+1 and sits at bit k-1
    let touched = (w.mask() | (w.mask() >> 1)) & low_mask(depth.saturating_sub(1));
    let anti = |b: u64| ((b ^ (b >> 1)) & touched).count_ones() as i64;
    let flipped = bits ^ w.mask();
    // each aligned bond contributes -1 to H/J, each anti-aligned bond +1
    Ok(2 * (anti(flipped) - anti(bits)))
}

pub(crate) fn transition_energy_bits(j: f64, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
    Ok(j * transition_energy_units(bits, depth, w)? as f64)
}

/// `S(x, x°)` for the coupling `J`.
pub fn ising_transition_energy(j: f64, g: GroupoidElement) -> Result<f64> {
    transition_energy_bits(j, g.point().bits(), g.point().depth(), g.flips())
}

/// Tabulates `S` on `Ω × Γ_n` at depth `D ≥ n + 1`.
pub fn ising_dfs_table(j: f64, n: usize, depth: usize) -> Result<DfsTable> {
    if depth < n + 1 {
        return Err(Error::DepthTooSmall { required: n + 1, actual: depth });
    }
    DfsTable::from_fn(n, depth, |x, w| transition_energy_bits(j, x, depth, w))
}

/// Integer coefficients `S / J` on `Ω × Γ_n`, indexed `[word][prefix]`.
pub fn ising_dfs_units(n: usize, depth: usize) -> Result<Vec<Vec<i64>>> {
    if depth < n + 1 {
        return Err(Error::DepthTooSmall { required: n + 1, actual: depth });
    }
    crate::groupoid::check_depth(depth)?;
    enumerate_gamma(n)
        .into_iter()
        .map(|w| (0..1u64 << depth).map(|x| transition_energy_units(x, depth, w)).collect())
        .collect()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("lambda {lambda} outside (0, 1)")))
    }
}

/// Integer `k = Σ_{j ∈ w} (2x_j - 1)` with `H = log((1-λ)/λ) · k`.
pub fn modular_hamiltonian_index(g: GroupoidElement) -> i64 {
    let x = g.point().bits();
    g.flips().sites().map(|j| if x >> (j - 1) & 1 == 1 { 1 } else { -1 }).sum()
}

/// `H(x, w) = log((1-λ)/λ) Σ_{j ∈ w} (2x_j - 1)`.
pub fn modular_hamiltonian_eval(lambda: f64, g: GroupoidElement) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(((1.0 - lambda) / lambda).ln() * modular_hamiltonian_index(g) as f64)
}

/// The spectral lattice `log((1-λ)/λ) · k`, `|k| ≤ horizon`, alongside the
/// set of integers `k` actually attained at that horizon.
#[derive(Debug, Clone, Serialize)]
pub struct ModularSpectrum {
    pub lambda: f64,
    pub horizon: usize,
    pub step: f64,
    pub lattice: Vec<i64>,
    pub attained: Vec<i64>,
}

impl ModularSpectrum {
    pub fn points(&self) -> Vec<f64> {
        self.lattice.iter().map(|&k| k as f64 * self.step).collect()
    }

    pub fn attained_equals_lattice(&self) -> bool {
        self.lattice == self.attained
    }
}

/// Exhaustive set of `k` values attained over all `(x, w)` with `w ∈ Γ_h`.
pub fn attained_spectrum_indices(horizon: usize) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for x in Prefix::all(horizon) {
        for w in enumerate_gamma(horizon) {
            out.insert(modular_hamiltonian_index(GroupoidElement::new(x, w).expect("horizon fits")));
        }
    }
    out
}

pub fn modular_spectrum_points(lambda: f64, horizon: usize) -> Result<ModularSpectrum> {
    check_lambda(lambda)?;
    if lambda == 0.5 {
        return Err(Error::DegenerateSpectrum);
    }
    let h = horizon as i64;
    Ok(ModularSpectrum {
        lambda,
        horizon,
        step: ((1.0 - lambda) / lambda).ln(),
        lattice: (-h..=h).collect(),
        attained: attained_spectrum_indices(horizon).into_iter().collect(),
    })
}

/// A real function on transitions used as the generator of `U_t = e^{iSt}`.
pub trait Energy {
    /// Depth of `x` needed to evaluate the energy on words up to `horizon`.
    fn required_depth(&self, horizon: usize) -> usize;
    fn energy(&self, bits: u64, depth: usize, w: FlipWord) -> Result<f64>;
}

/// The Ising transition energy `S` with coupling `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionEnergy {
    pub j: f64,
}

impl Energy for TransitionEnergy {
    fn required_depth(&self, horizon: usize) -> usize {
        horizon + 1
    }

    fn energy(&self, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
        transition_energy_bits(self.j, bits, depth, w)
    }
}

/// `log Δ̂` of the Bernoulli measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularHamiltonian {
    pub lambda: f64,
}

impl Energy for ModularHamiltonian {
    fn required_depth(&self, horizon: usize) -> usize {
        horizon
    }

    fn energy(&self, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
        let g = GroupoidElement::new(Prefix::new(bits & low_mask(depth), depth)?, w)?;
        modular_hamiltonian_eval(self.lambda, g)
    }
}

/// An energy that adds `eps · |w|²` to a base energy. Not additive under
/// composition, so it is not a DFS function for `eps ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedEnergy<E> {
    pub base: E,
    pub eps: f64,
}

impl<E: Energy> Energy for PerturbedEnergy<E> {
    fn required_depth(&self, horizon: usize) -> usize {
        self.base.required_depth(horizon)
    }

    fn energy(&self, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
        let n = w.len() as f64;
        Ok(self.base.energy(bits, depth, w)? + self.eps * n * n)
    }
}

impl Energy for DfsTable {
    fn required_depth(&self, _horizon: usize) -> usize {
        self.depth()
    }

    fn energy(&self, bits: u64, depth: usize, w: FlipWord) -> Result<f64> {
        if depth < self.depth() {
            return Err(Error::DepthTooSmall { required: self.depth(), actual: depth });
        }
        self.value(bits, w)
    }
}

/// `(e^{iSt} F)(x, w) = e^{i S(x, w) t} F(x, w)`.
pub fn tt_evolve<E: Energy + ?Sized>(f: &AlgebraElement, t: f64, energy: &E) -> Result<AlgebraElement> {
    let depth = f.depth().max(energy.required_depth(f.max_horizon()));
    f.lift(depth)?.pointwise(|bits, w, v| {
        let s = energy.energy(bits, depth, w)?;
        Ok(v * Complex64::from_polar(1.0, s * t))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub hahn: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeisenbergReport {
    pub t: f64,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// `max |U_t (F ⋆ U_t* ψ) - (U_t F) ⋆ ψ|` pointwise.
    pub max_deviation: f64,
    /// Same comparison with the phases of the left-hand side swapped,
    /// `e^{-iSt}(F ⋆ e^{iSt} ψ)` against `(e^{iSt} F) ⋆ ψ`.
    pub swapped_phase_deviation: f64,
    pub norms_before: Norms,
    pub norms_after: Norms,
}

/// Compares the modular evolution of `F ⋆ ·` with the Heisenberg-evolved
/// element, for any energy and the measure that defines the norms.
pub fn heisenberg_check_with<E: Energy + ?Sized>(
    energy: &E,
    spec: &MeasureSpec,
    f: &AlgebraElement,
    psi: &AlgebraElement,
    t: f64,
) -> Result<HeisenbergReport> {
    let uf = tt_evolve(f, t, energy)?;
    let lhs = tt_evolve(&algebra::convolve(f, &tt_evolve(psi, -t, energy)?)?, t, energy)?;
    let rhs = algebra::convolve(&uf, psi)?;
    let swapped = tt_evolve(&algebra::convolve(f, &tt_evolve(psi, t, energy)?)?, -t, energy)?;
    Ok(HeisenbergReport {
        t,
        j: None,
        lambda: None,
        max_deviation: lhs.max_abs_diff(&rhs)?,
        swapped_phase_deviation: swapped.max_abs_diff(&rhs)?,
        norms_before: Norms { l2: algebra::l2_norm(f, spec)?, hahn: algebra::hahn_norm(f, spec)? },
        norms_after: Norms { l2: algebra::l2_norm(&uf, spec)?, hahn: algebra::hahn_norm(&uf, spec)? },
    })
}

/// Heisenberg equivalence for the Ising transition energy, norms taken in
/// the Boltzmann measure with the same coupling.
pub fn heisenberg_equivalence_check(
    f: &AlgebraElement,
    psi: &AlgebraElement,
    t: f64,
    j: f64,
) -> Result<HeisenbergReport> {
    let spec = MeasureSpec::ising(j)?;
    let mut r = heisenberg_check_with(&TransitionEnergy { j }, &spec, f, psi, t)?;
    r.j = Some(j);
    Ok(r)
}

/// `H_D` summed bond by bond in ±1 spins.
pub fn chain_energy_brute(j: f64, bits: u64, depth: usize) -> f64 {
    let s = |k: usize| if bits >> (k - 1) & 1 == 0 { -1.0 } else { 1.0 };
    -j * (1..depth).map(|k| s(k) * s(k + 1)).sum::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyOracleReport {
    #[serde(rename = "J")]
    pub j: f64,
    pub max_horizon: usize,
    pub max_depth: usize,
    pub elements_checked: usize,
    /// Max `|S(x, w) - (H_D(x ⊕ w) - H_D(x))|` over `w ∈ Γ_h`, `h + 1 ≤ D`.
    pub max_deviation: f64,
    /// `S(0…0, {2})`, expected `4J`.
    pub interior_flip: f64,
    /// `S(0…0, {1})`, expected `2J`.
    pub boundary_flip: f64,
}

/// Compares `S` with brute-force energy differences at every depth from
/// `horizon + 1` to `max_depth`, which also shows `S` does not depend on `D`.
pub fn energy_oracle_check(j: f64, max_horizon: usize, max_depth: usize) -> Result<EnergyOracleReport> {
    crate::groupoid::check_depth(max_depth)?;
    let mut rep = EnergyOracleReport {
        j,
        max_horizon,
        max_depth,
        elements_checked: 0,
        max_deviation: 0.0,
        interior_flip: transition_energy_bits(j, 0, 3, FlipWord::site(2))?,
        boundary_flip: transition_energy_bits(j, 0, 2, FlipWord::site(1))?,
    };
    for w in enumerate_gamma(max_horizon) {
        for depth in w.horizon() + 1..=max_depth {
            for x in 0..1u64 << depth {
                let s = transition_energy_bits(j, x, depth, w)?;
                let brute = chain_energy_brute(j, x ^ w.mask(), depth) - chain_energy_brute(j, x, depth);
                rep.max_deviation = rep.max_deviation.max((s - brute).abs());
                rep.elements_checked += 1;
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct chain energy in ±1 spins, independent of the bit tricks.
    fn brute_h(j: f64, bits: u64, depth: usize) -> f64 {
        let s = |k: usize| if bits >> (k - 1) & 1 == 0 { -1.0 } else { 1.0 };
        -j * (1..depth).map(|k| s(k) * s(k + 1)).sum::<f64>()
    }

    fn el(bits: u64, depth: usize, sites: &[usize]) -> GroupoidElement {
        GroupoidElement::new(Prefix::new(bits, depth).unwrap(), FlipWord::from_sites(sites.iter().copied()).unwrap())
            .unwrap()
    }

    #[test]
    fn chain_energy_matches_oracle() {
        for d in 0..=8 {
            for b in 0..1u64 << d {
                assert!((chain_energy(1.3, b, d) - brute_h(1.3, b, d)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transition_energy_examples() {
        let j = 0.75;
        assert_eq!(ising_transition_energy(j, el(0, 4, &[])).unwrap(), 0.0);
        for k in 2..=5 {
            assert_eq!(ising_transition_energy(j, el(0, 7, &[k])).unwrap(), 4.0 * j);
        }
        assert_eq!(ising_transition_energy(j, el(0, 3, &[1])).unwrap(), 2.0 * j);
        assert!(ising_transition_energy(j, el(0, 3, &[3])).is_err());
    }

    #[test]
    fn transition_energy_is_truncation_independent() {
        let j = -1.1;
        for h in 0..=5 {
            for w in enumerate_gamma(h) {
                for d in (h + 1)..=8 {
                    for x in 0..1u64 << d {
                        let s = ising_transition_energy(j, el(x, d, &w.sites().collect::<Vec<_>>())).unwrap();
                        let oracle = brute_h(j, x ^ w.mask(), d) - brute_h(j, x, d);
                        assert!((s - oracle).abs() < 1e-12, "x={x:b} w={w:?} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn ising_table_entries() {
        let t = ising_dfs_table(1.0, 3, 4).unwrap();
        assert_eq!(t.value(0, FlipWord::site(2)).unwrap(), 4.0);
        let zero = ising_dfs_table(0.0, 3, 5).unwrap();
        assert!(zero.is_zero());
        assert!(ising_dfs_table(1.0, 3, 3).is_err());
    }

    #[test]
    fn hamiltonian_values() {
        assert_eq!(modular_hamiltonian_eval(0.5, el(0b101, 3, &[1, 3])).unwrap(), 0.0);
        let v = modular_hamiltonian_eval(0.3, el(1, 1, &[1])).unwrap();
        assert!((v - (7.0f64 / 3.0).ln()).abs() < 1e-15);
        assert_eq!(modular_hamiltonian_eval(0.3, el(0b01, 2, &[1, 2])).unwrap(), 0.0);
    }

    #[test]
    fn hamiltonian_is_log_delta() {
        let spec = MeasureSpec::bernoulli(0.3).unwrap();
        for x in Prefix::all(5) {
            for w in enumerate_gamma(5) {
                let g = GroupoidElement::new(x, w).unwrap();
                let h = modular_hamiltonian_eval(0.3, g).unwrap();
                let d = crate::modular::modular_delta(&spec, g).unwrap();
                assert!((h - d.ln()).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let s = modular_spectrum_points(0.3, 1).unwrap();
        assert_eq!(s.attained, vec![-1, 0, 1]);
        let pts = s.points();
        assert!((pts[0] + (7.0f64 / 3.0).ln()).abs() < 1e-15 && pts[1] == 0.0);
        assert!(matches!(modular_spectrum_points(0.5, 3), Err(Error::DegenerateSpectrum)));
        for h in 0..=6 {
            assert!(modular_spectrum_points(0.2, h).unwrap().attained_equals_lattice());
        }
    }

    #[test]
    fn evolution_group_and_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = MeasureSpec::ising(1.0).unwrap();
        let e = TransitionEnergy { j: 1.0 };
        for _ in 0..20 {
            let f = random_element(&mut rng, 4, 4, 0.5);
            assert!(tt_evolve(&f, 0.0, &e).unwrap().max_abs_diff(&f).unwrap() == 0.0);
            let a = tt_evolve(&tt_evolve(&f, 0.3, &e).unwrap(), 0.9, &e).unwrap();
            let b = tt_evolve(&f, 1.2, &e).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
            let n0 = algebra::l2_norm(&f, &spec).unwrap();
            let n1 = algebra::l2_norm(&b, &spec).unwrap();
            assert!((n0 - n1).abs() < 1e-12 * n0.max(1.0));
        }
    }

    #[test]
    fn heisenberg_holds_for_cocycles_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_element(&mut rng, 4, 4, 0.6);
        let psi = random_element(&mut rng, 4, 4, 0.6);
        let zero = heisenberg_equivalence_check(&f, &psi, 0.0, 1.0).unwrap();
        assert_eq!(zero.max_deviation, 0.0);
        let r = heisenberg_equivalence_check(&f, &psi, 0.37, 1.0).unwrap();
        assert!(r.max_deviation < 1e-12, "{r:?}");
        assert!(r.swapped_phase_deviation > 1e-3);

        let bern = MeasureSpec::bernoulli(0.3).unwrap();
        let m = heisenberg_check_with(&ModularHamiltonian { lambda: 0.3 }, &bern, &f, &psi, 1.7).unwrap();
        assert!(m.max_deviation < 1e-12);

        let bad = PerturbedEnergy { base: TransitionEnergy { j: 1.0 }, eps: 0.5 };
        let spec = MeasureSpec::ising(1.0).unwrap();
        let p = heisenberg_check_with(&bad, &spec, &f, &psi, 0.37).unwrap();
        assert!(p.max_deviation > 1e-3);
    }
}
