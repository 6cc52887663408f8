//! Exact rational arithmetic for Bernoulli measures.
//!
//! Every double is a dyadic rational, so [`ExactBernoulli::from_spec`] turns a
//! float spec into an exact one without rounding; [`ExactBernoulli::from_ratio`]
//! takes the intended fraction (e.g. `3/10`) directly. Weights, `Δ` and its
//! integer powers are then products of rationals and the covariance and
//! consistency identities hold with deviation exactly zero.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groupoid::{check_depth, enumerate_gamma, FlipWord};
use crate::measures::MeasureSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactBernoulli {
    sites: Vec<BigRational>,
    tail: BigRational,
}

fn check(l: &BigRational) -> Result<()> {
    if l.is_positive() && l < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("site probability {l} outside (0, 1)")))
    }
}

impl ExactBernoulli {
    /// Homogeneous measure with `λ = num / den`.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidSpec("zero denominator".into()));
        }
        let l = BigRational::new(num.into(), den.into());
        check(&l)?;
        Ok(ExactBernoulli { sites: Vec::new(), tail: l })
    }

    pub fn from_rationals(sites: Vec<BigRational>, tail: BigRational) -> Result<Self> {
        sites.iter().try_for_each(check)?;
        check(&tail)?;
        Ok(ExactBernoulli { sites, tail })
    }

    /// The exact binary values of the measure's doubles.
    pub fn from_spec(spec: &MeasureSpec) -> Result<Self> {
        let conv =
            |l: f64| BigRational::from_float(l).ok_or_else(|| Error::InvalidSpec(format!("lambda {l} is not finite")));
        match spec {
            MeasureSpec::Bernoulli { lambda, sites } => {
                Self::from_rationals(sites.iter().map(|&l| conv(l)).collect::<Result<_>>()?, conv(*lambda)?)
            }
            MeasureSpec::Ising { .. } => Err(Error::WrongMeasure("Bernoulli")),
        }
    }

    pub fn lambda_at(&self, k: usize) -> &BigRational {
        self.sites.get(k.wrapping_sub(1)).unwrap_or(&self.tail)
    }

    /// `(1 - λ_k) / λ_k`.
    pub fn ratio_at(&self, k: usize) -> BigRational {
        let l = self.lambda_at(k);
        (BigRational::one() - l) / l
    }

    pub fn weight(&self, bits: u64, depth: usize) -> BigRational {
        (1..=depth)
            .map(|k| {
                let l = self.lambda_at(k);
                if bits >> (k - 1) & 1 == 0 {
                    l.clone()
                } else {
                    BigRational::one() - l
                }
            })
            .fold(BigRational::one(), |a, b| a * b)
    }

    pub fn weight_table(&self, depth: usize) -> Result<Vec<BigRational>> {
        check_depth(depth)?;
        Ok((0..1u64 << depth).map(|x| self.weight(x, depth)).collect())
    }

    /// `Δ((x, w))^t` for integer `t`.
    pub fn delta_pow(&self, bits: u64, w: FlipWord, t: i64) -> BigRational {
        let exp: i32 = t.try_into().expect("exponent fits in i32");
        w.sites()
            .map(|k| {
                let r = self.ratio_at(k);
                let e = if bits >> (k - 1) & 1 == 1 { exp } else { -exp };
                num_traits::pow::Pow::pow(r, e)
            })
            .fold(BigRational::one(), |a, b| a * b)
    }

    pub fn delta(&self, bits: u64, w: FlipWord) -> BigRational {
        self.delta_pow(bits, w, 1)
    }

    pub fn delta_inv(&self, bits: u64, w: FlipWord) -> BigRational {
        self.delta_pow(bits, w, -1)
    }

    /// `Σ_p ν(p)` at the given depth.
    pub fn total_mass(&self, depth: usize) -> Result<BigRational> {
        Ok(self.weight_table(depth)?.into_iter().fold(BigRational::zero(), |a, b| a + b))
    }

    /// `max_p |ν(p ⊕ w) - Δ⁻¹((p, w)) ν(p)|`.
    pub fn covariance_deviation(&self, w: FlipWord, depth: usize) -> Result<BigRational> {
        if w.horizon() > depth {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: depth });
        }
        let table = self.weight_table(depth)?;
        Ok((0..1u64 << depth)
            .map(|p| (&table[(p ^ w.mask()) as usize] - self.delta_inv(p, w) * &table[p as usize]).abs())
            .max()
            .unwrap_or_else(BigRational::zero))
    }

    /// `max_q |Σ_{p ↦ q} ν^{(n)}(p) - ν^{(k)}(q)|` over depth-`k` prefixes `q`.
    pub fn pushforward_deviation(&self, n: usize, k: usize) -> Result<BigRational> {
        if k == 0 || n <= k {
            return Err(Error::Malformed(format!("projection needs n > k ≥ 1, got ({n}, {k})")));
        }
        let fine = self.weight_table(n)?;
        let mut marg = vec![BigRational::zero(); 1 << k];
        let low = (1u64 << k) - 1;
        for (p, v) in fine.into_iter().enumerate() {
            marg[(p as u64 & low) as usize] += v;
        }
        Ok(marg
            .into_iter()
            .enumerate()
            .map(|(q, m)| (m - self.weight(q as u64, k)).abs())
            .max()
            .unwrap_or_else(BigRational::zero))
    }

    /// `max |Δ(α ∘ β) - Δ(α) Δ(β)|` over composable pairs with words in `Γ_n`.
    pub fn homomorphism_deviation(&self, n: usize) -> Result<BigRational> {
        check_depth(n)?;
        let gamma = enumerate_gamma(n);
        let mut worst = BigRational::zero();
        for x in 0..1u64 << n {
            for &u in &gamma {
                let du = self.delta(x, u);
                for &v in &gamma {
                    let dev = (self.delta(x, u ^ v) - &du * self.delta(x ^ u.mask(), v)).abs();
                    worst = worst.max(dev);
                }
            }
        }
        Ok(worst)
    }

    /// Integers `k` with `Δ((x, w)) = r^k`, `r = (1-λ)/λ`, over every
    /// `(x, w)` with `w ∈ Γ_h`. Each `Δ` value is matched exactly against the
    /// lattice; a value off the lattice is an error.
    pub fn spectrum_indices(&self, horizon: usize) -> Result<BTreeSet<i64>> {
        if !self.sites.iter().all(|l| l == &self.tail) {
            return Err(Error::InvalidSpec("spectrum lattice needs a homogeneous λ".into()));
        }
        check_depth(horizon)?;
        let r = self.ratio_at(1);
        let h = if r.is_one() { 0 } else { horizon as i32 };
        let lattice: Vec<(i64, BigRational)> = (-h..=h).map(|k| (k as i64, num_traits::pow::Pow::pow(&r, k))).collect();
        let mut out = BTreeSet::new();
        for x in 0..1u64 << horizon {
            for w in enumerate_gamma(horizon) {
                let d = self.delta(x, w);
                let k =
                    lattice.iter().find(|(_, v)| v == &d).map(|(k, _)| *k).ok_or_else(|| {
                        Error::InvariantViolation(format!("Δ({x:#b}, {w:?}) = {d} is off the lattice"))
                    })?;
                out.insert(k);
            }
        }
        Ok(out)
    }

    /// `max |∫ Π_{k ∈ s} ψ_k dν - Π_{k ∈ s} (2λ_k - 1)|` over subsets `s` of
    /// the first `n` sites: the diagonal Pauli words, where the GNS side is a
    /// moment of the product measure and the Powers side a product of traces.
    pub fn diagonal_gns_deviation(&self, n: usize) -> Result<BigRational> {
        let table = self.weight_table(n)?;
        let two = BigRational::from_integer(BigInt::from(2));
        let mut worst = BigRational::zero();
        for s in 0..1u64 << n {
            let lhs = table.iter().enumerate().fold(BigRational::zero(), |acc, (x, p)| {
                if (x as u64 & s).count_ones().is_multiple_of(2) {
                    acc + p
                } else {
                    acc - p
                }
            });
            let rhs = FlipWord::from_mask(s)
                .sites()
                .map(|k| &two * self.lambda_at(k) - BigRational::one())
                .fold(BigRational::one(), |a, b| a * b);
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }
}

/// Best double approximation, for reports.
pub fn to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_site_weights() {
        let b = ExactBernoulli::from_ratio(3, 10).unwrap();
        assert_eq!(b.weight(0, 1), q(3, 10));
        assert_eq!(b.weight(1, 1), q(7, 10));
        assert_eq!(b.weight(0b10, 2), q(21, 100));
    }

    #[test]
    fn delta_values() {
        let b = ExactBernoulli::from_ratio(3, 10).unwrap();
        let e1 = FlipWord::site(1);
        assert_eq!(b.delta(1, e1), q(7, 3));
        assert_eq!(b.delta(0, e1), q(3, 7));
        assert_eq!(b.delta_pow(1, e1, 3), q(343, 27));
        assert_eq!(b.delta_pow(0, e1, 0), q(1, 1));
        assert_eq!(b.delta_inv(1, e1) * b.delta(1, e1), q(1, 1));
    }

    #[test]
    fn identities_are_exact() {
        for (n, d) in [(1, 5), (3, 10), (1, 2)] {
            let b = ExactBernoulli::from_ratio(n, d).unwrap();
            for depth in 0..=8 {
                assert_eq!(b.total_mass(depth).unwrap(), q(1, 1));
            }
            for w in enumerate_gamma(3) {
                assert!(b.covariance_deviation(w, 5).unwrap().is_zero());
            }
            assert!(b.pushforward_deviation(6, 2).unwrap().is_zero());
            assert!(b.homomorphism_deviation(4).unwrap().is_zero());
            assert!(b.diagonal_gns_deviation(5).unwrap().is_zero());
        }
    }

    #[test]
    fn float_specs_are_exact_too() {
        let b = ExactBernoulli::from_spec(&MeasureSpec::bernoulli(0.3).unwrap()).unwrap();
        assert_ne!(b.lambda_at(1), &q(3, 10));
        assert!(b.covariance_deviation(FlipWord::from_mask(0b101), 4).unwrap().is_zero());
        let sites = MeasureSpec::bernoulli_sites(vec![0.1, 0.25], 0.4).unwrap();
        let b = ExactBernoulli::from_spec(&sites).unwrap();
        assert!(b.pushforward_deviation(5, 3).unwrap().is_zero());
        assert!(ExactBernoulli::from_spec(&MeasureSpec::ising(1.0).unwrap()).is_err());
    }

    #[test]
    fn spectrum_on_lattice() {
        let b = ExactBernoulli::from_ratio(3, 10).unwrap();
        assert_eq!(b.spectrum_indices(1).unwrap(), BTreeSet::from([-1, 0, 1]));
        let ks = b.spectrum_indices(4).unwrap();
        assert_eq!(ks, (-4..=4).collect());
        // at λ = 1/2 every Δ is 1 and the lattice collapses
        assert_eq!(ExactBernoulli::from_ratio(1, 2).unwrap().spectrum_indices(3).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(ExactBernoulli::from_ratio(0, 1).is_err());
        assert!(ExactBernoulli::from_ratio(1, 1).is_err());
        assert!(ExactBernoulli::from_ratio(1, 0).is_err());
    }
}
