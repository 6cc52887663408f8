//! The matrix side of the Glimm correspondence.
//!
//! `M_{2^n} = M_2^{⊗n}` with site 1 the leftmost tensor factor, the Powers
//! product state `φ(A) = Tr(ρ_λ^{⊗n} A)` with `ρ_λ = diag(λ, 1-λ)`, and the map
//! `σ₁^{(k)} ↦ V_{e_k}`, `σ₃^{(k)} ↦ L_{ψ_k}` into the convolution algebra.
//! The GNS vector of the groupoid side is the unit `E`, so the two
//! expectations can be compared word by word.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply, convolve, inner_product, involution, pukanszky_l, pukanszky_v, AlgebraElement};
use crate::cylinder::psi;
use crate::error::{Error, Result};
use crate::groupoid::FlipWord;
use crate::measures::MeasureSpec;
use crate::sampling::{random_complex, trial_rng};

/// Dense matrices are built up to this many sites.
pub const MAX_DENSE_SITES: usize = 8;

/// A Pauli generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    /// `σ₁`, the flip.
    #[serde(rename = "1")]
    X,
    /// `σ₃ = diag(1, -1)`.
    #[serde(rename = "3")]
    Z,
}

impl Letter {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        match self {
            Letter::X => [[o, l], [l, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }
}

/// A product of Pauli generators, normal-ordered by site.
///
/// Operators at different sites commute, so a word is stored as one letter
/// sequence per site; the order within a site is kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliWord {
    letters: BTreeMap<usize, Vec<Letter>>,
}

impl PauliWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(site: usize, letter: Letter) -> Result<Self> {
        Self::from_letters([(site, letter)])
    }

    /// The product of `(site, letter)` factors in the given order.
    pub fn from_letters<I: IntoIterator<Item = (usize, Letter)>>(factors: I) -> Result<Self> {
        let mut letters: BTreeMap<usize, Vec<Letter>> = BTreeMap::new();
        for (site, l) in factors {
            if site == 0 {
                return Err(Error::SiteOutOfRange { site, n: 0 });
            }
            letters.entry(site).or_default().push(l);
        }
        Ok(PauliWord { letters })
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_site(&self) -> usize {
        self.letters.keys().next_back().copied().unwrap_or(0)
    }

    /// Factors in normal order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.letters.iter().flat_map(|(&s, ls)| ls.iter().map(move |&l| (s, l)))
    }

    /// `self · other`.
    pub fn product(&self, other: &PauliWord) -> PauliWord {
        let mut letters = self.letters.clone();
        for (&s, ls) in &other.letters {
            letters.entry(s).or_default().extend_from_slice(ls);
        }
        PauliWord { letters }
    }

    /// Letters reversed at every site; the adjoint, since `σ₁` and `σ₃` are
    /// Hermitian.
    pub fn reversed(&self) -> PauliWord {
        PauliWord { letters: self.letters.iter().map(|(&s, ls)| (s, ls.iter().rev().copied().collect())).collect() }
    }
}

/// A `2ⁿ × 2ⁿ` complex matrix acting on `n` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_DENSE_SITES {
        return Err(Error::HorizonOverflow { required: n, cap: MAX_DENSE_SITES });
    }
    Ok(())
}

impl DenseOperator {
    pub fn identity(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(DenseOperator { n, matrix: DMatrix::identity(1 << n, 1 << n) })
    }

    pub fn from_matrix(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_sites(n)?;
        if matrix.nrows() != 1 << n || matrix.ncols() != 1 << n {
            return Err(Error::Malformed(format!("{}×{} matrix on {n} sites", matrix.nrows(), matrix.ncols())));
        }
        Ok(DenseOperator { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `A ⊗ 𝕀₂`, adding site `n + 1`.
    pub fn embed(&self) -> Result<Self> {
        check_sites(self.n + 1)?;
        Ok(DenseOperator { n: self.n + 1, matrix: self.matrix.kronecker(&DMatrix::identity(2, 2)) })
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DepthMismatch { left: self.n, right: other.n });
        }
        Ok(DenseOperator { n: self.n, matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DepthMismatch { left: self.n, right: other.n });
        }
        Ok(DenseOperator { n: self.n, matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        DenseOperator { n: self.n, matrix: &self.matrix * c }
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { n: self.n, matrix: self.matrix.adjoint() }
    }

    /// `max |A*A - 𝕀|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(1 << self.n, 1 << self.n);
        d.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

/// The operator of a word on `n` sites.
pub fn pauli_operator(w: &PauliWord, n: usize) -> Result<DenseOperator> {
    check_sites(n)?;
    if w.max_site() > n {
        return Err(Error::SiteOutOfRange { site: w.max_site(), n });
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = DMatrix::from_element(1, 1, one);
    for site in 1..=n {
        let mut f = [[one, zero], [zero, one]];
        for l in w.letters.get(&site).into_iter().flatten() {
            let g = l.matrix();
            f = [
                [f[0][0] * g[0][0] + f[0][1] * g[1][0], f[0][0] * g[0][1] + f[0][1] * g[1][1]],
                [f[1][0] * g[0][0] + f[1][1] * g[1][0], f[1][0] * g[0][1] + f[1][1] * g[1][1]],
            ];
        }
        let local = DMatrix::from_row_slice(2, 2, &[f[0][0], f[0][1], f[1][0], f[1][1]]);
        m = m.kronecker(&local);
    }
    Ok(DenseOperator { n, matrix: m })
}

/// `Tr(ρ_λ^{⊗n} A)`.
pub fn powers_state(a: &DenseOperator, lambda: f64) -> Result<Complex64> {
    if !(lambda.is_finite() && lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidSpec(format!("lambda {lambda} outside (0, 1)")));
    }
    let n = a.n;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..1usize << n {
        // site k is tensor factor k, i.e. bit n - k of the row index
        let rho: f64 = (1..=n).map(|k| if i >> (n - k) & 1 == 0 { lambda } else { 1.0 - lambda }).product();
        acc += a.matrix[(i, i)] * rho;
    }
    Ok(acc)
}

fn require_bernoulli(spec: &MeasureSpec) -> Result<()> {
    if spec.is_bernoulli() {
        Ok(())
    } else {
        Err(Error::WrongMeasure("Bernoulli"))
    }
}

/// `π_λ` on a word: the ordered convolution product of `V_{e_k}` (letter 1)
/// and `L_{ψ_k}` (letter 3).
pub fn glimm_map(w: &PauliWord, spec: &MeasureSpec) -> Result<AlgebraElement> {
    require_bernoulli(spec)?;
    let mut acc = AlgebraElement::unit();
    for (site, l) in w.factors() {
        let g = match l {
            Letter::X => pukanszky_v(FlipWord::site(site), spec)?,
            Letter::Z => pukanszky_l(&psi(site).to_complex()),
        };
        acc = convolve(&acc, &g)?;
    }
    Ok(acc)
}

/// A finite complex combination `Σ c_i w_i`.
pub type PauliCombination = Vec<(Complex64, PauliWord)>;

pub fn glimm_map_combination(c: &[(Complex64, PauliWord)], spec: &MeasureSpec) -> Result<AlgebraElement> {
    c.iter().try_fold(AlgebraElement::zero(), |acc, (z, w)| acc.add(&glimm_map(w, spec)?.scale(*z)))
}

pub fn pauli_combination_operator(c: &[(Complex64, PauliWord)], n: usize) -> Result<DenseOperator> {
    c.iter().try_fold(DenseOperator::identity(n)?.scale(Complex64::new(0.0, 0.0)), |acc, (z, w)| {
        acc.add(&pauli_operator(w, n)?.scale(*z))
    })
}

/// `⟨Ψ, F ⋆ Ψ⟩` with `Ψ = E`.
fn vector_state(f: &AlgebraElement, spec: &MeasureSpec) -> Result<Complex64> {
    let e = AlgebraElement::unit();
    inner_product(&e, &apply(f, &e)?, spec)
}

/// `⟨Ψ_λ, π_λ(w) Ψ_λ⟩`.
pub fn gns_expectation(w: &PauliWord, spec: &MeasureSpec) -> Result<Complex64> {
    vector_state(&glimm_map(w, spec)?, spec)
}

pub fn gns_expectation_combination(c: &[(Complex64, PauliWord)], spec: &MeasureSpec) -> Result<Complex64> {
    vector_state(&glimm_map_combination(c, spec)?, spec)
}

/// `max |glimm(w)† - glimm(w reversed)|`, the involution compatibility.
pub fn involution_defect(w: &PauliWord, spec: &MeasureSpec) -> Result<f64> {
    involution(&glimm_map(w, spec)?, spec)?.max_abs_diff(&glimm_map(&w.reversed(), spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsReport {
    pub n: usize,
    pub lambda: f64,
    pub trials: usize,
    pub max_abs_deviation: f64,
    pub seed: u64,
}

/// A random word on `n` sites. `σ₂` is drawn as `i σ₁σ₃`, so the returned
/// coefficient carries the factors of `i`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, n: usize, max_len: usize) -> (Complex64, PauliWord) {
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut factors = Vec::new();
    for _ in 0..rng.gen_range(0..=max_len) {
        let site = rng.gen_range(1..=n);
        match rng.gen_range(0..3) {
            0 => factors.push((site, Letter::X)),
            1 => factors.push((site, Letter::Z)),
            _ => {
                coeff *= Complex64::new(0.0, 1.0);
                factors.push((site, Letter::X));
                factors.push((site, Letter::Z));
            }
        }
    }
    (coeff, PauliWord::from_letters(factors).expect("sites start at 1"))
}

/// Random combination of up to four words with up to `2n` letters each.
pub fn random_combination<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PauliCombination {
    (0..rng.gen_range(1..=4))
        .map(|_| {
            let (c, w) = random_word(rng, n, 2 * n);
            (c * random_complex(rng), w)
        })
        .collect()
}

/// Compares `⟨Ψ_λ, π_λ(A) Ψ_λ⟩` with `Tr(ρ_λ^{⊗n} A)` on random combinations.
pub fn gns_compare_random(n: usize, trials: usize, lambda: f64, seed: u64) -> Result<GnsReport> {
    check_sites(n)?;
    let spec = MeasureSpec::bernoulli(lambda)?;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let c = random_combination(&mut rng, n.max(1));
        let lhs = gns_expectation_combination(&c, &spec)?;
        let rhs = powers_state(&pauli_combination_operator(&c, n.max(1))?, lambda)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(GnsReport { n, lambda, trials, max_abs_deviation: worst, seed })
}
