//! The groupoid `Ω∞ × Γ` of the infinite qubit chain at finite truncation.
//!
//! Points of `Ω∞` are represented by finite [`Prefix`]es: every function this
//! crate handles is a cylinder function, so the first `D` coordinates carry all
//! the information. Transitions are [`FlipWord`]s, finite sets of flipped
//! sites, acting on points by XOR. A [`GroupoidElement`] `(x, w)` has target
//! `x` and source `x ⊕ w`.
//!
//! Sites are 1-indexed; site `k` lives in bit `k - 1` of the internal mask.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit imposed by the `u64` bitmask representation.
pub const MAX_SITES: usize = 63;

/// Default limit on cylinder depth (tables of `2^20` entries).
pub const DEFAULT_DEPTH_CAP: usize = 20;

static DEPTH_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DEPTH_CAP);

/// Current depth cap used by every table-allocating operation.
pub fn depth_cap() -> usize {
    DEPTH_CAP.load(Ordering::Relaxed)
}

/// Override the depth cap. Values above [`MAX_SITES`] are clamped.
pub fn set_depth_cap(cap: usize) {
    DEPTH_CAP.store(cap.min(MAX_SITES), Ordering::Relaxed);
}

pub(crate) fn check_depth(depth: usize) -> Result<()> {
    let cap = depth_cap();
    if depth > cap {
        Err(Error::HorizonOverflow { required: depth, cap })
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn low_mask(depth: usize) -> u64 {
    if depth >= 64 {
        u64::MAX
    } else {
        (1u64 << depth) - 1
    }
}

/// An element of `Γ`: a finite set of flipped sites.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct FlipWord(u64);

impl FlipWord {
    pub const EMPTY: FlipWord = FlipWord(0);

    pub fn from_mask(mask: u64) -> Self {
        FlipWord(mask & low_mask(MAX_SITES))
    }

    /// Builds a word from 1-indexed sites. Repeated sites cancel pairwise,
    /// as they would under repeated flips.
    pub fn from_sites<I: IntoIterator<Item = usize>>(sites: I) -> Result<Self> {
        let mut mask = 0u64;
        for s in sites {
            if s == 0 || s > MAX_SITES {
                return Err(Error::SiteOutOfRange { site: s, n: MAX_SITES });
            }
            mask ^= 1 << (s - 1);
        }
        Ok(FlipWord(mask))
    }

    /// `e_k`, the single flip at site `k`.
    pub fn site(k: usize) -> Self {
        assert!((1..=MAX_SITES).contains(&k), "site {k} out of range");
        FlipWord(1 << (k - 1))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, site: usize) -> bool {
        (1..=MAX_SITES).contains(&site) && self.0 >> (site - 1) & 1 == 1
    }

    /// Largest flipped site, 0 for the empty word.
    pub fn horizon(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Ascending 1-indexed sites.
    pub fn sites(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..MAX_SITES).filter(move |b| m >> b & 1 == 1).map(|b| b + 1)
    }

    /// Group law of `Γ`: symmetric difference.
    pub fn xor(self, other: FlipWord) -> FlipWord {
        FlipWord(self.0 ^ other.0)
    }
}

impl std::ops::BitXor for FlipWord {
    type Output = FlipWord;
    fn bitxor(self, rhs: FlipWord) -> FlipWord {
        self.xor(rhs)
    }
}

impl fmt::Debug for FlipWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sites()).finish()
    }
}

impl From<FlipWord> for Vec<usize> {
    fn from(w: FlipWord) -> Self {
        w.sites().collect()
    }
}

impl TryFrom<Vec<usize>> for FlipWord {
    type Error = Error;
    fn try_from(sites: Vec<usize>) -> Result<Self> {
        let mut sorted = sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return Err(Error::Malformed(format!("repeated site in flip word {sites:?}")));
        }
        FlipWord::from_sites(sites)
    }
}

/// `xor(a, b)`: the abelian group law on `Γ`.
pub fn xor(a: FlipWord, b: FlipWord) -> FlipWord {
    a ^ b
}

/// All `2^n` flip words with horizon `≤ n`, ordered by ascending bitmask.
pub fn enumerate_gamma(n: usize) -> Vec<FlipWord> {
    assert!(n <= MAX_SITES, "horizon {n} exceeds {MAX_SITES}");
    (0..1u64 << n).map(FlipWord).collect()
}

/// The first `depth` coordinates of a point of `Ω∞`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prefix {
    bits: u64,
    depth: usize,
}

impl Prefix {
    pub fn new(bits: u64, depth: usize) -> Result<Self> {
        if depth > MAX_SITES {
            return Err(Error::SiteOutOfRange { site: depth, n: MAX_SITES });
        }
        if bits & !low_mask(depth) != 0 {
            return Err(Error::Malformed(format!("bits {bits:#b} exceed depth {depth}")));
        }
        Ok(Prefix { bits, depth })
    }

    /// Parses a sequence of 0/1 values; `x_1` first.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut mask = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                _ => return Err(Error::Malformed(format!("bit value {b}"))),
            }
        }
        Prefix::new(mask, bits.len())
    }

    pub fn zeros(depth: usize) -> Self {
        Prefix { bits: 0, depth }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn depth(self) -> usize {
        self.depth
    }

    /// Value of coordinate `x_k` (1-indexed).
    pub fn bit(self, k: usize) -> u8 {
        assert!(k >= 1 && k <= self.depth, "site {k} beyond depth {}", self.depth);
        (self.bits >> (k - 1) & 1) as u8
    }

    /// `x ⊕ w`. Fails if the word reaches past the prefix.
    pub fn flip(self, w: FlipWord) -> Result<Prefix> {
        if w.horizon() > self.depth {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: self.depth });
        }
        Ok(Prefix { bits: self.bits ^ w.mask(), depth: self.depth })
    }

    /// The first `depth` coordinates.
    pub fn truncate(self, depth: usize) -> Result<Prefix> {
        if depth > self.depth {
            return Err(Error::DepthTooSmall { required: depth, actual: self.depth });
        }
        Ok(Prefix { bits: self.bits & low_mask(depth), depth })
    }

    /// Every prefix of the given depth, ascending by bitmask.
    pub fn all(depth: usize) -> impl Iterator<Item = Prefix> {
        (0..1u64 << depth).map(move |bits| Prefix { bits, depth })
    }
}

impl fmt::Debug for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for k in 0..self.depth {
            write!(f, "{}", self.bits >> k & 1)?;
        }
        write!(f, ")")
    }
}

/// `(x, w)` with target `x` and source `x ⊕ w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GroupoidElement {
    point: Prefix,
    flips: FlipWord,
}

impl GroupoidElement {
    pub fn new(point: Prefix, flips: FlipWord) -> Result<Self> {
        if flips.horizon() > point.depth() {
            return Err(Error::DepthTooSmall { required: flips.horizon(), actual: point.depth() });
        }
        Ok(GroupoidElement { point, flips })
    }

    /// The unit `(x, 0)`.
    pub fn identity(point: Prefix) -> Self {
        GroupoidElement { point, flips: FlipWord::EMPTY }
    }

    pub fn point(self) -> Prefix {
        self.point
    }

    pub fn flips(self) -> FlipWord {
        self.flips
    }

    pub fn target(self) -> Prefix {
        self.point
    }

    pub fn source(self) -> Prefix {
        Prefix { bits: self.point.bits ^ self.flips.mask(), depth: self.point.depth }
    }

    pub fn is_identity(self) -> bool {
        self.flips.is_empty()
    }

    /// `a ∘ b`, defined when `source(a) = target(b)`.
    pub fn compose(self, b: GroupoidElement) -> Result<GroupoidElement> {
        if self.point.depth != b.point.depth {
            return Err(Error::DepthMismatch { left: self.point.depth, right: b.point.depth });
        }
        let source = self.source();
        if source != b.target() {
            return Err(Error::NotComposable { source_bits: source.bits, target_bits: b.point.bits });
        }
        Ok(GroupoidElement { point: self.point, flips: self.flips ^ b.flips })
    }

    /// `(x, w)⁻¹ = (x ⊕ w, w)`.
    pub fn inverse(self) -> GroupoidElement {
        GroupoidElement { point: self.source(), flips: self.flips }
    }
}

pub fn compose(a: GroupoidElement, b: GroupoidElement) -> Result<GroupoidElement> {
    a.compose(b)
}

pub fn inverse(a: GroupoidElement) -> GroupoidElement {
    a.inverse()
}

/// Outcome of the exhaustive axiom sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub horizon: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

/// Exhaustively checks the groupoid axioms on `Ω_n × Γ_n`: associativity,
/// units, inverses, source/target of composites, and the abelian group laws
/// of `(Γ_n, ⊕)`.
pub fn check_axioms(n: usize) -> AxiomReport {
    let mut report = AxiomReport { horizon: n, ..Default::default() };
    let gamma = enumerate_gamma(n);
    let fail = |report: &mut AxiomReport, what: String| {
        report.violations += 1;
        if report.first_violation.is_none() {
            report.first_violation = Some(what);
        }
    };

    for &u in &gamma {
        let inv = u;
        if u ^ inv != FlipWord::EMPTY || u ^ FlipWord::EMPTY != u {
            fail(&mut report, format!("group unit/inverse at {u:?}"));
        }
        for &v in &gamma {
            if u ^ v != v ^ u {
                fail(&mut report, format!("commutativity at {u:?},{v:?}"));
            }
            for &w in &gamma {
                if (u ^ v) ^ w != u ^ (v ^ w) {
                    fail(&mut report, format!("group associativity at {u:?},{v:?},{w:?}"));
                }
            }
        }
    }

    for x in Prefix::all(n) {
        for &u in &gamma {
            let a = GroupoidElement { point: x, flips: u };
            let inv = a.inverse();
            let left_unit = GroupoidElement::identity(a.target()).compose(a);
            let right_unit = a.compose(GroupoidElement::identity(a.source()));
            if left_unit != Ok(a) || right_unit != Ok(a) {
                fail(&mut report, format!("unit law at {a:?}"));
            }
            if a.compose(inv) != Ok(GroupoidElement::identity(a.target()))
                || inv.compose(a) != Ok(GroupoidElement::identity(a.source()))
                || inv.inverse() != a
            {
                fail(&mut report, format!("inverse law at {a:?}"));
            }
            for &v in &gamma {
                let b = GroupoidElement { point: a.source(), flips: v };
                report.pairs_checked += 1;
                let ab = match a.compose(b) {
                    Ok(ab) => ab,
                    Err(e) => {
                        fail(&mut report, format!("{a:?}∘{b:?}: {e}"));
                        continue;
                    }
                };
                if ab.source() != b.source() || ab.target() != a.target() {
                    fail(&mut report, format!("source/target of {a:?}∘{b:?}"));
                }
                if ab.inverse() != b.inverse().compose(a.inverse()).unwrap_or(ab) {
                    fail(&mut report, format!("(ab)⁻¹ at {a:?},{b:?}"));
                }
                for &w in &gamma {
                    let c = GroupoidElement { point: b.source(), flips: w };
                    report.triples_checked += 1;
                    let lhs = ab.compose(c);
                    let rhs = b.compose(c).and_then(|bc| a.compose(bc));
                    if lhs.is_err() || lhs != rhs {
                        fail(&mut report, format!("associativity at {a:?},{b:?},{c:?}"));
                    }
                }
            }
        }
    }
    report
}
