//! Real DFS functions on `Ω × Γ_n` and the cochain complex of `Γ` with
//! coefficients in cylinder functions.
//!
//! A DFS function is an additive map on the groupoid, which in coordinates
//! reads
//!
//! ```text
//! S(z, u ⊕ v) = S(z ⊕ v, u) + S(z, v) = S(z, u) + S(z ⊕ u, v)
//! ```
//!
//! for all `u, v ∈ Γ_n`. [`dfs_seed_extend`] extends such a function from
//! `Γ_n` to `Γ_{n+1}` given a free seed on the cylinder `𝒞_{n+1}` of points
//! whose first `n + 1` coordinates vanish.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cylinder::RealCylinder;
use crate::error::{Error, Result};
use crate::groupoid::{check_depth, low_mask, FlipWord};

/// `S` tabulated on words of `Γ_n` and prefixes of depth `D ≥ n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct DfsTable {
    n: usize,
    depth: usize,
    /// `entries[w.mask()][x]`
    entries: Vec<Vec<f64>>,
}

impl DfsTable {
    pub fn zero(n: usize, depth: usize) -> Result<Self> {
        Self::from_fn(n, depth, |_, _| Ok(0.0))
    }

    pub fn from_fn(n: usize, depth: usize, mut f: impl FnMut(u64, FlipWord) -> Result<f64>) -> Result<Self> {
        if depth < n {
            return Err(Error::DepthTooSmall { required: n, actual: depth });
        }
        check_depth(depth)?;
        let entries = (0..1u64 << n)
            .map(|w| (0..1u64 << depth).map(|x| f(x, FlipWord::from_mask(w))).collect())
            .collect::<Result<_>>()?;
        Ok(DfsTable { n, depth, entries })
    }

    /// Horizon of the covered words.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn value(&self, bits: u64, w: FlipWord) -> Result<f64> {
        if w.horizon() > self.n {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: self.n });
        }
        Ok(self.entries[w.mask() as usize][(bits & low_mask(self.depth)) as usize])
    }

    /// `x ↦ S(x, w)`.
    pub fn entry(&self, w: FlipWord) -> Result<RealCylinder> {
        if w.horizon() > self.n {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: self.n });
        }
        RealCylinder::from_values(self.depth, self.entries[w.mask() as usize].clone())
    }

    pub fn set(&mut self, bits: u64, w: FlipWord, v: f64) -> Result<()> {
        if w.horizon() > self.n {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: self.n });
        }
        self.entries[w.mask() as usize][(bits & low_mask(self.depth)) as usize] = v;
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&v| v == 0.0)
    }

    /// `a·self + b·other` on the same `(n, D)`.
    pub fn linear_combination(&self, a: f64, other: &DfsTable, b: f64) -> Result<DfsTable> {
        if self.n != other.n || self.depth != other.depth {
            return Err(Error::DepthMismatch { left: self.depth, right: other.depth });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(DfsTable { n: self.n, depth: self.depth, entries })
    }

    pub fn max_abs_diff(&self, other: &DfsTable) -> Result<f64> {
        let d = self.linear_combination(1.0, other, -1.0)?;
        Ok(d.max_abs())
    }

    /// Read as a 1-cochain `w ↦ S(·, w)`.
    pub fn to_cochain(&self) -> Cochain {
        Cochain { order: 1, n: self.n, depth: self.depth, values: self.entries.concat() }
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    depth: usize,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    flips: FlipWord,
    depth: usize,
    values: Vec<f64>,
}

impl From<DfsTable> for TableRepr {
    fn from(t: DfsTable) -> Self {
        let depth = t.depth;
        TableRepr {
            n: t.n,
            depth,
            entries: t
                .entries
                .into_iter()
                .enumerate()
                .map(|(w, values)| EntryRepr { flips: FlipWord::from_mask(w as u64), depth, values })
                .collect(),
        }
    }
}

impl TryFrom<TableRepr> for DfsTable {
    type Error = Error;
    fn try_from(r: TableRepr) -> Result<Self> {
        let mut t = DfsTable::zero(r.n, r.depth)?;
        let mut seen = vec![false; 1 << r.n];
        for e in r.entries {
            if e.depth != r.depth || e.values.len() != 1 << r.depth || e.flips.horizon() > r.n {
                return Err(Error::Malformed(format!("entry {:?} does not fit ({}, {})", e.flips, r.n, r.depth)));
            }
            seen[e.flips.mask() as usize] = true;
            t.entries[e.flips.mask() as usize] = e.values;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Malformed("table does not cover every word of Γ_n".into()));
        }
        Ok(t)
    }
}

/// Result of the exhaustive DFS verification.
#[derive(Debug, Clone, Serialize)]
pub struct DfsCheckReport {
    pub n: usize,
    pub depth: usize,
    /// Largest violation of either chained equality, `S(z, 0) = 0`, or
    /// `S(z ⊕ w, w) = -S(z, w)`.
    pub max_violation: f64,
    /// `(z, u, v)` at which the largest violation occurs.
    pub witness: Option<(u64, Vec<usize>, Vec<usize>)>,
}

fn violation_generic<T: Signed + Copy + PartialOrd>(
    n: usize,
    depth: usize,
    get: impl Fn(u64, u64) -> T,
) -> (T, Option<(u64, u64, u64)>) {
    let mut worst = T::zero();
    let mut at = None;
    let mut note = |v: T, z: u64, u: u64, w: u64| {
        if v > worst {
            worst = v;
            at = Some((z, u, w));
        }
    };
    for z in 0..1u64 << depth {
        note(get(0, z).abs(), z, 0, 0);
        for u in 0..1u64 << n {
            note((get(u, z ^ u) + get(u, z)).abs(), z, u, u);
            for v in 0..1u64 << n {
                let s_uv = get(u ^ v, z);
                note((s_uv - get(u, z ^ v) - get(v, z)).abs(), z, u, v);
                note((s_uv - get(u, z) - get(v, z ^ u)).abs(), z, u, v);
            }
        }
    }
    (worst, at)
}

/// Exhaustive check over every prefix of the table depth and every pair in `Γ_n`.
pub fn dfs_check(s: &DfsTable) -> DfsCheckReport {
    let (worst, at) = violation_generic(s.n, s.depth, |w, x| s.entries[w as usize][x as usize]);
    DfsCheckReport {
        n: s.n,
        depth: s.depth,
        max_violation: worst,
        witness: at
            .map(|(z, u, v)| (z, FlipWord::from_mask(u).sites().collect(), FlipWord::from_mask(v).sites().collect())),
    }
}

/// Exact check for integer-valued tables, indexed `[word][prefix]`.
pub fn dfs_check_integer(n: usize, depth: usize, table: &[Vec<i64>]) -> i64 {
    violation_generic(n, depth, |w, x| table[w as usize][x as usize]).0
}

fn tolerance(s: &DfsTable) -> f64 {
    1e-9 * s.max_abs().max(1.0)
}

/// One inductive step: `Γ_n → Γ_{n+1}`.
///
/// `seed` is read only on `𝒞_{n+1}`, the prefixes whose first `n + 1` bits
/// are zero; it is tabulated at a depth not exceeding the table's.
pub fn dfs_seed_extend(s: &DfsTable, seed: &RealCylinder) -> Result<DfsTable> {
    let n = s.n;
    let d = s.depth;
    if d < n + 1 {
        return Err(Error::DepthTooSmall { required: n + 1, actual: d });
    }
    if seed.depth() > d {
        return Err(Error::DepthMismatch { left: seed.depth(), right: d });
    }
    let report = dfs_check(s);
    if report.max_violation > tolerance(s) {
        return Err(Error::InvariantViolation(format!(
            "input table violates the DFS condition by {} at {:?}",
            report.max_violation, report.witness
        )));
    }
    let low = low_mask(n);
    let e_next = 1u64 << n;
    // S(z̄, e_{n+1}) for z̄ ∈ 𝒞_n: steps (1) and (2)
    let on_cn = |zbar: u64| -> f64 {
        if zbar & e_next == 0 {
            seed.at(zbar)
        } else {
            -seed.at(zbar ^ e_next)
        }
    };
    let old = |w: u64, x: u64| s.entries[w as usize][x as usize];
    let mut entries = s.entries.clone();
    for xo in 0..1u64 << n {
        let row = (0..1u64 << d)
            .map(|z| {
                let zo = z & low;
                let zbar = z & !low;
                // step (3)
                old(zo ^ xo, zbar ^ e_next) - old(zo, zbar) + on_cn(zbar)
            })
            .collect();
        entries.push(row);
    }
    Ok(DfsTable { n: n + 1, depth: d, entries })
}

/// Builds a DFS table on `Γ_n` at depth `D` from `n` seeds, seed `k` being
/// read on `𝒞_k`.
pub fn dfs_build(n: usize, seeds: &[RealCylinder], depth: usize) -> Result<DfsTable> {
    if seeds.len() != n {
        return Err(Error::Malformed(format!("{} seeds given for horizon {n}", seeds.len())));
    }
    if depth < n {
        return Err(Error::DepthTooSmall { required: n, actual: depth });
    }
    seeds.iter().try_fold(DfsTable::zero(0, depth)?, |t, seed| dfs_seed_extend(&t, seed))
}

/// A `k`-cochain `Γ_n^k → {cylinder functions of depth D}`.
///
/// Values are stored with the word tuple as the outer index and the prefix
/// as the inner index.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    order: usize,
    n: usize,
    depth: usize,
    values: Vec<f64>,
}

pub const MAX_COCHAIN_ORDER: usize = 3;

impl Cochain {
    pub fn from_fn(order: usize, n: usize, depth: usize, mut f: impl FnMut(&[FlipWord], u64) -> f64) -> Result<Self> {
        if order > MAX_COCHAIN_ORDER {
            return Err(Error::OrderUnsupported(order));
        }
        if depth < n {
            return Err(Error::DepthTooSmall { required: n, actual: depth });
        }
        check_depth(depth)?;
        let words = 1usize << (n * order);
        let mut values = Vec::with_capacity(words << depth);
        let mut args = vec![FlipWord::EMPTY; order];
        for idx in 0..words {
            for (i, a) in args.iter_mut().enumerate() {
                *a = FlipWord::from_mask(((idx >> (n * (order - 1 - i))) & ((1 << n) - 1)) as u64);
            }
            for x in 0..1u64 << depth {
                values.push(f(&args, x));
            }
        }
        Ok(Cochain { order, n, depth, values })
    }

    /// The 0-cochain given by a single cylinder function, tabulated at depth `D ≥ n`.
    pub fn from_function(h: &RealCylinder, n: usize, depth: usize) -> Result<Self> {
        let h = h.lift(depth.max(h.depth()))?;
        Self::from_fn(0, n, h.depth(), |_, x| h.at(x))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn index(&self, args: &[FlipWord], x: u64) -> usize {
        let word = args.iter().fold(0usize, |acc, w| (acc << self.n) | w.mask() as usize);
        (word << self.depth) | (x & low_mask(self.depth)) as usize
    }

    pub fn eval(&self, args: &[FlipWord], x: u64) -> Result<f64> {
        if args.len() != self.order {
            return Err(Error::Malformed(format!("{} arguments for a {}-cochain", args.len(), self.order)));
        }
        if let Some(w) = args.iter().find(|w| w.horizon() > self.n) {
            return Err(Error::DepthTooSmall { required: w.horizon(), actual: self.n });
        }
        Ok(self.values[self.index(args, x)])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Read a 1-cochain as a table `S(x, w) = c(w)[x]`.
    pub fn to_table(&self) -> Result<DfsTable> {
        if self.order != 1 {
            return Err(Error::Malformed(format!("a {}-cochain is not a groupoid function", self.order)));
        }
        DfsTable::from_fn(self.n, self.depth, |x, w| self.eval(&[w], x))
    }

    pub fn delta(&self) -> Result<Cochain> {
        cochain_delta(self)
    }
}

/// `δ^k`, with `Γ` acting by `(x° ∘ S)(x) = S(x ⊕ x°)`.
pub fn cochain_delta(c: &Cochain) -> Result<Cochain> {
    let k = c.order;
    if k > 2 {
        return Err(Error::OrderUnsupported(k));
    }
    Cochain::from_fn(k + 1, c.n, c.depth, |args, x| {
        let get = |a: &[FlipWord], x: u64| c.values[c.index(a, x)];
        let mut acc = get(&args[1..], x ^ args[0].mask());
        let mut merged = Vec::with_capacity(k);
        for i in 1..=k {
            merged.clear();
            merged.extend_from_slice(&args[..i - 1]);
            merged.push(args[i - 1] ^ args[i]);
            merged.extend_from_slice(&args[i + 1..]);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * get(&merged, x);
        }
        let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc + sign * get(&args[..k], x)
    })
}

/// `(δ⁰H)(w)[x] = H(x ⊕ w) - H(x)` as a table on `Γ_n`.
pub fn coboundary(h: &RealCylinder, n: usize) -> Result<DfsTable> {
    cochain_delta(&Cochain::from_function(h, n, n)?)?.to_table()
}

/// Finds `H` with `δ⁰H = S` on the truncation, if one exists.
///
/// Each prefix splits as `x = x̄ ⊕ x°` with `x° ∈ Γ_n` and `x̄` vanishing on
/// the first `n` sites, and `H(x) = S(x̄, x°)`. This gauges `H` to zero on
/// every orbit representative `x̄`; when `D = n` there is one orbit and the
/// gauge is `H(0…0) = 0`.
pub fn is_exact(s: &DfsTable) -> Option<RealCylinder> {
    let tol = tolerance(s);
    if dfs_check(s).max_violation > tol {
        return None;
    }
    let low = low_mask(s.n);
    let h = RealCylinder::from_fn(s.depth, |x| {
        let b = x.bits();
        s.entries[(b & low) as usize][(b & !low) as usize]
    })
    .ok()?;
    let back = coboundary(&h, s.n).ok()?;
    (back.max_abs_diff(s).ok()? <= tol).then_some(h)
}
