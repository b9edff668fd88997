//! Sparse vectors over a countable index set.
//!
//! The index set is modeled as the natural numbers; every vector here has
//! finite support (`SparseVector`, an element of c00) or is constant off a
//! finite set (`TailVector`). Values are binary64, exact zeros are never
//! stored, and sums over supports use Neumaier-compensated accumulation.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Position in the countable index set. Totally ordered, so "fresh index"
/// queries are well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Index(pub u64);

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Index {
    // JSON map keys arrive as strings, and the internally tagged functional
    // enum buffers them as such; accept both forms.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct IndexVisitor;

        impl Visitor<'_> for IndexVisitor {
            type Value = Index;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer index")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Index, E> {
                Ok(Index(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Index, E> {
                u64::try_from(v)
                    .map(Index)
                    .map_err(|_| E::custom("index must be nonnegative"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Index, E> {
                v.parse::<u64>()
                    .map(Index)
                    .map_err(|_| E::custom(format!("invalid index {v:?}")))
            }
        }

        deserializer.deserialize_any(IndexVisitor)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Index {
    fn from(value: u64) -> Self {
        Index(value)
    }
}

/// Neumaier-compensated accumulator. Adding an exact zero never changes the
/// state, and negating every input negates the total bitwise; both facts are
/// load-bearing for the exactness tests elsewhere in the crate.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum + self.comp
    }
}

/// |v|^p, with the p = 1 and p = 2 cases kept on exact-rounding paths so that
/// identities like |x−y|²-bookkeeping stay bit-reproducible across modules.
pub(crate) fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v.abs()
    } else if p == 2.0 {
        v * v
    } else {
        v.abs().powf(p)
    }
}

/// v^{1/p} for v ≥ 0, routing p = 2 through the correctly rounded sqrt.
pub(crate) fn root(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v.sqrt()
    } else {
        v.powf(1.0 / p)
    }
}

/// Finite-support element of c00: a finite map from indices to nonzero reals.
///
/// Canonical form: no stored value is exactly zero, so equality is structural
/// and `support` is exactly the key set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(from = "RawSparseVector")]
pub struct SparseVector {
    entries: BTreeMap<Index, f64>,
}

#[derive(Deserialize)]
struct RawSparseVector {
    entries: BTreeMap<Index, f64>,
}

impl From<RawSparseVector> for SparseVector {
    fn from(raw: RawSparseVector) -> Self {
        let mut v = SparseVector::new();
        for (j, value) in raw.entries {
            v.set(j, value);
        }
        v
    }
}

impl SparseVector {
    pub fn new() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }

    /// Builds a vector from (index, value) pairs, dropping exact zeros.
    /// Later pairs overwrite earlier ones at the same index.
    pub fn from_entries<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut v = SparseVector::new();
        for (j, value) in pairs {
            v.set(Index(j), value);
        }
        v
    }

    /// A standard basis vector e_j.
    pub fn basis(j: u64) -> Self {
        Self::from_entries([(j, 1.0)])
    }

    /// Sets the coordinate at `j`; an exact-zero value removes the entry.
    pub fn set(&mut self, j: Index, value: f64) {
        debug_assert!(value.is_finite(), "sparse vector values must be finite");
        if value == 0.0 {
            self.entries.remove(&j);
        } else {
            self.entries.insert(j, value);
        }
    }

    /// Coordinate at `j`; zero outside the support.
    pub fn get(&self, j: Index) -> f64 {
        self.entries.get(&j).copied().unwrap_or(0.0)
    }

    /// Number of nonzero coordinates.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// (index, value) pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (Index, f64)> + '_ {
        self.entries.iter().map(|(&j, &v)| (j, v))
    }

    /// Support in increasing index order.
    pub fn support(&self) -> impl Iterator<Item = Index> + '_ {
        self.entries.keys().copied()
    }

    pub fn max_support_index(&self) -> Option<Index> {
        self.entries.keys().next_back().copied()
    }

    /// a·self, in canonical form.
    pub fn scale(&self, a: f64) -> SparseVector {
        let mut out = SparseVector::new();
        for (j, v) in self.iter() {
            out.set(j, a * v);
        }
        out
    }

    /// self − other, in canonical form.
    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        axpy(-1.0, other, self)
    }
}

impl FromIterator<(u64, f64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (u64, f64)>>(iter: I) -> Self {
        Self::from_entries(iter)
    }
}

/// Cofinitely constant element of ℝ^J: finitely many overrides plus one tail
/// value shared by every other index.
///
/// Canonical form: no override equals the tail. `tail == 0` exactly when the
/// vector has finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawTailVector")]
pub struct TailVector {
    #[serde(rename = "entries")]
    overrides: BTreeMap<Index, f64>,
    tail: f64,
}

#[derive(Deserialize)]
struct RawTailVector {
    entries: BTreeMap<Index, f64>,
    tail: f64,
}

impl From<RawTailVector> for TailVector {
    fn from(raw: RawTailVector) -> Self {
        TailVector::from_overrides(raw.tail, raw.entries.into_iter().map(|(j, v)| (j.0, v)))
    }
}

impl TailVector {
    /// The constant vector with value `tail` everywhere.
    pub fn constant(tail: f64) -> Self {
        TailVector {
            overrides: BTreeMap::new(),
            tail,
        }
    }

    /// Builds a tail vector, dropping overrides equal to the tail.
    pub fn from_overrides<I>(tail: f64, overrides: I) -> Self
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut v = TailVector::constant(tail);
        for (j, value) in overrides {
            v.set(Index(j), value);
        }
        v
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Sets the coordinate at `j`; a value equal to the tail removes the override.
    pub fn set(&mut self, j: Index, value: f64) {
        if value == self.tail {
            self.overrides.remove(&j);
        } else {
            self.overrides.insert(j, value);
        }
    }

    pub fn get(&self, j: Index) -> f64 {
        self.overrides.get(&j).copied().unwrap_or(self.tail)
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Index, f64)> + '_ {
        self.overrides.iter().map(|(&j, &v)| (j, v))
    }

    /// True iff the vector has finite support (tail is exactly zero).
    pub fn is_finitely_supported(&self) -> bool {
        self.tail == 0.0
    }

    /// The finite-support coercion, available exactly when the tail is zero.
    pub fn to_sparse(&self) -> Option<SparseVector> {
        if self.is_finitely_supported() {
            Some(SparseVector::from_entries(
                self.overrides().map(|(j, v)| (j.0, v)),
            ))
        } else {
            None
        }
    }

    /// Restriction to the first `len` indices {0, …, len−1} as a sparse vector.
    pub fn prefix(&self, len: u64) -> SparseVector {
        let mut out = SparseVector::new();
        for j in 0..len {
            out.set(Index(j), self.get(Index(j)));
        }
        out
    }
}

/// Σ_{j∈support(x)} |x(j)|^p — the p-th power mass of Eq.-style partial sums,
/// attained at the full support for finite-support vectors.
///
/// Panics if `p < 1`.
pub fn p_norm_pow(x: &SparseVector, p: f64) -> f64 {
    assert!(p >= 1.0, "p-norm requires p >= 1, got {p}");
    let mut acc = Accumulator::default();
    for (_, v) in x.iter() {
        acc.add(pow_abs(v, p));
    }
    acc.total()
}

/// The p-norm (Σ |x(j)|^p)^{1/p}. Exact for the finite-support class.
///
/// Panics if `p < 1`.
pub fn p_norm(x: &SparseVector, p: f64) -> f64 {
    root(p_norm_pow(x, p), p)
}

/// Hölder-conjugate exponent p/(p−1).
///
/// Panics if `p <= 1`.
pub fn q_conjugate(p: f64) -> f64 {
    assert!(p > 1.0, "conjugate exponent requires p > 1, got {p}");
    p / (p - 1.0)
}

/// Σ mu(j)·x(j) over the common support.
pub fn dual_pairing(mu: &SparseVector, x: &SparseVector) -> f64 {
    let mut acc = Accumulator::default();
    // Both iterators are index-ordered; walk the smaller support.
    let (small, large) = if mu.support_size() <= x.support_size() {
        (mu, x)
    } else {
        (x, mu)
    };
    for (j, v) in small.iter() {
        let w = large.get(j);
        if w != 0.0 {
            acc.add(v * w);
        }
    }
    acc.total()
}

/// a·x + y in canonical form.
pub fn axpy(a: f64, x: &SparseVector, y: &SparseVector) -> SparseVector {
    let mut out = y.clone();
    if a == 0.0 {
        return out;
    }
    for (j, v) in x.iter() {
        out.set(j, a * v + out.get(j));
    }
    out
}

/// The `count` smallest indices not in `avoid`, strictly increasing.
pub fn fresh_indices<I>(avoid: I, count: usize) -> Vec<Index>
where
    I: IntoIterator<Item = Index>,
{
    let avoid: std::collections::BTreeSet<Index> = avoid.into_iter().collect();
    let mut out = Vec::with_capacity(count);
    let mut candidate = 0u64;
    while out.len() < count {
        let j = Index(candidate);
        if !avoid.contains(&j) {
            out.push(j);
        }
        candidate += 1;
    }
    out
}

/// The m-th fresh index (1-based) outside `avoid`.
pub fn nth_fresh_index<I>(avoid: I, m: u64) -> Index
where
    I: IntoIterator<Item = Index>,
{
    assert!(m >= 1, "fresh index ordinals are 1-based");
    *fresh_indices(avoid, m as usize)
        .last()
        .expect("count >= 1 yields at least one index")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(pairs: &[(u64, f64)]) -> SparseVector {
        SparseVector::from_entries(pairs.iter().copied())
    }

    #[test]
    fn p_norm_pythagorean_triple() {
        let x = sv(&[(0, 3.0), (1, 4.0)]);
        assert_eq!(p_norm(&x, 2.0), 5.0);
    }

    #[test]
    fn p_norm_zero_vector() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(p_norm(&SparseVector::new(), p), 0.0);
        }
    }

    #[test]
    fn p_norm_counting() {
        let x = sv(&[(0, 1.0), (1, 1.0), (2, 1.0)]);
        assert_eq!(p_norm(&x, 1.0), 3.0);
    }

    #[test]
    #[should_panic(expected = "p >= 1")]
    fn p_norm_rejects_p_below_one() {
        p_norm(&SparseVector::basis(0), 0.5);
    }

    #[test]
    fn q_conjugate_examples() {
        assert_eq!(q_conjugate(2.0), 2.0);
        assert_eq!(q_conjugate(3.0), 1.5);
        assert_eq!(q_conjugate(1.25), 5.0);
    }

    #[test]
    #[should_panic(expected = "p > 1")]
    fn q_conjugate_rejects_one() {
        q_conjugate(1.0);
    }

    #[test]
    fn dual_pairing_examples() {
        let e0 = SparseVector::basis(0);
        assert_eq!(dual_pairing(&e0, &e0), 1.0);

        let a = sv(&[(0, 1.0)]);
        let b = sv(&[(1, 1.0)]);
        assert_eq!(dual_pairing(&a, &b), 0.0);

        let mu = sv(&[(0, 0.5), (1, -0.5)]);
        let x = sv(&[(0, 2.0), (1, 2.0)]);
        assert_eq!(dual_pairing(&mu, &x), 0.0);
    }

    #[test]
    fn axpy_examples() {
        let x = sv(&[(0, 1.0)]);
        let y = sv(&[(0, -1.0)]);
        assert_eq!(axpy(1.0, &x, &y), SparseVector::new());

        let any = sv(&[(3, 2.5)]);
        assert_eq!(axpy(0.0, &x, &any), any);

        let x = sv(&[(1, 3.0)]);
        assert_eq!(axpy(2.0, &x, &SparseVector::new()), sv(&[(1, 6.0)]));
    }

    #[test]
    fn fresh_indices_examples() {
        assert_eq!(
            fresh_indices([Index(0), Index(1)], 2),
            vec![Index(2), Index(3)]
        );
        assert_eq!(fresh_indices([], 1), vec![Index(0)]);
        assert_eq!(
            fresh_indices([Index(0), Index(2)], 2),
            vec![Index(1), Index(3)]
        );
        assert_eq!(nth_fresh_index([Index(0)], 3), Index(3));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let mut x = sv(&[(0, 1.0), (5, -2.0)]);
        x.set(Index(0), 0.0);
        assert_eq!(x, sv(&[(5, -2.0)]));
        // -0.0 counts as exact zero.
        x.set(Index(5), -0.0);
        assert!(x.is_zero());
    }

    #[test]
    fn tail_vector_canonical_form() {
        let z = TailVector::from_overrides(1.0, [(0, -1.0), (3, 1.0)]);
        assert_eq!(z.overrides().count(), 1); // (3, 1.0) equals the tail
        assert_eq!(z.get(Index(0)), -1.0);
        assert_eq!(z.get(Index(3)), 1.0);
        assert_eq!(z.get(Index(100)), 1.0);
        assert!(!z.is_finitely_supported());
        assert!(z.to_sparse().is_none());

        let finite = TailVector::from_overrides(0.0, [(2, 4.0)]);
        assert_eq!(finite.to_sparse().unwrap(), sv(&[(2, 4.0)]));
    }

    #[test]
    fn tail_vector_prefix() {
        let z = TailVector::from_overrides(1.0, [(0, -2.0), (2, 0.0)]);
        // prefix(4) = (-2, 1, 0, 1); the zero override is dropped from the sparse form
        assert_eq!(z.prefix(4), sv(&[(0, -2.0), (1, 1.0), (3, 1.0)]));
    }

    /// Brute-force sup over all subsets of the support of partial power sums.
    /// Each subset is summed with the same compensated accumulator in index
    /// order, so the comparison with `p_norm_pow` is exact.
    fn subset_sup(x: &SparseVector, p: f64) -> f64 {
        let entries: Vec<f64> = x.iter().map(|(_, v)| v).collect();
        let n = entries.len();
        assert!(n <= 16, "oracle is exponential in the support size");
        let mut best = 0.0f64;
        for mask in 0..(1u32 << n) {
            let mut acc = Accumulator::default();
            for (i, &v) in entries.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    acc.add(pow_abs(v, p));
                }
            }
            best = best.max(acc.total());
        }
        best
    }

    #[test]
    fn p_norm_pow_matches_subset_oracle() {
        let x = sv(&[(0, -1.5), (3, 0.25), (7, 2.0), (9, -0.125), (40, 9.5)]);
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(p_norm_pow(&x, p), subset_sup(&x, p));
        }
    }

    #[test]
    fn triangle_inequality_bulk() {
        // 10^4 seeded pairs spread over p in {1, 1.5, 2, 3}.
        let spec = crate::probes::ProbeSpec {
            count: 20_000,
            ..crate::probes::ProbeSpec::default()
        };
        let pool = crate::probes::sample(&spec, crate::probes::DEFAULT_SEED);
        for (i, pair) in pool.chunks_exact(2).enumerate() {
            let p = [1.0, 1.5, 2.0, 3.0][i % 4];
            let sum = axpy(1.0, &pair[0], &pair[1]);
            assert!(p_norm(&sum, p) <= p_norm(&pair[0], p) + p_norm(&pair[1], p) + 1e-12);
        }
    }

    fn arb_sparse(max_len: usize) -> impl Strategy<Value = SparseVector> {
        proptest::collection::vec((0u64..50, 0.1f64..10.0, proptest::bool::ANY), 0..max_len)
            .prop_map(|pairs| {
                SparseVector::from_entries(
                    pairs
                        .into_iter()
                        .map(|(j, v, neg)| (j, if neg { -v } else { v })),
                )
            })
    }

    proptest! {
        #[test]
        fn triangle_inequality(x in arb_sparse(10), y in arb_sparse(10), pi in 0usize..4) {
            let p = [1.0, 1.5, 2.0, 3.0][pi];
            let sum = axpy(1.0, &x, &y);
            prop_assert!(p_norm(&sum, p) <= p_norm(&x, p) + p_norm(&y, p) + 1e-12);
        }

        #[test]
        fn hoelder_inequality(mu in arb_sparse(10), x in arb_sparse(10), pi in 0usize..3) {
            let p = [1.5, 2.0, 3.0][pi];
            let q = q_conjugate(p);
            prop_assert!(
                dual_pairing(&mu, &x).abs() <= p_norm(&mu, q) * p_norm(&x, p) + 1e-12
            );
        }

        #[test]
        fn q_conjugate_involution(p in 1.0001f64..50.0) {
            let q = q_conjugate(p);
            prop_assert!((q_conjugate(q) - p).abs() <= 1e-12 * p);
        }

        #[test]
        fn subset_oracle_randomized(x in arb_sparse(8), pi in 0usize..4) {
            let p = [1.0, 1.5, 2.0, 3.0][pi];
            prop_assert_eq!(p_norm_pow(&x, p), subset_sup(&x, p));
        }

        #[test]
        fn canonicalization_is_idempotent(x in arb_sparse(10)) {
            let rebuilt = SparseVector::from_entries(x.iter().map(|(j, v)| (j.0, v)));
            prop_assert_eq!(rebuilt, x);
        }
    }
}
