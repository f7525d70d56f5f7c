//! Finite dynamical systems as index tables: iterated image chains,
//! periodic-point detection by in-degree peeling, and the preperiodic
//! strata `W_n = f^n(S) \ f^{n+1}(S)` computed by two independent
//! algorithms that are cross-checked against each other.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::{rat, Error, Rat, Result, TableLimit};

/// Dense bit-set over codes `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    len: u64,
    words: Vec<u64>,
}

impl CodeSet {
    pub fn empty(len: u64) -> Self {
        CodeSet { len, words: vec![0; len.div_ceil(64) as usize] }
    }

    pub fn full(len: u64) -> Self {
        let mut s = CodeSet { len, words: vec![u64::MAX; len.div_ceil(64) as usize] };
        let spare = (64 - (len % 64)) % 64;
        if spare > 0 {
            if let Some(last) = s.words.last_mut() {
                *last >>= spare;
            }
        }
        s
    }

    pub fn insert(&mut self, i: u64) {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn is_subset_of(&self, other: &CodeSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Iterate set members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            core::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    Some(wi as u64 * 64 + b)
                }
            })
        })
    }

    pub fn to_sorted_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

/// A total self-map of `[0, q)` materialized as an index array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    q: u64,
    next: Vec<u32>,
}

/// Image sets `[f^0(S), ..., f^T(S)]` where `T` is the first index with
/// `f^T(S) = f^{T+1}(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageChain {
    pub images: Vec<CodeSet>,
    pub sizes: Vec<u64>,
    pub tail_length: usize,
}

/// Sizes of the periodic set and of every nonempty stratum `W_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataReport {
    q: u64,
    periodic_count: u64,
    tail_length: usize,
    strata: BTreeMap<u32, u64>,
}

/// Per-code classification: periodic, or strictly preperiodic with its
/// unique stratum index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClassification {
    /// `u32::MAX` marks a periodic code; anything else is the stratum `n`.
    depth: Vec<u32>,
}

const PERIODIC: u32 = u32::MAX;

impl OrbitClassification {
    pub fn is_periodic(&self, code: u64) -> bool {
        self.depth[code as usize] == PERIODIC
    }

    pub fn stratum(&self, code: u64) -> Option<u32> {
        let d = self.depth[code as usize];
        if d == PERIODIC {
            None
        } else {
            Some(d)
        }
    }

    pub fn len(&self) -> u64 {
        self.depth.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }
}

impl FunctionTable {
    /// Materialize `f` by evaluating it on every code in order.
    pub fn build(q: u64, limit: TableLimit, mut f: impl FnMut(u64) -> u64) -> Result<Self> {
        limit.check(q)?;
        let mut next = Vec::with_capacity(q as usize);
        for x in 0..q {
            let y = f(x);
            debug_assert!(y < q, "map must be a total self-map of [0, q)");
            next.push(y as u32);
        }
        Ok(FunctionTable { q, next })
    }

    /// Wrap a precomputed table, validating totality.
    pub fn from_next(next: Vec<u32>, limit: TableLimit) -> Result<Self> {
        let q = next.len() as u64;
        limit.check(q)?;
        if next.iter().any(|&y| (y as u64) >= q) {
            return Err(Error::BadRange("table entry out of range"));
        }
        Ok(FunctionTable { q, next })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn apply(&self, code: u64) -> u64 {
        self.next[code as usize] as u64
    }

    pub fn next(&self) -> &[u32] {
        &self.next
    }

    fn image_of(&self, cur: &CodeSet, out: &mut CodeSet) {
        out.clear();
        for i in cur.iter() {
            out.insert(self.next[i as usize] as u64);
        }
    }

    /// Sizes `|f^k(S)|` for `k = 0..=T`, where `T` is the first index at
    /// which the chain stabilizes. Streaming; keeps only two sets alive.
    pub fn image_sizes(&self) -> (Vec<u64>, usize) {
        let mut cur = CodeSet::full(self.q);
        let mut sizes = vec![self.q];
        let mut nxt = CodeSet::empty(self.q);
        loop {
            self.image_of(&cur, &mut nxt);
            let n = nxt.count();
            // size equality implies set equality under nesting; check both
            // anyway
            if n == *sizes.last().unwrap() {
                assert!(nxt == cur, "size repeated without set stabilizing");
                break;
            }
            debug_assert!(nxt.is_subset_of(&cur), "image chain must be nested");
            sizes.push(n);
            core::mem::swap(&mut cur, &mut nxt);
        }
        let tail = sizes.len() - 1;
        (sizes, tail)
    }

    /// The full image chain `[f^0(S), ..., f^T(S)]` with stored sets.
    ///
    /// Memory is `Θ(T q / 8)`; for size-only work prefer
    /// [`FunctionTable::image_sizes`].
    pub fn iterated_images(&self) -> ImageChain {
        let mut images = vec![CodeSet::full(self.q)];
        let mut sizes = vec![self.q];
        loop {
            let cur = images.last().unwrap();
            let mut nxt = CodeSet::empty(self.q);
            self.image_of(cur, &mut nxt);
            let n = nxt.count();
            if n == *sizes.last().unwrap() {
                assert!(&nxt == cur, "size repeated without set stabilizing");
                break;
            }
            debug_assert!(nxt.is_subset_of(cur));
            sizes.push(n);
            images.push(nxt);
        }
        let tail_length = images.len() - 1;
        ImageChain { images, sizes, tail_length }
    }

    /// Periodic points by in-degree peeling, returned sorted by code.
    pub fn periodic_set(&self) -> Vec<u64> {
        let (depth, _) = self.peel();
        (0..self.q).filter(|&i| depth[i as usize] == PERIODIC).collect()
    }

    /// In-degree peeling; returns the depth array (stratum per preperiodic
    /// code, `PERIODIC` for the rest) and the periodic count.
    fn peel(&self) -> (Vec<u32>, u64) {
        let q = self.q as usize;
        let mut indeg = vec![0u32; q];
        for &y in &self.next {
            indeg[y as usize] += 1;
        }
        let mut depth = vec![0u32; q];
        let mut stack: Vec<u32> = (0..q as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let mut peeled: u64 = 0;
        while let Some(u) = stack.pop() {
            peeled += 1;
            let v = self.next[u as usize];
            let cand = depth[u as usize] + 1;
            if cand > depth[v as usize] {
                depth[v as usize] = cand;
            }
            indeg[v as usize] -= 1;
            if indeg[v as usize] == 0 {
                stack.push(v);
            }
        }
        for (i, d) in depth.iter_mut().enumerate() {
            if indeg[i] > 0 {
                *d = PERIODIC;
            }
        }
        (depth, self.q - peeled)
    }

    /// Stratum of every strictly preperiodic code as the longest chain of
    /// preperiodic preimages ending at it (independent of the image-chain
    /// computation).
    pub fn tail_depths(&self) -> OrbitClassification {
        let (depth, _) = self.peel();
        OrbitClassification { depth }
    }

    /// The same classification derived from image-chain membership: the
    /// stratum of `s` is the last chain index whose image still contains
    /// `s`. Serves as the cross-check twin of [`FunctionTable::tail_depths`].
    pub fn chain_classification(&self) -> OrbitClassification {
        let q = self.q as usize;
        let mut last_seen = vec![0u32; q];
        let mut cur = CodeSet::full(self.q);
        let mut nxt = CodeSet::empty(self.q);
        let mut k: u32 = 0;
        loop {
            self.image_of(&cur, &mut nxt);
            if nxt == cur {
                break;
            }
            k += 1;
            for s in nxt.iter() {
                last_seen[s as usize] = k;
            }
            core::mem::swap(&mut cur, &mut nxt);
        }
        let tail = k;
        for d in last_seen.iter_mut() {
            if *d == tail {
                *d = PERIODIC;
            }
        }
        OrbitClassification { depth: last_seen }
    }

    /// Periodic count plus the size of every nonempty stratum.
    pub fn strata_report(&self) -> StrataReport {
        let (sizes, tail) = self.image_sizes();
        let mut strata = BTreeMap::new();
        for n in 0..tail {
            let w = sizes[n] - sizes[n + 1];
            // nesting is strict before stabilization
            assert!(w > 0, "empty stratum before the chain stabilized");
            strata.insert(n as u32, w);
        }
        let periodic_count = sizes[tail];
        let total: u64 = strata.values().sum();
        assert_eq!(periodic_count + total, self.q, "strata must partition the complement of Per");
        StrataReport { q: self.q, periodic_count, tail_length: tail, strata }
    }

    /// `w_{m,n} = (|f^m(S)| - |f^n(S)|) / q` as an exact rational, reading
    /// stabilized sizes past the tail.
    pub fn w_fraction(&self, m: u32, n: u32) -> Result<Rat> {
        let (sizes, tail) = self.image_sizes();
        w_mn_from_sizes(&sizes, tail, self.q, m, n)
    }
}

fn w_mn_from_sizes(sizes: &[u64], tail: usize, q: u64, m: u32, n: u32) -> Result<Rat> {
    if m >= n {
        return Err(Error::BadRange("w_{m,n} requires m < n"));
    }
    let at = |k: u32| sizes[(k as usize).min(tail)];
    Ok(rat(at(m) - at(n), q))
}

impl ImageChain {
    /// Final (stabilized) image set, which equals the periodic points.
    pub fn final_set(&self) -> &CodeSet {
        self.images.last().unwrap()
    }
}

impl StrataReport {
    /// Rebuild a report from serialized parts, revalidating the partition
    /// identity and the contiguity of the stratum indices.
    pub fn from_parts(
        q: u64,
        periodic_count: u64,
        tail_length: usize,
        strata: BTreeMap<u32, u64>,
    ) -> Result<Self> {
        let total: u64 = strata.values().sum();
        let contiguous = strata
            .keys()
            .enumerate()
            .all(|(i, &n)| i as u32 == n && (n as usize) < tail_length);
        if periodic_count + total != q || strata.len() != tail_length || !contiguous {
            return Err(Error::BadRange("strata do not partition the complement of Per"));
        }
        if strata.values().any(|&w| w == 0) {
            return Err(Error::BadRange("stored strata must be nonempty"));
        }
        Ok(StrataReport { q, periodic_count, tail_length, strata })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn periodic_count(&self) -> u64 {
        self.periodic_count
    }

    pub fn tail_length(&self) -> usize {
        self.tail_length
    }

    /// Nonempty strata only, keyed by `n`.
    pub fn strata(&self) -> &BTreeMap<u32, u64> {
        &self.strata
    }

    /// `|f^k(S)|` recovered from the stored strata.
    pub fn size_at(&self, k: u32) -> u64 {
        let removed: u64 = self.strata.range(..k).map(|(_, &w)| w).sum();
        self.q - removed
    }

    /// `w_n` as an exact rational.
    pub fn w(&self, n: u32) -> Rat {
        rat(self.strata.get(&n).copied().unwrap_or(0), self.q)
    }

    /// `w_{m,n}` as an exact rational.
    pub fn w_mn(&self, m: u32, n: u32) -> Result<Rat> {
        if m >= n {
            return Err(Error::BadRange("w_{m,n} requires m < n"));
        }
        Ok(rat(self.size_at(m) - self.size_at(n), self.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(next: &[u32]) -> FunctionTable {
        FunctionTable::from_next(next.to_vec(), TableLimit::default()).unwrap()
    }

    // x^2 + 1 over F_5
    fn sq_plus_one() -> FunctionTable {
        table(&[1, 2, 0, 0, 2])
    }

    // x^2 over F_5
    fn sq() -> FunctionTable {
        table(&[0, 1, 4, 4, 1])
    }

    #[test]
    fn build_table_examples() {
        let identity = FunctionTable::build(5, TableLimit::default(), |x| x).unwrap();
        assert_eq!(identity.next(), &[0, 1, 2, 3, 4]);

        let constant = FunctionTable::build(4, TableLimit::default(), |_| 3).unwrap();
        assert_eq!(constant.next(), &[3, 3, 3, 3]);

        assert!(matches!(
            FunctionTable::build(100, TableLimit(64), |x| x),
            Err(Error::TableLimitExceeded { q: 100, limit: 64 })
        ));
    }

    #[test]
    fn iterated_images_examples() {
        let chain = sq_plus_one().iterated_images();
        assert_eq!(chain.sizes, vec![5, 3]);
        assert_eq!(chain.tail_length, 1);
        assert_eq!(chain.final_set().to_sorted_vec(), vec![0, 1, 2]);

        let identity = FunctionTable::build(5, TableLimit::default(), |x| x).unwrap();
        let chain = identity.iterated_images();
        assert_eq!(chain.sizes, vec![5]);
        assert_eq!(chain.tail_length, 0);

        let constant = FunctionTable::build(7, TableLimit::default(), |_| 3).unwrap();
        let chain = constant.iterated_images();
        assert_eq!(chain.sizes, vec![7, 1]);
        assert_eq!(chain.final_set().to_sorted_vec(), vec![3]);
    }

    #[test]
    fn periodic_set_examples() {
        assert_eq!(sq_plus_one().periodic_set(), vec![0, 1, 2]);

        let identity = FunctionTable::build(9, TableLimit::default(), |x| x).unwrap();
        assert_eq!(identity.periodic_set(), (0..9).collect::<Vec<_>>());

        assert_eq!(sq().periodic_set(), vec![0, 1]);
    }

    #[test]
    fn peeling_matches_stabilized_image() {
        for t in [sq_plus_one(), sq()] {
            let chain = t.iterated_images();
            assert_eq!(t.periodic_set(), chain.final_set().to_sorted_vec());
        }
    }

    #[test]
    fn strata_report_examples() {
        let r = sq_plus_one().strata_report();
        assert_eq!(r.periodic_count(), 3);
        assert_eq!(r.strata(), &BTreeMap::from([(0, 2)]));

        let r = sq().strata_report();
        assert_eq!(r.periodic_count(), 2);
        assert_eq!(r.tail_length(), 2);
        assert_eq!(r.strata(), &BTreeMap::from([(0, 2), (1, 1)]));

        let identity = FunctionTable::build(6, TableLimit::default(), |x| x).unwrap();
        let r = identity.strata_report();
        assert_eq!(r.periodic_count(), 6);
        assert!(r.strata().is_empty());
    }

    #[test]
    fn tail_depths_examples() {
        let c = sq().tail_depths();
        assert_eq!(c.stratum(2), Some(0));
        assert_eq!(c.stratum(3), Some(0));
        assert_eq!(c.stratum(4), Some(1));
        assert!(c.is_periodic(0) && c.is_periodic(1));

        let constant = FunctionTable::build(5, TableLimit::default(), |_| 2).unwrap();
        let c = constant.tail_depths();
        for code in [0u64, 1, 3, 4] {
            assert_eq!(c.stratum(code), Some(0));
        }
        assert!(c.is_periodic(2));

        let c = sq_plus_one().tail_depths();
        assert_eq!(c.stratum(3), Some(0));
        assert_eq!(c.stratum(4), Some(0));
    }

    #[test]
    fn classifications_agree() {
        for t in [sq_plus_one(), sq()] {
            assert_eq!(t.tail_depths(), t.chain_classification());
        }
    }

    #[test]
    fn w_fraction_examples() {
        let t = sq();
        assert_eq!(t.w_fraction(0, 1).unwrap(), rat(2, 5));
        assert_eq!(t.w_fraction(0, 3).unwrap(), rat(3, 5));
        assert_eq!(t.w_fraction(7, 9).unwrap(), rat(0, 5));
        assert!(matches!(t.w_fraction(3, 3), Err(Error::BadRange(_))));
    }

    #[test]
    fn report_size_at_recovers_chain() {
        let t = sq();
        let (sizes, tail) = t.image_sizes();
        let r = t.strata_report();
        for k in 0..=(tail as u32 + 2) {
            assert_eq!(r.size_at(k), sizes[(k as usize).min(tail)]);
        }
        assert_eq!(r.w(0), rat(2, 5));
        assert_eq!(r.w(1), rat(1, 5));
        assert_eq!(r.w(5), rat(0, 5));
        assert_eq!(r.w_mn(0, 3).unwrap(), rat(3, 5));
    }

    #[test]
    fn codeset_basics() {
        let mut s = CodeSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.count(), 3);
        assert_eq!(s.to_sorted_vec(), vec![0, 64, 129]);
        assert!(s.contains(64) && !s.contains(63));
        let f = CodeSet::full(130);
        assert_eq!(f.count(), 130);
        assert!(s.is_subset_of(&f) && !f.is_subset_of(&s));
    }
}
