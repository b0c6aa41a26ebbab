//! The multiset clock: simulation, exhaustive enumeration, and the exact
//! Markov recursions for the stopping index and lap count.
//!
//! A permutation of the multiset `1^{m_1} ... n^{m_n}` marks the M hours of a
//! clock. Starting before hour 1, scan clockwise to the first occurrence of
//! symbol 1, then onward (wrapping as needed) to the first occurrence of 2,
//! and so on through symbol n. The stopping position after symbol s is `I_s`,
//! the number of wraps is `D_n` (equivalently the number of descents of the
//! index sequence), and `L_n` is the longest `l` such that `1,2,...,l` occurs
//! as a subsequence (the scan's descent-free prefix).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::bernstein::{pair_permutation_count, DistributionVector, VectorKind};
use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, Rational};
use crate::rng::trial_rng;

/// Symbol multiplicities `(m_1, ..., m_n)`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetSpec {
    multiplicities: Vec<u32>,
}

/// Beta-sum parameters are the same data as a multiset spec: jump i is
/// beta(1, m_i).
pub type BetaSumSpec = MultisetSpec;

impl MultisetSpec {
    pub fn new(multiplicities: Vec<u32>) -> Result<Self> {
        if multiplicities.is_empty() {
            return Err(Error::Domain("need at least one symbol".into()));
        }
        if multiplicities.contains(&0) {
            return Err(Error::Domain("multiplicities must be positive".into()));
        }
        Ok(Self { multiplicities })
    }

    /// The n-pairs spec `(2, 2, ..., 2)`.
    pub fn pairs(n: usize) -> Self {
        Self::new(vec![2; n]).expect("n >= 1")
    }

    /// Parse a comma-separated multiplicity list like `"2,3,2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let multiplicities = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multiplicity {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(multiplicities)
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Number of distinct symbols n.
    pub fn n_symbols(&self) -> usize {
        self.multiplicities.len()
    }

    /// Total number of marks `M = sum m_i`.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// Truncate to the first k symbols.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n_symbols() {
            return Err(Error::Domain(format!(
                "prefix length {k} outside 1..={}",
                self.n_symbols()
            )));
        }
        Self::new(self.multiplicities[..k].to_vec())
    }

    /// `M! / prod m_i!`, the number of distinct permutations.
    pub fn permutation_count(&self) -> BigInt {
        let mut count = factorial(self.total());
        for &m in &self.multiplicities {
            count /= factorial(m as usize);
        }
        count
    }

    /// The lexicographically smallest permutation `1..1 2..2 ... n..n`.
    pub fn first_permutation(&self) -> Vec<u32> {
        let mut perm = Vec::with_capacity(self.total());
        for (i, &m) in self.multiplicities.iter().enumerate() {
            perm.extend(std::iter::repeat_n(i as u32 + 1, m as usize));
        }
        perm
    }
}

impl std::fmt::Display for MultisetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.multiplicities.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Result of the clockwise scan of one permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOutcome {
    /// Stopping positions `I_1, ..., I_n` (1-based hours).
    pub indices: Vec<u32>,
    /// Number of wraps `D_n`; equals the descent count of `indices`.
    pub laps: u32,
    /// Longest `l` with `1,...,l` a subsequence.
    pub run_length: u32,
}

/// Run the clockwise scan on a multiset permutation (symbols `1..=n`).
pub fn scan_permutation(perm: &[u32], n_symbols: usize) -> ScanOutcome {
    let m_total = perm.len();
    let mut indices = Vec::with_capacity(n_symbols);
    let mut laps = 0u32;
    let mut pos = 0usize; // hour just visited; 0 is the origin
    for s in 1..=n_symbols as u32 {
        let mut found = 0usize;
        for q in pos + 1..=m_total {
            if perm[q - 1] == s {
                found = q;
                break;
            }
        }
        if found == 0 {
            laps += 1;
            for q in 1..=pos {
                if perm[q - 1] == s {
                    found = q;
                    break;
                }
            }
        }
        debug_assert!(found > 0, "symbol {s} missing from permutation");
        indices.push(found as u32);
        pos = found;
    }
    let run_length = run_length_of(&indices);
    debug_assert_eq!(laps, descents(&indices));
    ScanOutcome {
        indices,
        laps,
        run_length,
    }
}

fn descents(indices: &[u32]) -> u32 {
    indices.windows(2).filter(|w| w[0] > w[1]).count() as u32
}

/// Position of the first descent, or the full length if none.
fn run_length_of(indices: &[u32]) -> u32 {
    for (i, w) in indices.windows(2).enumerate() {
        if w[0] > w[1] {
            return i as u32 + 1;
        }
    }
    indices.len() as u32
}

/// One continuous-model draw: uniform marks, scan statistics and spacings.
#[derive(Clone, Debug)]
pub struct ClockSample {
    pub indices: Vec<u32>,
    pub laps: u32,
    pub run_length: u32,
    /// Clockwise gaps `X_1, ..., X_n`; `X_i` is beta(1, m_i) distributed.
    pub spacings: Vec<f64>,
    /// Times this trial was redrawn because of tied uniforms.
    pub ties_redrawn: u32,
}

const MAX_TIE_REDRAWS: u32 = 1000;

fn simulate_one<R: Rng>(spec: &MultisetSpec, rng: &mut R) -> ClockSample {
    let m_total = spec.total();
    let n = spec.n_symbols();
    let mut ties_redrawn = 0u32;
    loop {
        let mut marks: Vec<(f64, u32)> = Vec::with_capacity(m_total);
        for (i, &m) in spec.multiplicities().iter().enumerate() {
            for _ in 0..m {
                marks.push((rng.gen::<f64>(), i as u32 + 1));
            }
        }
        marks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if marks.windows(2).any(|w| w[0].0 == w[1].0) {
            ties_redrawn += 1;
            assert!(
                ties_redrawn < MAX_TIE_REDRAWS,
                "degenerate random source: uniforms keep colliding"
            );
            continue;
        }
        let perm: Vec<u32> = marks.iter().map(|&(_, s)| s).collect();
        let scan = scan_permutation(&perm, n);
        let mut spacings = Vec::with_capacity(n);
        let mut prev = 0.0f64;
        for &idx in &scan.indices {
            let here = marks[idx as usize - 1].0;
            let mut gap = here - prev;
            if gap < 0.0 {
                gap += 1.0;
            }
            spacings.push(gap);
            prev = here;
        }
        return ClockSample {
            indices: scan.indices,
            laps: scan.laps,
            run_length: scan.run_length,
            spacings,
            ties_redrawn,
        };
    }
}

/// Stream of independent clock draws, deterministic in `(seed, trial index)`.
pub fn simulate_clock(
    spec: &MultisetSpec,
    seed: u64,
    trials: u64,
) -> impl Iterator<Item = ClockSample> + '_ {
    (0..trials).map(move |t| simulate_one(spec, &mut trial_rng(seed, t)))
}

/// Aggregated counts from a simulation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockSummary {
    pub trials: u64,
    /// Counts of the final stopping index `I_n`, positions 1..=M.
    pub index_counts: Vec<u64>,
    /// Counts of the lap number `D_n`, values 0..=n-1.
    pub lap_counts: Vec<u64>,
    /// Counts of the run length `L_n`, values 1..=n.
    pub run_counts: Vec<u64>,
    pub ties_redrawn: u64,
}

impl ClockSummary {
    fn empty(spec: &MultisetSpec, trials: u64) -> Self {
        Self {
            trials,
            index_counts: vec![0; spec.total()],
            lap_counts: vec![0; spec.n_symbols()],
            run_counts: vec![0; spec.n_symbols()],
            ties_redrawn: 0,
        }
    }

    fn absorb(&mut self, sample: &ClockSample) {
        self.index_counts[*sample.indices.last().unwrap() as usize - 1] += 1;
        self.lap_counts[sample.laps as usize] += 1;
        self.run_counts[sample.run_length as usize - 1] += 1;
        self.ties_redrawn += sample.ties_redrawn as u64;
    }

    fn merge(mut self, other: ClockSummary) -> Self {
        self.trials += other.trials;
        for (a, b) in self.index_counts.iter_mut().zip(&other.index_counts) {
            *a += b;
        }
        for (a, b) in self.lap_counts.iter_mut().zip(&other.lap_counts) {
            *a += b;
        }
        for (a, b) in self.run_counts.iter_mut().zip(&other.run_counts) {
            *a += b;
        }
        self.ties_redrawn += other.ties_redrawn;
        self
    }
}

/// Simulate `trials` draws and aggregate counts; the per-trial streams make
/// the result independent of `parallel`.
pub fn summarize_clock(
    spec: &MultisetSpec,
    seed: u64,
    trials: u64,
    parallel: bool,
) -> ClockSummary {
    if !parallel {
        let mut summary = ClockSummary::empty(spec, trials);
        for sample in simulate_clock(spec, seed, trials) {
            summary.absorb(&sample);
        }
        return summary;
    }
    let chunk: u64 = 1 << 14;
    let starts: Vec<u64> = (0..trials).step_by(chunk as usize).collect();
    let mut summary = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(trials);
            let mut local = ClockSummary::empty(spec, 0);
            for t in start..end {
                local.absorb(&simulate_one(spec, &mut trial_rng(seed, t)));
            }
            local
        })
        .reduce(|| ClockSummary::empty(spec, 0), |a, b| a.merge(b));
    summary.trials = trials;
    summary
}

/// Exact joint counts of (stopping index, laps) plus the run-length law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointTable {
    /// Number of symbols n.
    pub n_symbols: usize,
    /// Number of positions M.
    pub positions: usize,
    /// `counts[i-1][d]` = number of permutations with `I_n = i`, `D_n = d`.
    pub counts: Vec<Vec<BigInt>>,
}

impl JointTable {
    pub fn total(&self) -> BigInt {
        self.counts.iter().flatten().sum()
    }

    /// Marginal over laps: counts of `I_n = i`.
    pub fn marginal_index(&self) -> Vec<BigInt> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    /// Marginal over the index: counts of `D_n = d`.
    pub fn marginal_laps(&self) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.n_symbols];
        for row in &self.counts {
            for (d, c) in row.iter().enumerate() {
                acc[d] += c;
            }
        }
        acc
    }

    /// The index law as an exact probability vector.
    pub fn index_distribution(&self) -> DistributionVector {
        let total = self.total();
        let values = self
            .marginal_index()
            .into_iter()
            .map(|c| Rational::new(c, total.clone()))
            .collect();
        DistributionVector::new(VectorKind::Probability, values, total)
    }

    /// The lap law as an exact probability vector (support 0..=n-1).
    pub fn laps_distribution(&self) -> DistributionVector {
        let total = self.total();
        let values = self
            .marginal_laps()
            .into_iter()
            .map(|c| Rational::new(c, total.clone()))
            .collect();
        DistributionVector::new(VectorKind::Probability, values, total)
    }
}

/// Next multiset permutation in lexicographic order; false at the last one.
pub fn next_permutation(arr: &mut [u32]) -> bool {
    if arr.len() < 2 {
        return false;
    }
    let mut i = arr.len() - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = arr.len() - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

/// Exhaustively scan all distinct permutations of the multiset; exact joint
/// table plus run-length counts. Guarded to `M <= 16`.
pub fn enumerate_joint(spec: &MultisetSpec) -> Result<(JointTable, Vec<BigInt>)> {
    let m_total = spec.total();
    if m_total > 16 {
        return Err(Error::Domain(format!(
            "enumeration guard: M = {m_total} > 16"
        )));
    }
    let n = spec.n_symbols();
    let mut counts = vec![vec![0u64; n]; m_total];
    let mut run_counts = vec![0u64; n];
    let mut perm = spec.first_permutation();
    loop {
        let scan = scan_permutation(&perm, n);
        let i = *scan.indices.last().unwrap() as usize;
        counts[i - 1][scan.laps as usize] += 1;
        run_counts[scan.run_length as usize - 1] += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let table = JointTable {
        n_symbols: n,
        positions: m_total,
        counts: counts
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect(),
    };
    let run_counts = run_counts.into_iter().map(BigInt::from).collect();
    Ok((table, run_counts))
}

/// Integer transition counts for the stopping-index chain of the pairs model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub n: usize,
    /// `(2n-2) x (2n)` counts; entry (x-1, y-1) is the number of pair
    /// insertions sending index x to index y.
    pub entries: Vec<Vec<u64>>,
    /// Row sum `C(2n, 2)`.
    pub normalizer: BigInt,
}

/// Number of ways to insert the two new marks so the scan moves from hour x
/// (of 2n-2) to hour y (of 2n): `x-y+1` when the walk wraps (y <= x),
/// `2n-1-x` when the first new mark sits just past x (y = x+1), and `2n-y+x`
/// beyond (y >= x+2).
pub fn q_matrix(n: usize) -> TransitionMatrix {
    assert!(n >= 2, "transition matrices start at n = 2");
    let rows = 2 * n - 2;
    let cols = 2 * n;
    let entries = (1..=rows)
        .map(|x| (1..=cols).map(|y| q_entry(n, x, y)).collect())
        .collect();
    TransitionMatrix {
        n,
        entries,
        normalizer: binomial(2 * n, 2),
    }
}

fn q_entry(n: usize, x: usize, y: usize) -> u64 {
    if y <= x {
        (x - y + 1) as u64
    } else if y == x + 1 {
        (2 * n - 1 - x) as u64
    } else {
        (2 * n - y + x) as u64
    }
}

/// The index law by the matrix forward equation `p_{k+1} = p_k P_{k+1}`,
/// starting from `p_1 = (1, 0)`. Exact.
pub fn p_vector_markov(n: usize) -> DistributionVector {
    assert!(n >= 1);
    let mut p = vec![Rational::one(), Rational::zero()];
    for k in 2..=n {
        let q = q_matrix(k);
        let norm = Rational::from_integer(q.normalizer.clone());
        let mut next = vec![Rational::zero(); 2 * k];
        for (xi, row) in q.entries.iter().enumerate() {
            if p[xi].is_zero() {
                continue;
            }
            for (yi, &count) in row.iter().enumerate() {
                if count != 0 {
                    next[yi] += &p[xi] * Rational::from_integer(BigInt::from(count)) / &norm;
                }
            }
        }
        p = next;
    }
    DistributionVector::new(VectorKind::Probability, p, pair_permutation_count(n))
}

/// Exact joint (index, laps) table for the pairs model by dynamic programming
/// over pair insertions: moving the scan from x to y <= x forces a wrap
/// (x-y+1 slot choices) and increments the lap count; all other insertions
/// leave it unchanged. Validated against enumeration.
pub fn joint_recursion(n: usize) -> JointTable {
    assert!(n >= 1);
    // counts[i-1][d] at the current stage k
    let mut counts = vec![vec![BigInt::zero(); n]; 2];
    counts[0][0] = BigInt::one();
    for k in 1..n {
        // insert the pair of (k+1)s: positions grow 2k -> 2k+2
        let mut next = vec![vec![BigInt::zero(); n]; 2 * k + 2];
        for x in 1..=2 * k {
            for d in 0..n {
                let c = counts[x - 1][d].clone();
                if c.is_zero() {
                    continue;
                }
                // wrap: y <= x, laps become d+1
                for y in 1..=x {
                    next[y - 1][d + 1] += &c * BigInt::from((x - y + 1) as u64);
                }
                // no wrap: y = x+1
                next[x][d] += &c * BigInt::from((2 * k + 1 - x) as u64);
                // no wrap: y >= x+2
                for y in x + 2..=2 * k + 2 {
                    next[y - 1][d] += &c * BigInt::from((2 * k + 2 - y + x) as u64);
                }
            }
        }
        counts = next;
    }
    JointTable {
        n_symbols: n,
        positions: 2 * n,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::p_vector_exact;

    #[test]
    fn spec_basics() {
        let s = MultisetSpec::parse("2,3,2").unwrap();
        assert_eq!(s.n_symbols(), 3);
        assert_eq!(s.total(), 7);
        assert_eq!(s.permutation_count(), BigInt::from(210));
        assert_eq!(s.to_string(), "2,3,2");
        assert!(MultisetSpec::parse("2,0,1").is_err());
        assert!(MultisetSpec::parse("").is_err());
        assert_eq!(MultisetSpec::pairs(3).permutation_count(), BigInt::from(90));
    }

    #[test]
    fn scan_known_permutations() {
        // the worked 4-pair example: tau = (1,1,4,2,4,3,3,2)
        let scan = scan_permutation(&[1, 1, 4, 2, 4, 3, 3, 2], 4);
        assert_eq!(scan.indices, vec![1, 4, 6, 3]);
        assert_eq!(scan.laps, 1);
        assert_eq!(scan.run_length, 3);

        // all six permutations of {1,1,2,2}
        let cases: [(&[u32], (u32, u32)); 6] = [
            (&[1, 1, 2, 2], (3, 0)),
            (&[1, 2, 1, 2], (2, 0)),
            (&[1, 2, 2, 1], (2, 0)),
            (&[2, 1, 1, 2], (4, 0)),
            (&[2, 1, 2, 1], (3, 0)),
            (&[2, 2, 1, 1], (1, 1)),
        ];
        for (perm, (i2, d2)) in cases {
            let scan = scan_permutation(perm, 2);
            assert_eq!((*scan.indices.last().unwrap(), scan.laps), (i2, d2));
        }

        // a single symbol stops immediately
        let scan = scan_permutation(&[1, 1, 1], 1);
        assert_eq!(scan.indices, vec![1]);
        assert_eq!(scan.laps, 0);
        assert_eq!(scan.run_length, 1);
    }

    #[test]
    fn q_matrices_match_known_values() {
        let q2 = q_matrix(2);
        assert_eq!(q2.entries, vec![vec![1, 2, 2, 1], vec![2, 1, 1, 2]]);
        assert_eq!(q2.normalizer, BigInt::from(6));
        let q3 = q_matrix(3);
        assert_eq!(q3.entries[1][3], 4);
        assert_eq!(q3.entries[0], vec![1, 4, 4, 3, 2, 1]);
        // row sums and the reverse-both-axes symmetry 2n-1 - Q(x,y) = Q(2n-1-x, 2n+1-y)
        for n in 2..=30usize {
            let q = q_matrix(n);
            for (xi, row) in q.entries.iter().enumerate() {
                let sum: u64 = row.iter().sum();
                assert_eq!(BigInt::from(sum), q.normalizer, "row sum at n={n}");
                for (yi, &v) in row.iter().enumerate() {
                    let x = xi + 1;
                    let y = yi + 1;
                    let mirrored = q.entries[2 * n - 1 - x - 1][2 * n + 1 - y - 1];
                    assert_eq!(
                        (2 * n - 1) as u64 - v,
                        mirrored,
                        "symmetry failed at n={n}, x={x}, y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn forward_equation_reproduces_exact_law() {
        let p1 = p_vector_markov(1);
        assert_eq!(p1.values(), &[Rational::one(), Rational::zero()]);
        for n in 1..=8 {
            assert_eq!(
                p_vector_markov(n).values(),
                p_vector_exact(n).values(),
                "markov law differs at n={n}"
            );
        }
    }

    #[test]
    fn joint_recursion_small_tables() {
        // two pairs
        let t2 = joint_recursion(2);
        let get = |t: &JointTable, i: usize, d: usize| t.counts[i - 1][d].clone();
        let expect_d0 = [0u64, 2, 2, 1];
        let expect_d1 = [1u64, 0, 0, 0];
        for i in 1..=4 {
            assert_eq!(get(&t2, i, 0), BigInt::from(expect_d0[i - 1]));
            assert_eq!(get(&t2, i, 1), BigInt::from(expect_d1[i - 1]));
        }
        // three pairs: full table
        let t3 = joint_recursion(3);
        let expect = [
            [0u64, 14, 1],
            [0, 13, 0],
            [6, 8, 0],
            [12, 4, 0],
            [15, 2, 0],
            [14, 1, 0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (d, want) in row.iter().enumerate() {
                assert_eq!(
                    get(&t3, i + 1, d),
                    BigInt::from(*want),
                    "mismatch at ({},{d})",
                    i + 1
                );
            }
        }
        assert_eq!(
            t3.marginal_laps(),
            vec![BigInt::from(47), BigInt::from(42), BigInt::from(1)]
        );
        // four pairs: lap marginal
        let t4 = joint_recursion(4);
        assert_eq!(
            t4.marginal_laps(),
            [641u64, 1659, 219, 1].map(BigInt::from).to_vec()
        );
        assert_eq!(t4.total(), pair_permutation_count(4));
    }

    #[test]
    fn enumeration_matches_recursion_and_markov() {
        for n in 1..=5usize {
            let spec = MultisetSpec::pairs(n);
            let (table, runs) = enumerate_joint(&spec).unwrap();
            let rec = joint_recursion(n);
            assert_eq!(table.counts, rec.counts, "joint tables differ at n={n}");
            assert_eq!(
                table.index_distribution().values(),
                p_vector_exact(n).values(),
                "index law differs at n={n}"
            );
            // run length n happens exactly when no wraps occur
            assert_eq!(runs[n - 1], table.marginal_laps()[0]);
            // the enumerated lap law agrees with the beta-sum CDF route
            assert_eq!(
                table.laps_distribution().values(),
                crate::sumdist::dist_d(n).values(),
                "lap law differs at n={n}"
            );
        }
        // non-uniform spec: totals check out
        let spec = MultisetSpec::parse("2,3,2").unwrap();
        let (table, _) = enumerate_joint(&spec).unwrap();
        assert_eq!(table.total(), spec.permutation_count());
        // guard
        let big = MultisetSpec::new(vec![3; 6]).unwrap();
        assert!(enumerate_joint(&big).is_err());
    }

    #[test]
    fn simulation_statistics() {
        // deterministic given the seed, and independent of parallelism
        let spec = MultisetSpec::pairs(2);
        let a = summarize_clock(&spec, 7, 2000, false);
        let b = summarize_clock(&spec, 7, 2000, true);
        assert_eq!(a, b);

        // empirical index law near (1,2,2,1)/6 at modest trials
        let trials = 200_000u64;
        let summary = summarize_clock(&spec, 20260809, trials, true);
        let expect = [1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0];
        for (count, want) in summary.index_counts.iter().zip(expect) {
            let freq = *count as f64 / trials as f64;
            assert!((freq - want).abs() < 0.01, "freq {freq} vs {want}");
        }

        // single-symbol spec: index 1, no laps, run 1, always
        let single = MultisetSpec::new(vec![3]).unwrap();
        let s = summarize_clock(&single, 5, 500, false);
        assert_eq!(s.index_counts[0], 500);
        assert_eq!(s.lap_counts[0], 500);
        assert_eq!(s.run_counts[0], 500);
    }

    #[test]
    fn sample_invariants() {
        let spec = MultisetSpec::parse("2,3,1,2").unwrap();
        for sample in simulate_clock(&spec, 99, 3000) {
            // laps equal the integer part of the spacing walk
            let total: f64 = sample.spacings.iter().sum();
            assert_eq!(sample.laps, total.floor() as u32);
            // complete run exactly when no laps
            assert_eq!(
                sample.run_length == spec.n_symbols() as u32,
                sample.laps == 0
            );
            assert_eq!(sample.ties_redrawn, 0);
        }
    }

    #[test]
    fn spacings_are_beta_distributed() {
        // Kolmogorov-Smirnov against F(x) = 1 - (1-x)^m, per coordinate, at
        // the 1e-3 significance cutoff
        let spec = MultisetSpec::parse("2,3,1").unwrap();
        let trials = 100_000usize;
        let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); spec.n_symbols()];
        for sample in simulate_clock(&spec, 424242, trials as u64) {
            for (bucket, &x) in samples.iter_mut().zip(&sample.spacings) {
                bucket.push(x);
            }
        }
        let cutoff = (2000.0f64.ln() / 2.0).sqrt() / (trials as f64).sqrt();
        for (i, bucket) in samples.iter_mut().enumerate() {
            let m = spec.multiplicities()[i] as f64;
            bucket.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut d = 0.0f64;
            for (rank, &x) in bucket.iter().enumerate() {
                let cdf = 1.0 - (1.0 - x).powf(m);
                let hi = (rank as f64 + 1.0) / trials as f64 - cdf;
                let lo = cdf - rank as f64 / trials as f64;
                d = d.max(hi.max(lo));
            }
            assert!(
                d < cutoff,
                "KS statistic {d} above cutoff {cutoff} for coordinate {i}"
            );
        }
    }

    #[test]
    fn stopping_index_independent_of_order_statistics() {
        // under the product law, E[U_{I:M} | I = k] = k/(M+1); the robust
        // 3-sigma band on the correlation of I with the centered mark must
        // contain zero
        let spec = MultisetSpec::pairs(3);
        let m_total = spec.total() as f64;
        let trials = 100_000usize;
        let mut is = Vec::with_capacity(trials);
        let mut rs = Vec::with_capacity(trials);
        for sample in simulate_clock(&spec, 777, trials as u64) {
            let i = *sample.indices.last().unwrap() as f64;
            let walk: f64 = sample.spacings.iter().sum();
            let u_at_stop = walk - sample.laps as f64;
            is.push(i);
            rs.push(u_at_stop - i / (m_total + 1.0));
        }
        let n = trials as f64;
        let mean_i = is.iter().sum::<f64>() / n;
        let mean_r = rs.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut var_i = 0.0;
        let mut var_r = 0.0;
        let mut var_prod = 0.0;
        for (i, r) in is.iter().zip(&rs) {
            let di = i - mean_i;
            let dr = r - mean_r;
            cov += di * dr;
            var_i += di * di;
            var_r += dr * dr;
            var_prod += (di * dr) * (di * dr);
        }
        let corr = cov / (var_i.sqrt() * var_r.sqrt());
        // robust standard error of the correlation under the null
        let se = var_prod.sqrt() / (var_i.sqrt() * var_r.sqrt());
        assert!(
            corr.abs() <= 3.0 * se.max(1.0 / n.sqrt()),
            "correlation {corr} outside the 3-sigma band {}",
            3.0 * se.max(1.0 / n.sqrt())
        );
    }

    #[test]
    fn run_length_tail_matches_exact_law() {
        // empirical P(L >= 2) for the (2,3) multiset against the exact CDF
        let spec = MultisetSpec::parse("2,3").unwrap();
        let trials = 200_000u64;
        let summary = summarize_clock(&spec, 5150, trials, true);
        let tail = summary.run_counts[1] as f64 / trials as f64;
        let exact = crate::rational::rational_to_f64(&crate::sumdist::prob_l_ge(&spec, 2).unwrap());
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (tail - exact).abs() <= 3.0 * se,
            "P(L>=2): {tail} vs {exact}"
        );
    }

    #[test]
    fn tie_redraw_path() {
        use rand::RngCore;
        // a random source that first produces a collision, then defers to a
        // real generator
        struct Degenerate {
            fed: u32,
            inner: rand_chacha::ChaCha8Rng,
        }
        impl RngCore for Degenerate {
            fn next_u32(&mut self) -> u32 {
                self.next_u64() as u32
            }
            fn next_u64(&mut self) -> u64 {
                if self.fed < 4 {
                    self.fed += 1;
                    return 0;
                }
                self.inner.next_u64()
            }
            fn fill_bytes(&mut self, dest: &mut [u8]) {
                let mut i = 0;
                while i < dest.len() {
                    let chunk = self.next_u64().to_le_bytes();
                    let take = (dest.len() - i).min(8);
                    dest[i..i + take].copy_from_slice(&chunk[..take]);
                    i += take;
                }
            }
            fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
                self.fill_bytes(dest);
                Ok(())
            }
        }
        let spec = MultisetSpec::pairs(2);
        let mut rng = Degenerate {
            fed: 0,
            inner: trial_rng(1, 1),
        };
        let sample = simulate_one(&spec, &mut rng);
        assert!(sample.ties_redrawn >= 1);
    }
}
