//! Exact two-letter word combinatorics: arbitrary-precision counts of the
//! classes `C_{m,k,s}` (exactly `s` occurrences of the subword `ab`) and
//! `D_{m,k,L}` (k alternations, long `a`-runs), pattern enumeration, and the
//! two estimate inequalities decided in exact rational arithmetic.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision non-negative integer for word counts.
///
/// Thin wrapper over `BigUint` exposing the operations the laboratory
/// needs: add, multiply, compare, decimal render, log10 approximation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &BigCount) -> BigCount {
        BigCount(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &BigCount) -> BigCount {
        BigCount(&self.0 * &other.0)
    }

    pub fn mul_u64(&self, v: u64) -> BigCount {
        BigCount(&self.0 * BigUint::from(v))
    }

    /// Decimal rendering (exact).
    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    /// Value as f64 if exactly representable in u64 range, else None.
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Nearest f64 (may round for values above 2^53).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// log10 approximation from the top 53 bits plus bit count; accurate to
    /// a few ulps (far below the 1e-12 contract). `log10(0) = -inf`.
    pub fn log10(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.bits();
        let shift = bits.saturating_sub(53);
        let top = (&self.0 >> shift).to_f64().expect("top bits fit f64");
        top.log10() + shift as f64 * std::f64::consts::LOG10_2
    }
}

impl std::fmt::Display for BigCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 1..=k {
        c = c * BigUint::from(n - k + i) / BigUint::from(i);
    }
    BigCount(c)
}

/// `|C_{m,k,s}| = C(m−k, s)·C(k, s)`: words of length `m` with `k` letters
/// `b` and exactly `s` occurrences of the subword `ab`.
pub fn count_c(m: u64, k: u64, s: u64) -> Result<BigCount> {
    if k > m {
        return Err(Error::Domain(format!("count_c requires k <= m, got k={k}, m={m}")));
    }
    Ok(binomial(m - k, s).mul(&binomial(k, s)))
}

/// `|D_{m,k,L}| = |C_{m−(k+1)L, k, k}|`: the k-alternation class with all
/// interior `a`-runs longer than `L` and trailing run at least `L`. Zero
/// when `m − (k+1)L < k` (the convention covers negative arguments).
pub fn count_d(m: u64, k: u64, l: u64) -> BigCount {
    let shift = match (k + 1).checked_mul(l) {
        Some(s) => s,
        None => return BigCount::zero(),
    };
    if shift > m || m - shift < k {
        return BigCount::zero();
    }
    count_c(m - shift, k, k).expect("k <= m - shift by construction")
}

/// Letters of the two-letter alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
}

/// A word in run-length form: alternating runs of `a`s and `b`s, every run
/// nonempty. The empty word is allowed (`m = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPattern {
    runs: Vec<(Letter, u32)>,
}

impl WordPattern {
    /// Validate alternation and nonzero run lengths.
    pub fn from_runs(runs: Vec<(Letter, u32)>) -> Result<Self> {
        for (i, &(letter, len)) in runs.iter().enumerate() {
            if len == 0 {
                return Err(Error::PatternMismatch("zero-length run".into()));
            }
            if i > 0 && runs[i - 1].0 == letter {
                return Err(Error::PatternMismatch(
                    "adjacent runs with the same letter".into(),
                ));
            }
        }
        Ok(WordPattern { runs })
    }

    /// Run-length encode a letter sequence.
    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut runs: Vec<(Letter, u32)> = Vec::new();
        for &l in letters {
            match runs.last_mut() {
                Some((last, len)) if *last == l => *len += 1,
                _ => runs.push((l, 1)),
            }
        }
        WordPattern { runs }
    }

    pub fn runs(&self) -> &[(Letter, u32)] {
        &self.runs
    }

    /// Expand to the letter sequence.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(l, len) in &self.runs {
            out.extend(std::iter::repeat_n(l, len as usize));
        }
        out
    }

    /// Total length `m`.
    pub fn m(&self) -> u64 {
        self.runs.iter().map(|&(_, len)| len as u64).sum()
    }

    /// Number of `b` letters.
    pub fn k(&self) -> u64 {
        self.runs
            .iter()
            .filter(|&&(l, _)| l == Letter::B)
            .map(|&(_, len)| len as u64)
            .sum()
    }
}

/// Number of `ab` subword occurrences: adjacencies of an `a`-run followed
/// by a `b`-run in the canonical run form.
pub fn count_ab(w: &WordPattern) -> u64 {
    w.runs()
        .windows(2)
        .filter(|pair| pair[0].0 == Letter::A && pair[1].0 == Letter::B)
        .count() as u64
}

/// All weak compositions of `n` into `parts` parts, lexicographic.
fn weak_compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    debug_assert!(parts >= 1);
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fn rec(n: u32, idx: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx == current.len() - 1 {
            current[idx] = n;
            out.push(current.clone());
            return;
        }
        for v in 0..=n {
            current[idx] = v;
            rec(n - v, idx + 1, current, out);
        }
    }
    rec(n, 0, &mut current, &mut out);
    out
}

/// Enumerate the class `C_{m,k,s}` as canonical patterns
/// `b^{j0} a^{i1} b^{j1} ⋯ a^{is} b^{js} a^{i_{s+1}}` (interior runs ≥ 1,
/// `j0`, `i_{s+1}` ≥ 0). Yields exactly `count_c(m,k,s)` distinct patterns.
pub fn enumerate_class(m: u64, k: u64, s: u64, cap: u64) -> Result<Vec<WordPattern>> {
    if k > m {
        return Err(Error::Domain(format!(
            "enumerate_class requires k <= m, got k={k}, m={m}"
        )));
    }
    let total = count_c(m, k, s)?;
    if total > BigCount::from_u64(cap) {
        return Err(Error::CapExceeded {
            words: total.to_decimal(),
            cap,
        });
    }
    if total.is_zero() {
        return Ok(Vec::new());
    }
    // Nonzero count implies s ≤ min(k, m−k), so the subtractions are safe
    // and run lengths fit u32 only if m does; enforce that.
    if m > u32::MAX as u64 {
        return Err(Error::Domain("word length exceeds u32".into()));
    }
    let (m, k, s) = (m as u32, k as u32, s as u32);
    let a_total = m - k;
    let parts = s as usize + 1;
    // a-side: i_t = c_t + 1 for t < s+1 (interior), i_{s+1} = c_{s+1}
    let a_side = weak_compositions(a_total - s, parts);
    // b-side: j_0 = d_0, j_t = d_t + 1 for t ≥ 1
    let b_side = weak_compositions(k - s, parts);
    let mut out = Vec::new();
    for ac in &a_side {
        for bc in &b_side {
            let mut runs: Vec<(Letter, u32)> = Vec::new();
            let j0 = bc[0];
            if j0 > 0 {
                runs.push((Letter::B, j0));
            }
            for t in 0..s as usize {
                runs.push((Letter::A, ac[t] + 1));
                runs.push((Letter::B, bc[t + 1] + 1));
            }
            let tail = ac[s as usize];
            if tail > 0 {
                runs.push((Letter::A, tail));
            }
            out.push(WordPattern { runs });
        }
    }
    debug_assert_eq!(BigCount::from_u64(out.len() as u64), total);
    Ok(out)
}

/// Exact rational in the open unit interval, used for the ε of the
/// estimate inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    /// Requires `0 < num < den` (a value strictly inside (0,1)).
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::Domain(format!(
                "epsilon must lie strictly in (0,1); got {num}/{den}"
            )));
        }
        Ok(Rational { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Both sides of the binomial drop inequality
/// `C(m−L, k) ≥ (1−ε)·C(m, k)`, exact.
#[derive(Debug, Clone)]
pub struct DropSides {
    /// `C(m−L, k)`.
    pub lhs: BigCount,
    /// `(den−num)·C(m, k)`, the right side scaled by `den`.
    pub rhs_num: BigCount,
    /// The common denominator `den`.
    pub rhs_den: BigCount,
    /// Whether the hypothesis `m ≥ L(1 + k/ε)` holds.
    pub hypothesis_holds: bool,
}

impl DropSides {
    /// The inequality itself, decided exactly:
    /// `lhs·rhs_den ≥ rhs_num`.
    pub fn inequality_holds(&self) -> bool {
        self.lhs.mul(&self.rhs_den) >= self.rhs_num
    }
}

/// Exact sides of `C(m−L, k) ≥ (1−ε)·C(m, k)` together with the
/// hypothesis check `m ≥ L(1 + k/ε)` (decided in integer arithmetic:
/// `m·num ≥ L·(num + k·den)`).
pub fn binom_drop_sides(m: u64, k: u64, l: u64, eps: Rational) -> Result<DropSides> {
    if m == 0 || l == 0 {
        return Err(Error::Domain("binom_drop_sides requires positive m and L".into()));
    }
    let lhs = if l > m {
        BigCount::zero()
    } else {
        binomial(m - l, k)
    };
    let rhs_num = binomial(m, k).mul_u64(eps.den - eps.num);
    let rhs_den = BigCount::from_u64(eps.den);
    let hypothesis_holds = (m as u128) * (eps.num as u128)
        >= (l as u128) * (eps.num as u128 + (k as u128) * (eps.den as u128));
    Ok(DropSides {
        lhs,
        rhs_num,
        rhs_den,
        hypothesis_holds,
    })
}

/// Exact sides of the small-s tail inequality
/// `Σ_{s<S} |C_{m,k,s}| < ε·|C_{m,k,S}|`.
#[derive(Debug, Clone)]
pub struct TailSides {
    /// `Σ_{s=0}^{S−1} count_c(m,k,s)`.
    pub tail: BigCount,
    /// `count_c(m,k,S)`.
    pub bound_term: BigCount,
    /// Whether the hypothesis `m > S³/ε + 2S − 1` holds.
    pub hypothesis_holds: bool,
}

impl TailSides {
    /// The strict inequality `tail < ε·bound_term`, decided exactly as
    /// `tail·den < num·bound_term`.
    pub fn inequality_holds(&self, eps: Rational) -> bool {
        self.tail.mul_u64(eps.den) < self.bound_term.mul_u64(eps.num)
    }
}

/// Exact tail and bound term of the small-s estimate, plus the hypothesis
/// check `m > S³/ε + 2S − 1` (in integers: `num·(m − 2S + 1) > den·S³`).
/// Requires `S ≥ 1`, `k ≥ S`, `m − k ≥ S`.
pub fn small_s_tail_sides(m: u64, k: u64, s_bound: u64, eps: Rational) -> Result<TailSides> {
    if s_bound == 0 {
        return Err(Error::Domain("small_s_tail_sides requires S >= 1".into()));
    }
    if k < s_bound || m < k || m - k < s_bound {
        return Err(Error::Domain(format!(
            "small_s_tail_sides requires k >= S and m-k >= S; got m={m}, k={k}, S={s_bound}"
        )));
    }
    let mut tail = BigCount::zero();
    for s in 0..s_bound {
        tail = tail.add(&count_c(m, k, s)?);
    }
    let bound_term = count_c(m, k, s_bound)?;
    // m ≥ 2S from the preconditions, so m − 2S + 1 ≥ 1.
    let hypothesis_holds = (eps.num as u128) * ((m - 2 * s_bound + 1) as u128)
        > (eps.den as u128) * (s_bound as u128).pow(3);
    Ok(TailSides {
        tail,
        bound_term,
        hypothesis_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(0, 0), BigCount::one());
        assert_eq!(binomial(4, 2), BigCount::from_u64(6));
        assert_eq!(binomial(3, 5), BigCount::zero());
        // Pascal recurrence spot check
        let lhs = binomial(100, 40);
        let rhs = binomial(99, 39).add(&binomial(99, 40));
        assert_eq!(lhs, rhs);
        // C(200,100): log10 ≈ 58.96
        let big = binomial(200, 100);
        assert!((big.log10() - 58.96).abs() < 0.01);
    }

    #[test]
    fn bigcount_log10_accuracy() {
        for &(n, k) in &[(30u64, 15u64), (60, 30), (300, 150), (1000, 500)] {
            let c = binomial(n, k);
            // compare against a float product oracle
            let mut log10 = 0.0f64;
            for i in 1..=k {
                log10 += ((n - k + i) as f64).log10() - (i as f64).log10();
            }
            assert!(
                (c.log10() - log10).abs() < 1e-9,
                "log10 mismatch at C({n},{k})"
            );
        }
    }

    #[test]
    fn count_c_examples() {
        assert_eq!(count_c(4, 2, 1).unwrap(), BigCount::from_u64(4));
        assert_eq!(count_c(6, 2, 3).unwrap(), BigCount::zero()); // s > min(k, m−k)
        let sum: BigCount = (0..=3).fold(BigCount::zero(), |acc, s| {
            acc.add(&count_c(8, 3, s).unwrap())
        });
        assert_eq!(sum, binomial(8, 3));
        assert_eq!(sum, BigCount::from_u64(56));
        assert!(count_c(3, 5, 0).is_err());
    }

    #[test]
    fn count_d_examples() {
        // L = 0 reduces to count_c(m, k, k)
        assert_eq!(count_d(9, 3, 0), count_c(9, 3, 3).unwrap());
        // worked instance
        assert_eq!(count_d(8, 2, 1), BigCount::from_u64(3));
        // convention: shift pushes below k → zero
        assert_eq!(count_d(5, 2, 1), BigCount::zero());
        assert_eq!(count_d(4, 2, 7), BigCount::zero());
    }

    #[test]
    fn count_d_matches_direct_enumeration() {
        // m=8, k=2, L=1: words a^{i1} b a^{i2} b a^{i3}, i1,i2 ≥ 2, i3 ≥ 1
        let cap = 200_000;
        let class = enumerate_class(8, 2, 2, cap).unwrap();
        let l = 1u32;
        let mut hits = 0u64;
        for w in &class {
            let a_lens: Vec<u32> = w
                .runs()
                .iter()
                .filter(|&&(ltr, _)| ltr == Letter::A)
                .map(|&(_, len)| len)
                .collect();
            let trailing = if w.runs().last().map(|&(ltr, _)| ltr) == Some(Letter::A) {
                *a_lens.last().unwrap()
            } else {
                0
            };
            let interior = if trailing > 0 {
                &a_lens[..a_lens.len() - 1]
            } else {
                &a_lens[..]
            };
            if interior.iter().all(|&x| x > l) && trailing >= l {
                hits += 1;
            }
        }
        assert_eq!(BigCount::from_u64(hits), count_d(8, 2, 1));
    }

    #[test]
    fn enumerate_class_examples() {
        let cap = 200_000;
        // m=k=2: the single word bb sits in class s=0
        let class = enumerate_class(2, 2, 0, cap).unwrap();
        assert_eq!(class.len(), 1);
        assert_eq!(class[0].runs(), &[(Letter::B, 2)]);
        assert!(enumerate_class(2, 2, 1, cap).unwrap().is_empty());

        // m=4,k=2,s=2 → exactly abab
        let class = enumerate_class(4, 2, 2, cap).unwrap();
        assert_eq!(class.len(), 1);
        assert_eq!(
            class[0].runs(),
            &[(Letter::A, 1), (Letter::B, 1), (Letter::A, 1), (Letter::B, 1)]
        );

        // union over s has C(4,2)=6 distinct patterns
        let mut all = Vec::new();
        for s in 0..=2 {
            all.extend(enumerate_class(4, 2, s, cap).unwrap());
        }
        assert_eq!(all.len(), 6);
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                assert_ne!(all[i], all[j], "duplicate pattern");
            }
        }
        // each class member has the right statistics
        for s in 0..=2u64 {
            for w in enumerate_class(4, 2, s, cap).unwrap() {
                assert_eq!(w.m(), 4);
                assert_eq!(w.k(), 2);
                assert_eq!(count_ab(&w), s);
            }
        }
    }

    #[test]
    fn enumerate_class_cap() {
        match enumerate_class(60, 30, 15, 10) {
            Err(Error::CapExceeded { .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn count_ab_examples() {
        let w = WordPattern::from_runs(vec![(Letter::A, 5)]).unwrap();
        assert_eq!(count_ab(&w), 0);
        let letters: Vec<Letter> = (0..3).flat_map(|_| [Letter::A, Letter::B]).collect();
        assert_eq!(count_ab(&WordPattern::from_letters(&letters)), 3);
        // b^2 a^3 b a: only the a^3/b boundary is an ab adjacency
        let w = WordPattern::from_runs(vec![
            (Letter::B, 2),
            (Letter::A, 3),
            (Letter::B, 1),
            (Letter::A, 1),
        ])
        .unwrap();
        assert_eq!(count_ab(&w), 1);
    }

    #[test]
    fn pattern_validation() {
        assert!(WordPattern::from_runs(vec![(Letter::A, 0)]).is_err());
        assert!(WordPattern::from_runs(vec![(Letter::A, 1), (Letter::A, 2)]).is_err());
        let w = WordPattern::from_letters(&[Letter::A, Letter::A, Letter::B]);
        assert_eq!(w.runs(), &[(Letter::A, 2), (Letter::B, 1)]);
        assert_eq!(w.m(), 3);
        assert_eq!(w.k(), 1);
        // empty word allowed
        let e = WordPattern::from_letters(&[]);
        assert_eq!(e.m(), 0);
    }

    #[test]
    fn drop_sides_examples() {
        // L=1, k=1, ε=1/2, m=3: C(2,1)=2 ≥ (1/2)·C(3,1)=1.5
        let eps = Rational::new(1, 2).unwrap();
        let d = binom_drop_sides(3, 1, 1, eps).unwrap();
        assert!(d.hypothesis_holds);
        assert!(d.inequality_holds());

        // k=0 → equality C(m−L,0) = C(m,0) = 1 for any ε
        let d = binom_drop_sides(10, 0, 3, Rational::new(1, 100).unwrap()).unwrap();
        assert!(d.inequality_holds());

        // m=100, L=3, k=5, ε=1/4: hypothesis 100 ≥ 3·21 = 63 holds
        let eps = Rational::new(1, 4).unwrap();
        let d = binom_drop_sides(100, 5, 3, eps).unwrap();
        assert!(d.hypothesis_holds);
        assert!(d.inequality_holds());
    }

    #[test]
    fn tail_sides_examples() {
        // S=1: tail = 1, bound = (m−k)·k
        let eps = Rational::new(1, 2).unwrap();
        let t = small_s_tail_sides(10, 4, 1, eps).unwrap();
        assert_eq!(t.tail, BigCount::one());
        assert_eq!(t.bound_term, BigCount::from_u64(24));
        assert!(t.inequality_holds(eps));

        // minimal case m = 2S with k = S
        let eps = Rational::new(9, 10).unwrap();
        let t = small_s_tail_sides(4, 2, 2, eps).unwrap();
        assert!(!t.hypothesis_holds); // 4 > 8/0.9 + 3 is false
        // sides still exact: tail = C(2,0)C(2,0)+C(2,1)C(2,1) = 1+4 = 5, bound = 1
        assert_eq!(t.tail, BigCount::from_u64(5));
        assert_eq!(t.bound_term, BigCount::one());

        // m=40, k=10, S=2, ε=1/2: hypothesis 40 > 16+3 holds → strict inequality
        let eps = Rational::new(1, 2).unwrap();
        let t = small_s_tail_sides(40, 10, 2, eps).unwrap();
        assert!(t.hypothesis_holds);
        assert!(t.inequality_holds(eps));
    }

    #[test]
    fn rational_validation() {
        assert!(Rational::new(0, 2).is_err());
        assert!(Rational::new(2, 2).is_err());
        assert!(Rational::new(3, 2).is_err());
        assert!(Rational::new(1, 2).is_ok());
    }
}
