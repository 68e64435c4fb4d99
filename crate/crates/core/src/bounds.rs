//! Closed-form query bounds, exact wherever the formula is rational.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{bell, stirling2};

/// Binomial coefficient for small arguments.
pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn big_binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Smallest integer not below `x` (for nonnegative `x`).
pub fn ceil_u64(x: &BigRational) -> u64 {
    x.ceil().to_integer().to_u64().expect("bound fits in u64")
}

/// A rational bound together with its integer ceiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalBound {
    pub exact: BigRational,
    pub ceiling: u64,
}

impl RationalBound {
    fn new(exact: BigRational) -> RationalBound {
        let ceiling = ceil_u64(&exact);
        RationalBound { exact, ceiling }
    }
}

impl Serialize for RationalBound {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("RationalBound", 2)?;
        s.serialize_field("exact", &self.exact.to_string())?;
        s.serialize_field("ceiling", &self.ceiling)?;
        s.end()
    }
}

fn check_kn(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { n, k });
    }
    Ok(())
}

/// Worst-case lower bound on adaptive queries, for `k` known or not:
/// `n(k-1) - C(k,2) + max{(l-1)n/2 + k/2, 0} + l`. Requires `k < n`.
/// Only the final sum is rounded up.
pub fn adaptive_lower_bound(n: usize, k: usize, l: u64) -> Result<RationalBound> {
    check_kn(n, k)?;
    if k >= n {
        return Err(Error::Precondition(format!("requires k < n, got k = {k}, n = {n}")));
    }
    let (n_i, k_i, l_i) = (n as i64, k as i64, l as i64);
    let base = rat(n_i * (k_i - 1) - binom(k, 2) as i64);
    let extra = ratio((l_i - 1) * n_i + k_i, 2);
    let extra = if extra > BigRational::zero() {
        extra
    } else {
        BigRational::zero()
    };
    Ok(RationalBound::new(base + extra + rat(l_i)))
}

/// Repetition upper bound with `k` known: `(l+1)(n(k-1) - C(k,2)) + l`.
pub fn upper_bound_known(n: usize, k: usize, l: u64) -> Result<u64> {
    check_kn(n, k)?;
    Ok((l + 1) * (n * (k - 1) - binom(k, 2)) as u64 + l)
}

/// Repetition upper bound with `k` unknown: `(l+1)(nk - C(k+1,2)) + l`.
pub fn upper_bound_unknown(n: usize, k: usize, l: u64) -> Result<u64> {
    check_kn(n, k)?;
    Ok((l + 1) * (n * k - binom(k + 1, 2)) as u64 + l)
}

/// Expected queries of the randomized learner on clusters of the given
/// sizes: `(n - k) + sum over ordered pairs a != b of n_a n_b / (n_a + n_b)`.
pub fn expected_queries(sizes: &[usize]) -> Result<BigRational> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Precondition(
            "cluster sizes must be nonempty and positive".into(),
        ));
    }
    let n: usize = sizes.iter().sum();
    let mut total = rat((n - sizes.len()) as i64);
    for (a, &na) in sizes.iter().enumerate() {
        for (b, &nb) in sizes.iter().enumerate() {
            if a != b {
                total += ratio((na * nb) as i64, (na + nb) as i64);
            }
        }
    }
    Ok(total)
}

/// Upper bound on [`expected_queries`] over all size profiles: `n(k+1)/2 - k`.
pub fn expected_upper(n: usize, k: usize) -> Result<BigRational> {
    check_kn(n, k)?;
    Ok(ratio((n * (k + 1)) as i64, 2) - rat(k as i64))
}

/// Expected-query bound with repetition: `(l+1)(n(k+1)/2 - k) + l`.
pub fn expected_robust_upper(n: usize, k: usize, l: u64) -> Result<BigRational> {
    Ok(expected_upper(n, k)? * rat(l as i64 + 1) + rat(l as i64))
}

/// Most even split of `n` into `k` positive sizes, larger parts first.
pub fn balanced_sizes(n: usize, k: usize) -> Result<Vec<usize>> {
    check_kn(n, k)?;
    Ok((0..k).map(|i| n / k + usize::from(i < n % k)).collect())
}

/// `H2(c) = -c log2 c - (1-c) log2(1-c)`, with `H2(0) = H2(1) = 0`.
pub fn binary_entropy(c: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(c) + term(1.0 - c)
}

/// `log2` of an arbitrarily large integer, to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits").to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

fn check_fraction(c: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&c) {
        return Err(Error::Precondition(format!(
            "error fraction must lie in [0, 1/2), got {c}"
        )));
    }
    Ok(1.0 - binary_entropy(c))
}

/// Non-adaptive lower bound when a `c` fraction of answers may be wrong,
/// `k` known: `log2 S(n,k) / (1 - H2(c))`. This is the inequality behind the
/// asymptotic statement with the vanishing term dropped, so it is a
/// reference value rather than a sharp finite-`n` bound.
pub fn info_lower_known(n: usize, k: usize, c: f64) -> Result<f64> {
    check_kn(n, k)?;
    let rate = check_fraction(c)?;
    Ok(log2_big(&stirling2(n, k)) / rate)
}

/// As [`info_lower_known`] with `k` unknown: `log2 B_n / (1 - H2(c))`.
pub fn info_lower_unknown(n: usize, c: f64) -> Result<f64> {
    let rate = check_fraction(c)?;
    Ok(log2_big(&bell(n)) / rate)
}

/// Number of binary strings of length `q` within distance `l` of a fixed one.
pub fn hamming_volume(l: u64, q: u64) -> Result<BigUint> {
    if l > q {
        return Err(Error::Precondition(format!("need l <= q, got l = {l}, q = {q}")));
    }
    Ok((0..=l).map(|i| big_binom(q, i)).sum())
}

/// `2^q / Vol(l, q)`: the most candidates `q` answers can separate with `l` lies.
pub fn chip_liar_rhs(l: u64, q: u64) -> Result<BigRational> {
    let vol = hamming_volume(l, q)?;
    Ok(BigRational::new(BigInt::one() << q, BigInt::from(vol)))
}

/// Whether `candidates <= 2^q / Vol(l, q)`.
pub fn chip_liar_bound(candidates: &BigUint, l: u64, q: u64) -> Result<bool> {
    let vol = hamming_volume(l, q)?;
    Ok(candidates * vol <= BigUint::one() << q)
}

/// Every bound for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub l: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Absent when `k = n`, where the bound does not apply.
    pub lower_adaptive: Option<RationalBound>,
    pub upper_known: u64,
    pub upper_unknown: u64,
    /// Sizes used for `expected_queries`: the most balanced split.
    pub sizes: Vec<usize>,
    #[serde(serialize_with = "as_string")]
    pub expected_queries: BigRational,
    #[serde(serialize_with = "as_string")]
    pub expected_upper: BigRational,
    #[serde(serialize_with = "as_string")]
    pub expected_robust_upper: BigRational,
    /// Asymptotic lower bounds, constants per proof, vanishing term dropped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info_lower_known: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info_lower_unknown: Option<f64>,
    /// `2^q / Vol(l, q)` at `q = upper_known`.
    #[serde(serialize_with = "as_string")]
    pub chip_liar_rhs: BigRational,
    /// Whether the `S(n,k)` candidates fit under `chip_liar_rhs`.
    pub chip_liar_holds: bool,
    /// `ceil(lower_adaptive) <= upper_known`.
    pub sandwich_holds: Option<bool>,
}

fn as_string<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl BoundsReport {
    pub fn new(n: usize, k: usize, l: u64, c: Option<f64>) -> Result<BoundsReport> {
        check_kn(n, k)?;
        let lower_adaptive = if k < n {
            Some(adaptive_lower_bound(n, k, l)?)
        } else {
            None
        };
        let upper_known = upper_bound_known(n, k, l)?;
        let sizes = balanced_sizes(n, k)?;
        let (info_lower_known, info_lower_unknown) = match c {
            Some(c) => (Some(info_lower_known(n, k, c)?), Some(info_lower_unknown(n, c)?)),
            None => (None, None),
        };
        Ok(BoundsReport {
            n,
            k,
            l,
            c,
            sandwich_holds: lower_adaptive.as_ref().map(|b| b.ceiling <= upper_known),
            lower_adaptive,
            upper_known,
            upper_unknown: upper_bound_unknown(n, k, l)?,
            expected_queries: expected_queries(&sizes)?,
            sizes,
            expected_upper: expected_upper(n, k)?,
            expected_robust_upper: expected_robust_upper(n, k, l)?,
            info_lower_known,
            info_lower_unknown,
            chip_liar_rhs: chip_liar_rhs(l.min(upper_known), upper_known)?,
            chip_liar_holds: chip_liar_bound(&stirling2(n, k), l.min(upper_known), upper_known)?,
        })
    }
}
