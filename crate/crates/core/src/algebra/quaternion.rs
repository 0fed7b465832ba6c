//! Quaternion algebras `(a, b)/Q` and local Hilbert symbols.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{normalize, Sparse, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::RatVector;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionParams {
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    #[serde(with = "rational::serde_str")]
    pub b: Rational,
    /// The finite prime the algebra was built for, if it came from
    /// [`quaternion_for_prime`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u64>,
}

/// The quaternion algebra with basis `1, i, j, k`, `i^2 = a`, `j^2 = b`,
/// `ij = k = -ji`, carrying conjugation `x -> Trd(x) - x` as its involution.
pub fn quaternion_algebra(a: &Rational, b: &Rational) -> Result<StructureAlgebra> {
    build(QuaternionParams {
        a: a.clone(),
        b: b.clone(),
        p: None,
    })
}

fn build(params: QuaternionParams) -> Result<StructureAlgebra> {
    if params.a.is_zero() || params.b.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let (a, b) = (&params.a, &params.b);
    let one = Rational::one();
    let ab = a * b;
    let term = |k: usize, c: Rational| -> Sparse { normalize(vec![(k, c)]) };
    // row-major table of b_i * b_j over 1, i, j, k
    let table: Vec<Sparse> = vec![
        term(0, one.clone()),
        term(1, one.clone()),
        term(2, one.clone()),
        term(3, one.clone()),
        // i * (1, i, j, k)
        term(1, one.clone()),
        term(0, a.clone()),
        term(3, one.clone()),
        term(2, a.clone()),
        // j * (1, i, j, k)
        term(2, one.clone()),
        term(3, -&one),
        term(0, b.clone()),
        term(1, -b),
        // k * (1, i, j, k)
        term(3, one.clone()),
        term(2, -a),
        term(1, b.clone()),
        term(0, -ab),
    ];
    let conj = vec![
        term(0, one.clone()),
        term(1, -&one),
        term(2, -&one),
        term(3, -&one),
    ];
    let labels = ["1", "i", "j", "k"].iter().map(|s| s.to_string()).collect();
    StructureAlgebra::from_parts(
        labels,
        table,
        Some(RatVector::unit(4, 0)),
        Some(conj),
        Some(params),
    )
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The definite quaternion algebra ramified exactly at `p` and infinity,
/// with the usual parameter choices.
pub fn quaternion_for_prime(p: u64) -> Result<StructureAlgebra> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let (a, b) = if p == 2 {
        (-1, -1)
    } else if p % 4 == 3 {
        (-1, -(p as i64))
    } else if p % 8 == 5 {
        (-2, -(p as i64))
    } else {
        let q = (3u64..)
            .filter(|&q| q % 4 == 3 && is_prime(q))
            .find(|&q| legendre(&BigInt::from(q), &BigInt::from(p)) == -1)
            .expect("a non-residue prime 3 mod 4 always exists");
        (-(q as i64), -(p as i64))
    };
    let (a, b) = (rational::int(a), rational::int(b));
    if !ramified_exactly_at(&a, &b, p) {
        return Err(Error::InvalidArgument(format!(
            "parameters ({a}, {b}) are not ramified exactly at {{{p}, inf}}"
        )));
    }
    build(QuaternionParams { a, b, p: Some(p) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" | "∞" => Ok(Place::Infinity),
            other => {
                let p: u64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("invalid place `{other}`")))?;
                if is_prime(p) {
                    Ok(Place::Prime(p))
                } else {
                    Err(Error::NotPrime(p))
                }
            }
        }
    }
}

/// Integer in the same square class as `q` (`n/d ~ n*d`).
fn square_class_integer(q: &Rational) -> BigInt {
    q.numer() * q.denom()
}

fn valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut v = 0;
    let mut n = n.clone();
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Legendre symbol `(u/p)` for odd prime `p`, via Euler's criterion.
fn legendre(u: &BigInt, p: &BigInt) -> i32 {
    let u = u.mod_floor(p);
    if u.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if u.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

fn mod8(u: &BigInt) -> u32 {
    u.mod_floor(&BigInt::from(8)).to_u32().unwrap()
}

/// Local Hilbert symbol `(a, b)_v` as `+1` or `-1`.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let (a, b) = (square_class_integer(a), square_class_integer(b));
    let p = match place {
        Place::Infinity => {
            let both_negative = a.sign() == Sign::Minus && b.sign() == Sign::Minus;
            return Ok(if both_negative { -1 } else { 1 });
        }
        Place::Prime(p) => p,
    };
    let pb = BigInt::from(p);
    let (alpha, u) = valuation(&a, &pb);
    let (beta, v) = valuation(&b, &pb);
    let sign = if p == 2 {
        let eps = |x: &BigInt| u32::from(mod8(x) % 4 == 3);
        let omega = |x: &BigInt| u32::from(matches!(mod8(x), 3 | 5));
        eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u)
    } else {
        let mut e = alpha * beta * (((p - 1) / 2) as u32 % 2);
        if beta % 2 == 1 && legendre(&u, &pb) == -1 {
            e += 1;
        }
        if alpha % 2 == 1 && legendre(&v, &pb) == -1 {
            e += 1;
        }
        e
    };
    Ok(if sign % 2 == 0 { 1 } else { -1 })
}

fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.to_u64().expect("trial divisor fits in u64"));
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// Places where `(a, b)/Q` ramifies, checked over infinity and every prime
/// dividing `2ab` (the only candidates).
pub fn ramified_places(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    for place in relevant_places(a, b) {
        if hilbert_symbol(a, b, place)? == -1 {
            out.push(place);
        }
    }
    Ok(out)
}

pub fn ramified_exactly_at(a: &Rational, b: &Rational, p: u64) -> bool {
    ramified_places(a, b).map_or(false, |places| places == vec![Place::Prime(p), Place::Infinity])
}

/// Candidate places for the product formula: infinity and primes dividing `2ab`.
pub fn relevant_places(a: &Rational, b: &Rational) -> Vec<Place> {
    let mut primes = prime_factors(&(BigInt::from(2) * square_class_integer(a) * square_class_integer(b)));
    primes.sort_unstable();
    primes.dedup();
    primes
        .into_iter()
        .map(Place::Prime)
        .chain(std::iter::once(Place::Infinity))
        .collect()
}
