//! Exact rational scalars.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. Its `Display` already renders
//! `p/q` (or `p` when `q = 1`), which is the text form used everywhere in
//! this crate. This module adds the few things the solver needs on top:
//! parsing with useful errors, extended values for infinite break points,
//! decimal rendering for plots and the simplest-rational search used to
//! snap bisection brackets.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, `p/q` with integer `p`, `q`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let ok = |t: &str| {
        let t = t.strip_prefix(['-', '+']).unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(num) || !ok(den) {
        return Err(ParseRationalError::Malformed(s.to_string()));
    }
    let n: BigInt = num.parse().map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    let d: BigInt = den.parse().map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    if d.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(n, d))
}

/// Decimal rendering with 12 significant digits, `%.12g` style.
pub fn to_decimal(x: &Rational) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    format_g12(v)
}

fn format_g12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.11e}", v);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Rational with the smallest denominator strictly inside `(lo, hi)`;
/// `hi = None` stands for `+inf`. Requires `lo < hi`.
pub fn simplest_in_open(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let f = floor(lo);
    let next = Rational::from_integer(&f + 1);
    match hi {
        None => return next,
        Some(h) => {
            assert!(lo < h, "empty interval");
            if &next < h {
                return next;
            }
        }
    }
    let h = hi.unwrap();
    let fr = Rational::from_integer(f);
    let new_lo = (h - &fr).recip();
    let gap = lo - &fr;
    let t = if gap.is_zero() {
        simplest_in_open(&new_lo, None)
    } else {
        simplest_in_open(&new_lo, Some(&gap.recip()))
    };
    fr + t.recip()
}

/// Rational with the smallest denominator in the half-open `(lo, hi]`.
pub fn simplest_in_half_open(lo: &Rational, hi: &Rational) -> Rational {
    let inner = simplest_in_open(lo, Some(hi));
    if hi.denom() < inner.denom() {
        hi.clone()
    } else {
        inner
    }
}

/// A rational extended by the two infinities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ext {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Ext {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Ext::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn parse(s: &str) -> Result<Ext, ParseRationalError> {
        match s.trim() {
            "-inf" => Ok(Ext::NegInf),
            "+inf" | "inf" => Ok(Ext::PosInf),
            t => parse(t).map(Ext::Finite),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Ext::NegInf => 0,
            Ext::Finite(_) => 1,
            Ext::PosInf => 2,
        }
    }
}

impl From<Rational> for Ext {
    fn from(r: Rational) -> Self {
        Ext::Finite(r)
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Finite(r) => write!(f, "{r}"),
            Ext::PosInf => f.write_str("+inf"),
        }
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn textbook_sums() {
        assert_eq!(ratio(1, 2) + ratio(1, 3), ratio(5, 6));
        let z = ratio(5, 11) - ratio(5, 11);
        assert!(z.is_zero());
        assert_eq!(z.denom(), &BigInt::one());
        assert_eq!(midpoint(&ratio(-5, 11), &ratio(5, 11)), int(0));
    }

    #[test]
    fn comparisons() {
        assert_eq!(ratio(1, 9216).cmp(&ratio(1, 9217)), Ordering::Greater);
        assert_eq!(ratio(769, 128).cmp(&ratio(3063, 512)), Ordering::Greater);
        assert_eq!(int(0).cmp(&int(0)), Ordering::Equal);
    }

    #[test]
    #[should_panic]
    fn divide_by_zero_panics() {
        let _ = int(1) / int(0);
    }

    #[test]
    fn text_form() {
        assert_eq!(ratio(-6, 4).to_string(), "-3/2");
        assert_eq!(int(7).to_string(), "7");
        assert_eq!(parse(" -3/2 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse("4/2").unwrap(), int(2));
        assert!(matches!(parse("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse("1.5"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse(""), Err(ParseRationalError::Empty)));
        assert!(parse("--1").is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&int(0)), "0");
        assert_eq!(to_decimal(&ratio(1, 3)), "0.333333333333");
        assert_eq!(to_decimal(&ratio(-5, 11)), "-0.454545454545");
        assert_eq!(to_decimal(&int(77)), "77");
        assert_eq!(to_decimal(&ratio(1, 9216)), "0.000108506944444");
        assert_eq!(to_decimal(&ratio(1, 10_000_000)), "1e-07");
        assert_eq!(to_decimal(&int(1_000_000_000_000)), "1e+12");
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_in_open(&ratio(1, 3), Some(&ratio(1, 2))), ratio(2, 5));
        assert_eq!(simplest_in_open(&ratio(-1, 2), Some(&ratio(1, 2))), int(0));
        assert_eq!(simplest_in_open(&int(2), None), int(3));
        assert_eq!(simplest_in_open(&int(3), Some(&ratio(7, 2))), ratio(10, 3));
        let lo = ratio(-5, 11) - ratio(1, 20000);
        assert_eq!(simplest_in_half_open(&lo, &ratio(-5, 11)), ratio(-5, 11));
        assert_eq!(simplest_in_half_open(&ratio(-3, 2), &int(-1)), int(-1));
    }

    #[test]
    fn extended_order() {
        let xs = [Ext::PosInf, Ext::Finite(int(3)), Ext::NegInf, Ext::Finite(int(-100))];
        let mut s = xs.to_vec();
        s.sort();
        assert_eq!(s, vec![Ext::NegInf, Ext::Finite(int(-100)), Ext::Finite(int(3)), Ext::PosInf]);
        assert_eq!(Ext::parse("-inf").unwrap(), Ext::NegInf);
        assert_eq!(Ext::Finite(ratio(5, 11)).to_string(), "5/11");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| ratio(n, d))
    }

    fn canonical(x: &Rational) -> bool {
        x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert!(canonical(&(&a * &b)));
            prop_assert!(canonical(&(&a - &b)));
            if !b.is_zero() {
                prop_assert!(canonical(&(&a / &b)));
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn total_order(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            let fa = a.to_f64().unwrap();
            let fb = b.to_f64().unwrap();
            if a < b { prop_assert!(fa <= fb); }
        }

        #[test]
        fn text_round_trip(a in arb_rational()) {
            prop_assert_eq!(parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn simplest_is_inside_and_minimal(a in arb_rational(), w in 1i64..1000) {
            let b = &a + ratio(w, 997);
            let s = simplest_in_open(&a, Some(&b));
            prop_assert!(a < s && s < b);
            // brute-force: no smaller denominator fits
            let den = s.denom().to_i64().unwrap();
            for q in 1..den {
                let qq = int(q);
                let lo = floor(&(&a * &qq)) + 1;
                let cand = Rational::new(lo, BigInt::from(q));
                prop_assert!(cand >= b, "denominator {} also fits", q);
            }
        }
    }
}
