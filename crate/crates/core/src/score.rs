//! Log-domain scores for the max-plus recurrences.
//!
//! Every decoder and model in this crate is generic over [`LogScore`]. The
//! floating-point implementations use natural logs directly. [`FixedLog`]
//! stores a log value as a fixed-point integer, so additions are exact and
//! associative; two paths whose terms are equal sum to bit-identical scores
//! no matter in which order the terms were accumulated.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Float;

/// A natural-log probability with a distinguished `-inf` sentinel for
/// impossible events.
///
/// Only `+` (with `-inf` absorbing) and comparison are used inside the decode
/// loops. No value ever becomes NaN: there is no `+inf`.
pub trait LogScore:
    Copy + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// log 1.
    fn zero() -> Self;

    /// log 0.
    fn impossible() -> Self;

    /// `ln(p)` for a probability `p` in `[0, 1]`; `p == 0` maps to the sentinel.
    fn from_prob(p: f64) -> Self;

    fn plus(self, other: Self) -> Self;

    fn is_impossible(self) -> bool;

    fn to_f64(self) -> f64;
}

macro_rules! float_log_score {
    ($t:ty) => {
        impl LogScore for $t {
            #[inline]
            fn zero() -> Self {
                0.0
            }

            #[inline]
            fn impossible() -> Self {
                <$t as Float>::neg_infinity()
            }

            fn from_prob(p: f64) -> Self {
                debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
                if p <= 0.0 {
                    Self::impossible()
                } else {
                    <$t as num_traits::NumCast>::from(p)
                        .map(Float::ln)
                        .unwrap_or_else(Self::impossible)
                }
            }

            #[inline]
            fn plus(self, other: Self) -> Self {
                self + other
            }

            #[inline]
            fn is_impossible(self) -> bool {
                self == <$t as Float>::neg_infinity()
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

float_log_score!(f32);
float_log_score!(f64);

/// Exact log score: `ln(p)` scaled by 2^32 and rounded to an `i64`.
///
/// Addition is integer addition, so it is associative and strictly monotone.
/// Use it when rankings must agree exactly between algorithms that
/// accumulate the same terms in different orders.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedLog(i64);

impl FixedLog {
    pub const SCALE: f64 = 4_294_967_296.0;
    const NEG_INF: i64 = i64::MIN;

    pub fn from_raw(raw: i64) -> Self {
        FixedLog(raw.max(Self::NEG_INF + 1))
    }

    pub fn raw(self) -> i64 {
        self.0
    }
}

impl LogScore for FixedLog {
    #[inline]
    fn zero() -> Self {
        FixedLog(0)
    }

    #[inline]
    fn impossible() -> Self {
        FixedLog(Self::NEG_INF)
    }

    fn from_prob(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        if p <= 0.0 {
            return Self::impossible();
        }
        FixedLog::from_raw((p.ln() * Self::SCALE).round() as i64)
    }

    #[inline]
    fn plus(self, other: Self) -> Self {
        if self.0 == Self::NEG_INF || other.0 == Self::NEG_INF {
            return Self::impossible();
        }
        // Scores are non-positive, so only the lower bound can be hit.
        FixedLog(self.0.saturating_add(other.0).max(Self::NEG_INF + 1))
    }

    #[inline]
    fn is_impossible(self) -> bool {
        self.0 == Self::NEG_INF
    }

    fn to_f64(self) -> f64 {
        if self.is_impossible() {
            f64::NEG_INFINITY
        } else {
            self.0 as f64 / Self::SCALE
        }
    }
}

impl fmt::Debug for FixedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedLog({})", self.to_f64())
    }
}

impl fmt::Display for FixedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

/// Total order used for every ranking decision: higher score first, then the
/// smaller path index.
#[inline]
pub fn rank_order<F: LogScore>(a: (F, u32), b: (F, u32)) -> Ordering {
    match b.0.partial_cmp(&a.0) {
        Some(Ordering::Equal) | None => a.1.cmp(&b.1),
        Some(o) => o,
    }
}

/// Formats a score like C's `%.12g`; the sentinel prints as `-inf`.
pub fn format_score(x: f64) -> String {
    const SIG: i32 = 12;
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinel_absorbs() {
        let x = f64::from_prob(0.25);
        assert!(f64::impossible().plus(x).is_impossible());
        assert!(x.plus(f64::impossible()).is_impossible());
        assert!(FixedLog::impossible()
            .plus(FixedLog::from_prob(0.5))
            .is_impossible());
        assert!(f64::from_prob(0.0).is_impossible());
        assert!(FixedLog::from_prob(0.0).is_impossible());
        assert!(!f64::impossible().plus(f64::impossible()).is_nan());
    }

    #[test]
    fn fixed_log_is_associative() {
        let a = FixedLog::from_prob(0.3);
        let b = FixedLog::from_prob(0.7);
        let c = FixedLog::from_prob(0.011);
        assert_eq!(a.plus(b).plus(c), a.plus(b.plus(c)));
        assert_eq!(a.plus(c).plus(b), b.plus(c).plus(a));
        assert!((a.to_f64() - 0.3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rank_order_breaks_ties_on_path_index() {
        assert_eq!(rank_order((-1.0, 5), (-2.0, 0)), Ordering::Less);
        assert_eq!(rank_order((-1.0, 1), (-1.0, 2)), Ordering::Less);
        assert_eq!(
            rank_order((f64::NEG_INFINITY, 0), (-9.0, 3)),
            Ordering::Greater
        );
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_score(-2.0794415416798357), "-2.07944154168");
        assert_eq!(format_score(0.0), "0");
        assert_eq!(format_score(-3.0), "-3");
        assert_eq!(format_score(-1234.5), "-1234.5");
        assert_eq!(format_score(-1.5e-7), "-1.5e-07");
        assert_eq!(format_score(-123456789012345.0), "-1.23456789012e+14");
        assert_eq!(format_score(f64::NEG_INFINITY), "-inf");
    }
}
