//! Exact scalars: Laurent polynomials in a formal symbol `tp` with
//! Gaussian-rational coefficients, closed under division.
//!
//! `tp` stands for the invertible constant 2πi, so conjugation sends
//! `i ↦ -i` on coefficients and `tp ↦ -tp`. A scalar is stored as a
//! reduced fraction num/den with den a polynomial in `tp` normalized to
//! constant term 1; ring elements (the usual case) have den = 1.
//! No floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Gaussian rational `re + im·i`, always in reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// Complex conjugate: `i ↦ -i`.
    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &norm, -&self.im / &norm))
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.re, f)?;
        if !self.im.is_zero() {
            if self.im.is_negative() {
                write!(f, "-")?;
                fmt_rational(&-self.im.clone(), f)?;
            } else {
                write!(f, "+")?;
                fmt_rational(&self.im, f)?;
            }
            write!(f, "i")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sparse Laurent polynomial: exponent ↦ nonzero coefficient.
type Terms = BTreeMap<i64, GaussRat>;

fn terms_add_into(acc: &mut Terms, exp: i64, c: GaussRat) {
    if c.is_zero() {
        return;
    }
    match acc.entry(exp) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = &*e.get() + &c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

fn terms_mul(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (&ka, ca) in a {
        for (&kb, cb) in b {
            terms_add_into(&mut out, ka + kb, ca * cb);
        }
    }
    out
}

fn terms_one() -> Terms {
    let mut t = Terms::new();
    t.insert(0, GaussRat::one());
    t
}

fn terms_is_one(t: &Terms) -> bool {
    t.len() == 1 && t.get(&0).map_or(false, GaussRat::is_one)
}

fn terms_shift(t: &Terms, by: i64) -> Terms {
    t.iter().map(|(&k, c)| (k + by, c.clone())).collect()
}

fn terms_scale(t: &Terms, c: &GaussRat) -> Terms {
    t.iter().map(|(&k, v)| (k, v * c)).collect()
}

/// Quotient and remainder of polynomial division (nonnegative exponents,
/// `b` nonzero), working down from the top degree.
fn poly_divmod(a: &Terms, b: &Terms) -> (Terms, Terms) {
    let (&btop, blead) = b.iter().next_back().expect("division by zero polynomial");
    let blead_inv = blead.inv().unwrap();
    let mut rem = a.clone();
    let mut quo = Terms::new();
    while let Some((&top, lead)) = rem.iter().next_back() {
        if top < btop {
            break;
        }
        let q = lead * &blead_inv;
        let qexp = top - btop;
        for (&bk, bc) in b {
            let sub = &q * bc;
            terms_add_into(&mut rem, qexp + bk, -&sub);
        }
        quo.insert(qexp, q);
    }
    (quo, rem)
}

/// Monic-at-0 gcd of two polynomials with nonzero constant terms.
fn poly_gcd(a: &Terms, b: &Terms) -> Terms {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        // Strip any tp power picked up along the way; tp is a unit here.
        let low = *y.keys().next().unwrap();
        if low > 0 {
            y = terms_shift(&y, -low);
        }
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = r;
    }
    let c0 = x.get(&0).cloned().unwrap_or_else(GaussRat::one);
    terms_scale(&x, &c0.inv().unwrap())
}

/// Element of the exact coefficient field: a reduced fraction of Laurent
/// polynomials in `tp`. Ring elements (denominator 1) cover every value
/// the report grammar can express.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Scalar {
    num: Terms,
    /// Polynomial with constant term 1, coprime to `num`.
    den: Terms,
}

impl Scalar {
    fn from_parts(num: Terms, den: Terms) -> Self {
        debug_assert!(!den.is_empty());
        if num.is_empty() {
            return Scalar { num, den: terms_one() };
        }
        if terms_is_one(&den) {
            return Scalar { num, den };
        }
        // strip tp powers from num before gcd
        let low = *num.keys().next().unwrap();
        let shifted = terms_shift(&num, -low);
        let g = poly_gcd(&shifted, &den);
        let (num2, den2) = if terms_is_one(&g) {
            (shifted, den)
        } else {
            (poly_divmod(&shifted, &g).0, poly_divmod(&den, &g).0)
        };
        // renormalize den constant term to 1
        let c0 = den2.get(&0).expect("denominator lost constant term").clone();
        let (num3, den3) = if c0.is_one() {
            (num2, den2)
        } else {
            let inv = c0.inv().unwrap();
            (terms_scale(&num2, &inv), terms_scale(&den2, &inv))
        };
        Scalar { num: terms_shift(&num3, low), den: den3 }
    }

    pub fn zero() -> Self {
        Scalar { num: Terms::new(), den: terms_one() }
    }

    pub fn one() -> Self {
        Scalar::from_coeff(GaussRat::one())
    }

    pub fn i() -> Self {
        Scalar::from_coeff(GaussRat::i())
    }

    /// The formal symbol standing for 2πi.
    pub fn tp() -> Self {
        Scalar::term(GaussRat::one(), 1)
    }

    pub fn tp_pow(k: i64) -> Self {
        Scalar::term(GaussRat::one(), k)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_coeff(GaussRat::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::from_coeff(GaussRat::from_ratio(num, den))
    }

    pub fn from_coeff(c: GaussRat) -> Self {
        Scalar::term(c, 0)
    }

    pub fn term(c: GaussRat, exp: i64) -> Self {
        let mut num = Terms::new();
        if !c.is_zero() {
            num.insert(exp, c);
        }
        Scalar { num, den: terms_one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        terms_is_one(&self.num) && terms_is_one(&self.den)
    }

    /// True when the scalar lies in the Laurent subring (denominator 1);
    /// only such values are expressible in the report grammar.
    pub fn is_laurent(&self) -> bool {
        terms_is_one(&self.den)
    }

    /// True if the scalar is a plain Gaussian rational (only tp^0).
    pub fn is_constant(&self) -> bool {
        self.is_laurent() && self.num.keys().all(|&k| k == 0)
    }

    /// Laurent coefficient of `tp^exp`; meaningful when `is_laurent`.
    pub fn coeff(&self, exp: i64) -> GaussRat {
        debug_assert!(self.is_laurent());
        self.num.get(&exp).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Terms of a Laurent scalar as (exponent, coefficient) pairs.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, GaussRat)>> {
        if !self.is_laurent() {
            return None;
        }
        Some(self.num.iter().map(|(&k, c)| (k, c.clone())).collect())
    }

    /// Conjugation: `i ↦ -i` on coefficients and `tp ↦ -tp`.
    pub fn conj(&self) -> Self {
        let flip = |t: &Terms| -> Terms {
            t.iter()
                .map(|(&k, c)| {
                    let mut c = c.conj();
                    if k.rem_euclid(2) == 1 {
                        c = -&c;
                    }
                    (k, c)
                })
                .collect()
        };
        // den's constant term stays 1 under the flip
        Scalar { num: flip(&self.num), den: flip(&self.den) }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        let low = *self.num.keys().next().unwrap();
        let shifted = terms_shift(&self.num, -low);
        let c0 = shifted.get(&0).cloned().unwrap_or_else(GaussRat::zero);
        if c0.is_zero() {
            // can't happen: lowest term has nonzero coefficient
            unreachable!()
        }
        let inv0 = c0.inv().unwrap();
        let new_den = terms_scale(&shifted, &inv0);
        let new_num = terms_scale(&terms_shift(&self.den, -low), &inv0);
        // num and den were coprime, so no reduction is needed
        Some(Scalar { num: new_num, den: new_den })
    }

    /// Exact division; `None` when dividing by zero.
    pub fn try_div(&self, rhs: &Scalar) -> Option<Scalar> {
        Some(self * &rhs.inv()?)
    }

    /// Division by a nonzero scalar.
    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self.try_div(rhs).expect("division by zero scalar")
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if terms_is_one(&self.den) && terms_is_one(&rhs.den) {
            let mut num = self.num.clone();
            for (&k, c) in &rhs.num {
                terms_add_into(&mut num, k, c.clone());
            }
            return Scalar { num, den: terms_one() };
        }
        let mut num = terms_mul(&self.num, &rhs.den);
        for (k, c) in terms_mul(&rhs.num, &self.den) {
            terms_add_into(&mut num, k, c);
        }
        Scalar::from_parts(num, terms_mul(&self.den, &rhs.den))
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        let num = terms_mul(&self.num, &rhs.num);
        if terms_is_one(&self.den) && terms_is_one(&rhs.den) {
            return Scalar { num, den: terms_one() };
        }
        Scalar::from_parts(num, terms_mul(&self.den, &rhs.den))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.iter().map(|(&k, c)| (k, -c)).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, rhs: $t) {
                *self = &*self + &rhs;
            }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, rhs: $t) {
                *self = &*self - &rhs;
            }
        }
        impl MulAssign for $t {
            fn mul_assign(&mut self, rhs: $t) {
                *self = &*self * &rhs;
            }
        }
    };
}

forward_owned!(GaussRat);
forward_owned!(Scalar);

impl fmt::Display for Scalar {
    /// Canonical form in the report grammar for ring elements:
    /// `rational('+'|'-' rational 'i')?('*tp^'integer)?` joined by `+`.
    /// Proper fractions (which the grammar cannot express) render with
    /// an explicit denominator for diagnostics.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return write!(f, "0");
        }
        let write_terms = |f: &mut fmt::Formatter<'_>, t: &Terms| -> fmt::Result {
            for (i, (&k, c)) in t.iter().enumerate() {
                if i > 0 {
                    write!(f, "+")?;
                }
                write!(f, "{c}")?;
                if k != 0 {
                    write!(f, "*tp^{k}")?;
                }
            }
            Ok(())
        };
        if terms_is_one(&self.den) {
            write_terms(f, &self.num)
        } else {
            write!(f, "(")?;
            write_terms(f, &self.num)?;
            write!(f, ")/(")?;
            write_terms(f, &self.den)?;
            write!(f, ")")
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conj_flips_tp_sign() {
        let x = Scalar::tp();
        assert_eq!(x.conj(), -&x);
        let y = Scalar::tp_pow(2);
        assert_eq!(y.conj(), y);
        // conj(i tp^-1) = (-i)(-tp^-1) = i tp^-1
        let z = &Scalar::i() * &Scalar::tp_pow(-1);
        assert_eq!(z.conj(), z);
    }

    #[test]
    fn tp_is_invertible() {
        let x = &Scalar::from_int(5) * &Scalar::tp_pow(3);
        let inv = x.inv().unwrap();
        assert!((&x * &inv).is_one());
        assert!(inv.is_laurent());
    }

    #[test]
    fn division_leaves_ring_when_needed() {
        let den = &Scalar::one() + &Scalar::tp();
        let frac = Scalar::one().div(&den);
        assert!(!frac.is_laurent());
        assert!((&frac * &den).is_one());
        // (tp + tp^2) / (1 + tp) = tp stays in the ring
        let num = &Scalar::tp() + &Scalar::tp_pow(2);
        let q = num.div(&den);
        assert_eq!(q, Scalar::tp());
        assert!(q.is_laurent());
    }

    #[test]
    fn display_matches_grammar() {
        let x = &(&Scalar::from_ratio(1, 2) + &(&Scalar::i() * &Scalar::from_ratio(-3, 4)))
            * &Scalar::tp_pow(-1);
        assert_eq!(x.to_string(), "1/2-3/4i*tp^-1");
        assert_eq!(Scalar::zero().to_string(), "0");
        let y = &Scalar::from_int(2) + &Scalar::tp();
        assert_eq!(y.to_string(), "2+1*tp^1");
    }

    fn arb_gauss() -> impl Strategy<Value = GaussRat> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| {
            GaussRat::new(
                BigRational::new(BigInt::from(a), BigInt::from(b)),
                BigRational::new(BigInt::from(c), BigInt::from(d)),
            )
        })
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        proptest::collection::vec((arb_gauss(), -3i64..4), 0..4).prop_map(|ts| {
            let mut s = Scalar::zero();
            for (c, k) in ts {
                s = &s + &Scalar::term(c, k);
            }
            s
        })
    }

    proptest! {
        #[test]
        fn conj_is_ring_involution(x in arb_scalar(), y in arb_scalar()) {
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            prop_assert_eq!(x.conj().conj(), x);
        }

        #[test]
        fn field_axioms(x in arb_scalar(), y in arb_scalar()) {
            prop_assume!(!y.is_zero());
            let q = x.div(&y);
            prop_assert_eq!(&q * &y, x);
        }

        #[test]
        fn add_mul_distribute(x in arb_scalar(), y in arb_scalar(), z in arb_scalar()) {
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        }
    }
}
