use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element `(x + y*omega) / den` of `Q(sqrt(disc))`, where
/// `omega = (disc + sqrt(disc)) / 2`.
///
/// Stored with a positive common denominator and `gcd(x, y, den) = 1`, so
/// equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    disc: i64,
    x: BigInt,
    y: BigInt,
    den: BigInt,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "({} + {}w)", self.x, self.y)
        } else {
            write!(f, "({} + {}w)/{}", self.x, self.y, self.den)
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn omega_const(disc: i64) -> BigInt {
    // omega^2 = disc*omega - (disc^2 - disc)/4
    BigInt::from((disc as i128 * disc as i128 - disc as i128) / 4)
}

impl FieldElement {
    pub fn new(disc: i64, x: BigInt, y: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = FieldElement { disc, x, y, den };
        e.normalize();
        e
    }

    pub fn from_ints(disc: i64, x: i64, y: i64) -> Self {
        Self::new(disc, x.into(), y.into(), BigInt::one())
    }

    pub fn integer(disc: i64, n: impl Into<BigInt>) -> Self {
        Self::new(disc, n.into(), BigInt::zero(), BigInt::one())
    }

    pub fn one(disc: i64) -> Self {
        Self::integer(disc, 1)
    }

    pub fn omega(disc: i64) -> Self {
        Self::from_ints(disc, 0, 1)
    }

    /// `sqrt(disc) = 2*omega - disc`.
    pub fn sqrt_disc(disc: i64) -> Self {
        Self::from_ints(disc, -disc, 2)
    }

    pub fn from_rationals(disc: i64, x: &BigRational, y: &BigRational) -> Self {
        let den = x.denom().lcm(y.denom());
        let xn = x.numer() * (&den / x.denom());
        let yn = y.numer() * (&den / y.denom());
        Self::new(disc, xn, yn, den)
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.x = -&self.x;
            self.y = -&self.y;
            self.den = -&self.den;
        }
        let g = self.x.gcd(&self.y).gcd(&self.den);
        if !g.is_one() && !g.is_zero() {
            self.x /= &g;
            self.y /= &g;
            self.den /= &g;
        }
        if self.x.is_zero() && self.y.is_zero() {
            self.den = BigInt::one();
        }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn x(&self) -> BigRational {
        BigRational::new(self.x.clone(), self.den.clone())
    }

    pub fn y(&self) -> BigRational {
        BigRational::new(self.y.clone(), self.den.clone())
    }

    /// Numerators and the common denominator.
    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.x, &self.y, &self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        // conj(omega) = disc - omega
        Self::new(self.disc, &self.x + &self.y * self.disc, -&self.y, self.den.clone())
    }

    /// Numerator of the norm, i.e. `N(x + y*omega)` before dividing by `den^2`.
    fn norm_num(&self) -> BigInt {
        &self.x * &self.x + &self.x * &self.y * self.disc + &self.y * &self.y * omega_const(self.disc)
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(self.norm_num(), &self.den * &self.den)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(&self.x * 2 + &self.y * self.disc, self.den.clone())
    }

    pub fn norm_sign(&self) -> i32 {
        let n = self.norm_num();
        if n.is_positive() {
            1
        } else if n.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.disc, &self.x * r.numer(), &self.y * r.numer(), &self.den * r.denom())
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        self.conj().scale(&n.recip())
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.inverse()
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.disc);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Value under the embedding `sqrt(disc) > 0` (real fields), as `f64`.
    pub fn to_f64(&self) -> f64 {
        assert!(self.disc > 0);
        let om = (self.disc as f64 + (self.disc as f64).sqrt()) / 2.0;
        // split to avoid overflow on huge numerators
        let q = |a: &BigInt| BigRational::new(a.clone(), self.den.clone()).to_f64().unwrap_or(f64::NAN);
        q(&self.x) + q(&self.y) * om
    }

    /// Image in `O / n O` as `(x mod n, y mod n)`; needs `gcd(den, n) = 1`.
    pub fn residue(&self, n: i64) -> Option<(i64, i64)> {
        let m = BigInt::from(n);
        let d = self.den.mod_floor(&m);
        let inv = mod_inverse(d.to_i64()?, n)?;
        let x = (self.x.mod_floor(&m).to_i64()? as i128 * inv as i128).rem_euclid(n as i128) as i64;
        let y = (self.y.mod_floor(&m).to_i64()? as i128 * inv as i128).rem_euclid(n as i128) as i64;
        Some((x, y))
    }

    /// Residue modulo a degree-one prime `p` where `omega -> root`.
    pub fn residue_at_root(&self, p: i64, root: i64) -> Option<i64> {
        let (x, y) = self.residue(p)?;
        Some(((x as i128 + y as i128 * root as i128).rem_euclid(p as i128)) as i64)
    }
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(m) as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as i64)
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.disc, o.disc);
        FieldElement::new(
            self.disc,
            &self.x * &o.den + &o.x * &self.den,
            &self.y * &o.den + &o.y * &self.den,
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        self + &(-o)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { disc: self.disc, x: -&self.x, y: -&self.y, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.disc, o.disc);
        let yy = &self.y * &o.y;
        let x = &self.x * &o.x - &yy * omega_const(self.disc);
        let y = &self.x * &o.y + &o.x * &self.y + &yy * self.disc;
        FieldElement::new(self.disc, x, y, &self.den * &o.den)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: FieldElement) -> FieldElement {
        &self * &o
    }
}
