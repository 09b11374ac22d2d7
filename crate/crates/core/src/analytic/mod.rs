//! L-values of quadratic characters, Dedekind zeta values of quadratic
//! fields, the main-term constant of the relative count and the leading
//! constant `C` of the `D4` count.
//!
//! High-precision values use binary floating point at [`PRECISION_BITS`]
//! bits; the bulk sum behind `C` runs in `f64` (see [`fast`]).

pub mod fast;

use crate::arith::{is_fundamental, kronecker};
use crate::classgroup::ClassGroup;
use crate::quadfield::fundamental_unit;
use crate::quadfield::{FieldElement, QuadField, QuadIdeal};
use crate::{Error, Result};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

pub use fast::{constant_c, l_values_f64, main_term_f64, ConstantCResult, K_TAIL};

pub type Real = BigFloat;

/// Decimal digits every high-precision value is good for.
pub const WORKING_DIGITS: u32 = 60;
pub const PRECISION_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;
/// Euler-Maclaurin: shift of the argument and number of Bernoulli terms.
const SHIFT: i128 = 32;
const EM_TERMS: usize = 32;

/// Arithmetic context at the working precision.
pub struct Hp {
    p: usize,
    cc: Consts,
}

impl Default for Hp {
    fn default() -> Self {
        Self::new()
    }
}

impl Hp {
    pub fn new() -> Self {
        Hp { p: PRECISION_BITS, cc: Consts::new().expect("constant cache allocation") }
    }

    pub fn int(&self, n: i128) -> Real {
        BigFloat::from_i128(n, self.p)
    }

    pub fn big(&mut self, n: &BigInt) -> Real {
        match n.to_i128() {
            Some(v) => self.int(v),
            None => BigFloat::parse(&n.to_string(), Radix::Dec, self.p, RM, &mut self.cc),
        }
    }

    pub fn rational(&mut self, r: &BigRational) -> Real {
        let (n, d) = (self.big(r.numer()), self.big(r.denom()));
        self.div(&n, &d)
    }

    pub fn ratio(&self, a: i128, b: i128) -> Real {
        self.div(&self.int(a), &self.int(b))
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        a.div(b, self.p, RM)
    }

    pub fn sqrt(&self, a: &Real) -> Real {
        a.sqrt(self.p, RM)
    }

    pub fn pi(&mut self) -> Real {
        self.cc.pi(self.p, RM)
    }

    pub fn ln(&mut self, a: &Real) -> Real {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &Real) -> Real {
        a.sin(self.p, RM, &mut self.cc)
    }

    /// `|a - b| / |a|`, or `|b|` when `a = 0`.
    pub fn rel_diff(&self, a: &Real, b: &Real) -> f64 {
        let d = self.sub(a, b).abs();
        let r = if a.is_zero() { d } else { self.div(&d, &a.abs()) };
        to_f64(&r)
    }

    /// Scientific notation with `digits` significant digits (truncated).
    pub fn decimal(&mut self, a: &Real, digits: usize) -> String {
        let Ok((sign, mant, exp)) = a.convert_to_radix(Radix::Dec, RM, &mut self.cc) else {
            return "NaN".into();
        };
        if a.is_zero() || mant.iter().all(|&d| d == 0) {
            return "0".into();
        }
        let first = mant.iter().position(|&d| d != 0).unwrap_or(0);
        let mant = &mant[first..];
        let exp = exp as i64 - first as i64 - 1;
        let mut s = String::new();
        if sign == astro_float::Sign::Neg {
            s.push('-');
        }
        s.push((b'0' + mant[0]) as char);
        s.push('.');
        for &d in mant.iter().skip(1).take(digits.saturating_sub(1)) {
            s.push((b'0' + d) as char);
        }
        s.push_str(&format!("e{exp}"));
        s
    }
}

pub fn to_f64(a: &Real) -> f64 {
    format!("{a}").parse().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LMethod {
    ClosedForm,
    Series,
}

/// `L(s, chi_d)` for `s` in `{1, 2}`.
#[derive(Clone, Debug)]
pub struct LValue {
    pub d: i64,
    pub s: u32,
    pub value: Real,
    pub method: LMethod,
    /// Bound on the truncation error; zero for closed forms.
    pub error_bound: f64,
}

impl LValue {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.value)
    }
}

/// Modulus of `chi_d`; `d = 1` is the trivial character.
fn modulus(d: i64) -> Result<i128> {
    if d == 1 || is_fundamental(d) {
        Ok(d.unsigned_abs() as i128)
    } else {
        Err(Error::NotFundamental(d))
    }
}

fn check_s(s: u32) -> Result<()> {
    if s == 1 || s == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("s = {s}; only 1 and 2 are supported")))
    }
}

fn chi_values(d: i64, q: i128) -> Vec<i32> {
    (0..q.max(1)).map(|a| if d == 1 { 1 } else { kronecker(d, a as i64) }).collect()
}

/// `L(1)` by the finite closed forms, `L(2)` by the series.
pub fn l_value(d: i64, s: u32) -> Result<LValue> {
    check_s(s)?;
    let mut hp = Hp::new();
    if s == 1 {
        l_value_closed_form_in(&mut hp, d, 1)
    } else {
        l_value_series_in(&mut hp, d, 2)
    }
}

/// Finite closed forms: `s = 1` for every nontrivial `chi_d`, `s = 2` for even
/// characters (Bernoulli polynomial sum) and the trivial character.
pub fn l_value_closed_form(d: i64, s: u32) -> Result<LValue> {
    check_s(s)?;
    l_value_closed_form_in(&mut Hp::new(), d, s)
}

/// `L(s) = q^-s sum_a chi(a) zeta(s, a/q)` with digamma (`s = 1`) or
/// trigamma (`s = 2`) by Euler-Maclaurin.
pub fn l_value_series(d: i64, s: u32) -> Result<LValue> {
    check_s(s)?;
    l_value_series_in(&mut Hp::new(), d, s)
}

pub(crate) fn l_value_closed_form_in(hp: &mut Hp, d: i64, s: u32) -> Result<LValue> {
    let q = modulus(d)?;
    let chi = chi_values(d, q);
    let pi = hp.pi();
    let value = match (s, d) {
        (1, 1) => return Err(Error::InvalidArgument("zeta has a pole at s = 1".into())),
        (1, _) if d < 0 => {
            // -pi/q^(3/2) * sum a chi(a)
            let w: i128 = (1..q).map(|a| a * chi[a as usize] as i128).sum();
            let den = hp.mul(&hp.int(q), &hp.sqrt(&hp.int(q)));
            hp.div(&hp.mul(&pi, &hp.int(-w)), &den)
        }
        (1, _) => {
            // (2/sqrt q) * log(prod_{chi=-1} sin / prod_{chi=1} sin), a < q/2
            let (mut pos, mut neg) = (hp.int(1), hp.int(1));
            for a in 1..=(q - 1) / 2 {
                let c = chi[a as usize];
                if c == 0 {
                    continue;
                }
                let t = hp.mul(&pi, &hp.ratio(a, q));
                let sn = hp.sin(&t);
                if c > 0 {
                    pos = hp.mul(&pos, &sn);
                } else {
                    neg = hp.mul(&neg, &sn);
                }
            }
            let l = hp.ln(&hp.div(&neg, &pos));
            hp.div(&hp.mul(&hp.int(2), &l), &hp.sqrt(&hp.int(q)))
        }
        (2, 1) => hp.div(&hp.mul(&pi, &pi), &hp.int(6)),
        (2, _) if d > 0 => {
            // pi^2 q^(-5/2) sum chi(a) a^2
            let w: i128 = (1..q).map(|a| a * a * chi[a as usize] as i128).sum();
            let q2 = hp.int(q * q);
            let den = hp.mul(&q2, &hp.sqrt(&hp.int(q)));
            hp.div(&hp.mul(&hp.mul(&pi, &pi), &hp.int(w)), &den)
        }
        _ => return Err(Error::InvalidArgument(format!("no closed form for L({s}, chi_{d})"))),
    };
    Ok(LValue { d, s, value, method: LMethod::ClosedForm, error_bound: 0.0 })
}

/// `B_2, B_4, ..., B_{2K+2}` as exact rationals.
fn bernoulli_even(k: usize) -> Vec<BigRational> {
    // Akiyama-Tanigawa
    let n = 2 * k + 2;
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = vec![BigRational::zero(); n + 1];
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m as i64 + 1)));
        for j in (1..=m).rev() {
            let t = &a[j - 1] - &a[j];
            a[j - 1] = t * BigRational::from_integer(BigInt::from(j as i64));
        }
        out[m] = a[0].clone();
    }
    (1..=k + 1).map(|i| out[2 * i].clone()).collect()
}

pub(crate) fn l_value_series_in(hp: &mut Hp, d: i64, s: u32) -> Result<LValue> {
    let q = modulus(d)?;
    if s == 1 && d == 1 {
        return Err(Error::InvalidArgument("zeta has a pole at s = 1".into()));
    }
    let chi = chi_values(d, q);
    let bern = bernoulli_even(EM_TERMS);
    let b: Vec<Real> = bern[..EM_TERMS].iter().map(|r| hp.rational(r)).collect();
    let last = bern[EM_TERMS].to_f64().unwrap_or(f64::INFINITY).abs();
    let two_k = 2.0 * (EM_TERMS as f64 + 1.0);
    let n = SHIFT as f64;
    let mut acc = hp.int(0);
    for a in 1..=q {
        let c = chi[(a % q.max(1)) as usize];
        if c == 0 || (a == q && q > 1) {
            continue;
        }
        // x = a/q, z = x + N; sums over j < N written as q/(a + jq)
        let z = hp.ratio(a + SHIFT * q, q);
        let zi = hp.div(&hp.int(1), &z);
        let zi2 = hp.mul(&zi, &zi);
        let mut v = if s == 1 {
            // psi(x) = ln z - 1/(2z) - sum B_2k/(2k z^2k) - sum_j 1/(x+j)
            let lz = hp.ln(&z);
            let mut v = hp.sub(&lz, &hp.div(&zi, &hp.int(2)));
            let mut pw = zi2.clone();
            for (i, bk) in b.iter().enumerate() {
                let t = hp.div(&hp.mul(bk, &pw), &hp.int(2 * (i as i128 + 1)));
                v = hp.sub(&v, &t);
                pw = hp.mul(&pw, &zi2);
            }
            for j in 0..SHIFT {
                v = hp.sub(&v, &hp.ratio(q, a + j * q));
            }
            v
        } else {
            // psi_1(x) = 1/z + 1/(2z^2) + sum B_2k / z^(2k+1) + sum_j 1/(x+j)^2
            let mut v = hp.add(&zi, &hp.div(&zi2, &hp.int(2)));
            let mut pw = hp.mul(&zi2, &zi);
            for bk in &b {
                v = hp.add(&v, &hp.mul(bk, &pw));
                pw = hp.mul(&pw, &zi2);
            }
            for j in 0..SHIFT {
                let t = a + j * q;
                v = hp.add(&v, &hp.ratio(q * q, t * t));
            }
            v
        };
        if c < 0 {
            v = v.neg();
        }
        acc = hp.add(&acc, &v);
    }
    let (value, error_bound) = if s == 1 {
        (hp.div(&acc.neg(), &hp.int(q)), last / (two_k * n.powf(two_k)))
    } else {
        (hp.div(&acc, &hp.int(q * q)), q as f64 * last / (n.powf(two_k + 1.0) * (q * q) as f64))
    };
    Ok(LValue { d, s, value, method: LMethod::Series, error_bound })
}

/// `zeta_k^*(1) = L(1, chi_Delta)`.
pub fn zeta_k_residue(k: &QuadField) -> Real {
    let mut hp = Hp::new();
    l_value_closed_form_in(&mut hp, k.disc(), 1).expect("field discriminant is fundamental").value
}

/// `2^r1 (2 pi)^r2 h R / (w sqrt|Delta|)` from the class group and the
/// fundamental unit.
pub fn class_number_formula(k: &QuadField) -> Result<Real> {
    let mut hp = Hp::new();
    let d = k.disc();
    let h = ClassGroup::wide(k).order() as i128;
    let w = k.roots_of_unity() as i128;
    let pi = hp.pi();
    let sq = hp.sqrt(&hp.int(d.unsigned_abs() as i128));
    let top = if d > 0 {
        let eps = fundamental_unit(k)?.unit;
        let r = unit_log(&mut hp, &eps);
        hp.mul(&hp.int(4 * h), &r)
    } else {
        hp.mul(&hp.mul(&hp.int(2), &pi), &hp.int(h))
    };
    Ok(hp.div(&top, &hp.mul(&hp.int(w), &sq)))
}

/// `log |e|` under the embedding `sqrt(d) > 0`, for `e > 0` with positive
/// rational and irrational parts.
fn unit_log(hp: &mut Hp, e: &FieldElement) -> Real {
    let d = e.disc();
    let (x, y, den) = e.parts();
    // e = (2x + y d + y sqrt d) / (2 den)
    let a = BigInt::from(2) * x + y * BigInt::from(d);
    let (a, y, den) = (hp.big(&a), hp.big(y), hp.big(den));
    let rt = hp.sqrt(&hp.int(d as i128));
    let num = hp.add(&a, &hp.mul(&y, &rt));
    let v = hp.div(&num, &hp.mul(&hp.int(2), &den));
    hp.ln(&v.abs())
}

/// `zeta_k(2) = zeta(2) L(2, chi_Delta)`.
pub fn zeta_k_at_2(k: &QuadField) -> Real {
    let mut hp = Hp::new();
    zeta_k_at_2_in(&mut hp, k)
}

fn zeta_k_at_2_in(hp: &mut Hp, k: &QuadField) -> Real {
    let pi = hp.pi();
    let z2 = hp.div(&hp.mul(&pi, &pi), &hp.int(6));
    let l2 = l_value_series_in(hp, k.disc(), 2).expect("field discriminant is fundamental").value;
    hp.mul(&z2, &l2)
}

/// `prod_{p | m} (1 - N(p)^-2)`.
fn local_factor_at_2(hp: &Hp, m: &QuadIdeal) -> Real {
    let mut f = hp.int(1);
    for (p, _) in m.factor() {
        let n = p.norm() as i128;
        f = hp.mul(&f, &hp.ratio(n * n - 1, n * n));
    }
    f
}

/// `zeta_k^m(2)`: the Euler factors at primes dividing `m` removed.
pub fn zeta_k_imprimitive_at_2(k: &QuadField, m: &QuadIdeal) -> Result<Real> {
    if m.disc() != k.disc() {
        return Err(Error::InvalidArgument("ideal belongs to another field".into()));
    }
    let mut hp = Hp::new();
    let z = zeta_k_at_2_in(&mut hp, k);
    Ok(hp.mul(&local_factor_at_2(&hp, m), &z))
}

/// The main-term constant computed three ways.
#[derive(Clone, Debug)]
pub struct MainTermForms {
    /// `zeta*(1) / (2^r2 zeta_k(2))`.
    pub closed: Real,
    /// Principal-character sum over `d | 2` with imprimitive zeta values.
    pub raw: Real,
    /// `(2^(r1+r2) / 16) (sum_{d | 2} Phi(d)) zeta*(1) / zeta_k(2)`.
    pub phi_sum: Real,
    /// `sum_{d | 2} Phi(d)`.
    pub phi_total: u64,
}

impl MainTermForms {
    /// Largest pairwise relative difference.
    pub fn max_rel_diff(&self) -> f64 {
        let hp = Hp::new();
        hp.rel_diff(&self.closed, &self.raw).max(hp.rel_diff(&self.closed, &self.phi_sum))
    }
}

pub fn main_term_forms(k: &QuadField) -> MainTermForms {
    let mut hp = Hp::new();
    let res = l_value_closed_form_in(&mut hp, k.disc(), 1).expect("fundamental").value;
    let z2 = zeta_k_at_2_in(&mut hp, k);
    let ratio = hp.div(&res, &z2);
    let closed = hp.div(&ratio, &hp.int(1 << k.r2()));
    let two = QuadIdeal::from_element(&FieldElement::integer(k.disc(), 2));
    let pre = hp.ratio(1 << (k.r1() + k.r2()), 16);
    let mut raw = hp.int(0);
    let mut phi_total = 0u64;
    for d in two.divisors() {
        let nd = d.norm() as i128;
        let m = d.mul(&d);
        // (1/N(d)) Phi(d^2)/N(d^2) zeta*/zeta^(d^2)(2) sum_{c | d} mu(d/c) N(c)^2
        let mut j2 = 0i128;
        for c in d.divisors() {
            let mu = c.divide_into(&d).expect("c divides d").moebius() as i128;
            let nc = c.norm() as i128;
            j2 += mu * nc * nc;
        }
        let zm = hp.mul(&local_factor_at_2(&hp, &m), &z2);
        let w = hp.ratio(m.euler_phi() as i128 * j2, nd * nd * nd);
        raw = hp.add(&raw, &hp.mul(&w, &hp.div(&res, &zm)));
        phi_total += d.euler_phi();
    }
    let raw = hp.mul(&pre, &raw);
    let phi_sum = hp.mul(&hp.mul(&pre, &hp.int(phi_total as i128)), &ratio);
    MainTermForms { closed, raw, phi_sum, phi_total }
}

/// `zeta_k^*(1) / (2^r2 zeta_k(2))`, checked against the divisor-sum forms
/// to 40 digits.
pub fn main_term_constant(k: &QuadField) -> Result<Real> {
    let f = main_term_forms(k);
    let e = f.max_rel_diff();
    if e > 1e-40 {
        return Err(Error::Invariant(format!("main-term forms disagree for {} (rel. diff {e:e})", k.disc())));
    }
    Ok(f.closed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorTheorem {
    /// Quadratic extensions of a degree-`n` field.
    Relative,
    /// Quartic extensions of a degree-`n` field through a quadratic step.
    QuarticOverF,
}

/// Error term `|Delta|^a X^b (log X)^c`, with optional powers of
/// `log |Delta|` and an `epsilon` in the exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ErrorExponent {
    pub delta_exp: Rational64,
    pub x_exp: Rational64,
    pub log_x_power: u32,
    pub log_delta_power: u32,
    pub epsilon: bool,
}

pub fn error_exponent(n: u32, theorem: ErrorTheorem) -> Result<ErrorExponent> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("degree {n} < 2")));
    }
    let r = |a: i64, b: i64| Rational64::new(a, b);
    let n = n as i64;
    Ok(match theorem {
        ErrorTheorem::Relative => match n {
            2 => {
                ErrorExponent { delta_exp: r(1, 3), x_exp: r(1, 2), log_x_power: 1, log_delta_power: 1, epsilon: false }
            }
            3 => {
                ErrorExponent { delta_exp: r(1, 4), x_exp: r(1, 2), log_x_power: 3, log_delta_power: 2, epsilon: false }
            }
            _ => ErrorExponent {
                delta_exp: r(1, n + 1),
                x_exp: r(n - 1, n + 1),
                log_x_power: (n - 1) as u32,
                log_delta_power: 0,
                epsilon: false,
            },
        },
        ErrorTheorem::QuarticOverF => ErrorExponent {
            delta_exp: r(2, 2 * n + 1),
            x_exp: r(2 * n - 1, 2 * n + 1),
            log_x_power: 0,
            log_delta_power: 0,
            epsilon: true,
        },
    })
}

/// Exponent `alpha(n)` in `|Cl(F)[2]| << |Delta_F|^(alpha(n) + eps)`.
pub fn alpha_bound(n: u32) -> Result<Rational64> {
    match n {
        0 | 1 => Err(Error::InvalidArgument(format!("degree {n} < 2"))),
        2 => Ok(Rational64::zero()),
        3 | 4 => Ok(Rational64::new(2785, 10000)),
        _ => Ok(Rational64::new(n as i64 - 1, 2 * n as i64)),
    }
}
