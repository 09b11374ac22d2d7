//! Binary quadratic forms `a x^2 + b x y + c y^2` of fundamental discriminant.

use crate::arith::isqrt;
use crate::quadfield::QuadIdeal;
use crate::{Error, Result};
use num_integer::Integer;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Debug for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One reduction move. `Rho(t)` maps `(a, b, c)` to `(c, 2ct - b, a')`;
/// `Translate(t)` maps it to `(a, b + 2at, c')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Move {
    Rho(i64),
    Translate(i64),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Step {
    pub form: Bqf,
    pub mv: Move,
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf { a, b, c }
    }

    /// Form with leading coefficient `a` and middle `b`; `c` from the discriminant.
    pub fn from_ab(disc: i64, a: i64, b: i64) -> Self {
        let num = b as i128 * b as i128 - disc as i128;
        assert!(num % (4 * a as i128) == 0, "b^2 != disc mod 4a");
        Bqf { a, b, c: (num / (4 * a as i128)) as i64 }
    }

    pub fn disc(&self) -> i64 {
        (self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128) as i64
    }

    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Bqf::from_ab(disc, 1, b)
    }

    pub fn inverse(&self) -> Self {
        Bqf { a: self.a, b: -self.b, c: self.c }
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Form of the primitive part of an ideal `content*(a, (b + sqrt d)/2)`.
    pub fn from_ideal(i: &QuadIdeal) -> Self {
        Bqf::from_ab(i.disc(), i.a(), i.b())
    }

    /// The ideal `(|a|, (b + sqrt d)/2)`.
    pub fn to_ideal(&self) -> QuadIdeal {
        QuadIdeal::new(self.disc(), 1, self.a.abs(), self.b)
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if d < 0 {
            self.b.abs() <= self.a && self.a <= self.c && !((self.b.abs() == self.a || self.a == self.c) && self.b < 0)
        } else {
            let r = isqrt(d as u64) as i64;
            let a2 = 2 * self.a.abs();
            self.b > 0 && self.b <= r && r < self.b + a2 && a2 - self.b <= r
        }
    }

    /// Reduction move for definite forms: normalize `b` into `(-c, c]` after the swap.
    fn imag_step(&self) -> Step {
        let Bqf { b, c, .. } = *self;
        // (a, b, c) -> (c, -b, a) then translate by t: b' = -b + 2ct
        let t = normalize_t(-b, c);
        let b2 = -b + 2 * c * t;
        Step { form: Bqf::from_ab(self.disc(), c, b2), mv: Move::Rho(t) }
    }

    /// Reduction move for indefinite forms.
    pub(crate) fn rho(&self) -> Step {
        let d = self.disc();
        let r = isqrt(d as u64) as i64;
        let c = self.c;
        let ac = c.abs();
        let m = 2 * ac;
        let b2 = if ac > r {
            // (-|c|, |c|]
            let mut x = (-self.b).rem_euclid(m);
            if x > ac {
                x -= m;
            }
            x
        } else {
            // largest value <= r congruent to -b mod 2|c|
            r - (r + self.b).rem_euclid(m)
        };
        let t = (self.b + b2) / (2 * c);
        Step { form: Bqf::from_ab(d, c, b2), mv: Move::Rho(t) }
    }

    /// Sequence of moves leading to a reduced form; empty if already reduced.
    pub(crate) fn reduction_path(&self) -> Vec<Step> {
        let mut path = Vec::new();
        let d = self.disc();
        if d < 0 {
            let mut f = *self;
            let t0 = normalize_t(f.b, f.a);
            if t0 != 0 {
                f = Bqf::from_ab(d, f.a, f.b + 2 * f.a * t0);
                path.push(Step { form: f, mv: Move::Translate(t0) });
            }
            while f.a > f.c || (f.a == f.c && f.b < 0) {
                let s = f.imag_step();
                path.push(s);
                f = s.form;
            }
        } else {
            let mut f = *self;
            let mut guard = 0;
            while !f.is_reduced() {
                let s = f.rho();
                path.push(s);
                f = s.form;
                guard += 1;
                assert!(guard < 10_000, "indefinite reduction does not terminate");
            }
        }
        path
    }

    /// Some reduced form in the same proper class.
    pub fn reduced(&self) -> Result<Bqf> {
        if self.a == 0 {
            return Err(Error::InvalidArgument("degenerate form with a = 0".into()));
        }
        Ok(self.reduction_path().last().map(|s| s.form).unwrap_or(*self))
    }

    /// The cycle of reduced indefinite forms through this reduced form.
    pub fn cycle(&self) -> Vec<Bqf> {
        assert!(self.disc() > 0 && self.is_reduced());
        let mut out = vec![*self];
        let mut f = self.rho().form;
        while f != *self {
            out.push(f);
            f = f.rho().form;
        }
        out
    }

    /// Canonical class representative: the reduced form when definite, the
    /// smallest `(a, b)` of the reduction cycle when indefinite.
    pub fn reduce(&self) -> Result<Bqf> {
        let f = self.reduced()?;
        if f.disc() < 0 {
            return Ok(f);
        }
        Ok(f.cycle().into_iter().min_by_key(|g| (g.a, g.b)).unwrap())
    }

    /// Reduced member of the class with positive leading coefficient.
    fn positive_rep(&self) -> Bqf {
        let f = self.reduced().expect("degenerate form");
        if f.a > 0 {
            f
        } else {
            f.rho().form
        }
    }

    /// Gauss composition, via multiplication of the attached ideals.
    pub fn compose(&self, other: &Bqf) -> Result<Bqf> {
        if self.disc() != other.disc() {
            return Err(Error::InvalidArgument(format!("discriminants {} and {} differ", self.disc(), other.disc())));
        }
        let i = self.positive_rep().to_ideal().mul(&other.positive_rep().to_ideal());
        Bqf::from_ideal(&i).reduce()
    }
}

/// `t` with `b + 2 a t` in `(-a, a]`, for `a > 0`.
fn normalize_t(b: i64, a: i64) -> i64 {
    let m = 2 * a;
    let mut x = b.rem_euclid(m);
    if x > a {
        x -= m;
    }
    (x - b) / m
}

/// All reduced forms of a negative discriminant.
pub fn reduced_forms_definite(d: i64) -> Vec<Bqf> {
    assert!(d < 0);
    let mut out = Vec::new();
    let amax = isqrt((-d / 3) as u64) as i64 + 1;
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = Bqf::from_ab(d, a, b);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// All reduced forms of a positive discriminant.
pub fn reduced_forms_indefinite(d: i64) -> Vec<Bqf> {
    assert!(d > 0);
    let r = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    for b in 1..=r {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let n = (d - b * b) / 4; // = -a c
        for a in 1..=n {
            if n % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let f = Bqf::new(sa, b, -n / sa);
                if f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out
}

/// Canonical representatives of all proper classes.
pub fn class_representatives(d: i64) -> Vec<Bqf> {
    if d < 0 {
        reduced_forms_definite(d)
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut reps = Vec::new();
        for f in reduced_forms_indefinite(d) {
            if seen.contains(&f) {
                continue;
            }
            let cyc = f.cycle();
            let rep = *cyc.iter().min_by_key(|g| (g.a, g.b)).unwrap();
            seen.extend(cyc);
            reps.push(rep);
        }
        reps.sort();
        reps
    }
}
