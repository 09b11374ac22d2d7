use super::element::FieldElement;
use super::QuadField;
use crate::arith;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    First,
    Second,
}

/// An integral ideal `content * (a, (b + sqrt(disc))/2)`.
///
/// Canonical: `a >= 1`, `-a < b <= a`, `b = disc mod 2`, `b^2 = disc mod 4a`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadIdeal {
    disc: i64,
    content: i64,
    a: i64,
    b: i64,
}

impl fmt::Debug for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.content == 1 {
            write!(f, "({}, ({}+sqrt{})/2)", self.a, self.b, self.disc)
        } else {
            write!(f, "{}*({}, ({}+sqrt{})/2)", self.content, self.a, self.b, self.disc)
        }
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn omega_c(disc: i64) -> i128 {
    (disc as i128 * disc as i128 - disc as i128) / 4
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Hermite normal form of the Z-span of vectors `(x, y)` (coordinates in
/// the basis `1, omega`), returned as `(A, B, C)` meaning the lattice
/// `Z*A + Z*(B + C*omega)` with `0 <= B < A`. The span must have rank 2.
fn hnf(vectors: &[(i128, i128)]) -> (i128, i128, i128) {
    let mut r1 = (0i128, 0i128); // (x, c)
    let mut a2 = 0i128;
    for &(x, y) in vectors {
        if y == 0 {
            a2 = a2.gcd(&x);
            continue;
        }
        if r1.1 == 0 {
            r1 = (x, y);
            continue;
        }
        let (g, u, v) = ext_gcd(r1.1, y);
        let new_r1 = (u * r1.0 + v * x, g);
        let killed = (y / g) * r1.0 - (r1.1 / g) * x;
        a2 = a2.gcd(&killed);
        r1 = new_r1;
    }
    assert!(r1.1 != 0 && a2 != 0, "degenerate lattice");
    let (mut b, mut c) = r1;
    if c < 0 {
        b = -b;
        c = -c;
    }
    let a = a2.abs();
    (a, b.rem_euclid(a), c)
}

impl QuadIdeal {
    pub fn unit(disc: i64) -> Self {
        QuadIdeal { disc, content: 1, a: 1, b: disc.rem_euclid(2) }
    }

    /// Build from primitive data; normalizes `b` into `(-a, a]`.
    pub fn new(disc: i64, content: i64, a: i64, b: i64) -> Self {
        assert!(content >= 1 && a >= 1);
        assert!((b - disc).rem_euclid(2) == 0, "parity of b");
        assert!(((b as i128 * b as i128 - disc as i128) % (4 * a as i128)) == 0, "b^2 != disc mod 4a");
        let m = 2 * a;
        let mut b = b.rem_euclid(m);
        if b > a {
            b -= m;
        }
        QuadIdeal { disc, content, a, b }
    }

    fn from_hnf(disc: i64, (ha, hb, hc): (i128, i128, i128)) -> Self {
        debug_assert!(ha % hc == 0 && hb % hc == 0);
        let a = ha / hc;
        let bb = hb / hc; // (b - disc)/2 mod a
        let b = 2 * bb + disc as i128;
        QuadIdeal::new(disc, hc as i64, a as i64, b.rem_euclid(2 * a) as i64)
    }

    /// HNF basis `(A, B, C)`: the ideal is `Z*A + Z*(B + C*omega)`.
    pub fn hnf(&self) -> (i128, i128, i128) {
        let c = self.content as i128;
        let bb = ((self.b as i128 - self.disc as i128) / 2).rem_euclid(self.a as i128);
        (c * self.a as i128, c * bb, c)
    }

    /// Z-basis as field elements.
    pub fn basis(&self) -> [FieldElement; 2] {
        let (a, b, c) = self.hnf();
        [FieldElement::integer(self.disc, a), FieldElement::new(self.disc, b.into(), c.into(), 1.into())]
    }

    fn from_generators(disc: i64, gens: &[(i128, i128)]) -> Self {
        // close under multiplication by omega
        let w = omega_c(disc);
        let mut v = Vec::with_capacity(gens.len() * 2);
        for &(x, y) in gens {
            v.push((x, y));
            // (x + y w) w = -w*y + (x + disc*y) w
            v.push((-w * y, x + disc as i128 * y));
        }
        Self::from_hnf(disc, hnf(&v))
    }

    /// The principal ideal generated by a nonzero integral element.
    pub fn from_element(e: &FieldElement) -> Self {
        assert!(e.is_integral() && !e.is_zero());
        let (x, y, _) = e.parts();
        let x = x.to_i128().expect("element too large for ideal arithmetic");
        let y = y.to_i128().expect("element too large for ideal arithmetic");
        Self::from_generators(e.disc(), &[(x, y)])
    }

    /// The ideal generated by the given nonzero integral elements.
    pub fn generated_by(disc: i64, elems: &[FieldElement]) -> Self {
        let g: Vec<(i128, i128)> = elems
            .iter()
            .map(|e| {
                assert!(e.is_integral());
                let (x, y, _) = e.parts();
                (x.to_i128().unwrap(), y.to_i128().unwrap())
            })
            .collect();
        Self::from_generators(disc, &g)
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }
    pub fn content(&self) -> i64 {
        self.content
    }
    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn norm(&self) -> u64 {
        (self.content as u64).pow(2) * self.a as u64
    }

    pub fn is_unit(&self) -> bool {
        self.content == 1 && self.a == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.content == 1
    }

    pub fn sort_key(&self) -> (i64, i64, i64) {
        (self.content, self.a, self.b)
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.disc, o.disc);
        let w = omega_c(self.disc);
        let d = self.disc as i128;
        let (a1, b1, c1) = self.hnf();
        let (a2, b2, c2) = o.hnf();
        // (B1 + C1 w)(B2 + C2 w)
        let cc = c1 * c2;
        let prod = (b1 * b2 - w * cc, b1 * c2 + b2 * c1 + d * cc);
        let v = [(a1 * a2, 0), (a1 * b2, a1 * c2), (a2 * b1, a2 * c1), prod];
        Self::from_hnf(self.disc, hnf(&v))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::unit(self.disc);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn conj(&self) -> Self {
        QuadIdeal::new(self.disc, self.content, self.a, -self.b)
    }

    /// Ideal sum `I + J`, the gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (a1, b1, c1) = self.hnf();
        let (a2, b2, c2) = o.hnf();
        Self::from_hnf(self.disc, hnf(&[(a1, 0), (b1, c1), (a2, 0), (b2, c2)]))
    }

    pub fn is_coprime(&self, o: &Self) -> bool {
        self.gcd(o).is_unit()
    }

    /// Membership test for an element of the field.
    pub fn contains(&self, e: &FieldElement) -> bool {
        if !e.is_integral() {
            return false;
        }
        let (x, y, _) = e.parts();
        let (a, b, c) = self.hnf();
        let (x, y) = (x.clone(), y.clone());
        let c_big = num_bigint::BigInt::from(c);
        if !(&y % &c_big).is_zero() {
            return false;
        }
        let t = &y / &c_big;
        let rem = x - t * num_bigint::BigInt::from(b);
        (rem % num_bigint::BigInt::from(a)).is_zero()
    }

    /// `self | other`, i.e. `other` is contained in `self`.
    pub fn divides(&self, other: &Self) -> bool {
        other.basis().iter().all(|e| self.contains(e))
    }

    /// Exact quotient `other / self`, when `self` divides `other`.
    pub fn divide_into(&self, other: &Self) -> Option<Self> {
        if !self.divides(other) {
            return None;
        }
        // other * conj(self) / N(self)
        let prod = other.mul(&self.conj());
        let n = self.norm() as i128;
        let (a, b, c) = prod.hnf();
        if a % n != 0 || b % n != 0 || c % n != 0 {
            return None;
        }
        Some(Self::from_hnf(self.disc, (a / n, b / n, c / n)))
    }

    /// Factorization into prime ideals, sorted by `(p, which)`.
    pub fn factor(&self) -> Vec<(PrimeIdeal, u32)> {
        let field = QuadField::new(self.disc).expect("ideal over a non-fundamental discriminant");
        let mut out = Vec::new();
        let mut rest = self.clone();
        for p in arith::factorize(self.norm()).primes() {
            for pr in field.primes_above(p) {
                let mut e = 0;
                while let Some(q) = pr.ideal().divide_into(&rest) {
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    out.push((pr, e));
                }
            }
        }
        debug_assert!(rest.is_unit());
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.factor().iter().all(|&(_, e)| e == 1)
    }

    /// `|(O/I)^*|`.
    pub fn euler_phi(&self) -> u64 {
        self.factor()
            .iter()
            .map(|(p, e)| {
                let n = p.norm();
                n.pow(e - 1) * (n - 1)
            })
            .product()
    }

    /// Number of integral ideal divisors.
    pub fn tau(&self) -> u64 {
        self.factor().iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Möbius function on ideals.
    pub fn moebius(&self) -> i32 {
        let f = self.factor();
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All integral divisors, sorted by norm then canonical key.
    pub fn divisors(&self) -> Vec<Self> {
        let mut acc = vec![Self::unit(self.disc)];
        for (p, e) in self.factor() {
            let pi = p.ideal();
            acc = acc.iter().flat_map(|d| (0..=e).map(move |i| d.mul(&pi.pow(i)))).collect();
        }
        acc.sort_by_key(|d| (d.norm(), d.sort_key()));
        acc
    }
}

/// A prime ideal above a rational prime `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub kind: SplitKind,
    pub which: Which,
    ideal: QuadIdeal,
}

impl PrimeIdeal {
    pub fn ideal(&self) -> &QuadIdeal {
        &self.ideal
    }

    pub fn norm(&self) -> u64 {
        self.ideal.norm()
    }

    /// Ramification index over `p`.
    pub fn ramification(&self) -> u32 {
        if self.kind == SplitKind::Ramified {
            2
        } else {
            1
        }
    }

    pub fn conj(&self) -> Self {
        match self.kind {
            SplitKind::Split => PrimeIdeal {
                p: self.p,
                kind: self.kind,
                which: if self.which == Which::First { Which::Second } else { Which::First },
                ideal: self.ideal.conj(),
            },
            _ => self.clone(),
        }
    }

    /// For a split prime of odd norm `p`: the image `r` of `omega` in `O/P = F_p`.
    pub fn omega_root(&self) -> i64 {
        assert_eq!(self.ideal.norm(), self.p);
        // P = (p, (b + sqrt d)/2) contains (b - d)/2 + omega
        let d = self.ideal.disc;
        ((d - self.ideal.b) / 2).rem_euclid(self.p as i64)
    }

    pub(crate) fn above(field: QuadField, p: u64) -> Vec<PrimeIdeal> {
        let d = field.disc();
        let pi = p as i64;
        match field.splitting_type(p) {
            SplitKind::Inert => vec![PrimeIdeal {
                p,
                kind: SplitKind::Inert,
                which: Which::First,
                ideal: QuadIdeal::new(d, pi, 1, d.rem_euclid(2)),
            }],
            kind => {
                let bs = root_b(d, pi);
                let mut out: Vec<PrimeIdeal> = bs
                    .into_iter()
                    .map(|b| QuadIdeal::new(d, 1, pi, b))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .enumerate()
                    .map(|(i, ideal)| PrimeIdeal {
                        p,
                        kind,
                        which: if i == 0 { Which::First } else { Which::Second },
                        ideal,
                    })
                    .collect();
                if kind == SplitKind::Ramified {
                    out.truncate(1);
                }
                out
            }
        }
    }
}

/// The `b` values in `(-p, p]` with `b = d mod 2` and `b^2 = d mod 4p`,
/// largest first.
fn root_b(d: i64, p: i64) -> Vec<i64> {
    let mut out = Vec::new();
    if p == 2 {
        for b in [2i64, 1, 0, -1] {
            if (b - d).rem_euclid(2) == 0 && (b * b - d).rem_euclid(8) == 0 {
                out.push(b);
            }
        }
    } else {
        let r = arith::sqrt_mod_prime(d, p as u64).expect("p does not split or ramify") as i64;
        for cand in [r, p - r] {
            // lift to the right parity modulo 2p, then into (-p, p]
            let mut b = if (cand - d).rem_euclid(2) == 0 { cand } else { cand - p };
            if b <= -p {
                b += 2 * p;
            }
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out.sort_unstable_by(|x, y| y.cmp(x));
    }
    out
}

impl PartialOrd for QuadIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadIdeal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.norm(), self.sort_key()).cmp(&(other.norm(), other.sort_key()))
    }
}
