//! The ring `O/4` and the divisors of `(2)`.

use crate::quadfield::{FieldElement, PrimeIdeal, QuadField, QuadIdeal};

/// A residue class in `O/4`, encoded as `x + 4y` for `x + y*omega`.
pub type Res4 = u8;

/// Multiplication table of `O/4`.
#[derive(Clone, Debug)]
pub struct Ring4 {
    mul: [[Res4; 16]; 16],
}

impl Ring4 {
    pub fn new(disc: i64) -> Self {
        // omega^2 = disc*omega - n
        let n = ((disc as i128 * disc as i128 - disc as i128) / 4).rem_euclid(4) as i64;
        let dm = disc.rem_euclid(4);
        let mut mul = [[0u8; 16]; 16];
        for (r1, row) in mul.iter_mut().enumerate() {
            for (r2, out) in row.iter_mut().enumerate() {
                let (x1, y1) = ((r1 % 4) as i64, (r1 / 4) as i64);
                let (x2, y2) = ((r2 % 4) as i64, (r2 / 4) as i64);
                let yy = y1 * y2;
                let x = (x1 * x2 - n * yy).rem_euclid(4);
                let y = (x1 * y2 + x2 * y1 + dm * yy).rem_euclid(4);
                *out = (x + 4 * y) as u8;
            }
        }
        Ring4 { mul }
    }

    pub fn mul(&self, a: Res4, b: Res4) -> Res4 {
        self.mul[a as usize][b as usize]
    }

    pub fn one() -> Res4 {
        1
    }

    /// Residue of an element with odd denominator.
    pub fn residue(e: &FieldElement) -> Option<Res4> {
        e.residue(4).map(|(x, y)| (x + 4 * y) as u8)
    }
}

/// A divisor `c` of `(2)` with the data needed to test `x^2 = r mod c^2`.
#[derive(Clone, Debug)]
pub struct TwoDivisor {
    pub ideal: QuadIdeal,
    pub norm: u64,
    /// Bit `i` set when the `i`-th prime above 2 divides `c`.
    pub mask: u8,
    /// Exponent of each prime above 2 in `c`.
    pub exponents: Vec<u32>,
    /// `square_ok[r]`: `r` is the square of a unit modulo `c^2`.
    pub square_ok: [bool; 16],
    /// `unit[r]`: `r` is a unit modulo `c^2`.
    pub unit: [bool; 16],
    /// Reduction map `O/4 -> O/c^2`, as a canonical key.
    pub key: [u8; 16],
}

/// Canonical key of a residue modulo an ideal dividing 4.
pub(crate) fn reduce_key(m: &QuadIdeal, r: Res4) -> u8 {
    let (a, b, c) = m.hnf();
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let (x, y) = ((r % 4) as i64, (r / 4) as i64);
    let k = y.div_euclid(c);
    let y2 = y - k * c;
    let x2 = (x - k * b).rem_euclid(a);
    (x2 + 4 * y2) as u8
}

impl TwoDivisor {
    fn new(ring: &Ring4, ideal: QuadIdeal, mask: u8, exponents: Vec<u32>) -> Self {
        let m = ideal.mul(&ideal);
        let mut key = [0u8; 16];
        for (r, k) in key.iter_mut().enumerate() {
            *k = reduce_key(&m, r as u8);
        }
        let one = key[1];
        let mut unit = [false; 16];
        for (r, u) in unit.iter_mut().enumerate() {
            *u = (0..16u8).any(|s| key[ring.mul(r as u8, s) as usize] == one);
        }
        let mut square_ok = [false; 16];
        for x in 0..16u8 {
            if unit[x as usize] {
                let sq = key[ring.mul(x, x) as usize];
                for r in 0..16usize {
                    if key[r] == sq {
                        square_ok[r] = true;
                    }
                }
            }
        }
        TwoDivisor { norm: ideal.norm(), ideal, mask, exponents, square_ok, unit, key }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.norm == 1
    }
}

/// The primes above 2 and all divisors of `(2)`.
#[derive(Clone, Debug)]
pub struct LocalTwo {
    pub ring: Ring4,
    pub primes: Vec<PrimeIdeal>,
    /// Divisors of `(2)` ordered by norm, the unit ideal first.
    pub divisors: Vec<TwoDivisor>,
}

impl LocalTwo {
    pub fn new(field: &QuadField) -> Self {
        let ring = Ring4::new(field.disc());
        let primes = field.primes_above_two();
        let e = primes[0].ramification();
        let mut divisors = Vec::new();
        let ranges: Vec<u32> = primes.iter().map(|_| e).collect();
        let mut exps = vec![0u32; primes.len()];
        loop {
            let mut ideal = field.unit_ideal();
            let mut mask = 0u8;
            for (i, (p, &x)) in primes.iter().zip(&exps).enumerate() {
                ideal = ideal.mul(&p.ideal().pow(x));
                if x > 0 {
                    mask |= 1 << i;
                }
            }
            divisors.push(TwoDivisor::new(&ring, ideal, mask, exps.clone()));
            // next exponent vector
            let mut i = 0;
            loop {
                if i == exps.len() {
                    divisors.sort_by_key(|d| (d.norm, d.ideal.sort_key()));
                    return LocalTwo { ring, primes, divisors };
                }
                if exps[i] < ranges[i] {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    /// Bit mask of the primes above 2 dividing `a`.
    pub fn mask_of(&self, a: &QuadIdeal) -> u8 {
        let mut m = 0;
        for (i, p) in self.primes.iter().enumerate() {
            if p.ideal().divides(a) {
                m |= 1 << i;
            }
        }
        m
    }

    /// Index of the largest divisor `c` with `c` prime to `a_mask` such that
    /// `r` is a unit square modulo `c^2`.
    pub fn conductor_index(&self, a_mask: u8, r: Res4) -> usize {
        let mut best = 0;
        for (i, d) in self.divisors.iter().enumerate() {
            if d.mask & a_mask == 0 && d.square_ok[r as usize] && d.norm > self.divisors[best].norm {
                best = i;
            }
        }
        best
    }

    /// Möbius function of `d/c` for divisors of `(2)`, or `None` if `c` does not divide `d`.
    pub fn mobius_quotient(&self, d: usize, c: usize) -> Option<i32> {
        let (dd, cc) = (&self.divisors[d], &self.divisors[c]);
        let mut mu = 1;
        for (x, y) in dd.exponents.iter().zip(&cc.exponents) {
            if y > x {
                return None;
            }
            match x - y {
                0 => {}
                1 => mu = -mu,
                _ => mu = 0,
            }
        }
        Some(mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_matches_field_multiplication() {
        for d in [-4i64, -3, 5, 8, 12, -23, 40, -20, 17] {
            let ring = Ring4::new(d);
            for a in 0..16u8 {
                for b in 0..16u8 {
                    let ea = FieldElement::from_ints(d, (a % 4) as i64, (a / 4) as i64);
                    let eb = FieldElement::from_ints(d, (b % 4) as i64, (b / 4) as i64);
                    assert_eq!(Ring4::residue(&(&ea * &eb)), Some(ring.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn divisor_counts() {
        let k = |d| LocalTwo::new(&QuadField::new(d).unwrap());
        assert_eq!(k(-4).divisors.len(), 3);
        assert_eq!(k(5).divisors.len(), 2);
        assert_eq!(k(17).divisors.len(), 4);
        assert_eq!(k(-7).divisors.len(), 4);
    }

    #[test]
    fn unit_counts_are_euler_phi() {
        for d in [-4i64, -3, 5, 8, 12, -23, 40, -20, 17, -7] {
            let f = QuadField::new(d).unwrap();
            let loc = LocalTwo::new(&f);
            for c in &loc.divisors {
                let m = c.ideal.mul(&c.ideal);
                let mut keys: Vec<u8> = (0..16).filter(|&r| c.unit[r]).map(|r| c.key[r]).collect();
                keys.sort();
                keys.dedup();
                assert_eq!(keys.len() as u64, m.euler_phi(), "d={d}");
            }
        }
    }

    #[test]
    fn square_table_against_direct_congruence() {
        // x^2 - r in c^2, searched over explicit representatives
        for d in [-4i64, -3, 5, 8, 12, -23, 40, 17, -7] {
            let f = QuadField::new(d).unwrap();
            let loc = LocalTwo::new(&f);
            for c in &loc.divisors {
                let m = c.ideal.mul(&c.ideal);
                for r in 0..16u8 {
                    let re = FieldElement::from_ints(d, (r % 4) as i64, (r / 4) as i64);
                    let is_unit = m.is_coprime(&QuadIdeal::generated_by(d, &[re.clone(), FieldElement::integer(d, 4)]));
                    let mut ok = false;
                    for x in 0..4i64 {
                        for y in 0..4i64 {
                            let xe = f.element(x, y);
                            let xu =
                                m.is_coprime(&QuadIdeal::generated_by(d, &[xe.clone(), FieldElement::integer(d, 4)]));
                            if xu && m.contains(&(&(&xe * &xe) - &re)) {
                                ok = true;
                            }
                        }
                    }
                    assert_eq!(c.square_ok[r as usize], ok && is_unit, "d={d} c={:?} r={r}", c.ideal);
                }
            }
        }
    }

    #[test]
    fn good_divisors_closed_under_lcm() {
        for d in [17i64, -7, -15, 41] {
            let loc = LocalTwo::new(&QuadField::new(d).unwrap());
            for r in 0..16u8 {
                let good: Vec<&TwoDivisor> = loc.divisors.iter().filter(|c| c.square_ok[r as usize]).collect();
                for a in &good {
                    for b in &good {
                        let lcm_exps: Vec<u32> = a.exponents.iter().zip(&b.exponents).map(|(x, y)| *x.max(y)).collect();
                        assert!(good.iter().any(|c| c.exponents == lcm_exps), "d={d} r={r}");
                    }
                }
            }
        }
    }
}
