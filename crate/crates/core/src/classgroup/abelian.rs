//! Finite abelian groups from generators and relations.

use std::collections::HashMap;
use std::hash::Hash;

/// A finite abelian group `Z^s / L` in Smith form.
///
/// With `U R V = D`, an exponent vector `e` has coordinates `e V` reduced
/// modulo the diagonal, and `W = V^-1` maps coordinates back to exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    diag: Vec<i64>,
    v: Vec<Vec<i64>>,
    w: Vec<Vec<i64>>,
    offset: usize,
}

impl AbelianGroup {
    /// Smith normal form of the relation rows over `ngens` generators.
    /// The relations must have full rank.
    pub fn from_relations(relations: &[Vec<i64>], ngens: usize) -> Self {
        let s = ngens;
        let mut r: Vec<Vec<i128>> = relations
            .iter()
            .map(|row| {
                assert_eq!(row.len(), s);
                row.iter().map(|&x| x as i128).collect()
            })
            .collect();
        let m = r.len();
        let mut v: Vec<Vec<i128>> = (0..s).map(|i| unit_row(s, i)).collect();
        let mut w: Vec<Vec<i128>> = (0..s).map(|i| unit_row(s, i)).collect();
        let mut diag = Vec::with_capacity(s);
        for t in 0..s {
            loop {
                // smallest nonzero entry of the remaining block
                let mut best: Option<(usize, usize)> = None;
                for (i, row) in r.iter().enumerate().skip(t) {
                    for (j, &x) in row.iter().enumerate().skip(t) {
                        if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < r[bi][bj].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let (pi, pj) = best.expect("relations do not have full rank");
                r.swap(t, pi);
                if pj != t {
                    for row in r.iter_mut() {
                        row.swap(t, pj);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, pj);
                    }
                    w.swap(t, pj);
                }
                let p = r[t][t];
                let mut clean = true;
                for i in t + 1..m {
                    let q = r[i][t].div_euclid(p);
                    if q != 0 {
                        for j in t..s {
                            r[i][j] -= q * r[t][j];
                        }
                    }
                    clean &= r[i][t] == 0;
                }
                for j in t + 1..s {
                    let q = r[t][j].div_euclid(p);
                    if q != 0 {
                        for row in r.iter_mut() {
                            row[j] -= q * row[t];
                        }
                        for row in v.iter_mut() {
                            row[j] -= q * row[t];
                        }
                        for k in 0..s {
                            w[t][k] += q * w[j][k];
                        }
                    }
                    clean &= r[t][j] == 0;
                }
                if !clean {
                    continue;
                }
                let bad = (t + 1..m).find(|&i| (t + 1..s).any(|j| r[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        for j in t..s {
                            r[t][j] += r[i][j];
                        }
                    }
                    None => break,
                }
            }
            diag.push(r[t][t].abs() as i64);
        }
        let offset = diag.iter().take_while(|&&d| d == 1).count();
        let cvt = |m: Vec<Vec<i128>>| -> Vec<Vec<i64>> {
            m.into_iter()
                .map(|row| row.into_iter().map(|x| i64::try_from(x).expect("transform overflow")).collect())
                .collect()
        };
        AbelianGroup { diag, v: cvt(v), w: cvt(w), offset }
    }

    pub fn ngens(&self) -> usize {
        self.diag.len()
    }

    pub fn order(&self) -> u64 {
        self.diag.iter().map(|&d| d as u64).product()
    }

    /// Elementary divisors greater than one, each dividing the next.
    pub fn invariants(&self) -> &[i64] {
        &self.diag[self.offset..]
    }

    pub fn rank(&self) -> usize {
        self.diag.len() - self.offset
    }

    /// Coordinates of the element with exponent vector `e`, one per invariant.
    pub fn coords(&self, e: &[i64]) -> Vec<i64> {
        assert_eq!(e.len(), self.ngens());
        (self.offset..self.ngens())
            .map(|i| {
                let x: i128 = e.iter().zip(&self.v).map(|(&ej, row)| ej as i128 * row[i] as i128).sum();
                x.rem_euclid(self.diag[i] as i128) as i64
            })
            .collect()
    }

    /// An exponent vector whose class has coordinates `y`.
    pub fn exponents(&self, y: &[i64]) -> Vec<i64> {
        assert_eq!(y.len(), self.rank());
        (0..self.ngens()).map(|j| y.iter().enumerate().map(|(i, &yi)| yi * self.w[self.offset + i][j]).sum()).collect()
    }

    /// Rows `n_i W_i` for every Smith index, spanning the relation lattice.
    pub fn relation_basis(&self) -> Vec<Vec<i64>> {
        (0..self.ngens()).map(|i| self.w[i].iter().map(|&x| x * self.diag[i]).collect()).collect()
    }

    /// Same as `relation_basis` but only for the nontrivial invariants.
    pub fn smith_relations(&self) -> Vec<Vec<i64>> {
        self.relation_basis()[self.offset..].to_vec()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).zip(self.invariants()).map(|((a, b), n)| (a + b).rem_euclid(*n)).collect()
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    /// Size of the 2-torsion subgroup.
    pub fn two_torsion(&self) -> u64 {
        1 << self.invariants().iter().filter(|&&n| n % 2 == 0).count()
    }

    /// Whether the element is twice another.
    pub fn is_square(&self, y: &[i64]) -> bool {
        y.iter().zip(self.invariants()).all(|(&a, &n)| n % 2 == 1 || a % 2 == 0)
    }
}

fn unit_row(s: usize, i: usize) -> Vec<i128> {
    let mut r = vec![0; s];
    r[i] = 1;
    r
}

/// Output of the generator search: the chosen candidates, the exponent
/// vector of every element, and one relation per chosen generator.
#[derive(Clone, Debug)]
pub struct Generated<K> {
    pub chosen: Vec<usize>,
    pub table: HashMap<K, Vec<i64>>,
    pub relations: Vec<Vec<i64>>,
}

/// Enumerate a finite abelian group of known `order` from candidate
/// generators, recording relations as each new generator is adjoined.
pub fn generate<K, I, F>(identity: K, candidates: I, order: usize, mul: F) -> Generated<K>
where
    K: Clone + Eq + Hash,
    I: IntoIterator<Item = K>,
    F: Fn(&K, &K) -> K,
{
    let mut table: HashMap<K, Vec<i64>> = HashMap::new();
    table.insert(identity.clone(), Vec::new());
    let mut chosen = Vec::new();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    for (idx, g) in candidates.into_iter().enumerate() {
        if table.len() >= order {
            break;
        }
        if table.contains_key(&g) {
            continue;
        }
        let ngen = chosen.len();
        let mut powers = vec![identity.clone(), g.clone()];
        while !table.contains_key(powers.last().unwrap()) {
            let next = mul(powers.last().unwrap(), &g);
            powers.push(next);
        }
        let k = powers.len() - 1;
        let mut rel = table[&powers[k]].clone();
        rel.resize(ngen, 0);
        for x in rel.iter_mut() {
            *x = -*x;
        }
        rel.push(k as i64);
        chosen.push(idx);
        for r in relations.iter_mut() {
            r.push(0);
        }
        relations.push(rel);
        let old: Vec<(K, Vec<i64>)> = table.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        for v in table.values_mut() {
            v.resize(ngen + 1, 0);
        }
        for (i, gi) in powers.iter().enumerate().take(k).skip(1) {
            for (h, vec) in &old {
                let mut v = vec.clone();
                v.resize(ngen + 1, 0);
                v[ngen] = i as i64;
                table.insert(mul(h, gi), v);
            }
        }
    }
    assert_eq!(table.len(), order, "candidates do not generate the group");
    let n = chosen.len();
    for v in table.values_mut() {
        v.resize(n, 0);
    }
    Generated { chosen, table, relations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snf_of_small_groups() {
        // Z/4 x Z/6 = Z/2 x Z/12
        let g = AbelianGroup::from_relations(&[vec![4, 0], vec![0, 6]], 2);
        assert_eq!(g.invariants(), &[2, 12]);
        assert_eq!(g.order(), 24);
        assert_eq!(g.two_torsion(), 4);
        // trivial group
        let t = AbelianGroup::from_relations(&[vec![1, 2], vec![0, 1]], 2);
        assert_eq!(t.order(), 1);
        assert!(t.invariants().is_empty());
    }

    #[test]
    fn generate_cyclic_mod_n() {
        // (Z/15)^* = Z/2 x Z/4
        let units: Vec<u64> = (1..15).filter(|x| num_integer::Integer::gcd(x, &15) == 1).collect();
        let g = generate(1u64, units.clone(), 8, |a, b| a * b % 15);
        let grp = AbelianGroup::from_relations(&g.relations, g.chosen.len());
        assert_eq!(grp.invariants(), &[2, 4]);
        for &a in &units {
            for &b in &units {
                let ca = grp.coords(&g.table[&a]);
                let cb = grp.coords(&g.table[&b]);
                assert_eq!(grp.add(&ca, &cb), grp.coords(&g.table[&(a * b % 15)]));
            }
        }
    }

    proptest! {
        #[test]
        fn snf_preserves_order_and_lattice(a in 1i64..30, b in -20i64..20, c in 1i64..30, d in -20i64..20) {
            let rel = vec![vec![a, b], vec![d, c]];
            let det = (a * c - b * d).abs();
            prop_assume!(det != 0);
            let g = AbelianGroup::from_relations(&rel, 2);
            prop_assert_eq!(g.order() as i64, det);
            for r in &rel {
                prop_assert!(g.coords(r).iter().all(|&x| x == 0));
            }
            for r in g.relation_basis() {
                prop_assert!(g.coords(&r).iter().all(|&x| x == 0));
            }
            let y: Vec<i64> = g.invariants().iter().map(|n| n - 1).collect();
            prop_assert_eq!(g.coords(&g.exponents(&y)), y);
        }
    }
}
