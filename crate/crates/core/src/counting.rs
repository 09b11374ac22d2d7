//! Counting relative quadratic extensions `K/k` with `N(disc(K/k)) <= Y`.
//!
//! Two engines: direct enumeration of pairs `(a, u)`, and the ray class
//! character sum. Both walk squarefree ideals by a DFS over prime ideals in
//! which every prime carries `p = theta_p * prod G_i^{y_i}`.

use crate::arith;
use crate::classgroup::{ClassGroup, Decomposer};
use crate::quadfield::{FieldElement, PrimeIdeal, QuadField, QuadIdeal, SplitKind};
use crate::rayclass::{RayCharacter, RayClassGroup};
use crate::selmer::{ExtensionDescriptor, GaloisType, Parametrization, Res4, Ring4};
use crate::{Error, Result};
use std::sync::Arc;

/// Extensions of each Galois type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TypeCounts {
    pub c4: u64,
    pub v4: u64,
    pub d4: u64,
}

impl TypeCounts {
    pub fn add(&mut self, t: GaloisType, n: u64) {
        match t {
            GaloisType::C4 => self.c4 += n,
            GaloisType::V4 => self.v4 += n,
            GaloisType::D4 => self.d4 += n,
        }
    }

    pub fn get(&self, t: GaloisType) -> u64 {
        match t {
            GaloisType::C4 => self.c4,
            GaloisType::V4 => self.v4,
            GaloisType::D4 => self.d4,
        }
    }

    pub fn total(&self) -> u64 {
        self.c4 + self.v4 + self.d4
    }

    pub fn merge(&mut self, o: &TypeCounts) {
        self.c4 += o.c4;
        self.v4 += o.v4;
        self.d4 += o.d4;
    }
}

#[derive(Clone, Debug)]
pub struct RelativeCountResult {
    pub field: QuadField,
    /// `floor(Y)`; norms are integers so this loses nothing.
    pub bound: u64,
    pub total: u64,
    pub by_type: TypeCounts,
    pub descriptors: Option<Vec<ExtensionDescriptor>>,
}

/// Descriptors are kept by default only for small bounds.
pub fn default_keep_descriptors(y: f64) -> bool {
    y <= 1e4
}

pub fn floor_bound(y: f64) -> Result<u64> {
    if !y.is_finite() || y < 1.0 {
        return Err(Error::InvalidArgument(format!("bound must be >= 1, got {y}")));
    }
    Ok(y.floor() as u64)
}

/// Per-prime data for the walk.
#[derive(Clone, Debug)]
pub struct PrimeEntry {
    pub prime: PrimeIdeal,
    pub norm: u64,
    /// Index of the conjugate prime in the table.
    pub conj: usize,
    /// Bit of the prime above 2, zero otherwise.
    pub two_bit: u8,
    pub theta: FieldElement,
    pub res: Res4,
    pub neg: bool,
    /// `y_i mod 2` over the class group invariants.
    pub class_parity: u32,
    /// Parity masks in each ray class group, zero when the prime meets the modulus.
    pub ray_parity: [u32; 4],
    /// Legendre bits at auxiliary primes, filled in by `attach_signatures`.
    pub sig: u64,
    pub sig_conj: u64,
}

/// Prime ideals up to a norm limit, sorted by norm.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    pub limit: u64,
    pub entries: Vec<PrimeEntry>,
}

/// A squarefree ideal reached by the walk.
#[derive(Clone, Copy, Debug)]
pub struct Node<'a> {
    pub norm: u64,
    pub res: Res4,
    pub neg: bool,
    pub class_parity: u32,
    pub ray_parity: [u32; 4],
    pub two_mask: u8,
    /// Squarefree kernel of the norm.
    pub kernel: u64,
    pub sig: u64,
    pub sig_conj: u64,
    pub path: &'a [usize],
}

/// The generator `rho_i` of `G_i^{n_i}` and its local data.
#[derive(Clone, Debug)]
struct RhoData {
    bit: u32,
    res: Res4,
    neg: bool,
    elem: FieldElement,
}

/// Auxiliary split primes `Q_j` used to name Selmer classes by Legendre
/// symbols; bit `j` of a signature is the symbol at `Q_j` (and at the
/// conjugate `Q_j'` for `sig_conj`).
#[derive(Clone, Debug)]
pub struct AuxPrimes {
    pub primes: Vec<(u64, i64, i64)>,
}

/// All per-field state shared by both engines.
#[derive(Clone, Debug)]
pub struct FieldEngine {
    par: Parametrization,
    dec: Arc<Decomposer>,
    rays: Vec<RayClassGroup>,
    ring: Ring4,
    even_class_mask: u32,
    odd_rho: Vec<RhoData>,
    unit_res: Vec<Res4>,
    unit_neg: Vec<bool>,
    disc_kernel: u64,
}

fn legendre_bit(x: &FieldElement, q: u64, root: i64) -> Option<u64> {
    let r = x.residue_at_root(q as i64, root)?;
    if r == 0 {
        return None;
    }
    Some(if arith::jacobi(r, q) == 1 { 0 } else { 1 })
}

impl FieldEngine {
    pub fn new(field: &QuadField) -> Result<Self> {
        let par = Parametrization::new(field);
        let cg = par.class_group().clone();
        let dec = Arc::new(Decomposer::new(cg.clone()));
        let mut rays = Vec::new();
        for d in &par.local().divisors {
            rays.push(RayClassGroup::new(dec.clone(), &d.ideal)?);
        }
        let grp = cg.group();
        let mut even_class_mask = 0u32;
        let mut odd_rho = Vec::new();
        for (i, (n, rel)) in grp.invariants().iter().zip(grp.smith_relations()).enumerate() {
            if n % 2 == 0 {
                even_class_mask |= 1 << i;
            } else {
                let elem = cg.relation_generator(&rel);
                let res = Ring4::residue(&elem).ok_or_else(|| Error::Invariant("relation generator meets 2".into()))?;
                odd_rho.push(RhoData { bit: 1 << i, res, neg: elem.norm_sign() < 0, elem });
            }
        }
        let mut unit_res = Vec::new();
        let mut unit_neg = Vec::new();
        for u in par.selmer().elements() {
            let e = par.selmer().element(u);
            unit_res.push(Ring4::residue(&e).ok_or_else(|| Error::Invariant("Selmer basis meets 2".into()))?);
            unit_neg.push(e.norm_sign() < 0);
        }
        let disc_kernel = arith::squarefree_part(field.disc().abs()) as u64;
        Ok(FieldEngine {
            ring: Ring4::new(field.disc()),
            par,
            dec,
            rays,
            even_class_mask,
            odd_rho,
            unit_res,
            unit_neg,
            disc_kernel,
        })
    }

    pub fn field(&self) -> &QuadField {
        self.par.field()
    }

    pub fn parametrization(&self) -> &Parametrization {
        &self.par
    }

    pub fn class_group(&self) -> &ClassGroup {
        self.par.class_group()
    }

    pub fn ray_groups(&self) -> &[RayClassGroup] {
        &self.rays
    }

    pub fn selmer_order(&self) -> usize {
        self.unit_res.len()
    }

    /// All prime ideals of norm at most `limit`.
    pub fn prime_table(&self, limit: u64) -> Result<PrimeTable> {
        let f = *self.field();
        let mut entries: Vec<PrimeEntry> = Vec::new();
        let two_primes = &self.par.local().primes;
        for p in arith::primes_up_to(limit) {
            let kind = f.splitting_type(p);
            if kind == SplitKind::Inert && p.saturating_mul(p) > limit {
                continue;
            }
            let above = f.primes_above(p);
            let base = entries.len();
            for (j, pr) in above.iter().enumerate() {
                let (y, theta) = self.dec.decompose(pr.ideal());
                let res =
                    Ring4::residue(&theta).ok_or_else(|| Error::Invariant("theta has even denominator".into()))?;
                let mut class_parity = 0u32;
                for (i, yi) in y.iter().enumerate() {
                    if yi % 2 != 0 {
                        class_parity |= 1 << i;
                    }
                }
                let mut ray_parity = [0u32; 4];
                for (rp, ray) in ray_parity.iter_mut().zip(&self.rays) {
                    if pr.ideal().is_coprime(ray.modulus()) {
                        let e = ray
                            .ideal_exponents(pr.ideal())
                            .ok_or_else(|| Error::Invariant("ray dlog failed".into()))?;
                        *rp = ray.parity_mask(&ray.group().coords(&e));
                    }
                }
                let two_bit = match two_primes.iter().position(|q| q.ideal() == pr.ideal()) {
                    Some(i) => 1 << i,
                    None => 0,
                };
                let conj = if above.len() == 2 { base + 1 - j } else { base };
                entries.push(PrimeEntry {
                    norm: pr.norm(),
                    prime: pr.clone(),
                    conj,
                    two_bit,
                    neg: theta.norm_sign() < 0,
                    theta,
                    res,
                    class_parity,
                    ray_parity,
                    sig: 0,
                    sig_conj: 0,
                });
            }
        }
        // inert primes have norm p^2 and must be moved into norm order
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by_key(|&i| (entries[i].norm, entries[i].prime.ideal().sort_key()));
        let mut pos = vec![0usize; entries.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut sorted: Vec<PrimeEntry> = order.iter().map(|&i| entries[i].clone()).collect();
        for e in sorted.iter_mut() {
            e.conj = pos[e.conj];
        }
        Ok(PrimeTable { limit, entries: sorted })
    }

    /// Choose split primes above `table.limit`, prime to every `theta`,
    /// `rho` and Selmer representative, whose Legendre symbols separate the
    /// Selmer group; then fill in the signatures of the table.
    pub fn attach_signatures(&self, table: &mut PrimeTable) -> Result<AuxPrimes> {
        let f = *self.field();
        let basis = self.par.selmer().basis().to_vec();
        let need = basis.len();
        let mut chosen: Vec<(u64, i64, i64)> = Vec::new();
        // rows of the Selmer basis signature matrix, reduced
        let mut echelon: Vec<u64> = Vec::new();
        let mut q = table.limit.max(50) + 1;
        let mut guard = 0;
        while echelon.len() < need || chosen.len() < need.max(1) {
            q += 1;
            guard += 1;
            if guard > 1_000_000 || chosen.len() >= 60 {
                return Err(Error::Invariant("no separating auxiliary primes".into()));
            }
            if !arith::is_prime(q) || f.splitting_type(q) != SplitKind::Split {
                continue;
            }
            let above = f.primes_above(q);
            let (r1, r2) = (above[0].omega_root(), above[1].omega_root());
            let mut col = 0u64;
            let mut ok = true;
            for (i, b) in basis.iter().enumerate() {
                match legendre_bit(b, q, r1) {
                    Some(bit) => col |= bit << i,
                    None => ok = false,
                }
                ok &= legendre_bit(b, q, r2).is_some();
            }
            ok &= self
                .odd_rho
                .iter()
                .all(|r| legendre_bit(&r.elem, q, r1).is_some() && legendre_bit(&r.elem, q, r2).is_some());
            ok &= table
                .entries
                .iter()
                .all(|e| legendre_bit(&e.theta, q, r1).is_some() && legendre_bit(&e.theta, q, r2).is_some());
            if !ok {
                continue;
            }
            // keep the prime if it adds rank, or once the rank is complete
            let mut v = col;
            for &row in &echelon {
                let top = 63 - row.leading_zeros();
                if v >> top & 1 == 1 {
                    v ^= row;
                }
            }
            if v != 0 {
                echelon.push(v);
                echelon.sort_by(|a, b| b.cmp(a));
                chosen.push((q, r1, r2));
            } else if echelon.len() >= need {
                chosen.push((q, r1, r2));
            }
        }
        // the columns give a map S -> F_2^J; injective once rank is full
        let sig_of = |x: &FieldElement, conj: bool| -> u64 {
            let mut s = 0u64;
            for (j, &(q, r1, r2)) in chosen.iter().enumerate() {
                let root = if conj { r2 } else { r1 };
                s |= legendre_bit(x, q, root).expect("checked above") << j;
            }
            s
        };
        for e in table.entries.iter_mut() {
            e.sig = sig_of(&e.theta, false);
            e.sig_conj = sig_of(&e.theta, true);
        }
        Ok(AuxPrimes { primes: chosen })
    }

    /// Legendre signature of a field element at the auxiliary primes.
    pub fn signature(&self, aux: &AuxPrimes, x: &FieldElement, conj: bool) -> u64 {
        let mut s = 0u64;
        for (j, &(q, r1, r2)) in aux.primes.iter().enumerate() {
            let root = if conj { r2 } else { r1 };
            s |= legendre_bit(x, q, root).expect("auxiliary prime divides element") << j;
        }
        s
    }

    pub fn odd_rho_signatures(&self, aux: &AuxPrimes) -> Vec<(u32, u64, u64)> {
        self.odd_rho
            .iter()
            .map(|r| (r.bit, self.signature(aux, &r.elem, false), self.signature(aux, &r.elem, true)))
            .collect()
    }

    pub fn selmer_signatures(&self, aux: &AuxPrimes) -> Vec<(u64, u64)> {
        self.par
            .selmer()
            .elements()
            .map(|u| {
                let e = self.par.selmer().element(u);
                (self.signature(aux, &e, false), self.signature(aux, &e, true))
            })
            .collect()
    }

    /// Depth-first walk over squarefree ideals of norm at most `limit`.
    pub fn walk_squarefree(&self, table: &PrimeTable, limit: u64, visit: &mut dyn FnMut(&Node<'_>)) {
        assert!(limit <= table.limit, "prime table too small");
        let mut path = Vec::new();
        let root = NodeState {
            norm: 1,
            res: 1,
            neg: false,
            class_parity: 0,
            ray_parity: [0; 4],
            two_mask: 0,
            kernel: 1,
            sig: 0,
            sig_conj: 0,
        };
        self.dfs(table, limit, 0, root, &mut path, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        table: &PrimeTable,
        limit: u64,
        start: usize,
        st: NodeState,
        path: &mut Vec<usize>,
        visit: &mut dyn FnMut(&Node<'_>),
    ) {
        visit(&st.node(path));
        for i in start..table.entries.len() {
            let e = &table.entries[i];
            let Some(norm) = st.norm.checked_mul(e.norm) else { break };
            if norm > limit {
                break;
            }
            let mut next = st;
            next.norm = norm;
            next.res = self.ring.mul(st.res, e.res);
            next.neg ^= e.neg;
            next.class_parity ^= e.class_parity;
            for (a, b) in next.ray_parity.iter_mut().zip(e.ray_parity) {
                *a ^= b;
            }
            next.two_mask |= e.two_bit;
            next.sig ^= e.sig;
            next.sig_conj ^= e.sig_conj;
            let p = e.prime.p;
            if e.prime.kind != SplitKind::Inert {
                if next.kernel.is_multiple_of(p) {
                    next.kernel /= p;
                } else {
                    next.kernel *= p;
                }
            }
            path.push(i);
            self.dfs(table, limit, i + 1, next, path, visit);
            path.pop();
        }
    }

    /// Whether the class of the node lies in `Cl(k)^2`.
    pub fn in_square_class(&self, node: &Node<'_>) -> bool {
        node.class_parity & self.even_class_mask == 0
    }

    /// Residue, norm sign and signatures of `alpha0` for a node in the
    /// square class; `alpha0` is fixed up to `V(k) (k*)^2`.
    pub fn alpha0_data(&self, node: &Node<'_>, rho_sigs: Option<&[(u32, u64, u64)]>) -> (Res4, bool, u64, u64) {
        let mut res = node.res;
        let mut neg = node.neg;
        let mut sig = node.sig;
        let mut sig_conj = node.sig_conj;
        for (k, r) in self.odd_rho.iter().enumerate() {
            if node.class_parity & r.bit != 0 {
                res = self.ring.mul(res, r.res);
                neg ^= r.neg;
                if let Some(s) = rho_sigs {
                    sig ^= s[k].1;
                    sig_conj ^= s[k].2;
                }
            }
        }
        (res, neg, sig, sig_conj)
    }

    pub fn galois_type(&self, neg: bool, kernel: u64) -> GaloisType {
        if !neg && kernel == 1 {
            GaloisType::V4
        } else if kernel == self.disc_kernel && neg == (self.field().disc() < 0) {
            GaloisType::C4
        } else {
            GaloisType::D4
        }
    }

    /// Extensions contributed by one node: `(u, N(rel disc), type)` for every
    /// nontrivial pair with relative norm at most `bound`.
    pub fn node_extensions(&self, node: &Node<'_>, bound: u64, out: &mut dyn FnMut(usize, u64, GaloisType)) {
        if !self.in_square_class(node) {
            return;
        }
        let (res, neg, _, _) = self.alpha0_data(node, None);
        let local = self.par.local();
        for (u, (&ru, &nu)) in self.unit_res.iter().zip(&self.unit_neg).enumerate() {
            if node.norm == 1 && u == 0 {
                continue;
            }
            let r = self.ring.mul(res, ru);
            let c = &local.divisors[local.conductor_index(node.two_mask, r)];
            let rel = 16 * node.norm / (c.norm * c.norm);
            if rel <= bound {
                out(u, rel, self.galois_type(neg ^ nu, node.kernel));
            }
        }
    }

    /// Direct enumeration engine.
    pub fn count_direct(&self, y: f64, keep_descriptors: bool) -> Result<RelativeCountResult> {
        let bound = floor_bound(y)?;
        let table = self.prime_table(bound)?;
        self.count_direct_with(&table, bound, keep_descriptors)
    }

    pub fn count_direct_with(&self, table: &PrimeTable, bound: u64, keep: bool) -> Result<RelativeCountResult> {
        let mut by_type = TypeCounts::default();
        let mut descriptors = if keep { Some(Vec::new()) } else { None };
        let mut failure: Option<Error> = None;
        self.walk_squarefree(table, bound, &mut |node| {
            let mut fast: Vec<(u64, GaloisType)> = Vec::new();
            self.node_extensions(node, bound, &mut |_, rel, t| {
                by_type.add(t, 1);
                fast.push((rel, t));
            });
            if let Some(list) = descriptors.as_mut() {
                if failure.is_some() || !self.in_square_class(node) {
                    return;
                }
                match self.exact_descriptors(table, node, bound) {
                    Ok(mut exact) => {
                        let mut a: Vec<(u64, GaloisType)> =
                            exact.iter().map(|d| (d.rel_disc_norm, d.galois_type)).collect();
                        a.sort();
                        fast.sort();
                        if a != fast {
                            failure = Some(Error::Invariant(format!(
                                "direct engine paths disagree at disc {} norm {}",
                                self.field().disc(),
                                node.norm
                            )));
                        }
                        list.append(&mut exact);
                    }
                    Err(e) => failure = Some(e),
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(RelativeCountResult { field: *self.field(), bound, total: by_type.total(), by_type, descriptors })
    }

    /// The ideal of a node, as a product of its primes.
    pub fn node_ideal(&self, table: &PrimeTable, path: &[usize]) -> QuadIdeal {
        path.iter().fold(self.field().unit_ideal(), |acc, &i| acc.mul(table.entries[i].prime.ideal()))
    }

    fn exact_descriptors(&self, table: &PrimeTable, node: &Node<'_>, bound: u64) -> Result<Vec<ExtensionDescriptor>> {
        let a = self.node_ideal(table, node.path);
        let mut out = Vec::new();
        for u in self.par.selmer().elements() {
            let desc = self.par.describe(&a, u)?;
            if !desc.is_trivial() && desc.rel_disc_norm <= bound {
                out.push(desc);
            }
        }
        Ok(out)
    }

    /// Character-sum engine.
    pub fn count_characters(&self, y: f64) -> Result<i128> {
        let bound = floor_bound(y)?;
        let table = self.prime_table(bound)?;
        self.count_characters_with(&table, bound)
    }

    pub fn count_characters_with(&self, table: &PrimeTable, bound: u64) -> Result<i128> {
        let local = self.par.local();
        let nd = local.divisors.len();
        // hist[j][t][mask]: squarefree a prime to d_j, N(a) <= 4^t Y / 16
        let mut hist: Vec<[Vec<u64>; 3]> = self
            .rays
            .iter()
            .map(|g| {
                let n = g.quadratic_characters().len();
                [vec![0u64; n], vec![0u64; n], vec![0u64; n]]
            })
            .collect();
        let limits: [u64; 3] = [bound / 16, bound / 4, bound];
        self.walk_squarefree(table, bound, &mut |node| {
            for (j, h) in hist.iter_mut().enumerate() {
                if node.two_mask & local.divisors[j].mask != 0 {
                    continue;
                }
                for (t, lim) in limits.iter().enumerate() {
                    if node.norm <= *lim {
                        h[t][node.ray_parity[j] as usize] += 1;
                    }
                }
            }
        });
        let mut four_s: i128 = 0;
        for j in 0..nd {
            let nd_norm = local.divisors[j].norm as i128;
            let mut inner: i128 = 0;
            for chi in self.rays[j].quadratic_characters() {
                for i in 0..nd {
                    let Some(mu) = local.mobius_quotient(j, i) else { continue };
                    if mu == 0 {
                        continue;
                    }
                    let t = local.divisors[i].norm.trailing_zeros() as usize;
                    let s: i128 = hist[j][t]
                        .iter()
                        .enumerate()
                        .map(|(mask, &c)| chi.on_parity(mask as u32) as i128 * c as i128)
                        .sum();
                    inner += mu as i128 * s;
                }
            }
            four_s += 4 / nd_norm * inner;
        }
        let f = self.field();
        let scale = 1i128 << (f.r1() + f.r2());
        let num = scale * four_s;
        if num % 4 != 0 {
            return Err(Error::Invariant(format!("character sum not integral for disc {}", f.disc())));
        }
        Ok(num / 4 - 1)
    }
}

#[derive(Clone, Copy, Debug)]
struct NodeState {
    norm: u64,
    res: Res4,
    neg: bool,
    class_parity: u32,
    ray_parity: [u32; 4],
    two_mask: u8,
    kernel: u64,
    sig: u64,
    sig_conj: u64,
}

impl NodeState {
    fn node<'a>(&self, path: &'a [usize]) -> Node<'a> {
        Node {
            norm: self.norm,
            res: self.res,
            neg: self.neg,
            class_parity: self.class_parity,
            ray_parity: self.ray_parity,
            two_mask: self.two_mask,
            kernel: self.kernel,
            sig: self.sig,
            sig_conj: self.sig_conj,
            path,
        }
    }
}

pub fn count_relative_direct(k: &QuadField, y: f64, keep_descriptors: bool) -> Result<RelativeCountResult> {
    FieldEngine::new(k)?.count_direct(y, keep_descriptors)
}

pub fn count_relative_characters(k: &QuadField, y: f64) -> Result<u64> {
    let n = FieldEngine::new(k)?.count_characters(y)?;
    u64::try_from(n).map_err(|_| Error::Invariant(format!("negative count {n}")))
}

/// `#{u in S : x^2 = alpha0 u mod c^2 solvable}`.
pub fn selmer_solvability_count(par: &Parametrization, a: &QuadIdeal, c: &QuadIdeal) -> Result<u64> {
    if !a.is_coprime(c) {
        return Err(Error::InvalidArgument("a and c must be coprime".into()));
    }
    let local = par.local();
    let div = local
        .divisors
        .iter()
        .find(|d| &d.ideal == c)
        .ok_or_else(|| Error::InvalidArgument("c must divide 2".into()))?;
    let (alpha0, _) = par.alpha0_for(a)?;
    let mut n = 0;
    for u in par.selmer().elements() {
        let r = Ring4::residue(&(&alpha0 * &par.selmer().element(u))).expect("2-integral");
        if div.square_ok[r as usize] {
            n += 1;
        }
    }
    Ok(n)
}

/// `2^{r1+r2} |Cl_{c^2}[2]| / N(c)` when `a` is a square in `Cl_{c^2}`, else 0.
pub fn selmer_solvability_closed_form(ray: &RayClassGroup, a: &QuadIdeal) -> Result<u64> {
    let f = ray.field();
    let c = ray.d();
    let coords = ray.dlog(a).ok_or_else(|| Error::InvalidArgument("a meets the modulus".into()))?;
    if !ray.group().is_square(&coords) {
        return Ok(0);
    }
    let num = (1u64 << (f.r1() + f.r2())) * ray.two_torsion();
    if !num.is_multiple_of(c.norm()) {
        return Err(Error::Invariant("closed form is not integral".into()));
    }
    Ok(num / c.norm())
}

/// `(norm, chi(a), number of prime factors)` for every integral ideal of
/// norm at most `x` (only squarefree ones if asked), sorted.
fn character_table(chi: &RayCharacter<'_>, x: u64, squarefree: bool) -> Vec<(u64, i32, u32)> {
    let f = *chi.group().field();
    let mut primes: Vec<(u64, i32)> = Vec::new();
    for p in arith::primes_up_to(x) {
        for pr in f.primes_above(p) {
            if pr.norm() <= x {
                primes.push((pr.norm(), chi.evaluate(pr.ideal())));
            }
        }
    }
    primes.sort_by_key(|e| e.0);
    struct Walk<'p> {
        primes: &'p [(u64, i32)],
        x: u64,
        squarefree: bool,
        out: Vec<(u64, i32, u32)>,
    }
    impl Walk<'_> {
        fn rec(&mut self, start: usize, norm: u64, val: i32, count: u32) {
            self.out.push((norm, val, count));
            for i in start..self.primes.len() {
                let (pn, pv) = self.primes[i];
                let Some(mut n) = norm.checked_mul(pn) else { break };
                if n > self.x {
                    break;
                }
                let (mut v, mut c) = (val * pv, count + 1);
                loop {
                    self.rec(i + 1, n, v, c);
                    if self.squarefree {
                        break;
                    }
                    match n.checked_mul(pn) {
                        Some(m) if m <= self.x => {
                            n = m;
                            v *= pv;
                            c += 1;
                        }
                        _ => break,
                    }
                }
            }
        }
    }
    let mut w = Walk { primes: &primes, x, squarefree, out: Vec::new() };
    w.rec(0, 1, 1, 0);
    let mut out = w.out;
    out.sort_unstable();
    out
}

/// `sum_{N(a) <= X} chi(a)` over all integral ideals.
pub fn char_sum(chi: &RayCharacter<'_>, x: f64) -> Result<i64> {
    let b = floor_bound(x)?;
    Ok(character_table(chi, b, false).iter().map(|e| e.1 as i64).sum())
}

/// `sum chi(a)` over squarefree `a` with `N(a) <= X`, summed directly.
pub fn char_sum_squarefree(chi: &RayCharacter<'_>, x: f64) -> Result<i64> {
    let b = floor_bound(x)?;
    Ok(character_table(chi, b, true).iter().map(|e| e.1 as i64).sum())
}

/// The same sum through `sum_{N(d)^2 <= X} mu(d) chi(d)^2 char_sum(chi, X/N(d)^2)`.
pub fn char_sum_squarefree_mobius(chi: &RayCharacter<'_>, x: f64) -> Result<i64> {
    let b = floor_bound(x)?;
    let all = character_table(chi, b, false);
    let mut prefix = Vec::with_capacity(all.len());
    let mut acc = 0i64;
    for &(n, v, _) in &all {
        acc += v as i64;
        prefix.push((n, acc));
    }
    let sum_upto = |y: u64| -> i64 {
        match prefix.partition_point(|&(n, _)| n <= y) {
            0 => 0,
            i => prefix[i - 1].1,
        }
    };
    let mut total = 0i64;
    for (n, v, count) in character_table(chi, arith::isqrt(b), true) {
        if v == 0 {
            continue;
        }
        let mu = if count % 2 == 0 { 1 } else { -1 };
        total += mu * sum_upto(b / (n * n));
    }
    Ok(total)
}

#[cfg(test)]
mod tests;
