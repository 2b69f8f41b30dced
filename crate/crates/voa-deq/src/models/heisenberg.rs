//! The rank-one Heisenberg (free boson) algebra `M(1)` and its Fock modules
//! `M(1, q)`, together with the exact free-field vertex operator
//!
//!   Y(|q1>, z) = exp(q1 sum_{n>=1} a_{-n} z^n / n)
//!                exp(-q1 sum_{n>=1} a_n z^{-n} / n) z^{q1 a_0},
//!
//! extended to all of `M(1, q1)` by the iterate formula. This gives exact
//! matrix-element series of products of intertwining operators, used as an
//! independent check of the derivation pipeline.

use super::{multiplicities, partitions_up_to};
use crate::laurent::qpow;
use crate::module::{BasisVec, Construction, Gen, ModuleData, Pairing, Rep, VOAData, Vect};
use crate::q::{binom, factorial, neg_one_pow, qi, Q};
use crate::series::{Region, RegionSeries};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// One Fock module together with its partition labels.
pub struct Fock {
    pub rep: Arc<Rep>,
    pub lambda: Q,
    pub depth: i64,
    /// `lambda^2 / 2`, the lowest weight.
    pub base: Q,
    pub parts: Vec<Vec<i64>>,
    pub index: HashMap<Vec<i64>, usize>,
}

struct HeisAction {
    lambda: Q,
    parts: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl crate::module::GenAction for HeisAction {
    fn act(&self, _gen: usize, n: i64, idx: usize) -> Result<Vect> {
        let p = &self.parts[idx];
        if n < 0 {
            let q = insert_part(p, -n);
            Ok(Vect::basis(self.index[&q]))
        } else if n == 0 {
            Ok(Vect::basis(idx).scale(&self.lambda))
        } else {
            let count = p.iter().filter(|&&r| r == n).count() as i64;
            if count == 0 {
                return Ok(Vect::zero());
            }
            let q = remove_part(p, n);
            Ok(Vect::basis(self.index[&q]).scale(&qi(n * count)))
        }
    }
}

fn insert_part(p: &[i64], r: i64) -> Vec<i64> {
    let mut q = p.to_vec();
    let pos = q.partition_point(|&x| x > r);
    q.insert(pos, r);
    q
}

fn remove_part(p: &[i64], r: i64) -> Vec<i64> {
    let mut q = p.to_vec();
    let pos = q.iter().position(|&x| x == r).expect("part present");
    q.remove(pos);
    q
}

fn fock_module_data(name: &str, lambda: &Q, depth: i64) -> (ModuleData, Vec<Vec<i64>>, HashMap<Vec<i64>, usize>) {
    let parts = partitions_up_to(depth, 1);
    let index: HashMap<Vec<i64>, usize> =
        parts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let base = lambda * lambda / qi(2);
    let basis: Vec<BasisVec> = parts
        .iter()
        .map(|p| {
            let level: i64 = p.iter().sum();
            let mut nm = String::new();
            for r in p {
                nm.push_str(&format!("a(-{})", r));
            }
            nm.push_str(&format!("|{}>", crate::q::q_str(lambda)));
            let construction = if p.is_empty() {
                Construction::Lowest(0)
            } else {
                Construction::Apply { gen: 0, m: p[0], sub: index[&p[1..].to_vec()] }
            };
            BasisVec { weight: &base + qi(level), name: nm, construction }
        })
        .collect();
    let md = ModuleData::new(name, basis, &base + qi(depth));
    (md, parts, index)
}

/// Build the Heisenberg algebra `M(1)` (acting on itself) up to weight `depth`.
pub fn build_heisenberg(depth: i64) -> Arc<Fock> {
    assert!(depth >= 2, "need at least weight 2 for the conformal vector");
    let (md, parts, index) = fock_module_data("M(1)", &Q::zero(), depth);
    let mut omega = Vect::zero();
    omega.add_term(index[&vec![1, 1]], crate::q::qr(1, 2));
    let voa = Arc::new(VOAData {
        module: md.clone(),
        vacuum: index[&Vec::new()],
        omega,
        central_charge: Q::one(),
        gens: vec![Gen { name: "a".into(), weight: 1 }],
    });
    let action = HeisAction { lambda: Q::zero(), parts: parts.clone(), index: index.clone() };
    let rep = Arc::new(Rep::new(voa, None, md, Box::new(action)));
    Arc::new(Fock { rep, lambda: Q::zero(), depth, base: Q::zero(), parts, index })
}

/// Build the Fock module `M(1, lambda)` over a previously built `M(1)`.
pub fn build_fock(heis: &Arc<Fock>, lambda: &Q, depth: i64) -> Arc<Fock> {
    let name = format!("M(1,{})", crate::q::q_str(lambda));
    let (md, parts, index) = fock_module_data(&name, lambda, depth);
    let action = HeisAction { lambda: lambda.clone(), parts: parts.clone(), index: index.clone() };
    let rep = Arc::new(Rep::new(
        heis.rep.voa.clone(),
        Some(heis.rep.clone()),
        md,
        Box::new(action),
    ));
    Arc::new(Fock {
        rep,
        lambda: lambda.clone(),
        depth,
        base: lambda * lambda / qi(2),
        parts,
        index,
    })
}

/// The free-field intertwining operator `M(1,q1) x M(1,q2) -> M(1,q1+q2)`,
/// with results indexed by the level (weight above the lowest weight) of the
/// target component. The `z`-exponent of the level-`L` component of
/// `Y(w1, z) w2` is `base_tgt + L - wt(w1) - wt(w2)`.
pub struct FockVertex {
    pub src: Arc<Fock>,
    pub dom: Arc<Fock>,
    pub tgt: Arc<Fock>,
    /// creation clouds: (partition, coefficient) for
    /// exp(q1 sum a_{-n} z^n / n), by level of the partition
    creation: Vec<(Vec<i64>, Q)>,
    cache: Mutex<HashMap<(usize, usize), BTreeMap<i64, Vect>>>,
}

impl FockVertex {
    pub fn new(src: Arc<Fock>, dom: Arc<Fock>, tgt: Arc<Fock>) -> Result<Self> {
        if &src.lambda + &dom.lambda != tgt.lambda {
            return Err(Error::Input(format!(
                "charge mismatch: {} + {} != {}",
                crate::q::q_str(&src.lambda),
                crate::q::q_str(&dom.lambda),
                crate::q::q_str(&tgt.lambda)
            )));
        }
        let mut creation = Vec::new();
        for p in partitions_up_to(tgt.depth, 1) {
            let mut c = Q::one();
            for (r, k) in multiplicities(&p) {
                c *= qpow(&src.lambda, k).unwrap()
                    / (qpow(&qi(r), k).unwrap() * factorial(k as u32));
            }
            if !c.is_zero() {
                creation.push((p, c));
            }
        }
        Ok(Self { src, dom, tgt, creation, cache: Mutex::new(HashMap::new()) })
    }

    /// `Y(w1, z) w2` by target level, complete through the target depth.
    pub fn apply(&self, w1: &Vect, w2: &Vect) -> Result<BTreeMap<i64, Vect>> {
        let mut out: BTreeMap<i64, Vect> = BTreeMap::new();
        for (i1, c1) in &w1.0 {
            for (i2, c2) in &w2.0 {
                let part = self.apply_basis(*i1, *i2)?;
                let c = c1 * c2;
                for (lev, v) in part {
                    out.entry(lev).or_insert_with(Vect::zero).add_scaled(&v, &c);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    fn apply_basis(&self, w1_idx: usize, w2_idx: usize) -> Result<BTreeMap<i64, Vect>> {
        let key = (w1_idx, w2_idx);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let p1 = self.src.parts[w1_idx].clone();
        let out = if p1.is_empty() {
            self.apply_lowest(w2_idx)?
        } else {
            self.apply_composite(&p1, w2_idx)?
        };
        self.cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// Base case: the exponential formula applied to one basis monomial.
    fn apply_lowest(&self, w2_idx: usize) -> Result<BTreeMap<i64, Vect>> {
        let lam1 = &self.src.lambda;
        let p2 = &self.dom.parts[w2_idx];
        let mults = multiplicities(p2);
        // annihilation choices: remove j_r of the c_r parts of size r, with
        // coefficient prod (-lam1)^{j_r} C(c_r, j_r)
        let mut survivors: Vec<(Vec<i64>, Q)> = vec![(Vec::new(), Q::one())];
        for (r, c) in &mults {
            let mut next = Vec::new();
            for (kept, coeff) in &survivors {
                for j in 0..=*c {
                    let mut k2 = kept.clone();
                    for _ in 0..(c - j) {
                        k2.push(*r);
                    }
                    let cf = coeff
                        * qpow(&-lam1.clone(), j).unwrap()
                        * binom(*c, j as u32);
                    if !cf.is_zero() {
                        next.push((k2, cf));
                    }
                }
            }
            survivors = next;
        }
        let mut out: BTreeMap<i64, Vect> = BTreeMap::new();
        for (kept, coeff) in survivors {
            let mut kept = kept;
            kept.sort();
            kept.reverse();
            let lev_kept: i64 = kept.iter().sum();
            for (rho, cc) in &self.creation {
                let lev_rho: i64 = rho.iter().sum();
                if lev_kept + lev_rho > self.tgt.depth {
                    continue;
                }
                let mut merged = kept.clone();
                merged.extend_from_slice(rho);
                merged.sort();
                merged.reverse();
                let idx = self.tgt.index[&merged];
                out.entry(lev_kept + lev_rho)
                    .or_insert_with(Vect::zero)
                    .add_term(idx, &coeff * cc);
            }
        }
        Ok(out)
    }

    /// Iterate step: `w1 = a_{-m} sub`, using
    /// `Y(a_{-m} v, z) = sum_j C(-m,j) ( (-z)^j a_{-m-j} Y(v,z)
    ///                                 - (-z)^{-m-j} Y(v,z) a_j )`.
    fn apply_composite(&self, p1: &[i64], w2_idx: usize) -> Result<BTreeMap<i64, Vect>> {
        let m = p1[0];
        let sub_idx = self.src.index[&p1[1..].to_vec()];
        let s = self.apply_basis(sub_idx, w2_idx)?;
        let mut out: BTreeMap<i64, Vect> = BTreeMap::new();
        // first sum: creation a_{-m-j} with exponent shift +j, level shift m+j
        for (lev_s, vec) in &s {
            let mut j: i64 = 0;
            while lev_s + m + j <= self.tgt.depth {
                let c = binom(-m, j as u32) * neg_one_pow(j);
                let moved = self.create_part(vec, m + j);
                out.entry(lev_s + m + j).or_insert_with(Vect::zero).add_scaled(&moved, &c);
                j += 1;
            }
        }
        // second sum: Y(v,z) a_j w2, with C(-m,j) (-1)^{m+j+1}
        let lev_w2: i64 = self.dom.parts[w2_idx].iter().sum();
        for j in 0..=lev_w2 {
            let ajw = self.dom.rep.gen_mode(0, j, w2_idx)?;
            if ajw.is_zero() {
                continue;
            }
            let c = binom(-m, j as u32) * neg_one_pow(m + j + 1);
            for (i2, c2) in &ajw.0 {
                for (lev, v) in self.apply_basis(sub_idx, *i2)? {
                    out.entry(lev).or_insert_with(Vect::zero).add_scaled(&v, &(&c * c2));
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    fn create_part(&self, v: &Vect, r: i64) -> Vect {
        let mut out = Vect::zero();
        for (idx, c) in &v.0 {
            let q = insert_part(&self.tgt.parts[*idx], r);
            out.add_term(self.tgt.index[&q], c.clone());
        }
        out
    }
}

/// A family of Fock modules over one Heisenberg algebra, with exact
/// matrix-element series of products/iterates of intertwining operators.
pub struct FockSystem {
    pub depth: i64,
    pub heis: Arc<Fock>,
    modules: Mutex<HashMap<Q, Arc<Fock>>>,
}

impl FockSystem {
    pub fn new(depth: i64) -> Self {
        let heis = build_heisenberg(depth);
        let mut m = HashMap::new();
        m.insert(Q::zero(), heis.clone());
        Self { depth, heis, modules: Mutex::new(m) }
    }

    pub fn module(&self, lambda: &Q) -> Arc<Fock> {
        let mut mods = self.modules.lock().unwrap();
        mods.entry(lambda.clone())
            .or_insert_with(|| build_fock(&self.heis, lambda, self.depth))
            .clone()
    }

    /// Matrix element `< w0, Y(w1, z1) Y(w2, z2) w3 >` (or its iterate /
    /// reversed-order counterpart, by region), as an exact truncated series.
    /// The slot charges must satisfy `q0 + q1 + q2 + q3 = 0`; the pairing is
    /// the contragredient pairing `M(1,q0) x M(1,-q0) -> Q`.
    pub fn corr(
        &self,
        region: Region,
        charges: &[Q; 4],
        vects: &[&Vect; 4],
    ) -> Result<RegionSeries> {
        if charges.iter().fold(Q::zero(), |a, b| a + b) != Q::zero() {
            return Err(Error::Input("slot charges must sum to zero".into()));
        }
        let m0 = self.module(&charges[0]);
        let m1 = self.module(&charges[1]);
        let m2 = self.module(&charges[2]);
        let m3 = self.module(&charges[3]);
        let wt = |m: &Arc<Fock>, v: &Vect| m.rep.module.weight_of(v);
        let w0t = wt(&m0, vects[0])?;
        let w1t = wt(&m1, vects[1])?;
        let w2t = wt(&m2, vects[2])?;
        let w3t = wt(&m3, vects[3])?;
        let mb = self.module(&(&charges[1] + &charges[2] + &charges[3]));
        let pairing = Pairing::build(&m0.rep, &mb.rep, &[(0, 0, Q::one())])?;
        let out_lev = &w0t - &mb.base;
        let Some(out_lev) = crate::q::to_i64(&out_lev) else {
            // the out-state weight never occurs in the target module
            return Ok(RegionSeries::empty(region, qi(self.depth)));
        };
        match region {
            Region::Product | Region::Reversed => {
                // Product: inner = Y(w2,z2) w3; Reversed: inner = Y(w1,z1) w3
                let (fa, wa, fb, wb, inner_wts) = match region {
                    Region::Product => (&m2, vects[2], &m1, vects[1], (&w2t, &w3t, &w1t)),
                    _ => (&m1, vects[1], &m2, vects[2], (&w1t, &w3t, &w2t)),
                };
                let ma = self.module(&(&fa.lambda + &charges[3]));
                let va = FockVertex::new(fa.clone(), m3.clone(), ma.clone())?;
                let vb = FockVertex::new(fb.clone(), ma.clone(), mb.clone())?;
                let small_cut = &ma.base + qi(self.depth) - inner_wts.0 - inner_wts.1;
                let mut series = RegionSeries::empty(region, small_cut);
                for (lev_a, vec_a) in va.apply(wa, vects[3])? {
                    let outer = vb.apply(wb, &vec_a)?;
                    let Some(comp) = outer.get(&out_lev) else { continue };
                    let c = pairing.pair(&m0.rep, &mb.rep, vects[0], comp);
                    if c.is_zero() {
                        continue;
                    }
                    let d_a = &ma.base + qi(lev_a);
                    let e_small = &d_a - inner_wts.0 - inner_wts.1;
                    let e_big = &w0t - inner_wts.2 - &d_a;
                    series.add_term(e_big, e_small, c);
                }
                Ok(series)
            }
            Region::Iterate => {
                let mi = self.module(&(&charges[1] + &charges[2]));
                let vi = FockVertex::new(m1.clone(), m2.clone(), mi.clone())?;
                let vo = FockVertex::new(mi.clone(), m3.clone(), mb.clone())?;
                let small_cut = &mi.base + qi(self.depth) - &w1t - &w2t;
                let mut series = RegionSeries::empty(region, small_cut);
                for (lev_i, vec_i) in vi.apply(vects[1], vects[2])? {
                    let outer = vo.apply(&vec_i, vects[3])?;
                    let Some(comp) = outer.get(&out_lev) else { continue };
                    let c = pairing.pair(&m0.rep, &mb.rep, vects[0], comp);
                    if c.is_zero() {
                        continue;
                    }
                    let d_i = &mi.base + qi(lev_i);
                    let e_small = &d_i - &w1t - &w2t;
                    let e_big = &w0t - &d_i - &w3t;
                    series.add_term(e_big, e_small, c);
                }
                Ok(series)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::check_axioms;
    use crate::q::qr;
    use crate::series::gen_monomial_series;

    #[test]
    fn heisenberg_axioms() {
        let h = build_heisenberg(5);
        check_axioms(&h.rep, &qi(3), 2).unwrap();
        // [L_2, L_{-2}] = 4 L_0 + c/2 on the vacuum: L_2 L_{-2} |0> = c/2 |0>
        let vac = Vect::basis(h.index[&Vec::new()]);
        let x = h.rep.l(-2, &vac).unwrap();
        let y = h.rep.l(2, &x).unwrap();
        assert_eq!(y, vac.scale(&qr(1, 2)));
    }

    #[test]
    fn fock_module_action() {
        let h = build_heisenberg(4);
        let lam = qr(3, 2);
        let f = build_fock(&h, &lam, 4);
        check_axioms(&f.rep, &qi(3), 2).unwrap();
        let low = Vect::basis(f.index[&Vec::new()]);
        // a_0 acts by the charge, L_0 by lam^2/2
        assert_eq!(f.rep.gen_mode_vect(0, 0, &low).unwrap(), low.scale(&lam));
        assert_eq!(f.rep.l(0, &low).unwrap(), low.scale(&qr(9, 8)));
    }

    #[test]
    fn adjoint_modes() {
        // a*_n = -a_{-n} and L(m)* = L(-m) under the adjoint-mode formula
        let h = build_heisenberg(6);
        let lam = qi(1);
        let f = build_fock(&h, &lam, 6);
        let a_idx = h.index[&vec![1]];
        let a = Vect::basis(a_idx);
        let w = Vect::basis(f.index[&vec![2, 1]]);
        for n in -1..=2 {
            let adj = f.rep.adjoint_mode(&a, n, &w).unwrap();
            let exp = f.rep.apply_mode(&a, -n, &w).unwrap().scale(&qi(-1));
            assert_eq!(adj, exp);
        }
        let omega = h.rep.voa.omega.clone();
        for m in -1..=1 {
            // omega*_{m+1} = omega_{-m+1}, i.e. L(m)* = L(-m)
            let adj = f.rep.adjoint_mode(&omega, m + 1, &w).unwrap();
            let exp = f.rep.l(-m, &w).unwrap();
            assert_eq!(adj, exp);
        }
    }

    #[test]
    fn conjugated_mode_weight_one_primary() {
        // for the weight-1 primary a: [L(1), a_k] = -k a_{k+1}, hence
        // O_k(z) = (-z^2)^{-k} sum_j (-1)^j k(k+1)...(k+j-1)/j! z^{-j} a_{k+j}
        let h = build_heisenberg(6);
        let f = build_fock(&h, &qr(1, 2), 6);
        let a_idx = h.index[&vec![1]];
        let w = Vect::basis(f.index[&vec![2, 1]]);
        for k in -1..=1i64 {
            let got = f.rep.conjugated_mode(a_idx, k, &w).unwrap();
            let mut want: BTreeMap<i64, Vect> = BTreeMap::new();
            let mut rising = Q::one(); // k (k+1) ... (k+j-1)
            let mut j: i64 = 0;
            loop {
                let c = neg_one_pow(k + j) * &rising / factorial(j as u32);
                let v = f.rep.gen_mode_vect(0, k + j, &w).unwrap();
                if !v.is_zero() && !c.is_zero() {
                    want.entry(-2 * k - j).or_insert_with(Vect::zero).add_scaled(&v, &c);
                }
                // a_{k+j} w = 0 once k + j exceeds the level of w
                if k + j > 3 {
                    break;
                }
                rising *= qi(k + j);
                j += 1;
            }
            want.retain(|_, v| !v.is_zero());
            assert_eq!(got, want, "k = {}", k);
        }
    }

    #[test]
    fn vertex_matches_closed_form() {
        // the lowest-weight 4-point function equals
        // z1^{q1 q3} z2^{q2 q3} (z1 - z2)^{q1 q2} in every region
        let depth = 5;
        let sys = FockSystem::new(depth);
        let (l1, l2, l3) = (qi(1), qi(2), qi(1));
        let l0 = -(&l1 + &l2 + &l3);
        let charges = [l0.clone(), l1.clone(), l2.clone(), l3.clone()];
        let lows: Vec<Vect> = charges
            .iter()
            .map(|q| Vect::basis(sys.module(q).index[&Vec::new()]))
            .collect();
        let p1 = &l1 * &l3;
        let p2 = &l2 * &l3;
        let p12 = &l1 * &l2;
        for region in Region::all() {
            let got = sys
                .corr(region, &charges, &[&lows[0], &lows[1], &lows[2], &lows[3]])
                .unwrap();
            let want = gen_monomial_series(&p1, &p2, &p12, region, depth + 1);
            let cut = got.small_cut.clone().min(want.small_cut.clone());
            let diff = got.truncate_to(&cut).sub(&want.truncate_to(&cut));
            if region == Region::Reversed {
                // the reversed region may differ by an overall sign from the
                // (z2 - z1)^{q1 q2} vs (z1 - z2)^{q1 q2} convention
                let sum = got.truncate_to(&cut).add(&want.truncate_to(&cut));
                assert!(diff.is_zero_through_cut() || sum.is_zero_through_cut());
            } else {
                assert!(
                    diff.is_zero_through_cut(),
                    "region {} mismatch",
                    region.name()
                );
            }
        }
    }

    #[test]
    fn vertex_descendant_consistency() {
        // < a(-1)w0, Y(w1,z1) Y(w2,z2) w3 > and translation covariance:
        // inserting L(-1)w1 differentiates the series in z1.
        let depth = 5;
        let sys = FockSystem::new(depth);
        let (l1, l2, l3) = (qi(1), qi(1), qi(-1));
        let l0 = -(&l1 + &l2 + &l3);
        let charges = [l0.clone(), l1.clone(), l2.clone(), l3.clone()];
        let m0 = sys.module(&l0);
        let m1 = sys.module(&l1);
        let low = |m: &Arc<Fock>| Vect::basis(m.index[&Vec::new()]);
        let w0 = low(&m0);
        let w1 = low(&m1);
        let w2 = low(&sys.module(&l2));
        let w3 = low(&sys.module(&l3));
        let lw1 = m1.rep.l(-1, &w1).unwrap();
        let base = sys.corr(Region::Product, &charges, &[&w0, &w1, &w2, &w3]).unwrap();
        let deriv = sys.corr(Region::Product, &charges, &[&w0, &lw1, &w2, &w3]).unwrap();
        // d/dz1 of sum c z1^{e1} z2^{e2} = sum c e1 z1^{e1-1} z2^{e2}
        let mut expect = RegionSeries::empty(Region::Product, deriv.small_cut.clone());
        for ((e1, e2), c) in &base.terms {
            expect.add_term(e1 - Q::one(), e2.clone(), c * e1);
        }
        let cut = deriv.small_cut.clone().min(expect.small_cut.clone());
        assert!(deriv.truncate_to(&cut).sub(&expect.truncate_to(&cut)).is_zero_through_cut());
    }
}
