//! Truncated graded modules over a vertex operator algebra with exact mode
//! actions.
//!
//! A module is stored as an explicit basis of weight-homogeneous vectors up
//! to a cutoff weight. Every basis vector carries a construction: either a
//! lowest-weight vector or `g_{-m} . sub` for a generating field `g` and a
//! previously listed basis vector `sub`. Generator modes are supplied by the
//! model (`models`); modes of arbitrary algebra elements are computed by the
//! standard iterate recursion
//!
//!   (u_k v)_n = sum_{j>=0} (-1)^j C(k,j) ( u_{k-j} v_{n+j} - (-1)^k v_{k+n-j} u_j ),
//!
//! which terminates because weights are bounded below. Modes that would land
//! above the cutoff raise `Error::Truncated`.

use crate::linalg::{Mat, RowSpace};
use crate::q::{binom, factorial, neg_one_pow, qi, strict_floor, to_i64, Q};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// A vector in a module, as a sparse combination of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Vect(pub BTreeMap<usize, Q>);

impl Vect {
    pub fn zero() -> Self {
        Self(BTreeMap::new())
    }

    pub fn basis(idx: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(idx, Q::one());
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, idx: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.0.entry(idx).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.0.remove(&idx);
        }
    }

    pub fn add_scaled(&mut self, other: &Vect, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (i, c) in &other.0 {
            self.add_term(*i, c * s);
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &Vect) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }
}

/// How a basis vector is built from lower ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// The `i`-th lowest-weight vector (the vacuum for the algebra itself).
    Lowest(usize),
    /// `g_{-m} . sub` with `m >= 1`.
    Apply { gen: usize, m: i64, sub: usize },
}

#[derive(Clone, Debug)]
pub struct BasisVec {
    pub weight: Q,
    pub name: String,
    pub construction: Construction,
}

/// Basis-level description of one graded module, complete up to `cutoff`:
/// every graded piece of weight <= cutoff is fully listed.
#[derive(Clone, Debug)]
pub struct ModuleData {
    pub name: String,
    pub basis: Vec<BasisVec>,
    pub by_weight: BTreeMap<Q, Vec<usize>>,
    pub min_weight: Q,
    pub cutoff: Q,
}

impl ModuleData {
    pub fn new(name: &str, basis: Vec<BasisVec>, cutoff: Q) -> Self {
        let mut by_weight: BTreeMap<Q, Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            by_weight.entry(b.weight.clone()).or_default().push(i);
        }
        let min_weight = by_weight.keys().next().cloned().unwrap_or_else(Q::zero);
        Self { name: name.to_string(), basis, by_weight, min_weight, cutoff }
    }

    pub fn dim_at(&self, w: &Q) -> usize {
        self.by_weight.get(w).map_or(0, |v| v.len())
    }

    /// Weight of a homogeneous vector; error if mixed.
    pub fn weight_of(&self, v: &Vect) -> Result<Q> {
        let mut wt: Option<Q> = None;
        for idx in v.0.keys() {
            let w = &self.basis[*idx].weight;
            match &wt {
                None => wt = Some(w.clone()),
                Some(prev) if prev == w => {}
                Some(_) => {
                    return Err(Error::InconsistentModule(format!(
                        "vector in {} is not weight-homogeneous",
                        self.name
                    )))
                }
            }
        }
        wt.ok_or_else(|| Error::InconsistentModule("weight of zero vector".into()))
    }

    /// Split a vector into weight-homogeneous components.
    pub fn homogeneous_parts(&self, v: &Vect) -> BTreeMap<Q, Vect> {
        let mut out: BTreeMap<Q, Vect> = BTreeMap::new();
        for (idx, c) in &v.0 {
            out.entry(self.basis[*idx].weight.clone())
                .or_insert_with(Vect::zero)
                .add_term(*idx, c.clone());
        }
        out
    }

    pub fn show(&self, v: &Vect) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.0.iter()
            .map(|(i, c)| format!("({})*{}", crate::q::q_str(c), self.basis[*i].name))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A generating field of the algebra.
#[derive(Clone, Debug)]
pub struct Gen {
    pub name: String,
    pub weight: i64,
}

/// The algebra itself: its module data (as a module over itself), the vacuum
/// and conformal vectors, and the generating fields.
#[derive(Debug)]
pub struct VOAData {
    pub module: ModuleData,
    pub vacuum: usize,
    pub omega: Vect,
    pub central_charge: Q,
    pub gens: Vec<Gen>,
}

/// Generator mode action supplied by a model. Called only for arguments whose
/// result weight lies inside the stored range, and must return the exact
/// weight-homogeneous result.
pub trait GenAction: Send + Sync {
    fn act(&self, gen: usize, n: i64, idx: usize) -> Result<Vect>;
}

/// A module together with everything needed to apply modes of arbitrary
/// algebra vectors to it.
pub struct Rep {
    pub voa: Arc<VOAData>,
    /// The algebra acting on itself; `None` when this `Rep` *is* that one.
    pub vrep: Option<Arc<Rep>>,
    pub module: ModuleData,
    action: Box<dyn GenAction>,
    cache: Mutex<HashMap<(usize, i64, usize), Vect>>,
}

impl Rep {
    pub fn new(
        voa: Arc<VOAData>,
        vrep: Option<Arc<Rep>>,
        module: ModuleData,
        action: Box<dyn GenAction>,
    ) -> Self {
        Self { voa, vrep, module, action, cache: Mutex::new(HashMap::new()) }
    }

    pub fn vrep(&self) -> &Rep {
        self.vrep.as_deref().unwrap_or(self)
    }

    fn truncated(&self, what: &str, target: &Q) -> Error {
        Error::Truncated(format!(
            "{} needs weight {} in {} (cutoff {})",
            what,
            crate::q::q_str(target),
            self.module.name,
            crate::q::q_str(&self.module.cutoff)
        ))
    }

    /// Mode `g_n` of a generating field on one basis vector.
    pub fn gen_mode(&self, gen: usize, n: i64, idx: usize) -> Result<Vect> {
        let target = qi(self.voa.gens[gen].weight) + &self.module.basis[idx].weight - qi(n + 1);
        if target < self.module.min_weight || !self.module.by_weight.contains_key(&target) {
            if target > self.module.cutoff {
                return Err(self.truncated(&format!("{}_{}", self.voa.gens[gen].name, n), &target));
            }
            return Ok(Vect::zero());
        }
        if target > self.module.cutoff {
            return Err(self.truncated(&format!("{}_{}", self.voa.gens[gen].name, n), &target));
        }
        self.action.act(gen, n, idx)
    }

    pub fn gen_mode_vect(&self, gen: usize, n: i64, w: &Vect) -> Result<Vect> {
        let mut out = Vect::zero();
        for (idx, c) in &w.0 {
            out.add_scaled(&self.gen_mode(gen, n, *idx)?, c);
        }
        Ok(out)
    }

    /// Mode `u_n` of one algebra basis vector on one module basis vector.
    pub fn mode_on_basis(&self, u_idx: usize, n: i64, w_idx: usize) -> Result<Vect> {
        let key = (u_idx, n, w_idx);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let wt_u = &self.voa.module.basis[u_idx].weight;
        let wt_w = &self.module.basis[w_idx].weight;
        let target = wt_u + wt_w - qi(n + 1);
        if target < self.module.min_weight || !self.module.by_weight.contains_key(&target) {
            if target > self.module.cutoff {
                return Err(self.truncated(&format!("mode {} of composite", n), &target));
            }
            return Ok(Vect::zero());
        }
        if target > self.module.cutoff {
            return Err(self.truncated(&format!("mode {} of composite", n), &target));
        }
        let out = match self.voa.module.basis[u_idx].construction.clone() {
            Construction::Lowest(_) => {
                // vacuum: 1_n = delta_{n,-1} id
                if n == -1 {
                    Vect::basis(w_idx)
                } else {
                    Vect::zero()
                }
            }
            Construction::Apply { gen, m, sub } => {
                // (g_{-m} v)_n w, k = -m
                let k = -m;
                let wt_g = qi(self.voa.gens[gen].weight);
                let wt_v = self.voa.module.basis[sub].weight.clone();
                // j bounds from weights bounded below
                let j1 = strict_floor(&(&wt_v + wt_w - qi(n) - self.module.min_weight.clone()));
                let j2 = strict_floor(&(&wt_g + wt_w - self.module.min_weight.clone()));
                let jmax = j1.max(j2);
                let sign_k = neg_one_pow(k);
                let mut acc = Vect::zero();
                let mut j: i64 = 0;
                while qi(j) <= Q::from_integer(jmax.clone()) {
                    let c = binom(k, j as u32) * neg_one_pow(j);
                    if !c.is_zero() {
                        // g_{k-j} ( v_{n+j} w )
                        let inner = self.mode_on_basis(sub, n + j, w_idx)?;
                        let t1 = self.gen_mode_vect(gen, k - j, &inner)?;
                        acc.add_scaled(&t1, &c);
                        // - (-1)^k v_{k+n-j} ( g_j w )
                        let gw = self.gen_mode(gen, j, w_idx)?;
                        let mut t2 = Vect::zero();
                        for (i2, c2) in &gw.0 {
                            t2.add_scaled(&self.mode_on_basis(sub, k + n - j, *i2)?, c2);
                        }
                        acc.add_scaled(&t2, &(-&c * &sign_k));
                    }
                    j += 1;
                }
                acc
            }
        };
        self.cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// `u_n w` for arbitrary `u` in the algebra and `w` in the module.
    pub fn apply_mode(&self, u: &Vect, n: i64, w: &Vect) -> Result<Vect> {
        let mut out = Vect::zero();
        for (ui, uc) in &u.0 {
            for (wi, wc) in &w.0 {
                out.add_scaled(&self.mode_on_basis(*ui, n, *wi)?, &(uc * wc));
            }
        }
        Ok(out)
    }

    /// Virasoro operator `L(n) = omega_{n+1}`.
    pub fn l(&self, n: i64, w: &Vect) -> Result<Vect> {
        let omega = self.voa.omega.clone();
        self.apply_mode(&omega, n + 1, w)
    }

    /// Adjoint mode
    /// `u*_n = (-1)^{wt u} sum_j (1/j!) (L(1)^j u)_{2 wt u - j - n - 2}`
    /// for weight-homogeneous components of `u`.
    pub fn adjoint_mode(&self, u: &Vect, n: i64, w: &Vect) -> Result<Vect> {
        let vr = self.vrep();
        let mut out = Vect::zero();
        for (wt_u, u_part) in self.voa.module.homogeneous_parts(u) {
            let wtu = to_i64(&wt_u).ok_or_else(|| {
                Error::InconsistentModule("algebra vector with non-integer weight".into())
            })?;
            let sign = neg_one_pow(wtu);
            let mut lu = u_part;
            let mut j: i64 = 0;
            while !lu.is_zero() {
                let c = &sign / factorial(j as u32);
                let t = self.apply_mode(&lu, 2 * wtu - j - n - 2, w)?;
                out.add_scaled(&t, &c);
                lu = vr.l(1, &lu)?;
                j += 1;
            }
        }
        Ok(out)
    }

    /// Conjugated mode
    /// `O_k(z) = (-z^2)^{wt u - k - 1} e^{L(1)/z} u_k e^{-L(1)/z}`,
    /// returned as a map z-exponent -> vector. `u` must be a single basis
    /// vector index into the algebra.
    pub fn conjugated_mode(&self, u_idx: usize, k: i64, w: &Vect) -> Result<BTreeMap<i64, Vect>> {
        let wtu = to_i64(&self.voa.module.basis[u_idx].weight).ok_or_else(|| {
            Error::InconsistentModule("algebra vector with non-integer weight".into())
        })?;
        let e = wtu - k - 1;
        let sign = neg_one_pow(e);
        let u = Vect::basis(u_idx);
        let mut out: BTreeMap<i64, Vect> = BTreeMap::new();
        let mut lw = w.clone();
        let mut j: i64 = 0;
        while !lw.is_zero() {
            let t = self.apply_mode(&u, k, &lw)?;
            let mut li = t;
            let mut i: i64 = 0;
            while !li.is_zero() {
                let c = &sign * neg_one_pow(j) / (factorial(i as u32) * factorial(j as u32));
                let entry = out.entry(2 * e - i - j).or_insert_with(Vect::zero);
                entry.add_scaled(&li, &c);
                li = self.l(1, &li)?;
                i += 1;
            }
            lw = self.l(1, &lw)?;
            j += 1;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }
}

/// The sub-quotient data for `C_1(W) = span{ u_{-1} w : u of positive weight }`
/// computed weight by weight, with certificates expressing each element of
/// `C_1` as an explicit combination of `u_{-1} w` generators.
pub struct C1Data {
    pub levels: BTreeMap<Q, C1Level>,
    /// Largest weight (within the computed range) whose graded piece is not
    /// contained in `C_1(W)`.
    pub top_complement_weight: Option<Q>,
    pub up_to: Q,
}

pub struct C1Level {
    /// `(algebra basis index, module basis index)` per inserted generator.
    pub gens: Vec<(usize, usize)>,
    pub space: RowSpace,
    /// Module basis indices at this weight, in column order.
    pub coords: Vec<usize>,
}

impl C1Level {
    /// Indices of complement basis vectors (non-lead coordinates).
    pub fn complement(&self) -> Vec<usize> {
        let leads = self.space.lead_cols();
        self.coords
            .iter()
            .enumerate()
            .filter(|(i, _)| !leads.contains(i))
            .map(|(_, idx)| *idx)
            .collect()
    }
}

impl C1Data {
    pub fn build(rep: &Rep, up_to: &Q) -> Result<Self> {
        let vr = rep.vrep();
        let mut levels = BTreeMap::new();
        let mut top: Option<Q> = None;
        for (d, coords) in rep.module.by_weight.range(..=up_to.clone()) {
            let coords = coords.clone();
            let ncols = coords.len();
            let col_of: HashMap<usize, usize> =
                coords.iter().enumerate().map(|(c, i)| (*i, c)).collect();
            let mut space = RowSpace::new(ncols);
            let mut gens = Vec::new();
            // algebra vectors of positive weight, paired with module vectors
            // at weight d - wt(u)
            for (wt_u, u_list) in vr.module.by_weight.iter() {
                if wt_u <= &Q::zero() {
                    continue;
                }
                let need = d - wt_u;
                if need < rep.module.min_weight {
                    // weights iterate in ascending order, so all later u are
                    // too heavy as well
                    break;
                }
                let Some(w_list) = rep.module.by_weight.get(&need) else {
                    continue;
                };
                for &u_idx in u_list {
                    for &w_idx in w_list {
                        let v = rep.mode_on_basis(u_idx, -1, w_idx)?;
                        let mut row = vec![Q::zero(); ncols];
                        for (i, c) in &v.0 {
                            row[col_of[i]] = c.clone();
                        }
                        gens.push((u_idx, w_idx));
                        space.insert(row);
                    }
                }
            }
            // need the algebra basis up to weight d - min_weight
            let max_needed = d - &rep.module.min_weight;
            if max_needed > vr.module.cutoff {
                return Err(Error::CutoffOverflow(format!(
                    "algebra cutoff {} below {} needed for C1 at weight {}",
                    crate::q::q_str(&vr.module.cutoff),
                    crate::q::q_str(&max_needed),
                    crate::q::q_str(d)
                )));
            }
            let level = C1Level { gens, space, coords };
            if !level.complement().is_empty() {
                top = Some(d.clone());
            }
            levels.insert(d.clone(), level);
        }
        Ok(Self { levels, top_complement_weight: top, up_to: up_to.clone() })
    }

    /// Decompose a weight-homogeneous vector `v` of weight `d` as
    /// `v = residue + sum_t coeff_t * (u_t)_{-1} w_t` with the residue
    /// supported on complement coordinates.
    pub fn decompose(
        &self,
        rep: &Rep,
        v: &Vect,
    ) -> Result<(Vect, Vec<(usize, usize, Q)>)> {
        if v.is_zero() {
            return Ok((Vect::zero(), Vec::new()));
        }
        let d = rep.module.weight_of(v)?;
        let level = self.levels.get(&d).ok_or_else(|| {
            Error::CutoffOverflow(format!(
                "C1 data for {} not built at weight {}",
                rep.module.name,
                crate::q::q_str(&d)
            ))
        })?;
        let col_of: HashMap<usize, usize> =
            level.coords.iter().enumerate().map(|(c, i)| (*i, c)).collect();
        let mut row = vec![Q::zero(); level.coords.len()];
        for (i, c) in &v.0 {
            row[col_of[i]] = c.clone();
        }
        let (res, combo) = level.space.decompose(row);
        let mut residue = Vect::zero();
        for (c, idx) in res.iter().zip(level.coords.iter()) {
            residue.add_term(*idx, c.clone());
        }
        let mut cert = Vec::new();
        for (t, c) in combo.iter().enumerate() {
            if !c.is_zero() {
                let (u, w) = level.gens[t];
                cert.push((u, w, c.clone()));
            }
        }
        Ok((residue, cert))
    }
}

/// Dimensions of `W_d / span{ u_{-2} w }` per weight, up to `up_to`.
pub fn c2_complement_dims(rep: &Rep, up_to: &Q) -> Result<BTreeMap<Q, usize>> {
    let vr = rep.vrep();
    let mut out = BTreeMap::new();
    for (d, coords) in rep.module.by_weight.range(..=up_to.clone()) {
        let ncols = coords.len();
        let col_of: HashMap<usize, usize> =
            coords.iter().enumerate().map(|(c, i)| (*i, c)).collect();
        let mut space = RowSpace::new(ncols);
        for (wt_u, u_list) in vr.module.by_weight.iter() {
            let need = d - wt_u - qi(1);
            let Some(w_list) = rep.module.by_weight.get(&need) else {
                continue;
            };
            for &u_idx in u_list {
                for &w_idx in w_list {
                    let v = rep.mode_on_basis(u_idx, -2, w_idx)?;
                    let mut row = vec![Q::zero(); ncols];
                    for (i, c) in &v.0 {
                        row[col_of[i]] = c.clone();
                    }
                    space.insert(row);
                }
            }
        }
        out.insert(d.clone(), ncols - space.rank());
    }
    Ok(out)
}

/// Spot checks of the module axioms on low-weight vectors:
/// grading (`L(0) w = wt(w) w`), the translation property
/// (`(L(-1)u)_n = -n u_{n-1}`), and the commutator formula
/// `[u_m, v_n] = sum_j C(m,j) (u_j v)_{m+n-j}`.
pub fn check_axioms(rep: &Rep, alg_weight_bound: &Q, mode_range: i64) -> Result<()> {
    let vr = rep.vrep();
    // grading
    for (idx, b) in rep.module.basis.iter().enumerate().take(24) {
        let w = Vect::basis(idx);
        // computing L(0) can overshoot the cutoff on near-top vectors; skip those
        let Ok(lw) = rep.l(0, &w) else { continue };
        if lw != w.scale(&b.weight) {
            return Err(Error::InconsistentModule(format!(
                "L(0) does not act by the weight on {} in {}",
                b.name, rep.module.name
            )));
        }
    }
    // small algebra sample
    let alg: Vec<usize> = vr
        .module
        .basis
        .iter()
        .enumerate()
        .filter(|(_, b)| &b.weight <= alg_weight_bound)
        .map(|(i, _)| i)
        .take(8)
        .collect();
    let mods: Vec<usize> = (0..rep.module.basis.len().min(4)).collect();
    for &u in &alg {
        let uv = Vect::basis(u);
        let lu = vr.l(-1, &uv)?;
        for &wi in &mods {
            let w = Vect::basis(wi);
            for n in -mode_range..=mode_range {
                let lhs = rep.apply_mode(&lu, n, &w);
                let rhs = rep.apply_mode(&uv, n - 1, &w).map(|r| r.scale(&qi(-n)));
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) => {
                        if a != b {
                            return Err(Error::InconsistentModule(format!(
                                "translation axiom fails for u={} n={} in {}",
                                vr.module.basis[u].name, n, rep.module.name
                            )));
                        }
                    }
                    _ => continue, // truncated sample, skip
                }
            }
        }
    }
    // commutators
    for &ui in alg.iter().take(3) {
        for &vi in alg.iter().take(3) {
            let u = Vect::basis(ui);
            let v = Vect::basis(vi);
            for &wi in mods.iter().take(2) {
                let w = Vect::basis(wi);
                for m in -1..=mode_range {
                    for n in -1..=mode_range {
                        let direct = (|| -> Result<Vect> {
                            let a = rep.apply_mode(&u, m, &rep.apply_mode(&v, n, &w)?)?;
                            let b = rep.apply_mode(&v, n, &rep.apply_mode(&u, m, &w)?)?;
                            Ok(a.sub(&b))
                        })();
                        let Ok(direct) = direct else { continue };
                        let mut rhs = Vect::zero();
                        let mut ok = true;
                        let mut j: i64 = 0;
                        loop {
                            let Ok(ujv) = vr.apply_mode(&u, j, &v) else {
                                ok = false;
                                break;
                            };
                            let wt_bound = &vr.module.basis[ui].weight
                                + &vr.module.basis[vi].weight
                                - qi(j + 1);
                            if ujv.is_zero() && wt_bound < Q::zero() {
                                break;
                            }
                            if !ujv.is_zero() {
                                let c = binom(m, j as u32);
                                match rep.apply_mode(&ujv, m + n - j, &w) {
                                    Ok(t) => rhs.add_scaled(&t, &c),
                                    Err(_) => {
                                        ok = false;
                                        break;
                                    }
                                }
                            }
                            j += 1;
                        }
                        if ok && direct != rhs {
                            return Err(Error::InconsistentModule(format!(
                                "commutator axiom fails for u={} v={} m={} n={} in {}",
                                vr.module.basis[ui].name,
                                vr.module.basis[vi].name,
                                m,
                                n,
                                rep.module.name
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// A graded bilinear pairing between two modules (typically a module and its
/// contragredient), stored as one matrix per weight.
pub struct Pairing {
    pub blocks: BTreeMap<Q, Mat>,
}

impl Pairing {
    /// Build the contragredient pairing from lowest-weight normalizations
    /// `tops = [(a_idx, b_idx, value)]` using the adjoint rule for
    /// quasi-primary generators:
    /// `< g_{-m} x, y > = (-1)^{wt g} < x, g_{2 wt g - 2 + m} y >`.
    pub fn build(a: &Rep, b: &Rep, tops: &[(usize, usize, Q)]) -> Result<Self> {
        let mut memo: HashMap<(usize, usize), Q> = HashMap::new();
        fn pair_rec(
            a: &Rep,
            b: &Rep,
            tops: &[(usize, usize, Q)],
            memo: &mut HashMap<(usize, usize), Q>,
            x: usize,
            y: usize,
        ) -> Result<Q> {
            if let Some(v) = memo.get(&(x, y)) {
                return Ok(v.clone());
            }
            if a.module.basis[x].weight != b.module.basis[y].weight {
                return Ok(Q::zero());
            }
            let out = match a.module.basis[x].construction.clone() {
                Construction::Lowest(_) => tops
                    .iter()
                    .find(|(ti, tj, _)| *ti == x && *tj == y)
                    .map(|(_, _, v)| v.clone())
                    .unwrap_or_else(Q::zero),
                Construction::Apply { gen, m, sub } => {
                    let wt_g = a.voa.gens[gen].weight;
                    let sign = neg_one_pow(wt_g);
                    let gy = b.gen_mode(gen, 2 * wt_g - 2 + m, y)?;
                    let mut acc = Q::zero();
                    for (y2, c) in &gy.0 {
                        acc += pair_rec(a, b, tops, memo, sub, *y2)? * c;
                    }
                    acc * sign
                }
            };
            memo.insert((x, y), out.clone());
            Ok(out)
        }
        let mut blocks = BTreeMap::new();
        for (d, rows) in a.module.by_weight.iter() {
            let Some(cols) = b.module.by_weight.get(d) else {
                continue;
            };
            let mut mat = Mat::zeros(rows.len(), cols.len());
            for (ri, &x) in rows.iter().enumerate() {
                for (ci, &y) in cols.iter().enumerate() {
                    mat.set(ri, ci, pair_rec(a, b, tops, &mut memo, x, y)?);
                }
            }
            blocks.insert(d.clone(), mat);
        }
        Ok(Self { blocks })
    }

    pub fn pair(&self, a: &Rep, b: &Rep, x: &Vect, y: &Vect) -> Q {
        let mut acc = Q::zero();
        for (xi, xc) in &x.0 {
            let d = &a.module.basis[*xi].weight;
            let Some(mat) = self.blocks.get(d) else { continue };
            let Some(rows) = a.module.by_weight.get(d) else { continue };
            let Some(cols) = b.module.by_weight.get(d) else { continue };
            let ri = rows.iter().position(|i| i == xi).unwrap();
            for (yi, yc) in &y.0 {
                if &b.module.basis[*yi].weight != d {
                    continue;
                }
                let ci = cols.iter().position(|i| i == yi).unwrap();
                acc += mat.at(ri, ci) * xc * yc;
            }
        }
        acc
    }

    /// Error if any block up to the given weight is not square and invertible.
    pub fn check_nondegenerate(&self, up_to: &Q) -> Result<()> {
        for (d, m) in self.blocks.range(..=up_to.clone()) {
            if m.rows != m.cols || m.rank() != m.rows {
                return Err(Error::SingularPairing(crate::q::q_str(d)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Vect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, c)| format!("({})*e{}", crate::q::q_str(c), i))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vect_arith() {
        let mut v = Vect::basis(2);
        v.add_term(2, qi(-1));
        assert!(v.is_zero());
        let mut w = Vect::basis(0);
        w.add_scaled(&Vect::basis(1), &qi(3));
        assert_eq!(w.0.len(), 2);
        assert_eq!(w.sub(&w), Vect::zero());
    }
}
