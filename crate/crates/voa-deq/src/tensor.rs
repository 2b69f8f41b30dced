//! Tensor space `T = R (x) W0 (x) W1 (x) W2 (x) W3` over the ring
//! `R = Q[z1^±1, z2^±1, (z1-z2)^-1]`, together with the four families of
//! rewriting relations A, B, C, D generated by positive-weight algebra
//! vectors, and a terminating reduction to a complement-pure normal form
//! with an exact replayable certificate.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::module::{C1Data, Rep, Vect};
use crate::q::{neg_one_pow, qi, to_i64, Q};
use crate::ring::RingElem;
use crate::series::{Region, RegionSeries};
use crate::Result;

/// An element of `T`: a finite sum of ring coefficients times quadruples of
/// module basis vectors, keyed by `[w0, w1, w2, w3]` basis indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TensorElem {
    pub terms: BTreeMap<[usize; 4], RingElem>,
}

impl TensorElem {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, quad: [usize; 4], f: &RingElem) {
        if f.is_zero() {
            return;
        }
        let entry = self.terms.entry(quad).or_insert_with(RingElem::zero);
        *entry = entry.add(f);
        if entry.is_zero() {
            self.terms.remove(&quad);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (quad, f) in &other.terms {
            out.add_term(*quad, f);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (quad, f) in &other.terms {
            out.add_term(*quad, &f.neg());
        }
        out
    }

    pub fn scale_ring(&self, f: &RingElem) -> Self {
        let mut out = Self::zero();
        for (quad, g) in &self.terms {
            out.add_term(*quad, &g.mul(f));
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        for (quad, g) in &self.terms {
            out.add_term(*quad, &g.scale(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Maximal pole order at `z1 = z2` over all coefficients.
    pub fn max_pole_dz(&self) -> i64 {
        self.terms.values().map(|f| f.pole_dz()).max().unwrap_or(0)
    }

    pub fn max_pole_z1(&self) -> i64 {
        self.terms.values().map(|f| f.pole_z1()).max().unwrap_or(0)
    }

    pub fn max_pole_z2(&self) -> i64 {
        self.terms.values().map(|f| f.pole_z2()).max().unwrap_or(0)
    }

    /// Evaluate all ring coefficients at a rational point.
    pub fn eval(&self, q1: &Q, q2: &Q) -> Result<BTreeMap<[usize; 4], Q>> {
        let mut out = BTreeMap::new();
        for (quad, f) in &self.terms {
            let v = f.ring_eval(q1, q2)?;
            if !v.is_zero() {
                out.insert(*quad, v);
            }
        }
        Ok(out)
    }
}

/// The four relation families, named after the slot whose `u_{-1}` action
/// forms the head term: A rewrites slot 1, B slot 2, C slot 3, D slot 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelKind {
    A,
    B,
    C,
    D,
}

impl RelKind {
    pub fn head_slot(self) -> usize {
        match self {
            RelKind::A => 1,
            RelKind::B => 2,
            RelKind::C => 3,
            RelKind::D => 0,
        }
    }

    pub fn for_slot(slot: usize) -> Self {
        match slot {
            1 => RelKind::A,
            2 => RelKind::B,
            3 => RelKind::C,
            0 => RelKind::D,
            _ => unreachable!("slot index out of range"),
        }
    }

    /// Sign of the head term `u_{-1} w_slot` inside the relation element.
    pub fn head_sign(self) -> Q {
        match self {
            RelKind::D => Q::one(),
            _ => -Q::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelKind::A => "A",
            RelKind::B => "B",
            RelKind::C => "C",
            RelKind::D => "D",
        }
    }
}

/// One generated relation: an element of `T` known to lie in the kernel of
/// every correlation-function evaluation.
#[derive(Clone, Debug)]
pub struct Relation {
    pub kind: RelKind,
    /// Algebra basis index of the homogeneous positive-weight vector `u`.
    pub u: usize,
    /// The base quadruple the relation was generated from.
    pub quad: [usize; 4],
    pub elem: TensorElem,
}

/// The four modules placed in the tensor slots, sharing one algebra, with
/// `C_1`-decomposition data per slot.
pub struct System {
    pub slots: [Arc<Rep>; 4],
    pub c1: [C1Data; 4],
    /// Per slot, the set of module basis indices spanning the chosen
    /// complement of `C_1(W)` (within the built weight range).
    pub complement: [HashSet<usize>; 4],
}

impl System {
    pub fn new(slots: [Arc<Rep>; 4]) -> Result<Self> {
        let c1 = [
            C1Data::build(&slots[0], &slots[0].module.cutoff.clone())?,
            C1Data::build(&slots[1], &slots[1].module.cutoff.clone())?,
            C1Data::build(&slots[2], &slots[2].module.cutoff.clone())?,
            C1Data::build(&slots[3], &slots[3].module.cutoff.clone())?,
        ];
        let complement = std::array::from_fn(|i| {
            let mut set = HashSet::new();
            for level in c1[i].levels.values() {
                set.extend(level.complement());
            }
            set
        });
        Ok(Self { slots, c1, complement })
    }

    pub fn algebra(&self) -> &Rep {
        self.slots[0].vrep()
    }

    pub fn quad_weight(&self, quad: &[usize; 4]) -> Q {
        (0..4).map(|i| self.slots[i].module.basis[quad[i]].weight.clone()).sum()
    }

    /// `M` = sum over slots of the largest weight whose graded piece is not
    /// contained in `C_1`: every element of `T` reduces into the filtration
    /// level `F_M(T)` modulo the relations.
    pub fn compute_m(&self) -> Result<Q> {
        let mut m = Q::zero();
        for (i, c1) in self.c1.iter().enumerate() {
            let top = c1.top_complement_weight.clone().ok_or_else(|| {
                Error::InconsistentModule(format!(
                    "slot {i} has no complement of C_1 in the built range"
                ))
            })?;
            m += top;
        }
        Ok(m)
    }

    /// Is every slot factor of the quadruple a complement basis vector?
    pub fn complement_pure(&self, quad: &[usize; 4]) -> bool {
        (0..4).all(|i| self.complement[i].contains(&quad[i]))
    }

    fn add_slot_term(
        &self,
        out: &mut TensorElem,
        quad: &[usize; 4],
        slot: usize,
        v: &Vect,
        f: &RingElem,
    ) {
        for (idx, c) in &v.0 {
            let mut q = *quad;
            q[slot] = *idx;
            out.add_term(q, &f.scale(c));
        }
    }

    /// Largest `k >= 0` with `wt(w) + wt(u) - k - 1 >= min` (mode `u_k w`
    /// can be nonzero), or `None` if no such `k`.
    fn kmax_mode(&self, slot: usize, w_idx: usize, wtu: i64) -> Option<i64> {
        let m = &self.slots[slot].module;
        let bound = &m.basis[w_idx].weight + qi(wtu - 1) - &m.min_weight;
        let k = to_i64(&bound).expect("weights within a module differ by integers");
        (k >= 0).then_some(k)
    }

    /// Largest `k >= 0` with `wt(w0) - wt(u) - k >= min` (adjoint mode
    /// `u*_{-1-k} w0` can be nonzero), or `None`.
    fn kmax_adjoint(&self, w_idx: usize, wtu: i64) -> Option<i64> {
        let m = &self.slots[0].module;
        let bound = &m.basis[w_idx].weight - qi(wtu) - &m.min_weight;
        let k = to_i64(&bound).expect("weights within a module differ by integers");
        (k >= 0).then_some(k)
    }

    /// Generate the relation of the given kind for algebra basis vector `u`
    /// and base quadruple `quad`. The element is an exact identity in the
    /// kernel of every correlation evaluation; all terms besides the head
    /// `u_{-1} w_{head}` have strictly smaller total weight.
    pub fn gen_relation(
        &self,
        kind: RelKind,
        u_idx: usize,
        quad: [usize; 4],
    ) -> Result<Relation> {
        let alg = self.algebra();
        let wtu_q = alg.module.basis[u_idx].weight.clone();
        let wtu = to_i64(&wtu_q).ok_or_else(|| {
            Error::InconsistentModule("algebra vector with non-integer weight".into())
        })?;
        if wtu <= 0 {
            return Err(Error::Input("relation generator must have positive weight".into()));
        }
        let u = Vect::basis(u_idx);
        let mut elem = TensorElem::zero();

        // head term: u_{-1} w_{head} with the kind's sign
        let hs = kind.head_slot();
        let head = self.slots[hs].mode_on_basis(u_idx, -1, quad[hs])?;
        let hsign = kind.head_sign();
        self.add_slot_term(&mut elem, &quad, hs, &head, &RingElem::constant(hsign));

        match kind {
            RelKind::A => {
                // slot 0: + z1^k u*_{-1-k} w0
                if let Some(kmax) = self.kmax_adjoint(quad[0], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[0].adjoint_mode(&u, -1 - k, &Vect::basis(quad[0]))?;
                        self.add_slot_term(
                            &mut elem,
                            &quad,
                            0,
                            &v,
                            &RingElem::monomial(k, 0, Q::one()),
                        );
                    }
                }
                // slot 2: + (z1-z2)^{-1-k} u_k w2
                if let Some(kmax) = self.kmax_mode(2, quad[2], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[2].mode_on_basis(u_idx, k, quad[2])?;
                        self.add_slot_term(&mut elem, &quad, 2, &v, &RingElem::dz_power(-1 - k));
                    }
                }
                // slot 3: + z1^{-1-k} u_k w3
                if let Some(kmax) = self.kmax_mode(3, quad[3], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[3].mode_on_basis(u_idx, k, quad[3])?;
                        self.add_slot_term(
                            &mut elem,
                            &quad,
                            3,
                            &v,
                            &RingElem::monomial(-1 - k, 0, Q::one()),
                        );
                    }
                }
            }
            RelKind::B => {
                // slot 0: + z2^k u*_{-1-k} w0
                if let Some(kmax) = self.kmax_adjoint(quad[0], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[0].adjoint_mode(&u, -1 - k, &Vect::basis(quad[0]))?;
                        self.add_slot_term(
                            &mut elem,
                            &quad,
                            0,
                            &v,
                            &RingElem::monomial(0, k, Q::one()),
                        );
                    }
                }
                // slot 1: - (-1)^k (z1-z2)^{-1-k} u_k w1
                if let Some(kmax) = self.kmax_mode(1, quad[1], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[1].mode_on_basis(u_idx, k, quad[1])?;
                        let f = RingElem::dz_power(-1 - k).scale(&(-neg_one_pow(k)));
                        self.add_slot_term(&mut elem, &quad, 1, &v, &f);
                    }
                }
                // slot 3: + z2^{-1-k} u_k w3
                if let Some(kmax) = self.kmax_mode(3, quad[3], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[3].mode_on_basis(u_idx, k, quad[3])?;
                        self.add_slot_term(
                            &mut elem,
                            &quad,
                            3,
                            &v,
                            &RingElem::monomial(0, -1 - k, Q::one()),
                        );
                    }
                }
            }
            RelKind::C => {
                // slot 0: + u*_{-1} w0
                let v = self.slots[0].adjoint_mode(&u, -1, &Vect::basis(quad[0]))?;
                self.add_slot_term(&mut elem, &quad, 0, &v, &RingElem::one());
                // slot 1: - (-1)^k z1^{-1-k} u_k w1
                if let Some(kmax) = self.kmax_mode(1, quad[1], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[1].mode_on_basis(u_idx, k, quad[1])?;
                        let f = RingElem::monomial(-1 - k, 0, -neg_one_pow(k));
                        self.add_slot_term(&mut elem, &quad, 1, &v, &f);
                    }
                }
                // slot 2: - (-1)^k z2^{-1-k} u_k w2
                if let Some(kmax) = self.kmax_mode(2, quad[2], wtu) {
                    for k in 0..=kmax {
                        let v = self.slots[2].mode_on_basis(u_idx, k, quad[2])?;
                        let f = RingElem::monomial(0, -1 - k, -neg_one_pow(k));
                        self.add_slot_term(&mut elem, &quad, 2, &v, &f);
                    }
                }
            }
            RelKind::D => {
                // slots 1, 2: + (-1)^k z_i^{1+k} O_k(z_i)(u) w_i, where the
                // conjugated mode expands as O_k(z) = sum_p z^p (vector);
                // the sign makes the transported w0-side action telescope
                // against the head term (verified against the free-boson
                // correlators at two independent mode orders)
                for (slot, zslot) in [(1usize, 0usize), (2usize, 1usize)] {
                    if let Some(kmax) = self.kmax_mode(slot, quad[slot], wtu) {
                        for k in 0..=kmax {
                            let parts = self.slots[slot]
                                .conjugated_mode(u_idx, k, &Vect::basis(quad[slot]))?;
                            for (p, v) in parts {
                                let e = 1 + k + p;
                                let f = if zslot == 0 {
                                    RingElem::monomial(e, 0, neg_one_pow(k))
                                } else {
                                    RingElem::monomial(0, e, neg_one_pow(k))
                                };
                                self.add_slot_term(&mut elem, &quad, slot, &v, &f);
                            }
                        }
                    }
                }
                // slot 3: - u*_{-1} w3
                let v = self.slots[3].adjoint_mode(&u, -1, &Vect::basis(quad[3]))?;
                self.add_slot_term(&mut elem, &quad, 3, &v, &RingElem::constant(-Q::one()));
            }
        }

        Ok(Relation { kind, u: u_idx, quad, elem })
    }
}

/// Homogeneous algebra basis vectors of weight `0 < wt(u) <= bound`, the
/// spanning set of relation generators used in rank computations.
pub fn vplus(alg: &Rep, bound: &Q) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, idxs) in alg.module.by_weight.iter() {
        if w <= &Q::zero() {
            continue;
        }
        if w > bound {
            break;
        }
        out.extend(idxs.iter().copied());
    }
    out
}

/// One certificate entry: the reduction subtracted
/// `multiplier * relation.elem` from the working element.
#[derive(Debug)]
pub struct CertEntry {
    pub relation: Relation,
    pub multiplier: RingElem,
}

/// Result of a reduction. The exact identity
/// `input = normal + sum_t multiplier_t * relation_t.elem` holds in `T`.
#[derive(Debug)]
pub struct Reduction {
    pub normal: TensorElem,
    pub cert: Vec<CertEntry>,
    pub steps: usize,
}

impl Reduction {
    /// Recompute `normal + sum multiplier * relation` for soundness checks.
    pub fn replay(&self) -> TensorElem {
        let mut acc = self.normal.clone();
        for e in &self.cert {
            acc = acc.add(&e.relation.elem.scale_ring(&e.multiplier));
        }
        acc
    }

    /// Maximal pole orders `(z1 - z2, z1, z2)` appearing in any relation
    /// instance scaled by its multiplier, or in the normal form.
    pub fn max_indices(&self) -> (i64, i64, i64) {
        let mut dz = self.normal.max_pole_dz();
        let mut p1 = self.normal.max_pole_z1();
        let mut p2 = self.normal.max_pole_z2();
        for e in &self.cert {
            let scaled = e.relation.elem.scale_ring(&e.multiplier);
            dz = dz.max(scaled.max_pole_dz());
            p1 = p1.max(scaled.max_pole_z1());
            p2 = p2.max(scaled.max_pole_z2());
        }
        (dz, p1, p2)
    }
}

/// Reduce `input` to a complement-pure normal form: scan terms in
/// decreasing total weight; for the heaviest term pick the first slot in
/// priority order 1, 2, 3, 0 whose factor has a nonzero `C_1` component,
/// and subtract the matching relation instances. Terminates because every
/// non-head relation term has strictly smaller total weight.
pub fn reduce(sys: &System, input: &TensorElem, max_steps: usize) -> Result<Reduction> {
    // working terms keyed by (total weight, quad) so the heaviest term is
    // always the last entry
    let mut work: BTreeMap<(Q, [usize; 4]), RingElem> = BTreeMap::new();
    for (quad, f) in &input.terms {
        let w = sys.quad_weight(quad);
        work.insert((w, *quad), f.clone());
    }
    let mut normal = TensorElem::zero();
    let mut cert: Vec<CertEntry> = Vec::new();
    let mut steps = 0usize;

    while let Some(((wt, quad), f)) = work.pop_last() {
        if f.is_zero() {
            continue;
        }
        // first slot (priority 1, 2, 3, 0) whose factor is not complement
        let slot = [1usize, 2, 3, 0]
            .into_iter()
            .find(|&i| !sys.complement[i].contains(&quad[i]));
        let Some(slot) = slot else {
            normal.add_term(quad, &f);
            continue;
        };
        steps += 1;
        if steps > max_steps {
            return Err(Error::ResourceCap(format!(
                "reduction exceeded {max_steps} rewriting steps"
            )));
        }
        let kind = RelKind::for_slot(slot);
        let (_res, combo) =
            sys.c1[slot].decompose(&sys.slots[slot], &Vect::basis(quad[slot]))?;
        if combo.is_empty() {
            // factor is in the complement span but not a complement basis
            // vector; C1 bases are coordinate-aligned so this cannot happen
            return Err(Error::InconsistentModule(format!(
                "basis vector {} of slot {slot} is neither complement nor in C_1",
                quad[slot]
            )));
        }
        // subtracting sum_t (f * c_t / s) * R_t removes the C_1 part of the
        // slot factor at top weight and adds only strictly lighter terms
        let mut delta = TensorElem::zero();
        for (u_idx, wp_idx, c) in combo {
            let mut quadp = quad;
            quadp[slot] = wp_idx;
            let rel = sys.gen_relation(kind, u_idx, quadp)?;
            let mult = f.scale(&(&c / kind.head_sign()));
            delta = delta.add(&rel.elem.scale_ring(&mult));
            cert.push(CertEntry { relation: rel, multiplier: mult });
        }
        // re-insert the current term, then subtract the relation instances
        work.insert((wt, quad), f);
        for (quadp, g) in &delta.terms {
            let w = sys.quad_weight(quadp);
            let key = (w, *quadp);
            let entry = work.entry(key.clone()).or_insert_with(RingElem::zero);
            *entry = entry.sub(g);
            if entry.is_zero() {
                work.remove(&key);
            }
        }
    }

    Ok(Reduction { normal, cert, steps })
}

/// Pair a tensor element against a correlation oracle: expand each ring
/// coefficient in the region and multiply by the oracle series for the
/// quadruple. Relations must land in the kernel of every such evaluation.
pub fn pair_series<F>(
    elem: &TensorElem,
    region: Region,
    order: i64,
    mut corr: F,
) -> Result<RegionSeries>
where
    F: FnMut(&[usize; 4]) -> Result<RegionSeries>,
{
    let mut acc: Option<RegionSeries> = None;
    for (quad, f) in &elem.terms {
        let fs = f.ring_expand(region, order);
        let cs = corr(quad)?;
        let prod = fs.mul(&cs);
        acc = Some(match acc {
            None => prod,
            Some(a) => a.add(&prod),
        });
    }
    Ok(acc.unwrap_or_else(|| RegionSeries::empty(region, Q::zero())))
}

/// Degree of a tensor term under the scaling grading:
/// `ring_degree(f) - wt(w0) + wt(w1) + wt(w2) + wt(w3)`. Relations are
/// homogeneous for this grading; returns `None` if the element is not.
pub fn tensor_degree(sys: &System, elem: &TensorElem) -> Option<Q> {
    let mut deg: Option<Q> = None;
    for (quad, f) in &elem.terms {
        let d = f.ring_degree()?;
        let wts: Vec<Q> =
            (0..4).map(|i| sys.slots[i].module.basis[quad[i]].weight.clone()).collect();
        let total = qi(d) - &wts[0] + &wts[1] + &wts[2] + &wts[3];
        match &deg {
            None => deg = Some(total),
            Some(x) if *x == total => {}
            Some(_) => return None,
        }
    }
    deg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::heisenberg::{build_fock, build_heisenberg, FockSystem};
    use crate::q::qr;

    fn fock_system(depth: i64) -> (System, FockSystem, [Q; 4]) {
        let fs = FockSystem::new(depth);
        let l1 = qr(1, 2);
        let l2 = qr(1, 3);
        let l3 = qr(1, 5);
        let l0 = -(&l1 + &l2 + &l3);
        let charges = [l0.clone(), l1.clone(), l2.clone(), l3.clone()];
        let slots = [
            fs.module(&l0).rep.clone(),
            fs.module(&l1).rep.clone(),
            fs.module(&l2).rep.clone(),
            fs.module(&l3).rep.clone(),
        ];
        let sys = System::new(slots).unwrap();
        (sys, fs, charges)
    }

    fn lowest_quad(sys: &System) -> [usize; 4] {
        std::array::from_fn(|i| {
            let m = &sys.slots[i].module;
            m.by_weight[&m.min_weight][0]
        })
    }

    #[test]
    fn relations_are_homogeneous() {
        let (sys, _, _) = fock_system(4);
        let quad = lowest_quad(&sys);
        let a_idx = {
            // the weight-1 generator a_{-1}|0> of the algebra
            let alg = sys.algebra();
            alg.module.by_weight[&Q::one()][0]
        };
        for kind in [RelKind::A, RelKind::B, RelKind::C, RelKind::D] {
            let rel = sys.gen_relation(kind, a_idx, quad).unwrap();
            assert!(!rel.elem.is_zero(), "relation {} is trivial", kind.name());
            assert!(
                tensor_degree(&sys, &rel.elem).is_some(),
                "relation {} is not homogeneous",
                kind.name()
            );
        }
    }

    #[test]
    fn relation_kernel_in_all_regions() {
        let depth = 5;
        let (sys, fs, charges) = fock_system(depth);
        let quad = lowest_quad(&sys);
        let alg = sys.algebra();
        // generators up to weight 2: a_{-1}|0>, a_{-2}|0>, a_{-1}^2|0>
        let gens = vplus(alg, &qi(2));
        assert!(gens.len() >= 3);
        // the lowest quadruple plus one with level-1 descendants in slots
        // 0 and 3, to pin the adjoint and conjugated-mode conventions
        let mut desc = quad;
        for slot in [0usize, 3] {
            let m = &sys.slots[slot].module;
            desc[slot] = m.by_weight[&(&m.min_weight + qi(1))][0];
        }
        for region in Region::all() {
            for kind in [RelKind::A, RelKind::B, RelKind::C, RelKind::D] {
                for (&u, quad) in
                    gens.iter().flat_map(|u| [(u, quad), (u, desc)])
                {
                    let rel = sys.gen_relation(kind, u, quad).unwrap();
                    let s = pair_series(&rel.elem, region, depth, |q| {
                        let vs: [Vect; 4] = std::array::from_fn(|i| Vect::basis(q[i]));
                        fs.corr(region, &charges, &[&vs[0], &vs[1], &vs[2], &vs[3]])
                    })
                    .unwrap();
                    assert!(
                        s.is_zero_through_cut(),
                        "relation {} for u={} not in kernel in region {}: {:?}",
                        kind.name(),
                        u,
                        region.name(),
                        s.first_nonzero()
                    );
                }
            }
        }
    }

    #[test]
    fn reduce_certificate_replays_exactly() {
        let (sys, _, _) = fock_system(4);
        // a deliberately non-complement-pure input: put a C_1 vector
        // a_{-1}(lowest) in slots 1 and 2
        let base = lowest_quad(&sys);
        let mut input = TensorElem::zero();
        input.add_term(base, &RingElem::one());
        for slot in [1usize, 2] {
            let m = &sys.slots[slot].module;
            let heavy = m.by_weight[&(&m.min_weight + qi(2))][0];
            let mut quad = base;
            quad[slot] = heavy;
            input.add_term(quad, &RingElem::dz_power(-1));
        }
        let red = reduce(&sys, &input, 10_000).unwrap();
        // soundness: input = normal + sum mult * relation, exactly
        assert_eq!(red.replay(), input);
        // normal form is complement-pure
        for quad in red.normal.terms.keys() {
            assert!(sys.complement_pure(quad), "normal form not complement-pure");
        }
        // normal form weight bounded by M
        let m = sys.compute_m().unwrap();
        for quad in red.normal.terms.keys() {
            assert!(sys.quad_weight(quad) <= m);
        }
        assert!(red.steps > 0);
    }

    #[test]
    fn reduced_normal_form_pairs_identically() {
        // the normal form must produce the same series as the input when
        // paired against the correlation oracle
        let depth = 5;
        let (sys, fs, charges) = fock_system(depth);
        let base = lowest_quad(&sys);
        let m1 = &sys.slots[1].module;
        let heavy = m1.by_weight[&(&m1.min_weight + qi(2))][1];
        let mut input = TensorElem::zero();
        let mut quad = base;
        quad[1] = heavy;
        input.add_term(quad, &RingElem::one());
        let red = reduce(&sys, &input, 10_000).unwrap();
        assert!(!red.cert.is_empty());
        let region = Region::Product;
        let mut oracle = |q: &[usize; 4]| {
            let vs: [Vect; 4] = std::array::from_fn(|i| Vect::basis(q[i]));
            fs.corr(region, &charges, &[&vs[0], &vs[1], &vs[2], &vs[3]])
        };
        let before = pair_series(&input, region, depth, &mut oracle).unwrap();
        let after = pair_series(&red.normal, region, depth, &mut oracle).unwrap();
        let diff = before.sub(&after);
        assert!(diff.is_zero_through_cut(), "{:?}", diff.first_nonzero());
    }
}
