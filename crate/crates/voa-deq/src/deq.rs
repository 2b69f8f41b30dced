//! Derivation of the differential equations satisfied by 4-point
//! correlation functions: find R-linear dependencies among normal forms of
//! `L(-1)`-power insertions, both unconstrained (minimal order, coefficients
//! in R, monic) and under the regular-singular ansatz at a prescribed locus
//! (coefficient of the k-th derivative is `c_k * p^{k-m}` with `c_k` of
//! ring degree 0, `p` the locus equation).
//!
//! Dependencies are sought in the quotient by the relation submodule, not
//! just among raw normal forms: the rewriting to normal form is not
//! confluent, so identities among irreducible quadruples (e.g. the
//! conformal Ward identities) only appear as nonzero normal forms of whole
//! relation elements. Those are enumerated once and added as extra columns
//! with their own R-multipliers.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::modp;
use crate::module::Vect;
use crate::q::{qi, qr, Q};
use crate::ratfunc::RatFunc;
use crate::ring::RingElem;
use crate::tensor::{reduce, tensor_degree, vplus, Reduction, RelKind, System, TensorElem};
use crate::uni::{laurent_module_solve, LaurentUni, UniPoly};
use crate::Result;

/// Singular loci of the system, in the coordinates used for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Locus {
    /// z1 = z2, local coordinate z1 - z2.
    Z1EqZ2,
    /// z2^{-1}(z1 - z2) = 0, local coordinate z3 = (z1 - z2)/z2.
    Z3AtZero,
    /// z1^{-1}(z1 - z2) = 0, local coordinate z4 = (z1 - z2)/z1.
    Z4AtZero,
    Z1AtZero,
    Z2AtZero,
    Z1AtInf,
    Z2AtInf,
}

impl Locus {
    pub fn all() -> [Locus; 7] {
        [
            Locus::Z1EqZ2,
            Locus::Z3AtZero,
            Locus::Z4AtZero,
            Locus::Z1AtZero,
            Locus::Z2AtZero,
            Locus::Z1AtInf,
            Locus::Z2AtInf,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Locus::Z1EqZ2 => "z1=z2",
            Locus::Z3AtZero => "z2^-1(z1-z2)=0",
            Locus::Z4AtZero => "z1^-1(z1-z2)=0",
            Locus::Z1AtZero => "z1=0",
            Locus::Z2AtZero => "z2=0",
            Locus::Z1AtInf => "z1=inf",
            Locus::Z2AtInf => "z2=inf",
        }
    }

    pub fn family(self) -> Option<LocusFamily> {
        match self {
            Locus::Z1EqZ2 | Locus::Z3AtZero | Locus::Z4AtZero => Some(LocusFamily::Dz),
            Locus::Z1AtZero => Some(LocusFamily::Z1),
            Locus::Z2AtZero => Some(LocusFamily::Z2),
            Locus::Z1AtInf | Locus::Z2AtInf => None,
        }
    }
}

impl std::str::FromStr for Locus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z1=z2" => Ok(Locus::Z1EqZ2),
            "z3" | "z2^-1(z1-z2)=0" => Ok(Locus::Z3AtZero),
            "z4" | "z1^-1(z1-z2)=0" => Ok(Locus::Z4AtZero),
            "z1=0" => Ok(Locus::Z1AtZero),
            "z2=0" => Ok(Locus::Z2AtZero),
            "z1=inf" => Ok(Locus::Z1AtInf),
            "z2=inf" => Ok(Locus::Z2AtInf),
            _ => Err(Error::Input(format!("unknown locus {s}"))),
        }
    }
}

/// The vanishing prime attached to a family of loci: `z1 - z2`, `z1`, `z2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocusFamily {
    Dz,
    Z1,
    Z2,
}

impl LocusFamily {
    pub fn prime_power(self, k: i64) -> RingElem {
        match self {
            LocusFamily::Dz => RingElem::dz_power(k),
            LocusFamily::Z1 => RingElem::monomial(k, 0, Q::one()),
            LocusFamily::Z2 => RingElem::monomial(0, k, Q::one()),
        }
    }

    /// Pole order of `e` at the family's prime.
    pub fn pole(self, e: &RingElem) -> i64 {
        match self {
            LocusFamily::Dz => e.pole_dz(),
            LocusFamily::Z1 => e.pole_z1(),
            LocusFamily::Z2 => e.pole_z2(),
        }
    }

    /// Value of the collapse coordinate x on the locus.
    pub fn locus_point(self) -> Q {
        match self {
            LocusFamily::Dz => Q::one(),
            LocusFamily::Z1 => -Q::one(),
            LocusFamily::Z2 => Q::one(),
        }
    }

    /// Collapse a homogeneous element with no pole at the family's prime to
    /// a Laurent polynomial in the degree-0 coordinate x, dropping the
    /// (degree-determined) z2- or (z1-z2)-power scale:
    /// - Dz: x = z1/z2, `z1^a z2^b = z2^{a+b} x^a`
    /// - Z1: x = z2/(z1-z2), `z1^a z2^b (z1-z2)^c = (z1-z2)^{a+b+c} (1+x)^a x^b`
    /// - Z2: x = z1/(z1-z2), `z1^a z2^b (z1-z2)^c = (z1-z2)^{a+b+c} x^a (x-1)^b`
    /// Returns None when a pole at the prime remains.
    pub fn collapse(self, e: &RingElem) -> Option<LaurentUni> {
        if self.pole(e) > 0 {
            return None;
        }
        if self == LocusFamily::Dz && e.dpow != 0 {
            return None;
        }
        let mut out = LaurentUni::zero();
        let xm1 = LaurentUni::from_poly(UniPoly::from_coeffs(vec![-Q::one(), Q::one()]));
        let xp1 = LaurentUni::from_poly(UniPoly::from_coeffs(vec![Q::one(), Q::one()]));
        for (&(a, b), c) in &e.num.terms {
            let term = match self {
                LocusFamily::Dz => LaurentUni::monomial(a, c.clone()),
                LocusFamily::Z1 => {
                    let mut t = LaurentUni::monomial(b, c.clone());
                    for _ in 0..a {
                        t = t.mul(&xp1);
                    }
                    t
                }
                LocusFamily::Z2 => {
                    let mut t = LaurentUni::monomial(a, c.clone());
                    for _ in 0..b {
                        t = t.mul(&xm1);
                    }
                    t
                }
            };
            out = out.add(&term);
        }
        Some(out)
    }
}

/// Exponent/coefficient pairs of a Laurent polynomial.
pub fn laurent_terms(g: &LaurentUni) -> Vec<(i64, Q)> {
    let mut out = Vec::new();
    if g.is_zero() {
        return out;
    }
    let d = g.poly.degree().unwrap_or(0);
    for i in 0..=d {
        let c = g.poly.coeff(i);
        if !c.is_zero() {
            out.push((g.shift + i as i64, c));
        }
    }
    out
}

/// Ring element `z2^{z2off} (x - 1)^{-e} g(x)` with `x = z1/z2`, using
/// `(x - 1)^{-1} = z2 (z1 - z2)^{-1}`. Homogeneous of degree `-z2off`.
fn homog_ring(g: &LaurentUni, e: i64, z2off: i64) -> RingElem {
    let mut out = RingElem::zero();
    let shift = RingElem::dz_power(-e);
    for (t, c) in laurent_terms(g) {
        out = out.add(&RingElem::monomial(t, -t + z2off + e, c).mul(&shift));
    }
    out
}

/// A single-variable part of the derived system: a monic equation
/// `d^m phi/dv^m + a_1 d^{m-1} phi/dv^{m-1} + ... + a_m phi = 0` in the
/// variable `v = z1` (slot 1) or `v = z2` (slot 2), coefficients in R.
#[derive(Debug)]
pub struct ODESystem {
    /// 1 or 2: the differentiated tensor slot and hence the variable.
    pub slot: usize,
    pub order: usize,
    /// `a_1, ..., a_m`; `a_k` multiplies the `(m-k)`-th derivative.
    pub coeffs: Vec<RingElem>,
    /// Module names and basis indices of the quadruple.
    pub provenance: Vec<(String, usize)>,
    /// Loci whose regular-singular normalized ansatz succeeded.
    pub regular_loci: BTreeSet<Locus>,
}

impl ODESystem {
    pub fn var_name(&self) -> &'static str {
        if self.slot == 1 {
            "z1"
        } else {
            "z2"
        }
    }

    /// Degree-0 witnesses `c_k = a_{m-k} p^{m-k}` at a locus family, when
    /// the coefficients fit the regular ansatz (`c_m = 1` implicit).
    pub fn regular_witnesses(&self, fam: LocusFamily) -> Option<Vec<LaurentUni>> {
        let m = self.order as i64;
        let mut out = Vec::with_capacity(self.order);
        for k in 0..m {
            // coefficient of the k-th derivative is a_{m-k}
            let a = &self.coeffs[(m - k - 1) as usize];
            let c = a.mul(&fam.prime_power(m - k));
            if !c.is_zero() && c.ring_degree() != Some(0) {
                return None;
            }
            out.push(fam.collapse(&c)?);
        }
        Some(out)
    }

    /// Apply the equation symbolically to `z1^{p1} z2^{p2} (z1-z2)^{p12}`
    /// (rational exponents): returns true when the residual is identically
    /// zero. The k-th logarithmic derivative is computed exactly in the
    /// fraction field.
    pub fn annihilates_power_product(&self, p1: &Q, p2: &Q, p12: &Q) -> bool {
        let z1 = RatFunc::from_ring(&RingElem::monomial(1, 0, Q::one()));
        let z2 = RatFunc::from_ring(&RingElem::monomial(0, 1, Q::one()));
        let dz = z1.sub(&z2);
        let l = if self.slot == 1 {
            RatFunc::from_ring(&RingElem::constant(p1.clone()))
                .div(&z1)
                .add(&RatFunc::from_ring(&RingElem::constant(p12.clone())).div(&dz))
        } else {
            RatFunc::from_ring(&RingElem::constant(p2.clone()))
                .div(&z2)
                .sub(&RatFunc::from_ring(&RingElem::constant(p12.clone())).div(&dz))
        };
        // q_k = (d^k F / dv^k) / F, q_0 = 1, q_{k+1} = q_k' + q_k l
        let mut qs = vec![RatFunc::one()];
        for k in 0..self.order {
            let d = ratfunc_derivative(&qs[k], self.slot);
            qs.push(d.add(&qs[k].mul(&l)));
        }
        let mut acc = qs[self.order].clone();
        for k in 1..=self.order {
            let a = RatFunc::from_ring(&self.coeffs[k - 1]);
            acc = acc.add(&a.mul(&qs[self.order - k]));
        }
        acc.is_zero()
    }
}

impl fmt::Display for ODESystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var_name();
        write!(f, "d^{}phi/d{}^{}", self.order, v, self.order)?;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let d = self.order - k - 1;
            if d == 0 {
                write!(f, " + ({}) phi", a)?;
            } else {
                write!(f, " + ({}) d^{}phi/d{}^{}", a, d, v, d)?;
            }
        }
        write!(f, " = 0")
    }
}

/// Derivative of a bivariate rational function with respect to z1 (slot 1)
/// or z2 (slot 2).
pub fn ratfunc_derivative(r: &RatFunc, slot: usize) -> RatFunc {
    let dn = if slot == 1 { r.num.d_z1() } else { r.num.d_z2() };
    let dd = if slot == 1 { r.den.d_z1() } else { r.den.d_z2() };
    RatFunc::new(dn.mul(&r.den).sub(&r.num.mul(&dd)), r.den.mul(&r.den))
}

/// Exact witness of the linear dependence behind a derived equation.
#[derive(Debug)]
pub struct DependencyWitness {
    /// Column ordering: the complement-pure quadruples spanning the union
    /// of the normal-form supports.
    pub quads: Vec<[usize; 4]>,
    /// Normal-form coordinate rows for insertions j = 0..m.
    pub normals: Vec<Vec<RatFunc>>,
    /// `c_0, ..., c_m` with `c_m = 1`: together with the relation
    /// multipliers, `sum_j c_j * normals[j] + sum relation parts = 0`.
    pub coeffs: Vec<RatFunc>,
    /// Multipliers of relation-module generators used in the dependence,
    /// each with the generator's coordinate row. Generators are exact
    /// R-combinations of reduced relation instances, so every evaluation
    /// functional annihilates them.
    pub relation_parts: Vec<(RingElem, Vec<RatFunc>)>,
    /// Reductions (with certificates) of the m+1 insertions.
    pub reductions: Vec<Reduction>,
}

impl DependencyWitness {
    /// Check the full linear combination is exactly zero.
    pub fn is_exact(&self) -> bool {
        for col in 0..self.quads.len() {
            let mut acc = RatFunc::zero();
            for (j, row) in self.normals.iter().enumerate() {
                acc = acc.add(&self.coeffs[j].mul(&row[col]));
            }
            for (mult, row) in &self.relation_parts {
                acc = acc.add(&RatFunc::from_ring(mult).mul(&row[col]));
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }
}

/// Generators of the R-module spanned by the normal forms of all relation
/// instances within the truncation window: the part of the relation
/// submodule invisible to the (non-confluent) rewriting. Each generator is
/// the exact normal form of a single relation instance (with its
/// (z1-z2)-pole cleared); instances whose evaluations are already spanned
/// by earlier generators are skipped to keep the downstream eliminations
/// small, which only thins the generating set and never enlarges the
/// module.
pub struct RelationBasis {
    pub gens: Vec<TensorElem>,
}

/// Incremental Gaussian elimination over Q applied to vectors of Laurent
/// polynomials evaluated at fixed generic rational points, one span per
/// point (the Q(x)-multipliers take unrelated values at distinct points).
/// At a single point, the evaluation of the Q(x)-span equals the Q-span of
/// the evaluations, so evaluation non-membership at any point is an exact
/// proof of non-membership over Q(x) (hence over every coefficient ring of
/// the dependence solves). Evaluation membership is only a strong hint and
/// is always followed by an exact solve before being relied on.
struct EvalSpan {
    points: Vec<Q>,
    basis: Vec<Vec<(usize, Vec<Q>)>>,
}

impl EvalSpan {
    fn new() -> Self {
        let points = vec![qr(7, 3), qr(-5, 2)];
        let basis = vec![Vec::new(); points.len()];
        EvalSpan { points, basis }
    }

    fn residual(&self, pt: usize, v: &[LaurentUni]) -> Vec<Q> {
        let mut v: Vec<Q> = v
            .iter()
            .map(|l| l.eval(&self.points[pt]).expect("nonzero evaluation point"))
            .collect();
        for (p, b) in &self.basis[pt] {
            if !v[*p].is_zero() {
                let f = &v[*p] / &b[*p];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= &f * bi;
                }
            }
        }
        v
    }

    /// True when the evaluation lies in the span at every point.
    fn contains(&self, v: &[LaurentUni]) -> bool {
        (0..self.points.len()).all(|pt| self.residual(pt, v).iter().all(Q::is_zero))
    }

    /// Insert a vector; returns false when its evaluation was already in
    /// the span at every point.
    fn insert(&mut self, v: &[LaurentUni]) -> bool {
        let mut grew = false;
        for pt in 0..self.points.len() {
            let r = self.residual(pt, v);
            if let Some(p) = r.iter().position(|c| !c.is_zero()) {
                self.basis[pt].push((p, r));
                grew = true;
            }
        }
        grew
    }
}

/// All quadruples of total weight at most `budget`.
fn quads_up_to(sys: &System, budget: &Q) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    let weights: Vec<Vec<Q>> = (0..4)
        .map(|i| {
            sys.slots[i]
                .module
                .basis
                .iter()
                .map(|b| b.weight.clone())
                .collect()
        })
        .collect();
    for (a, wa) in weights[0].iter().enumerate() {
        if wa > budget {
            continue;
        }
        for (b, wb) in weights[1].iter().enumerate() {
            let s1 = wa + wb;
            if &s1 > budget {
                continue;
            }
            for (c, wc) in weights[2].iter().enumerate() {
                let s2 = &s1 + wc;
                if &s2 > budget {
                    continue;
                }
                for (d, wd) in weights[3].iter().enumerate() {
                    if &(&s2 + wd) <= budget {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// The complement-pure quadruples of total weight <= M, in sorted order:
/// the coordinate window of all normal forms.
fn complement_quads(sys: &System) -> Result<Vec<[usize; 4]>> {
    let m = sys.compute_m()?;
    let comps: Vec<Vec<usize>> = (0..4)
        .map(|i| {
            let mut v: Vec<usize> = sys.complement[i].iter().copied().collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut out = Vec::new();
    for &a in &comps[0] {
        for &b in &comps[1] {
            for &c in &comps[2] {
                for &d in &comps[3] {
                    if sys.quad_weight(&[a, b, c, d]) <= m {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Enumerate relation instances on quadruples of weight <= M with
/// generators up to a weight bound, reduce each, and keep the nonzero
/// normal forms, deduplicated up to a rational scalar. Instances outside
/// the truncation are skipped.
pub fn relation_basis(sys: &System) -> Result<RelationBasis> {
    let m = sys.compute_m()?;
    let min_total: Q = (0..4)
        .map(|i| sys.slots[i].module.min_weight.clone())
        .fold(Q::zero(), |a, b| a + b);
    let gap = (&m - &min_total).ceil();
    let u_bound = gap + qi(2);
    let us = vplus(sys.algebra(), &u_bound);
    let quads = quads_up_to(sys, &m);
    let rows = complement_quads(sys)?;
    let fam = LocusFamily::Dz;
    // primitive form of a collapsed column: dedup key up to scalar
    let primitive = |v: &[LaurentUni]| -> Vec<(i64, Vec<Q>)> {
        use num::bigint::BigInt;
        use num::Integer;
        let mut g = BigInt::from(0);
        let mut l = BigInt::from(1);
        let mut neg = false;
        for e in v.iter() {
            for c in &e.poly.c {
                if c.is_zero() {
                    continue;
                }
                if g.is_zero() {
                    neg = c < &Q::zero();
                }
                g = g.gcd(c.numer());
                l = l.lcm(c.denom());
            }
        }
        let mut lambda = Q::new(l, g.max(BigInt::from(1)));
        if neg {
            lambda = -lambda;
        }
        let s0 = v
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.shift)
            .min()
            .unwrap_or(0);
        v.iter()
            .map(|e| {
                (
                    if e.is_zero() { 0 } else { e.shift - s0 },
                    e.poly.c.iter().map(|c| c * &lambda).collect(),
                )
            })
            .collect()
    };
    let mut seen_cols: BTreeSet<Vec<(i64, Vec<Q>)>> = BTreeSet::new();
    let mut gens = Vec::new();
    for quad in &quads {
        for kind in [RelKind::A, RelKind::B, RelKind::C, RelKind::D] {
            for &u in &us {
                let Ok(rel) = sys.gen_relation(kind, u, *quad) else {
                    continue;
                };
                let Ok(red) = reduce(sys, &rel.elem, MAX_REDUCE_STEPS) else {
                    continue;
                };
                if red.normal.is_zero() {
                    continue;
                }
                // clear the (z1-z2)-pole so the generator collapses at
                // every locus family without per-column shift bookkeeping
                let p = red
                    .normal
                    .terms
                    .values()
                    .map(RingElem::pole_dz)
                    .max()
                    .unwrap_or(0)
                    .max(0);
                let cleared = red.normal.scale_ring(&RingElem::dz_power(p));
                let v: Option<Vec<LaurentUni>> = rows
                    .iter()
                    .map(|q| {
                        fam.collapse(
                            &cleared.terms.get(q).cloned().unwrap_or_else(RingElem::zero),
                        )
                    })
                    .collect();
                let Some(v) = v else {
                    return Err(Error::InconsistentModule(
                        "relation normal form has an uncleared pole".into(),
                    ));
                };
                if seen_cols.insert(primitive(&v)) {
                    gens.push(cleared);
                }
            }
        }
    }
    Ok(RelationBasis { gens })
}

fn insertion_elem(sys: &System, slot: usize, quad: &[usize; 4], k: usize) -> Result<TensorElem> {
    let rep = &sys.slots[slot];
    let mut v = Vect::basis(quad[slot]);
    for _ in 0..k {
        v = rep.l(-1, &v)?;
    }
    let mut t = TensorElem::zero();
    for (idx, c) in &v.0 {
        let mut q = *quad;
        q[slot] = *idx;
        t.add_term(q, &RingElem::constant(c.clone()));
    }
    Ok(t)
}

fn provenance(sys: &System, quad: &[usize; 4]) -> Vec<(String, usize)> {
    (0..4)
        .map(|i| (sys.slots[i].module.name.clone(), quad[i]))
        .collect()
}

/// Number of complement-pure quadruples of total weight <= M: the dimension
/// of the normal-form window, hence a hard bound on the equation order.
pub fn normal_space_dim(sys: &System) -> Result<usize> {
    let m = sys.compute_m()?;
    let mut count = 0usize;
    let comps: Vec<Vec<usize>> = (0..4)
        .map(|i| {
            let mut v: Vec<usize> = sys.complement[i].iter().copied().collect();
            v.sort_unstable();
            v
        })
        .collect();
    for &a in &comps[0] {
        for &b in &comps[1] {
            for &c in &comps[2] {
                for &d in &comps[3] {
                    if sys.quad_weight(&[a, b, c, d]) <= m {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

const MAX_REDUCE_STEPS: usize = 2_000_000;

/// One column of a collapsed dependence problem: a unit monomial shift
/// times a homogeneous tensor element.
struct DepColumn<'a> {
    /// Shift as (z1 exponent, z2 exponent, (z1-z2) exponent).
    shift: (i64, i64, i64),
    elem: &'a TensorElem,
}

impl DepColumn<'_> {
    fn shift_ring(&self) -> RingElem {
        RingElem::monomial(self.shift.0, self.shift.1, Q::one())
            .mul(&RingElem::dz_power(self.shift.2))
    }
}

struct CollapsedProblem {
    cols: Vec<Vec<LaurentUni>>,
    rhs: Vec<LaurentUni>,
    /// Per-column z2-offset relative to the rhs normalization.
    offsets: Vec<i64>,
    /// Per-column shift-ratio exponents (column shift minus rhs shift).
    ratio: Vec<(i64, i64, i64)>,
}

/// Collapse a homogeneous dependence problem `rhs + sum_c mu_c col_c = 0`
/// (unknown multipliers mu_c in R) to the degree-0 coordinate of the locus
/// family, keying rows by the union of supports.
fn collapse_problem(
    sys: &System,
    cols: &[DepColumn<'_>],
    rhs: &DepColumn<'_>,
    fam: LocusFamily,
) -> Result<CollapsedProblem> {
    let mut quad_set = BTreeSet::new();
    for c in cols.iter().chain(std::iter::once(rhs)) {
        quad_set.extend(c.elem.terms.keys().copied());
    }
    let quads: Vec<[usize; 4]> = quad_set.into_iter().collect();
    let tau = |c: &DepColumn<'_>| -> Result<Option<Q>> {
        match tensor_degree(sys, c.elem) {
            Some(t) => {
                let s = c.shift_ring();
                let d = s.ring_degree().ok_or_else(|| {
                    Error::InconsistentModule("non-homogeneous shift".into())
                })?;
                Ok(Some(t + qi(d)))
            }
            None => {
                if c.elem.is_zero() {
                    Ok(None)
                } else {
                    Err(Error::InconsistentModule(
                        "non-homogeneous dependence column".into(),
                    ))
                }
            }
        }
    };
    let tau_rhs = tau(rhs)?.ok_or_else(|| {
        Error::InconsistentModule("zero right-hand side in dependence".into())
    })?;
    let collapse_one = |c: &DepColumn<'_>| -> Result<Vec<LaurentUni>> {
        let s = c.shift_ring();
        quads
            .iter()
            .map(|q| {
                let e = c
                    .elem
                    .terms
                    .get(q)
                    .map_or_else(RingElem::zero, |e| e.mul(&s));
                fam.collapse(&e).ok_or_else(|| {
                    Error::InconsistentModule(
                        "locus-prime pole not cleared by the column shift".into(),
                    )
                })
            })
            .collect()
    };
    let mut collapsed = Vec::with_capacity(cols.len());
    let mut offsets = Vec::with_capacity(cols.len());
    let mut ratio = Vec::with_capacity(cols.len());
    for c in cols {
        let off = match tau(c)? {
            Some(t) => {
                let d = t - &tau_rhs;
                if !d.is_integer() {
                    // incommensurable grading: the column cannot take part
                    offsets.push(0);
                    collapsed.push(vec![LaurentUni::zero(); quads.len()]);
                    ratio.push((0, 0, 0));
                    continue;
                }
                d.to_integer().try_into().map_err(|_| {
                    Error::ResourceCap("degree offset out of range".into())
                })?
            }
            None => 0,
        };
        offsets.push(off);
        collapsed.push(collapse_one(c)?);
        ratio.push((
            c.shift.0 - rhs.shift.0,
            c.shift.1 - rhs.shift.1,
            c.shift.2 - rhs.shift.2,
        ));
    }
    let rhs_col = collapse_one(rhs)?;
    Ok(CollapsedProblem {
        cols: collapsed,
        rhs: rhs_col,
        offsets,
        ratio,
    })
}

impl CollapsedProblem {
    /// Solve with multipliers allowed an (x-1)-pole of order up to `e_max`;
    /// returns the multipliers as ring elements (already including shift
    /// ratios), i.e. `rhs_elem + sum mu_c elem_c = 0`.
    fn solve(&self, e_max: usize) -> Option<(Vec<RingElem>, i64)> {
        // solvability over the fraction field is necessary; a failed
        // generic-point evaluation proves it fails, avoiding the
        // localization-exponent loop on hopeless systems
        let mut span = EvalSpan::new();
        for col in &self.cols {
            span.insert(col);
        }
        if !span.contains(&self.rhs) {
            return None;
        }
        // locate candidate solutions (localization exponent and the
        // participating columns) over GF(p) first: the word-sized mirror is
        // orders of magnitude faster than exact elimination, and every
        // candidate is re-solved exactly before being believed
        let fp_cols: Option<Vec<Vec<modp::LFp>>> = self
            .cols
            .iter()
            .map(|col| col.iter().map(modp::LFp::from_exact).collect())
            .collect();
        let fp_rhs: Option<Vec<modp::LFp>> = self
            .rhs
            .iter()
            .map(|g| modp::LFp::from_exact(&g.neg()))
            .collect();
        let xm1 = LaurentUni::from_poly(UniPoly::from_coeffs(vec![-Q::one(), Q::one()]));
        let xm1_fp = modp::LFp::new(0, vec![modp::P - 1, 1]);
        let mut rhs: Vec<LaurentUni> = self.rhs.iter().map(|g| g.neg()).collect();
        let mut fp_state = fp_cols.zip(fp_rhs);
        // assemble the full multiplier vector from an exact sub-solution
        let assemble = |support: &[usize], gs: &[LaurentUni], e: usize| {
            let mut mults = vec![RingElem::zero(); self.cols.len()];
            for (g, &c) in gs.iter().zip(support) {
                let (r1, r2, rd) = self.ratio[c];
                mults[c] = homog_ring(g, e as i64, self.offsets[c]).mul_units(r1, r2, rd);
            }
            (mults, e as i64)
        };
        let all: Vec<usize> = (0..self.cols.len()).collect();
        for e in 0..=e_max {
            if e > 0 {
                for r in rhs.iter_mut() {
                    *r = r.mul(&xm1);
                }
                if let Some((_, fr)) = fp_state.as_mut() {
                    for r in fr.iter_mut() {
                        *r = r.mul(&xm1_fp);
                    }
                }
            }
            let support: Vec<usize> = match &fp_state {
                Some((fc, fr)) => match modp::module_solve_fp(fc, fr) {
                    // no solution mod p: for this exponent, a rational
                    // solution would have to degenerate at p, which the
                    // next exponent retries anyway (e-solutions nest)
                    None => continue,
                    Some(sol) => sol
                        .iter()
                        .enumerate()
                        .filter(|(_, g)| !g.is_zero())
                        .map(|(c, _)| c)
                        .collect(),
                },
                None => all.clone(),
            };
            let sub: Vec<Vec<LaurentUni>> =
                support.iter().map(|&c| self.cols[c].clone()).collect();
            if let Some(gs) = laurent_module_solve(&sub, &[rhs.clone()]) {
                return Some(assemble(&support, &gs, e));
            }
        }
        None
    }
}

/// Shared driver: search the least m such that `NF(t_m) + sum a_j NF(t_j)
/// + sum mu_rho NF(rho) = 0` with ladder shifts prescribed per mode.
enum Ansatz {
    /// Free R-coefficients (monic): ladder column j shifted by z2^j.
    Free,
    /// Regular at a locus family: ladder column k shifted by p^{S+k}
    /// (coefficient of the k-th derivative is c_k p^{k-m}, c_k of degree
    /// 0 without poles at the prime).
    Regular(LocusFamily),
}

fn derive_core(
    sys: &System,
    slot: usize,
    quad: &[usize; 4],
    ansatz: &Ansatz,
) -> Result<(ODESystem, DependencyWitness)> {
    if slot != 1 && slot != 2 {
        return Err(Error::Input("derive slot must be 1 or 2".into()));
    }
    let cap = normal_space_dim(sys)? + 1;
    let rels = relation_basis(sys)?;
    let mut reductions: Vec<Reduction> = Vec::new();
    let mut normals: Vec<TensorElem> = Vec::new();
    for m in 0..=cap {
        let t = insertion_elem(sys, slot, quad, m)?;
        let red = reduce(sys, &t, MAX_REDUCE_STEPS)?;
        normals.push(red.normal.clone());
        reductions.push(red);
        if m == 0 {
            continue;
        }
        let solved = solve_at_order(sys, &normals, &rels, m, ansatz)?;
        let Some((a_ladder, mu_rel)) = solved else {
            continue;
        };
        // exact replay in the tensor module
        let mut acc = normals[m].clone();
        for (j, a) in a_ladder.iter().enumerate() {
            acc = acc.add(&normals[j].scale_ring(a));
        }
        for (mu, n) in mu_rel.iter().map(|(i, mu)| (mu, &rels.gens[*i])) {
            acc = acc.add(&n.scale_ring(mu));
        }
        if !acc.is_zero() {
            return Err(Error::InconsistentModule(
                "dependence fails exact replay in the tensor module".into(),
            ));
        }
        if let Ansatz::Regular(fam) = ansatz {
            for (k, a) in a_ladder.iter().enumerate() {
                let c = a.mul(&fam.prime_power(m as i64 - k as i64));
                if !c.is_zero() && (c.ring_degree() != Some(0) || fam.pole(&c) > 0) {
                    return Err(Error::InconsistentModule(
                        "regular-ansatz witness is not of degree 0".into(),
                    ));
                }
            }
        }
        let quads: Vec<[usize; 4]> = {
            let mut s = BTreeSet::new();
            for n in &normals {
                s.extend(n.terms.keys().copied());
            }
            for (i, _) in &mu_rel {
                s.extend(rels.gens[*i].terms.keys().copied());
            }
            s.into_iter().collect()
        };
        let coord = |t: &TensorElem| -> Vec<RatFunc> {
            quads
                .iter()
                .map(|q| t.terms.get(q).map_or_else(RatFunc::zero, RatFunc::from_ring))
                .collect()
        };
        let mut cs: Vec<RatFunc> = a_ladder.iter().map(RatFunc::from_ring).collect();
        cs.push(RatFunc::one());
        let normal_rows = normals.iter().map(&coord).collect();
        let relation_parts = mu_rel
            .iter()
            .map(|(i, mu)| (mu.clone(), coord(&rels.gens[*i])))
            .collect();
        let witness = DependencyWitness {
            normals: normal_rows,
            quads,
            coeffs: cs,
            relation_parts,
            reductions,
        };
        if !witness.is_exact() {
            return Err(Error::InconsistentModule(
                "dependency witness fails exact replay".into(),
            ));
        }
        // ODE coefficient of the (m-k)-th derivative is a_k
        let coeffs: Vec<RingElem> =
            (1..=m).map(|k| a_ladder[m - k].clone()).collect();
        let ode = ODESystem {
            slot,
            order: m,
            coeffs,
            provenance: provenance(sys, quad),
            regular_loci: BTreeSet::new(),
        };
        return Ok((ode, witness));
    }
    match ansatz {
        Ansatz::Free => Err(Error::NoDependence(cap)),
        Ansatz::Regular(_) => Err(Error::NotRegular(format!(
            "no regular-ansatz dependence through order {cap}"
        ))),
    }
}

/// Attempt the dependence at a fixed order m. Returns the ladder
/// coefficients `a_0..a_{m-1}` and the used relation multipliers.
#[allow(clippy::type_complexity)]
fn solve_at_order(
    sys: &System,
    normals: &[TensorElem],
    rels: &RelationBasis,
    m: usize,
    ansatz: &Ansatz,
) -> Result<Option<(Vec<RingElem>, Vec<(usize, RingElem)>)>> {
    // trivial dependence: the m-th insertion vanished
    if normals[m].is_zero() {
        return Ok(Some((vec![RingElem::zero(); m], Vec::new())));
    }
    let fam = LocusFamily::Dz;
    let pole_of = |t: &TensorElem| -> i64 {
        t.terms
            .values()
            .map(|e| match ansatz {
                Ansatz::Free => e.pole_dz(),
                Ansatz::Regular(f) => f.pole(e),
            })
            .max()
            .unwrap_or(0)
    };
    let mut cols: Vec<DepColumn<'_>> = Vec::new();
    // index map: ladder j -> column j; relation copies tagged afterwards
    let mut rel_tags: Vec<usize> = Vec::new();
    let rhs;
    match ansatz {
        Ansatz::Free => {
            // uniform (z1-z2)-pole clearing; ladder column j gets z2^j
            let p = normals[..=m]
                .iter()
                .chain(rels.gens.iter())
                .map(pole_of)
                .max()
                .unwrap_or(0)
                .max(0);
            for (j, n) in normals[..m].iter().enumerate() {
                cols.push(DepColumn { shift: (0, j as i64, p), elem: n });
            }
            for (i, n) in rels.gens.iter().enumerate() {
                cols.push(DepColumn { shift: (0, 0, p), elem: n });
                rel_tags.push(i);
            }
            rhs = DepColumn { shift: (0, m as i64, p), elem: &normals[m] };
        }
        Ansatz::Regular(f) => {
            // shift S clears all ladder poles of p^{S+k} NF(t_k)
            let s = normals[..=m]
                .iter()
                .enumerate()
                .map(|(k, n)| pole_of(n) - k as i64)
                .max()
                .unwrap_or(0);
            let fp = |k: i64| match f {
                LocusFamily::Dz => (0, 0, k),
                LocusFamily::Z1 => (k, 0, 0),
                LocusFamily::Z2 => (0, k, 0),
            };
            for (k, n) in normals[..m].iter().enumerate() {
                cols.push(DepColumn { shift: fp(s + k as i64), elem: n });
            }
            // relation multipliers may carry prime poles up to order m:
            // one column copy per pole depth
            for (i, n) in rels.gens.iter().enumerate() {
                let base = pole_of(n);
                for d in 0..=m as i64 {
                    cols.push(DepColumn { shift: fp(base + d), elem: n });
                    rel_tags.push(i);
                }
            }
            rhs = DepColumn { shift: fp(s + m as i64), elem: &normals[m] };
        }
    }
    let fam_used = match ansatz {
        Ansatz::Free => fam,
        Ansatz::Regular(f) => *f,
    };
    let problem = collapse_problem(sys, &cols, &rhs, fam_used)?;
    let e_max = match ansatz {
        // localized search for free coefficients; the regular ansatz
        // forbids locus-prime poles in the witnesses
        Ansatz::Free => {
            let span = |g: &LaurentUni| g.poly.degree().map_or(0, |d| d + 1);
            problem
                .cols
                .iter()
                .flatten()
                .chain(problem.rhs.iter())
                .map(span)
                .sum::<usize>()
                .min(200)
                + m
        }
        Ansatz::Regular(_) => 0,
    };
    let Some((mults, _e)) = problem.solve(e_max) else {
        return Ok(None);
    };
    let a_ladder = mults[..m].to_vec();
    let mut mu_rel: Vec<(usize, RingElem)> = Vec::new();
    for (c, mu) in mults[m..].iter().enumerate() {
        if !mu.is_zero() {
            mu_rel.push((rel_tags[c], mu.clone()));
        }
    }
    Ok(Some((a_ladder, mu_rel)))
}

/// Derive the minimal-order monic equation in the slot's variable.
pub fn derive(
    sys: &System,
    slot: usize,
    quad: &[usize; 4],
) -> Result<(ODESystem, DependencyWitness)> {
    derive_core(sys, slot, quad, &Ansatz::Free)
}

/// Derive an equation regular at the given locus: minimal m such that the
/// coefficient of the k-th derivative is `c_k p^{k-m}` with `c_k` of ring
/// degree 0 and no pole at the locus prime p. The resulting equation,
/// rewritten in the locus's local coordinate, has a regular singular point
/// there.
pub fn derive_regular(
    sys: &System,
    slot: usize,
    quad: &[usize; 4],
    locus: Locus,
) -> Result<(ODESystem, DependencyWitness)> {
    let Some(fam) = locus.family() else {
        return Err(Error::UnsupportedLocus(format!(
            "locus {} is not supported by the normalized ansatz; use the \
             unconstrained derivation and a Fuchs-criterion check instead",
            locus.name()
        )));
    };
    match (locus, slot) {
        (Locus::Z1AtZero, 2) | (Locus::Z2AtZero, 1) => {
            return Err(Error::Input(format!(
                "locus {} concerns the other variable's equation (slot {slot} given)",
                locus.name()
            )));
        }
        _ => {}
    }
    let (mut ode, wit) = derive_core(sys, slot, quad, &Ansatz::Regular(fam))?;
    ode.regular_loci.insert(locus);
    // the three (z1-z2)-loci share the same normalized equation
    if fam == LocusFamily::Dz {
        ode.regular_loci
            .extend([Locus::Z1EqZ2, Locus::Z3AtZero, Locus::Z4AtZero]);
    }
    Ok((ode, wit))
}

/// Indicial polynomial of a regular-flagged equation at a locus: with
/// `phi = p^s (analytic)`, the leading behavior gives
/// `sum_k c_k(locus) eps^k s(s-1)...(s-k+1) = 0`, `eps` the derivative of
/// the prime by the equation's variable.
pub fn indicial_poly(ode: &ODESystem, locus: Locus) -> Result<UniPoly> {
    if !ode.regular_loci.contains(&locus) {
        return Err(Error::NotRegular(format!(
            "equation is not regular-flagged at {}",
            locus.name()
        )));
    }
    let fam = locus.family().ok_or_else(|| {
        Error::UnsupportedLocus(format!("no indicial data at {}", locus.name()))
    })?;
    let cs = ode.regular_witnesses(fam).ok_or_else(|| {
        Error::NotRegular("coefficients do not fit the regular ansatz".into())
    })?;
    let eps = match (fam, ode.slot) {
        (LocusFamily::Dz, 2) => -Q::one(),
        _ => Q::one(),
    };
    let x0 = fam.locus_point();
    let m = ode.order;
    // falling factorial [s]_k built incrementally
    let mut falling = UniPoly::one();
    let mut acc = UniPoly::zero();
    let mut epspow = Q::one();
    for k in 0..=m {
        let gamma = if k == m {
            Q::one()
        } else {
            cs[k].eval(&x0).ok_or_else(|| {
                Error::NotRegular("witness has a pole at the locus point".into())
            })?
        };
        acc = acc.add(&falling.scale(&(gamma * &epspow)));
        falling = falling.mul(&UniPoly::from_coeffs(vec![qi(-(k as i64)), Q::one()]));
        epspow *= &eps;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::heisenberg::FockSystem;
    use crate::q::qr;
    use crate::tensor::System as TSystem;

    fn fock_sys(l1: Q, l2: Q, l3: Q, depth: i64) -> (TSystem, [Q; 4]) {
        let fs = FockSystem::new(depth);
        let l0 = -(&l1 + &l2 + &l3);
        let charges = [l0.clone(), l1.clone(), l2.clone(), l3.clone()];
        let slots = [
            fs.module(&l0).rep.clone(),
            fs.module(&l1).rep.clone(),
            fs.module(&l2).rep.clone(),
            fs.module(&l3).rep.clone(),
        ];
        (TSystem::new(slots).unwrap(), charges)
    }

    fn lowest_quad(sys: &TSystem) -> [usize; 4] {
        std::array::from_fn(|i| {
            let m = &sys.slots[i].module;
            m.by_weight[&m.min_weight][0]
        })
    }

    fn vacuum_sys(depth: i64) -> (TSystem, [Q; 4]) {
        fock_sys(Q::zero(), Q::zero(), Q::zero(), depth)
    }

    #[test]
    fn vacuum_quadruple_gives_first_order_trivial_equation() {
        let (sys, _) = vacuum_sys(4);
        let quad = lowest_quad(&sys);
        for slot in [1usize, 2] {
            let (ode, wit) = derive(&sys, slot, &quad).unwrap();
            assert_eq!(ode.order, 1);
            assert!(ode.coeffs[0].is_zero(), "vacuum equation should be dphi = 0");
            assert!(wit.is_exact());
        }
    }

    #[test]
    fn fock_lowest_first_order_matches_free_field_exponents() {
        let l1 = qr(1, 2);
        let l2 = qr(1, 3);
        let l3 = qr(1, 5);
        let (sys, ch) = fock_sys(l1.clone(), l2.clone(), l3.clone(), 4);
        let quad = lowest_quad(&sys);
        let p1 = &ch[1] * &ch[3];
        let p2 = &ch[2] * &ch[3];
        let p12 = &ch[1] * &ch[2];
        for slot in [1usize, 2] {
            let (ode, wit) = derive(&sys, slot, &quad).unwrap();
            assert_eq!(ode.order, 1, "slot {slot}");
            assert!(wit.is_exact());
            assert!(
                ode.annihilates_power_product(&p1, &p2, &p12),
                "slot-{slot} equation does not annihilate the free-field correlator"
            );
        }
        // slot 1 explicitly: a_1 = -(p1/z1 + p12/(z1-z2))
        let (ode, _) = derive(&sys, 1, &quad).unwrap();
        let expected = RingElem::monomial(-1, 0, -p1.clone())
            .add(&RingElem::dz_power(-1).scale(&-p12.clone()));
        assert_eq!(ode.coeffs[0], expected);
    }

    #[test]
    fn fock_descendant_equation_is_exact() {
        let l1 = qr(1, 2);
        let l2 = qr(1, 3);
        let l3 = qr(1, 5);
        let (sys, _) = fock_sys(l1, l2, l3, 5);
        let mut quad = lowest_quad(&sys);
        let m1 = &sys.slots[1].module;
        quad[1] = m1.by_weight[&(&m1.min_weight + qi(1))][0];
        let (ode, wit) = derive(&sys, 1, &quad).unwrap();
        assert!(ode.order >= 1);
        assert!(wit.is_exact());
    }

    #[test]
    fn regular_ansatz_at_dz_locus_has_degree_zero_witnesses() {
        let l1 = qr(1, 2);
        let l2 = qr(1, 3);
        let l3 = qr(1, 5);
        let (sys, ch) = fock_sys(l1.clone(), l2.clone(), l3.clone(), 4);
        let quad = lowest_quad(&sys);
        let p12 = &ch[1] * &ch[2];
        for locus in [Locus::Z1EqZ2, Locus::Z3AtZero] {
            let (ode, wit) = derive_regular(&sys, 1, &quad, locus).unwrap();
            assert!(wit.is_exact());
            let cs = ode.regular_witnesses(LocusFamily::Dz).unwrap();
            assert_eq!(cs.len(), ode.order);
            let ind = indicial_poly(&ode, locus).unwrap();
            let (roots, _) = ind.rational_roots();
            assert!(
                roots.iter().any(|(r, _)| r == &p12),
                "indicial roots at {} missing p12 = {}: {:?}",
                locus.name(),
                p12,
                roots
            );
        }
    }

    #[test]
    fn regular_ansatz_at_z1_zero_contains_p1() {
        let l1 = qr(1, 2);
        let l2 = qr(1, 3);
        let l3 = qr(1, 5);
        let (sys, ch) = fock_sys(l1.clone(), l2.clone(), l3.clone(), 4);
        let quad = lowest_quad(&sys);
        let p1 = &ch[1] * &ch[3];
        let (ode, _) = derive_regular(&sys, 1, &quad, Locus::Z1AtZero).unwrap();
        let ind = indicial_poly(&ode, Locus::Z1AtZero).unwrap();
        let (roots, _) = ind.rational_roots();
        assert!(roots.iter().any(|(r, _)| r == &p1), "roots {roots:?}");
    }

    #[test]
    fn ising_sigma_quadruple_is_second_order() {
        use crate::models::virasoro::{build_simple, build_virasoro, ising_charges};
        let (c, hs) = ising_charges();
        let depth = 6;
        let voa = build_virasoro(&c, depth);
        let sigma = build_simple(&voa, &hs[2], depth).unwrap();
        let slots = std::array::from_fn(|_| sigma.rep.clone());
        let sys = TSystem::new(slots).unwrap();
        let quad = lowest_quad(&sys);
        let (ode, wit) = derive(&sys, 1, &quad).unwrap();
        assert_eq!(ode.order, 2);
        assert!(wit.is_exact());
    }

    #[test]
    fn unsupported_infinity_locus_errors() {
        let (sys, _) = vacuum_sys(3);
        let quad = lowest_quad(&sys);
        let err = derive_regular(&sys, 1, &quad, Locus::Z1AtInf).unwrap_err();
        assert!(matches!(err, Error::UnsupportedLocus(_)));
    }
}
