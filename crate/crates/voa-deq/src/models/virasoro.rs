//! Virasoro models: the universal vacuum algebra of central charge `c`
//! (partition basis with parts >= 2), Verma modules `M(c, h)` (parts >= 1),
//! and their simple quotients via the radical of the Shapovalov form.

use super::partitions_up_to;
use crate::linalg::{Mat, RowSpace};
use crate::module::{BasisVec, Construction, Gen, ModuleData, Rep, VOAData, Vect};
use crate::q::{qi, qr, Q};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// One Virasoro module together with its partition labels. For simple
/// quotients the labels are the chosen monomial representatives.
pub struct Vir {
    pub rep: Arc<Rep>,
    pub h: Q,
    pub depth: i64,
    pub parts: Vec<Vec<i64>>,
    pub index: HashMap<Vec<i64>, usize>,
}

/// Combination of Verma monomials.
type Combo = BTreeMap<Vec<i64>, Q>;

/// Normal-ordering engine for `L_m` on monomials `L_{-n1} ... L_{-nk} |h>`
/// (n1 >= ... >= nk), using
/// `[L_m, L_n] = (m - n) L_{m+n} + c/12 m (m^2 - 1) delta_{m+n,0}`.
struct VirAlg {
    c: Q,
    h: Q,
    /// true for the vacuum algebra, where `L_{-1} |0> = 0`
    kill_l1: bool,
    memo: Mutex<HashMap<(Vec<i64>, i64), Combo>>,
}

impl VirAlg {
    fn new(c: &Q, h: &Q, kill_l1: bool) -> Self {
        Self { c: c.clone(), h: h.clone(), kill_l1, memo: Mutex::new(HashMap::new()) }
    }

    fn lm_one(&self, parts: &[i64], m: i64) -> Combo {
        let key = (parts.to_vec(), m);
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let out = self.lm_one_raw(parts, m);
        self.memo.lock().unwrap().insert(key, out.clone());
        out
    }

    fn lm_one_raw(&self, parts: &[i64], m: i64) -> Combo {
        let mut out = Combo::new();
        if parts.is_empty() {
            if m == 0 {
                add_combo(&mut out, Vec::new(), self.h.clone());
            } else if m == -1 && !self.kill_l1 {
                add_combo(&mut out, vec![1], Q::one());
            } else if m <= -2 {
                add_combo(&mut out, vec![-m], Q::one());
            }
            return out;
        }
        let n1 = parts[0];
        if -m >= n1 {
            let mut p = Vec::with_capacity(parts.len() + 1);
            p.push(-m);
            p.extend_from_slice(parts);
            add_combo(&mut out, p, Q::one());
            return out;
        }
        let rest = &parts[1..];
        // L_m L_{-n1} = L_{-n1} L_m + (m + n1) L_{m - n1}
        //             + c/12 m (m^2 - 1) delta_{m, n1}
        let through = self.lm_one(rest, m);
        merge_combo(&mut out, &self.lm(&through, -n1), &Q::one());
        merge_combo(&mut out, &self.lm_one(rest, m - n1), &qi(m + n1));
        if m == n1 {
            let central = &self.c / qi(12) * qi(m) * qi(m * m - 1);
            let mut r = Combo::new();
            add_combo(&mut r, rest.to_vec(), Q::one());
            merge_combo(&mut out, &r, &central);
        }
        out
    }

    fn lm(&self, combo: &Combo, m: i64) -> Combo {
        let mut out = Combo::new();
        for (p, coeff) in combo {
            merge_combo(&mut out, &self.lm_one(p, m), coeff);
        }
        out
    }
}

fn add_combo(c: &mut Combo, p: Vec<i64>, v: Q) {
    if v.is_zero() {
        return;
    }
    let e = c.entry(p).or_insert_with(Q::zero);
    *e += v;
    if e.is_zero() {
        // keep the map clean
        let mut dead = None;
        for (k, val) in c.iter() {
            if val.is_zero() {
                dead = Some(k.clone());
                break;
            }
        }
        if let Some(k) = dead {
            c.remove(&k);
        }
    }
}

fn merge_combo(into: &mut Combo, from: &Combo, scale: &Q) {
    for (p, v) in from {
        add_combo(into, p.clone(), v * scale);
    }
}

struct VermaAction {
    alg: VirAlg,
    parts: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl crate::module::GenAction for VermaAction {
    fn act(&self, _gen: usize, n: i64, idx: usize) -> Result<Vect> {
        // omega_n = L(n - 1)
        let combo = self.alg.lm_one(&self.parts[idx], n - 1);
        let mut out = Vect::zero();
        for (p, c) in combo {
            out.add_term(self.index[&p], c);
        }
        Ok(out)
    }
}

fn vir_module_data(
    name: &str,
    h: &Q,
    parts: &[Vec<i64>],
    index: &HashMap<Vec<i64>, usize>,
    depth: i64,
) -> ModuleData {
    let basis: Vec<BasisVec> = parts
        .iter()
        .map(|p| {
            let level: i64 = p.iter().sum();
            let mut nm = String::new();
            for r in p {
                nm.push_str(&format!("L(-{})", r));
            }
            nm.push_str(&format!("|{}>", crate::q::q_str(h)));
            let construction = if p.is_empty() {
                Construction::Lowest(0)
            } else {
                Construction::Apply { gen: 0, m: p[0] - 1, sub: index[&p[1..].to_vec()] }
            };
            BasisVec { weight: h + qi(level), name: nm, construction }
        })
        .collect();
    ModuleData::new(name, basis, h + qi(depth))
}

/// The universal vacuum Virasoro algebra of central charge `c`, complete up
/// to weight `depth`.
pub fn build_virasoro(c: &Q, depth: i64) -> Arc<Vir> {
    assert!(depth >= 2);
    let parts = partitions_up_to(depth, 2);
    let index: HashMap<Vec<i64>, usize> =
        parts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let name = format!("Vir(c={})", crate::q::q_str(c));
    let md = vir_module_data(&name, &Q::zero(), &parts, &index, depth);
    let mut omega = Vect::zero();
    omega.add_term(index[&vec![2]], Q::one());
    let voa = Arc::new(VOAData {
        module: md.clone(),
        vacuum: index[&Vec::new()],
        omega,
        central_charge: c.clone(),
        gens: vec![Gen { name: "L".into(), weight: 2 }],
    });
    let action = VermaAction {
        alg: VirAlg::new(c, &Q::zero(), true),
        parts: parts.clone(),
        index: index.clone(),
    };
    let rep = Arc::new(Rep::new(voa, None, md, Box::new(action)));
    Arc::new(Vir { rep, h: Q::zero(), depth, parts, index })
}

/// The Verma module `M(c, h)` over a previously built vacuum algebra.
pub fn build_verma(voa: &Arc<Vir>, h: &Q, depth: i64) -> Arc<Vir> {
    let c = voa.rep.voa.central_charge.clone();
    let parts = partitions_up_to(depth, 1);
    let index: HashMap<Vec<i64>, usize> =
        parts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let name = format!("M({},{})", crate::q::q_str(&c), crate::q::q_str(h));
    let md = vir_module_data(&name, h, &parts, &index, depth);
    let action = VermaAction {
        alg: VirAlg::new(&c, h, false),
        parts: parts.clone(),
        index: index.clone(),
    };
    let rep = Arc::new(Rep::new(
        voa.rep.voa.clone(),
        Some(voa.rep.clone()),
        md,
        Box::new(action),
    ));
    Arc::new(Vir { rep, h: h.clone(), depth, parts, index })
}

/// Monomials of one level (descending lex) and the Shapovalov Gram matrix
/// `G_ij = < L_{-mu_i} |h>, L_{-mu_j} |h> >` with `< |h>, |h> > = 1`.
pub fn gram_matrix(c: &Q, h: &Q, level: i64) -> (Vec<Vec<i64>>, Mat) {
    let mons: Vec<Vec<i64>> = partitions_up_to(level, 1)
        .into_iter()
        .filter(|p| p.iter().sum::<i64>() == level)
        .collect();
    let alg = VirAlg::new(c, h, false);
    let n = mons.len();
    let mut g = Mat::zeros(n, n);
    for (j, nu) in mons.iter().enumerate() {
        for (i, mu) in mons.iter().enumerate() {
            // < L_{-mu} |h>, x > = < |h>, L_{mu_k} ... L_{mu_1} x > applied
            // outermost (largest) part first
            let mut combo = Combo::new();
            add_combo(&mut combo, nu.clone(), Q::one());
            for &p in mu {
                combo = alg.lm(&combo, p);
            }
            let val = combo.get(&Vec::<i64>::new()).cloned().unwrap_or_else(Q::zero);
            g.set(i, j, val);
        }
    }
    (mons, g)
}

struct QuotLevel {
    mon_index: HashMap<Vec<i64>, usize>,
    /// projection of each Verma monomial onto the selected representatives,
    /// as coefficients over `selected`
    proj: Vec<Vec<Q>>,
    /// global basis indices of the selected monomials
    selected_global: Vec<usize>,
}

struct QuotAction {
    alg: VirAlg,
    parts: Vec<Vec<i64>>, // selected monomials, by global index
    levels: BTreeMap<i64, QuotLevel>,
}

impl crate::module::GenAction for QuotAction {
    fn act(&self, _gen: usize, n: i64, idx: usize) -> Result<Vect> {
        let combo = self.alg.lm_one(&self.parts[idx], n - 1);
        let mut out = Vect::zero();
        for (p, c) in combo {
            let lev: i64 = p.iter().sum();
            let level = self.levels.get(&lev).ok_or_else(|| {
                Error::Truncated(format!("quotient level {} not built", lev))
            })?;
            let mi = level.mon_index[&p];
            for (s, coeff) in level.proj[mi].iter().enumerate() {
                out.add_term(level.selected_global[s], coeff * &c);
            }
        }
        Ok(out)
    }
}

/// The simple quotient `L(c, h)` of the Verma module, with a monomial basis
/// chosen so that each representative is `L_{-n1}` applied to a lower
/// representative.
pub fn build_simple(voa: &Arc<Vir>, h: &Q, depth: i64) -> Result<Arc<Vir>> {
    let c = voa.rep.voa.central_charge.clone();
    let mut levels: BTreeMap<i64, QuotLevel> = BTreeMap::new();
    let mut selected_parts: Vec<Vec<i64>> = Vec::new();
    let mut selected_by_level: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    let mut global = 0usize;
    for lev in 0..=depth {
        let (mons, g) = gram_matrix(&c, h, lev);
        let n = mons.len();
        let mon_index: HashMap<Vec<i64>, usize> =
            mons.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let radical = g.nullspace();
        let mut rs = RowSpace::new(n);
        for r in &radical {
            rs.insert(r.clone());
        }
        let mut selected: Vec<usize> = Vec::new();
        for (mi, p) in mons.iter().enumerate() {
            // the representative must sit over a lower representative
            let ok_rest = p.is_empty()
                || selected_by_level
                    .get(&(lev - p[0]))
                    .map_or(lev == p[0] && p.len() == 1, |s| s.contains(&p[1..].to_vec()));
            if !ok_rest {
                continue;
            }
            let mut e = vec![Q::zero(); n];
            e[mi] = Q::one();
            if rs.insert(e) {
                selected.push(mi);
            }
        }
        if rs.rank() != n {
            return Err(Error::InconsistentModule(format!(
                "no compatible monomial basis for the simple quotient at level {}",
                lev
            )));
        }
        // express each monomial over the representatives modulo the radical
        let ncols = selected.len() + radical.len();
        let mut a = Mat::zeros(n, ncols);
        for (col, &mi) in selected.iter().enumerate() {
            a.set(mi, col, Q::one());
        }
        for (k, r) in radical.iter().enumerate() {
            for (row, v) in r.iter().enumerate() {
                a.set(row, selected.len() + k, v.clone());
            }
        }
        let mut proj = Vec::with_capacity(n);
        for mi in 0..n {
            let mut rhs = vec![Q::zero(); n];
            rhs[mi] = Q::one();
            let x = a.solve(&rhs).ok_or_else(|| {
                Error::InconsistentModule("projection solve failed".into())
            })?;
            proj.push(x[..selected.len()].to_vec());
        }
        let selected_global: Vec<usize> = (0..selected.len()).map(|k| global + k).collect();
        global += selected.len();
        selected_by_level
            .insert(lev, selected.iter().map(|&mi| mons[mi].clone()).collect());
        for &mi in &selected {
            selected_parts.push(mons[mi].clone());
        }
        levels.insert(lev, QuotLevel { mon_index, proj, selected_global });
    }
    let index: HashMap<Vec<i64>, usize> =
        selected_parts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let name = format!("L({},{})", crate::q::q_str(&c), crate::q::q_str(h));
    let md = vir_module_data(&name, h, &selected_parts, &index, depth);
    let action = QuotAction {
        alg: VirAlg::new(&c, h, false),
        parts: selected_parts.clone(),
        levels,
    };
    let rep = Arc::new(Rep::new(
        voa.rep.voa.clone(),
        Some(voa.rep.clone()),
        md,
        Box::new(action),
    ));
    Ok(Arc::new(Vir { rep, h: h.clone(), depth, parts: selected_parts, index }))
}

/// Per-level dimensions of the simple quotient, from the Gram rank.
pub fn simple_dims(c: &Q, h: &Q, depth: i64) -> Vec<usize> {
    (0..=depth).map(|lev| gram_matrix(c, h, lev).1.rank()).collect()
}

/// Central charge and lowest weights of the c = 1/2 minimal model.
pub fn ising_charges() -> (Q, [Q; 3]) {
    (qr(1, 2), [qi(0), qr(1, 2), qr(1, 16)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::check_axioms;

    #[test]
    fn vacuum_algebra_axioms() {
        let v = build_virasoro(&qr(1, 2), 6);
        check_axioms(&v.rep, &qi(4), 2).unwrap();
        // L_2 L_{-2} |0> = c/2 |0>
        let vac = Vect::basis(v.index[&Vec::new()]);
        let x = v.rep.l(-2, &vac).unwrap();
        assert_eq!(v.rep.l(2, &x).unwrap(), vac.scale(&qr(1, 4)));
    }

    #[test]
    fn verma_axioms_and_grading() {
        let v = build_virasoro(&qr(1, 2), 6);
        let m = build_verma(&v, &qr(1, 16), 4);
        check_axioms(&m.rep, &qi(4), 2).unwrap();
        // dims = p(n)
        for (lev, want) in [(0i64, 1usize), (1, 1), (2, 2), (3, 3), (4, 5)] {
            assert_eq!(m.rep.module.dim_at(&(qr(1, 16) + qi(lev))), want);
        }
    }

    #[test]
    fn gram_level_two_singular_vector() {
        // at c = 1/2, h = 1/16 the level-2 Gram matrix is singular with
        // null vector proportional to L_{-1}^2 - 3/4 L_{-2}
        let (mons, g) = gram_matrix(&qr(1, 2), &qr(1, 16), 2);
        assert_eq!(mons, vec![vec![2], vec![1, 1]]);
        assert_eq!(*g.at(0, 0), qr(1, 2)); // 4h + c/2
        assert_eq!(*g.at(0, 1), qr(3, 8)); // 6h
        assert_eq!(*g.at(1, 1), qr(9, 32)); // 8h^2 + 4h
        let ns = g.nullspace();
        assert_eq!(ns.len(), 1);
        let ratio = &ns[0][0] / &ns[0][1];
        assert_eq!(ratio, qr(-3, 4));
    }

    #[test]
    fn simple_quotient_relation() {
        // in L(1/2, 1/16): L(-2) w = 4/3 L(-1)^2 w on the lowest vector
        let v = build_virasoro(&qr(1, 2), 6);
        let s = build_simple(&v, &qr(1, 16), 4).unwrap();
        check_axioms(&s.rep, &qi(4), 2).unwrap();
        let low = Vect::basis(s.index[&Vec::new()]);
        let lhs = s.rep.l(-2, &low).unwrap();
        let rhs = s.rep.l(-1, &s.rep.l(-1, &low).unwrap()).unwrap().scale(&qr(4, 3));
        assert_eq!(lhs, rhs);
        // level dims of L(1/2, 1/16) start 1, 1, 1, 2, 2
        for (lev, want) in [(0i64, 1usize), (1, 1), (2, 1), (3, 2), (4, 2)] {
            assert_eq!(s.rep.module.dim_at(&(qr(1, 16) + qi(lev))), want, "level {}", lev);
        }
    }

    #[test]
    fn simple_quotients_match_gram_rank() {
        let v = build_virasoro(&qr(1, 2), 7);
        for h in [qi(0), qr(1, 2), qr(1, 16)] {
            let dims = simple_dims(&qr(1, 2), &h, 5);
            let s = build_simple(&v, &h, 5).unwrap();
            for (lev, want) in dims.iter().enumerate() {
                assert_eq!(s.rep.module.dim_at(&(&h + qi(lev as i64))), *want);
            }
            check_axioms(&s.rep, &qi(4), 2).unwrap();
        }
    }
}
