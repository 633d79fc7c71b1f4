//! Finite free algebras F_Q(n) for Q = Q(K), K a finite set of finite
//! algebras of one signature.
//!
//! F_Q(n) is realized as the subalgebra of the product of all B^(B^n),
//! B in K, generated by the n projection vectors: every element is stored
//! as its value vector over all coordinates (B, assignment), together with
//! the first term that produced it. Operations act coordinatewise, so the
//! structure never needs |F|^2 tables; an index map recovers element ids.
//!
//! When the element cap trips the algebra is returned with `truncated`
//! set; consumers that need the whole carrier must refuse truncated
//! inputs. Negative answers about untruncated ranks that are out of reach
//! can still be certified by `fixed_point_obstruction`: if for some B in K
//! and value v the subuniverse of B generated by {v} contains no fixed
//! point of a unary term u, then no element of any F_Q(n), n >= 1, is a
//! fixed point of u, because the constant-v assignment is a coordinate of
//! every rank.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::congruence::{meet_closed_lattice, Congruence, CongruenceLattice};
use crate::kernel::{
    AlgebraLike, Budgets, Error, FiniteAlgebra, Quasiequation, Signature, Term, TermNode,
};
use crate::morphisms::{advance, generated_subalgebra, Homomorphism};

/// Hard cap on the number of product coordinates (sum of |B|^rank); above
/// this the value vectors alone would dominate memory.
const MAX_COORDS: usize = 1_000_000;

pub struct FreeAlgebra {
    pub name: String,
    pub sig: Rc<Signature>,
    pub rank: usize,
    pub factors: Vec<FiniteAlgebra>,
    /// Coordinate c = (factor index, assignment of values to the rank
    /// generators), assignments in lexicographic order with generator 0
    /// most significant.
    pub coords: Vec<(usize, Vec<usize>)>,
    /// elements[i][c] = value of element i at coordinate c.
    pub elements: Vec<Vec<usize>>,
    /// First term (over variables x0..x{rank-1}) that produced each element.
    pub witnesses: Vec<Term>,
    /// Element ids of the projections x0..x{rank-1}.
    pub generators: Vec<usize>,
    /// True when the element cap tripped and the carrier is incomplete.
    pub truncated: bool,
    index: HashMap<Vec<usize>, usize>,
}

impl AlgebraLike for FreeAlgebra {
    fn carrier_size(&self) -> usize {
        self.elements.len()
    }

    fn signature(&self) -> &Rc<Signature> {
        &self.sig
    }

    fn op_value(&self, op: usize, args: &[usize]) -> usize {
        let v = self.apply_vector(op, args);
        *self
            .index
            .get(&v)
            .unwrap_or_else(|| panic!("operation left the carrier of truncated {}", self.name))
    }

    fn display_name(&self) -> &str {
        &self.name
    }
}

impl FreeAlgebra {
    fn apply_vector(&self, op: usize, args: &[usize]) -> Vec<usize> {
        let ncoords = self.coords.len();
        let mut out = Vec::with_capacity(ncoords);
        let mut cargs = vec![0usize; args.len()];
        for c in 0..ncoords {
            let (fi, _) = self.coords[c];
            for (j, &a) in args.iter().enumerate() {
                cargs[j] = self.elements[a][c];
            }
            out.push(self.factors[fi].apply(op, &cargs));
        }
        out
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn witness(&self, i: usize) -> &Term {
        &self.witnesses[i]
    }

    pub fn element_index(&self, vector: &[usize]) -> Option<usize> {
        self.index.get(vector).copied()
    }

    fn check_complete(&self, what: &str) -> Result<(), Error> {
        if self.truncated {
            return Err(Error::Budget(format!(
                "free_size: {} is truncated at {} elements; {} refuses partial carriers",
                self.name,
                self.elements.len(),
                what
            )));
        }
        Ok(())
    }

    /// The evaluation homomorphism F -> b sending generator i to images[i];
    /// every homomorphism from a free algebra into the signature's algebras
    /// is of this form.
    pub fn eval_hom(&self, b: &FiniteAlgebra, images: &[usize]) -> Result<Homomorphism, Error> {
        self.check_complete("eval_hom")?;
        if *b.signature() != self.sig {
            return Err(Error::Validation(format!(
                "signature mismatch between {} and {}",
                self.name, b.name
            )));
        }
        if images.len() != self.rank {
            return Err(Error::Validation(format!(
                "expected {} generator images, got {}",
                self.rank,
                images.len()
            )));
        }
        let mut memo: HashMap<*const TermNode, usize> = HashMap::new();
        let map: Vec<usize> = self
            .witnesses
            .iter()
            .map(|w| w.eval_memo(b, images, &mut memo))
            .collect();
        Ok(Homomorphism { map })
    }

    /// Kernel of the projection onto one coordinate; these are exactly the
    /// kernels of the evaluation homomorphisms into the factors.
    pub fn coordinate_kernel(&self, c: usize) -> Congruence {
        let column: Vec<usize> = self.elements.iter().map(|e| e[c]).collect();
        Congruence::from_kernel(&column)
    }

    /// The relative congruence lattice Con_Q(F): meet-closure of the
    /// coordinate kernels plus nabla. Delta is always a member because the
    /// coordinates jointly separate elements.
    pub fn con_q(&self, budgets: &Budgets) -> Result<CongruenceLattice, Error> {
        self.check_complete("con_q")?;
        let mut set: BTreeSet<Congruence> = BTreeSet::new();
        set.insert(Congruence::nabla(self.elements.len()));
        for c in 0..self.coords.len() {
            set.insert(self.coordinate_kernel(c));
        }
        set.insert(Congruence::delta(self.elements.len()));
        meet_closed_lattice(set, budgets)
    }

    /// Materialize as a table-backed algebra (small carriers only; the
    /// labels are the witness terms).
    pub fn as_finite(&self, budgets: &Budgets) -> Result<FiniteAlgebra, Error> {
        self.check_complete("as_finite")?;
        let n = self.elements.len();
        let max_arity = self.sig.ops.iter().map(|o| o.arity).max().unwrap_or(0);
        let entries = (n as u64).checked_pow(max_arity as u32);
        match entries {
            Some(e) if e <= budgets.assignments => {}
            _ => {
                return Err(Error::Budget(format!(
                    "assignments: materializing {}^{} table entries exceeds cap {}",
                    n, max_arity, budgets.assignments
                )))
            }
        }
        let labels: Vec<String> = self.witnesses.iter().map(|w| w.print(&self.sig)).collect();
        let tables: Vec<Vec<usize>> = self
            .sig
            .ops
            .iter()
            .enumerate()
            .map(|(op, sym)| {
                let k = sym.arity;
                let mut table = Vec::with_capacity(n.pow(k as u32));
                let mut args = vec![0usize; k];
                loop {
                    table.push(self.op_value(op, &args));
                    if k == 0 || !advance(&mut args, n) {
                        break;
                    }
                }
                table
            })
            .collect();
        FiniteAlgebra::new(&self.name, self.sig.clone(), labels, tables)
    }
}

/// Construct F_Q(rank) for Q = Q(k) by worklist closure from the
/// projections (and constants). Deterministic: operations in signature
/// order, argument tuples in lexicographic order, so witnesses are the
/// first-production terms.
pub fn free_algebra(
    k: &[&FiniteAlgebra],
    rank: usize,
    budgets: &Budgets,
) -> Result<FreeAlgebra, Error> {
    let first = k
        .first()
        .ok_or_else(|| Error::Validation("free algebra over an empty class".into()))?;
    let sig = first.sig.clone();
    for b in k {
        if b.sig != sig {
            return Err(Error::Validation(format!(
                "signature mismatch between {} and {}",
                first.name, b.name
            )));
        }
    }
    let has_constants = sig.ops.iter().any(|o| o.arity == 0);
    if rank == 0 && !has_constants {
        return Err(Error::Validation(
            "free algebra of rank 0 requires at least one constant".into(),
        ));
    }
    // coordinates: every assignment into every factor
    let mut coords: Vec<(usize, Vec<usize>)> = Vec::new();
    for (fi, b) in k.iter().enumerate() {
        let count = (b.size as u64).checked_pow(rank as u32);
        match count {
            Some(c) if coords.len() as u64 + c <= MAX_COORDS as u64 => {}
            _ => {
                return Err(Error::Budget(format!(
                    "free coordinates: {}^{} pushes past {}",
                    b.size, rank, MAX_COORDS
                )))
            }
        }
        let mut asg = vec![0usize; rank];
        loop {
            coords.push((fi, asg.clone()));
            if rank == 0 || !advance(&mut asg, b.size) {
                break;
            }
        }
    }
    let name = format!(
        "F({};{})",
        k.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(","),
        rank
    );
    let mut f = FreeAlgebra {
        name,
        sig: sig.clone(),
        rank,
        factors: k.iter().map(|b| (*b).clone()).collect(),
        coords,
        elements: Vec::new(),
        witnesses: Vec::new(),
        generators: Vec::new(),
        truncated: false,
        index: HashMap::new(),
    };
    // seed with the projections
    for g in 0..rank {
        let v: Vec<usize> = f.coords.iter().map(|(_, asg)| asg[g]).collect();
        let id = match f.index.get(&v) {
            Some(&id) => id,
            None => {
                let id = f.elements.len();
                f.index.insert(v.clone(), id);
                f.elements.push(v);
                f.witnesses.push(Term::var(g));
                id
            }
        };
        f.generators.push(id);
    }
    // seed with the constants
    for (op, sym) in sig.ops.iter().enumerate() {
        if sym.arity == 0 {
            let v = f.apply_vector(op, &[]);
            if !f.index.contains_key(&v) {
                let id = f.elements.len();
                f.index.insert(v.clone(), id);
                f.elements.push(v);
                f.witnesses.push(Term::apply(op, Vec::new()));
            }
        }
    }
    // closure: each pass applies every operation to every tuple containing
    // at least one element produced since the previous pass; total tuple
    // applications are capped so an infeasible rank fails fast instead of
    // grinding toward the size cap
    let mut work: u64 = 0;
    let mut prev_start = 0usize;
    loop {
        let pass_start = f.elements.len();
        for (op, sym) in sig.ops.iter().enumerate() {
            let kk = sym.arity;
            if kk == 0 {
                continue;
            }
            // position j carries the first argument from the new range, so
            // each tuple with a new argument is visited exactly once
            for j in 0..kk {
                if j > 0 && prev_start == 0 {
                    break; // first pass: j = 0 already covered every tuple
                }
                let mut args = vec![0usize; kk];
                args[j] = prev_start;
                if args[j] >= pass_start {
                    break;
                }
                loop {
                    work += 1;
                    if work > budgets.free_work {
                        return Err(Error::Budget(format!(
                            "free_work: closure of {} passed {} tuple applications \
                             at {} elements",
                            f.name, budgets.free_work, f.elements.len()
                        )));
                    }
                    let v = f.apply_vector(op, &args);
                    if !f.index.contains_key(&v) {
                        let id = f.elements.len();
                        f.index.insert(v.clone(), id);
                        f.elements.push(v);
                        f.witnesses.push(Term::apply(
                            op,
                            args.iter().map(|&a| f.witnesses[a].clone()).collect(),
                        ));
                        if f.elements.len() > budgets.free_size {
                            f.truncated = true;
                            return Ok(f);
                        }
                    }
                    // odometer over the allowed ranges: positions < j stay
                    // below prev_start, position j stays in the new range,
                    // later positions roam the whole pass_start prefix
                    let mut i = kk;
                    let advanced = loop {
                        if i == 0 {
                            break false;
                        }
                        i -= 1;
                        args[i] += 1;
                        let limit = if i < j { prev_start } else { pass_start };
                        if args[i] < limit {
                            break true;
                        }
                        args[i] = if i == j { prev_start } else { 0 };
                    };
                    if !advanced {
                        break;
                    }
                }
            }
        }
        if f.elements.len() == pass_start {
            return Ok(f);
        }
        prev_start = pass_start;
    }
}

/// A certificate that no element of F_Q(n) (any n >= 1) satisfies
/// probe(e) = e: at the coordinate assigning `value` to every generator,
/// element values range over the listed subuniverse of the factor, and the
/// probe fixes none of them.
#[derive(Debug, Clone)]
pub struct Obstruction {
    pub probe: Term,
    pub factor: String,
    pub value: usize,
    pub closure: Vec<usize>,
}

/// Unary probe terms over the signature: each unary operation and each
/// composition of two (the depth-2 fragment the certificates search).
pub fn unary_probes(sig: &Signature) -> Vec<Term> {
    let unary: Vec<usize> = sig
        .ops
        .iter()
        .enumerate()
        .filter(|(_, o)| o.arity == 1)
        .map(|(i, _)| i)
        .collect();
    let x = Term::var(0);
    let mut out: Vec<Term> = unary
        .iter()
        .map(|&f| Term::apply(f, vec![x.clone()]))
        .collect();
    for &f in &unary {
        for &g in &unary {
            out.push(Term::apply(f, vec![Term::apply(g, vec![x.clone()])]));
        }
    }
    out
}

/// Search the constant-assignment coordinates for a witness that no free
/// element is a fixed point of `probe`.
pub fn fixed_point_obstruction(k: &[&FiniteAlgebra], probe: &Term) -> Option<Obstruction> {
    for b in k {
        for v in 0..b.size {
            let closure = generated_subalgebra(b, &[v]);
            if closure.iter().all(|&s| probe.eval(*b, &[s]) != s) {
                return Some(Obstruction {
                    probe: probe.clone(),
                    factor: b.name.clone(),
                    value: v,
                    closure,
                });
            }
        }
    }
    None
}

/// A certificate that no homomorphism a -> F_Q(n) exists for any n >= 1:
/// `element` is a fixed point of the probe in a, but the free algebras
/// have none.
pub fn hom_obstruction(
    k: &[&FiniteAlgebra],
    a: &FiniteAlgebra,
) -> Option<(usize, Obstruction)> {
    for probe in unary_probes(&a.sig) {
        let fixed: Vec<usize> = (0..a.size).filter(|&x| probe.eval(a, &[x]) == x).collect();
        if let Some(&x) = fixed.first() {
            if let Some(ob) = fixed_point_obstruction(k, &probe) {
                return Some((x, ob));
            }
        }
    }
    None
}

/// A certificate that the premises of q are jointly unsatisfiable in every
/// F_Q(n), n >= 1: some premise matches u(x) = x for a unary term u in one
/// variable, and the free algebras have no fixed point of u.
pub fn premise_obstruction(
    k: &[&FiniteAlgebra],
    q: &Quasiequation,
) -> Option<(usize, Obstruction)> {
    for (pi, (l, r)) in q.premises.iter().enumerate() {
        for (t, v) in [(l, r), (r, l)] {
            if let TermNode::Var(i) = &*v.0 {
                let tv = t.vars();
                if tv.len() == 1 && tv.contains(i) && !matches!(&*t.0, TermNode::Var(_)) {
                    // rename the shared variable to x0 for the probe
                    let map: Vec<Term> = (0..t.nvars()).map(|_| Term::var(0)).collect();
                    let probe = t.subst(&map);
                    if let Some(ob) = fixed_point_obstruction(k, &probe) {
                        return Some((pi, ob));
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;
    use crate::kernel::{holds, parse_quasiequation, Budgets, HoldsOutcome};
    use crate::morphisms::is_homomorphism;

    fn b() -> Budgets {
        Budgets::default()
    }

    fn free1(name: &str, rank: usize) -> FreeAlgebra {
        let a = corpus(name).unwrap();
        free_algebra(&[&a], rank, &b()).unwrap()
    }

    #[test]
    fn free_distributive_lattice_rank_3_has_18_elements() {
        let f = free1("lattice2", 3);
        assert_eq!(f.size(), 18);
        assert!(!f.truncated);
    }

    #[test]
    fn free_z4_rank_1_is_the_cyclic_group() {
        let f = free1("z4", 1);
        assert_eq!(f.size(), 4);
        let names: Vec<String> = f.witnesses.iter().map(|w| w.print(&f.sig)).collect();
        assert_eq!(names[0], "x0");
        assert!(names.contains(&"zero".to_string()));
    }

    #[test]
    fn free_z4_rank_2_has_16_elements() {
        assert_eq!(free1("z4", 2).size(), 16);
    }

    #[test]
    fn free_boolean_rank_2_has_16_elements() {
        assert_eq!(free1("m2", 2).size(), 16);
    }

    #[test]
    fn free_implication_algebra_sizes() {
        assert_eq!(free1("impl2", 1).size(), 2);
        assert_eq!(free1("impl2", 2).size(), 6);
        assert_eq!(free1("impl2", 3).size(), 38);
    }

    #[test]
    fn free_kleene_sizes() {
        assert_eq!(free1("m3", 1).size(), 6);
        assert_eq!(free1("m3", 2).size(), 84);
    }

    #[test]
    fn free_goedel_rank_1_has_6_elements() {
        assert_eq!(free1("heyting3", 1).size(), 6);
    }

    #[test]
    fn rank_zero_needs_constants() {
        let l2 = corpus("lattice2").unwrap();
        assert!(matches!(
            free_algebra(&[&l2], 0, &b()),
            Err(Error::Validation(_))
        ));
        let m2 = corpus("m2").unwrap();
        assert_eq!(free_algebra(&[&m2], 0, &b()).unwrap().size(), 2);
    }

    #[test]
    fn witnesses_evaluate_to_their_vectors() {
        let f = free1("m3", 2);
        for (i, w) in f.witnesses.iter().enumerate() {
            for (c, (fi, asg)) in f.coords.iter().enumerate() {
                assert_eq!(w.eval(&f.factors[*fi], asg), f.elements[i][c]);
            }
        }
    }

    #[test]
    fn truncation_flags_partial_carriers() {
        let m3 = corpus("m3").unwrap();
        let mut small = b();
        small.free_size = 50;
        let f = free_algebra(&[&m3], 2, &small).unwrap();
        assert!(f.truncated);
        assert!(f.con_q(&small).is_err());
        assert!(f.eval_hom(&m3, &[0, 1]).is_err());
    }

    #[test]
    fn eval_homs_are_homomorphisms() {
        let m3 = corpus("m3").unwrap();
        let f = free1("m3", 2);
        let ff = f.as_finite(&b()).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let h = f.eval_hom(&m3, &[x, y]).unwrap();
                assert!(is_homomorphism(&ff, &m3, &h.map));
                assert_eq!(h.map[f.generators[0]], x);
                assert_eq!(h.map[f.generators[1]], y);
            }
        }
    }

    #[test]
    fn lower_rank_embeds_monotonically() {
        // the subalgebra generated by the first projection of F(2) is F(1)
        let f2 = free1("lattice2", 2);
        let f1 = free1("lattice2", 1);
        let ff2 = f2.as_finite(&b()).unwrap();
        let sub = generated_subalgebra(&ff2, &[f2.generators[0]]);
        assert_eq!(sub.len(), f1.size());
    }

    #[test]
    fn con_q_of_free_z4_rank_1() {
        let f = free1("z4", 1);
        let lat = f.con_q(&b()).unwrap();
        // F(1) = Z4: congruences delta, the order-2 kernel, nabla
        assert_eq!(lat.len(), 3);
        assert!(lat.has_delta);
    }

    #[test]
    fn equations_valid_in_free_match_the_generator() {
        let f = free1("m3", 1);
        for src in ["neg(neg(x)) = x", "meet(x,x) = x", "join(x,c1) = c1"] {
            let q = parse_quasiequation(src, &f.sig).unwrap().0;
            assert_eq!(holds(&f, &q, &b()).unwrap(), HoldsOutcome::Holds);
        }
        let q = parse_quasiequation("meet(x,neg(x)) = c0", &f.sig).unwrap().0;
        assert!(matches!(holds(&f, &q, &b()).unwrap(), HoldsOutcome::Fails(_)));
    }

    #[test]
    fn kleene_free_algebras_have_no_negation_fixed_point() {
        let m3 = corpus("m3").unwrap();
        let neg = m3.sig.op_index("neg").unwrap();
        let probe = Term::apply(neg, vec![Term::var(0)]);
        let ob = fixed_point_obstruction(&[&m3], &probe).unwrap();
        assert_eq!(ob.value, 0);
        assert_eq!(ob.closure, vec![0, 2]);
        // cross-check on a materialized rank: F(2) has no neg-fixed element
        let f = free1("m3", 2);
        for i in 0..f.size() {
            assert_ne!(f.op_value(neg, &[i]), i);
        }
    }

    #[test]
    fn hom_obstruction_blocks_kleene_into_its_free_algebras() {
        let m3 = corpus("m3").unwrap();
        let (x, ob) = hom_obstruction(&[&m3], &m3).unwrap();
        assert_eq!(x, 1); // the middle element is negation-fixed
        assert_eq!(ob.factor, "m3");
        // sanity: no hom m3 -> F(2) exists
        let f = free1("m3", 2);
        let found = crate::morphisms::find_hom(&m3, &f, crate::morphisms::HomFilter::All, &b())
            .unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn premise_obstruction_matches_fixed_point_premises() {
        let m3 = corpus("m3").unwrap();
        let q = parse_quasiequation("neg(x) = x => x = y", &m3.sig).unwrap().0;
        let (pi, ob) = premise_obstruction(&[&m3], &q).unwrap();
        assert_eq!(pi, 0);
        assert_eq!(ob.probe.print(&m3.sig), "neg(x0)");
        // satisfiable premises yield no certificate
        let q = parse_quasiequation("meet(x,x) = x => x = y", &m3.sig).unwrap().0;
        assert!(premise_obstruction(&[&m3], &q).is_none());
    }

    #[test]
    fn no_obstruction_for_boolean_involution() {
        // m2: neg has no fixed points in the algebra itself, so nothing to
        // obstruct; double negation fixes everything and the closures do
        // contain fixed points of it
        let m2 = corpus("m2").unwrap();
        assert!(hom_obstruction(&[&m2], &m2).is_none());
    }
}
