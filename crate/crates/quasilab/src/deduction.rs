//! Derivability and admissibility of quasiequations, structural
//! completeness, structural-core membership, exactness, and characteristic
//! quasiequations, all relative to the quasivariety Q generated by a fixed
//! finite set of finite algebras.
//!
//! The bridge between syntax and finite search is the free algebra on
//! n* = max |B| generators: a quasiequation is admissible in Q iff it is
//! valid in F_Q(n*). Positive facts (separating homomorphisms, embeddings)
//! are searched at the lowest feasible rank and lifted along the canonical
//! embedding F(m) -> F(n*); negative facts at ranks whose free algebra
//! exceeds the element cap are only asserted when a rank-independent
//! fixed-point obstruction certifies them.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::congruence::{con_q, least_pair, q_irreducible};
use crate::freealg::{
    free_algebra, hom_obstruction, premise_obstruction, FreeAlgebra, Obstruction,
};
use crate::kernel::{
    holds, AlgebraLike, Budgets, Error, FiniteAlgebra, HoldsOutcome, Quasiequation, Signature,
    Term,
};
use crate::morphisms::{find_hom, HomFilter, Homomorphism};
use crate::report::Verdict;

/// Above this carrier size, validity over a free algebra is checked
/// coordinatewise instead of through materialized tables.
const TABLE_LIMIT: usize = 2048;

/// The quasivariety Q(K) with a per-rank cache of free algebras (truncated
/// results are cached too, so an infeasible rank is only attempted once).
pub struct Quasivariety {
    pub generators: Vec<FiniteAlgebra>,
    free_cache: RefCell<HashMap<usize, Result<Rc<FreeAlgebra>, Error>>>,
}

impl Quasivariety {
    pub fn new(generators: Vec<FiniteAlgebra>) -> Result<Quasivariety, Error> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Validation("quasivariety needs at least one generator".into()))?;
        let sig = first.sig.clone();
        for g in &generators {
            if g.sig != sig {
                return Err(Error::Validation(format!(
                    "signature mismatch between {} and {}",
                    first.name, g.name
                )));
            }
        }
        Ok(Quasivariety {
            generators,
            free_cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn sig(&self) -> &Rc<Signature> {
        &self.generators[0].sig
    }

    pub fn refs(&self) -> Vec<&FiniteAlgebra> {
        self.generators.iter().collect()
    }

    /// The free rank that decides admissibility: the largest generator size.
    pub fn n_star(&self) -> usize {
        self.generators.iter().map(|g| g.size).max().unwrap_or(1)
    }

    /// F_Q(rank), cached (budget failures too, so an infeasible rank is
    /// only attempted once). The first call's budgets decide the caps.
    pub fn free(&self, rank: usize, budgets: &Budgets) -> Result<Rc<FreeAlgebra>, Error> {
        if let Some(r) = self.free_cache.borrow().get(&rank) {
            return r.clone();
        }
        let r = free_algebra(&self.refs(), rank, budgets).map(Rc::new);
        self.free_cache.borrow_mut().insert(rank, r.clone());
        r
    }

    /// Does the quasiequation hold in every generator? No-witness: the
    /// first failing generator with the least refuting assignment.
    pub fn derivable(
        &self,
        q: &Quasiequation,
        budgets: &Budgets,
    ) -> Verdict<(), (String, Vec<usize>)> {
        for g in &self.generators {
            match holds(g, q, budgets) {
                Ok(HoldsOutcome::Holds) => {}
                Ok(HoldsOutcome::Fails(vals)) => return Verdict::No((g.name.clone(), vals)),
                Err(e) => return Verdict::Unknown(e.to_string()),
            }
        }
        Verdict::Yes(())
    }

    /// Validity of q in F_Q(rank), by exhaustive assignment scan. Budget
    /// errors (including a truncated free algebra) surface as Err.
    pub fn holds_in_free(
        &self,
        rank: usize,
        q: &Quasiequation,
        budgets: &Budgets,
    ) -> Result<HoldsOutcome, Error> {
        let f = self.free(rank, budgets)?;
        if f.truncated {
            return Err(Error::Budget(format!(
                "free_size: {} is truncated; validity scan impossible",
                f.display_name()
            )));
        }
        if f.size() <= TABLE_LIMIT {
            holds(&f.as_finite(budgets)?, q, budgets)
        } else {
            holds(&*f, q, budgets)
        }
    }

    pub fn admissible(
        &self,
        q: &Quasiequation,
        budgets: &Budgets,
    ) -> Verdict<AdmissibleEvidence, AdmissibleRefutation> {
        self.admissible_at(q, self.n_star(), budgets)
    }

    /// Admissibility decided at an explicit free rank (the default n* can
    /// be overridden for experiments on the rank bound).
    pub fn admissible_at(
        &self,
        q: &Quasiequation,
        rank: usize,
        budgets: &Budgets,
    ) -> Verdict<AdmissibleEvidence, AdmissibleRefutation> {
        // derivable rules hold in F because F lies in Q
        match self.derivable(q, budgets) {
            Verdict::Yes(()) => return Verdict::Yes(AdmissibleEvidence::Derivable),
            Verdict::No(_) if q.premises.is_empty() && q.nvars <= rank => {
                // an equation failing somewhere in Q fails in F under the
                // identity substitution
                return Verdict::No(AdmissibleRefutation {
                    rank,
                    substitution: (0..q.nvars).map(Term::var).collect(),
                });
            }
            Verdict::Unknown(e) => return Verdict::Unknown(e),
            Verdict::No(_) => {}
        }
        if let Some((premise, obstruction)) = premise_obstruction(&self.refs(), q) {
            return Verdict::Yes(AdmissibleEvidence::PremiseUnsatisfiable {
                premise,
                obstruction,
            });
        }
        // scan ranks from below: a refutation in F(m) lifts along the
        // canonical embedding F(m) -> F(rank); only a full scan of F(rank)
        // itself proves validity
        let mut blocked: Option<String> = None;
        let lowest = if rank == 0 { 0 } else { 1 };
        for m in lowest..=rank {
            match self.holds_in_free(m, q, budgets) {
                Ok(HoldsOutcome::Holds) => {
                    if m == rank {
                        return Verdict::Yes(AdmissibleEvidence::HoldsInFree { rank });
                    }
                }
                Ok(HoldsOutcome::Fails(vals)) => {
                    let f = self.free(m, budgets).expect("cached");
                    return Verdict::No(AdmissibleRefutation {
                        rank: m,
                        substitution: vals.iter().map(|&e| f.witness(e).clone()).collect(),
                    });
                }
                Err(e) => {
                    blocked = Some(e.to_string());
                    break;
                }
            }
        }
        Verdict::Unknown(blocked.unwrap_or_else(|| "free algebra scan proved nothing".into()))
    }

    /// Can every pair of distinct elements of `a` be separated by a
    /// homomorphism into F_Q(n*)?
    fn separate_all(
        &self,
        a: &FiniteAlgebra,
        budgets: &Budgets,
    ) -> Verdict<Vec<Separation>, Inseparable> {
        let n_star = self.n_star();
        // a fixed-point obstruction kills every hom into every free rank,
        // so all pairs (if any) are inseparable
        if a.size > 1 {
            if let Some((element, obstruction)) = hom_obstruction(&self.refs(), a) {
                let other = if element == 0 { 1 } else { 0 };
                let characteristic = Quasiequation::new(
                    vec![(
                        obstruction.probe.subst(&[Term::var(0)]),
                        Term::var(0),
                    )],
                    (Term::var(0), Term::var(1)),
                );
                return Verdict::No(Inseparable {
                    generator: a.name.clone(),
                    pair: (element.min(other), element.max(other)),
                    rank: n_star,
                    characteristic: Some(characteristic),
                    obstruction: Some(obstruction),
                });
            }
        }
        let mut seps = Vec::new();
        let mut saw_incomplete = false;
        for x in 0..a.size {
            for y in (x + 1)..a.size {
                let mut found = None;
                for rank in 1..=n_star {
                    // an infeasible rank (truncated or budget-blocked) only
                    // forfeits the definitive no when it is n* itself
                    let f = match self.free(rank, budgets) {
                        Ok(f) if !f.truncated => f,
                        Ok(_) => {
                            saw_incomplete = rank == n_star;
                            continue;
                        }
                        Err(Error::Budget(_)) => {
                            saw_incomplete = rank == n_star;
                            continue;
                        }
                        Err(e) => return Verdict::Unknown(e.to_string()),
                    };
                    match find_hom(a, &*f, HomFilter::Separating(x, y), budgets) {
                        Ok(Some(h)) => {
                            found = Some(Separation {
                                generator: a.name.clone(),
                                pair: (x, y),
                                rank,
                                map: h,
                            });
                            break;
                        }
                        Ok(None) => {}
                        Err(e) => return Verdict::Unknown(e.to_string()),
                    }
                }
                match found {
                    Some(s) => seps.push(s),
                    None if !saw_incomplete => {
                        return Verdict::No(Inseparable {
                            generator: a.name.clone(),
                            pair: (x, y),
                            rank: n_star,
                            characteristic: None,
                            obstruction: None,
                        })
                    }
                    None => {
                        return Verdict::Unknown(format!(
                            "free rank {} is truncated and pair ({},{}) of {} found no \
                             separating homomorphism at lower ranks",
                            n_star, x, y, a.name
                        ))
                    }
                }
            }
        }
        Verdict::Yes(seps)
    }

    /// Structural completeness of Q: every generator embeds into a power
    /// of F_Q(n*), i.e. all its point pairs are separated by homomorphisms
    /// into the free algebra.
    pub fn structurally_complete(
        &self,
        budgets: &Budgets,
    ) -> Verdict<Vec<Separation>, Inseparable> {
        let mut all = Vec::new();
        for g in &self.generators {
            match self.separate_all(g, budgets) {
                Verdict::Yes(mut s) => all.append(&mut s),
                Verdict::No(w) => return Verdict::No(w),
                Verdict::Unknown(e) => return Verdict::Unknown(e),
            }
        }
        Verdict::Yes(all)
    }

    /// Membership of b in the structural core of Q: b must lie in Q and
    /// embed into a power of the free algebra.
    pub fn in_structural_core(
        &self,
        b: &FiniteAlgebra,
        budgets: &Budgets,
    ) -> Result<Verdict<Vec<Separation>, Inseparable>, Error> {
        let lat = con_q(b, &self.refs(), budgets)?;
        if !lat.has_delta {
            return Err(Error::Validation(format!(
                "{} is not a member of the quasivariety",
                b.name
            )));
        }
        Ok(self.separate_all(b, budgets))
    }

    /// Is b exact (a subalgebra of some finitely generated free algebra)?
    /// Ranks 1..=max_rank are searched in order; a definitive no needs a
    /// rank-independent obstruction.
    pub fn exact(
        &self,
        b: &FiniteAlgebra,
        max_rank: Option<usize>,
        budgets: &Budgets,
    ) -> Verdict<(usize, Homomorphism), (usize, Obstruction)> {
        if let Some((element, obstruction)) = hom_obstruction(&self.refs(), b) {
            return Verdict::No((element, obstruction));
        }
        let limit = max_rank.unwrap_or(b.size);
        let mut blocked: Option<String> = None;
        for rank in 1..=limit {
            let f = match self.free(rank, budgets) {
                Ok(f) => f,
                Err(e) => {
                    blocked = Some(e.to_string());
                    break;
                }
            };
            if f.truncated {
                blocked = Some(format!("free rank {} is truncated", rank));
                break;
            }
            match crate::morphisms::embeds(b, &*f, budgets) {
                Verdict::Yes(h) => return Verdict::Yes((rank, h)),
                Verdict::No(()) => {}
                Verdict::Unknown(e) => return Verdict::Unknown(e),
            }
        }
        Verdict::Unknown(match blocked {
            Some(why) => format!("no embedding found; search stopped early: {}", why),
            None => format!(
                "no embedding of {} into free ranks 1..={} and no obstruction certificate",
                b.name, limit
            ),
        })
    }

    /// The characteristic quasiequation of a Q-irreducible algebra b: the
    /// full diagram of b as premises (one variable per element), concluding
    /// that the monolith's least pair collapses. An algebra C refutes it
    /// exactly when b embeds into C.
    pub fn characteristic_quasiequation(
        &self,
        b: &FiniteAlgebra,
        budgets: &Budgets,
    ) -> Result<Quasiequation, Error> {
        let verdict = q_irreducible(b, &self.refs(), budgets)?;
        let (monolith, _) = match verdict {
            Verdict::Yes(w) => w,
            Verdict::No(()) => {
                return Err(Error::Validation(format!(
                    "{} is not Q-irreducible; no characteristic quasiequation",
                    b.name
                )))
            }
            Verdict::Unknown(e) => return Err(Error::Budget(e)),
        };
        let (u, v) = least_pair(&monolith).expect("monolith is nonzero");
        let mut premises = Vec::new();
        for (op, sym) in b.sig.ops.iter().enumerate() {
            let k = sym.arity;
            let mut args = vec![0usize; k];
            loop {
                let lhs = Term::apply(op, args.iter().map(|&e| Term::var(e)).collect());
                let rhs = Term::var(b.apply(op, &args));
                premises.push((lhs, rhs));
                if k == 0 || !crate::morphisms::advance(&mut args, b.size) {
                    break;
                }
            }
        }
        Ok(Quasiequation::new(premises, (Term::var(u), Term::var(v))))
    }
}

/// Why a quasiequation is admissible.
#[derive(Debug, Clone)]
pub enum AdmissibleEvidence {
    /// Valid in every generator, hence in all of Q including F.
    Derivable,
    /// Verified by exhaustive scan over the free algebra of this rank.
    HoldsInFree { rank: usize },
    /// Some premise has no solution in any free algebra.
    PremiseUnsatisfiable {
        premise: usize,
        obstruction: Obstruction,
    },
}

/// A refuting substitution into the free algebra: variable i is sent to
/// the element written as substitution[i].
#[derive(Debug, Clone)]
pub struct AdmissibleRefutation {
    pub rank: usize,
    pub substitution: Vec<Term>,
}

/// A homomorphism into F_Q(rank) separating one pair of one generator.
#[derive(Debug, Clone)]
pub struct Separation {
    pub generator: String,
    pub pair: (usize, usize),
    pub rank: usize,
    pub map: Homomorphism,
}

/// A pair no homomorphism into F_Q(n*) separates; when an obstruction is
/// present the accompanying quasiequation is admissible but not derivable.
#[derive(Debug, Clone)]
pub struct Inseparable {
    pub generator: String,
    pub pair: (usize, usize),
    pub rank: usize,
    pub characteristic: Option<Quasiequation>,
    pub obstruction: Option<Obstruction>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;
    use crate::kernel::parse_quasiequation;

    fn b() -> Budgets {
        Budgets::default()
    }

    fn qv(name: &str) -> Quasivariety {
        Quasivariety::new(vec![corpus(name).unwrap()]).unwrap()
    }

    fn rule(q: &Quasivariety, src: &str) -> Quasiequation {
        parse_quasiequation(src, q.sig()).unwrap().0
    }

    #[test]
    fn kleene_fixed_point_rule_is_admissible_not_derivable() {
        let q = qv("m3");
        let r = rule(&q, "neg(x) = x => x = y");
        assert!(q.derivable(&r, &b()).is_no());
        match q.admissible(&r, &b()) {
            Verdict::Yes(AdmissibleEvidence::PremiseUnsatisfiable { premise, .. }) => {
                assert_eq!(premise, 0)
            }
            other => panic!("expected premise obstruction, got {:?}", other),
        }
    }

    #[test]
    fn z4_halving_rule_is_neither_derivable_nor_admissible() {
        let q = qv("z4");
        let r = rule(&q, "add(x,x) = zero => x = zero");
        let d = q.derivable(&r, &b());
        assert_eq!(d.no().unwrap().1, vec![2]);
        match q.admissible(&r, &b()) {
            Verdict::No(refutation) => {
                assert!(refutation.rank <= 4);
                assert_eq!(refutation.substitution.len(), 1);
                // the refuting element must be 2-torsion but nonzero
                let f = q.free(refutation.rank, &b()).unwrap();
                let t = &refutation.substitution[0];
                for (fi, asg) in &f.coords {
                    let g = &f.factors[*fi];
                    let e = t.eval(g, asg);
                    let zero = g.apply(g.sig.op_index("zero").unwrap(), &[]);
                    assert_eq!(g.apply(g.sig.op_index("add").unwrap(), &[e, e]), zero);
                }
            }
            other => panic!("expected refutation, got {:?}", other),
        }
    }

    #[test]
    fn derivable_equations_are_admissible() {
        let q = qv("m3");
        let r = rule(&q, "neg(neg(x)) = x");
        assert!(matches!(
            q.admissible(&r, &b()),
            Verdict::Yes(AdmissibleEvidence::Derivable)
        ));
    }

    #[test]
    fn failing_equations_get_identity_refutation() {
        let q = qv("m3");
        let r = rule(&q, "meet(x,neg(x)) = c0");
        match q.admissible(&r, &b()) {
            Verdict::No(refutation) => {
                assert_eq!(refutation.substitution, vec![Term::var(0)]);
            }
            other => panic!("expected refutation, got {:?}", other),
        }
    }

    #[test]
    fn structural_completeness_examples() {
        assert!(qv("impl2").structurally_complete(&b()).is_yes());
        assert!(qv("lattice2").structurally_complete(&b()).is_yes());
        assert!(qv("z4").structurally_complete(&b()).is_yes());
        assert!(qv("heyting3").structurally_complete(&b()).is_yes());
        match qv("m3").structurally_complete(&b()) {
            Verdict::No(w) => {
                assert_eq!(w.generator, "m3");
                let ch = w.characteristic.unwrap();
                let q = qv("m3");
                assert!(q.derivable(&ch, &b()).is_no());
                assert!(q.admissible(&ch, &b()).is_yes());
            }
            other => panic!("expected no, got {:?}", other),
        }
    }

    #[test]
    fn de_morgan_diamond_is_not_structurally_complete() {
        assert!(qv("m4").structurally_complete(&b()).is_no());
    }

    #[test]
    fn structural_core_membership() {
        let q = qv("m3");
        let m2 = corpus("m2").unwrap();
        assert!(q.in_structural_core(&m2, &b()).unwrap().is_yes());
        let m3 = corpus("m3").unwrap();
        assert!(q.in_structural_core(&m3, &b()).unwrap().is_no());
    }

    #[test]
    fn core_rejects_non_members() {
        let q = qv("m2");
        let m3 = corpus("m3").unwrap();
        assert!(matches!(
            q.in_structural_core(&m3, &b()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn exactness_examples() {
        let q = qv("m3");
        let m2 = corpus("m2").unwrap();
        match q.exact(&m2, None, &b()) {
            Verdict::Yes((rank, _)) => assert_eq!(rank, 1),
            other => panic!("expected yes, got {:?}", other),
        }
        let m3 = corpus("m3").unwrap();
        assert!(q.exact(&m3, None, &b()).is_no());
    }

    #[test]
    fn characteristic_quasiequation_of_the_two_element_group() {
        let q = qv("z4");
        let z2 = corpus("z2").unwrap();
        let ch = q.characteristic_quasiequation(&z2, &b()).unwrap();
        // refuted exactly where z2 embeds
        let z4 = corpus("z4").unwrap();
        assert!(matches!(
            holds(&z4, &ch, &b()).unwrap(),
            HoldsOutcome::Fails(_)
        ));
        let (triv, _) =
            crate::morphisms::quotient(&z2, &crate::congruence::Congruence::nabla(2));
        assert_eq!(holds(&triv, &ch, &b()).unwrap(), HoldsOutcome::Holds);
    }

    #[test]
    fn free_rank_override_changes_the_scan() {
        let q = qv("z2");
        let r = rule(&q, "add(x,y) = zero => x = y");
        // holds in Q(z2) outright, so any rank agrees
        assert!(q.admissible_at(&r, 2, &b()).is_yes());
        assert!(q.admissible_at(&r, 3, &b()).is_yes());
    }

    #[test]
    fn admissibility_is_rank_stable_on_a_small_sample() {
        let q = qv("impl2");
        let samples = [
            "imp(x,y) = y => imp(y,x) = x",
            "imp(x,y) = imp(y,x) => x = y",
            "imp(x,x) = y => imp(y,z) = z",
        ];
        for src in samples {
            let r = rule(&q, src);
            let at2 = q.holds_in_free(2, &r, &b()).unwrap();
            let at3 = q.holds_in_free(3, &r, &b()).unwrap();
            assert_eq!(
                matches!(at2, HoldsOutcome::Holds),
                matches!(at3, HoldsOutcome::Holds),
                "rank discrepancy for {}",
                src
            );
        }
    }
}
