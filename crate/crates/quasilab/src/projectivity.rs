//! Projectivity, weak projectivity, endomorphism-kernel checks, and
//! primitivity, relative to a finitely generated quasivariety Q = Q(K).
//!
//! An algebra b in Q is projective iff it is a retract of the free algebra
//! on its minimum generator count. Weak projectivity is decided by the
//! quotient search: b fails iff some theta in Con_Q(F(|b|)) has b among
//! the quotients of F/theta but not among its subalgebras. Projective
//! algebras pass vacuously (take theta = the kernel of the retraction),
//! so that shortcut is tried first; when F(|b|) is infeasible a
//! fixed-point obstruction can still certify failure at theta = identity,
//! because b is always a quotient of F(|b|).

use crate::congruence::{con_q, q_irreducible, Congruence};
use crate::deduction::Quasivariety;
use crate::freealg::{hom_obstruction, Obstruction};
use crate::kernel::{Budgets, Error, FiniteAlgebra};
use crate::morphisms::{
    advance, for_each_hom_where, generated_subalgebra, homs, quotient, subalgebras_upto_iso,
    HomFilter, Homomorphism,
};
use crate::report::Verdict;

/// The lexicographically first generating subset of minimum size.
pub fn min_generators(a: &FiniteAlgebra) -> Vec<usize> {
    for size in 0..=a.size {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if generated_subalgebra(a, &subset).len() == a.size {
                return subset;
            }
            if !next_combination(&mut subset, a.size) {
                break;
            }
        }
    }
    (0..a.size).collect()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Witness that b is a retract of the free algebra: the generator images
/// defining the surjection F(rank) ->> b and the section b -> F(rank).
#[derive(Debug, Clone)]
pub struct RetractWitness {
    pub rank: usize,
    pub images: Vec<usize>,
    pub surjection: Homomorphism,
    pub section: Homomorphism,
}

/// Is b projective in Q: a retract of F_Q(g), g its minimum generator
/// count? A definitive no is either an exhausted search over all
/// surjections (F feasible) or a fixed-point obstruction blocking every
/// homomorphism b -> F.
pub fn projective(
    q: &Quasivariety,
    b: &FiniteAlgebra,
    budgets: &Budgets,
) -> Verdict<RetractWitness, Option<(usize, Obstruction)>> {
    let gens = min_generators(b);
    let rank = gens.len();
    let f = match q.free(rank, budgets) {
        Ok(f) if !f.truncated => f,
        _ => {
            return match hom_obstruction(&q.refs(), b) {
                Some(w) => Verdict::No(Some(w)),
                None => Verdict::Unknown(format!(
                    "free rank {} is infeasible and no obstruction certificate applies",
                    rank
                )),
            }
        }
    };
    // every surjection F ->> b is an evaluation homomorphism, so the
    // search over retraction pairs is complete
    let mut images = vec![0usize; rank];
    loop {
        if generated_subalgebra(b, &images).len() == b.size {
            let surjection = match f.eval_hom(b, &images) {
                Ok(h) => h,
                Err(e) => return Verdict::Unknown(e.to_string()),
            };
            let mut section = None;
            let allowed = |x: usize, e: usize| surjection.map[e] == x;
            let r = for_each_hom_where(
                b,
                &*f,
                None,
                HomFilter::All,
                Some(&allowed),
                budgets,
                |h| {
                    section = Some(Homomorphism { map: h.to_vec() });
                    false
                },
            );
            if let Err(e) = r {
                return Verdict::Unknown(e.to_string());
            }
            if let Some(section) = section {
                return Verdict::Yes(RetractWitness {
                    rank,
                    images,
                    surjection,
                    section,
                });
            }
        }
        if rank == 0 || !advance(&mut images, b.size) {
            break;
        }
    }
    Verdict::No(None)
}

/// How weak projectivity was established.
#[derive(Debug, Clone)]
pub enum WpEvidence {
    /// Projective algebras are weakly projective outright.
    Projective(RetractWitness),
    /// Every theta in Con_Q(F(rank)) with b among the quotients of
    /// F/theta also has b among its subalgebras.
    Searched { rank: usize, congruences: usize },
}

/// A quotient of the free algebra that has b as a further quotient but
/// not as a subalgebra.
#[derive(Debug, Clone)]
pub struct WpCounterexample {
    pub rank: usize,
    /// None when F(rank) is infeasible and the failure at theta =
    /// identity is certified by the obstruction instead.
    pub theta: Option<Congruence>,
    /// Generator images of a surjection onto b factoring through theta.
    pub surjection_images: Vec<usize>,
    pub obstruction: Option<(usize, Obstruction)>,
}

/// Is b weakly projective in Q? Input must lie in Q.
pub fn weakly_projective(
    q: &Quasivariety,
    b: &FiniteAlgebra,
    budgets: &Budgets,
) -> Result<Verdict<WpEvidence, WpCounterexample>, Error> {
    let lat = con_q(b, &q.refs(), budgets)?;
    if !lat.has_delta {
        return Err(Error::Validation(format!(
            "{} is not a member of the quasivariety",
            b.name
        )));
    }
    match projective(q, b, budgets) {
        Verdict::Yes(w) => return Ok(Verdict::Yes(WpEvidence::Projective(w))),
        Verdict::No(_) | Verdict::Unknown(_) => {}
    }
    weakly_projective_at(q, b, b.size, budgets)
}

/// The quotient search behind `weakly_projective`, at an explicit free
/// rank >= |b|. Raising the rank cannot change the answer (every
/// surjection from a lower-rank free algebra factors through a
/// higher-rank one), which the test suite exploits as a validation run.
pub fn weakly_projective_at(
    q: &Quasivariety,
    b: &FiniteAlgebra,
    rank: usize,
    budgets: &Budgets,
) -> Result<Verdict<WpEvidence, WpCounterexample>, Error> {
    // b is always a quotient of F(rank) for rank >= |b|: evaluate at the
    // identity enumeration of its carrier
    // enumeration of its carrier
    let identity: Vec<usize> = (0..rank).map(|i| if i < b.size { i } else { 0 }).collect();
    let f = match q.free(rank, budgets) {
        Ok(f) if !f.truncated => f,
        _ => {
            return Ok(match hom_obstruction(&q.refs(), b) {
                Some(w) => Verdict::No(WpCounterexample {
                    rank,
                    theta: None,
                    surjection_images: identity,
                    obstruction: Some(w),
                }),
                None => Verdict::Unknown(format!(
                    "free rank {} is infeasible and no obstruction certificate applies",
                    rank
                )),
            })
        }
    };
    let ff = f.as_finite(budgets)?;
    let lattice = f.con_q(budgets)?;
    // kernels of all surjections F ->> b
    let mut surjections: Vec<(Vec<usize>, Congruence)> = Vec::new();
    let mut images = vec![0usize; rank];
    loop {
        if generated_subalgebra(b, &images).len() == b.size {
            let h = f.eval_hom(b, &images)?;
            surjections.push((images.clone(), Congruence::from_kernel(&h.map)));
        }
        if rank == 0 || !advance(&mut images, b.size) {
            break;
        }
    }
    // identity congruence first: it is the cheapest counterexample to hit
    let mut order: Vec<usize> = (0..lattice.len()).collect();
    order.sort_by_key(|&i| if lattice.members[i].is_delta() { 0 } else { 1 });
    for i in order {
        let theta = &lattice.members[i];
        let below = surjections.iter().find(|(_, ker)| theta.leq(ker));
        let Some((imgs, _)) = below else { continue };
        let (quot, _) = quotient(&ff, theta);
        match crate::morphisms::embeds(b, &quot, budgets) {
            Verdict::Yes(_) => {}
            Verdict::No(()) => {
                return Ok(Verdict::No(WpCounterexample {
                    rank,
                    theta: Some(theta.clone()),
                    surjection_images: imgs.clone(),
                    obstruction: None,
                }))
            }
            Verdict::Unknown(e) => return Ok(Verdict::Unknown(e)),
        }
    }
    Ok(Verdict::Yes(WpEvidence::Searched {
        rank,
        congruences: lattice.len(),
    }))
}

/// For each theta in Con_Q(b): is theta the kernel of an endomorphism of
/// b, and of an idempotent one?
#[derive(Debug, Clone)]
pub struct EndoKernelReport {
    pub all_kernels: bool,
    pub all_idempotent: bool,
    /// One row per congruence: (theta, witness endo, idempotent witness).
    pub rows: Vec<(Congruence, Option<Homomorphism>, Option<Homomorphism>)>,
}

pub fn endo_kernel_check(
    q: &Quasivariety,
    b: &FiniteAlgebra,
    budgets: &Budgets,
) -> Result<EndoKernelReport, Error> {
    let lat = con_q(b, &q.refs(), budgets)?;
    let endos = homs(b, b, HomFilter::All, budgets)?;
    let mut rows = Vec::new();
    for theta in &lat.members {
        let mut witness = None;
        let mut idempotent = None;
        for e in &endos {
            if Congruence::from_kernel(&e.map) == *theta {
                if witness.is_none() {
                    witness = Some(e.clone());
                }
                if e.map.iter().enumerate().all(|(x, &y)| e.map[y] == e.map[x]) {
                    idempotent = Some(e.clone());
                    break;
                }
            }
        }
        rows.push((theta.clone(), witness, idempotent));
    }
    Ok(EndoKernelReport {
        all_kernels: rows.iter().all(|(_, w, _)| w.is_some()),
        all_idempotent: rows.iter().all(|(_, _, i)| i.is_some()),
        rows,
    })
}

/// The candidate that kills primitivity, when one exists.
#[derive(Debug, Clone)]
pub struct PrimitiveCounterexample {
    pub candidate: FiniteAlgebra,
    pub carrier: Vec<usize>,
    pub parent: String,
    pub counterexample: WpCounterexample,
}

/// Is Q primitive: is every Q-irreducible subalgebra of a generator
/// weakly projective? A single failing candidate decides no even if other
/// candidates are unknown.
pub fn primitive(
    q: &Quasivariety,
    budgets: &Budgets,
) -> Verdict<Vec<String>, PrimitiveCounterexample> {
    let mut unknown: Option<String> = None;
    let mut passed = Vec::new();
    let mut seen: Vec<FiniteAlgebra> = Vec::new();
    for g in &q.generators {
        let subs = match subalgebras_upto_iso(g, budgets) {
            Ok(s) => s,
            Err(e) => return Verdict::Unknown(e.to_string()),
        };
        'candidates: for (carrier, cand) in subs {
            for old in &seen {
                if crate::morphisms::isomorphic(&cand, old, budgets).is_yes() {
                    continue 'candidates;
                }
            }
            seen.push(cand.clone());
            match q_irreducible(&cand, &q.refs(), budgets) {
                Ok(Verdict::Yes(_)) => {}
                Ok(Verdict::No(())) => continue,
                Ok(Verdict::Unknown(e)) | Err(Error::Budget(e)) => {
                    unknown = Some(e);
                    continue;
                }
                Err(e) => return Verdict::Unknown(e.to_string()),
            }
            match weakly_projective(q, &cand, budgets) {
                Ok(Verdict::Yes(_)) => passed.push(cand.name.clone()),
                Ok(Verdict::No(w)) => {
                    return Verdict::No(PrimitiveCounterexample {
                        candidate: cand,
                        carrier,
                        parent: g.name.clone(),
                        counterexample: w,
                    })
                }
                Ok(Verdict::Unknown(e)) => unknown = Some(e),
                Err(e) => return Verdict::Unknown(e.to_string()),
            }
        }
    }
    match unknown {
        Some(e) => Verdict::Unknown(e),
        None => Verdict::Yes(passed),
    }
}
