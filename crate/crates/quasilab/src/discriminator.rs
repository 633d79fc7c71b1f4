//! Dual i-discriminator verification and synthesis, relative principal
//! intersection properties, Jonsson terms, fixedpoint-discriminator
//! conversions, equationally definable principal relative congruences,
//! subtractivity / 0-regularity / ideals, and the commutation-based
//! sufficient condition for primitivity.
//!
//! A dual i-discriminator on a set is a ternary p with p(a,b,c) = c for
//! a != b, p(a,a,.) constant, and idempotent diagonal pi(x) = p(x,x,x).
//! Any algebra carrying one is simple, so these checks run on the
//! Q-irreducible members.

use crate::clones::commutes;
use crate::congruence::{con_q, q_irreducible, Congruence, CongruenceLattice};
use crate::deduction::Quasivariety;
use crate::kernel::{Budgets, Error, FiniteAlgebra, Term};
use crate::morphisms::{advance, subalgebras_upto_iso};
use crate::report::Verdict;

/// Per-algebra outcome of the three dual i-discriminator clauses, with
/// the diagonal table.
#[derive(Debug, Clone)]
pub struct DualIDiscCheck {
    pub algebra: String,
    /// a != b but p(a,b,c) != c.
    pub off_diagonal: Option<(usize, usize, usize)>,
    /// p(a,a,b) != p(a,a,c).
    pub diagonal_constant: Option<(usize, usize, usize)>,
    /// pi(pi(a)) != pi(a).
    pub diagonal_idempotent: Option<usize>,
    pub pi: Vec<usize>,
}

impl DualIDiscCheck {
    pub fn pass(&self) -> bool {
        self.off_diagonal.is_none()
            && self.diagonal_constant.is_none()
            && self.diagonal_idempotent.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct DualIDiscReport {
    pub per_algebra: Vec<DualIDiscCheck>,
}

impl DualIDiscReport {
    pub fn pass(&self) -> bool {
        self.per_algebra.iter().all(|c| c.pass())
    }
}

pub fn is_dual_i_discriminator(
    algs: &[&FiniteAlgebra],
    p: &Term,
) -> Result<DualIDiscReport, Error> {
    if p.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    let mut per_algebra = Vec::new();
    for a in algs {
        let pi: Vec<usize> = (0..a.size).map(|x| p.eval(*a, &[x, x, x])).collect();
        let mut check = DualIDiscCheck {
            algebra: a.name.clone(),
            off_diagonal: None,
            diagonal_constant: None,
            diagonal_idempotent: None,
            pi: pi.clone(),
        };
        'scan: for x in 0..a.size {
            for y in 0..a.size {
                for z in 0..a.size {
                    let v = p.eval(*a, &[x, y, z]);
                    if x != y && v != z {
                        check.off_diagonal = Some((x, y, z));
                        break 'scan;
                    }
                    if x == y && v != pi[x] {
                        check.diagonal_constant = Some((x, x, z));
                        break 'scan;
                    }
                }
            }
        }
        if check.diagonal_idempotent.is_none() {
            for x in 0..a.size {
                if pi[pi[x]] != pi[x] {
                    check.diagonal_idempotent = Some(x);
                    break;
                }
            }
        }
        per_algebra.push(check);
    }
    Ok(DualIDiscReport { per_algebra })
}

/// Quaternary intersection witnesses: p(a,b,c,d) = q(a,b,c,d) iff a = b
/// or c = d, on every listed algebra. Counterexample (algebra, tuple).
pub fn is_rpip_witness(
    algs: &[&FiniteAlgebra],
    p4: &Term,
    q4: &Term,
) -> Result<Verdict<(), (String, (usize, usize, usize, usize))>, Error> {
    if p4.nvars() > 4 || q4.nvars() > 4 {
        return Err(Error::Validation("intersection witnesses are quaternary".into()));
    }
    for alg in algs {
        let mut t = vec![0usize; 4];
        loop {
            let eq = p4.eval(*alg, &t) == q4.eval(*alg, &t);
            if eq != (t[0] == t[1] || t[2] == t[3]) {
                return Ok(Verdict::No((alg.name.clone(), (t[0], t[1], t[2], t[3]))));
            }
            if !advance(&mut t, alg.size) {
                break;
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// Ternary intersection witness: p(a,b,c) = p(a,b,d) iff a = b or c = d,
/// on every listed algebra (the pointwise form on the Q-irreducibles).
pub fn is_rtpip_witness(
    algs: &[&FiniteAlgebra],
    p3: &Term,
) -> Result<Verdict<(), (String, (usize, usize, usize, usize))>, Error> {
    if p3.nvars() > 3 {
        return Err(Error::Validation("the intersection witness is ternary".into()));
    }
    for alg in algs {
        let mut t = vec![0usize; 4];
        loop {
            let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
            let eq = p3.eval(*alg, &[a, b, c]) == p3.eval(*alg, &[a, b, d]);
            if eq != (a == b || c == d) {
                return Ok(Verdict::No((alg.name.clone(), (a, b, c, d))));
            }
            if !advance(&mut t, alg.size) {
                break;
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// The two middle Jonsson terms derived from a dual i-discriminator:
/// t1(x,y,z) = p(p(x,y,z),y,x) and t2(x,y,z) = p(p(x,y,y),z,z).
pub fn jonsson_terms(p: &Term) -> (Term, Term) {
    let (x, y, z) = (Term::var(0), Term::var(1), Term::var(2));
    let t1 = p.subst(&[p.clone(), y.clone(), x.clone()]);
    let t2 = p.subst(&[
        p.subst(&[x, y.clone(), y]),
        z.clone(),
        z,
    ]);
    (t1, t2)
}

/// Verify the four distributivity equations for the derived Jonsson
/// terms on the listed algebras: t1(x,y,x) = x, t2(x,y,x) = x,
/// t1(x,x,z) = x, t2(x,x,z) = z, t1(x,z,z) = t2(x,z,z).
/// Counterexample (algebra, equation index 1-4, tuple).
pub fn verify_jonsson(
    algs: &[&FiniteAlgebra],
    p: &Term,
) -> Result<Verdict<(), (String, usize, (usize, usize, usize))>, Error> {
    if p.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    let (t1, t2) = jonsson_terms(p);
    for alg in algs {
        for x in 0..alg.size {
            for y in 0..alg.size {
                for z in 0..alg.size {
                    if t1.eval(*alg, &[x, y, x]) != x || t2.eval(*alg, &[x, y, x]) != x {
                        return Ok(Verdict::No((alg.name.clone(), 1, (x, y, z))));
                    }
                    if t1.eval(*alg, &[x, x, z]) != x {
                        return Ok(Verdict::No((alg.name.clone(), 2, (x, x, z))));
                    }
                    if t2.eval(*alg, &[x, x, z]) != z {
                        return Ok(Verdict::No((alg.name.clone(), 3, (x, x, z))));
                    }
                    if t1.eval(*alg, &[x, z, z]) != t2.eval(*alg, &[x, z, z]) {
                        return Ok(Verdict::No((alg.name.clone(), 4, (x, z, z))));
                    }
                }
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// Result of synthesizing a dual i-discriminator from an intersection
/// witness: d = q_L built over p_n, with the verification replayed.
#[derive(Debug, Clone)]
pub struct SynthCertificate {
    pub n: usize,
    pub l: usize,
    pub term: Term,
    pub report: DualIDiscReport,
}

pub const SYNTH_NODE_CAP: usize = 100_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Synthesize a dual i-discriminator term from a ternary intersection
/// witness p on the given Q-irreducible algebras:
/// p_{k+1}(x,y,z) = p(x,y,p_k(x,y,z)) with n the lcm of the orders of
/// the permutations z -> p(a,b,z) for a != b; tau = diagonal of p_n and
/// L the least exponent with tau^(2L) = tau^L everywhere; then
/// q_{k+1}(x,y,z) = p_n(q_k(x,y,x), q_k(x,y,y), q_k(x,y,z)), d = q_L.
pub fn synth_dual_i_discriminator(
    irreducibles: &[&FiniteAlgebra],
    p: &Term,
) -> Result<SynthCertificate, Error> {
    match is_rtpip_witness(irreducibles, p)? {
        Verdict::Yes(()) => {}
        _ => {
            return Err(Error::Validation(
                "the given term is not a ternary intersection witness on the inputs".into(),
            ))
        }
    }
    // n = lcm of the orders of the off-diagonal permutations
    let mut n: u64 = 1;
    for alg in irreducibles {
        for a in 0..alg.size {
            for b in 0..alg.size {
                if a == b {
                    continue;
                }
                let sigma: Vec<usize> =
                    (0..alg.size).map(|z| p.eval(*alg, &[a, b, z])).collect();
                let mut seen = vec![false; alg.size];
                if sigma.iter().any(|&v| {
                    let dup = seen[v];
                    seen[v] = true;
                    dup
                }) {
                    return Err(Error::Validation(format!(
                        "z -> p({},{},z) is not a permutation on {}",
                        a, b, alg.name
                    )));
                }
                // lcm of cycle lengths
                let mut visited = vec![false; alg.size];
                for start in 0..alg.size {
                    if visited[start] {
                        continue;
                    }
                    let mut len = 0u64;
                    let mut cur = start;
                    while !visited[cur] {
                        visited[cur] = true;
                        cur = sigma[cur];
                        len += 1;
                    }
                    n = lcm(n, len);
                }
            }
        }
    }
    let n = n as usize;
    // tau = diagonal of p_n, per algebra
    let taus: Vec<Vec<usize>> = irreducibles
        .iter()
        .map(|alg| {
            (0..alg.size)
                .map(|a| {
                    let mut v = a;
                    for _ in 0..n {
                        v = p.eval(*alg, &[a, a, v]);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let compose = |f: &[usize], g: &[usize]| -> Vec<usize> {
        g.iter().map(|&x| f[x]).collect()
    };
    let mut l = 1usize;
    loop {
        let ok = taus.iter().all(|tau| {
            let mut tl: Vec<usize> = (0..tau.len()).collect();
            for _ in 0..l {
                tl = compose(tau, &tl);
            }
            let t2l = {
                let mut t = tl.clone();
                for _ in 0..l {
                    t = compose(tau, &t);
                }
                t
            };
            t2l == tl
        });
        if ok {
            break;
        }
        l += 1;
        if l > 10_000 {
            return Err(Error::Budget("diagonal stabilization exponent exceeds 10000".into()));
        }
    }
    // build p_n and d = q_L as terms
    let mut pn = p.clone();
    for _ in 1..n {
        pn = p.subst(&[Term::var(0), Term::var(1), pn]);
        if pn.node_count() > SYNTH_NODE_CAP {
            return Err(Error::Budget("synthesized term exceeds the node cap".into()));
        }
    }
    let mut q = Term::var(2);
    for _ in 0..l {
        let qx = q.subst(&[Term::var(0), Term::var(1), Term::var(0)]);
        let qy = q.subst(&[Term::var(0), Term::var(1), Term::var(1)]);
        let qz = q.clone();
        q = pn.subst(&[qx, qy, qz]);
        if q.node_count() > SYNTH_NODE_CAP {
            return Err(Error::Budget("synthesized term exceeds the node cap".into()));
        }
    }
    let report = is_dual_i_discriminator(irreducibles, &q)?;
    Ok(SynthCertificate {
        n,
        l,
        term: q,
        report,
    })
}

/// A failing instance of the principal-congruence description.
#[derive(Debug, Clone)]
pub struct EdprcFailure {
    pub pair: (usize, usize),
    pub elements: (usize, usize),
    /// Whether (c,d) is in the principal Q-congruence of the pair.
    pub in_cg: bool,
    /// A u with p(c,d,u) != p(c,d,p(a,b,u)), when the formula side fails.
    pub witness_u: Option<usize>,
}

/// Check (c,d) in cg_Q(a,b) iff for all u, p(c,d,u) = p(c,d,p(a,b,u)),
/// exhaustively on a.
pub fn edprc_check(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    p: &Term,
    budgets: &Budgets,
) -> Result<Verdict<(), EdprcFailure>, Error> {
    if p.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    let lat = con_q(a, &q.refs(), budgets)?;
    for x in 0..a.size {
        for y in 0..a.size {
            let cg = lat.principal(&[(x, y)]);
            for c in 0..a.size {
                for d in 0..a.size {
                    let mut formula = true;
                    let mut bad_u = None;
                    for u in 0..a.size {
                        let inner = p.eval(a, &[x, y, u]);
                        if p.eval(a, &[c, d, u]) != p.eval(a, &[c, d, inner]) {
                            formula = false;
                            bad_u = Some(u);
                            break;
                        }
                    }
                    if cg.related(c, d) != formula {
                        return Ok(Verdict::No(EdprcFailure {
                            pair: (x, y),
                            elements: (c, d),
                            in_cg: cg.related(c, d),
                            witness_u: bad_u,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// s(x,x) = 0 and s(x,0) = x on a, with `zero` the designated element.
pub fn is_subtraction_term(
    a: &FiniteAlgebra,
    s: &Term,
    zero: usize,
) -> Result<Verdict<(), String>, Error> {
    if s.nvars() > 2 {
        return Err(Error::Validation("a subtraction term is binary".into()));
    }
    for x in 0..a.size {
        let v = s.eval(a, &[x, x]);
        if v != zero {
            return Ok(Verdict::No(format!("s({x},{x}) = {v}, not the zero element")));
        }
        let w = s.eval(a, &[x, zero]);
        if w != x {
            return Ok(Verdict::No(format!("s({x},0) = {w}, not {x}")));
        }
    }
    Ok(Verdict::Yes(()))
}

/// 0-regularity witnesses: both the pointwise biconditional
/// (r1(x,y) = ... = rn(x,y) = 0 iff x = y) and the relative form
/// (the 0-class of cg_Q(a,b) is {0} iff a = b).
#[derive(Debug, Clone)]
pub struct ZeroRegularReport {
    pub pointwise: Verdict<(), (usize, usize)>,
    pub relative: Verdict<(), (usize, usize)>,
}

impl ZeroRegularReport {
    pub fn holds(&self) -> bool {
        self.pointwise.is_yes() && self.relative.is_yes()
    }
}

pub fn zero_regular_witnesses(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    rs: &[Term],
    zero: usize,
    budgets: &Budgets,
) -> Result<ZeroRegularReport, Error> {
    if rs.is_empty() {
        return Err(Error::Validation("at least one regularity witness is required".into()));
    }
    if rs.iter().any(|r| r.nvars() > 2) {
        return Err(Error::Validation("regularity witnesses are binary".into()));
    }
    let mut pointwise = Verdict::Yes(());
    'pw: for x in 0..a.size {
        for y in 0..a.size {
            let all_zero = rs.iter().all(|r| r.eval(a, &[x, y]) == zero);
            if all_zero != (x == y) {
                pointwise = Verdict::No((x, y));
                break 'pw;
            }
        }
    }
    let lat = con_q(a, &q.refs(), budgets)?;
    let mut relative = Verdict::Yes(());
    'rel: for x in 0..a.size {
        for y in 0..a.size {
            let cg = lat.principal(&[(x, y)]);
            let zero_class_trivial = (0..a.size).all(|e| !cg.related(zero, e) || e == zero);
            if zero_class_trivial != (x == y) {
                relative = Verdict::No((x, y));
                break 'rel;
            }
        }
    }
    Ok(ZeroRegularReport {
        pointwise,
        relative,
    })
}

/// Report for the single-term ideal description u: the three identities
/// u(a,a) = 0, u(a,0) = a, u(0,a) = 0, and the biconditional
/// a in I_Q(b) iff u(a,b) = 0, where I_Q(b) is the 0-class of cg_Q(b,0).
#[derive(Debug, Clone)]
pub struct UTermReport {
    pub identities: Verdict<(), String>,
    pub ideal: Verdict<(), (usize, usize)>,
}

impl UTermReport {
    pub fn holds(&self) -> bool {
        self.identities.is_yes() && self.ideal.is_yes()
    }
}

pub fn u_term_check(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    u: &Term,
    zero: usize,
    budgets: &Budgets,
) -> Result<UTermReport, Error> {
    if u.nvars() > 2 {
        return Err(Error::Validation("the ideal-description term is binary".into()));
    }
    let mut identities = Verdict::Yes(());
    for x in 0..a.size {
        if u.eval(a, &[x, x]) != zero {
            identities = Verdict::No(format!("u({x},{x}) is not 0"));
            break;
        }
        if u.eval(a, &[x, zero]) != x {
            identities = Verdict::No(format!("u({x},0) is not {x}"));
            break;
        }
        if u.eval(a, &[zero, x]) != zero {
            identities = Verdict::No(format!("u(0,{x}) is not 0"));
            break;
        }
    }
    let lat = con_q(a, &q.refs(), budgets)?;
    let mut ideal = Verdict::Yes(());
    'scan: for b in 0..a.size {
        let cg = lat.principal(&[(b, zero)]);
        for x in 0..a.size {
            let member = cg.related(x, zero);
            if member != (u.eval(a, &[x, b]) == zero) {
                ideal = Verdict::No((x, b));
                break 'scan;
            }
        }
    }
    Ok(UTermReport { identities, ideal })
}

/// d(x,y,z) = p(z, p(x,y,z), z): the fixedpoint discriminator derived
/// from a dual i-discriminator with p(x,x,x) = 0.
pub fn dual_to_fixedpoint(p: &Term) -> Result<Term, Error> {
    if p.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    Ok(p.subst(&[Term::var(2), p.clone(), Term::var(2)]))
}

/// p(x,y,z) = d(zero, d(x,y,z), z): the dual i-discriminator derived
/// from a fixedpoint discriminator; `zero_term` is a constant term
/// denoting the designated element.
pub fn fixedpoint_to_dual(d: &Term, zero_term: &Term) -> Result<Term, Error> {
    if d.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    Ok(d.subst(&[zero_term.clone(), d.clone(), Term::var(2)]))
}

/// d(a,b,c) = c if a = b, and = zero otherwise. Counterexample (a,b,c).
pub fn is_fixedpoint_discriminator(
    a: &FiniteAlgebra,
    d: &Term,
    zero: usize,
) -> Result<Verdict<(), (usize, usize, usize)>, Error> {
    if d.nvars() > 3 {
        return Err(Error::Validation("a discriminator term is ternary".into()));
    }
    for x in 0..a.size {
        for y in 0..a.size {
            for z in 0..a.size {
                let v = d.eval(a, &[x, y, z]);
                let want = if x == y { z } else { zero };
                if v != want {
                    return Ok(Verdict::No((x, y, z)));
                }
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// d(x,y,z) = u( ... u(u(z, r1(x,y)), r2(x,y)) ..., rn(x,y)) — the
/// fixedpoint discriminator built from a verified ideal-description term
/// and 0-regularity witnesses, then verified on the given Q-simple
/// algebra: equal inputs zero every witness and u(z,0) = z keeps the
/// probe, while any nonzero witness value collapses it to 0. Errors if
/// either precondition fails.
pub fn fixedpoint_from_regularity(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    u: &Term,
    rs: &[Term],
    zero: usize,
    budgets: &Budgets,
) -> Result<(Term, Verdict<(), (usize, usize, usize)>), Error> {
    if !u_term_check(q, a, u, zero, budgets)?.holds() {
        return Err(Error::Validation("the ideal-description term fails its checks".into()));
    }
    if !zero_regular_witnesses(q, a, rs, zero, budgets)?.holds() {
        return Err(Error::Validation("the 0-regularity witnesses fail".into()));
    }
    let mut d = Term::var(2);
    for r in rs {
        d = u.subst(&[d, r.clone()]);
    }
    let verified = is_fixedpoint_discriminator(a, &d, zero)?;
    Ok((d, verified))
}

/// 0-classes of a congruence lattice, with the theta -> 0/theta map
/// checked: injectivity (isomorphism in the relatively 0-regular case)
/// and the composition identity 0/(theta v phi) = 0/(theta o phi).
#[derive(Debug, Clone)]
pub struct IdealReport {
    /// One 0-class per lattice member, in lattice order.
    pub zero_classes: Vec<Vec<usize>>,
    /// Distinct 0-classes, sorted.
    pub ideals: Vec<Vec<usize>>,
    pub injective: bool,
    /// First (i, j) with 0/(theta_i v theta_j) != 0/(theta_i o theta_j).
    pub composition: Verdict<(), (usize, usize)>,
}

pub fn ideals(
    a: &FiniteAlgebra,
    lattice: &CongruenceLattice,
    s: &Term,
    zero: usize,
) -> Result<IdealReport, Error> {
    if !is_subtraction_term(a, s, zero)?.is_yes() {
        return Err(Error::Validation(format!(
            "{} is not subtractive with the given term",
            a.name
        )));
    }
    let zero_class = |theta: &Congruence| -> Vec<usize> {
        (0..a.size).filter(|&e| theta.related(zero, e)).collect()
    };
    let zero_classes: Vec<Vec<usize>> = lattice.members.iter().map(|t| zero_class(t)).collect();
    let mut ideals: Vec<Vec<usize>> = zero_classes.clone();
    ideals.sort();
    ideals.dedup();
    let injective = ideals.len() == lattice.members.len();
    let mut composition = Verdict::Yes(());
    'comp: for (i, th) in lattice.members.iter().enumerate() {
        for (j, ph) in lattice.members.iter().enumerate() {
            let joined = zero_class(&lattice.join(th, ph));
            // 0/(theta o phi): elements phi-related to something in 0/theta
            let mut composed: Vec<usize> = (0..a.size)
                .filter(|&e| (0..a.size).any(|b| th.related(zero, b) && ph.related(b, e)))
                .collect();
            composed.sort_unstable();
            if joined != composed {
                composition = Verdict::No((i, j));
                break 'comp;
            }
        }
    }
    Ok(IdealReport {
        zero_classes,
        ideals,
        injective,
        composition,
    })
}

/// Sufficient condition for primitivity: p is a dual i-discriminator on
/// the Q-irreducible members and every fundamental operation commutes
/// with p on every generator. A non-commuting operation makes the test
/// inconclusive, not a refutation.
pub fn primitive_by_commutation(
    q: &Quasivariety,
    p: &Term,
    budgets: &Budgets,
) -> Result<Verdict<Vec<String>, ()>, Error> {
    // gather the Q-irreducible subalgebras of the generators
    let mut irr: Vec<FiniteAlgebra> = Vec::new();
    for g in &q.generators {
        for (_, cand) in subalgebras_upto_iso(g, budgets)? {
            match q_irreducible(&cand, &q.refs(), budgets)? {
                Verdict::Yes(_) => {
                    if !irr
                        .iter()
                        .any(|o| crate::morphisms::isomorphic(&cand, o, budgets).is_yes())
                    {
                        irr.push(cand);
                    }
                }
                Verdict::No(()) => {}
                Verdict::Unknown(e) => return Err(Error::Budget(e)),
            }
        }
    }
    let refs: Vec<&FiniteAlgebra> = irr.iter().collect();
    let report = is_dual_i_discriminator(&refs, p)?;
    if !report.pass() {
        return Err(Error::Validation(
            "the term is not a dual i-discriminator on the Q-irreducible members".into(),
        ));
    }
    let mut checked = Vec::new();
    for g in &q.generators {
        for (op, sym) in g.sig.ops.iter().enumerate() {
            let op_term = Term::apply(op, (0..sym.arity).map(Term::var).collect());
            match commutes(g, p, &op_term, budgets)? {
                Verdict::Yes(()) => checked.push(format!("{} on {}", sym.name, g.name)),
                Verdict::No(tuple) => {
                    return Ok(Verdict::Unknown(format!(
                        "inconclusive: {} does not commute with the discriminator on {} at {:?}; \
                         this does not refute primitivity",
                        sym.name, g.name, tuple
                    )))
                }
                Verdict::Unknown(e) => return Ok(Verdict::Unknown(e)),
            }
        }
    }
    Ok(Verdict::Yes(checked))
}
