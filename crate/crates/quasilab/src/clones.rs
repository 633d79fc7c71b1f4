//! Subclone reducts, C-structural completeness, u-presentability, Prucnal
//! terms and their iterates, relative TD-terms, and commutation checks.
//!
//! A clone is specified by a finite list of generator terms over the base
//! signature; `reduct` re-tables an algebra with those terms as its
//! fundamental operations. C-structural completeness is decided like the
//! full-signature version: the reduct homomorphisms into a reduct of a
//! free algebra must separate the points of every generating algebra.
//! Separations found at a lower free rank lift along the canonical
//! embedding into higher ranks, so the search ascends; a definitive no
//! needs the full-rank free algebra to be complete.

use std::rc::Rc;

use crate::congruence::{con_q, Congruence};
use crate::deduction::Quasivariety;
use crate::kernel::{AlgebraLike, Budgets, Error, FiniteAlgebra, Signature, Term};
use crate::morphisms::{advance, embeds, find_hom, is_homomorphism, quotient, HomFilter, Homomorphism};
use crate::report::Verdict;

/// A clone presented by generator terms; arities are the terms' variable
/// counts.
#[derive(Debug, Clone)]
pub struct CloneSpec {
    pub terms: Vec<Term>,
    pub arities: Vec<usize>,
}

impl CloneSpec {
    pub fn new(terms: Vec<Term>) -> Result<CloneSpec, Error> {
        if terms.is_empty() {
            return Err(Error::Validation("clone spec needs at least one term".into()));
        }
        let arities = terms.iter().map(|t| t.nvars()).collect();
        Ok(CloneSpec { terms, arities })
    }

    /// The full clone: one generator per fundamental operation.
    pub fn full(sig: &Signature) -> CloneSpec {
        let terms: Vec<Term> = sig
            .ops
            .iter()
            .enumerate()
            .map(|(op, sym)| Term::apply(op, (0..sym.arity).map(Term::var).collect()))
            .collect();
        CloneSpec::new(terms).expect("signatures are nonempty")
    }

    /// Semicolon-separated term list, e.g. "meet(x,y); imp(x,y)".
    pub fn parse(text: &str, sig: &Signature) -> Result<CloneSpec, Error> {
        let mut terms = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            terms.push(crate::kernel::parse_term(part, sig)?.0);
        }
        CloneSpec::new(terms)
    }

    /// Signature of the reduct: each generator term becomes an operation
    /// symbol named by its printed form.
    pub fn reduct_signature(&self, base: &Signature) -> Rc<Signature> {
        let ops = self
            .terms
            .iter()
            .zip(&self.arities)
            .map(|(t, &k)| (t.print(base), k))
            .collect::<Vec<_>>();
        Rc::new(Signature::new(ops.iter().map(|(n, k)| (n.as_str(), *k)).collect()))
    }
}

/// An algebra re-tabled over a clone's generator terms.
#[derive(Debug, Clone)]
pub struct Reduct {
    pub base: FiniteAlgebra,
    pub spec: CloneSpec,
    pub derived: FiniteAlgebra,
}

/// Tables by exhaustive evaluation of each generator term.
pub fn reduct(a: &FiniteAlgebra, spec: &CloneSpec) -> Reduct {
    let sig = spec.reduct_signature(&a.sig);
    let mut tables = Vec::with_capacity(spec.terms.len());
    for (t, &k) in spec.terms.iter().zip(&spec.arities) {
        let mut table = Vec::with_capacity(a.size.pow(k as u32));
        let mut args = vec![0usize; k];
        loop {
            table.push(t.eval(a, &args));
            if k == 0 || !advance(&mut args, a.size) {
                break;
            }
        }
        tables.push(table);
    }
    let derived = FiniteAlgebra::new(
        &format!("{}^C", a.name),
        sig,
        a.labels.clone(),
        tables,
    )
    .expect("reduct tables are total by construction");
    Reduct {
        base: a.clone(),
        spec: spec.clone(),
        derived,
    }
}

/// A reduct of an arbitrary (possibly non-materialized) algebra, with
/// operations evaluated on demand. Shares its signature with `reduct`
/// outputs built from the same spec, so homomorphism searches between
/// them typecheck.
pub struct ReductView<'a, A: AlgebraLike + ?Sized> {
    base: &'a A,
    sig: Rc<Signature>,
    terms: Vec<Term>,
    name: String,
}

impl<'a, A: AlgebraLike + ?Sized> ReductView<'a, A> {
    pub fn new(base: &'a A, spec: &CloneSpec) -> ReductView<'a, A> {
        ReductView {
            base,
            sig: spec.reduct_signature(base.signature()),
            terms: spec.terms.clone(),
            name: format!("{}^C", base.display_name()),
        }
    }
}

impl<'a, A: AlgebraLike + ?Sized> AlgebraLike for ReductView<'a, A> {
    fn carrier_size(&self) -> usize {
        self.base.carrier_size()
    }
    fn signature(&self) -> &Rc<Signature> {
        &self.sig
    }
    fn op_value(&self, op: usize, args: &[usize]) -> usize {
        self.terms[op].eval(self.base, args)
    }
    fn display_name(&self) -> &str {
        &self.name
    }
}

/// The k-ary term operations of a, as tables, generated by closing the k
/// projections under the fundamental operations.
#[derive(Debug, Clone)]
pub struct TermClone {
    pub arity: usize,
    pub tables: Vec<Vec<usize>>,
    /// Cap was hit; nonexistence claims over the closure are unavailable.
    pub truncated: bool,
}

pub const TERM_CLONE_CAP: usize = 100_000;

pub fn term_clone(a: &FiniteAlgebra, arity: usize, cap: usize) -> TermClone {
    let tuple_count = a.size.pow(arity as u32);
    // large closures (e.g. the full ternary clone of a 3-element algebra)
    // are only tractable with tables packed into machine words
    if a.size <= 4 && tuple_count <= 32 && a.sig.ops.iter().all(|o| o.arity <= 2) {
        return term_clone_packed(a, arity, cap, tuple_count);
    }
    let mut tables: Vec<Vec<usize>> = Vec::new();
    let mut index = std::collections::HashSet::new();
    // the k projections, then constants from nullary ops
    for i in 0..arity {
        let mut t = Vec::with_capacity(tuple_count);
        let mut args = vec![0usize; arity];
        loop {
            t.push(args[i]);
            if !advance(&mut args, a.size) {
                break;
            }
        }
        if index.insert(t.clone()) {
            tables.push(t);
        }
    }
    for op in 0..a.sig.ops.len() {
        if a.sig.arity(op) == 0 {
            let t = vec![a.apply(op, &[]); tuple_count];
            if index.insert(t.clone()) {
                tables.push(t);
            }
        }
    }
    let mut truncated = false;
    let mut prev_start = 0usize;
    'grow: loop {
        let pass_start = tables.len();
        if prev_start == pass_start {
            break;
        }
        for op in 0..a.sig.ops.len() {
            let m = a.sig.arity(op);
            if m == 0 {
                continue;
            }
            // at least one argument (at position j) must be new this pass
            for j in 0..m {
                let mut choice = vec![0usize; m];
                choice[j] = prev_start;
                if j > 0 && prev_start == 0 {
                    break;
                }
                // per-position ranges: position j over this pass's new
                // tables, earlier positions over strictly older ones
                let range = |p: usize| -> (usize, usize) {
                    if p == j {
                        (prev_start, pass_start)
                    } else if p < j {
                        (0, prev_start)
                    } else {
                        (0, pass_start)
                    }
                };
                loop {
                    let new_table: Vec<usize> = (0..tuple_count)
                        .map(|idx| {
                            let args: Vec<usize> =
                                (0..m).map(|p| tables[choice[p]][idx]).collect();
                            a.apply(op, &args)
                        })
                        .collect();
                    if index.insert(new_table.clone()) {
                        tables.push(new_table);
                        if tables.len() >= cap {
                            truncated = true;
                            break 'grow;
                        }
                    }
                    let mut p = m;
                    let mut wrapped = true;
                    while p > 0 {
                        p -= 1;
                        let (lo, hi) = range(p);
                        choice[p] += 1;
                        if choice[p] < hi {
                            wrapped = false;
                            break;
                        }
                        choice[p] = lo;
                    }
                    if wrapped {
                        break;
                    }
                }
            }
        }
        prev_start = pass_start;
    }
    TermClone {
        arity,
        tables,
        truncated,
    }
}

/// Closure with tables packed 2 bits per entry into a u64, fundamental
/// ops applied four entries at a time through precomputed byte tables.
/// Only reached when size <= 4, tuple_count <= 32, and all ops have
/// arity <= 2; the result is identical to the generic path.
fn term_clone_packed(a: &FiniteAlgebra, arity: usize, cap: usize, tuple_count: usize) -> TermClone {
    let nbytes = tuple_count.div_ceil(4);
    let mask: u64 = if tuple_count == 32 {
        u64::MAX
    } else {
        (1u64 << (2 * tuple_count)) - 1
    };
    let clamp = |v: usize| v.min(a.size - 1);
    // per-op byte tables: fieldwise application to packed 4-entry bytes
    let mut unary: Vec<(usize, Vec<u8>)> = Vec::new();
    let mut binary: Vec<(usize, Vec<u8>)> = Vec::new();
    for op in 0..a.sig.ops.len() {
        match a.sig.arity(op) {
            1 => {
                let mut t = vec![0u8; 256];
                for x in 0..256usize {
                    let mut out = 0u8;
                    for f in 0..4 {
                        let v = a.apply(op, &[clamp((x >> (2 * f)) & 3)]);
                        out |= (v as u8) << (2 * f);
                    }
                    t[x] = out;
                }
                unary.push((op, t));
            }
            2 => {
                let mut t = vec![0u8; 65536];
                for x in 0..256usize {
                    for y in 0..256usize {
                        let mut out = 0u8;
                        for f in 0..4 {
                            let v = a.apply(
                                op,
                                &[clamp((x >> (2 * f)) & 3), clamp((y >> (2 * f)) & 3)],
                            );
                            out |= (v as u8) << (2 * f);
                        }
                        t[(x << 8) | y] = out;
                    }
                }
                binary.push((op, t));
            }
            _ => {}
        }
    }
    let apply1 = |t: &[u8], x: u64| -> u64 {
        let mut out = 0u64;
        for b in 0..nbytes {
            out |= (t[((x >> (8 * b)) & 0xFF) as usize] as u64) << (8 * b);
        }
        out & mask
    };
    let apply2 = |t: &[u8], x: u64, y: u64| -> u64 {
        let mut out = 0u64;
        for b in 0..nbytes {
            let xb = ((x >> (8 * b)) & 0xFF) as usize;
            let yb = ((y >> (8 * b)) & 0xFF) as usize;
            out |= (t[(xb << 8) | yb] as u64) << (8 * b);
        }
        out & mask
    };
    let mut packed: Vec<u64> = Vec::new();
    let mut index = std::collections::HashSet::new();
    // projections, then constants
    for i in 0..arity {
        let mut p = 0u64;
        let mut args = vec![0usize; arity];
        let mut idx = 0usize;
        loop {
            p |= (args[i] as u64) << (2 * idx);
            idx += 1;
            if !advance(&mut args, a.size) {
                break;
            }
        }
        if index.insert(p) {
            packed.push(p);
        }
    }
    for op in 0..a.sig.ops.len() {
        if a.sig.arity(op) == 0 {
            let c = a.apply(op, &[]) as u64;
            let mut p = 0u64;
            for idx in 0..tuple_count {
                p |= c << (2 * idx);
            }
            if index.insert(p) {
                packed.push(p);
            }
        }
    }
    let mut truncated = false;
    let mut prev_start = 0usize;
    'grow: loop {
        let pass_start = packed.len();
        if prev_start == pass_start {
            break;
        }
        for (_, t) in &unary {
            for i in prev_start..pass_start {
                let v = apply1(t, packed[i]);
                if index.insert(v) {
                    packed.push(v);
                    if packed.len() >= cap {
                        truncated = true;
                        break 'grow;
                    }
                }
            }
        }
        for (_, t) in &binary {
            // at least one argument must be new this pass: (new, any-so-far)
            // and (old, new), matching the generic path's schedule
            for i in prev_start..pass_start {
                let x = packed[i];
                for j in 0..pass_start {
                    let y = packed[j];
                    for v in [apply2(t, x, y), apply2(t, y, x)] {
                        if index.insert(v) {
                            packed.push(v);
                            if packed.len() >= cap {
                                truncated = true;
                                break 'grow;
                            }
                        }
                    }
                }
            }
        }
        prev_start = pass_start;
    }
    let tables: Vec<Vec<usize>> = packed
        .iter()
        .map(|&p| (0..tuple_count).map(|i| ((p >> (2 * i)) & 3) as usize).collect())
        .collect();
    TermClone {
        arity,
        tables,
        truncated,
    }
}

/// A point-separating reduct homomorphism into a reduct of the free
/// algebra, one per pair per generator.
#[derive(Debug, Clone)]
pub struct CscSeparation {
    pub generator: String,
    pub pair: (usize, usize),
    pub rank: usize,
    pub map: Homomorphism,
}

/// Is Q C-structurally complete: do reduct homomorphisms into the reduct
/// of the free algebra of rank n* separate the points of each generator?
pub fn c_structurally_complete(
    q: &Quasivariety,
    spec: &CloneSpec,
    budgets: &Budgets,
) -> Verdict<Vec<CscSeparation>, (String, (usize, usize))> {
    let n_star = q.n_star();
    let mut separations = Vec::new();
    let mut blocked: Option<String> = None;
    for a in &q.generators {
        let ra = reduct(a, spec);
        for x in 0..a.size {
            for y in (x + 1)..a.size {
                let mut separated = false;
                let mut saw_incomplete = false;
                for rank in 1..=n_star {
                    match q.free(rank, budgets) {
                        Ok(f) if !f.truncated => {
                            let rv = ReductView::new(&*f, spec);
                            match find_hom(&ra.derived, &rv, HomFilter::Separating(x, y), budgets)
                            {
                                Ok(Some(h)) => {
                                    separations.push(CscSeparation {
                                        generator: a.name.clone(),
                                        pair: (x, y),
                                        rank,
                                        map: h,
                                    });
                                    separated = true;
                                    break;
                                }
                                Ok(None) => {}
                                Err(e) => {
                                    if rank == n_star {
                                        saw_incomplete = true;
                                        blocked = Some(e.to_string());
                                    }
                                }
                            }
                        }
                        Ok(_) => {
                            if rank == n_star {
                                saw_incomplete = true;
                                blocked =
                                    Some(format!("free rank {} exceeds the size cap", rank));
                            }
                        }
                        Err(e) => {
                            if rank == n_star {
                                saw_incomplete = true;
                                blocked = Some(e.to_string());
                            }
                        }
                    }
                }
                if !separated {
                    if saw_incomplete {
                        return Verdict::Unknown(blocked.unwrap_or_else(|| {
                            "free algebra incomplete at the required rank".into()
                        }));
                    }
                    return Verdict::No((a.name.clone(), (x, y)));
                }
            }
        }
    }
    Verdict::Yes(separations)
}

/// Does the C-reduct of a/theta embed into the C-reduct of a? Requires
/// theta to be a Q-congruence of a.
pub fn u_presentable(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    theta: &Congruence,
    spec: &CloneSpec,
    budgets: &Budgets,
) -> Result<Verdict<Homomorphism>, Error> {
    let lat = con_q(a, &q.refs(), budgets)?;
    if !lat.members.contains(theta) {
        return Err(Error::Validation(
            "theta is not a Q-congruence of the algebra".into(),
        ));
    }
    let (quot, _) = quotient(a, theta);
    let rq = reduct(&quot, spec);
    let ra = reduct(a, spec);
    Ok(embeds(&rq.derived, &ra.derived, budgets))
}

/// Why a candidate principal Prucnal term fails at some pair.
#[derive(Debug, Clone)]
pub struct PrucnalFailure {
    pub pair: (usize, usize),
    /// The map c -> t(a,b,c) is not an endomorphism of the reduct.
    pub not_endo: bool,
    pub kernel: Congruence,
    pub expected: Congruence,
}

/// Is t a principal Prucnal term for a relative to C: for every pair
/// (a,b), the map c -> t(a,b,c) is an endomorphism of the C-reduct with
/// kernel the principal Q-congruence of (a,b)?
pub fn prucnal_principal_check(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    t: &Term,
    spec: &CloneSpec,
    budgets: &Budgets,
) -> Result<Verdict<(), PrucnalFailure>, Error> {
    if t.nvars() > 3 {
        return Err(Error::Validation("a Prucnal term is ternary".into()));
    }
    let lat = con_q(a, &q.refs(), budgets)?;
    let ra = reduct(a, spec);
    for p0 in 0..a.size {
        for p1 in 0..a.size {
            let sigma: Vec<usize> = (0..a.size).map(|c| t.eval(a, &[p0, p1, c])).collect();
            let kernel = Congruence::from_kernel(&sigma);
            let expected = lat.principal(&[(p0, p1)]);
            let endo = is_homomorphism(&ra.derived, &ra.derived, &sigma);
            if !endo || kernel != expected {
                return Ok(Verdict::No(PrucnalFailure {
                    pair: (p0, p1),
                    not_endo: !endo,
                    kernel,
                    expected,
                }));
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// The iterated Prucnal term t_n in 2n+1 variables: with x_i = var 2i-2,
/// y_i = var 2i-1, z = var 2n,
/// t_n = t(x1, y1, t(x2, y2, ... t(xn, yn, z) ... )).
pub fn prucnal_iterate(t: &Term, n: usize) -> Result<Term, Error> {
    if t.nvars() > 3 {
        return Err(Error::Validation("a Prucnal term is ternary".into()));
    }
    if n == 0 {
        return Err(Error::Validation("iterate count must be at least 1".into()));
    }
    let mut acc = Term::var(2 * n);
    for i in (1..=n).rev() {
        acc = t.subst(&[Term::var(2 * i - 2), Term::var(2 * i - 1), acc]);
    }
    Ok(acc)
}

/// Check the iterated-kernel law at the given pairs: (c,d) lies in the
/// join of the principal Q-congruences of the pairs iff
/// t_n(a1,b1,...,an,bn,c) = t_n(...,d). The failing (c,d) otherwise.
pub fn sigma_kernel_check(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    t: &Term,
    pairs: &[(usize, usize)],
    budgets: &Budgets,
) -> Result<Verdict<(), (usize, usize)>, Error> {
    let n = pairs.len();
    let tn = prucnal_iterate(t, n)?;
    let lat = con_q(a, &q.refs(), budgets)?;
    let mut join = Congruence::delta(a.size);
    for &(x, y) in pairs {
        join = lat.join(&join, &lat.principal(&[(x, y)]));
    }
    let mut vals = vec![0usize; 2 * n + 1];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        vals[2 * i] = x;
        vals[2 * i + 1] = y;
    }
    let sigma: Vec<usize> = (0..a.size)
        .map(|c| {
            vals[2 * n] = c;
            tn.eval(a, &vals)
        })
        .collect();
    for c in 0..a.size {
        for d in 0..a.size {
            if join.related(c, d) != (sigma[c] == sigma[d]) {
                return Ok(Verdict::No((c, d)));
            }
        }
    }
    Ok(Verdict::Yes(()))
}

/// Relative TD-term report. The defining clause "t(x,x,z)" is checked as
/// the identity t(x,x,z) = z; that reading is recorded here.
#[derive(Debug, Clone)]
pub struct TdReport {
    /// t(x,x,z) = z; counterexample (x, z).
    pub identity: Verdict<(), (usize, usize)>,
    /// (c,d) in cg_Q(a,b) implies t(a,b,c) = t(a,b,d); counterexample
    /// ((a,b),(c,d)).
    pub congruence: Verdict<(), ((usize, usize), (usize, usize))>,
    /// When both clauses hold: the definable-principal-congruence
    /// biconditional (c,d) in cg_Q(a,b) iff t(a,b,c) = t(a,b,d).
    pub edprc: Option<Verdict<(), ((usize, usize), (usize, usize))>>,
    pub reading: &'static str,
}

impl TdReport {
    pub fn holds(&self) -> bool {
        self.identity.is_yes() && self.congruence.is_yes()
    }
}

pub const TD_READING: &str = "clause (i) is checked as the identity t(x,x,z) = z";

pub fn td_term_check(
    q: &Quasivariety,
    a: &FiniteAlgebra,
    t: &Term,
    budgets: &Budgets,
) -> Result<TdReport, Error> {
    if t.nvars() > 3 {
        return Err(Error::Validation("a TD-term is ternary".into()));
    }
    let mut identity = Verdict::Yes(());
    'id: for x in 0..a.size {
        for z in 0..a.size {
            if t.eval(a, &[x, x, z]) != z {
                identity = Verdict::No((x, z));
                break 'id;
            }
        }
    }
    let lat = con_q(a, &q.refs(), budgets)?;
    let mut congruence = Verdict::Yes(());
    let mut edprc_inner = Verdict::Yes(());
    'cg: for p0 in 0..a.size {
        for p1 in 0..a.size {
            let cg = lat.principal(&[(p0, p1)]);
            for c in 0..a.size {
                for d in 0..a.size {
                    let eq = t.eval(a, &[p0, p1, c]) == t.eval(a, &[p0, p1, d]);
                    if cg.related(c, d) && !eq {
                        congruence = Verdict::No(((p0, p1), (c, d)));
                        break 'cg;
                    }
                    if eq != cg.related(c, d) && edprc_inner.is_yes() {
                        edprc_inner = Verdict::No(((p0, p1), (c, d)));
                    }
                }
            }
        }
    }
    let holds = identity.is_yes() && congruence.is_yes();
    Ok(TdReport {
        identity,
        congruence,
        edprc: if holds { Some(edprc_inner) } else { None },
        reading: TD_READING,
    })
}

/// Does q commute with t on a: t(a,b,q(c1..ck)) = q(t(a,b,c1),...,
/// t(a,b,ck)) for all a, b, c1..ck? Counterexample tuple (a, b, c1..ck).
pub fn commutes(
    alg: &FiniteAlgebra,
    t: &Term,
    qterm: &Term,
    budgets: &Budgets,
) -> Result<Verdict<(), Vec<usize>>, Error> {
    if t.nvars() > 3 {
        return Err(Error::Validation("the interchanged term is ternary".into()));
    }
    let k = qterm.nvars();
    let total = (k as u32) + 2;
    if (alg.size as u64).pow(total) > budgets.assignments {
        return Err(Error::Budget(format!(
            "commutation scan needs {}^{} tuples",
            alg.size, total
        )));
    }
    let mut tuple = vec![0usize; k + 2];
    loop {
        let (a, b) = (tuple[0], tuple[1]);
        let cs = &tuple[2..];
        let lhs = t.eval(alg, &[a, b, qterm.eval(alg, cs)]);
        let mapped: Vec<usize> = cs.iter().map(|&c| t.eval(alg, &[a, b, c])).collect();
        let rhs = qterm.eval(alg, &mapped);
        if lhs != rhs {
            return Ok(Verdict::No(tuple));
        }
        if !advance(&mut tuple, alg.size) {
            break;
        }
    }
    Ok(Verdict::Yes(()))
}
