//! Homomorphism, embedding, isomorphism, and retraction search, plus
//! product/subalgebra/quotient constructions and subalgebra enumeration up
//! to isomorphism.
//!
//! The single performance-critical kernel is a backtracking search over
//! element images with forced closure after every choice: assigning one
//! image propagates through the operation tables and fails fast on a
//! conflict, so the effective branching is over a generating set only.

use crate::congruence::Congruence;
use crate::kernel::{AlgebraLike, Budgets, Error, FiniteAlgebra};
use crate::report::Verdict;
use serde::Serialize;

/// A verified map between algebras of the same signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|&y| seen.insert(y))
    }

    pub fn is_surjective(&self, dst_size: usize) -> bool {
        let mut hit = vec![false; dst_size];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.iter().all(|&h| h)
    }
}

/// Exhaustive compatibility check: map(f_src(args)) = f_dst(map(args)).
pub fn is_homomorphism<B: AlgebraLike + ?Sized>(
    src: &FiniteAlgebra,
    dst: &B,
    map: &[usize],
) -> bool {
    if map.len() != src.size || map.iter().any(|&y| y >= dst.carrier_size()) {
        return false;
    }
    for (op, sym) in src.sig.ops.iter().enumerate() {
        let k = sym.arity;
        let mut args = vec![0usize; k];
        loop {
            let lhs = map[src.apply(op, &args)];
            let imgs: Vec<usize> = args.iter().map(|&x| map[x]).collect();
            if lhs != dst.op_value(op, &imgs) {
                return false;
            }
            if !advance(&mut args, src.size) {
                break;
            }
        }
    }
    true
}

/// Advance a tuple in lexicographic order (last coordinate fastest);
/// returns false after the last tuple.
pub fn advance(args: &mut [usize], base: usize) -> bool {
    for i in (0..args.len()).rev() {
        args[i] += 1;
        if args[i] < base {
            return true;
        }
        args[i] = 0;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomFilter {
    All,
    Surjective,
    Injective,
    /// Emit only maps with map[x] != map[y].
    Separating(usize, usize),
}

struct Searcher<'a, B: AlgebraLike + ?Sized, F: FnMut(&[usize]) -> bool> {
    a: &'a FiniteAlgebra,
    b: &'a B,
    filter: HomFilter,
    /// Extra per-element image constraint (source element, candidate image);
    /// used e.g. to search sections of a fixed surjection.
    allowed: Option<&'a dyn Fn(usize, usize) -> bool>,
    nodes: u64,
    cap: u64,
    visit: F,
}

enum Step {
    /// Search space exhausted (or the visitor stopped it).
    Done(bool),
}

impl<'a, B: AlgebraLike + ?Sized, F: FnMut(&[usize]) -> bool> Searcher<'a, B, F> {
    /// Propagate forced images through the tables; Err(()) on conflict.
    fn closure(&self, map: &mut [Option<usize>]) -> Result<(), ()> {
        loop {
            let mut changed = false;
            for (op, sym) in self.a.sig.ops.iter().enumerate() {
                let k = sym.arity;
                let mut args = vec![0usize; k];
                loop {
                    if let Some(imgs) = args
                        .iter()
                        .map(|&x| map[x])
                        .collect::<Option<Vec<usize>>>()
                    {
                        let tgt = self.a.apply(op, &args);
                        let forced = self.b.op_value(op, &imgs);
                        if let Some(ok) = self.allowed {
                            if !ok(tgt, forced) {
                                return Err(());
                            }
                        }
                        match map[tgt] {
                            Some(v) if v != forced => return Err(()),
                            Some(_) => {}
                            None => {
                                map[tgt] = Some(forced);
                                changed = true;
                            }
                        }
                    }
                    if !advance(&mut args, self.a.size) {
                        break;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn prune(&self, map: &[Option<usize>]) -> bool {
        match self.filter {
            HomFilter::Injective => {
                let mut seen = std::collections::HashSet::new();
                map.iter().flatten().all(|&y| seen.insert(y))
            }
            HomFilter::Surjective => {
                let defined: std::collections::HashSet<usize> =
                    map.iter().flatten().copied().collect();
                let undefined = map.iter().filter(|m| m.is_none()).count();
                defined.len() + undefined >= self.b.carrier_size()
            }
            HomFilter::Separating(x, y) => match (map[x], map[y]) {
                (Some(u), Some(v)) => u != v,
                _ => true,
            },
            HomFilter::All => true,
        }
    }

    fn accepts(&self, map: &[usize]) -> bool {
        match self.filter {
            HomFilter::All => true,
            HomFilter::Injective => {
                let mut seen = std::collections::HashSet::new();
                map.iter().all(|&y| seen.insert(y))
            }
            HomFilter::Surjective => {
                let mut hit = vec![false; self.b.carrier_size()];
                for &y in map {
                    hit[y] = true;
                }
                hit.iter().all(|&h| h)
            }
            HomFilter::Separating(x, y) => map[x] != map[y],
        }
    }

    fn run(&mut self, map: Vec<Option<usize>>) -> Result<Step, Error> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::Budget(format!("hom_nodes: cap {}", self.cap)));
        }
        let mut map = map;
        if self.closure(&mut map).is_err() || !self.prune(&map) {
            return Ok(Step::Done(true));
        }
        match map.iter().position(|m| m.is_none()) {
            None => {
                let full: Vec<usize> = map.iter().map(|m| m.unwrap()).collect();
                debug_assert!(is_homomorphism(self.a, self.b, &full));
                if self.accepts(&full) && !(self.visit)(&full) {
                    return Ok(Step::Done(false));
                }
                Ok(Step::Done(true))
            }
            Some(i) => {
                for y in 0..self.b.carrier_size() {
                    if let Some(ok) = self.allowed {
                        if !ok(i, y) {
                            continue;
                        }
                    }
                    let mut next = map.clone();
                    next[i] = Some(y);
                    match self.run(next)? {
                        Step::Done(true) => {}
                        stop => return Ok(stop),
                    }
                }
                Ok(Step::Done(true))
            }
        }
    }
}

/// Enumerate homomorphisms src -> dst in deterministic order, calling
/// `visit` for each; `visit` returns false to stop early. `init` pins
/// images in advance (used by the retraction search).
pub fn for_each_hom<B: AlgebraLike + ?Sized, F: FnMut(&[usize]) -> bool>(
    src: &FiniteAlgebra,
    dst: &B,
    init: Option<Vec<Option<usize>>>,
    filter: HomFilter,
    budgets: &Budgets,
    visit: F,
) -> Result<(), Error> {
    for_each_hom_where(src, dst, init, filter, None, budgets, visit)
}

/// Like `for_each_hom`, with an extra constraint restricting the candidate
/// image of each source element (used e.g. for section-of-a-surjection
/// searches).
pub fn for_each_hom_where<B: AlgebraLike + ?Sized, F: FnMut(&[usize]) -> bool>(
    src: &FiniteAlgebra,
    dst: &B,
    init: Option<Vec<Option<usize>>>,
    filter: HomFilter,
    allowed: Option<&dyn Fn(usize, usize) -> bool>,
    budgets: &Budgets,
    visit: F,
) -> Result<(), Error> {
    if src.sig != *dst.signature() {
        return Err(Error::Validation(format!(
            "signature mismatch between {} and {}",
            src.name,
            dst.display_name()
        )));
    }
    let start = init.unwrap_or_else(|| vec![None; src.size]);
    if let Some(ok) = allowed {
        for (x, m) in start.iter().enumerate() {
            if let Some(y) = m {
                if !ok(x, *y) {
                    return Ok(());
                }
            }
        }
    }
    let mut s = Searcher {
        a: src,
        b: dst,
        filter,
        allowed,
        nodes: 0,
        cap: budgets.hom_nodes,
        visit,
    };
    s.run(start)?;
    Ok(())
}

/// All homomorphisms src -> dst passing the filter, deterministic order.
pub fn homs<B: AlgebraLike + ?Sized>(
    src: &FiniteAlgebra,
    dst: &B,
    filter: HomFilter,
    budgets: &Budgets,
) -> Result<Vec<Homomorphism>, Error> {
    let mut out = Vec::new();
    for_each_hom(src, dst, None, filter, budgets, |m| {
        out.push(Homomorphism { map: m.to_vec() });
        true
    })?;
    Ok(out)
}

/// First homomorphism in search order, if any.
pub fn find_hom<B: AlgebraLike + ?Sized>(
    src: &FiniteAlgebra,
    dst: &B,
    filter: HomFilter,
    budgets: &Budgets,
) -> Result<Option<Homomorphism>, Error> {
    let mut out = None;
    for_each_hom(src, dst, None, filter, budgets, |m| {
        out = Some(Homomorphism { map: m.to_vec() });
        false
    })?;
    Ok(out)
}

/// Does b embed into a? Witness: the injective homomorphism.
pub fn embeds<A: AlgebraLike + ?Sized>(
    b: &FiniteAlgebra,
    a: &A,
    budgets: &Budgets,
) -> Verdict<Homomorphism> {
    if b.size > a.carrier_size() {
        return Verdict::No(());
    }
    match find_hom(b, a, HomFilter::Injective, budgets) {
        Ok(Some(h)) => Verdict::Yes(h),
        Ok(None) => Verdict::No(()),
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

/// Isomorphism test; witness is a bijective homomorphism a -> b (its
/// inverse is automatically a homomorphism).
pub fn isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra, budgets: &Budgets) -> Verdict<Homomorphism> {
    if a.size != b.size {
        return Verdict::No(());
    }
    // cheap invariant: per-op multiset of table entries must match
    for op in 0..a.sig.ops.len() {
        let mut ta: Vec<usize> = a.tables[op].iter().map(|&e| count_occurrences(&a.tables[op], e)).collect();
        let mut tb: Vec<usize> = b.tables[op].iter().map(|&e| count_occurrences(&b.tables[op], e)).collect();
        ta.sort_unstable();
        tb.sort_unstable();
        if ta != tb {
            return Verdict::No(());
        }
    }
    match find_hom(a, b, HomFilter::Injective, budgets) {
        Ok(Some(h)) => Verdict::Yes(h),
        Ok(None) => Verdict::No(()),
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

fn count_occurrences(table: &[usize], e: usize) -> usize {
    table.iter().filter(|&&x| x == e).count()
}

/// Is b a retract of a? Witness: (g: a ->> b, h: b -> a) with g . h = id.
pub fn retracts(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    budgets: &Budgets,
) -> Verdict<(Homomorphism, Homomorphism)> {
    let mut sections = Vec::new();
    let r = for_each_hom(b, a, None, HomFilter::Injective, budgets, |h| {
        sections.push(h.to_vec());
        true
    });
    if let Err(e) = r {
        return Verdict::Unknown(e.to_string());
    }
    for h in sections {
        // pin g on the image of h so g . h = id, then extend
        let mut init = vec![None; a.size];
        for (x, &hx) in h.iter().enumerate() {
            init[hx] = Some(x);
        }
        let mut found = None;
        let r = for_each_hom(a, b, Some(init), HomFilter::All, budgets, |g| {
            found = Some(g.to_vec());
            false
        });
        if let Err(e) = r {
            return Verdict::Unknown(e.to_string());
        }
        if let Some(g) = found {
            return Verdict::Yes((Homomorphism { map: g }, Homomorphism { map: h }));
        }
    }
    Verdict::No(())
}

/// Subuniverse generated by the seeds (plus all constants), as a sorted
/// element list. Empty only when seeds are empty and there are no
/// constants.
pub fn generated_subalgebra(a: &FiniteAlgebra, seeds: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; a.size];
    for &s in seeds {
        inside[s] = true;
    }
    loop {
        let mut changed = false;
        for (op, sym) in a.sig.ops.iter().enumerate() {
            let k = sym.arity;
            let members: Vec<usize> = (0..a.size).filter(|&x| inside[x]).collect();
            if k > 0 && members.is_empty() {
                continue;
            }
            let mut idxs = vec![0usize; k];
            loop {
                let args: Vec<usize> = idxs.iter().map(|&i| members[i]).collect();
                let v = a.apply(op, &args);
                if !inside[v] {
                    inside[v] = true;
                    changed = true;
                }
                if k == 0 || !advance(&mut idxs, members.len()) {
                    break;
                }
            }
        }
        if !changed {
            return (0..a.size).filter(|&x| inside[x]).collect();
        }
    }
}

/// All subuniverses (nonempty, op-closed subsets) as sorted element lists,
/// in increasing (size, lexicographic) order.
pub fn subuniverses(a: &FiniteAlgebra, budgets: &Budgets) -> Result<Vec<Vec<usize>>, Error> {
    if a.size > budgets.sub_limit {
        return Err(Error::Budget(format!(
            "sub_limit: |{}| = {} exceeds {}",
            a.name, a.size, budgets.sub_limit
        )));
    }
    let mut found: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    let mut work: Vec<Vec<usize>> = Vec::new();
    let base = generated_subalgebra(a, &[]);
    if !base.is_empty() {
        work.push(base);
    }
    for x in 0..a.size {
        work.push(generated_subalgebra(a, &[x]));
    }
    while let Some(u) = work.pop() {
        if !found.insert(u.clone()) {
            continue;
        }
        for x in 0..a.size {
            if !u.contains(&x) {
                let mut seeds = u.clone();
                seeds.push(x);
                work.push(generated_subalgebra(a, &seeds));
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by_key(|u| (u.len(), u.clone()));
    Ok(out)
}

/// The subalgebra on a closed subset, with elements renumbered in subset
/// order and labels inherited from the parent.
pub fn restrict(a: &FiniteAlgebra, subset: &[usize]) -> FiniteAlgebra {
    let pos: std::collections::HashMap<usize, usize> =
        subset.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let m = subset.len();
    let tables: Vec<Vec<usize>> = a
        .sig
        .ops
        .iter()
        .enumerate()
        .map(|(op, sym)| {
            let k = sym.arity;
            let mut table = Vec::with_capacity(m.pow(k as u32));
            let mut idxs = vec![0usize; k];
            loop {
                let args: Vec<usize> = idxs.iter().map(|&i| subset[i]).collect();
                let v = a.apply(op, &args);
                table.push(*pos.get(&v).expect("subset must be closed"));
                if k == 0 || !advance(&mut idxs, m) {
                    break;
                }
            }
            table
        })
        .collect();
    let labels = subset.iter().map(|&x| a.labels[x].clone()).collect();
    FiniteAlgebra::new(
        &format!("{}_sub", a.name),
        a.sig.clone(),
        labels,
        tables,
    )
    .expect("restriction of a valid algebra is valid")
}

/// One representative per isomorphism class of subalgebras, each paired
/// with the (lexicographically least) carrier subset realizing it.
pub fn subalgebras_upto_iso(
    a: &FiniteAlgebra,
    budgets: &Budgets,
) -> Result<Vec<(Vec<usize>, FiniteAlgebra)>, Error> {
    let subs = subuniverses(a, budgets)?;
    let mut reps: Vec<(Vec<usize>, FiniteAlgebra)> = Vec::new();
    for u in subs {
        let alg = restrict(a, &u);
        let mut fresh = true;
        for (_, r) in &reps {
            if r.size == alg.size {
                match isomorphic(&alg, r, budgets) {
                    Verdict::Yes(_) => {
                        fresh = false;
                        break;
                    }
                    Verdict::No(_) => {}
                    Verdict::Unknown(e) => return Err(Error::Budget(e)),
                }
            }
        }
        if fresh {
            reps.push((u, alg));
        }
    }
    Ok(reps)
}

/// Direct product with componentwise tables. Element i encodes the tuple
/// of factor elements in mixed radix, first factor most significant.
pub fn product(factors: &[&FiniteAlgebra], budgets: &Budgets) -> Result<FiniteAlgebra, Error> {
    let sig = factors
        .first()
        .ok_or_else(|| Error::Validation("product of zero factors".into()))?
        .sig
        .clone();
    for f in factors {
        if f.sig != sig {
            return Err(Error::Validation("signature mismatch in product".into()));
        }
    }
    let mut size = 1usize;
    for f in factors {
        size = size
            .checked_mul(f.size)
            .filter(|&s| s <= budgets.product_size)
            .ok_or_else(|| Error::Budget(format!("product_size: cap {}", budgets.product_size)))?;
    }
    let decode = |mut e: usize| -> Vec<usize> {
        let mut t = vec![0usize; factors.len()];
        for (i, f) in factors.iter().enumerate().rev() {
            t[i] = e % f.size;
            e /= f.size;
        }
        t
    };
    let labels: Vec<String> = (0..size)
        .map(|e| {
            decode(e)
                .iter()
                .zip(factors)
                .map(|(&x, f)| f.labels[x].clone())
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    let tables: Vec<Vec<usize>> = sig
        .ops
        .iter()
        .enumerate()
        .map(|(op, sym)| {
            let k = sym.arity;
            let mut table = Vec::with_capacity(size.pow(k as u32));
            let mut args = vec![0usize; k];
            loop {
                let tuples: Vec<Vec<usize>> = args.iter().map(|&e| decode(e)).collect();
                let mut enc = 0usize;
                for (i, f) in factors.iter().enumerate() {
                    let fargs: Vec<usize> = tuples.iter().map(|t| t[i]).collect();
                    enc = enc * f.size + f.apply(op, &fargs);
                }
                table.push(enc);
                if k == 0 || !advance(&mut args, size) {
                    break;
                }
            }
            table
        })
        .collect();
    let name = factors
        .iter()
        .map(|f| f.name.as_str())
        .collect::<Vec<_>>()
        .join("x");
    FiniteAlgebra::new(&name, sig, labels, tables)
}

/// Decode a product element into its factor coordinates.
pub fn product_coords(e: usize, sizes: &[usize]) -> Vec<usize> {
    let mut t = vec![0usize; sizes.len()];
    let mut e = e;
    for i in (0..sizes.len()).rev() {
        t[i] = e % sizes[i];
        e /= sizes[i];
    }
    t
}

/// Quotient by a compatible partition; blocks are indexed by least member
/// in increasing order. Returns the algebra and the canonical surjection.
pub fn quotient(a: &FiniteAlgebra, c: &Congruence) -> (FiniteAlgebra, Homomorphism) {
    let mut block_ids: Vec<usize> = c.blocks.clone();
    block_ids.sort_unstable();
    block_ids.dedup();
    let m = block_ids.len();
    let to_new: std::collections::HashMap<usize, usize> =
        block_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let map: Vec<usize> = (0..a.size).map(|x| to_new[&c.blocks[x]]).collect();
    let tables: Vec<Vec<usize>> = a
        .sig
        .ops
        .iter()
        .enumerate()
        .map(|(op, sym)| {
            let k = sym.arity;
            let mut table = Vec::with_capacity(m.pow(k as u32));
            let mut idxs = vec![0usize; k];
            loop {
                let args: Vec<usize> = idxs.iter().map(|&i| block_ids[i]).collect();
                table.push(map[a.apply(op, &args)]);
                if k == 0 || !advance(&mut idxs, m) {
                    break;
                }
            }
            table
        })
        .collect();
    let labels = block_ids.iter().map(|&b| a.labels[b].clone()).collect();
    let q = FiniteAlgebra::new(&format!("{}_q", a.name), a.sig.clone(), labels, tables)
        .expect("quotient by a compatible partition is valid");
    (q, Homomorphism { map })
}
