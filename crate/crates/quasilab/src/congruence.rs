//! Absolute and relative congruence lattices, principal congruences,
//! Q-irreducibility, monoliths, pseudocomplements, filtrality, and
//! 3-permutability.
//!
//! Relative congruences are computed from homomorphism kernels (the hom
//! count is the small side), never by testing arbitrary partitions.

use crate::kernel::{Budgets, Error, FiniteAlgebra};
use crate::morphisms::{advance, for_each_hom, HomFilter};
use crate::report::Verdict;

/// A compatible partition of an algebra's carrier, stored as a block-id
/// array where the id of a block is its least member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    pub blocks: Vec<usize>,
}

impl Congruence {
    pub fn delta(n: usize) -> Congruence {
        Congruence {
            blocks: (0..n).collect(),
        }
    }

    pub fn nabla(n: usize) -> Congruence {
        Congruence {
            blocks: vec![0; n],
        }
    }

    pub fn is_delta(&self) -> bool {
        self.blocks.iter().enumerate().all(|(i, &b)| b == i)
    }

    pub fn is_nabla(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.blocks[x] == self.blocks[y]
    }

    /// Blocks as sorted element lists, in increasing block-id order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut ids: Vec<usize> = self.blocks.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.iter()
            .map(|&id| {
                (0..self.blocks.len())
                    .filter(|&x| self.blocks[x] == id)
                    .collect()
            })
            .collect()
    }

    pub fn block_count(&self) -> usize {
        let mut ids = self.blocks.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Kernel of a map out of the carrier.
    pub fn from_kernel(map: &[usize]) -> Congruence {
        let n = map.len();
        let mut least: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for x in 0..n {
            least.entry(map[x]).or_insert(x);
        }
        Congruence {
            blocks: (0..n).map(|x| least[&map[x]]).collect(),
        }
    }

    /// Refinement order: self <= other iff every self-block lies inside an
    /// other-block.
    pub fn leq(&self, other: &Congruence) -> bool {
        let n = self.blocks.len();
        (0..n).all(|x| other.blocks[x] == other.blocks[self.blocks[x]])
    }

    /// Block intersection (meet in every congruence lattice).
    pub fn meet(&self, other: &Congruence) -> Congruence {
        let n = self.blocks.len();
        let mut least: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        for x in 0..n {
            least.entry((self.blocks[x], other.blocks[x])).or_insert(x);
        }
        Congruence {
            blocks: (0..n)
                .map(|x| least[&(self.blocks[x], other.blocks[x])])
                .collect(),
        }
    }

    /// Transitive closure of the union (join in the absolute lattice; in a
    /// relative lattice the join may be strictly larger).
    pub fn join_partition(&self, other: &Congruence) -> Congruence {
        let n = self.blocks.len();
        let mut uf = UnionFind::new(n);
        for x in 0..n {
            uf.union(x, self.blocks[x]);
            uf.union(x, other.blocks[x]);
        }
        uf.into_congruence()
    }

    /// Relation composition self . other as a boolean matrix:
    /// (x,z) related iff exists y with x self y and y other z.
    pub fn compose_matrix(&self, other: &Congruence) -> Vec<Vec<bool>> {
        let n = self.blocks.len();
        let mut m = vec![vec![false; n]; n];
        for x in 0..n {
            for y in 0..n {
                if self.related(x, y) {
                    for z in 0..n {
                        if other.related(y, z) {
                            m[x][z] = true;
                        }
                    }
                }
            }
        }
        m
    }

    /// Exhaustive compatibility check against the operation tables.
    pub fn is_compatible(&self, a: &FiniteAlgebra) -> bool {
        for (op, sym) in a.sig.ops.iter().enumerate() {
            let k = sym.arity;
            let mut args = vec![0usize; k];
            loop {
                // replace one coordinate by a related element; images stay related
                for pos in 0..k {
                    for y in 0..a.size {
                        if self.related(args[pos], y) {
                            let mut alt = args.clone();
                            alt[pos] = y;
                            if !self.related(a.apply(op, &args), a.apply(op, &alt)) {
                                return false;
                            }
                        }
                    }
                }
                if k == 0 || !advance(&mut args, a.size) {
                    break;
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.root(x), self.root(y));
        if rx == ry {
            return false;
        }
        // keep the smaller index as root so block ids are least members
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }

    fn into_congruence(mut self) -> Congruence {
        let n = self.parent.len();
        Congruence {
            blocks: (0..n).map(|x| self.root(x)).collect(),
        }
    }
}

/// Smallest congruence containing the given pairs: union-find seeded with
/// the pairs, closed by single-coordinate operation translation to a
/// fixpoint.
pub fn cg(a: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Congruence {
    let mut uf = UnionFind::new(a.size);
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    loop {
        let mut changed = false;
        let current = {
            let mut c = UnionFind {
                parent: uf.parent.clone(),
            };
            (0..a.size).map(|x| c.root(x)).collect::<Vec<_>>()
        };
        for (op, sym) in a.sig.ops.iter().enumerate() {
            let k = sym.arity;
            if k == 0 {
                continue;
            }
            let mut args = vec![0usize; k];
            loop {
                let v = a.apply(op, &args);
                for pos in 0..k {
                    for y in 0..a.size {
                        if current[y] == current[args[pos]] && y != args[pos] {
                            let mut alt = args.clone();
                            alt[pos] = y;
                            if uf.union(v, a.apply(op, &alt)) {
                                changed = true;
                            }
                        }
                    }
                }
                if !advance(&mut args, a.size) {
                    break;
                }
            }
        }
        if !changed {
            return uf.into_congruence();
        }
    }
}

/// A finite congruence lattice: either the absolute lattice Con A or the
/// relative lattice Con_Q(A) for Q = Q(K). The member list is sorted by
/// block-id vector, so positions are stable and reports are reproducible.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    pub members: Vec<Congruence>,
    /// True when this is a relative lattice and the identity congruence is
    /// a member (i.e. the algebra itself lies in ISP(K)).
    pub has_delta: bool,
}

impl CongruenceLattice {
    fn from_set(set: std::collections::BTreeSet<Congruence>) -> CongruenceLattice {
        let has_delta = set.iter().any(|c| c.is_delta());
        CongruenceLattice {
            members: set.into_iter().collect(),
            has_delta,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Congruence) -> bool {
        self.members.binary_search(c).is_ok()
    }

    /// Least member above both arguments (the lattice join; for relative
    /// lattices this can be strictly above the partition join).
    pub fn join(&self, x: &Congruence, y: &Congruence) -> Congruence {
        let uppers: Vec<&Congruence> = self
            .members
            .iter()
            .filter(|m| x.leq(m) && y.leq(m))
            .collect();
        let mut best: Option<&Congruence> = None;
        for u in uppers {
            best = Some(match best {
                None => u,
                Some(b) => {
                    if u.leq(b) {
                        u
                    } else {
                        b
                    }
                }
            });
        }
        best.expect("nabla is always a member").clone()
    }

    /// Least member containing all the given pairs (the relative principal
    /// congruence when the lattice is Con_Q).
    pub fn principal(&self, pairs: &[(usize, usize)]) -> Congruence {
        let mut best: Option<Congruence> = None;
        for m in &self.members {
            if pairs.iter().all(|&(x, y)| m.related(x, y)) {
                best = Some(match best {
                    None => m.clone(),
                    Some(b) => {
                        if m.leq(&b) {
                            m.clone()
                        } else {
                            b
                        }
                    }
                });
            }
        }
        best.expect("nabla contains every pair")
    }

    /// Indices of members with exactly one upper cover (in a finite
    /// lattice these are the completely meet-irreducible members).
    pub fn meet_irreducibles(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.upper_covers(i).len() == 1)
            .collect()
    }

    pub fn upper_covers(&self, i: usize) -> Vec<usize> {
        let me = &self.members[i];
        let above: Vec<usize> = (0..self.members.len())
            .filter(|&j| j != i && me.leq(&self.members[j]))
            .collect();
        above
            .iter()
            .copied()
            .filter(|&j| {
                !above
                    .iter()
                    .any(|&k| k != j && self.members[k].leq(&self.members[j]) && k != i)
            })
            .collect()
    }

    /// Atoms: minimal nonzero members (above delta when present; for a
    /// relative lattice without delta, minimal members overall).
    pub fn atoms(&self) -> Vec<usize> {
        let nonzero: Vec<usize> = (0..self.members.len())
            .filter(|&i| !self.members[i].is_delta())
            .collect();
        nonzero
            .iter()
            .copied()
            .filter(|&i| {
                !nonzero
                    .iter()
                    .any(|&j| j != i && self.members[j].leq(&self.members[i]))
            })
            .collect()
    }
}

/// The absolute congruence lattice: join-closure of the principal
/// congruences together with delta.
pub fn con_all(a: &FiniteAlgebra, budgets: &Budgets) -> Result<CongruenceLattice, Error> {
    let mut set: std::collections::BTreeSet<Congruence> = std::collections::BTreeSet::new();
    set.insert(Congruence::delta(a.size));
    for x in 0..a.size {
        for y in (x + 1)..a.size {
            set.insert(cg(a, &[(x, y)]));
        }
    }
    loop {
        let snapshot: Vec<Congruence> = set.iter().cloned().collect();
        let mut grew = false;
        for i in 0..snapshot.len() {
            for j in (i + 1)..snapshot.len() {
                let join = snapshot[i].join_partition(&snapshot[j]);
                if set.insert(join) {
                    grew = true;
                    if set.len() > budgets.lattice_size {
                        return Err(Error::Budget(format!(
                            "lattice_size: cap {}",
                            budgets.lattice_size
                        )));
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(CongruenceLattice::from_set(set))
}

/// The relative congruence lattice Con_Q(A) for Q = Q(K): the meet-closure
/// of the kernels of all homomorphisms into members of K, plus nabla.
/// Delta appears exactly when those homomorphisms separate the points of
/// A, i.e. when A lies in ISP(K).
pub fn con_q(
    a: &FiniteAlgebra,
    k: &[&FiniteAlgebra],
    budgets: &Budgets,
) -> Result<CongruenceLattice, Error> {
    let mut set: std::collections::BTreeSet<Congruence> = std::collections::BTreeSet::new();
    set.insert(Congruence::nabla(a.size));
    for b in k {
        for_each_hom(a, *b, None, HomFilter::All, budgets, |m| {
            set.insert(Congruence::from_kernel(m));
            true
        })?;
    }
    meet_closed_lattice(set, budgets)
}

/// Close a congruence set under binary meets (nabla must already be a
/// member) and package it as a lattice.
pub(crate) fn meet_closed_lattice(
    mut set: std::collections::BTreeSet<Congruence>,
    budgets: &Budgets,
) -> Result<CongruenceLattice, Error> {
    loop {
        let snapshot: Vec<Congruence> = set.iter().cloned().collect();
        let mut grew = false;
        for i in 0..snapshot.len() {
            for j in (i + 1)..snapshot.len() {
                if set.insert(snapshot[i].meet(&snapshot[j])) {
                    grew = true;
                    if set.len() > budgets.lattice_size {
                        return Err(Error::Budget(format!(
                            "lattice_size: cap {}",
                            budgets.lattice_size
                        )));
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(CongruenceLattice::from_set(set))
}

/// Relative principal congruence cg_Q(pairs): least member of Con_Q
/// containing the pairs.
pub fn cg_q(
    a: &FiniteAlgebra,
    k: &[&FiniteAlgebra],
    pairs: &[(usize, usize)],
    budgets: &Budgets,
) -> Result<Congruence, Error> {
    Ok(con_q(a, k, budgets)?.principal(pairs))
}

/// Is A Q-irreducible: does Con_Q(A) have a unique minimal nonzero member
/// (the monolith)? Yes-witness: (monolith, least pair inside it).
pub fn q_irreducible(
    a: &FiniteAlgebra,
    k: &[&FiniteAlgebra],
    budgets: &Budgets,
) -> Result<Verdict<(Congruence, (usize, usize))>, Error> {
    let lat = con_q(a, k, budgets)?;
    if !lat.has_delta {
        return Err(Error::Validation(format!(
            "{} is not a member of the quasivariety (points not separated)",
            a.name
        )));
    }
    if a.size < 2 {
        return Ok(Verdict::No(()));
    }
    let mut monolith: Option<Congruence> = None;
    for m in &lat.members {
        if !m.is_delta() {
            monolith = Some(match monolith {
                None => m.clone(),
                Some(acc) => acc.meet(m),
            });
        }
    }
    let monolith = match monolith {
        Some(m) => m,
        None => return Ok(Verdict::No(())), // lattice is {delta} only
    };
    if monolith.is_delta() {
        return Ok(Verdict::No(()));
    }
    let pair = least_pair(&monolith).expect("nonzero congruence has a pair");
    Ok(Verdict::Yes((monolith, pair)))
}

/// Least related pair (x, y) with x < y, scanning lexicographically.
pub fn least_pair(c: &Congruence) -> Option<(usize, usize)> {
    let n = c.blocks.len();
    for x in 0..n {
        for y in (x + 1)..n {
            if c.related(x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// A maximal relative congruence whose restriction to the subuniverse is
/// trivial; among maximal candidates the lexicographically least partition
/// is returned.
pub fn max_separating_congruence(
    a: &FiniteAlgebra,
    sub: &[usize],
    k: &[&FiniteAlgebra],
    budgets: &Budgets,
) -> Result<Congruence, Error> {
    let lat = con_q(a, k, budgets)?;
    let separates = |c: &Congruence| {
        sub.iter()
            .all(|&x| sub.iter().all(|&y| x == y || !c.related(x, y)))
    };
    let candidates: Vec<&Congruence> = lat.members.iter().filter(|c| separates(c)).collect();
    if candidates.is_empty() {
        return Err(Error::Validation(
            "no separating Q-congruence exists".into(),
        ));
    }
    let mut maximal: Vec<&Congruence> = Vec::new();
    for c in &candidates {
        if !candidates.iter().any(|d| *d != *c && c.leq(d)) {
            maximal.push(c);
        }
    }
    maximal.sort_by_key(|c| c.blocks.clone());
    Ok(maximal[0].clone())
}

/// The pseudocomplement of cg_Q(pair): the meet of all meet-irreducible
/// relative congruences omitting the pair. Errors when the defining
/// pseudocomplement property fails (the lattice is not relatively
/// congruence distributive).
pub fn gamma_pseudocomplement(
    a: &FiniteAlgebra,
    k: &[&FiniteAlgebra],
    pair: (usize, usize),
    budgets: &Budgets,
) -> Result<Congruence, Error> {
    let lat = con_q(a, k, budgets)?;
    let mis = lat.meet_irreducibles();
    let mut gamma = Congruence::nabla(a.size);
    for i in mis {
        let m = &lat.members[i];
        if !m.related(pair.0, pair.1) {
            gamma = gamma.meet(m);
        }
    }
    if !lat.contains(&gamma) {
        return Err(Error::Validation(
            "not relatively congruence distributive: meet of irreducibles left the lattice".into(),
        ));
    }
    let principal = lat.principal(&[pair]);
    // defining property: gamma is the largest member meeting cg_Q(pair) to
    // the lattice's zero
    let zero = lat.members.iter().find(|c| c.is_delta());
    let bottom = match zero {
        Some(z) => z.clone(),
        None => lat
            .members
            .iter()
            .cloned()
            .reduce(|x, y| x.meet(&y))
            .expect("lattice nonempty"),
    };
    if pair.0 != pair.1 {
        let ok = principal.meet(&gamma) == bottom
            && lat
                .members
                .iter()
                .all(|c| !(principal.meet(c) == bottom) || c.leq(&gamma));
        if !ok {
            return Err(Error::Validation(
                "not relatively congruence distributive: pseudocomplement property fails".into(),
            ));
        }
    }
    Ok(gamma)
}

/// A filter on a finite index set is the principal up-set of some subset
/// S (the improper filter is S = {}), so filtrality reduces to scanning
/// the 2^|I| principal filters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterWitness {
    /// Generating subset of the index set: F = { T : T contains S }.
    pub generator: Vec<usize>,
    pub improper: bool,
}

/// Is theta induced by a filter on the index set of the product
/// decomposition? `coords[e]` gives the factor coordinates of element e of
/// the subdirect algebra b.
pub fn is_filtral(
    nfactors: usize,
    b: &FiniteAlgebra,
    coords: &[Vec<usize>],
    theta: &Congruence,
) -> Verdict<FilterWitness> {
    assert_eq!(coords.len(), b.size);
    for s_mask in 0..(1u32 << nfactors) {
        let s: Vec<usize> = (0..nfactors).filter(|&i| s_mask >> i & 1 == 1).collect();
        let mut matches = true;
        'pairs: for x in 0..b.size {
            for y in 0..b.size {
                let agree_on_s = s.iter().all(|&i| coords[x][i] == coords[y][i]);
                if agree_on_s != theta.related(x, y) {
                    matches = false;
                    break 'pairs;
                }
            }
        }
        if matches {
            return Verdict::Yes(FilterWitness {
                improper: s.is_empty(),
                generator: s,
            });
        }
    }
    Verdict::No(())
}

/// Do the (relative, or absolute when k is empty) congruences 3-permute:
/// theta v phi = theta . phi . theta for every pair? No-witness: the two
/// congruence indices and an element pair in the join missed by the
/// composite.
pub fn three_permute(
    a: &FiniteAlgebra,
    k: &[&FiniteAlgebra],
    budgets: &Budgets,
) -> Result<Verdict<(), (usize, usize, (usize, usize))>, Error> {
    let lat = if k.is_empty() {
        con_all(a, budgets)?
    } else {
        con_q(a, k, budgets)?
    };
    for i in 0..lat.members.len() {
        for j in 0..lat.members.len() {
            let th = &lat.members[i];
            let ph = &lat.members[j];
            let join = lat.join(th, ph);
            // theta . phi . theta
            let tp = th.compose_matrix(ph);
            let n = a.size;
            for x in 0..n {
                for z in 0..n {
                    let mut comp = false;
                    for y in 0..n {
                        if tp[x][y] && th.related(y, z) {
                            comp = true;
                            break;
                        }
                    }
                    if join.related(x, z) != comp {
                        if comp {
                            // composite is always inside the join; a pair in
                            // the composite missing from the join cannot occur
                            unreachable!("composite escaped the join");
                        }
                        return Ok(Verdict::No((i, j, (x, z))));
                    }
                }
            }
        }
    }
    Ok(Verdict::Yes(()))
}
