//! Signatures, finite algebras, terms, evaluation, and the text formats
//! everything else consumes.
//!
//! Elements of an algebra are dense indices `0..n`; the labels from the
//! input file are cosmetic. Operation tables are flat arrays in row-major
//! order over lexicographic argument tuples (first argument most
//! significant), so application is a single indexed load.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

/// An operation symbol: name and arity. Arity 0 means a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSym {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with pairwise distinct names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub ops: Vec<OpSym>,
}

impl Signature {
    pub fn new(ops: Vec<(&str, usize)>) -> Self {
        let sig = Signature {
            ops: ops
                .into_iter()
                .map(|(name, arity)| OpSym {
                    name: name.to_string(),
                    arity,
                })
                .collect(),
        };
        debug_assert!(sig.names_distinct());
        sig
    }

    fn names_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.ops.iter().all(|o| seen.insert(&o.name))
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }
}

/// Anything that behaves like a finite algebra: a carrier 0..size with one
/// total operation per signature symbol. Implemented by `FiniteAlgebra`
/// (table lookup) and by free algebras (coordinatewise evaluation), so hom
/// search and validity checks can target either without materializing
/// quadratic tables.
pub trait AlgebraLike {
    fn carrier_size(&self) -> usize;
    fn signature(&self) -> &Rc<Signature>;
    fn op_value(&self, op: usize, args: &[usize]) -> usize;
    fn display_name(&self) -> &str;
}

/// A finite algebra: a signature plus one total operation table per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub sig: Rc<Signature>,
    pub size: usize,
    pub labels: Vec<String>,
    /// tables[op] has length size^arity(op), row-major over argument tuples.
    pub tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(
        name: &str,
        sig: Rc<Signature>,
        labels: Vec<String>,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self, Error> {
        let size = labels.len();
        if size == 0 {
            return Err(Error::Validation("algebra must have at least one element".into()));
        }
        if tables.len() != sig.ops.len() {
            return Err(Error::Validation(format!(
                "expected {} tables, got {}",
                sig.ops.len(),
                tables.len()
            )));
        }
        for (op, table) in sig.ops.iter().zip(&tables) {
            let expect = size.pow(op.arity as u32);
            if table.len() != expect {
                return Err(Error::Validation(format!(
                    "table size mismatch for op {}/{}: expected {}, got {}",
                    op.name,
                    op.arity,
                    expect,
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&e| e >= size) {
                return Err(Error::Validation(format!(
                    "out-of-range entry {} in table of {}",
                    bad, op.name
                )));
            }
        }
        Ok(FiniteAlgebra {
            name: name.to_string(),
            sig,
            size,
            labels,
            tables,
        })
    }

    /// Apply op to an argument tuple.
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.sig.arity(op));
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a;
        }
        self.tables[op][idx]
    }

    /// Render in the algebra file format; `parse_algebra` round-trips it.
    pub fn to_file(&self) -> String {
        let mut out = format!("algebra {}\n", self.name);
        out.push_str("elements");
        for l in &self.labels {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for (i, op) in self.sig.ops.iter().enumerate() {
            out.push_str(&format!("op {}/{}\n", op.name, op.arity));
            let row = self.size.max(1);
            for chunk in self.tables[i].chunks(row) {
                let line: Vec<&str> = chunk.iter().map(|&e| self.labels[e].as_str()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }
}

impl AlgebraLike for FiniteAlgebra {
    fn carrier_size(&self) -> usize {
        self.size
    }

    fn signature(&self) -> &Rc<Signature> {
        &self.sig
    }

    fn op_value(&self, op: usize, args: &[usize]) -> usize {
        self.apply(op, args)
    }

    fn display_name(&self) -> &str {
        &self.name
    }
}

/// Terms form a DAG: `Apply` children are reference-counted, and the
/// builders (`subst`, the discriminator iterates) memoize on node identity
/// so iterated constructions stay polynomial in node count. Equality is
/// syntactic, never modulo theory.
#[derive(Debug, Clone)]
pub struct Term(pub Rc<TermNode>);

#[derive(Debug)]
pub enum TermNode {
    Var(usize),
    Apply(usize, Vec<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Rc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (TermNode::Var(i), TermNode::Var(j)) => i == j,
            (TermNode::Apply(f, xs), TermNode::Apply(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl Term {
    pub fn var(i: usize) -> Term {
        Term(Rc::new(TermNode::Var(i)))
    }

    pub fn apply(op: usize, children: Vec<Term>) -> Term {
        Term(Rc::new(TermNode::Apply(op, children)))
    }

    fn ptr(&self) -> *const TermNode {
        Rc::as_ptr(&self.0)
    }

    /// Number of variables: one past the largest index occurring.
    pub fn nvars(&self) -> usize {
        let mut seen: HashMap<*const TermNode, usize> = HashMap::new();
        fn go(t: &Term, seen: &mut HashMap<*const TermNode, usize>) -> usize {
            if let Some(&v) = seen.get(&t.ptr()) {
                return v;
            }
            let v = match &*t.0 {
                TermNode::Var(i) => i + 1,
                TermNode::Apply(_, cs) => cs.iter().map(|c| go(c, seen)).max().unwrap_or(0),
            };
            seen.insert(t.ptr(), v);
            v
        }
        go(self, &mut seen)
    }

    /// Set of variable indices occurring in the term.
    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        let mut out = std::collections::BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        fn go(
            t: &Term,
            out: &mut std::collections::BTreeSet<usize>,
            seen: &mut std::collections::HashSet<*const TermNode>,
        ) {
            if !seen.insert(t.ptr()) {
                return;
            }
            match &*t.0 {
                TermNode::Var(i) => {
                    out.insert(*i);
                }
                TermNode::Apply(_, cs) => {
                    for c in cs {
                        go(c, out, seen);
                    }
                }
            }
        }
        go(self, &mut out, &mut seen);
        out
    }

    /// Count of distinct DAG nodes.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        fn go(t: &Term, seen: &mut std::collections::HashSet<*const TermNode>) {
            if seen.insert(t.ptr()) {
                if let TermNode::Apply(_, cs) = &*t.0 {
                    for c in cs {
                        go(c, seen);
                    }
                }
            }
        }
        go(self, &mut seen);
        seen.len()
    }

    /// Simultaneous substitution: variable i becomes map[i]. Sharing in the
    /// input DAG is preserved in the output.
    pub fn subst(&self, map: &[Term]) -> Term {
        let mut memo: HashMap<*const TermNode, Term> = HashMap::new();
        fn go(t: &Term, map: &[Term], memo: &mut HashMap<*const TermNode, Term>) -> Term {
            if let Some(r) = memo.get(&t.ptr()) {
                return r.clone();
            }
            let r = match &*t.0 {
                TermNode::Var(i) => map
                    .get(*i)
                    .cloned()
                    .unwrap_or_else(|| panic!("substitution map too short for x{}", i)),
                TermNode::Apply(op, cs) => {
                    Term::apply(*op, cs.iter().map(|c| go(c, map, memo)).collect())
                }
            };
            memo.insert(t.ptr(), r.clone());
            r
        }
        go(self, map, &mut memo)
    }

    /// Evaluate in `a` under `vals` (element index per variable), memoized
    /// over shared subterms.
    pub fn eval<A: AlgebraLike + ?Sized>(&self, a: &A, vals: &[usize]) -> usize {
        let mut memo: HashMap<*const TermNode, usize> = HashMap::new();
        self.eval_memo(a, vals, &mut memo)
    }

    pub fn eval_memo<A: AlgebraLike + ?Sized>(
        &self,
        a: &A,
        vals: &[usize],
        memo: &mut HashMap<*const TermNode, usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&self.ptr()) {
            return v;
        }
        let v = match &*self.0 {
            TermNode::Var(i) => vals[*i],
            TermNode::Apply(op, cs) => {
                let args: Vec<usize> = cs.iter().map(|c| c.eval_memo(a, vals, memo)).collect();
                a.op_value(*op, &args)
            }
        };
        memo.insert(self.ptr(), v);
        v
    }

    pub fn print(&self, sig: &Signature) -> String {
        match &*self.0 {
            TermNode::Var(i) => var_name(*i),
            TermNode::Apply(op, cs) => {
                let name = &sig.ops[*op].name;
                if cs.is_empty() {
                    name.clone()
                } else {
                    let inner: Vec<String> = cs.iter().map(|c| c.print(sig)).collect();
                    format!("{}({})", name, inner.join(","))
                }
            }
        }
    }
}

/// Default variable names: x0, x1, ...
pub fn var_name(i: usize) -> String {
    format!("x{}", i)
}

/// Premises imply conclusion; empty premises make it an equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasiequation {
    pub premises: Vec<(Term, Term)>,
    pub conclusion: (Term, Term),
    pub nvars: usize,
}

impl Quasiequation {
    pub fn new(premises: Vec<(Term, Term)>, conclusion: (Term, Term)) -> Self {
        let nv = premises
            .iter()
            .chain(std::iter::once(&conclusion))
            .map(|(l, r)| l.nvars().max(r.nvars()))
            .max()
            .unwrap_or(0);
        Quasiequation {
            premises,
            conclusion,
            nvars: nv,
        }
    }

    pub fn print(&self, sig: &Signature) -> String {
        let eq = |(l, r): &(Term, Term)| format!("{} = {}", l.print(sig), r.print(sig));
        if self.premises.is_empty() {
            eq(&self.conclusion)
        } else {
            let ps: Vec<String> = self.premises.iter().map(eq).collect();
            format!("{} => {}", ps.join(", "), eq(&self.conclusion))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Syntax error with 1-based line and column.
    Syntax { line: usize, col: usize, msg: String },
    Validation(String),
    /// A configured resource cap tripped; the payload names it.
    Budget(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { line, col, msg } => {
                write!(f, "syntax error at {}:{}: {}", line, col, msg)
            }
            Error::Validation(msg) => write!(f, "invalid input: {}", msg),
            Error::Budget(what) => write!(f, "budget exceeded: {}", what),
        }
    }
}

impl std::error::Error for Error {}

/// Resource caps. Defaults let the whole bundled corpus run; any trip is
/// reported as `Error::Budget`, never as a wrong answer.
#[derive(Debug, Clone)]
pub struct Budgets {
    /// Max assignments scanned by a single `holds` call.
    pub assignments: u64,
    /// Max search nodes in one homomorphism backtracking run.
    pub hom_nodes: u64,
    /// Free algebra element cap.
    pub free_size: usize,
    /// Max tuple applications in one free-algebra closure, so an
    /// infeasible rank fails fast instead of grinding toward the size cap.
    pub free_work: u64,
    /// Term clone closure cap (number of distinct tables).
    pub clone_tables: usize,
    /// Max carrier size for subalgebra enumeration.
    pub sub_limit: usize,
    /// Max size of a constructed product algebra.
    pub product_size: usize,
    /// Max number of congruences materialized in one lattice.
    pub lattice_size: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            assignments: 50_000_000,
            hom_nodes: 5_000_000,
            free_size: 20_000,
            free_work: 5_000_000,
            clone_tables: 100_000,
            sub_limit: 12,
            product_size: 4096,
            lattice_size: 100_000,
        }
    }
}

impl Budgets {
    pub fn set(&mut self, key: &str, value: u64) -> Result<(), Error> {
        match key {
            "assignments" => self.assignments = value,
            "hom_nodes" => self.hom_nodes = value,
            "free_size" => self.free_size = value as usize,
            "free_work" => self.free_work = value,
            "clone_tables" => self.clone_tables = value as usize,
            "sub_limit" => self.sub_limit = value as usize,
            "product_size" => self.product_size = value as usize,
            "lattice_size" => self.lattice_size = value as usize,
            _ => return Err(Error::Validation(format!("unknown budget key: {}", key))),
        }
        Ok(())
    }
}

/// Outcome of checking a quasiequation in one algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoldsOutcome {
    Holds,
    /// The lexicographically least refuting assignment (variable 0 most
    /// significant, element order increasing).
    Fails(Vec<usize>),
}

/// Exhaustive validity check over all size^nvars assignments, in
/// lexicographic order so the reported counterexample is canonical.
pub fn holds<A: AlgebraLike + ?Sized>(
    a: &A,
    q: &Quasiequation,
    budgets: &Budgets,
) -> Result<HoldsOutcome, Error> {
    let nv = q.nvars;
    let size = a.carrier_size();
    let total = (size as u64).checked_pow(nv as u32);
    match total {
        Some(t) if t <= budgets.assignments => {}
        _ => {
            return Err(Error::Budget(format!(
                "assignments: {}^{} exceeds cap {}",
                size, nv, budgets.assignments
            )))
        }
    }
    let mut vals = vec![0usize; nv];
    loop {
        let premises_ok = q
            .premises
            .iter()
            .all(|(l, r)| l.eval(a, &vals) == r.eval(a, &vals));
        if premises_ok {
            let (l, r) = &q.conclusion;
            if l.eval(a, &vals) != r.eval(a, &vals) {
                return Ok(HoldsOutcome::Fails(vals));
            }
        }
        // advance the assignment in lexicographic order
        let mut i = nv;
        loop {
            if i == 0 {
                return Ok(HoldsOutcome::Holds);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < size {
                break;
            }
            vals[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse the line-oriented algebra file format:
/// `algebra <name>` / `elements <tok> ...` / repeated
/// `op <name>/<arity>` followed by exactly n^arity element tokens /
/// `end`. `#` starts a comment.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, Error> {
    // tokens tagged with (line, col), comments stripped
    let mut toks: Vec<(String, usize, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut col = 0;
        for tok in line.split_whitespace() {
            let at = line[col..].find(tok).map(|p| col + p).unwrap_or(col);
            toks.push((tok.to_string(), ln + 1, at + 1));
            col = at + tok.len();
        }
    }
    let mut pos = 0usize;
    let err = |toks: &Vec<(String, usize, usize)>, pos: usize, msg: &str| -> Error {
        let (line, col) = toks
            .get(pos)
            .or_else(|| toks.last())
            .map(|t| (t.1, t.2))
            .unwrap_or((1, 1));
        Error::Syntax {
            line,
            col,
            msg: msg.to_string(),
        }
    };
    let expect = |toks: &Vec<(String, usize, usize)>, pos: &mut usize, kw: &str| -> Result<(), Error> {
        if toks.get(*pos).map(|t| t.0.as_str()) == Some(kw) {
            *pos += 1;
            Ok(())
        } else {
            Err(err(toks, *pos, &format!("expected `{}`", kw)))
        }
    };

    expect(&toks, &mut pos, "algebra")?;
    let name = toks
        .get(pos)
        .ok_or_else(|| err(&toks, pos, "expected algebra name"))?
        .0
        .clone();
    pos += 1;
    expect(&toks, &mut pos, "elements")?;
    let mut labels: Vec<String> = Vec::new();
    while let Some(t) = toks.get(pos) {
        if t.0 == "op" || t.0 == "end" {
            break;
        }
        if labels.contains(&t.0) {
            return Err(err(&toks, pos, &format!("duplicate element token `{}`", t.0)));
        }
        labels.push(t.0.clone());
        pos += 1;
    }
    if labels.is_empty() {
        return Err(err(&toks, pos, "expected at least one element token"));
    }
    let n = labels.len();
    let elem = |tok: &str| labels.iter().position(|l| l == tok);

    let mut ops: Vec<OpSym> = Vec::new();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    loop {
        match toks.get(pos).map(|t| t.0.as_str()) {
            Some("end") => {
                pos += 1;
                break;
            }
            Some("op") => {
                pos += 1;
                let spec = &toks
                    .get(pos)
                    .ok_or_else(|| err(&toks, pos, "expected op name/arity"))?
                    .0
                    .clone();
                let (opname, arity) = match spec.rsplit_once('/') {
                    Some((nm, ar)) => (
                        nm.to_string(),
                        ar.parse::<usize>()
                            .map_err(|_| err(&toks, pos, "bad arity"))?,
                    ),
                    None => return Err(err(&toks, pos, "expected `name/arity`")),
                };
                if ops.iter().any(|o| o.name == opname) {
                    return Err(err(&toks, pos, &format!("duplicate op name `{}`", opname)));
                }
                pos += 1;
                let want = n.pow(arity as u32);
                let mut table = Vec::with_capacity(want);
                for _ in 0..want {
                    let t = toks.get(pos).ok_or_else(|| {
                        err(
                            &toks,
                            pos,
                            &format!("table size mismatch: expected {} entries for {}/{}", want, opname, arity),
                        )
                    })?;
                    if t.0 == "op" || t.0 == "end" {
                        return Err(err(
                            &toks,
                            pos,
                            &format!("table size mismatch: expected {} entries for {}/{}", want, opname, arity),
                        ));
                    }
                    let e = elem(&t.0)
                        .ok_or_else(|| err(&toks, pos, &format!("unknown element `{}`", t.0)))?;
                    table.push(e);
                    pos += 1;
                }
                ops.push(OpSym {
                    name: opname,
                    arity,
                });
                tables.push(table);
            }
            _ => return Err(err(&toks, pos, "expected `op` or `end`")),
        }
    }
    if pos != toks.len() {
        return Err(err(&toks, pos, "trailing input after `end`"));
    }
    FiniteAlgebra::new(&name, Rc::new(Signature { ops }), labels, tables)
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
    vars: Vec<String>,
}

impl<'a> TermParser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            line: 1,
            col: self.pos + 1,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term, Error> {
        let name = self.ident()?;
        // name collisions resolve in favor of ops
        if let Some(op) = self.sig.op_index(&name) {
            let arity = self.sig.arity(op);
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    children.push(self.term()?);
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected `,` or `)`")),
                    }
                }
                if children.len() != arity {
                    return Err(self.err(&format!(
                        "op {} has arity {}, got {} arguments",
                        name,
                        arity,
                        children.len()
                    )));
                }
                Ok(Term::apply(op, children))
            } else if arity == 0 {
                Ok(Term::apply(op, vec![]))
            } else {
                Err(self.err(&format!("op {} has arity {}, needs arguments", name, arity)))
            }
        } else {
            if self.peek() == Some(b'(') {
                return Err(self.err(&format!("unknown op `{}`", name)));
            }
            let idx = match self.vars.iter().position(|v| v == &name) {
                Some(i) => i,
                None => {
                    self.vars.push(name);
                    self.vars.len() - 1
                }
            };
            Ok(Term::var(idx))
        }
    }
}

/// Parse a term; identifiers not in the signature are variables, numbered
/// by first occurrence. Returns the term and the variable names in index
/// order.
pub fn parse_term(text: &str, sig: &Signature) -> Result<(Term, Vec<String>), Error> {
    let mut p = TermParser {
        src: text.as_bytes(),
        pos: 0,
        sig,
        vars: Vec::new(),
    };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok((t, p.vars))
}

/// Parse `[eq (',' eq)*] '=>' eq` with `eq := term '=' term`; a bare
/// equation means empty premises. Variable numbering is shared across the
/// whole quasiequation.
pub fn parse_quasiequation(text: &str, sig: &Signature) -> Result<(Quasiequation, Vec<String>), Error> {
    let mut p = TermParser {
        src: text.as_bytes(),
        pos: 0,
        sig,
        vars: Vec::new(),
    };
    let mut eqs: Vec<(Term, Term)> = Vec::new();
    let mut saw_arrow = false;
    let mut premises: Vec<(Term, Term)> = Vec::new();
    loop {
        let l = p.term()?;
        if p.peek() != Some(b'=') {
            return Err(p.err("expected `=`"));
        }
        p.pos += 1;
        if p.src.get(p.pos) == Some(&b'>') {
            return Err(p.err("expected a term after `=`"));
        }
        let r = p.term()?;
        eqs.push((l, r));
        match p.peek() {
            Some(b',') => {
                p.pos += 1;
            }
            Some(b'=') if p.src.get(p.pos + 1) == Some(&b'>') => {
                if saw_arrow {
                    return Err(p.err("multiple `=>`"));
                }
                saw_arrow = true;
                p.pos += 2;
                premises = std::mem::take(&mut eqs);
            }
            None => break,
            _ => return Err(p.err("expected `,`, `=>`, or end of input")),
        }
    }
    if eqs.len() != 1 {
        return Err(p.err("expected exactly one conclusion equation"));
    }
    let conclusion = eqs.pop().unwrap();
    Ok((Quasiequation::new(premises, conclusion), p.vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;

    #[test]
    fn parse_smallest_lattice() {
        let a = parse_algebra("algebra l2\nelements 0 1\nop meet/2\n0 0 0 1\nop join/2\n0 1 1 1\nend\n").unwrap();
        assert_eq!(a.size, 2);
        assert_eq!(a.sig.ops.len(), 2);
        assert_eq!(a.apply(0, &[1, 0]), 0);
        assert_eq!(a.apply(1, &[1, 0]), 1);
    }

    #[test]
    fn parse_kleene_file() {
        let a = corpus("m3").unwrap();
        assert_eq!(a.size, 3);
        assert_eq!(a.labels, vec!["0", "a", "1"]);
        // neg(a) = a
        let neg = a.sig.op_index("neg").unwrap();
        assert_eq!(a.apply(neg, &[1]), 1);
    }

    #[test]
    fn table_size_mismatch() {
        let e = parse_algebra("algebra bad\nelements 0 1\nop meet/2\n0 0 0\nend\n").unwrap_err();
        match e {
            Error::Syntax { msg, .. } => assert!(msg.contains("table size mismatch"), "{}", msg),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn duplicate_op_rejected() {
        let e = parse_algebra("algebra bad\nelements 0 1\nop f/1\n0 1\nop f/1\n1 0\nend\n").unwrap_err();
        assert!(format!("{}", e).contains("duplicate op"));
    }

    #[test]
    fn comments_and_roundtrip() {
        let a = corpus("m3").unwrap();
        let commented = format!("# a kleene chain\n{}", a.to_file());
        let b = parse_algebra(&commented).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_term_basic() {
        let a = corpus("m3").unwrap();
        let (t, vars) = parse_term("meet(x, neg(x))", &a.sig).unwrap();
        assert_eq!(vars, vec!["x"]);
        assert_eq!(t.nvars(), 1);
        assert_eq!(t.print(&a.sig), "meet(x0,neg(x0))");
    }

    #[test]
    fn parse_term_variables_by_first_occurrence() {
        let a = corpus("impl2").unwrap();
        let (t, vars) = parse_term("imp(imp(x,y), z)", &a.sig).unwrap();
        assert_eq!(vars, vec!["x", "y", "z"]);
        assert_eq!(t.nvars(), 3);
    }

    #[test]
    fn parse_term_arity_error() {
        let a = corpus("m3").unwrap();
        assert!(parse_term("meet(x)", &a.sig).is_err());
    }

    #[test]
    fn nullary_ops_bare() {
        let a = corpus("m3").unwrap();
        let (t, vars) = parse_term("join(c0, c1)", &a.sig).unwrap();
        assert!(vars.is_empty());
        assert_eq!(t.eval(&a, &[]), 2);
    }

    #[test]
    fn eval_projection() {
        let a = corpus("m2").unwrap();
        let t = Term::var(0);
        assert_eq!(t.eval(&a, &[1]), 1);
    }

    #[test]
    fn eval_neg_fixed_point_in_kleene() {
        let a = corpus("m3").unwrap();
        let (t, _) = parse_term("neg(x)", &a.sig).unwrap();
        assert_eq!(t.eval(&a, &[1]), 1); // neg(a) = a
    }

    #[test]
    fn eval_impl_discriminator_term() {
        // exhaustive oracle for p(x,y,z) = [(x->y)->((y->x)->z)]->z on impl2:
        // p(a,b,c) = c whenever a != b
        let a = corpus("impl2").unwrap();
        let (p, _) = parse_term("imp(imp(imp(x,y),imp(imp(y,x),z)),z)", &a.sig).unwrap();
        assert_eq!(p.eval(&a, &[0, 1, 0]), 0);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    if x != y {
                        assert_eq!(p.eval(&a, &[x, y, z]), z);
                    }
                }
            }
        }
    }

    #[test]
    fn holds_commutativity() {
        let a = corpus("lattice2").unwrap();
        let (q, _) = parse_quasiequation("meet(x,y) = meet(y,x)", &a.sig).unwrap();
        assert_eq!(holds(&a, &q, &Budgets::default()).unwrap(), HoldsOutcome::Holds);
    }

    #[test]
    fn holds_z4_two_torsion() {
        let a = corpus("z4").unwrap();
        let (q, _) = parse_quasiequation("add(x,x) = zero => x = zero", &a.sig).unwrap();
        assert_eq!(
            holds(&a, &q, &Budgets::default()).unwrap(),
            HoldsOutcome::Fails(vec![2])
        );
    }

    #[test]
    fn holds_kleene_fixed_point_rule() {
        let a = corpus("m3").unwrap();
        let (q, _) = parse_quasiequation("neg(x) = x => x = y", &a.sig).unwrap();
        assert_eq!(
            holds(&a, &q, &Budgets::default()).unwrap(),
            HoldsOutcome::Fails(vec![1, 0])
        );
    }

    #[test]
    fn holds_trivial_rule() {
        let a = corpus("z4").unwrap();
        let (q, _) = parse_quasiequation("x = y => x = y", &a.sig).unwrap();
        assert_eq!(holds(&a, &q, &Budgets::default()).unwrap(), HoldsOutcome::Holds);
    }

    #[test]
    fn holds_budget_trips() {
        let a = corpus("z4").unwrap();
        let (q, _) = parse_quasiequation("add(x,y) = add(y,x)", &a.sig).unwrap();
        let mut b = Budgets::default();
        b.assignments = 3;
        assert!(matches!(holds(&a, &q, &b), Err(Error::Budget(_))));
    }

    #[test]
    fn quasiequation_print_reparses() {
        let a = corpus("z4").unwrap();
        let (q, _) = parse_quasiequation("add(x,x) = zero => x = zero", &a.sig).unwrap();
        let (q2, _) = parse_quasiequation(&q.print(&a.sig), &a.sig).unwrap();
        assert_eq!(q, q2);
    }

    #[test]
    fn subst_substitution_lemma() {
        // eval(t[x := s], v) = eval(t, v[x -> eval(s, v)])
        let a = corpus("m3").unwrap();
        let (t, _) = parse_term("join(meet(x,y), neg(x))", &a.sig).unwrap();
        let (s, _) = parse_term("neg(join(x,y))", &a.sig).unwrap();
        for v0 in 0..3 {
            for v1 in 0..3 {
                let vals = [v0, v1];
                let sub = t.subst(&[s.clone(), Term::var(1)]);
                let direct = t.eval(&a, &[s.eval(&a, &vals), v1]);
                assert_eq!(sub.eval(&a, &vals), direct);
            }
        }
    }

    #[test]
    fn shared_subterm_growth_is_linear() {
        // iterating t -> p(x, y, t) via shared children keeps the DAG small
        let _a = corpus("synth3").unwrap();
        let (x, y) = (Term::var(0), Term::var(1));
        let mut t = Term::var(2);
        for _ in 0..50 {
            t = Term::apply(0, vec![x.clone(), y.clone(), t]);
        }
        assert!(t.node_count() <= 53);
    }
}
