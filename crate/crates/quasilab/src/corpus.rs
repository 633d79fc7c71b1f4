//! Built-in algebras, embedded as algebra-file text so tests cannot drift.
//! `corpus(name)` parses the table on demand; every entry carries a short
//! provenance note.

use crate::kernel::{parse_algebra, FiniteAlgebra};

pub struct CorpusEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub note: &'static str,
    pub text: &'static str,
}

pub const ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        name: "m2",
        aliases: &["bool2"],
        note: "2-element de Morgan chain 0 < 1 (the 2-element Boolean algebra)",
        text: "algebra m2\nelements 0 1\nop meet/2\n0 0\n0 1\nop join/2\n0 1\n1 1\nop neg/1\n1 0\nop c0/0\n0\nop c1/0\n1\nend\n",
    },
    CorpusEntry {
        name: "m3",
        aliases: &["kleene3"],
        note: "3-element Kleene chain 0 < a < 1 with neg(a) = a",
        text: "algebra m3\nelements 0 a 1\nop meet/2\n0 0 0\n0 a a\n0 a 1\nop join/2\n0 a 1\na a 1\n1 1 1\nop neg/1\n1 a 0\nop c0/0\n0\nop c1/0\n1\nend\n",
    },
    CorpusEntry {
        name: "m4",
        aliases: &[],
        note: "4-element simple de Morgan diamond 0 < a,b < 1 with neg fixing a and b",
        text: "algebra m4\nelements 0 a b 1\nop meet/2\n0 0 0 0\n0 a 0 a\n0 0 b b\n0 a b 1\nop join/2\n0 a b 1\na a 1 1\nb 1 b 1\n1 1 1 1\nop neg/1\n1 a b 0\nop c0/0\n0\nop c1/0\n1\nend\n",
    },
    CorpusEntry {
        name: "lattice2",
        aliases: &[],
        note: "2-element lattice (meet, join only)",
        text: "algebra lattice2\nelements 0 1\nop meet/2\n0 0\n0 1\nop join/2\n0 1\n1 1\nend\n",
    },
    CorpusEntry {
        name: "chain3",
        aliases: &[],
        note: "3-chain lattice 0 < a < 1 (meet, join only)",
        text: "algebra chain3\nelements 0 a 1\nop meet/2\n0 0 0\n0 a a\n0 a 1\nop join/2\n0 a 1\na a 1\n1 1 1\nend\n",
    },
    CorpusEntry {
        name: "z2",
        aliases: &[],
        note: "cyclic group of order 2 (add, neg, zero)",
        text: "algebra z2\nelements 0 1\nop add/2\n0 1\n1 0\nop neg/1\n0 1\nop zero/0\n0\nend\n",
    },
    CorpusEntry {
        name: "z4",
        aliases: &[],
        note: "cyclic group of order 4 (add, neg, zero)",
        text: "algebra z4\nelements 0 1 2 3\nop add/2\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\nop neg/1\n0 3 2 1\nop zero/0\n0\nend\n",
    },
    CorpusEntry {
        name: "impl2",
        aliases: &[],
        note: "2-element implication algebra ({0,1}, ->)",
        text: "algebra impl2\nelements 0 1\nop imp/2\n1 1\n0 1\nend\n",
    },
    CorpusEntry {
        name: "heyting3",
        aliases: &[],
        note: "3-chain Heyting algebra 0 < a < 1",
        text: "algebra heyting3\nelements 0 a 1\nop meet/2\n0 0 0\n0 a a\n0 a 1\nop join/2\n0 a 1\na a 1\n1 1 1\nop imp/2\n1 1 1\n0 1 1\n0 a 1\nop c0/0\n0\nop c1/0\n1\nend\n",
    },
    CorpusEntry {
        name: "hilbert4",
        aliases: &[],
        note: "4-chain Hilbert algebra 0 < a < b < 1 with x -> y = 1 if x <= y else y",
        text: "algebra hilbert4\nelements 0 a b 1\nop imp/2\n1 1 1 1\n0 1 1 1\n0 a 1 1\n0 a b 1\nop c1/0\n1\nend\n",
    },
    CorpusEntry {
        name: "synth3",
        aliases: &[],
        note: "3-element algebra with one ternary op: p(a,b,c) = c for a != b, p(a,a,c) = (0 1)-transposition of a",
        text: "algebra synth3\nelements 0 1 2\nop p/3\n1 1 1\n0 1 2\n0 1 2\n0 1 2\n0 0 0\n0 1 2\n0 1 2\n0 1 2\n2 2 2\nend\n",
    },
    CorpusEntry {
        name: "fano",
        aliases: &[],
        note: "16-element lattice of subspaces of GF(2)^3: bottom o, lines l1..l7, planes p1..p7, top w",
        text: "algebra fano\nelements o l1 l2 l3 l4 l5 l6 l7 p4 p2 p6 p1 p5 p3 p7 w\nop meet/2\no o o o o o o o o o o o o o o o\no l1 o o o o o o l1 l1 l1 o o o o l1\no o l2 o o o o o l2 o o l2 l2 o o l2\no o o l3 o o o o l3 o o o o l3 l3 l3\no o o o l4 o o o o l4 o l4 o l4 o l4\no o o o o l5 o o o l5 o o l5 o l5 l5\no o o o o o l6 o o o l6 l6 o o l6 l6\no o o o o o o l7 o o l7 o l7 l7 o l7\no l1 l2 l3 o o o o p4 l1 l1 l2 l2 l3 l3 p4\no l1 o o l4 l5 o o l1 p2 l1 l4 l5 l4 l5 p2\no l1 o o o o l6 l7 l1 l1 p6 l6 l7 l7 l6 p6\no o l2 o l4 o l6 o l2 l4 l6 p1 l2 l4 l6 p1\no o l2 o o l5 o l7 l2 l5 l7 l2 p5 l7 l5 p5\no o o l3 l4 o o l7 l3 l4 l7 l4 l7 p3 l3 p3\no o o l3 o l5 l6 o l3 l5 l6 l6 l5 l3 p7 p7\no l1 l2 l3 l4 l5 l6 l7 p4 p2 p6 p1 p5 p3 p7 w\nop join/2\no l1 l2 l3 l4 l5 l6 l7 p4 p2 p6 p1 p5 p3 p7 w\nl1 l1 p4 p4 p2 p2 p6 p6 p4 p2 p6 w w w w w\nl2 p4 l2 p4 p1 p5 p1 p5 p4 w w p1 p5 w w w\nl3 p4 p4 l3 p3 p7 p7 p3 p4 w w w w p3 p7 w\nl4 p2 p1 p3 l4 p2 p1 p3 w p2 w p1 w p3 w w\nl5 p2 p5 p7 p2 l5 p7 p5 w p2 w w p5 w p7 w\nl6 p6 p1 p7 p1 p7 l6 p6 w w p6 p1 w w p7 w\nl7 p6 p5 p3 p3 p5 p6 l7 w w p6 w p5 p3 w w\np4 p4 p4 p4 w w w w p4 w w w w w w w\np2 p2 w w p2 p2 w w w p2 w w w w w w\np6 p6 w w w w p6 p6 w w p6 w w w w w\np1 w p1 w p1 w p1 w w w w p1 w w w w\np5 w p5 w w p5 w p5 w w w w p5 w w w\np3 w w p3 p3 w w p3 w w w w w p3 w w\np7 w w p7 w p7 p7 w w w w w w w p7 w\nw w w w w w w w w w w w w w w w\nend\n",
    },
];

/// Look up a built-in algebra by name or alias.
pub fn corpus(name: &str) -> Option<FiniteAlgebra> {
    let key = name.strip_prefix("corpus:").unwrap_or(name);
    ENTRIES
        .iter()
        .find(|e| e.name == key || e.aliases.contains(&key))
        .map(|e| {
            let mut a = parse_algebra(e.text).expect("corpus entry must parse");
            if e.name != key {
                a.name = key.to_string();
            }
            a
        })
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}
