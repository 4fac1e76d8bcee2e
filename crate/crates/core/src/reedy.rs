//! The Reedy poset of flagged cell chains.
//!
//! An object is a chain `((u0,e1,u1),(u1,e2,u2),...,(u_{n-1},e_n,u_n))` of
//! cells over a finite state set, where a raised flag `e_i = 1` is only
//! allowed on a `(u, v)` cell. Arrows are generated by two kinds of maps:
//!
//! * `Compose` at position `i` merges the flag-0 cells `i` and `i + 1`,
//!   lowering the degree by one;
//! * `Include` at position `i` raises the flag of a `(u, 0, v)` cell,
//!   raising the degree by one.
//!
//! Every arrow factors as a run of compositions followed by a run of
//! inclusions. Order decisions go through that factorization: `m <= n` holds
//! iff some object reachable from `m` by compositions has the state sequence
//! of `n` and pointwise smaller flags.
//!
//! Compositions at the first and last position are allowed (the flanking
//! chains may be empty).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// The ambient data of a poset: the state labels and the distinguished pair
/// `(u, v)` on which flags may be raised. `u == v` is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetContext {
    states: Vec<String>,
    index: HashMap<String, usize>,
    u: usize,
    v: usize,
}

/// One cell `(src, flag, tgt)` of a chain, with states as indices into the
/// context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub src: usize,
    pub flag: bool,
    pub tgt: usize,
}

/// An object of the poset, stored as its state sequence `u0..un` and its flag
/// sequence `e1..en`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleObject {
    states: Vec<usize>,
    flags: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorKind {
    Compose,
    Include,
}

/// A generating arrow, indexed by the 1-based position of the first cell it
/// touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GeneratorArrow {
    pub kind: GeneratorKind,
    pub position: usize,
}

/// The canonical factorization `m -> middle -> n` of an arrow.
///
/// `minus_word` is written in composite notation with strictly increasing
/// positions: the *last* generator acts first. `plus_word` lists the raised
/// positions of `middle` in increasing order; inclusions commute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowFactorization {
    pub minus_word: Vec<GeneratorArrow>,
    pub middle: TupleObject,
    pub plus_word: Vec<GeneratorArrow>,
}

/// A finite set of objects together with every single-generator arrow
/// between two of its members.
#[derive(Debug, Clone, Default)]
pub struct ObjectPoset {
    pub objects: Vec<TupleObject>,
    pub index: HashMap<TupleObject, usize>,
    /// `(source, target, generator)`; two generators may join the same pair
    /// when states repeat.
    pub arrows: Vec<(usize, usize, GeneratorArrow)>,
}

impl GeneratorArrow {
    pub fn compose(position: usize) -> Self {
        GeneratorArrow { kind: GeneratorKind::Compose, position }
    }

    pub fn include(position: usize) -> Self {
        GeneratorArrow { kind: GeneratorKind::Include, position }
    }
}

impl fmt::Display for GeneratorArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Compose => write!(f, "c{}", self.position),
            GeneratorKind::Include => write!(f, "I{}", self.position),
        }
    }
}

impl TupleObject {
    /// Builds an object from its state and flag sequences. Context membership
    /// (labels in range, raised flags on `(u, v)` cells) is checked by
    /// [`PosetContext::check`].
    pub fn from_parts(states: Vec<usize>, flags: Vec<bool>) -> Result<Self> {
        if flags.is_empty() || states.len() != flags.len() + 1 {
            return Err(Error::Parse(format!(
                "a chain of {} cells needs {} states, got {}",
                flags.len(),
                flags.len() + 1,
                states.len()
            )));
        }
        Ok(TupleObject { states, flags })
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn height(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn degree(&self) -> usize {
        self.len() + self.height()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.states[0], self.states[self.states.len() - 1])
    }

    pub fn cell(&self, position: usize) -> Cell {
        Cell {
            src: self.states[position - 1],
            flag: self.flags[position - 1],
            tgt: self.states[position],
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (1..=self.len()).map(move |i| self.cell(i))
    }

    /// True when some adjacent pair of cells both carry flag 0.
    pub fn is_simplifiable(&self) -> bool {
        self.flags.windows(2).any(|w| !w[0] && !w[1])
    }

    /// Concatenation of chains; `self` must end where `other` starts.
    pub fn concat(&self, other: &TupleObject) -> Option<TupleObject> {
        if self.endpoints().1 != other.endpoints().0 {
            return None;
        }
        let mut states = self.states.clone();
        states.extend_from_slice(&other.states[1..]);
        let mut flags = self.flags.clone();
        flags.extend_from_slice(&other.flags);
        Some(TupleObject { states, flags })
    }
}

impl PosetContext {
    pub fn new<I, S>(states: I, u: &str, v: &str) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(Error::InvalidContext("the state set is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
                return Err(Error::InvalidContext(format!("bad state label {s:?}")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidContext(format!("duplicate state {s:?}")));
            }
        }
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::InvalidContext(format!("{l:?} is not a state")))
        };
        let (u, v) = (lookup(u)?, lookup(v)?);
        Ok(PosetContext { states, index, u, v })
    }

    /// A context over `count` states labelled by their indices.
    pub fn with_indices(count: usize, u: usize, v: usize) -> Result<Self> {
        let labels: Vec<String> = (0..count).map(|i| i.to_string()).collect();
        if u >= count || v >= count {
            return Err(Error::InvalidContext(format!("({u},{v}) outside 0..{count}")));
        }
        let (u, v) = (labels[u].clone(), labels[v].clone());
        PosetContext::new(labels, &u, &v)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn label(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn labels(&self) -> &[String] {
        &self.states
    }

    pub fn state(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Builds an object from `(src, flag, tgt)` label triples.
    pub fn object(&self, cells: &[(&str, u8, &str)]) -> Result<TupleObject> {
        let text: String = cells
            .iter()
            .map(|(a, e, b)| format!("({a} {e} {b})"))
            .collect();
        self.parse_object(&text)
    }

    /// Parses the text form `(a 0 b)(b 1 c)`.
    pub fn parse_object(&self, text: &str) -> Result<TupleObject> {
        let mut rest = text.trim();
        let mut states = Vec::new();
        let mut flags = Vec::new();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cell in {text:?}")))?;
            let parts: Vec<&str> = body[..close].split_whitespace().collect();
            let [src, flag, tgt] = parts[..] else {
                return Err(Error::Parse(format!("cell {:?} needs three fields", &body[..close])));
            };
            let lookup = |l: &str| {
                self.state(l)
                    .ok_or_else(|| Error::ObjectOutsideContext(format!("unknown state {l:?}")))
            };
            let (src, tgt) = (lookup(src)?, lookup(tgt)?);
            let flag = match flag {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("flag must be 0 or 1, got {other:?}"))),
            };
            match states.last() {
                None => states.push(src),
                Some(&prev) if prev != src => {
                    return Err(Error::Parse(format!(
                        "cells do not chain: {} then {}",
                        self.label(prev),
                        self.label(src)
                    )))
                }
                Some(_) => {}
            }
            states.push(tgt);
            flags.push(flag);
            rest = body[close + 1..].trim_start();
        }
        let obj = TupleObject::from_parts(states, flags)?;
        self.check(&obj)?;
        Ok(obj)
    }

    pub fn display(&self, obj: &TupleObject) -> String {
        obj.cells()
            .map(|c| {
                format!(
                    "({} {} {})",
                    self.label(c.src),
                    u8::from(c.flag),
                    self.label(c.tgt)
                )
            })
            .collect()
    }

    pub fn contains(&self, obj: &TupleObject) -> bool {
        obj.states.iter().all(|&s| s < self.states.len())
            && obj.cells().all(|c| !c.flag || (c.src, c.tgt) == (self.u, self.v))
    }

    pub fn check(&self, obj: &TupleObject) -> Result<()> {
        if self.contains(obj) {
            Ok(())
        } else {
            Err(Error::ObjectOutsideContext(format!("{obj:?}")))
        }
    }

    fn check_pair(&self, m: &TupleObject, n: &TupleObject) -> Result<()> {
        if self.contains(m) && self.contains(n) {
            Ok(())
        } else {
            Err(Error::MixedContext { left: format!("{m:?}"), right: format!("{n:?}") })
        }
    }

    pub fn is_applicable(&self, obj: &TupleObject, gen: GeneratorArrow) -> bool {
        let i = gen.position;
        match gen.kind {
            GeneratorKind::Compose => {
                i >= 1 && i < obj.len() && !obj.flags[i - 1] && !obj.flags[i]
            }
            GeneratorKind::Include => {
                i >= 1
                    && i <= obj.len()
                    && !obj.flags[i - 1]
                    && (obj.states[i - 1], obj.states[i]) == (self.u, self.v)
            }
        }
    }

    /// Applies one generating arrow.
    pub fn apply(&self, obj: &TupleObject, gen: GeneratorArrow) -> Result<TupleObject> {
        if !self.is_applicable(obj, gen) {
            return Err(Error::NotApplicable {
                generator: gen.to_string(),
                object: self.display_lossy(obj),
            });
        }
        Ok(apply_unchecked(obj, gen))
    }

    /// Applies a word written in composite notation: the last generator acts
    /// first.
    pub fn apply_composite(&self, obj: &TupleObject, word: &[GeneratorArrow]) -> Result<TupleObject> {
        word.iter().rev().try_fold(obj.clone(), |acc, &g| self.apply(&acc, g))
    }

    /// Every generator applicable to `obj`, compositions first.
    pub fn generators(&self, obj: &TupleObject) -> Vec<GeneratorArrow> {
        let n = obj.len();
        (1..n)
            .map(GeneratorArrow::compose)
            .chain((1..=n).map(GeneratorArrow::include))
            .filter(|&g| self.is_applicable(obj, g))
            .collect()
    }

    /// The terminal object of the matching category: every maximal run of
    /// flag-0 cells merged into one cell.
    pub fn simplify(&self, obj: &TupleObject) -> TupleObject {
        let mut states = vec![obj.states[0]];
        let mut flags = Vec::new();
        let mut in_zero_run = false;
        for c in obj.cells() {
            if !c.flag && in_zero_run {
                *states.last_mut().expect("nonempty") = c.tgt;
                continue;
            }
            states.push(c.tgt);
            flags.push(c.flag);
            in_zero_run = !c.flag;
        }
        TupleObject { states, flags }
    }

    /// The initial object of the latching category: every flag lowered.
    pub fn latch_base(&self, obj: &TupleObject) -> TupleObject {
        TupleObject { states: obj.states.clone(), flags: vec![false; obj.len()] }
    }

    /// Decides whether an arrow `m -> n` exists.
    pub fn leq(&self, m: &TupleObject, n: &TupleObject) -> Result<bool> {
        self.check_pair(m, n)?;
        Ok(leq_unchecked(m, n))
    }

    /// The canonical factorization of the arrow `m -> n`.
    ///
    /// When states repeat and `u == v`, several middles can exist; the one
    /// produced by the lexicographically least embedding of the states of `n`
    /// into those of `m` is returned.
    pub fn factorize(&self, m: &TupleObject, n: &TupleObject) -> Result<ArrowFactorization> {
        self.check_pair(m, n)?;
        let Some(embedding) = least_embedding(m, n) else {
            return Err(Error::NoArrow {
                source_obj: self.display_lossy(m),
                target: self.display_lossy(n),
            });
        };
        let middle = middle_for_embedding(m, &embedding);
        let kept: HashSet<usize> = embedding.iter().copied().collect();
        let minus_word = (1..m.len())
            .filter(|i| !kept.contains(i))
            .map(GeneratorArrow::compose)
            .collect();
        let plus_word = (1..=n.len())
            .filter(|&j| n.flags[j - 1] && !middle.flags[j - 1])
            .map(GeneratorArrow::include)
            .collect();
        Ok(ArrowFactorization { minus_word, middle, plus_word })
    }

    /// Every object of degree at most `max_degree`, sorted by degree, with
    /// all single-generator arrows between them.
    pub fn enumerate_up_to(&self, max_degree: usize) -> ObjectPoset {
        let k = self.state_count();
        let mut objects = Vec::new();
        for n in 1..=max_degree {
            let mut seq = vec![0usize; n + 1];
            loop {
                let raisable: Vec<usize> = (0..n)
                    .filter(|&i| (seq[i], seq[i + 1]) == (self.u, self.v))
                    .collect();
                let budget = max_degree - n;
                for mask in 0u64..(1u64 << raisable.len()) {
                    if mask.count_ones() as usize > budget {
                        continue;
                    }
                    let mut flags = vec![false; n];
                    for (b, &i) in raisable.iter().enumerate() {
                        flags[i] = mask & (1 << b) != 0;
                    }
                    objects.push(TupleObject { states: seq.clone(), flags });
                }
                if !next_sequence(&mut seq, k) {
                    break;
                }
            }
        }
        objects.sort_by(|a, b| {
            (a.degree(), a.len(), &a.states, &a.flags).cmp(&(b.degree(), b.len(), &b.states, &b.flags))
        });
        ObjectPoset::from_objects(self, objects)
    }

    /// All `m != n` with the states of `n` and flags pointwise below.
    pub fn latching_category(&self, n: &TupleObject) -> ObjectPoset {
        let raised: Vec<usize> = (0..n.len()).filter(|&i| n.flags[i]).collect();
        let full = (1u64 << raised.len()) - 1;
        let objects = (0..full)
            .map(|keep| {
                let mut flags = vec![false; n.len()];
                for (b, &i) in raised.iter().enumerate() {
                    flags[i] = keep & (1 << b) != 0;
                }
                TupleObject { states: n.states.clone(), flags }
            })
            .collect();
        ObjectPoset::from_objects(self, objects)
    }

    /// All proper targets of composition words out of `n`.
    pub fn matching_category(&self, n: &TupleObject) -> ObjectPoset {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([n.clone()]);
        let mut objects = Vec::new();
        while let Some(x) = queue.pop_front() {
            for i in 1..x.len() {
                let g = GeneratorArrow::compose(i);
                if self.is_applicable(&x, g) {
                    let y = apply_unchecked(&x, g);
                    if seen.insert(y.clone()) {
                        objects.push(y.clone());
                        queue.push_back(y);
                    }
                }
            }
        }
        objects.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| (&a.states, &a.flags).cmp(&(&b.states, &b.flags)))
        });
        ObjectPoset::from_objects(self, objects)
    }

    fn display_lossy(&self, obj: &TupleObject) -> String {
        if obj.states.iter().all(|&s| s < self.states.len()) {
            self.display(obj)
        } else {
            format!("{obj:?}")
        }
    }
}

impl ObjectPoset {
    pub fn from_objects(ctx: &PosetContext, objects: Vec<TupleObject>) -> Self {
        let index: HashMap<TupleObject, usize> =
            objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let mut arrows = Vec::new();
        for (i, obj) in objects.iter().enumerate() {
            for g in ctx.generators(obj) {
                if let Some(&j) = index.get(&apply_unchecked(obj, g)) {
                    arrows.push((i, j, g));
                }
            }
        }
        ObjectPoset { objects, index, arrows }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Distinct `(source, target)` pairs joined by a generator.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self.arrows.iter().map(|&(a, b, _)| (a, b)).collect();
        set.into_iter().collect()
    }
}

pub(crate) fn apply_unchecked(obj: &TupleObject, gen: GeneratorArrow) -> TupleObject {
    let i = gen.position;
    let mut out = obj.clone();
    match gen.kind {
        GeneratorKind::Compose => {
            out.states.remove(i);
            out.flags.remove(i);
        }
        GeneratorKind::Include => out.flags[i - 1] = true,
    }
    out
}

/// Odometer step over `S^len`; false once every sequence was visited.
fn next_sequence(seq: &mut [usize], base: usize) -> bool {
    for digit in seq.iter_mut().rev() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Can the block of cells `from+1..=to` of `m` collapse to a single cell
/// whose flag is at most `target_flag`?
fn block_ok(m: &TupleObject, zero_prefix: &[usize], from: usize, to: usize, target_flag: bool) -> bool {
    if to == from + 1 {
        !m.flags[from] || target_flag
    } else {
        zero_prefix[to] - zero_prefix[from] == to - from
    }
}

fn zero_prefix(m: &TupleObject) -> Vec<usize> {
    let mut acc = vec![0];
    for &f in &m.flags {
        acc.push(acc.last().unwrap() + usize::from(!f));
    }
    acc
}

fn leq_unchecked(m: &TupleObject, n: &TupleObject) -> bool {
    let (p, q) = (m.len(), n.len());
    // raised cells can be neither merged nor lowered
    if q > p || m.endpoints() != n.endpoints() || n.height() < m.height() {
        return false;
    }
    if p < 64 {
        leq_bits(m, n)
    } else {
        leq_general(m, n)
    }
}

/// Same recursion as [`leq_general`] with the reachable positions of `m`
/// packed in one word.
fn leq_bits(m: &TupleObject, n: &TupleObject) -> bool {
    let (p, q) = (m.len(), n.len());
    // low[i]: least k such that cells k..i of m are all flag 0
    let mut low = [0usize; 64];
    let mut l = 0;
    for i in 0..=p {
        low[i] = l;
        if i < p && m.flags[i] {
            l = i + 1;
        }
    }
    let mut reach: u64 = 1;
    for j in 1..=q {
        let mut next: u64 = 0;
        for i in j..=p {
            if m.states[i] != n.states[j] {
                continue;
            }
            let mut mask: u64 = 0;
            if i >= 2 {
                let lo = low[i].max(j - 1);
                if lo <= i - 2 {
                    mask |= ((1u64 << (i - 1)) - 1) & !((1u64 << lo) - 1);
                }
            }
            if !m.flags[i - 1] || n.flags[j - 1] {
                mask |= 1 << (i - 1);
            }
            if reach & mask != 0 {
                next |= 1 << i;
            }
        }
        reach = next;
    }
    reach & (1 << p) != 0
}

fn leq_general(m: &TupleObject, n: &TupleObject) -> bool {
    let (p, q) = (m.len(), n.len());
    let zeros = zero_prefix(m);
    // reach[i]: the first j states of n embed with the j-th landing on m's i-th.
    let mut reach = vec![false; p + 1];
    let mut next = vec![false; p + 1];
    reach[0] = true;
    for j in 1..=q {
        next.iter_mut().for_each(|x| *x = false);
        for i in j..=p {
            if m.states[i] != n.states[j] {
                continue;
            }
            next[i] = (j - 1..i).any(|k| reach[k] && block_ok(m, &zeros, k, i, n.flags[j - 1]));
        }
        std::mem::swap(&mut reach, &mut next);
    }
    reach[p]
}

/// Indices `0 = i0 < i1 < ... < iq = p` with `m.states[i_j] == n.states[j]`,
/// every block collapsible below the flag of `n`; lexicographically least.
fn least_embedding(m: &TupleObject, n: &TupleObject) -> Option<Vec<usize>> {
    let (p, q) = (m.len(), n.len());
    if q > p || m.endpoints() != n.endpoints() {
        return None;
    }
    let zeros = zero_prefix(m);
    // feasible[j][i]: n's suffix from state j can embed starting at m's i.
    let mut feasible = vec![vec![false; p + 1]; q + 1];
    feasible[q][p] = true;
    for j in (0..q).rev() {
        for i in 0..p {
            if m.states[i] != n.states[j] {
                continue;
            }
            feasible[j][i] = (i + 1..=p).any(|k| {
                feasible[j + 1][k] && m.states[k] == n.states[j + 1] && block_ok(m, &zeros, i, k, n.flags[j])
            });
        }
    }
    if !feasible[0][0] {
        return None;
    }
    let mut embedding = vec![0];
    let mut at = 0;
    for j in 0..q {
        at = (at + 1..=p)
            .find(|&k| feasible[j + 1][k] && m.states[k] == n.states[j + 1] && block_ok(m, &zeros, at, k, n.flags[j]))
            .expect("feasible prefix extends");
        embedding.push(at);
    }
    Some(embedding)
}

fn middle_for_embedding(m: &TupleObject, embedding: &[usize]) -> TupleObject {
    let states = embedding.iter().map(|&i| m.states[i]).collect();
    let flags = embedding
        .windows(2)
        .map(|w| w[1] == w[0] + 1 && m.flags[w[0]])
        .collect();
    TupleObject { states, flags }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> PosetContext {
        PosetContext::new(["a", "b", "c", "d"], "a", "b").unwrap()
    }

    fn uv() -> PosetContext {
        PosetContext::new(["u", "v"], "u", "v").unwrap()
    }

    #[test]
    fn packed_and_general_order_agree() {
        let ctx = PosetContext::with_indices(2, 0, 1).unwrap();
        let objs = ctx.enumerate_up_to(5).objects;
        for m in &objs {
            for n in &objs {
                if m.endpoints() == n.endpoints() && n.len() <= m.len() {
                    assert_eq!(leq_bits(m, n), leq_general(m, n), "{m:?} {n:?}");
                }
            }
        }
    }

    #[test]
    fn compose_merges_adjacent_zero_cells() {
        let ctx = ab();
        let m = ctx.parse_object("(a 0 b)(b 0 c)").unwrap();
        let out = ctx.apply(&m, GeneratorArrow::compose(1)).unwrap();
        assert_eq!(ctx.display(&out), "(a 0 c)");
        assert_eq!(out.degree() + 1, m.degree());
    }

    #[test]
    fn include_raises_a_flag_once() {
        let ctx = uv();
        let m = ctx.parse_object("(u 0 v)").unwrap();
        let raised = ctx.apply(&m, GeneratorArrow::include(1)).unwrap();
        assert_eq!(ctx.display(&raised), "(u 1 v)");
        assert_eq!(raised.degree(), m.degree() + 1);
        assert!(matches!(
            ctx.apply(&raised, GeneratorArrow::include(1)),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn compose_needs_two_zero_flags() {
        let ctx = PosetContext::new(["u", "v"], "u", "v").unwrap();
        let m = ctx.parse_object("(u 1 v)(v 0 u)").unwrap();
        assert!(ctx.apply(&m, GeneratorArrow::compose(1)).is_err());
        assert!(ctx.apply(&m, GeneratorArrow::compose(2)).is_err());
    }

    #[test]
    fn simplify_examples() {
        let ctx = PosetContext::new(["a", "b", "c", "d", "u", "v"], "u", "v").unwrap();
        let cases = [
            ("(a 0 b)(b 0 c)", "(a 0 c)"),
            ("(u 1 v)(v 0 u)(u 1 v)", "(u 1 v)(v 0 u)(u 1 v)"),
            ("(a 0 b)(b 0 c)(c 0 d)", "(a 0 d)"),
            ("(a 0 u)(u 1 v)(v 0 a)(a 0 u)", "(a 0 u)(u 1 v)(v 0 u)"),
        ];
        for (input, expected) in cases {
            let obj = ctx.parse_object(input).unwrap();
            let s = ctx.simplify(&obj);
            assert_eq!(ctx.display(&s), expected);
            assert_eq!(ctx.simplify(&s), s);
            assert!(!s.is_simplifiable());
        }
    }

    #[test]
    fn latch_base_examples() {
        let ctx = uv();
        let n = ctx.parse_object("(u 1 v)(v 0 u)(u 1 v)").unwrap();
        assert_eq!(ctx.display(&ctx.latch_base(&n)), "(u 0 v)(v 0 u)(u 0 v)");
        let flat = ctx.parse_object("(v 0 u)").unwrap();
        assert_eq!(ctx.latch_base(&flat), flat);
    }

    #[test]
    fn leq_examples() {
        let ctx = PosetContext::new(["a", "b"], "a", "b").unwrap();
        let low = ctx.parse_object("(a 0 b)").unwrap();
        let high = ctx.parse_object("(a 1 b)").unwrap();
        assert!(ctx.leq(&low, &high).unwrap());
        assert!(!ctx.leq(&high, &low).unwrap());
        let long = ctx.parse_object("(a 0 b)(b 0 a)(a 0 b)").unwrap();
        assert!(ctx.leq(&long, &high).unwrap());
        assert!(ctx.leq(&long, &long).unwrap());
    }

    #[test]
    fn leq_rejects_foreign_objects() {
        let ctx = PosetContext::new(["a", "b"], "a", "b").unwrap();
        let inside = ctx.parse_object("(a 0 b)").unwrap();
        let foreign = TupleObject::from_parts(vec![0, 7], vec![false]).unwrap();
        assert!(matches!(ctx.leq(&inside, &foreign), Err(Error::MixedContext { .. })));
    }

    #[test]
    fn factorize_examples() {
        let ctx = PosetContext::new(["a", "b"], "a", "b").unwrap();
        let m = ctx.parse_object("(a 0 b)(b 0 a)(a 0 b)").unwrap();
        let n = ctx.parse_object("(a 1 b)").unwrap();
        let f = ctx.factorize(&m, &n).unwrap();
        assert_eq!(ctx.display(&f.middle), "(a 0 b)");
        assert_eq!(f.minus_word, vec![GeneratorArrow::compose(1), GeneratorArrow::compose(2)]);
        assert_eq!(f.plus_word, vec![GeneratorArrow::include(1)]);
        assert_eq!(ctx.apply_composite(&m, &f.minus_word).unwrap(), f.middle);
        assert_eq!(ctx.apply_composite(&f.middle, &f.plus_word).unwrap(), n);

        let id = ctx.factorize(&m, &m).unwrap();
        assert!(id.minus_word.is_empty() && id.plus_word.is_empty());
        assert_eq!(id.middle, m);

        let low = ctx.parse_object("(a 0 b)").unwrap();
        let f = ctx.factorize(&low, &n).unwrap();
        assert_eq!(f.middle, low);
        assert_eq!(f.plus_word, vec![GeneratorArrow::include(1)]);

        assert!(matches!(ctx.factorize(&n, &low), Err(Error::NoArrow { .. })));
    }

    #[test]
    fn enumerate_examples() {
        let one = PosetContext::new(["a"], "a", "a").unwrap();
        let t = one.enumerate_up_to(2);
        let shown: Vec<String> = t.objects.iter().map(|o| one.display(o)).collect();
        assert_eq!(shown, ["(a 0 a)", "(a 1 a)", "(a 0 a)(a 0 a)"]);
        // (a0a)(a0a) -> (a0a) by c1, (a0a) -> (a1a) by I1
        assert_eq!(t.covers().len(), 2);

        let two = PosetContext::new(["a", "b"], "a", "b").unwrap();
        assert_eq!(two.enumerate_up_to(1).len(), 4);
        let three = PosetContext::new(["x", "y", "z"], "x", "x").unwrap();
        assert_eq!(three.enumerate_up_to(1).len(), 9);
    }

    #[test]
    fn latching_category_examples() {
        let ctx = uv();
        let n = ctx.parse_object("(u 1 v)").unwrap();
        let l = ctx.latching_category(&n);
        assert_eq!(l.objects, vec![ctx.parse_object("(u 0 v)").unwrap()]);

        let flat = ctx.parse_object("(u 0 v)").unwrap();
        assert!(ctx.latching_category(&flat).is_empty());

        let n = ctx.parse_object("(u 1 v)(v 0 u)(u 1 v)").unwrap();
        let l = ctx.latching_category(&n);
        assert_eq!(l.len(), 3);
        assert!(l.objects.iter().all(|m| ctx.leq(m, &n).unwrap() && m != &n));
    }

    #[test]
    fn matching_category_examples() {
        let ctx = ab();
        let n = ctx.parse_object("(a 0 b)(b 0 c)").unwrap();
        let m = ctx.matching_category(&n);
        assert_eq!(m.objects, vec![ctx.parse_object("(a 0 c)").unwrap()]);

        let raised = uv().parse_object("(u 1 v)").unwrap();
        assert!(uv().matching_category(&raised).is_empty());

        let n = ctx.parse_object("(a 0 b)(b 0 c)(c 0 d)").unwrap();
        assert_eq!(ctx.matching_category(&n).len(), 3);
    }

    #[test]
    fn matching_category_has_simplify_as_terminal() {
        let ctx = PosetContext::new(["a", "b"], "a", "b").unwrap();
        for n in ctx.enumerate_up_to(5).objects {
            let m = ctx.matching_category(&n);
            assert_eq!(m.is_empty(), !n.is_simplifiable());
            if !m.is_empty() {
                let s = ctx.simplify(&n);
                assert!(m.index.contains_key(&s));
                assert!(m.objects.iter().all(|k| ctx.leq(k, &s).unwrap()));
            }
        }
    }

    #[test]
    fn parse_rejects_bad_text() {
        let ctx = uv();
        assert!(matches!(ctx.parse_object("(u 0 v)(u 0 v)"), Err(Error::Parse(_))));
        assert!(matches!(ctx.parse_object("(u 2 v)"), Err(Error::Parse(_))));
        assert!(matches!(ctx.parse_object(""), Err(Error::Parse(_))));
        assert!(matches!(ctx.parse_object("(v 1 u)"), Err(Error::ObjectOutsideContext(_))));
        assert!(matches!(ctx.parse_object("(u 0 w)"), Err(Error::ObjectOutsideContext(_))));
        assert!(PosetContext::new(Vec::<String>::new(), "u", "v").is_err());
    }

    #[test]
    fn display_round_trips() {
        let ctx = PosetContext::new(["a", "b", "c"], "b", "c").unwrap();
        for obj in ctx.enumerate_up_to(4).objects {
            assert_eq!(ctx.parse_object(&ctx.display(&obj)).unwrap(), obj);
        }
    }
}
