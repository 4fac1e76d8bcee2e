//! Presentations of flows by letters and relations, evaluated by union-find
//! over an explicit bounded universe of composable words.

use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::flow::{longest_chain, DiscreteFlow, PathInfo};

/// A generator with fixed endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Letter {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// Letters with two kinds of relations: `a·b = c` and `a = b`.
#[derive(Debug, Clone, Default)]
pub struct WordSystem {
    pub states: Vec<String>,
    pub letters: Vec<Letter>,
    pub products: BTreeMap<(usize, usize), usize>,
    pub equations: Vec<(usize, usize)>,
}

/// The quotient of the word universe by the generated congruence.
#[derive(Debug, Clone)]
pub struct WordQuotient {
    /// every composable word of length `1..=bound` over the canonical
    /// letters, ordered by length then lexicographically
    pub words: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// least word of each class; classes are numbered in order of these
    pub representatives: Vec<usize>,
    pub bound: usize,
    /// true when the universe was cut by a cap below the longest chain
    pub truncated: bool,
    lookup: HashMap<Vec<usize>, usize>,
    canonical: Vec<usize>,
}

impl WordSystem {
    pub fn new(states: Vec<String>) -> Self {
        WordSystem { states, ..Default::default() }
    }

    pub fn add_letter(&mut self, name: impl Into<String>, src: usize, tgt: usize) -> usize {
        self.letters.push(Letter { name: name.into(), src, tgt });
        self.letters.len() - 1
    }

    pub fn add_product(&mut self, a: usize, b: usize, c: usize) {
        debug_assert_eq!(self.letters[a].tgt, self.letters[b].src);
        self.products.insert((a, b), c);
    }

    pub fn add_equation(&mut self, a: usize, b: usize) {
        debug_assert_eq!(
            (self.letters[a].src, self.letters[a].tgt),
            (self.letters[b].src, self.letters[b].tgt)
        );
        self.equations.push((a, b));
    }

    /// Longest composable letter sequence, if the letter graph is acyclic.
    pub fn chain_bound(&self) -> Option<usize> {
        let edges: Vec<_> = self.letters.iter().map(|l| (l.src, l.tgt)).collect();
        longest_chain(self.states.len(), &edges)
    }

    pub fn quotient(&self, cap: Option<usize>) -> Result<WordQuotient> {
        let (bound, truncated) = match (self.chain_bound(), cap) {
            (Some(chain), Some(cap)) if cap < chain => (cap, true),
            (Some(chain), _) => (chain, false),
            (None, Some(cap)) => (cap, true),
            (None, None) => return Err(Error::NotLoopFreeAndNoCap),
        };

        // Single-letter equations are applied up front: each letter is
        // replaced by the least letter it is equated with, and words are
        // enumerated over these canonical letters only.
        let mut letter_uf = UnionFind::<usize>::new(self.letters.len());
        for &(a, b) in &self.equations {
            letter_uf.union(a, b);
        }
        let mut canonical = vec![usize::MAX; self.letters.len()];
        let mut least_of_root = HashMap::new();
        for l in 0..self.letters.len() {
            let least = *least_of_root.entry(letter_uf.find(l)).or_insert(l);
            canonical[l] = least;
        }
        let mut products: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (&(a, b), &c) in &self.products {
            let entry = products.entry((canonical[a], canonical[b])).or_default();
            if !entry.contains(&canonical[c]) {
                entry.push(canonical[c]);
            }
        }

        let words = self.enumerate(bound, &canonical);
        let lookup: HashMap<Vec<usize>, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

        if truncated {
            let mut splittable: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for (&(a, b), cs) in &products {
                for &c in cs {
                    splittable.entry(c).or_insert((a, b));
                }
            }
            for w in words.iter().filter(|w| w.len() == bound) {
                if let Some(pos) = w.iter().position(|l| splittable.contains_key(l)) {
                    let (a, b) = splittable[&w[pos]];
                    let mut longer = w[..pos].to_vec();
                    longer.extend([a, b]);
                    longer.extend(&w[pos + 1..]);
                    return Err(Error::CapTooSmallToClose {
                        cap: bound,
                        witness: format!("{} ~ {}", self.render(&longer), self.render(w)),
                    });
                }
            }
        }

        let mut uf = UnionFind::<usize>::new(words.len());
        for (i, w) in words.iter().enumerate() {
            for pos in 0..w.len().saturating_sub(1) {
                for &c in products.get(&(w[pos], w[pos + 1])).into_iter().flatten() {
                    let mut shorter = w[..pos].to_vec();
                    shorter.push(c);
                    shorter.extend(&w[pos + 2..]);
                    uf.union(i, lookup[&shorter]);
                }
            }
        }

        // Words are sorted, so the first word met in each root is its least.
        let mut root_class = HashMap::new();
        let mut representatives = Vec::new();
        let mut class_of = Vec::with_capacity(words.len());
        for i in 0..words.len() {
            let root = uf.find(i);
            let class = *root_class.entry(root).or_insert_with(|| {
                representatives.push(i);
                representatives.len() - 1
            });
            class_of.push(class);
        }
        Ok(WordQuotient { words, class_of, representatives, bound, truncated, lookup, canonical })
    }

    fn enumerate(&self, bound: usize, canonical: &[usize]) -> Vec<Vec<usize>> {
        let alphabet: Vec<usize> = (0..self.letters.len()).filter(|&l| canonical[l] == l).collect();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut layer: Vec<Vec<usize>> = alphabet.iter().map(|&l| vec![l]).collect();
        for _ in 0..bound {
            if layer.is_empty() {
                break;
            }
            let mut next = Vec::new();
            for w in &layer {
                let end = self.letters[*w.last().expect("nonempty")].tgt;
                for &l in &alphabet {
                    if self.letters[l].src == end {
                        let mut longer = w.clone();
                        longer.push(l);
                        next.push(longer);
                    }
                }
            }
            out.append(&mut layer);
            layer = next;
        }
        out
    }

    pub fn render(&self, word: &[usize]) -> String {
        word.iter()
            .map(|&l| self.letters[l].name.as_str())
            .collect::<Vec<_>>()
            .join("·")
    }

    pub fn endpoints(&self, word: &[usize]) -> (usize, usize) {
        (self.letters[word[0]].src, self.letters[*word.last().expect("nonempty")].tgt)
    }
}

impl WordQuotient {
    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    /// Index of the word after canonicalizing its letters.
    pub fn word_index(&self, word: &[usize]) -> Option<usize> {
        let word: Vec<usize> = word.iter().map(|&l| self.canonical[l]).collect();
        self.lookup.get(&word).copied()
    }

    pub fn class_of_word(&self, word: &[usize]) -> Option<usize> {
        self.word_index(word).map(|i| self.class_of[i])
    }

    pub fn representative(&self, class: usize) -> &[usize] {
        &self.words[self.representatives[class]]
    }

    /// Class of the concatenation of two representatives, when that word is
    /// inside the universe.
    pub fn concat(&self, x: usize, y: usize) -> Option<usize> {
        let mut word = self.representative(x).to_vec();
        word.extend_from_slice(self.representative(y));
        self.class_of_word(&word)
    }

    /// Checks that the congruence never relates words with different
    /// endpoints and that concatenation of any members lands in one class.
    pub fn check_congruence(&self, system: &WordSystem) -> Result<()> {
        for (i, w) in self.words.iter().enumerate() {
            let rep = self.representative(self.class_of[i]);
            if system.endpoints(w) != system.endpoints(rep) {
                return Err(Error::InvalidFlow(format!(
                    "{} and {} have different endpoints",
                    system.render(w),
                    system.render(rep)
                )));
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.class_count()];
        for (i, &c) in self.class_of.iter().enumerate() {
            members[c].push(i);
        }
        for x in 0..self.class_count() {
            for y in 0..self.class_count() {
                let Some(expected) = self.concat(x, y) else { continue };
                for &i in &members[x] {
                    for &j in &members[y] {
                        let mut word = self.words[i].clone();
                        word.extend_from_slice(&self.words[j]);
                        if let Some(got) = self.class_of_word(&word) {
                            if got != expected {
                                return Err(Error::InvalidFlow(format!(
                                    "concatenation is not well defined at {}",
                                    system.render(&word)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The flow whose paths are the classes, named by their least word.
    pub fn to_flow(&self, system: &WordSystem) -> Result<DiscreteFlow> {
        let paths = (0..self.class_count())
            .map(|c| {
                let rep = self.representative(c);
                let (src, tgt) = system.endpoints(rep);
                PathInfo { id: system.render(rep), src, tgt }
            })
            .collect();
        let mut compose = Vec::new();
        for x in 0..self.class_count() {
            let (_, mid) = system.endpoints(self.representative(x));
            for y in 0..self.class_count() {
                if system.endpoints(self.representative(y)).0 != mid {
                    continue;
                }
                if let Some(z) = self.concat(x, y) {
                    compose.push((x, y, z));
                }
            }
        }
        if self.truncated {
            DiscreteFlow::new_truncated(system.states.clone(), paths, compose)
        } else {
            DiscreteFlow::new(system.states.clone(), paths, compose)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_loop_under_cap() {
        let mut sys = WordSystem::new(vec!["x".into()]);
        sys.add_letter("c", 0, 0);
        assert_eq!(sys.quotient(None).unwrap_err(), Error::NotLoopFreeAndNoCap);
        let q = sys.quotient(Some(3)).unwrap();
        assert_eq!(q.class_count(), 3);
        let flow = q.to_flow(&sys).unwrap();
        let ids: Vec<_> = flow.paths().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["c", "c·c", "c·c·c"]);
        assert!(flow.is_truncated());
        assert_eq!(flow.compose(0, 0), Some(1));
        assert_eq!(flow.compose(1, 1), None);
    }

    #[test]
    fn product_rule_identifies_words() {
        let mut sys = WordSystem::new(vec!["0".into(), "1".into(), "2".into()]);
        let p = sys.add_letter("p", 0, 1);
        let q = sys.add_letter("q", 1, 2);
        let r = sys.add_letter("r", 0, 2);
        sys.add_product(p, q, r);
        let quot = sys.quotient(None).unwrap();
        assert_eq!(quot.class_count(), 3);
        assert_eq!(quot.class_of_word(&[p, q]), quot.class_of_word(&[r]));
        quot.check_congruence(&sys).unwrap();
    }

    #[test]
    fn escaping_witness_under_small_cap() {
        let mut sys = WordSystem::new(vec!["0".into()]);
        let a = sys.add_letter("a", 0, 0);
        let b = sys.add_letter("b", 0, 0);
        sys.add_product(a, a, b);
        let err = sys.quotient(Some(2)).unwrap_err();
        assert!(matches!(err, Error::CapTooSmallToClose { cap: 2, .. }), "{err}");
    }

    #[test]
    fn equations_merge_letters_in_context() {
        let mut sys = WordSystem::new(vec!["0".into(), "1".into(), "2".into()]);
        let p = sys.add_letter("p", 0, 1);
        let q = sys.add_letter("q", 1, 2);
        let z = sys.add_letter("z", 1, 2);
        sys.add_equation(z, q);
        let quot = sys.quotient(None).unwrap();
        assert_eq!(quot.class_of_word(&[p, z]), quot.class_of_word(&[p, q]));
        assert_eq!(quot.class_count(), 3);
    }
}
