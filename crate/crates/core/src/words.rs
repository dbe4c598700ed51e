//! Reduced words in the free group on g generators.
//!
//! A word is a sequence of nonzero letters `i` with `|i| <= g`, letter
//! `-i` denoting the inverse of generator `i`. Words are reduced when no
//! letter is followed by its inverse. Letters are ordered
//! `1 < -1 < 2 < -2 < ...` (the same interleaving as variable slots), and
//! all iterators enumerate in the induced lexicographic order, so every
//! traversal is deterministic.
//!
//! Period computations never need arbitrary words, only canonical
//! representatives of cosets: words whose last letter avoids `{j, -j}`
//! represent the nontrivial right cosets of the cyclic subgroup generated
//! by generator j, and words avoiding `{i, -i}` at the start and
//! `{j, -j}` at the end represent the nontrivial double cosets. The empty
//! word always represents the trivial (double) coset and is handled by
//! callers, so all iterators here produce words of a fixed positive
//! length. Enumeration streams through an odometer with backtracking
//! rather than materializing shells; the deepest shells of a genus-3
//! computation run to millions of words.

use crate::algebra::{slot, Scalar};
use crate::moebius::MoebiusMap;
use crate::{Error, Result};

/// Letter at position `k` in the order `1 < -1 < 2 < -2 < ...`.
pub fn index_to_letter(k: usize) -> i32 {
    let base = (k / 2 + 1) as i32;
    if k % 2 == 0 {
        base
    } else {
        -base
    }
}

/// Position of a letter in the letter order; the inverse of
/// [`index_to_letter`]. Shared with variable slots by design.
pub fn letter_index(l: i32) -> usize {
    slot(l)
}

pub fn is_reduced(word: &[i32]) -> bool {
    word.windows(2).all(|w| w[0] != -w[1])
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &l in word {
        assert!(l != 0, "0 is not a letter");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse_word(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|&l| -l).collect()
}

/// Streaming enumeration of reduced words of fixed length, optionally
/// with a blocked generator at the first and/or last position.
pub struct ReducedWordIter {
    g: u32,
    n: usize,
    first_block: Option<u32>,
    last_block: Option<u32>,
    word: Vec<i32>,
    alt: Vec<usize>,
    started: bool,
    done: bool,
}

impl ReducedWordIter {
    fn new(g: u32, n: usize, first_block: Option<u32>, last_block: Option<u32>) -> Self {
        ReducedWordIter {
            g,
            n,
            first_block,
            last_block,
            word: Vec::with_capacity(n),
            alt: Vec::with_capacity(n),
            started: false,
            done: n == 0,
        }
    }

    /// The `idx`-th admissible letter at depth `d`, given the current
    /// prefix `self.word[..d]`.
    fn candidate_at(&self, d: usize, idx: usize) -> Option<i32> {
        let prev = if d > 0 { Some(self.word[d - 1]) } else { None };
        (0..2 * self.g as usize)
            .map(index_to_letter)
            .filter(|&l| {
                if let Some(p) = prev {
                    if l == -p {
                        return false;
                    }
                }
                if d == 0 {
                    if let Some(b) = self.first_block {
                        if l.unsigned_abs() == b {
                            return false;
                        }
                    }
                }
                if d == self.n - 1 {
                    if let Some(b) = self.last_block {
                        if l.unsigned_abs() == b {
                            return false;
                        }
                    }
                }
                true
            })
            .nth(idx)
    }

    /// Replaces the deepest letter by its next alternative, popping
    /// exhausted levels. False when the whole tree is exhausted.
    fn backtrack(&mut self) -> bool {
        while self.word.pop().is_some() {
            let idx = self.alt.pop().expect("alt parallels word") + 1;
            if let Some(l) = self.candidate_at(self.word.len(), idx) {
                self.word.push(l);
                self.alt.push(idx);
                return true;
            }
        }
        false
    }

    /// Extends the current valid prefix to full length, backtracking out
    /// of dead ends. False when no completion exists anywhere.
    fn descend(&mut self) -> bool {
        while self.word.len() < self.n {
            match self.candidate_at(self.word.len(), 0) {
                Some(l) => {
                    self.word.push(l);
                    self.alt.push(0);
                }
                None => {
                    if !self.backtrack() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl Iterator for ReducedWordIter {
    type Item = Vec<i32>;

    fn next(&mut self) -> Option<Vec<i32>> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.descend()
        } else {
            self.backtrack() && self.descend()
        };
        if !ok {
            self.done = true;
            return None;
        }
        Some(self.word.clone())
    }
}

/// All reduced words of length exactly `n` (none for `n = 0`).
pub fn reduced_words(g: u32, n: usize) -> ReducedWordIter {
    ReducedWordIter::new(g, n, None, None)
}

/// Canonical representatives of the nontrivial cosets `Gamma / <gen j>`
/// of length `n`: reduced words whose last letter avoids `{j, -j}`.
pub fn coset_reps(g: u32, n: usize, j: u32) -> ReducedWordIter {
    ReducedWordIter::new(g, n, None, Some(j))
}

/// Canonical representatives of the nontrivial double cosets
/// `<gen i> \ Gamma / <gen j>` of length `n`: reduced words avoiding
/// `{i, -i}` first and `{j, -j}` last. May be empty (genus 2, length 1,
/// i distinct from j leaves no admissible letter).
pub fn double_coset_reps(g: u32, n: usize, i: u32, j: u32) -> ReducedWordIter {
    ReducedWordIter::new(g, n, Some(i), Some(j))
}

/// The generators of a Schottky group together with their adjugate
/// inverses, evaluating words to matrices.
#[derive(Clone, Debug)]
pub struct GeneratorSystem<F: Scalar> {
    gens: Vec<MoebiusMap<F>>,
    invs: Vec<MoebiusMap<F>>,
    unit: F,
}

impl<F: Scalar> GeneratorSystem<F> {
    pub fn new(gens: Vec<MoebiusMap<F>>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Precondition("no generators".into()));
        }
        let unit = gens[0].a.one_like();
        let invs = gens.iter().map(MoebiusMap::inverse).collect();
        Ok(GeneratorSystem { gens, invs, unit })
    }

    pub fn genus(&self) -> usize {
        self.gens.len()
    }

    pub fn map_for(&self, letter: i32) -> &MoebiusMap<F> {
        let k = letter.unsigned_abs() as usize;
        assert!(
            letter != 0 && k <= self.gens.len(),
            "letter {letter} outside alphabet"
        );
        if letter > 0 {
            &self.gens[k - 1]
        } else {
            &self.invs[k - 1]
        }
    }

    /// Left-to-right product of the letters' matrices (identity for the
    /// empty word). With adjugate inverses the result of a non-reduced
    /// word is a det-multiple of its reduction, hence the same map.
    pub fn evaluate(&self, word: &[i32]) -> MoebiusMap<F> {
        let mut m = MoebiusMap::identity(&self.unit);
        for &l in word {
            m = m.compose(self.map_for(l));
        }
        m
    }
}
