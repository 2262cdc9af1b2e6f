//! Braid words on `n` strands, purity, abelianization by pair-generator
//! exponent sums, and a signed-crossing linking-number oracle.
//!
//! Two independent routes compute the abelianization of a pure braid. A word
//! in the pair generators `A_{ij}` abelianizes by summing exponents per pair.
//! A word in the elementary generators `σ_i` is simulated strand by strand:
//! the linking number of a strand pair is half the signed count of their
//! crossings, an exact integer whenever the word is pure. The two routes
//! agree after embedding `A_{ij} = (σ_{j-1}…σ_{i+1}) σ_i² (σ_{i+1}…σ_{j-1})⁻¹`,
//! which certifies the sign convention: `σ_i` is a positive crossing and a
//! positive twist contributes `+1`.
//!
//! Text format: a header token `n=<k>` followed by whitespace-separated
//! letters `s<i>` / `S<i>` for `σ_i` / `σ_i⁻¹` and `A<i>.<j>` / `a<i>.<j>`
//! for `A_{ij}` / `A_{ij}⁻¹`.

use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// One elementary letter `σ_i^{±1}`; indices are 1-based, `1 ≤ i ≤ n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArtinLetter {
    pub index: usize,
    pub sign: i8,
}

/// A word in the elementary braid generators on `n` strands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinWord {
    strands: usize,
    letters: Vec<ArtinLetter>,
}

impl ArtinWord {
    pub fn new(strands: usize, letters: Vec<ArtinLetter>) -> Result<ArtinWord> {
        if strands == 0 {
            return Err(Error::Parse("a braid needs at least one strand".into()));
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands {
                return Err(Error::Parse(format!(
                    "generator index {} out of range for {strands} strands",
                    l.index
                )));
            }
            if l.sign != 1 && l.sign != -1 {
                return Err(Error::Parse("letter sign must be ±1".into()));
            }
        }
        Ok(ArtinWord { strands, letters })
    }

    pub fn empty(strands: usize) -> Result<ArtinWord> {
        ArtinWord::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[ArtinLetter] {
        &self.letters
    }

    pub fn inverse(&self) -> ArtinWord {
        ArtinWord {
            strands: self.strands,
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| ArtinLetter { index: l.index, sign: -l.sign })
                .collect(),
        }
    }

    pub fn concat(&self, other: &ArtinWord) -> Result<ArtinWord> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch { left: self.strands, right: other.strands });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(ArtinWord { strands: self.strands, letters })
    }
}

impl fmt::Display for ArtinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.strands)?;
        for l in &self.letters {
            write!(f, " {}{}", if l.sign > 0 { "s" } else { "S" }, l.index)?;
        }
        Ok(())
    }
}

/// One pair-generator letter `A_{ij}^{±1}` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairLetter {
    pub i: usize,
    pub j: usize,
    pub exponent: i8,
}

/// A word in the pair generators `A_{ij}` on `n` strands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWord {
    strands: usize,
    letters: Vec<PairLetter>,
}

impl PairWord {
    pub fn new(strands: usize, letters: Vec<PairLetter>) -> Result<PairWord> {
        if strands == 0 {
            return Err(Error::Parse("a braid needs at least one strand".into()));
        }
        for l in &letters {
            if l.i == 0 || l.i >= l.j || l.j > strands {
                return Err(Error::Parse(format!(
                    "pair ({}, {}) out of range for {strands} strands",
                    l.i, l.j
                )));
            }
            if l.exponent != 1 && l.exponent != -1 {
                return Err(Error::Parse("letter exponent must be ±1".into()));
            }
        }
        Ok(PairWord { strands, letters })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[PairLetter] {
        &self.letters
    }

    /// Rewrite into elementary generators via the standard embedding.
    pub fn to_artin(&self) -> ArtinWord {
        let mut word = ArtinWord::empty(self.strands).expect("strands >= 1");
        for l in self.letters() {
            let mut gen = embed_pair_generator(l.i, l.j, self.strands).expect("validated");
            if l.exponent < 0 {
                gen = gen.inverse();
            }
            word = word.concat(&gen).expect("same strand count");
        }
        word
    }
}

impl fmt::Display for PairWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.strands)?;
        for l in &self.letters {
            write!(f, " {}{}.{}", if l.exponent > 0 { "A" } else { "a" }, l.i, l.j)?;
        }
        Ok(())
    }
}

/// The strand permutation of a word: entry `k` is the final position of the
/// strand that starts at position `k` (1-based).
pub fn permutation_of(word: &ArtinWord) -> Vec<usize> {
    let n = word.strands();
    // strand_at[p] = id of the strand currently at position p (0-based)
    let mut strand_at: Vec<usize> = (0..n).collect();
    for l in word.letters() {
        strand_at.swap(l.index - 1, l.index);
    }
    let mut ends = vec![0usize; n];
    for (pos, strand) in strand_at.iter().enumerate() {
        ends[*strand] = pos + 1;
    }
    ends
}

/// Whether the word induces the identity strand permutation.
pub fn is_pure(word: &ArtinWord) -> bool {
    permutation_of(word).iter().enumerate().all(|(k, p)| *p == k + 1)
}

/// Exponent sums per pair generator — the abelianization coordinates of a
/// pair word.
pub fn exponent_sums(word: &PairWord) -> BTreeMap<(usize, usize), i64> {
    let mut sums = BTreeMap::new();
    for l in word.letters() {
        let entry = sums.entry((l.i, l.j)).or_insert(0i64);
        *entry += i64::from(l.exponent);
        if *entry == 0 {
            sums.remove(&(l.i, l.j));
        }
    }
    sums
}

/// Pairwise linking numbers of a pure word: half the signed count of
/// crossings between the strands starting at each pair of positions.
///
/// Strands of a pure braid cross an even number of times, so the halved
/// count is an exact integer; this is asserted. Fails with `NotPure` when
/// the permutation is nontrivial.
pub fn linking_numbers(word: &ArtinWord) -> Result<BTreeMap<(usize, usize), i64>> {
    let perm = permutation_of(word);
    for (k, p) in perm.iter().enumerate() {
        if *p != k + 1 {
            return Err(Error::NotPure { strand: k + 1, ends_at: *p });
        }
    }
    let n = word.strands();
    let mut strand_at: Vec<usize> = (0..n).collect();
    let mut crossings: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for l in word.letters() {
        let (p, q) = (strand_at[l.index - 1], strand_at[l.index]);
        let key = (p.min(q) + 1, p.max(q) + 1);
        *crossings.entry(key).or_insert(0) += i64::from(l.sign);
        strand_at.swap(l.index - 1, l.index);
    }
    let mut linking = BTreeMap::new();
    for (key, count) in crossings {
        assert!(count % 2 == 0, "pure strands cross an even number of times");
        if count != 0 {
            linking.insert(key, count / 2);
        }
    }
    Ok(linking)
}

/// The pair generator `A_{ij}` as an elementary word:
/// `(σ_{j-1} … σ_{i+1}) σ_i² (σ_{i+1} … σ_{j-1})⁻¹`.
pub fn embed_pair_generator(i: usize, j: usize, strands: usize) -> Result<ArtinWord> {
    if i == 0 || i >= j || j > strands {
        return Err(Error::Parse(format!(
            "pair ({i}, {j}) out of range for {strands} strands"
        )));
    }
    let mut letters = Vec::new();
    for k in ((i + 1)..j).rev() {
        letters.push(ArtinLetter { index: k, sign: 1 });
    }
    letters.push(ArtinLetter { index: i, sign: 1 });
    letters.push(ArtinLetter { index: i, sign: 1 });
    for k in (i + 1)..j {
        letters.push(ArtinLetter { index: k, sign: -1 });
    }
    ArtinWord::new(strands, letters)
}

/// The full twist `(σ_1 … σ_{n-1})^n`: pure, and linking every strand pair
/// exactly once. On one strand it is the empty word.
pub fn full_twist(strands: usize) -> Result<ArtinWord> {
    if strands == 0 {
        return Err(Error::Parse("a braid needs at least one strand".into()));
    }
    let mut letters = Vec::new();
    for _ in 0..strands {
        for i in 1..strands {
            letters.push(ArtinLetter { index: i, sign: 1 });
        }
    }
    ArtinWord::new(strands, letters)
}

fn parse_header(tokens: &mut std::str::SplitWhitespace<'_>) -> Result<usize> {
    let Some(head) = tokens.next() else {
        return Err(Error::Parse("empty braid word; expected header `n=<k>`".into()));
    };
    let Some(count) = head.strip_prefix("n=") else {
        return Err(Error::Parse(format!("expected header `n=<k>`, got `{head}`")));
    };
    count
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("bad strand count `{count}`: {e}")))
}

fn parse_pair_token(body: &str, token: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = body.split('.').collect();
    let [i, j] = parts.as_slice() else {
        return Err(Error::Parse(format!("expected `<i>.<j>` in `{token}`")));
    };
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad strand index in `{token}`: {e}")))
    };
    Ok((parse(i)?, parse(j)?))
}

/// Parse an elementary-generator word. Pair-generator tokens are accepted
/// and inlined through their standard embedding.
pub fn parse_artin_word(text: &str) -> Result<ArtinWord> {
    let mut tokens = text.split_whitespace();
    let strands = parse_header(&mut tokens)?;
    let mut word = ArtinWord::empty(strands)?;
    for token in tokens {
        let (head, body) = token.split_at(1);
        let piece = match head {
            "s" | "S" => {
                let index = body
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad generator index in `{token}`: {e}")))?;
                let sign = if head == "s" { 1 } else { -1 };
                ArtinWord::new(strands, vec![ArtinLetter { index, sign }])?
            }
            "A" | "a" => {
                let (i, j) = parse_pair_token(body, token)?;
                let gen = embed_pair_generator(i, j, strands)?;
                if head == "A" {
                    gen
                } else {
                    gen.inverse()
                }
            }
            _ => return Err(Error::Parse(format!("unknown braid token `{token}`"))),
        };
        word = word.concat(&piece)?;
    }
    Ok(word)
}

/// Parse a pair-generator word (tokens `A<i>.<j>` / `a<i>.<j>` only).
pub fn parse_pair_word(text: &str) -> Result<PairWord> {
    let mut tokens = text.split_whitespace();
    let strands = parse_header(&mut tokens)?;
    let mut letters = Vec::new();
    for token in tokens {
        let (head, body) = token.split_at(1);
        let exponent = match head {
            "A" => 1,
            "a" => -1,
            _ => {
                return Err(Error::Parse(format!(
                    "pair words use `A<i>.<j>` / `a<i>.<j>` tokens, got `{token}`"
                )))
            }
        };
        let (i, j) = parse_pair_token(body, token)?;
        letters.push(PairLetter { i, j, exponent });
    }
    PairWord::new(strands, letters)
}
