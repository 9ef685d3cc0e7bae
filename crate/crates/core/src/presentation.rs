//! Words over free groups and finitely presented groups.
//!
//! A [`Presentation`] is a list of generator names together with relator
//! words. Presentations are written as text in the usual angle-bracket form:
//!
//! ```text
//! <r, s | r^3, s^2, (r s)^2>
//! <a, b | a^4, a^2 = b^2, b^-1 a b a>
//! <x, y, z | x^3, y^3, z^3, [x,y] z', [x,z], [y,z]>
//! ```
//!
//! Inverses may be written `x^-1` or `x'`. Products are juxtaposition or `*`,
//! `[x,y]` is the commutator `x^-1 y^-1 x y` (left-normed for more entries)
//! and `u = v` stands for the relator `u v^-1`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coset_enum::CosetTable;
use crate::error::{Error, Result};

/// A freely reduced word, stored as syllables `(generator, exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    syllables: Vec<(u32, i32)>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn generator(index: usize) -> Word {
        Word { syllables: vec![(index as u32, 1)] }
    }

    /// Builds a word from raw syllables and freely reduces it.
    pub fn from_syllables<I: IntoIterator<Item = (u32, i32)>>(syllables: I) -> Word {
        let mut out: Vec<(u32, i32)> = Vec::new();
        for (g, e) in syllables {
            push_syllable(&mut out, g, e);
        }
        Word { syllables: out }
    }

    /// Builds a word from letters. A letter `2*g` is generator `g`, `2*g + 1`
    /// is its inverse.
    pub fn from_letters<I: IntoIterator<Item = u32>>(letters: I) -> Word {
        Word::from_syllables(
            letters
                .into_iter()
                .map(|l| (l >> 1, if l & 1 == 0 { 1 } else { -1 })),
        )
    }

    pub fn syllables(&self) -> &[(u32, i32)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Letters in the `2*g (+1 for inverse)` encoding.
    pub fn letters(&self) -> impl Iterator<Item = u32> + '_ {
        self.syllables.iter().flat_map(|&(g, e)| {
            let l = 2 * g + u32::from(e < 0);
            std::iter::repeat(l).take(e.unsigned_abs() as usize)
        })
    }

    pub fn max_generator(&self) -> Option<u32> {
        self.syllables.iter().map(|&(g, _)| g).max()
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.syllables.clone();
        for &(g, e) in &other.syllables {
            push_syllable(&mut out, g, e);
        }
        Word { syllables: out }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// `by^-1 self by`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// Renames generators through `map`.
    pub fn map_generators(&self, map: impl Fn(u32) -> u32) -> Word {
        Word::from_syllables(self.syllables.iter().map(|&(g, e)| (map(g), e)))
    }

    /// Substitutes a word for every generator.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &(g, e) in &self.syllables {
            out = out.mul(&images[g as usize].pow(e as i64));
        }
        out
    }

    /// Cyclically reduced letter sequence.
    pub fn cyclic_letters(&self) -> Vec<u32> {
        let mut letters: Vec<u32> = self.letters().collect();
        while letters.len() >= 2 && letters[0] == letters[letters.len() - 1] ^ 1 {
            letters.pop();
            letters.remove(0);
        }
        letters
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

fn push_syllable(out: &mut Vec<(u32, i32)>, g: u32, e: i32) {
    if e == 0 {
        return;
    }
    match out.last_mut() {
        Some(last) if last.0 == g => {
            last.1 += e;
            if last.1 == 0 {
                out.pop();
            }
        }
        _ => out.push((g, e)),
    }
}

/// Freely reduces a word.
///
/// [`Word`] values are kept reduced by construction, so this rebuilds the
/// syllable list and is idempotent.
pub fn free_reduce(w: &Word) -> Word {
    Word::from_syllables(w.syllables.iter().copied())
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let name = self
                .names
                .get(g as usize)
                .map(String::as_str)
                .unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Presentation> {
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Invalid(format!("duplicate generator name {a}")));
            }
        }
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g as usize >= names.len() {
                    return Err(Error::Invalid(format!(
                        "relator uses generator {g} but only {} exist",
                        names.len()
                    )));
                }
            }
        }
        let relators = relators.iter().map(free_reduce).collect();
        Ok(Presentation { names, relators })
    }

    /// Generator names `x0, x1, ...`.
    pub fn with_default_names(count: usize, relators: Vec<Word>) -> Result<Presentation> {
        Presentation::new((0..count).map(|i| format!("x{i}")).collect(), relators)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Adds relators, returning a new presentation of the quotient.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Presentation {
        let mut relators = self.relators.clone();
        relators.extend(extra.into_iter().map(|w| free_reduce(&w)));
        Presentation { names: self.names.clone(), relators }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let mut p = Parser::new(text, &self.names);
        p.skip_ws();
        let w = p.word()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.syntax("unexpected trailing input"));
        }
        Ok(w)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} |", self.names.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {}", r.display_with(&self.names))?;
        }
        write!(f, ">")
    }
}

impl std::str::FromStr for Presentation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown generator `{name}` at byte {offset}")]
    UnknownGenerator { offset: usize, name: String },
    #[error("zero exponent at byte {offset}")]
    ZeroExponent { offset: usize },
    #[error("duplicate generator `{name}` at byte {offset}")]
    DuplicateGenerator { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownGenerator { offset, .. }
            | ParseError::ZeroExponent { offset }
            | ParseError::DuplicateGenerator { offset, .. } => *offset,
        }
    }
}

/// Parses `<names | relators>`.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser::new(text, &[]);
    p.skip_ws();
    p.expect(b'<')?;
    let mut names: Vec<String> = Vec::new();
    p.skip_ws();
    if p.peek() != Some(b'|') {
        loop {
            p.skip_ws();
            let start = p.pos;
            let name = p.ident().ok_or_else(|| p.syntax("expected a generator name"))?;
            if names.contains(&name) {
                return Err(ParseError::DuplicateGenerator { offset: start, name });
            }
            names.push(name);
            p.skip_ws();
            if p.peek() == Some(b',') {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.skip_ws();
    p.expect(b'|')?;
    p.names = names.clone();
    let mut relators = Vec::new();
    p.skip_ws();
    if p.peek() != Some(b'>') {
        loop {
            p.skip_ws();
            let lhs = p.word()?;
            p.skip_ws();
            let rel = if p.peek() == Some(b'=') {
                p.pos += 1;
                p.skip_ws();
                let rhs = p.word()?;
                lhs.mul(&rhs.inverse())
            } else {
                lhs
            };
            relators.push(rel);
            p.skip_ws();
            if p.peek() == Some(b',') {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.skip_ws();
    p.expect(b'>')?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(Presentation { names, relators })
}

/// Parses a corpus file: one `name = <...>` binding per line, `#` comments.
pub fn parse_corpus_file(text: &str) -> Result<Vec<(String, Presentation)>, ParseError> {
    let mut out = Vec::new();
    let mut line_start = 0usize;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if !trimmed.is_empty() {
            let eq = body.find('=').ok_or(ParseError::Syntax {
                offset: line_start,
                message: "expected `name = <presentation>`".into(),
            })?;
            let name = body[..eq].trim().to_string();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || "_-.".contains(c)) {
                return Err(ParseError::Syntax {
                    offset: line_start,
                    message: format!("invalid entry name `{name}`"),
                });
            }
            let rhs_offset = line_start + eq + 1;
            let pres = parse_presentation(&body[eq + 1..]).map_err(|e| shift(e, rhs_offset))?;
            out.push((name, pres));
        }
        line_start += line.len();
    }
    Ok(out)
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { offset, message } => ParseError::Syntax { offset: offset + by, message },
        ParseError::UnknownGenerator { offset, name } => {
            ParseError::UnknownGenerator { offset: offset + by, name }
        }
        ParseError::ZeroExponent { offset } => ParseError::ZeroExponent { offset: offset + by },
        ParseError::DuplicateGenerator { offset, name } => {
            ParseError::DuplicateGenerator { offset: offset + by, name }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, names: &[String]) -> Parser<'a> {
        Parser { src: text.as_bytes(), pos: 0, names: names.to_vec() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_' || c == b'(' || c == b'[' || c == b'1')
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut w = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                let f = self.factor()?;
                w = w.mul(&f);
            } else if self.starts_factor() {
                let f = self.factor()?;
                w = w.mul(&f);
            } else {
                return Ok(w);
            }
        }
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let mut w = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'\'') => {
                    self.pos += 1;
                    w = w.inverse();
                }
                Some(b'^') => {
                    self.pos += 1;
                    self.skip_ws();
                    let start = self.pos;
                    let neg = match self.peek() {
                        Some(b'-') => {
                            self.pos += 1;
                            true
                        }
                        Some(b'+') => {
                            self.pos += 1;
                            false
                        }
                        _ => false,
                    };
                    let digits_start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    if digits_start == self.pos {
                        return Err(self.syntax("expected an integer exponent"));
                    }
                    let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
                    let k: i64 = digits
                        .parse()
                        .map_err(|_| ParseError::Syntax { offset: digits_start, message: "exponent out of range".into() })?;
                    if k == 0 {
                        return Err(ParseError::ZeroExponent { offset: start });
                    }
                    if k > 1_000_000 {
                        return Err(ParseError::Syntax { offset: digits_start, message: "exponent out of range".into() });
                    }
                    w = w.pow(if neg { -k } else { k });
                }
                _ => return Ok(w),
            }
        }
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let w = self.word()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                self.skip_ws();
                let mut w = self.word()?;
                let mut count = 1;
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            self.skip_ws();
                            let next = self.word()?;
                            w = w.commutator(&next);
                            count += 1;
                        }
                        Some(b']') if count >= 2 => {
                            self.pos += 1;
                            return Ok(w);
                        }
                        _ => return Err(self.syntax("expected `,` or `]` in commutator")),
                    }
                }
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            _ => {
                let name = self.ident().ok_or_else(|| self.syntax("expected a generator, `(`, `[` or `1`"))?;
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    return Ok(Word::generator(i));
                }
                // `abab` style juxtaposition of single-letter generators
                let letters: Option<Vec<usize>> = name
                    .chars()
                    .map(|c| self.names.iter().position(|n| n.len() == 1 && n.starts_with(c)))
                    .collect();
                match letters {
                    Some(ls) if name.len() > 1 => {
                        Ok(Word::from_syllables(ls.into_iter().map(|g| (g as u32, 1))))
                    }
                    _ => Err(ParseError::UnknownGenerator { offset: start, name }),
                }
            }
        }
    }
}

/// One Schreier representative word per coset of a complete table, following
/// the breadth-first spanning tree. Word 0 is the identity.
pub fn element_word_table(p: &Presentation, table: &CosetTable) -> Result<Vec<Word>> {
    if !table.is_complete() {
        return Err(Error::IncompleteTable);
    }
    if table.generator_count() != p.generator_count() {
        return Err(Error::Invalid("table and presentation disagree on generators".into()));
    }
    Ok(schreier_words(table))
}

pub(crate) fn schreier_words(table: &CosetTable) -> Vec<Word> {
    let n = table.coset_count();
    let cols = table.column_count();
    let mut parent: Vec<Option<(usize, u32)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut order = Vec::with_capacity(n);
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for col in 0..cols {
            let d = table.get(c, col as u32) as usize;
            if !seen[d] {
                seen[d] = true;
                parent[d] = Some((c, col as u32));
                queue.push_back(d);
            }
        }
    }
    let mut words = vec![Word::identity(); n];
    for &c in &order {
        if let Some((p, col)) = parent[c] {
            words[c] = words[p].mul(&Word::from_letters([col]));
        }
    }
    words
}

/// Map from generator name to index.
pub fn name_index(p: &Presentation) -> HashMap<&str, usize> {
    p.names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cyclic() {
        let p = parse_presentation("<a | a^2>").unwrap();
        assert_eq!(p.generator_count(), 1);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.relators()[0].len(), 2);
    }

    #[test]
    fn parses_s3() {
        let p = parse_presentation("<r,s | r^3, s^2, (r s)^2>").unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators().len(), 3);
        assert_eq!(p.relators()[2].len(), 4);
    }

    #[test]
    fn rejects_zero_exponent() {
        let err = parse_presentation("<a | a^0>").unwrap_err();
        assert_eq!(err, ParseError::ZeroExponent { offset: 7 });
    }

    #[test]
    fn unknown_generator_reports_offset() {
        let err = parse_presentation("<a | a^2, b>").unwrap_err();
        assert_eq!(err, ParseError::UnknownGenerator { offset: 10, name: "b".into() });
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_presentation("<a | a^>").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 7, .. }), "{err:?}");
    }

    #[test]
    fn inverse_forms_agree() {
        let p = parse_presentation("<a,b | a'b, a^-1*b, [a,b], a^-1 b^-1 a b>").unwrap();
        assert_eq!(p.relators()[0], p.relators()[1]);
        assert_eq!(p.relators()[2], p.relators()[3]);
    }

    #[test]
    fn juxtaposed_single_letters() {
        let p = parse_presentation("<a,b | abab, a = b>").unwrap();
        assert_eq!(p.relators()[0], Word::from_letters([0, 2, 0, 2]));
        assert_eq!(p.relators()[1], Word::from_letters([0, 3]));
    }

    #[test]
    fn free_reduction_examples() {
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert!(free_reduce(&a.mul(&a.inverse())).is_identity());
        assert_eq!(free_reduce(&a.mul(&b).mul(&b.inverse()).mul(&a)), a.pow(2));
        let w = a.mul(&b.pow(3));
        assert_eq!(free_reduce(&w), w);
    }

    #[test]
    fn left_normed_commutator() {
        let p = parse_presentation("<a,b,c | [a,b,c]>").unwrap();
        let ab = Word::generator(0).commutator(&Word::generator(1));
        assert_eq!(p.relators()[0], ab.commutator(&Word::generator(2)));
    }

    #[test]
    fn corpus_file() {
        let text = "# test\nC2 = <a | a^2>\n\nS3 = <r,s | r^3, s^2, (r s)^2> # dihedral\n";
        let entries = parse_corpus_file(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[1].0, "S3");
        let bad = parse_corpus_file("X = <a | b>\n").unwrap_err();
        assert_eq!(bad.offset(), 9);
    }

    #[test]
    fn empty_presentations() {
        let p = parse_presentation("< | >").unwrap();
        assert_eq!(p.generator_count(), 0);
        let q = parse_presentation("<a,b | >").unwrap();
        assert!(q.relators().is_empty());
    }
}
