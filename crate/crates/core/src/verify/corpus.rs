use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::{parse_corpus_file, parse_presentation, Presentation};

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub presentation: Presentation,
    /// Known order, checked on load; absent for user corpus files.
    pub expected_order: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

const NAMED: &[(&str, &str, u64)] = &[
    ("Q8", "<a,b | a^4, a^2 b^-2, b^-1 a b a>", 8),
    ("V4", "<a,b | a^2, b^2, [a,b]>", 4),
    ("Z2^3", "<a,b,c | a^2, b^2, c^2, [a,b], [a,c], [b,c]>", 8),
    ("S3", "<r,s | r^3, s^2, (r s)^2>", 6),
    ("S4", "<a,b | a^4, b^2, (a b)^3>", 24),
    ("A4", "<a,b | a^3, b^2, (a b)^3>", 12),
    ("Heis27", "<x,y,z | x^3, y^3, z^3, [x,y] z^-1, [x,z], [y,z]>", 27),
    ("C3:C4", "<a,b | a^3, b^4, b^-1 a b a>", 12),
];

impl Corpus {
    /// Cyclic groups up to order 12, dihedral groups of order 6 to 12, and
    /// a handful of named small groups.
    pub fn builtin() -> Corpus {
        let mut entries = Vec::new();
        let mut push = |name: String, text: &str, order: u64| {
            let presentation = parse_presentation(text).expect("builtin presentation");
            entries.push(CorpusEntry { name, presentation, expected_order: Some(order) });
        };
        for n in 1..=12u64 {
            push(format!("C{n}"), &format!("<a | a^{n}>"), n);
        }
        for n in 3..=6u64 {
            push(format!("D{n}"), &format!("<a,b | a^{n}, b^2, (a b)^2>"), 2 * n);
        }
        for &(name, text, order) in NAMED {
            push(name.to_string(), text, order);
        }
        Corpus { entries }
    }

    /// Entries of a corpus file (`name = <...>` per line).
    pub fn from_file_text(text: &str) -> Result<Corpus> {
        let entries = parse_corpus_file(text)?
            .into_iter()
            .map(|(name, presentation)| CorpusEntry { name, presentation, expected_order: None })
            .collect();
        Ok(Corpus { entries })
    }

    pub fn get(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The named entries, in the order given.
    pub fn select(&self, names: &[&str]) -> Result<Corpus> {
        let entries = names
            .iter()
            .map(|n| self.get(n).cloned().ok_or_else(|| Error::Invalid(format!("unknown corpus entry `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus { entries })
    }

    pub fn filter(&self, keep: impl Fn(&CorpusEntry) -> bool) -> Corpus {
        Corpus { entries: self.entries.iter().filter(|e| keep(e)).cloned().collect() }
    }
}
