use serde::{Deserialize, Serialize};

use super::LinkerError;

/// Name transformation applied at each cascade step, in step order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameScheme {
    Identity,
    Lowercase,
    Truncate2Words,
    Truncate1Word,
    StripNonword,
    Manual,
}

impl NameScheme {
    pub const ALL: [NameScheme; 6] = [
        NameScheme::Identity,
        NameScheme::Lowercase,
        NameScheme::Truncate2Words,
        NameScheme::Truncate1Word,
        NameScheme::StripNonword,
        NameScheme::Manual,
    ];

    /// The five schemes that generate candidates automatically.
    pub const AUTOMATIC: [NameScheme; 5] = [
        NameScheme::Identity,
        NameScheme::Lowercase,
        NameScheme::Truncate2Words,
        NameScheme::Truncate1Word,
        NameScheme::StripNonword,
    ];

    pub fn step(self) -> u8 {
        match self {
            NameScheme::Identity => 1,
            NameScheme::Lowercase => 2,
            NameScheme::Truncate2Words => 3,
            NameScheme::Truncate1Word => 4,
            NameScheme::StripNonword => 5,
            NameScheme::Manual => 6,
        }
    }

    pub fn from_step(step: u8) -> Option<NameScheme> {
        NameScheme::ALL.into_iter().find(|s| s.step() == step)
    }

    pub fn label(self) -> &'static str {
        match self {
            NameScheme::Identity => "identity",
            NameScheme::Lowercase => "lowercase",
            NameScheme::Truncate2Words => "truncate-2-words",
            NameScheme::Truncate1Word => "truncate-1-word",
            NameScheme::StripNonword => "strip-nonword",
            NameScheme::Manual => "manual",
        }
    }
}

/// Letters, digits and underscore.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Per-character lowercase mapping. Characters whose full mapping expands
/// to several code points keep only the first one, which matches the
/// simple (one-to-one) mapping.
pub fn simple_lowercase(s: &str) -> String {
    s.chars()
        .map(|c| c.to_lowercase().next().unwrap_or(c))
        .collect()
}

fn word_tokens(name: &str) -> impl Iterator<Item = &str> {
    name.split(|c: char| !is_word_char(c))
        .filter(|t| !t.is_empty())
}

fn truncate(name: &str, words: usize) -> String {
    let joined = word_tokens(name).take(words).collect::<Vec<_>>().join(" ");
    simple_lowercase(&joined)
}

/// Applies one automatic scheme to a name.
pub fn normalize_name(name: &str, scheme: NameScheme) -> Result<String, LinkerError> {
    if name.is_empty() {
        return Err(LinkerError::EmptyName);
    }
    Ok(match scheme {
        NameScheme::Identity => name.to_string(),
        NameScheme::Lowercase => simple_lowercase(name),
        NameScheme::Truncate2Words => truncate(name, 2),
        NameScheme::Truncate1Word => truncate(name, 1),
        NameScheme::StripNonword => {
            let kept: String = name.chars().filter(|c| is_word_char(*c)).collect();
            simple_lowercase(&kept)
                .chars()
                .filter(|c| is_word_char(*c))
                .collect()
        }
        NameScheme::Manual => return Err(LinkerError::ManualScheme),
    })
}

/// Composite transforms used only for step-6 suggestions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinedScheme {
    /// First two word tokens concatenated: "SIX NO" and "SIXNO" meet.
    JoinedTwoWords,
    /// Non-word characters stripped, then the first two word tokens of
    /// what remains; catches "S-IX Stuttgart" against "SIX".
    StrippedFirstWord,
}

impl CombinedScheme {
    pub const ALL: [CombinedScheme; 2] = [
        CombinedScheme::JoinedTwoWords,
        CombinedScheme::StrippedFirstWord,
    ];

    pub fn apply(self, name: &str) -> String {
        match self {
            CombinedScheme::JoinedTwoWords => truncate(name, 2).replace(' ', ""),
            CombinedScheme::StrippedFirstWord => {
                // strip punctuation inside words (S-IX -> SIX), keep whitespace as delimiter
                let cleaned: String = name
                    .chars()
                    .filter(|c| is_word_char(*c) || c.is_whitespace())
                    .collect();
                truncate(&cleaned, 1)
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CombinedScheme::JoinedTwoWords => "joined-two-words",
            CombinedScheme::StrippedFirstWord => "stripped-first-word",
        }
    }
}
