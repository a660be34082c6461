use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A lowercase run of ASCII letters `a`-`z`, never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    /// Wrap `s` if it is a valid token.
    pub fn new(s: &str) -> Option<Token> {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase()) {
            Some(Token(String::from(s)))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn starts_with_ignore_case(s: &str, prefix: &str) -> bool {
    s.len() >= prefix.len() && s.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Drop `http://` / `https://` URLs (up to the next whitespace) and
/// `@mention` handles. Every other character is kept.
fn strip_urls_and_mentions(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if (c == 'h' || c == 'H')
            && (starts_with_ignore_case(rest, "http://") || starts_with_ignore_case(rest, "https://"))
        {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            rest = &rest[end..];
            continue;
        }
        if c == '@' {
            let handle = &rest[1..];
            let end = handle
                .char_indices()
                .find(|&(_, ch)| !is_word_char(ch))
                .map_or(handle.len(), |(i, _)| i);
            if end > 0 {
                rest = &handle[end..];
                continue;
            }
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

/// Split message text into lowercase `a`-`z` tokens.
///
/// URLs and `@mentions` are removed, hashtag bodies are kept as words, and
/// the remainder is lowercased and split on every character outside `a`-`z`
/// (so `I'm` yields `i`, `m`).
pub fn tokenize(text: &str) -> Vec<Token> {
    let cleaned = strip_urls_and_mentions(text);
    // A '#' is outside a-z, so splitting below strips it from hashtags.
    let lowered = cleaned.to_lowercase();
    lowered
        .split(|c: char| !c.is_ascii_lowercase())
        .filter(|s| !s.is_empty())
        .map(|s| Token(String::from(s)))
        .collect()
}
