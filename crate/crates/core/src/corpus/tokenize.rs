//! Whitespace-and-punctuation tokenizer with byte-exact offsets.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercased, with copula forms folded to `be`.
    pub normalized: String,
    pub char_start: usize,
    pub char_end: usize,
}

impl Token {
    fn new(text: &str, start: usize, end: usize) -> Token {
        let surface = &text[start..end];
        Token {
            surface: surface.to_string(),
            normalized: normalize_word(surface),
            char_start: start,
            char_end: end,
        }
    }
}

/// Lowercases a word and maps copula forms onto `be`, which is how the
/// pattern files spell them.
pub fn normalize_word(word: &str) -> String {
    let lower = word.to_lowercase();
    match lower.as_str() {
        "is" | "are" | "was" | "were" | "be" | "been" | "being" => "be".to_string(),
        _ => lower,
    }
}

fn is_sign(c: char) -> bool {
    matches!(c, '-' | '+' | '\u{2212}')
}

/// Characters that stay inside a word when flanked by alphanumerics:
/// `1,2-dichloroethane`, `0.5`, `60-80`, `N'-methyl`.
fn is_connector(c: char) -> bool {
    matches!(c, '-' | '\u{2013}' | '.' | ',' | '\'' | '+')
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).map(|&(_, n)| n);
        let mut j = i + 1;
        if c.is_alphanumeric() || (is_sign(c) && next.is_some_and(|n| n.is_ascii_digit())) {
            while j < chars.len() {
                let cj = chars[j].1;
                if cj.is_alphanumeric() {
                    j += 1;
                } else if is_connector(cj)
                    && chars[j - 1].1.is_alphanumeric()
                    && chars.get(j + 1).is_some_and(|&(_, n)| n.is_alphanumeric())
                {
                    j += 1;
                } else {
                    break;
                }
            }
        } else if c == '°' {
            while j < chars.len() && chars[j].1.is_alphabetic() {
                j += 1;
            }
        }
        let start = chars[i].0;
        let end = chars.get(j).map(|&(b, _)| b).unwrap_or(text.len());
        tokens.push(Token::new(text, start, end));
        i = j;
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn unit_tokens() {
        assert_eq!(surfaces("at 60 °C for 2 h"), ["at", "60", "°C", "for", "2", "h"]);
        assert_eq!(surfaces("at 60°C"), ["at", "60", "°C"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n").is_empty());
    }

    #[test]
    fn percent_and_brackets() {
        let text = "yield (85 % ).";
        let toks = tokenize(text);
        let got: Vec<&str> = toks.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(got, ["yield", "(", "85", "%", ")", "."]);
        for t in &toks {
            assert_eq!(&text[t.char_start..t.char_end], t.surface);
        }
        assert_eq!(surfaces("85%"), ["85", "%"]);
    }

    #[test]
    fn chemical_words_stay_whole() {
        assert_eq!(surfaces("FeCl3 and 5e"), ["FeCl3", "and", "5e"]);
        assert_eq!(surfaces("1,2-dichloroethane"), ["1,2-dichloroethane"]);
        assert_eq!(surfaces("N,N-dimethylformamide."), ["N,N-dimethylformamide", "."]);
        assert_eq!(surfaces("60-80 °C"), ["60-80", "°C"]);
        assert_eq!(surfaces("0.5 equiv"), ["0.5", "equiv"]);
    }

    #[test]
    fn signed_numbers() {
        assert_eq!(surfaces("at -78 °C"), ["at", "-78", "°C"]);
        assert_eq!(surfaces("(-78"), ["(", "-78"]);
        assert_eq!(surfaces("a - b"), ["a", "-", "b"]);
    }

    #[test]
    fn copula_normalization() {
        let toks = tokenize("5e Was obtained");
        assert_eq!(toks[1].normalized, "be");
        assert_eq!(toks[2].normalized, "obtained");
    }

    proptest! {
        #[test]
        fn gaps_reconstruct_input(text in "[ a-zA-Z0-9%°().,\\-\u{3b1}\u{3bc}\t\n]{0,60}") {
            let toks = tokenize(&text);
            let mut rebuilt = String::new();
            let mut prev = 0;
            for t in &toks {
                prop_assert!(t.char_start < t.char_end);
                prop_assert!(t.char_start >= prev);
                let gap = &text[prev..t.char_start];
                prop_assert!(gap.chars().all(char::is_whitespace));
                rebuilt.push_str(gap);
                prop_assert_eq!(&text[t.char_start..t.char_end], t.surface.as_str());
                rebuilt.push_str(&t.surface);
                prev = t.char_end;
            }
            rebuilt.push_str(&text[prev..]);
            prop_assert_eq!(rebuilt, text);
        }

        #[test]
        fn arbitrary_unicode_round_trips(text in any::<String>()) {
            let toks = tokenize(&text);
            let mut prev = 0;
            for t in &toks {
                prop_assert!(text[prev..t.char_start].chars().all(char::is_whitespace));
                prop_assert_eq!(&text[t.char_start..t.char_end], t.surface.as_str());
                prev = t.char_end;
            }
            prop_assert!(text[prev..].chars().all(char::is_whitespace));
        }
    }
}
