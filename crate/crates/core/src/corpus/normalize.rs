//! Identifier and comment token normalization.
//!
//! Tokens are split on underscores and camel-case boundaries, stripped of
//! every non-alphabetic character and lowercased. An uppercase run that is
//! followed by a lowercase letter splits before its final character, so
//! `parseHTTPRequest` becomes `parse`, `http`, `request`.

/// Normalizes a sequence of raw tokens.
pub fn normalize_tokens<S: AsRef<str>>(raw: &[S]) -> Vec<String> {
    let mut out = Vec::new();
    for tok in raw {
        for piece in tok.as_ref().split('_') {
            split_camel(piece, &mut out);
        }
    }
    out
}

/// Whitespace-splits `text` and normalizes the result.
pub fn normalize_text(text: &str) -> Vec<String> {
    let raw: Vec<&str> = text.split_whitespace().collect();
    normalize_tokens(&raw)
}

fn split_camel(piece: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = piece.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = chars[i - 1];
        let cur = chars[i];
        let lower_to_upper = (prev.is_lowercase() || prev.is_ascii_digit()) && cur.is_uppercase();
        let acronym_end =
            prev.is_uppercase() && cur.is_uppercase() && chars.get(i + 1).is_some_and(|c| c.is_lowercase());
        if lower_to_upper || acronym_end {
            push_fragment(&chars[start..i], out);
            start = i;
        }
    }
    push_fragment(&chars[start..], out);
}

fn push_fragment(chars: &[char], out: &mut Vec<String>) {
    let cleaned: String = chars.iter().filter(|c| c.is_ascii_alphabetic()).map(|c| c.to_ascii_lowercase()).collect();
    if !cleaned.is_empty() {
        out.push(cleaned);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn camel_and_underscore() {
        assert_eq!(normalize_tokens(&["getUserName"]), ["get", "user", "name"]);
        assert_eq!(normalize_tokens(&["foo_bar_Baz"]), ["foo", "bar", "baz"]);
    }

    #[test]
    fn acronym_run_splits_before_last_upper() {
        assert_eq!(normalize_tokens(&["parseHTTPRequest2"]), ["parse", "http", "request"]);
        assert_eq!(normalize_tokens(&["HTTP"]), ["http"]);
        assert_eq!(normalize_tokens(&["utf8Decoder"]), ["utf", "decoder"]);
    }

    #[test]
    fn drops_empty_fragments() {
        assert!(normalize_tokens(&["123", "__", "!!"]).is_empty());
        assert_eq!(normalize_text("  a.b  C "), ["ab", "c"]);
    }

    proptest! {
        #[test]
        fn idempotent(raw in proptest::collection::vec("[A-Za-z0-9_$.]{0,12}", 0..8)) {
            let once = normalize_tokens(&raw);
            let twice = normalize_tokens(&once);
            prop_assert_eq!(&once, &twice);
            for t in &once {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(|c| c.is_ascii_lowercase()));
            }
        }
    }
}
