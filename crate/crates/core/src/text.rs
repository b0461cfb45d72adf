//! Word-level normalisation shared by the n-gram baseline and the heuristic scorer.

/// Lowercases, strips punctuation and splits on whitespace.
///
/// Characters that are neither alphanumeric nor whitespace are removed, so
/// "fox's" becomes "foxs" and "well-known" becomes "wellknown".
pub(crate) fn normalized_tokens(sentence: &str) -> Vec<String> {
    let cleaned: String = sentence
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    cleaned.split_whitespace().map(str::to_owned).collect()
}

/// Collapses every run of whitespace into a single ASCII space and trims the ends.
pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_are_lowercased_and_unpunctuated() {
        assert_eq!(
            normalized_tokens("The red fox, ran!  (Fast)"),
            vec!["the", "red", "fox", "ran", "fast"]
        );
        assert!(normalized_tokens("... !!").is_empty());
    }

    #[test]
    fn whitespace_collapse() {
        assert_eq!(collapse_whitespace("  a \n\t b  c "), "a b c");
    }
}
