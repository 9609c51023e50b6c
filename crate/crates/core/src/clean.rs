//! Cell-text cleaning: reduces wikitext or HTML fragments to plain text so
//! that keyword matching and TSV output see no markup.

use regex::Regex;
use std::sync::LazyLock;

static REF_PAIR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)<ref[^>/]*>.*?</ref\s*>").unwrap());
static REF_SELF: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?is)<ref[^>]*/\s*>").unwrap());
static BREAKING_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)<br\s*/?>|</(?:td|th|tr|p|li|div)\s*>").unwrap());
static ANY_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<[^<>]+>").unwrap());
static TEMPLATE_INNER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\{\{([^{}]*)\}\}").unwrap());
static LINK_INNER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\[([^\[\]]*)\]\]").unwrap());
static EXTERNAL_LINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[(?:https?|ftp)://[^\s\]]*\s*([^\]]*)\]").unwrap());
static FOOTNOTE_MARK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\d+\]").unwrap());
static QUOTE_RUN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"'{2,}").unwrap());
static ENTITY_DEC: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"&#(\d+);").unwrap());
static ENTITY_HEX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&#[xX]([0-9a-fA-F]+);").unwrap());

/// Reduces a `[[target|label]]` / `[[target]]` body to its display text.
/// `File:`/`Image:`/`Category:` links carry no cell content and vanish.
fn link_text(inner: &str) -> String {
    let target = inner.split('|').next().unwrap_or("").trim();
    let lowered = target.to_ascii_lowercase();
    if lowered.starts_with("file:") || lowered.starts_with("image:") || lowered.starts_with("category:")
    {
        return String::new();
    }
    inner.rsplit('|').next().unwrap_or("").trim().to_string()
}

/// Reduces a `{{name|args...}}` body to its last positional argument, the
/// dominant pattern for `{{IPA|...}}`-style wrapper templates. Named
/// (`key=value`) arguments are skipped; argument-free templates vanish.
fn template_text(inner: &str) -> String {
    inner
        .split('|')
        .skip(1)
        .filter(|arg| !arg.contains('='))
        .last()
        .map(|arg| arg.trim().to_string())
        .unwrap_or_default()
}

fn decode_entities(text: &str) -> String {
    let text = ENTITY_DEC.replace_all(text, |caps: &regex::Captures| {
        caps[1]
            .parse::<u32>()
            .ok()
            .and_then(char::from_u32)
            .map(String::from)
            .unwrap_or_default()
    });
    let text = ENTITY_HEX.replace_all(&text, |caps: &regex::Captures| {
        u32::from_str_radix(&caps[1], 16)
            .ok()
            .and_then(char::from_u32)
            .map(String::from)
            .unwrap_or_default()
    });
    text.replace("&nbsp;", " ")
        .replace("&ndash;", "\u{2013}")
        .replace("&mdash;", "\u{2014}")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

/// Cleans a raw wikitext or HTML cell fragment down to plain text.
///
/// Reference markers and HTML tags are removed, templates reduce to their
/// last positional argument, wiki links to their label, entities are decoded,
/// and all whitespace (tabs and newlines included) collapses to single
/// spaces. Unterminated `[[`/`{{` fragments lose their delimiters but keep
/// their content.
pub fn clean_cell_text(raw_text: &str) -> String {
    let mut text = REF_PAIR.replace_all(raw_text, " ").into_owned();
    text = REF_SELF.replace_all(&text, " ").into_owned();
    text = BREAKING_TAG.replace_all(&text, " ").into_owned();
    text = ANY_TAG.replace_all(&text, "").into_owned();

    // Innermost-out reduction; templates and links may nest in each other.
    loop {
        let mut changed = false;
        let reduced = TEMPLATE_INNER.replace_all(&text, |caps: &regex::Captures| {
            changed = true;
            template_text(&caps[1])
        });
        let reduced = LINK_INNER.replace_all(&reduced, |caps: &regex::Captures| {
            changed = true;
            link_text(&caps[1])
        });
        let reduced = reduced.into_owned();
        if !changed {
            text = reduced;
            break;
        }
        text = reduced;
    }
    text = EXTERNAL_LINK.replace_all(&text, "$1").into_owned();

    text = decode_entities(&text);
    text = QUOTE_RUN.replace_all(&text, "").into_owned();
    text = FOOTNOTE_MARK.replace_all(&text, "").into_owned();

    // Stray delimiters from unbalanced markup.
    for stray in ["[[", "]]", "{{", "}}"] {
        text = text.replace(stray, "");
    }

    text.replace(['\t', '\n', '\r', '\u{a0}'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_text_is_identity() {
        assert_eq!(clean_cell_text("plain"), "plain");
    }

    #[test]
    fn link_reduces_to_label() {
        assert_eq!(
            clean_cell_text("[[International Phonetic Alphabet|IPA]]"),
            "IPA"
        );
        assert_eq!(clean_cell_text("[[Bilabial consonant]]"), "Bilabial consonant");
    }

    #[test]
    fn template_reduces_to_last_positional_argument() {
        assert_eq!(clean_cell_text("{{IPA|/b/}}"), "/b/");
        assert_eq!(clean_cell_text("{{IPAslink| band|/b/}}"), "/b/");
        assert_eq!(clean_cell_text("{{IPA|/b/|audio=b.ogg}}"), "/b/");
        assert_eq!(clean_cell_text("{{clear}}"), "");
    }

    #[test]
    fn nested_template_in_link() {
        assert_eq!(clean_cell_text("[[x|{{IPA|/m/}}]]"), "/m/");
    }

    #[test]
    fn references_and_tags_removed() {
        assert_eq!(clean_cell_text("b<ref>see grammar</ref>"), "b");
        assert_eq!(clean_cell_text("b<ref name=\"x\" />"), "b");
        assert_eq!(clean_cell_text("a<br>b"), "a b");
        assert_eq!(clean_cell_text("<small>rare</small>"), "rare");
    }

    #[test]
    fn entities_decoded() {
        assert_eq!(clean_cell_text("a&amp;b"), "a&b");
        assert_eq!(clean_cell_text("&#601;"), "\u{259}");
        assert_eq!(clean_cell_text("&#x259;"), "\u{259}");
        assert_eq!(clean_cell_text("a&nbsp;b"), "a b");
    }

    #[test]
    fn whitespace_collapses() {
        assert_eq!(clean_cell_text("  a \t b\nc  "), "a b c");
    }

    #[test]
    fn bold_italic_markup_stripped() {
        assert_eq!(clean_cell_text("'''B''' and ''i''"), "B and i");
    }

    #[test]
    fn unbalanced_delimiters_stripped() {
        assert_eq!(clean_cell_text("[[broken"), "broken");
        assert_eq!(clean_cell_text("{{broken"), "broken");
    }

    #[test]
    fn file_links_vanish() {
        assert_eq!(clean_cell_text("[[File:x.png|thumb|pic]] m"), "m");
    }

    #[test]
    fn footnote_markers_removed() {
        assert_eq!(clean_cell_text("m[1]"), "m");
    }

    #[test]
    fn external_link_keeps_label() {
        assert_eq!(clean_cell_text("[https://example.org chart]"), "chart");
    }
}
