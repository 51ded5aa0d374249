//! Part-of-speech tags (Penn Treebank tagset), one per word or number token.
//!
//! The embedded tagger is a small deterministic lexicon + suffix tagger. It is
//! a stand-in for a statistical tagger: closed-class words come from the
//! lexicon, and open-class words are guessed from capitalization and suffix.
//! For fidelity, tag the corpus with an external tagger and use
//! [`PosProvider::Precomputed`].
//!
//! Rules, applied in order to each word or number token:
//!
//! 1. numbers are `CD`;
//! 2. lexicon hits (case-insensitive) take the lexicon tag;
//! 3. capitalized words that do not start a sentence are `NNP`;
//! 4. the first matching entry of [`SUFFIX_RULES`] (the remaining stem must
//!    keep at least two characters);
//! 5. anything else is `NN`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_words, TokenKind};
use crate::corpus::Document;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosProvider {
    #[default]
    Embedded,
    Precomputed,
}

/// Ordered suffix table for words not in the lexicon.
pub const SUFFIX_RULES: &[(&str, &str)] = &[
    ("ly", "RB"),
    ("ing", "VBG"),
    ("ed", "VBD"),
    ("tion", "NN"),
    ("sion", "NN"),
    ("ment", "NN"),
    ("ness", "NN"),
    ("ity", "NN"),
    ("ship", "NN"),
    ("ance", "NN"),
    ("ence", "NN"),
    ("ism", "NN"),
    ("ist", "NN"),
    ("ous", "JJ"),
    ("ful", "JJ"),
    ("able", "JJ"),
    ("ible", "JJ"),
    ("ive", "JJ"),
    ("less", "JJ"),
    ("ical", "JJ"),
    ("ic", "JJ"),
    ("al", "JJ"),
    ("ish", "JJ"),
    ("est", "JJS"),
    ("ize", "VB"),
    ("ise", "VB"),
    ("ss", "NN"),
    ("s", "NNS"),
];

fn lexicon(word: &str) -> Option<&'static str> {
    let tag = match word {
        "the" | "a" | "an" | "this" | "that" | "these" | "those" | "every" | "each" | "no"
        | "some" | "any" | "another" | "either" | "neither" | "all" | "both" => "DT",
        "of" | "in" | "on" | "at" | "by" | "for" | "with" | "from" | "into" | "onto" | "about"
        | "above" | "below" | "after" | "before" | "under" | "over" | "between" | "among"
        | "through" | "during" | "without" | "within" | "against" | "across" | "behind"
        | "beyond" | "since" | "until" | "upon" | "toward" | "towards" | "via" | "per"
        | "despite" | "because" | "although" | "though" | "while" | "whether" | "if" | "than"
        | "unless" | "whereas" | "as" | "like" | "near" | "along" | "around" | "inside"
        | "outside" | "beside" | "besides" | "throughout" => "IN",
        "to" => "TO",
        "and" | "or" | "but" | "nor" | "yet" | "plus" => "CC",
        "i" | "you" | "he" | "she" | "it" | "we" | "they" | "me" | "him" | "us" | "them"
        | "myself" | "yourself" | "himself" | "herself" | "itself" | "ourselves" | "themselves"
        | "yourselves" | "one" => "PRP",
        "my" | "your" | "his" | "her" | "its" | "our" | "their" => "PRP$",
        "mine" | "yours" | "hers" | "ours" | "theirs" => "PRP",
        "can" | "could" | "may" | "might" | "must" | "shall" | "should" | "will" | "would"
        | "can't" | "cannot" | "won't" | "wouldn't" | "couldn't" | "shouldn't" | "mustn't"
        | "shan't" => "MD",
        "be" => "VB",
        "is" | "has" | "does" | "isn't" | "hasn't" | "doesn't" | "it's" | "he's" | "she's"
        | "that's" | "there's" => "VBZ",
        "are" | "am" | "have" | "do" | "aren't" | "haven't" | "don't" | "i'm" | "we're"
        | "they're" | "you're" => "VBP",
        "was" | "were" | "had" | "did" | "wasn't" | "weren't" | "hadn't" | "didn't" | "said" => {
            "VBD"
        }
        "been" | "done" | "made" | "gone" | "known" | "seen" | "taken" | "given" => "VBN",
        "being" => "VBG",
        "not" | "very" | "also" | "too" | "so" | "just" | "only" | "even" | "still" | "never"
        | "always" | "often" | "now" | "then" | "here" | "again" | "already" | "however"
        | "perhaps" | "almost" | "quite" | "rather" | "soon" | "ever" | "once" | "sometimes"
        | "instead" | "away" | "back" | "thus" | "therefore" | "indeed" => "RB",
        "there" => "EX",
        "which" | "whatever" | "whichever" => "WDT",
        "who" | "whom" | "what" | "whoever" => "WP",
        "whose" => "WP$",
        "when" | "where" | "why" | "how" | "whenever" | "wherever" => "WRB",
        "more" | "less" | "better" | "worse" => "JJR",
        "most" | "least" | "best" | "worst" => "JJS",
        "many" | "much" | "few" | "several" | "other" | "such" | "own" | "same" | "good"
        | "new" | "old" | "great" | "little" | "big" | "small" | "high" | "low" | "long"
        | "young" | "last" | "first" | "next" => "JJ",
        "up" | "out" | "off" | "down" => "RP",
        "oh" | "yes" | "well" => "UH",
        "people" | "government" | "time" | "year" | "years" | "way" | "day" | "man" | "woman"
        | "world" | "life" | "work" | "part" | "week" | "case" | "point" | "home" => "NN",
        _ => return None,
    };
    Some(tag)
}

fn suffix_tag(lower: &str) -> Option<&'static str> {
    let chars = lower.chars().count();
    SUFFIX_RULES.iter().find_map(|&(suffix, tag)| {
        (lower.ends_with(suffix) && chars >= suffix.chars().count() + 2).then_some(tag)
    })
}

/// Tags every word and number token of `text` with the embedded tagger.
pub fn tag_embedded(text: &str) -> Vec<String> {
    let stream = tokenize_words(text);
    let mut tags = Vec::new();
    let mut sentence_start = true;
    for token in stream.iter() {
        match token.kind {
            TokenKind::Number => {
                tags.push("CD".to_string());
                sentence_start = false;
            }
            TokenKind::Word => {
                let lower = token.text.to_lowercase();
                let capitalized = token.text.chars().next().is_some_and(char::is_uppercase);
                let tag = lexicon(&lower)
                    .or_else(|| (capitalized && !sentence_start).then_some("NNP"))
                    .or_else(|| suffix_tag(&lower))
                    .unwrap_or("NN");
                tags.push(tag.to_string());
                sentence_start = false;
            }
            TokenKind::Punctuation if matches!(token.text, "." | "!" | "?") => {
                sentence_start = true
            }
            _ => {}
        }
    }
    tags
}

/// POS tags for `doc`, one per word or number token.
pub fn pos_tags(doc: &Document, provider: PosProvider) -> Result<Vec<String>> {
    match provider {
        PosProvider::Embedded => Ok(tag_embedded(&doc.text)),
        PosProvider::Precomputed => {
            let tags = doc
                .pos_tags
                .as_ref()
                .ok_or_else(|| Error::MissingPosTags(doc.id.clone()))?;
            let tokens = tokenize_words(&doc.text).lexical_count();
            if tags.len() != tokens {
                return Err(Error::PosMisaligned {
                    id: doc.id.clone(),
                    tags: tags.len(),
                    tokens,
                });
            }
            Ok(tags.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn doc(text: &str, tags: Option<Vec<&str>>) -> Document {
        Document {
            id: "d1".into(),
            author: "a".into(),
            topic: "t".into(),
            text: text.into(),
            pos_tags: tags.map(|t| t.into_iter().map(String::from).collect()),
        }
    }

    #[test]
    fn precomputed_passthrough() {
        let d = doc("the cat", Some(vec!["DT", "NN"]));
        assert_eq!(
            pos_tags(&d, PosProvider::Precomputed).unwrap(),
            ["DT", "NN"]
        );
    }

    #[test]
    fn precomputed_errors() {
        let d = doc("the cat", None);
        assert_eq!(
            pos_tags(&d, PosProvider::Precomputed),
            Err(Error::MissingPosTags("d1".into()))
        );
        let d = doc("the cat sat", Some(vec!["DT", "NN"]));
        assert!(matches!(
            pos_tags(&d, PosProvider::Precomputed),
            Err(Error::PosMisaligned {
                tags: 2,
                tokens: 3,
                ..
            })
        ));
    }

    #[test]
    fn lexicon_hit() {
        assert_eq!(tag_embedded("the"), ["DT"]);
        assert_eq!(tag_embedded("The"), ["DT"]);
    }

    #[test]
    fn ly_suffix_is_adverb() {
        // "ly" is the first rule in the table, so any unseen -ly word is RB.
        assert_eq!(SUFFIX_RULES[0], ("ly", "RB"));
        assert_eq!(tag_embedded("blorply"), ["RB"]);
        assert_eq!(tag_embedded("quickly"), ["RB"]);
    }

    #[test]
    fn rule_order() {
        assert_eq!(
            tag_embedded("She visited Alice in 2019."),
            ["PRP", "VBD", "NNP", "IN", "CD"]
        );
        // Sentence-initial capitals fall through to the suffix rules.
        assert_eq!(tag_embedded("Running fast."), ["VBG", "NN"]);
        assert_eq!(tag_embedded("cats"), ["NNS"]);
        assert_eq!(tag_embedded("glass"), ["NN"]);
        // The stem must keep two characters, so "xs" is not a plural.
        assert_eq!(tag_embedded("xs"), ["NN"]);
    }

    #[test]
    fn one_tag_per_lexical_token() {
        let text = "Well, 3 dogs don't bark -- they sing!";
        assert_eq!(
            tag_embedded(text).len(),
            tokenize_words(text).lexical_count()
        );
    }
}
