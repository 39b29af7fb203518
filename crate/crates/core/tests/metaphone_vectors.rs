mod common;

use common::criteria;
use gunrock_core::phonetic::encode_double_metaphone;

#[test]
fn agrees_with_reference_vectors() {
    if let Err(e) = criteria::check_metaphone() {
        panic!("{e}");
    }
}

#[test]
fn vectors_cover_the_tricky_branches() {
    let words: Vec<String> = criteria::metaphone_vectors().into_iter().map(|v| v.0).collect();
    for w in ["caesar", "chianti", "thumb", "tagliaro", "wright", "xavier", "jose", "schmidt"] {
        assert!(words.iter().any(|x| x == w), "vector file lacks {w}");
    }
}

#[test]
fn encoding_is_case_insensitive_for_vectors() {
    for (word, primary, _) in criteria::metaphone_vectors().into_iter().take(50) {
        assert_eq!(encode_double_metaphone(&word.to_uppercase()).unwrap().primary, primary, "{word}");
    }
}
