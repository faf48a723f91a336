use std::collections::BTreeSet;

use proptest::prelude::*;

use exemplar_core::eval::{corpus_bleu, sentence_bleu};
use exemplar_core::parser::{
    erase_sbt_values, is_well_formed, parse_method, sbt, sbt_ao, tokenize_source, AstNode, NodeKind,
};
use exemplar_core::retrieval::Index;

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9_]{0,6}".prop_filter("keyword", |s| {
        !matches!(
            s.as_str(),
            "do" | "if"
                | "for"
                | "int"
                | "new"
                | "try"
                | "case"
                | "char"
                | "else"
                | "enum"
                | "goto"
                | "long"
                | "this"
                | "void"
                | "byte"
                | "null"
                | "true"
                | "false"
                | "break"
                | "catch"
                | "class"
                | "const"
                | "final"
                | "float"
                | "short"
                | "super"
                | "throw"
                | "while"
                | "double"
                | "import"
                | "native"
                | "public"
                | "return"
                | "static"
                | "switch"
                | "throws"
                | "boolean"
                | "default"
                | "extends"
                | "finally"
                | "package"
                | "private"
                | "abstract"
                | "continue"
                | "strictfp"
                | "volatile"
                | "interface"
                | "protected"
                | "transient"
                | "implements"
                | "instanceof"
                | "synchronized"
                | "assert"
                | "var"
                | "record"
                | "yield"
        )
    })
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        ident(),
        (0u32..1000).prop_map(|n| n.to_string()),
        "[a-z ]{0,5}".prop_map(|s| format!("\"{s}\"")),
        Just("true".to_string()),
        Just("null".to_string()),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop_oneof![Just("+"), Just("*"), Just("<"), Just("=="), Just("&&")], inner.clone())
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
            (ident(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(f, args)| format!("{f}({})", args.join(", "))),
            (inner.clone(), ident()).prop_map(|(a, f)| format!("{a}.{f}")),
            inner.prop_map(|a| format!("({a})")),
        ]
    })
}

fn statement() -> impl Strategy<Value = String> {
    let simple = prop_oneof![
        (ident(), expr()).prop_map(|(v, e)| format!("int {v} = {e};")),
        (ident(), expr()).prop_map(|(v, e)| format!("{v} = {e};")),
        expr().prop_map(|e| format!("return {e};")),
        (ident(), prop::collection::vec(expr(), 0..3)).prop_map(|(f, a)| format!("{f}({});", a.join(", "))),
        (ident(), ident()).prop_map(|(a, b)| format!("switch ({a}) {{ case 1: {b}(); }}")),
    ];
    simple.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            (expr(), inner.clone()).prop_map(|(c, s)| format!("if ({c}) {{ {s} }}")),
            (expr(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| format!("if ({c}) {a} else {{ {b} }}")),
            (expr(), inner.clone()).prop_map(|(c, s)| format!("while ({c}) {{ {s} }}")),
            (ident(), ident(), inner.clone()).prop_map(|(v, xs, s)| format!("for (String {v} : {xs}) {{ {s} }}")),
            (ident(), inner).prop_map(|(v, s)| format!("for (int {v} = 0; {v} < 3; {v}++) {s}")),
        ]
    })
}

fn method() -> impl Strategy<Value = String> {
    (
        prop_oneof![Just("public "), Just(""), Just("private static ")],
        prop_oneof![Just("void"), Just("int"), Just("List<String>")],
        ident(),
        prop::collection::vec(ident(), 0..3),
        prop::collection::vec(statement(), 0..5),
    )
        .prop_map(|(mods, ret, name, params, body)| {
            let params: Vec<String> = params.iter().map(|p| format!("int {p}")).collect();
            format!("{mods}{ret} {name}({}) {{ {} }}", params.join(", "), body.join(" "))
        })
}

fn content_tokens(source: &str) -> Vec<String> {
    let mut out: Vec<String> =
        tokenize_source(source).unwrap().into_iter().filter(|t| t.is_content()).map(|t| t.text).collect();
    out.sort();
    out
}

/// Node values, with type names split into their identifiers.
fn leaf_values(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    ast.walk(&mut |n| match (&n.value, n.kind) {
        (Some(v), NodeKind::Type | NodeKind::TypeParameters) => out.extend(
            v.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$'))
                .filter(|p| !p.is_empty())
                .map(String::from),
        ),
        (Some(v), _) => out.push(v.clone()),
        _ => {}
    });
    out
}

/// Multiset inclusion of sorted slices.
fn contains_all(haystack: &[String], needles: &[String]) -> bool {
    let mut it = haystack.iter();
    needles.iter().all(|n| it.by_ref().any(|h| h == n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parsing_keeps_every_content_token(src in method()) {
        let ast = parse_method(&src).unwrap();
        let mut values = leaf_values(&ast);
        values.sort();
        let content = content_tokens(&src);
        prop_assert!(contains_all(&values, &content), "{src}\ncontent {content:?}\nvalues {values:?}");
    }

    #[test]
    fn traversals_of_parsed_methods(src in method()) {
        let ast = parse_method(&src).unwrap();
        let full = sbt(&ast);
        prop_assert_eq!(full.len(), 4 * ast.node_count());
        prop_assert!(is_well_formed(&full));
        let erased = sbt_ao(&ast);
        prop_assert_eq!(erase_sbt_values(&full), erased.clone());
        prop_assert!(is_well_formed(&erased));
        prop_assert_eq!(sbt_ao(&parse_method(&src).unwrap()), erased);
    }

    #[test]
    fn retrieval_matches_pointwise_scores(
        docs in prop::collection::vec(prop::collection::vec(0u8..12, 0..10), 1..30),
        query in prop::collection::vec(0u8..15, 0..6),
        k in 0usize..35,
        exclude in prop::option::of(0u64..30),
    ) {
        let docs: Vec<(u64, Vec<String>)> = docs
            .into_iter()
            .enumerate()
            .map(|(i, d)| ((i as u64 * 37) % 101, d.iter().map(|t| format!("t{t}")).collect()))
            .collect();
        let query: Vec<String> = query.iter().map(|t| format!("t{t}")).collect();
        let index = Index::build(docs.iter().map(|(id, t)| (*id, t.as_slice()))).unwrap();
        let excluded = exclude.map(|e| docs[e as usize % docs.len()].0);
        let hits = index.retrieve(&query, k, excluded);

        let eligible = docs.len() - usize::from(excluded.is_some());
        prop_assert_eq!(hits.len(), k.min(eligible));
        let ids: BTreeSet<u64> = hits.iter().map(|h| h.doc_id).collect();
        prop_assert_eq!(ids.len(), hits.len());
        prop_assert!(excluded.map_or(true, |e| !ids.contains(&e)));
        for h in &hits {
            prop_assert_eq!(h.score, index.bm25_score(&query, h.doc_id).unwrap());
        }
        for pair in hits.windows(2) {
            prop_assert!(pair[0].score > pair[1].score || (pair[0].score == pair[1].score && pair[0].doc_id < pair[1].doc_id));
        }
        // nothing left out scores above the last hit
        if let Some(last) = hits.last() {
            for (id, _) in &docs {
                if !ids.contains(id) && Some(*id) != excluded {
                    let s = index.bm25_score(&query, *id).unwrap();
                    prop_assert!(s < last.score || (s == last.score && *id > last.doc_id));
                }
            }
        }
    }

    #[test]
    fn bleu_is_bounded_and_full_on_identity(
        refs in prop::collection::vec(prop::collection::vec(0u8..6, 4..12), 1..6),
        hyps in prop::collection::vec(prop::collection::vec(0u8..6, 0..12), 1..6),
    ) {
        let n = refs.len().min(hyps.len());
        let words = |v: &Vec<u8>| v.iter().map(|t| format!("w{t}")).collect::<Vec<String>>();
        let refs: Vec<Vec<String>> = refs[..n].iter().map(words).collect();
        let hyps: Vec<Vec<String>> = hyps[..n].iter().map(words).collect();
        let score = corpus_bleu(&hyps, &refs, 4).unwrap().bleu;
        prop_assert!((0.0..=100.0).contains(&score));
        prop_assert_eq!(corpus_bleu(&refs, &refs, 4).unwrap().bleu, 100.0);
        for (h, r) in hyps.iter().zip(&refs) {
            let s = sentence_bleu(h, r);
            prop_assert!((0.0..=100.0 + 1e-9).contains(&s), "{}", s);
        }
    }
}
