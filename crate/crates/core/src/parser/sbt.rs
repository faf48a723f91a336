//! Structure-based traversal: a bracketed pre/post-order linearization in
//! which every node contributes `(`, its label, its children, `)`, its label.

use super::ast::AstNode;

/// Placeholder that replaces every token value in the value-erased view.
pub const OTHER: &str = "<OTHER>";

pub fn label(node: &AstNode) -> String {
    match &node.value {
        Some(v) => format!("{}_{}", node.kind.name(), v),
        None => node.kind.name().to_string(),
    }
}

fn erased_label(node: &AstNode) -> String {
    match node.value {
        Some(_) => format!("{}_{}", node.kind.name(), OTHER),
        None => node.kind.name().to_string(),
    }
}

fn traverse(node: &AstNode, label_of: &impl Fn(&AstNode) -> String, out: &mut Vec<String>) {
    let l = label_of(node);
    out.push("(".to_string());
    out.push(l.clone());
    for child in &node.children {
        traverse(child, label_of, out);
    }
    out.push(")".to_string());
    out.push(l);
}

/// Full traversal with typed-value labels such as `Name_x`.
pub fn sbt(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::with_capacity(4 * ast.node_count());
    traverse(ast, &label, &mut out);
    out
}

/// Traversal with every value replaced by [`OTHER`]; only structure remains.
pub fn sbt_ao(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::with_capacity(4 * ast.node_count());
    traverse(ast, &erased_label, &mut out);
    out
}

/// Derives the value-erased view from an existing traversal. Category names
/// never contain `_`, so everything after the first `_` is the value.
pub fn erase_sbt_values<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            let t = t.as_ref();
            match t.split_once('_') {
                Some((category, _)) => format!("{category}_{OTHER}"),
                None => t.to_string(),
            }
        })
        .collect()
}

/// Checks bracket balance and that every `)` is followed by the label that
/// followed its matching `(`.
pub fn is_well_formed<S: AsRef<str>>(tokens: &[S]) -> bool {
    let mut stack: Vec<&str> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let Some(lbl) = tokens.get(i + 1).map(AsRef::as_ref) else {
            return false;
        };
        match tokens[i].as_ref() {
            "(" => stack.push(lbl),
            ")" => {
                if stack.pop() != Some(lbl) {
                    return false;
                }
            }
            _ => return false,
        }
        i += 2;
    }
    stack.is_empty()
}

#[cfg(test)]
mod tests {
    use super::super::ast::NodeKind;
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn single_leaf() {
        let leaf = AstNode::leaf(NodeKind::Name, "x");
        assert_eq!(sbt(&leaf), s(&["(", "Name_x", ")", "Name_x"]));
        assert_eq!(sbt_ao(&leaf), s(&["(", "Name_<OTHER>", ")", "Name_<OTHER>"]));
    }

    #[test]
    fn parent_with_two_children() {
        let tree = AstNode::new(
            NodeKind::Block,
            vec![AstNode::leaf(NodeKind::Name, "x"), AstNode::new(NodeKind::Return, vec![])],
        );
        assert_eq!(
            sbt(&tree),
            s(&["(", "Block", "(", "Name_x", ")", "Name_x", "(", "Return", ")", "Return", ")", "Block"])
        );
        assert!(is_well_formed(&sbt(&tree)));
    }

    #[test]
    fn valueless_label_unchanged() {
        let tree = AstNode::new(NodeKind::Block, vec![]);
        assert_eq!(sbt_ao(&tree), sbt(&tree));
    }

    #[test]
    fn erasure_ignores_values() {
        let a = AstNode::new(NodeKind::Block, vec![AstNode::leaf(NodeKind::Name, "x")]);
        let b = AstNode::new(NodeKind::Block, vec![AstNode::leaf(NodeKind::Name, "y_z")]);
        assert_ne!(sbt(&a), sbt(&b));
        assert_eq!(sbt_ao(&a), sbt_ao(&b));
        assert_eq!(erase_sbt_values(&sbt(&b)), sbt_ao(&b));
    }

    #[test]
    fn malformed_sequences() {
        assert!(!is_well_formed(&s(&["(", "A", ")", "B"])));
        assert!(!is_well_formed(&s(&["(", "A"])));
        assert!(!is_well_formed(&s(&["(", "A", "(", "B", ")", "B"])));
        assert!(is_well_formed::<String>(&[]));
    }
}
