use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    MethodDeclaration,
    Modifier,
    TypeParameters,
    Type,
    Name,
    Parameter,
    Throws,
    Block,
    LocalVariable,
    ExpressionStatement,
    If,
    While,
    For,
    ForEach,
    Return,
    Call,
    FieldAccess,
    ArrayAccess,
    New,
    Assign,
    BinaryExpr,
    UnaryExpr,
    Conditional,
    Operator,
    Literal,
    GenericStatement,
    Token,
}

impl NodeKind {
    pub const ALL: [NodeKind; 27] = [
        Self::MethodDeclaration,
        Self::Modifier,
        Self::TypeParameters,
        Self::Type,
        Self::Name,
        Self::Parameter,
        Self::Throws,
        Self::Block,
        Self::LocalVariable,
        Self::ExpressionStatement,
        Self::If,
        Self::While,
        Self::For,
        Self::ForEach,
        Self::Return,
        Self::Call,
        Self::FieldAccess,
        Self::ArrayAccess,
        Self::New,
        Self::Assign,
        Self::BinaryExpr,
        Self::UnaryExpr,
        Self::Conditional,
        Self::Operator,
        Self::Literal,
        Self::GenericStatement,
        Self::Token,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::MethodDeclaration => "MethodDeclaration",
            Self::Modifier => "Modifier",
            Self::TypeParameters => "TypeParameters",
            Self::Type => "Type",
            Self::Name => "Name",
            Self::Parameter => "Parameter",
            Self::Throws => "Throws",
            Self::Block => "Block",
            Self::LocalVariable => "LocalVariable",
            Self::ExpressionStatement => "ExpressionStatement",
            Self::If => "If",
            Self::While => "While",
            Self::For => "For",
            Self::ForEach => "ForEach",
            Self::Return => "Return",
            Self::Call => "Call",
            Self::FieldAccess => "FieldAccess",
            Self::ArrayAccess => "ArrayAccess",
            Self::New => "New",
            Self::Assign => "Assign",
            Self::BinaryExpr => "BinaryExpr",
            Self::UnaryExpr => "UnaryExpr",
            Self::Conditional => "Conditional",
            Self::Operator => "Operator",
            Self::Literal => "Literal",
            Self::GenericStatement => "GenericStatement",
            Self::Token => "Token",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub kind: NodeKind,
    pub value: Option<String>,
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(kind: NodeKind, children: Vec<AstNode>) -> Self {
        Self { kind, value: None, children }
    }

    pub fn leaf(kind: NodeKind, value: impl Into<String>) -> Self {
        Self { kind, value: Some(value.into()), children: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AstNode::node_count).sum::<usize>()
    }

    /// Pre-order visit.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a AstNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Values of every valued node, in pre-order.
    pub fn values(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let Some(v) = &n.value {
                out.push(v.as_str());
            }
        });
        out
    }
}

/// Compact bracketed rendering, e.g. `MethodDeclaration[Type(void), Name(f), Block[]]`.
impl fmt::Display for AstNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(v) = &self.value {
            write!(f, "({v})")?;
        }
        if !self.children.is_empty() || self.value.is_none() {
            f.write_str("[")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}
