//! Error-tolerant recursive-descent parser for single Java methods.
//!
//! Headers, blocks, `if`/`else`, `while`, `for` (classic and enhanced),
//! `return`, local declarations and expression statements are parsed into
//! typed nodes. Any statement outside that subset, or one that fails to
//! parse, becomes a `GenericStatement` whose children are `Token` leaves,
//! one per source token, so no content is lost.

use thiserror::Error;

use super::ast::{AstNode, NodeKind};
use super::lexer::{tokenize_source, LexError, Token, TokenKind};

/// Nesting beyond this falls back to flat token statements.
const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("unbalanced `{found}` at offset {offset}")]
    Unbalanced { found: char, offset: usize },
    #[error("malformed method header at offset {offset}: {reason}")]
    Header { offset: usize, reason: &'static str },
    #[error("unexpected input after method body at offset {offset}")]
    TrailingInput { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            Self::Lex(e) => e.offset(),
            Self::Unbalanced { offset, .. } | Self::Header { offset, .. } | Self::TrailingInput { offset } => *offset,
        }
    }
}

/// Parses one method declaration.
pub fn parse_method(source: &str) -> Result<AstNode, ParseError> {
    let tokens = tokenize_source(source)?;
    check_balance(&tokens)?;
    let mut p = Parser { tokens: &tokens, pos: 0, depth: 0, end_offset: source.len() };
    let method = p.method()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::TrailingInput { offset: t.offset });
    }
    Ok(method)
}

fn check_balance(tokens: &[Token]) -> Result<(), ParseError> {
    let mut stack: Vec<(char, usize)> = Vec::new();
    for t in tokens.iter().filter(|t| t.kind == TokenKind::Punct) {
        let c = t.text.chars().next().unwrap_or(' ');
        match c {
            '(' | '{' | '[' => stack.push((c, t.offset)),
            ')' | '}' | ']' => {
                let want = match c {
                    ')' => '(',
                    '}' => '{',
                    _ => '[',
                };
                match stack.pop() {
                    Some((open, _)) if open == want => {}
                    _ => return Err(ParseError::Unbalanced { found: c, offset: t.offset }),
                }
            }
            _ => {}
        }
    }
    match stack.pop() {
        Some((open, offset)) => Err(ParseError::Unbalanced { found: open, offset }),
        None => Ok(()),
    }
}

/// Marker for a failed speculative parse; the caller rewinds.
struct Backtrack;

type PResult<T> = Result<T, Backtrack>;

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "strictfp",
    "default",
    "transient",
    "volatile",
];

const PRIMITIVES: &[&str] = &["void", "boolean", "byte", "char", "short", "int", "long", "float", "double"];

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    depth: usize,
    end_offset: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + k)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(Backtrack)
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end_offset, |t| t.offset)
    }

    fn ident(&mut self) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(Backtrack),
        }
    }

    /// Runs `f`, rewinding the cursor if it backtracks.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let saved = self.pos;
        let saved_depth = self.depth;
        match f(self) {
            Ok(v) => Some(v),
            Err(Backtrack) => {
                self.pos = saved;
                self.depth = saved_depth;
                None
            }
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(Backtrack)
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- header -------------------------------------------------------

    fn method(&mut self) -> Result<AstNode, ParseError> {
        let header_err = |p: &Self, reason| ParseError::Header { offset: p.offset(), reason };
        let mut children = self.modifiers();
        if self.at("<") {
            let tp = self
                .attempt(|p| p.type_arguments().map(|s| AstNode::leaf(NodeKind::TypeParameters, s)))
                .ok_or_else(|| header_err(self, "bad type parameters"))?;
            children.push(tp);
        }
        // Constructors have no return type.
        let is_ctor =
            self.peek().is_some_and(|t| t.kind == TokenKind::Ident) && self.peek_at(1).is_some_and(|t| t.is("("));
        if !is_ctor {
            let ty = self.attempt(Self::type_node).ok_or_else(|| header_err(self, "expected return type"))?;
            children.push(ty);
        }
        let name = self.ident().map_err(|_| header_err(self, "expected method name"))?;
        children.push(AstNode::leaf(NodeKind::Name, &name.text));

        if !self.eat("(") {
            return Err(header_err(self, "expected `(`"));
        }
        if !self.at(")") {
            loop {
                let param = self.attempt(Self::parameter).ok_or_else(|| header_err(self, "bad parameter"))?;
                children.push(param);
                if !self.eat(",") {
                    break;
                }
            }
        }
        if !self.eat(")") {
            return Err(header_err(self, "expected `)`"));
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        if self.eat("throws") {
            let mut thrown = Vec::new();
            loop {
                let ty = self.attempt(Self::type_node).ok_or_else(|| header_err(self, "bad throws clause"))?;
                thrown.push(ty);
                if !self.eat(",") {
                    break;
                }
            }
            children.push(AstNode::new(NodeKind::Throws, thrown));
        }
        if self.eat(";") {
            return Ok(AstNode::new(NodeKind::MethodDeclaration, children));
        }
        if !self.at("{") {
            return Err(header_err(self, "expected method body"));
        }
        children.push(self.block());
        Ok(AstNode::new(NodeKind::MethodDeclaration, children))
    }

    fn modifiers(&mut self) -> Vec<AstNode> {
        let mut out = Vec::new();
        loop {
            if let Some(t) = self.peek() {
                if MODIFIERS.contains(&t.text.as_str()) && t.kind == TokenKind::Keyword {
                    self.pos += 1;
                    out.push(AstNode::leaf(NodeKind::Modifier, &t.text));
                    continue;
                }
                if t.is("@") && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::Ident) {
                    if let Some(a) = self.attempt(Self::annotation) {
                        out.push(AstNode::leaf(NodeKind::Modifier, a));
                        continue;
                    }
                }
            }
            return out;
        }
    }

    fn annotation(&mut self) -> PResult<String> {
        let start = self.pos;
        self.expect("@")?;
        self.ident()?;
        while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.pos += 2;
        }
        if self.at("(") {
            self.skip_group()?;
        }
        Ok(join_tokens(&self.tokens[start..self.pos]))
    }

    /// Skips a balanced bracket group starting at the cursor.
    fn skip_group(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            let t = self.bump().ok_or(Backtrack)?;
            match t.text.as_str() {
                "(" | "{" | "[" => depth += 1,
                ")" | "}" | "]" => {
                    depth = depth.checked_sub(1).ok_or(Backtrack)?;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
    }

    fn parameter(&mut self) -> PResult<AstNode> {
        let mut children = self.modifiers();
        children.push(self.type_node()?);
        let name = self.ident()?;
        children.push(AstNode::leaf(NodeKind::Name, &name.text));
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        Ok(AstNode::new(NodeKind::Parameter, children))
    }

    // ---- types --------------------------------------------------------

    fn type_node(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.type_tokens()?;
        Ok(AstNode::leaf(NodeKind::Type, join_tokens(&self.tokens[start..self.pos])))
    }

    fn type_tokens(&mut self) -> PResult<()> {
        let first = self.peek().ok_or(Backtrack)?;
        if first.kind == TokenKind::Keyword && PRIMITIVES.contains(&first.text.as_str()) {
            self.pos += 1;
        } else {
            self.ident()?;
            if self.at("<") {
                self.type_arguments()?;
            }
            while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                self.pos += 2;
                if self.at("<") {
                    self.type_arguments()?;
                }
            }
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        self.eat("...");
        Ok(())
    }

    /// Consumes `<...>` including nested arguments; `>>` and `>>>` close
    /// several levels at once.
    fn type_arguments(&mut self) -> PResult<String> {
        let start = self.pos;
        self.expect("<")?;
        let mut depth: usize = 1;
        while depth > 0 {
            let t = self.bump().ok_or(Backtrack)?;
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth = depth.checked_sub(2).ok_or(Backtrack)?,
                ">>>" => depth = depth.checked_sub(3).ok_or(Backtrack)?,
                "," | "?" | "." | "&" | "[" | "]" | "extends" | "super" => {}
                _ if t.kind == TokenKind::Ident => {}
                _ if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) => {}
                _ => return Err(Backtrack),
            }
        }
        Ok(join_tokens(&self.tokens[start..self.pos]))
    }

    // ---- statements ---------------------------------------------------

    fn block(&mut self) -> AstNode {
        // The caller guarantees `{`; braces are balanced.
        self.pos += 1;
        let mut stmts = Vec::new();
        while let Some(t) = self.peek() {
            if t.is("}") {
                self.pos += 1;
                break;
            }
            if let Some(s) = self.statement() {
                stmts.push(s);
            }
        }
        AstNode::new(NodeKind::Block, stmts)
    }

    /// Parses one statement; `None` for a bare `;`.
    fn statement(&mut self) -> Option<AstNode> {
        if self.eat(";") {
            return None;
        }
        if let Some(s) = self.attempt(Self::typed_statement) {
            return Some(s);
        }
        Some(self.generic_statement())
    }

    fn typed_statement(&mut self) -> PResult<AstNode> {
        self.enter()?;
        let t = self.peek().ok_or(Backtrack)?;
        let node = match t.text.as_str() {
            "{" if t.kind == TokenKind::Punct => self.block(),
            "if" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = self.sub_statement()?;
                let mut children = vec![cond, then];
                if self.eat("else") {
                    children.push(self.sub_statement()?);
                }
                AstNode::new(NodeKind::If, children)
            }
            "while" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let body = self.sub_statement()?;
                AstNode::new(NodeKind::While, vec![cond, body])
            }
            "for" => {
                self.pos += 1;
                self.for_statement()?
            }
            "return" => {
                self.pos += 1;
                let mut children = Vec::new();
                if !self.at(";") {
                    children.push(self.expression()?);
                }
                self.expect(";")?;
                AstNode::new(NodeKind::Return, children)
            }
            _ => {
                if let Some(decl) = self.attempt(Self::local_variable) {
                    self.expect(";")?;
                    decl
                } else {
                    let e = self.expression()?;
                    self.expect(";")?;
                    AstNode::new(NodeKind::ExpressionStatement, vec![e])
                }
            }
        };
        self.leave();
        Ok(node)
    }

    /// Body of a compound statement; a lone `;` becomes an empty block.
    fn sub_statement(&mut self) -> PResult<AstNode> {
        if self.at("}") || self.peek().is_none() {
            return Err(Backtrack);
        }
        Ok(self.statement().unwrap_or_else(|| AstNode::new(NodeKind::Block, Vec::new())))
    }

    fn for_statement(&mut self) -> PResult<AstNode> {
        self.expect("(")?;
        if let Some(var) = self.attempt(|p| {
            let mut children = p.modifiers();
            children.push(p.type_node()?);
            let name = p.ident()?;
            children.push(AstNode::leaf(NodeKind::Name, &name.text));
            p.expect(":")?;
            Ok(AstNode::new(NodeKind::Parameter, children))
        }) {
            let iterable = self.expression()?;
            self.expect(")")?;
            let body = self.sub_statement()?;
            return Ok(AstNode::new(NodeKind::ForEach, vec![var, iterable, body]));
        }
        let mut children = Vec::new();
        if !self.at(";") {
            if let Some(decl) = self.attempt(Self::local_variable) {
                children.push(decl);
            } else {
                children.push(self.expression_list()?);
            }
        }
        self.expect(";")?;
        if !self.at(";") {
            children.push(self.expression()?);
        }
        self.expect(";")?;
        if !self.at(")") {
            children.push(self.expression_list()?);
        }
        self.expect(")")?;
        children.push(self.sub_statement()?);
        Ok(AstNode::new(NodeKind::For, children))
    }

    fn expression_list(&mut self) -> PResult<AstNode> {
        let mut exprs = vec![self.expression()?];
        while self.eat(",") {
            exprs.push(self.expression()?);
        }
        Ok(if exprs.len() == 1 {
            exprs.pop().unwrap_or_else(|| AstNode::new(NodeKind::Block, Vec::new()))
        } else {
            AstNode::new(NodeKind::ExpressionStatement, exprs)
        })
    }

    fn local_variable(&mut self) -> PResult<AstNode> {
        let mut children = self.modifiers();
        children.push(self.type_node()?);
        loop {
            let name = self.ident()?;
            children.push(AstNode::leaf(NodeKind::Name, &name.text));
            while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
            }
            if self.eat("=") {
                children.push(self.expression()?);
            }
            if !self.eat(",") {
                break;
            }
        }
        if !self.at(";") {
            return Err(Backtrack);
        }
        Ok(AstNode::new(NodeKind::LocalVariable, children))
    }

    /// Flat fallback: consumes up to and including a top-level `;`, or
    /// through a top-level `{...}` group (plus one trailing `;`), stopping
    /// before an unmatched `}`.
    fn generic_statement(&mut self) -> AstNode {
        let mut leaves = Vec::new();
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" => depth = depth.saturating_sub(1),
                    "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            leaves.push(AstNode::leaf(NodeKind::Token, &t.text));
                            if let Some(semi) = self.peek().filter(|n| n.is(";")) {
                                self.pos += 1;
                                leaves.push(AstNode::leaf(NodeKind::Token, &semi.text));
                            }
                            break;
                        }
                    }
                    ";" if depth == 0 => {
                        self.pos += 1;
                        leaves.push(AstNode::leaf(NodeKind::Token, &t.text));
                        break;
                    }
                    _ => {}
                }
            }
            self.pos += 1;
            leaves.push(AstNode::leaf(NodeKind::Token, &t.text));
        }
        AstNode::new(NodeKind::GenericStatement, leaves)
    }

    // ---- expressions --------------------------------------------------

    fn paren_expr(&mut self) -> PResult<AstNode> {
        self.expect("(")?;
        let e = self.expression()?;
        self.expect(")")?;
        Ok(e)
    }

    fn expression(&mut self) -> PResult<AstNode> {
        self.enter()?;
        let lhs = self.conditional()?;
        let node = match self.peek() {
            Some(t) if t.kind == TokenKind::Op && is_assign_op(&t.text) => {
                self.pos += 1;
                let rhs = self.expression()?;
                AstNode::new(NodeKind::Assign, vec![lhs, AstNode::leaf(NodeKind::Operator, &t.text), rhs])
            }
            _ => lhs,
        };
        self.leave();
        Ok(node)
    }

    fn conditional(&mut self) -> PResult<AstNode> {
        let cond = self.binary(0)?;
        if !self.eat("?") {
            return Ok(cond);
        }
        let then = self.expression()?;
        self.expect(":")?;
        let otherwise = self.conditional()?;
        Ok(AstNode::new(NodeKind::Conditional, vec![cond, then, otherwise]))
    }

    fn binary(&mut self, min_level: usize) -> PResult<AstNode> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            let Some(level) = binary_level(t) else { break };
            if level < min_level {
                break;
            }
            self.pos += 1;
            let rhs = if t.is("instanceof") { self.type_node()? } else { self.binary(level + 1)? };
            lhs = AstNode::new(NodeKind::BinaryExpr, vec![lhs, AstNode::leaf(NodeKind::Operator, &t.text), rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AstNode> {
        self.enter()?;
        let t = self.peek().ok_or(Backtrack)?;
        let node = if t.kind == TokenKind::Op && matches!(t.text.as_str(), "+" | "-" | "!" | "~" | "++" | "--") {
            self.pos += 1;
            let operand = self.unary()?;
            AstNode::new(NodeKind::UnaryExpr, vec![AstNode::leaf(NodeKind::Operator, &t.text), operand])
        } else {
            self.postfix()?
        };
        self.leave();
        Ok(node)
    }

    fn postfix(&mut self) -> PResult<AstNode> {
        let mut expr = self.primary()?;
        loop {
            if self.at(".") {
                self.pos += 1;
                let member = self.member_name()?;
                let name = AstNode::leaf(NodeKind::Name, &member.text);
                if self.at("(") {
                    let mut children = vec![expr, name];
                    children.extend(self.arguments()?);
                    expr = AstNode::new(NodeKind::Call, children);
                } else {
                    expr = AstNode::new(NodeKind::FieldAccess, vec![expr, name]);
                }
            } else if self.at("[") {
                self.pos += 1;
                let index = self.expression()?;
                self.expect("]")?;
                expr = AstNode::new(NodeKind::ArrayAccess, vec![expr, index]);
            } else if self.at("++") || self.at("--") {
                let op = self.bump().ok_or(Backtrack)?;
                expr = AstNode::new(NodeKind::UnaryExpr, vec![expr, AstNode::leaf(NodeKind::Operator, &op.text)]);
            } else {
                return Ok(expr);
            }
        }
    }

    fn member_name(&mut self) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident || t.is("this") || t.is("class") => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(Backtrack),
        }
    }

    fn arguments(&mut self) -> PResult<Vec<AstNode>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.expression()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        Ok(args)
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let t = self.peek().ok_or(Backtrack)?;
        match t.kind {
            TokenKind::Number | TokenKind::Str | TokenKind::Char => {
                self.pos += 1;
                Ok(AstNode::leaf(NodeKind::Literal, &t.text))
            }
            TokenKind::Keyword if super::lexer::is_literal_keyword(&t.text) => {
                self.pos += 1;
                Ok(AstNode::leaf(NodeKind::Literal, &t.text))
            }
            TokenKind::Keyword if t.is("this") || t.is("super") => {
                self.pos += 1;
                let name = AstNode::leaf(NodeKind::Name, &t.text);
                if self.at("(") {
                    let mut children = vec![name];
                    children.extend(self.arguments()?);
                    Ok(AstNode::new(NodeKind::Call, children))
                } else {
                    Ok(name)
                }
            }
            TokenKind::Keyword if t.is("new") => {
                self.pos += 1;
                self.creator()
            }
            TokenKind::Ident => {
                self.pos += 1;
                let name = AstNode::leaf(NodeKind::Name, &t.text);
                if self.at("(") {
                    let mut children = vec![name];
                    children.extend(self.arguments()?);
                    Ok(AstNode::new(NodeKind::Call, children))
                } else {
                    Ok(name)
                }
            }
            TokenKind::Punct if t.is("(") => self.paren_expr(),
            _ => Err(Backtrack),
        }
    }

    fn creator(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let first = self.peek().ok_or(Backtrack)?;
        if first.kind == TokenKind::Keyword && PRIMITIVES.contains(&first.text.as_str()) {
            self.pos += 1;
        } else {
            self.ident()?;
            while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                self.pos += 2;
            }
            if self.at("<") {
                self.type_arguments()?;
            }
        }
        let ty = AstNode::leaf(NodeKind::Type, join_tokens(&self.tokens[start..self.pos]));
        let mut children = vec![ty];
        if self.at("(") {
            children.extend(self.arguments()?);
            if self.at("{") {
                // anonymous class bodies are outside the subset
                return Err(Backtrack);
            }
        } else if self.at("[") {
            while self.eat("[") {
                if !self.at("]") {
                    children.push(self.expression()?);
                }
                self.expect("]")?;
            }
        } else {
            return Err(Backtrack);
        }
        Ok(AstNode::new(NodeKind::New, children))
    }
}

fn is_assign_op(op: &str) -> bool {
    matches!(op, "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>=")
}

fn binary_level(t: &Token) -> Option<usize> {
    if t.kind == TokenKind::Keyword {
        return t.is("instanceof").then_some(6);
    }
    if t.kind != TokenKind::Op {
        return None;
    }
    Some(match t.text.as_str() {
        "||" => 0,
        "&&" => 1,
        "|" => 2,
        "^" => 3,
        "&" => 4,
        "==" | "!=" => 5,
        "<" | ">" | "<=" | ">=" => 6,
        "<<" | ">>" | ">>>" => 7,
        "+" | "-" => 8,
        "*" | "/" | "%" => 9,
        _ => return None,
    })
}

/// Concatenates token texts, separating adjacent word-like tokens by a space
/// so the result re-tokenizes to the same sequence.
fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_word = false;
    for t in tokens {
        let word = !matches!(t.kind, TokenKind::Op | TokenKind::Punct);
        if word && prev_word {
            out.push(' ');
        }
        out.push_str(&t.text);
        prev_word = word;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> AstNode {
        parse_method(src).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    #[test]
    fn empty_void_method() {
        assert_eq!(parse("void f() {}").to_string(), "MethodDeclaration[Type(void), Name(f), Block[]]");
    }

    #[test]
    fn return_literal() {
        assert_eq!(
            parse("int g(){return 1;}").to_string(),
            "MethodDeclaration[Type(int), Name(g), Block[Return[Literal(1)]]]"
        );
    }

    #[test]
    fn unsupported_statement_falls_back() {
        let ast = parse("void h(){ @weird stuff; }");
        assert_eq!(
            ast.to_string(),
            "MethodDeclaration[Type(void), Name(h), Block[GenericStatement[Token(@), Token(weird), Token(stuff), Token(;)]]]"
        );
    }

    #[test]
    fn unbalanced_braces_error() {
        assert_eq!(parse_method("void f() { if (x) { }"), Err(ParseError::Unbalanced { found: '{', offset: 9 }));
        assert_eq!(parse_method("void f() { ) }"), Err(ParseError::Unbalanced { found: ')', offset: 11 }));
    }

    #[test]
    fn header_and_statements() {
        let src = "@Override public static <T> List<Map<String, T>> collect(final int[] xs, String... rest) throws IOException {
            int total = 0, k;
            for (int i = 0; i < xs.length; i++) { total += xs[i] * 2; }
            for (String s : rest) if (s != null && !s.isEmpty()) out.add(s); else continue;
            while (total > 10) total = total - 1;
            return total >= 0 ? helper(total, this.name) : new ArrayList<String>();
        }";
        let ast = parse(src);
        let shown = ast.to_string();
        assert!(shown.starts_with(
            "MethodDeclaration[Modifier(@Override), Modifier(public), Modifier(static), TypeParameters(<T>), Type(List<Map<String,T>>), Name(collect), Parameter[Modifier(final), Type(int[]), Name(xs)], Parameter[Type(String...), Name(rest)], Throws[Type(IOException)], Block["
        ), "{shown}");
        assert!(shown.contains("LocalVariable[Type(int), Name(total), Literal(0), Name(k)]"));
        assert!(shown.contains("For[LocalVariable[Type(int), Name(i), Literal(0)], BinaryExpr[Name(i), Operator(<), FieldAccess[Name(xs), Name(length)]], UnaryExpr[Name(i), Operator(++)]"));
        assert!(shown.contains("ForEach[Parameter[Type(String), Name(s)], Name(rest), If["));
        // `continue` is outside the subset
        assert!(shown.contains("GenericStatement[Token(continue), Token(;)]"));
        assert!(shown.contains("Return[Conditional[BinaryExpr[Name(total), Operator(>=), Literal(0)], Call[Name(helper), Name(total), FieldAccess[Name(this), Name(name)]], New[Type(ArrayList<String>)]]]"));
    }

    #[test]
    fn precedence() {
        let ast = parse("int f() { return a + b * c - d; }");
        assert!(ast.to_string().contains(
            "BinaryExpr[BinaryExpr[Name(a), Operator(+), BinaryExpr[Name(b), Operator(*), Name(c)]], Operator(-), Name(d)]"
        ));
    }

    #[test]
    fn try_catch_is_generic_but_lossless() {
        let ast = parse("void f() { try { a(); } catch (Exception e) { b(); } }");
        let block = ast.children.last().unwrap();
        assert_eq!(block.children.len(), 2);
        assert!(block.children.iter().all(|c| c.kind == NodeKind::GenericStatement));
    }

    #[test]
    fn abstract_and_constructor() {
        assert_eq!(
            parse("abstract int size();").to_string(),
            "MethodDeclaration[Modifier(abstract), Type(int), Name(size)]"
        );
        assert_eq!(
            parse("public Foo(int x) { this.x = x; }").to_string(),
            "MethodDeclaration[Modifier(public), Name(Foo), Parameter[Type(int), Name(x)], Block[ExpressionStatement[Assign[FieldAccess[Name(this), Name(x)], Operator(=), Name(x)]]]]"
        );
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_method("{ }"), Err(ParseError::Header { .. })));
        assert!(matches!(parse_method("int (x) {}"), Err(ParseError::Header { .. })));
        assert!(matches!(parse_method("void f() {} void g() {}"), Err(ParseError::TrailingInput { offset: 12 })));
    }

    #[test]
    fn deep_nesting_does_not_overflow() {
        let mut src = String::from("int f() { return ");
        src.push_str(&"(".repeat(5000));
        src.push('1');
        src.push_str(&")".repeat(5000));
        src.push_str("; }");
        let ast = parse(&src);
        assert_eq!(ast.children[2].children[0].kind, NodeKind::GenericStatement);

        let nested = format!("void f() {{{}{}}}", "{".repeat(3000), "}".repeat(3000));
        assert!(parse_method(&nested).is_ok());
    }
}
