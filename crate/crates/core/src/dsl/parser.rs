use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{is_keyword, SourceFile};
use crate::diagnostic::Span;
use crate::model::StageKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn at(span: Span, expected: &[&str], found: String) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

const DECL_KEYWORDS: [&str; 5] = ["thimac", "flow", "trigger", "event", "behavior"];

/// Parses a whole `.tm` file. On failure every malformed declaration
/// contributes one error; parsing resumes at the next declaration keyword.
pub fn parse(source: &SourceFile) -> Result<Ast, Vec<ParseError>> {
    let (tokens, lex_errors) = tokenize(&source.text);
    let mut errors: Vec<(usize, ParseError)> = lex_errors
        .into_iter()
        .map(|e| {
            let expected: Vec<&str> = e.expected.iter().map(String::as_str).collect();
            (e.span.start, ParseError::at(e.span, &expected, e.found))
        })
        .collect();
    let mut p = Parser { tokens, pos: 0 };
    let mut ast = Ast::default();
    while !p.at_eof() {
        let start = p.pos;
        match p.decl() {
            Ok(d) => ast.decls.push(d),
            Err(e) => {
                errors.push((p.peek().span.start, e));
                p.recover(start);
            }
        }
    }
    if errors.is_empty() {
        Ok(ast)
    } else {
        errors.sort_by_key(|(offset, _)| *offset);
        Err(errors.into_iter().map(|(_, e)| e).collect())
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::at(t.span, expected, t.tok.describe())
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.advance().span)
        } else {
            Err(self.error(&[what]))
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<Span> {
        if self.is_word(word) {
            Ok(self.advance().span)
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Ident(w) if !is_keyword(w) => {
                let t = self.advance();
                let Tok::Ident(text) = t.tok else { unreachable!() };
                Ok(Name { text, span: t.span })
            }
            _ => Err(self.error(&["name"])),
        }
    }

    fn stage_kind(&self) -> Option<StageKind> {
        match &self.peek().tok {
            Tok::Ident(w) => StageKind::parse(w),
            _ => None,
        }
    }

    fn label(&mut self) -> PResult<Option<Name>> {
        if self.peek().tok != Tok::LParen {
            return Ok(None);
        }
        self.advance();
        let name = self.name()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Some(name))
    }

    fn prev_end(&self) -> usize {
        self.tokens[self.pos.saturating_sub(1)].span.end
    }

    fn span_from(&self, start: Span) -> Span {
        Span { end: self.prev_end(), ..start }
    }

    /// Skips to the next declaration keyword at the nesting depth the failed
    /// declaration started at.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.advance();
        }
        let mut depth: i64 = self.tokens[start..self.pos]
            .iter()
            .map(|t| match t.tok {
                Tok::LBrace => 1,
                Tok::RBrace => -1,
                _ => 0,
            })
            .sum();
        loop {
            match &self.peek().tok {
                Tok::Eof => return,
                Tok::Ident(w) if depth <= 0 && DECL_KEYWORDS.contains(&w.as_str()) => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.advance();
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(w) if w == "thimac" => Ok(Decl::Thimac(self.thimac()?)),
            Tok::Ident(w) if w == "flow" => Ok(Decl::Flow(self.edge("flow", Tok::Arrow, "`->`")?)),
            Tok::Ident(w) if w == "trigger" => {
                Ok(Decl::Trigger(self.edge("trigger", Tok::Squiggle, "`~>`")?))
            }
            Tok::Ident(w) if w == "event" => Ok(Decl::Event(self.event()?)),
            Tok::Ident(w) if w == "behavior" => Ok(Decl::Behavior(self.behavior()?)),
            _ => Err(self.error(&["`thimac`", "`flow`", "`trigger`", "`event`", "`behavior`"])),
        }
    }

    fn thimac(&mut self) -> PResult<ThimacNode> {
        let start = self.keyword("thimac")?;
        let name = self.name()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut items = Vec::new();
        loop {
            if self.peek().tok == Tok::RBrace {
                self.advance();
                break;
            }
            if self.is_word("thimac") {
                items.push(ThimacItem::Thimac(self.thimac()?));
            } else if let Some(kind) = self.stage_kind() {
                let s = self.advance().span;
                let label = self.label()?;
                self.expect(Tok::Semi, "`;`")?;
                items.push(ThimacItem::Stage(StageNode { kind, label, span: self.span_from(s) }));
            } else {
                return Err(self.error(&["stage kind", "`thimac`", "`}`"]));
            }
        }
        Ok(ThimacNode { name, items, span: self.span_from(start) })
    }

    fn stage_ref(&mut self) -> PResult<StageRef> {
        let first = self.name().map_err(|_| self.error(&["stage reference"]))?;
        let start = first.span;
        let mut path = vec![first];
        loop {
            self.expect(Tok::Dot, "`.`")?;
            if let Some(kind) = self.stage_kind() {
                self.advance();
                let label = self.label()?;
                return Ok(StageRef { path, kind, label, span: self.span_from(start) });
            }
            match self.name() {
                Ok(n) => path.push(n),
                Err(_) => return Err(self.error(&["name", "stage kind"])),
            }
        }
    }

    fn edge(&mut self, keyword: &str, arrow: Tok, arrow_desc: &str) -> PResult<EdgeNode> {
        let start = self.keyword(keyword)?;
        let source = self.stage_ref()?;
        self.expect(arrow, arrow_desc)?;
        let target = self.stage_ref()?;
        self.expect(Tok::Semi, "`;`")?;
        Ok(EdgeNode { source, target, span: self.span_from(start) })
    }

    fn event(&mut self) -> PResult<EventNode> {
        let start = self.keyword("event")?;
        let name = self.name()?;
        let description = match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Some(s)
            }
            _ => None,
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut stages = vec![self.stage_ref()?];
        self.expect(Tok::Semi, "`;`")?;
        while self.peek().tok != Tok::RBrace {
            if self.at_eof() {
                return Err(self.error(&["stage reference", "`}`"]));
            }
            stages.push(self.stage_ref()?);
            self.expect(Tok::Semi, "`;`")?;
        }
        self.advance();
        Ok(EventNode { name, description, stages, span: self.span_from(start) })
    }

    fn behavior(&mut self) -> PResult<BehaviorNode> {
        let start = self.keyword("behavior")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut edges = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let before = self.name().map_err(|_| self.error(&["event name", "`}`"]))?;
            self.expect(Tok::Arrow, "`->`")?;
            let after = self.name()?;
            let repeat = self.is_word("repeat");
            if repeat {
                self.advance();
            }
            self.expect(Tok::Semi, "`;`")?;
            let span = Span { end: self.prev_end(), ..before.span };
            edges.push(BehaviorEdgeNode { before, after, repeat, span });
        }
        self.advance();
        Ok(BehaviorNode { edges, span: self.span_from(start) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(text: &str) -> Result<Ast, Vec<ParseError>> {
        parse(&SourceFile::new("t.tm", text))
    }

    #[test]
    fn minimal_heat_thimac() {
        let ast = parse_str("thimac Heat { create; release; transfer }");
        // missing `;` after the last stage is an error
        assert!(ast.is_err());
        let ast = parse_str("thimac Heat { create; release; transfer; }").unwrap();
        assert_eq!(ast.decls.len(), 1);
        let Decl::Thimac(t) = &ast.decls[0] else { panic!() };
        assert_eq!(t.name.text, "Heat");
        assert_eq!(t.stages().count(), 3);
    }

    #[test]
    fn dangling_arrow() {
        let errs = parse_str("flow ->").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (1, 6));
        assert_eq!(errs[0].expected, vec!["stage reference".to_string()]);
        assert_eq!(errs[0].found, "`->`");
    }

    #[test]
    fn stage_ref_with_label() {
        let ast = parse_str("flow A.B.transfer(x) -> C.transfer(x);").unwrap();
        let Decl::Flow(e) = &ast.decls[0] else { panic!() };
        assert_eq!(e.source.key(), "A.B.transfer(x)");
        assert_eq!(e.target.key(), "C.transfer(x)");
    }

    #[test]
    fn recovers_at_declaration_boundaries() {
        let text = "thimac A { create; bogus; }\nflow A.create -> ;\nthimac B { create; }\nflow B.create B.process;\n";
        let errs = parse_str(text).unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].line, 1);
        assert_eq!(errs[1].line, 2);
        assert_eq!(errs[2].line, 4);
    }

    #[test]
    fn events_and_behavior() {
        let text = r#"
            event E1 "The dough is created" { Dough.create; }
            behavior { E1 -> E2; E2 -> E1 repeat; }
        "#;
        let ast = parse_str(text).unwrap();
        let Decl::Event(e) = &ast.decls[0] else { panic!() };
        assert_eq!(e.description.as_deref(), Some("The dough is created"));
        let Decl::Behavior(b) = &ast.decls[1] else { panic!() };
        assert_eq!(b.edges.len(), 2);
        assert!(!b.edges[0].repeat);
        assert!(b.edges[1].repeat);
    }

    #[test]
    fn empty_event_is_rejected() {
        assert!(parse_str("event E {}").is_err());
    }

    #[test]
    fn eof_error_points_at_last_character() {
        let errs = parse_str("thimac A {\n").unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (1, 11));
        assert_eq!(errs[0].found, "end of input");
    }

    #[test]
    fn keywords_are_not_names() {
        assert!(parse_str("thimac flow { }").is_err());
    }
}
