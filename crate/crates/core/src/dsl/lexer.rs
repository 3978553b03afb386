use crate::diagnostic::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Dot,
    Arrow,
    Squiggle,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Squiggle => "`~>`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// A character the lexer could not start a token with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LexError {
    pub span: Span,
    pub found: String,
    pub expected: Vec<String>,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.text[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
            start: self.pos,
            end: self.pos,
        }
    }
}

/// Splits `text` into tokens. The trailing `Eof` token points at the last
/// character of the input so that every reported position addresses a real
/// character.
pub(crate) fn tokenize(text: &str) -> (Vec<Token>, Vec<LexError>) {
    let mut cur = Cursor {
        text,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut last_char = None;

    while let Some(c) = cur.peek() {
        let start = cur.mark();
        last_char = Some(start);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                last_char = Some(cur.mark());
                cur.bump();
            }
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = simple {
            cur.bump();
            tokens.push(Token { tok, span: Span { end: cur.pos, ..start } });
            continue;
        }
        if (c == '-' || c == '~') && cur.peek2() == Some('>') {
            cur.bump();
            cur.bump();
            let tok = if c == '-' { Tok::Arrow } else { Tok::Squiggle };
            tokens.push(Token { tok, span: Span { end: cur.pos, ..start } });
            last_char = Some(Span { column: start.column + 1, start: start.start + 1, ..start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    last_char = Some(cur.mark());
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            tokens.push(Token { tok: Tok::Ident(word), span: Span { end: cur.pos, ..start } });
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut value = String::new();
            let mut closed = false;
            while let Some(c) = cur.peek() {
                last_char = Some(cur.mark());
                cur.bump();
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.peek() {
                        Some(e @ ('"' | '\\')) => {
                            last_char = Some(cur.mark());
                            cur.bump();
                            value.push(e);
                        }
                        _ => value.push('\\'),
                    },
                    '\n' => break,
                    c => value.push(c),
                }
            }
            if closed {
                tokens.push(Token { tok: Tok::Str(value), span: Span { end: cur.pos, ..start } });
            } else {
                errors.push(LexError {
                    span: Span { end: cur.pos, ..start },
                    found: "unterminated string".to_string(),
                    expected: vec!["`\"`".to_string()],
                });
            }
            continue;
        }
        cur.bump();
        errors.push(LexError {
            span: Span { end: cur.pos, ..start },
            found: format!("unexpected character `{c}`"),
            expected: vec!["token".to_string()],
        });
    }

    let eof_span = last_char.map(|s| Span {
        end: s.start + text[s.start..].chars().next().map_or(0, char::len_utf8),
        ..s
    });
    tokens.push(Token {
        tok: Tok::Eof,
        span: eof_span.unwrap_or(Span { line: 1, column: 1, start: 0, end: 0 }),
    });
    (tokens, errors)
}
