//! A small recursive-descent checker for the DOT language grammar, enough to
//! confirm that emitted text is well formed and to count what it declares.

use std::collections::BTreeMap;

pub type Attrs = BTreeMap<String, String>;

#[derive(Debug, Default)]
pub struct Subgraph {
    pub id: Option<String>,
    pub nodes: Vec<String>,
    pub children: Vec<Subgraph>,
}

#[derive(Debug, Default)]
pub struct DotGraph {
    pub directed: bool,
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
    pub root: Subgraph,
}

impl DotGraph {
    pub fn dashed_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.2.get("style").map(String::as_str) == Some("dashed")).count()
    }

    pub fn solid_edges(&self) -> usize {
        self.edges.len() - self.dashed_edges()
    }

    /// Distinct node fill colors, splitting striped lists.
    pub fn fill_colors(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, attrs) in &self.nodes {
            if let Some(fc) = attrs.get("fillcolor") {
                for c in fc.split(':') {
                    if !out.iter().any(|o| o == c) {
                        out.push(c.to_string());
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::Sym(if chars[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
        } else {
            let sym = match c {
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                '=' => "=",
                ';' => ";",
                ',' => ",",
                ':' => ":",
                other => return Err(format!("unexpected character {other:?}")),
            };
            out.push(Tok::Sym(sym));
            i += 1;
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
    graph: DotGraph,
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), String> {
        if self.sym(s) {
            Ok(())
        } else {
            Err(format!("expected `{s}` at token {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(k)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) if !KEYWORDS.contains(&s.to_ascii_lowercase().as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected ID at token {}, found {other:?}", self.pos)),
        }
    }

    fn attr_list(&mut self) -> Result<Attrs, String> {
        let mut attrs = Attrs::new();
        while self.sym("[") {
            while !self.sym("]") {
                let k = self.id()?;
                self.expect("=")?;
                let v = self.id()?;
                attrs.insert(k, v);
                let _ = self.sym(",") || self.sym(";");
            }
        }
        Ok(attrs)
    }

    fn stmt_list(&mut self, into: &mut Subgraph) -> Result<(), String> {
        while !self.sym("}") {
            if self.peek().is_none() {
                return Err("unexpected end of input".into());
            }
            self.stmt(into)?;
            let _ = self.sym(";");
        }
        Ok(())
    }

    fn subgraph(&mut self, into: &mut Subgraph) -> Result<(), String> {
        let mut sub = Subgraph::default();
        if self.keyword("subgraph") && !matches!(self.peek(), Some(Tok::Sym("{"))) {
            sub.id = Some(self.id()?);
        }
        self.expect("{")?;
        self.stmt_list(&mut sub)?;
        into.children.push(sub);
        Ok(())
    }

    fn stmt(&mut self, into: &mut Subgraph) -> Result<(), String> {
        if matches!(self.peek(), Some(Tok::Sym("{"))) || matches!(self.peek(), Some(Tok::Id(s)) if s == "subgraph") {
            return self.subgraph(into);
        }
        if self.keyword("graph") || self.keyword("node") || self.keyword("edge") {
            self.attr_list()?;
            return Ok(());
        }
        let first = self.id()?;
        if self.sym("=") {
            self.id()?;
            return Ok(());
        }
        let op = if self.graph.directed { "->" } else { "--" };
        let mut chain = vec![first];
        while self.sym(op) {
            chain.push(self.id()?);
        }
        let attrs = self.attr_list()?;
        if chain.len() == 1 {
            into.nodes.push(chain[0].clone());
            self.graph.nodes.push((chain.pop().unwrap(), attrs));
        } else {
            for w in chain.windows(2) {
                self.graph.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
            }
        }
        Ok(())
    }
}

pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
        graph: DotGraph::default(),
    };
    p.keyword("strict");
    if p.keyword("digraph") {
        p.graph.directed = true;
    } else if !p.keyword("graph") {
        return Err("expected `graph` or `digraph`".into());
    }
    if !matches!(p.peek(), Some(Tok::Sym("{"))) {
        p.id()?;
    }
    p.expect("{")?;
    let mut root = Subgraph::default();
    p.stmt_list(&mut root)?;
    if p.pos != p.toks.len() {
        return Err("trailing tokens after the graph".into());
    }
    p.graph.root = root;
    Ok(p.graph)
}
