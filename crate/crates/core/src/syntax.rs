//! Text forms used by the command line.
//!
//! Schemas:
//!
//! ```text
//! schema := "mu" "{" [ctor ("," ctor)*] "}"
//! ctor   := name ":" desc
//! desc   := "none" | "byte" | "rec" | "(" desc "*" desc ")"
//! ```
//!
//! Trees: `tree := name | "(" name arg* ")"`, where the arguments are the
//! constructor's bytes (decimal) and subtrees flattened left to right,
//! e.g. `(node (node leaf 1 leaf) 5 leaf)`.
//!
//! Error positions are 1-based character columns.

use crate::desc::{Ctor, Desc, Schema};
use crate::error::{Result, WireError};
use crate::value::{Meaning, Tree};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'s> {
    Ident(&'s str),
    Num(&'s str),
    Punct(char),
}

struct Lexer<'s> {
    toks: Vec<(usize, Tok<'s>)>,
    next: usize,
    end: usize,
}

impl<'s> Lexer<'s> {
    fn new(src: &'s str) -> Result<Lexer<'s>> {
        let mut toks = Vec::new();
        let mut chars = src.char_indices().peekable();
        let col = |byte: usize| src[..byte].chars().count() + 1;
        while let Some(&(at, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if "{}(),:*".contains(c) {
                chars.next();
                toks.push((col(at), Tok::Punct(c)));
            } else if c.is_ascii_digit() || c.is_alphabetic() || c == '_' {
                let mut stop = at;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' {
                        stop = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &src[at..stop];
                let tok = if word.bytes().all(|b| b.is_ascii_digit()) { Tok::Num(word) } else { Tok::Ident(word) };
                toks.push((col(at), tok));
            } else {
                return Err(WireError::Parse { pos: col(at), msg: format!("unexpected character `{c}`") });
            }
        }
        Ok(Lexer { toks, next: 0, end: src.chars().count() + 1 })
    }

    fn peek(&self) -> Option<&(usize, Tok<'s>)> {
        self.toks.get(self.next)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<(usize, Tok<'s>)> {
        let t = self.toks.get(self.next).cloned();
        self.next += 1;
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(WireError::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some((_, Tok::Punct(p))) if *p == c => {
                self.next += 1;
                Ok(())
            }
            _ => self.error(format!("expected `{c}`")),
        }
    }

    fn ident(&mut self) -> Result<(usize, &'s str)> {
        match self.peek() {
            Some(&(p, Tok::Ident(w))) => {
                self.next += 1;
                Ok((p, w))
            }
            _ => self.error("expected a name"),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some((_, Tok::Punct(p))) if *p == c)
    }

    fn finish(&self) -> Result<()> {
        if self.peek().is_some() {
            self.error("unexpected trailing input")
        } else {
            Ok(())
        }
    }
}

pub fn parse_desc(src: &str) -> Result<Desc> {
    let mut lx = Lexer::new(src)?;
    let d = desc(&mut lx)?;
    lx.finish()?;
    Ok(d)
}

fn desc(lx: &mut Lexer<'_>) -> Result<Desc> {
    if lx.at_punct('(') {
        lx.bump();
        let l = desc(lx)?;
        lx.punct('*')?;
        let r = desc(lx)?;
        lx.punct(')')?;
        return Ok(Desc::prod(l, r));
    }
    match lx.peek() {
        Some((_, Tok::Ident("none"))) => {
            lx.bump();
            Ok(Desc::None)
        }
        Some((_, Tok::Ident("byte"))) => {
            lx.bump();
            Ok(Desc::Byte)
        }
        Some((_, Tok::Ident("rec"))) => {
            lx.bump();
            Ok(Desc::Rec)
        }
        _ => lx.error("expected `none`, `byte`, `rec` or `(`"),
    }
}

pub fn parse_schema(src: &str) -> Result<Schema> {
    let mut lx = Lexer::new(src)?;
    match lx.ident()? {
        (_, "mu") => {}
        (pos, _) => return Err(WireError::Parse { pos, msg: "expected `mu`".into() }),
    }
    lx.punct('{')?;
    let mut ctors = Vec::new();
    if !lx.at_punct('}') {
        loop {
            let (_, name) = lx.ident()?;
            lx.punct(':')?;
            ctors.push(Ctor::new(name, desc(&mut lx)?));
            if lx.at_punct(',') {
                lx.bump();
            } else {
                break;
            }
        }
    }
    lx.punct('}')?;
    lx.finish()?;
    Schema::new(ctors)
}

/// Parses a tree literal against `s`, checking arities and byte ranges.
pub fn parse_tree(s: &Schema, src: &str) -> Result<Tree> {
    let mut lx = Lexer::new(src)?;
    let t = tree(s, &mut lx)?;
    lx.finish()?;
    Ok(t)
}

fn tree(s: &Schema, lx: &mut Lexer<'_>) -> Result<Tree> {
    let parens = lx.at_punct('(');
    if parens {
        lx.bump();
    }
    let (pos, name) = lx.ident()?;
    let k = s.index_of(name).map_err(|_| WireError::Parse { pos, msg: format!("unknown constructor `{name}`") })?;
    let shape = s.shape_of(k);
    let arity = shape.static_size() + shape.rec_count();
    if !parens && arity > 0 {
        return Err(WireError::Parse { pos, msg: format!("constructor `{name}` takes {arity} argument(s)") });
    }
    let args = args(s, shape, name, lx)?;
    if parens {
        if !lx.at_punct(')') {
            return lx.error(format!("constructor `{name}` takes {arity} argument(s)"));
        }
        lx.bump();
    }
    Ok(Tree::new(k, args))
}

fn args(s: &Schema, d: &Desc, ctor: &str, lx: &mut Lexer<'_>) -> Result<Meaning<Tree>> {
    match d {
        Desc::None => Ok(Meaning::Unit),
        Desc::Byte => match lx.peek().cloned() {
            Some((pos, Tok::Num(n))) => {
                lx.bump();
                n.parse::<u8>().map(Meaning::Byte).map_err(|_| WireError::ByteOutOfRange { pos, value: n.to_owned() })
            }
            _ => lx.error(format!("constructor `{ctor}` expects a byte here")),
        },
        Desc::Rec => match lx.peek() {
            Some((_, Tok::Ident(_) | Tok::Punct('('))) => Ok(Meaning::Rec(tree(s, lx)?)),
            _ => lx.error(format!("constructor `{ctor}` expects a subtree here")),
        },
        Desc::Prod(l, r) => {
            let l = args(s, l, ctor, lx)?;
            Ok(Meaning::pair(l, args(s, r, ctor, lx)?))
        }
    }
}

/// Renders `t` in literal syntax; the inverse of [`parse_tree`].
pub fn print_tree(s: &Schema, t: &Tree) -> String {
    let mut out = String::new();
    print_into(s, t, &mut out);
    out
}

fn print_into(s: &Schema, t: &Tree, out: &mut String) {
    let name = s.name_of(t.tag);
    let shape = s.shape_of(t.tag);
    if shape.static_size() + shape.rec_count() == 0 {
        out.push_str(name);
        return;
    }
    out.push('(');
    out.push_str(name);
    t.args.visit(&mut |atom| match atom {
        Meaning::Byte(b) => {
            out.push(' ');
            out.push_str(&b.to_string());
        }
        Meaning::Rec(sub) => {
            out.push(' ');
            print_into(s, sub, out);
        }
        _ => {}
    });
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::example_tree;

    const EXAMPLE: &str = "(node (node (node leaf 1 leaf) 5 leaf) 10 (node leaf 20 leaf))";

    #[test]
    fn schema_dsl() {
        let s = parse_schema("mu { leaf: none, node: (rec * (byte * rec)) }").unwrap();
        assert_eq!(s, Schema::tree());
        assert_eq!(parse_schema("mu {}").unwrap(), Schema::default());
        assert_eq!(parse_schema(&Schema::tree().to_string()).unwrap(), Schema::tree());

        assert!(matches!(parse_schema("mu { a: none, a: byte }"), Err(WireError::DuplicateName { .. })));
        assert!(matches!(parse_schema("mu { a: bytes }"), Err(WireError::Parse { pos: 9, .. })));
        assert!(matches!(parse_schema("nu {}"), Err(WireError::Parse { pos: 1, .. })));
        assert!(matches!(parse_schema("mu { a: (rec * rec }"), Err(WireError::Parse { pos: 20, .. })));
    }

    #[test]
    fn tree_literals() {
        let s = Schema::tree();
        assert_eq!(parse_tree(&s, EXAMPLE).unwrap(), example_tree());
        assert_eq!(print_tree(&s, &example_tree()), EXAMPLE);
        assert_eq!(parse_tree(&s, "leaf").unwrap(), Tree::leaf());
        assert_eq!(print_tree(&s, &Tree::leaf()), "leaf");
    }

    #[test]
    fn tree_literal_errors() {
        let s = Schema::tree();
        assert!(matches!(parse_tree(&s, "(node leaf 300 leaf)"), Err(WireError::ByteOutOfRange { pos: 12, .. })));
        assert!(matches!(parse_tree(&s, "(cons leaf)"), Err(WireError::Parse { pos: 2, .. })));
        assert!(matches!(parse_tree(&s, "node"), Err(WireError::Parse { .. })));
        assert!(matches!(parse_tree(&s, "(node leaf 1)"), Err(WireError::Parse { .. })));
        assert!(matches!(parse_tree(&s, "(node leaf 1 leaf leaf)"), Err(WireError::Parse { .. })));
        assert!(matches!(parse_tree(&s, "leaf leaf"), Err(WireError::Parse { pos: 6, .. })));
    }
}
