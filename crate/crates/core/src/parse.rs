//! Lexer and parser for the surface language.
//!
//! ```text
//! program := def* "main" "=" expr
//! def     := IDENT ":" type "=" expr ["@nocost"]
//! type    := atype ("->" type)?
//! atype   := "unit" | "nat" | "list" atype | "(" type ")"
//! expr    := "fun" IDENT+ "." expr
//!          | "let" IDENT "=" expr "in" expr
//!          | "foldr" atom "{" "nil" "=>" expr "|" "cons" IDENT IDENT "=>" expr "}"
//!          | "natcase" atom "{" "zero" "=>" expr "|" "succ" IDENT "=>" expr "}"
//!          | "cons" atom atom
//!          | atom atom*
//! atom    := IDENT | NAT | "nil" | "unit" | "(" expr (":" type)? ")"
//! ```
//!
//! Comments run from `--` to the end of the line. An application chain
//! stops before an identifier that is followed by `:` or `=`, which begins
//! the next definition (or `main`).

use crate::syntax::{Def, Program, Span, Term, Ty};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {span}: {msg}")]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

fn err<T>(span: Span, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { span, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    KwFun,
    KwLet,
    KwIn,
    KwNil,
    KwCons,
    KwFoldr,
    KwNatCase,
    KwUnit,
    KwMain,
    KwZero,
    KwSucc,
    KwList,
    KwNatTy,
    NoCost,
    Colon,
    Equals,
    Dot,
    Arrow,
    FatArrow,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Pipe,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{}`", x),
            Tok::Nat(n) => return write!(f, "number `{}`", n),
            Tok::KwFun => "`fun`",
            Tok::KwLet => "`let`",
            Tok::KwIn => "`in`",
            Tok::KwNil => "`nil`",
            Tok::KwCons => "`cons`",
            Tok::KwFoldr => "`foldr`",
            Tok::KwNatCase => "`natcase`",
            Tok::KwUnit => "`unit`",
            Tok::KwMain => "`main`",
            Tok::KwZero => "`zero`",
            Tok::KwSucc => "`succ`",
            Tok::KwList => "`list`",
            Tok::KwNatTy => "`nat`",
            Tok::NoCost => "`@nocost`",
            Tok::Colon => "`:`",
            Tok::Equals => "`=`",
            Tok::Dot => "`.`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Pipe => "`|`",
        };
        write!(f, "{}", s)
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // skip whitespace and comments
            loop {
                match self.peek() {
                    Some(c) if (c as char).is_whitespace() => {
                        self.bump();
                    }
                    Some(b'-') if self.peek2() == Some(b'-') => {
                        while let Some(c) = self.peek() {
                            if c == b'\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                    _ => break,
                }
            }
            let span = Span::new(self.line, self.col);
            let c = match self.peek() {
                None => return Ok(out),
                Some(c) => c,
            };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b':' => {
                    self.bump();
                    Tok::Colon
                }
                b'=' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::FatArrow
                    } else {
                        Tok::Equals
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return err(span, "expected `->`");
                    }
                }
                b'@' => {
                    self.bump();
                    let w = self.word();
                    if w == "nocost" {
                        Tok::NoCost
                    } else {
                        return err(span, format!("unknown attribute `@{}`", w));
                    }
                }
                b'0'..=b'9' => {
                    let mut n: u64 = 0;
                    while let Some(d @ b'0'..=b'9') = self.peek() {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(u64::from(d - b'0')))
                            .ok_or_else(|| ParseError {
                                span,
                                msg: "numeric literal out of range".into(),
                            })?;
                        self.bump();
                    }
                    Tok::Nat(n)
                }
                c if (c as char).is_ascii_alphabetic() || c == b'_' => {
                    let w = self.word();
                    if w == "_" {
                        return err(span, "`_` is not a valid identifier");
                    }
                    match w.as_str() {
                        "fun" => Tok::KwFun,
                        "let" => Tok::KwLet,
                        "in" => Tok::KwIn,
                        "nil" => Tok::KwNil,
                        "cons" => Tok::KwCons,
                        "foldr" => Tok::KwFoldr,
                        "natcase" => Tok::KwNatCase,
                        "unit" => Tok::KwUnit,
                        "main" => Tok::KwMain,
                        "zero" => Tok::KwZero,
                        "succ" => Tok::KwSucc,
                        "list" => Tok::KwList,
                        "nat" => Tok::KwNatTy,
                        _ => Tok::Ident(w),
                    }
                }
                c => return err(span, format!("unexpected character `{}`", c as char)),
            };
            out.push((tok, span));
        }
    }

    fn word(&mut self) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek() {
            let ch = c as char;
            if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                w.push(ch);
                self.bump();
            } else {
                break;
            }
        }
        w
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        match self.next() {
            Some((t, s)) if t == want => Ok(s),
            Some((t, s)) => err(s, format!("expected {}, found {}", want, t)),
            None => err(self.end, format!("expected {}, found end of input", want)),
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.next() {
            Some((Tok::Ident(x), s)) => Ok((x, s)),
            Some((t, s)) => err(s, format!("expected identifier, found {}", t)),
            None => err(self.end, "expected identifier, found end of input"),
        }
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        let lhs = self.atom_ty()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.next();
            let rhs = self.ty()?;
            Ok(Ty::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn atom_ty(&mut self) -> Result<Ty, ParseError> {
        match self.next() {
            Some((Tok::KwUnit, _)) => Ok(Ty::Unit),
            Some((Tok::KwNatTy, _)) => Ok(Ty::Nat),
            Some((Tok::KwList, _)) => {
                let elem = self.atom_ty()?;
                Ok(Ty::list(elem))
            }
            Some((Tok::LParen, _)) => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some((t, s)) => err(s, format!("expected a type, found {}", t)),
            None => err(self.end, "expected a type, found end of input"),
        }
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::KwFun) => {
                let (_, span) = self.next().unwrap();
                let mut params = vec![self.ident()?];
                while matches!(self.peek(), Some(Tok::Ident(_))) {
                    params.push(self.ident()?);
                }
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                let mut t = body;
                for (p, _) in params.into_iter().rev() {
                    t = Term::Lam { param: p, body: Box::new(t), span };
                }
                Ok(t)
            }
            Some(Tok::KwLet) => {
                let (_, span) = self.next().unwrap();
                let (name, _) = self.ident()?;
                self.expect(Tok::Equals)?;
                let bound = self.expr()?;
                self.expect(Tok::KwIn)?;
                let body = self.expr()?;
                Ok(Term::Let {
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                    span,
                })
            }
            Some(Tok::KwFoldr) => {
                let (_, span) = self.next().unwrap();
                let scrutinee = self.atom()?;
                self.expect(Tok::LBrace)?;
                self.expect(Tok::KwNil)?;
                self.expect(Tok::FatArrow)?;
                let nil_case = self.expr()?;
                self.expect(Tok::Pipe)?;
                self.expect(Tok::KwCons)?;
                let (head_param, _) = self.ident()?;
                let (acc_param, _) = self.ident()?;
                self.expect(Tok::FatArrow)?;
                let cons_case = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::Foldr {
                    scrutinee: Box::new(scrutinee),
                    nil_case: Box::new(nil_case),
                    head_param,
                    acc_param,
                    cons_case: Box::new(cons_case),
                    span,
                })
            }
            Some(Tok::KwNatCase) => {
                let (_, span) = self.next().unwrap();
                let scrutinee = self.atom()?;
                self.expect(Tok::LBrace)?;
                self.expect(Tok::KwZero)?;
                self.expect(Tok::FatArrow)?;
                let zero_case = self.expr()?;
                self.expect(Tok::Pipe)?;
                self.expect(Tok::KwSucc)?;
                let (pred_name, _) = self.ident()?;
                self.expect(Tok::FatArrow)?;
                let succ_case = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::NatCase {
                    scrutinee: Box::new(scrutinee),
                    zero_case: Box::new(zero_case),
                    pred_name,
                    succ_case: Box::new(succ_case),
                    span,
                })
            }
            _ => self.app_chain(),
        }
    }

    fn app_chain(&mut self) -> Result<Term, ParseError> {
        let mut t = self.primary()?;
        while self.starts_arg() {
            let span = self.span();
            let arg = self.atom()?;
            t = Term::App { func: Box::new(t), arg: Box::new(arg), span };
        }
        Ok(t)
    }

    /// Whether the next token begins an application argument. An identifier
    /// followed by `:` or `=` begins the next top-level item instead.
    fn starts_arg(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => !matches!(
                self.peek_at(1),
                Some(Tok::Colon) | Some(Tok::Equals)
            ),
            Some(Tok::Nat(_)) | Some(Tok::KwNil) | Some(Tok::KwUnit) | Some(Tok::LParen) => true,
            _ => false,
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Tok::KwCons) {
            let (_, span) = self.next().unwrap();
            let head = self.atom()?;
            let tail = self.atom()?;
            return Ok(Term::Cons {
                head: Box::new(head),
                tail: Box::new(tail),
                span,
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some((Tok::Ident(x), s)) => Ok(Term::Var(x, s)),
            Some((Tok::Nat(n), s)) => Ok(Term::NatLit(n, s)),
            Some((Tok::KwNil, s)) => Ok(Term::Nil(s)),
            Some((Tok::KwUnit, s)) => Ok(Term::Unit(s)),
            Some((Tok::LParen, s)) => {
                let t = self.expr()?;
                if self.peek() == Some(&Tok::Colon) {
                    self.next();
                    let ty = self.ty()?;
                    self.expect(Tok::RParen)?;
                    Ok(Term::Ascribe { term: Box::new(t), ty, span: s })
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(t)
                }
            }
            Some((t, s)) => err(s, format!("expected an expression, found {}", t)),
            None => err(self.end, "expected an expression, found end of input"),
        }
    }
}

/// Parses a program from source text.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let end = toks
        .last()
        .map(|(_, s)| *s)
        .unwrap_or_else(|| Span::new(1, 1));
    let mut p = Parser { toks, pos: 0, end };

    let mut defs: Vec<Def> = Vec::new();
    loop {
        match p.peek() {
            None => {
                return err(p.end, "empty program: expected definitions and a `main` expression")
            }
            Some(Tok::KwMain) => break,
            Some(Tok::Ident(_)) => {
                let (name, span) = p.ident()?;
                if defs.iter().any(|d| d.name == name) {
                    return err(span, format!("duplicate top-level name `{}`", name));
                }
                p.expect(Tok::Colon)?;
                let ty = p.ty()?;
                p.expect(Tok::Equals)?;
                let body = p.expr()?;
                let nocost = if p.peek() == Some(&Tok::NoCost) {
                    p.next();
                    true
                } else {
                    false
                };
                defs.push(Def { name, ty, body, nocost, span });
            }
            Some(t) => {
                let t = t.clone();
                return err(p.span(), format!("expected a definition or `main`, found {}", t));
            }
        }
    }
    p.expect(Tok::KwMain)?;
    p.expect(Tok::Equals)?;
    let main = p.expr()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return err(p.span(), format!("unexpected {} after main expression", t));
    }

    let mut prog = Program { defs, main };
    resolve_def_refs(&mut prog)?;
    Ok(prog)
}

/// Rewrites free variables that name top-level definitions into `DefRef`
/// nodes. A definition may reference only earlier definitions: referencing
/// itself (the only way to write general recursion) or a later definition
/// is rejected here.
fn resolve_def_refs(p: &mut Program) -> Result<(), ParseError> {
    let names: Vec<String> = p.defs.iter().map(|d| d.name.clone()).collect();
    for i in 0..p.defs.len() {
        let own = p.defs[i].name.clone();
        let visible = &names[..i];
        let mut body = p.defs[i].body.clone();
        resolve_term(&mut body, visible, &mut Vec::new(), &|x, span| {
            if x == own {
                err(
                    span,
                    format!("recursive definition `{}`: recursion is only expressible through foldr", x),
                )
            } else if names.iter().any(|n| n == x) {
                err(span, format!("forward reference to `{}`", x))
            } else {
                Ok(())
            }
        })?;
        p.defs[i].body = body;
    }
    let mut main = p.main.clone();
    resolve_term(&mut main, &names, &mut Vec::new(), &|_, _| Ok(()))?;
    p.main = main;
    Ok(())
}

fn resolve_term(
    t: &mut Term,
    visible: &[String],
    bound: &mut Vec<String>,
    on_unknown: &dyn Fn(&str, Span) -> Result<(), ParseError>,
) -> Result<(), ParseError> {
    match t {
        Term::Var(x, s) => {
            if bound.iter().any(|b| b == x) {
                return Ok(());
            }
            if visible.iter().any(|v| v == x) {
                *t = Term::DefRef(x.clone(), *s);
                return Ok(());
            }
            on_unknown(x, *s)
        }
        Term::DefRef(..) | Term::Nil(_) | Term::Unit(_) | Term::NatLit(..) => Ok(()),
        Term::Lam { param, body, .. } => {
            bound.push(param.clone());
            resolve_term(body, visible, bound, on_unknown)?;
            bound.pop();
            Ok(())
        }
        Term::App { func, arg, .. } => {
            resolve_term(func, visible, bound, on_unknown)?;
            resolve_term(arg, visible, bound, on_unknown)
        }
        Term::Let { name, bound: b, body, .. } => {
            resolve_term(b, visible, bound, on_unknown)?;
            bound.push(name.clone());
            resolve_term(body, visible, bound, on_unknown)?;
            bound.pop();
            Ok(())
        }
        Term::Cons { head, tail, .. } => {
            resolve_term(head, visible, bound, on_unknown)?;
            resolve_term(tail, visible, bound, on_unknown)
        }
        Term::Foldr {
            scrutinee,
            nil_case,
            head_param,
            acc_param,
            cons_case,
            ..
        } => {
            resolve_term(scrutinee, visible, bound, on_unknown)?;
            resolve_term(nil_case, visible, bound, on_unknown)?;
            bound.push(head_param.clone());
            bound.push(acc_param.clone());
            resolve_term(cons_case, visible, bound, on_unknown)?;
            bound.pop();
            bound.pop();
            Ok(())
        }
        Term::NatCase {
            scrutinee,
            zero_case,
            pred_name,
            succ_case,
            ..
        } => {
            resolve_term(scrutinee, visible, bound, on_unknown)?;
            resolve_term(zero_case, visible, bound, on_unknown)?;
            bound.push(pred_name.clone());
            resolve_term(succ_case, visible, bound, on_unknown)?;
            bound.pop();
            Ok(())
        }
        Term::Ascribe { term, .. } => resolve_term(term, visible, bound, on_unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, pretty_program};

    #[test]
    fn let_cons_example() {
        let p = parse("main = let xs = cons 1 nil in xs").unwrap();
        match &p.main {
            Term::Let { name, bound, body, .. } => {
                assert_eq!(name, "xs");
                assert!(matches!(
                    &**bound,
                    Term::Cons { head, tail, .. }
                        if matches!(&**head, Term::NatLit(1, _)) && matches!(&**tail, Term::Nil(_))
                ));
                assert!(matches!(&**body, Term::Var(x, _) if x == "xs"));
            }
            other => panic!("expected let, got {:?}", other),
        }
    }

    #[test]
    fn empty_program_is_an_error() {
        let e = parse("").unwrap_err();
        assert!(e.msg.contains("empty program"), "{}", e);
        assert!(parse("   -- just a comment\n").is_err());
    }

    #[test]
    fn duplicate_definition_rejected() {
        let src = "f : nat -> nat = fun x. x\nf : nat -> nat = fun x. x\nmain = unit";
        let e = parse(src).unwrap_err();
        assert!(e.msg.contains("duplicate"), "{}", e);
    }

    #[test]
    fn self_reference_rejected_at_parse_time() {
        let src = "f : nat -> nat = fun x. f x\nmain = unit";
        let e = parse(src).unwrap_err();
        assert!(e.msg.contains("recursive"), "{}", e);
    }

    #[test]
    fn forward_reference_rejected() {
        let src = "f : nat -> nat = fun x. g x\ng : nat -> nat = fun x. x\nmain = unit";
        let e = parse(src).unwrap_err();
        assert!(e.msg.contains("forward reference"), "{}", e);
    }

    #[test]
    fn error_positions_are_line_and_column() {
        let e = parse("main = \n  (cons 1").unwrap_err();
        assert_eq!(e.span.line, 2);
    }

    #[test]
    fn application_chain_stops_before_next_def() {
        let src = "f : nat -> nat = fun x. x\ng : nat -> nat = fun y. f y\nmain = g 3";
        let p = parse(src).unwrap();
        assert_eq!(p.defs.len(), 2);
        assert!(matches!(&p.defs[1].body, Term::Lam { .. }));
    }

    #[test]
    fn nocost_marker_is_recorded() {
        let src = "f : nat -> nat = fun x. x @nocost\nmain = f 1";
        let p = parse(src).unwrap();
        assert!(p.defs[0].nocost);
    }

    #[test]
    fn pretty_print_round_trip() {
        let src = "append : list nat -> list nat -> list nat = fun xs ys. foldr xs { nil => ys | cons h t => cons h t }\nmain = append (cons 1 nil) nil";
        let p = parse(src).unwrap();
        let printed = pretty_program(&p);
        let q = parse(&printed).unwrap();
        assert_eq!(p.defs.len(), q.defs.len());
        for (a, b) in p.defs.iter().zip(q.defs.iter()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.ty, b.ty);
            assert!(alpha_eq(&a.body, &b.body), "{}", a.name);
        }
        assert!(alpha_eq(&p.main, &q.main));
    }
}
