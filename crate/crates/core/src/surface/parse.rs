//! Lexer and recursive-descent parser for surface programs.
//!
//! ```text
//! program  := class* expr
//! class    := "class" IDENT "{" field* method* "}"
//! field    := IDENT ":" type
//! method   := IDENT "(" IDENT ":" type ")" ":" type "{" expr "}"
//! type     := "*" | "any" | IDENT
//! expr     := primary ( "." IDENT ( "(" expr ")" | "=" expr )? )*
//! primary  := "this" | IDENT | "new" IDENT "(" (expr ("," expr)*)? ")"
//! ```
//!
//! Whitespace is insignificant and `//` starts a line comment. Field reads
//! and writes are only accepted on `this`.

use thiserror::Error;

use super::ast::{ClassDef, FieldDef, MethodDef, Pos, SurfaceExpr, SurfaceProgram};
use crate::types::Type;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at {pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Class,
    New,
    This,
    Any,
    Star,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Class => "`class`".into(),
            Tok::New => "`new`".into(),
            Tok::This => "`this`".into(),
            Tok::Any => "`any`".into(),
            Tok::Star => "`*`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if ch.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if ch == '/' {
            bump(&mut chars);
            if chars.peek() == Some(&'/') {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            return Err(ParseError { pos, message: "unexpected `/`".into() });
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "class" => Tok::Class,
                "new" => Tok::New,
                "this" => Tok::This,
                "any" => Tok::Any,
                _ => Tok::Ident(word),
            };
            out.push((tok, pos));
            continue;
        }
        let tok = match ch {
            '*' => Tok::Star,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            other => {
                return Err(ParseError { pos, message: format!("unexpected character `{other}`") });
            }
        };
        bump(&mut chars);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.at + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            other => self.error(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Star | Tok::Any => {
                self.advance();
                Ok(Type::Any)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Type::Class(name))
            }
            other => self.error(format!("expected a type, found {}", other.describe())),
        }
    }

    fn program(&mut self) -> Result<SurfaceProgram, ParseError> {
        let mut classes = Vec::new();
        while *self.peek() == Tok::Class {
            classes.push(self.class()?);
        }
        let main_pos = self.pos();
        let main = self.expr()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("expected end of input, found {}", self.peek().describe()));
        }
        let mut program = SurfaceProgram::new(classes, main);
        program.main_pos = main_pos;
        Ok(program)
    }

    fn class(&mut self) -> Result<ClassDef, ParseError> {
        let pos = self.pos();
        self.expect(Tok::Class)?;
        let name = self.ident("a class name")?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        loop {
            match (self.peek(), self.peek2()) {
                (Tok::RBrace, _) => break,
                (Tok::Ident(_), Tok::Colon) if methods.is_empty() => {
                    let name = self.ident("a field name")?;
                    self.expect(Tok::Colon)?;
                    let ty = self.ty()?;
                    fields.push(FieldDef { name, ty });
                }
                (Tok::Ident(_), Tok::Colon) => {
                    return self.error("fields must be declared before methods");
                }
                (Tok::Ident(_), Tok::LParen) => methods.push(self.method()?),
                (Tok::Eof, _) => return self.error(format!("unclosed class `{name}`")),
                (other, _) => {
                    return self.error(format!("expected a field, a method or `}}`, found {}", other.describe()));
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let mut class = ClassDef::new(name, fields, methods);
        class.pos = pos;
        Ok(class)
    }

    fn method(&mut self) -> Result<MethodDef, ParseError> {
        let pos = self.pos();
        let name = self.ident("a method name")?;
        self.expect(Tok::LParen)?;
        let param = self.ident("a parameter name")?;
        self.expect(Tok::Colon)?;
        let param_type = self.ty()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        let return_type = self.ty()?;
        self.expect(Tok::LBrace)?;
        let body = self.expr()?;
        self.expect(Tok::RBrace)?;
        let mut method = MethodDef::new(name, param, param_type, return_type, body);
        method.pos = pos;
        Ok(method)
    }

    fn expr(&mut self) -> Result<SurfaceExpr, ParseError> {
        let mut expr = self.primary()?;
        while *self.peek() == Tok::Dot {
            self.advance();
            let name_pos = self.pos();
            let name = self.ident("a method or field name")?;
            match self.peek() {
                Tok::LParen => {
                    self.advance();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    expr = SurfaceExpr::invoke(expr, name, arg);
                }
                Tok::Eq => {
                    if expr != SurfaceExpr::This {
                        return Err(self_only(name_pos, &name));
                    }
                    self.advance();
                    let value = self.expr()?;
                    expr = SurfaceExpr::write(name, value);
                }
                _ => {
                    if expr != SurfaceExpr::This {
                        return Err(self_only(name_pos, &name));
                    }
                    expr = SurfaceExpr::read(name);
                }
            }
        }
        Ok(expr)
    }

    fn primary(&mut self) -> Result<SurfaceExpr, ParseError> {
        match self.peek().clone() {
            Tok::This => {
                self.advance();
                Ok(SurfaceExpr::This)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(SurfaceExpr::Var(name))
            }
            Tok::New => {
                self.advance();
                let class = self.ident("a class name")?;
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.expr()?);
                    while *self.peek() == Tok::Comma {
                        self.advance();
                        args.push(self.expr()?);
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(SurfaceExpr::New(class, args))
            }
            other => self.error(format!("expected an expression, found {}", other.describe())),
        }
    }
}

fn self_only(pos: Pos, field: &str) -> ParseError {
    ParseError { pos, message: format!("field `{field}` can only be accessed through `this`") }
}

/// Parses a complete surface program.
pub fn parse_program(source: &str) -> Result<SurfaceProgram, ParseError> {
    let toks = lex(source)?;
    Parser { toks, at: 0 }.program()
}

/// Parses a single surface expression.
pub fn parse_expr(source: &str) -> Result<SurfaceExpr, ParseError> {
    let toks = lex(source)?;
    let mut parser = Parser { toks, at: 0 };
    let expr = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return parser.error(format!("expected end of input, found {}", parser.peek().describe()));
    }
    Ok(expr)
}
