//! Deterministic concrete syntax for KafKa terms and tables.

use std::fmt;

use super::ast::{KafkaClassDef, KafkaClassTable, KafkaExpr, KafkaMethodDef, KafkaProgram};

/// Binding strength, loosest first.
fn level(e: &KafkaExpr) -> u8 {
    match e {
        KafkaExpr::Seq(..) => 0,
        KafkaExpr::SubCast(..)
        | KafkaExpr::BehCast(..)
        | KafkaExpr::FieldWrite(..)
        | KafkaExpr::AddrFieldWrite(..) => 1,
        KafkaExpr::StaticCall { .. } | KafkaExpr::DynCall { .. } => 2,
        _ => 3,
    }
}

struct At<'a>(&'a KafkaExpr, u8);

impl fmt::Display for At<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if level(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn cast(f: &mut fmt::Formatter<'_>, open: &str, close: &str, t: &impl fmt::Display, body: &KafkaExpr) -> fmt::Result {
    let gap = if level(body) == 2 { " " } else { "" };
    write!(f, "{open}{t}{close}{gap}{}", At(body, 1))
}

impl fmt::Display for KafkaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KafkaExpr::Var(x) => f.write_str(x),
            KafkaExpr::This => f.write_str("this"),
            KafkaExpr::That => f.write_str("this.that"),
            KafkaExpr::FieldRead(field) => write!(f, "this.{field}"),
            KafkaExpr::FieldWrite(field, v) => write!(f, "this.{field} = {}", At(v, 1)),
            KafkaExpr::New(class, args) => {
                write!(f, "new {class}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            KafkaExpr::StaticCall { receiver, method, arg, arg_type, ret_type } => {
                write!(f, "{}.{method}({arg}){{{arg_type}->{ret_type}}}", At(receiver, 2))
            }
            KafkaExpr::DynCall { receiver, method, arg } => write!(f, "{}@{method}({arg})", At(receiver, 2)),
            KafkaExpr::SubCast(t, body) => cast(f, "<", ">", t, body),
            KafkaExpr::BehCast(t, body) => cast(f, "<<", ">>", t, body),
            KafkaExpr::Seq(first, second) => write!(f, "{} ; {second}", At(first, 1)),
            KafkaExpr::Addr(a) => write!(f, "{a}"),
            KafkaExpr::AddrFieldRead(a, field) => write!(f, "{a}.{field}"),
            KafkaExpr::AddrFieldWrite(a, field, v) => write!(f, "{a}.{field} = {}", At(v, 1)),
        }
    }
}

impl fmt::Display for KafkaMethodDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}:{}):{} {{ {} }}", self.name, self.param, self.param_type, self.return_type, self.body)
    }
}

impl fmt::Display for KafkaClassDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class {} {{", self.name)?;
        for field in &self.fields {
            writeln!(f, "  {}:{}", field.name, field.ty)?;
        }
        for m in &self.methods {
            writeln!(f, "  {m}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for KafkaClassTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for class in self.classes() {
            writeln!(f, "{class}")?;
        }
        Ok(())
    }
}

impl fmt::Display for KafkaProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.table, self.main)
    }
}
