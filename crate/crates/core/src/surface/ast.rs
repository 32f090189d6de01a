use std::fmt;

use crate::types::{ClassSignatures, MethodSig, Type};

/// A position in source text, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceExpr {
    Var(String),
    This,
    /// `this.f`
    FieldRead(String),
    /// `this.f = e`
    FieldWrite(String, Box<SurfaceExpr>),
    Invoke {
        receiver: Box<SurfaceExpr>,
        method: String,
        arg: Box<SurfaceExpr>,
    },
    New(String, Vec<SurfaceExpr>),
}

impl SurfaceExpr {
    pub fn var(name: impl Into<String>) -> Self {
        SurfaceExpr::Var(name.into())
    }

    pub fn read(field: impl Into<String>) -> Self {
        SurfaceExpr::FieldRead(field.into())
    }

    pub fn write(field: impl Into<String>, value: SurfaceExpr) -> Self {
        SurfaceExpr::FieldWrite(field.into(), Box::new(value))
    }

    pub fn invoke(receiver: SurfaceExpr, method: impl Into<String>, arg: SurfaceExpr) -> Self {
        SurfaceExpr::Invoke { receiver: Box::new(receiver), method: method.into(), arg: Box::new(arg) }
    }

    pub fn new_object(class: impl Into<String>, args: Vec<SurfaceExpr>) -> Self {
        SurfaceExpr::New(class.into(), args)
    }

    /// Nesting depth; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            SurfaceExpr::Var(_) | SurfaceExpr::This | SurfaceExpr::FieldRead(_) => 1,
            SurfaceExpr::FieldWrite(_, v) => 1 + v.depth(),
            SurfaceExpr::Invoke { receiver, arg, .. } => 1 + receiver.depth().max(arg.depth()),
            SurfaceExpr::New(_, args) => 1 + args.iter().map(SurfaceExpr::depth).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for SurfaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceExpr::Var(x) => f.write_str(x),
            SurfaceExpr::This => f.write_str("this"),
            SurfaceExpr::FieldRead(field) => write!(f, "this.{field}"),
            SurfaceExpr::FieldWrite(field, v) => write!(f, "this.{field} = {v}"),
            SurfaceExpr::Invoke { receiver, method, arg } => write!(f, "{receiver}.{method}({arg})"),
            SurfaceExpr::New(class, args) => {
                write!(f, "new {class}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDef {
    pub name: String,
    pub ty: Type,
}

impl FieldDef {
    pub fn new(name: impl Into<String>, ty: Type) -> Self {
        FieldDef { name: name.into(), ty }
    }
}

#[derive(Clone, Debug)]
pub struct MethodDef {
    pub name: String,
    pub param: String,
    pub param_type: Type,
    pub return_type: Type,
    pub body: SurfaceExpr,
    pub pos: Pos,
}

impl MethodDef {
    pub fn new(
        name: impl Into<String>,
        param: impl Into<String>,
        param_type: Type,
        return_type: Type,
        body: SurfaceExpr,
    ) -> Self {
        MethodDef {
            name: name.into(),
            param: param.into(),
            param_type,
            return_type,
            body,
            pos: Pos::default(),
        }
    }

    pub fn sig(&self) -> MethodSig {
        MethodSig { name: self.name.clone(), param: self.param_type.clone(), ret: self.return_type.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct ClassDef {
    pub name: String,
    pub fields: Vec<FieldDef>,
    pub methods: Vec<MethodDef>,
    pub pos: Pos,
}

impl ClassDef {
    pub fn new(name: impl Into<String>, fields: Vec<FieldDef>, methods: Vec<MethodDef>) -> Self {
        ClassDef { name: name.into(), fields, methods, pos: Pos::default() }
    }

    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDef> {
        self.methods.iter().find(|m| m.name == name)
    }
}

/// The class table `K` of a surface program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassTable {
    pub classes: Vec<ClassDef>,
}

impl ClassTable {
    pub fn new(classes: Vec<ClassDef>) -> Self {
        ClassTable { classes }
    }

    pub fn get(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }
}

impl ClassSignatures for ClassTable {
    fn has_class(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    fn method_sigs(&self, class: &str) -> Option<Vec<MethodSig>> {
        self.get(class).map(|c| c.methods.iter().map(MethodDef::sig).collect())
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceProgram {
    pub table: ClassTable,
    pub main: SurfaceExpr,
    pub main_pos: Pos,
}

impl SurfaceProgram {
    pub fn new(classes: Vec<ClassDef>, main: SurfaceExpr) -> Self {
        SurfaceProgram { table: ClassTable::new(classes), main, main_pos: Pos::default() }
    }
}

impl fmt::Display for SurfaceProgram {
    /// Prints in the concrete grammar accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for class in &self.table.classes {
            writeln!(f, "class {} {{", class.name)?;
            for field in &class.fields {
                writeln!(f, "  {}:{}", field.name, field.ty)?;
            }
            for m in &class.methods {
                writeln!(f, "  {}({}:{}):{} {{ {} }}", m.name, m.param, m.param_type, m.return_type, m.body)?;
            }
            writeln!(f, "}}")?;
        }
        writeln!(f, "{}", self.main)
    }
}

// Source positions are diagnostics only; equality is structural.

impl PartialEq for MethodDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.param == other.param
            && self.param_type == other.param_type
            && self.return_type == other.return_type
            && self.body == other.body
    }
}

impl Eq for MethodDef {}

impl PartialEq for ClassDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.fields == other.fields && self.methods == other.methods
    }
}

impl Eq for ClassDef {}

impl PartialEq for SurfaceProgram {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.main == other.main
    }
}

impl Eq for SurfaceProgram {}
