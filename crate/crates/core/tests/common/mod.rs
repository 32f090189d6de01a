//! Shared test support: a seeded generator of well-typed surface programs
//! and a reference subtyping oracle.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradual_core::surface::{
    check_program, type_surface_expr, ClassDef, ClassTable, FieldDef, MethodDef, SurfaceExpr, SurfaceProgram,
};
use gradual_core::types::{convertible, ClassSignatures, MethodSig, Type, TypeEnv};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_classes: usize,
    pub max_methods: usize,
    pub max_depth: usize,
    /// Every annotation is `any`.
    pub untyped: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_classes: 4, max_methods: 3, max_depth: 5, untyped: false }
    }
}

const METHODS: [&str; 4] = ["a", "b", "c", "d"];
const FIELDS: [&str; 2] = ["f", "g"];

struct Gen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    table: ClassTable,
}

impl Gen {
    fn class_name(i: usize) -> String {
        format!("C{i}")
    }

    fn pick_type(&mut self, limit: usize) -> Type {
        if self.cfg.untyped || limit == 0 || self.rng.gen_bool(0.4) {
            Type::Any
        } else {
            Type::class(Self::class_name(self.rng.gen_range(0..limit)))
        }
    }

    /// Class skeletons with placeholder bodies. Field types only mention
    /// earlier classes so every class can be instantiated; `C0` has no
    /// fields.
    fn skeleton(&mut self) {
        let n = self.rng.gen_range(1..=self.cfg.max_classes);
        let mut classes = Vec::new();
        for i in 0..n {
            let nfields = if i == 0 { 0 } else { self.rng.gen_range(0..=FIELDS.len()) };
            let fields = FIELDS[..nfields].iter().map(|f| FieldDef::new(*f, self.pick_type(i))).collect();
            let nmethods = self.rng.gen_range(0..=self.cfg.max_methods);
            let mut names = METHODS.to_vec();
            names.shuffle(&mut self.rng);
            let methods = names[..nmethods]
                .iter()
                .map(|m| MethodDef::new(*m, "x", self.pick_type(n), self.pick_type(n), SurfaceExpr::var("x")))
                .collect();
            classes.push(ClassDef::new(Self::class_name(i), fields, methods));
        }
        self.table = ClassTable::new(classes);
    }

    fn convertible(&self, env: &TypeEnv, e: &SurfaceExpr, target: &Type) -> bool {
        match type_surface_expr(env, &self.table, e) {
            Ok(t) => convertible(&self.table, &t, target).unwrap_or(false),
            Err(_) => false,
        }
    }

    fn this_class(&self, env: &TypeEnv) -> Option<&ClassDef> {
        env.this_type().and_then(Type::class_name).and_then(|c| self.table.get(c))
    }

    fn expr(&mut self, env: &TypeEnv, target: &Type, budget: usize, receiver: bool) -> SurfaceExpr {
        for _ in 0..6 {
            if let Some(e) = self.candidate(env, budget, receiver) {
                if self.convertible(env, &e, target) {
                    return e;
                }
            }
        }
        self.fallback(env, target)
    }

    fn candidate(&mut self, env: &TypeEnv, budget: usize, receiver: bool) -> Option<SurfaceExpr> {
        let choices = if budget <= 1 { 3 } else { 6 };
        match self.rng.gen_range(0..choices) {
            0 => env.lookup("x").map(|_| SurfaceExpr::var("x")),
            1 => env.this_type().map(|_| SurfaceExpr::This),
            2 => {
                let fields = self.this_class(env)?.fields.clone();
                let f = fields.choose(&mut self.rng)?.name.clone();
                Some(SurfaceExpr::read(f))
            }
            3 => {
                let class = self.table.classes.choose(&mut self.rng)?.clone();
                let args = class.fields.iter().map(|f| self.expr(env, &f.ty, budget - 1, false)).collect();
                Some(SurfaceExpr::new_object(class.name, args))
            }
            4 => {
                let n = self.table.classes.len();
                let want = self.pick_type(n);
                let recv = self.expr(env, &want, budget - 1, true);
                let (method, param) = match type_surface_expr(env, &self.table, &recv).ok()? {
                    Type::Any => (METHODS.choose(&mut self.rng)?.to_string(), Type::Any),
                    Type::Class(c) => {
                        let m = self.table.get(&c)?.methods.choose(&mut self.rng)?;
                        (m.name.clone(), m.param_type.clone())
                    }
                };
                let arg = self.expr(env, &param, budget - 1, false);
                Some(SurfaceExpr::invoke(recv, method, arg))
            }
            _ if receiver => None,
            _ => {
                let fields = self.this_class(env)?.fields.clone();
                let field = fields.choose(&mut self.rng)?.clone();
                let value = self.expr(env, &field.ty, budget - 1, false);
                Some(SurfaceExpr::write(field.name, value))
            }
        }
    }

    fn fallback(&mut self, env: &TypeEnv, target: &Type) -> SurfaceExpr {
        let x = SurfaceExpr::var("x");
        if env.lookup("x").is_some() && self.convertible(env, &x, target) {
            return x;
        }
        if env.this_type().is_some() && self.convertible(env, &SurfaceExpr::This, target) {
            return SurfaceExpr::This;
        }
        let class = match target {
            Type::Any => Self::class_name(0),
            Type::Class(c) => c.clone(),
        };
        let fields = self.table.get(&class).map(|c| c.fields.clone()).unwrap_or_default();
        let args = fields.iter().map(|f| self.fallback(env, &f.ty)).collect();
        SurfaceExpr::new_object(class, args)
    }

    fn program(&mut self) -> SurfaceProgram {
        self.skeleton();
        let depth = self.cfg.max_depth;
        for ci in 0..self.table.classes.len() {
            for mi in 0..self.table.classes[ci].methods.len() {
                let (cname, m) = (self.table.classes[ci].name.clone(), self.table.classes[ci].methods[mi].clone());
                let env = TypeEnv::for_method(&cname, &m.param, &m.param_type);
                let body = self.expr(&env, &m.return_type, depth, false);
                self.table.classes[ci].methods[mi].body = body;
            }
        }
        let main = self.expr(&TypeEnv::new(), &Type::Any, depth, false);
        SurfaceProgram::new(self.table.classes.clone(), main)
    }
}

fn max_depth(p: &SurfaceProgram) -> usize {
    let bodies = p.table.classes.iter().flat_map(|c| c.methods.iter().map(|m| m.body.depth()));
    bodies.chain([p.main.depth()]).max().unwrap_or(0)
}

/// A well-typed program within the configured bounds, determined by `seed`.
pub fn program(seed: u64, cfg: &GenConfig) -> SurfaceProgram {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), cfg: cfg.clone(), table: ClassTable::default() };
    loop {
        let p = g.program();
        if max_depth(&p) <= cfg.max_depth && check_program(&p).is_ok() {
            return p;
        }
    }
}

/// `count` programs from consecutive seeds starting at `first`.
pub fn corpus(first: u64, count: u64, cfg: &GenConfig) -> Vec<SurfaceProgram> {
    (first..first + count).map(|s| program(s, cfg)).collect()
}

/// Structural subtyping as a greatest fixpoint: start from all class pairs
/// and discard pairs that fail the method condition until nothing changes.
pub fn gfp_subtyping<T: ClassSignatures + ?Sized>(table: &T, classes: &[String]) -> BTreeSet<(String, String)> {
    let sigs: BTreeMap<&str, Vec<MethodSig>> =
        classes.iter().map(|c| (c.as_str(), table.method_sigs(c).unwrap_or_default())).collect();
    let mut rel: BTreeSet<(String, String)> =
        classes.iter().flat_map(|c| classes.iter().map(move |d| (c.clone(), d.clone()))).collect();
    let holds = |rel: &BTreeSet<(String, String)>, s: &Type, t: &Type| match (s, t) {
        (Type::Any, Type::Any) => true,
        (Type::Class(a), Type::Class(b)) => rel.contains(&(a.clone(), b.clone())),
        _ => false,
    };
    loop {
        let drop: Vec<_> = rel
            .iter()
            .filter(|(c, d)| {
                !sigs[d.as_str()].iter().all(|dm| {
                    sigs[c.as_str()]
                        .iter()
                        .any(|cm| cm.name == dm.name && holds(&rel, &dm.param, &cm.param) && holds(&rel, &cm.ret, &dm.ret))
                })
            })
            .cloned()
            .collect();
        if drop.is_empty() {
            return rel;
        }
        for pair in drop {
            rel.remove(&pair);
        }
    }
}
