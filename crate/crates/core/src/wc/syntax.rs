//! WC abstract syntax, in the typed form: classes carry an interface
//! annotation and local variables a declared type.
//!
//! WC shares its values, base types and operators with epi. A class name is
//! represented as [`Value::Name`].

use crate::epi::{BaseType, Name, Operator, TypeName, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WcExpr {
    Val(Value),
    Var(Name),
    This,
    Field(Box<WcExpr>, Name),
    Op(Operator, Vec<WcExpr>),
}

impl WcExpr {
    pub fn int(i: i64) -> WcExpr {
        WcExpr::Val(Value::Int(i))
    }

    pub fn bool(b: bool) -> WcExpr {
        WcExpr::Val(Value::Bool(b))
    }

    pub fn class(a: &str) -> WcExpr {
        WcExpr::Val(Value::name(a))
    }

    pub fn var(x: &str) -> WcExpr {
        WcExpr::Var(Name::new(x))
    }

    pub fn field(base: WcExpr, p: &str) -> WcExpr {
        WcExpr::Field(Box::new(base), Name::new(p))
    }

    pub fn op(op: Operator, args: Vec<WcExpr>) -> WcExpr {
        WcExpr::Op(op, args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WcStm {
    Skip,
    VarDecl {
        var: Name,
        ty: BaseType,
        init: WcExpr,
        body: Box<WcStm>,
    },
    AssignVar(Name, WcExpr),
    /// `this.p := e`
    AssignField(Name, WcExpr),
    Seq(Box<WcStm>, Box<WcStm>),
    If(WcExpr, Box<WcStm>, Box<WcStm>),
    While(WcExpr, Box<WcStm>),
    Call {
        target: WcExpr,
        method: Name,
        args: Vec<WcExpr>,
    },
}

impl WcStm {
    pub fn seq(a: WcStm, b: WcStm) -> WcStm {
        WcStm::Seq(Box::new(a), Box::new(b))
    }

    /// Right-nested sequence of the statements; `skip` when empty.
    pub fn seq_all(stms: impl IntoIterator<Item = WcStm>) -> WcStm {
        let mut v: Vec<WcStm> = stms.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return WcStm::Skip;
        };
        while let Some(s) = v.pop() {
            acc = WcStm::seq(s, acc);
        }
        acc
    }

    pub fn var_decl(var: &str, ty: BaseType, init: WcExpr, body: WcStm) -> WcStm {
        WcStm::VarDecl {
            var: Name::new(var),
            ty,
            init,
            body: Box::new(body),
        }
    }

    pub fn if_(cond: WcExpr, t: WcStm, f: WcStm) -> WcStm {
        WcStm::If(cond, Box::new(t), Box::new(f))
    }

    pub fn while_(cond: WcExpr, body: WcStm) -> WcStm {
        WcStm::While(cond, Box::new(body))
    }

    pub fn call(target: WcExpr, method: &str, args: Vec<WcExpr>) -> WcStm {
        WcStm::Call {
            target,
            method: Name::new(method),
            args,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: TypeName,
    pub fields: Vec<(Name, BaseType)>,
    pub methods: Vec<(Name, Vec<BaseType>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: WcStm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: Name,
    pub iface: TypeName,
    pub fields: Vec<(Name, Value)>,
    pub methods: Vec<MethodDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WcProgram {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
    pub main: WcStm,
}
