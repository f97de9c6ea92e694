//! Parser for the `.wc` text format.
//!
//! ```text
//! program   ::= interface* class* 'main' '{' stm '}'
//! interface ::= 'interface' I '{' ('field' p ':' B ';' | 'method' f ':' 'proc' '(' B,* ')' ';')* '}'
//! class     ::= 'class' A ':' I '{' ('field' p ':=' v ';' | 'method' f '(' x,* ')' '{' stm '}')* '}'
//! stm       ::= simple (';' stm)?
//! simple    ::= 'skip' | 'var' B x ':=' e 'in' stm | x ':=' e | 'this' '.' p ':=' e
//!             | 'if' e 'then' simple 'else' simple | 'while' e 'do' simple
//!             | e '::' f '(' e,* ')' | '{' stm '}'
//! ```
//!
//! Class names are found by a pre-scan, so an identifier in an expression is
//! a class value when some class has that name and a variable otherwise.
//! Class, interface, field, method and variable names must be pairwise
//! distinct. A `var` that would shadow a variable in scope is renamed.

use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{ClassDecl, InterfaceDecl, MethodDecl, WcExpr, WcProgram, WcStm};
use crate::epi::{BaseType, Name, Operator, TypeName, Value};
use crate::lex::{tokenize, Cursor, ParseError, Tok};

pub const KEYWORDS: &[&str] = &[
    "interface", "class", "field", "method", "proc", "main", "skip", "var", "in", "if", "then", "else", "while",
    "do", "true", "false", "and", "or", "not", "int", "bool", "this", "new",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Category {
    Interface,
    Class,
    Field,
    Method,
    Variable,
}

impl Category {
    fn describe(self) -> &'static str {
        match self {
            Category::Interface => "an interface",
            Category::Class => "a class",
            Category::Field => "a field",
            Category::Method => "a method",
            Category::Variable => "a variable",
        }
    }
}

struct Parser {
    c: Cursor,
    classes: BTreeSet<String>,
    /// Every identifier in the source, so renamed variables stay fresh.
    taken: BTreeSet<String>,
    /// Variables in scope, innermost last: (source name, name used).
    scope: Vec<(String, Name)>,
    categories: BTreeMap<String, Category>,
    warnings: Vec<String>,
}

pub fn parse_program(src: &str) -> Result<WcProgram, ParseError> {
    parse_program_with_warnings(src).map(|(p, _)| p)
}

/// Also returns warnings about renamed variables.
pub fn parse_program_with_warnings(src: &str) -> Result<(WcProgram, Vec<String>), ParseError> {
    let mut p = Parser::new(src, None)?;
    let program = p.program()?;
    Ok((program, p.warnings))
}

/// Parses a lone statement in which `classes` are the class names.
pub fn parse_stm(src: &str, classes: &[&str]) -> Result<WcStm, ParseError> {
    let mut p = Parser::new(src, Some(classes))?;
    for a in classes {
        p.categories.insert(a.to_string(), Category::Class);
    }
    let s = p.stm()?;
    p.c.expect_eof()?;
    Ok(s)
}

impl Parser {
    fn new(src: &str, classes: Option<&[&str]>) -> Result<Parser, ParseError> {
        let tokens = tokenize(src)?;
        let mut taken = BTreeSet::new();
        let mut found = BTreeSet::new();
        for (i, t) in tokens.iter().enumerate() {
            if let Tok::Ident(s) = &t.tok {
                taken.insert(s.clone());
                if s == "class" {
                    if let Some(Tok::Ident(a)) = tokens.get(i + 1).map(|t| &t.tok) {
                        found.insert(a.clone());
                    }
                }
            }
        }
        let classes = match classes {
            Some(cs) => cs.iter().map(|s| s.to_string()).collect(),
            None => found,
        };
        Ok(Parser {
            c: Cursor::new(src, KEYWORDS)?,
            classes,
            taken,
            scope: Vec::new(),
            categories: BTreeMap::new(),
            warnings: Vec::new(),
        })
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        if let Tok::Ident(s) = self.c.peek() {
            if s.contains('$') {
                return self.c.error(format!("`$` is reserved and cannot appear in identifier `{s}`"));
            }
        }
        self.c.expect_ident(what)
    }

    /// Reads a declared identifier and records its category.
    fn declare(&mut self, what: &str, category: Category) -> Result<String, ParseError> {
        if let Tok::Ident(s) = self.c.peek().clone() {
            if let Some(previous) = self.categories.get(&s) {
                if *previous != category {
                    return self.c.error(format!(
                        "`{s}` is declared as {} but is already {}",
                        category.describe(),
                        previous.describe()
                    ));
                }
            }
        }
        let s = self.ident(what)?;
        self.categories.insert(s.clone(), category);
        Ok(s)
    }

    fn base_type(&mut self) -> Result<BaseType, ParseError> {
        if self.c.eat_keyword("int") {
            Ok(BaseType::Int)
        } else if self.c.eat_keyword("bool") {
            Ok(BaseType::Bool)
        } else {
            Ok(BaseType::named(&self.ident("a type")?))
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        match self.c.peek().clone() {
            Tok::Int(_) | Tok::Punct("-") => Ok(Value::Int(self.c.expect_int()?)),
            Tok::Ident(k) if k == "true" => {
                self.c.bump();
                Ok(Value::Bool(true))
            }
            Tok::Ident(k) if k == "false" => {
                self.c.bump();
                Ok(Value::Bool(false))
            }
            Tok::Ident(a) if self.classes.contains(&a) => {
                self.c.bump();
                Ok(Value::name(&a))
            }
            _ => self.c.unexpected("a value (integer, boolean or class name)"),
        }
    }

    fn program(&mut self) -> Result<WcProgram, ParseError> {
        let mut interfaces: Vec<InterfaceDecl> = Vec::new();
        while self.c.eat_keyword("interface") {
            let i = self.interface()?;
            if interfaces.iter().any(|j| j.name == i.name) {
                return self.c.error(format!("interface `{}` declared twice", i.name));
            }
            interfaces.push(i);
        }
        let mut classes: Vec<ClassDecl> = Vec::new();
        while self.c.eat_keyword("class") {
            let a = self.class()?;
            if classes.iter().any(|b| b.name == a.name) {
                return self.c.error(format!("class `{}` declared twice", a.name));
            }
            classes.push(a);
        }
        self.c.expect_keyword("main")?;
        let main = self.block()?;
        self.c.expect_eof()?;
        Ok(WcProgram {
            interfaces,
            classes,
            main,
        })
    }

    fn interface(&mut self) -> Result<InterfaceDecl, ParseError> {
        let name = self.declare("an interface name", Category::Interface)?;
        self.c.expect_punct("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        let mut members = BTreeSet::new();
        loop {
            let (category, what) = if self.c.eat_keyword("field") {
                (Category::Field, "a field name")
            } else if self.c.eat_keyword("method") {
                (Category::Method, "a method name")
            } else {
                break;
            };
            let m = self.declare(what, category)?;
            if !members.insert(m.clone()) {
                return self.c.error(format!("member `{m}` declared twice in interface `{name}`"));
            }
            self.c.expect_punct(":")?;
            if category == Category::Field {
                fields.push((Name::new(&m), self.base_type()?));
            } else {
                self.c.expect_keyword("proc")?;
                self.c.expect_punct("(")?;
                let mut params = Vec::new();
                if !self.c.is_punct(")") {
                    loop {
                        params.push(self.base_type()?);
                        if !self.c.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.c.expect_punct(")")?;
                methods.push((Name::new(&m), params));
            }
            self.c.expect_punct(";")?;
        }
        self.c.expect_punct("}")?;
        Ok(InterfaceDecl {
            name: TypeName::new(name),
            fields,
            methods,
        })
    }

    fn class(&mut self) -> Result<ClassDecl, ParseError> {
        let name = self.declare("a class name", Category::Class)?;
        self.c.expect_punct(":")?;
        let iface = self.ident("an interface name")?;
        self.c.expect_punct("{")?;
        let mut fields: Vec<(Name, Value)> = Vec::new();
        let mut methods: Vec<MethodDecl> = Vec::new();
        loop {
            if self.c.eat_keyword("field") {
                let p = self.declare("a field name", Category::Field)?;
                if fields.iter().any(|(q, _)| q.as_str() == p) {
                    return self.c.error(format!("field `{p}` declared twice in class `{name}`"));
                }
                self.c.expect_punct(":=")?;
                let v = self.value()?;
                self.c.expect_punct(";")?;
                fields.push((Name::new(p), v));
            } else if self.c.eat_keyword("method") {
                let f = self.declare("a method name", Category::Method)?;
                if methods.iter().any(|m| m.name.as_str() == f) {
                    return self.c.error(format!("method `{f}` declared twice in class `{name}`"));
                }
                self.c.expect_punct("(")?;
                let mut params: Vec<Name> = Vec::new();
                if !self.c.is_punct(")") {
                    loop {
                        let x = self.declare("a parameter name", Category::Variable)?;
                        if params.iter().any(|y| y.as_str() == x) {
                            return self.c.error(format!("parameter `{x}` declared twice"));
                        }
                        params.push(Name::new(x));
                        if !self.c.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.c.expect_punct(")")?;
                self.scope = params.iter().map(|x| (x.as_str().to_string(), x.clone())).collect();
                let body = self.block()?;
                self.scope.clear();
                methods.push(MethodDecl {
                    name: Name::new(f),
                    params,
                    body,
                });
            } else {
                break;
            }
        }
        self.c.expect_punct("}")?;
        Ok(ClassDecl {
            name: Name::new(name),
            iface: TypeName::new(iface),
            fields,
            methods,
        })
    }

    fn block(&mut self) -> Result<WcStm, ParseError> {
        self.c.expect_punct("{")?;
        let s = self.stm()?;
        self.c.expect_punct("}")?;
        Ok(s)
    }

    fn stm(&mut self) -> Result<WcStm, ParseError> {
        crate::grow(|| {
            let s = self.simple()?;
            if self.c.eat_punct(";") && !self.c.is_punct("}") && !matches!(self.c.peek(), Tok::Eof) {
                Ok(WcStm::seq(s, self.stm()?))
            } else {
                Ok(s)
            }
        })
    }

    fn resolve(&self, x: &str) -> Option<Name> {
        self.scope.iter().rev().find(|(s, _)| s == x).map(|(_, n)| n.clone())
    }

    fn simple(&mut self) -> Result<WcStm, ParseError> {
        crate::grow(|| {
            if self.c.eat_keyword("skip") {
                return Ok(WcStm::Skip);
            }
            if self.c.eat_keyword("var") {
                let ty = self.base_type()?;
                let (line, column) = self.c.position();
                let x = self.declare("a variable name", Category::Variable)?;
                self.c.expect_punct(":=")?;
                let init = self.expr()?;
                self.c.expect_keyword("in")?;
                let used = if self.resolve(&x).is_some() {
                    let fresh = (1..)
                        .map(|k| format!("{x}_{k}"))
                        .find(|n| !self.taken.contains(n))
                        .expect("unbounded");
                    self.taken.insert(fresh.clone());
                    self.warnings.push(format!(
                        "line {line}, column {column}: variable `{x}` shadows a variable in scope; renamed to `{fresh}`"
                    ));
                    fresh
                } else {
                    x.clone()
                };
                self.scope.push((x, Name::new(&used)));
                let body = self.stm();
                self.scope.pop();
                return Ok(WcStm::VarDecl {
                    var: Name::new(used),
                    ty,
                    init,
                    body: Box::new(body?),
                });
            }
            if self.c.eat_keyword("if") {
                let cond = self.expr()?;
                self.c.expect_keyword("then")?;
                let t = self.simple()?;
                self.c.expect_keyword("else")?;
                let e = self.simple()?;
                return Ok(WcStm::if_(cond, t, e));
            }
            if self.c.eat_keyword("while") {
                let cond = self.expr()?;
                self.c.expect_keyword("do")?;
                let body = self.simple()?;
                return Ok(WcStm::while_(cond, body));
            }
            if self.c.is_punct("{") {
                return self.block();
            }
            let e = self.expr()?;
            if self.c.eat_punct(":=") {
                let rhs = self.expr()?;
                return match e {
                    WcExpr::Var(x) => Ok(WcStm::AssignVar(x, rhs)),
                    WcExpr::Field(base, p) if *base == WcExpr::This => Ok(WcStm::AssignField(p, rhs)),
                    other => self.c.error(format!("cannot assign to `{other}`; only variables and this.p")),
                };
            }
            if self.c.eat_punct("::") {
                let method = Name::new(self.ident("a method name")?);
                self.c.expect_punct("(")?;
                let mut args = Vec::new();
                if !self.c.is_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.c.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.c.expect_punct(")")?;
                return Ok(WcStm::Call {
                    target: e,
                    method,
                    args,
                });
            }
            self.c.unexpected("`:=` or `::` after an expression statement")
        })
    }

    fn expr(&mut self) -> Result<WcExpr, ParseError> {
        crate::grow(|| {
            let mut e = self.and_expr()?;
            while self.c.eat_keyword("or") {
                e = WcExpr::op(Operator::Or, vec![e, self.and_expr()?]);
            }
            Ok(e)
        })
    }

    fn and_expr(&mut self) -> Result<WcExpr, ParseError> {
        let mut e = self.not_expr()?;
        while self.c.eat_keyword("and") {
            e = WcExpr::op(Operator::And, vec![e, self.not_expr()?]);
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> Result<WcExpr, ParseError> {
        if self.c.eat_keyword("not") {
            let e = crate::grow(|| self.not_expr())?;
            Ok(WcExpr::op(Operator::Not, vec![e]))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_expr(&mut self) -> Result<WcExpr, ParseError> {
        let e = self.add_expr()?;
        let op = if self.c.eat_punct("=") {
            Operator::Eq
        } else if self.c.eat_punct("<") {
            Operator::Lt
        } else {
            return Ok(e);
        };
        let r = self.add_expr()?;
        if self.c.is_punct("=") || self.c.is_punct("<") {
            return self.c.error("comparisons do not associate; add parentheses");
        }
        Ok(WcExpr::op(op, vec![e, r]))
    }

    fn add_expr(&mut self) -> Result<WcExpr, ParseError> {
        let mut e = self.mul_expr()?;
        loop {
            let op = if self.c.eat_punct("+") {
                Operator::Add
            } else if self.c.eat_punct("-") {
                Operator::Sub
            } else {
                return Ok(e);
            };
            e = WcExpr::op(op, vec![e, self.mul_expr()?]);
        }
    }

    fn mul_expr(&mut self) -> Result<WcExpr, ParseError> {
        let mut e = self.postfix()?;
        while self.c.eat_punct("*") {
            e = WcExpr::op(Operator::Mul, vec![e, self.postfix()?]);
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<WcExpr, ParseError> {
        let mut e = self.atom()?;
        while self.c.eat_punct(".") {
            let p = self.ident("a field name")?;
            e = WcExpr::Field(Box::new(e), Name::new(p));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<WcExpr, ParseError> {
        match self.c.peek().clone() {
            Tok::Int(_) | Tok::Punct("-") => Ok(WcExpr::int(self.c.expect_int()?)),
            Tok::Ident(k) if k == "true" || k == "false" => {
                self.c.bump();
                Ok(WcExpr::bool(k == "true"))
            }
            Tok::Ident(k) if k == "this" => {
                self.c.bump();
                Ok(WcExpr::This)
            }
            Tok::Punct("(") => {
                self.c.bump();
                let e = self.expr()?;
                self.c.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(_) if self.c.is_ident() => {
                let x = self.ident("a name")?;
                if let Some(n) = self.resolve(&x) {
                    Ok(WcExpr::Var(n))
                } else if self.classes.contains(&x) {
                    Ok(WcExpr::Val(Value::name(&x)))
                } else {
                    Ok(WcExpr::Var(Name::new(x)))
                }
            }
            _ => self.c.unexpected("an expression"),
        }
    }
}
