//! The operator table shared by epi and WC, and expression evaluation.

use std::fmt;

use thiserror::Error;

use super::syntax::{Expr, Value};
use super::types::BaseType;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    Lt,
    Eq,
    And,
    Or,
    Not,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Lt,
        Operator::Eq,
        Operator::And,
        Operator::Or,
        Operator::Not,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::Lt => "<",
            Operator::Eq => "=",
            Operator::And => "and",
            Operator::Or => "or",
            Operator::Not => "not",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Operator> {
        Operator::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Operator::Not => 1,
            _ => 2,
        }
    }

    /// Argument and result sorts. `=` is polymorphic over every base type
    /// (both arguments must agree), so it has no fixed argument list.
    pub fn signature(self) -> Option<(Vec<BaseType>, BaseType)> {
        use BaseType::{Bool, Int};
        match self {
            Operator::Add | Operator::Sub | Operator::Mul => Some((vec![Int, Int], Int)),
            Operator::Lt => Some((vec![Int, Int], Bool)),
            Operator::And | Operator::Or => Some((vec![Bool, Bool], Bool)),
            Operator::Not => Some((vec![Bool], Bool)),
            Operator::Eq => None,
        }
    }

    /// The result sort, which is fixed for every operator.
    pub fn result_sort(self) -> BaseType {
        match self {
            Operator::Add | Operator::Sub | Operator::Mul => BaseType::Int,
            _ => BaseType::Bool,
        }
    }

    pub fn apply(self, args: &[Value]) -> Result<Value, EvalError> {
        if args.len() != self.arity() {
            return Err(EvalError::Arity {
                op: self,
                expected: self.arity(),
                found: args.len(),
            });
        }
        let int = |i: usize| match &args[i] {
            Value::Int(n) => Ok(*n),
            v => Err(EvalError::Sort {
                op: self,
                position: i,
                value: v.clone(),
            }),
        };
        let boolean = |i: usize| match &args[i] {
            Value::Bool(b) => Ok(*b),
            v => Err(EvalError::Sort {
                op: self,
                position: i,
                value: v.clone(),
            }),
        };
        let checked = |r: Option<i64>| r.map(Value::Int).ok_or(EvalError::Overflow { op: self });
        match self {
            Operator::Add => checked(int(0)?.checked_add(int(1)?)),
            Operator::Sub => checked(int(0)?.checked_sub(int(1)?)),
            Operator::Mul => checked(int(0)?.checked_mul(int(1)?)),
            Operator::Lt => Ok(Value::Bool(int(0)? < int(1)?)),
            Operator::And => Ok(Value::Bool(boolean(0)? && boolean(1)?)),
            Operator::Or => Ok(Value::Bool(boolean(0)? || boolean(1)?)),
            Operator::Not => Ok(Value::Bool(!boolean(0)?)),
            Operator::Eq => match (&args[0], &args[1]) {
                (Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a == b)),
                (Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a == b)),
                (Value::Name(a), Value::Name(b)) => Ok(Value::Bool(a == b)),
                (_, v) => Err(EvalError::Sort {
                    op: self,
                    position: 1,
                    value: v.clone(),
                }),
            },
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("operator {op} expects {expected} arguments, got {found}")]
    Arity {
        op: Operator,
        expected: usize,
        found: usize,
    },
    #[error("operator {op} cannot take {value} as argument {position}")]
    Sort {
        op: Operator,
        position: usize,
        value: Value,
    },
    #[error("integer overflow in {op}")]
    Overflow { op: Operator },
}

/// Evaluates a closed expression. Names evaluate to themselves.
pub fn eval_expr(e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Val(v) => Ok(v.clone()),
        Expr::Op(op, args) => {
            let vals = args.iter().map(eval_expr).collect::<Result<Vec<_>, _>>()?;
            op.apply(&vals)
        }
    }
}
