//! Prefix s-expression text form for expression trees,
//! e.g. `(+ (* v t) (* (* h a) (* t t)))`.

use super::{BinaryOp, ExprError, ExprTree, UnaryOp};
use crate::sexpr::{self, SExpr};

pub fn to_text(tree: &ExprTree) -> String {
    match tree {
        ExprTree::Terminal(name) => name.clone(),
        ExprTree::Unary(op, c) => format!("({} {})", op.symbol(), to_text(c)),
        ExprTree::Binary(op, l, r) => {
            format!("({} {} {})", op.symbol(), to_text(l), to_text(r))
        }
    }
}

pub fn parse_text(input: &str) -> Result<ExprTree, ExprError> {
    lower(&sexpr::parse(input)?)
}

fn lower(expr: &SExpr) -> Result<ExprTree, ExprError> {
    match expr {
        SExpr::Atom { text, pos } => {
            if BinaryOp::from_symbol(text).is_some() || UnaryOp::from_symbol(text).is_some() {
                return Err(ExprError::WrongArity {
                    pos: *pos,
                    name: text.clone(),
                    expected: if BinaryOp::from_symbol(text).is_some() {
                        2
                    } else {
                        1
                    },
                    got: 0,
                });
            }
            Ok(ExprTree::Terminal(text.clone()))
        }
        SExpr::List { items, pos } => {
            let head = &items[0];
            let SExpr::Atom {
                text: op_name,
                pos: op_pos,
            } = head
            else {
                return Err(ExprError::UnknownOperator {
                    pos: head.pos(),
                    name: "(list)".into(),
                });
            };
            let args = &items[1..];
            if let Some(op) = BinaryOp::from_symbol(op_name) {
                if args.len() != 2 {
                    return Err(ExprError::WrongArity {
                        pos: *op_pos,
                        name: op_name.clone(),
                        expected: 2,
                        got: args.len(),
                    });
                }
                return Ok(ExprTree::binary(op, lower(&args[0])?, lower(&args[1])?));
            }
            if let Some(op) = UnaryOp::from_symbol(op_name) {
                if args.len() != 1 {
                    return Err(ExprError::WrongArity {
                        pos: *op_pos,
                        name: op_name.clone(),
                        expected: 1,
                        got: args.len(),
                    });
                }
                return Ok(ExprTree::unary(op, lower(&args[0])?));
            }
            Err(ExprError::UnknownOperator {
                pos: *pos,
                name: op_name.clone(),
            })
        }
    }
}
