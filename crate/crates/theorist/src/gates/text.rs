//! Prefix s-expression text form for gate trees,
//! e.g. `(+ S (* (* (// I X) (* (// D Z) T)) T))`.

use super::{Gate, GateError, GateTree};
use crate::sexpr::{self, SExpr};

fn op_symbol(tree: &GateTree) -> &'static str {
    match tree {
        GateTree::Add(..) => "+",
        GateTree::Mul(..) => "*",
        GateTree::Choice(..) => "//",
        GateTree::Leaf(_) => unreachable!(),
    }
}

pub fn to_text(tree: &GateTree) -> String {
    match tree {
        GateTree::Leaf(g) => g.name().to_string(),
        GateTree::Add(l, r) | GateTree::Mul(l, r) | GateTree::Choice(l, r) => {
            format!("({} {} {})", op_symbol(tree), to_text(l), to_text(r))
        }
    }
}

pub fn parse_text(input: &str) -> Result<GateTree, GateError> {
    lower(&sexpr::parse(input)?)
}

fn lower(expr: &SExpr) -> Result<GateTree, GateError> {
    match expr {
        SExpr::Atom { text, pos } => match Gate::from_name(text) {
            Some(g) => Ok(GateTree::Leaf(g)),
            None => Err(GateError::UnknownGate {
                pos: *pos,
                name: text.clone(),
            }),
        },
        SExpr::List { items, pos } => {
            let SExpr::Atom {
                text: op_name,
                pos: op_pos,
            } = &items[0]
            else {
                return Err(GateError::UnknownGate {
                    pos: items[0].pos(),
                    name: "(list)".into(),
                });
            };
            let build: fn(GateTree, GateTree) -> GateTree = match op_name.as_str() {
                "+" => GateTree::add,
                "*" => GateTree::mul,
                "//" => GateTree::choice,
                _ => {
                    return Err(GateError::UnknownGate {
                        pos: *pos,
                        name: op_name.clone(),
                    })
                }
            };
            let args = &items[1..];
            if args.len() != 2 {
                return Err(GateError::WrongArity {
                    pos: *op_pos,
                    name: op_name.clone(),
                    expected: 2,
                    got: args.len(),
                });
            }
            Ok(build(lower(&args[0])?, lower(&args[1])?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::GateConfig;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simple_sum_round_trips() {
        let tree = parse_text("(+ Y I)").unwrap();
        assert_eq!(
            tree,
            GateTree::add(GateTree::leaf(Gate::Y), GateTree::leaf(Gate::I))
        );
        assert_eq!(to_text(&tree), "(+ Y I)");
    }

    #[test]
    fn four_strategy_text_parses_with_two_choices() {
        let tree = parse_text("(+ S (* (* (// I X) (* (// D Z) T)) T))").unwrap();
        assert_eq!(tree.choice_count(), 2);
        assert_eq!(to_text(&tree), "(+ S (* (* (// I X) (* (// D Z) T)) T))");
    }

    #[test]
    fn arity_error_on_missing_argument() {
        assert!(matches!(
            parse_text("(+ Y)").unwrap_err(),
            GateError::WrongArity {
                expected: 2,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn unknown_gate_is_rejected() {
        assert!(matches!(
            parse_text("(+ Y Q)").unwrap_err(),
            GateError::UnknownGate { .. }
        ));
    }

    proptest! {
        #[test]
        fn random_gate_trees_round_trip(seed in 0u64..400) {
            let config = GateConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = config.random_tree(&mut rng);
            prop_assert_eq!(parse_text(&to_text(&tree)).unwrap(), tree);
        }
    }
}
