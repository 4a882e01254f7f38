//! Minimal s-expression reader shared by the tree text formats.
//!
//! Grammar: `expr := atom | '(' expr+ ')'`. Atoms are runs of characters
//! other than parentheses and whitespace. Errors carry the byte offset and
//! the token class the reader expected there.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom { text: String, pos: usize },
    List { items: Vec<SExpr>, pos: usize },
}

impl SExpr {
    pub fn pos(&self) -> usize {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SexprError {
    /// Byte offset into the input.
    pub pos: usize,
    /// Token class the reader expected at `pos`.
    pub expected: String,
    /// What was actually there.
    pub found: String,
}

impl fmt::Display for SexprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at byte {}: expected {}, found {}",
            self.pos, self.expected, self.found
        )
    }
}

impl std::error::Error for SexprError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open(usize),
    Close(usize),
    Atom(String, usize),
}

impl Token {
    fn pos(&self) -> usize {
        match self {
            Token::Open(p) | Token::Close(p) => *p,
            Token::Atom(_, p) => *p,
        }
    }

    fn describe(&self) -> String {
        match self {
            Token::Open(_) => "`(`".into(),
            Token::Close(_) => "`)`".into(),
            Token::Atom(a, _) => format!("atom {a:?}"),
        }
    }
}

fn tokenize(input: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut atom_start: Option<usize> = None;
    for (i, c) in input.char_indices() {
        match c {
            '(' | ')' => {
                if let Some(s) = atom_start.take() {
                    tokens.push(Token::Atom(input[s..i].to_string(), s));
                }
                if c == '(' {
                    tokens.push(Token::Open(i));
                } else {
                    tokens.push(Token::Close(i));
                }
            }
            c if c.is_whitespace() => {
                if let Some(s) = atom_start.take() {
                    tokens.push(Token::Atom(input[s..i].to_string(), s));
                }
            }
            _ => {
                if atom_start.is_none() {
                    atom_start = Some(i);
                }
            }
        }
    }
    if let Some(s) = atom_start {
        tokens.push(Token::Atom(input[s..].to_string(), s));
    }
    tokens
}

/// Parse exactly one expression; trailing tokens are an error.
pub fn parse(input: &str) -> Result<SExpr, SexprError> {
    let tokens = tokenize(input);
    let mut cursor = 0usize;
    let expr = parse_at(&tokens, &mut cursor, input.len())?;
    if cursor < tokens.len() {
        let tok = &tokens[cursor];
        return Err(SexprError {
            pos: tok.pos(),
            expected: "end of input".into(),
            found: tok.describe(),
        });
    }
    Ok(expr)
}

fn parse_at(tokens: &[Token], cursor: &mut usize, input_len: usize) -> Result<SExpr, SexprError> {
    let Some(tok) = tokens.get(*cursor) else {
        return Err(SexprError {
            pos: input_len,
            expected: "atom or `(`".into(),
            found: "end of input".into(),
        });
    };
    *cursor += 1;
    match tok {
        Token::Atom(text, pos) => Ok(SExpr::Atom {
            text: text.clone(),
            pos: *pos,
        }),
        Token::Close(pos) => Err(SexprError {
            pos: *pos,
            expected: "atom or `(`".into(),
            found: "`)`".into(),
        }),
        Token::Open(pos) => {
            let open_pos = *pos;
            let mut items = Vec::new();
            loop {
                match tokens.get(*cursor) {
                    Some(Token::Close(_)) => {
                        *cursor += 1;
                        if items.is_empty() {
                            return Err(SexprError {
                                pos: open_pos,
                                expected: "non-empty list".into(),
                                found: "`()`".into(),
                            });
                        }
                        return Ok(SExpr::List {
                            items,
                            pos: open_pos,
                        });
                    }
                    Some(_) => items.push(parse_at(tokens, cursor, input_len)?),
                    None => {
                        return Err(SexprError {
                            pos: input_len,
                            expected: "`)`".into(),
                            found: "end of input".into(),
                        })
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_parses() {
        assert_eq!(
            parse("t").unwrap(),
            SExpr::Atom {
                text: "t".into(),
                pos: 0
            }
        );
    }

    #[test]
    fn nested_list_parses() {
        let e = parse("(+ (* v t) x)").unwrap();
        match e {
            SExpr::List { items, .. } => assert_eq!(items.len(), 3),
            _ => panic!("expected list"),
        }
    }

    #[test]
    fn unterminated_list_reports_end_of_input() {
        let err = parse("(+ t").unwrap_err();
        assert_eq!(err.pos, 4);
        assert_eq!(err.expected, "`)`");
    }

    #[test]
    fn trailing_tokens_rejected() {
        let err = parse("t u").unwrap_err();
        assert_eq!(err.expected, "end of input");
        assert_eq!(err.pos, 2);
    }

    #[test]
    fn stray_close_rejected() {
        let err = parse(")").unwrap_err();
        assert_eq!(err.pos, 0);
    }
}
