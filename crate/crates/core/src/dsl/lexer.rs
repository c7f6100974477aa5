use super::{Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "",
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut last = Pos { line: 1, column: 1 };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        last = pos;
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        match c {
            '\n' => {
                out.push((Tok::Newline, pos));
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut col);
                }
            }
            '"' => {
                let mut s = String::new();
                advance(1, &mut i, &mut col);
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(Diagnostic::error(pos, "syntax error: unterminated string"))
                        }
                        Some('"') => {
                            advance(1, &mut i, &mut col);
                            break;
                        }
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    let at = Pos { line, column: col };
                                    return Err(Diagnostic::error(
                                        at,
                                        "syntax error: invalid escape",
                                    ));
                                }
                            };
                            s.push(escaped);
                            advance(2, &mut i, &mut col);
                        }
                        Some(ch) => {
                            s.push(*ch);
                            advance(1, &mut i, &mut col);
                        }
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let digits = |i: &mut usize, col: &mut u32| {
                    let from = *i;
                    while *i < chars.len() && chars[*i].is_ascii_digit() {
                        *i += 1;
                        *col += 1;
                    }
                    *i > from
                };
                digits(&mut i, &mut col);
                if chars.get(i) == Some(&'.')
                    && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    advance(1, &mut i, &mut col);
                    digits(&mut i, &mut col);
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let mark = (i, col);
                    advance(1, &mut i, &mut col);
                    if matches!(chars.get(i), Some('+' | '-')) {
                        advance(1, &mut i, &mut col);
                    }
                    if !digits(&mut i, &mut col) {
                        (i, col) = mark;
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                match literal.parse::<f64>() {
                    Ok(v) if v.is_finite() => out.push((Tok::Num(v), pos)),
                    _ => {
                        return Err(Diagnostic::error(
                            pos,
                            format!("syntax error: number `{literal}` out of range"),
                        ))
                    }
                }
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    advance(1, &mut i, &mut col);
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            }
            _ => {
                let (tok, width) = match (c, chars.get(i + 1)) {
                    ('-', Some('>')) => (Tok::Arrow, 2),
                    ('{', _) => (Tok::LBrace, 1),
                    ('}', _) => (Tok::RBrace, 1),
                    ('[', _) => (Tok::LBracket, 1),
                    (']', _) => (Tok::RBracket, 1),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    (',', _) => (Tok::Comma, 1),
                    (';', _) => (Tok::Semi, 1),
                    (':', _) => (Tok::Colon, 1),
                    ('.', _) => (Tok::Dot, 1),
                    ('=', _) => (Tok::Eq, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    ('/', _) => (Tok::Slash, 1),
                    _ => {
                        return Err(Diagnostic::error(
                            pos,
                            format!("syntax error: unexpected character `{c}`"),
                        ))
                    }
                };
                out.push((tok, pos));
                advance(width, &mut i, &mut col);
            }
        }
    }
    // End of input is reported at the last character so positions stay
    // inside the source.
    out.push((Tok::Eof, last));
    Ok(out)
}
