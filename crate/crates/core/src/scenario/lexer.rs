use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned decimal literal; `raw` keeps the source text so all-digit
    /// basis labels such as `00` can be read back as identifiers.
    Num { value: f64, raw: String },
    Str(String),
    /// `i` written directly after a number or `)`.
    Imag,
    Sym(char),
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub text: String,
}

const SYMBOLS: &str = "{}[]()=,;:/+-";

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, Error> {
    let src = src.replace('\r', "");
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let err = |line, col, message: &str, token: String| Error::Parse { line, col, message: message.into(), token };

    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(l0, c0, "unterminated string", format!("\"{s}"))),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s.clone()), line: l0, col: c0, text: format!("\"{s}\"") });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let raw: String = chars[start..i].iter().collect();
            col += i - start;
            let value: f64 = raw.parse().map_err(|_| err(l0, c0, "malformed number", raw.clone()))?;
            out.push(Token { tok: Tok::Num { value, raw: raw.clone() }, line: l0, col: c0, text: raw.clone() });
            if let Some(&next) = chars.get(i) {
                if ident_start(next) || next.is_ascii_digit() {
                    let tail_start = i;
                    let mut j = i;
                    while j < chars.len() && ident_continue(chars[j]) {
                        j += 1;
                    }
                    let tail: String = chars[tail_start..j].iter().collect();
                    if tail == "i" {
                        out.push(Token { tok: Tok::Imag, line, col, text: "i".into() });
                        i = j;
                        col += 1;
                    } else {
                        let msg = if tail.starts_with('j') || tail.starts_with('J') {
                            "bad imaginary suffix; the imaginary unit is written `i`"
                        } else {
                            "unexpected characters after number"
                        };
                        return Err(err(l0, c0, msg, format!("{raw}{tail}")));
                    }
                }
            }
            continue;
        }
        if ident_start(c) {
            let start = i;
            while i < chars.len() && ident_continue(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s.clone()), line: l0, col: c0, text: s });
            continue;
        }
        if SYMBOLS.contains(c) {
            i += 1;
            col += 1;
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0, text: c.to_string() });
            if c == ')' && chars.get(i) == Some(&'i') && !chars.get(i + 1).is_some_and(|&n| ident_continue(n)) {
                out.push(Token { tok: Tok::Imag, line, col, text: "i".into() });
                i += 1;
                col += 1;
            }
            continue;
        }
        return Err(err(l0, c0, "unexpected character", c.to_string()));
    }
    out.push(Token { tok: Tok::Eof, line, col, text: "end of input".into() });
    Ok(out)
}
