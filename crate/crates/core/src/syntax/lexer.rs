use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    ColonColon,
    Colon,
    FatArrow,
    Star,
    Equals,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenises one logical line. `line` and `first_column` locate `text`
/// in the source for error messages.
pub(crate) fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '*' => (Tok::Star, 1),
            ':' if chars.get(i + 1) == Some(&':') => (Tok::ColonColon, 2),
            ':' => (Tok::Colon, 1),
            '=' if chars.get(i + 1) == Some(&'>') => (Tok::FatArrow, 2),
            '=' => (Tok::Equals, 1),
            c if is_ident_char(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                (Tok::Ident(word), j - start)
            }
            other => {
                return Err(SyntaxError::Parse {
                    line,
                    column,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Token { tok, line, column });
        i += len;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_use_longest_match() {
        let toks: Vec<Tok> = tokenize("f (x :: y) = g => h : a * b", 1)
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert!(toks.contains(&Tok::ColonColon));
        assert!(toks.contains(&Tok::FatArrow));
        assert!(toks.contains(&Tok::Equals));
        assert!(toks.contains(&Tok::Colon));
        assert!(toks.contains(&Tok::Star));
    }

    #[test]
    fn comments_end_the_line() {
        let toks = tokenize("f x = x # trailing", 1).unwrap();
        assert_eq!(toks.len(), 4);
    }

    #[test]
    fn bad_character_reports_column() {
        match tokenize("f x = x + y", 3) {
            Err(SyntaxError::Parse { line, column, .. }) => {
                assert_eq!((line, column), (3, 9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
