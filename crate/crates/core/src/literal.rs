//! Parser for the small tuple/list literals used on the command line and in
//! config files, e.g. `[(0,0),(1,0),(0,1)]`, `(4,-2)` or
//! `[((0,0),1),((2,0),1)]`. Whitespace is ignored everywhere.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Tuple(Vec<Value>),
    List(Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(Error::parse(format!("expected integer, found {other:?}"))),
        }
    }

    pub fn as_pair(&self) -> Result<(i64, i64)> {
        match self {
            Value::Tuple(items) if items.len() == 2 => Ok((items[0].as_int()?, items[1].as_int()?)),
            other => Err(Error::parse(format!(
                "expected pair (a,b), found {other:?}"
            ))),
        }
    }

    pub fn as_list(&self) -> Result<&[Value]> {
        match self {
            Value::List(items) => Ok(items),
            other => Err(Error::parse(format!("expected list [..], found {other:?}"))),
        }
    }
}

pub fn parse(input: &str) -> Result<Value> {
    let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser {
        chars: &chars,
        pos: 0,
    };
    let v = p.value()?;
    if p.pos != chars.len() {
        return Err(Error::parse(format!("trailing input in literal {input:?}")));
    }
    Ok(v)
}

/// `"(t,s)"`.
pub fn parse_pair(input: &str) -> Result<(i64, i64)> {
    parse(input)?.as_pair()
}

/// `"[(a,b),...]"` with duplicates rejected.
pub fn parse_pair_list(input: &str) -> Result<Vec<(i64, i64)>> {
    let v = parse(input)?;
    let mut out = Vec::new();
    for item in v.as_list()? {
        let pair = item.as_pair()?;
        if out.contains(&pair) {
            return Err(Error::parse(format!(
                "duplicate exponent pair {pair:?} in {input:?}"
            )));
        }
        out.push(pair);
    }
    Ok(out)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected '{c}' at offset {}",
                self.pos
            )))
        }
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let items = self.seq(')')?;
                if items.is_empty() {
                    return Err(Error::parse("empty tuple"));
                }
                Ok(Value::Tuple(items))
            }
            Some('[') => {
                self.pos += 1;
                Ok(Value::List(self.seq(']')?))
            }
            Some(c) if c == '-' || c == '+' || c.is_ascii_digit() => self.int(),
            Some(c) => Err(Error::parse(format!(
                "unexpected '{c}' at offset {}",
                self.pos
            ))),
            None => Err(Error::parse("unexpected end of literal")),
        }
    }

    fn seq(&mut self, close: char) -> Result<Vec<Value>> {
        let mut items = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.value()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => {
                    self.expect(close)?;
                }
            }
        }
    }

    fn int(&mut self) -> Result<Value> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<i64>()
            .map(Value::Int)
            .map_err(|_| Error::parse(format!("bad integer {text:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pair_lists_ignoring_whitespace() {
        assert_eq!(
            parse_pair_list(" [ (0, 0), (1,0) ,(0,-1)] ").unwrap(),
            vec![(0, 0), (1, 0), (0, -1)]
        );
        assert_eq!(parse_pair_list("[]").unwrap(), vec![]);
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(parse_pair_list("[(0,0),(0,0)]").is_err());
        assert!(parse_pair_list("[(0,0)").is_err());
        assert!(parse_pair_list("[(0,0,1)]").is_err());
        assert!(parse_pair("(1,2)x").is_err());
    }

    #[test]
    fn nested_tuples() {
        let v = parse("[((0,2),1)]").unwrap();
        let items = v.as_list().unwrap();
        match &items[0] {
            Value::Tuple(t) => {
                assert_eq!(t[0].as_pair().unwrap(), (0, 2));
                assert_eq!(t[1].as_int().unwrap(), 1);
            }
            _ => panic!(),
        }
    }
}
