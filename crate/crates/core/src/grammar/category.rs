use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::calculus::Type;

/// A syntactic category: a base category or a functor seeking an argument
/// to its right (`A/B`) or left (`B\A`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Base(String),
    /// `result / arg`
    Over(Box<Category>, Box<Category>),
    /// `arg \ result`
    Under(Box<Category>, Box<Category>),
}

impl Category {
    pub fn base(name: impl Into<String>) -> Category {
        Category::Base(name.into())
    }

    pub fn over(result: Category, arg: Category) -> Category {
        Category::Over(Box::new(result), Box::new(arg))
    }

    pub fn under(arg: Category, result: Category) -> Category {
        Category::Under(Box::new(arg), Box::new(result))
    }

    pub fn is_functor(&self) -> bool {
        !matches!(self, Category::Base(_))
    }

    pub fn connectives(&self) -> usize {
        match self {
            Category::Base(_) => 0,
            Category::Over(a, b) | Category::Under(a, b) => 1 + a.connectives() + b.connectives(),
        }
    }

    /// This category and every category nested inside it.
    pub fn subcategories(&self) -> Vec<&Category> {
        let mut out = vec![self];
        if let Category::Over(a, b) | Category::Under(a, b) = self {
            out.extend(a.subcategories());
            out.extend(b.subcategories());
        }
        out
    }

    /// Adds `sign` to the count of each base category, flipping the sign
    /// for argument positions.
    pub(crate) fn count_bases(&self, sign: i32, counts: &mut BTreeMap<String, i32>) {
        match self {
            Category::Base(b) => *counts.entry(b.clone()).or_default() += sign,
            Category::Over(result, arg) | Category::Under(arg, result) => {
                result.count_bases(sign, counts);
                arg.count_bases(-sign, counts);
            }
        }
    }
}

fn write_operand(c: &Category, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_functor() {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Base(b) => f.write_str(b),
            Category::Over(result, arg) => {
                write_operand(result, f)?;
                f.write_str("/")?;
                write_operand(arg, f)
            }
            Category::Under(arg, result) => {
                write_operand(arg, f)?;
                f.write_str("\\")?;
                write_operand(result, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("no type assigned to base category `{0}`")]
    UnknownBase(String),
    #[error("malformed category `{text}`: {message}")]
    Syntax { text: String, message: String },
}

/// Maps base categories to calculus types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAssignment(pub BTreeMap<String, Type>);

impl TypeAssignment {
    /// `np` and `pp` denote objects, `s` truth values, `a` actions.
    pub fn standard() -> Self {
        TypeAssignment(
            [("np", Type::Obj), ("pp", Type::Obj), ("s", Type::Bool), ("a", Type::Act)]
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v))
                .collect(),
        )
    }

    /// Both `A/B` and `B\A` map to `T(B) -> T(A)`.
    pub fn assign(&self, c: &Category) -> Result<Type, CategoryError> {
        match c {
            Category::Base(b) => {
                self.0.get(b).cloned().ok_or_else(|| CategoryError::UnknownBase(b.clone()))
            }
            Category::Over(result, arg) | Category::Under(arg, result) => {
                Ok(Type::fun(self.assign(arg)?, self.assign(result)?))
            }
        }
    }
}

/// Parses `np`, `(a/pp)/np`, `np\s`, ... Both slashes associate to the left.
pub fn parse_category(text: &str) -> Result<Category, CategoryError> {
    let err = |message: &str| CategoryError::Syntax { text: text.to_owned(), message: message.to_owned() };
    let words: Vec<&str> = text.split_whitespace().collect();
    let ident = |c: Option<char>| c.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
    if words.windows(2).any(|w| ident(w[0].chars().last()) && ident(w[1].chars().next())) {
        return Err(err("missing operator between categories"));
    }
    let chars: Vec<char> = words.concat().chars().collect();
    let mut pos = 0;

    fn operand(chars: &[char], pos: &mut usize) -> Result<Category, &'static str> {
        match chars.get(*pos) {
            Some('(') => {
                *pos += 1;
                let c = expr(chars, pos)?;
                if chars.get(*pos) != Some(&')') {
                    return Err("expected `)`");
                }
                *pos += 1;
                Ok(c)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = *pos;
                while chars.get(*pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    *pos += 1;
                }
                Ok(Category::Base(chars[start..*pos].iter().collect()))
            }
            _ => Err("expected a category"),
        }
    }

    fn expr(chars: &[char], pos: &mut usize) -> Result<Category, &'static str> {
        let mut left = operand(chars, pos)?;
        loop {
            match chars.get(*pos) {
                Some('/') => {
                    *pos += 1;
                    left = Category::over(left, operand(chars, pos)?);
                }
                Some('\\') => {
                    *pos += 1;
                    left = Category::under(left, operand(chars, pos)?);
                }
                _ => return Ok(left),
            }
        }
    }

    let c = expr(&chars, &mut pos).map_err(err)?;
    if pos != chars.len() {
        return Err(err("unexpected trailing input"));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(s: &str) -> Category {
        parse_category(s).unwrap()
    }

    #[test]
    fn type_assignment_examples() {
        let t = TypeAssignment::standard();
        assert_eq!(
            t.assign(&cat("(a/pp)/np")),
            Ok(Type::fun(Type::Obj, Type::fun(Type::Obj, Type::Act)))
        );
        assert_eq!(t.assign(&cat("np\\s")), Ok(Type::fun(Type::Obj, Type::Bool)));
        assert_eq!(t.assign(&cat("a\\s")), Ok(Type::fun(Type::Act, Type::Bool)));
        assert_eq!(t.assign(&cat("vp/np")), Err(CategoryError::UnknownBase("vp".into())));
    }

    #[test]
    fn parsing_and_printing() {
        assert_eq!(
            cat("(np\\s)/pp"),
            Category::over(Category::under(Category::base("np"), Category::base("s")), Category::base("pp"))
        );
        assert_eq!(cat("a/pp/np"), cat("(a/pp)/np"));
        for s in ["(a/pp)/np", "(np\\s)/pp", "(a/a)/s", "pp/np", "np", "a\\(s/np)"] {
            assert_eq!(cat(s).to_string(), s);
        }
        assert!(parse_category("a/").is_err());
        assert!(parse_category("(a").is_err());
        assert!(parse_category("a b").is_err());
    }

    #[test]
    fn base_counts() {
        let mut counts = BTreeMap::new();
        cat("(np\\s)/pp").count_bases(1, &mut counts);
        assert_eq!(counts, [("np".to_owned(), -1), ("pp".to_owned(), -1), ("s".to_owned(), 1)].into());
    }
}
