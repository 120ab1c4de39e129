use thiserror::Error;

use crate::calculus::Expr;

pub const DEFAULT_NORMALIZE_FUEL: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no beta-normal form within {0} contractions")]
pub struct NormalizeError(pub usize);

/// Contracts leftmost-outermost beta-redexes, including under binders,
/// until none remain. Conditionals, sequences and calls are left alone.
pub fn beta_normalize(e: &Expr, fuel: usize) -> Result<Expr, NormalizeError> {
    let mut current = e.clone();
    for _ in 0..fuel {
        match contract_once(&current) {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
    match contract_once(&current) {
        None => Ok(current),
        Some(_) => Err(NormalizeError(fuel)),
    }
}

pub fn is_beta_normal(e: &Expr) -> bool {
    let mut normal = true;
    e.walk(&mut |sub| {
        if let Expr::App(f, _) = sub {
            normal &= !matches!(**f, Expr::Lambda { .. });
        }
    });
    normal
}

fn contract_once(e: &Expr) -> Option<Expr> {
    match e {
        Expr::App(f, a) => {
            if let Expr::Lambda { param, body, .. } = f.as_ref() {
                return Some(body.substitute(param, a));
            }
            if let Some(f2) = contract_once(f) {
                return Some(Expr::App(Box::new(f2), a.clone()));
            }
            contract_once(a).map(|a2| Expr::App(f.clone(), Box::new(a2)))
        }
        Expr::Lambda { param, ty, body } => contract_once(body)
            .map(|b| Expr::Lambda { param: param.clone(), ty: ty.clone(), body: Box::new(b) }),
        Expr::Pred(name, args) => contract_in_args(args).map(|args| Expr::Pred(name.clone(), args)),
        Expr::Act(name, args) => contract_in_args(args).map(|args| Expr::Act(name.clone(), args)),
        Expr::Cond(t, x, y) => {
            if let Some(t2) = contract_once(t) {
                return Some(Expr::Cond(Box::new(t2), x.clone(), y.clone()));
            }
            if let Some(x2) = contract_once(x) {
                return Some(Expr::Cond(t.clone(), Box::new(x2), y.clone()));
            }
            contract_once(y).map(|y2| Expr::Cond(t.clone(), x.clone(), Box::new(y2)))
        }
        Expr::Seq(a, b) => {
            if let Some(a2) = contract_once(a) {
                return Some(Expr::Seq(Box::new(a2), b.clone()));
            }
            contract_once(b).map(|b2| Expr::Seq(a.clone(), Box::new(b2)))
        }
        _ => None,
    }
}

fn contract_in_args(args: &[Expr]) -> Option<Vec<Expr>> {
    args.iter().enumerate().find_map(|(i, a)| {
        contract_once(a).map(|a2| {
            let mut out = args.to_vec();
            out[i] = a2;
            out
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_expr, Type};
    use crate::toyblocks;

    fn expr(s: &str) -> Expr {
        parse_expr(s, &toyblocks::descriptor()).unwrap()
    }

    #[test]
    fn examples() {
        let id = Expr::app(Expr::lambda("x", Type::Obj, Expr::var("x")), Expr::constant("b2"));
        assert_eq!(beta_normalize(&id, 10), Ok(Expr::constant("b2")));
        let meaning = expr("(\\x:Obj. \\y:Obj. move(x, y)) b1() ((\\x:Obj. x) b2())");
        assert_eq!(beta_normalize(&meaning, 10), Ok(expr("move(b1(), b2())")));
        assert_eq!(beta_normalize(&Expr::Skip, 0), Ok(Expr::Skip));
    }

    #[test]
    fn reduces_under_binders_and_inside_calls() {
        let e = expr("\\z:Obj. is_on((\\x:Obj. x) z, b1()) ? skip : skip");
        assert_eq!(beta_normalize(&e, 10), Ok(expr("\\z:Obj. is_on(z, b1()) ? skip : skip")));
        assert!(is_beta_normal(&expr("\\z:Obj. is_on(z, b1())")));
        assert!(!is_beta_normal(&e));
    }

    #[test]
    fn fuel_bound_is_reported() {
        let meaning = expr("(\\x:Obj. \\y:Obj. move(x, y)) b1() ((\\x:Obj. x) b2())");
        assert_eq!(beta_normalize(&meaning, 3).map(|e| e.to_string()), Ok("move(b1(), b2())".into()));
        assert_eq!(beta_normalize(&meaning, 2), Err(NormalizeError(2)));
    }
}
