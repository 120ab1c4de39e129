use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::category::{Category, TypeAssignment};
use super::normalize::{beta_normalize, DEFAULT_NORMALIZE_FUEL};
use crate::app::InterfaceDescriptor;
use crate::calculus::{type_of, Expr, TypeEnv};

/// A term paired with its category.
pub type Item = (Expr, Category);

/// `α₁:A₁, …, αₙ:Aₙ ⇒ α:A`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: Vec<Item>,
    pub succedent: Item,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeqRule {
    Id,
    AppRight,
    AppLeft,
    AbsRight,
    AbsLeft,
}

impl SeqRule {
    pub fn name(self) -> &'static str {
        match self {
            SeqRule::Id => "Seq Id",
            SeqRule::AppRight => "Seq App Right",
            SeqRule::AppLeft => "Seq App Left",
            SeqRule::AbsRight => "Seq Abs Right",
            SeqRule::AbsLeft => "Seq Abs Left",
        }
    }
}

impl fmt::Display for SeqRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: SeqRule,
    pub conclusion: Sequent,
    pub premises: Vec<Arc<Derivation>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("proof search gave up after {0} steps")]
pub struct SearchLimit(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("({rule}) node `{sequent}`: {reason}")]
pub struct AuditError {
    pub rule: SeqRule,
    pub sequent: String,
    pub reason: &'static str,
}

fn write_item(f: &mut fmt::Formatter<'_>, (term, cat): &Item) -> fmt::Result {
    write!(f, "{term} : {cat}")
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_item(f, item)?;
        }
        f.write_str(" => ")?;
        write_item(f, &self.succedent)
    }
}

impl Derivation {
    pub fn term(&self) -> &Expr {
        &self.conclusion.succedent.0
    }

    pub fn category(&self) -> &Category {
        &self.conclusion.succedent.1
    }

    /// Preorder traversal of all nodes.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        for p in &self.premises {
            out.extend(p.as_ref().nodes());
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    /// Every category in every sequent of the derivation, with the
    /// categories nested inside them.
    pub fn categories(&self) -> BTreeSet<&Category> {
        let mut out = BTreeSet::new();
        for node in self.nodes() {
            let s = &node.conclusion;
            for (_, c) in s.antecedent.iter().chain(std::iter::once(&s.succedent)) {
                out.extend(c.subcategories());
            }
        }
        out
    }

    /// Checks that every node is an instance of its rule schema.
    pub fn audit(&self, types: &TypeAssignment) -> Result<(), AuditError> {
        let fail = |reason| {
            Err(AuditError { rule: self.rule, sequent: self.conclusion.to_string(), reason })
        };
        let s = &self.conclusion;
        if s.antecedent.is_empty() {
            return fail("empty antecedent");
        }
        let ok = match self.rule {
            SeqRule::Id => {
                if !self.premises.is_empty() {
                    return fail("takes no premises");
                }
                s.antecedent.len() == 1 && s.antecedent[0] == s.succedent
            }
            SeqRule::AppRight | SeqRule::AppLeft => {
                let [arg, rest] = self.premises.as_slice() else {
                    return fail("takes two premises");
                };
                rest.conclusion.succedent == s.succedent
                    && (0..rest.conclusion.antecedent.len()).any(|i| {
                        app_instance(self.rule, &rest.conclusion.antecedent, i, &arg.conclusion)
                            .is_some_and(|ant| ant == s.antecedent)
                    })
            }
            SeqRule::AbsRight | SeqRule::AbsLeft => {
                let [body] = self.premises.as_slice() else {
                    return fail("takes one premise");
                };
                abs_instance(self.rule, s, &body.conclusion, types)
            }
        };
        if !ok {
            return fail("premises do not match the rule schema");
        }
        self.premises.iter().try_for_each(|p| p.audit(types))
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(f, "{:indent$}({}) {}", "", self.rule, self.conclusion, indent = depth * 2)?;
        self.premises.iter().try_for_each(|p| p.fmt_indented(f, depth + 1))
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// Rebuilds the conclusion antecedent of an application rule from the
/// antecedent of its second premise, reading position `i` as `α(β):A`.
fn app_instance(rule: SeqRule, rest: &[Item], i: usize, arg: &Sequent) -> Option<Vec<Item>> {
    let (Expr::App(fun, beta), result) = &rest[i] else {
        return None;
    };
    let (arg_term, arg_cat) = &arg.succedent;
    if beta.as_ref() != arg_term || arg.antecedent.is_empty() {
        return None;
    }
    let fun = (fun.as_ref().clone(), match rule {
        SeqRule::AppRight => Category::over(result.clone(), arg_cat.clone()),
        _ => Category::under(arg_cat.clone(), result.clone()),
    });
    let mut out = rest[..i].to_vec();
    if rule == SeqRule::AppRight {
        out.push(fun);
        out.extend(arg.antecedent.iter().cloned());
    } else {
        out.extend(arg.antecedent.iter().cloned());
        out.push(fun);
    }
    out.extend(rest[i + 1..].iter().cloned());
    Some(out)
}

fn abs_instance(rule: SeqRule, s: &Sequent, premise: &Sequent, types: &TypeAssignment) -> bool {
    let (Expr::Lambda { param, ty, body }, cat) = &s.succedent else {
        return false;
    };
    let (discharged, result) = match (rule, cat) {
        (SeqRule::AbsRight, Category::Over(result, arg)) => (arg, result),
        (SeqRule::AbsLeft, Category::Under(arg, result)) => (arg, result),
        _ => return false,
    };
    if types.assign(discharged).ok().as_ref() != Some(ty) {
        return false;
    }
    let hyp = (Expr::var(param.clone()), discharged.as_ref().clone());
    let mut expected = s.antecedent.clone();
    if rule == SeqRule::AbsRight {
        expected.push(hyp);
    } else {
        expected.insert(0, hyp);
    }
    let fresh = s.antecedent.iter().all(|(t, _)| !t.free_vars().contains(param));
    fresh
        && premise.antecedent == expected
        && premise.succedent.0 == **body
        && premise.succedent.1 == **result
}

/// Net occurrences of each base category: positive in result positions,
/// negative in argument positions. Derivable sequents balance.
fn balanced(antecedent: &[Item], goal: &Category) -> bool {
    let mut counts = BTreeMap::new();
    for (_, c) in antecedent {
        c.count_bases(1, &mut counts);
    }
    goal.count_bases(-1, &mut counts);
    counts.values().all(|&n| n == 0)
}

/// `x1`, `x2`, ...: the first not free in any antecedent term.
fn fresh_var(antecedent: &[Item]) -> String {
    let used: BTreeSet<String> = antecedent.iter().flat_map(|(t, _)| t.free_vars()).collect();
    (1..).map(|k| format!("x{k}")).find(|v| !used.contains(v)).expect("unbounded supply")
}

/// The arguments of `cat` in the order applications consume them, each
/// with the category left after it, and the base category at the end.
fn spine(mut cat: &Category) -> (Vec<(SeqRule, &Category, &Category)>, &Category) {
    let mut args = Vec::new();
    loop {
        match cat {
            Category::Over(result, arg) => {
                args.push((SeqRule::AppRight, &**arg, &**result));
                cat = result;
            }
            Category::Under(arg, result) => {
                args.push((SeqRule::AppLeft, &**arg, &**result));
                cat = result;
            }
            Category::Base(_) => return (args, cat),
        }
    }
}

/// Every way to cut `lo..hi` into `parts` nonempty contiguous spans.
fn compositions(lo: usize, hi: usize, parts: usize) -> Vec<Vec<(usize, usize)>> {
    if parts == 0 {
        return if lo == hi { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for mid in lo + 1..=hi {
        for mut rest in compositions(mid, hi, parts - 1) {
            rest.insert(0, (lo, mid));
            out.push(rest);
        }
    }
    out
}

fn advance(choice: &mut [usize], options: &[Arc<Vec<Found>>]) -> bool {
    for (k, opts) in choice.iter_mut().zip(options).rev() {
        *k += 1;
        if *k < opts.len() {
            return true;
        }
        *k = 0;
    }
    false
}

/// Spells out a focused step as a chain of application rules ending in an
/// identity axiom.
fn unfold_derivation(
    ant: &[Item],
    head: usize,
    args: &[(SeqRule, &Category, &Category)],
    spans: &[(usize, usize)],
    chosen: &[&Found],
    term: &Expr,
) -> Derivation {
    let goal = args.last().map_or(&ant[head].1, |a| a.2);
    // stage k: the head applied to its first k arguments, covering lo..hi
    let mut stages = vec![(ant[head].0.clone(), ant[head].1.clone(), head, head + 1)];
    for ((_, _, result), (&(lo, hi), found)) in args.iter().zip(spans.iter().zip(chosen)) {
        let (t, _, clo, chi) = stages.last().expect("initial stage");
        let applied = Expr::app(t.clone(), found.term.clone());
        stages.push((applied, (*result).clone(), lo.min(*clo), hi.max(*chi)));
    }
    let sequent = |(t, c, lo, hi): &(Expr, Category, usize, usize)| {
        let mut antecedent = ant[..*lo].to_vec();
        antecedent.push((t.clone(), c.clone()));
        antecedent.extend(ant[*hi..].iter().cloned());
        Sequent { antecedent, succedent: (term.clone(), goal.clone()) }
    };
    let last = stages.last().expect("final stage");
    let mut d = Derivation { rule: SeqRule::Id, conclusion: sequent(last), premises: vec![] };
    for k in (0..args.len()).rev() {
        d = Derivation {
            rule: args[k].0,
            conclusion: sequent(&stages[k]),
            premises: vec![chosen[k].derivation.clone(), Arc::new(d)],
        };
    }
    d
}

/// A term found for a sequent, with one derivation producing it.
#[derive(Clone, Debug)]
struct Found {
    term: Expr,
    derivation: Arc<Derivation>,
    count: u64,
}

/// A distinct meaning of a sequent: the term synthesized by a witness
/// derivation, and how many derivations have a term with that meaning.
#[derive(Clone, Debug)]
pub struct Meaning {
    pub term: Expr,
    pub witness: Derivation,
    pub derivations: u64,
}

fn wellformed_categories(items: &[Item], goal: &Category, types: &TypeAssignment) -> bool {
    items.iter().map(|(_, c)| c).chain(std::iter::once(goal)).all(|c| {
        c.subcategories()
            .into_iter()
            .filter(|c| c.is_functor())
            .all(|c| types.assign(c).is_ok_and(|t| t.is_wellformed()))
    })
}

struct Search<'a> {
    types: &'a TypeAssignment,
    memo: HashMap<(Vec<Item>, Category), Arc<Vec<Found>>>,
    work: usize,
    limit: usize,
    /// Search focused derivations only, keeping one per meaning and
    /// counting the rest.
    focused: bool,
}

/// Identifies terms up to beta and alpha, falling back to the term itself
/// if normalization runs out of fuel.
fn meaning_key(term: &Expr) -> Expr {
    beta_normalize(term, DEFAULT_NORMALIZE_FUEL).unwrap_or_else(|_| term.clone()).alpha_canonical()
}

/// Collects results for one sequent, merging terms with equal meaning when
/// asked to.
struct Collector {
    out: Vec<Found>,
    index: Option<HashMap<Expr, usize>>,
}

impl Collector {
    fn new(merge: bool) -> Self {
        Collector { out: Vec::new(), index: merge.then(HashMap::new) }
    }

    fn add(&mut self, term: Expr, count: u64, make: impl FnOnce(&Expr) -> Derivation) {
        if let Some(index) = &mut self.index {
            let key = meaning_key(&term);
            if let Some(&i) = index.get(&key) {
                self.out[i].count = self.out[i].count.saturating_add(count);
                return;
            }
            index.insert(key, self.out.len());
        }
        let derivation = Arc::new(make(&term));
        self.out.push(Found { term, derivation, count });
    }
}

impl Search<'_> {
    fn tick(&mut self, n: usize) -> Result<(), SearchLimit> {
        self.work = self.work.saturating_add(n);
        if self.work > self.limit {
            Err(SearchLimit(self.limit))
        } else {
            Ok(())
        }
    }

    fn solve(&mut self, antecedent: &[Item], goal: &Category) -> Result<Arc<Vec<Found>>, SearchLimit> {
        let key = (antecedent.to_vec(), goal.clone());
        if let Some(found) = self.memo.get(&key) {
            return Ok(found.clone());
        }
        self.tick(1)?;
        let found = if antecedent.is_empty() || !balanced(antecedent, goal) {
            Vec::new()
        } else if self.focused {
            self.expand_focused(antecedent, goal)?
        } else {
            self.expand(antecedent, goal)?
        };
        let found = Arc::new(found);
        self.memo.insert(key, found.clone());
        Ok(found)
    }

    fn conclude(ant: &[Item], goal: &Category, term: &Expr) -> Sequent {
        Sequent { antecedent: ant.to_vec(), succedent: (term.clone(), goal.clone()) }
    }

    fn expand(&mut self, ant: &[Item], goal: &Category) -> Result<Vec<Found>, SearchLimit> {
        let mut out = Collector::new(false);
        let n = ant.len();

        if n == 1 && &ant[0].1 == goal {
            out.add(ant[0].0.clone(), 1, |term| Derivation {
                rule: SeqRule::Id,
                conclusion: Self::conclude(ant, goal, term),
                premises: vec![],
            });
        }

        for i in 0..n {
            let (alpha, cat) = &ant[i];
            // (functor rule, result, argument, span of Δ)
            let spans: Vec<(SeqRule, &Category, &Category, usize, usize)> = match cat {
                Category::Over(result, arg) => {
                    (i + 2..=n).map(|j| (SeqRule::AppRight, &**result, &**arg, i + 1, j)).collect()
                }
                Category::Under(arg, result) => {
                    (0..i).map(|k| (SeqRule::AppLeft, &**result, &**arg, k, i)).collect()
                }
                Category::Base(_) => continue,
            };
            for (rule, result, arg, lo, hi) in spans {
                let args = self.solve(&ant[lo..hi], arg)?;
                for arg_found in args.iter() {
                    let (before, after) = match rule {
                        SeqRule::AppRight => (&ant[..i], &ant[hi..]),
                        _ => (&ant[..lo], &ant[i + 1..]),
                    };
                    let mut rest = before.to_vec();
                    rest.push((Expr::app(alpha.clone(), arg_found.term.clone()), result.clone()));
                    rest.extend(after.iter().cloned());
                    let conts = self.solve(&rest, goal)?;
                    self.tick(conts.len())?;
                    for cont in conts.iter() {
                        out.add(cont.term.clone(), arg_found.count.saturating_mul(cont.count), |gamma| Derivation {
                            rule,
                            conclusion: Self::conclude(ant, goal, gamma),
                            premises: vec![arg_found.derivation.clone(), cont.derivation.clone()],
                        });
                    }
                }
            }
        }

        self.abstract_goal(ant, goal, &mut out)?;
        Ok(out.out)
    }

    /// The right rules, read backwards: discharge the goal's argument as a
    /// fresh hypothesis.
    fn abstract_goal(&mut self, ant: &[Item], goal: &Category, out: &mut Collector) -> Result<(), SearchLimit> {
        let abs = match goal {
            Category::Over(result, arg) => Some((SeqRule::AbsRight, result, arg)),
            Category::Under(arg, result) => Some((SeqRule::AbsLeft, result, arg)),
            Category::Base(_) => None,
        };
        if let Some((rule, result, arg)) = abs {
            if let Ok(ty) = self.types.assign(arg) {
                let x = fresh_var(ant);
                let hyp = (Expr::var(x.clone()), arg.as_ref().clone());
                let mut extended = ant.to_vec();
                if rule == SeqRule::AbsRight {
                    extended.push(hyp);
                } else {
                    extended.insert(0, hyp);
                }
                let bodies = self.solve(&extended, result)?;
                self.tick(bodies.len())?;
                for body in bodies.iter() {
                    let term = Expr::lambda(x.clone(), ty.clone(), body.term.clone());
                    out.add(term, body.count, |term| Derivation {
                        rule,
                        conclusion: Self::conclude(ant, goal, term),
                        premises: vec![body.derivation.clone()],
                    });
                }
            }
        }
        Ok(())
    }

    /// Functor goals are abstracted immediately; a base goal is reached by
    /// applying one antecedent functor to all of its arguments, each
    /// derived from a contiguous span.
    fn expand_focused(&mut self, ant: &[Item], goal: &Category) -> Result<Vec<Found>, SearchLimit> {
        let mut out = Collector::new(true);
        if goal.is_functor() {
            self.abstract_goal(ant, goal, &mut out)?;
            return Ok(out.out);
        }
        let n = ant.len();
        for i in 0..n {
            let (args, head) = spine(&ant[i].1);
            if head != goal {
                continue;
            }
            let rights = args.iter().filter(|a| a.0 == SeqRule::AppRight).count();
            let lefts = args.len() - rights;
            for right_spans in compositions(i + 1, n, rights) {
                for mut left_spans in compositions(0, i, lefts) {
                    left_spans.reverse();
                    let (mut r, mut l) = (right_spans.iter(), left_spans.iter());
                    let spans: Vec<(usize, usize)> = args
                        .iter()
                        .map(|a| *if a.0 == SeqRule::AppRight { r.next() } else { l.next() }.expect("span per argument"))
                        .collect();
                    let mut solutions = Vec::with_capacity(args.len());
                    for (a, &(lo, hi)) in args.iter().zip(&spans) {
                        let found = self.solve(&ant[lo..hi], a.1)?;
                        if found.is_empty() {
                            break;
                        }
                        solutions.push(found);
                    }
                    if solutions.len() < args.len() {
                        continue;
                    }
                    let mut choice = vec![0usize; args.len()];
                    loop {
                        self.tick(1)?;
                        let chosen: Vec<&Found> = choice.iter().zip(&solutions).map(|(&k, s)| &s[k]).collect();
                        let term = chosen.iter().fold(ant[i].0.clone(), |f, a| Expr::app(f, a.term.clone()));
                        let count = chosen.iter().fold(1u64, |c, a| c.saturating_mul(a.count));
                        out.add(term, count, |term| unfold_derivation(ant, i, &args, &spans, &chosen, term));
                        if !advance(&mut choice, &solutions) {
                            break;
                        }
                    }
                }
            }
        }
        Ok(out.out)
    }
}

fn run_search(
    antecedent: &[Item],
    goal: &Category,
    types: &TypeAssignment,
    limit: usize,
    focused: bool,
) -> Result<Vec<Found>, SearchLimit> {
    let mut search = Search { types, memo: HashMap::new(), work: 0, limit, focused };
    let found = search.solve(antecedent, goal)?;
    drop(search);
    Ok(Arc::unwrap_or_clone(found))
}

/// Every cut-free derivation of `antecedent ⇒ α:goal`, with the synthesized
/// term `α` of each.
pub fn derive(antecedent: &[Item], goal: &Category, types: &TypeAssignment) -> Vec<(Derivation, Expr)> {
    derive_bounded(antecedent, goal, types, usize::MAX).expect("unbounded search")
}

/// Like [`derive`], giving up once the search has done `limit` units of work.
pub fn derive_bounded(
    antecedent: &[Item],
    goal: &Category,
    types: &TypeAssignment,
    limit: usize,
) -> Result<Vec<(Derivation, Expr)>, SearchLimit> {
    Ok(run_search(antecedent, goal, types, limit, false)?
        .into_iter()
        .map(|f| (Arc::unwrap_or_clone(f.derivation), f.term))
        .collect())
}

/// The meanings, up to beta and alpha, of the terms synthesized by
/// derivations that respect imperative structure, each with a witness and
/// the number of such derivations. Equal meanings are merged at every
/// sequent, so this stays cheap where [`derive`] would face many
/// derivations with different but equivalent terms.
pub fn derive_meanings(
    antecedent: &[Item],
    goal: &Category,
    types: &TypeAssignment,
    limit: usize,
) -> Result<Vec<Meaning>, SearchLimit> {
    if !wellformed_categories(antecedent, goal, types) {
        return Ok(Vec::new());
    }
    Ok(run_search(antecedent, goal, types, limit, true)?
        .into_iter()
        .map(|f| Meaning { term: f.term, witness: Arc::unwrap_or_clone(f.derivation), derivations: f.count })
        .collect())
}

/// True iff every functor category anywhere in `d` is assigned a
/// well-formed type.
pub fn respects_imperative_structure(d: &Derivation, types: &TypeAssignment) -> bool {
    d.categories()
        .into_iter()
        .filter(|c| c.is_functor())
        .all(|c| types.assign(c).is_ok_and(|t| t.is_wellformed()))
}

/// True iff the synthesized term has the type its category demands.
pub fn check_admissible_typing(d: &Derivation, types: &TypeAssignment, iface: &InterfaceDescriptor) -> bool {
    match (type_of(&TypeEnv::new(), d.term(), iface), types.assign(d.category())) {
        (Ok(found), Ok(expected)) => found == expected,
        _ => false,
    }
}
