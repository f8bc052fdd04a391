//! Nested-residue evaluation of the contour-integral moment formulas.
//!
//! Variables are integrated in the order u₁, u₂, …. At each step every constant
//! pole of the current term sum in that variable is enclosed, except the
//! designated excluded pole. Poles of any order are handled through
//! [`residue`]; the β = 1 integrands have genuine double poles.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{residue, Affine, LinearFactorTerm, Rational};
use crate::jacobi_moments::{moment, MomentQuery};

pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourKind {
    PositiveFinite,
    NegativeFinite,
    PositiveN0,
    NegativeN0,
    PositiveFrozen,
    NegativeFrozen,
}

impl ContourKind {
    pub fn is_negative(self) -> bool {
        matches!(self, ContourKind::NegativeFinite | ContourKind::NegativeN0 | ContourKind::NegativeFrozen)
    }

    pub fn all() -> [ContourKind; 6] {
        use ContourKind::*;
        [PositiveFinite, NegativeFinite, PositiveN0, NegativeN0, PositiveFrozen, NegativeFrozen]
    }

    pub fn name(self) -> &'static str {
        match self {
            ContourKind::PositiveFinite => "positive-finite",
            ContourKind::NegativeFinite => "negative-finite",
            ContourKind::PositiveN0 => "positive-n0",
            ContourKind::NegativeN0 => "negative-n0",
            ContourKind::PositiveFrozen => "positive-frozen",
            ContourKind::NegativeFrozen => "negative-frozen",
        }
    }
}

impl fmt::Display for ContourKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContourKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ContourKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown contour kind '{s}'")))
    }
}

/// One contour formula at concrete parameters. `t` stands for β².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub t: Rational,
    pub a: Rational,
    pub b: Rational,
    pub n: Rational,
    pub k: usize,
    pub base_poles: Vec<Rational>,
    pub excluded: Rational,
}

impl ContourSpec {
    /// n is ignored (set to 0) for the n = 0 kinds, t is ignored (set to 1) for the frozen kinds.
    pub fn new(kind: ContourKind, t: Rational, a: Rational, b: Rational, n: Rational, k: usize) -> Result<Self> {
        use ContourKind::*;
        if k == 0 {
            return Err(Error::Invalid("contour order must be at least 1".into()));
        }
        let t = if matches!(kind, PositiveFrozen | NegativeFrozen) { Rational::one() } else { t };
        let n = if matches!(kind, PositiveFinite | NegativeFinite) { n } else { Rational::zero() };
        if t.is_zero() {
            return Err(Error::Invalid("β² = 0: the contour prefactor is undefined".into()));
        }
        if matches!(kind, PositiveFinite | NegativeFinite) && n.is_zero() {
            return Err(Error::Invalid("finite-n contour needs n ≠ 0".into()));
        }
        let one_minus_n = Rational::one() - &n;
        let (base, excluded) = match kind {
            PositiveFinite => (-(&t * &one_minus_n), &a + &b + 2 + &t * &one_minus_n),
            PositiveN0 | PositiveFrozen => (Rational::zero(), &a + &b + 2 + &t * 2),
            NegativeFinite | NegativeN0 | NegativeFrozen => (Rational::zero(), a.clone()),
        };
        if base == excluded {
            return Err(Error::Invalid(format!("base pole and excluded pole coincide at {base}")));
        }
        Ok(ContourSpec { kind, t, a, b, n, k, base_poles: vec![base], excluded })
    }

    /// Spec matching a moment query: t = −κ, n = 0 selects the n = 0 formulas
    /// (the frozen ones at κ = −1).
    pub fn for_query(q: &MomentQuery<Rational>) -> Result<Self> {
        if q.kappa.is_zero() {
            return Err(Error::Invalid("κ = 0: contour formula not applicable".into()));
        }
        if q.k == 0 {
            return Err(Error::Invalid("moment order must be nonzero".into()));
        }
        let neg = q.k < 0;
        let t = -&q.kappa;
        let kind = match (q.n.is_zero(), t == 1, neg) {
            (false, _, false) => ContourKind::PositiveFinite,
            (false, _, true) => ContourKind::NegativeFinite,
            (true, true, false) => ContourKind::PositiveFrozen,
            (true, true, true) => ContourKind::NegativeFrozen,
            (true, false, false) => ContourKind::PositiveN0,
            (true, false, true) => ContourKind::NegativeN0,
        };
        ContourSpec::new(kind, t, q.a.clone(), q.b.clone(), q.n.clone(), q.k.unsigned_abs() as usize)
    }
}

/// The integrand as a single product of affine factors in u₁..u_k.
pub fn build_integrand(spec: &ContourSpec) -> LinearFactorTerm {
    use ContourKind::*;
    let k = spec.k;
    let t = &spec.t;
    let (a, b, n) = (&spec.a, &spec.b, &spec.n);
    let u = |i: usize, c0: Rational| Affine::single(c0, i, Rational::one(), k);
    let sign: i64 = if spec.kind.is_negative() { -1 } else { 1 };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            num.push(Affine::diff(j, i, Rational::zero(), k));
            den.push(Affine::diff(j, i, t * sign, k));
            den.push(Affine::diff(j, i, Rational::integer(sign), k));
            if i + 1 < j {
                num.push(Affine::diff(j, i, (t + 1) * sign, k));
            }
        }
    }
    let one_minus_n = Rational::one() - n;
    let prefactor = match spec.kind {
        PositiveFinite => {
            for i in 0..k {
                num.push(u(i, t.clone()));
                den.push(u(i, t * &one_minus_n));
                num.push(u(i, -(a + 1)));
                den.push(u(i, -(a + b + 2 + t * &one_minus_n)));
            }
            (n * t).recip().expect("validated")
        }
        NegativeFinite => {
            for i in 0..k {
                num.push(u(i, -(n * t)));
                den.push(u(i, Rational::zero()));
                num.push(u(i, -(a + b + 1 + t * &one_minus_n)));
                den.push(u(i, -a.clone()));
            }
            -(n * t).recip().expect("validated")
        }
        PositiveN0 | PositiveFrozen => {
            den.push(u(0, Rational::zero()));
            for i in 0..k {
                num.push(u(i, -(a + 1 + t)));
                den.push(u(i, -(a + b + 2 + t * 2)));
            }
            Rational::one()
        }
        NegativeN0 | NegativeFrozen => {
            den.push(u(0, Rational::zero()));
            for i in 0..k {
                num.push(u(i, -(a + b + 1 + t)));
                den.push(u(i, -a.clone()));
            }
            Rational::one()
        }
    };
    LinearFactorTerm::new(prefactor, num, den).expect("no identically zero factor")
}

/// Poles collected while integrating one variable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleRecord {
    /// 1-based variable index.
    pub var: usize,
    pub pole: Rational,
    /// Highest pole order met at this location.
    pub order: usize,
    /// Terms with a pole here.
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedOutcome {
    pub value: Rational,
    pub poles: Vec<PoleRecord>,
    pub max_terms: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NestedOptions {
    pub budget: usize,
    /// Visit poles of each variable in decreasing instead of increasing order.
    pub descending: bool,
}

impl Default for NestedOptions {
    fn default() -> Self {
        NestedOptions { budget: DEFAULT_TERM_BUDGET, descending: false }
    }
}

pub fn evaluate_nested(spec: &ContourSpec) -> Result<Rational> {
    Ok(evaluate_nested_with(spec, &NestedOptions::default())?.value)
}

/// Integrates u₁ first, then u₂, …, merging like terms after each step.
pub fn evaluate_nested_with(spec: &ContourSpec, opts: &NestedOptions) -> Result<NestedOutcome> {
    let budget = opts.budget;
    let mut terms: Vec<LinearFactorTerm> = vec![build_integrand(spec)];
    let mut poles = Vec::new();
    let mut max_terms = 1;
    for var in 0..spec.k {
        let mut seen: Vec<PoleRecord> = Vec::new();
        for t in &terms {
            for (p, m) in enclosed_poles(t, var, spec, opts.descending) {
                match seen.iter_mut().find(|r| r.pole == p) {
                    Some(r) => {
                        r.order = r.order.max(m);
                        r.terms += 1;
                    }
                    None => seen.push(PoleRecord { var: var + 1, pole: p, order: m, terms: 1 }),
                }
            }
        }
        let produced: Result<Vec<Vec<LinearFactorTerm>>> = terms
            .par_iter()
            .map(|t| {
                let mut out = Vec::new();
                for (p, _) in enclosed_poles(t, var, spec, opts.descending) {
                    out.extend(residue(t, var, &p)?);
                }
                Ok(out)
            })
            .collect();
        let produced: Vec<LinearFactorTerm> = produced?.into_iter().flatten().collect();
        if produced.len() > budget {
            return Err(Error::TermBudget(budget));
        }
        terms = merge(produced);
        max_terms = max_terms.max(terms.len());
        poles.extend(seen);
    }
    let mut value = Rational::zero();
    for t in &terms {
        match t.as_constant() {
            Some(c) => value += &c,
            None => return Err(Error::Internal(format!("variable dependence left after the last residue: {t}"))),
        }
    }
    Ok(NestedOutcome { value, poles, max_terms })
}

fn enclosed_poles(t: &LinearFactorTerm, var: usize, spec: &ContourSpec, descending: bool) -> Vec<(Rational, usize)> {
    let mut ps: Vec<(Rational, usize)> = t.constant_poles(var).into_iter().filter(|(p, _)| *p != spec.excluded).collect();
    ps.sort();
    if descending {
        ps.reverse();
    }
    ps
}

/// Sums prefactors of terms with equal factor lists.
fn merge(terms: Vec<LinearFactorTerm>) -> Vec<LinearFactorTerm> {
    let mut order: Vec<(Vec<Affine>, Vec<Affine>)> = Vec::new();
    let mut acc: HashMap<(Vec<Affine>, Vec<Affine>), Rational> = HashMap::new();
    for t in terms {
        let key = (t.num, t.den);
        match acc.get_mut(&key) {
            Some(v) => *v += &t.prefactor,
            None => {
                order.push(key.clone());
                acc.insert(key, t.prefactor);
            }
        }
    }
    order
        .into_iter()
        .filter_map(|key| {
            let p = acc.remove(&key)?;
            if p.is_zero() {
                None
            } else {
                Some(LinearFactorTerm { prefactor: p, num: key.0, den: key.1 })
            }
        })
        .collect()
}

/// Unmerged residue tree, for auditing small orders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleNode {
    pub var: usize,
    pub pole: Rational,
    pub order: usize,
    /// Prefactor of the residue term(s) produced at this node.
    pub prefactor: Vec<Rational>,
    pub children: Vec<PoleNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleTree {
    pub value: Rational,
    pub roots: Vec<PoleNode>,
}

pub fn pole_tree(spec: &ContourSpec, max_nodes: usize) -> Result<PoleTree> {
    let mut count = 0;
    let mut value = Rational::zero();
    let root = build_integrand(spec);
    let roots = grow(&[root], 0, spec, &mut count, max_nodes, &mut value)?;
    Ok(PoleTree { value, roots })
}

fn grow(
    terms: &[LinearFactorTerm],
    var: usize,
    spec: &ContourSpec,
    count: &mut usize,
    max_nodes: usize,
    value: &mut Rational,
) -> Result<Vec<PoleNode>> {
    if var == spec.k {
        for t in terms {
            *value += &t.as_constant().ok_or_else(|| Error::Internal("variable dependence left".into()))?;
        }
        return Ok(Vec::new());
    }
    let mut nodes: Vec<PoleNode> = Vec::new();
    let mut poles: Vec<(Rational, usize)> = Vec::new();
    for t in terms {
        for (p, m) in enclosed_poles(t, var, spec, false) {
            match poles.iter_mut().find(|(q, _)| *q == p) {
                Some(e) => e.1 = e.1.max(m),
                None => poles.push((p, m)),
            }
        }
    }
    poles.sort();
    for (p, m) in poles {
        *count += 1;
        if *count > max_nodes {
            return Err(Error::TermBudget(max_nodes));
        }
        let mut res = Vec::new();
        for t in terms {
            if t.constant_poles(var).iter().any(|(q, _)| *q == p) {
                res.extend(residue(t, var, &p)?);
            }
        }
        let res = merge(res);
        let prefactor = res.iter().map(|t| t.prefactor.clone()).collect();
        let children = grow(&res, var + 1, spec, count, max_nodes, value)?;
        nodes.push(PoleNode { var: var + 1, pole: p, order: m, prefactor, children });
    }
    Ok(nodes)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrosscheckStatus {
    Equal,
    Mismatch,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub query: MomentQuery<Rational>,
    pub kind: Option<ContourKind>,
    pub partition_sum: Option<Rational>,
    pub contour: Option<Rational>,
    pub status: CrosscheckStatus,
}

/// Evaluates one moment with both engines and compares exactly.
pub fn crosscheck(q: &MomentQuery<Rational>) -> Result<CrosscheckReport> {
    let spec = match ContourSpec::for_query(q) {
        Ok(s) => s,
        Err(Error::Invalid(why)) => {
            return Ok(CrosscheckReport {
                query: q.clone(),
                kind: None,
                partition_sum: moment(q).ok(),
                contour: None,
                status: CrosscheckStatus::Skipped(why),
            })
        }
        Err(e) => return Err(e),
    };
    let ps = moment(q)?;
    let ct = evaluate_nested(&spec)?;
    let status = if ps == ct { CrosscheckStatus::Equal } else { CrosscheckStatus::Mismatch };
    Ok(CrosscheckReport { query: q.clone(), kind: Some(spec.kind), partition_sum: Some(ps), contour: Some(ct), status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn r(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn first_moment_residue() {
        let (t, a, b, n) = (r(1, 3), r(1, 2), r(2, 1), r(7, 5));
        let spec = ContourSpec::new(ContourKind::PositiveFinite, t.clone(), a.clone(), b.clone(), n.clone(), 1).unwrap();
        let expect = (&a + 1 - &t * (&n - 1)) / (&a + &b + 2 - &t * (&n - 1) * 2);
        assert_eq!(evaluate_nested(&spec).unwrap(), expect);
    }

    #[test]
    fn first_negative_moment_residue() {
        let (t, a, b, n) = (r(1, 3), r(3, 1), r(1, 1), r(2, 1));
        let spec = ContourSpec::new(ContourKind::NegativeFinite, t.clone(), a.clone(), b.clone(), n.clone(), 1).unwrap();
        let expect = (&a + &b + 1 + &t * (Rational::one() - &n)) / a.clone();
        assert_eq!(evaluate_nested(&spec).unwrap(), expect);
    }

    #[test]
    fn integrand_shape_k1() {
        let spec = ContourSpec::new(ContourKind::PositiveFinite, r(1, 3), r(1, 2), r(2, 1), r(7, 5), 1).unwrap();
        let term = build_integrand(&spec);
        assert_eq!(term.num.len(), 2);
        assert_eq!(term.den.len(), 2);
        assert_eq!(term.prefactor, r(15, 7));
    }

    #[test]
    fn frozen_gue_fourth_moment() {
        let spec = ContourSpec::new(ContourKind::PositiveFrozen, r(1, 1), r(1, 1), r(1, 1), r(0, 1), 4).unwrap();
        assert_eq!(evaluate_nested(&spec).unwrap(), q!("401/2352"));
    }

    #[test]
    fn kappa_zero_skipped() {
        let q = MomentQuery::new(r(0, 1), r(1, 1), r(1, 1), r(2, 1), 2);
        let rep = crosscheck(&q).unwrap();
        assert!(matches!(rep.status, CrosscheckStatus::Skipped(_)));
    }

    #[test]
    fn tree_sums_to_value() {
        let spec = ContourSpec::new(ContourKind::PositiveN0, r(2, 3), r(1, 2), r(3, 2), r(0, 1), 3).unwrap();
        let tree = pole_tree(&spec, 10_000).unwrap();
        assert_eq!(tree.value, evaluate_nested(&spec).unwrap());
        assert_eq!(tree.roots.len(), 1);
        assert_eq!(tree.roots[0].pole, r(0, 1));
    }
}
