//! Compliance checks for the bilinear constraint grammar.
//!
//! A product term is acceptable when it pairs a parameter-affine coefficient
//! with a parameter-free factor that involves at most one variable, e.g.
//! `x1*z <= x2` or `lambda*norm(z) <= 0`. `theta1*theta2` is rejected since
//! both arguments are parametrized.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lp::LpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `coeff * p1 * p2 * ...` over parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamMonomial {
    pub coeff: f64,
    pub params: Vec<String>,
    /// Parameter-only nonlinear pieces such as `sin(x1)`; never affine.
    #[serde(default)]
    pub opaque: Vec<String>,
}

/// Polynomial in the parameters; affine when every monomial has degree <= 1.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefExpr {
    pub monomials: Vec<ParamMonomial>,
}

impl CoefExpr {
    pub fn constant(c: f64) -> Self {
        CoefExpr { monomials: vec![ParamMonomial { coeff: c, params: vec![], opaque: vec![] }] }
    }

    pub fn param(name: &str, c: f64) -> Self {
        CoefExpr { monomials: vec![ParamMonomial { coeff: c, params: vec![name.into()], opaque: vec![] }] }
    }

    pub fn is_affine(&self) -> bool {
        self.monomials.iter().all(|m| m.params.len() <= 1 && m.opaque.is_empty())
    }
}

/// A parameter-free building block of a factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    Var(String),
    /// Function applied to an expression; `params` lists any parameters
    /// appearing inside, which makes the factor parametrized.
    Func { name: String, vars: Vec<String>, params: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateTerm {
    pub coef: CoefExpr,
    /// Empty means the constant factor 1.
    pub factor: Vec<Atom>,
}

/// `sum_k coef_k * factor_k  (rel)  rhs`. Objectives use `relation: None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearConstraintTemplate {
    pub terms: Vec<TemplateTerm>,
    pub relation: Option<Relation>,
    pub rhs: CoefExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Coefficient is not affine in the parameters.
    NonAffineCoefficient,
    /// More than one variable in a single product.
    MultipleVariables,
    /// A factor depends on parameters.
    ParametrizedFactor,
    /// Right-hand side is not affine in the parameters.
    NonAffineRhs,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    /// Template index; the objective is reported as `None`.
    pub template: Option<usize>,
    pub term: String,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DppReport {
    pub compliant: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Func { name, vars, params } => {
                let inner: Vec<&str> = params.iter().chain(vars).map(String::as_str).collect();
                write!(f, "{name}({})", inner.join(","))
            }
        }
    }
}

impl fmt::Display for CoefExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .monomials
            .iter()
            .map(|m| {
                let mut s: Vec<String> = Vec::new();
                if m.coeff != 1.0 || (m.params.is_empty() && m.opaque.is_empty()) {
                    s.push(format!("{}", m.coeff));
                }
                s.extend(m.params.iter().cloned());
                s.extend(m.opaque.iter().cloned());
                s.join("*")
            })
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

impl fmt::Display for TemplateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = self.coef.to_string();
        let coef = if self.coef.monomials.len() > 1 { format!("({coef})") } else { coef };
        if self.factor.is_empty() {
            return write!(f, "{coef}");
        }
        let fac: Vec<String> = self.factor.iter().map(|a| a.to_string()).collect();
        if coef == "1" {
            write!(f, "{}", fac.join("*"))
        } else {
            write!(f, "{coef}*{}", fac.join("*"))
        }
    }
}

fn term_violations(t: &TemplateTerm) -> Vec<ViolationKind> {
    let mut v = Vec::new();
    if !t.coef.is_affine() {
        v.push(ViolationKind::NonAffineCoefficient);
    }
    let var_atoms = t.factor.len();
    if var_atoms > 1 {
        v.push(ViolationKind::MultipleVariables);
    }
    if t.factor.iter().any(|a| matches!(a, Atom::Func { params, .. } if !params.is_empty())) {
        v.push(ViolationKind::ParametrizedFactor);
    }
    v
}

/// Checks every term of every template. The result does not depend on the
/// order of terms within a template.
pub fn validate_dpp(templates: &[BilinearConstraintTemplate], objective: &BilinearConstraintTemplate) -> DppReport {
    let mut violations = BTreeSet::new();
    let all = templates.iter().enumerate().map(|(i, t)| (Some(i), t)).chain(std::iter::once((None, objective)));
    for (idx, tpl) in all {
        for term in &tpl.terms {
            for kind in term_violations(term) {
                violations.insert(Violation { template: idx, term: term.to_string(), kind });
            }
        }
        if !tpl.rhs.is_affine() {
            violations.insert(Violation { template: idx, term: tpl.rhs.to_string(), kind: ViolationKind::NonAffineRhs });
        }
    }
    let violations: Vec<Violation> = violations.into_iter().collect();
    DppReport { compliant: violations.is_empty(), violations }
}

/// Parses constraint strings such as `x1*z <= x2` and an objective
/// expression, then validates them. Identifiers must be declared as either a
/// parameter or a variable.
pub fn validate_dpp_text(params: &[&str], vars: &[&str], constraints: &[&str], objective: &str) -> Result<DppReport, LpError> {
    let decl = Decls { params, vars };
    let templates = constraints.iter().map(|c| parse_template(&decl, c, true)).collect::<Result<Vec<_>, _>>()?;
    let obj = parse_template(&decl, objective, false)?;
    Ok(validate_dpp(&templates, &obj))
}

/// Parses a single template. Constraints need exactly one relation operator.
pub fn parse_constraint(params: &[&str], vars: &[&str], text: &str) -> Result<BilinearConstraintTemplate, LpError> {
    parse_template(&Decls { params, vars }, text, true)
}

struct Decls<'a> {
    params: &'a [&'a str],
    vars: &'a [&'a str],
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Rel(Relation),
}

fn lex(s: &str) -> Result<Vec<Tok>, LpError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.' || cs[i] == 'e' || ((cs[i] == '-' || cs[i] == '+') && cs[i - 1] == 'e')) {
                i += 1;
            }
            let text: String = cs[st..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| LpError::Parse(format!("bad number '{text}'")))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if c == '<' || c == '>' || c == '=' {
            let two = i + 1 < cs.len() && cs[i + 1] == '=';
            let rel = match c {
                '<' => Relation::Le,
                '>' => Relation::Ge,
                _ => Relation::Eq,
            };
            if c != '=' && !two {
                return Err(LpError::Parse(format!("strict relation '{c}' is not supported")));
            }
            out.push(Tok::Rel(rel));
            i += if two { 2 } else { 1 };
        } else if "+-*(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(LpError::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

/// Expanded product term during parsing.
#[derive(Clone, Debug)]
struct Raw {
    coeff: f64,
    params: Vec<String>,
    opaque: Vec<String>,
    atoms: Vec<Atom>,
}

impl Raw {
    fn one() -> Self {
        Raw { coeff: 1.0, params: vec![], opaque: vec![], atoms: vec![] }
    }

    fn times(&self, o: &Raw) -> Raw {
        let mut r = self.clone();
        r.coeff *= o.coeff;
        r.params.extend(o.params.iter().cloned());
        r.opaque.extend(o.opaque.iter().cloned());
        r.atoms.extend(o.atoms.iter().cloned());
        r.params.sort();
        r.opaque.sort();
        r.atoms.sort();
        r
    }
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    decl: &'a Decls<'a>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Vec<Raw>, LpError> {
        let mut sign = 1.0;
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            sign = -1.0;
        } else if self.peek() == Some(&Tok::Op('+')) {
            self.pos += 1;
        }
        let mut out: Vec<Raw> = self.product()?.into_iter().map(|mut r| {
            r.coeff *= sign;
            r
        }).collect();
        loop {
            let s = match self.peek() {
                Some(Tok::Op('+')) => 1.0,
                Some(Tok::Op('-')) => -1.0,
                _ => break,
            };
            self.pos += 1;
            out.extend(self.product()?.into_iter().map(|mut r| {
                r.coeff *= s;
                r
            }));
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<Vec<Raw>, LpError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Op('*')) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.iter().flat_map(|a| rhs.iter().map(move |b| a.times(b))).collect();
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Vec<Raw>, LpError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(vec![Raw { coeff: v, ..Raw::one() }])
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.factor()?.into_iter().map(|mut r| {
                    r.coeff = -r.coeff;
                    r
                }).collect())
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    self.pos += 1;
                    let mut inner = self.expr()?;
                    while self.peek() == Some(&Tok::Op(',')) {
                        self.pos += 1;
                        inner.extend(self.expr()?);
                    }
                    self.expect(')')?;
                    let mut vars: BTreeSet<String> = BTreeSet::new();
                    let mut params: BTreeSet<String> = BTreeSet::new();
                    for r in &inner {
                        params.extend(r.params.iter().cloned());
                        params.extend(r.opaque.iter().cloned());
                        for a in &r.atoms {
                            match a {
                                Atom::Var(v) => {
                                    vars.insert(v.clone());
                                }
                                Atom::Func { vars: fv, params: fp, .. } => {
                                    vars.extend(fv.iter().cloned());
                                    params.extend(fp.iter().cloned());
                                }
                            }
                        }
                    }
                    if vars.is_empty() {
                        // Nonlinear function of parameters alone.
                        let label = format!("{name}({})", params.iter().cloned().collect::<Vec<_>>().join(","));
                        return Ok(vec![Raw { opaque: vec![label], ..Raw::one() }]);
                    }
                    let atom = Atom::Func { name, vars: vars.into_iter().collect(), params: params.into_iter().collect() };
                    return Ok(vec![Raw { atoms: vec![atom], ..Raw::one() }]);
                }
                if self.decl.params.contains(&name.as_str()) {
                    Ok(vec![Raw { params: vec![name], ..Raw::one() }])
                } else if self.decl.vars.contains(&name.as_str()) {
                    Ok(vec![Raw { atoms: vec![Atom::Var(name)], ..Raw::one() }])
                } else {
                    Err(LpError::Parse(format!("undeclared identifier '{name}'")))
                }
            }
            other => Err(LpError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LpError> {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LpError::Parse(format!("expected '{c}'")))
        }
    }
}

fn parse_side(decl: &Decls, toks: Vec<Tok>) -> Result<Vec<Raw>, LpError> {
    if toks.is_empty() {
        return Err(LpError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, decl };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(LpError::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

fn parse_template(decl: &Decls, text: &str, constraint: bool) -> Result<BilinearConstraintTemplate, LpError> {
    let toks = lex(text)?;
    let rels: Vec<usize> = toks.iter().enumerate().filter(|(_, t)| matches!(t, Tok::Rel(_))).map(|(i, _)| i).collect();
    let (lhs, rhs, relation) = match (constraint, rels.as_slice()) {
        (true, [i]) => {
            let Tok::Rel(r) = toks[*i] else { unreachable!() };
            (toks[..*i].to_vec(), toks[i + 1..].to_vec(), Some(r))
        }
        (false, []) => (toks, Vec::new(), None),
        (true, _) => return Err(LpError::Parse(format!("constraint needs exactly one relation: '{text}'"))),
        (false, _) => return Err(LpError::Parse(format!("objective must not contain a relation: '{text}'"))),
    };
    let mut raws = parse_side(decl, lhs)?;
    if !rhs.is_empty() {
        raws.extend(parse_side(decl, rhs)?.into_iter().map(|mut r| {
            r.coeff = -r.coeff;
            r
        }));
    }
    // Terms with a factor stay on the left; constant-factor terms move right.
    let mut terms: Vec<TemplateTerm> = Vec::new();
    let mut rhs_expr = CoefExpr::default();
    for r in raws {
        let mono = ParamMonomial { coeff: r.coeff, params: r.params, opaque: r.opaque };
        if r.atoms.is_empty() && relation.is_some() {
            rhs_expr.monomials.push(ParamMonomial { coeff: -mono.coeff, ..mono });
        } else if let Some(t) = terms.iter_mut().find(|t| t.factor == r.atoms) {
            t.coef.monomials.push(mono);
        } else {
            terms.push(TemplateTerm { coef: CoefExpr { monomials: vec![mono] }, factor: r.atoms });
        }
    }
    Ok(BilinearConstraintTemplate { terms, relation, rhs: rhs_expr })
}
