//! Mode declarations: the hypothesis language.
//!
//! ```text
//! modeh(initiatedAt(moving(+person,+person),+time))
//! modeb(distanceLessThan(+person,+person,#dist,+time))
//! constants(dist, [25,30,34,40]).
//! ```

use std::collections::BTreeMap;
use std::fmt;

use super::parser::Parser;
use super::term::{sym, Literal, Sym, Term};
use crate::error::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    /// `+type`
    Input,
    /// `-type`
    Output,
    /// `#type`
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placemarker {
    pub placement: Placement,
    pub ty: Sym,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeTerm {
    Place(Placemarker),
    Const(Term),
    Compound(Sym, Vec<ModeTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeAtom {
    pub pred: Sym,
    pub args: Vec<ModeTerm>,
}

impl ModeAtom {
    /// Aligns `lit` with this template and returns the term filling each
    /// placemarker, in left-to-right order. `None` if the shapes differ.
    pub fn slots<'a>(&'a self, lit: &'a Literal) -> Option<Vec<(&'a Placemarker, &'a Term)>> {
        if lit.pred != self.pred || lit.args.len() != self.args.len() {
            return None;
        }
        let mut out = Vec::new();
        for (m, t) in self.args.iter().zip(&lit.args) {
            align(m, t, &mut out)?;
        }
        Some(out)
    }

    pub fn placemarkers(&self) -> Vec<&Placemarker> {
        fn walk<'a>(m: &'a ModeTerm, out: &mut Vec<&'a Placemarker>) {
            match m {
                ModeTerm::Place(p) => out.push(p),
                ModeTerm::Compound(_, args) => args.iter().for_each(|a| walk(a, out)),
                ModeTerm::Const(_) => {}
            }
        }
        let mut out = Vec::new();
        self.args.iter().for_each(|a| walk(a, &mut out));
        out
    }
}

fn align<'a>(m: &'a ModeTerm, t: &'a Term, out: &mut Vec<(&'a Placemarker, &'a Term)>) -> Option<()> {
    match (m, t) {
        (ModeTerm::Place(p), t) => {
            out.push((p, t));
            Some(())
        }
        (ModeTerm::Const(c), t) => (c == t).then_some(()),
        (ModeTerm::Compound(f, margs), Term::Compound(g, targs)) if f == g && margs.len() == targs.len() => {
            for (m, t) in margs.iter().zip(targs) {
                align(m, t, out)?;
            }
            Some(())
        }
        _ => None,
    }
}

impl fmt::Display for ModeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeTerm::Place(p) => {
                let c = match p.placement {
                    Placement::Input => '+',
                    Placement::Output => '-',
                    Placement::Constant => '#',
                };
                write!(f, "{c}{}", p.ty)
            }
            ModeTerm::Const(t) => write!(f, "{t}"),
            ModeTerm::Compound(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ModeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ModeTerm::Compound(self.pred.clone(), self.args.clone()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeBias {
    pub heads: Vec<ModeAtom>,
    pub bodies: Vec<ModeAtom>,
    /// Candidate values for `#type` slots, keyed by type.
    pub constants: BTreeMap<Sym, Vec<Term>>,
}

impl ModeBias {
    /// Type of the time slot: the last argument of the first head declaration.
    pub fn time_type(&self) -> Option<&Sym> {
        match self.heads.first()?.args.last()? {
            ModeTerm::Place(p) => Some(&p.ty),
            _ => None,
        }
    }

    pub fn constants_of(&self, ty: &str) -> Option<&[Term]> {
        self.constants.get(ty).map(Vec::as_slice)
    }
}

pub fn parse_mode_bias(text: &str) -> Result<ModeBias, ParseError> {
    let mut p = Parser::new(text);
    let mut bias = ModeBias::default();
    while !p.at_end() {
        let keyword = p.identifier()?;
        match keyword {
            "modeh" | "modeb" => {
                p.expect('(')?;
                let atom = mode_atom(&mut p)?;
                p.expect(')')?;
                let list = if keyword == "modeh" { &mut bias.heads } else { &mut bias.bodies };
                if !list.contains(&atom) {
                    list.push(atom);
                }
            }
            "constants" => {
                p.expect('(')?;
                let ty = sym(p.identifier()?);
                p.expect(',')?;
                p.expect('[')?;
                let values = bias.constants.entry(ty).or_default();
                if !p.eat(']') {
                    loop {
                        let v = p.term()?;
                        if !v.is_ground() {
                            return Err(p.error("constant values must be ground"));
                        }
                        if !values.contains(&v) {
                            values.push(v);
                        }
                        if p.eat(']') {
                            break;
                        }
                        p.expect(',')?;
                    }
                }
                p.expect(')')?;
            }
            other => return Err(p.error(format!("unknown declaration '{other}'"))),
        }
        p.eat('.');
    }
    Ok(bias)
}

fn mode_atom(p: &mut Parser<'_>) -> Result<ModeAtom, ParseError> {
    let pred = sym(p.identifier()?);
    let mut args = Vec::new();
    if p.eat('(') {
        args = mode_args(p)?;
    }
    Ok(ModeAtom { pred, args })
}

fn mode_args(p: &mut Parser<'_>) -> Result<Vec<ModeTerm>, ParseError> {
    let mut args = vec![mode_term(p)?];
    while p.eat(',') {
        args.push(mode_term(p)?);
    }
    p.expect(')')?;
    Ok(args)
}

fn mode_term(p: &mut Parser<'_>) -> Result<ModeTerm, ParseError> {
    p.skip_ws();
    let placement = match p.peek() {
        Some('+') => Some(Placement::Input),
        Some('#') => Some(Placement::Constant),
        Some('-') if !p.remaining()[1..].trim_start().starts_with(|c: char| c.is_ascii_digit()) => {
            Some(Placement::Output)
        }
        _ => None,
    };
    if let Some(placement) = placement {
        p.advance(1);
        let ty = p.identifier()?;
        return Ok(ModeTerm::Place(Placemarker { placement, ty: sym(ty) }));
    }
    match p.peek() {
        Some(c) if c.is_lowercase() => {
            let name = sym(p.identifier()?);
            if p.eat('(') {
                Ok(ModeTerm::Compound(name, mode_args(p)?))
            } else {
                Ok(ModeTerm::Const(Term::Const(name)))
            }
        }
        Some(c) if c.is_ascii_digit() || c == '-' => Ok(ModeTerm::Const(p.term()?)),
        Some(c) => Err(p.error(format!("unknown placemarker '{c}'"))),
        None => Err(p.error("unexpected end of input")),
    }
}
