//! Propositional modal formulas over `&`, `|`, `->`, `bot` and `[]`.

use std::fmt;
use std::sync::Arc;

/// A formula of propositional S4. Negation is not a separate variant:
/// `~A` is `A -> bot`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn imp(left: Formula, right: Formula) -> Formula {
        Formula::Imp(Box::new(left), Box::new(right))
    }

    pub fn boxed(inner: Formula) -> Formula {
        Formula::Box(Box::new(inner))
    }

    /// `~f`, i.e. `f -> bot`.
    pub fn neg(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bottom)
    }

    /// Number of `&`, `|`, `->` and `[]` symbols. `bot` and atoms count zero.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.degree() + r.degree()
            }
            Formula::Box(inner) => 1 + inner.degree(),
        }
    }

    /// True when every atom occurrence lies under at least one `[]`.
    /// `bot` is a logical symbol and imposes no constraint.
    pub fn is_essentially_modal(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Bottom | Formula::Box(_) => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.is_essentially_modal() && r.is_essentially_modal()
            }
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Bottom)
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    /// `Some(a)` when the formula is `a -> bot`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if b.is_bottom() => Some(a),
            _ => None,
        }
    }

    pub fn box_inner(&self) -> Option<&Formula> {
        match self {
            Formula::Box(inner) => Some(inner),
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(_, b) if b.is_bottom() => 4,
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    /// True when the top-level symbol is a binary connective (as printed).
    pub fn is_binary(&self) -> bool {
        self.precedence() < 4
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Bottom => f.write_str("bot"),
            Formula::Imp(a, b) if b.is_bottom() => {
                f.write_str("~")?;
                a.fmt_at(f, 4)
            }
            Formula::Box(inner) => {
                f.write_str("[]")?;
                inner.fmt_at(f, 4)
            }
            // `&` and `|` associate to the left, `->` to the right.
            Formula::And(l, r) => {
                l.fmt_at(f, 3)?;
                f.write_str(" & ")?;
                r.fmt_at(f, 4)
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" | ")?;
                r.fmt_at(f, 3)
            }
            Formula::Imp(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" -> ")?;
                r.fmt_at(f, 1)
            }
        }
    }

    /// LaTeX math-mode rendering.
    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        self.latex_at(&mut out, 0);
        out
    }

    fn latex_at(&self, out: &mut String, min_prec: u8) {
        let prec = self.precedence();
        if prec < min_prec {
            out.push('(');
            self.latex_at(out, 0);
            out.push(')');
            return;
        }
        match self {
            Formula::Atom(name) => out.push_str(name),
            Formula::Bottom => out.push_str("\\bot"),
            Formula::Imp(a, b) if b.is_bottom() => {
                out.push_str("\\neg ");
                a.latex_at(out, 4);
            }
            Formula::Box(inner) => {
                out.push_str("\\Box ");
                inner.latex_at(out, 4);
            }
            Formula::And(l, r) => {
                l.latex_at(out, 3);
                out.push_str(" \\wedge ");
                r.latex_at(out, 4);
            }
            Formula::Or(l, r) => {
                l.latex_at(out, 2);
                out.push_str(" \\vee ");
                r.latex_at(out, 3);
            }
            Formula::Imp(l, r) => {
                l.latex_at(out, 2);
                out.push_str(" \\to ");
                r.latex_at(out, 1);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// Free-function form of [`Formula::neg`].
pub fn neg(f: Formula) -> Formula {
    Formula::neg(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("A")
    }
    fn b() -> Formula {
        Formula::atom("B")
    }

    #[test]
    fn degree_examples() {
        assert_eq!(Formula::Bottom.degree(), 0);
        assert_eq!(Formula::boxed(Formula::and(a(), b())).degree(), 2);
        assert_eq!(neg(Formula::boxed(a())).degree(), 2);
        let goal = Formula::imp(
            Formula::boxed(a()),
            Formula::imp(Formula::boxed(b()), Formula::boxed(Formula::and(a(), b()))),
        );
        assert_eq!(goal.degree(), 6);
    }

    #[test]
    fn essentially_modal_examples() {
        assert!(Formula::boxed(a()).is_essentially_modal());
        assert!(Formula::and(Formula::boxed(a()), Formula::boxed(b())).is_essentially_modal());
        assert!(!Formula::and(Formula::boxed(a()), b()).is_essentially_modal());
        // only bot: vacuously modal
        assert!(neg(Formula::Bottom).is_essentially_modal());
    }

    #[test]
    fn neg_examples() {
        assert_eq!(neg(a()), Formula::imp(a(), Formula::Bottom));
        assert_eq!(neg(Formula::Bottom), Formula::imp(Formula::Bottom, Formula::Bottom));
        assert_eq!(neg(Formula::boxed(a())).negated(), Some(&Formula::boxed(a())));
    }

    #[test]
    fn display_minimal_parens() {
        let f = Formula::imp(
            Formula::boxed(a()),
            Formula::imp(Formula::boxed(b()), Formula::boxed(Formula::and(a(), b()))),
        );
        assert_eq!(f.to_string(), "[]A -> []B -> [](A & B)");
        assert_eq!(neg(Formula::boxed(a())).to_string(), "~[]A");
        assert_eq!(Formula::imp(Formula::imp(a(), b()), a()).to_string(), "(A -> B) -> A");
        assert_eq!(Formula::and(a(), Formula::and(a(), b())).to_string(), "A & (A & B)");
        assert_eq!(neg(Formula::imp(a(), b())).to_string(), "~(A -> B)");
        assert_eq!(neg(neg(Formula::Bottom)).to_string(), "~~bot");
    }
}
