//! Textual surface syntax: the `.nd` format, plus tree renderers.
//!
//! Formulas (ASCII):
//!
//! ```text
//! impl  := or ('->' impl)?
//! or    := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '~' unary | '[]' unary | atom
//! atom  := IDENT | 'bot' | '(' impl ')'
//! ```
//!
//! Derivations are parenthesized rule trees:
//! `(assume F k?)`, `(andI d d)`, `(andEl d)`, `(andEr d)`, `(orIl F d)`,
//! `(orIr F d)`, `(orE d k d k d)`, `(impI F k d)`, `(impE d d)`,
//! `(botC F k d)`, `(boxE d)`, `(boxI (d ...) k d)`. `#` starts a line
//! comment.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::derivation::{Derivation, DerivationError, Label, NodePath, Rule};
use crate::formula::Formula;

/// Byte offsets into the parsed text.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> SourceSpan {
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based line and column of the span start.
    pub fn line_col(&self, text: &str) -> (usize, usize) {
        let upto = &text[..self.start.min(text.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        (line, col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty { span: SourceSpan },
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("coherence error at {span}: {source}")]
    Coherence {
        span: SourceSpan,
        #[source]
        source: DerivationError,
    },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Empty { span } | ParseError::Syntax { span, .. } | ParseError::Coherence { span, .. } => *span,
        }
    }

    /// 1-based line and column of the error start.
    pub fn line_col(&self, text: &str) -> (usize, usize) {
        self.span().line_col(text)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    LParen,
    RParen,
    Tilde,
    BoxOp,
    Amp,
    Bar,
    Arrow,
    Ident(String),
    Number(u64),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::BoxOp => f.write_str("`[]`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |tok| (tok, SourceSpan::new(start, start + 1));
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b'~' => out.push(single(Tok::Tilde)),
            b'&' => out.push(single(Tok::Amp)),
            b'|' => out.push(single(Tok::Bar)),
            b'[' => {
                if bytes.get(i + 1) != Some(&b']') {
                    return Err(ParseError::Syntax {
                        span: SourceSpan::new(start, start + 1),
                        message: "expected `[]`".into(),
                    });
                }
                out.push((Tok::BoxOp, SourceSpan::new(start, start + 2)));
                i += 2;
                continue;
            }
            b'-' => {
                if bytes.get(i + 1) != Some(&b'>') {
                    return Err(ParseError::Syntax {
                        span: SourceSpan::new(start, start + 1),
                        message: "expected `->`".into(),
                    });
                }
                out.push((Tok::Arrow, SourceSpan::new(start, start + 2)));
                i += 2;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let span = SourceSpan::new(start, i);
                let n = text[start..i].parse::<u64>().map_err(|_| ParseError::Syntax {
                    span,
                    message: "number too large".into(),
                })?;
                out.push((Tok::Number(n), span));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
                continue;
            }
            _ => {
                let ch_len = text[start..].chars().next().map_or(1, char::len_utf8);
                return Err(ParseError::Syntax {
                    span: SourceSpan::new(start, start + ch_len),
                    message: format!("unexpected character `{}`", &text[start..start + ch_len]),
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    len: usize,
    /// Span of every derivation node, in pre-order.
    spans: Vec<SourceSpan>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = lex(text)?;
        if toks.is_empty() {
            return Err(ParseError::Empty {
                span: SourceSpan::new(0, text.len()),
            });
        }
        Ok(Parser {
            toks,
            pos: 0,
            len: text.len(),
            spans: Vec::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan::new(self.len, self.len))
    }

    fn prev_end(&self) -> usize {
        self.pos.checked_sub(1).map_or(0, |p| self.toks[p].1.end)
    }

    fn bump(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            span: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(t) if *t == want => Ok(self.bump().expect("peeked").1),
            Some(t) => {
                let msg = format!("expected {want}, found {t}");
                self.error(msg)
            }
            None => self.error(format!("expected {want}, found end of input")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.error(format!("unexpected trailing {t}")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::BoxOp) => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Some(Tok::Ident(name)) => {
                let f = if name == "bot" {
                    Formula::Bottom
                } else {
                    Formula::atom(name)
                };
                self.bump();
                Ok(f)
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(t) => {
                let msg = format!("expected a formula, found {t}");
                self.error(msg)
            }
            None => self.error("expected a formula, found end of input"),
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = *n;
                let span = self.here();
                self.bump();
                u32::try_from(n)
                    .ok()
                    .and_then(Label::new)
                    .ok_or_else(|| ParseError::Syntax {
                        span,
                        message: "labels are positive integers".into(),
                    })
            }
            Some(t) => {
                let msg = format!("expected a label, found {t}");
                self.error(msg)
            }
            None => self.error("expected a label, found end of input"),
        }
    }

    fn derivation(&mut self) -> Result<Derivation, ParseError> {
        let open = self.expect(Tok::LParen)?;
        let slot = self.spans.len();
        self.spans.push(open);
        let (rule, rule_span) = match self.bump() {
            Some((Tok::Ident(name), span)) => (name, span),
            Some((t, span)) => {
                return Err(ParseError::Syntax {
                    span,
                    message: format!("expected a rule name, found {t}"),
                })
            }
            None => return self.error("expected a rule name, found end of input"),
        };
        let built: Result<Derivation, DerivationError> = match rule.as_str() {
            "assume" => {
                let f = self.formula()?;
                let label = match self.peek() {
                    Some(Tok::Number(_)) => Some(self.label()?),
                    _ => None,
                };
                Ok(Derivation::assume(f, label))
            }
            "andI" => {
                let l = self.derivation()?;
                Ok(Derivation::and_i(l, self.derivation()?))
            }
            "andEl" => Derivation::and_el(self.derivation()?),
            "andEr" => Derivation::and_er(self.derivation()?),
            "orIl" => {
                let other = self.formula()?;
                Ok(Derivation::or_il(self.derivation()?, other))
            }
            "orIr" => {
                let other = self.formula()?;
                Ok(Derivation::or_ir(self.derivation()?, other))
            }
            "orE" => {
                let major = self.derivation()?;
                let ll = self.label()?;
                let left = self.derivation()?;
                let rl = self.label()?;
                let right = self.derivation()?;
                Derivation::or_e(major, ll, left, rl, right)
            }
            "impI" => {
                let antecedent = self.formula()?;
                let label = self.label()?;
                Ok(Derivation::imp_i(antecedent, label, self.derivation()?))
            }
            "impE" => {
                let major = self.derivation()?;
                Derivation::imp_e(major, self.derivation()?)
            }
            "botC" => {
                let target = self.formula()?;
                let label = self.label()?;
                Derivation::bot_c(target, label, self.derivation()?)
            }
            "boxE" => Derivation::box_e(self.derivation()?),
            "boxI" => {
                self.expect(Tok::LParen)?;
                let mut majors = Vec::new();
                while self.peek() == Some(&Tok::LParen) {
                    majors.push(self.derivation()?);
                }
                self.expect(Tok::RParen)?;
                let label = self.label()?;
                let minor = self.derivation()?;
                Derivation::box_i(majors, label, minor)
            }
            other => {
                return Err(ParseError::Syntax {
                    span: rule_span,
                    message: format!("unknown rule `{other}`"),
                })
            }
        };
        let close = self.expect(Tok::RParen)?;
        self.spans[slot] = open.join(close);
        built.map_err(|source| ParseError::Coherence {
            span: open.join(close),
            source,
        })
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_derivation(text: &str) -> Result<Derivation, ParseError> {
    let mut p = Parser::new(text)?;
    let d = p.derivation()?;
    p.finish()?;
    debug_assert!(p.prev_end() <= text.len());
    Ok(d)
}

/// A parsed derivation together with the source span of each node.
#[derive(Clone, Debug)]
pub struct Spanned {
    pub derivation: Derivation,
    spans: HashMap<NodePath, SourceSpan>,
}

impl Spanned {
    pub fn span_of(&self, path: &NodePath) -> Option<SourceSpan> {
        self.spans.get(path).copied()
    }
}

pub fn parse_derivation_spanned(text: &str) -> Result<Spanned, ParseError> {
    let mut p = Parser::new(text)?;
    let d = p.derivation()?;
    p.finish()?;
    let paths = d.paths();
    debug_assert_eq!(paths.len(), p.spans.len());
    let spans = paths.into_iter().zip(p.spans).collect();
    Ok(Spanned { derivation: d, spans })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderFormat {
    CanonicalSexpr,
    AsciiTree,
    LatexTree,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<RenderFormat, String> {
        match s {
            "canonical-sexpr" | "sexpr" => Ok(RenderFormat::CanonicalSexpr),
            "ascii-tree" | "ascii" => Ok(RenderFormat::AsciiTree),
            "latex-tree" | "latex" => Ok(RenderFormat::LatexTree),
            other => Err(format!("unknown format `{other}` (expected canonical-sexpr, ascii-tree or latex-tree)")),
        }
    }
}

pub fn render(d: &Derivation, format: RenderFormat) -> String {
    match format {
        RenderFormat::CanonicalSexpr => to_sexpr(d),
        RenderFormat::AsciiTree => to_ascii(d),
        RenderFormat::LatexTree => to_latex(d),
    }
}

fn sexpr_formula(f: &Formula, out: &mut String) {
    if f.is_binary() {
        out.push('(');
        out.push_str(&f.to_string());
        out.push(')');
    } else {
        out.push_str(&f.to_string());
    }
}

/// Single-line canonical form; `parse_derivation` inverts it exactly.
pub fn to_sexpr(d: &Derivation) -> String {
    let mut out = String::new();
    write_sexpr(d, &mut out);
    out
}

fn write_sexpr(d: &Derivation, out: &mut String) {
    out.push('(');
    out.push_str(d.kind().name());
    match d.rule() {
        Rule::Assume { label } => {
            out.push(' ');
            sexpr_formula(d.conclusion(), out);
            if let Some(l) = label {
                out.push_str(&format!(" {l}"));
            }
        }
        Rule::AndI(l, r) => {
            for p in [l, r] {
                out.push(' ');
                write_sexpr(p, out);
            }
        }
        Rule::AndEL(p) | Rule::AndER(p) | Rule::BoxE(p) => {
            out.push(' ');
            write_sexpr(p, out);
        }
        Rule::OrIL { premiss, other } | Rule::OrIR { premiss, other } => {
            out.push(' ');
            sexpr_formula(other, out);
            out.push(' ');
            write_sexpr(premiss, out);
        }
        Rule::OrE {
            major,
            left_label,
            left,
            right_label,
            right,
        } => {
            out.push(' ');
            write_sexpr(major, out);
            out.push_str(&format!(" {left_label} "));
            write_sexpr(left, out);
            out.push_str(&format!(" {right_label} "));
            write_sexpr(right, out);
        }
        Rule::ImpI { antecedent, label, body } => {
            out.push(' ');
            sexpr_formula(antecedent, out);
            out.push_str(&format!(" {label} "));
            write_sexpr(body, out);
        }
        Rule::ImpE { major, minor } => {
            out.push(' ');
            write_sexpr(major, out);
            out.push(' ');
            write_sexpr(minor, out);
        }
        Rule::BotC { label, body } => {
            out.push(' ');
            sexpr_formula(d.conclusion(), out);
            out.push_str(&format!(" {label} "));
            write_sexpr(body, out);
        }
        Rule::BoxI { majors, label, minor } => {
            out.push_str(" (");
            for (i, m) in majors.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_sexpr(m, out);
            }
            out.push_str(&format!(") {label} "));
            write_sexpr(minor, out);
        }
    }
    out.push(')');
}

/// Multi-line, indented variant of the canonical form, for corpus files.
pub fn to_sexpr_pretty(d: &Derivation) -> String {
    let mut out = String::new();
    write_pretty(d, 0, &mut out);
    out
}

fn write_pretty(d: &Derivation, indent: usize, out: &mut String) {
    let flat = to_sexpr(d);
    if flat.len() + indent <= 78 || d.is_assumption() {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    out.push('(');
    out.push_str(d.kind().name());
    let child = |p: &Derivation, out: &mut String| {
        out.push('\n');
        out.push_str(&pad);
        write_pretty(p, indent + 2, out);
    };
    match d.rule() {
        Rule::Assume { .. } => unreachable!("handled above"),
        Rule::AndI(l, r) => {
            child(l, out);
            child(r, out);
        }
        Rule::AndEL(p) | Rule::AndER(p) | Rule::BoxE(p) => child(p, out),
        Rule::OrIL { premiss, other } | Rule::OrIR { premiss, other } => {
            out.push(' ');
            sexpr_formula(other, out);
            child(premiss, out);
        }
        Rule::OrE {
            major,
            left_label,
            left,
            right_label,
            right,
        } => {
            child(major, out);
            out.push_str(&format!("\n{pad}{left_label}"));
            child(left, out);
            out.push_str(&format!("\n{pad}{right_label}"));
            child(right, out);
        }
        Rule::ImpI { antecedent, label, body } => {
            out.push(' ');
            sexpr_formula(antecedent, out);
            out.push_str(&format!(" {label}"));
            child(body, out);
        }
        Rule::ImpE { major, minor } => {
            child(major, out);
            child(minor, out);
        }
        Rule::BotC { label, body } => {
            out.push(' ');
            sexpr_formula(d.conclusion(), out);
            out.push_str(&format!(" {label}"));
            child(body, out);
        }
        Rule::BoxI { majors, label, minor } => {
            out.push_str(" (");
            let inner = " ".repeat(indent + 4);
            for m in majors {
                out.push('\n');
                out.push_str(&inner);
                write_pretty(m, indent + 4, out);
            }
            out.push_str(&format!(")\n{pad}{label}"));
            child(minor, out);
        }
    }
    out.push(')');
}

fn rule_tag(d: &Derivation) -> String {
    let labels: Vec<String> = d.binder_labels().iter().map(ToString::to_string).collect();
    if labels.is_empty() {
        d.kind().name().to_string()
    } else {
        format!("{} {}", d.kind().name(), labels.join(","))
    }
}

struct Block {
    lines: Vec<String>,
    width: usize,
}

fn pad_to(s: &str, width: usize) -> String {
    let n = s.chars().count();
    let mut out = s.to_string();
    out.extend(std::iter::repeat_n(' ', width.saturating_sub(n)));
    out
}

fn ascii_block(d: &Derivation) -> Block {
    if let Rule::Assume { label } = d.rule() {
        let text = match label {
            Some(l) => format!("[{}]^{l}", d.conclusion()),
            None => d.conclusion().to_string(),
        };
        let width = text.chars().count();
        return Block { lines: vec![text], width };
    }
    let blocks: Vec<Block> = d.premisses().into_iter().map(ascii_block).collect();
    let height = blocks.iter().map(|b| b.lines.len()).max().unwrap_or(0);
    const GAP: usize = 3;
    let row_width = blocks.iter().map(|b| b.width).sum::<usize>() + GAP * blocks.len().saturating_sub(1);
    let conclusion = d.conclusion().to_string();
    let bar = row_width.max(conclusion.chars().count());
    let tag = rule_tag(d);
    let width = bar + 1 + tag.chars().count();
    let row_indent = (bar - row_width) / 2;
    let mut lines = Vec::new();
    for r in 0..height {
        let mut line = " ".repeat(row_indent);
        for (i, b) in blocks.iter().enumerate() {
            if i > 0 {
                line.push_str(&" ".repeat(GAP));
            }
            let offset = height - b.lines.len();
            let cell = if r >= offset { b.lines[r - offset].as_str() } else { "" };
            line.push_str(&pad_to(cell, b.width));
        }
        lines.push(pad_to(&line, width));
    }
    lines.push(pad_to(&format!("{} {tag}", "-".repeat(bar)), width));
    let c_indent = (bar - conclusion.chars().count()) / 2;
    lines.push(pad_to(&format!("{}{conclusion}", " ".repeat(c_indent)), width));
    Block { lines, width }
}

/// Gentzen-style tree: premisses over a rule line, conclusion below.
pub fn to_ascii(d: &Derivation) -> String {
    let block = ascii_block(d);
    let lines: Vec<&str> = block.lines.iter().map(|l| l.trim_end()).collect();
    lines.join("\n")
}

fn latex_rule(d: &Derivation) -> String {
    let name = match d.rule() {
        Rule::Assume { .. } => return String::new(),
        Rule::AndI(..) => "$\\wedge$-I",
        Rule::AndEL(_) | Rule::AndER(_) => "$\\wedge$-E",
        Rule::OrIL { .. } | Rule::OrIR { .. } => "$\\vee$-I",
        Rule::OrE { .. } => "$\\vee$-E",
        Rule::ImpI { .. } => "$\\to$-I",
        Rule::ImpE { .. } => "$\\to$-E",
        Rule::BotC { .. } => "$\\bot_c$",
        Rule::BoxE(_) => "$\\Box$-E",
        Rule::BoxI { .. } => "$\\Box$-I",
    };
    let labels: Vec<String> = d.binder_labels().iter().map(ToString::to_string).collect();
    if labels.is_empty() {
        name.to_string()
    } else {
        format!("{name} {}", labels.join(","))
    }
}

fn write_latex(d: &Derivation, out: &mut Vec<String>) {
    if let Rule::Assume { label } = d.rule() {
        let f = d.conclusion().to_latex();
        out.push(match label {
            Some(l) => format!("\\AxiomC{{$[{f}]^{{{l}}}$}}"),
            None => format!("\\AxiomC{{${f}$}}"),
        });
        return;
    }
    let premisses = d.premisses();
    let mut count = 0usize;
    let total = premisses.len();
    for (i, p) in premisses.into_iter().enumerate() {
        write_latex(p, out);
        count += 1;
        // bussproofs stops at five premisses; fold the leading ones together.
        let remaining = total - i - 1;
        if count > 1 && count + remaining > 5 {
            out.push("\\noLine\\BinaryInfC{}".to_string());
            count -= 1;
        }
    }
    let infer = match count {
        1 => "UnaryInfC",
        2 => "BinaryInfC",
        3 => "TrinaryInfC",
        4 => "QuaternaryInfC",
        _ => "QuinaryInfC",
    };
    out.push(format!("\\RightLabel{{\\scriptsize {}}}", latex_rule(d)));
    out.push(format!("\\{infer}{{${}$}}", d.conclusion().to_latex()));
}

/// `bussproofs` markup wrapped in a `prooftree` environment.
pub fn to_latex(d: &Derivation) -> String {
    let mut lines = vec!["\\begin{prooftree}".to_string()];
    write_latex(d, &mut lines);
    lines.push("\\end{prooftree}".to_string());
    lines.join("\n")
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
    fn formula_examples() {
        assert_eq!(parse_formula("[](A & B)").unwrap(), Formula::boxed(Formula::and(a(), b())));
        assert_eq!(parse_formula("~[]A").unwrap(), Formula::imp(Formula::boxed(a()), Formula::Bottom));
        let goal = parse_formula("[]A -> ([]B -> [](A & B))").unwrap();
        assert_eq!(
            goal,
            Formula::imp(
                Formula::boxed(a()),
                Formula::imp(Formula::boxed(b()), Formula::boxed(Formula::and(a(), b())))
            )
        );
        assert_eq!(parse_formula("A -> B -> A").unwrap(), Formula::imp(a(), Formula::imp(b(), a())));
        assert_eq!(
            parse_formula("A | B & A").unwrap(),
            Formula::or(a(), Formula::and(b(), a()))
        );
    }

    #[test]
    fn formula_errors_have_spans() {
        let e = parse_formula("").unwrap_err();
        assert!(matches!(e, ParseError::Empty { .. }));
        let e = parse_formula("A & ").unwrap_err();
        assert_eq!(e.span(), SourceSpan::new(4, 4));
        let e = parse_formula("A $ B").unwrap_err();
        assert_eq!(e.span(), SourceSpan::new(2, 3));
        let e = parse_formula("(A").unwrap_err();
        assert!(e.to_string().contains("expected `)`"));
    }

    #[test]
    fn derivation_coherence() {
        let d = parse_derivation("(boxE (assume [](A)))").unwrap();
        assert_eq!(d.conclusion(), &a());
        let e = parse_derivation("(boxE (assume A))").unwrap_err();
        assert!(matches!(e, ParseError::Coherence { .. }));
        assert!(e.to_string().contains("major premiss must be Box"));
        assert_eq!(e.span(), SourceSpan::new(0, 17));
        let e = parse_derivation("(impE (assume A -> B) (assume B))").unwrap_err();
        assert!(e.to_string().contains("expected `A`"));
    }

    #[test]
    fn labels_must_be_positive() {
        assert!(parse_derivation("(impI A 0 (assume A 0))").is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let d = parse_derivation("# heading\n(andI\n  (assume A)   # left\n  (assume B))\n").unwrap();
        assert_eq!(d.conclusion(), &Formula::and(a(), b()));
    }

    #[test]
    fn canonical_form() {
        let text = "(boxI ((assume []A) (andEl (assume ([]B & C)))) 1 (andI (boxE (assume []A 1)) (boxE (assume []B 1))))";
        let d = parse_derivation(text).unwrap();
        assert_eq!(to_sexpr(&d), text);
        assert_eq!(parse_derivation(&to_sexpr_pretty(&d)).unwrap(), d);
    }

    #[test]
    fn ascii_single_leaf_is_one_line() {
        let d = Derivation::assume(a(), None);
        assert_eq!(to_ascii(&d), "A");
        let d = parse_derivation("(andI (assume A) (assume B))").unwrap();
        let art = to_ascii(&d);
        assert_eq!(art.lines().count(), 3);
        assert!(art.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn latex_folds_wide_inferences() {
        let majors: Vec<String> = (0..6).map(|i| format!("(assume []P{i})")).collect();
        let text = format!("(boxI ({}) 1 (boxE (assume []P0 1)))", majors.join(" "));
        let d = parse_derivation(&text).unwrap();
        let tex = to_latex(&d);
        assert!(tex.contains("\\noLine\\BinaryInfC{}"));
        assert!(tex.contains("\\QuinaryInfC"));
    }

    #[test]
    fn node_spans_follow_the_source() {
        let text = "(andI\n  (assume p)\n  (assume q))";
        let sp = parse_derivation_spanned(text).unwrap();
        let root = sp.span_of(&NodePath::root()).unwrap();
        assert_eq!((root.start, root.end), (0, text.len()));
        let right = sp.span_of(&NodePath(vec![1])).unwrap();
        assert_eq!(&text[right.start..right.end], "(assume q)");
        assert_eq!(right.line_col(text), (3, 3));
        assert!(sp.span_of(&NodePath(vec![2])).is_none());
    }

}
