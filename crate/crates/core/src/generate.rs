//! Seeded random NS4 derivations, valid by construction.
//!
//! Generation is goal-directed: pick a formula, then pick a rule able to
//! conclude it. Inside a `boxI` minor only the box's own assumption class
//! is in scope, so a branch may fail there; callers retry.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{is_critical, is_simplified, trivial_formulas};
use crate::check::check_ns4;
use crate::derivation::{Derivation, Label};
use crate::formula::Formula;
use crate::reduce::ReductionCase;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub atoms: Vec<String>,
    /// Rule nesting depth of generated subderivations.
    pub depth: usize,
    /// Nesting depth of randomly chosen formulas.
    pub formula_depth: usize,
    /// Only let `orE` conclude `bot`.
    pub simplified: bool,
    /// Upper bound on node count; larger results are discarded.
    pub max_size: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            atoms: vec!["p".into(), "q".into(), "r".into()],
            depth: 4,
            formula_depth: 2,
            simplified: false,
            max_size: 50,
        }
    }
}

#[derive(Clone)]
struct Ctx {
    hyps: Vec<(Formula, Label)>,
    /// Undischarged assumptions allowed.
    open: bool,
}

impl Ctx {
    fn with(&self, f: Formula, l: Label) -> Ctx {
        let mut c = self.clone();
        c.hyps.push((f, l));
        c
    }
}

pub struct Generator {
    rng: ChaCha8Rng,
    next_label: u32,
    pub config: GenConfig,
}

impl Generator {
    pub fn new(seed: u64, config: GenConfig) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_label: 1,
            config,
        }
    }

    fn fresh(&mut self) -> Label {
        let l = Label::new(self.next_label).expect("positive");
        self.next_label += 1;
        l
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            let a = self.config.atoms.choose(&mut self.rng).expect("at least one atom");
            return Formula::atom(a);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => Formula::and(self.formula(d), self.formula(d)),
            1 => Formula::or(self.formula(d), self.formula(d)),
            2 => Formula::imp(self.formula(d), self.formula(d)),
            3 => Formula::neg(self.formula(d)),
            _ => Formula::boxed(self.formula(d)),
        }
    }

    fn small_formula(&mut self) -> Formula {
        let d = self.config.formula_depth;
        self.formula(d)
    }

    /// A derivation of some random formula from open assumptions.
    pub fn derivation(&mut self) -> Derivation {
        loop {
            self.next_label = 1;
            let goal = self.small_formula();
            let ctx = Ctx {
                hyps: Vec::new(),
                open: true,
            };
            let depth = self.config.depth;
            if let Some(d) = self.gen(&goal, &ctx, depth) {
                if d.size() <= self.config.max_size {
                    return d;
                }
            }
        }
    }

    /// A derivation of `goal` from open assumptions, if one is found.
    pub fn derivation_of(&mut self, goal: &Formula) -> Option<Derivation> {
        let ctx = Ctx {
            hyps: Vec::new(),
            open: true,
        };
        let depth = self.config.depth;
        self.gen(goal, &ctx, depth).filter(|d| d.size() <= self.config.max_size)
    }

    fn leaf(&mut self, goal: &Formula, ctx: &Ctx) -> Option<Derivation> {
        let matching: Vec<Label> = ctx.hyps.iter().filter(|(f, _)| f == goal).map(|(_, l)| *l).collect();
        if let Some(l) = matching.choose(&mut self.rng) {
            if !ctx.open || self.rng.gen_bool(0.8) {
                return Some(Derivation::assume(goal.clone(), Some(*l)));
            }
        }
        if ctx.open {
            return Some(Derivation::assume(goal.clone(), None));
        }
        // Closed scope: reach the goal through a hypothesis if possible.
        let via: Vec<(Formula, Label)> = ctx
            .hyps
            .iter()
            .filter(|(f, _)| match f {
                Formula::Box(a) => **a == *goal,
                Formula::And(a, b) => **a == *goal || **b == *goal,
                _ => false,
            })
            .cloned()
            .collect();
        let (f, l) = via.choose(&mut self.rng)?.clone();
        let h = Derivation::assume(f.clone(), Some(l));
        Some(match f {
            Formula::Box(_) => Derivation::box_e(h).expect("boxed"),
            Formula::And(a, _) if *a == *goal => Derivation::and_el(h).expect("conjunction"),
            _ => Derivation::and_er(h).expect("conjunction"),
        })
    }

    fn gen(&mut self, goal: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        if depth == 0 {
            return self.leaf(goal, ctx);
        }
        for _ in 0..4 {
            let roll = self.rng.gen_range(0..10);
            let out = match roll {
                0..=1 => self.leaf(goal, ctx),
                2..=5 => self.intro(goal, ctx, depth),
                6..=8 => self.elim(goal, ctx, depth),
                _ => self.botc(goal, ctx, depth),
            };
            if out.is_some() {
                return out;
            }
        }
        self.leaf(goal, ctx)
    }

    fn intro(&mut self, goal: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        let d = depth - 1;
        match goal {
            Formula::Atom(_) => None,
            Formula::Bottom => {
                let negs: Vec<Formula> = ctx.hyps.iter().filter_map(|(f, _)| f.negated().cloned()).collect();
                let x = match negs.choose(&mut self.rng) {
                    Some(x) if self.rng.gen_bool(0.7) => x.clone(),
                    _ => self.small_formula(),
                };
                let major = self.gen(&Formula::neg(x.clone()), ctx, d)?;
                let minor = self.gen(&x, ctx, d)?;
                Some(Derivation::imp_e(major, minor).expect("~X applies to X"))
            }
            Formula::And(a, b) => {
                let l = self.gen(a, ctx, d)?;
                let r = self.gen(b, ctx, d)?;
                Some(Derivation::and_i(l, r))
            }
            Formula::Or(a, b) => {
                if self.rng.gen_bool(0.5) {
                    Some(Derivation::or_il(self.gen(a, ctx, d)?, (**b).clone()))
                } else {
                    Some(Derivation::or_ir(self.gen(b, ctx, d)?, (**a).clone()))
                }
            }
            Formula::Imp(a, b) => {
                let x = self.fresh();
                let body = self.gen(b, &ctx.with((**a).clone(), x), d)?;
                Some(Derivation::imp_i((**a).clone(), x, body))
            }
            Formula::Box(a) => self.box_intro(a, ctx, d),
        }
    }

    /// `boxI` concluding `[]a`. Majors are chosen among `[]a` itself, boxed
    /// hypotheses in scope and random boxed formulas.
    fn box_intro(&mut self, a: &Formula, ctx: &Ctx, d: usize) -> Option<Derivation> {
        let mut pool: Vec<Formula> = ctx.hyps.iter().map(|(f, _)| f.clone()).filter(Formula::is_box).collect();
        pool.push(Formula::boxed(self.small_formula()));
        if self.rng.gen_bool(0.4) {
            pool.push(Formula::boxed(a.clone()));
        }
        pool.shuffle(&mut self.rng);
        let count = self.rng.gen_range(1..=2);
        let mut chosen: Vec<Formula> = Vec::new();
        for f in pool {
            if chosen.len() < count && !chosen.contains(&f) {
                chosen.push(f);
            }
        }
        let k = self.fresh();
        let inner = Ctx {
            hyps: chosen.iter().map(|f| (f.clone(), k)).collect(),
            open: false,
        };
        let minor = self.gen(a, &inner, d)?;
        let mut majors = Vec::new();
        for f in &chosen {
            majors.push(self.gen(f, ctx, d)?);
        }
        Some(Derivation::box_i(majors, k, minor).expect("majors are boxed"))
    }

    fn elim(&mut self, goal: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        let d = depth - 1;
        let can_or = !self.config.simplified || goal.is_bottom();
        match self.rng.gen_range(0..5) {
            0 => {
                let x = self.small_formula();
                if self.rng.gen_bool(0.5) {
                    Derivation::and_el(self.gen(&Formula::and(goal.clone(), x), ctx, d)?).ok()
                } else {
                    Derivation::and_er(self.gen(&Formula::and(x, goal.clone()), ctx, d)?).ok()
                }
            }
            1 => {
                let x = self.small_formula();
                let major = self.gen(&Formula::imp(x.clone(), goal.clone()), ctx, d)?;
                let minor = self.gen(&x, ctx, d)?;
                Derivation::imp_e(major, minor).ok()
            }
            2 | 3 => Derivation::box_e(self.gen(&Formula::boxed(goal.clone()), ctx, d)?).ok(),
            _ if can_or => {
                let a = self.small_formula();
                let b = self.small_formula();
                let major = self.gen(&Formula::or(a.clone(), b.clone()), ctx, d)?;
                let x = self.fresh();
                let left = self.gen(goal, &ctx.with(a, x), d)?;
                let y = self.fresh();
                let right = self.gen(goal, &ctx.with(b, y), d)?;
                Derivation::or_e(major, x, left, y, right).ok()
            }
            _ => None,
        }
    }

    fn botc(&mut self, goal: &Formula, ctx: &Ctx, depth: usize) -> Option<Derivation> {
        if goal.is_bottom() {
            return None;
        }
        let n = self.fresh();
        let inner = ctx.with(Formula::neg(goal.clone()), n);
        let body = self.gen(&Formula::Bottom, &inner, depth - 1)?;
        Some(Derivation::bot_c(goal.clone(), n, body).expect("body concludes bot"))
    }

    /// `botC_n^f` whose body uses the `~f` class: as an `impE` major, or
    /// (when `minor_use`) in a position other than a major premiss.
    fn botc_using(&mut self, f: &Formula, ctx: &Ctx, d: usize, minor_use: bool) -> Option<Derivation> {
        let n = self.fresh();
        let not_f = Formula::neg(f.clone());
        let inner = ctx.with(not_f.clone(), n);
        let hyp = Derivation::assume(not_f.clone(), Some(n));
        let body = if minor_use {
            let major = self.gen(&Formula::neg(not_f), &inner, d)?;
            Derivation::imp_e(major, hyp).ok()?
        } else {
            let m = self.gen(f, &inner, d)?;
            Derivation::imp_e(hyp, m).ok()?
        };
        Derivation::bot_c(f.clone(), n, body).ok()
    }

    /// A derivation whose last inference is a redex of `case`. It is not
    /// necessarily critical; see [`Generator::critical`].
    pub fn redex(&mut self, case: ReductionCase) -> Option<Derivation> {
        self.next_label = 1;
        let ctx = Ctx {
            hyps: Vec::new(),
            open: true,
        };
        let d = self.config.depth.saturating_sub(1).max(1);
        let f = |g: &mut Generator| g.small_formula();
        match case {
            ReductionCase::ConjProper => {
                let (a, b) = (f(self), f(self));
                let i = Derivation::and_i(self.gen(&a, &ctx, d)?, self.gen(&b, &ctx, d)?);
                if self.rng.gen_bool(0.5) {
                    Derivation::and_el(i).ok()
                } else {
                    Derivation::and_er(i).ok()
                }
            }
            ReductionCase::ImpProper => {
                let (a, b) = (f(self), f(self));
                let x = self.fresh();
                let body = self.gen(&b, &ctx.with(a.clone(), x), d)?;
                let minor = self.gen(&a, &ctx, d)?;
                Derivation::imp_e(Derivation::imp_i(a, x, body), minor).ok()
            }
            ReductionCase::BoxProper => {
                let a = f(self);
                Derivation::box_e(self.box_intro(&a, &ctx, d)?).ok()
            }
            ReductionCase::DisjProper => {
                let (a, b) = (f(self), f(self));
                let major = if self.rng.gen_bool(0.5) {
                    Derivation::or_il(self.gen(&a, &ctx, d)?, b.clone())
                } else {
                    Derivation::or_ir(self.gen(&b, &ctx, d)?, a.clone())
                };
                let x = self.fresh();
                let left = self.gen(&Formula::Bottom, &ctx.with(a, x), d)?;
                let y = self.fresh();
                let right = self.gen(&Formula::Bottom, &ctx.with(b, y), d)?;
                Derivation::or_e(major, x, left, y, right).ok()
            }
            ReductionCase::BoxPermute => {
                let a = f(self);
                let inner = self.box_intro(&a, &ctx, d)?;
                self.outer_box(inner, &ctx, d)
            }
            ReductionCase::BotcAndE | ReductionCase::BotcImpE | ReductionCase::BotcBoxE | ReductionCase::BotcBoxI
            | ReductionCase::BotcBottomConcl | ReductionCase::BotcMinorBottom => {
                let minor_use = case == ReductionCase::BotcMinorBottom;
                let shape = if minor_use {
                    self.rng.gen_range(0..4)
                } else {
                    match case {
                        ReductionCase::BotcAndE => 0,
                        ReductionCase::BotcImpE => 1,
                        ReductionCase::BotcBoxE => 2,
                        ReductionCase::BotcBoxI => 3,
                        _ => 4 + self.rng.gen_range(0..2),
                    }
                };
                let (a, b) = (f(self), f(self));
                match shape {
                    0 => {
                        let m = self.botc_using(&Formula::and(a, b), &ctx, d, minor_use)?;
                        Derivation::and_el(m).ok()
                    }
                    1 => {
                        let m = self.botc_using(&Formula::imp(a.clone(), b), &ctx, d, minor_use)?;
                        Derivation::imp_e(m, self.gen(&a, &ctx, d)?).ok()
                    }
                    2 => Derivation::box_e(self.botc_using(&Formula::boxed(a), &ctx, d, minor_use)?).ok(),
                    3 => {
                        let m = self.botc_using(&Formula::boxed(a), &ctx, d, minor_use)?;
                        self.outer_box(m, &ctx, d)
                    }
                    4 => {
                        let m = self.botc_using(&Formula::neg(a.clone()), &ctx, d, false)?;
                        Derivation::imp_e(m, self.gen(&a, &ctx, d)?).ok()
                    }
                    _ => {
                        let m = self.botc_using(&Formula::or(a.clone(), b.clone()), &ctx, d, false)?;
                        let x = self.fresh();
                        let left = self.gen(&Formula::Bottom, &ctx.with(a, x), d)?;
                        let y = self.fresh();
                        let right = self.gen(&Formula::Bottom, &ctx.with(b, y), d)?;
                        Derivation::or_e(m, x, left, y, right).ok()
                    }
                }
            }
        }
    }

    /// `boxI` with `major` (concluding `[]a`) among its majors and a minor
    /// that eliminates `[]a`.
    fn outer_box(&mut self, major: Derivation, ctx: &Ctx, d: usize) -> Option<Derivation> {
        let boxed = major.conclusion().clone();
        let a = boxed.box_inner().expect("boxed major").clone();
        let mut formulas = vec![boxed.clone()];
        if self.rng.gen_bool(0.5) {
            let extra = Formula::boxed(self.small_formula());
            if extra != boxed {
                formulas.push(extra);
            }
        }
        let j = self.fresh();
        let inner = Ctx {
            hyps: formulas.iter().map(|f| (f.clone(), j)).collect(),
            open: false,
        };
        let use_a = Derivation::box_e(Derivation::assume(boxed, Some(j))).expect("boxed");
        let minor = match self.rng.gen_range(0..3) {
            0 => use_a,
            1 => {
                let other = self.gen(&a, &inner, d).unwrap_or_else(|| use_a.clone());
                Derivation::and_i(use_a, other)
            }
            _ => {
                let c = self.small_formula();
                let x = self.fresh();
                let body = self.gen(&c, &inner.with(a.clone(), x), d)?;
                let f = Derivation::imp_i(a, x, body);
                Derivation::imp_e(f, use_a).expect("antecedent matches")
            }
        };
        let mut majors = vec![major];
        for f in &formulas[1..] {
            majors.push(self.gen(f, ctx, d)?);
        }
        let n = majors.len();
        let pos = self.rng.gen_range(0..n);
        majors.swap(0, pos);
        Derivation::box_i(majors, j, minor).ok()
    }

    /// A critical, simplified, trivial-free NS4 derivation whose last
    /// inference is a redex of `case`, within the size bound.
    pub fn critical(&mut self, case: ReductionCase, attempts: usize) -> Option<Derivation> {
        for _ in 0..attempts {
            let Some(d) = self.redex(case) else { continue };
            if d.size() <= self.config.max_size
                && is_simplified(&d)
                && trivial_formulas(&d).is_empty()
                && is_critical(&d)
                && check_ns4(&d).valid()
            {
                return Some(d);
            }
        }
        None
    }
}
