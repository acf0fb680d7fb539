//! Exact `‖∇𝕄(f⃗)‖_{ℓ¹(ℤ^d)}` for `d ≤ 2`.
//!
//! Along any line parallel to `e_l`, the field is monotone once the line
//! leaves the support hull in direction `l` (every candidate box keeps its sums
//! and only gains length), so the variation of a line is
//! `M(lo_l) + M(hi_l) + Σ_{t=lo_l}^{hi_l-1} |M(t+1) - M(t)|`.
//!
//! Lines that miss the hull in the transverse direction `o` are handled in
//! closed form. At distance `s ≥ 1` above the hull,
//! `M(t, hi_o + s) = max_c Q_t(c) / (s + c)^m` where `c ∈ [1, w_o]` is the
//! number of hull rows the box covers and `Q_t(c)` maximizes over the
//! `l`-interval. Each such envelope switches its active term finitely often, so
//! the sum over `s` splits into segments on which the summand is a fixed
//! combination `Σ α_c (s + c)^{-m}`, summed with the Hurwitz zeta function.

use super::StrongMaxEngine;
use crate::error::{Error, Result};
use crate::numerics::{hurwitz_zeta, KahanSum};

/// One term `q / (s + c)^m` of an envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    q: f64,
    c: usize,
}

impl Term {
    fn at(self, s: f64, m: i32) -> f64 {
        self.q / (s + self.c as f64).powi(m)
    }
}

/// Pointwise maximum of terms, pruned so `c` and `q` both strictly increase.
#[derive(Debug, Clone, Default)]
struct Envelope {
    terms: Vec<Term>,
}

impl Envelope {
    fn from_unsorted(mut raw: Vec<Term>) -> Self {
        raw.retain(|t| t.q > 0.0);
        raw.sort_by(|a, b| a.c.cmp(&b.c).then(b.q.total_cmp(&a.q)));
        let mut terms: Vec<Term> = Vec::new();
        for t in raw {
            if terms.last().is_none_or(|last| t.q > last.q && t.c > last.c) {
                terms.push(t);
            }
        }
        Self { terms }
    }

    fn active(&self, s: f64, m: i32) -> Option<(Term, f64)> {
        self.terms
            .iter()
            .map(|t| (*t, t.at(s, m)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    fn value(&self, s: f64, m: i32) -> f64 {
        self.active(s, m).map_or(0.0, |(_, v)| v)
    }
}

// Crossings past this point only shift contributions of order CAP^{1-m}.
const CAP: f64 = 1e15;
const DIRECT_SEGMENT: u64 = 64;

fn crossing(a: Term, b: Term, m: i32) -> Option<u64> {
    if a.c == b.c {
        return None;
    }
    let rho = (b.q / a.q).powf(1.0 / m as f64);
    if rho == 1.0 {
        return None;
    }
    let s = (rho * a.c as f64 - b.c as f64) / (1.0 - rho);
    (s.is_finite() && s > 0.0).then(|| s.min(CAP).floor() as u64)
}

/// Sum over `s` of `E_0 + E_{T-1} + Σ_t |E_{t+1} - E_t|` for a family of
/// envelopes, over `s ∈ [1, limit]` (or `[1, ∞)`).
struct RayFamily<'a> {
    envs: &'a [Envelope],
    m: i32,
    width: usize,
}

impl RayFamily<'_> {
    fn summand(&self, s: f64) -> f64 {
        let vals: Vec<f64> = self.envs.iter().map(|e| e.value(s, self.m)).collect();
        let mut acc = vals[0] + vals[vals.len() - 1];
        for w in vals.windows(2) {
            acc += (w[1] - w[0]).abs();
        }
        acc
    }

    /// Coefficients `α_c` of the summand valid near `s`.
    fn coefficients(&self, s: f64) -> Vec<f64> {
        let mut alpha = vec![0.0; self.width + 1];
        let active: Vec<Option<(Term, f64)>> = self.envs.iter().map(|e| e.active(s, self.m)).collect();
        let mut add = |slot: &Option<(Term, f64)>, sign: f64| {
            if let Some((t, _)) = slot {
                alpha[t.c] += sign * t.q;
            }
        };
        add(&active[0], 1.0);
        add(&active[active.len() - 1], 1.0);
        for w in active.windows(2) {
            let hi = w[1].map_or(0.0, |x| x.1);
            let lo = w[0].map_or(0.0, |x| x.1);
            let sign = if hi >= lo { 1.0 } else { -1.0 };
            add(&w[1], sign);
            add(&w[0], -sign);
        }
        alpha
    }

    fn breakpoints(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        let mut pairs = |xs: &[Term], ys: &[Term]| {
            for a in xs {
                for b in ys {
                    out.extend(crossing(*a, *b, self.m));
                }
            }
        };
        for e in self.envs {
            pairs(&e.terms, &e.terms);
        }
        for w in self.envs.windows(2) {
            pairs(&w[0].terms, &w[1].terms);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn direct(&self, from: u64, to: u64, acc: &mut KahanSum) {
        for s in from..=to {
            acc.add(self.summand(s as f64));
        }
    }

    /// `Σ_{s=from}^{to} Σ_c α_c (s+c)^{-m}` with the configuration read at `probe`.
    fn closed_form(&self, from: u64, to: Option<u64>, probe: u64, acc: &mut KahanSum) {
        let alpha = self.coefficients(probe as f64);
        let m = self.m as f64;
        for (c, a) in alpha.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let head = hurwitz_zeta(m, (from as usize + c) as f64);
            let tail = to.map_or(0.0, |to| hurwitz_zeta(m, (to as usize + 1 + c) as f64));
            acc.add(a * head);
            acc.add(-a * tail);
        }
    }

    fn sum(&self, limit: Option<u64>) -> f64 {
        let mut acc = KahanSum::new();
        if self.envs.iter().all(|e| e.terms.is_empty()) {
            return 0.0;
        }
        let mut bps = self.breakpoints();
        if let Some(l) = limit {
            bps.retain(|b| *b < l);
        }
        for (i, &b) in bps.iter().enumerate() {
            let start = b + 1;
            let stop = bps.get(i + 1).copied().or(limit);
            match stop {
                Some(stop) if stop < start => {}
                Some(stop) if stop - start < DIRECT_SEGMENT || self.m == 1 => {
                    self.direct(start, stop, &mut acc)
                }
                Some(stop) => {
                    self.direct(start, start + 1, &mut acc);
                    self.direct(stop - 1, stop, &mut acc);
                    let probe = start + (stop - start) / 2;
                    self.closed_form(start + 2, Some(stop - 2), probe, &mut acc);
                }
                None => {
                    self.direct(start, start + 1, &mut acc);
                    self.closed_form(start + 2, None, start + 2, &mut acc);
                }
            }
        }
        acc.value()
    }
}

/// `‖∇𝕄(f⃗)‖_{ℓ¹(ℤ^d)}` summed over all of `ℤ^d`, coordinatewise convention.
///
/// Finite for `d = 1` and for `d = 2, m ≥ 2`; three dimensions are not handled.
pub fn gradient_l1_exact(engine: &StrongMaxEngine) -> Result<f64> {
    gradient_l1_partial(engine, None)
}

/// Same sum restricted to lines (in every direction) whose transverse
/// coordinate lies within `ray_limit` of the support hull. Each line is still
/// summed over its full length. `None` means no restriction.
pub fn gradient_l1_partial(engine: &StrongMaxEngine, ray_limit: Option<u64>) -> Result<f64> {
    let Some(support) = engine.support().cloned() else {
        return Ok(0.0);
    };
    let d = engine.dim();
    let m = engine.m();
    if d == 3 {
        return Err(Error::Unsupported("exact gradient norm in three dimensions".into()));
    }
    if d == 2 && m < 2 && ray_limit.is_none() {
        return Err(Error::InvalidParameter(
            "the gradient of the maximal field is not summable for d = 2, m = 1".into(),
        ));
    }
    let mut total = KahanSum::new();
    let line_variation = |vals: &[f64]| -> f64 {
        let mut v = vals[0] + vals[vals.len() - 1];
        for w in vals.windows(2) {
            v += (w[1] - w[0]).abs();
        }
        v
    };
    if d == 1 {
        let vals: Vec<f64> = (support.lo()[0]..=support.hi()[0])
            .map(|t| engine.value(&[t]))
            .collect::<Result<_>>()?;
        return Ok(line_variation(&vals));
    }
    for l in 0..2 {
        let o = 1 - l;
        let mut n = [0i64; 2];
        for row in support.lo()[o]..=support.hi()[o] {
            n[o] = row;
            let mut vals = Vec::with_capacity(support.extent(l));
            for t in support.lo()[l]..=support.hi()[l] {
                n[l] = t;
                vals.push(engine.value(&n)?);
            }
            total.add(line_variation(&vals));
        }
        for above in [true, false] {
            let envs = ray_envelopes(engine, l, above);
            let family = RayFamily {
                envs: &envs,
                m: m as i32,
                width: support.extent(o),
            };
            total.add(family.sum(ray_limit));
        }
    }
    Ok(total.value())
}

/// Envelopes `E_t` for `t ∈ [lo_l, hi_l]` on the rays beyond the hull in
/// direction `o` (above when `above`, else below).
fn ray_envelopes(engine: &StrongMaxEngine, l: usize, above: bool) -> Vec<Envelope> {
    let support = engine.support().expect("nonempty support");
    let o = 1 - l;
    let (lo_l, hi_l) = (support.lo()[l], support.hi()[l]);
    let (lo_o, hi_o) = (support.lo()[o], support.hi()[o]);
    let w_o = support.extent(o);
    let m = engine.m() as i32;
    let mut lo = [0i64; 2];
    let mut hi = [0i64; 2];
    (lo_l..=hi_l)
        .map(|t| {
            let mut raw = Vec::with_capacity(w_o);
            for c in 1..=w_o {
                if above {
                    lo[o] = hi_o + 1 - c as i64;
                    hi[o] = hi_o;
                } else {
                    lo[o] = lo_o;
                    hi[o] = lo_o + c as i64 - 1;
                }
                let mut q = 0.0f64;
                for a in lo_l..=t {
                    for b in t..=hi_l {
                        lo[l] = a;
                        hi[l] = b;
                        let mut prod = 1.0;
                        for table in engine.tables() {
                            prod *= table.box_sum_bounds(&lo, &hi);
                        }
                        q = q.max(prod / ((b - a + 1) as f64).powi(m));
                    }
                }
                raw.push(Term { q, c });
            }
            Envelope::from_unsorted(raw)
        })
        .collect()
}
