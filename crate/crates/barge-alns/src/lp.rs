//! Integer-programming export in CPLEX LP text format.
//!
//! Writes the arc-based routing model of the scheduling problem so an
//! external MIP solver can cross-check the heuristic and the exhaustive
//! search. Windows and working hours are hard constraints here, so the model
//! optimizes over exactly the violation-free schedules.
//!
//! Destinations of empty-barge orders may be visited twice by the same
//! tugboat, which plain arc binaries cannot express on their own. Each such
//! destination therefore carries two visit copies of its state (arrival,
//! stay, loads, handover count), and assignment binaries tie every incoming
//! and outgoing arc to one of the copies. A step counter per node rules out
//! disconnected subtours that zero-length arcs would otherwise admit.
//!
//! Output is deterministic down to the byte for a given instance and
//! configuration, so exported files can be kept as goldens.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Instance, NodeKind};

#[derive(Clone, Debug)]
pub struct MipConfig {
    /// Big-M for time constraints; defaults to three times the horizon.
    pub big_m: Option<f64>,
    /// Upper bound for arrival and stay variables; defaults to a generous
    /// envelope derived from the instance.
    pub time_horizon: Option<f64>,
    /// Kept for configuration parity; the bilinear handover-count product is
    /// always exported in linearized form.
    pub linearize_products: bool,
    /// Refuse to export models with more variables than this.
    pub var_cap: usize,
}

impl Default for MipConfig {
    fn default() -> MipConfig {
        MipConfig {
            big_m: None,
            time_horizon: None,
            linearize_products: true,
            var_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("model would need {vars} variables, above the cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("bad export configuration: {0}")]
    BadConfig(&'static str),
}

struct Ctx<'a> {
    inst: &'a Instance,
    start: usize,
    end: usize,
    /// Laden origins, laden destinations, empty-order destinations, barges.
    origins: Vec<usize>,
    dests: Vec<usize>,
    hs: Vec<usize>,
    bs: Vec<usize>,
    /// Real nodes that have a single visit (everything but `hs`).
    plain: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    m_time: f64,
    m_load: f64,
    m_step: f64,
    horizon: f64,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a Instance, cfg: &MipConfig) -> Result<Ctx<'a>, LpError> {
        if !cfg.linearize_products {
            return Err(LpError::BadConfig("the handover product must stay linearized"));
        }
        let horizon = cfg.time_horizon.unwrap_or_else(|| inst.time_horizon());
        let m_time = cfg.big_m.unwrap_or(3.0 * horizon);
        if m_time < horizon {
            return Err(LpError::BadConfig("big-M below the time horizon"));
        }
        if m_time < inst.capacity() as f64 {
            return Err(LpError::BadConfig("big-M below the tow capacity"));
        }
        let nr = inst.n_real();
        let f = inst.laden.len();
        let e = inst.empty.len();
        let origins: Vec<usize> = (0..f).map(|k| 2 * k).collect();
        let dests: Vec<usize> = (0..f).map(|k| 2 * k + 1).collect();
        let hs: Vec<usize> = (2 * f..2 * f + e).collect();
        let bs: Vec<usize> = (2 * f + e..nr).collect();
        let plain: Vec<usize> = (0..nr).filter(|&i| !hs.contains(&i)).collect();
        let start = nr;
        let end = nr + 1;
        let mut arcs = Vec::new();
        for i in 0..=end {
            for j in 0..=end {
                if i == j || i == end || j == start {
                    continue;
                }
                // The first leg may not head straight for a delivery, and
                // the day may not end right after a pickup.
                if i == start && j != end && !matches!(inst.kind(j), NodeKind::LadenOrigin(_) | NodeKind::Barge(_)) {
                    continue;
                }
                if j == end && i != start && !matches!(inst.kind(i), NodeKind::LadenDestination(_) | NodeKind::EmptyDestination(_)) {
                    continue;
                }
                arcs.push((i, j));
            }
        }
        Ok(Ctx {
            inst,
            start,
            end,
            origins,
            dests,
            hs,
            bs,
            plain,
            arcs,
            m_time,
            m_load: inst.capacity() as f64 + 1.0,
            m_step: (nr + 3) as f64,
            horizon,
        })
    }

    fn is_h(&self, i: usize) -> bool {
        i < self.start && matches!(self.inst.kind(i), NodeKind::EmptyDestination(_))
    }

    fn ins(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().filter(move |a| a.1 == j).map(|a| a.0)
    }

    fn outs(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().filter(move |a| a.0 == i).map(|a| a.1)
    }

    fn var_count(&self) -> usize {
        let p = self.inst.tugboats.len();
        let into_b = self.arcs.iter().filter(|a| self.bs.contains(&a.1)).count();
        let into_h = self.arcs.iter().filter(|a| self.is_h(a.1)).count();
        let out_h = self.arcs.iter().filter(|a| self.is_h(a.0)).count();
        let e = self.hs.len();
        // Arcs, barge-to-order assignments, plain-node state (arrival, stay,
        // step, visit flag, two loads), depot state, visit-copy state, and
        // the arc-to-visit assignment binaries.
        p * (self.arcs.len()
            + into_b * e * 2
            + self.plain.len() * 6
            + 2 * 4
            + e * 2 * 8
            + into_h * 2
            + out_h * 2)
    }
}

// Variable names. Handover counts use the `dr` prefix because LP tokens
// starting with a bare `e` trip up scientific-notation number parsing.
fn x(i: usize, j: usize, p: usize) -> String {
    format!("x_{i}_{j}_{p}")
}
fn xe(i: usize, b: usize, p: usize, h: usize, t: usize) -> String {
    format!("xe_{i}_{b}_{p}_{h}_{t}")
}
fn z(i: usize, p: usize) -> String {
    format!("z_{i}_{p}")
}
fn zt(h: usize, t: usize, p: usize) -> String {
    format!("zt_{h}_{t}_{p}")
}
fn st(i: usize, p: usize) -> String {
    format!("s_{i}_{p}")
}
fn stt(h: usize, t: usize, p: usize) -> String {
    format!("st_{h}_{t}_{p}")
}
fn uu(i: usize, p: usize) -> String {
    format!("u_{i}_{p}")
}
fn ut(h: usize, t: usize, p: usize) -> String {
    format!("ut_{h}_{t}_{p}")
}
fn v(i: usize, p: usize) -> String {
    format!("v_{i}_{p}")
}
fn vt(h: usize, t: usize, p: usize) -> String {
    format!("vt_{h}_{t}_{p}")
}
fn yf(i: usize, p: usize) -> String {
    format!("yf_{i}_{p}")
}
fn ye(i: usize, p: usize) -> String {
    format!("ye_{i}_{p}")
}
fn yft(h: usize, t: usize, p: usize) -> String {
    format!("yft_{h}_{t}_{p}")
}
fn yet(h: usize, t: usize, p: usize) -> String {
    format!("yet_{h}_{t}_{p}")
}
fn dr(h: usize, t: usize, p: usize) -> String {
    format!("dr_{h}_{t}_{p}")
}
fn w(h: usize, t: usize, p: usize) -> String {
    format!("w_{h}_{t}_{p}")
}
fn ain(i: usize, h: usize, t: usize, p: usize) -> String {
    format!("ain_{i}_{h}_{t}_{p}")
}
fn bout(h: usize, j: usize, t: usize, p: usize) -> String {
    format!("bout_{h}_{j}_{t}_{p}")
}

type Terms = Vec<(f64, String)>;

fn push_expr(out: &mut String, terms: &[(f64, String)]) {
    let mut line = 0usize;
    let mut first = true;
    for (c, name) in terms {
        if *c == 0.0 {
            continue;
        }
        let mag = c.abs();
        let body = if mag == 1.0 {
            name.clone()
        } else {
            format!("{mag} {name}")
        };
        let piece = match (first, *c < 0.0) {
            (true, false) => body,
            (true, true) => format!("- {body}"),
            (false, false) => format!("+ {body}"),
            (false, true) => format!("- {body}"),
        };
        if first {
            out.push_str(&piece);
        } else if line + piece.len() > 240 {
            out.push_str("\n   ");
            out.push_str(&piece);
            line = 0;
        } else {
            out.push(' ');
            out.push_str(&piece);
        }
        line += piece.len() + 1;
        first = false;
    }
}

struct Lp {
    body: String,
    bounds: Vec<String>,
    binaries: Vec<String>,
    generals: Vec<String>,
}

impl Lp {
    fn row(&mut self, name: String, terms: Terms, op: &str, rhs: f64) {
        let _ = write!(self.body, " {name}: ");
        push_expr(&mut self.body, &terms);
        let _ = writeln!(self.body, " {op} {rhs}");
    }
}

/// Render the full model for the given instance as CPLEX LP text.
pub fn export_lp(inst: &Instance, cfg: &MipConfig) -> Result<String, LpError> {
    let ctx = Ctx::new(inst, cfg)?;
    let vars = ctx.var_count();
    if vars > cfg.var_cap {
        return Err(LpError::TooLarge { vars, cap: cfg.var_cap });
    }
    let tugs = ctx.inst.tugboats.len();
    let cap = ctx.inst.capacity() as f64;
    let mt = ctx.m_time;
    let ml = ctx.m_load;
    let ms = ctx.m_step;

    let mut lp = Lp {
        body: String::new(),
        bounds: Vec::new(),
        binaries: Vec::new(),
        generals: Vec::new(),
    };
    let mut head = String::new();
    let _ = writeln!(head, "\\ Tugboat scheduling model");
    let _ = writeln!(
        head,
        "\\ {} real nodes, start depot {}, end depot {}, {} tugboats, capacity {}",
        ctx.inst.n_real(),
        ctx.start,
        ctx.end,
        tugs,
        ctx.inst.capacity()
    );
    let _ = writeln!(
        head,
        "\\ big-M: time {}, load {}, step {}; horizon {}",
        mt, ml, ms, ctx.horizon
    );

    // Objective: travel time and distance of every used arc.
    let mut obj: Terms = Vec::new();
    for p in 0..tugs {
        let tug = &ctx.inst.tugboats[p];
        for &(i, j) in &ctx.arcs {
            let c = tug.cost_per_time * ctx.inst.travel_time(i, j)
                + tug.cost_per_distance * ctx.inst.distance(i, j);
            if c != 0.0 {
                obj.push((c, x(i, j, p)));
            }
        }
    }
    if obj.is_empty() {
        obj.push((0.0, x(ctx.start, ctx.end, 0)));
        head.push_str("\\ all arc costs are zero\n");
    }

    // Declarations in a fixed order.
    for p in 0..tugs {
        for &(i, j) in &ctx.arcs {
            lp.binaries.push(x(i, j, p));
        }
        for &(i, b) in ctx.arcs.iter().filter(|a| ctx.bs.contains(&a.1)) {
            for &h in &ctx.hs {
                for t in 1..=2 {
                    lp.binaries.push(xe(i, b, p, h, t));
                }
            }
        }
        for &i in &ctx.plain {
            lp.binaries.push(v(i, p));
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                lp.binaries.push(vt(h, t, p));
            }
        }
        for &(i, h) in ctx.arcs.iter().filter(|a| ctx.is_h(a.1)) {
            for t in 1..=2 {
                lp.binaries.push(ain(i, h, t, p));
            }
        }
        for &(h, j) in ctx.arcs.iter().filter(|a| ctx.is_h(a.0)) {
            for t in 1..=2 {
                lp.binaries.push(bout(h, j, t, p));
            }
        }
        for &i in &ctx.plain {
            lp.generals.push(yf(i, p));
            lp.generals.push(ye(i, p));
        }
        for &d in &[ctx.start, ctx.end] {
            lp.generals.push(yf(d, p));
            lp.generals.push(ye(d, p));
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                lp.generals.push(yft(h, t, p));
                lp.generals.push(yet(h, t, p));
                lp.generals.push(dr(h, t, p));
                lp.generals.push(w(h, t, p));
            }
        }
    }
    for p in 0..tugs {
        for &i in &ctx.plain {
            lp.bounds.push(format!("{} <= {}", z(i, p), ctx.horizon));
            lp.bounds.push(format!("{} <= {}", st(i, p), ctx.horizon));
            lp.bounds.push(format!("{} <= {}", uu(i, p), ms));
        }
        for &d in &[ctx.start, ctx.end] {
            lp.bounds.push(format!("{} <= {}", z(d, p), ctx.horizon));
            lp.bounds.push(format!("{} <= {}", uu(d, p), ms));
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                lp.bounds.push(format!("{} <= {}", zt(h, t, p), ctx.horizon));
                lp.bounds.push(format!("{} <= {}", stt(h, t, p), ctx.horizon));
                lp.bounds.push(format!("{} <= {}", ut(h, t, p), ms));
            }
        }
        for &i in &ctx.plain {
            lp.bounds.push(format!("{} <= {}", yf(i, p), cap));
            lp.bounds.push(format!("{} <= {}", ye(i, p), cap));
        }
        for &d in &[ctx.start, ctx.end] {
            lp.bounds.push(format!("{} <= {}", yf(d, p), cap));
            lp.bounds.push(format!("{} <= {}", ye(d, p), cap));
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                lp.bounds.push(format!("{} <= {}", yft(h, t, p), cap));
                lp.bounds.push(format!("{} <= {}", yet(h, t, p), cap));
                lp.bounds.push(format!("{} <= {}", dr(h, t, p), cap));
                lp.bounds.push(format!("{} <= {}", w(h, t, p), cap));
            }
        }
    }

    // Route shape: one departure and one return per tugboat, conserved flow,
    // visit flags equal to in-degree.
    for p in 0..tugs {
        let terms: Terms = ctx.outs(ctx.start).map(|j| (1.0, x(ctx.start, j, p))).collect();
        lp.row(format!("depart_{p}"), terms, "=", 1.0);
        let terms: Terms = ctx.ins(ctx.end).map(|i| (1.0, x(i, ctx.end, p))).collect();
        lp.row(format!("return_{p}"), terms, "=", 1.0);
    }
    for p in 0..tugs {
        for &i in &ctx.plain {
            let mut terms: Terms = ctx.ins(i).map(|k| (1.0, x(k, i, p))).collect();
            terms.push((-1.0, v(i, p)));
            lp.row(format!("visit_def_{i}_{p}"), terms, "=", 0.0);
        }
        for &h in &ctx.hs {
            let mut terms: Terms = ctx.ins(h).map(|k| (1.0, x(k, h, p))).collect();
            terms.push((-1.0, vt(h, 1, p)));
            terms.push((-1.0, vt(h, 2, p)));
            lp.row(format!("visit_count_{h}_{p}"), terms, "=", 0.0);
            lp.row(
                format!("visit_order_{h}_{p}"),
                vec![(1.0, vt(h, 2, p)), (-1.0, vt(h, 1, p))],
                "<=",
                0.0,
            );
        }
        for i in 0..ctx.start {
            let mut terms: Terms = ctx.ins(i).map(|k| (1.0, x(k, i, p))).collect();
            terms.extend(ctx.outs(i).map(|k| (-1.0, x(i, k, p))));
            lp.row(format!("flow_{i}_{p}"), terms, "=", 0.0);
        }
    }

    // Coverage: laden endpoints exactly once overall and pairwise on one
    // tugboat; barges at most once; empty-barge orders one or two servers.
    for (k, (&o, &d)) in ctx.origins.iter().zip(&ctx.dests).enumerate() {
        let terms: Terms = (0..tugs).map(|p| (1.0, v(o, p))).collect();
        lp.row(format!("cover_origin_{k}"), terms, "=", 1.0);
        let terms: Terms = (0..tugs).map(|p| (1.0, v(d, p))).collect();
        lp.row(format!("cover_dest_{k}"), terms, "=", 1.0);
        for p in 0..tugs {
            lp.row(
                format!("pair_tug_{k}_{p}"),
                vec![(1.0, v(o, p)), (-1.0, v(d, p))],
                "=",
                0.0,
            );
        }
    }
    for &h in &ctx.hs {
        let terms: Terms = (0..tugs).map(|p| (1.0, vt(h, 1, p))).collect();
        lp.row(format!("serve_min_{h}"), terms.clone(), ">=", 1.0);
        lp.row(format!("serve_max_{h}"), terms, "<=", 2.0);
    }
    for &b in &ctx.bs {
        let terms: Terms = (0..tugs).map(|p| (1.0, v(b, p))).collect();
        lp.row(format!("barge_use_{b}"), terms, "<=", 1.0);
    }

    // Every pickup arc is booked for exactly one order and visit, and the
    // bookings of a visit match its handover count.
    for p in 0..tugs {
        for &(i, b) in ctx.arcs.iter().filter(|a| ctx.bs.contains(&a.1)) {
            let mut terms: Terms = Vec::new();
            for &h in &ctx.hs {
                for t in 1..=2 {
                    terms.push((1.0, xe(i, b, p, h, t)));
                }
            }
            terms.push((-1.0, x(i, b, p)));
            lp.row(format!("pickup_book_{i}_{b}_{p}"), terms, "=", 0.0);
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                let mut terms: Terms = Vec::new();
                for &(i, b) in ctx.arcs.iter().filter(|a| ctx.bs.contains(&a.1)) {
                    terms.push((1.0, xe(i, b, p, h, t)));
                }
                terms.push((-1.0, w(h, t, p)));
                lp.row(format!("collect_{h}_{t}_{p}"), terms, "=", 0.0);
                // Linearized product of handover count and visit flag.
                lp.row(
                    format!("w_cap_{h}_{t}_{p}"),
                    vec![(1.0, w(h, t, p)), (-cap, vt(h, t, p))],
                    "<=",
                    0.0,
                );
                lp.row(
                    format!("w_le_{h}_{t}_{p}"),
                    vec![(1.0, w(h, t, p)), (-1.0, dr(h, t, p))],
                    "<=",
                    0.0,
                );
                lp.row(
                    format!("w_ge_{h}_{t}_{p}"),
                    vec![(1.0, w(h, t, p)), (-1.0, dr(h, t, p)), (-cap, vt(h, t, p))],
                    ">=",
                    -cap,
                );
                // Active visits hand over between one and a full tow.
                lp.row(
                    format!("drop_min_{h}_{t}_{p}"),
                    vec![(1.0, dr(h, t, p)), (-1.0, vt(h, t, p))],
                    ">=",
                    0.0,
                );
                lp.row(
                    format!("drop_cap_{h}_{t}_{p}"),
                    vec![(1.0, dr(h, t, p)), (-cap, vt(h, t, p))],
                    "<=",
                    0.0,
                );
            }
            lp.row(
                format!("drop_link_{h}_{p}"),
                vec![(1.0, dr(h, 2, p)), (-cap, dr(h, 1, p))],
                "<=",
                0.0,
            );
        }
    }
    for (m, &h) in ctx.hs.iter().enumerate() {
        let mut terms: Terms = Vec::new();
        for p in 0..tugs {
            for t in 1..=2 {
                terms.push((1.0, dr(h, t, p)));
            }
        }
        lp.row(
            format!("demand_{h}"),
            terms,
            "=",
            ctx.inst.empty[m].required_barges as f64,
        );
    }

    // Arc-to-visit assignment at twice-visitable destinations.
    for p in 0..tugs {
        for &(i, h) in ctx.arcs.iter().filter(|a| ctx.is_h(a.1)) {
            let terms = vec![
                (1.0, ain(i, h, 1, p)),
                (1.0, ain(i, h, 2, p)),
                (-1.0, x(i, h, p)),
            ];
            lp.row(format!("ain_arc_{i}_{h}_{p}"), terms, "=", 0.0);
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                let mut terms: Terms = ctx.ins(h).map(|i| (1.0, ain(i, h, t, p))).collect();
                terms.push((-1.0, vt(h, t, p)));
                lp.row(format!("ain_visit_{h}_{t}_{p}"), terms, "=", 0.0);
            }
        }
        for &(h, j) in ctx.arcs.iter().filter(|a| ctx.is_h(a.0)) {
            let terms = vec![
                (1.0, bout(h, j, 1, p)),
                (1.0, bout(h, j, 2, p)),
                (-1.0, x(h, j, p)),
            ];
            lp.row(format!("bout_arc_{h}_{j}_{p}"), terms, "=", 0.0);
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                let mut terms: Terms = ctx.outs(h).map(|j| (1.0, bout(h, j, t, p))).collect();
                terms.push((-1.0, vt(h, t, p)));
                lp.row(format!("bout_visit_{h}_{t}_{p}"), terms, "=", 0.0);
            }
        }
    }

    // Clocks: start at zero, chain along used arcs, respect windows and the
    // working-hours limit, and wait for barge readiness.
    for p in 0..tugs {
        lp.row(format!("start_time_{p}"), vec![(1.0, z(ctx.start, p))], "=", 0.0);
        lp.row(
            format!("hours_{p}"),
            vec![(1.0, z(ctx.end, p)), (-1.0, z(ctx.start, p))],
            "<=",
            ctx.inst.tugboats[p].max_working_time,
        );
        for (bi, &b) in ctx.bs.iter().enumerate() {
            lp.row(
                format!("ready_{b}_{p}"),
                vec![(1.0, z(b, p)), (1.0, st(b, p))],
                ">=",
                ctx.inst.barges[bi].idle_until,
            );
        }
        for &i in &ctx.plain {
            let wdw = ctx.inst.window(i);
            lp.row(
                format!("window_lo_{i}_{p}"),
                vec![(1.0, z(i, p)), (-wdw.open(), v(i, p))],
                ">=",
                0.0,
            );
            lp.row(
                format!("window_hi_{i}_{p}"),
                vec![(1.0, z(i, p)), (mt, v(i, p))],
                "<=",
                wdw.close() + mt,
            );
        }
        for &h in &ctx.hs {
            let wdw = ctx.inst.window(h);
            for t in 1..=2 {
                lp.row(
                    format!("visit_window_lo_{h}_{t}_{p}"),
                    vec![(1.0, zt(h, t, p)), (-wdw.open(), vt(h, t, p))],
                    ">=",
                    0.0,
                );
                lp.row(
                    format!("visit_window_hi_{h}_{t}_{p}"),
                    vec![(1.0, zt(h, t, p)), (mt, vt(h, t, p))],
                    "<=",
                    wdw.close() + mt,
                );
            }
            lp.row(
                format!("visit_seq_{h}_{p}"),
                vec![
                    (1.0, zt(h, 2, p)),
                    (-1.0, zt(h, 1, p)),
                    (-1.0, stt(h, 1, p)),
                    (-mt, vt(h, 2, p)),
                ],
                ">=",
                -mt,
            );
        }
    }

    // Time, load and step propagation along every arc. Loads only need the
    // binding direction: picking up forces them up, handing over lets them
    // fall, and zero end loads pin the truth.
    for p in 0..tugs {
        for &(i, j) in &ctx.arcs {
            let t_ij = ctx.inst.travel_time(i, j);
            match (ctx.is_h(i), ctx.is_h(j)) {
                (false, false) => {
                    let mut terms = vec![(1.0, z(j, p)), (-1.0, z(i, p))];
                    if i < ctx.start {
                        terms.push((-1.0, st(i, p)));
                    }
                    terms.push((-mt, x(i, j, p)));
                    lp.row(format!("clock_{i}_{j}_{p}"), terms, ">=", t_ij - mt);
                    let terms = vec![
                        (1.0, uu(j, p)),
                        (-1.0, uu(i, p)),
                        (-ms, x(i, j, p)),
                    ];
                    lp.row(format!("step_{i}_{j}_{p}"), terms, ">=", 1.0 - ms);
                    let df = node_full_delta(&ctx, j);
                    let terms = vec![(1.0, yf(j, p)), (-1.0, yf(i, p)), (-ml, x(i, j, p))];
                    lp.row(format!("full_{i}_{j}_{p}"), terms, ">=", df - ml);
                    let de = node_empty_delta(&ctx, j);
                    let terms = vec![(1.0, ye(j, p)), (-1.0, ye(i, p)), (-ml, x(i, j, p))];
                    lp.row(format!("empty_{i}_{j}_{p}"), terms, ">=", de - ml);
                }
                (false, true) => {
                    for t in 1..=2 {
                        let mut terms = vec![(1.0, zt(j, t, p)), (-1.0, z(i, p))];
                        if i < ctx.start {
                            terms.push((-1.0, st(i, p)));
                        }
                        terms.push((-mt, ain(i, j, t, p)));
                        lp.row(format!("clock_in_{i}_{j}_{t}_{p}"), terms, ">=", t_ij - mt);
                        let terms = vec![
                            (1.0, ut(j, t, p)),
                            (-1.0, uu(i, p)),
                            (-ms, ain(i, j, t, p)),
                        ];
                        lp.row(format!("step_in_{i}_{j}_{t}_{p}"), terms, ">=", 1.0 - ms);
                        let terms = vec![
                            (1.0, yft(j, t, p)),
                            (-1.0, yf(i, p)),
                            (-ml, ain(i, j, t, p)),
                        ];
                        lp.row(format!("full_in_{i}_{j}_{t}_{p}"), terms, ">=", -ml);
                        let terms = vec![
                            (1.0, yet(j, t, p)),
                            (-1.0, ye(i, p)),
                            (1.0, dr(j, t, p)),
                            (-ml, ain(i, j, t, p)),
                        ];
                        lp.row(format!("empty_in_{i}_{j}_{t}_{p}"), terms, ">=", -ml);
                    }
                }
                (true, false) => {
                    for t in 1..=2 {
                        let terms = vec![
                            (1.0, z(j, p)),
                            (-1.0, zt(i, t, p)),
                            (-1.0, stt(i, t, p)),
                            (-mt, bout(i, j, t, p)),
                        ];
                        lp.row(format!("clock_out_{i}_{j}_{t}_{p}"), terms, ">=", t_ij - mt);
                        let terms = vec![
                            (1.0, uu(j, p)),
                            (-1.0, ut(i, t, p)),
                            (-ms, bout(i, j, t, p)),
                        ];
                        lp.row(format!("step_out_{i}_{j}_{t}_{p}"), terms, ">=", 1.0 - ms);
                        let df = node_full_delta(&ctx, j);
                        let terms = vec![
                            (1.0, yf(j, p)),
                            (-1.0, yft(i, t, p)),
                            (-ml, bout(i, j, t, p)),
                        ];
                        lp.row(format!("full_out_{i}_{j}_{t}_{p}"), terms, ">=", df - ml);
                        let de = node_empty_delta(&ctx, j);
                        let terms = vec![
                            (1.0, ye(j, p)),
                            (-1.0, yet(i, t, p)),
                            (-ml, bout(i, j, t, p)),
                        ];
                        lp.row(format!("empty_out_{i}_{j}_{t}_{p}"), terms, ">=", de - ml);
                    }
                }
                (true, true) => {
                    for t in 1..=2 {
                        for q in 1..=2 {
                            let terms = vec![
                                (1.0, zt(j, q, p)),
                                (-1.0, zt(i, t, p)),
                                (-1.0, stt(i, t, p)),
                                (-mt, bout(i, j, t, p)),
                                (-mt, ain(i, j, q, p)),
                            ];
                            lp.row(
                                format!("clock_hh_{i}_{j}_{t}_{q}_{p}"),
                                terms,
                                ">=",
                                t_ij - 2.0 * mt,
                            );
                            let terms = vec![
                                (1.0, ut(j, q, p)),
                                (-1.0, ut(i, t, p)),
                                (-ms, bout(i, j, t, p)),
                                (-ms, ain(i, j, q, p)),
                            ];
                            lp.row(
                                format!("step_hh_{i}_{j}_{t}_{q}_{p}"),
                                terms,
                                ">=",
                                1.0 - 2.0 * ms,
                            );
                            let terms = vec![
                                (1.0, yft(j, q, p)),
                                (-1.0, yft(i, t, p)),
                                (-ml, bout(i, j, t, p)),
                                (-ml, ain(i, j, q, p)),
                            ];
                            lp.row(
                                format!("full_hh_{i}_{j}_{t}_{q}_{p}"),
                                terms,
                                ">=",
                                -2.0 * ml,
                            );
                            let terms = vec![
                                (1.0, yet(j, q, p)),
                                (-1.0, yet(i, t, p)),
                                (1.0, dr(j, q, p)),
                                (-ml, bout(i, j, t, p)),
                                (-ml, ain(i, j, q, p)),
                            ];
                            lp.row(
                                format!("empty_hh_{i}_{j}_{t}_{q}_{p}"),
                                terms,
                                ">=",
                                -2.0 * ml,
                            );
                        }
                    }
                }
            }
        }
        lp.row(format!("start_step_{p}"), vec![(1.0, uu(ctx.start, p))], "=", 0.0);
    }

    // A served pair rides the same clock: delivery no earlier than the
    // departure from its origin plus the direct leg. Every booked pickup
    // happens before the visit it feeds.
    for p in 0..tugs {
        for (k, (&o, &d)) in ctx.origins.iter().zip(&ctx.dests).enumerate() {
            let terms = vec![
                (1.0, z(d, p)),
                (-1.0, z(o, p)),
                (-1.0, st(o, p)),
                (-mt, v(o, p)),
                (-mt, v(d, p)),
            ];
            lp.row(
                format!("pair_clock_{k}_{p}"),
                terms,
                ">=",
                ctx.inst.travel_time(o, d) - 2.0 * mt,
            );
        }
        for &b in &ctx.bs {
            for &h in &ctx.hs {
                for t in 1..=2 {
                    let mut terms = vec![
                        (1.0, zt(h, t, p)),
                        (-1.0, z(b, p)),
                        (-1.0, st(b, p)),
                    ];
                    for i in ctx.ins(b) {
                        terms.push((-mt, xe(i, b, p, h, t)));
                    }
                    lp.row(
                        format!("pickup_clock_{b}_{h}_{t}_{p}"),
                        terms,
                        ">=",
                        ctx.inst.travel_time(b, h) - mt,
                    );
                }
            }
        }
    }

    // Loads: start and end the day empty, never exceed the tow capacity
    // while a node is visited.
    for p in 0..tugs {
        lp.row(format!("start_full_{p}"), vec![(1.0, yf(ctx.start, p))], "=", 0.0);
        lp.row(format!("start_empty_{p}"), vec![(1.0, ye(ctx.start, p))], "=", 0.0);
        lp.row(format!("end_full_{p}"), vec![(1.0, yf(ctx.end, p))], "=", 0.0);
        lp.row(format!("end_empty_{p}"), vec![(1.0, ye(ctx.end, p))], "=", 0.0);
        for &i in &ctx.plain {
            let terms = vec![(1.0, yf(i, p)), (1.0, ye(i, p)), (-cap, v(i, p))];
            lp.row(format!("cap_{i}_{p}"), terms, "<=", 0.0);
        }
        for &h in &ctx.hs {
            for t in 1..=2 {
                let terms = vec![
                    (1.0, yft(h, t, p)),
                    (1.0, yet(h, t, p)),
                    (-cap, vt(h, t, p)),
                ];
                lp.row(format!("cap_visit_{h}_{t}_{p}"), terms, "<=", 0.0);
            }
        }
    }

    let mut out = head;
    out.push_str("Minimize\n obj: ");
    push_expr(&mut out, &obj);
    out.push_str("\nSubject To\n");
    out.push_str(&lp.body);
    out.push_str("Bounds\n");
    for b in &lp.bounds {
        let _ = writeln!(out, " {b}");
    }
    out.push_str("Binaries\n");
    for b in &lp.binaries {
        let _ = writeln!(out, " {b}");
    }
    out.push_str("Generals\n");
    for g in &lp.generals {
        let _ = writeln!(out, " {g}");
    }
    out.push_str("End\n");
    Ok(out)
}

fn node_full_delta(ctx: &Ctx, j: usize) -> f64 {
    if j >= ctx.start {
        return 0.0;
    }
    match ctx.inst.kind(j) {
        NodeKind::LadenOrigin(_) => 1.0,
        NodeKind::LadenDestination(_) => -1.0,
        _ => 0.0,
    }
}

fn node_empty_delta(ctx: &Ctx, j: usize) -> f64 {
    if j >= ctx.start {
        return 0.0;
    }
    match ctx.inst.kind(j) {
        NodeKind::Barge(_) => 1.0,
        _ => 0.0,
    }
}
