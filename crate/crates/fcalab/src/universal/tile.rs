//! Tile layout: one macro-cell per simulated cell, with bit distribution,
//! matcher gadgets, row collectors, inter-tile buses and delay
//! equalization to a single global period.
//!
//! Timing discipline, counted in lattice steps from a well-encoded
//! boundary: a poised alpha gate flips at step 1 and its output cell fires
//! at step 2. The signal reaches the top of its row collector after a
//! uniform `K_A1` further steps, the destination tile's trunk join after a
//! further uniform `K_A2`, and completes the downstream for-all ladders at
//! their alpha inputs after a uniform `K_B`. Every bit change therefore
//! lands at exactly `T = 2 + K_A1 + K_A2 + K_B`; gates newly poised by
//! those arrivals flip at `T + 1`, which opens the next period. The
//! exists-side paths are only bounded above by `K_B`: a veto can never
//! arrive after the for-all completion it has to block.

use std::collections::HashMap;

use crate::core::{Coord, RuleTable};

use super::grid::{poly_len, Canvas, CellSpec, GateKind, NetValue, Pt};
use super::macrocell::MacroCellPlan;
use super::matcher::{build_matcher, MatcherFootprint};
use super::UniversalError;

/// A compiled tile: the per-macro-cell template plus instantiation
/// metadata and the settled period.
#[derive(Debug, Clone)]
pub struct TileTemplate {
    pub size: (i64, i64),
    /// Source offsets feeding this tile; index = owner id.
    pub owners: Vec<Coord>,
    pub self_owner: usize,
    /// Unary word length of the source rule.
    pub bits: usize,
    pub cells: Vec<(Pt, CellSpec)>,
    /// Per live bit: the collector column cells read back by decode.
    pub readout: Vec<Vec<Pt>>,
    pub period: u64,
}

/// A compiled target: the unary source rule, its macro-cell plan and the
/// tile template; the block vector equals the tile size.
#[derive(Debug, Clone)]
pub struct CompiledTarget {
    pub source: RuleTable,
    pub plan: MacroCellPlan,
    pub tile: TileTemplate,
    pub factor: u32,
}

impl CompiledTarget {
    pub fn block(&self) -> (i64, i64) {
        self.tile.size
    }

    pub fn period(&self) -> u64 {
        self.tile.period
    }
}

/// Registry of vertical runs; hairpin turn columns keep one clear column
/// to every vertical run crossing their lane.
struct Verticals {
    runs: Vec<(i64, i64, i64)>,
}

impl Verticals {
    fn new() -> Verticals {
        Verticals { runs: Vec::new() }
    }

    fn add(&mut self, x: i64, y0: i64, y1: i64) {
        self.runs.push((x, y0.min(y1), y0.max(y1)));
    }

    fn blocked(&self, x: i64, y0: i64, y1: i64) -> bool {
        // verticals keep at least two clear columns apart: a pair of
        // wires two apart flanks a background cell that would behave as a
        // stray gate once something crosses above it
        self.runs
            .iter()
            .any(|&(vx, vy0, vy1)| (vx - x).abs() <= 2 && vy0 <= y1 && vy1 >= y0)
    }
}

/// Draws a horizontal run from `from` to `to` on one row gaining exactly
/// `extra` edges: the path first winds away from the travel direction,
/// then returns past the start and continues. The gained length depends
/// only on how far back the turn column sits, so two rise heights give two
/// candidate columns when one is blocked. `extra` is 0 or even, at least 8.
fn pad_h(
    canvas: &mut Canvas,
    verts: &mut Verticals,
    net: NetValue,
    from: Pt,
    to: Pt,
    extra: usize,
    x_range: (i64, i64),
) -> Result<(), UniversalError> {
    assert_eq!(from.1, to.1);
    let y = from.1;
    if extra == 0 {
        canvas.wire_path(&[from, to], net);
        return Ok(());
    }
    if extra % 2 != 0 || extra < 8 {
        return Err(UniversalError::Layout(format!("unpaddable horizontal extra {extra}")));
    }
    let dir = (to.0 - from.0).signum();
    assert!((to.0 - from.0) * dir >= 3, "segment too short for a detour");
    // small extras: an in-span bump of height extra/2 whose turn column
    // slides freely along the segment
    if extra <= 12 {
        let rise = extra as i64 / 2;
        let span = (to.0 - from.0) * dir;
        for a in 2..(span - 4) {
            let t1 = from.0 + dir * a;
            let t3 = t1 + dir * 4;
            if (to.0 - t3) * dir < 1 {
                break;
            }
            if verts.blocked(t1, y, y + rise) || verts.blocked(t3, y, y + rise) {
                continue;
            }
            canvas.wire_path(&[from, (t1, y), (t1, y + rise), (t3, y + rise), (t3, y), to], net);
            verts.add(t1, y, y + rise);
            verts.add(t3, y, y + rise);
            return Ok(());
        }
    }
    // larger extras wind backward first and return past the start; each
    // rise height gives a different back column candidate
    for rise in [2i64, 4, 6] {
        let k = (extra as i64 - 2 * rise) / 2;
        if k < 2 {
            continue;
        }
        let a = from.0 - dir * k;
        if a <= x_range.0 || a >= x_range.1 || verts.blocked(a, y, y + rise) {
            continue;
        }
        // any clear reentry column strictly inside the remaining segment
        let mut b = from.0 + dir * 3;
        let b = loop {
            if (to.0 - b) * dir < 1 {
                break None;
            }
            if !verts.blocked(b, y, y + rise) {
                break Some(b);
            }
            b += dir;
        };
        let Some(b) = b else { continue };
        canvas.wire_path(&[from, (a, y), (a, y + rise), (b, y + rise), (b, y), to], net);
        verts.add(a, y, y + rise);
        verts.add(b, y, y + rise);
        return Ok(());
    }
    Err(UniversalError::Layout(format!(
        "no room for a horizontal detour of {extra} between {from:?} and {to:?}"
    )))
}

/// Climbs through a pad lane at `col`, gaining exactly `extra` edges, and
/// returns the row where the climb resumes. Large extras split into
/// stacked sections inside the lane.
fn pad_v(
    canvas: &mut Canvas,
    verts: &mut Verticals,
    net: NetValue,
    col: i64,
    lane: i64,
    extra: usize,
    x_range: (i64, i64),
    rows: i64,
) -> Result<i64, UniversalError> {
    let section_cap = ((x_range.1 - x_range.0) as usize * 2).saturating_sub(64).max(64);
    let mut remaining = extra;
    let mut row = lane;
    loop {
        let take = if remaining > section_cap {
            // leave at least 8 for the final section
            section_cap.min(remaining - 8) & !1
        } else {
            remaining
        };
        if row + 6 > lane + rows {
            return Err(UniversalError::Layout(format!(
                "pad lane at {col} out of rows for extra {extra}"
            )));
        }
        let exit = pad_v_section(canvas, verts, net, col, row, take, x_range)?;
        remaining -= take;
        if remaining == 0 {
            return Ok(exit);
        }
        row = exit;
    }
}

/// One pad section: a single turn column, a straddle, or a double-S.
fn pad_v_section(
    canvas: &mut Canvas,
    verts: &mut Verticals,
    net: NetValue,
    col: i64,
    lane: i64,
    extra: usize,
    x_range: (i64, i64),
) -> Result<i64, UniversalError> {
    if extra == 0 {
        canvas.wire_path(&[(col, lane), (col, lane + 4)], net);
        return Ok(lane + 4);
    }
    if extra % 2 != 0 || extra < 4 {
        return Err(UniversalError::Layout(format!("unpaddable vertical extra {extra}")));
    }
    let reach = extra as i64 / 2;
    for s in [1i64, -1] {
        let t = col + s * reach;
        if t <= x_range.0 || t >= x_range.1 || verts.blocked(t, lane, lane + 4) {
            continue;
        }
        canvas.wire_path(&[(col, lane), (t, lane), (t, lane + 4), (col, lane + 4)], net);
        verts.add(t, lane, lane + 4);
        return Ok(lane + 4);
    }
    // straddle both sides: gain 2a + 2b
    for a in 2..(reach - 1) {
        let b = reach - a;
        if b < 2 {
            continue;
        }
        for (t1, t2) in [(col + a, col - b), (col - a, col + b)] {
            if t1 <= x_range.0 || t1 >= x_range.1 || t2 <= x_range.0 || t2 >= x_range.1 {
                continue;
            }
            if verts.blocked(t1, lane, lane + 4) || verts.blocked(t2, lane, lane + 4) {
                continue;
            }
            canvas.wire_path(
                &[
                    (col, lane),
                    (t1, lane),
                    (t1, lane + 2),
                    (t2, lane + 2),
                    (t2, lane + 4),
                    (col, lane + 4),
                ],
                net,
            );
            verts.add(t1, lane, lane + 4);
            verts.add(t2, lane, lane + 4);
            return Ok(lane + 4);
        }
    }
    // double-S: turns east, west, east again; gain 2*(t1 + t3 - t2 - col)
    {
        let lo = x_range.0 + 1;
        let hi = x_range.1 - 1;
        let clear = |t: i64| t > x_range.0 && t < x_range.1 && !verts.blocked(t, lane, lane + 6);
        let mut t1 = hi;
        while t1 > col + 2 {
            if !clear(t1) {
                t1 -= 1;
                continue;
            }
            // want t3 - t2 = reach - (t1 - col) =: rest, t2 < col < t3
            let rest = reach - (t1 - col);
            if rest < 4 {
                t1 -= 1;
                continue;
            }
            let mut t2 = lo;
            while t2 < col - 1 {
                if !clear(t2) {
                    t2 += 1;
                    continue;
                }
                let t3 = t2 + rest;
                if t3 > col + 1 && t3 < x_range.1 && clear(t3) && (t3 - t1).abs() > 2 {
                    canvas.wire_path(
                        &[
                            (col, lane),
                            (t1, lane),
                            (t1, lane + 2),
                            (t2, lane + 2),
                            (t2, lane + 4),
                            (t3, lane + 4),
                            (t3, lane + 6),
                            (col, lane + 6),
                        ],
                        net,
                    );
                    verts.add(t1, lane, lane + 6);
                    verts.add(t2, lane, lane + 6);
                    verts.add(t3, lane, lane + 6);
                    return Ok(lane + 6);
                }
                t2 += 1;
            }
            t1 -= 1;
        }
    }
    Err(UniversalError::Layout(format!("no room for a vertical detour of {extra} at {col}")))
}

fn dedup(corners: &[Pt]) -> Vec<Pt> {
    let mut v: Vec<Pt> = Vec::with_capacity(corners.len());
    for &p in corners {
        if v.last() != Some(&p) {
            v.push(p);
        }
    }
    v
}

struct Route {
    bit: usize,
    lane_y: i64,
    /// From the tap junction on the collector to the boundary exit cell;
    /// starts with a horizontal fan-lane segment that carries the pad.
    out_corners: Vec<Pt>,
    /// From the boundary entry cell to the trunk join; empty for the
    /// loopback whose out corners already end on the trunk.
    in_corners: Vec<Pt>,
    out_net: NetValue,
    in_net: NetValue,
    owner: usize,
    /// Where the route lands on its trunk row.
    join: Pt,
    /// Horizontal extension connecting an outside join to the trunk span.
    extend_to: Option<Pt>,
}

struct Feed {
    col: i64,
    owner: usize,
    bit: usize,
    leg: u16,
    /// Pad lane base row for equalized (for-all) leaves.
    lane: Option<i64>,
    /// Edges from the trunk branch junction to the ladder-end cell beside
    /// the alpha gate, without any pad detour.
    raw_from_branch: usize,
    /// Row where the leaf enters its gadget.
    gadget_y: i64,
}

pub(crate) struct TileBuilder<'a> {
    pub rule: &'a RuleTable,
    pub plan: &'a MacroCellPlan,
    pub factor: u32,
}

impl TileBuilder<'_> {
    pub fn build(self) -> Result<TileTemplate, UniversalError> {
        // pad demand is only known once the geometry exists, so retry with
        // taller pad lanes until every detour fits
        let mut last = None;
        for attempt in 0..6 {
            match self.build_with_pitch(8 + 12 * attempt) {
                Ok(t) => return Ok(t),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| UniversalError::Layout("empty build".into())))
    }

    fn build_with_pitch(&self, base_pitch: i64) -> Result<TileTemplate, UniversalError> {
        let rule = self.rule;
        let l = self.plan.bits;
        let owners: Vec<Coord> = rule.neighborhood().to_vec();
        let self_owner = rule.center_index();
        let live = l.saturating_sub(1);

        if live == 0 {
            return Ok(TileTemplate {
                size: (4, 4),
                owners,
                self_owner,
                bits: l,
                cells: Vec::new(),
                readout: Vec::new(),
                period: 2,
            });
        }

        let mut sites: Vec<(usize, MatcherFootprint)> = Vec::new();
        for (j, row) in self.plan.rows.iter().enumerate() {
            for m in &row.matchers {
                if m.materialized {
                    sites.push((j, build_matcher(&m.word)));
                }
            }
        }

        let in_owners: Vec<usize> = (0..owners.len()).filter(|&o| o != self_owner).collect();
        let y_leaf_count: usize = sites
            .iter()
            .map(|(_, fp)| {
                fp.word
                    .iter()
                    .enumerate()
                    .filter(|&(t, &b)| !b && (t % l) + 1 < l)
                    .count()
            })
            .sum();
        let trunk_count = owners.len() * l;
        let fan_slots = live * (in_owners.len() + 1);

        // rows, bottom to top
        let y_stub0 = 4i64;
        let stub = |fam: usize, j: usize| y_stub0 + 2 * (fam * live + j) as i64;
        let y_trunk0 = stub(4, live - 1) + 4;
        let trunk_y = |o: usize, j: usize| y_trunk0 + 2 * (o * l + j) as i64;
        let y_pad0 = y_trunk0 + 2 * trunk_count as i64 + 4;
        let lane_pitch = base_pitch + 16 * (self.factor.saturating_sub(1) as i64);
        let pad_lane = |k: usize| y_pad0 + lane_pitch * k as i64;
        let y_gad0 = y_pad0 + lane_pitch * y_leaf_count as i64 + 4;
        let out_off_max = sites.iter().map(|(_, fp)| fp.output.1).max().unwrap_or(1);
        let y_out = {
            let y = y_gad0 + out_off_max;
            if y.rem_euclid(2) == 0 {
                y + 1
            } else {
                y
            }
        };
        let y_spur0 = y_out + 4;
        let spur_lane = |k: usize| y_spur0 + 8 * k as i64;
        let y_fan0 = y_spur0 + 8 * sites.len() as i64 + 4;
        let fan_lane = |k: usize| y_fan0 + 8 * k as i64;
        let y_north0 = y_fan0 + 8 * fan_slots as i64 + 4;
        let north_jog = |fam: usize, j: usize| y_north0 + 2 * (fam * live + j) as i64;
        let mut th = north_jog(1, live - 1) + 6;
        th += th.rem_euclid(2);

        // columns, west to east; families hosting a winding pad get a
        // three-column slot (the leg plus two detour columns)
        let x_west0 = 4i64;
        // west families: 0 = out-W descent (padded), 1 = in-from-W climb,
        // 2 = loopback descent (padded)
        let west_stride: [i64; 3] = [4, 4, 4];
        let west_x = |fam: usize, j: usize| {
            let base: i64 = west_stride[..fam].iter().sum::<i64>() * live as i64;
            x_west0 + base + west_stride[fam] * j as i64
        };
        let x_gad0 = west_x(2, live - 1) + 12;
        let mut gx = x_gad0;
        let mut origins: Vec<Pt> = Vec::new();
        for (_, fp) in &sites {
            origins.push((gx, y_out - fp.output.1));
            gx += fp.width + 10;
        }
        let x_corr0 = gx + 6;
        // corridor families: 0 = out-S descent (padded), 1 = S boundary,
        // 2 = in-N descent, 3 = out-N descent (padded), 4 = N boundary,
        // 5 = in-S ascent. The N boundary sits west of the out-N leg so the
        // final climb never crosses its own fan lane run.
        let corr_order: [usize; 6] = [0, 1, 2, 4, 3, 5];
        let corr_width: [i64; 6] = [4, 4, 4, 4, 4, 4];
        let corr_x = |fam: usize, j: usize| {
            let pos = corr_order.iter().position(|&f| f == fam).unwrap();
            let base: i64 = corr_order[..pos]
                .iter()
                .map(|&f| corr_width[f])
                .sum::<i64>()
                * live as i64;
            x_corr0 + base + corr_width[fam] * j as i64
        };
        let x_coll0 = corr_x(5, live - 1) + 6;
        let coll_x = |j: usize| x_coll0 + 4 * j as i64;
        let x_east0 = coll_x(live - 1) + 6;
        // east families: 0 = out-E descent (padded), 1 = in-from-E climb
        let east_stride: [i64; 2] = [4, 4];
        let east_x = |fam: usize, j: usize| {
            let base: i64 = east_stride[..fam].iter().sum::<i64>() * live as i64;
            x_east0 + base + east_stride[fam] * j as i64
        };
        let mut tw = east_x(1, live - 1) + 12;
        tw += tw.rem_euclid(2);

        let trunk_lo = x_gad0 - 4;
        let trunk_hi = x_coll0 - 4;

        let mut canvas = Canvas::new();
        let mut verts = Verticals::new();

        // gadgets, leaf placeholders rebound to their owner and bit; every
        // leaf wire gets its own leg id, and the alpha output starts the
        // matcher's spur leg
        let word_of = |t: usize| (t / l, t % l);
        let leaf_leg = |site: usize, t: usize| (1 + site * l * owners.len() + t) as u16;
        let spur_leg = |site: usize| (1 + sites.len() * l * owners.len() + site) as u16;
        for (k, (row_j, fp)) in sites.iter().enumerate() {
            let origin = origins[k];
            let mut local = Canvas::new();
            let remap = |net: NetValue| match net {
                NetValue::Bit { bit, .. } => {
                    let (o, b) = word_of(bit as usize);
                    NetValue::Bit { owner: o as u8, bit: b as u8, leg: leaf_leg(k, bit as usize) }
                }
                other => other,
            };
            for (p, spec) in &fp.canvas.cells {
                let mapped = match *spec {
                    CellSpec::Wire(net) => CellSpec::Wire(remap(net)),
                    CellSpec::Cross { h, v } => CellSpec::Cross { h: remap(h), v: remap(v) },
                    CellSpec::Gate { kind: GateKind::Alpha, .. } => {
                        CellSpec::Gate { kind: GateKind::Alpha, row: *row_j as u8 }
                    }
                    other => other,
                };
                local.put(*p, mapped);
            }
            let row_net = NetValue::Bit {
                owner: self_owner as u8,
                bit: *row_j as u8,
                leg: spur_leg(k),
            };
            local.cells.insert(fp.output, CellSpec::Wire(row_net));
            local.translate(origin.0, origin.1);
            canvas.merge(local);
        }

        // structural verticals
        for (k, (_, fp)) in sites.iter().enumerate() {
            for &dx in &fp.drops {
                verts.add(origins[k].0 + dx, y_trunk0, origins[k].1);
            }
            verts.add(origins[k].0 + fp.output.0, y_out, spur_lane(sites.len()) + 6);
        }
        for fam in 0..6 {
            for j in 0..live {
                verts.add(corr_x(fam, j), 0, th);
            }
        }
        for j in 0..live {
            verts.add(coll_x(j), y_spur0 - 2, th);
        }
        for fam in 0..3 {
            for j in 0..live {
                verts.add(west_x(fam, j), 0, th);
            }
        }
        for fam in 0..2 {
            for j in 0..live {
                verts.add(east_x(fam, j), 0, th);
            }
        }

        // trunks (leg 0 carries the distributed signal)
        for o in 0..owners.len() {
            for j in 0..l {
                let net = NetValue::Bit { owner: o as u8, bit: j as u8, leg: 0 };
                canvas.wire_path(&[(trunk_lo, trunk_y(o, j)), (trunk_hi, trunk_y(o, j))], net);
            }
        }

        // routes
        let mut routes: Vec<Route> = Vec::new();
        for (di, &o) in in_owners.iter().enumerate() {
            let dest: Coord = owners[o].iter().map(|v| -v).collect();
            for j in 0..live {
                let lane_y = fan_lane(di * live + j);
                let tap = (coll_x(j) - 1, lane_y);
                let route_leg = (2 + (di * live + j) * 2) as u16 + 60000;
                let out_net =
                    NetValue::Bit { owner: self_owner as u8, bit: j as u8, leg: route_leg };
                let in_net = NetValue::Bit { owner: o as u8, bit: j as u8, leg: 0 };
                let (out_corners, in_corners, join, extend_to) = match (dest[0], dest[1]) {
                    (-1, 0) => (
                        vec![
                            tap,
                            (west_x(0, j), lane_y),
                            (west_x(0, j), stub(0, j)),
                            (0, stub(0, j)),
                        ],
                        vec![
                            (tw - 1, stub(0, j)),
                            (east_x(1, j), stub(0, j)),
                            (east_x(1, j), trunk_y(o, j)),
                        ],
                        (east_x(1, j), trunk_y(o, j)),
                        Some((trunk_hi, trunk_y(o, j))),
                    ),
                    (1, 0) => (
                        vec![
                            tap,
                            (east_x(0, j), lane_y),
                            (east_x(0, j), stub(1, j)),
                            (tw - 1, stub(1, j)),
                        ],
                        vec![
                            (0, stub(1, j)),
                            (west_x(1, j), stub(1, j)),
                            (west_x(1, j), trunk_y(o, j)),
                        ],
                        (west_x(1, j), trunk_y(o, j)),
                        Some((trunk_lo, trunk_y(o, j))),
                    ),
                    (0, -1) => (
                        vec![
                            tap,
                            (corr_x(0, j), lane_y),
                            (corr_x(0, j), stub(2, j)),
                            (corr_x(1, j), stub(2, j)),
                            (corr_x(1, j), 0),
                        ],
                        vec![
                            (corr_x(1, j), th - 1),
                            (corr_x(1, j), north_jog(0, j)),
                            (corr_x(2, j), north_jog(0, j)),
                            (corr_x(2, j), trunk_y(o, j)),
                        ],
                        (corr_x(2, j), trunk_y(o, j)),
                        None,
                    ),
                    (0, 1) => (
                        // the north send dives through the south margin so
                        // every route spans comparable distances
                        vec![
                            tap,
                            (corr_x(3, j), lane_y),
                            (corr_x(3, j), stub(4, j)),
                            (corr_x(4, j), stub(4, j)),
                            (corr_x(4, j), th - 1),
                        ],
                        vec![
                            (corr_x(4, j), 0),
                            (corr_x(4, j), stub(3, j)),
                            (corr_x(5, j), stub(3, j)),
                            (corr_x(5, j), trunk_y(o, j)),
                        ],
                        (corr_x(5, j), trunk_y(o, j)),
                        None,
                    ),
                    other => {
                        return Err(UniversalError::Layout(format!(
                            "destination offset {other:?} outside the von Neumann set"
                        )))
                    }
                };
                routes.push(Route {
                    bit: j,
                    lane_y,
                    out_corners,
                    in_corners,
                    out_net,
                    in_net,
                    owner: o,
                    join,
                    extend_to,
                });
            }
        }
        for j in 0..live {
            let lane_y = fan_lane(in_owners.len() * live + j);
            let net = NetValue::Bit {
                owner: self_owner as u8,
                bit: j as u8,
                leg: 61000 + j as u16,
            };
            // the loopback descends to one cell above its trunk; the hop
            // onto the trunk is the junction between the two legs
            routes.push(Route {
                bit: j,
                lane_y,
                out_corners: vec![
                    (coll_x(j) - 1, lane_y),
                    (west_x(2, j), lane_y),
                    (west_x(2, j), trunk_y(self_owner, j) + 1),
                ],
                in_corners: vec![(west_x(2, j), trunk_y(self_owner, j))],
                out_net: net,
                in_net: NetValue::Bit { owner: self_owner as u8, bit: j as u8, leg: 0 },
                owner: self_owner,
                join: (west_x(2, j), trunk_y(self_owner, j)),
                extend_to: Some((trunk_lo, trunk_y(self_owner, j))),
            });
        }

        // trunk joins: the cell where each owner's bit lands on its trunk.
        // Joins beyond the trunk span connect through a drawn extension, so
        // distances along the row stay exact line distances.
        let mut join_x: HashMap<(usize, usize), i64> = HashMap::new();
        for r in &routes {
            join_x.insert((r.owner, r.bit), r.join.0);
        }
        for o in 0..owners.len() {
            for j in 0..l {
                join_x.entry((o, j)).or_insert(trunk_lo);
            }
        }

        // per-leaf feeds
        let mut feeds: Vec<Feed> = Vec::new();
        let mut lane_no = 0usize;
        for (k, (_, fp)) in sites.iter().enumerate() {
            for (t, &dx) in fp.drops.iter().enumerate() {
                let (o, b) = word_of(t);
                // constant top bits never fire, so only live zero-leaves
                // need an equalizing lane
                let lane = if !fp.word[t] && b + 1 < l {
                    let y = pad_lane(lane_no);
                    lane_no += 1;
                    Some(y)
                } else {
                    None
                };
                feeds.push(Feed {
                    col: origins[k].0 + dx,
                    owner: o,
                    bit: b,
                    leg: leaf_leg(k, t),
                    lane,
                    raw_from_branch: (origins[k].1 - trunk_y(o, b)) as usize + fp.delay[t],
                    gadget_y: origins[k].1,
                });
            }
        }

        // timing. Spur paths equalize to K_A1 at the collector top. Each
        // route gets its own even pad, and a single combined constant K2B
        // covers route plus leaf: the full junction-to-ladder path has a
        // uniform parity even though individual route parities differ.
        let coll_top = fan_lane(fan_slots - 1) + 2;
        let spur_cols: Vec<i64> =
            (0..sites.len()).map(|k| origins[k].0 + sites[k].1.output.0).collect();
        let spur_raws: Vec<usize> = (0..sites.len())
            .map(|k| {
                let lane = spur_lane(k);
                ((lane - y_out) + (coll_x(sites[k].0) - spur_cols[k]) + (coll_top - lane))
                    as usize
            })
            .collect();
        assert_parity(&spur_raws, "spur")?;
        let ka1 = spur_raws.iter().copied().max().unwrap_or(0) + 8;

        let route_raw = |r: &Route| -> isize {
            // +1: the hop from the collector junction onto the tap cell
            let out = 1 + poly_len(&r.out_corners) as isize;
            let down = (coll_top - r.lane_y) as isize;
            let inn = if r.in_corners.is_empty() {
                0
            } else {
                1 + poly_len(&r.in_corners) as isize
            };
            out + inn - down
        };
        let route_raws: Vec<isize> = routes.iter().map(route_raw).collect();
        // routes are unpadded; the combined constant below equalizes the
        // route plus the downstream leaf in one step, and the leaf pads
        // have the whole tile width of winding room
        let mut route_k: HashMap<(usize, usize), usize> = HashMap::new();
        for (r, &raw) in routes.iter().zip(&route_raws) {
            route_k.insert((r.owner, r.bit), raw as usize);
        }

        let leaf_raws: Vec<usize> = feeds
            .iter()
            .map(|f| (f.col - join_x[&(f.owner, f.bit)]).unsigned_abs() as usize + f.raw_from_branch)
            .collect();
        // combined constant: route landing plus leaf path
        let combined: Vec<usize> = feeds
            .iter()
            .zip(&leaf_raws)
            .filter(|(f, _)| f.lane.is_some())
            .map(|(f, &raw)| route_k[&(f.owner, f.bit)] + raw)
            .collect();
        if combined.windows(2).any(|w| w[0] % 2 != w[1] % 2) {
            let mut msg = String::new();
            for (r, &raw) in routes.iter().zip(&route_raws) {
                msg.push_str(&format!(
                    "\nroute owner{} bit{} raw {} out{:?}",
                    r.owner, r.bit, raw, r.out_corners
                ));
            }
            for (f, &raw) in feeds.iter().zip(&leaf_raws).take(6) {
                msg.push_str(&format!(
                    "\nleaf o{} b{} col{} raw {} join {}",
                    f.owner, f.bit, f.col, raw, join_x[&(f.owner, f.bit)]
                ));
            }
            return Err(UniversalError::Layout(format!("combined parity: {msg}")));
        }
        // equalized leaves must also dominate every un-padded exists leaf
        let x_bound = feeds
            .iter()
            .zip(&leaf_raws)
            .filter(|(f, _)| f.lane.is_none() && f.bit + 1 < l)
            .map(|(f, &raw)| route_k[&(f.owner, f.bit)] + raw)
            .max()
            .unwrap_or(0);
        // detour turn columns must clear the dense drop clusters, so every
        // pad gets at least a full gadget width of winding reach
        let escape = 2 * (sites.iter().map(|(_, fp)| fp.width).max().unwrap_or(0) as usize + 16);
        let mut k2b = combined.iter().copied().max().unwrap_or(0).max(x_bound) + 8 + escape;
        if let Some(&c) = combined.first() {
            if (k2b - c) % 2 != 0 {
                k2b += 1;
            }
        }
        if (2 + ka1 + k2b) % 2 != 0 {
            return Err(UniversalError::Layout(format!(
                "odd period; geometry parity broken (ka1 {ka1}, k2b {k2b})"
            )));
        }
        // settles must finish inside the period: bound row back-floods
        let flood_bound = 2 * (ka1 + 16) + (coll_top - y_spur0) as usize + 8;
        if 2 + ka1 + k2b < flood_bound {
            k2b += (flood_bound - (2 + ka1 + k2b) + 1) & !1;
        }
        let base_period = (2 + ka1 + k2b) as u64;
        let k2b = k2b + (self.factor.saturating_sub(1) as usize) * base_period as usize;
        let period = (2 + ka1 + k2b) as u64;

        // draw spurs: each ends one cell short of its collector; the fire
        // hops the gap like any adjacent wire pair
        for (k, (row_j, _)) in sites.iter().enumerate() {
            let net = NetValue::Bit {
                owner: self_owner as u8,
                bit: *row_j as u8,
                leg: spur_leg(k),
            };
            let lane = spur_lane(k);
            canvas.wire_path(&[(spur_cols[k], y_out), (spur_cols[k], lane)], net);
            pad_h(
                &mut canvas,
                &mut verts,
                net,
                (spur_cols[k], lane),
                (coll_x(*row_j) - 1, lane),
                ka1 - spur_raws[k],
                (2, tw - 2),
            )?;
        }

        // collectors (leg 0: the row's broadcast tree)
        for j in 0..live {
            let net = NetValue::Bit { owner: self_owner as u8, bit: j as u8, leg: 0 };
            canvas.wire_path(&[(coll_x(j), y_spur0 - 2), (coll_x(j), coll_top)], net);
        }

        // fan routes, drawn straight
        for r in &routes {
            canvas.wire_path(&r.out_corners, r.out_net);
            if !r.in_corners.is_empty() {
                canvas.wire_path(&r.in_corners, r.in_net);
            }
            if let Some(end) = r.extend_to {
                canvas.wire_path(&[r.join, end], r.in_net);
            }
        }

        // leaf feeds start one cell above their trunk lane (the branch
        // junction is the adjacency, keeping each feed a separate leg)
        for (f, &raw) in feeds.iter().zip(&leaf_raws) {
            let net =
                NetValue::Bit { owner: f.owner as u8, bit: f.bit as u8, leg: f.leg };
            let ty = trunk_y(f.owner, f.bit) + 1;
            match f.lane {
                None => {
                    canvas.wire_path(&[(f.col, ty), (f.col, f.gadget_y)], net);
                }
                Some(lane) => {
                    let extra = k2b - route_k[&(f.owner, f.bit)] - raw;
                    canvas.wire_path(&[(f.col, ty), (f.col, lane)], net);
                    let resume = pad_v(
                        &mut canvas,
                        &mut verts,
                        net,
                        f.col,
                        lane,
                        extra,
                        (2, tw - 2),
                        lane_pitch - 2,
                    )?;
                    canvas.wire_path(&[(f.col, resume), (f.col, f.gadget_y)], net);
                }
            }
        }

        let readout: Vec<Vec<Pt>> = (0..live)
            .map(|j| ((y_spur0 - 2)..=coll_top).map(|y| (coll_x(j), y)).collect())
            .collect();

        let mut cells: Vec<(Pt, CellSpec)> = canvas.cells.into_iter().collect();
        cells.sort_by_key(|&(p, _)| p);
        for &((x, y), _) in &cells {
            if x < 0 || x >= tw || y < 0 || y >= th {
                return Err(UniversalError::Layout(format!(
                    "cell ({x},{y}) outside the tile area {tw}x{th}"
                )));
            }
        }

        Ok(TileTemplate {
            size: (tw, th),
            owners,
            self_owner,
            bits: l,
            cells,
            readout,
            period,
        })
    }
}

fn assert_parity(values: &[usize], what: &str) -> Result<(), UniversalError> {
    if values.windows(2).any(|w| w[0] % 2 != w[1] % 2) {
        return Err(UniversalError::Layout(format!("{what} path parity mismatch")));
    }
    Ok(())
}
