//! Layout discipline validator: rejects geometry that would misbehave
//! under the wire rule (stray gate patterns, unregistered crossings, tags
//! igniting adjacent wire, net shorts). Runs over a 3x3 tiling so boundary
//! seams are covered.

use std::collections::HashMap;

use crate::core::Coord;

use super::grid::{CellSpec, GateKind, NetValue, Pt};
use super::tile::CompiledTarget;
use super::u5::U5;
use super::UniversalError;

type Placed = (CellSpec, (i64, i64));

fn wireish(spec: Option<&Placed>) -> bool {
    matches!(spec, Some((CellSpec::Wire(_), _)) | Some((CellSpec::Cross { .. }, _)))
}

/// Two wire cells carry the same signal when they reference the same
/// absolute source cell and bit (derived nets must come from the same tile
/// instance).
fn same_signal(owners: &[Coord], a: NetValue, ta: (i64, i64), b: NetValue, tb: (i64, i64)) -> bool {
    match (a, b) {
        (
            NetValue::Bit { owner: o1, bit: b1, .. },
            NetValue::Bit { owner: o2, bit: b2, .. },
        ) => {
            b1 == b2
                && ta.0 + owners[o1 as usize][0] == tb.0 + owners[o2 as usize][0]
                && ta.1 + owners[o1 as usize][1] == tb.1 + owners[o2 as usize][1]
        }
        (NetValue::Derived(i), NetValue::Derived(k)) => i == k && ta == tb,
        (NetValue::ConstFired, NetValue::ConstFired) => ta == tb,
        (NetValue::ConstUnfired, NetValue::ConstUnfired) => ta == tb,
        _ => false,
    }
}

/// The net a cell presents along an axis (`vertical = true` for its
/// north/south faces).
fn carried(spec: &CellSpec, vertical: bool) -> Option<NetValue> {
    match spec {
        CellSpec::Wire(n) => Some(*n),
        CellSpec::Cross { h, v } => Some(if vertical { *v } else { *h }),
        _ => None,
    }
}

pub(crate) fn validate_template(target: &CompiledTarget) -> Result<(), UniversalError> {
    let (tw, th) = target.tile.size;
    let owners = &target.tile.owners;
    let mut map: HashMap<Pt, Placed> = HashMap::new();
    for bx in -1..=1i64 {
        for by in -1..=1i64 {
            for &((x, y), spec) in &target.tile.cells {
                map.insert((x + bx * tw, y + by * th), (spec, (bx, by)));
            }
        }
    }
    let at = |p: Pt| map.get(&p);
    let err = |p: Pt, msg: &str| {
        let mut dump = String::new();
        for dy in (-3..=3i64).rev() {
            dump.push('\n');
            for dx in -5..=5i64 {
                let q = (p.0 + dx, p.1 + dy);
                let c = match map.get(&q) {
                    None => "    .".to_string(),
                    Some((CellSpec::Wire(NetValue::Bit { owner, bit, leg }), _)) => {
                        format!(" {owner}{bit}.{leg:>2}")
                    }
                    Some((CellSpec::Wire(NetValue::Derived(i)), _)) => format!("  d{i:>2}"),
                    Some((CellSpec::Wire(NetValue::ConstFired), _)) => "   CF".to_string(),
                    Some((CellSpec::Wire(NetValue::ConstUnfired), _)) => "   CU".to_string(),
                    Some((CellSpec::Cross { .. }, _)) => "    +".to_string(),
                    Some((CellSpec::Gate { .. }, _)) => "    G".to_string(),
                    Some((CellSpec::Tag(t), _)) => format!("    {}", t.label()),
                };
                dump.push_str(&c);
            }
        }
        Err(UniversalError::Layout(format!("cell {p:?}: {msg}{dump}")))
    };

    for (&p, (spec, tile)) in &map {
        let (x, y) = p;
        let n = at((x, y + 1));
        let e = at((x + 1, y));
        let s = at((x, y - 1));
        let w = at((x - 1, y));
        let sides = [n, e, s, w];
        let wire_neighbors = sides.iter().filter(|v| wireish(**v)).count();
        match spec {
            CellSpec::Wire(net) => {
                if wire_neighbors == 4 {
                    return err(
                        p,
                        &format!(
                            "wire {net:?} with four wire neighbors: n {:?} e {:?} s {:?} w {:?}",
                            n.map(|v| v.0),
                            e.map(|v| v.0),
                            sides[2].map(|v| v.0),
                            w.map(|v| v.0)
                        ),
                    );
                }
                for (side, q) in sides.iter().enumerate() {
                    if let Some((qs, qt)) = q {
                        let vertical = side == 0 || side == 2;
                        if let Some(qnet) = carried(qs, vertical) {
                            if !same_signal(owners, *net, *tile, qnet, *qt) {
                                return err(
                                    p,
                                    &format!(
                                        "adjacent wires on different nets: {net:?} (tile {tile:?}) \
                                         vs side {side} {qnet:?} (tile {qt:?})"
                                    ),
                                );
                            }
                        }
                    }
                }
            }
            CellSpec::Cross { h, v } => {
                if wire_neighbors != 4 {
                    return err(p, "crossing without four wire neighbors");
                }
                if !matches!(h, NetValue::Bit { .. }) || !matches!(v, NetValue::Bit { .. }) {
                    return err(p, "crossing carries a non-bit net");
                }
                for (side, q) in sides.iter().enumerate() {
                    let vertical = side == 0 || side == 2;
                    let want = if vertical { *v } else { *h };
                    match q {
                        Some((qs, qt)) => match carried(qs, vertical) {
                            Some(qnet) if same_signal(owners, want, *tile, qnet, *qt) => {}
                            _ => return err(p, "crossing axis does not continue its net"),
                        },
                        None => return err(p, "crossing axis ends in background"),
                    }
                }
            }
            CellSpec::Gate { kind, .. } => {
                if !wireish(n) || !wireish(e) || !wireish(w) {
                    return err(p, "gate without wire on its io sides");
                }
                match kind {
                    GateKind::Alpha => {
                        if s.is_some() {
                            return err(p, "alpha gate needs a background south tag");
                        }
                    }
                    GateKind::Exists => {
                        if !matches!(s, Some((CellSpec::Tag(U5::H), _))) {
                            return err(p, "exists gate without its south H tag");
                        }
                    }
                    GateKind::Forall => {
                        if !matches!(s, Some((CellSpec::Tag(U5::V), _))) {
                            return err(p, "for-all gate without its south V tag");
                        }
                    }
                }
            }
            CellSpec::Tag(U5::H) => {
                if wireish(e) || wireish(w) {
                    return err(p, "wire beside an H tag would ignite");
                }
                if !matches!(n, Some((CellSpec::Gate { .. }, _))) {
                    return err(p, "H tag without a gate above");
                }
            }
            CellSpec::Tag(U5::V) => {
                if wireish(s) {
                    return err(p, "wire below a V tag would ignite");
                }
                if !matches!(n, Some((CellSpec::Gate { .. }, _))) {
                    return err(p, "V tag without a gate above");
                }
            }
            CellSpec::Tag(_) => {
                return err(p, "unexpected tag state");
            }
        }
    }

    // background cells that would act as gates: with north, east and west
    // all wire-ish, any non-wire south (background or tag) forms a live
    // gate pattern
    for &p in map.keys() {
        for d in [(0i64, 1i64), (1, 0), (0, -1), (-1, 0)] {
            let q = (p.0 + d.0, p.1 + d.1);
            if map.contains_key(&q) {
                continue;
            }
            let n = at((q.0, q.1 + 1));
            let e = at((q.0 + 1, q.1));
            let w = at((q.0 - 1, q.1));
            let s = at((q.0, q.1 - 1));
            if wireish(n) && wireish(e) && wireish(w) && !wireish(s) {
                return err(q, "stray background cell would trigger as a gate");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;
    use crate::transform::to_unary;
    use crate::universal::macrocell::build_macrocell;
    use crate::universal::tile::TileBuilder;

    #[test]
    fn dump_seam_violations() {
        let f = fixture("bootstrap2").unwrap();
        let (unary, _) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let plan = build_macrocell(&unary).unwrap();
        let tile = TileBuilder { rule: &unary, plan: &plan, factor: 1 }.build().unwrap();
        let target = crate::universal::CompiledTarget {
            source: unary.clone(),
            plan,
            tile,
            factor: 1,
        };
        let (tw, th) = target.tile.size;
        println!("tile {tw}x{th}");
        let mut map = std::collections::HashMap::new();
        for bx in -1..=1i64 {
            for by in -1..=1i64 {
                for &((x, y), spec) in &target.tile.cells {
                    map.insert((x + bx * tw, y + by * th), spec);
                }
            }
        }
        for &(cx, cy) in &[(352i64, 1138i64), (138, -219), (800, 1671)] {
            println!("--- around ({cx},{cy}) [local ({}, {})]", cx.rem_euclid(tw), cy.rem_euclid(th));
            for dy in (-3..=3i64).rev() {
                let mut line = String::new();
                for dx in -6..=6i64 {
                    let p = (cx + dx, cy + dy);
                    let c = match map.get(&p) {
                        None => ".".into(),
                        Some(CellSpec::Wire(NetValue::Bit { owner, bit, .. })) => format!("{owner}{bit}"),
                        Some(CellSpec::Wire(NetValue::Derived(_))) => "dd".into(),
                        Some(CellSpec::Wire(NetValue::ConstFired)) => "CF".into(),
                        Some(CellSpec::Wire(NetValue::ConstUnfired)) => "CU".into(),
                        Some(CellSpec::Cross { .. }) => "++".into(),
                        Some(CellSpec::Gate { .. }) => "G ".into(),
                        Some(CellSpec::Tag(t)) => format!("{} ", t.label()),
                    };
                    line.push_str(&format!("{c:>3}"));
                }
                println!("{:5} {line}", cy + dy);
            }
        }
        let _ = validate_template(&target);
    }
}
