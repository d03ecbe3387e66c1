//! Encoding and decoding of configurations for compiled targets.
//!
//! Encoding instantiates the tile template per source cell (wires valued by
//! the unary bits, alpha gates pre-triggered exactly on fired rows) and
//! settles with the gate-disabled wire rule, so exists/for-all trees
//! reflect their inputs while no row can fire. Decoding reads the row
//! collectors back.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::core::{dilate_box, von_neumann, Configuration, Coord, Engine, GridBox, State};
use crate::simcheck::{BlockCoder, Coder, Encoding};

use super::grid::{CellSpec, GateKind, NetValue};
use super::tile::CompiledTarget;
use super::u5::{u5_settle_rule, U5};
use super::UniversalError;

fn bit_is_live(state: State, bit: u8) -> bool {
    // bit b of the unary word 1^rank 0^(L-rank)
    u64::from(bit) < u64::from(state.0)
}

fn net_fired(net: NetValue, src: &dyn Fn(usize) -> State) -> bool {
    match net {
        NetValue::Bit { owner, bit, .. } => !bit_is_live(src(owner as usize), bit),
        NetValue::ConstFired => true,
        NetValue::Derived(_) | NetValue::ConstUnfired => false,
    }
}

/// Writes the raw (unsettled) template for one block into `out`. `src`
/// resolves owner indices to source states.
fn instantiate_tile(
    target: &CompiledTarget,
    origin: (i64, i64),
    src: &dyn Fn(usize) -> State,
    out: &mut Configuration,
) {
    let self_state = src(target.tile.self_owner);
    for &((x, y), spec) in &target.tile.cells {
        let v = match spec {
            CellSpec::Wire(net) => {
                if net_fired(net, src) {
                    U5::F
                } else {
                    U5::W
                }
            }
            CellSpec::Cross { h, v } => {
                match (net_fired(h, src), net_fired(v, src)) {
                    (true, true) => U5::F,
                    (true, false) => U5::H,
                    (false, true) => U5::V,
                    (false, false) => U5::W,
                }
            }
            CellSpec::Gate { kind: GateKind::Alpha, row } => {
                // the row is fired exactly when the row bit is fired
                if !bit_is_live(self_state, row) {
                    U5::V
                } else {
                    U5::B
                }
            }
            CellSpec::Gate { .. } => U5::B,
            CellSpec::Tag(t) => t,
        };
        if v != U5::B {
            out.set(&[origin.0 + x, origin.1 + y], v.state());
        }
    }
}

/// Block range an encoding materializes: the trimmed support dilated by
/// the von Neumann context.
fn block_range(c: &Configuration) -> GridBox {
    let t = c.trimmed();
    dilate_box(t.bbox(), &von_neumann(2)).union(t.bbox())
}

fn settle(config: Configuration) -> Result<Configuration, UniversalError> {
    let rule = u5_settle_rule();
    let mut engine = Engine::new(&rule, &config)?;
    let bound = config.bbox().cell_count() as u64 + 64;
    engine
        .run_to_fixpoint(bound)
        .ok_or_else(|| UniversalError::Layout("encoding settle did not terminate".into()))?;
    Ok(engine.snapshot())
}

/// Encodes a source configuration (over the unary alphabet) into a settled
/// wire configuration: the well-encoded `φ̄(c)`.
pub fn encode(target: &CompiledTarget, c: &Configuration) -> Result<Configuration, UniversalError> {
    if c.dim() != 2 {
        return Err(UniversalError::NotPlanar(c.dim()));
    }
    let blocks = block_range(c);
    let (tw, th) = target.tile.size;
    let out_box = GridBox::new(
        vec![blocks.lo[0] * tw, blocks.lo[1] * th],
        vec![blocks.hi[0] * tw + tw - 1, blocks.hi[1] * th + th - 1],
    );
    let mut raw = Configuration::filled(out_box, U5::B.state());
    for z in blocks.iter_coords() {
        let src = |o: usize| {
            let off = &target.tile.owners[o];
            c.get(&[z[0] + off[0], z[1] + off[1]])
        };
        instantiate_tile(target, (z[0] * tw, z[1] * th), &src, &mut raw);
    }
    settle(raw)
}

/// Reads the simulated configuration back from a wire configuration by
/// inspecting each tile's row collectors. Returns `None` when any
/// collector is incoherent or a bit pattern is not a unary word.
pub fn decode(
    target: &CompiledTarget,
    g: &Configuration,
) -> Result<Option<Configuration>, UniversalError> {
    if g.dim() != 2 {
        return Err(UniversalError::NotPlanar(g.dim()));
    }
    let (tw, th) = target.tile.size;
    let t = g.trimmed();
    if t.is_uniform_background() {
        return Ok(Some(Configuration::filled(
            GridBox::new(vec![0, 0], vec![0, 0]),
            target.source.background(),
        )));
    }
    let blo = [t.bbox().lo[0].div_euclid(tw), t.bbox().lo[1].div_euclid(th)];
    let bhi = [t.bbox().hi[0].div_euclid(tw), t.bbox().hi[1].div_euclid(th)];
    let blocks = GridBox::new(blo.to_vec(), bhi.to_vec());
    let mut out = Configuration::filled(blocks.clone(), target.source.background());
    for z in blocks.iter_coords() {
        let origin = (z[0] * tw, z[1] * th);
        let mut bits: Vec<Option<bool>> = Vec::with_capacity(target.tile.readout.len());
        let mut background_cells = 0usize;
        let mut total_cells = 0usize;
        let mut bad = false;
        for cells in &target.tile.readout {
            let mut bit: Option<bool> = None;
            for &(x, y) in cells {
                total_cells += 1;
                let v = g.get(&[origin.0 + x, origin.1 + y]);
                if v == U5::B.state() {
                    background_cells += 1;
                    continue;
                }
                let b = if v == U5::W.state() {
                    true
                } else if v == U5::F.state() {
                    false
                } else {
                    bad = true;
                    continue;
                };
                match bit {
                    None => bit = Some(b),
                    Some(a) if a != b => bad = true,
                    _ => {}
                }
            }
            bits.push(bit);
        }
        if total_cells > 0 && background_cells == total_cells {
            continue; // tile not materialized: source background
        }
        if bad || background_cells > 0 || bits.iter().any(Option::is_none) {
            return Ok(None);
        }
        let word: Vec<bool> = bits.into_iter().map(Option::unwrap).collect();
        let rank = word.iter().take_while(|&&b| b).count();
        if word.iter().skip(rank).any(|&b| b) {
            return Ok(None); // not of the form 1^i 0^*
        }
        out.set(&z, State(rank as u32));
    }
    Ok(Some(out.trimmed()))
}

/// The uniform padded cycle length of a compiled target: one source step
/// per `settling_time` simulator steps.
pub fn settling_time(target: &CompiledTarget) -> u64 {
    target.tile.period
}

/// Blockwise coder realizing the encoding locally: one tile instantiated
/// from its von Neumann window and settled in isolation. Fires never cross
/// tile boundaries during a settle, so this equals the global encode
/// restricted to the tile. Settled tiles are memoized per window.
pub struct CompiledCoder {
    target: Arc<CompiledTarget>,
    context: Vec<Coord>,
    memo: Mutex<HashMap<Vec<State>, Vec<State>>>,
}

impl CompiledCoder {
    pub fn new(target: Arc<CompiledTarget>, context: Vec<Coord>) -> CompiledCoder {
        CompiledCoder { target, context, memo: Mutex::new(HashMap::new()) }
    }
}

impl BlockCoder for CompiledCoder {
    fn encode_block(&self, window: &[State]) -> Vec<State> {
        if let Some(hit) = self.memo.lock().unwrap().get(window) {
            return hit.clone();
        }
        let (tw, th) = self.target.tile.size;
        let bbox = GridBox::new(vec![0, 0], vec![tw - 1, th - 1]);
        let mut raw = Configuration::filled(bbox.clone(), U5::B.state());
        let src = |o: usize| {
            let off = &self.target.tile.owners[o];
            let pos = self
                .context
                .iter()
                .position(|c| c == off)
                .expect("owner offsets are part of the context");
            window[pos]
        };
        instantiate_tile(&self.target, (0, 0), &src, &mut raw);
        let settled = settle(raw).expect("tile settle terminates");
        let mut cells = Vec::with_capacity(bbox.cell_count());
        for z in bbox.iter_coords() {
            cells.push(settled.get(&z));
        }
        self.memo.lock().unwrap().insert(window.to_vec(), cells.clone());
        cells
    }
}

/// The encoding of a compiled target: block = tile size, context = the
/// symmetric von Neumann set, slowdown = the settled period.
pub fn target_encoding(target: &Arc<CompiledTarget>) -> Encoding {
    let context = von_neumann(2);
    let coder = CompiledCoder::new(target.clone(), context.clone());
    Encoding::new(
        vec![target.tile.size.0, target.tile.size.1],
        context,
        target.tile.period,
        Coder::Fn(Arc::new(coder)),
        U5::B.state(),
    )
}
