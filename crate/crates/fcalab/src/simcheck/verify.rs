//! Applying encodings and verifying simulation relations on samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{iterate, step, Configuration, Coord, GridBox, RuleTable, State};
use crate::parallel;

use super::{Encoding, SimError};

/// Block range an encoding materializes for a source configuration: the
/// trimmed support dilated by the context (blocks whose window meets the
/// support), with the trimmed box always included.
fn block_range(enc: &Encoding, c: &Configuration) -> GridBox {
    let t = c.trimmed();
    crate::core::dilate_box(t.bbox(), &enc.context).union(t.bbox())
}

/// Applies `φ̄` blockwise: cell `b⊙z + r` of the image is `φ(c|_{z+C})_r`.
/// Blocks outside the materialized range are left at the target background.
pub fn apply_encoding(enc: &Encoding, c: &Configuration) -> Result<Configuration, SimError> {
    apply_encoding_over(enc, c, &block_range(enc, c))
}

/// Same as [`apply_encoding`] but with an explicit block range, so that two
/// encoded configurations can be compared over an aligned window.
pub fn apply_encoding_over(
    enc: &Encoding,
    c: &Configuration,
    blocks: &GridBox,
) -> Result<Configuration, SimError> {
    let d = c.dim();
    if enc.dim() != d {
        return Err(SimError::BlockDim { got: enc.dim(), dim: d });
    }
    let out_box = GridBox::new(
        blocks.lo.iter().zip(&enc.block).map(|(z, b)| z * b).collect(),
        blocks.hi.iter().zip(&enc.block).map(|(z, b)| z * b + b - 1).collect(),
    );
    let block_box = enc.block_box();
    let block_cells: Vec<Coord> = block_box.iter_coords().collect();
    let n_blocks = blocks.cell_count();
    let encoded: Vec<Result<Vec<State>, SimError>> = parallel::map_collect(n_blocks, |i| {
        let z = blocks.coord_of(i);
        let mut window = Vec::with_capacity(enc.context.len());
        let mut at = vec![0i64; d];
        for u in &enc.context {
            for a in 0..d {
                at[a] = z[a] + u[a];
            }
            window.push(c.get(&at));
        }
        enc.encode_block(&window)
    });
    let mut out = Configuration::filled(out_box, enc.target_background);
    let mut abs = vec![0i64; d];
    for (i, blk) in encoded.into_iter().enumerate() {
        let blk = blk?;
        let z = blocks.coord_of(i);
        for (r, &s) in block_cells.iter().zip(blk.iter()) {
            for a in 0..d {
                abs[a] = z[a] * enc.block[a] + r[a];
            }
            out.set(&abs, s);
        }
    }
    Ok(out)
}

/// Seeded configuration source: uniform random boxes plus structured
/// single-signal and corner-pair configurations.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub extents: Vec<i64>,
    pub structured: bool,
}

impl Sampler {
    pub fn new(seed: u64, count: usize, extents: Vec<i64>) -> Sampler {
        Sampler { seed, count, extents, structured: true }
    }

    pub fn configurations(&self, rule: &RuleTable) -> Vec<Configuration> {
        let bbox = GridBox::new(
            vec![0; self.extents.len()],
            self.extents.iter().map(|&e| e - 1).collect(),
        );
        let q = rule.state_count();
        let mut out = Vec::new();
        if self.structured {
            // one lone signal per non-background state, centered
            let center: Coord = bbox.lo.iter().zip(&bbox.hi).map(|(l, h)| (l + h) / 2).collect();
            for s in 0..q {
                if State(s as u32) != rule.background() {
                    let mut c = Configuration::filled(bbox.clone(), rule.background());
                    c.set(&center, State(s as u32));
                    out.push(c);
                }
            }
            // opposite-corner pairs of the two highest non-background states
            let mut nonbg: Vec<State> =
                (0..q).map(|s| State(s as u32)).filter(|&s| s != rule.background()).collect();
            nonbg.reverse();
            if let (Some(&a), Some(&b)) = (nonbg.first(), nonbg.get(1).or(nonbg.first())) {
                let mut c = Configuration::filled(bbox.clone(), rule.background());
                c.set(&bbox.lo.clone(), a);
                c.set(&bbox.hi.clone(), b);
                out.push(c);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        while out.len() < self.count {
            let cells: Vec<State> =
                (0..bbox.cell_count()).map(|_| State(rng.gen_range(0..q) as u32)).collect();
            out.push(Configuration::from_cells(bbox.clone(), rule.background(), cells));
        }
        out.truncate(self.count);
        out
    }
}

/// One simulation failure: the sample, the first mismatching block and the
/// step at which it was compared.
#[derive(Debug, Clone)]
pub struct SimFailure {
    pub sample: usize,
    pub config: Configuration,
    pub block: Coord,
    pub step: u64,
}

/// Outcome of a sampled simulation check.
#[derive(Debug)]
pub struct SimReport {
    pub samples: usize,
    pub failures: Vec<SimFailure>,
    pub injectivity_pairs: usize,
    pub injectivity_failures: usize,
}

impl SimReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.injectivity_failures == 0
    }
}

/// Checks `φ̄(F(c)) = G^T(φ̄(c))` cell-exactly on sampled configurations,
/// with both sides materialized over an aligned block range, plus an
/// injectivity spot-check of `φ̄` on sampled distinct pairs.
pub fn verify_simulation(
    rule_f: &RuleTable,
    rule_g: &RuleTable,
    enc: &Encoding,
    sampler: &Sampler,
) -> Result<SimReport, SimError> {
    let configs = sampler.configurations(rule_f);
    let mut failures = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        let fc = step(rule_f, c)?;
        let range = block_range(enc, c).union(&block_range(enc, &fc));
        let want = apply_encoding_over(enc, &fc, &range)?;
        let start = apply_encoding_over(enc, c, &range)?;
        let got = iterate(rule_g, &start, enc.slowdown)?;
        if want != got {
            failures.push(SimFailure {
                sample: i,
                config: c.clone(),
                block: first_mismatch_block(enc, &want, &got),
                step: enc.slowdown,
            });
        }
    }
    // Injectivity: encoded images of distinct samples must stay distinct.
    let mut pairs = 0;
    let mut inj_fail = 0;
    for i in 0..configs.len().min(12) {
        for j in (i + 1)..configs.len().min(12) {
            if configs[i] == configs[j] {
                continue;
            }
            let range =
                block_range(enc, &configs[i]).union(&block_range(enc, &configs[j]));
            pairs += 1;
            let a = apply_encoding_over(enc, &configs[i], &range)?;
            let b = apply_encoding_over(enc, &configs[j], &range)?;
            if a == b {
                inj_fail += 1;
            }
        }
    }
    Ok(SimReport {
        samples: configs.len(),
        failures,
        injectivity_pairs: pairs,
        injectivity_failures: inj_fail,
    })
}

fn first_mismatch_block(enc: &Encoding, a: &Configuration, b: &Configuration) -> Coord {
    let joint = a.bbox().union(b.bbox());
    for z in joint.iter_coords() {
        if a.get(&z) != b.get(&z) {
            return z.iter().zip(&enc.block).map(|(v, bl)| v.div_euclid(*bl)).collect();
        }
    }
    vec![0; enc.dim()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::fixture;

    #[test]
    fn identity_encoding_reduces_to_orbit_equality() {
        let f = fixture("f_min(2)").unwrap();
        let enc = Encoding::identity(1, f.rule.state_count(), f.rule.background());
        let sampler = Sampler::new(42, 20, vec![9]);
        let report = verify_simulation(&f.rule, &f.rule, &enc, &sampler).unwrap();
        assert!(report.ok(), "failures: {:?}", report.failures.len());
        assert!(report.injectivity_pairs > 0);
    }

    #[test]
    fn corrupted_coder_is_caught() {
        let f = fixture("f_min(2)").unwrap();
        let q = f.rule.state_count();
        // identity, except state 3 encodes like state 2
        let mut table = std::collections::BTreeMap::new();
        for s in 0..q as u32 {
            let image = if s == 3 { State(2) } else { State(s) };
            table.insert(vec![State(s)], vec![image]);
        }
        let enc = Encoding::new(
            vec![1],
            vec![vec![0]],
            1,
            super::super::Coder::Table(table),
            f.rule.background(),
        );
        let sampler = Sampler::new(43, 30, vec![8]);
        let report = verify_simulation(&f.rule, &f.rule, &enc, &sampler).unwrap();
        assert!(!report.ok());
    }

    #[test]
    fn block_dependence_is_local() {
        // perturbing a source cell outside z+C leaves block z unchanged
        let f = fixture("f_min(2)").unwrap();
        let enc = Encoding::identity(1, f.rule.state_count(), f.rule.background());
        let mut a = Configuration::filled(GridBox::new(vec![0], vec![6]), State(0));
        a.set(&[2], State(3));
        let mut b = a.clone();
        b.set(&[6], State(1));
        let ea = apply_encoding(&enc, &a).unwrap();
        let eb = apply_encoding(&enc, &b).unwrap();
        assert_eq!(ea.get(&[2]), eb.get(&[2]));
    }
}
