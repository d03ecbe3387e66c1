// debug: settle + run the all-zeros matcher on a partial input
use fcalab::core::{Configuration, Engine, GridBox, State};
use fcalab::universal::*;

fn show(c: &Configuration, lo: (i64, i64), hi: (i64, i64)) {
    for y in (lo.1..=hi.1).rev() {
        let mut line = String::new();
        for x in lo.0..=hi.0 {
            let s = c.get(&[x, y]);
            line.push(match s.0 {
                0 => '.',
                1 => 'W',
                2 => 'F',
                3 => 'H',
                4 => 'V',
                _ => '?',
            });
        }
        println!("{y:4} {line}");
    }
}

fn main() {
    let word = [false, false, false];
    let input = [false, true, false];
    let fp = build_matcher(&word);
    let (lo, hi) = fp.canvas.bounds();
    let bbox = GridBox::new(vec![lo.0 - 1, lo.1 - 1], vec![hi.0 + 1, hi.1 + 1]);
    let mut config = Configuration::filled(bbox.clone(), U5::B.state());
    for (p, spec) in &fp.canvas.cells {
        let v = match spec {
            CellSpec::Wire(NetValue::Bit { bit, .. }) => {
                if input[*bit as usize] { U5::W } else { U5::F }
            }
            CellSpec::Wire(NetValue::ConstFired) => U5::F,
            CellSpec::Wire(_) | CellSpec::Cross { .. } => U5::W,
            CellSpec::Gate { .. } => U5::B,
            CellSpec::Tag(t) => *t,
        };
        config.set(&[p.0, p.1], v.state());
    }
    let settle_rule = u5_settle_rule();
    let mut settle = Engine::new(&settle_rule, &config).unwrap();
    settle.run_to_fixpoint(10000).unwrap();
    let settled = settle.snapshot().reboxed(bbox.clone());
    println!("=== settled ===");
    show(&settled, (lo.0 - 1, lo.1 - 1), (hi.0 + 1, hi.1 + 1));
    let (rule, _) = u5_rule();
    let mut engine = Engine::new(&rule, &settled).unwrap();
    engine.run_to_fixpoint(10000).unwrap();
    let fin = engine.snapshot().reboxed(bbox);
    println!("=== final ===  output at {:?} = {:?}", fp.output, fin.get(&[fp.output.0, fp.output.1]));
    show(&fin, (lo.0 - 1, lo.1 - 1), (hi.0 + 1, hi.1 + 1));
}
