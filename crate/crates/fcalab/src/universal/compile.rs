//! The compiler drivers: lay out a unary von Neumann rule as wire circuits,
//! and the full pipeline from an arbitrary freezing rule.

use std::sync::Arc;

use crate::analysis::{infer_order, StateOrder};
use crate::core::{Limits, RuleTable};
use crate::simcheck::Encoding;
use crate::transform::{compose_encodings, to_unary, Recoding};

use super::encode::target_encoding;
use super::macrocell::build_macrocell;
use super::tile::{CompiledTarget, TileBuilder};
use super::validate::validate_template;
use super::UniversalError;

/// Compiles a unary, symmetric von Neumann, freezing rule into a circuit
/// layout over the 5-state wire alphabet.
pub fn compile_u5(rule: &RuleTable) -> Result<CompiledTarget, UniversalError> {
    compile_u5_with_factor(rule, 1)
}

/// Same as [`compile_u5`] with every pad target scaled: factor `f`
/// multiplies the settled period exactly `f`-fold.
pub fn compile_u5_with_factor(
    rule: &RuleTable,
    factor: u32,
) -> Result<CompiledTarget, UniversalError> {
    let plan = build_macrocell(rule)?;
    let tile = TileBuilder { rule, plan: &plan, factor: factor.max(1) }.build()?;
    let target = CompiledTarget { source: rule.clone(), plan, tile, factor: factor.max(1) };
    validate_template(&target)?;
    Ok(target)
}

/// A full compilation: source rule, its unary conjugate, the compiled
/// target and the composed source-to-wires encoding.
pub struct UniversalCompilation {
    pub source: RuleTable,
    pub order: StateOrder,
    pub unary: RuleTable,
    pub recoding: Recoding,
    pub target: Arc<CompiledTarget>,
    /// Encoding from unary configurations to wire configurations.
    pub unary_encoding: Encoding,
    /// Encoding straight from source configurations to wire configurations.
    pub encoding: Encoding,
}

/// Pipeline: recode a freezing planar rule to its unary representation and
/// compile it. The neighborhood must already sit inside the symmetric von
/// Neumann set; wider rules are reduced separately first.
pub fn compile_pipeline(
    rule: &RuleTable,
    order: Option<&StateOrder>,
) -> Result<UniversalCompilation, UniversalError> {
    if rule.dim() != 2 {
        return Err(UniversalError::NotPlanar(rule.dim()));
    }
    if rule
        .neighborhood()
        .iter()
        .any(|n| n.iter().map(|v| v.abs()).sum::<i64>() > 1)
    {
        return Err(UniversalError::NotVonNeumann);
    }
    let order = match order {
        Some(o) => o.clone(),
        None => infer_order(rule, &Limits::default())?.ok_or(UniversalError::NotFreezing)?,
    };
    let (unary, recoding) = to_unary(rule, &order)?;
    let target = Arc::new(compile_u5(&unary)?);
    let unary_encoding = target_encoding(&target);
    let pre = recoding.as_encoding(2, recoding.forward(rule.background()));
    let encoding = compose_encodings(&pre, &unary_encoding)?;
    Ok(UniversalCompilation {
        source: rule.clone(),
        order,
        unary,
        recoding,
        target,
        unary_encoding,
        encoding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{fixture, Configuration, GridBox, State};
    use crate::simcheck::apply_encoding;
    use crate::universal::encode::{decode, encode, settling_time};

    #[test]
    fn erosion_compiles_and_roundtrips() {
        let f = fixture("bootstrap2").unwrap();
        let comp = compile_pipeline(&f.rule, f.order.as_ref()).unwrap();
        let target = &comp.target;
        assert!(settling_time(target) >= 4);
        assert_eq!(settling_time(target) % 2, 0);

        // decode(encode(c)) = c on a couple of small unary configurations
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![2, 2]), State(1));
        c.set(&[1, 1], State(0));
        c.set(&[2, 0], State(0));
        let enc = encode(target, &c).unwrap();
        let back = decode(target, &enc).unwrap().expect("coherent");
        assert_eq!(back, c);
    }

    #[test]
    fn corrupted_wire_decodes_to_none() {
        let f = fixture("bootstrap2").unwrap();
        let comp = compile_pipeline(&f.rule, f.order.as_ref()).unwrap();
        let target = &comp.target;
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![1, 1]), State(1));
        c.set(&[0, 0], State(0));
        let mut enc = encode(target, &c).unwrap();
        // corrupt one readout cell of the (0,0) tile
        let (x, y) = target.tile.readout[0][2];
        let v = enc.get(&[x, y]);
        let flip = if v == crate::universal::U5::W.state() {
            crate::universal::U5::F.state()
        } else {
            crate::universal::U5::W.state()
        };
        enc.set(&[x, y], flip);
        assert_eq!(decode(target, &enc).unwrap(), None);
    }

    #[test]
    fn blockwise_and_global_encoding_agree() {
        let f = fixture("bootstrap2").unwrap();
        let comp = compile_pipeline(&f.rule, f.order.as_ref()).unwrap();
        let mut c = Configuration::filled(GridBox::new(vec![0, 0], vec![2, 2]), State(1));
        c.set(&[1, 1], State(0));
        let global = encode(&comp.target, &c).unwrap();
        let blockwise = apply_encoding(&comp.unary_encoding, &c).unwrap();
        assert_eq!(global, blockwise);
    }

    #[test]
    fn doubling_padding_doubles_the_period() {
        let f = fixture("bootstrap2").unwrap();
        let (unary, _) = to_unary(&f.rule, f.order.as_ref().unwrap()).unwrap();
        let t1 = compile_u5(&unary).unwrap();
        let t2 = compile_u5_with_factor(&unary, 2).unwrap();
        assert_eq!(t2.period(), 2 * t1.period());
    }

    #[test]
    fn wide_neighborhoods_are_rejected() {
        // a Moore-style rule must go through the von Neumann reduction first
        use crate::core::{PatternTok, Transition};
        let moore: Vec<Vec<i64>> = (-1..=1)
            .flat_map(|x| (-1..=1).map(move |y| vec![x, y]))
            .collect();
        let rule = RuleTable::new(
            "toy_moore",
            2,
            vec!["0".into(), "1".into()],
            "0",
            moore,
            vec![Transition {
                pattern: vec![PatternTok::Any; 9],
                output: State(0),
            }],
        );
        // the all-wildcard transition makes background non-quiescent only
        // if it changes it; map to 0 keeps quiescence
        let rule = rule.unwrap();
        assert!(matches!(
            compile_pipeline(&rule, None),
            Err(UniversalError::NotVonNeumann)
        ));
    }
}
