//! Array access at a private index.

use crate::hir::{GateKind, NodeId};

use super::builder::Builder;
use super::LowerError;

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

/// Select `arr[idx]` with a balanced tree of `Lt`-guarded muxes: `L - 1`
/// muxes on `⌈log2 L⌉` levels. Out-of-range indices select an end element.
pub fn lower_private_index(
    b: &mut Builder,
    arr: &[NodeId],
    idx: NodeId,
) -> Result<NodeId, LowerError> {
    if arr.is_empty() {
        return Err(LowerError::EmptyArray);
    }
    select(b, arr, 0, idx)
}

fn select(
    b: &mut Builder,
    arr: &[NodeId],
    offset: usize,
    idx: NodeId,
) -> Result<NodeId, LowerError> {
    if arr.len() == 1 {
        return Ok(arr[0]);
    }
    let left = 1usize << (ceil_log2(arr.len()) - 1);
    let pivot = b.konst((offset + left) as i64);
    let in_left = b.gate(GateKind::Lt, vec![idx, pivot])?;
    let l = select(b, &arr[..left], offset, idx)?;
    let r = select(b, &arr[left..], offset + left, idx)?;
    b.mux(in_left, l, r)
}

/// Copy of `arr` with `arr[idx] = val`: one `Eq` and one mux per element.
pub fn lower_private_update(
    b: &mut Builder,
    arr: &[NodeId],
    idx: NodeId,
    val: NodeId,
) -> Result<Vec<NodeId>, LowerError> {
    if arr.is_empty() {
        return Err(LowerError::EmptyArray);
    }
    let mut out = Vec::with_capacity(arr.len());
    for (k, &old) in arr.iter().enumerate() {
        let pos = b.konst(k as i64);
        let hit = b.gate(GateKind::Eq, vec![idx, pos])?;
        out.push(b.mux(hit, val, old)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{interpret_clear, InputValues};
    use crate::hir::Circuit;
    use crate::typecheck::{OwnerSet, Scheme};

    fn mux_depth(c: &Circuit, id: NodeId) -> usize {
        let n = c.node(id);
        match n.kind {
            GateKind::Mux => 1 + mux_depth(c, n.operands[1]).max(mux_depth(c, n.operands[2])),
            _ => 0,
        }
    }

    fn setup(len: usize) -> (Builder, Vec<NodeId>, NodeId) {
        let mut b = Builder::new(16, Scheme::Generic, OwnerSet::singleton(0), false);
        let arr: Vec<_> = (0..len).map(|i| b.input(0, format!("a[{i}]"))).collect();
        let idx = b.input(0, "i".into());
        (b, arr, idx)
    }

    #[test]
    fn selector_depth_is_ceil_log2() {
        for len in 1..=64 {
            let (mut b, arr, idx) = setup(len);
            let before = b.circuit.len();
            let r = lower_private_index(&mut b, &arr, idx).unwrap();
            let expected = if len == 1 { 0 } else { ceil_log2(len) as usize };
            assert_eq!(mux_depth(&b.circuit, r), expected, "L={len}");
            assert_eq!(b.circuit.count(GateKind::Mux), len - 1);
            if len == 1 {
                assert_eq!(b.circuit.len(), before);
                assert_eq!(r, arr[0]);
            }
        }
    }

    #[test]
    fn index_and_update_values() {
        let (mut b, arr, idx) = setup(3);
        let v = b.input(0, "v".into());
        let got = lower_private_index(&mut b, &arr, idx).unwrap();
        let updated = lower_private_update(&mut b, &arr, idx, v).unwrap();
        assert_eq!(b.circuit.count(GateKind::Eq), 3);
        let mut outs = vec![got];
        outs.extend(updated);
        for (k, o) in outs.into_iter().enumerate() {
            let r = b.reveal(o, OwnerSet::singleton(0));
            b.output(r, OwnerSet::singleton(0), format!("o{k}"));
        }
        let c = b.finish();
        for i in 0..3 {
            let mut inputs = InputValues::new();
            inputs.insert_array(0, "a", &[10, 20, 30]);
            inputs.insert(0, "i", i);
            inputs.insert(0, "v", 99);
            let out = interpret_clear(&c, &inputs).unwrap();
            assert_eq!(out["o0"], [10, 20, 30][i as usize]);
            for k in 0..3 {
                let expected = if k == i { 99 } else { [10, 20, 30][k as usize] };
                assert_eq!(out[&format!("o{}", k + 1)], expected);
            }
        }
    }
}
