//! Expression-shape rewrites applied while a circuit is being built.

/// `x^n` by recursive halving: ⌊log2 n⌋ squarings plus one multiply per
/// extra set bit of `n`.
pub fn pow_by_squaring<T: Clone, E>(
    x: &T,
    n: u32,
    one: &mut impl FnMut() -> Result<T, E>,
    mul: &mut impl FnMut(&T, &T) -> Result<T, E>,
) -> Result<T, E> {
    match n {
        0 => one(),
        1 => Ok(x.clone()),
        _ => {
            let half = pow_by_squaring(x, n / 2, one, mul)?;
            let sq = mul(&half, &half)?;
            if n % 2 == 1 {
                mul(&sq, x)
            } else {
                Ok(sq)
            }
        }
    }
}

/// `x^n` as a left-leaning chain of `n - 1` multiplies.
pub fn pow_linear<T: Clone, E>(
    x: &T,
    n: u32,
    one: &mut impl FnMut() -> Result<T, E>,
    mul: &mut impl FnMut(&T, &T) -> Result<T, E>,
) -> Result<T, E> {
    if n == 0 {
        return one();
    }
    let mut acc = x.clone();
    for _ in 1..n {
        acc = mul(&acc, x)?;
    }
    Ok(acc)
}

/// Combine `leaves` pairwise, level by level: `L - 1` combines in a tree of
/// depth ⌈log2 L⌉. Returns `None` for no leaves.
pub fn tree_reduce<T, E>(
    leaves: Vec<T>,
    combine: &mut impl FnMut(T, T) -> Result<T, E>,
) -> Result<Option<T>, E> {
    let mut level = leaves;
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)?),
                None => next.push(a),
            }
        }
        level = next;
    }
    Ok(level.into_iter().next())
}
