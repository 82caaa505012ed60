//! Three tiny reference games used as running examples across the
//! workspace's tests and docs.

use crate::game::{Objective, Smg};
use crate::rational::rat;

/// One player, one vertex `v` with a self-loop, Büchi `{v}`.
/// The only play wins, so every analysis on it has a forced outcome.
pub fn g1() -> Smg {
    Smg::from_parts(
        1,
        vec![("v".to_owned(), Some(0))],
        vec![(0, 0, None)],
        vec![Objective::Buchi([0].into())],
    )
    .expect("g1 is valid")
}

/// One player, a stochastic coin flip `v0` into absorbing `a` / `b`,
/// Büchi `{a}`. From `v0` the objective is met with probability 1/2.
/// Vertex ids: a = 0, b = 1, v0 = 2.
pub fn g2() -> Smg {
    Smg::from_parts(
        1,
        vec![
            ("a".to_owned(), Some(0)),
            ("b".to_owned(), Some(0)),
            ("v0".to_owned(), None),
        ],
        vec![
            (0, 0, None),
            (1, 1, None),
            (2, 0, Some(rat(1, 2))),
            (2, 1, Some(rat(1, 2))),
        ],
        vec![Objective::Buchi([0].into())],
    )
    .expect("g2 is valid")
}

/// [`g2`] plus an owned vertex `c` choosing between the coin flip `v0`
/// and the losing sink `b` — the smallest game with a real decision.
/// Vertex ids: a = 0, b = 1, c = 2, v0 = 3.
pub fn g2_with_choice() -> Smg {
    Smg::from_parts(
        1,
        vec![
            ("a".to_owned(), Some(0)),
            ("b".to_owned(), Some(0)),
            ("c".to_owned(), Some(0)),
            ("v0".to_owned(), None),
        ],
        vec![
            (0, 0, None),
            (1, 1, None),
            (2, 3, None),
            (2, 1, None),
            (3, 0, Some(rat(1, 2))),
            (3, 1, Some(rat(1, 2))),
        ],
        vec![Objective::Buchi([0].into())],
    )
    .expect("g2_with_choice is valid")
}
