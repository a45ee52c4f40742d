//! Published reference values used by the `tables` reproduction command.

/// Penalty-pattern matrix of the 4-node (3 patients + depot) routing
/// example, rows and columns ordered `x_0_1, x_0_2, .., x_3_2`.
pub const WORKED_Q: [[f64; 12]; 12] = [
    [0., 4., 4., 0., 2., 2., 0., 2., 2., 0., 2., 2.],
    [0., 0., 4., 0., 2., 2., 0., 2., 2., 0., 2., 2.],
    [0., 0., 0., 0., 2., 2., 0., 2., 2., 0., 2., 2.],
    [0., 0., 0., 0., 2., 2., 4., 2., 2., 4., 2., 2.],
    [0., 0., 0., 0., 0., 4., 2., 2., 4., 2., 2., 4.],
    [0., 0., 0., 0., 0., 0., 2., 2., 4., 2., 2., 2.],
    [0., 0., 0., 0., 0., 0., 0., 2., 2., 4., 2., 2.],
    [0., 0., 0., 0., 0., 0., 0., 0., 4., 2., 4., 4.],
    [0., 0., 0., 0., 0., 0., 0., 0., 0., 2., 2., 2.],
    [0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 2., 2.],
    [0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 4.],
    [0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
];

/// External field of [`WORKED_Q`].
pub const WORKED_H: [f64; 12] = [5.0, 5.0, 5.0, 5.0, 7.0, 6.5, 5.0, 7.0, 7.0, 4.5, 6.5, 7.0];

/// Picking-robot qubit counts for `n = 2..=12` items, one robot, 45 kg.
pub const QROBOT_QUBITS: [(usize, usize); 11] = [
    (2, 18),
    (3, 26),
    (4, 36),
    (5, 48),
    (6, 62),
    (7, 78),
    (8, 96),
    (9, 116),
    (10, 138),
    (11, 162),
    (12, 188),
];

pub const QROBOT_CAPACITY: u32 = 45;

pub fn worked_q_rows() -> Vec<Vec<f64>> {
    WORKED_Q.iter().map(|r| r.to_vec()).collect()
}
