//! The four Bell states in the fixed ordering used throughout:
//!
//! ```text
//! |B0> = (|00> + |11>)/sqrt(2)
//! |B1> = (|01> + |10>)/sqrt(2)
//! |B2> = (|01> - |10>)/sqrt(2)      (the singlet)
//! |B3> = (|00> - |11>)/sqrt(2)
//! ```

use crate::linalg::{ComplexMatrix, DensityMatrix, C64, ZERO};

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell state vector |B_j| in the computational basis {00, 01, 10, 11}.
pub fn bell_state(j: usize) -> [C64; 4] {
    assert!(j < 4, "bell index must be 0..=3");
    let h = C64::new(SQRT_HALF, 0.0);
    let mut v = [ZERO; 4];
    match j {
        0 => {
            v[0] = h;
            v[3] = h;
        }
        1 => {
            v[1] = h;
            v[2] = h;
        }
        2 => {
            v[1] = h;
            v[2] = -h;
        }
        _ => {
            v[0] = h;
            v[3] = -h;
        }
    }
    v
}

/// Rank-1 projector |B_j><B_j|.
pub fn bell_projector(j: usize) -> ComplexMatrix {
    let v = bell_state(j);
    ComplexMatrix::outer(&v, &v)
}

/// The singlet density matrix |B2><B2| as a two-qubit state.
pub fn singlet() -> DensityMatrix {
    DensityMatrix::from_pure(&bell_state(2), vec![2, 2]).expect("singlet is a valid state")
}
