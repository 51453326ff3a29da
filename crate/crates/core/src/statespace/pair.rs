//! Operators on one spin-1/2 pair.
//!
//! Product basis order is `↑↑, ↑↓, ↓↑, ↓↓`, the first factor being proton 1.
//! The canonical frame is
//!
//! ```text
//! |X⟩ = (↑↑ − ↓↓)/√2   |Y⟩ = (↑↑ + ↓↓)/√2
//! |Z⟩ = (↑↓ + ↓↑)/√2   |Sing⟩ = (↑↓ − ↓↑)/√2
//! ```
//!
//! and state vectors are written in this frame, one factor per triode.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::network::{Axis, Label};

pub type Op4 = Matrix4<Complex64>;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(axis: Axis) -> Matrix2<Complex64> {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match axis {
        Axis::X => Matrix2::new(z, o, o, z),
        Axis::Y => Matrix2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Axis::Z => Matrix2::new(o, z, z, -o),
    }
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Op4 {
    Op4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// `σ_axis` on proton `beta` (1 or 2) in the product basis.
pub fn site_pauli(beta: u8, axis: Axis) -> Op4 {
    let id = Matrix2::identity();
    match beta {
        1 => kron(&pauli(axis), &id),
        2 => kron(&id, &pauli(axis)),
        _ => panic!("proton index must be 1 or 2, got {beta}"),
    }
}

/// `(1 − σ₁σ₂)/2` along `axis`, equal to `1 − s_axis²`.
pub fn qubit_observable(axis: Axis) -> Op4 {
    let pp = site_pauli(1, axis) * site_pauli(2, axis);
    (Op4::identity() - pp).scale(0.5)
}

/// `s_axis²` with `s = (σ₁ + σ₂)/2`.
pub fn spin_component_sq(axis: Axis) -> Op4 {
    let s = (site_pauli(1, axis) + site_pauli(2, axis)).scale(0.5);
    s * s
}

pub fn total_spin_sq() -> Op4 {
    Axis::ALL.iter().map(|&a| spin_component_sq(a)).sum()
}

/// `σ₁·σ₂`.
pub fn spin_dot() -> Op4 {
    Axis::ALL
        .iter()
        .map(|&a| site_pauli(1, a) * site_pauli(2, a))
        .sum()
}

/// Swap of the two tensor factors.
pub fn exchange_operator() -> Op4 {
    let mut m = Op4::zeros();
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = c(1.0, 0.0);
    }
    m
}

/// `P₁₂ = (1 + X₁₂)/2`.
pub fn pair_symmetrizer() -> Op4 {
    (Op4::identity() + exchange_operator()).scale(0.5)
}

/// Frame vectors as columns, in [`Label`] order.
pub fn frame() -> Op4 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (p, m, z) = (c(h, 0.0), c(-h, 0.0), c(0.0, 0.0));
    #[rustfmt::skip]
    let u = Op4::new(
        p, p, z, z,
        z, z, p, p,
        z, z, p, m,
        m, p, z, z,
    );
    u
}

/// Product-basis operator rewritten in the frame.
pub fn to_frame(op: &Op4) -> Op4 {
    let u = frame();
    u.adjoint() * op * u
}

struct FrameTables {
    /// `[beta - 1][axis]`
    site: [[Op4; 3]; 2],
}

/// Entries of the frame Pauli matrices are integers; snap away rounding so
/// that exchange partners cancel exactly.
fn snapped(op: Op4) -> Op4 {
    op.map(|z| {
        let snap = |x: f64| {
            if (x - x.round()).abs() < 1e-12 {
                x.round()
            } else {
                x
            }
        };
        Complex64::new(snap(z.re), snap(z.im))
    })
}

fn tables() -> &'static FrameTables {
    static TABLES: OnceLock<FrameTables> = OnceLock::new();
    TABLES.get_or_init(|| FrameTables {
        site: [1u8, 2].map(|b| Axis::ALL.map(|a| snapped(to_frame(&site_pauli(b, a))))),
    })
}

/// `σ_axis` on proton `beta`, in the frame.
pub fn frame_site_pauli(beta: u8, axis: Axis) -> &'static Op4 {
    &tables().site[usize::from(beta - 1)][axis.index()]
}

/// `B·σ(β)` in the frame.
pub fn frame_field_coupling(beta: u8, field: [f64; 3]) -> Op4 {
    Axis::ALL
        .iter()
        .map(|&a| frame_site_pauli(beta, a).scale(field[a.index()]))
        .sum()
}

pub fn frame_index(label: Label) -> usize {
    label.index()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: &Op4, b: &Op4) -> bool {
        (a - b).iter().all(|z| z.norm() <= TOL)
    }

    fn diag_of(op: &Op4) -> [f64; 4] {
        assert!(is_diagonal(op));
        [0, 1, 2, 3].map(|i| op[(i, i)].re)
    }

    fn is_diagonal(op: &Op4) -> bool {
        (0..4).all(|r| (0..4).all(|k| r == k || op[(r, k)].norm() <= TOL))
            && (0..4).all(|i| op[(i, i)].im.abs() <= TOL)
    }

    #[test]
    fn frame_is_unitary() {
        let u = frame();
        assert!(close(&(u.adjoint() * u), &Op4::identity()));
    }

    #[test]
    fn observables_are_diagonal_with_table_signatures() {
        for axis in Axis::ALL {
            let d = diag_of(&to_frame(&qubit_observable(axis)));
            for label in Label::ALL {
                let expect = f64::from(label.bit(axis));
                assert!(
                    (d[label.index()] - expect).abs() <= TOL,
                    "{axis:?} {label:?}"
                );
            }
        }
    }

    #[test]
    fn z_observable_eigenvalues() {
        let d = diag_of(&to_frame(&qubit_observable(Axis::Z)));
        assert_eq!(d.map(|v| v.round()), [0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn observable_identities() {
        let q = Axis::ALL.map(qubit_observable);
        for a in 0..3 {
            assert!(close(&(q[a] * q[a]), &q[a]));
            for b in 0..3 {
                assert!(close(&(q[a] * q[b]), &(q[b] * q[a])));
            }
            assert!(close(
                &q[a],
                &(Op4::identity() - spin_component_sq(Axis::ALL[a]))
            ));
            let x = exchange_operator();
            assert!(close(&(x * q[a]), &(q[a] * x)));
        }
        let sum = q[0] + q[1] + q[2];
        let rhs = (Op4::identity().scale(3.0) - spin_dot()).scale(0.5);
        assert!(close(&sum, &rhs));
        assert_eq!(
            diag_of(&to_frame(&sum)).map(|v| v.round()),
            [1.0, 1.0, 1.0, 3.0]
        );
    }

    #[test]
    fn total_spin() {
        let d = diag_of(&to_frame(&total_spin_sq()));
        for (i, &v) in d.iter().enumerate() {
            let s = if i == 3 { 0.0 } else { 1.0 };
            assert!((v - s * (s + 1.0)).abs() <= TOL);
        }
    }

    #[test]
    fn mod_two_relation() {
        let q = Axis::ALL.map(|a| diag_of(&to_frame(&qubit_observable(a))));
        for ((qx, qy), qz) in q[0].iter().zip(&q[1]).zip(&q[2]) {
            let [x, y, z] = [qx, qy, qz].map(|v| v.round() as i64);
            assert_eq!(x, (y + z + 1) % 2);
        }
    }

    #[test]
    fn exchange_and_symmetrizer() {
        let x = exchange_operator();
        // X|↑↓⟩ = |↓↑⟩
        assert_eq!(x[(2, 1)], c(1.0, 0.0));
        let d = diag_of(&to_frame(&x));
        assert_eq!(d.map(|v| v.round()), [1.0, 1.0, 1.0, -1.0]);
        let p = pair_symmetrizer();
        assert!(close(&(p * p), &p));
        let pf = diag_of(&to_frame(&p));
        assert_eq!(pf.map(|v| v.round()), [1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn site_couplings_are_exchange_partners() {
        let x = to_frame(&exchange_operator());
        for a in Axis::ALL {
            let s1 = frame_site_pauli(1, a);
            let s2 = frame_site_pauli(2, a);
            assert!(close(&(x * s1 * x), s2));
            assert!(close(s1, &s1.adjoint()));
            assert!(close(s1, &to_frame(&site_pauli(1, a))));
            // triplet-singlet entries of σ(1) + σ(2) cancel exactly
            let sum = s1 + s2;
            for k in 0..3 {
                assert_eq!(sum[(k, 3)], c(0.0, 0.0));
                assert_eq!(sum[(3, k)], c(0.0, 0.0));
            }
        }
    }
}
