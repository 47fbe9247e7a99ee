//! The single-qubit Pauli and Clifford groups.
//!
//! The 24 Cliffords (modulo global phase) are enumerated once, breadth-first from the
//! identity under the generators `H` and `S`, and indexed by their conjugation action
//! on `X` and `Z`. Composition and inversion are table lookups.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn dagger(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Removes the global phase by making the first significant entry real and positive.
fn normalize_phase(a: &Mat2) -> Mat2 {
    let pivot = a
        .iter()
        .flatten()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    a.map(|row| row.map(|z| z * phase))
}

/// Single-qubit Pauli operator (phase-free).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Projector onto the `(-1)^outcome` eigenspace.
    pub fn eigenprojector(self, outcome: u8) -> Mat2 {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let p = self.matrix();
        let id = Pauli::I.matrix();
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = (id[i][j] + p[i][j] * sign) * 0.5;
            }
        }
        out
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Matches `m` against `±P`; returns `(negative, P)`.
    fn identify(m: &Mat2) -> Option<(bool, Pauli)> {
        for p in Pauli::ALL {
            let pm = p.matrix();
            if max_abs_diff(m, &pm) < 1e-9 {
                return Some((false, p));
            }
            let neg = pm.map(|row| row.map(|z| -z));
            if max_abs_diff(m, &neg) < 1e-9 {
                return Some((true, p));
            }
        }
        None
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

struct Table {
    mats: Vec<Mat2>,
    // conjugation images C P C^dagger for P = X, Y, Z
    images: Vec<[(bool, Pauli); 3]>,
    compose: Vec<[u8; 24]>,
    inverse: [u8; 24],
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> Table {
    let h = [
        [ONE * FRAC_1_SQRT_2, ONE * FRAC_1_SQRT_2],
        [ONE * FRAC_1_SQRT_2, -ONE * FRAC_1_SQRT_2],
    ];
    let s = [[ONE, ZERO], [ZERO, I]];
    let gens = [h, s];

    let mut mats: Vec<Mat2> = vec![Pauli::I.matrix()];
    let mut images: Vec<[(bool, Pauli); 3]> = vec![conjugation_images(&mats[0])];
    let mut head = 0;
    while head < mats.len() {
        let cur = mats[head];
        head += 1;
        for g in &gens {
            let next = normalize_phase(&mat_mul(g, &cur));
            let img = conjugation_images(&next);
            if !images.contains(&img) {
                mats.push(next);
                images.push(img);
            }
        }
    }
    assert_eq!(
        mats.len(),
        24,
        "single-qubit Clifford group must have 24 elements"
    );

    let lookup = |m: &Mat2| -> u8 {
        let img = conjugation_images(m);
        images
            .iter()
            .position(|x| *x == img)
            .expect("closed under multiplication") as u8
    };
    let compose: Vec<[u8; 24]> = (0..24)
        .map(|a| {
            let mut row = [0u8; 24];
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = lookup(&mat_mul(&mats[a], &mats[b]));
            }
            row
        })
        .collect();
    let mut inverse = [0u8; 24];
    for (a, inv) in inverse.iter_mut().enumerate() {
        *inv = (0..24u8)
            .find(|&b| compose[a][b as usize] == 0)
            .expect("group element has inverse");
    }
    Table {
        mats,
        images,
        compose,
        inverse,
    }
}

fn conjugation_images(c: &Mat2) -> [(bool, Pauli); 3] {
    let cd = dagger(c);
    [Pauli::X, Pauli::Y, Pauli::Z].map(|p| {
        let m = mat_mul(&mat_mul(c, &p.matrix()), &cd);
        Pauli::identify(&m).expect("Clifford maps Paulis to Paulis")
    })
}

/// Element of the single-qubit Clifford group modulo global phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clifford(u8);

impl Clifford {
    pub const IDENTITY: Clifford = Clifford(0);

    /// All 24 elements in canonical order.
    pub fn all() -> impl Iterator<Item = Clifford> {
        (0..24u8).map(Clifford)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn from_index(i: u8) -> Option<Self> {
        (i < 24).then_some(Clifford(i))
    }

    /// Identifies a 2x2 unitary as a Clifford, if it is one.
    pub fn from_matrix(m: &Mat2) -> Option<Self> {
        let u = mat_mul(m, &dagger(m));
        if max_abs_diff(&u, &Pauli::I.matrix()) > 1e-9 {
            return None;
        }
        let cd = dagger(m);
        let mut img = [(false, Pauli::I); 3];
        for (slot, p) in img.iter_mut().zip([Pauli::X, Pauli::Y, Pauli::Z]) {
            *slot = Pauli::identify(&mat_mul(&mat_mul(m, &p.matrix()), &cd))?;
        }
        table()
            .images
            .iter()
            .position(|x| *x == img)
            .map(|i| Clifford(i as u8))
    }

    pub fn pauli(p: Pauli) -> Self {
        Self::from_matrix(&p.matrix()).expect("Paulis are Cliffords")
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self::from_matrix(&[[ONE * h, ONE * h], [ONE * h, -ONE * h]]).expect("H is Clifford")
    }

    /// Phase gate `diag(1, i)`.
    pub fn phase() -> Self {
        Self::from_matrix(&[[ONE, ZERO], [ZERO, I]]).expect("S is Clifford")
    }

    /// Correction after a Y measurement with outcome `k`:
    /// `sqrt((-1)^k (-i Z)) = (1 - (-1)^k i Z) / sqrt(2)`.
    pub fn y_correction(k: u8) -> Self {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let r = FRAC_1_SQRT_2;
        let m = [[(ONE - I * sign) * r, ZERO], [ZERO, (ONE + I * sign) * r]];
        Self::from_matrix(&m).expect("u_y is Clifford")
    }

    /// Correction after a Z measurement with outcome `k`: `Z^k`.
    pub fn z_correction(k: u8) -> Self {
        if k == 0 {
            Self::IDENTITY
        } else {
            Self::pauli(Pauli::Z)
        }
    }

    /// Canonical unitary representative (global phase fixed).
    pub fn matrix(self) -> Mat2 {
        table().mats[self.0 as usize]
    }

    pub fn inverse(self) -> Self {
        Clifford(table().inverse[self.0 as usize])
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// `C P C^dagger = (-1)^neg Q`, returned as `(neg, Q)`.
    pub fn conjugate(self, p: Pauli) -> (bool, Pauli) {
        match p {
            Pauli::I => (false, Pauli::I),
            Pauli::X => table().images[self.0 as usize][0],
            Pauli::Y => table().images[self.0 as usize][1],
            Pauli::Z => table().images[self.0 as usize][2],
        }
    }

    /// `C^dagger P C`, i.e. the Pauli that `P` measures on the pre-image of this frame.
    pub fn pull_back(self, p: Pauli) -> (bool, Pauli) {
        self.inverse().conjugate(p)
    }
}

impl Mul for Clifford {
    type Output = Clifford;

    /// Matrix product: `(a * b)` applies `b` first.
    fn mul(self, rhs: Clifford) -> Clifford {
        Clifford(table().compose[self.0 as usize][rhs.0 as usize])
    }
}

impl fmt::Debug for Clifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, _, z] = table().images[self.0 as usize];
        let sign = |neg: bool| if neg { '-' } else { '+' };
        write!(
            f,
            "C{}[X->{}{},Z->{}{}]",
            self.0,
            sign(x.0),
            x.1,
            sign(z.0),
            z.1
        )
    }
}
