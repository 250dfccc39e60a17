//! Exact single-qubit linear algebra.
//!
//! States are pairs of complex amplitudes and gates are 2×2 unitaries. The
//! general layer rotation is the ZYZ Euler product `Rz(a)·Ry(b)·Rz(c)`.
//! None of the metrics here normalize away the global phase; they are
//! phase-invariant by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Accepted deviation of `|amp0|² + |amp1|²` from one for caller-supplied
/// states.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized single-qubit pure state `amp0|0⟩ + amp1|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amp0: Complex64,
    amp1: Complex64,
}

impl QubitState {
    /// Builds a state from amplitudes, rejecting non-normalized input.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let state = Self { amp0, amp1 };
        state.check_normalized()?;
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize amplitudes ({amp0}, {amp1})"
            )));
        }
        Ok(Self {
            amp0: amp0 / norm,
            amp1: amp1 / norm,
        })
    }

    pub(crate) const fn from_amplitudes_unchecked(amp0: Complex64, amp1: Complex64) -> Self {
        Self { amp0, amp1 }
    }

    /// `|0⟩`, the north pole of the Bloch sphere.
    pub const fn zero() -> Self {
        Self::from_amplitudes_unchecked(ONE, ZERO)
    }

    /// `|1⟩`, the south pole of the Bloch sphere.
    pub const fn one() -> Self {
        Self::from_amplitudes_unchecked(ZERO, ONE)
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_amplitudes_unchecked(Complex64::new(h, 0.0), Complex64::new(h, 0.0))
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }

    /// Probability of measuring `|0⟩`.
    pub fn p_zero(&self) -> f64 {
        self.amp0.norm_sqr()
    }

    /// Probability of measuring `|1⟩`.
    pub fn p_one(&self) -> f64 {
        self.amp1.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// The same physical state multiplied by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        Self::from_amplitudes_unchecked(self.amp0 * phase, self.amp1 * phase)
    }

    fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE || !n.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized: |amp0|^2 + |amp1|^2 = {n}"
            )));
        }
        Ok(())
    }
}

/// A 2×2 complex matrix stored row-major. Constructors in this module only
/// produce unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub const fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Wraps raw entries after checking `U†U = I` within `tol`.
    pub fn from_rows(m: [[Complex64; 2]; 2], tol: f64) -> Result<Self> {
        let u = Self { m };
        let err = u.unitarity_error();
        if err > tol || !err.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (max |U†U - I| = {err:e})"
            )));
        }
        Ok(u)
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entrywise modulus of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Self::identity();
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.m[r][c] - id.m[r][c]).norm());
            }
        }
        worst
    }

    /// Matrix-vector product on a state.
    pub fn apply(&self, s: &QubitState) -> QubitState {
        QubitState::from_amplitudes_unchecked(
            self.m[0][0] * s.amp0 + self.m[0][1] * s.amp1,
            self.m[1][0] * s.amp0 + self.m[1][1] * s.amp1,
        )
    }
}

/// Bloch-sphere coordinates of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let dx = self.rx - other.rx;
        let dy = self.ry - other.ry;
        let dz = self.rz - other.rz;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

fn check_finite(name: &str, angle: f64) -> Result<()> {
    if angle.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} angle must be finite, got {angle}")))
    }
}

pub(crate) fn rotation_y_unchecked(angle: f64) -> Unitary2 {
    let (s, c) = (angle * 0.5).sin_cos();
    Unitary2 {
        m: [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
    }
}

pub(crate) fn rotation_z_unchecked(angle: f64) -> Unitary2 {
    let (s, c) = (angle * 0.5).sin_cos();
    Unitary2 {
        m: [
            [Complex64::new(c, -s), ZERO],
            [ZERO, Complex64::new(c, s)],
        ],
    }
}

/// `Rz(a)·Ry(b)·Rz(c)` written out in closed form.
pub(crate) fn su2_unchecked(a: f64, b: f64, c: f64) -> Unitary2 {
    let (sb, cb) = (b * 0.5).sin_cos();
    let plus = Complex64::from_polar(1.0, -(a + c) * 0.5);
    let minus = Complex64::from_polar(1.0, (c - a) * 0.5);
    Unitary2 {
        m: [
            [plus * cb, -minus * sb],
            [minus.conj() * sb, plus.conj() * cb],
        ],
    }
}

/// `[[cos(a/2), −sin(a/2)], [sin(a/2), cos(a/2)]]`.
pub fn rotation_y(angle: f64) -> Result<Unitary2> {
    check_finite("rotation_y", angle)?;
    Ok(rotation_y_unchecked(angle))
}

/// `diag(e^{−ia/2}, e^{+ia/2})`.
pub fn rotation_z(angle: f64) -> Result<Unitary2> {
    check_finite("rotation_z", angle)?;
    Ok(rotation_z_unchecked(angle))
}

/// General single-qubit rotation `Rz(a)·Ry(b)·Rz(c)`.
pub fn su2(a: f64, b: f64, c: f64) -> Result<Unitary2> {
    check_finite("su2 first", a)?;
    check_finite("su2 second", b)?;
    check_finite("su2 third", c)?;
    Ok(su2_unchecked(a, b, c))
}

pub fn apply(u: &Unitary2, s: &QubitState) -> QubitState {
    u.apply(s)
}

/// `|⟨t|s⟩|²`.
pub fn fidelity(s: &QubitState, t: &QubitState) -> Result<f64> {
    s.check_normalized()?;
    t.check_normalized()?;
    let overlap = t.amp0.conj() * s.amp0 + t.amp1.conj() * s.amp1;
    Ok(overlap.norm_sqr().min(1.0))
}

pub fn bloch_vector(s: &QubitState) -> BlochVector {
    let cross = s.amp0 * s.amp1.conj();
    BlochVector {
        rx: 2.0 * cross.re,
        ry: 2.0 * (s.amp0.conj() * s.amp1).im,
        rz: s.amp0.norm_sqr() - s.amp1.norm_sqr(),
    }
}

/// Half the Euclidean distance between the two Bloch vectors.
pub fn trace_distance(s: &QubitState, t: &QubitState) -> Result<f64> {
    s.check_normalized()?;
    t.check_normalized()?;
    Ok((0.5 * bloch_vector(s).distance(&bloch_vector(t))).min(1.0))
}
