//! Analytic landscapes `L(θ) = ⟨φ|exp(iθB) H exp(−iθB)|φ⟩` reconstructed
//! from a handful of samples, and their global optimization.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::pools::GeneratorClass;

/// Values closer than this are treated as equal when breaking ties.
pub const TIE_TOL: f64 = 1e-12;
const GRID_1D: usize = 1024;
const GRID_2D: usize = 256;

/// Sample angles for an involutory generator, in order.
pub const INVOLUTORY_ANGLES: [f64; 2] = [FRAC_PI_4, -FRAC_PI_4];
/// Sample angles for a tripotent generator, in order.
pub const TRIPOTENT_ANGLES: [f64; 4] = [FRAC_PI_2, -FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

/// Angles at which a generator of the given class must be sampled (the
/// shared `θ = 0` value excluded).
pub fn sample_angles(class: GeneratorClass) -> &'static [f64] {
    match class {
        GeneratorClass::Involutory => &INVOLUTORY_ANGLES,
        GeneratorClass::Tripotent => &TRIPOTENT_ANGLES,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum LandscapeModel {
    /// `cos²θ·e0 + ½sin2θ·g + sin²θ·b`, with `g = ⟨i[B,H]⟩`, `b = ⟨BHB⟩`.
    Involutory { e0: f64, g: f64, b: f64 },
    /// `e0 + (cosθ−1)c0 + (1−cosθ)²c1 + sinθ(cosθ−1)c2 + sinθ·g`.
    Tripotent { e0: f64, c0: f64, c1: f64, c2: f64, g: f64 },
}

/// Location and value of an optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub theta: f64,
    pub value: f64,
}

impl LandscapeModel {
    /// Solves for `(g, b)` from `L(π/4)` and `L(−π/4)`.
    pub fn from_involutory_samples(e0: f64, plus: f64, minus: f64) -> Self {
        LandscapeModel::Involutory { e0, g: plus - minus, b: plus + minus - e0 }
    }

    /// Solves for `(c0, c1, c2, g)` from `L(±π/2)` and `L(±π/4)`.
    ///
    /// Even and odd parts decouple: `(L(θ)+L(−θ))/2 − e0` involves only
    /// `c0, c1` and `(L(θ)−L(−θ))/2` only `c2, g`.
    pub fn from_tripotent_samples(
        e0: f64,
        plus_half: f64,
        minus_half: f64,
        plus_quarter: f64,
        minus_quarter: f64,
    ) -> Self {
        let r = FRAC_1_SQRT_2;
        let s2 = 0.5 * (plus_half + minus_half) - e0;
        let s4 = 0.5 * (plus_quarter + minus_quarter) - e0;
        let d2 = 0.5 * (plus_half - minus_half);
        let d4 = 0.5 * (plus_quarter - minus_quarter);
        // even: −c0 + c1 = s2, (r−1)c0 + (1−r)²c1 = s4
        let c0 = (s4 - (1.0 - r) * (1.0 - r) * s2) / (-r * (1.0 - r));
        let c1 = s2 + c0;
        // odd: −c2 + g = d2, r(r−1)c2 + r·g = d4
        let c2 = (d4 / r - d2) / r;
        let g = d2 + c2;
        LandscapeModel::Tripotent { e0, c0, c1, c2, g }
    }

    /// Builds a model from samples ordered as in [`sample_angles`].
    pub fn from_samples(class: GeneratorClass, e0: f64, samples: &[f64]) -> Self {
        match class {
            GeneratorClass::Involutory => Self::from_involutory_samples(e0, samples[0], samples[1]),
            GeneratorClass::Tripotent => {
                Self::from_tripotent_samples(e0, samples[0], samples[1], samples[2], samples[3])
            }
        }
    }

    pub fn class(&self) -> GeneratorClass {
        match self {
            LandscapeModel::Involutory { .. } => GeneratorClass::Involutory,
            LandscapeModel::Tripotent { .. } => GeneratorClass::Tripotent,
        }
    }

    pub fn e0(&self) -> f64 {
        match *self {
            LandscapeModel::Involutory { e0, .. } | LandscapeModel::Tripotent { e0, .. } => e0,
        }
    }

    /// `dL/dθ` at zero, the gradient used by gradient-based selection.
    pub fn gradient(&self) -> f64 {
        match *self {
            LandscapeModel::Involutory { g, .. } | LandscapeModel::Tripotent { g, .. } => g,
        }
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        match *self {
            LandscapeModel::Involutory { e0, g, b } => {
                let (s, c) = theta.sin_cos();
                c * c * e0 + s * c * g + s * s * b
            }
            LandscapeModel::Tripotent { e0, c0, c1, c2, g } => {
                let (s, c) = theta.sin_cos();
                e0 + (c - 1.0) * c0 + (1.0 - c) * (1.0 - c) * c1 + s * (c - 1.0) * c2 + s * g
            }
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match *self {
            LandscapeModel::Involutory { e0, g, b } => {
                let (s2, c2) = (2.0 * theta).sin_cos();
                (b - e0) * s2 + g * c2
            }
            LandscapeModel::Tripotent { c0, c1, c2, g, .. } => {
                let (s, c) = theta.sin_cos();
                -s * c0 + 2.0 * (1.0 - c) * s * c1 + (c * c - c - s * s) * c2 + c * g
            }
        }
    }

    pub fn second_derivative(&self, theta: f64) -> f64 {
        match *self {
            LandscapeModel::Involutory { e0, g, b } => {
                let (s2, c2) = (2.0 * theta).sin_cos();
                2.0 * (b - e0) * c2 - 2.0 * g * s2
            }
            LandscapeModel::Tripotent { c0, c1, c2, g, .. } => {
                let (s, c) = theta.sin_cos();
                -c * c0 + 2.0 * (s * s + c - c * c) * c1 + (s - 4.0 * s * c) * c2 - s * g
            }
        }
    }

    /// The model of `−L`.
    pub fn negated(&self) -> Self {
        match *self {
            LandscapeModel::Involutory { e0, g, b } => LandscapeModel::Involutory { e0: -e0, g: -g, b: -b },
            LandscapeModel::Tripotent { e0, c0, c1, c2, g } => {
                LandscapeModel::Tripotent { e0: -e0, c0: -c0, c1: -c1, c2: -c2, g: -g }
            }
        }
    }

    /// Global minimum over `[−π, π)`. Among minimizers within [`TIE_TOL`]
    /// of each other the one with the smallest `|θ|` is returned, so a flat
    /// landscape yields `θ = 0`.
    pub fn minimize(&self) -> Optimum {
        let candidate = match *self {
            LandscapeModel::Involutory { e0, g, b } => {
                let alpha = 0.5 * (e0 + b);
                let a = 0.5 * (e0 - b);
                let bs = 0.5 * g;
                let r = a.hypot(bs);
                let delta = bs.atan2(a);
                // minimizers θ0 + kπ; the representative in [−π/2, π/2] has the smallest |θ|
                let mut theta = 0.5 * delta + FRAC_PI_2;
                if theta > FRAC_PI_2 {
                    theta -= PI;
                }
                if theta < -FRAC_PI_2 {
                    theta += PI;
                }
                if (theta + FRAC_PI_2).abs() < 1e-15 {
                    theta = FRAC_PI_2;
                }
                Optimum { theta, value: alpha - r }
            }
            LandscapeModel::Tripotent { .. } => self.minimize_grid_newton(),
        };
        let at_zero = self.e0();
        if at_zero - candidate.value <= TIE_TOL {
            Optimum { theta: 0.0, value: at_zero }
        } else {
            candidate
        }
    }

    pub fn maximize(&self) -> Optimum {
        let o = self.negated().minimize();
        Optimum { theta: o.theta, value: -o.value }
    }

    fn minimize_grid_newton(&self) -> Optimum {
        let step = 2.0 * PI / GRID_1D as f64;
        let grid: Vec<f64> = (0..GRID_1D).map(|k| -PI + step * k as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&t| self.evaluate(t)).collect();
        let mut best: Option<Optimum> = None;
        for k in 0..GRID_1D {
            let prev = values[(k + GRID_1D - 1) % GRID_1D];
            let next = values[(k + 1) % GRID_1D];
            if values[k] > prev || values[k] > next {
                continue;
            }
            let theta = self.refine(grid[k], grid[k] - step, grid[k] + step);
            let cand = Optimum { theta: crate::simulator::wrap_angle(theta), value: self.evaluate(theta) };
            best = Some(match best {
                None => cand,
                Some(b) => better(b, cand),
            });
        }
        best.unwrap_or(Optimum { theta: 0.0, value: self.e0() })
    }

    /// Safeguarded Newton iteration on `L'` inside `[lo, hi]`.
    fn refine(&self, start: f64, mut lo: f64, mut hi: f64) -> f64 {
        let (dlo, dhi) = (self.derivative(lo), self.derivative(hi));
        if !(dlo <= 0.0 && dhi >= 0.0) {
            return start;
        }
        let mut theta = start;
        for _ in 0..200 {
            let d = self.derivative(theta);
            if d.abs() < 1e-12 {
                break;
            }
            if d < 0.0 {
                lo = theta;
            } else {
                hi = theta;
            }
            let dd = self.second_derivative(theta);
            let newton = theta - d / dd;
            theta = if dd > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        theta
    }
}

fn better(a: Optimum, b: Optimum) -> Optimum {
    if b.value < a.value - TIE_TOL {
        b
    } else if a.value < b.value - TIE_TOL {
        a
    } else if b.theta.abs() < a.theta.abs() {
        b
    } else {
        a
    }
}

/// Node angles of the 2-D reconstruction grid, per axis.
pub const NODES_2D: [f64; 3] = [0.0, FRAC_PI_4, -FRAC_PI_4];

/// `L(θ1, θ2) = ⟨φ|U† H U|φ⟩` with `U = exp(−iθ2B2)·exp(−iθ1B1)` for two
/// involutory generators: `Σ_jk c[j][k]·f_j(θ1)·f_k(θ2)` over the basis
/// `f = (1, cos2θ, sin2θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeModel2D {
    pub coefficients: [[f64; 3]; 3],
}

/// Location and value of a 2-D optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum2D {
    pub theta1: f64,
    pub theta2: f64,
    pub value: f64,
}

fn basis(theta: f64) -> [f64; 3] {
    let (s, c) = (2.0 * theta).sin_cos();
    [1.0, c, s]
}

fn basis_d1(theta: f64) -> [f64; 3] {
    let (s, c) = (2.0 * theta).sin_cos();
    [0.0, -2.0 * s, 2.0 * c]
}

fn basis_d2(theta: f64) -> [f64; 3] {
    let (s, c) = (2.0 * theta).sin_cos();
    [0.0, -4.0 * c, -4.0 * s]
}

impl LandscapeModel2D {
    /// Reconstructs the surface from its values on the tensor grid
    /// [`NODES_2D`]²; `values[a][b] = L(NODES_2D[a], NODES_2D[b])`.
    pub fn from_grid(values: [[f64; 3]; 3]) -> Self {
        // inverse of F[a][j] = f_j(NODES_2D[a])
        const F_INV: [[f64; 3]; 3] = [[0.0, 0.5, 0.5], [1.0, -0.5, -0.5], [0.0, 0.5, -0.5]];
        let mut tmp = [[0.0; 3]; 3];
        for j in 0..3 {
            for b in 0..3 {
                tmp[j][b] = (0..3).map(|a| F_INV[j][a] * values[a][b]).sum();
            }
        }
        let mut c = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                c[j][k] = (0..3).map(|b| tmp[j][b] * F_INV[k][b]).sum();
            }
        }
        Self { coefficients: c }
    }

    fn contract(&self, u: [f64; 3], v: [f64; 3]) -> f64 {
        self.coefficients.iter().zip(u).map(|(row, uj)| uj * row.iter().zip(v).map(|(c, vk)| c * vk).sum::<f64>()).sum()
    }

    pub fn evaluate(&self, theta1: f64, theta2: f64) -> f64 {
        self.contract(basis(theta1), basis(theta2))
    }

    pub fn gradient(&self, theta1: f64, theta2: f64) -> [f64; 2] {
        let (b1, b2) = (basis(theta1), basis(theta2));
        [self.contract(basis_d1(theta1), b2), self.contract(b1, basis_d1(theta2))]
    }

    pub fn hessian(&self, theta1: f64, theta2: f64) -> [[f64; 2]; 2] {
        let (b1, b2) = (basis(theta1), basis(theta2));
        let h12 = self.contract(basis_d1(theta1), basis_d1(theta2));
        [[self.contract(basis_d2(theta1), b2), h12], [h12, self.contract(b1, basis_d2(theta2))]]
    }

    /// The 1-D model along `θ2 = 0`.
    pub fn slice_first(&self) -> LandscapeModel {
        let e0 = self.evaluate(0.0, 0.0);
        LandscapeModel::from_involutory_samples(e0, self.evaluate(FRAC_PI_4, 0.0), self.evaluate(-FRAC_PI_4, 0.0))
    }

    /// Global minimum, searched on a 256×256 grid over `[−π/2, π/2)²` (the
    /// surface is π-periodic in each angle) and refined by Newton steps.
    /// Ties go to the smaller `|θ1| + |θ2|`, so a flat surface gives `(0, 0)`.
    pub fn minimize(&self) -> Optimum2D {
        let step = PI / GRID_2D as f64;
        let axis: Vec<f64> = (0..GRID_2D).map(|k| -FRAC_PI_2 + step * k as f64).collect();
        let bases: Vec<[f64; 3]> = axis.iter().map(|&t| basis(t)).collect();
        let mut grid = vec![0.0; GRID_2D * GRID_2D];
        for i in 0..GRID_2D {
            for j in 0..GRID_2D {
                grid[i * GRID_2D + j] = self.contract(bases[i], bases[j]);
            }
        }
        let at = |i: usize, j: usize| grid[(i % GRID_2D) * GRID_2D + (j % GRID_2D)];
        let mut best = Optimum2D { theta1: 0.0, theta2: 0.0, value: self.evaluate(0.0, 0.0) };
        for i in 0..GRID_2D {
            for j in 0..GRID_2D {
                let v = at(i, j);
                let is_local_min =
                    (0..3).all(|di| (0..3).all(|dj| at(i + GRID_2D + di - 1, j + GRID_2D + dj - 1) >= v));
                if !is_local_min {
                    continue;
                }
                let cand = self.refine(axis[i], axis[j]);
                best = better_2d(best, cand);
            }
        }
        best
    }

    fn refine(&self, mut t1: f64, mut t2: f64) -> Optimum2D {
        let mut value = self.evaluate(t1, t2);
        for _ in 0..100 {
            let g = self.gradient(t1, t2);
            if g[0].abs().max(g[1].abs()) < 1e-12 {
                break;
            }
            let h = self.hessian(t1, t2);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let (d1, d2) = if h[0][0] > 0.0 && det > 0.0 {
                ((h[1][1] * g[0] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det)
            } else {
                (1e-2 * g[0], 1e-2 * g[1])
            };
            let mut scale = 1.0;
            let mut moved = false;
            while scale > 1e-6 {
                let (n1, n2) = (t1 - scale * d1, t2 - scale * d2);
                let nv = self.evaluate(n1, n2);
                if nv <= value {
                    t1 = n1;
                    t2 = n2;
                    value = nv;
                    moved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !moved {
                break;
            }
        }
        Optimum2D { theta1: fold_half_period(t1), theta2: fold_half_period(t2), value }
    }
}

/// Maps an angle of a π-periodic function into `[−π/2, π/2)`.
fn fold_half_period(theta: f64) -> f64 {
    let t = (theta + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if t >= FRAC_PI_2 {
        -FRAC_PI_2
    } else {
        t
    }
}

fn better_2d(a: Optimum2D, b: Optimum2D) -> Optimum2D {
    if b.value < a.value - TIE_TOL {
        b
    } else if a.value < b.value - TIE_TOL {
        a
    } else if b.theta1.abs() + b.theta2.abs() < a.theta1.abs() + a.theta2.abs() {
        b
    } else {
        a
    }
}
