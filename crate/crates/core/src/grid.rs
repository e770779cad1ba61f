//! Periodic grids on the flat torus `Cⁿ/(Zⁿ + iZⁿ)` and real differentiation
//! along grid axes.
//!
//! Real axes are ordered `x₁, y₁, …, xₙ, yₙ`, and point indices are row-major in
//! that order (the last axis varies fastest).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicGrid {
    n: usize,
    size: usize,
}

impl PeriodicGrid {
    /// `n ∈ {1, 2}` complex dimensions, `size` points per real axis (even, ≥ 8).
    pub fn new(n: usize, size: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(domain(format!("complex dimension {n} not in {{1, 2}}")));
        }
        if size < 8 || size % 2 != 0 {
            return Err(domain(format!("grid size {size} must be even and at least 8")));
        }
        Ok(PeriodicGrid { n, size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.size as f64
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.real_dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn stride(&self, axis: usize) -> usize {
        self.size.pow((self.real_dim() - 1 - axis) as u32)
    }

    /// Integer coordinate of point `p` along `axis`.
    pub fn coord(&self, p: usize, axis: usize) -> usize {
        (p / self.stride(axis)) % self.size
    }

    /// Real coordinates `(x₁, y₁, …)` of point `p`, in `[0, 1)`.
    pub fn point(&self, p: usize) -> Vec<f64> {
        (0..self.real_dim()).map(|a| self.coord(p, a) as f64 * self.spacing()).collect()
    }

    /// Index of the point `offset` steps from `p` along `axis`, wrapping.
    pub fn shift(&self, p: usize, axis: usize, offset: isize) -> usize {
        let s = self.stride(axis);
        let c = self.coord(p, axis) as isize;
        let m = self.size as isize;
        let to = (c + offset).rem_euclid(m);
        (p as isize + (to - c) * s as isize) as usize
    }

    /// Samples `f` at every grid point.
    pub fn sample(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|p| f(&self.point(p))).collect()
    }

    pub fn x_axis(i: usize) -> usize {
        2 * i
    }

    pub fn y_axis(i: usize) -> usize {
        2 * i + 1
    }
}

/// Real scalar values on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!("field has {} values, grid has {}", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("field contains non-finite values"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        ScalarField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl FnMut(&[f64]) -> f64) -> Self {
        ScalarField { grid, values: grid.sample(f) }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Copy with the mean subtracted.
    pub fn normalized(&self) -> Self {
        let m = self.mean();
        ScalarField { grid: self.grid, values: self.values.iter().map(|v| v - m).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Discretization {
    /// Second-order centered differences.
    #[default]
    Fd2,
    /// Fourier collocation.
    Spectral,
}

/// Periodic stencil: `(Df)(j) = Σ coef · f(j + offset)`.
type Stencil = Vec<(isize, f64)>;

/// Differentiation operators for one grid and discretization.
#[derive(Clone, Debug)]
pub struct Differ {
    grid: PeriodicGrid,
    disc: Discretization,
    first: Stencil,
    second: Stencil,
}

impl Differ {
    pub fn new(grid: PeriodicGrid, disc: Discretization) -> Self {
        let m = grid.size();
        let dx = grid.spacing();
        let (first, second) = match disc {
            Discretization::Fd2 => (
                vec![(-1, -0.5 / dx), (1, 0.5 / dx)],
                vec![(-1, 1.0 / (dx * dx)), (0, -2.0 / (dx * dx)), (1, 1.0 / (dx * dx))],
            ),
            Discretization::Spectral => {
                let h = 2.0 * PI / m as f64;
                let scale = 2.0 * PI;
                let mut first = Vec::with_capacity(m);
                let mut second = Vec::with_capacity(m);
                second.push((0, -(PI * PI / (3.0 * h * h) + 1.0 / 6.0) * scale * scale));
                for off in 1..m {
                    let sign = if off % 2 == 0 { 1.0 } else { -1.0 };
                    let half = off as f64 * h / 2.0;
                    let sin = libm::sin(half);
                    first.push((off as isize, -0.5 * sign * libm::cos(half) / sin * scale));
                    second.push((off as isize, -0.5 * sign / (sin * sin) * scale * scale));
                }
                (first, second)
            }
        };
        Differ { grid, disc, first, second }
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn discretization(&self) -> Discretization {
        self.disc
    }

    fn apply(&self, f: &[f64], axis: usize, stencil: &Stencil) -> Vec<f64> {
        let s = self.grid.stride(axis);
        let m = self.grid.size() as isize;
        (0..f.len())
            .map(|p| {
                let c = ((p / s) % m as usize) as isize;
                let base = p - c as usize * s;
                stencil
                    .iter()
                    .map(|&(o, coef)| coef * f[base + (c + o).rem_euclid(m) as usize * s])
                    .sum()
            })
            .collect()
    }

    /// `∂f/∂(axis)`.
    pub fn d1(&self, f: &[f64], axis: usize) -> Vec<f64> {
        self.apply(f, axis, &self.first)
    }

    /// `∂²f/∂(a)∂(b)`; pure second derivatives use the second-order stencil and
    /// mixed ones compose first derivatives.
    pub fn d2(&self, f: &[f64], a: usize, b: usize) -> Vec<f64> {
        if a == b {
            self.apply(f, a, &self.second)
        } else {
            self.d1(&self.d1(f, b), a)
        }
    }

    /// All second derivatives `D[a][b]`, `a ≤ b`, stored symmetrically.
    pub fn all_second(&self, f: &[f64]) -> Vec<Vec<Vec<f64>>> {
        let d = self.grid.real_dim();
        let mut out = vec![vec![Vec::new(); d]; d];
        for a in 0..d {
            for b in a..d {
                let v = self.d2(f, a, b);
                if a != b {
                    out[b][a] = v.clone();
                }
                out[a][b] = v;
            }
        }
        out
    }

    /// Spectral radius bound of the discrete Laplacian `Σ_axes ∂²`, per axis.
    pub fn second_radius_per_axis(&self) -> f64 {
        let dx = self.grid.spacing();
        match self.disc {
            Discretization::Fd2 => 4.0 / (dx * dx),
            Discretization::Spectral => PI * PI / (dx * dx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PeriodicGrid::new(3, 16).is_err());
        assert!(PeriodicGrid::new(1, 6).is_err());
        assert!(PeriodicGrid::new(1, 9).is_err());
        let g = PeriodicGrid::new(2, 8).unwrap();
        assert_eq!(g.len(), 4096);
    }

    #[test]
    fn shifts_wrap() {
        let g = PeriodicGrid::new(2, 8).unwrap();
        for p in [0, 17, 4095, 1234] {
            for a in 0..4 {
                assert_eq!(g.shift(g.shift(p, a, 3), a, -3), p);
                assert_eq!(g.shift(p, a, 8), p);
                let q = g.shift(p, a, 1);
                assert_eq!(g.coord(q, a), (g.coord(p, a) + 1) % 8);
                for b in (0..4).filter(|&b| b != a) {
                    assert_eq!(g.coord(q, b), g.coord(p, b));
                }
            }
        }
    }

    fn wave(g: PeriodicGrid) -> Vec<f64> {
        g.sample(|x| libm::sin(2.0 * PI * x[0]) + libm::cos(4.0 * PI * x[1]))
    }

    #[test]
    fn fd2_second_order() {
        let mut errs = Vec::new();
        for m in [16, 32] {
            let g = PeriodicGrid::new(1, m).unwrap();
            let d = Differ::new(g, Discretization::Fd2);
            let f = wave(g);
            let fx = d.d1(&f, 0);
            let exact = g.sample(|x| 2.0 * PI * libm::cos(2.0 * PI * x[0]));
            errs.push(fx.iter().zip(&exact).fold(0.0_f64, |e, (a, b)| e.max((a - b).abs())));
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn spectral_exact_for_resolved_modes() {
        let g = PeriodicGrid::new(1, 16).unwrap();
        let d = Differ::new(g, Discretization::Spectral);
        let f = wave(g);
        let fyy = d.d2(&f, 1, 1);
        let exact = g.sample(|x| -16.0 * PI * PI * libm::cos(4.0 * PI * x[1]));
        for (a, b) in fyy.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let fx = d.d1(&f, 0);
        let exact = g.sample(|x| 2.0 * PI * libm::cos(2.0 * PI * x[0]));
        for (a, b) in fx.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_of_constants_vanish() {
        let g = PeriodicGrid::new(2, 8).unwrap();
        for disc in [Discretization::Fd2, Discretization::Spectral] {
            let d = Differ::new(g, disc);
            let f = vec![3.5; g.len()];
            for a in 0..4 {
                assert!(d.d1(&f, a).iter().all(|v| v.abs() < 1e-9));
                assert!(d.d2(&f, a, (a + 1) % 4).iter().all(|v| v.abs() < 1e-9));
            }
        }
    }
}
