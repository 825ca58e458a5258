//! Reference implementations written without the library's assembly code.
//!
//! Everything here works on dense per-fiber matrices in the library's index
//! convention (mode-major, lexicographic modes, 4 spinor components) but
//! rebuilds modes, Dirac blocks, densities and kernels from scratch.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Mat = DMatrix<C>;

pub fn modes(k_cut: i32) -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for a in -k_cut..=k_cut {
        for b in -k_cut..=k_cut {
            for c in -k_cut..=k_cut {
                out.push([a, b, c]);
            }
        }
    }
    out
}

pub fn grid_points(ell: f64, n: usize) -> Vec<[f64; 3]> {
    let s = 2.0 * PI / (ell * n as f64);
    let ax: Vec<f64> = (0..n).map(|i| -PI / ell + s * (i as f64 + 0.5)).collect();
    let mut pts = Vec::new();
    for &a in &ax {
        for &b in &ax {
            for &c in &ax {
                pts.push([a, b, c]);
            }
        }
    }
    pts
}

/// Standard representation: alpha_k = [[0, sigma_k], [sigma_k, 0]], beta = diag(1, 1, -1, -1).
pub fn dirac_fiber(ell: f64, k_cut: i32, xi: &[f64; 3], c: f64) -> Mat {
    let o = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    let z = C::new(0.0, 0.0);
    let sigma = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
    let ms = modes(k_cut);
    let n = 4 * ms.len();
    let mut d = Mat::zeros(n, n);
    for (mi, m) in ms.iter().enumerate() {
        let p: Vec<f64> = (0..3).map(|k| xi[k] + 2.0 * PI * m[k] as f64 / ell).collect();
        for k in 0..3 {
            for r in 0..2 {
                for s in 0..2 {
                    let v = sigma[k][r][s] * (c * p[k]);
                    d[(4 * mi + r, 4 * mi + 2 + s)] += v;
                    d[(4 * mi + 2 + r, 4 * mi + s)] += v;
                }
            }
        }
        for s in 0..4 {
            d[(4 * mi + s, 4 * mi + s)] += if s < 2 { c * c } else { -c * c };
        }
    }
    d
}

pub fn ghat(p: [i32; 3], ell: f64) -> f64 {
    let n2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) as f64;
    if n2 == 0.0 {
        0.0
    } else {
        1.0 / (PI * ell * n2)
    }
}

/// (occupations, orbital columns) of a Hermitian fiber matrix, dropping zero occupations.
pub fn orbitals(g: &Mat) -> Vec<(f64, Vec<C>)> {
    let e = g.clone().symmetric_eigen();
    let mut out = Vec::new();
    for j in 0..e.eigenvalues.len() {
        let f = e.eigenvalues[j];
        if f.abs() > 1.0e-14 {
            out.push((f, e.eigenvectors.column(j).iter().cloned().collect()));
        }
    }
    out
}

/// Orbital-form rho_hat(p) = ell^-3 avg_xi sum_i f_i sum_{m,s} C_i(m+p,s) conj(C_i(m,s)).
pub fn density(orbs: &[Vec<(f64, Vec<C>)>], ell: f64, k_cut: i32, p: [i32; 3]) -> C {
    let ms = modes(k_cut);
    let index = |m: [i32; 3]| ms.iter().position(|x| *x == m);
    let mut acc = C::new(0.0, 0.0);
    for fib in orbs {
        for (f, v) in fib {
            for (mi, m) in ms.iter().enumerate() {
                if let Some(mj) = index([m[0] + p[0], m[1] + p[1], m[2] + p[2]]) {
                    for s in 0..4 {
                        acc += v[4 * mj + s] * v[4 * mi + s].conj() * *f;
                    }
                }
            }
        }
    }
    acc / (orbs.len() as f64 * ell.powi(3))
}

pub struct Discretization {
    pub ell: f64,
    pub k_cut: i32,
    pub c: f64,
    pub z: f64,
    pub alpha: f64,
    pub points: Vec<[f64; 3]>,
    /// Value used for k = 0 between a point and itself.
    pub singular: f64,
}

impl Discretization {
    /// 1 / |2 pi k / ell - (xi_a - xi_b)|^2.
    pub fn weight(&self, k: [i32; 3], a: usize, b: usize) -> f64 {
        if a == b && k == [0, 0, 0] {
            return self.singular;
        }
        let g = 2.0 * PI / self.ell;
        let e: Vec<f64> = (0..3).map(|d| g * k[d] as f64 - (self.points[a][d] - self.points[b][d])).collect();
        1.0 / (e[0] * e[0] + e[1] * e[1] + e[2] * e[2])
    }

    pub fn shifts(&self) -> Vec<[i32; 3]> {
        modes(2 * self.k_cut)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelEnergy {
    pub dirac: f64,
    pub external: f64,
    pub hartree: f64,
    pub exchange: f64,
}

impl KernelEnergy {
    pub fn total(&self) -> f64 {
        self.dirac + self.external + self.hartree + self.exchange
    }
}

/// Energy from the orbital expansion of gamma: one-body terms as expectation
/// values, Coulomb terms from rho_hat, and exchange as
/// -(alpha/2)(4 pi / ell^3) avg avg sum_k w(k, xi, xi') sum_ij f_i f_j |M_ij(k)|^2
/// with M_ij(k) = sum_m conj(C'_j(m+k)) C_i(m).
pub fn kernel_energy(gamma: &[Mat], d: &Discretization) -> KernelEnergy {
    let nf = gamma.len() as f64;
    let orbs: Vec<_> = gamma.iter().map(orbitals).collect();
    let ms = modes(d.k_cut);
    let index = |m: [i32; 3]| ms.iter().position(|x| *x == m);
    let mut dirac = 0.0;
    for (fi, fib) in orbs.iter().enumerate() {
        let dm = dirac_fiber(d.ell, d.k_cut, &d.points[fi], d.c);
        for (f, v) in fib {
            let col = DMatrix::from_column_slice(v.len(), 1, v);
            dirac += f * (col.adjoint() * &dm * &col)[(0, 0)].re;
        }
    }
    dirac /= nf;
    let vol = d.ell.powi(3);
    let mut external = 0.0;
    let mut hartree = 0.0;
    for p in d.shifts() {
        let g = ghat(p, d.ell);
        if g == 0.0 {
            continue;
        }
        let r = density(&orbs, d.ell, d.k_cut, p);
        let rm = density(&orbs, d.ell, d.k_cut, [-p[0], -p[1], -p[2]]);
        external += -d.z * vol * g * rm.re;
        hartree += 0.5 * d.alpha * vol * vol * g * r.norm_sqr();
    }
    let mut ex = 0.0;
    if d.alpha != 0.0 {
        for (a, fa) in orbs.iter().enumerate() {
            for (b, fb) in orbs.iter().enumerate() {
                for k in d.shifts() {
                    let w = d.weight(k, a, b);
                    for (fi, ci) in fa {
                        for (fj, cj) in fb {
                            let mut m = C::new(0.0, 0.0);
                            for (mi, mv) in ms.iter().enumerate() {
                                if let Some(mk) = index([mv[0] + k[0], mv[1] + k[1], mv[2] + k[2]]) {
                                    for s in 0..4 {
                                        m += cj[4 * mk + s].conj() * ci[4 * mi + s];
                                    }
                                }
                            }
                            ex += w * fi * fj * m.norm_sqr();
                        }
                    }
                }
            }
        }
        ex *= -0.5 * d.alpha * 4.0 * PI / vol / (nf * nf);
    }
    KernelEnergy { dirac, external, hartree, exchange: ex }
}

/// Mean of 1/|u|^2 over the unit cube, as the solid-angle integral of the
/// distance to the boundary, 1 / (2 max_i |u_i|), on a (theta, phi) product rule.
pub fn cube_inverse_square_mean(n: usize) -> f64 {
    // Gauss-Legendre would be nicer; the midpoint rule on cos(theta) is enough here.
    let mut acc = 0.0;
    for i in 0..n {
        let ct = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..2 * n {
            let ph = 2.0 * PI * (j as f64 + 0.5) / (2 * n) as f64;
            let u = [st * ph.cos(), st * ph.sin(), ct];
            let m = u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            acc += 1.0 / (2.0 * m);
        }
    }
    acc * (2.0 / n as f64) * (2.0 * PI / (2 * n) as f64)
}

/// Mean of 1/|x - y|^2 over pairs in the unit ball: the distance integral
/// weighted by the overlap volume of two unit balls, by Simpson's rule.
pub fn ball_pair_inverse_square_mean(n: usize) -> f64 {
    let lens = |d: f64| PI * (4.0 + d) * (2.0 - d).powi(2) / 12.0;
    let h = 2.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let d = i as f64 * h;
        let wt = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += wt * 4.0 * PI * lens(d);
    }
    let vol = 4.0 * PI / 3.0;
    acc * h / 3.0 / (vol * vol)
}

/// W_gamma on the fiber at grid point `target`, by tensor-product quadrature
/// of the real-space matrix elements
/// <e_a, W e_b> = avg_xi' int int conj(e_a(x)) W^inf(xi' - xi, x - y) gamma_xi'(x, y) e_b(y) dx dy
/// with W^inf summed over |k|_inf <= k_max on an N^3 grid.
pub fn real_space_exchange(gamma: &[Mat], target: usize, d: &Discretization, n_quad: usize, k_max: i32) -> Mat {
    let ms = modes(d.k_cut);
    let nm = ms.len();
    let nb = 4 * nm;
    let ell = d.ell;
    let g = 2.0 * PI / ell;
    let xs: Vec<f64> = (0..n_quad).map(|j| ell * j as f64 / n_quad as f64).collect();
    // (1/ell) int_0^ell e^{i phi x} dx on the grid.
    let line = |phi: f64| -> C {
        xs.iter().map(|x| C::from_polar(1.0, phi * x)).sum::<C>() / n_quad as f64
    };
    let xi = d.points[target];
    let mut w_out = Mat::zeros(nb, nb);
    for (src, gsrc) in gamma.iter().enumerate() {
        let xp = d.points[src];
        for k in modes(k_max) {
            let w = d.weight(k, src, target);
            // I(a, c) = int conj(e_{xi,a}) e^{i(2 pi k/ell - (xi' - xi)) x} e_{xi',c}.
            let mut entries = Vec::new();
            for (ai, a) in ms.iter().enumerate() {
                for (ci, cm) in ms.iter().enumerate() {
                    let mut v = C::new(1.0, 0.0);
                    for ax in 0..3 {
                        let phi = -(xi[ax] + g * a[ax] as f64) + (g * k[ax] as f64 - (xp[ax] - xi[ax]))
                            + (xp[ax] + g * cm[ax] as f64);
                        v *= line(phi);
                    }
                    if v.norm() > 1.0e-12 {
                        entries.push((ai, ci, v));
                    }
                }
            }
            let pref = 4.0 * PI / ell.powi(3) * w / gamma.len() as f64;
            for &(a, cc, ia) in &entries {
                for &(b, dd, ib) in &entries {
                    for s in 0..4 {
                        for t in 0..4 {
                            w_out[(4 * a + s, 4 * b + t)] += ia * gsrc[(4 * cc + s, 4 * dd + t)] * ib.conj() * pref;
                        }
                    }
                }
            }
        }
    }
    w_out
}

/// Mean-field operator D - z G + alpha (rho * G - W) assembled from the
/// orbital density and the shifted-block form of the exchange.
pub fn mean_field(gamma: &[Mat], d: &Discretization) -> Vec<Mat> {
    let ms = modes(d.k_cut);
    let nm = ms.len();
    let nb = 4 * nm;
    let index = |m: [i32; 3]| ms.iter().position(|x| *x == m);
    let orbs: Vec<_> = gamma.iter().map(orbitals).collect();
    let vol = d.ell.powi(3);
    let mut pot = Mat::zeros(nb, nb);
    for (ai, a) in ms.iter().enumerate() {
        for (bi, b) in ms.iter().enumerate() {
            let p = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            let gh = ghat(p, d.ell);
            if gh == 0.0 {
                continue;
            }
            let v = C::new(-d.z * gh, 0.0) + density(&orbs, d.ell, d.k_cut, p) * (d.alpha * vol * gh);
            for s in 0..4 {
                pot[(4 * ai + s, 4 * bi + s)] = v;
            }
        }
    }
    let nf = gamma.len();
    (0..nf)
        .map(|t| {
            let mut m = dirac_fiber(d.ell, d.k_cut, &d.points[t], d.c) + &pot;
            if d.alpha != 0.0 {
                for (src, gs) in gamma.iter().enumerate() {
                    for k in d.shifts() {
                        // Gradient of |M(k)|^2 in gamma_xi: gamma_xi'[(a+k), (b+k)] weighted by w(k, xi, xi').
                        let w = d.weight(k, t, src) * d.alpha * 4.0 * PI / vol / nf as f64;
                        for (ai, a) in ms.iter().enumerate() {
                            let Some(ak) = index([a[0] + k[0], a[1] + k[1], a[2] + k[2]]) else { continue };
                            for (bi, b) in ms.iter().enumerate() {
                                let Some(bk) = index([b[0] + k[0], b[1] + k[1], b[2] + k[2]]) else { continue };
                                for s in 0..4 {
                                    for u in 0..4 {
                                        m[(4 * ai + s, 4 * bi + u)] -= gs[(4 * ak + s, 4 * bk + u)] * w;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            (&m + m.adjoint()) * C::new(0.5, 0.0)
        })
        .collect()
}

fn eig_sorted(m: &Mat) -> (Vec<f64>, Mat) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = Mat::zeros(m.nrows(), m.ncols());
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Projection of per-fiber eigenvalue lists onto {0 <= x <= 1, avg sum x = q}
/// by bisection on the common shift.
fn capped_simplex(values: &[Vec<f64>], q: f64) -> Vec<Vec<f64>> {
    let nf = values.len() as f64;
    let total = |mu: f64| values.iter().flatten().map(|v| (v - mu).clamp(0.0, 1.0)).sum::<f64>() / nf;
    let (mut lo, mut hi) = (-1.0e6, 1.0e6);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    values.iter().map(|v| v.iter().map(|x| (x - mu).clamp(0.0, 1.0)).collect()).collect()
}

pub struct GradientResult {
    pub gamma: Vec<Mat>,
    pub energy: f64,
    pub iterations: usize,
    pub step: f64,
}

/// Projected gradient on {0 <= gamma <= 1, avg Tr gamma = q, gamma = P+ gamma P+}:
/// gamma <- Proj(P+ (gamma - tau D_gamma) P+) with P+ of the current mean field.
pub fn projected_gradient(d: &Discretization, q: f64, tau: f64, max_iter: usize, tol: f64) -> GradientResult {
    let nf = d.points.len();
    let nb = 4 * modes(d.k_cut).len();
    let mut gamma: Vec<Mat> = vec![Mat::zeros(nb, nb); nf];
    let mut step = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let dm = mean_field(&gamma, d);
        let mut bases = Vec::with_capacity(nf);
        let mut vals = Vec::with_capacity(nf);
        for (g, m) in gamma.iter().zip(&dm) {
            let (lv, lvec) = eig_sorted(m);
            let first = lv.iter().position(|&v| v > 0.0).unwrap_or(lv.len());
            let vp = lvec.columns(first, lv.len() - first).into_owned();
            let y = vp.adjoint() * (g - m * C::new(tau, 0.0)) * &vp;
            let y = (&y + y.adjoint()) * C::new(0.5, 0.0);
            let (yv, yvec) = eig_sorted(&y);
            bases.push(&vp * yvec);
            vals.push(yv);
        }
        let occ = capped_simplex(&vals, q);
        let next: Vec<Mat> = bases
            .iter()
            .zip(&occ)
            .map(|(b, o)| {
                let mut s = b.clone();
                for (j, f) in o.iter().enumerate() {
                    s.column_mut(j).scale_mut(*f);
                }
                &s * b.adjoint()
            })
            .collect();
        step = next.iter().zip(&gamma).map(|(a, b)| (a - b).iter().fold(0.0f64, |x, z| x.max(z.norm()))).fold(0.0, f64::max);
        gamma = next;
        if step < tol {
            break;
        }
    }
    let energy = kernel_energy(&gamma, d).total();
    GradientResult { gamma, energy, iterations: it, step }
}

/// Sorted lowest `q` positive dispersion values sqrt(c^4 + c^2 |xi + 2 pi m / ell|^2), each twice.
pub fn dispersion_levels(ell: f64, k_cut: i32, xi: &[f64; 3], c: f64) -> Vec<f64> {
    let mut lv: Vec<f64> = modes(k_cut)
        .iter()
        .flat_map(|m| {
            let p2: f64 = (0..3).map(|k| (xi[k] + 2.0 * PI * m[k] as f64 / ell).powi(2)).sum();
            let e = (c.powi(4) + c * c * p2).sqrt();
            [e, e]
        })
        .collect();
    lv.sort_by(f64::total_cmp);
    lv
}

pub fn random_hermitian(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Mat {
    let a = Mat::from_fn(n, n, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&a + a.adjoint()) * C::new(0.5 * scale, 0.0)
}

/// Random density matrix: `rank` orthonormal orbitals with occupations in (0, 1).
pub fn random_density(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> Mat {
    let a = Mat::from_fn(n, rank, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let q = a.qr().q();
    let mut s = q.clone();
    for j in 0..rank {
        let f: f64 = rng.random::<f64>() * 0.9 + 0.05;
        s.column_mut(j).scale_mut(f);
    }
    &s * q.adjoint()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}
