//! Functional-inequality constants, derived quantities, the penalization
//! level and the assumption checks on the physical parameters.
//!
//! Estimated constants are maxima of ratios over finitely many probes on the
//! truncated basis, so they are lower bounds of the true constants. Every
//! value can be replaced by a user override.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::error::Result;
use crate::linalg::{hermitian_values, sandwich_diag, spectral_norm_general, spectral_norm_hermitian, CMat, C64};
use crate::model::Model;
use crate::operators::dirac::free_dispersion;
use crate::operators::exchange::exchange_operator;
use crate::operators::density::{density_fourier, hartree_matrix};
use crate::params::ModelParams;
use crate::states::Norms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Estimated,
    UserOverride,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    fn est(value: f64) -> Self {
        Constant { value, provenance: Provenance::Estimated }
    }
}

/// User-supplied replacements, keyed by the usual constant names.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    #[serde(rename = "C_G", default, skip_serializing_if = "Option::is_none")]
    pub c_g: Option<f64>,
    #[serde(rename = "C_EE", default, skip_serializing_if = "Option::is_none")]
    pub c_ee: Option<f64>,
    #[serde(rename = "C_EE_prime", default, skip_serializing_if = "Option::is_none")]
    pub c_ee_prime: Option<f64>,
    #[serde(rename = "C_W", default, skip_serializing_if = "Option::is_none")]
    pub c_w: Option<f64>,
    #[serde(rename = "C_Y", default, skip_serializing_if = "Option::is_none")]
    pub c_y: Option<f64>,
    #[serde(rename = "C_H", default, skip_serializing_if = "Option::is_none")]
    pub c_h: Option<f64>,
    #[serde(rename = "C_0", default, skip_serializing_if = "Option::is_none")]
    pub c_0: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "C_M", default, skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl ConstantOverrides {
    /// Every functional-inequality constant set to `v`; R is left to the recipe.
    pub fn all(v: f64) -> Self {
        ConstantOverrides {
            c_g: Some(v),
            c_ee: Some(v),
            c_ee_prime: Some(v),
            c_w: Some(v),
            c_y: Some(v),
            c_h: Some(v),
            c_0: Some(v),
            k: Some(v),
            c_m: Some(v),
            r: None,
        }
    }
}

/// Quantities built from the constants and the physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    /// (C_G z + C_EE alpha q) / c
    pub kappa: f64,
    /// 1 - max{C_H z_c + C'_EE alpha_c q, (C_0/ell) z_c + C_EE alpha_c q}
    pub lambda0: f64,
    /// (alpha_c / 2) C_EE (1 - kappa)^{-1/2} lambda0^{-1/2}
    pub a: f64,
    /// Contraction constant 2 A R.
    pub l: f64,
    /// max((1 + A q)/2, 1/(1 - 2AR))
    pub m: f64,
    /// Computable branch of the critical constant, 16 pi C_EE R.
    pub c_cri: f64,
    /// Upper end 1/(2A) of the admissible R window (1, 1/(2A)).
    pub r_upper: f64,
    pub r_window_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c_g: Constant,
    pub c_ee: Constant,
    pub c_ee_prime: Constant,
    pub c_w: Constant,
    pub c_y: Constant,
    pub c_h: Constant,
    pub c_0: Constant,
    pub k: Constant,
    pub c_m: Constant,
    pub r: Constant,
    pub derived: Derived,
}

/// Default for the free constant in the R recipe.
pub const DEFAULT_C_M: f64 = 1.0;
/// Default number of random probes (half rank-1, half rank-q).
pub const DEFAULT_PROBES: usize = 32;

fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, r: usize) -> CMat {
    let a = CMat::from_fn(n, r, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    a.qr().q()
}

/// Random probe: r orthonormal orbitals with occupation 1 on every fiber.
pub fn random_probe(model: &Model, rank: usize, rng: &mut ChaCha8Rng) -> BlochOperator {
    let n = model.n_b();
    BlochOperator {
        fibers: (0..model.n_fibers())
            .map(|_| {
                let u = random_orthonormal(rng, n, rank.min(n));
                &u * u.adjoint()
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ProbeRatios {
    c_ee: f64,
    c_ee_prime: f64,
    c_w: f64,
}

fn probe_ratios(model: &Model, gamma: &BlochOperator) -> ProbeRatios {
    let norms = Norms::new(model);
    let x = norms.x(gamma);
    let y = norms.y(gamma);
    let s11 = norms.s11(gamma);
    let yc_local = norms.y_conv_local(gamma);
    let hart = hartree_matrix(&density_fourier(gamma, &model.basis), &model.basis);
    let w = exchange_operator(gamma, model);
    let mut v_norm: f64 = 0.0;
    let mut v_min = f64::INFINITY;
    let mut c_w: f64 = 0.0;
    for (t, wt) in w.fibers.iter().enumerate() {
        let vals = hermitian_values(&(&hart - wt));
        v_norm = v_norm.max(vals.iter().fold(0.0, |a, v| a.max(v.abs())));
        v_min = v_min.min(vals[0]);
        c_w = c_w.max(spectral_norm_hermitian(wt) / x.max(yc_local[t]));
    }
    ProbeRatios {
        c_ee: v_norm / x.max(y),
        c_ee_prime: (-v_min).max(0.0) / s11.max(y),
        c_w,
    }
}

/// c_star-style enumeration of the free positive levels at xi, beyond the
/// basis cutoff: (d+, |p|, |m|) sorted by d+, each mode twice (spin).
pub fn free_positive_levels(xi: &[f64; 3], ell: f64, c: f64, count: usize) -> Vec<(f64, f64, f64)> {
    let r = ((count as f64 / 2.0).cbrt().ceil() as i32) + 2;
    let g = 2.0 * std::f64::consts::PI / ell;
    let mut levels = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for d in -r..=r {
                let p = [xi[0] + g * a as f64, xi[1] + g * b as f64, xi[2] + g * d as f64];
                let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                let mnorm = ((a * a + b * b + d * d) as f64).sqrt();
                let e = free_dispersion(c, p2);
                levels.push((e, p2.sqrt(), mnorm));
                levels.push((e, p2.sqrt(), mnorm));
            }
        }
    }
    levels.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.total_cmp(&y.2)));
    levels.truncate(count);
    levels
}

/// Penalization data at level k = q + 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalization {
    /// sup_xi (d+_{q+1}(xi) + (C_G z + alpha C_EE q) sigma_{q+1}(xi))
    pub c_star: f64,
    /// c^2 + Sigma(q+1)
    pub analytic_bound: f64,
    pub margin: f64,
    pub eps_pen: f64,
}

/// c*(q+1) on the model's grid; sigma uses the sorted |xi + 2 pi m / ell|.
pub fn penalization(model: &Model, consts: &Constants) -> Penalization {
    let p = &model.params;
    let k = p.q as usize + 1;
    let coupling = consts.c_g.value * p.z + p.alpha * consts.c_ee.value * p.q_f64();
    let mut c_star: f64 = 0.0;
    let mut m_max: f64 = 0.0;
    for xi in &model.grid.points {
        let lv = free_positive_levels(xi, p.ell, p.c, k);
        let (d, pn, mn) = lv[k - 1];
        c_star = c_star.max(d + coupling * pn);
        m_max = m_max.max(mn);
    }
    let pi = std::f64::consts::PI;
    let sigma = 2.0 * pi * pi * (1.0 + m_max).powi(2) / (p.ell * p.ell)
        + (consts.c_g.value * p.z + consts.c_ee.value * p.q_f64()) * 2.0 * pi * (1.0 + m_max) / p.ell;
    let margin = p.eps_margin_or_default();
    Penalization { c_star, analytic_bound: p.c2() + sigma, margin, eps_pen: c_star + margin }
}

/// K: largest H^1 norm of eigenvectors of D_xi - z G with eigenvalue in (0, cap].
fn h1_constant(model: &Model, cap: f64) -> Result<f64> {
    let z = C64::new(model.params.z, 0.0);
    let mut k: f64 = 1.0;
    for (i, d) in model.free.iter().enumerate() {
        let e = crate::linalg::hermitian_eigen(&(d - &model.coulomb * z), i, model.tol.eigen_tol)?;
        for (j, &v) in e.values.iter().enumerate() {
            if v > 0.0 && v <= cap {
                let col = e.vectors.column(j);
                let s: f64 = col.iter().zip(&model.laplace[i]).map(|(a, l)| a.norm_sqr() * l).sum();
                k = k.max(s.sqrt());
            }
        }
    }
    Ok(k)
}

impl Constants {
    /// Estimate every constant on the model, then apply overrides.
    pub fn estimate(model: &Model, overrides: &ConstantOverrides, probes: usize, seed: u64) -> Result<Self> {
        let n_b = model.n_b();
        // C_G: sup_xi ||G (1 - Delta_xi)^{-1/2}||.
        let mut c_g: f64 = 0.0;
        let mut c_h: f64 = 0.0;
        for lap in &model.laplace {
            let inv_half: Vec<f64> = lap.iter().map(|l| 1.0 / l.sqrt()).collect();
            let gl = CMat::from_fn(n_b, n_b, |i, j| model.coulomb[(i, j)] * inv_half[j]);
            c_g = c_g.max(spectral_norm_general(&gl));
            let quarter: Vec<f64> = lap.iter().map(|l| l.powf(-0.25)).collect();
            c_h = c_h.max(spectral_norm_hermitian(&sandwich_diag(&model.coulomb, &quarter)));
        }
        let c_0 = model.params.ell * spectral_norm_hermitian(&model.coulomb);
        let c_y = model.weights.c_y(model.zero_shift);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = model.params.q as usize;
        let mut ratios = ProbeRatios { c_ee: 0.0, c_ee_prime: 0.0, c_w: 0.0 };
        for i in 0..probes.max(2) {
            let rank = if i % 2 == 0 { 1 } else { q };
            let g = random_probe(model, rank, &mut rng);
            let r = probe_ratios(model, &g);
            ratios.c_ee = ratios.c_ee.max(r.c_ee);
            ratios.c_ee_prime = ratios.c_ee_prime.max(r.c_ee_prime);
            ratios.c_w = ratios.c_w.max(r.c_w);
        }

        let pick = |est: f64, o: Option<f64>| match o {
            Some(v) => Constant { value: v, provenance: Provenance::UserOverride },
            None => Constant::est(est),
        };
        let c_g = pick(c_g, overrides.c_g);
        let c_ee = pick(ratios.c_ee, overrides.c_ee);
        let mut out = Constants {
            c_g,
            c_ee,
            c_ee_prime: pick(ratios.c_ee_prime, overrides.c_ee_prime),
            c_w: pick(ratios.c_w, overrides.c_w),
            c_y: pick(c_y, overrides.c_y),
            c_h: pick(c_h, overrides.c_h),
            c_0: pick(c_0, overrides.c_0),
            k: Constant::est(1.0),
            c_m: match overrides.c_m {
                Some(v) => Constant { value: v, provenance: Provenance::UserOverride },
                None => Constant { value: DEFAULT_C_M, provenance: Provenance::Default },
            },
            r: Constant::est(0.0),
            derived: zero_derived(),
        };
        let pen = penalization(model, &out);
        let k = match overrides.k {
            Some(v) => Constant { value: v, provenance: Provenance::UserOverride },
            None => Constant::est(h1_constant(model, pen.analytic_bound.max(pen.c_star))?),
        };
        out.k = k;
        out.r = match overrides.r {
            Some(v) => Constant { value: v, provenance: Provenance::UserOverride },
            None => Constant::est((out.k.value + out.c_m.value) * model.params.q_f64() + out.c_y.value),
        };
        out.derived = derive(&model.params, &out);
        Ok(out)
    }

    /// Constants given entirely by the user (missing entries default to 1,
    /// R to the recipe with C_Y = 1).
    pub fn from_overrides(params: &ModelParams, o: &ConstantOverrides) -> Self {
        let user = |v: Option<f64>, d: f64| match v {
            Some(x) => Constant { value: x, provenance: Provenance::UserOverride },
            None => Constant { value: d, provenance: Provenance::Default },
        };
        let mut out = Constants {
            c_g: user(o.c_g, 1.0),
            c_ee: user(o.c_ee, 1.0),
            c_ee_prime: user(o.c_ee_prime, 1.0),
            c_w: user(o.c_w, 1.0),
            c_y: user(o.c_y, 1.0),
            c_h: user(o.c_h, 1.0),
            c_0: user(o.c_0, 1.0),
            k: user(o.k, 1.0),
            c_m: user(o.c_m, DEFAULT_C_M),
            r: Constant { value: 0.0, provenance: Provenance::Default },
            derived: zero_derived(),
        };
        out.r = user(o.r, (out.k.value + out.c_m.value) * params.q_f64() + out.c_y.value);
        out.derived = derive(params, &out);
        out
    }

    /// (name, constant) in a fixed order, for reports.
    pub fn named(&self) -> [(&'static str, Constant); 10] {
        [
            ("C_G", self.c_g),
            ("C_EE", self.c_ee),
            ("C_EE_prime", self.c_ee_prime),
            ("C_W", self.c_w),
            ("C_Y", self.c_y),
            ("C_H", self.c_h),
            ("C_0", self.c_0),
            ("K", self.k),
            ("C_M", self.c_m),
            ("R", self.r),
        ]
    }

    pub fn rederive(&mut self, params: &ModelParams) {
        self.derived = derive(params, self);
    }
}

fn zero_derived() -> Derived {
    Derived { kappa: 0.0, lambda0: 1.0, a: 0.0, l: 0.0, m: 1.0, c_cri: 0.0, r_upper: f64::INFINITY, r_window_ok: true }
}

pub fn derive(p: &ModelParams, k: &Constants) -> Derived {
    let (ac, zc, q) = (p.alpha_c(), p.z_c(), p.q_f64());
    let c_ee = k.c_ee.value;
    let kappa = (k.c_g.value * p.z + c_ee * p.alpha * q) / p.c;
    let lambda0 = 1.0
        - (k.c_h.value * zc + k.c_ee_prime.value * ac * q).max(k.c_0.value / p.ell * zc + c_ee * ac * q);
    let a = if kappa < 1.0 && lambda0 > 0.0 {
        0.5 * ac * c_ee / ((1.0 - kappa).sqrt() * lambda0.sqrt())
    } else {
        f64::INFINITY
    };
    let r = k.r.value;
    let l = 2.0 * a * r;
    let m = if l < 1.0 { (0.5 * (1.0 + a * q)).max(1.0 / (1.0 - l)) } else { f64::INFINITY };
    let r_upper = if a > 0.0 { 1.0 / (2.0 * a) } else { f64::INFINITY };
    Derived {
        kappa,
        lambda0,
        a,
        l,
        m,
        c_cri: 16.0 * std::f64::consts::PI * c_ee * r,
        r_upper,
        r_window_ok: r > 1.0 && r < r_upper,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    /// Positive when the clause holds; the distance to failure.
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub clauses: Vec<Clause>,
    /// Clauses (1) and (2).
    pub weak: bool,
    /// All clauses plus 0 < alpha <= 1 and c >= 1.
    pub strong: bool,
    /// Admissible interval for rho in clause (2), if non-empty.
    pub rho_window: Option<(f64, f64)>,
    pub c_star: f64,
}

pub fn check_assumptions(p: &ModelParams, k: &Constants, c_star: f64) -> AssumptionReport {
    let d = &k.derived;
    let (ac, q, c_ee) = (p.alpha_c(), p.q_f64(), k.c_ee.value);
    let mut clauses = Vec::new();

    let s1 = 1.0 - 0.5 * ac * c_ee * q - d.kappa;
    clauses.push(Clause {
        name: "kappa_bound".into(),
        holds: s1 > 0.0,
        slack: s1,
        detail: format!("kappa = {:.6e} < 1 - alpha_c C_EE q / 2 = {:.6e}", d.kappa, 1.0 - 0.5 * ac * c_ee * q),
    });

    let gap = 1.0 - d.kappa - 0.5 * ac * c_ee * q;
    let inner = if gap > 0.0 { (c_star * q / (gap * p.c2())).max(1.0) } else { f64::INFINITY };
    let lower = (inner * q).sqrt().max(1.0);
    let upper = if ac == 0.0 {
        f64::INFINITY
    } else if d.kappa < 1.0 && d.lambda0 > 0.0 {
        ((1.0 - d.kappa) * d.lambda0).sqrt() / ac
    } else {
        f64::NEG_INFINITY
    };
    let window = if lower < upper { Some((lower, upper)) } else { None };
    clauses.push(Clause {
        name: "rho_window".into(),
        holds: window.is_some(),
        slack: if upper.is_infinite() && upper > 0.0 { f64::INFINITY } else { upper - lower },
        detail: format!("need {lower:.6e} < rho < {upper:.6e}"),
    });

    let need_c = 2.0 * (k.c_g.value * p.z + c_ee * q);
    clauses.push(Clause {
        name: "c_large".into(),
        holds: p.c >= need_c,
        slack: p.c - need_c,
        detail: format!("c = {} >= 2 (C_G z + C_EE q) = {need_c:.6e}", p.c),
    });

    let alpha_max = if d.c_cri > 0.0 { 4.0 * std::f64::consts::PI / d.c_cri * p.c } else { f64::INFINITY };
    clauses.push(Clause {
        name: "alpha_small".into(),
        holds: p.alpha <= alpha_max,
        slack: alpha_max - p.alpha,
        detail: format!("alpha = {} <= 4 pi c / C_cri = {alpha_max:.6e} (C_cri = 16 pi C_EE R)", p.alpha),
    });

    let weak = clauses[0].holds && clauses[1].holds;
    let strong = clauses.iter().all(|c| c.holds) && p.alpha > 0.0 && p.alpha <= 1.0 && p.c >= 1.0;
    AssumptionReport { clauses, weak, strong, rho_window: window, c_star }
}
