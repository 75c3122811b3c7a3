//! Monte-Carlo verification of closed-form expectation identities and
//! randomized checks of deterministic phase inequalities.
//!
//! Every Monte-Carlo check reports `z = |estimate − target| / se` and passes
//! at `z ≤ 4`. Complex targets use the larger of the two per-component
//! scores. Matrix targets compare `‖Ê − T‖_F` against the Frobenius standard
//! error `se_F = sqrt(Σ_ij se_ij²)`; the entrywise `se_ij` are the
//! delete-one jackknife errors of the sample means, which for a mean reduce
//! to `s_ij / √N`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{inner, norm, phase_unit, ComplexVector, C64};
use crate::rng::{complex_gaussian, complex_gaussian_vec, mix_seed, stream};
use crate::weighting::{
    delta_infty, eta, h_closed_form, nu, psi, xi, zeta, zeta_abs, GridSpec,
};

/// Number of standard errors a Monte-Carlo estimate may deviate.
pub const Z_THRESHOLD: f64 = 4.0;
/// Slack for the deterministic inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportValue {
    Scalar(f64),
    Complex([f64; 2]),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCheckReport {
    pub name: String,
    pub estimate: ReportValue,
    pub target: ReportValue,
    pub se: f64,
    pub z_score: f64,
    pub pass: bool,
}

fn z_of(dev: f64, se: f64) -> f64 {
    if dev == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        dev / se
    }
}

impl McCheckReport {
    fn finish(name: String, estimate: ReportValue, target: ReportValue, se: f64, z: f64) -> Self {
        McCheckReport {
            name,
            estimate,
            target,
            se,
            z_score: z,
            pass: z <= Z_THRESHOLD,
        }
    }
}

/// Running sums for a complex-valued sample mean.
#[derive(Clone, Copy, Default, Debug)]
struct ComplexStats {
    n: usize,
    sum: C64,
    sum_sq_re: f64,
    sum_sq_im: f64,
}

impl ComplexStats {
    fn push(&mut self, v: C64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq_re += v.re * v.re;
        self.sum_sq_im += v.im * v.im;
    }

    fn mean(&self) -> C64 {
        self.sum / self.n as f64
    }

    /// Standard errors of the real and imaginary means.
    fn se(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.mean();
        let var = |sq: f64, mu: f64| ((sq / n - mu * mu) * n / (n - 1.0)).max(0.0);
        (
            (var(self.sum_sq_re, mean.re) / n).sqrt(),
            (var(self.sum_sq_im, mean.im) / n).sqrt(),
        )
    }

    fn real_report(&self, name: String, target: f64) -> McCheckReport {
        let (se, _) = self.se();
        let est = self.mean().re;
        McCheckReport::finish(
            name,
            ReportValue::Scalar(est),
            ReportValue::Scalar(target),
            se,
            z_of((est - target).abs(), se),
        )
    }

    fn complex_report(&self, name: String, target: C64) -> McCheckReport {
        let (se_re, se_im) = self.se();
        let est = self.mean();
        let z = z_of((est.re - target.re).abs(), se_re).max(z_of((est.im - target.im).abs(), se_im));
        McCheckReport::finish(
            name,
            ReportValue::Complex([est.re, est.im]),
            ReportValue::Complex([target.re, target.im]),
            se_re.hypot(se_im),
            z,
        )
    }
}

/// Entrywise running sums for a matrix-valued sample mean.
struct MatrixStats {
    dim: usize,
    entries: Vec<ComplexStats>,
}

impl MatrixStats {
    fn new(dim: usize) -> Self {
        MatrixStats {
            dim,
            entries: vec![ComplexStats::default(); dim * dim],
        }
    }

    fn push(&mut self, sample: &[C64]) {
        for (s, v) in self.entries.iter_mut().zip(sample) {
            s.push(*v);
        }
    }

    fn report(&self, name: String, target: &[C64]) -> McCheckReport {
        let mut dev2 = 0.0;
        let mut se2 = 0.0;
        let mut est = Vec::with_capacity(self.entries.len());
        for (s, t) in self.entries.iter().zip(target) {
            let mean = s.mean();
            let (a, b) = s.se();
            dev2 += (mean - t).norm_sqr();
            se2 += a * a + b * b;
            est.push(mean);
        }
        let se = se2.sqrt();
        McCheckReport::finish(
            name,
            ReportValue::Matrix(to_rows(&est, self.dim)),
            ReportValue::Matrix(to_rows(target, self.dim)),
            se,
            z_of(dev2.sqrt(), se),
        )
    }
}

fn to_rows(v: &[C64], dim: usize) -> Vec<Vec<[f64; 2]>> {
    v.chunks(dim)
        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

/// `E_{s~CN(0,1)} ψ(t+s)` against `h(t)` (real part) and 0 (imaginary part).
pub fn mc_psi_smoothing(t: f64, samples: usize, seed: u64) -> McCheckReport {
    let mut rng = stream(seed);
    let mut stats = ComplexStats::default();
    let t_c = C64::new(t, 0.0);
    for _ in 0..samples {
        stats.push(psi(t_c + complex_gaussian(&mut rng)));
    }
    stats.complex_report(
        format!("psi_smoothing(t={t})"),
        C64::new(h_closed_form(t), 0.0),
    )
}

/// `E ζ(s) = 1/(2σ²+1)` and `E |s|²ζ(s) = (4σ²+1)/(2σ²+1)²` for `s ~ CN(0,1)`.
pub fn mc_zeta_moments(sigma_sq: f64, samples: usize, seed: u64) -> [McCheckReport; 2] {
    let mut rng = stream(seed);
    let mut first = ComplexStats::default();
    let mut second = ComplexStats::default();
    for _ in 0..samples {
        let s = complex_gaussian(&mut rng);
        let z = zeta(s, sigma_sq);
        first.push(C64::new(z, 0.0));
        second.push(C64::new(s.norm_sqr() * z, 0.0));
    }
    let d = 2.0 * sigma_sq + 1.0;
    [
        first.real_report(format!("zeta_mean(sigma_sq={sigma_sq})"), 1.0 / d),
        second.real_report(
            format!("zeta_second_moment(sigma_sq={sigma_sq})"),
            (4.0 * sigma_sq + 1.0) / (d * d),
        ),
    ]
}

/// `E_{s~CN(0,1)} η(t+s) = ζ(t)`.
pub fn mc_eta_smoothing(t: C64, sigma_sq: f64, samples: usize, seed: u64) -> Result<McCheckReport> {
    let mut rng = stream(seed);
    let mut stats = ComplexStats::default();
    for _ in 0..samples {
        stats.push(C64::new(eta(t + complex_gaussian(&mut rng), sigma_sq)?, 0.0));
    }
    Ok(stats.real_report(
        format!("eta_smoothing(t={t},sigma_sq={sigma_sq})"),
        zeta(t, sigma_sq),
    ))
}

/// `E_{s~CN(0,1)} ξ_{σ²}(t+s) = ξ_{σ²+1/2}(t)`.
pub fn mc_xi_smoothing(t: C64, sigma_sq: f64, samples: usize, seed: u64) -> McCheckReport {
    let mut rng = stream(seed);
    let mut stats = ComplexStats::default();
    for _ in 0..samples {
        stats.push(C64::new(xi(t + complex_gaussian(&mut rng), sigma_sq), 0.0));
    }
    stats.real_report(
        format!("xi_smoothing(t={t},sigma_sq={sigma_sq})"),
        xi(t, sigma_sq + 0.5),
    )
}

/// `E_{s~CN(0,1)} (t+s) ν(t+s) = t ζ(t)`.
pub fn mc_nu_smoothing(t: C64, sigma_sq: f64, samples: usize, seed: u64) -> Result<McCheckReport> {
    let mut rng = stream(seed);
    let mut stats = ComplexStats::default();
    for _ in 0..samples {
        let u = t + complex_gaussian(&mut rng);
        stats.push(u * nu(u, sigma_sq)?);
    }
    Ok(stats.complex_report(
        format!("nu_smoothing(t={t},sigma_sq={sigma_sq})"),
        t * zeta(t, sigma_sq),
    ))
}

fn require_small(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::InvalidInput(format!(
            "dense Monte-Carlo checks need 1 <= n <= {limit}, got {n}"
        )));
    }
    Ok(())
}

/// `E |a*x|² aa* = xx* + ‖x‖² I` and `E (a*x)² aaᵀ = 2 xxᵀ` for `a ~ CN(0, I)`.
pub fn mc_fourth_moment(x: &[C64], samples: usize, seed: u64) -> Result<[McCheckReport; 2]> {
    let n = x.len();
    require_small(n, 16)?;
    let mut rng = stream(seed);
    let mut herm = MatrixStats::new(n);
    let mut sym = MatrixStats::new(n);
    let mut a = vec![C64::new(0.0, 0.0); n];
    let mut s_h = vec![C64::new(0.0, 0.0); n * n];
    let mut s_s = vec![C64::new(0.0, 0.0); n * n];
    for _ in 0..samples {
        for ai in a.iter_mut() {
            *ai = complex_gaussian(&mut rng);
        }
        let ax = inner(&a, x);
        let w_h = ax.norm_sqr();
        let w_s = ax * ax;
        for i in 0..n {
            for j in 0..n {
                s_h[i * n + j] = a[i] * a[j].conj() * w_h;
                s_s[i * n + j] = a[i] * a[j] * w_s;
            }
        }
        herm.push(&s_h);
        sym.push(&s_s);
    }
    let x2 = norm(x).powi(2);
    let mut t_h = vec![C64::new(0.0, 0.0); n * n];
    let mut t_s = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            t_h[i * n + j] = x[i] * x[j].conj() + if i == j { C64::new(x2, 0.0) } else { C64::new(0.0, 0.0) };
            t_s[i * n + j] = x[i] * x[j] * 2.0;
        }
    }
    Ok([
        herm.report(format!("fourth_moment_hermitian(n={n})"), &t_h),
        sym.report(format!("fourth_moment_symmetric(n={n})"), &t_s),
    ])
}

/// Row `k` of `A` (first `n` columns of `C_g`): entries `g[(k − l) mod m]`.
fn circulant_row(g: &[C64], k: usize, n: usize, row: &mut [C64]) {
    let m = g.len();
    for (l, r) in row.iter_mut().enumerate().take(n) {
        *r = g[(k + m - l) % m];
    }
}

/// Accumulates `(scale/m) Σ_k w_k conj(r_k)ᵀ r_k` into `out` (row-major `n × n`).
fn accumulate_gram(g: &[C64], x: &[C64], weight: impl Fn(f64) -> f64, scale: f64, out: &mut [C64]) {
    let m = g.len();
    let n = x.len();
    out.fill(C64::new(0.0, 0.0));
    let mut row = vec![C64::new(0.0, 0.0); n];
    for k in 0..m {
        circulant_row(g, k, n, &mut row);
        let yk: C64 = row.iter().zip(x).map(|(r, xi)| r * xi).sum();
        let w = weight(yk.norm());
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let ri = row[i].conj() * w;
            for j in 0..n {
                out[i * n + j] += ri * row[j];
            }
        }
    }
    let s = scale / m as f64;
    for v in out.iter_mut() {
        *v *= s;
    }
}

fn check_unit(x: &[C64]) -> Result<()> {
    if (norm(x) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput("expected a unit-norm signal".into()));
    }
    Ok(())
}

/// A unit vector orthogonal to unit `x` (Gram–Schmidt on the least aligned basis vector).
pub fn orthogonal_unit(x: &[C64]) -> ComplexVector {
    let n = x.len();
    let j = (0..n)
        .min_by(|&a, &b| x[a].norm().total_cmp(&x[b].norm()))
        .expect("non-empty");
    let mut w = vec![C64::new(0.0, 0.0); n];
    w[j] = C64::new(1.0, 0.0);
    let proj = inner(x, &w);
    for (wi, xi) in w.iter_mut().zip(x) {
        *wi -= xi * proj;
    }
    let wn = norm(&w);
    ComplexVector::from_vec_unchecked(w.into_iter().map(|c| c / wn).collect())
}

fn identity_plus(x: &[C64], coef: f64, diag: f64) -> Vec<C64> {
    let n = x.len();
    let mut t = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = x[i] * x[j].conj() * coef;
        }
        t[i * n + i] += diag;
    }
    t
}

/// `E[M] = P_{x⊥} + (1+4σ²)/(1+2σ²) xx*` and `E[H] = P_{x⊥}` for
/// `M(g) = ((2σ²+1)/m) A* diag(ζ(g ⊛ x)) A`, `H = P_{x⊥} M P_{x⊥}`, over
/// kernels `g ~ CN(0, I_m)`. Also reports the quadratic forms along `x` and an
/// orthogonal direction `w`.
pub fn mc_m_expectation(
    x: &[C64],
    sigma_sq: f64,
    m: usize,
    kernels: usize,
    seed: u64,
) -> Result<Vec<McCheckReport>> {
    let n = x.len();
    require_small(n, 16)?;
    check_unit(x)?;
    crate::weighting::WeightingScheme::GaussianSmoothed { sigma_sq }.validate()?;
    if m < n {
        return Err(Error::dim(n, m, "kernel length must be at least n"));
    }
    let w = orthogonal_unit(x);
    let proj = identity_plus(x, -1.0, 1.0);
    let mut rng = stream(seed);
    let mut m_stats = MatrixStats::new(n);
    let mut h_stats = MatrixStats::new(n);
    let mut xmx = ComplexStats::default();
    let mut wmw = ComplexStats::default();
    let mut xmw = ComplexStats::default();
    let mut sample = vec![C64::new(0.0, 0.0); n * n];
    let mut tmp = vec![C64::new(0.0, 0.0); n * n];
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    let scale = 2.0 * sigma_sq + 1.0;
    for _ in 0..kernels {
        let g = complex_gaussian_vec(&mut rng, m);
        accumulate_gram(&g, x, |r| zeta_abs(r, sigma_sq), scale, &mut sample);
        m_stats.push(&sample);
        matmul(&proj, &sample, &mut tmp, n);
        matmul(&tmp, &proj, &mut h, n);
        h_stats.push(&h);
        xmx.push(quad(x, &sample, x));
        wmw.push(quad(&w, &sample, &w));
        xmw.push(quad(x, &sample, &w));
    }
    let coef = (1.0 + 4.0 * sigma_sq) / (1.0 + 2.0 * sigma_sq);
    let target_m = identity_plus(x, coef - 1.0, 1.0);
    Ok(vec![
        m_stats.report(format!("M_expectation(n={n},m={m},sigma_sq={sigma_sq})"), &target_m),
        h_stats.report(format!("H_expectation(n={n},m={m},sigma_sq={sigma_sq})"), &proj),
        xmx.real_report(format!("xMx(sigma_sq={sigma_sq})"), coef),
        wmw.real_report(format!("wMw(sigma_sq={sigma_sq})"), 1.0),
        xmw.complex_report(format!("xMw(sigma_sq={sigma_sq})"), C64::new(0.0, 0.0)),
    ])
}

/// `E[Y] = ‖x‖² I + xx*` for `Y = (1/m) A* diag(|Ax|²) A` over random kernels.
pub fn mc_y_expectation(x: &[C64], m: usize, kernels: usize, seed: u64) -> Result<McCheckReport> {
    let n = x.len();
    require_small(n, 16)?;
    check_unit(x)?;
    if m < n {
        return Err(Error::dim(n, m, "kernel length must be at least n"));
    }
    let mut rng = stream(seed);
    let mut stats = MatrixStats::new(n);
    let mut sample = vec![C64::new(0.0, 0.0); n * n];
    for _ in 0..kernels {
        let g = complex_gaussian_vec(&mut rng, m);
        accumulate_gram(&g, x, |r| r * r, 1.0, &mut sample);
        stats.push(&sample);
    }
    Ok(stats.report(format!("Y_expectation(n={n},m={m})"), &identity_plus(x, 1.0, 1.0)))
}

fn matmul(a: &[C64], b: &[C64], out: &mut [C64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
        }
    }
}

/// `u* S v` for row-major `S`.
fn quad(u: &[C64], s: &[C64], v: &[C64]) -> C64 {
    let n = u.len();
    (0..n)
        .map(|i| u[i].conj() * (0..n).map(|j| s[i * n + j] * v[j]).sum::<C64>())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen over random samples (negative on violation).
    pub worst_margin: f64,
    pub pass: bool,
}

/// `rhs − lhs` of `|e^{iφ(z'+z)} − e^{iφ(z')}| ≤ 2·1{|z| ≥ ρ|z'|} + |Im(z/z')|/(1−ρ)`.
pub fn phase_diff_margin(z: C64, zp: C64, rho: f64) -> f64 {
    let lhs = (phase_unit(zp + z) - phase_unit(zp)).norm();
    let indicator = if z.norm() >= rho * zp.norm() { 2.0 } else { 0.0 };
    let rhs = indicator + (z / zp).im.abs() / (1.0 - rho);
    rhs - lhs
}

/// `rhs − lhs` of `|1 − e^{iφ(1+z)} + i Im z| ≤ (2−ρ)/(1−ρ)² |z|²`.
pub fn phase_approx_margin(z: C64, rho: f64) -> f64 {
    let lhs = (C64::new(1.0, 0.0) - phase_unit(C64::new(1.0, 0.0) + z) + C64::new(0.0, z.im)).norm();
    let rhs = (2.0 - rho) / ((1.0 - rho) * (1.0 - rho)) * z.norm_sqr();
    rhs - lhs
}

fn require_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rho must lie in (0, 1), got {rho}")))
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

/// Samples pairs `(z, z')` with `|z|/|z'|` log-uniform over `[1e-4, 10]` and
/// uniform relative phase, so both branches of the indicator are exercised.
pub fn check_phase_diff_inequality(rho: f64, samples: usize, seed: u64) -> Result<InequalityReport> {
    require_rho(rho)?;
    let mut rng = stream(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let zp = phase_unit(complex_gaussian(&mut rng)) * log_uniform(&mut rng, -3.0, 3.0);
        let ratio = log_uniform(&mut rng, -4.0, 1.0);
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let z = zp * C64::from_polar(ratio, angle);
        let margin = phase_diff_margin(z, zp, rho);
        if margin < -INEQUALITY_SLACK {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    Ok(InequalityReport {
        name: format!("phase_diff(rho={rho})"),
        samples,
        violations,
        worst_margin: worst,
        pass: violations == 0,
    })
}

/// Samples `z` uniformly in the disk `|z| ≤ ρ`.
pub fn check_phase_approx_inequality(rho: f64, samples: usize, seed: u64) -> Result<InequalityReport> {
    require_rho(rho)?;
    let mut rng = stream(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let r = rho * rng.random::<f64>().sqrt();
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let margin = phase_approx_margin(C64::from_polar(r, angle), rho);
        if margin < -INEQUALITY_SLACK {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    Ok(InequalityReport {
        name: format!("phase_approx(rho={rho})"),
        samples,
        violations,
        worst_margin: worst,
        pass: violations == 0,
    })
}

/// Leading eigenpair of a Hermitian matrix via a dense symmetric eigensolver.
pub fn dense_leading_eigenpair(matrix: &DMatrix<C64>) -> Result<(ComplexVector, f64)> {
    let n = matrix.nrows();
    if n == 0 || n != matrix.ncols() || n > 64 {
        return Err(Error::InvalidInput("expected a square matrix with 1 <= n <= 64".into()));
    }
    let scale = matrix.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in 0..n {
            if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::InvalidInput("matrix is not Hermitian".into()));
            }
        }
    }
    let eig = matrix.clone().symmetric_eigen();
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
    let vn = norm(&v);
    let v = ComplexVector::new(v.into_iter().map(|c| c / vn).collect())?;
    Ok((v, lambda))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaInftyReport {
    pub sigma_sq: f64,
    pub epsilon: f64,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Sample sizes and seed for the full verification suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub scalar_samples: usize,
    pub kernel_samples: usize,
    pub kernel_dim: usize,
    pub kernel_len: usize,
    pub inequality_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            scalar_samples: 1_000_000,
            kernel_samples: 100_000,
            kernel_dim: 8,
            kernel_len: 64,
            inequality_samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub config: VerifyConfig,
    pub monte_carlo: Vec<McCheckReport>,
    pub inequalities: Vec<InequalityReport>,
    pub delta_infty: DeltaInftyReport,
    pub all_pass: bool,
}

/// Runs every check with streams derived from `config.seed`.
pub fn run_verify_suite(config: &VerifyConfig) -> Result<VerifySummary> {
    let s = config.seed;
    let seed = |k: u64| mix_seed(s, &[0x7e51, k]);
    let n_s = config.scalar_samples;
    let n_k = config.kernel_samples;
    let mut mc = Vec::new();

    for (k, t) in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0].into_iter().enumerate() {
        mc.push(mc_psi_smoothing(t, n_s, seed(k as u64)));
    }
    for (k, s2) in [0.51, 1.0, 1e3].into_iter().enumerate() {
        mc.extend(mc_zeta_moments(s2, n_s, seed(10 + k as u64)));
    }
    mc.push(mc_eta_smoothing(C64::new(0.0, 0.0), 0.51, n_s, seed(20))?);
    mc.push(mc_eta_smoothing(C64::new(1.0, 0.0), 0.51, n_s, seed(21))?);
    mc.push(mc_xi_smoothing(C64::new(1.0, 0.0), 1.0, n_s, seed(22)));
    mc.push(mc_nu_smoothing(C64::new(1.0, 0.5), 0.51, n_s, seed(23))?);

    let mut xrng = stream(seed(30));
    let x = complex_gaussian_vec(&mut xrng, config.kernel_dim);
    let xn = norm(&x);
    let x: Vec<C64> = x.iter().map(|c| c / xn).collect();
    mc.extend(mc_fourth_moment(&x, n_s, seed(31))?);
    mc.extend(mc_m_expectation(&x, 0.51, config.kernel_len, n_k, seed(32))?);
    mc.push(mc_y_expectation(&x, config.kernel_len, n_k, seed(33))?);

    let inequalities = vec![
        check_phase_diff_inequality(0.5, config.inequality_samples, seed(40))?,
        check_phase_approx_inequality(0.5, config.inequality_samples, seed(41))?,
    ];

    let value = delta_infty(0.51, 0.2, GridSpec::default())?;
    let delta = DeltaInftyReport {
        sigma_sq: 0.51,
        epsilon: 0.2,
        value,
        bound: 0.404,
        pass: value <= 0.404 + 1e-3,
    };

    let all_pass = mc.iter().all(|r| r.pass) && inequalities.iter().all(|r| r.pass) && delta.pass;
    Ok(VerifySummary {
        config: *config,
        monte_carlo: mc,
        inequalities,
        delta_infty: delta,
        all_pass,
    })
}
