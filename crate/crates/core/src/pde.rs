//! Method-of-lines solver for `u_t + u u_x = (γ + δ t^r) u_xx` on a fixed
//! physical grid, and the measurements used to check the reduced models.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{AmplitudeLawODE, AmplitudeTrace, CaseConfig, TraceSample};
use crate::scalar::Real;

/// Grid sizing in similarity units: the physical half-width is chosen so
/// that `|ζ| ≤ half_width` at the final time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_width: f64,
    pub points: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 64;
    pub const MIN_HALF_WIDTH: f64 = 8.0;

    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if points < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} interior points, got {points}",
                Self::MIN_POINTS
            )));
        }
        if !(half_width >= Self::MIN_HALF_WIDTH) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be >= {}, got {half_width}",
                Self::MIN_HALF_WIDTH
            )));
        }
        Ok(Grid { half_width, points })
    }

    /// Similarity-space spacing `2L/(N+1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points as f64 + 1.0)
    }

    /// Physical half-width covering the similarity window at `t_end`.
    pub fn physical_half_width(&self, cfg: &CaseConfig, t_end: f64) -> f64 {
        self.half_width / cfg.zeta_scale * t_end.powf(cfg.beta)
    }

    /// Same half-width, `2N + 1` points: every old node is kept and the
    /// spacing halves.
    pub fn refined(&self) -> Self {
        Grid { points: 2 * self.points + 1, ..*self }
    }
}

/// Interior values of `u` at `x_i = −X + (i+1)·dx`; the two boundary
/// nodes are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<R> {
    pub values: Vec<R>,
    pub time: R,
    pub dx: R,
}

impl<R: Real> Field<R> {
    pub fn zeros(points: usize, half_width: R, time: R) -> Self {
        let dx = R::lit(2.0) * half_width / R::lit(points as f64 + 1.0);
        Field { values: vec![R::zero(); points], time, dx }
    }

    pub fn half_width(&self) -> R {
        self.dx * R::lit(self.values.len() as f64 + 1.0) / R::lit(2.0)
    }

    pub fn x(&self, i: usize) -> R {
        -self.half_width() + self.dx * R::lit(i as f64 + 1.0)
    }

    /// `u = C t^(−α) A exp(−ζ²/2)`, the critical mode at amplitude `A`.
    pub fn gaussian(cfg: &CaseConfig, points: usize, half_width: R, time: R, amp: R) -> Self {
        let mut f = Self::zeros(points, half_width, time);
        let scale = cfg.amplitude_scale(time) * amp;
        for i in 0..points {
            let z = cfg.zeta(f.x(i), time);
            f.values[i] = scale * (-z * z / R::lit(2.0)).exp();
        }
        f
    }

    pub fn max_abs(&self) -> R {
        self.values.iter().fold(R::zero(), |m, v| m.max(v.abs()))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,u")?;
        for (i, u) in self.values.iter().enumerate() {
            let x = self.x(i).to_f64().unwrap_or(f64::NAN);
            writeln!(out, "{:e},{:e}", x, u.to_f64().unwrap_or(f64::NAN))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub cfl: f64,
    pub nonlinear: bool,
    /// Times at which snapshots are taken; the final time is always added.
    pub sample_times: Vec<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cfl: 0.4, nonlinear: true, sample_times: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutput<R> {
    pub snapshots: Vec<Field<R>>,
    pub steps: usize,
}

fn rhs<R: Real>(u: &[R], out: &mut [R], nu: R, dx: R, nonlinear: bool) {
    let n = u.len();
    let at = |i: isize| if i < 0 || i as usize >= n { R::zero() } else { u[i as usize] };
    let half = R::lit(0.5);
    let inv_2dx = R::one() / (R::lit(2.0) * dx);
    let inv_dx2 = R::one() / (dx * dx);
    for i in 0..n {
        let (l, c, r) = (at(i as isize - 1), u[i], at(i as isize + 1));
        let mut d = nu * (r - R::lit(2.0) * c + l) * inv_dx2;
        if nonlinear {
            d = d - (half * r * r - half * l * l) * inv_2dx;
        }
        out[i] = d;
    }
}

fn axpy<R: Real>(dst: &mut [R], base: &[R], k: &[R], h: R) {
    for ((d, b), k) in dst.iter_mut().zip(base).zip(k) {
        *d = *b + h * *k;
    }
}

pub fn solve<R: Real>(
    cfg: &CaseConfig,
    initial: &Field<R>,
    t_end: R,
    opts: &SolveOptions,
) -> Result<SolveOutput<R>> {
    solve_observe(cfg, initial, t_end, opts, |_| {})
}

/// Like [`solve`], calling `observe` after every accepted step.
pub fn solve_observe<R: Real>(
    cfg: &CaseConfig,
    initial: &Field<R>,
    t_end: R,
    opts: &SolveOptions,
    mut observe: impl FnMut(&Field<R>),
) -> Result<SolveOutput<R>> {
    if !(initial.time > R::zero()) {
        return Err(Error::InvalidParameter("initial time must be > 0".into()));
    }
    if !(t_end > initial.time) {
        return Err(Error::InvalidParameter("final time must exceed the initial time".into()));
    }
    if !(opts.cfl > 0.0 && opts.cfl <= 0.5) {
        return Err(Error::InvalidParameter(format!("cfl must be in (0, 0.5], got {}", opts.cfl)));
    }
    let mut stops: Vec<R> = opts
        .sample_times
        .iter()
        .map(|&t| R::lit(t))
        .filter(|&t| t > initial.time && t < t_end)
        .collect();
    stops.push(t_end);
    stops.sort_by(|a, b| a.partial_cmp(b).expect("finite sample times"));
    stops.dedup();

    let n = initial.values.len();
    let dx = initial.dx;
    let cfl = R::lit(opts.cfl);
    let half = R::lit(0.5);
    let mut field = initial.clone();
    let mut snapshots = Vec::with_capacity(stops.len());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![R::zero(); n], vec![R::zero(); n], vec![R::zero(); n], vec![R::zero(); n], vec![R::zero(); n]);
    let mut steps = 0usize;
    let tiny = R::lit(1e-14);

    for stop in stops {
        while field.time < stop {
            let t = field.time;
            let nu = cfg.diffusivity(t);
            let mut dt = cfl * dx * dx / (R::lit(2.0) * nu);
            if opts.nonlinear {
                let umax = field.max_abs();
                if umax > R::zero() {
                    dt = dt.min(cfl * dx / umax);
                }
            }
            if dt < tiny * t {
                return Err(Error::SolverAborted {
                    time: t.to_f64().unwrap_or(f64::NAN),
                    reason: "time step underflow".into(),
                });
            }
            let last = t + dt >= stop;
            if last {
                dt = stop - t;
            }
            let u = &field.values;
            rhs(u, &mut k1, nu, dx, opts.nonlinear);
            let nu_mid = cfg.diffusivity(t + half * dt);
            axpy(&mut tmp, u, &k1, half * dt);
            rhs(&tmp, &mut k2, nu_mid, dx, opts.nonlinear);
            axpy(&mut tmp, u, &k2, half * dt);
            rhs(&tmp, &mut k3, nu_mid, dx, opts.nonlinear);
            axpy(&mut tmp, u, &k3, dt);
            rhs(&tmp, &mut k4, cfg.diffusivity(t + dt), dx, opts.nonlinear);
            let sixth = dt / R::lit(6.0);
            for i in 0..n {
                field.values[i] =
                    field.values[i] + sixth * (k1[i] + R::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
            }
            field.time = if last { stop } else { t + dt };
            steps += 1;
            if field.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::SolverAborted {
                    time: field.time.to_f64().unwrap_or(f64::NAN),
                    reason: "non-finite field value".into(),
                });
            }
            observe(&field);
        }
        snapshots.push(field.clone());
    }
    Ok(SolveOutput { snapshots, steps })
}

/// `(1/√π) ∫ v exp(−ζ²/2) dζ` with `v = u / (C t^(−α))`, trapezoid rule.
pub fn extract_amplitude<R: Real>(f: &Field<R>, cfg: &CaseConfig) -> R {
    let scale = cfg.amplitude_scale(f.time);
    let dz = cfg.zeta(f.dx, f.time);
    // boundary nodes are zero, so the trapezoid rule is a plain sum
    let sum = f.values.iter().enumerate().fold(R::zero(), |acc, (i, u)| {
        let z = cfg.zeta(f.x(i), f.time);
        acc + *u / scale * (-z * z / R::lit(2.0)).exp()
    });
    sum * dz / R::lit(std::f64::consts::PI.sqrt())
}

pub fn mass<R: Real>(f: &Field<R>) -> R {
    f.values.iter().fold(R::zero(), |a, v| a + *v) * f.dx
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `dA/d(log t) / A³` fitted over `t ∈ [t_from, t_to]`, using the mean
/// amplitude of the window for `A³`.
pub fn cubic_rate(trace: &AmplitudeTrace, t_from: f64, t_to: f64) -> Option<f64> {
    let window: Vec<&TraceSample> =
        trace.samples().iter().filter(|s| s.t >= t_from && s.t <= t_to).collect();
    let s: Vec<f64> = window.iter().map(|p| p.t.ln()).collect();
    let a: Vec<f64> = window.iter().map(|p| p.amp).collect();
    let slope = fit_slope(&s, &a)?;
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    Some(slope / mean.powi(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareWindow {
    /// Start of the late window; the law is anchored at the first sample
    /// at or after it.
    pub late_start: f64,
    /// The early window is `[t_first, early_factor · t_first)`.
    pub early_factor: f64,
    /// RK4 steps per unit of `log t` when integrating the law.
    pub steps_per_unit: usize,
}

impl Default for CompareWindow {
    fn default() -> Self {
        CompareWindow { late_start: 10.0, early_factor: 10.0, steps_per_unit: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub anchor_time: f64,
    pub late_max_relative_deviation: f64,
    /// `k` in `|A_pde − A_law| ∝ t^(−k)` over the early window.
    pub transient_exponent: Option<f64>,
    pub expected_exponent: f64,
    pub law_values: Vec<f64>,
}

fn advance(law: &AmplitudeLawODE, mut a: f64, s_from: f64, s_to: f64, per_unit: usize) -> f64 {
    let span = s_to - s_from;
    let steps = ((span.abs() * per_unit as f64).ceil() as usize).max(1);
    let h = span / steps as f64;
    let f = |s: f64, a: f64| law.log_rate(a, s.exp());
    for i in 0..steps {
        let s = s_from + h * i as f64;
        let k1 = f(s, a);
        let k2 = f(s + h / 2.0, a + h / 2.0 * k1);
        let k3 = f(s + h / 2.0, a + h / 2.0 * k2);
        let k4 = f(s + h, a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    }
    a
}

pub fn compare(
    trace: &AmplitudeTrace,
    law: &AmplitudeLawODE,
    window: &CompareWindow,
) -> Result<ComparisonReport> {
    let samples = trace.samples();
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f.t, l.t),
        _ => return Err(Error::InvalidParameter("empty trace".into())),
    };
    if last < 10.0 * first * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter("trace must span at least one decade".into()));
    }
    let anchor = samples
        .iter()
        .position(|s| s.t >= window.late_start)
        .ok_or_else(|| Error::InvalidParameter("no sample in the late window".into()))?;

    let mut law_values = vec![0.0; samples.len()];
    law_values[anchor] = samples[anchor].amp;
    for i in anchor + 1..samples.len() {
        law_values[i] = advance(
            law,
            law_values[i - 1],
            samples[i - 1].t.ln(),
            samples[i].t.ln(),
            window.steps_per_unit,
        );
    }
    for i in (0..anchor).rev() {
        law_values[i] = advance(
            law,
            law_values[i + 1],
            samples[i + 1].t.ln(),
            samples[i].t.ln(),
            window.steps_per_unit,
        );
    }

    let late = samples[anchor..]
        .iter()
        .zip(&law_values[anchor..])
        .map(|(s, m)| ((s.amp - m) / m).abs())
        .fold(0.0, f64::max);

    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (s, m) in samples.iter().zip(&law_values) {
        let dev = (s.amp - m).abs();
        if s.t < window.early_factor * first && dev > 0.0 {
            lx.push(s.t.ln());
            ly.push(dev.ln());
        }
    }
    let transient_exponent = if lx.len() >= 3 { fit_slope(&lx, &ly).map(|k| -k) } else { None };

    Ok(ComparisonReport {
        anchor_time: samples[anchor].t,
        late_max_relative_deviation: late,
        transient_exponent,
        expected_exponent: law.config.transient_exponent(),
        law_values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub a0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub grid: Grid,
    pub cfl: f64,
    pub samples_per_decade: usize,
    pub nonlinear: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            a0: 0.3,
            t0: 1.0,
            t_end: 100.0,
            grid: Grid { half_width: 10.0, points: 1024 },
            cfl: 0.4,
            samples_per_decade: 40,
            nonlinear: true,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        Grid::new(self.grid.half_width, self.grid.points)?;
        if !(self.t0 > 0.0) || !(self.t_end > self.t0) {
            return Err(Error::InvalidParameter("need 0 < t0 < t_end".into()));
        }
        if !self.a0.is_finite() {
            return Err(Error::InvalidParameter("a0 must be finite".into()));
        }
        if self.samples_per_decade == 0 {
            return Err(Error::InvalidParameter("samples per decade must be >= 1".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::InvalidParameter(format!("cfl must be in (0, 0.5], got {}", self.cfl)));
        }
        Ok(())
    }

    /// Log-uniform sample times from `t0` to `t_end` inclusive.
    pub fn sample_times(&self) -> Vec<f64> {
        let decades = (self.t_end / self.t0).log10();
        let count = ((decades * self.samples_per_decade as f64).ceil() as usize).max(1);
        let mut times: Vec<f64> = (0..count)
            .map(|i| self.t0 * (self.t_end / self.t0).powf(i as f64 / count as f64))
            .collect();
        times.push(self.t_end);
        times
    }
}

#[derive(Clone, Debug)]
pub struct VerificationRun<R> {
    pub trace: AmplitudeTrace,
    pub snapshots: Vec<Field<R>>,
    pub steps: usize,
    /// `|M(t) − M(t₀)| / |M(t₀)|`, maximised over snapshots.
    pub mass_drift: f64,
}

pub fn run_verification<R: Real>(cfg: &CaseConfig, v: &VerifyConfig) -> Result<VerificationRun<R>> {
    v.validate()?;
    let half = R::lit(v.grid.physical_half_width(cfg, v.t_end));
    let init = Field::gaussian(cfg, v.grid.points, half, R::lit(v.t0), R::lit(v.a0));
    let times = v.sample_times();
    let opts = SolveOptions { cfl: v.cfl, nonlinear: v.nonlinear, sample_times: times.clone() };
    let out = solve(cfg, &init, R::lit(v.t_end), &opts)?;

    let to64 = |x: R| x.to_f64().unwrap_or(f64::NAN);
    let m0 = to64(mass(&init));
    let mut samples = vec![TraceSample {
        t: v.t0,
        amp: to64(extract_amplitude(&init, cfg)),
        theta: cfg.theta(v.t0),
    }];
    let mut drift: f64 = 0.0;
    for snap in &out.snapshots {
        let t = to64(snap.time);
        samples.push(TraceSample { t, amp: to64(extract_amplitude(snap, cfg)), theta: cfg.theta(t) });
        if m0 != 0.0 {
            drift = drift.max(((to64(mass(snap)) - m0) / m0).abs());
        }
    }
    Ok(VerificationRun {
        trace: AmplitudeTrace::new(samples)?,
        snapshots: out.snapshots,
        steps: out.steps,
        mass_drift: drift,
    })
}

/// Max-norm error of the linear (no advection) solver against the exact
/// spreading Gaussian at `t_end`.
pub fn linear_exact_error<R: Real>(cfg: &CaseConfig, v: &VerifyConfig) -> Result<f64> {
    let lin = VerifyConfig { nonlinear: false, samples_per_decade: 1, ..v.clone() };
    lin.validate()?;
    let half = R::lit(lin.grid.physical_half_width(cfg, lin.t_end));
    let init = Field::gaussian(cfg, lin.grid.points, half, R::lit(lin.t0), R::lit(lin.a0));
    let opts = SolveOptions { cfl: lin.cfl, nonlinear: false, sample_times: vec![] };
    let out = solve(cfg, &init, R::lit(lin.t_end), &opts)?;
    let last = out.snapshots.last().expect("final snapshot");
    let exact = Field::gaussian(cfg, lin.grid.points, half, last.time, R::lit(lin.a0));
    Ok(last
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (*a - *b).abs().to_f64().unwrap_or(f64::NAN))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::configure;

    fn case_b1() -> CaseConfig {
        configure(0.0, 1.0, -0.5, 1e-3).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(10.0, 63).is_err());
        assert!(Grid::new(7.9, 128).is_err());
        let g = Grid::new(8.0, 64).unwrap();
        assert!((g.spacing() - 16.0 / 65.0).abs() < 1e-15);
        assert!((g.refined().spacing() * 2.0 - g.spacing()).abs() < 1e-15);
    }

    #[test]
    fn amplitude_of_critical_mode() {
        let cfg = case_b1();
        let f = Field::gaussian(&cfg, 2048, 30.0f64, 2.0, 0.37);
        assert!((extract_amplitude(&f, &cfg) - 0.37).abs() < 1e-10);
        let z = Field::<f64>::zeros(128, 10.0, 1.0);
        assert_eq!(extract_amplitude(&z, &cfg), 0.0);
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = case_b1();
        let z = Field::<f64>::zeros(128, 10.0, 1.0);
        let out = solve(&cfg, &z, 2.0, &SolveOptions::default()).unwrap();
        assert!(out.snapshots.last().unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn snapshots_hit_sample_times() {
        let cfg = case_b1();
        let f = Field::gaussian(&cfg, 128, 12.0f64, 1.0, 0.2);
        let opts = SolveOptions { sample_times: vec![1.5, 2.0, 0.5, 9.0], ..Default::default() };
        let out = solve(&cfg, &f, 3.0, &opts).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![1.5, 2.0, 3.0]);
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let cfg = case_b1();
        let f = Field::gaussian(&cfg, 128, 12.0f64, 1.0, 0.2);
        assert!(solve(&cfg, &f, 0.5, &SolveOptions::default()).is_err());
        let hot = SolveOptions { cfl: 0.6, ..Default::default() };
        assert!(solve(&cfg, &f, 2.0, &hot).is_err());
        let mut early = f.clone();
        early.time = 0.0;
        assert!(solve(&cfg, &early, 2.0, &SolveOptions::default()).is_err());
    }

    #[test]
    fn even_data_stays_even_without_advection() {
        let cfg = case_b1();
        let f = Field::gaussian(&cfg, 201, 15.0f64, 1.0, 0.5);
        let opts = SolveOptions { nonlinear: false, ..Default::default() };
        let out = solve(&cfg, &f, 4.0, &opts).unwrap();
        let u = &out.snapshots[0].values;
        let n = u.len();
        for i in 0..n / 2 {
            assert!((u[i] - u[n - 1 - i]).abs() <= 1e-15 * u[n / 2].abs());
        }
    }

    #[test]
    fn slope_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&x, &y).unwrap() - 2.0).abs() < 1e-15);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
        assert!(fit_slope(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn sample_times_are_log_uniform() {
        let v = VerifyConfig { samples_per_decade: 10, ..Default::default() };
        let t = v.sample_times();
        assert_eq!(t.len(), 21);
        assert_eq!(t[0], 1.0);
        assert!((t[10] - 10.0).abs() < 1e-12);
        assert!((t[20] - 100.0).abs() < 1e-9);
    }
}
