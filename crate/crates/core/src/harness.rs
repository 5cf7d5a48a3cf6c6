//! Numeric verification: random jets and group elements, closed-form test
//! surfaces, a finite-difference oracle and invariance reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{conformal_traces_at, moebius_act, MoebiusElement};
use crate::error::{Error, Result};
use crate::euclidean::{euclidean_act, power_traces_at, shape_operator_at, EuclideanMotion};
use crate::expr::{Evaluator, Expr};
use crate::invariant::Family;
use crate::jet::JetPoint2;
use crate::series::Mat;

/// Attempts per trial before a trial counts as failed.
pub const MAX_ATTEMPTS: usize = 10;
/// Parameter bound for near-identity Möbius samples.
pub const MOEBIUS_BOUND: f64 = 0.3;
/// Conformal trials need `τ°_2 > UMBILIC_RTOL · |A|²`.
pub const UMBILIC_RTOL: f64 = 1e-6;

const EUCLIDEAN_JET_SCALE: f64 = 1.0;
const EUCLIDEAN_MAX_ANGLE: f64 = 1.0;
const EUCLIDEAN_MAX_SHIFT: f64 = 1.0;
const CONFORMAL_JET_SCALE: f64 = 0.5;

/// Graphs `u = f(x)` with hand-differentiated 2-jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Surface {
    /// `u = 0`.
    Plane,
    /// Lower cap `u = r − √(r² − |x|²)`, umbilic with curvature `1/r`.
    Sphere(f64),
    /// `u = r − √(r² − x_1²)`.
    Cylinder(f64),
    /// `x_1² + (a − u)² = a² cosh²(x_2 / a)`, `n = 2` only.
    Catenoid(f64),
}

impl Surface {
    pub fn sphere(r: f64) -> Result<Self> {
        positive(r).map(|_| Surface::Sphere(r))
    }

    pub fn cylinder(r: f64) -> Result<Self> {
        positive(r).map(|_| Surface::Cylinder(r))
    }

    pub fn catenoid(a: f64) -> Result<Self> {
        positive(a).map(|_| Surface::Catenoid(a))
    }

    pub fn name(&self) -> String {
        match self {
            Surface::Plane => "plane".into(),
            Surface::Sphere(r) => format!("sphere({r})"),
            Surface::Cylinder(r) => format!("cylinder({r})"),
            Surface::Catenoid(a) => format!("catenoid({a})"),
        }
    }

    pub fn supports(&self, n: usize) -> bool {
        match self {
            Surface::Catenoid(_) => n == 2,
            Surface::Cylinder(_) => n >= 1,
            _ => true,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if self.supports(x.len()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{} is not defined for n = {}", self.name(), x.len())))
        }
    }

    /// `f(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let root = |s2: f64| if s2 > 0.0 { Ok(s2.sqrt()) } else { Err(Error::OutOfDomain) };
        match *self {
            Surface::Plane => Ok(0.0),
            Surface::Sphere(r) => Ok(r - root(r * r - norm2(x))?),
            Surface::Cylinder(r) => Ok(r - root(r * r - x[0] * x[0])?),
            Surface::Catenoid(a) => {
                let big_r = a * (x[1] / a).cosh();
                Ok(a - root(big_r * big_r - x[0] * x[0])?)
            }
        }
    }

    /// The exact 2-jet of the graph at `x0`.
    pub fn jet_at(&self, x0: &[f64]) -> Result<JetPoint2> {
        let n = x0.len();
        let u = self.value(x0)?;
        let mut du = vec![0.0; n];
        let mut d2u = Mat::zeros(n, n);
        match *self {
            Surface::Plane => {}
            Surface::Sphere(r) => {
                let s = (r * r - norm2(x0)).sqrt();
                for i in 0..n {
                    du[i] = x0[i] / s;
                    for j in 0..n {
                        d2u[(i, j)] = x0[i] * x0[j] / s.powi(3) + if i == j { 1.0 / s } else { 0.0 };
                    }
                }
            }
            Surface::Cylinder(r) => {
                let s = (r * r - x0[0] * x0[0]).sqrt();
                du[0] = x0[0] / s;
                d2u[(0, 0)] = r * r / s.powi(3);
            }
            Surface::Catenoid(a) => {
                let (ch, sh) = ((x0[1] / a).cosh(), (x0[1] / a).sinh());
                let big_r = a * ch;
                let rr1 = big_r * sh;
                let s = (big_r * big_r - x0[0] * x0[0]).sqrt();
                du[0] = x0[0] / s;
                du[1] = -rr1 / s;
                d2u[(0, 0)] = big_r * big_r / s.powi(3);
                d2u[(0, 1)] = -x0[0] * rr1 / s.powi(3);
                d2u[(1, 0)] = d2u[(0, 1)];
                d2u[(1, 1)] = -(sh * sh + ch * ch) / s + rr1 * rr1 / s.powi(3);
            }
        }
        JetPoint2::new(u, x0.to_vec(), du, d2u)
    }

    /// `count` points in a region where the graph is well inside its domain.
    pub fn sample_points(&self, n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reach = match *self {
            Surface::Plane => 1.0,
            Surface::Sphere(r) => 0.5 * r / (n.max(1) as f64).sqrt(),
            Surface::Cylinder(r) | Surface::Catenoid(r) => 0.5 * r,
        };
        (0..count).map(|_| (0..n).map(|_| rng.gen_range(-reach..=reach)).collect()).collect()
    }
}

fn positive(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("surface parameter must be positive".into()))
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

/// Central second-order differences of `surface` at `x0` with step `h`.
pub fn fd_jet(surface: &Surface, x0: &[f64], h: f64) -> Result<JetPoint2> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let n = x0.len();
    let f = |offsets: &[(usize, f64)]| {
        let mut x = x0.to_vec();
        for &(i, d) in offsets {
            x[i] += d;
        }
        surface.value(&x)
    };
    let f0 = f(&[])?;
    let mut du = vec![0.0; n];
    let mut d2u = Mat::zeros(n, n);
    for i in 0..n {
        let (fp, fm) = (f(&[(i, h)])?, f(&[(i, -h)])?);
        du[i] = (fp - fm) / (2.0 * h);
        d2u[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (f(&[(i, h), (j, h)])? - f(&[(i, h), (j, -h)])? - f(&[(i, -h), (j, h)])?
                + f(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            d2u[(i, j)] = v;
            d2u[(j, i)] = v;
        }
    }
    JetPoint2::new(f0, x0.to_vec(), du, d2u)
}

/// A jet with every coordinate uniform in `[−scale, scale]`, `d2u` symmetrized.
pub fn sample_jet(n: usize, seed: u64, scale: f64) -> JetPoint2 {
    sample_jet_from(&mut ChaCha8Rng::seed_from_u64(seed), n, scale)
}

pub fn sample_jet_from(rng: &mut impl Rng, n: usize, scale: f64) -> JetPoint2 {
    let mut draw = || rng.gen_range(-1.0..=1.0) * scale;
    let u = draw();
    let x: Vec<f64> = (0..n).map(|_| draw()).collect();
    let du: Vec<f64> = (0..n).map(|_| draw()).collect();
    let mut d2u = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = draw();
            d2u[(i, j)] = v;
            d2u[(j, i)] = v;
        }
    }
    JetPoint2::new(u, x, du, d2u).expect("sampled jet is valid")
}

/// The per-trial generator: `seed` fixes the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub suite: Family,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub tol: f64,
    pub seed: u64,
    pub discarded: usize,
}

impl TrialReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Outcome {
    failures: usize,
    discarded: usize,
    abs: f64,
    rel: f64,
}

impl Outcome {
    fn merge(self, o: Outcome) -> Outcome {
        Outcome {
            failures: self.failures + o.failures,
            discarded: self.discarded + o.discarded,
            abs: self.abs.max(o.abs),
            rel: self.rel.max(o.rel),
        }
    }
}

/// Per-trial errors `(abs, rel)`, or `None` when the sample must be redrawn.
fn euclidean_trial(n: usize, rng: &mut ChaCha8Rng) -> Option<(f64, f64)> {
    let p = sample_jet_from(rng, n, EUCLIDEAN_JET_SCALE);
    let m = EuclideanMotion::random(n, rng, EUCLIDEAN_MAX_ANGLE, EUCLIDEAN_MAX_SHIFT);
    let q = euclidean_act(&m, &p).ok()?;
    let a = frobenius(&shape_operator_at(&p));
    let (before, after) = (power_traces_at(&p), power_traces_at(&q));
    let mut errs = (0.0f64, 0.0f64);
    for (k, (x, y)) in before.iter().zip(&after).enumerate() {
        let d = (x - y).abs();
        // |tr A^m| ≤ |A|_F^m
        let scale = x.abs().max(a.powi(k as i32 + 1));
        errs.0 = errs.0.max(d);
        errs.1 = errs.1.max(if scale > 0.0 { d / scale } else { d });
    }
    Some(errs)
}

fn conformal_trial(n: usize, rng: &mut ChaCha8Rng) -> Option<(f64, f64)> {
    let p = sample_jet_from(rng, n, CONFORMAL_JET_SCALE);
    let m = MoebiusElement::random_near_identity(n, rng, MOEBIUS_BOUND);
    let a = frobenius(&shape_operator_at(&p));
    let before = conformal_traces_at(&p);
    if before[0].is_nan() || before[0] <= UMBILIC_RTOL * a * a {
        return None;
    }
    let q = moebius_act(&m, &p).ok()?;
    let after = conformal_traces_at(&q);
    if after[0].is_nan() || after[0] <= 0.0 {
        return Some((f64::INFINITY, f64::INFINITY));
    }
    let c = (after[0] / before[0]).sqrt();
    let mut errs = (0.0f64, 0.0f64);
    for (i, (x, y)) in before.iter().zip(&after).enumerate() {
        let h = i as i32 + 2;
        let rho = |t: f64, t2: f64| t * t / t2.powi(h);
        let d_rho = (rho(*x, before[0]) - rho(*y, after[0])).abs();
        // |τ°_h| ≤ (τ°_2)^{h/2}
        let d_c = (y - c.powi(h) * x).abs() / (c.powi(h) * before[0].powf(h as f64 / 2.0));
        errs.0 = errs.0.max(d_rho);
        errs.1 = errs.1.max(d_rho.max(d_c));
    }
    Some(errs)
}

fn frobenius(a: &Mat<f64>) -> f64 {
    a.to_rows().iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs `trials` independent invariance checks. Each trial redraws on
/// chart-boundary, non-admissible or near-umbilic samples up to
/// [`MAX_ATTEMPTS`] times; exhausting them counts as a failure.
pub fn run_invariance_suite(group: Family, n: usize, trials: usize, tol: f64, seed: u64) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if group == Family::Conformal && n < 2 {
        return Err(Error::NoInvariants);
    }
    let one = |t: usize| {
        let mut rng = trial_rng(seed, t);
        let mut out = Outcome::default();
        for _ in 0..MAX_ATTEMPTS {
            let r = match group {
                Family::Euclidean => euclidean_trial(n, &mut rng),
                Family::Conformal => conformal_trial(n, &mut rng),
            };
            match r {
                Some((abs, rel)) => {
                    out.abs = abs;
                    out.rel = rel;
                    out.failures = usize::from(rel.is_nan() || rel > tol);
                    return out;
                }
                None => out.discarded += 1,
            }
        }
        out.failures = 1;
        out
    };
    let run = || (0..trials).into_par_iter().map(one).reduce(Outcome::default, Outcome::merge);
    let total = match thread_cap() {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(TrialReport {
        suite: group,
        n,
        trials,
        failures: total.failures,
        max_abs_error: total.abs,
        max_rel_error: total.rel,
        tol,
        seed,
        discarded: total.discarded,
    })
}

fn thread_cap() -> Option<usize> {
    std::env::var("INVPDE_THREADS").ok()?.trim().parse().ok().filter(|&k| k > 0)
}

/// `max_k |pde(jet_at(x_k))|` over the sample points.
pub fn solution_residual(pde: &Expr, surface: &Surface, points: &[Vec<f64>]) -> Result<f64> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("at least one sample point is required".into()));
    };
    let eval = Evaluator::new(&pde.to_rat(first.len())?);
    let mut worst = 0.0f64;
    for x in points {
        let p = surface.jet_at(x)?;
        worst = worst.max(eval.eval(&|v| p.value(v))?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_scale_gives_zero_jet() {
        assert_eq!(sample_jet(3, 5, 0.0).max_abs_diff(&JetPoint2::zero(3)), 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_jet(2, 11, 1.0), sample_jet(2, 11, 1.0));
        assert_ne!(sample_jet(2, 11, 1.0), sample_jet(2, 12, 1.0));
        let j = sample_jet(3, 1, 2.0);
        assert_eq!(j.d2u, j.d2u.transpose());
    }

    #[test]
    fn plane_differences_are_exact() {
        for h in [0.1, 1e-3] {
            let j = fd_jet(&Surface::Plane, &[0.3, -0.2], h).unwrap();
            assert_eq!(j.max_abs_diff(&JetPoint2::new(0.0, vec![0.3, -0.2], vec![0.0; 2], Mat::zeros(2, 2)).unwrap()), 0.0);
        }
    }

    #[test]
    fn sphere_pole() {
        let s = Surface::sphere(1.0).unwrap();
        let exact = s.jet_at(&[0.0, 0.0]).unwrap();
        assert_eq!(exact.d2u, Mat::identity(2));
        assert!(fd_jet(&s, &[0.0, 0.0], 1e-3).unwrap().max_abs_diff(&exact) <= 1e-5);
    }

    #[test]
    fn closed_forms_match_differences() {
        let cases = [
            (Surface::sphere(2.0).unwrap(), vec![0.3, -0.4, 0.2]),
            (Surface::cylinder(1.5).unwrap(), vec![0.5, 0.7]),
            (Surface::catenoid(1.0).unwrap(), vec![0.3, 0.4]),
        ];
        for (s, x) in cases {
            let d = fd_jet(&s, &x, 1e-4).unwrap().max_abs_diff(&s.jet_at(&x).unwrap());
            assert!(d < 1e-6, "{} {d}", s.name());
        }
    }

    #[test]
    fn out_of_domain() {
        let s = Surface::sphere(1.0).unwrap();
        assert_eq!(s.jet_at(&[1.0, 0.5]), Err(Error::OutOfDomain));
        assert_eq!(fd_jet(&s, &[0.0, 0.9999], 1e-3), Err(Error::OutOfDomain));
        assert!(Surface::catenoid(1.0).unwrap().jet_at(&[0.1]).is_err());
    }

    #[test]
    fn catenoid_is_minimal_and_sphere_umbilic() {
        let c = Surface::catenoid(0.8).unwrap();
        for x in c.sample_points(2, 20, 3) {
            let t = power_traces_at(&c.jet_at(&x).unwrap());
            assert!(t[0].abs() < 1e-12, "{t:?}");
        }
        let s = Surface::sphere(1.3).unwrap();
        for x in s.sample_points(3, 20, 4) {
            let a = shape_operator_at(&s.jet_at(&x).unwrap());
            assert!((&a - &Mat::identity(3).scale(&(1.0 / 1.3))).max_abs() < 1e-12);
        }
    }

    #[test]
    fn suite_rejects_empty_runs() {
        assert!(run_invariance_suite(Family::Euclidean, 2, 0, 1e-9, 1).is_err());
        assert_eq!(run_invariance_suite(Family::Conformal, 1, 5, 1e-9, 1), Err(Error::NoInvariants));
    }

    #[test]
    fn suite_is_reproducible() {
        let a = run_invariance_suite(Family::Euclidean, 2, 50, 1e-9, 9).unwrap();
        let b = run_invariance_suite(Family::Euclidean, 2, 50, 1e-9, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{a:?}");
        let c = run_invariance_suite(Family::Conformal, 3, 50, 1e-7, 9).unwrap();
        assert!(c.passed(), "{c:?}");
    }
}
