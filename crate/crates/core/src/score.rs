//! Score function of the innovation density and its Fisher-type moments.
//!
//! A family fixes a zero-mean, unit-variance innovation density f and exposes
//! M_f = f'/f, the scale companion N_f(x) = 1 + x M_f(x), the derivatives of
//! M_f, and the moments I_j = E[eps^j M_f(eps)^2] for j in {0, 1, 2}. The
//! Student-t member is rescaled by sqrt(nu/(nu-2)) so all variance
//! normalizations used by the test statistics hold exactly.

use crate::error::{Error, Result};
use crate::quad;
use rand::Rng;
use rand_distr::{StandardNormal, StudentT};
use statrs::function::gamma::ln_gamma;

/// Absolute tolerance for every moment quadrature.
const MOMENT_TOL: f64 = 1e-8;
/// Truncation radius for the heavy-tail sensitivity check.
const TAIL_RADIUS: f64 = 100.0;
/// Tail mass beyond which a second-score moment is flagged as tail-dominated.
const TAIL_FLAG: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind {
    Gaussian,
    /// Student-t with `nu` degrees of freedom, rescaled to unit variance.
    StudentT { nu: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreFamily {
    kind: FamilyKind,
    /// I_0, I_1, I_2 cached at construction; the plug-in variance estimators
    /// read them in hot loops.
    moments: [f64; 3],
}

/// Residuals of the five moment identities every admissible density must
/// satisfy: E[M_f] = 0, E[eps M_f] = -1, E[Mdot_f + M_f^2] = 0,
/// E[eps (Mdot_f + M_f^2)] = 0, E[eps^2 (Mdot_f + M_f^2)] = 2.
#[derive(Clone, Copy, Debug)]
pub struct RegularityReport {
    pub residuals: [f64; 5],
    pub targets: [f64; 5],
    /// Mass of the I_2 integrand beyond |x| = 100.
    pub tail_mass: f64,
    /// True when `tail_mass` exceeds 1e-6, i.e. the second score moment is
    /// materially supported by the far tails (heavy-tailed families).
    pub heavy_tail_flag: bool,
}

impl RegularityReport {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

impl ScoreFamily {
    pub fn gaussian() -> Self {
        Self::build(FamilyKind::Gaussian).expect("Gaussian moment quadrature converges")
    }

    /// Unit-variance Student-t family; requires `nu >= 3` so that I_2 exists.
    pub fn student_t(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 3.0 {
            return Err(Error::Domain(format!(
                "Student-t degrees of freedom must be finite and >= 3, got {nu}"
            )));
        }
        Self::build(FamilyKind::StudentT { nu })
    }

    fn build(kind: FamilyKind) -> Result<Self> {
        let mut fam = ScoreFamily {
            kind,
            moments: [0.0; 3],
        };
        for j in 0..3 {
            fam.moments[j] = quad::integrate_line(
                |x| {
                    let m = fam.score(x);
                    x.powi(j as i32) * m * m * fam.density(x)
                },
                MOMENT_TOL,
            )?;
        }
        Ok(fam)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Variance inflation a = nu/(nu-2) of the unscaled Student-t.
    fn t_scale(nu: f64) -> f64 {
        nu / (nu - 2.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    pub fn log_density(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln(),
            FamilyKind::StudentT { nu } => {
                let a = Self::t_scale(nu);
                let norm = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln()
                    + 0.5 * a.ln();
                norm - 0.5 * (nu + 1.0) * (a * x * x / nu).ln_1p()
            }
        }
    }

    /// M_f(x) without the finiteness guard; inner loops validate inputs once.
    pub(crate) fn score(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => -x,
            FamilyKind::StudentT { nu } => {
                let a = Self::t_scale(nu);
                -(nu + 1.0) * a * x / (nu + a * x * x)
            }
        }
    }

    /// First derivative of M_f.
    pub(crate) fn score_d1(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => -1.0,
            FamilyKind::StudentT { nu } => {
                let a = Self::t_scale(nu);
                let d = nu + a * x * x;
                -(nu + 1.0) * a * (nu - a * x * x) / (d * d)
            }
        }
    }

    /// Second derivative of M_f.
    pub(crate) fn score_d2(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => 0.0,
            FamilyKind::StudentT { nu } => {
                let a = Self::t_scale(nu);
                let d = nu + a * x * x;
                2.0 * a * a * x * (nu + 1.0) * (3.0 * nu - a * x * x) / (d * d * d)
            }
        }
    }

    /// N_f(x) = 1 + x M_f(x).
    pub(crate) fn nf(&self, x: f64) -> f64 {
        1.0 + x * self.score(x)
    }

    /// Derivative of N_f: M_f(x) + x Mdot_f(x).
    pub(crate) fn nf_d1(&self, x: f64) -> f64 {
        self.score(x) + x * self.score_d1(x)
    }

    /// Score M_f(x) = f'(x)/f(x); odd in x for these symmetric families.
    pub fn eval_score(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        Ok(self.score(x))
    }

    /// First and second derivatives of M_f at x.
    pub fn eval_score_derivs(&self, x: f64) -> Result<(f64, f64)> {
        check_finite(x)?;
        Ok((self.score_d1(x), self.score_d2(x)))
    }

    /// N_f(x) = 1 + x M_f(x); equals 1 - x^2 for the Gaussian family.
    pub fn eval_nf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        Ok(self.nf(x))
    }

    /// Cached I_j = E[eps^j M_f(eps)^2], j in {0, 1, 2}.
    pub fn fisher_moment(&self, j: usize) -> Result<f64> {
        self.moments
            .get(j)
            .copied()
            .ok_or_else(|| Error::Domain(format!("moment order must be 0, 1, or 2, got {j}")))
    }

    /// Evaluates the five density identities by quadrature and reports the
    /// residuals against their exact targets (0, -1, 0, 0, 2), plus a
    /// heavy-tail sensitivity flag for the second score moment.
    pub fn check_regularity(&self) -> Result<RegularityReport> {
        let targets = [0.0, -1.0, 0.0, 0.0, 2.0];
        let with_density = |g: &dyn Fn(f64) -> f64, x: f64| g(x) * self.density(x);
        let m = |x: f64| self.score(x);
        let fisher_kernel = |x: f64| {
            let s = self.score(x);
            self.score_d1(x) + s * s
        };
        let integrands: [&dyn Fn(f64) -> f64; 5] = [
            &|x| m(x),
            &|x| x * m(x),
            &fisher_kernel,
            &|x| x * fisher_kernel(x),
            &|x| x * x * fisher_kernel(x),
        ];
        let mut residuals = [0.0; 5];
        for (k, g) in integrands.iter().enumerate() {
            let v = quad::integrate_line(|x| with_density(g, x), MOMENT_TOL)?;
            residuals[k] = v - targets[k];
        }
        let i2_kernel = |x: f64| {
            let s = self.score(x);
            x * x * s * s * self.density(x)
        };
        let i2_truncated =
            quad::integrate_interval(i2_kernel, -TAIL_RADIUS, TAIL_RADIUS, MOMENT_TOL)?;
        let tail_mass = (self.moments[2] - i2_truncated).abs();
        Ok(RegularityReport {
            residuals,
            targets,
            tail_mass,
            heavy_tail_flag: tail_mass > TAIL_FLAG,
        })
    }

    /// Draws one innovation from f.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => rng.sample(StandardNormal),
            FamilyKind::StudentT { nu } => {
                let t: f64 = rng.sample(StudentT::new(nu).expect("nu validated at construction"));
                t * ((nu - 2.0) / nu).sqrt()
            }
        }
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("score argument must be finite, got {x}")))
    }
}
