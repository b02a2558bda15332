//! Named perturbation directions applied to the lagged observation.
//!
//! Directions are named rather than arbitrary closures so model
//! configurations stay serializable and two runs can be compared by config
//! alone. All members are bounded, which keeps every moment of the perturbed
//! models finite and conditional variances positive.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// Identically zero; switches a direction off.
    Zero,
    /// x -> 1/(1+x^2).
    InvQuad,
    /// x -> 2/(1+x^2); used for the conditional-variance direction, where the
    /// factor two absorbs the 1/2 from linearizing sqrt(1 + beta B).
    TwoInvQuad,
}

impl Perturbation {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Perturbation::Zero => 0.0,
            Perturbation::InvQuad => 1.0 / (1.0 + x * x),
            Perturbation::TwoInvQuad => 2.0 / (1.0 + x * x),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Perturbation::Zero)
    }

    /// Supremum of |eval| over the real line.
    pub fn bound(self) -> f64 {
        match self {
            Perturbation::Zero => 0.0,
            Perturbation::InvQuad => 1.0,
            Perturbation::TwoInvQuad => 2.0,
        }
    }
}
