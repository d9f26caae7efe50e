use serde::{Deserialize, Serialize};

/// Norms of the model data entering the explicit error constants.
///
/// `C¹_b`/`C²_b` norms are `‖g(0)‖ + Σ_j sup ‖g^{(j)}‖`; Lipschitz norms are
/// `‖g(0)‖ + Lip(g)`. Diffusion norms are taken in the Hilbert-Schmidt
/// operators from `U` into `H` (resp. `V`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormInputs {
    pub semigroup_h: f64,
    pub semigroup_v: f64,
    pub drift_c1: f64,
    pub drift_c2: f64,
    pub diffusion_c1: f64,
    pub diffusion_c2: f64,
    pub drift_lip_h: f64,
    pub diffusion_lip_h: f64,
    pub drift_lip_v: f64,
    pub diffusion_lip_v: f64,
    /// `‖xi‖_{L²(Ω;H)}`.
    pub initial_h: f64,
    /// `‖xi‖_{L²(Ω;V)}`.
    pub initial_v: f64,
}

impl NormInputs {
    /// Only `‖S‖` set, every coefficient zero.
    pub fn trivial(semigroup: f64) -> Self {
        Self {
            semigroup_h: semigroup,
            semigroup_v: semigroup,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// `(T/2) C1 (1 + C2²)`.
    pub c: f64,
    /// Bound on `sup_t ‖X_t‖_{L²(Ω;H)}`.
    pub apriori: f64,
}

/// Growth bound `‖S‖ (‖xi‖ + sqrt(2T) Lip F + sqrt(2T) Lip B) exp(T ‖S‖² (1/2 + Lip F² + Lip B²))`.
fn growth(s: f64, xi: f64, f: f64, b: f64, t: f64) -> f64 {
    let r = (2.0 * t).sqrt();
    s * (xi + r * f + r * b) * (t * s * s * (0.5 + f * f + b * b)).exp()
}

pub fn bound_constants(x: &NormInputs, horizon: f64) -> BoundConstants {
    let t = horizon;
    let s = x.semigroup_h;
    let (f1, f2) = (x.drift_c1, x.drift_c2);
    let (b1, b2) = (x.diffusion_c1, x.diffusion_c2);

    let c3 = s * (t * s * s * (f1 + 0.5 * b1 * b1)).exp();
    let c4 = (t * (3.5 * f2 + 4.0 * b1 * b1) * s.powi(4)).exp()
        * t.sqrt()
        * s.powi(3)
        * (f2 + 2.0 * b2 * b2).sqrt();
    let c1 = c4 + s * s * (t * (2.0 * f1 + b1 * b1) * s * s).exp();
    let c2 = growth(x.semigroup_v, x.initial_v, x.drift_lip_v, x.diffusion_lip_v, t);
    let apriori = growth(s, x.initial_h, x.drift_lip_h, x.diffusion_lip_h, t);
    BoundConstants {
        c1,
        c2,
        c3,
        c4,
        c: 0.5 * t * c1 * (1.0 + c2 * c2),
        apriori,
    }
}
