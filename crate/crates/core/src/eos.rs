//! Barotropic phase laws and the mixture generalized energy.
//!
//! A phase law is a pressure `p_i(rho_i)` together with the specific energy
//! potential `phi_i` satisfying `dphi_i/drho_i = p_i / rho_i^2`. The potential
//! is the specific internal energy (isentropic closure) or the specific free
//! energy (isothermal closure); the mixture layer never needs to know which.
//! `psi_i = phi_i + p_i / rho_i` is the matching enthalpy or Gibbs energy.
//!
//! The mixture potential is
//!
//! ```text
//! Phi(alpha, c, rho, w) = c phi_1(c rho / alpha) + (1 - c) phi_2((1 - c) rho / (1 - alpha)) + c (1 - c) w^2 / 2
//! ```

use std::fmt;

use nalgebra::{Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Closure family of a single phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EosFamily {
    /// `p = K rho^gamma`
    #[serde(alias = "polytropic")]
    PolytropicIsentropic,
    /// `p = cT2 rho`
    #[serde(alias = "isothermal")]
    IdealIsothermal,
    /// `p = K rho^gamma - pInf`
    #[serde(alias = "stiffened")]
    StiffenedGas,
}

impl fmt::Display for EosFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EosFamily::PolytropicIsentropic => "polytropic-isentropic",
            EosFamily::IdealIsothermal => "ideal-isothermal",
            EosFamily::StiffenedGas => "stiffened-gas",
        })
    }
}

/// One barotropic phase law.
///
/// Parameters that a family does not use are ignored; `phi0` is an additive
/// energy offset that shifts `phi` and `psi` but leaves `p` and `a^2` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct PhaseEosSpec<T> {
    pub family: EosFamily,
    #[serde(default = "zero", alias = "K")]
    pub k: T,
    #[serde(default = "zero")]
    pub gamma: T,
    #[serde(default = "zero", alias = "cT2")]
    pub ct2: T,
    #[serde(default = "zero", alias = "pInf")]
    pub p_inf: T,
    #[serde(default = "zero")]
    pub phi0: T,
}

fn zero<T: num_traits::Zero>() -> T {
    T::zero()
}

impl<T: Real> PhaseEosSpec<T> {
    pub fn polytropic(k: T, gamma: T) -> Self {
        Self {
            family: EosFamily::PolytropicIsentropic,
            k,
            gamma,
            ct2: T::zero(),
            p_inf: T::zero(),
            phi0: T::zero(),
        }
    }

    pub fn isothermal(ct2: T) -> Self {
        Self {
            family: EosFamily::IdealIsothermal,
            k: T::zero(),
            gamma: T::zero(),
            ct2,
            p_inf: T::zero(),
            phi0: T::zero(),
        }
    }

    pub fn stiffened(k: T, gamma: T, p_inf: T) -> Self {
        Self {
            family: EosFamily::StiffenedGas,
            k,
            gamma,
            ct2: T::zero(),
            p_inf,
            phi0: T::zero(),
        }
    }

    pub fn with_offset(mut self, phi0: T) -> Self {
        self.phi0 = phi0;
        self
    }

    /// Checks the family-specific parameter constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::Parameters {
                family: self.family,
                reason: reason.to_owned(),
            })
        };
        if !self.phi0.is_finite() {
            return bad("phi0 must be finite");
        }
        match self.family {
            EosFamily::PolytropicIsentropic | EosFamily::StiffenedGas => {
                if !(self.k > T::zero()) || !self.k.is_finite() {
                    return bad("K must be positive");
                }
                if !(self.gamma > T::one()) || !self.gamma.is_finite() {
                    return bad("gamma must exceed 1");
                }
                if self.family == EosFamily::StiffenedGas && !self.p_inf.is_finite() {
                    return bad("pInf must be finite");
                }
            }
            EosFamily::IdealIsothermal => {
                if !(self.ct2 > T::zero()) || !self.ct2.is_finite() {
                    return bad("cT2 must be positive");
                }
            }
        }
        Ok(())
    }

    fn check_density(&self, rho: T) -> Result<()> {
        if rho > T::zero() && rho.is_finite() {
            Ok(())
        } else {
            Err(Error::Density {
                family: self.family,
                rho: to_f64(rho),
            })
        }
    }

    pub fn pressure(&self, rho: T) -> Result<T> {
        self.check_density(rho)?;
        Ok(match self.family {
            EosFamily::PolytropicIsentropic => self.k * rho.powf(self.gamma),
            EosFamily::IdealIsothermal => self.ct2 * rho,
            EosFamily::StiffenedGas => self.k * rho.powf(self.gamma) - self.p_inf,
        })
    }

    /// Specific energy potential `phi_i`, including the offset `phi0`.
    pub fn potential(&self, rho: T) -> Result<T> {
        self.check_density(rho)?;
        let base = match self.family {
            EosFamily::PolytropicIsentropic => self.k * rho.powf(self.gamma - T::one()) / (self.gamma - T::one()),
            EosFamily::IdealIsothermal => self.ct2 * rho.ln(),
            EosFamily::StiffenedGas => self.k * rho.powf(self.gamma - T::one()) / (self.gamma - T::one()) + self.p_inf / rho,
        };
        Ok(base + self.phi0)
    }

    /// `psi_i = phi_i + p_i / rho_i`: enthalpy (isentropic) or Gibbs energy (isothermal).
    pub fn psi(&self, rho: T) -> Result<T> {
        Ok(self.potential(rho)? + self.pressure(rho)? / rho)
    }

    /// `a_i^2 = dp_i / drho_i = rho_i dpsi_i / drho_i`.
    pub fn sound_speed_sq(&self, rho: T) -> Result<T> {
        self.check_density(rho)?;
        Ok(match self.family {
            EosFamily::PolytropicIsentropic | EosFamily::StiffenedGas => self.k * self.gamma * rho.powf(self.gamma - T::one()),
            EosFamily::IdealIsothermal => self.ct2,
        })
    }

    /// Infimum of the pressure over admissible densities (never attained).
    pub fn pressure_floor(&self) -> T {
        match self.family {
            EosFamily::StiffenedGas => -self.p_inf,
            _ => T::zero(),
        }
    }

    /// Solves `p_i(rho) = p` by a bracketed Newton iteration with bisection fallback.
    pub fn density_at_pressure(&self, p: T) -> Result<T> {
        let unreachable = || Error::UnreachablePressure {
            family: self.family,
            pressure: to_f64(p),
        };
        let failed = || Error::RootFinding {
            family: self.family,
            pressure: to_f64(p),
        };
        if !p.is_finite() || p <= self.pressure_floor() {
            return Err(unreachable());
        }
        let two = lit::<T>(2.0);
        let residual = |rho: T| self.pressure(rho).map(|q| q - p);

        let (mut lo, mut hi) = (T::one(), T::one());
        let mut expansions = 0;
        while residual(hi)? < T::zero() {
            hi *= two;
            expansions += 1;
            if expansions > 2000 || !hi.is_finite() {
                return Err(unreachable());
            }
        }
        while residual(lo)? > T::zero() {
            lo /= two;
            expansions += 1;
            if expansions > 2000 || lo <= T::zero() {
                return Err(unreachable());
            }
        }

        // Newton converges quadratically, so iterate down to a few ulps; the
        // equilibrium constructors depend on p_1 = p_2 holding to rounding.
        let tol = lit::<T>(4.0) * T::default_epsilon();
        let mut x = (lo + hi) / two;
        for _ in 0..400 {
            let f = residual(x)?;
            if f == T::zero() {
                return Ok(x);
            }
            if f < T::zero() {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.sound_speed_sq(x)?;
            let newton = x - f / slope;
            let next = if newton > lo && newton < hi { newton } else { (lo + hi) / two };
            if (next - x).abs() <= tol * x || (hi - lo) <= tol * x {
                return Ok(next);
            }
            x = next;
        }
        Err(failed())
    }
}

/// Two phase laws making up the mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct MixtureEos<T> {
    pub phase1: PhaseEosSpec<T>,
    pub phase2: PhaseEosSpec<T>,
}

/// First derivatives of `Phi` in the `(alpha, c, rho, w)` chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixDerivs1<T> {
    pub d_alpha: T,
    pub d_c: T,
    pub d_rho: T,
    pub d_w: T,
}

/// Second derivatives of `phi(alpha, c, v)` and `Phi(alpha, c, v, q)`, with
/// `v` the specific volume and `q = v w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixDerivs2<T> {
    pub phi_aa: T,
    pub phi_ac: T,
    pub phi_av: T,
    pub phi_cc: T,
    pub phi_cv: T,
    pub phi_vv: T,
    pub pot_aa: T,
    pub pot_ac: T,
    pub pot_av: T,
    pub pot_aq: T,
    pub pot_cc: T,
    pub pot_cv: T,
    pub pot_cq: T,
    pub pot_vv: T,
    pub pot_vq: T,
    pub pot_qq: T,
}

impl<T: Real> MixDerivs2<T> {
    /// Hessian of `phi` in `(alpha, c, v)`.
    pub fn phi_matrix(&self) -> Matrix3<T> {
        Matrix3::new(
            self.phi_aa,
            self.phi_ac,
            self.phi_av,
            self.phi_ac,
            self.phi_cc,
            self.phi_cv,
            self.phi_av,
            self.phi_cv,
            self.phi_vv,
        )
    }

    /// Hessian of `Phi` in `(alpha, c, v, q)`.
    pub fn potential_matrix(&self) -> Matrix4<T> {
        Matrix4::new(
            self.pot_aa,
            self.pot_ac,
            self.pot_av,
            self.pot_aq,
            self.pot_ac,
            self.pot_cc,
            self.pot_cv,
            self.pot_cq,
            self.pot_av,
            self.pot_cv,
            self.pot_vv,
            self.pot_vq,
            self.pot_aq,
            self.pot_cq,
            self.pot_vq,
            self.pot_qq,
        )
    }
}

/// Phase-level quantities evaluated at one mixture point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    pub rho: T,
    pub p: T,
    pub phi: T,
    pub psi: T,
    pub a2: T,
}

fn check_fraction<T: Real>(name: &str, x: T) -> Result<()> {
    if x > T::zero() && x < T::one() {
        Ok(())
    } else {
        Err(Error::State(format!("{name} = {} must lie in (0, 1)", to_f64(x))))
    }
}

impl<T: Real> MixtureEos<T> {
    pub fn new(phase1: PhaseEosSpec<T>, phase2: PhaseEosSpec<T>) -> Result<Self> {
        phase1.validate()?;
        phase2.validate()?;
        Ok(Self { phase1, phase2 })
    }

    /// The same mixture with the phase labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            phase1: self.phase2,
            phase2: self.phase1,
        }
    }

    /// `(rho_1, rho_2) = (c rho / alpha, (1 - c) rho / (1 - alpha))`.
    pub fn phase_densities(&self, alpha: T, c: T, rho: T) -> Result<(T, T)> {
        check_fraction("alpha", alpha)?;
        check_fraction("c", c)?;
        if !(rho > T::zero()) {
            return Err(Error::State(format!("rho = {} must be positive", to_f64(rho))));
        }
        Ok((c * rho / alpha, (T::one() - c) * rho / (T::one() - alpha)))
    }

    fn point(spec: &PhaseEosSpec<T>, rho: T) -> Result<PhasePoint<T>> {
        let p = spec.pressure(rho)?;
        let phi = spec.potential(rho)?;
        Ok(PhasePoint {
            rho,
            p,
            phi,
            psi: phi + p / rho,
            a2: spec.sound_speed_sq(rho)?,
        })
    }

    /// Both phases evaluated at `(alpha, c, rho)`.
    pub fn phase_points(&self, alpha: T, c: T, rho: T) -> Result<(PhasePoint<T>, PhasePoint<T>)> {
        let (r1, r2) = self.phase_densities(alpha, c, rho)?;
        Ok((Self::point(&self.phase1, r1)?, Self::point(&self.phase2, r2)?))
    }

    /// `phi(alpha, c, rho)`: mass-averaged phase potentials.
    pub fn mixture_phi(&self, alpha: T, c: T, rho: T) -> Result<T> {
        let (p1, p2) = self.phase_points(alpha, c, rho)?;
        Ok(c * p1.phi + (T::one() - c) * p2.phi)
    }

    /// `Phi(alpha, c, rho, w) = phi + c (1 - c) w^2 / 2`.
    pub fn potential(&self, alpha: T, c: T, rho: T, w: T) -> Result<T> {
        let half = lit::<T>(0.5);
        Ok(self.mixture_phi(alpha, c, rho)? + c * (T::one() - c) * w * w * half)
    }

    /// `Phi` in the `(alpha, c, v, q)` chart, `rho = 1/v`, `w = q/v`.
    pub fn potential_specific_volume(&self, alpha: T, c: T, v: T, q: T) -> Result<T> {
        if !(v > T::zero()) {
            return Err(Error::State(format!("v = {} must be positive", to_f64(v))));
        }
        self.potential(alpha, c, T::one() / v, q / v)
    }

    /// `p = alpha p_1 + (1 - alpha) p_2`.
    pub fn pressure(&self, alpha: T, c: T, rho: T) -> Result<T> {
        let (p1, p2) = self.phase_points(alpha, c, rho)?;
        Ok(alpha * p1.p + (T::one() - alpha) * p2.p)
    }

    /// `a^2 = c a_1^2 + (1 - c) a_2^2`.
    pub fn sound_speed_sq(&self, alpha: T, c: T, rho: T) -> Result<T> {
        let (p1, p2) = self.phase_points(alpha, c, rho)?;
        Ok(c * p1.a2 + (T::one() - c) * p2.a2)
    }

    pub fn first_derivs(&self, alpha: T, c: T, rho: T, w: T) -> Result<MixDerivs1<T>> {
        let (p1, p2) = self.phase_points(alpha, c, rho)?;
        let one = T::one();
        let p = alpha * p1.p + (one - alpha) * p2.p;
        Ok(MixDerivs1 {
            d_alpha: (p2.p - p1.p) / rho,
            d_c: p1.psi - p2.psi + (one - c - c) * w * w * lit(0.5),
            d_rho: p / (rho * rho),
            d_w: c * (one - c) * w,
        })
    }

    pub fn second_derivs(&self, alpha: T, c: T, v: T, q: T) -> Result<MixDerivs2<T>> {
        if !(v > T::zero()) {
            return Err(Error::State(format!("v = {} must be positive", to_f64(v))));
        }
        let one = T::one();
        let (p1, p2) = self.phase_points(alpha, c, one / v)?;
        let (v1, v2) = (one / p1.rho, one / p2.rho);
        let (a1, a2) = (p1.a2, p2.a2);
        let beta = one - alpha;
        let d = one - c;

        let phi_aa = v * (a1 / (alpha * v1) + a2 / (beta * v2));
        let phi_ac = -(a1 / alpha + a2 / beta);
        // -p_1 (1 - a_1^2/(v_1 p_1)) + p_2 (1 - a_2^2/(v_2 p_2)), expanded so p_i = 0 is harmless
        let phi_av = -p1.p + a1 / v1 + p2.p - a2 / v2;
        let phi_cc = a1 / c + a2 / d;
        let phi_cv = -(a1 - a2) / v;
        let phi_vv = (c * a1 + d * a2) / (v * v);

        let v2_ = v * v;
        let v3 = v2_ * v;
        let cd = c * d;
        let skew = one - c - c;
        Ok(MixDerivs2 {
            phi_aa,
            phi_ac,
            phi_av,
            phi_cc,
            phi_cv,
            phi_vv,
            pot_aa: phi_aa,
            pot_ac: phi_ac,
            pot_av: phi_av,
            pot_aq: T::zero(),
            pot_cc: phi_cc - (q / v) * (q / v),
            pot_cv: phi_cv - skew * q * q / v3,
            pot_cq: skew * q / v2_,
            pot_vv: phi_vv + lit::<T>(3.0) * cd * q * q / (v2_ * v2_),
            pot_vq: -lit::<T>(2.0) * cd * q / v3,
            pot_qq: cd / v2_,
        })
    }

    /// Shifts the offset of phase 2 so that `psi_1 = psi_2` at the common
    /// pressure `p_star`. Pressures and sound speeds are untouched.
    pub fn calibrate_offsets(&self, p_star: T) -> Result<Self> {
        let r1 = self.phase1.density_at_pressure(p_star)?;
        let r2 = self.phase2.density_at_pressure(p_star)?;
        let shift = self.phase1.psi(r1)? - self.phase2.psi(r2)?;
        let mut out = *self;
        out.phase2.phi0 += shift;
        Ok(out)
    }
}
