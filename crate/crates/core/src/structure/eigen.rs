use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use super::{analytic_jacobian, inf_norm, max_abs, speed_scale};
use crate::eos::MixtureEos;
use crate::error::{Error, Result};
use crate::fd;
use crate::scalar::{lit, Real};
use crate::state::{ConservedState, PrimitiveState};

/// Characteristic field label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "1-")]
    OneMinus,
    #[serde(rename = "2-")]
    TwoMinus,
    #[serde(rename = "C")]
    Contact,
    #[serde(rename = "2+")]
    TwoPlus,
    #[serde(rename = "1+")]
    OnePlus,
}

/// Every field, ordered by wave speed when `a_1 >= a_2`.
pub const FIELDS: [Field; 5] = [Field::OneMinus, Field::TwoMinus, Field::Contact, Field::TwoPlus, Field::OnePlus];

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::OneMinus => "1-",
            Field::TwoMinus => "2-",
            Field::Contact => "C",
            Field::TwoPlus => "2+",
            Field::OnePlus => "1+",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Character {
    GenuinelyNonlinear,
    LinearlyDegenerate,
}

/// Closed-form wave speed of `field` at any admissible state:
/// `u +- a_1(rho_1)`, `u +- a_2(rho_2)` or `u`.
pub fn field_speed<T: Real>(mix: &MixtureEos<T>, w: &ConservedState<T>, field: Field) -> Result<T> {
    let s = w.to_primitive()?;
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    Ok(match field {
        Field::OneMinus => s.u - p1.a2.sqrt(),
        Field::OnePlus => s.u + p1.a2.sqrt(),
        Field::TwoMinus => s.u - p2.a2.sqrt(),
        Field::TwoPlus => s.u + p2.a2.sqrt(),
        Field::Contact => s.u,
    })
}

/// Eigenvalues, right eigenvectors in their published scaling, and field
/// characters at one equilibrium state, sorted by wave speed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenStructure<T: Real> {
    pub fields: [Field; 5],
    pub lambdas: [T; 5],
    pub rvecs: [Vector5<T>; 5],
    pub character: [Character; 5],
    /// Normalised `|grad lambda . R|`, see [`character_measure`].
    pub character_measure: [T; 5],
    /// `|A R - lambda R|_inf / (|A|_inf |R|_inf)` against the closed-form Jacobian.
    pub residuals: [T; 5],
    pub jacobian: Matrix5<T>,
}

impl<T: Real> EigenStructure<T> {
    pub fn index_of(&self, field: Field) -> usize {
        self.fields.iter().position(|f| *f == field).expect("every field is present")
    }
}

/// `|grad lambda . R| / ((|u| + a_max) |R|_inf / |W|_inf)`.
///
/// The gradient is a central difference of [`field_speed`] along `R`, which
/// is dimensionless after this scaling; linearly degenerate fields give
/// values at rounding level.
pub fn character_measure<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, field: Field, r: &Vector5<T>) -> Result<T> {
    let w = s.to_conserved().to_vector();
    let (wn, rn) = (max_abs(&w), max_abs(r));
    let h = lit::<T>(1e-6) * wn / rn;
    let f = |x: &Vector5<T>| field_speed(mix, &ConservedState::from_vector(x), field);
    let d = fd::directional(f, &w, r, h)?;
    Ok(d.abs() / (speed_scale(mix, s)? * rn / wn))
}

fn right_vector<T: Real>(field: Field, s: &PrimitiveState<T>, lambda: T, a1: T, a2: T, r1: T, r2: T) -> Result<Vector5<T>> {
    let one = T::one();
    let (al1, al2) = (s.alpha, one - s.alpha);
    let (c1, c2) = (s.c, one - s.c);
    let z = T::zero();
    Ok(match field {
        Field::OnePlus => Vector5::new(al1, one, one, lambda, a1 / (al1 * r1)),
        Field::OneMinus => Vector5::new(al1, one, one, lambda, -a1 / (al1 * r1)),
        Field::TwoPlus => Vector5::new(al1, z, one, lambda, -a2 / (al2 * r2)),
        Field::TwoMinus => Vector5::new(al1, z, one, lambda, a2 / (al2 * r2)),
        Field::Contact => {
            let den = al2 * c1;
            if den == z {
                return Err(Error::State("contact eigenvector undefined for (1 - alpha) c = 0".into()));
            }
            let eps = -(al1 * c2 - den) / den;
            Vector5::new(al1 * eps + al1 / c1, one, eps, s.u * eps, z)
        }
    })
}

/// Closed-form eigenstructure at a mechanical and kinetic equilibrium.
///
/// `tol` is the equilibrium precondition tolerance, `ld_tol` the character
/// threshold.
pub fn eigen_structure<T: Real>(mix: &MixtureEos<T>, s: &PrimitiveState<T>, tol: T, ld_tol: T) -> Result<EigenStructure<T>> {
    let jacobian: Matrix5<T> = analytic_jacobian(mix, s, tol)?;
    let (p1, p2) = mix.phase_points(s.alpha, s.c, s.rho)?;
    let (a1, a2) = (p1.a2.sqrt(), p2.a2.sqrt());
    let w = s.to_conserved();
    let mut fields = FIELDS;
    let mut speeds = [T::zero(); 5];
    for (k, f) in FIELDS.iter().enumerate() {
        speeds[k] = field_speed(mix, &w, *f)?;
    }
    let mut order = [0usize, 1, 2, 3, 4];
    order.sort_by(|&i, &j| speeds[i].partial_cmp(&speeds[j]).unwrap_or(std::cmp::Ordering::Equal));
    let norm_a = inf_norm(&jacobian);

    let mut lambdas = [T::zero(); 5];
    let mut rvecs = [Vector5::zeros(); 5];
    let mut character = [Character::GenuinelyNonlinear; 5];
    let mut measure = [T::zero(); 5];
    let mut residuals = [T::zero(); 5];
    for (k, &i) in order.iter().enumerate() {
        let field = FIELDS[i];
        let lambda = speeds[i];
        let r = right_vector(field, s, lambda, a1, a2, p1.rho, p2.rho)?;
        let m = character_measure(mix, s, field, &r)?;
        fields[k] = field;
        lambdas[k] = lambda;
        residuals[k] = max_abs(&(jacobian * r - r * lambda)) / (norm_a * max_abs(&r));
        character[k] = if m <= ld_tol {
            Character::LinearlyDegenerate
        } else {
            Character::GenuinelyNonlinear
        };
        measure[k] = m;
        rvecs[k] = r;
    }
    Ok(EigenStructure {
        fields,
        lambdas,
        rvecs,
        character,
        character_measure: measure,
        residuals,
        jacobian,
    })
}
