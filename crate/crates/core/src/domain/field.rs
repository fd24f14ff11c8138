//! Coefficient fields attached to components.
//!
//! Fields are constant, affine, or one of a few closed-form builtins. All of
//! them are smooth on each component and expose their gradient, so the
//! divergence of a convection field is available in closed form.

use serde::{Deserialize, Serialize};

use crate::Vec2;

/// Named closed-form scalar fields usable from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `exp(-2 y)`
    ExpNeg2y,
    /// `2 y`
    TwoY,
}

impl Builtin {
    fn value(self, x: Vec2) -> f64 {
        match self {
            Builtin::ExpNeg2y => (-2.0 * x.y).exp(),
            Builtin::TwoY => 2.0 * x.y,
        }
    }

    fn gradient(self, x: Vec2) -> Vec2 {
        match self {
            Builtin::ExpNeg2y => Vec2::new(0.0, -2.0 * (-2.0 * x.y).exp()),
            Builtin::TwoY => Vec2::new(0.0, 2.0),
        }
    }
}

/// Scalar coefficient field (α, f, g, crack speed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarField {
    Constant(f64),
    Affine { constant: f64, gradient: [f64; 2] },
    Builtin { builtin: Builtin },
}

impl Default for ScalarField {
    fn default() -> Self {
        ScalarField::Constant(0.0)
    }
}

impl ScalarField {
    pub fn value(&self, x: Vec2) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Affine { constant, gradient } => constant + gradient[0] * x.x + gradient[1] * x.y,
            ScalarField::Builtin { builtin } => builtin.value(x),
        }
    }

    pub fn gradient(&self, x: Vec2) -> Vec2 {
        match self {
            ScalarField::Constant(_) => Vec2::zeros(),
            ScalarField::Affine { gradient, .. } => Vec2::new(gradient[0], gradient[1]),
            ScalarField::Builtin { builtin } => builtin.gradient(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarField::Constant(c) if *c == 0.0)
    }
}

/// Vector field `b + M x` on a bulk component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorField {
    Constant([f64; 2]),
    Affine {
        constant: [f64; 2],
        /// Row-major Jacobian `[[∂x bx, ∂y bx], [∂x by, ∂y by]]`.
        jacobian: [[f64; 2]; 2],
    },
}

impl Default for VectorField {
    fn default() -> Self {
        VectorField::Constant([0.0, 0.0])
    }
}

impl VectorField {
    pub fn value(&self, x: Vec2) -> Vec2 {
        match self {
            VectorField::Constant(b) => Vec2::new(b[0], b[1]),
            VectorField::Affine { constant, jacobian } => Vec2::new(
                constant[0] + jacobian[0][0] * x.x + jacobian[0][1] * x.y,
                constant[1] + jacobian[1][0] * x.x + jacobian[1][1] * x.y,
            ),
        }
    }

    pub fn divergence(&self, _x: Vec2) -> f64 {
        match self {
            VectorField::Constant(_) => 0.0,
            VectorField::Affine { jacobian, .. } => jacobian[0][0] + jacobian[1][1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2;

    #[test]
    fn affine_scalar() {
        let f = ScalarField::Affine {
            constant: 1.0,
            gradient: [2.0, -1.0],
        };
        assert_eq!(f.value(vec2(0.5, 1.0)), 1.0);
        assert_eq!(f.gradient(vec2(0.0, 0.0)), vec2(2.0, -1.0));
    }

    #[test]
    fn affine_vector_divergence() {
        let b = VectorField::Affine {
            constant: [0.0, 0.0],
            jacobian: [[1.0, 3.0], [0.0, 2.0]],
        };
        assert_eq!(b.divergence(vec2(0.3, 0.4)), 3.0);
        assert_eq!(b.value(vec2(1.0, 1.0)), vec2(4.0, 2.0));
    }

    #[test]
    fn json_forms() {
        let c: ScalarField = serde_json::from_str("1.5").unwrap();
        assert_eq!(c, ScalarField::Constant(1.5));
        let b: ScalarField = serde_json::from_str(r#"{"builtin":"exp_neg2y"}"#).unwrap();
        assert!((b.value(vec2(0.0, 0.5)) - (-1.0f64).exp()).abs() < 1e-15);
        let v: VectorField = serde_json::from_str("[1, -1]").unwrap();
        assert_eq!(v.value(vec2(0.0, 0.0)), vec2(1.0, -1.0));
    }
}
