//! JSON file format for models.
//!
//! Field names are part of the CLI contract:
//!
//! ```json
//! { "name": "knapsack",
//!   "variables": [ {"name":"x0","kind":"binary"},
//!                  {"name":"y","kind":"integer","lower":0,"upper":7} ],
//!   "objective": { "sense":"max", "constant":0.0,
//!                  "linear": {"x0":3.0,"x1":4.0},
//!                  "quadratic": [ ["x0","x1",1.0] ] },
//!   "constraints": [ {"name":"cap","linear":{"x0":2.0,"x1":3.0},
//!                     "sense":"<=","rhs":4.0} ] }
//! ```
//!
//! `lower`/`upper` are optional for binary variables (forced to 0/1) and
//! required otherwise. `quadratic` and `constraints` may be omitted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    ConstraintSense, Expression, Model, ModelBuilder, ModelError, Sense, VarKind,
};

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    name: String,
    variables: Vec<VariableDoc>,
    objective: ObjectiveDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraints: Vec<ConstraintDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveDoc {
    sense: String,
    #[serde(default)]
    constant: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    linear: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    quadratic: Vec<(String, String, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintDoc {
    name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    linear: BTreeMap<String, f64>,
    sense: String,
    rhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadratic: Option<Vec<(String, String, f64)>>,
}

/// Parse a model from its JSON document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| ModelError::MalformedJson(e.to_string()))?;

    let mut builder = ModelBuilder::new(doc.name);
    for v in &doc.variables {
        match v.kind.as_str() {
            "binary" => {
                let lower = v.lower.unwrap_or(0.0);
                let upper = v.upper.unwrap_or(1.0);
                if lower != 0.0 || upper != 1.0 {
                    return Err(ModelError::BinaryBounds(v.name.clone(), lower, upper));
                }
                builder.binary(v.name.clone())?;
            }
            "integer" | "continuous" => {
                let (lower, upper) = match (v.lower, v.upper) {
                    (Some(l), Some(u)) => (l, u),
                    _ => return Err(ModelError::MissingBounds(v.name.clone())),
                };
                if v.kind == "integer" {
                    builder.integer(v.name.clone(), lower, upper)?;
                } else {
                    builder.continuous(v.name.clone(), lower, upper)?;
                }
            }
            other => {
                return Err(ModelError::MalformedJson(format!(
                    "variable \"{}\" has unknown kind \"{other}\"",
                    v.name
                )))
            }
        }
    }

    let lookup = |name: &str| -> Result<usize, ModelError> {
        doc.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    };

    let sense = match doc.objective.sense.as_str() {
        "min" => Sense::Minimize,
        "max" => Sense::Maximize,
        other => {
            return Err(ModelError::MalformedJson(format!(
                "objective sense must be \"min\" or \"max\", got \"{other}\""
            )))
        }
    };
    let mut expr = Expression::constant(doc.objective.constant);
    for (name, coeff) in &doc.objective.linear {
        expr.add_linear(lookup(name)?, *coeff);
    }
    for (a, b, coeff) in &doc.objective.quadratic {
        expr.add_quadratic(lookup(a)?, lookup(b)?, *coeff);
    }
    builder.objective(sense, expr);

    for c in &doc.constraints {
        if let Some(quad) = &c.quadratic {
            if quad.iter().any(|&(_, _, coeff)| coeff != 0.0) {
                return Err(ModelError::NonlinearConstraint(c.name.clone()));
            }
        }
        let sense = match c.sense.as_str() {
            "<=" => ConstraintSense::Le,
            "=" => ConstraintSense::Eq,
            ">=" => ConstraintSense::Ge,
            other => {
                return Err(ModelError::MalformedJson(format!(
                    "constraint \"{}\" has unknown sense \"{other}\"",
                    c.name
                )))
            }
        };
        let mut terms = Vec::with_capacity(c.linear.len());
        for (name, coeff) in &c.linear {
            terms.push((lookup(name)?, *coeff));
        }
        builder.constraint(c.name.clone(), &terms, sense, c.rhs)?;
    }

    builder.build()
}

/// Serialize a model back to its JSON document. Round-trips through
/// [`parse_model`] up to coefficient canonicalization.
pub fn serialize_model(model: &Model) -> String {
    let variables = model
        .variables()
        .iter()
        .map(|v| match v.kind {
            VarKind::Binary => VariableDoc {
                name: v.name.clone(),
                kind: v.kind.to_string(),
                lower: None,
                upper: None,
            },
            _ => VariableDoc {
                name: v.name.clone(),
                kind: v.kind.to_string(),
                lower: Some(v.lower),
                upper: Some(v.upper),
            },
        })
        .collect();

    let name_of = |id: usize| model.variable(id).name.clone();
    let expr = &model.objective().expr;
    let objective = ObjectiveDoc {
        sense: match model.objective().sense {
            Sense::Minimize => "min".to_string(),
            Sense::Maximize => "max".to_string(),
        },
        constant: expr.constant,
        linear: expr
            .linear
            .iter()
            .map(|(&id, &c)| (name_of(id), c))
            .collect(),
        quadratic: expr
            .quadratic
            .iter()
            .map(|(&(i, j), &c)| (name_of(i), name_of(j), c))
            .collect(),
    };

    let constraints = model
        .constraints()
        .iter()
        .map(|c| ConstraintDoc {
            name: c.name.clone(),
            linear: c
                .lhs
                .linear
                .iter()
                .map(|(&id, &coeff)| (name_of(id), coeff))
                .collect(),
            sense: c.sense.to_string(),
            rhs: c.rhs - c.lhs.constant,
            quadratic: None,
        })
        .collect();

    let doc = ModelDoc {
        name: model.name().to_string(),
        variables,
        objective,
        constraints,
    };
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}
