//! Test-only oracles and instance generators for the acceptance suite.
//! Everything here stays independent of the conversion path it checks:
//! optima come from walking integer boxes directly and residuals are
//! recomputed from the model data.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qplex::model::{ConstraintSense, Expression, Model, Sense};
use qplex::qubo::{ConversionResult, Qubo};

/// The running example: max 3*x0 + 4*x1 subject to 2*x0 + 3*x1 <= 4.
pub fn knapsack_model() -> Model {
    let mut b = Model::builder("knapsack");
    let x0 = b.binary("x0").unwrap();
    let x1 = b.binary("x1").unwrap();
    let mut obj = Expression::default();
    obj.add_linear(x0, 3.0).add_linear(x1, 4.0);
    b.maximize(obj);
    b.constraint("cap", &[(x0, 2.0), (x1, 3.0)], ConstraintSense::Le, 4.0)
        .unwrap();
    b.build().unwrap()
}

/// MaxCut on the 4-node ring, stated as maximizing the cut size
/// `sum over edges of x_i + x_j - 2 x_i x_j`.
pub fn ring_maxcut_model() -> Model {
    let mut b = Model::builder("ring-maxcut");
    let vars: Vec<_> = (0..4).map(|i| b.binary(format!("x{i}")).unwrap()).collect();
    let mut obj = Expression::default();
    for e in 0..4usize {
        let (i, j) = (vars[e], vars[(e + 1) % 4]);
        obj.add_linear(i, 1.0);
        obj.add_linear(j, 1.0);
        obj.add_quadratic(i, j, -2.0);
    }
    b.maximize(obj);
    b.build().unwrap()
}

/// Random constrained model within the acceptance envelope: up to 6
/// binary/integer variables with bounds in [0, 7], up to 3 linear
/// constraints, integer coefficients in [-5, 5]. Constraints are
/// anchored at a random in-box reference point, so the feasible set is
/// never empty. Returns `None` when the instance exceeds the encoded-bit
/// budget.
pub fn random_model(seed: u64, max_bits: usize) -> Option<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_vars = rng.gen_range(1..=6usize);

    let mut b = Model::builder(format!("random-{seed}"));
    let mut bounds: Vec<(i64, i64)> = Vec::with_capacity(num_vars);
    for i in 0..num_vars {
        if rng.gen_bool(0.5) {
            b.binary(format!("v{i}")).unwrap();
            bounds.push((0, 1));
        } else {
            let lower = rng.gen_range(0..=7i64);
            let upper = rng.gen_range(lower..=7);
            b.integer(format!("v{i}"), lower as f64, upper as f64)
                .unwrap();
            bounds.push((lower, upper));
        }
    }

    let mut objective = Expression::constant(rng.gen_range(-5..=5i64) as f64);
    for i in 0..num_vars {
        let c = rng.gen_range(-5..=5i64);
        if c != 0 {
            objective.add_linear(i, c as f64);
        }
    }
    for _ in 0..rng.gen_range(0..=2usize) {
        let i = rng.gen_range(0..num_vars);
        let j = rng.gen_range(0..num_vars);
        let c = rng.gen_range(-5..=5i64);
        if c != 0 {
            objective.add_quadratic(i, j, c as f64);
        }
    }
    if rng.gen_bool(0.5) {
        b.maximize(objective);
    } else {
        b.minimize(objective);
    }

    let reference: Vec<i64> = bounds.iter().map(|&(l, u)| rng.gen_range(l..=u)).collect();
    for k in 0..rng.gen_range(0..=3usize) {
        let mut terms = Vec::new();
        let mut at_reference = 0i64;
        for (i, &ref_value) in reference.iter().enumerate() {
            let c = rng.gen_range(-5..=5i64);
            if c != 0 {
                terms.push((i, c as f64));
                at_reference += c * ref_value;
            }
        }
        if terms.is_empty() {
            continue;
        }
        let (sense, rhs) = match rng.gen_range(0..3u8) {
            0 => (ConstraintSense::Le, at_reference + rng.gen_range(0..=3)),
            1 => (ConstraintSense::Eq, at_reference),
            _ => (ConstraintSense::Ge, at_reference - rng.gen_range(0..=3)),
        };
        b.constraint(format!("c{k}"), &terms, sense, rhs as f64)
            .unwrap();
    }

    let model = b.build().unwrap();
    let conversion = qplex::qubo::to_qubo(&model, None).ok()?;
    (conversion.qubo.n <= max_bits).then_some(model)
}

/// Random QUBO for sampler benchmarks.
pub fn random_qubo(seed: u64, max_n: usize) -> Qubo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let mut q = Qubo::new(n);
    q.offset = rng.gen::<f64>() * 2.0 - 1.0;
    for i in 0..n {
        q.add_linear(i, rng.gen::<f64>() * 2.0 - 1.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                q.add_quadratic(i, j, rng.gen::<f64>() * 2.0 - 1.0);
            }
        }
    }
    q
}

/// Wrap a QUBO as an unconstrained binary minimization model.
pub fn qubo_as_model(q: &Qubo, name: &str) -> Model {
    let mut b = Model::builder(name);
    let vars: Vec<_> = (0..q.n).map(|i| b.binary(format!("b{i}")).unwrap()).collect();
    let mut obj = Expression::constant(q.offset);
    for (i, &c) in q.linear.iter().enumerate() {
        if c != 0.0 {
            obj.add_linear(vars[i], c);
        }
    }
    for (&(i, j), &c) in &q.quadratic {
        obj.add_quadratic(vars[i], vars[j], c);
    }
    b.minimize(obj);
    b.build().unwrap()
}

/// True optimum by walking the integer boxes directly; independent of
/// any bit encoding.
pub fn brute_force_optimum(model: &Model) -> Option<(BTreeMap<String, f64>, f64)> {
    fn walk(model: &Model, id: usize, point: &mut Vec<f64>, best: &mut Option<(Vec<f64>, f64)>) {
        if id == model.num_variables() {
            if !model.is_feasible_point(point, 1e-9) {
                return;
            }
            let value = model.evaluate_point(point);
            let better = match (&best, model.objective().sense) {
                (None, _) => true,
                (Some((_, incumbent)), Sense::Maximize) => value > *incumbent,
                (Some((_, incumbent)), Sense::Minimize) => value < *incumbent,
            };
            if better {
                *best = Some((point.clone(), value));
            }
            return;
        }
        let v = &model.variables()[id];
        let mut x = v.lower;
        while x <= v.upper {
            point.push(x);
            walk(model, id + 1, point, best);
            point.pop();
            x += 1.0;
        }
    }

    let mut best = None;
    walk(model, 0, &mut Vec::new(), &mut best);
    best.map(|(point, value)| {
        let assignment = model
            .variables()
            .iter()
            .map(|v| (v.name.clone(), point[v.id]))
            .collect();
        (assignment, value)
    })
}

/// Classify one full-width bit pattern of a conversion: decode the
/// original variables and slacks, then recompute every constraint
/// residual from the model data. A pattern is penalty-free exactly when
/// the assignment is feasible and every residual is zero.
pub fn pattern_is_penalty_free(model: &Model, conversion: &ConversionResult, bits: &[u8]) -> bool {
    let num_original = conversion.num_original_variables();
    let point: Vec<f64> = conversion.encodings[..num_original]
        .iter()
        .map(|enc| enc.decode(bits))
        .collect();
    if !model.is_feasible_point(&point, 1e-9) {
        return false;
    }

    let mut slack_cursor = num_original;
    for c in model.constraints() {
        let lhs: f64 = c.lhs.linear.iter().map(|(&id, &a)| a * point[id]).sum();
        let lhs = lhs + c.lhs.constant;
        let residual = match c.sense {
            ConstraintSense::Eq => lhs - c.rhs,
            ConstraintSense::Le => {
                let slack = conversion.encodings[slack_cursor].decode(bits);
                slack_cursor += 1;
                lhs + slack - c.rhs
            }
            ConstraintSense::Ge => {
                let slack = conversion.encodings[slack_cursor].decode(bits);
                slack_cursor += 1;
                -lhs + slack + c.rhs
            }
        };
        if residual.abs() > 1e-9 {
            return false;
        }
    }
    true
}

/// Decode the original variables of a pattern into a dense point.
pub fn decode_point(conversion: &ConversionResult, bits: &[u8]) -> Vec<f64> {
    conversion.encodings[..conversion.num_original_variables()]
        .iter()
        .map(|enc| enc.decode(bits))
        .collect()
}
