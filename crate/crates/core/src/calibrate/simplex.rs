//! Box-constrained Nelder-Mead. Trial points are projected onto the box, so
//! the best vertex never gets worse than the starting point.

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexSettings {
    /// Stop once every vertex lies within this distance (max-norm) of the best.
    pub step_tol: f64,
    pub max_iter: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn project(point: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((x, &lo), &hi) in point.iter_mut().zip(lower).zip(upper) {
        *x = x.clamp(lo, hi);
    }
}

/// Affine combination `base + t (toward - base)`, projected onto the box.
fn along(base: &[f64], toward: &[f64], t: f64, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    let mut p: Vec<f64> = base
        .iter()
        .zip(toward)
        .map(|(&b, &w)| b + t * (w - b))
        .collect();
    project(&mut p, lower, upper);
    p
}

const MAX_RESTARTS: usize = 8;

/// Minimizes `f` from `start`, with initial edge lengths `steps`. Edges
/// that would leave the box are flipped to point inward. A simplex squashed
/// against a bound can stall, so the search restarts from its result until
/// a restart no longer improves it.
pub(crate) fn minimize<F>(
    f: F,
    start: &[f64],
    steps: &[f64],
    lower: &[f64],
    upper: &[f64],
    settings: SimplexSettings,
) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = run(&f, start, steps, lower, upper, settings);
    for _ in 0..MAX_RESTARTS {
        let budget = settings.max_iter.saturating_sub(best.iterations);
        if budget == 0 {
            break;
        }
        let next = run(&f, &best.point, steps, lower, upper, SimplexSettings { max_iter: budget, ..settings });
        let improved = next.value < best.value;
        let iterations = best.iterations + next.iterations;
        if improved {
            best = SimplexOutcome { iterations, ..next };
        } else {
            best.iterations = iterations;
            best.converged = best.converged && next.converged;
            break;
        }
    }
    best
}

fn run<F>(
    f: F,
    start: &[f64],
    steps: &[f64],
    lower: &[f64],
    upper: &[f64],
    settings: SimplexSettings,
) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut origin = start.to_vec();
    project(&mut origin, lower, upper);

    let mut vertices = vec![origin.clone()];
    for i in 0..dim {
        let mut v = origin.clone();
        let step = steps[i];
        v[i] = if v[i] + step <= upper[i] { v[i] + step } else { v[i] - step };
        project(&mut v, lower, upper);
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iter {
        // stable sort keeps earlier vertices ahead on ties
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = vertices[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= settings.step_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| vertices[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = vertices[dim].clone();
        let f_best = values[0];
        let f_second = values[dim - 1];
        let f_worst = values[dim];

        let reflected = along(&centroid, &worst, -REFLECT, lower, upper);
        let f_reflected = f(&reflected);

        if f_reflected < f_best {
            let expanded = along(&centroid, &worst, -EXPAND, lower, upper);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                vertices[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                vertices[dim] = reflected;
                values[dim] = f_reflected;
            }
            continue;
        }
        if f_reflected < f_second {
            vertices[dim] = reflected;
            values[dim] = f_reflected;
            continue;
        }

        let (contracted, f_contracted) = if f_reflected < f_worst {
            let c = along(&centroid, &reflected, CONTRACT, lower, upper);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(&centroid, &worst, CONTRACT, lower, upper);
            let fc = f(&c);
            (c, fc)
        };
        if f_contracted < f_worst.min(f_reflected) {
            vertices[dim] = contracted;
            values[dim] = f_contracted;
            continue;
        }

        let best = vertices[0].clone();
        for i in 1..=dim {
            vertices[i] = along(&best, &vertices[i], SHRINK, lower, upper);
            values[i] = f(&vertices[i]);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex has vertices");
    SimplexOutcome {
        point: vertices[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}
