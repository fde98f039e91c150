use crate::error::{Error, Result};

/// Stopping rule: at most `max_iters` Arnoldi steps, or relative residual below `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            max_iters: 15,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    /// `‖b - A x_i‖` for `i = 0..=iterations`, starting from `x_0 = 0`.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    /// The Krylov space became invariant; `x` is then exact up to rounding.
    pub breakdown: bool,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solves the upper-triangular `i x i` leading block of `r` against `g`.
fn back_substitute(r: &[Vec<f64>], g: &[f64], i: usize) -> Vec<f64> {
    let mut y = vec![0.0; i];
    for row in (0..i).rev() {
        let mut acc = g[row];
        for col in row + 1..i {
            acc -= r[col][row] * y[col];
        }
        y[row] = acc / r[row][row];
    }
    y
}

/// Full (unrestarted) GMRES from `x_0 = 0`.
///
/// Arnoldi uses modified Gram-Schmidt with one re-orthogonalization pass, and the
/// Hessenberg least-squares problem is updated by Givens rotations. After each
/// step `on_iterate(i, y, x_i)` receives the Krylov coefficients `y` with
/// `x_i = Σ_j y_j v_j`, where `v_j` is the `j`-th vector passed to `apply`.
pub fn gmres<A, F>(
    mut apply: A,
    b: &[f64],
    opts: &GmresOptions,
    mut on_iterate: F,
) -> Result<GmresOutcome>
where
    A: FnMut(&[f64]) -> Result<Vec<f64>>,
    F: FnMut(usize, &[f64], &[f64]) -> Result<()>,
{
    if opts.max_iters == 0 {
        return Err(Error::invalid("max_iters", "must be >= 1"));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("GMRES right-hand side"));
    }
    let len = b.len();
    let beta = norm(b);
    let mut history = vec![beta];
    let mut x = vec![0.0; len];
    if beta == 0.0 {
        return Ok(GmresOutcome {
            x,
            residual_history: history,
            iterations: 0,
            breakdown: false,
            converged: true,
        });
    }
    let m = opts.max_iters.min(len.max(1));
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    // Column j of the rotated Hessenberg matrix, stored column-wise.
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(m);
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::with_capacity(m), Vec::with_capacity(m));
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    let mut iterations = 0;
    let mut breakdown = false;
    let mut converged = false;

    for j in 0..m {
        let mut w = apply(&basis[j])?;
        if w.len() != len {
            return Err(Error::mismatch(
                format!("{len} entries"),
                format!("{}", w.len()),
            ));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverNonFinite { iteration: j + 1 });
        }
        let w_norm0 = norm(&w);
        let mut h = vec![0.0; j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(&w, v);
                h[i] += c;
                axpy(&mut w, -c, v);
            }
        }
        let h_next = norm(&w);
        h[j + 1] = h_next;
        for i in 0..j {
            let (a, bb) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * bb;
            h[i + 1] = -sn[i] * a + cs[i] * bb;
        }
        let denom = h[j].hypot(h[j + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[j] / denom, h[j + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        h[j] = denom;
        h[j + 1] = 0.0;
        g[j + 1] = -s * g[j];
        g[j] *= c;
        h.truncate(j + 1);
        r.push(h);
        iterations = j + 1;

        let res = g[j + 1].abs();
        history.push(res);
        let y = back_substitute(&r, &g, iterations);
        let mut xi = vec![0.0; len];
        for (coef, v) in y.iter().zip(&basis) {
            axpy(&mut xi, *coef, v);
        }
        x = xi;
        on_iterate(iterations, &y, &x)?;

        converged = res <= opts.tol * beta;
        breakdown = h_next <= 1e-14 * w_norm0.max(f64::MIN_POSITIVE);
        if converged || breakdown {
            break;
        }
        basis.push(w.iter().map(|v| v / h_next).collect());
    }
    Ok(GmresOutcome {
        x,
        residual_history: history,
        iterations,
        breakdown,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matvec(a: &DMatrix<f64>) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
        move |v| Ok((a * DVector::from_column_slice(v)).data.into())
    }

    fn no_op(_: usize, _: &[f64], _: &[f64]) -> Result<()> {
        Ok(())
    }

    fn nonincreasing(h: &[f64]) -> bool {
        h.windows(2).all(|w| w[1] <= w[0])
    }

    #[test]
    fn identity_converges_in_one_step() {
        let b = vec![1.0, -2.0, 3.0, 0.5];
        let out = gmres(|v| Ok(v.to_vec()), &b, &GmresOptions::default(), no_op).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        for (x, b) in out.x.iter().zip(&b) {
            assert!((x - b).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_direct_solve_on_spd_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 50;
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &m * m.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let opts = GmresOptions {
            max_iters: 50,
            tol: 1e-12,
        };
        let out = gmres(matvec(&a), &b, &opts, no_op).unwrap();
        let direct = a.clone().lu().solve(&DVector::from_vec(b)).unwrap();
        let err = (DVector::from_vec(out.x) - &direct).norm() / direct.norm();
        assert!(err < 1e-8, "relative error {err}");
        assert!(nonincreasing(&out.residual_history));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let out = gmres(
            |v| Ok(v.to_vec()),
            &[0.0; 5],
            &GmresOptions::default(),
            no_op,
        )
        .unwrap();
        assert_eq!(out.x, vec![0.0; 5]);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.residual_history, vec![0.0]);
    }

    #[test]
    fn invariant_subspace_breakdown_is_flagged() {
        // Diagonal with two distinct eigenvalues: Krylov space of b has dimension 2.
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, 5.0, 5.0]));
        let opts = GmresOptions {
            max_iters: 4,
            tol: 0.0,
        };
        let out = gmres(matvec(&a), &[1.0, 1.0, 1.0, 1.0], &opts, no_op).unwrap();
        assert!(out.breakdown);
        assert_eq!(out.iterations, 2);
        assert!((out.x[0] - 0.5).abs() < 1e-12 && (out.x[3] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn nan_in_operator_aborts() {
        let err = gmres(
            |v| Ok(v.iter().map(|_| f64::NAN).collect()),
            &[1.0, 2.0],
            &GmresOptions::default(),
            no_op,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SolverNonFinite { iteration: 1 }));
    }

    #[test]
    fn callback_sees_every_iterate() {
        let a = DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                3.0
            } else {
                1.0 / (1 + i + 2 * j) as f64
            }
        });
        let b = [1.0, 0.0, -1.0, 2.0, 0.5, 0.1];
        let mut applied: Vec<Vec<f64>> = Vec::new();
        let mut seen = Vec::new();
        let opts = GmresOptions {
            max_iters: 4,
            tol: 0.0,
        };
        let out = gmres(
            |v| {
                applied.push(v.to_vec());
                Ok((&a * DVector::from_column_slice(v)).data.into())
            },
            &b,
            &opts,
            |i, y, x| {
                seen.push((i, y.to_vec(), x.to_vec()));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen.len(), 4);
        let (_, y, x) = seen.last().unwrap();
        assert_eq!(x, &out.x);
        let mut rebuilt = vec![0.0; 6];
        for (c, v) in y.iter().zip(&applied) {
            axpy(&mut rebuilt, *c, v);
        }
        for (a, b) in rebuilt.iter().zip(x) {
            assert!((a - b).abs() < 1e-14);
        }
        // Recorded residuals are the true residuals.
        for ((i, _, xi), res) in seen.iter().zip(&out.residual_history[1..]) {
            let r = DVector::from_column_slice(&b) - &a * DVector::from_column_slice(xi);
            assert!((r.norm() - res).abs() < 1e-12, "iterate {i}");
        }
    }

    proptest! {
        #[test]
        fn residuals_never_increase(seed in 0u64..1000, n in 2usize..30, shift in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
                + DMatrix::identity(n, n) * shift;
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let opts = GmresOptions { max_iters: n, tol: 1e-12 };
            let out = gmres(matvec(&a), &b, &opts, no_op).unwrap();
            prop_assert!(nonincreasing(&out.residual_history));
        }
    }
}
