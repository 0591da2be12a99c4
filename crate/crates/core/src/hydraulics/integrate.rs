/// One classical fourth-order Runge–Kutta step.
///
/// `f(t, x, dxdt)` writes the derivative into `dxdt`. Returns `false` if any
/// stage produced a non-finite value; `x` is then left unspecified.
pub fn rk4_step<F>(f: &mut F, t: f64, x: &mut [f64], dt: f64, work: &mut Rk4Workspace) -> bool
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = x.len();
    work.resize(n);
    let Rk4Workspace { k1, k2, k3, k4, tmp } = work;
    f(t, x, k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k1[i];
    }
    f(t + 0.5 * dt, tmp, k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k2[i];
    }
    f(t + 0.5 * dt, tmp, k3);
    for i in 0..n {
        tmp[i] = x[i] + dt * k3[i];
    }
    f(t + dt, tmp, k4);
    let mut finite = true;
    for i in 0..n {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        finite &= x[i].is_finite();
    }
    finite
}

/// Scratch buffers reused across steps.
#[derive(Clone, Debug, Default)]
pub struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Workspace {
    fn resize(&mut self, n: usize) {
        for v in [&mut self.k1, &mut self.k2, &mut self.k3, &mut self.k4, &mut self.tmp] {
            v.resize(n, 0.0);
        }
    }
}
