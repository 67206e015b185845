//! Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.
//!
//! Rays, comparison-frequency ODEs and the toy-model flow all run through
//! `integrate`; dense output lets callers sample trajectories at arbitrary
//! times without re-integrating.

#[derive(Clone, Copy, Debug)]
pub struct OdeOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOpts {
    fn default() -> Self {
        OdeOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// Why the integrator stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum OdeStatus {
    Complete,
    /// A guard tripped; the solution is valid up to the stored time.
    Truncated { t: f64, reason: String },
    /// Step size underflow or step budget exhausted.
    Failed { t: f64, reason: String },
}

struct Segment {
    t0: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

/// Dense solution on [t0, t_end] (or a truncated prefix).
pub struct OdeSolution {
    pub t0: f64,
    pub t_end: f64,
    pub status: OdeStatus,
    dim: usize,
    segments: Vec<Segment>,
}

impl OdeSolution {
    pub fn is_complete(&self) -> bool {
        self.status == OdeStatus::Complete
    }

    /// Last time covered by the dense output.
    pub fn t_last(&self) -> f64 {
        self.segments
            .last()
            .map(|s| s.t0 + s.h)
            .unwrap_or(self.t0)
    }

    /// Sample the solution at `t` (clamped to the covered interval).
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.sample_into(t, &mut y);
        y
    }

    pub fn sample_into(&self, t: f64, y: &mut [f64]) {
        assert!(!self.segments.is_empty(), "empty ODE solution");
        let t = t.clamp(self.t0.min(self.t_last()), self.t0.max(self.t_last()));
        // binary search for the segment containing t
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let seg = &self.segments[mid];
            if t > seg.t0 + seg.h {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let seg = &self.segments[lo];
        let th = ((t - seg.t0) / seg.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        for i in 0..self.dim {
            let r = [
                seg.rcont[0][i],
                seg.rcont[1][i],
                seg.rcont[2][i],
                seg.rcont[3][i],
                seg.rcont[4][i],
            ];
            y[i] = r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// b - b* (5th minus embedded 4th order weights)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense-output weights (Hairer's dopri5 rcont5)
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate dy/dt = f(t, y) from t0 to t_end (t_end > t0).
///
/// `guard(t, y)` is checked after each accepted step; returning `false`
/// truncates the integration with the partial trajectory retained.
pub fn integrate<F, G>(f: F, t0: f64, y0: &[f64], t_end: f64, opts: &OdeOpts, guard: G) -> OdeSolution
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> bool,
{
    let dim = y0.len();
    let mut sol = OdeSolution {
        t0,
        t_end,
        status: OdeStatus::Complete,
        dim,
        segments: Vec::new(),
    };
    if t_end <= t0 {
        // degenerate interval: a single zero-length segment holding y0
        sol.segments.push(Segment {
            t0,
            h: 0.0,
            rcont: [
                y0.to_vec(),
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
            ],
        });
        return sol;
    }

    let span = t_end - t0;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut ytmp = vec![0.0; dim];
    let mut y1 = vec![0.0; dim];

    // initial derivative and a conservative first step
    {
        let (head, _) = k.split_at_mut(1);
        f(t, &y, &mut head[0]);
    }
    let mut h = initial_step(&y, &k[0], span, opts);
    let mut first_same_as_last = true; // k[0] holds f(t, y)

    for step_count in 0..opts.max_steps {
        if step_count + 1 == opts.max_steps {
            sol.status = OdeStatus::Failed {
                t,
                reason: "step budget exhausted".into(),
            };
            break;
        }
        h = h.min(opts.max_step).min(t_end - t);
        if !first_same_as_last {
            let (head, _) = k.split_at_mut(1);
            f(t, &y, &mut head[0]);
        }
        // stages 2..7
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (done, rest) = k.split_at_mut(s);
            let _ = done;
            f(t + C[s] * h, &ytmp, &mut rest[0]);
        }
        // 5th-order result is stage 7's abscissa state (FSAL)
        y1.copy_from_slice(&ytmp);

        // error estimate
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y1[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 || h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            // accept: record dense output
            let mut rcont: [Vec<f64>; 5] = [
                y.clone(),
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
            ];
            for i in 0..dim {
                let ydiff = y1[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut d = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    if D[j] != 0.0 {
                        d += D[j] * kj[i];
                    }
                }
                rcont[4][i] = h * d;
            }
            sol.segments.push(Segment { t0: t, h, rcont });
            t += h;
            std::mem::swap(&mut y, &mut y1);
            k.swap(0, 6); // FSAL
            first_same_as_last = true;
            if !guard(t, &y) {
                sol.status = OdeStatus::Truncated {
                    t,
                    reason: "guard tripped".into(),
                };
                break;
            }
            if t >= t_end - 1e-14 * span.abs() {
                break;
            }
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            first_same_as_last = true; // k[0] still holds f(t, y)
            if h < 1e3 * f64::EPSILON * t.abs().max(1.0) {
                sol.status = OdeStatus::Failed {
                    t,
                    reason: "step size underflow".into(),
                };
                break;
            }
        }
    }
    if sol.segments.is_empty() {
        sol.segments.push(Segment {
            t0,
            h: 0.0,
            rcont: [
                y0.to_vec(),
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
            ],
        });
    }
    sol
}

fn initial_step(y0: &[f64], f0: &[f64], span: f64, opts: &OdeOpts) -> f64 {
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    (h0 * opts.rel_tol.powf(0.2) / 1e-2)
        .clamp(1e-12 * span, 0.1 * span)
        .min(opts.max_step)
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt()
}
