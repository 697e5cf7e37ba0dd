//! Sampled boundary data `(h1, h2, h3)` on the time grid of a run.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Envelope class of a boundary signal.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    Zero,
    /// `||(h1,h2,h3)(t)|| <= envelope(t) e^{-nu t}` samplewise.
    Decaying { nu: f64, envelope: Vec<f64> },
    /// `samples(t + tau) = samples(t)`.
    Periodic { tau: f64 },
    /// No structural claim.
    General,
}

/// Boundary data sampled at `t_n = n dt`, `n = 0 ..= n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySignal {
    pub dt: f64,
    pub samples: Vec<[f64; 3]>,
    pub kind: SignalKind,
    /// Optional `(h1', h2', h3')` samples for the time-derivative system.
    pub derivative_samples: Option<Vec<[f64; 3]>>,
}

impl BoundarySignal {
    pub fn zero(dt: f64, n_steps: usize) -> Self {
        BoundarySignal {
            dt,
            samples: vec![[0.0; 3]; n_steps + 1],
            kind: SignalKind::Zero,
            derivative_samples: None,
        }
    }

    pub fn from_fn(dt: f64, n_steps: usize, f: impl Fn(f64) -> [f64; 3]) -> Self {
        let samples = (0..=n_steps).map(|n| f(n as f64 * dt)).collect();
        BoundarySignal {
            dt,
            samples,
            kind: SignalKind::General,
            derivative_samples: None,
        }
    }

    /// Periodic signal; the step count per period must divide evenly so
    /// the sampled periodicity is exact.
    pub fn periodic(dt: f64, n_steps: usize, tau: f64, f: impl Fn(f64) -> [f64; 3]) -> Self {
        let steps_per_period = (tau / dt).round() as usize;
        let samples = (0..=n_steps)
            .map(|n| {
                let k = n % steps_per_period.max(1);
                f(k as f64 * dt)
            })
            .collect();
        BoundarySignal {
            dt,
            samples,
            kind: SignalKind::Periodic { tau },
            derivative_samples: None,
        }
    }

    /// Signal `g(t) e^{-nu t}` with an explicit envelope record.
    pub fn decaying(
        dt: f64,
        n_steps: usize,
        nu: f64,
        g: impl Fn(f64) -> [f64; 3],
    ) -> Self {
        let mut samples = Vec::with_capacity(n_steps + 1);
        let mut envelope = Vec::with_capacity(n_steps + 1);
        for n in 0..=n_steps {
            let t = n as f64 * dt;
            let base = g(t);
            let decay = (-nu * t).exp();
            samples.push([base[0] * decay, base[1] * decay, base[2] * decay]);
            envelope.push((base[0] * base[0] + base[1] * base[1] + base[2] * base[2]).sqrt());
        }
        BoundarySignal {
            dt,
            samples,
            kind: SignalKind::Decaying { nu, envelope },
            derivative_samples: None,
        }
    }

    pub fn n_steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn at(&self, step: usize) -> [f64; 3] {
        self.samples[step.min(self.samples.len() - 1)]
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, SignalKind::Zero)
    }

    /// Samples over the window `[t0, t0 + T]` (by index).
    pub fn window(&self, start_step: usize, len_steps: usize) -> &[[f64; 3]] {
        let end = (start_step + len_steps + 1).min(self.samples.len());
        &self.samples[start_step.min(self.samples.len() - 1)..end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_samples_repeat_exactly() {
        let tau = 0.5;
        let dt = tau / 64.0;
        let s = BoundarySignal::periodic(dt, 640, tau, |t| {
            [(2.0 * core::f64::consts::PI * t / tau).sin(), 0.0, 0.0]
        });
        for n in 0..=(640 - 64) {
            for k in 0..3 {
                assert!((s.samples[n][k] - s.samples[n + 64][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decaying_signal_respects_its_envelope() {
        let s = BoundarySignal::decaying(0.01, 100, 0.3, |t| [t.cos(), 0.1, 0.0]);
        if let SignalKind::Decaying { nu, envelope } = &s.kind {
            for (n, row) in s.samples.iter().enumerate() {
                let t = n as f64 * 0.01;
                let norm = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
                assert!(norm <= envelope[n] * (-nu * t).exp() + 1e-12);
            }
        } else {
            panic!("wrong kind");
        }
    }
}
