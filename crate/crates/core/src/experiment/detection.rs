//! Bernoulli detection with dark counts.
//!
//! In one trial window at most one photon arrives. It registers at its
//! channel with that channel's efficiency; independently every channel fires
//! a dark count with probability `dark`. When several channels fire, one is
//! chosen uniformly at random.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    NoDetection,
    Click { channel: usize, dark: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionLayer {
    efficiency: Vec<f64>,
    dark: f64,
}

impl DetectionLayer {
    /// At most eight channels.
    pub fn new(efficiency: Vec<f64>, dark: f64) -> Self {
        assert!(efficiency.len() <= 8, "at most eight channels");
        DetectionLayer { efficiency, dark }
    }

    pub fn channels(&self) -> usize {
        self.efficiency.len()
    }

    /// Resolves the window for a photon headed to `hit`.
    pub fn resolve<R: Rng + ?Sized>(&self, hit: usize, rng: &mut R) -> Resolution {
        let real = rng.random::<f64>() < self.efficiency[hit];
        if self.dark == 0.0 {
            return if real { Resolution::Click { channel: hit, dark: false } } else { Resolution::NoDetection };
        }
        let mut fired = [false; 8];
        let mut n_fired = 0usize;
        for (j, f) in fired.iter_mut().enumerate().take(self.channels()) {
            let dark = rng.random::<f64>() < self.dark;
            *f = dark || (real && j == hit);
            n_fired += usize::from(*f);
        }
        if n_fired == 0 {
            return Resolution::NoDetection;
        }
        let pick = if n_fired == 1 { 0 } else { rng.random_range(0..n_fired) };
        let channel =
            fired.iter().enumerate().filter(|(_, f)| **f).nth(pick).map(|(j, _)| j).expect("pick below fired count");
        Resolution::Click { channel, dark: !(real && channel == hit) }
    }

    /// Exact distribution of recorded channels given the arrival
    /// probabilities: returns `(P(click at j), P(click at j and real))`.
    pub fn recorded_distribution(&self, arrival: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.channels();
        let q = self.dark;
        // E[1/(1+K)] with K ~ Bin(n−1, q): a real click competing with the others.
        let alone = inverse_moment(n - 1, q, 1);
        // E[1/(2+K)] with K ~ Bin(n−2, q): a dark click competing with a real one.
        let with_real = if n >= 2 { inverse_moment(n - 2, q, 2) } else { 0.0 };
        let real_total: f64 = arrival.iter().zip(&self.efficiency).map(|(p, e)| p * e).sum();

        let mut total = vec![0.0; n];
        let mut real = vec![0.0; n];
        for j in 0..n {
            let own = arrival[j] * self.efficiency[j];
            real[j] = own * alone;
            let others = real_total - own;
            total[j] = real[j] + others * q * with_real + (1.0 - real_total) * q * alone;
        }
        (total, real)
    }
}

/// `E[1/(offset + K)]` for `K ~ Binomial(n, q)`.
fn inverse_moment(n: usize, q: f64, offset: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..=n {
        let ways = binomial(n, k);
        sum += ways * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32) / (offset + k) as f64;
    }
    sum
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
