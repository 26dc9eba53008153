use serde::Serialize;

use crate::config::{parse_key_values, Entry};
use crate::error::{Error, Result};

/// Gluing parameters: `R = ε^{-q}`, `λ = ε^{2(p+q)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GluingParams {
    pub epsilon: f64,
    pub p: f64,
    pub q: f64,
    pub lambda0: f64,
    pub b: f64,
    pub tau: f64,
    /// Amplitude `A` of the synthetic singular-side potential `A·r^{2+λ₀}`.
    pub amplitude: f64,
}

impl Default for GluingParams {
    fn default() -> Self {
        Self { epsilon: 0.1, p: 1.0, q: 2.0, lambda0: 8.0, b: 0.5, tau: 0.5, amplitude: 0.01 }
    }
}

/// Derived quantities, for reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    pub r_cutoff: f64,
    pub lambda: f64,
    pub m: f64,
    pub m_tilde: f64,
    pub feasibility_margin: f64,
}

impl GluingParams {
    pub const KEYS: [&'static str; 7] = ["epsilon", "p", "q", "lambda0", "b", "tau", "amplitude"];

    /// `R = ε^{-q}`.
    pub fn r_cutoff(&self) -> f64 {
        self.epsilon.powf(-self.q)
    }

    /// `λ = ε^{2(p+q)}`.
    pub fn lambda(&self) -> f64 {
        self.epsilon.powf(2.0 * (self.p + self.q))
    }

    /// `ε^p`, the radius of the singular-side cut-off.
    pub fn neck_radius(&self) -> f64 {
        self.epsilon.powf(self.p)
    }

    pub fn m(&self) -> f64 {
        self.lambda0.min(2.0 * self.q / self.p)
    }

    pub fn m_tilde(&self) -> f64 {
        self.lambda0.min(4.0 * self.q / self.p)
    }

    /// `p·m̃ − q(b+2) − τ`; positive when feasible.
    pub fn feasibility_margin(&self) -> f64 {
        self.p * self.m_tilde() - self.q * (self.b + 2.0) - self.tau
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams {
            r_cutoff: self.r_cutoff(),
            lambda: self.lambda(),
            m: self.m(),
            m_tilde: self.m_tilde(),
            feasibility_margin: self.feasibility_margin(),
        }
    }

    /// Range checks on the individual parameters.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        let all = [self.epsilon, self.p, self.q, self.lambda0, self.b, self.tau, self.amplitude];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("parameters must be finite");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.p > 0.0 && self.q > 0.0) {
            return bad("p and q must be positive");
        }
        if !(self.lambda0 > 0.0) {
            return bad("lambda0 must be positive");
        }
        if !(self.b > 0.0 && self.b < 2.0) {
            return bad("b must lie in (0, 2)");
        }
        if self.amplitude < 0.0 {
            return bad("amplitude must be non-negative");
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the inequality `p·m̃ − q(b+2) > τ > 0`.
    pub fn check_feasible(&self) -> Result<()> {
        self.validate()?;
        if !(self.tau > 0.0) {
            return Err(Error::Infeasible(format!("pm̃−q(b+2)>τ>0 violated: τ = {} is not positive", self.tau)));
        }
        let lhs = self.p * self.m_tilde() - self.q * (self.b + 2.0);
        if !(lhs > self.tau) {
            return Err(Error::Infeasible(format!(
                "pm̃−q(b+2)>τ violated: p·m̃ − q(b+2) = {lhs:.6} ≤ τ = {} (m̃ = {})",
                self.tau,
                self.m_tilde()
            )));
        }
        Ok(())
    }

    /// Applies one configuration entry; returns `false` if the key is not a gluing key.
    pub fn apply(&mut self, entry: &Entry) -> Result<bool> {
        let slot = match entry.key.as_str() {
            "epsilon" => &mut self.epsilon,
            "p" => &mut self.p,
            "q" => &mut self.q,
            "lambda0" => &mut self.lambda0,
            "b" => &mut self.b,
            "tau" => &mut self.tau,
            "amplitude" => &mut self.amplitude,
            _ => return Ok(false),
        };
        *slot = entry.parse_f64()?;
        Ok(true)
    }

    /// Defaults overridden by a configuration text containing only gluing keys.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut params = Self::default();
        for e in parse_key_values(text)? {
            if !params.apply(&e)? {
                return Err(e.error(format!("unknown key `{}`", e.key)));
            }
        }
        params.validate()?;
        Ok(params)
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "epsilon = {:?}\np = {:?}\nq = {:?}\nlambda0 = {:?}\nb = {:?}\ntau = {:?}\namplitude = {:?}\n",
            self.epsilon, self.p, self.q, self.lambda0, self.b, self.tau, self.amplitude
        )
    }
}
