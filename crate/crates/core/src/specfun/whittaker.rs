use super::kummer::{kummer_m, kummer_u};
use super::{SpecFunError, SpecFunResult};
use crate::C64;

fn prefactor(mu: C64, z: C64) -> C64 {
    (-z / 2.0 + (mu + 0.5) * z.ln()).exp()
}

/// `M_{κ,μ}(z) = e^{-z/2} z^{μ+1/2} M(1/2 + μ - κ, 1 + 2μ, z)`.
pub fn whittaker_m(kappa: C64, mu: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if z.norm() == 0.0 {
        return if (mu + 0.5).re > 0.0 {
            Ok(SpecFunResult::exact(C64::new(0.0, 0.0)))
        } else {
            Err(SpecFunError::Pole { function: "WhittakerM", z })
        };
    }
    let m = kummer_m(mu - kappa + 0.5, 2.0 * mu + 1.0, z).map_err(|e| rename(e, "WhittakerM"))?;
    Ok(m.scaled(prefactor(mu, z)))
}

/// `W_{κ,μ}(z) = e^{-z/2} z^{μ+1/2} U(1/2 + μ - κ, 1 + 2μ, z)`.
pub fn whittaker_w(kappa: C64, mu: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    let u = kummer_u(mu - kappa + 0.5, 2.0 * mu + 1.0, z).map_err(|e| rename(e, "WhittakerW"))?;
    Ok(u.scaled(prefactor(mu, z)))
}

fn rename(e: SpecFunError, function: &'static str) -> SpecFunError {
    match e {
        SpecFunError::DegenerateParameter { value, detail, .. } => SpecFunError::DegenerateParameter {
            function,
            name: "1 + 2mu",
            value,
            detail,
        },
        SpecFunError::NonConvergence { terms, .. } => SpecFunError::NonConvergence { function, terms },
        SpecFunError::Pole { z, .. } => SpecFunError::Pole { function, z },
        other => other,
    }
}
