use crate::dynamics::{evolve, rhs, DtPolicy, SolverConfig};
use crate::spectral::{enstrophy, gradient_energy};

use super::{generate_ic, CosineMode, HarnessError, IcSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn check(name: &'static str, value: f64, limit: f64) -> CheckResult {
    CheckResult { name, passed: value < limit, detail: format!("{value:e} < {limit:e}") }
}

/// Quick self-test of the spectral identities and of conservation on a short run.
pub fn self_test(seed: u64) -> Result<Vec<CheckResult>, HarnessError> {
    let mut identity: f64 = 0.0;
    let mut divergence: f64 = 0.0;
    let mut curl: f64 = 0.0;
    for i in 0..100u64 {
        let kmax = 2 + (i % 12) as u32;
        let spec = IcSpec::RandomBand { kmin: 1, kmax, enstrophy: 1.0 + i as f64, seed: Some(seed.wrapping_add(i)) };
        let w = generate_ic(&spec, 32)?;
        let u = w.to_velocity();
        let g = enstrophy(&w);
        identity = identity.max((gradient_energy(&u) - g).abs() / g);
        divergence = divergence.max(u.max_divergence());
        let back = u.curl();
        let num: f64 = back.coeffs().iter().zip(w.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = w.coeffs().iter().map(|c| c.norm_sqr()).sum();
        curl = curl.max((num / den).sqrt());
    }

    let steady = generate_ic(&IcSpec::SingleMode { k: [1, 0], amplitude: 1.0 }, 32)?;
    let steady_rhs = rhs(&steady, true).coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);

    let ic = generate_ic(
        &IcSpec::TwoMode {
            modes: [CosineMode { k: [1, 0], amplitude: 1.0 }, CosineMode { k: [1, 2], amplitude: 1.0 }],
        },
        32,
    )?;
    let cfg = SolverConfig {
        resolution: 32,
        dt: DtPolicy::Fixed(1e-2),
        t_sample: 0.5,
        t_end: 1.0,
        ..SolverConfig::default()
    };
    let run = evolve(&ic, &cfg)?;

    Ok(vec![
        check("gradient-energy identity (relative)", identity, 1e-12),
        CheckResult {
            name: "spectral divergence",
            passed: divergence == 0.0,
            detail: format!("max |k·û| = {divergence:e}"),
        },
        check("curl of Biot–Savart velocity (relative)", curl, 1e-14),
        check("steady shear right-hand side", steady_rhs, 1e-13),
        check("energy drift, two-mode run", run.log.max_energy_drift, 1e-6),
        check("enstrophy drift, two-mode run", run.log.max_enstrophy_drift, 1e-6),
    ])
}
