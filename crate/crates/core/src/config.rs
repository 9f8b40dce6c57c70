//! Centralized numerical tolerances.
//!
//! Every threshold used by the library lives here so experiments can override
//! them coherently and reports can record the exact set in force.

use serde::{Deserialize, Serialize};

/// The full tolerance set. Defaults are the contract values; individual
/// fields can be overridden through [`Tolerances::builder`]-style struct
/// update syntax (`Tolerances { split_tol: 1e-7, ..Tolerances::default() }`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max Hermitian asymmetry accepted at construction.
    pub herm_tol: f64,
    /// Most negative eigenvalue accepted as "positive semidefinite"
    /// (relative to the largest eigenvalue scale for raw inputs).
    pub psd_tol: f64,
    /// Tolerance on the largest eigenvalue of a phone matrix being 1.
    pub eig_tol: f64,
    /// Half-width of the eigenvalue-1 cluster captured by the power-limit
    /// projector.
    pub one_tol: f64,
    /// Idempotence / projector identity tolerance.
    pub proj_tol: f64,
    /// Eigendecomposition reconstruction tolerance per unit dimension
    /// (effective bound: `recon_tol * n`).
    pub recon_tol: f64,
    /// `‖P_A B‖` at or below this splits the pair (numerical surrogate for
    /// the exact condition `P_A B = 0`).
    pub split_tol: f64,
    /// A q-sequence increase above this counts as a monotonicity violation.
    pub mono_tol: f64,
    /// Word-enumeration cap (number of words).
    pub enumeration_cap: u64,
    /// Predicate tolerance for the `AB = 0` equivalence chain.
    pub ab_zero_tol: f64,
    /// Resolvent pole guard: minimum accepted `|1 − τλ|`.
    pub pole_tol: f64,
    /// Below this operator norm a matrix counts as zero.
    pub zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm_tol: 1e-12,
            psd_tol: 1e-10,
            eig_tol: 1e-10,
            one_tol: 1e-9,
            proj_tol: 1e-9,
            recon_tol: 1e-9,
            split_tol: 1e-8,
            mono_tol: 1e-11,
            enumeration_cap: 200_000,
            ab_zero_tol: 1e-10,
            pole_tol: 1e-12,
            zero_tol: 1e-14,
        }
    }
}

impl Tolerances {
    /// Compact single-line rendering for report headers
    /// (stable field order, full precision).
    pub fn summary(&self) -> String {
        format!(
            "herm_tol={:e} psd_tol={:e} eig_tol={:e} one_tol={:e} proj_tol={:e} \
             recon_tol={:e} split_tol={:e} mono_tol={:e} enumeration_cap={} \
             ab_zero_tol={:e} pole_tol={:e} zero_tol={:e}",
            self.herm_tol,
            self.psd_tol,
            self.eig_tol,
            self.one_tol,
            self.proj_tol,
            self.recon_tol,
            self.split_tol,
            self.mono_tol,
            self.enumeration_cap,
            self.ab_zero_tol,
            self.pole_tol,
            self.zero_tol
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_contract() {
        let t = Tolerances::default();
        assert_eq!(t.herm_tol, 1e-12);
        assert_eq!(t.psd_tol, 1e-10);
        assert_eq!(t.eig_tol, 1e-10);
        assert_eq!(t.one_tol, 1e-9);
        assert_eq!(t.proj_tol, 1e-9);
        assert_eq!(t.recon_tol, 1e-9);
        assert_eq!(t.split_tol, 1e-8);
        assert_eq!(t.mono_tol, 1e-11);
        assert_eq!(t.enumeration_cap, 200_000);
    }

    #[test]
    fn override_via_struct_update() {
        let t = Tolerances {
            split_tol: 1e-7,
            ..Tolerances::default()
        };
        assert_eq!(t.split_tol, 1e-7);
        assert_eq!(t.herm_tol, 1e-12);
    }

    #[test]
    fn summary_mentions_every_field() {
        let s = Tolerances::default().summary();
        for key in [
            "herm_tol", "psd_tol", "eig_tol", "one_tol", "proj_tol", "recon_tol", "split_tol",
            "mono_tol", "enumeration_cap", "ab_zero_tol", "pole_tol", "zero_tol",
        ] {
            assert!(s.contains(key), "missing {key} in summary");
        }
    }
}
