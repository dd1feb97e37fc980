use clap::Args;
use serde::{Deserialize, Serialize};
use smallball::StableLaw64;

use crate::error::{CliError, CliResult};

/// Law selection shared by the commands.
///
/// With `c_minus`/`c_plus` the Lévy measure is given directly; otherwise the
/// law is symmetric (or a positive subordinator with `subordinator`) with
/// characteristic or Laplace constant `kappa`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawArgs {
    /// Stability index α in (0, 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Scale constant κ (default 1).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// One-sided law with E exp(-λZ₁) = exp(-κλ^α), α < 1.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subordinator: Option<bool>,
    /// Lévy measure density constant on the negative half-line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_minus: Option<f64>,
    /// Lévy measure density constant on the positive half-line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_plus: Option<f64>,
}

impl LawArgs {
    /// Flags win over the file.
    pub fn merged(&self, file: &LawArgs) -> LawArgs {
        LawArgs {
            alpha: self.alpha.or(file.alpha),
            kappa: self.kappa.or(file.kappa),
            subordinator: self.subordinator.or(file.subordinator),
            c_minus: self.c_minus.or(file.c_minus),
            c_plus: self.c_plus.or(file.c_plus),
        }
    }

    pub fn alpha(&self) -> CliResult<f64> {
        self.alpha.ok_or_else(|| CliError::Domain("--alpha is required".into()))
    }

    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(1.0)
    }

    pub fn is_subordinator(&self) -> bool {
        self.subordinator.unwrap_or(false)
    }

    pub fn build(&self) -> CliResult<StableLaw64> {
        let alpha = self.alpha()?;
        let law = match (self.c_minus, self.c_plus) {
            (None, None) if self.is_subordinator() => StableLaw64::from_subordinator(alpha, self.kappa())?,
            (None, None) => StableLaw64::from_symmetric(alpha, self.kappa())?,
            (cm, cp) => {
                if self.kappa.is_some() || self.is_subordinator() {
                    return Err(CliError::Domain(
                        "give either --c-minus/--c-plus or --kappa/--subordinator, not both".into(),
                    ));
                }
                StableLaw64::from_levy_measure(alpha, cm.unwrap_or(0.0), cp.unwrap_or(0.0))?
            }
        };
        Ok(law)
    }
}
