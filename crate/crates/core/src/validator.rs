//! Validator registry: who stakes how much, plus the two adversary-facing
//! knowledge flags that the attack model toggles per run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("registry needs at least one validator")]
    Empty,
    #[error("validator {0} has zero effective balance")]
    ZeroBalance(usize),
    #[error("{got} balances supplied for {want} validators")]
    BalanceCountMismatch { got: usize, want: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Validator {
    pub index: usize,
    pub effective_balance: u64,
    /// Drives this validator's RANDAO reveals and other per-validator
    /// randomness. Never exposed through adversary views.
    pub secret_seed: [u8; 32],
    /// Adversary can map this validator's on-chain identity to a network
    /// endpoint.
    pub ip_linked: bool,
    /// Node hardening (e.g. sentry setup) that absorbs a denial-of-service
    /// hit.
    pub protected: bool,
}

/// Dense list of validators, index `i` at position `i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Registry {
    validators: Vec<Validator>,
}

impl Registry {
    /// Builds the registry. An empty balance list means uniform stake of
    /// one unit each.
    pub fn new(
        validator_count: usize,
        balances: &[u64],
        mut secret_seed_for: impl FnMut(usize) -> [u8; 32],
    ) -> Result<Registry, RegistryError> {
        if validator_count == 0 {
            return Err(RegistryError::Empty);
        }
        if !balances.is_empty() && balances.len() != validator_count {
            return Err(RegistryError::BalanceCountMismatch {
                got: balances.len(),
                want: validator_count,
            });
        }
        let validators = (0..validator_count)
            .map(|index| {
                let effective_balance = if balances.is_empty() { 1 } else { balances[index] };
                if effective_balance == 0 {
                    return Err(RegistryError::ZeroBalance(index));
                }
                Ok(Validator {
                    index,
                    effective_balance,
                    secret_seed: secret_seed_for(index),
                    ip_linked: false,
                    protected: false,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Registry { validators })
    }

    pub fn len(&self) -> usize {
        self.validators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.validators.is_empty()
    }

    pub fn get(&self, index: usize) -> &Validator {
        &self.validators[index]
    }

    pub fn get_mut(&mut self, index: usize) -> &mut Validator {
        &mut self.validators[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Validator> {
        self.validators.iter()
    }

    pub fn max_effective_balance(&self) -> u64 {
        self.validators
            .iter()
            .map(|v| v.effective_balance)
            .max()
            .expect("registry is never empty")
    }

    pub fn total_effective_balance(&self) -> u128 {
        self.validators
            .iter()
            .map(|v| v.effective_balance as u128)
            .sum()
    }
}
