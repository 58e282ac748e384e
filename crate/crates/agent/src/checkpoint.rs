use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qnet::{Adam, Network};

use crate::agent::{Agent, AgentConfig};
use crate::error::AgentError;

/// Full ChaCha stream position, with the 128-bit word position kept as a
/// string since JSON numbers cannot hold it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    pub fn rebuild(&self) -> Result<ChaCha8Rng, AgentError> {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        let pos: u128 = self
            .word_pos
            .parse()
            .map_err(|_| AgentError::Checkpoint(format!("bad rng word_pos {:?}", self.word_pos)))?;
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

/// Serializable snapshot of an agent.
///
/// Replay contents, the n-step window, and the target network are not stored:
/// a resumed agent re-syncs its target from the main network and re-warms the
/// buffer. Evaluation behavior is unaffected since it uses the main network.
#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: AgentConfig,
    pub network: Network,
    pub optimizer: Adam,
    pub epsilon: f64,
    pub env_steps: u64,
    pub train_steps: u64,
    pub episodes: u64,
    pub rng_noise: RngState,
    pub rng_action: RngState,
    pub rng_replay: RngState,
}

impl Checkpoint {
    pub fn of(agent: &Agent) -> Self {
        let (network, opt, epsilon, env_steps, train_steps, episodes) = agent.parts();
        Self {
            config: agent.config().clone(),
            network: network.clone(),
            optimizer: opt.clone(),
            epsilon,
            env_steps,
            train_steps,
            episodes,
            rng_noise: RngState::capture(&agent.rng_noise),
            rng_action: RngState::capture(&agent.rng_action),
            rng_replay: RngState::capture(&agent.rng_replay),
        }
    }

    pub fn into_agent(self) -> Result<Agent, AgentError> {
        let mut main = self.network;
        main.restore();
        let target = main.clone();
        Agent::from_parts(
            self.config,
            main,
            target,
            self.optimizer,
            self.epsilon,
            self.env_steps,
            self.train_steps,
            self.episodes,
            (
                self.rng_noise.rebuild()?,
                self.rng_action.rebuild()?,
                self.rng_replay.rebuild()?,
            ),
        )
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let json = fs::read_to_string(path)?;
        let mut cp: Checkpoint = serde_json::from_str(&json)?;
        cp.network.restore();
        Ok(cp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rng_state_round_trip_resumes_the_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        rng.set_stream(7);
        let _: [f64; 5] = rng.gen();
        let state = RngState::capture(&rng);
        let mut rebuilt = state.rebuild().unwrap();
        let a: [u64; 4] = rng.gen();
        let b: [u64; 4] = rebuilt.gen();
        assert_eq!(a, b);
    }
}
