//! Bounded FIFO replay memory with uniform sampling.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
}

/// A minibatch laid out row-per-sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Minibatch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
}

impl Minibatch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn from_transitions(batch: &[Transition]) -> Result<Self> {
        let first = batch.first().ok_or_else(|| Error::Usage("empty minibatch".into()))?;
        let (n, m) = (first.state.len(), first.action.len());
        let mut states = Array2::zeros((batch.len(), n));
        let mut next_states = Array2::zeros((batch.len(), n));
        let mut actions = Array2::zeros((batch.len(), m));
        let mut rewards = Array1::zeros(batch.len());
        for (i, t) in batch.iter().enumerate() {
            if t.state.len() != n || t.next_state.len() != n || t.action.len() != m {
                return Err(Error::shape(format!("transition {i} has inconsistent widths")));
            }
            states.row_mut(i).assign(&Array1::from(t.state.clone()));
            next_states.row_mut(i).assign(&Array1::from(t.next_state.clone()));
            actions.row_mut(i).assign(&Array1::from(t.action.clone()));
            rewards[i] = t.reward;
        }
        Ok(Self { states, actions, rewards, next_states })
    }
}

/// Ring buffer holding at most `capacity` transitions; the oldest is evicted
/// first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    state_dim: usize,
    action_dim: usize,
    capacity: usize,
    states: Vec<f64>,
    actions: Vec<f64>,
    rewards: Vec<f64>,
    next_states: Vec<f64>,
    len: usize,
    /// Slot the next insertion overwrites.
    head: usize,
    inserted: u64,
}

impl ReplayBuffer {
    pub fn new(state_dim: usize, action_dim: usize, capacity: usize) -> Result<Self> {
        if capacity == 0 || state_dim == 0 || action_dim == 0 {
            return Err(Error::config("replay buffer dimensions and capacity must be positive"));
        }
        Ok(Self {
            state_dim,
            action_dim,
            capacity,
            states: vec![0.0; capacity * state_dim],
            actions: vec![0.0; capacity * action_dim],
            rewards: vec![0.0; capacity],
            next_states: vec![0.0; capacity * state_dim],
            len: 0,
            head: 0,
            inserted: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total insertions since creation.
    pub fn total_inserted(&self) -> u64 {
        self.inserted
    }

    /// Insertion index of the oldest transition still held.
    pub fn oldest_insertion_index(&self) -> u64 {
        self.inserted - self.len as u64
    }

    pub fn push(&mut self, t: &Transition) -> Result<()> {
        self.push_parts(&t.state, &t.action, t.reward, &t.next_state)
    }

    pub fn push_parts(&mut self, state: &[f64], action: &[f64], reward: f64, next_state: &[f64]) -> Result<()> {
        if state.len() != self.state_dim || next_state.len() != self.state_dim || action.len() != self.action_dim {
            return Err(Error::shape("transition widths do not match the replay buffer"));
        }
        let finite = state.iter().chain(action).chain(next_state).all(|v| v.is_finite()) && reward.is_finite();
        if !finite {
            return Err(Error::numeric("non-finite transition"));
        }
        if action.iter().any(|a| a.abs() > 1.0) {
            return Err(Error::Usage("actions must lie in [-1, 1]".into()));
        }
        let (n, m, i) = (self.state_dim, self.action_dim, self.head);
        self.states[i * n..(i + 1) * n].copy_from_slice(state);
        self.next_states[i * n..(i + 1) * n].copy_from_slice(next_state);
        self.actions[i * m..(i + 1) * m].copy_from_slice(action);
        self.rewards[i] = reward;
        self.head = (self.head + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
        self.inserted += 1;
        Ok(())
    }

    /// The `k`-th oldest transition currently held.
    pub fn get(&self, k: usize) -> Option<Transition> {
        if k >= self.len {
            return None;
        }
        let slot = (self.head + self.capacity - self.len + k) % self.capacity;
        Some(self.slot(slot))
    }

    fn slot(&self, i: usize) -> Transition {
        let (n, m) = (self.state_dim, self.action_dim);
        Transition {
            state: self.states[i * n..(i + 1) * n].to_vec(),
            action: self.actions[i * m..(i + 1) * m].to_vec(),
            reward: self.rewards[i],
            next_state: self.next_states[i * n..(i + 1) * n].to_vec(),
        }
    }

    /// Uniform sampling with replacement over the current contents.
    pub fn sample_indices<R: Rng + ?Sized>(&self, batch_size: usize, rng: &mut R) -> Result<Vec<usize>> {
        if self.len == 0 {
            return Err(Error::Usage("cannot sample from an empty replay buffer".into()));
        }
        Ok((0..batch_size).map(|_| rng.gen_range(0..self.len)).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, batch_size: usize, rng: &mut R) -> Result<Minibatch> {
        let idx = self.sample_indices(batch_size, rng)?;
        let (n, m) = (self.state_dim, self.action_dim);
        let mut states = Array2::zeros((batch_size, n));
        let mut next_states = Array2::zeros((batch_size, n));
        let mut actions = Array2::zeros((batch_size, m));
        let mut rewards = Array1::zeros(batch_size);
        for (row, &k) in idx.iter().enumerate() {
            // positions are relative to the held contents, so map to slots
            let i = (self.head + self.capacity - self.len + k) % self.capacity;
            for j in 0..n {
                states[[row, j]] = self.states[i * n + j];
                next_states[[row, j]] = self.next_states[i * n + j];
            }
            for j in 0..m {
                actions[[row, j]] = self.actions[i * m + j];
            }
            rewards[row] = self.rewards[i];
        }
        Ok(Minibatch { states, actions, rewards, next_states })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(i: usize) -> Transition {
        Transition { state: vec![i as f64], action: vec![0.0], reward: i as f64, next_state: vec![i as f64 + 1.0] }
    }

    #[test]
    fn eviction_is_oldest_first() {
        let mut b = ReplayBuffer::new(1, 1, 5).unwrap();
        for i in 0..12 {
            b.push(&t(i)).unwrap();
            assert!(b.len() <= 5);
        }
        assert_eq!(b.len(), 5);
        assert_eq!(b.oldest_insertion_index(), 12 - 5);
        assert_eq!(b.get(0).unwrap().reward, 7.0);
        assert_eq!(b.get(4).unwrap().reward, 11.0);
        assert!(b.get(5).is_none());
    }

    #[test]
    fn rejects_bad_transitions() {
        let mut b = ReplayBuffer::new(1, 1, 5).unwrap();
        assert!(b.push(&Transition { action: vec![1.5], ..t(0) }).is_err());
        assert!(b.push(&Transition { reward: f64::NAN, ..t(0) }).is_err());
        assert!(b.push(&Transition { state: vec![0.0, 1.0], ..t(0) }).is_err());
        assert!(b.sample(3, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn sampling_covers_only_current_contents() {
        let mut b = ReplayBuffer::new(1, 1, 10).unwrap();
        for i in 0..25 {
            b.push(&t(i)).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mb = b.sample(2000, &mut rng).unwrap();
        assert!(mb.rewards.iter().all(|&r| (15.0..25.0).contains(&r)));
        for (s, r) in mb.states.column(0).iter().zip(mb.rewards.iter()) {
            assert_eq!(s, r);
        }
    }
}
