//! Discrete-event clock shared by the simulated components of a scenario.

use num_traits::Num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CallbackId(pub usize);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClockError {
    #[error("cannot schedule callback {id} in the past")]
    InPast { id: usize },
    #[error("cannot move the clock backwards")]
    Backwards,
    #[error("unknown callback {0}")]
    UnknownCallback(usize),
}

/// Virtual time source. Callbacks are plain ids; the owner runs them.
///
/// Pending entries fire in due-time order. Entries due at the same instant fire
/// in the order their callback ids were registered.
#[derive(Debug, Clone)]
pub struct VirtualClock<T> {
    now: T,
    registered: usize,
    pending: Vec<(T, CallbackId)>,
}

impl<T: Num + PartialOrd + Clone> Default for VirtualClock<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Num + PartialOrd + Clone> VirtualClock<T> {
    pub fn new() -> Self {
        Self { now: T::zero(), registered: 0, pending: Vec::new() }
    }

    pub fn now(&self) -> &T {
        &self.now
    }

    pub fn register(&mut self) -> CallbackId {
        self.registered += 1;
        CallbackId(self.registered - 1)
    }

    pub fn schedule(&mut self, due: T, id: CallbackId) -> Result<(), ClockError> {
        if id.0 >= self.registered {
            return Err(ClockError::UnknownCallback(id.0));
        }
        if due < self.now {
            return Err(ClockError::InPast { id: id.0 });
        }
        // Keep `pending` sorted; insert after every entry that must fire first.
        let pos = self
            .pending
            .iter()
            .position(|(t, other)| due < *t || (*t == due && id < *other))
            .unwrap_or(self.pending.len());
        self.pending.insert(pos, (due, id));
        Ok(())
    }

    pub fn peek(&self) -> Option<&(T, CallbackId)> {
        self.pending.first()
    }

    pub fn is_idle(&self) -> bool {
        self.pending.is_empty()
    }

    /// Pops the next entry due at or before `limit`, moving `now` to its due time.
    pub fn pop_until(&mut self, limit: &T) -> Option<(T, CallbackId)> {
        match self.pending.first() {
            Some((t, _)) if t <= limit => {
                let (t, id) = self.pending.remove(0);
                self.now = t.clone();
                Some((t, id))
            }
            _ => None,
        }
    }

    /// Pops the next entry regardless of due time.
    pub fn pop(&mut self) -> Option<(T, CallbackId)> {
        if self.pending.is_empty() {
            return None;
        }
        let (t, id) = self.pending.remove(0);
        self.now = t.clone();
        Some((t, id))
    }

    /// Fires everything due up to `to` and leaves the clock at `to`.
    pub fn advance_to(&mut self, to: T) -> Result<Vec<(T, CallbackId)>, ClockError> {
        if to < self.now {
            return Err(ClockError::Backwards);
        }
        let mut fired = Vec::new();
        while let Some(e) = self.pop_until(&to) {
            fired.push(e);
        }
        self.now = to;
        Ok(fired)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn fires_in_due_order_with_registration_tiebreak() {
        let mut clock = VirtualClock::<f64>::new();
        let a = clock.register();
        let b = clock.register();
        let c = clock.register();
        clock.schedule(2.0, c).unwrap();
        clock.schedule(1.0, b).unwrap();
        clock.schedule(1.0, a).unwrap();
        clock.schedule(1.0, c).unwrap();
        let fired: Vec<_> = clock.advance_to(2.0).unwrap().into_iter().map(|(_, id)| id).collect();
        assert_eq!(fired, vec![a, b, c, c]);
        assert_eq!(*clock.now(), 2.0);
    }

    #[test]
    fn rational_time_has_exact_ties() {
        let mut clock = VirtualClock::<Ratio<i64>>::new();
        let sensor = clock.register();
        let plant = clock.register();
        let third = Ratio::new(1, 3);
        clock.schedule(third * 3, plant).unwrap();
        clock.schedule(Ratio::from_integer(1), sensor).unwrap();
        let order: Vec<_> = clock.advance_to(Ratio::from_integer(1)).unwrap().into_iter().map(|e| e.1).collect();
        assert_eq!(order, vec![sensor, plant]);
    }

    #[test]
    fn rejects_past_and_backwards() {
        let mut clock = VirtualClock::<i64>::new();
        let a = clock.register();
        clock.advance_to(5).unwrap();
        assert_eq!(clock.schedule(4, a), Err(ClockError::InPast { id: 0 }));
        assert_eq!(clock.advance_to(3), Err(ClockError::Backwards));
        assert_eq!(clock.schedule(9, CallbackId(7)), Err(ClockError::UnknownCallback(7)));
    }

    #[test]
    fn pop_until_stops_at_limit() {
        let mut clock = VirtualClock::<i64>::new();
        let a = clock.register();
        clock.schedule(3, a).unwrap();
        assert!(clock.pop_until(&2).is_none());
        assert_eq!(clock.pop_until(&3), Some((3, a)));
        assert!(clock.is_idle());
    }
}
