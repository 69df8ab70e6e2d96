use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

/// Dense index of an entity in a [`Vocab`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityId(pub u32);

/// Dense index of a relation in a [`Vocab`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationId(pub u32);

pub trait DenseId: Copy + Eq + Hash + Ord {
    fn from_index(i: usize) -> Self;
    fn index(self) -> usize;
}

macro_rules! dense_id {
    ($t:ty) => {
        impl DenseId for $t {
            fn from_index(i: usize) -> Self {
                Self(u32::try_from(i).expect("vocabulary exceeds u32 range"))
            }
            fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl $t {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

dense_id!(EntityId);
dense_id!(RelationId);

/// Bijection between string labels and contiguous ids `0..len`.
#[derive(Debug, Clone)]
pub struct Vocab<I> {
    labels: Vec<String>,
    index: HashMap<String, I>,
}

impl<I> Default for Vocab<I> {
    fn default() -> Self {
        Self {
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }
}

impl<I: DenseId> Vocab<I> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `label`, assigning the next free id if unseen.
    pub fn intern(&mut self, label: &str) -> I {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = I::from_index(self.labels.len());
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<I> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: I) -> Option<&str> {
        self.labels.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ids(&self) -> impl Iterator<Item = I> + '_ {
        (0..self.labels.len()).map(I::from_index)
    }

    /// Builds a vocabulary whose ids follow the given label order.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Option<Self> {
        let mut v = Self::new();
        for l in labels {
            if v.get(l.as_ref()).is_some() {
                return None;
            }
            v.intern(l.as_ref());
        }
        Some(v)
    }

    /// Lexicographically reassigned copy, together with `old id -> new id`.
    pub fn sorted(&self) -> (Self, Vec<I>) {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut remap = vec![I::from_index(0); self.labels.len()];
        let mut v = Self::new();
        for old in order {
            let new = v.intern(&self.labels[old]);
            remap[old] = new;
        }
        (v, remap)
    }
}
