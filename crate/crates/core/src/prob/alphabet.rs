use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// A finite symbol set with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    /// Alphabet of `size` symbols labelled `"0"..`.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return usage("alphabet size must be at least 1");
        }
        Ok(Self {
            labels: (0..size).map(|i| i.to_string()).collect(),
        })
    }

    pub fn with_labels<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return usage("alphabet size must be at least 1");
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return usage(format!("duplicate alphabet label {l:?}"));
            }
        }
        Ok(Self { labels })
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self::new(2).expect("nonzero")
    }

    /// Singleton alphabet, used for empty auxiliaries.
    pub fn unit() -> Self {
        Self::new(1).expect("nonzero")
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn has_default_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, l)| *l == i.to_string())
    }
}

/// A named variable together with its alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub alphabet: Alphabet,
}

impl Axis {
    pub fn new(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Self {
            name: name.into(),
            alphabet,
        }
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct AxisRepr {
    pub name: String,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&Axis> for AxisRepr {
    fn from(a: &Axis) -> Self {
        Self {
            name: a.name.clone(),
            size: a.size(),
            labels: (!a.alphabet.has_default_labels()).then(|| a.alphabet.labels().to_vec()),
        }
    }
}

impl TryFrom<AxisRepr> for Axis {
    type Error = crate::Error;

    fn try_from(r: AxisRepr) -> Result<Self> {
        let alphabet = match r.labels {
            Some(labels) => {
                if labels.len() != r.size {
                    return usage(format!(
                        "axis {}: {} labels for size {}",
                        r.name,
                        labels.len(),
                        r.size
                    ));
                }
                Alphabet::with_labels(labels)?
            }
            None => Alphabet::new(r.size)?,
        };
        Ok(Axis::new(r.name, alphabet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::with_labels(["a", "b", "a"]).is_err());
        let a = Alphabet::with_labels(["0", "1", "e"]).unwrap();
        assert_eq!(a.index_of("e"), Some(2));
        assert_eq!(a.size(), 3);
    }
}
