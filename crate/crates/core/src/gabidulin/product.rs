use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::linalg::FMatrix;

use super::LinearCode;

/// Cartesian product `C1 × C2 × …` of codes of a common length: a codeword
/// is an `n × ℓ` matrix whose `i`-th column lies in the `i`-th component.
///
/// Its minimum rank distance, as a code in GF(q)^(n × ℓm), equals the
/// smallest component distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCode {
    components: Vec<LinearCode>,
}

pub fn cartesian_product(components: Vec<LinearCode>) -> Result<ProductCode> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidParameters("empty product".into()))?;
    let (n, tower) = (first.n(), first.tower().clone());
    for c in &components {
        if c.tower() != &tower {
            return Err(Error::TowerMismatch);
        }
        if c.n() != n {
            return Err(Error::dim(format!(
                "component lengths {} and {n} differ",
                c.n()
            )));
        }
    }
    Ok(ProductCode { components })
}

impl ProductCode {
    pub fn components(&self) -> &[LinearCode] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components[0].n()
    }

    pub fn width(&self) -> usize {
        self.components.len()
    }

    /// Encodes one message per component into an `n × ℓ` matrix.
    pub fn encode(&self, messages: &[Vec<Elem>]) -> Result<FMatrix> {
        if messages.len() != self.width() {
            return Err(Error::dim(format!(
                "{} messages for {} components",
                messages.len(),
                self.width()
            )));
        }
        let cols: Vec<Vec<Elem>> = self
            .components
            .iter()
            .zip(messages)
            .map(|(c, u)| c.encode(u))
            .collect::<Result<_>>()?;
        let tower = self.components[0].tower().clone();
        let rows: Vec<Vec<Elem>> = (0..self.n())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        FMatrix::from_rows(tower, crate::linalg::Layer::Ext, &rows)
    }

    /// Rank of the `n × ℓm` expansion of a codeword.
    pub fn rank_weight(&self, word: &FMatrix) -> usize {
        crate::linalg::expanded_rank(word)
    }

    /// Minimum component distance, each found by brute force.
    pub fn min_rank_distance(&self) -> Result<usize> {
        let mut d = usize::MAX;
        for c in &self.components {
            d = d.min(c.min_rank_distance_bruteforce()?);
        }
        Ok(d)
    }
}
