//! Merge-avoidance and partition instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One transaction: `inputs` are the values s_i being spent, `outputs` the
/// values t_j being paid. Integer valued, no fees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MAInstance {
    pub inputs: Vec<u64>,
    pub outputs: Vec<u64>,
}

impl MAInstance {
    /// Builds and validates in one step.
    pub fn new(inputs: Vec<u64>, outputs: Vec<u64>) -> Result<Self> {
        let inst = MAInstance { inputs, outputs };
        inst.validate()?;
        Ok(inst)
    }

    pub fn rows(&self) -> usize {
        self.inputs.len()
    }

    pub fn cols(&self) -> usize {
        self.outputs.len()
    }

    pub fn total(&self) -> u128 {
        self.inputs.iter().map(|&v| v as u128).sum()
    }

    pub fn validate(&self) -> Result<()> {
        validate_instance(self)
    }
}

pub fn validate_instance(inst: &MAInstance) -> Result<()> {
    if inst.inputs.is_empty() {
        return Err(Error::Empty("inputs"));
    }
    if inst.outputs.is_empty() {
        return Err(Error::Empty("outputs"));
    }
    if let Some(index) = inst.inputs.iter().position(|&v| v == 0) {
        return Err(Error::NonPositiveValue {
            side: "input",
            index,
        });
    }
    if let Some(index) = inst.outputs.iter().position(|&v| v == 0) {
        return Err(Error::NonPositiveValue {
            side: "output",
            index,
        });
    }
    let inputs: u128 = inst.inputs.iter().map(|&v| v as u128).sum();
    let outputs: u128 = inst.outputs.iter().map(|&v| v as u128).sum();
    if inputs != outputs {
        return Err(Error::Unbalanced { inputs, outputs });
    }
    Ok(())
}

/// Split matrix: `m[i][j]` is what input i sends to output j. Each strictly
/// positive entry becomes one transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MASolution {
    pub m: Vec<Vec<u64>>,
}

impl MASolution {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MASolution {
            m: vec![vec![0; cols]; rows],
        }
    }

    pub fn tx_count(&self) -> usize {
        self.m.iter().flatten().filter(|&&v| v > 0).count()
    }
}

/// True iff every row sums to its input and every column to its output.
pub fn check_solution(inst: &MAInstance, sol: &MASolution) -> Result<bool> {
    let (rows, cols) = (inst.rows(), inst.cols());
    let bad_dims = sol.m.len() != rows || sol.m.iter().any(|row| row.len() != cols);
    if bad_dims {
        return Err(Error::DimensionMismatch {
            expected_rows: rows,
            expected_cols: cols,
            rows: sol.m.len(),
            cols: sol.m.first().map_or(0, Vec::len),
        });
    }
    let rows_ok = sol
        .m
        .iter()
        .zip(&inst.inputs)
        .all(|(row, &s)| row.iter().map(|&v| v as u128).sum::<u128>() == s as u128);
    let cols_ok = (0..cols)
        .all(|j| sol.m.iter().map(|row| row[j] as u128).sum::<u128>() == inst.outputs[j] as u128);
    Ok(rows_ok && cols_ok)
}

/// A payment of `v` drawn from some subset of `values`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleTargetInstance {
    pub values: Vec<u64>,
    pub v: u64,
}

impl SingleTargetInstance {
    pub fn new(values: Vec<u64>, v: u64) -> Result<Self> {
        let inst = SingleTargetInstance { values, v };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Empty("values"));
        }
        if let Some(index) = self.values.iter().position(|&v| v == 0) {
            return Err(Error::NonPositiveValue {
                side: "value",
                index,
            });
        }
        if self.v == 0 {
            return Err(Error::NonPositiveValue {
                side: "target",
                index: 0,
            });
        }
        Ok(())
    }

    pub fn total(&self) -> u128 {
        self.values.iter().map(|&v| v as u128).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInstance {
    pub elements: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        let p = PartitionInstance { elements };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::Empty("elements"));
        }
        if let Some(index) = self.elements.iter().position(|&v| v == 0) {
            return Err(Error::NonPositiveValue {
                side: "element",
                index,
            });
        }
        Ok(())
    }

    pub fn total(&self) -> u128 {
        self.elements.iter().map(|&v| v as u128).sum()
    }
}
