//! Markov-chain mobility over grid and line topologies.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{MobilityPattern, TypeSpace};

/// Row-stochastic transition matrix over locations `1..=L`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("transition matrix has no locations"));
        }
        for (l, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "transition row {} has {} entries, expected {n}",
                    l + 1,
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::input(format!(
                    "transition row {} has a negative entry",
                    l + 1
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::input(format!(
                    "transition row {} sums to {sum}",
                    l + 1
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Stay with probability `stay`, otherwise move to one of the neighbours
    /// uniformly. A location without neighbours keeps all its mass.
    pub fn from_neighbours(neighbours: &[Vec<usize>], stay: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&stay) {
            return Err(Error::input(format!(
                "stay probability {stay} outside [0, 1]"
            )));
        }
        let n = neighbours.len();
        let rows = neighbours
            .iter()
            .enumerate()
            .map(|(l, adj)| {
                let mut row = vec![0.0; n];
                if adj.is_empty() {
                    row[l] = 1.0;
                } else {
                    row[l] = stay;
                    let share = (1.0 - stay) / adj.len() as f64;
                    for &m in adj {
                        row[m - 1] += share;
                    }
                }
                row
            })
            .collect();
        Self::new(rows)
    }

    /// Rook-adjacency grid, locations numbered row by row from 1.
    pub fn grid(width: usize, height: usize, stay: f64) -> Result<Self> {
        let id = |r: usize, c: usize| r * width + c + 1;
        let neighbours: Vec<Vec<usize>> = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| {
                let mut adj = Vec::with_capacity(4);
                if r > 0 {
                    adj.push(id(r - 1, c));
                }
                if c > 0 {
                    adj.push(id(r, c - 1));
                }
                if c + 1 < width {
                    adj.push(id(r, c + 1));
                }
                if r + 1 < height {
                    adj.push(id(r + 1, c));
                }
                adj
            })
            .collect();
        Self::from_neighbours(&neighbours, stay)
    }

    /// Locations `1..=length` on a straight road.
    pub fn line(length: usize, stay: f64) -> Result<Self> {
        let neighbours: Vec<Vec<usize>> = (1..=length)
            .map(|l| {
                let mut adj = Vec::with_capacity(2);
                if l > 1 {
                    adj.push(l - 1);
                }
                if l < length {
                    adj.push(l + 1);
                }
                adj
            })
            .collect();
        Self::from_neighbours(&neighbours, stay)
    }

    pub fn locations(&self) -> usize {
        self.rows.len()
    }

    /// `p(to | from)`, 1-based.
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from - 1][to - 1]
    }

    fn step(&self, from: usize, rng: &mut impl Rng) -> usize {
        let row = &self.rows[from - 1];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (m, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return m + 1;
            }
        }
        // rounding left u above the last partial sum
        row.iter().rposition(|&p| p > 0.0).map_or(from, |m| m + 1)
    }
}

/// Samples a pattern of `slots` locations starting at `start`.
pub fn generate_mobility(
    matrix: &TransitionMatrix,
    start: usize,
    slots: usize,
    rng: &mut impl Rng,
) -> Result<MobilityPattern> {
    if !(1..=matrix.locations()).contains(&start) {
        return Err(Error::input(format!(
            "start location {start} outside 1..={}",
            matrix.locations()
        )));
    }
    let mut locations = Vec::with_capacity(slots);
    let mut here = start;
    for t in 0..slots {
        if t > 0 {
            here = matrix.step(here, rng);
        }
        locations.push(here);
    }
    MobilityPattern::new(locations)
}

/// Chains of the two-type random mobility model on a line.
#[derive(Clone, Debug)]
pub struct TwoTypeChains {
    pub high: TransitionMatrix,
    pub low: TransitionMatrix,
}

impl TwoTypeChains {
    pub fn line(length: usize, high_stay: f64, low_stay: f64) -> Result<Self> {
        Ok(Self {
            high: TransitionMatrix::line(length, high_stay)?,
            low: TransitionMatrix::line(length, low_stay)?,
        })
    }
}

/// A high-mobility and a low-mobility pattern from a common start, with
/// priors `(p_high, 1 - p_high)`.
pub fn generate_random_types(
    chains: &TwoTypeChains,
    p_high: f64,
    start: usize,
    slots: usize,
    rng: &mut impl Rng,
) -> Result<TypeSpace> {
    if !(0.0..=1.0).contains(&p_high) {
        return Err(Error::input(format!("p_high {p_high} outside [0, 1]")));
    }
    let high = generate_mobility(&chains.high, start, slots, rng)?;
    let low = generate_mobility(&chains.low, start, slots, rng)?;
    TypeSpace::new(vec![high, low], vec![p_high, 1.0 - p_high])
}
