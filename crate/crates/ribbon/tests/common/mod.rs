//! Shared test support: dense GF(2) reference elimination and statistics
//! helpers. The oracles here work on full-width row vectors (`m <= 64`) and
//! never touch the band representation they are used to check.
#![allow(dead_code)]

use ribbon::{Equation, RibbonWord};

/// A raw dense equation: coefficient bit `i` refers to solution row `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseEq {
    pub row: u64,
    pub rhs: u64,
}

impl DenseEq {
    pub fn from_equation<W: RibbonWord>(eq: &Equation<W>, w: u32, m: usize) -> DenseEq {
        assert!(m <= 64);
        let mut row = 0u64;
        for t in 0..w {
            if eq.coeff.bit(t) == 1 {
                let idx = eq.start + t as usize;
                assert!(idx < m);
                row |= 1 << idx;
            }
        }
        DenseEq { row, rhs: eq.rhs }
    }
}

/// Batch Gauss-Jordan elimination over the full matrix, processing columns
/// left to right and picking the earliest remaining row as pivot.
pub struct BatchElimination {
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
    pub consistent: bool,
    /// Rows that reduced to `0 = 0`.
    pub zero_rows: usize,
}

pub fn batch_eliminate(eqs: &[DenseEq], m: usize) -> BatchElimination {
    let mut rows: Vec<DenseEq> = eqs.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..m {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].row >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r.row >> col & 1 == 1 {
                r.row ^= p.row;
                r.rhs ^= p.rhs;
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    let mut consistent = true;
    let mut zero_rows = 0usize;
    for r in &rows[rank..] {
        assert_eq!(r.row, 0);
        if r.rhs != 0 {
            consistent = false;
        } else {
            zero_rows += 1;
        }
    }
    BatchElimination {
        pivot_cols,
        rank,
        consistent,
        zero_rows,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseOutcome {
    Inserted(usize),
    Redundant,
    Inconsistent,
}

/// Incremental dense basis: equations are reduced against a pivot table
/// indexed by lowest set bit. Mirrors the order semantics of on-the-fly
/// insertion while storing full-width rows.
pub struct DenseBasis {
    basis: Vec<Option<DenseEq>>,
}

impl DenseBasis {
    pub fn new(m: usize) -> DenseBasis {
        assert!(m <= 64);
        DenseBasis {
            basis: vec![None; m],
        }
    }

    pub fn insert(&mut self, mut eq: DenseEq) -> DenseOutcome {
        while eq.row != 0 {
            let c = eq.row.trailing_zeros() as usize;
            match self.basis[c] {
                Some(b) => {
                    eq.row ^= b.row;
                    eq.rhs ^= b.rhs;
                }
                None => {
                    self.basis[c] = Some(eq);
                    return DenseOutcome::Inserted(c);
                }
            }
        }
        if eq.rhs == 0 {
            DenseOutcome::Redundant
        } else {
            DenseOutcome::Inconsistent
        }
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].is_some())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// statistics helpers

pub fn chi_squared_p_value(stat: f64, df: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

pub fn chi_squared_stat(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    cov / (vx.sqrt() * vy.sqrt())
}

/// Standard deviation of an empirical rate from `n` Bernoulli(p) trials.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Median and quartiles of a sample.
pub fn quartiles(samples: &mut [f64]) -> (f64, f64, f64) {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let at = |q: f64| samples[(q * (samples.len() - 1) as f64).round() as usize];
    (at(0.25), at(0.5), at(0.75))
}
