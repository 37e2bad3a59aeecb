use crate::error::{Error, Result};
use crate::PROB_TOLERANCE;

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidPmf("empty support".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidPmf(format!("entry {p} is negative or not finite")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidPmf(format!("mass sums to {total}")));
    }
    Ok(())
}

/// A probability mass function over distinct outcome identifiers, kept sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf {
    outcomes: Vec<usize>,
    probs: Vec<f64>,
}

impl FinitePmf {
    pub fn new(outcomes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        check_probs(&probs)?;
        let mut pairs: Vec<(usize, f64)> = outcomes.into_iter().zip(probs).collect();
        pairs.sort_by_key(|&(o, _)| o);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPmf("duplicate outcome".into()));
        }
        let (outcomes, probs) = pairs.into_iter().unzip();
        Ok(FinitePmf { outcomes, probs })
    }

    /// Pmf over outcomes `0..probs.len()`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let outcomes = (0..probs.len()).collect();
        Self::new(outcomes, probs)
    }

    /// Normalise nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidPmf("weights must be nonnegative with positive sum".into()));
        }
        Self::from_probs(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_probs(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::InvalidPmf(format!("point {at} outside alphabet of size {n}")));
        }
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Self::from_probs(p)
    }

    pub fn bernoulli(q: f64) -> Result<Self> {
        Self::from_probs(vec![1.0 - q, q])
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, outcome: usize) -> f64 {
        self.outcomes
            .binary_search(&outcome)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    pub(crate) fn same_alphabet(&self, other: &FinitePmf) -> Result<()> {
        if self.outcomes != other.outcomes {
            return Err(Error::AlphabetMismatch(format!(
                "{} vs {} outcomes",
                self.outcomes.len(),
                other.outcomes.len()
            )));
        }
        Ok(())
    }

    /// Golden-test dump: one `outcome<TAB>prob` line per entry, sorted by outcome id.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (o, p) in self.outcomes.iter().zip(&self.probs) {
            out.push_str(&format!("{o}\t{p:.16e}\n"));
        }
        out
    }

    /// Inverse of [`FinitePmf::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut outcomes = Vec::new();
        let mut probs = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (o, p) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse(format!("missing tab in {line:?}")))?;
            outcomes.push(o.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?);
            probs.push(p.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?);
        }
        Self::new(outcomes, probs)
    }
}

/// Joint pmf of `(X, Y)` stored densely, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    x_outcomes: Vec<usize>,
    y_outcomes: Vec<usize>,
    table: Vec<f64>,
}

impl JointPmf {
    pub fn new(x_outcomes: Vec<usize>, y_outcomes: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if table.len() != x_outcomes.len() * y_outcomes.len() {
            return Err(Error::InvalidPmf(format!(
                "table of {} entries for a {}x{} alphabet",
                table.len(),
                x_outcomes.len(),
                y_outcomes.len()
            )));
        }
        for axis in [&x_outcomes, &y_outcomes] {
            let mut sorted = axis.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidPmf("duplicate outcome on an axis".into()));
            }
        }
        check_probs(&table)?;
        Ok(JointPmf { x_outcomes, y_outcomes, table })
    }

    /// Joint over `0..nx` × `0..ny`.
    pub fn from_table(nx: usize, ny: usize, table: Vec<f64>) -> Result<Self> {
        Self::new((0..nx).collect(), (0..ny).collect(), table)
    }

    /// Product of two marginals.
    pub fn independent(px: &FinitePmf, py: &FinitePmf) -> Result<Self> {
        let table = px
            .probs()
            .iter()
            .flat_map(|a| py.probs().iter().map(move |b| a * b))
            .collect();
        Self::new(px.outcomes().to_vec(), py.outcomes().to_vec(), table)
    }

    /// Joint of `(X, Y)` from the law of `Y` and the rows `P(X | Y = y)`.
    pub fn from_channel(py: &FinitePmf, rows: &[FinitePmf]) -> Result<Self> {
        if rows.len() != py.len() {
            return Err(Error::InvalidPmf("one conditional row per y is required".into()));
        }
        let x_outcomes = rows[0].outcomes().to_vec();
        for r in rows {
            r.same_alphabet(&rows[0])?;
        }
        let nx = x_outcomes.len();
        let ny = py.len();
        let mut table = vec![0.0; nx * ny];
        for (j, (row, &w)) in rows.iter().zip(py.probs()).enumerate() {
            for (i, &q) in row.probs().iter().enumerate() {
                table[i * ny + j] = w * q;
            }
        }
        Self::new(x_outcomes, py.outcomes().to_vec(), table)
    }

    pub fn nx(&self) -> usize {
        self.x_outcomes.len()
    }

    pub fn ny(&self) -> usize {
        self.y_outcomes.len()
    }

    pub fn x_outcomes(&self) -> &[usize] {
        &self.x_outcomes
    }

    pub fn y_outcomes(&self) -> &[usize] {
        &self.y_outcomes
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.ny() + j]
    }

    pub(crate) fn x_marginal_probs(&self) -> Vec<f64> {
        let ny = self.ny();
        self.table.chunks(ny).map(|row| row.iter().sum()).collect()
    }

    pub(crate) fn y_marginal_probs(&self) -> Vec<f64> {
        let ny = self.ny();
        let mut out = vec![0.0; ny];
        for row in self.table.chunks(ny) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn x_marginal(&self) -> FinitePmf {
        FinitePmf { outcomes: self.x_outcomes.clone(), probs: self.x_marginal_probs() }
    }

    pub fn y_marginal(&self) -> FinitePmf {
        FinitePmf { outcomes: self.y_outcomes.clone(), probs: self.y_marginal_probs() }
    }

    /// `P(X | Y = y_index)`, or `None` when that `y` has zero mass.
    pub fn x_given_y(&self, j: usize) -> Option<FinitePmf> {
        let col: Vec<f64> = (0..self.nx()).map(|i| self.get(i, j)).collect();
        let mass: f64 = col.iter().sum();
        if mass <= 0.0 {
            return None;
        }
        Some(FinitePmf {
            outcomes: self.x_outcomes.clone(),
            probs: col.iter().map(|v| v / mass).collect(),
        })
    }

    /// Swap the axes.
    pub fn transpose(&self) -> JointPmf {
        let (nx, ny) = (self.nx(), self.ny());
        let mut table = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                table[j * nx + i] = self.get(i, j);
            }
        }
        JointPmf { x_outcomes: self.y_outcomes.clone(), y_outcomes: self.x_outcomes.clone(), table }
    }

    /// Joint of `(g(X), Y)` for a map `g` from x indices to `0..n_out`.
    pub fn map_x<G: Fn(usize) -> usize>(&self, n_out: usize, g: G) -> Result<JointPmf> {
        let ny = self.ny();
        let mut table = vec![0.0; n_out * ny];
        for i in 0..self.nx() {
            let k = g(i);
            if k >= n_out {
                return Err(Error::InvalidPmf(format!("map sends {i} to {k} >= {n_out}")));
            }
            for j in 0..ny {
                table[k * ny + j] += self.get(i, j);
            }
        }
        Ok(JointPmf { x_outcomes: (0..n_out).collect(), y_outcomes: self.y_outcomes.clone(), table })
    }
}

/// Joint pmf of `(X, Y, Z)` over `0..nx` × `0..ny` × `0..nz`, index `(x*ny + y)*nz + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriplePmf {
    nx: usize,
    ny: usize,
    nz: usize,
    table: Vec<f64>,
}

impl TriplePmf {
    pub fn new(nx: usize, ny: usize, nz: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != nx * ny * nz {
            return Err(Error::InvalidPmf("triple table has the wrong size".into()));
        }
        check_probs(&table)?;
        Ok(TriplePmf { nx, ny, nz, table })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.table[(x * self.ny + y) * self.nz + z]
    }

    pub fn z_marginal(&self) -> FinitePmf {
        let mut pz = vec![0.0; self.nz];
        for (k, v) in self.table.iter().enumerate() {
            pz[k % self.nz] += v;
        }
        FinitePmf { outcomes: (0..self.nz).collect(), probs: pz }
    }

    /// Joint of `(X, Y)` given `Z = z`, or `None` if `z` has zero mass.
    pub fn xy_given_z(&self, z: usize) -> Option<JointPmf> {
        let mut t = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                t[x * self.ny + y] = self.get(x, y, z);
            }
        }
        let mass: f64 = t.iter().sum();
        if mass <= 0.0 {
            return None;
        }
        t.iter_mut().for_each(|v| *v /= mass);
        Some(JointPmf { x_outcomes: (0..self.nx).collect(), y_outcomes: (0..self.ny).collect(), table: t })
    }

    /// Joint of `(X, Y)` with `Z` summed out.
    pub fn xy_marginal(&self) -> JointPmf {
        let mut t = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                t[x * self.ny + y] = (0..self.nz).map(|z| self.get(x, y, z)).sum();
            }
        }
        JointPmf { x_outcomes: (0..self.nx).collect(), y_outcomes: (0..self.ny).collect(), table: t }
    }

    /// Joint of `(Z, Y)`.
    pub fn zy_marginal(&self) -> JointPmf {
        let mut t = vec![0.0; self.nz * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    t[z * self.ny + y] += self.get(x, y, z);
                }
            }
        }
        JointPmf { x_outcomes: (0..self.nz).collect(), y_outcomes: (0..self.ny).collect(), table: t }
    }

    /// Joint of the pair `(X, Z)` (flattened as `x*nz + z`) against `Y`.
    pub fn xz_y_joint(&self) -> JointPmf {
        let mut t = vec![0.0; self.nx * self.nz * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    t[(x * self.nz + z) * self.ny + y] = self.get(x, y, z);
                }
            }
        }
        JointPmf {
            x_outcomes: (0..self.nx * self.nz).collect(),
            y_outcomes: (0..self.ny).collect(),
            table: t,
        }
    }
}
