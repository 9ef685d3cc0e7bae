//! Integer linear algebra and finitely generated abelian groups.
//!
//! [`smith_normal_form`] works over arbitrary-precision integers and returns
//! both unimodular transforms. Large relation systems (tens of thousands of
//! sparse rows) go through [`RelationLattice`] first, which folds rows into
//! an echelon basis of at most `cols` rows before the Smith step.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(cols: usize, rows: &[R]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = v;
        }
    }
}

/// `left * m * right` is diagonal with `diagonal[i] | diagonal[i+1]`
/// (zeros last); `left` and `right` are unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    snf_impl(m, true)
}

fn snf_impl(m: &IntMatrix, transforms: bool) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = if transforms { IntMatrix::identity(r) } else { IntMatrix::zeros(0, 0) };
    let mut right = if transforms { IntMatrix::identity(c) } else { IntMatrix::zeros(0, 0) };
    let n = r.min(c);
    let mut diagonal = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let v = a.get(i, j);
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            if transforms {
                left.swap_rows(t, pi);
                right.swap_cols(t, pj);
            }
            let pivot = a.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -(a.get(i, t).div_floor(&pivot));
                a.add_row(i, t, &q);
                if transforms {
                    left.add_row(i, t, &q);
                }
                dirty |= !a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -(a.get(t, j).div_floor(&pivot));
                a.add_col(j, t, &q);
                if transforms {
                    right.add_col(j, t, &q);
                }
                dirty |= !a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    if transforms {
                        left.add_row(t, i, &one);
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if transforms {
                left.negate_row(t);
            }
        }
        diagonal.push(a.get(t, t).clone());
    }
    // zeros can only appear once the trailing block is zero, so they are last
    SmithForm { diagonal, left, right }
}

/// Invariant factors of the cokernel of `m` viewed as a relation matrix
/// (rows are relations on `m.cols()` generators).
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let mut lattice = RelationLattice::new(m.cols, None);
    for i in 0..m.rows {
        let row: Option<Vec<(usize, i64)>> = (0..m.cols)
            .filter(|&j| !m.get(i, j).is_zero())
            .map(|j| m.get(i, j).to_i64().map(|v| (j, v)))
            .collect();
        match row {
            Some(r) => lattice.add_sparse(&r),
            None => return cokernel_direct(m),
        }
    }
    lattice.finish()
}

fn cokernel_direct(m: &IntMatrix) -> AbelianGroup {
    let snf = snf_impl(m, false);
    let mut factors = Vec::new();
    let mut free = m.cols - snf.diagonal.len();
    for d in &snf.diagonal {
        if d.is_zero() {
            free += 1;
        } else if !d.is_one() {
            factors.push(d.to_u64().expect("invariant factor fits in u64"));
        }
    }
    AbelianGroup::from_cyclic_factors(&factors, free)
}

/// Incrementally reduced integer row lattice.
///
/// With a modulus `m`, the lattice is known to contain `m * Z^cols`, and all
/// arithmetic is done modulo `m`. Without one, rows are reduced exactly with
/// overflow-checked `i128` arithmetic, falling back to arbitrary precision.
pub(crate) struct RelationLattice {
    cols: usize,
    modulus: Option<i128>,
    pivots: Vec<Option<Vec<i128>>>,
    rows_seen: Vec<Vec<(usize, i64)>>,
    overflow: bool,
}

impl RelationLattice {
    pub(crate) fn new(cols: usize, modulus: Option<u64>) -> RelationLattice {
        RelationLattice {
            cols,
            modulus: modulus.filter(|&m| m > 0).map(i128::from),
            pivots: vec![None; cols],
            rows_seen: Vec::new(),
            overflow: false,
        }
    }

    pub(crate) fn add_sparse(&mut self, row: &[(usize, i64)]) {
        if self.modulus.is_none() {
            self.rows_seen.push(row.to_vec());
        }
        if self.overflow {
            return;
        }
        let mut dense = vec![0i128; self.cols];
        for &(j, v) in row {
            dense[j] += i128::from(v);
        }
        if let Some(m) = self.modulus {
            for v in &mut dense {
                *v = v.rem_euclid(m);
            }
        }
        if self.insert(dense).is_none() {
            self.overflow = true;
        }
    }

    fn reduce(&self, v: i128) -> i128 {
        match self.modulus {
            Some(m) => v.rem_euclid(m),
            None => v,
        }
    }

    fn insert(&mut self, mut row: Vec<i128>) -> Option<()> {
        let cols = self.cols;
        for c in 0..cols {
            if row[c] == 0 {
                continue;
            }
            let Some(p) = self.pivots[c].take() else {
                if self.modulus.is_none() && row[c] < 0 {
                    for v in &mut row[c..] {
                        *v = -*v;
                    }
                }
                self.pivots[c] = Some(row);
                return Some(());
            };
            let a = p[c];
            let b = row[c];
            if b % a == 0 {
                let q = b / a;
                for j in c..cols {
                    let v = row[j].checked_sub(q.checked_mul(p[j])?)?;
                    row[j] = self.reduce(v);
                }
                self.pivots[c] = Some(p);
                continue;
            }
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            let mut new_p = vec![0i128; cols];
            for j in c..cols {
                let v = s.checked_mul(p[j])?.checked_add(t.checked_mul(row[j])?)?;
                new_p[j] = self.reduce(v);
                let w = ag.checked_mul(row[j])?.checked_sub(bg.checked_mul(p[j])?)?;
                row[j] = self.reduce(w);
            }
            if new_p[c] == 0 {
                // g vanished modulo the modulus
                self.pivots[c] = None;
            } else {
                self.pivots[c] = Some(new_p);
            }
        }
        Some(())
    }

    /// The cokernel `Z^cols / lattice`.
    pub(crate) fn finish(self) -> AbelianGroup {
        if self.overflow {
            let dense: Vec<Vec<i64>> = self
                .rows_seen
                .iter()
                .map(|r| {
                    let mut d = vec![0i64; self.cols];
                    for &(j, v) in r {
                        d[j] += v;
                    }
                    d
                })
                .collect();
            return cokernel_direct(&IntMatrix::from_rows(self.cols, &dense));
        }
        let mut m = IntMatrix::zeros(0, self.cols);
        let mut rows: Vec<Vec<BigInt>> = self
            .pivots
            .into_iter()
            .flatten()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        if let Some(modulus) = self.modulus {
            for j in 0..self.cols {
                let mut r = vec![BigInt::zero(); self.cols];
                r[j] = BigInt::from(modulus);
                rows.push(r);
            }
        }
        m.rows = rows.len();
        m.data = rows.into_iter().flatten().collect();
        cokernel_direct(&m)
    }
}

/// Row echelon form over `Z/m` for small `m`, in machine words. The
/// reduced rows, together with `m * Z^cols`, span the same lattice as the
/// input rows.
pub(crate) struct SmallModLattice {
    cols: usize,
    m: u32,
    /// `floor(2^32 / m) + 1`, for division-free reduction of values below `2^16`.
    magic: u64,
    pivots: Vec<Option<Vec<u32>>>,
}

impl SmallModLattice {
    /// `modulus` must be below 256.
    pub(crate) fn new(cols: usize, modulus: u32) -> SmallModLattice {
        assert!((2..256).contains(&modulus), "modulus out of range");
        SmallModLattice { cols, m: modulus, magic: (1u64 << 32) / u64::from(modulus) + 1, pivots: vec![None; cols] }
    }

    #[inline]
    fn reduce(&self, v: u32) -> u32 {
        let q = ((u64::from(v) * self.magic) >> 32) as u32;
        let r = v.wrapping_sub(q.wrapping_mul(self.m));
        if r >= self.m { r.wrapping_add(self.m) } else { r }
    }

    pub(crate) fn add_sparse(&mut self, row: &[(usize, i64)]) {
        let m = i64::from(self.m);
        let mut dense = vec![0u32; self.cols];
        for &(j, v) in row {
            dense[j] = ((i64::from(dense[j]) + v).rem_euclid(m)) as u32;
        }
        self.insert(dense);
    }

    fn insert(&mut self, mut row: Vec<u32>) {
        let (cols, m) = (self.cols, self.m);
        for c in 0..cols {
            if row[c] == 0 {
                continue;
            }
            let Some(p) = self.pivots[c].take() else {
                self.pivots[c] = Some(row);
                return;
            };
            let (a, b) = (p[c], row[c]);
            if b % a == 0 {
                let q = m - b / a;
                for j in c..cols {
                    row[j] = self.reduce(row[j] + q * p[j]);
                }
                self.pivots[c] = Some(p);
                continue;
            }
            let (g, s, t) = ext_gcd(i128::from(a), i128::from(b));
            let to_mod = |x: i128| x.rem_euclid(i128::from(m)) as u32;
            let (s, t) = (to_mod(s), to_mod(t));
            let (ag, nbg) = (to_mod(i128::from(a) / g), to_mod(-(i128::from(b) / g)));
            let mut new_p = vec![0u32; cols];
            for j in c..cols {
                new_p[j] = self.reduce(s * p[j] + t * row[j]);
                row[j] = self.reduce(ag * row[j] + nbg * p[j]);
            }
            self.pivots[c] = (new_p[c] != 0).then_some(new_p);
        }
    }

    /// The cokernel `Z^cols / (lattice + m Z^cols)`, assembled from Smith
    /// forms over `Z/p^k` for each prime power exactly dividing `m`.
    pub(crate) fn finish(self) -> AbelianGroup {
        let rows: Vec<Vec<u32>> = self.pivots.into_iter().flatten().collect();
        let mut factors = Vec::new();
        for (p, q) in prime_power_parts(u64::from(self.m)) {
            factors.extend(local_cokernel(&rows, self.cols, p as u32, q as u32));
        }
        AbelianGroup::from_cyclic_factors(&factors, 0)
    }
}

/// Cyclic factors of `Z^cols / (rows + q Z^cols)` for a prime power `q = p^k`.
fn local_cokernel(rows: &[Vec<u32>], cols: usize, p: u32, q: u32) -> Vec<u64> {
    let q64 = u64::from(q);
    let valuation = |mut x: u64| {
        let mut v = 0;
        while x % u64::from(p) == 0 {
            x /= u64::from(p);
            v += 1;
        }
        v
    };
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| u64::from(x) % q64).collect()).collect();
    let mut col_order: Vec<usize> = (0..cols).collect();
    let mut factors = Vec::new();
    let mut r = 0;
    while r < a.len() && r < cols {
        // entry of least valuation in the remaining block
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            for (jj, &c) in col_order.iter().enumerate().skip(r) {
                let x = row[c];
                if x != 0 {
                    let v = valuation(x);
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, jj));
                    }
                }
            }
            if best.is_some_and(|(v, _, _)| v == 0) {
                break;
            }
        }
        let Some((v, i, jj)) = best else { break };
        a.swap(r, i);
        col_order.swap(r, jj);
        let c = col_order[r];
        let pv = u64::from(p).pow(v);
        let unit = a[r][c] / pv;
        let (_, inv, _) = ext_gcd(i128::from(unit), i128::from(q));
        let inv = inv.rem_euclid(i128::from(q)) as u64;
        for x in a[r].iter_mut() {
            *x = *x * inv % q64;
        }
        let pivot = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            let f = row[c] / pv;
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (q64 - f) * y) % q64;
                }
            }
        }
        factors.push(pv);
        r += 1;
    }
    factors.extend(std::iter::repeat(q64).take(cols - r));
    factors
}

/// `(g, s, t)` with `s*a + t*b = g = gcd(a, b) > 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// A finitely generated abelian group in invariant-factor form:
/// `Z_{d1} x ... x Z_{dk} x Z^r` with `d1 | d2 | ... | dk`, each `di >= 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    invariants: Vec<u64>,
    free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> AbelianGroup {
        AbelianGroup::default()
    }

    pub fn cyclic(n: u64) -> AbelianGroup {
        AbelianGroup::from_cyclic_factors(&[n], 0)
    }

    /// Canonical form of a direct sum of cyclic groups. A factor of 0 is
    /// read as `Z` and counts towards the free rank.
    pub fn from_cyclic_factors(factors: &[u64], free_rank: usize) -> AbelianGroup {
        let mut free = free_rank;
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
        for &f in factors {
            if f == 0 {
                free += 1;
                continue;
            }
            for (p, pk) in prime_power_parts(f) {
                by_prime.entry(p).or_default().push(pk);
            }
        }
        let width = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut inv = vec![1u64; width];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (k, &pk) in powers.iter().enumerate() {
                inv[width - 1 - k] *= pk;
            }
        }
        AbelianGroup { invariants: inv, free_rank: free }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.invariants.iter().product())
    }

    pub fn exponent(&self) -> Option<u64> {
        self.is_finite().then(|| self.invariants.last().copied().unwrap_or(1))
    }

    /// Invariants with `0` for each free factor, as used in JSON output.
    pub fn to_list(&self) -> Vec<u64> {
        let mut v = self.invariants.clone();
        v.extend(std::iter::repeat_n(0, self.free_rank));
        v
    }

    /// All elements as coordinate vectors over the finite factors.
    fn element_coords(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

fn prime_power_parts(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            out.push((p, pk));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

impl fmt::Display for AbelianGroup {
    /// `Z2 x Z4 x Z`, or `1` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .invariants
            .iter()
            .map(|d| format!("Z{d}"))
            .chain(std::iter::repeat_n("Z".to_string(), self.free_rank))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl std::str::FromStr for AbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(AbelianGroup::trivial());
        }
        let mut factors = Vec::new();
        for part in s.split(['x', '*']) {
            let part = part.trim();
            let digits = part
                .strip_prefix('Z')
                .ok_or_else(|| Error::Invalid(format!("bad abelian factor `{part}`")))?;
            if digits.is_empty() {
                factors.push(0);
            } else {
                factors.push(digits.parse().map_err(|_| Error::Invalid(format!("bad abelian factor `{part}`")))?);
            }
        }
        Ok(AbelianGroup::from_cyclic_factors(&factors, 0))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_list().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<u64> = Vec::deserialize(d)?;
        Ok(AbelianGroup::from_cyclic_factors(&v, 0))
    }
}

/// Tensor product of Z-modules.
pub fn z_tensor(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
    let mut factors = Vec::new();
    for &d in &a.invariants {
        for &e in &b.invariants {
            factors.push(d.gcd(&e));
        }
    }
    for _ in 0..a.free_rank {
        factors.extend(&b.invariants);
    }
    for _ in 0..b.free_rank {
        factors.extend(&a.invariants);
    }
    AbelianGroup::from_cyclic_factors(&factors, a.free_rank * b.free_rank)
}

/// `a ⊗ a ⊗ ... ⊗ a` with `n >= 1` factors.
pub fn z_tensor_power(a: &AbelianGroup, n: usize) -> Result<AbelianGroup> {
    if n == 0 {
        return Err(Error::Invalid("tensor power needs n >= 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..n {
        acc = z_tensor(&acc, a);
    }
    Ok(acc)
}

/// `Λ²(a)`: one `Z_gcd(di, dj)` per pair of cyclic factors.
pub fn lambda2_exterior(a: &AbelianGroup) -> AbelianGroup {
    let list = a.to_list();
    let mut factors = Vec::new();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            factors.push(list[i].gcd(&list[j]));
        }
    }
    AbelianGroup::from_cyclic_factors(&factors, 0)
}

/// Largest group accepted by [`gamma_whitehead`].
pub const GAMMA_MAX_ORDER: u64 = 128;

/// Whitehead's quadratic functor on a finite abelian group, computed from
/// its defining presentation: one generator `w(x)` per element, relations
/// `w(-x) = w(x)` and
/// `w(x+y+z) - w(x+y) - w(y+z) - w(x+z) + w(x) + w(y) + w(z) = 0`.
pub fn gamma_whitehead(a: &AbelianGroup) -> Result<AbelianGroup> {
    if !a.is_finite() {
        return Err(Error::Invalid("Γ is only computed for finite groups".into()));
    }
    let order = a.order().unwrap_or(1);
    if order > GAMMA_MAX_ORDER {
        return Err(Error::SizeLimit { what: "Γ presentation".into(), size: order, limit: GAMMA_MAX_ORDER });
    }
    let elems = a.element_coords();
    let n = elems.len();
    let moduli = a.invariants.clone();
    let index = |v: &[u64]| -> usize {
        let mut k = 0usize;
        for (x, &d) in v.iter().zip(&moduli) {
            k = k * d as usize + *x as usize;
        }
        k
    };
    let add = |x: &[u64], y: &[u64]| -> Vec<u64> {
        x.iter().zip(y).zip(&moduli).map(|((a, b), d)| (a + b) % d).collect()
    };
    // e^2 w(x) = w(e x) = 0 follows from the relations, so work modulo e^2
    let e = a.exponent().unwrap_or(1);
    let mut lattice = RelationLattice::new(n, Some(e * e));
    for x in 0..n {
        let neg: Vec<u64> = elems[x].iter().zip(&moduli).map(|(v, d)| (d - v) % d).collect();
        let nx = index(&neg);
        if nx != x {
            lattice.add_sparse(&[(nx, 1), (x, -1)]);
        }
    }
    for x in 0..n {
        for y in x..n {
            let xy = add(&elems[x], &elems[y]);
            for z in y..n {
                let xyz = add(&xy, &elems[z]);
                let yz = add(&elems[y], &elems[z]);
                let xz = add(&elems[x], &elems[z]);
                lattice.add_sparse(&[
                    (index(&xyz), 1),
                    (index(&xy), -1),
                    (index(&yz), -1),
                    (index(&xz), -1),
                    (x, 1),
                    (y, 1),
                    (z, 1),
                ]);
            }
        }
    }
    Ok(lattice.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag(factors: &[u64]) -> AbelianGroup {
        AbelianGroup::from_cyclic_factors(factors, 0)
    }

    fn check_snf(rows: &[Vec<i64>]) -> Vec<BigInt> {
        let cols = rows.first().map_or(0, Vec::len);
        let m = IntMatrix::from_rows(cols, rows);
        let s = smith_normal_form(&m);
        let d = s.left.mul(&m).mul(&s.right);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    assert!(d.get(i, j).is_zero());
                } else {
                    assert_eq!(d.get(i, i), &s.diagonal[i]);
                }
            }
        }
        assert!(s.left.determinant().abs().is_one());
        assert!(s.right.determinant().abs().is_one());
        for w in s.diagonal.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        s.diagonal
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&[vec![2, 0], vec![0, 2]]), vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(check_snf(&[vec![2, 4], vec![6, 8]]), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(check_snf(&[vec![0, 0, 0], vec![0, 0, 0]]), vec![BigInt::zero(), BigInt::zero()]);
        let s = smith_normal_form(&IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 2]]));
        assert_eq!(s.left, IntMatrix::identity(2));
        assert_eq!(s.right, IntMatrix::identity(2));
    }

    #[test]
    fn zero_matrix_cokernel_is_free() {
        let m = IntMatrix::from_rows(3, &[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(cokernel(&m), AbelianGroup::from_cyclic_factors(&[], 3));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(ag(&[6]).invariants(), &[6]);
        assert_eq!(ag(&[2, 3]).invariants(), &[6]);
        assert_eq!(ag(&[4, 2, 1]).invariants(), &[2, 4]);
        assert_eq!(ag(&[12, 18]).invariants(), &[6, 36]);
        assert_eq!(ag(&[2, 2, 4]).to_string(), "Z2 x Z2 x Z4");
        assert_eq!("Z2 x Z2 x Z4".parse::<AbelianGroup>().unwrap(), ag(&[2, 2, 4]));
        assert_eq!(AbelianGroup::trivial().to_string(), "1");
    }

    #[test]
    fn tensor_examples() {
        assert!(z_tensor(&ag(&[2]), &ag(&[3])).is_trivial());
        assert_eq!(z_tensor(&ag(&[2, 2]), &ag(&[2, 2])), ag(&[2, 2, 2, 2]));
        assert_eq!(z_tensor(&ag(&[4]), &ag(&[6])), ag(&[2]));
        assert_eq!(z_tensor_power(&ag(&[2, 2]), 3).unwrap(), ag(&[2; 8]));
        assert_eq!(z_tensor_power(&ag(&[6]), 4).unwrap(), ag(&[6]));
        assert_eq!(z_tensor_power(&ag(&[2, 3]), 1).unwrap(), ag(&[6]));
        let z = AbelianGroup::from_cyclic_factors(&[], 1);
        assert_eq!(z_tensor(&z, &ag(&[4])), ag(&[4]));
        assert_eq!(z_tensor(&z, &z), z);
    }

    #[test]
    fn exterior_examples() {
        assert!(lambda2_exterior(&ag(&[7])).is_trivial());
        assert_eq!(lambda2_exterior(&ag(&[2, 2])), ag(&[2]));
        assert_eq!(lambda2_exterior(&ag(&[2, 2, 2])), ag(&[2, 2, 2]));
    }

    #[test]
    fn gamma_examples() {
        assert!(gamma_whitehead(&AbelianGroup::trivial()).unwrap().is_trivial());
        assert_eq!(gamma_whitehead(&ag(&[2])).unwrap(), ag(&[4]));
        assert_eq!(gamma_whitehead(&ag(&[3])).unwrap(), ag(&[3]));
        assert!(gamma_whitehead(&AbelianGroup::from_cyclic_factors(&[], 1)).is_err());
    }

    /// Γ(Z2) straight from the two-generator presentation, without the
    /// modular lattice: rows over all triples of Z2 plus the symmetry rows.
    #[test]
    fn gamma_z2_direct_oracle() {
        let add = |a: usize, b: usize| (a + b) % 2;
        let mut rows = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let mut r = vec![0i64; 2];
                    r[add(add(x, y), z)] += 1;
                    r[add(x, y)] -= 1;
                    r[add(y, z)] -= 1;
                    r[add(x, z)] -= 1;
                    r[x] += 1;
                    r[y] += 1;
                    r[z] += 1;
                    rows.push(r);
                }
            }
        }
        let g = cokernel_direct(&IntMatrix::from_rows(2, &rows));
        assert_eq!(g, ag(&[4]));
    }
}
