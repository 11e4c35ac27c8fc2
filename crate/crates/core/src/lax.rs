//! Arithmetic Lax equations on `GL_n` over `Z/p^N`.
//!
//! Two Frobenius lifts on open pieces of `GL_n`:
//! `frobenius_star` on the locus `C(T* x G)` of matrices with split spectrum
//! distinct mod `p` (eigen-decomposition gauge), and `frobenius_star_star`
//! on matrices regular mod `p` (companion-form gauge). Both intertwine the
//! characteristic-polynomial coefficients with `z -> z^p`.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flows::{char_poly, determinant, mat_mul};
use crate::padic::{teichmuller, TruncatedPadic};
use crate::ring::check_odd_prime;

/// Square matrix over `Z/p^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PMatrix {
    p: u64,
    prec: u32,
    rows: Vec<Vec<TruncatedPadic>>,
}

impl PMatrix {
    pub fn new(rows: Vec<Vec<TruncatedPadic>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("matrix must be square and nonempty".into()));
        }
        let p = rows[0][0].prime();
        let prec = rows.iter().flatten().map(|t| t.precision()).min().unwrap();
        if rows.iter().flatten().any(|t| t.prime() != p) {
            return Err(Error::Precondition("entries over different primes".into()));
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|t| t.reduce(prec).unwrap()).collect())
            .collect();
        Ok(PMatrix { p, prec, rows })
    }

    pub fn from_i64(p: u64, prec: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| TruncatedPadic::from_i64(p, prec, v)).collect())
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn identity(p: u64, prec: u32, n: usize) -> Result<Self> {
        Self::diag(
            &(0..n)
                .map(|_| TruncatedPadic::one(p, prec))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn diag(t: &[TruncatedPadic]) -> Result<Self> {
        let n = t.len();
        let zero = TruncatedPadic::zero(t[0].prime(), t[0].precision())?;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { t[i].clone() } else { zero.clone() }).collect())
            .collect();
        Self::new(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn rows(&self) -> &[Vec<TruncatedPadic>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedPadic {
        &self.rows[i][j]
    }

    fn zero_entry(&self) -> TruncatedPadic {
        TruncatedPadic::zero(self.p, self.prec).unwrap()
    }

    fn one_entry(&self) -> TruncatedPadic {
        TruncatedPadic::one(self.p, self.prec).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        PMatrix::new(mat_mul(&self.rows, &o.rows)).unwrap()
    }

    pub fn add(&self, o: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&o.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            .collect();
        PMatrix::new(rows).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.scale(k)).collect())
            .collect();
        PMatrix::new(rows).unwrap()
    }

    pub fn reduce(&self, prec: u32) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.reduce(prec)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn det(&self) -> TruncatedPadic {
        determinant(&self.rows)
    }

    /// Membership in `GL_n`: determinant a unit.
    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    /// `[P_1, ..., P_n]` with `det(s - x) = s^n - P_1 s^(n-1) + ... + (-1)^n P_n`.
    pub fn char_poly(&self) -> Vec<TruncatedPadic> {
        char_poly(&self.rows)
    }

    pub fn trace(&self) -> TruncatedPadic {
        (1..self.size()).fold(self.rows[0][0].clone(), |acc, i| acc.add(&self.rows[i][i]))
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect())
            .collect();
        PMatrix::new(rows).unwrap()
    }

    /// Inverse by Gauss–Jordan elimination with unit pivots.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.size();
        let mut a = self.rows.clone();
        let mut inv = PMatrix::identity(self.p, self.prec, n)?.rows;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| a[r][col].is_unit())
                .ok_or_else(|| Error::NotInvertible(format!("no unit pivot in column {col}")))?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let pinv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
        PMatrix::new(inv)
    }

    /// Entrywise `p`-th power: the Frobenius lift `x_ij -> x_ij^p` of `GL_n`.
    pub fn phi0(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.pow(self.p)).collect())
            .collect();
        PMatrix::new(rows).unwrap()
    }

    /// Congruence mod `p`.
    pub fn congruent_mod_p(&self, o: &Self) -> bool {
        self.rows
            .iter()
            .flatten()
            .zip(o.rows.iter().flatten())
            .all(|(a, b)| a.residue() == b.residue())
    }

    pub fn is_teichmuller(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_delta_constant())
    }
}

impl fmt::Display for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let vals: Vec<String> = r.iter().map(|x| x.value().to_string()).collect();
            write!(f, "[{}]", vals.join(", "))?;
        }
        write!(f, "] mod {}^{}", self.p, self.prec)
    }
}

/// A point of the diagonal torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    pub t: Vec<TruncatedPadic>,
}

impl TorusPoint {
    pub fn new(t: Vec<TruncatedPadic>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Precondition("empty torus point".into()));
        }
        if let Some(x) = t.iter().find(|x| !x.is_unit()) {
            return Err(Error::NonUnit(format!("torus entry {x}")));
        }
        Ok(TorusPoint { t })
    }

    /// Entries pairwise distinct mod `p` (the `T*` chart).
    pub fn is_regular(&self) -> bool {
        let r: Vec<u64> = self.t.iter().map(|x| x.residue()).collect();
        (0..r.len()).all(|i| (i + 1..r.len()).all(|j| r[i] != r[j]))
    }

    pub fn matrix(&self) -> PMatrix {
        PMatrix::diag(&self.t).unwrap()
    }

    pub fn phi0(&self) -> Self {
        TorusPoint {
            t: self.t.iter().map(|x| x.pow(x.prime())).collect(),
        }
    }
}

/// `C(h, g) = g^{-1} h g`.
pub fn conj(h: &TorusPoint, g: &PMatrix) -> Result<PMatrix> {
    Ok(g.inverse()?.mul(&h.matrix()).mul(g))
}

pub fn phi0_entrywise(g: &PMatrix) -> PMatrix {
    g.phi0()
}

/// `det(s - x)` evaluated at `s`.
fn char_eval(cp: &[TruncatedPadic], s: &TruncatedPadic) -> TruncatedPadic {
    // s^n - P1 s^(n-1) + P2 s^(n-2) - ...
    let mut acc = TruncatedPadic::one(s.prime(), s.precision()).unwrap();
    for (k, pk) in cp.iter().enumerate() {
        let c = if k % 2 == 0 { pk.neg() } else { pk.clone() };
        acc = acc.mul(s).add(&c);
    }
    acc
}

fn char_eval_derivative(cp: &[TruncatedPadic], s: &TruncatedPadic) -> TruncatedPadic {
    let n = cp.len();
    let zero = TruncatedPadic::zero(s.prime(), s.precision()).unwrap();
    // coefficients of s^n, s^(n-1), ..., s^0
    let mut coeffs = vec![TruncatedPadic::one(s.prime(), s.precision()).unwrap()];
    for (k, pk) in cp.iter().enumerate() {
        coeffs.push(if k % 2 == 0 { pk.neg() } else { pk.clone() });
    }
    let mut acc = zero;
    for (i, c) in coeffs.iter().enumerate().take(n) {
        let e = (n - i) as i64;
        acc = acc.mul(s).add(&c.scale(e));
    }
    acc
}

/// Left null vector of `m` (rank `n - 1`) with a unit entry, by elimination
/// on unit pivots; the free coordinate is set to 1.
fn left_kernel_vector(m: &PMatrix) -> Result<Vec<TruncatedPadic>> {
    // w m = 0  <=>  m^T w^T = 0
    let n = m.size();
    let mut a = m.transpose().rows;
    let mut pivcols = Vec::new();
    let mut row = 0;
    let mut cols: Vec<usize> = (0..n).collect();
    while row < n - 1 {
        let found = (row..n).flat_map(|r| cols[row..].iter().map(move |&c| (r, c))).find(|&(r, c)| a[r][c].is_unit());
        let (r, c) = found.ok_or_else(|| Error::RepeatedEigenvalue("eigenspace has dimension > 1 mod p".into()))?;
        a.swap(row, r);
        let ci = cols.iter().position(|&x| x == c).unwrap();
        cols.swap(row, ci);
        let pinv = a[row][c].inv()?;
        for j in 0..n {
            a[row][j] = a[row][j].mul(&pinv);
        }
        for r2 in 0..n {
            if r2 == row || a[r2][c].is_zero() {
                continue;
            }
            let f = a[r2][c].clone();
            for j in 0..n {
                a[r2][j] = a[r2][j].sub(&f.mul(&a[row][j]));
            }
        }
        pivcols.push(c);
        row += 1;
    }
    if a[n - 1].iter().any(|x| !x.is_zero()) {
        return Err(Error::Internal("eigenvalue is not an exact root".into()));
    }
    let free = cols[n - 1];
    let mut w = vec![m.zero_entry(); n];
    w[free] = m.one_entry();
    for (r, &c) in pivcols.iter().enumerate() {
        w[c] = a[r][free].neg();
    }
    Ok(w)
}

/// `x = g^{-1} h g` with `h` diagonal, for `x` with split spectrum distinct mod `p`.
pub fn eigen_split(x: &PMatrix) -> Result<(TorusPoint, PMatrix)> {
    let p = x.prime();
    let n = x.size();
    let prec = x.precision();
    let cp = x.char_poly();
    let mut roots = Vec::new();
    for r in 0..p {
        let s = TruncatedPadic::from_i64(p, prec, r as i64)?;
        if char_eval(&cp, &s).residue() == 0 {
            if char_eval_derivative(&cp, &s).residue() == 0 {
                return Err(Error::RepeatedEigenvalue(format!("eigenvalue {r} repeated mod {p}")));
            }
            roots.push(s);
        }
    }
    if roots.len() < n {
        return Err(Error::RootNotInBase(format!(
            "characteristic polynomial has {} of {n} roots mod {p}",
            roots.len()
        )));
    }
    // Hensel: each Newton step doubles the number of correct digits
    for t in roots.iter_mut() {
        let mut digits = 1;
        while digits < prec {
            let d = char_eval_derivative(&cp, t).inv()?;
            *t = t.sub(&char_eval(&cp, t).mul(&d));
            digits *= 2;
        }
        if !char_eval(&cp, t).is_zero() {
            return Err(Error::Internal("Hensel lift did not converge".into()));
        }
    }
    let mut g_rows = Vec::with_capacity(n);
    for t in &roots {
        let shifted = x.sub(&PMatrix::diag(&vec![t.clone(); n])?);
        g_rows.push(left_kernel_vector(&shifted)?);
    }
    let g = PMatrix::new(g_rows)?;
    let h = TorusPoint::new(roots)?;
    if conj(&h, &g)? != *x {
        return Err(Error::Internal("eigen decomposition does not reconstruct x".into()));
    }
    Ok((h, g))
}

/// `phi^{G*}(C(h, g)) = C(phi0 h, phi0 g)`.
pub fn frobenius_star_from_split(h: &TorusPoint, g: &PMatrix) -> Result<PMatrix> {
    conj(&h.phi0(), &g.phi0())
}

pub fn frobenius_star(x: &PMatrix) -> Result<PMatrix> {
    let (h, g) = eigen_split(x)?;
    frobenius_star_from_split(&h, &g)
}

/// Companion matrix with ones on the subdiagonal and last column
/// `(-c_0, ..., -c_{n-1})` for `s^n + c_{n-1} s^{n-1} + ... + c_0`, given `P_1..P_n`
/// (so `c_{n-j} = (-1)^j P_j`).
pub fn companion(cp: &[TruncatedPadic]) -> Result<PMatrix> {
    let n = cp.len();
    let p = cp[0].prime();
    let prec = cp.iter().map(|x| x.precision()).min().unwrap();
    let mut rows = vec![vec![TruncatedPadic::zero(p, prec)?; n]; n];
    for i in 1..n {
        rows[i][i - 1] = TruncatedPadic::one(p, prec)?;
    }
    for j in 1..=n {
        // c_{n-j} = (-1)^j P_j; entry is -c_{n-j}
        let c = if j % 2 == 0 { cp[j - 1].clone() } else { cp[j - 1].neg() };
        rows[n - j][n - 1] = c.neg();
    }
    PMatrix::new(rows)
}

fn krylov(x: &PMatrix, w: &[TruncatedPadic]) -> PMatrix {
    let n = x.size();
    let mut cols = vec![w.to_vec()];
    for k in 1..n {
        let prev = &cols[k - 1];
        let next = (0..n)
            .map(|i| (0..n).fold(x.zero_entry(), |acc, j| acc.add(&x.rows[i][j].mul(&prev[j]))))
            .collect();
        cols.push(next);
    }
    PMatrix::new((0..n).map(|i| (0..n).map(|k| cols[k][i].clone()).collect()).collect()).unwrap()
}

/// A vector `w` whose Krylov matrix `[w, xw, ..., x^{n-1}w]` is invertible,
/// searched as `e1, e1+e2, ...`, then `e2, e3, ...`, then seeded random vectors.
pub fn cyclic_vector(x: &PMatrix) -> Result<(Vec<TruncatedPadic>, PMatrix)> {
    let n = x.size();
    let unit = |idx: &[usize]| -> Vec<TruncatedPadic> {
        (0..n)
            .map(|i| if idx.contains(&i) { x.one_entry() } else { x.zero_entry() })
            .collect()
    };
    let mut candidates = Vec::new();
    for k in 1..=n {
        candidates.push(unit(&(0..k).collect::<Vec<_>>()));
    }
    for i in 1..n {
        candidates.push(unit(&[i]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..64 {
        candidates.push(
            (0..n)
                .map(|_| TruncatedPadic::from_i64(x.prime(), x.precision(), rng.gen_range(0..x.prime() as i64)).unwrap())
                .collect(),
        );
    }
    for w in candidates {
        let k = krylov(x, &w);
        if k.is_invertible() {
            return Ok((w, k));
        }
    }
    Err(Error::NotRegular(format!("no cyclic vector mod {} found", x.prime())))
}

/// `phi^{G**}`: with `x = K C K^{-1}` (`K` Krylov, `C` companion) return
/// `phi0(K) C' phi0(K)^{-1}`, `C'` the companion of `P_j(x)^p`.
pub fn frobenius_star_star(x: &PMatrix) -> Result<PMatrix> {
    let (_, k) = cyclic_vector(x)?;
    let cp = x.char_poly();
    let c = companion(&cp)?;
    let kinv = k.inverse()?;
    if kinv.mul(x).mul(&k) != c {
        return Err(Error::Internal("Krylov basis does not produce the companion form".into()));
    }
    let p = x.prime();
    let cpp: Vec<_> = cp.iter().map(|v| v.pow(p)).collect();
    let kp = k.phi0();
    Ok(kp.mul(&companion(&cpp)?).mul(&kp.inverse()?))
}

/// `eps^{-1} y eps` with `eps = 1 + p alpha`.
pub fn conjugate_lift(y: &PMatrix, alpha: &PMatrix) -> Result<PMatrix> {
    let n = y.size();
    let eps = PMatrix::identity(y.prime(), y.precision(), n)?.add(&alpha.scale(y.prime() as i64));
    Ok(eps.inverse()?.mul(y).mul(&eps))
}

/// For a fixed point of `frobenius_star`, whether every eigenvalue is a
/// `delta`-constant.
pub fn spectrum_delta_constant_check(x: &PMatrix) -> Result<bool> {
    if frobenius_star(x)? != *x {
        return Err(Error::Precondition("matrix is not fixed by frobenius_star".into()));
    }
    let (h, _) = eigen_split(x)?;
    Ok(h.t.iter().all(|t| t.is_delta_constant()))
}

/// Random entries in `Z/p^N`.
pub fn random_matrix<G: rand::Rng>(p: u64, prec: u32, n: usize, rng: &mut G) -> Result<PMatrix> {
    check_odd_prime(p)?;
    let m = crate::padic::modulus(p, prec);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| TruncatedPadic::new(p, prec, random_below(&m, rng)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PMatrix::new(rows)
}

fn random_below<G: rand::Rng>(m: &BigUint, rng: &mut G) -> BigUint {
    let v: u128 = rng.gen();
    BigUint::from(v) % m
}

pub fn random_invertible<G: rand::Rng>(p: u64, prec: u32, n: usize, rng: &mut G) -> Result<PMatrix> {
    loop {
        let g = random_matrix(p, prec, n, rng)?;
        if g.is_invertible() {
            return Ok(g);
        }
    }
}

/// Random unit diagonal with entries distinct mod `p`.
pub fn random_torus<G: rand::Rng>(p: u64, prec: u32, n: usize, teich: bool, rng: &mut G) -> Result<TorusPoint> {
    if n as u64 >= p {
        return Err(Error::Precondition(format!("need n < p for {n} distinct unit residues")));
    }
    let mut residues: Vec<u64> = (1..p).collect();
    let mut t = Vec::with_capacity(n);
    for _ in 0..n {
        let r = residues.remove(rng.gen_range(0..residues.len()));
        let v = if teich {
            teichmuller(p, r, prec)?
        } else {
            let m = crate::padic::modulus(p, prec);
            let hi = random_below(&m, rng) / BigUint::from(p) * BigUint::from(p);
            TruncatedPadic::new(p, prec, (hi + BigUint::from(r)) % &m)?
        };
        t.push(v);
    }
    TorusPoint::new(t)
}

/// Random matrix with Teichmüller entries and unit determinant.
pub fn random_teichmuller_invertible<G: rand::Rng>(p: u64, prec: u32, n: usize, rng: &mut G) -> Result<PMatrix> {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| teichmuller(p, rng.gen_range(0..p), prec)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let g = PMatrix::new(rows)?;
        if g.is_invertible() {
            return Ok(g);
        }
    }
}

/// Random matrix regular mod `p`.
pub fn random_regular<G: rand::Rng>(p: u64, prec: u32, n: usize, rng: &mut G) -> Result<PMatrix> {
    loop {
        let x = random_matrix(p, prec, n, rng)?;
        if cyclic_vector(&x).is_ok() {
            return Ok(x);
        }
    }
}

/// A random permutation matrix.
pub fn random_permutation<G: rand::Rng>(p: u64, prec: u32, n: usize, rng: &mut G) -> Result<(Vec<usize>, PMatrix)> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut rows = vec![vec![TruncatedPadic::zero(p, prec)?; n]; n];
    for (i, &j) in perm.iter().enumerate() {
        rows[i][j] = TruncatedPadic::one(p, prec)?;
    }
    Ok((perm, PMatrix::new(rows)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_example() {
        let h = TorusPoint::new(vec![
            TruncatedPadic::from_i64(5, 3, 1).unwrap(),
            TruncatedPadic::from_i64(5, 3, 2).unwrap(),
        ])
        .unwrap();
        let g = PMatrix::from_i64(5, 3, &[vec![1, 1], vec![0, 1]]).unwrap();
        let want = PMatrix::from_i64(5, 3, &[vec![1, -1], vec![0, 2]]).unwrap();
        assert_eq!(conj(&h, &g).unwrap(), want);
        // g h g^{-1} is the other ordering
        let other = g.mul(&h.matrix()).mul(&g.inverse().unwrap());
        assert_eq!(other, PMatrix::from_i64(5, 3, &[vec![1, 1], vec![0, 2]]).unwrap());
    }

    #[test]
    fn phi0_example() {
        let g = PMatrix::from_i64(3, 3, &[vec![1, 2], vec![0, 1]]).unwrap();
        assert_eq!(g.phi0(), PMatrix::from_i64(3, 3, &[vec![1, 8], vec![0, 1]]).unwrap());
    }

    #[test]
    fn nilpotent_repeated() {
        let x = PMatrix::from_i64(5, 3, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert!(matches!(eigen_split(&x), Err(Error::RepeatedEigenvalue(_))));
    }

    #[test]
    fn companion_fixed_gauge() {
        let x = PMatrix::from_i64(5, 3, &[vec![0, -7], vec![1, 3]]).unwrap();
        let y = frobenius_star_star(&x).unwrap();
        let cp = x.char_poly();
        let want = companion(&cp.iter().map(|v| v.pow(5)).collect::<Vec<_>>()).unwrap();
        assert_eq!(y, want);
    }
}
