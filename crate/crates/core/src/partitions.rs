//! Integer partitions and Young-diagram box statistics.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::exactnum::{pochhammer, Scalar};
use crate::error::Result;

/// Weakly decreasing list of positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// |λ|
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// ℓ(λ)
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// λ_i with 1-based i; zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn dual(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width).map(|i| self.parts.iter().filter(|&&p| p >= i).count()).collect();
        Partition { parts }
    }

    /// Boxes (i, j), 1-based, row by row.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(r, &len)| (1..=len).map(move |j| (r + 1, j)))
    }

    pub fn arm(&self, i: usize, j: usize) -> usize {
        self.part(i) - j
    }

    /// Uses a column count, so callers iterating many boxes should prefer
    /// [`Partition::legs`].
    pub fn leg(&self, i: usize, j: usize) -> usize {
        self.parts.iter().filter(|&&p| p >= j).count() - i
    }

    pub fn coarm(&self, _i: usize, j: usize) -> usize {
        j - 1
    }

    pub fn coleg(&self, i: usize, _j: usize) -> usize {
        i - 1
    }

    /// (i, j, arm, leg) for every box, with the dual computed once.
    pub fn legs(&self) -> Vec<(usize, usize, usize, usize)> {
        let d = self.dual();
        self.boxes().map(|(i, j)| (i, j, self.part(i) - j, d.part(j) - i)).collect()
    }

    /// Multiplicities m_r = #{i : λ_i = r} for r = 1..=λ_1.
    pub fn multiplicities(&self) -> Vec<usize> {
        let w = self.parts.first().copied().unwrap_or(0);
        let mut m = vec![0; w];
        for &p in &self.parts {
            m[p - 1] += 1;
        }
        m
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All partitions of k in lexicographically decreasing order: (k), (k-1,1), …, (1^k).
pub fn enumerate_partitions(k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(k, k, &mut cur, &mut out);
    out
}

fn fill(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition { parts: cur.clone() });
        return;
    }
    for p in (1..=max.min(rest)).rev() {
        cur.push(p);
        fill(rest - p, p, cur, out);
        cur.pop();
    }
}

/// c(λ, α, t) = Π_{s∈λ} (α·arm(s) + leg(s) + t).
pub fn c_norm<S: Scalar>(lambda: &Partition, alpha: &S, t: &S) -> S {
    let mut acc = t.lift_int(1);
    for (_, _, a, l) in lambda.legs() {
        acc = acc.mul(&alpha.mul_int(a as i64).add_int(l as i64).add(t));
    }
    acc
}

/// θ^λ_(k)(α) = Π_{s≠(1,1)} (α·coarm(s) − coleg(s)).
pub fn theta_onek<S: Scalar>(lambda: &Partition, alpha: &S) -> S {
    let mut acc = alpha.lift_int(1);
    for (i, j) in lambda.boxes() {
        if (i, j) == (1, 1) {
            continue;
        }
        acc = acc.mul(&alpha.mul_int(j as i64 - 1).add_int(-(i as i64 - 1)));
    }
    acc
}

/// Closed product form of θ^λ_(k): α^{k−1}(λ₁−1)!·Π_{i≥2}(−κ(i−1))_{λᵢ}, κ = 1/α.
pub fn theta_onek_closed<S: Scalar>(lambda: &Partition, alpha: &S) -> Result<S> {
    let kappa = alpha.inv()?;
    let k = lambda.size() as u32;
    let mut acc = alpha.powi(k.saturating_sub(1));
    acc = acc.mul_int((1..lambda.part(1) as i64).product::<i64>().max(1));
    for i in 2..=lambda.length() {
        acc = acc.mul(&pochhammer(&kappa.mul_int(-(i as i64 - 1)), lambda.part(i) as i64)?);
    }
    Ok(acc)
}

/// c(λ, α, 1) through its Pochhammer form.
pub fn c_norm_one_closed<S: Scalar>(lambda: &Partition, alpha: &S) -> Result<S> {
    let kappa = alpha.inv()?;
    let l = lambda.length() as i64;
    let mut acc = alpha.powi(lambda.size() as u32);
    for i in 1..=l {
        acc = acc.mul(&pochhammer(&kappa.mul_int(l - i + 1), lambda.part(i as usize) as i64)?);
    }
    for i in 1..=l {
        for j in i + 1..=l {
            let d = (lambda.part(i as usize) - lambda.part(j as usize)) as i64;
            acc = acc.mul(&pochhammer(&kappa.mul_int(j - i), d)?);
            acc = acc.div(&pochhammer(&kappa.mul_int(j - i + 1), d)?)?;
        }
    }
    Ok(acc)
}

/// c(λ, α, α) through its Pochhammer form.
pub fn c_norm_alpha_closed<S: Scalar>(lambda: &Partition, alpha: &S) -> Result<S> {
    let kappa = alpha.inv()?;
    let l = lambda.length() as i64;
    let mut acc = alpha.powi(lambda.size() as u32);
    for i in 1..=l {
        acc = acc.mul(&pochhammer(&kappa.mul_int(l - i).add_int(1), lambda.part(i as usize) as i64)?);
    }
    for i in 1..=l {
        for j in i + 1..=l {
            let d = (lambda.part(i as usize) - lambda.part(j as usize)) as i64;
            acc = acc.mul(&pochhammer(&kappa.mul_int(j - i - 1).add_int(1), d)?);
            acc = acc.div(&pochhammer(&kappa.mul_int(j - i).add_int(1), d)?)?;
        }
    }
    Ok(acc)
}
