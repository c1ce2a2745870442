//! Dense univariate polynomials over Q and Sturm-sequence root isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{rat_to_f64, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    /// Ascending coefficients with no trailing zeros.
    coeffs: Vec<Rat>,
}

/// A real root, either known exactly or enclosed in an open interval
/// `(lo, hi)` that contains no other root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealRoot {
    Exact(Rat),
    Isolated { lo: Rat, hi: Rat },
}

impl RealRoot {
    pub fn approx(&self) -> f64 {
        match self {
            RealRoot::Exact(r) => rat_to_f64(r),
            RealRoot::Isolated { lo, hi } => rat_to_f64(&((lo + hi) / Rat::from_integer(2.into()))),
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            RealRoot::Exact(r) => Some(r),
            RealRoot::Isolated { .. } => None,
        }
    }

    /// Enclosing interval (degenerate for exact roots).
    pub fn bounds(&self) -> (Rat, Rat) {
        match self {
            RealRoot::Exact(r) => (r.clone(), r.clone()),
            RealRoot::Isolated { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(lc) => UniPoly::new(self.coeffs.iter().map(|c| c / lc).collect()),
            None => self.clone(),
        }
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UniPoly::new(Vec::new()), self.clone());
        }
        let mut quot = vec![Rat::zero(); n - dd];
        for i in (dd..n).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / lc;
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = &q * dc;
                rem[i - dd + j] -= t;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, all simple.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Scales to an integer polynomial with content 1 and positive leading
    /// coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
        ints.into_iter()
            .map(|c| c / &content * BigInt::from(sign))
            .collect()
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        chain
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    pub fn root_bound(&self) -> Rat {
        let lc = self.leading().expect("nonzero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rat::zero);
        m + Rat::one()
    }

    /// Isolates every distinct real root.
    ///
    /// Rational roots are returned as [`RealRoot::Exact`]; irrational roots as
    /// intervals of width below `eps`. Roots come out in increasing order.
    /// The zero polynomial has no isolated roots (callers treat it separately).
    pub fn real_roots(&self, eps: &Rat) -> Vec<RealRoot> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.squarefree_part();
        let chain = p.sturm_chain();
        let ints = p.primitive_integer();
        let lead = Rat::from_integer(ints.last().unwrap().abs());
        let bound = p.root_bound();

        let mut pending = vec![(-bound.clone(), bound)];
        let mut found = Vec::new();
        while let Some((lo, hi)) = pending.pop() {
            let count = variations(&chain, &lo) - variations(&chain, &hi);
            match count {
                0 => {}
                1 => found.push(p.refine(lo, hi, eps, &lead)),
                _ => {
                    let mid = split_point(&p, &lo, &hi);
                    pending.push((lo, mid.clone()));
                    pending.push((mid, hi));
                }
            }
        }
        found.sort_by(|a, b| a.bounds().0.cmp(&b.bounds().0));
        found
    }

    /// Shrinks `(lo, hi)`, which holds exactly one simple root and has
    /// non-root endpoints, until the root is pinned exactly or the width
    /// drops below `eps`.
    fn refine(&self, mut lo: Rat, mut hi: Rat, eps: &Rat, lead: &Rat) -> RealRoot {
        let two = Rat::from_integer(2.into());
        let lo_sign = sign(&self.eval(&lo));
        let unit = Rat::one() / lead;
        let mut rational_checked = false;
        loop {
            let width = &hi - &lo;
            if !rational_checked && width < unit {
                // Any rational root has the form m / lead; at most one such
                // value fits in an open interval narrower than 1 / lead.
                rational_checked = true;
                let m = (&lo * lead).floor() + Rat::one();
                let cand = m / lead;
                if cand < hi && self.eval(&cand).is_zero() {
                    return RealRoot::Exact(cand);
                }
            }
            if rational_checked && &width < eps {
                return RealRoot::Isolated { lo, hi };
            }
            let mid = (&lo + &hi) / &two;
            let s = sign(&self.eval(&mid));
            if s == 0 {
                return RealRoot::Exact(mid);
            }
            if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// Narrows an isolating interval for a simple root of `self` until it
    /// lies strictly on one side of `x`, returning the refined root.
    pub fn separate_from(&self, root: &RealRoot, x: &Rat) -> RealRoot {
        let RealRoot::Isolated { lo, hi } = root else {
            return root.clone();
        };
        let p = self.squarefree_part();
        let (mut lo, mut hi) = (lo.clone(), hi.clone());
        let lo_sign = sign(&p.eval(&lo));
        if &lo < x && x < &hi {
            let s = sign(&p.eval(x));
            if s == 0 {
                return RealRoot::Exact(x.clone());
            }
            if s == lo_sign {
                lo = x.clone();
            } else {
                hi = x.clone();
            }
        }
        RealRoot::Isolated { lo, hi }
    }
}

fn sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign variations of the chain at `x`, zeros skipped.
fn variations(chain: &[UniPoly], x: &Rat) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// A point strictly between `lo` and `hi` that is not a root of `p`.
fn split_point(p: &UniPoly, lo: &Rat, hi: &Rat) -> Rat {
    let width = hi - lo;
    for den in 2i64.. {
        for num in 1..den {
            let t = Rat::new(num.into(), den.into());
            if t.denom() != &BigInt::from(den) {
                continue;
            }
            let x = lo + &width * t;
            if !p.eval(&x).is_zero() {
                return x;
            }
        }
    }
    unreachable!()
}
