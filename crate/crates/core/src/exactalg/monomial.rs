use std::cmp::Ordering;
use std::fmt;

/// The jet variable `u_{kx,ky} = ∂_x^kx ∂_y^ky u`. `(0,0)` is `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub kx: u32,
    pub ky: u32,
}

impl JetVar {
    pub const U: JetVar = JetVar { kx: 0, ky: 0 };

    pub const fn new(kx: u32, ky: u32) -> Self {
        JetVar { kx, ky }
    }

    pub fn dx(self) -> Self {
        JetVar::new(self.kx + 1, self.ky)
    }

    pub fn dy(self) -> Self {
        JetVar::new(self.kx, self.ky + 1)
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kx == 0 && self.ky == 0 {
            write!(f, "u")
        } else {
            write!(f, "u_{{{},{}}}", self.kx, self.ky)
        }
    }
}

/// A power of one jet variable inside a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetPower {
    pub var: JetVar,
    pub mult: u32,
}

/// `Π u_{kx,ky}^m · ε^eps · μ^mu`, jets sorted by `(kx, ky)` with no repeats.
///
/// Field order gives the canonical monomial order: lexicographic on the jet
/// list, then `eps`, then `mu`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffMonomial {
    jets: Vec<JetPower>,
    pub eps: i32,
    pub mu: u32,
}

impl DiffMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds from a list of jet variables, repeats allowed.
    pub fn new(jets: &[JetVar], eps: i32, mu: u32) -> Self {
        let mut sorted = jets.to_vec();
        sorted.sort_unstable();
        let mut out: Vec<JetPower> = Vec::with_capacity(sorted.len());
        for v in sorted {
            match out.last_mut() {
                Some(last) if last.var == v => last.mult += 1,
                _ => out.push(JetPower { var: v, mult: 1 }),
            }
        }
        DiffMonomial { jets: out, eps, mu }
    }

    /// From `(kx, ky, multiplicity)` triples in any order.
    pub fn from_powers(powers: &[(u32, u32, u32)], eps: i32, mu: u32) -> Self {
        let mut jets = Vec::new();
        for &(kx, ky, m) in powers {
            for _ in 0..m {
                jets.push(JetVar::new(kx, ky));
            }
        }
        Self::new(&jets, eps, mu)
    }

    pub fn jets(&self) -> &[JetPower] {
        &self.jets
    }

    pub fn is_constant(&self) -> bool {
        self.jets.is_empty()
    }

    /// Number of jet factors counted with multiplicity (polynomial degree in u).
    pub fn u_degree(&self) -> u32 {
        self.jets.iter().map(|p| p.mult).sum()
    }

    pub fn kx_total(&self) -> i64 {
        self.jets.iter().map(|p| (p.var.kx * p.mult) as i64).sum()
    }

    pub fn ky_total(&self) -> i64 {
        self.jets.iter().map(|p| (p.var.ky * p.mult) as i64).sum()
    }

    /// `(Σkx − eps, Σky − mu)` under `deg u_{a,b} = (a,b)`, `deg ε = (−1,0)`, `deg μ = (0,−1)`.
    pub fn bidegree(&self) -> (i64, i64) {
        (
            self.kx_total() - self.eps as i64,
            self.ky_total() - self.mu as i64,
        )
    }

    pub fn multiplicity(&self, v: JetVar) -> u32 {
        self.jets
            .binary_search_by(|p| p.var.cmp(&v))
            .map(|i| self.jets[i].mult)
            .unwrap_or(0)
    }

    /// Largest jet present, in `(kx, ky)` lexicographic order.
    pub fn top_jet(&self) -> Option<JetPower> {
        self.jets.last().copied()
    }

    /// Jets with multiplicity expanded, sorted.
    pub fn jet_list(&self) -> Vec<JetVar> {
        let mut out = Vec::with_capacity(self.u_degree() as usize);
        for p in &self.jets {
            for _ in 0..p.mult {
                out.push(p.var);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut jets = Vec::with_capacity(self.jets.len() + other.jets.len());
        let (mut i, mut j) = (0, 0);
        while i < self.jets.len() && j < other.jets.len() {
            let (a, b) = (self.jets[i], other.jets[j]);
            match a.var.cmp(&b.var) {
                Ordering::Less => {
                    jets.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    jets.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    jets.push(JetPower {
                        var: a.var,
                        mult: a.mult + b.mult,
                    });
                    i += 1;
                    j += 1;
                }
            }
        }
        jets.extend_from_slice(&self.jets[i..]);
        jets.extend_from_slice(&other.jets[j..]);
        DiffMonomial {
            jets,
            eps: self.eps + other.eps,
            mu: self.mu + other.mu,
        }
    }

    /// Removes one factor of `v`; `None` if absent. Returns the former multiplicity.
    pub fn remove_one(&self, v: JetVar) -> Option<(Self, u32)> {
        let idx = self.jets.binary_search_by(|p| p.var.cmp(&v)).ok()?;
        let mut jets = self.jets.clone();
        let m = jets[idx].mult;
        if m == 1 {
            jets.remove(idx);
        } else {
            jets[idx].mult -= 1;
        }
        Some((
            DiffMonomial {
                jets,
                eps: self.eps,
                mu: self.mu,
            },
            m,
        ))
    }

    /// Multiplies by one extra factor of `v`.
    pub fn insert_one(&self, v: JetVar) -> Self {
        let mut jets = self.jets.clone();
        match jets.binary_search_by(|p| p.var.cmp(&v)) {
            Ok(i) => jets[i].mult += 1,
            Err(i) => jets.insert(i, JetPower { var: v, mult: 1 }),
        }
        DiffMonomial {
            jets,
            eps: self.eps,
            mu: self.mu,
        }
    }

    pub fn with_exponents(&self, eps: i32, mu: u32) -> Self {
        DiffMonomial {
            jets: self.jets.clone(),
            eps,
            mu,
        }
    }

    /// Same jets, ε and μ stripped.
    pub fn jets_only(&self) -> Self {
        self.with_exponents(0, 0)
    }
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.eps {
            0 => {}
            1 => parts.push("ε".into()),
            e => parts.push(format!("ε^{e}")),
        }
        match self.mu {
            0 => {}
            1 => parts.push("μ".into()),
            m => parts.push(format!("μ^{m}")),
        }
        for p in &self.jets {
            if p.mult == 1 {
                parts.push(p.var.to_string());
            } else {
                parts.push(format!("{}^{}", p.var, p.mult));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}
