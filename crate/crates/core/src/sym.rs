//! Named commuting symbols used in polynomial coefficients: coordinates on
//! the frame bundle, simplex parameters, jet symbols in their three kinds
//! (slot-tagged gamma, eta at the identity, free symmetric alpha) and the
//! formal unit `l`.

use std::fmt;

/// Index data of a jet symbol: upper index `i`, symmetric pair `(j, k)` and a
/// sorted list of derivative directions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetIdx {
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub ell: Vec<u8>,
}

impl JetIdx {
    /// Canonicalizes by the `(j,k)` swap symmetry and sorting of the
    /// derivative directions.
    pub fn new(i: u8, j: u8, k: u8, ell: &[u8]) -> Self {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        let mut ell = ell.to_vec();
        ell.sort_unstable();
        JetIdx { i, j, k, ell }
    }

    pub fn order(&self) -> usize {
        2 + self.ell.len()
    }

    /// Appends one derivative direction.
    pub fn extend(&self, l: u8) -> Self {
        let mut ell = self.ell.clone();
        ell.push(l);
        ell.sort_unstable();
        JetIdx { i: self.i, j: self.j, k: self.k, ell }
    }

    /// All lower indices as a sorted multiset.
    pub fn lower_multiset(&self) -> Vec<u8> {
        let mut v = vec![self.j, self.k];
        v.extend_from_slice(&self.ell);
        v.sort_unstable();
        v
    }
}

/// Free symmetric jet coordinate `a^i_M`, `M` a sorted multiset of
/// at least two lower indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AlphaIdx {
    pub i: u8,
    pub lower: Vec<u8>,
}

impl AlphaIdx {
    pub fn new(i: u8, lower: &[u8]) -> Self {
        assert!(lower.len() >= 2, "alpha symbols start at second order");
        let mut lower = lower.to_vec();
        lower.sort_unstable();
        AlphaIdx { i, lower }
    }

    pub fn order(&self) -> usize {
        self.lower.len()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sym {
    /// Base coordinate `x^k`.
    X(u8),
    /// Frame coordinate `y^i_j`.
    Y(u8, u8),
    /// Simplex coordinate `t_r`, `r >= 1` (`t_0` is always eliminated).
    T(u16),
    /// Transgression parameter.
    S,
    /// Polarization marker, truncated at square zero.
    U,
    /// Gamma jet symbol tagged with the group slot it refers to.
    Gamma(u8, JetIdx),
    /// Jet coordinate at the identity frame.
    Eta(JetIdx),
    /// Free symmetric jet coordinate.
    Alpha(AlphaIdx),
}

fn digits(v: &[u8]) -> String {
    v.iter().map(|d| d.to_string()).collect()
}

impl Sym {
    /// Stable textual name used in serialized polynomials.
    pub fn name(&self) -> String {
        match self {
            Sym::X(k) => format!("x{k}"),
            Sym::Y(i, j) => format!("y{i}{j}"),
            Sym::T(r) => format!("t{r}"),
            Sym::S => "s".into(),
            Sym::U => "u".into(),
            Sym::Gamma(slot, g) => {
                format!("g{slot}:{}:{}{}:{}", g.i, g.j, g.k, digits(&g.ell))
            }
            Sym::Eta(g) => format!("e:{}:{}{}:{}", g.i, g.j, g.k, digits(&g.ell)),
            Sym::Alpha(a) => format!("a:{}:{}", a.i, digits(&a.lower)),
        }
    }

    pub fn parse(s: &str) -> Option<Sym> {
        let parse_digits = |s: &str| -> Option<Vec<u8>> {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        if let Some(rest) = s.strip_prefix("a:") {
            let (i, lower) = rest.split_once(':')?;
            return Some(Sym::Alpha(AlphaIdx::new(i.parse().ok()?, &parse_digits(lower)?)));
        }
        if let Some(rest) = s.strip_prefix("e:") {
            let mut it = rest.split(':');
            let i: u8 = it.next()?.parse().ok()?;
            let jk = parse_digits(it.next()?)?;
            let ell = parse_digits(it.next().unwrap_or(""))?;
            return Some(Sym::Eta(JetIdx::new(i, jk[0], jk[1], &ell)));
        }
        if let Some(rest) = s.strip_prefix('g') {
            if let Some((slot, tail)) = rest.split_once(':') {
                let slot: u8 = slot.parse().ok()?;
                let mut it = tail.split(':');
                let i: u8 = it.next()?.parse().ok()?;
                let jk = parse_digits(it.next()?)?;
                let ell = parse_digits(it.next().unwrap_or(""))?;
                return Some(Sym::Gamma(slot, JetIdx::new(i, jk[0], jk[1], &ell)));
            }
        }
        match s {
            "s" => return Some(Sym::S),
            "u" => return Some(Sym::U),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('x') {
            return Some(Sym::X(rest.parse().ok()?));
        }
        if let Some(rest) = s.strip_prefix('y') {
            let d = parse_digits(rest)?;
            if d.len() == 2 {
                return Some(Sym::Y(d[0], d[1]));
            }
            return None;
        }
        if let Some(rest) = s.strip_prefix('t') {
            return Some(Sym::T(rest.parse().ok()?));
        }
        None
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_idx_canonicalization() {
        let a = JetIdx::new(1, 2, 1, &[3, 1]);
        assert_eq!((a.j, a.k), (1, 2));
        assert_eq!(a.ell, vec![1, 3]);
        assert_eq!(a, JetIdx::new(1, 1, 2, &[1, 3]));
    }

    #[test]
    fn sym_name_round_trip() {
        let syms = vec![
            Sym::X(2),
            Sym::Y(1, 2),
            Sym::T(11),
            Sym::S,
            Sym::U,
            Sym::Gamma(3, JetIdx::new(1, 2, 2, &[1])),
            Sym::Eta(JetIdx::new(2, 1, 1, &[])),
            Sym::Alpha(AlphaIdx::new(1, &[1, 2, 2])),
        ];
        for s in syms {
            assert_eq!(Sym::parse(&s.name()), Some(s.clone()), "round trip of {}", s.name());
        }
    }
}
