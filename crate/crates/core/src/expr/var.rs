use std::fmt;

/// Highest jet order representable by a [`VarId`] multi-index.
pub const MAX_JET_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// The dependent coordinate `u`.
    U,
    /// An independent coordinate `x^i`.
    X,
    /// A jet coordinate `u_{i_1..i_k}`, `k ≥ 1`.
    Deriv,
    /// The radical `w = √det(g)`.
    W,
}

/// A jet coordinate. The derived ordering is the canonical variable order
/// `u, x^1..x^n, u_1..u_n, u_11, u_12, .., u_nn, (higher orders), w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    kind: VarKind,
    order: u8,
    idx: [u8; MAX_JET_ORDER],
}

impl VarId {
    pub const fn u() -> Self {
        VarId { kind: VarKind::U, order: 0, idx: [0; MAX_JET_ORDER] }
    }

    pub const fn w() -> Self {
        VarId { kind: VarKind::W, order: 0, idx: [0; MAX_JET_ORDER] }
    }

    /// `x^i`, 1-based.
    pub fn x(i: usize) -> Self {
        assert!((1..=255).contains(&i), "index out of range");
        let mut idx = [0; MAX_JET_ORDER];
        idx[0] = i as u8;
        VarId { kind: VarKind::X, order: 0, idx }
    }

    /// `u_i`, 1-based.
    pub fn du(i: usize) -> Self {
        Self::jet(&[i])
    }

    /// `u_ij`; the pair is stored sorted, so `d2u(2, 1) == d2u(1, 2)`.
    pub fn d2u(i: usize, j: usize) -> Self {
        Self::jet(&[i, j])
    }

    /// General jet coordinate `u_{i_1..i_k}` with 1-based, unsorted indices.
    pub fn jet(indices: &[usize]) -> Self {
        assert!(
            !indices.is_empty() && indices.len() <= MAX_JET_ORDER,
            "jet order must be in 1..={MAX_JET_ORDER}"
        );
        let mut sorted: Vec<usize> = indices.to_vec();
        sorted.sort_unstable();
        let mut idx = [0; MAX_JET_ORDER];
        for (slot, &i) in idx.iter_mut().zip(&sorted) {
            assert!((1..=255).contains(&i), "index out of range");
            *slot = i as u8;
        }
        VarId { kind: VarKind::Deriv, order: indices.len() as u8, idx }
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    /// Jet order: 0 for `u` and `x^i`, `k` for `u_{i_1..i_k}`, 1 for `w`
    /// (which depends on the first derivatives).
    pub fn jet_order(&self) -> usize {
        match self.kind {
            VarKind::U | VarKind::X => 0,
            VarKind::Deriv => self.order as usize,
            VarKind::W => 1,
        }
    }

    /// 1-based indices (empty for `u` and `w`).
    pub fn indices(&self) -> Vec<usize> {
        let len = match self.kind {
            VarKind::U | VarKind::W => 0,
            VarKind::X => 1,
            VarKind::Deriv => self.order as usize,
        };
        self.idx[..len].iter().map(|&i| i as usize).collect()
    }

    pub fn max_index(&self) -> usize {
        self.indices().into_iter().max().unwrap_or(0)
    }

    /// The derivative coordinate obtained by appending direction `i`
    /// (`u ↦ u_i`, `u_J ↦ u_{Ji}`). `None` for `x` and `w`.
    pub fn prolong(&self, i: usize) -> Option<Self> {
        match self.kind {
            VarKind::U => Some(Self::du(i)),
            VarKind::Deriv => {
                let mut ix = self.indices();
                ix.push(i);
                (ix.len() <= MAX_JET_ORDER).then(|| Self::jet(&ix))
            }
            VarKind::X | VarKind::W => None,
        }
    }

    /// Name used in the JSON schema: `u`, `x`, `du`, `d2u`, `d3u`, .., `w`.
    pub fn kind_name(&self) -> String {
        match self.kind {
            VarKind::U => "u".into(),
            VarKind::X => "x".into(),
            VarKind::W => "w".into(),
            VarKind::Deriv if self.order == 1 => "du".into(),
            VarKind::Deriv => format!("d{}u", self.order),
        }
    }

    pub fn from_kind_name(kind: &str, indices: &[usize]) -> Option<Self> {
        let bad_index = indices.iter().any(|&i| i == 0 || i > 255);
        if bad_index {
            return None;
        }
        match (kind, indices.len()) {
            ("u", 0) => Some(Self::u()),
            ("w", 0) => Some(Self::w()),
            ("x", 1) => Some(Self::x(indices[0])),
            ("du", 1) => Some(Self::du(indices[0])),
            (k, len) => {
                let order: usize = k.strip_prefix('d')?.strip_suffix('u')?.parse().ok()?;
                (order >= 2 && order == len && order <= MAX_JET_ORDER).then(|| Self::jet(indices))
            }
        }
    }

    /// Indices run together (`12`), or comma-separated once any exceeds 9.
    fn index_string(&self) -> String {
        let ix = self.indices();
        let parts: Vec<String> = ix.iter().map(usize::to_string).collect();
        if ix.iter().any(|&i| i > 9) {
            parts.join(",")
        } else {
            parts.concat()
        }
    }

    /// LaTeX name: `u`, `x^{i}`, `u_{ij}`, `\sqrt{\det g}`.
    pub fn latex(&self) -> String {
        match self.kind {
            VarKind::U => "u".into(),
            VarKind::X => format!("x^{{{}}}", self.index_string()),
            VarKind::Deriv => format!("u_{{{}}}", self.index_string()),
            VarKind::W => "\\sqrt{\\det g}".into(),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::U => write!(f, "u"),
            VarKind::X => write!(f, "x{}", self.index_string()),
            VarKind::Deriv => write!(f, "u_{}", self.index_string()),
            VarKind::W => write!(f, "w"),
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
