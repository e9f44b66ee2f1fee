//! Exact multi-site spin-½ states over ℚ(√2).
//!
//! A state stores one basis tag per site (`z` or `x`) and a sparse map from
//! per-site outcomes to amplitudes. States are kept unnormalised; probabilities
//! are normalised when they are extracted.
//!
//! Kets: `↑`/`↓` are `z:+`/`z:-`, `→`/`←` are `x:+`/`x:-`, with
//! `|↑⟩ = (|→⟩ + |←⟩)/√2` and `|↓⟩ = (|→⟩ - |←⟩)/√2` (and the same matrix
//! for the inverse map).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::qsqrt2::{QSqrt2, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinError {
    #[error("site {site} out of range for a {n_sites}-site state")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site {site} is held in the {actual} basis, measurement asked for {requested}")]
    AxisMismatch {
        site: usize,
        actual: SpinAxis,
        requested: SpinAxis,
    },
    #[error("projection onto an outcome of probability zero")]
    ZeroProjection,
    #[error("the zero state has no outcome probabilities")]
    ZeroState,
    #[error("site {0} listed twice")]
    DuplicateSite(usize),
    #[error("basis key has {actual} sites, state has {expected}")]
    KeyLength { expected: usize, actual: usize },
    #[error("states live on different bases")]
    BasisMismatch,
    #[error("probability has a non-vanishing sqrt(2) component")]
    IrrationalProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinAxis {
    Z,
    X,
}

impl SpinAxis {
    pub fn other(self) -> SpinAxis {
        match self {
            SpinAxis::Z => SpinAxis::X,
            SpinAxis::X => SpinAxis::Z,
        }
    }
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinAxis::Z => "z",
            SpinAxis::X => "x",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub fn symbol(self, axis: SpinAxis) -> char {
        match (axis, self) {
            (SpinAxis::Z, Spin::Plus) => '↑',
            (SpinAxis::Z, Spin::Minus) => '↓',
            (SpinAxis::X, Spin::Plus) => '→',
            (SpinAxis::X, Spin::Minus) => '←',
        }
    }
}

pub type Outcome = Vec<Spin>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinState {
    axes: Vec<SpinAxis>,
    amplitudes: BTreeMap<Outcome, QSqrt2>,
}

impl SpinState {
    /// The zero vector on the given bases.
    pub fn zero(axes: Vec<SpinAxis>) -> SpinState {
        SpinState {
            axes,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Sums repeated keys and drops zero amplitudes.
    pub fn from_terms<I>(axes: Vec<SpinAxis>, terms: I) -> Result<SpinState, SpinError>
    where
        I: IntoIterator<Item = (Outcome, QSqrt2)>,
    {
        let mut state = SpinState::zero(axes);
        for (key, amp) in terms {
            if key.len() != state.axes.len() {
                return Err(SpinError::KeyLength {
                    expected: state.axes.len(),
                    actual: key.len(),
                });
            }
            state.accumulate(key, amp);
        }
        Ok(state)
    }

    /// Single-site basis ket.
    pub fn ket(axis: SpinAxis, spin: Spin) -> SpinState {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(vec![spin], QSqrt2::one());
        SpinState {
            axes: vec![axis],
            amplitudes,
        }
    }

    pub fn up() -> SpinState {
        SpinState::ket(SpinAxis::Z, Spin::Plus)
    }

    pub fn down() -> SpinState {
        SpinState::ket(SpinAxis::Z, Spin::Minus)
    }

    pub fn right() -> SpinState {
        SpinState::ket(SpinAxis::X, Spin::Plus)
    }

    pub fn left() -> SpinState {
        SpinState::ket(SpinAxis::X, Spin::Minus)
    }

    /// Product of single-site kets, e.g. `product(Z, &[Plus, Minus])` is `↑↓`.
    pub fn product(axis: SpinAxis, spins: &[Spin]) -> SpinState {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(spins.to_vec(), QSqrt2::one());
        SpinState {
            axes: vec![axis; spins.len()],
            amplitudes,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[SpinAxis] {
        &self.axes
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude of `key` (zero when absent).
    pub fn amplitude(&self, key: &[Spin]) -> QSqrt2 {
        self.amplitudes.get(key).copied().unwrap_or_else(QSqrt2::zero)
    }

    /// Nonzero terms in ascending key order (`+` before `-` at each site).
    pub fn terms(&self) -> impl Iterator<Item = (&Outcome, &QSqrt2)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn accumulate(&mut self, key: Outcome, amp: QSqrt2) {
        if amp.is_zero() {
            return;
        }
        let entry = self.amplitudes.entry(key.clone()).or_insert_with(QSqrt2::zero);
        *entry += amp;
        if entry.is_zero() {
            self.amplitudes.remove(&key);
        }
    }

    pub fn add(&self, other: &SpinState) -> Result<SpinState, SpinError> {
        if self.axes != other.axes {
            return Err(SpinError::BasisMismatch);
        }
        let mut sum = self.clone();
        for (key, &amp) in &other.amplitudes {
            sum.accumulate(key.clone(), amp);
        }
        Ok(sum)
    }

    pub fn sub(&self, other: &SpinState) -> Result<SpinState, SpinError> {
        self.add(&other.scale(-QSqrt2::one()))
    }

    pub fn scale(&self, factor: QSqrt2) -> SpinState {
        let mut out = SpinState::zero(self.axes.clone());
        for (key, &amp) in &self.amplitudes {
            out.accumulate(key.clone(), amp * factor);
        }
        out
    }

    /// `self ⊗ other`: sites and bases concatenate, amplitudes multiply.
    pub fn tensor(&self, other: &SpinState) -> SpinState {
        let mut axes = self.axes.clone();
        axes.extend_from_slice(&other.axes);
        let mut out = SpinState::zero(axes);
        for (k1, &a1) in &self.amplitudes {
            for (k2, &a2) in &other.amplitudes {
                let mut key = k1.clone();
                key.extend_from_slice(k2);
                out.accumulate(key, a1 * a2);
            }
        }
        out
    }

    fn check_site(&self, site: usize) -> Result<(), SpinError> {
        if site < self.n_sites() {
            Ok(())
        } else {
            Err(SpinError::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            })
        }
    }

    /// Re-expresses `site` in the `to` basis; the identity if it is already
    /// held there.
    pub fn change_basis(&self, site: usize, to: SpinAxis) -> Result<SpinState, SpinError> {
        self.check_site(site)?;
        if self.axes[site] == to {
            return Ok(self.clone());
        }
        let h = QSqrt2::frac_1_sqrt_2();
        let mut axes = self.axes.clone();
        axes[site] = to;
        let mut out = SpinState::zero(axes);
        for (key, &amp) in &self.amplitudes {
            let scaled = amp * h;
            let mut plus = key.clone();
            plus[site] = Spin::Plus;
            let mut minus = key.clone();
            minus[site] = Spin::Minus;
            out.accumulate(plus, scaled);
            out.accumulate(
                minus,
                match key[site] {
                    Spin::Plus => scaled,
                    Spin::Minus => -scaled,
                },
            );
        }
        Ok(out)
    }

    /// Every site re-expressed in the `to` basis.
    pub fn in_basis(&self, to: SpinAxis) -> SpinState {
        (0..self.n_sites()).fold(self.clone(), |s, site| {
            s.change_basis(site, to).expect("site index is in range")
        })
    }

    /// Keeps the terms whose `site` agrees with `spin`, measured along
    /// `axis`. The result is not renormalised.
    pub fn project(&self, site: usize, axis: SpinAxis, spin: Spin) -> Result<SpinState, SpinError> {
        self.check_site(site)?;
        if self.axes[site] != axis {
            return Err(SpinError::AxisMismatch {
                site,
                actual: self.axes[site],
                requested: axis,
            });
        }
        let amplitudes: BTreeMap<_, _> = self
            .amplitudes
            .iter()
            .filter(|(key, _)| key[site] == spin)
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        if amplitudes.is_empty() {
            return Err(SpinError::ZeroProjection);
        }
        Ok(SpinState {
            axes: self.axes.clone(),
            amplitudes,
        })
    }

    /// `Σ |amplitude|²` as an exact field element.
    pub fn norm_squared(&self) -> QSqrt2 {
        self.amplitudes
            .values()
            .fold(QSqrt2::zero(), |acc, a| acc + a.square())
    }

    /// Born probabilities of the joint outcomes at `sites`, marginalised over
    /// the rest and normalised. Every one of the `2^m` outcomes is listed,
    /// zeros included.
    pub fn outcome_probabilities(&self, sites: &[usize]) -> Result<BTreeMap<Outcome, Rational>, SpinError> {
        for (i, &site) in sites.iter().enumerate() {
            self.check_site(site)?;
            if sites[..i].contains(&site) {
                return Err(SpinError::DuplicateSite(site));
            }
        }
        if self.is_zero() {
            return Err(SpinError::ZeroState);
        }
        let total = self.norm_squared();

        let mut weights: BTreeMap<Outcome, QSqrt2> = all_outcomes(sites.len())
            .into_iter()
            .map(|o| (o, QSqrt2::zero()))
            .collect();
        for (key, amp) in &self.amplitudes {
            let outcome: Outcome = sites.iter().map(|&s| key[s]).collect();
            *weights.get_mut(&outcome).expect("all outcomes enumerated") += amp.square();
        }
        weights
            .into_iter()
            .map(|(o, w)| {
                (w / total)
                    .as_rational()
                    .map(|p| (o, p))
                    .ok_or(SpinError::IrrationalProbability)
            })
            .collect()
    }
}

/// All `2^m` outcomes in ascending order.
pub fn all_outcomes(m: usize) -> Vec<Outcome> {
    (0..1usize << m)
        .map(|bits| {
            (0..m)
                .map(|i| {
                    if bits >> (m - 1 - i) & 1 == 0 {
                        Spin::Plus
                    } else {
                        Spin::Minus
                    }
                })
                .collect()
        })
        .collect()
}

/// Terms as `c |labels⟩` joined by `+`, e.g. `1 |→→⟩ + -1 |←←⟩`.
impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (key, amp)) in self.amplitudes.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({amp}) |")?;
            for (spin, &axis) in key.iter().zip(&self.axes) {
                write!(f, "{}", spin.symbol(axis))?;
            }
            f.write_str("⟩")?;
        }
        Ok(())
    }
}

/// `↑↓ + ↓↑`.
pub fn xz_state() -> SpinState {
    use Spin::*;
    SpinState::product(SpinAxis::Z, &[Plus, Minus])
        .add(&SpinState::product(SpinAxis::Z, &[Minus, Plus]))
        .expect("same bases")
}

/// `↑↓↓ + ↓↑↑`: the two-site correlated state with a third site tied to it.
pub fn xze_state() -> SpinState {
    use Spin::*;
    SpinState::product(SpinAxis::Z, &[Plus, Minus, Minus])
        .add(&SpinState::product(SpinAxis::Z, &[Minus, Plus, Plus]))
        .expect("same bases")
}

/// `→→ ⊗ s - ←← ⊗ t` for single-site states `s`, `t`.
pub fn correlated_form(s: &SpinState, t: &SpinState) -> Result<SpinState, SpinError> {
    use Spin::*;
    let rr = SpinState::product(SpinAxis::X, &[Plus, Plus]);
    let ll = SpinState::product(SpinAxis::X, &[Minus, Minus]);
    rr.tensor(s).sub(&ll.tensor(t))
}

/// Searches `s = α→ + β←`, `t = γ→ + δ←` with every coefficient drawn from
/// `grid` for a correlated form equal to `target`.
pub fn search_correlated_form(target: &SpinState, grid: &[QSqrt2]) -> Option<(SpinState, SpinState)> {
    let single = |plus: QSqrt2, minus: QSqrt2| {
        SpinState::from_terms(
            vec![SpinAxis::X],
            [(vec![Spin::Plus], plus), (vec![Spin::Minus], minus)],
        )
        .expect("single-site keys")
    };
    for &alpha in grid {
        for &beta in grid {
            let s = single(alpha, beta);
            for &gamma in grid {
                for &delta in grid {
                    let t = single(gamma, delta);
                    if let Ok(candidate) = correlated_form(&s, &t) {
                        if &candidate == target {
                            return Some((s, t));
                        }
                    }
                }
            }
        }
    }
    None
}
