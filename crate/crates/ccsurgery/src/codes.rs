//! Seed codes, CSS codes and the lifted-product / hypergraph-product /
//! clustered-cyclic constructions.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::gf2::BitMatrix;
use crate::ring::{EntryKind, RingElem, RingMatrix};

/// A CSS code given by check matrices over `R`, with cached binary lifts.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub hx: RingMatrix,
    pub hz: RingMatrix,
    pub bhx: BitMatrix,
    pub bhz: BitMatrix,
    pub n: usize,
    pub k: usize,
}

impl CssCode {
    pub fn new(hx: RingMatrix, hz: RingMatrix) -> Result<Self> {
        if hx.l() != hz.l() {
            return Err(Error::MixedLift(hx.l(), hz.l()));
        }
        if hx.cols() != hz.cols() {
            return Err(Error::Shape(format!("H_X has {} columns, H_Z has {}", hx.cols(), hz.cols())));
        }
        let bhx = hx.binary_lift();
        let bhz = hz.binary_lift();
        let comm = bhx.mul(&bhz.transpose())?;
        ensure!(comm.is_zero(), "CSS condition H_X H_Z^T = 0 violated");
        let n = bhx.cols();
        let k = n - bhx.rank() - bhz.rank();
        Ok(Self { hx, hz, bhx, bhz, n, k })
    }

    pub fn l(&self) -> usize {
        self.hx.l()
    }

    pub fn params(&self) -> CssParams {
        CssParams {
            n: self.n,
            k: self.k,
            w_max: self.bhx.max_row_weight().max(self.bhz.max_row_weight()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CssParams {
    pub n: usize,
    pub k: usize,
    pub w_max: usize,
}

pub fn css_params(code: &CssCode) -> CssParams {
    code.params()
}

/// `H_X = (H_a (x) I | I (x) H_b)`, `H_Z = (I (x) H_b* | H_a* (x) I)`; qubits are
/// `A_1 (x) B_0` followed by `A_0 (x) B_1`.
pub fn lifted_product(h_a: &RingMatrix, h_b: &RingMatrix) -> Result<CssCode> {
    let (hx, hz) = lp_checks(h_a, h_b)?;
    CssCode::new(hx, hz)
}

/// The ring-level `(H_X, H_Z)` of `LP(h_a, h_b)`.
pub fn lp_checks(h_a: &RingMatrix, h_b: &RingMatrix) -> Result<(RingMatrix, RingMatrix)> {
    if h_a.l() != h_b.l() {
        return Err(Error::MixedLift(h_a.l(), h_b.l()));
    }
    let l = h_a.l();
    let (ma, na) = h_a.shape();
    let (mb, nb) = h_b.shape();
    let hx = h_a.kron(&RingMatrix::identity(l, mb))?.hstack(&RingMatrix::identity(l, ma).kron(h_b)?)?;
    let hz = RingMatrix::identity(l, na)
        .kron(&h_b.conj_transpose())?
        .hstack(&h_a.conj_transpose().kron(&RingMatrix::identity(l, nb))?)?;
    Ok((hx, hz))
}

pub fn hypergraph_product(h_a: &BitMatrix, h_b: &BitMatrix) -> Result<CssCode> {
    lifted_product(&RingMatrix::from_binary(1, h_a), &RingMatrix::from_binary(1, h_b))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SeedValidationReport {
    pub square: bool,
    pub entries_ok: bool,
    pub uniform_row_weight: bool,
    pub uniform_col_weight: bool,
    pub full_rank: bool,
    pub cyclic_placement_warning: Option<String>,
}

impl SeedValidationReport {
    /// Hard checks. A seed with a larger kernel is still accepted when the
    /// product code reaches `k = 2 n_a n_b`, which `cc_code` asserts.
    pub fn passed(&self) -> bool {
        self.square && self.entries_ok && self.uniform_row_weight && self.uniform_col_weight
    }

    pub fn strict(&self) -> bool {
        self.passed() && self.full_rank
    }

    fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (ok, name) in [
            (self.square, "not square"),
            (self.entries_ok, "entries must be zero or binomial"),
            (self.uniform_row_weight, "non-uniform row weight"),
            (self.uniform_col_weight, "non-uniform column weight"),
        ] {
            if !ok {
                v.push(name);
            }
        }
        v
    }
}

pub fn validate_cc_seed(h: &RingMatrix) -> SeedValidationReport {
    let pat = h.pattern();
    let (r, c) = h.shape();
    let square = r == c && r > 0;
    let entries_ok = h.entries().iter().all(|e| matches!(e.classify(), EntryKind::Zero | EntryKind::Binomial));
    let row_w: Vec<usize> = (0..r).map(|i| pat.row_weight(i)).collect();
    let col_w: Vec<usize> = (0..c).map(|j| pat.col(j).weight()).collect();
    let uniform_row_weight = row_w.windows(2).all(|w| w[0] == w[1]) && row_w.first().is_some_and(|&w| w > 0);
    let uniform_col_weight = col_w.windows(2).all(|w| w[0] == w[1]) && col_w.first().is_some_and(|&w| w > 0);
    let full_rank = h.binary_lift().nullity() == r;
    let cyclic_placement_warning = if square && !cyclic_placement(&pat) {
        Some("rows are not cyclic shifts of one nonzero pattern".to_string())
    } else {
        None
    };
    SeedValidationReport { square, entries_ok, uniform_row_weight, uniform_col_weight, full_rank, cyclic_placement_warning }
}

fn cyclic_placement(pat: &BitMatrix) -> bool {
    let n = pat.cols();
    let first = pat.row(0);
    (0..pat.rows()).all(|i| {
        let row = pat.row(i);
        (0..n).any(|s| (0..n).all(|j| row.get((j + s) % n) == first.get(j)))
    })
}

/// Checks `ker B(h) = rowspan B(diag(chi))` and `im B(h) = rowspan B(diag(1+x))`.
pub fn seed_kernel_image_ok(h: &RingMatrix) -> bool {
    let l = h.l();
    let b = h.binary_lift();
    let n = h.cols();
    let mut chi = RingMatrix::zeros(l, n, n);
    let mut one_x = RingMatrix::zeros(l, h.rows(), h.rows());
    for i in 0..n {
        chi.set(i, i, RingElem::chi(l));
    }
    for i in 0..h.rows() {
        one_x.set(i, i, RingElem::one(l) + RingElem::monomial(l, 1));
    }
    b.kernel_basis().same_row_space(&chi.binary_lift()) && b.transpose().same_row_space(&one_x.binary_lift())
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// A clustered-cyclic code `CC(H_a, H_b)`.
#[derive(Clone, Debug)]
pub struct CcCode {
    pub label: Option<String>,
    pub css: CssCode,
    pub h_a: RingMatrix,
    pub h_b: RingMatrix,
    pub p: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub w_a: usize,
    pub w_b: usize,
}

impl CcCode {
    pub fn n(&self) -> usize {
        self.css.n
    }

    pub fn k(&self) -> usize {
        self.css.k
    }

    /// Clusters per sector.
    pub fn sector_size(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn check_weight(&self) -> usize {
        2 * (self.w_a + self.w_b)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

pub fn cc_code(h_a: &RingMatrix, h_b: &RingMatrix) -> Result<CcCode> {
    let p = h_a.l();
    if !is_prime(p) {
        return Err(Error::Input(format!("lift parameter {p} is not prime")));
    }
    for (name, h) in [("H_a", h_a), ("H_b", h_b)] {
        let rep = validate_cc_seed(h);
        if !rep.passed() {
            return Err(Error::Seed(format!("{name}: {}", rep.failures().join(", "))));
        }
    }
    let css = lifted_product(h_a, h_b)?;
    let (n_a, n_b) = (h_a.rows(), h_b.rows());
    ensure!(css.n == 2 * p * n_a * n_b, "N = {} but 2 p n_a n_b = {}", css.n, 2 * p * n_a * n_b);
    ensure!(css.k == 2 * n_a * n_b, "k = {} but 2 n_a n_b = {}", css.k, 2 * n_a * n_b);
    let w_a = h_a.pattern().row_weight(0);
    let w_b = h_b.pattern().row_weight(0);
    Ok(CcCode { label: None, css, h_a: h_a.clone(), h_b: h_b.clone(), p, n_a, n_b, w_a, w_b })
}

/// A seed document: `label`, `p`, `H_a`, `H_b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedDoc {
    #[serde(default)]
    pub label: String,
    pub p: usize,
    #[serde(rename = "H_a")]
    pub h_a: Vec<Vec<String>>,
    #[serde(rename = "H_b")]
    pub h_b: Vec<Vec<String>>,
}

impl SeedDoc {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Seed(e.to_string()))
    }

    pub fn matrices(&self) -> Result<(RingMatrix, RingMatrix)> {
        Ok((RingMatrix::parse(self.p, &self.h_a)?, RingMatrix::parse(self.p, &self.h_b)?))
    }

    pub fn build(&self) -> Result<CcCode> {
        let (a, b) = self.matrices()?;
        let code = cc_code(&a, &b)?;
        Ok(if self.label.is_empty() { code } else { code.with_label(&self.label) })
    }

    /// Canonical text: polynomials re-printed in ascending-exponent form.
    pub fn canonical(&self) -> Result<String> {
        let (a, b) = self.matrices()?;
        let doc = SeedDoc { label: self.label.clone(), p: self.p, h_a: a.to_strings(), h_b: b.to_strings() };
        toml::to_string(&doc).map_err(|e| Error::Seed(e.to_string()))
    }
}

const SEEDS: &[(&str, &str)] = &[
    ("12_4_3", include_str!("../data/seeds/12_4_3.toml")),
    ("24_8_3", include_str!("../data/seeds/24_8_3.toml")),
    ("40_8_5", include_str!("../data/seeds/40_8_5.toml")),
    ("56_8_7", include_str!("../data/seeds/56_8_7.toml")),
    ("88_8_10", include_str!("../data/seeds/88_8_10.toml")),
    ("104_8_11", include_str!("../data/seeds/104_8_11.toml")),
    ("136_8_14", include_str!("../data/seeds/136_8_14.toml")),
    ("54_18_3", include_str!("../data/seeds/54_18_3.toml")),
    ("90_18_5", include_str!("../data/seeds/90_18_5.toml")),
    ("126_18_7", include_str!("../data/seeds/126_18_7.toml")),
    ("198_18_10", include_str!("../data/seeds/198_18_10.toml")),
];

pub fn seed_labels() -> impl Iterator<Item = &'static str> {
    SEEDS.iter().map(|(l, _)| *l)
}

/// Look up a bundled seed by label (`24_8_3`, `[[24,8,3]]` and `24,8,3` all work).
pub fn seed(label: &str) -> Result<SeedDoc> {
    let key: String = label
        .chars()
        .filter(|c| !matches!(c, '[' | ']' | ' '))
        .map(|c| if c == ',' { '_' } else { c })
        .collect();
    let (_, text) = SEEDS
        .iter()
        .find(|(l, _)| *l == key)
        .ok_or_else(|| Error::Input(format!("unknown seed '{label}'")))?;
    SeedDoc::parse(text)
}

pub fn builtin(label: &str) -> Result<CcCode> {
    seed(label)?.build()
}

/// Seed label, or a path to a seed document.
pub fn load(spec: &str) -> Result<CcCode> {
    match seed(spec) {
        Ok(doc) => doc.build(),
        Err(_) if std::path::Path::new(spec).exists() => SeedDoc::parse(&std::fs::read_to_string(spec)?)?.build(),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_seeds_build() {
        for label in seed_labels() {
            let code = builtin(label).unwrap();
            let parts: Vec<usize> = label.split('_').map(|s| s.parse().unwrap()).collect();
            assert_eq!(code.n(), parts[0], "{label}");
            assert_eq!(code.k(), parts[1], "{label}");
            assert_eq!(code.css.params().w_max, code.check_weight(), "{label}");
            for h in [&code.h_a, &code.h_b] {
                let strict = validate_cc_seed(h).strict();
                assert_eq!(seed_kernel_image_ok(h), strict, "{label}");
                assert_eq!(seed_kernel_image_ok(&h.conj_transpose()), strict, "{label}");
            }
        }
    }

    #[test]
    fn table_seeds_with_wide_kernels() {
        let wide: Vec<&str> = seed_labels()
            .filter(|l| {
                let (a, b) = seed(l).unwrap().matrices().unwrap();
                !validate_cc_seed(&a).full_rank || !validate_cc_seed(&b).full_rank
            })
            .collect();
        assert_eq!(wide, ["54_18_3", "126_18_7"]);
    }

    #[test]
    fn chi_entry_is_rejected() {
        let doc = seed("24_8_3").unwrap();
        let (mut a, _) = doc.matrices().unwrap();
        a.set(0, 0, RingElem::chi(3));
        let rep = validate_cc_seed(&a);
        assert!(!rep.entries_ok);
        assert!(!rep.passed());
    }

    #[test]
    fn trivial_lp_has_no_logicals() {
        let one = RingMatrix::identity(1, 1);
        let code = lifted_product(&one, &one).unwrap();
        assert_eq!((code.n, code.k), (2, 0));
        assert_eq!((code.bhx.rows(), code.bhz.rows()), (1, 1));
    }

    #[test]
    fn non_prime_lift_rejected() {
        let a = RingMatrix::parse(4, &[vec!["1+x"]]).unwrap();
        assert!(cc_code(&a, &a).is_err());
    }

    #[test]
    fn canonical_form_is_stable() {
        let doc = seed("136_8_14").unwrap();
        let text = doc.canonical().unwrap();
        assert_eq!(SeedDoc::parse(&text).unwrap().canonical().unwrap(), text);
    }
}
