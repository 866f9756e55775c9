//! The inflation family ρ_m : 0 ↦ 01^m, 1 ↦ 0, its constant-length partner
//! ρ̃_ℓ : a ↦ ab^ℓ, b ↦ a^{ℓ+1}, and the local recodings between them.
//!
//! Bi-infinite fixed points are stored as a finite window with an
//! `origin` index marking the seed cut: letters `[..origin]` lie left of the
//! reference point, letters `[origin..]` right of it.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::zlambda::{AlgebraicPoint, QuadraticRing};

/// Member ρ_m of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    m: u64,
}

impl Rule {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    fn image(&self, letter: u8) -> impl Iterator<Item = u8> {
        let ones = if letter == 0 { self.m as usize } else { 0 };
        std::iter::once(0u8).chain(std::iter::repeat_n(1u8, ones))
    }

    fn image_len(&self, letter: u8) -> usize {
        if letter == 0 {
            1 + self.m as usize
        } else {
            1
        }
    }
}

/// 2×2 non-negative integer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubstMatrix(pub [[u64; 2]; 2]);

impl SubstMatrix {
    pub fn mul(&self, rhs: &SubstMatrix) -> SubstMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0u64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SubstMatrix(out)
    }

    pub fn pow(&self, n: u32) -> SubstMatrix {
        let mut acc = SubstMatrix([[1, 0], [0, 1]]);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Action on a column vector of letter counts.
    pub fn apply(&self, counts: [u64; 2]) -> [u64; 2] {
        let a = &self.0;
        [
            a[0][0] * counts[0] + a[0][1] * counts[1],
            a[1][0] * counts[0] + a[1][1] * counts[1],
        ]
    }

    pub fn is_primitive(&self) -> bool {
        (1..=4).any(|n| self.pow(n).0.iter().flatten().all(|&x| x > 0))
    }

    pub fn as_f64(&self) -> [[f64; 2]; 2] {
        let a = &self.0;
        [
            [a[0][0] as f64, a[0][1] as f64],
            [a[1][0] as f64, a[1][1] as f64],
        ]
    }
}

/// M_m = [[1,1],[m,0]]; column j counts the letters in the image of j.
pub fn subst_matrix(m: u64) -> Result<SubstMatrix> {
    Rule::new(m)?;
    Ok(SubstMatrix([[1, 1], [m, 0]]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Frequency-normalised right PF eigenvector (ν₀, ν₁).
    pub freq: [f64; 2],
    /// Left PF eigenvector (λ, 1), the tile lengths.
    pub lengths: [f64; 2],
}

impl EigenData {
    pub fn log_lambda(&self) -> f64 {
        self.lambda_plus.ln()
    }

    /// Points per unit length of the left-endpoint set.
    pub fn density(&self) -> f64 {
        let l = self.lambda_plus;
        l / (2.0 * l - 1.0)
    }
}

pub fn eigen_data(m: u64) -> Result<EigenData> {
    Rule::new(m)?;
    let disc = ((4 * m + 1) as f64).sqrt();
    let lambda_plus = 0.5 * (1.0 + disc);
    let lambda_minus = 0.5 * (1.0 - disc);
    Ok(EigenData {
        lambda_plus,
        lambda_minus,
        freq: [1.0 / lambda_plus, (lambda_plus - 1.0) / lambda_plus],
        lengths: [lambda_plus, 1.0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralClass {
    Fibonacci,
    /// m = ℓ(ℓ+1), λ = ℓ+1.
    IntegerMultiplier(u64),
    NonPV,
}

impl SpectralClass {
    pub fn is_pure_point(&self) -> bool {
        !matches!(self, SpectralClass::NonPV)
    }
}

impl fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralClass::Fibonacci => write!(f, "Fibonacci"),
            SpectralClass::IntegerMultiplier(l) => write!(f, "IntegerMultiplier ℓ={l}"),
            SpectralClass::NonPV => write!(f, "NonPV"),
        }
    }
}

pub fn classify(m: u64) -> Result<SpectralClass> {
    Rule::new(m)?;
    if m == 1 {
        return Ok(SpectralClass::Fibonacci);
    }
    // ℓ(ℓ+1) = m  ⇔  ℓ = (√(4m+1) − 1)/2 integral
    let l = ((((4 * m + 1) as f64).sqrt() - 1.0) / 2.0).round() as u64;
    if l >= 1 && l * (l + 1) == m {
        Ok(SpectralClass::IntegerMultiplier(l))
    } else {
        Ok(SpectralClass::NonPV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// {0, 1} for ρ_m.
    Binary,
    /// {a, b} for ρ̃_ℓ; stored as 0 = a, 1 = b.
    Tilde,
}

impl Alphabet {
    fn symbols(&self) -> [char; 2] {
        match self {
            Alphabet::Binary => ['0', '1'],
            Alphabet::Tilde => ['a', 'b'],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Alphabet::Binary => "{0,1}",
            Alphabet::Tilde => "{a,b}",
        }
    }
}

/// Finite window of a (possibly bi-infinite) word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u8>,
    origin: usize,
    alphabet: Alphabet,
}

impl Word {
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        let [s0, s1] = alphabet.symbols();
        let mut letters = Vec::with_capacity(text.len());
        let mut origin = None;
        for (position, c) in text.chars().enumerate() {
            match c {
                '|' if origin.is_none() => origin = Some(letters.len()),
                c if c == s0 => letters.push(0),
                c if c == s1 => letters.push(1),
                letter => return Err(Error::InvalidLetter { letter, position }),
            }
        }
        Ok(Self {
            letters,
            origin: origin.unwrap_or(0),
            alphabet,
        })
    }

    /// Parses a binary word; a `|` marks the origin (default: start).
    pub fn binary(text: &str) -> Result<Self> {
        Self::parse(text, Alphabet::Binary)
    }

    pub fn tilde(text: &str) -> Result<Self> {
        Self::parse(text, Alphabet::Tilde)
    }

    pub fn from_letters(letters: Vec<u8>, origin: usize, alphabet: Alphabet) -> Result<Self> {
        if let Some(position) = letters.iter().position(|&l| l > 1) {
            return Err(Error::InvalidLetter {
                letter: char::from(b'0' + letters[position].min(9)),
                position,
            });
        }
        if origin > letters.len() {
            return Err(invalid("origin outside the word"));
        }
        Ok(Self {
            letters,
            origin,
            alphabet,
        })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn left(&self) -> &[u8] {
        &self.letters[..self.origin]
    }

    pub fn right(&self) -> &[u8] {
        &self.letters[self.origin..]
    }

    pub fn counts(&self) -> [u64; 2] {
        let ones = self.letters.iter().filter(|&&l| l == 1).count() as u64;
        [self.letters.len() as u64 - ones, ones]
    }

    /// Letters without the origin marker.
    pub fn to_plain_string(&self) -> String {
        let [s0, s1] = self.alphabet.symbols();
        self.letters
            .iter()
            .map(|&l| if l == 0 { s0 } else { s1 })
            .collect()
    }

    /// Sub-window with at most `left` letters before and `right` after the origin.
    pub fn central(&self, left: usize, right: usize) -> Word {
        let l = left.min(self.origin);
        let r = right.min(self.len() - self.origin);
        Word {
            letters: self.letters[self.origin - l..self.origin + r].to_vec(),
            origin: l,
            alphabet: self.alphabet,
        }
    }

    fn require(&self, alphabet: Alphabet) -> Result<()> {
        if self.alphabet != alphabet {
            return Err(Error::WrongAlphabet {
                expected: alphabet.name(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_plain_string();
        write!(f, "{}|{}", &s[..self.origin], &s[self.origin..])
    }
}

fn apply_once(
    word: &Word,
    image_len: impl Fn(u8) -> usize,
    push_image: impl Fn(u8, &mut Vec<u8>),
) -> Word {
    let total: usize = word.letters.iter().map(|&l| image_len(l)).sum();
    let origin = word.left().iter().map(|&l| image_len(l)).sum();
    let mut letters = Vec::with_capacity(total);
    for &l in &word.letters {
        push_image(l, &mut letters);
    }
    Word {
        letters,
        origin,
        alphabet: word.alphabet,
    }
}

/// Letterwise image of `word` under ρ_m, iterated `times`.
pub fn substitute(word: &Word, m: u64, times: usize) -> Result<Word> {
    let rule = Rule::new(m)?;
    word.require(Alphabet::Binary)?;
    let mut w = word.clone();
    for _ in 0..times {
        w = apply_once(
            &w,
            |l| rule.image_len(l),
            |l, out| out.extend(rule.image(l)),
        );
    }
    Ok(w)
}

/// Letterwise image under ρ̃_ℓ : a ↦ ab^ℓ, b ↦ a^{ℓ+1}, iterated `times`.
pub fn tilde_rule_substitute(word: &Word, l: u64, times: usize) -> Result<Word> {
    if l == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    word.require(Alphabet::Tilde)?;
    let l = l as usize;
    let mut w = word.clone();
    for _ in 0..times {
        w = apply_once(
            &w,
            |_| l + 1,
            |letter, out| {
                if letter == 0 {
                    out.push(0);
                    out.extend(std::iter::repeat_n(1u8, l));
                } else {
                    out.extend(std::iter::repeat_n(0u8, l + 1));
                }
            },
        );
    }
    Ok(w)
}

/// Window of the bi-infinite fixed point of a squared rule with seed s|s,
/// given the one-letter seed word `seed` and the squared substitution `square`.
///
/// Both halves come from the same iterate σ^{2j}(s): it begins and ends with
/// s, so the right half is its prefix and the left half its suffix.
fn two_sided_fixed_point(
    n_letters: usize,
    seed: Word,
    square: impl Fn(&Word) -> Result<Word>,
) -> Result<Word> {
    if n_letters < 2 {
        return Err(invalid("fixed-point window needs at least 2 letters"));
    }
    let n_left = n_letters / 2;
    let n_right = n_letters - n_left;
    let mut w = seed;
    while w.len() < n_left.max(n_right) {
        w = square(&w)?;
    }
    let letters = &w.letters;
    let mut out = Vec::with_capacity(n_letters);
    out.extend_from_slice(&letters[letters.len() - n_left..]);
    out.extend_from_slice(&letters[..n_right]);
    Ok(Word {
        letters: out,
        origin: n_left,
        alphabet: w.alphabet,
    })
}

/// Central `n_letters` of the ρ_m²-fixed point with seed 0|0.
pub fn fixed_point(m: u64, n_letters: usize) -> Result<Word> {
    Rule::new(m)?;
    two_sided_fixed_point(n_letters, Word::binary("0")?, |w| substitute(w, m, 2))
}

/// Central `n_letters` of the ρ̃_ℓ²-fixed point with seed a|a.
pub fn tilde_fixed_point(l: u64, n_letters: usize) -> Result<Word> {
    two_sided_fixed_point(n_letters, Word::tilde("a")?, |w| {
        tilde_rule_substitute(w, l, 2)
    })
}

/// Empirical relative letter frequencies.
pub fn letter_frequencies(word: &Word) -> Result<(f64, f64)> {
    if word.is_empty() {
        return Err(invalid("empty word has no frequencies"));
    }
    let [c0, c1] = word.counts();
    let n = word.len() as f64;
    Ok((c0 as f64 / n, c1 as f64 / n))
}

/// One tile of a geometric patch: type 0 has length λ, type 1 length 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub kind: u8,
    pub left: AlgebraicPoint,
}

/// Tiles with exact left endpoints; the tile starting at the origin cut sits at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    ring: QuadraticRing,
    tiles: Vec<Tile>,
    radius: f64,
}

impl Patch {
    pub fn ring(&self) -> &QuadraticRing {
        &self.ring
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Radius of the window the patch covers (∞ when unrestricted).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn position(&self, tile: &Tile) -> f64 {
        self.ring.embed(tile.left)
    }

    /// Tiles whose left endpoint lies in [−r, r].
    pub fn window(&self, r: f64) -> Patch {
        let tiles = self
            .tiles
            .iter()
            .filter(|t| self.ring.embed(t.left).abs() <= r)
            .copied()
            .collect();
        Patch {
            ring: self.ring,
            tiles,
            radius: r,
        }
    }

    /// Fixed-point patch with all left endpoints of [−r, r].
    pub fn around_origin(m: u64, r: f64) -> Result<Patch> {
        if !(r > 0.0) {
            return Err(invalid("patch radius must be positive"));
        }
        // every tile is at least 1 long
        let per_side = r.ceil() as usize + 2;
        let word = fixed_point(m, 2 * per_side)?;
        Ok(geometric_patch(&word, m)?.window(r))
    }
}

/// Left endpoints as partial sums of tile lengths, origin-cut tile at 0.
pub fn geometric_patch(word: &Word, m: u64) -> Result<Patch> {
    word.require(Alphabet::Binary)?;
    let ring = QuadraticRing::new(m)?;
    let len = |l: u8| {
        if l == 0 {
            ring.point(0, 1)
        } else {
            ring.point(1, 0)
        }
    };
    let mut tiles = Vec::with_capacity(word.len());
    let mut pos = AlgebraicPoint::ZERO;
    for &l in word.left().iter().rev() {
        pos = pos - len(l);
        tiles.push(Tile { kind: l, left: pos });
    }
    tiles.reverse();
    pos = AlgebraicPoint::ZERO;
    for &l in word.right() {
        tiles.push(Tile { kind: l, left: pos });
        pos = pos + len(l);
    }
    Ok(Patch {
        ring,
        tiles,
        radius: f64::INFINITY,
    })
}

/// a ↦ 0, b ↦ 1^{ℓ+1}.
pub fn recode_to_binary(word: &Word, l: u64) -> Result<Word> {
    if l == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    word.require(Alphabet::Tilde)?;
    let block = l as usize + 1;
    let mut letters = Vec::new();
    let mut origin = 0;
    for (i, &x) in word.letters.iter().enumerate() {
        if i == word.origin {
            origin = letters.len();
        }
        if x == 0 {
            letters.push(0);
        } else {
            letters.extend(std::iter::repeat_n(1u8, block));
        }
    }
    if word.origin == word.len() {
        origin = letters.len();
    }
    Ok(Word {
        letters,
        origin,
        alphabet: Alphabet::Binary,
    })
}

/// Inverse recoding: 0 ↦ a, a maximal block 1^{j(ℓ+1)} ↦ b^j.
///
/// Interior 1-blocks whose length is not a multiple of ℓ+1 make the word
/// illegal. Blocks touching either end of the window are kept when their
/// length is a multiple of ℓ+1 and dropped otherwise, since the recoding
/// is undefined across the window edge.
pub fn recode_from_binary(word: &Word, l: u64) -> Result<Word> {
    if l == 0 {
        return Err(invalid("ℓ must be at least 1"));
    }
    word.require(Alphabet::Binary)?;
    let block = l as usize + 1;
    let w = &word.letters;
    let n = w.len();
    let mut letters = Vec::new();
    let mut origin = None;
    let mut i = 0;
    while i < n {
        if origin.is_none() && i >= word.origin {
            origin = Some(letters.len());
        }
        if w[i] == 0 {
            letters.push(0);
            i += 1;
            continue;
        }
        let start = i;
        while i < n && w[i] == 1 {
            i += 1;
        }
        let run = i - start;
        let at_edge = start == 0 || i == n;
        if origin.is_none() && word.origin > start && word.origin < i {
            origin = Some(letters.len() + (word.origin - start) / block);
        }
        if run % block == 0 {
            letters.extend(std::iter::repeat_n(1u8, run / block));
        } else if !at_edge {
            return Err(Error::IllegalWord(format!(
                "1-block of length {run} at position {start} is not a multiple of {block}"
            )));
        }
    }
    Ok(Word {
        origin: origin.unwrap_or(letters.len()),
        letters,
        alphabet: Alphabet::Tilde,
    })
}

/// Legality test against the factor set of a large fixed-point window.
pub struct LegalityChecker {
    window: Vec<u8>,
}

impl LegalityChecker {
    pub const DEFAULT_RADIUS: usize = 100_000;

    pub fn new(m: u64) -> Result<Self> {
        Self::with_radius(m, Self::DEFAULT_RADIUS)
    }

    pub fn with_radius(m: u64, radius: usize) -> Result<Self> {
        let word = fixed_point(m, 2 * radius.max(1))?;
        Ok(Self {
            window: word.letters,
        })
    }

    pub fn is_legal(&self, word: &Word) -> bool {
        if word.alphabet != Alphabet::Binary {
            return false;
        }
        let needle = word.letters();
        needle.is_empty() || self.window.windows(needle.len()).any(|f| f == needle)
    }
}
