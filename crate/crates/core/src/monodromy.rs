//! Cyclic words in L and R and the layered (monodromy) ideal triangulation
//! of the associated once-punctured torus bundle.
//!
//! Tetrahedron `t_i` sits on top of `t_{i-1}`. Its faces 0 and 2 are glued
//! to the layer below and faces 1 and 3 to the layer above. Crossing from
//! `t_i` to `t_{i+1}` with letter
//!
//! ```text
//! L:  t_i(012) = t_{i+1}(312)   t_i(023) = t_{i+1}(013)
//! R:  t_i(012) = t_{i+1}(013)   t_i(023) = t_{i+1}(123)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::perm::Perm4;
use crate::triangulation::{FaceGluing, Triangulation, TriangulationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    L,
    R,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::L => Letter::R,
            Letter::R => Letter::L,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::L => 'L',
            Letter::R => 'R',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("empty word")]
    EmptyWord,
    #[error("unexpected character {0:?} in word")]
    BadCharacter(char),
    #[error("bad exponent in word: {0}")]
    BadExponent(String),
    #[error("word uses only one letter; the monodromy must contain both L and R")]
    SingleLetterWord,
}

/// A cyclic word in L and R containing both letters.
///
/// The letters are kept in the rotation the user wrote; equality and
/// hashing are up to cyclic rotation.
#[derive(Clone, Debug, Eq)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_rotation() == other.canonical_rotation()
    }
}

impl std::hash::Hash for CyclicWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical_rotation().hash(state);
    }
}

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::EmptyWord);
        }
        if !letters.contains(&Letter::L) || !letters.contains(&Letter::R) {
            return Err(WordError::SingleLetterWord);
        }
        Ok(Self { letters })
    }

    /// `L^a R^b` in the given order.
    pub fn from_exponents(parts: &[(Letter, usize)]) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for &(l, e) in parts {
            letters.extend(std::iter::repeat_n(l, e));
        }
        Self::new(letters)
    }

    /// Letters in the user's rotation.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// |φ|, the number of letters (and of tetrahedra).
    pub fn size(&self) -> usize {
        self.letters.len()
    }

    /// Lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Vec<Letter> {
        let n = self.letters.len();
        (0..n)
            .map(|k| {
                self.letters[k..]
                    .iter()
                    .chain(&self.letters[..k])
                    .copied()
                    .collect::<Vec<_>>()
            })
            .min()
            .expect("nonempty")
    }

    /// Exponent normal form: maximal runs, rotated so the first run is an
    /// L-run that follows an R.
    pub fn exponent_form(&self) -> Vec<(Letter, usize)> {
        let n = self.letters.len();
        let start = (0..n)
            .find(|&i| self.letters[i] == Letter::L && self.letters[(i + n - 1) % n] == Letter::R)
            .expect("both letters occur");
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for k in 0..n {
            let l = self.letters[(start + k) % n];
            match runs.last_mut() {
                Some((last, e)) if *last == l => *e += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs
    }

    /// Rotates so that the letter at `offset` comes first.
    pub fn rotated(&self, offset: usize) -> CyclicWord {
        let n = self.letters.len();
        let letters = (0..n).map(|k| self.letters[(offset + k) % n]).collect();
        CyclicWord { letters }
    }

    /// The same word with every letter swapped.
    pub fn swapped(&self) -> CyclicWord {
        CyclicWord {
            letters: self.letters.iter().map(|l| l.other()).collect(),
        }
    }

    /// The word written in caret-exponent form in the user's rotation.
    pub fn to_exponent_string(&self) -> String {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for &l in &self.letters {
            match runs.last_mut() {
                Some((last, e)) if *last == l => *e += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs.iter()
            .map(|(l, e)| {
                if *e == 1 {
                    l.as_char().to_string()
                } else {
                    format!("{}^{}", l.as_char(), e)
                }
            })
            .collect()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for CyclicWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

/// Parses `LLLLRRRRRR`, `L^4R^6`, or a mix such as `L^2RL`.
pub fn parse_word(s: &str) -> Result<CyclicWord, WordError> {
    let mut letters = Vec::new();
    let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(c) = chars.next() {
        let letter = match c {
            'L' => Letter::L,
            'R' => Letter::R,
            other => return Err(WordError::BadCharacter(other)),
        };
        let mut exponent = 1usize;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            exponent = digits
                .parse()
                .map_err(|_| WordError::BadExponent(format!("{c}^{digits}")))?;
            if exponent == 0 {
                return Err(WordError::BadExponent(format!("{c}^0")));
            }
        }
        letters.extend(std::iter::repeat_n(letter, exponent));
    }
    CyclicWord::new(letters)
}

fn layer_gluings(letter: Letter) -> [(usize, usize, Perm4); 2] {
    // (face of t_i, face of t_{i+1}, vertex map)
    let p = |images| Perm4::new(images).expect("valid permutation");
    match letter {
        Letter::L => [(3, 0, p([3, 1, 2, 0])), (1, 2, p([0, 2, 1, 3]))],
        Letter::R => [(3, 2, p([0, 1, 3, 2])), (1, 0, p([1, 0, 2, 3]))],
    }
}

/// Default display names: A, B, ..., Z, then T26, T27, ...
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'A' + i as u8) as char).to_string()
            } else {
                format!("T{i}")
            }
        })
        .collect()
}

/// Layered triangulation of the bundle with monodromy `word`.
pub fn build(word: &CyclicWord) -> Result<Triangulation, TriangulationError> {
    let n = word.size();
    let mut gluings = Vec::with_capacity(2 * n);
    for (i, &letter) in word.letters().iter().enumerate() {
        let next = (i + 1) % n;
        for (f_lo, f_hi, perm) in layer_gluings(letter) {
            gluings.push(FaceGluing::new((i, f_lo), (next, f_hi), perm));
        }
    }
    Ok(Triangulation::new(n, &gluings)?.with_labels(default_labels(n)))
}

/// Fans (maximal runs of non-toggle tetrahedra) and toggles of a layered
/// triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanDecomposition {
    /// Each fan lists its tetrahedra in layering order, with the letter of
    /// the layers it sits between.
    pub fans: Vec<Fan>,
    pub toggles: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub letter: Letter,
    pub tets: Vec<usize>,
    /// Toggle immediately below the fan.
    pub lower_toggle: usize,
    /// Toggle immediately above the fan.
    pub upper_toggle: usize,
}

impl FanDecomposition {
    pub fn fan_sizes(&self) -> Vec<usize> {
        self.fans.iter().map(|f| f.tets.len()).collect()
    }
}

/// Tetrahedron `t_i` is a toggle when the layer below it (position i-1)
/// and the layer above it (position i) carry different letters.
pub fn fan_decomposition(word: &CyclicWord) -> FanDecomposition {
    let letters = word.letters();
    let n = letters.len();
    let is_toggle = |i: usize| letters[(i + n - 1) % n] != letters[i];
    let toggles: Vec<usize> = (0..n).filter(|&i| is_toggle(i)).collect();
    let mut fans = Vec::new();
    for &t in &toggles {
        // the fan above toggle t: letters[t] repeated until the next toggle
        let mut tets = Vec::new();
        let mut i = (t + 1) % n;
        while !is_toggle(i) {
            tets.push(i);
            i = (i + 1) % n;
        }
        if !tets.is_empty() {
            fans.push(Fan {
                letter: letters[t],
                tets,
                lower_toggle: t,
                upper_toggle: i,
            });
        }
    }
    FanDecomposition { fans, toggles }
}

/// Renders the gluing table in the layout of a four-column face table:
/// for each tetrahedron and each face 012, 013, 023, 123, the label of the
/// neighbour and the images of the face's vertices, e.g. `B(312)`.
pub fn gluing_table(tri: &Triangulation) -> Vec<[String; 4]> {
    const FACES: [(usize, [usize; 3]); 4] = [(3, [0, 1, 2]), (2, [0, 1, 3]), (1, [0, 2, 3]), (0, [1, 2, 3])];
    (0..tri.size())
        .map(|t| {
            FACES.map(|(face, verts)| {
                let g = tri.adjacent(t, face);
                let images: String = verts
                    .iter()
                    .map(|&v| char::from_digit(g.perm.apply(v) as u32, 10).expect("digit"))
                    .collect();
                format!("{}({})", tri.label(g.tet), images)
            })
        })
        .collect()
}
