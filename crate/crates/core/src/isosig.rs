//! Isomorphism signatures in Burton's base-64 format.
//!
//! A signature lists, for a breadth-first relabelling of the tetrahedra,
//! what happens at each face in turn: glued to a brand new tetrahedron
//! (which is then labelled so that the gluing is the identity), or glued
//! to a tetrahedron already seen, in which case the destination index and
//! the gluing permutation are recorded.
//!
//! Layout: tetrahedron count, face actions packed three to a character
//! (two bits each, low bits first), destination indices for the "seen"
//! gluings, then their permutation indices in [`crate::perm::S4`] order.

use thiserror::Error;

use crate::perm::{Perm4, S4};
use crate::triangulation::{Gluing, Triangulation, TriangulationError};

/// Largest triangulation [`encode`] will write.
pub const MAX_ENCODE_TETS: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoSigError {
    #[error("malformed isomorphism signature: {0}")]
    MalformedSignature(String),
    #[error("triangulation has {0} tetrahedra; encoding supports at most {MAX_ENCODE_TETS}")]
    TooLarge(usize),
}

fn malformed(msg: impl Into<String>) -> IsoSigError {
    IsoSigError::MalformedSignature(msg.into())
}

fn char_of(value: usize) -> char {
    debug_assert!(value < 64);
    match value {
        0..=25 => (b'a' + value as u8) as char,
        26..=51 => (b'A' + (value - 26) as u8) as char,
        52..=61 => (b'0' + (value - 52) as u8) as char,
        62 => '+',
        _ => '-',
    }
}

fn value_of(c: char) -> Option<usize> {
    match c {
        'a'..='z' => Some(c as usize - 'a' as usize),
        'A'..='Z' => Some(c as usize - 'A' as usize + 26),
        '0'..='9' => Some(c as usize - '0' as usize + 52),
        '+' => Some(62),
        '-' => Some(63),
        _ => None,
    }
}

fn push_number(out: &mut String, mut value: usize, chars: usize) {
    for _ in 0..chars {
        out.push(char_of(value & 63));
        value >>= 6;
    }
}

/// The raw content of a signature for one choice of starting tetrahedron
/// and starting vertex labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SigData {
    pub(crate) count: usize,
    pub(crate) actions: Vec<u8>,
    pub(crate) dests: Vec<usize>,
    pub(crate) perms: Vec<usize>,
}

impl SigData {
    /// Relabels `tri` breadth-first starting from tetrahedron `start`,
    /// whose vertex `v` becomes `start_map(v)`.
    pub(crate) fn from_start(tri: &Triangulation, start: usize, start_map: Perm4) -> Self {
        let n = tri.size();
        let mut image: Vec<Option<usize>> = vec![None; n];
        let mut preimage = Vec::with_capacity(n);
        let mut maps = vec![Perm4::IDENTITY; n];
        image[start] = Some(0);
        preimage.push(start);
        maps[start] = start_map;
        let mut data = SigData {
            count: n,
            actions: Vec::with_capacity(2 * n),
            dests: Vec::new(),
            perms: Vec::new(),
        };
        let mut next = 1;
        let mut cur = 0;
        while cur < preimage.len() {
            let old = preimage[cur];
            for face in 0..4 {
                let old_face = maps[old].inverse().apply(face);
                let Gluing { tet: dst, perm } = tri.adjacent(old, old_face);
                match image[dst] {
                    Some(dst_new) => {
                        let dst_face = maps[dst].apply(perm.apply(old_face));
                        if dst_new < cur || (dst_new == cur && dst_face < face) {
                            continue;
                        }
                        let glue = maps[dst].compose(perm).compose(maps[old].inverse());
                        data.actions.push(2);
                        data.dests.push(dst_new);
                        data.perms.push(glue.s4_index());
                    }
                    None => {
                        image[dst] = Some(next);
                        preimage.push(dst);
                        next += 1;
                        // choose the new labelling so this gluing is the identity
                        maps[dst] = maps[old].compose(perm.inverse());
                        data.actions.push(1);
                    }
                }
            }
            cur += 1;
        }
        data
    }

    pub(crate) fn to_sig_string(&self) -> String {
        let mut out = String::new();
        let width = if self.count < 63 {
            push_number(&mut out, self.count, 1);
            1
        } else {
            let mut width = 0;
            let mut tmp = self.count;
            while tmp > 0 {
                tmp >>= 6;
                width += 1;
            }
            out.push(char_of(63));
            out.push(char_of(width));
            push_number(&mut out, self.count, width);
            width
        };
        for chunk in self.actions.chunks(3) {
            let mut v = 0usize;
            for (k, &a) in chunk.iter().enumerate() {
                v |= (a as usize) << (2 * k);
            }
            out.push(char_of(v));
        }
        for &d in &self.dests {
            push_number(&mut out, d, width);
        }
        for &p in &self.perms {
            out.push(char_of(p));
        }
        out
    }
}

/// Writes a signature for `tri`. The output is the lexicographically least
/// over all starting choices, so relabellings of one triangulation encode
/// identically, although the string need not match other encoders.
pub fn encode(tri: &Triangulation) -> Result<String, IsoSigError> {
    if tri.size() > MAX_ENCODE_TETS {
        return Err(IsoSigError::TooLarge(tri.size()));
    }
    Ok(crate::signature::canonical_signature(tri))
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl Reader<'_> {
    fn value(&mut self) -> Result<usize, IsoSigError> {
        let c = self
            .chars
            .next()
            .ok_or_else(|| malformed("signature ends early"))?;
        value_of(c).ok_or_else(|| malformed(format!("character {c:?} is not in the alphabet")))
    }

    fn number(&mut self, width: usize) -> Result<usize, IsoSigError> {
        let mut v = 0;
        for k in 0..width {
            v |= self.value()? << (6 * k);
        }
        Ok(v)
    }
}

/// Parses a signature into an (oriented) triangulation.
pub fn decode(sig: &str) -> Result<Triangulation, IsoSigError> {
    if sig.is_empty() {
        return Err(malformed("empty signature"));
    }
    let mut r = Reader {
        chars: sig.chars().peekable(),
    };
    let first = r.value()?;
    let (count, width) = if first < 63 {
        (first, 1)
    } else {
        let width = r.value()?;
        if width == 0 {
            return Err(malformed("zero-width tetrahedron count"));
        }
        (r.number(width)?, width)
    };
    if count == 0 {
        return Err(malformed("signature describes an empty triangulation"));
    }

    let total = 4 * count;
    let mut actions = Vec::new();
    let mut covered = 0;
    while covered < total {
        let mut v = r.value()?;
        for _ in 0..3 {
            if covered == total {
                if v != 0 {
                    return Err(malformed("padding bits are not zero"));
                }
                break;
            }
            let a = (v & 3) as u8;
            v >>= 2;
            match a {
                0 => return Err(malformed("boundary faces are not supported")),
                3 => return Err(malformed("invalid face action 3")),
                _ => covered += 2,
            }
            actions.push(a);
        }
        if covered > total {
            return Err(malformed("face actions overrun the face count"));
        }
    }
    let joins = actions.iter().filter(|&&a| a == 2).count();
    let mut dests = Vec::with_capacity(joins);
    for _ in 0..joins {
        dests.push(r.number(width)?);
    }
    let mut perms = Vec::with_capacity(joins);
    for _ in 0..joins {
        let p = r.value()?;
        if p >= 24 {
            return Err(malformed(format!("permutation index {p} out of range")));
        }
        perms.push(S4[p]);
    }
    if r.chars.peek().is_some() {
        return Err(malformed("trailing characters"));
    }

    let mut adj: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; count];
    let mut facet = 0;
    let mut next_unused = 1;
    let mut join = 0;
    for &action in &actions {
        while facet < total && adj[facet / 4][facet % 4].is_some() {
            facet += 1;
        }
        if facet >= total {
            return Err(malformed("more gluings than faces"));
        }
        let (src, face) = (facet / 4, facet % 4);
        let (dst, perm) = if action == 1 {
            if next_unused >= count {
                return Err(malformed("too many new tetrahedra"));
            }
            next_unused += 1;
            (next_unused - 1, Perm4::IDENTITY)
        } else {
            let dst = dests[join];
            let perm = perms[join];
            join += 1;
            if dst >= next_unused {
                return Err(malformed(format!("destination {dst} not yet introduced")));
            }
            (dst, perm)
        };
        let dst_face = perm.apply(face);
        if (dst, dst_face) == (src, face) || adj[dst][dst_face].is_some() {
            return Err(malformed("gluing is not an involution"));
        }
        adj[src][face] = Some(Gluing { tet: dst, perm });
        adj[dst][dst_face] = Some(Gluing {
            tet: src,
            perm: perm.inverse(),
        });
        facet += 1;
    }
    if next_unused != count {
        return Err(malformed("not every tetrahedron was reached"));
    }
    let adj = adj
        .into_iter()
        .map(|row| {
            let mut out = [Gluing {
                tet: 0,
                perm: Perm4::IDENTITY,
            }; 4];
            for (f, g) in row.into_iter().enumerate() {
                out[f] = g.ok_or_else(|| malformed("unglued face"))?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, IsoSigError>>()?;
    Triangulation::from_adjacency(adj, None).map_err(|e| match e {
        TriangulationError::NonOrientable => malformed("triangulation is not orientable"),
        other => malformed(other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_round_trip() {
        for v in 0..64 {
            assert_eq!(value_of(char_of(v)), Some(v));
        }
        assert_eq!(value_of('*'), None);
    }

    #[test]
    fn decodes_standard_figure_eight() {
        // two-tetrahedron figure-eight knot complement
        let tri = decode("cPcbbbiht").unwrap();
        assert_eq!(tri.size(), 2);
        let mut degrees: Vec<_> = tri.edges().iter().map(|e| e.degree()).collect();
        degrees.sort();
        assert_eq!(degrees, vec![6, 6]);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "c", "cPcbbbih", "cPcbbbihtx", "cPcbbbih*", "a"] {
            assert!(
                matches!(decode(bad), Err(IsoSigError::MalformedSignature(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn multi_character_counts_round_trip() {
        let data = SigData {
            count: 70,
            actions: vec![],
            dests: vec![],
            perms: vec![],
        };
        let s = data.to_sig_string();
        let mut r = Reader {
            chars: s.chars().peekable(),
        };
        assert_eq!(r.value().unwrap(), 63);
        let w = r.value().unwrap();
        assert_eq!(r.number(w).unwrap(), 70);
    }
}
