use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Address of a vertex in any of the graph families.
///
/// Which variants are valid depends on the [`GraphSpec`](super::GraphSpec);
/// see [`GraphSpec::check_vertex`](super::GraphSpec::check_vertex).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexId {
    /// Tree vertex addressed by its child-index word; level = word length.
    TreeNode(Vec<u32>),
    /// Point of the private lattice copy that replaced the edge ending at the
    /// tree vertex `owner` (whose level is some l_n).
    LatticePoint { owner: Vec<u32>, coords: Vec<i64> },
    /// Point of a plain lattice; also used for the ray of `TreePlusRay`.
    Plain(Vec<i64>),
    /// Subdivision vertex of a stretched edge: slot 1 is next to the upper
    /// endpoint, slot 2 next to `owner`.
    Stretch { owner: Vec<u32>, slot: u8 },
    /// (base, z) in a product with Z.
    ProductVertex { base: Box<VertexId>, z: i64 },
}

const TAG_TREE: u8 = 1;
const TAG_LATTICE: u8 = 2;
const TAG_PLAIN: u8 = 3;
const TAG_STRETCH: u8 = 4;
const TAG_PRODUCT: u8 = 5;

impl VertexId {
    pub fn root() -> VertexId {
        VertexId::TreeNode(Vec::new())
    }

    pub fn product(base: VertexId, z: i64) -> VertexId {
        VertexId::ProductVertex {
            base: Box::new(base),
            z,
        }
    }

    /// Strips a product layer, returning (base, z); z = 0 for non-product ids.
    pub fn split_product(&self) -> (&VertexId, i64) {
        match self {
            VertexId::ProductVertex { base, z } => (base, *z),
            other => (other, 0),
        }
    }

    pub fn is_tree_node(&self) -> bool {
        matches!(self.split_product().0, VertexId::TreeNode(_))
    }

    pub fn is_lattice_point(&self) -> bool {
        matches!(self.split_product().0, VertexId::LatticePoint { .. })
    }

    /// Canonical byte encoding: one tag byte per variant, LEB128 varints for
    /// lengths and child indices, zig-zag varints for signed coordinates.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16);
        self.encode_into(&mut out);
        out
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            VertexId::TreeNode(word) => {
                out.push(TAG_TREE);
                put_word(out, word);
            }
            VertexId::LatticePoint { owner, coords } => {
                out.push(TAG_LATTICE);
                put_word(out, owner);
                put_coords(out, coords);
            }
            VertexId::Plain(coords) => {
                out.push(TAG_PLAIN);
                put_coords(out, coords);
            }
            VertexId::Stretch { owner, slot } => {
                out.push(TAG_STRETCH);
                put_word(out, owner);
                out.push(*slot);
            }
            VertexId::ProductVertex { base, z } => {
                out.push(TAG_PRODUCT);
                base.encode_into(out);
                put_varint(out, zigzag(*z));
            }
        }
    }

    /// Decodes without reference to a spec; rejects trailing or truncated input.
    pub fn decode_raw(bytes: &[u8]) -> Result<VertexId, GraphError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let v = cur.vertex(0)?;
        if cur.pos != bytes.len() {
            return Err(GraphError::MalformedEncoding("trailing bytes".into()));
        }
        Ok(v)
    }
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(u: u64) -> i64 {
    ((u >> 1) as i64) ^ -((u & 1) as i64)
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_word(out: &mut Vec<u8>, word: &[u32]) {
    put_varint(out, word.len() as u64);
    for &c in word {
        put_varint(out, c as u64);
    }
}

fn put_coords(out: &mut Vec<u8>, coords: &[i64]) {
    put_varint(out, coords.len() as u64);
    for &c in coords {
        put_varint(out, zigzag(c));
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn byte(&mut self) -> Result<u8, GraphError> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| GraphError::MalformedEncoding("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn varint(&mut self) -> Result<u64, GraphError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            let part = (b & 0x7f) as u64;
            if shift == 63 && part > 1 {
                return Err(GraphError::MalformedEncoding("varint overflow".into()));
            }
            v |= part << shift;
            if b & 0x80 == 0 {
                // Reject non-minimal encodings so that bytes stay canonical.
                if b == 0 && shift > 0 {
                    return Err(GraphError::MalformedEncoding("non-minimal varint".into()));
                }
                return Ok(v);
            }
        }
        Err(GraphError::MalformedEncoding("varint too long".into()))
    }

    fn len(&mut self) -> Result<usize, GraphError> {
        let n = self.varint()?;
        if n as usize > self.bytes.len() - self.pos {
            return Err(GraphError::MalformedEncoding("length exceeds input".into()));
        }
        Ok(n as usize)
    }

    fn word(&mut self) -> Result<Vec<u32>, GraphError> {
        let n = self.len()?;
        (0..n)
            .map(|_| {
                let c = self.varint()?;
                u32::try_from(c).map_err(|_| GraphError::MalformedEncoding("child index overflow".into()))
            })
            .collect()
    }

    fn coords(&mut self) -> Result<Vec<i64>, GraphError> {
        let n = self.len()?;
        (0..n).map(|_| Ok(unzigzag(self.varint()?))).collect()
    }

    fn vertex(&mut self, depth: usize) -> Result<VertexId, GraphError> {
        match self.byte()? {
            TAG_TREE => Ok(VertexId::TreeNode(self.word()?)),
            TAG_LATTICE => {
                let owner = self.word()?;
                let coords = self.coords()?;
                Ok(VertexId::LatticePoint { owner, coords })
            }
            TAG_PLAIN => Ok(VertexId::Plain(self.coords()?)),
            TAG_STRETCH => {
                let owner = self.word()?;
                let slot = self.byte()?;
                Ok(VertexId::Stretch { owner, slot })
            }
            TAG_PRODUCT if depth == 0 => {
                let base = self.vertex(depth + 1)?;
                let z = unzigzag(self.varint()?);
                Ok(VertexId::product(base, z))
            }
            TAG_PRODUCT => Err(GraphError::MalformedEncoding("nested product".into())),
            t => Err(GraphError::MalformedEncoding(format!("unknown tag {t}"))),
        }
    }
}

/// Compact text form, e.g. `t[3,1,4]`, `p(0,-2)`, `l[0,1](1,1)`, `s[2]#1`,
/// and `p(0)@5` for product vertices.
impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            VertexId::TreeNode(w) => write!(f, "t[{}]", list(w)),
            VertexId::LatticePoint { owner, coords } => {
                write!(f, "l[{}]({})", list(owner), list(coords))
            }
            VertexId::Plain(c) => write!(f, "p({})", list(c)),
            VertexId::Stretch { owner, slot } => write!(f, "s[{}]#{slot}", list(owner)),
            VertexId::ProductVertex { base, z } => write!(f, "{base}@{z}"),
        }
    }
}

impl FromStr for VertexId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || GraphError::InvalidVertex(format!("cannot parse vertex `{s}`"));
        if let Some((base, z)) = s.rsplit_once('@') {
            let z = z.parse().map_err(|_| err())?;
            return Ok(VertexId::product(base.parse()?, z));
        }
        fn nums<T: FromStr>(inner: &str) -> Option<Vec<T>> {
            if inner.is_empty() {
                return Some(Vec::new());
            }
            inner.split(',').map(|x| x.trim().parse().ok()).collect()
        }
        fn bracketed(s: &str, open: char, close: char) -> Option<(&str, &str)> {
            let s = s.strip_prefix(open)?;
            let end = s.find(close)?;
            Some((&s[..end], &s[end + 1..]))
        }
        let (tag, rest) = s.split_at(s.chars().next().map(|c| c.len_utf8()).ok_or_else(err)?);
        match tag {
            "t" => {
                let (w, tail) = bracketed(rest, '[', ']').ok_or_else(err)?;
                if !tail.is_empty() {
                    return Err(err());
                }
                Ok(VertexId::TreeNode(nums(w).ok_or_else(err)?))
            }
            "p" => {
                let (c, tail) = bracketed(rest, '(', ')').ok_or_else(err)?;
                if !tail.is_empty() {
                    return Err(err());
                }
                Ok(VertexId::Plain(nums(c).ok_or_else(err)?))
            }
            "l" => {
                let (w, tail) = bracketed(rest, '[', ']').ok_or_else(err)?;
                let (c, tail) = bracketed(tail, '(', ')').ok_or_else(err)?;
                if !tail.is_empty() {
                    return Err(err());
                }
                Ok(VertexId::LatticePoint {
                    owner: nums(w).ok_or_else(err)?,
                    coords: nums(c).ok_or_else(err)?,
                })
            }
            "s" => {
                let (w, tail) = bracketed(rest, '[', ']').ok_or_else(err)?;
                let slot = tail.strip_prefix('#').ok_or_else(err)?.parse().map_err(|_| err())?;
                Ok(VertexId::Stretch {
                    owner: nums(w).ok_or_else(err)?,
                    slot,
                })
            }
            _ => Err(err()),
        }
    }
}
