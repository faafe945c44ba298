//! Disjoint-set forest with union by rank and path compression.

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Returns true if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] = self.rank[ra].saturating_add(1);
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Points every element directly at its root and returns the parents.
    pub fn into_flat(mut self) -> (Vec<u32>, Vec<u8>) {
        for i in 0..self.parent.len() {
            let r = self.find(i);
            self.parent[i] = r as u32;
        }
        (self.parent, self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_merging() {
        let mut uf = UnionFind::new(6);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 4));
        let (parent, _) = uf.into_flat();
        assert_eq!(parent[0], parent[3]);
        assert_eq!(parent[4], 4);
    }

    #[test]
    fn rank_stays_logarithmic() {
        let n = 1 << 12;
        let mut uf = UnionFind::new(n);
        let mut step = 1;
        while step < n {
            for i in (0..n).step_by(2 * step) {
                uf.union(i, i + step);
            }
            step *= 2;
        }
        let (_, rank) = uf.into_flat();
        assert!(rank.iter().all(|&r| r <= 12));
    }
}
