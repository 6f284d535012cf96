use std::collections::BTreeMap;

/// Union-find over string keys with path halving and union by size.
#[derive(Debug, Default, Clone)]
pub struct DisjointSets {
    index: BTreeMap<String, usize>,
    keys: Vec<String>,
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: &str) -> usize {
        if let Some(&i) = self.index.get(key) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(key.to_string(), i);
        self.keys.push(key.to_string());
        self.parent.push(i);
        self.size.push(1);
        i
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    fn root(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn find(&mut self, key: &str) -> Option<usize> {
        let i = *self.index.get(key)?;
        Some(self.root(i))
    }

    pub fn union(&mut self, a: &str, b: &str) {
        let a = self.add(a);
        let b = self.add(b);
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }

    pub fn same(&mut self, a: &str, b: &str) -> bool {
        match (self.find(a), self.find(b)) {
            (Some(x), Some(y)) => x == y,
            _ => a == b,
        }
    }

    /// Components as sorted key lists, ordered by their smallest key.
    pub fn components(&mut self) -> Vec<Vec<String>> {
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for i in 0..self.keys.len() {
            let r = self.root(i);
            groups.entry(r).or_default().push(self.keys[i].clone());
        }
        let mut out: Vec<Vec<String>> = groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }
}
