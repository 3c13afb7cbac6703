use super::{TreeDecomposition, Width};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

impl NiceKind {
    pub fn name(self) -> &'static str {
        match self {
            NiceKind::Leaf => "leaf",
            NiceKind::Introduce(_) => "introduce",
            NiceKind::Forget(_) => "forget",
            NiceKind::Join => "join",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nice tree decomposition with nodes stored in post-order: every child has
/// a smaller index than its parent and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    num_vertices: usize,
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> Width {
        Width::from_max_bag(self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0))
    }

    pub fn max_bag_size(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    /// Index of the unique Forget node of each vertex.
    pub fn forget_nodes(&self) -> Vec<usize> {
        let mut at = vec![usize::MAX; self.num_vertices];
        for (i, node) in self.nodes.iter().enumerate() {
            if let NiceKind::Forget(v) = node.kind {
                assert_eq!(at[v], usize::MAX, "vertex {v} forgotten twice");
                at[v] = i;
            }
        }
        at
    }

    /// Checks the structural rules of nice decompositions; returns a
    /// description of the first broken one.
    pub fn check_structure(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("node {i}: bag not sorted"));
            }
            for &c in &node.children {
                if c >= i {
                    return Err(format!("node {i}: child {c} breaks post-order"));
                }
                parents[c] += 1;
            }
            let child_bag = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce(v) => {
                    node.children.len() == 1
                        && child_bag(0).binary_search(&v).is_err()
                        && node.bag.len() == child_bag(0).len() + 1
                        && node.bag.iter().all(|&x| x == v || child_bag(0).binary_search(&x).is_ok())
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1
                        && node.bag.binary_search(&v).is_err()
                        && child_bag(0).len() == node.bag.len() + 1
                        && child_bag(0).iter().all(|&x| x == v || node.bag.binary_search(&x).is_ok())
                }
                NiceKind::Join => {
                    node.children.len() == 2 && *child_bag(0) == node.bag && *child_bag(1) == node.bag
                }
            };
            if !ok {
                return Err(format!("node {i}: malformed {} node", node.kind.name()));
            }
        }
        let root = self.root();
        if !self.nodes[root].bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        if let Some(i) = (0..root).find(|&i| parents[i] != 1) {
            return Err(format!("node {i} has {} parents", parents[i]));
        }
        Ok(())
    }

    /// Forgets the node types.
    pub fn to_td(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges: Vec<(usize, usize)> =
            self.nodes.iter().enumerate().flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i))).collect();
        TreeDecomposition::new(self.num_vertices, bags, &edges, self.root()).expect("nice decomposition is a tree")
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Extends the chain above `top` until its bag equals `target`,
    /// forgetting before introducing.
    fn morph(&mut self, mut top: usize, target: &[usize]) -> usize {
        let current = self.nodes[top].bag.clone();
        let mut bag = current.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            top = self.push(NiceKind::Forget(v), bag.clone(), vec![top]);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            top = self.push(NiceKind::Introduce(v), bag.clone(), vec![top]);
        }
        top
    }
}

/// Normalizes a decomposition into nice form: empty leaves, single-vertex
/// introduce/forget steps, binary joins over identical bags, and an empty
/// root reached by forgetting the original root bag. Widths are preserved
/// and every original bag reappears.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let mut b = Builder { nodes: Vec::new() };
    let mut order = Vec::with_capacity(td.num_nodes());
    let mut stack = vec![(td.root(), false)];
    while let Some((x, expanded)) = stack.pop() {
        if expanded {
            order.push(x);
        } else {
            stack.push((x, true));
            for &c in td.children(x).iter().rev() {
                stack.push((c, false));
            }
        }
    }

    let mut top = vec![usize::MAX; td.num_nodes()];
    for x in order {
        let bag = td.bag(x);
        let mut tops: Vec<usize> = td.children(x).iter().map(|&c| b.morph(top[c], bag)).collect();
        if tops.is_empty() {
            let leaf = b.push(NiceKind::Leaf, vec![], vec![]);
            tops.push(b.morph(leaf, bag));
        }
        let mut acc = tops[0];
        for &next in &tops[1..] {
            acc = b.push(NiceKind::Join, bag.to_vec(), vec![acc, next]);
        }
        top[x] = acc;
    }
    b.morph(top[td.root()], &[]);
    NiceTreeDecomposition { num_vertices: td.num_vertices(), nodes: b.nodes }
}
