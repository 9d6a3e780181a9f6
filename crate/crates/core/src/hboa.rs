//! Hierarchical Bayesian Optimization Algorithm.
//!
//! The model is a Bayesian network whose conditional distributions are
//! binary decision trees, one per gene. Trees are grown greedily from the
//! selected set: a split of leaf `l` of gene `i`'s tree on gene `j` adds
//! the edge `j -> i` to the dependency graph and is scored with the log
//! BDe metric (unit Dirichlet priors) minus a penalty of `0.5 * log2(S)`
//! per added leaf. New strings are generated by ancestral sampling and
//! merged into the population with restricted tournament replacement.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::engine::tournament_select;
use crate::error::{Error, Result};
use crate::genome::{hamming_distance, Genome};
use crate::population::Population;
use crate::problems::Evaluator;

#[derive(Clone, Debug, PartialEq)]
pub struct HboaParams {
    /// Offspring per generation as a fraction of the population size.
    pub offspring_fraction: f64,
    /// RTR window; `None` means `min(n, N/20)`, at least 1.
    pub rtr_window: Option<usize>,
    /// Cap on the number of parents of any gene.
    pub max_incoming: Option<usize>,
}

impl Default for HboaParams {
    fn default() -> Self {
        HboaParams {
            offspring_fraction: 0.5,
            rtr_window: None,
            max_incoming: None,
        }
    }
}

impl HboaParams {
    pub fn validate(&self, population_size: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.offspring_fraction) {
            return Err(Error::config(format!(
                "hboaOffspringFraction must lie in [0, 1], got {}",
                self.offspring_fraction
            )));
        }
        if let Some(w) = self.rtr_window {
            if w == 0 || w > population_size {
                return Err(Error::config(format!(
                    "hboaRtrWindow must lie in 1..={population_size}, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn window(&self, genome_len: usize, population_size: usize) -> usize {
        self.rtr_window
            .unwrap_or_else(|| genome_len.min(population_size / 20))
            .clamp(1, population_size)
    }

    pub fn offspring_count(&self, population_size: usize) -> usize {
        ((self.offspring_fraction * population_size as f64) - 1e-9).ceil().max(0.0) as usize
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            (
                "hboaOffspringFraction".into(),
                self.offspring_fraction.to_string(),
            ),
            (
                "hboaRtrWindow".into(),
                self.rtr_window
                    .map_or("min(n,N/20)".to_string(), |w| w.to_string()),
            ),
            (
                "hboaMaxIncoming".into(),
                self.max_incoming
                    .map_or("unlimited".to_string(), |m| m.to_string()),
            ),
        ]
    }
}

/// `ln(k!)` for `k = 0..=max`.
#[derive(Clone, Debug)]
struct LogFactorials(Vec<f64>);

impl LogFactorials {
    fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        for k in 1..=max {
            table.push(table[k - 1] + (k as f64).ln());
        }
        LogFactorials(table)
    }

    /// `lnG(2) - lnG(2+m0+m1) + lnG(1+m0) + lnG(1+m1)`.
    fn leaf_score(&self, m0: usize, m1: usize) -> f64 {
        self.0[m0] + self.0[m1] - self.0[m0 + m1 + 1]
    }
}

/// Log BDe contribution of a leaf holding `m0` zeros and `m1` ones of its
/// target gene, with unit Dirichlet hyperparameters.
pub fn leaf_score(m0: usize, m1: usize) -> f64 {
    LogFactorials::new(m0 + m1 + 1).leaf_score(m0, m1)
}

/// Complexity penalty charged per added leaf.
pub fn split_penalty(sample_size: usize) -> f64 {
    0.5 * (sample_size as f64).log2()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split {
        gene: usize,
        zero: usize,
        one: usize,
    },
    Leaf {
        m0: usize,
        m1: usize,
    },
}

/// Decision tree for one target gene. Node 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    target: usize,
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().filter_map(|n| match *n {
            Node::Leaf { m0, m1 } => Some((m0, m1)),
            Node::Split { .. } => None,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Genes tested anywhere in the tree.
    pub fn tested_genes(&self) -> BTreeSet<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Split { gene, .. } => Some(gene),
                Node::Leaf { .. } => None,
            })
            .collect()
    }

    /// No gene is tested twice on any root-to-leaf path.
    pub fn paths_are_simple(&self) -> bool {
        fn walk(tree: &DecisionTree, node: usize, path: &mut Vec<usize>) -> bool {
            match tree.nodes[node] {
                Node::Leaf { .. } => true,
                Node::Split { gene, zero, one } => {
                    if path.contains(&gene) || gene == tree.target {
                        return false;
                    }
                    path.push(gene);
                    let ok = walk(tree, zero, path) && walk(tree, one, path);
                    path.pop();
                    ok
                }
            }
        }
        walk(self, 0, &mut Vec::new())
    }

    /// Leaf counts reached by a partially generated string.
    fn leaf_for(&self, genome: &Genome) -> (usize, usize) {
        let mut node = 0;
        loop {
            match self.nodes[node] {
                Node::Leaf { m0, m1 } => return (m0, m1),
                Node::Split { gene, zero, one } => {
                    node = if genome.bit(gene) { one } else { zero };
                }
            }
        }
    }
}

/// One decision tree per gene plus the dependency graph they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionForest {
    trees: Vec<DecisionTree>,
    sample_size: usize,
    accepted_gains: Vec<f64>,
}

impl DecisionForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// Gain of every accepted split, in the order they were applied.
    pub fn accepted_gains(&self) -> &[f64] {
        &self.accepted_gains
    }

    /// Parents of each gene: the genes tested in its tree.
    pub fn parents(&self) -> Vec<BTreeSet<usize>> {
        self.trees.iter().map(DecisionTree::tested_genes).collect()
    }

    /// Edges `(from, to)` of the dependency graph.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents()
            .into_iter()
            .enumerate()
            .flat_map(|(i, ps)| ps.into_iter().map(move |j| (j, i)))
            .collect()
    }

    /// A topological order of the dependency graph (smallest ready gene
    /// first), or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.trees.len();
        let parents = self.parents();
        let mut indegree: Vec<usize> = parents.iter().map(BTreeSet::len).collect();
        let mut children = vec![Vec::new(); n];
        for (i, ps) in parents.iter().enumerate() {
            for &j in ps {
                children[j].push(i);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Sum of leaf scores minus `penalty` per leaf.
    pub fn model_score(&self, penalty: f64) -> f64 {
        let table = LogFactorials::new(self.sample_size + 1);
        self.trees
            .iter()
            .flat_map(DecisionTree::leaves)
            .map(|(m0, m1)| table.leaf_score(m0, m1) - penalty)
            .sum()
    }
}

impl fmt::Display for DecisionForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ps) in self.parents().iter().enumerate() {
            if ps.is_empty() {
                continue;
            }
            let list: Vec<String> = ps.iter().map(usize::to_string).collect();
            write!(f, "[{i}<-{}]", list.join(","))?;
        }
        Ok(())
    }
}

/// A leaf still open for splitting during model building.
struct OpenLeaf {
    tree: usize,
    node: usize,
    created: usize,
    path: Vec<usize>,
    members: Vec<u32>,
    /// Gain of splitting on each gene; `None` when not allowed.
    gains: Vec<Option<f64>>,
}

struct ForestBuilder {
    columns: Vec<Vec<bool>>,
    table: LogFactorials,
    penalty: f64,
    max_incoming: Option<usize>,
    trees: Vec<DecisionTree>,
    parents: Vec<BTreeSet<usize>>,
    /// `reach[a][b]`: a directed path a -> ... -> b exists.
    reach: Vec<Vec<bool>>,
    leaves: Vec<OpenLeaf>,
    created: usize,
}

impl ForestBuilder {
    fn new(selected: &Population, max_incoming: Option<usize>) -> Self {
        let n = selected.genome_len();
        let s = selected.len();
        let columns: Vec<Vec<bool>> = (0..n)
            .map(|i| selected.iter().map(|g| g.bit(i)).collect())
            .collect();
        let mut b = ForestBuilder {
            columns,
            table: LogFactorials::new(s + 1),
            penalty: split_penalty(s),
            max_incoming,
            trees: Vec::with_capacity(n),
            parents: vec![BTreeSet::new(); n],
            reach: vec![vec![false; n]; n],
            leaves: Vec::new(),
            created: 0,
        };
        for i in 0..n {
            let members: Vec<u32> = (0..s as u32).collect();
            let (m0, m1) = b.counts(i, &members);
            b.trees.push(DecisionTree {
                target: i,
                nodes: vec![Node::Leaf { m0, m1 }],
            });
            b.open_leaf(i, 0, Vec::new(), members);
        }
        b
    }

    fn counts(&self, target: usize, members: &[u32]) -> (usize, usize) {
        let col = &self.columns[target];
        let m1 = members.iter().filter(|&&m| col[m as usize]).count();
        (members.len() - m1, m1)
    }

    fn open_leaf(&mut self, tree: usize, node: usize, path: Vec<usize>, members: Vec<u32>) {
        let n = self.columns.len();
        let target = &self.columns[tree];
        let (m0, m1) = {
            let m1 = members.iter().filter(|&&m| target[m as usize]).count();
            (members.len() - m1, m1)
        };
        let base = self.table.leaf_score(m0, m1);
        let gains = (0..n)
            .map(|j| {
                if j == tree || path.contains(&j) {
                    return None;
                }
                let split = &self.columns[j];
                // c[a][b]: split gene value a, target value b
                let mut c = [[0usize; 2]; 2];
                for &m in &members {
                    let m = m as usize;
                    c[split[m] as usize][target[m] as usize] += 1;
                }
                Some(
                    self.table.leaf_score(c[0][0], c[0][1])
                        + self.table.leaf_score(c[1][0], c[1][1])
                        - base
                        - self.penalty,
                )
            })
            .collect();
        self.leaves.push(OpenLeaf {
            tree,
            node,
            created: self.created,
            path,
            members,
            gains,
        });
        self.created += 1;
    }

    fn edge_allowed(&self, from: usize, to: usize) -> bool {
        if self.parents[to].contains(&from) {
            return true;
        }
        if self.reach[to][from] {
            return false;
        }
        self.max_incoming
            .is_none_or(|cap| self.parents[to].len() < cap)
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        if !self.parents[to].insert(from) {
            return;
        }
        let n = self.reach.len();
        let sources: Vec<usize> = (0..n).filter(|&x| x == from || self.reach[x][from]).collect();
        let targets: Vec<usize> = (0..n).filter(|&y| y == to || self.reach[to][y]).collect();
        for &x in &sources {
            for &y in &targets {
                self.reach[x][y] = true;
            }
        }
        debug_assert!((0..n).all(|i| !self.reach[i][i]), "dependency cycle");
    }

    /// Best legal split: largest gain, then smallest (tree, gene, leaf age).
    fn best_split(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        let key = |leaf: &OpenLeaf, j: usize| (leaf.tree, j, leaf.created);
        for (li, leaf) in self.leaves.iter().enumerate() {
            for (j, gain) in leaf.gains.iter().enumerate() {
                let Some(gain) = *gain else { continue };
                if gain <= 0.0 || !self.edge_allowed(j, leaf.tree) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bl, bj, bg)) => {
                        gain > bg || (gain == bg && key(leaf, j) < key(&self.leaves[bl], bj))
                    }
                };
                if better {
                    best = Some((li, j, gain));
                }
            }
        }
        best
    }

    fn split(&mut self, leaf_index: usize, gene: usize) {
        let leaf = self.leaves.swap_remove(leaf_index);
        let (zeros, ones): (Vec<u32>, Vec<u32>) = leaf
            .members
            .iter()
            .partition(|&&m| !self.columns[gene][m as usize]);
        let tree = leaf.tree;
        let (z0, z1) = self.counts(tree, &zeros);
        let (o0, o1) = self.counts(tree, &ones);
        let nodes = &mut self.trees[tree].nodes;
        let zero = nodes.len();
        nodes.push(Node::Leaf { m0: z0, m1: z1 });
        let one = nodes.len();
        nodes.push(Node::Leaf { m0: o0, m1: o1 });
        nodes[leaf.node] = Node::Split { gene, zero, one };
        self.add_edge(gene, tree);

        let mut path = leaf.path;
        path.push(gene);
        self.open_leaf(tree, zero, path.clone(), zeros);
        self.open_leaf(tree, one, path, ones);
    }

    fn build(mut self, sample_size: usize) -> DecisionForest {
        let mut accepted_gains = Vec::new();
        while let Some((leaf, gene, gain)) = self.best_split() {
            self.split(leaf, gene);
            accepted_gains.push(gain);
        }
        DecisionForest {
            trees: self.trees,
            sample_size,
            accepted_gains,
        }
    }
}

/// Grow one decision tree per gene from `selected`.
///
/// Starting from single leaves, repeatedly applies the legal split with the
/// largest strictly positive gain. A split is legal when the tested gene is
/// not already on the leaf's path, the induced edge keeps the dependency
/// graph acyclic, and the parent cap (if any) is respected.
pub fn build_forest(selected: &Population, max_incoming: Option<usize>) -> DecisionForest {
    ForestBuilder::new(selected, max_incoming).build(selected.len())
}

/// Ancestral sampling of `count` new strings. Each gene is drawn from its
/// leaf's smoothed estimate `(m1 + 1) / (m0 + m1 + 2)`.
///
/// Panics if the dependency graph has a cycle.
pub fn sample_forest<R: Rng + ?Sized>(
    forest: &DecisionForest,
    count: usize,
    rng: &mut R,
) -> Vec<Genome> {
    let order = forest
        .topological_order()
        .expect("decision forest dependency graph must be acyclic");
    (0..count)
        .map(|_| {
            let mut g = Genome::zeros(forest.trees.len());
            for &i in &order {
                let (m0, m1) = forest.trees[i].leaf_for(&g);
                let p = (m1 + 1) as f64 / (m0 + m1 + 2) as f64;
                g.set_allele(i, rng.random_bool(p));
            }
            g
        })
        .collect()
}

/// Restricted tournament replacement.
///
/// Draws `window` distinct members, finds the one nearest to `offspring` in
/// Hamming distance (lowest index on ties) and replaces it if the offspring
/// is strictly fitter. Returns the replaced index.
pub fn rtr_replace<R: Rng + ?Sized>(
    population: &mut Population,
    offspring: Genome,
    window: usize,
    rng: &mut R,
) -> Result<Option<usize>> {
    let Some(fit) = offspring.fitness() else {
        return Err(Error::state("RTR needs an evaluated offspring"));
    };
    let window = window.clamp(1, population.len());
    let mut contestants: Vec<usize> =
        rand::seq::index::sample(rng, population.len(), window).into_vec();
    contestants.sort_unstable();
    let nearest = contestants
        .into_iter()
        .min_by_key(|&i| hamming_distance(&population[i], &offspring))
        .expect("window is at least 1");
    let incumbent = population[nearest]
        .fitness()
        .ok_or_else(|| Error::state(format!("member {nearest} has not been evaluated")))?;
    if fit > incumbent {
        population.replace(nearest, offspring);
        Ok(Some(nearest))
    } else {
        Ok(None)
    }
}

pub fn hboa_generation<R: Rng + ?Sized>(
    population: &Population,
    params: &HboaParams,
    evaluator: &mut Evaluator,
    rng: &mut R,
) -> Result<(Population, DecisionForest)> {
    let size = population.len();
    let selected = tournament_select(population, 2, size, true, rng)?;
    let forest = build_forest(&selected, params.max_incoming);
    let offspring = sample_forest(&forest, params.offspring_count(size), rng);
    let window = params.window(population.genome_len(), size);
    let mut next = population.clone();
    for mut child in offspring {
        evaluator.evaluate(&mut child, rng);
        rtr_replace(&mut next, child, window, rng)?;
    }
    Ok((next, forest))
}
