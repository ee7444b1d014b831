//! Reference classifiers: ID3 without pruning, a random-split tree, and a
//! uniform-random control.

use std::collections::BTreeMap;

use rand::Rng;

use crate::dataset::{CategoricalDataset, QueryEntry};
use crate::error::{Error, Result};
use crate::impurity::{entropy, OutcomeCounts};
use crate::predictors::{fallback_winner, LikelihoodData};

/// A decision tree node. Internal nodes keep the outcome counts of the
/// training subset that reached them so queries with unseen attribute values
/// can fall back to a majority vote at that point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Internal {
        attribute: usize,
        children: BTreeMap<String, TreeNode>,
        fallback_counts: OutcomeCounts,
    },
    Leaf {
        counts: OutcomeCounts,
    },
}

impl TreeNode {
    /// The outcome counts of the training subset at this node.
    pub fn counts(&self) -> &OutcomeCounts {
        match self {
            Self::Internal { fallback_counts, .. } => fallback_counts,
            Self::Leaf { counts } => counts,
        }
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        match self {
            Self::Leaf { .. } => 0,
            Self::Internal { children, .. } => {
                1 + children.values().map(TreeNode::depth).max().unwrap_or(0)
            }
        }
    }

    /// Walks every path asserting no attribute index repeats; used by tests.
    pub fn paths_use_distinct_attributes(&self) -> bool {
        fn walk(node: &TreeNode, seen: &mut Vec<usize>) -> bool {
            match node {
                TreeNode::Leaf { .. } => true,
                TreeNode::Internal { attribute, children, .. } => {
                    if seen.contains(attribute) {
                        return false;
                    }
                    seen.push(*attribute);
                    let ok = children.values().all(|c| walk(c, seen));
                    seen.pop();
                    ok
                }
            }
        }
        walk(self, &mut Vec::new())
    }
}

fn subset_counts(train: &CategoricalDataset, rows: &[usize]) -> OutcomeCounts {
    OutcomeCounts::from_outcomes(rows.iter().map(|&r| train.outcomes()[r].as_str()))
}

/// Average of the children's entropies weighted by subset size; the quantity
/// ID3 minimizes (equivalent to maximizing information gain).
fn weighted_child_entropy(train: &CategoricalDataset, rows: &[usize], attribute: usize) -> f64 {
    let mut parts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for &r in rows {
        parts.entry(train.row(r)[attribute].as_str()).or_default().push(r);
    }
    let total = rows.len() as f64;
    parts
        .values()
        .map(|part| {
            let h = entropy(&subset_counts(train, part)).expect("nonempty partition");
            h * part.len() as f64 / total
        })
        .sum()
}

fn grow(
    train: &CategoricalDataset,
    rows: &[usize],
    unused: &[usize],
    pick: &mut dyn FnMut(&CategoricalDataset, &[usize], &[usize]) -> usize,
) -> TreeNode {
    let counts = subset_counts(train, rows);
    if counts.distinct() == 1 || unused.is_empty() {
        return TreeNode::Leaf { counts };
    }

    let attribute = pick(train, rows, unused);
    let remaining: Vec<usize> = unused.iter().copied().filter(|&a| a != attribute).collect();

    let mut parts: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for &r in rows {
        parts.entry(train.row(r)[attribute].clone()).or_default().push(r);
    }
    let children = parts
        .into_iter()
        .map(|(value, part)| (value, grow(train, &part, &remaining, pick)))
        .collect();

    TreeNode::Internal {
        attribute,
        children,
        fallback_counts: counts,
    }
}

/// Recursive ID3 build with no pruning: each node splits on the unused
/// attribute with the lowest weighted child entropy (lowest index on ties)
/// and stops only on a homogeneous subset or when attributes run out.
pub fn train_id3(train: &CategoricalDataset) -> TreeNode {
    let rows: Vec<usize> = (0..train.row_count()).collect();
    let attrs: Vec<usize> = (0..train.attribute_count()).collect();
    grow(train, &rows, &attrs, &mut |train, rows, unused| {
        let mut best = unused[0];
        let mut best_h = f64::INFINITY;
        for &a in unused {
            let h = weighted_child_entropy(train, rows, a);
            if h < best_h {
                best_h = h;
                best = a;
            }
        }
        best
    })
}

/// Same construction and stopping rules as [`train_id3`] but the split
/// attribute is drawn uniformly from the unused ones.
pub fn train_random_tree(train: &CategoricalDataset, rng: &mut impl Rng) -> TreeNode {
    let rows: Vec<usize> = (0..train.row_count()).collect();
    let attrs: Vec<usize> = (0..train.attribute_count()).collect();
    grow(train, &rows, &attrs, &mut |_, _, unused| {
        unused[rng.random_range(0..unused.len())]
    })
}

/// Descends by the query's attribute values. A value with no branch answers
/// with the current node's fallback counts; a leaf answers with its counts.
/// Majority ties use the same global fallback rule as the lazy predictors,
/// with the root counts standing in for the training-set frequencies.
pub fn predict_tree(tree: &TreeNode, query: &QueryEntry) -> Result<LikelihoodData> {
    let global = tree.counts();
    let mut node = tree;
    let mut depth = 0;
    let answer = loop {
        match node {
            TreeNode::Leaf { counts } => break counts,
            TreeNode::Internal { attribute, children, fallback_counts } => {
                if *attribute >= query.len() {
                    return Err(Error::ArityMismatch {
                        expected: attribute + 1,
                        found: query.len(),
                    });
                }
                match children.get(&query.values()[*attribute]) {
                    Some(child) => {
                        node = child;
                        depth += 1;
                    }
                    None => break fallback_counts,
                }
            }
        }
    };

    let (_, top) = answer.top_outcomes();
    let (winner, tie_broken) = if top.len() > 1 {
        (fallback_winner(top.iter().copied(), global), true)
    } else {
        (top[0].to_owned(), false)
    };
    Ok(LikelihoodData::from_counts(answer, &winner, tie_broken, depth))
}

/// Uniform draw over the distinct training outcomes; the experiment's
/// control indicator.
pub fn predict_uniform_random(outcomes: &[String], rng: &mut impl Rng) -> Result<String> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("outcome set"));
    }
    Ok(outcomes[rng.random_range(0..outcomes.len())].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TargetColumn;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn load(csv: &str) -> CategoricalDataset {
        CategoricalDataset::load_csv(csv.as_bytes(), TargetColumn::Last, false).unwrap()
    }

    #[test]
    fn pure_attribute_beats_mixed_attribute_at_the_root() {
        // attribute 0 splits the outcomes into pure subsets, attribute 1
        // into maximally mixed ones
        let train = load("p,p,y0\np,q,y0\nq,p,y1\nq,q,y1\n");
        match train_id3(&train) {
            TreeNode::Internal { attribute, .. } => assert_eq!(attribute, 0),
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
        // same data with the columns swapped: the pure attribute is now 1
        let train = load("p,p,y0\nq,p,y0\np,q,y1\nq,q,y1\n");
        match train_id3(&train) {
            TreeNode::Internal { attribute, .. } => assert_eq!(attribute, 1),
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
    }

    #[test]
    fn homogeneous_outcomes_give_a_single_leaf() {
        let train = load("a,b,x\nc,d,x\n");
        assert!(matches!(train_id3(&train), TreeNode::Leaf { .. }));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            train_random_tree(&train, &mut rng),
            TreeNode::Leaf { .. }
        ));
    }

    #[test]
    fn parity_table_memorized_at_depth_two() {
        let train = load("0,0,even\n0,1,odd\n1,0,odd\n1,1,even\n");
        let tree = train_id3(&train);
        assert_eq!(tree.depth(), 2);
        for i in 0..train.row_count() {
            let data = predict_tree(&tree, &train.row_as_query(i)).unwrap();
            assert_eq!(data.prediction(), train.outcomes()[i]);
            assert!(!data.tie_broken);
        }
    }

    #[test]
    fn golden_table_training_row_hits_a_pure_leaf() {
        let train = load(crate::predictors::GOLDEN_CSV);
        let tree = train_id3(&train);
        let data = predict_tree(&tree, &QueryEntry::from_comma_list("a1,b0,c2,d0,e0,f1")).unwrap();
        assert_eq!(data.prediction(), "t1");
    }

    #[test]
    fn unseen_root_value_uses_the_fallback_counts() {
        let train = load("p,p,y0\np,q,y0\nq,p,y1\nq,q,y1\nr,p,y0\n");
        let tree = train_id3(&train);
        let data = predict_tree(&tree, &QueryEntry::from_comma_list("zz,p")).unwrap();
        // root fallback counts: y0 x3, y1 x2
        assert_eq!(data.prediction(), "y0");
        assert_eq!(data.selected_level, 0);
    }

    #[test]
    fn random_tree_is_deterministic_per_seed() {
        let train = load(crate::predictors::GOLDEN_CSV);
        let a = train_random_tree(&train, &mut ChaCha8Rng::seed_from_u64(11));
        let b = train_random_tree(&train, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn single_attribute_random_tree_equals_id3() {
        let train = load("p,y0\np,y0\nq,y1\n");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(train_random_tree(&train, &mut rng), train_id3(&train));
    }

    #[test]
    fn trees_keep_attribute_indices_distinct_per_path() {
        let train = load(crate::predictors::GOLDEN_CSV);
        assert!(train_id3(&train).paths_use_distinct_attributes());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(train_random_tree(&train, &mut rng).paths_use_distinct_attributes());
    }

    #[test]
    fn uniform_random_control() {
        let outcomes: Vec<String> = vec!["a".into(), "b".into(), "c".into(), "d".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut truth_rng = ChaCha8Rng::seed_from_u64(1234);
        let draws = 1_000_000;
        let mut errors = 0u64;
        for _ in 0..draws {
            let truth = predict_uniform_random(&outcomes, &mut truth_rng).unwrap();
            let guess = predict_uniform_random(&outcomes, &mut rng).unwrap();
            if guess != truth {
                errors += 1;
            }
        }
        let rate = errors as f64 / draws as f64;
        assert!((rate - 0.75).abs() < 0.005, "error rate {rate}");
    }

    #[test]
    fn uniform_random_single_outcome_and_determinism() {
        let one: Vec<String> = vec!["only".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(predict_uniform_random(&one, &mut rng).unwrap(), "only");
        }
        let outcomes: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let seq1: Vec<String> = {
            let mut r = ChaCha8Rng::seed_from_u64(42);
            (0..32)
                .map(|_| predict_uniform_random(&outcomes, &mut r).unwrap())
                .collect()
        };
        let seq2: Vec<String> = {
            let mut r = ChaCha8Rng::seed_from_u64(42);
            (0..32)
                .map(|_| predict_uniform_random(&outcomes, &mut r).unwrap())
                .collect()
        };
        assert_eq!(seq1, seq2);
        assert!(predict_uniform_random(&[], &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
