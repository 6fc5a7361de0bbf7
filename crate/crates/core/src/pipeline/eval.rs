use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::records::DocReactions;
use super::normalize_argument;
use crate::role::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    GoldProducts,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Metrics {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Metrics { tp, fp, fn_, precision, recall, f1 }
    }

    fn add(&mut self, tp: usize, fp: usize, fn_: usize) {
        *self = Metrics::from_counts(self.tp + tp, self.fp + fp, self.fn_ + fn_);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conditioning: Option<Conditioning>,
    pub overall: Metrics,
    pub per_role: BTreeMap<Role, Metrics>,
}

impl EvalReport {
    fn new(task: &str, conditioning: Option<Conditioning>) -> EvalReport {
        EvalReport { task: task.to_string(), conditioning, overall: Metrics::default(), per_role: BTreeMap::new() }
    }

    fn count(&mut self, role: Role, tp: usize, fp: usize, fn_: usize) {
        self.per_role.entry(role).or_default().add(tp, fp, fn_);
        self.overall.add(tp, fp, fn_);
    }

    /// Plain-text P/R/F table, percentages to one decimal.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<16}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}", "role", "P (%)", "R (%)", "F (%)", "tp", "fp", "fn");
        let mut row = |name: &str, m: &Metrics| {
            let _ = writeln!(
                s,
                "{:<16}{:>8.1}{:>8.1}{:>8.1}{:>8}{:>8}{:>8}",
                name,
                m.precision * 100.0,
                m.recall * 100.0,
                m.f1 * 100.0,
                m.tp,
                m.fp,
                m.fn_
            );
        };
        for (role, m) in &self.per_role {
            row(&role.to_string(), m);
        }
        row("overall", &self.overall);
        s
    }
}

// multiset intersection size
fn overlap<T: std::hash::Hash + Eq>(pred: &[T], gold: &[T]) -> usize {
    let mut left: HashMap<&T, usize> = HashMap::new();
    for g in gold {
        *left.entry(g).or_default() += 1;
    }
    pred.iter()
        .filter(|p| match left.get_mut(p) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        })
        .count()
}

/// Mention-level product P/R/F. Within each document, predicted products
/// consume matching gold products once each after normalization; missing
/// documents count as empty.
pub fn evaluate_products(preds: &BTreeMap<String, Vec<String>>, gold: &BTreeMap<String, Vec<String>>) -> EvalReport {
    let mut report = EvalReport::new("products", None);
    let empty = Vec::new();
    let docs: BTreeSet<&String> = preds.keys().chain(gold.keys()).collect();
    for doc in docs {
        let p: Vec<String> = preds.get(doc).unwrap_or(&empty).iter().map(|s| normalize_argument(s)).collect();
        let g: Vec<String> = gold.get(doc).unwrap_or(&empty).iter().map(|s| normalize_argument(s)).collect();
        let tp = overlap(&p, &g);
        report.count(Role::Product, tp, p.len() - tp, g.len() - tp);
    }
    report
}

type Pairs = Vec<(Role, String)>;

fn role_pairs(r: &super::StructuredReaction) -> Pairs {
    r.pairs
        .iter()
        .filter(|(role, _)| **role != Role::Product)
        .flat_map(|(role, args)| args.iter().map(move |a| (*role, normalize_argument(a))))
        .collect()
}

/// Role P/R/F over (role, argument) pairs of non-product roles. Reactions
/// are paired by normalized product, each gold reaction used once; pairs of
/// unpaired reactions count entirely as false positives or negatives.
pub fn evaluate_roles(preds: &[DocReactions], gold: &[DocReactions], conditioning: Conditioning) -> EvalReport {
    let mut report = EvalReport::new("roles", Some(conditioning));
    let mut by_doc: BTreeMap<&str, (Vec<&super::StructuredReaction>, Vec<&super::StructuredReaction>)> = BTreeMap::new();
    for d in preds {
        by_doc.entry(&d.doc_id).or_default().0.extend(&d.reactions);
    }
    for d in gold {
        by_doc.entry(&d.doc_id).or_default().1.extend(&d.reactions);
    }

    for (pred, gold) in by_doc.values() {
        let mut gold_used = vec![false; gold.len()];
        let tally = |p: &Pairs, g: &Pairs, report: &mut EvalReport| {
            for role in Role::ALL {
                let pr: Vec<&String> = p.iter().filter(|(r, _)| *r == role).map(|(_, a)| a).collect();
                let gr: Vec<&String> = g.iter().filter(|(r, _)| *r == role).map(|(_, a)| a).collect();
                if pr.is_empty() && gr.is_empty() {
                    continue;
                }
                let tp = overlap(&pr, &gr);
                report.count(role, tp, pr.len() - tp, gr.len() - tp);
            }
        };
        for p in pred {
            let key = normalize_argument(p.product());
            let partner = (0..gold.len()).find(|&j| !gold_used[j] && normalize_argument(gold[j].product()) == key);
            let gold_pairs = match partner {
                Some(j) => {
                    gold_used[j] = true;
                    role_pairs(gold[j])
                }
                None => Vec::new(),
            };
            tally(&role_pairs(p), &gold_pairs, &mut report);
        }
        for (j, g) in gold.iter().enumerate() {
            if !gold_used[j] {
                tally(&Vec::new(), &role_pairs(g), &mut report);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::StructuredReaction;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn map(entries: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
        entries.iter().map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect())).collect()
    }

    fn reaction(doc: &str, product: &str, pairs: &[(Role, &str)]) -> StructuredReaction {
        let mut r = StructuredReaction::new(doc, product);
        for (role, arg) in pairs {
            let mut v = r.get(*role).map(<[String]>::to_vec).unwrap_or_default();
            v.push(arg.to_string());
            r.set(*role, v);
        }
        r
    }

    #[test]
    fn product_formula() {
        let r = evaluate_products(&map(&[("d", &["a", "b", "c"])]), &map(&[("d", &["a", "b", "d", "e"])]));
        assert!(close(r.overall.precision, 2.0 / 3.0));
        assert!(close(r.overall.recall, 0.5));
        assert!(close(r.overall.f1, 4.0 / 7.0));
        let same = evaluate_products(&map(&[("d", &["A "])]), &map(&[("d", &["a"])]));
        assert_eq!(same.overall.f1, 1.0);
        let none = evaluate_products(&map(&[]), &map(&[("d", &["a"])]));
        assert_eq!((none.overall.precision, none.overall.recall, none.overall.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn role_hand_count() {
        let gold = reaction(
            "d",
            "5e",
            &[(Role::Reactant, "3a"), (Role::Catalyst, "FeCl3"), (Role::Solvent, "CH3CN"), (Role::Yield, "85 %")],
        );
        let pred = reaction(
            "d",
            "5e",
            &[(Role::Reactant, "3a"), (Role::Catalyst, "FeCl3"), (Role::Solvent, "CH3CN"), (Role::Yield, "58 %")],
        );
        let r = evaluate_roles(
            &[DocReactions { doc_id: "d".into(), reactions: vec![pred] }],
            &[DocReactions { doc_id: "d".into(), reactions: vec![gold.clone()] }],
            Conditioning::GoldProducts,
        );
        assert_eq!((r.overall.tp, r.overall.fp, r.overall.fn_), (3, 1, 1));
        assert_eq!(r.per_role[&Role::Yield].tp, 0);

        let g = [DocReactions { doc_id: "d".into(), reactions: vec![gold.clone()] }];
        assert_eq!(evaluate_roles(&g, &g, Conditioning::Predicted).overall.f1, 1.0);

        let wrong = [DocReactions {
            doc_id: "d".into(),
            reactions: vec![reaction("d", "5f", &[(Role::Reactant, "3a")])],
        }];
        let r = evaluate_roles(&wrong, &g, Conditioning::Predicted);
        assert_eq!((r.overall.tp, r.overall.fp, r.overall.fn_), (0, 1, 4));
    }

    #[test]
    fn table_layout() {
        let r = evaluate_products(&map(&[("d", &["a", "b", "c"])]), &map(&[("d", &["a", "b", "d", "e"])]));
        let t = r.to_table();
        assert!(t.starts_with("role"));
        assert!(t.contains("product             66.7    50.0    57.1       2       1       2"), "{t}");
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"fn\":2"));
    }
}
