//! Synthetic reaction paragraphs with planted cue templates, used to test
//! the bootstrap end to end.
//!
//! Every linguistic role gets twelve hidden templates in three tiers. A
//! "bridge" document states the same argument twice, once through a cue the
//! loop can already see (a seed for tier 1, a tier-`t-1` template for tier
//! `t`) and once through the hidden template. QA answers are strings, so
//! training on the visible cue also labels the hidden mention, and each
//! iteration can reach one more tier.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, Source};
use crate::pattern::{parse_pattern, Pattern};
use crate::pipeline::{DocReactions, StructuredReaction};
use crate::role::Role;
use crate::supervision::{DatasetStats, PatentRecord};

pub const TIERS: usize = 3;
pub const TEMPLATES_PER_TIER: usize = 4;

/// A cue with `{}` where the argument goes; `{R}` takes a reactant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cue {
    pub text: &'static str,
    pub unit: Option<&'static str>,
}

const fn chem(text: &'static str) -> Cue {
    Cue { text, unit: None }
}

const fn num(text: &'static str, unit: &'static str) -> Cue {
    Cue { text, unit: Some(unit) }
}

const PRODUCT_SEEDS: &[Cue] = &[
    chem("produced {}"),
    chem("{} was obtained"),
    chem("{R} was transformed to {}"),
    chem("conversion of {R} to {}"),
];
const PRODUCT_HIDDEN: [Cue; 12] = [
    chem("furnished {}"),
    chem("{} was isolated"),
    chem("delivering {}"),
    chem("afforded pure {}"),
    chem("{} was collected"),
    chem("generating {}"),
    chem("providing crude {}"),
    chem("{} precipitated"),
    chem("releasing {}"),
    chem("{} crystallized"),
    chem("liberating {}"),
    chem("{} was recovered"),
];

const YIELD_SEEDS: &[Cue] = &[num("in {} % yield", "%"), num("with a yield of {} %", "%"), num("( {} % yield )", "%")];
const YIELD_HIDDEN: [Cue; 12] = [
    num("reaching {} %", "%"),
    num("approximately {} %", "%"),
    num("{} % efficiency", "%"),
    num("{} % overall", "%"),
    num("totaling {} %", "%"),
    num("{} % recovery", "%"),
    num("nearly {} %", "%"),
    num("{} % conversion", "%"),
    num("roughly {} %", "%"),
    num("{} % mass balance", "%"),
    num("averaging {} %", "%"),
    num("{} % output", "%"),
];

const TEMPERATURE_SEEDS: &[Cue] = &[num("at {} °C", "°C")];
const TEMPERATURE_HIDDEN: [Cue; 12] = [
    num("warmed to {} °C", "°C"),
    num("maintained near {} °C", "°C"),
    num("{} °C bath", "°C"),
    num("held around {} °C", "°C"),
    num("refluxing above {} °C", "°C"),
    num("{} °C jacket", "°C"),
    num("cooled below {} °C", "°C"),
    num("kept beneath {} °C", "°C"),
    num("{} °C setpoint", "°C"),
    num("{} °C oven", "°C"),
    num("once attaining {} °C", "°C"),
    num("{} °C thermostat", "°C"),
];

const TIME_SEEDS: &[Cue] = &[num("for {} h", "h"), num("for {} min", "min"), num("after {} h", "h")];
const TIME_HIDDEN: [Cue; 12] = [
    num("over {} h", "h"),
    num("within {} h", "h"),
    num("{} h later", "h"),
    num("lasting {} min", "min"),
    num("during {} h", "h"),
    num("{} min thereafter", "min"),
    num("spanning {} h", "h"),
    num("{} h period", "h"),
    num("throughout {} min", "min"),
    num("{} min interval", "min"),
    num("elapsed {} min", "min"),
    num("{} h duration", "h"),
];

const PREFIXES: &[&str] = &[
    "methyl", "ethyl", "propyl", "butyl", "benzyl", "phenyl", "chloro", "bromo", "fluoro", "nitro", "amino",
    "hydroxy", "methoxy", "cyano", "acetyl", "iodo", "formyl", "allyl", "vinyl", "tolyl",
];
const CORES: &[&str] = &[
    "benzamide", "benzoate", "pyridone", "quinolone", "indolone", "cyclohexanone", "naphthol", "phenol",
    "acrylate", "butanoate", "piperidone", "furanone", "styrene", "anisamide", "propanamide", "acetophenone",
    "benzylamine", "cinnamate",
];
const SOLVENTS: &[&str] = &["THF", "DMF", "toluene", "hexane", "methanol", "ethanol", "dioxane", "acetone"];
const CATALYSTS: &[&str] = &["Pd/C", "Pd(PPh3)4", "Pd(OAc)2", "DMAP", "DBU"];
const PRODUCT_LEADS: &[&str] = &[
    "Workup", "Purification", "Chromatography", "Filtration", "Evaporation", "Then", "Finally", "Subsequently",
    "Distillation", "Extraction", "Quenching", "Recrystallization", "Trituration", "Neutralization", "Decantation",
    "Concentration", "Drying", "Sublimation",
];
const CONDITION_LEADS: &[&str] = &[
    "Stirring continued", "The reaction proceeded", "The mixture stayed", "Heating continued", "Agitation persisted",
    "The suspension remained", "The flask sat", "The solution rested", "Mixing went on", "The slurry remained",
    "The vessel stood", "The contents rested", "Shaking persisted", "The batch remained",
];

#[derive(Debug, Clone)]
pub struct HiddenTemplate {
    pub role: Role,
    pub tier: usize,
    pub cue: Cue,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub solo_per_template: usize,
    pub bridge_per_template: usize,
    pub seed_docs_per_role: usize,
    /// Share of training documents that state no reaction at all.
    pub distractor_share: f64,
    pub heldout_docs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 7,
            solo_per_template: 4,
            bridge_per_template: 10,
            seed_docs_per_role: 30,
            distractor_share: 0.6,
            heldout_docs: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub train: Vec<Document>,
    pub train_gold: Vec<DocReactions>,
    pub heldout: Vec<Document>,
    pub heldout_gold: Vec<DocReactions>,
    pub templates: Vec<HiddenTemplate>,
}

fn seeds_for(role: Role) -> &'static [Cue] {
    match role {
        Role::Product => PRODUCT_SEEDS,
        Role::Yield => YIELD_SEEDS,
        Role::Temperature => TEMPERATURE_SEEDS,
        Role::Time => TIME_SEEDS,
        _ => &[],
    }
}

fn hidden_for(role: Role) -> &'static [Cue; 12] {
    match role {
        Role::Product => &PRODUCT_HIDDEN,
        Role::Yield => &YIELD_HIDDEN,
        Role::Temperature => &TEMPERATURE_HIDDEN,
        Role::Time => &TIME_HIDDEN,
        _ => unreachable!("only linguistic roles have planted templates"),
    }
}

/// The planted templates as patterns, tier by tier.
pub fn hidden_templates() -> Vec<HiddenTemplate> {
    let mut out = Vec::new();
    for role in Role::LINGUISTIC {
        for (i, cue) in hidden_for(role).iter().enumerate() {
            let slot = if cue.unit.is_some() { "[Num!]" } else { "[Chem!]" };
            let pattern = parse_pattern(role.as_str(), &cue.text.replace("{}", slot)).expect("templates parse");
            out.push(HiddenTemplate { role, tier: i / TEMPLATES_PER_TIER + 1, cue: *cue, pattern });
        }
    }
    out
}

struct Gen {
    rng: ChaCha8Rng,
}

/// Arguments of one reaction.
struct Facts {
    product: String,
    reactants: [String; 2],
    solvent: &'static str,
    values: [(Role, String); 3],
}

impl Gen {
    fn chem_name(&mut self) -> String {
        let p = *PREFIXES.choose(&mut self.rng).unwrap();
        let c = *CORES.choose(&mut self.rng).unwrap();
        match self.rng.random_range(0..4) {
            0 => format!("{}-{p}{c}", self.rng.random_range(2..7)),
            1 if p.ends_with("yl") => format!("{p} {c}"),
            _ => format!("{p}{c}"),
        }
    }

    fn facts(&mut self) -> Facts {
        let product = self.chem_name();
        let mut reactants = [self.chem_name(), self.chem_name()];
        while reactants[0] == product || reactants[1] == product || reactants[0] == reactants[1] {
            reactants = [self.chem_name(), self.chem_name()];
        }
        let values = [
            (Role::Yield, self.rng.random_range(40..100).to_string()),
            (Role::Temperature, self.rng.random_range(20..181).to_string()),
            (Role::Time, self.rng.random_range(2..49).to_string()),
        ];
        Facts { product, reactants, solvent: SOLVENTS.choose(&mut self.rng).unwrap(), values }
    }

    fn setup(&mut self, f: &Facts) -> String {
        let [a, b] = &f.reactants;
        let s = f.solvent;
        match self.rng.random_range(0..4) {
            0 => format!("{a} was added to a solution of {b} in {s} ."),
            1 => format!("A mixture of {a} and {b} in {s} was stirred ."),
            2 => format!("{a} and {b} were combined in {s} ."),
            _ => format!("To a solution of {b} in {s} was added {a} ."),
        }
    }

    fn distractors(&mut self, out: &mut Vec<String>) {
        if self.rng.random_bool(0.5) {
            out.push(format!("Analysis showed {} % ee .", self.rng.random_range(50..100)));
        }
        if self.rng.random_bool(0.3) {
            out.push(format!("The catalyst loading was {} % w/w .", self.rng.random_range(1..20)));
        }
        if self.rng.random_bool(0.5) {
            out.push(format!("The solid showed mp {} °C with decomposition .", self.rng.random_range(60..250)));
        }
        if self.rng.random_bool(0.5) {
            out.push(format!("Aliquots were taken every {} h for analysis .", self.rng.random_range(1..6)));
        }
        if self.rng.random_bool(0.5) {
            let w = *["hexane", "toluene", "methanol", "ethanol"].choose(&mut self.rng).unwrap();
            out.push(format!("The residue was washed with {w} ."));
        }
        if self.rng.random_bool(0.3) {
            out.push(format!("{} was added dropwise .", self.chem_name()));
        }
    }

    fn fill(cue: &Cue, arg: &str, f: &Facts) -> String {
        cue.text.replace("{R}", &f.reactants[0]).replace("{}", arg)
    }

    fn product_sentence(&mut self, cue: &Cue, f: &Facts, yield_cue: Option<&Cue>) -> String {
        let lead = *PRODUCT_LEADS.choose(&mut self.rng).unwrap();
        let clause = Gen::fill(cue, &f.product, f);
        let mut s = if cue.text.starts_with("{}") || cue.text.starts_with("{R}") {
            clause
        } else {
            format!("{lead} {clause}")
        };
        if let Some(y) = yield_cue {
            s.push(' ');
            s.push_str(&Gen::fill(y, &f.values[0].1, f));
        }
        s.push_str(" .");
        s
    }

    /// One condition per sentence, so a cue's right context never depends
    /// on whether the other condition is stated.
    fn condition_sentence(&mut self, role: Role, cue: &Cue, f: &Facts) -> String {
        let lead = *CONDITION_LEADS.choose(&mut self.rng).unwrap();
        let value = if role == Role::Temperature { &f.values[1].1 } else { &f.values[2].1 };
        format!("{lead} {} .", Gen::fill(cue, value, f))
    }

    fn seed(&mut self, role: Role) -> &'static Cue {
        seeds_for(role).choose(&mut self.rng).unwrap()
    }

    /// A reaction paragraph. `cues` gives the cue per role (absent roles are
    /// not stated); `extra` restates one role's argument through a second cue.
    fn document(&mut self, cues: &[(Role, &Cue)], extra: Option<(Role, &Cue)>) -> (String, StructuredReaction, Facts) {
        let f = self.facts();
        let cue = |r: Role| cues.iter().find(|(role, _)| *role == r).map(|(_, c)| *c);
        let mut sentences = vec![self.setup(&f)];
        for role in [Role::Temperature, Role::Time] {
            if let Some(c) = cue(role) {
                sentences.push(self.condition_sentence(role, c, &f));
            }
        }
        let product_cue = cue(Role::Product).expect("every reaction names its product");
        sentences.push(self.product_sentence(product_cue, &f, cue(Role::Yield)));
        if let Some((role, c)) = extra {
            sentences.push(match role {
                Role::Product => self.product_sentence(c, &f, None),
                Role::Yield => {
                    let restated = self.seed(Role::Product);
                    self.product_sentence(restated, &f, Some(c))
                }
                _ => self.condition_sentence(role, c, &f),
            });
        }
        self.distractors(&mut sentences);
        sentences[1..].shuffle(&mut self.rng);

        let mut reaction = StructuredReaction::new("", &f.product);
        for (role, value) in &f.values {
            if let Some(c) = cue(*role) {
                reaction.set(*role, vec![format!("{value} {}", c.unit.unwrap())]);
            }
        }
        (sentences.join(" "), reaction, f)
    }

    fn distractor_document(&mut self) -> String {
        let f = self.facts();
        let mut sentences = vec![self.setup(&f)];
        self.distractors(&mut sentences);
        sentences.push("The mixture was concentrated .".to_string());
        sentences.join(" ")
    }

    /// Cues for the roles other than `focus`: seeds, the product always,
    /// the numeric roles at random.
    fn context_cues(&mut self, focus: Role) -> Vec<(Role, &'static Cue)> {
        let mut out = Vec::new();
        for role in Role::LINGUISTIC {
            if role == focus {
                continue;
            }
            if role == Role::Product || self.rng.random_bool(0.5) {
                out.push((role, self.seed(role)));
            }
        }
        out
    }
}

fn push(docs: &mut Vec<Document>, gold: &mut Vec<DocReactions>, prefix: &str, text: String, reaction: Option<StructuredReaction>) {
    let id = format!("{prefix}{:05}", docs.len());
    let reactions = reaction
        .map(|mut r| {
            r.source_doc_id = id.clone();
            vec![r]
        })
        .unwrap_or_default();
    gold.push(DocReactions { doc_id: id.clone(), reactions });
    docs.push(Document { id, text, source: Source::Fixture });
}

pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(config.seed) };
    let templates = hidden_templates();
    let mut texts: Vec<(String, Option<StructuredReaction>)> = Vec::new();

    for role in Role::LINGUISTIC {
        for _ in 0..config.seed_docs_per_role {
            let mut cues = g.context_cues(role);
            cues.push((role, g.seed(role)));
            let (t, r, _) = g.document(&cues, None);
            texts.push((t, Some(r)));
        }
        let hidden = hidden_for(role);
        for (i, cue) in hidden.iter().enumerate() {
            let tier = i / TEMPLATES_PER_TIER;
            for _ in 0..config.solo_per_template {
                let mut cues = g.context_cues(role);
                cues.push((role, cue));
                let (t, r, _) = g.document(&cues, None);
                texts.push((t, Some(r)));
            }
            for _ in 0..config.bridge_per_template {
                let visible: &Cue = if tier == 0 {
                    g.seed(role)
                } else {
                    &hidden[(tier - 1) * TEMPLATES_PER_TIER + g.rng.random_range(0..TEMPLATES_PER_TIER)]
                };
                let mut cues = g.context_cues(role);
                cues.push((role, visible));
                let (t, r, _) = g.document(&cues, Some((role, cue)));
                texts.push((t, Some(r)));
            }
        }
    }
    let reactions = texts.len();
    let distractors = ((config.distractor_share / (1.0 - config.distractor_share)) * reactions as f64).round() as usize;
    for _ in 0..distractors {
        texts.push((g.distractor_document(), None));
    }
    texts.shuffle(&mut g.rng);

    let (mut train, mut train_gold) = (Vec::new(), Vec::new());
    for (t, r) in texts {
        push(&mut train, &mut train_gold, "s", t, r);
    }

    let (mut heldout, mut heldout_gold) = (Vec::new(), Vec::new());
    for _ in 0..config.heldout_docs {
        let mut cues: Vec<(Role, &Cue)> = Vec::new();
        for role in Role::LINGUISTIC {
            if role != Role::Product && !g.rng.random_bool(0.7) {
                continue;
            }
            let pool: Vec<&Cue> = seeds_for(role).iter().chain(hidden_for(role).iter()).collect();
            cues.push((role, *pool.choose(&mut g.rng).unwrap()));
        }
        let (t, r, _) = g.document(&cues, None);
        push(&mut heldout, &mut heldout_gold, "h", t, Some(r));
    }

    SynthCorpus { train, train_gold, heldout, heldout_gold, templates }
}

impl Gen {
    fn patent_record(&mut self, id: String) -> PatentRecord {
        let f = self.facts();
        let mut sentences = vec![self.setup(&f)];
        let catalysts = if self.rng.random_bool(0.5) {
            let c = *CATALYSTS.choose(&mut self.rng).unwrap();
            sentences.push(format!("{c} was used as the catalyst ."));
            vec![c.to_string()]
        } else {
            Vec::new()
        };
        let cue = self.seed(Role::Product);
        sentences.push(self.product_sentence(cue, &f, None));
        PatentRecord {
            id,
            text: sentences.join(" "),
            product: vec![f.product],
            reactants: f.reactants.to_vec(),
            catalysts,
            solvents: vec![f.solvent.to_string()],
        }
    }
}

/// Patent-style records whose arguments all occur in their text.
pub fn patent_records(n: usize, seed: u64) -> Vec<PatentRecord> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    (0..n).map(|i| g.patent_record(format!("p{i:05}"))).collect()
}

/// Records with planted defects and the statistics filtering must report.
#[derive(Debug, Clone)]
pub struct PatentFixture {
    pub records: Vec<PatentRecord>,
    pub expected: DatasetStats,
    pub kept_ids: Vec<String>,
}

/// `kept` clean records plus `short` records under 8 words, `long` records
/// over 256 words and `missing` records naming a product absent from the
/// text, shuffled.
pub fn patent_fixture(seed: u64, kept: usize, short: usize, long: usize, missing: usize) -> PatentFixture {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    let mut records = Vec::new();
    let mut kept_ids = Vec::new();
    for i in 0..kept {
        let r = g.patent_record(format!("k{i:04}"));
        kept_ids.push(r.id.clone());
        records.push(r);
    }
    for i in 0..short {
        let mut r = g.patent_record(format!("s{i:04}"));
        let words = g.rng.random_range(2..8);
        r.text = r.text.split_whitespace().take(words).collect::<Vec<_>>().join(" ");
        records.push(r);
    }
    for i in 0..long {
        let mut r = g.patent_record(format!("l{i:04}"));
        while r.text.split_whitespace().count() <= 256 {
            r.text.push_str(" The mixture was stirred under nitrogen and monitored by TLC .");
        }
        records.push(r);
    }
    for i in 0..missing {
        let mut r = g.patent_record(format!("m{i:04}"));
        r.product = vec![format!("{}zz", r.product[0])];
        records.push(r);
    }
    records.shuffle(&mut g.rng);
    kept_ids.sort();
    let expected = DatasetStats {
        input_count: records.len(),
        kept,
        dropped_short: short,
        dropped_long: long,
        dropped_missing_arg: missing,
    };
    PatentFixture { records, expected, kept_ids }
}

/// Whether `inner` occurs inside `outer` with the argument slots aligned.
fn contains_window(outer: &Pattern, inner: &Pattern) -> bool {
    let n = inner.items.len();
    n < outer.items.len()
        && outer.items.windows(n).enumerate().any(|(start, w)| {
            w == inner.items.as_slice() && start + inner.argument_offset() == outer.argument_offset()
        })
}

/// Whether each template made it into `set`, either verbatim or through a
/// same-role pattern that contains it or is contained in it and matches the
/// corpus exactly as often (and therefore at the same places).
pub fn recovered(templates: &[HiddenTemplate], set: &crate::pattern::PatternSet, masked: &[crate::corpus::MaskedText]) -> Vec<bool> {
    use crate::pattern::match_pattern;
    let count = |p: &Pattern| -> usize { masked.iter().map(|m| match_pattern(p, m).len()).sum() };
    templates
        .iter()
        .map(|t| {
            if set.contains(t.role, &t.pattern.items) {
                return true;
            }
            let own = count(&t.pattern);
            set.patterns()
                .iter()
                .filter(|p| p.role == t.role)
                .filter(|p| contains_window(&t.pattern, p) || contains_window(p, &t.pattern))
                .any(|p| count(p) == own)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{prepare, Gazetteer};
    use crate::pattern::match_pattern;
    use std::collections::HashSet;

    #[test]
    fn templates_are_distinct_and_tiered() {
        let t = hidden_templates();
        assert_eq!(t.len(), 48);
        let ids: HashSet<&str> = t.iter().map(|h| h.pattern.id.as_str()).collect();
        assert_eq!(ids.len(), 48);
        assert!(t.iter().all(|h| (1..=3).contains(&h.tier)));
    }

    #[test]
    fn generation_is_deterministic() {
        let c = SynthConfig { heldout_docs: 5, ..Default::default() };
        let a = generate(&c);
        let b = generate(&c);
        assert_eq!(a.train, b.train);
        assert_eq!(a.heldout_gold, b.heldout_gold);
    }

    #[test]
    fn tagger_sees_exactly_the_planted_arguments() {
        let c = SynthConfig { solo_per_template: 4, bridge_per_template: 10, seed_docs_per_role: 5, ..Default::default() };
        let corpus = generate(&c);
        let gaz = Gazetteer::builtin();
        for (doc, gold) in corpus.train.iter().zip(&corpus.train_gold).chain(corpus.heldout.iter().zip(&corpus.heldout_gold)) {
            let m = prepare(doc, &gaz);
            let values: Vec<&str> = m.entities.iter().map(|e| e.value.as_str()).collect();
            for r in &gold.reactions {
                assert!(values.contains(&r.product()), "{} not tagged in {}", r.product(), doc.text);
                for role in [Role::Yield, Role::Temperature, Role::Time] {
                    if let Some(v) = r.get(role) {
                        let n = v[0].split(' ').next().unwrap();
                        assert!(values.contains(&n), "{n} not tagged in {}", doc.text);
                    }
                }
            }
        }
    }

    #[test]
    fn every_template_occurs() {
        let corpus = generate(&SynthConfig { heldout_docs: 0, ..Default::default() });
        let gaz = Gazetteer::builtin();
        let masked: Vec<_> = corpus.train.iter().map(|d| prepare(d, &gaz)).collect();
        for t in &corpus.templates {
            let n: usize = masked.iter().map(|m| match_pattern(&t.pattern, m).len()).sum();
            assert!(n >= 14, "{} matched {n} times", t.pattern);
        }
    }

    #[test]
    fn patent_fixture_counts_are_what_the_filter_reports() {
        let fx = patent_fixture(3, 40, 20, 20, 20);
        let (kept, stats) = crate::supervision::filter_patent_records(&fx.records);
        assert_eq!(stats, fx.expected);
        let mut ids: Vec<String> = kept.into_iter().map(|r| r.id).collect();
        ids.sort();
        assert_eq!(ids, fx.kept_ids);
    }

    #[test]
    fn patent_arguments_are_tagged_entities() {
        let gaz = Gazetteer::builtin();
        for r in patent_records(50, 1) {
            let m = crate::corpus::prepare_text(&r.id, &r.text, &gaz);
            let entities: Vec<String> = m.entities.iter().map(|e| e.value.to_lowercase()).collect();
            for a in r.arguments() {
                assert!(entities.contains(&a.to_lowercase()), "{a} not tagged in {}", r.text);
            }
        }
    }
}
