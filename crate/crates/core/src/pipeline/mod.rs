//! Product-first extraction into structured reactions, and the P/R/F
//! evaluation harness.

mod eval;
mod records;

pub use crate::extractor::normalize_argument;
pub use eval::{evaluate_products, evaluate_roles, Conditioning, EvalReport, Metrics};
pub use records::{
    parse_reactions, products_by_doc, read_reactions, write_reactions, DocReactions, StructuredReaction,
};

use std::collections::HashSet;

use crate::corpus::MaskedText;
use crate::extractor::{predict, ExtractorError, ExtractorModel};
use crate::role::Role;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Extractor(#[from] ExtractorError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// keeps first occurrence per normalized form, reading order
fn dedup_normalized(values: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    values.into_iter().filter(|v| seen.insert(normalize_argument(v))).collect()
}

/// Step one: every product the model finds, deduplicated after
/// normalization and kept in reading order with its surface form.
pub fn extract_products(model: &ExtractorModel, masked: &MaskedText) -> Result<Vec<String>, ExtractorError> {
    let spans = predict(model, Role::Product, masked, None)?;
    Ok(dedup_normalized(spans.into_iter().map(|s| s.value)))
}

/// Step two: the remaining role questions, conditioned on one product.
/// Roles the model was not trained for, and roles with no answer, are left
/// out of the reaction.
pub fn extract_reaction(model: &ExtractorModel, masked: &MaskedText, product: &str) -> Result<StructuredReaction, ExtractorError> {
    model.role_weights(Role::Product)?;
    let mut reaction = StructuredReaction::new(&masked.doc_id, product);
    for role in Role::ALL {
        if role == Role::Product || !model.is_trained(role) {
            continue;
        }
        let values = dedup_normalized(predict(model, role, masked, Some(product))?.into_iter().map(|s| s.value));
        reaction.set(role, values);
    }
    Ok(reaction)
}

/// One reaction per extracted product, in product order.
pub fn extract_all(model: &ExtractorModel, masked: &MaskedText) -> Result<Vec<StructuredReaction>, ExtractorError> {
    let products = extract_products(model, masked)?;
    extract_with_products(model, masked, &products)
}

/// Role extraction conditioned on given products (gold-conditioned
/// evaluation).
pub fn extract_with_products(
    model: &ExtractorModel,
    masked: &MaskedText,
    products: &[String],
) -> Result<Vec<StructuredReaction>, ExtractorError> {
    products.iter().map(|p| extract_reaction(model, masked, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{prepare_text, Gazetteer};
    use crate::extractor::{train, Hyper, RoleWeights};
    use crate::supervision::QAExample;
    use std::collections::BTreeMap;

    fn doc(id: &str, text: &str) -> MaskedText {
        prepare_text(id, text, &Gazetteer::builtin())
    }

    fn cue_model(cues: &[(Role, &str)]) -> ExtractorModel {
        let mut model = ExtractorModel::new(Hyper::default());
        for role in [Role::Product, Role::Yield, Role::Catalyst] {
            let weights: BTreeMap<String, f64> =
                cues.iter().filter(|(r, _)| *r == role).map(|(_, f)| (f.to_string(), 4.0)).collect();
            model.insert_role(role, RoleWeights { bias: -2.0, weights });
        }
        model
    }

    #[test]
    fn products_in_reading_order() {
        let model = cue_model(&[(Role::Product, "L1:afford"), (Role::Product, "L1:gave")]);
        let m = doc("d", "toluene gave benzamide , and anisole did afford 5e .");
        assert_eq!(extract_products(&model, &m).unwrap(), ["benzamide", "5e"]);
        assert!(extract_products(&model, &doc("e", "no chemistry at all")).unwrap().is_empty());
        let reactions = extract_all(&model, &m).unwrap();
        assert_eq!(reactions.len(), 2);
        for (r, p) in reactions.iter().zip(["benzamide", "5e"]) {
            assert_eq!(r.product(), p);
        }
        assert!(extract_all(&model, &doc("e", "nothing")).unwrap().is_empty());
    }

    #[test]
    fn yield_cue_and_omitted_roles() {
        let model = cue_model(&[(Role::Product, "L1:gave"), (Role::Yield, "R3:% yield .")]);
        let m = doc("d", "toluene gave benzamide in 85 % yield .");
        let r = extract_reaction(&model, &m, "benzamide").unwrap();
        assert_eq!(r.get(Role::Yield), Some(&["85 %".to_string()][..]));
        assert_eq!(r.get(Role::Catalyst), None);
        let bare = extract_reaction(&model, &doc("e", "benzamide ."), "benzamide").unwrap();
        assert_eq!(bare.pairs.len(), 1);
    }

    #[test]
    fn untrained_product_role() {
        let model = ExtractorModel::new(Hyper::default());
        assert!(matches!(extract_all(&model, &doc("d", "toluene")), Err(ExtractorError::UntrainedRole(Role::Product))));
    }

    #[test]
    fn knowledge_trained_catalyst() {
        // FeCl3 as catalyst across varied contexts, as a patent record would state it
        let texts = [
            "A mixture of 3a and FeCl3 in CH3CN was stirred to give 5e .",
            "benzamide was treated with FeCl3 and anisole to give 4b .",
            "FeCl3 promoted the coupling of toluene to give 7c .",
            "Phenol and styrene with FeCl3 gave 2a .",
            "Aniline and Pd(OAc)2 in DMF afforded 6d .",
            "Anisole with Pd(OAc)2 in toluene afforded 8a .",
        ];
        let catalysts = ["FeCl3", "FeCl3", "FeCl3", "FeCl3", "Pd(OAc)2", "Pd(OAc)2"];
        let products = ["5e", "4b", "7c", "2a", "6d", "8a"];
        let mut examples = Vec::new();
        let mut corpus = Vec::new();
        for (i, t) in texts.iter().enumerate() {
            let id = format!("p{i}");
            corpus.push(doc(&id, t));
            examples.push(QAExample::new(Role::Product, &id, t, None, vec![products[i].to_string()]));
            examples.push(QAExample::new(Role::Catalyst, &id, t, Some(products[i]), vec![catalysts[i].to_string()]));
        }
        let model = train(&examples, &corpus, Hyper::default()).unwrap();
        let fig = doc(
            "fig",
            "The reaction of 3a with FeCl3 in CH3CN at 80 °C for 2 h afforded 5e in 85 % yield .",
        );
        let r = extract_reaction(&model, &fig, "5e").unwrap();
        assert_eq!(r.get(Role::Catalyst), Some(&["FeCl3".to_string()][..]));
    }
}
