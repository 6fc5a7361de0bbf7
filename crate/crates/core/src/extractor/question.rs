use super::ExtractorError;
use crate::role::Role;

pub const PRODUCT_QUESTION: &str = "What are the products of the chemical reactions in the text?";

/// Builds the question text for a role. Every role except product must be
/// conditioned on a product; the condition is ignored for product.
pub fn question_for_role(role: Role, condition_product: Option<&str>) -> Result<String, ExtractorError> {
    if role == Role::Product {
        return Ok(PRODUCT_QUESTION.to_string());
    }
    let product = condition_product.ok_or(ExtractorError::MissingCondition(role))?;
    Ok(format!(
        "If the final product is {product}, what is the {} for this chemical reaction?",
        role.noun()
    ))
}
