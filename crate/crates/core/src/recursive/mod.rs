//! Recursive constructions of nested `(v,3,2)`-BIBDs from smaller
//! ingredients.

pub mod compose;
pub mod ingredients;
pub mod pipeline;

pub use compose::{
    assign_classes, fill_groups, frame_construction, wfc_weight, ClassRule, GroupFill, NewPoint,
};
pub use ingredients::{
    check_ingredient, Ingredient, IngredientKind, IngredientRequest, Provider, SourcePreference,
    INGREDIENT_PATH_VAR,
};
pub use pipeline::{pipeline, plan, PipelineOutput, Plan, Route};
