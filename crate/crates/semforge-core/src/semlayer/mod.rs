//! The interactive semantic layer: HTML conversion, occurrence indexing,
//! tooltip content and final page assembly.

mod html;
mod occur;
mod render;
mod tooltip;

pub use html::{latex_to_html, HtmlFragment, UnbalancedInput};
pub use occur::{index_occurrences, MatchForm, Occurrence, OccurrenceIndex, PreDefinitionUse};
pub use render::{render, RenderError, RenderedDocument, DEFAULT_STYLESHEET};
pub use tooltip::{
    generate_tooltip_content, refinement_prompt, TooltipRefiner, TooltipSpec,
};
