pub mod bootstrap;
pub mod corpus;
pub mod extractor;
pub mod io;
pub mod pattern;
pub mod pipeline;
pub mod role;
pub mod supervision;
pub mod synth;

pub use role::Role;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/mining.md")]
    mod mining {}
    #[doc = include_str!("../../../book/src/supervision.md")]
    mod supervision {}
    #[doc = include_str!("../../../book/src/extractor.md")]
    mod extractor {}
    #[doc = include_str!("../../../book/src/bootstrap.md")]
    mod bootstrap {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
