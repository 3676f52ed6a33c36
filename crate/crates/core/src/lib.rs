// SPDX-License-Identifier: Apache-2.0

pub mod ast;
pub mod backend;
pub mod context;
pub mod eval;
pub mod project;
pub mod prompt;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/parsing.md")]
    pub mod parsing {}
    #[doc = include_str!("../../../book/src/project-model.md")]
    pub mod project_model {}
    #[doc = include_str!("../../../book/src/context.md")]
    pub mod context {}
    #[doc = include_str!("../../../book/src/prompts.md")]
    pub mod prompts {}
    #[doc = include_str!("../../../book/src/backends.md")]
    pub mod backends {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
