//! Science maps from bibliographic corpora.
//!
//! The crate turns a set of papers with references and abstracts into a
//! citation network, a community partition, community-salient keywords, a
//! coarse community graph, an accessibility-based core/periphery ranking, a
//! keyword dendrogram, a force-directed layout and keyword timelines. The
//! [`pipeline`] module chains all stages and writes their exports.

pub mod accessibility;
pub mod citenet;
pub mod communities;
pub mod corpus;
pub mod layout;
pub mod pipeline;
pub mod salience;
pub mod taxonomy;
pub mod timeline;
