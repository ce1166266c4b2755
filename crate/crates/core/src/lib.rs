pub mod certificate;
pub mod cli;
pub mod clopen;
pub mod completion;
pub mod dynamics;
pub mod error;
pub mod library;
pub mod multisection;
pub mod oracle;
pub mod parse;
pub mod perm;
pub mod pmap;
pub mod random;
pub mod search;
pub mod tail;
