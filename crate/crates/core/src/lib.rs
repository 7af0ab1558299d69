//! Membership in the subgroup of SL(2, Z) generated by `L_u = [[1,0],[u,1]]`
//! and `R_v = [[1,v],[0,1]]`, decided through continued fractions.
//!
//! The algorithms are generic over any [`Int`]; the aliases below fix the
//! scalar to [`BigInt`], which is what the command-line tool uses.

pub mod cf;
pub mod corpus;
pub mod int;
pub mod matgroup;
pub mod oracle;
pub mod transforms;

pub use num_bigint::BigInt;

pub use cf::{concat, evaluate, negate, short_cf, CfError};
pub use corpus::{generate_corpus, read_corpus, verify_corpus, write_corpus, CorpusError};
pub use int::Int;
pub use matgroup::{check_ca_consistency, decide, decide_sanov, decide_traced, in_ambient, word_to_matrix, MatGroupError, Status};
pub use oracle::{cross_validate, enumerate_members, sample_ambient, OracleError, ValidationReport};
pub use transforms::{f_legacy, f_uv, g_uv, TransformError};

pub type Rational = num_rational::BigRational;
pub type CfWord = cf::CfWord<BigInt>;
pub type Mat2 = matgroup::Mat2<BigInt>;
pub type GroupWord = matgroup::GroupWord<BigInt>;
pub type Params = transforms::Params<BigInt>;
pub type Decision = matgroup::Decision<BigInt>;
pub type CorpusEntry = corpus::CorpusEntry<BigInt>;
pub type EnumConfig = oracle::EnumConfig<BigInt>;
