//! p-adic valuations and metric, truncated elements of profinite
//! completions of `ℤ^d` (diagonal or along a matrix), and finite coset
//! unions with exact Haar measure.

mod coset;
mod tower;
mod valuation;

pub use coset::{big_json, Coset, CosetIndex, CosetUnion, Space};
pub use tower::{reduce_i64, Hnf, MatrixTower, ProfiniteByMatrix};
pub use valuation::{coset_chain_limit, is_prime, padic_distance, valuation, valuation_int, PadicTrunc, Valuation};
