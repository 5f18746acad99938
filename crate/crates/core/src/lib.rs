//! Generalized (M,N)-Jensen-Shannon divergences from abstract weighted means.
//!
//! The classical Jensen-Shannon divergence measures the total KL divergence
//! to the arithmetic mixture `(p + q) / 2`. Replacing the arithmetic mean by
//! an abstract weighted mean `M` gives an M-mixture `(pq)_alpha^M
//! proportional to M_alpha(p(x), q(x))`, and with it an M-JSD; combining the
//! two divergence terms with a second mean `N` gives the full (M,N)-JS
//! symmetrization of any base distance. Choosing the mean that keeps the
//! mixture inside the parametric family yields closed forms:
//!
//! | mean        | family             | normalizer `Z_alpha^M`          |
//! |-------------|--------------------|---------------------------------|
//! | arithmetic  | mixture families   | `1`                             |
//! | geometric   | exponential families | `exp(-J_F^alpha(theta1:theta2))` |
//! | harmonic    | Cauchy scale family | `sqrt(g1 g2 / ((g1 g2)_a (g2 g1)_a))` |
//!
//! Module map:
//!
//! - [`means`]: abstract weighted bivariate means with dominance testing.
//! - [`oracle`]: adaptive quadrature / Monte Carlo ground truth for every
//!   closed form shipped here.
//! - [`divergences`]: f-divergences, KL/Jeffreys/resistor/JSD, M-mixtures
//!   and the JS/Jeffreys/(M,N) symmetrization combinators, Bhattacharyya,
//!   Chernoff information.
//! - [`expfam`]: Bregman/Jensen divergences on natural parameters, the full
//!   multivariate Gaussian coordinate machinery, closed-form geometric JSD.
//! - [`cauchy`]: Cauchy scale family closed forms including the harmonic JSD.
//! - [`wmixture`]: mixture families with prescribed components and their
//!   numerically-realized negentropy generator.
//! - [`clustering`]: divergence-generic k-means with k-means++ seeding.

pub mod cauchy;
pub mod clustering;
pub mod descriptor;
pub mod divergences;
pub mod error;
pub mod expfam;
pub mod means;
pub mod oracle;
pub mod wmixture;

pub use error::{Error, Result};
pub use means::{MeanGrid, WeightedMean};
pub use oracle::{Density, FamilyTag, IntegralEstimate, OracleCfg, Support};
