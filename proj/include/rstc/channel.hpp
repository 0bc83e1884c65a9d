// SPDX-License-Identifier: Apache-2.0
//
// rstc - rate-split transform coding library for CSI feedback simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

namespace rstc::channel {

inline constexpr double hermitian_tol = 1e-10;
inline constexpr arma::uword max_kron_dim = 16384;

/// Batch of correlated complex Gaussian channel realizations, one per column.
struct ChannelBatch {
    arma::cx_mat realizations; // dim x count
    std::uint64_t seed = 0;

    arma::uword dim() const { return realizations.n_rows; }
    arma::uword count() const { return realizations.n_cols; }
};

struct EigPair {
    arma::cx_mat basis; // unitary, columns ordered by descending eigenvalue
    arma::vec spectrum; // non-increasing, nonnegative
};

/// Exponential correlation matrix, entry(i,j) = rho^|i-j|. Positive definite
/// for 0 <= rho < 1.
arma::cx_mat exp_correlation(arma::uword n, double rho);

/// Kronecker product of two Hermitian PSD matrices.
arma::cx_mat kron_covariance(const arma::cx_mat &rs, const arma::cx_mat &rf);

/// Full Hermitian eigendecomposition, spectrum sorted descending.
EigPair eig_hermitian(const arma::cx_mat &r);

/// Column order that sorts the merged Kronecker spectrum ls_i * lf_j
/// descending; ties keep the natural (i * nf + j) order.
std::vector<std::pair<arma::uword, arma::uword>> kron_spectrum_order(const arma::vec &ls,
                                                                     const arma::vec &lf);

/// Compose the eigendecomposition of kron(Rs, Rf) from the factor
/// decompositions, columns permuted so the merged spectrum is descending.
EigPair kron_eigenbasis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                        const arma::vec &lf);

/// Draw `count` realizations of U * sqrt(L) * z with z iid CN(0, I).
/// Realization t uses the derived stream (seed, t), so results do not depend
/// on evaluation order.
ChannelBatch sample_channels(const arma::cx_mat &u, const arma::vec &l, arma::uword count,
                             std::uint64_t seed);

/// Throws validation_error unless r is conjugate-symmetric within tolerance.
void require_hermitian(const arma::cx_mat &r, const char *what);

} // namespace rstc::channel
