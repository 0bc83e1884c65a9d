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

#include "rstc/channel.hpp"

#include "rstc/errors.hpp"
#include "rstc/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rstc::channel {

void require_hermitian(const arma::cx_mat &r, const char *what) {
    if (r.n_rows != r.n_cols || r.n_rows == 0)
        throw validation_error(std::string(what) + ": matrix must be square and non-empty");
    const double scale = std::max(1.0, arma::abs(r).max());
    const double dev = arma::abs(r - r.t()).max();
    if (dev > hermitian_tol * scale)
        throw validation_error(std::string(what) + ": matrix is not Hermitian (max deviation " +
                               std::to_string(dev) + ")");
}

arma::cx_mat exp_correlation(arma::uword n, double rho) {
    if (n < 1)
        throw validation_error("exp_correlation: n must be >= 1");
    if (rho < 0.0 || rho >= 1.0)
        throw validation_error("exp_correlation: rho must lie in [0, 1)");
    arma::mat r(n, n);
    for (arma::uword i = 0; i < n; ++i)
        for (arma::uword j = 0; j < n; ++j)
            r(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    return arma::cx_mat(r, arma::mat(n, n, arma::fill::zeros));
}

arma::cx_mat kron_covariance(const arma::cx_mat &rs, const arma::cx_mat &rf) {
    require_hermitian(rs, "kron_covariance (spatial factor)");
    require_hermitian(rf, "kron_covariance (frequency factor)");
    if (rs.n_rows * rf.n_rows > max_kron_dim)
        throw capacity_error("kron_covariance: product dimension " +
                             std::to_string(rs.n_rows * rf.n_rows) + " exceeds limit " +
                             std::to_string(max_kron_dim));
    return arma::kron(rs, rf);
}

EigPair eig_hermitian(const arma::cx_mat &r) {
    require_hermitian(r, "eig_hermitian");
    if (r.n_rows > 1024)
        throw capacity_error("eig_hermitian: dimension " + std::to_string(r.n_rows) +
                             " exceeds the full-solver limit of 1024; compose factor "
                             "decompositions with kron_eigenbasis instead");
    arma::vec val;
    arma::cx_mat vec;
    if (!arma::eig_sym(val, vec, arma::cx_mat(0.5 * (r + r.t()))))
        throw convergence_error("eig_hermitian: eigensolver failed");
    // eig_sym returns ascending order
    EigPair out;
    out.spectrum = arma::reverse(val);
    out.basis = arma::fliplr(vec);
    const double recon = arma::norm(out.basis * arma::diagmat(out.spectrum) * out.basis.t() - r, "fro");
    if (recon > 1e-8 * std::max(1e-300, arma::norm(r, "fro")))
        throw convergence_error("eig_hermitian: reconstruction residual too large");
    return out;
}

std::vector<std::pair<arma::uword, arma::uword>> kron_spectrum_order(const arma::vec &ls,
                                                                     const arma::vec &lf) {
    struct Entry {
        double value;
        arma::uword i, j;
    };
    std::vector<Entry> entries;
    entries.reserve(ls.n_elem * lf.n_elem);
    for (arma::uword i = 0; i < ls.n_elem; ++i)
        for (arma::uword j = 0; j < lf.n_elem; ++j)
            entries.push_back({ls(i) * lf(j), i, j});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry &a, const Entry &b) { return a.value > b.value; });
    std::vector<std::pair<arma::uword, arma::uword>> order;
    order.reserve(entries.size());
    for (const auto &e : entries)
        order.emplace_back(e.i, e.j);
    return order;
}

EigPair kron_eigenbasis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                        const arma::vec &lf) {
    if (us.n_cols != ls.n_elem || uf.n_cols != lf.n_elem)
        throw validation_error("kron_eigenbasis: basis/spectrum dimension mismatch");
    if (!ls.is_sorted("descend") || !lf.is_sorted("descend"))
        throw validation_error("kron_eigenbasis: factor spectra must be sorted descending");
    const arma::uword n = us.n_rows * uf.n_rows;
    if (n > max_kron_dim)
        throw capacity_error("kron_eigenbasis: product dimension exceeds limit");

    const auto order = kron_spectrum_order(ls, lf);
    EigPair out;
    out.spectrum.set_size(n);
    out.basis.set_size(n, n);
    for (arma::uword k = 0; k < n; ++k) {
        const auto [i, j] = order[k];
        out.spectrum(k) = ls(i) * lf(j);
        out.basis.col(k) = arma::kron(us.col(i), uf.col(j));
    }
    return out;
}

ChannelBatch sample_channels(const arma::cx_mat &u, const arma::vec &l, arma::uword count,
                             std::uint64_t seed) {
    const arma::uword n = u.n_rows;
    if (u.n_cols != n || l.n_elem != n)
        throw validation_error("sample_channels: basis/spectrum dimensions disagree");
    if (count == 0)
        throw validation_error("sample_channels: empty batch requested");
    if (l.min() < -1e-10 * std::max(1.0, l.max()))
        throw validation_error("sample_channels: spectrum has a negative eigenvalue");

    arma::vec root = l;
    root.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });

    arma::cx_mat z(n, count);
    for (arma::uword t = 0; t < count; ++t) {
        SplitMix64 g(derive_stream(seed, t));
        for (arma::uword m = 0; m < n; ++m)
            z(m, t) = g.next_cn();
        z.col(t) %= arma::cx_vec(root, arma::vec(n, arma::fill::zeros));
    }

    ChannelBatch batch;
    batch.realizations = u * z;
    batch.seed = seed;
    return batch;
}

} // namespace rstc::channel
