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

#include "rstc/mismatch.hpp"

#include "rstc/errors.hpp"
#include "rstc/quantizers.hpp"
#include "rstc/rng.hpp"
#include "rstc/rwf.hpp"

#include <cmath>

namespace rstc::mismatch {

namespace {

// Kahan compensated accumulator; trial reductions stay order-stable.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

} // namespace

MismatchModel make_model(arma::uword n, arma::uword tau, arma::uword p, double c_n) {
    if (n == 0 || tau == 0)
        throw validation_error("make_model: dimension and block length must be positive");
    if (p > n)
        throw validation_error("make_model: p exceeds the dimension");
    if (p >= 1 && n < 2)
        throw validation_error("make_model: basis quantization needs dimension >= 2");
    if (c_n <= 0.0)
        throw validation_error("make_model: c_n must be positive");
    MismatchModel m;
    m.p = p;
    m.tau = tau;
    m.c_n = c_n;
    m.alpha0 = c_n / static_cast<double>(n);
    m.beta0 = p == 0 ? 0.0
                     : static_cast<double>(n) * static_cast<double>(tau) /
                           (static_cast<double>(p) * static_cast<double>(n - 1));
    return m;
}

double d0_model(const arma::vec &l, const MismatchModel &m, double r0) {
    if (m.p > l.n_elem)
        throw validation_error("d0_model: p exceeds the spectrum length");
    if (m.p == 0)
        return 0.0;
    double head = 0.0;
    for (arma::uword i = 0; i < m.p; ++i)
        head += l(i);
    return m.alpha0 * head * std::exp2(-m.beta0 * r0);
}

double e2e_model(const arma::vec &l, const MismatchModel &m, double rq, double r0) {
    return rwf::dq(l, rq) + d0_model(l, m, r0);
}

DistortionReport decompose_distortion(const channel::ChannelBatch &batch, const arma::cx_mat &u,
                                      const arma::cx_mat &u_hat,
                                      const arma::cx_mat &recon_coeffs) {
    const arma::uword n = batch.dim();
    const arma::uword count = batch.count();
    if (count == 0)
        throw validation_error("decompose_distortion: empty batch");
    if (u.n_rows != n || u.n_cols != n || u_hat.n_rows != n || u_hat.n_cols != n)
        throw validation_error("decompose_distortion: basis dimension mismatch");
    if (recon_coeffs.n_rows != n || recon_coeffs.n_cols != count)
        throw validation_error("decompose_distortion: coefficient dimension mismatch");

    const arma::cx_mat coeffs = u.t() * batch.realizations; // true KLT coefficients
    const arma::cx_mat diff_basis = u - u_hat;
    const double nd = static_cast<double>(n);

    Kahan t1, t2, t3, e2e;
    for (arma::uword t = 0; t < count; ++t) {
        const arma::cx_vec eq = coeffs.col(t) - recon_coeffs.col(t);
        const arma::cx_vec b = diff_basis * recon_coeffs.col(t);
        t1.add(arma::dot(eq, arma::conj(eq)).real() / nd);
        t2.add(arma::dot(b, arma::conj(b)).real() / nd);
        t3.add(2.0 * arma::cdot(u * eq, b).real() / nd);
        const arma::cx_vec err = batch.realizations.col(t) - u_hat * recon_coeffs.col(t);
        e2e.add(arma::dot(err, arma::conj(err)).real() / nd);
    }

    DistortionReport rep;
    const double cnt = static_cast<double>(count);
    rep.empirical_t1 = t1.sum / cnt;
    rep.empirical_t2 = t2.sum / cnt;
    rep.empirical_t3 = t3.sum / cnt;
    rep.empirical_e2e = e2e.sum / cnt;
    rep.trials = count;
    return rep;
}

CnFit estimate_cn(arma::uword n, const std::vector<arma::uword> &b_sweep, arma::uword trials,
                  std::uint64_t seed) {
    if (n < 2)
        throw validation_error("estimate_cn: dimension must be at least 2");
    if (b_sweep.size() < 2)
        throw validation_error("estimate_cn: need at least two sweep points");
    if (trials == 0)
        throw validation_error("estimate_cn: need at least one trial");

    CnFit fit;
    fit.mean_chordal_sq.set_size(b_sweep.size());
    arma::vec xs(b_sweep.size()), ys(b_sweep.size());
    for (std::size_t i = 0; i < b_sweep.size(); ++i) {
        const arma::uword bits = b_sweep[i];
        Kahan acc;
        for (arma::uword t = 0; t < trials; ++t) {
            // fresh u and fresh codebook each trial
            SplitMix64 g(derive_stream(seed, i, t));
            arma::cx_vec u(n);
            for (arma::uword k = 0; k < n; ++k)
                u(k) = g.next_cn();
            u /= arma::norm(u);
            acc.add(quantizers::rvq_chordal_streamed(u, static_cast<double>(bits),
                                                     derive_stream(seed, i, t, 1)));
        }
        fit.mean_chordal_sq(i) = acc.sum / static_cast<double>(trials);
        xs(i) = -static_cast<double>(bits) / static_cast<double>(n - 1);
        ys(i) = std::log2(fit.mean_chordal_sq(i));
    }

    const double xbar = arma::mean(xs), ybar = arma::mean(ys);
    const double sxx = arma::accu(arma::square(xs - xbar));
    const double slope = arma::accu((xs - xbar) % (ys - ybar)) / sxx;
    const double intercept = ybar - slope * xbar;
    fit.c_n = std::exp2(intercept);
    fit.slope = slope;
    fit.max_residual_bits = arma::abs(ys - (intercept + slope * xs)).max();
    return fit;
}

} // namespace rstc::mismatch
