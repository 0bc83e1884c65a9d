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

#include "rstc/channel.hpp"

#include <armadillo>
#include <cstdint>
#include <vector>

namespace rstc::mismatch {

/// Parameters of the analytic basis-mismatch distortion model.
struct MismatchModel {
    arma::uword p = 0;   // quantized dominant columns
    arma::uword tau = 1; // coherence block length, realizations
    double c_n = 0.0;    // RVQ chordal constant
    double alpha0 = 0.0; // c_n / N
    double beta0 = 0.0;  // N tau / (p (N-1)); 0 when p = 0
};

MismatchModel make_model(arma::uword n, arma::uword tau, arma::uword p, double c_n);

/// D0(r0) = alpha0 * (sum of the p dominant eigenvalues) * 2^(-beta0 r0).
double d0_model(const arma::vec &l, const MismatchModel &m, double r0);

/// End-to-end model D_q(rq) + D0(r0); the vanishing cross-term is zero under
/// the dithered regime.
double e2e_model(const arma::vec &l, const MismatchModel &m, double rq, double r0);

/// Analytic and measured distortion, side by side.
struct DistortionReport {
    double analytic_dq = 0.0, analytic_d0 = 0.0, analytic_e2e = 0.0;
    double empirical_t1 = 0.0, empirical_t2 = 0.0, empirical_t3 = 0.0, empirical_e2e = 0.0;
    arma::uword trials = 0;
};

/// Per-trial decomposition of measured MSE into coefficient (T1), basis
/// mismatch (T2) and cross (T3) terms, with the end-to-end error computed
/// independently as an algebraic cross-check. `u_hat` may be non-unitary
/// (the analysis model leaves unquantized columns untouched). Fills only the
/// empirical fields; callers add the analytic ones.
DistortionReport decompose_distortion(const channel::ChannelBatch &batch, const arma::cx_mat &u,
                                      const arma::cx_mat &u_hat, const arma::cx_mat &recon_coeffs);

struct CnFit {
    double c_n = 0.0;              // 2^intercept of the log2 regression
    double slope = 0.0;            // relative to -1/(n-1); 1 when the law holds
    double max_residual_bits = 0.0;
    arma::vec mean_chordal_sq;     // one entry per sweep point
};

/// Monte Carlo fit of the RVQ chordal constant: regress log2(mean chordal^2)
/// on -B/(n-1) over the sweep and return 2^intercept.
CnFit estimate_cn(arma::uword n, const std::vector<arma::uword> &b_sweep, arma::uword trials,
                  std::uint64_t seed);

} // namespace rstc::mismatch
