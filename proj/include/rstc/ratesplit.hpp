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

#include "rstc/mismatch.hpp"

#include <armadillo>
#include <limits>

namespace rstc::ratesplit {

/// Sentinel for "basis feedback never pays off" (printed as inf in output).
inline constexpr double rate_sentinel = std::numeric_limits<double>::max();

/// Budget split between coefficient and amortized basis rate.
struct RateSplit {
    double r_total = 0.0;
    double r_q = 0.0;
    double r_0 = 0.0;
    bool active = false; // regime: r_0 > 0
};

struct Threshold {
    double r_th = 0.0;             // exact water-level bisection
    double r_th_closed_form = 0.0; // fixed-active-set formula, cross-check
    arma::uword active_modes = 0;  // |S| at the converged threshold
};

/// Rate above which spending bits on basis feedback strictly helps. Solves
/// mu(R) = beta0 * D0(0) with the exact water-level solver; the closed-form
/// evaluation on the converged active set rides along as a cross-check.
Threshold phase_threshold(const arma::vec &l, const mismatch::MismatchModel &m);

/// Optimal (r_q, r_0): inactive below the threshold, otherwise the root of
/// mu(r_total - r0) = beta0 * D0(r0) by bisection, with a golden-section
/// fallback on the modeled end-to-end distortion.
RateSplit optimal_split(const arma::vec &l, const mismatch::MismatchModel &m, double r_total);

struct ConsistencyReport {
    double threshold = 0.0;
    RateSplit split;
    bool consistent = false;
};

/// Checks that the split regime flips exactly at the threshold (1e-6 rate
/// tolerance band).
ConsistencyReport split_consistency_check(const arma::vec &l, const mismatch::MismatchModel &m,
                                          double r_total);

/// Budget left after paying the update overhead: r_total - b_update/(n*tau),
/// floored at zero.
double effective_rate(double r_total, double b_update, arma::uword n, arma::uword tau);

} // namespace rstc::ratesplit
