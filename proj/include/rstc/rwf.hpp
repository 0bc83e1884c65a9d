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

namespace rstc::rwf {

/// Absolute tolerance on the solved rate equation, in bits, scaled by N.
inline constexpr double rate_tol_bits = 1e-12;

/// Eigenvalues below this fraction of lambda_1 are treated as exactly zero.
inline constexpr double zero_lambda_rel = 1e-15;

/// Modes whose solved rate falls below this are snapped to exactly zero, so
/// the reported active set is deterministic at water-level ties.
inline constexpr double rate_snap_bits = 1e-10;

/// Reverse water-filling solution for one (spectrum, rate) point.
struct BitAllocation {
    double water_level = 0.0;  // mu, variance units
    arma::vec per_mode_rate;   // bits per complex dimension per mode
    arma::uvec active_set;     // modes with strictly positive rate
    double total_rate = 0.0;   // sum(per_mode_rate) / N

    arma::uword modes() const { return per_mode_rate.n_elem; }
};

/// Solve sum_m max(0, log2(lambda_m / mu)) = N * rq for mu by bisection on
/// log2(mu) over [log2(lambda_1) - N*rq, log2(lambda_1)].
/// rq = 0 canonicalizes to mu = lambda_1 and an empty active set.
BitAllocation water_level(const arma::vec &l, double rq);

/// Coefficient distortion D_q(rq) = (1/N) sum_m min(lambda_m, mu(rq)).
double dq(const arma::vec &l, double rq);

/// Fixed-active-set water level: geometric mean of the active eigenvalues
/// times 2^(-N*rq/K), computed in the log domain.
double mu_closed_form(const arma::vec &l, const arma::uvec &active, double rq, arma::uword n);

} // namespace rstc::rwf
