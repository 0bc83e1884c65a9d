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

#include "rstc/rwf.hpp"

#include "rstc/errors.hpp"

#include <cmath>
#include <vector>

namespace rstc::rwf {

namespace {

void validate_spectrum(const arma::vec &l) {
    if (l.n_elem == 0)
        throw validation_error("rwf: empty spectrum");
    if (!l.is_sorted("descend"))
        throw validation_error("rwf: spectrum must be sorted non-increasing");
    if (l.min() < 0.0)
        throw validation_error("rwf: spectrum has a negative eigenvalue");
}

// log2(lambda) of eigenvalues above the zero clamp; empty if the source is
// degenerate.
std::vector<double> positive_log2(const arma::vec &l) {
    std::vector<double> logs;
    if (l(0) <= 0.0)
        return logs;
    const double floor = zero_lambda_rel * l(0);
    logs.reserve(l.n_elem);
    for (arma::uword m = 0; m < l.n_elem; ++m)
        if (l(m) >= floor)
            logs.push_back(std::log2(l(m)));
    return logs;
}

// Achievable rate (bits, summed over modes) at water level 2^x.
double rate_at(const std::vector<double> &logs, double x) {
    double bits = 0.0;
    for (double lg : logs)
        if (lg > x)
            bits += lg - x;
    return bits;
}

} // namespace

BitAllocation water_level(const arma::vec &l, double rq) {
    validate_spectrum(l);
    if (rq < 0.0)
        throw validation_error("water_level: rate must be nonnegative");
    const auto logs = positive_log2(l);
    if (logs.empty())
        throw validation_error("water_level: degenerate all-zero spectrum");

    const arma::uword n = l.n_elem;
    BitAllocation alloc;
    alloc.per_mode_rate.zeros(n);

    if (rq == 0.0) {
        alloc.water_level = l(0);
        alloc.active_set.reset();
        alloc.total_rate = 0.0;
        return alloc;
    }

    const double target = static_cast<double>(n) * rq;
    double lo = logs[0] - target; // rate(lo) >= target
    double hi = logs[0];          // rate(hi) = 0
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        x = 0.5 * (lo + hi);
        if (x <= lo || x >= hi)
            break; // interval exhausted at double precision
        if (rate_at(logs, x) > target)
            lo = x;
        else
            hi = x;
    }
    x = 0.5 * (lo + hi);
    if (std::abs(rate_at(logs, x) - target) > rate_tol_bits * static_cast<double>(n))
        throw convergence_error("water_level: bisection failed to meet the rate equation");

    alloc.water_level = std::exp2(x);
    const double floor = zero_lambda_rel * l(0);
    std::vector<arma::uword> active;
    for (arma::uword m = 0; m < n; ++m) {
        if (l(m) < floor)
            continue;
        double r = std::log2(l(m)) - x;
        if (r <= rate_snap_bits)
            continue; // marginally active modes count as inactive
        alloc.per_mode_rate(m) = r;
        active.push_back(m);
    }
    alloc.active_set = arma::uvec(active);
    alloc.total_rate = arma::accu(alloc.per_mode_rate) / static_cast<double>(n);
    return alloc;
}

double dq(const arma::vec &l, double rq) {
    const BitAllocation alloc = water_level(l, rq);
    double sum = 0.0;
    for (arma::uword m = 0; m < l.n_elem; ++m)
        sum += std::min(l(m), alloc.water_level);
    return sum / static_cast<double>(l.n_elem);
}

double mu_closed_form(const arma::vec &l, const arma::uvec &active, double rq, arma::uword n) {
    validate_spectrum(l);
    if (active.n_elem == 0)
        throw validation_error("mu_closed_form: active set is empty");
    double log_sum = 0.0;
    for (arma::uword idx : active) {
        if (idx >= l.n_elem)
            throw validation_error("mu_closed_form: active index out of range");
        if (l(idx) <= 0.0)
            throw validation_error("mu_closed_form: active mode has zero eigenvalue");
        log_sum += std::log2(l(idx));
    }
    const double k = static_cast<double>(active.n_elem);
    return std::exp2((log_sum - static_cast<double>(n) * rq) / k);
}

} // namespace rstc::rwf
