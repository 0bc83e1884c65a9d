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
//
// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failures. Every tolerance is pinned here, not configurable.

#include "rstc/channel.hpp"
#include "rstc/harness.hpp"
#include "rstc/mismatch.hpp"
#include "rstc/quantizers.hpp"
#include "rstc/ratesplit.hpp"
#include "rstc/rng.hpp"
#include "rstc/rwf.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace rstc;

namespace {

struct Check {
    std::string name;
    std::function<bool(std::ostream &)> fn;
};

arma::vec random_spectrum(arma::uword n, std::uint64_t seed) {
    SplitMix64 g(seed);
    arma::vec l(n);
    for (auto &v : l)
        v = std::exp(3.0 * g.next_double() - 1.0);
    return arma::sort(l, "descend");
}

arma::cx_vec random_unit(arma::uword n, std::uint64_t seed) {
    SplitMix64 g(seed);
    arma::cx_vec u(n);
    for (auto &v : u)
        v = g.next_cn();
    return u / arma::norm(u);
}

double exact_rvq_moment(arma::uword n, double bits) {
    const double L = std::exp2(bits);
    const double r = static_cast<double>(n) / static_cast<double>(n - 1);
    return std::exp(std::log(L) + std::lgamma(L) + std::lgamma(r) - std::lgamma(L + r));
}

// --------------------------------------------------------------------------
// 1. RWF bisection vs closed form on the returned active set
// --------------------------------------------------------------------------
bool criterion1(std::ostream &os) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const arma::uword n = 2 + derive_stream(1, i) % 63; // N <= 64
        const arma::vec l = random_spectrum(n, derive_stream(2, i));
        SplitMix64 g(derive_stream(3, i));
        for (int k = 0; k < 3; ++k) {
            const double rq = 8.0 * g.next_double();
            const auto alloc = rwf::water_level(l, rq);
            if (rq == 0.0 || alloc.active_set.n_elem == 0) {
                if (alloc.water_level != l(0))
                    return false;
                continue;
            }
            const double mu = rwf::mu_closed_form(l, alloc.active_set, rq, n);
            worst = std::max(worst, std::abs(alloc.water_level - mu) / mu);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    os << "max relative deviation " << worst << ", " << secs << " s";
    return worst <= 1e-9 && secs < 1.0;
}

// --------------------------------------------------------------------------
// 2. White-source rate-distortion law
// --------------------------------------------------------------------------
bool criterion2(std::ostream &os) {
    const arma::vec l(16, arma::fill::ones);
    double worst = 0.0;
    for (double r = 0.0; r <= 8.0; r += 0.5)
        worst = std::max(worst, std::abs(rwf::dq(l, r) - std::exp2(-r)));
    os << "max |dq - 2^-r| = " << worst;
    return worst <= 1e-12;
}

// --------------------------------------------------------------------------
// 3. RVQ chordal scaling law
// --------------------------------------------------------------------------
bool criterion3(std::ostream &os) {
    const auto start = std::chrono::steady_clock::now();
    const arma::uword trials = 10000;
    bool ok = true;
    std::ostringstream detail;
    for (arma::uword n : {2, 4, 8}) {
        arma::vec bs = arma::regspace(2, 10);
        arma::vec ys(bs.n_elem);
        for (arma::uword i = 0; i < bs.n_elem; ++i) {
            double acc = 0.0, acc2 = 0.0;
            for (arma::uword t = 0; t < trials; ++t) {
                const arma::cx_vec u = random_unit(n, derive_stream(10 + n, i, t));
                const double d2 =
                    quantizers::rvq_chordal_streamed(u, bs(i), derive_stream(20 + n, i, t));
                acc += d2;
                acc2 += d2 * d2;
            }
            const double mean = acc / trials;
            ys(i) = std::log2(mean);
            if (n == 2) {
                const double sd =
                    std::sqrt((acc2 / trials - mean * mean) / static_cast<double>(trials));
                const double exact = exact_rvq_moment(2, bs(i));
                if (std::abs(mean - exact) > 3.0 * sd) {
                    detail << " [n=2 B=" << bs(i) << " off by " << (mean - exact) / sd << " sigma]";
                    ok = false;
                }
            }
        }
        const double xbar = arma::mean(bs), ybar = arma::mean(ys);
        const double slope =
            arma::accu((bs - xbar) % (ys - ybar)) / arma::accu(arma::square(bs - xbar));
        const double target = -1.0 / static_cast<double>(n - 1);
        detail << " n=" << n << ": slope " << slope << " (target " << target << ")";
        if (std::abs(slope - target) > 0.1 * std::abs(target))
            ok = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    os << detail.str() << ", " << secs << " s";
    return ok && secs < 120.0;
}

// --------------------------------------------------------------------------
// 4. Exact decomposition identity per trial at N = 64
// --------------------------------------------------------------------------
bool criterion4(std::ostream &os) {
    const auto es = channel::eig_hermitian(channel::exp_correlation(8, 0.8));
    const auto eig = channel::kron_eigenbasis(es.basis, es.spectrum, es.basis, es.spectrum);
    const arma::uword trials = 1000;
    const auto batch = channel::sample_channels(eig.basis, eig.spectrum, trials, 41);
    const arma::cx_mat coeffs = eig.basis.t() * batch.realizations;
    const auto alloc = rwf::water_level(eig.spectrum, 1.0);
    quantizers::CoeffQuantConfig cfg;
    const auto qc = quantizers::quantize_coeffs(coeffs, eig.spectrum, alloc, cfg, 43);
    const auto qb = quantizers::quantize_basis(es.basis, es.spectrum, es.basis, es.spectrum, 1, 1,
                                               10.0, 47, quantizers::RvqMode::codebook);
    double worst = 0.0;
    for (arma::uword t = 0; t < trials; ++t) {
        channel::ChannelBatch one;
        one.realizations = batch.realizations.col(t);
        const auto rep = mismatch::decompose_distortion(one, eig.basis, qb.matrix,
                                                        qc.reconstruction.col(t));
        const double lhs = rep.empirical_t1 + rep.empirical_t2 + rep.empirical_t3;
        worst = std::max(worst, std::abs(lhs - rep.empirical_e2e) / rep.empirical_e2e);
    }
    os << "max per-trial relative identity error " << worst;
    return worst <= 1e-9;
}

// --------------------------------------------------------------------------
// 5. Cross-term vanishes under dithered quantization
// --------------------------------------------------------------------------
bool criterion5(std::ostream &os) {
    const auto es = channel::eig_hermitian(channel::exp_correlation(4, 0.8));
    const auto eig = channel::kron_eigenbasis(es.basis, es.spectrum, es.basis, es.spectrum);
    const arma::uword trials = 10000, tau = 2500;
    const auto batch = channel::sample_channels(eig.basis, eig.spectrum, trials, 53);
    const arma::cx_mat coeffs = eig.basis.t() * batch.realizations;
    const auto alloc = rwf::water_level(eig.spectrum, 1.0);
    quantizers::CoeffQuantConfig cfg;
    const auto qc = quantizers::quantize_coeffs(coeffs, eig.spectrum, alloc, cfg, 59);

    double t3 = 0.0, e2e = 0.0, worst_chordal = 0.0;
    for (arma::uword b = 0; b < trials / tau; ++b) {
        const auto qb = quantizers::quantize_basis(es.basis, es.spectrum, es.basis, es.spectrum, 1,
                                                   1, 18.0, derive_stream(61, b),
                                                   quantizers::RvqMode::codebook);
        worst_chordal = std::max(worst_chordal, qb.column_chordal_sq.max());
        channel::ChannelBatch slice;
        slice.realizations = batch.realizations.cols(b * tau, (b + 1) * tau - 1);
        const auto rep = mismatch::decompose_distortion(slice, eig.basis, qb.matrix,
                                                        qc.reconstruction.cols(b * tau, (b + 1) * tau - 1));
        t3 += rep.empirical_t3 * static_cast<double>(tau);
        e2e += rep.empirical_e2e * static_cast<double>(tau);
    }
    t3 /= static_cast<double>(trials);
    e2e /= static_cast<double>(trials);
    os << "|mean T3| / mean E2E = " << std::abs(t3) / e2e << ", max chordal^2 " << worst_chordal;
    return worst_chordal < 0.05 && std::abs(t3) < 0.01 * e2e;
}

// --------------------------------------------------------------------------
// 6. D0 model accuracy with a fitted c_N (analysis model, perfect coefficients)
// --------------------------------------------------------------------------
bool criterion6(std::ostream &os) {
    const arma::uword n = 8;
    const auto [u, l] = channel::eig_hermitian(channel::exp_correlation(n, 0.8));
    const auto fit = mismatch::estimate_cn(n, {6, 7, 8, 9, 10, 11, 12}, 10000, 67);

    bool ok = true;
    double worst = 0.0;
    const arma::uword trials = 5000;
    for (arma::uword p : {1, 2}) {
        for (arma::uword bits = 6; bits <= 12; bits += 2) {
            double acc = 0.0;
            for (arma::uword t = 0; t < trials; ++t) {
                arma::cx_mat u_hat = u;
                for (arma::uword m = 0; m < p; ++m) {
                    const double d2 = quantizers::rvq_chordal_streamed(
                        u.col(m), static_cast<double>(bits), derive_stream(71, p, t, m));
                    // phase-aligned quantized column with that chordal error
                    SplitMix64 g(derive_stream(73, p, t, m));
                    arma::cx_vec w(n);
                    double nrm = 0.0;
                    do {
                        for (auto &v : w)
                            v = g.next_cn();
                        w -= u.col(m) * arma::cdot(u.col(m), w);
                        nrm = arma::norm(w);
                    } while (nrm < 1e-12);
                    w /= nrm;
                    u_hat.col(m) = std::sqrt(1.0 - d2) * u.col(m) + std::sqrt(d2) * w;
                }
                SplitMix64 g(derive_stream(79, p, t));
                arma::cx_vec ht(n);
                for (arma::uword m = 0; m < n; ++m)
                    ht(m) = std::sqrt(l(m)) * g.next_cn();
                acc += std::pow(arma::norm((u - u_hat) * ht), 2) / static_cast<double>(n);
            }
            const double t2 = acc / static_cast<double>(trials);
            double head = 0.0;
            for (arma::uword m = 0; m < p; ++m)
                head += l(m);
            const double model = (fit.c_n / static_cast<double>(n)) * head *
                                 std::exp2(-static_cast<double>(bits) / static_cast<double>(n - 1));
            const double rel = std::abs(t2 - model) / model;
            worst = std::max(worst, rel);
            if (rel > 0.20)
                ok = false;
        }
    }
    os << "fitted c_N = " << fit.c_n << ", worst relative model error " << worst;
    return ok;
}

// --------------------------------------------------------------------------
// 7. Optimal split vs threshold and vs a dense grid
// --------------------------------------------------------------------------
bool criterion7(std::ostream &os) {
    arma::uword checked = 0;
    double worst_excess = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        SplitMix64 g(derive_stream(83, i));
        const arma::uword n = 4 + static_cast<arma::uword>(g.next_double() * 28);
        const arma::vec l = random_spectrum(n, derive_stream(89, i));
        const arma::uword p = 1 + static_cast<arma::uword>(g.next_double() * (n / 2));
        const arma::uword tau = 1 + static_cast<arma::uword>(g.next_double() * 20);
        const double c_n = 0.02 + 0.9 * g.next_double();
        const auto m = mismatch::make_model(n, tau, p, c_n);
        const auto th = ratesplit::phase_threshold(l, m);
        if (th.r_th == ratesplit::rate_sentinel) {
            if (ratesplit::optimal_split(l, m, 4.0).active)
                return false;
            continue;
        }
        // regime flips exactly at the threshold
        if (th.r_th > 1e-6 && ratesplit::optimal_split(l, m, th.r_th - 1e-6).active)
            return false;
        if (!ratesplit::optimal_split(l, m, th.r_th + 1e-6).active)
            return false;

        // global optimality against a 1e-3-step grid
        const double r_total = th.r_th + 0.1 + 2.0 * g.next_double();
        const auto split = ratesplit::optimal_split(l, m, r_total);
        const double achieved = mismatch::e2e_model(l, m, split.r_q, split.r_0);
        for (double r0 = 0.0; r0 <= r_total; r0 += 1e-3) {
            const double v = mismatch::e2e_model(l, m, r_total - r0, r0);
            worst_excess = std::max(worst_excess, (achieved - v) / v);
            if (achieved > v * (1.0 + 1e-10))
                return false;
        }
        ++checked;
    }
    os << checked << " thresholded instances, worst relative excess over the grid "
       << worst_excess;
    return checked >= 25;
}

// --------------------------------------------------------------------------
// 8. Desk-scale R-D sweep vs the Gaussian bound (perfect basis)
// --------------------------------------------------------------------------
bool criterion8(std::ostream &os) {
    auto cfg = harness::parse_config({{"nt", "8"},
                                      {"nc", "8"},
                                      {"rho_s", "0.8"},
                                      {"rho_f", "0.8"},
                                      {"basis", "perfect"},
                                      {"quantizer", "dithered"},
                                      {"rates", "0.2,0.4,0.6,0.8,1.0"},
                                      {"trials", "10000"},
                                      {"seed", "97"}});
    const auto recs = harness::run_rd_sweep(cfg);
    bool ok = true;
    os << "gap to the Gaussian R-D bound (dB):";
    for (const auto &r : recs) {
        const double gap = 10.0 * std::log10(r.e2e / r.dq_analytic);
        os << " " << gap;
        if (!(gap >= -0.05 && gap <= 1.6))
            ok = false;
    }
    return ok;
}

// --------------------------------------------------------------------------
// 9. Complexity figures
// --------------------------------------------------------------------------
bool criterion9(std::ostream &os) {
    const auto rep = harness::structured_complexity(32, 32);
    os << rep.parameters << " parameters, " << rep.flops << " flops";
    return rep.parameters == 2048 && rep.flops == 131072 &&
           std::abs(static_cast<double>(rep.flops) - 1.31e5) < 500.0;
}

// --------------------------------------------------------------------------
// 10. Effective-rate collapse under model retraining vs basis refresh
// --------------------------------------------------------------------------
bool criterion10(std::ostream &os) {
    const double n_tau = 1024.0 * 10000.0;
    const double dl_reduction = 32.0 * 2.1e6 / n_tau;
    double basis_reduction = 0.0;
    for (double p = 1; p <= 16; ++p)
        for (double b = 1; b <= 20; ++b)
            basis_reduction = std::max(basis_reduction, p * b / n_tau);
    // the arithmetic must flow through effective_rate
    const double r_dl = ratesplit::effective_rate(8.0, 32.0 * 2.1e6, 1024, 10000);
    const double r_basis = ratesplit::effective_rate(8.0, 16.0 * 20.0, 1024, 10000);
    os << "model retraining costs " << dl_reduction << " bits/dim, basis refresh "
       << basis_reduction;
    return std::abs(dl_reduction - 6.56) < 0.01 && basis_reduction < 0.001 &&
           std::abs((8.0 - r_dl) - dl_reduction) < 1e-12 &&
           std::abs((8.0 - r_basis) - basis_reduction) < 1e-12;
}

// --------------------------------------------------------------------------
// 11. Byte-identical sweeps (wall time excluded)
// --------------------------------------------------------------------------
std::string csv_without_wall_time(const std::vector<harness::ResultRecord> &records) {
    std::stringstream ss;
    harness::emit_results(records, ss, harness::OutputFormat::csv);
    std::stringstream out;
    std::string line;
    while (std::getline(ss, line))
        out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
}

bool criterion11(std::ostream &os) {
    auto cfg = harness::parse_config({{"nt", "4"},
                                      {"nc", "4"},
                                      {"trials", "2000"},
                                      {"tau", "500"},
                                      {"rates", "0.3,0.8"},
                                      {"seed", "101"}});
    const auto a = csv_without_wall_time(harness::run_rd_sweep(cfg));
    const auto b = csv_without_wall_time(harness::run_rd_sweep(cfg));
    os << (a == b ? "identical" : "MISMATCH");
    return a == b;
}

} // namespace

int main() {
    const std::vector<Check> checks = {
        {"1 RWF bisection matches the closed form", criterion1},
        {"2 white-source R-D law", criterion2},
        {"3 RVQ chordal scaling", criterion3},
        {"4 exact distortion decomposition", criterion4},
        {"5 cross-term vanishes under dither", criterion5},
        {"6 D0 model with fitted c_N", criterion6},
        {"7 split/threshold consistency and grid optimality", criterion7},
        {"8 desk-scale sweep within 1.6 dB of the bound", criterion8},
        {"9 complexity figures", criterion9},
        {"10 effective-rate collapse", criterion10},
        {"11 sweep determinism", criterion11},
    };

    int failures = 0;
    for (const auto &c : checks) {
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception &e) {
            detail << "exception: " << e.what();
        }
        std::printf("[%s] criterion %s (%s)\n", ok ? "PASS" : "FAIL", c.name.c_str(),
                    detail.str().c_str());
        std::fflush(stdout);
        if (!ok)
            ++failures;
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", checks.size());
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
