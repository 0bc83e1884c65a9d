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

#include "rstc/quantizers.hpp"

#include "rstc/channel.hpp"
#include "rstc/errors.hpp"
#include "rstc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <string>

namespace rstc::quantizers {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;

double gauss_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }
double gauss_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double gauss_quantile(double p) {
    double lo = -12.0, hi = 12.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gauss_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Gaussian cell moments over [a, b]: mass, first moment, second moment.
// Endpoints may be infinite.
void cell_moments(double a, double b, double &m0, double &m1, double &m2) {
    const double fa = std::isinf(a) ? 0.0 : gauss_pdf(a);
    const double fb = std::isinf(b) ? 0.0 : gauss_pdf(b);
    const double Fa = std::isinf(a) ? (a < 0 ? 0.0 : 1.0) : gauss_cdf(a);
    const double Fb = std::isinf(b) ? (b < 0 ? 0.0 : 1.0) : gauss_cdf(b);
    m0 = Fb - Fa;
    m1 = fa - fb;
    m2 = m0 + (std::isinf(a) ? 0.0 : a * fa) - (std::isinf(b) ? 0.0 : b * fb);
}

} // namespace

// ---------------------------------------------------------------------------
// Lloyd-Max
// ---------------------------------------------------------------------------

arma::uword ScalarQuantizer::quantize_index(double x) const {
    const double *begin = thresholds.memptr();
    const double *end = begin + thresholds.n_elem;
    return static_cast<arma::uword>(std::upper_bound(begin, end, x) - begin);
}

ScalarQuantizer lloyd_max_design(arma::uword levels) {
    if (levels == 0)
        throw validation_error("lloyd_max_design: need at least one level");
    if (levels > max_lloyd_levels)
        throw capacity_error("lloyd_max_design: level count exceeds 2^16");

    ScalarQuantizer q;
    q.kind = ScalarKind::lloyd_max_fixed_rate;
    if (levels == 1) {
        q.codebook = arma::vec{0.0};
        q.mse = 1.0;
        return q;
    }

    arma::vec c(levels);
    for (arma::uword i = 0; i < levels; ++i)
        c(i) = gauss_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(levels));

    arma::vec t(levels - 1);
    bool converged = false;
    for (long iter = 0; iter < 100000; ++iter) {
        for (arma::uword i = 0; i + 1 < levels; ++i)
            t(i) = 0.5 * (c(i) + c(i + 1));
        double move = 0.0;
        for (arma::uword i = 0; i < levels; ++i) {
            const double a = (i == 0) ? -arma::datum::inf : t(i - 1);
            const double b = (i + 1 == levels) ? arma::datum::inf : t(i);
            double m0, m1, m2;
            cell_moments(a, b, m0, m1, m2);
            if (m0 <= 0.0)
                continue; // empty cell, keep the old codepoint
            const double next = m1 / m0;
            move = std::max(move, std::abs(next - c(i)));
            c(i) = next;
        }
        if (move < 1e-10) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw convergence_error("lloyd_max_design: no fixed point after 1e5 iterations");

    for (arma::uword i = 0; i + 1 < levels; ++i)
        t(i) = 0.5 * (c(i) + c(i + 1));
    double mse = 0.0;
    for (arma::uword i = 0; i < levels; ++i) {
        const double a = (i == 0) ? -arma::datum::inf : t(i - 1);
        const double b = (i + 1 == levels) ? arma::datum::inf : t(i);
        double m0, m1, m2;
        cell_moments(a, b, m0, m1, m2);
        mse += m2 - 2.0 * c(i) * m1 + c(i) * c(i) * m0;
    }
    q.codebook = c;
    q.thresholds = t;
    q.mse = mse;
    return q;
}

// ---------------------------------------------------------------------------
// Entropy accounting
// ---------------------------------------------------------------------------

double empirical_entropy(const arma::ivec &indices) {
    if (indices.n_elem == 0)
        throw validation_error("empirical_entropy: empty index sequence");
    std::map<arma::sword, arma::uword> hist;
    for (arma::sword k : indices)
        ++hist[k];
    const double n = static_cast<double>(indices.n_elem);
    double h = 0.0;
    for (const auto &[k, cnt] : hist) {
        const double p = static_cast<double>(cnt) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double conditional_entropy(const arma::ivec &indices, const arma::vec &dither_unit,
                           arma::uword bins) {
    if (indices.n_elem == 0)
        throw validation_error("conditional_entropy: empty index sequence");
    if (indices.n_elem != dither_unit.n_elem)
        throw validation_error("conditional_entropy: index/dither length mismatch");
    if (bins <= 1)
        return empirical_entropy(indices);

    std::map<std::pair<arma::uword, arma::sword>, arma::uword> hist;
    arma::uvec bin_count(bins, arma::fill::zeros);
    for (arma::uword s = 0; s < indices.n_elem; ++s) {
        auto j = static_cast<arma::uword>(dither_unit(s) * static_cast<double>(bins));
        j = std::min(j, bins - 1);
        ++hist[{j, indices(s)}];
        ++bin_count(j);
    }
    const double n = static_cast<double>(indices.n_elem);
    double h = 0.0;
    for (const auto &[key, cnt] : hist) {
        const double pj = static_cast<double>(bin_count(key.first)) / n;
        const double pk = static_cast<double>(cnt) / static_cast<double>(bin_count(key.first));
        h -= pj * pk * std::log2(pk);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Coefficient chain
// ---------------------------------------------------------------------------

namespace {

const ScalarQuantizer &cached_lloyd(arma::uword levels) {
    static std::map<arma::uword, ScalarQuantizer> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(levels);
    if (it == cache.end())
        it = cache.emplace(levels, lloyd_max_design(levels)).first;
    return it->second;
}

// Conditional index entropy of the pooled component samples at step `delta`.
// Fast path: flat histogram keyed by (bin, index offset).
double dithered_entropy_at(const arma::vec &x, const arma::vec &u, double delta,
                           arma::uword bins) {
    const arma::uword n = x.n_elem;
    arma::ivec idx(n);
    arma::sword kmin = 0, kmax = 0;
    for (arma::uword s = 0; s < n; ++s) {
        const double d = delta * (u(s) - 0.5);
        const auto k = static_cast<arma::sword>(std::llround((x(s) + d) / delta));
        idx(s) = k;
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    const arma::sword span = kmax - kmin + 1;
    if (span > (1 << 22))
        return conditional_entropy(idx, u, bins); // map-based fallback
    std::vector<arma::uword> hist(static_cast<std::size_t>(span) * bins, 0);
    std::vector<arma::uword> bin_count(bins, 0);
    for (arma::uword s = 0; s < n; ++s) {
        auto j = static_cast<arma::uword>(u(s) * static_cast<double>(bins));
        j = std::min(j, bins - 1);
        ++hist[static_cast<std::size_t>(j) * span + static_cast<std::size_t>(idx(s) - kmin)];
        ++bin_count[j];
    }
    const double total = static_cast<double>(n);
    double h = 0.0;
    for (arma::uword j = 0; j < bins; ++j) {
        if (bin_count[j] == 0)
            continue;
        const double pj = static_cast<double>(bin_count[j]) / total;
        const double nj = static_cast<double>(bin_count[j]);
        for (arma::sword k = 0; k < span; ++k) {
            const arma::uword cnt = hist[static_cast<std::size_t>(j) * span + static_cast<std::size_t>(k)];
            if (cnt == 0)
                continue;
            const double pk = static_cast<double>(cnt) / nj;
            h -= pj * pk * std::log2(pk);
        }
    }
    return h;
}

// Bracketed secant search on log2(step) matching the measured conditional
// entropy to `target_bits` per component.
double match_entropy_step(const arma::vec &x, const arma::vec &u, double target_bits,
                          arma::uword bins, double tol_bits) {
    constexpr double t_min = -40.0, t_max = 40.0;
    const double gauss_diff_entropy = 2.0470955876616951; // 0.5*log2(2*pi*e)

    auto H = [&](double t) { return dithered_entropy_at(x, u, std::exp2(t), bins); };

    double t_lo = gauss_diff_entropy - target_bits; // H(t_lo) should exceed target
    double h_lo = H(t_lo);
    while (h_lo < target_bits && t_lo > t_min) {
        t_lo -= 1.0;
        h_lo = H(t_lo);
    }
    double t_hi = t_lo;
    double h_hi = h_lo;
    while (h_hi > target_bits && t_hi < t_max) {
        t_hi += 1.0;
        h_hi = H(t_hi);
    }
    if (h_lo < target_bits)
        return std::exp2(t_lo); // target above what the data can express

    for (int it = 0; it < 60; ++it) {
        if (std::abs(h_lo - target_bits) <= tol_bits)
            return std::exp2(t_lo);
        if (std::abs(h_hi - target_bits) <= tol_bits)
            return std::exp2(t_hi);
        if (t_hi - t_lo < 1e-10)
            break;
        double t_next;
        if (std::abs(h_hi - h_lo) > 1e-12) {
            t_next = t_lo + (t_hi - t_lo) * (h_lo - target_bits) / (h_lo - h_hi);
            if (!(t_next > t_lo + 1e-14 && t_next < t_hi - 1e-14))
                t_next = 0.5 * (t_lo + t_hi);
        } else {
            t_next = 0.5 * (t_lo + t_hi);
        }
        const double h_next = H(t_next);
        if (h_next > target_bits) {
            t_lo = t_next;
            h_lo = h_next;
        } else {
            t_hi = t_next;
            h_hi = h_next;
        }
    }
    // Empirical entropy moves in sample-size steps; return the closer endpoint.
    return std::exp2(std::abs(h_lo - target_bits) < std::abs(h_hi - target_bits) ? t_lo : t_hi);
}

} // namespace

QuantizedCoefficients quantize_coeffs(const arma::cx_mat &coeffs, const arma::vec &l,
                                      const rwf::BitAllocation &alloc,
                                      const CoeffQuantConfig &cfg, std::uint64_t seed) {
    const arma::uword n = coeffs.n_rows;
    const arma::uword count = coeffs.n_cols;
    if (count == 0)
        throw validation_error("quantize_coeffs: empty coefficient batch");
    if (l.n_elem != n || alloc.per_mode_rate.n_elem != n)
        throw validation_error("quantize_coeffs: allocation/coefficient dimension mismatch");

    QuantizedCoefficients out;
    out.reconstruction.zeros(n, count);
    out.index_re.zeros(n, count);
    out.index_im.zeros(n, count);
    out.step.zeros(n);
    out.wiener_gain.ones(n);
    out.entropy_bits.zeros(n);
    const bool dithered = cfg.kind == ScalarKind::uniform_dithered;
    if (dithered) {
        out.dither_re.zeros(n, count);
        out.dither_im.zeros(n, count);
    }

    for (arma::uword m = 0; m < n; ++m) {
        const double bits = alloc.per_mode_rate(m);
        if (bits <= 0.0 || l(m) <= 0.0)
            continue;
        const double scale = std::sqrt(0.5 * l(m));

        arma::vec x_re(count), x_im(count);
        for (arma::uword t = 0; t < count; ++t) {
            x_re(t) = coeffs(m, t).real() / scale;
            x_im(t) = coeffs(m, t).imag() / scale;
        }

        if (!dithered) {
            const auto lv = static_cast<arma::uword>(
                std::max<long long>(1, std::llround(std::exp2(0.5 * bits))));
            if (lv <= 1)
                continue; // one level per component reconstructs to zero
            const ScalarQuantizer &q = cached_lloyd(std::min(lv, max_lloyd_levels));
            arma::ivec pooled(2 * count);
            for (arma::uword t = 0; t < count; ++t) {
                const arma::uword kr = q.quantize_index(x_re(t));
                const arma::uword ki = q.quantize_index(x_im(t));
                out.index_re(m, t) = static_cast<arma::sword>(kr);
                out.index_im(m, t) = static_cast<arma::sword>(ki);
                pooled(2 * t) = static_cast<arma::sword>(kr);
                pooled(2 * t + 1) = static_cast<arma::sword>(ki);
                out.reconstruction(m, t) = scale * std::complex<double>(q.codebook(kr), q.codebook(ki));
            }
            out.entropy_bits(m) = 2.0 * empirical_entropy(pooled);
            continue;
        }

        // Shared dither, derived from (seed, realization, mode).
        arma::vec u_re(count), u_im(count);
        for (arma::uword t = 0; t < count; ++t) {
            SplitMix64 g(derive_stream(seed, t, m));
            u_re(t) = g.next_double_open();
            u_im(t) = g.next_double_open();
        }
        const arma::vec x_all = arma::join_cols(x_re, x_im);
        const arma::vec u_all = arma::join_cols(u_re, u_im);
        const double target = 0.5 * bits;
        const double delta =
            match_entropy_step(x_all, u_all, target, cfg.dither_bins, cfg.entropy_tol_bits);
        const double gain = cfg.wiener_scaling ? 1.0 / (1.0 + delta * delta / 12.0) : 1.0;

        for (arma::uword t = 0; t < count; ++t) {
            const double dr = delta * (u_re(t) - 0.5);
            const double di = delta * (u_im(t) - 0.5);
            const auto kr = std::llround((x_re(t) + dr) / delta);
            const auto ki = std::llround((x_im(t) + di) / delta);
            out.index_re(m, t) = kr;
            out.index_im(m, t) = ki;
            out.dither_re(m, t) = dr;
            out.dither_im(m, t) = di;
            const double yr = gain * (static_cast<double>(kr) * delta - dr);
            const double yi = gain * (static_cast<double>(ki) * delta - di);
            out.reconstruction(m, t) = scale * std::complex<double>(yr, yi);
        }
        out.step(m) = delta;
        out.wiener_gain(m) = gain;
        out.entropy_bits(m) =
            2.0 * dithered_entropy_at(x_all, u_all, delta, cfg.dither_bins);
    }
    return out;
}

// ---------------------------------------------------------------------------
// RVQ on the Grassmann manifold
// ---------------------------------------------------------------------------

namespace {

arma::cx_vec rvq_codeword(arma::uword n, std::uint64_t seed, arma::uword index) {
    SplitMix64 g(derive_stream(seed, index));
    arma::cx_vec c(n);
    for (arma::uword i = 0; i < n; ++i)
        c(i) = g.next_cn();
    return c / arma::norm(c);
}

struct ColumnQuant {
    arma::cx_vec column; // phase-aligned so u^H col is real nonnegative
    double chordal_sq;
};

ColumnQuant quantize_column_codebook(const arma::cx_vec &u, arma::uword count,
                                     std::uint64_t seed) {
    double best = -1.0;
    arma::uword best_i = 0;
    for (arma::uword i = 0; i < count; ++i) {
        const arma::cx_vec c = rvq_codeword(u.n_elem, seed, i);
        const double score = std::norm(arma::cdot(u, c));
        if (score > best) {
            best = score;
            best_i = i;
        }
    }
    arma::cx_vec c = rvq_codeword(u.n_elem, seed, best_i);
    const std::complex<double> ip = arma::cdot(u, c); // u^H c
    c *= std::exp(std::complex<double>(0.0, -std::arg(ip)));
    return {c, std::max(0.0, 1.0 - best)};
}

// Exact-law surrogate: chordal^2 is the minimum of L iid Beta(n-1, 1) draws,
// sampled by CDF inversion; the error direction is uniform on the sphere
// orthogonal to u.
ColumnQuant quantize_column_virtual(const arma::cx_vec &u, double bits, std::uint64_t seed) {
    const arma::uword n = u.n_elem;
    SplitMix64 g(derive_stream(seed, 0x76697274ULL));
    if (n == 1)
        return {u, 0.0};
    const double v = g.next_double();
    double d2;
    if (bits > 500.0) {
        // Weibull limit of the minimum; exp2(bits) would overflow past 2^1024
        const double a = -std::log1p(-v); // Exp(1)
        d2 = std::exp((std::log(a) - bits * std::log(2.0)) / static_cast<double>(n - 1));
    } else {
        const double L = std::exp2(bits);
        const double inner = -std::expm1(std::log1p(-v) / L); // 1 - (1-v)^(1/L)
        d2 = std::pow(inner, 1.0 / static_cast<double>(n - 1));
    }

    arma::cx_vec w(n);
    double nrm = 0.0;
    do {
        for (arma::uword i = 0; i < n; ++i)
            w(i) = g.next_cn();
        w -= u * arma::cdot(u, w);
        nrm = arma::norm(w);
    } while (nrm < 1e-12);
    w /= nrm;
    return {std::sqrt(1.0 - d2) * u + std::sqrt(d2) * w, d2};
}

// Sequential projection + normalization, leftmost columns first. One
// re-orthogonalization pass keeps unitarity at the 1e-14 level.
void reorthonormalize(arma::cx_mat &m) {
    for (arma::uword k = 0; k < m.n_cols; ++k) {
        arma::cx_vec v = m.col(k);
        for (int pass = 0; pass < 2; ++pass)
            for (arma::uword j = 0; j < k; ++j)
                v -= m.col(j) * arma::cdot(m.col(j), v);
        const double nrm = arma::norm(v);
        if (nrm < 1e-12)
            throw validation_error("quantize_basis: rank collapse during re-orthonormalization");
        m.col(k) = v / nrm;
    }
}

struct FactorQuant {
    arma::cx_mat matrix;
    arma::vec chordal_sq;
};

FactorQuant quantize_factor(const arma::cx_mat &u, arma::uword p, double bits,
                            std::uint64_t seed, RvqMode mode,
                            const std::vector<arma::cx_mat> *injected,
                            arma::uword injected_offset) {
    if (p > u.n_cols)
        throw validation_error("quantize_basis: more quantized columns than basis columns");
    FactorQuant out{u, arma::vec(p, arma::fill::zeros)};
    if (p == 0)
        return out;

    RvqMode eff = mode;
    arma::uword codebook_size = 0;
    if (injected == nullptr) {
        if (bits < 0.0)
            throw validation_error("quantize_basis: negative bits per column");
        const bool oversized = bits > static_cast<double>(max_rvq_bits);
        if (mode == RvqMode::codebook && oversized)
            throw capacity_error("quantize_basis: codebook would exceed the 2^24 guard");
        if (mode == RvqMode::auto_select)
            eff = oversized ? RvqMode::virtual_law : RvqMode::codebook;
        if (eff == RvqMode::codebook)
            codebook_size = static_cast<arma::uword>(
                std::max<long long>(1, std::llround(std::exp2(bits))));
    }

    for (arma::uword m = 0; m < p; ++m) {
        const arma::cx_vec col = u.col(m);
        ColumnQuant q;
        if (injected != nullptr) {
            const arma::cx_mat &cb = (*injected)[injected_offset + m];
            auto [idx, d2] = rvq_quantize(col, cb);
            arma::cx_vec c = cb.col(idx);
            c *= std::exp(std::complex<double>(0.0, -std::arg(arma::cdot(col, c))));
            q = {c, d2};
        } else if (eff == RvqMode::virtual_law) {
            q = quantize_column_virtual(col, bits, derive_stream(seed, m));
        } else {
            q = quantize_column_codebook(col, codebook_size, derive_stream(seed, m));
        }
        out.matrix.col(m) = q.column;
        out.chordal_sq(m) = q.chordal_sq;
    }
    reorthonormalize(out.matrix);
    return out;
}

QuantizedBasis compose(const FactorQuant &fs, const arma::vec &ls, const FactorQuant &ff,
                       const arma::vec &lf, double bits) {
    QuantizedBasis out;
    const auto order = channel::kron_spectrum_order(ls, lf);
    const arma::uword n = fs.matrix.n_rows * ff.matrix.n_rows;
    out.matrix.set_size(n, n);
    for (arma::uword k = 0; k < n; ++k) {
        const auto [i, j] = order[k];
        out.matrix.col(k) = arma::kron(fs.matrix.col(i), ff.matrix.col(j));
    }
    out.p = fs.chordal_sq.n_elem + ff.chordal_sq.n_elem;
    out.bits_per_column = bits;
    out.column_chordal_sq = arma::join_cols(fs.chordal_sq, ff.chordal_sq);
    return out;
}

} // namespace

arma::cx_mat rvq_codebook(arma::uword n, arma::uword bits, std::uint64_t seed) {
    if (n == 0)
        throw validation_error("rvq_codebook: dimension must be positive");
    if (bits > max_rvq_bits)
        throw capacity_error("rvq_codebook: bits exceed the 2^24 codebook guard");
    const arma::uword count = arma::uword(1) << bits;
    arma::cx_mat cb(n, count);
    for (arma::uword i = 0; i < count; ++i)
        cb.col(i) = rvq_codeword(n, seed, i);
    return cb;
}

double rvq_chordal_streamed(const arma::cx_vec &u, double bits, std::uint64_t seed) {
    if (bits < 0.0)
        throw validation_error("rvq_chordal_streamed: negative bits");
    const auto count =
        static_cast<arma::uword>(std::max<long long>(1, std::llround(std::exp2(bits))));
    return quantize_column_codebook(u, count, seed).chordal_sq;
}

std::pair<arma::uword, double> rvq_quantize(const arma::cx_vec &u, const arma::cx_mat &codebook) {
    if (codebook.n_cols == 0)
        throw validation_error("rvq_quantize: empty codebook");
    if (codebook.n_rows != u.n_elem)
        throw validation_error("rvq_quantize: dimension mismatch");
    if (std::abs(arma::norm(u) - 1.0) > 1e-6)
        throw validation_error("rvq_quantize: input must be unit norm");
    double best = -1.0;
    arma::uword best_i = 0;
    for (arma::uword i = 0; i < codebook.n_cols; ++i) {
        const double score = std::norm(arma::cdot(u, codebook.col(i)));
        if (score > best) {
            best = score;
            best_i = i;
        }
    }
    return {best_i, std::max(0.0, 1.0 - best)};
}

QuantizedBasis quantize_basis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                              const arma::vec &lf, arma::uword p_s, arma::uword p_f,
                              double bits_per_column, std::uint64_t seed, RvqMode mode) {
    const FactorQuant fs =
        quantize_factor(us, p_s, bits_per_column, derive_stream(seed, 1), mode, nullptr, 0);
    const FactorQuant ff =
        quantize_factor(uf, p_f, bits_per_column, derive_stream(seed, 2), mode, nullptr, 0);
    return compose(fs, ls, ff, lf, bits_per_column);
}

void write_codebook(const arma::cx_mat &codebook, const std::string &path) {
    if (codebook.n_elem == 0)
        throw validation_error("write_codebook: empty codebook");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("write_codebook: cannot open " + path);
    const auto dim = static_cast<std::uint32_t>(codebook.n_rows);
    const auto count = static_cast<std::uint32_t>(codebook.n_cols);
    out.write(reinterpret_cast<const char *>(&dim), 4);
    out.write(reinterpret_cast<const char *>(&count), 4);
    for (arma::uword i = 0; i < codebook.n_cols; ++i)
        for (arma::uword k = 0; k < codebook.n_rows; ++k) {
            const double re = codebook(k, i).real();
            const double im = codebook(k, i).imag();
            out.write(reinterpret_cast<const char *>(&re), 8);
            out.write(reinterpret_cast<const char *>(&im), 8);
        }
    if (!out)
        throw io_error("write_codebook: write failed for " + path);
}

arma::cx_mat read_codebook(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("read_codebook: cannot open " + path);
    std::uint32_t dim = 0, count = 0;
    in.read(reinterpret_cast<char *>(&dim), 4);
    in.read(reinterpret_cast<char *>(&count), 4);
    if (!in || dim == 0 || count == 0)
        throw io_error("read_codebook: bad header in " + path);
    arma::cx_mat cb(dim, count);
    for (std::uint32_t i = 0; i < count; ++i)
        for (std::uint32_t k = 0; k < dim; ++k) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char *>(&re), 8);
            in.read(reinterpret_cast<char *>(&im), 8);
            cb(k, i) = {re, im};
        }
    if (!in)
        throw io_error("read_codebook: truncated payload in " + path);
    char extra;
    if (in.read(&extra, 1))
        throw io_error("read_codebook: trailing bytes in " + path);
    return cb;
}

QuantizedBasis quantize_basis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                              const arma::vec &lf, arma::uword p_s, arma::uword p_f,
                              const std::vector<arma::cx_mat> &codebooks) {
    if (codebooks.size() != p_s + p_f)
        throw validation_error("quantize_basis: need one codebook per quantized column");
    const FactorQuant fs = quantize_factor(us, p_s, 0.0, 0, RvqMode::codebook, &codebooks, 0);
    const FactorQuant ff = quantize_factor(uf, p_f, 0.0, 0, RvqMode::codebook, &codebooks, p_s);
    double bits = 0.0;
    if (!codebooks.empty())
        bits = std::log2(static_cast<double>(codebooks.front().n_cols));
    return compose(fs, ls, ff, lf, bits);
}

} // namespace rstc::quantizers
