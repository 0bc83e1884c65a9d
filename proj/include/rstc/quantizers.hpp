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

#include "rstc/rwf.hpp"

#include <armadillo>
#include <cstdint>
#include <vector>

namespace rstc::quantizers {

inline constexpr arma::uword max_lloyd_levels = 1u << 16;
inline constexpr arma::uword max_rvq_bits = 24; // materialized codebook guard

// ---------------------------------------------------------------------------
// Scalar quantization
// ---------------------------------------------------------------------------

enum class ScalarKind { lloyd_max_fixed_rate, uniform_dithered };

/// Fixed-rate scalar quantizer designed for the unit-variance real Gaussian.
struct ScalarQuantizer {
    ScalarKind kind = ScalarKind::lloyd_max_fixed_rate;
    arma::vec codebook;   // L reconstruction points, increasing
    arma::vec thresholds; // L-1 decision boundaries, strictly increasing
    double step = 0.0;    // uniform_dithered mode only
    double mse = 0.0;     // design MSE on the unit Gaussian

    arma::uword levels() const { return codebook.n_elem; }
    arma::uword quantize_index(double x) const;
};

/// Lloyd fixed point for the unit Gaussian; stops when no codepoint moves by
/// more than 1e-10. levels = 1 degenerates to the single codepoint 0.
ScalarQuantizer lloyd_max_design(arma::uword levels);

/// Empirical entropy (bits/symbol) of an index sequence.
double empirical_entropy(const arma::ivec &indices);

/// Empirical entropy of indices conditioned on the quantile bin of the shared
/// dither: the rate of an entropy coder that, like the decoder, knows the
/// dither. `dither_unit` holds the uniform(0,1] draws behind the dither.
double conditional_entropy(const arma::ivec &indices, const arma::vec &dither_unit,
                           arma::uword bins);

// ---------------------------------------------------------------------------
// Coefficient chain
// ---------------------------------------------------------------------------

struct CoeffQuantConfig {
    ScalarKind kind = ScalarKind::uniform_dithered;
    arma::uword dither_bins = 16;     // conditional-entropy estimate
    double entropy_tol_bits = 1e-3;   // per-component step matching tolerance
    bool wiener_scaling = true;       // MMSE gain on the dithered reconstruction
};

/// Quantized KLT coefficients for a whole batch. Column t is realization t;
/// inactive modes carry no indices and reconstruct to zero.
struct QuantizedCoefficients {
    arma::cx_mat reconstruction; // N x count
    arma::imat index_re, index_im;
    arma::mat dither_re, dither_im; // actual dither values; empty in Lloyd mode
    arma::vec step;                 // per-mode step in the unit-variance domain
    arma::vec wiener_gain;          // per-mode MMSE gain (1 when not applied)
    arma::vec entropy_bits;         // measured bits per complex dimension per mode

    /// Measured coefficient rate, bits per complex dimension averaged over N.
    double coefficient_rate() const {
        return arma::accu(entropy_bits) / static_cast<double>(entropy_bits.n_elem);
    }
};

/// Quantize KLT-domain coefficients under a reverse water-filling allocation.
/// Each active complex coefficient is scaled to unit per-component variance
/// (divide by sqrt(lambda_m / 2)), quantized per real component, and rescaled.
/// Dithered mode adds subtractive dither uniform on (-step/2, step/2] derived
/// from (seed, realization, mode), subtracts it after reconstruction, and
/// picks the step by matching the measured conditional index entropy to the
/// allocated rate. Fixed-rate mode uses round(2^(b/2)) Lloyd-Max levels per
/// component.
QuantizedCoefficients quantize_coeffs(const arma::cx_mat &coeffs, const arma::vec &l,
                                      const rwf::BitAllocation &alloc,
                                      const CoeffQuantConfig &cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Grassmannian basis quantization
// ---------------------------------------------------------------------------

/// How a column is matched against the random codebook.
enum class RvqMode {
    codebook,    // materialize/stream round(2^B) codewords; B <= max_rvq_bits
    virtual_law, // draw the chordal error from the exact min-of-2^B law
    auto_select  // codebook when feasible, virtual beyond the guard
};

/// Materialized RVQ codebook: 2^bits iid uniform unit vectors in C^n, one per
/// column. Codeword i comes from the derived stream (seed, i), so the
/// streaming search in quantize_basis sees identical codewords.
arma::cx_mat rvq_codebook(arma::uword n, arma::uword bits, std::uint64_t seed);

/// Nearest codeword by |u^H c|^2; returns (index, squared chordal distance).
std::pair<arma::uword, double> rvq_quantize(const arma::cx_vec &u, const arma::cx_mat &codebook);

/// Streamed RVQ against round(2^bits) codewords from the derived streams
/// (seed, i), without materializing the codebook. Returns chordal^2 of the
/// winner. Agrees with rvq_quantize on rvq_codebook(n, bits, seed).
double rvq_chordal_streamed(const arma::cx_vec &u, double bits, std::uint64_t seed);

/// Flat binary codebook files: little-endian uint32 dim and count, then
/// interleaved (re, im) float64 entries, one codeword after another.
void write_codebook(const arma::cx_mat &codebook, const std::string &path);
arma::cx_mat read_codebook(const std::string &path);

/// Quantized and re-orthonormalized basis (possibly Kronecker-composed).
struct QuantizedBasis {
    arma::cx_mat matrix;         // unitary effective basis
    arma::uword p = 0;           // quantized dominant columns (both factors)
    double bits_per_column = 0.0;
    arma::vec column_chordal_sq; // pre-orthonormalization, spatial factor first
};

/// Quantize the p_s / p_f dominant columns of Us / Uf with B bits each
/// (spec'd per column; real-valued B allowed), phase-align, copy the
/// remaining columns, re-orthonormalize quantized-first in descending
/// eigenvalue order, and compose kron(Us_hat, Uf_hat) with the same column
/// permutation as kron_eigenbasis. Pass a 1x1 identity factor for a
/// single-basis quantization.
QuantizedBasis quantize_basis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                              const arma::vec &lf, arma::uword p_s, arma::uword p_f,
                              double bits_per_column, std::uint64_t seed,
                              RvqMode mode = RvqMode::auto_select);

/// Test hook: same pipeline with explicit per-column codebooks
/// (spatial columns first, then frequency columns).
QuantizedBasis quantize_basis(const arma::cx_mat &us, const arma::vec &ls, const arma::cx_mat &uf,
                              const arma::vec &lf, arma::uword p_s, arma::uword p_f,
                              const std::vector<arma::cx_mat> &codebooks);

} // namespace rstc::quantizers
