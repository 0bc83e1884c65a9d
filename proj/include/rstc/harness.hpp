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
#include "rstc/mismatch.hpp"
#include "rstc/quantizers.hpp"
#include "rstc/ratesplit.hpp"

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rstc::harness {

enum class BasisFeedback { perfect, quantized };
enum class OutputFormat { csv, jsonl };

/// One experiment description. Every key of the flat key=value config file
/// maps to one field here and can be overridden by a CLI flag of the same
/// name.
struct ExperimentConfig {
    arma::uword nt = 8, nc = 8;       // antennas, subcarriers
    double rho_s = 0.8, rho_f = 0.8;  // exponential correlation coefficients
    arma::uword tau = 10000;          // coherence block length, realizations
    arma::uword p_s = 1, p_f = 1;     // quantized dominant columns per factor
    std::string c_n = "default";      // "default" ((N-1)/N), "estimate", or a number
    quantizers::ScalarKind quantizer = quantizers::ScalarKind::uniform_dithered;
    BasisFeedback basis = BasisFeedback::quantized;
    quantizers::RvqMode rvq = quantizers::RvqMode::auto_select;
    std::vector<double> rates = {0.2, 0.4, 0.6, 0.8, 1.0};
    arma::uword trials = 10000;
    std::uint64_t seed = 1;
    std::string channel = "synthetic"; // or path to a channel dump
    double b_update = 0.0;             // update overhead, bits per block
    bool truncate_beyond_p = false;    // zero coefficients beyond p at the encoder

    arma::uword dim() const { return nt * nc; }
};

/// Parse `key = value` lines ('#' comments, blank lines allowed).
std::map<std::string, std::string> load_config_file(const std::string &path);

/// Build a config from key/value pairs; unknown keys or bad values throw.
ExperimentConfig parse_config(const std::map<std::string, std::string> &kv);

/// One row of the R-D table.
struct ResultRecord {
    double r_total = 0.0, r_eff = 0.0, r_q = 0.0, r_0 = 0.0;
    bool active = false;
    double dq_analytic = 0.0, d0_analytic = 0.0, e2e_analytic = 0.0;
    bool has_empirical = false;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, e2e = 0.0;
    arma::uword trials = 0;
    double wall_time_s = 0.0;
};

/// Analytic-only pass: optimal split, threshold handling and model values
/// per rate point.
std::vector<ResultRecord> run_plan(const ExperimentConfig &cfg);

/// Phase-transition threshold of the configured experiment. r_th is
/// rate_sentinel when basis feedback never pays off (p = 0 or perfect basis).
ratesplit::Threshold plan_threshold(const ExperimentConfig &cfg);

/// Full Monte Carlo R-D sweep: per rate point, optimal split, analytic model
/// values, then encode/decode of `trials` realizations with one basis
/// quantization per block of tau realizations.
std::vector<ResultRecord> run_rd_sweep(const ExperimentConfig &cfg);

/// Channel dump format: magic "CSID", version byte 0x01, little-endian
/// uint32 count and dim, then count*dim interleaved (re, im) float32 values,
/// one realization after another.
channel::ChannelBatch ingest_channels(const std::string &path);
void write_channels(const channel::ChannelBatch &batch, const std::string &path);

/// (1/count) * sum h h^H. Hermitian PSD by construction.
arma::cx_mat sample_covariance(const channel::ChannelBatch &batch);

struct ComplexityReport {
    std::uint64_t parameters = 0; // complex entries of Us and Uf
    std::uint64_t flops = 0;      // 2 * CMACs of the two factor products
};

/// Storage and per-block transform cost of the separable scheme.
ComplexityReport structured_complexity(arma::uword nt, arma::uword nc);

void emit_results(const std::vector<ResultRecord> &records, std::ostream &os, OutputFormat fmt);
void emit_results(const std::vector<ResultRecord> &records, const std::string &path,
                  OutputFormat fmt);

} // namespace rstc::harness
