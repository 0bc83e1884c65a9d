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

#include "rstc/harness.hpp"

#include "rstc/errors.hpp"
#include "rstc/rng.hpp"
#include "rstc/rwf.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rstc::harness {

namespace {

constexpr char dump_magic[4] = {'C', 'S', 'I', 'D'};
constexpr std::uint8_t dump_version = 0x01;

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception &) {
        throw validation_error("config: bad numeric value for '" + key + "': " + value);
    }
}

arma::uword parse_uword(const std::string &key, const std::string &value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != std::floor(v))
        throw validation_error("config: '" + key + "' must be a nonnegative integer");
    return static_cast<arma::uword>(v);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

std::map<std::string, std::string> load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("config: missing '=' at " + path + ":" + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw io_error("config: empty key at " + path + ":" + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

ExperimentConfig parse_config(const std::map<std::string, std::string> &kv) {
    ExperimentConfig cfg;
    for (const auto &[key, value] : kv) {
        if (key == "nt")
            cfg.nt = parse_uword(key, value);
        else if (key == "nc")
            cfg.nc = parse_uword(key, value);
        else if (key == "rho_s")
            cfg.rho_s = parse_double(key, value);
        else if (key == "rho_f")
            cfg.rho_f = parse_double(key, value);
        else if (key == "tau")
            cfg.tau = parse_uword(key, value);
        else if (key == "p_s")
            cfg.p_s = parse_uword(key, value);
        else if (key == "p_f")
            cfg.p_f = parse_uword(key, value);
        else if (key == "c_n") {
            if (value != "default" && value != "estimate")
                parse_double(key, value); // must at least parse
            cfg.c_n = value;
        } else if (key == "quantizer") {
            if (value == "dithered")
                cfg.quantizer = quantizers::ScalarKind::uniform_dithered;
            else if (value == "lloyd_max")
                cfg.quantizer = quantizers::ScalarKind::lloyd_max_fixed_rate;
            else
                throw validation_error("config: quantizer must be 'dithered' or 'lloyd_max'");
        } else if (key == "basis") {
            if (value == "perfect")
                cfg.basis = BasisFeedback::perfect;
            else if (value == "quantized")
                cfg.basis = BasisFeedback::quantized;
            else
                throw validation_error("config: basis must be 'perfect' or 'quantized'");
        } else if (key == "rvq") {
            if (value == "auto")
                cfg.rvq = quantizers::RvqMode::auto_select;
            else if (value == "codebook")
                cfg.rvq = quantizers::RvqMode::codebook;
            else if (value == "virtual")
                cfg.rvq = quantizers::RvqMode::virtual_law;
            else
                throw validation_error("config: rvq must be 'auto', 'codebook' or 'virtual'");
        } else if (key == "rates") {
            cfg.rates.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                cfg.rates.push_back(parse_double(key, trim(tok)));
        } else if (key == "trials")
            cfg.trials = parse_uword(key, value);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "channel")
            cfg.channel = value;
        else if (key == "b_update")
            cfg.b_update = parse_double(key, value);
        else if (key == "truncate_beyond_p") {
            if (value == "true" || value == "1")
                cfg.truncate_beyond_p = true;
            else if (value == "false" || value == "0")
                cfg.truncate_beyond_p = false;
            else
                throw validation_error("config: truncate_beyond_p must be true or false");
        } else
            throw validation_error("config: unknown key '" + key + "'");
    }

    if (cfg.nt == 0 || cfg.nc == 0)
        throw validation_error("config: nt and nc must be positive");
    if (cfg.tau == 0)
        throw validation_error("config: tau must be positive");
    if (cfg.rates.empty())
        throw validation_error("config: rate grid is empty");
    for (std::size_t i = 0; i + 1 < cfg.rates.size(); ++i)
        if (cfg.rates[i] > cfg.rates[i + 1])
            throw validation_error("config: rate grid must be sorted ascending");
    for (double r : cfg.rates)
        if (r < 0.0)
            throw validation_error("config: rates must be nonnegative");
    if (cfg.b_update < 0.0)
        throw validation_error("config: b_update must be nonnegative");
    return cfg;
}

// ---------------------------------------------------------------------------
// Channel dump I/O
// ---------------------------------------------------------------------------

channel::ChannelBatch ingest_channels(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("ingest: cannot open " + path);

    char magic[4];
    std::uint8_t version = 0;
    std::uint32_t count = 0, dim = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char *>(&version), 1);
    in.read(reinterpret_cast<char *>(&count), 4);
    in.read(reinterpret_cast<char *>(&dim), 4);
    if (!in)
        throw io_error("ingest: truncated header in " + path);
    if (std::memcmp(magic, dump_magic, 4) != 0)
        throw io_error("ingest: bad magic in " + path);
    if (version != dump_version)
        throw io_error("ingest: unsupported version " + std::to_string(version) + " in " + path);
    if (count == 0 || dim == 0)
        throw io_error("ingest: empty batch in " + path);

    const std::size_t values = 2ull * count * dim;
    std::vector<float> payload(values);
    in.read(reinterpret_cast<char *>(payload.data()),
            static_cast<std::streamsize>(values * sizeof(float)));
    if (!in || static_cast<std::size_t>(in.gcount()) != values * sizeof(float))
        throw io_error("ingest: truncated payload in " + path);
    char extra;
    if (in.read(&extra, 1))
        throw io_error("ingest: trailing bytes in " + path);

    channel::ChannelBatch batch;
    batch.realizations.set_size(dim, count);
    std::size_t k = 0;
    for (std::uint32_t t = 0; t < count; ++t)
        for (std::uint32_t m = 0; m < dim; ++m) {
            const float re = payload[k++];
            const float im = payload[k++];
            if (!std::isfinite(re) || !std::isfinite(im))
                throw io_error("ingest: non-finite entry in " + path);
            batch.realizations(m, t) = std::complex<double>(re, im);
        }
    return batch;
}

void write_channels(const channel::ChannelBatch &batch, const std::string &path) {
    if (batch.count() == 0)
        throw validation_error("write_channels: empty batch");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("write_channels: cannot open " + path);
    out.write(dump_magic, 4);
    out.put(static_cast<char>(dump_version));
    const auto count = static_cast<std::uint32_t>(batch.count());
    const auto dim = static_cast<std::uint32_t>(batch.dim());
    out.write(reinterpret_cast<const char *>(&count), 4);
    out.write(reinterpret_cast<const char *>(&dim), 4);
    for (std::uint32_t t = 0; t < count; ++t)
        for (std::uint32_t m = 0; m < dim; ++m) {
            const auto re = static_cast<float>(batch.realizations(m, t).real());
            const auto im = static_cast<float>(batch.realizations(m, t).imag());
            out.write(reinterpret_cast<const char *>(&re), 4);
            out.write(reinterpret_cast<const char *>(&im), 4);
        }
    if (!out)
        throw io_error("write_channels: write failed for " + path);
}

arma::cx_mat sample_covariance(const channel::ChannelBatch &batch) {
    if (batch.count() == 0)
        throw validation_error("sample_covariance: empty batch");
    if (batch.count() < 2)
        throw validation_error("sample_covariance: need at least two realizations");
    arma::cx_mat r(batch.dim(), batch.dim(), arma::fill::zeros);
    for (arma::uword t = 0; t < batch.count(); ++t)
        r += batch.realizations.col(t) * batch.realizations.col(t).t();
    r /= static_cast<double>(batch.count());
    return 0.5 * (r + r.t());
}

ComplexityReport structured_complexity(arma::uword nt, arma::uword nc) {
    if (nt == 0 || nc == 0)
        throw validation_error("structured_complexity: dimensions must be positive");
    ComplexityReport rep;
    rep.parameters = static_cast<std::uint64_t>(nt) * nt + static_cast<std::uint64_t>(nc) * nc;
    // applying (Us kron Uf)^H as two factor-wise products: nt*nc*(nt+nc) CMACs
    rep.flops = 2ull * nt * nc * (static_cast<std::uint64_t>(nt) + nc);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace {

struct Workspace {
    bool separable = false;      // factor structure available
    arma::cx_mat us, uf;         // factor bases (separable path)
    arma::vec ls, lf;            // factor spectra
    channel::EigPair eig;        // effective basis and spectrum
    bool have_ingested = false;
    channel::ChannelBatch ingested;
    double c_n = 0.0;
    mismatch::MismatchModel model;
};

Workspace prepare(const ExperimentConfig &cfg) {
    Workspace ws;
    if (cfg.channel == "synthetic") {
        ws.separable = true;
        const auto es = channel::eig_hermitian(channel::exp_correlation(cfg.nt, cfg.rho_s));
        const auto ef = channel::eig_hermitian(channel::exp_correlation(cfg.nc, cfg.rho_f));
        ws.us = es.basis;
        ws.ls = es.spectrum;
        ws.uf = ef.basis;
        ws.lf = ef.spectrum;
        ws.eig = channel::kron_eigenbasis(ws.us, ws.ls, ws.uf, ws.lf);
    } else {
        ws.have_ingested = true;
        ws.ingested = ingest_channels(cfg.channel);
        ws.eig = channel::eig_hermitian(sample_covariance(ws.ingested));
    }

    const arma::uword n = ws.eig.spectrum.n_elem;
    const arma::uword p = cfg.basis == BasisFeedback::perfect ? 0 : cfg.p_s + cfg.p_f;
    if (p > n)
        throw validation_error("harness: p_s + p_f exceeds the channel dimension");
    if (cfg.c_n == "default")
        ws.c_n = n > 1 ? static_cast<double>(n - 1) / static_cast<double>(n) : 1.0;
    else if (cfg.c_n == "estimate")
        ws.c_n = mismatch::estimate_cn(n, {4, 6, 8, 10}, 4000, derive_stream(cfg.seed, 0xC0))
                     .c_n;
    else
        ws.c_n = parse_double("c_n", cfg.c_n);
    ws.model = mismatch::make_model(n, cfg.tau, p, ws.c_n);
    return ws;
}

ResultRecord plan_point(const ExperimentConfig &cfg, const Workspace &ws, double r_total) {
    ResultRecord rec;
    rec.r_total = r_total;
    rec.r_eff = ratesplit::effective_rate(r_total, cfg.b_update, ws.eig.spectrum.n_elem, cfg.tau);
    const ratesplit::RateSplit split = ratesplit::optimal_split(ws.eig.spectrum, ws.model, rec.r_eff);
    rec.r_q = split.r_q;
    rec.r_0 = split.r_0;
    rec.active = split.active;
    rec.dq_analytic = rwf::dq(ws.eig.spectrum, split.r_q);
    rec.d0_analytic = mismatch::d0_model(ws.eig.spectrum, ws.model, split.r_0);
    rec.e2e_analytic = rec.dq_analytic + rec.d0_analytic;
    return rec;
}

void simulate_point(const ExperimentConfig &cfg, const Workspace &ws, arma::uword point,
                    ResultRecord &rec) {
    const arma::vec &l = ws.eig.spectrum;
    const arma::cx_mat &u = ws.eig.basis;
    const arma::uword n = l.n_elem;

    channel::ChannelBatch batch;
    if (ws.have_ingested) {
        if (ws.ingested.count() < cfg.trials)
            throw validation_error("harness: dump holds " + std::to_string(ws.ingested.count()) +
                                   " realizations but trials=" + std::to_string(cfg.trials));
        batch.realizations = ws.ingested.realizations.cols(0, cfg.trials - 1);
    } else {
        batch = channel::sample_channels(u, l, cfg.trials, derive_stream(cfg.seed, 17, point));
    }

    const arma::cx_mat coeffs = u.t() * batch.realizations;
    const rwf::BitAllocation alloc = rwf::water_level(l, rec.r_q);
    quantizers::CoeffQuantConfig qcfg;
    qcfg.kind = cfg.quantizer;
    quantizers::QuantizedCoefficients qc =
        quantizers::quantize_coeffs(coeffs, l, alloc, qcfg, derive_stream(cfg.seed, 23, point));
    if (cfg.truncate_beyond_p && ws.model.p > 0 && ws.model.p < n)
        qc.reconstruction.rows(ws.model.p, n - 1).zeros();

    const bool quantize = cfg.basis == BasisFeedback::quantized && ws.model.p > 0 && rec.r_0 > 0.0;
    mismatch::DistortionReport total;
    if (!quantize) {
        total = mismatch::decompose_distortion(batch, u, u, qc.reconstruction);
    } else {
        const double bits_per_column = rec.r_0 * static_cast<double>(n) *
                                       static_cast<double>(cfg.tau) /
                                       static_cast<double>(ws.model.p);
        const arma::uword blocks = (cfg.trials + cfg.tau - 1) / cfg.tau;
        double t1 = 0, t2 = 0, t3 = 0, e2e = 0;
        for (arma::uword b = 0; b < blocks; ++b) {
            const arma::uword first = b * cfg.tau;
            const arma::uword last = std::min<arma::uword>(cfg.trials, first + cfg.tau) - 1;
            quantizers::QuantizedBasis qb;
            if (ws.separable)
                qb = quantizers::quantize_basis(ws.us, ws.ls, ws.uf, ws.lf, cfg.p_s, cfg.p_f,
                                                bits_per_column,
                                                derive_stream(cfg.seed, 31, point, b), cfg.rvq);
            else
                qb = quantizers::quantize_basis(u, l, arma::cx_mat(1, 1, arma::fill::ones),
                                                arma::vec{1.0}, cfg.p_s + cfg.p_f, 0,
                                                bits_per_column,
                                                derive_stream(cfg.seed, 31, point, b), cfg.rvq);
            channel::ChannelBatch slice;
            slice.realizations = batch.realizations.cols(first, last);
            const auto rep = mismatch::decompose_distortion(slice, u, qb.matrix,
                                                            qc.reconstruction.cols(first, last));
            const auto w = static_cast<double>(last - first + 1);
            t1 += rep.empirical_t1 * w;
            t2 += rep.empirical_t2 * w;
            t3 += rep.empirical_t3 * w;
            e2e += rep.empirical_e2e * w;
        }
        const auto w = static_cast<double>(cfg.trials);
        total.empirical_t1 = t1 / w;
        total.empirical_t2 = t2 / w;
        total.empirical_t3 = t3 / w;
        total.empirical_e2e = e2e / w;
        total.trials = cfg.trials;
    }

    rec.has_empirical = true;
    rec.t1 = total.empirical_t1;
    rec.t2 = total.empirical_t2;
    rec.t3 = total.empirical_t3;
    rec.e2e = total.empirical_e2e;
    rec.trials = cfg.trials;
}

} // namespace

std::vector<ResultRecord> run_plan(const ExperimentConfig &cfg) {
    const Workspace ws = prepare(cfg);
    std::vector<ResultRecord> records;
    records.reserve(cfg.rates.size());
    for (double r : cfg.rates) {
        const auto start = std::chrono::steady_clock::now();
        ResultRecord rec = plan_point(cfg, ws, r);
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records.push_back(rec);
    }
    return records;
}

ratesplit::Threshold plan_threshold(const ExperimentConfig &cfg) {
    const Workspace ws = prepare(cfg);
    return ratesplit::phase_threshold(ws.eig.spectrum, ws.model);
}

std::vector<ResultRecord> run_rd_sweep(const ExperimentConfig &cfg) {
    if (cfg.trials == 0)
        throw validation_error("run_rd_sweep: trials must be positive");
    const Workspace ws = prepare(cfg);
    std::vector<ResultRecord> records;
    records.reserve(cfg.rates.size());
    for (arma::uword i = 0; i < cfg.rates.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        ResultRecord rec = plan_point(cfg, ws, cfg.rates[i]);
        simulate_point(cfg, ws, i, rec);
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records.push_back(rec);
    }
    return records;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

void emit_results(const std::vector<ResultRecord> &records, std::ostream &os, OutputFormat fmt) {
    if (records.empty())
        throw validation_error("emit_results: no records");
    if (fmt == OutputFormat::csv) {
        os << "r_total,r_eff,r_q,r_0,regime,dq_analytic,d0_analytic,e2e_analytic,"
              "t1_empirical,t2_empirical,t3_empirical,e2e_empirical,trials,wall_time_s\n";
        for (const auto &r : records) {
            os << format_double(r.r_total) << ',' << format_double(r.r_eff) << ','
               << format_double(r.r_q) << ',' << format_double(r.r_0) << ','
               << (r.active ? "active" : "inactive") << ',' << format_double(r.dq_analytic) << ','
               << format_double(r.d0_analytic) << ',' << format_double(r.e2e_analytic) << ',';
            if (r.has_empirical)
                os << format_double(r.t1) << ',' << format_double(r.t2) << ','
                   << format_double(r.t3) << ',' << format_double(r.e2e) << ',' << r.trials;
            else
                os << ",,,,";
            os << ',' << format_double(r.wall_time_s) << '\n';
        }
    } else {
        for (const auto &r : records) {
            nlohmann::json j;
            j["r_total"] = r.r_total;
            j["r_eff"] = r.r_eff;
            j["r_q"] = r.r_q;
            j["r_0"] = r.r_0;
            j["regime"] = r.active ? "active" : "inactive";
            j["dq_analytic"] = r.dq_analytic;
            j["d0_analytic"] = r.d0_analytic;
            j["e2e_analytic"] = r.e2e_analytic;
            if (r.has_empirical) {
                j["t1_empirical"] = r.t1;
                j["t2_empirical"] = r.t2;
                j["t3_empirical"] = r.t3;
                j["e2e_empirical"] = r.e2e;
                j["trials"] = r.trials;
            }
            j["wall_time_s"] = r.wall_time_s;
            os << j.dump() << '\n';
        }
    }
    if (!os)
        throw io_error("emit_results: stream write failed");
}

void emit_results(const std::vector<ResultRecord> &records, const std::string &path,
                  OutputFormat fmt) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw io_error("emit_results: cannot open " + path);
    emit_results(records, out, fmt);
    if (!out)
        throw io_error("emit_results: write failed for " + path);
}

} // namespace rstc::harness
