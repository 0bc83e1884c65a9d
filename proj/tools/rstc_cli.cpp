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

#include "rstc/errors.hpp"
#include "rstc/harness.hpp"
#include "rstc/mismatch.hpp"
#include "rstc/ratesplit.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::map<std::string, std::string> overrides;
};

// register one --key option that lands in the override map when given
void add_override(CLI::App *cmd, CommonOpts &opts, const std::string &key,
                  const std::string &desc) {
    cmd->add_option_function<std::string>(
        "--" + key, [&opts, key](const std::string &v) { opts.overrides[key] = v; }, desc);
}

void add_config_options(CLI::App *cmd, CommonOpts &opts) {
    cmd->add_option("--config", opts.config_path, "flat key=value config file");
    cmd->add_option("--out", opts.out_path, "result file (stdout when omitted)");
    cmd->add_option("--format", opts.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    add_override(cmd, opts, "nt", "antenna count");
    add_override(cmd, opts, "nc", "subcarrier count");
    add_override(cmd, opts, "rho_s", "spatial correlation coefficient");
    add_override(cmd, opts, "rho_f", "frequency correlation coefficient");
    add_override(cmd, opts, "tau", "coherence block length (realizations)");
    add_override(cmd, opts, "p_s", "quantized dominant columns, spatial factor");
    add_override(cmd, opts, "p_f", "quantized dominant columns, frequency factor");
    add_override(cmd, opts, "c_n", "RVQ constant: number, 'default' or 'estimate'");
    add_override(cmd, opts, "quantizer", "dithered or lloyd_max");
    add_override(cmd, opts, "basis", "quantized or perfect");
    add_override(cmd, opts, "rvq", "auto, codebook or virtual");
    add_override(cmd, opts, "rates", "comma-separated total-rate grid, bits/dim");
    add_override(cmd, opts, "trials", "Monte Carlo realizations per rate point");
    add_override(cmd, opts, "seed", "master seed");
    add_override(cmd, opts, "channel", "'synthetic' or a channel-dump path");
    add_override(cmd, opts, "b_update", "update overhead, bits per block");
    add_override(cmd, opts, "truncate_beyond_p", "zero coefficients beyond p at the encoder");
}

void print_threshold(const rstc::harness::ExperimentConfig &cfg) {
    const auto th = rstc::harness::plan_threshold(cfg);
    if (th.r_th == rstc::ratesplit::rate_sentinel)
        std::cerr << "threshold_bits_per_dim inf (basis feedback never pays off)\n";
    else
        std::cerr << "threshold_bits_per_dim " << th.r_th << " (closed form "
                  << th.r_th_closed_form << ", " << th.active_modes << " active modes)\n";
}

rstc::harness::ExperimentConfig build_config(const CommonOpts &opts) {
    std::map<std::string, std::string> kv;
    if (!opts.config_path.empty())
        kv = rstc::harness::load_config_file(opts.config_path);
    for (const auto &[k, v] : opts.overrides)
        kv[k] = v;
    return rstc::harness::parse_config(kv);
}

void output_records(const std::vector<rstc::harness::ResultRecord> &records,
                    const CommonOpts &opts) {
    const auto fmt = opts.format == "jsonl" ? rstc::harness::OutputFormat::jsonl
                                            : rstc::harness::OutputFormat::csv;
    if (opts.out_path.empty())
        rstc::harness::emit_results(records, std::cout, fmt);
    else
        rstc::harness::emit_results(records, opts.out_path, fmt);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"rate-split transform coding planner and Monte Carlo harness"};
    app.require_subcommand(1);

    CommonOpts plan_opts, sweep_opts, ingest_opts;

    auto *plan = app.add_subcommand("plan", "analytic split, threshold and distortion model");
    add_config_options(plan, plan_opts);

    auto *sweep = app.add_subcommand("sweep", "full Monte Carlo R-D sweep");
    add_config_options(sweep, sweep_opts);

    auto *ingest = app.add_subcommand(
        "ingest", "channel dump -> sample covariance -> moment-matched plan or sweep");
    std::string ingest_path;
    bool ingest_simulate = false;
    ingest->add_option("dump", ingest_path, "channel dump file (CSID format)")->required();
    ingest->add_flag("--simulate", ingest_simulate, "run the Monte Carlo sweep on the dump");
    add_config_options(ingest, ingest_opts);

    auto *estimate = app.add_subcommand("estimate-cn", "fit the RVQ chordal constant");
    arma::uword est_n = 8, est_bmin = 4, est_bmax = 10, est_trials = 10000;
    std::uint64_t est_seed = 1;
    estimate->add_option("--n", est_n, "vector dimension")->check(CLI::Range(2, 1 << 20));
    estimate->add_option("--b-min", est_bmin, "smallest codebook size, bits");
    estimate->add_option("--b-max", est_bmax, "largest codebook size, bits");
    estimate->add_option("--trials", est_trials, "trials per sweep point");
    estimate->add_option("--seed", est_seed, "master seed");

    auto *complexity = app.add_subcommand("complexity", "parameter and FLOP count per block");
    arma::uword cx_nt = 32, cx_nc = 32;
    complexity->add_option("--nt", cx_nt, "antenna count");
    complexity->add_option("--nc", cx_nc, "subcarrier count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) {
            const auto cfg = build_config(plan_opts);
            print_threshold(cfg);
            output_records(rstc::harness::run_plan(cfg), plan_opts);
        } else if (sweep->parsed()) {
            output_records(rstc::harness::run_rd_sweep(build_config(sweep_opts)), sweep_opts);
        } else if (ingest->parsed()) {
            ingest_opts.overrides["channel"] = ingest_path;
            const auto cfg = build_config(ingest_opts);
            if (!ingest_simulate)
                print_threshold(cfg);
            const auto records = ingest_simulate ? rstc::harness::run_rd_sweep(cfg)
                                                 : rstc::harness::run_plan(cfg);
            output_records(records, ingest_opts);
        } else if (estimate->parsed()) {
            if (est_bmax < est_bmin + 1)
                throw rstc::validation_error("estimate-cn: need b-max > b-min");
            std::vector<arma::uword> sweep_bits;
            for (arma::uword b = est_bmin; b <= est_bmax; ++b)
                sweep_bits.push_back(b);
            const auto fit = rstc::mismatch::estimate_cn(est_n, sweep_bits, est_trials, est_seed);
            std::cout << "c_n " << fit.c_n << "\n"
                      << "slope " << fit.slope << "\n"
                      << "max_residual_bits " << fit.max_residual_bits << "\n";
            for (std::size_t i = 0; i < sweep_bits.size(); ++i)
                std::cout << "mean_chordal_sq[B=" << sweep_bits[i]
                          << "] " << fit.mean_chordal_sq(i) << "\n";
        } else if (complexity->parsed()) {
            const auto rep = rstc::harness::structured_complexity(cx_nt, cx_nc);
            std::cout << "parameters " << rep.parameters << "\n"
                      << "flops " << rep.flops << "\n";
        }
    } catch (const rstc::io_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rstc::convergence_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rstc::validation_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const rstc::capacity_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
