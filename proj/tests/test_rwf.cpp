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
#include "rstc/rng.hpp"
#include "rstc/rwf.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace rstc;
using Catch::Matchers::WithinAbs;

namespace {

arma::vec random_spectrum(arma::uword n, std::uint64_t seed) {
    SplitMix64 g(seed);
    arma::vec l(n);
    for (auto &v : l)
        v = std::exp(3.0 * g.next_double() - 1.0);
    return arma::sort(l, "descend");
}

} // namespace

TEST_CASE("water_level boundary case lambda=(4,1), rq=1") {
    // By hand: mu = 1 satisfies log2(4/1) + max(0, log2(1/1)) = 2 = N*rq, with
    // mode 2 marginally active and therefore reported inactive.
    const arma::vec l{4.0, 1.0};
    const auto alloc = rwf::water_level(l, 1.0);
    REQUIRE_THAT(alloc.water_level, WithinAbs(1.0, 1e-10));
    REQUIRE_THAT(alloc.per_mode_rate(0), WithinAbs(2.0, 1e-9));
    REQUIRE(alloc.per_mode_rate(1) == 0.0);
    REQUIRE(alloc.active_set.n_elem == 1);
    REQUIRE(alloc.active_set(0) == 0);
    REQUIRE_THAT(rwf::dq(l, 1.0), WithinAbs(1.0, 1e-9));
}

TEST_CASE("water_level rq=0 canonicalizes to lambda_1") {
    const arma::vec l{3.0, 2.0, 0.5};
    const auto alloc = rwf::water_level(l, 0.0);
    REQUIRE(alloc.water_level == 3.0);
    REQUIRE(alloc.active_set.n_elem == 0);
    REQUIRE(arma::accu(alloc.per_mode_rate) == 0.0);
    REQUIRE_THAT(rwf::dq(l, 0.0), WithinAbs(arma::mean(l), 1e-15));
}

TEST_CASE("white source splits the budget equally") {
    const arma::vec l(4, arma::fill::ones);
    const auto alloc = rwf::water_level(l, 2.0);
    REQUIRE_THAT(alloc.water_level, WithinAbs(0.25, 1e-12));
    for (arma::uword m = 0; m < 4; ++m)
        REQUIRE_THAT(alloc.per_mode_rate(m), WithinAbs(2.0, 1e-10));
    REQUIRE(alloc.active_set.n_elem == 4);
}

TEST_CASE("white source rate-distortion law") {
    const arma::vec l(8, arma::fill::ones);
    for (double r = 0.0; r <= 8.0; r += 0.5)
        REQUIRE_THAT(rwf::dq(l, r), WithinAbs(std::exp2(-r), 1e-12));
}

TEST_CASE("water_level error paths") {
    REQUIRE_THROWS_AS(rwf::water_level(arma::vec{0.0, 0.0}, 1.0), validation_error);
    REQUIRE_THROWS_AS(rwf::water_level(arma::vec{}, 1.0), validation_error);
    REQUIRE_THROWS_AS(rwf::water_level(arma::vec{1.0, 2.0}, 1.0), validation_error); // not sorted
    REQUIRE_THROWS_AS(rwf::water_level(arma::vec{2.0, 1.0}, -0.5), validation_error);
}

TEST_CASE("eigenvalues below the zero clamp never activate") {
    const arma::vec l{1.0, 1e-17};
    const auto alloc = rwf::water_level(l, 3.0);
    REQUIRE(alloc.per_mode_rate(1) == 0.0);
    REQUIRE(alloc.active_set.n_elem == 1);
    // the single positive mode absorbs the whole budget
    REQUIRE_THAT(alloc.per_mode_rate(0), WithinAbs(6.0, 1e-9));
}

TEST_CASE("mu_closed_form examples") {
    SECTION("lambda=(4,1), S={0,1}") {
        const arma::vec l{4.0, 1.0};
        REQUIRE_THAT(rwf::mu_closed_form(l, arma::uvec{0, 1}, 1.0, 2), WithinAbs(1.0, 1e-12));
    }
    SECTION("single mode") {
        REQUIRE_THAT(rwf::mu_closed_form(arma::vec{5.0}, arma::uvec{0}, 1.5, 1),
                     WithinAbs(5.0 * std::exp2(-1.5), 1e-12));
    }
    SECTION("lambda=(8,2), S={0}, rq=0.5, N=2 stays consistent") {
        const arma::vec l{8.0, 2.0};
        const double mu = rwf::mu_closed_form(l, arma::uvec{0}, 0.5, 2);
        REQUIRE_THAT(mu, WithinAbs(4.0, 1e-12));
        REQUIRE(mu >= l(1)); // excluded mode stays excluded
        const auto alloc = rwf::water_level(l, 0.5);
        REQUIRE(alloc.active_set.n_elem == 1);
        REQUIRE_THAT(alloc.water_level, WithinAbs(4.0, 1e-9));
    }
    SECTION("empty active set is an error") {
        REQUIRE_THROWS_AS(rwf::mu_closed_form(arma::vec{1.0}, arma::uvec{}, 1.0, 1),
                          validation_error);
    }
}

TEST_CASE("bisection and closed form agree on the returned active set") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const arma::vec l = random_spectrum(3 + s % 30, derive_stream(7, s));
        SplitMix64 g(derive_stream(11, s));
        const double rq = 0.05 + 7.95 * g.next_double();
        const auto alloc = rwf::water_level(l, rq);
        if (alloc.active_set.n_elem == 0)
            continue;
        const double mu = rwf::mu_closed_form(l, alloc.active_set, rq, l.n_elem);
        REQUIRE_THAT(alloc.water_level, Catch::Matchers::WithinRel(mu, 1e-9));
    }
}

TEST_CASE("dq is monotone, bounded, and accounts its rate") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const arma::vec l = random_spectrum(16, derive_stream(13, s));
        double prev = arma::mean(l) + 1.0;
        for (double r = 0.0; r <= 6.0; r += 0.25) {
            const double d = rwf::dq(l, r);
            REQUIRE(d <= prev + 1e-12);
            REQUIRE(d >= 0.0);
            REQUIRE(d <= arma::mean(l) + 1e-12);
            if (r > 0.0)
                REQUIRE(d < arma::mean(l)); // strictly decreasing from the start
            prev = d;

            const auto alloc = rwf::water_level(l, r);
            REQUIRE_THAT(arma::accu(alloc.per_mode_rate),
                         WithinAbs(static_cast<double>(l.n_elem) * r,
                                   1e-9 * static_cast<double>(l.n_elem)));
        }
    }
}
