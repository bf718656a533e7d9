// chartpilot - channel-charting pilot assignment simulator for multi-sector massive MIMO
// Copyright (C) 2026 chartpilot contributors
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

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "chartpilot/channel.hpp"

using namespace chartpilot;

namespace {

SystemConfig small_config() {
    SystemConfig cfg;
    cfg.n_ues = 8;
    cfg.n_active = 4;
    cfg.antennas_per_sector = 8;
    cfg.pilot_len = 4;
    cfg.n_paths = 20;
    cfg.knn = 3;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("geometry_channel");

TEST_CASE("sector boresights are 2pi/S apart starting north") {
    SystemConfig cfg = small_config();
    const auto sectors = make_sectors(cfg);
    REQUIRE(sectors.size() == 3);
    CHECK(sectors[0].boresight == doctest::Approx(kPi / 2));
    for (std::size_t s = 1; s < sectors.size(); ++s) {
        const double gap = wrap_angle(sectors[s].boresight - sectors[s - 1].boresight);
        CHECK(gap == doctest::Approx(kTwoPi / 3));
    }
}

TEST_CASE("deployment stays inside the cell and clear of the BS") {
    SystemConfig cfg;
    cfg.n_ues = 512;
    Rng rng(42);
    const auto ues = deploy_ues(cfg, rng);
    REQUIRE(ues.size() == 512);
    for (const auto& ue : ues) {
        CHECK(std::abs(ue.x) <= 500.0);
        CHECK(std::abs(ue.y) <= 500.0);
        CHECK(ue.distance >= cfg.min_bs_distance);
        for (double off : ue.sector_offset) {
            CHECK(off > -kPi);
            CHECK(off <= kPi);
        }
    }
}

TEST_CASE("single-UE deployment") {
    SystemConfig cfg = small_config();
    cfg.n_ues = 1;
    cfg.n_active = 1;
    Rng rng(3);
    const auto ues = deploy_ues(cfg, rng);
    REQUIRE(ues.size() == 1);
    CHECK(ues[0].distance >= cfg.min_bs_distance);
}

TEST_CASE("deployment is seed-deterministic, distinct across seeds") {
    SystemConfig cfg = small_config();
    Rng a(7), b(7), c(8);
    const auto ues_a = deploy_ues(cfg, a);
    const auto ues_b = deploy_ues(cfg, b);
    const auto ues_c = deploy_ues(cfg, c);
    bool same = true, differs = false;
    for (int n = 0; n < cfg.n_ues; ++n) {
        same = same && ues_a[n].x == ues_b[n].x && ues_a[n].y == ues_b[n].y;
        differs = differs || ues_a[n].x != ues_c[n].x;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("array response basics") {
    const VecC broadside = array_response(kPi / 2, 5, 0.5);
    for (int m = 0; m < 5; ++m) CHECK(std::abs(broadside(m) - cplx(1, 0)) < 1e-12);

    const VecC single = array_response(0.3, 1, 0.5);
    CHECK(single(0) == cplx(1, 0));

    const VecC endfire = array_response(0.0, 2, 0.5); // exp(-j pi) = -1
    CHECK(std::abs(endfire(0) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(endfire(1) - cplx(-1, 0)) < 1e-12);
}

TEST_CASE("array response entries have unit modulus") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const VecC a = array_response(rng.uniform(-kPi, kPi), 64, 0.5);
        for (int m = 0; m < 64; ++m) CHECK(std::abs(std::abs(a(m)) - 1.0) < 1e-12);
    }
}

TEST_CASE("antenna gain pattern") {
    SystemConfig cfg; // gain_max 0 dB, atten 30 dB, beamwidth 65 deg
    CHECK(antenna_gain_db(0.0, cfg) == doctest::Approx(0.0));
    CHECK(antenna_gain_db(cfg.beamwidth_3db, cfg) == doctest::Approx(-12.0));
    // 12*(120/65)^2 ~ 40.9 dB, clipped at the 30 dB attenuation floor.
    CHECK(antenna_gain_db(deg2rad(120.0), cfg) == doctest::Approx(-30.0));

    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const double g = antenna_gain_db(rng.uniform(-kPi, kPi), cfg);
        CHECK(g <= cfg.gain_max_db);
        CHECK(g >= cfg.gain_max_db - cfg.atten_max_db);
    }
}

TEST_CASE("free-space path gain") {
    CHECK(path_gain(100.0, 0.0, 0.05) == doctest::Approx(1.5831e-9).epsilon(1e-3));
    CHECK(path_gain(100.0, -30.0, 0.05) ==
          doctest::Approx(1e-3 * path_gain(100.0, 0.0, 0.05)).epsilon(1e-12));
    CHECK(path_gain(200.0, 0.0, 0.05) ==
          doctest::Approx(path_gain(100.0, 0.0, 0.05) / 4.0).epsilon(1e-12));
    CHECK_THROWS_AS(path_gain(0.0, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("aoa interval width") {
    const auto [lo, hi] = aoa_interval(0.4, deg2rad(10.0));
    CHECK(hi - lo == doctest::Approx(2.0 * std::sqrt(3.0) * deg2rad(10.0)));
    CHECK((hi + lo) / 2 == doctest::Approx(0.4));
    // Translation invariance of the width.
    const auto [lo2, hi2] = aoa_interval(-1.1, deg2rad(10.0));
    CHECK(hi2 - lo2 == doctest::Approx(hi - lo));
    CHECK_THROWS_AS(aoa_interval(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("single-path draw follows the model equation") {
    SystemConfig cfg = small_config();
    cfg.n_paths = 1;
    Rng rng(21);
    const auto ues = deploy_ues(cfg, rng);

    Rng draw_rng(99);
    Rng replay(99);
    const VecC h = draw_channel(ues[0], 1, cfg, draw_rng);

    const auto [lo, hi] = aoa_interval(ues[0].sector_offset[1], cfg.angular_std);
    const double theta = wrap_angle(replay.uniform(lo, hi));
    const cplx alpha = replay.cgaussian(1.0);
    const double beta = path_gain(ues[0].distance, antenna_gain_db(theta, cfg), cfg.wavelength);
    const VecC expected = std::sqrt(beta) * alpha *
                          array_response(theta, cfg.antennas_per_sector, cfg.antenna_spacing);
    CHECK((h - expected).norm() < 1e-14 * expected.norm());
    // Unit-modulus response: ||h||^2 = M beta |alpha|^2.
    CHECK(h.squaredNorm() ==
          doctest::Approx(cfg.antennas_per_sector * beta * std::norm(alpha)).epsilon(1e-10));
}

TEST_CASE("channel draws are deterministic given the rng state") {
    SystemConfig cfg = small_config();
    Rng rng(33);
    const auto ues = deploy_ues(cfg, rng);
    Rng a(5), b(5);
    const VecC ha = draw_compound_channel(ues[2], cfg, a);
    const VecC hb = draw_compound_channel(ues[2], cfg, b);
    CHECK(ha == hb);
}

TEST_CASE("covariance blocks are Hermitian PSD with the quadrature trace") {
    SystemConfig cfg = small_config();
    Rng rng(17);
    const auto ues = deploy_ues(cfg, rng);
    for (const auto& ue : ues) {
        const UeCovariance cov = covariance(ue, cfg);
        REQUIRE(static_cast<int>(cov.block.size()) == cfg.n_sectors);
        for (int s = 0; s < cfg.n_sectors; ++s) {
            const MatC& b = cov.block[s];
            CHECK((b - b.adjoint()).norm() <= 1e-10 * b.norm());
            Eigen::SelfAdjointEigenSolver<MatC> eig(b);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());

            // Independent trace route: quadrature average of M * beta(theta).
            const auto [lo, hi] = aoa_interval(ue.sector_offset[s], cfg.angular_std);
            const double step = (hi - lo) / cfg.quadrature_points;
            double expected = 0.0;
            for (int q = 0; q < cfg.quadrature_points; ++q) {
                const double theta = wrap_angle(lo + (q + 0.5) * step);
                expected += cfg.antennas_per_sector *
                            path_gain(ue.distance, antenna_gain_db(theta, cfg), cfg.wavelength);
            }
            expected /= cfg.quadrature_points;
            CHECK(b.trace().real() == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("vanishing angular spread collapses to a rank-one block") {
    SystemConfig cfg = small_config();
    Rng rng(13);
    const auto ues = deploy_ues(cfg, rng);
    cfg.angular_std = 1e-9;
    const UeCovariance cov = covariance(ues[0], cfg);
    const double beta = path_gain(ues[0].distance,
                                  antenna_gain_db(ues[0].sector_offset[0], cfg), cfg.wavelength);
    const VecC a =
        array_response(ues[0].sector_offset[0], cfg.antennas_per_sector, cfg.antenna_spacing);
    const MatC rank1 = beta * (a * a.adjoint());
    CHECK((cov.block[0] - rank1).norm() < 1e-6 * rank1.norm());
}

TEST_CASE("sample covariance of channel draws matches the quadrature blocks") {
    SystemConfig cfg = small_config();
    cfg.n_paths = 8; // the second-moment match holds for any path count
    Rng rng(29);
    const auto ues = deploy_ues(cfg, rng);
    const Ue& ue = ues[3];
    const UeCovariance cov = covariance(ue, cfg);

    const int n_draws = 100000;
    const int M = cfg.antennas_per_sector;
    Rng draw_rng(777);
    std::vector<MatC> acc(cfg.n_sectors, MatC::Zero(M, M));
    VecR power = VecR::Zero(cfg.n_sectors);
    for (int i = 0; i < n_draws; ++i) {
        for (int s = 0; s < cfg.n_sectors; ++s) {
            const VecC h = draw_channel(ue, s, cfg, draw_rng);
            acc[s].selfadjointView<Eigen::Lower>().rankUpdate(h, 1.0 / n_draws);
            power(s) += h.squaredNorm() / n_draws;
        }
    }
    for (int s = 0; s < cfg.n_sectors; ++s) {
        const MatC sample = MatC(acc[s].selfadjointView<Eigen::Lower>());
        CHECK((sample - cov.block[s]).norm() / cov.block[s].norm() < 0.03);
        CHECK(power(s) == doctest::Approx(cov.block[s].trace().real()).epsilon(0.03));
    }
}

TEST_CASE("parallel covariance set equals the serial reference") {
    SystemConfig cfg = small_config();
    cfg.n_ues = 24;
    Rng rng(55);
    const auto ues = deploy_ues(cfg, rng);
    const CovarianceSet par = covariance_set(ues, cfg);
    const CovarianceSet ser = covariance_set_serial(ues, cfg);
    REQUIRE(par.size() == ser.size());
    for (int n = 0; n < par.size(); ++n)
        for (int s = 0; s < cfg.n_sectors; ++s) CHECK(par[n].block[s] == ser[n].block[s]);
}

TEST_SUITE_END();
