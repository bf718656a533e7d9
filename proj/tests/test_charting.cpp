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

#include <limits>

#include "chartpilot/charting.hpp"
#include "chartpilot/experiment.hpp"

using namespace chartpilot;

namespace {

UeCovariance diag_cov(std::initializer_list<double> entries) {
    UeCovariance c;
    VecC d(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double e : entries) d(i++) = e;
    c.block.assign(1, MatC(d.asDiagonal()));
    return c;
}

/// Euclidean distance matrix of points given as columns.
MatR distance_matrix(const MatR& points) {
    const Eigen::Index n = points.cols();
    MatR D = MatR::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            D(i, j) = D(j, i) = (points.col(i) - points.col(j)).norm();
    return D;
}

CovarianceSet random_cov_set(int n, int m, std::uint64_t seed) {
    CovarianceSet covs;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        MatC G(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c) G(r, c) = rng.cgaussian(1.0);
        UeCovariance cov;
        cov.block.assign(1, MatC(G * G.adjoint()));
        covs.R.push_back(cov);
    }
    return covs;
}

} // namespace

TEST_SUITE_BEGIN("charting");

TEST_CASE("spatial correlation of identical and orthogonal covariances") {
    const UeCovariance a = diag_cov({1.0, 2.0, 0.0, 0.0});
    const UeCovariance b = diag_cov({0.0, 0.0, 3.0, 1.0});
    CHECK(spatial_correlation(a, a) == doctest::Approx(1.0));
    CHECK(spatial_correlation(a, b) == doctest::Approx(0.0));
    CHECK(spatial_correlation(a, b) == spatial_correlation(b, a));
    CHECK_THROWS_AS(spatial_correlation(a, diag_cov({0.0, 0.0, 0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("feature matrix shape, symmetry and range") {
    const CovarianceSet covs = random_cov_set(24, 6, 3);
    const MatR F = feature_matrix(covs);
    CHECK(F.rows() == 24);
    CHECK((F - F.transpose()).norm() == 0.0);
    CHECK(F.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(F.minCoeff() >= 0.0);
    CHECK(F.maxCoeff() <= 1.0);
    CHECK(F == feature_matrix_serial(covs));
}

TEST_CASE("degenerate feature matrices") {
    CovarianceSet same;
    same.R.assign(4, diag_cov({1.0, 0.5}));
    const MatR F = feature_matrix(same);
    CHECK(F.cwiseAbs().maxCoeff() < 1e-12);

    CovarianceSet pair;
    pair.R.push_back(diag_cov({1.0, 0.0}));
    pair.R.push_back(diag_cov({0.0, 1.0}));
    CHECK(feature_matrix(pair)(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("pca keeps eigenvalues in order and preserves total variance") {
    const CovarianceSet covs = random_cov_set(20, 5, 9);
    const MatR F = feature_matrix(covs);
    const ChartEmbedding full = pca_embedding(F, 20);

    // Row norms^2 are the eigenvalues; they must be non-increasing.
    VecR lambda(20);
    for (int i = 0; i < 20; ++i) lambda(i) = full.Z.row(i).squaredNorm();
    for (int i = 1; i < 20; ++i) CHECK(lambda(i) <= lambda(i - 1) + 1e-12);

    // Direct trace oracle of F^T C F.
    const MatR centered = F.rowwise() - F.colwise().mean();
    const double trace = (F.transpose() * centered).trace();
    CHECK(lambda.sum() == doctest::Approx(trace).epsilon(1e-9));
}

TEST_CASE("pca pads once the positive spectrum is exhausted") {
    // Rank-1 configuration: two point masses.
    MatR F = MatR::Zero(4, 4);
    F(0, 1) = F(1, 0) = 1.0;
    F(0, 2) = F(2, 0) = 1.0;
    F(1, 2) = F(2, 1) = 0.0;
    const ChartEmbedding emb = pca_embedding(F, 4);
    CHECK(emb.padded);
    CHECK(emb.Z.row(3).norm() == 0.0);
}

TEST_CASE("knn graph degree, completeness and tie-breaking") {
    MatR F(3, 3);
    F << 0, 1, 2,
         1, 0, 1,
         2, 1, 0;
    const KnnGraph g1 = knn_graph(F, 1);
    // Middle node ties between both endpoints; the lower index wins.
    CHECK(g1.neighbors[1] == std::vector<int>{0});
    CHECK(g1.neighbors[0] == std::vector<int>{1});
    CHECK(g1.neighbors[2] == std::vector<int>{1});

    const CovarianceSet covs = random_cov_set(12, 4, 21);
    const MatR Fr = feature_matrix(covs);
    const KnnGraph complete = knn_graph(Fr, 11);
    for (const auto& nbrs : complete.neighbors) CHECK(static_cast<int>(nbrs.size()) == 11);
    CHECK_THROWS_AS(knn_graph(Fr, 12), std::invalid_argument);
}

TEST_CASE("geodesics on a chain and on a complete metric graph") {
    MatR F(3, 3);
    F << 0, 1, 2,
         1, 0, 1,
         2, 1, 0;
    const MatR geo = shortest_paths(knn_graph(F, 1));
    CHECK(geo(0, 2) == doctest::Approx(2.0)); // through the middle node
    CHECK(geo(0, 1) == doctest::Approx(1.0));
    CHECK((geo - geo.transpose()).norm() == 0.0);

    // A metric matrix is a fixed point when the graph is complete.
    Rng rng(5);
    MatR pts(2, 10);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i / 10, i % 10) = rng.uniform();
    const MatR D = distance_matrix(pts);
    const MatR geo_complete = shortest_paths(knn_graph(D, 9));
    CHECK((geo_complete - D).cwiseAbs().maxCoeff() < 1e-12);

    // Relaxation can only shrink distances where an edge exists.
    const KnnGraph sparse = knn_graph(D, 3);
    const MatR geo_sparse = shortest_paths(sparse);
    for (int i = 0; i < 10; ++i)
        for (int j : sparse.neighbors[i]) CHECK(geo_sparse(i, j) <= D(i, j) + 1e-15);
}

TEST_CASE("triangle inequality holds on sampled triples") {
    const CovarianceSet covs = random_cov_set(40, 5, 33);
    const MatR geo = shortest_paths(knn_graph(feature_matrix(covs), 6));
    Rng rng(77);
    for (int rep = 0; rep < 10000; ++rep) {
        const int a = static_cast<int>(rng.uniform_index(40));
        const int b = static_cast<int>(rng.uniform_index(40));
        const int c = static_cast<int>(rng.uniform_index(40));
        CHECK(geo(a, c) <= geo(a, b) + geo(b, c) + 1e-12);
    }
}

TEST_CASE("disconnected graphs raise with component details") {
    // Two well-separated pairs; nu = 1 keeps them apart.
    MatR F(4, 4);
    F << 0.0, 0.1, 0.9, 0.9,
         0.1, 0.0, 0.9, 0.9,
         0.9, 0.9, 0.0, 0.1,
         0.9, 0.9, 0.1, 0.0;
    CHECK_THROWS_AS(shortest_paths(knn_graph(F, 1)), std::runtime_error);
    try {
        shortest_paths(knn_graph(F, 1));
        FAIL("expected a disconnection error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("disconnected") != std::string::npos);
        CHECK(what.find("2 components") != std::string::npos);
        CHECK(what.find("increase knn") != std::string::npos);
    }
}

TEST_CASE("parallel floyd-warshall equals the serial reference") {
    const CovarianceSet covs = random_cov_set(48, 4, 55);
    const KnnGraph g = knn_graph(feature_matrix(covs), 5);
    CHECK(shortest_paths(g) == shortest_paths_serial(g));
}

TEST_CASE("classical MDS recovers line coordinates") {
    MatR pts(1, 3);
    pts << 0.0, 1.0, 2.0;
    const MatR D = distance_matrix(pts);
    const ChartEmbedding emb = classical_mds(D, 1);
    CHECK((emb.pairwise_distances() - D).cwiseAbs().maxCoeff() < 1e-9);

    const ChartEmbedding emb2 = classical_mds(D, 2);
    CHECK(emb2.Z.row(1).norm() < 1e-9); // genuinely 1-D data
    CHECK(emb2.padded);
}

TEST_CASE("classical MDS reproduces euclidean-realizable distances exactly") {
    Rng rng(13);
    MatR pts(3, 12);
    for (Eigen::Index c = 0; c < pts.cols(); ++c)
        for (Eigen::Index r = 0; r < 3; ++r) pts(r, c) = rng.uniform(-1.0, 1.0);
    const MatR D = distance_matrix(pts);
    const ChartEmbedding emb = classical_mds(D, 3);
    CHECK((emb.pairwise_distances() - D).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(emb.residual < 1e-9);
}

TEST_CASE("MDS gram identity and monotone reconstruction") {
    const CovarianceSet covs = random_cov_set(16, 5, 99);
    const MatR geo = shortest_paths(knn_graph(feature_matrix(covs), 5));

    // Rebuild the double-centered kernel independently.
    const Eigen::Index n = geo.rows();
    const MatR sq = geo.cwiseProduct(geo);
    const MatR C = MatR::Identity(n, n) - MatR::Constant(n, n, 1.0 / n);
    const MatR kernel = -0.5 * C * sq * C;

    double prev_err = std::numeric_limits<double>::infinity();
    for (int dims : {1, 2, 4, 8, 15}) {
        const ChartEmbedding emb = classical_mds(geo, dims);
        // Z^T Z is the rank-dims spectral truncation of the kernel.
        const double err = (kernel - emb.Z.transpose() * emb.Z).norm();
        CHECK(err <= prev_err + 1e-9);
        prev_err = err;
    }
}

TEST_CASE("negative spectrum directions are clamped, not embedded") {
    // A star metric that is not euclidean-realizable: K' has negative eigenvalues.
    MatR D(4, 4);
    D << 0, 1, 1, 1,
         1, 0, 2, 2,
         1, 2, 0, 2,
         1, 2, 2, 0;
    const ChartEmbedding emb = classical_mds(D, 4);
    CHECK(emb.padded);
    for (int i = 0; i < 4; ++i) CHECK(std::isfinite(emb.Z.row(i).squaredNorm()));
}

TEST_CASE("residual variance conventions") {
    const CovarianceSet covs = random_cov_set(15, 4, 7);
    const MatR F = feature_matrix(covs);
    CHECK(residual_variance(F, F) == doctest::Approx(0.0).epsilon(1e-12));
    const MatR affine = 2.0 * F + MatR::Constant(15, 15, 5.0);
    CHECK(residual_variance(F, affine) == doctest::Approx(0.0).epsilon(1e-12));

    // Uncorrelated random embedding leaves nearly everything unexplained.
    Rng rng(123);
    double avg = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        ChartEmbedding noise;
        noise.dims = 2;
        noise.Z.resize(2, 15);
        for (Eigen::Index i = 0; i < noise.Z.size(); ++i)
            noise.Z(i / 15, i % 15) = rng.gaussian();
        avg += residual_variance(F, noise) / reps;
    }
    CHECK(avg >= 0.9);

    CHECK_THROWS_AS(residual_variance(F, MatR::Zero(15, 15)), std::invalid_argument);
}

TEST_CASE("isomap with a complete graph degenerates to classical MDS") {
    Rng rng(31);
    MatR pts(2, 20);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i / 20, i % 20) = rng.uniform(-3.0, 3.0);
    const MatR D = distance_matrix(pts);
    const ChartEmbedding mds = classical_mds(D, 2);
    const ChartEmbedding iso = isomap_embedding(D, 2, 19);
    CHECK((mds.Z - iso.Z).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("embeddings are reproducible and distance-sign-invariant") {
    const CovarianceSet covs = random_cov_set(18, 5, 63);
    const MatR F = feature_matrix(covs);
    const ChartEmbedding a = isomap_embedding(F, 3, 6);
    const ChartEmbedding b = isomap_embedding(F, 3, 6);
    CHECK(a.Z == b.Z);

    ChartEmbedding flipped = a;
    flipped.Z.row(1) = -flipped.Z.row(1);
    CHECK((flipped.pairwise_distances() - a.pairwise_distances()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adaptive chart accepts one dimension for perfectly linear features") {
    MatR pts(1, 12);
    for (int i = 0; i < 12; ++i) pts(0, i) = 0.15 * i;
    const MatR D = distance_matrix(pts);
    // Collinear geodesics are additive, so the one-dimensional chart is exact.
    const ChartEmbedding emb = adaptive_chart(D, 1e-4, 1e-4, 8, 3);
    CHECK(emb.dims == 1);
    CHECK(emb.residual <= 1e-4);
    CHECK_FALSE(emb.cap_hit);
}

TEST_CASE("tightening eps never lowers the adaptive dimension") {
    const CovarianceSet covs = random_cov_set(30, 6, 17);
    const MatR F = feature_matrix(covs);
    int prev = 0;
    for (double eps : {0.5, 0.1, 1e-2, 1e-4, 1e-6}) {
        const ChartEmbedding emb = adaptive_chart(F, eps, coupled_xi(eps), 16, 6);
        CHECK(emb.dims >= prev);
        prev = emb.dims;
    }
}

TEST_CASE("dimension cap is flagged") {
    const CovarianceSet covs = random_cov_set(30, 6, 19);
    const MatR F = feature_matrix(covs);
    const ChartEmbedding emb = adaptive_chart(F, 1e-12, 1e-12, 2, 6);
    CHECK(emb.cap_hit);
    CHECK(emb.dims == 2);
}

TEST_SUITE_END();
