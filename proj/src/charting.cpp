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

#include "chartpilot/charting.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chartpilot {

double spatial_correlation(const UeCovariance& R_n, const UeCovariance& R_j) {
    const double norm_n = R_n.frob_norm();
    const double norm_j = R_j.frob_norm();
    if (norm_n == 0.0 || norm_j == 0.0)
        throw std::invalid_argument("spatial_correlation: zero-norm covariance");
    // trace(A^H B) block by block; real for Hermitian inputs.
    double inner = 0.0;
    for (std::size_t s = 0; s < R_n.block.size(); ++s)
        inner += R_n.block[s].conjugate().cwiseProduct(R_j.block[s]).sum().real();
    return std::clamp(inner / (norm_n * norm_j), 0.0, 1.0);
}

namespace {

MatR feature_matrix_impl(const CovarianceSet& covs, bool parallel) {
    const int n = covs.size();
    if (n < 2) throw std::invalid_argument("feature_matrix: need at least 2 UEs");
    MatR F = MatR::Zero(n, n);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) F(i, j) = 1.0 - spatial_correlation(covs[i], covs[j]);
    // Mirror the strictly-upper triangle; the diagonal stays exactly zero.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) F(i, j) = F(j, i);
    return F;
}

/// Deterministic eigenvector orientation: the entry of largest magnitude
/// (first such index on ties) is made nonnegative.
void canonicalize_sign(MatR& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index arg = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
    }
}

/// Shared tail of PCA and MDS: keep the `dims` largest eigenpairs of a
/// symmetric PSD-ish kernel and scale eigenvectors by sqrt(lambda).
ChartEmbedding embed_from_kernel(const MatR& kernel, int dims, ChartMethod method) {
    const Eigen::Index n = kernel.rows();
    if (dims < 1 || dims > n) throw std::invalid_argument("embedding: dims must be in [1, N]");

    Eigen::SelfAdjointEigenSolver<MatR> solver(kernel);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("embedding: eigendecomposition failed");

    // Eigen returns eigenvalues ascending; reverse to non-increasing order.
    VecR values = solver.eigenvalues().reverse();
    MatR vectors = solver.eigenvectors().rowwise().reverse();
    canonicalize_sign(vectors);

    const double lambda_max = std::max(values(0), 0.0);
    const double floor = 1e-12 * lambda_max;

    ChartEmbedding emb;
    emb.method = method;
    emb.dims = dims;
    emb.Z = MatR::Zero(dims, n);
    for (int i = 0; i < dims; ++i) {
        if (values(i) <= floor) {
            emb.padded = true; // spectrum exhausted, remaining rows stay zero
            break;
        }
        emb.Z.row(i) = std::sqrt(values(i)) * vectors.col(i).transpose();
    }
    return emb;
}

} // namespace

MatR feature_matrix(const CovarianceSet& covs) { return feature_matrix_impl(covs, true); }
MatR feature_matrix_serial(const CovarianceSet& covs) { return feature_matrix_impl(covs, false); }

MatR ChartEmbedding::pairwise_distances() const {
    const Eigen::Index n = Z.cols();
    MatR D = MatR::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = D(j, i) = (Z.col(i) - Z.col(j)).norm();
    return D;
}

ChartEmbedding pca_embedding(const MatR& F, int dims) {
    // F^T C F with C = I - (1/N) 1 1^T; centering F's columns realizes C F.
    MatR centered = F.rowwise() - F.colwise().mean();
    MatR kernel = F.transpose() * centered;
    kernel = 0.5 * (kernel + kernel.transpose()); // exact symmetry for the solver
    ChartEmbedding emb = embed_from_kernel(kernel, dims, ChartMethod::Pca);
    emb.residual = residual_variance(F, emb);
    return emb;
}

KnnGraph knn_graph(const MatR& F, int nu) {
    const int n = static_cast<int>(F.rows());
    if (nu < 1 || nu > n - 1) throw std::invalid_argument("knn_graph: need 1 <= nu <= N-1");

    KnnGraph g;
    g.n = n;
    g.nu = nu;
    g.weights = &F;
    g.neighbors.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        order.erase(order.begin() + i); // self never counts as a neighbor
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return F(i, a) < F(i, b); });
        g.neighbors[i].assign(order.begin(), order.begin() + nu);
        std::sort(g.neighbors[i].begin(), g.neighbors[i].end());
    }
    return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MatR symmetrized_adjacency(const KnnGraph& graph) {
    const int n = graph.n;
    const MatR& F = *graph.weights;
    MatR D = MatR::Constant(n, n, kInf);
    for (int i = 0; i < n; ++i) D(i, i) = 0.0;
    // Union of directed edges; F is symmetric so min() of the two weights is F itself.
    for (int i = 0; i < n; ++i)
        for (int j : graph.neighbors[i]) {
            D(i, j) = std::min(D(i, j), F(i, j));
            D(j, i) = std::min(D(j, i), F(i, j));
        }
    return D;
}

void check_connected(const MatR& D) {
    const int n = static_cast<int>(D.rows());
    std::vector<int> component(n, -1);
    int n_comp = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (component[s] >= 0) continue;
        stack.push_back(s);
        component[s] = n_comp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j)
                if (j != v && component[j] < 0 && D(v, j) < kInf) {
                    component[j] = n_comp;
                    stack.push_back(j);
                }
        }
        ++n_comp;
    }
    if (n_comp == 1) return;
    std::vector<int> sizes(n_comp, 0);
    for (int c : component) sizes[c]++;
    std::string msg = "shortest_paths: neighbor graph is disconnected (" +
                      std::to_string(n_comp) + " components, sizes";
    for (int s : sizes) msg += " " + std::to_string(s);
    msg += "); increase knn (nu)";
    throw std::runtime_error(msg);
}

MatR floyd_warshall(MatR D, bool parallel) {
    const int n = static_cast<int>(D.rows());
    for (int k = 0; k < n; ++k) {
        // Rows k and columns k are fixed points of step k, so rows can be
        // relaxed independently.
#pragma omp parallel for schedule(static) if (parallel)
        for (int i = 0; i < n; ++i) {
            const double d_ik = D(i, k);
            if (d_ik == kInf) continue;
            for (int j = 0; j < n; ++j) {
                const double via = d_ik + D(k, j);
                if (via < D(i, j)) D(i, j) = via;
            }
        }
    }
    return D;
}

} // namespace

MatR shortest_paths(const KnnGraph& graph) {
    MatR D = symmetrized_adjacency(graph);
    check_connected(D);
    return floyd_warshall(std::move(D), true);
}

MatR shortest_paths_serial(const KnnGraph& graph) {
    MatR D = symmetrized_adjacency(graph);
    check_connected(D);
    return floyd_warshall(std::move(D), false);
}

ChartEmbedding classical_mds(const MatR& D, int dims) {
    const Eigen::Index n = D.rows();
    // Double centering of the squared dissimilarities:
    // -1/2 C (D o D) C expanded into row/column/total means.
    MatR sq = D.cwiseProduct(D);
    VecR row_mean = sq.rowwise().mean();
    VecR col_mean = sq.colwise().mean();
    const double total_mean = sq.mean();
    MatR kernel(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            kernel(i, j) = -0.5 * (sq(i, j) - row_mean(i) - col_mean(j) + total_mean);
    kernel = 0.5 * (kernel + kernel.transpose());

    ChartEmbedding emb = embed_from_kernel(kernel, dims, ChartMethod::Isomap);
    emb.residual = residual_variance(D, emb);
    return emb;
}

double residual_variance(const MatR& F, const MatR& D_Z) {
    if (F.rows() != D_Z.rows() || F.cols() != D_Z.cols())
        throw std::invalid_argument("residual_variance: shape mismatch");
    // Column-wise Pearson correlation: each column is centered by its own mean.
    double cross = 0.0, var_f = 0.0, var_d = 0.0;
    for (Eigen::Index n = 0; n < F.cols(); ++n) {
        const VecR f = F.col(n).array() - F.col(n).mean();
        const VecR d = D_Z.col(n).array() - D_Z.col(n).mean();
        cross += f.dot(d);
        var_f += f.squaredNorm();
        var_d += d.squaredNorm();
    }
    if (var_f == 0.0 || var_d == 0.0)
        throw std::invalid_argument("residual_variance: zero variance");
    return 1.0 - cross / std::sqrt(var_f * var_d);
}

double residual_variance(const MatR& F, const ChartEmbedding& embedding) {
    return residual_variance(F, embedding.pairwise_distances());
}

ChartEmbedding isomap_embedding(const MatR& F, int dims, int nu) {
    const MatR geo = shortest_paths(knn_graph(F, nu));
    ChartEmbedding emb = classical_mds(geo, dims);
    emb.residual = residual_variance(F, emb);
    return emb;
}

ChartEmbedding adaptive_chart(const MatR& F, double eps, double xi, int dim_cap, int nu) {
    if (eps <= 0.0 || xi <= 0.0) throw std::invalid_argument("adaptive_chart: thresholds must be > 0");
    const int n = static_cast<int>(F.rows());
    dim_cap = std::min(dim_cap, n - 1);
    const MatR geo = shortest_paths(knn_graph(F, nu));

    ChartEmbedding emb;
    double prev_residual = 1.0;
    for (int dims = 1; dims <= dim_cap; ++dims) {
        emb = classical_mds(geo, dims);
        const double r = residual_variance(F, emb);
        emb.residual = r;
        const bool delta_ok = dims == 1 || std::abs(r - prev_residual) <= xi;
        if (r <= eps && delta_ok) return emb;
        prev_residual = r;
    }
    emb.cap_hit = true;
    return emb;
}

void write_chart_csv(const std::string& path, const ChartEmbedding& embedding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_chart_csv: cannot open " + path);
    out << "ue_id";
    for (int c = 1; c <= embedding.dims; ++c) out << ",z_" << c;
    out << "\n";
    out.precision(17);
    for (Eigen::Index n = 0; n < embedding.Z.cols(); ++n) {
        out << n;
        for (int c = 0; c < embedding.dims; ++c) out << "," << embedding.Z(c, n);
        out << "\n";
    }
}

} // namespace chartpilot
