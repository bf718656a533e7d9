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

#pragma once

#include <string>
#include <vector>

#include "chartpilot/channel.hpp"

namespace chartpilot {

/// Normalized channel spatial correlation
/// trace(R_n^H R_j) / (||R_n||_F ||R_j||_F), clipped to [0, 1].
/// Block-diagonal structure is exploited; throws on a zero-norm input.
double spatial_correlation(const UeCovariance& R_n, const UeCovariance& R_j);

/// N x N dissimilarity matrix F[n][j] = 1 - spatial_correlation, symmetric
/// with an exactly zero diagonal. The parallel variant computes rows with
/// OpenMP; entries are independent, so both variants agree bitwise.
MatR feature_matrix(const CovarianceSet& covs);
MatR feature_matrix_serial(const CovarianceSet& covs);

enum class ChartMethod { Pca, Isomap };

struct ChartEmbedding {
    MatR Z;                 // C x N, row i scaled by sqrt(lambda_i)
    int dims = 0;           // C
    ChartMethod method = ChartMethod::Isomap;
    double residual = 0.0;  // residual variance against the matrix it was fit to
    bool padded = false;    // requested dims exceeded the positive spectrum
    bool cap_hit = false;   // adaptive search stopped at the dimension cap

    /// Pairwise euclidean distances between chart points, N x N.
    MatR pairwise_distances() const;
};

/// Linear chart: eigendecomposition of F^T C F with centering matrix
/// C = I - (1/N) 1 1^T; row i of Z is sqrt(lambda_i) u_i^T.
ChartEmbedding pca_embedding(const MatR& F, int dims);

/// Directed nu-nearest-neighbor graph over rows of F. Ties on equal
/// dissimilarity are broken toward the lower UE index.
struct KnnGraph {
    int n = 0;
    int nu = 0;
    std::vector<std::vector<int>> neighbors; // out-edges of each node, ascending index
    const MatR* weights = nullptr;           // borrowed: edge n->j weighs F(n, j)
};

KnnGraph knn_graph(const MatR& F, int nu);

/// Geodesic distances across the symmetrized neighbor graph (Floyd-Warshall).
/// Throws std::runtime_error naming the disconnected components when the
/// graph does not connect; callers should raise nu. The parallel variant
/// splits each elimination step over rows and is bitwise-identical to the
/// serial reference.
MatR shortest_paths(const KnnGraph& graph);
MatR shortest_paths_serial(const KnnGraph& graph);

/// Classical MDS of a symmetric zero-diagonal dissimilarity matrix:
/// eigendecomposition of -1/2 C (D o D) C. Eigenvalues below
/// 1e-12 * lambda_max count as zero and are never used under the root.
ChartEmbedding classical_mds(const MatR& D, int dims);

/// Residual variance 1 - Pearson(F, D_Z) with the column-wise mean
/// convention; throws when either side has zero variance.
double residual_variance(const MatR& F, const ChartEmbedding& embedding);
double residual_variance(const MatR& F, const MatR& D_Z);

/// Isomap with a fixed output dimension: knn graph, geodesics, MDS.
/// The stored residual is measured against the input F.
ChartEmbedding isomap_embedding(const MatR& F, int dims, int nu);

/// Isomap with the smallest dimension meeting the accuracy thresholds:
/// C = 1 is accepted when r(F, Z_1) <= eps; C >= 2 additionally requires
/// |r(F, Z_C) - r(F, Z_{C-1})| <= xi. Stops at dim_cap and flags it.
ChartEmbedding adaptive_chart(const MatR& F, double eps, double xi, int dim_cap, int nu);

/// CSV dump: header "ue_id,z_1,...,z_C", one row per UE.
void write_chart_csv(const std::string& path, const ChartEmbedding& embedding);

} // namespace chartpilot
