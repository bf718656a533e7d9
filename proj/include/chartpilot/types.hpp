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

#define EIGEN_DONT_PARALLELIZE

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace chartpilot {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double t = std::fmod(a + kPi, kTwoPi);
    if (t <= 0.0) t += kTwoPi;
    return t - kPi;
}

} // namespace chartpilot
