// SPDX-License-Identifier: Apache-2.0
//
// cfran-sim: system-level simulator for EDU-partitioned cell-free massive MIMO
// Copyright (C) 2026 The cfran-sim authors
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

#ifndef CFRAN_TYPES_HPP
#define CFRAN_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfran {

template <typename Scalar>
using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using cd = std::complex<double>;
using CVector = CVec<double>;
using CMatrix = CMat<double>;
using Point3 = Eigen::Vector3d;

// Binary service indicators, rows = UEs.
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

/// Invalid argument or numerical failure inside the simulator.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (d <= 0, NaN, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

} // namespace cfran

#endif // CFRAN_TYPES_HPP
