// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace trtc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kSpeedOfLight = 299792458.0;

enum class ErrorCode {
  DimensionMismatch,
  AmplitudeUnreachable,
  NonIntegerPeriod,
  UnsupportedOrder,
  DegenerateGeometry,
  EmptyTraining,
  ZeroChannel,
  RankDeficient,
  SingularSystem,
  AllBelowFloor,
  SurrogateDivergence,
  NoConvergence,
  SearchSpaceTooLarge,
  ConfigInvalid,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AmplitudeUnreachable: return "AmplitudeUnreachable";
    case ErrorCode::NonIntegerPeriod: return "NonIntegerPeriod";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyTraining: return "EmptyTraining";
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::AllBelowFloor: return "AllBelowFloor";
    case ErrorCode::SurrogateDivergence: return "SurrogateDivergence";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells failures apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace trtc
