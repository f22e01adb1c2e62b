#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace prqc {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  invalid_argument,
  unsupported_model,
  too_large,
  basis_mismatch,
  parity_error,
  numerical_error,
  metric_unavailable,
  invalid_config,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace prqc
