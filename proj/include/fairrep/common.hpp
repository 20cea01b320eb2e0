#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairrep {

/// Logarithm base used by every information measure. Bound constants
/// (5.51, 1.06) are applied unchanged in whichever base is selected.
enum class LogBase { bits, nats };

inline double log_base(double x, LogBase b) {
  return b == LogBase::bits ? std::log2(x) : std::log(x);
}

/// x * log(x) with the convention 0 * log 0 = 0.
inline double xlogx(double x, LogBase b) {
  return x > 0.0 ? x * log_base(x, b) : 0.0;
}

inline const char* base_name(LogBase b) {
  return b == LogBase::bits ? "bits" : "nats";
}

/// Compensated (Kahan) accumulator; keeps entropy sums deterministic and
/// accurate over multi-million-cell tensors.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Input file or CSV syntax error; carries a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A construction was requested outside the parameter regime that makes it
/// valid; the message names the violated inequality.
class RegimeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An instance would exceed the configured cell budget.
class SizeGuardError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fairrep
