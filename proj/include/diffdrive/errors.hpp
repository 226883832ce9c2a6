#pragma once

#include <stdexcept>
#include <string>

namespace diffdrive {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violated a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The tracking gain design divides by |v_ref|; raised when the reference is
/// slower than the configured floor.
class ReferenceTooSlow : public Error {
 public:
  ReferenceTooSlow(double v_ref, double epsilon_v);

  double v_ref() const { return v_ref_; }
  double epsilon_v() const { return epsilon_v_; }

 private:
  double v_ref_;
  double epsilon_v_;
};

/// The polar error dynamics divide by the goal distance r.
class PolarSingularity : public Error {
 public:
  PolarSingularity(double r, double r_singular);

  double r() const { return r_; }

 private:
  double r_;
};

/// Scenario parsing or validation failure. key_path() names the offending
/// entry, e.g. "regulator.gains.k_r".
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what);

  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace diffdrive
