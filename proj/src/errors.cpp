#include "diffdrive/errors.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace diffdrive {

ReferenceTooSlow::ReferenceTooSlow(double v_ref, double epsilon_v)
    : Error(fmt::format("reference too slow: |v_ref| = {:g} m/s is below "
                        "epsilon_v = {:g} m/s",
                        std::abs(v_ref), epsilon_v)),
      v_ref_(v_ref),
      epsilon_v_(epsilon_v) {}

PolarSingularity::PolarSingularity(double r, double r_singular)
    : Error(fmt::format("polar singularity: r = {:g} m is within {:g} m of "
                        "the goal",
                        r, r_singular)),
      r_(r) {}

ConfigError::ConfigError(std::string key_path, const std::string& what)
    : Error(key_path.empty() ? what : key_path + ": " + what),
      key_path_(std::move(key_path)) {}

}  // namespace diffdrive
