#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "pwc/logreal.hpp"
#include "pwc/tree.hpp"

namespace pwc {

/// Canonical partition function W_n(a0), a0 = 0..2^n, stored as ln W (-inf for zero).
struct CanonicalTable {
  int depth = 0;
  std::string spec_id;
  Eigen::VectorXd ln_w;

  std::int64_t max_size() const { return static_cast<std::int64_t>(leaf_count(depth)); }
  LogReal w(std::int64_t a0) const { return LogReal::from_log(ln_w(static_cast<Eigen::Index>(a0))); }
  /// omega_n at density a0 / 2^n: 2^{-n} ln W_n(a0).
  double omega(std::int64_t a0) const {
    return ln_w(static_cast<Eigen::Index>(a0)) / static_cast<double>(leaf_count(depth));
  }
  /// ln sum_a0 e^{J a0} W(a0).
  double ln_z(double j) const {
    const Eigen::VectorXd terms =
        ln_w + j * Eigen::VectorXd::LinSpaced(ln_w.size(), 0.0, static_cast<double>(ln_w.size() - 1));
    return log_sum_exp<double>(std::span<const double>(terms.data(), static_cast<std::size_t>(terms.size())));
  }
};

}  // namespace pwc
