#pragma once

#include "screenopt/design.hpp"
#include "screenopt/design_io.hpp"

#include <random>
#include <string>
#include <vector>

namespace screenopt::testing {

inline const std::string kFixtures = SCREENOPT_FIXTURE_DIR;

inline Design fixture(const std::string& name) { return load_design_csv(kFixtures + "/" + name); }
inline Matrix fixture_y(const std::string& name) { return load_responses_csv(kFixtures + "/" + name).values; }

// n x k design with entries drawn uniformly from `levels`; no replicate pairing.
inline Design random_design(std::mt19937_64& rng, std::size_t n, std::size_t k, const std::vector<double>& levels) {
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  Matrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = levels[pick(rng)];
  return Design::from_settings(s);
}

inline Vector normal_vector(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Matrix normal_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> z;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = z(rng);
  return m;
}

}  // namespace screenopt::testing
