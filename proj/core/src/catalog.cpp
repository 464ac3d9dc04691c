#include "screenopt/catalog.hpp"

#include "screenopt/errors.hpp"

#include <array>
#include <string>

namespace screenopt {

namespace {

// Paley constructions; orders 8 and 12 are skew (q = 3 mod 4).
constexpr std::array<const char*, 6> kC6 = {
    "0+++++", "+0+--+", "++0+--", "+-+0+-", "+--+0+", "++--+0"};
constexpr std::array<const char*, 8> kC8 = {
    "0+++++++", "-0--+-++", "-+0--+-+", "-++0--+-",
    "--++0--+", "-+-++0--", "--+-++0-", "---+-++0"};
constexpr std::array<const char*, 10> kC10 = {
    "0+++++++++", "+0+++--+--", "++0+-+--+-", "+++0--+--+", "++--0+++--",
    "+-+-+0+-+-", "+--+++0--+", "++--+--0++", "+-+--+-+0+", "+--+--+++0"};
constexpr std::array<const char*, 12> kC12 = {
    "0+++++++++++", "-0-+---+++-+", "-+0-+---+++-", "--+0-+---+++",
    "-+-+0-+---++", "-++-+0-+---+", "-+++-+0-+---", "--+++-+0-+--",
    "---+++-+0-+-", "----+++-+0-+", "-+---+++-+0-", "--+---+++-+0"};

template <std::size_t N>
Matrix parse_rows(const std::array<const char*, N>& rows) {
  Matrix c(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const char s = rows[i][j];
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s == '+' ? 1.0 : (s == '-' ? -1.0 : 0.0);
    }
  }
  return c;
}

std::string catalog_list() {
  std::string s;
  for (int o : conference_orders()) {
    if (!s.empty()) s += ", ";
    s += std::to_string(o);
  }
  return s;
}

}  // namespace

std::vector<int> conference_orders() { return {6, 8, 10, 12}; }

Matrix conference_matrix(int order) {
  switch (order) {
    case 6: return parse_rows(kC6);
    case 8: return parse_rows(kC8);
    case 10: return parse_rows(kC10);
    case 12: return parse_rows(kC12);
    default:
      throw UnsupportedOrder("no conference matrix of order " + std::to_string(order) +
                             " in the catalog (available: " + catalog_list() + ")");
  }
}

Design foldover(const Matrix& half, bool append_center) {
  for (Eigen::Index i = 0; i < half.rows(); ++i) {
    for (Eigen::Index j = 0; j < half.cols(); ++j) {
      const double x = half(i, j);
      if (x != -1.0 && x != 0.0 && x != 1.0) throw InvalidInput("foldover input must be in {-1, 0, 1}");
    }
  }
  const Eigen::Index m = half.rows();
  Matrix d = Matrix::Zero(2 * m + (append_center ? 1 : 0), half.cols());
  d.topRows(m) = half;
  d.middleRows(m, m) = -half;
  return Design::from_settings(std::move(d));
}

Design dsd(int k) { return foldover(conference_matrix(k), true); }

Design adsd(int k, int f, bool drop_center) {
  if (k < 1 || f < 0) throw InvalidInput("adsd requires k >= 1 and f >= 0");
  const Matrix c = conference_matrix(k + f);
  Matrix half = c.leftCols(k);
  Design full = foldover(half, !drop_center);
  return full;
}

}  // namespace screenopt
