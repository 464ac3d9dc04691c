#include "screenopt/design_io.hpp"

#include "screenopt/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace screenopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool skip_line(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

double parse_double(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw InvalidInput("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
  }
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return in;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

Design parse_design_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw InvalidInput("design CSV has no header row");
  const bool has_rep = header.back() == "replicate_of";
  if (has_rep) header.pop_back();
  if (header.empty()) throw InvalidInput("design CSV declares no factors");
  const std::size_t k = header.size();

  std::vector<std::vector<double>> rows;
  std::vector<std::optional<std::size_t>> rep;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto cells = split(line);
    // An empty trailing replicate_of cell may be dropped by editors.
    if (has_rep && cells.size() == k) cells.emplace_back();
    if (cells.size() != k + (has_rep ? 1 : 0)) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(k + (has_rep ? 1 : 0)) + " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = parse_double(cells[j], line_no);
    rows.push_back(std::move(row));
    if (has_rep && !cells.back().empty()) {
      const double v = parse_double(cells.back(), line_no);
      if (v < 1.0 || v != std::floor(v)) {
        throw InvalidInput("line " + std::to_string(line_no) + ": replicate_of must be a positive row index");
      }
      rep.emplace_back(static_cast<std::size_t>(v) - 1);
    } else {
      rep.emplace_back(std::nullopt);
    }
  }
  if (rows.empty()) throw InvalidInput("design CSV has no runs");
  Matrix s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  Design d = Design::from_settings(std::move(s), std::move(header));
  d.replicate_of = std::move(rep);
  d.validate();
  return d;
}

Design load_design_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_design_csv(in);
}

std::string format_design_csv(const Design& design) {
  std::string out;
  const bool has_rep = design.replicate_count() > 0;
  for (std::size_t j = 0; j < design.factors(); ++j) {
    if (j) out += ',';
    out += design.names[j];
  }
  if (has_rep) out += ",replicate_of";
  out += '\n';
  for (std::size_t i = 0; i < design.runs(); ++i) {
    for (std::size_t j = 0; j < design.factors(); ++j) {
      if (j) out += ',';
      out += format_number(design.settings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (has_rep) {
      out += ',';
      if (design.replicate_of[i]) out += std::to_string(*design.replicate_of[i] + 1);
    }
    out += '\n';
  }
  return out;
}

void save_design_csv(const Design& design, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << format_design_csv(design);
}

ResponseTable parse_responses_csv(std::istream& in) {
  ResponseTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    t.names = split(line);
    break;
  }
  if (t.names.empty()) throw InvalidInput("response CSV has no header row");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto cells = split(line);
    if (cells.size() != t.names.size()) {
      throw InvalidInput("line " + std::to_string(line_no) + ": response row width differs from header");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("response CSV has no rows");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < t.names.size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

ResponseTable load_responses_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_responses_csv(in);
}

}  // namespace screenopt
