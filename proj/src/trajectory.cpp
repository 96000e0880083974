#include "tailchain/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "tailchain/error.hpp"

namespace tailchain {

Trajectory::Trajectory(std::vector<double> flat, std::size_t dim) : data_(std::move(flat)), dim_(dim) {
  if (dim_ == 0) throw ArgumentError("trajectory dimension must be at least 1");
  if (data_.empty()) throw EmptyInputError("trajectory must contain at least one point");
  if (data_.size() % dim_ != 0) throw ArgumentError("flat trajectory length is not a multiple of its dimension");
  for (double v : data_) {
    if (!std::isfinite(v)) throw ArgumentError("trajectory contains a non-finite coordinate");
  }
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw EmptyInputError("trajectory must contain at least one point");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw ArgumentError("point " + std::to_string(i) + " has a different dimension");
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return flat;
}

}  // namespace

Trajectory::Trajectory(const std::vector<std::vector<double>>& rows)
    : Trajectory(flatten(rows), rows.empty() ? 1 : rows.front().size()) {}

Trajectory Trajectory::tail(std::size_t count) const {
  if (count >= size()) return *this;
  std::vector<double> flat(data_.end() - static_cast<std::ptrdiff_t>(count * dim_), data_.end());
  return Trajectory(std::move(flat), dim_);
}

Trajectory Trajectory::scaled(double factor) const {
  std::vector<double> flat = data_;
  for (double& v : flat) v *= factor;
  return Trajectory(std::move(flat), dim_);
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> IncrementSeries::norms() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = norm(delta(j));
  return out;
}

IncrementSeries increments(const Trajectory& t, std::size_t lag) {
  if (lag == 0) throw ArgumentError("increment lag must be positive");
  if (lag >= t.size()) {
    throw ArgumentError("increment lag " + std::to_string(lag) + " is not below trajectory length " +
                        std::to_string(t.size()));
  }
  IncrementSeries out;
  out.dim = t.dim();
  out.lag = lag;
  const std::size_t count = t.size() - lag;
  out.deltas.resize(count * t.dim());
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t c = 0; c < t.dim(); ++c) out.deltas[j * t.dim() + c] = t(j + lag, c) - t(j, c);
  }
  return out;
}

SimplexWeights::SimplexWeights(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw ArgumentError("simplex weights must be nonempty");
  double total = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("simplex weights must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("simplex weights must sum to 1");
}

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

RadiusGrid::RadiusGrid(std::vector<double> radii, double rho) : radii_(std::move(radii)), rho_(rho) {
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw ArgumentError("rho must be positive and finite");
  if (radii_.empty()) throw ArgumentError("radius grid must be nonempty");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0.0) || !std::isfinite(radii_[i])) throw ArgumentError("radii must be positive and finite");
    if (i > 0 && !(radii_[i] > radii_[i - 1])) throw ArgumentError("radii must be strictly increasing");
  }
}

RadiusGrid RadiusGrid::log_spaced(double lo, double hi, std::size_t count, double rho) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ArgumentError("log grid needs 0 < lo < hi and count >= 2");
  std::vector<double> r(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    r[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  r.front() = lo;
  r.back() = hi;
  return RadiusGrid(std::move(r), rho);
}

RadiusGrid RadiusGrid::linear(double lo, double hi, std::size_t count, double rho) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ArgumentError("linear grid needs 0 < lo < hi and count >= 2");
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i) {
    r[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  r.back() = hi;
  return RadiusGrid(std::move(r), rho);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Trajectory parse_trajectory(const std::string& text, bool has_header) {
  std::vector<double> flat;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t width = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      const std::string_view cell = trim(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
      double value = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        throw ParseError("non-numeric cell '" + std::string(cell) + "'", line_no);
      }
      if (!std::isfinite(value)) throw ParseError("non-finite cell '" + std::string(cell) + "'", line_no);
      flat.push_back(value);
      ++width;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dim == 0) {
      dim = width;
    } else if (width != dim) {
      throw FormatError("ragged row: expected " + std::to_string(dim) + " columns, found " + std::to_string(width),
                        line_no);
    }
  }
  if (flat.empty()) throw EmptyInputError("trajectory file contains no data rows");
  return Trajectory(std::move(flat), dim);
}

Trajectory load_trajectory(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trajectory file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trajectory(buffer.str(), has_header);
}

std::string format_trajectory(const Trajectory& t) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t c = 0; c < t.dim(); ++c) {
      if (c > 0) out.push_back(',');
      const int len = std::snprintf(buf, sizeof buf, "%.17g", t(i, c));
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

void save_trajectory(const Trajectory& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trajectory file " + path.string());
  out << format_trajectory(t);
  if (!out) throw IoError("write failed for " + path.string());
}

const char* to_string(StdConvention c) noexcept {
  return c == StdConvention::population ? "population" : "sample";
}

NormalizedTrajectory normalize_by_running_std(const Trajectory& t, StdConvention convention) {
  if (t.size() < 2) throw ArgumentError("running-std normalization needs at least two points");
  const std::size_t dim = t.dim();
  std::vector<double> mean(dim, 0.0);
  std::vector<double> m2(dim, 0.0);
  std::vector<double> out(t.flat().begin(), t.flat().end());
  std::size_t first_scaled = t.size();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double count = static_cast<double>(k + 1);
    for (std::size_t c = 0; c < dim; ++c) {
      const double x = t(k, c);
      const double delta = x - mean[c];
      mean[c] += delta / count;
      m2[c] += delta * (x - mean[c]);
    }
    if (k == 0 && convention == StdConvention::sample) continue;
    const double denom = convention == StdConvention::population ? count : count - 1.0;
    bool all_positive = true;
    for (std::size_t c = 0; c < dim; ++c) {
      if (!(m2[c] > 0.0)) all_positive = false;
    }
    if (!all_positive) continue;
    if (first_scaled == t.size()) first_scaled = k;
    for (std::size_t c = 0; c < dim; ++c) out[k * dim + c] = t(k, c) / std::sqrt(m2[c] / denom);
  }
  NormalizedTrajectory result{Trajectory(std::move(out), dim), first_scaled, first_scaled == t.size(), convention};
  return result;
}

}  // namespace tailchain
