#pragma once

// Asymptotic-rate sweeps (DICKA vs (N-1) x DIQKD), their CSV form, and root
// finding for crossover and zero-rate noise levels.

#include <cmath>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dicka/errors.hpp"
#include "dicka/format.hpp"
#include "dicka/keyrate.hpp"

namespace dicka::rates {

struct RateRow {
  int n_parties = 0;
  double qber = 0.0;
  double r_cka = 0.0;
  double r_diqkd = 0.0;

  bool operator==(const RateRow&) const = default;
};

struct QberGrid {
  double q_min = 0.0;
  double q_max = 0.05;
  double q_step = 0.001;

  void validate() const {
    if (!(q_min >= 0.0 && q_max < 0.5 && q_min <= q_max)) throw DomainError("QBER grid must satisfy 0 <= q_min <= q_max < 1/2");
    if (!(q_step > 0.0)) throw DomainError("QBER grid step must be positive");
  }

  std::vector<double> points() const {
    validate();
    const auto count = static_cast<long>(std::floor((q_max - q_min) / q_step + 1e-9));
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(count + 1));
    for (long i = 0; i <= count; ++i) q.push_back(q_min + static_cast<double>(i) * q_step);
    return q;
  }
};

inline std::vector<RateRow> rate_table(const std::vector<int>& parties, const QberGrid& grid) {
  const auto qs = grid.points();
  std::vector<RateRow> rows;
  rows.reserve(parties.size() * qs.size());
  for (int n : parties) {
    if (n < 2) throw DomainError("rate table needs N >= 2");
    for (double q : qs) rows.push_back({n, q, keyrate::asymptotic_rate_cka(n, q), keyrate::asymptotic_rate_diqkd(n, q)});
  }
  return rows;
}

inline constexpr const char* kRateCsvHeader = "N,Q,r_cka,r_diqkd";

inline void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << kRateCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.n_parties << ',' << format_double(r.qber) << ',' << format_double(r.r_cka) << ','
       << format_double(r.r_diqkd) << '\n';
  }
}

inline std::vector<RateRow> read_rate_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRateCsvHeader) throw InvalidInput("rate CSV must start with the header row");
  std::vector<RateRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw InvalidInput("rate CSV row needs 4 columns: " + line);
    rows.push_back({std::stoi(cells[0]), std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
  }
  return rows;
}

/// Bisection for a sign change of f on [lo, hi] down to `tol`.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if ((flo > 0.0) == (f(hi) > 0.0)) throw DomainError("bisection bracket has no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First Q in [0, q_hi] where f turns non-positive, located by a 1e-4 scan
/// then bisection; nullopt if f stays positive.
inline std::optional<double> first_nonpositive(const std::function<double(double)>& f, double q_hi = 0.4999) {
  constexpr double scan = 1e-4;
  double prev = 0.0;
  for (double q = scan; q <= q_hi + 1e-15; q += scan) {
    if (f(q) <= 0.0) return bisect(f, prev, q);
    prev = q;
  }
  return std::nullopt;
}

struct Comparison {
  int n_parties = 0;
  std::optional<double> q_crossover;  // r_cka drops below r_diqkd
  std::optional<double> q_zero_cka;
  std::optional<double> q_zero_diqkd;
};

inline Comparison compare(int n_parties) {
  Comparison c;
  c.n_parties = n_parties;
  c.q_crossover = first_nonpositive(
      [n_parties](double q) { return keyrate::asymptotic_rate_cka(n_parties, q) - keyrate::asymptotic_rate_diqkd(n_parties, q); });
  c.q_zero_cka = first_nonpositive([n_parties](double q) { return keyrate::asymptotic_rate_cka(n_parties, q); });
  c.q_zero_diqkd = first_nonpositive([n_parties](double q) { return keyrate::asymptotic_rate_diqkd(n_parties, q); });
  return c;
}

inline constexpr const char* kCompareCsvHeader = "N,q_crossover,q_zero_cka,q_zero_diqkd";

inline void write_compare_csv(std::ostream& os, const std::vector<Comparison>& rows) {
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
  os << kCompareCsvHeader << '\n';
  for (const auto& c : rows) {
    os << c.n_parties << ',' << cell(c.q_crossover) << ',' << cell(c.q_zero_cka) << ',' << cell(c.q_zero_diqkd) << '\n';
  }
}

}  // namespace dicka::rates
