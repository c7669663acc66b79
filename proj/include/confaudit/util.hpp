#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "confaudit/error.hpp"

namespace confaudit {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline double sample_sd(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs));
}

// Linear-interpolation quantile (R type 7) on unsorted data.
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw NumericError("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  if (xs.size() == 1) return xs[0];
  double h = p * static_cast<double>(xs.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

// Median as midpoint of order statistics (not interpolated quantile).
inline double median(std::vector<double> xs) {
  if (xs.empty()) throw NumericError("median of empty sample");
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Shortest round-trip decimal form; locale-free, so file output is stable.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  if (first == last) return false;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

// FNV-1a digest of a file's bytes, for input provenance in run manifests.
inline std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace confaudit
