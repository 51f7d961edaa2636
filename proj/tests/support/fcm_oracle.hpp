#pragma once

// Brute-force reference implementation of the mixed finite-context estimator.
// Counts live in std::map keyed by the literal context string; nothing is
// hashed, packed or cached, so agreement with the library is meaningful.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Fcm {
  int order = 0;
  double alpha = 1.0 / 16;
  std::map<std::string, std::array<double, 4>> counts;
  std::array<double, 4> order0{};

  static int index(char c) {
    switch (c) {
      case 'A': return 0;
      case 'C': return 1;
      case 'G': return 2;
      default: return 3;
    }
  }

  void train(const std::string& s) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j >= static_cast<std::size_t>(order)) counts[s.substr(j - order, order)][index(s[j])] += 1;
      order0[index(s[j])] += 1;
    }
  }

  std::array<double, 4> predict(const std::string& seq, std::size_t j) const {
    std::array<double, 4> c{};
    if (j < static_cast<std::size_t>(order)) {
      c = order0;
    } else if (auto it = counts.find(seq.substr(j - order, order)); it != counts.end()) {
      c = it->second;
    }
    const double n = c[0] + c[1] + c[2] + c[3];
    std::array<double, 4> p{};
    for (int s = 0; s < 4; ++s) p[s] = (c[s] + alpha) / (n + 4 * alpha);
    return p;
  }
};

/// Per-symbol mixture sum_i w_i P_i, then w_i <- (w_i P_i(x))^gamma,
/// renormalized; weights start uniform for every estimated string.
inline double code_length(const std::vector<Fcm>& models, const std::string& seq, double gamma = 0.99) {
  std::vector<double> w(models.size(), 1.0 / models.size());
  double bits = 0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const int x = Fcm::index(seq[j]);
    std::vector<std::array<double, 4>> p;
    double mixed = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      p.push_back(models[i].predict(seq, j));
      mixed += w[i] * p.back()[x];
    }
    bits -= std::log2(mixed);
    double sum = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
      w[i] = std::pow(w[i] * p[i][x], gamma);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  return bits;
}

}  // namespace oracle
