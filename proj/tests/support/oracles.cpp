#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oracle {

std::vector<std::pair<std::size_t, std::size_t>> best_assignment(const std::vector<std::vector<double>>& w,
                                                                 double min_score) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  // Minimisation form on a padded square matrix.
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i + 1][j + 1] = w[i][j] >= min_score ? -w[i][j] : 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(n + 1);
  std::vector<std::size_t> p(n + 1), way(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j];
    if (i == 0 || i > rows || j > cols) continue;
    if (w[i - 1][j - 1] >= min_score) out.emplace_back(i - 1, j - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void enumerate(std::size_t i, std::size_t j, std::size_t n, std::size_t m, double acc,
               const std::function<double(localmine::BeadKind, std::size_t, std::size_t)>& cost, double& best,
               std::size_t& count) {
  if (i == n && j == m) {
    ++count;
    best = std::min(best, acc);
    return;
  }
  for (localmine::BeadKind k : localmine::kAllBeadKinds) {
    const std::size_t a = localmine::src_count(k);
    const std::size_t b = localmine::trg_count(k);
    if (i + a > n || j + b > m) continue;
    enumerate(i + a, j + b, n, m, acc + cost(k, i, j), cost, best, count);
  }
}

}  // namespace

double brute_force_alignment(std::size_t n, std::size_t m,
                             const std::function<double(localmine::BeadKind, std::size_t, std::size_t)>& cost,
                             std::size_t* tilings) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  enumerate(0, 0, n, m, 0.0, cost, best, count);
  if (tilings) *tilings = count;
  return n == 0 && m == 0 ? 0.0 : best;
}

namespace {

double simpson(double a, double b, int steps, double (*f)(double)) {
  const double h = (b - a) / steps;
  double s = f(a) + f(b);
  for (int k = 1; k < steps; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

}  // namespace

double normal_upper_tail(double x) {
  if (x < 0) return 1.0 - normal_upper_tail(-x);
  // The density beyond x + 12 is below exp(-72) of its value at x.
  return simpson(x, x + 12.0, 400000, normal_pdf);
}

double normal_cdf(double x) { return 1.0 - normal_upper_tail(x); }

double gale_church_cost(double l_src, double l_trg, double c, double s2) {
  const double delta = (l_trg - c * l_src) / std::sqrt(std::max(l_src, 1.0) * s2);
  return -std::log(2.0 * normal_upper_tail(std::abs(delta)));
}

std::string fixture(const std::string& rel) { return std::string(LOCALMINE_FIXTURES) + "/" + rel; }
std::string data_file(const std::string& rel) { return std::string(LOCALMINE_DATA) + "/" + rel; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const auto tab2 = line.find('\t', tab + 1);
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab - 1));
  }
  return out;
}

}  // namespace oracle
