#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "localmine/lexicon.hpp"
#include "localmine/sent_align.hpp"

namespace oracle {

/// Maximum-weight assignment over entries >= min_score (Hungarian method).
/// Returns (row, col) pairs sorted by row.
std::vector<std::pair<std::size_t, std::size_t>> best_assignment(const std::vector<std::vector<double>>& w,
                                                                 double min_score);

/// Minimum total cost over every bead tiling of an n x m grid, bead costs
/// taken from `cost(kind, src_start, trg_start)`. Counts tilings in `tilings`.
double brute_force_alignment(std::size_t n, std::size_t m,
                             const std::function<double(localmine::BeadKind, std::size_t, std::size_t)>& cost,
                             std::size_t* tilings = nullptr);

/// Standard normal upper tail and CDF by composite Simpson integration of the density.
double normal_upper_tail(double x);
double normal_cdf(double x);

/// -log(2 (1 - Phi(|delta|))) computed from normal_cdf.
double gale_church_cost(double l_src, double l_trg, double c, double s2);

std::string fixture(const std::string& rel);
std::string data_file(const std::string& rel);
std::string read_file(const std::string& path);
std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path);

}  // namespace oracle
