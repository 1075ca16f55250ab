#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "localmine/lexicon.hpp"
#include "localmine/text.hpp"

namespace localmine {

/// Bead shapes, source-count by target-count.
enum class BeadKind : std::uint8_t { Sub, Del, One, Expand, Contract, Merge };

inline constexpr std::array<BeadKind, 6> kAllBeadKinds = {BeadKind::Sub, BeadKind::Del, BeadKind::One,
                                                          BeadKind::Expand, BeadKind::Contract, BeadKind::Merge};

std::size_t src_count(BeadKind k);
std::size_t trg_count(BeadKind k);
/// "0-1", "1-0", "1-1", "1-2", "2-1", "2-2".
std::string_view to_string(BeadKind k);
BeadKind parse_bead_kind(std::string_view s);
/// Kind seen from the other side (Sub<->Del, Expand<->Contract).
BeadKind transpose(BeadKind k);

struct Span {
  std::size_t start = 0;
  std::size_t len = 0;
  bool operator==(const Span&) const = default;
};

struct Bead {
  BeadKind kind = BeadKind::One;
  Span src;
  Span trg;
  double cost = 0.0;
};

struct AlignmentLadder {
  std::vector<Bead> beads;
  double total_cost = 0.0;
};

/// Gale-Church length model plus bead priors.
struct LengthModel {
  double c = 1.0;
  double s2 = 6.8;
  std::array<double, 6> priors{};  // indexed by BeadKind

  static LengthModel defaults();
  double prior(BeadKind k) const { return priors[static_cast<std::size_t>(k)]; }
  /// Throws FatalError on c <= 0, s2 <= 0 or priors that are not a distribution.
  void validate() const;
};

inline constexpr double kMaxLengthCost = 25.0;

/// -log(2(1 - Phi(|delta|))), delta = (l_trg - c l_src) / sqrt(max(l_src,1) s2),
/// floored at 0 and capped at kMaxLengthCost.
double length_cost(std::size_t l_src, std::size_t l_trg, const LengthModel& model);

/// length_cost - log prior - lambda * dict_sim, clamped at 0. dict_sim is
/// 2m/(n_src+n_trg) over greedy lexicon matches; 0 for Sub/Del.
double bead_cost(BeadKind kind, std::span<const Sentence> src, std::span<const Sentence> trg, const Lexicon& lex,
                 const LengthModel& model, double lambda, Direction dir = Direction::JaToZh);

struct AlignConfig {
  LengthModel model = LengthModel::defaults();
  double lambda = 3.0;
  bool band = true;
  double band_min = 20.0;
  double band_frac = 0.15;
  Direction dir = Direction::JaToZh;
  /// Re-estimate c and s2 from the first pass's 1-1 beads and realign.
  bool reestimate = false;
};

/// Minimum-cost bead tiling. Ties prefer 1-1, then 2-1, 1-2, 2-2, 1-0, 0-1.
AlignmentLadder align_sentences(const std::vector<Sentence>& src, const std::vector<Sentence>& trg,
                                const Lexicon& lex, const AlignConfig& cfg = {});

struct AlignedPair {
  std::string src;
  std::string trg;
  double cost = 0.0;
  Bead bead;
};

/// Pairs from non-empty beads whose cost is at most max_cost; multi-sentence
/// spans are concatenated without a separator.
std::vector<AlignedPair> extract_pairs(const AlignmentLadder& ladder, const std::vector<Sentence>& src,
                                       const std::vector<Sentence>& trg, double max_cost);

/// TSV rows `src_start src_len trg_start trg_len kind cost`.
void write_ladder_tsv(std::ostream& out, const AlignmentLadder& ladder);

}  // namespace localmine
