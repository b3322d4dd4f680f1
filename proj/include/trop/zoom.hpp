// zoom.hpp
#pragma once

#include <array>
#include <variant>

#include "trop/sri.hpp"

namespace trop {

struct ZoomThresholds {
  Weight gap = 1;
  Weight cover = 1;  // b
  Weight amp = 1;
  std::int64_t seg_min_len = 1;
  std::int64_t seg_count = 3;    // t
  std::int64_t seg_quantum = 1;  // E
  std::int64_t head_len = 0;     // minimal |u_0| and the zoom window; 0: seg_min_len
  std::int64_t head() const { return head_len > 0 ? head_len : seg_min_len; }
  void validate() const;
};

struct WordSplit {
  AWord w1, w2, w3;
  AWord word() const { return concat(concat(w1, w2), w3); }
};

// state -> signed offset from the run's state, for offsets within [-b, b]
using NearMap = std::map<AugState, std::int64_t>;

struct RunDiff {
  NearMap before;
  int sign = 0;
  NearMap after;
  bool operator==(const RunDiff&) const = default;
  auto operator<=>(const RunDiff&) const = default;
};
using DiffType = std::vector<RunDiff>;

// runs are read on the word w1 w2 w3 (or a prefix covering w1 w2); inf for fewer than two runs
Weight independent_gap(const AugWfa& aug, const WordSplit& split, const std::vector<AugRun>& runs);

NearMap near_of(const AugConfig& c, const AugState& anchor, Weight b);
NearMap near(const AugWfa& aug, const AugRun& run, const AWord& prefix, Weight b);
// x is the prefix |x| letters of the runs' word, y the next |y| letters
DiffType diff_type(const AugWfa& aug, const std::vector<AugRun>& runs, const AWord& word, std::size_t x_len,
                   std::size_t y_len, Weight b);
// 3^i (2b+2)^(2|S|i)
mpz_class diff_type_bound(std::int64_t runs, std::int64_t b, std::int64_t S);

enum class DecompKind { PhiIncreasing, PhiBounded, PsiDecreasing, PsiBounded };

struct Decomposition {
  DecompKind kind = DecompKind::PhiIncreasing;
  AWord w1, w2;
  std::vector<std::size_t> cuts;  // |v_0| .. |v_t| within w2; u_{t+1} is the rest
  std::vector<Weight> level;      // phi or psi after w1 v_j
  std::size_t t() const { return cuts.size() - 1; }
  AWord segment(std::size_t j) const;  // u_j for 0 <= j <= t+1
  AWord prefix(std::size_t j) const;   // w1 v_j
};

// phi or psi along every prefix of w1 w2, after checking the seamless baseline
std::vector<Weight> phi_profile(const AugWfa& aug, const AWord& w1, const AWord& w2, const DominanceParams& dom);
std::vector<Weight> psi_profile(const AugWfa& aug, const AWord& w1, const AWord& w2);

// errors: amplitude-insufficient
Decomposition decompose_phi_increasing(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                       Weight letter_maxw, const DominanceParams& dom);
// errors: amplitude-exceeded, quantum-misaligned, no-level-set-found
Decomposition decompose_phi_bounded(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                    const DominanceParams& dom);
// errors: amplitude-insufficient, drop-bound-violated
Decomposition decompose_psi_decreasing(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                       Weight letter_maxw, Weight H, Weight drop_bound);
Decomposition decompose_psi_bounded(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th);

// the clauses of the decomposition's definition; empty when all hold
std::string verify_decomposition(const AugWfa& aug, const Decomposition& d, const ZoomThresholds& th,
                                 const DominanceParams& dom);

struct CoverResult {
  bool covered = true;
  std::size_t segment = 0;
  AugState state;
};
CoverResult check_cover(const AugWfa& aug, const Decomposition& d, const std::vector<AugRun>& runs, Weight b);

// monochromatic triangles j < k < l of an edge colouring given as col[j][k] for j < k, in lexicographic order
std::vector<std::array<std::size_t, 3>> monochromatic_triangles(const std::vector<std::vector<int>>& col);

struct Extraction {
  std::optional<SriDecomposition> sri;
  std::array<std::size_t, 3> clique{};
  int cliques = 0;  // monochromatic triangles examined
  std::string diagnostic;
};
// edges are coloured by diff_type with bound b
Extraction extract_sri(const AugWfa& aug, const Decomposition& d, const AWord& w3, const std::vector<AugRun>& runs,
                       Weight b, const SriParams& params);

struct ZoomSri {
  Decomposition decomposition;
  Extraction extraction;
};
struct ZoomNewRun {
  Decomposition decomposition;
  std::size_t segment = 0;
  AugState escaped;
  WordSplit split;
  std::vector<AugRun> runs;
  Weight gap;
};
struct ZoomError {
  std::string message;
};
using ZoomOutcome = std::variant<ZoomSri, ZoomNewRun, ZoomError>;

struct ZoomParams {
  ZoomThresholds th;
  std::optional<ZoomThresholds> next;  // thresholds for i+1 runs; defaults to th
  SriParams sri;
  Weight H = 0;
  Weight drop_bound = Weight::inf();
};
ZoomOutcome zoom_step(const AugWfa& aug, const WordSplit& split, const std::vector<AugRun>& runs,
                      const ZoomParams& params);

nlohmann::json decomposition_to_json(const AugWfa& aug, const Decomposition& d);
nlohmann::json zoom_to_json(const AugWfa& aug, const ZoomOutcome& z);

}  // namespace trop
