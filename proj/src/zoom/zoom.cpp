#include "trop/zoom.hpp"

#include <algorithm>

namespace trop {

void ZoomThresholds::validate() const {
  auto pos = [](Weight w) { return w.finite() && w > Weight::zero(); };
  if (!pos(gap) || !pos(cover) || !pos(amp)) throw Error("invalid thresholds: gap, cover and amp must be positive");
  if (seg_min_len < 1 || seg_quantum < 1 || head_len < 0) throw Error("invalid thresholds: lengths must be positive");
  if (seg_count < 3) throw Error("invalid thresholds: seg_count must be at least 3");
}

namespace {

AugState state_at(const AugWfa& aug, const AugRun& run, std::size_t len) {
  return len == 0 ? aug.initial() : run.steps[len - 1].to;
}

Weight weight_at(const AugRun& run, std::size_t len) {
  Weight w = Weight::zero();
  for (std::size_t i = 0; i < len; ++i) w += run.steps[i].weight;
  return w;
}

void check_runs(const AugWfa& aug, const AWord& word, std::size_t len, const std::vector<AugRun>& runs) {
  for (const auto& r : runs) {
    if (r.steps.size() < len) throw Error("run-mismatch: a run is shorter than w1 w2");
    for (std::size_t i = 0; i < len; ++i)
      if (i >= word.size() || r.steps[i].letter != word[i]) throw Error("run-mismatch: a run reads another word");
    check_aug_run(aug, r);
  }
}

AugRun truncate(const AugRun& r, std::size_t len) {
  AugRun t;
  t.steps.assign(r.steps.begin(), r.steps.begin() + static_cast<std::ptrdiff_t>(len));
  t.wt = weight_at(r, len);
  return t;
}

// configurations after every prefix of w, starting from the initial state
std::vector<AugConfig> prefix_configs(const AugWfa& aug, const AWord& w) {
  std::vector<AugConfig> cs{aug_unit(aug.initial())};
  for (ALetter l : w) cs.push_back(aug_step(aug, cs.back(), l));
  return cs;
}

RunDiff run_diff(const AugConfig& cx, const AugConfig& cxy, const AugState& sx, const AugState& sxy, Weight wy,
                 Weight b) {
  RunDiff d;
  d.before = near_of(cx, sx, b);
  d.after = near_of(cxy, sxy, b);
  d.sign = wy < Weight::zero() ? -1 : (wy > Weight::zero() ? 1 : 0);
  return d;
}

std::vector<Weight> negate(std::vector<Weight> v) {
  for (auto& x : v) x = -x;
  return v;
}

AWord slice(const AWord& w, std::size_t from, std::size_t to) {
  return AWord(w.begin() + static_cast<std::ptrdiff_t>(from), w.begin() + static_cast<std::ptrdiff_t>(to));
}

// greedy shortest prefixes on a profile that must rise; values[k] is the value after k letters of w2
std::vector<std::size_t> greedy_cuts(const std::vector<Weight>& values, Weight first, Weight step, std::int64_t t) {
  std::vector<std::size_t> cuts;
  std::size_t k = 0;
  Weight target = values[0] + first;
  for (std::int64_t j = 0; j <= t; ++j) {
    while (k < values.size() && values[k] < target) ++k;
    if (k == values.size()) throw Error("amplitude-insufficient: the word ends before segment " + std::to_string(j));
    cuts.push_back(k);
    target += step;
  }
  return cuts;
}

// the level-set sweep over quantum-aligned positions; values must stay below their maximum on the chosen cuts
std::vector<std::size_t> level_cuts(const std::vector<Weight>& values, const ZoomThresholds& th) {
  std::size_t n = values.size() - 1;
  auto E = static_cast<std::size_t>(th.seg_quantum);
  if (n % E != 0) throw Error("quantum-misaligned: |w2| is not a multiple of the quantum");
  std::size_t h0 = (static_cast<std::size_t>(th.head()) + E - 1) / E * E;
  if (h0 > n) throw Error("no-level-set-found: w2 is shorter than the head");
  std::vector<std::size_t> pos;
  for (std::size_t p = h0; p <= n; p += E) pos.push_back(p);
  auto t = static_cast<std::size_t>(th.seg_count);
  std::size_t lo = 1, hi = pos.size();  // candidate indices [lo, hi)
  while (hi > lo && hi - lo >= t) {
    Weight P = values[pos[lo]];
    for (std::size_t k = lo; k < hi; ++k) P = std::max(P, values[pos[k]]);
    std::vector<std::size_t> at;
    for (std::size_t k = lo; k < hi; ++k)
      if (values[pos[k]] == P) at.push_back(k);
    if (at.size() >= t) {
      std::vector<std::size_t> cuts{pos[lo - 1]};
      for (std::size_t k = 0; k < t; ++k) cuts.push_back(pos[at[k]]);
      return cuts;
    }
    // the longest stretch strictly below P
    std::size_t best_lo = lo, best_hi = lo, start = lo;
    at.push_back(hi);
    for (std::size_t k : at) {
      if (k - start > best_hi - best_lo) best_lo = start, best_hi = k;
      start = k + 1;
    }
    lo = best_lo;
    hi = best_hi;
  }
  throw Error("no-level-set-found: w2 is too short for the thresholds");
}

Decomposition make(DecompKind kind, const AWord& w1, const AWord& w2, std::vector<std::size_t> cuts,
                   const std::vector<Weight>& prof) {
  Decomposition d;
  d.kind = kind;
  d.w1 = w1;
  d.w2 = w2;
  d.cuts = std::move(cuts);
  for (auto c : d.cuts) d.level.push_back(prof[c]);
  return d;
}

bool is_phi(DecompKind k) { return k == DecompKind::PhiIncreasing || k == DecompKind::PhiBounded; }
bool is_bounded(DecompKind k) { return k == DecompKind::PhiBounded || k == DecompKind::PsiBounded; }

void verified(const AugWfa& aug, const Decomposition& d, const ZoomThresholds& th, const DominanceParams& dom) {
  auto err = verify_decomposition(aug, d, th, dom);
  if (!err.empty()) throw Error("decomposition-check-failed: " + err);
}

}  // namespace

Weight independent_gap(const AugWfa& aug, const WordSplit& split, const std::vector<AugRun>& runs) {
  AWord w = split.word();
  std::size_t a = split.w1.size(), b = a + split.w2.size();
  check_runs(aug, w, b, runs);
  Weight g = Weight::inf();
  std::vector<Weight> acc(runs.size(), Weight::zero());
  for (std::size_t k = 0; k <= b; ++k) {
    if (k >= a)
      for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j) g = wmin(g, wabs(acc[i] - acc[j]));
    if (k < b)
      for (std::size_t i = 0; i < runs.size(); ++i) acc[i] += runs[i].steps[k].weight;
  }
  return g;
}

NearMap near_of(const AugConfig& c, const AugState& anchor, Weight b) {
  auto it = c.find(anchor);
  if (it == c.end()) throw Error("the run's state is not in the configuration");
  NearMap m;
  for (const auto& [s, v] : c) {
    Weight d = v - it->second;
    if (wabs(d) <= b) m[s] = d.value();
  }
  return m;
}

NearMap near(const AugWfa& aug, const AugRun& run, const AWord& prefix, Weight b) {
  check_runs(aug, prefix, prefix.size(), {run});
  return near_of(aug_xconf(aug, aug_unit(aug.initial()), prefix), state_at(aug, run, prefix.size()), b);
}

DiffType diff_type(const AugWfa& aug, const std::vector<AugRun>& runs, const AWord& word, std::size_t x_len,
                   std::size_t y_len, Weight b) {
  if (x_len + y_len > word.size()) throw Error("run-mismatch: x y exceeds the word");
  check_runs(aug, word, x_len + y_len, runs);
  AugConfig cx = aug_xconf(aug, aug_unit(aug.initial()), slice(word, 0, x_len));
  AugConfig cxy = aug_xconf(aug, cx, slice(word, x_len, x_len + y_len));
  DiffType d;
  for (const auto& r : runs)
    d.push_back(run_diff(cx, cxy, state_at(aug, r, x_len), state_at(aug, r, x_len + y_len),
                         weight_at(r, x_len + y_len) - weight_at(r, x_len), b));
  return d;
}

mpz_class diff_type_bound(std::int64_t runs, std::int64_t b, std::int64_t S) {
  mpz_class three, base;
  mpz_ui_pow_ui(three.get_mpz_t(), 3, static_cast<unsigned long>(runs));
  mpz_ui_pow_ui(base.get_mpz_t(), static_cast<unsigned long>(2 * b + 2), static_cast<unsigned long>(2 * S * runs));
  return three * base;
}

AWord Decomposition::segment(std::size_t j) const {
  if (j == 0) return slice(w2, 0, cuts[0]);
  if (j <= t()) return slice(w2, cuts[j - 1], cuts[j]);
  if (j == t() + 1) return slice(w2, cuts.back(), w2.size());
  throw Error("segment index out of range");
}

AWord Decomposition::prefix(std::size_t j) const { return concat(w1, slice(w2, 0, cuts.at(j))); }

std::vector<Weight> phi_profile(const AugWfa& aug, const AWord& w1, const AWord& w2, const DominanceParams& dom) {
  seamless_baseline(aug, concat(w1, w2));
  std::vector<Weight> out;
  AugConfig c = aug_xconf(aug, aug_unit(aug.initial()), w1);
  out.push_back(potential_of(aug, c, dom).phi);
  for (ALetter l : w2) {
    c = aug_step(aug, c, l);
    out.push_back(potential_of(aug, c, dom).phi);
  }
  return out;
}

std::vector<Weight> psi_profile(const AugWfa& aug, const AWord& w1, const AWord& w2) {
  seamless_baseline(aug, concat(w1, w2));
  std::vector<Weight> out;
  AugConfig c = aug_xconf(aug, aug_unit(aug.initial()), w1);
  out.push_back(charge_of(c).psi);
  for (ALetter l : w2) {
    c = aug_step(aug, c, l);
    out.push_back(charge_of(c).psi);
  }
  return out;
}

Decomposition decompose_phi_increasing(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                       Weight letter_maxw, const DominanceParams& dom) {
  th.validate();
  auto prof = phi_profile(aug, w1, w2, dom);
  if (!(prof.back() - prof.front() > th.amp))
    throw Error("amplitude-insufficient: the potential rises by at most amp");
  Weight mw = std::max(letter_maxw, Weight(1));
  auto cuts = greedy_cuts(prof, wmul(mw, 4 * th.head()), wmul(mw, 4 * th.seg_min_len), th.seg_count);
  auto d = make(DecompKind::PhiIncreasing, w1, w2, std::move(cuts), prof);
  verified(aug, d, th, dom);
  return d;
}

Decomposition decompose_phi_bounded(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                    const DominanceParams& dom) {
  th.validate();
  auto prof = phi_profile(aug, w1, w2, dom);
  for (const auto& v : prof)
    if (wabs(v - prof.front()) > th.amp) throw Error("amplitude-exceeded: the potential leaves the band");
  auto d = make(DecompKind::PhiBounded, w1, w2, level_cuts(prof, th), prof);
  verified(aug, d, th, dom);
  return d;
}

Decomposition decompose_psi_decreasing(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th,
                                       Weight letter_maxw, Weight H, Weight drop_bound) {
  th.validate();
  auto prof = psi_profile(aug, w1, w2);
  for (std::size_t k = 0; k + 1 < prof.size(); ++k)
    if (prof[k] - prof[k + 1] > drop_bound)
      throw Error("drop-bound-violated: the charge drops by more than the bound at letter " + std::to_string(k));
  if (!(prof.front() - prof.back() > th.amp)) throw Error("amplitude-insufficient: the charge drops by at most amp");
  Weight mw = wmul(std::max(letter_maxw, Weight(1)), 2) + H;
  auto cuts = greedy_cuts(negate(prof), wmul(mw, 4 * th.head()), wmul(mw, 4 * th.seg_min_len), th.seg_count);
  auto d = make(DecompKind::PsiDecreasing, w1, w2, std::move(cuts), prof);
  verified(aug, d, th, {});
  return d;
}

Decomposition decompose_psi_bounded(const AugWfa& aug, const AWord& w1, const AWord& w2, const ZoomThresholds& th) {
  th.validate();
  auto prof = psi_profile(aug, w1, w2);
  for (const auto& v : prof)
    if (wabs(v - prof.front()) > th.amp) throw Error("amplitude-exceeded: the charge leaves the band");
  auto d = make(DecompKind::PsiBounded, w1, w2, level_cuts(negate(prof), th), prof);
  verified(aug, d, th, {});
  return d;
}

std::string verify_decomposition(const AugWfa& aug, const Decomposition& d, const ZoomThresholds& th,
                                 const DominanceParams& dom) {
  if (d.cuts.size() < 2) return "no segments";
  for (std::size_t j = 1; j < d.cuts.size(); ++j)
    if (d.cuts[j] <= d.cuts[j - 1]) return "cuts are not increasing";
  if (d.cuts.back() > d.w2.size()) return "cut beyond w2";
  if (static_cast<std::int64_t>(d.t()) != th.seg_count) return "item 1: wrong number of segments";
  auto prof = is_phi(d.kind) ? phi_profile(aug, d.w1, d.w2, dom) : psi_profile(aug, d.w1, d.w2);
  // orient so that the definitions read as for phi
  auto v = is_phi(d.kind) ? prof : negate(prof);
  std::size_t t = d.t();
  if (static_cast<std::int64_t>(d.cuts[0]) < th.head()) return "item 4: u_0 is too short";
  if (!is_bounded(d.kind)) {
    for (std::size_t j = 1; j <= t; ++j) {
      if (!(v[d.cuts[j - 1]] < v[d.cuts[j]])) return "item 2: values at the cuts are not strictly monotone";
      for (std::size_t k = d.cuts[j - 1]; k < d.cuts[j]; ++k)
        if (v[k] > v[d.cuts[j]]) return "item 3: a prefix of u_" + std::to_string(j) + " passes its end";
      if (static_cast<std::int64_t>(d.cuts[j] - d.cuts[j - 1]) < th.seg_min_len)
        return "item 5: u_" + std::to_string(j) + " is too short";
    }
    return {};
  }
  auto E = static_cast<std::size_t>(th.seg_quantum);
  for (std::size_t j = 2; j <= t; ++j)
    if (v[d.cuts[j]] != v[d.cuts[1]]) return "item 2: values at the cuts differ";
  if (d.cuts[0] % E != 0) return "item 3: |u_0| is not a multiple of the quantum";
  for (std::size_t j = 1; j <= t; ++j) {
    if ((d.cuts[j] - d.cuts[j - 1]) % E != 0) return "item 3: |u_" + std::to_string(j) + "| is not a multiple";
    for (std::size_t k = d.cuts[j - 1] + E; k < d.cuts[j]; k += E)
      if (v[k] > v[d.cuts[j]]) return "item 5: an aligned prefix of u_" + std::to_string(j) + " passes the level";
  }
  return {};
}

CoverResult check_cover(const AugWfa& aug, const Decomposition& d, const std::vector<AugRun>& runs, Weight b) {
  AWord w = concat(d.w1, d.w2);
  std::size_t end = d.w1.size() + d.cuts.back();
  check_runs(aug, w, end, runs);
  auto cs = prefix_configs(aug, slice(w, 0, end));
  for (std::size_t j = 1; j <= d.t(); ++j) {
    std::size_t len = d.w1.size() + d.cuts[j];
    const AugConfig& c = cs[len];
    for (const auto& [s, x] : c) {
      bool near_some = false;
      for (const auto& r : runs) {
        auto it = c.find(state_at(aug, r, len));
        if (it != c.end() && wabs(x - it->second) <= b) {
          near_some = true;
          break;
        }
      }
      if (!near_some) return {false, j, s};
    }
  }
  return {};
}

std::vector<std::array<std::size_t, 3>> monochromatic_triangles(const std::vector<std::vector<int>>& col) {
  std::vector<std::array<std::size_t, 3>> out;
  std::size_t n = col.size();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      if (col[j][k] < 0) continue;
      for (std::size_t l = k + 1; l < n; ++l)
        if (col[k][l] == col[j][k] && col[j][l] == col[j][k]) out.push_back({j, k, l});
    }
  return out;
}

Extraction extract_sri(const AugWfa& aug, const Decomposition& d, const AWord& w3, const std::vector<AugRun>& runs,
                       Weight b, const SriParams& params) {
  Extraction out;
  std::size_t t = d.t();
  if (t < 3) {
    out.diagnostic = "insufficient segments";
    return out;
  }
  AWord w = concat(concat(d.w1, d.w2), w3);
  std::size_t base = d.w1.size();
  check_runs(aug, w, base + d.cuts.back(), runs);
  auto cs = prefix_configs(aug, slice(w, 0, base + d.cuts.back()));
  // vertex j stands for the position w1 v_{j-1}
  auto posn = [&](std::size_t j) { return base + d.cuts[j - 1]; };
  std::map<DiffType, int> ids;
  std::vector<std::vector<int>> col(t + 1, std::vector<int>(t + 1, -1));
  for (std::size_t j = 1; j <= t; ++j)
    for (std::size_t k = j + 1; k <= t; ++k) {
      std::size_t x = posn(j), xy = posn(k);
      DiffType dt;
      for (const auto& r : runs)
        dt.push_back(run_diff(cs[x], cs[xy], state_at(aug, r, x), state_at(aug, r, xy),
                              weight_at(r, xy) - weight_at(r, x), b));
      col[j][k] = ids.emplace(std::move(dt), static_cast<int>(ids.size())).first->second;
    }
  std::string last;
  for (const auto& [j, k, l] : monochromatic_triangles(col)) {
    ++out.cliques;
    AWord u = slice(w, 0, posn(j)), x = slice(w, posn(j), posn(k)), y = slice(w, posn(k), posn(l)),
          v = slice(w, posn(l), w.size());
    auto chk = check_sri(aug, u, x, y, v, params);
    if (chk.sri) {
      out.sri = std::move(chk.sri);
      out.clique = {j, k, l};
      out.diagnostic.clear();
      return out;
    }
    last = chk.diagnostic;
  }
  out.diagnostic = out.cliques == 0 ? "no monochromatic triangle" : "no triangle passes the SRI check: " + last;
  return out;
}

ZoomOutcome zoom_step(const AugWfa& aug, const WordSplit& split, const std::vector<AugRun>& runs,
                      const ZoomParams& params) {
  try {
    const ZoomThresholds& th = params.th;
    th.validate();
    const ZoomThresholds& next = params.next ? *params.next : th;
    next.validate();
    Weight g = independent_gap(aug, split, runs);
    if (g < th.gap) return ZoomError{"precondition: the runs are not independent with the required gap"};
    bool simple = params.sri.kind == SriKind::Simple;
    const DominanceParams& dom = params.sri.dom;
    auto prof = simple ? phi_profile(aug, split.w1, split.w2, dom) : negate(psi_profile(aug, split.w1, split.w2));
    if (prof.back() < prof.front())
      return ZoomError{simple ? "precondition: the word is not phi-increasing" : "precondition: the word is not "
                                                                                 "psi-decreasing"};
    Weight maxw = std::max(aug_wmax(aug, split.w2), Weight(1));
    AWord w1 = split.w1, w2 = split.w2;
    std::size_t hi = 0, lo = 0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
      if (prof[k] > prof[hi]) hi = k;
      if (prof[k] < prof[lo]) lo = k;
    }
    Decomposition d;
    bool high = true;
    if (prof.back() - prof[0] > th.amp) {
    } else if (prof[hi] - prof[0] > th.amp) {
      w2 = slice(split.w2, 0, hi);  // the prefix up to the highest point
    } else if (prof[0] - prof[lo] > th.amp) {
      // the suffix after the lowest point rises by more than amp
      w1 = concat(split.w1, slice(split.w2, 0, lo));
      w2 = slice(split.w2, lo, split.w2.size());
    } else {
      high = false;
    }
    if (high) {
      d = simple ? decompose_phi_increasing(aug, w1, w2, th, maxw, dom)
                 : decompose_psi_decreasing(aug, w1, w2, th, maxw, params.H, params.drop_bound);
    } else {
      auto E = static_cast<std::size_t>(th.seg_quantum);
      w2 = slice(split.w2, 0, split.w2.size() / E * E);
      d = simple ? decompose_phi_bounded(aug, w1, w2, th, dom) : decompose_psi_bounded(aug, w1, w2, th);
    }
    std::size_t end = w1.size() + w2.size();
    AWord word = split.word();
    AWord w3 = slice(word, end, word.size());
    auto cover = check_cover(aug, d, runs, th.cover);
    if (cover.covered) {
      auto ex = extract_sri(aug, d, w3, runs, wmul(th.cover, 2), params.sri);
      if (!ex.sri) return ZoomError{"covered without an SRI: " + ex.diagnostic};
      return ZoomSri{std::move(d), std::move(ex)};
    }
    // zoom in on the escaping state
    std::int64_t window = th.head();
    if (wmul(th.cover, 2) - wmul(maxw, 4 * window) < next.cover)
      return ZoomError{"thresholds-inconsistent: cover - 2 window maxw < next cover / 2"};
    AWord pre = d.prefix(cover.segment);
    auto pi = aug_min_run(aug, aug_unit(aug.initial()), pre, cover.state);
    if (!pi || !aug_is_seamless(aug, aug_unit(aug.initial()), *pi))
      return ZoomError{"no seamless minimal run to the escaping state"};
    ZoomNewRun nr;
    nr.segment = cover.segment;
    nr.escaped = cover.state;
    auto cut = pre.size() - static_cast<std::size_t>(window);
    nr.split = {slice(pre, 0, cut), slice(pre, cut, pre.size()), {}};
    for (const auto& r : runs) nr.runs.push_back(truncate(r, pre.size()));
    nr.runs.push_back(*pi);
    nr.gap = independent_gap(aug, nr.split, nr.runs);
    if (wmul(nr.gap, 2) < next.cover) return ZoomError{"certification failed: the new runs are too close"};
    nr.decomposition = std::move(d);
    return nr;
  } catch (const Error& e) {
    return ZoomError{e.what()};
  }
}

nlohmann::json decomposition_to_json(const AugWfa& aug, const Decomposition& d) {
  static const char* names[] = {"phi-increasing", "phi-bounded", "psi-decreasing", "psi-bounded"};
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& v : d.level) lv.push_back(v.value());
  return {{"kind", names[static_cast<int>(d.kind)]},
          {"w1", word_to_json(aug, d.w1)},
          {"w2", word_to_json(aug, d.w2)},
          {"cuts", d.cuts},
          {"level", lv}};
}

nlohmann::json zoom_to_json(const AugWfa& aug, const ZoomOutcome& z) {
  if (const auto* s = std::get_if<ZoomSri>(&z))
    return {{"outcome", "sri"},
            {"decomposition", decomposition_to_json(aug, s->decomposition)},
            {"clique", s->extraction.clique},
            {"sri", sri_to_json(aug, *s->extraction.sri)}};
  if (const auto* n = std::get_if<ZoomNewRun>(&z)) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : n->runs) {
      nlohmann::json states = nlohmann::json::array();
      for (const auto& st : r.steps) states.push_back(aug.state_str(st.to));
      runs.push_back(states);
    }
    return {{"outcome", "new-run"},
            {"decomposition", decomposition_to_json(aug, n->decomposition)},
            {"segment", n->segment},
            {"escaped", aug.state_str(n->escaped)},
            {"w1", word_to_json(aug, n->split.w1)},
            {"w2", word_to_json(aug, n->split.w2)},
            {"runs", runs},
            {"gap", n->gap.value()}};
  }
  return {{"outcome", "error"}, {"message", std::get<ZoomError>(z).message}};
}

}  // namespace trop
