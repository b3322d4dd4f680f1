// analysis.cpp
#include "trop/analysis.hpp"

#include <algorithm>
#include <deque>

namespace trop {

AugRun seamless_baseline(const AugWfa& aug, const AWord& w) {
  if (!jump_free(aug, w)) throw Error("jump-present: the word contains jump letters");
  auto run = baseline_run(aug, aug.initial(), w);
  if (!run || !aug_is_seamless(aug, aug_unit(aug.initial()), *run))
    throw Error("no-seamless-baseline: the word has no seamless baseline run");
  return *run;
}

ChargeReport charge_of(const AugConfig& c) {
  if (c.empty()) throw Error("empty configuration");
  ChargeReport r{Weight::inf(), {}};
  for (const auto& [s, v] : c)
    if (v < r.psi) {
      r.psi = v;
      r.argmin = s;
    }
  r.psi = -r.psi;
  return r;
}

ChargeReport charge(const AugWfa& aug, const AWord& w) {
  seamless_baseline(aug, w);
  return charge_of(aug_xconf(aug, aug_unit(aug.initial()), w));
}

namespace {

AugSet below(const AugConfig& c, const AugState& s) {
  AugSet l;
  Weight v = c.at(s);
  for (const auto& [p, x] : c)
    if (x < v) l.insert(p);
  return l;
}

AWord suffix_alphabet(const AugWfa& aug, const DominanceParams& params) {
  if (!params.alphabet.empty()) return params.alphabet;
  AWord a(aug.num_base_letters());
  for (int i = 0; i < aug.num_base_letters(); ++i) a[i] = i;
  return a;
}

}  // namespace

bool separates(const AugWfa& aug, const AugConfig& c, const AugState& s, const AWord& suffix) {
  if (!c.count(s)) return false;
  return !reach(aug, {s}, suffix).empty() && reach(aug, below(c, s), suffix).empty();
}

std::optional<AWord> dominance_suffix(const AugWfa& aug, const AugConfig& c, const AugState& s,
                                      const DominanceParams& params) {
  if (params.horizon < 0) throw Error("horizon must be non-negative");
  if (!c.count(s)) return std::nullopt;
  AWord alphabet = suffix_alphabet(aug, params);
  using Node = std::pair<AugSet, AugSet>;
  std::map<Node, std::size_t> seen;
  std::vector<std::pair<std::size_t, ALetter>> parent;  // (parent node, letter)
  std::vector<Node> nodes;
  std::deque<std::pair<std::size_t, int>> queue;
  auto add = [&](Node n, std::size_t par, ALetter l, int depth) {
    if (seen.count(n)) return;
    seen.emplace(n, nodes.size());
    nodes.push_back(std::move(n));
    parent.push_back({par, l});
    queue.push_back({nodes.size() - 1, depth});
  };
  add({{s}, below(c, s)}, 0, -1, 0);
  while (!queue.empty()) {
    auto [id, depth] = queue.front();
    queue.pop_front();
    if (nodes[id].second.empty()) {
      AWord z;
      for (std::size_t x = id; x != 0; x = parent[x].first) z.push_back(parent[x].second);
      std::reverse(z.begin(), z.end());
      return z;
    }
    if (depth == params.horizon) continue;
    for (auto l : alphabet) {
      AugSet a = reach(aug, nodes[id].first, {l});
      if (a.empty()) continue;
      add({std::move(a), reach(aug, nodes[id].second, {l})}, id, l, depth + 1);
    }
  }
  return std::nullopt;
}

PotentialReport potential_of(const AugWfa& aug, const AugConfig& c, const DominanceParams& params) {
  if (c.empty()) throw Error("empty configuration");
  std::vector<std::pair<Weight, AugState>> order;
  for (const auto& [s, v] : c) order.push_back({v, s});
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (const auto& [v, s] : order)
    if (auto z = dominance_suffix(aug, c, s, params)) return {v, s, *z, params};
  throw std::logic_error("no-dominant-state");
}

PotentialReport potential(const AugWfa& aug, const AWord& w, const DominanceParams& params) {
  seamless_baseline(aug, w);
  return potential_of(aug, aug_xconf(aug, aug_unit(aug.initial()), w), params);
}

nlohmann::json potential_json(const AugWfa& aug, const PotentialReport& r) {
  return {{"phi", r.phi.finite() ? nlohmann::json(r.phi.value()) : nlohmann::json("inf")},
          {"dominant", aug.state_str(r.dominant)},
          {"suffix", word_to_json(aug, r.suffix)},
          {"horizon", r.params.horizon}};
}

GrowthReport bounded_growth_check(const AugWfa& aug, const AWord& alphabet, const std::vector<AWord>& samples,
                                  const DominanceParams& params) {
  GrowthReport rep;
  for (const auto& w : samples) {
    Weight before;
    try {
      before = potential(aug, w, params).phi;
    } catch (const Error&) {
      continue;
    }
    for (auto l : alphabet) {
      AWord ws = concat(w, {l});
      Weight after;
      try {
        after = potential(aug, ws, params).phi;
      } catch (const Error&) {
        continue;
      }
      ++rep.checked;
      Weight bound = wmul(aug_maxeff(aug, {l}), 2);
      if (after - before > bound) rep.findings.push_back({w, l, before, after, bound});
    }
  }
  return rep;
}

HighPotential construct_high_potential(AugWfa& aug, const AWord& u, ALetter sigma, std::int64_t P) {
  for (auto l : concat(u, {sigma})) {
    auto k = aug.letter(l).kind;
    if (k == LetterKind::Rebase || k == LetterKind::Jump)
      throw Error("flatten-unsupported: only base and cactus letters are allowed");
  }
  AWord us = concat(u, {sigma});
  Weight drop = charge(aug, u).psi - charge(aug, us).psi;
  if (!(drop > Weight(P) + wmul(aug_maxeff(aug, {sigma}), 2)))
    throw Error("precondition-unmet: the charge drop on sigma is too small");
  std::int64_t F = (wmul(aug_maxeff(aug, us), 2) + Weight(1)).value();
  HighPotential out;
  out.flat = flatten(aug, u, F);
  AugConfig c0 = aug_xconf(aug, aug_unit(aug.initial()), out.flat);
  AugState low = charge_of(c0).argmin, reader;
  Weight best = Weight::inf();
  for (const auto& [s, v] : c0)
    if (!aug.step(s, sigma).empty() && v < best) {
      best = v;
      reader = s;
    }
  if (!best.finite()) throw std::logic_error("no state reads sigma after flattening");
  // the global minimal run is seamless, so the shifted baseline is seamless too
  out.anchor = *aug_min_run(aug, aug_unit(aug.initial()), out.flat, low);
  out.word = shift_word(aug, out.flat, out.anchor);
  AugConfig cw = aug_xconf(aug, aug_unit(aug.initial()), out.word);
  AugState dom = shift_state(reader, low);
  AWord suffix{sigma};
  if (low.p != low.q) {
    // sigma was read from the old baseline, so jump back to it first
    Mask T = low.T;
    suffix.insert(suffix.begin(), aug.jump_letter({low.p, low.p, T}, {low.q, low.q, T}));
  }
  if (!separates(aug, cw, dom, suffix)) throw std::logic_error("high-potential certificate does not separate");
  if (!(cw.at(dom) > Weight(P))) throw std::logic_error("high-potential certificate is too low");
  seamless_baseline(aug, out.word);
  out.report = {cw.at(dom), dom, suffix, DominanceParams{static_cast<int>(suffix.size()), suffix}};
  return out;
}

MonotonicityReport monotonicity_check(const AugWfa& aug, const AugConfig& c, const AugConfig& d, const AWord& w,
                                      const DominanceParams& params) {
  if (aug_support(c) != aug_support(d)) throw Error("precondition-unmet: supports differ");
  std::optional<AugState> base;
  for (const auto& [s, v] : c) {
    if (d.at(s) < v) throw Error("precondition-unmet: c is not below d");
    if (s.p == s.q) {
      if (base) throw Error("precondition-unmet: more than one baseline state");
      base = s;
    }
  }
  if (!base || c.at(*base) != Weight(0) || d.at(*base) != Weight(0))
    throw Error("precondition-unmet: the baseline state must have value 0");
  auto run = baseline_run(aug, *base, w);
  if (!run || !aug_is_seamless(aug, c, *run)) throw Error("precondition-unmet: no seamless baseline run from c");
  MonotonicityReport r;
  r.seamless = aug_is_seamless(aug, d, *run);
  AugConfig cw = aug_xconf(aug, c, w), dw = aug_xconf(aug, d, w);
  r.phi_c = potential_of(aug, cw, params).phi;
  r.phi_d = potential_of(aug, dw, params).phi;
  r.psi_c = charge_of(cw).psi;
  r.psi_d = charge_of(dw).psi;
  r.phi_ok = r.phi_c <= r.phi_d;
  r.psi_ok = r.psi_c >= r.psi_d;
  return r;
}

bool in_class(const AugWfa& aug, ALetter l, LetterClass cls, const std::function<std::int64_t(int)>& length_fn,
              int max_depth) {
  const LetterDef& d = aug.letter(l);
  auto cac = [&](ALetter x) { return in_class(aug, x, LetterClass::Cac, length_fn, max_depth); };
  auto underlying = [&]() {
    LetterDef c;
    c.kind = LetterKind::Cactus;
    c.q = d.q;
    c.T = d.T;
    c.word = d.word;
    return aug.find(c);
  };
  switch (cls) {
    case LetterClass::Cac:
      if (d.kind == LetterKind::Base) return true;
      if (d.kind != LetterKind::Cactus || d.degenerate || d.depth > max_depth) return false;
      if (static_cast<std::int64_t>(d.word.size()) > length_fn(d.depth)) return false;
      return std::all_of(d.word.begin(), d.word.end(), cac);
    case LetterClass::CacReb:
      if (d.kind == LetterKind::Rebase) {
        auto a = underlying();
        return a && cac(*a);
      }
      return cac(l);
    case LetterClass::CacRebCac:
      if (d.kind != LetterKind::Cactus) return false;
      if (static_cast<std::int64_t>(d.word.size()) > length_fn(d.depth)) return false;
      return std::all_of(d.word.begin(), d.word.end(),
                         [&](ALetter x) { return in_class(aug, x, LetterClass::CacReb, length_fn, max_depth); });
    case LetterClass::CacRebJump:
      return d.kind == LetterKind::Jump || in_class(aug, l, LetterClass::CacReb, length_fn, max_depth);
  }
  return false;
}

WitnessVerdict check_witness(const AugWfa& aug, const AWord& w1, ALetter cactus, const AWord& w3, int type,
                             const WitnessAlphabets& alph) {
  auto fail = [](int clause, std::string msg) { return WitnessVerdict{false, clause, std::move(msg)}; };
  if (type != 0 && type != 1) return fail(1, "type must be 0 or 1");
  for (auto l : w1)
    if (!in_class(aug, l, LetterClass::Cac, alph.simple, alph.max_depth))
      return fail(1, "w1 letter " + aug.letter_str(l) + " is not a bounded simple cactus letter");
  const LetterDef& a = aug.letter(cactus);
  bool alpha_ok = type == 0 ? in_class(aug, cactus, LetterClass::Cac, alph.simple, alph.max_depth)
                            : in_class(aug, cactus, LetterClass::CacRebCac, alph.simple, alph.max_depth);
  if (a.kind != LetterKind::Cactus || !alpha_ok) return fail(1, "the cactus letter is outside the type's alphabet");
  if (ghost_reach(aug, aug.initial(), w1) != saturated(aug, a.q, a.T))
    return fail(1, "the cactus letter's state set is not the ghost set after w1");
  if (w3.empty()) return fail(1, "w3 is empty");
  for (std::size_t i = 0; i + 1 < w3.size(); ++i)
    if (!in_class(aug, w3[i], LetterClass::CacRebJump, alph.simple, alph.max_depth))
      return fail(1, "w3 letter " + aug.letter_str(w3[i]) + " is outside the simple alphabet with jumps");
  if (aug.letter(w3.back()).kind != LetterKind::Base &&
      !in_class(aug, w3.back(), LetterClass::CacRebCac, alph.general, alph.max_depth))
    return fail(1, "the last letter of w3 is neither a base letter nor a general cactus letter");

  std::int64_t m = cycle_m(aug, cycle_of(aug, cactus));
  AWord pumped = concat(w1, power(a.word, 2 * m));
  if (reach(aug, {aug.initial()}, w1) != reach(aug, {aug.initial()}, pumped))
    return fail(2, "w2^(2m) does not cycle on the reachable states");
  if (aug_xconf(aug, aug_unit(aug.initial()), concat(pumped, w3)).empty())
    return fail(3, "the pumped word has no finite run");
  if (!aug_xconf(aug, aug_unit(aug.initial()), concat(concat(w1, {cactus}), w3)).empty())
    return fail(3, "the word through the cactus letter has a finite run");
  return {true, 0, "witness"};
}

}  // namespace trop
