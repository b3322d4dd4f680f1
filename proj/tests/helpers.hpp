// helpers.hpp - fixtures and brute-force oracles shared by the tests
#pragma once

#include <functional>
#include <random>

#include "trop/core.hpp"

namespace testing_support {

using namespace trop;

inline Wfa fig1() {
  // q0=0 qa=1 qb=2, a=0 b=1
  return Wfa({"q0", "qa", "qb"}, {"a", "b"}, 0,
             {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 0, 0, 2}, {0, 1, 1, 2},
              {1, 0, 1, 1}, {1, 1, 0, 1}, {2, 0, 0, 2}, {2, 1, 1, 2}});
}

inline Wfa det1() { return Wfa({"q"}, {"a"}, 0, {{0, 0, 1, 0}}); }

inline Word rep(LetterId l, int n) { return Word(n, l); }
inline Word cat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// enumerates every run explicitly
inline Weight brute_mwt(const Wfa& a, StateId from, const Word& w, StateId to) {
  Weight best = Weight::inf();
  std::function<void(StateId, std::size_t, std::int64_t)> go = [&](StateId p, std::size_t i, std::int64_t acc) {
    if (i == w.size()) {
      if (p == to) best = wmin(best, Weight(acc));
      return;
    }
    for (const auto& t : a.transitions())
      if (t.from == p && t.letter == w[i]) go(t.to, i + 1, acc + t.weight.value());
  };
  go(from, 0, 0);
  return best;
}

inline Weight brute_eval(const Wfa& a, const Word& w) {
  Weight best = Weight::inf();
  for (StateId q = 0; q < a.num_states(); ++q) best = wmin(best, brute_mwt(a, a.initial(), w, q));
  return best;
}

inline void all_words(int letters, int max_len, const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> go = [&]() {
    f(w);
    if (static_cast<int>(w.size()) == max_len) return;
    for (int l = 0; l < letters; ++l) {
      w.push_back(l);
      go();
      w.pop_back();
    }
  };
  go();
}

inline Wfa random_wfa(std::mt19937& rng, int max_states, int letters, int lo, int hi, double density = 0.5) {
  std::uniform_int_distribution<int> ns(1, max_states), wt(lo, hi);
  std::bernoulli_distribution keep(density);
  int n = ns(rng);
  std::vector<std::string> st, al;
  for (int i = 0; i < n; ++i) st.push_back("s" + std::to_string(i));
  for (int i = 0; i < letters; ++i) al.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<Transition> ts;
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < letters; ++l)
      for (int q = 0; q < n; ++q)
        if (keep(rng)) ts.push_back({p, l, wt(rng), q});
  return trim(Wfa(st, al, 0, ts));
}

}  // namespace testing_support

#include "trop/augmented.hpp"

namespace testing_support {

// a random run of the automaton from its initial state, of the given length if one exists
inline std::optional<RunTrace> random_run(const Wfa& a, std::mt19937& rng, int len) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    RunTrace r;
    StateId cur = a.initial();
    bool ok = true;
    for (int i = 0; i < len && ok; ++i) {
      std::vector<Transition> opts;
      for (const auto& t : a.transitions())
        if (t.from == cur) opts.push_back(t);
      if (opts.empty()) {
        ok = false;
        break;
      }
      auto t = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
      r.steps.push_back({t.from, t.letter, t.weight, t.to});
      r.wt += t.weight;
      cur = t.to;
    }
    if (ok) return r;
  }
  return std::nullopt;
}

// a uniformly chosen run of the augmented automaton on w from s
inline std::optional<AugRun> random_aug_run(const AugWfa& aug, std::mt19937& rng, const AugState& s, const AWord& w) {
  // backwards reachability so the choice never dead-ends
  std::vector<AugSet> alive(w.size() + 1);
  std::vector<AugSet> fwd{{s}};
  for (auto l : w) fwd.push_back(reach(aug, fwd.back(), {l}));
  if (fwd.back().empty()) return std::nullopt;
  alive[w.size()] = fwd.back();
  for (std::size_t i = w.size(); i-- > 0;)
    for (const auto& x : fwd[i])
      for (const auto& [t, c] : aug.step(x, w[i]))
        if (alive[i + 1].count(t)) alive[i].insert(x);
  AugRun run;
  AugState cur = s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::vector<std::pair<AugState, Weight>> opts;
    for (const auto& [t, c] : aug.step(cur, w[i]))
      if (alive[i + 1].count(t)) opts.push_back({t, c});
    auto [t, c] = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
    run.steps.push_back({cur, w[i], c, t});
    run.wt += c;
    cur = t;
  }
  return run;
}

}  // namespace testing_support
