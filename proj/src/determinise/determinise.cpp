#include "trop/determinise.hpp"

#include <deque>
#include <map>
#include <set>

namespace trop {

namespace {

nlohmann::json wjson(Weight w) {
  if (w.finite()) return w.value();
  return "inf";
}

}  // namespace

std::string canonical_name(const DetConfig& c, const Wfa& source) {
  std::string s = "{";
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) s += ",";
    s += source.state_name(c[k].first) + ":" + std::to_string(c[k].second);
  }
  return s + "}";
}

Weight DetWfa::eval(const Word& w) const {
  Weight v = 0;
  int c = 0;
  for (LetterId l : w) {
    if (l < 0 || l >= num_letters()) throw Error("letter out of range");
    const DetMove& m = move(c, l);
    if (m.to < 0) return Weight::inf();
    v += m.out;
    c = m.to;
  }
  return v;
}

std::string DetWfa::config_name(int c, const Wfa& source) const { return canonical_name(configs.at(c), source); }

Wfa DetWfa::to_wfa(const Wfa& source) const {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < configs.size(); ++c) names.push_back(config_name(static_cast<int>(c), source));
  std::vector<Transition> ts;
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (LetterId l = 0; l < num_letters(); ++l) {
      const DetMove& m = move(static_cast<int>(c), l);
      if (m.to >= 0) ts.push_back({static_cast<StateId>(c), l, m.out, m.to});
    }
  return Wfa(names, alphabet, 0, ts);
}

DetWfa build_restriction(const Wfa& a, std::int64_t B, std::size_t max_configs) {
  if (B < 0) throw Error("B must be non-negative");
  DetWfa det;
  det.B = B;
  det.alphabet = a.alphabet();
  std::map<DetConfig, int> index;
  DetConfig init{{a.initial(), 0}};
  index[init] = 0;
  det.configs.push_back(init);
  for (std::size_t c = 0; c < det.configs.size(); ++c) {
    for (LetterId l = 0; l < a.num_letters(); ++l) {
      std::vector<Weight> full(a.num_states(), Weight::inf());
      for (const auto& [p, off] : det.configs[c])
        for (const auto& e : a.out(p, l)) full[e.to] = wmin(full[e.to], Weight(off) + e.weight);
      Weight m = Weight::inf();
      for (Weight w : full) m = wmin(m, w);
      if (!m.finite()) {
        det.moves.push_back({});
        continue;
      }
      DetConfig next;
      for (StateId q = 0; q < a.num_states(); ++q)
        if (full[q].finite() && full[q] - m <= Weight(B)) next.push_back({q, (full[q] - m).value()});
      auto [it, fresh] = index.emplace(next, static_cast<int>(det.configs.size()));
      if (fresh) {
        if (det.configs.size() >= max_configs)
          throw Error("state-budget-exceeded: more than " + std::to_string(max_configs) + " configurations");
        det.configs.push_back(next);
      }
      det.moves.push_back({it->second, m});
    }
  }
  return det;
}

EquivalenceVerdict check_equiv(const Wfa& a, const DetWfa& det, std::size_t max_frontier) {
  if (det.alphabet != a.alphabet()) throw Error("the deterministic automaton is over a different alphabet");
  const int C = static_cast<int>(det.configs.size());
  const int L = a.num_letters();
  // product node (p, c) with c = C for the dead configuration; value = A-run weight - det weight
  auto node = [&](StateId p, int c) { return static_cast<std::size_t>(p) * (C + 1) + c; };
  std::vector<Weight> dist(static_cast<std::size_t>(a.num_states()) * (C + 1), Weight::inf());
  std::vector<bool> queued(dist.size(), false);
  std::deque<std::pair<StateId, int>> work{{a.initial(), 0}};
  dist[node(a.initial(), 0)] = 0;
  queued[node(a.initial(), 0)] = true;
  bool negative = false;
  while (!work.empty() && !negative) {
    auto [p, c] = work.front();
    work.pop_front();
    queued[node(p, c)] = false;
    for (LetterId l = 0; l < L && !negative; ++l) {
      const DetMove& m = det.move(c, l);
      for (const auto& e : a.out(p, l)) {
        if (m.to < 0) {
          negative = true;  // A has a run, A|_B has none
          break;
        }
        Weight v = dist[node(p, c)] + e.weight - m.out;
        if (v < Weight::zero()) {
          negative = true;
          break;
        }
        std::size_t k = node(e.to, m.to);
        if (v < dist[k]) {
          dist[k] = v;
          if (!queued[k]) {
            queued[k] = true;
            work.emplace_back(e.to, m.to);
          }
        }
      }
    }
  }
  EquivalenceVerdict verdict;
  if (!negative) return verdict;
  verdict.equivalent = false;

  // shortest, then lexicographically least, word with A(w) < A|_B(w)
  using Key = std::pair<int, std::vector<Weight>>;
  std::vector<Weight> d0(a.num_states(), Weight::inf());
  d0[a.initial()] = 0;
  std::set<Key> seen{{0, d0}};
  std::deque<std::pair<Key, Word>> queue{{{0, d0}, {}}};
  while (!queue.empty()) {
    auto [key, w] = queue.front();
    queue.pop_front();
    for (LetterId l = 0; l < L; ++l) {
      const DetMove& m = det.move(key.first, l);
      std::vector<Weight> d(a.num_states(), Weight::inf());
      bool alive = false;
      for (StateId p = 0; p < a.num_states(); ++p) {
        if (!key.second[p].finite()) continue;
        for (const auto& e : a.out(p, l)) {
          d[e.to] = wmin(d[e.to], key.second[p] + e.weight);
          alive = true;
        }
      }
      if (!alive) continue;
      Word w2 = w;
      w2.push_back(l);
      bool found = m.to < 0;
      if (!found) {
        for (auto& x : d) {
          if (!x.finite()) continue;
          x = x - m.out;
          if (x < Weight::zero()) found = true;
        }
      }
      if (found) {
        verdict.a_value = eval(a, w2);
        verdict.det_value = det.eval(w2);
        if (!(verdict.det_value > verdict.a_value))
          throw std::logic_error("counterexample failed re-verification");
        verdict.counterexample = w2;
        return verdict;
      }
      Key k2{m.to, std::move(d)};
      if (!seen.insert(k2).second) continue;
      if (seen.size() > max_frontier)
        throw Error("search-budget-exceeded: more than " + std::to_string(max_frontier) + " product states");
      queue.emplace_back(std::move(k2), std::move(w2));
    }
  }
  throw std::logic_error("negative product value without a counterexample word");
}

std::optional<GapWitness> gap_witness_on(const Wfa& a, const Word& w, std::int64_t min_gap) {
  StateSet all;
  for (StateId q = 0; q < a.num_states(); ++q) all.insert(q);
  for (std::size_t k = 0; k <= w.size(); ++k) {
    Word x(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k)), y(w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
    Weight low = mwt(a, {a.initial()}, x, all);
    if (!low.finite()) break;
    for (StateId q = 0; q < a.num_states(); ++q) {
      Weight to_q = mwt(a, {a.initial()}, x, {q});
      if (!to_q.finite()) continue;
      GapWitness g{x, y, q, to_q - low};
      if (verify_gap_witness(a, g, min_gap)) return g;
    }
  }
  return std::nullopt;
}

DeterminiseReport decide_at_gap(const Wfa& a, std::int64_t B, std::size_t max_configs) {
  DeterminiseReport r;
  r.B = B;
  DetWfa det = build_restriction(a, B, max_configs);
  r.det_states = det.configs.size();
  r.verdict = check_equiv(a, det);
  r.determinisable = r.verdict.equivalent;
  if (r.determinisable) r.automaton = det.to_wfa(a);
  return r;
}

nlohmann::json verdict_to_json(const Wfa& a, const EquivalenceVerdict& v) {
  nlohmann::json j{{"equivalent", v.equivalent}};
  if (v.counterexample) {
    j["counterexample"] = a.format_word(*v.counterexample);
    j["a_value"] = wjson(v.a_value);
    j["det_value"] = wjson(v.det_value);
  }
  return j;
}

nlohmann::json report_to_json(const Wfa& a, const DeterminiseReport& r) {
  nlohmann::json j{{"B", r.B},
                   {"determinisable", r.determinisable},
                   {"det_states", r.det_states},
                   {"verdict", verdict_to_json(a, r.verdict)}};
  if (r.automaton) j["automaton"] = r.automaton->to_json();
  return j;
}

}  // namespace trop
