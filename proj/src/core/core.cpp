// core.cpp
#include "trop/core.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace trop {

Configuration unit_config(const Wfa& a, StateId q) {
  Configuration c(a.num_states(), Weight::inf());
  c.at(q) = Weight::zero();
  return c;
}

StateSet support(const Configuration& c) {
  StateSet s;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].finite()) s.insert(static_cast<StateId>(i));
  return s;
}

Weight config_min(const Configuration& c) {
  Weight m = Weight::inf();
  for (auto w : c) m = wmin(m, w);
  return m;
}

Weight normalize(Configuration& c) {
  Weight m = config_min(c);
  if (m.finite())
    for (auto& w : c) w = w - m;
  return m;
}

static Configuration step(const Wfa& a, const Configuration& c, LetterId l) {
  Configuration d(a.num_states(), Weight::inf());
  for (StateId p = 0; p < a.num_states(); ++p) {
    if (!c[p].finite()) continue;
    for (const auto& e : a.out(p, l)) d[e.to] = wmin(d[e.to], c[p] + e.weight);
  }
  return d;
}

Configuration xconf(const Wfa& a, const Configuration& start, const Word& w) {
  a.check_word(w);
  if (static_cast<int>(start.size()) != a.num_states()) throw Error("configuration size mismatch");
  Configuration c = start;
  for (auto l : w) c = step(a, c, l);
  return c;
}

Weight eval(const Wfa& a, const Word& w) { return config_min(xconf(a, unit_config(a, a.initial()), w)); }

Weight mwt(const Wfa& a, const StateSet& from, const Word& w, const StateSet& to) {
  Configuration c(a.num_states(), Weight::inf());
  for (auto q : from) c.at(q) = Weight::zero();
  c = xconf(a, c, w);
  Weight m = Weight::inf();
  for (auto q : to) m = wmin(m, c.at(q));
  return m;
}

void check_run(const Wfa& a, const RunTrace& run) {
  Weight total = Weight::zero();
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    if (i && run.steps[i - 1].to != s.from) throw Error("invalid-run: disconnected at step " + std::to_string(i));
    if (!s.weight.finite() || a.weight(s.from, s.letter, s.to) != s.weight)
      throw Error("invalid-run: no such transition at step " + std::to_string(i));
    total += s.weight;
  }
  if (total != run.wt) throw Error("invalid-run: weight mismatch");
}

bool is_seamless(const Wfa& a, const Configuration& start, const RunTrace& run) {
  check_run(a, run);
  if (run.steps.empty()) return true;
  StateId s0 = run.steps.front().from;
  if (!start.at(s0).finite()) throw Error("invalid-run: starts outside the support");
  Configuration c = start;
  Weight acc = start[s0];
  for (const auto& s : run.steps) {
    c = step(a, c, s.letter);
    acc += s.weight;
    if (c[s.to] != acc) return false;
  }
  return true;
}

std::optional<RunTrace> min_run(const Wfa& a, const Configuration& start, const Word& w, StateId q) {
  std::vector<Configuration> cs{start};
  for (auto l : w) cs.push_back(step(a, cs.back(), l));
  if (!cs.back().at(q).finite()) return std::nullopt;
  RunTrace run;
  StateId cur = q;
  for (std::size_t i = w.size(); i-- > 0;) {
    StateId pick = -1;
    Weight pw;
    for (StateId p = 0; p < a.num_states(); ++p) {
      if (!cs[i][p].finite()) continue;
      Weight e = a.weight(p, w[i], cur);
      if (e.finite() && cs[i][p] + e == cs[i + 1][cur]) {
        pick = p;
        pw = e;
        break;
      }
    }
    run.steps.push_back({pick, w[i], pw, cur});
    cur = pick;
  }
  std::reverse(run.steps.begin(), run.steps.end());
  run.wt = Weight::zero();
  for (const auto& s : run.steps) run.wt += s.weight;
  return run;
}

Weight wmax(const Wfa& a, LetterId letter) {
  Weight m = Weight::zero();
  for (const auto& t : a.transitions())
    if (t.letter == letter) m = std::max(m, wabs(t.weight));
  return m;
}

Weight wmax(const Wfa& a, const Word& w) {
  Weight m = Weight::zero();
  for (auto l : w) m = std::max(m, wmax(a, l));
  return m;
}

Weight maxeff(const Wfa& a, const Word& w) {
  Weight s = Weight::zero();
  for (auto l : w) s += wmax(a, l);
  return s;
}

bool verify_gap_witness(const Wfa& a, const GapWitness& g, std::int64_t min_gap) {
  StateSet all;
  for (StateId q = 0; q < a.num_states(); ++q) all.insert(q);
  Word xy = g.x;
  xy.insert(xy.end(), g.y.begin(), g.y.end());
  Weight whole = mwt(a, {a.initial()}, xy, all);
  Weight to_q = mwt(a, {a.initial()}, g.x, {g.q});
  Weight via = to_q + mwt(a, {g.q}, g.y, all);
  if (!whole.finite() || whole != via) return false;
  Weight gap = to_q - mwt(a, {a.initial()}, g.x, all);
  return gap == g.gap && gap > Weight(min_gap);
}

namespace {

// frontier over y for a fixed (c_x, q): full configuration and the part through q, jointly normalized
std::optional<Word> find_suffix(const Wfa& a, const Configuration& cx, StateId q, int max_len) {
  Configuration through(a.num_states(), Weight::inf());
  through[q] = cx[q];
  using Node = std::pair<Configuration, Configuration>;
  auto norm = [](Node& n) {
    Weight m = config_min(n.first);
    if (!m.finite()) return false;
    for (auto& w : n.first) w = w - m;
    for (auto& w : n.second) w = w - m;
    return true;
  };
  auto done = [](const Node& n) {
    Weight m = config_min(n.second);
    return m.finite() && m == config_min(n.first);
  };
  Node start{cx, through};
  if (!norm(start)) return std::nullopt;
  std::set<Node> seen{start};
  std::deque<std::pair<Node, Word>> queue{{start, {}}};
  while (!queue.empty()) {
    auto [node, y] = queue.front();
    queue.pop_front();
    if (done(node)) return y;
    if (static_cast<int>(y.size()) >= max_len) continue;
    for (LetterId l = 0; l < a.num_letters(); ++l) {
      Node next{step(a, node.first, l), step(a, node.second, l)};
      if (!norm(next) || !config_min(next.second).finite()) continue;
      if (!seen.insert(next).second) continue;
      Word y2 = y;
      y2.push_back(l);
      queue.emplace_back(std::move(next), std::move(y2));
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<GapWitness> find_gap_witness(const Wfa& a, std::int64_t min_gap, int max_len) {
  if (min_gap < 0) throw Error("min_gap must be non-negative");
  Configuration c0 = unit_config(a, a.initial());
  std::set<Configuration> seen{c0};
  std::deque<std::pair<Configuration, Word>> queue{{c0, {}}};
  while (!queue.empty()) {
    auto [c, x] = queue.front();
    queue.pop_front();
    Weight m = config_min(c);
    for (StateId q = 0; q < a.num_states(); ++q) {
      if (!c[q].finite() || c[q] - m <= Weight(min_gap)) continue;
      auto y = find_suffix(a, c, q, max_len - static_cast<int>(x.size()));
      if (!y) continue;
      GapWitness g{x, *y, q, c[q] - m};
      // configurations are normalized, so the recorded gap is the true one
      if (!verify_gap_witness(a, g, min_gap)) throw std::logic_error("gap witness failed re-verification");
      return g;
    }
    if (static_cast<int>(x.size()) >= max_len) continue;
    for (LetterId l = 0; l < a.num_letters(); ++l) {
      Configuration d = step(a, c, l);
      if (!normalize(d).finite()) continue;
      if (!seen.insert(d).second) continue;
      Word x2 = x;
      x2.push_back(l);
      queue.emplace_back(std::move(d), std::move(x2));
    }
  }
  return std::nullopt;
}

Wfa trim(const Wfa& a) {
  std::vector<bool> reach(a.num_states(), false);
  std::vector<StateId> stack{a.initial()};
  reach[a.initial()] = true;
  while (!stack.empty()) {
    StateId p = stack.back();
    stack.pop_back();
    for (LetterId l = 0; l < a.num_letters(); ++l)
      for (const auto& e : a.out(p, l))
        if (!reach[e.to]) {
          reach[e.to] = true;
          stack.push_back(e.to);
        }
  }
  std::vector<int> remap(a.num_states(), -1);
  std::vector<std::string> names;
  for (StateId q = 0; q < a.num_states(); ++q)
    if (reach[q]) {
      remap[q] = static_cast<int>(names.size());
      names.push_back(a.state_name(q));
    }
  std::vector<Transition> ts;
  for (const auto& t : a.transitions())
    if (reach[t.from] && reach[t.to]) ts.push_back({remap[t.from], t.letter, t.weight, remap[t.to]});
  return Wfa(names, a.alphabet(), remap[a.initial()], ts);
}

}  // namespace trop
