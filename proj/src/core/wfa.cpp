// wfa.cpp
#include "trop/wfa.hpp"

#include <algorithm>
#include <fstream>

namespace trop {

Wfa::Wfa(std::vector<std::string> states, std::vector<std::string> alphabet, StateId initial,
         std::vector<Transition> transitions, std::vector<std::string>* warnings)
    : states_(std::move(states)), alphabet_(std::move(alphabet)), initial_(initial) {
  if (states_.empty()) throw Error("automaton has no states");
  if (initial_ < 0 || initial_ >= num_states()) throw Error("initial state out of range");
  std::map<std::tuple<StateId, LetterId, StateId>, Weight> best;
  for (const auto& t : transitions) {
    if (t.from < 0 || t.from >= num_states() || t.to < 0 || t.to >= num_states())
      throw Error("transition state out of range");
    if (t.letter < 0 || t.letter >= num_letters()) throw Error("unknown-letter");
    if (!t.weight.finite()) continue;
    auto key = std::make_tuple(t.from, t.letter, t.to);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, t.weight);
    } else {
      if (warnings)
        warnings->push_back("duplicate transition " + states_[t.from] + " -" + alphabet_[t.letter] +
                            "-> " + states_[t.to] + " collapsed to its minimum weight");
      it->second = wmin(it->second, t.weight);
    }
  }
  out_.assign(states_.size() * alphabet_.size(), {});
  for (const auto& [k, w] : best) {
    auto [p, a, q] = k;
    trans_.push_back({p, a, w, q});
    out_[p * alphabet_.size() + a].push_back({q, w});
  }
}

StateId Wfa::state_id(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) throw Error("unknown-state: " + name);
  return static_cast<StateId>(it - states_.begin());
}

LetterId Wfa::letter_id(const std::string& name) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), name);
  if (it == alphabet_.end()) throw Error("unknown-letter: " + name);
  return static_cast<LetterId>(it - alphabet_.begin());
}

Weight Wfa::weight(StateId p, LetterId a, StateId q) const {
  for (const auto& e : out(p, a))
    if (e.to == q) return e.weight;
  return Weight::inf();
}

static bool single_char_alphabet(const std::vector<std::string>& al) {
  return std::all_of(al.begin(), al.end(), [](const std::string& s) { return s.size() == 1; });
}

Word Wfa::parse_word(const std::string& text) const {
  Word w;
  if (text.empty()) return w;
  if (single_char_alphabet(alphabet_) && text.find(',') == std::string::npos) {
    for (char c : text) w.push_back(letter_id(std::string(1, c)));
    return w;
  }
  std::size_t pos = 0;
  while (true) {
    auto comma = text.find(',', pos);
    w.push_back(letter_id(text.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return w;
}

std::string Wfa::format_word(const Word& w) const {
  bool single = single_char_alphabet(alphabet_);
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i) s += ',';
    s += alphabet_.at(w[i]);
  }
  return s;
}

void Wfa::check_word(const Word& w) const {
  for (auto a : w)
    if (a < 0 || a >= num_letters()) throw Error("unknown-letter");
}

Wfa Wfa::from_json(const nlohmann::json& j, std::vector<std::string>* warnings) {
  try {
    std::vector<std::string> states = j.at("states").get<std::vector<std::string>>();
    std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
    auto idx = [](const std::vector<std::string>& v, const std::string& s, const char* what) {
      auto it = std::find(v.begin(), v.end(), s);
      if (it == v.end()) throw Error(std::string(what) + ": " + s);
      return static_cast<int>(it - v.begin());
    };
    StateId init = idx(states, j.at("initial").get<std::string>(), "unknown-state");
    std::vector<Transition> ts;
    if (j.contains("transitions")) {
      for (const auto& t : j.at("transitions")) {
        Weight w = Weight::inf();
        const auto& jw = t.at("weight");
        if (jw.is_string()) {
          if (jw.get<std::string>() != "inf") throw Error("bad weight: " + jw.dump());
        } else {
          w = Weight(jw.get<std::int64_t>());
        }
        ts.push_back({idx(states, t.at("from").get<std::string>(), "unknown-state"),
                      idx(alphabet, t.at("letter").get<std::string>(), "unknown-letter"), w,
                      idx(states, t.at("to").get<std::string>(), "unknown-state")});
      }
    }
    return Wfa(std::move(states), std::move(alphabet), init, std::move(ts), warnings);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed automaton json: ") + e.what());
  }
}

Wfa Wfa::load(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed json in " + path + ": " + e.what());
  }
  return from_json(j, warnings);
}

nlohmann::json Wfa::to_json() const {
  nlohmann::json j;
  j["states"] = states_;
  j["alphabet"] = alphabet_;
  j["initial"] = states_[initial_];
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : trans_)
    j["transitions"].push_back({{"from", states_[t.from]},
                                {"letter", alphabet_[t.letter]},
                                {"weight", t.weight.value()},
                                {"to", states_[t.to]}});
  return j;
}

}  // namespace trop
