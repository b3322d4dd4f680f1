// trop - command-line front end; every command prints one JSON report
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <trop/bounds.hpp>
#include <trop/determinise.hpp>
#include <trop/zoom.hpp>

using namespace trop;
using json = nlohmann::json;

namespace {

struct Result {
  json report;
  int code = 0;  // 0 positive, 1 negative
};

json wjson(Weight w) {
  if (w.finite()) return w.value();
  return "inf";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// inline JSON, or @path
json json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(!text.empty() && text[0] == '@' ? read_file(text.substr(1)) : text);
  } catch (const json::exception& e) {
    throw Error("usage: " + what + " is not valid JSON: " + e.what());
  }
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> r;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) r.push_back(item);
  return r;
}

std::int64_t to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("usage: not an integer: " + s);
  }
}

// comma list of lengths by depth; the last one repeats; empty: 2^40 everywhere
std::function<std::int64_t(int)> length_fn(const std::string& spec) {
  std::vector<std::int64_t> v;
  for (const auto& x : split(spec)) v.push_back(to_int(x));
  if (v.empty()) return [](int) { return std::int64_t(1) << 40; };
  return [v](int d) { return v[std::min<std::size_t>(static_cast<std::size_t>(std::max(d, 0)), v.size() - 1)]; };
}

StateSet states_of(const Wfa& a, const std::string& names, bool all_if_empty) {
  StateSet s;
  for (const auto& n : split(names)) s.insert(a.state_id(n));
  if (s.empty() && all_if_empty)
    for (StateId q = 0; q < a.num_states(); ++q) s.insert(q);
  return s;
}

Mask mask_of(const Wfa& a, const std::string& names) {
  Mask T = 0;
  for (const auto& n : split(names)) T |= Mask(1) << a.state_id(n);
  return T;
}

AugState aug_state(const Wfa& a, const json& j) {
  try {
    Mask T = 0;
    for (const auto& s : j.at("T")) T |= Mask(1) << a.state_id(s.get<std::string>());
    return {a.state_id(j.at("p").get<std::string>()), a.state_id(j.at("q").get<std::string>()), T};
  } catch (const json::exception& e) {
    throw Error(std::string("usage: malformed state: ") + e.what());
  }
}

json aug_state_json(const Wfa& a, const AugState& s) {
  json ts = json::array();
  for (int p : mask_members(s.T)) ts.push_back(a.state_name(p));
  return {{"p", a.state_name(s.p)}, {"q", a.state_name(s.q)}, {"T", ts}};
}

json cycle_json(const AugWfa& aug, const CycleCandidate& c) {
  const Wfa& a = aug.base();
  json ts = json::array();
  for (int p : mask_members(c.T)) ts.push_back(a.state_name(p));
  return {{"baseline", a.state_name(c.q)}, {"T", ts}, {"word", word_to_json(aug, c.word)}};
}

ZoomThresholds thresholds_of(const json& j) {
  ZoomThresholds th;
  try {
    th.gap = j.at("gap").get<std::int64_t>();
    th.cover = j.at("cover").get<std::int64_t>();
    th.amp = j.at("amp").get<std::int64_t>();
    th.seg_min_len = j.at("seg_min_len").get<std::int64_t>();
    th.seg_count = j.at("seg_count").get<std::int64_t>();
    th.seg_quantum = j.at("seg_quantum").get<std::int64_t>();
    th.head_len = j.value("head_len", std::int64_t(0));
  } catch (const json::exception& e) {
    throw Error(std::string("usage: malformed thresholds: ") + e.what());
  }
  th.validate();
  return th;
}

std::string error_code(const std::string& message) {
  auto c = message.find(':');
  if (c == std::string::npos || message.find(' ') < c) return "error";
  return message.substr(0, c);
}

struct Inputs {
  std::string automaton;
  std::string word, from, to, emit;
  std::int64_t min_gap = 0, max_len = 12, gap = 0, F = 0, horizon = 3, max_configs = 200000;
  std::string baseline, T, aword, prefix, suffix, letter, cactus;
  std::string lengths;
  int max_depth = 3;
  std::string u, x, y, v, kind = "simple";
  std::int64_t H = 0, m = 0, S = 0;
  std::string dom_alphabet;
  std::string thresholds, next, w1, w2, w3, runs;
  std::string drop_bound;
  std::string family = "simp", name, args, saturate, base_weight = "1", Hval, format = "json";
  int n = 1, d = 0, i = 0;
  bool digits_only = false;
};

DominanceParams dom_of(AugWfa& aug, const Inputs& in) {
  DominanceParams dom;
  dom.horizon = static_cast<int>(in.horizon);
  if (!in.dom_alphabet.empty()) dom.alphabet = word_from_json(aug, json_arg(in.dom_alphabet, "--dom-alphabet"));
  return dom;
}

SriParams sri_params(AugWfa& aug, const Inputs& in) {
  SriParams p;
  p.length_fn = length_fn(in.lengths);
  if (in.kind == "simple") p.kind = SriKind::Simple;
  else if (in.kind == "general") p.kind = SriKind::General;
  else throw Error("usage: --kind is simple or general");
  p.H = in.H;
  p.m = in.m;
  p.S = in.S;
  p.max_depth = in.max_depth;
  p.dom = dom_of(aug, in);
  return p;
}

SriCheck sri_of(AugWfa& aug, const Inputs& in) {
  auto w = [&](const std::string& s, const std::string& what) {
    return s.empty() ? AWord{} : word_from_json(aug, json_arg(s, what));
  };
  AWord u = w(in.u, "--u"), x = w(in.x, "--x"), y = w(in.y, "--y"), v = w(in.v, "--v");
  return check_sri(aug, u, x, y, v, sri_params(aug, in));
}

json flavour_json(const Flavour& f) {
  json j{{"negative", f.negative}, {"positive", f.positive}, {"stable", f.stable}};
  if (f.degenerate) j["degenerate"] = *f.degenerate;
  return j;
}

BoundsMode mode_of(const Inputs& in) {
  if (in.saturate.empty()) return BoundsMode::exact();
  try {
    return BoundsMode::saturated(mpz_class(in.saturate));
  } catch (const std::exception&) {
    throw Error("usage: --saturate needs a non-negative integer");
  }
}

mpz_class big(const std::string& s, const std::string& what) {
  try {
    mpz_class r(s);
    if (r < 0) throw std::invalid_argument(s);
    return r;
  } catch (const std::exception&) {
    throw Error("usage: " + what + " needs a non-negative integer");
  }
}

json value_json(const BoundsValue& v, bool digits_only) {
  json j{{"saturated", v.saturated}};
  if (v.saturated) {
    j["value"] = v.str();
  } else {
    j["digits"] = v.digits();
    if (!digits_only) j["value"] = v.str();
  }
  return j;
}

Result bounds_eval(const Inputs& in) {
  BoundsMode mode = mode_of(in);
  mpz_class w0 = big(in.base_weight, "--base-weight");
  json j{{"family", in.family}, {"name", in.name}, {"mode", mode.key()}};
  BoundsValue v;
  if (in.family == "upper") {
    ComplexityFn f = complexity_fn(in.name);
    std::vector<BoundsValue> args;
    json raw = json::array();
    for (const auto& a : split(in.args)) {
      args.push_back(BoundsValue::exact(big(a, "--args")));
      raw.push_back(a);
    }
    j["args"] = raw;
    j["class"] = hierarchy_class(f, false);
    v = complexity_upper(f, args, mode);
  } else {
    BoundFn f = bound_fn(in.name);
    BoundsParams p{in.n, in.d, in.i, mode};
    j["params"] = {{"n", in.n}, {"d", in.d}, {"i", in.i}, {"base_weight", w0.get_str()}};
    if (in.family == "simp") {
      v = simp(f, p, w0);
    } else if (in.family == "gen") {
      BoundsValue H = in.Hval.empty() ? default_H(in.n, w0, mode) : BoundsValue::exact(big(in.Hval, "--H"));
      j["H"] = H.str();
      v = gen(f, p, w0, H);
    } else {
      throw Error("usage: --family is simp, gen or upper");
    }
  }
  j.update(value_json(v, in.digits_only));
  return {j, 0};
}

Result bounds_table(const Inputs& in, std::ostream& csv) {
  BoundsMode mode = mode_of(in);
  mpz_class w0 = big(in.base_weight, "--base-weight");
  BoundsValue H = default_H(in.n, w0, mode);
  json rows = json::array();
  if (in.format == "csv") csv << "family,name,n,d,i,value\n";
  for (bool general : {false, true})
    for (BoundFn f : {BoundFn::Len, BoundFn::Cov, BoundFn::MaxWt, BoundFn::Amp, BoundFn::Typ})
      for (int d = 0; d <= in.n; ++d)
        for (int i = 0; i <= in.n + 1; ++i) {
          if (f == BoundFn::MaxWt && i > 0) continue;
          BoundsParams p{in.n, d, i, mode};
          std::string cell;
          json row{{"family", general ? "gen" : "simp"}, {"name", bound_name(f, general)}, {"n", in.n}, {"d", d}};
          if (f != BoundFn::MaxWt) row["i"] = i;
          try {
            BoundsValue v = general ? gen(f, p, w0, H) : simp(f, p, w0);
            row.update(value_json(v, in.digits_only));
            cell = v.saturated || !in.digits_only ? v.str() : std::to_string(v.digits()) + " digits";
          } catch (const Error& e) {
            row["error"] = error_code(e.what());
            cell = row["error"];
          }
          if (in.format == "csv")
            csv << row["family"].get<std::string>() << "," << row["name"].get<std::string>() << "," << in.n << ","
                << d << "," << (f == BoundFn::MaxWt ? std::string("") : std::to_string(i)) << "," << cell << "\n";
          rows.push_back(row);
        }
  return {{{"n", in.n}, {"base_weight", w0.get_str()}, {"H", H.str()}, {"mode", mode.key()},
           {"B", main_B(in.n, w0, mode).str()}, {"rows", rows}},
          0};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tropical weighted-automata workbench"};
  app.require_subcommand(1);
  Inputs in;
  std::function<Result()> action;

  auto automaton = [&](CLI::App* c) { c->add_option("automaton", in.automaton, "automaton JSON file")->required(); };
  auto load = [&] { return Wfa::load(in.automaton); };

  auto* ev = app.add_subcommand("eval", "value of a word");
  automaton(ev);
  ev->add_option("--word", in.word, "letters, comma separated unless single characters")->required();
  ev->callback([&] {
    action = [&] {
      Wfa a = load();
      Word w = a.parse_word(in.word);
      return Result{{{"word", a.format_word(w)}, {"value", wjson(eval(a, w))}}, 0};
    };
  });

  auto* mw = app.add_subcommand("mwt", "minimal weight between state sets");
  automaton(mw);
  mw->add_option("--word", in.word)->required();
  mw->add_option("--from", in.from, "state names; default the initial state");
  mw->add_option("--to", in.to, "state names; default all states");
  mw->callback([&] {
    action = [&] {
      Wfa a = load();
      Word w = a.parse_word(in.word);
      StateSet from = in.from.empty() ? StateSet{a.initial()} : states_of(a, in.from, false);
      return Result{{{"word", a.format_word(w)}, {"value", wjson(mwt(a, from, w, states_of(a, in.to, true)))}}, 0};
    };
  });

  auto* tr = app.add_subcommand("trim", "drop unreachable states");
  automaton(tr);
  tr->add_option("--emit", in.emit, "write the trimmed automaton here");
  tr->callback([&] {
    action = [&] {
      json j = trim(load()).to_json();
      if (!in.emit.empty()) std::ofstream(in.emit) << j.dump(2) << "\n";
      return Result{j, 0};
    };
  });

  auto* gw = app.add_subcommand("gap-witness", "search for a word pair with a large gap");
  automaton(gw);
  gw->add_option("--min-gap", in.min_gap)->required();
  gw->add_option("--max-len", in.max_len);
  gw->callback([&] {
    action = [&] {
      Wfa a = load();
      auto g = find_gap_witness(a, in.min_gap, static_cast<int>(in.max_len));
      if (!g) return Result{{{"found", false}, {"min_gap", in.min_gap}, {"max_len", in.max_len}}, 1};
      return Result{{{"found", true},
                     {"x", a.format_word(g->x)},
                     {"y", a.format_word(g->y)},
                     {"q", a.state_name(g->q)},
                     {"gap", wjson(g->gap)}},
                    0};
    };
  });

  auto* dt = app.add_subcommand("determinize", "decide equivalence with the gap-B restriction");
  automaton(dt);
  dt->add_option("--gap", in.gap)->required();
  dt->add_option("--emit", in.emit, "write the deterministic equivalent here");
  dt->add_option("--max-configs", in.max_configs);
  dt->callback([&] {
    action = [&] {
      Wfa a = load();
      auto r = decide_at_gap(a, in.gap, static_cast<std::size_t>(in.max_configs));
      if (r.automaton && !in.emit.empty()) std::ofstream(in.emit) << r.automaton->to_json().dump(2) << "\n";
      return Result{report_to_json(a, r), r.determinisable ? 0 : 1};
    };
  });

  auto* ce = app.add_subcommand("check-equiv", "compare an automaton with its gap-B restriction");
  automaton(ce);
  ce->add_option("--gap", in.gap)->required();
  ce->add_option("--max-configs", in.max_configs);
  ce->callback([&] {
    action = [&] {
      Wfa a = load();
      DetWfa det = build_restriction(a, in.gap, static_cast<std::size_t>(in.max_configs));
      auto v = check_equiv(a, det);
      json j = verdict_to_json(a, v);
      j["B"] = in.gap;
      j["det_states"] = det.configs.size();
      return Result{j, v.equivalent ? 0 : 1};
    };
  });

  auto cycle_opts = [&](CLI::App* c) {
    automaton(c);
    c->add_option("--baseline", in.baseline)->required();
    c->add_option("--T", in.T, "reachable set, comma separated")->required();
    c->add_option("--aword", in.aword, "cycle word as augmented-letter JSON (or @file)")->required();
  };
  auto* cy = app.add_subcommand("cycles", "stable cycles");
  cy->require_subcommand(1);
  auto* fs = cy->add_subcommand("find-stable", "analyse a candidate cycle");
  cycle_opts(fs);
  fs->callback([&] {
    action = [&] {
      AugWfa aug(load());
      CycleCandidate c{aug.base().state_id(in.baseline), mask_of(aug.base(), in.T),
                       word_from_json(aug, json_arg(in.aword, "--aword"))};
      auto info = analyse_cycle(aug, c);
      bool stable = is_stable_cycle(aug, c);
      json j{{"cycle", cycle_json(aug, c)}, {"reflexive", info.reflexive}, {"proper", info.proper},
             {"stable", stable},           {"m", cycle_m(aug, c)}};
      if (info.reflexive) {
        auto s = min_slope_cycle(aug, c);
        j["min_slope"] = {{"num", s.num}, {"k", s.k}};
      }
      return Result{j, stable ? 0 : 1};
    };
  });
  auto* ss = cy->add_subcommand("shift-stable", "shift a proper reflexive cycle onto its minimal-slope run");
  cycle_opts(ss);
  ss->callback([&] {
    action = [&] {
      AugWfa aug(load());
      CycleCandidate c{aug.base().state_id(in.baseline), mask_of(aug.base(), in.T),
                       word_from_json(aug, json_arg(in.aword, "--aword"))};
      auto s = shift_to_stable(aug, c);
      bool stable = is_stable_cycle(aug, s.cycle);
      return Result{{{"cycle", cycle_json(aug, s.cycle)}, {"k", s.k}, {"stable", stable}}, stable ? 0 : 1};
    };
  });

  auto* ca = app.add_subcommand("cactus", "cactus letters");
  ca->require_subcommand(1);
  auto* st = ca->add_subcommand("stabilize", "the cactus letter of a stable cycle");
  cycle_opts(st);
  st->callback([&] {
    action = [&] {
      AugWfa aug(load());
      const Wfa& a = aug.base();
      CycleCandidate c{a.state_id(in.baseline), mask_of(a, in.T), word_from_json(aug, json_arg(in.aword, "--aword"))};
      ALetter l = stabilise(aug, c);
      auto gp = grounded_pairs(aug, c);
      json pairs = json::array();
      for (const auto& p : gp.pairs)
        pairs.push_back({{"s", aug_state_json(a, p.s)},
                         {"r", aug_state_json(a, p.r)},
                         {"g", aug_state_json(a, p.g)},
                         {"weight", wjson(p.weight)}});
      return Result{{{"letter", letter_to_json(aug, l)},
                     {"depth", aug.letter(l).depth},
                     {"degenerate", aug.letter(l).degenerate},
                     {"m", gp.m},
                     {"grounded", pairs}},
                    0};
    };
  });
  auto* un = ca->add_subcommand("unfold", "replace a cactus letter by a power of its word");
  automaton(un);
  un->add_option("--prefix", in.prefix, "augmented word JSON")->required();
  un->add_option("--cactus", in.cactus, "letter JSON")->required();
  un->add_option("--suffix", in.suffix, "augmented word JSON");
  un->add_option("--F", in.F)->required();
  un->callback([&] {
    action = [&] {
      AugWfa aug(load());
      AWord pre = word_from_json(aug, json_arg(in.prefix, "--prefix"));
      ALetter l = letter_from_json(aug, json_arg(in.cactus, "--cactus"));
      AWord suf = in.suffix.empty() ? AWord{} : word_from_json(aug, json_arg(in.suffix, "--suffix"));
      auto u = unfold(aug, pre, l, suf, in.F);
      std::string why;
      bool ok = check_unfold_contract(aug, pre, l, suf, u, in.F, &why);
      json j{{"word", word_to_json(aug, u.word)}, {"M0", u.M0}, {"reps", u.reps}, {"contract", ok}};
      if (!ok) j["violation"] = why;
      return Result{j, ok ? 0 : 1};
    };
  });
  auto* fl = ca->add_subcommand("flatten", "unfold every cactus letter");
  automaton(fl);
  fl->add_option("--aword", in.aword)->required();
  fl->add_option("--F", in.F)->required();
  fl->callback([&] {
    action = [&] {
      AugWfa aug(load());
      AWord w = word_from_json(aug, json_arg(in.aword, "--aword"));
      AWord flat = flatten(aug, w, in.F);
      std::string why;
      bool ok = check_flatten_contract(aug, w, flat, in.F, &why);
      json j{{"flat", word_to_json(aug, flat)}, {"length", flat.size()}, {"contract", ok}};
      if (!ok) j["violation"] = why;
      return Result{j, ok ? 0 : 1};
    };
  });
  auto* va = ca->add_subcommand("validate", "check a letter against a length bound");
  automaton(va);
  va->add_option("--letter", in.letter, "letter JSON")->required();
  va->add_option("--length-fn", in.lengths, "lengths by depth, comma separated; the last repeats");
  va->add_option("--max-depth", in.max_depth);
  va->callback([&] {
    action = [&] {
      AugWfa aug(load());
      ALetter l = letter_from_json(aug, json_arg(in.letter, "--letter"));
      bool ok = validate_bounded_letter(aug, l, length_fn(in.lengths), in.max_depth);
      return Result{{{"valid", ok}, {"depth", aug.letter(l).depth}}, ok ? 0 : 1};
    };
  });

  auto* an = app.add_subcommand("analyze", "potential and charge");
  an->require_subcommand(1);
  auto* po = an->add_subcommand("potential", "the potential of a word");
  automaton(po);
  po->add_option("--aword", in.aword)->required();
  po->add_option("--horizon", in.horizon);
  po->add_option("--dom-alphabet", in.dom_alphabet, "suffix letters as augmented word JSON");
  po->callback([&] {
    action = [&] {
      AugWfa aug(load());
      AWord w = word_from_json(aug, json_arg(in.aword, "--aword"));
      return Result{potential_json(aug, potential(aug, w, dom_of(aug, in))), 0};
    };
  });
  auto* ch = an->add_subcommand("charge", "the charge of a word");
  automaton(ch);
  ch->add_option("--aword", in.aword)->required();
  ch->callback([&] {
    action = [&] {
      AugWfa aug(load());
      auto r = charge(aug, word_from_json(aug, json_arg(in.aword, "--aword")));
      return Result{{{"psi", wjson(r.psi)}, {"argmin", aug_state_json(aug.base(), r.argmin)}}, 0};
    };
  });

  auto sri_opts = [&](CLI::App* c) {
    automaton(c);
    c->add_option("--u", in.u)->required();
    c->add_option("--x", in.x)->required();
    c->add_option("--y", in.y)->required();
    c->add_option("--v", in.v);
    c->add_option("--kind", in.kind, "simple or general");
    c->add_option("--H", in.H);
    c->add_option("--m", in.m, "stabilisation constant; 0 picks the tight one");
    c->add_option("--S", in.S, "state count in the gap; 0 uses the full augmented size");
    c->add_option("--length-fn", in.lengths);
    c->add_option("--max-depth", in.max_depth);
    c->add_option("--horizon", in.horizon);
    c->add_option("--dom-alphabet", in.dom_alphabet);
  };
  auto* sr = app.add_subcommand("sri", "separated repeating infixes");
  sr->require_subcommand(1);
  auto* sc = sr->add_subcommand("check", "decide whether u x y v is an SRI");
  sri_opts(sc);
  sc->callback([&] {
    action = [&] {
      AugWfa aug(load());
      auto r = sri_of(aug, in);
      if (!r.sri) return Result{{{"sri", false}, {"diagnostic", r.diagnostic}}, 1};
      return Result{{{"sri", true}, {"decomposition", sri_to_json(aug, *r.sri)}}, 0};
    };
  });
  auto* cl = sr->add_subcommand("classify", "flavour of an SRI");
  sri_opts(cl);
  cl->callback([&] {
    action = [&] {
      AugWfa aug(load());
      auto r = sri_of(aug, in);
      if (!r.sri) return Result{{{"sri", false}, {"diagnostic", r.diagnostic}}, 1};
      return Result{{{"sri", true}, {"flavour", flavour_json(classify(aug, *r.sri))}}, 0};
    };
  });
  auto* bu = sr->add_subcommand("bud", "replace the repeated infix by its cactus letter");
  sri_opts(bu);
  bu->callback([&] {
    action = [&] {
      AugWfa aug(load());
      auto r = sri_of(aug, in);
      if (!r.sri) return Result{{{"sri", false}, {"diagnostic", r.diagnostic}}, 1};
      auto fn = length_fn(in.lengths);
      auto b = bud(aug, *r.sri, dom_of(aug, in), {fn, fn, in.max_depth});
      json j{{"word", word_to_json(aug, b.word)},
             {"letter", letter_to_json(aug, b.letter)},
             {"superior", b.superior},
             {"charge_ok", b.charge_ok},
             {"potential_ok", b.potential_ok},
             {"phi", {wjson(b.phi_w), wjson(b.phi_w2)}},
             {"psi", {wjson(b.psi_w), wjson(b.psi_w2)}}};
      if (b.witness) j["witness"] = {{"pass", b.witness->pass}, {"clause", b.witness->clause}, {"message", b.witness->message}};
      bool ok = b.superior && b.charge_ok && (b.potential_ok || (b.witness && b.witness->pass));
      return Result{j, ok ? 0 : 1};
    };
  });
  auto* ds = sr->add_subcommand("degenerate-shorten", "drop the repeated infix of a stable degenerate SRI");
  sri_opts(ds);
  ds->callback([&] {
    action = [&] {
      AugWfa aug(load());
      auto r = sri_of(aug, in);
      if (!r.sri) return Result{{{"sri", false}, {"diagnostic", r.diagnostic}}, 1};
      AWord w = degenerate_shorten(aug, *r.sri, dom_of(aug, in));
      return Result{{{"word", word_to_json(aug, w)}, {"length", w.size()}}, 0};
    };
  });

  auto* zo = app.add_subcommand("zoom", "zoom-in steps");
  zo->require_subcommand(1);
  auto* zs = zo->add_subcommand("step", "one zoom-in step");
  automaton(zs);
  zs->add_option("--thresholds", in.thresholds, "thresholds JSON file")->required();
  zs->add_option("--next", in.next, "thresholds JSON file for one more run");
  zs->add_option("--w1", in.w1)->required();
  zs->add_option("--w2", in.w2)->required();
  zs->add_option("--w3", in.w3);
  zs->add_option("--runs", in.runs, "end states of the independent runs, JSON list of {p, q, T}")->required();
  zs->add_option("--length-fn", in.lengths);
  zs->add_option("--max-depth", in.max_depth);
  zs->add_option("--horizon", in.horizon);
  zs->add_option("--dom-alphabet", in.dom_alphabet);
  zs->add_option("--kind", in.kind);
  zs->add_option("--H", in.H);
  zs->add_option("--m", in.m);
  zs->add_option("--S", in.S);
  zs->add_option("--drop-bound", in.drop_bound);
  zs->callback([&] {
    action = [&] {
      AugWfa aug(load());
      WordSplit split{word_from_json(aug, json_arg(in.w1, "--w1")), word_from_json(aug, json_arg(in.w2, "--w2")),
                      in.w3.empty() ? AWord{} : word_from_json(aug, json_arg(in.w3, "--w3"))};
      ZoomParams zp;
      zp.th = thresholds_of(json_arg("@" + in.thresholds, "--thresholds"));
      if (!in.next.empty()) zp.next = thresholds_of(json_arg("@" + in.next, "--next"));
      zp.sri = sri_params(aug, in);
      zp.H = in.H;
      if (!in.drop_bound.empty()) zp.drop_bound = to_int(in.drop_bound);
      std::vector<AugRun> runs;
      AWord whole = split.word();
      for (const auto& s : json_arg(in.runs, "--runs")) {
        auto r = aug_min_run(aug, aug_unit(aug.initial()), whole, aug_state(aug.base(), s));
        if (!r) throw Error("run-mismatch: no run ends in " + s.dump());
        runs.push_back(*r);
      }
      auto z = zoom_step(aug, split, runs, zp);
      return Result{zoom_to_json(aug, z), std::holds_alternative<ZoomError>(z) ? 1 : 0};
    };
  });

  auto* bo = app.add_subcommand("bounds", "length-bound recurrences");
  bo->require_subcommand(1);
  auto bounds_opts = [&](CLI::App* c) {
    c->add_option("--n", in.n, "|S|");
    c->add_option("--base-weight", in.base_weight);
    c->add_option("--saturate", in.saturate, "cap; values above it print as SAT(cap)");
    c->add_flag("--digits-only", in.digits_only, "report digit counts instead of values");
  };
  auto* be = bo->add_subcommand("eval", "one function value");
  bounds_opts(be);
  be->add_option("--family", in.family, "simp, gen or upper");
  be->add_option("--name", in.name)->required();
  be->add_option("--d", in.d);
  be->add_option("--i", in.i);
  be->add_option("--H", in.Hval, "general families; default Amp(n, 0)");
  be->add_option("--args", in.args, "upper-bound arguments, comma separated");
  be->callback([&] { action = [&] { return bounds_eval(in); }; });
  auto* bt = bo->add_subcommand("table", "every simple and general value for one n");
  bounds_opts(bt);
  bt->add_option("--format", in.format, "json or csv");
  std::ostringstream csv;
  bt->callback([&] { action = [&] { return bounds_table(in, csv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << json{{"error", "usage"}, {"message", e.what()}}.dump(2) << "\n";
    return 2;
  }
  try {
    Result r = action();
    if (in.format == "csv" && !csv.str().empty()) std::cout << csv.str();
    else std::cout << r.report.dump(2) << "\n";
    return r.code;
  } catch (const std::exception& e) {
    std::cout << json{{"error", error_code(e.what())}, {"message", e.what()}}.dump(2) << "\n";
    return 2;
  }
}
