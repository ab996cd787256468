#include "mb/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mb {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

json parse_scalar(const std::string& tok, const std::string& origin, int line) {
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    std::string body = tok.substr(1, tok.size() - 2);
    if (body.find('"') != std::string::npos)
      fail(origin, "line " + std::to_string(line) + ": bad string literal");
    return body;
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  bool integral = !tok.empty();
  for (std::size_t i = 0; i < tok.size(); ++i) {
    char c = tok[i];
    if (i == 0 && (c == '+' || c == '-')) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) integral = false;
  }
  const char* begin = tok.c_str();
  char* end = nullptr;
  if (integral) {
    long long v = std::strtoll(begin, &end, 10);
    if (end == begin + tok.size()) return v;
  }
  double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty())
    fail(origin, "line " + std::to_string(line) + ": bad value '" + tok + "'");
  return v;
}

json parse_value(const std::string& tok, const std::string& origin, int line) {
  if (!tok.empty() && tok.front() == '[') {
    if (tok.back() != ']')
      fail(origin, "line " + std::to_string(line) + ": unterminated list");
    json arr = json::array();
    std::string body = tok.substr(1, tok.size() - 2);
    std::string cur;
    bool in_str = false;
    bool any = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        arr.push_back(parse_scalar(trim(cur), origin, line));
        cur.clear();
        any = true;
      } else {
        cur += c;
      }
    }
    cur = trim(cur);
    if (!cur.empty())
      arr.push_back(parse_scalar(cur, origin, line));
    else if (any)
      fail(origin, "line " + std::to_string(line) + ": trailing comma");
    return arr;
  }
  return parse_scalar(tok, origin, line);
}

json parse_flat(const std::string& text, const std::string& origin) {
  json root = json::object();
  json* cur = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // comments start at # outside quotes
    std::string stripped;
    bool in_str = false;
    for (char c : raw) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      stripped += c;
    }
    std::string s = trim(stripped);
    if (s.empty()) continue;
    if (s.front() == '[' && s.back() == ']') {
      std::string name = trim(s.substr(1, s.size() - 2));
      if (!valid_name(name))
        fail(origin, "line " + std::to_string(line) + ": bad section name");
      if (root.contains(name))
        fail(origin, "duplicate section [" + name + "]");
      root[name] = json::object();
      cur = &root[name];
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(origin, "line " + std::to_string(line) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (!valid_name(key))
      fail(origin, "line " + std::to_string(line) + ": bad key '" + key + "'");
    if (cur == nullptr)
      fail(origin, "line " + std::to_string(line) + ": key '" + key +
                       "' outside any [section]");
    if (cur->contains(key))
      fail(origin, "line " + std::to_string(line) + ": duplicate key '" + key +
                       "'");
    if (val.empty())
      fail(origin, "line " + std::to_string(line) + ": empty value for '" +
                       key + "'");
    (*cur)[key] = parse_value(val, origin, line);
  }
  return root;
}

// ------------------------------------------------------- typed accessors

struct Section {
  const std::string& origin;
  std::string name;
  const json& obj;
  mutable std::vector<std::string> seen;

  std::string where(const std::string& key) const {
    return "[" + name + "] " + key;
  }
  bool has(const std::string& key) const {
    seen.push_back(key);
    return obj.contains(key);
  }
  const json& raw(const std::string& key) const { return obj.at(key); }

  double num(const std::string& key, double dflt) const {
    if (!has(key)) return dflt;
    if (!raw(key).is_number()) fail(origin, where(key) + " must be a number");
    return raw(key).get<double>();
  }
  std::int64_t integer(const std::string& key, std::int64_t dflt) const {
    if (!has(key)) return dflt;
    if (!raw(key).is_number_integer())
      fail(origin, where(key) + " must be an integer");
    return raw(key).get<std::int64_t>();
  }
  bool boolean(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    if (!raw(key).is_boolean()) fail(origin, where(key) + " must be a boolean");
    return raw(key).get<bool>();
  }
  std::string str(const std::string& key, const std::string& dflt) const {
    if (!has(key)) return dflt;
    if (!raw(key).is_string()) fail(origin, where(key) + " must be a string");
    return raw(key).get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) const {
    if (!has(key) || !raw(key).is_array())
      fail(origin, where(key) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& v : raw(key)) {
      if (!v.is_number()) fail(origin, where(key) + " must be a list of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) const {
    if (!has(key) || !raw(key).is_array())
      fail(origin, where(key) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& v : raw(key)) {
      if (!v.is_string()) fail(origin, where(key) + " must be a list of strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }
  void finish() const {
    for (const auto& [key, val] : obj.items()) {
      (void)val;
      bool known = false;
      for (const auto& s : seen)
        if (s == key) known = true;
      if (!known) fail(origin, "unknown key " + where(key));
    }
  }
};

std::vector<double> normalized(std::vector<double> w, const std::string& origin,
                               const std::string& where) {
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) fail(origin, where + " weights must be nonnegative");
    total += v;
  }
  if (!(total > 0.0)) fail(origin, where + " weights must not all be zero");
  for (double& v : w) v /= total;
  return w;
}

ProblemPayload build_payload(const std::string& kind, const Section& sec,
                             const std::string& origin, std::size_t n_items) {
  if (kind == "series_testing") {
    SeriesTesting p;
    p.costs = sec.numbers("costs");
    return p;
  }
  if (kind == "pandora") {
    PandoraBox p;
    p.costs = sec.numbers("costs");
    return p;
  }
  if (kind == "prophet") return ProphetInequality{};
  if (kind == "srm") {
    SingleResourceRevenue p;
    p.prices = sec.numbers("prices");
    p.capacity = static_cast<int>(sec.integer("capacity", 1));
    return p;
  }
  if (kind == "fspm") {
    SequentialPricing p;
    p.rank = static_cast<int>(sec.integer("rank", 1));
    return p;
  }
  (void)n_items;
  fail(origin, "[experiment] kind must be one of series_testing, pandora, "
               "prophet, srm, fspm (got '" + kind + "')");
}

std::vector<double> default_support(const std::string& kind,
                                    const ProblemPayload& payload) {
  if (kind == "series_testing") return {0.0, 1.0};
  if (kind == "srm") {
    int cap = std::get<SingleResourceRevenue>(payload).capacity;
    std::vector<double> grid;
    for (int j = 0; j <= cap; ++j) grid.push_back(j);
    return grid;
  }
  return {};
}

}  // namespace

const std::vector<std::string>& problem_kinds() {
  static const std::vector<std::string> kinds{
      "series_testing", "pandora", "prophet", "srm", "fspm"};
  return kinds;
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin) {
  json root = parse_flat(text, origin);
  ExperimentConfig cfg;

  std::size_t n_items = 0;
  for (const auto& [sec, val] : root.items()) {
    (void)val;
    if (sec == "experiment" || sec == "instance" || sec == "sampletest")
      continue;
    if (sec.rfind("item", 0) == 0) {
      char* end = nullptr;
      const char* digits = sec.c_str() + 4;
      long idx = std::strtol(digits, &end, 10);
      if (*digits != '\0' && *end == '\0' && idx >= 1) {
        n_items = std::max(n_items, static_cast<std::size_t>(idx));
        continue;
      }
    }
    fail(origin, "unknown section [" + sec + "]");
  }
  for (std::size_t i = 1; i <= n_items; ++i)
    if (!root.contains("item" + std::to_string(i)))
      fail(origin, "item sections must be contiguous: missing [item" +
                       std::to_string(i) + "]");

  json empty = json::object();
  Section exp{origin, "experiment",
              root.contains("experiment") ? root.at("experiment") : empty, {}};

  cfg.name = exp.str("name", "experiment");
  if (!valid_name(cfg.name))
    fail(origin, "[experiment] name must be alphanumeric/underscore");
  cfg.delta = exp.num("delta", 0.0);
  if (cfg.delta < 0.0 || cfg.delta > 2.0)
    fail(origin, "[experiment] delta must lie in (0, 2] (or 0 for default)");
  cfg.alpha = exp.num("alpha", 1.0);
  if (!(cfg.alpha > 0.0) || cfg.alpha > 1.0)
    fail(origin, "[experiment] alpha must lie in (0, 1]");
  std::int64_t sb = exp.integer("state_budget", 0);
  if (sb < 0) fail(origin, "[experiment] state_budget must be >= 0");
  cfg.state_budget = static_cast<std::size_t>(sb);
  std::int64_t mc = exp.integer("mc_samples", 20000);
  if (mc < 1) fail(origin, "[experiment] mc_samples must be positive");
  cfg.mc_samples = static_cast<std::size_t>(mc);
  std::int64_t ee = exp.integer("etc_explore", 0);
  if (ee < 0) fail(origin, "[experiment] etc_explore must be >= 0");
  cfg.etc_explore = static_cast<int>(ee);
  cfg.timing = exp.boolean("timing", false);
  cfg.out_dir = exp.str("out_dir", "out");

  if (exp.has("horizons")) {
    std::vector<double> hs = exp.numbers("horizons");
    for (double h : hs) {
      if (h < 1.0 || h != std::floor(h))
        fail(origin, "[experiment] horizons must be positive integers");
      if (!cfg.horizons.empty() && static_cast<int>(h) <= cfg.horizons.back())
        fail(origin, "[experiment] horizons must be strictly ascending");
      cfg.horizons.push_back(static_cast<int>(h));
    }
    if (cfg.horizons.empty())
      fail(origin, "[experiment] horizons must not be empty");
  }
  if (exp.has("seeds")) {
    const json& s = exp.raw("seeds");
    if (s.is_number_integer()) {
      std::int64_t count = s.get<std::int64_t>();
      if (count < 1) fail(origin, "[experiment] seeds must be >= 1");
      for (std::int64_t i = 1; i <= count; ++i)
        cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    } else if (s.is_array()) {
      for (const auto& v : s) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
          fail(origin, "[experiment] seeds must be nonnegative integers");
        cfg.seeds.push_back(v.get<std::uint64_t>());
      }
      if (cfg.seeds.empty())
        fail(origin, "[experiment] seeds must not be empty");
    } else {
      fail(origin, "[experiment] seeds must be a count or a list");
    }
  } else {
    cfg.seeds = {1};
  }
  if (exp.has("algorithms")) {
    cfg.algorithms = exp.strings("algorithms");
    for (const auto& a : cfg.algorithms)
      if (a != "online" && a != "etc" && a != "clairvoyant")
        fail(origin, "[experiment] algorithms entries must be online, etc, or "
                     "clairvoyant (got '" + a + "')");
    if (cfg.algorithms.empty())
      fail(origin, "[experiment] algorithms must not be empty");
  } else {
    cfg.algorithms = {"online", "etc", "clairvoyant"};
  }
  std::string kind = exp.str("kind", "");

  if (root.contains("instance") || n_items > 0) {
    if (kind.empty())
      fail(origin, "[experiment] kind is required when an instance is given");
    if (n_items == 0) fail(origin, "instance needs at least one [item1] section");
    if (cfg.horizons.empty())
      fail(origin, "[experiment] horizons is required when an instance is given");
    Section ins{origin, "instance",
                root.contains("instance") ? root.at("instance") : empty, {}};
    InstanceSpec inst;
    inst.problem = build_payload(kind, ins, origin, n_items);
    ins.finish();
    std::vector<double> dflt = default_support(kind, inst.problem);
    for (std::size_t i = 1; i <= n_items; ++i) {
      std::string sec_name = "item" + std::to_string(i);
      Section item{origin, sec_name, root.at(sec_name), {}};
      bool has_support = item.has("support");
      bool has_uniform = item.has("uniform");
      bool has_probs = item.has("probs");
      std::vector<double> support;
      if (has_uniform) {
        if (has_support || has_probs)
          fail(origin, "[" + sec_name + "] uniform excludes support/probs");
        std::vector<double> range = item.numbers("uniform");
        if (range.size() != 2 || !(range[0] < range[1]))
          fail(origin, "[" + sec_name + "] uniform must be [lo, hi], lo < hi");
        inst.supports.push_back({range[0], range[1]});
        inst.truth.push_back(Uniform{range[0], range[1]});
        item.finish();
        continue;
      }
      if (has_support)
        support = item.numbers("support");
      else if (!dflt.empty())
        support = dflt;
      else
        fail(origin, "[" + sec_name + "] needs a support");
      if (!has_probs) fail(origin, "[" + sec_name + "] needs probs");
      std::vector<double> probs = item.numbers("probs");
      if (probs.size() != support.size())
        fail(origin, "[" + sec_name + "] probs must match the support length");
      probs = normalized(std::move(probs), origin, "[" + sec_name + "]");
      inst.supports.push_back(support);
      try {
        inst.truth.emplace_back(DiscreteDist(support, probs));
      } catch (const DistError& err) {
        fail(origin, "[" + sec_name + "] " + err.what());
      }
      item.finish();
    }
    try {
      inst.validate();
    } catch (const DistError& err) {
      fail(origin, std::string("invalid instance: ") + err.what());
    }
    cfg.instance = std::move(inst);
  } else if (!kind.empty()) {
    fail(origin, "[experiment] kind given but no [item1] sections");
  }
  exp.finish();

  if (root.contains("sampletest")) {
    Section stc{origin, "sampletest", root.at("sampletest"), {}};
    SampleTestConfig st;
    st.support = stc.numbers("support");
    if (st.support.size() < 2)
      fail(origin, "[sampletest] support needs at least two values");
    if (stc.has("probs"))
      st.weights = normalized(stc.numbers("probs"), origin, "[sampletest]");
    else
      st.weights.assign(st.support.size(), 1.0 / st.support.size());
    if (st.weights.size() != st.support.size())
      fail(origin, "[sampletest] probs must match the support length");
    st.delta = stc.num("delta", 0.1);
    if (!(st.delta > 0.0) || st.delta > 1.0)
      fail(origin, "[sampletest] delta must lie in (0, 1]");
    if (stc.has("m")) {
      st.m_values.clear();
      for (double v : stc.numbers("m")) {
        if (v < 1.0 || v != std::floor(v))
          fail(origin, "[sampletest] m must be positive integers");
        st.m_values.push_back(static_cast<std::size_t>(v));
      }
    }
    std::int64_t trials = stc.integer("trials", 2000);
    if (trials < 1) fail(origin, "[sampletest] trials must be positive");
    st.trials = static_cast<std::size_t>(trials);
    st.seed = static_cast<std::uint64_t>(stc.integer("seed", 7));
    stc.finish();
    cfg.sampletest = std::move(st);
  }

  if (!root.contains("instance") && n_items == 0 && !root.contains("sampletest"))
    fail(origin, "config declares neither an instance nor a [sampletest] block");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace mb
