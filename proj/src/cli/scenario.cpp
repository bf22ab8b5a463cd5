#include "gci/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "gci/errors.hpp"

namespace gci::cli {

using nlohmann::json;

ScenarioError::ScenarioError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

namespace {

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void error(const std::string& path, const std::string& msg) const {
    const std::size_t line = line_of(path);
    std::ostringstream os;
    os << source_;
    if (line) os << ":" << line;
    os << ": field " << (path.empty() ? "/" : path) << ": " << msg;
    throw ScenarioError(path.empty() ? "/" : path, line, os.str());
  }

  // Line of the first occurrence of the last object key in the path.
  std::size_t line_of(const std::string& path) const {
    std::string key;
    std::size_t pos = path.size();
    while (pos > 0) {
      const std::size_t slash = path.rfind('/', pos - 1);
      if (slash == std::string::npos) break;
      std::string part = path.substr(slash + 1, pos - slash - 1);
      if (!part.empty() && part.find_first_not_of("0123456789") != std::string::npos) {
        key = part;
        break;
      }
      pos = slash;
    }
    if (key.empty()) return 0;
    const std::size_t at = text_.find("\"" + key + "\"");
    if (at == std::string::npos) return 0;
    std::size_t line = 1;
    for (std::size_t i = 0; i < at; ++i) line += text_[i] == '\n';
    return line;
  }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) error(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.count(k)) error(path + "/" + k, "unknown field");
    }
  }

  const json& member(const json& obj, const std::string& path, const char* key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) error(path + "/" + key, "missing required field");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) error(path, "expected a finite number");
    return x;
  }

  double number(const json& obj, const std::string& path, const char* key) const {
    return number(member(obj, path, key), path + "/" + key);
  }

  double number_or(const json& obj, const std::string& path, const char* key, double fallback) const {
    return obj.contains(key) ? number(obj.at(key), path + "/" + key) : fallback;
  }

  double positive(const json& obj, const std::string& path, const char* key) const {
    const double x = number(obj, path, key);
    if (!(x > 0.0)) error(path + "/" + key, "must be > 0");
    return x;
  }

  std::size_t count(const json& v, const std::string& path, std::size_t min) const {
    if (!v.is_number_integer() && !v.is_number_unsigned()) error(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < static_cast<long long>(min)) error(path, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(x);
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) error(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& path, std::size_t min_size = 1) const {
    if (!v.is_array()) error(path, "expected an array of numbers");
    if (v.size() < min_size) error(path, "expected at least " + std::to_string(min_size) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
    return out;
  }

  // An explicit list or {"log_space": {"min", "max", "points"}}.
  std::vector<double> grid(const json& v, const std::string& path) const {
    if (v.is_array()) return numbers(v, path);
    keys(v, path, {"log_space", "linear"});
    const bool log = v.contains("log_space");
    if (log == v.contains("linear")) error(path, "expected exactly one of log_space, linear");
    const std::string sub = path + (log ? "/log_space" : "/linear");
    const json& spec = v.at(log ? "log_space" : "linear");
    keys(spec, sub, {"min", "max", "points"});
    const double lo = number(spec, sub, "min");
    const double hi = number(spec, sub, "max");
    const std::size_t n = count(member(spec, sub, "points"), sub + "/points", 1);
    if (log && !(lo > 0.0 && hi > 0.0)) error(sub, "log_space bounds must be > 0");
    if (hi < lo) error(sub, "max must be >= min");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out[i] = log ? std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo))) : lo + s * (hi - lo);
    }
    return out;
  }

  LevelSystem levels(const json& v, const std::string& path) const {
    const std::vector<double> e = numbers(v, path, 2);
    try {
      return LevelSystem(e);
    } catch (const Error& err) {
      error(path, err.what());
    }
  }

  ProbVector probabilities(const json& v, const std::string& path) const {
    try {
      return ProbVector(numbers(v, path, 2));
    } catch (const Error& err) {
      error(path, err.what());
    }
  }

  CMatrix complex_matrix(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) error(path, "expected a square matrix");
    const auto n = static_cast<Eigen::Index>(v.size());
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::string rp = path + "/" + std::to_string(r);
      const json& row = v[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != v.size()) error(rp, "expected a row of length " + std::to_string(n));
      for (Eigen::Index c = 0; c < n; ++c) {
        const std::string cp = rp + "/" + std::to_string(c);
        const json& e = row[static_cast<std::size_t>(c)];
        if (e.is_array()) {
          if (e.size() != 2) error(cp, "complex entries are [re, im]");
          m(r, c) = {number(e[0], cp + "/0"), number(e[1], cp + "/1")};
        } else {
          m(r, c) = number(e, cp);
        }
      }
    }
    return m;
  }

  std::vector<GeneratorGrid> generators(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) error(path, "expected a non-empty array of generators");
    std::vector<GeneratorGrid> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      keys(v[i], p, {"family", "parameters"});
      const std::string fam = string(member(v[i], p, "family"), p + "/family");
      GeneratorGrid g{GeneratorFamily::Shannon, {}};
      if (fam == "alpha") {
        g.family = GeneratorFamily::Alpha;
      } else if (fam == "tsallis") {
        g.family = GeneratorFamily::Tsallis;
      } else if (fam == "renyi") {
        g.family = GeneratorFamily::Renyi;
      } else if (fam != "shannon") {
        error(p + "/family", "expected one of alpha, tsallis, renyi, shannon");
      }
      if (g.family != GeneratorFamily::Shannon) {
        g.parameters = grid(member(v[i], p, "parameters"), p + "/parameters");
        for (std::size_t k = 0; k < g.parameters.size(); ++k) {
          try {
            make_generator(g.family, g.parameters[k]);
          } catch (const Error& err) {
            error(p + "/parameters/" + std::to_string(k), err.what());
          }
        }
      }
      out.push_back(std::move(g));
    }
    return out;
  }

  static Generator make_generator(GeneratorFamily family, double parameter) {
    switch (family) {
      case GeneratorFamily::Alpha: return Generator::alpha_entropy(parameter);
      case GeneratorFamily::Tsallis: return Generator::tsallis(parameter);
      case GeneratorFamily::Renyi: return Generator::renyi(parameter);
      case GeneratorFamily::Shannon: break;
    }
    return Generator::shannon();
  }

  BathSet baths(const json& v, const std::string& path, std::size_t n) const {
    if (!v.is_array() || v.empty()) error(path, "expected a non-empty array of baths");
    BathSet out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      keys(v[i], p, {"beta", "temperature", "manifold"});
      BathCoupling b{0.0, {}};
      if (v[i].contains("beta") == v[i].contains("temperature")) {
        error(p, "expected exactly one of beta, temperature");
      }
      b.beta = v[i].contains("beta") ? positive(v[i], p, "beta") : 1.0 / positive(v[i], p, "temperature");
      if (v[i].contains("manifold")) {
        const json& m = v[i].at("manifold");
        if (!m.is_array()) error(p + "/manifold", "expected an array of level indices");
        for (std::size_t k = 0; k < m.size(); ++k) {
          const std::size_t idx = count(m[k], p + "/manifold/" + std::to_string(k), 0);
          if (idx >= n) error(p + "/manifold/" + std::to_string(k), "level index out of range");
          b.manifold.push_back(idx);
        }
      }
      out.push_back(std::move(b));
    }
    try {
      validate_baths(out, n);
    } catch (const Error& err) {
      error(path, err.what());
    }
    return out;
  }

  IsochoreMap isochore_map(const json& v, const std::string& path, std::size_t n) const {
    if (v.is_string()) {
      if (v.get<std::string>() != "full") error(path, "expected \"full\", {\"uniform\": y} or {\"matrix\": [...]}");
      return FullThermalization{};
    }
    keys(v, path, {"uniform", "matrix"});
    if (v.contains("uniform") == v.contains("matrix")) error(path, "expected exactly one of uniform, matrix");
    if (v.contains("uniform")) {
      const double y = number(v, path, "uniform");
      if (y < 0.0 || y > 1.0) error(path + "/uniform", "must lie in [0, 1]");
      return UniformMap{y};
    }
    const json& m = v.at("matrix");
    const std::string mp = path + "/matrix";
    if (!m.is_array() || m.size() != n) error(mp, "expected an N x N matrix");
    StochasticMatrix out;
    for (std::size_t r = 0; r < n; ++r) {
      const std::vector<double> row = numbers(m[r], mp + "/" + std::to_string(r), n);
      if (row.size() != n) error(mp + "/" + std::to_string(r), "expected N entries");
      out.m.push_back(row);
    }
    return out;
  }

  std::vector<ProtocolStep> steps(const json& v, const std::string& path, std::size_t n) const {
    if (!v.is_array() || v.empty()) error(path, "expected a non-empty array of steps");
    std::vector<ProtocolStep> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (!v[i].is_object()) error(p, "expected an object");
      const std::string type = string(member(v[i], p, "type"), p + "/type");
      const double duration = v[i].contains("duration") ? positive(v[i], p, "duration") : 1.0;
      const std::string tag = v[i].contains("tag") ? string(v[i].at("tag"), p + "/tag") : std::string{};
      if (type == "isochore") {
        keys(v[i], p, {"type", "baths", "map", "duration", "tag"});
        IsochoreStep s{baths(member(v[i], p, "baths"), p + "/baths", n), FullThermalization{}, duration, tag};
        if (v[i].contains("map")) s.map = isochore_map(v[i].at("map"), p + "/map", n);
        out.emplace_back(std::move(s));
      } else if (type == "adiabat") {
        keys(v[i], p, {"type", "levels", "duration", "tag"});
        LevelSystem target = levels(member(v[i], p, "levels"), p + "/levels");
        if (target.size() != n) error(p + "/levels", "level count differs from the system");
        out.emplace_back(AdiabatStep{std::move(target), duration, tag});
      } else if (type == "isotherm") {
        keys(v[i], p, {"type", "levels", "beta_end", "steps", "duration", "tag"});
        LevelSystem target = levels(member(v[i], p, "levels"), p + "/levels");
        if (target.size() != n) error(p + "/levels", "level count differs from the system");
        const double beta_end = positive(v[i], p, "beta_end");
        const std::size_t stairs = count(member(v[i], p, "steps"), p + "/steps", 2);
        out.emplace_back(IsothermStep{std::move(target), beta_end, stairs, duration, tag});
      } else {
        error(p + "/type", "expected one of isochore, adiabat, isotherm");
      }
    }
    return out;
  }

  ScenarioBody body(const json& doc, const std::string& kind) const {
    if (kind == "protocol") {
      keys(doc, "", {"name", "kind", "levels", "initial", "reference_beta", "steps", "generators"});
      ProtocolScenario s{levels(member(doc, "", "levels"), "/levels"), std::nullopt, std::nullopt, 0.0, {}, {}};
      const json& init = member(doc, "", "initial");
      keys(init, "/initial", {"populations", "gibbs_beta"});
      if (init.contains("populations") == init.contains("gibbs_beta")) {
        error("/initial", "expected exactly one of populations, gibbs_beta");
      }
      if (init.contains("populations")) {
        const ProbVector p = probabilities(init.at("populations"), "/initial/populations");
        if (p.size() != s.levels.size()) error("/initial/populations", "length differs from levels");
        s.populations = p.values();
      } else {
        s.gibbs_beta = positive(init, "/initial", "gibbs_beta");
      }
      s.reference_beta = positive(doc, "", "reference_beta");
      s.steps = steps(member(doc, "", "steps"), "/steps", s.levels.size());
      s.generators = generators(member(doc, "", "generators"), "/generators");
      return s;
    }
    if (kind == "otto") {
      keys(doc, "", {"name", "kind", "cold", "hot", "t_cold", "t_hot", "alphas"});
      OttoScenario s{levels(member(doc, "", "cold"), "/cold"), levels(member(doc, "", "hot"), "/hot"),
                     positive(doc, "", "t_cold"), positive(doc, "", "t_hot"),
                     grid(member(doc, "", "alphas"), "/alphas")};
      if (s.cold.size() != 2 || s.hot.size() != 2) error("/cold", "Otto scenarios use two-level systems");
      for (std::size_t i = 0; i < s.alphas.size(); ++i) {
        if (!(s.alphas[i] > 0.0)) error("/alphas/" + std::to_string(i), "alpha must be > 0");
      }
      return s;
    }
    if (kind == "high_t") {
      keys(doc, "", {"name", "kind", "levels", "temperature", "initial", "alpha_tildes", "margin"});
      HighTScenario s{levels(member(doc, "", "levels"), "/levels"), positive(doc, "", "temperature"),
                      probabilities(member(doc, "", "initial"), "/initial").values(),
                      grid(member(doc, "", "alpha_tildes"), "/alpha_tildes"),
                      number_or(doc, "", "margin", 5.0)};
      if (s.initial.size() != s.levels.size()) error("/initial", "length differs from levels");
      for (std::size_t i = 0; i < s.alpha_tildes.size(); ++i) {
        if (!(s.alpha_tildes[i] > 0.0)) error("/alpha_tildes/" + std::to_string(i), "must be > 0");
      }
      return s;
    }
    if (kind == "half_zero") {
      keys(doc, "", {"name", "kind", "cold_levels", "t_cold", "t_hot", "fraction"});
      HalfZeroScenario s{levels(member(doc, "", "cold_levels"), "/cold_levels"), positive(doc, "", "t_cold"),
                         positive(doc, "", "t_hot"), number(doc, "", "fraction")};
      if (s.cold_levels.size() != 3) error("/cold_levels", "the half-zero machine uses three levels");
      return s;
    }
    if (kind == "coherence_extraction") {
      keys(doc, "", {"name", "kind", "rho0", "levels", "h_int", "temperature", "variant"});
      CoherenceScenario s{complex_matrix(member(doc, "", "rho0"), "/rho0"),
                          levels(member(doc, "", "levels"), "/levels"), std::nullopt,
                          positive(doc, "", "temperature"), false};
      if (static_cast<std::size_t>(s.rho0.rows()) != s.levels.size()) error("/rho0", "dimension differs from levels");
      const std::string variant = doc.contains("variant") ? string(doc.at("variant"), "/variant") : "two_stage";
      if (variant == "four_stage") {
        s.passive = true;
      } else if (variant != "two_stage") {
        error("/variant", "expected two_stage or four_stage");
      }
      if (doc.contains("h_int")) {
        s.h_int = complex_matrix(doc.at("h_int"), "/h_int");
        if (s.h_int->rows() != s.rho0.rows()) error("/h_int", "dimension differs from rho0");
      } else if (!s.passive) {
        error("/h_int", "missing required field");
      }
      return s;
    }
    if (kind == "staircase") {
      keys(doc, "", {"name", "kind", "from", "to", "beta_begin", "beta_end", "stairs", "alphas"});
      StaircaseScenario s{levels(member(doc, "", "from"), "/from"), levels(member(doc, "", "to"), "/to"),
                          positive(doc, "", "beta_begin"), positive(doc, "", "beta_end"), {},
                          grid(member(doc, "", "alphas"), "/alphas")};
      if (s.from.size() != s.to.size()) error("/to", "level count differs from /from");
      const json& st = member(doc, "", "stairs");
      if (!st.is_array() || st.empty()) error("/stairs", "expected a non-empty array of integers");
      for (std::size_t i = 0; i < st.size(); ++i) s.stairs.push_back(count(st[i], "/stairs/" + std::to_string(i), 2));
      return s;
    }
    if (kind == "random_validity") {
      keys(doc, "", {"name", "kind", "instances", "min_levels", "max_levels", "maps", "generators"});
      RandomValidityScenario s{count(member(doc, "", "instances"), "/instances", 1),
                               doc.contains("min_levels") ? count(doc.at("min_levels"), "/min_levels", 2) : 2,
                               doc.contains("max_levels") ? count(doc.at("max_levels"), "/max_levels", 2) : 8,
                               {}, generators(member(doc, "", "generators"), "/generators")};
      if (s.max_levels < s.min_levels) error("/max_levels", "must be >= min_levels");
      const json& maps = member(doc, "", "maps");
      if (!maps.is_array() || maps.empty()) error("/maps", "expected a non-empty array");
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const std::string m = string(maps[i], "/maps/" + std::to_string(i));
        if (m == "uniform") {
          s.maps.push_back(RandomMapKind::Uniform);
        } else if (m == "two_level") {
          s.maps.push_back(RandomMapKind::TwoLevel);
        } else {
          error("/maps/" + std::to_string(i), "expected uniform or two_level");
        }
      }
      return s;
    }
    error("/kind",
          "expected one of protocol, otto, high_t, half_zero, coherence_extraction, staircase, random_validity");
  }

 private:
  const std::string& text_;
  std::string source_;
};

}  // namespace

const char* kind_name(const ScenarioBody& body) {
  switch (body.index()) {
    case 0: return "protocol";
    case 1: return "otto";
    case 2: return "high_t";
    case 3: return "half_zero";
    case 4: return "coherence_extraction";
    case 5: return "staircase";
    default: return "random_validity";
  }
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ScenarioError("/", line, source + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const Parser p(text, source);
  if (!doc.is_object()) p.error("", "scenario must be a JSON object");
  const std::string name = doc.contains("name") ? p.string(doc.at("name"), "/name") : std::string{};
  const std::string kind = p.string(p.member(doc, "", "kind"), "/kind");
  return {name, p.body(doc, kind)};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("/", 0, path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace gci::cli
