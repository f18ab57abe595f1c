#include "vmadmm/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace vmadmm {

namespace {

using NumberList = std::vector<double>;
using StringList = std::vector<std::string>;

struct Entry {
  std::variant<double, std::string, bool, NumberList, StringList> value;
  std::string raw;
  std::size_t line = 0;
};

using Table = std::map<std::string, Entry>;

const std::vector<std::string> kTables = {"init", "m1", "m2", "output", "problem"};

class Parser {
 public:
  Parser(const std::string& text, std::string path) : text_(text), path_(std::move(path)) {}

  std::map<std::string, Table> parse() {
    std::map<std::string, Table> out;
    out[""];
    std::string table;
    std::istringstream in(text_);
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      line_ = line;
      pos_ = 0;
      skip_space();
      if (at_end_or_comment()) continue;
      if (peek() == '[') {
        ++pos_;
        const std::string name = read_bare();
        skip_space();
        expect(']');
        skip_space();
        if (!at_end_or_comment()) fail("unexpected text after table header");
        if (std::find(kTables.begin(), kTables.end(), name) == kTables.end()) {
          fail("unknown table [" + name + "]");
        }
        if (out.count(name)) fail("duplicate table [" + name + "]");
        out[name];
        table = name;
        continue;
      }
      const std::string key = read_bare();
      if (key.empty()) fail("expected a key");
      skip_space();
      expect('=');
      skip_space();
      Entry e = read_value();
      e.line = line_no_;
      skip_space();
      if (!at_end_or_comment()) fail("unexpected text after value");
      if (out[table].count(key)) fail("duplicate key " + key);
      out[table][key] = std::move(e);
    }
    return out;
  }

 private:
  char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() const { return pos_ >= line_.size() || line_[pos_] == '#'; }
  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_, line_no_, msg); }

  std::string read_bare() {
    const std::size_t start = pos_;
    while (pos_ < line_.size()) {
      const char ch = line_[pos_];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    return line_.substr(start, pos_ - start);
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= line_.size()) fail("unterminated string");
      const char ch = line_[pos_++];
      if (ch == '"') break;
      if (ch == '\\') {
        if (pos_ >= line_.size()) fail("unterminated escape");
        const char esc = line_[pos_++];
        switch (esc) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unknown escape \\") + esc);
        }
      } else {
        out += ch;
      }
    }
    return out;
  }

  std::pair<double, std::string> read_number() {
    const std::size_t start = pos_;
    while (pos_ < line_.size()) {
      const char ch = line_[pos_];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '+' || ch == '-' ||
          ch == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string raw = line_.substr(start, pos_ - start);
    raw.erase(std::remove(raw.begin(), raw.end(), '_'), raw.end());
    if (raw.empty()) fail("expected a value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    // ERANGE also flags subnormal results, which are valid doubles.
    const bool overflow = errno == ERANGE && (!std::isfinite(v) || v == 0.0);
    if (end != raw.c_str() + raw.size() || overflow || !std::isfinite(v)) {
      fail("invalid number '" + raw + "'");
    }
    return {v, raw};
  }

  Entry read_value() {
    Entry e;
    const char ch = peek();
    if (ch == '"') {
      e.value = read_string();
    } else if (ch == '[') {
      ++pos_;
      skip_space();
      NumberList nums;
      StringList strs;
      bool any = false;
      bool strings = false;
      while (peek() != ']') {
        if (pos_ >= line_.size()) fail("unterminated array (arrays must fit on one line)");
        if (peek() == '"') {
          if (any && !strings) fail("mixed array");
          strings = true;
          strs.push_back(read_string());
        } else {
          if (any && strings) fail("mixed array");
          nums.push_back(read_number().first);
        }
        any = true;
        skip_space();
        if (peek() == ',') {
          ++pos_;
          skip_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      if (strings) {
        e.value = std::move(strs);
      } else {
        e.value = std::move(nums);
      }
    } else if (line_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      e.value = true;
    } else if (line_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      e.value = false;
    } else {
      auto [v, raw] = read_number();
      e.value = v;
      e.raw = std::move(raw);
    }
    return e;
  }

  const std::string& text_;
  std::string path_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t pos_ = 0;
};

class Reader {
 public:
  Reader(Table table, std::string path, std::string name)
      : table_(std::move(table)), path_(std::move(path)), name_(std::move(name)) {}

  bool has(const std::string& key) const { return table_.count(key) > 0; }

  const Entry* take(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    taken_.push_back(key);
    return &it->second;
  }

  std::optional<double> number(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (!std::holds_alternative<double>(e->value)) fail(*e, key + " must be a number");
    return std::get<double>(e->value);
  }

  std::optional<std::uint64_t> integer(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (!std::holds_alternative<double>(e->value)) fail(*e, key + " must be an integer");
    const std::string& raw = e->raw;
    if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos) {
      fail(*e, key + " must be a non-negative integer");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(raw.c_str(), nullptr, 10);
    if (errno == ERANGE) fail(*e, key + " is out of range");
    return static_cast<std::uint64_t>(v);
  }

  std::optional<std::string> text(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (!std::holds_alternative<std::string>(e->value)) fail(*e, key + " must be a string");
    return std::get<std::string>(e->value);
  }

  std::optional<NumberList> numbers(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (std::holds_alternative<NumberList>(e->value)) return std::get<NumberList>(e->value);
    if (std::holds_alternative<StringList>(e->value) && std::get<StringList>(e->value).empty()) {
      return NumberList{};
    }
    fail(*e, key + " must be an array of numbers");
  }

  std::optional<StringList> strings(const std::string& key) {
    const Entry* e = take(key);
    if (!e) return std::nullopt;
    if (std::holds_alternative<StringList>(e->value)) return std::get<StringList>(e->value);
    if (std::holds_alternative<NumberList>(e->value) && std::get<NumberList>(e->value).empty()) {
      return StringList{};
    }
    fail(*e, key + " must be an array of strings");
  }

  const Table& table() const { return table_; }
  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [key, e] : table_) {
      if (std::find(taken_.begin(), taken_.end(), key) == taken_.end()) {
        fail(e, "unknown key " + key + (name_.empty() ? "" : " in [" + name_ + "]"));
      }
    }
  }

  [[noreturn]] void fail(const Entry& e, const std::string& msg) const {
    throw ParseError(path_, e.line, msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    auto it = table_.find(key);
    throw ParseError(path_, it == table_.end() ? 0 : it->second.line, msg);
  }

 private:
  Table table_;
  std::string path_;
  std::string name_;
  std::vector<std::string> taken_;
};

MetricConfig read_metric(Reader& r) {
  MetricConfig mc;
  if (auto k = r.text("kind")) mc.kind = *k;
  const std::string& kind = mc.kind;
  if (kind != "zero" && kind != "scaled_identity" && kind != "diagonal" &&
      kind != "shifted_gram") {
    r.fail_key("kind", "unknown metric kind \"" + kind +
                           "\" (expected zero, scaled_identity, diagonal or shifted_gram)");
  }
  if (kind == "scaled_identity") {
    auto mu = r.number("mu");
    if (!mu) r.fail_key("kind", "scaled_identity needs mu");
    if (!(*mu >= 0.0)) r.fail_key("mu", "mu must be non-negative");
    mc.mu = *mu;
  }
  if (kind == "diagonal") {
    auto e = r.numbers("entries");
    if (!e) r.fail_key("kind", "diagonal needs entries");
    mc.entries = *e;
  }
  if (kind == "shifted_gram") {
    auto tau = r.number("tau");
    auto taus = r.numbers("taus");
    if (tau && taus) r.fail_key("taus", "give either tau or taus, not both");
    if (tau) mc.taus = {*tau};
    if (taus) mc.taus = *taus;
    if (mc.taus.empty()) r.fail_key("kind", "shifted_gram needs tau or taus");
    for (double t : mc.taus) {
      if (!(t > 0.0)) r.fail_key(tau ? "tau" : "taus", "tau must be positive");
    }
  } else if (auto rho = r.number("rho")) {
    if (!(*rho > 0.0 && *rho <= 1.0)) r.fail_key("rho", "rho must lie in (0, 1]");
    mc.rho = *rho;
  }
  r.finish();
  return mc;
}

std::optional<std::vector<double>> read_init(Reader& r, const std::string& key) {
  if (!r.has(key)) return std::nullopt;
  const Entry& e = r.table().at(key);
  if (std::holds_alternative<std::string>(e.value)) {
    auto s = r.text(key);
    if (*s != "zeros") r.fail(e, key + " must be \"zeros\" or an array of numbers");
    return std::nullopt;
  }
  return r.numbers(key);
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

std::string fmt_numbers(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_number(v[i]);
  return out + "]";
}

std::string fmt_strings(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_string(v[i]);
  return out + "]";
}

void emit_table(std::ostringstream& os, const std::string& name,
                const std::map<std::string, std::string>& kv) {
  if (kv.empty()) return;
  os << "\n[" << name << "]\n";
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
}

std::map<std::string, std::string> metric_entries(const MetricConfig& mc) {
  std::map<std::string, std::string> kv;
  kv["kind"] = fmt_string(mc.kind);
  if (mc.kind == "scaled_identity") kv["mu"] = fmt_number(mc.mu);
  if (mc.kind == "diagonal") kv["entries"] = fmt_numbers(mc.entries);
  if (mc.kind == "shifted_gram") kv["taus"] = fmt_numbers(mc.taus);
  if (mc.kind != "shifted_gram" && mc.rho != 1.0) kv["rho"] = fmt_number(mc.rho);
  return kv;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "descent", "dual_identity", "feasibility", "gap", "inequality_v",
      "kkt",     "lemma",         "saddle",      "summability"};
  return names;
}

RunConfig parse_config(const std::string& text, const std::string& path) {
  auto tables = Parser(text, path).parse();
  RunConfig cfg;

  Reader top(tables[""], path, "");
  if (auto v = top.integer("seed")) cfg.seed = *v;
  if (auto v = top.integer("iters")) cfg.iters = static_cast<std::size_t>(*v);
  if (auto v = top.number("c")) {
    if (!(*v > 0.0)) top.fail_key("c", "c must be positive");
    cfg.c = *v;
  }
  if (auto v = top.strings("checks")) {
    for (const auto& name : *v) {
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        top.fail_key("checks", "unknown check \"" + name + "\"");
      }
    }
    cfg.checks = *v;
    std::sort(cfg.checks.begin(), cfg.checks.end());
    cfg.checks.erase(std::unique(cfg.checks.begin(), cfg.checks.end()), cfg.checks.end());
  }
  if (auto v = top.number("kkt_target")) {
    if (!(*v > 0.0)) top.fail_key("kkt_target", "kkt_target must be positive");
    cfg.kkt_target = *v;
  }
  if (auto v = top.integer("oracle_budget")) {
    if (*v == 0) top.fail_key("oracle_budget", "oracle_budget must be positive");
    cfg.oracle_budget = static_cast<std::size_t>(*v);
  }
  if (auto v = top.integer("probes")) cfg.probes = static_cast<std::size_t>(*v);
  if (auto v = top.integer("probe_every")) {
    if (*v == 0) top.fail_key("probe_every", "probe_every must be positive");
    cfg.probe_every = static_cast<std::size_t>(*v);
  }
  top.finish();

  if (!tables.count("problem")) throw ParseError(path, 0, "missing [problem] table");
  {
    Reader r(tables["problem"], path, "problem");
    auto name = r.text("name");
    if (!name) throw ParseError(path, 0, "[problem] needs a name");
    cfg.problem.name = *name;
    const auto allowed = catalog_parameters(*name);
    if (allowed.empty()) r.fail_key("name", "unknown problem \"" + *name + "\"");
    for (const auto& [key, e] : tables["problem"]) {
      if (key == "name") continue;
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        r.fail(e, "unknown parameter " + key + " for problem " + *name);
      }
      if (std::holds_alternative<double>(e.value)) {
        cfg.problem.numbers[key] = *r.number(key);
      } else if (std::holds_alternative<std::string>(e.value)) {
        cfg.problem.strings[key] = *r.text(key);
      } else {
        r.fail(e, "problem parameter " + key + " must be a number or a string");
      }
    }
    r.finish();
  }
  for (const char* which : {"m1", "m2"}) {
    if (!tables.count(which)) continue;
    Reader r(tables[which], path, which);
    (std::string(which) == "m1" ? cfg.m1 : cfg.m2) = read_metric(r);
  }
  if (tables.count("init")) {
    Reader r(tables["init"], path, "init");
    cfg.init.x = read_init(r, "x");
    cfg.init.z = read_init(r, "z");
    cfg.init.y = read_init(r, "y");
    r.finish();
  }
  if (tables.count("output")) {
    Reader r(tables["output"], path, "output");
    if (auto d = r.text("dir")) cfg.output_dir = *d;
    r.finish();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::map<std::string, std::string> top;
  top["c"] = fmt_number(cfg.c);
  top["checks"] = fmt_strings(cfg.checks);
  if (cfg.kkt_target) top["kkt_target"] = fmt_number(*cfg.kkt_target);
  top["iters"] = std::to_string(cfg.iters);
  top["oracle_budget"] = std::to_string(cfg.oracle_budget);
  top["probe_every"] = std::to_string(cfg.probe_every);
  top["probes"] = std::to_string(cfg.probes);
  top["seed"] = std::to_string(cfg.seed);

  std::ostringstream os;
  for (const auto& [k, v] : top) os << k << " = " << v << "\n";

  std::map<std::string, std::string> init;
  if (cfg.init.x) init["x"] = fmt_numbers(*cfg.init.x);
  if (cfg.init.y) init["y"] = fmt_numbers(*cfg.init.y);
  if (cfg.init.z) init["z"] = fmt_numbers(*cfg.init.z);
  emit_table(os, "init", init);
  emit_table(os, "m1", metric_entries(cfg.m1));
  emit_table(os, "m2", metric_entries(cfg.m2));
  emit_table(os, "output", {{"dir", fmt_string(cfg.output_dir)}});

  std::map<std::string, std::string> problem;
  problem["name"] = fmt_string(cfg.problem.name);
  for (const auto& [k, v] : cfg.problem.numbers) problem[k] = fmt_number(v);
  for (const auto& [k, v] : cfg.problem.strings) problem[k] = fmt_string(v);
  emit_table(os, "problem", problem);
  return os.str();
}

MetricSchedule build_schedule(const MetricConfig& mc, const ProblemSpec& p, bool for_m1) {
  const Index dim = for_m1 ? p.n() : p.m();
  const char* label = for_m1 ? "m1" : "m2";
  if (mc.kind == "shifted_gram") {
    if (!for_m1) {
      throw Error(ErrorCode::kInvalidArgument, "shifted_gram is only available for m1");
    }
    return MetricSchedule::shifted_gram(mc.taus, p.c(), p.a());
  }
  MetricOperator base = MetricOperator::zero(dim);
  if (mc.kind == "scaled_identity") {
    base = MetricOperator::scaled_identity(dim, mc.mu);
  } else if (mc.kind == "diagonal") {
    if (static_cast<Index>(mc.entries.size()) != dim) {
      throw DimensionMismatch(std::string(label) + " entries", dim,
                              static_cast<Index>(mc.entries.size()));
    }
    base = MetricOperator::diagonal(Eigen::Map<const Vector>(mc.entries.data(), dim));
  } else if (mc.kind != "zero") {
    throw Error(ErrorCode::kInvalidArgument, "unknown metric kind " + mc.kind);
  }
  if (mc.rho == 1.0) return MetricSchedule::constant(std::move(base));
  return MetricSchedule::geometric_decay(std::move(base), mc.rho);
}

}  // namespace vmadmm
