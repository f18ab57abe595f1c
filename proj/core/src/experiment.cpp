#include "vmadmm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vmadmm/diagnostics.hpp"

namespace vmadmm {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSaddleSeed = 0x5add1e;
constexpr std::uint64_t kGapSeed = 0x9a9;
constexpr std::uint64_t kLemmaSeed = 0x1e44a;
constexpr std::uint64_t kDescentSeed = 0xde5c;

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

json opt_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

bool wants(const RunConfig& cfg, const std::string& name) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

Vector init_vector(const std::optional<std::vector<double>>& v, Index dim, const char* name) {
  if (!v) return Vector::Zero(dim);
  if (static_cast<Index>(v->size()) != dim) {
    throw DimensionMismatch(std::string("init ") + name, dim, static_cast<Index>(v->size()));
  }
  return Eigen::Map<const Vector>(v->data(), dim);
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector from_json(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

json summary_json(const RunConfig& cfg, const ExperimentResult& r) {
  json j;
  j["problem"] = cfg.problem.name;
  j["exit_code"] = r.exit_code;
  j["iterations"] = r.rows.size();
  j["final_kkt"] = r.rows.empty() && r.exit_code == 2 ? json(nullptr) : opt_json(r.final_kkt);
  j["min_gap_slack"] = opt_json(r.min_gap_slack);
  j["min_v_slack"] = opt_json(r.min_v_slack);
  j["rate_slope"] = r.rate_slope ? (std::isinf(*r.rate_slope) ? json("-inf") : json(*r.rate_slope))
                                 : json(nullptr);
  j["uncorrected_v_violations"] = r.uncorrected_v_violations;
  j["oracle_kkt"] = r.oracle ? json(r.oracle->kkt) : json(nullptr);
  const auto& a = r.assumptions;
  j["assumptions"] = {{"condition_i", a.condition_i},   {"condition_ii", a.condition_ii},
                      {"condition_iii", a.condition_iii}, {"ergodic_ok", a.ergodic_ok},
                      {"alpha1", a.alpha1},               {"alpha", a.alpha},
                      {"alpha2", a.alpha2},               {"lipschitz", a.lipschitz}};
  json checks = json::object();
  for (const auto& c : r.checks) {
    checks[c.name] = {{"hard", c.hard}, {"passed", c.passed}, {"detail", c.detail}};
  }
  j["checks"] = checks;
  return j;
}

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg,
                               const std::optional<std::string>& override_dir) {
  if (override_dir && !override_dir->empty()) return *override_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return cfg.output_dir;
}

const std::string& iterate_log_header() {
  static const std::string header =
      "k,primal_objective,lagrangian_at_probe,residual_primal,u_k,v_k,v_slack,gap,gap_bound,kkt";
  return header;
}

std::string format_row(const IterateRow& r) {
  std::string s = std::to_string(r.k);
  for (const std::string& f :
       {fmt(r.primal_objective), fmt(r.lagrangian_at_probe), fmt(r.residual_primal), fmt(r.u_k),
        fmt(r.v_k), fmt(r.v_slack), fmt(r.gap), fmt(r.gap_bound), fmt(r.kkt)}) {
    s += ',';
    s += f;
  }
  return s;
}

void write_iterate_log(std::ostream& out, const std::vector<IterateRow>& rows) {
  out << iterate_log_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

void write_oracle_json(const std::string& path, const std::string& problem, const ProblemSpec& p,
                       const OracleResult& o) {
  json j;
  j["problem"] = problem;
  j["method"] = o.method;
  j["iterations"] = o.iterations;
  j["kkt"] = o.kkt;
  j["objective"] = p.objective(o.saddle.x);
  j["x"] = to_std(o.saddle.x);
  j["z"] = to_std(o.saddle.z);
  j["y"] = to_std(o.saddle.y);
  write_text(path, j.dump(2) + "\n");
}

OracleResult read_oracle_json(const std::string& path, double* optimal_value) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open oracle file " + path);
  json j;
  try {
    in >> j;
    OracleResult o;
    o.method = j.value("method", std::string("unknown"));
    o.iterations = j.value("iterations", std::size_t{0});
    o.kkt = j.at("kkt").get<double>();
    o.saddle.x = from_json(j, "x");
    o.saddle.z = from_json(j, "z");
    o.saddle.y = from_json(j, "y");
    if (optimal_value) *optimal_value = j.at("objective").get<double>();
    return o;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentOptions& options) {
  std::ostream* log = options.report;
  ExperimentResult res;
  res.output_dir = resolve_output_dir(cfg, options.out_dir);
  const std::filesystem::path out_dir(res.output_dir);
  std::filesystem::create_directories(out_dir);
  RunConfig effective = cfg;
  if (options.iters) effective.iters = *options.iters;
  write_text(out_dir / "config.toml", serialize_config(effective));

  const CatalogProblem prob = build_problem(cfg.problem, cfg.c, cfg.seed);
  const ProblemSpec& p = prob.spec;
  const MetricSchedule s1 = build_schedule(cfg.m1, p, true);
  const MetricSchedule s2 = build_schedule(cfg.m2, p, false);
  const double c = p.c();

  res.assumptions = validate_assumptions(p, s1, s2);
  if (log) *log << res.assumptions.summary();
  if (!res.assumptions.permits_run() && !options.force) {
    res.exit_code = 2;
    res.checks.push_back({"assumptions", true, false,
                          "no convergence theorem applies; rerun with --force to override"});
    if (log) *log << "refusing to run: no convergence theorem applies (use --force)\n";
    write_text(out_dir / "summary.json", summary_json(cfg, res).dump(2) + "\n");
    return res;
  }
  if (!res.assumptions.permits_run() && log) {
    *log << "warning: running without a convergence guarantee (forced)\n";
  }

  const SolverState init =
      SolverState::from(p, init_vector(cfg.init.x, p.n(), "x"), init_vector(cfg.init.z, p.m(), "z"),
                        init_vector(cfg.init.y, p.m(), "y"));

  const bool need_oracle = wants(cfg, "gap") || wants(cfg, "inequality_v") ||
                           wants(cfg, "feasibility") || wants(cfg, "lemma") ||
                           wants(cfg, "saddle") || wants(cfg, "descent");
  if (need_oracle) {
    res.oracle = compute_oracle(p, cfg.oracle_budget);
    write_oracle_json((out_dir / "oracle.json").string(), cfg.problem.name, p, *res.oracle);
    if (log) *log << "oracle: kkt " << sci(res.oracle->kkt) << " (" << res.oracle->method << ")\n";
  }

  StoppingRule stop;
  stop.max_iters = effective.iters;
  stop.kkt_tol = cfg.kkt_target;
  stop.kkt = [&p](const SolverState& s) { return kkt_residual(p, s.x, s.y); };
  RunOptions ro;
  ro.force = true;
  ro.keep_trace = true;
  const RunResult run_out = run(p, init, s1, s2, stop, ro);
  const auto& trace = run_out.trace;
  const std::size_t iters = run_out.log.size();

  // Rows.
  res.rows.resize(iters);
  for (std::size_t i = 0; i < iters; ++i) {
    const auto& st = trace[i + 1];
    IterateRow& row = res.rows[i];
    row.k = st.k;
    row.primal_objective = p.objective(st.x);
    row.residual_primal = run_out.log[i].residual_primal;
    row.kkt = *run_out.log[i].kkt;
    if (res.oracle) row.lagrangian_at_probe = lagrangian(p, st.x, st.z, res.oracle->saddle.y);
  }
  res.final_kkt = iters > 0 ? res.rows.back().kkt : kkt_residual(p, init.x, init.y);

  auto add_check = [&](std::string name, bool hard, bool passed, std::string detail) {
    if (log) {
      *log << (passed ? "[ok]   " : (hard ? "[FAIL] " : "[note] ")) << name << ": " << detail
           << "\n";
    }
    res.checks.push_back({std::move(name), hard, passed, std::move(detail)});
  };

  if (wants(cfg, "kkt")) {
    if (cfg.kkt_target) {
      add_check("kkt", true, res.final_kkt <= *cfg.kkt_target,
                "final " + sci(res.final_kkt) + " vs target " + sci(*cfg.kkt_target));
    } else {
      add_check("kkt", false, true, "final " + sci(res.final_kkt));
    }
  }

  if (wants(cfg, "dual_identity")) {
    double worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t i = 0; i < iters; ++i) {
      const double dy = (trace[i + 1].y - trace[i].y).norm() / c;
      const double dev = std::abs(res.rows[i].residual_primal - dy);
      if (dev > worst) {
        worst = dev;
        worst_k = res.rows[i].k;
      }
    }
    add_check("dual_identity", true, worst <= 1e-12,
              "max deviation " + sci(worst) + " at k = " + std::to_string(worst_k));
  }

  const Probe* saddle = res.oracle ? &res.oracle->saddle : nullptr;

  // Ergodic gap at the oracle (every k) and at random probes (probe cadence).
  if (saddle) {
    ErgodicState erg;
    const MetricOperator m1_0 = s1.at(0), m2_0 = s2.at(0);
    const double gamma_star = gamma(p, init, m1_0, m2_0, *saddle);
    ProbeSampler sampler(*saddle, cfg.seed ^ kGapSeed);
    std::vector<std::pair<Probe, double>> probes;
    for (std::size_t j = 0; j < cfg.probes; ++j) {
      Probe q = sampler.next();
      const double g = gamma(p, init, m1_0, m2_0, q);
      probes.emplace_back(std::move(q), g);
    }
    double min_slack = kInf;
    for (std::size_t i = 0; i < iters; ++i) {
      erg.add(trace[i + 1]);
      const GapCertificate cert = gap_certificate(p, erg, *saddle, gamma_star);
      res.rows[i].gap = cert.gap;
      res.rows[i].gap_bound = cert.bound;
      min_slack = std::min(min_slack, cert.slack);
      if (erg.k() % cfg.probe_every == 0) {
        for (const auto& [q, g] : probes) {
          min_slack = std::min(min_slack, gap_certificate(p, erg, q, g).slack);
        }
      }
    }
    if (iters > 0) res.min_gap_slack = min_slack;
    if (wants(cfg, "gap")) {
      const bool hard = res.assumptions.ergodic_ok;
      add_check("gap", hard, iters == 0 || min_slack >= -1e-8,
                "min slack " + sci(iters ? min_slack : 0.0) +
                    (hard ? "" : " (ergodic hypotheses do not hold; informational)"));
    }
  }

  // u/v sequences, inequality (v) and the feasibility rate.
  const bool uv_defined = saddle && p.h().kind() == FunctionDescriptor::Kind::kZero &&
                              s1.stationary_after() == std::size_t{1} &&
                              s2.stationary_after() == std::size_t{1};
  if (uv_defined && iters >= 1) {
    const auto pairs = sequence_uv(p, trace, *saddle, s1, s2);
    const auto ineq = inequality_v_check(pairs, c);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const std::size_t k = pairs[j].k;  // row index of iterate k is k - 1
      res.rows[k - 1].u_k = pairs[j].u;
      res.rows[k].u_k = pairs[j].u_next;
      res.rows[k].v_k = pairs[j].v;
      res.rows[k].v_slack = ineq.slack[j];
    }
    res.uncorrected_v_violations = ineq.uncorrected_violations;
    if (!pairs.empty()) res.min_v_slack = ineq.min_slack;
    if (wants(cfg, "inequality_v")) {
      add_check("inequality_v", true, pairs.empty() || ineq.holds(1e-10),
                "min slack " + sci(pairs.empty() ? 0.0 : ineq.min_slack) + " at k = " +
                    std::to_string(ineq.min_slack_k));
      std::string detail = std::to_string(ineq.uncorrected_violations) +
                           " violations of the uncorrected inequality";
      if (ineq.first_uncorrected_violation) {
        detail += ", first at k = " + std::to_string(*ineq.first_uncorrected_violation);
      }
      add_check("inequality_v_uncorrected", false, ineq.uncorrected_violations == 0, detail);
    }
    if (wants(cfg, "feasibility") && !pairs.empty()) {
      const auto mono = v_monotone_check(pairs);
      const double u1 = pairs.front().u;
      const double s = accumulated_z_steps(pairs, c);
      const auto pts = feasibility_rate(p, trace, u1, s);
      std::size_t violations = 0;
      std::optional<std::size_t> first;
      std::vector<std::size_t> ks;
      std::vector<double> vals;
      for (const auto& pt : pts) {
        if (pt.residual > pt.bound + 1e-12) {
          ++violations;
          if (!first) first = pt.k;
        }
      }
      for (const auto& r : res.rows) {
        ks.push_back(r.k);
        vals.push_back(r.residual_primal);
      }
      add_check("feasibility_bound", mono.holds, violations == 0,
                std::to_string(violations) + " bound violations" +
                    (first ? " (first at k = " + std::to_string(*first) + ")" : std::string()) +
                    (mono.holds ? "" : "; v is not monotone, bound not guaranteed"));
      const std::size_t hi = std::min<std::size_t>(2000, iters);
      const SlopeFit fit = log_log_slope(ks, vals, 100, hi);
      res.rate_slope = fit.slope;
      const bool slope_hard = iters >= 1000;
      add_check("feasibility_slope", slope_hard, fit.slope <= -0.45,
                "log-log slope " + fmt(fit.slope) + " over k in [100, " + std::to_string(hi) +
                    "] (" + std::to_string(fit.points) + " points, " +
                    std::to_string(fit.below_floor) + " below noise floor)");
    }
  } else if (wants(cfg, "inequality_v") || wants(cfg, "feasibility")) {
    add_check("inequality_v", false, true,
              "skipped: u/v sequences need h = 0 and constant metrics");
  }

  if (saddle && wants(cfg, "lemma")) {
    ProbeSampler sampler(*saddle, cfg.seed ^ kLemmaSeed);
    double min_first = kInf, min_second = kInf;
    std::size_t skipped = 0, evaluated = 0;
    for (std::size_t i = 0; i < iters; ++i) {
      if (trace[i].k % cfg.probe_every != 0) continue;
      const MetricOperator m1 = s1.at(trace[i].k), m2 = s2.at(trace[i].k);
      std::vector<Probe> probes;
      probes.push_back({trace[i + 1].x, trace[i + 1].z, trace[i + 1].y});
      for (std::size_t j = 0; j < cfg.probes; ++j) probes.push_back(sampler.next());
      for (const auto& q : probes) {
        const auto slack = lemma_inequality_check(p, trace[i], trace[i + 1], m1, m2, q);
        if (!slack) {
          ++skipped;
          continue;
        }
        ++evaluated;
        min_first = std::min(min_first, *slack);
        min_second = std::min(min_second, lemma_second_check(p, trace[i], trace[i + 1], q.x));
      }
    }
    add_check("lemma", true, evaluated == 0 || (min_first >= -1e-9 && min_second >= -1e-9),
              "min slack " + sci(evaluated ? min_first : 0.0) + " (second statement " +
                  sci(evaluated ? min_second : 0.0) + ") over " + std::to_string(evaluated) +
                  " probes, " + std::to_string(skipped) + " outside the domain");
  }

  if (saddle && wants(cfg, "descent")) {
    ProbeSampler sampler(*saddle, cfg.seed ^ kDescentSeed);
    double worst = kInf;
    for (std::size_t i = 0; i < iters; ++i) {
      if (trace[i].k % cfg.probe_every != 0) continue;
      for (std::size_t j = 0; j < cfg.probes; ++j) {
        worst = std::min(worst, descent_lemma_check(p, trace[i], trace[i + 1], sampler.next().x));
      }
    }
    add_check("descent", true, !(worst < -1e-9), "min slack " + sci(std::isinf(worst) ? 0.0 : worst));
  }

  if (saddle && wants(cfg, "saddle")) {
    ProbeSampler sampler(*saddle, cfg.seed ^ kSaddleSeed);
    double worst = kInf;
    for (int j = 0; j < 100; ++j) {
      const SaddleSlack s = saddle_check(p, *saddle, sampler.next());
      worst = std::min({worst, s.dual_side, s.primal_side});
    }
    add_check("saddle", true, worst >= -1e-9, "min slack " + sci(worst) + " over 100 probes");
  }

  if (wants(cfg, "summability")) {
    const SummabilityReport sr = summability_check(p, trace, s1, s2);
    const bool hard = res.assumptions.condition_i || res.assumptions.condition_ii;
    std::ostringstream os;
    os << "last-quarter shares " << sci(sr.last_quarter_share[0]) << ", "
       << sci(sr.last_quarter_share[1]) << ", " << sci(sr.last_quarter_share[2]);
    if (!hard) os << " (conditions (I)/(II) do not hold; informational)";
    add_check("summability", hard, sr.bounded(), os.str());
  }

  for (const auto& ch : res.checks) {
    if (ch.hard && !ch.passed) res.exit_code = 1;
  }

  {
    std::ostringstream csv;
    write_iterate_log(csv, res.rows);
    write_text(out_dir / "iterates.csv", csv.str());
  }
  write_text(out_dir / "summary.json", summary_json(cfg, res).dump(2) + "\n");
  return res;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_field(const std::string& s, bool& ok) {
  ok = true;
  if (s == "NA") return std::nullopt;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) ok = false;
  return v;
}

}  // namespace

LogCheckReport check_log(const std::string& csv_path, const std::string& oracle_path) {
  LogCheckReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.passed = false;
    rep.messages.push_back(msg);
  };
  double optimum = 0.0;
  const OracleResult o = read_oracle_json(oracle_path, &optimum);
  if (!(o.kkt < 1e-10)) fail("oracle kkt " + sci(o.kkt) + " is not below 1e-10");

  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open log " + csv_path);
  std::string line;
  if (!std::getline(in, line) || line != iterate_log_header()) {
    throw ParseError(csv_path, 1, "unexpected header (expected " + iterate_log_header() + ")");
  }
  std::size_t line_no = 1;
  long long prev_k = -1;
  double last_kkt = kInf;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 10) throw ParseError(csv_path, line_no, "expected 10 fields");
    const long long k = std::atoll(fields[0].c_str());
    if (k <= prev_k) fail("line " + std::to_string(line_no) + ": k is not increasing");
    prev_k = k;
    std::optional<double> vals[10];
    for (int j = 1; j < 10; ++j) {
      bool ok = true;
      vals[j] = parse_field(fields[j], ok);
      if (!ok) throw ParseError(csv_path, line_no, "bad value '" + fields[j] + "'");
    }
    ++rep.rows;
    const auto& obj = vals[1];
    if (obj && std::isfinite(*obj) && *obj < optimum - 1e-8) {
      fail("k = " + std::to_string(k) + ": objective " + fmt(*obj) +
           " below the oracle optimum " + fmt(optimum));
    }
    if (vals[7] && vals[8] && *vals[7] > *vals[8] + 1e-8) {
      fail("k = " + std::to_string(k) + ": gap " + fmt(*vals[7]) + " exceeds bound " +
           fmt(*vals[8]));
    }
    if (vals[6] && *vals[6] < -1e-10) {
      fail("k = " + std::to_string(k) + ": v_slack " + fmt(*vals[6]));
    }
    if (vals[9]) last_kkt = *vals[9];
  }
  rep.messages.push_back(std::to_string(rep.rows) + " rows, final kkt " + sci(last_kkt) +
                         ", oracle kkt " + sci(o.kkt));
  return rep;
}

}  // namespace vmadmm
