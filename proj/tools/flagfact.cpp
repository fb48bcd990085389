// flagfact: command-line front end for the factorization library.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flagfact/factorization.hpp"
#include "flagfact/manifold.hpp"
#include "flagfact/properties.hpp"
#include "flagfact/serialize.hpp"

namespace ff = flagfact;
using ff::Json;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kCorner = 2, kNotPositive = 3, kInvariant = 4 };

struct Options {
  std::string command;
  std::string instance;
  std::string flag;
  std::string input;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 200;
  std::optional<double> tol_residual;
  std::string out;
  std::string format = "json";
  std::string model = "char";
  std::vector<std::string> filter;
};

// Result of one command: report body plus exit status.
struct Outcome {
  Json result = Json::object();
  Json diagnostics = Json::object();
  int code = kOk;
  Json error;  // null on success
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ff::ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ff::Error("sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ff::ParseError(origin + ": " + e.what());
  }
}

bool looks_like_file(const std::string& arg) {
  return arg.find('/') != std::string::npos || arg.ends_with(".json");
}

// Parsed inputs with the bytes they came from.
class Inputs {
 public:
  explicit Inputs(const Options& opt) : opt_(opt) {
    if (!opt.input.empty()) doc_ = load("input", opt.input);
    if (!opt.flag.empty() && looks_like_file(opt.flag)) flag_doc_ = load("flag", opt.flag);
    if (!opt.instance.empty() && looks_like_file(opt.instance))
      instance_doc_ = load("instance", opt.instance);
  }

  const Json& hashes() const { return hashes_; }
  bool has_input() const { return doc_.has_value(); }
  const Json& doc() const { return *doc_; }

  ff::InstancePtr instance() {
    if (instance_) return instance_;
    ff::InstancePtr inst;
    if (instance_doc_)
      inst = ff::instance_from_json(*instance_doc_);
    else if (!opt_.instance.empty())
      inst = ff::parse_instance_shorthand(opt_.instance);
    else if (doc_ && doc_->contains("instance"))
      inst = ff::instance_from_json((*doc_)["instance"]);
    else if (flag_doc_ && flag_doc_->contains("instance"))
      inst = ff::instance_from_json((*flag_doc_)["instance"]);
    else if (doc_ && doc_->contains("flag") && (*doc_)["flag"].is_object() &&
             (*doc_)["flag"].contains("instance"))
      inst = ff::instance_from_json((*doc_)["flag"]["instance"]);
    else
      throw ff::ParseError("no instance: pass --instance or put one in the input");
    if (opt_.tol_residual) {
      auto tol = inst->tolerances();
      tol.rel_residual = *opt_.tol_residual;
      try {
        tol.validate();
      } catch (const ff::Error& e) {
        throw ff::ParseError(e.what());
      }
      inst = inst->with_tolerances(tol);
    }
    instance_ = inst;
    return inst;
  }

  ff::Flag flag(const std::string& fallback) {
    const auto inst = instance();
    if (flag_doc_) return flag_in(*flag_doc_, inst);
    if (!opt_.flag.empty()) return ff::parse_flag_shorthand(opt_.flag, inst);
    if (doc_ && doc_->contains("flag")) {
      const auto& f = (*doc_)["flag"];
      if (f.is_string()) return ff::parse_flag_shorthand(f.get<std::string>(), inst);
      return flag_in(f, inst);
    }
    return ff::parse_flag_shorthand(fallback, inst);
  }

  ff::Element element(const std::string& key) {
    if (!doc_) throw ff::ParseError("--input is required");
    if (!doc_->contains(key)) throw ff::ParseError("input has no '" + key + "' field");
    try {
      return ff::element_from_json((*doc_)[key], instance());
    } catch (const ff::ParseError&) {
      throw;
    } catch (const ff::Error& e) {
      throw ff::ParseError("bad '" + key + "': " + e.what());
    }
  }

 private:
  Json load(const std::string& role, const std::string& path) {
    const auto bytes = read_file(path);
    hashes_[role] = {{"path", path}, {"sha256", sha256_hex(bytes)}};
    return parse_json(bytes, path);
  }

  // Parses a flag document against the resolved instance; an embedded
  // descriptor must agree structurally.
  static ff::Flag flag_in(Json f, const ff::InstancePtr& inst) {
    if (f.is_object() && f.contains("instance")) {
      const auto own = ff::instance_from_json(f["instance"])->with_tolerances(inst->tolerances());
      if (!own->same_as(*inst))
        throw ff::ParseError("flag instance " + own->describe() + " does not match " +
                             inst->describe());
      f.erase("instance");
    }
    return ff::flag_from_json(f, inst);
  }

  const Options& opt_;
  std::optional<Json> doc_;
  std::optional<Json> flag_doc_;
  std::optional<Json> instance_doc_;
  Json hashes_ = Json::object();
  ff::InstancePtr instance_;
};

Json conditions_json(const std::vector<double>& c) { return Json(c); }

Json flag_point_json(const ff::FlagPoint& p) {
  Json reps = Json::array();
  for (const auto& q : p.reps()) reps.push_back(ff::element_to_json(q.element()));
  Json out{{"reps", reps}};
  if (p.canonical()) {
    Json canon = Json::array();
    for (const auto& q : *p.canonical()) canon.push_back(ff::element_to_json(q.element()));
    out["canonical"] = canon;
  } else {
    out["canonical"] = nullptr;
  }
  return out;
}

Outcome from_factors(const Json& j) {
  Outcome out;
  out.result = j["factors"];
  out.diagnostics = j["diagnostics"];
  return out;
}

Outcome run_gauss(Inputs& in) {
  const auto g = in.element("element");
  const auto flag = in.flag("trivial");
  return from_factors(ff::factors_to_json(ff::gauss_decompose(g, flag)));
}

Outcome run_nestgram(Inputs& in) {
  const auto s = in.element("element");
  const auto flag = in.flag("trivial");
  return from_factors(ff::factors_to_json(ff::nest_gram_factorize(s, flag)));
}

Outcome run_uab(Inputs& in) {
  const auto s = in.element("element");
  const auto flag = in.flag("trivial");
  return from_factors(ff::factors_to_json(ff::uab_decompose(s, flag)));
}

Outcome run_orbit(Inputs& in) {
  const auto g = in.element("element");
  const auto flag = in.flag("trivial");
  const auto base = ff::FlagPoint::of(flag);
  const auto moved = ff::flag_action(g, base);
  const auto omega = ff::omega_membership(g, flag);
  Outcome out;
  out.result = {{"point", flag_point_json(moved)}};
  out.diagnostics = {{"omega_member", omega.member},
                     {"corner_conditions", conditions_json(omega.corner_conditions)},
                     {"first_failing_corner",
                      omega.first_failing ? Json(*omega.first_failing) : Json(nullptr)}};
  return out;
}

Outcome run_chart(Inputs& in) {
  const auto g = in.element("element");
  const auto flag = in.flag("trivial");
  const auto omega = ff::omega_membership(g, flag);
  if (!omega.member) throw ff::CornerNotInvertible(*omega.first_failing,
                                                   omega.corner_conditions[*omega.first_failing - 1]);
  const auto chart = ff::chart_sigma(g, flag);
  Outcome out;
  out.result = {{"point", ff::element_to_json(chart.point)}};
  out.diagnostics = {{"residual", chart.residual},
                     {"corner_conditions", conditions_json(omega.corner_conditions)}};
  if (in.doc().contains("transition")) {
    const auto h = in.element("transition");
    const auto moved = ff::chart_transition(h, chart);
    out.result["transition"] = ff::element_to_json(moved.point);
    out.diagnostics["transition_residual"] = moved.residual;
  }
  return out;
}

Outcome run_transitivity(Inputs& in) {
  const auto g = in.element("element");
  const auto flag = in.flag("trivial");
  const auto w = ff::unitary_transitivity_witness(g, flag);
  Outcome out;
  out.result = {{"u", ff::element_to_json(w.u)}, {"certified", w.certified}};
  out.diagnostics = {{"unitarity_residual", w.unitarity_residual},
                     {"stabilizer_defect", w.stabilizer_defect}};
  if (!w.certified) {
    out.code = kInvariant;
    out.error = {{"type", "InvariantFailure"}, {"message", "transitivity certificate failed"}};
  }
  return out;
}

Outcome run_counterexample(Inputs& in, const std::string& model) {
  const auto a = in.has_input() ? in.element("element") : ff::default_indefinite_witness();
  const Json inner = ff::instance_to_json(a.instance());
  ff::CounterexampleReport r;
  if (model == "char")
    r = ff::counterexample_char(a.instance_ptr(), a);
  else if (model == "u11")
    r = ff::u11_counterexample(a.instance_ptr(), a);
  else
    throw ff::ParseError("unknown model '" + model + "'");
  Outcome out;
  out.result = {{"model", r.model},
                {"witness_instance", inner},
                {"witness", ff::element_to_json(a)},
                {"witness_spectrum", ff::spectrum_to_json(r.witness_spectrum)},
                {"obstructed", r.obstructed},
                {"failing_corner", r.failing_corner ? Json(*r.failing_corner) : Json(nullptr)}};
  out.diagnostics = {{"one_plus_a_squared", r.one_plus_a_squared}};
  if (model == "char") {
    out.diagnostics["gram_corner_residual"] = r.identity_residual;
  } else {
    out.diagnostics["u11_residual"] = r.identity_residual;
    out.diagnostics["g11_condition"] = r.g11_condition;
    out.result["u11_member"] = r.u11_member;
  }
  if (r.obstructed) {
    out.code = kCorner;
    out.error = {{"type", "CornerNotInvertible"},
                 {"corner", *r.failing_corner},
                 {"message", r.failure}};
  } else {
    out.code = kInvariant;
    out.error = {{"type", "InvariantFailure"}, {"message", "expected obstruction not observed"}};
  }
  return out;
}

Outcome run_propsweep(const Options& opt, std::uint64_t seed) {
  if (opt.trials == 0) throw ff::ParseError("--trials must be at least 1");
  ff::SweepConfig cfg;
  cfg.seed = seed;
  cfg.trials = opt.trials;
  cfg.filter = opt.filter;
  const auto results = ff::run_properties(cfg);
  if (results.empty()) throw ff::ParseError("filter selects no properties");
  Outcome out;
  Json rows = Json::array();
  std::size_t failures = 0;
  for (const auto& r : results) {
    failures += r.failures;
    rows.push_back({{"module", r.module},
                    {"name", r.name},
                    {"threshold", r.threshold},
                    {"trials", r.trials},
                    {"failures", r.failures},
                    {"worst_defect", r.worst_defect},
                    {"first_failure", r.first_failure}});
  }
  out.result = {{"properties", rows}};
  out.diagnostics = {{"property_count", results.size()}, {"total_failures", failures}};
  if (failures > 0) {
    out.code = kInvariant;
    out.error = {{"type", "InvariantFailure"},
                 {"message", std::to_string(failures) + " property trial(s) failed"}};
  }
  return out;
}

Json error_json(const std::string& type, const std::string& message) {
  return {{"type", type}, {"message", message}};
}

// Runs the command and converts library errors into exit codes.
Outcome dispatch(const Options& opt, Inputs& in, std::uint64_t seed) {
  try {
    if (opt.command == "gauss") return run_gauss(in);
    if (opt.command == "nestgram") return run_nestgram(in);
    if (opt.command == "uab") return run_uab(in);
    if (opt.command == "orbit") return run_orbit(in);
    if (opt.command == "chart") return run_chart(in);
    if (opt.command == "transitivity") return run_transitivity(in);
    if (opt.command == "counterexample") return run_counterexample(in, opt.model);
    if (opt.command == "propsweep") return run_propsweep(opt, seed);
    throw ff::ParseError("unknown command");
  } catch (const ff::CornerNotInvertible& e) {
    Outcome out;
    out.code = kCorner;
    out.error = error_json("CornerNotInvertible", e.what());
    out.error["corner"] = e.corner();
    out.error["condition"] = e.condition();
    return out;
  } catch (const ff::NotPositive& e) {
    Outcome out;
    out.code = kNotPositive;
    out.error = error_json("NotPositive", e.what());
    Json pts = Json::array();
    for (const auto& z : e.points()) pts.push_back(ff::complex_to_json(z));
    out.error["points"] = pts;
    return out;
  } catch (const ff::NotInvertible& e) {
    Outcome out;
    out.code = kConfig;
    out.error = error_json("NotInvertible", e.what());
    out.error["sigma_min"] = e.sigma_min();
    if (e.sample()) out.error["sample"] = *e.sample();
    return out;
  } catch (const ff::ParseError& e) {
    Outcome out;
    out.code = kConfig;
    out.error = error_json("ParseError", e.what());
    return out;
  } catch (const ff::Error& e) {
    Outcome out;
    out.code = kConfig;
    out.error = error_json("Error", e.what());
    return out;
  }
}

void flatten_scalars(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_scalars(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_scalars(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_number() || j.is_boolean()) {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Json& body) {
  std::ostringstream os;
  if (body["command"] == "propsweep" && body["result"].contains("properties")) {
    os << "module,name,threshold,trials,failures,worst_defect,first_failure\n";
    for (const auto& r : body["result"]["properties"])
      os << r["module"].get<std::string>() << ',' << r["name"].get<std::string>() << ','
         << r["threshold"].dump() << ',' << r["trials"].dump() << ',' << r["failures"].dump()
         << ',' << r["worst_defect"].dump() << ','
         << csv_quote(r["first_failure"].get<std::string>()) << '\n';
    return os.str();
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten_scalars(body["diagnostics"], "", rows);
  rows.emplace_back("exit_code", body["exit_code"].dump());
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << csv_quote(k) << ',' << v << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flag-relative factorizations over involutive algebras"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gauss", "g = x d y relative to a flag"},
      {"nestgram", "s*s = b* d b relative to a self-adjoint flag"},
      {"uab", "s = u a b relative to a self-adjoint flag"},
      {"orbit", "move the flag point of a flag by g"},
      {"chart", "chart coordinates of g, optionally followed by a transition"},
      {"transitivity", "unitary witness u with u p_j A = g p_j A"},
      {"counterexample", "obstructions in M_2 of a non-hermitian algebra"},
      {"propsweep", "seeded invariant suites of every module"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--instance", opt.instance, "instance file or shorthand (dense:N, indefinite:1,-1, loop:K,M, block:N:<inner>)");
    sub->add_option("--flag", opt.flag, "flag file or shorthand (standard:k1,k2, full, trivial)");
    sub->add_option("--input", opt.input, "input JSON file");
    sub->add_option("--seed", opt.seed, "random seed (falls back to FLAGFACT_SEED, then 42)");
    sub->add_option("--trials", opt.trials, "trials per property")->capture_default_str();
    sub->add_option("--tol-residual", opt.tol_residual, "override rel_residual");
    sub->add_option("--out", opt.out, "write the report here instead of stdout");
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    if (name == "counterexample")
      sub->add_option("--model", opt.model, "char or u11")
          ->check(CLI::IsMember({"char", "u11"}))
          ->capture_default_str();
    if (name == "propsweep")
      sub->add_option("--filter", opt.filter, "only properties whose module/name contains this");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  opt.command = app.get_subcommands().front()->get_name();

  std::uint64_t seed = 42;
  if (opt.seed) {
    seed = *opt.seed;
  } else if (const char* env = std::getenv("FLAGFACT_SEED")) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "flagfact: FLAGFACT_SEED is not an unsigned integer\n";
      return kConfig;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  Json hashes = Json::object();
  Json instance_json = nullptr;
  try {
    Inputs inputs(opt);
    hashes = inputs.hashes();
    outcome = dispatch(opt, inputs, seed);
    if (opt.command != "propsweep" && opt.command != "counterexample") {
      try {
        instance_json = ff::instance_to_json(*inputs.instance());
      } catch (const ff::Error&) {
      }
    }
  } catch (const ff::Error& e) {
    outcome.code = kConfig;
    outcome.error = error_json("ParseError", e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json config = {{"seed", seed},
                 {"format", opt.format},
                 {"instance", instance_json},
                 {"flag", opt.flag.empty() ? Json(nullptr) : Json(opt.flag)}};
  if (opt.command == "propsweep") {
    config["trials"] = opt.trials;
    config["filter"] = opt.filter;
  }
  if (opt.command == "counterexample") config["model"] = opt.model;
  if (opt.tol_residual) config["tol_residual"] = *opt.tol_residual;

  Json body = {{"command", opt.command},
               {"config", config},
               {"inputs", hashes},
               {"result", outcome.result},
               {"diagnostics", outcome.diagnostics},
               {"exit_code", outcome.code},
               {"error", outcome.error}};

  std::string text;
  if (opt.format == "csv") {
    text = render_csv(body);
  } else {
    const std::string canonical = body.dump();
    Json doc = {{"report", body},
                {"report_sha256", sha256_hex(canonical)},
                {"timings", {{"wall_seconds", elapsed}}}};
    text = doc.dump(2) + "\n";
  }

  if (opt.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(opt.out, std::ios::binary);
    if (!os) {
      std::cerr << "flagfact: cannot write '" << opt.out << "'\n";
      return kConfig;
    }
    os << text;
  }
  if (!outcome.error.is_null())
    std::cerr << "flagfact: " << outcome.error.value("message", std::string("error")) << '\n';
  return outcome.code;
}
