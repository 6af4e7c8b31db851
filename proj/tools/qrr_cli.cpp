// qrr: verify catalog identities, expand DSL expressions, replay proofs.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "qrr/catalog.hpp"
#include "qrr/oracles.hpp"
#include "qrr/prooftrace.hpp"
#include "qrr/qdsl.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int order = -1;
  std::string format = "text";
  std::string out;
  std::vector<std::string> samples;
  bool verbose = false;
};

int resolve_order(int given) {
  if (given >= 0) return given;
  if (const char* env = std::getenv("QRR_DEFAULT_ORDER")) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used != std::string(env).size() || n < 0) throw std::invalid_argument(env);
      return n;
    } catch (const std::exception&) {
      throw UsageError(std::string("QRR_DEFAULT_ORDER must be a nonnegative integer, got '") + env + "'");
    }
  }
  return 60;
}

qrr::Sample parse_samples(const std::vector<std::string>& specs) {
  qrr::Sample out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--sample expects NAME=MONOMIAL, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    try {
      out[name] = qrr::dsl::monomial_value(*qrr::dsl::parse(spec.substr(eq + 1)));
    } catch (const qrr::Error& e) {
      throw UsageError("--sample " + name + ": " + e.what());
    }
  }
  return out;
}

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.format == "json") std::cout << j.dump(2) << "\n";
  else std::cout << text;
  if (!c.out.empty()) {
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot write " + c.out);
    f << j.dump(2) << "\n";
  }
}

std::string rat(const qrr::Rational& r) { return r.get_str(); }

// --- list ---------------------------------------------------------------------

int cmd_list(const Common& c) {
  json arr = json::array();
  std::ostringstream text;
  for (const auto& id : qrr::catalog()) {
    json samples = json::array();
    for (const auto& s : id.samples) samples.push_back(qrr::sample_str(s));
    arr.push_back({{"id", id.id},
                   {"citation", id.citation},
                   {"notes", id.notes},
                   {"params", id.params},
                   {"samples", samples},
                   {"default_order", id.default_order}});
    text << id.id << std::string(id.id.size() < 6 ? 6 - id.id.size() : 1, ' ') << id.citation;
    if (id.parametric()) {
      text << "  [params:";
      for (const auto& p : id.params) text << " " << p;
      text << "; " << id.samples.size() << " default samples]";
    }
    text << "\n";
  }
  emit(c, arr, text.str());
  return kOk;
}

// --- verify -------------------------------------------------------------------

json report_json(const qrr::VerifyReport& r) {
  json j{{"id", r.id},
         {"order", r.order},
         {"pass", r.pass},
         {"samples_checked", r.samples_checked},
         {"integrality", r.integrality},
         {"elapsed_ms", r.elapsed_ms},
         {"error", r.error.empty() ? json(nullptr) : json(r.error)},
         {"first_mismatch", nullptr}};
  if (r.first_mismatch) {
    const auto& m = *r.first_mismatch;
    j["first_mismatch"] = {{"q_exp", m.q_exp}, {"lhs", rat(m.lhs)}, {"rhs", rat(m.rhs)}, {"sample", m.sample}};
  }
  return j;
}

std::string report_text(const qrr::VerifyReport& r, bool verbose) {
  std::ostringstream o;
  o << (r.pass ? "PASS " : "FAIL ") << r.id << "  order " << r.order << ", " << r.samples_checked
    << (r.samples_checked == 1 ? " sample" : " samples");
  if (!r.integrality) o << ", non-integral coefficients";
  if (verbose) o << ", " << static_cast<long>(r.elapsed_ms) << " ms";
  if (r.first_mismatch) {
    const auto& m = *r.first_mismatch;
    o << "\n     first mismatch at q^" << m.q_exp << ": lhs " << rat(m.lhs) << ", rhs " << rat(m.rhs);
    if (!m.sample.empty()) o << " [" << m.sample << "]";
  }
  if (!r.error.empty()) o << "\n     error: " << r.error;
  o << "\n";
  return o.str();
}

// A user identity file checked like a catalog entry.
qrr::Identity identity_from_file(const std::string& path) {
  const qrr::dsl::IdentityText t = qrr::dsl::parse_identity(qrr::dsl::read_text(path));
  qrr::Identity id;
  id.id = std::filesystem::path(path).stem().string();
  id.citation = path;
  id.params.assign(t.params.begin(), t.params.end());
  id.lhs = [e = t.lhs](int n, const qrr::Sample& s) { return qrr::dsl::eval(e, n, s); };
  id.rhs = [e = t.rhs](int n, const qrr::Sample& s) { return qrr::dsl::eval(e, n, s); };
  return id;
}

int cmd_verify(const Common& c, std::vector<std::string> ids, bool all, const std::string& file, int jobs) {
  const int order = resolve_order(c.order);
  const qrr::Sample sample = parse_samples(c.samples);
  std::vector<qrr::Identity> todo;
  if (!file.empty()) {
    if (all || !ids.empty()) throw UsageError("give either --file or identity ids");
    todo.push_back(identity_from_file(file));
  } else if (all) {
    if (!ids.empty()) throw UsageError("--all takes no identity ids");
    todo = qrr::catalog();
  } else {
    if (ids.empty()) throw UsageError("name an identity, or pass --all or --file");
    for (const auto& i : ids) todo.push_back(qrr::find_identity(i));
  }
  if (!sample.empty()) {
    for (const auto& id : todo)
      for (const auto& [name, v] : sample)
        if (std::find(id.params.begin(), id.params.end(), name) == id.params.end())
          throw UsageError(id.id + " has no parameter " + name);
  }
  for (const auto& id : todo)
    if (id.parametric() && id.samples.empty() && sample.empty())
      throw UsageError(id.id + " has parameters; pass --sample NAME=MONOMIAL");

  // Workers pull indices; results land in their slot so output order is fixed.
  std::vector<qrr::VerifyReport> reports(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < todo.size();) {
      std::vector<qrr::Sample> use;
      if (!sample.empty()) use.push_back(sample);
      reports[i] = qrr::verify(todo[i], order, use);
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  bool pass = true;
  json arr = json::array();
  std::string text;
  for (const auto& r : reports) {
    pass = pass && r.pass;
    arr.push_back(report_json(r));
    text += report_text(r, c.verbose);
  }
  const long passed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  text += std::to_string(passed) + "/" + std::to_string(reports.size()) + " passed at order " + std::to_string(order) + "\n";
  emit(c, json{{"order", order}, {"pass", pass}, {"reports", arr}}, text);
  return pass ? kOk : kFail;
}

// --- expand -------------------------------------------------------------------

int cmd_expand(const Common& c, const std::string& expr, const std::string& file) {
  if (expr.empty() == file.empty()) throw UsageError("expand needs exactly one of --expr or --file");
  const int order = resolve_order(c.order);
  const qrr::Sample sample = parse_samples(c.samples);
  const std::string src = file.empty() ? expr : qrr::dsl::read_text(file);
  std::set<std::string> params = qrr::dsl::declared_params(src);
  for (const auto& [name, v] : sample) params.insert(name);
  const qrr::dsl::ExprPtr e = qrr::dsl::parse(src, params);
  for (const auto& p : params)
    if (!sample.count(p)) throw UsageError("parameter " + p + " needs --sample " + p + "=MONOMIAL");
  const qrr::QLaurent s = qrr::dsl::eval(e, order, sample);
  const int lo = std::min(0, s.min_exp());
  json coeffs = json::array();
  std::string line;
  for (int k = lo; k <= order; ++k) {
    const qrr::Rational v = s.coeff(k);
    coeffs.push_back({k, v.get_num().get_str(), v.get_den().get_str()});
    line += (k == lo ? "" : ", ") + rat(v);
  }
  std::string text = lo < 0 ? "# from q^" + std::to_string(lo) + "\n" : "";
  text += line + "\n";
  emit(c, json{{"expression", qrr::dsl::format(e)}, {"order", order}, {"coefficients", coeffs}}, text);
  return kOk;
}

// --- proof --------------------------------------------------------------------

json trace_json(const qrr::ProofTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json j{{"index", s.index},
           {"description", s.description},
           {"justification", s.justification},
           {"pass", s.pass},
           {"window_stable", s.window_stable ? json(*s.window_stable) : json(nullptr)},
           {"mismatch", nullptr}};
    if (s.mismatch) j["mismatch"] = {{"q_exp", s.mismatch->q_exp}, {"lhs", rat(s.mismatch->lhs)}, {"rhs", rat(s.mismatch->rhs)}};
    if (s.zmismatch)
      j["mismatch"] = {{"z_exp", s.zmismatch->z_exp},
                       {"q_exp", s.zmismatch->q_exp},
                       {"lhs", rat(s.zmismatch->lhs)},
                       {"rhs", rat(s.zmismatch->rhs)}};
    if (s.zvalue) j["z_window"] = {s.zvalue->window().lo, s.zvalue->window().hi};
    steps.push_back(j);
  }
  json findings = json::array();
  for (const auto& f : t.findings)
    findings.push_back({{"description", f.description}, {"gating", f.gating}, {"holds", f.holds}, {"detail", f.detail}});
  return {{"theorem", t.theorem},
          {"order", t.order},
          {"pass", t.pass},
          {"error", t.error.empty() ? json(nullptr) : json(t.error)},
          {"steps", steps},
          {"findings", findings}};
}

int cmd_proof(const Common& c, int theorem) {
  if (theorem < 1 || theorem > 5) throw UsageError("theorem must be 1..5, got " + std::to_string(theorem));
  const qrr::ProofTrace t = qrr::run_trace(theorem, resolve_order(c.order));
  emit(c, trace_json(t), qrr::format_trace(t));
  return t.pass ? kOk : kFail;
}

// --- oracle -------------------------------------------------------------------

int cmd_oracle(const Common& c, int modulus, const std::vector<int>& residues, bool distinct) {
  const int order = resolve_order(c.order);
  qrr::oracles::PartitionClass pc = qrr::oracles::PartitionClass::residues(modulus, {residues.begin(), residues.end()});
  pc.distinct = distinct;
  pc.validate();
  const auto counts = qrr::oracles::count_partitions(pc, order);
  std::string line;
  for (std::size_t k = 0; k < counts.size(); ++k) line += (k ? ", " : "") + std::to_string(counts[k]);
  emit(c, json{{"modulus", modulus}, {"residues", residues}, {"distinct", distinct}, {"order", order}, {"counts", counts}},
       line + "\n");
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool samples) {
  sub->add_option("-n,--order", c.order, "truncation order N (default 60, or $QRR_DEFAULT_ORDER)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", c.out, "also write the JSON report to PATH");
  sub->add_flag("-v,--verbose", c.verbose, "include timings");
  if (samples) sub->add_option("--sample", c.samples, "parameter value NAME=MONOMIAL (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrr: exact q-series identities, expansions and constant-term proof replay"};
  app.require_subcommand(1);
  Common c;

  auto* list = app.add_subcommand("list", "list the identity catalog");
  add_common(list, c, false);

  std::vector<std::string> ids;
  bool all = false;
  std::string file, expr;
  int jobs = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  auto* verify = app.add_subcommand("verify", "check identities to order N");
  verify->add_option("ids", ids, "catalog ids");
  verify->add_flag("--all", all, "every catalog identity");
  verify->add_option("-f,--file", file, "identity file: two expressions separated by a '=' line");
  verify->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  add_common(verify, c, true);

  auto* expand = app.add_subcommand("expand", "expand a DSL expression");
  expand->add_option("-e,--expr", expr, "expression text");
  expand->add_option("-f,--file", file, "expression file");
  add_common(expand, c, true);

  int theorem = 0;
  auto* proof = app.add_subcommand("proof", "replay the constant-term proof of Theorem k");
  proof->add_option("theorem", theorem, "1..5")->required();
  add_common(proof, c, false);

  int modulus = 1;
  std::vector<int> residues{0};
  bool distinct = false;
  auto* oracle = app.add_subcommand("oracle", "count restricted partitions directly");
  oracle->add_option("--modulus", modulus, "parts are taken mod this");
  oracle->add_option("--residues", residues, "allowed residues")->delimiter(',');
  oracle->add_flag("--distinct", distinct, "distinct parts only");
  add_common(oracle, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmd_list(c);
    if (*verify) return cmd_verify(c, ids, all, file, jobs);
    if (*expand) return cmd_expand(c, expr, file);
    if (*proof) return cmd_proof(c, theorem);
    if (*oracle) return cmd_oracle(c, modulus, residues, distinct);
  } catch (const UsageError& e) {
    std::cerr << "qrr: " << e.what() << "\n";
    return kUsage;
  } catch (const qrr::UnknownIdentity& e) {
    std::cerr << "qrr: " << e.what() << "\n";
    return kUsage;
  } catch (const qrr::dsl::ParseError& e) {
    std::cerr << "qrr: parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const qrr::Error& e) {
    std::cerr << "qrr: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
