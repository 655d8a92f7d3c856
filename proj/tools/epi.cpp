// epi: command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "epistemic/epistemic.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 1;

struct Shared {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
  int verbosity = 0;
};

struct Failure {
  int code;
  std::string message;
};

// Owns a string returned by the library.
struct CString {
  char* p = nullptr;
  ~CString() { epi_string_free(p); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using State = Handle<epi_state, epi_state_free>;
using Mub = Handle<epi_mub, epi_mub_free>;
using Model = Handle<epi_model, epi_model_free>;
using Design = Handle<epi_design, epi_design_free>;

[[noreturn]] void throw_status(epi_status s) {
  throw Failure{kExitFailure, std::string(epi_status_name(s)) + ": " + epi_last_error()};
}

void check(epi_status s) {
  if (s != EPI_OK) throw_status(s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitFailure, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temporary and renames it over the target.
void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{kExitFailure, "cannot write " + tmp.string()};
    out << text;
    out.flush();
    if (!out) throw Failure{kExitFailure, "write failed for " + tmp.string()};
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Failure{kExitFailure, "cannot move output into place at " + path};
  }
}

std::string num(double x) { return json(x).dump(); }

json parse_report(const CString& s) { return json::parse(s.p); }

void stamp(json& j, const std::string& command, const Shared& sh) {
  j["command"] = command;
  j["version"] = epi_version();
  j["seed"] = sh.seed;
}

void emit(const std::string& text, const Shared& sh) {
  if (sh.out.empty())
    std::cout << text;
  else
    write_atomic(sh.out, text);
}

void emit_report(const std::string& report, const Shared& sh) {
  if (sh.verbosity > 0) std::cerr << report;
}

std::string amplitudes_header(const std::string& prefix, std::size_t dim) {
  std::string h;
  for (std::size_t k = 0; k < dim; ++k)
    h += "," + prefix + "_" + std::to_string(k) + "_re," + prefix + "_" + std::to_string(k) + "_im";
  return h;
}

std::string amplitudes_row(const json& state) {
  std::string r;
  for (const auto& z : state.at("amplitudes")) r += "," + num(z[0].get<double>()) + "," + num(z[1].get<double>());
  return r;
}

// One row per triple: labels, f1..f3 as re/im pairs, epsilon, 3 epsilon.
std::string d3_csv(const json& r) {
  std::ostringstream out;
  out << "alpha,beta,i,j" << amplitudes_header("f1", 3) << amplitudes_header("f2", 3)
      << amplitudes_header("f3", 3) << ",epsilon,triple_sum\n";
  for (const auto& e : r.at("entries")) {
    out << e.at("alpha") << ',' << e.at("beta") << ',' << e.at("i") << ',' << e.at("j");
    for (const auto& f : e.at("basis")) out << amplitudes_row(f);
    out << ',' << num(e.at("epsilon").get<double>()) << ',' << num(e.at("triple_sum").get<double>())
        << '\n';
  }
  return out.str();
}

std::string mub_csv(const json& r) {
  const std::size_t dim = r.at("dim").get<std::size_t>();
  std::ostringstream out;
  out << "basis,vector" << amplitudes_header("a", dim) << '\n';
  const auto& bases = r.at("bases");
  for (std::size_t g = 0; g < bases.size(); ++g)
    for (std::size_t k = 0; k < bases[g].size(); ++k)
      out << g << ',' << k << amplitudes_row(bases[g][k]) << '\n';
  return out.str();
}

std::string bound_csv(const json& r) {
  static const char* keys[] = {"dim", "subdim_used", "exact_bound", "coarse_bound_subdim",
                               "coarse_bound_dim", "eps1", "eps2", "noise_adjusted",
                               "noise_adjusted_coarse"};
  std::ostringstream head, row;
  bool first = true;
  for (const char* k : keys) {
    if (!r.contains(k)) continue;
    head << (first ? "" : ",") << k;
    row << (first ? "" : ",") << r.at(k).dump();
    first = false;
  }
  return head.str() + "\n" + row.str() + "\n";
}

std::string simulate_csv(const json& r) {
  std::ostringstream out;
  out << "preparation,measurement,outcome,count,shots,frequency,f4_mass\n";
  for (const auto& s : r.at("frequency_table").at("settings")) {
    const auto shots = s.at("shots").get<std::uint64_t>();
    for (std::size_t k = 0; k < s.at("outcomes").size(); ++k) {
      const auto c = s.at("counts")[k].get<std::uint64_t>();
      out << s.at("preparation").get<std::string>() << ',' << s.at("measurement").get<std::string>()
          << ',' << s.at("outcomes")[k].get<std::string>() << ',' << c << ',' << shots << ','
          << num(static_cast<double>(c) / static_cast<double>(shots)) << ','
          << num(s.at("f4_mass").get<double>()) << '\n';
    }
  }
  return out.str();
}

std::string line(const std::string& label, const std::string& value) {
  std::ostringstream out;
  out << std::left << std::setw(40) << label << value << '\n';
  return out.str();
}

std::string flag(bool b) { return b ? "yes" : "no"; }

void finish(json j, const std::string& command, const Shared& sh, std::string (*csv)(const json&)) {
  stamp(j, command, sh);
  if (sh.format == "csv") {
    if (!csv) throw Failure{kExitUsage, command + " has no csv output"};
    emit(csv(j), sh);
  } else {
    emit(j.dump(2) + "\n", sh);
  }
}

int run_mub(std::size_t dim, const Shared& sh) {
  Mub m;
  check(epi_mub_generate(dim, &m.p));
  CString s;
  check(epi_mub_to_json(m.p, &s.p));
  const json j = parse_report(s);
  finish(j, "mub", sh, mub_csv);
  emit_report(line("dimension", std::to_string(dim)) +
                  line("bases", std::to_string(j.at("bases").size())) +
                  line("max cross deviation", num(j["verification"]["max_cross_deviation"])) +
                  line("mutually unbiased", flag(j["verification"]["ok"].get<bool>())),
              sh);
  return j["verification"]["ok"].get<bool>() ? kExitOk : kExitFailure;
}

std::vector<json> load_states(const std::string& path) {
  const json doc = json::parse(read_file(path));
  const json& list = doc.is_array() ? doc : doc.at("states");
  if (!list.is_array() || list.size() != 3)
    throw Failure{kExitUsage, path + " must hold exactly three states"};
  return {list[0], list[1], list[2]};
}

int run_pp_check(const std::string& states, const std::vector<double>& overlaps,
                 std::size_t restarts, const Shared& sh) {
  if (!overlaps.empty()) {
    int pp = 0;
    check(epi_pp_incompatible(overlaps[0], overlaps[1], overlaps[2], 0.0, &pp));
    json j{{"x1", overlaps[0]}, {"x2", overlaps[1]}, {"x3", overlaps[2]}, {"pp_incompatible", pp == 1}};
    finish(j, "pp-check", sh, nullptr);
    emit_report(line("pp-incompatible", flag(pp == 1)), sh);
    return kExitOk;
  }
  const auto docs = load_states(states);
  State s[3];
  for (int k = 0; k < 3; ++k) check(epi_state_from_json(docs[k].dump().c_str(), &s[k].p));
  CString out;
  const epi_status st = epi_pp_check_json(s[0].p, s[1].p, s[2].p, restarts, sh.seed, sh.threads, &out.p);
  if (st != EPI_OK && st != EPI_NOT_CONVERGED) throw_status(st);
  const json j = parse_report(out);
  finish(j, "pp-check", sh, nullptr);
  emit_report(line("overlaps x1 x2 x3", num(j["x1"]) + " " + num(j["x2"]) + " " + num(j["x3"])) +
                  line("pp-incompatible", flag(j["pp_incompatible"].get<bool>())) +
                  line("epsilon", num(j["epsilon"])) +
                  line("converged", flag(j["converged"].get<bool>())),
              sh);
  if (st != EPI_OK) throw_status(st);
  return kExitOk;
}

int run_bound(std::size_t dim, const std::optional<double>& eps1, const std::optional<double>& eps2,
              bool threshold, const Shared& sh) {
  CString s;
  if (threshold) {
    check(epi_threshold_json(dim, &s.p));
    const json j = parse_report(s);
    finish(j, "bound", sh, nullptr);
    emit_report(line("noise threshold", num(j["threshold"])) +
                    line("tight bound at threshold", num(j["tight_bound_at_threshold"])) +
                    line("coarse bound at threshold", num(j["coarse_bound_at_threshold"])),
                sh);
    return kExitOk;
  }
  if (eps1.has_value() != eps2.has_value())
    throw Failure{kExitUsage, "--eps1 and --eps2 go together"};
  check(epi_bound_json(dim, eps1.has_value(), eps1.value_or(0.0), eps2.value_or(0.0), &s.p));
  const json j = parse_report(s);
  finish(j, "bound", sh, bound_csv);
  std::string rep = line("dimension d", std::to_string(dim)) +
                    line("prime power d'", j["subdim_used"].dump()) +
                    line("exact bound (1/d')(1+sqrt(1-1/d'))", num(j["exact_bound"])) +
                    line("coarse bound 2/d'", num(j["coarse_bound_subdim"])) +
                    line("coarse bound 4/(d-1)", num(j["coarse_bound_dim"]));
  if (j.contains("noise_adjusted"))
    rep += line("noise-adjusted bound", num(j["noise_adjusted"])) +
           line("noise-adjusted coarse bound", num(j["noise_adjusted_coarse"])) +
           line("noise-adjusted bound below 1", flag(j["threshold_ok"].get<bool>()));
  emit_report(rep, sh);
  return kExitOk;
}

int run_d3(std::size_t restarts, const std::string& csv_path, const Shared& sh) {
  CString s;
  const epi_status st = epi_d3_certificate_json(restarts, sh.seed, sh.threads, &s.p);
  if (st != EPI_OK && st != EPI_NOT_CONVERGED) throw_status(st);
  const json j = parse_report(s);
  finish(j, "d3", sh, d3_csv);
  if (!csv_path.empty()) write_atomic(csv_path, d3_csv(j));
  emit_report(line("family sum (1,2)", num(j["family_sums"]["12"])) +
                  line("family sum (1,3)", num(j["family_sums"]["13"])) +
                  line("family sum (2,3)", num(j["family_sums"]["23"])) +
                  line("grand noise sum", num(j["grand_noise_sum"])) +
                  line("overlap weight sum", num(j["overlap_weight_sum"])) +
                  line("k bound", num(j["k_bound"])) +
                  line("all triples converged", flag(j["all_converged"].get<bool>())),
              sh);
  if (st != EPI_OK) throw_status(st);
  return kExitOk;
}

int run_model_verify(const std::string& which, std::size_t pairs, int order, const Shared& sh) {
  Model m;
  if (which == "ks2")
    check(epi_model_ks2(order, &m.p));
  else
    check(epi_model_from_json(read_file(which).c_str(), &m.p));
  CString s;
  check(epi_model_verify_json(m.p, pairs, sh.seed, &s.p));
  const json j = parse_report(s);
  finish(j, "model", sh, nullptr);
  emit_report(line("model", j["model"].get<std::string>()) +
                  line("pairs", j["pairs"].dump()) +
                  line("max Born residual", num(j["max_born_residual"])) +
                  line("max omega_C - omega_Q", num(j["worst_violation"])) +
                  line("max |omega_C - omega_Q|", num(j["max_abs_gap"])),
              sh);
  return kExitOk;
}

int run_simulate(std::size_t dim, const std::string& noise, std::uint64_t shots,
                 std::size_t restarts, const Shared& sh) {
  Design d;
  check(epi_design_build(dim, restarts, sh.seed, sh.threads, &d.p));
  CString s;
  check(epi_design_simulate_json(d.p, noise.c_str(), shots, sh.seed, sh.threads, &s.p));
  const json j = parse_report(s);
  finish(j, "simulate", sh, simulate_csv);
  std::string rep = line("eps1 (triples)", num(j["noise_summary"]["eps1"])) +
                    line("eps2 (pairs)", num(j["noise_summary"]["eps2"]));
  if (!j["threshold"].is_null())
    rep += line("noise threshold", num(j["threshold"]["value"])) +
           line("eps1 below threshold", flag(j["threshold"]["eps1_below"].get<bool>())) +
           line("eps2 below threshold", flag(j["threshold"]["eps2_below"].get<bool>()));
  rep += line("experimental k bound", num(j["k_bound"])) +
         line("noiseless k bound", num(j["noiseless_k_bound"])) +
         line("k bound below 1", flag(j["k_below_one"].get<bool>())) +
         line("max f4 mass", num(j["max_f4_mass"]));
  emit_report(rep, sh);
  return kExitOk;
}

int run_bonferroni(std::size_t instances, std::size_t response_instances, std::size_t points,
                   const Shared& sh) {
  CString s;
  check(epi_inequality_suite_json(instances, response_instances, points, sh.seed, sh.threads, &s.p));
  const json j = parse_report(s);
  finish(j, "bonferroni", sh, nullptr);
  emit_report(line("bonferroni min slack", num(j["bonferroni"]["min_slack"])) +
                  line("response bound min slack", num(j["response_min_bound"]["min_slack"])),
              sh);
  const bool holds = j["bonferroni"]["holds"].get<bool>() && j["response_min_bound"]["holds"].get<bool>();
  return holds ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlap bounds for psi-epistemic models: MUBs, triple criteria, d = 3 "
               "certificate, model checks and simulated experiments."};
  app.set_version_flag("--version", std::string(epi_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Shared sh;
  app.add_option("--seed", sh.seed, "Master seed (default 1, stamped into the output)");
  app.add_option("--out", sh.out, "Output file (written atomically); stdout if absent");
  app.add_option("--format", sh.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", sh.threads, "Worker threads (0 = all cores); results do not depend on it");
  app.add_flag("-v,--verbose", sh.verbosity, "Print a text summary to stderr");

  std::size_t dim = 0;
  auto* mub = app.add_subcommand("mub", "Complete set of mutually unbiased bases");
  mub->add_option("--dim", dim, "Dimension")->required();

  std::string states;
  std::vector<double> overlaps;
  std::size_t restarts = 64;
  auto* pp = app.add_subcommand("pp-check", "Triple criterion and conjugate basis");
  auto* pp_states = pp->add_option("--states", states, "JSON file with three states");
  auto* pp_over = pp->add_option("--overlaps", overlaps, "x1 x2 x3, criterion only")->expected(3);
  pp_states->excludes(pp_over);
  pp->add_option("--restarts", restarts, "Random restarts");

  std::optional<double> eps1, eps2;
  bool threshold = false;
  auto* bound = app.add_subcommand("bound", "Closed-form bounds on k");
  bound->add_option("--dim", dim, "Dimension")->required();
  bound->add_option("--eps1", eps1, "Average triple noise");
  bound->add_option("--eps2", eps2, "Average pair noise");
  bound->add_flag("--threshold", threshold, "Report the noise threshold instead");

  std::string csv;
  auto* d3 = app.add_subcommand("d3", "The d = 3 certificate");
  d3->add_option("--restarts", restarts, "Random restarts per triple");
  d3->add_option("--csv", csv, "Also write the triple table as CSV");

  auto* model = app.add_subcommand("model", "Ontological model checks");
  model->require_subcommand(1);
  std::string which = "ks2";
  std::size_t pairs = 50;
  int order = 24;
  auto* verify = model->add_subcommand("verify", "Born rule and overlap checks");
  verify->add_option("--model", which, "ks2 or a discrete model JSON file");
  verify->add_option("--pairs", pairs, "State pairs (0 = all, discrete models only)");
  verify->add_option("--order", order, "Sphere quadrature order");

  std::string noise = "none";
  std::uint64_t shots = 1000;
  std::size_t design_restarts = 32;
  auto* simulate = app.add_subcommand("simulate", "Simulated noisy experiment");
  simulate->add_option("--dim", dim, "Dimension (3 or a MUB dimension >= 4)")->required();
  simulate->add_option("--noise", noise, "none, depolarizing:p or misalignment:sigma");
  simulate->add_option("--shots", shots, "Shots per setting");
  simulate->add_option("--restarts", design_restarts, "Restarts per conjugate basis");

  std::size_t instances = 1000, response_instances = 200, points = 50;
  auto* bonf = app.add_subcommand("bonferroni", "Random instances of the overlap inequalities");
  bonf->add_option("--instances", instances, "Instances of the Bonferroni inequality");
  bonf->add_option("--response-instances", response_instances, "Instances of the response bound");
  bonf->add_option("--points", points, "Ontic points per instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mub) return run_mub(dim, sh);
    if (*pp) {
      if (states.empty() && overlaps.empty())
        throw Failure{kExitUsage, "pp-check needs --states or --overlaps"};
      return run_pp_check(states, overlaps, restarts, sh);
    }
    if (*bound) return run_bound(dim, eps1, eps2, threshold, sh);
    if (*d3) return run_d3(restarts, csv, sh);
    if (*verify) return run_model_verify(which, pairs, order, sh);
    if (*simulate) return run_simulate(dim, noise, shots, design_restarts, sh);
    if (*bonf) return run_bonferroni(instances, response_instances, points, sh);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kExitUsage) std::cerr << app.help();
    return f.code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
