// Command-line front end: verification scenarios in, reports out, plus
// direct computation of spectral flow / Maslov index / reduction defect
// for explicit instances.  The only module with I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "sfm/errors.hpp"
#include "sfm/suites.hpp"

using nlohmann::json;
using namespace sfm;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;

struct CliParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CliParseError(path + ": " + e.what());
  }
  return j;
}

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw CliParseError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw CliParseError(where + ": unknown field '" + key + "'");
  }
}

void check_schema_version(const json& j, const std::string& where) {
  if (!j.contains("schema_version") || !j["schema_version"].is_string() ||
      j["schema_version"].get<std::string>() != "1")
    throw CliParseError(where + ": schema_version missing or unsupported");
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw CliParseError(where + ": expected a non-empty array of rows");
  const int rows = int(j.size());
  if (!j[0].is_array()) throw CliParseError(where + ": rows must be arrays");
  const int cols = int(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || int(j[i].size()) != cols)
      throw CliParseError(where + ": ragged rows");
    for (int c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw CliParseError(where + ": non-numeric entry");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

std::vector<double> parse_mesh(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() < 2) throw CliParseError(where + ": mesh needs at least two values");
  std::vector<double> mesh;
  for (const auto& v : j) {
    if (!v.is_number()) throw CliParseError(where + ": non-numeric mesh value");
    mesh.push_back(v.get<double>());
  }
  return mesh;
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> dims;
  std::optional<double> rank_tol;
  std::optional<double> angle_tol;
  std::optional<int> refine_limit;
  std::string out;
  int jobs = 1;
  bool timing = false;
  bool emit_tracks = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "master seed (overrides the file)");
  cmd->add_option("--trials", f.trials, "trial count (overrides the file)");
  cmd->add_option("--dims", f.dims, "dimension cap (overrides the file)");
  cmd->add_option("--rank-tol", f.rank_tol, "rank/index threshold");
  cmd->add_option("--angle-tol", f.angle_tol, "subspace-equality threshold (radians)");
  cmd->add_option("--refine-limit", f.refine_limit, "max mesh refinements");
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_option("--jobs", f.jobs, "worker threads (report is identical for any value)");
  cmd->add_flag("--timing", f.timing, "include wall time in the report");
}

std::string suite_for_kind(const std::string& kind) {
  if (kind == "eq1") return "index_restriction";
  if (kind == "sf") return "flow_crossval";
  if (kind == "thm1") return "flow_restriction";
  if (kind == "maslov") return "maslov_partition";
  if (kind == "thm2") return "maslov_reduction";
  if (kind == "identities") return "chart_identities";
  throw CliParseError("unknown kind '" + kind + "'");
}

struct LagInstance;
LagInstance parse_lag_instance(const json&, const std::string&, bool,
                               const TolerancePolicy&, bool);
FormPath parse_form_path(const json&, const std::string&, bool);

// One inline instance from a scenario file, checked like a generated trial.
TrialRecord explicit_record(const std::string& kind, const json& inst,
                            const std::string& where, const TolerancePolicy& policy);

void append_explicit(const std::string& kind, const json& arr, const std::string& where,
                     const TolerancePolicy& policy, SuiteReport& report) {
  if (!arr.is_array()) throw CliParseError(where + ": expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    TrialRecord rec;
    try {
      rec = explicit_record(kind, arr[i], where + "[" + std::to_string(i) + "]", policy);
    } catch (const CliParseError&) {
      throw;
    } catch (const ParseError&) {
      throw;
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      rec.ok = false;
      rec.note = std::string("error: ") + e.what();
      ++report.errors;
    }
    rec.trial = std::uint64_t(report.trials);
    ++report.trials;
    if (!rec.ok && rec.note.rfind("error: ", 0) != 0) ++report.failures;
    report.records.push_back(std::move(rec));
  }
}

int run_scenario(const std::string& path, const CommonFlags& flags) {
  json j = load_json(path);
  expect_keys(j, path, {"schema_version", "kind", "parameters", "explicit_instances"});
  check_schema_version(j, path);
  if (!j.contains("kind") || !j["kind"].is_string())
    throw CliParseError(path + ": missing kind");
  const std::string kind = j["kind"].get<std::string>();
  const std::string suite = suite_for_kind(kind);

  SuiteConfig config;
  if (j.contains("parameters")) {
    const json& p = j["parameters"];
    expect_keys(p, path + ".parameters", {"seed", "trials", "max_dim", "policy"});
    if (p.contains("seed")) config.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("trials")) config.trials = p["trials"].get<int>();
    if (p.contains("max_dim")) config.max_dim = p["max_dim"].get<int>();
    if (p.contains("policy")) {
      const json& pol = p["policy"];
      expect_keys(pol, path + ".parameters.policy",
                  {"rank_tol", "angle_tol", "refine_limit"});
      if (pol.contains("rank_tol")) config.policy.rank_tol = pol["rank_tol"].get<double>();
      if (pol.contains("angle_tol")) config.policy.angle_tol = pol["angle_tol"].get<double>();
      if (pol.contains("refine_limit"))
        config.policy.refine_limit = pol["refine_limit"].get<int>();
    }
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.dims) config.max_dim = *flags.dims;
  if (flags.rank_tol) config.policy.rank_tol = *flags.rank_tol;
  if (flags.angle_tol) config.policy.angle_tol = *flags.angle_tol;
  if (flags.refine_limit) config.policy.refine_limit = *flags.refine_limit;
  config.jobs = flags.jobs;
  if (config.trials <= 0) throw CliParseError("trials must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport report = run_named_suite(suite, config);
  if (j.contains("explicit_instances"))
    append_explicit(kind, j["explicit_instances"], path + ".explicit_instances",
                    config.policy, report);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = report_json(report, flags.timing, seconds).dump(2) + "\n";
  if (!flags.out.empty()) {
    std::ofstream out(flags.out);
    if (!out) throw CliParseError("cannot write " + flags.out);
    out << text;
  } else {
    std::cout << text;
  }
  if (report.errors > 0) return kExitNumeric;
  return report.failures == 0 ? kExitPass : kExitFail;
}

FormPath parse_form_path(const json& j, const std::string& where, bool top = true) {
  if (top) {
    expect_keys(j, where, {"schema_version", "kind", "mesh", "samples"});
    check_schema_version(j, where);
    if (!j.contains("kind") || j["kind"].get<std::string>() != "form_path")
      throw CliParseError(where + ": kind must be 'form_path'");
  }
  if (!j.contains("mesh") || !j.contains("samples"))
    throw CliParseError(where + ": needs mesh and samples");
  std::vector<double> mesh = parse_mesh(j["mesh"], where);
  if (!j["samples"].is_array() || j["samples"].size() != mesh.size())
    throw CliParseError(where + ": samples must match the mesh");
  std::vector<SymMatrix> samples;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    Matrix m = parse_matrix(j["samples"][i], where + ".samples");
    try {
      samples.emplace_back(m);
    } catch (const Error& e) {
      throw CliParseError(where + ": " + e.what());
    }
  }
  return FormPath(std::move(mesh), std::move(samples));
}

struct LagInstance {
  SymplecticSpace space;
  Lagrangian l0;
  LagrangianPath path;
  std::optional<Subspace> w;  // only for reduce
};

LagInstance parse_lag_instance(const json& j, const std::string& where, bool with_w,
                               const TolerancePolicy& policy, bool top = true) {
  if (top) {
    expect_keys(j, where, {"schema_version", "kind", "n", "l0", "mesh", "frames", "w"});
    check_schema_version(j, where);
    const std::string want = with_w ? "reduction" : "lagrangian_path";
    if (!j.contains("kind") || j["kind"].get<std::string>() != want)
      throw CliParseError(where + ": kind must be '" + want + "'");
  } else {
    expect_keys(j, where, {"n", "l0", "mesh", "frames", "w"});
  }
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw CliParseError(where + ": needs the half-dimension n");
  const int n = j["n"].get<int>();
  if (n < 1 || n > 64) throw CliParseError(where + ": n out of range");
  SymplecticSpace space = standard_space(n);

  auto subspace_of = [&](const json& frame, const std::string& what) {
    Matrix m = parse_matrix(frame, what);
    if (m.rows() != 2 * n) throw CliParseError(what + ": frame rows must equal 2n");
    Subspace s = column_space(m, policy);
    if (s.dim() != m.cols()) throw CliParseError(what + ": frame columns are dependent");
    return s;
  };
  if (!j.contains("l0")) throw CliParseError(where + ": needs l0");
  Lagrangian l0 = make_lagrangian(space, subspace_of(j["l0"], where + ".l0"), policy);

  if (!j.contains("mesh") || !j.contains("frames"))
    throw CliParseError(where + ": needs mesh and frames");
  std::vector<double> mesh = parse_mesh(j["mesh"], where);
  if (!j["frames"].is_array() || j["frames"].size() != mesh.size())
    throw CliParseError(where + ": frames must match the mesh");
  std::vector<Subspace> frames;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    frames.push_back(subspace_of(j["frames"][i], where + ".frames"));
  LagrangianPath path = make_lagrangian_path(space, std::move(mesh), std::move(frames), policy);

  LagInstance inst{space, l0, std::move(path), std::nullopt};
  if (with_w) {
    if (!j.contains("w")) throw CliParseError(where + ": needs the coisotropic subspace w");
    inst.w = subspace_of(j["w"], where + ".w");
  } else if (j.contains("w")) {
    throw CliParseError(where + ": unknown field 'w'");
  }
  return inst;
}

TrialRecord explicit_record(const std::string& kind, const json& inst,
                            const std::string& where, const TolerancePolicy& policy) {
  TrialRecord rec;
  rec.note = "explicit";
  if (kind == "eq1") {
    expect_keys(inst, where, {"q", "w"});
    if (!inst.contains("q") || !inst.contains("w"))
      throw CliParseError(where + ": needs q and w");
    BilinForm q = BilinForm::on_full(parse_matrix(inst["q"], where + ".q"),
                                     Symmetry::symmetric);
    Subspace w = column_space(parse_matrix(inst["w"], where + ".w"), policy);
    if (w.ambient_dim() != q.dim())
      throw CliParseError(where + ": w does not live in q's space");
    auto [lhs, rhs] = eq1_sides(q, w, policy);
    rec.lhs = lhs;
    rec.rhs = rhs;
  } else if (kind == "sf") {
    expect_keys(inst, where, {"mesh", "samples"});
    FormPath p = parse_form_path(inst, where, false);
    rec.lhs = spectral_flow(p, policy).flow;
    const long long ind_a = index_nullity(BilinForm::on_full(p.samples().front().mat(),
                                                             Symmetry::symmetric),
                                          policy)
                                .index;
    const long long ind_b = index_nullity(BilinForm::on_full(p.samples().back().mat(),
                                                             Symmetry::symmetric),
                                          policy)
                                .index;
    rec.rhs = ind_a - ind_b;
  } else if (kind == "thm1") {
    expect_keys(inst, where, {"mesh", "samples", "v"});
    FormPath p = parse_form_path(inst, where, false);
    if (!inst.contains("v")) throw CliParseError(where + ": needs v");
    Subspace v = column_space(parse_matrix(inst["v"], where + ".v"), policy);
    auto [lhs, rhs] = theorem1_sides(p, v, policy);
    rec.lhs = lhs;
    rec.rhs = rhs;
  } else if (kind == "maslov") {
    LagInstance li = parse_lag_instance(inst, where, false, policy, false);
    rec.lhs = maslov_index(li.path, li.l0, policy);
    rec.rhs = maslov_oracle(li.path, li.l0, policy);
  } else if (kind == "thm2") {
    LagInstance li = parse_lag_instance(inst, where, true, policy, false);
    ReductionSetup setup = make_reduction(li.space, *li.w, policy);
    auto [lhs, rhs] = theorem2_sides(setup, li.path, li.l0, policy);
    rec.lhs = lhs;
    rec.rhs = rhs;
  } else if (kind == "identities") {
    LagInstance li = parse_lag_instance(inst, where, true, policy, false);
    ReductionSetup setup = make_reduction(li.space, *li.w, policy);
    std::optional<Subspace> must;
    if (setup.codim() > 0) must = setup.w_perp;
    Lagrangian l1 = lagrangian_complement(li.l0, must, policy);
    ChartSegment seg = make_chart_segment(li.path, li.l0, l1, policy);
    IdentityReport idr = section_4_3_identities(setup, li.path, li.l0, seg, policy);
    rec.lhs = int(idr.kernel_identity) + int(idr.perp_identity) + int(idr.form_identity);
    rec.rhs = 3;
  } else {
    throw CliParseError(where + ": kind does not take explicit instances");
  }
  rec.ok = rec.lhs == rec.rhs;
  return rec;
}

void emit_form_tracks(const FormPath& p) {
  const int per_segment = 24;
  for (int i = 0; i + 1 < int(p.mesh().size()); ++i) {
    for (int s = 0; s < per_segment; ++s) {
      const double t = p.mesh()[i] +
                       (p.mesh()[i + 1] - p.mesh()[i]) * double(s) / per_segment;
      auto e = eigh(SymMatrix(p.at(t)));
      std::cout << t;
      for (double v : e.values) std::cout << " " << v;
      std::cout << "\n";
    }
  }
  auto e = eigh(p.samples().back());
  std::cout << p.b();
  for (double v : e.values) std::cout << " " << v;
  std::cout << "\n";
}

void emit_angle_tracks(const LagrangianPath& path, const Lagrangian& l0) {
  // principal angles to L0: a zero track marks an intersection with L0
  for (std::size_t i = 0; i < path.mesh.size(); ++i) {
    std::cout << path.mesh[i];
    for (double a : principal_angles(path.frames[i], l0.sub)) std::cout << " " << a;
    std::cout << "\n";
  }
}

int run_compute(const std::string& what, const std::string& path, const CommonFlags& flags) {
  TolerancePolicy policy;
  if (flags.rank_tol) policy.rank_tol = *flags.rank_tol;
  if (flags.angle_tol) policy.angle_tol = *flags.angle_tol;
  if (flags.refine_limit) policy.refine_limit = *flags.refine_limit;
  json j = load_json(path);

  if (what == "sf") {
    FormPath p = parse_form_path(j, path);
    SfCertificate cert = spectral_flow(p, policy);
    std::cout << cert.flow << "\n";
    if (flags.emit_tracks) emit_form_tracks(p);
    return kExitPass;
  }
  if (what == "maslov") {
    LagInstance inst = parse_lag_instance(j, path, false, policy);
    std::cout << maslov_index(inst.path, inst.l0, policy) << "\n";
    if (flags.emit_tracks) emit_angle_tracks(inst.path, inst.l0);
    return kExitPass;
  }
  if (what == "reduce") {
    LagInstance inst = parse_lag_instance(j, path, true, policy);
    ReductionSetup setup = make_reduction(inst.space, *inst.w, policy);
    auto [lhs, rhs] = theorem2_sides(setup, inst.path, inst.l0, policy);
    const long long mu = maslov_index(inst.path, inst.l0, policy);
    const long long mu_red = mu - lhs;
    std::cout << "mu " << mu << "\n";
    std::cout << "mu_reduced " << mu_red << "\n";
    std::cout << "defect " << (lhs - rhs) << "\n";
    if (flags.emit_tracks) emit_angle_tracks(inst.path, inst.l0);
    return lhs == rhs ? kExitPass : kExitFail;
  }
  throw CliParseError("unknown compute subcommand '" + what + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral flow, Maslov index and symplectic reduction toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string scenario_path;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a verification scenario file");
  run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  add_common_flags(run_cmd, run_flags);

  CLI::App* compute_cmd = app.add_subcommand("compute", "evaluate one explicit instance");
  compute_cmd->require_subcommand(1);
  struct ComputeSub {
    CLI::App* cmd;
    std::string name;
    std::string instance;
    CommonFlags flags;
  };
  std::vector<ComputeSub> subs(3);
  const char* names[] = {"sf", "maslov", "reduce"};
  const char* descs[] = {"certified spectral flow of a path of symmetric forms",
                         "Maslov index of a Lagrangian path",
                         "Maslov reduction defect of a Lagrangian path"};
  for (int i = 0; i < 3; ++i) {
    subs[i].name = names[i];
    subs[i].cmd = compute_cmd->add_subcommand(names[i], descs[i]);
    subs[i].cmd->add_option("instance", subs[i].instance, "instance JSON file")->required();
    subs[i].cmd->add_option("--rank-tol", subs[i].flags.rank_tol, "rank/index threshold");
    subs[i].cmd->add_option("--angle-tol", subs[i].flags.angle_tol, "subspace threshold");
    subs[i].cmd->add_option("--refine-limit", subs[i].flags.refine_limit, "max refinements");
    subs[i].cmd->add_flag("--emit-tracks", subs[i].flags.emit_tracks,
                          "print columnar track data after the result");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_scenario(scenario_path, run_flags);
    for (auto& s : subs)
      if (s.cmd->parsed()) return run_compute(s.name, s.instance, s.flags);
    return kExitParse;
  } catch (const CliParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
