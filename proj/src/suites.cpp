#include "sfm/suites.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "sfm/errors.hpp"
#include "sfm/kernels.hpp"

namespace sfm {

namespace {

// Retry a trial whose generator or oracle declared itself inconclusive;
// hard numeric failures are reported, not retried.
TrialRecord guarded(std::uint64_t index, const SuiteConfig& config, const TrialFn& fn) {
  for (int attempt = 0;; ++attempt) {
    Seed seed{config.seed, index + std::uint64_t(attempt) * 0x100000000ULL};
    try {
      TrialRecord rec = fn(seed, config);
      rec.trial = index;
      return rec;
    } catch (const OracleInconclusive& e) {
      if (attempt >= 3) return TrialRecord{index, 0, 0, false, std::string("error: ") + e.what()};
    } catch (const SearchError& e) {
      if (attempt >= 3) return TrialRecord{index, 0, 0, false, std::string("error: ") + e.what()};
    } catch (const Error& e) {
      return TrialRecord{index, 0, 0, false, std::string("error: ") + e.what()};
    }
  }
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteConfig& config,
                      const TrialFn& fn) {
  SuiteReport report;
  report.suite = name;
  report.master_seed = config.seed;
  report.trials = config.trials;
  report.records.resize(config.trials);

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (int i = 0; i < config.trials; ++i)
      report.records[i] = guarded(i, config, fn);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < config.trials; i = next.fetch_add(1))
          report.records[i] = guarded(i, config, fn);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (const auto& rec : report.records) {
    if (rec.ok) continue;
    if (rec.note.rfind("error: ", 0) == 0) ++report.errors;
    else ++report.failures;
  }
  return report;
}

namespace {

std::optional<std::vector<SignEntry>> maybe_pattern(Rng& rng, int n, bool allow_zero) {
  if (rng.uniform_int(0, 1) == 0) return std::nullopt;
  std::vector<SignEntry> p(n);
  for (auto& e : p) {
    const int r = rng.uniform_int(0, allow_zero ? 5 : 3);
    e = r <= 1 ? SignEntry::plus : r <= 3 ? SignEntry::minus : SignEntry::zero;
  }
  return p;
}

Seed sub_seed(Seed s, std::uint64_t tag) {
  return Seed{s.master ^ (0x9e3779b97f4a7c15ULL * (tag + 1)), s.trial_index};
}

}  // namespace

SuiteReport suite_index_restriction(const SuiteConfig& config) {
  return run_suite("index_restriction", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    const int n = rng.uniform_int(2, std::max(2, c.max_dim));
    const int mode = rng.uniform_int(0, 9);  // 0-3 plain, 4-6 kernel, 7-9 isotropic
    BilinForm q;
    Subspace w;
    std::string tag;
    if (mode <= 3) {
      auto pattern = maybe_pattern(rng, n, true);
      SymMatrix qm = gen_symmetric(sub_seed(seed, 1), n, pattern);
      q = BilinForm::on_full(qm.mat(), Symmetry::symmetric);
      w = random_subspace(rng, n, rng.uniform_int(0, n));
      tag = pattern ? "pattern" : "gaussian";
    } else {
      // orthogonally diagonalized form with known kernel / isotropic vectors
      Matrix o = random_orthogonal(rng, n);
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i)
        d[i] = (rng.uniform_int(0, 1) ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
      if (mode <= 6) {
        d[n - 1] = 0.0;  // exact kernel direction
      } else {
        d[0] = std::abs(d[0]);
        d[1] = -std::abs(d[1]);
        if (n >= 4 && rng.uniform_int(0, 1)) d[n - 1] = 0.0;
      }
      Matrix diag(n, n);
      for (int i = 0; i < n; ++i) diag(i, i) = d[i];
      Matrix qm = o.transpose() * diag * o;
      q = BilinForm::on_full(qm, Symmetry::symmetric);
      Matrix seedvec(n, 1);
      if (mode <= 6) {
        // W contains an exact kernel direction
        for (int i = 0; i < n; ++i) seedvec(i, 0) = o(n - 1, i);
        tag = "degen-kernel";
      } else {
        // W contains an exact Q-isotropic direction v with Q[v,.] = 0 on W
        const double al = std::sqrt(-d[1]), be = std::sqrt(d[0]);
        for (int i = 0; i < n; ++i) seedvec(i, 0) = al * o(0, i) + be * o(1, i);
        tag = "degen-isotropic";
      }
      Matrix cols = seedvec;
      const int extra = rng.uniform_int(0, n - 2);
      if (extra > 0) {
        Matrix cand = gaussian_matrix(rng, n, extra);
        if (mode > 6) {
          // keep the extras Q-orthogonal to v so v stays in W n W^perpQ
          // (v itself is isotropic, so correct along u = Qv instead of v)
          Matrix qv = q.matrix() * seedvec;  // n x 1, nonzero since v is not in ker Q
          const double vqu = (qv.transpose() * qv)(0, 0);
          Matrix proj = qv * ((1.0 / vqu) * (qv.transpose() * cand));
          cand = cand - proj;
        }
        cols = hcat(cols, cand);
      }
      w = column_space(cols, c.policy);
    }
    auto [lhs, rhs] = eq1_sides(q, w, c.policy);
    TrialRecord rec;
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.ok = lhs == rhs;
    rec.note = "n=" + std::to_string(n) + " dimW=" + std::to_string(w.dim()) + " " + tag;
    return rec;
  });
}

namespace {

PathOptions random_path_options(Rng& rng, int n, bool force_closed = false) {
  PathOptions opt;
  const int kind = rng.uniform_int(0, 3);
  if (kind == 1) opt.invertible = true;
  if (kind == 2 && n >= 2) opt.constant_kernel_dim = rng.uniform_int(1, std::min(2, n - 1));
  if (kind == 3) {
    Rng pat(Seed{rng.engine()(), 0});
    opt.endpoint_pattern_a = maybe_pattern(pat, n, true);
    if (!force_closed) opt.endpoint_pattern_b = maybe_pattern(pat, n, true);
  }
  opt.closed = force_closed || rng.uniform_int(0, 3) == 0;
  if (opt.closed) opt.endpoint_pattern_b = opt.endpoint_pattern_a;
  return opt;
}

}  // namespace

SuiteReport suite_flow_crossval(const SuiteConfig& config) {
  return run_suite("flow_crossval", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    const int n = rng.uniform_int(1, std::min(8, std::max(1, c.max_dim)));
    PathOptions opt = random_path_options(rng, n);
    const int mesh = rng.uniform_int(4, 8);
    FormPath p = gen_form_path(sub_seed(seed, 2), n, mesh, opt);
    TrialRecord rec;
    rec.lhs = spectral_flow(p, c.policy).flow;
    rec.rhs = spectral_flow_oracle(p, 160, c.policy);
    const long long ind_diff =
        index_nullity(BilinForm::on_full(p.samples().front().mat(), Symmetry::symmetric), c.policy).index -
        index_nullity(BilinForm::on_full(p.samples().back().mat(), Symmetry::symmetric), c.policy).index;
    rec.ok = rec.lhs == rec.rhs && rec.lhs == ind_diff;
    rec.note = "n=" + std::to_string(n) + " mesh=" + std::to_string(mesh) +
               (opt.closed ? " closed" : "") + (opt.invertible ? " invertible" : "") +
               (opt.constant_kernel_dim ? " ker=" + std::to_string(opt.constant_kernel_dim) : "");
    return rec;
  });
}

// One trial covers: (1) invertible path has flow 0, (2) concatenation
// additivity, (3) direct-sum additivity, (4) cogredience invariance along a
// continuous invertible matrix path, (5) closed-perturbation invariance for
// closed paths, (6) constant-kernel restriction invariance.
SuiteReport suite_flow_properties(const SuiteConfig& config) {
  return run_suite("flow_properties", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    const int n = rng.uniform_int(2, std::min(8, std::max(2, c.max_dim)));
    FormPath p = gen_form_path(sub_seed(seed, 3), n, 7, random_path_options(rng, n));
    FormPath q = gen_form_path(sub_seed(seed, 4), n, 7, {});
    const long long sf_p = spectral_flow(p, c.policy).flow;

    std::string bad;
    {
      PathOptions inv;
      inv.invertible = true;
      FormPath pi = gen_form_path(sub_seed(seed, 8), n, 6, inv);
      if (spectral_flow(pi, c.policy).flow != 0) bad += " invertible";
    }
    {
      auto [p1, p2] = split_at(p, 3);
      if (spectral_flow(p1, c.policy).flow + spectral_flow(p2, c.policy).flow != sf_p)
        bad += " concat";
      if (spectral_flow(reverse(p), c.policy).flow != -sf_p) bad += " reverse";
    }
    {
      const long long sf_q = spectral_flow(q, c.policy).flow;
      if (spectral_flow(direct_sum(p, q), c.policy).flow != sf_p + sf_q) bad += " dsum";
    }
    {
      // continuous path of invertible congruences, small steps from M_0
      std::vector<Matrix> mpath;
      Matrix m = well_conditioned_gl(rng, n);
      for (std::size_t i = 0; i < p.mesh().size(); ++i) {
        mpath.push_back(m);
        m = m + 0.05 * gaussian_matrix(rng, n, n);
      }
      if (spectral_flow(conjugate(p, mpath, c.policy), c.policy).flow != sf_p)
        bad += " cogredience";
    }
    {
      PathOptions cl;
      cl.closed = true;
      FormPath pc = gen_form_path(sub_seed(seed, 9), n, 7, cl);
      FormPath kc = gen_form_path(sub_seed(seed, 10), n, 7, cl);
      std::vector<SymMatrix> summed;
      for (std::size_t i = 0; i < pc.samples().size(); ++i)
        summed.emplace_back(pc.samples()[i].mat() + kc.samples()[i].mat());
      FormPath perturbed(pc.mesh(), std::move(summed));
      if (spectral_flow(pc, c.policy).flow != spectral_flow(perturbed, c.policy).flow)
        bad += " closed-perturb";
    }
    {
      PathOptions ck;
      ck.constant_kernel_dim = rng.uniform_int(1, std::min(2, n - 1));
      FormPath pk = gen_form_path(sub_seed(seed, 11), n, 6, ck);
      Subspace w = column_space(pk.samples().front().mat(), c.policy);
      bool const_ker = int(w.dim()) == n - ck.constant_kernel_dim;
      for (const auto& s : pk.samples())
        if (kernel(s.mat(), c.policy).dim() != ck.constant_kernel_dim) const_ker = false;
      if (!const_ker ||
          spectral_flow(pk, c.policy).flow !=
              spectral_flow(restrict_path(pk, w, c.policy), c.policy).flow)
        bad += " const-kernel";
    }

    TrialRecord rec;
    rec.lhs = 6 - int(std::count(bad.begin(), bad.end(), ' '));
    rec.rhs = 6;
    rec.ok = bad.empty();
    rec.note = "n=" + std::to_string(n) + (bad.empty() ? "" : " failed:" + bad);
    return rec;
  });
}

SuiteReport suite_flow_restriction(const SuiteConfig& config) {
  return run_suite("flow_restriction", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    const int n = rng.uniform_int(2, std::max(2, c.max_dim));
    PathOptions opt = random_path_options(rng, n);
    // bias toward degenerate endpoints: zero-pattern endpoints or a path
    // kernel that V is then forced to meet
    if (rng.uniform_int(0, 2) == 0 && !opt.closed) {
      opt = PathOptions{};
      std::vector<SignEntry> pa(n, SignEntry::plus), pb(n, SignEntry::minus);
      pa[0] = SignEntry::zero;
      pb[n - 1] = SignEntry::zero;
      opt.endpoint_pattern_a = pa;
      opt.endpoint_pattern_b = pb;
    }
    FormPath p = gen_form_path(sub_seed(seed, 5), n, rng.uniform_int(4, 8), opt);
    const int codim = rng.uniform_int(1, std::min(3, n - 1));
    const int d = n - codim;
    Subspace v;
    bool v_degen = false;
    if (opt.constant_kernel_dim > 0 && rng.uniform_int(0, 1)) {
      // force V to meet the (constant) kernel of the path
      Subspace ker = kernel(p.samples().front().mat(), c.policy);
      Matrix cols = ker.frame().block(0, 0, n, 1);
      if (d > 1) cols = hcat(cols, gaussian_matrix(rng, n, d - 1));
      v = column_space(cols, c.policy);
      v_degen = true;
    } else {
      v = random_subspace(rng, n, d);
    }
    auto [lhs, rhs] = theorem1_sides(p, v, c.policy);
    const bool degen = v_degen || opt.constant_kernel_dim > 0 ||
                       (opt.endpoint_pattern_a &&
                        std::count(opt.endpoint_pattern_a->begin(),
                                   opt.endpoint_pattern_a->end(), SignEntry::zero) > 0);
    TrialRecord rec;
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.ok = lhs == rhs;
    rec.note = "n=" + std::to_string(n) + " codim=" + std::to_string(codim) +
               (opt.closed ? " closed" : "") + (degen ? " degen" : "") +
               (opt.constant_kernel_dim ? " ker=" + std::to_string(opt.constant_kernel_dim) : "");
    return rec;
  });
}

SuiteReport suite_closed_paths(const SuiteConfig& config) {
  return run_suite("closed_paths", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    const int n = rng.uniform_int(2, std::max(2, c.max_dim));
    PathOptions opt = random_path_options(rng, n, /*force_closed=*/true);
    FormPath p = gen_form_path(sub_seed(seed, 6), n, rng.uniform_int(5, 9), opt);
    const long long sf = spectral_flow(p, c.policy).flow;
    Subspace v = random_subspace(rng, n, rng.uniform_int(1, n));
    auto [lhs, rhs] = theorem1_sides(p, v, c.policy);
    TrialRecord rec;
    rec.lhs = sf;
    rec.rhs = 0;
    rec.ok = sf == 0 && lhs == rhs && spectral_flow(restrict_path(p, v, c.policy), c.policy).flow == 0;
    rec.note = "n=" + std::to_string(n) +
               (lhs == rhs ? "" : " restriction-identity-violated");
    return rec;
  });
}

namespace {

LagScenario scenario_for(Seed seed, const SuiteConfig& c, Rng& rng, LagOptions& opt) {
  const int n = rng.uniform_int(2, std::max(2, c.max_dim / 2));
  const int k = rng.uniform_int(0, std::min(3, n - 1));
  opt.hit_L0 = rng.uniform_int(0, 1) == 1;
  opt.degenerate_endpoints = rng.uniform_int(0, 1) == 1;
  opt.mesh_size = rng.uniform_int(6, 9);
  return gen_lagrangian_scenario(sub_seed(seed, 7), n, k, opt);
}

}  // namespace

SuiteReport suite_maslov_partition(const SuiteConfig& config) {
  return run_suite("maslov_partition", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    LagOptions opt;
    LagScenario sc = scenario_for(seed, c, rng, opt);
    TrialRecord rec;
    rec.lhs = maslov_index(sc.path, sc.l0, c.policy);
    rec.rhs = maslov_oracle(sc.path, sc.l0, c.policy, rng.engine()());
    // concatenation additivity at an interior mesh point
    const auto& mesh = sc.path.mesh;
    const int cut = int(mesh.size()) / 2;
    std::vector<double> m1(mesh.begin(), mesh.begin() + cut + 1);
    std::vector<double> m2(mesh.begin() + cut, mesh.end());
    std::vector<Subspace> f1(sc.path.frames.begin(), sc.path.frames.begin() + cut + 1);
    std::vector<Subspace> f2(sc.path.frames.begin() + cut, sc.path.frames.end());
    LagrangianPath left = make_lagrangian_path(sc.space, m1, std::move(f1), c.policy,
                                               sc.path.max_step_angle, sc.path.sampler);
    LagrangianPath right = make_lagrangian_path(sc.space, m2, std::move(f2), c.policy,
                                                sc.path.max_step_angle, sc.path.sampler);
    const long long split_sum = maslov_index(left, sc.l0, c.policy) +
                                maslov_index(right, sc.l0, c.policy);
    rec.ok = rec.lhs == rec.rhs && rec.lhs == split_sum;
    rec.note = "2n=" + std::to_string(sc.space.dim) +
               " k=" + std::to_string(sc.setup.codim()) +
               (opt.hit_L0 ? " hit" : "") + (opt.degenerate_endpoints ? " degen" : "");
    return rec;
  });
}

SuiteReport suite_maslov_reduction(const SuiteConfig& config) {
  return run_suite("maslov_reduction", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    LagOptions opt;
    LagScenario sc = scenario_for(seed, c, rng, opt);
    auto [lhs, rhs] = theorem2_sides(sc.setup, sc.path, sc.l0, c.policy);
    TrialRecord rec;
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.ok = lhs == rhs;
    rec.note = "2n=" + std::to_string(sc.space.dim) +
               " k=" + std::to_string(sc.setup.codim()) +
               (opt.hit_L0 ? " hit" : "") + (opt.degenerate_endpoints ? " degen" : "");
    return rec;
  });
}

SuiteReport suite_chart_identities(const SuiteConfig& config) {
  return run_suite("chart_identities", config, [](Seed seed, const SuiteConfig& c) {
    Rng rng(seed);
    LagOptions opt;
    LagScenario sc = scenario_for(seed, c, rng, opt);
    ChartSegment segment = make_chart_segment(sc.path, sc.l0, sc.l1, c.policy);
    IdentityReport rep = section_4_3_identities(sc.setup, sc.path, sc.l0, segment, c.policy);
    TrialRecord rec;
    rec.lhs = int(rep.kernel_identity) + int(rep.perp_identity) + int(rep.form_identity);
    rec.rhs = 3;
    rec.ok = rep.all();
    rec.note = "2n=" + std::to_string(sc.space.dim) +
               " k=" + std::to_string(sc.setup.codim()) +
               (rep.kernel_identity ? "" : " kernel") +
               (rep.perp_identity ? "" : " perp") + (rep.form_identity ? "" : " form");
    return rec;
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "index_restriction", "flow_crossval",    "flow_properties",
      "flow_restriction",  "closed_paths",     "maslov_partition",
      "maslov_reduction",  "chart_identities",
  };
  return names;
}

SuiteReport run_named_suite(const std::string& name, const SuiteConfig& config) {
  if (name == "index_restriction") return suite_index_restriction(config);
  if (name == "flow_crossval") return suite_flow_crossval(config);
  if (name == "flow_properties") return suite_flow_properties(config);
  if (name == "flow_restriction") return suite_flow_restriction(config);
  if (name == "closed_paths") return suite_closed_paths(config);
  if (name == "maslov_partition") return suite_maslov_partition(config);
  if (name == "maslov_reduction") return suite_maslov_reduction(config);
  if (name == "chart_identities") return suite_chart_identities(config);
  throw InputError("unknown suite: " + name);
}

nlohmann::ordered_json report_json(const SuiteReport& report, bool with_timing,
                                   double seconds) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["suite"] = report.suite;
  j["seed"] = report.master_seed;
  j["trials"] = report.trials;
  j["failures"] = report.failures;
  j["errors"] = report.errors;
  j["pass"] = report.pass();
  j["backend"] = kern::active_ops().name;
  if (with_timing) j["seconds"] = seconds;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json jr;
    jr["trial"] = r.trial;
    jr["lhs"] = r.lhs;
    jr["rhs"] = r.rhs;
    jr["ok"] = r.ok;
    jr["note"] = r.note;
    recs.push_back(std::move(jr));
  }
  j["records"] = std::move(recs);
  return j;
}

}  // namespace sfm
