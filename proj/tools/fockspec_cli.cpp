#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fockspec/fockspec.hpp"

using namespace fockspec;
using nlohmann::ordered_json;

namespace {

using Cell = std::variant<double, long long, std::string>;

/// Rows of one output file; CSV and JSON are two views of the same table.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row has the wrong width");
    rows.push_back(std::move(row));
  }
};

std::string csv_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_g17(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

ordered_json json_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double x = std::get<double>(c);
    return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
  }
  if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
  return std::get<std::string>(c);
}

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& r : t.rows) {
      ordered_json obj;
      for (std::size_t i = 0; i < r.size(); ++i) obj[t.columns[i]] = json_cell(r[i]);
      arr.push_back(obj);
    }
    os << arr.dump(2) << "\n";
    return os.str();
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << "\n";
  }
  return os.str();
}

Point3 parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 3) throw std::invalid_argument("expected a point p1,p2,p3 but got '" + s + "'");
  return {v[0], v[1], v[2]};
}

ordered_json grid_json(const TorusGrid& g) {
  return {{"descriptor", g.descriptor()},
          {"n_per_axis", g.n_per_axis()},
          {"offset", g.offset()},
          {"grading", g.grading_levels()},
          {"points_per_cell", g.points_per_cell()},
          {"nodes", g.size()}};
}

/// Options shared by every subcommand.
struct Common {
  std::string model_path;
  std::optional<double> c;
  std::optional<double> u0;
  std::string output;
  std::string format = "csv";
  unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c, bool needs_model) {
  auto* m = app->add_option("--model", c.model_path, "Model config file (key = value)");
  if (needs_model) m->required()->check(CLI::ExistingFile);
  app->add_option("--c", c.c, "Override the one-particle shift c");
  app->add_option("--u0", c.u0, "Override the vacuum energy u0");
  app->add_option("--output,-o", c.output, "Output path (default fockspec_<command>.<format>)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", c.threads, "Worker threads (FOCKSPEC_THREADS overrides)");
}

struct Context {
  std::string command;
  Common common;
  std::optional<ModelConfig> config;
  std::optional<ModelSpec> model;
  ordered_json manifest = ordered_json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void load() {
    if (common.model_path.empty()) return;
    config = load_model_config(common.model_path);
    if (common.c) config->c = *common.c;
    if (common.u0) config->u0 = *common.u0;
    model = config->model();
    manifest["model_file"] = common.model_path;
    manifest["model_hash"] = model_hash(*model);
    manifest["model"] = canonical_text(*model);
  }
  const ModelSpec& require_model() const {
    if (!model) throw ConfigError(command + " needs --model");
    return *model;
  }
  TorusGrid config_grid() const { return config ? config->grid.build() : GridSettings{}.build(); }
  unsigned workers() const { return worker_count(common.threads); }
};

void emit(Context& ctx, const Table& t) {
  const std::string path = ctx.common.output.empty() ? "fockspec_" + ctx.command + "." + ctx.common.format
                                                     : ctx.common.output;
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << render(t, ctx.common.format);
  }
  ctx.manifest["command"] = ctx.command;
  ctx.manifest["output"] = path;
  ctx.manifest["format"] = ctx.common.format;
  ctx.manifest["columns"] = t.columns;
  ctx.manifest["rows"] = t.rows.size();
  ctx.manifest["threads"] = ctx.workers();
  ctx.manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  std::ofstream man(path + ".manifest.json");
  man << ctx.manifest.dump(2) << "\n";
  std::cerr << "wrote " << path << " (" << t.rows.size() << " rows)\n";
}

const char* kColumnsHelp = R"(Output columns per command:
  check-assumptions  clause,passed,detail
  delta-scan         p1,p2,p3,z,delta
  bands              p1,p2,p3,m_p,M_p,delta_at_m,z_p   (z_p empty when the fiber has no eigenvalue below m)
  tune-resonance     c_star,delta0m,kind
  classify           kind,delta0m,v0,tol
  count              z,N,method,residual_gap
  oracle             z,N,method,residual_gap
  hs-norm            grading,nodes,z,hs_norm
  efimov             l,measure,s_l_at_0
  asymptotics        z,N,abs_log_m_minus_z
  weyl-check         sample,lambda1,lambda2,lhs,rhs   (violations only)
Exit codes: 0 success, 1 computational error, 2 invalid input.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis tools for a three-sector lattice Hamiltonian"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);

  Context ctx;
  std::function<void()> action;

  // check-assumptions
  double asm_delta = 0.5;
  int asm_samples = 100;
  std::uint64_t seed = 12345;
  {
    auto* s = app.add_subcommand("check-assumptions", "Sampled checks of the model hypotheses");
    add_common(s, ctx.common, true);
    s->add_option("--delta", asm_delta, "Ball radius for local checks")->check(CLI::PositiveNumber);
    s->add_option("--samples", asm_samples, "Random samples per clause")->check(CLI::Range(1, 1000000));
    s->add_option("--seed", seed, "Random seed");
    s->callback([&] {
      action = [&] {
        AssumptionOptions o;
        o.delta = asm_delta;
        o.samples = asm_samples;
        o.seed = seed;
        const TorusGrid g = ctx.config_grid();
        const AssumptionReport r = check_assumptions(ctx.require_model(), g, o);
        Table t{{"clause", "passed", "detail"}, {}};
        for (const auto& c : r.clauses) t.add({c.name, static_cast<long long>(c.passed), c.detail});
        ctx.manifest["grid"] = grid_json(g);
        ctx.manifest["tolerances"] = {{"delta", asm_delta}, {"samples", asm_samples}, {"seed", seed},
                                      {"margin", o.margin}, {"hessian_proportionality", 1e-5}};
        emit(ctx, t);
        std::cout << (r.all_passed() ? "all clauses pass" : "some clauses fail") << "\n";
      };
    });
  }

  // delta-scan
  std::vector<std::string> points;
  std::vector<double> z_list;
  {
    auto* s = app.add_subcommand("delta-scan", "Fredholm determinant Delta(p, z) on a list of points");
    add_common(s, ctx.common, true);
    s->add_option("--p", points, "Quasi-momentum p1,p2,p3 (repeatable)")->required();
    s->add_option("--z", z_list, "Spectral parameters")->required();
    s->callback([&] {
      action = [&] {
        const TorusGrid g = ctx.config_grid();
        Table t{{"p1", "p2", "p3", "z", "delta"}, {}};
        for (const auto& ps : points) {
          const Point3 p = parse_point(ps);
          for (double z : z_list) t.add({p[0], p[1], p[2], z, delta(ctx.require_model(), g, p, z)});
        }
        ctx.manifest["grid"] = grid_json(g);
        emit(ctx, t);
      };
    });
  }

  // bands
  int p_res = 9;
  {
    auto* s = app.add_subcommand("bands", "Essential-spectrum structure from a fiber sweep");
    add_common(s, ctx.common, true);
    s->add_option("--p-res", p_res, "Points per axis of the p-grid")->check(CLI::Range(2, 64));
    s->callback([&] {
      action = [&] {
        const TorusGrid g = ctx.config_grid();
        const BandStructure b = band_structure(ctx.require_model(), g, p_res, ctx.workers());
        Table t{{"p1", "p2", "p3", "m_p", "M_p", "delta_at_m", "z_p"}, {}};
        for (const auto& f : b.fibers)
          t.add({f.p[0], f.p[1], f.p[2], f.m_p, f.M_p, f.delta_at_m,
                 f.eigenvalue ? Cell(*f.eigenvalue) : Cell(std::string())});
        ctx.manifest["grid"] = grid_json(g);
        ctx.manifest["p_resolution"] = p_res;
        ctx.manifest["tolerances"] = {{"delta_zero_tol", b.tol}, {"eigenvalue_bisection_residual", 1e-9}};
        ordered_json summary{{"case", to_string(b.band_case)},
                             {"tau_ess", b.tau_ess},
                             {"three_branch", {b.three_branch.lo, b.three_branch.hi}},
                             {"delta_m_min", b.delta_m_min},
                             {"delta_m_max", b.delta_m_max},
                             {"sweep_error", b.sweep_error},
                             {"gap_resolved", b.gap_resolved},
                             {"upper_screen_warnings", b.upper_screen_failures},
                             {"boundary_points", b.boundary_points},
                             {"boundary_ok", b.boundary_ok},
                             {"lipschitz", b.lipschitz}};
        if (b.two_branch) summary["two_branch"] = {b.two_branch->lo, b.two_branch->hi};
        ctx.manifest["summary"] = summary;
        emit(ctx, t);
        std::cout << "case " << to_string(b.band_case) << ", tau_ess = " << format_g17(b.tau_ess) << "\n";
        if (b.upper_screen_failures > 0)
          std::cerr << "warning: Delta(p, M) > 0 at " << b.upper_screen_failures
                    << " fibers; eigenvalues above the band are not included\n";
      };
    });
  }

  // tune-resonance and classify
  {
    auto* s = app.add_subcommand("tune-resonance", "Shift c making Delta(0, m) vanish");
    add_common(s, ctx.common, true);
    s->callback([&] {
      action = [&] {
        const TorusGrid g = ctx.config_grid();
        const double cs = tune_resonance(ctx.require_model(), g);
        const ThresholdClass tc = classify_threshold(ctx.require_model().with_c(cs), g);
        Table t{{"c_star", "delta0m", "kind"}, {}};
        t.add({cs, tc.delta0m, to_string(tc.kind)});
        ctx.manifest["grid"] = grid_json(g);
        ctx.manifest["tolerances"] = {{"classify_tol", tc.tol}};
        emit(ctx, t);
        std::cout << "c* = " << format_g17(cs) << "\n";
      };
    });
  }
  {
    auto* s = app.add_subcommand("classify", "Threshold classification at z = m");
    add_common(s, ctx.common, true);
    s->callback([&] {
      action = [&] {
        const TorusGrid g = ctx.config_grid();
        const ThresholdClass tc = classify_threshold(ctx.require_model(), g);
        Table t{{"kind", "delta0m", "v0", "tol"}, {}};
        t.add({to_string(tc.kind), tc.delta0m, tc.v_at_0, tc.tol});
        ctx.manifest["grid"] = grid_json(g);
        ctx.manifest["tolerances"] = {{"classify_tol", tc.tol}};
        emit(ctx, t);
        std::cout << to_string(tc.kind) << "\n";
      };
    });
  }

  // count / oracle / asymptotics share the counting grid
  int count_n = 4, count_grading = 0;
  std::string source = "nodal";
  std::vector<double> distances;
  auto add_count_grid = [&](CLI::App* s) {
    s->add_option("--count-n", count_n, "Counting grid points per axis")->check(CLI::Range(2, 64));
    s->add_option("--count-grading", count_grading, "Counting grid grading levels")->check(CLI::Range(0, 40));
  };
  {
    auto* s = app.add_subcommand("count", "Eigenvalue count N(z) by the Birman-Schwinger matrix");
    add_common(s, ctx.common, true);
    add_count_grid(s);
    s->add_option("--z", z_list, "Spectral parameters")->required();
    s->add_option("--source", source, "Delta at nodes: nodal or quadrature")->check(CLI::IsMember({"nodal", "quadrature"}));
    s->callback([&] {
      action = [&] {
        const TorusGrid cg = build_grid(count_n, true, count_grading, 1);
        const DeltaSource src = source == "nodal" ? DeltaSource::nodal() : DeltaSource::quadrature(ctx.config_grid());
        Table t{{"z", "N", "method", "residual_gap"}, {}};
        for (const auto& r : counting_sweep(ctx.require_model(), cg, z_list, src, ctx.workers()))
          t.add({r.z, static_cast<long long>(r.count), r.method + "/" + src.name(), r.residual_gap});
        ctx.manifest["count_grid"] = grid_json(cg);
        if (source == "quadrature") ctx.manifest["delta_grid"] = grid_json(src.integration);
        ctx.manifest["tolerances"] = {{"pivot_floor", 1e-12}};
        emit(ctx, t);
      };
    });
  }
  {
    auto* s = app.add_subcommand("oracle", "Eigenvalue count of the truncated Hamiltonian matrix");
    add_common(s, ctx.common, true);
    add_count_grid(s);
    s->add_option("--z", z_list, "Spectral parameters")->required();
    s->callback([&] {
      action = [&] {
        const TorusGrid cg = build_grid(count_n, true, count_grading, 1);
        const FockMatrix h = assemble_H(ctx.require_model(), cg, ctx.workers());
        Table t{{"z", "N", "method", "residual_gap"}, {}};
        for (double z : z_list) {
          const EigencountReport r = oracle_count_below(h, z);
          t.add({r.z, static_cast<long long>(r.count), r.method, r.residual_gap});
        }
        ctx.manifest["count_grid"] = grid_json(cg);
        ctx.manifest["dimension"] = h.dim();
        ctx.manifest["tolerances"] = {{"pivot_floor", 1e-12}};
        emit(ctx, t);
      };
    });
  }
  {
    auto* s = app.add_subcommand("asymptotics", "N(z) sweep towards m and logarithmic fit");
    add_common(s, ctx.common, true);
    add_count_grid(s);
    s->add_option("--dist", distances, "Distances m - z (positive)")->required()->check(CLI::PositiveNumber);
    s->callback([&] {
      action = [&] {
        const ModelSpec& model = ctx.require_model();
        const TorusGrid cg = build_grid(count_n, true, count_grading, 1);
        const TorusGrid dg = ctx.config_grid();
        const DeltaSource src = DeltaSource::quadrature(dg);
        std::vector<std::pair<double, double>> pts;
        Table t{{"z", "N", "abs_log_m_minus_z"}, {}};
        for (double d : distances) {
          const double z = model.m() - d;
          const int n = count_below(model, cg, z, src, ctx.workers()).count;
          pts.push_back({z, double(n)});
          t.add({z, static_cast<long long>(n), std::abs(std::log(d))});
        }
        ctx.manifest["count_grid"] = grid_json(cg);
        ctx.manifest["delta_grid"] = grid_json(dg);
        if (pts.size() >= 4) {
          const LogFit f = fit_log_asymptotics(pts, model.m());
          ctx.manifest["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
          std::cout << "slope = " << format_g17(f.slope) << "\n";
        }
        emit(ctx, t);
      };
    });
  }

  // hs-norm
  double hs_z = std::nan("");
  std::vector<int> levels{4, 8, 12};
  {
    auto* s = app.add_subcommand("hs-norm", "Hilbert-Schmidt norm of the two-particle block");
    add_common(s, ctx.common, true);
    add_count_grid(s);
    s->add_option("--z", hs_z, "Spectral parameter (default m)");
    s->add_option("--levels", levels, "Grading levels of the counting grid");
    s->callback([&] {
      action = [&] {
        const ModelSpec& model = ctx.require_model();
        const double z = std::isnan(hs_z) ? model.m() : hs_z;
        const TorusGrid dg = ctx.config_grid();
        Table t{{"grading", "nodes", "z", "hs_norm"}, {}};
        for (int lv : levels) {
          const TorusGrid cg = build_grid(count_n, true, lv, 1);
          t.add({static_cast<long long>(lv), static_cast<long long>(cg.size()), z,
                 hs_norm_T11(model, cg, z, DeltaSource::quadrature(dg), ctx.workers())});
        }
        ctx.manifest["delta_grid"] = grid_json(dg);
        emit(ctx, t);
      };
    });
  }

  // efimov
  double mu = 1.0;
  int l_max = 8;
  std::optional<double> s_param;
  {
    auto* s = app.add_subcommand("efimov", "Asymptotic coefficient from the kernel family");
    add_common(s, ctx.common, false);
    s->add_option("--mu", mu, "Level mu")->check(CLI::PositiveNumber);
    s->add_option("--l-max", l_max, "Highest harmonic")->check(CLI::Range(2, 64));
    s->add_option("--s", s_param, "Ratio l2/l1 (default: from the model, else 1/2)");
    s->callback([&] {
      action = [&] {
        EfimovParams p;
        if (s_param) {
          p = EfimovParams::from_s(*s_param);
        } else if (ctx.model) {
          p = EfimovParams::from_quadratic(extract_quadratic_data(*ctx.model));
        }
        const EfimovEstimate e = u_of_mu(p, mu, l_max);
        const ConventionReport conv = select_angle_convention(p);
        Table t{{"l", "measure", "s_l_at_0"}, {}};
        for (const auto& [l, mes] : e.per_harmonic)
          t.add({static_cast<long long>(l), mes, legendre_eigenvalues_single(p, 0.0, l)});
        ctx.manifest["params"] = {{"s", p.s}, {"l0", p.l0}, {"mu", mu}, {"l_max", l_max}};
        ctx.manifest["result"] = {{"y_star", e.y_star}, {"U0", e.U0}, {"U0_lower", e.U0_lower},
                                  {"convention", conv.selected == AngleConvention::arccos ? "arccos" : "reflected"},
                                  {"deviation_arccos", conv.deviation_arccos},
                                  {"deviation_reflected", conv.deviation_reflected}};
        ctx.manifest["tolerances"] = {{"superlevel_resolution", 1e-6}, {"root_bisection", 1e-14}};
        emit(ctx, t);
        std::cout << "y* = " << format_g17(e.y_star) << ", U(mu) = " << format_g17(e.U0) << "\n";
      };
    });
  }

  // weyl-check
  int samples = 200, dim = 40;
  {
    auto* s = app.add_subcommand("weyl-check", "Random test of the Weyl counting inequality");
    add_common(s, ctx.common, false);
    s->add_option("--samples", samples, "Number of random pairs")->check(CLI::Range(0, 1000000));
    s->add_option("--dim", dim, "Matrix dimension")->check(CLI::Range(1, 2000));
    s->add_option("--seed", seed, "Random seed");
    s->callback([&] {
      action = [&] {
        const WeylReport r = weyl_check(samples, dim, seed);
        Table t{{"sample", "lambda1", "lambda2", "lhs", "rhs"}, {}};
        for (const auto& v : r.violations)
          t.add({static_cast<long long>(v.sample), v.lambda1, v.lambda2, static_cast<long long>(v.lhs),
                 static_cast<long long>(v.rhs)});
        ctx.manifest["params"] = {{"samples", samples}, {"dim", dim}, {"seed", seed}};
        emit(ctx, t);
        std::cout << r.violations.size() << " violations in " << samples << " samples\n";
        if (!r.violations.empty()) throw std::runtime_error("Weyl inequality violated");
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ctx.command = app.get_subcommands().front()->get_name();
  try {
    ctx.load();
    action();
  } catch (const ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
