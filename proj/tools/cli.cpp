#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ratdyn/bimodule.hpp"
#include "ratdyn/errors.hpp"
#include "ratdyn/io.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/map_parser.hpp"
#include "ratdyn/measure.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/registry.hpp"
#include "ratdyn/transfer.hpp"

namespace ratdyn {
namespace {

constexpr const char* kGrammar = R"(Maps:
  A rational expression in z, e.g. "z^2-2", "(z^3-16/27)/z", "(2z^2-1)/z".
  Operators + - * / ^ and parentheses; juxtaposition multiplies (2z, 3(z+1));
  ^ takes a nonnegative integer; numbers are decimals or quotients (16/27);
  i is the imaginary unit. A catalog name selects a worked example, with an
  optional parameter after ':' (quadratic_family:0.2, tchebychev_n:3).
Test functions:
  Polynomials in z and zbar (also conj(z), re(z), im(z)), e.g. "z*zbar",
  "re(z)^2 + 1"; division only by constants.
Points:
  A complex constant such as 0.5, -2, 1+2i, or inf.
Configuration:
  --config FILE reads "key = value" lines mirroring the flags; RATDYN_THREADS
  is the fallback for --threads.)";

const SpherePoint kDefaultStart = Complex(0.5, 0.25);

std::string format_point(const SpherePoint& p) {
  if (p.is_infinity()) return "inf";
  // Adding zero turns -0 into 0.
  const Complex z = p.value() + Complex(0.0, 0.0);
  if (z.imag() == 0.0) return format_double(z.real());
  if (z.real() == 0.0) return format_double(z.imag()) + "i";
  const std::string im = format_double(z.imag());
  return format_double(z.real()) + (z.imag() < 0.0 ? "" : "+") + im + "i";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw PreconditionError("cannot open '" + path + "' for writing");
  return file;
}

// Evenly spaced members of a seeded Julia cloud.
std::vector<SpherePoint> julia_probes(const RationalMap& r, std::size_t count, std::uint64_t seed) {
  const JuliaCloud cloud = sample_inverse_iteration(r, kDefaultStart, kDefaultBurnIn,
                                                    std::max<std::size_t>(count, 1000), seed);
  std::vector<SpherePoint> probes;
  const std::size_t stride = cloud.points.size() / std::max<std::size_t>(count, 1);
  for (std::size_t k = 0; k < count; ++k) probes.push_back(cloud.points[k * stride]);
  return probes;
}

Window parse_window(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("window: bad number '" + cell + "'");
    }
  }
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
    throw ParseError("window must be re_min,re_max,im_min,im_max with min < max");
  }
  return Window{v[0], v[1], v[2], v[3]};
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      const int n = std::stoi(text);
      if (n > 0) return {n, n};
    } else {
      const int w = std::stoi(text.substr(0, x));
      const int h = std::stoi(text.substr(x + 1));
      if (w > 0 && h > 0) return {w, h};
    }
  } catch (const std::exception&) {
  }
  throw ParseError("resolution must be N or WxH with positive sizes, got '" + text + "'");
}

void print_example(std::ostream& out, const ExampleRecord& rec) {
  auto line = [&](const char* key, const Anchored& a) {
    if (!a.value.empty()) out << key << ": " << a.value << "  [" << a.anchor << "]\n";
  };
  out << "example: " << rec.name << '\n';
  line("julia set", rec.julia_description);
  line("K0", rec.k0);
  line("K1", rec.k1);
  line("algebra", rec.algebra);
  if (rec.critical_in_julia_count) {
    out << "catalog critical points in J: " << *rec.critical_in_julia_count << "  ["
        << rec.critical_in_julia_anchor << "]\n";
  }
}

struct Common {
  std::uint64_t seed = 0;
  std::int64_t node_budget = 1'000'000;
  TreeOptions tree() const { return TreeOptions{node_budget, {}}; }
};

int cmd_info(const std::string& map_text, std::size_t cloud_size, const Common& c,
             std::ostream& out) {
  const ParsedMap parsed = parse_map_spec(map_text);
  const RationalMap& r = parsed.map;
  out << "map: " << parsed.canonical << '\n';
  out << "degree: " << r.degree() << '\n';
  if (r.degree() < 2) throw PreconditionError("info needs a map of degree >= 2");
  const auto crit = critical_points(r);
  out << "critical points:\n";
  for (const CriticalDatum& d : crit) {
    out << "  " << format_point(d.point) << ", index " << d.branch_index << ", value "
        << format_point(d.critical_value) << '\n';
  }
  const int total = riemann_hurwitz_total(crit);
  const int expected = 2 * r.degree() - 2;
  out << "riemann-hurwitz: sum(e - 1) = " << total << ", 2d - 2 = " << expected
      << (total == expected ? " (ok)" : " (MISMATCH)") << '\n';
  const JuliaCloud cloud = sample_inverse_iteration(r, kDefaultStart, kDefaultBurnIn, cloud_size,
                                                    c.seed);
  const auto in_julia = critical_points_in_julia(r, cloud);
  out << "critical points in J: " << in_julia.size() << '\n';
  for (const CriticalDatum& d : in_julia) out << "  " << format_point(d.point) << '\n';
  if (parsed.example) print_example(out, *parsed.example);
  return total == expected ? 0 : 1;
}

int cmd_preimage(const std::string& map_text, const std::string& point, int depth,
                 const std::string& out_path, const Common& c, std::ostream& out) {
  const RationalMap r = parse_map(map_text);
  if (depth < 0) throw PreconditionError("depth must be nonnegative");
  const Fiber fiber = preimage_tree(r, parse_point(point), depth, c.tree());
  if (!out_path.empty()) {
    std::ofstream file = open_output(out_path);
    file << "re,im,is_infinity,index\n";
    for (const FiberEntry& e : fiber.entries) {
      if (e.point.is_infinity()) {
        file << "inf,inf,1";
      } else {
        file << format_double(e.point.value().real()) << ','
             << format_double(e.point.value().imag()) << ",0";
      }
      file << ',' << e.index << '\n';
    }
  }
  for (const FiberEntry& e : fiber.entries) {
    out << format_point(e.point) << ", index " << e.index << '\n';
  }
  out << "index sum " << fiber.index_sum() << '\n';
  return 0;
}

struct JuliaArgs {
  std::string out_path, render_path, window = "-2,2,-2,2", res = "512", mode = "auto";
  std::size_t count = 4000;
  int burn_in = kDefaultBurnIn;
  int max_iter = 256;
  std::size_t samples = 0;
};

int cmd_julia(const std::string& map_text, const JuliaArgs& a, const Common& c, std::ostream& out) {
  if (a.out_path.empty() && a.render_path.empty()) {
    throw ParseError("julia needs --out and/or --render");
  }
  const RationalMap r = parse_map(map_text);
  if (!a.out_path.empty()) {
    const JuliaCloud cloud = sample_inverse_iteration(r, kDefaultStart, a.burn_in, a.count, c.seed);
    std::ofstream file = open_output(a.out_path);
    write_cloud_csv(file, cloud.points);
    out << "wrote " << cloud.points.size() << " points to " << a.out_path << '\n';
  }
  if (!a.render_path.empty()) {
    const Window window = parse_window(a.window);
    const auto [w, h] = parse_resolution(a.res);
    RenderOptions ro;
    ro.seed = c.seed;
    ro.max_iter = a.max_iter;
    ro.samples = a.samples;
    if (a.mode == "escape") {
      ro.mode = RenderMode::escape;
    } else if (a.mode == "density") {
      ro.mode = RenderMode::density;
    } else if (a.mode != "auto") {
      throw ParseError("mode must be auto, escape or density");
    }
    const GrayImage image = render(r, window, w, h, ro);
    std::ofstream file = open_output(a.render_path);
    write_pgm(file, image);
    out << "wrote " << w << 'x' << h << " image to " << a.render_path << '\n';
  }
  return 0;
}

struct MeasureArgs {
  std::string method = "exact", base = "0.5+0.25i", out_path, test;
  int depth = -1;
  std::size_t samples = 10000;
  int burn_in = 20;
};

int cmd_measure(const std::string& map_text, const MeasureArgs& a, const Common& c,
                std::ostream& out) {
  const RationalMap r = parse_map(map_text);
  if (a.depth < 0) throw ParseError("measure needs --depth");
  const SpherePoint base = parse_point(a.base);
  WeightedCloud cloud;
  if (a.method == "exact") {
    cloud = lyubich_exact(r, base, a.depth, c.tree());
  } else if (a.method == "mc") {
    cloud = lyubich_mc(r, base, a.depth, a.samples, c.seed, std::min(a.burn_in, a.depth));
  } else {
    throw ParseError("method must be exact or mc");
  }
  out << "atoms " << cloud.atoms.size() << '\n';
  out << "total weight " << format_double(cloud.total_weight()) << '\n';
  if (!a.test.empty()) {
    const TestFunction f = parse_test_function(a.test);
    out << "integral of " << a.test << ": " << format_point(integrate(cloud, f)) << '\n';
  }
  if (!a.out_path.empty()) {
    std::ofstream file = open_output(a.out_path);
    write_weighted_csv(file, cloud);
  }
  return 0;
}

struct KmsArgs {
  std::string test = "z", out_path;
  int levels = 12;
  std::size_t probes = 8;
  double tolerance = 0.0;
};

int cmd_kms(const std::string& map_text, const KmsArgs& a, const Common& c, std::ostream& out) {
  const RationalMap r = parse_map(map_text);
  if (a.levels < 0) throw PreconditionError("levels must be nonnegative");
  if (a.probes == 0) throw PreconditionError("probes must be positive");
  const TestFunction f = parse_test_function(a.test);
  KmsOptions ko;
  ko.stop_tolerance = a.tolerance;
  ko.tree = c.tree();
  const KmsResult res = kms_iterate(r, f, a.levels, julia_probes(r, a.probes, c.seed), ko);
  out << "beta = log " << r.degree() << " = " << format_double(entropy(r).value) << '\n';
  for (const IterationTrace& t : res.traces) {
    out << "level " << t.level << " sup-variation " << format_double(t.sup_variation) << '\n';
  }
  out << "limit " << format_point(res.limit) << '\n';
  if (res.outside_hypothesis) out << "note: " << res.tag << '\n';
  if (!a.out_path.empty()) {
    std::ofstream file = open_output(a.out_path);
    write_traces_csv(file, res.traces);
  }
  return 0;
}

struct WitnessArgs {
  std::string a, out_path;
  std::optional<double> eps, eps_rel;
  std::size_t probes = 200;
  int max_n = 16;
};

int cmd_witness(const std::string& map_text, const WitnessArgs& a, const Common& c,
                std::ostream& out) {
  const ParsedMap parsed = parse_map_spec(map_text);
  const TestFunction f = parse_test_function(a.a);
  if (a.eps.has_value() == a.eps_rel.has_value()) {
    throw ParseError("witness needs exactly one of --eps and --eps-rel");
  }
  WitnessOptions wo;
  wo.seed = c.seed;
  wo.probe_count = a.probes;
  wo.max_n = a.max_n;
  double eps = a.eps.value_or(0.0);
  if (a.eps_rel) {
    // Same sample the witness itself uses for the norm.
    const JuliaCloud cloud = sample_inverse_iteration(parsed.map, kDefaultStart, kDefaultBurnIn,
                                                      wo.sample_size, split_seed(c.seed, 1));
    wo.sample = cloud.points;
    double norm = 0.0;
    for (const SpherePoint& p : cloud.points) norm = std::max(norm, std::abs(f(p)));
    eps = *a.eps_rel * norm;
  }
  WitnessReport report;
  bool pass = false;
  try {
    const Witness w = simplicity_witness(parsed.map, f, eps, wo);
    report = w.report;
    pass = report.pass;
  } catch (const WitnessFailed& e) {
    out << "witness failed: " << e.what() << '\n';
    return 1;
  }
  report.map = parsed.canonical;
  report.test = a.a;
  const std::string doc = dump_json(to_json(report));
  if (a.out_path.empty()) {
    out << doc;
  } else {
    std::ofstream file = open_output(a.out_path);
    file << doc;
    out << "n " << report.n << ", min (f|af) " << format_double(report.min_faf) << ", "
        << (pass ? "pass" : "FAIL") << '\n';
  }
  return pass ? 0 : 1;
}

struct VerifyArgs {
  std::string example, param, out_path;
  bool all = false;
  std::size_t cloud_size = 4000;
};

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out) {
  if (a.all == !a.example.empty()) throw ParseError("verify needs an example name or --all");
  VerifyOptions vo;
  vo.seed = c.seed;
  vo.cloud_size = a.cloud_size;
  std::vector<VerifyReport> reports;
  nlohmann::json doc;
  if (a.all) {
    if (!a.param.empty()) throw ParseError("--param applies to a single example");
    reports = verify_all(vo);
    nlohmann::json list = nlohmann::json::array();
    bool pass = true;
    for (const VerifyReport& r : reports) {
      list.push_back(to_json(r));
      pass = pass && r.pass;
    }
    doc = {{"schema", kSchemaVersion}, {"pass", pass}, {"reports", list}};
  } else {
    std::string name = a.example;
    std::string param = a.param;
    if (const auto colon = name.find(':'); colon != std::string::npos) {
      if (!param.empty()) throw ParseError("parameter given twice");
      param = name.substr(colon + 1);
      name = name.substr(0, colon);
    }
    if (!param.empty()) {
      const SpherePoint p = parse_point(param);
      if (p.is_infinity()) throw ParseError("parameter must be finite");
      vo.parameter = p.value();
    }
    // Validates the name and parameter before any work.
    get_example(name, vo.parameter);
    reports.push_back(verify_example(name, vo));
    doc = to_json(reports.front());
  }
  const bool pass = std::all_of(reports.begin(), reports.end(),
                                [](const VerifyReport& r) { return r.pass; });
  if (a.out_path.empty()) {
    out << dump_json(doc);
  } else {
    std::ofstream file = open_output(a.out_path);
    file << dump_json(doc);
    for (const VerifyReport& r : reports) {
      out << r.example << ": " << (r.pass ? "pass" : "FAIL") << '\n';
      for (const CheckResult& check : r.checks) {
        if (!check.pass) out << "  " << check.name << ": " << check.detail << '\n';
      }
    }
  }
  return pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rational maps on the Riemann sphere: fibers, Julia sets, the Lyubich "
               "measure, transfer operators and bimodule constructions.",
               "ratdyn"};
  app.footer(kGrammar);
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a key = value file");

  unsigned threads = 0;
  Common common;
  app.add_option("--threads", threads, "Worker cap (default: all cores)")
      ->envname("RATDYN_THREADS");
  app.add_option("--seed", common.seed, "Random seed (default 0)");
  app.add_option("--node-budget", common.node_budget, "Preimage tree size limit (default 1e6)")
      ->check(CLI::PositiveNumber);

  std::string map_text;
  std::function<int()> action;

  std::size_t info_cloud = 4000;
  CLI::App* info = app.add_subcommand("info", "Degree, critical data and critical points in J");
  info->add_option("map", map_text, "Map expression or catalog name")->required();
  info->add_option("--cloud-size", info_cloud, "Julia sample size")->check(CLI::PositiveNumber);
  info->callback([&] { action = [&] { return cmd_info(map_text, info_cloud, common, out); }; });

  std::string point;
  int depth = 1;
  std::string preimage_out;
  CLI::App* pre = app.add_subcommand("preimage", "Preimages of a point with branch indices");
  pre->add_option("map", map_text, "Map expression or catalog name")->required();
  pre->add_option("--point", point, "Base point")->required();
  pre->add_option("--depth", depth, "Iterate depth (default 1)");
  pre->add_option("--out", preimage_out, "CSV output");
  pre->callback([&] {
    action = [&] { return cmd_preimage(map_text, point, depth, preimage_out, common, out); };
  });

  JuliaArgs ja;
  CLI::App* julia = app.add_subcommand("julia", "Sample or render the Julia set");
  julia->add_option("map", map_text, "Map expression or catalog name")->required();
  julia->add_option("--out", ja.out_path, "Cloud CSV output");
  julia->add_option("--count", ja.count, "Cloud size")->check(CLI::PositiveNumber);
  julia->add_option("--burn-in", ja.burn_in, "Discarded levels per walker");
  julia->add_option("--render", ja.render_path, "PGM output");
  julia->add_option("--window", ja.window, "re_min,re_max,im_min,im_max");
  julia->add_option("--res", ja.res, "N or WxH pixels");
  julia->add_option("--mode", ja.mode, "auto, escape or density");
  julia->add_option("--max-iter", ja.max_iter, "Escape-time iterations")
      ->check(CLI::PositiveNumber);
  julia->add_option("--samples", ja.samples, "Density-mode sample count");
  julia->callback([&] { action = [&] { return cmd_julia(map_text, ja, common, out); }; });

  MeasureArgs ma;
  CLI::App* measure = app.add_subcommand("measure", "Approximate the Lyubich measure");
  measure->add_option("map", map_text, "Map expression or catalog name")->required();
  measure->add_option("--method", ma.method, "exact or mc");
  measure->add_option("--depth", ma.depth, "Tree or walk depth")->required();
  measure->add_option("--samples", ma.samples, "Monte Carlo sample count")
      ->check(CLI::PositiveNumber);
  measure->add_option("--burn-in", ma.burn_in, "Minimum walk depth for mc");
  measure->add_option("--base", ma.base, "Base point y");
  measure->add_option("--test", ma.test, "Test function to integrate");
  measure->add_option("--out", ma.out_path, "Weighted cloud CSV output");
  measure->callback([&] { action = [&] { return cmd_measure(map_text, ma, common, out); }; });

  KmsArgs ka;
  CLI::App* kms = app.add_subcommand("kms", "Iterate the normalized transfer operator");
  kms->add_option("map", map_text, "Map expression or catalog name")->required();
  kms->add_option("--test", ka.test, "Test function (default z)");
  kms->add_option("--levels", ka.levels, "Number of iterations");
  kms->add_option("--probes", ka.probes, "Probe count");
  kms->add_option("--tolerance", ka.tolerance, "Stop once the sup-variation is below this");
  kms->add_option("--out", ka.out_path, "Trace CSV output");
  kms->callback([&] { action = [&] { return cmd_kms(map_text, ka, common, out); }; });

  WitnessArgs wa;
  CLI::App* witness = app.add_subcommand("witness", "Build and check a simplicity witness");
  witness->add_option("map", map_text, "Map expression or catalog name")->required();
  witness->add_option("--a", wa.a, "Positive test function")->required();
  witness->add_option("--eps", wa.eps, "Absolute epsilon");
  witness->add_option("--eps-rel", wa.eps_rel, "Epsilon as a fraction of the sup norm of a");
  witness->add_option("--probes", wa.probes, "Probe count")->check(CLI::PositiveNumber);
  witness->add_option("--max-n", wa.max_n, "Largest graph level tried (default 16)")
      ->check(CLI::PositiveNumber);
  witness->add_option("--out", wa.out_path, "JSON report output");
  witness->callback([&] { action = [&] { return cmd_witness(map_text, wa, common, out); }; });

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "Run the catalog checks");
  verify->add_option("example", va.example, "Catalog name, optionally name:parameter");
  verify->add_flag("--all", va.all, "Every catalog example");
  verify->add_option("--param", va.param, "Family parameter");
  verify->add_option("--cloud-size", va.cloud_size, "Julia sample size")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", va.out_path, "JSON report output");
  verify->callback([&] { action = [&] { return cmd_verify(va, common, out); }; });

  app.add_subcommand("list", "List the catalog")->callback([&] {
    action = [&] {
      for (const std::string& name : list_examples()) out << name << '\n';
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  set_max_threads(threads);
  try {
    return action();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const UnknownExample& e) {
    err << "unknown example: " << e.what() << '\n';
  } catch (const NotCoprime& e) {
    err << "invalid map: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ratdyn
