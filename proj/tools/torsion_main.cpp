// Command-line front end: evaluates Milnor determinant-line metrics, Ruelle
// zeta functions, surgery comparisons, and circle Ray-Singer norms on systems
// described by JSON files, and runs the randomized self-verification suites.
//
// Exit codes: 0 = success and all checks passed, 1 = numerical failure or a
// failed check, 2 = input error (bad file, bad schema, bad arguments).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "torsion/flow.hpp"
#include "torsion/io.hpp"
#include "torsion/rs_circle.hpp"
#include "torsion/selfcheck.hpp"
#include "torsion/zeta.hpp"

namespace {

using namespace torsion;

struct GlobalOptions {
  double tol = 1e-9;
  std::uint64_t seed = 7;
  std::string format = "json";
  int hurwitz_m = 50;
  int hurwitz_k = 6;

  HurwitzParams hurwitz() const {
    HurwitzParams p;
    p.m = hurwitz_m;
    p.k = hurwitz_k;
    return p;
  }
};

std::string read_file(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw InputError("cannot open file '" + path + "'");
  std::string out;
  char buf[1 << 14];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

void emit(const RunReport& report, const GlobalOptions& opt) {
  const std::string text =
      opt.format == "csv" ? report.to_csv() : report.to_json();
  std::fputs(text.c_str(), stdout);
}

std::string betti_string(const std::vector<int>& betti) {
  std::string out;
  for (std::size_t i = 0; i < betti.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(betti[i]);
  }
  return out;
}

int cmd_milnor(const std::string& path, const GlobalOptions& opt) {
  const std::string raw = read_file(path);
  const SystemFile file = parse_system_text(raw, opt.tol);
  const MetricedDetLine line = milnor_metric(file.system, opt.tol);
  RunReport report;
  report.command = "milnor";
  report.input_digest = digest_hex(raw);
  report.tol = opt.tol;
  report.pass = true;
  report.add("log_norm", line.log_norm);
  report.add("norm", std::exp(line.log_norm));
  report.add("betti", betti_string(line.betti));
  report.add("generator", line.generator);
  emit(report, opt);
  return 0;
}

int cmd_zeta(const std::string& path, double re, double im,
             const std::vector<double>& grid, const std::vector<double>& rect,
             const GlobalOptions& opt) {
  const std::string raw = read_file(path);
  const SystemFile file = parse_system_text(raw, opt.tol);
  const ZetaSpec spec = zeta_spec_of(file.system);

  if (!grid.empty()) {
    // Grid mode prints one CSV table and nothing else. At a regular point the
    // R columns hold the value and order_flag is 0; at a zero or pole they
    // hold the leading Laurent coefficient and order_flag the signed order.
    const int nre = static_cast<int>(grid[2]);
    const int nim = static_cast<int>(grid[5]);
    if (nre < 1 || nim < 1 || grid[2] != nre || grid[5] != nim)
      throw InputError("--grid counts must be positive integers");
    std::string out = "re_s,im_s,re_R,im_R,log_abs_R,order_flag\r\n";
    for (int i = 0; i < nre; ++i) {
      const double s_re =
          nre == 1 ? grid[0] : grid[0] + (grid[1] - grid[0]) * i / (nre - 1);
      for (int j = 0; j < nim; ++j) {
        const double s_im =
            nim == 1 ? grid[3] : grid[3] + (grid[4] - grid[3]) * j / (nim - 1);
        const ZetaValue v = ruelle_eval(spec, Scalar(s_re, s_im), opt.tol);
        out += format_float(s_re) + "," + format_float(s_im) + "," +
               format_float(v.leading.real()) + "," +
               format_float(v.leading.imag()) + "," +
               format_float(v.log_abs_leading) + "," +
               std::to_string(v.order) + "\r\n";
      }
    }
    std::fputs(out.c_str(), stdout);
    return 0;
  }

  RunReport report;
  report.command = "zeta";
  report.input_digest = digest_hex(raw);
  report.tol = opt.tol;
  report.pass = true;

  if (!rect.empty()) {
    const auto points =
        zeros_poles_in_rect(spec, rect[0], rect[1], rect[2], rect[3]);
    report.add("points", static_cast<int>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string key = "point_" + std::to_string(i);
      report.add(key + "_re", points[i].s.real());
      report.add(key + "_im", points[i].s.imag());
      report.add(key + "_order", points[i].order);
    }
  } else {
    const ZetaValue v = ruelle_eval(spec, Scalar(re, im), opt.tol);
    report.add("re_s", re);
    report.add("im_s", im);
    report.add("order", v.order);
    report.add("re_R", v.leading.real());
    report.add("im_R", v.leading.imag());
    report.add("log_abs_R", v.log_abs_leading);
  }
  emit(report, opt);
  return 0;
}

int cmd_franks_compare(const std::string& path, const GlobalOptions& opt) {
  const std::string raw = read_file(path);
  const SystemFile file = parse_system_text(raw, opt.tol);
  if (file.surgery.empty())
    throw InputError(path + ": franks-compare needs surgery data");
  const FranksComparison fc =
      compare_milnor(file.system, file.surgery, opt.tol);
  RunReport report;
  report.command = "franks-compare";
  report.input_digest = digest_hex(raw);
  report.tol = opt.tol;
  report.pass = fc.residual < opt.tol;
  report.add("lhs", fc.lhs);
  report.add("rhs", fc.rhs);
  report.add("residual", fc.residual);
  emit(report, opt);
  return report.pass ? 0 : 1;
}

int cmd_rs_circle(const std::string& path, const std::vector<double>& phases,
                  const GlobalOptions& opt) {
  std::optional<CircleRSSpec> spec;
  std::string digest_src;
  if (!phases.empty()) {
    spec = CircleRSSpec::from_phases(phases);
    digest_src = "phases:";
    for (double a : phases) digest_src += format_float(a) + ",";
  } else if (!path.empty()) {
    const std::string raw = read_file(path);
    const SystemFile file = parse_system_text(raw, opt.tol);
    const auto& elements = file.system.elements();
    if (elements.size() != 1 ||
        !std::holds_alternative<ClosedOrbitDatum>(elements[0]))
      throw InputError(path + ": rs-circle needs a single-orbit system");
    const auto& orbit = std::get<ClosedOrbitDatum>(elements[0]);
    if (orbit.index != 0 || orbit.twist != 1)
      throw InputError(path +
                       ": rs-circle needs an untwisted index-0 orbit");
    spec = CircleRSSpec::from_unitary(orbit.effective_holonomy());
    digest_src = raw;
  } else {
    throw InputError("rs-circle needs a system file or --phases");
  }
  const BzCircleCheck check = bz_check_circle(*spec, opt.hurwitz(), opt.tol);
  RunReport report;
  report.command = "rs-circle";
  report.input_digest = digest_hex(digest_src);
  report.tol = opt.tol;
  report.pass = check.residual < std::max(opt.tol, 1e-8);
  report.add("log_rs_norm_sq", check.log_rs_sq);
  report.add("log_milnor_norm_sq", check.log_milnor_sq);
  report.add("residual", check.residual);
  emit(report, opt);
  return report.pass ? 0 : 1;
}

int cmd_selfcheck(const GlobalOptions& opt) {
  const auto results = run_selfcheck(opt.seed);
  std::string out = "selfcheck seed " + std::to_string(opt.seed) + "\n";
  out += render_check_table(results);
  std::fputs(out.c_str(), stdout);
  return all_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "torsion: determinant-line metrics, Ruelle zeta functions, and "
      "Ray-Singer norms of Morse-Smale flow systems"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--tol", opt.tol, "numerical tolerance")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "seed for randomized suites")
      ->capture_default_str();
  app.add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--hurwitz-M", opt.hurwitz_m,
                 "Euler-Maclaurin shift for Hurwitz zeta")
      ->capture_default_str();
  app.add_option("--hurwitz-K", opt.hurwitz_k,
                 "Euler-Maclaurin correction order for Hurwitz zeta")
      ->capture_default_str();

  std::string milnor_path;
  CLI::App* milnor = app.add_subcommand(
      "milnor", "Milnor metric of a system's determinant line");
  milnor->fallthrough();
  milnor->add_option("file", milnor_path, "system JSON file")->required();

  std::string zeta_path;
  double zeta_re = 0.0;
  double zeta_im = 0.0;
  std::vector<double> zeta_grid;
  std::vector<double> zeta_rect;
  CLI::App* zeta =
      app.add_subcommand("zeta", "Ruelle zeta function of a system");
  zeta->fallthrough();
  zeta->add_option("file", zeta_path, "system JSON file")->required();
  zeta->add_option("--re", zeta_re, "Re s of the evaluation point")
      ->capture_default_str();
  zeta->add_option("--im", zeta_im, "Im s of the evaluation point")
      ->capture_default_str();
  zeta->add_option("--grid", zeta_grid,
                   "re0 re1 nre im0 im1 nim: evaluate on a grid, print CSV")
      ->expected(6);
  zeta->add_option("--rect", zeta_rect,
                   "re0 re1 im0 im1: list zeros/poles in the rectangle")
      ->expected(4);
  zeta->get_option("--grid")->excludes(zeta->get_option("--rect"));

  std::string franks_path;
  CLI::App* franks = app.add_subcommand(
      "franks-compare",
      "compare the Milnor metrics before and after orbit surgery");
  franks->fallthrough();
  franks->add_option("file", franks_path, "system JSON file with surgery data")
      ->required();

  std::string rs_path;
  std::vector<double> rs_phases;
  CLI::App* rs = app.add_subcommand(
      "rs-circle",
      "Ray-Singer vs Milnor norm for a rotation system on the circle");
  rs->fallthrough();
  rs->add_option("file", rs_path, "single-orbit system JSON file");
  rs->add_option("--phases", rs_phases,
                 "holonomy eigenphases in (0,1), instead of a file")
      ->delimiter(',');

  CLI::App* selfcheck = app.add_subcommand(
      "selfcheck", "run every verification suite with a fixed seed");
  selfcheck->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (milnor->parsed()) return cmd_milnor(milnor_path, opt);
    if (zeta->parsed())
      return cmd_zeta(zeta_path, zeta_re, zeta_im, zeta_grid, zeta_rect, opt);
    if (franks->parsed()) return cmd_franks_compare(franks_path, opt);
    if (rs->parsed()) return cmd_rs_circle(rs_path, rs_phases, opt);
    if (selfcheck->parsed()) return cmd_selfcheck(opt);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
