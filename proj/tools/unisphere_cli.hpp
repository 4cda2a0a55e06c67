#pragma once
// Command-line front end. All logic lives here so tests can drive it in-process;
// main.cpp only forwards argv and the standard streams.
//
// Exit codes: 0 success (or every check passed), 1 a check failed, 2 usage or input error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unisphere/unisphere.hpp"

namespace unisphere::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Input problems detected by the CLI itself (bad flag values, unreadable files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed "C" locale number formatting with 17 significant digits.
inline std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << (v + 0.0);
  return os.str();
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

/// `--norm` accepts inline JSON, `@path`, a bare path, or `-` for stdin.
inline NormSpec load_norm(const std::string& source, std::istream& in) {
  std::string text;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (source == "-") {
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    text = source;
  } else {
    const std::string path = !source.empty() && source[0] == '@' ? source.substr(1) : source;
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read norm file \"" + path + "\"");
    text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  return norm_from_string(text);
}

/// "a,b" -> Vec2.
inline Vec2 parse_point(const std::string& s, const char* flag) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double a = 0.0, b = 0.0;
  char comma = 0;
  if (!(is >> a >> comma >> b) || comma != ',' || !(is >> std::ws).eof() || !std::isfinite(a) || !std::isfinite(b))
    throw UsageError(std::string(flag) + " expects two numbers \"a,b\", got \"" + s + "\"");
  return {a, b};
}

struct Options {
  std::string norm;
  std::string x, y;
  double tol{kDefaultArcTol};
  std::uint64_t seed{0};
  std::size_t trials{1000};
  std::size_t budget{100};
  std::string format{"json"};
  std::string out;
  std::vector<std::string> suites{"all"};
  int facets{kDefaultJohnFacets};
  std::string family{"mixed"};
  std::size_t points{360};
  std::string what{"sphere"};
};

// --- subcommands: each writes its payload to `out` and returns an exit code ---

inline int cmd_distance(const Options& o, std::istream& in, std::ostream& out) {
  const NormSpec spec = load_norm(o.norm, in);
  const auto d = intrinsic_distance(spec, parse_point(o.x, "--x"), parse_point(o.y, "--y"), o.tol);
  if (o.format == "csv") {
    out << "value,lower,upper,segments,arc_choice\n"
        << fmt(d.value) << ',' << fmt(d.lower) << ',' << fmt(d.upper) << ',' << d.segments << ','
        << to_string(d.arc_choice) << '\n';
  } else {
    out << d.to_json().dump() << '\n';
  }
  return kExitOk;
}

inline int cmd_ratio(const Options& o, std::istream& in, std::ostream& out) {
  const NormSpec spec = load_norm(o.norm, in);
  const Vec2 x = parse_point(o.x, "--x"), y = parse_point(o.y, "--y");
  if (x == y) throw UsageError("ratio needs two distinct points");
  const auto d = intrinsic_distance(spec, x, y, o.tol);
  const double chord = spec(x - y);
  if (o.format == "csv") {
    out << "ratio,distance,chord\n" << fmt(d.value / chord) << ',' << fmt(d.value) << ',' << fmt(chord) << '\n';
  } else {
    out << Json{{"ratio", d.value / chord}, {"distance", d.value}, {"chord", chord}}.dump() << '\n';
  }
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::istream& in, std::ostream& out) {
  const NormSpec spec = load_norm(o.norm, in);
  for (const auto& s : o.suites)
    if (s != "all" && std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw UsageError("unknown suite \"" + s + "\"");
  const auto reports = run_suite(spec, o.suites, o.trials, o.seed);
  bool all = true;
  if (o.format == "csv") out << "name,passed,trials,evaluated,tolerance,worst_margin\n";
  for (const auto& r : reports) {
    all = all && r.passed();
    if (o.format == "csv")
      out << r.name << ',' << (r.passed() ? "true" : "false") << ',' << r.trials << ',' << r.evaluated << ','
          << fmt(r.tolerance) << ',' << (r.worst_margin ? fmt(*r.worst_margin) : std::string()) << '\n';
    else
      out << r.to_json().dump() << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

inline int cmd_john(const Options& o, std::istream& in, std::ostream& out) {
  const NormSpec spec = load_norm(o.norm, in);
  if (o.facets < 8) throw UsageError("--facets must be at least 8");
  const Ellipse e = inner_john_ellipse(spec, o.facets, std::min(o.tol, kDefaultJohnTol));
  const auto cert = verify_john(spec, e);
  const bool ok = cert.inner_ok && cert.outer_ok;
  if (o.format == "csv") {
    const Mat2 m = e.matrix();
    out << "m11,m12,m21,m22,inner_ok,outer_ok,worst_inner_margin,worst_outer_margin\n"
        << fmt(m.a) << ',' << fmt(m.b) << ',' << fmt(m.c) << ',' << fmt(m.d) << ',' << (cert.inner_ok ? "true" : "false")
        << ',' << (cert.outer_ok ? "true" : "false") << ',' << fmt(cert.worst_inner_margin) << ','
        << fmt(cert.worst_outer_margin) << '\n';
  } else {
    out << Json{{"ellipse", e.to_json()}, {"certificate", cert.to_json()}}.dump() << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

inline int cmd_search(const Options& o, std::ostream& out) {
  const auto family = parse_family(o.family);
  if (!family) throw UsageError("unknown family \"" + o.family + "\" (lp, polygon, ellipse, mixed)");
  if (o.budget < 1) throw UsageError("--budget must be at least 1");
  const auto r = ratio_search(*family, o.budget, o.seed);
  if (o.format == "csv") {
    out << "best_ratio,family,trials,x1,x2,y1,y2,norm\n"
        << fmt(r.best_ratio) << ',' << to_string(r.family) << ',' << r.trials << ',' << fmt(r.x.x) << ','
        << fmt(r.x.y) << ',' << fmt(r.y.x) << ',' << fmt(r.y.y) << ',' << csv_quote(to_json(r.norm).dump()) << '\n';
  } else {
    out << r.to_json().dump() << '\n';
  }
  return kExitOk;
}

/// Sphere points at theta_j = 2 pi j / n, or the n x n ratio grid over (theta_x, theta_y).
inline int cmd_export(const Options& o, std::istream& in, std::ostream& out) {
  const NormSpec spec = load_norm(o.norm, in);
  if (o.points < 1) throw UsageError("--points must be at least 1");
  const std::size_t n = o.points;
  auto theta = [n](std::size_t j) { return kTwoPi * double(j) / double(n); };
  const bool json = o.format == "json";
  if (o.what == "sphere") {
    Json rows = Json::array();
    if (!json) out << "theta,x,y\n";
    for (std::size_t j = 0; j < n; ++j) {
      const double t = theta(j);
      Vec2 p = sphere_point(spec, t);
      // Snap round-off on the axes so a square exports as exact corners and midpoints.
      if (std::abs(p.x) < 1e-15) p.x = 0.0;
      if (std::abs(p.y) < 1e-15) p.y = 0.0;
      if (json)
        rows.push_back(Json{{"theta", t}, {"x", p.x + 0.0}, {"y", p.y + 0.0}});
      else
        out << fmt(t) << ',' << fmt(p.x) << ',' << fmt(p.y) << '\n';
    }
    if (json) out << rows.dump() << '\n';
    return kExitOk;
  }
  if (o.what == "ratio-landscape") {
    if (n > 2048) throw UsageError("ratio-landscape is limited to 2048 points per axis");
    ArcOptions opt;
    opt.tol = o.tol;
    const ArcLengthTable arcs(spec, opt);
    Json rows = Json::array();
    if (!json) out << "theta_x,theta_y,ratio\n";
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 x = sphere_point(spec, theta(i));
      for (std::size_t j = 0; j < n; ++j) {
        // The diagonal holds the limit of the ratio as y -> x, which is 1.
        const double r = i == j ? 1.0 : arcs.ratio(x, sphere_point(spec, theta(j)));
        if (json)
          rows.push_back(Json{{"theta_x", theta(i)}, {"theta_y", theta(j)}, {"ratio", r}});
        else
          out << fmt(theta(i)) << ',' << fmt(theta(j)) << ',' << fmt(r) << '\n';
      }
    }
    if (json) out << rows.dump() << '\n';
    return kExitOk;
  }
  throw UsageError("--what must be sphere or ratio-landscape");
}

/// Runs the CLI on args (without the program name).
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intrinsic metric on the unit sphere of a planar normed space", "unisphere"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_norm = [&](CLI::App* c) { c->add_option("--norm", o.norm, "norm JSON, @file, path, or - for stdin")->required(); };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--out", o.out, "write output to this file instead of stdout");
  };
  auto add_tol = [&](CLI::App* c) {
    c->add_option("--tol", o.tol, "relative arc-length tolerance")->check(CLI::PositiveNumber);
  };

  auto* distance = app.add_subcommand("distance", "intrinsic distance between two points of the unit sphere");
  auto* ratio = app.add_subcommand("ratio", "intrinsic distance over chordal distance");
  for (auto* c : {distance, ratio}) {
    add_norm(c);
    c->add_option("--x", o.x, "first point, \"a,b\"")->required();
    c->add_option("--y", o.y, "second point, \"a,b\"")->required();
    add_tol(c);
    add_common(c);
  }

  auto* verify = app.add_subcommand("verify", "run property checks on a norm");
  add_norm(verify);
  verify->add_option("--suite", o.suites, "check names, or all")->delimiter(',');
  verify->add_option("--trials", o.trials, "trials per check");
  verify->add_option("--seed", o.seed, "random seed");
  add_common(verify);

  auto* john = app.add_subcommand("john", "maximum-area inscribed ellipse and its certificate");
  add_norm(john);
  john->add_option("--facets", o.facets, "sphere samples for non-polygonal balls");
  add_tol(john);
  add_common(john);

  auto* search = app.add_subcommand("search", "random search for the worst ratio");
  search->add_option("--family", o.family, "lp, polygon, ellipse or mixed");
  search->add_option("--budget", o.budget, "number of random restarts");
  search->add_option("--seed", o.seed, "random seed");
  add_common(search);

  auto* exp = app.add_subcommand("export", "sphere points or the ratio landscape as CSV");
  add_norm(exp);
  exp->add_option("--points", o.points, "samples per axis");
  exp->add_option("--what", o.what, "sphere or ratio-landscape");
  add_tol(exp);
  add_common(exp);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (exp->parsed() && !exp->count("--format")) o.format = "csv";

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    if (distance->parsed()) code = cmd_distance(o, in, buffer);
    else if (ratio->parsed()) code = cmd_ratio(o, in, buffer);
    else if (verify->parsed()) code = cmd_verify(o, in, buffer);
    else if (john->parsed()) code = cmd_john(o, in, buffer);
    else if (search->parsed()) code = cmd_search(o, buffer);
    else code = cmd_export(o, in, buffer);
  } catch (const ParseError& e) {
    err << "error: invalid norm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // InvalidNorm, DegenerateSection
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {  // points off the sphere
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {  // precondition violations
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {  // numerical non-convergence
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }

  if (o.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write \"" << o.out << "\"\n";
      return kExitUsage;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace unisphere::cli
