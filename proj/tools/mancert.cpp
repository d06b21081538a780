#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "demos.hpp"
#include "mancert/json_io.hpp"
#include "mancert/prover.hpp"

namespace fs = std::filesystem;
using mc::Box;
using mc::Interval;
using mc::Point;
namespace pv = mc::prover;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInconclusive = 2, kNotVerified = 3 };

struct RunConfig {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  bool verbose = false;
  std::string mu;
  std::string demo;
};

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

pv::ProofConfig load_config(const RunConfig& rc) {
  pv::ProofConfig cfg;
  if (!rc.config_path.empty()) {
    std::ifstream in(rc.config_path);
    if (!in) throw mc::ConfigError("cannot open config file " + rc.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw mc::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = pv::config_from_json(j);
  }
  cfg.threads = rc.threads;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const RunConfig& rc) {
  const fs::path dir(rc.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw mc::ConfigError("output directory " + rc.out_dir + " unusable");
  const fs::path probe = dir / ".mancert_probe";
  {
    std::ofstream p(probe);
    if (!p) throw mc::ConfigError("output directory " + rc.out_dir + " is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw mc::ConfigError("cannot write " + path.string());
  os << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int cmd_l1(const RunConfig& rc) {
  if (rc.mu.empty()) throw mc::ConfigError("--mu is required");
  const Interval mu = mc::from_decimal(rc.mu);
  const mc::rtbp::RtbpParams p(mu);
  const mc::IVector l1 = mc::rtbp::libration_L1(p);
  std::cout.precision(17);
  std::cout << "mu       " << mu << "\n";
  std::cout << "L1       " << l1 << "\n";
  std::cout << "L1 width " << mc::max_width(l1) << "\n";
  const auto chart = mc::rtbp::jordan_basis(p);
  std::cout << "gamma    " << chart.gamma << "\n";
  std::cout << "lambda   " << chart.lambda << "\n";
  std::cout << "v        " << chart.v << "\n";
  const mc::IMatrix res = mc::rtbp::jordan_residual(chart);
  double off = 0.0;
  bool pattern = true;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const bool on = (i == j && i < 2) || (i == 2 && j == 3) || (i == 3 && j == 2);
      if (on) continue;
      off = std::max(off, res(i, j).mag());
      pattern = pattern && res(i, j).contains_zero();
    }
  }
  std::cout << "chart residual: off-pattern max |entry| " << off
            << (pattern ? " (all contain 0)" : " (some exclude 0)") << "\n";
  if (rc.verbose) std::cout << "C⁻¹·DF(L1)·C =\n" << res << "\n";
  return pattern ? kOk : kInconclusive;
}

void write_u_row(std::ostream& os, const std::string& side, const std::string& system,
                 const Box& b) {
  os << side << ',' << system;
  for (const Interval& x : b) os << ',' << num(x.lo()) << ',' << num(x.hi());
  os << '\n';
}

constexpr const char* kUHeader = "side,system,c0_lo,c0_hi,c1_lo,c1_hi,c2_lo,c2_hi,c3_lo,c3_hi\n";

int cmd_manifold(const RunConfig& rc) {
  const pv::ProofConfig cfg = load_config(rc);
  const fs::path dir = out_dir(rc);
  std::ostringstream csv;
  csv << kUHeader;
  nlohmann::json doc;
  bool verified = true;

  if (cfg.model == pv::Model::Linear) {
    const mc::FlowConeConstants cones = pv::linear_model_cones(cfg);
    const Box b(4, Interval(0.0));
    const Box n = pv::build_N(b, cfg.r_u, cfg.alpha_h);
    const Box u = pv::build_U(b, cfg.r_u, cfg.alpha_h, cfg.alpha_v);
    doc = {{"model", "linear"}, {"cones", cones}, {"N", n}, {"U", u}, {"certificate", nullptr}};
    if (cones.verified()) {
      doc["certificate"] = mc::certify(mc::ManifoldKind::FlowUnstable, cones, n, b, 1);
    }
    verified = cones.verified();
    write_u_row(csv, "linear", "local", u);
  } else {
    nlohmann::json sides = nlohmann::json::object();
    for (const auto& [name, mu] : {std::pair{"left", cfg.mu_left}, std::pair{"right", cfg.mu_right}}) {
      const pv::LocalStage s = pv::local_stage(mu, cfg, cfg.n_subdivisions);
      sides[name] = s;
      verified = verified && s.certificate.has_value();
      write_u_row(csv, name, "local", s.u_local);
      write_u_row(csv, name, "original", s.u_original);
      if (rc.verbose) {
        std::cerr << name << ": cones " << (s.cones.verified() ? "verified" : "not verified")
                  << ", DF(N) =\n"
                  << s.dfn << "\n";
      }
    }
    doc = {{"model", "pcr3bp"}, {"config", cfg}, {"endpoints", sides}};
  }
  doc["verified"] = verified;
  write_file(dir / "certificate.json", dump(doc));
  write_file(dir / "u_boxes.csv", csv.str());
  std::cout << (verified ? "VERIFIED" : "NOT VERIFIED") << " (certificate.json, u_boxes.csv in "
            << dir.string() << ")\n";
  return verified ? kOk : kNotVerified;
}

// Floating-point orbit from the centre of U at the middle of the parameter
// interval to {Y = 0}, plus its S-reflection. Illustration only.
struct Orbit {
  std::vector<double> t;
  std::vector<Point> x;
  std::vector<int> reflected;
  double mu = 0.0;
};

Orbit shoot_orbit(const pv::ProofConfig& cfg) {
  Orbit o;
  o.mu = 0.5 * (cfg.mu_left.mid() + cfg.mu_right.mid());
  const auto chart = pv::make_chart(Interval(o.mu));
  const Point q{cfg.r_u * std::sqrt(1.0 - cfg.alpha_v), 0.0, 0.0, 0.0};
  const Point x0 = mc::rtbp::phi(chart, q);
  const mc::Tape tape = mc::rtbp::field_tape(Interval(o.mu));
  mc::IntegratorOptions opt;
  opt.order = cfg.taylor_order;
  opt.h_max = 0.01;
  const auto hit = mc::point_crossing(tape, x0, mc::Section{1, 0.0, 1}, opt, cfg.max_time);
  if (!hit) return o;
  const auto& path = hit->path;
  const double T = hit->time;
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    o.t.push_back(path.t[i]);
    o.x.push_back(path.x[i]);
    o.reflected.push_back(0);
  }
  for (std::size_t k = path.t.size() - 1; k-- > 0;) {
    o.t.push_back(2 * T - path.t[k]);
    o.x.push_back(mc::rtbp::symmetry_S(path.x[k]));
    o.reflected.push_back(1);
  }
  return o;
}

std::string orbit_csv(const Orbit& o) {
  std::ostringstream os;
  os << "# non-rigorous floating-point trajectory for illustration, mu=" << num(o.mu) << "\n";
  os << "t,X,Y,P_X,P_Y,Xdot,Ydot,reflected\n";
  for (std::size_t i = 0; i < o.t.size(); ++i) {
    const Point& s = o.x[i];
    os << num(o.t[i]) << ',' << num(s[0]) << ',' << num(s[1]) << ',' << num(s[2]) << ','
       << num(s[3]) << ',' << num(s[2] + s[1]) << ',' << num(s[3] - s[0]) << ','
       << o.reflected[i] << '\n';
  }
  return os.str();
}

std::string orbit_svg(const Orbit& o, double l1_x) {
  double x0 = l1_x, x1 = l1_x, y0 = 0.0, y1 = 0.0;
  for (const Point& s : o.x) {
    x0 = std::min(x0, s[0]);
    x1 = std::max(x1, s[0]);
    y0 = std::min(y0, s[1]);
    y1 = std::max(y1, s[1]);
  }
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-3;
  x0 -= pad;
  x1 += pad;
  y0 -= pad;
  y1 += pad;
  const double w = 640.0;
  const double scale = w / (x1 - x0);
  const double h = (y1 - y0) * scale;
  const auto px = [&](double x) { return num(std::round((x - x0) * scale * 100) / 100); };
  const auto py = [&](double y) { return num(std::round((y1 - y) * scale * 100) / 100); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << num(std::ceil(h) + 40) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"8\" y=\"" << num(std::ceil(h) + 28)
     << "\" font-family=\"sans-serif\" font-size=\"12\">Homoclinic orbit to L1 in (X, Y), mu="
     << num(o.mu)
     << ". Non-rigorous floating-point trajectory (illustration only; the proof is in "
        "report.json).</text>\n";
  // Forward branch solid; the S-reflected branch dashed, joined at the section.
  std::size_t split = 0;
  while (split < o.x.size() && !o.reflected[split]) ++split;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t from = pass == 0 ? 0 : split - 1;
    const std::size_t to = pass == 0 ? split : o.x.size();
    os << "<polyline fill=\"none\" stroke=\"green\" stroke-width=\"1.5\""
       << (pass == 1 ? " stroke-dasharray=\"4 2\"" : "") << " points=\"";
    for (std::size_t i = from; i < to; ++i) {
      os << px(o.x[i][0]) << ',' << py(o.x[i][1]) << ' ';
    }
    os << "\"/>\n";
  }
  os << "<circle cx=\"" << px(l1_x) << "\" cy=\"" << py(0.0)
     << "\" r=\"3\" fill=\"black\"/><text x=\"" << px(l1_x) << "\" y=\"" << py(0.0)
     << "\" dx=\"5\" dy=\"-5\" font-family=\"sans-serif\" font-size=\"12\">L1</text>\n";
  const double planet = o.mu - 1.0;
  if (planet > x0 && planet < x1) {
    os << "<circle cx=\"" << px(planet) << "\" cy=\"" << py(0.0)
       << "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string enclosures_csv(const pv::ProofReport& r, const pv::ProofConfig& cfg) {
  std::ostringstream os;
  os << "side,t_lo,t_hi,X_lo,X_hi,Y_lo,Y_hi,P_X_lo,P_X_hi,P_Y_lo,P_Y_hi,mu_lo,mu_hi\n";
  for (const auto& [name, stage] : {std::pair{"left", &r.left}, std::pair{"right", &r.right}}) {
    if (!*stage) continue;
    std::vector<mc::StepRecord> trace;
    pv::poincare_image(**stage, cfg, 1, &trace);
    std::ostringstream body;
    mc::write_enclosures_csv(body, trace, {"X", "Y", "P_X", "P_Y", "mu"});
    std::istringstream lines(body.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) os << name << ',' << line << '\n';
  }
  return os.str();
}

int cmd_homoclinic(const RunConfig& rc) {
  const pv::ProofConfig cfg = load_config(rc);
  const fs::path dir = out_dir(rc);
  const pv::ProofReport r = pv::check_homoclinic(cfg);
  write_file(dir / "report.json", dump(r));
  write_file(dir / "enclosures.csv", enclosures_csv(r, cfg));
  const Orbit o = shoot_orbit(cfg);
  if (!o.x.empty()) {
    const double l1_x = r.left ? r.left->chart.l1[0].mid() : o.x.front()[0];
    write_file(dir / "orbit.csv", orbit_csv(o));
    write_file(dir / "orbit.svg", orbit_svg(o, l1_x));
  } else if (rc.verbose) {
    std::cerr << "floating-point orbit did not reach the section\n";
  }
  std::cout << pv::render_text(r);
  return r.verdict == pv::Verdict::Proved ? kOk : kNotVerified;
}

int cmd_demo(const RunConfig& rc) {
  const auto results = mc::demos::run(rc.demo);
  bool all = true;
  for (const auto& c : results) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    all = all && c.passed;
  }
  return all ? kOk : kNotVerified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mancert: cone-condition manifold certificates and the PCR3BP homoclinic proof"};
  app.require_subcommand(1);
  RunConfig rc;
  const auto common = [&rc](CLI::App* sub) {
    sub->add_option("--config", rc.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", rc.out_dir, "output directory");
    sub->add_option("--threads", rc.threads, "worker threads")->check(CLI::Range(1, 256));
    sub->add_flag("--verbose", rc.verbose, "print intermediate data");
  };
  auto* l1 = app.add_subcommand("l1", "L1 enclosure, eigenvalues and chart residual");
  l1->add_option("--mu", rc.mu, "mass parameter as a decimal literal")->required();
  l1->add_flag("--verbose", rc.verbose, "print the residual matrix");
  auto* manifold = app.add_subcommand("manifold", "certify the local unstable manifold");
  common(manifold);
  auto* homoclinic = app.add_subcommand("homoclinic", "run the full homoclinic proof");
  common(homoclinic);
  auto* demo = app.add_subcommand("demo", "toy examples");
  demo->add_option("name", rc.demo, "toymap, graphtransform or gronwall")
      ->required()
      ->check(CLI::IsMember({"toymap", "graphtransform", "gronwall"}));
  demo->add_flag("--verbose", rc.verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*l1) return cmd_l1(rc);
    if (*manifold) return cmd_manifold(rc);
    if (*homoclinic) return cmd_homoclinic(rc);
    if (*demo) return cmd_demo(rc);
  } catch (const mc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const mc::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const mc::Inconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const mc::Error& e) {
    std::cerr << "inconclusive numerics: " << e.what() << "\n";
    return kInconclusive;
  }
  return kUsage;
}
