#include "mancert/prover.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "mancert/json_io.hpp"
#include "mancert/linalg.hpp"

namespace mc::prover {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool in_unit_open(double a) { return a > 0.0 && a < 1.0; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

}  // namespace

void ProofConfig::validate() const {
  if (!in_unit_open(alpha_h) || !in_unit_open(alpha_v)) {
    throw ConfigError("alpha_h and alpha_v must lie in (0, 1)");
  }
  if (!(r_u > 0.0)) throw ConfigError("r_u must be positive");
  if (!(c_v > c_h)) throw ConfigError("c_v must exceed c_h");
  if (n_subdivisions < 1 || fragment_subdivisions < 1 || mu_fragments < 1) {
    throw ConfigError("subdivision counts must be positive");
  }
  if (taylor_order < 1 || taylor_order > 60) throw ConfigError("taylor_order must be in [1, 60]");
  if (!(step_tolerance > 0.0) || !(max_time > 0.0)) {
    throw ConfigError("step_tolerance and max_time must be positive");
  }
  if (threads < 1) throw ConfigError("threads must be positive");
  if (model == Model::Linear) {
    if (eigenvalues.size() < 2) throw ConfigError("linear model needs at least two eigenvalues");
    return;
  }
  if (!(mu_left.hi() < mu_right.lo())) throw ConfigError("mu_left must be below mu_right");
  if (!(mu_left.lo() > 0.0 && mu_right.hi() < 1.0)) {
    throw ConfigError("mass parameters must lie in (0, 1)");
  }
}

ProofConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ProofConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") {
        const auto m = value.get<std::string>();
        if (m == "pcr3bp") {
          c.model = Model::Pcr3bp;
        } else if (m == "linear") {
          c.model = Model::Linear;
        } else {
          throw ConfigError("unknown model '" + m + "'");
        }
      } else if (key == "mu_left" || key == "mu_right") {
        if (!value.is_string()) {
          throw ConfigError(key + " must be a decimal string such as \"0.0042\"");
        }
        const auto text = value.get<std::string>();
        Interval x;
        try {
          x = from_decimal(text);
        } catch (const Error&) {
          throw ConfigError(key + " is not a decimal literal: " + text);
        }
        (key == "mu_left" ? c.mu_left_text : c.mu_right_text) = text;
        (key == "mu_left" ? c.mu_left : c.mu_right) = x;
      } else if (key == "alpha_h") {
        c.alpha_h = value.get<double>();
      } else if (key == "alpha_v") {
        c.alpha_v = value.get<double>();
      } else if (key == "r_u") {
        c.r_u = value.get<double>();
      } else if (key == "c_h") {
        c.c_h = value.get<double>();
      } else if (key == "c_v") {
        c.c_v = value.get<double>();
      } else if (key == "n_subdivisions") {
        c.n_subdivisions = value.get<int>();
      } else if (key == "mu_fragments") {
        c.mu_fragments = value.get<int>();
      } else if (key == "fragment_subdivisions") {
        c.fragment_subdivisions = value.get<int>();
      } else if (key == "taylor_order") {
        c.taylor_order = value.get<int>();
      } else if (key == "step_tolerance") {
        c.step_tolerance = value.get<double>();
      } else if (key == "max_time") {
        c.max_time = value.get<double>();
      } else if (key == "eigenvalues") {
        c.eigenvalues = value.get<std::vector<double>>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
  c.validate();
  return c;
}

void to_json(nlohmann::json& j, const ProofConfig& c) {
  j = {{"model", c.model == Model::Linear ? "linear" : "pcr3bp"},
       {"alpha_h", c.alpha_h},
       {"alpha_v", c.alpha_v},
       {"r_u", c.r_u},
       {"c_h", c.c_h},
       {"c_v", c.c_v},
       {"n_subdivisions", c.n_subdivisions},
       {"mu_fragments", c.mu_fragments},
       {"fragment_subdivisions", c.fragment_subdivisions},
       {"taylor_order", c.taylor_order},
       {"step_tolerance", c.step_tolerance},
       {"max_time", c.max_time}};
  if (c.model == Model::Linear) {
    j["eigenvalues"] = c.eigenvalues;
  } else {
    j["mu_left"] = c.mu_left_text;
    j["mu_right"] = c.mu_right_text;
  }
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(error_lock);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

rtbp::LocalChart make_chart(const Interval& mu) {
  return rtbp::jordan_basis(rtbp::RtbpParams(mu));
}

Box enclose_fixed_point(const rtbp::LocalChart& chart) {
  const rtbp::RtbpParams p(chart.mu);
  // Floating-point Newton from the origin for the centre of the box.
  Point x0(4, 0.0);
  for (int it = 0; it < 8; ++it) {
    const Point f = rtbp::local_field(x0, chart, chart.mu.mid());
    const std::vector<double> jm =
        mid(rtbp::local_jacobian(IVector::from_point(x0), chart, p));
    Eigen::Matrix4d a;
    Eigen::Vector4d b;
    for (int r = 0; r < 4; ++r) {
      b(r) = f[static_cast<std::size_t>(r)];
      for (int c = 0; c < 4; ++c) a(r, c) = jm[static_cast<std::size_t>(4 * r + c)];
    }
    const Eigen::Vector4d step = a.partialPivLu().solve(b);
    for (int r = 0; r < 4; ++r) x0[static_cast<std::size_t>(r)] -= step(r);
  }
  const double rad = 1e-9 + 1e2 * max_width(chart.l1);
  Box x(4);
  for (std::size_t i = 0; i < 4; ++i) x[i] = Interval(x0[i] - rad, x0[i] + rad);
  const auto f = [&](const Box& q) { return rtbp::local_field(q, chart, p); };
  const auto df = [&](const Box& q) { return rtbp::local_jacobian(q, chart, p); };
  const NewtonResult r = interval_newton(f, df, x, x0);
  if (r.verdict != NewtonVerdict::UniqueRoot || !r.root_box) {
    throw Inconclusive(std::string("fixed point Newton: ") + to_string(r.verdict));
  }
  return *r.root_box;
}

Box build_N(const Box& b, double r_u, double alpha_h) {
  if (b.size() < 2) throw DomainError("fixed point box needs a stable part");
  const Interval side = Interval(r_u) * sqrt(Interval(alpha_h));
  Box n(b.size());
  n[0] = b[0] + Interval(0.0, r_u);
  for (std::size_t i = 1; i < b.size(); ++i) n[i] = b[i] + Interval(-side.hi(), side.hi());
  return n;
}

IMatrix enclose_DF_over_N(const Box& n, const rtbp::LocalChart& chart, int pieces,
                          int threads) {
  if (pieces < 1 || pieces > 1024) throw DomainError("subdivision count must be in [1, 1024]");
  const rtbp::RtbpParams p(chart.mu);
  const auto k = static_cast<std::size_t>(pieces);
  // k³ slabs along the unstable axis, processed in k² chunks of k slabs.
  const auto slabs = subdivide(n, 0, k * k * k);
  std::vector<IMatrix> part(k * k);
  parallel_for(part.size(), threads, [&](std::size_t c) {
    IMatrix acc = rtbp::local_jacobian(slabs[c * k], chart, p);
    for (std::size_t i = 1; i < k; ++i) {
      acc = hull(acc, rtbp::local_jacobian(slabs[c * k + i], chart, p));
    }
    part[c] = acc;
  });
  IMatrix out = part[0];
  for (std::size_t c = 1; c < part.size(); ++c) out = hull(out, part[c]);
  return out;
}

Box build_U(const Box& b, double r_u, double alpha_h, double alpha_v) {
  const Interval r(r_u);
  const Interval side = r * sqrt(Interval(alpha_h));
  Box u(b.size());
  u[0] = b[0] + r * sqrt(Interval(1.0) - Interval(alpha_v));
  for (std::size_t i = 1; i < b.size(); ++i) u[i] = b[i] + Interval(-side.hi(), side.hi());
  return u;
}

LocalStage local_stage(const Interval& mu, const ProofConfig& cfg, int pieces) {
  LocalStage s;
  s.mu = mu;
  s.chart = make_chart(mu);
  s.fixed_point = enclose_fixed_point(s.chart);
  s.n_box = build_N(s.fixed_point, cfg.r_u, cfg.alpha_h);
  s.dfn = enclose_DF_over_N(s.n_box, s.chart, pieces, cfg.threads);
  s.cones = flow_cone_check(FlowBlocks::split(s.dfn, 1), cfg.alpha_h, cfg.alpha_v, cfg.c_h,
                            cfg.c_v);
  if (s.cones.verified()) {
    try {
      s.certificate =
          certify(ManifoldKind::FlowUnstable, s.cones, s.n_box, s.fixed_point, 1);
    } catch (const Error&) {
    }
  }
  s.u_local = build_U(s.fixed_point, cfg.r_u, cfg.alpha_h, cfg.alpha_v);
  s.u_original = rtbp::phi(s.chart, s.u_local);
  return s;
}

FlowEnclosure initial_set(const rtbp::LocalChart& chart, const Box& u) {
  if (u.size() != 4) throw DomainError("local box must have four coordinates");
  // Φ(U) ⊆ Φ(q) + DΦ(U)(U − q) with q the centre of U.
  const Point q = mid(u);
  const IVector at_q = rtbp::phi(chart, IVector::from_point(q));
  const IMatrix d = rtbp::dphi(chart, u);
  const std::vector<double> dm = mid(d);
  const Box r0 = u - IVector::from_point(q);
  const IVector spill = (d - IMatrix::from_point(4, 4, dm)) * r0;

  const Point m4 = mid(at_q);
  Point m(m4);
  m.push_back(chart.mu.mid());
  std::vector<double> c(25, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) c[5 * i + j] = dm[4 * i + j];
  c[24] = 1.0;
  Box init(5);
  for (std::size_t i = 0; i < 4; ++i) init[i] = r0[i];
  init[4] = chart.mu - Interval(m[4]);
  FlowEnclosure e = FlowEnclosure::from_affine(m, std::move(c), init);
  for (std::size_t i = 0; i < 4; ++i) e.remainder[i] = spill[i] + (at_q[i] - Interval(m4[i]));
  return e;
}

SectionImage poincare_image(const LocalStage& s, const ProofConfig& cfg, int pieces,
                            std::vector<StepRecord>* trace) {
  SectionImage out;
  out.mu = s.mu;
  const Tape field = rtbp::field_tape_with_mu();
  IntegratorOptions opt;
  opt.order = cfg.taylor_order;
  opt.tolerance = cfg.step_tolerance;
  try {
    std::optional<Box> image;
    std::optional<Interval> time;
    for (const Box& piece : subdivide(s.u_local, 0, static_cast<std::size_t>(pieces))) {
      const FlowEnclosure e = initial_set(s.chart, piece);
      const CrossingResult r = poincare_crossing(field, e, {1, 0.0, 1}, opt, cfg.max_time, trace);
      Box img(4);
      for (std::size_t i = 0; i < 4; ++i) img[i] = r.image[i];
      image = image ? hull(*image, img) : img;
      time = time ? hull(*time, r.time) : r.time;
      out.steps += r.steps;
    }
    out.image = *image;
    out.time = *time;
    out.certified = true;
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

FlowConeConstants linear_model_cones(const ProofConfig& cfg) {
  const std::size_t n = cfg.eigenvalues.size();
  IMatrix df(n, n);
  for (std::size_t i = 0; i < n; ++i) df(i, i) = Interval(cfg.eigenvalues[i]);
  return flow_cone_check(FlowBlocks::split(df, 1), cfg.alpha_h, cfg.alpha_v, cfg.c_h, cfg.c_v);
}

namespace {

FragmentResult run_fragment(const Interval& mu, const ProofConfig& cfg) {
  FragmentResult f;
  f.mu = mu;
  ProofConfig inner = cfg;
  inner.threads = 1;
  for (int attempt = 0; attempt < 2; ++attempt) {
    f.retried = attempt > 0;
    const int pieces = cfg.fragment_subdivisions << attempt;
    try {
      const LocalStage s = local_stage(mu, inner, pieces);
      f.cones_verified = s.certificate.has_value();
      if (!f.cones_verified) {
        f.failure = "cone conditions not verified";
        continue;
      }
      const SectionImage img = poincare_image(s, inner, 1 << attempt);
      f.crossing_certified = img.certified;
      if (!img.certified) {
        f.failure = img.failure;
        continue;
      }
      f.px = img.image[2];
      f.failure.clear();
      return f;
    } catch (const Error& e) {
      f.failure = e.what();
    }
  }
  return f;
}

struct StageTimer {
  std::vector<StageResult>& out;
  std::string name;
  Clock::time_point t0 = Clock::now();

  void done(bool ok, std::string detail = {}) {
    out.push_back({name, ok, std::move(detail), seconds_since(t0)});
  }
};

std::optional<LocalStage> endpoint_stage(const Interval& mu, const ProofConfig& cfg,
                                         const std::string& tag,
                                         std::vector<StageResult>& stages) {
  LocalStage s;
  s.mu = mu;
  try {
    StageTimer t{stages, tag + ": fixed point"};
    s.chart = make_chart(mu);
    s.fixed_point = enclose_fixed_point(s.chart);
    t.done(true, "max width " + fmt("%.3g", max_width(s.fixed_point)));
  } catch (const Error& e) {
    stages.push_back({tag + ": fixed point", false, e.what(), 0.0});
    return std::nullopt;
  }
  s.n_box = build_N(s.fixed_point, cfg.r_u, cfg.alpha_h);
  try {
    StageTimer t{stages, tag + ": DF(N)"};
    s.dfn = enclose_DF_over_N(s.n_box, s.chart, cfg.n_subdivisions, cfg.threads);
    t.done(true, std::to_string(cfg.n_subdivisions) + "^3 slabs along the unstable axis");
  } catch (const Error& e) {
    stages.push_back({tag + ": DF(N)", false, e.what(), 0.0});
    return std::nullopt;
  }
  {
    StageTimer t{stages, tag + ": cones"};
    s.cones = flow_cone_check(FlowBlocks::split(s.dfn, 1), cfg.alpha_h, cfg.alpha_v, cfg.c_h,
                              cfg.c_v);
    std::string detail;
    if (s.cones.verified()) {
      try {
        s.certificate =
            certify(ManifoldKind::FlowUnstable, s.cones, s.n_box, s.fixed_point, 1);
      } catch (const Error& e) {
        detail = e.what();
      }
    } else {
      detail = "flow cone conditions fail";
    }
    t.done(s.certificate.has_value(), detail);
  }
  {
    StageTimer t{stages, tag + ": U transport"};
    s.u_local = build_U(s.fixed_point, cfg.r_u, cfg.alpha_h, cfg.alpha_v);
    s.u_original = rtbp::phi(s.chart, s.u_local);
    t.done(true);
  }
  return s;
}

}  // namespace

ProofReport check_homoclinic(const ProofConfig& cfg) {
  cfg.validate();
  if (cfg.model != Model::Pcr3bp) throw ConfigError("check_homoclinic needs the pcr3bp model");
  ProofReport r;
  r.config = cfg;
  r.left = endpoint_stage(cfg.mu_left, cfg, "left", r.stages);
  r.right = endpoint_stage(cfg.mu_right, cfg, "right", r.stages);

  const auto sign_stage = [&](const std::optional<LocalStage>& s, const std::string& tag,
                              bool negative, std::optional<SectionImage>& img) {
    StageTimer t{r.stages, tag + ": Poincare sign"};
    if (!s || !s->certificate) {
      t.done(false, "no certified U");
      return;
    }
    img = poincare_image(*s, cfg);
    if (!img->certified) {
      t.done(false, img->failure);
      return;
    }
    const Interval px = img->image[2];
    const bool ok = negative ? px.certainly_negative() : px.certainly_positive();
    t.done(ok, "P_X in " + to_string(px));
  };
  sign_stage(r.left, "left", true, r.left_image);
  sign_stage(r.right, "right", false, r.right_image);

  {
    StageTimer t{r.stages, "fragments"};
    const auto n = static_cast<std::size_t>(cfg.mu_fragments);
    const double a = cfg.mu_left.lo(), b = cfg.mu_right.hi();
    std::vector<double> cut(n + 1);
    for (std::size_t i = 0; i <= n; ++i) cut[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    cut[0] = a;
    cut[n] = b;
    r.fragments.resize(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      r.fragments[i] = run_fragment(Interval(cut[i], cut[i + 1]), cfg);
    });
    std::size_t good = 0;
    for (const auto& f : r.fragments) good += f.cones_verified && f.crossing_certified;
    t.done(good == n, std::to_string(good) + "/" + std::to_string(n) + " certified");
  }

  r.verdict = Verdict::Proved;
  for (const auto& s : r.stages) {
    if (!s.verified) {
      r.verdict = Verdict::NotProved;
      r.reason = s.name + (s.detail.empty() ? "" : ": " + s.detail);
      break;
    }
  }
  return r;
}

namespace {

bool recheck_side(const nlohmann::json& side, const nlohmann::json& image,
                  const ProofConfig& cfg, bool negative) {
  if (side.is_null() || image.is_null()) return false;
  const auto dfn = side.at("DFN").get<IMatrix>();
  const auto cones = flow_cone_check(FlowBlocks::split(dfn, 1), cfg.alpha_h, cfg.alpha_v,
                                     cfg.c_h, cfg.c_v);
  if (!cones.verified()) return false;
  if (!image.at("certified").get<bool>()) return false;
  const auto img = image.at("image").get<Box>();
  if (!(img[1] == Interval(0.0))) return false;
  // B ⊆ N and U ⊆ N in local coordinates.
  const auto b = side.at("fixed_point").get<Box>();
  const auto n = side.at("N").get<Box>();
  const auto u = side.at("U_local").get<Box>();
  if (!subset_of(b, n) || !subset_of(u, n)) return false;
  return negative ? img[2].certainly_negative() : img[2].certainly_positive();
}

}  // namespace

bool recheck_report(const nlohmann::json& report) {
  try {
    const ProofConfig cfg = config_from_json(report.at("config"));
    if (report.at("verdict").get<std::string>() != "PROVED") return false;
    if (!recheck_side(report.at("left"), report.at("left_image"), cfg, true)) return false;
    if (!recheck_side(report.at("right"), report.at("right_image"), cfg, false)) return false;
    const auto& frags = report.at("fragments");
    if (frags.size() != static_cast<std::size_t>(cfg.mu_fragments)) return false;
    double reach = cfg.mu_left.lo();
    for (const auto& f : frags) {
      if (!f.at("cones_verified").get<bool>() || !f.at("crossing_certified").get<bool>()) {
        return false;
      }
      const auto mu = f.at("mu").get<Interval>();
      if (mu.lo() > reach) return false;
      reach = std::max(reach, mu.hi());
    }
    return reach >= cfg.mu_right.hi();
  } catch (const std::exception&) {
    return false;
  }
}

const char* to_string(Verdict v) { return v == Verdict::Proved ? "PROVED" : "NOT_PROVED"; }

void to_json(nlohmann::json& j, const LocalStage& s) {
  j = {{"mu", s.mu},
       {"L1", s.chart.l1},
       {"chart", s.chart},
       {"fixed_point", s.fixed_point},
       {"N", s.n_box},
       {"DFN", s.dfn},
       {"cones", s.cones},
       {"certificate", nullptr},
       {"U_local", s.u_local},
       {"U_original", s.u_original},
       {"U_note", "unstable coordinate keeps the full width of B (" +
                      fmt("%.3g", s.fixed_point[0].width()) + ")"}};
  if (s.certificate) j["certificate"] = *s.certificate;
}

void to_json(nlohmann::json& j, const SectionImage& s) {
  j = {{"mu", s.mu}, {"certified", s.certified}, {"steps", s.steps}};
  if (s.certified) {
    j["image"] = s.image;
    j["time"] = s.time;
  } else {
    j["failure"] = s.failure;
  }
}

void to_json(nlohmann::json& j, const FragmentResult& f) {
  j = {{"mu", f.mu},
       {"cones_verified", f.cones_verified},
       {"crossing_certified", f.crossing_certified},
       {"retried", f.retried}};
  if (f.crossing_certified) j["P_X"] = f.px;
  if (!f.failure.empty()) j["failure"] = f.failure;
}

void to_json(nlohmann::json& j, const ProofReport& r) {
  j = nlohmann::json::object();
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  j["config"] = r.config;
  j["homoclinic_parameter_interval"] = {r.config.mu_left_text, r.config.mu_right_text};
  j["scaling"] =
      "local coordinates scaled uniformly by r_u: N = B + r_u([0,1] x [-sqrt(alpha_h), "
      "sqrt(alpha_h)]^3); DF is unchanged by the scaling";
  j["left"] = r.left ? nlohmann::json(*r.left) : nlohmann::json(nullptr);
  j["right"] = r.right ? nlohmann::json(*r.right) : nlohmann::json(nullptr);
  j["left_image"] = r.left_image ? nlohmann::json(*r.left_image) : nlohmann::json(nullptr);
  j["right_image"] = r.right_image ? nlohmann::json(*r.right_image) : nlohmann::json(nullptr);
  j["fragments"] = r.fragments;
  auto stages = nlohmann::json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"name", s.name}, {"verified", s.verified}, {"detail", s.detail}});
  }
  j["stages"] = stages;
}

namespace {

std::string scaled(const Interval& x, double unit) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.4f, %.4f]", x.lo() / unit, x.hi() / unit);
  return buf;
}

void render_stage(std::ostringstream& os, const LocalStage& s) {
  os << "  mu = " << s.mu << "\n  L1 = " << s.chart.l1 << "\n";
  os << "  B = 1e-15 x (";
  for (std::size_t i = 0; i < 4; ++i) os << (i ? ", " : "") << scaled(s.fixed_point[i], 1e-15);
  os << ")\n  [DF(N)] =\n";
  for (std::size_t i = 0; i < 4; ++i) {
    os << "   ";
    for (std::size_t k = 0; k < 4; ++k) {
      char buf[96];
      std::snprintf(buf, sizeof buf, " [%.6g, %.6g]", s.dfn(i, k).lo(), s.dfn(i, k).hi());
      os << buf;
    }
    os << "\n";
  }
  os << "  cones (c_h = " << fmt("%g", s.cones.c_h) << ", c_v = " << fmt("%g", s.cones.c_v)
     << "): " << (s.cones.verified() ? "verified" : "NOT verified") << "\n";
  os << "  U - L1 = 1e-8 x (";
  for (std::size_t i = 0; i < 4; ++i) {
    os << (i ? ", " : "") << scaled(s.u_original[i] - s.chart.l1[i], 1e-8);
  }
  os << ")\n";
}

}  // namespace

std::string render_text(const ProofReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "verdict: " << to_string(r.verdict);
  if (!r.reason.empty()) os << " (" << r.reason << ")";
  os << "\nparameter interval: [" << r.config.mu_left_text << ", " << r.config.mu_right_text
     << "]\n";
  for (const auto* side : {&r.left, &r.right}) {
    if (!*side) continue;
    os << (side == &r.left ? "left endpoint\n" : "right endpoint\n");
    render_stage(os, **side);
  }
  for (const auto* img : {&r.left_image, &r.right_image}) {
    if (!*img) continue;
    os << (img == &r.left_image ? "P(U_left)" : "P(U_right)");
    if ((*img)->certified) {
      os << " at t in " << (*img)->time << ":\n";
      for (std::size_t i = 0; i < 4; ++i) os << "  " << (*img)->image[i] << "\n";
    } else {
      os << ": not certified (" << (*img)->failure << ")\n";
    }
  }
  std::size_t good = 0;
  for (const auto& f : r.fragments) good += f.cones_verified && f.crossing_certified;
  os << "fragments: " << good << "/" << r.fragments.size() << " certified\n";
  os << "stages:\n";
  for (const auto& s : r.stages) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%8.3f s", s.seconds);
    os << "  " << (s.verified ? "ok  " : "FAIL") << " " << buf << "  " << s.name;
    if (!s.detail.empty()) os << "  (" << s.detail << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace mc::prover
