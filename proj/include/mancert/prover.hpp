#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mancert/cones.hpp"
#include "mancert/flow.hpp"
#include "mancert/manifold.hpp"
#include "mancert/rtbp.hpp"

namespace mc::prover {

enum class Model { Pcr3bp, Linear };

struct ProofConfig {
  Model model = Model::Pcr3bp;
  /// Decimal literals as given; the intervals enclose them.
  std::string mu_left_text = "0.004253863422";
  std::string mu_right_text = "0.004253863622";
  Interval mu_left = from_decimal("0.004253863422");
  Interval mu_right = from_decimal("0.004253863622");
  double alpha_h = 1e-8;
  double alpha_v = 1e-4;
  double r_u = 1e-7;
  double c_h = 1.0;
  double c_v = 2.8;
  /// N is cut into n_subdivisions³ slabs along the unstable axis for DF̂.
  int n_subdivisions = 32;
  int mu_fragments = 20;
  /// DF̂ subdivision used for the well-definedness fragments.
  int fragment_subdivisions = 8;
  int taylor_order = 20;
  double step_tolerance = 1e-14;
  /// Integration budget to the section.
  double max_time = 20.0;
  /// Diagonal entries (unstable first) for the linear model.
  std::vector<double> eigenvalues;
  int threads = 1;

  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

ProofConfig config_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ProofConfig& c);

enum class Verdict { Proved, NotProved };

struct StageResult {
  std::string name;
  bool verified = false;
  std::string detail;
  double seconds = 0.0;
};

/// Everything computed for one μ interval: chart, fixed point, N, [DF̂(N)],
/// cone constants and the U boxes.
struct LocalStage {
  Interval mu;
  rtbp::LocalChart chart;
  Box fixed_point;
  Box n_box;
  IMatrix dfn;
  FlowConeConstants cones;
  std::optional<ManifoldCertificate> certificate;
  Box u_local;
  Box u_original;
};

struct SectionImage {
  Interval mu;
  bool certified = false;
  Box image;
  Interval time;
  std::size_t steps = 0;
  std::string failure;
};

struct FragmentResult {
  Interval mu;
  bool cones_verified = false;
  bool crossing_certified = false;
  bool retried = false;
  Interval px;
  std::string failure;
};

struct ProofReport {
  ProofConfig config;
  std::optional<LocalStage> left;
  std::optional<LocalStage> right;
  std::optional<SectionImage> left_image;
  std::optional<SectionImage> right_image;
  std::vector<FragmentResult> fragments;
  std::vector<StageResult> stages;
  Verdict verdict = Verdict::NotProved;
  std::string reason;
};

/// Jordan chart for an interval of μ.
rtbp::LocalChart make_chart(const Interval& mu);

/// Interval Newton for F̂ = 0 in local coordinates, valid for every μ in
/// chart.mu. Throws Inconclusive.
Box enclose_fixed_point(const rtbp::LocalChart& chart);

/// B + [0, r_u] × [−r_u√α_h, r_u√α_h]³.
Box build_N(const Box& b, double r_u, double alpha_h);

/// Hull of DF̂ over pieces³ slabs of N cut along the unstable axis; the other
/// axes are only r_u√α_h wide.
IMatrix enclose_DF_over_N(const Box& n, const rtbp::LocalChart& chart, int pieces,
                          int threads = 1);

/// B + r_u·({√(1 − α_v)} × [−√α_h, √α_h]³).
Box build_U(const Box& b, double r_u, double alpha_h, double alpha_v);

/// All local stages for one μ interval. Cone failure leaves certificate empty.
LocalStage local_stage(const Interval& mu, const ProofConfig& cfg, int pieces);

/// Φ(u) for a box u in local coordinates, as an affine set with μ appended as
/// a fifth coordinate.
FlowEnclosure initial_set(const rtbp::LocalChart& chart, const Box& u);

/// Validated first crossing of {Y = 0} with Ẏ > 0 from U, split into
/// `pieces` slabs along the unstable local axis; the image is their hull.
SectionImage poincare_image(const LocalStage& s, const ProofConfig& cfg, int pieces = 1,
                            std::vector<StepRecord>* trace = nullptr);

/// Runs every stage; never throws for numerical failures.
ProofReport check_homoclinic(const ProofConfig& cfg);

/// Linear model: diagonal DF̂ = diag(eigenvalues) certified at (c_h, c_v).
FlowConeConstants linear_model_cones(const ProofConfig& cfg);

/// Re-checks the cone conditions and sign conditions from a serialized report.
bool recheck_report(const nlohmann::json& report);

/// Runs fn(i) for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

const char* to_string(Verdict v);
void to_json(nlohmann::json& j, const LocalStage& s);
void to_json(nlohmann::json& j, const SectionImage& s);
void to_json(nlohmann::json& j, const FragmentResult& f);
/// Timings are left out so the document is reproducible.
void to_json(nlohmann::json& j, const ProofReport& r);
std::string render_text(const ProofReport& r);

}  // namespace mc::prover
