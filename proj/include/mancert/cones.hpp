#pragma once

#include <array>
#include <optional>

#include <json.hpp>

#include "mancert/interval.hpp"
#include "mancert/linalg.hpp"

namespace mc {

/// Q(x, y) = alpha·‖x‖² − beta·‖y‖² with x ∈ R^u_dim, y ∈ R^s_dim.
struct QuadForm {
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t u_dim = 1;
  std::size_t s_dim = 1;

  /// Q_h = alpha_h‖x‖² − ‖y‖².
  static QuadForm horizontal(double alpha_h, std::size_t u_dim, std::size_t s_dim);
  /// Q_v = ‖x‖² − alpha_v‖y‖².
  static QuadForm vertical(double alpha_v, std::size_t u_dim, std::size_t s_dim);

  std::size_t dim() const { return u_dim + s_dim; }
  /// Diagonal matrix of the form.
  IMatrix matrix() const;
};

enum class ConeKind { Map, Flow };

struct ConeCertificate {
  QuadForm form;
  double m = 1.0;
  std::optional<Box> domain;
  PDVerdict verdict;
  ConeKind kind = ConeKind::Map;

  bool verified() const { return verdict.verified; }
};

/// Result of checking the four flow cone conditions for Q_h (at c_h) and
/// Q_v (at c_v).
struct FlowConeConstants {
  double c_h = 0.0;
  double c_v = 0.0;
  double alpha_h = 0.0;
  double alpha_v = 0.0;
  /// Upper bounds used for ‖ε₁‖ and ‖ε₂‖.
  double eps1_norm = 0.0;
  double eps2_norm = 0.0;
  /// Expansion in x for Q_h and Q_v, then contraction in y for Q_h and Q_v.
  PDVerdict h_expansion;
  PDVerdict v_expansion;
  PDVerdict h_contraction;
  PDVerdict v_contraction;

  bool verified() const {
    return h_expansion.verified && v_expansion.verified &&
           h_contraction.verified && v_contraction.verified;
  }
};

/// DF = [[A, ε₁], [ε₂, B]] with A of size u_dim.
struct FlowBlocks {
  IMatrix a;
  IMatrix b;
  IMatrix eps1;
  IMatrix eps2;

  static FlowBlocks split(const IMatrix& df, std::size_t u_dim);
};

Interval eval_Q(const QuadForm& q, const IVector& p);

/// PD test of ½(BᵀQB + (BᵀQB)ᵀ) − mQ with B = df.
ConeCertificate map_cone_check(const IMatrix& df, const QuadForm& q, double m,
                               std::optional<Box> domain = std::nullopt);

/// The two conditions for one form Q = α‖x‖² − β‖y‖² and rate c:
/// A − ½(‖ε₁‖ + (β/α)‖ε₂‖ + 2c)Id > 0 and −B + (c − ½(‖ε₂‖ + (α/β)‖ε₁‖))Id > 0.
std::array<PDVerdict, 2> flow_cone_condition(const FlowBlocks& blocks,
                                             const QuadForm& q, double c);

FlowConeConstants flow_cone_check(const FlowBlocks& blocks, double alpha_h,
                                  double alpha_v, double c_h, double c_v);

/// Certified Q_h(p) ≥ α_h − 1 and Q_v(p) ≤ 1 − α_v; implies ‖x‖ ≤ 1, ‖y‖ ≤ 1.
bool cone_membership(const IVector& p, double alpha_h, double alpha_v,
                     std::size_t u_dim);

/// Upper bound of √(2/(1 − α_v·α_h)).
double contraction_constant(double alpha_h, double alpha_v);

void to_json(nlohmann::json& j, const QuadForm& q);
void to_json(nlohmann::json& j, const PDVerdict& v);
void to_json(nlohmann::json& j, const ConeCertificate& c);
void to_json(nlohmann::json& j, const FlowConeConstants& c);

}  // namespace mc
