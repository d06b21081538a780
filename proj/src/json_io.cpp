#include "mancert/json_io.hpp"

namespace mc {

void to_json(nlohmann::json& j, const Interval& x) {
  j = nlohmann::json::array({x.lo(), x.hi()});
}

void from_json(const nlohmann::json& j, Interval& x) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DomainError("interval must be a JSON pair [lo, hi]");
  }
  x = Interval(j[0].get<double>(), j[1].get<double>());
}

void to_json(nlohmann::json& j, const IVector& v) {
  j = nlohmann::json::array();
  for (const auto& x : v) j.push_back(x);
}

void from_json(const nlohmann::json& j, IVector& v) {
  if (!j.is_array()) throw DomainError("interval vector must be a JSON array");
  v = IVector(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<Interval>();
}

void to_json(nlohmann::json& j, const IMatrix& m) {
  j = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(std::move(row));
  }
}

void from_json(const nlohmann::json& j, IMatrix& m) {
  if (!j.is_array()) throw DomainError("interval matrix must be a JSON array");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  m = IMatrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw DomainError("ragged interval matrix");
    }
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<Interval>();
  }
}

}  // namespace mc
