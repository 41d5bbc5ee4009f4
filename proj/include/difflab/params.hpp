#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"

namespace difflab {

enum class ModelKind { asic, aslt };
enum class ParamMode { shared, per_link };

std::string to_string(ModelKind m);
std::string to_string(ParamMode m);
std::string to_string(DelayModel d);
ModelKind parse_model_kind(const std::string& s);
ParamMode parse_param_mode(const std::string& s);
DelayModel parse_delay_model(const std::string& s);

/// A parameter that is either one shared value or one value per item
/// (edge or node). Indexing a shared vector returns the shared value.
class ParamVector {
 public:
  ParamVector() : values_{0.0}, shared_(true) {}
  static ParamVector shared(double value) { return ParamVector({value}, true); }
  static ParamVector per_item(std::vector<double> values) {
    return ParamVector(std::move(values), false);
  }

  bool is_shared() const noexcept { return shared_; }
  double operator[](std::size_t i) const noexcept { return shared_ ? values_[0] : values_[i]; }
  double& at_mut(std::size_t i) { return values_[shared_ ? 0 : i]; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values_mut() noexcept { return values_; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  ParamVector(std::vector<double> v, bool shared) : values_(std::move(v)), shared_(shared) {}
  std::vector<double> values_;
  bool shared_;
};

/// AsIC parameters. p is indexed by edge; r by edge under link delay and by
/// target node under the node-delay variants. Shared mode stores scalars.
struct AsicParams {
  ParamMode mode = ParamMode::shared;
  ParamVector p = ParamVector::shared(0.5);
  ParamVector r = ParamVector::shared(1.0);

  static AsicParams shared(double p, double r);
  static AsicParams per_link(std::vector<double> p, std::vector<double> r);

  double prob(EdgeId e) const noexcept { return p[e]; }
  /// Delay rate governing edge e = (u, v).
  double rate(const DirectedGraph& g, EdgeId e, DelayModel d) const noexcept {
    return d == DelayModel::link ? r[e] : r[g.edge_target(e)];
  }

  /// Sizes consistent with g and d; 0 <= p <= 1; r > 0. Throws ValidationError.
  void validate(const DirectedGraph& g, DelayModel d) const;

  friend bool operator==(const AsicParams&, const AsicParams&) = default;
};

/// AsLT parameters. In shared mode q holds the coefficient and the weight of
/// edge (u, v) is q / |B(v)|; in per-link mode q holds the weight of each edge.
/// The slack weight of v is whatever is left of 1.
struct AsltParams {
  ParamMode mode = ParamMode::shared;
  ParamVector q = ParamVector::shared(0.5);
  ParamVector r = ParamVector::shared(1.0);

  static AsltParams shared(double q, double r);
  static AsltParams per_link(std::vector<double> q, std::vector<double> r);

  double weight(const DirectedGraph& g, EdgeId e) const noexcept {
    if (mode == ParamMode::shared) {
      return q[0] / static_cast<double>(g.in_degree(g.edge_target(e)));
    }
    return q[e];
  }
  /// q_{v,v} = 1 - sum of incoming weights (1 for a node without parents).
  double slack(const DirectedGraph& g, NodeId v) const noexcept;
  double rate(const DirectedGraph& g, EdgeId e, DelayModel d) const noexcept {
    return d == DelayModel::link ? r[e] : r[g.edge_target(e)];
  }

  /// Shared q in (0, 1]; per-link weights > 0 with non-negative slack; r > 0.
  void validate(const DirectedGraph& g, DelayModel d) const;

  friend bool operator==(const AsltParams&, const AsltParams&) = default;
};

using ModelParams = std::variant<AsicParams, AsltParams>;

inline ModelKind model_of(const ModelParams& p) noexcept {
  return std::holds_alternative<AsicParams>(p) ? ModelKind::asic : ModelKind::aslt;
}

void validate(const ModelParams& p, const DirectedGraph& g, DelayModel d);

}  // namespace difflab
