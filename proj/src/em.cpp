#include "difflab/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "difflab/errors.hpp"
#include "difflab/kernels.hpp"

namespace difflab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kProbMin = 1e-12;
constexpr double kProbMax = 1.0 - 1e-12;
constexpr double kRateMin = 1e-12;
constexpr double kRateMax = 1e12;

struct ZeroSite {
  bool found = false;
  std::size_t cascade = 0;
  NodeId node = 0;
  const char* what = "";
};

void note_zero(ZeroSite& z, std::size_t cascade, NodeId node, const char* what) {
  if (z.found) return;
  z = {true, cascade, node, what};
}

[[noreturn]] void throw_zero(const ZeroSite& z) {
  throw EstimationError("zero likelihood: " + std::string(z.what) + " at cascade index " +
                        std::to_string(z.cascade) + ", node " + std::to_string(z.node));
}

double clamp_count(double x, double lo, double hi, std::size_t& clamps) {
  const double y = std::clamp(x, lo, hi);
  if (y != x) ++clamps;
  return y;
}

// Gathers per-record coefficients and rates by edge, then evaluates the
// exponential-delay terms through the active kernel.
void decay(const std::vector<EdgeId>& edges, const std::vector<double>& dt,
           const std::vector<double>& coef_by_edge, const ParamVector& rate,
           std::vector<double>& x, std::vector<double>& tail) {
  const std::size_t n = edges.size();
  std::vector<double> c(n);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = coef_by_edge[edges[i]];
    r[i] = rate[edges[i]];
  }
  x.resize(n);
  tail.resize(n);
  kernels::active().decay_terms(n, c.data(), r.data(), dt.data(), x.data(), tail.data());
}

std::vector<double> edge_probs(const DirectedGraph& g, const AsicParams& p) {
  std::vector<double> out(g.edge_count());
  for (EdgeId e = 0; e < out.size(); ++e) out[e] = p.prob(e);
  return out;
}

std::vector<double> edge_weights(const DirectedGraph& g, const AsltParams& p) {
  std::vector<double> out(g.edge_count());
  for (EdgeId e = 0; e < out.size(); ++e) out[e] = p.weight(g, e);
  return out;
}

void check_evidence(const Evidence& ev, const DirectedGraph& g, ModelKind model) {
  if (ev.model != model) throw ValidationError("evidence was built for the other model");
  if (ev.node_count != g.node_count() || ev.edge_count != g.edge_count()) {
    throw ValidationError("evidence was built for a different graph");
  }
}

double asic_pass(const Evidence& ev, const DirectedGraph& g, const AsicParams& params,
                 HorizonMode horizon, Responsibilities* resp, ZeroSite& zero) {
  const auto p_edge = edge_probs(g, params);
  std::vector<double> x, tail;
  decay(ev.par_edge, ev.par_dt, p_edge, params.r, x, tail);
  if (resp) {
    resp->alpha.assign(x.size(), 0.0);
    resp->beta.assign(x.size(), 0.0);
  }
  double ll = 0.0;
  for (std::size_t s = 0; s < ev.segment_count(); ++s) {
    double log_prod = 0.0;
    double ratio = 0.0;
    for (std::size_t i = ev.seg_begin[s]; i < ev.seg_begin[s + 1]; ++i) {
      const double y = tail[i] + 1.0 - p_edge[ev.par_edge[i]];
      log_prod += std::log(y);
      ratio += x[i] / y;
    }
    if (!(ratio > 0.0) || !std::isfinite(log_prod)) {
      note_zero(zero, ev.seg_cascade[s], ev.seg_node[s], "activation density");
      ll = kNegInf;
      continue;
    }
    ll += log_prod + std::log(ratio);
    if (!resp) continue;
    for (std::size_t i = ev.seg_begin[s]; i < ev.seg_begin[s + 1]; ++i) {
      const double y = tail[i] + 1.0 - p_edge[ev.par_edge[i]];
      resp->alpha[i] = x[i] / y / ratio;
      resp->beta[i] = tail[i] / y;
    }
  }
  // Finite horizon: an attempt may have succeeded with its delivery still
  // pending at T; gamma is that posterior.
  std::vector<double> late_x, late;
  if (horizon == HorizonMode::finite) {
    decay(ev.fail_edge, ev.fail_elapsed, p_edge, params.r, late_x, late);
    if (resp) resp->gamma.assign(late.size(), 0.0);
  } else if (resp) {
    resp->gamma.clear();
  }
  for (std::size_t i = 0; i < ev.fail_edge.size(); ++i) {
    const EdgeId e = ev.fail_edge[i];
    const double pending = horizon == HorizonMode::finite ? late[i] : 0.0;
    const double f = pending + 1.0 - p_edge[e];
    if (!(f > 0.0)) {
      note_zero(zero, ev.fail_cascade[i], g.edge_source(e), "survival of an inactive child");
      ll = kNegInf;
      continue;
    }
    ll += std::log(f);
    if (resp && horizon == HorizonMode::finite) resp->gamma[i] = pending / f;
  }
  return ll;
}

double aslt_pass(const Evidence& ev, const DirectedGraph& g, const AsltParams& params,
                 Responsibilities* resp, ZeroSite& zero) {
  const auto q_edge = edge_weights(g, params);
  std::vector<double> x, unused;
  decay(ev.par_edge, ev.par_dt, q_edge, params.r, x, unused);
  std::vector<double> tail_x, tail;
  decay(ev.tail_edge, ev.tail_elapsed, q_edge, params.r, tail_x, tail);
  if (resp) {
    resp->phi.assign(x.size(), 0.0);
    resp->varphi_slack.assign(ev.frontier_count(), 0.0);
    resp->varphi.assign(ev.inactive_edge.size(), 0.0);
    resp->psi.assign(tail.size(), 0.0);
  }
  double ll = 0.0;
  for (std::size_t s = 0; s < ev.segment_count(); ++s) {
    double h = 0.0;
    for (std::size_t i = ev.seg_begin[s]; i < ev.seg_begin[s + 1]; ++i) h += x[i];
    if (!(h > 0.0)) {
      note_zero(zero, ev.seg_cascade[s], ev.seg_node[s], "activation density");
      ll = kNegInf;
      continue;
    }
    ll += std::log(h);
    if (!resp) continue;
    for (std::size_t i = ev.seg_begin[s]; i < ev.seg_begin[s + 1]; ++i) resp->phi[i] = x[i] / h;
  }
  for (std::size_t s = 0; s < ev.frontier_count(); ++s) {
    const double slack = std::max(0.0, params.slack(g, ev.fr_node[s]));
    double total = slack;
    for (std::size_t i = ev.fr_inactive_begin[s]; i < ev.fr_inactive_begin[s + 1]; ++i) {
      total += q_edge[ev.inactive_edge[i]];
    }
    for (std::size_t i = ev.fr_tail_begin[s]; i < ev.fr_tail_begin[s + 1]; ++i) total += tail[i];
    if (!(total > 0.0)) {
      note_zero(zero, ev.fr_cascade[s], ev.fr_node[s], "frontier survival");
      ll = kNegInf;
      continue;
    }
    ll += std::log(total);
    if (!resp) continue;
    resp->varphi_slack[s] = slack / total;
    for (std::size_t i = ev.fr_inactive_begin[s]; i < ev.fr_inactive_begin[s + 1]; ++i) {
      resp->varphi[i] = q_edge[ev.inactive_edge[i]] / total;
    }
    for (std::size_t i = ev.fr_tail_begin[s]; i < ev.fr_tail_begin[s + 1]; ++i) {
      resp->psi[i] = tail[i] / total;
    }
  }
  return ll;
}

double l1_change(const ModelParams& a, const ModelParams& b) {
  auto diff = [](const ParamVector& x, const ParamVector& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x.values()[i] - y.values()[i]);
    return s;
  };
  if (const auto* pa = std::get_if<AsicParams>(&a)) {
    const auto& pb = std::get<AsicParams>(b);
    return diff(pa->p, pb.p) + diff(pa->r, pb.r);
  }
  const auto& qa = std::get<AsltParams>(a);
  const auto& qb = std::get<AsltParams>(b);
  return diff(qa.q, qb.q) + diff(qa.r, qb.r);
}

ModelParams initial_params(ModelKind model, const DirectedGraph& g, const EmConfig& cfg) {
  if (cfg.initial) {
    if (model_of(*cfg.initial) != model) {
      throw ValidationError("warm-start parameters belong to the other model");
    }
    const ParamMode mode = std::visit([](const auto& p) { return p.mode; }, *cfg.initial);
    if (mode != cfg.mode) throw ValidationError("warm-start parameters use the other mode");
    validate(*cfg.initial, g, cfg.delay);
    return *cfg.initial;
  }
  const std::size_t m = g.edge_count();
  if (model == ModelKind::asic) {
    if (cfg.mode == ParamMode::shared) return AsicParams::shared(cfg.init_p, cfg.init_r);
    return AsicParams::per_link(std::vector<double>(m, cfg.init_p),
                                std::vector<double>(m, cfg.init_r));
  }
  if (cfg.mode == ParamMode::shared) return AsltParams::shared(cfg.init_q, cfg.init_r);
  std::vector<double> q(m);
  for (EdgeId e = 0; e < m; ++e) {
    q[e] = cfg.init_q / static_cast<double>(g.in_degree(g.edge_target(e)));
  }
  return AsltParams::per_link(std::move(q), std::vector<double>(m, cfg.init_r));
}

}  // namespace

void EmConfig::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (!(init_p > 0.0 && init_p < 1.0)) throw ValidationError("init_p must lie in (0, 1)");
  if (!(init_q > 0.0 && init_q < 1.0)) throw ValidationError("init_q must lie in (0, 1)");
  if (!(init_r > 0.0) || !std::isfinite(init_r)) throw ValidationError("init_r must be positive");
}

Responsibilities e_step_asic(std::shared_ptr<const Evidence> evidence, const DirectedGraph& g,
                             const AsicParams& params, HorizonMode horizon) {
  check_evidence(*evidence, g, ModelKind::asic);
  Responsibilities resp;
  resp.model = ModelKind::asic;
  ZeroSite zero;
  resp.loglik = asic_pass(*evidence, g, params, horizon, &resp, zero);
  if (zero.found) throw_zero(zero);
  resp.evidence = std::move(evidence);
  return resp;
}

Responsibilities e_step_asic(const DirectedGraph& g, const CascadeSet& data,
                             const AsicParams& params, HorizonMode horizon) {
  return e_step_asic(std::make_shared<const Evidence>(build_evidence(g, data, ModelKind::asic)),
                     g, params, horizon);
}

Responsibilities e_step_aslt(std::shared_ptr<const Evidence> evidence, const DirectedGraph& g,
                             const AsltParams& params) {
  check_evidence(*evidence, g, ModelKind::aslt);
  Responsibilities resp;
  resp.model = ModelKind::aslt;
  ZeroSite zero;
  resp.loglik = aslt_pass(*evidence, g, params, &resp, zero);
  if (zero.found) throw_zero(zero);
  resp.evidence = std::move(evidence);
  return resp;
}

Responsibilities e_step_aslt(const DirectedGraph& g, const CascadeSet& data,
                             const AsltParams& params) {
  return e_step_aslt(std::make_shared<const Evidence>(build_evidence(g, data, ModelKind::aslt)),
                     g, params);
}

double evidence_loglik(const Evidence& evidence, const DirectedGraph& g,
                       const ModelParams& params, HorizonMode horizon) {
  ZeroSite zero;
  if (const auto* p = std::get_if<AsicParams>(&params)) {
    check_evidence(evidence, g, ModelKind::asic);
    return asic_pass(evidence, g, *p, horizon, nullptr, zero);
  }
  check_evidence(evidence, g, ModelKind::aslt);
  return aslt_pass(evidence, g, std::get<AsltParams>(params), nullptr, zero);
}

AsicParams m_step_asic(const DirectedGraph& g, const Responsibilities& resp, ParamMode mode,
                       const AsicParams& current, MStepStats* stats) {
  const Evidence& ev = *resp.evidence;
  MStepStats local;
  MStepStats& st = stats ? *stats : local;
  const std::size_t m = g.edge_count();
  std::vector<double> num_r(m, 0.0), den_r(m, 0.0), num_p(m, 0.0), count(m, 0.0);
  for (std::size_t i = 0; i < ev.par_edge.size(); ++i) {
    const EdgeId e = ev.par_edge[i];
    const double a = resp.alpha[i];
    const double succ = a + (1.0 - a) * resp.beta[i];
    num_r[e] += a;
    den_r[e] += succ * ev.par_dt[i];
    num_p[e] += succ;
    count[e] += 1.0;
  }
  for (std::size_t i = 0; i < ev.fail_edge.size(); ++i) {
    const EdgeId e = ev.fail_edge[i];
    count[e] += 1.0;
    if (resp.gamma.empty()) continue;
    num_p[e] += resp.gamma[i];
    den_r[e] += resp.gamma[i] * ev.fail_elapsed[i];
  }

  AsicParams out = current;
  out.mode = mode;
  if (mode == ParamMode::shared) {
    double nr = 0, dr = 0, np = 0, c = 0;
    for (std::size_t e = 0; e < m; ++e) {
      nr += num_r[e];
      dr += den_r[e];
      np += num_p[e];
      c += count[e];
    }
    double p = current.p[0];
    double r = current.r[0];
    if (c > 0) p = np / c;
    if (dr > 0) r = nr / dr;
    out.p = ParamVector::shared(clamp_count(p, kProbMin, kProbMax, st.clamp_events));
    out.r = ParamVector::shared(clamp_count(r, kRateMin, kRateMax, st.clamp_events));
    return out;
  }
  for (EdgeId e = 0; e < m; ++e) {
    if (count[e] > 0) {
      out.p.at_mut(e) = clamp_count(num_p[e] / count[e], kProbMin, kProbMax, st.clamp_events);
    } else {
      ++st.untouched;
    }
    if (den_r[e] > 0) {
      out.r.at_mut(e) = clamp_count(num_r[e] / den_r[e], kRateMin, kRateMax, st.clamp_events);
    } else {
      ++st.untouched;
    }
  }
  return out;
}

AsltParams m_step_aslt(const DirectedGraph& g, const Responsibilities& resp, ParamMode mode,
                       const AsltParams& current, MStepStats* stats) {
  const Evidence& ev = *resp.evidence;
  MStepStats local;
  MStepStats& st = stats ? *stats : local;
  const std::size_t m = g.edge_count();
  std::vector<double> mass(m, 0.0), num_r(m, 0.0), den_r(m, 0.0);
  std::vector<double> slack_mass(g.node_count(), 0.0);
  for (std::size_t i = 0; i < ev.par_edge.size(); ++i) {
    const EdgeId e = ev.par_edge[i];
    mass[e] += resp.phi[i];
    num_r[e] += resp.phi[i];
    den_r[e] += resp.phi[i] * ev.par_dt[i];
  }
  for (std::size_t i = 0; i < ev.tail_edge.size(); ++i) {
    const EdgeId e = ev.tail_edge[i];
    mass[e] += resp.psi[i];
    den_r[e] += resp.psi[i] * ev.tail_elapsed[i];
  }
  for (std::size_t i = 0; i < ev.inactive_edge.size(); ++i) mass[ev.inactive_edge[i]] += resp.varphi[i];
  for (std::size_t s = 0; s < ev.frontier_count(); ++s) slack_mass[ev.fr_node[s]] += resp.varphi_slack[s];

  AsltParams out = current;
  out.mode = mode;
  if (mode == ParamMode::shared) {
    double a = 0, b = 0, nr = 0, dr = 0;
    for (std::size_t e = 0; e < m; ++e) {
      a += mass[e];
      nr += num_r[e];
      dr += den_r[e];
    }
    for (double s : slack_mass) b += s;
    double q = current.q[0];
    double r = current.r[0];
    if (a + b > 0) q = a / (a + b);
    if (dr > 0) r = nr / dr;
    out.q = ParamVector::shared(clamp_count(q, kProbMin, kProbMax, st.clamp_events));
    out.r = ParamVector::shared(clamp_count(r, kRateMin, kRateMax, st.clamp_events));
    return out;
  }

  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto in = g.in_edges(v);
    if (in.empty()) continue;
    double total = slack_mass[v];
    for (EdgeId e : in) total += mass[e];
    if (!(total > 0)) {
      st.untouched += in.size();
      continue;
    }
    double sum = 0.0;
    for (EdgeId e : in) {
      out.q.at_mut(e) = clamp_count(mass[e] / total, kProbMin, kProbMax, st.clamp_events);
      sum += out.q[e];
    }
    if (sum > 1.0) {
      for (EdgeId e : in) out.q.at_mut(e) /= sum;
    }
  }
  for (EdgeId e = 0; e < m; ++e) {
    if (den_r[e] > 0) {
      out.r.at_mut(e) = clamp_count(num_r[e] / den_r[e], kRateMin, kRateMax, st.clamp_events);
    } else {
      ++st.untouched;
    }
  }
  return out;
}

FitResult fit(ModelKind model, const DirectedGraph& g, std::shared_ptr<const Evidence> evidence,
              const EmConfig& config) {
  config.validate();
  if (config.delay != DelayModel::link) {
    throw UnsupportedError("EM learning is implemented for the link-delay model only");
  }
  check_evidence(*evidence, g, model);
  if (evidence->segment_count() == 0 && evidence->fail_edge.empty() &&
      evidence->frontier_count() == 0) {
    throw InsufficientDataError("cascades carry no evidence about any link");
  }

  FitResult result{initial_params(model, g, config), {}};
  EmTrace& trace = result.trace;

  auto estep = [&](const ModelParams& p) {
    if (const auto* a = std::get_if<AsicParams>(&p)) {
      return e_step_asic(evidence, g, *a, config.horizon);
    }
    return e_step_aslt(evidence, g, std::get<AsltParams>(p));
  };

  Responsibilities resp;
  try {
    resp = estep(result.params);
  } catch (const EstimationError& e) {
    throw EstimationError(std::string("non-finite initial log-likelihood: ") + e.what());
  }
  if (!std::isfinite(resp.loglik)) throw EstimationError("non-finite initial log-likelihood");
  trace.loglik.push_back(resp.loglik);
  trace.snapshots.push_back(result.params);

  for (int it = 1; it <= config.max_iterations; ++it) {
    MStepStats st;
    ModelParams next;
    if (model == ModelKind::asic) {
      next = m_step_asic(g, resp, config.mode, std::get<AsicParams>(result.params), &st);
    } else {
      next = m_step_aslt(g, resp, config.mode, std::get<AsltParams>(result.params), &st);
    }
    trace.clamp_events += st.clamp_events;
    if (it == 1) trace.untouched = st.untouched;
    const double change = l1_change(next, result.params);
    result.params = std::move(next);
    resp = estep(result.params);
    trace.loglik.push_back(resp.loglik);
    trace.snapshots.push_back(result.params);
    trace.iterations = it;
    if (change <= config.tolerance) {
      trace.converged = true;
      break;
    }
  }
  return result;
}

FitResult fit(ModelKind model, const DirectedGraph& g, const CascadeSet& data,
              const EmConfig& config) {
  if (data.empty()) throw InsufficientDataError("no cascades to learn from");
  return fit(model, g, std::make_shared<const Evidence>(build_evidence(g, data, model)), config);
}

double param_error(double estimate, double truth) {
  if (truth == 0.0) throw DomainError("relative error undefined for a zero true value");
  return std::fabs(estimate - truth) / std::fabs(truth);
}

}  // namespace difflab
