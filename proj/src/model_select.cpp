#include "difflab/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "difflab/errors.hpp"
#include "difflab/likelihood.hpp"
#include "difflab/parallel.hpp"

namespace difflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HeldOutEvent earliest_at_or_after(const CascadeSet& data, double cutoff) {
  HeldOutEvent best{0, 0, kInf};
  bool found = false;
  for (std::size_t m = 0; m < data.size(); ++m) {
    const auto& ev = data[m].events();
    auto it = std::lower_bound(ev.begin(), ev.end(), cutoff,
                               [](const Activation& a, double t) { return a.time < t; });
    for (; it != ev.end() && (!found || it->time <= best.time); ++it) {
      const HeldOutEvent cand{m, it->node, it->time};
      const bool better = !found || cand.time < best.time ||
                          (cand.time == best.time &&
                           (cand.cascade < best.cascade ||
                            (cand.cascade == best.cascade && cand.node < best.node)));
      if (better) {
        best = cand;
        found = true;
      }
    }
  }
  if (!found) throw InsufficientDataError("no held-out activation after the cutoff");
  return best;
}

double held_out_density(const DirectedGraph& g, const CascadeSet& truncated,
                        const HeldOutEvent& ho, const ModelParams& params, DelayModel delay) {
  std::vector<Activation> events = truncated[ho.cascade].events();
  events.push_back({ho.node, ho.time});
  const Cascade probe(std::move(events), ho.time);
  const CascadeIndex idx(probe, g);
  if (const auto* p = std::get_if<AsicParams>(&params)) return h_asic(g, idx, *p, delay, ho.node);
  return h_aslt(g, idx, std::get<AsltParams>(params), delay, ho.node);
}

CutoffTerm score_cutoff(ModelKind model, const DirectedGraph& g, const CascadeSet& data,
                        double cutoff, EmConfig cfg) {
  CutoffTerm term;
  term.cutoff = cutoff;
  term.held_out = earliest_at_or_after(data, cutoff);
  CascadeSet truncated;
  truncated.reserve(data.size());
  for (const auto& c : data) truncated.push_back(c.truncated(cutoff));
  // Attempts still in flight at the cutoff are not failures.
  if (model == ModelKind::asic) cfg.horizon = HorizonMode::finite;
  try {
    FitResult fitted = fit(model, g, truncated, cfg);
    term.params = std::move(fitted.params);
  } catch (const InsufficientDataError& e) {
    term.skipped = true;
    term.skip_reason = e.what();
    return term;
  } catch (const EstimationError& e) {
    term.skipped = true;
    term.skip_reason = e.what();
    return term;
  }
  term.h = held_out_density(g, truncated, term.held_out, term.params, cfg.delay);
  term.neg_log_h = term.h > 0.0 ? -std::log(term.h) : kInf;
  return term;
}

EmConfig config_for(ModelKind model, const EmConfig& config) {
  EmConfig cfg = config;
  if (cfg.initial && model_of(*cfg.initial) != model) cfg.initial.reset();
  return cfg;
}

}  // namespace

ObservationPeriods build_observation_periods(const CascadeSet& data) {
  std::vector<double> times;
  for (const auto& c : data) {
    for (const auto& a : c.events()) times.push_back(a.time);
  }
  if (times.size() < 2) {
    throw InsufficientDataError("model selection needs at least 2 activations, got " +
                                std::to_string(times.size()));
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  ObservationPeriods out;
  out.tau0 = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  for (double t : times) {
    if (t >= out.tau0 && (out.cutoffs.empty() || t != out.cutoffs.back())) out.cutoffs.push_back(t);
  }
  return out;
}

PredictiveScore predictive_score(ModelKind model, const DirectedGraph& g, const CascadeSet& data,
                                 const ObservationPeriods& periods, const EmConfig& config,
                                 const ScoreOptions& options) {
  PredictiveScore out;
  out.model = model;
  EmConfig cfg = config_for(model, config);
  out.terms.resize(periods.count());
  if (options.warm_start) {
    for (std::size_t i = 0; i < periods.count(); ++i) {
      out.terms[i] = score_cutoff(model, g, data, periods.cutoffs[i], cfg);
      if (!out.terms[i].skipped) cfg.initial = out.terms[i].params;
    }
  } else {
    parallel_for(periods.count(), resolve_threads(options.threads), [&](std::size_t i) {
      out.terms[i] = score_cutoff(model, g, data, periods.cutoffs[i], cfg);
    });
  }
  double sum = 0.0;
  for (const auto& t : out.terms) {
    if (t.skipped) continue;
    sum += t.neg_log_h;
    ++out.used;
  }
  if (out.used == 0) throw InsufficientDataError("every observation period was unfittable");
  out.score = sum / static_cast<double>(out.used);
  return out;
}

SelectionReport select_model(const DirectedGraph& g, const CascadeSet& data,
                             const EmConfig& config, const ScoreOptions& options) {
  const ObservationPeriods periods = build_observation_periods(data);
  PredictiveScore scores[2];
  const ModelKind models[2] = {ModelKind::asic, ModelKind::aslt};
  // The two scores are independent; inner cold-start parallelism stays serial.
  ScoreOptions inner = options;
  inner.threads = 1;
  parallel_for(2, resolve_threads(options.threads), [&](std::size_t k) {
    PredictiveScore s;
    s.model = models[k];
    EmConfig cfg = config_for(models[k], config);
    s.terms.resize(periods.count());
    for (std::size_t i = 0; i < periods.count(); ++i) {
      s.terms[i] = score_cutoff(models[k], g, data, periods.cutoffs[i], cfg);
      if (inner.warm_start && !s.terms[i].skipped) cfg.initial = s.terms[i].params;
    }
    scores[k] = std::move(s);
  });

  SelectionReport rep;
  rep.tau0 = periods.tau0;
  double sum[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < periods.count(); ++i) {
    const auto& a = scores[0].terms[i];
    const auto& b = scores[1].terms[i];
    if (a.skipped || b.skipped) {
      ++rep.skipped;
      continue;
    }
    sum[0] += a.neg_log_h;
    sum[1] += b.neg_log_h;
    rep.cutoffs.push_back({a.cutoff, a.held_out, a.h, b.h});
  }
  if (rep.cutoffs.empty()) {
    throw InsufficientDataError("no observation period could be fitted under both models");
  }
  const double n = static_cast<double>(rep.cutoffs.size());
  rep.score_asic = sum[0] / n;
  rep.score_aslt = sum[1] / n;
  resolve_choice(rep);
  return rep;
}

void resolve_choice(SelectionReport& rep) {
  rep.j_asic_aslt = rep.score_aslt - rep.score_asic;
  const bool both_infinite = std::isinf(rep.score_asic) && std::isinf(rep.score_aslt);
  rep.indeterminate = both_infinite || std::fabs(rep.j_asic_aslt) < 1e-12;
  if (both_infinite) rep.j_asic_aslt = 0.0;
  rep.j = std::fabs(rep.j_asic_aslt);
  rep.chosen = rep.indeterminate || rep.score_asic <= rep.score_aslt ? ModelKind::asic
                                                                     : ModelKind::aslt;
}

}  // namespace difflab
