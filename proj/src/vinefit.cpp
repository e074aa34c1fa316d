#include "vinedep/vinefit.hpp"

#include <algorithm>
#include <cmath>

#include "vinedep/errors.hpp"
#include "vinedep/parallel.hpp"

namespace vinedep {

std::pair<std::vector<double>, std::vector<double>> conditional_pseudo_obs(
    const VineEdge& edge, const std::vector<double>& u_left,
    const std::vector<double>& u_right) {
  if (edge.spec.n == 0 && edge.spec.family.tag != FamilyTag::independence) {
    throw DataError("conditional_pseudo_obs: edge carries no fitted copula");
  }
  if (u_left.size() != u_right.size()) {
    throw DataError("conditional_pseudo_obs: length mismatch");
  }
  std::vector<double> a(u_left.size()), b(u_left.size());
  for (size_t r = 0; r < u_left.size(); ++r) {
    a[r] = bicop_hfunc(edge.spec, u_left[r], u_right[r], CondVar::second);
    b[r] = bicop_hfunc(edge.spec, u_right[r], u_left[r], CondVar::first);
  }
  return {std::move(a), std::move(b)};
}

EdgeIndex::EdgeIndex(const VineStructure& s) {
  for (const auto& tree : s.trees) {
    for (const auto& e : tree) {
      std::vector<int> dj = e.cond;  // conditioning of u_{j | D + k}
      dj.push_back(e.k);
      std::sort(dj.begin(), dj.end());
      map_[{e.j, std::move(dj)}] = Entry{&e, true};

      std::vector<int> dk = e.cond;
      dk.push_back(e.j);
      std::sort(dk.begin(), dk.end());
      map_[{e.k, std::move(dk)}] = Entry{&e, false};
    }
  }
}

const EdgeIndex::Entry* EdgeIndex::find(int var, const std::vector<int>& cond_sorted) const {
  auto it = map_.find({var, cond_sorted});
  return it == map_.end() ? nullptr : &it->second;
}

RowConditional::RowConditional(const EdgeIndex& index, std::vector<double> row)
    : index_(index), row_(std::move(row)) {}

void RowConditional::put(int var, const std::vector<int>& cond_sorted, double value) {
  memo_[{var, cond_sorted}] = value;
}

double RowConditional::cond(int var, const std::vector<int>& cond_sorted) {
  if (cond_sorted.empty()) return row_[static_cast<size_t>(var)];
  auto key = std::make_pair(var, cond_sorted);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  const EdgeIndex::Entry* entry = index_.find(var, cond_sorted);
  if (!entry) {
    throw NumericError("conditional " + std::to_string(var) +
                       " | (set) is not produced by any edge of the vine");
  }
  const VineEdge& e = *entry->edge;
  double uj = cond(e.j, e.cond);
  double uk = cond(e.k, e.cond);
  double val = entry->target_is_j ? bicop_hfunc(e.spec, uj, uk, CondVar::second)
                                  : bicop_hfunc(e.spec, uk, uj, CondVar::first);
  memo_.emplace(std::move(key), val);
  return val;
}

std::vector<double> vine_row_logdensity(const FittedVine& fv, const PseudoObs& u) {
  const int d = fv.structure.d;
  if (static_cast<int>(u.d()) != d) {
    throw DataError("vine_loglik: dimension mismatch");
  }
  const size_t n = u.n();
  EdgeIndex index(fv.structure);
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](size_t r) {
    std::vector<double> row(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) row[static_cast<size_t>(c)] = u.cols[static_cast<size_t>(c)][r];
    RowConditional rc(index, std::move(row));
    double lp = 0.0;
    for (const auto& tree : fv.structure.trees) {
      for (const auto& e : tree) {
        double uj = rc.cond(e.j, e.cond);
        double uk = rc.cond(e.k, e.cond);
        lp += bicop_logpdf(e.spec.family, e.spec.params, uj, uk);
      }
    }
    out[r] = lp;
  });
  return out;
}

double vine_loglik(const FittedVine& fv, const PseudoObs& u) {
  auto rows = vine_row_logdensity(fv, u);
  double s = 0.0;
  for (double v : rows) s += v;  // fixed order, independent of threading
  return s;
}

std::pair<double, double> model_criteria(const FittedVine& fv) {
  int k = fv.structure.total_params();
  double aic = 2.0 * k - 2.0 * fv.loglik;
  double bic = k * std::log(static_cast<double>(fv.n)) - 2.0 * fv.loglik;
  return {aic, bic};
}

FittedVine fit_vine(const PseudoObs& u, VineKind kind, const FitSettings& settings,
                    const std::vector<int>* dvine_order, CvineTrace* trace) {
  FittedVine fv;
  switch (kind) {
    case VineKind::rvine:
      fv.structure = build_rvine(u, settings);
      break;
    case VineKind::cvine:
      fv.structure = build_cvine(u, settings, trace);
      break;
    case VineKind::dvine: {
      std::vector<int> order;
      if (dvine_order) {
        order = *dvine_order;
      } else {
        order.resize(u.d());
        for (size_t i = 0; i < u.d(); ++i) order[i] = static_cast<int>(i);
      }
      fv.structure = build_dvine(u, order, settings);
      break;
    }
  }
  fv.n = u.n();
  fv.criterion = settings.criterion;
  fv.loglik = fv.structure.total_loglik();
  auto [aic, bic] = model_criteria(fv);
  fv.aic = aic;
  fv.bic = bic;
  return fv;
}

FittedVine fit_vine_table(const DataTable& t, VineKind kind, const FitSettings& settings,
                          TiePolicy tie_policy, uint64_t seed, CvineTrace* trace) {
  if (t.missing_count() != 0) {
    throw DataError("fit_vine_table: table still contains missing cells; curate first");
  }
  PseudoObs u;
  u.names = t.names();
  u.cols.reserve(t.n_cols());
  std::vector<MarginalModel> margins;
  margins.reserve(t.n_cols());
  for (const auto& c : t.columns()) {
    MarginalModel m = fit_marginal(c.values, c.meta);
    u.cols.push_back(pit(c.values, m, tie_policy, seed));
    margins.push_back(std::move(m));
  }
  FittedVine fv = fit_vine(u, kind, settings, nullptr, trace);
  fv.marginals = std::move(margins);
  fv.tie_policy = tie_policy;
  fv.seed = seed;
  return fv;
}

json model_to_json(const FittedVine& fv) {
  json j = fv.structure.to_json();
  j["version"] = 1;
  j["n"] = fv.n;
  j["loglik"] = fv.loglik;
  j["aic"] = fv.aic;
  j["bic"] = fv.bic;
  j["criterion"] = to_string(fv.criterion);
  j["tie_policy"] = to_string(fv.tie_policy);
  j["seed"] = fv.seed;
  json margins = json::array();
  for (const auto& m : fv.marginals) {
    json mj;
    mj["variable"] = m.variable;
    mj["kind"] = to_string(m.kind);
    mj["n"] = m.n;
    mj["values"] = m.sorted_values;
    margins.push_back(std::move(mj));
  }
  j["marginals"] = std::move(margins);
  if (!fv.curation_log.is_null()) j["curation_log"] = fv.curation_log;
  return j;
}

FittedVine model_from_json(const json& j) {
  if (!j.contains("version")) throw DataError("model JSON lacks a version field");
  if (j.at("version").get<int>() != 1) {
    throw DataError("unsupported model version");
  }
  FittedVine fv;
  fv.structure = VineStructure::from_json(j);
  fv.n = j.at("n").get<size_t>();
  fv.loglik = j.value("loglik", 0.0);
  fv.aic = j.value("aic", 0.0);
  fv.bic = j.value("bic", 0.0);
  fv.criterion = criterion_from_string(j.value("criterion", "aic"));
  fv.tie_policy = tie_policy_from_string(j.value("tie_policy", "jitter"));
  fv.seed = j.value("seed", static_cast<uint64_t>(0));
  if (j.contains("marginals")) {
    for (const auto& mj : j.at("marginals")) {
      MarginalModel m;
      m.variable = mj.at("variable").get<std::string>();
      m.kind = var_kind_from_string(mj.at("kind").get<std::string>());
      m.sorted_values = mj.at("values").get<std::vector<double>>();
      m.n = m.sorted_values.size();
      m.degenerate = !m.sorted_values.empty() &&
                     m.sorted_values.front() == m.sorted_values.back();
      fv.marginals.push_back(std::move(m));
    }
  }
  if (j.contains("curation_log")) fv.curation_log = j.at("curation_log");
  return fv;
}

}  // namespace vinedep
