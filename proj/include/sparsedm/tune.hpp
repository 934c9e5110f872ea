#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sparsedm/core.hpp"
#include "sparsedm/index.hpp"
#include "sparsedm/ingest.hpp"
#include "sparsedm/sdm.hpp"

namespace sparsedm {

struct GridSpec {
  double step = 0.05;  // simplex step for the lambda grid
  // when non-empty, evaluate exactly these (lambda_t, lambda_o, lambda_u)
  // points instead of the step grid
  std::vector<std::array<double, 3>> explicit_points;

  void validate() const {
    if (explicit_points.empty() && (!(step > 0.0) || step > 1.0)) {
      throw std::invalid_argument("GridSpec: step must be in (0, 1]");
    }
  }
};

struct GridPointResult {
  double lambda_t = 0.0;
  double lambda_o = 0.0;
  double lambda_u = 0.0;
  double accuracy = 0.0;
};

struct TuneReport {
  std::vector<GridPointResult> grid;  // accuracy per evaluated lambda point
  SdmParams best;
  double best_accuracy = 0.0;
  std::size_t triplet_count = 0;
};

namespace detail {

inline std::vector<std::array<double, 3>> simplex_grid(double step) {
  std::vector<std::array<double, 3>> points;
  const int steps = static_cast<int>(std::llround(1.0 / step));
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps - i; ++j) {
      const double lt = std::min(1.0, i * step);
      const double lo = std::min(1.0 - lt, j * step);
      const double lu = std::max(0.0, 1.0 - lt - lo);
      points.push_back({lt, lo, lu});
    }
  }
  return points;
}

inline bool near(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::fabs(a[0] - b[0]) < 1e-9 && std::fabs(a[1] - b[1]) < 1e-9 &&
         std::fabs(a[2] - b[2]) < 1e-9;
}

}  // namespace detail

/// Fits the three lambda weights on training triplets by exhaustive search
/// over the unit 2-simplex, maximizing pairwise accuracy (the fraction of
/// triplets whose positive document outscores the negative). The score is
/// linear in lambda, so each (query, doc) pair is scored once per potential
/// family and every grid point is a dot product.
///
/// Ties are broken toward larger lambda_t, then larger lambda_o. The
/// engine-default lambdas and the caller's base lambdas are always included
/// in the grid, so the returned accuracy is never below either.
inline TuneReport tune_lambdas(const std::vector<TripletRecord>& triplets,
                               const std::vector<QueryRep>& queries,
                               const Index& index, const SdmParams& base,
                               const GridSpec& grid_spec = {}) {
  grid_spec.validate();
  base.validate();
  if (triplets.empty()) {
    throw std::invalid_argument("tune_lambdas: empty triplet set");
  }

  std::unordered_map<std::string, const QueryRep*> query_by_id;
  for (const auto& q : queries) query_by_id[q.query_id] = &q;

  std::vector<std::string> missing;
  auto resolve_doc = [&](const std::string& doc_id) -> const DocumentRep* {
    const DocumentRep* doc = index.find_doc(doc_id);
    if (!doc) missing.push_back("doc '" + doc_id + "'");
    return doc;
  };

  struct TripletComponents {
    SdmComponents positive;
    SdmComponents negative;
  };
  std::vector<TripletComponents> components;
  components.reserve(triplets.size());
  for (const auto& t : triplets) {
    auto qit = query_by_id.find(t.query_id);
    const QueryRep* q = qit == query_by_id.end() ? nullptr : qit->second;
    if (!q) missing.push_back("query '" + t.query_id + "'");
    const DocumentRep* pos = resolve_doc(t.positive_doc_id);
    const DocumentRep* neg = resolve_doc(t.negative_doc_id);
    if (q && pos && neg) {
      components.push_back({sdm_components(*q, *pos, base),
                            sdm_components(*q, *neg, base)});
    }
  }
  if (!missing.empty()) {
    std::string what = "tune_lambdas: unresolvable ids:";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) what += " " + missing[i];
    if (missing.size() > shown) {
      what += " (+" + std::to_string(missing.size() - shown) + " more)";
    }
    throw std::invalid_argument(what);
  }

  std::vector<std::array<double, 3>> grid;
  if (!grid_spec.explicit_points.empty()) {
    grid = grid_spec.explicit_points;
  } else {
    grid = detail::simplex_grid(grid_spec.step);
    const SdmParams defaults;
    const double base_sum = base.lambda_t + base.lambda_o + base.lambda_u;
    for (std::array<double, 3> extra :
         {std::array<double, 3>{defaults.lambda_t, defaults.lambda_o, defaults.lambda_u},
          base_sum > 0.0
              ? std::array<double, 3>{base.lambda_t / base_sum, base.lambda_o / base_sum,
                                      base.lambda_u / base_sum}
              : std::array<double, 3>{defaults.lambda_t, defaults.lambda_o,
                                      defaults.lambda_u}}) {
      bool present = false;
      for (const auto& p : grid) {
        if (detail::near(p, extra)) {
          present = true;
          break;
        }
      }
      if (!present) grid.push_back(extra);
    }
  }

  auto accuracy_at = [&](const std::array<double, 3>& lambda) {
    std::size_t wins = 0;
    for (const auto& c : components) {
      const double pos = lambda[0] * c.positive.term + lambda[1] * c.positive.phrase +
                         lambda[2] * c.positive.window;
      const double neg = lambda[0] * c.negative.term + lambda[1] * c.negative.phrase +
                         lambda[2] * c.negative.window;
      if (pos > neg) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(components.size());
  };

  TuneReport report;
  report.triplet_count = components.size();
  report.grid.reserve(grid.size());
  bool have_best = false;
  std::array<double, 3> best_lambda{};
  for (const auto& lambda : grid) {
    const double acc = accuracy_at(lambda);
    report.grid.push_back({lambda[0], lambda[1], lambda[2], acc});
    const bool better =
        !have_best || acc > report.best_accuracy ||
        (acc == report.best_accuracy &&
         (lambda[0] > best_lambda[0] ||
          (lambda[0] == best_lambda[0] && lambda[1] > best_lambda[1])));
    if (better) {
      have_best = true;
      best_lambda = lambda;
      report.best_accuracy = acc;
    }
  }

  report.best = base;
  report.best.lambda_t = best_lambda[0];
  report.best.lambda_o = best_lambda[1];
  report.best.lambda_u = best_lambda[2];
  return report;
}

}  // namespace sparsedm
