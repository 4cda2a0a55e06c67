#pragma once
/**
 * @file report.hpp
 * @brief Outcome of a sampled property check.
 *
 * A check runs a number of trials. Each evaluated trial yields a signed margin
 * (slack of the inequality under test, or minus the defect of an identity);
 * the report keeps the smallest one together with a JSON witness that is
 * enough to replay that trial. The check passes iff the worst margin is at
 * least -tolerance.
 *
 * Reports merge associatively: trials and evaluations add up, the worst
 * margin is the minimum, and ties go to the lower trial index so the result
 * does not depend on merge order.
 */

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"

namespace unisphere {

using Json = nlohmann::ordered_json;

struct CheckReport {
  std::string name;
  double tolerance{0.0};
  std::size_t trials{0};
  std::size_t evaluated{0};
  std::optional<double> worst_margin;
  std::size_t witness_trial{0};
  Json witness;
  Json extra = Json::object();

  CheckReport() = default;
  CheckReport(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  bool passed() const { return !worst_margin || *worst_margin >= -tolerance; }

  /// Records one evaluated trial; make_witness is only invoked when the trial becomes the worst.
  template <class WitnessFn>
  void observe(double margin, std::size_t trial, WitnessFn&& make_witness) {
    ++evaluated;
    // NaN margins are failures, never silently dropped.
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    if (!worst_margin || margin < *worst_margin ||
        (margin == *worst_margin && trial < witness_trial)) {
      worst_margin = margin;
      witness_trial = trial;
      witness = make_witness();
    }
  }

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["passed"] = passed();
    j["trials"] = trials;
    j["evaluated"] = evaluated;
    j["tolerance"] = tolerance;
    j["worst_margin"] = worst_margin ? Json(*worst_margin) : Json(nullptr);
    j["witness"] = witness;
    for (const auto& [key, value] : extra.items()) j[key] = value;
    return j;
  }
};

/// Combines two partial reports of the same check.
inline CheckReport merge(CheckReport a, const CheckReport& b) {
  a.trials += b.trials;
  a.evaluated += b.evaluated;
  if (b.worst_margin &&
      (!a.worst_margin || *b.worst_margin < *a.worst_margin ||
       (*b.worst_margin == *a.worst_margin && b.witness_trial < a.witness_trial))) {
    a.worst_margin = b.worst_margin;
    a.witness_trial = b.witness_trial;
    a.witness = b.witness;
  }
  return a;
}

}  // namespace unisphere
