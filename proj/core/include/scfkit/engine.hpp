#pragma once

// Domain-agnostic engine for identifying inaccurate measured data through
// qualitative correlations among related data.
//
// A measured dataset MD = {d_1..d_n} is interpreted against reference groups
// R_j = {r_j1..r_jm}. Members of a group describe one phenomenon and are
// expected to be simultaneously present or absent, so the presence of one
// member's data enhances the identification of the others. That support is
// quantified by the support coefficient SCF = (1 + set flags) / m, which
// widens or narrows the tolerance used to accept an inaccurate data item.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scfkit {

struct DataItem {
  double value = 0.0;
  std::string label;  // optional opaque identifier

  bool operator==(const DataItem&) const = default;
};

struct MeasuredDataset {
  std::vector<DataItem> items;

  bool operator==(const MeasuredDataset&) const = default;
};

/// One reference value r_jl of a group, with its priority weight and the
/// standard fuzzy interval d_o around it (per-value overrides allowed).
struct ReferenceValue {
  double value = 0.0;
  double priority = 1.0;           // > 0
  double standard_interval = 1.0;  // d_o, > 0

  bool operator==(const ReferenceValue&) const = default;
};

struct ReferenceGroup {
  std::string id;
  std::vector<ReferenceValue> members;  // nonempty

  bool operator==(const ReferenceGroup&) const = default;
};

/// Binary correlation flags for the m-1 data items related to one candidate.
using CorrelationFlags = std::vector<int>;

/// SCF value in (0, 1] together with the group size it was computed for.
struct SupportCoefficient {
  double value = 1.0;
  int group_size = 1;
};

/// Dynamic tolerance around a reference value; always in (0, 2*d_o).
struct ShiftInterval {
  double width = 0.0;
};

struct EngineConfig {
  /// Candidates r_jp are considered only when |d - r_jp| is below this
  /// multiple of the candidate's standard interval. 2 is the analytic
  /// maximum width of any shift interval, so the default prunes nothing
  /// that could be accepted.
  double candidate_prune_radius = 2.0;

  /// Threshold for deriving binary correlation flags from possibility
  /// values (used by second-level matching).
  double correlation_threshold = 0.5;

  /// Optional replacement for the built-in correlation test. The default
  /// sets a flag when any measured item lies within the related reference's
  /// standard interval.
  std::function<bool(const ReferenceValue&, const MeasuredDataset&)> correlation_predicate;
};

/// Work counters for complexity measurements. Every comparison of a measured
/// value against a reference interval bumps interval_checks.
struct EngineStats {
  std::uint64_t interval_checks = 0;
};

/// Qualitative correlation c_i(d_t): 1 iff some measured item lies in
/// [r - d_o, r + d_o] for the related reference r, else 0.
int correlation_flag(const ReferenceValue& related, const MeasuredDataset& md,
                     EngineStats* stats = nullptr);

/// SCF = (1 + sum of flags) / m. Requires exactly m-1 binary flags.
/// Throws std::invalid_argument for m < 1, a flag count mismatch, or a
/// non-binary flag.
SupportCoefficient support_coefficient(std::span<const int> flags, int group_size);

/// SCF from a pre-summed flag count (0 <= set_flags <= m-1).
SupportCoefficient support_coefficient(int set_flags, int group_size);

/// Dynamic shift interval: width = (2m - 1)/m * d_o * SCF.
/// Degenerates to exactly d_o when m = 1.
ShiftInterval shift_interval(const SupportCoefficient& scf, double standard_interval);

/// Possibility that a measured value is the reference value:
/// 1 - |d - r| / delta. Not clamped; callers reject values <= 0.
double item_possibility(double measured, double reference, const ShiftInterval& delta);

/// Binary correlation flag from a possibility value: 1 iff mu >= threshold.
/// Threshold must lie in (0, 1).
int correlation_flag_from_possibility(double possibility, double threshold = 0.5);

/// Second-level update of a possibility given support from related items,
/// on the possibility scale (d_o = 1): 1 - (1 - mu) / ((2m - 1)/m * SCF).
/// Requires 0 < mu <= 1. The result may be <= 0 and is then rejected by
/// callers.
double lift_possibility(double possibility, const SupportCoefficient& scf);

/// 1 - (1 - mu) / width; the shared core of lift_possibility, exposed for
/// reference-table generation.
double lift_with_interval(double possibility, double width);

/// Priority-weighted mean of possibilities, clamped into
/// [min(mu), max(mu)] so the weighted-mean bounds hold exactly in floating
/// point. Priorities must be positive and match the possibility count.
double weighted_possibility(std::span<const double> possibilities,
                            std::span<const double> priorities);

/// Result of matching one data item against a group: the best member
/// candidate plus the chain of values that produced its possibility.
struct ItemMatch {
  std::size_t member_index = 0;
  SupportCoefficient scf;
  ShiftInterval delta;
  double possibility = 0.0;
};

/// Possibility that the item belongs to the group. Evaluates every member
/// within the prune radius and keeps the best accepted possibility; an exact
/// value match short-circuits with SCF = 1 and possibility 1. Returns
/// nullopt when no candidate yields a positive possibility.
std::optional<ItemMatch> match_item(const DataItem& item, const ReferenceGroup& group,
                                    const MeasuredDataset& md, const EngineConfig& cfg = {},
                                    EngineStats* stats = nullptr);

struct MemberMatch {
  std::size_t item_index = 0;  // measured item chosen for this member
  SupportCoefficient scf;
  ShiftInterval delta;
  double possibility = 0.0;
};

struct GroupMatch {
  std::vector<MemberMatch> members;  // one entry per group member
  double possibility = 0.0;          // priority-weighted mean
};

/// Possibility that the whole group is present in the dataset. Every member
/// must be matched by a measured item with positive possibility; one failed
/// member rejects the group. The group possibility is the priority-weighted
/// mean of the member possibilities.
std::optional<GroupMatch> match_group(const ReferenceGroup& group, const MeasuredDataset& md,
                                      const EngineConfig& cfg = {},
                                      EngineStats* stats = nullptr);

struct HypothesisEntry {
  std::size_t item_index = 0;
  std::size_t member_index = 0;
  double possibility = 0.0;
};

struct Hypothesis {
  std::string group_id;
  std::vector<HypothesisEntry> item_possibilities;
  double group_possibility = 0.0;
};

/// Top-level hypothesis algorithm: a group enters the result when some item
/// possibly belongs to it and the group is possibly contained in the
/// dataset. Duplicate identifications of one group are collapsed keeping the
/// maximum possibility. Output is sorted by descending possibility, ties by
/// group id.
std::vector<Hypothesis> make_hypotheses(const MeasuredDataset& md,
                                        std::span<const ReferenceGroup> groups,
                                        const EngineConfig& cfg = {},
                                        EngineStats* stats = nullptr);

}  // namespace scfkit
