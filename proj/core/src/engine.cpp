#include "scfkit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace scfkit {

namespace {

bool within_interval(double value, double center, double radius) {
  return std::abs(value - center) <= radius;
}

void validate_config(const EngineConfig& cfg) {
  if (!(cfg.candidate_prune_radius >= 1.0)) {
    throw std::invalid_argument("candidate_prune_radius must be >= 1");
  }
}

void validate_group(const ReferenceGroup& group) {
  if (group.members.empty()) {
    throw std::invalid_argument("reference group must have at least one member");
  }
  for (const ReferenceValue& member : group.members) {
    if (!(member.priority > 0.0)) {
      throw std::invalid_argument("reference priorities must be positive");
    }
    if (!(member.standard_interval > 0.0)) {
      throw std::invalid_argument("standard intervals must be positive");
    }
  }
}

// All m existence flags of a group against the dataset. Flag t answers
// whether member t's reference has a corresponding measured item; a
// candidate at position p uses the sum over t != p.
std::vector<int> group_flags(const ReferenceGroup& group, const MeasuredDataset& md,
                             const EngineConfig& cfg, EngineStats* stats) {
  std::vector<int> flags;
  flags.reserve(group.members.size());
  for (const ReferenceValue& member : group.members) {
    if (cfg.correlation_predicate) {
      flags.push_back(cfg.correlation_predicate(member, md) ? 1 : 0);
    } else {
      flags.push_back(correlation_flag(member, md, stats));
    }
  }
  return flags;
}

}  // namespace

int correlation_flag(const ReferenceValue& related, const MeasuredDataset& md,
                     EngineStats* stats) {
  for (const DataItem& item : md.items) {
    if (stats) ++stats->interval_checks;
    if (within_interval(item.value, related.value, related.standard_interval)) {
      return 1;
    }
  }
  return 0;
}

SupportCoefficient support_coefficient(std::span<const int> flags, int group_size) {
  if (group_size < 1) {
    throw std::invalid_argument("group size must be >= 1");
  }
  if (flags.size() != static_cast<std::size_t>(group_size - 1)) {
    throw std::invalid_argument("expected exactly group_size - 1 correlation flags");
  }
  int set = 0;
  for (int flag : flags) {
    if (flag != 0 && flag != 1) {
      throw std::invalid_argument("correlation flags must be 0 or 1");
    }
    set += flag;
  }
  return support_coefficient(set, group_size);
}

SupportCoefficient support_coefficient(int set_flags, int group_size) {
  if (group_size < 1) {
    throw std::invalid_argument("group size must be >= 1");
  }
  if (set_flags < 0 || set_flags > group_size - 1) {
    throw std::invalid_argument("set flag count must lie in [0, group_size - 1]");
  }
  return {(1.0 + set_flags) / group_size, group_size};
}

ShiftInterval shift_interval(const SupportCoefficient& scf, double standard_interval) {
  if (!(standard_interval > 0.0)) {
    throw std::invalid_argument("standard interval must be positive");
  }
  const double m = scf.group_size;
  return {standard_interval * scf.value * ((2.0 * m - 1.0) / m)};
}

double item_possibility(double measured, double reference, const ShiftInterval& delta) {
  if (!(delta.width > 0.0)) {
    throw std::invalid_argument("shift interval width must be positive");
  }
  return 1.0 - std::abs(measured - reference) / delta.width;
}

int correlation_flag_from_possibility(double possibility, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("correlation threshold must lie in (0, 1)");
  }
  return possibility >= threshold ? 1 : 0;
}

double lift_with_interval(double possibility, double width) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("interval width must be positive");
  }
  return 1.0 - (1.0 - possibility) / width;
}

double lift_possibility(double possibility, const SupportCoefficient& scf) {
  if (!(possibility > 0.0 && possibility <= 1.0)) {
    throw std::invalid_argument("possibility must lie in (0, 1]");
  }
  return lift_with_interval(possibility, shift_interval(scf, 1.0).width);
}

double weighted_possibility(std::span<const double> possibilities,
                            std::span<const double> priorities) {
  if (possibilities.empty() || possibilities.size() != priorities.size()) {
    throw std::invalid_argument("possibilities and priorities must be nonempty and equal-sized");
  }
  double weighted = 0.0;
  double total = 0.0;
  double lo = possibilities[0];
  double hi = possibilities[0];
  for (std::size_t i = 0; i < possibilities.size(); ++i) {
    if (!(priorities[i] > 0.0)) {
      throw std::invalid_argument("priorities must be positive");
    }
    weighted += priorities[i] * possibilities[i];
    total += priorities[i];
    lo = std::min(lo, possibilities[i]);
    hi = std::max(hi, possibilities[i]);
  }
  return std::clamp(weighted / total, lo, hi);
}

std::optional<ItemMatch> match_item(const DataItem& item, const ReferenceGroup& group,
                                    const MeasuredDataset& md, const EngineConfig& cfg,
                                    EngineStats* stats) {
  validate_config(cfg);
  validate_group(group);

  const int m = static_cast<int>(group.members.size());

  // Exact value match short-circuits with full support.
  for (std::size_t p = 0; p < group.members.size(); ++p) {
    if (item.value == group.members[p].value) {
      SupportCoefficient scf{1.0, m};
      return ItemMatch{p, scf, shift_interval(scf, group.members[p].standard_interval), 1.0};
    }
  }

  std::optional<std::vector<int>> flags;
  int flag_total = 0;
  std::optional<ItemMatch> best;
  for (std::size_t p = 0; p < group.members.size(); ++p) {
    const ReferenceValue& candidate = group.members[p];
    const double distance = std::abs(item.value - candidate.value);
    if (stats) ++stats->interval_checks;
    if (!(distance < cfg.candidate_prune_radius * candidate.standard_interval)) {
      continue;
    }
    if (!flags) {
      flags = group_flags(group, md, cfg, stats);
      for (int f : *flags) flag_total += f;
    }
    const SupportCoefficient scf = support_coefficient(flag_total - (*flags)[p], m);
    const ShiftInterval delta = shift_interval(scf, candidate.standard_interval);
    const double mu = item_possibility(item.value, candidate.value, delta);
    if (!best || mu > best->possibility) {
      best = ItemMatch{p, scf, delta, mu};
    }
  }
  if (best && best->possibility > 0.0) {
    return best;
  }
  return std::nullopt;
}

std::optional<GroupMatch> match_group(const ReferenceGroup& group, const MeasuredDataset& md,
                                      const EngineConfig& cfg, EngineStats* stats) {
  validate_config(cfg);
  validate_group(group);

  const int m = static_cast<int>(group.members.size());
  const std::vector<int> flags = group_flags(group, md, cfg, stats);
  int flag_total = 0;
  for (int f : flags) flag_total += f;

  GroupMatch result;
  result.members.reserve(group.members.size());
  std::vector<double> possibilities;
  std::vector<double> priorities;
  possibilities.reserve(group.members.size());
  priorities.reserve(group.members.size());

  for (std::size_t l = 0; l < group.members.size(); ++l) {
    const ReferenceValue& member = group.members[l];

    // Corresponding measured item: the closest one within the prune radius.
    std::size_t best_index = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < md.items.size(); ++i) {
      if (stats) ++stats->interval_checks;
      const double distance = std::abs(md.items[i].value - member.value);
      if (distance < best_distance) {
        best_distance = distance;
        best_index = i;
      }
    }
    if (!(best_distance < cfg.candidate_prune_radius * member.standard_interval)) {
      return std::nullopt;
    }

    MemberMatch match;
    match.item_index = best_index;
    if (best_distance == 0.0) {
      match.scf = SupportCoefficient{1.0, m};
      match.delta = shift_interval(match.scf, member.standard_interval);
      match.possibility = 1.0;
    } else {
      match.scf = support_coefficient(flag_total - flags[l], m);
      match.delta = shift_interval(match.scf, member.standard_interval);
      match.possibility = item_possibility(md.items[best_index].value, member.value, match.delta);
      if (!(match.possibility > 0.0)) {
        return std::nullopt;
      }
    }
    possibilities.push_back(match.possibility);
    priorities.push_back(member.priority);
    result.members.push_back(match);
  }

  result.possibility = weighted_possibility(possibilities, priorities);
  return result;
}

std::vector<Hypothesis> make_hypotheses(const MeasuredDataset& md,
                                        std::span<const ReferenceGroup> groups,
                                        const EngineConfig& cfg, EngineStats* stats) {
  validate_config(cfg);

  // Group containment is item-independent, so evaluate it lazily once per
  // group; the per-item gate below still follows the blind search.
  std::vector<char> evaluated(groups.size(), 0);
  std::vector<std::optional<GroupMatch>> group_results(groups.size());

  std::unordered_map<std::string, std::size_t> slot_by_id;
  std::vector<Hypothesis> hypotheses;

  for (const DataItem& item : md.items) {
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (!match_item(item, groups[j], md, cfg, stats)) {
        continue;
      }
      if (!evaluated[j]) {
        group_results[j] = match_group(groups[j], md, cfg, stats);
        evaluated[j] = 1;
      }
      if (!group_results[j]) {
        continue;
      }
      const GroupMatch& gm = *group_results[j];
      Hypothesis hypothesis;
      hypothesis.group_id = groups[j].id;
      hypothesis.group_possibility = gm.possibility;
      hypothesis.item_possibilities.reserve(gm.members.size());
      for (std::size_t l = 0; l < gm.members.size(); ++l) {
        hypothesis.item_possibilities.push_back(
            {gm.members[l].item_index, l, gm.members[l].possibility});
      }

      auto [it, inserted] = slot_by_id.try_emplace(hypothesis.group_id, hypotheses.size());
      if (inserted) {
        hypotheses.push_back(std::move(hypothesis));
      } else if (hypothesis.group_possibility > hypotheses[it->second].group_possibility) {
        hypotheses[it->second] = std::move(hypothesis);
      }
    }
  }

  std::sort(hypotheses.begin(), hypotheses.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.group_possibility != b.group_possibility) {
      return a.group_possibility > b.group_possibility;
    }
    return a.group_id < b.group_id;
  });
  return hypotheses;
}

}  // namespace scfkit
